//! Batch front end: configuration loading, commands and CSV reports.

pub mod app;
pub mod commands;
pub mod config;
pub mod report;
pub mod validate;

pub use config::{parse_rational, ModelConfig};

/// Stock configurations shipped with the repository, by short name.
pub const STOCK: &[(&str, &str)] = &[
    ("srw_free", include_str!("../../../../configs/srw_free.toml")),
    ("srw_free_q3", include_str!("../../../../configs/srw_free_q3.toml")),
    ("srw_colored", include_str!("../../../../configs/srw_colored.toml")),
    ("srw_colored_q3", include_str!("../../../../configs/srw_colored_q3.toml")),
    ("srw_loop", include_str!("../../../../configs/srw_loop.toml")),
    ("mu", include_str!("../../../../configs/mu.toml")),
    ("nu", include_str!("../../../../configs/nu.toml")),
    ("green_poly", include_str!("../../../../configs/green_poly.toml")),
    ("biregular", include_str!("../../../../configs/biregular.toml")),
    ("srw_shifted", include_str!("../../../../configs/srw_shifted.toml")),
];

/// Load a stock configuration by name.
pub fn stock(name: &str) -> crate::Result<ModelConfig> {
    let (_, src) = STOCK
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| crate::Error::Argument(format!("no stock model {name:?}")))?;
    ModelConfig::from_str(src)
}
