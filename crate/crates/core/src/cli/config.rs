//! TOML model configuration.
//!
//! ```toml
//! [model]
//! kind = "free_product"
//! name = "srw"
//!
//! [free_product]
//! factors = [2, 2, 2]
//! names = ["a", "b", "c"]
//!
//! [[step]]
//! word = "a"
//! p = "1/3"
//! ```
//!
//! Colored trees use `[colored_tree]` with `colors`, `root` and a
//! `[colored_tree.neighbours]` table, and steps keyed by `path` (color names
//! along the geodesic, source first) or `uniform_ball = k` for a source color.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Zero};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::markov_kernel::{Overrides, StepDistribution, WalkModel};
use crate::tolerances::{Budgets, Tolerances};
use crate::tree_model::{ColoredTreeSpec, FreeProductSpec, Tree};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: RawModel,
    free_product: Option<RawFreeProduct>,
    colored_tree: Option<RawColored>,
    #[serde(default)]
    step: Vec<RawStep>,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    budget: RawBudget,
    #[serde(default)]
    overrides: RawOverrides,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: Spanned<String>,
    #[serde(default)]
    name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFreeProduct {
    factors: Vec<u32>,
    names: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawColored {
    colors: Vec<String>,
    root: String,
    neighbours: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    word: Option<Spanned<String>>,
    path: Option<Spanned<String>>,
    from: Option<Spanned<String>>,
    uniform_ball: Option<usize>,
    p: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tol: Option<f64>,
    identity_tol: Option<f64>,
    z_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    oracle_states: Option<usize>,
    classify_elements: Option<usize>,
    irreducibility_horizon: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverrides {
    residue_shift: Option<i64>,
}

/// A loaded configuration: the walk plus solver settings.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub name: String,
    pub model: WalkModel,
    pub tolerances: Tolerances,
    pub budgets: Budgets,
    /// SHA-256 of the source text, recorded in report headers.
    pub hash: String,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn parse_err(src: &str, span: std::ops::Range<usize>, msg: impl Into<String>) -> Error {
    Error::Parse { line: line_of(src, span.start), msg: msg.into() }
}

/// Parse an exact rational such as `1/3`, `2` or `0.25`.
pub fn parse_rational(text: &str) -> std::result::Result<BigRational, String> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let digits = format!("{ip}{fp}");
        let n: BigInt = digits.parse().map_err(|_| format!("bad decimal {t:?}"))?;
        let d = num::pow(BigInt::from(10), fp.len());
        return Ok(BigRational::new(n, d));
    }
    t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| format!("bad rational {t:?}"))
}

impl ModelConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::from_str(&src)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(src: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(src).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(src, s.start)).unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        let kind = raw.model.kind.get_ref().as_str();
        let (tree, steps) = match kind {
            "free_product" => {
                let fp = raw
                    .free_product
                    .as_ref()
                    .ok_or_else(|| parse_err(src, raw.model.kind.span(), "missing [free_product] table"))?;
                let tree =
                    Tree::free_product(FreeProductSpec { factors: fp.factors.clone(), names: fp.names.clone() })?;
                let f = tree.as_free_product().unwrap();
                let mut words = Vec::new();
                for s in &raw.step {
                    let w = s.word.as_ref().ok_or_else(|| {
                        parse_err(src, s.p.as_ref().map_or(0..0, |p| p.span()), "free-product step needs `word`")
                    })?;
                    if s.path.is_some() || s.uniform_ball.is_some() || s.from.is_some() {
                        return Err(parse_err(src, w.span(), "free-product steps only take `word` and `p`"));
                    }
                    let letters = f.parse_word(w.get_ref()).map_err(|e| parse_err(src, w.span(), e.to_string()))?;
                    let p = s.p.as_ref().ok_or_else(|| parse_err(src, w.span(), "step needs `p`"))?;
                    let q = parse_rational(p.get_ref()).map_err(|m| parse_err(src, p.span(), m))?;
                    words.push((crate::tree_model::Vertex::from_path(letters), q));
                }
                (tree, StepDistribution::Words(words))
            }
            "colored_tree" => {
                let ct = raw
                    .colored_tree
                    .as_ref()
                    .ok_or_else(|| parse_err(src, raw.model.kind.span(), "missing [colored_tree] table"))?;
                let index = |name: &str| {
                    ct.colors
                        .iter()
                        .position(|c| c == name)
                        .ok_or_else(|| Error::Model(format!("unknown color {name:?}")))
                };
                let mut neighbours = Vec::new();
                for c in &ct.colors {
                    let list = ct
                        .neighbours
                        .get(c)
                        .ok_or_else(|| Error::Model(format!("no neighbour list for color {c:?}")))?;
                    neighbours.push(list.iter().map(|n| index(n)).collect::<Result<Vec<_>>>()?);
                }
                if ct.neighbours.len() != ct.colors.len() {
                    return Err(Error::Model("neighbour lists must match the color list".into()));
                }
                let tree = Tree::colored(ColoredTreeSpec {
                    colors: ct.colors.clone(),
                    neighbours,
                    root_color: index(&ct.root)?,
                })?;
                let mut tables: Vec<BTreeMap<Vec<u8>, BigRational>> = vec![BTreeMap::new(); ct.colors.len()];
                let centers = tree.representative_centers();
                for s in &raw.step {
                    if let Some(word) = &s.word {
                        return Err(parse_err(src, word.span(), "colored steps use `path`"));
                    }
                    match (&s.path, s.uniform_ball) {
                        (Some(path), None) => {
                            let key = path
                                .get_ref()
                                .split_whitespace()
                                .map(|n| index(n).map(|i| i as u8))
                                .collect::<Result<Vec<u8>>>()
                                .map_err(|e| parse_err(src, path.span(), e.to_string()))?;
                            if key.is_empty() {
                                return Err(parse_err(src, path.span(), "empty path"));
                            }
                            let p = s.p.as_ref().ok_or_else(|| parse_err(src, path.span(), "step needs `p`"))?;
                            let q = parse_rational(p.get_ref()).map_err(|m| parse_err(src, p.span(), m))?;
                            let table = &mut tables[key[0] as usize];
                            if table.insert(key, q).is_some() {
                                return Err(parse_err(src, path.span(), "duplicate step path"));
                            }
                        }
                        (None, Some(radius)) => {
                            let from =
                                s.from.as_ref().ok_or_else(|| Error::Model("`uniform_ball` needs `from`".into()))?;
                            let col = index(from.get_ref()).map_err(|e| parse_err(src, from.span(), e.to_string()))?;
                            let center = centers.iter().find(|v| tree.color(v) == col).unwrap();
                            let ball = tree.ball(center, radius);
                            let q = BigRational::new(BigInt::from(1), BigInt::from(ball.len()));
                            for w in ball {
                                // Uniform over vertices: a key shared by several vertices keeps the per-vertex mass.
                                tables[col].insert(tree.color_key(center, &w), q.clone());
                            }
                        }
                        _ => {
                            return Err(Error::Model("colored step needs exactly one of `path`, `uniform_ball`".into()))
                        }
                    }
                }
                (tree, StepDistribution::Colored(tables))
            }
            other => return Err(parse_err(src, raw.model.kind.span(), format!("unknown model kind {other:?}"))),
        };
        let mut model = WalkModel::new(tree, steps)?;
        if let Some(shift) = raw.overrides.residue_shift {
            model.set_overrides(Overrides { residue_shift: shift });
        }
        let mut tolerances = Tolerances::default();
        if let Some(t) = raw.solver.tol {
            tolerances.fixed_point = t;
        }
        if let Some(t) = raw.solver.identity_tol {
            tolerances.identity = t;
        }
        if let Some(z) = raw.solver.z_max {
            tolerances.z_max = z;
        }
        let mut budgets = Budgets::default();
        if let Some(b) = raw.budget.oracle_states {
            budgets.oracle_states = b;
        }
        if let Some(b) = raw.budget.classify_elements {
            budgets.classify_elements = b;
        }
        if let Some(b) = raw.budget.irreducibility_horizon {
            budgets.irreducibility_horizon = b;
        }
        let hash = Sha256::digest(src.as_bytes()).iter().map(|b| format!("{b:02x}")).collect::<String>();
        Ok(ModelConfig { name: raw.model.name, model, tolerances, budgets, hash })
    }
}
