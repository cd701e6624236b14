//! Shared helpers for the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::HashMap;

use num::{BigRational, One, Zero};
use treewalk::cli::stock;
use treewalk::curve_solver::series_exact;
use treewalk::numeric::ser_mul;
use treewalk::path_system::{CrossingTuple, PathSystem};
use treewalk::tree_model::Vertex;

/// Counts gathered by [`decomposition_bijection`].
#[derive(Debug, Default)]
pub struct BijectionStats {
    pub paths: usize,
    pub chains: usize,
}

/// Every walk of length `≤ nmax` from a start `c ∈ B(x) ∖ B(y)` that first
/// enters `B(y)` at its last step decomposes uniquely along `[x, y]`: the
/// legs are restricted crossing paths, they concatenate back to the walk,
/// and for each crossing chain the probability of the walks mapped to it
/// equals the coefficient of the product of its leg coordinates.
pub fn decomposition_bijection(model: &str, x: &str, nmax: usize) -> Result<BijectionStats, String> {
    let cfg = stock(model).map_err(|e| e.to_string())?;
    let m = &cfg.model;
    let t = m.tree();
    let k = m.k();
    let sys = PathSystem::build(m).map_err(|e| e.to_string())?;
    let xv = t.parse_vertex(x).map_err(|e| e.to_string())?;
    let y = t.base();
    let geo = t.geodesic(&xv, &y);
    let j = series_exact(sys.psi(), nmax);
    let mut stats = BijectionStats::default();
    for c in t.ball(&xv, k).into_iter().filter(|c| t.distance(c, &y) > k) {
        // (chain, length) -> total probability of the walks mapped there.
        let mut mass: HashMap<(CrossingTuple, usize), BigRational> = HashMap::new();
        for n in 1..=nmax {
            for (path, p) in m.enumerate_paths(&c, n) {
                let first = path.iter().position(|w| t.distance(w, &y) <= k);
                if first != Some(n) {
                    continue;
                }
                stats.paths += 1;
                let d = sys
                    .decompose_path(&xv, &y, &path)
                    .ok_or_else(|| format!("no decomposition for {}", fmt_path(&sys, &path)))?;
                // Round trip: legs overlap in their endpoints.
                let mut joined = vec![path[0].clone()];
                for leg in &d.legs {
                    if leg.first() != joined.last() {
                        return Err(format!("legs do not chain in {}", fmt_path(&sys, &path)));
                    }
                    joined.extend_from_slice(&leg[1..]);
                }
                if joined != path || d.tail.len() != 1 {
                    return Err(format!("round trip failed for {}", fmt_path(&sys, &path)));
                }
                for (s, leg) in d.legs.iter().enumerate() {
                    let center = &geo[d.tuple.indices[s]];
                    let end = leg.last().unwrap();
                    let inner_ok = leg[1..leg.len() - 1].iter().all(|w| t.distance(w, center) > k);
                    if !inner_ok || t.distance(end, center) > k || t.distance(&leg[0], center) != k + 1 {
                        return Err(format!("leg {s} of {} is not a crossing path", fmt_path(&sys, &path)));
                    }
                }
                *mass.entry((d.tuple, n)).or_insert_with(BigRational::zero) += p;
            }
        }
        let segment = sys.xi_segment(&xv, &y).map_err(|e| e.to_string())?;
        for tu in segment.into_iter().filter(|tu| tu.vertices[0] == c) {
            stats.chains += 1;
            let mut prod = vec![BigRational::zero(); nmax + 1];
            prod[0] = BigRational::one();
            for &l in &tu.legs {
                prod = ser_mul(&prod, &j[l], nmax + 1);
            }
            for (n, coeff) in prod.iter().enumerate().skip(1) {
                let got = mass.remove(&(tu.clone(), n)).unwrap_or_else(BigRational::zero);
                if &got != coeff {
                    return Err(format!("chain {:?} at n = {n}: walks {got} vs coordinates {coeff}", tu.vertices));
                }
            }
        }
        if let Some(((tu, n), _)) = mass.into_iter().next() {
            return Err(format!("walks decomposed into an unlisted chain {:?} (n = {n})", tu.vertices));
        }
    }
    Ok(stats)
}

fn fmt_path(sys: &PathSystem, path: &[Vertex]) -> String {
    let t = sys.model().tree();
    path.iter().map(|v| t.format_vertex(v)).collect::<Vec<_>>().join(" ")
}
