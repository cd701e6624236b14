//! Bounded versus unbounded excursions of crossing pairs.

use std::collections::{BTreeSet, BinaryHeap, HashSet};

use super::{PathSystem, XiIndex};
use crate::tree_model::Vertex;

/// Verdict for one crossing pair `(a, b)_y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XiClass {
    /// Restricted excursions reach arbitrarily far; `witness` is a crossing
    /// pair in the excursion closure lying beyond the escape bound.
    Infinite {
        witness: XiIndex,
        distance: usize,
        bound: usize,
    },
    /// Every restricted path from `a` to `b` stays in `excursion`.
    Finite {
        excursion: Vec<Vertex>,
    },
    Unknown {
        reason: String,
    },
}

impl XiClass {
    pub fn is_finite(&self) -> bool {
        matches!(self, XiClass::Finite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, XiClass::Infinite { .. })
    }
}

impl PathSystem {
    /// `k · (N + 2)` where `N = |Γ\X₀|`: in both tree families the ball of
    /// radius `2k` around a vertex is determined by the orbit of its center.
    /// A crossing pair in the excursion closure farther than this from `y`
    /// sits behind a repeated configuration along a geodesic, which can be
    /// pumped indefinitely.
    pub fn escape_bound(&self) -> usize {
        self.model.k() * (self.model.tree().orbit_count() + 2)
    }

    /// Classify a crossing pair by exploring the closure of crossing pairs
    /// used by its restricted paths, farthest first.
    pub fn classify_xi(&self, xi: &XiIndex, budget: usize) -> XiClass {
        let t = self.model.tree();
        let k = self.model.k();
        let bound = self.escape_bound();
        let mut seen: HashSet<XiIndex> = HashSet::new();
        let mut heap: BinaryHeap<(usize, u64, XiIndex)> = BinaryHeap::new();
        let mut excursion: BTreeSet<Vertex> = BTreeSet::new();
        let mut seq = 0u64;
        seen.insert(xi.clone());
        heap.push((t.distance(&xi.a, &xi.y), u64::MAX, xi.clone()));
        while let Some((dist, _, e)) = heap.pop() {
            if dist > bound {
                return XiClass::Infinite { witness: e, distance: dist, bound };
            }
            if seen.len() > budget {
                return XiClass::Unknown { reason: format!("more than {budget} crossing pairs explored") };
            }
            excursion.insert(e.a.clone());
            for (c, _) in self.model.support(&e.a) {
                if t.distance(&c, &e.y) <= k {
                    continue;
                }
                for tu in self.chains(&c, &e.b, &e.y) {
                    let geo = t.geodesic(&c, &e.y);
                    for s in 0..tu.legs.len() {
                        let leg = XiIndex {
                            y: geo[tu.indices[s]].clone(),
                            a: tu.vertices[s].clone(),
                            b: tu.vertices[s + 1].clone(),
                        };
                        if seen.insert(leg.clone()) {
                            seq += 1;
                            heap.push((t.distance(&leg.a, &xi.y), u64::MAX - seq, leg));
                        }
                    }
                }
            }
        }
        excursion.insert(xi.b.clone());
        XiClass::Finite { excursion: excursion.into_iter().collect() }
    }

    /// Classify every coordinate through its representative.
    pub fn classify_all(&self, budget: usize) -> Vec<XiClass> {
        self.orbits.iter().map(|o| self.classify_xi(&o.rep, budget)).collect()
    }
}
