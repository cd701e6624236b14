//! Crossing pairs `Ξ`, crossing chains along geodesics, the polynomial map
//! `ψ` over `Γ\Ξ` and its diagonal symmetry `A`.
//!
//! A crossing pair `(a, b)_y` has `a` on the sphere of radius `k + 1` around
//! `y`, `b` in the ball `B(y)` of radius `k`, and at least one admissible path
//! from `a` to `b` whose intermediate vertices avoid `B(y)`. Every such path
//! that starts outside `B(y)` splits uniquely at its first entries into the
//! balls along a geodesic, which turns restricted Green functions into
//! polynomials in the restricted Green functions of shorter crossings.

pub mod classify;
pub mod digraph;
pub mod poly;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};
use crate::markov_kernel::WalkModel;
use crate::numeric::Scalar;
use crate::tree_model::{Tree, Vertex};

pub use classify::XiClass;
pub use digraph::DependencyDigraph;
pub use poly::{Monomial, PolySystem};

/// A concrete crossing pair `(a, b)_y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XiIndex {
    pub y: Vertex,
    pub a: Vertex,
    pub b: Vertex,
}

/// One `Γ`-orbit of crossing pairs, i.e. one coordinate of the system.
#[derive(Clone, Debug)]
pub struct XiOrbit {
    /// Representative element.
    pub rep: XiIndex,
    /// Canonical orbit label.
    pub key: Vec<u8>,
    /// Length of a shortest restricted path from `a` to `b`.
    pub witness_len: usize,
    /// Periodicity class `r(a, b)`.
    pub residue: u64,
}

/// Crossing vertices `(c₀, …, c_l)` along a geodesic `[x, y] = (x₀, …, x_m)`,
/// with crossing indices `(i₁, …, i_l)` and the coordinate of every leg
/// `(c_{s−1}, c_s)_{x_{i_s}}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrossingTuple {
    pub vertices: Vec<Vertex>,
    pub indices: Vec<usize>,
    pub legs: Vec<usize>,
}

/// Decomposition of a path along a geodesic into crossing legs plus a final
/// segment inside `B(y)`.
#[derive(Clone, Debug)]
pub struct PathDecomposition {
    pub tuple: CrossingTuple,
    pub legs: Vec<Vec<Vertex>>,
    pub tail: Vec<Vertex>,
}

/// Per-ball lookup of the crossing pairs leaving a given vertex, cached by
/// `(center, source)`.
struct LegTable<'a> {
    tree: &'a Tree,
    k: usize,
    index: &'a HashMap<Vec<u8>, usize>,
    cache: RefCell<HashMap<(Vertex, Vertex), Legs>>,
}

/// Crossing vertices of one leg with their coordinate indices.
type Legs = Rc<Vec<(Vertex, usize)>>;

impl<'a> LegTable<'a> {
    fn new(tree: &'a Tree, k: usize, index: &'a HashMap<Vec<u8>, usize>) -> Self {
        LegTable { tree, k, index, cache: RefCell::new(HashMap::new()) }
    }

    /// Pairs `(u, b)_x` with a known label, as `(b, label)`.
    fn legs(&self, x: &Vertex, u: &Vertex) -> Rc<Vec<(Vertex, usize)>> {
        let key = (x.clone(), u.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        let list: Vec<(Vertex, usize)> = self
            .tree
            .ball(x, self.k)
            .into_iter()
            .filter_map(|b| self.index.get(&self.tree.orbit_key(x, &[u, &b])).map(|&i| (b, i)))
            .collect();
        let list = Rc::new(list);
        self.cache.borrow_mut().insert(key, list.clone());
        list
    }

    /// Crossing index `1 + max{i : u ∈ B(x_i)}` along `geo`.
    fn crossing_index(&self, geo: &[Vertex], u: &Vertex) -> usize {
        1 + (0..geo.len()).rev().find(|&i| self.tree.distance(u, &geo[i]) <= self.k).expect("vertex near geodesic")
    }

    /// Enumerate every crossing chain starting at `start` along `geo` whose
    /// legs are accepted by `member`.
    fn for_each_chain(
        &self,
        geo: &[Vertex],
        start: &Vertex,
        member: &dyn Fn(usize) -> bool,
        f: &mut dyn FnMut(&CrossingTuple),
    ) {
        let mut t = CrossingTuple { vertices: vec![start.clone()], indices: Vec::new(), legs: Vec::new() };
        self.extend(geo, &mut t, member, f);
    }

    fn extend(
        &self,
        geo: &[Vertex],
        t: &mut CrossingTuple,
        member: &dyn Fn(usize) -> bool,
        f: &mut dyn FnMut(&CrossingTuple),
    ) {
        let y = geo.last().unwrap();
        let u = t.vertices.last().unwrap().clone();
        let i = self.crossing_index(geo, &u);
        debug_assert!(i < geo.len());
        for (b, label) in self.legs(&geo[i], &u).iter() {
            if !member(*label) {
                continue;
            }
            t.vertices.push(b.clone());
            t.indices.push(i);
            t.legs.push(*label);
            if self.tree.distance(b, y) <= self.k {
                f(t);
            } else {
                self.extend(geo, t, member, f);
            }
            t.vertices.pop();
            t.indices.pop();
            t.legs.pop();
        }
    }
}

/// The crossing-pair system of a walk: coordinates `Γ\Ξ` and the map `ψ`.
#[derive(Clone, Debug)]
pub struct PathSystem {
    model: WalkModel,
    orbits: Vec<XiOrbit>,
    index: HashMap<Vec<u8>, usize>,
    psi: PolySystem,
}

impl PathSystem {
    /// Enumerate `Γ\Ξ` and build `ψ`.
    ///
    /// Membership is the least fixed point of "`p(a, b) > 0`, or some step
    /// `a → c` leaves `B(y)` and a crossing chain from `c` to `b` uses only
    /// members"; every restricted path decomposes into strictly shorter
    /// legs, so the fixed point is exactly `Ξ`.
    pub fn build(model: &WalkModel) -> Result<Self> {
        let tree = model.tree();
        let k = model.k();
        let mut cands: Vec<XiIndex> = Vec::new();
        let mut keys: Vec<Vec<u8>> = Vec::new();
        let mut cand_index: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut groups: Vec<(Vertex, Vertex, Vec<Vertex>)> = Vec::new();
        for y in tree.representative_centers() {
            let ball = tree.ball(&y, k);
            for a in tree.sphere(&y, k + 1) {
                for b in &ball {
                    let key = tree.orbit_key(&y, &[&a, b]);
                    if !cand_index.contains_key(&key) {
                        cand_index.insert(key.clone(), cands.len());
                        cands.push(XiIndex { y: y.clone(), a: a.clone(), b: b.clone() });
                        keys.push(key);
                    }
                }
                groups.push((y.clone(), a, ball.clone()));
            }
        }

        let table = LegTable::new(tree, k, &cand_index);
        let mut len: Vec<Option<usize>> = vec![None; cands.len()];
        loop {
            let mut changed = false;
            for (y, a, ball) in &groups {
                let mut best: HashMap<Vertex, usize> = HashMap::new();
                for b in ball {
                    if !model.step_prob(a, b).is_zero() {
                        best.insert(b.clone(), 1);
                    }
                }
                for (c, _) in model.support(a) {
                    if tree.distance(&c, y) <= k {
                        continue;
                    }
                    let geo = tree.geodesic(&c, y);
                    let snapshot = &len;
                    table.for_each_chain(&geo, &c, &|l| snapshot[l].is_some(), &mut |t| {
                        let l = 1 + t.legs.iter().map(|&i| snapshot[i].unwrap()).sum::<usize>();
                        let e = best.entry(t.vertices.last().unwrap().clone()).or_insert(l);
                        *e = (*e).min(l);
                    });
                }
                for (b, l) in best {
                    let i = cand_index[&tree.orbit_key(y, &[a, &b])];
                    if len[i].is_none_or(|old| l < old) {
                        len[i] = Some(l);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut orbits = Vec::new();
        let mut index = HashMap::new();
        for (i, xi) in cands.into_iter().enumerate() {
            if let Some(l) = len[i] {
                index.insert(keys[i].clone(), orbits.len());
                let residue = model.r(&xi.a, &xi.b);
                orbits.push(XiOrbit { rep: xi, key: keys[i].clone(), witness_len: l, residue });
            }
        }
        if orbits.is_empty() {
            return Err(Error::Model("no crossing pairs: the walk never re-enters a ball from outside".into()));
        }
        let mut sys = PathSystem { model: model.clone(), orbits, index, psi: PolySystem::new(vec![], vec![], vec![]) };
        sys.psi = sys.build_psi();
        Ok(sys)
    }

    fn table(&self) -> LegTable<'_> {
        LegTable::new(self.model.tree(), self.model.k(), &self.index)
    }

    fn build_psi(&self) -> PolySystem {
        let tree = self.model.tree();
        let k = self.model.k();
        let table = self.table();
        let mut labels = Vec::new();
        let mut constants = Vec::new();
        let mut terms = Vec::new();
        for o in &self.orbits {
            let XiIndex { y, a, b } = &o.rep;
            labels.push(self.format_xi(&o.rep));
            constants.push(self.model.step_prob(a, b));
            let mut row = Vec::new();
            for (c, _) in self.model.support(a) {
                if tree.distance(&c, y) <= k {
                    continue;
                }
                let p = self.model.step_prob(a, &c);
                let geo = tree.geodesic(&c, y);
                table.for_each_chain(&geo, &c, &|_| true, &mut |t| {
                    if t.vertices.last() == Some(b) {
                        row.push((p.clone(), t.legs.clone()));
                    }
                });
            }
            terms.push(row);
        }
        PolySystem::new(labels, constants, terms)
    }

    pub fn model(&self) -> &WalkModel {
        &self.model
    }

    pub fn orbits(&self) -> &[XiOrbit] {
        &self.orbits
    }

    pub fn dim(&self) -> usize {
        self.orbits.len()
    }

    pub fn psi(&self) -> &PolySystem {
        &self.psi
    }

    /// Residue `r(a, b)` of every coordinate.
    pub fn residues(&self) -> Vec<u64> {
        self.orbits.iter().map(|o| o.residue).collect()
    }

    pub fn format_xi(&self, xi: &XiIndex) -> String {
        let t = self.model.tree();
        format!("({},{})_{}", t.format_vertex(&xi.a), t.format_vertex(&xi.b), t.format_vertex(&xi.y))
    }

    /// Coordinate of `(a, b)_y`, or `None` if the pair is not a crossing pair.
    pub fn orbit_label(&self, xi: &XiIndex) -> Option<usize> {
        let t = self.model.tree();
        let k = self.model.k();
        if t.distance(&xi.a, &xi.y) != k + 1 || t.distance(&xi.b, &xi.y) > k {
            return None;
        }
        self.index.get(&t.orbit_key(&xi.y, &[&xi.a, &xi.b])).copied()
    }

    /// All crossing pairs `Ξ_y` at a vertex.
    pub fn xi_at(&self, y: &Vertex) -> Vec<(XiIndex, usize)> {
        let t = self.model.tree();
        let ball = t.ball(y, self.model.k());
        let mut out = Vec::new();
        for a in t.sphere(y, self.model.k() + 1) {
            for b in &ball {
                let xi = XiIndex { y: y.clone(), a: a.clone(), b: b.clone() };
                if let Some(l) = self.orbit_label(&xi) {
                    out.push((xi, l));
                }
            }
        }
        out
    }

    /// `Ξ_[x,y]`: all crossing chains along `[x, y]` starting in
    /// `B(x) ∖ B(y)`.
    pub fn xi_segment(&self, x: &Vertex, y: &Vertex) -> Result<Vec<CrossingTuple>> {
        if x == y {
            return Err(Error::Argument("crossing chains need x != y".into()));
        }
        let t = self.model.tree();
        let k = self.model.k();
        let geo = t.geodesic(x, y);
        let table = self.table();
        let mut out = Vec::new();
        for c in t.ball(x, k) {
            if t.distance(&c, y) <= k {
                continue;
            }
            table.for_each_chain(&geo, &c, &|_| true, &mut |tu| out.push(tu.clone()));
        }
        Ok(out)
    }

    /// Crossing chains from `c` to `b` along `[c, y]`.
    pub fn chains(&self, c: &Vertex, b: &Vertex, y: &Vertex) -> Vec<CrossingTuple> {
        let t = self.model.tree();
        let mut out = Vec::new();
        if t.distance(c, y) <= self.model.k() {
            return out;
        }
        let geo = t.geodesic(c, y);
        self.table().for_each_chain(&geo, c, &|_| true, &mut |tu| {
            if tu.vertices.last() == Some(b) {
                out.push(tu.clone())
            }
        });
        out
    }

    /// Every crossing chain from `c ∉ B(y)` into `B(y)` along `[c, y]`.
    pub fn chains_from(&self, c: &Vertex, y: &Vertex) -> Vec<CrossingTuple> {
        let t = self.model.tree();
        let mut out = Vec::new();
        if t.distance(c, y) <= self.model.k() {
            return out;
        }
        let geo = t.geodesic(c, y);
        self.table().for_each_chain(&geo, c, &|_| true, &mut |tu| out.push(tu.clone()));
        out
    }

    /// `J_[c,y](c, b)`: sum over crossing chains from `c` to `b` of the
    /// product of the leg coordinates of `J`.
    pub fn eval_j_segment<T: Scalar>(&self, j: &[T], c: &Vertex, b: &Vertex, y: &Vertex) -> T {
        let mut s = T::zero();
        for tu in self.chains(c, b, y) {
            let mut p = T::one();
            for &l in &tu.legs {
                p *= j[l];
            }
            s += p;
        }
        s
    }

    /// The diagonal operator `A`: coordinate `(a, b)_y` is multiplied by
    /// `ζ_d^{r(a,b)}`.
    pub fn apply_a(&self, j: &[Complex64]) -> Vec<Complex64> {
        let d = self.model.d() as f64;
        j.iter()
            .zip(&self.orbits)
            .map(|(v, o)| v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * o.residue as f64 / d))
            .collect()
    }

    /// Decompose a path starting in `B(x) ∖ B(y)` and reaching `B(y)` at its
    /// first entries into the balls along `[x, y]`. Returns `None` if the path
    /// does not meet these conditions.
    pub fn decompose_path(&self, x: &Vertex, y: &Vertex, path: &[Vertex]) -> Option<PathDecomposition> {
        let t = self.model.tree();
        let k = self.model.k();
        let start = path.first()?;
        if x == y || t.distance(start, x) > k || t.distance(start, y) <= k {
            return None;
        }
        let geo = t.geodesic(x, y);
        let entry: Vec<usize> =
            geo.iter().map(|xi| path.iter().position(|w| t.distance(w, xi) <= k)).collect::<Option<Vec<_>>>()?;
        let mut tuple = CrossingTuple { vertices: vec![start.clone()], indices: Vec::new(), legs: Vec::new() };
        let mut legs = Vec::new();
        let mut prev = 0;
        for i in 1..geo.len() {
            if entry[i - 1] < entry[i] {
                let c = path[entry[i]].clone();
                let from = tuple.vertices.last().unwrap().clone();
                let label = self.orbit_label(&XiIndex { y: geo[i].clone(), a: from, b: c.clone() })?;
                legs.push(path[prev..=entry[i]].to_vec());
                tuple.vertices.push(c);
                tuple.indices.push(i);
                tuple.legs.push(label);
                prev = entry[i];
            }
        }
        Some(PathDecomposition { tuple, legs, tail: path[prev..].to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::stock;
    use crate::numeric::rat;

    #[test]
    fn nearest_neighbour_system() {
        let m = stock("srw_free").unwrap().model;
        let s = PathSystem::build(&m).unwrap();
        // Ξ_e = {(xy, x)}: six orbits, each with witness length 1.
        assert_eq!(s.dim(), 6);
        for o in s.orbits() {
            assert_eq!(o.witness_len, 1);
            assert_eq!(m.tree().distance(&o.rep.b, &o.rep.y), 1);
            assert_eq!(s.psi().constants[s.orbit_label(&o.rep).unwrap()], rat(1, 3));
            assert_eq!(s.psi().monomials[s.orbit_label(&o.rep).unwrap()].len(), 2);
        }
    }

    #[test]
    fn mu_bounded_pair_is_crossing() {
        let m = stock("mu").unwrap().model;
        let s = PathSystem::build(&m).unwrap();
        let t = m.tree();
        let xi = XiIndex { y: t.reduce("a").unwrap(), a: t.reduce("ca").unwrap(), b: Vertex::root() };
        let l = s.orbit_label(&xi).expect("(ca, e)_a is a crossing pair");
        assert_eq!(s.psi().constants[l], rat(1, 3));
        assert!(s.psi().monomials[l].is_empty());
    }

    #[test]
    fn crossing_indices_follow_max_rule() {
        let m = stock("mu").unwrap().model;
        let s = PathSystem::build(&m).unwrap();
        let t = m.tree();
        let x = t.reduce("bab").unwrap();
        let y = Vertex::root();
        let geo = t.geodesic(&x, &y);
        let segs = s.xi_segment(&x, &y).unwrap();
        assert!(!segs.is_empty());
        for tu in segs {
            for (s_, &i) in tu.indices.iter().enumerate() {
                let max = (0..geo.len()).filter(|&j| t.distance(&tu.vertices[s_], &geo[j]) <= m.k()).max().unwrap();
                assert_eq!(i, max + 1);
            }
        }
    }
}
