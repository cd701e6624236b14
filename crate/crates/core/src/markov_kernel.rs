//! Finite-range invariant step kernels, irreducibility, period and the exact
//! dynamic-programming oracle for n-step probabilities.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, RwLock};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{model_err, Error, Result};
use crate::tree_model::{Tree, Vertex};

/// Step law of the walk.
#[derive(Clone, Debug)]
pub enum StepDistribution {
    /// `p(x, y) = μ(x⁻¹y)` on a free-product tree.
    Words(Vec<(Vertex, BigRational)>),
    /// Per source color, the probability of a target keyed by the colors
    /// along the geodesic from source to target (source color first).
    Colored(Vec<BTreeMap<Vec<u8>, BigRational>>),
}

#[derive(Clone, Debug)]
struct StepEntry {
    prob: BigRational,
    weight: BigInt,
}

/// Period `d` and the periodicity cocycle, stored as one increment per
/// oriented edge type.
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub d: u64,
    tau: Vec<i64>,
}

/// Outcome of the bounded irreducibility search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible { witness: Vertex },
    Unknown { reason: String },
}

/// Test hooks that deliberately corrupt derived data.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub residue_shift: i64,
}

/// Support of a colored-tree vertex as moves relative to it: climb `up`
/// levels, then descend along `slots`; `entry` is the step index.
#[derive(Clone, Debug)]
struct Move {
    up: usize,
    slots: Vec<u8>,
    entry: usize,
}

/// Memo of colored-tree supports, keyed by the colors of the last `k + 2`
/// vertices of the root path (fewer near the root), which determine the
/// radius-`k` ball up to relabelling.
#[derive(Default)]
struct MoveCache(RwLock<HashMap<Vec<usize>, Arc<Vec<Move>>>>);

impl Clone for MoveCache {
    fn clone(&self) -> Self {
        MoveCache::default()
    }
}

impl std::fmt::Debug for MoveCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MoveCache")
    }
}

/// Tree, step law, range and derived period data.
#[derive(Clone, Debug)]
pub struct WalkModel {
    tree: Tree,
    steps: StepDistribution,
    entries: Vec<StepEntry>,
    /// Free product: entry index per word. Colored: entry index per (color, key).
    colored_index: Vec<HashMap<Vec<u8>, usize>>,
    k: usize,
    denom: BigInt,
    period: PeriodData,
    overrides: Overrides,
    moves: MoveCache,
}

impl WalkModel {
    pub fn new(tree: Tree, steps: StepDistribution) -> Result<Self> {
        let mut entries = Vec::new();
        let mut colored_index = Vec::new();
        let mut k = 0usize;
        match (&tree, &steps) {
            (Tree::FreeProduct(f), StepDistribution::Words(ws)) => {
                let mut total = BigRational::zero();
                let mut seen = HashSet::new();
                for (w, p) in ws {
                    let red = f.reduce_letters(w.path());
                    if &red != w {
                        return model_err(format!("step word {} is not reduced", f.format_word(w)));
                    }
                    if !seen.insert(w.clone()) {
                        return model_err(format!("duplicate step word {}", f.format_word(w)));
                    }
                    check_prob(p)?;
                    total += p;
                    k = k.max(w.depth());
                    entries.push(StepEntry { prob: p.clone(), weight: BigInt::zero() });
                }
                if !total.is_one() {
                    return model_err(format!("step probabilities sum to {total}, not 1"));
                }
            }
            (Tree::Colored(c), StepDistribution::Colored(tables)) => {
                if tables.len() != c.color_count() {
                    return model_err("one step table per color is required");
                }
                let centers = tree.representative_centers();
                for (col, table) in tables.iter().enumerate() {
                    let center = centers.iter().find(|v| tree.color(v) == col).unwrap();
                    let reach = table.keys().map(|key| key.len().saturating_sub(1)).max().unwrap_or(0);
                    let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
                    for w in tree.ball(center, reach) {
                        *counts.entry(tree.color_key(center, &w)).or_default() += 1;
                    }
                    let mut total = BigRational::zero();
                    let mut index = HashMap::new();
                    for (key, p) in table {
                        check_prob(p)?;
                        if key.first() != Some(&(col as u8)) {
                            return model_err(format!(
                                "step key for color {} must start with that color",
                                c.color_name(col)
                            ));
                        }
                        let n = *counts.get(key).unwrap_or(&0);
                        if n == 0 {
                            let names: Vec<&str> = key.iter().map(|&i| c.color_name(i as usize)).collect();
                            return model_err(format!("step key {names:?} does not describe a geodesic"));
                        }
                        total += p * BigRational::from_integer(BigInt::from(n));
                        k = k.max(key.len() - 1);
                        index.insert(key.clone(), entries.len());
                        entries.push(StepEntry { prob: p.clone(), weight: BigInt::zero() });
                    }
                    if !total.is_one() {
                        return model_err(format!("outgoing mass from color {} is {total}, not 1", c.color_name(col)));
                    }
                    colored_index.push(index);
                }
            }
            _ => return model_err("step distribution does not match tree family"),
        }
        if k == 0 {
            return model_err("walk never moves");
        }
        let denom = entries.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.prob.denom()));
        for e in &mut entries {
            e.weight = (&e.prob * BigRational::from_integer(denom.clone())).to_integer();
        }
        let mut model = WalkModel {
            tree,
            steps,
            entries,
            colored_index,
            k,
            denom,
            period: PeriodData { d: 1, tau: Vec::new() },
            overrides: Overrides::default(),
            moves: MoveCache::default(),
        };
        model.period = model.compute_period()?;
        Ok(model)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn steps(&self) -> &StepDistribution {
        &self.steps
    }

    /// Range: the largest step distance.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn period(&self) -> &PeriodData {
        &self.period
    }

    pub fn d(&self) -> u64 {
        self.period.d
    }

    pub fn base(&self) -> Vertex {
        self.tree.base()
    }

    pub fn set_overrides(&mut self, o: Overrides) {
        self.overrides = o;
    }

    /// Common denominator of all step probabilities.
    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    /// Targets `y` with `p(x, y) > 0`, paired with a step index.
    pub fn support(&self, x: &Vertex) -> Vec<(Vertex, usize)> {
        match (&self.tree, &self.steps) {
            (Tree::FreeProduct(f), StepDistribution::Words(ws)) => {
                ws.iter().enumerate().map(|(i, (w, _))| (f.mul(x, w), i)).collect()
            }
            (Tree::Colored(c), _) => {
                let cols = c.path_colors(x);
                let key = cols[cols.len().saturating_sub(self.k + 2)..].to_vec();
                let cached = self.moves.0.read().expect("move cache poisoned").get(&key).cloned();
                let moves = match cached {
                    Some(m) => m,
                    None => {
                        let m = Arc::new(self.support_moves(x));
                        self.moves.0.write().expect("move cache poisoned").insert(key, m.clone());
                        m
                    }
                };
                let base = x.path();
                moves
                    .iter()
                    .map(|m| {
                        let mut p = base[..base.len() - m.up].to_vec();
                        p.extend_from_slice(&m.slots);
                        (Vertex::from_path(p), m.entry)
                    })
                    .collect()
            }
            _ => unreachable!("free-product trees carry word steps"),
        }
    }

    /// Colored-tree support of `x` by scanning its ball, as relative moves.
    fn support_moves(&self, x: &Vertex) -> Vec<Move> {
        let col = self.tree.color(x);
        let index = &self.colored_index[col];
        self.tree
            .ball(x, self.k)
            .into_iter()
            .filter_map(|w| {
                let &entry = index.get(&self.tree.color_key(x, &w))?;
                let l = x.path().iter().zip(w.path()).take_while(|(a, b)| a == b).count();
                Some(Move { up: x.depth() - l, slots: w.path()[l..].to_vec(), entry })
            })
            .collect()
    }

    pub fn step_prob_by_index(&self, i: usize) -> &BigRational {
        &self.entries[i].prob
    }

    pub fn step_weight(&self, i: usize) -> &BigInt {
        &self.entries[i].weight
    }

    /// Exact one-step probability `p(x, y)`.
    pub fn step_prob(&self, x: &Vertex, y: &Vertex) -> BigRational {
        if self.tree.distance(x, y) > self.k {
            return BigRational::zero();
        }
        match (&self.tree, &self.steps) {
            (Tree::FreeProduct(f), StepDistribution::Words(ws)) => {
                let g = f.mul(&f.inverse(x), y);
                ws.iter().find(|(w, _)| *w == g).map(|(_, p)| p.clone()).unwrap_or_else(BigRational::zero)
            }
            _ => {
                let col = self.tree.color(x);
                self.colored_index[col]
                    .get(&self.tree.color_key(x, y))
                    .map(|&i| self.entries[i].prob.clone())
                    .unwrap_or_else(BigRational::zero)
            }
        }
    }

    pub fn step_prob_f64(&self, x: &Vertex, y: &Vertex) -> f64 {
        self.step_prob(x, y).to_f64().unwrap_or(0.0)
    }

    /// Sources `w` with `p(w, y) > 0`.
    pub fn predecessors(&self, y: &Vertex) -> Vec<Vertex> {
        self.tree.ball(y, self.k).into_iter().filter(|w| !self.step_prob(w, y).is_zero()).collect()
    }

    /// Bounded search for irreducibility: from every vertex type, the walk must
    /// reach and return from every vertex of `ball(·, 2k)` within `horizon`
    /// steps. An exhausted finite reachable set is a conclusive counterexample.
    pub fn check_irreducible(&self, horizon: usize) -> Irreducibility {
        let explore = 4 * self.k;
        for c in self.tree.representative_centers() {
            let targets = self.tree.ball(&c, 2 * self.k);
            for forward in [true, false] {
                let (seen, exhausted) = self.bounded_bfs(&c, horizon, explore, forward);
                if let Some(miss) = targets.iter().find(|t| !seen.contains(*t)) {
                    if exhausted {
                        return Irreducibility::Reducible { witness: miss.clone() };
                    }
                    return Irreducibility::Unknown {
                        reason: format!(
                            "vertex {} not {} within horizon {horizon}",
                            self.tree.format_vertex(miss),
                            if forward { "reached" } else { "returning" }
                        ),
                    };
                }
            }
        }
        Irreducibility::Irreducible
    }

    fn bounded_bfs(&self, c: &Vertex, horizon: usize, radius: usize, forward: bool) -> (HashSet<Vertex>, bool) {
        let mut seen = HashSet::new();
        seen.insert(c.clone());
        let mut frontier = vec![c.clone()];
        let mut clipped = false;
        for _ in 0..horizon {
            let mut next = Vec::new();
            for v in &frontier {
                let nbrs: Vec<Vertex> =
                    if forward { self.support(v).into_iter().map(|(w, _)| w).collect() } else { self.predecessors(v) };
                for w in nbrs {
                    if self.tree.distance(c, &w) > radius {
                        clipped = true;
                        continue;
                    }
                    if seen.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return (seen, !clipped);
            }
            frontier = next;
        }
        (seen, false)
    }

    // ---- period -------------------------------------------------------

    /// Unknown index and orientation sign of the tree edge `parent → child`.
    fn edge_unknown(&self, parent: &Vertex, child: &Vertex) -> (usize, i64) {
        match &self.tree {
            Tree::FreeProduct(f) => {
                let l = *child.path().last().unwrap();
                let inv = f.inverse_letter(l);
                if inv >= l {
                    (l as usize, 1)
                } else {
                    (inv as usize, -1)
                }
            }
            Tree::Colored(c) => {
                let n = c.color_count();
                let (a, b) = (self.tree.color(parent), self.tree.color(child));
                if a <= b {
                    (a * n + b, 1)
                } else {
                    (b * n + a, -1)
                }
            }
        }
    }

    fn unknown_count(&self) -> usize {
        match &self.tree {
            Tree::FreeProduct(f) => f.letter_count(),
            Tree::Colored(c) => c.color_count() * c.color_count(),
        }
    }

    /// Signed edge-type counts along the geodesic `x → y`.
    fn edge_vector(&self, x: &Vertex, y: &Vertex) -> Vec<i64> {
        let mut v = vec![0i64; self.unknown_count()];
        let geo = self.tree.geodesic(x, y);
        for w in geo.windows(2) {
            let (from, to) = (&w[0], &w[1]);
            if to.depth() > from.depth() {
                let (i, s) = self.edge_unknown(from, to);
                v[i] += s;
            } else {
                let (i, s) = self.edge_unknown(to, from);
                v[i] -= s;
            }
        }
        v
    }

    /// Period `d` and an additive cocycle, as the largest modulus for which the
    /// linear system "every support step increments the level by one" is
    /// solvable over Γ-invariant edge increments.
    fn compute_period(&self) -> Result<PeriodData> {
        let t = self.unknown_count();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let mut rhs: Vec<i64> = Vec::new();
        // Involutive edge types: the two orientations coincide, so 2τ = 0.
        match &self.tree {
            Tree::FreeProduct(f) => {
                for l in 0..f.letter_count() as u8 {
                    if f.inverse_letter(l) == l {
                        let mut r = vec![0; t];
                        r[l as usize] = 2;
                        rows.push(r);
                        rhs.push(0);
                    }
                }
            }
            Tree::Colored(c) => {
                let n = c.color_count();
                for a in 0..n {
                    let mut r = vec![0; t];
                    r[a * n + a] = 2;
                    rows.push(r);
                    rhs.push(0);
                }
            }
        }
        let mut seen = HashSet::new();
        for c in self.tree.representative_centers() {
            for (w, _) in self.support(&c) {
                let r = self.edge_vector(&c, &w);
                if seen.insert(r.clone()) {
                    rows.push(r);
                    rhs.push(1);
                }
            }
        }
        let (d, tau) = max_modulus(rows, rhs)?;
        Ok(PeriodData { d, tau })
    }

    /// Level `r₀(v) ∈ Z/dZ` relative to the base vertex.
    pub fn r0(&self, v: &Vertex) -> u64 {
        let d = self.period.d as i64;
        let mut s = 0i64;
        let mut cur = Vertex::root();
        for &l in v.path() {
            let mut p = cur.path().to_vec();
            p.push(l);
            let next = Vertex::from_path(p);
            let (i, sign) = self.edge_unknown(&cur, &next);
            s += sign * self.period.tau[i];
            cur = next;
        }
        s.rem_euclid(d) as u64
    }

    /// Periodicity cocycle `r(x, y) = r₀(y) − r₀(x)` (mod `d`).
    pub fn r(&self, x: &Vertex, y: &Vertex) -> u64 {
        let d = self.period.d as i64;
        (self.r0(y) as i64 - self.r0(x) as i64 + self.overrides.residue_shift).rem_euclid(d) as u64
    }

    // ---- oracle -------------------------------------------------------

    /// Exact `p^(n)(x, y)`.
    pub fn oracle_pn(&self, x: &Vertex, y: &Vertex, n: usize, budget: usize) -> Result<BigRational> {
        Ok(self.oracle_series(x, y, n, budget)?.pop().unwrap())
    }

    /// Exact `p^(t)(x, y)` for `t = 0..=nmax`.
    ///
    /// States are lumped by their orbit under the stabilizer of `y` (the
    /// class of `w` is `orbit_key(y, [w])`); the lumping is exact because the
    /// stabilizer preserves both the kernel and the target.
    pub fn oracle_series(&self, x: &Vertex, y: &Vertex, nmax: usize, budget: usize) -> Result<Vec<BigRational>> {
        self.lumped_series(x, y, nmax, budget, false)
    }

    /// Exact first-passage probabilities `P_x(τ_y = t)` for `t = 0..=nmax`
    /// (`1` at `t = 0` when `x = y`), lumped like [`Self::oracle_series`].
    pub fn oracle_first_passage_series(
        &self,
        x: &Vertex,
        y: &Vertex,
        nmax: usize,
        budget: usize,
    ) -> Result<Vec<BigRational>> {
        self.lumped_series(x, y, nmax, budget, true)
    }

    fn lumped_series(
        &self,
        x: &Vertex,
        y: &Vertex,
        nmax: usize,
        budget: usize,
        absorb: bool,
    ) -> Result<Vec<BigRational>> {
        let key_of = |w: &Vertex| self.tree.orbit_key(y, &[w]);
        let target = key_of(y);
        let mut states: HashMap<Vec<u8>, (Vertex, BigInt)> = HashMap::new();
        states.insert(key_of(x), (x.clone(), BigInt::one()));
        let mut out = Vec::with_capacity(nmax + 1);
        let mut den = BigInt::one();
        for t in 0..=nmax {
            let mass = if absorb && t > 0 {
                states.remove(&target).map(|(_, m)| m).unwrap_or_default()
            } else {
                states.get(&target).map(|(_, m)| m.clone()).unwrap_or_default()
            };
            out.push(BigRational::new(mass, den.clone()));
            if absorb && t == 0 && x == y {
                break;
            }
            if t == nmax {
                break;
            }
            let remaining = nmax - t - 1;
            let mut next: HashMap<Vec<u8>, (Vertex, BigInt)> = HashMap::new();
            for (rep, m) in states.values() {
                for (w, i) in self.support(rep) {
                    if self.tree.distance(&w, y) > self.k * remaining {
                        continue;
                    }
                    let add = m * &self.entries[i].weight;
                    match next.entry(key_of(&w)) {
                        std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().1 += add,
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert((w, add));
                        }
                    }
                }
            }
            if next.len() > budget {
                return Err(Error::Budget(format!("oracle state count {} exceeds {budget}", next.len())));
            }
            states = next;
            den *= &self.denom;
        }
        out.resize(nmax + 1, BigRational::zero());
        Ok(out)
    }

    /// Exact `p^(t)(a, b; Ω)` for `t = 0..=nmax`: every intermediate vertex
    /// must satisfy `omega`.
    pub fn oracle_restricted_series(
        &self,
        a: &Vertex,
        b: &Vertex,
        omega: &dyn Fn(&Vertex) -> bool,
        nmax: usize,
        budget: usize,
    ) -> Result<Vec<BigRational>> {
        Ok(self.oracle_restricted_multi(a, std::slice::from_ref(b), omega, nmax, budget)?.pop().unwrap())
    }

    /// [`Self::oracle_restricted_series`] for several endpoints sharing one
    /// dynamic programme; endpoints must lie outside `omega`.
    pub fn oracle_restricted_multi(
        &self,
        a: &Vertex,
        targets: &[Vertex],
        omega: &dyn Fn(&Vertex) -> bool,
        nmax: usize,
        budget: usize,
    ) -> Result<Vec<Vec<BigRational>>> {
        // Path weights at step t are bounded by denom^t, so machine
        // integers are exact whenever denom^nmax fits.
        if self.denom.pow(nmax as u32).bits() < 127 {
            let w: Vec<u128> = self.entries.iter().map(|e| e.weight.to_u128().expect("positive weight")).collect();
            self.restricted_dp(a, targets, omega, nmax, budget, &w)
        } else {
            let w: Vec<BigInt> = self.entries.iter().map(|e| e.weight.clone()).collect();
            self.restricted_dp(a, targets, omega, nmax, budget, &w)
        }
    }

    fn restricted_dp<W>(
        &self,
        a: &Vertex,
        targets: &[Vertex],
        omega: &dyn Fn(&Vertex) -> bool,
        nmax: usize,
        budget: usize,
        weight: &[W],
    ) -> Result<Vec<Vec<BigRational>>>
    where
        W: Clone + Zero + One + Into<BigInt> + for<'x> std::ops::AddAssign<&'x W>,
        for<'x> &'x W: std::ops::Mul<&'x W, Output = W>,
    {
        let slot: HashMap<&Vertex, usize> = targets.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut out = vec![vec![BigRational::zero(); nmax + 1]; targets.len()];
        let Some(anchor) = targets.first() else {
            return Ok(out);
        };
        // A state farther than `k·remaining + spread` from the anchor is
        // farther than `k·remaining` from every target and cannot hit one.
        let spread = targets.iter().map(|b| self.tree.distance(anchor, b)).max().unwrap_or(0);
        if let Some(&i) = slot.get(a) {
            out[i][0] = BigRational::one();
        }
        let mut states: HashMap<Vertex, W> = HashMap::new();
        states.insert(a.clone(), W::one());
        let mut den = BigInt::one();
        for t in 1..=nmax {
            den *= &self.denom;
            let remaining = nmax - t;
            let mut hits = vec![W::zero(); targets.len()];
            let mut next: HashMap<Vertex, W> = HashMap::new();
            for (v, m) in &states {
                for (w, i) in self.support(v) {
                    let add = m * &weight[i];
                    if let Some(&j) = slot.get(&w) {
                        hits[j] += &add;
                    }
                    if remaining > 0 && omega(&w) && self.tree.distance(&w, anchor) <= self.k * remaining + spread {
                        *next.entry(w).or_insert_with(W::zero) += &add;
                    }
                }
            }
            for (o, h) in out.iter_mut().zip(hits) {
                o[t] = BigRational::new(h.into(), den.clone());
            }
            if next.len() > budget {
                return Err(Error::Budget(format!("oracle state count {} exceeds {budget}", next.len())));
            }
            states = next;
        }
        Ok(out)
    }

    /// Vertices reachable from `x` in exactly `t` steps, `t = 0, 1, …` up to
    /// `nmax` or until a set would exceed `budget` vertices (the returned
    /// list is then shorter). Transition weights are positive, so this is
    /// the support of `p^(t)(x, ·)`.
    pub fn oracle_support(&self, x: &Vertex, nmax: usize, budget: usize) -> Vec<Vec<Vertex>> {
        let mut out = vec![vec![x.clone()]];
        for _ in 0..nmax {
            let mut next: HashSet<Vertex> = HashSet::new();
            for v in out.last().unwrap() {
                for (w, _) in self.support(v) {
                    next.insert(w);
                }
                if next.len() > budget {
                    return out;
                }
            }
            let mut next: Vec<Vertex> = next.into_iter().collect();
            next.sort();
            out.push(next);
        }
        out
    }

    /// Every path of length `n` starting at `x`, with its probability, by
    /// exhaustive enumeration (independent of the dynamic programme).
    pub fn enumerate_paths(&self, x: &Vertex, n: usize) -> Vec<(Vec<Vertex>, BigRational)> {
        let mut out = Vec::new();
        let mut stack = vec![(vec![x.clone()], BigRational::one())];
        while let Some((path, p)) = stack.pop() {
            if path.len() == n + 1 {
                out.push((path, p));
                continue;
            }
            for (w, i) in self.support(path.last().unwrap()) {
                let mut q = path.clone();
                q.push(w);
                stack.push((q, &p * &self.entries[i].prob));
            }
        }
        out
    }
}

fn check_prob(p: &BigRational) -> Result<()> {
    if !p.is_positive() || p > &BigRational::one() {
        return model_err(format!("probability {p} outside (0, 1]"));
    }
    Ok(())
}

/// Largest `m` for which `A τ ≡ b (mod m)` is solvable, with a solution.
///
/// `A` is diagonalised over the integers (row and column operations); the
/// system splits into scalar congruences `dᵢ yᵢ ≡ b'ᵢ`.
pub(crate) fn max_modulus(mut a: Vec<Vec<i64>>, mut b: Vec<i64>) -> Result<(u64, Vec<i64>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut q: Vec<Vec<i64>> = (0..cols).map(|i| (0..cols).map(|j| i64::from(i == j)).collect()).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        // Pivot: smallest nonzero magnitude in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in rank..rows {
            for j in rank..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(rank, pi);
        b.swap(rank, pi);
        for r in a.iter_mut() {
            r.swap(rank, pj);
        }
        for r in q.iter_mut() {
            r.swap(rank, pj);
        }
        let p = a[rank][rank];
        let mut clean = true;
        for i in rank + 1..rows {
            let f = a[i][rank].div_euclid(p);
            if f != 0 {
                for j in 0..cols {
                    a[i][j] -= f * a[rank][j];
                }
                b[i] -= f * b[rank];
            }
            if a[i][rank] != 0 {
                clean = false;
            }
        }
        for j in rank + 1..cols {
            let f = a[rank][j].div_euclid(p);
            if f != 0 {
                for i in 0..rows {
                    a[i][j] -= f * a[i][rank];
                }
                for r in q.iter_mut() {
                    r[j] -= f * r[rank];
                }
            }
            if a[rank][j] != 0 {
                clean = false;
            }
        }
        if clean {
            rank += 1;
        }
    }
    let g0 = b[rank..].iter().fold(0i64, |g, &x| g.gcd(&x));
    if g0 == 0 {
        return Err(Error::Model("level increments admit no finite period; walk is not irreducible".into()));
    }
    let diag: Vec<i64> = (0..rank).map(|i| a[i][i]).collect();
    let ok = |m: i64| diag.iter().zip(&b).all(|(&di, &bi)| bi.rem_euclid(di.gcd(&m)) == 0);
    let d = (1..=g0.abs()).rev().find(|&m| g0 % m == 0 && ok(m)).unwrap_or(1);
    let mut y = vec![0i64; cols];
    for i in 0..rank {
        let g = diag[i].gcd(&d);
        let md = d / g;
        let di = (diag[i] / g).rem_euclid(md.max(1));
        let bi = (b[i] / g).rem_euclid(md.max(1));
        y[i] = if md == 1 { 0 } else { (bi * mod_inverse(di, md)).rem_euclid(md) };
    }
    let tau: Vec<i64> = (0..cols).map(|i| (0..cols).map(|j| q[i][j] * y[j]).sum::<i64>().rem_euclid(d)).collect();
    Ok((d as u64, tau))
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = a.extended_gcd(&m);
    e.x.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::stock;
    use crate::numeric::rat;

    #[test]
    fn step_probabilities() {
        let m = stock("srw_free").unwrap().model;
        let t = m.tree();
        let e = Vertex::root();
        let a = t.reduce("a").unwrap();
        assert_eq!(m.step_prob(&e, &a), rat(1, 3));
        assert_eq!(m.step_prob(&e, &t.reduce("ab").unwrap()), rat(0, 1));
        let mu = stock("mu").unwrap().model;
        let t = mu.tree();
        assert_eq!(mu.step_prob(&t.reduce("ca").unwrap(), &e), rat(1, 3));
    }

    #[test]
    fn periods() {
        for (name, d) in [
            ("srw_free", 2),
            ("srw_colored", 2),
            ("srw_loop", 1),
            ("mu", 2),
            ("nu", 2),
            ("green_poly", 1),
            ("biregular", 2),
        ] {
            assert_eq!(stock(name).unwrap().model.d(), d, "{name}");
        }
    }

    #[test]
    fn cocycle_is_parity_for_nearest_neighbour() {
        let m = stock("srw_free").unwrap().model;
        let t = m.tree();
        let ball = t.ball(&Vertex::root(), 4);
        for x in &ball {
            for y in &ball {
                assert_eq!(m.r(x, y), (t.distance(x, y) % 2) as u64);
            }
        }
    }

    #[test]
    fn cocycle_increments_along_steps() {
        for name in ["mu", "nu", "green_poly", "biregular"] {
            let m = stock(name).unwrap().model;
            let d = m.d();
            for x in m.tree().ball(&m.base(), 2) {
                for (y, _) in m.support(&x) {
                    assert_eq!(m.r(&x, &y), 1 % d, "{name}");
                }
            }
        }
    }

    #[test]
    fn irreducibility() {
        let m = stock("srw_free").unwrap().model;
        assert_eq!(m.check_irreducible(10), Irreducibility::Irreducible);
        let nu = stock("nu").unwrap().model;
        assert_eq!(nu.check_irreducible(20), Irreducibility::Irreducible);
        let t = m.tree().clone();
        let only_a =
            WalkModel::new(t.clone(), StepDistribution::Words(vec![(t.reduce("a").unwrap(), rat(1, 1))])).unwrap();
        assert!(matches!(only_a.check_irreducible(10), Irreducibility::Reducible { .. }));
    }

    #[test]
    fn oracle_small_values() {
        let m = stock("srw_free").unwrap().model;
        let e = Vertex::root();
        let s = m.oracle_series(&e, &e, 5, 1000).unwrap();
        assert_eq!(s[2], rat(1, 3));
        assert_eq!(s[4], rat(5, 27));
        assert!(s[1].is_zero() && s[3].is_zero() && s[5].is_zero());
        // Independent check by path enumeration.
        let total: BigRational = m.enumerate_paths(&e, 4).into_iter().filter(|(p, _)| p[4] == e).map(|(_, q)| q).sum();
        assert_eq!(total, rat(5, 27));
    }

    #[test]
    fn restricted_oracle_examples() {
        let m = stock("srw_free").unwrap().model;
        let t = m.tree();
        let e = Vertex::root();
        let ab = t.reduce("ab").unwrap();
        let a = t.reduce("a").unwrap();
        let outside = |w: &Vertex| t.distance(w, &e) > 1;
        let s = m.oracle_restricted_series(&ab, &a, &outside, 3, 1000).unwrap();
        assert!(s[0].is_zero());
        assert_eq!(s[1], rat(1, 3));
        let same = m.oracle_restricted_series(&a, &a, &outside, 0, 1000).unwrap();
        assert_eq!(same[0], rat(1, 1));

        let mu = stock("mu").unwrap().model;
        let t = mu.tree();
        let y = t.reduce("a").unwrap();
        let ca = t.reduce("ca").unwrap();
        let out2 = |w: &Vertex| t.distance(w, &y) > 2;
        let s = mu.oracle_restricted_series(&ca, &e, &out2, 12, 100_000).unwrap();
        assert_eq!(s[1], rat(1, 3));
        assert!(s.iter().skip(2).all(|c| c.is_zero()));
    }

    #[test]
    fn lumped_oracle_matches_plain_free_product() {
        let col = stock("srw_colored").unwrap().model;
        let free = stock("srw_free").unwrap().model;
        let e = Vertex::root();
        let a = col.oracle_series(&e, &e, 16, 1000).unwrap();
        let b = free.oracle_series(&e, &e, 16, 100_000).unwrap();
        assert_eq!(a, b);
    }
}
