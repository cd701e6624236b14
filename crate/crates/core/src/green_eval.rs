//! First-passage and Green functions reconstructed from the crossing-pair
//! coordinates `v_z`, plus the rational restricted functions of pairs whose
//! excursions stay bounded.
//!
//! For a target `y`, the first-passage vector `w = F_z(·, y)` on
//! `B(y) ∖ {y}` solves `(I − z·M_J) w = z·r_J` with `J = v_z`, where
//!
//! * `M_J(c, d) = p(c, d) + Σ_{c₁ ∉ B(y)} p(c, c₁)·J_{[c₁,y]}(c₁, d)` and
//! * `r_J(c)   = p(c, y) + Σ_{c₁ ∉ B(y)} p(c, c₁)·J_{[c₁,y]}(c₁, y)`,
//!
//! and `J_{[c,y]}(c, b)` sums the products of leg coordinates over crossing
//! chains from `c` to `b` along `[c, y]`. Farther sources reduce to `B(y)`
//! the same way, and `G_z(x, y) = F_z(x, y)·G_z(y, y)` with
//! `G_z(y, y) = (1 − Σ_w z·p(y, w)·F_z(w, y))⁻¹`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::markov_kernel::WalkModel;
use crate::numeric::{charpoly, rat_to_f64, ser_inv, ser_mul, solve, Coeff, RatPoly, Scalar};
use crate::path_system::{PathSystem, XiClass, XiIndex};
use crate::tree_model::Vertex;

/// Which generating function a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Full,
    FirstPassage,
    Restricted,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Full => "full",
            Channel::FirstPassage => "first_passage",
            Channel::Restricted => "restricted",
        }
    }
}

/// One evaluated generating function.
#[derive(Clone, Debug)]
pub struct GreenValue {
    pub z: Complex64,
    pub x: Vertex,
    pub y: Vertex,
    pub value: Complex64,
    pub channel: Channel,
}

/// Polynomial in the coordinates: `Σ coeff·Π J[vars]`.
#[derive(Clone, Debug, Default)]
struct JPoly(BTreeMap<Vec<usize>, BigRational>);

impl JPoly {
    fn add(&mut self, coeff: BigRational, mut vars: Vec<usize>) {
        vars.sort_unstable();
        let e = self.0.entry(vars).or_insert_with(BigRational::zero);
        *e += coeff;
    }

    fn eval<T: Scalar>(&self, j: &[T]) -> T {
        let mut s = T::zero();
        for (vars, c) in &self.0 {
            let mut p = T::lift(rat_to_f64(c));
            for &v in vars {
                p *= j[v];
            }
            s += p;
        }
        s
    }

    fn series<C: Coeff>(&self, v: &[Vec<C>], n: usize) -> Vec<C> {
        let mut out = vec![C::zero(); n];
        for (vars, c) in &self.0 {
            let mut p = vec![C::zero(); n];
            p[0] = C::from_rational(c);
            for &x in vars {
                p = ser_mul(&p, &v[x], n);
            }
            for (o, q) in out.iter_mut().zip(p) {
                *o = o.clone() + q;
            }
        }
        out
    }
}

/// The linear first-passage system for one target `y`.
#[derive(Clone, Debug)]
pub struct GreenSystem<'a> {
    sys: &'a PathSystem,
    y: Vertex,
    inner: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    matrix: Vec<(usize, usize, JPoly)>,
    rhs: Vec<JPoly>,
    /// `(w, p(y, w))` with `w ∈ B(y)`; `None` marks `w = y`.
    from_y: Vec<(Option<usize>, BigRational)>,
}

/// Linear form `Σ_b J-poly(b)·F(b, y)` over `B(y)` reducing a far source.
#[derive(Clone, Debug)]
struct FarForm {
    terms: Vec<(Option<usize>, JPoly)>,
}

impl<'a> GreenSystem<'a> {
    pub fn new(sys: &'a PathSystem, y: &Vertex) -> Self {
        let model = sys.model();
        let t = model.tree();
        let k = model.k();
        let inner: Vec<Vertex> = t.ball(y, k).into_iter().filter(|c| c != y).collect();
        let index: HashMap<Vertex, usize> = inner.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut entries: BTreeMap<(usize, usize), JPoly> = BTreeMap::new();
        let mut rhs = vec![JPoly::default(); inner.len()];
        for (ci, c) in inner.iter().enumerate() {
            for (w, si) in model.support(c) {
                let p = model.step_prob_by_index(si).clone();
                if &w == y {
                    rhs[ci].add(p, Vec::new());
                } else if let Some(&wi) = index.get(&w) {
                    entries.entry((ci, wi)).or_default().add(p, Vec::new());
                } else {
                    for tu in sys.chains_from(&w, y) {
                        let end = tu.vertices.last().unwrap();
                        match index.get(end) {
                            Some(&bi) => entries.entry((ci, bi)).or_default().add(p.clone(), tu.legs.clone()),
                            None => rhs[ci].add(p.clone(), tu.legs.clone()),
                        }
                    }
                }
            }
        }
        let from_y = model
            .support(y)
            .into_iter()
            .map(|(w, si)| (index.get(&w).copied(), model.step_prob_by_index(si).clone()))
            .collect();
        GreenSystem {
            sys,
            y: y.clone(),
            inner,
            index,
            matrix: entries.into_iter().map(|((i, j), p)| (i, j, p)).collect(),
            rhs,
            from_y,
        }
    }

    pub fn target(&self) -> &Vertex {
        &self.y
    }

    /// `B(y) ∖ {y}` in the order used by the vector methods.
    pub fn inner(&self) -> &[Vertex] {
        &self.inner
    }

    fn far_form(&self, x: &Vertex) -> FarForm {
        let mut by_end: BTreeMap<Option<usize>, JPoly> = BTreeMap::new();
        for tu in self.sys.chains_from(x, &self.y) {
            let end = tu.vertices.last().unwrap();
            by_end.entry(self.index.get(end).copied()).or_default().add(BigRational::one(), tu.legs.clone());
        }
        FarForm { terms: by_end.into_iter().collect() }
    }

    /// `F_z(·, y)` on `B(y) ∖ {y}` given `v = v_z`.
    pub fn first_passage_vec<T: Scalar>(&self, z: T, v: &[T]) -> Result<Vec<T>> {
        let n = self.inner.len();
        let mut a = DMatrix::<T>::identity(n, n);
        for (i, j, p) in &self.matrix {
            a[(*i, *j)] -= z * p.eval(v);
        }
        let b = DVector::from_iterator(n, self.rhs.iter().map(|p| z * p.eval(v)));
        let w = solve(&a, &b)
            .ok_or_else(|| Error::Numeric(format!("first-passage system singular at z = {}", z.to_complex())))?;
        Ok(w.iter().copied().collect())
    }

    fn reduce<T: Scalar>(&self, x: &Vertex, v: &[T], w: &[T]) -> T {
        if x == &self.y {
            return T::one();
        }
        if let Some(&i) = self.index.get(x) {
            return w[i];
        }
        let mut s = T::zero();
        for (end, poly) in &self.far_form(x).terms {
            s += poly.eval(v) * end.map_or(T::one(), |i| w[i]);
        }
        s
    }

    /// `F_z(x, y)`.
    pub fn first_passage<T: Scalar>(&self, x: &Vertex, z: T, v: &[T]) -> Result<T> {
        let w = self.first_passage_vec(z, v)?;
        Ok(self.reduce(x, v, &w))
    }

    fn diagonal_from<T: Scalar>(&self, z: T, w: &[T]) -> Result<T> {
        let mut s = T::zero();
        for (i, p) in &self.from_y {
            s += T::lift(rat_to_f64(p)) * i.map_or(T::one(), |i| w[i]);
        }
        let den = T::one() - z * s;
        if den.modulus() < 1e-14 {
            return Err(Error::Numeric(format!("G(y,y) denominator vanishes at z = {}", z.to_complex())));
        }
        Ok(T::one() / den)
    }

    /// `G_z(y, y)`.
    pub fn green_diagonal<T: Scalar>(&self, z: T, v: &[T]) -> Result<T> {
        let w = self.first_passage_vec(z, v)?;
        self.diagonal_from(z, &w)
    }

    /// `G_z(x, y) = F_z(x, y)·G_z(y, y)`.
    pub fn green<T: Scalar>(&self, x: &Vertex, z: T, v: &[T]) -> Result<T> {
        let w = self.first_passage_vec(z, v)?;
        Ok(self.reduce(x, v, &w) * self.diagonal_from(z, &w)?)
    }

    /// `(F(x, y), G(x, y))` for several sources sharing one solve.
    pub fn evaluate_many<T: Scalar>(&self, xs: &[Vertex], z: T, v: &[T]) -> Result<Vec<(T, T)>> {
        let w = self.first_passage_vec(z, v)?;
        let gyy = self.diagonal_from(z, &w)?;
        Ok(xs
            .iter()
            .map(|x| {
                let f = self.reduce(x, v, &w);
                (f, f * gyy)
            })
            .collect())
    }

    /// Series of `F_z(·, y)` on `B(y) ∖ {y}` to `n` coefficients, from the
    /// series `v` of the coordinates (at least `n` coefficients each).
    pub fn first_passage_series_vec<C: Coeff>(&self, v: &[Vec<C>], n: usize) -> Vec<Vec<C>> {
        let m = self.inner.len();
        let mser: Vec<(usize, usize, Vec<C>)> = self.matrix.iter().map(|(i, j, p)| (*i, *j, p.series(v, n))).collect();
        let rser: Vec<Vec<C>> = self.rhs.iter().map(|p| p.series(v, n)).collect();
        let mut w = vec![vec![C::zero(); n]; m];
        for deg in 1..n {
            let mut next: Vec<C> = rser.iter().map(|r| r[deg - 1].clone()).collect();
            for (i, j, s) in &mser {
                let mut acc = C::zero();
                for t in 0..deg {
                    if !s[t].is_zero() && !w[*j][deg - 1 - t].is_zero() {
                        acc = acc + s[t].clone() * w[*j][deg - 1 - t].clone();
                    }
                }
                next[*i] = next[*i].clone() + acc;
            }
            for (wi, x) in w.iter_mut().zip(next) {
                wi[deg] = x;
            }
        }
        w
    }

    fn reduce_series<C: Coeff>(&self, x: &Vertex, v: &[Vec<C>], w: &[Vec<C>], n: usize) -> Vec<C> {
        if x == &self.y {
            let mut one = vec![C::zero(); n];
            one[0] = C::one();
            return one;
        }
        if let Some(&i) = self.index.get(x) {
            return w[i].clone();
        }
        let mut out = vec![C::zero(); n];
        for (end, poly) in &self.far_form(x).terms {
            let p = poly.series(v, n);
            let term = match end {
                Some(i) => ser_mul(&p, &w[*i], n),
                None => p,
            };
            for (o, t) in out.iter_mut().zip(term) {
                *o = o.clone() + t;
            }
        }
        out
    }

    /// Series of `F_z(x, y)` to `n` coefficients.
    pub fn first_passage_series<C: Coeff>(&self, x: &Vertex, v: &[Vec<C>], n: usize) -> Vec<C> {
        let w = self.first_passage_series_vec(v, n);
        self.reduce_series(x, v, &w, n)
    }

    /// Series of `G_z(x, y)` to `n` coefficients.
    pub fn green_series<C: Coeff>(&self, x: &Vertex, v: &[Vec<C>], n: usize) -> Vec<C> {
        let w = self.first_passage_series_vec(v, n);
        let mut den = vec![C::zero(); n];
        den[0] = C::one();
        for (i, p) in &self.from_y {
            let pc = C::from_rational(p);
            match i {
                Some(i) => {
                    for t in 0..n - 1 {
                        den[t + 1] = den[t + 1].clone() - pc.clone() * w[*i][t].clone();
                    }
                }
                None => {
                    if n > 1 {
                        den[1] = den[1].clone() - pc.clone();
                    }
                }
            }
        }
        let gyy = ser_inv(&den, n);
        ser_mul(&self.reduce_series(x, v, &w, n), &gyy, n)
    }
}

/// Residuals of the Green-function identities at one `z`.
#[derive(Clone, Debug)]
pub struct IdentityResiduals {
    pub z: Complex64,
    /// `|F(x, y) − z·p(x, y) − Σ_{w ≠ y} z·p(x, w)·F(w, y)|`, maximised over
    /// the checked sources.
    pub first_step: f64,
    /// `|G(x, y) − F(x, y)·G(y, y)|` with the left side from the one-step
    /// expansion `δ_{xy} + z·Σ_w p(x, w)·G(w, y)`.
    pub multiplicative: f64,
    /// `|G(y, y)·(1 − Σ_w z·p(y, w)·F(w, y)) − 1|`.
    pub diagonal: f64,
    /// `max_u |((I − zP)G(·, y))(u) − δ_y(u)|` over the checked rows.
    pub impulse: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.first_step.max(self.multiplicative).max(self.diagonal).max(self.impulse)
    }
}

/// Check the identity suite on the rows `ball(y, radius)` at `z` with
/// coordinates `v = v_z`. Values are relative to the magnitude of `G(y, y)`.
pub fn identity_residuals(g: &GreenSystem, radius: usize, z: Complex64, v: &[Complex64]) -> Result<IdentityResiduals> {
    let model = g.sys.model();
    let t = model.tree();
    let y = g.target().clone();
    let rows = t.ball(&y, radius);
    let mut needed: Vec<Vertex> = rows.clone();
    let mut seen: HashSet<Vertex> = rows.iter().cloned().collect();
    for u in &rows {
        for (w, _) in model.support(u) {
            if seen.insert(w.clone()) {
                needed.push(w);
            }
        }
    }
    let vals = g.evaluate_many(&needed, z, v)?;
    let at: HashMap<&Vertex, (Complex64, Complex64)> = needed.iter().zip(vals.iter().cloned()).collect();
    let gyy = at[&y].1;
    let scale = gyy.norm().max(1.0);
    let mut res = IdentityResiduals { z, first_step: 0.0, multiplicative: 0.0, diagonal: 0.0, impulse: 0.0 };
    let mut s_diag = Complex64::zero();
    for (w, si) in model.support(&y) {
        s_diag += Complex64::from_rational(model.step_prob_by_index(si)) * at[&w].0;
    }
    res.diagonal = (gyy * (Complex64::one() - z * s_diag) - Complex64::one()).norm() / scale;
    for u in &rows {
        let (f_u, g_u) = at[u];
        let mut step_f = Complex64::zero();
        let mut step_g = Complex64::zero();
        for (w, si) in model.support(u) {
            let p = Complex64::from_rational(model.step_prob_by_index(si));
            let (f_w, g_w) = at[&w];
            step_f += p * if w == y { Complex64::one() } else { f_w };
            step_g += p * g_w;
        }
        let delta = if *u == y { Complex64::one() } else { Complex64::zero() };
        if *u != y {
            res.first_step = res.first_step.max((f_u - z * step_f).norm());
        }
        let g_expanded = delta + z * step_g;
        res.multiplicative = res.multiplicative.max((g_expanded - f_u * gyy).norm() / scale);
        res.impulse = res.impulse.max((g_u - z * step_g - delta).norm() / scale);
    }
    Ok(res)
}

/// Exact rational function `N(z)/D(z)` with `D(0) = 1`, in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: RatPoly,
    pub denominator: RatPoly,
}

impl RationalFunction {
    /// Reduce `n/d` to lowest terms with `d(0) = 1`.
    pub fn new(n: RatPoly, d: RatPoly) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Argument("zero denominator".into()));
        }
        let g = n.gcd(&d);
        let (mut n, mut d) = if g.degree().unwrap_or(0) > 0 { (n.divrem(&g).0, d.divrem(&g).0) } else { (n, d) };
        let d0 = d.coeff(0);
        if d0.is_zero() {
            return Err(Error::Numeric("rational function has a pole at 0".into()));
        }
        let inv = BigRational::one() / d0;
        n = n.scale(&inv);
        d = d.scale(&inv);
        Ok(RationalFunction { numerator: n, denominator: d })
    }

    /// Taylor coefficients `0..n`.
    pub fn series(&self, n: usize) -> Vec<BigRational> {
        let num: Vec<BigRational> = (0..n).map(|i| self.numerator.coeff(i)).collect();
        let den: Vec<BigRational> = (0..n).map(|i| self.denominator.coeff(i)).collect();
        ser_mul(&num, &ser_inv(&den, n), n)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.numerator.eval_c(z) / self.denominator.eval_c(z)
    }

    pub fn to_text(&self) -> String {
        format!("({}) / ({})", self.numerator.to_text(), self.denominator.to_text())
    }
}

/// The restricted function `G_z(a, b; B(y)^∁)` of a bounded crossing pair.
#[derive(Clone, Debug)]
pub struct RestrictedRational {
    pub xi: XiIndex,
    pub function: RationalFunction,
    /// The vertices of `B(y)^∁` from which `b` is reachable inside
    /// `B(y)^∁`, followed by `b`.
    pub excursion: Vec<Vertex>,
    /// `Q` on `excursion`: `p(u, w)` for rows `u ≠ b`, zero row at `b`.
    pub q: Vec<Vec<BigRational>>,
}

/// Vertices on paths from `a` to `b` whose intermediate vertices stay in
/// `B(y)^∁`, listed with `b` last: forward reach from `a` intersected with
/// backward reach from `b`. The forward search is cut at distance `radius`
/// from `y`; for a bounded pair `radius` is the classifier's escape bound.
pub fn excursion_set(model: &WalkModel, xi: &XiIndex, radius: usize, budget: usize) -> Result<Vec<Vertex>> {
    let t = model.tree();
    let k = model.k();
    let outside = |u: &Vertex| t.distance(u, &xi.y) > k;
    let mut reach: HashSet<Vertex> = HashSet::new();
    let mut queue: VecDeque<Vertex> = VecDeque::new();
    reach.insert(xi.a.clone());
    queue.push_back(xi.a.clone());
    while let Some(u) = queue.pop_front() {
        if u == xi.b {
            continue;
        }
        for (w, _) in model.support(&u) {
            let keep = w == xi.b || (outside(&w) && t.distance(&w, &xi.y) <= radius);
            if keep && reach.insert(w.clone()) {
                if reach.len() > budget {
                    return Err(Error::Budget(format!("excursion search exceeds {budget} vertices")));
                }
                queue.push_back(w);
            }
        }
    }
    if !reach.contains(&xi.b) {
        return Err(Error::Internal("endpoint unreachable inside the search radius".into()));
    }
    let mut co: HashSet<Vertex> = HashSet::new();
    queue.push_back(xi.b.clone());
    while let Some(w) = queue.pop_front() {
        for u in model.predecessors(&w) {
            if u != xi.b && reach.contains(&u) && co.insert(u.clone()) {
                queue.push_back(u);
            }
        }
    }
    let mut order: Vec<Vertex> = co.into_iter().collect();
    order.sort_by(|u, w| t.distance(u, &xi.y).cmp(&t.distance(w, &xi.y)).then(u.cmp(w)));
    order.push(xi.b.clone());
    Ok(order)
}

/// `G_z(a, b; B(y)^∁) = ((I − zQ)⁻¹ δ_b)(a)` as an exact rational function.
///
/// Only pairs classified as bounded are accepted. The denominator is
/// `det(I − zQ)`; the numerator follows from the first `|E|` Taylor
/// coefficients, and the result is verified against `2|E| + 4` coefficients.
pub fn restricted_rational(
    sys: &PathSystem,
    xi: &XiIndex,
    class: &XiClass,
    budget: usize,
) -> Result<RestrictedRational> {
    if !class.is_finite() {
        return Err(Error::Argument(format!(
            "{} is not classified as bounded; its restricted function is not rational by this route",
            sys.format_xi(xi)
        )));
    }
    let model = sys.model();
    let e = excursion_set(model, xi, sys.escape_bound() + model.k(), budget)?;
    let idx: HashMap<&Vertex, usize> = e.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let m = e.len();
    let Some(&ia) = idx.get(&xi.a) else {
        return Err(Error::Internal(format!("{} cannot reach its endpoint", sys.format_xi(xi))));
    };
    let ib = m - 1;
    let mut q = vec![vec![BigRational::zero(); m]; m];
    for (i, u) in e.iter().enumerate().take(m - 1) {
        for (w, si) in model.support(u) {
            if let Some(&j) = idx.get(&w) {
                q[i][j] += model.step_prob_by_index(si);
            }
        }
    }
    // Coefficients (Qⁿ)(a, b) by propagating the row vector e_a.
    let nser = 2 * m + 5;
    let mut row = vec![BigRational::zero(); m];
    row[ia] = BigRational::one();
    let mut ser = Vec::with_capacity(nser);
    for _ in 0..nser {
        ser.push(row[ib].clone());
        let mut next = vec![BigRational::zero(); m];
        for (i, r) in row.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            for (j, qij) in q[i].iter().enumerate() {
                if !qij.is_zero() {
                    next[j] += r * qij;
                }
            }
        }
        row = next;
    }
    // det(I − zQ) = z^m·χ(1/z).
    let chi = charpoly(&q);
    let den = RatPoly::new((0..=m).map(|i| chi.coeff(m - i)).collect());
    let prod = ser_mul(&ser, &den.0, nser);
    let num = RatPoly::new(prod[..m].to_vec());
    if prod[m..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Internal("restricted series is not matched by det(I − zQ)".into()));
    }
    let function = RationalFunction::new(num, den)?;
    if function.series(nser) != ser {
        return Err(Error::Internal("reduced rational function disagrees with its series".into()));
    }
    // The excursion set must carry every restricted path: compare with the
    // unrestricted-by-construction dynamic programme.
    let t = model.tree();
    let k = model.k();
    let outside = |u: &Vertex| t.distance(u, &xi.y) > k;
    let oracle = model.oracle_restricted_series(&xi.a, &xi.b, &outside, nser - 1, budget.max(1_000_000))?;
    if oracle != ser {
        return Err(Error::Internal(format!(
            "{}: excursion set misses restricted paths (oracle disagrees)",
            sys.format_xi(xi)
        )));
    }
    Ok(RestrictedRational { xi: xi.clone(), function, excursion: e, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::stock;
    use crate::curve_solver::{newton_eval, series_exact};
    use crate::numeric::rat;

    #[test]
    fn first_passage_on_the_three_regular_tree() {
        let sys = PathSystem::build(&stock("srw_free").unwrap().model).unwrap();
        let t = sys.model().tree();
        let y = t.base();
        let g = GreenSystem::new(&sys, &y);
        let a = t.reduce("a").unwrap();
        for z in [0.1, 0.5, 0.9] {
            let v = newton_eval(sys.psi(), z, None, 1e-14).unwrap();
            let f = g.first_passage(&a, z, &v).unwrap();
            assert!((f - z / 3.0 - 2.0 * z / 3.0 * f * f).abs() < 1e-12);
            assert_eq!(g.first_passage(&y, z, &v).unwrap(), 1.0);
        }
    }

    #[test]
    fn exact_green_series_equals_oracle() {
        let sys = PathSystem::build(&stock("mu").unwrap().model).unwrap();
        let t = sys.model().tree();
        let y = t.base();
        let g = GreenSystem::new(&sys, &y);
        let v = series_exact(sys.psi(), 14);
        for x in ["e", "a", "ca", "bca", "cbcb"] {
            let x = t.reduce(x).unwrap();
            let ser = g.green_series(&x, &v, 15);
            let oracle = sys.model().oracle_series(&x, &y, 14, 1_000_000).unwrap();
            assert_eq!(ser, oracle, "x = {}", t.format_vertex(&x));
        }
    }

    #[test]
    fn rational_function_reduction() {
        let n = RatPoly::new(vec![rat(0, 1), rat(2, 1), rat(-2, 1)]);
        let d = RatPoly::new(vec![rat(2, 1), rat(-2, 1)]);
        let r = RationalFunction::new(n, d).unwrap();
        assert_eq!(r.numerator, RatPoly::new(vec![rat(0, 1), rat(1, 1)]));
        assert_eq!(r.denominator, RatPoly::one());
    }
}
