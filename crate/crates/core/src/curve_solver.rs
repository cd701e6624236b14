//! Solving `J = z·ψ(J)`: power series, Newton continuation, and the branch
//! point `(R, v_R)` of the curve with its square-root expansion
//! `v_z = v_R − α·√(1 − z/R) + O(1 − z/R)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{BigRational, One};

use crate::error::{Error, Result};
use crate::numeric::{richardson, solve, Coeff, Scalar};
use crate::path_system::{DependencyDigraph, PolySystem};
use crate::perron::spectral_radius;
use crate::tolerances::Tolerances;

/// Truncated series solution of `v = ρz·ψ(v)`: `coeffs[i][n]` is the
/// coefficient of `zⁿ` in coordinate `i`, for `n = 0..=order`.
///
/// The recursion uses that the coefficient of `zⁿ` of `v` only involves
/// coefficients of order `< n`. With `scale = ρ` the result is the series of
/// `v(ρz)`, which keeps floating coefficients in range near the radius.
pub fn series_solve<T: Coeff>(psi: &PolySystem, order: usize, scale: &T) -> Vec<Vec<T>> {
    let n = psi.dim();
    let mut v = vec![vec![T::zero(); order + 1]; n];
    // Distinct monomials with their prefix-product series.
    let mut mono_index: HashMap<&[usize], usize> = HashMap::new();
    let mut monos: Vec<&[usize]> = Vec::new();
    let mut rows: Vec<Vec<(T, usize)>> = Vec::with_capacity(n);
    for row in &psi.monomials {
        let mut r = Vec::with_capacity(row.len());
        for m in row {
            let id = *mono_index.entry(&m.vars).or_insert_with(|| {
                monos.push(&m.vars);
                monos.len() - 1
            });
            r.push((T::from_rational(&m.coeff), id));
        }
        rows.push(r);
    }
    let constants: Vec<T> = psi.constants.iter().map(T::from_rational).collect();
    let mut prefix: Vec<Vec<Vec<T>>> = monos.iter().map(|m| vec![vec![T::zero(); order + 1]; m.len()]).collect();
    for deg in 1..=order {
        let t = deg - 1;
        // Coefficient t of every prefix product; v is known up to order t.
        for (id, vars) in monos.iter().enumerate() {
            let p = &mut prefix[id];
            p[0][t] = v[vars[0]][t].clone();
            for j in 1..vars.len() {
                let mut s = T::zero();
                for u in j..=t {
                    if !p[j - 1][u].is_zero() {
                        s = s + p[j - 1][u].clone() * v[vars[j]][t - u].clone();
                    }
                }
                p[j][t] = s;
            }
        }
        for i in 0..n {
            let mut s = if t == 0 { constants[i].clone() } else { T::zero() };
            for (c, id) in &rows[i] {
                let last = prefix[*id].last().unwrap();
                if !last[t].is_zero() {
                    s = s + c.clone() * last[t].clone();
                }
            }
            v[i][deg] = scale.clone() * s;
        }
    }
    v
}

/// Exact series solution to order `order`.
pub fn series_exact(psi: &PolySystem, order: usize) -> Vec<Vec<BigRational>> {
    series_solve(psi, order, &BigRational::one())
}

/// Max-norm of `J − zψ(J)`.
pub fn residual<T: Scalar>(psi: &PolySystem, z: T, j: &[T]) -> f64 {
    psi.eval(j).iter().zip(j).map(|(p, x)| (*x - z * *p).modulus()).fold(0.0, f64::max)
}

fn newton_polish<T: Scalar>(psi: &PolySystem, z: T, j: &mut [T], tol: f64) -> bool {
    let n = j.len();
    let mut best = f64::INFINITY;
    let mut first = f64::INFINITY;
    for it in 0..30 {
        let p = psi.eval(j);
        let f = DVector::from_iterator(n, j.iter().zip(&p).map(|(x, q)| *x - z * *q));
        let res = f.iter().map(|x| x.modulus()).fold(0.0, f64::max);
        if !res.is_finite() {
            return false;
        }
        if res < tol * 1e-2 || (res < tol && res >= best * 0.5) {
            return true;
        }
        if (res > 1e3 && res > best * 10.0) || (it >= 8 && res > first * 1e-3) {
            return false;
        }
        if it == 0 {
            first = res;
        }
        best = best.min(res);
        let jac = DMatrix::<T>::identity(n, n) - psi.jacobian(j) * z;
        let Some(dx) = solve(&jac, &(-f)) else { return false };
        for (x, d) in j.iter_mut().zip(dx.iter()) {
            *x += *d;
        }
    }
    residual(psi, z, j) < tol
}

/// Solution of `J = zψ(J)` on the branch through `J(0) = 0`, continued along
/// the segment from `start = (z₀, J₀)` (default the origin) to `z`.
pub fn newton_eval<T: Scalar>(psi: &PolySystem, z: T, start: Option<(T, &[T])>, tol: f64) -> Result<Vec<T>> {
    continuation(psi, z, start, tol, 1e-10)
}

fn continuation<T: Scalar>(
    psi: &PolySystem,
    z: T,
    start: Option<(T, &[T])>,
    tol: f64,
    min_step: f64,
) -> Result<Vec<T>> {
    let n = psi.dim();
    let (z0, mut j) = match start {
        Some((z0, j0)) => (z0, j0.to_vec()),
        None => (T::zero(), vec![T::zero(); n]),
    };
    let mut t = 0.0f64;
    let mut dt = 0.25f64;
    let mut zc = z0;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        let zn = z0 + (z - z0) * T::lift(t + step);
        // Tangent predictor: dJ/dz = (I − zDψ)⁻¹ ψ(J).
        let jac = DMatrix::<T>::identity(n, n) - psi.jacobian(&j) * zc;
        let mut guess = j.clone();
        if let Some(dj) = solve(&jac, &DVector::from_vec(psi.eval(&j))) {
            for (g, d) in guess.iter_mut().zip(dj.iter()) {
                *g += *d * (zn - zc);
            }
        }
        if newton_polish(psi, zn, &mut guess, tol) {
            j = guess;
            zc = zn;
            t += step;
            dt = (step * 2.0).min(0.5);
        } else {
            dt = step / 2.0;
            if dt < min_step {
                return Err(Error::Numeric(format!(
                    "continuation stalled near z = {} (branch point proximity)",
                    zn.to_complex()
                )));
            }
        }
    }
    Ok(j)
}

/// Monotone iteration `J ← zψ(J)` from `0` (real `z`).
pub fn fixed_point_iterate(psi: &PolySystem, z: f64, max_iter: usize, tol: f64) -> Option<Vec<f64>> {
    let mut j = vec![0.0; psi.dim()];
    for _ in 0..max_iter {
        let next: Vec<f64> = psi.eval(&j).iter().map(|p| z * p).collect();
        let delta = next.iter().zip(&j).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        j = next;
        if !j.iter().all(|x| x.is_finite() && *x < 1e12) {
            return None;
        }
        if delta < tol {
            return Some(j);
        }
    }
    None
}

/// The branch point of the curve and its local data.
#[derive(Clone, Debug)]
pub struct SingularData {
    pub r: f64,
    pub v_r: Vec<f64>,
    /// Right null vector of `I − R·Dψ(v_R)`, unit max on the absorbing block.
    pub h: Vec<f64>,
    /// Left null vector, normalised by `ℓ·h = 1`.
    pub ell: Vec<f64>,
    /// Square-root coefficient from the second-order expansion.
    pub alpha: Vec<f64>,
    /// Square-root coefficient from a direct fit of `(v_R − v_z)/√(1 − z/R)`.
    pub alpha_fit: Vec<f64>,
    /// Coordinates of the absorbing strong component.
    pub absorbing: Vec<usize>,
    /// `|δz| / ‖(δz, δJ)‖` for the tangent of the curve at the branch point.
    pub tangent_dz: f64,
    /// `z ≈ R + z₂ s²` along the curve parametrised by `J = v_R + s·h + …`.
    pub curvature: f64,
    pub ell_psi: f64,
    pub ell_d2: f64,
    /// Residual of the augmented system at the solution.
    pub residual: f64,
    /// Smallest singular value of `I − R·Dψ(v_R)`.
    pub sigma_min: f64,
    /// Bisection bracket before the final Newton solve.
    pub bracket: (f64, f64),
}

impl SingularData {
    /// Largest relative gap between the two α estimates on the absorbing
    /// block.
    pub fn alpha_gap(&self) -> f64 {
        let scale = self.absorbing.iter().map(|&i| self.alpha[i].abs()).fold(0.0, f64::max);
        (0..self.alpha.len()).map(|i| (self.alpha[i] - self.alpha_fit[i]).abs()).fold(0.0, f64::max) / scale
    }
}

fn subjacobian(psi: &PolySystem, z: f64, j: &[f64], idx: &[usize]) -> DMatrix<f64> {
    let full = psi.jacobian(j) * z;
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| full[(idx[a], idx[b])])
}

/// Spectral radius of `z·Dψ(J)` on the coordinates `idx`.
pub fn jacobian_radius(psi: &PolySystem, z: f64, j: &[f64], idx: &[usize], tol: f64) -> f64 {
    spectral_radius(&subjacobian(psi, z, j, idx), tol).rho
}

fn min_singular(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Locate the smallest positive branch point of the curve on the branch from
/// `0`: bracket by continuation (a point is below the branch point when the
/// solution is nonnegative and `ρ(zDψ) < 1` on the absorbing block), then
/// solve `{J = zψ(J), (I − zDψ(J))h = 0, c·h = 1}` by Newton's method.
pub fn find_branch_point(psi: &PolySystem, tol: &Tolerances) -> Result<SingularData> {
    let n = psi.dim();
    let graph = DependencyDigraph::new(psi);
    let absorbing: Vec<usize> = graph
        .absorbing()
        .ok_or_else(|| Error::Model("dependency digraph has no absorbing strong component".into()))?
        .to_vec();
    let below = |z: f64, from: (f64, &[f64])| -> Option<Vec<f64>> {
        // A coarse minimum step: the bracket only seeds the Newton solve below.
        let j = continuation(psi, z, Some(from), tol.fixed_point, 1e-3).ok()?;
        if j.iter().any(|x| *x < -1e-12) {
            return None;
        }
        let m = subjacobian(psi, z, &j, &absorbing);
        below_one(&m).then_some(j)
    };
    let (mut lo, mut j_lo) = (0.0, vec![0.0; n]);
    let mut z = 0.5f64.min(tol.z_max);
    let mut hi = loop {
        match below(z, (lo, &j_lo)) {
            Some(j) => {
                lo = z;
                j_lo = j;
                if z >= tol.z_max {
                    return Err(Error::Numeric(format!("system appears entire: no branch point below {}", tol.z_max)));
                }
                z = (z * 1.5).min(tol.z_max);
            }
            None => break z,
        }
    };
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        match below(mid, (lo, &j_lo)) {
            Some(j) => {
                lo = mid;
                j_lo = j;
            }
            None => hi = mid,
        }
    }
    let bracket = (lo, hi);

    // Initial null vector by inverse iteration.
    let mlo = DMatrix::<f64>::identity(n, n) - psi.jacobian(&j_lo) * lo;
    let mut h = DVector::from_element(n, 1.0);
    for _ in 0..8 {
        let x = solve(&mlo, &h).ok_or_else(|| Error::Numeric("inverse iteration failed".into()))?;
        h = &x / x.amax();
    }
    let c = &h / h.norm_squared();

    // Newton on the augmented system.
    let (mut jv, mut hv, mut zr) = (DVector::from_vec(j_lo), h, lo);
    let mut res = f64::INFINITY;
    for _ in 0..60 {
        let js = jv.as_slice();
        let p = DVector::from_vec(psi.eval(js));
        let d = psi.jacobian(js);
        let m = DMatrix::<f64>::identity(n, n) - &d * zr;
        let f1 = &jv - &p * zr;
        let f2 = &m * &hv;
        let f3 = c.dot(&hv) - 1.0;
        let new_res = f1.amax().max(f2.amax()).max(f3.abs());
        if new_res < 1e-15 || (new_res < 1e-13 && new_res >= res * 0.5) {
            res = new_res;
            break;
        }
        res = new_res;
        let hd = psi.hessian_dir(js, hv.as_slice());
        let dh = &d * &hv;
        let mut big = DMatrix::<f64>::zeros(2 * n + 1, 2 * n + 1);
        big.view_mut((0, 0), (n, n)).copy_from(&m);
        big.view_mut((0, 2 * n), (n, 1)).copy_from(&(-&p));
        big.view_mut((n, 0), (n, n)).copy_from(&(-(&hd * zr)));
        big.view_mut((n, n), (n, n)).copy_from(&m);
        big.view_mut((n, 2 * n), (n, 1)).copy_from(&(-&dh));
        big.view_mut((2 * n, n), (1, n)).copy_from(&c.transpose());
        let mut rhs = DVector::<f64>::zeros(2 * n + 1);
        rhs.rows_mut(0, n).copy_from(&(-f1));
        rhs.rows_mut(n, n).copy_from(&(-f2));
        rhs[2 * n] = -f3;
        let step = solve(&big, &rhs).ok_or_else(|| Error::Numeric("singular augmented system".into()))?;
        jv += step.rows(0, n);
        hv += step.rows(n, n);
        zr += step[2 * n];
    }
    if res > 1e-11 || !(lo * (1.0 - 1e-6)..=hi * (1.0 + 1e-6)).contains(&zr) {
        return Err(Error::Numeric(format!(
            "augmented Newton did not converge inside the bracket [{lo}, {hi}] (z = {zr}, residual {res:e})"
        )));
    }
    let v_r: Vec<f64> = jv.iter().cloned().collect();
    let scale = absorbing.iter().map(|&i| hv[i].abs()).fold(0.0, f64::max) * hv[absorbing[0]].signum();
    let hv = hv / scale;
    let m = DMatrix::<f64>::identity(n, n) - psi.jacobian(&v_r) * zr;
    let sigma_min = min_singular(&m);

    // Left null vector from the bordered system [[Mᵀ, h], [hᵀ, 0]].
    let mut bord = DMatrix::<f64>::zeros(n + 1, n + 1);
    bord.view_mut((0, 0), (n, n)).copy_from(&m.transpose());
    bord.view_mut((0, n), (n, 1)).copy_from(&hv);
    bord.view_mut((n, 0), (1, n)).copy_from(&hv.transpose());
    let mut e = DVector::<f64>::zeros(n + 1);
    e[n] = 1.0;
    let sol = solve(&bord, &e).ok_or_else(|| Error::Numeric("bordered system singular".into()))?;
    let ell = sol.rows(0, n).into_owned();

    let p = DVector::from_vec(psi.eval(&v_r));
    let d2 = psi.second_dir(&v_r, hv.as_slice());
    let ell_psi = ell.dot(&p);
    let ell_d2 = ell.dot(&d2);
    let kappa = (2.0 * ell_psi / ell_d2).sqrt();
    let alpha: Vec<f64> = hv.iter().map(|x| x * kappa).collect();
    let curvature = -zr * ell_d2 / (2.0 * ell_psi);

    // Tangent of the curve: kernel of [−ψ(v_R) | M].
    let mut tan = DMatrix::<f64>::zeros(n + 1, n + 1);
    tan.view_mut((0, 0), (n, 1)).copy_from(&(-&p));
    tan.view_mut((0, 1), (n, n)).copy_from(&m);
    let svd = tan.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Numeric("tangent SVD failed".into()))?;
    let (imin, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let tvec = vt.row(imin);
    let tangent_dz = tvec[0].abs() / tvec.norm();

    let alpha_fit = fit_alpha(psi, zr, &v_r, tol)?;
    Ok(SingularData {
        r: zr,
        v_r,
        h: hv.iter().cloned().collect(),
        ell: ell.iter().cloned().collect(),
        alpha,
        alpha_fit,
        absorbing,
        tangent_dz,
        curvature,
        ell_psi,
        ell_d2,
        residual: res,
        sigma_min,
        bracket,
    })
}

/// `(v_R − v_z)/√(1 − z/R)` on `z = R(1 − 2^{−j})`, `j = 6..=16`, fitted by a
/// cubic in `s = √(1 − z/R)`; the intercept estimates α.
fn fit_alpha(psi: &PolySystem, r: f64, v_r: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let n = psi.dim();
    let js: Vec<i32> = (6..=16).collect();
    let mut samples = Vec::new();
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for &j in &js {
        let z = r * (1.0 - 2f64.powi(-j));
        let v = newton_eval(psi, z, prev.as_ref().map(|(z0, v0)| (*z0, v0.as_slice())), tol.fixed_point)?;
        let s = 2f64.powf(-j as f64 / 2.0);
        samples.push((s, v.iter().zip(v_r).map(|(a, b)| (b - a) / s).collect::<Vec<f64>>()));
        prev = Some((z, v));
    }
    let deg = 4;
    let a = DMatrix::from_fn(samples.len(), deg, |i, p| samples[i].0.powi(p as i32));
    let ata = a.transpose() * &a;
    let mut out = vec![0.0; n];
    for (c, o) in out.iter_mut().enumerate() {
        let y = DVector::from_iterator(samples.len(), samples.iter().map(|(_, v)| v[c]));
        let coef = solve(&ata, &(a.transpose() * y)).ok_or_else(|| Error::Numeric("alpha fit singular".into()))?;
        *o = coef[0];
    }
    Ok(out)
}

/// Decide `ρ(M) < 1` for an irreducible nonnegative matrix: this holds iff
/// `(I − M)x = 1` has a positive solution (then `x = Σ Mᵏ1`; conversely
/// `Mx < x` bounds `ρ` below one by Collatz–Wielandt).
fn below_one(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    let a = DMatrix::<f64>::identity(n, n) - m;
    solve(&a, &DVector::from_element(n, 1.0)).is_some_and(|x| x.iter().all(|v| *v > 0.0 && v.is_finite()))
}

/// Radius estimate from the coefficients `a_{dn+r}` by Richardson
/// extrapolation of the ratios `a_{d(n+1)+r}/a_{dn+r} → R^{−d}`.
pub fn ratio_radius(coeffs: &[f64], d: u64, r: u64) -> Option<f64> {
    let d = d as usize;
    let sub: Vec<f64> = coeffs.iter().skip(r as usize).step_by(d).cloned().collect();
    let start = sub.iter().position(|&x| x > 0.0)?;
    let q: Vec<f64> = (start..sub.len() - 1).map(|n| sub[n + 1] / sub[n]).collect();
    let m = 4;
    if q.len() < m + 8 || q.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return None;
    }
    // The combination amplifies rounding by ~nᵐ; n ≈ 150 balances it against
    // the O(n^{−m−1}) truncation error.
    let at = (q.len() - m - 1).min(150);
    let lim = richardson(&q, start + 1, at, m);
    (lim > 0.0).then(|| lim.powf(-1.0 / d as f64))
}

/// `newton_eval` at `ζ_d^j·z` for all `j`, for equivariance checks.
pub fn rotated_solutions(psi: &PolySystem, z: Complex64, d: u64, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    (0..d)
        .map(|j| {
            let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64);
            newton_eval(psi, zeta * z, None, tol)
        })
        .collect()
}

/// Smallest singular value of `I − zDψ(v_z)` at `z = r·e^{iθ}` (continued
/// from the origin), used to map where the branch degenerates on a circle.
pub fn jacobian_sigma_at(psi: &PolySystem, z: Complex64, tol: f64) -> Result<f64> {
    let v = newton_eval(psi, z, None, tol)?;
    let n = psi.dim();
    let m = DMatrix::<Complex64>::identity(n, n) - psi.jacobian(&v) * z;
    Ok(m.svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// One radius estimate of the equality report.
#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub label: String,
    pub estimate: Option<f64>,
}

/// Ratio-test estimates of the radii of `G`, `F` and the coordinates, and
/// the conjugate branch points found on the circle `|z| = R`.
#[derive(Clone, Debug)]
pub struct RadiusReport {
    pub radius: f64,
    pub estimates: Vec<RadiusEstimate>,
    /// Coordinates left out: bounded pairs have a rational restricted function
    /// with a larger radius.
    pub excluded: Vec<String>,
    /// Largest relative deviation of an estimate from `R`.
    pub max_gap: f64,
    /// `(angle, σ_min near R·e^{iθ})` at the `d` points `θ = 2πj/d`.
    pub singular: Vec<(f64, f64)>,
    /// `σ_min` at the midpoints between them.
    pub regular: Vec<(f64, f64)>,
}

impl RadiusReport {
    /// Every estimate present and within `tol` of `R`.
    pub fn estimates_agree(&self, tol: f64) -> bool {
        self.estimates.iter().all(|e| e.estimate.is_some()) && self.max_gap < tol
    }

    /// The `d` conjugate points are all markedly more singular than the
    /// points between them.
    pub fn symmetry_detected(&self) -> bool {
        let worst_singular = self.singular.iter().map(|x| x.1).fold(0.0, f64::max);
        let best_regular = self.regular.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        worst_singular < 0.05 * best_regular
    }
}

/// Compare the radii of `G(x, y)`, `F(x, y)` for the given pairs and of every
/// unbounded coordinate against the branch point `R`, from series of `order`
/// coefficients; `bounded[i]` marks coordinates with bounded excursions.
pub fn radius_equalities_report(
    sys: &crate::path_system::PathSystem,
    sing: &SingularData,
    pairs: &[(crate::tree_model::Vertex, crate::tree_model::Vertex)],
    bounded: &[bool],
    order: usize,
) -> Result<RadiusReport> {
    use crate::green_eval::GreenSystem;
    let model = sys.model();
    let d = model.d();
    let t = model.tree();
    let v = series_solve(sys.psi(), order, &1.0f64);
    let mut estimates = Vec::new();
    let mut excluded = Vec::new();
    for (x, y) in pairs {
        let g = GreenSystem::new(sys, y);
        let r = model.r(x, y);
        let label = format!("{}->{}", t.format_vertex(x), t.format_vertex(y));
        estimates.push(RadiusEstimate {
            label: format!("G({label})"),
            estimate: ratio_radius(&g.green_series(x, &v, order + 1), d, r),
        });
        if x != y {
            let f = g.first_passage_series(x, &v, order + 1);
            // A first-passage series with a vanishing tail is a polynomial:
            // bounded first passage, no singularity to estimate.
            if f[order / 2..].iter().all(|c| *c == 0.0) {
                excluded.push(format!("F({label})"));
            } else {
                estimates.push(RadiusEstimate { label: format!("F({label})"), estimate: ratio_radius(&f, d, r) });
            }
        }
    }
    for (i, o) in sys.orbits().iter().enumerate() {
        let label = sys.format_xi(&o.rep);
        if bounded.get(i).copied().unwrap_or(false) {
            excluded.push(label);
            continue;
        }
        estimates.push(RadiusEstimate { label: format!("v{label}"), estimate: ratio_radius(&v[i], d, o.residue) });
    }
    let max_gap = estimates.iter().filter_map(|e| e.estimate).map(|e| (e - sing.r).abs() / sing.r).fold(0.0, f64::max);
    let near = sing.r * (1.0 - 1e-6);
    let mut singular = Vec::new();
    let mut regular = Vec::new();
    for j in 0..d {
        let th = 2.0 * std::f64::consts::PI * j as f64 / d as f64;
        let mid = th + std::f64::consts::PI / d as f64;
        singular.push((th, jacobian_sigma_at(sys.psi(), Complex64::from_polar(near, th), 1e-13)?));
        regular.push((mid, jacobian_sigma_at(sys.psi(), Complex64::from_polar(near, mid), 1e-13)?));
    }
    Ok(RadiusReport { radius: sing.r, estimates, excluded, max_gap, singular, regular })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn srw_system() -> PolySystem {
        PolySystem::new(vec!["F".into()], vec![rat(1, 3)], vec![vec![(rat(2, 3), vec![0, 0])]])
    }

    #[test]
    fn exact_series_of_first_passage() {
        // F = z/3 + (2z/3)F²: 1/3, 0, 2/27, 0, 8/243
        let v = series_exact(&srw_system(), 5);
        assert_eq!(v[0][1], rat(1, 3));
        assert_eq!(v[0][2], rat(0, 1));
        assert_eq!(v[0][3], rat(2, 27));
        assert_eq!(v[0][5], rat(8, 243));
    }

    #[test]
    fn branch_point_of_quadratic() {
        let s = find_branch_point(&srw_system(), &Tolerances::default()).unwrap();
        let r = 3.0 / (2.0 * 2f64.sqrt());
        assert!((s.r - r).abs() < 1e-12, "{}", s.r);
        assert!((s.v_r[0] - 1.0 / 2f64.sqrt()).abs() < 1e-10);
        assert!((s.alpha[0] - 1.0).abs() < 1e-8, "{:?}", s.alpha);
        assert!(s.alpha_gap() < 1e-4, "{:?} {:?}", s.alpha, s.alpha_fit);
        assert!(s.tangent_dz < 1e-8);
    }

    #[test]
    fn newton_matches_monotone_iteration() {
        let p = srw_system();
        let a = newton_eval(&p, 0.9f64, None, 1e-14).unwrap();
        let b = fixed_point_iterate(&p, 0.9, 10_000, 1e-15).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12);
    }

    #[test]
    fn ratio_test_recovers_radius() {
        let v = series_solve(&srw_system(), 801, &1.0f64);
        let r = ratio_radius(&v[0], 2, 1).unwrap();
        assert!((r - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-6, "{r}");
    }
}
