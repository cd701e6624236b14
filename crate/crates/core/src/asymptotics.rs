//! Coefficient asymptotics: the square-root transfer for channels driven by
//! the branch point, the pole transfer for rational restricted functions, and
//! a regression fit of exact coefficients that referees both.

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::curve_solver::{newton_eval, SingularData};
use crate::error::{Error, Result};
use crate::green_eval::{Channel, GreenSystem, RationalFunction};
use crate::numeric::{rat_to_f64, solve, Coeff, RatPoly, Scalar};
use crate::path_system::PathSystem;
use crate::tree_model::Vertex;

/// Shape of the leading coefficient asymptotics.
#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    /// `C·R^{−dn}·n^{−3/2}`.
    Sqrt,
    /// `Σ_j D_{−j}·n^{j−1}·R'^{−dn}` led by a pole of order `order` at
    /// modulus `r_prime`.
    Pole { order: usize, r_prime: f64 },
    /// Finitely many nonzero coefficients.
    Polynomial { degree: usize },
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::Sqrt => "sqrt",
            Law::Pole { .. } => "pole",
            Law::Polynomial { .. } => "polynomial",
        }
    }
}

/// Leading asymptotics of `a_{dn+r}` for one pair and channel.
#[derive(Clone, Debug)]
pub struct AsymptoticResult {
    pub pair: String,
    pub channel: Channel,
    pub d: u64,
    pub r: u64,
    /// Radius of the governing singularity (`R`, or `R'` for poles).
    pub radius: f64,
    /// `C` for the square-root law, `D_{−M}` for the pole law.
    pub constant: f64,
    /// First correction `c₁` when fitted.
    pub c1: Option<f64>,
    pub law: Law,
    /// Square-root amplitude `B` with `g∘u = g_R − B·√(1 − z/R) + …`.
    pub amplitude: Option<f64>,
    pub flags: Vec<String>,
}

/// A channel seen as a function of `(z, J)` on the curve.
#[derive(Clone, Copy)]
pub enum Functional<'a> {
    /// `(z, J) ↦ J_i`.
    Coordinate(usize),
    /// `(z, J) ↦ F(x, y)` or `G(x, y)` rebuilt from `J`.
    Green { system: &'a GreenSystem<'a>, x: &'a Vertex, full: bool },
}

impl Functional<'_> {
    pub fn channel(&self) -> Channel {
        match self {
            Functional::Coordinate(_) => Channel::Restricted,
            Functional::Green { full: true, .. } => Channel::Full,
            Functional::Green { full: false, .. } => Channel::FirstPassage,
        }
    }

    pub fn eval<T: Scalar>(&self, z: T, j: &[T]) -> Result<T> {
        match self {
            Functional::Coordinate(i) => Ok(j[*i]),
            Functional::Green { system, x, full: true } => system.green(x, z, j),
            Functional::Green { system, x, full: false } => system.first_passage(x, z, j),
        }
    }
}

/// Square-root transfer of `g∘u` at the branch point.
///
/// `B = ∇_J g(R, v_R)·α` by a complex-step derivative (the `z`-partial only
/// enters at order `1 − z/R`); with the `d` conjugate singularities at
/// `R·ζ_d^j` the coefficients satisfy
/// `a_{dn+r} ∼ C·R^{−dn}·n^{−3/2}` with `C = d·B·R^{−r} / (2√π·d^{3/2})`.
/// The phase relation `g(ζ_d z, A·u(z)) = ζ_d^r·g(z, u(z))` is checked at a
/// complex sample point.
pub fn transfer_sqrt(
    sys: &PathSystem,
    sing: &SingularData,
    g: Functional,
    pair: String,
    r: u64,
    tol: f64,
) -> Result<AsymptoticResult> {
    let d = sys.model().d();
    let eps = 1e-20;
    let jc: Vec<Complex64> = sing.v_r.iter().zip(&sing.alpha).map(|(v, a)| Complex64::new(*v, eps * a)).collect();
    let gz = g.eval(Complex64::new(sing.r, 0.0), &jc)?;
    let b = gz.im / eps;
    let mut flags = Vec::new();
    // Phase relation at an off-axis sample.
    let zs = Complex64::from_polar(0.6 * sing.r, 0.37);
    let u = newton_eval(sys.psi(), zs, None, 1e-13)?;
    let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let lhs = g.eval(zeta * zs, &sys.apply_a(&u))?;
    let rhs = zeta.powu(r as u32) * g.eval(zs, &u)?;
    let phase_err = (lhs - rhs).norm() / rhs.norm().max(1e-300);
    if phase_err > 1e-10 {
        flags.push(format!("phase relation violated ({phase_err:.3e})"));
    }
    if b.abs() < tol {
        flags.push("derivative vanishes".into());
    }
    let constant = d as f64 * b * sing.r.powi(-(r as i32)) / (2.0 * std::f64::consts::PI.sqrt() * (d as f64).powf(1.5));
    if constant.is_nan() || constant <= 0.0 {
        flags.push("non-positive constant".into());
    }
    Ok(AsymptoticResult {
        pair,
        channel: g.channel(),
        d,
        r,
        radius: sing.r,
        constant,
        c1: None,
        law: Law::Sqrt,
        amplitude: Some(b),
        flags,
    })
}

/// A pole `β` of a rational function with its principal-part coefficients:
/// near `β`, `f(z) = Σ_{j=1}^{m} c_j·(1 − z/β)^{−j} + analytic`.
#[derive(Clone, Debug)]
pub struct PoleTerm<C> {
    pub pole: C,
    pub coeffs: Vec<C>,
}

/// Full partial-fraction expansion `f = P(z) + Σ_β Σ_j c_{β,j}(1 − z/β)^{−j}`.
#[derive(Clone, Debug)]
pub struct PoleExpansion {
    pub polynomial: RatPoly,
    /// Exact terms when the denominator splits over ℚ.
    pub exact: Option<Vec<PoleTerm<BigRational>>>,
    pub terms: Vec<PoleTerm<Complex64>>,
}

fn binom_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binom_exact(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

impl PoleExpansion {
    /// `[zⁿ]f` from the expansion (floating).
    pub fn coefficient(&self, n: usize) -> Complex64 {
        let mut s = Complex64::new(rat_to_f64(&self.polynomial.coeff(n)), 0.0);
        for t in &self.terms {
            let inv = Complex64::one() / t.pole;
            for (j, c) in t.coeffs.iter().enumerate() {
                s += c * binom_f64(n + j, j) * inv.powu(n as u32);
            }
        }
        s
    }

    /// `[zⁿ]f` from the exact expansion, when available.
    pub fn coefficient_exact(&self, n: usize) -> Option<BigRational> {
        let terms = self.exact.as_ref()?;
        let mut s = self.polynomial.coeff(n);
        for t in terms {
            let inv = BigRational::one() / &t.pole;
            let pw = num::pow(inv, n);
            for (j, c) in t.coeffs.iter().enumerate() {
                s += c * BigRational::from_integer(binom_exact(n + j, j)) * &pw;
            }
        }
        Some(s)
    }
}

/// Coefficients of `p(β(1 − u))` in `u`.
fn compose_affine<C: Coeff>(p: &[C], beta: &C) -> Vec<C> {
    // Horner in the polynomial ring: acc ← acc·(β − βu) + c.
    let mut acc: Vec<C> = Vec::new();
    for c in p.iter().rev() {
        let mut next = vec![C::zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i] = next[i].clone() + a.clone() * beta.clone();
            next[i + 1] = next[i + 1].clone() - a.clone() * beta.clone();
        }
        next[0] = next[0].clone() + c.clone();
        acc = next;
    }
    acc
}

/// Quotient of `p(z)` by `(z − β)` (exact division assumed).
fn div_linear<C: Coeff>(p: &[C], beta: &C) -> Vec<C> {
    let n = p.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![C::zero(); n - 1];
    let mut carry = C::zero();
    for i in (1..n).rev() {
        carry = p[i].clone() + carry * beta.clone();
        q[i - 1] = carry.clone();
    }
    q
}

fn principal_parts<C: Coeff>(num: &[C], den: &[C], poles: &[(C, usize)]) -> Vec<PoleTerm<C>> {
    let mut out = Vec::new();
    for (beta, m) in poles {
        // den = (1 − z/β)^m · rest, and (1 − z/β) = −(z − β)/β.
        let mut rest = den.to_vec();
        for _ in 0..*m {
            rest = div_linear(&rest, beta).into_iter().map(|c| C::zero() - c * beta.clone()).collect();
        }
        let nu = compose_affine(num, beta);
        let de = compose_affine(&rest, beta);
        // h(u) = nu/de to m terms; c_{m−i} = h_i.
        let mut h: Vec<C> = Vec::with_capacity(*m);
        for i in 0..*m {
            let mut s = nu.get(i).cloned().unwrap_or_else(C::zero);
            for t in 1..=i {
                if let Some(dt) = de.get(t) {
                    s = s - dt.clone() * h[i - t].clone();
                }
            }
            h.push(s / de[0].clone());
        }
        let coeffs: Vec<C> = (0..*m).map(|j| h[*m - 1 - j].clone()).collect();
        out.push(PoleTerm { pole: beta.clone(), coeffs });
    }
    out
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigInt::from(i));
            if i * i != n {
                out.push(BigInt::from(n / i));
            }
        }
        i += 1;
    }
    Some(out)
}

/// All roots with multiplicity when `p` splits into linear factors over ℚ.
pub fn rational_roots(p: &RatPoly) -> Option<Vec<(BigRational, usize)>> {
    let mut rest = p.clone();
    let mut out: Vec<(BigRational, usize)> = Vec::new();
    while rest.degree()? > 0 {
        // Integer coefficients, then rational-root candidates ±u/v.
        let lcm = rest.0.iter().fold(BigInt::one(), |l, c| num::integer::lcm(l, c.denom().clone()));
        let ints: Vec<BigInt> =
            rest.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        if ints[0].is_zero() {
            let zero = BigRational::zero();
            rest = rest.divrem(&RatPoly::new(vec![BigRational::zero(), BigRational::one()])).0;
            match out.iter_mut().find(|(r, _)| *r == zero) {
                Some(e) => e.1 += 1,
                None => out.push((zero, 1)),
            }
            continue;
        }
        let us = divisors(&ints[0])?;
        let vs = divisors(ints.last().unwrap())?;
        let mut found = None;
        'search: for u in &us {
            for v in &vs {
                for s in [1, -1] {
                    let cand = BigRational::new(u * BigInt::from(s), v.clone());
                    if rest.eval(&cand).is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        let root = found?;
        rest = rest.divrem(&RatPoly::new(vec![-root.clone(), BigRational::one()])).0;
        match out.iter_mut().find(|(r, _)| *r == root) {
            Some(e) => e.1 += 1,
            None => out.push((root, 1)),
        }
    }
    Some(out)
}

/// Partial-fraction expansion of a rational function.
pub fn pole_expansion(f: &RationalFunction) -> PoleExpansion {
    let (poly, rem) = f.numerator.divrem(&f.denominator);
    let den = &f.denominator;
    let exact = rational_roots(den).map(|roots| principal_parts(&rem.0, &den.0, &roots));
    // Floating roots grouped by multiplicity through the square-free split.
    let mut croots: Vec<(Complex64, usize)> = Vec::new();
    for (m, factor) in den.square_free() {
        for z in factor.roots() {
            croots.push((z, m));
        }
    }
    let cnum: Vec<Complex64> = rem.0.iter().map(Complex64::from_rational).collect();
    let cden: Vec<Complex64> = den.0.iter().map(Complex64::from_rational).collect();
    let terms = principal_parts(&cnum, &cden, &croots);
    PoleExpansion { polynomial: poly, exact, terms }
}

/// Pole-law transfer for a rational channel with period `d` and residue `r`.
///
/// The dominant poles are those of smallest modulus `R'`; the reported
/// constant is `D_{−M} = d·c_M·d^{M−1}/(M−1)!·R'^{−r}` for a `ζ_d`-orbit of
/// order-`M` poles. Poles of the same modulus off that orbit are flagged.
/// `epsilon` is half the gap to the next pole modulus.
pub fn transfer_pole(f: &RationalFunction, d: u64, r: u64, pair: String) -> (AsymptoticResult, PoleExpansion, f64) {
    let exp = pole_expansion(f);
    let mut flags = Vec::new();
    if exp.terms.is_empty() {
        let degree = f.numerator.degree().unwrap_or(0);
        let res = AsymptoticResult {
            pair,
            channel: Channel::Restricted,
            d,
            r,
            radius: f64::INFINITY,
            constant: 0.0,
            c1: None,
            law: Law::Polynomial { degree },
            amplitude: None,
            flags,
        };
        return (res, exp, f64::INFINITY);
    }
    let rmin = exp.terms.iter().map(|t| t.pole.norm()).fold(f64::INFINITY, f64::min);
    let close = |x: f64| (x - rmin).abs() <= 1e-9 * rmin;
    let dominant: Vec<&PoleTerm<Complex64>> = exp.terms.iter().filter(|t| close(t.pole.norm())).collect();
    let order = dominant.iter().map(|t| t.coeffs.len()).max().unwrap();
    let next = exp.terms.iter().map(|t| t.pole.norm()).filter(|&x| !close(x)).fold(f64::INFINITY, f64::min);
    let epsilon = if next.is_finite() { 0.5 * (next - rmin) } else { f64::INFINITY };
    let on_orbit = |z: Complex64| {
        let w = (z / rmin).powu(d as u32);
        (w - Complex64::one()).norm() < 1e-7
    };
    if dominant.iter().any(|t| !on_orbit(t.pole)) {
        flags.push("dominant poles off the period orbit (multi-pole law)".into());
    }
    let real = dominant.iter().find(|t| (t.pole - Complex64::new(rmin, 0.0)).norm() < 1e-7 * rmin);
    let cm = real.and_then(|t| t.coeffs.get(order - 1)).map(|c| c.re).unwrap_or(f64::NAN);
    let fact: f64 = (1..order).map(|i| i as f64).product();
    let constant = d as f64 * cm * (d as f64).powi(order as i32 - 1) / fact * rmin.powi(-(r as i32));
    let res = AsymptoticResult {
        pair,
        channel: Channel::Restricted,
        d,
        r,
        radius: rmin,
        constant,
        c1: None,
        law: Law::Pole { order, r_prime: rmin },
        amplitude: None,
        flags,
    };
    (res, exp, epsilon)
}

/// Regression of exact coefficients against the square-root law.
#[derive(Clone, Debug)]
pub struct OracleFit {
    pub c_hat: f64,
    pub c1_hat: f64,
    /// `C` refitted after dropping the lowest quarter of the window.
    pub c_hat_upper: f64,
    /// Relative change between the two fits.
    pub drift: f64,
    /// Max relative residual of the full fit.
    pub residual: f64,
    /// Exponent from a free fit `log(a·R^{dn}) = log C − β·log n + c/n`.
    pub beta: f64,
    pub stable: bool,
}

fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = rows[0].len();
    let a = nalgebra::DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
    let yv = nalgebra::DVector::from_column_slice(y);
    let ata = a.transpose() * &a;
    let aty = a.transpose() * yv;
    solve(&ata, &aty).map(|x| x.iter().cloned().collect())
}

/// Fit `a_{dn+r}·R^{dn}·n^{3/2} ≈ C·(1 + c₁/n + … + c_{m−1}/n^{m−1})` with
/// `m = terms` over `n ∈ ns`. `coeffs[t]` is the coefficient of `z^t`.
pub fn oracle_fit(
    coeffs: &[BigRational],
    d: u64,
    r: u64,
    radius: f64,
    ns: std::ops::RangeInclusive<usize>,
    terms: usize,
) -> Result<OracleFit> {
    let d = d as usize;
    let r = r as usize;
    let pts: Vec<(f64, f64)> = ns
        .clone()
        .map(|n| {
            let t = d * n + r;
            let a = coeffs.get(t).ok_or_else(|| Error::Argument(format!("coefficient {t} not available")))?;
            Ok((n as f64, rat_to_f64(a)))
        })
        .collect::<Result<_>>()?;
    if pts.iter().any(|(_, a)| a.is_nan() || *a <= 0.0) {
        return Err(Error::Numeric("non-positive coefficient inside the fit window".into()));
    }
    let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, a)| (n, a * radius.powf(d as f64 * n) * n.powf(1.5))).collect();
    let fit = |sub: &[(f64, f64)]| -> Option<Vec<f64>> {
        let rows: Vec<Vec<f64>> = sub.iter().map(|(n, _)| (0..terms).map(|p| n.powi(-(p as i32))).collect()).collect();
        let y: Vec<f64> = sub.iter().map(|(_, s)| *s).collect();
        least_squares(&rows, &y)
    };
    let full = fit(&scaled).ok_or_else(|| Error::Numeric("degenerate fit".into()))?;
    let quarter = scaled.len() / 4;
    let upper = fit(&scaled[quarter..]).ok_or_else(|| Error::Numeric("degenerate fit".into()))?;
    let residual = scaled
        .iter()
        .map(|(n, s)| (full.iter().enumerate().map(|(p, c)| c * n.powi(-(p as i32))).sum::<f64>() - s).abs() / s)
        .fold(0.0, f64::max);
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|(n, _)| {
            let mut row = vec![1.0, n.ln()];
            row.extend((1..terms).map(|p| n.powi(-(p as i32))));
            row
        })
        .collect();
    let y: Vec<f64> = pts.iter().map(|&(n, a)| (a * radius.powf(d as f64 * n)).ln()).collect();
    let free = least_squares(&rows, &y).ok_or_else(|| Error::Numeric("degenerate fit".into()))?;
    let drift = (upper[0] - full[0]).abs() / full[0].abs();
    Ok(OracleFit {
        c_hat: full[0],
        c1_hat: full[1] / full[0],
        c_hat_upper: upper[0],
        drift,
        residual,
        beta: -free[1],
        stable: drift < 0.01 && full[0] > 0.0,
    })
}
