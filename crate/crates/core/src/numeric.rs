//! Shared numeric helpers: scalar abstraction, exact univariate polynomials,
//! dense solves and polynomial roots.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Field used by the floating-point evaluators (`f64` or `Complex64`).
pub trait Scalar: nalgebra::ComplexField<RealField = f64> + Copy {
    fn lift(x: f64) -> Self {
        Self::from_real(x)
    }
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Format a float with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.11e}", x)
}

/// Solve `a·x = b` by LU with partial pivoting plus one refinement step.
pub fn solve<T: Scalar>(a: &DMatrix<T>, b: &DVector<T>) -> Option<DVector<T>> {
    let lu = a.clone().lu();
    let mut x = lu.solve(b)?;
    let r = b - a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    if x.iter().all(|v| v.modulus().is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Coefficient field for truncated power series (exact or floating).
pub trait Coeff:
    Clone
    + num::Zero
    + num::One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn from_rational(q: &BigRational) -> Self;
}

impl Coeff for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl Coeff for f64 {
    fn from_rational(q: &BigRational) -> Self {
        rat_to_f64(q)
    }
}

impl Coeff for Complex64 {
    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(rat_to_f64(q), 0.0)
    }
}

/// Product of two series truncated to `n` coefficients.
pub fn ser_mul<T: Coeff>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Reciprocal of a series with nonzero constant term, `n` coefficients.
pub fn ser_inv<T: Coeff>(a: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    if n == 0 {
        return out;
    }
    let a0 = a[0].clone();
    out[0] = T::one() / a0.clone();
    for m in 1..n {
        let mut s = T::zero();
        for i in 1..=m.min(a.len().saturating_sub(1)) {
            s = s + a[i].clone() * out[m - i].clone();
        }
        out[m] = (T::zero() - s) / a0.clone();
    }
    out
}

/// Richardson extrapolation of order `m` for a sequence with an expansion in
/// powers of `1/n`, where `s[i]` is the term of index `n0 + i`:
/// `Σ_j (−1)^{m+j} (n+j)^m s_{n+j} / (j!(m−j)!)` starting at `s[n]`.
pub fn richardson(s: &[f64], n0: usize, n: usize, m: usize) -> f64 {
    let mut acc = 0.0;
    let mut fact = vec![1.0f64; m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1] * i as f64;
    }
    for j in 0..=m {
        let sign = if (m + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let nn = (n0 + n + j) as f64;
        acc += sign * nn.powi(m as i32) * s[n + j] / (fact[j] * fact[m - j]);
    }
    acc
}

/// Dense univariate polynomial with exact rational coefficients, lowest
/// degree first; always trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly(c)
    }

    pub fn zero() -> Self {
        RatPoly(Vec::new())
    }

    pub fn one() -> Self {
        RatPoly(vec![BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.0.len().max(o.0.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.0.len().max(o.0.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, s: &BigRational) -> RatPoly {
        RatPoly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }

    pub fn truncate(&self, n: usize) -> RatPoly {
        RatPoly::new(self.0.iter().take(n).cloned().collect())
    }

    /// Euclidean division.
    pub fn divrem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.0.len() - 1;
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let f = &r[i + dd] / &lead;
            if !f.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[i + j] -= &f * dc;
                }
            }
            q[i] = f;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn monic(&self) -> RatPoly {
        match self.0.last() {
            None => RatPoly::zero(),
            Some(l) => self.scale(&(BigRational::one() / l)),
        }
    }

    pub fn gcd(&self, o: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rat_to_f64(c))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }

    /// Yun's square-free decomposition: `self = c · Π fᵢ^i`, returned as
    /// `(i, fᵢ)` with non-constant monic `fᵢ`.
    pub fn square_free(&self) -> Vec<(usize, RatPoly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.divrem(&a).0;
        let mut c = df.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a.clone()));
            }
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Human-readable form in the variable `z`, e.g. `1/3*z - 2*z^2`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{i}"),
            };
            let coef = if c.is_one() && i > 0 { String::new() } else { format!("{c}") };
            parts.push(match (coef.is_empty(), mono.is_empty()) {
                (true, _) => mono,
                (false, true) => coef,
                (false, false) => format!("{coef}*{mono}"),
            });
        }
        parts.join(" + ")
    }

    /// Roots via the companion matrix, polished by Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        let c = self.monic().to_f64();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -c[i];
        }
        let dp = self.derivative();
        m.complex_eigenvalues()
            .iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..8 {
                    let d = dp.eval_c(z);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval_c(z) / d;
                    if !step.norm().is_finite() {
                        break;
                    }
                    z -= step;
                }
                z
            })
            .collect()
    }
}

/// Exact characteristic polynomial `det(λI − M)` by Faddeev–LeVerrier.
pub fn charpoly(m: &[Vec<BigRational>]) -> RatPoly {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = M·M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    if !m[i][l].is_zero() && !mk[l][j].is_zero() {
                        s += &m[i][l] * &mk[l][j];
                    }
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                if !m[i][l].is_zero() && !mk[l][i].is_zero() {
                    tr += &m[i][l] * &mk[l][i];
                }
            }
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    RatPoly::new(coeffs)
}

/// Greatest common divisor of machine integers, for small bookkeeping.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

pub fn is_nonnegative(q: &BigRational) -> bool {
    !q.is_negative()
}
