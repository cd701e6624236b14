//! Nonnegative matrices: structural irreducibility and primitivity, the
//! Perron root and vector, and the power asymptotics `M^k ≈ ρ^k·π`.

use nalgebra::{DMatrix, DVector};
use num::{BigRational, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::rat_to_f64;
use crate::path_system::DependencyDigraph;

/// Square matrix with nonnegative exact entries and row/column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<BigRational>>,
}

impl NonnegMatrix {
    pub fn new(labels: Vec<String>, entries: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = entries.len();
        if labels.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Argument("matrix must be square with one label per row".into()));
        }
        if entries.iter().flatten().any(|q| q.is_negative()) {
            return Err(Error::Argument("matrix has a negative entry".into()));
        }
        Ok(NonnegMatrix { labels, entries })
    }

    /// Unlabelled matrix from integer numerators over a common denominator.
    pub fn from_ints(rows: &[&[i64]], den: i64) -> Self {
        let n = rows.len();
        NonnegMatrix {
            labels: (0..n).map(|i| i.to_string()).collect(),
            entries: rows.iter().map(|r| r.iter().map(|&x| crate::numeric::rat(x, den)).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| rat_to_f64(&self.entries[i][j]))
    }

    /// Support pattern.
    pub fn pattern(&self) -> Vec<Vec<bool>> {
        self.entries.iter().map(|r| r.iter().map(|q| !q.is_zero()).collect()).collect()
    }
}

/// Support pattern of a floating matrix (entries above `eps`).
pub fn pattern_f64(m: &DMatrix<f64>, eps: f64) -> Vec<Vec<bool>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] > eps).collect()).collect()
}

/// Irreducible iff the adjacency digraph is strongly connected (a 1×1
/// matrix is irreducible by convention).
pub fn is_irreducible(pattern: &[Vec<bool>]) -> bool {
    let n = pattern.len();
    if n <= 1 {
        return true;
    }
    let mut edges = Vec::new();
    for (i, row) in pattern.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                edges.push((i, j));
            }
        }
    }
    DependencyDigraph::from_edges(n, edges).components.len() == 1
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut c = vec![vec![false; n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l] {
                for j in 0..n {
                    c[i][j] |= b[l][j];
                }
            }
        }
    }
    c
}

/// Primitive iff the Boolean power `M^{(n−1)²+1}` is entrywise positive
/// (Wielandt's bound).
pub fn is_primitive(pattern: &[Vec<bool>]) -> bool {
    let n = pattern.len();
    if n == 0 {
        return false;
    }
    let mut e = (n - 1) * (n - 1) + 1;
    let mut base = pattern.to_vec();
    let mut acc: Option<Vec<Vec<bool>>> = None;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => bool_mul(&a, &base),
            });
        }
        base = bool_mul(&base, &base);
        e >>= 1;
    }
    acc.unwrap().iter().all(|r| r.iter().all(|&b| b))
}

/// Perron root and vector.
#[derive(Clone, Debug)]
pub struct PerronResult {
    pub rho: f64,
    /// Nonnegative eigenvector normalised to unit max entry.
    pub vector: DVector<f64>,
    pub irreducible: bool,
    /// Set when the result carries no positivity guarantee (zero or
    /// reducible matrix).
    pub flagged: bool,
    pub iterations: usize,
}

/// Spectral radius of a nonnegative matrix by power iteration on `M + I`
/// (primitive whenever `M` is irreducible), stopped when the
/// Collatz–Wielandt bounds `min (Bx)ᵢ/xᵢ ≤ ρ(B) ≤ max (Bx)ᵢ/xᵢ` are within
/// `tol`.
pub fn spectral_radius(m: &DMatrix<f64>, tol: f64) -> PerronResult {
    let n = m.nrows();
    let irreducible = is_irreducible(&pattern_f64(m, 0.0));
    if m.iter().all(|&x| x == 0.0) {
        let mut v = DVector::zeros(n);
        if n > 0 {
            v[0] = 1.0;
        }
        return PerronResult { rho: 0.0, vector: v, irreducible, flagged: true, iterations: 0 };
    }
    let b = m + DMatrix::<f64>::identity(n, n);
    let mut x = DVector::from_element(n, 1.0);
    let mut rho = 0.0;
    let max_iter = 200_000;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let y = &b * &x;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            if x[i] > 0.0 {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        let norm = y.amax();
        x = y / norm;
        rho = 0.5 * (lo + hi) - 1.0;
        if hi - lo <= tol * hi.max(1.0) {
            break;
        }
        if !irreducible && it > 5_000 {
            rho = norm - 1.0;
            break;
        }
    }
    PerronResult { rho, vector: x, irreducible, flagged: !irreducible, iterations: it }
}

/// Moduli of all eigenvalues, descending.
pub fn eigen_moduli(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Leading-term data for `M^k ≈ ρ^k·π` with the spectral projector `π`.
#[derive(Clone, Debug)]
pub struct PowerAsymptotics {
    pub rho: f64,
    /// Second largest eigenvalue modulus (`0` when absent).
    pub lambda2: f64,
    pub projector: DMatrix<f64>,
    /// `(k, ‖M^k − ρ^k π‖_max)` over the requested range.
    pub errors: Vec<(usize, f64)>,
    /// Geometric decay rate of the errors over the range, if they are
    /// above round-off.
    pub observed_rate: Option<f64>,
}

/// Verify the Perron–Frobenius power asymptotics of a primitive matrix on
/// `k ∈ ks`.
pub fn power_asymptotics(m: &DMatrix<f64>, ks: std::ops::RangeInclusive<usize>, tol: f64) -> Result<PowerAsymptotics> {
    if !is_primitive(&pattern_f64(m, 0.0)) {
        return Err(Error::Argument("power asymptotics need a primitive matrix".into()));
    }
    let right = spectral_radius(m, tol);
    let left = spectral_radius(&m.transpose(), tol);
    let rho = right.rho;
    let u = &right.vector;
    let w = &left.vector;
    let projector = u * w.transpose() / w.dot(u);
    let moduli = eigen_moduli(m);
    let lambda2 = moduli.get(1).copied().unwrap_or(0.0);
    let mut errors = Vec::new();
    let mut power = DMatrix::<f64>::identity(m.nrows(), m.nrows());
    for k in 1..=*ks.end() {
        power = &power * m;
        if k >= *ks.start() {
            let diff = &power - &projector * rho.powi(k as i32);
            errors.push((k, diff.amax()));
        }
    }
    // Round-off level of the entries of M^k.
    let floor = |k: usize| 1e-13 * rho.powi(k as i32).max(1.0) * projector.amax().max(1.0);
    let observed_rate = match (errors.first(), errors.last()) {
        (Some(&(k1, e1)), Some(&(k2, e2))) if k2 > k1 && e2 > floor(k2) && e1 > floor(k1) => {
            Some((e2 / e1).powf(1.0 / (k2 - k1) as f64))
        }
        _ => None,
    };
    Ok(PowerAsymptotics { rho, lambda2, projector, errors, observed_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_tests() {
        let id = NonnegMatrix::from_ints(&[&[1]], 1);
        assert!(is_irreducible(&id.pattern()) && is_primitive(&id.pattern()));
        let perm = NonnegMatrix::from_ints(&[&[0, 1], &[1, 0]], 1);
        assert!(is_irreducible(&perm.pattern()));
        assert!(!is_primitive(&perm.pattern()));
        let jordan = NonnegMatrix::from_ints(&[&[1, 1], &[0, 1]], 1);
        assert!(!is_irreducible(&jordan.pattern()));
    }

    #[test]
    fn perron_roots() {
        let perm = NonnegMatrix::from_ints(&[&[0, 1], &[1, 0]], 1).to_f64();
        let r = spectral_radius(&perm, 1e-13);
        assert!((r.rho - 1.0).abs() < 1e-12 && !r.flagged);
        let jordan = NonnegMatrix::from_ints(&[&[1, 1], &[0, 1]], 1).to_f64();
        let r = spectral_radius(&jordan, 1e-13);
        assert!((r.rho - 1.0).abs() < 1e-3 && r.flagged);
        assert_eq!(spectral_radius(&DMatrix::zeros(2, 2), 1e-12).rho, 0.0);
    }

    #[test]
    fn rank_one_projector() {
        let m = NonnegMatrix::from_ints(&[&[1, 1], &[1, 1]], 2).to_f64();
        let a = power_asymptotics(&m, 1..=6, 1e-14).unwrap();
        assert!((a.rho - 1.0).abs() < 1e-12);
        assert!(a.lambda2 < 1e-12);
        assert!((&a.projector - &m).amax() < 1e-12);
        assert!(a.errors.iter().all(|&(_, e)| e < 1e-12));
    }
}
