//! Sparse polynomial maps with nonnegative rational coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num::{BigRational, Zero};

use crate::numeric::{rat_to_f64, Scalar};

/// `coeff · Π J[v]` over the sorted multiset `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: BigRational,
    pub vars: Vec<usize>,
}

/// A polynomial map `ψ: Eⁿ → Eⁿ`, one constant and monomial list per
/// coordinate. Monomials are kept sorted by their variable multiset, so two
/// systems are equal iff they are equal as polynomial maps.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    pub labels: Vec<String>,
    pub constants: Vec<BigRational>,
    pub monomials: Vec<Vec<Monomial>>,
    constants_f64: Vec<f64>,
    coeffs_f64: Vec<Vec<f64>>,
}

impl PolySystem {
    /// Assemble from per-coordinate constant and raw `(coeff, vars)` terms;
    /// equal monomials are merged and zero coefficients dropped.
    pub fn new(labels: Vec<String>, constants: Vec<BigRational>, terms: Vec<Vec<(BigRational, Vec<usize>)>>) -> Self {
        let monomials: Vec<Vec<Monomial>> = terms
            .into_iter()
            .map(|row| {
                let mut merged: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
                for (c, mut v) in row {
                    v.sort_unstable();
                    *merged.entry(v).or_insert_with(BigRational::zero) += c;
                }
                merged.into_iter().filter(|(_, c)| !c.is_zero()).map(|(vars, coeff)| Monomial { coeff, vars }).collect()
            })
            .collect();
        let constants_f64 = constants.iter().map(rat_to_f64).collect();
        let coeffs_f64 = monomials.iter().map(|r| r.iter().map(|m| rat_to_f64(&m.coeff)).collect()).collect();
        PolySystem { labels, constants, monomials, constants_f64, coeffs_f64 }
    }

    pub fn dim(&self) -> usize {
        self.constants.len()
    }

    /// Largest total degree over all monomials.
    pub fn degree(&self) -> usize {
        self.monomials.iter().flatten().map(|m| m.vars.len()).max().unwrap_or(0)
    }

    /// Coordinates `j` whose polynomial involves `J_i`, for each `i`.
    pub fn dependents(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.dim()];
        for (j, row) in self.monomials.iter().enumerate() {
            for m in row {
                for &i in &m.vars {
                    if out[i].last() != Some(&j) {
                        out[i].push(j);
                    }
                }
            }
        }
        for v in &mut out {
            v.sort_unstable();
            v.dedup();
        }
        out
    }

    fn product<T: Scalar>(j: &[T], vars: &[usize], skip: &[usize]) -> T {
        let mut p = T::one();
        for (pos, &v) in vars.iter().enumerate() {
            if !skip.contains(&pos) {
                p *= j[v];
            }
        }
        p
    }

    /// `ψ(J)`.
    pub fn eval<T: Scalar>(&self, j: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|i| {
                let mut s = T::lift(self.constants_f64[i]);
                for (m, &c) in self.monomials[i].iter().zip(&self.coeffs_f64[i]) {
                    s += T::lift(c) * Self::product(j, &m.vars, &[]);
                }
                s
            })
            .collect()
    }

    /// `ψ(J)` in exact arithmetic.
    pub fn eval_exact(&self, j: &[BigRational]) -> Vec<BigRational> {
        (0..self.dim())
            .map(|i| {
                let mut s = self.constants[i].clone();
                for m in &self.monomials[i] {
                    let mut p = m.coeff.clone();
                    for &v in &m.vars {
                        p *= &j[v];
                    }
                    s += p;
                }
                s
            })
            .collect()
    }

    /// Jacobian `Dψ(J)`, rows indexed by output coordinate.
    pub fn jacobian<T: Scalar>(&self, j: &[T]) -> DMatrix<T> {
        let n = self.dim();
        let mut m = DMatrix::<T>::zeros(n, n);
        for i in 0..n {
            for (mono, &c) in self.monomials[i].iter().zip(&self.coeffs_f64[i]) {
                for (pos, &v) in mono.vars.iter().enumerate() {
                    m[(i, v)] += T::lift(c) * Self::product(j, &mono.vars, &[pos]);
                }
            }
        }
        m
    }

    /// Exact Jacobian.
    pub fn jacobian_exact(&self, j: &[BigRational]) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for mono in &self.monomials[i] {
                for (pos, &v) in mono.vars.iter().enumerate() {
                    let mut p = mono.coeff.clone();
                    for (q, &w) in mono.vars.iter().enumerate() {
                        if q != pos {
                            p *= &j[w];
                        }
                    }
                    m[i][v] += p;
                }
            }
        }
        m
    }

    /// The matrix `D²ψ(J)[h, ·]`.
    pub fn hessian_dir<T: Scalar>(&self, j: &[T], h: &[T]) -> DMatrix<T> {
        let n = self.dim();
        let mut m = DMatrix::<T>::zeros(n, n);
        for i in 0..n {
            for (mono, &c) in self.monomials[i].iter().zip(&self.coeffs_f64[i]) {
                let vars = &mono.vars;
                for p in 0..vars.len() {
                    for q in 0..vars.len() {
                        if p != q {
                            m[(i, vars[p])] += T::lift(c) * h[vars[q]] * Self::product(j, vars, &[p, q]);
                        }
                    }
                }
            }
        }
        m
    }

    /// The vector `D²ψ(J)[h, h]`.
    pub fn second_dir<T: Scalar>(&self, j: &[T], h: &[T]) -> DVector<T> {
        let m = self.hessian_dir(j, h);
        &m * DVector::from_column_slice(h)
    }

    /// Canonical text form: one line per coordinate,
    /// `label: constant + coeff*J[i]*J[j] + …`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            let _ = write!(out, "{} [{}]: {}", i, self.labels[i], self.constants[i]);
            for m in &self.monomials[i] {
                let vars: Vec<String> = m.vars.iter().map(|v| format!("J{v}")).collect();
                let _ = write!(out, " + {}*{}", m.coeff, vars.join("*"));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn quadratic() -> PolySystem {
        // ψ(J) = 1/3 + 2/3 J²
        PolySystem::new(vec!["F".into()], vec![rat(1, 3)], vec![vec![(rat(1, 3), vec![0, 0]), (rat(1, 3), vec![0, 0])]])
    }

    #[test]
    fn merges_equal_monomials() {
        let p = quadratic();
        assert_eq!(p.monomials[0].len(), 1);
        assert_eq!(p.monomials[0][0].coeff, rat(2, 3));
        assert_eq!(p.to_text(), "0 [F]: 1/3 + 2/3*J0*J0\n");
    }

    #[test]
    fn derivatives() {
        let p = quadratic();
        let j = [0.5f64];
        assert!((p.eval(&j)[0] - (1.0 / 3.0 + 2.0 / 3.0 * 0.25)).abs() < 1e-15);
        assert!((p.jacobian(&j)[(0, 0)] - 4.0 / 3.0 * 0.5).abs() < 1e-15);
        assert!((p.hessian_dir(&j, &[1.0])[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.jacobian_exact(&[rat(1, 2)])[0][0], rat(2, 3));
    }
}
