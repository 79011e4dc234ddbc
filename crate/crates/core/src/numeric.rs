//! Floating-point helpers shared by the Newton solver and the path trackers.
//!
//! Dense linear algebra is delegated to `nalgebra`; routines here are generic
//! over real (`f64`) and complex (`Complex64`) scalars through [`Scalar`].

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector};
pub use num_complex::Complex64;

/// Field scalar with `f64` as its real type.
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    fn of_f64(v: f64) -> Self {
        Self::from_real(v)
    }

    /// Embeds a complex number, discarding the imaginary part for real scalars.
    fn from_complex(z: Complex64) -> Self;

    fn to_complex(self) -> Complex64 {
        Complex64::new(ComplexField::real(self), self.imaginary())
    }
}

impl Scalar for f64 {
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
}

impl Scalar for Complex64 {
    fn from_complex(z: Complex64) -> Self {
        z
    }
}

pub fn norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|z| z.modulus_squared()).sum::<f64>().sqrt()
}

pub fn max_abs<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|z| z.modulus()).fold(0.0, f64::max)
}

/// Solves the square system `m * x = rhs` by LU with partial pivoting.
pub fn lu_solve<T: Scalar>(m: DMatrix<T>, rhs: &[T]) -> Option<Vec<T>> {
    let lu = m.lu();
    let x = lu.solve(&DVector::from_column_slice(rhs))?;
    x.iter().all(|z| z.is_finite()).then(|| x.as_slice().to_vec())
}

/// Smallest singular value of `m`.
pub fn smallest_singular_value<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Minimum-norm correction of `q` onto `{q : m q = rhs}` for a full-row-rank
/// `m`: returns `q + m^H (m m^H)^{-1} (rhs - m q)`.
pub fn project_affine<T: Scalar>(m: &DMatrix<T>, rhs: &[T], q: &[T]) -> Option<Vec<T>> {
    let qv = DVector::from_column_slice(q);
    let r = DVector::from_column_slice(rhs) - m * &qv;
    let adj = m.adjoint();
    let w = lu_solve(m * &adj, r.as_slice())?;
    let out = qv + adj * DVector::from_vec(w);
    Some(out.as_slice().to_vec())
}

/// Numerical rank from singular values relative to the largest one.
pub fn numerical_rank<T: Scalar>(m: &DMatrix<T>, rel_tol: f64) -> usize {
    let s = m.clone().singular_values();
    let top = s.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * top).count()
}

/// Cholesky factorization test for a real symmetric matrix.
pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.clone().cholesky().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_solve_roundtrip() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, -1.0), Complex64::new(3.0, 1.0)],
        );
        let x = [Complex64::new(0.25, -1.0), Complex64::new(2.0, 0.5)];
        let rhs = &m * DVector::from_column_slice(&x);
        let got = lu_solve(m, rhs.as_slice()).unwrap();
        assert!(got.iter().zip(&x).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn singular_solve_is_none() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(lu_solve(m, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn projection_lands_on_subspace() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let q = project_affine(&m, &[3.0], &[0.0, 0.0, 0.0]).unwrap();
        assert!(q.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rank_and_definiteness() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0]);
        assert_eq!(numerical_rank(&m, 1e-12), 2);
        assert!(smallest_singular_value(&m) < 1e-12);
        let spd = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert!(is_positive_definite(&spd));
        assert!(!is_positive_definite(&(-spd)));
    }
}
