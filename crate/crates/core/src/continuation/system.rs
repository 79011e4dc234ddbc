use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{Signed, Zero};

use crate::exact::{ln_abs, to_f64_vec, ExactMatrix};
use crate::numeric::{Complex64, Scalar};
use crate::poly::CompiledPoly;
use crate::polytope::FiberProblem;
use crate::volume::DualVolume;
use crate::{Error, Result};

/// The square system
///
/// ```text
/// F(x; u, r) = [ B_C^T (u_0 d_i alpha / alpha - u_i / x_i)_{i in F_C} ]
///              [ L x - r                                           ]
/// ```
///
/// in `n` unknowns. The parameter vector is laid out as
/// `p = (u_0, u_{F_C}, r)` of length `1 + n_C + d`. With `u = 1`, `L = A` and
/// `r = b` the zeros are the critical points of `log V_C` on `{Ax = b}`.
#[derive(Debug, Clone)]
pub struct ParametricSystem {
    n: usize,
    d: usize,
    support: Vec<usize>,
    /// `B` as `n` rows of length `n - d`.
    kernel: Vec<Vec<f64>>,
    /// `B` with unit columns, used in the equations.
    basis: Vec<Vec<f64>>,
    /// `alpha_C / c` with `c` the largest coefficient magnitude, so that
    /// complex evaluation does not overflow for large exact coefficients.
    alpha: CompiledPoly,
    /// `ln c`.
    alpha_ln_scale: f64,
    /// `L`, `d` rows of length `n`.
    slice: Vec<Vec<Complex64>>,
    /// Row norms of `L`; the slice equations are evaluated as
    /// `(L x - r)_l / |L_l|` so both blocks have comparable scale.
    slice_scale: Vec<f64>,
}

fn normalized_adjoint(dv: &DualVolume) -> (CompiledPoly, f64) {
    let top = dv.numerator().terms().map(|(_, c)| c.abs()).max();
    match top {
        Some(c) if !c.is_zero() => (dv.numerator().scale(&c.recip()).compile(), ln_abs(&c)),
        _ => (dv.compiled().clone(), 0.0),
    }
}

fn unit_columns(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    for j in 0..cols {
        let s = rows.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
        if s > 0.0 {
            rows.iter_mut().for_each(|r| r[j] /= s);
        }
    }
    rows
}

fn row_norms(slice: &[Vec<Complex64>]) -> Vec<f64> {
    slice.iter().map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE)).collect()
}

/// Values and derivatives of [`ParametricSystem`] at one point.
#[derive(Debug, Clone)]
pub struct Evaluation<T: Scalar> {
    pub f: Vec<T>,
    /// `dF/dx`, `n x n`.
    pub jx: DMatrix<T>,
    /// `dF/dp`, `n x (1 + n_C + d)`.
    pub jp: DMatrix<T>,
}

impl ParametricSystem {
    /// Likelihood system of the fiber: slice `L = A`, kernel basis of `fp`.
    pub fn likelihood(fp: &FiberProblem, dv: &DualVolume) -> Self {
        Self::new(fp.a(), fp.kernel(), dv)
    }

    /// System of the dual-volume function `dv` for the matrix `a` with kernel
    /// basis `kernel` (`n x (n - d)`), sliced by `L = A`.
    pub fn new(a: &ExactMatrix, kernel: &ExactMatrix, dv: &DualVolume) -> Self {
        let (alpha, alpha_ln_scale) = normalized_adjoint(dv);
        let slice: Vec<Vec<Complex64>> =
            a.to_f64_rows().iter().map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect()).collect();
        Self {
            slice_scale: row_norms(&slice),
            n: a.cols(),
            d: a.rows(),
            support: dv.support().to_vec(),
            basis: unit_columns(kernel.to_f64_rows()),
            kernel: kernel.to_f64_rows(),
            alpha,
            alpha_ln_scale,
            slice,
        }
    }

    /// Replaces `L` by another `d x n` matrix.
    pub fn with_slice(mut self, slice: Vec<Vec<Complex64>>) -> Result<Self> {
        if slice.len() != self.d || slice.iter().any(|r| r.len() != self.n) {
            return Err(Error::Dimension("slice must be d x n".into()));
        }
        self.slice_scale = row_norms(&slice);
        self.slice = slice;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.n - self.d
    }

    pub fn n_c(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn slice(&self) -> &[Vec<Complex64>] {
        &self.slice
    }

    /// The adjoint scaled to largest coefficient magnitude 1.
    pub fn alpha(&self) -> &CompiledPoly {
        &self.alpha
    }

    pub fn parameter_len(&self) -> usize {
        1 + self.n_c() + self.d
    }

    /// Parameters `(u, r)` with `u = 1`.
    pub fn unit_parameters<T: Scalar>(&self, r: &[T]) -> Vec<T> {
        let mut p = vec![T::one(); 1 + self.n_c()];
        p.extend_from_slice(r);
        p
    }

    /// Bézout-type bound `(2 n_C - n + d - 1)^(n - d)` on the solution count.
    pub fn bezout_bound(&self) -> u64 {
        let base = 2 * self.n_c() as i64 - self.n as i64 + self.d as i64 - 1;
        (base.max(0) as u64).pow(self.m() as u32)
    }

    fn slice_row<T: Scalar>(&self, l: usize) -> impl Iterator<Item = T> + '_ {
        let s = self.slice_scale[l];
        self.slice[l].iter().map(move |&z| T::from_complex(z / s))
    }

    pub fn evaluate<T: Scalar>(&self, x: &[T], p: &[T]) -> Evaluation<T> {
        let n = self.n;
        let m = self.m();
        let nc = self.n_c();
        let (alpha, g, h) = self.alpha.derivatives(x, true);
        let u0 = p[0];
        let mut f = vec![T::zero(); n];
        let mut jx = DMatrix::zeros(n, n);
        let mut jp = DMatrix::zeros(n, self.parameter_len());
        let ga: Vec<T> = g.iter().map(|&gi| gi / alpha).collect();
        for (k, &i) in self.support.iter().enumerate() {
            let uk = p[1 + k];
            let e = u0 * ga[i] - uk / x[i];
            // d e / d x_j
            let mut de = vec![T::zero(); n];
            for (j, dej) in de.iter_mut().enumerate() {
                *dej = u0 * (h[i * n + j] / alpha - ga[i] * ga[j]);
            }
            de[i] += uk / (x[i] * x[i]);
            for row in 0..m {
                let bij = T::of_f64(self.basis[i][row]);
                if bij == T::zero() {
                    continue;
                }
                f[row] += bij * e;
                for j in 0..n {
                    jx[(row, j)] += bij * de[j];
                }
                jp[(row, 0)] += bij * ga[i];
                jp[(row, 1 + k)] -= bij / x[i];
            }
        }
        for l in 0..self.d {
            let row = m + l;
            let inv = T::of_f64(1.0 / self.slice_scale[l]);
            let mut acc = -p[1 + nc + l] * inv;
            for (j, lj) in self.slice_row::<T>(l).enumerate() {
                acc += lj * x[j];
                jx[(row, j)] = lj;
            }
            f[row] = acc;
            jp[(row, 1 + nc + l)] = -inv;
        }
        Evaluation { f, jx, jp }
    }

    pub fn residual<T: Scalar>(&self, x: &[T], p: &[T]) -> Vec<T> {
        self.evaluate(x, p).f
    }

    /// Largest row residual after clearing denominators (multiplying the
    /// first block by `alpha x_{F_C}`), relative to the magnitudes of the
    /// cleared terms.
    pub fn relative_residual<T: Scalar>(&self, x: &[T], p: &[T]) -> f64 {
        let m = self.m();
        let nc = self.n_c();
        let (alpha, g) = self.alpha.gradient(x);
        let f = self.residual(x, p);
        let mut worst: f64 = 0.0;
        for (row, fr) in f.iter().enumerate().take(m) {
            let mut scale = 0.0;
            for (k, &i) in self.support.iter().enumerate() {
                let bij = self.basis[i][row].abs();
                scale += bij * ((p[0] * g[i] / alpha).modulus() + (p[1 + k] / x[i]).modulus());
            }
            worst = worst.max(fr.modulus() / scale.max(f64::MIN_POSITIVE));
        }
        for l in 0..self.d {
            let mut scale = p[1 + nc + l].modulus() / self.slice_scale[l];
            for (j, lj) in self.slice_row::<T>(l).enumerate() {
                scale += (lj * x[j]).modulus();
            }
            worst = worst.max(f[m + l].modulus() / scale.max(f64::MIN_POSITIVE));
        }
        worst
    }

    /// Distance-like measure to the divisor `{alpha prod x_i = 0}`: the
    /// smaller of `|alpha(x)|` relative to its term magnitudes and
    /// `min |x_i| / max |x_j|` over `F_C`.
    pub fn divisor_measure<T: Scalar>(&self, x: &[T]) -> f64 {
        let alpha = self.alpha.value(x).modulus();
        let scale = self.alpha.abs_value(x);
        let rel_alpha = if scale > 0.0 { alpha / scale } else { 0.0 };
        let top = x.iter().map(|z| z.modulus()).fold(0.0, f64::max);
        let low = self.support.iter().map(|&i| x[i].modulus()).fold(f64::INFINITY, f64::min);
        rel_alpha.min(if top > 0.0 { low / top } else { 0.0 })
    }

    /// The `(n - d) x (1 + n_C)` matrix `M(x)` of the system (with the
    /// columns of `B` normalized), which is linear
    /// in `u`: the first block of `F` equals `M(x) u`.
    pub fn likelihood_matrix<T: Scalar>(&self, x: &[T]) -> DMatrix<T> {
        let m = self.m();
        let (alpha, g) = self.alpha.gradient(x);
        let mut mat = DMatrix::zeros(m, 1 + self.n_c());
        for (k, &i) in self.support.iter().enumerate() {
            for row in 0..m {
                let bij = T::of_f64(self.basis[i][row]);
                mat[(row, 0)] += bij * g[i] / alpha;
                mat[(row, 1 + k)] -= bij / x[i];
            }
        }
        mat
    }

    /// `log V_C(x)` and `|B^T grad log V_C(x)|` for a positive real point.
    pub fn objective(&self, x: &[f64]) -> (f64, f64) {
        let (alpha, g) = self.alpha.gradient(x);
        let mut value = alpha.ln() + self.alpha_ln_scale;
        let mut grad: Vec<f64> = g.iter().map(|gi| gi / alpha).collect();
        for &i in &self.support {
            value -= x[i].ln();
            grad[i] -= 1.0 / x[i];
        }
        let m = self.m();
        let norm = (0..m)
            .map(|row| (0..self.n).map(|i| self.kernel[i][row] * grad[i]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt();
        (value, norm)
    }

    /// `B^T x`.
    pub fn project<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        (0..self.m())
            .map(|row| (0..self.n).fold(T::zero(), |acc, i| acc + T::of_f64(self.kernel[i][row]) * x[i]))
            .collect()
    }
}

/// Real parameters `(1, b)` for the Santaló system of a fiber.
pub fn real_rhs(fp: &FiberProblem) -> Vec<f64> {
    to_f64_vec(fp.b())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::pentagon;
    use crate::numeric::norm;

    fn pentagon_system() -> ParametricSystem {
        let fp = pentagon();
        let dv = DualVolume::for_fiber(&fp).unwrap();
        ParametricSystem::likelihood(&fp, &dv)
    }

    fn point() -> (Vec<Complex64>, Vec<Complex64>) {
        let x = (0..5).map(|i| Complex64::new(0.2 + 0.03 * i as f64, 0.05 - 0.02 * i as f64)).collect();
        let p = (0..9).map(|i| Complex64::new(1.0 - 0.1 * i as f64, 0.07 * i as f64)).collect();
        (x, p)
    }

    #[test]
    fn jacobians_match_central_differences() {
        let ps = pentagon_system();
        let (x, p) = point();
        let ev = ps.evaluate(&x, &p);
        let h = 1e-6;
        for j in 0..5 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (ps.residual(&xp, &p), ps.residual(&xm, &p));
            for i in 0..5 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!((fd - ev.jx[(i, j)]).norm() <= 1e-6 * (1.0 + fd.norm()), "x {i} {j}");
            }
        }
        for j in 0..ps.parameter_len() {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp[j] += h;
            pm[j] -= h;
            let (fp, fm) = (ps.residual(&x, &pp), ps.residual(&x, &pm));
            for i in 0..5 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!((fd - ev.jp[(i, j)]).norm() <= 1e-6 * (1.0 + fd.norm()), "p {i} {j}");
            }
        }
    }

    #[test]
    fn parameter_jacobian_is_constant_in_parameters() {
        let ps = pentagon_system();
        let (x, p) = point();
        let q: Vec<Complex64> = p.iter().map(|z| z * Complex64::new(-0.3, 2.0) + 1.0).collect();
        let (a, b) = (ps.evaluate(&x, &p).jp, ps.evaluate(&x, &q).jp);
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn unit_parameters_at_santalo_point() {
        let fp = pentagon();
        let ps = pentagon_system();
        let x = crate::santalo::santalo_point(&fp, 1e-13).unwrap().x_star;
        let p = ps.unit_parameters(&real_rhs(&fp));
        assert!(norm(&ps.residual(&x, &p)) < 1e-12);
        assert!(ps.relative_residual(&x, &p) < 1e-12);
        // (2 n_C - n + d - 1)^(n - d) with n_C = n = 5, d = 3.
        assert_eq!(ps.bezout_bound(), 49);
    }
}
