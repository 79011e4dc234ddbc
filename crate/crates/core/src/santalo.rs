//! Santaló points by damped Newton minimization of `log V_C` on `{Ax = b}`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::exact::{to_f64_vec, ExactMatrix};
use crate::polytope::{hrep_to_fiber, FiberProblem, HRep};
use crate::volume::DualVolume;
use crate::{Error, Result};

/// Outcome of a Santaló point computation.
#[derive(Debug, Clone, PartialEq)]
pub struct SantaloResult {
    /// Minimizer on the fiber, strictly positive.
    pub x_star: Vec<f64>,
    /// The same point in `y` coordinates (`B^T x` for a fiber, the original
    /// coordinates for a facet representation).
    pub y_star: Vec<f64>,
    /// `log V_C(x_star)`.
    pub objective: f64,
    /// `|B^T grad log V_C(x_star)|`.
    pub gradient_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop once the projected gradient norm is at most this.
    pub tol: f64,
    pub max_iterations: usize,
    /// Every coordinate keeps at least this fraction of its current value in
    /// one step.
    pub boundary_fraction: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iterations: 200, boundary_fraction: 0.05 }
    }
}

impl NewtonOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Santaló point of the fiber `P_b`, which must be full-dimensional and simple.
pub fn santalo_point(fp: &FiberProblem, tol: f64) -> Result<SantaloResult> {
    let dv = DualVolume::for_fiber(fp)?;
    santalo_point_with(fp, &dv, &NewtonOptions::with_tol(tol))
}

/// Minimizes the given dual-volume function over `P_b`. Passing the function
/// of an adjacent cell is how fibers at chamber walls are handled.
pub fn santalo_point_with(fp: &FiberProblem, dv: &DualVolume, opts: &NewtonOptions) -> Result<SantaloResult> {
    if !(opts.tol > 0.0) || !(opts.boundary_fraction > 0.0 && opts.boundary_fraction < 1.0) {
        return Err(Error::InvalidInput("tolerance and boundary fraction must be positive".into()));
    }
    let vd = fp.vertex_data()?;
    if !vd.is_full_dimensional() {
        return Err(Error::NotFullDimensional { dimension: vd.dimension, expected: fp.m() });
    }
    let start = to_f64_vec(&vd.barycenter());
    minimize(dv, fp.kernel(), start, opts)
}

fn kernel_f64(kernel: &ExactMatrix) -> DMatrix<f64> {
    let rows = kernel.to_f64_rows();
    DMatrix::from_fn(kernel.rows(), kernel.cols(), |i, j| rows[i][j])
}

/// Damped Newton iteration in the coordinates `x = x_k + B z`.
pub(crate) fn minimize(
    dv: &DualVolume,
    kernel: &ExactMatrix,
    mut x: Vec<f64>,
    opts: &NewtonOptions,
) -> Result<SantaloResult> {
    let n = x.len();
    let b = kernel_f64(kernel);
    let bt = b.transpose();
    let (mut f, mut g, mut h) = dv.log_eval(&x)?;
    for iteration in 0..=opts.max_iterations {
        let grad = DVector::from_column_slice(&g);
        let reduced = &bt * &grad;
        let gradient_norm = reduced.norm();
        if gradient_norm <= opts.tol {
            return Ok(SantaloResult {
                y_star: (&bt * DVector::from_column_slice(&x)).as_slice().to_vec(),
                x_star: x,
                objective: f,
                gradient_norm,
                iterations: iteration,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }
        let hess = DMatrix::from_row_slice(n, n, &h);
        let reduced_hess = &bt * hess * &b;
        let dz = match reduced_hess.cholesky() {
            Some(ch) => -ch.solve(&reduced),
            None => -reduced.clone(),
        };
        let dx = &b * &dz;
        let slope = grad.dot(&dx);
        let decrement = -reduced.dot(&dz);

        let mut alpha: f64 = 1.0;
        for i in 0..n {
            if dx[i] < 0.0 {
                alpha = alpha.min((1.0 - opts.boundary_fraction) * x[i] / -dx[i]);
            }
        }
        // Inside the quadratic convergence region the objective change is
        // below rounding, so the full step is taken without a decrease test.
        let local = alpha == 1.0 && decrement < 1e-12;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(xi, di)| xi + alpha * di).collect();
            if let Ok((ft, gt, ht)) = dv.log_eval(&trial) {
                if local || ft <= f + 1e-4 * alpha * slope {
                    accepted = Some((trial, ft, gt, ht));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((xt, ft, gt, ht)) = accepted else {
            return Err(Error::LineSearchFailure { iterations: iteration, gradient_norm, iterate: x });
        };
        x = xt;
        f = ft;
        g = gt;
        h = ht;
    }
    Err(Error::IterationLimit(opts.max_iterations))
}

/// Santaló point of `Q = {W y + c >= 0}`, returned in the original `y`
/// coordinates (`x_star` is the corresponding point of the fiber `W Q + c`).
pub fn santalo_point_hrep(h: &HRep, tol: f64) -> Result<SantaloResult> {
    let emb = hrep_to_fiber(h)?;
    let mut res = santalo_point(&emb.fiber, tol)?;
    res.y_star = emb.to_y_f64(&res.x_star);
    Ok(res)
}

/// The `n - d` values `B^T (d_i alpha / alpha - 1/x_i)_{i in F_C}`, which
/// vanish on the Santaló patch of the cell.
pub fn patch_residual(dv: &DualVolume, kernel: &ExactMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let g = dv.log_gradient(x)?;
    let b = kernel_f64(kernel);
    Ok((b.transpose() * DVector::from_vec(g)).as_slice().to_vec())
}

/// Hessian of `log V_C` restricted to `ker A` (`B^T H B`).
pub fn reduced_hessian(dv: &DualVolume, kernel: &ExactMatrix, x: &[f64]) -> Result<DMatrix<f64>> {
    let (_, _, h) = dv.log_eval(x)?;
    let n = x.len();
    let b = kernel_f64(kernel);
    Ok(b.transpose() * DMatrix::from_row_slice(n, n, &h) * b)
}

/// `|Ax - b|` in floating point.
pub fn fiber_residual(fp: &FiberProblem, x: &[f64]) -> f64 {
    let a = fp.a().to_f64_rows();
    let b = fp.b_f64();
    let r: Vec<f64> =
        a.iter().zip(&b).map(|(row, bi)| row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bi).collect();
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean distance.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer_vec, rat, rational_vec};
    use crate::numeric::is_positive_definite;

    fn pentagon_fiber() -> FiberProblem {
        let a = ExactMatrix::from_integers(&[[1, 1, 1, 1, 1], [2, 1, 0, 1, 0], [1, 2, 0, 0, 1]]);
        let kernel = ExactMatrix::from_integers(&[[5, -4], [-4, 5], [2, 2], [-6, 3], [3, -6]]).scale(&rat(1, 18));
        FiberProblem::with_kernel(a, rational_vec(&[(1, 1), (4, 5), (4, 5)]), kernel).unwrap()
    }

    #[test]
    fn pentagon_santalo_point() {
        let fp = pentagon_fiber();
        let res = santalo_point(&fp, 1e-12).unwrap();
        assert!((res.y_star[0] + 0.00311069).abs() < 1e-6, "{:?}", res.y_star);
        assert!((res.y_star[1] + 0.00311069).abs() < 1e-6);
        let expected = [0.197, 0.197, 0.188, 0.210, 0.210];
        for (x, e) in res.x_star.iter().zip(expected) {
            assert!((x - e).abs() < 1e-3);
        }
        assert!(res.gradient_norm <= 1e-12);
        assert!(fiber_residual(&fp, &res.x_star) <= 1e-12 * 2.0);
        let dv = DualVolume::for_fiber(&fp).unwrap();
        assert!(is_positive_definite(&reduced_hessian(&dv, fp.kernel(), &res.x_star).unwrap()));
    }

    #[test]
    fn symmetric_polygons_center() {
        let square =
            HRep::new(ExactMatrix::from_integers(&[[1, 0], [-1, 0], [0, 1], [0, -1]]), integer_vec(&[1, 1, 1, 1]))
                .unwrap();
        let res = santalo_point_hrep(&square, 1e-12).unwrap();
        assert!(res.y_star.iter().all(|v| v.abs() < 1e-12));
        let triangle =
            HRep::new(ExactMatrix::from_integers(&[[1, 0], [0, 1], [-1, -1]]), integer_vec(&[0, 0, 1])).unwrap();
        let res = santalo_point_hrep(&triangle, 1e-12).unwrap();
        assert!(res.y_star.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12), "{:?}", res.y_star);
    }

    #[test]
    fn segment_patch_line() {
        let a = ExactMatrix::from_integers(&[[2, 1, 0], [0, 1, 2]]);
        let fp = FiberProblem::new(a, integer_vec(&[1, 2])).unwrap();
        let res = santalo_point(&fp, 1e-13).unwrap();
        let x = &res.x_star;
        assert!((2.0 * x[0] - x[1]).abs() < 1e-10);
        let dv = DualVolume::for_fiber(&fp).unwrap();
        let r = patch_residual(&dv, fp.kernel(), &[1.0, 2.0, 0.7]).unwrap();
        assert!(r[0].abs() < 1e-14);
        let off = patch_residual(&dv, fp.kernel(), &[1.0, 1.0, 1.0]).unwrap();
        assert!(off[0].abs() > 0.1);
    }

    #[test]
    fn rejects_bad_start() {
        let fp = pentagon_fiber();
        let dv = DualVolume::for_fiber(&fp).unwrap();
        let opts = NewtonOptions { tol: -1.0, ..NewtonOptions::default() };
        assert!(santalo_point_with(&fp, &dv, &opts).is_err());
    }
}
