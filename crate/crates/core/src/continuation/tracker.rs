use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::system::ParametricSystem;
use crate::numeric::{lu_solve, norm, Complex64, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerOptions {
    /// First step, as a fraction of the unit path interval.
    pub initial_step: f64,
    /// Step underflow threshold; tracking fails below it.
    pub min_step: f64,
    pub max_step: f64,
    /// Relative Newton update size at which the corrector stops.
    pub corrector_tol: f64,
    pub max_corrector_iterations: usize,
    pub max_steps: usize,
    pub seed: u64,
    /// Monodromy stops after this many consecutive loops without new solutions.
    pub stale_loops: usize,
    /// ... and at least this many tracked paths in those loops, so that
    /// small solution sets still get enough chances.
    pub stale_paths: usize,
    /// Total loop budget for one monodromy run.
    pub max_loops: usize,
}

impl Default for TrackerOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.02,
            min_step: 1e-14,
            max_step: 0.05,
            corrector_tol: 1e-10,
            max_corrector_iterations: 3,
            max_steps: 20_000,
            seed: 0,
            stale_loops: 20,
            stale_paths: 200,
            max_loops: 500,
        }
    }
}

impl TrackerOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min_step > 0.0
            && self.initial_step >= self.min_step
            && self.max_step >= self.initial_step
            && self.max_step <= 1.0
            && self.corrector_tol > 0.0
            && self.max_corrector_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("tracker steps and tolerances must be positive and ordered".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predictor {
    Euler,
    RungeKutta4,
}

/// The parameter path `p(t) = start + tau(t) (end - start)`, `t in [0, 1]`,
/// with `tau(t) = gamma t / (1 + (gamma - 1) t)`. For `gamma = 1` this is the
/// straight segment; a random complex `gamma` bends it into an arc that
/// avoids the real discriminant points with probability one.
#[derive(Debug, Clone)]
pub struct ParameterPath<T: Scalar> {
    pub start: Vec<T>,
    pub end: Vec<T>,
    pub gamma: Complex64,
}

impl<T: Scalar> ParameterPath<T> {
    pub fn segment(start: Vec<T>, end: Vec<T>) -> Self {
        Self { start, end, gamma: Complex64::new(1.0, 0.0) }
    }

    fn tau(&self, t: f64) -> (T, T) {
        let g = self.gamma;
        let den = Complex64::new(1.0, 0.0) + (g - 1.0) * t;
        (T::from_complex(g * t / den), T::from_complex(g / (den * den)))
    }

    pub fn at(&self, t: f64) -> Vec<T> {
        let (tau, _) = self.tau(t);
        self.start.iter().zip(&self.end).map(|(&a, &b)| a + tau * (b - a)).collect()
    }

    pub fn derivative(&self, t: f64) -> Vec<T> {
        let (_, dtau) = self.tau(t);
        self.start.iter().zip(&self.end).map(|(&a, &b)| dtau * (b - a)).collect()
    }
}

/// Outcome of one tracked path.
#[derive(Debug, Clone)]
pub struct TrackedPath<T: Scalar> {
    pub endpoint: Vec<T>,
    pub steps: usize,
    pub rejections: usize,
    /// Accepted `(t, x(t))` samples, filled only when requested.
    pub samples: Vec<(f64, Vec<T>)>,
}

/// Predictor-corrector tracking of `F(x; p(t)) = 0` from `t = 0` to `t = 1`.
#[derive(Debug, Clone, Copy)]
pub struct Tracker<'a> {
    system: &'a ParametricSystem,
    opts: TrackerOptions,
    predictor: Predictor,
    /// Reject steps leaving the positive orthant (real tracking).
    keep_positive: bool,
    record: bool,
}

const DIVERGENCE: f64 = 1e8;
const DIVISOR_TOL: f64 = 1e-10;

impl<'a> Tracker<'a> {
    pub fn new(system: &'a ParametricSystem, opts: TrackerOptions, predictor: Predictor) -> Self {
        Self { system, opts, predictor, keep_positive: false, record: false }
    }

    pub fn keep_positive(mut self, on: bool) -> Self {
        self.keep_positive = on;
        self
    }

    pub fn record(mut self, on: bool) -> Self {
        self.record = on;
        self
    }

    /// `dx/dt = -F_x^{-1} F_p p'(t)`.
    fn tangent<T: Scalar>(&self, path: &ParameterPath<T>, x: &[T], t: f64) -> Option<Vec<T>> {
        let p = path.at(t);
        let ev = self.system.evaluate(x, &p);
        let dp = DVector::from_vec(path.derivative(t));
        let rhs = -(ev.jp * dp);
        lu_solve(ev.jx, rhs.as_slice())
    }

    fn predict<T: Scalar>(&self, path: &ParameterPath<T>, x: &[T], t: f64, h: f64) -> Option<Vec<T>> {
        let axpy =
            |a: &[T], s: f64, k: &[T]| -> Vec<T> { a.iter().zip(k).map(|(&ai, &ki)| ai + T::of_f64(s) * ki).collect() };
        let k1 = self.tangent(path, x, t)?;
        match self.predictor {
            Predictor::Euler => Some(axpy(x, h, &k1)),
            Predictor::RungeKutta4 => {
                let k2 = self.tangent(path, &axpy(x, h / 2.0, &k1), t + h / 2.0)?;
                let k3 = self.tangent(path, &axpy(x, h / 2.0, &k2), t + h / 2.0)?;
                let k4 = self.tangent(path, &axpy(x, h, &k3), t + h)?;
                Some(
                    (0..x.len())
                        .map(|i| {
                            x[i] + T::of_f64(h / 6.0)
                                * (k1[i] + T::of_f64(2.0) * k2[i] + T::of_f64(2.0) * k3[i] + k4[i])
                        })
                        .collect(),
                )
            }
        }
    }

    fn admissible<T: Scalar>(&self, x: &[T]) -> bool {
        if x.iter().any(|z| !z.is_finite()) || norm(x) > DIVERGENCE {
            return false;
        }
        if self.keep_positive && x.iter().any(|z| !(z.to_complex().re > 0.0)) {
            return false;
        }
        self.system.divisor_measure(x) > DIVISOR_TOL
    }

    /// Newton corrector at fixed parameters. Succeeds when the update drops
    /// below `tol` relative to `|x|` within `iterations` steps while
    /// contracting.
    fn correct<T: Scalar>(&self, x: Vec<T>, p: &[T], tol: f64, iterations: usize) -> Option<Vec<T>> {
        let mut x = x;
        let mut last = f64::INFINITY;
        for _ in 0..iterations {
            if !self.admissible(&x) {
                return None;
            }
            let ev = self.system.evaluate(&x, p);
            let neg: Vec<T> = ev.f.iter().map(|&v| -v).collect();
            let dx = lu_solve(ev.jx, &neg)?;
            let size = norm(&dx);
            if size > 0.5 * last {
                return None;
            }
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += *di;
            }
            if size <= tol * (1.0 + norm(&x)) {
                return self.admissible(&x).then_some(x);
            }
            last = size;
        }
        None
    }

    /// Newton polish at the end parameters until updates stall near machine
    /// precision.
    pub fn polish<T: Scalar>(&self, mut x: Vec<T>, p: &[T]) -> Vec<T> {
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            let ev = self.system.evaluate(&x, p);
            let neg: Vec<T> = ev.f.iter().map(|&v| -v).collect();
            let Some(dx) = lu_solve(ev.jx, &neg) else { break };
            let size = norm(&dx);
            if size >= last {
                break;
            }
            let trial: Vec<T> = x.iter().zip(&dx).map(|(&a, &b)| a + b).collect();
            if !self.admissible(&trial) {
                break;
            }
            x = trial;
            if size <= 1e-15 * (1.0 + norm(&x)) {
                break;
            }
            last = size;
        }
        x
    }

    pub fn track<T: Scalar>(&self, path: &ParameterPath<T>, x0: &[T]) -> Result<TrackedPath<T>> {
        let opts = &self.opts;
        let mut x = x0.to_vec();
        if !self.admissible(&x) {
            return Err(Error::PathFailure { t: 0.0, reason: "start point on the divisor or outside the domain" });
        }
        let mut samples = Vec::new();
        if self.record {
            samples.push((0.0, x.clone()));
        }
        let mut t = 0.0;
        let mut h = opts.initial_step;
        let mut streak = 0;
        let mut steps = 0;
        let mut rejections = 0;
        while t < 1.0 {
            if steps + rejections >= opts.max_steps {
                return Err(Error::PathFailure { t, reason: "step budget exhausted" });
            }
            let step = h.min(1.0 - t);
            let t_next = if step >= 1.0 - t { 1.0 } else { t + step };
            let corrected = self
                .predict(path, &x, t, t_next - t)
                .and_then(|xp| self.correct(xp, &path.at(t_next), opts.corrector_tol, opts.max_corrector_iterations));
            match corrected {
                Some(xc) => {
                    x = xc;
                    t = t_next;
                    steps += 1;
                    streak += 1;
                    if self.record {
                        samples.push((t, x.clone()));
                    }
                    if streak >= 3 {
                        h = (2.0 * h).min(opts.max_step);
                        streak = 0;
                    }
                }
                None => {
                    rejections += 1;
                    streak = 0;
                    h /= 2.0;
                    if h < opts.min_step {
                        return Err(Error::PathFailure { t, reason: "step size underflow" });
                    }
                }
            }
        }
        let endpoint = self.polish(x, &path.at(1.0));
        Ok(TrackedPath { endpoint, steps, rejections, samples })
    }
}

/// Jacobian `F_x` at a point, for regularity estimates.
pub fn jacobian<T: Scalar>(system: &ParametricSystem, x: &[T], p: &[T]) -> DMatrix<T> {
    system.evaluate(x, p).jx
}
