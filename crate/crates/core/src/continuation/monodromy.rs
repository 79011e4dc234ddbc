use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::system::ParametricSystem;
use super::tracker::{ParameterPath, Predictor, Tracker, TrackerOptions};
use crate::chamber::{same_cell, Cell};
use crate::exact::{to_f64_vec, ExactMatrix, Rational};
use crate::numeric::{norm, numerical_rank, project_affine, smallest_singular_value, Complex64};
use crate::polytope::FiberProblem;
use crate::santalo::SantaloResult;
use crate::volume::DualVolume;
use crate::{Error, Result};

/// Endpoints accepted as solutions must meet this relative residual.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Relative coordinate-wise distance below which two solutions coincide.
pub const DEDUP_TOL: f64 = 1e-8;
const IMAGINARY_TOL: f64 = 1e-8;
const SEED_RETRIES: usize = 20;

/// Solutions of `F(x; p) = 0` at one complex parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub parameters: Vec<Complex64>,
    pub solutions: Vec<Vec<Complex64>>,
    /// Smallest singular value of `F_x` at each solution.
    pub regularity: Vec<f64>,
    pub seed: u64,
    pub loops_tracked: usize,
    pub residual_max: f64,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Sorts solutions lexicographically by real then imaginary parts.
    pub fn canonicalize(&mut self) {
        let mut pairs: Vec<(Vec<Complex64>, f64)> = self.solutions.drain(..).zip(self.regularity.drain(..)).collect();
        pairs.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        for (s, r) in pairs {
            self.solutions.push(s);
            self.regularity.push(r);
        }
    }
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Coordinate-wise relative comparison.
pub fn same_solution(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).norm() <= tol * p.norm().max(q.norm()).max(1.0))
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / core::f64::consts::SQRT_2
}

fn unit_gamma(rng: &mut ChaCha8Rng) -> Complex64 {
    let g = gaussian(rng);
    g / g.norm()
}

fn real_parts(v: &[Rational]) -> Vec<Complex64> {
    to_f64_vec(v).into_iter().map(|r| Complex64::new(r, 0.0)).collect()
}

/// Which parameter coordinates a monodromy loop may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    /// Only `u`; the right-hand side stays fixed.
    Exponents,
    /// Both `u` and the slice right-hand side `r`.
    All,
}

/// Chooses `u` with `F(x0; u, r) = 0`. The first block is linear in `u`:
/// `M(x0) u = 0` with `M` of size `(n - d) x (1 + n_C)`. A random vector is
/// projected orthogonally onto the kernel of `M`.
fn solve_exponents(ps: &ParametricSystem, x0: &[Complex64], rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let cols = 1 + ps.n_c();
    if cols <= ps.m() {
        return None;
    }
    let mat = ps.likelihood_matrix(x0);
    let z: Vec<Complex64> = (0..cols).map(|_| gaussian(rng)).collect();
    let zero = vec![Complex64::new(0.0, 0.0); ps.m()];
    let mut u = project_affine(&mat, &zero, &z)?;
    let scale = norm(&u);
    if !(scale > 1e-6 * norm(&z)) {
        return None;
    }
    for v in u.iter_mut() {
        *v /= scale;
    }
    Some(u)
}

/// Random complex start pair `(x0, p0)` on `{L x = r}`. With `rhs` given
/// (`r = b`) the point is projected onto that affine space; without it `x0` is
/// free and `r = L x0`.
pub fn seed_start_pair(
    ps: &ParametricSystem,
    rhs: Option<&[Rational]>,
    seed: u64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    seed_with_rng(ps, rhs, &mut rng)
}

fn seed_with_rng(
    ps: &ParametricSystem,
    rhs: Option<&[Rational]>,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = ps.n();
    let d = ps.d();
    let l = DMatrix::from_fn(d, n, |i, j| ps.slice()[i][j]);
    for _ in 0..SEED_RETRIES {
        let z: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        let (x0, r) = match rhs {
            Some(b) => {
                let r = real_parts(b);
                let Some(x0) = project_affine(&l, &r, &z) else { continue };
                (x0, r)
            }
            None => {
                let r = (&l * nalgebra::DVector::from_column_slice(&z)).as_slice().to_vec();
                (z, r)
            }
        };
        if ps.divisor_measure(&x0) < 1e-6 {
            continue;
        }
        let Some(u) = solve_exponents(ps, &x0, rng) else { continue };
        let p: Vec<Complex64> = u.into_iter().chain(r).collect();
        let jx = ps.evaluate(&x0, &p).jx;
        let top = jx.norm();
        if ps.relative_residual(&x0, &p) <= 1e-12 && smallest_singular_value(&jx) > 1e-10 * top {
            return Ok((x0, p));
        }
    }
    Err(Error::DegenerateStart)
}

/// Dimension of the solution space of the `u`-linear system at `x0`.
pub fn exponent_solution_dimension(ps: &ParametricSystem, x0: &[Complex64]) -> usize {
    let mat = ps.likelihood_matrix(x0);
    mat.ncols() - numerical_rank(&mat, 1e-10)
}

/// Accepts a tracked endpoint if it solves the system to [`RESIDUAL_TOL`]
/// and stays off the divisor.
fn valid_endpoint(ps: &ParametricSystem, x: &[Complex64], p: &[Complex64]) -> Option<f64> {
    let residual = ps.relative_residual(x, p);
    (residual <= RESIDUAL_TOL && ps.divisor_measure(x) > 1e-8 && x.iter().all(|z| z.is_finite())).then_some(residual)
}

struct Store {
    solutions: Vec<Vec<Complex64>>,
    residual_max: f64,
}

impl Store {
    fn insert(&mut self, x: Vec<Complex64>, residual: f64) -> bool {
        if self.solutions.iter().any(|s| same_solution(s, &x, DEDUP_TOL)) {
            return false;
        }
        self.residual_max = self.residual_max.max(residual);
        self.solutions.push(x);
        true
    }
}

/// Monodromy solver: tracks every known solution around random triangular
/// loops `p0 -> p0 + delta_1 -> p0 + delta_2 -> p0` and collects new
/// endpoints. Stops once `target` solutions are known, or once the loops
/// since the last new solution number at least `opts.stale_loops` and have
/// tracked at least `opts.stale_paths` paths.
pub fn monodromy_solve(
    ps: &ParametricSystem,
    start: (&[Complex64], &[Complex64]),
    mode: LoopMode,
    opts: &TrackerOptions,
    target: Option<usize>,
) -> Result<SolutionSet> {
    opts.validate()?;
    let (x0, p0) = start;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let tracker = Tracker::new(ps, *opts, Predictor::RungeKutta4);
    let x0 = tracker.polish(x0.to_vec(), p0);
    let residual = valid_endpoint(ps, &x0, p0).ok_or(Error::DegenerateStart)?;
    let mut store = Store { solutions: vec![x0], residual_max: residual };
    let movable = match mode {
        LoopMode::Exponents => 1 + ps.n_c(),
        LoopMode::All => p0.len(),
    };
    let scale = norm(&p0[..movable]) / (movable as f64).sqrt();
    let mut stale = 0;
    let mut stale_paths = 0;
    let mut loops = 0;
    while target.map_or(true, |t| store.solutions.len() < t)
        && (stale < opts.stale_loops || stale_paths < opts.stale_paths)
    {
        if loops >= opts.max_loops {
            if target.is_some() {
                return Err(Error::LoopBudgetExhausted { found: store.solutions.len() });
            }
            break;
        }
        loops += 1;
        let corner = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
            p0.iter().enumerate().map(|(i, &v)| if i < movable { v + gaussian(rng) * scale } else { v }).collect()
        };
        let p1 = corner(&mut rng);
        let p2 = corner(&mut rng);
        let legs = [
            ParameterPath { start: p0.to_vec(), end: p1.clone(), gamma: unit_gamma(&mut rng) },
            ParameterPath { start: p1, end: p2.clone(), gamma: unit_gamma(&mut rng) },
            ParameterPath { start: p2, end: p0.to_vec(), gamma: unit_gamma(&mut rng) },
        ];
        let mut found = false;
        let known = store.solutions.clone();
        for s in &known {
            let mut x = s.clone();
            let mut ok = true;
            for leg in &legs {
                match tracker.track(leg, &x) {
                    Ok(path) => x = path.endpoint,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if let Some(res) = valid_endpoint(ps, &x, p0) {
                found |= store.insert(x, res);
            }
            if target.is_some_and(|t| store.solutions.len() >= t) {
                break;
            }
        }
        if found {
            stale = 0;
            stale_paths = 0;
        } else {
            stale += 1;
            stale_paths += known.len();
        }
    }
    let regularity = store.solutions.iter().map(|x| smallest_singular_value(&ps.evaluate(x, p0).jx)).collect();
    let mut set = SolutionSet {
        parameters: p0.to_vec(),
        solutions: store.solutions,
        regularity,
        seed: opts.seed,
        loops_tracked: loops,
        residual_max: store.residual_max,
    };
    set.canonicalize();
    Ok(set)
}

/// Parameter homotopy from the solved start parameters to `u = 1`, `r = b`.
/// Exactly one endpoint is real and positive; it is the Santaló point.
pub fn homotopy_to_one(
    ps: &ParametricSystem,
    b: &[Rational],
    sols: &SolutionSet,
    opts: &TrackerOptions,
) -> Result<SantaloResult> {
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5851_f42d_4c95_7f2d);
    let target = ps.unit_parameters(&real_parts(b));
    let path = ParameterPath { start: sols.parameters.clone(), end: target.clone(), gamma: unit_gamma(&mut rng) };
    let tracker = Tracker::new(ps, *opts, Predictor::RungeKutta4);
    let mut positive: Vec<Vec<f64>> = Vec::new();
    for s in &sols.solutions {
        let Ok(tracked) = tracker.track(&path, s) else { continue };
        let x = tracked.endpoint;
        if valid_endpoint(ps, &x, &target).is_none() {
            continue;
        }
        if x.iter().all(|z| z.im.abs() < IMAGINARY_TOL * z.re.abs().max(1.0) && z.re > 0.0) {
            let real: Vec<f64> = x.iter().map(|z| z.re).collect();
            if !positive.iter().any(|q| q.iter().zip(&real).all(|(a, b)| (a - b).abs() <= DEDUP_TOL * a.abs().max(1.0)))
            {
                positive.push(real);
            }
        }
    }
    if positive.len() != 1 {
        return Err(Error::PositiveEndpoints(positive.len()));
    }
    let x_star = polish_real(ps, positive.pop().expect("one endpoint"), &target, opts);
    let (objective, gradient_norm) = ps.objective(&x_star);
    Ok(SantaloResult {
        y_star: ps.project(&x_star),
        x_star,
        objective,
        gradient_norm,
        iterations: sols.solutions.len(),
    })
}

fn polish_real(ps: &ParametricSystem, x: Vec<f64>, target: &[Complex64], opts: &TrackerOptions) -> Vec<f64> {
    let p: Vec<f64> = target.iter().map(|z| z.re).collect();
    Tracker::new(ps, *opts, Predictor::Euler).keep_positive(true).polish(x, &p)
}

/// Monodromy run of the likelihood system of `fp` at a random `u`, with
/// `A x = b` fixed.
pub fn ml_solutions(fp: &FiberProblem, opts: &TrackerOptions, target: Option<usize>) -> Result<SolutionSet> {
    let dv = DualVolume::for_fiber(fp)?;
    let ps = ParametricSystem::likelihood(fp, &dv);
    let (x0, p0) = seed_start_pair(&ps, Some(fp.b()), opts.seed)?;
    monodromy_solve(&ps, (&x0, &p0), LoopMode::Exponents, opts, target)
}

/// The seed of the cross-validation run in [`ml_degree`].
pub fn independent_seed(seed: u64) -> u64 {
    seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407)
}

/// Number of complex critical points of the likelihood system of the fiber
/// for generic `u`. A second run with an independent seed must agree; the
/// count is a lower bound certified only by stabilization.
pub fn ml_degree(fp: &FiberProblem, opts: &TrackerOptions) -> Result<usize> {
    let first = ml_solutions(fp, opts, None)?.len();
    let second_opts = TrackerOptions { seed: independent_seed(opts.seed), ..*opts };
    let second = ml_solutions(fp, &second_opts, None)?.len();
    if first != second {
        return Err(Error::SeedDisagreement { first, second });
    }
    Ok(first)
}

/// Witness set of the patch variety of `cell` for generic `u`, cut by a
/// generic complex affine slice of codimension `d`.
pub fn patch_witness_set(a: &ExactMatrix, cell: &Cell, opts: &TrackerOptions) -> Result<SolutionSet> {
    let kernel = a.kernel_basis()?;
    let dv = DualVolume::for_cell(a, cell)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x2545_f491_4f6c_dd1d);
    let (n, d) = (a.cols(), a.rows());
    let slice: Vec<Vec<Complex64>> = (0..d).map(|_| (0..n).map(|_| gaussian(&mut rng)).collect()).collect();
    let ps = ParametricSystem::new(a, &kernel, &dv).with_slice(slice)?;
    let (x0, p0) = seed_with_rng(&ps, None, &mut rng)?;
    monodromy_solve(&ps, (&x0, &p0), LoopMode::All, opts, None)
}

/// Degree of the patch variety of `cell` (for generic `u`) as a witness
/// set cardinality.
pub fn numerical_patch_degree(a: &ExactMatrix, cell: &Cell, opts: &TrackerOptions) -> Result<usize> {
    Ok(patch_witness_set(a, cell, opts)?.len())
}

/// Tracks the Santaló point along `b(t) = (1 - t) b0 + t b1` inside one
/// closed cell, in real arithmetic.
pub fn track_santalo_path(
    fp: &FiberProblem,
    cell: &Cell,
    b0: &[Rational],
    x0: &[f64],
    b1: &[Rational],
    opts: &TrackerOptions,
) -> Result<Vec<f64>> {
    Ok(track_santalo_path_sampled(fp, cell, b0, x0, b1, opts, false)?.0)
}

/// Accepted `(t, x(t))` samples of a tracked path.
pub type PathSamples = Vec<(f64, Vec<f64>)>;

/// As [`track_santalo_path`], also returning the accepted `(t, x(t))` samples
/// when `record` is set.
pub fn track_santalo_path_sampled(
    fp: &FiberProblem,
    cell: &Cell,
    b0: &[Rational],
    x0: &[f64],
    b1: &[Rational],
    opts: &TrackerOptions,
    record: bool,
) -> Result<(Vec<f64>, PathSamples)> {
    opts.validate()?;
    if b0.len() != fp.d() || b1.len() != fp.d() || x0.len() != fp.n() {
        return Err(Error::Dimension("path endpoints must have length d and x0 length n".into()));
    }
    if !cell.contains(b0) || !cell.contains(b1) {
        return Err(Error::OutsideCell);
    }
    if b0 == b1 {
        return Ok((x0.to_vec(), vec![(0.0, x0.to_vec()), (1.0, x0.to_vec())]));
    }
    let dv = DualVolume::for_cell(fp.a(), cell)?;
    let ps = ParametricSystem::likelihood(fp, &dv);
    let start = ps.unit_parameters(&to_f64_vec(b0));
    let end = ps.unit_parameters(&to_f64_vec(b1));
    let tracker = Tracker::new(&ps, *opts, Predictor::Euler).keep_positive(true).record(record);
    let x0 = tracker.polish(x0.to_vec(), &start);
    let path = tracker.track(&ParameterPath::segment(start, end), &x0)?;
    Ok((path.endpoint, path.samples))
}

/// Whether `b0` and `b1` can be joined by a path tracker call: both in the
/// interior of the same cell.
pub fn trackable(a: &ExactMatrix, b0: &[Rational], b1: &[Rational]) -> Result<bool> {
    same_cell(a, b0, b1)
}
