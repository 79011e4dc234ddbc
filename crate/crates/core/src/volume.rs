//! Adjoint polynomials and dual-volume functions.
//!
//! For a simple polytope `Q = {y : <w_i, y> + c_i >= 0}` in `R^m` the adjoint
//! is `alpha_Q(y) = sum_v |det W_{I(v)}| prod_{i not in I(v)} l_i(y)` and
//! `m! vol (Q - y)^o = alpha_Q(y) / prod_i l_i(y)`.
//!
//! In fiber coordinates the same function, up to the constant
//! `|det [A; B^T]|`, is `V_C(x) = alpha_C(x) / x_{F_C}` with
//! `alpha_C(x) = sum_{I in V_C} |det A_{[n] \ I}| x_{F_C \ I}`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{Signed, Zero};

use crate::chamber::Cell;
use crate::exact::{to_f64, ExactMatrix, Rational};
use crate::poly::{CompiledPoly, SparsePoly};
use crate::polytope::{enumerate_vertices, FiberProblem, HRep, HVertexData, VertexData};
use crate::{Error, Result};

fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !set.contains(i)).collect()
}

/// Adjoint `alpha_C` of the fiber `P_b` in `x` coordinates.
pub fn adjoint_x(a: &ExactMatrix, b: &[Rational]) -> Result<SparsePoly> {
    Ok(dual_volume_fn(a, b)?.numerator)
}

fn adjoint_from_family(a: &ExactMatrix, support: &[usize], family: &[Vec<usize>]) -> Result<SparsePoly> {
    let n = a.cols();
    let d = a.rows();
    let rows: Vec<usize> = (0..d).collect();
    let mut alpha = SparsePoly::zero(n);
    for inc in family {
        let coeff = a.minor_det(&rows, &complement(n, inc))?.abs();
        let mut e = vec![0u32; n];
        for &i in support {
            if !inc.contains(&i) {
                e[i] = 1;
            }
        }
        alpha.add_term(e, coeff);
    }
    Ok(alpha)
}

/// `V_C(x) = alpha_C(x) / prod_{i in F_C} x_i` (normalization constant 1).
#[derive(Debug, Clone)]
pub struct DualVolume {
    support: Vec<usize>,
    vertex_family: Vec<Vec<usize>>,
    numerator: SparsePoly,
    compiled: CompiledPoly,
    n: usize,
    d: usize,
}

/// Dual-volume function of the fiber at `b`, built from the vertices of
/// `P_b`. Requires `P_b` to be full-dimensional and simple; `b` may lie on a
/// chamber wall as long as the fiber itself is simple.
pub fn dual_volume_fn(a: &ExactMatrix, b: &[Rational]) -> Result<DualVolume> {
    let vd = enumerate_vertices(a, b)?;
    DualVolume::from_vertex_data(a, &vd)
}

impl DualVolume {
    pub fn from_vertex_data(a: &ExactMatrix, vd: &VertexData) -> Result<Self> {
        vd.require_simple()?;
        let mut family = vd.facet_incidences.clone();
        family.sort();
        Self::build(a, vd.facets.clone(), family)
    }

    pub fn for_fiber(fp: &FiberProblem) -> Result<Self> {
        Self::from_vertex_data(fp.a(), &fp.vertex_data()?)
    }

    /// The rational function of an explicitly chosen cell, used when `b`
    /// lies on a wall and the adjacent cell must be named by the caller.
    pub fn for_cell(a: &ExactMatrix, cell: &Cell) -> Result<Self> {
        Self::build(a, cell.facet_support.clone(), cell.vertex_family.clone())
    }

    fn build(a: &ExactMatrix, support: Vec<usize>, vertex_family: Vec<Vec<usize>>) -> Result<Self> {
        let numerator = adjoint_from_family(a, &support, &vertex_family)?;
        let compiled = numerator.compile();
        Ok(Self { support, vertex_family, numerator, compiled, n: a.cols(), d: a.rows() })
    }

    /// `F_C`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn vertex_family(&self) -> &[Vec<usize>] {
        &self.vertex_family
    }

    /// `alpha_C`.
    pub fn numerator(&self) -> &SparsePoly {
        &self.numerator
    }

    pub fn compiled(&self) -> &CompiledPoly {
        &self.compiled
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Degree `d - n` of the homogeneous rational function.
    pub fn degree(&self) -> i64 {
        self.d as i64 - self.n as i64
    }

    pub fn value_exact(&self, x: &[Rational]) -> Result<Rational> {
        let mut den = Rational::from_integer(BigInt::from(1));
        for &i in &self.support {
            den *= &x[i];
        }
        if den.is_zero() {
            return Err(Error::OnDivisor);
        }
        Ok(self.numerator.eval(x) / den)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let den: f64 = self.support.iter().map(|&i| x[i]).product();
        self.compiled.value(x) / den
    }

    /// `log V_C(x)` with its gradient and row-major Hessian.
    pub fn log_eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::Dimension("point length".into()));
        }
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NotInterior);
        }
        let (alpha, da, dda) = self.compiled.derivatives(x, true);
        if !(alpha > 0.0) {
            return Err(Error::OnDivisor);
        }
        let mut value = alpha.ln();
        let mut grad: Vec<f64> = da.iter().map(|g| g / alpha).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = dda[i * n + j] / alpha - grad[i] * grad[j];
            }
        }
        for &i in &self.support {
            value -= x[i].ln();
            grad[i] -= 1.0 / x[i];
            hess[i * n + i] += 1.0 / (x[i] * x[i]);
        }
        Ok((value, grad, hess))
    }

    /// Gradient of `log V_C`.
    pub fn log_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NotInterior);
        }
        let (alpha, mut grad) = self.compiled.gradient(x);
        if !(alpha > 0.0) {
            return Err(Error::OnDivisor);
        }
        for g in grad.iter_mut() {
            *g /= alpha;
        }
        for &i in &self.support {
            grad[i] -= 1.0 / x[i];
        }
        Ok(grad)
    }
}

/// Affine forms `l_i(y) = <w_i, y> + c_i` as polynomials in `m` variables.
fn facet_forms(h: &HRep) -> Vec<SparsePoly> {
    (0..h.k()).map(|i| SparsePoly::affine(&h.c()[i], h.normal(i))).collect()
}

fn checked_vertex_data(h: &HRep) -> Result<HVertexData> {
    let vd = h.require_minimal()?;
    if let Some((vertex, facets)) = vd.simplicity_violation(h.m()) {
        return Err(Error::NotSimple { vertex, facets, expected: h.m() });
    }
    Ok(vd)
}

/// `|det W_{I(v)}| prod_{i not in I(v)} l_i` for each vertex `v`.
fn vertex_terms(h: &HRep, vd: &HVertexData, forms: &[SparsePoly]) -> Result<Vec<SparsePoly>> {
    let m = h.m();
    let cols: Vec<usize> = (0..m).collect();
    vd.incidences
        .iter()
        .map(|inc| {
            let coeff = h.w().minor_det(inc, &cols)?.abs();
            let mut p = SparsePoly::constant(m, coeff);
            for (i, f) in forms.iter().enumerate() {
                if !inc.contains(&i) {
                    p = &p * f;
                }
            }
            Ok(p)
        })
        .collect()
}

/// Adjoint `alpha_Q(y)` of a simple polytope given by a minimal facet
/// representation; a polynomial of degree `k - m` in `m` variables.
pub fn adjoint_y(h: &HRep) -> Result<SparsePoly> {
    let vd = checked_vertex_data(h)?;
    let forms = facet_forms(h);
    let mut alpha = SparsePoly::zero(h.m());
    for t in vertex_terms(h, &vd, &forms)? {
        alpha = &alpha + &t;
    }
    Ok(alpha)
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// The dual-volume function `y -> vol (Q - y)^o` of a simple polytope.
#[derive(Debug, Clone)]
pub struct PolytopeDualVolume {
    hrep: HRep,
    adjoint: SparsePoly,
    compiled: CompiledPoly,
    factorial: f64,
}

impl PolytopeDualVolume {
    pub fn new(h: &HRep) -> Result<Self> {
        let adjoint = adjoint_y(h)?;
        let compiled = adjoint.compile();
        Ok(Self { hrep: h.clone(), adjoint, compiled, factorial: factorial(h.m()) as f64 })
    }

    pub fn adjoint(&self) -> &SparsePoly {
        &self.adjoint
    }

    pub fn hrep(&self) -> &HRep {
        &self.hrep
    }

    /// Exact `vol (Q - y)^o` for `y` in the interior.
    pub fn volume_exact(&self, y: &[Rational]) -> Result<Rational> {
        let forms = self.hrep.forms(y);
        if forms.iter().any(|l| !l.is_positive()) {
            return Err(Error::NotInterior);
        }
        let den: Rational = forms.iter().product();
        let fact = Rational::from_integer(BigInt::from(factorial(self.hrep.m())));
        Ok(self.adjoint.eval(y) / (den * fact))
    }

    pub fn volume(&self, y: &[f64]) -> Result<f64> {
        let forms = self.hrep.forms_f64(y);
        if forms.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotInterior);
        }
        let den: f64 = forms.iter().product();
        Ok(self.compiled.value(y) / (den * self.factorial))
    }
}

/// Wachspress coordinates `p_v(y) = |det W_{I(v)}| prod_{i not in I(v)} l_i(y) / alpha_Q(y)`.
#[derive(Debug, Clone)]
pub struct WachspressModel {
    hrep: HRep,
    vertices: Vec<Vec<Rational>>,
    numerators: Vec<SparsePoly>,
    compiled: Vec<CompiledPoly>,
    denominator: SparsePoly,
}

impl WachspressModel {
    pub fn new(h: &HRep) -> Result<Self> {
        let vd = checked_vertex_data(h)?;
        let forms = facet_forms(h);
        let numerators = vertex_terms(h, &vd, &forms)?;
        let mut denominator = SparsePoly::zero(h.m());
        for t in &numerators {
            denominator = &denominator + t;
        }
        let compiled = numerators.iter().map(SparsePoly::compile).collect();
        Ok(Self { hrep: h.clone(), vertices: vd.vertices, numerators, compiled, denominator })
    }

    pub fn hrep(&self) -> &HRep {
        &self.hrep
    }

    /// Vertices in the order of the coordinates.
    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn numerators(&self) -> &[SparsePoly] {
        &self.numerators
    }

    /// `alpha_Q`.
    pub fn denominator(&self) -> &SparsePoly {
        &self.denominator
    }

    /// Exact coordinates. Errors with [`Error::OnDivisor`] only where
    /// `alpha_Q(y) = 0`; at a facet hyperplane the coordinates are still
    /// defined (at a vertex they form the indicator vector of that vertex).
    pub fn coords_exact(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        let den = self.denominator.eval(y);
        if den.is_zero() {
            return Err(Error::OnDivisor);
        }
        Ok(self.numerators.iter().map(|p| p.eval(y) / &den).collect())
    }

    pub fn coords(&self, y: &[f64]) -> Result<Vec<f64>> {
        let values: Vec<f64> = self.compiled.iter().map(|p| p.value(y)).collect();
        let den: f64 = values.iter().sum();
        let scale: f64 = values.iter().map(|v| v.abs()).sum();
        if den.abs() <= 1e-14 * scale || !den.is_finite() {
            return Err(Error::OnDivisor);
        }
        Ok(values.into_iter().map(|v| v / den).collect())
    }
}

/// Exact area of `(Q - y)^o` for a polygon (`m = 2`), computed as the convex
/// hull of the dual points `w_i / l_i(y)` followed by the shoelace formula.
pub fn dual_volume_oracle_2d(h: &HRep, y: &[Rational]) -> Result<Rational> {
    if h.m() != 2 || y.len() != 2 {
        return Err(Error::Dimension("the polygon oracle needs m = 2".into()));
    }
    let forms = h.forms(y);
    if forms.iter().any(|l| !l.is_positive()) {
        return Err(Error::NotInterior);
    }
    let points: Vec<(Rational, Rational)> =
        (0..h.k()).map(|i| (&h.normal(i)[0] / &forms[i], &h.normal(i)[1] / &forms[i])).collect();
    let hull = convex_hull(points);
    let mut twice = Rational::zero();
    for i in 0..hull.len() {
        let (x0, y0) = &hull[i];
        let (x1, y1) = &hull[(i + 1) % hull.len()];
        twice += x0 * y1 - x1 * y0;
    }
    Ok(twice.abs() / Rational::from_integer(BigInt::from(2)))
}

fn cross(o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Andrew's monotone chain; returns hull vertices counterclockwise.
fn convex_hull(mut pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(Rational, Rational)> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(Rational, Rational)> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Whether `y` lies in the Santaló region
/// `K_a = {y : vol (Q - y)^o - vol (Q - y*)^o <= a}`.
pub fn santalo_region_membership(h: &HRep, y: &[f64], a: f64, y_star: &[f64]) -> Result<bool> {
    let dv = PolytopeDualVolume::new(h)?;
    let at_y = dv.volume(y)?;
    let at_star = dv.volume(y_star)?;
    Ok(at_y - at_star <= a)
}

/// `|det [A; B^T]|`, the constant relating `V_C(x)` to the `y`-coordinate
/// quantity `alpha_Q(y) / prod l_i(y)` of `Q_b = B^T P_b`.
pub fn coordinate_change_constant(fp: &FiberProblem) -> Result<f64> {
    Ok(to_f64(&fp.coordinate_change().determinant()?.abs()))
}
