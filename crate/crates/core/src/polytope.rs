//! Fibers `P_b = {x >= 0 : Ax = b}`, their projections `Q_b = B^T P_b`, and
//! facet representations `{y : W y + c >= 0}`.
//!
//! Vertices are found by enumerating all `d`-column subsets of `A` (basic
//! solutions), so the cost grows like `C(n, d)`. This is meant for the small
//! instances (`n` up to about 15) where exact answers are wanted.
//!
//! All index sets are 0-based.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{self, cone_contains, dot, feasible_point, primitive_integer, subsets, ExactMatrix, Rational};
use crate::{Error, Result};

/// The fiber `P_b = {x >= 0 : Ax = b}` together with a kernel basis `B` of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberProblem {
    a: ExactMatrix,
    b: Vec<Rational>,
    kernel: ExactMatrix,
}

impl FiberProblem {
    /// Validates `A` and `b` and picks the deterministic kernel basis of
    /// [`ExactMatrix::kernel_basis`].
    pub fn new(a: ExactMatrix, b: Vec<Rational>) -> Result<Self> {
        validate_matrix(&a)?;
        let kernel = a.kernel_basis()?;
        let fp = Self { a, b, kernel };
        fp.validate_rhs()?;
        Ok(fp)
    }

    /// Like [`FiberProblem::new`] with a caller-supplied kernel basis.
    pub fn with_kernel(a: ExactMatrix, b: Vec<Rational>, kernel: ExactMatrix) -> Result<Self> {
        validate_matrix(&a)?;
        let m = a.cols() - a.rows();
        if kernel.rows() != a.cols() || kernel.cols() != m {
            return Err(Error::Dimension(format!(
                "kernel basis must be {}x{}, got {}x{}",
                a.cols(),
                m,
                kernel.rows(),
                kernel.cols()
            )));
        }
        if !a.mul(&kernel)?.is_zero() {
            return Err(Error::InvalidInput("A * B is not zero".into()));
        }
        let rank = kernel.rank();
        if rank != m {
            return Err(Error::RankDeficient { expected: m, found: rank });
        }
        let fp = Self { a, b, kernel };
        fp.validate_rhs()?;
        Ok(fp)
    }

    /// Same `A` and kernel basis, new right-hand side.
    pub fn with_rhs(&self, b: Vec<Rational>) -> Result<Self> {
        let fp = Self { a: self.a.clone(), b, kernel: self.kernel.clone() };
        fp.validate_rhs()?;
        Ok(fp)
    }

    fn validate_rhs(&self) -> Result<()> {
        if self.b.len() != self.a.rows() {
            return Err(Error::Dimension(format!("b has length {}, A has {} rows", self.b.len(), self.a.rows())));
        }
        if !cone_contains(&self.a, &self.b) {
            return Err(infeasible(&self.a, &self.b));
        }
        Ok(())
    }

    pub fn a(&self) -> &ExactMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn kernel(&self) -> &ExactMatrix {
        &self.kernel
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn d(&self) -> usize {
        self.a.rows()
    }

    /// Dimension `n - d` of a full-dimensional fiber.
    pub fn m(&self) -> usize {
        self.n() - self.d()
    }

    pub fn b_f64(&self) -> Vec<f64> {
        exact::to_f64_vec(&self.b)
    }

    pub fn vertex_data(&self) -> Result<VertexData> {
        enumerate_vertices(&self.a, &self.b)
    }

    /// The stacked matrix `[A; B^T]`, invertible by construction.
    pub fn coordinate_change(&self) -> ExactMatrix {
        self.a.vstack(&self.kernel.transpose()).expect("matching widths")
    }

    /// All `n` affine forms `x_i = c_i(b) + <w_i, y>` of the inverse
    /// coordinate change, where `y = B^T x`.
    pub fn coordinate_forms(&self) -> Result<HRep> {
        let inv = self.coordinate_change().inverse()?;
        let d = self.d();
        let n = self.n();
        let mb = inv.select_columns(&(0..d).collect::<Vec<_>>());
        let my = inv.select_columns(&(d..n).collect::<Vec<_>>());
        let c = mb.mul_vec(&self.b)?;
        HRep::new(my, c)
    }
}

fn validate_matrix(a: &ExactMatrix) -> Result<()> {
    let (d, n) = (a.rows(), a.cols());
    if d == 0 || n <= d {
        return Err(Error::Dimension(format!("need 0 < d < n, got d = {}, n = {}", d, n)));
    }
    if !a.is_nonnegative() {
        return Err(Error::InvalidInput("A must have nonnegative entries".into()));
    }
    if let Some(j) = (0..n).find(|&j| a.column(j).iter().all(Zero::is_zero)) {
        return Err(Error::InvalidInput(format!("column {} of A is zero", j)));
    }
    let rank = a.rank();
    if rank != d {
        return Err(Error::RankDeficient { expected: d, found: rank });
    }
    Ok(())
}

fn infeasible(a: &ExactMatrix, b: &[Rational]) -> Error {
    let violated =
        cone_facets(a).into_iter().find(|h| dot(&exact::integer_to_rational(h), b).is_negative()).unwrap_or_default();
    Error::Infeasible { violated }
}

/// Primitive inward normals `h` of the facets of `cone(A)` (so `h . A_j >= 0`
/// for all columns), sorted and deduplicated. Requires `rank(A) = d`.
pub fn cone_facets(a: &ExactMatrix) -> Vec<Vec<BigInt>> {
    let d = a.rows();
    let n = a.cols();
    let mut out = BTreeSet::new();
    for s in subsets(n, d - 1) {
        if let Some(h) = hyperplane_through(a, &s) {
            let values: Vec<Rational> = (0..n).map(|j| dot(&exact::integer_to_rational(&h), &a.column(j))).collect();
            let pos = values.iter().any(Signed::is_positive);
            let neg = values.iter().any(Signed::is_negative);
            match (pos, neg) {
                (true, false) => {
                    out.insert(h);
                }
                (false, true) => {
                    out.insert(h.into_iter().map(|z| -z).collect());
                }
                _ => {}
            }
        }
    }
    out.into_iter().collect()
}

/// Primitive normal of the hyperplane spanned by the columns `s` of `a`, if
/// those columns have rank `d - 1`. Sign is unnormalized.
pub(crate) fn hyperplane_through(a: &ExactMatrix, s: &[usize]) -> Option<Vec<BigInt>> {
    let sub = a.select_columns(s).transpose();
    let null = if s.is_empty() { ExactMatrix::identity(a.rows()) } else { sub.nullspace() };
    if null.cols() != 1 {
        return None;
    }
    Some(primitive_integer(&null.column(0)))
}

/// Vertices of `P_b` and their incidences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    /// Vertices in lexicographic order; each satisfies `Ax = b`, `x >= 0`.
    pub vertices: Vec<Vec<Rational>>,
    /// Zero-coordinate index set of each vertex.
    pub incidences: Vec<Vec<usize>>,
    /// Indices `i` whose hyperplane `x_i = 0` cuts out a facet. When several
    /// indices cut out the same facet only the smallest is kept.
    pub facets: Vec<usize>,
    /// `I(v)`: the facet indices containing each vertex.
    pub facet_incidences: Vec<Vec<usize>>,
    /// Affine dimension of `P_b`.
    pub dimension: usize,
    pub n: usize,
    pub d: usize,
}

impl VertexData {
    pub fn is_full_dimensional(&self) -> bool {
        self.dimension == self.n - self.d
    }

    /// Every vertex lies on exactly `n - d` facets.
    pub fn is_simple(&self) -> bool {
        is_simple(self, self.n, self.d)
    }

    /// First vertex violating simplicity, as `(vertex, facet count)`.
    pub fn simplicity_violation(&self) -> Option<(usize, usize)> {
        let m = self.n - self.d;
        self.facet_incidences.iter().enumerate().find(|(_, inc)| inc.len() != m).map(|(v, inc)| (v, inc.len()))
    }

    /// Checks full dimension and simplicity, reporting the first failure.
    pub fn require_simple(&self) -> Result<()> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional { dimension: self.dimension, expected: self.n - self.d });
        }
        match self.simplicity_violation() {
            Some((vertex, facets)) => Err(Error::NotSimple { vertex, facets, expected: self.n - self.d }),
            None => Ok(()),
        }
    }

    /// Average of the vertices, a relative-interior point of `P_b`.
    pub fn barycenter(&self) -> Vec<Rational> {
        barycenter(&self.vertices)
    }
}

pub fn is_simple(vd: &VertexData, n: usize, d: usize) -> bool {
    vd.facet_incidences.iter().all(|inc| inc.len() == n - d)
}

/// Enumerates the basic feasible solutions of `{x >= 0 : Ax = b}` exactly.
///
/// Fails with [`Error::Infeasible`] when the fiber is empty. A fiber of lower
/// dimension (b on the boundary of `cone(A)`) is reported through
/// [`VertexData::dimension`], not as an error.
pub fn enumerate_vertices(a: &ExactMatrix, b: &[Rational]) -> Result<VertexData> {
    let d = a.rows();
    let n = a.cols();
    if b.len() != d {
        return Err(Error::Dimension("b length".into()));
    }
    let mut found = BTreeSet::new();
    for sigma in subsets(n, d) {
        let sub = a.select_columns(&sigma);
        let Ok(xs) = sub.solve(b) else {
            continue;
        };
        if xs.iter().any(Signed::is_negative) {
            continue;
        }
        let mut x = vec![Rational::zero(); n];
        for (&j, v) in sigma.iter().zip(xs) {
            x[j] = v;
        }
        found.insert(x);
    }
    if found.is_empty() {
        return Err(infeasible(a, b));
    }
    let vertices: Vec<Vec<Rational>> = found.into_iter().collect();
    let incidences: Vec<Vec<usize>> = vertices.iter().map(|v| (0..n).filter(|&i| v[i].is_zero()).collect()).collect();
    let dimension = affine_rank(&vertices.iter().collect::<Vec<_>>());
    let facets = facet_indices(&vertices, &incidences, n, dimension);
    let facet_incidences =
        incidences.iter().map(|inc| inc.iter().copied().filter(|i| facets.contains(i)).collect()).collect();
    Ok(VertexData { vertices, incidences, facets, facet_incidences, dimension, n, d })
}

/// Indices whose vanishing set is a face of dimension `dimension - 1`,
/// keeping the smallest index for each distinct face.
fn facet_indices(vertices: &[Vec<Rational>], incidences: &[Vec<usize>], rows: usize, dimension: usize) -> Vec<usize> {
    if dimension == 0 {
        return Vec::new();
    }
    let mut seen = BTreeSet::new();
    let mut facets = Vec::new();
    for i in 0..rows {
        let face: Vec<usize> = (0..vertices.len()).filter(|&v| incidences[v].contains(&i)).collect();
        if face.is_empty() || face.len() == vertices.len() {
            continue;
        }
        let points: Vec<&Vec<Rational>> = face.iter().map(|&v| &vertices[v]).collect();
        if affine_rank(&points) + 1 == dimension && seen.insert(face) {
            facets.push(i);
        }
    }
    facets
}

/// Dimension of the affine hull of a nonempty point set.
pub fn affine_rank(points: &[&Vec<Rational>]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    if rest.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Rational>> =
        rest.iter().map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect()).collect();
    ExactMatrix::from_rows(&rows).expect("equal lengths").rank()
}

pub fn barycenter(points: &[Vec<Rational>]) -> Vec<Rational> {
    let k = Rational::from_integer(BigInt::from(points.len()));
    let dim = points.first().map_or(0, Vec::len);
    (0..dim).map(|j| points.iter().map(|p| &p[j]).sum::<Rational>() / &k).collect()
}

/// Facet representation `{y in R^m : W y + c >= 0}` with `k` inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    w: ExactMatrix,
    c: Vec<Rational>,
}

/// Vertices of an [`HRep`] and the inequalities tight at each of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HVertexData {
    pub vertices: Vec<Vec<Rational>>,
    /// Tight inequality indices of each vertex.
    pub incidences: Vec<Vec<usize>>,
    /// Inequalities supporting a facet (smallest index per distinct facet).
    pub facets: Vec<usize>,
    pub dimension: usize,
}

impl HRep {
    pub fn new(w: ExactMatrix, c: Vec<Rational>) -> Result<Self> {
        if w.rows() != c.len() {
            return Err(Error::Dimension(format!("W has {} rows but c has length {}", w.rows(), c.len())));
        }
        Ok(Self { w, c })
    }

    pub fn w(&self) -> &ExactMatrix {
        &self.w
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// Number of inequalities.
    pub fn k(&self) -> usize {
        self.w.rows()
    }

    /// Ambient dimension.
    pub fn m(&self) -> usize {
        self.w.cols()
    }

    pub fn normal(&self, i: usize) -> &[Rational] {
        self.w.row(i)
    }

    /// Values `l_i(y) = <w_i, y> + c_i`.
    pub fn forms(&self, y: &[Rational]) -> Vec<Rational> {
        (0..self.k()).map(|i| dot(self.w.row(i), y) + &self.c[i]).collect()
    }

    pub fn forms_f64(&self, y: &[f64]) -> Vec<f64> {
        let w = self.w.to_f64_rows();
        let c = exact::to_f64_vec(&self.c);
        w.iter().zip(&c).map(|(row, ci)| row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + ci).collect()
    }

    pub fn contains_strictly(&self, y: &[Rational]) -> bool {
        self.forms(y).iter().all(Signed::is_positive)
    }

    /// `Q + t`, i.e. the inequalities `<w_i, y - t> + c_i >= 0`.
    pub fn shifted(&self, t: &[Rational]) -> HRep {
        let c = (0..self.k()).map(|i| &self.c[i] - dot(self.w.row(i), t)).collect();
        HRep { w: self.w.clone(), c }
    }

    /// Rows `(w_i, c_i)` scaled to primitive integers and sorted; two
    /// representations are equal up to positive row scaling and row
    /// permutation exactly when these agree.
    pub fn normalized_rows(&self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> = (0..self.k())
            .map(|i| {
                let mut r = self.w.row(i).to_vec();
                r.push(self.c[i].clone());
                primitive_integer(&r)
            })
            .collect();
        rows.sort();
        rows
    }

    pub fn equivalent(&self, other: &HRep) -> bool {
        self.m() == other.m() && self.normalized_rows() == other.normalized_rows()
    }

    /// Errors with [`Error::Unbounded`] unless some `lambda > 0` has
    /// `W^T lambda = 0`, which holds exactly for bounded nonempty polyhedra.
    pub fn check_bounded(&self) -> Result<Vec<Rational>> {
        positive_left_kernel_vector(&self.w).ok_or(Error::Unbounded)
    }

    /// Exact vertex enumeration over all `m`-subsets of inequalities.
    pub fn vertex_data(&self) -> Result<HVertexData> {
        let m = self.m();
        let k = self.k();
        let rank = self.w.rank();
        if rank != m {
            return Err(Error::RankDeficient { expected: m, found: rank });
        }
        self.check_bounded()?;
        let mut found = BTreeSet::new();
        for s in subsets(k, m) {
            let sub = self.w.select_rows(&s);
            let rhs: Vec<Rational> = s.iter().map(|&i| -self.c[i].clone()).collect();
            let Ok(y) = sub.solve(&rhs) else {
                continue;
            };
            if self.forms(&y).iter().all(|v| !v.is_negative()) {
                found.insert(y);
            }
        }
        if found.is_empty() {
            return Err(Error::InvalidInput("facet representation describes an empty set".into()));
        }
        let vertices: Vec<Vec<Rational>> = found.into_iter().collect();
        let incidences: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| self.forms(v).iter().enumerate().filter(|(_, l)| l.is_zero()).map(|(i, _)| i).collect())
            .collect();
        let dimension = affine_rank(&vertices.iter().collect::<Vec<_>>());
        let facets = facet_indices(&vertices, &incidences, k, dimension);
        Ok(HVertexData { vertices, incidences, facets, dimension })
    }

    /// Whether every inequality supports a distinct facet.
    pub fn is_minimal(&self) -> Result<bool> {
        Ok(self.vertex_data()?.facets.len() == self.k())
    }

    /// Checks full dimension and minimality, returning the vertex data.
    pub fn require_minimal(&self) -> Result<HVertexData> {
        let vd = self.vertex_data()?;
        if vd.dimension != self.m() {
            return Err(Error::NotFullDimensional { dimension: vd.dimension, expected: self.m() });
        }
        if let Some(index) = (0..self.k()).find(|i| !vd.facets.contains(i)) {
            return Err(Error::NotMinimal { index });
        }
        Ok(vd)
    }

    /// Drops redundant inequalities and duplicate facet hyperplanes (keeping
    /// the first), then scales every row `(w_i, c_i)` to primitive integers.
    pub fn canonicalize(&self) -> Result<HRep> {
        let vd = self.vertex_data()?;
        if vd.dimension != self.m() {
            return Err(Error::NotFullDimensional { dimension: vd.dimension, expected: self.m() });
        }
        let mut rows = Vec::new();
        let mut c = Vec::new();
        for &i in &vd.facets {
            let mut r = self.w.row(i).to_vec();
            r.push(self.c[i].clone());
            let p = primitive_integer(&r);
            let (last, head) = p.split_last().expect("nonempty row");
            rows.push(exact::integer_to_rational(head));
            c.push(Rational::from_integer(last.clone()));
        }
        HRep::new(ExactMatrix::from_rows(&rows)?, c)
    }

    /// Vertex barycenter, an interior point of a full-dimensional polytope.
    pub fn barycenter(&self) -> Result<Vec<Rational>> {
        Ok(barycenter(&self.vertex_data()?.vertices))
    }

    /// Left inverse `W^+ = (W^T W)^{-1} W^T`.
    pub fn left_inverse(&self) -> Result<ExactMatrix> {
        let wt = self.w.transpose();
        wt.mul(&self.w)?.inverse()?.mul(&wt)
    }
}

/// `lambda >= 1` with `m^T lambda = 0`, if one exists.
fn positive_left_kernel_vector(m: &ExactMatrix) -> Option<Vec<Rational>> {
    // lambda = 1 + mu, mu >= 0, so m^T mu = -m^T 1.
    let mt = m.transpose();
    let ones = vec![Rational::one(); m.rows()];
    let rhs: Vec<Rational> = mt.mul_vec(&ones).expect("dims").into_iter().map(|v| -v).collect();
    let mu = feasible_point(&mt, &rhs)?;
    Some(mu.into_iter().map(|v| v + Rational::one()).collect())
}

impl HVertexData {
    /// Every vertex is on exactly `m` facets.
    pub fn is_simple(&self, m: usize) -> bool {
        self.simplicity_violation(m).is_none()
    }

    pub fn simplicity_violation(&self, m: usize) -> Option<(usize, usize)> {
        self.incidences
            .iter()
            .map(|inc| inc.iter().filter(|i| self.facets.contains(i)).count())
            .enumerate()
            .find(|&(_, count)| count != m)
    }

    /// Facets containing each vertex.
    pub fn facet_incidences(&self) -> Vec<Vec<usize>> {
        self.incidences.iter().map(|inc| inc.iter().copied().filter(|i| self.facets.contains(i)).collect()).collect()
    }
}

/// Vertex data of `Q_b` in `y` coordinates.
pub fn project_q(fp: &FiberProblem) -> Result<HRep> {
    let vd = fp.vertex_data()?;
    if !vd.is_full_dimensional() {
        return Err(Error::NotFullDimensional { dimension: vd.dimension, expected: fp.m() });
    }
    let all = fp.coordinate_forms()?;
    let w = all.w.select_rows(&vd.facets);
    let c = vd.facets.iter().map(|&i| all.c[i].clone()).collect();
    HRep::new(w, c)
}

/// A fiber realizing a facet representation: `P_b = W Q + c` with `b = A c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberEmbedding {
    pub fiber: FiberProblem,
    pub hrep: HRep,
    /// `W^+`, mapping `x` back to `y = W^+ (x - c)`.
    pub left_inverse: ExactMatrix,
}

impl FiberEmbedding {
    pub fn to_x(&self, y: &[Rational]) -> Vec<Rational> {
        self.hrep.forms(y)
    }

    pub fn to_y(&self, x: &[Rational]) -> Vec<Rational> {
        let diff: Vec<Rational> = x.iter().zip(self.hrep.c()).map(|(a, b)| a - b).collect();
        self.left_inverse.mul_vec(&diff).expect("dims")
    }

    pub fn to_y_f64(&self, x: &[f64]) -> Vec<f64> {
        let c = exact::to_f64_vec(self.hrep.c());
        let li = self.left_inverse.to_f64_rows();
        li.iter().map(|row| row.iter().zip(x.iter().zip(&c)).map(|(l, (xi, ci))| l * (xi - ci)).sum()).collect()
    }

    /// Offset `W^+ c` between `y` and the coordinates `B^T x` of the fiber.
    pub fn translation(&self) -> Vec<Rational> {
        self.left_inverse.mul_vec(self.hrep.c()).expect("dims")
    }
}

/// Builds `A` with `A W = 0`, nonnegative entries and no zero column, and
/// `b = A c`, so that `x = W y + c` maps `Q` onto `P_b`.
///
/// The first row of `A` is a strictly positive vector of the left kernel of
/// `W`; the remaining rows are further left-kernel vectors shifted by
/// multiples of the first row until nonnegative. The kernel basis of the
/// fiber is `B = W (W^T W)^{-1}`, so `B^T x = y + W^+ c`.
pub fn hrep_to_fiber(h: &HRep) -> Result<FiberEmbedding> {
    let (k, m) = (h.k(), h.m());
    let rank = h.w.rank();
    if rank != m {
        return Err(Error::RankDeficient { expected: m, found: rank });
    }
    if k <= m {
        return Err(Error::Unbounded);
    }
    let lambda = h.check_bounded()?;
    let first = primitive_integer(&lambda);
    let d = k - m;
    let mut rows = vec![exact::integer_to_rational(&first)];
    let left_kernel = h.w.transpose().kernel_basis()?;
    for j in 0..left_kernel.cols() {
        if rows.len() == d {
            break;
        }
        let mut candidate = rows.clone();
        candidate.push(left_kernel.column(j));
        if ExactMatrix::from_rows(&candidate)?.rank() == candidate.len() {
            rows = candidate;
        }
    }
    let pos = exact::integer_to_rational(&first);
    for r in rows.iter_mut().skip(1) {
        let t = r.iter().zip(&pos).map(|(ri, li)| -(ri / li)).max().expect("nonempty row").max(Rational::zero());
        let shifted: Vec<Rational> = r.iter().zip(&pos).map(|(ri, li)| ri + &t * li).collect();
        *r = exact::integer_to_rational(&primitive_integer(&shifted));
    }
    let a = ExactMatrix::from_rows(&rows)?;
    let b = a.mul_vec(&h.c)?;
    let left_inverse = h.left_inverse()?;
    let kernel = left_inverse.transpose();
    let fiber = FiberProblem::with_kernel(a, b, kernel)?;
    Ok(FiberEmbedding { fiber, hrep: h.clone(), left_inverse })
}
