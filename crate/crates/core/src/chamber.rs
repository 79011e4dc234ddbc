//! Cells of the chamber complex of `A`.
//!
//! The chamber of `b` is the intersection of all simplicial cones
//! `cone(A_sigma)` containing `b`. Within the interior of a cell the fiber
//! `P_b` has constant combinatorial type, recorded as the facet support `F_C`
//! and the vertex family `V_C`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exact::{
    dot, integer_to_rational, normalize_sign, primitive_integer, strict_interior_point, subsets, ExactMatrix, Rational,
};
use crate::polytope::{cone_facets, hyperplane_through, FiberProblem, VertexData};
use crate::{Error, Result};

/// Largest number of candidate walls [`enumerate_cells`] will process.
pub const MAX_WALLS: usize = 64;

/// Largest fiber dimension `n - d` accepted by [`enumerate_cells`].
pub const MAX_FIBER_DIMENSION: usize = 3;

/// A full-dimensional cell `C` of the chamber complex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    /// `F_C`: indices whose coordinate hyperplane cuts a facet of `P_b`.
    pub facet_support: Vec<usize>,
    /// `V_C`: the facet sets `I(v)` of the vertices, sorted.
    pub vertex_family: Vec<Vec<usize>>,
    /// Primitive inward normals `h` with `C = {b : h . b >= 0}`, sorted.
    pub inequalities: Vec<Vec<BigInt>>,
}

impl Cell {
    /// `n_C = |F_C|`.
    pub fn n_c(&self) -> usize {
        self.facet_support.len()
    }

    /// Membership in the closed cell.
    pub fn contains(&self, b: &[Rational]) -> bool {
        self.values(b).all(|v| !v.is_negative())
    }

    pub fn contains_interior(&self, b: &[Rational]) -> bool {
        self.values(b).all(|v| v.is_positive())
    }

    fn values<'a>(&'a self, b: &'a [Rational]) -> impl Iterator<Item = Rational> + 'a {
        self.inequalities.iter().map(move |h| dot(&integer_to_rational(h), b))
    }

    /// A rational point in the interior of the cell.
    pub fn interior_point(&self) -> Vec<Rational> {
        let rows: Vec<Vec<Rational>> = self.inequalities.iter().map(|h| integer_to_rational(h)).collect();
        let r = ExactMatrix::from_rows(&rows).expect("uniform rows");
        strict_interior_point(&r).expect("cells are full-dimensional")
    }

    fn from_parts(vd: &VertexData, inequalities: Vec<Vec<BigInt>>) -> Self {
        let mut vertex_family = vd.facet_incidences.clone();
        vertex_family.sort();
        Self { facet_support: vd.facets.clone(), vertex_family, inequalities }
    }
}

/// The cell whose interior contains `b`.
///
/// Errors with [`Error::OnWall`] (carrying the wall's normal) when `b` lies on
/// a wall, with [`Error::NotFullDimensional`] when `b` lies on the boundary of
/// `cone(A)`, and with [`Error::Infeasible`] when `b` is outside `cone(A)`.
pub fn cell_of(a: &ExactMatrix, b: &[Rational]) -> Result<Cell> {
    let fp = FiberProblem::new(a.clone(), b.to_vec())?;
    let d = a.rows();
    let n = a.cols();
    let boundary = cone_facets(a);
    if boundary.iter().any(|h| dot(&integer_to_rational(h), b).is_zero()) {
        let vd = fp.vertex_data()?;
        return Err(Error::NotFullDimensional { dimension: vd.dimension, expected: n - d });
    }
    let mut rows = BTreeSet::new();
    for sigma in subsets(n, d) {
        let sub = a.select_columns(&sigma);
        let Ok(inv) = sub.inverse() else {
            continue;
        };
        let lambda = inv.mul_vec(b)?;
        if lambda.iter().any(Signed::is_negative) {
            continue;
        }
        if let Some(j) = lambda.iter().position(Zero::is_zero) {
            let rest: Vec<usize> = sigma.iter().copied().filter(|&c| c != sigma[j]).collect();
            let normal = hyperplane_through(a, &rest).expect("columns of a basis are independent");
            return Err(Error::OnWall { normal: normalize_sign(normal) });
        }
        for r in 0..d {
            rows.insert(primitive_integer(inv.row(r)));
        }
    }
    let inequalities = irredundant(rows.into_iter().collect());
    let vd = fp.vertex_data()?;
    Ok(Cell::from_parts(&vd, inequalities))
}

/// Removes inequalities implied by the others. For a full-dimensional cone
/// `{h . b >= 0}`, the row `h_j` is implied exactly when it lies in the cone
/// spanned by the remaining rows.
fn irredundant(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut j = 0;
    while j < rows.len() {
        let others: Vec<Vec<Rational>> =
            rows.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, h)| integer_to_rational(h)).collect();
        let implied = !others.is_empty() && {
            let gens = ExactMatrix::from_columns(&others).expect("uniform rows");
            crate::exact::cone_contains(&gens, &integer_to_rational(&rows[j]))
        };
        if implied {
            rows.remove(j);
        } else {
            j += 1;
        }
    }
    rows.sort();
    rows
}

/// Whether `b1` lies in the closed cell whose interior contains `b0`.
pub fn same_cell(a: &ExactMatrix, b0: &[Rational], b1: &[Rational]) -> Result<bool> {
    if b1.len() != a.rows() {
        return Err(Error::Dimension("b1 length".into()));
    }
    Ok(cell_of(a, b0)?.contains(b1))
}

/// All full-dimensional cells, sorted by their inequalities.
///
/// The candidate walls are the hyperplanes spanned by `d - 1` columns of `A`.
/// Their arrangement inside `cone(A)` refines the chamber complex; each region
/// is sampled at an exact interior point, classified with [`cell_of`], and
/// regions belonging to the same cell are merged.
pub fn enumerate_cells(a: &ExactMatrix) -> Result<Vec<Cell>> {
    let d = a.rows();
    let n = a.cols();
    if n <= d {
        return Err(Error::Dimension(format!("need n > d, got n = {}, d = {}", n, d)));
    }
    if n - d > MAX_FIBER_DIMENSION {
        return Err(Error::SizeGuard(format!("fiber dimension {} exceeds {}", n - d, MAX_FIBER_DIMENSION)));
    }
    // Validates A as a side effect.
    FiberProblem::new(a.clone(), (0..d).map(|i| a.row(i).iter().sum()).collect())?;
    let boundary = cone_facets(a);
    let mut walls = BTreeSet::new();
    for s in subsets(n, d - 1) {
        if let Some(h) = hyperplane_through(a, &s) {
            let h = normalize_sign(h);
            let negated: Vec<BigInt> = h.iter().map(|z| -z).collect();
            if !boundary.contains(&h) && !boundary.contains(&negated) {
                walls.insert(h);
            }
        }
        if walls.len() > MAX_WALLS {
            return Err(Error::SizeGuard(format!("more than {} candidate walls", MAX_WALLS)));
        }
    }

    let as_rows = |hs: &[Vec<BigInt>]| {
        let rows: Vec<Vec<Rational>> = hs.iter().map(|h| integer_to_rational(h)).collect();
        ExactMatrix::from_rows(&rows).expect("uniform rows")
    };
    let mut regions: Vec<Vec<Vec<BigInt>>> = alloc::vec![boundary];
    for h in &walls {
        let negated: Vec<BigInt> = h.iter().map(|z| -z).collect();
        let mut next = Vec::with_capacity(regions.len() * 2);
        for region in regions {
            let mut plus = region.clone();
            plus.push(h.clone());
            let mut minus = region.clone();
            minus.push(negated.clone());
            let p = strict_interior_point(&as_rows(&plus)).is_some();
            let m = strict_interior_point(&as_rows(&minus)).is_some();
            match (p, m) {
                (true, true) => {
                    next.push(plus);
                    next.push(minus);
                }
                (true, false) => next.push(plus),
                (false, true) => next.push(minus),
                (false, false) => unreachable!("regions are full-dimensional"),
            }
        }
        regions = next;
    }

    let mut cells = BTreeSet::new();
    for region in &regions {
        let point = strict_interior_point(&as_rows(region)).expect("full-dimensional region");
        cells.insert(cell_of(a, &point)?);
    }
    let mut cells: Vec<Cell> = cells.into_iter().collect();
    cells.sort_by(|x, y| x.inequalities.cmp(&y.inequalities));
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, integer_vec, rat, rational_vec};

    fn pentagon_a() -> ExactMatrix {
        ExactMatrix::from_integers(&[[1, 1, 1, 1, 1], [2, 1, 0, 1, 0], [1, 2, 0, 0, 1]])
    }

    fn segment_a() -> ExactMatrix {
        ExactMatrix::from_integers(&[[2, 1, 0], [0, 1, 2]])
    }

    fn quadrilateral_a() -> ExactMatrix {
        ExactMatrix::from_integers(&[[1, 1, 1, 1], [0, 1, 2, 3]])
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn pentagon_central_cell() {
        let cell = cell_of(&pentagon_a(), &rational_vec(&[(1, 1), (4, 5), (4, 5)])).unwrap();
        assert_eq!(cell.facet_support, vec![0, 1, 2, 3, 4]);
        assert_eq!(cell.vertex_family.len(), 5);
        assert_eq!(cell.inequalities.len(), 5);
    }

    #[test]
    fn segment_cell() {
        let cell = cell_of(&segment_a(), &integer_vec(&[1, 2])).unwrap();
        assert_eq!(cell.facet_support, vec![0, 1]);
        // b1 <= b2 together with the cone boundary b1 >= 0.
        assert_eq!(cell.inequalities, vec![big(&[-1, 1]), big(&[1, 0])]);
    }

    #[test]
    fn quadrilateral_middle_cell() {
        let cell = cell_of(&quadrilateral_a(), &rational_vec(&[(1, 1), (3, 2)])).unwrap();
        assert_eq!(cell.facet_support, vec![0, 1, 2, 3]);
        assert_eq!(cell.vertex_family, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
        // b1 <= b2 and 2 b1 >= b2.
        assert_eq!(cell.inequalities, vec![big(&[-1, 1]), big(&[2, -1])]);
    }

    #[test]
    fn wall_and_boundary_errors() {
        let a = segment_a();
        assert_eq!(cell_of(&a, &integer_vec(&[1, 1])), Err(Error::OnWall { normal: big(&[1, -1]) }));
        assert!(matches!(cell_of(&a, &integer_vec(&[1, 0])), Err(Error::NotFullDimensional { .. })));
        assert!(matches!(cell_of(&a, &integer_vec(&[1, -1])), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn same_cell_examples() {
        let a = pentagon_a();
        let b0 = rational_vec(&[(1, 1), (4, 5), (4, 5)]);
        assert!(same_cell(&a, &b0, &rational_vec(&[(1, 1), (1, 1), (4, 5)])).unwrap());
        assert!(!same_cell(&a, &b0, &rational_vec(&[(1, 1), (6, 5), (4, 5)])).unwrap());
        let doubled: Vec<Rational> = b0.iter().map(|v| v * int(2)).collect();
        assert!(same_cell(&a, &b0, &doubled).unwrap());
        let boundary_cell = cell_of(&a, &b0).unwrap();
        assert!(!boundary_cell.contains_interior(&rational_vec(&[(1, 1), (1, 1), (4, 5)])));
    }

    #[test]
    fn scaling_keeps_cell() {
        let a = pentagon_a();
        let b = rational_vec(&[(1, 1), (6, 5), (4, 5)]);
        let scaled: Vec<Rational> = b.iter().map(|v| v * rat(7, 3)).collect();
        assert_eq!(cell_of(&a, &b).unwrap(), cell_of(&a, &scaled).unwrap());
    }

    #[test]
    fn cell_counts() {
        let cells = enumerate_cells(&pentagon_a()).unwrap();
        assert_eq!(cells.len(), 11);
        let count = |k: usize| cells.iter().filter(|c| c.n_c() == k).count();
        assert_eq!((count(5), count(4), count(3)), (1, 5, 5));
        assert_eq!(enumerate_cells(&segment_a()).unwrap().len(), 2);
        assert_eq!(enumerate_cells(&quadrilateral_a()).unwrap().len(), 3);
        for cell in &cells {
            let p = cell.interior_point();
            assert_eq!(&cell_of(&pentagon_a(), &p).unwrap(), cell);
        }
    }

    #[test]
    fn simplex_has_one_cell() {
        let a = ExactMatrix::from_integers(&[[1, 1, 1]]);
        let cells = enumerate_cells(&a).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].inequalities, vec![big(&[1])]);
    }

    #[test]
    fn size_guard() {
        let a = ExactMatrix::from_integers(&[[1, 1, 1, 1, 1, 1]]);
        assert!(matches!(enumerate_cells(&a), Err(Error::SizeGuard(_))));
    }
}
