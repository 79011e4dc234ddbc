use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{clear_denominators, primitive_integer, Rational};
use crate::{Error, Result};

/// Dense matrix of exact rationals, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for q in self.row(r) {
                write!(f, "{} ", q)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {}x{} matrix", entries.len(), rows, cols)));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from equally long rows. An empty slice gives a 0x0 matrix.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, entries: rows.iter().flatten().cloned().collect() })
    }

    /// Convenience constructor for small integer matrices.
    pub fn from_integers<const C: usize>(rows: &[[i64; C]]) -> Self {
        Self {
            rows: rows.len(),
            cols: C,
            entries: rows.iter().flatten().map(|&v| Rational::from_integer(v.into())).collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, entries }
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|r| super::dot(self.row(r), v)).collect())
    }

    pub fn scale(&self, s: &Rational) -> ExactMatrix {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|q| q * s).collect() }
    }

    pub fn select_columns(&self, cols: &[usize]) -> ExactMatrix {
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> ExactMatrix {
        self.submatrix(rows, &(0..self.cols).collect::<Vec<_>>())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ExactMatrix {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                entries.push(self.get(r, c).clone());
            }
        }
        Self { rows: rows.len(), cols: cols.len(), entries }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack of matrices with different widths".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn hstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        Ok(self.transpose().vstack(&other.transpose())?.transpose())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| super::to_f64_vec(self.row(r))).collect()
    }

    /// Row-wise integer scaling used by the fraction-free routines.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut scale = BigInt::one();
        let rows = (0..self.rows)
            .map(|r| {
                let (row, s) = clear_denominators(self.row(r));
                scale *= s;
                row
            })
            .collect();
        (rows, scale)
    }

    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let (mut m, _) = self.integer_rows();
        fraction_free_echelon(&mut m, self.cols)
    }

    /// Determinant of a square matrix (Bareiss).
    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let (m, scale) = self.integer_rows();
        Ok(Rational::new(bareiss_determinant(m), scale))
    }

    /// Determinant of the submatrix selected by `rows` and `cols`. Empty
    /// selections have determinant one.
    pub fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Result<Rational> {
        if rows.len() != cols.len() {
            return Err(Error::NotSquare { rows: rows.len(), cols: cols.len() });
        }
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::Dimension("index out of range".into()));
        }
        self.submatrix(rows, cols).determinant()
    }

    /// Basis of the right kernel with primitive integer columns.
    ///
    /// Requires full row rank; the basis is read off the reduced row echelon
    /// form with pivots chosen left to right, one column per free variable.
    pub fn kernel_basis(&self) -> Result<ExactMatrix> {
        let (rref, pivots) = self.rref();
        if pivots.len() < self.rows {
            return Err(Error::RankDeficient { expected: self.rows, found: pivots.len() });
        }
        Ok(kernel_from_rref(&rref, &pivots, self.cols))
    }

    /// Kernel basis without the full-row-rank requirement.
    pub fn nullspace(&self) -> ExactMatrix {
        let (rref, pivots) = self.rref();
        kernel_from_rref(&rref, &pivots, self.cols)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..self.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..self.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Solves `self * x = v` for square nonsingular `self`.
    pub fn solve(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if v.len() != self.rows {
            return Err(Error::Dimension("right-hand side length".into()));
        }
        let rhs = ExactMatrix { rows: v.len(), cols: 1, entries: v.to_vec() };
        Ok(self.solve_matrix(&rhs)?.entries)
    }

    /// Solves `self * X = rhs` column by column.
    pub fn solve_matrix(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        let n = self.rows;
        if self.cols != n {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let aug = self.hstack(rhs)?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let cols: Vec<usize> = (n..n + rhs.cols).collect();
        Ok(r.submatrix(&(0..n).collect::<Vec<_>>(), &cols))
    }

    pub fn inverse(&self) -> Result<ExactMatrix> {
        self.solve_matrix(&ExactMatrix::identity(self.rows))
    }

    /// Entries of the matrix as primitive integer rows (each row scaled by a
    /// positive factor).
    pub fn primitive_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| primitive_integer(self.row(r))).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|q| !q.is_negative())
    }
}

fn kernel_from_rref(rref: &ExactMatrix, pivots: &[usize], cols: usize) -> ExactMatrix {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -rref.get(r, f).clone();
        }
        let prim = primitive_integer(&v);
        basis.push(prim.into_iter().map(Rational::from_integer).collect::<Vec<_>>());
    }
    if basis.is_empty() {
        return ExactMatrix::zeros(cols, 0);
    }
    ExactMatrix::from_columns(&basis).expect("uniform kernel vectors")
}

/// In-place fraction-free row echelon form; returns the rank. Every entry
/// below the current pivot stays a minor of the input, so the division by the
/// previous pivot is exact.
fn fraction_free_echelon(m: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn pentagon() -> ExactMatrix {
        ExactMatrix::from_integers(&[[1, 1, 1, 1, 1], [2, 1, 0, 1, 0], [1, 2, 0, 0, 1]])
    }

    // Cofactor expansion along the first row; independent of Bareiss.
    fn cofactor_det(m: &ExactMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        let mut acc = Rational::zero();
        for c in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&j| j != c).collect();
            let term = m.get(0, c) * cofactor_det(&m.submatrix(&rows, &cols));
            if c % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn rank_examples() {
        assert_eq!(pentagon().rank(), 3);
        assert_eq!(ExactMatrix::zeros(2, 2).rank(), 0);
        assert_eq!(ExactMatrix::identity(4).rank(), 4);
        let dependent = ExactMatrix::from_integers(&[[1, 2, 3], [2, 4, 6], [0, 0, 1]]);
        assert_eq!(dependent.rank(), 2);
    }

    #[test]
    fn pentagon_minor_complement_of_first_vertex() {
        // Columns {3,4,5} (1-based): [[1,1,1],[0,1,0],[0,0,1]] is unit upper triangular.
        let a = pentagon();
        assert_eq!(a.minor_det(&[0, 1, 2], &[2, 3, 4]).unwrap(), int(1));
        // Columns {1,2,3}: expanding along the third column gives 1 * (2*2 - 1*1) = 3.
        assert_eq!(a.minor_det(&[0, 1, 2], &[0, 1, 2]).unwrap(), int(3));
        assert_eq!(a.minor_det(&[], &[]).unwrap(), int(1));
        let singular = ExactMatrix::from_integers(&[[1, 2], [2, 4]]);
        assert_eq!(singular.determinant().unwrap(), int(0));
        assert!(matches!(a.minor_det(&[0, 1], &[0]), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn determinant_of_rational_matrix() {
        let m = ExactMatrix::from_rows(&[vec![rat(1, 2), rat(1, 3)], vec![rat(2, 5), int(7)]]).unwrap();
        assert_eq!(m.determinant().unwrap(), rat(7, 2) - rat(2, 15));
        assert_eq!(m.determinant().unwrap(), cofactor_det(&m));
    }

    #[test]
    fn pentagon_kernel_spans_reference_basis() {
        let a = pentagon();
        let b = a.kernel_basis().unwrap();
        assert_eq!((b.rows(), b.cols()), (5, 2));
        assert!(a.mul(&b).unwrap().is_zero());
        assert_eq!(b.rank(), 2);
        // Reference basis (scaled by 18): columns (5,-4,2,-6,3) and (-4,5,2,3,-6).
        let reference = ExactMatrix::from_integers(&[[5, -4], [-4, 5], [2, 2], [-6, 3], [3, -6]]);
        assert!(a.mul(&reference).unwrap().is_zero());
        assert_eq!(b.hstack(&reference).unwrap().rank(), 2);
        assert!(b.entries().iter().all(|q| q.is_integer()));
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let a = ExactMatrix::from_integers(&[[1, 1, 1, 1]]);
        let b = a.kernel_basis().unwrap();
        assert_eq!((b.rows(), b.cols()), (4, 3));
        for c in 0..3 {
            let s: Rational = b.column(c).iter().sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn segment_kernel_is_one_minus_two_one() {
        let a = ExactMatrix::from_integers(&[[2, 1, 0], [0, 1, 2]]);
        let b = a.kernel_basis().unwrap();
        let col = b.column(0);
        let reference = [int(1), int(-2), int(1)];
        let ratio = &col[0] / &reference[0];
        assert!(col.iter().zip(&reference).all(|(x, r)| x == &(r * &ratio)));
    }

    #[test]
    fn kernel_rejects_dependent_rows() {
        let a = ExactMatrix::from_integers(&[[1, 1, 1], [2, 2, 2]]);
        assert_eq!(a.kernel_basis(), Err(Error::RankDeficient { expected: 2, found: 1 }));
    }

    #[test]
    fn solve_and_inverse() {
        let m = ExactMatrix::from_integers(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]);
        let x = vec![rat(1, 2), int(-3), rat(5, 7)];
        let v = m.mul_vec(&x).unwrap();
        assert_eq!(m.solve(&v).unwrap(), x);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), ExactMatrix::identity(3));
        let singular = ExactMatrix::from_integers(&[[1, 2], [2, 4]]);
        assert_eq!(singular.solve(&[int(1), int(2)]), Err(Error::Singular));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix(n: usize) -> impl Strategy<Value = ExactMatrix> {
            proptest::collection::vec((-6i64..=6, 1i64..=4), n * n)
                .prop_map(move |v| ExactMatrix::new(n, n, v.into_iter().map(|(p, q)| rat(p, q)).collect()).unwrap())
        }

        proptest! {
            #[test]
            fn bareiss_matches_cofactor_expansion(m in (0usize..=4).prop_flat_map(small_matrix)) {
                prop_assert_eq!(m.determinant().unwrap(), cofactor_det(&m));
            }

            #[test]
            fn solve_recovers_x(
                m in (1usize..=6).prop_flat_map(small_matrix),
                seed in proptest::collection::vec((-9i64..=9, 1i64..=5), 6),
            ) {
                prop_assume!(!m.determinant().unwrap().is_zero());
                let x: Vec<Rational> = seed[..m.rows()].iter().map(|&(p, q)| rat(p, q)).collect();
                let v = m.mul_vec(&x).unwrap();
                prop_assert_eq!(m.solve(&v).unwrap(), x);
            }
        }
    }
}
