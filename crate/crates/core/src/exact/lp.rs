//! Exact feasibility linear programs (phase-one simplex, Bland's rule).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{ExactMatrix, Rational};

/// Returns some `x >= 0` with `m * x = q`, or `None` if none exists.
pub fn feasible_point(m: &ExactMatrix, q: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(m.rows(), q.len(), "right-hand side length");
    let rows = m.rows();
    let cols = m.cols();
    let width = cols + rows + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(rows + 1);
    for i in 0..rows {
        let flip = q[i].is_negative();
        let mut row = vec![Rational::zero(); width];
        for (j, slot) in row.iter_mut().enumerate().take(cols) {
            *slot = if flip { -m.get(i, j).clone() } else { m.get(i, j).clone() };
        }
        row[cols + i] = Rational::one();
        row[width - 1] = if flip { -q[i].clone() } else { q[i].clone() };
        t.push(row);
    }
    // Objective row: reduced costs of the phase-one problem min sum(artificials).
    let mut obj = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..cols {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    loop {
        let obj = &t[rows];
        let Some(enter) = (0..cols + rows).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so a leaving row always exists.
        let (p, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut t, p, enter);
        basis[p] = enter;
    }

    if !t[rows][width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &v) in basis.iter().enumerate() {
        if v < cols {
            x[v] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], p: usize, c: usize) {
    let inv = t[p][c].recip();
    for v in t[p].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == p || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

/// Whether `target` lies in the cone spanned by the columns of `generators`.
pub fn cone_contains(generators: &ExactMatrix, target: &[Rational]) -> bool {
    feasible_point(generators, target).is_some()
}

/// Returns some `v` with `r * v >= 1` row-wise (a point strictly inside the
/// cone `{r * v >= 0}`), or `None` if that cone has empty interior.
pub fn strict_interior_point(r: &ExactMatrix) -> Option<Vec<Rational>> {
    let k = r.rows();
    let d = r.cols();
    if k == 0 {
        return Some(vec![Rational::zero(); d]);
    }
    // r * (p - n) - s = 1 with p, n, s >= 0.
    let mut m = ExactMatrix::zeros(k, 2 * d + k);
    for i in 0..k {
        for j in 0..d {
            m.set(i, j, r.get(i, j).clone());
            m.set(i, d + j, -r.get(i, j).clone());
        }
        m.set(i, 2 * d + i, -Rational::one());
    }
    let sol = feasible_point(&m, &vec![Rational::one(); k])?;
    Some((0..d).map(|j| &sol[j] - &sol[d + j]).collect())
}
