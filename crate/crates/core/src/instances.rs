//! Named test polytopes and a generator of random polygons.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{int, integer_vec, rat, rational_vec, ExactMatrix};
use crate::polytope::{hrep_to_fiber, FiberEmbedding, FiberProblem, HRep};
use crate::Result;

/// Pentagon fiber with `A` of size `3 x 5` and `b = (1, 4/5, 4/5)`.
pub fn pentagon() -> FiberProblem {
    FiberProblem::with_kernel(pentagon_matrix(), rational_vec(&[(1, 1), (4, 5), (4, 5)]), pentagon_kernel())
        .expect("valid pentagon data")
}

pub fn pentagon_matrix() -> ExactMatrix {
    ExactMatrix::from_integers(&[[1, 1, 1, 1, 1], [2, 1, 0, 1, 0], [1, 2, 0, 0, 1]])
}

/// The kernel basis for which `B^T x` recovers the `y` coordinates of
/// [`pentagon_hrep`].
pub fn pentagon_kernel() -> ExactMatrix {
    ExactMatrix::from_integers(&[[5, -4], [-4, 5], [2, 2], [-6, 3], [3, -6]]).scale(&rat(1, 18))
}

/// `{y : W y + 1/5 >= 0}` with rows `(1,0), (0,1), (2,2), (-2,-1), (-1,-2)`.
pub fn pentagon_hrep() -> HRep {
    let w = ExactMatrix::from_integers(&[[1, 0], [0, 1], [2, 2], [-2, -1], [-1, -2]]);
    HRep::new(w, vec![rat(1, 5); 5]).expect("valid pentagon facets")
}

/// Segment fiber `A = (2 1 0; 0 1 2)`, `b = (1, 2)`.
pub fn segment() -> FiberProblem {
    FiberProblem::new(ExactMatrix::from_integers(&[[2, 1, 0], [0, 1, 2]]), integer_vec(&[1, 2])).expect("valid segment")
}

/// Quadrilateral fiber `A = (1 1 1 1; 0 1 2 3)`, `b = (1, 3/2)`.
pub fn quadrilateral() -> FiberProblem {
    FiberProblem::new(ExactMatrix::from_integers(&[[1, 1, 1, 1], [0, 1, 2, 3]]), rational_vec(&[(1, 1), (3, 2)]))
        .expect("valid quadrilateral")
}

/// Square `[-1, 1]^2`.
pub fn square() -> HRep {
    HRep::new(ExactMatrix::from_integers(&[[1, 0], [-1, 0], [0, 1], [0, -1]]), integer_vec(&[1, 1, 1, 1]))
        .expect("valid square")
}

/// The permutahedron fiber: `A` is `11 x 14`, and `b` lies on a chamber wall
/// although the fiber is simple.
pub fn permutahedron() -> FiberProblem {
    let a = ExactMatrix::from_integers(&[
        [1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
        [0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1],
    ]);
    FiberProblem::new(a, integer_vec(&[3, 7, 4, 5, 5, 5, 3, 5, 5, 5, 7])).expect("valid permutahedron")
}

/// The permutahedron of `(1, 2, 3, 4)` projected to its last three
/// coordinates: `sum_{i in S} x_i >= |S| (|S| + 1) / 2` for proper nonempty
/// `S`, with `x_1 = 10 - y_1 - y_2 - y_3` and `(x_2, x_3, x_4) = y`.
pub fn permutahedron_hrep() -> HRep {
    let mut rows = Vec::new();
    let mut c = Vec::new();
    for mask in 1u32..15 {
        let size = mask.count_ones() as i64;
        let mut w = [0i64; 3];
        let mut constant = -size * (size + 1) / 2;
        if mask & 1 != 0 {
            constant += 10;
            w = [-1, -1, -1];
        }
        for j in 1..4 {
            if mask & (1 << j) != 0 {
                w[j - 1] += 1;
            }
        }
        rows.push(w.iter().map(|&v| int(v)).collect::<Vec<_>>());
        c.push(int(constant));
    }
    HRep::new(ExactMatrix::from_rows(&rows).expect("rectangular"), c).expect("valid permutahedron facets")
}

const DENOMINATOR: i64 = 97;

/// Rational point on the unit circle near angle `theta`, as integers
/// `(a, b, q)` with `(a/q)^2 + (b/q)^2 = 1`.
fn circle_point(theta: f64) -> (i64, i64, i64) {
    let pi = core::f64::consts::PI;
    let mut phi = theta % (2.0 * pi);
    if phi >= pi {
        phi -= 2.0 * pi;
    }
    let (flip, phi) = if phi.abs() <= pi / 2.0 {
        (1, phi)
    } else if phi > 0.0 {
        (-1, phi - pi)
    } else {
        (-1, phi + pi)
    };
    let half = num_traits::Float::tan(phi / 2.0);
    let p = (half * DENOMINATOR as f64).round() as i64;
    let q = DENOMINATOR;
    (flip * (q * q - p * p), flip * 2 * p * q, q * q + p * p)
}

/// A random convex polygon with `n >= 3` facets and rational data, containing
/// the origin. Facet normals are rational unit vectors at jittered, roughly
/// equally spaced angles; offsets are jittered around 1. Draws with parallel
/// edges or redundant facets are rejected.
pub fn random_polygon(n: usize, seed: u64) -> HRep {
    assert!(n >= 3, "a polygon needs at least three facets");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spacing = 2.0 * core::f64::consts::PI / n as f64;
    loop {
        let offset: f64 = rng.random::<f64>() * spacing;
        let mut rows = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let theta = offset + spacing * (k as f64 + 0.3 * (rng.random::<f64>() - 0.5));
            let (a, b, q) = circle_point(theta);
            let scale = 20 + rng.random_range(-4i64..=4);
            rows.push(vec![rat(-a, q), rat(-b, q)]);
            c.push(rat(scale, 20));
        }
        let parallel = (0..n).any(|i| (0..i).any(|j| &rows[i][0] * &rows[j][1] == &rows[i][1] * &rows[j][0]));
        if parallel {
            continue;
        }
        let Ok(w) = ExactMatrix::from_rows(&rows) else { continue };
        let Ok(h) = HRep::new(w, c) else { continue };
        if h.require_minimal().is_ok_and(|vd| vd.is_simple(2)) {
            return h;
        }
    }
}

/// [`random_polygon`] as a fiber `W Q + c` with its embedding data.
pub fn random_polygon_fiber(n: usize, seed: u64) -> Result<FiberEmbedding> {
    hrep_to_fiber(&random_polygon(n, seed))
}
