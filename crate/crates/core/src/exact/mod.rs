//! Exact rational arithmetic and linear algebra.
//!
//! Scalars are [`Rational`] (arbitrary precision, always in lowest terms).
//! Determinants and ranks use fraction-free (Bareiss) elimination on the
//! row-wise integer scaling of the matrix; solves and inverses use
//! Gauss-Jordan elimination over the rationals.

mod lp;
mod matrix;

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use lp::{cone_contains, feasible_point, strict_interior_point};
pub use matrix::ExactMatrix;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Builds `num / den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `v` as a rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rational_vec(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(p, q)| rat(p, q)).collect()
}

pub fn integer_vec(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `ln |q|` for nonzero `q`, finite even where `q` itself overflows `f64`.
pub fn ln_abs(q: &Rational) -> f64 {
    ln_abs_int(q.numer()) - ln_abs_int(q.denom())
}

fn ln_abs_int(v: &BigInt) -> f64 {
    let shift = v.bits().saturating_sub(64);
    let top = (v.abs() >> shift).to_f64().unwrap_or(f64::NAN);
    num_traits::Float::ln(top) + shift as f64 * core::f64::consts::LN_2
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a rational vector to the unique primitive integer vector with the
/// same direction (positive multiple). The zero vector maps to zeros.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, z| acc.gcd(z));
    if gcd.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|z| z / &gcd).collect()
}

/// Multiplies every entry of `v` by the lcm of its denominators, returning the
/// integer row and the (positive) scale used.
pub(crate) fn clear_denominators(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let row = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    (row, lcm)
}

pub fn integer_to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().cloned().map(Rational::from_integer).collect()
}

/// Sign convention for hyperplane normals: first nonzero entry positive.
pub(crate) fn normalize_sign(v: Vec<BigInt>) -> Vec<BigInt> {
    match v.iter().find(|z| !z.is_zero()) {
        Some(first) if first.is_negative() => v.into_iter().map(|z| -z).collect(),
        _ => v,
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    itertools::Itertools::combinations(0..n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_abs_beyond_f64_range() {
        assert!((ln_abs(&rat(-3, 7)) - (3.0f64 / 7.0).ln()).abs() < 1e-15);
        let huge = Rational::from_integer(BigInt::from(10).pow(400u32)) / int(3);
        let expected = 400.0 * core::f64::consts::LN_10 - 3.0f64.ln();
        assert!((ln_abs(&huge) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn primitive_integer_scaling() {
        let v = rational_vec(&[(2, 3), (-4, 9), (0, 1)]);
        let p = primitive_integer(&v);
        assert_eq!(p, [3, -2, 0].map(BigInt::from).to_vec());
        assert_eq!(primitive_integer(&[int(0), int(0)]), vec![BigInt::zero(); 2]);
    }

    #[test]
    fn subsets_are_lexicographic() {
        let all: Vec<_> = subsets(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(subsets(3, 0).count(), 1);
    }
}
