//! Sparse multivariate polynomials with exact rational coefficients, and a
//! compiled floating-point form for fast evaluation of values and derivatives.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::{One, Signed, Zero};

use crate::exact::{to_f64, Rational};
use crate::numeric::Scalar;

/// Exponent vector of a monomial.
pub type Exponent = Vec<u32>;

/// Polynomial in `num_vars` variables `x0, x1, ...` with rational coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    num_vars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl SparsePoly {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        Self::monomial(num_vars, c, vec![0; num_vars])
    }

    /// The variable `x_i`.
    pub fn variable(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(num_vars, Rational::one(), e)
    }

    pub fn monomial(num_vars: usize, c: Rational, exponent: Exponent) -> Self {
        assert_eq!(exponent.len(), num_vars, "exponent length");
        let mut p = Self::zero(num_vars);
        p.add_term(exponent, c);
        p
    }

    /// Affine form `c + <w, x>`.
    pub fn affine(c: &Rational, w: &[Rational]) -> Self {
        let n = w.len();
        let mut p = Self::constant(n, c.clone());
        for (i, wi) in w.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, wi.clone());
        }
        p
    }

    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Self {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), num_vars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponent: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: &[u32]) -> Rational {
        self.terms.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(first) => degrees.all(|d| d == first),
        }
    }

    /// Variables that occur with positive exponent in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_vars).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(Signed::is_positive)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.num_vars);
        }
        Self { num_vars: self.num_vars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[var] -= 1;
            out.add_term(f, c * Rational::from_integer(e[var].into()));
        }
        out
    }

    /// Exact evaluation.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.num_vars, "point dimension");
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes the polynomial `subs[i]` for `x_i`. All substitutes must
    /// share the same number of variables `m`; the result has `m` variables.
    pub fn compose(&self, subs: &[SparsePoly], m: usize) -> SparsePoly {
        assert_eq!(subs.len(), self.num_vars, "one substitute per variable");
        let mut out = SparsePoly::zero(m);
        for (e, c) in &self.terms {
            let mut t = SparsePoly::constant(m, c.clone());
            for (s, &k) in subs.iter().zip(e) {
                for _ in 0..k {
                    t = &t * s;
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly({}) {}", self.num_vars, self)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", c)?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i)?,
                    _ => write!(f, "*x{}^{}", i, p)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;

    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;

    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        self + &(-rhs)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;

    fn neg(self) -> SparsePoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;

    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count");
        let mut out = SparsePoly::zero(self.num_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: f64,
    /// (variable, exponent) pairs with positive exponent.
    factors: Vec<(usize, u32)>,
}

/// Floating-point form of a [`SparsePoly`] that evaluates values, gradients
/// and Hessians over any [`Scalar`].
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    num_vars: usize,
    terms: Vec<CompiledTerm>,
}

impl CompiledPoly {
    pub fn new(p: &SparsePoly) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| CompiledTerm {
                coeff: to_f64(c),
                factors: e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect(),
            })
            .collect();
        Self { num_vars: p.num_vars, terms }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn value<T: Scalar>(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for t in &self.terms {
            let mut v = T::of_f64(t.coeff);
            for &(i, k) in &t.factors {
                v *= x[i].powi(k as i32);
            }
            acc += v;
        }
        acc
    }

    /// `sum |c| prod |x_i|^k`, the scale against which cancellation in
    /// [`CompiledPoly::value`] is judged.
    pub fn abs_value<T: Scalar>(&self, x: &[T]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.abs() * t.factors.iter().map(|&(i, k)| x[i].modulus().powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient<T: Scalar>(&self, x: &[T]) -> (T, Vec<T>) {
        let (v, g, _) = self.derivatives(x, false);
        (v, g)
    }

    /// Value, gradient and (if requested, otherwise empty) row-major Hessian.
    /// Products are formed without division, so zero coordinates are fine.
    pub fn derivatives<T: Scalar>(&self, x: &[T], hessian: bool) -> (T, Vec<T>, Vec<T>) {
        let n = self.num_vars;
        let mut value = T::zero();
        let mut grad = vec![T::zero(); n];
        let mut hess = if hessian { vec![T::zero(); n * n] } else { Vec::new() };
        let mut f = Vec::new();
        let mut df = Vec::new();
        let mut d2f = Vec::new();
        for t in &self.terms {
            let c = T::of_f64(t.coeff);
            f.clear();
            df.clear();
            d2f.clear();
            for &(i, k) in &t.factors {
                let k = k as i32;
                f.push(x[i].powi(k));
                df.push(T::of_f64(k as f64) * x[i].powi(k - 1));
                d2f.push(if k >= 2 { T::of_f64((k * (k - 1)) as f64) * x[i].powi(k - 2) } else { T::zero() });
            }
            let m = f.len();
            let prod_except = |skip: &[usize]| {
                let mut p = c;
                for (j, fj) in f.iter().enumerate() {
                    if !skip.contains(&j) {
                        p *= *fj;
                    }
                }
                p
            };
            value += prod_except(&[]);
            for a in 0..m {
                let ia = t.factors[a].0;
                grad[ia] += df[a] * prod_except(&[a]);
                if hessian {
                    hess[ia * n + ia] += d2f[a] * prod_except(&[a]);
                    for b in a + 1..m {
                        let ib = t.factors[b].0;
                        let v = df[a] * df[b] * prod_except(&[a, b]);
                        hess[ia * n + ib] += v;
                        hess[ib * n + ia] += v;
                    }
                }
            }
        }
        (value, grad, hess)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn x(n: usize, i: usize) -> SparsePoly {
        SparsePoly::variable(n, i)
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let p = &(&x(2, 0) + &x(2, 1)) * &(&x(2, 0) - &x(2, 1));
        assert_eq!(p.len(), 2);
        assert_eq!(p.coefficient(&[2, 0]), int(1));
        assert_eq!(p.coefficient(&[0, 2]), int(-1));
        assert_eq!(p.coefficient(&[1, 1]), int(0));
        assert!(p.is_homogeneous());
        assert_eq!(p.total_degree(), Some(2));
        assert!((&p - &p).is_empty());
    }

    #[test]
    fn derivative_and_exact_eval() {
        // 3 x0^2 x1 + x1/2
        let p = SparsePoly::from_terms(2, [(vec![2, 1], int(3)), (vec![0, 1], rat(1, 2))]);
        let d0 = p.derivative(0);
        assert_eq!(d0, SparsePoly::monomial(2, int(6), vec![1, 1]));
        assert_eq!(p.eval(&[rat(1, 3), int(2)]), rat(2, 3) + int(1));
        assert!(!p.is_homogeneous());
    }

    #[test]
    fn compose_with_affine_forms() {
        // (1 + y)(1 - y) = 1 - y^2
        let l1 = SparsePoly::affine(&int(1), &[int(1)]);
        let l2 = SparsePoly::affine(&int(1), &[int(-1)]);
        let p = &x(2, 0) * &x(2, 1);
        let q = p.compose(&[l1, l2], 1);
        assert_eq!(q, SparsePoly::from_terms(1, [(vec![0], int(1)), (vec![2], int(-1))]));
    }

    #[test]
    fn compiled_derivatives_match_exact() {
        let p = SparsePoly::from_terms(
            3,
            [(vec![3, 1, 0], int(2)), (vec![0, 1, 1], rat(-1, 3)), (vec![1, 0, 2], int(5)), (vec![0, 0, 0], int(7))],
        );
        let pt = [rat(1, 2), rat(-3, 4), rat(5, 3)];
        let ptf: Vec<f64> = pt.iter().map(to_f64).collect();
        let c = p.compile();
        let (v, g, h) = c.derivatives(&ptf, true);
        assert!((v - to_f64(&p.eval(&pt))).abs() < 1e-12);
        for i in 0..3 {
            let di = p.derivative(i);
            assert!((g[i] - to_f64(&di.eval(&pt))).abs() < 1e-12);
            for j in 0..3 {
                assert!((h[i * 3 + j] - to_f64(&di.derivative(j).eval(&pt))).abs() < 1e-12);
            }
        }
    }
}
