//! Dense univariate polynomials and reduced rational functions over a field.
//!
//! These back two things: coefficient arithmetic in `K[x]` for the bivariate
//! gcd (see [`super::gcd`]), and the rational-function entries of de
//! Jonquières fiber matrices.

use std::fmt;

use super::field::Field;

/// A univariate polynomial, dense coefficient vector, constant term first.
/// Invariant: the last coefficient is nonzero (empty vector = zero).
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<K: Field> {
    coeffs: Vec<K>,
}

impl<K: Field> UniPoly<K> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: K) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            UniPoly { coeffs: vec![c] }
        }
    }

    /// Builds from a coefficient vector (constant term first), trimming zeros.
    pub fn new(mut coeffs: Vec<K>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// The monomial `c * x^n`.
    pub fn monomial(c: K, n: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![c.zero_like(); n + 1];
        coeffs[n] = c;
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&K> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&K> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &K) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
        }
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    /// Panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dl = d.leading().expect("division by zero polynomial");
        let dl_inv = dl.inv().expect("leading coefficient invertible");
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while let Some(rd) = rem.degree() {
            let dd = d.degree().unwrap();
            if rd < dd {
                break;
            }
            let c = rem.leading().unwrap().mul(&dl_inv);
            let t = Self::monomial(c, rd - dd);
            quo = quo.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        (quo, rem)
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd via the Euclidean algorithm (coefficients form a field).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scales so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(&l.inv().expect("leading coefficient invertible")),
        }
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Composition `self(inner)`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(c.clone()));
        }
        acc
    }
}

impl<K: Field> fmt::Display for UniPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                1 if mag == "1" => write!(f, "x")?,
                1 => write!(f, "{mag}*x")?,
                _ if mag == "1" => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// A reduced rational function `num/den` in one variable.
///
/// Invariants: `den` nonzero and monic; `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFun<K: Field> {
    num: UniPoly<K>,
    den: UniPoly<K>,
}

impl<K: Field> RatFun<K> {
    /// Builds and reduces `num/den`. Panics if `den` is zero.
    pub fn new(num: UniPoly<K>, den: UniPoly<K>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFun {
                num,
                den: den.monic().div_exact(&den.monic()).unwrap(),
            };
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).unwrap();
        let den = den.div_exact(&g).unwrap();
        let lead_inv = den.leading().unwrap().inv().unwrap();
        RatFun {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        }
    }

    pub fn from_poly(p: UniPoly<K>, one: &K) -> Self {
        RatFun {
            num: p,
            den: UniPoly::constant(one.one_like()),
        }
    }

    pub fn num(&self) -> &UniPoly<K> {
        &self.num
    }

    pub fn den(&self) -> &UniPoly<K> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(self.den.clone(), self.num.clone()))
    }

    /// Substitutes a rational function for the variable.
    pub fn compose_ratfun(&self, inner: &Self) -> Self {
        // num and den are evaluated at inner via Horner over RatFun.
        let one = inner.den.leading().expect("den nonzero").one_like();
        let horner = |p: &UniPoly<K>| -> Self {
            let mut acc = RatFun::from_poly(UniPoly::zero(), &one);
            for c in p.coeffs().iter().rev() {
                acc = acc
                    .mul(inner)
                    .add(&RatFun::from_poly(UniPoly::constant(c.clone()), &one));
            }
            acc
        };
        let n = horner(&self.num);
        let d = horner(&self.den);
        n.mul(&d.inv().expect("denominator composition nonzero"))
    }
}

impl<K: Field> fmt::Display for RatFun<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::field::{rint, Rat};

    fn upoly(cs: &[i64]) -> UniPoly<Rat> {
        UniPoly::new(cs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = upoly(&[1, 0, -3, 2]);
        let b = upoly(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn gcd_of_common_factor() {
        let common = upoly(&[1, 1]);
        let a = common.mul(&upoly(&[2, 0, 1]));
        let b = common.mul(&upoly(&[-3, 1]));
        assert_eq!(a.gcd(&b), common.monic());
    }

    #[test]
    fn ratfun_reduces() {
        // (x^2-1)/(x-1) = x+1.
        let f = RatFun::new(upoly(&[-1, 0, 1]), upoly(&[-1, 1]));
        assert_eq!(f.num(), &upoly(&[1, 1]));
        assert_eq!(f.den(), &upoly(&[1]));
    }

    #[test]
    fn ratfun_compose() {
        // f(x) = 1/x composed with itself is x.
        let one = rint(1);
        let f = RatFun::new(upoly(&[1]), upoly(&[0, 1]));
        let ff = f.compose_ratfun(&f);
        assert_eq!(ff, RatFun::from_poly(upoly(&[0, 1]), &one));
    }
}
