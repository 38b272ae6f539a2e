//! Homogeneous trivariate polynomials over an exact field.
//!
//! The representation is sparse: a map from exponent triples `(i, j, k)` for
//! `x^i y^j z^k` to nonzero coefficients. All stored terms share the same
//! total degree; the zero polynomial is the empty map and has no degree.
//!
//! Term order everywhere is graded lexicographic; since all terms of one
//! polynomial share a degree this is plain lexicographic order on `(i, j, k)`
//! with `x > y > z`, and the *leading* term is the largest triple.

use std::collections::BTreeMap;
use std::fmt;

use super::field::Field;
use super::ExactError;

/// One of the three variables of a [`HomPoly3`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }
}

/// A homogeneous polynomial in `x, y, z` with coefficients in the field `K`.
#[derive(Clone, PartialEq, Debug)]
pub struct HomPoly3<K: Field> {
    terms: BTreeMap<(u32, u32, u32), K>,
}

impl<K: Field> HomPoly3<K> {
    /// The zero polynomial (empty term map, undefined degree).
    pub fn zero() -> Self {
        HomPoly3 {
            terms: BTreeMap::new(),
        }
    }

    /// The monomial `c * x^i y^j z^k`; zero coefficient gives the zero polynomial.
    pub fn monomial(c: K, e: (u32, u32, u32)) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        HomPoly3 { terms }
    }

    /// The variable `v` as a degree-1 polynomial, with coefficient context
    /// taken from `one`.
    pub fn variable(v: Var, one: &K) -> Self {
        let e = match v {
            Var::X => (1, 0, 0),
            Var::Y => (0, 1, 0),
            Var::Z => (0, 0, 1),
        };
        Self::monomial(one.one_like(), e)
    }

    /// Builds a polynomial from terms, dropping zero coefficients and
    /// checking homogeneity.
    pub fn from_terms(
        terms: impl IntoIterator<Item = ((u32, u32, u32), K)>,
    ) -> Result<Self, ExactError> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            match map.entry(e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(&c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        o.insert(s);
                    }
                }
            }
        }
        let p = HomPoly3 { terms: map };
        match p.check_homogeneous() {
            true => Ok(p),
            false => Err(ExactError::NotHomogeneous),
        }
    }

    fn check_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|&(i, j, k)| i + j + k);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|&(i, j, k)| i + j + k)
    }

    pub fn is_constant(&self) -> bool {
        self.degree().map_or(true, |d| d == 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// A witness coefficient for field-context plumbing; `None` if zero.
    pub fn any_coeff(&self) -> Option<&K> {
        self.terms.values().next()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&(u32, u32, u32), &K)> {
        self.terms.iter().next_back()
    }

    /// Exact addition. Errors on unequal nonzero degrees.
    pub fn add(&self, other: &Self) -> Result<Self, ExactError> {
        if let (Some(da), Some(db)) = (self.degree(), other.degree()) {
            if da != db {
                return Err(ExactError::DegreeMismatch {
                    left: da,
                    right: db,
                });
            }
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            match terms.entry(*e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(c);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        o.insert(s);
                    }
                }
            }
        }
        Ok(HomPoly3 { terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HomPoly3 {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<(u32, u32, u32), K> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = (ea.0 + eb.0, ea.1 + eb.1, ea.2 + eb.2);
                let prod = ca.mul(cb);
                match terms.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        if !prod.is_zero() {
                            v.insert(prod);
                        }
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get().add(&prod);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            o.insert(s);
                        }
                    }
                }
            }
        }
        HomPoly3 { terms }
    }

    pub fn scale(&self, s: &K) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        HomPoly3 {
            terms: self.terms.iter().map(|(e, c)| (*e, c.mul(s))).collect(),
        }
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> Self {
        let mut terms = BTreeMap::new();
        for (&(i, j, k), c) in &self.terms {
            let (exp, e) = match v {
                Var::X => (i, (i.wrapping_sub(1), j, k)),
                Var::Y => (j, (i, j.wrapping_sub(1), k)),
                Var::Z => (k, (i, j, k.wrapping_sub(1))),
            };
            if exp == 0 {
                continue;
            }
            let d = c.mul_int(exp as i64);
            if !d.is_zero() {
                terms.insert(e, d);
            }
        }
        HomPoly3 { terms }
    }

    /// `self(f0, f1, f2)`: substitution of an equal-degree triple.
    pub fn substitute(&self, f: &[Self; 3]) -> Result<Self, ExactError> {
        let d0 = f[0].degree();
        if f.iter().any(|fi| fi.degree() != d0) {
            let degs: Vec<_> = f.iter().map(|fi| fi.degree().unwrap_or(0)).collect();
            return Err(ExactError::DegreeMismatch {
                left: degs[0],
                right: *degs.iter().max().unwrap(),
            });
        }
        let one = match self.any_coeff() {
            None => return Ok(Self::zero()),
            Some(c) => c.one_like(),
        };
        // Memoized powers of each component.
        let mut powers: [Vec<Self>; 3] = [
            vec![Self::monomial(one.clone(), (0, 0, 0))],
            vec![Self::monomial(one.clone(), (0, 0, 0))],
            vec![Self::monomial(one.clone(), (0, 0, 0))],
        ];
        let need = |powers: &mut [Vec<Self>; 3], which: usize, exp: usize, f: &[Self; 3]| {
            while powers[which].len() <= exp {
                let last = powers[which].last().unwrap().mul(&f[which]);
                powers[which].push(last);
            }
        };
        let mut acc = Self::zero();
        for (&(i, j, k), c) in &self.terms {
            need(&mut powers, 0, i as usize, f);
            need(&mut powers, 1, j as usize, f);
            need(&mut powers, 2, k as usize, f);
            let term = powers[0][i as usize]
                .mul(&powers[1][j as usize])
                .mul(&powers[2][k as usize])
                .scale(c);
            acc = match acc.is_zero() || term.is_zero() {
                true => acc.add(&term).unwrap_or(acc),
                false => acc.add(&term)?,
            };
        }
        Ok(acc)
    }

    /// Evaluates at a point.
    pub fn eval(&self, p: &[K; 3]) -> K {
        let zero = p[0].zero_like();
        let mut acc = zero.clone();
        for (&(i, j, k), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..i {
                t = t.mul(&p[0]);
            }
            for _ in 0..j {
                t = t.mul(&p[1]);
            }
            for _ in 0..k {
                t = t.mul(&p[2]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Canonical projective representative: scales by
    /// [`Field::canonical_scalar`] over the terms in leading-first order.
    pub fn canonicalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let coeffs: Vec<&K> = self.terms.values().rev().collect();
        let s = K::canonical_scalar(&coeffs);
        self.scale(&s)
    }

    /// True when `self` and `other` agree up to a nonzero scalar.
    pub fn proportional(&self, other: &Self) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Per-variable minimal exponents: the monomial content `x^a y^b z^c`.
    pub fn monomial_content(&self) -> (u32, u32, u32) {
        let mut m = (u32::MAX, u32::MAX, u32::MAX);
        for &(i, j, k) in self.terms.keys() {
            m = (m.0.min(i), m.1.min(j), m.2.min(k));
        }
        if self.terms.is_empty() {
            (0, 0, 0)
        } else {
            m
        }
    }

    /// Divides by the monomial `x^a y^b z^c`; caller must ensure divisibility.
    pub fn shift_down(&self, m: (u32, u32, u32)) -> Self {
        HomPoly3 {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j, k), c)| ((i - m.0, j - m.1, k - m.2), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by the monomial `x^a y^b z^c`.
    pub fn shift_up(&self, m: (u32, u32, u32)) -> Self {
        HomPoly3 {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j, k), c)| ((i + m.0, j + m.1, k + m.2), c.clone()))
                .collect(),
        }
    }

    /// Exact multivariate division: `Some(q)` with `self = q * d` when `d`
    /// divides `self`, else `None`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (dl_e, dl_c) = d.leading().unwrap();
        let dl_inv = dl_c.inv()?;
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while let Some((rl_e, rl_c)) = rem.leading() {
            let e = (
                rl_e.0.checked_sub(dl_e.0)?,
                rl_e.1.checked_sub(dl_e.1)?,
                rl_e.2.checked_sub(dl_e.2)?,
            );
            let c = rl_c.mul(&dl_inv);
            let t = Self::monomial(c, e);
            quo = quo.add(&t).ok()?;
            rem = rem.sub(&t.mul(d)).ok()?;
        }
        Some(quo)
    }

    /// True when `d` divides `self` exactly.
    pub fn divisible_by(&self, d: &Self) -> bool {
        self.div_exact(d).is_some()
    }

    /// Dehomogenizes with respect to `z`, returning a bivariate polynomial in
    /// `x, y` (exponent pairs).
    pub(crate) fn dehomogenize_z(&self) -> BTreeMap<(u32, u32), K> {
        self.terms
            .iter()
            .map(|(&(i, j, _), c)| ((i, j), c.clone()))
            .collect()
    }

    /// Rebuilds a homogeneous polynomial of the minimal degree from bivariate
    /// terms by padding with powers of `z`.
    pub(crate) fn homogenize_z(bi: &BTreeMap<(u32, u32), K>) -> Self {
        let d = bi.keys().map(|&(i, j)| i + j).max().unwrap_or(0);
        HomPoly3 {
            terms: bi
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(&(i, j), c)| ((i, j, d - i - j), c.clone()))
                .collect(),
        }
    }

    /// Applies a map to every coefficient (used for reduction mod p);
    /// `None` if any coefficient fails to map.
    pub fn map_coeffs<L: Field>(
        &self,
        mut f: impl FnMut(&K) -> Option<L>,
    ) -> Option<HomPoly3<L>> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let l = f(c)?;
            if !l.is_zero() {
                terms.insert(*e, l);
            }
        }
        Some(HomPoly3 { terms })
    }
}

/// Determinant of the Jacobian matrix of three equal-degree polynomials.
///
/// Homogeneous of degree `3(d-1)`, or zero.
pub fn jacobian_det<K: Field>(f: &[HomPoly3<K>; 3]) -> Result<HomPoly3<K>, ExactError> {
    let d0 = f[0].degree();
    if f.iter().any(|fi| fi.degree() != d0) {
        return Err(ExactError::DegreeMismatch {
            left: f[0].degree().unwrap_or(0),
            right: f[2].degree().unwrap_or(0),
        });
    }
    // Rows: components; columns: variables.
    let m: Vec<Vec<HomPoly3<K>>> = f
        .iter()
        .map(|fi| Var::ALL.iter().map(|&v| fi.derivative(v)).collect())
        .collect();
    let mut det = HomPoly3::zero();
    // Cofactor expansion along the first row.
    for col in 0..3 {
        let (c1, c2) = match col {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let minor = m[1][c1]
            .mul(&m[2][c2])
            .sub(&m[1][c2].mul(&m[2][c1]))
            .expect("minor entries are homogeneous of equal degree");
        let term = m[0][col].mul(&minor);
        let term = if col == 1 { term.neg() } else { term };
        det = if det.is_zero() {
            term
        } else if term.is_zero() {
            det
        } else {
            det.add(&term)?
        };
    }
    Ok(det)
}

impl<K: Field> fmt::Display for HomPoly3<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j, k), c) in self.terms.iter().rev() {
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
            let mut parts: Vec<String> = Vec::new();
            let is_unit_mag = mag == "1";
            if !is_unit_mag || (i, j, k) == (0, 0, 0) {
                parts.push(mag);
            }
            for (name, e) in [("x", i), ("y", j), ("z", k)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
