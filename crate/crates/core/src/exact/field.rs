//! Coefficient fields for the exact backend: arbitrary-precision rationals
//! and prime fields `F_p`.
//!
//! The trait is deliberately object-free and works with *values* rather than
//! associated constants, because a prime-field element only knows its modulus
//! at runtime. Constructors that would otherwise need a nullary `zero()` take
//! a witness element instead (`zero_like`, `one_like`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact field: the coefficient domain of all polynomial arithmetic.
///
/// Implementations must be exact (no rounding anywhere) and total except for
/// inversion of zero.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display {
    /// The additive identity carrying the same field "context" (modulus) as `self`.
    fn zero_like(&self) -> Self;
    /// The multiplicative identity with the same context as `self`.
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` exactly when `self` is zero.
    fn inv(&self) -> Option<Self>;
    /// Multiplication by a small integer (derivatives, homogenization counts).
    fn mul_int(&self, n: i64) -> Self;
    /// A scalar `s` such that multiplying every coefficient of a polynomial by
    /// `s` puts it into the canonical form used for projective comparisons.
    ///
    /// `coeffs` is ordered with the graded-lexicographically leading
    /// coefficient first and is never empty.
    fn canonical_scalar(coeffs: &[&Self]) -> Self;
}

/// Arbitrary-precision rational numbers, the default coefficient field.
pub type Rat = BigRational;

/// Convenience constructor for a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for an integer rational.
pub fn rint(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn mul_int(&self, n: i64) -> Self {
        self * BigRational::from_integer(BigInt::from(n))
    }
    /// Canonical form over the rationals: primitive integer coefficients with
    /// a positive leading coefficient, i.e. multiply by
    /// `lcm(denominators) / gcd(numerators)` and fix the sign of the first
    /// (leading) coefficient.
    fn canonical_scalar(coeffs: &[&Self]) -> Self {
        use num_integer::Integer;
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in coeffs {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        debug_assert!(!num_gcd.is_zero(), "canonical_scalar of all-zero slice");
        let mut s = BigRational::new(den_lcm, num_gcd);
        if (coeffs[0] * &s).is_negative() {
            s = -s;
        }
        s
    }
}

/// An element of the prime field `F_p` for a runtime modulus `p < 2^62`.
///
/// Every element carries its modulus; mixed-modulus arithmetic is a logic
/// error and panics in debug builds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Fp {
    residue: u64,
    modulus: u64,
}

impl Fp {
    /// Creates `value mod p`; `p` must be an odd prime or 2 (not checked
    /// beyond `p >= 2`).
    pub fn new(value: i64, p: u64) -> Self {
        assert!(p >= 2, "modulus must be at least 2");
        let m = p as i128;
        let r = ((value as i128 % m) + m) % m;
        Fp {
            residue: r as u64,
            modulus: p,
        }
    }

    /// Reduces an arbitrary-precision integer modulo `p`.
    pub fn from_bigint(value: &BigInt, p: u64) -> Self {
        use num_integer::Integer;
        let m = BigInt::from(p);
        let r = value.mod_floor(&m);
        let digits = r.to_u64_digits().1;
        Fp {
            residue: digits.first().copied().unwrap_or(0),
            modulus: p,
        }
    }

    /// Reduces a rational `a/b` modulo `p`; `None` when `p` divides `b`.
    pub fn from_rat(value: &Rat, p: u64) -> Option<Self> {
        let num = Self::from_bigint(value.numer(), p);
        let den = Self::from_bigint(value.denom(), p);
        den.inv().map(|d| num.mul(&d))
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn check(&self, other: &Self) {
        debug_assert_eq!(self.modulus, other.modulus, "mixed moduli");
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp {
            residue: 0,
            modulus: self.modulus,
        }
    }
    fn one_like(&self) -> Self {
        Fp {
            residue: 1 % self.modulus,
            modulus: self.modulus,
        }
    }
    fn is_zero(&self) -> bool {
        self.residue == 0
    }
    fn add(&self, other: &Self) -> Self {
        self.check(other);
        let r = (self.residue as u128 + other.residue as u128) % self.modulus as u128;
        Fp {
            residue: r as u64,
            modulus: self.modulus,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        self.check(other);
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let r = (self.residue as u128 * other.residue as u128) % self.modulus as u128;
        Fp {
            residue: r as u64,
            modulus: self.modulus,
        }
    }
    fn neg(&self) -> Self {
        Fp {
            residue: if self.residue == 0 {
                0
            } else {
                self.modulus - self.residue
            },
            modulus: self.modulus,
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.residue == 0 {
            return None;
        }
        // Extended Euclid on (residue, modulus).
        let (mut r0, mut r1) = (self.modulus as i128, self.residue as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus not prime or element not invertible");
        let m = self.modulus as i128;
        Some(Fp {
            residue: (((t0 % m) + m) % m) as u64,
            modulus: self.modulus,
        })
    }
    fn mul_int(&self, n: i64) -> Self {
        self.mul(&Fp::new(n, self.modulus))
    }
    /// Canonical form over `F_p`: monic leading coefficient.
    fn canonical_scalar(coeffs: &[&Self]) -> Self {
        coeffs[0].inv().expect("leading coefficient is nonzero")
    }
}
