//! Exact coefficient arithmetic: the rationals and prime fields.
//!
//! A [`FieldElem`] carries its field with it, so values coming from
//! different fields can be detected at the point of use. The operator impls
//! (`&a + &b` and friends) treat a field mismatch as a programming error and
//! panic; the `checked_*` methods report it as [`Error::MixedFields`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient field of an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum FieldSpec {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "Fp")]
    PrimeField { p: u64 },
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(FieldSpec::PrimeField { p })
    }

    /// Checks the invariants a deserialized field description may violate.
    pub fn validate(self) -> Result<Self> {
        match self {
            FieldSpec::Rationals => Ok(self),
            FieldSpec::PrimeField { p } => FieldSpec::prime(p),
        }
    }

    pub fn zero(self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> FieldElem {
        match self {
            FieldSpec::Rationals => FieldElem::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::PrimeField { p } => FieldElem::Modular {
                value: v.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    pub fn from_ratio(self, num: i64, den: i64) -> Result<FieldElem> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    /// Parses `3/4`, `-2`, `+5`. Over F_p a fraction means `a * b^-1`.
    pub fn parse(self, text: &str) -> Result<FieldElem> {
        let text = text.trim();
        let bad = || Error::Input(format!("bad field literal '{text}'"));
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (text, None),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = match den {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            FieldSpec::Rationals => Ok(FieldElem::Rational(BigRational::new(num, den))),
            FieldSpec::PrimeField { p } => {
                let modp = |v: &BigInt| -> u64 {
                    let r = v.mod_floor(&BigInt::from(p));
                    u64::try_from(r).expect("residue fits in u64")
                };
                let n = FieldElem::Modular { value: modp(&num), p };
                let d = FieldElem::Modular { value: modp(&den), p };
                n.checked_div(&d)
            }
        }
    }

    /// A random element: uniform over F_p, a small integer over Q.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElem {
        match self {
            FieldSpec::Rationals => self.from_i64(rng.gen_range(-9..=9)),
            FieldSpec::PrimeField { p } => FieldElem::Modular {
                value: rng.gen_range(0..p),
                p,
            },
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElem {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField { p } => write!(f, "F{p}"),
        }
    }
}

/// An exact scalar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Modular { value: u64, p: u64 },
}

/// Multiplicative order of a nonzero scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    Finite(u64),
    Infinite,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl FieldElem {
    pub fn field(&self) -> FieldSpec {
        match self {
            FieldElem::Rational(_) => FieldSpec::Rationals,
            FieldElem::Modular { p, .. } => FieldSpec::PrimeField { p: *p },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_zero(),
            FieldElem::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_one(),
            FieldElem::Modular { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn checked_add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Modular { value: a, p }, FieldElem::Modular { value: b, .. }) => {
                FieldElem::Modular {
                    value: (a + b) % p,
                    p: *p,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Modular { value: a, p }, FieldElem::Modular { value: b, .. }) => {
                FieldElem::Modular {
                    value: mulmod(*a, *b, *p),
                    p: *p,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Rational(a) => FieldElem::Rational(a.recip()),
            FieldElem::Modular { value, p } => FieldElem::Modular {
                value: powmod(*value, p - 2, *p),
                p: *p,
            },
        })
    }

    fn neg_ref(&self) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Modular { value, p } => FieldElem::Modular {
                value: (p - value) % p,
                p: *p,
            },
        }
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> Result<FieldElem> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.field().one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// A root `y` with `y^n = self`, if one exists in the field. Over F_p
    /// the smallest residue is returned.
    pub fn nth_root(&self, n: u32) -> Option<FieldElem> {
        if n == 0 {
            return None;
        }
        match self {
            FieldElem::Modular { value, p } => (0..*p)
                .find(|y| powmod(*y, n as u64, *p) == *value)
                .map(|y| FieldElem::Modular { value: y, p: *p }),
            FieldElem::Rational(r) => {
                let neg = r.is_negative();
                if neg && n.is_multiple_of(2) {
                    return None;
                }
                let num = r.numer().abs();
                let den = r.denom().clone();
                let rn = num.nth_root(n);
                let rd = den.nth_root(n);
                if num::pow(&rn, n) != num || num::pow(&rd, n) != den {
                    return None;
                }
                let root = BigRational::new(if neg { -rn } else { rn }, rd);
                Some(FieldElem::Rational(root))
            }
        }
    }

    pub fn multiplicative_order(&self) -> Result<Order> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Modular { value, p } => {
                let mut acc = *value;
                let mut m = 1u64;
                while acc != 1 {
                    acc = mulmod(acc, *value, *p);
                    m += 1;
                }
                Order::Finite(m)
            }
            FieldElem::Rational(r) => {
                if r.is_one() {
                    Order::Finite(1)
                } else if (-r).is_one() {
                    Order::Finite(2)
                } else {
                    Order::Infinite
                }
            }
        })
    }
}

mod num {
    use num_bigint::BigInt;
    pub fn pow(b: &BigInt, e: u32) -> BigInt {
        num_traits::pow(b.clone(), e as usize)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            FieldElem::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).expect("field operation on mismatched fields")
            }
        }
        impl $trait<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.neg_ref()
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.neg_ref()
    }
}
