//! Dense univariate polynomials over Q.
//!
//! `RatPoly` stores coefficients lowest degree first. The representation is
//! canonical: the zero polynomial is the empty vector and otherwise the last
//! coefficient is nonzero. Nothing in this module touches floating point.

mod parse;
mod quotient;
mod sturm;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numfmt;

pub use quotient::{cyclotomic_quotient, geometric_sum};
pub use sturm::{
    decide_positive_on_ray, positive_on_ray, shifted_coefficients_certify, sturm_certificate,
    sturm_chain, RayEvidence, RayVerdict, SturmCertificate, UpperEnd,
};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * t^deg`.
    pub fn monomial(c: BigRational, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        coeffs[deg] = c;
        RatPoly { coeffs }
    }

    /// `t^deg`.
    pub fn t_pow(deg: usize) -> Self {
        Self::monomial(BigRational::one(), deg)
    }

    /// Builds from coefficients lowest degree first; trailing zeros are dropped.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = RatPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn from_bigints(coeffs: Vec<BigInt>) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Euclidean division. `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &RatPoly) -> Option<(RatPoly, RatPoly)> {
        let dd = divisor.degree()?;
        let lead = divisor.leading_coeff()?;
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Some((Self::zero(), Self::zero()));
        };
        if nd < dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let c = &rem[shift + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= &c * dc;
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        Some((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact quotient, or `None` if `divisor` is zero or leaves a remainder.
    pub fn exact_div(&self, divisor: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(divisor)?;
        r.is_zero().then_some(q)
    }

    /// `coeff[i] == coeff[deg - i]` for all `i`. The zero polynomial counts
    /// as palindromic.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Coefficients as integers, if every coefficient is integral.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// `p(t + a)`, computed by repeated synthetic division.
    pub fn taylor_shift(&self, a: &BigRational) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let carry = &c[j + 1] * a;
                c[j] += carry;
            }
        }
        Self::from_coeffs(c)
    }

    /// `q` with `p(t) = q(t^k)`, if every nonzero coefficient sits at a
    /// multiple of `k`.
    pub fn deflate(&self, k: usize) -> Option<RatPoly> {
        assert!(k > 0, "deflation step must be positive");
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(i, c)| i % k != 0 && !c.is_zero())
        {
            return None;
        }
        Some(Self::from_coeffs(
            self.coeffs.iter().step_by(k).cloned().collect(),
        ))
    }

    /// `p(t^k)`.
    pub fn inflate(&self, k: usize) -> Self {
        assert!(k > 0, "inflation step must be positive");
        let Some(d) = self.degree() else {
            return Self::zero();
        };
        let mut coeffs = vec![BigRational::zero(); d * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        RatPoly { coeffs }
    }

    /// True if `self[i] >= other[i]` for every degree.
    pub fn dominates(&self, other: &RatPoly) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| self.coeff(i) >= other.coeff(i))
    }
}

/// `p(x)` as a free function.
pub fn eval_at(p: &RatPoly, x: &BigRational) -> BigRational {
    p.eval(x)
}

fn zip_with(
    a: &RatPoly,
    b: &RatPoly,
    f: impl Fn(&BigRational, &BigRational) -> BigRational,
) -> RatPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    let zero = BigRational::zero();
    RatPoly::from_coeffs(
        (0..n)
            .map(|i| {
                f(
                    a.coeffs.get(i).unwrap_or(&zero),
                    b.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect(),
    )
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: RatPoly) -> RatPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatPoly> for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: &RatPoly) -> RatPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        -&self
    }
}

impl std::iter::Sum for RatPoly {
    fn sum<I: Iterator<Item = RatPoly>>(iter: I) -> Self {
        iter.fold(RatPoly::zero(), |acc, p| acc + p)
    }
}

impl std::iter::Product for RatPoly {
    fn product<I: Iterator<Item = RatPoly>>(iter: I) -> Self {
        iter.fold(RatPoly::one(), |acc, p| acc * p)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let coeff = if mag.is_integer() {
                mag.to_integer().to_string()
            } else {
                format!("({})", mag)
            };
            match i {
                0 => f.write_str(&coeff)?,
                _ => {
                    if !mag.is_one() {
                        f.write_str(&coeff)?;
                    }
                    f.write_str("t")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    coeffs: Vec<String>,
}

impl Serialize for RatPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyWire {
            coeffs: self.coeffs.iter().map(numfmt::ratio_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = PolyWire::deserialize(d)?;
        let coeffs = wire
            .coeffs
            .iter()
            .map(|c| numfmt::parse_ratio(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(RatPoly::from_coeffs(coeffs))
    }
}
