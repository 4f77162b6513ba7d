//! Sturm chains and exact sign decisions on `[eps, ∞)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::RatPoly;
use crate::{numfmt, Error};

/// Right end of a root-counting interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpperEnd {
    Finite(BigRational),
    Infinity,
}

impl fmt::Display for UpperEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperEnd::Finite(x) => f.write_str(&numfmt::ratio_to_string(x)),
            UpperEnd::Infinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for UpperEnd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A signed remainder chain together with the number of distinct real
/// roots it certifies in `(lo, hi]`.
///
/// `chain[0]` is the queried polynomial and `chain[1]` its derivative. Each
/// later entry is the negated remainder of its two predecessors, rescaled
/// by a positive constant to a primitive integer polynomial; positive
/// rescaling leaves every sign sequence unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SturmCertificate {
    pub chain: Vec<RatPoly>,
    #[serde(with = "numfmt::ratio_str")]
    pub lo: BigRational,
    pub hi: UpperEnd,
    pub root_count: usize,
}

/// Why `decide_positive_on_ray` answered the way it did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RayEvidence {
    /// Negative leading coefficient: the polynomial is eventually negative.
    NegativeLeading,
    /// Value at the left endpoint (`<= 0` refutes, a positive constant proves).
    Endpoint {
        #[serde(with = "numfmt::ratio_str")]
        value: BigRational,
    },
    /// All coefficients of `p(eps + s)` up to `degree` are non-negative and
    /// the constant term is positive.
    ShiftedCoefficients {
        degree: usize,
    },
    Sturm(SturmCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayVerdict {
    pub positive: bool,
    pub evidence: RayEvidence,
}

fn primitive_positive(p: &RatPoly) -> RatPoly {
    if p.is_zero() {
        return p.clone();
    }
    let lcm_den = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm_den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    RatPoly::from_bigints(ints.into_iter().map(|c| c / &g).collect())
}

/// Signed remainder chain of `p`. Empty for the zero polynomial.
pub fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    if p.is_zero() {
        return Vec::new();
    }
    let mut chain = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let (_, rem) = chain[n - 2]
            .div_rem(&chain[n - 1])
            .expect("chain entries are nonzero");
        if rem.is_zero() {
            break;
        }
        chain.push(primitive_positive(&-rem));
    }
    chain
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations_at(chain: &[RatPoly], at: &UpperEnd) -> usize {
    match at {
        UpperEnd::Finite(x) => count_variations(chain.iter().map(|p| sign_of(&p.eval(x)))),
        UpperEnd::Infinity => {
            count_variations(chain.iter().map(|p| p.leading_coeff().map_or(0, sign_of)))
        }
    }
}

/// Counts distinct real roots of `p` in `(lo, hi]`.
///
/// Requires `p(lo) != 0`; the count is then exact by Sturm's theorem even
/// when `p` has repeated roots.
pub fn sturm_certificate(
    p: &RatPoly,
    lo: &BigRational,
    hi: UpperEnd,
) -> Result<SturmCertificate, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.eval(lo).is_zero() {
        return Err(Error::Domain(format!(
            "left endpoint {} is a root",
            numfmt::ratio_to_string(lo)
        )));
    }
    if let UpperEnd::Finite(h) = &hi {
        if h < lo {
            return Err(Error::Domain("empty interval".into()));
        }
    }
    let chain = sturm_chain(p);
    let v_lo = variations_at(&chain, &UpperEnd::Finite(lo.clone()));
    let v_hi = variations_at(&chain, &hi);
    Ok(SturmCertificate {
        chain,
        lo: lo.clone(),
        hi,
        root_count: v_lo - v_hi,
    })
}

/// Decides `p(t) > 0` for every real `t >= eps`.
///
/// The answer is false as soon as the leading coefficient is negative or
/// `p(eps) <= 0`; otherwise it is true iff the Sturm count on `(eps, ∞)`
/// is zero.
pub fn decide_positive_on_ray(p: &RatPoly, eps: &BigRational) -> Result<RayVerdict, Error> {
    let lead = p.leading_coeff().ok_or(Error::ZeroPolynomial)?;
    if !eps.is_positive() {
        return Err(Error::Domain("ray start must be positive".into()));
    }
    if lead.is_negative() {
        return Ok(RayVerdict {
            positive: false,
            evidence: RayEvidence::NegativeLeading,
        });
    }
    let value = p.eval(eps);
    if !value.is_positive() || p.degree() == Some(0) {
        return Ok(RayVerdict {
            positive: value.is_positive(),
            evidence: RayEvidence::Endpoint { value },
        });
    }
    let cert = sturm_certificate(p, eps, UpperEnd::Infinity)?;
    Ok(RayVerdict {
        positive: cert.root_count == 0,
        evidence: RayEvidence::Sturm(cert),
    })
}

pub fn positive_on_ray(p: &RatPoly, eps: &BigRational) -> Result<bool, Error> {
    decide_positive_on_ray(p, eps).map(|v| v.positive)
}

/// Cheap sufficient test: every coefficient of `p(eps + s)` is non-negative
/// and the constant term is positive. A `true` answer proves positivity on
/// `[eps, ∞)`; `false` proves nothing.
pub fn shifted_coefficients_certify(p: &RatPoly, eps: &BigRational) -> bool {
    let shifted = p.taylor_shift(eps);
    shifted.coeff(0).is_positive() && shifted.has_nonnegative_coeffs()
}
