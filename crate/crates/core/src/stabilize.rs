//! Stabilization thresholds: the least `n0` such that
//! `n · P^π(t) < P(t)^n` on `[eps, ∞)` for every `n >= n0`.
//!
//! The search runs `n = 1, 2, ...` until the inequality holds at some
//! `n >= N*`, where `N* = max(1, ⌈1/(P(eps) - 1)⌉)`. Past that point it
//! holds for every larger `n`: `P` has non-negative coefficients, so
//! `P(t) >= P(eps) >= (n+1)/n` on the ray, and
//! `(n+1) P^π < ((n+1)/n) P^n <= P^(n+1)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exactpoly::{decide_positive_on_ray, RatPoly, RayEvidence};
use crate::modelspace::SpaceProfile;
use crate::{numfmt, Error};

/// Searches beyond this many powers are refused.
pub const MAX_POWER: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Cheap sufficient tests first, Sturm chains only when they are
    /// inconclusive.
    #[default]
    Fast,
    /// A Sturm chain for every `n` that survives the endpoint test.
    SturmOnly,
}

/// How the answer for one `n` was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CheckSummary {
    NegativeLeading,
    Endpoint {
        #[serde(with = "numfmt::ratio_str")]
        value: BigRational,
    },
    ShiftedCoefficients {
        degree: usize,
    },
    Sturm {
        chain_length: usize,
        root_count: usize,
    },
    /// Box certification (mixed Hodge thresholds).
    Box {
        cells: u64,
    },
    BoxWitness {
        #[serde(with = "numfmt::ratio_str")]
        t: BigRational,
        #[serde(with = "numfmt::ratio_str")]
        u: BigRational,
        #[serde(with = "numfmt::ratio_str")]
        v: BigRational,
        #[serde(with = "numfmt::ratio_str")]
        value: BigRational,
    },
}

impl From<RayEvidence> for CheckSummary {
    fn from(e: RayEvidence) -> Self {
        match e {
            RayEvidence::NegativeLeading => CheckSummary::NegativeLeading,
            RayEvidence::Endpoint { value } => CheckSummary::Endpoint { value },
            RayEvidence::ShiftedCoefficients { degree } => {
                CheckSummary::ShiftedCoefficients { degree }
            }
            RayEvidence::Sturm(c) => CheckSummary::Sturm {
                chain_length: c.chain.len(),
                root_count: c.root_count,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerCheck {
    pub n: u32,
    pub holds: bool,
    #[serde(flatten)]
    pub summary: CheckSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdResult {
    #[serde(with = "numfmt::ratio_str")]
    pub eps: BigRational,
    pub threshold: u32,
    pub tail_constant: u32,
    pub per_n: BTreeMap<u32, bool>,
    pub certificates: Vec<PowerCheck>,
}

/// `N* = max(1, ⌈1/(v - 1)⌉)` for a value `v > 1` of the homology side at
/// the smallest point of the region.
pub fn tail_constant(value: &BigRational) -> Result<u32, Error> {
    let excess = value - BigRational::one();
    if !excess.is_positive() {
        return Err(Error::Degenerate(format!(
            "homology side is {} <= 1 at the corner",
            numfmt::ratio_to_string(value)
        )));
    }
    let n = numfmt::ceil(&excess.recip()).max(BigInt::one());
    n.to_u32()
        .filter(|&n| u64::from(n) <= MAX_POWER)
        .ok_or_else(|| Error::Overflow(format!("tail constant {n} exceeds {MAX_POWER}")))
}

/// Runs `decide(n)` for `n = 1, 2, ...` until it holds at some `n >= n_star`.
pub fn scan_powers<F>(
    eps: &BigRational,
    corner_value: &BigRational,
    mut decide: F,
) -> Result<ThresholdResult, Error>
where
    F: FnMut(u32) -> Result<(bool, CheckSummary), Error>,
{
    let n_star = tail_constant(corner_value)?;
    let mut per_n = BTreeMap::new();
    let mut certificates = Vec::new();
    let mut last_fail = 0u32;
    let mut n = 1u32;
    loop {
        if u64::from(n) > MAX_POWER {
            return Err(Error::Overflow(format!(
                "no stable power found below {MAX_POWER}"
            )));
        }
        let (holds, summary) = decide(n)?;
        per_n.insert(n, holds);
        certificates.push(PowerCheck { n, holds, summary });
        if !holds {
            last_fail = n;
        } else if n >= n_star {
            // Premise of the tail argument.
            assert!(
                BigRational::new(BigInt::from(n) + 1u32, BigInt::from(n)) <= *corner_value,
                "tail argument premise fails at n = {n}"
            );
            break;
        }
        n += 1;
    }
    Ok(ThresholdResult {
        eps: eps.clone(),
        threshold: last_fail + 1,
        tail_constant: n_star,
        per_n,
        certificates,
    })
}

fn truncated_mul(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len.min(a.len() + b.len().saturating_sub(1))];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Decision state for one space, reused across `n`.
struct PowerDecider<'a> {
    p: &'a RatPoly,
    p_pi: &'a RatPoly,
    eps: BigRational,
    strategy: Strategy,
    p_eps: BigRational,
    p_pi_eps: BigRational,
    p_eps_pow: BigRational,
    shifted_p: Vec<BigRational>,
    shifted_pi: Vec<BigRational>,
    shifted_pow: Vec<BigRational>,
}

impl<'a> PowerDecider<'a> {
    fn new(p: &'a RatPoly, p_pi: &'a RatPoly, eps: &BigRational, strategy: Strategy) -> Self {
        let shifted_pi = p_pi.taylor_shift(eps).coeffs().to_vec();
        PowerDecider {
            p,
            p_pi,
            eps: eps.clone(),
            strategy,
            p_eps: p.eval(eps),
            p_pi_eps: p_pi.eval(eps),
            p_eps_pow: BigRational::one(),
            shifted_p: p.taylor_shift(eps).coeffs().to_vec(),
            shifted_pi,
            shifted_pow: vec![BigRational::one()],
        }
    }

    fn full(&self, n: u32) -> Result<(bool, CheckSummary), Error> {
        let d = self.p.pow(n) - self.p_pi.scale(&BigRational::from_integer(n.into()));
        let v = decide_positive_on_ray(&d, &self.eps)?;
        Ok((v.positive, v.evidence.into()))
    }

    /// Must be called with `n = 1, 2, ...` in order.
    fn decide(&mut self, n: u32) -> Result<(bool, CheckSummary), Error> {
        self.p_eps_pow *= &self.p_eps;
        let len = self.shifted_pi.len().max(1);
        self.shifted_pow = truncated_mul(&self.shifted_pow, &self.shifted_p, len);
        if self.strategy == Strategy::SturmOnly {
            return self.full(n);
        }
        let nn = BigRational::from_integer(n.into());
        let deg_p = self.p.degree().unwrap_or(0) * n as usize;
        match (self.p_pi.degree(), self.p.leading_coeff()) {
            (Some(dpi), Some(lc)) if deg_p <= dpi => {
                let mut lead = -(self.p_pi.leading_coeff().expect("nonzero") * &nn);
                if deg_p == dpi {
                    lead += num_traits::pow(lc.clone(), n as usize);
                }
                if lead.is_negative() {
                    return Ok((false, CheckSummary::NegativeLeading));
                }
                if lead.is_zero() {
                    return self.full(n);
                }
            }
            _ => {}
        }
        let value = &self.p_eps_pow - &self.p_pi_eps * &nn;
        if !value.is_positive() {
            return Ok((false, CheckSummary::Endpoint { value }));
        }
        let dominated = self
            .shifted_pi
            .iter()
            .enumerate()
            .all(|(j, c)| self.shifted_pow.get(j).cloned().unwrap_or_default() >= c * &nn);
        if dominated && deg_p > self.p_pi.degree().unwrap_or(0) {
            return Ok((
                true,
                CheckSummary::ShiftedCoefficients {
                    degree: self.shifted_pi.len().saturating_sub(1),
                },
            ));
        }
        self.full(n)
    }
}

fn check_inputs(profile: &SpaceProfile, eps: &BigRational) -> Result<(), Error> {
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if profile.data.is_point() {
        return Err(Error::Degenerate(
            "the point space has threshold 1 by convention".into(),
        ));
    }
    let p = profile.homology()?;
    if !p.has_nonnegative_coeffs() {
        return Err(Error::Domain(
            "homology polynomial has a negative coefficient".into(),
        ));
    }
    Ok(())
}

/// `n · P^π(t) < P(t)^n` for every `t >= eps`.
pub fn power_inequality_holds(
    profile: &SpaceProfile,
    n: u32,
    eps: &BigRational,
) -> Result<bool, Error> {
    if n == 0 {
        return Err(Error::Domain("power must be positive".into()));
    }
    check_inputs(profile, eps)?;
    let p_pi = profile.homotopy();
    let d = profile.homology()?.pow(n) - p_pi.scale(&BigRational::from_integer(n.into()));
    Ok(decide_positive_on_ray(&d, eps)?.positive)
}

pub fn stabilization_threshold(
    profile: &SpaceProfile,
    eps: &BigRational,
) -> Result<ThresholdResult, Error> {
    stabilization_threshold_with(profile, eps, Strategy::Fast)
}

pub fn stabilization_threshold_with(
    profile: &SpaceProfile,
    eps: &BigRational,
    strategy: Strategy,
) -> Result<ThresholdResult, Error> {
    check_inputs(profile, eps)?;
    let p = profile.homology()?;
    let p_pi = profile.homotopy();
    let mut decider = PowerDecider::new(p, &p_pi, eps, strategy);
    let corner = p.eval(eps);
    scan_powers(eps, &corner, |n| decider.decide(n))
}
