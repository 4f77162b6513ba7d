//! Enumeration of all S.A.C. exponent data up to a formal-dimension cap.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithcond::{check_condition, condition_holds, Mode, SacReport};
use crate::bounds::{bounds_report, hilali_verdict, inequality_suite, BoundsReport, HilaliVerdict};
use crate::exactpoly::RatPoly;
use crate::modelspace::{homology_poincare_pure, invariants, ExponentData, InvariantReport};
use crate::Error;

pub const MAX_FORMAL_DIM: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub data: ExponentData,
    pub invariants: InvariantReport,
    pub sac: SacReport,
    pub bounds: BoundsReport,
    pub verdict: HilaliVerdict,
}

/// Sort key: `(n_X, q, b, a)`.
pub fn census_order(d: &ExponentData) -> (i64, usize, Vec<u32>, Vec<u32>) {
    (d.formal_dim(), d.q(), d.b().to_vec(), d.a().to_vec())
}

fn check_cap(max_formal_dim: u32) -> Result<(), Error> {
    if max_formal_dim > MAX_FORMAL_DIM {
        return Err(Error::CapExceeded {
            requested: max_formal_dim,
            cap: MAX_FORMAL_DIM,
        });
    }
    Ok(())
}

/// Ascending b-lists with largest element exactly `top` and sum at most
/// `budget`.
fn b_lists(top: u32, budget: u32) -> Vec<Vec<u32>> {
    fn rec(max: u32, budget: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(acc.iter().rev().copied().collect());
        for v in (2..=max.min(budget)).rev() {
            acc.push(v);
            rec(v, budget - v, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if top <= budget {
        let mut acc = vec![top];
        rec(top, budget - top, &mut acc, &mut out);
    }
    out
}

/// a-lists compatible with `b` under the descending pairing `b_i >= 2 a_i`
/// and with `1 <= n_X <= max`.
fn a_lists(b: &[u32], max: i64) -> Vec<Vec<u32>> {
    let odd: i64 = b.iter().map(|&x| 2 * i64::from(x) - 1).sum();
    let b_desc: Vec<u32> = b.iter().rev().copied().collect();
    let mut out = Vec::new();
    // Build a descending, paired position by position.
    fn rec(
        b_desc: &[u32],
        cap: u32,
        odd: i64,
        even: i64,
        max: i64,
        acc: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let n = odd - even;
        if n >= 1 && n <= max {
            out.push(acc.iter().rev().copied().collect());
        }
        let i = acc.len();
        if i == b_desc.len() {
            return;
        }
        let hi = cap.min(b_desc[i] / 2);
        for a in 1..=hi {
            // Each further a only lowers n_X, so stop once it would drop below 1.
            if odd - even - (2 * i64::from(a) - 1) < 1 {
                break;
            }
            acc.push(a);
            rec(b_desc, a, odd, even + 2 * i64::from(a) - 1, max, acc, out);
            acc.pop();
        }
    }
    rec(&b_desc, u32::MAX, odd, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Candidate data inside the pruned search space, before the S.A.C. filter.
fn candidates_with_top(top: u32, max: u32) -> Vec<ExponentData> {
    let mut out = Vec::new();
    for b in b_lists(top, max) {
        for a in a_lists(&b, i64::from(max)) {
            let d = ExponentData::new(b.clone(), a).expect("valid exponents");
            if d.formal_dim() >= b.iter().map(|&x| i64::from(x)).sum::<i64>() {
                out.push(d);
            }
        }
    }
    out
}

/// All S.A.C. data with `1 <= n_X <= max_formal_dim`, in census order.
pub fn enumerate_sac_data(max_formal_dim: u32) -> Result<Vec<ExponentData>, Error> {
    check_cap(max_formal_dim)?;
    let mut all: Vec<ExponentData> = (2..=max_formal_dim.max(1))
        .into_par_iter()
        .flat_map_iter(|top| {
            candidates_with_top(top, max_formal_dim)
                .into_iter()
                .filter(|d| condition_holds(d, Mode::Sac))
        })
        .collect();
    all.par_sort_by_cached_key(census_order);
    Ok(all)
}

pub fn census_entry(d: &ExponentData) -> Result<CensusEntry, Error> {
    Ok(CensusEntry {
        data: d.clone(),
        invariants: invariants(d)?,
        sac: check_condition(d, Mode::Sac),
        bounds: bounds_report(d)?,
        verdict: hilali_verdict(d),
    })
}

/// Full census entries, in census order.
pub fn enumerate_sac(max_formal_dim: u32) -> Result<Vec<CensusEntry>, Error> {
    let data = enumerate_sac_data(max_formal_dim)?;
    data.par_iter().map(census_entry).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub data: ExponentData,
    pub check: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub max_formal_dim: u32,
    pub total: usize,
    /// Keyed by `n_X`.
    pub per_formal_dim: BTreeMap<i64, usize>,
    /// Keyed by `"q,r"`.
    pub per_qr: BTreeMap<String, usize>,
    pub verified: usize,
    pub bounds_consistent: usize,
    pub pure_fail: usize,
    pub not_applicable: usize,
    pub violations: Vec<Violation>,
}

/// Every consistency check run on a census entry; an empty list means the
/// entry is clean.
pub fn entry_violations(e: &CensusEntry) -> Vec<String> {
    let mut out: Vec<String> = e.bounds.violations();
    if !e.sac.holds {
        out.push("S.A.C. report disagrees with the filter".into());
    }
    out.extend(
        inequality_suite(&e.data)
            .into_iter()
            .filter(|c| !c.holds)
            .map(|c| c.name),
    );
    if e.data.is_pure() {
        match homology_poincare_pure(&e.data) {
            Ok(p) => {
                if !e.bounds.q_poly.dominates(&p) {
                    out.push("q_poly dominates P".into());
                }
                let dim_h = p.eval(&num_rational::BigRational::from_integer(1.into()));
                if dim_h > e.bounds.min_total_bound() {
                    out.push("dim_H <= every total bound".into());
                }
                if !betti_below_pavlov(&p, &e.bounds) {
                    out.push("betti numbers below pavlov_perdegree".into());
                }
            }
            Err(err) => out.push(format!("pure homology: {err}")),
        }
        if e.invariants.chi == 0 {
            out.push("chi is a positive integer".into());
        }
    }
    out
}

fn betti_below_pavlov(p: &RatPoly, bounds: &BoundsReport) -> bool {
    p.coeffs().iter().enumerate().all(|(m, c)| {
        bounds
            .pavlov_perdegree
            .get(m)
            .is_some_and(|bound| *c <= num_rational::BigRational::from_integer(bound.clone()))
    })
}

pub fn summarize(max_formal_dim: u32, entries: &[CensusEntry]) -> CensusSummary {
    let mut s = CensusSummary {
        max_formal_dim,
        total: entries.len(),
        ..CensusSummary::default()
    };
    for e in entries {
        *s.per_formal_dim.entry(e.invariants.formal_dim).or_default() += 1;
        *s.per_qr
            .entry(format!("{},{}", e.invariants.q, e.invariants.r))
            .or_default() += 1;
        match e.verdict {
            HilaliVerdict::Verified { .. } => s.verified += 1,
            HilaliVerdict::BoundsConsistent { .. } => s.bounds_consistent += 1,
            HilaliVerdict::PureFail { .. } => s.pure_fail += 1,
            HilaliVerdict::NotApplicable { .. } => s.not_applicable += 1,
        }
        for check in entry_violations(e) {
            s.violations.push(Violation {
                data: e.data.clone(),
                check,
            });
        }
    }
    s
}

pub fn census_report(max_formal_dim: u32) -> Result<CensusSummary, Error> {
    let entries = enumerate_sac(max_formal_dim)?;
    Ok(summarize(max_formal_dim, &entries))
}
