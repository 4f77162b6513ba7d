//! The arithmetic condition (A.C.) and strong arithmetic condition (S.A.C.)
//! on exponent data.
//!
//! For every subsequence `A*` of the a-exponents of length `s`, at least `s`
//! of the b-exponents must be non-negative integer combinations of `A*`.
//! S.A.C. additionally demands at least two summands in each combination.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::modelspace::ExponentData;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "AC")]
    Ac,
    #[serde(rename = "SAC")]
    Sac,
}

impl Mode {
    pub fn min_terms(self) -> u32 {
        match self {
            Mode::Ac => 1,
            Mode::Sac => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ac => "AC",
            Mode::Sac => "SAC",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('.', "").as_str() {
            "ac" => Ok(Mode::Ac),
            "sac" => Ok(Mode::Sac),
            _ => Err(Error::Domain(format!(
                "unknown mode {s:?}, expected ac or sac"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetRecord {
    /// Indices into the ascending a-exponents.
    pub subset: Vec<usize>,
    /// Indices into the ascending b-exponents.
    pub covered_b_indices: Vec<usize>,
    /// For each covered b-index, coefficients aligned with `subset`.
    pub witnesses: BTreeMap<usize, Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SacReport {
    pub mode: Mode,
    pub holds: bool,
    pub per_subset: Vec<SubsetRecord>,
    pub failing_subset: Option<Vec<usize>>,
}

/// Most summands over all ways of writing each value `0..=limit` as a
/// non-negative combination of `gens`, plus the last generator used on a
/// maximizing path.
struct TermTable {
    best: Vec<Option<u32>>,
    last: Vec<usize>,
}

impl TermTable {
    fn build(gens: &[u32], limit: u32) -> Self {
        let n = limit as usize + 1;
        let mut best = vec![None; n];
        let mut last = vec![usize::MAX; n];
        best[0] = Some(0);
        for v in 1..n {
            for (i, &g) in gens.iter().enumerate() {
                let g = g as usize;
                if g == 0 || g > v {
                    continue;
                }
                if let Some(prev) = best[v - g] {
                    if best[v].is_none_or(|b| prev + 1 > b) {
                        best[v] = Some(prev + 1);
                        last[v] = i;
                    }
                }
            }
        }
        TermTable { best, last }
    }

    fn reaches(&self, target: u32, min_terms: u32) -> bool {
        self.best
            .get(target as usize)
            .copied()
            .flatten()
            .is_some_and(|t| t >= min_terms.max(1))
    }

    fn witness(&self, gens: &[u32], target: u32) -> Vec<u32> {
        let mut gamma = vec![0u32; gens.len()];
        let mut v = target as usize;
        while v > 0 {
            let i = self.last[v];
            gamma[i] += 1;
            v -= gens[i] as usize;
        }
        gamma
    }
}

/// Some `γ` with `Σ γ_i gens_i = target` and `Σ γ_i >= min_terms`.
///
/// The table keeps the largest achievable coefficient sum for each value,
/// so a `None` answer means no representation has enough summands.
pub fn representable(target: u32, gens: &[u32], min_terms: u32) -> Option<Vec<u32>> {
    if gens.is_empty() || target == 0 {
        return None;
    }
    let table = TermTable::build(gens, target);
    table
        .reaches(target, min_terms)
        .then(|| table.witness(gens, target))
}

/// Non-empty index subsets of `0..r`, by size and then lexicographically.
fn subsets_in_order(r: usize) -> Vec<u64> {
    assert!(r < 64, "too many a-exponents");
    let mut masks: Vec<u64> = (1u64..(1u64 << r)).collect();
    let key = |m: &u64| {
        let idx: Vec<usize> = (0..r).filter(|i| m >> i & 1 == 1).collect();
        (idx.len(), idx)
    };
    masks.sort_by_cached_key(key);
    masks
}

fn indices(mask: u64, r: usize) -> Vec<usize> {
    (0..r).filter(|i| mask >> i & 1 == 1).collect()
}

fn covered_mask(d: &ExponentData, gens: &[u32], mode: Mode) -> (u64, TermTable) {
    let limit = d.b().iter().copied().max().unwrap_or(0);
    let table = TermTable::build(gens, limit);
    let mut mask = 0u64;
    for (j, &b) in d.b().iter().enumerate() {
        if table.reaches(b, mode.min_terms()) {
            mask |= 1 << j;
        }
    }
    (mask, table)
}

fn check_monotone(covered: &BTreeMap<u64, u64>, mask: u64, cov: u64) {
    for i in 0..64 {
        let sub = mask & !(1u64 << i);
        if sub != mask && sub != 0 {
            if let Some(&c) = covered.get(&sub) {
                assert_eq!(
                    c & !cov,
                    0,
                    "coverage shrank when enlarging the subsequence"
                );
            }
        }
    }
}

/// Full report, with witnesses for every subset.
pub fn check_condition(d: &ExponentData, mode: Mode) -> SacReport {
    let r = d.r();
    assert!(d.q() < 64, "too many b-exponents");
    let mut per_subset = Vec::new();
    let mut failing_subset = None;
    let mut covered_by_mask = BTreeMap::new();
    for mask in subsets_in_order(r) {
        let subset = indices(mask, r);
        let gens: Vec<u32> = subset.iter().map(|&i| d.a()[i]).collect();
        let (cov, table) = covered_mask(d, &gens, mode);
        check_monotone(&covered_by_mask, mask, cov);
        covered_by_mask.insert(mask, cov);
        let covered_b_indices: Vec<usize> = (0..d.q()).filter(|j| cov >> j & 1 == 1).collect();
        let witnesses = covered_b_indices
            .iter()
            .map(|&j| (j, table.witness(&gens, d.b()[j])))
            .collect();
        if covered_b_indices.len() < subset.len() && failing_subset.is_none() {
            failing_subset = Some(subset.clone());
        }
        per_subset.push(SubsetRecord {
            subset,
            covered_b_indices,
            witnesses,
        });
    }
    SacReport {
        mode,
        holds: failing_subset.is_none(),
        per_subset,
        failing_subset,
    }
}

/// Same verdict as `check_condition(d, mode).holds`, without witnesses and
/// stopping at the first failing subset.
pub fn condition_holds(d: &ExponentData, mode: Mode) -> bool {
    if d.q() < d.r() {
        return false;
    }
    let r = d.r();
    (1u64..(1u64 << r)).all(|mask| {
        let gens: Vec<u32> = indices(mask, r).iter().map(|&i| d.a()[i]).collect();
        covered_mask(d, &gens, mode).0.count_ones() as usize >= gens.len()
    })
}

/// With both lists sorted descending, `b_i >= 2 a_i` for `i = 1..r`.
pub fn double_exponent_check(d: &ExponentData) -> bool {
    d.q() >= d.r() && d.b_desc().zip(d.a_desc()).all(|(b, a)| b >= 2 * a)
}
