//! Exponent data, model spaces and their basic invariants.

mod expr;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exactpoly::{cyclotomic_quotient, RatPoly};
use crate::Error;

pub use expr::{parse_space, SpaceExpr};

/// Odd exponents `b` and even exponents `a` of a rational homotopy type,
/// both stored sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DataWire")]
pub struct ExponentData {
    b: Vec<u32>,
    a: Vec<u32>,
}

#[derive(Deserialize)]
struct DataWire {
    b: Vec<u32>,
    a: Vec<u32>,
}

impl TryFrom<DataWire> for ExponentData {
    type Error = Error;
    fn try_from(w: DataWire) -> Result<Self, Error> {
        ExponentData::new(w.b, w.a)
    }
}

impl ExponentData {
    pub fn new(mut b: Vec<u32>, mut a: Vec<u32>) -> Result<Self, Error> {
        if let Some(&x) = b.iter().find(|&&x| x < 2) {
            return Err(Error::Domain(format!("b-exponent {x} is below 2")));
        }
        if a.contains(&0) {
            return Err(Error::Domain("a-exponent 0".into()));
        }
        b.sort_unstable();
        a.sort_unstable();
        Ok(ExponentData { b, a })
    }

    /// The point space.
    pub fn point() -> Self {
        ExponentData {
            b: Vec::new(),
            a: Vec::new(),
        }
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b_desc(&self) -> impl Iterator<Item = u32> + '_ {
        self.b.iter().rev().copied()
    }

    pub fn a_desc(&self) -> impl Iterator<Item = u32> + '_ {
        self.a.iter().rev().copied()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    pub fn is_point(&self) -> bool {
        self.b.is_empty() && self.a.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.q() == self.r()
    }

    /// `n_X = Σ(2b - 1) - Σ(2a - 1)`.
    pub fn formal_dim(&self) -> i64 {
        let odd: i64 = self.b.iter().map(|&b| 2 * i64::from(b) - 1).sum();
        let even: i64 = self.a.iter().map(|&a| 2 * i64::from(a) - 1).sum();
        odd - even
    }

    /// `χ^π = r - q`.
    pub fn chi_pi(&self) -> i64 {
        self.r() as i64 - self.q() as i64
    }

    pub fn b_product(&self) -> BigInt {
        self.b.iter().map(|&b| BigInt::from(b)).product()
    }

    pub fn a_product(&self) -> BigInt {
        self.a.iter().map(|&a| BigInt::from(a)).product()
    }

    pub fn concat(&self, other: &ExponentData) -> ExponentData {
        let mut b = self.b.clone();
        b.extend_from_slice(&other.b);
        let mut a = self.a.clone();
        a.extend_from_slice(&other.a);
        b.sort_unstable();
        a.sort_unstable();
        ExponentData { b, a }
    }
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// Inline form `b=2,3;a=1,1`.
impl fmt::Display for ExponentData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b={};a={}", join(&self.b), join(&self.a))
    }
}

impl FromStr for ExponentData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut b = None;
        let mut a = None;
        let mut offset = 0;
        for part in s.split(';') {
            let here = offset;
            offset += part.len() + 1;
            let trimmed = part.trim();
            if trimmed.is_empty() {
                continue;
            }
            let (key, values) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
                position: here,
                message: format!("expected 'b=' or 'a=' in {trimmed:?}"),
            })?;
            let list: Vec<u32> = values
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(|v| {
                    v.parse::<u32>().map_err(|_| Error::Parse {
                        position: here,
                        message: format!("bad exponent {v:?}"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let slot = match key.trim() {
                "b" | "B" => &mut b,
                "a" | "A" => &mut a,
                other => {
                    return Err(Error::Parse {
                        position: here,
                        message: format!("unknown key {other:?}"),
                    })
                }
            };
            if slot.replace(list).is_some() {
                return Err(Error::Parse {
                    position: here,
                    message: format!("duplicate key {:?}", key.trim()),
                });
            }
        }
        ExponentData::new(b.unwrap_or_default(), a.unwrap_or_default())
    }
}

/// Exponent data of a model space.
pub fn exponent_data(e: &SpaceExpr) -> ExponentData {
    let mut b = Vec::new();
    let mut a = Vec::new();
    for leaf in e.leaves() {
        match leaf {
            SpaceExpr::Sphere(n) if n % 2 == 0 => {
                b.push(n);
                a.push(n / 2);
            }
            SpaceExpr::Sphere(n) => b.push(n.div_ceil(2)),
            SpaceExpr::Projective(m) => {
                b.push(m + 1);
                a.push(1);
            }
            _ => unreachable!("leaves only"),
        }
    }
    b.sort_unstable();
    a.sort_unstable();
    ExponentData { b, a }
}

/// `Σ t^(2a) + Σ t^(2b-1)`.
pub fn homotopy_poincare(d: &ExponentData) -> RatPoly {
    let even = d.a.iter().map(|&a| RatPoly::t_pow(2 * a as usize));
    let odd = d.b.iter().map(|&b| RatPoly::t_pow(2 * b as usize - 1));
    even.chain(odd).sum()
}

fn leaf_poincare(leaf: &SpaceExpr) -> RatPoly {
    match *leaf {
        SpaceExpr::Sphere(n) => RatPoly::one() + RatPoly::t_pow(n as usize),
        SpaceExpr::Projective(m) => (0..=m as usize).map(|i| RatPoly::t_pow(2 * i)).sum(),
        _ => unreachable!("leaves only"),
    }
}

/// Product of the leaf Poincaré polynomials.
pub fn homology_poincare_model(e: &SpaceExpr) -> RatPoly {
    e.leaves().iter().map(leaf_poincare).product()
}

/// `Π(1 - t^(2b)) / Π(1 - t^(2a))` for data with `q = r`.
pub fn homology_poincare_pure(d: &ExponentData) -> Result<RatPoly, Error> {
    if !d.is_pure() {
        return Err(Error::Purity { q: d.q(), r: d.r() });
    }
    cyclotomic_quotient(&d.b, &d.a, 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub q: usize,
    pub r: usize,
    pub dim_pi: usize,
    #[serde(rename = "n_X")]
    pub formal_dim: i64,
    pub chi_pi: i64,
    pub chi: u64,
    #[serde(rename = "dim_H", default, skip_serializing_if = "Option::is_none")]
    pub dim_h: Option<u64>,
}

fn to_u64(x: &BigInt) -> Result<u64, Error> {
    x.to_u64()
        .ok_or_else(|| Error::Overflow(format!("{x} does not fit in 64 bits")))
}

pub fn invariants(d: &ExponentData) -> Result<InvariantReport, Error> {
    let (chi, dim_h) = if d.is_pure() {
        let (num, den) = (d.b_product(), d.a_product());
        let (quot, rem) = num.div_rem(&den);
        if !rem.is_zero() {
            return Err(Error::NonIntegerChi {
                numerator: num.to_string(),
                denominator: den.to_string(),
            });
        }
        let p = homology_poincare_pure(d)?;
        let at_one = p.eval(&num_rational::BigRational::one());
        debug_assert_eq!(
            at_one,
            num_rational::BigRational::from_integer(quot.clone())
        );
        (to_u64(&quot)?, Some(to_u64(&at_one.to_integer())?))
    } else {
        (0, None)
    };
    Ok(InvariantReport {
        q: d.q(),
        r: d.r(),
        dim_pi: d.q() + d.r(),
        formal_dim: d.formal_dim(),
        chi_pi: d.chi_pi(),
        chi,
        dim_h,
    })
}

/// Exponent data together with whatever exact homology is known for it.
///
/// Data read from a model expression carries its model's Poincaré
/// polynomial; raw data only knows its homology when `q = r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceProfile {
    pub data: ExponentData,
    pub homology: Option<RatPoly>,
    pub model: Option<SpaceExpr>,
}

impl SpaceProfile {
    pub fn from_expr(e: &SpaceExpr) -> Self {
        SpaceProfile {
            data: exponent_data(e),
            homology: Some(homology_poincare_model(e)),
            model: Some(e.normalize()),
        }
    }

    pub fn from_data(d: ExponentData) -> Result<Self, Error> {
        let homology = if d.is_pure() {
            Some(homology_poincare_pure(&d)?)
        } else {
            None
        };
        Ok(SpaceProfile {
            data: d,
            homology,
            model: None,
        })
    }

    pub fn homotopy(&self) -> RatPoly {
        homotopy_poincare(&self.data)
    }

    pub fn homology(&self) -> Result<&RatPoly, Error> {
        self.homology.as_ref().ok_or(Error::NoExactHomology)
    }
}

/// Checks `Σ a_i <= Π b_i` for pairs `(a_i, b_i)` with `a_i <= b_i` and
/// either `b_i >= 2` or `(a_i, b_i) = (0, 1)`. Returns `None` when the
/// hypotheses fail.
pub fn sum_below_product(pairs: &[(u64, u64)]) -> Option<bool> {
    let admissible = pairs
        .iter()
        .all(|&(a, b)| a <= b && (b >= 2 || (a, b) == (0, 1)));
    if !admissible {
        return None;
    }
    let sum: BigInt = pairs.iter().map(|&(a, _)| BigInt::from(a)).sum();
    let prod: BigInt = pairs.iter().map(|&(_, b)| BigInt::from(b)).product();
    Some(sum <= prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn data(b: &[u32], a: &[u32]) -> ExponentData {
        ExponentData::new(b.to_vec(), a.to_vec()).unwrap()
    }

    fn space(s: &str) -> SpaceExpr {
        parse_space(s).unwrap()
    }

    #[test]
    fn leaf_exponents() {
        assert_eq!(exponent_data(&space("S4")), data(&[4], &[2]));
        assert_eq!(exponent_data(&space("CP2")), data(&[3], &[1]));
        assert_eq!(exponent_data(&space("S3")), data(&[2], &[]));
        assert_eq!(
            exponent_data(&space("S3 x CP1 x S6")),
            data(&[2, 2, 6], &[1, 3])
        );
    }

    #[test]
    fn homotopy_polynomials() {
        assert_eq!(
            homotopy_poincare(&data(&[2], &[1])),
            RatPoly::from_ints(&[0, 0, 1, 1])
        );
        assert_eq!(
            homotopy_poincare(&data(&[5], &[1])),
            RatPoly::from_ints(&[0, 0, 1, 0, 0, 0, 0, 0, 0, 1])
        );
        assert!(homotopy_poincare(&ExponentData::point()).is_zero());
    }

    #[test]
    fn model_homology() {
        assert_eq!(
            homology_poincare_model(&space("S2 x S2")),
            RatPoly::from_ints(&[1, 0, 2, 0, 1])
        );
        assert_eq!(
            homology_poincare_model(&space("CP1 x CP3")),
            RatPoly::from_ints(&[1, 0, 2, 0, 2, 0, 2, 0, 1])
        );
        assert_eq!(
            homology_poincare_model(&space("S3")),
            RatPoly::from_ints(&[1, 0, 0, 1])
        );
    }

    #[test]
    fn pure_homology() {
        assert_eq!(
            homology_poincare_pure(&data(&[3], &[1])).unwrap(),
            RatPoly::from_ints(&[1, 0, 1, 0, 1])
        );
        assert_eq!(
            homology_poincare_pure(&data(&[4], &[2])).unwrap(),
            RatPoly::from_ints(&[1, 0, 0, 0, 1])
        );
        // Oracle: multiply the two factors directly.
        let expected = RatPoly::from_ints(&[1, 0, 1]) * RatPoly::from_ints(&[1, 0, 1, 0, 1]);
        assert_eq!(
            homology_poincare_pure(&data(&[2, 3], &[1, 1])).unwrap(),
            expected
        );
        assert_eq!(
            homology_poincare_pure(&data(&[2], &[])),
            Err(Error::Purity { q: 1, r: 0 })
        );
    }

    #[test]
    fn invariant_reports() {
        let cp2 = invariants(&data(&[3], &[1])).unwrap();
        assert_eq!(
            (cp2.formal_dim, cp2.chi, cp2.chi_pi, cp2.dim_pi),
            (4, 3, 0, 2)
        );
        assert_eq!(cp2.dim_h, Some(3));
        let s3 = invariants(&data(&[2], &[])).unwrap();
        assert_eq!((s3.formal_dim, s3.chi, s3.chi_pi, s3.dim_pi), (3, 0, -1, 1));
        assert_eq!(s3.dim_h, None);
        assert_eq!(invariants(&data(&[4], &[2])).unwrap().formal_dim, 4);
        let pt = invariants(&ExponentData::point()).unwrap();
        assert_eq!((pt.formal_dim, pt.chi, pt.dim_h), (0, 1, Some(1)));
    }

    #[test]
    fn non_integer_chi() {
        assert!(matches!(
            invariants(&data(&[3], &[2])),
            Err(Error::NonIntegerChi { .. }) | Err(Error::NonPolynomialQuotient(_))
        ));
    }

    #[test]
    fn inline_and_json_forms() {
        let d: ExponentData = "b=3,2;a=1,1".parse().unwrap();
        assert_eq!(d, data(&[2, 3], &[1, 1]));
        assert_eq!(d.to_string(), "b=2,3;a=1,1");
        assert_eq!(
            "a=1; b=2".parse::<ExponentData>().unwrap(),
            data(&[2], &[1])
        );
        assert_eq!("b=2;a=".parse::<ExponentData>().unwrap(), data(&[2], &[]));
        assert!("b=1;a=".parse::<ExponentData>().is_err());
        assert!("b=2;c=1".parse::<ExponentData>().is_err());
        assert!("b=x".parse::<ExponentData>().is_err());
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"b":[2,3],"a":[1,1]}"#);
        assert_eq!(
            serde_json::from_str::<ExponentData>(json.as_str()).unwrap(),
            d
        );
        assert!(serde_json::from_str::<ExponentData>(r#"{"b":[1],"a":[]}"#).is_err());
    }

    #[test]
    fn invariant_report_json_keys() {
        let v = serde_json::to_value(invariants(&data(&[3], &[1])).unwrap()).unwrap();
        assert_eq!(v["n_X"], 4);
        assert_eq!(v["dim_H"], 3);
        let v = serde_json::to_value(invariants(&data(&[2], &[])).unwrap()).unwrap();
        assert!(v.get("dim_H").is_none());
    }

    #[test]
    fn profiles() {
        let s3 = SpaceProfile::from_expr(&space("S3"));
        assert_eq!(s3.homology().unwrap(), &RatPoly::from_ints(&[1, 0, 0, 1]));
        let raw = SpaceProfile::from_data(data(&[2], &[])).unwrap();
        assert_eq!(raw.homology(), Err(Error::NoExactHomology));
    }

    fn arb_leaf() -> impl Strategy<Value = SpaceExpr> {
        prop_oneof![
            (2u32..14).prop_map(SpaceExpr::Sphere),
            (1u32..7).prop_map(SpaceExpr::Projective)
        ]
    }

    fn arb_space() -> impl Strategy<Value = SpaceExpr> {
        prop::collection::vec(arb_leaf(), 1..5).prop_map(|v| SpaceExpr::Product(v).normalize())
    }

    fn leaf_dim_pi(l: &SpaceExpr) -> i64 {
        match l {
            SpaceExpr::Sphere(n) if n % 2 == 1 => 1,
            _ => 2,
        }
    }

    proptest! {
        #[test]
        fn homotopy_adds_and_homology_multiplies(e in arb_space()) {
            let one = BigRational::one();
            let d = exponent_data(&e);
            let pi_sum: i64 = e.leaves().iter().map(leaf_dim_pi).sum();
            prop_assert_eq!(homotopy_poincare(&d).eval(&one), BigRational::from_integer(pi_sum.into()));
            let h_prod: BigInt = e.leaves().iter().map(|l| match *l {
                SpaceExpr::Sphere(_) => BigInt::from(2),
                SpaceExpr::Projective(m) => BigInt::from(m + 1),
                _ => unreachable!(),
            }).product();
            prop_assert_eq!(homology_poincare_model(&e).eval(&one), BigRational::from_integer(h_prod));
        }

        #[test]
        fn halperin_signs_on_models(e in arb_space()) {
            let d = exponent_data(&e);
            let p = homology_poincare_model(&e);
            prop_assert!(p.eval(&-BigRational::one()) >= BigRational::zero());
            prop_assert!(d.chi_pi() <= 0);
            prop_assert_eq!(p.degree(), Some(d.formal_dim() as usize));
        }

        #[test]
        fn pure_models_agree_with_quotient(e in arb_space()) {
            let d = exponent_data(&e);
            if d.is_pure() {
                let p = homology_poincare_pure(&d).unwrap();
                prop_assert_eq!(&p, &homology_poincare_model(&e));
                prop_assert!(p.is_palindromic());
                prop_assert_eq!(p.eval(&BigRational::one()), p.eval(&-BigRational::one()));
            }
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn sum_of_a_below_product_of_b(
            pairs in prop::collection::vec(
                prop_oneof![
                    Just((0u64, 1u64)),
                    (2u64..9).prop_flat_map(|b| (0..=b, Just(b))),
                ],
                1..6,
            )
        ) {
            prop_assert_eq!(sum_below_product(&pairs), Some(true));
        }
    }

    #[test]
    fn lemma_hypotheses_checked() {
        assert_eq!(sum_below_product(&[(1, 1)]), None);
        assert_eq!(sum_below_product(&[(3, 2)]), None);
    }
}
