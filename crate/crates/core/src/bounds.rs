//! The bound polynomial `Q_X`, upper bounds on total Betti number, and
//! Hilali verdicts.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arithcond::{condition_holds, double_exponent_check, Mode};
use crate::exactpoly::{cyclotomic_quotient, RatPoly};
use crate::modelspace::{ExponentData, SpaceExpr};
use crate::{numfmt, Error};

/// `Π(1 - t^(2b)) / ((1 - t)^(q-r) Π(1 - t^(2a)))`.
pub fn q_bound_poly(d: &ExponentData) -> Result<RatPoly, Error> {
    if d.q() < d.r() {
        return Err(Error::NonPolynomialQuotient(format!(
            "q = {} is below r = {}",
            d.q(),
            d.r()
        )));
    }
    cyclotomic_quotient(d.b(), d.a(), (d.q() - d.r()) as u32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

fn check(name: &str, holds: bool) -> Check {
    Check {
        name: name.to_string(),
        holds,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub q_poly: RatPoly,
    #[serde(with = "numfmt::bigint_str")]
    pub q_at_1: BigInt,
    #[serde(with = "numfmt::ratio_str")]
    pub fh_bound: BigRational,
    #[serde(with = "numfmt::bigint_str")]
    pub pow2_nx: BigInt,
    #[serde(with = "numfmt::bigint_str")]
    pub pow2_nx_minus_r: BigInt,
    #[serde(
        with = "numfmt::opt_ratio_str",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub b1_bound: Option<BigRational>,
    #[serde(
        with = "numfmt::opt_ratio_str",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub amgm_bound: Option<BigRational>,
    #[serde(with = "numfmt::vec_bigint_str")]
    pub pavlov_perdegree: Vec<BigInt>,
    #[serde(with = "numfmt::bigint_str")]
    pub pavlov_total: BigInt,
    #[serde(with = "numfmt::bigint_str")]
    pub giant: BigInt,
    /// False when the data fails S.A.C.; the bounds are then not backed by
    /// any theorem.
    pub sac_holds: bool,
    pub orderings: Vec<Check>,
}

impl BoundsReport {
    /// Every upper bound on total homology dimension, by name.
    pub fn total_bounds(&self) -> Vec<(&'static str, BigRational)> {
        let int = |x: &BigInt| BigRational::from_integer(x.clone());
        let mut out = vec![
            ("q_at_1", int(&self.q_at_1)),
            ("fh_bound", self.fh_bound.clone()),
            ("pow2_nx", int(&self.pow2_nx)),
            ("pow2_nx_minus_r", int(&self.pow2_nx_minus_r)),
        ];
        if let Some(b) = &self.b1_bound {
            out.push(("b1_bound", b.clone()));
        }
        if let Some(b) = &self.amgm_bound {
            out.push(("amgm_bound", b.clone()));
        }
        out.push(("pavlov_total", int(&self.pavlov_total)));
        out.push(("giant", int(&self.giant)));
        out
    }

    pub fn min_total_bound(&self) -> BigRational {
        self.total_bounds()
            .into_iter()
            .map(|(_, v)| v)
            .min()
            .expect("at least one bound")
    }

    pub fn violations(&self) -> Vec<String> {
        self.orderings
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name.clone())
            .collect()
    }
}

fn pow_int(base: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

fn ratio_pow(x: BigRational, e: usize) -> BigRational {
    num_traits::pow(x, e)
}

/// The full ladder of upper bounds. Data must have `n_X >= 1` and
/// `n_X >= r`.
pub fn bounds_report(d: &ExponentData) -> Result<BoundsReport, Error> {
    let n = d.formal_dim();
    if n < 1 {
        return Err(Error::Degenerate(format!(
            "formal dimension {n} has no bound ladder"
        )));
    }
    let (q, r) = (d.q(), d.r());
    if n < r as i64 {
        return Err(Error::Domain(format!(
            "formal dimension {n} is below r = {r}"
        )));
    }
    let nu = n as u64;
    let q_poly = q_bound_poly(d)?;
    let q_at_1 = q_poly.eval(&BigRational::one()).to_integer();
    let fh_bound = BigRational::new(d.b_product() << (q - r), d.a_product());
    let pow2_nx = pow_int(2, nu);
    let pow2_nx_minus_r = pow_int(2, nu - r as u64);
    let b1_bound = (r > 0).then(|| {
        let b_max = *d.b().last().expect("q >= r > 0");
        let a_min = d.a()[0];
        BigRational::new(
            pow_int(2 * u64::from(b_max), q as u64),
            pow_int(2 * u64::from(a_min), r as u64),
        )
    });
    let amgm_bound =
        (q > 0).then(|| ratio_pow(BigRational::new(BigInt::from(2 * n), BigInt::from(q)), q));
    let pavlov_perdegree: Vec<BigInt> = (0..=nu)
        .map(|m| {
            let c = binomial(BigInt::from(nu), BigInt::from(m));
            if m == 0 || m == nu {
                c
            } else {
                (c + 1u32) / 2u32
            }
        })
        .collect();
    let pavlov_total = pow_int(2, nu - 1) + 1u32;
    let giant = pow_int(2 * nu, nu);

    let int = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut orderings = vec![
        check("q_at_1 = fh_bound", int(&q_at_1) == fh_bound),
        check(
            "q_poly coefficients non-negative",
            q_poly.has_nonnegative_coeffs(),
        ),
        check("q_poly constant term 1", q_poly.coeff(0).is_one()),
        check("deg q_poly = n_X", q_poly.degree() == Some(nu as usize)),
        check(
            "c_m <= C(n_X, m)",
            (0..=nu).all(|m| {
                q_poly.coeff(m as usize)
                    <= BigRational::from_integer(binomial(BigInt::from(nu), BigInt::from(m)))
            }),
        ),
        check(
            "fh_bound <= pow2_nx_minus_r",
            fh_bound <= int(&pow2_nx_minus_r),
        ),
        check("pow2_nx_minus_r <= pow2_nx", pow2_nx_minus_r <= pow2_nx),
        check("fh_bound <= pow2_nx", fh_bound <= int(&pow2_nx)),
        check("pow2_nx <= giant", pow2_nx <= giant),
    ];
    if let Some(b1) = &b1_bound {
        orderings.push(check("fh_bound <= b1_bound", &fh_bound <= b1));
    }
    if let Some(am) = &amgm_bound {
        orderings.push(check("fh_bound <= amgm_bound", &fh_bound <= am));
    }
    Ok(BoundsReport {
        q_poly,
        q_at_1,
        fh_bound,
        pow2_nx,
        pow2_nx_minus_r,
        b1_bound,
        amgm_bound,
        pavlov_perdegree,
        pavlov_total,
        giant,
        sac_holds: condition_holds(d, Mode::Sac),
        orderings,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedBound {
    pub name: String,
    #[serde(with = "numfmt::ratio_str")]
    pub value: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum HilaliVerdict {
    Verified {
        dim_pi: u64,
        #[serde(rename = "dim_H")]
        dim_h: u64,
    },
    PureFail {
        dim_pi: u64,
        #[serde(rename = "dim_H")]
        dim_h: u64,
    },
    /// `q > r`: only bounds on `dim H` are known. `dim_H >= 2` holds by
    /// Poincaré duality for any non-point space.
    BoundsConsistent {
        dim_pi: u64,
        #[serde(rename = "dim_H_lower")]
        dim_h_lower: u64,
        upper_bounds: Vec<NamedBound>,
    },
    NotApplicable {
        reason: String,
    },
}

impl HilaliVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            HilaliVerdict::Verified { .. } => "Verified",
            HilaliVerdict::PureFail { .. } => "PureFail",
            HilaliVerdict::BoundsConsistent { .. } => "BoundsConsistent",
            HilaliVerdict::NotApplicable { .. } => "NotApplicable",
        }
    }
}

pub fn hilali_verdict(d: &ExponentData) -> HilaliVerdict {
    if !condition_holds(d, Mode::Sac) {
        return HilaliVerdict::NotApplicable {
            reason: "strong arithmetic condition fails".into(),
        };
    }
    let dim_pi = (d.q() + d.r()) as u64;
    if d.is_pure() {
        let chi = BigRational::new(d.b_product(), d.a_product());
        if !chi.is_integer() {
            return HilaliVerdict::NotApplicable {
                reason: format!(
                    "b-product / a-product = {} is not an integer",
                    numfmt::ratio_to_string(&chi)
                ),
            };
        }
        let Some(dim_h) = chi.to_integer().to_u64() else {
            return HilaliVerdict::NotApplicable {
                reason: "homology dimension exceeds 64 bits".into(),
            };
        };
        return if dim_pi <= dim_h {
            HilaliVerdict::Verified { dim_pi, dim_h }
        } else {
            HilaliVerdict::PureFail { dim_pi, dim_h }
        };
    }
    match bounds_report(d) {
        Ok(rep) => HilaliVerdict::BoundsConsistent {
            dim_pi,
            dim_h_lower: 2,
            upper_bounds: rep
                .total_bounds()
                .into_iter()
                .map(|(name, value)| NamedBound {
                    name: name.to_string(),
                    value,
                })
                .collect(),
        },
        Err(e) => HilaliVerdict::NotApplicable {
            reason: e.to_string(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

fn ge(name: &str, lhs: i64, rhs: i64) -> Inequality {
    Inequality {
        name: name.to_string(),
        lhs,
        rhs,
        holds: lhs >= rhs,
    }
}

/// Necessary inequalities for admissible data, each of the form `lhs >= rhs`.
pub fn inequality_suite(d: &ExponentData) -> Vec<Inequality> {
    let n = d.formal_dim();
    let (q, r) = (d.q() as i64, d.r() as i64);
    let sum_b: i64 = d.b().iter().map(|&b| i64::from(b)).sum();
    let sum_odd: i64 = d.b().iter().map(|&b| 2 * i64::from(b) - 1).sum();
    let sum_2a: i64 = d.a().iter().map(|&a| 2 * i64::from(a)).sum();
    let paired = d
        .b_desc()
        .zip(d.a_desc())
        .filter(|&(b, a)| b >= 2 * a)
        .count() as i64;
    vec![
        ge("n_X >= q + r", n, q + r),
        ge("n_X >= sum b", n, sum_b),
        ge("2n_X - 1 >= sum (2b - 1)", 2 * n - 1, sum_odd),
        ge("n_X >= sum 2a", n, sum_2a),
        ge("n_X >= 3q - r", n, 3 * q - r),
        ge("2n_X - q >= sum (2b - 1)", 2 * n - q, sum_odd),
        ge("n_X >= sum 2a - 2 chi_pi", n, sum_2a - 2 * d.chi_pi()),
        ge("0 >= chi_pi", 0, d.chi_pi()),
        Inequality {
            name: "b_i >= 2 a_i (descending)".into(),
            lhs: paired,
            rhs: r,
            holds: double_exponent_check(d),
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub palindromic: bool,
    pub factors: Option<Vec<SpaceExpr>>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Sphere,
    Projective,
}

fn factor_poly(deg: usize, kind: Kind) -> RatPoly {
    match kind {
        Kind::Projective => (0..=deg).map(RatPoly::t_pow).sum(),
        Kind::Sphere => RatPoly::one() + RatPoly::t_pow(deg),
    }
}

fn search(
    rem: &RatPoly,
    cap: (usize, Kind),
    allow_spheres: bool,
    out: &mut Vec<(usize, Kind)>,
) -> bool {
    let Some(deg) = rem.degree() else {
        return false;
    };
    if deg == 0 {
        return rem.is_one();
    }
    let top = deg.min(cap.0);
    for d in (1..=top).rev() {
        for kind in [Kind::Projective, Kind::Sphere] {
            if (d, kind) > cap {
                continue;
            }
            if kind == Kind::Sphere && (!allow_spheres || d < 2) {
                continue;
            }
            if let Some(quot) = rem.exact_div(&factor_poly(d, kind)) {
                out.push((d, kind));
                if search(&quot, (d, kind), allow_spheres, out) {
                    return true;
                }
                out.pop();
            }
        }
    }
    false
}

/// Writes `p` as a product of projective-space polynomials
/// `1 + t^2 + ... + t^(2m)` and, when allowed, even-sphere polynomials
/// `1 + t^(2n)`, largest factors first.
pub fn decompose_projective(p: &RatPoly, allow_spheres: bool) -> Decomposition {
    let palindromic = !p.is_zero() && p.is_palindromic();
    let admissible = p
        .coeffs()
        .iter()
        .all(|c| c.is_integer() && !c.is_negative())
        && p.coeff(0).is_one();
    let factors = (palindromic && admissible)
        .then(|| p.deflate(2))
        .flatten()
        .and_then(|x| {
            let mut out = Vec::new();
            let deg = x.degree().unwrap_or(0);
            search(&x, (deg, Kind::Projective), allow_spheres, &mut out).then(|| {
                out.into_iter()
                    .map(|(d, kind)| match kind {
                        Kind::Projective => SpaceExpr::Projective(d as u32),
                        Kind::Sphere => SpaceExpr::Sphere(2 * d as u32),
                    })
                    .collect()
            })
        });
    Decomposition {
        palindromic,
        factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspace::{homology_poincare_model, homology_poincare_pure};
    use proptest::prelude::*;

    fn data(b: &[u32], a: &[u32]) -> ExponentData {
        ExponentData::new(b.to_vec(), a.to_vec()).unwrap()
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn bound_polynomials() {
        assert_eq!(
            q_bound_poly(&data(&[2], &[])).unwrap(),
            RatPoly::from_ints(&[1, 1, 1, 1])
        );
        assert_eq!(
            q_bound_poly(&data(&[3], &[1])).unwrap(),
            RatPoly::from_ints(&[1, 0, 1, 0, 1])
        );
        // Oracle: square of the single-factor polynomial.
        let single = RatPoly::from_ints(&[1, 1, 1, 1]);
        assert_eq!(
            q_bound_poly(&data(&[2, 2], &[])).unwrap(),
            &single * &single
        );
        assert_eq!(
            q_bound_poly(&data(&[2, 2], &[])).unwrap(),
            RatPoly::from_ints(&[1, 2, 3, 4, 3, 2, 1])
        );
    }

    #[test]
    fn remark_bounds() {
        for n in 1..6u32 {
            let rep = bounds_report(&data(&[n + 1], &[1])).unwrap();
            assert_eq!(rep.b1_bound, Some(int(i64::from(n) + 1)));
            let rep = bounds_report(&data(&[2 * n], &[n])).unwrap();
            assert_eq!(rep.b1_bound, Some(int(2)));
        }
        let cp2 = bounds_report(&data(&[3], &[1])).unwrap();
        assert_eq!(cp2.amgm_bound, Some(int(8)));
        assert_eq!(cp2.pavlov_total, BigInt::from(9));
        assert_eq!(cp2.fh_bound, int(3));
        assert_eq!(cp2.q_at_1, BigInt::from(3));
        assert_eq!(cp2.giant, BigInt::from(4096));
        assert_eq!(
            cp2.pavlov_perdegree,
            [1, 2, 3, 2, 1].map(BigInt::from).to_vec()
        );
        assert!(cp2.violations().is_empty());
        let s3 = bounds_report(&data(&[2], &[])).unwrap();
        assert_eq!(s3.b1_bound, None);
        assert_eq!(s3.fh_bound, int(4));
    }

    #[test]
    fn report_json_field_order() {
        let json = serde_json::to_string(&bounds_report(&data(&[3], &[1])).unwrap()).unwrap();
        let keys = [
            "q_poly",
            "q_at_1",
            "fh_bound",
            "pow2_nx",
            "pow2_nx_minus_r",
            "b1_bound",
            "amgm_bound",
            "pavlov_perdegree",
            "pavlov_total",
            "giant",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert!(json.contains(r#""fh_bound":"3/1""#));
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            hilali_verdict(&data(&[3], &[1])),
            HilaliVerdict::Verified {
                dim_pi: 2,
                dim_h: 3
            }
        );
        assert_eq!(
            hilali_verdict(&data(&[4], &[2])),
            HilaliVerdict::Verified {
                dim_pi: 2,
                dim_h: 2
            }
        );
        match hilali_verdict(&data(&[2], &[])) {
            HilaliVerdict::BoundsConsistent {
                dim_pi,
                dim_h_lower,
                upper_bounds,
            } => {
                assert_eq!(dim_pi, 1);
                assert!(dim_pi <= dim_h_lower);
                assert!(upper_bounds.iter().all(|b| b.value >= int(2)));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            hilali_verdict(&data(&[3, 4, 6], &[2, 3, 4])),
            HilaliVerdict::NotApplicable { .. }
        ));
        let v = serde_json::to_value(hilali_verdict(&data(&[3], &[1]))).unwrap();
        assert_eq!(v["kind"], "Verified");
        assert_eq!(v["dim_H"], 3);
    }

    #[test]
    fn inequality_examples() {
        let s4 = inequality_suite(&data(&[4], &[2]));
        assert!(s4.iter().all(|c| c.holds));
        let eq = s4.iter().find(|c| c.name == "n_X >= sum 2a").unwrap();
        assert_eq!((eq.lhs, eq.rhs), (4, 4));
        let cp2 = inequality_suite(&data(&[3], &[1]));
        let c = cp2
            .iter()
            .find(|c| c.name == "2n_X - q >= sum (2b - 1)")
            .unwrap();
        assert_eq!((c.lhs, c.rhs), (7, 5));
        let bb = inequality_suite(&data(&[2, 2], &[]));
        let c = bb.iter().find(|c| c.name == "n_X >= 3q - r").unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (6, 6, true));
    }

    fn poly(s: &str) -> RatPoly {
        s.parse().unwrap()
    }

    fn names(dec: &Decomposition) -> Option<Vec<String>> {
        dec.factors.as_ref().map(|f| {
            let mut v: Vec<String> = f.iter().map(|e| e.to_string()).collect();
            v.sort();
            v
        })
    }

    #[test]
    fn decompositions() {
        let d = decompose_projective(&poly("1+2t^2+3t^4+2t^6+t^8"), false);
        assert_eq!(names(&d), Some(vec!["CP2".into(), "CP2".into()]));
        let d = decompose_projective(&poly("1+t^2+2t^4+t^6+t^8"), true);
        assert_eq!(names(&d), Some(vec!["CP2".into(), "S4".into()]));
        assert_eq!(
            decompose_projective(&poly("1+t^2+2t^4+t^6+t^8"), false).factors,
            None
        );
        let d = decompose_projective(&poly("1+t^2+2t^4+t^6"), true);
        assert!(!d.palindromic);
        assert_eq!(d.factors, None);
        assert_eq!(decompose_projective(&poly("1+t^3"), true).factors, None);
        assert_eq!(decompose_projective(&poly("2+2t^2"), true).factors, None);
        assert_eq!(
            names(&decompose_projective(&poly("1+t^2"), true)),
            Some(vec!["CP1".into()])
        );
    }

    #[test]
    fn decomposition_inverts_model_homology() {
        fn partitions(n: u32, max: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if n == 0 {
                out.push(acc.clone());
                return;
            }
            for m in (1..=n.min(max)).rev() {
                acc.push(m);
                partitions(n - m, m, acc, out);
                acc.pop();
            }
        }
        for total in 1..=10 {
            let mut parts = Vec::new();
            partitions(total, total, &mut Vec::new(), &mut parts);
            for ms in parts {
                let expr =
                    SpaceExpr::Product(ms.iter().map(|&m| SpaceExpr::Projective(m)).collect())
                        .normalize();
                let dec = decompose_projective(&homology_poincare_model(&expr), false);
                let got: Vec<u32> = dec
                    .factors
                    .unwrap()
                    .iter()
                    .map(|f| match f {
                        SpaceExpr::Projective(m) => *m,
                        _ => unreachable!(),
                    })
                    .collect();
                assert_eq!(got, ms, "{expr}");
            }
        }
    }

    fn arb_space() -> impl Strategy<Value = SpaceExpr> {
        let leaf = prop_oneof![
            (2u32..10).prop_map(SpaceExpr::Sphere),
            (1u32..6).prop_map(SpaceExpr::Projective)
        ];
        prop::collection::vec(leaf, 1..4).prop_map(|v| SpaceExpr::Product(v).normalize())
    }

    proptest! {
        #[test]
        fn model_homology_under_bounds(e in arb_space()) {
            let d = crate::modelspace::exponent_data(&e);
            let p = homology_poincare_model(&e);
            let rep = bounds_report(&d).unwrap();
            prop_assert!(rep.q_poly.dominates(&p));
            prop_assert!(rep.violations().is_empty());
            prop_assert!(p.eval(&BigRational::one()) <= rep.min_total_bound());
            if d.is_pure() {
                prop_assert_eq!(&rep.q_poly, &homology_poincare_pure(&d).unwrap());
            }
            prop_assert!(inequality_suite(&d).iter().all(|c| c.holds));
        }
    }
}
