//! Mixed Hodge polynomials of products of complex projective spaces and
//! certified box inequalities between them.
//!
//! Model polynomials only involve `u` and `v` through `w = uv`, so the box
//! `[eps, r]^3` in `(t, u, v)` is certified as the rectangle
//! `[eps, r] x [eps^2, r^2]` in `(t, w)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactpoly::RatPoly;
use crate::modelspace::SpaceExpr;
use crate::stabilize::{scan_powers, CheckSummary, ThresholdResult};
use crate::{numfmt, Error};

pub const DEFAULT_MAX_DEPTH: u32 = 12;

/// Sparse `Σ dim · t^k u^p v^q` with positive integer dimensions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MHPoly {
    terms: BTreeMap<(u32, u32, u32), u64>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    k: u32,
    p: u32,
    q: u32,
    dim: u64,
}

impl Serialize for MHPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a BTreeMap<(u32, u32, u32), u64>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (&(k, p, q), &dim) in self.0 {
                    seq.serialize_element(&TermWire { k, p, q, dim })?;
                }
                seq.end()
            }
        }
        #[derive(Serialize)]
        struct Wire<'a> {
            terms: Terms<'a>,
        }
        Wire {
            terms: Terms(&self.terms),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MHPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            terms: Vec<TermWire>,
        }
        let w = Wire::deserialize(d)?;
        let mut m = MHPoly::default();
        for t in w.terms {
            m.add_term(t.k, t.p, t.q, t.dim)
                .map_err(serde::de::Error::custom)?;
        }
        Ok(m)
    }
}

impl MHPoly {
    pub fn one() -> Self {
        MHPoly::from_terms([((0, 0, 0), 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32, u32), u64)>) -> Self {
        let mut m = MHPoly::default();
        for ((k, p, q), dim) in terms {
            m.add_term(k, p, q, dim).expect("dimension overflow");
        }
        m
    }

    fn add_term(&mut self, k: u32, p: u32, q: u32, dim: u64) -> Result<(), Error> {
        if dim == 0 {
            return Ok(());
        }
        let slot = self.terms.entry((k, p, q)).or_insert(0);
        *slot = slot
            .checked_add(dim)
            .ok_or_else(|| Error::Overflow("mixed Hodge dimension exceeds 64 bits".into()))?;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), u64)> + '_ {
        self.terms.iter().map(|(&key, &dim)| (key, dim))
    }

    pub fn dim(&self, k: u32, p: u32, q: u32) -> u64 {
        self.terms.get(&(k, p, q)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term has `p = q`.
    pub fn is_hodge_tate(&self) -> bool {
        self.terms.keys().all(|&(_, p, q)| p == q)
    }

    pub fn try_add(&self, other: &MHPoly) -> Result<MHPoly, Error> {
        let mut out = self.clone();
        for (&(k, p, q), &dim) in &other.terms {
            out.add_term(k, p, q, dim)?;
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MHPoly) -> Result<MHPoly, Error> {
        let mut out = MHPoly::default();
        for (&(k1, p1, q1), &d1) in &self.terms {
            for (&(k2, p2, q2), &d2) in &other.terms {
                let dim = d1.checked_mul(d2).ok_or_else(|| {
                    Error::Overflow("mixed Hodge dimension exceeds 64 bits".into())
                })?;
                out.add_term(k1 + k2, p1 + p2, q1 + q2, dim)?;
            }
        }
        Ok(out)
    }

    /// `Σ dim · t^k u^p v^q` at an exact point.
    pub fn eval(&self, t: &BigRational, u: &BigRational, v: &BigRational) -> BigRational {
        self.terms
            .iter()
            .map(|(&(k, p, q), &dim)| {
                BigRational::from_integer(dim.into())
                    * num_traits::pow(t.clone(), k as usize)
                    * num_traits::pow(u.clone(), p as usize)
                    * num_traits::pow(v.clone(), q as usize)
            })
            .sum()
    }
}

fn projective_leaves(e: &SpaceExpr) -> Result<Vec<u32>, Error> {
    e.leaves()
        .into_iter()
        .map(|leaf| match leaf {
            SpaceExpr::Projective(m) => Ok(m),
            other => Err(Error::UnsupportedLeaf(other.to_string())),
        })
        .collect()
}

/// `Π_i (1 + t^2 uv + ... + t^(2 n_i) (uv)^(n_i))`.
pub fn mh_model(e: &SpaceExpr) -> Result<MHPoly, Error> {
    projective_leaves(e)?
        .into_iter()
        .try_fold(MHPoly::one(), |acc, m| {
            acc.try_mul(&MHPoly::from_terms((0..=m).map(|i| ((2 * i, i, i), 1))))
        })
}

/// `Σ_i (t^2 uv + t^(2 n_i + 1) (uv)^(n_i + 1))`.
pub fn mh_pi_model(e: &SpaceExpr) -> Result<MHPoly, Error> {
    projective_leaves(e)?
        .into_iter()
        .try_fold(MHPoly::default(), |acc, m| {
            acc.try_add(&MHPoly::from_terms([
                ((2, 1, 1), 1),
                ((2 * m + 1, m + 1, m + 1), 1),
            ]))
        })
}

/// `u = v = 1`.
pub fn specialize(m: &MHPoly) -> RatPoly {
    let mut coeffs: Vec<BigInt> = Vec::new();
    for ((k, _, _), dim) in m.terms() {
        let k = k as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, BigInt::zero());
        }
        coeffs[k] += dim;
    }
    RatPoly::from_bigints(coeffs)
}

/// Integer polynomial in `(t, w)`, keyed by `(deg_t, deg_w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BiPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BiPoly {
    fn from_mh(m: &MHPoly) -> Self {
        let mut terms = BTreeMap::new();
        for ((k, p, q), dim) in m.terms() {
            debug_assert_eq!(p, q);
            *terms.entry((k, p)).or_insert_with(BigInt::zero) += dim;
        }
        BiPoly { terms }
    }

    fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut terms: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for (&(k1, j1), c1) in &self.terms {
            for (&(k2, j2), c2) in &other.terms {
                *terms.entry((k1 + k2, j1 + j2)).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        BiPoly { terms }
    }

    fn pow(&self, n: u32) -> BiPoly {
        let mut acc = BiPoly {
            terms: BTreeMap::from([((0, 0), BigInt::one())]),
        };
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn sub_scaled(mut self, other: &BiPoly, k: &BigInt) -> BiPoly {
        for (&key, c) in &other.terms {
            *self.terms.entry(key).or_insert_with(BigInt::zero) -= c * k;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    fn max_degrees(&self) -> (u32, u32) {
        self.terms
            .keys()
            .fold((0, 0), |(a, b), &(k, j)| (a.max(k), b.max(j)))
    }
}

fn powers(x: &BigRational, max: u32) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut acc = BigRational::one();
    for _ in 0..=max {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

struct Evaluator<'a> {
    d: &'a BiPoly,
    deg: (u32, u32),
}

impl Evaluator<'_> {
    fn at(&self, t: &BigRational, w: &BigRational) -> BigRational {
        let tp = powers(t, self.deg.0);
        let wp = powers(w, self.deg.1);
        self.d
            .terms
            .iter()
            .map(|(&(k, j), c)| {
                BigRational::from_integer(c.clone()) * &tp[k as usize] * &wp[j as usize]
            })
            .sum()
    }

    /// Lower bound of `D` on `[t0, t1] x [w0, w1]` for `0 < t0`, `0 < w0`:
    /// positive terms at the low corner, negative terms at the high corner.
    fn lower_bound(
        &self,
        t0: &BigRational,
        t1: &BigRational,
        w0: &BigRational,
        w1: &BigRational,
    ) -> BigRational {
        let (tl, th) = (powers(t0, self.deg.0), powers(t1, self.deg.0));
        let (wl, wh) = (powers(w0, self.deg.1), powers(w1, self.deg.1));
        self.d
            .terms
            .iter()
            .map(|(&(k, j), c)| {
                let c = BigRational::from_integer(c.clone());
                if c.is_positive() {
                    c * &tl[k as usize] * &wl[j as usize]
                } else {
                    c * &th[k as usize] * &wh[j as usize]
                }
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "numfmt::ratio_str")]
    pub t: BigRational,
    #[serde(with = "numfmt::ratio_str")]
    pub u: BigRational,
    #[serde(with = "numfmt::ratio_str")]
    pub v: BigRational,
    /// `MH^n - n MH^π` at the witness; never positive.
    #[serde(with = "numfmt::ratio_str")]
    pub value: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoxVerdict {
    Positive { cells: u64 },
    NotPositive { witness: Box<Witness> },
    Unknown { depth: u32 },
}

fn merge(a: BoxVerdict, b: BoxVerdict) -> BoxVerdict {
    use BoxVerdict::*;
    match (a, b) {
        (w @ NotPositive { .. }, _) | (_, w @ NotPositive { .. }) => w,
        (u @ Unknown { .. }, _) | (_, u @ Unknown { .. }) => u,
        (Positive { cells: x }, Positive { cells: y }) => Positive { cells: x + y },
    }
}

#[derive(Clone)]
struct Cell {
    t0: BigRational,
    t1: BigRational,
    w0: BigRational,
    w1: BigRational,
}

struct BoxSearch<'a> {
    eval: Evaluator<'a>,
    eps: BigRational,
    rmax: BigRational,
    max_depth: u32,
}

impl BoxSearch<'_> {
    fn witness(&self, t: &BigRational, w: &BigRational, value: BigRational) -> Witness {
        let (u, v) = if *w <= &self.eps * &self.rmax {
            (self.eps.clone(), w / &self.eps)
        } else {
            (self.rmax.clone(), w / &self.rmax)
        };
        Witness {
            t: t.clone(),
            u,
            v,
            value,
        }
    }

    fn run(&self, cell: Cell, depth: u32) -> BoxVerdict {
        for (t, w) in [
            (&cell.t0, &cell.w0),
            (&cell.t0, &cell.w1),
            (&cell.t1, &cell.w0),
            (&cell.t1, &cell.w1),
        ] {
            let value = self.eval.at(t, w);
            if !value.is_positive() {
                return BoxVerdict::NotPositive {
                    witness: Box::new(self.witness(t, w, value)),
                };
            }
        }
        if self
            .eval
            .lower_bound(&cell.t0, &cell.t1, &cell.w0, &cell.w1)
            .is_positive()
        {
            return BoxVerdict::Positive { cells: 1 };
        }
        if depth >= self.max_depth {
            return BoxVerdict::Unknown { depth };
        }
        let two = BigRational::from_integer(2.into());
        let tm = (&cell.t0 + &cell.t1) / &two;
        let wm = (&cell.w0 + &cell.w1) / &two;
        let children = [
            Cell {
                t0: cell.t0.clone(),
                t1: tm.clone(),
                w0: cell.w0.clone(),
                w1: wm.clone(),
            },
            Cell {
                t0: cell.t0.clone(),
                t1: tm.clone(),
                w0: wm.clone(),
                w1: cell.w1.clone(),
            },
            Cell {
                t0: tm.clone(),
                t1: cell.t1.clone(),
                w0: cell.w0.clone(),
                w1: wm.clone(),
            },
            Cell {
                t0: tm,
                t1: cell.t1.clone(),
                w0: wm,
                w1: cell.w1.clone(),
            },
        ];
        let [a, b, c, d] = children;
        let ((ra, rb), (rc, rd)) = rayon::join(
            || rayon::join(|| self.run(a, depth + 1), || self.run(b, depth + 1)),
            || rayon::join(|| self.run(c, depth + 1), || self.run(d, depth + 1)),
        );
        merge(merge(ra, rb), merge(rc, rd))
    }
}

fn check_box(eps: &BigRational, rmax: &BigRational) -> Result<(), Error> {
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if eps > rmax {
        return Err(Error::Domain("eps exceeds rmax".into()));
    }
    Ok(())
}

/// Sign of `MH^n - n · MH^π` on `[eps, rmax]^3`.
pub fn mh_box_inequality(
    e: &SpaceExpr,
    n: u32,
    eps: &BigRational,
    rmax: &BigRational,
    max_depth: u32,
) -> Result<BoxVerdict, Error> {
    if n == 0 {
        return Err(Error::Domain("power must be positive".into()));
    }
    check_box(eps, rmax)?;
    let mh = BiPoly::from_mh(&mh_model(e)?);
    let mh_pi = BiPoly::from_mh(&mh_pi_model(e)?);
    let d = mh.pow(n).sub_scaled(&mh_pi, &BigInt::from(n));
    let search = BoxSearch {
        eval: Evaluator {
            deg: d.max_degrees(),
            d: &d,
        },
        eps: eps.clone(),
        rmax: rmax.clone(),
        max_depth,
    };
    let root = Cell {
        t0: eps.clone(),
        t1: rmax.clone(),
        w0: eps * eps,
        w1: rmax * rmax,
    };
    Ok(search.run(root, 0))
}

/// Least `n0` with the box inequality certified for every `n >= n0`.
pub fn mh_box_threshold(
    e: &SpaceExpr,
    eps: &BigRational,
    rmax: &BigRational,
    max_depth: u32,
) -> Result<ThresholdResult, Error> {
    check_box(eps, rmax)?;
    let corner = mh_model(e)?.eval(eps, eps, eps);
    scan_powers(eps, &corner, |n| {
        match mh_box_inequality(e, n, eps, rmax, max_depth)? {
            BoxVerdict::Positive { cells } => Ok((true, CheckSummary::Box { cells })),
            BoxVerdict::NotPositive { witness } => {
                let witness = *witness;
                Ok((
                    false,
                    CheckSummary::BoxWitness {
                        t: witness.t,
                        u: witness.u,
                        v: witness.v,
                        value: witness.value,
                    },
                ))
            }
            BoxVerdict::Unknown { depth } => Err(Error::Unknown { n, depth }),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspace::{
        exponent_data, homology_poincare_model, homotopy_poincare, parse_space,
    };

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn space(s: &str) -> SpaceExpr {
        parse_space(s).unwrap()
    }

    #[test]
    fn model_polynomials() {
        assert_eq!(
            mh_model(&space("CP1")).unwrap(),
            MHPoly::from_terms([((0, 0, 0), 1), ((2, 1, 1), 1)])
        );
        assert_eq!(
            mh_model(&space("CP1 x CP1")).unwrap(),
            MHPoly::from_terms([((0, 0, 0), 1), ((2, 1, 1), 2), ((4, 2, 2), 1)])
        );
        assert_eq!(
            mh_model(&space("CP2")).unwrap(),
            MHPoly::from_terms([((0, 0, 0), 1), ((2, 1, 1), 1), ((4, 2, 2), 1)])
        );
        assert_eq!(
            mh_pi_model(&space("CP1")).unwrap(),
            MHPoly::from_terms([((2, 1, 1), 1), ((3, 2, 2), 1)])
        );
        assert_eq!(
            mh_pi_model(&space("CP2 x CP2")).unwrap(),
            MHPoly::from_terms([((2, 1, 1), 2), ((5, 3, 3), 2)])
        );
        assert_eq!(
            mh_pi_model(&space("CP3")).unwrap(),
            MHPoly::from_terms([((2, 1, 1), 1), ((7, 4, 4), 1)])
        );
        assert!(matches!(
            mh_model(&space("S2 x CP1")),
            Err(Error::UnsupportedLeaf(_))
        ));
        assert!(matches!(
            mh_pi_model(&space("S3")),
            Err(Error::UnsupportedLeaf(_))
        ));
    }

    #[test]
    fn specializations() {
        assert_eq!(
            specialize(&mh_model(&space("CP2")).unwrap()),
            RatPoly::from_ints(&[1, 0, 1, 0, 1])
        );
        assert_eq!(
            specialize(&mh_pi_model(&space("CP1")).unwrap()),
            RatPoly::from_ints(&[0, 0, 1, 1])
        );
        assert!(specialize(&MHPoly::default()).is_zero());
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&mh_model(&space("CP1")).unwrap()).unwrap();
        assert_eq!(
            json,
            r#"{"terms":[{"k":0,"p":0,"q":0,"dim":1},{"k":2,"p":1,"q":1,"dim":1}]}"#
        );
        let back: MHPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mh_model(&space("CP1")).unwrap());
    }

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

    #[test]
    fn specialization_identities_and_hodge_tate() {
        for total in 1..=8 {
            let mut parts = Vec::new();
            partitions(total, total, &mut Vec::new(), &mut parts);
            for ms in parts {
                let e = SpaceExpr::Product(ms.iter().map(|&m| SpaceExpr::Projective(m)).collect())
                    .normalize();
                let mh = mh_model(&e).unwrap();
                let pi = mh_pi_model(&e).unwrap();
                assert_eq!(specialize(&mh), homology_poincare_model(&e), "{e}");
                assert_eq!(
                    specialize(&pi),
                    homotopy_poincare(&exponent_data(&e)),
                    "{e}"
                );
                assert!(mh.is_hodge_tate() && pi.is_hodge_tate());
            }
        }
    }

    #[test]
    fn multiplicativity() {
        let (x, y) = (space("CP2 x CP1"), space("CP3"));
        let xy = space("CP2 x CP1 x CP3");
        assert_eq!(
            mh_model(&xy).unwrap(),
            mh_model(&x)
                .unwrap()
                .try_mul(&mh_model(&y).unwrap())
                .unwrap()
        );
        assert_eq!(
            mh_pi_model(&xy).unwrap(),
            mh_pi_model(&x)
                .unwrap()
                .try_add(&mh_pi_model(&y).unwrap())
                .unwrap()
        );
    }

    fn difference(
        e: &SpaceExpr,
        n: u32,
        t: &BigRational,
        u: &BigRational,
        v: &BigRational,
    ) -> BigRational {
        let mh = mh_model(e).unwrap().eval(t, u, v);
        let pi = mh_pi_model(e).unwrap().eval(t, u, v);
        num_traits::pow(mh, n as usize) - pi * BigRational::from_integer(n.into())
    }

    fn grid(lo: &BigRational, hi: &BigRational, step: &BigRational) -> Vec<BigRational> {
        let mut out = vec![lo.clone()];
        let mut x = lo.clone();
        while &x + step <= *hi {
            x += step;
            out.push(x.clone());
        }
        if out.last() != Some(hi) {
            out.push(hi.clone());
        }
        out
    }

    fn grid_agrees(e: &SpaceExpr, n: u32, eps: &BigRational, rmax: &BigRational) -> BoxVerdict {
        let verdict = mh_box_inequality(e, n, eps, rmax, DEFAULT_MAX_DEPTH).unwrap();
        match &verdict {
            BoxVerdict::Positive { .. } => {
                let pts = grid(eps, rmax, &q(1, 8));
                for t in &pts {
                    for u in &pts {
                        for v in &pts {
                            assert!(
                                difference(e, n, t, u, v).is_positive(),
                                "{e} n={n} at ({t},{u},{v})"
                            );
                        }
                    }
                }
            }
            BoxVerdict::NotPositive { witness } => {
                for x in [&witness.t, &witness.u, &witness.v] {
                    assert!(eps <= x && x <= rmax);
                }
                let value = difference(e, n, &witness.t, &witness.u, &witness.v);
                assert_eq!(value, witness.value);
                assert!(!value.is_positive());
            }
            BoxVerdict::Unknown { .. } => {}
        }
        verdict
    }

    #[test]
    fn box_examples() {
        let cp1 = space("CP1");
        assert!(matches!(
            grid_agrees(&cp1, 3, &q(1, 1), &q(2, 1)),
            BoxVerdict::Positive { .. }
        ));
        assert!(matches!(
            grid_agrees(&space("CP2"), 1, &q(1, 1), &q(2, 1)),
            BoxVerdict::NotPositive { .. }
        ));
        match grid_agrees(&cp1, 1, &q(2, 1), &q(2, 1)) {
            BoxVerdict::NotPositive { witness } => assert_eq!(witness.value, q(17 - 144, 1)),
            other => panic!("{other:?}"),
        }
        for s in ["CP1", "CP2", "CP1 x CP1", "CP3"] {
            for n in 1..=4 {
                grid_agrees(&space(s), n, &q(1, 1), &q(3, 2));
                grid_agrees(&space(s), n, &q(1, 2), &q(1, 1));
            }
        }
    }

    #[test]
    fn box_thresholds() {
        let r = mh_box_threshold(&space("CP1"), &q(1, 1), &q(2, 1), DEFAULT_MAX_DEPTH).unwrap();
        assert!(r.threshold <= 3);
        let r = mh_box_threshold(&space("CP3"), &q(1, 1), &q(1, 1), DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(r.threshold, 1);
        let r = mh_box_threshold(&space("CP1"), &q(3, 2), &q(3, 2), DEFAULT_MAX_DEPTH).unwrap();
        assert!(r.threshold >= 1);
    }

    #[test]
    fn unknown_at_zero_depth() {
        // A tangency inside the box cannot be settled without subdivision.
        let v = mh_box_inequality(&space("CP1"), 3, &q(1, 1), &q(2, 1), 0).unwrap();
        assert!(matches!(
            v,
            BoxVerdict::Unknown { .. } | BoxVerdict::Positive { .. }
        ));
    }
}
