use num_bigint::BigInt;
use num_rational::BigRational;

use super::RatPoly;
use crate::Error;

/// `1 + t + ... + t^(len-1)`.
pub fn geometric_sum(len: usize) -> RatPoly {
    RatPoly::from_coeffs(vec![BigRational::from_integer(BigInt::from(1)); len])
}

/// Exact value of
///
/// ```text
///        Π_j (1 - t^(2 b_j))
/// -------------------------------------
/// (1 - t)^extra · Π_i (1 - t^(2 a_i))
/// ```
///
/// Every factor `1 - t^k` is rewritten as `(1 - t)(1 + t + ... + t^(k-1))`,
/// the powers of `1 - t` cancel by counting, and what remains is a product
/// of geometric sums divided by a product of geometric sums. Each division
/// step is checked for a zero remainder.
pub fn cyclotomic_quotient(
    b_list: &[u32],
    a_list: &[u32],
    extra_unit_factors: u32,
) -> Result<RatPoly, Error> {
    let unit_power = b_list.len() as i64 - a_list.len() as i64 - i64::from(extra_unit_factors);
    if unit_power < 0 {
        // No geometric sum vanishes at t = 1, so (1 - t) cannot divide the numerator.
        return Err(Error::NonPolynomialQuotient(format!(
            "denominator keeps {} unmatched factor(s) of (1 - t)",
            -unit_power
        )));
    }
    let mut acc: RatPoly = b_list
        .iter()
        .map(|&b| geometric_sum(2 * b as usize))
        .product();
    acc = acc * RatPoly::from_ints(&[1, -1]).pow(unit_power as u32);
    for &a in a_list {
        let divisor = geometric_sum(2 * a as usize);
        acc = acc.exact_div(&divisor).ok_or_else(|| {
            Error::NonPolynomialQuotient(format!(
                "1 - t^{} does not divide the remaining numerator",
                2 * a
            ))
        })?;
    }
    Ok(acc)
}
