//! Text form of polynomials in `t`: `1 + 2t^2 + t^4`, `t^2+t^3`, `(1/2)t - 3`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RatPoly;
use crate::Error;

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Cursor { chars, pos: 0, src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(i, _)| i)
            .unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos]
            .iter()
            .map(|&(_, c)| c)
            .collect();
        BigInt::from_str(&s).ok()
    }

    fn rational(&mut self) -> Result<Option<BigRational>, Error> {
        let Some(n) = self.digits() else {
            return Ok(None);
        };
        if self.peek() == Some('/') {
            self.bump();
            let d = self
                .digits()
                .ok_or_else(|| self.err("expected denominator"))?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            return Ok(Some(BigRational::new(n, d)));
        }
        Ok(Some(BigRational::from_integer(n)))
    }
}

impl FromStr for RatPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut cur = Cursor::new(s);
        if cur.peek().is_none() {
            return Err(cur.err("empty polynomial"));
        }
        let mut coeffs: Vec<BigRational> = Vec::new();
        let mut first = true;
        while cur.peek().is_some() {
            let mut sign = BigRational::one();
            match cur.peek() {
                Some('+') => {
                    cur.bump();
                }
                Some('-') => {
                    cur.bump();
                    sign = -sign;
                }
                _ if !first => return Err(cur.err("expected '+' or '-'")),
                _ => {}
            }
            first = false;

            let mut has_coeff = true;
            let mut coeff = if cur.peek() == Some('(') {
                cur.bump();
                let neg = cur.peek() == Some('-');
                if neg {
                    cur.bump();
                }
                let c = cur.rational()?.ok_or_else(|| cur.err("expected number"))?;
                if cur.bump() != Some(')') {
                    return Err(cur.err("expected ')'"));
                }
                if neg {
                    -c
                } else {
                    c
                }
            } else {
                match cur.rational()? {
                    Some(c) => c,
                    None => {
                        has_coeff = false;
                        BigRational::one()
                    }
                }
            };
            if cur.peek() == Some('*') {
                cur.bump();
            }
            let degree = if matches!(cur.peek(), Some('t') | Some('T')) {
                cur.bump();
                if cur.peek() == Some('^') {
                    cur.bump();
                    let d = cur.digits().ok_or_else(|| cur.err("expected exponent"))?;
                    usize::try_from(d).map_err(|_| cur.err("exponent too large"))?
                } else {
                    1
                }
            } else {
                if !has_coeff {
                    return Err(cur.err("expected term"));
                }
                0
            };
            coeff *= sign;
            if coeffs.len() <= degree {
                coeffs.resize(degree + 1, BigRational::zero());
            }
            coeffs[degree] += coeff;
        }
        Ok(RatPoly::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_shapes() {
        let p: RatPoly = "1+2t^2+3t^4+2t^6+t^8".parse().unwrap();
        assert_eq!(p, RatPoly::from_ints(&[1, 0, 2, 0, 3, 0, 2, 0, 1]));
        let p: RatPoly = " t^2 + t^3 ".parse().unwrap();
        assert_eq!(p, RatPoly::from_ints(&[0, 0, 1, 1]));
        let p: RatPoly = "-3t + (1/2)t^2 - 1".parse().unwrap();
        assert_eq!(
            p,
            RatPoly::from_coeffs(vec![
                BigRational::from_integer((-1).into()),
                BigRational::from_integer((-3).into()),
                BigRational::new(1.into(), 2.into()),
            ])
        );
        let p: RatPoly = "2*t + t".parse().unwrap();
        assert_eq!(p, RatPoly::from_ints(&[0, 3]));
    }

    #[test]
    fn display_round_trips() {
        for text in ["1 + 2t^2 + t^4", "-t + (3/4)t^5", "7", "0"] {
            let p: RatPoly = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!("".parse::<RatPoly>().is_err());
        assert!("1 + ".parse::<RatPoly>().is_err());
        assert!("t^".parse::<RatPoly>().is_err());
        assert!("1/0 t".parse::<RatPoly>().is_err());
        assert!("2tt".parse::<RatPoly>().is_err());
    }
}
