//! Exact rational scalars: a thin layer over `num_rational::BigRational`
//! with `"p/q"` text round-trips used throughout the JSON interfaces.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// The scalar type used by every exact module.
pub type Q = BigRational;

/// Integer constant as a rational.
pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// `num/den` as a rational (`den != 0`).
pub fn qr(num: i64, den: i64) -> Q {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Render as `"p/q"`, or just `"p"` for integers.
pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `"p/q"` or `"p"`.
pub fn q_from_string(s: &str) -> Result<Q> {
    let t = s.trim();
    let parse_int = |txt: &str| -> Result<BigInt> {
        txt.parse::<BigInt>()
            .map_err(|_| Error::invalid_input(format!("bad rational literal {s:?}")))
    };
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(t)?)),
        Some((num, den)) => {
            let d = parse_int(den.trim())?;
            if d.is_zero() {
                return Err(Error::invalid_input(format!(
                    "zero denominator in rational literal {s:?}"
                )));
            }
            Ok(BigRational::new(parse_int(num.trim())?, d))
        }
    }
}

/// Nearest double-precision value; for display purposes only.
pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Sum of absolute values of the entries of a family of vectors.
pub fn l1_norm<'a, I: IntoIterator<Item = &'a Q>>(entries: I) -> Q {
    let mut acc = Q::zero();
    for e in entries {
        acc += e.abs();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let x = qr(-4, 6);
        assert_eq!(q_to_string(&x), "-2/3");
        assert_eq!(q_from_string("-2/3").unwrap(), x);
        assert_eq!(q_from_string("5").unwrap(), qi(5));
        assert_eq!(q_from_string(" 7 / 2 ").unwrap(), qr(7, 2));
        assert!(q_from_string("1/0").is_err());
        assert!(q_from_string("a/b").is_err());
    }

    #[test]
    fn l1_of_vectors() {
        let v = vec![qr(-4, 3), qr(-1, 3), qr(5, 3)];
        assert_eq!(l1_norm(v.iter()), qr(10, 3));
    }
}
