//! Scalar helpers: complex literals, exact rationals, and small dense algebra.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (no spaces).
pub fn parse_complex(s: &str) -> Result<C64> {
    let err = || Error::ComplexLiteral(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| err())?,
        };
        let re = if re_part.is_empty() {
            0.0
        } else {
            re_part.parse::<f64>().map_err(|_| err())?
        };
        Ok(C64::new(re, im))
    } else {
        s.parse::<f64>().map(c).map_err(|_| err())
    }
}

/// Comma-separated list of complex literals.
pub fn parse_point(s: &str) -> Result<Vec<C64>> {
    s.split(',').map(parse_complex).collect()
}

pub fn format_complex(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-16 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{im}i")
    } else if im < 0.0 {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Parses `p/q`, an integer, or a decimal such as `0.125` / `1e-3` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|ch| ch.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `p/q` or `p` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a C64>) -> f64 {
    values.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Complex bilinear (not Hermitian) pairing `xᵀ M y`.
pub fn bilinear(m: &CMatrix, x: &[C64], y: &[C64]) -> C64 {
    let n = x.len();
    let mut acc = C64::zero();
    for a in 0..n {
        if x[a] == C64::zero() {
            continue;
        }
        for b in 0..n {
            acc += x[a] * m[(a, b)] * y[b];
        }
    }
    acc
}

pub fn mat_vec(m: &CMatrix, x: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|k| m[(r, k)] * x[k]).sum())
        .collect()
}

/// `xᵀ M` as a vector (lowering an index with a symmetric form).
pub fn vec_mat(x: &[C64], m: &CMatrix) -> Vec<C64> {
    (0..m.ncols())
        .map(|col| (0..m.nrows()).map(|k| x[k] * m[(k, col)]).sum())
        .collect()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn unit_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::zero(); n];
    v[k] = C64::one();
    v
}

pub fn check_finite(values: &[C64], what: &str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Overflow(what.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5));
        assert_eq!(parse_complex("-2i").unwrap(), C64::new(0.0, -2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("1-2.5i").unwrap(), C64::new(1.0, -2.5));
        assert_eq!(parse_complex("i").unwrap(), I);
        assert_eq!(parse_complex("-i").unwrap(), -I);
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), C64::new(1e-3, 0.2));
        assert_eq!(parse_complex("-1e-3-2e+1i").unwrap(), C64::new(-1e-3, -20.0));
        assert!(parse_complex("1 + 2i").is_err());
        assert!(parse_complex("abc").is_err());
        assert_eq!(parse_point("0,0.1,0.1").unwrap().len(), 3);
    }

    #[test]
    fn rationals_parse_exactly() {
        let q = parse_rational("0.1").unwrap();
        assert_eq!(q, BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("2.5e2").unwrap(), BigRational::from_integer(250.into()));
        assert_eq!(parse_rational("1e-3").unwrap(), BigRational::new(1.into(), 1000.into()));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
    }
}
