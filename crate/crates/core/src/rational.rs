//! Exact rational helpers shared by the grading and rank computations.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as a rational (expected \"p/q\" or an integer)")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Q::new(num, den))
}

/// Renders as `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Floor of an exact rational as a machine integer.
pub fn floor_i64(q: &Q) -> i64 {
    let (f, _) = q.numer().div_mod_floor(q.denom());
    f.to_i64().expect("floor out of i64 range")
}

pub fn is_integer(q: &Q) -> bool {
    q.is_integer()
}

pub fn is_positive(q: &Q) -> bool {
    q.is_positive()
}

/// Exact rank of a dense rational matrix (rows of equal length).
///
/// Each row is scaled to integers and the rank is found by fraction-free
/// (Bareiss) elimination over the integers.
pub fn rank_rational(rows: &[Vec<Q>]) -> usize {
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .collect();
    rank_integer(int_rows)
}

/// Exact rank of a dense integer matrix by Bareiss elimination.
pub fn rank_integer(mut a: Vec<Vec<BigInt>>) -> usize {
    let nrows = a.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = a[0].len();
    let mut rank = 0usize;
    let mut prev_pivot = BigInt::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot_row) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot_row);
        let pivot = a[rank][col].clone();
        for r in (rank + 1)..nrows {
            let factor = a[r][col].clone();
            for c in (col + 1)..ncols {
                let v = (&pivot * &a[r][c] - &factor * &a[rank][c]) / &prev_pivot;
                a[r][c] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev_pivot = pivot;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("2/7").unwrap(), q_frac(2, 7));
        assert_eq!(parse_rational(" -3 ").unwrap(), q_int(-3));
        assert_eq!(parse_rational("4/6").unwrap(), q_frac(2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["2/7", "-1/5", "3", "0"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
    }

    #[test]
    fn floors_negative_values_downward() {
        assert_eq!(floor_i64(&q_frac(10, 7)), 1);
        assert_eq!(floor_i64(&q_frac(-1, 2)), -1);
        assert_eq!(floor_i64(&q_int(7)), 7);
    }

    #[test]
    fn ranks() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<Q>> {
            rows.iter()
                .map(|r| r.iter().map(|&v| q_int(v)).collect())
                .collect()
        };
        assert_eq!(rank_rational(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_rational(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_rational(&m(&[&[0, 1, 2], &[1, 0, 3], &[1, 1, 5]])), 2);
        assert_eq!(rank_rational(&m(&[&[2, 0], &[0, 3], &[1, 1]])), 2);
        let half = vec![vec![q_frac(1, 2), q_frac(1, 3)], vec![q_int(3), q_int(2)]];
        assert_eq!(rank_rational(&half), 1);
        assert_eq!(rank_rational(&[]), 0);
    }
}
