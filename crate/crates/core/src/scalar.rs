//! Scalar fields: exact rationals for algebraic identities, `f64` for flows.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Absolute tolerance used by approximate (floating point) equality tests.
pub const APPROX_TOL: f64 = 1e-9;

/// Singular values below `RANK_RTOL * sigma_max` count as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Arithmetic mode of a scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// A field of scalars the algebraic routines are generic over.
///
/// Exact scalars compare with zero tolerance; approximate ones treat values
/// within [`APPROX_TOL`] of zero as zero and use a relative singular value
/// threshold for ranks.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_negligible(&self) -> bool;

    /// Rank of a matrix in this field.
    fn rank(m: &Matrix<Self>) -> usize;
    /// Basis of the right null space.
    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>>;
    /// Some solution of `m x = b`, if one exists.
    fn solve(m: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>>;
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn rank(m: &Matrix<Self>) -> usize {
        m.rref().pivots.len()
    }

    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        m.rref().nullspace()
    }

    fn solve(m: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        let aug = m.hstack(&Matrix::from_col(b.to_vec()));
        let r = aug.rref();
        if r.pivots.last() == Some(&m.cols()) {
            return None;
        }
        let mut x = vec![Rational::zero(); m.cols()];
        for (row, &col) in r.pivots.iter().enumerate() {
            x[col] = r.matrix[(row, m.cols())].clone();
        }
        Some(x)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Approx;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= APPROX_TOL
    }

    fn rank(m: &Matrix<Self>) -> usize {
        if m.rows() == 0 || m.cols() == 0 {
            return 0;
        }
        let sv = m.to_dmatrix().singular_values();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > RANK_RTOL * smax).count()
    }

    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        let n = m.cols();
        if n == 0 {
            return Vec::new();
        }
        // Pad to at least n rows so the SVD returns a full right basis.
        let rows = m.rows().max(n);
        let mut padded = nalgebra::DMatrix::<f64>::zeros(rows, n);
        for r in 0..m.rows() {
            for c in 0..n {
                padded[(r, c)] = m[(r, c)];
            }
        }
        let svd = padded.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cut = if smax == 0.0 { f64::INFINITY } else { RANK_RTOL * smax };
        svd.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| smax == 0.0 || s <= cut)
            .map(|(i, _)| vt.row(i).iter().cloned().collect())
            .collect()
    }

    fn solve(m: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        let a = m.to_dmatrix();
        let rhs = nalgebra::DVector::from_column_slice(b);
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let x = svd.solve(&rhs, RANK_RTOL * smax.max(f64::MIN_POSITIVE)).ok()?;
        let resid = (&a * &x - &rhs).amax();
        (resid <= APPROX_TOL * (1.0 + rhs.amax())).then(|| x.iter().cloned().collect())
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{t}: zero denominator")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(i));
    }
    let f: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: {t}")))?;
    rational_from_f64(f)
}

/// Converts a finite float to the rational it denotes exactly.
pub fn rational_from_f64(f: f64) -> Result<Rational> {
    Rational::from_float(f).ok_or_else(|| Error::Parse(format!("non-finite value {f}")))
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from_ratio(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), Rational::from_i64(-4));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::from_ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn formats_round_trip() {
        let r = Rational::from_ratio(-7, 3);
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        assert_eq!(format_rational(&Rational::from_i64(5)), "5");
    }

    #[test]
    fn approx_rank_uses_relative_threshold() {
        let m = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1e-12]]);
        assert_eq!(f64::rank(&m), 1);
        let m = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1e-8]]);
        assert_eq!(f64::rank(&m), 2);
    }
}
