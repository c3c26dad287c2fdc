//! Analytic approximation of the natural-language ngram rank-frequency curve.
//!
//! The frequency of the `r`-th most common character ngram of length `n` is
//!
//! ```text
//! b(r) = 6.809 * (r + 2.768)^-1.487 + 0.527
//! s(n) = 0.107 * (n + 12.0147)^-12.654 + 0.0139
//! f(n, r) = s(n) * r^-b(r)
//! ```
//!
//! Values are raw (not normalised over the ranks) unless a renormalising
//! reference is requested explicitly.

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::powf;

/// Coefficients of the rank exponent `b(r)` and the length scale `s(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfParams {
    pub b_scale: f64,
    pub b_shift: f64,
    pub b_exp: f64,
    pub b_floor: f64,
    pub s_scale: f64,
    pub s_shift: f64,
    pub s_exp: f64,
    pub s_floor: f64,
}

impl Default for ZipfParams {
    fn default() -> Self {
        Self {
            b_scale: 6.809,
            b_shift: 2.768,
            b_exp: -1.487,
            b_floor: 0.527,
            s_scale: 0.107,
            s_shift: 12.0147,
            s_exp: -12.654,
            s_floor: 0.0139,
        }
    }
}

impl ZipfParams {
    pub const LEN: usize = 8;

    pub fn to_array(self) -> [f64; Self::LEN] {
        [
            self.b_scale,
            self.b_shift,
            self.b_exp,
            self.b_floor,
            self.s_scale,
            self.s_shift,
            self.s_exp,
            self.s_floor,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match *v {
            [b_scale, b_shift, b_exp, b_floor, s_scale, s_shift, s_exp, s_floor] => Ok(Self {
                b_scale,
                b_shift,
                b_exp,
                b_floor,
                s_scale,
                s_shift,
                s_exp,
                s_floor,
            }),
            _ => Err(Error::InvalidArgument("zipf parameter vector must have 8 entries")),
        }
    }

    /// Sufficient conditions for `b(r) > 0` and `s(n) > 0` on `r, n >= 1`.
    pub fn validate(&self) -> Result<()> {
        let arr = self.to_array();
        if arr.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("zipf parameters must be finite".into()));
        }
        let ok = self.b_shift > -1.0
            && self.s_shift > -1.0
            && self.b_scale >= 0.0
            && self.s_scale >= 0.0
            && self.b_floor > 0.0
            && self.s_floor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("zipf parameters allow non-positive b(r) or s(n)".into()))
        }
    }

    /// Rank exponent `b(r)`.
    pub fn exponent(&self, rank: f64) -> f64 {
        self.b_scale * powf(rank + self.b_shift, self.b_exp) + self.b_floor
    }

    /// Length scale `s(n)`.
    pub fn scale(&self, n: f64) -> f64 {
        self.s_scale * powf(n + self.s_shift, self.s_exp) + self.s_floor
    }

    /// Expected relative frequency of the `rank`-th most common ngram of length `n`.
    pub fn frequency(&self, n: f64, rank: f64) -> f64 {
        self.scale(n) * powf(rank, -self.exponent(rank))
    }

    /// `f(n, r)` for `r = 1..=ranks`.
    pub fn curve(&self, n: usize, ranks: usize) -> Vec<f64> {
        let scale = self.scale(n as f64);
        (1..=ranks)
            .map(|r| {
                let r = r as f64;
                scale * powf(r, -self.exponent(r))
            })
            .collect()
    }
}

/// Reference frequencies for ranks `1..=ranks` at ngram length `n`, using the
/// published constants.
pub fn zipf_reference(n: usize, ranks: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("ngram length must be at least 1"));
    }
    if ranks == 0 {
        return Err(Error::InvalidArgument("rank count must be at least 1"));
    }
    Ok(ZipfParams::default().curve(n, ranks))
}

/// Same as [`zipf_reference`] but rescaled to sum to one over the requested ranks.
pub fn zipf_reference_renormalized(n: usize, ranks: usize) -> Result<Vec<f64>> {
    let mut curve = zipf_reference(n, ranks)?;
    let total: f64 = curve.iter().sum();
    for v in &mut curve {
        *v /= total;
    }
    Ok(curve)
}

/// Read-only table of precomputed reference curves.
///
/// Lookups beyond the precomputed range fall back to direct evaluation, so a
/// table only ever changes speed, never results.
#[derive(Debug, Clone, Default)]
pub struct ZipfTable {
    curves: BTreeMap<usize, Vec<f64>>,
}

impl ZipfTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Precomputes `ranks` values for each length in `lengths`.
    pub fn precompute(lengths: impl IntoIterator<Item = usize>, ranks: usize) -> Self {
        let params = ZipfParams::default();
        let curves = lengths
            .into_iter()
            .filter(|&n| n > 0)
            .map(|n| (n, params.curve(n, ranks)))
            .collect();
        Self { curves }
    }

    /// Raw reference of exactly `ranks` entries, or the renormalised one.
    pub fn reference(&self, n: usize, ranks: usize, renormalize: bool) -> Cow<'_, [f64]> {
        if renormalize {
            let mut curve = self.reference(n, ranks, false).into_owned();
            let total: f64 = curve.iter().sum();
            curve.iter_mut().for_each(|v| *v /= total);
            return Cow::Owned(curve);
        }
        match self.curves.get(&n) {
            Some(curve) if curve.len() >= ranks => Cow::Borrowed(&curve[..ranks]),
            _ => Cow::Owned(ZipfParams::default().curve(n, ranks)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rank_of_unigrams() {
        let p = ZipfParams::default();
        assert!((p.exponent(1.0) - 1.474_123_112_189_999_4).abs() < 1e-12);
        let f = zipf_reference(1, 3).unwrap();
        assert!((f[0] - 0.013_900_000_000_000_846).abs() < 1e-15);
        assert!(f[0] > f[1] && f[1] > f[2]);
    }

    #[test]
    fn scale_reaches_floor_for_long_ngrams() {
        assert!((ZipfParams::default().scale(10.0) - 0.0139).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(zipf_reference(0, 5).is_err());
        assert!(zipf_reference(3, 0).is_err());
    }

    #[test]
    fn exponent_decays_toward_floor() {
        let p = ZipfParams::default();
        assert!(p.exponent(1.0) > p.exponent(100.0));
        assert!(p.exponent(100.0) > 0.527);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let table = ZipfTable::precompute([4, 5], 100);
        let direct = zipf_reference(5, 50).unwrap();
        assert_eq!(&*table.reference(5, 50, false), direct.as_slice());
        // beyond the table and for an unknown n
        assert_eq!(&*table.reference(5, 200, false), zipf_reference(5, 200).unwrap().as_slice());
        assert_eq!(&*table.reference(7, 10, false), zipf_reference(7, 10).unwrap().as_slice());
        let renorm = table.reference(4, 30, true);
        assert!((renorm.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(&*renorm, zipf_reference_renormalized(4, 30).unwrap().as_slice());
    }

    #[test]
    fn validation() {
        assert!(ZipfParams::default().validate().is_ok());
        let bad = ZipfParams { b_floor: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ZipfParams { s_shift: f64::NAN, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
