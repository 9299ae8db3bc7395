//! Sequence operators: first-order accumulation (AGO), its inverse, and the
//! λ-weighted background (mean value) sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest usable series: the initial point plus three design rows.
pub const MIN_POINTS: usize = 4;

/// Strictly positive observations with a fit/holdout split.
///
/// The first `fit_len` values are used for estimation, the remainder is
/// holdout for forecast evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSeries {
    values: Vec<f64>,
    fit_len: usize,
}

impl RawSeries {
    /// Series that uses every point for fitting.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::with_fit_len(values, n)
    }

    pub fn with_fit_len(values: Vec<f64>, fit_len: usize) -> Result<Self> {
        if values.len() < MIN_POINTS {
            return Err(Error::InvalidSeries(format!(
                "need at least {MIN_POINTS} points, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v <= 0.0)
        {
            return Err(Error::InvalidSeries(format!(
                "value {v} at position {} is not strictly positive",
                i + 1
            )));
        }
        if fit_len < MIN_POINTS || fit_len > values.len() {
            return Err(Error::InvalidSeries(format!(
                "fit length {fit_len} must lie in {MIN_POINTS}..={}",
                values.len()
            )));
        }
        Ok(Self { values, fit_len })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The leading `fit_len` observations.
    pub fn fit_values(&self) -> &[f64] {
        &self.values[..self.fit_len]
    }

    pub fn fit_len(&self) -> usize {
        self.fit_len
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observation x⁽⁰⁾(k) for 1-based `k`.
    pub fn at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    /// Multiply every observation by `s` (`s > 0`).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::with_fit_len(self.values.iter().map(|v| v * s).collect(), self.fit_len)
    }
}

/// First-order accumulated sequence x⁽¹⁾.
#[derive(Debug, Clone, PartialEq)]
pub struct AgoSeries {
    values: Vec<f64>,
}

impl AgoSeries {
    /// Wrap an already accumulated sequence; it must be non-empty and
    /// strictly increasing.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries("empty accumulated series".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries("non-finite accumulated value".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries(
                "accumulated series must be strictly increasing".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Background values z⁽¹⁾(k), k = 2..n, for one mean value parameter λ.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSeries {
    pub lambda: f64,
    pub values: Vec<f64>,
}

/// Running sums over the fit window of `raw`.
pub fn ago(raw: &RawSeries) -> AgoSeries {
    let values = raw
        .fit_values()
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    AgoSeries { values }
}

/// First differences, keeping the first element.
pub fn iago(ago: &AgoSeries) -> Vec<f64> {
    let v = ago.values();
    std::iter::once(v[0])
        .chain(v.windows(2).map(|w| w[1] - w[0]))
        .collect()
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::ParameterDomain(format!(
            "mean value parameter λ = {lambda} outside [0, 1]"
        )));
    }
    Ok(())
}

/// z⁽¹⁾(k) = λ·x⁽¹⁾(k) + (1−λ)·x⁽¹⁾(k−1).
pub fn mean_sequence(ago: &AgoSeries, lambda: f64) -> Result<MeanSeries> {
    check_lambda(lambda)?;
    if ago.len() < 2 {
        return Err(Error::InvalidSeries(
            "mean sequence needs at least two accumulated points".into(),
        ));
    }
    let values = ago
        .values()
        .windows(2)
        .map(|w| lambda * w[1] + (1.0 - lambda) * w[0])
        .collect();
    Ok(MeanSeries { lambda, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EX1_FIT: [f64; 5] = [2.9836, 4.4511, 6.6402, 9.9061, 14.7781];

    #[test]
    fn ago_of_unit_sequence() {
        let raw = RawSeries::new(vec![1.0; 4]).unwrap();
        assert_eq!(ago(&raw).values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn ago_of_example_fit_data() {
        let raw = RawSeries::new(EX1_FIT.to_vec()).unwrap();
        let expected = [2.9836, 7.4347, 14.0749, 23.9810, 38.7591];
        for (got, want) in ago(&raw).values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn ago_only_covers_fit_window() {
        let raw = RawSeries::with_fit_len(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 4).unwrap();
        assert_eq!(ago(&raw).values(), &[1.0, 3.0, 6.0, 10.0]);
    }

    #[test]
    fn iago_cases() {
        let a = AgoSeries::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(iago(&a), vec![1.0; 4]);
        let a = AgoSeries::new(vec![2.9836, 7.4347]).unwrap();
        let d = iago(&a);
        assert_eq!(d[0], 2.9836);
        assert!((d[1] - 4.4511).abs() < 1e-12);
        assert_eq!(iago(&AgoSeries::new(vec![5.0]).unwrap()), vec![5.0]);
    }

    #[test]
    fn mean_sequence_endpoints() {
        let a = AgoSeries::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(mean_sequence(&a, 1.0).unwrap().values, vec![3.0]);
        assert_eq!(mean_sequence(&a, 0.0).unwrap().values, vec![1.0]);
        assert_eq!(mean_sequence(&a, 0.5).unwrap().values, vec![2.0]);
    }

    #[test]
    fn mean_sequence_rejects_bad_lambda() {
        let a = AgoSeries::new(vec![1.0, 3.0]).unwrap();
        assert!(matches!(
            mean_sequence(&a, 1.5),
            Err(Error::ParameterDomain(_))
        ));
        assert!(mean_sequence(&a, -0.1).is_err());
        assert!(mean_sequence(&AgoSeries::new(vec![1.0]).unwrap(), 0.5).is_err());
    }

    #[test]
    fn raw_series_validation() {
        assert!(RawSeries::new(vec![1.0, 2.0, 3.0]).is_err());
        assert!(RawSeries::new(vec![1.0, 0.0, 3.0, 4.0]).is_err());
        assert!(RawSeries::new(vec![1.0, -2.0, 3.0, 4.0]).is_err());
        assert!(RawSeries::new(vec![1.0, f64::NAN, 3.0, 4.0]).is_err());
        assert!(RawSeries::with_fit_len(vec![1.0; 6], 3).is_err());
        assert!(RawSeries::with_fit_len(vec![1.0; 6], 7).is_err());
        assert!(RawSeries::with_fit_len(vec![1.0; 6], 4).is_ok());
    }

    fn positive_series() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-3f64..1e4, MIN_POINTS..20)
    }

    proptest! {
        #[test]
        fn iago_inverts_ago(values in positive_series()) {
            let raw = RawSeries::new(values.clone()).unwrap();
            let acc = ago(&raw);
            let back = iago(&acc);
            // differencing cancels against the running sum, so the error
            // scales with x⁽¹⁾(k), not with x⁽⁰⁾(k)
            for ((x, y), s) in values.iter().zip(&back).zip(acc.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * s, "{} vs {}", x, y);
            }
        }

        #[test]
        fn ago_strictly_increasing(values in positive_series()) {
            let a = ago(&RawSeries::new(values).unwrap());
            prop_assert!(a.values().windows(2).all(|w| w[1] > w[0]));
        }

        #[test]
        fn mean_sequence_between_neighbours(values in positive_series(), lambda in 0.0f64..=1.0) {
            let a = ago(&RawSeries::new(values).unwrap());
            let z = mean_sequence(&a, lambda).unwrap();
            prop_assert_eq!(z.values.len(), a.len() - 1);
            for (k, zk) in z.values.iter().enumerate() {
                let (lo, hi) = (a.values()[k], a.values()[k + 1]);
                prop_assert!(*zk >= lo && *zk <= hi);
            }
        }

        #[test]
        fn half_lambda_is_neighbour_mean(values in positive_series()) {
            let a = ago(&RawSeries::new(values).unwrap());
            let z = mean_sequence(&a, 0.5).unwrap();
            for (k, zk) in z.values.iter().enumerate() {
                let classic = 0.5 * (a.values()[k + 1] + a.values()[k]);
                prop_assert!((zk - classic).abs() <= 1e-15 * classic);
            }
        }
    }
}
