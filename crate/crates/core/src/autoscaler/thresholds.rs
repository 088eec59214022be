use serde::{Deserialize, Serialize};

use crate::Scalar;

use super::AutoscaleError;

/// Median with the even-length convention of averaging the two central
/// order statistics.
pub fn median<T: Scalar>(values: &[T]) -> Result<T, AutoscaleError> {
    if values.is_empty() {
        return Err(AutoscaleError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mid = sorted.len() / 2;
    Ok(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / T::lit(2.0)
    })
}

/// `median(|x_i - median(x)|)`.
pub fn median_absolute_deviation<T: Scalar>(values: &[T]) -> Result<T, AutoscaleError> {
    let m = median(values)?;
    let deviations: Vec<T> = values.iter().map(|&v| (v - m).abs()).collect();
    median(&deviations)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Consecutive in-band observations tolerated before a delayed action.
    pub scaling_delay: u32,
    /// Intervals between threshold refreshes.
    pub recompute_period: usize,
    /// Number of trailing observations the MAD is computed over.
    pub mad_window: usize,
    /// Lowest value any threshold may take after clamping.
    pub floor: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            c1: 0.5,
            c2: 1.0,
            c3: 4.0,
            scaling_delay: 2,
            recompute_period: 6,
            mad_window: 288,
            floor: 0.05,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<(), AutoscaleError> {
        let ok = self.c1 > 0.0
            && self.c1 < self.c2
            && self.c2 < self.c3
            && self.c3.is_finite()
            && self.recompute_period > 0
            && self.mad_window > 0
            && self.floor < 1.0;
        if ok {
            Ok(())
        } else {
            Err(AutoscaleError::InvalidConfig(
                "thresholds need 0 < c1 < c2 < c3, positive periods and floor < 1".into(),
            ))
        }
    }
}

/// Upper, below-upper and lower thresholds, as utilization fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    pub thr_u: T,
    pub thr_bu: T,
    pub thr_l: T,
}

impl Default for Thresholds<f64> {
    fn default() -> Self {
        Self {
            thr_u: 0.9,
            thr_bu: 0.8,
            thr_l: 0.3,
        }
    }
}

impl<T: Scalar> Thresholds<T> {
    /// `1 - c * MAD` for each constant, before any clamping.
    pub fn from_mad(mad: T, cfg: &ThresholdConfig) -> Self {
        let one = T::one();
        Self {
            thr_u: one - T::lit(cfg.c1) * mad,
            thr_bu: one - T::lit(cfg.c2) * mad,
            thr_l: one - T::lit(cfg.c3) * mad,
        }
    }

    pub fn clamped(self, floor: T) -> Self {
        let clamp = |v: T| v.max(floor).min(T::one());
        Self {
            thr_u: clamp(self.thr_u),
            thr_bu: clamp(self.thr_bu),
            thr_l: clamp(self.thr_l),
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.thr_l <= self.thr_bu && self.thr_bu <= self.thr_u && self.thr_u <= T::one()
    }
}

/// Thresholds from the MAD of a utilization history, clamped into
/// `[cfg.floor, 1]`.
pub fn compute_thresholds<T: Scalar>(history: &[T], cfg: &ThresholdConfig) -> Result<Thresholds<T>, AutoscaleError> {
    let mad = median_absolute_deviation(history)?;
    Ok(Thresholds::from_mad(mad, cfg).clamped(T::lit(cfg.floor)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(c1: f64, c2: f64, c3: f64) -> ThresholdConfig {
        ThresholdConfig {
            c1,
            c2,
            c3,
            ..ThresholdConfig::default()
        }
    }

    #[test]
    fn mad_examples() {
        assert_eq!(median_absolute_deviation(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert_eq!(median_absolute_deviation(&[1.0, 2.0, 4.0, 6.0, 9.0]).unwrap(), 2.0);
        assert_eq!(median_absolute_deviation(&[1.0, 2.0]).unwrap(), 0.5);
        assert!(matches!(
            median_absolute_deviation::<f64>(&[]),
            Err(AutoscaleError::EmptyInput)
        ));
    }

    #[test]
    fn mad_is_order_free() {
        assert_eq!(
            median_absolute_deviation(&[9.0, 1.0, 6.0, 2.0, 4.0]).unwrap(),
            median_absolute_deviation(&[1.0, 2.0, 4.0, 6.0, 9.0]).unwrap()
        );
    }

    #[test]
    fn constant_history_collapses_to_one() {
        let t = compute_thresholds(&[0.4, 0.4, 0.4, 0.4], &cfg(1.0, 2.0, 4.0)).unwrap();
        assert_eq!(t, Thresholds { thr_u: 1.0, thr_bu: 1.0, thr_l: 1.0 });
    }

    #[test]
    fn substitution() {
        let t = Thresholds::from_mad(0.1_f64, &cfg(1.0, 2.0, 4.0));
        assert!((t.thr_u - 0.9).abs() < 1e-12);
        assert!((t.thr_bu - 0.8).abs() < 1e-12);
        assert!((t.thr_l - 0.6).abs() < 1e-12);
    }

    #[test]
    fn clamps_at_floor() {
        let t = Thresholds::from_mad(0.4_f64, &cfg(1.0, 2.0, 4.0)).clamped(0.05);
        assert!((t.thr_u - 0.6).abs() < 1e-12);
        assert!((t.thr_bu - 0.2).abs() < 1e-12);
        assert_eq!(t.thr_l, 0.05);
        assert!(t.is_ordered());
    }

    #[test]
    fn history_with_known_mad() {
        // median 0.5, deviations [0.1, 0.1, 0, 0.1, 0.1] -> MAD 0.1
        let hist = [0.4_f64, 0.6, 0.5, 0.4, 0.6];
        let t = compute_thresholds(&hist, &cfg(1.0, 2.0, 4.0)).unwrap();
        assert!((t.thr_u - 0.9).abs() < 1e-12);
        assert!((t.thr_l - 0.6).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(ThresholdConfig::default().validate().is_ok());
        assert!(cfg(2.0, 1.0, 4.0).validate().is_err());
        assert!(cfg(1.0, 1.0, 4.0).validate().is_err());
    }

    #[test]
    fn f32_thresholds() {
        let t = compute_thresholds(&[0.2_f32, 0.4, 0.6], &cfg(1.0, 2.0, 4.0)).unwrap();
        assert!(t.is_ordered());
    }
}
