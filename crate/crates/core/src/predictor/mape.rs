use std::collections::VecDeque;

use crate::Scalar;

use super::PredictorError;

/// Mean absolute percentage error, in percent. Pairs whose actual value is
/// zero are ignored.
pub fn mape<T: Scalar>(pairs: impl IntoIterator<Item = (T, T)>) -> Result<T, PredictorError> {
    let mut sum = T::zero();
    let mut n = 0usize;
    for (actual, predicted) in pairs {
        if actual != T::zero() {
            sum += ((actual - predicted) / actual).abs();
            n += 1;
        }
    }
    if n == 0 {
        return Err(PredictorError::NoValidPairs);
    }
    Ok(T::lit(100.0) * sum / T::lit(n as f64))
}

/// Sliding window of `(actual, predicted)` pairs used for online accuracy
/// tracking.
#[derive(Debug, Clone, PartialEq)]
pub struct MapeAccumulator<T> {
    pairs: VecDeque<(T, T)>,
    capacity: usize,
    skipped: usize,
}

impl<T: Scalar> MapeAccumulator<T> {
    pub fn new(capacity: usize) -> Self {
        Self {
            pairs: VecDeque::with_capacity(capacity.max(1)),
            capacity: capacity.max(1),
            skipped: 0,
        }
    }

    pub fn push(&mut self, actual: T, predicted: T) {
        if actual == T::zero() {
            self.skipped += 1;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back((actual, predicted));
    }

    /// MAPE over the retained pairs, or `None` while none of them is usable.
    pub fn value(&self) -> Option<T> {
        mape(self.pairs.iter().copied()).ok()
    }

    /// `value()` with an unknown accuracy treated as infinitely bad.
    pub fn value_or_inf(&self) -> T {
        self.value().unwrap_or_else(T::infinity)
    }

    /// Pairs pushed with a zero actual, over the accumulator's lifetime.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(T, T)> {
        self.pairs.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_zero() {
        assert_eq!(mape([(3.0, 3.0), (7.5, 7.5)]).unwrap(), 0.0);
    }

    #[test]
    fn single_pair() {
        assert!((mape([(100.0, 110.0)]).unwrap() - 10.0_f64).abs() < 1e-12);
    }

    #[test]
    fn two_pairs() {
        assert!((mape([(100.0, 110.0), (200.0, 150.0)]).unwrap() - 17.5_f64).abs() < 1e-12);
    }

    #[test]
    fn no_valid_pairs() {
        assert!(matches!(mape([(0.0_f64, 1.0)]), Err(PredictorError::NoValidPairs)));
        assert!(matches!(mape(Vec::<(f64, f64)>::new()), Err(PredictorError::NoValidPairs)));
    }

    #[test]
    fn ring_keeps_last_pairs() {
        let mut acc = MapeAccumulator::new(2);
        acc.push(100.0, 50.0);
        acc.push(100.0, 110.0);
        acc.push(200.0, 150.0);
        assert_eq!(acc.len(), 2);
        assert!((acc.value().unwrap() - 17.5_f64).abs() < 1e-12);
    }

    #[test]
    fn zero_actual_is_skipped() {
        let mut acc = MapeAccumulator::new(4);
        acc.push(0.0, 3.0);
        assert_eq!(acc.value(), None);
        assert_eq!(acc.skipped(), 1);
        acc.push(100.0, 90.0);
        assert!((acc.value().unwrap() - 10.0_f64).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let mut acc = MapeAccumulator::<f32>::new(3);
        acc.push(100.0, 90.0);
        assert!((acc.value().unwrap() - 10.0).abs() < 1e-4);
    }
}
