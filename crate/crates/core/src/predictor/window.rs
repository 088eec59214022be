use super::PredictorError;

/// Input length (`W_length`) and how many intervals ahead the target lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlidingWindow {
    length: usize,
    horizon: usize,
}

impl SlidingWindow {
    pub fn new(length: usize, horizon: usize) -> Result<Self, PredictorError> {
        if length == 0 || horizon == 0 {
            return Err(PredictorError::InvalidConfig(
                "window length and horizon must both be at least 1".into(),
            ));
        }
        Ok(Self { length, horizon })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of samples a series of `len` values yields.
    pub fn sample_count(&self, len: usize) -> usize {
        (len + 1).saturating_sub(self.length + self.horizon)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub input: Vec<T>,
    pub target: T,
}

/// Sample `i` takes `series[i..i+length]` as input and
/// `series[i+length-1+horizon]` as its target.
pub fn make_windows<T: Copy>(series: &[T], win: SlidingWindow) -> Result<Vec<Sample<T>>, PredictorError> {
    let count = win.sample_count(series.len());
    if count == 0 {
        return Err(PredictorError::SeriesTooShort {
            needed: win.length + win.horizon,
            got: series.len(),
        });
    }
    Ok((0..count)
        .map(|i| Sample {
            input: series[i..i + win.length].to_vec(),
            target: series[i + win.length - 1 + win.horizon],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizon_one() {
        let s = make_windows(&[1.0, 2.0, 3.0, 4.0], SlidingWindow::new(2, 1).unwrap()).unwrap();
        assert_eq!(
            s,
            vec![
                Sample { input: vec![1.0, 2.0], target: 3.0 },
                Sample { input: vec![2.0, 3.0], target: 4.0 },
            ]
        );
    }

    #[test]
    fn horizon_two() {
        let s = make_windows(&[1.0, 2.0, 3.0, 4.0], SlidingWindow::new(2, 2).unwrap()).unwrap();
        assert_eq!(s, vec![Sample { input: vec![1.0, 2.0], target: 4.0 }]);
    }

    #[test]
    fn count_matches_enumeration() {
        let series: Vec<f64> = (0..100).map(f64::from).collect();
        let win = SlidingWindow::new(24, 2).unwrap();
        let samples = make_windows(&series, win).unwrap();
        let mut enumerated = 0;
        for start in 0..series.len() {
            if start + 24 - 1 + 2 < series.len() {
                enumerated += 1;
            }
        }
        assert_eq!(samples.len(), 75);
        assert_eq!(samples.len(), enumerated);
        assert_eq!(samples[74].target, 99.0);
    }

    #[test]
    fn too_short() {
        let err = make_windows(&[1.0, 2.0], SlidingWindow::new(2, 1).unwrap()).unwrap_err();
        assert!(matches!(err, PredictorError::SeriesTooShort { needed: 3, got: 2 }));
    }

    #[test]
    fn rejects_zero_sizes() {
        assert!(SlidingWindow::new(0, 1).is_err());
        assert!(SlidingWindow::new(3, 0).is_err());
    }
}
