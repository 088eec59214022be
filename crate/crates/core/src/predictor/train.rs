use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Scalar;

use super::{make_windows, mape, Lstm, Normalizer, PredictorError, Sample, SlidingWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub hidden_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Steps of back-propagation through time; 0 unrolls the whole window.
    pub bptt_truncation: usize,
    /// Global gradient-norm clip.
    pub clip_norm: f64,
    pub seed: u64,
    /// Leading fraction of the windows used for fitting; the rest is held out.
    pub train_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_size: 32,
            epochs: 60,
            learning_rate: 0.1,
            batch_size: 8,
            bptt_truncation: 0,
            clip_norm: 5.0,
            seed: 7,
            train_fraction: 0.8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PredictorError> {
        let bad = |m: &str| Err(PredictorError::InvalidConfig(m.into()));
        if self.hidden_size == 0 {
            return bad("hidden_size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return bad("train_fraction must lie in (0, 1]");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(self.clip_norm > 0.0) {
            return bad("clip_norm must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport<T> {
    /// Mean squared error on normalized targets, one entry per epoch.
    pub epoch_mse: Vec<T>,
    pub train_samples: usize,
    pub holdout_samples: usize,
    /// MAPE (percent) of the trained model on the held-out windows.
    pub holdout_mape: Option<T>,
}

impl<T: Scalar> TrainReport<T> {
    pub fn final_mse(&self) -> Option<T> {
        self.epoch_mse.last().copied()
    }

    /// Training log as `epoch,mse`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epoch,mse")?;
        for (e, mse) in self.epoch_mse.iter().enumerate() {
            writeln!(out, "{},{}", e + 1, mse)?;
        }
        out.flush()
    }
}

#[derive(Debug, Clone)]
pub struct Trained<T> {
    pub model: Lstm<T>,
    pub report: TrainReport<T>,
}

/// Fits a model by mini-batch gradient descent with truncated BPTT.
///
/// Deterministic for a given `cfg.seed`. Normalization is fitted on the
/// values touched by the training windows only.
pub fn lstm_train<T: Scalar>(series: &[T], win: SlidingWindow, cfg: &TrainConfig) -> Result<Trained<T>, PredictorError> {
    cfg.validate()?;
    let samples = make_windows(series, win)?;
    let n_train = ((samples.len() as f64 * cfg.train_fraction).floor() as usize).clamp(1, samples.len());
    let (train, holdout) = samples.split_at(n_train);

    let covered = n_train + win.length() + win.horizon() - 1;
    let normalizer = Normalizer::fit(&series[..covered])?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = Lstm::random(cfg.hidden_size, win, normalizer, &mut rng)?;

    let normalized: Vec<Sample<T>> = train
        .iter()
        .map(|s| Sample {
            input: s.input.iter().map(|&v| normalizer.normalize(v)).collect(),
            target: normalizer.normalize(s.target),
        })
        .collect();

    let lr = T::lit(cfg.learning_rate);
    let clip = T::lit(cfg.clip_norm);
    let mut order: Vec<usize> = (0..normalized.len()).collect();
    let mut grad = vec![T::zero(); model.params().len()];
    let mut epoch_mse = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sq_sum = T::zero();
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = T::zero());
            let scale = T::lit(2.0 / batch.len() as f64);
            for &idx in batch {
                let sample = &normalized[idx];
                let trace = model.forward_trace(&sample.input);
                let err = trace.output - sample.target;
                sq_sum += err * err;
                model.backward(&trace, scale * err, cfg.bptt_truncation, &mut grad);
            }
            let norm = grad.iter().fold(T::zero(), |acc, g| acc + *g * *g).sqrt();
            if !norm.is_finite() {
                return Err(PredictorError::DivergedLoss { epoch: epoch + 1 });
            }
            let factor = if norm > clip { clip / norm } else { T::one() };
            for (p, g) in model.params_mut().iter_mut().zip(&grad) {
                *p -= lr * factor * *g;
            }
        }
        let mse = sq_sum / T::lit(normalized.len() as f64);
        if !mse.is_finite() {
            return Err(PredictorError::DivergedLoss { epoch: epoch + 1 });
        }
        epoch_mse.push(mse);
    }

    let holdout_mape = if holdout.is_empty() {
        None
    } else {
        let pairs = holdout
            .iter()
            .map(|s| Ok((s.target, model.predict(&s.input)?)))
            .collect::<Result<Vec<_>, PredictorError>>()?;
        mape(pairs).ok()
    };

    Ok(Trained {
        model,
        report: TrainReport {
            epoch_mse,
            train_samples: train.len(),
            holdout_samples: holdout.len(),
            holdout_mape,
        },
    })
}
