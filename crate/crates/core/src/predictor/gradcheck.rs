//! Finite-difference validation of the BPTT gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Scalar;

use super::{Lstm, Normalizer, PredictorError, Sample, SlidingWindow};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Deliberate corruption applied to the analytic gradient, used to confirm
/// that the check can actually fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientFault {
    #[default]
    None,
    FlipForgetGate,
}

/// Squared error of the raw (normalized) network output against the
/// normalized target.
pub fn sample_loss<T: Scalar>(model: &Lstm<T>, xs: &[T], target: T) -> T {
    let e = model.forward_normalized(xs) - target;
    e * e
}

/// Analytic gradient of [`sample_loss`] over every parameter.
pub fn analytic_gradient<T: Scalar>(model: &Lstm<T>, sample: &Sample<T>, fault: GradientFault) -> Vec<T> {
    let xs: Vec<T> = sample.input.iter().map(|&v| model.normalize(v)).collect();
    let target = model.normalize(sample.target);
    let trace = model.forward_trace(&xs);
    let mut grad = vec![T::zero(); model.params().len()];
    model.backward(&trace, T::lit(2.0) * (trace.output - target), 0, &mut grad);
    if fault == GradientFault::FlipForgetGate {
        for idx in model.layout().forget_gate() {
            grad[idx] = -grad[idx];
        }
    }
    grad
}

/// Largest relative error between the analytic gradient and central finite
/// differences, over every parameter. The denominator is floored at 1e-6 so
/// vanishing gradients compare on an absolute scale.
pub fn gradient_check<T: Scalar>(model: &Lstm<T>, sample: &Sample<T>) -> T {
    gradient_check_with(model, sample, GradientFault::None)
}

pub fn gradient_check_with<T: Scalar>(model: &Lstm<T>, sample: &Sample<T>, fault: GradientFault) -> T {
    let analytic = analytic_gradient(model, sample, fault);
    let xs: Vec<T> = sample.input.iter().map(|&v| model.normalize(v)).collect();
    let target = model.normalize(sample.target);
    let step = T::lit(FD_STEP);
    let floor = T::lit(1e-6);
    let mut probe = model.clone();
    let mut worst = T::zero();
    for (idx, &a) in analytic.iter().enumerate() {
        let original = probe.params()[idx];
        probe.params_mut()[idx] = original + step;
        let plus = sample_loss(&probe, &xs, target);
        probe.params_mut()[idx] = original - step;
        let minus = sample_loss(&probe, &xs, target);
        probe.params_mut()[idx] = original;
        let numeric = (plus - minus) / (T::lit(2.0) * step);
        let denom = a.abs().max(numeric.abs()).max(floor);
        let rel = (a - numeric).abs() / denom;
        if rel.is_nan() {
            return T::infinity();
        }
        worst = worst.max(rel);
    }
    worst
}

/// A seeded random model (weights jittered away from initialization so no
/// gate sits at a symmetric point) and a random sample over `[0, 10)`.
pub fn random_case(seed: u64, hidden: usize, window: usize) -> Result<(Lstm<f64>, Sample<f64>), PredictorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let win = SlidingWindow::new(window, 1)?;
    let mut model = Lstm::random(hidden, win, Normalizer::new(0.0, 10.0)?, &mut rng)?;
    for p in model.params_mut() {
        *p += rng.gen_range(-0.5..0.5);
    }
    let sample = Sample {
        input: (0..window).map(|_| rng.gen_range(0.0..10.0)).collect(),
        target: rng.gen_range(0.0..10.0),
    };
    Ok((model, sample))
}
