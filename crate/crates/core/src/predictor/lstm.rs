//! Single-layer LSTM regressor with a linear scalar head.
//!
//! Gate equations (no peepholes), for hidden state `h` and cell `c`:
//!
//! ```text
//! i = σ(W_i x + U_i h + b_i)      f = σ(W_f x + U_f h + b_f)
//! o = σ(W_o x + U_o h + b_o)      g = tanh(W_g x + U_g h + b_g)
//! c' = f ⊙ c + i ⊙ g              h' = o ⊙ tanh(c')
//! y = wᵀ h_T + b
//! ```
//!
//! All parameters live in one flat vector; [`ParamLayout`] gives the offsets.

use rand::Rng;

use crate::Scalar;

use super::{PredictorError, SlidingWindow};

/// Gate index into the parameter blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    Candidate = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Output, Gate::Candidate];

    pub fn name(self) -> &'static str {
        match self {
            Gate::Input => "input",
            Gate::Forget => "forget",
            Gate::Output => "output",
            Gate::Candidate => "candidate",
        }
    }
}

/// Offsets of every parameter block inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamLayout {
    pub hidden: usize,
}

impl ParamLayout {
    pub fn len(&self) -> usize {
        let h = self.hidden;
        4 * h * h + 9 * h + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Input weights of `gate`, one per hidden unit.
    pub fn w_in(&self, gate: Gate) -> std::ops::Range<usize> {
        let h = self.hidden;
        let g = gate as usize;
        g * h..(g + 1) * h
    }

    /// Recurrent weights of `gate`, row-major `[unit][previous unit]`.
    pub fn w_rec(&self, gate: Gate) -> std::ops::Range<usize> {
        let h = self.hidden;
        let base = 4 * h + gate as usize * h * h;
        base..base + h * h
    }

    pub fn bias(&self, gate: Gate) -> std::ops::Range<usize> {
        let h = self.hidden;
        let base = 4 * h + 4 * h * h + gate as usize * h;
        base..base + h
    }

    pub fn w_out(&self) -> std::ops::Range<usize> {
        let h = self.hidden;
        let base = 8 * h + 4 * h * h;
        base..base + h
    }

    pub fn b_out(&self) -> usize {
        9 * self.hidden + 4 * self.hidden * self.hidden
    }

    /// The whole forget-gate parameter set (input, recurrent and bias).
    pub fn forget_gate(&self) -> impl Iterator<Item = usize> {
        self.w_in(Gate::Forget)
            .chain(self.w_rec(Gate::Forget))
            .chain(self.bias(Gate::Forget))
    }
}

/// Min-max scaling fitted on training data. Values outside the fitted range
/// extrapolate affinely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer<T> {
    min: T,
    max: T,
}

impl<T: Scalar> Normalizer<T> {
    pub fn new(min: T, max: T) -> Result<Self, PredictorError> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(PredictorError::DegenerateRange);
        }
        Ok(Self { min, max })
    }

    pub fn fit(values: &[T]) -> Result<Self, PredictorError> {
        let mut iter = values.iter().copied();
        let first = iter.next().ok_or(PredictorError::DegenerateRange)?;
        let (min, max) = iter.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Self::new(min, max)
    }

    pub fn min(&self) -> T {
        self.min
    }

    pub fn max(&self) -> T {
        self.max
    }

    pub fn normalize(&self, value: T) -> T {
        (value - self.min) / (self.max - self.min)
    }

    pub fn denormalize(&self, value: T) -> T {
        self.min + value * (self.max - self.min)
    }
}

fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Activations retained from a forward pass, one entry per time step.
#[derive(Debug, Clone)]
pub(crate) struct Trace<T> {
    pub xs: Vec<T>,
    /// Gate activations per step, `[i | f | o | g]`, each `hidden` long.
    pub gates: Vec<Vec<T>>,
    /// Cell states; `cells[0]` is the zero initial state.
    pub cells: Vec<Vec<T>>,
    /// Hidden states; `hiddens[0]` is the zero initial state.
    pub hiddens: Vec<Vec<T>>,
    pub output: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lstm<T> {
    layout: ParamLayout,
    window: SlidingWindow,
    params: Vec<T>,
    normalizer: Normalizer<T>,
}

impl<T: Scalar> Lstm<T> {
    /// A model with every parameter set to zero.
    pub fn zeroed(hidden: usize, window: SlidingWindow, normalizer: Normalizer<T>) -> Result<Self, PredictorError> {
        if hidden == 0 {
            return Err(PredictorError::InvalidConfig("hidden size must be positive".into()));
        }
        let layout = ParamLayout { hidden };
        Ok(Self {
            layout,
            window,
            params: vec![T::zero(); layout.len()],
            normalizer,
        })
    }

    /// Weights uniform in `±1/sqrt(hidden)`, zero biases except the forget
    /// gate, which starts at 1.
    pub fn random<R: Rng>(
        hidden: usize,
        window: SlidingWindow,
        normalizer: Normalizer<T>,
        rng: &mut R,
    ) -> Result<Self, PredictorError> {
        let mut model = Self::zeroed(hidden, window, normalizer)?;
        let scale = 1.0 / (hidden as f64).sqrt();
        let layout = model.layout;
        for gate in Gate::ALL {
            for idx in layout.w_in(gate).chain(layout.w_rec(gate)) {
                model.params[idx] = T::lit(rng.gen_range(-scale..scale));
            }
        }
        for idx in layout.bias(Gate::Forget) {
            model.params[idx] = T::one();
        }
        for idx in layout.w_out() {
            model.params[idx] = T::lit(rng.gen_range(-scale..scale));
        }
        Ok(model)
    }

    pub fn from_parts(
        hidden: usize,
        window: SlidingWindow,
        normalizer: Normalizer<T>,
        params: Vec<T>,
    ) -> Result<Self, PredictorError> {
        let layout = ParamLayout { hidden };
        if hidden == 0 || params.len() != layout.len() {
            return Err(PredictorError::ShapeMismatch {
                expected: layout.len(),
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(PredictorError::InvalidConfig("parameters must be finite".into()));
        }
        Ok(Self {
            layout,
            window,
            params,
            normalizer,
        })
    }

    pub fn hidden_size(&self) -> usize {
        self.layout.hidden
    }

    pub fn layout(&self) -> ParamLayout {
        self.layout
    }

    pub fn window(&self) -> SlidingWindow {
        self.window
    }

    pub fn normalizer(&self) -> &Normalizer<T> {
        &self.normalizer
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn normalize(&self, value: T) -> T {
        self.normalizer.normalize(value)
    }

    pub fn denormalize(&self, value: T) -> T {
        self.normalizer.denormalize(value)
    }

    /// Predicts demand `horizon` intervals after the last element of `window`.
    /// State starts from zero on every call; the result is clamped at zero.
    pub fn predict(&self, window: &[T]) -> Result<T, PredictorError> {
        if window.len() != self.window.length() {
            return Err(PredictorError::ShapeMismatch {
                expected: self.window.length(),
                got: window.len(),
            });
        }
        let xs: Vec<T> = window.iter().map(|&v| self.normalize(v)).collect();
        let y = self.forward_normalized(&xs);
        Ok(self.denormalize(y).max(T::zero()))
    }

    /// Raw network output for already-normalized inputs.
    pub fn forward_normalized(&self, xs: &[T]) -> T {
        let h = self.layout.hidden;
        let mut hidden = vec![T::zero(); h];
        let mut cell = vec![T::zero(); h];
        let mut pre = vec![T::zero(); 4 * h];
        for &x in xs {
            self.gate_preactivations(x, &hidden, &mut pre);
            for j in 0..h {
                let i = sigmoid(pre[j]);
                let f = sigmoid(pre[h + j]);
                let o = sigmoid(pre[2 * h + j]);
                let g = pre[3 * h + j].tanh();
                cell[j] = f * cell[j] + i * g;
                hidden[j] = o * cell[j].tanh();
            }
        }
        self.head(&hidden)
    }

    fn head(&self, hidden: &[T]) -> T {
        let w = &self.params[self.layout.w_out()];
        let mut y = self.params[self.layout.b_out()];
        for (wj, hj) in w.iter().zip(hidden) {
            y += *wj * *hj;
        }
        y
    }

    /// Writes `[a_i | a_f | a_o | a_g]` for input `x` and previous hidden state.
    fn gate_preactivations(&self, x: T, hidden: &[T], pre: &mut [T]) {
        let h = self.layout.hidden;
        for gate in Gate::ALL {
            let g = gate as usize;
            let w_in = &self.params[self.layout.w_in(gate)];
            let w_rec = &self.params[self.layout.w_rec(gate)];
            let bias = &self.params[self.layout.bias(gate)];
            for j in 0..h {
                let row = &w_rec[j * h..(j + 1) * h];
                let mut acc = bias[j] + w_in[j] * x;
                for (w, hk) in row.iter().zip(hidden) {
                    acc += *w * *hk;
                }
                pre[g * h + j] = acc;
            }
        }
    }

    pub(crate) fn forward_trace(&self, xs: &[T]) -> Trace<T> {
        let h = self.layout.hidden;
        let mut trace = Trace {
            xs: xs.to_vec(),
            gates: Vec::with_capacity(xs.len()),
            cells: Vec::with_capacity(xs.len() + 1),
            hiddens: Vec::with_capacity(xs.len() + 1),
            output: T::zero(),
        };
        trace.cells.push(vec![T::zero(); h]);
        trace.hiddens.push(vec![T::zero(); h]);
        let mut pre = vec![T::zero(); 4 * h];
        for &x in xs {
            let prev_h = trace.hiddens.last().expect("initial state");
            self.gate_preactivations(x, prev_h, &mut pre);
            let prev_c = trace.cells.last().expect("initial state");
            let mut act = vec![T::zero(); 4 * h];
            let mut cell = vec![T::zero(); h];
            let mut hidden = vec![T::zero(); h];
            for j in 0..h {
                let i = sigmoid(pre[j]);
                let f = sigmoid(pre[h + j]);
                let o = sigmoid(pre[2 * h + j]);
                let g = pre[3 * h + j].tanh();
                act[j] = i;
                act[h + j] = f;
                act[2 * h + j] = o;
                act[3 * h + j] = g;
                cell[j] = f * prev_c[j] + i * g;
                hidden[j] = o * cell[j].tanh();
            }
            trace.gates.push(act);
            trace.cells.push(cell);
            trace.hiddens.push(hidden);
        }
        trace.output = self.head(trace.hiddens.last().expect("initial state"));
        trace
    }

    /// Accumulates `d_output * ∂y/∂θ` into `grad`, back-propagating through at
    /// most `truncation` of the most recent steps (0 means all of them).
    pub(crate) fn backward(&self, trace: &Trace<T>, d_output: T, truncation: usize, grad: &mut [T]) {
        let h = self.layout.hidden;
        let lay = self.layout;
        let steps = trace.xs.len();
        let last_h = &trace.hiddens[steps];

        for (j, hj) in last_h.iter().enumerate() {
            grad[lay.w_out().start + j] += d_output * *hj;
        }
        grad[lay.b_out()] += d_output;

        let w_out = &self.params[lay.w_out()];
        let mut dh: Vec<T> = w_out.iter().map(|w| *w * d_output).collect();
        let mut dc_next = vec![T::zero(); h];
        let mut da = vec![T::zero(); 4 * h];
        let span = if truncation == 0 { steps } else { truncation.min(steps) };

        for s in (steps - span..steps).rev() {
            let act = &trace.gates[s];
            let c_prev = &trace.cells[s];
            let c = &trace.cells[s + 1];
            let h_prev = &trace.hiddens[s];
            for j in 0..h {
                let i = act[j];
                let f = act[h + j];
                let o = act[2 * h + j];
                let g = act[3 * h + j];
                let tc = c[j].tanh();
                let d_o = dh[j] * tc;
                let dc = dc_next[j] + dh[j] * o * (T::one() - tc * tc);
                let d_i = dc * g;
                let d_g = dc * i;
                let d_f = dc * c_prev[j];
                dc_next[j] = dc * f;
                da[j] = d_i * i * (T::one() - i);
                da[h + j] = d_f * f * (T::one() - f);
                da[2 * h + j] = d_o * o * (T::one() - o);
                da[3 * h + j] = d_g * (T::one() - g * g);
            }
            let x = trace.xs[s];
            let mut dh_prev = vec![T::zero(); h];
            for gate in Gate::ALL {
                let gi = gate as usize;
                let w_in = lay.w_in(gate).start;
                let w_rec = lay.w_rec(gate).start;
                let bias = lay.bias(gate).start;
                let rec = &self.params[lay.w_rec(gate)];
                for j in 0..h {
                    let a = da[gi * h + j];
                    grad[w_in + j] += a * x;
                    grad[bias + j] += a;
                    let row = w_rec + j * h;
                    for k in 0..h {
                        grad[row + k] += a * h_prev[k];
                        dh_prev[k] += rec[j * h + k] * a;
                    }
                }
            }
            dh = dh_prev;
        }
    }
}
