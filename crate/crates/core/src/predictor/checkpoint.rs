//! Text checkpoint format.
//!
//! ```text
//! lstm-checkpoint 1
//! hidden_size 32
//! input_size 1
//! window_length 24
//! horizon 2
//! normalizer_min 0
//! normalizer_max 190
//! matrix w_in.input 32 1
//! <32 rows of 1 value>
//! ...
//! ```
//!
//! Every block is `matrix <name> <rows> <cols>` followed by `rows` lines of
//! `cols` space-separated values, row-major. Values are written with the
//! shortest representation that round-trips exactly.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::Scalar;

use super::{Gate, Lstm, Normalizer, PredictorError, SlidingWindow};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &str = "lstm-checkpoint";

struct Block {
    name: String,
    rows: usize,
    cols: usize,
    range: std::ops::Range<usize>,
}

fn blocks<T: Scalar>(model: &Lstm<T>) -> Vec<Block> {
    let lay = model.layout();
    let h = lay.hidden;
    let mut out = Vec::new();
    for gate in Gate::ALL {
        out.push(Block {
            name: format!("w_in.{}", gate.name()),
            rows: h,
            cols: 1,
            range: lay.w_in(gate),
        });
    }
    for gate in Gate::ALL {
        out.push(Block {
            name: format!("w_rec.{}", gate.name()),
            rows: h,
            cols: h,
            range: lay.w_rec(gate),
        });
    }
    for gate in Gate::ALL {
        out.push(Block {
            name: format!("bias.{}", gate.name()),
            rows: 1,
            cols: h,
            range: lay.bias(gate),
        });
    }
    out.push(Block {
        name: "w_out".into(),
        rows: 1,
        cols: h,
        range: lay.w_out(),
    });
    out.push(Block {
        name: "b_out".into(),
        rows: 1,
        cols: 1,
        range: lay.b_out()..lay.b_out() + 1,
    });
    out
}

pub fn to_checkpoint_string<T: Scalar>(model: &Lstm<T>) -> String {
    let mut s = String::new();
    let win = model.window();
    let norm = model.normalizer();
    let _ = writeln!(s, "{MAGIC} {CHECKPOINT_VERSION}");
    let _ = writeln!(s, "hidden_size {}", model.hidden_size());
    let _ = writeln!(s, "input_size 1");
    let _ = writeln!(s, "window_length {}", win.length());
    let _ = writeln!(s, "horizon {}", win.horizon());
    let _ = writeln!(s, "normalizer_min {}", norm.min());
    let _ = writeln!(s, "normalizer_max {}", norm.max());
    let params = model.params();
    for block in blocks(model) {
        let _ = writeln!(s, "matrix {} {} {}", block.name, block.rows, block.cols);
        let values = &params[block.range];
        for row in values.chunks(block.cols) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
    }
    s
}

pub fn write_checkpoint<T: Scalar, W: Write>(model: &Lstm<T>, mut out: W) -> Result<(), PredictorError> {
    out.write_all(to_checkpoint_string(model).as_bytes())?;
    out.flush()?;
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str), PredictorError> {
        self.inner
            .next()
            .map(|(n, l)| (n + 1, l.trim()))
            .ok_or_else(|| PredictorError::Checkpoint("unexpected end of file".into()))
    }

    fn field<V: std::str::FromStr>(&mut self, key: &str) -> Result<V, PredictorError> {
        let (n, line) = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(PredictorError::Checkpoint(format!("line {n}: expected `{key}`")));
        }
        let value = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| PredictorError::Checkpoint(format!("line {n}: bad value for `{key}`")))?;
        if parts.next().is_some() {
            return Err(PredictorError::Checkpoint(format!("line {n}: trailing data")));
        }
        Ok(value)
    }
}

pub fn parse_checkpoint<T: Scalar>(text: &str) -> Result<Lstm<T>, PredictorError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let version: u32 = lines.field(MAGIC)?;
    if version != CHECKPOINT_VERSION {
        return Err(PredictorError::Checkpoint(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let hidden: usize = lines.field("hidden_size")?;
    let input: usize = lines.field("input_size")?;
    if input != 1 {
        return Err(PredictorError::Checkpoint(format!("input_size {input} is not supported")));
    }
    let length: usize = lines.field("window_length")?;
    let horizon: usize = lines.field("horizon")?;
    let min: T = lines.field("normalizer_min")?;
    let max: T = lines.field("normalizer_max")?;
    let window = SlidingWindow::new(length, horizon)?;
    let normalizer = Normalizer::new(min, max)?;

    let mut model = Lstm::zeroed(hidden, window, normalizer)?;
    for block in blocks(&model) {
        let (n, header) = lines.next_line()?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let expected_header = ["matrix", block.name.as_str()];
        if parts.len() != 4 || parts[..2] != expected_header {
            return Err(PredictorError::Checkpoint(format!(
                "line {n}: expected `matrix {}`",
                block.name
            )));
        }
        let rows: usize = parts[2].parse().unwrap_or(usize::MAX);
        let cols: usize = parts[3].parse().unwrap_or(usize::MAX);
        if rows != block.rows || cols != block.cols {
            return Err(PredictorError::Checkpoint(format!(
                "line {n}: {} is {rows}x{cols}, expected {}x{}",
                block.name, block.rows, block.cols
            )));
        }
        let mut at = block.range.start;
        for _ in 0..rows {
            let (n, row) = lines.next_line()?;
            let values: Vec<T> = row
                .split_whitespace()
                .map(|v| v.parse::<T>())
                .collect::<Result<_, _>>()
                .map_err(|_| PredictorError::Checkpoint(format!("line {n}: unparsable value")))?;
            if values.len() != cols {
                return Err(PredictorError::Checkpoint(format!(
                    "line {n}: expected {cols} values, found {}",
                    values.len()
                )));
            }
            model.params_mut()[at..at + cols].copy_from_slice(&values);
            at += cols;
        }
    }
    if let Ok((n, extra)) = lines.next_line() {
        if !extra.is_empty() {
            return Err(PredictorError::Checkpoint(format!("line {n}: trailing content")));
        }
    }
    let params = model.params().to_vec();
    Lstm::from_parts(hidden, window, normalizer, params)
}

pub fn read_checkpoint<T: Scalar, R: Read>(mut input: R) -> Result<Lstm<T>, PredictorError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    parse_checkpoint(&text)
}
