//! Finite timed state sequences: sampled signals with named dimensions,
//! construction from continuous generators, CSV import/export, the
//! sup-distance metric and bounded perturbation.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use rand::Rng;
use thiserror::Error;

use crate::formula::FrozenIndex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("sampling step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("a timed state sequence needs at least one sample")]
    Empty,
    #[error("timestamps must start at 0 and strictly increase (sample {index})")]
    BadTimestamps { index: usize },
    #[error("sample {index} has {got} values, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("sequences are sampled on different grids")]
    GridMismatch,
    #[error("malformed trajectory CSV: {0}")]
    Csv(String),
}

/// A finite sampled signal: strictly increasing timestamps starting at 0,
/// one n-dimensional state per timestamp, and the n variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedStateSequence {
    names: Vec<String>,
    times: Vec<f64>,
    /// Row-major: sample k occupies `[k*n, (k+1)*n)`.
    values: Vec<f64>,
}

impl TimedStateSequence {
    pub fn new(
        names: Vec<String>,
        times: Vec<f64>,
        states: Vec<Vec<f64>>,
    ) -> Result<Self, SignalError> {
        let n = names.len();
        if times.is_empty() || times.len() != states.len() {
            return Err(SignalError::Empty);
        }
        if times[0] != 0.0 {
            return Err(SignalError::BadTimestamps { index: 0 });
        }
        for (k, w) in times.windows(2).enumerate() {
            if !w[1].is_finite() || w[0] >= w[1] {
                return Err(SignalError::BadTimestamps { index: k + 1 });
            }
        }
        let mut values = Vec::with_capacity(times.len() * n);
        for (k, state) in states.iter().enumerate() {
            if state.len() != n {
                return Err(SignalError::DimensionMismatch {
                    index: k,
                    got: state.len(),
                    expected: n,
                });
            }
            values.extend_from_slice(state);
        }
        Ok(TimedStateSequence {
            names,
            times,
            values,
        })
    }

    /// Samples a continuous generator on the uniform grid `0, step, 2*step, ...`
    /// extended to the first multiple of `step` at or past `horizon`.
    pub fn sample(
        names: Vec<String>,
        generator: impl Fn(f64) -> Vec<f64>,
        step: f64,
        horizon: f64,
    ) -> Result<Self, SignalError> {
        if step <= 0.0 || step.is_nan() {
            return Err(SignalError::NonPositiveStep(step));
        }
        let count = (horizon / step).ceil().max(0.0) as usize;
        let times: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
        let states: Vec<Vec<f64>> = times.iter().map(|&t| generator(t)).collect();
        Self::new(names, times, states)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by invariant: at least one sample
    }

    /// Number of signal dimensions.
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Timestamp of the last sample; the length of the observed signal.
    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// The state vector at sample position `k`.
    pub fn state(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.values[k * n..(k + 1) * n]
    }

    /// Position of a named variable, if present.
    pub fn variable_position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Maximum pointwise Euclidean distance between two sequences sampled
    /// on the same grid.
    pub fn sup_distance(&self, other: &Self) -> Result<f64, SignalError> {
        if self.names != other.names || self.times != other.times {
            return Err(SignalError::GridMismatch);
        }
        let n = self.dim();
        let mut sup = 0.0_f64;
        for k in 0..self.len() {
            let mut sq = 0.0;
            for j in 0..n {
                let d = self.values[k * n + j] - other.values[k * n + j];
                sq += d * d;
            }
            sup = sup.max(sq.sqrt());
        }
        Ok(sup)
    }

    /// Returns a copy whose sup-distance from `self` is strictly below
    /// `bound` (equal to `self` when `bound` is zero). Deterministic for a
    /// seeded generator.
    pub fn perturb<R: Rng + ?Sized>(&self, bound: f64, rng: &mut R) -> Self {
        assert!(bound >= 0.0, "perturbation bound must be non-negative");
        let mut out = self.clone();
        if bound == 0.0 {
            return out;
        }
        let n = self.dim();
        for k in 0..self.len() {
            let direction: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let radius = bound * rng.gen_range(0.0..1.0);
            for (slot, d) in out.values[k * n..(k + 1) * n].iter_mut().zip(&direction) {
                *slot += d / norm * radius;
            }
        }
        out
    }

    /// Writes the trajectory in CSV form: header `time,<name1>,...,<nameN>`,
    /// one row per sample.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> io::Result<()> {
        let mut line = String::from("time");
        for name in &self.names {
            let _ = write!(line, ",{name}");
        }
        writeln!(writer, "{line}")?;
        for k in 0..self.len() {
            line.clear();
            let _ = write!(line, "{}", self.times[k]);
            for v in self.state(k) {
                let _ = write!(line, ",{v}");
            }
            writeln!(writer, "{line}")?;
        }
        Ok(())
    }

    /// Reads a trajectory from the CSV form written by [`write_csv`].
    ///
    /// [`write_csv`]: TimedStateSequence::write_csv
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self, SignalError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| SignalError::Csv("missing header".into()))?
            .map_err(|e| SignalError::Csv(e.to_string()))?;
        let mut columns = header.split(',');
        if columns.next().map(str::trim) != Some("time") {
            return Err(SignalError::Csv("header must start with `time`".into()));
        }
        let names: Vec<String> = columns.map(|c| c.trim().to_string()).collect();
        let mut times = Vec::new();
        let mut states = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.map_err(|e| SignalError::Csv(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let fields = fields.map_err(|e| {
                SignalError::Csv(format!("row {}: {e}", row + 2))
            })?;
            if fields.len() != names.len() + 1 {
                return Err(SignalError::Csv(format!(
                    "row {}: expected {} fields, got {}",
                    row + 2,
                    names.len() + 1,
                    fields.len()
                )));
            }
            times.push(fields[0]);
            states.push(fields[1..].to_vec());
        }
        Self::new(names, times, states)
    }
}

/// Discrete analogue of the frozen time vector: maps each frozen index to a
/// sample position of the sequence under evaluation. Unset indices map to
/// position 0, matching the zero frozen time vector.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FrozenStateVector(Vec<usize>);

impl FrozenStateVector {
    /// The zero vector: every index frozen at sample position 0.
    pub fn zero() -> Self {
        FrozenStateVector(Vec::new())
    }

    /// The sample position stored for `index`.
    pub fn position(&self, index: FrozenIndex) -> usize {
        self.0.get(index.get() as usize - 1).copied().unwrap_or(0)
    }

    /// Returns a copy with `index` frozen at `position`.
    pub fn store(&self, index: FrozenIndex, position: usize) -> Self {
        let slot = index.get() as usize - 1;
        let mut positions = self.0.clone();
        if positions.len() <= slot {
            positions.resize(slot + 1, 0);
        }
        positions[slot] = position;
        FrozenStateVector(positions)
    }

    pub(crate) fn as_slice(&self) -> &[usize] {
        &self.0
    }
}
