//! Discrete robustness monitoring.
//!
//! Robustness of a formula over a timed state sequence is computed by
//! structural recursion: `true` maps to +inf, negation to arithmetic
//! negation, disjunction to max, conjunction to min, and the freeze
//! operator stores the current sample position into the frozen state
//! vector. Temporal operators take extrema over sample windows; until
//! values are precomputed per (node, frozen state vector) for every base
//! position allowed by the necessary-length guard and memoized. Bounded
//! `F`/`G` nodes use a monotone-deque window sweep, turning the quadratic
//! window scan into an amortized linear one; the desugared until route is
//! kept available as the reference path.

mod window;

pub use window::{sliding_extrema, Extremum};

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Formula, FormulaKind, LinearPredicate, TimeInterval};
use crate::signal::{FrozenStateVector, TimedStateSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    /// The sequence is shorter than the formula's necessary input length.
    /// Robustness would be undefined, so this is an error rather than a
    /// silent "unsatisfied".
    #[error(
        "sequence of length {actual} is shorter than the formula's necessary input length {required}"
    )]
    TooShort { required: f64, actual: f64 },
    #[error("formula references variable `{0}` not present in the sequence")]
    UnknownVariable(String),
    #[error("sample position {position} out of range for a sequence of {len} samples")]
    PositionOutOfRange { position: usize, len: usize },
}

/// Evaluation switches. The defaults enable both optimizations; disabling
/// them must not change any computed value, only the work done.
#[derive(Debug, Clone, Copy)]
pub struct MonitorOptions {
    /// Evaluate bounded `F`/`G` through the monotone-deque window sweep
    /// instead of the quadratic per-position scan.
    pub fast_temporal: bool,
    /// Cache precomputed temporal-operator arrays per (node, frozen state
    /// vector).
    pub memoize: bool,
}

impl Default for MonitorOptions {
    fn default() -> Self {
        MonitorOptions {
            fast_temporal: true,
            memoize: true,
        }
    }
}

/// Robustness of `phi` over `seq` at time zero with the zero frozen state
/// vector. Positive values imply satisfaction, negative values violation;
/// the magnitude bounds a sup-distance neighbourhood of the sequence on
/// which the truth value is constant.
pub fn monitor(phi: &Formula, seq: &TimedStateSequence) -> Result<f64, MonitorError> {
    monitor_with(phi, seq, MonitorOptions::default())
}

/// [`monitor`] with explicit evaluation options.
pub fn monitor_with(
    phi: &Formula,
    seq: &TimedStateSequence,
    options: MonitorOptions,
) -> Result<f64, MonitorError> {
    let mut eval = Evaluator::new(phi, seq, options)?;
    Ok(eval.robustness(phi, 0, &FrozenStateVector::zero()))
}

/// Exact Boolean satisfaction of `phi` over `seq` per the discrete
/// semantics. More precise than the sign of [`monitor`] when robustness is
/// zero.
pub fn boolean_monitor(phi: &Formula, seq: &TimedStateSequence) -> Result<bool, MonitorError> {
    let mut eval = Evaluator::new(phi, seq, MonitorOptions::default())?;
    Ok(eval.satisfied(phi, 0, &FrozenStateVector::zero()))
}

/// Robustness of a single linear predicate at sample position `iota` with
/// frozen positions `iota_star`:
///
/// ```text
/// (sum_j a[0][j]*x_j(iota) + sum_i sum_j a[i][j]*x_j(iota_star[i]) + b)
///   / sum_i sqrt(sum_j a[i][j]^2)
/// ```
pub fn predicate_robustness(
    pred: &LinearPredicate,
    seq: &TimedStateSequence,
    iota: usize,
    iota_star: &FrozenStateVector,
) -> Result<f64, MonitorError> {
    if iota >= seq.len() {
        return Err(MonitorError::PositionOutOfRange {
            position: iota,
            len: seq.len(),
        });
    }
    for &p in iota_star.as_slice() {
        if p >= seq.len() {
            return Err(MonitorError::PositionOutOfRange {
                position: p,
                len: seq.len(),
            });
        }
    }
    let bound = BoundPred::bind(pred, seq)?;
    Ok(bound.value(seq, iota, iota_star))
}

/// Until robustness precomputed for every base position `i` with
/// `times[i] + hi + max(l(phi1), l(phi2)) <= duration`, at the given frozen
/// state vector.
pub fn precompute_until(
    phi1: &Formula,
    phi2: &Formula,
    interval: TimeInterval,
    iota_star: &FrozenStateVector,
    seq: &TimedStateSequence,
) -> Result<Vec<f64>, MonitorError> {
    for &p in iota_star.as_slice() {
        if p >= seq.len() {
            return Err(MonitorError::PositionOutOfRange {
                position: p,
                len: seq.len(),
            });
        }
    }
    let until = Formula::until(interval, phi1.clone(), phi2.clone());
    let mut eval = Evaluator::new_unchecked(&until, seq, MonitorOptions::default())?;
    Ok(eval.precompute_temporal(&until, iota_star))
}

/// Serializes a robustness value: 12 significant decimal digits, with the
/// infinities spelled `inf` and `-inf`.
pub fn format_robustness(value: f64) -> String {
    if value.is_nan() {
        return "nan".to_string();
    }
    if value == f64::INFINITY {
        return "inf".to_string();
    }
    if value == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    // Render via scientific notation with 12 significant digits, then
    // expand to plain decimal.
    let sci = format!("{value:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let body = if exp >= 11 {
        format!("{digits}{}", "0".repeat(exp as usize - 11))
    } else if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{digits}", "0".repeat(-exp as usize - 1))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Predicate with variables resolved to sequence positions and the
/// denominator fixed up front.
struct BoundPred {
    /// (frozen block; 0 = current time, variable position, coefficient) in
    /// the predicate's canonical term order.
    terms: Vec<(u32, usize, f64)>,
    offset: f64,
    denominator: f64,
}

impl BoundPred {
    fn bind(pred: &LinearPredicate, seq: &TimedStateSequence) -> Result<Self, MonitorError> {
        let mut terms = Vec::new();
        for (index, name, coeff) in pred.terms() {
            let position = seq
                .variable_position(name)
                .ok_or_else(|| MonitorError::UnknownVariable(name.to_string()))?;
            terms.push((index.map_or(0, |i| i.get()), position, coeff));
        }
        Ok(BoundPred {
            terms,
            offset: pred.offset(),
            denominator: pred.denominator(),
        })
    }

    fn numerator(&self, seq: &TimedStateSequence, iota: usize, star: &FrozenStateVector) -> f64 {
        let star = star.as_slice();
        let mut total = 0.0;
        for &(block, position, coeff) in &self.terms {
            let k = if block == 0 {
                iota
            } else {
                star.get(block as usize - 1).copied().unwrap_or(0)
            };
            total += coeff * seq.state(k)[position];
        }
        total + self.offset
    }

    fn value(&self, seq: &TimedStateSequence, iota: usize, star: &FrozenStateVector) -> f64 {
        self.numerator(seq, iota, star) / self.denominator
    }
}

struct Evaluator<'a> {
    seq: &'a TimedStateSequence,
    options: MonitorOptions,
    /// Variable bindings per predicate node.
    preds: HashMap<u64, BoundPred>,
    /// Necessary input length per node.
    lengths: HashMap<u64, f64>,
    /// Precomputed temporal arrays: node -> frozen state vector -> values
    /// indexed by base sample position.
    memo: HashMap<u64, HashMap<Vec<usize>, Vec<f64>>>,
}

impl<'a> Evaluator<'a> {
    fn new(
        phi: &Formula,
        seq: &'a TimedStateSequence,
        options: MonitorOptions,
    ) -> Result<Self, MonitorError> {
        let required = phi.necessary_length();
        if seq.duration() < required {
            return Err(MonitorError::TooShort {
                required,
                actual: seq.duration(),
            });
        }
        Self::new_unchecked(phi, seq, options)
    }

    /// Skips the length guard; used for explicit precomputation, where a
    /// short sequence legitimately yields an empty array.
    fn new_unchecked(
        phi: &Formula,
        seq: &'a TimedStateSequence,
        options: MonitorOptions,
    ) -> Result<Self, MonitorError> {
        let mut eval = Evaluator {
            seq,
            options,
            preds: HashMap::new(),
            lengths: HashMap::new(),
            memo: HashMap::new(),
        };
        eval.bind(phi)?;
        Ok(eval)
    }

    /// Resolves predicate variables and caches per-node necessary lengths.
    fn bind(&mut self, phi: &Formula) -> Result<f64, MonitorError> {
        let length = match phi.kind() {
            FormulaKind::True => 0.0,
            FormulaKind::Pred(p) => {
                let bound = BoundPred::bind(p, self.seq)?;
                self.preds.insert(phi.id().get(), bound);
                0.0
            }
            FormulaKind::Not(p) | FormulaKind::Freeze(_, p) => self.bind(p)?,
            FormulaKind::Or(l, r) | FormulaKind::And(l, r) => {
                self.bind(l)?.max(self.bind(r)?)
            }
            FormulaKind::Until(i, l, r) => self.bind(l)?.max(self.bind(r)?) + i.hi(),
            FormulaKind::Eventually(i, p) | FormulaKind::Globally(i, p) => {
                self.bind(p)? + i.hi()
            }
        };
        self.lengths.insert(phi.id().get(), length);
        Ok(length)
    }

    fn length(&self, phi: &Formula) -> f64 {
        self.lengths[&phi.id().get()]
    }

    fn robustness(&mut self, phi: &Formula, iota: usize, star: &FrozenStateVector) -> f64 {
        match phi.kind() {
            FormulaKind::True => f64::INFINITY,
            FormulaKind::Pred(_) => self.preds[&phi.id().get()].value(self.seq, iota, star),
            FormulaKind::Not(p) => -self.robustness(p, iota, star),
            FormulaKind::Or(l, r) => {
                let a = self.robustness(l, iota, star);
                let b = self.robustness(r, iota, star);
                a.max(b)
            }
            FormulaKind::And(l, r) => {
                let a = self.robustness(l, iota, star);
                let b = self.robustness(r, iota, star);
                a.min(b)
            }
            FormulaKind::Freeze(i, p) => {
                let star = star.store(*i, iota);
                self.robustness(p, iota, &star)
            }
            FormulaKind::Until(_, _, _)
            | FormulaKind::Eventually(_, _)
            | FormulaKind::Globally(_, _) => self.temporal_value(phi, iota, star),
        }
    }

    /// Temporal operators: look up the precomputed array for this node and
    /// frozen state vector, computing and caching it on first use. Base
    /// positions past the precomputation guard fall back to a direct
    /// single-position evaluation over the samples that exist.
    fn temporal_value(&mut self, phi: &Formula, iota: usize, star: &FrozenStateVector) -> f64 {
        let id = phi.id().get();
        if self.options.memoize {
            let cached = self
                .memo
                .get(&id)
                .and_then(|per_star| per_star.get(star.as_slice()))
                .map(|array| array.get(iota).copied());
            match cached {
                Some(Some(value)) => return value,
                Some(None) => return self.temporal_at(phi, iota, star),
                None => {}
            }
        }
        let array = self.precompute_temporal(phi, star);
        let value = array.get(iota).copied();
        if self.options.memoize {
            self.memo
                .entry(id)
                .or_default()
                .insert(star.as_slice().to_vec(), array);
        }
        match value {
            Some(value) => value,
            None => self.temporal_at(phi, iota, star),
        }
    }

    /// Number of base positions `i` satisfying the precomputation guard
    /// `times[i] + hi + l <= duration`.
    fn guard_count(&self, hi: f64, l: f64) -> usize {
        let duration = self.seq.duration();
        self.seq
            .times()
            .iter()
            .take_while(|&&t| t + hi + l <= duration)
            .count()
    }

    fn precompute_temporal(&mut self, phi: &Formula, star: &FrozenStateVector) -> Vec<f64> {
        let seq = self.seq;
        match phi.kind() {
            FormulaKind::Until(interval, left, right) => {
                let l = self.length(left).max(self.length(right));
                let emit = self.guard_count(interval.hi(), l);
                (0..emit)
                    .map(|i| self.until_at(*interval, left, right, i, star))
                    .collect()
            }
            FormulaKind::Eventually(interval, child) | FormulaKind::Globally(interval, child) => {
                let mode = match phi.kind() {
                    FormulaKind::Eventually(_, _) => Extremum::Max,
                    _ => Extremum::Min,
                };
                let l = self.length(child);
                let emit = self.guard_count(interval.hi(), l);
                if self.options.fast_temporal {
                    // Child values are defined up to the child's own guard;
                    // every emitted window stays inside that prefix.
                    let duration = seq.duration();
                    let valid = seq
                        .times()
                        .iter()
                        .take_while(|&&t| t + l <= duration)
                        .count();
                    let values: Vec<f64> =
                        (0..valid).map(|k| self.robustness(child, k, star)).collect();
                    window::windowed_extrema(
                        &seq.times()[..valid],
                        &values,
                        interval.lo(),
                        interval.hi(),
                        emit,
                        mode,
                    )
                } else {
                    (0..emit)
                        .map(|i| self.window_extremum_at(*interval, child, mode, i, star))
                        .collect()
                }
            }
            _ => unreachable!("not a temporal node"),
        }
    }

    /// Direct single-position evaluation of a temporal node.
    fn temporal_at(&mut self, phi: &Formula, iota: usize, star: &FrozenStateVector) -> f64 {
        match phi.kind() {
            FormulaKind::Until(interval, left, right) => {
                self.until_at(*interval, left, right, iota, star)
            }
            FormulaKind::Eventually(interval, child) => {
                self.window_extremum_at(*interval, child, Extremum::Max, iota, star)
            }
            FormulaKind::Globally(interval, child) => {
                self.window_extremum_at(*interval, child, Extremum::Min, iota, star)
            }
            _ => unreachable!("not a temporal node"),
        }
    }

    /// Until robustness at one base position: running minimum of the left
    /// operand from the base up to each window sample, maximized against
    /// the right operand inside the window.
    fn until_at(
        &mut self,
        interval: TimeInterval,
        left: &Formula,
        right: &Formula,
        iota: usize,
        star: &FrozenStateVector,
    ) -> f64 {
        let seq = self.seq;
        let times = seq.times();
        let n = seq.len();
        let start = times[iota] + interval.lo();
        let end = times[iota] + interval.hi();
        let mut left_min = self.robustness(left, iota, star);
        let mut j = iota;
        while j < n && times[j] < start {
            left_min = left_min.min(self.robustness(left, j, star));
            j += 1;
        }
        let mut best = f64::NEG_INFINITY;
        while j < n && times[j] <= end {
            left_min = left_min.min(self.robustness(left, j, star));
            let right_value = self.robustness(right, j, star);
            best = best.max(left_min.min(right_value));
            j += 1;
        }
        best
    }

    /// Windowed extremum of a child formula at one base position.
    fn window_extremum_at(
        &mut self,
        interval: TimeInterval,
        child: &Formula,
        mode: Extremum,
        iota: usize,
        star: &FrozenStateVector,
    ) -> f64 {
        let seq = self.seq;
        let times = seq.times();
        let n = seq.len();
        let start = times[iota] + interval.lo();
        let end = times[iota] + interval.hi();
        let mut best = match mode {
            Extremum::Max => f64::NEG_INFINITY,
            Extremum::Min => f64::INFINITY,
        };
        let mut j = iota;
        while j < n && times[j] < start {
            j += 1;
        }
        while j < n && times[j] <= end {
            let value = self.robustness(child, j, star);
            best = match mode {
                Extremum::Max => best.max(value),
                Extremum::Min => best.min(value),
            };
            j += 1;
        }
        best
    }

    /// Discrete Boolean satisfaction with the same window discipline as the
    /// robustness recursion.
    fn satisfied(&mut self, phi: &Formula, iota: usize, star: &FrozenStateVector) -> bool {
        match phi.kind() {
            FormulaKind::True => true,
            FormulaKind::Pred(_) => {
                self.preds[&phi.id().get()].numerator(self.seq, iota, star) >= 0.0
            }
            FormulaKind::Not(p) => !self.satisfied(p, iota, star),
            FormulaKind::Or(l, r) => {
                self.satisfied(l, iota, star) || self.satisfied(r, iota, star)
            }
            FormulaKind::And(l, r) => {
                self.satisfied(l, iota, star) && self.satisfied(r, iota, star)
            }
            FormulaKind::Freeze(i, p) => {
                let star = star.store(*i, iota);
                self.satisfied(p, iota, &star)
            }
            FormulaKind::Until(interval, left, right) => {
                let times = self.seq.times();
                let n = self.seq.len();
                let start = times[iota] + interval.lo();
                let end = times[iota] + interval.hi();
                let mut left_holds = self.satisfied(left, iota, star);
                let mut j = iota;
                while j < n && times[j] < start {
                    left_holds = left_holds && self.satisfied(left, j, star);
                    j += 1;
                }
                let mut holds = false;
                while j < n && times[j] <= end {
                    left_holds = left_holds && self.satisfied(left, j, star);
                    if left_holds && self.satisfied(right, j, star) {
                        holds = true;
                        break;
                    }
                    if !left_holds {
                        break;
                    }
                    j += 1;
                }
                holds
            }
            FormulaKind::Eventually(interval, child) => {
                self.window_positions(*interval, iota)
                    .any(|j| self.satisfied_at(child, j, star))
            }
            FormulaKind::Globally(interval, child) => {
                self.window_positions(*interval, iota)
                    .all(|j| self.satisfied_at(child, j, star))
            }
        }
    }

    fn satisfied_at(&mut self, phi: &Formula, iota: usize, star: &FrozenStateVector) -> bool {
        self.satisfied(phi, iota, star)
    }

    fn window_positions(
        &self,
        interval: TimeInterval,
        iota: usize,
    ) -> impl Iterator<Item = usize> {
        let times = self.seq.times();
        let start = times[iota] + interval.lo();
        let end = times[iota] + interval.hi();
        let positions: Vec<usize> = (iota..times.len())
            .skip_while(|&j| times[j] < start)
            .take_while(|&j| times[j] <= end)
            .collect();
        positions.into_iter()
    }
}
