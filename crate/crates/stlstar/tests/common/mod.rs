//! Shared test support: an independent brute-force evaluator of the
//! robustness recursion, an equally direct Boolean evaluator, and seeded
//! random generation of formulas and sequences.
//!
//! The brute-force evaluators deliberately avoid everything the engine
//! uses for speed: no precomputation, no memo tables, no running minima,
//! no window deques. Every temporal value is an explicit scan and the
//! left-prefix minimum of until is recomputed from scratch per window
//! position (the O(n^3) triple loop).

#![allow(dead_code)]

use std::collections::BTreeMap;

use stlstar::formula::{Formula, FormulaKind, FrozenIndex, LinearPredicate, TimeInterval};
use stlstar::signal::TimedStateSequence;

/// Frozen positions as a plain map, independent of the engine's
/// representation. Missing entries mean position 0.
pub type Frozen = BTreeMap<u32, usize>;

fn pred_numerator(
    pred: &LinearPredicate,
    seq: &TimedStateSequence,
    iota: usize,
    frozen: &Frozen,
) -> f64 {
    let mut total = 0.0;
    for (block, name, coeff) in pred.terms() {
        let position = match block {
            None => iota,
            Some(index) => frozen.get(&index.get()).copied().unwrap_or(0),
        };
        let j = seq.variable_position(name).expect("variable present");
        total += coeff * seq.state(position)[j];
    }
    total + pred.offset()
}

fn pred_denominator(pred: &LinearPredicate) -> f64 {
    let mut total = 0.0_f64;
    let mut current_block: Option<Option<u32>> = None;
    let mut acc = 0.0_f64;
    for (block, _, coeff) in pred.terms() {
        let key = Some(block.map(FrozenIndex::get));
        if current_block != key {
            total += acc.sqrt();
            acc = 0.0;
            current_block = key;
        }
        acc += coeff * coeff;
    }
    total + acc.sqrt()
}

/// Sample positions whose timestamp lies in `[times[iota]+lo, times[iota]+hi]`.
fn window(seq: &TimedStateSequence, iota: usize, interval: TimeInterval) -> Vec<usize> {
    let times = seq.times();
    let start = times[iota] + interval.lo();
    let end = times[iota] + interval.hi();
    (0..times.len())
        .filter(|&p| times[p] >= start && times[p] <= end)
        .collect()
}

/// Brute-force robustness of the max/min recursion at an arbitrary sample
/// position and frozen assignment.
pub fn brute_robustness(
    phi: &Formula,
    seq: &TimedStateSequence,
    iota: usize,
    frozen: &Frozen,
) -> f64 {
    match phi.kind() {
        FormulaKind::True => f64::INFINITY,
        FormulaKind::Pred(p) => pred_numerator(p, seq, iota, frozen) / pred_denominator(p),
        FormulaKind::Not(p) => -brute_robustness(p, seq, iota, frozen),
        FormulaKind::Or(l, r) => brute_robustness(l, seq, iota, frozen)
            .max(brute_robustness(r, seq, iota, frozen)),
        FormulaKind::And(l, r) => brute_robustness(l, seq, iota, frozen)
            .min(brute_robustness(r, seq, iota, frozen)),
        FormulaKind::Freeze(i, p) => {
            let mut frozen = frozen.clone();
            frozen.insert(i.get(), iota);
            brute_robustness(p, seq, iota, &frozen)
        }
        FormulaKind::Until(interval, l, r) => {
            let mut best = f64::NEG_INFINITY;
            for p in window(seq, iota, *interval) {
                let right = brute_robustness(r, seq, p, frozen);
                let mut prefix = f64::INFINITY;
                for q in iota..=p {
                    prefix = prefix.min(brute_robustness(l, seq, q, frozen));
                }
                best = best.max(right.min(prefix));
            }
            best
        }
        FormulaKind::Eventually(interval, p) => window(seq, iota, *interval)
            .into_iter()
            .map(|k| brute_robustness(p, seq, k, frozen))
            .fold(f64::NEG_INFINITY, f64::max),
        FormulaKind::Globally(interval, p) => window(seq, iota, *interval)
            .into_iter()
            .map(|k| brute_robustness(p, seq, k, frozen))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Brute-force Boolean satisfaction of the discrete semantics.
pub fn brute_sat(phi: &Formula, seq: &TimedStateSequence, iota: usize, frozen: &Frozen) -> bool {
    match phi.kind() {
        FormulaKind::True => true,
        FormulaKind::Pred(p) => pred_numerator(p, seq, iota, frozen) >= 0.0,
        FormulaKind::Not(p) => !brute_sat(p, seq, iota, frozen),
        FormulaKind::Or(l, r) => {
            brute_sat(l, seq, iota, frozen) || brute_sat(r, seq, iota, frozen)
        }
        FormulaKind::And(l, r) => {
            brute_sat(l, seq, iota, frozen) && brute_sat(r, seq, iota, frozen)
        }
        FormulaKind::Freeze(i, p) => {
            let mut frozen = frozen.clone();
            frozen.insert(i.get(), iota);
            brute_sat(p, seq, iota, &frozen)
        }
        FormulaKind::Until(interval, l, r) => window(seq, iota, *interval).into_iter().any(|p| {
            brute_sat(r, seq, p, frozen) && (iota..=p).all(|q| brute_sat(l, seq, q, frozen))
        }),
        FormulaKind::Eventually(interval, p) => window(seq, iota, *interval)
            .into_iter()
            .any(|k| brute_sat(p, seq, k, frozen)),
        FormulaKind::Globally(interval, p) => window(seq, iota, *interval)
            .into_iter()
            .all(|k| brute_sat(p, seq, k, frozen)),
    }
}

pub fn brute_robustness_at_zero(phi: &Formula, seq: &TimedStateSequence) -> f64 {
    brute_robustness(phi, seq, 0, &Frozen::new())
}

pub fn brute_sat_at_zero(phi: &Formula, seq: &TimedStateSequence) -> bool {
    brute_sat(phi, seq, 0, &Frozen::new())
}

/// SplitMix64: tiny deterministic generator so corpus values never depend
/// on external crate versions.
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

/// Knobs for random formula generation.
pub struct GenConfig {
    /// Maximum number of operator nodes (anything above predicates/true).
    pub max_ops: usize,
    /// Largest frozen index that may appear.
    pub max_index: u32,
    /// Variable names predicates draw from.
    pub vars: Vec<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_ops: 4,
            max_index: 2,
            vars: vec!["x".into(), "y".into()],
        }
    }
}

fn random_interval(rng: &mut SplitMix) -> TimeInterval {
    let lo = [0.0, 0.0, 0.25, 0.5][rng.below(4)];
    let width = [0.25, 0.5, 1.0, 1.5][rng.below(4)];
    TimeInterval::new(lo, lo + width).unwrap()
}

fn random_pred(rng: &mut SplitMix, config: &GenConfig) -> Formula {
    const COEFFS: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    // sample distinct (block, var) slots so coefficients cannot cancel
    let mut slots: Vec<(Option<u32>, usize)> = Vec::new();
    for block in 0..=config.max_index {
        for var in 0..config.vars.len() {
            slots.push((if block == 0 { None } else { Some(block) }, var));
        }
    }
    let count = 1 + rng.below(3.min(slots.len()));
    let mut terms = Vec::new();
    for _ in 0..count {
        let slot = slots.swap_remove(rng.below(slots.len()));
        let index = slot.0.map(|b| FrozenIndex::new(b).unwrap());
        terms.push((index, config.vars[slot.1].clone(), COEFFS[rng.below(6)]));
    }
    let offset = (rng.range(-5.0, 5.0) * 4.0).round() / 4.0;
    Formula::pred(LinearPredicate::new(terms, offset).unwrap())
}

fn random_node(rng: &mut SplitMix, config: &GenConfig, budget: &mut usize) -> Formula {
    if *budget == 0 || rng.chance(0.25) {
        return if rng.chance(0.06) {
            Formula::truth()
        } else {
            random_pred(rng, config)
        };
    }
    *budget -= 1;
    match rng.below(7) {
        0 => Formula::not(random_node(rng, config, budget)),
        1 => Formula::or(
            random_node(rng, config, budget),
            random_node(rng, config, budget),
        ),
        2 => Formula::and(
            random_node(rng, config, budget),
            random_node(rng, config, budget),
        ),
        3 => Formula::until(
            random_interval(rng),
            random_node(rng, config, budget),
            random_node(rng, config, budget),
        ),
        4 => Formula::eventually(random_interval(rng), random_node(rng, config, budget)),
        5 => Formula::globally(random_interval(rng), random_node(rng, config, budget)),
        _ => Formula::freeze(
            FrozenIndex::new(1 + rng.below(config.max_index as usize) as u32).unwrap(),
            random_node(rng, config, budget),
        ),
    }
}

/// A random formula with at most `config.max_ops` operator nodes.
pub fn random_formula(rng: &mut SplitMix, config: &GenConfig) -> Formula {
    let mut budget = config.max_ops;
    random_node(rng, config, &mut budget)
}

/// A random sequence over the given variables, long enough for `phi`:
/// non-uniform timestamps rescaled so the duration exceeds the necessary
/// input length.
pub fn random_sequence(
    rng: &mut SplitMix,
    phi: &Formula,
    vars: &[String],
    max_samples: usize,
) -> TimedStateSequence {
    let n = 3 + rng.below(max_samples - 2);
    let mut times = vec![0.0];
    for _ in 1..n {
        let last = *times.last().unwrap();
        times.push(last + rng.range(0.05, 0.6));
    }
    let required = phi.necessary_length();
    let duration = *times.last().unwrap();
    if duration < required {
        let scale = (required + rng.range(0.1, 1.0)) / duration;
        for t in times.iter_mut() {
            *t *= scale;
        }
    }
    let states: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..vars.len()).map(|_| rng.range(-8.0, 8.0)).collect())
        .collect();
    TimedStateSequence::new(vars.to_vec(), times, states).unwrap()
}

/// A random formula/sequence pair ready for monitoring.
pub fn random_pair(rng: &mut SplitMix, config: &GenConfig) -> (Formula, TimedStateSequence) {
    let phi = random_formula(rng, config);
    let seq = random_sequence(rng, &phi, &config.vars, 30);
    (phi, seq)
}
