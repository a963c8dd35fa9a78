//! Sliding-window extrema over timestamped values with a monotone index
//! deque. Each value is pushed and popped at most once, so a full sweep is
//! linear in the input length regardless of window width.

use std::collections::VecDeque;

/// Which extremum a window sweep computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

impl Extremum {
    /// Identity element: the extremum of an empty window.
    fn empty(self) -> f64 {
        match self {
            Extremum::Min => f64::INFINITY,
            Extremum::Max => f64::NEG_INFINITY,
        }
    }

    fn dominates(self, winner: f64, loser: f64) -> bool {
        match self {
            Extremum::Min => winner <= loser,
            Extremum::Max => winner >= loser,
        }
    }
}

/// Core window sweep shared by the public operation and the monitor's
/// temporal fast path.
///
/// Emits one output per base position `i < emit`, holding the extremum of
/// `values[k]` over all `k` with `times[k]` in `[times[i]+lo, times[i]+hi]`.
/// A window containing no sample yields the identity element.
pub(crate) fn windowed_extrema(
    times: &[f64],
    values: &[f64],
    lo: f64,
    hi: f64,
    emit: usize,
    mode: Extremum,
) -> Vec<f64> {
    debug_assert_eq!(times.len(), values.len());
    debug_assert!(emit <= times.len());
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut upper = 0;
    let mut out = Vec::with_capacity(emit);
    for i in 0..emit {
        let start = times[i] + lo;
        let end = times[i] + hi;
        while upper < times.len() && times[upper] <= end {
            while let Some(&back) = deque.back() {
                if mode.dominates(values[upper], values[back]) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(upper);
            upper += 1;
        }
        while let Some(&front) = deque.front() {
            if times[front] < start {
                deque.pop_front();
            } else {
                break;
            }
        }
        out.push(deque.front().map_or(mode.empty(), |&k| values[k]));
    }
    out
}

/// Windowed minima or maxima of a timestamped value sequence.
///
/// `out[i]` is the extremum of `values[k]` over every `k` whose timestamp
/// lies in `[times[i]+lo, times[i]+hi]`; positions whose window would reach
/// past the final timestamp are not emitted.
pub fn sliding_extrema(
    values: &[f64],
    times: &[f64],
    window: (f64, f64),
    mode: Extremum,
) -> Vec<f64> {
    assert_eq!(
        values.len(),
        times.len(),
        "values and times must have equal length"
    );
    assert!(!times.is_empty(), "empty input");
    assert!(
        times.windows(2).all(|w| w[0] < w[1]),
        "times must be strictly increasing"
    );
    let (lo, hi) = window;
    let last = *times.last().unwrap();
    let emit = times.iter().take_while(|&&t| t + hi <= last).count();
    windowed_extrema(times, values, lo, hi, emit, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(values: &[f64], times: &[f64], lo: f64, hi: f64, mode: Extremum) -> Vec<f64> {
        let last = *times.last().unwrap();
        let mut out = Vec::new();
        for i in 0..times.len() {
            if times[i] + hi > last {
                break;
            }
            let mut best = mode.empty();
            for k in 0..times.len() {
                if times[k] >= times[i] + lo && times[k] <= times[i] + hi {
                    best = match mode {
                        Extremum::Min => best.min(values[k]),
                        Extremum::Max => best.max(values[k]),
                    };
                }
            }
            out.push(best);
        }
        out
    }

    #[test]
    fn window_max_example() {
        let values = [1.0, 3.0, 2.0];
        let times = [0.0, 1.0, 2.0];
        assert_eq!(
            sliding_extrema(&values, &times, (0.0, 1.0), Extremum::Max),
            vec![3.0, 3.0]
        );
    }

    #[test]
    fn whole_horizon_window_emits_only_first() {
        let values = [1.0, 5.0, 2.0];
        let times = [0.0, 1.0, 2.0];
        assert_eq!(
            sliding_extrema(&values, &times, (0.0, 2.0), Extremum::Max),
            vec![5.0]
        );
    }

    #[test]
    fn min_of_constant_is_constant() {
        let values = [4.0; 6];
        let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(
            sliding_extrema(&values, &times, (0.0, 2.0), Extremum::Min),
            vec![4.0; 4]
        );
    }

    #[test]
    fn empty_window_yields_identity() {
        // gap between samples larger than the window
        let values = [1.0, 2.0, 3.0];
        let times = [0.0, 10.0, 20.0];
        let out = sliding_extrema(&values, &times, (1.0, 2.0), Extremum::Max);
        assert_eq!(out, vec![f64::NEG_INFINITY, f64::NEG_INFINITY]);
    }

    #[test]
    fn matches_brute_force_on_irregular_grids() {
        // deterministic pseudo-random inputs, non-uniform timestamps
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let n = 2 + (next() * 40.0) as usize;
            let mut t = 0.0;
            let mut times = vec![0.0];
            for _ in 1..n {
                t += 0.1 + next();
                times.push(t);
            }
            let values: Vec<f64> = (0..n).map(|_| next() * 20.0 - 10.0).collect();
            let lo = next();
            let hi = lo + 0.1 + next() * 2.0;
            for mode in [Extremum::Min, Extremum::Max] {
                assert_eq!(
                    sliding_extrema(&values, &times, (lo, hi), mode),
                    brute(&values, &times, lo, hi, mode)
                );
            }
        }
    }
}
