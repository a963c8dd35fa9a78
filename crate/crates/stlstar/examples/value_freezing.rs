//! The freeze operator `*i` stores the evaluation time; predicates can
//! then compare the signal against its value at that stored time. This is
//! what lets a formula talk about growth relative to "now" or about local
//! maxima, which plain temporal operators cannot express.
//!
//! ```bash
//! cargo run --example value_freezing
//! ```

use stlstar::formula::parse;
use stlstar::monitor::{boolean_monitor, monitor};
use stlstar::signal::TimedStateSequence;

fn main() {
    // "within the next five time units, x increases by 8" - x* is the
    // value of x at the time the freeze was evaluated
    let growth = parse("* F[0,5](x >= x* + 8)").unwrap();

    let rising = TimedStateSequence::sample(
        vec!["x".into()],
        |t| vec![3.0 * t],
        0.5,
        5.0,
    )
    .unwrap();
    let flat = TimedStateSequence::sample(
        vec!["x".into()],
        |t| vec![(t * 1.3).sin()],
        0.5,
        5.0,
    )
    .unwrap();

    println!("formula: {growth}");
    for (name, seq) in [("rising ramp", &rising), ("small oscillation", &flat)] {
        println!(
            "  {name:<18} robustness = {:>8.4}  satisfied = {}",
            monitor(&growth, seq).unwrap(),
            boolean_monitor(&growth, seq).unwrap(),
        );
    }

    // "x reaches a local maximum above 4 within [0, 6]": after the frozen
    // time, x never exceeds the frozen value again for 2 time units
    let local_max = parse("F[0,6](x >= 4 && * G[0.25,2](x* >= x))").unwrap();
    let pulse = TimedStateSequence::sample(
        vec!["x".into()],
        |t| vec![6.0 * (-((t - 3.0) * (t - 3.0))).exp()],
        0.05,
        8.0,
    )
    .unwrap();
    let ramp = TimedStateSequence::sample(vec!["x".into()], |t| vec![t], 0.05, 8.0).unwrap();

    println!("formula: {local_max}");
    for (name, seq) in [("gaussian pulse", &pulse), ("monotone ramp", &ramp)] {
        println!(
            "  {name:<18} robustness = {:>8.4}  satisfied = {}",
            monitor(&local_max, seq).unwrap(),
            boolean_monitor(&local_max, seq).unwrap(),
        );
    }
}
