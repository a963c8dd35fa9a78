//! The monotone-deque window sweep behind `F`/`G`, shown standalone and as
//! the monitor's fast path on a long trajectory.
//!
//! ```bash
//! cargo run --release --example window_fast_path
//! ```

use std::time::Instant;

use stlstar::formula::parse;
use stlstar::monitor::{monitor, sliding_extrema, Extremum};
use stlstar::signal::TimedStateSequence;

fn main() {
    // windowed maxima over timestamped values
    let values = [1.0, 3.0, 2.0, 5.0, 4.0];
    let times = [0.0, 1.0, 2.0, 3.0, 4.0];
    let maxima = sliding_extrema(&values, &times, (0.0, 2.0), Extremum::Max);
    println!("values            {values:?}");
    println!("max over [t, t+2] {maxima:?}");

    // the same machinery makes nested F/G monitoring linear instead of
    // quadratic in the trajectory length
    let phi = parse("G[0,5]F[0,1](x >= 0)").unwrap();
    let seq = TimedStateSequence::sample(
        vec!["x".into()],
        |t| vec![(t * 0.37).sin() + 0.3 * (t * 2.11).cos()],
        0.01,
        1000.0,
    )
    .unwrap();
    println!("\nmonitoring {phi} over {} samples", seq.len());

    let started = Instant::now();
    let fast = monitor(&phi, &seq).unwrap();
    let fast_time = started.elapsed();
    println!("window fast path:    {fast:>9.6}  in {fast_time:?}");

    let desugared = phi.desugar();
    let started = Instant::now();
    let slow = monitor(&desugared, &seq).unwrap();
    let slow_time = started.elapsed();
    println!("desugared until:     {slow:>9.6}  in {slow_time:?}");
    assert_eq!(fast, slow);
    println!(
        "speedup: {:.0}x",
        slow_time.as_secs_f64() / fast_time.as_secs_f64()
    );
}
