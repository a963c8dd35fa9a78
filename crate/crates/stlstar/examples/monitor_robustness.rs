//! Monitor a formula over a simulated epidemic trajectory.
//!
//! Robustness is a signed margin: positive means the property holds and
//! the trajectory could be disturbed by up to that amount (in sup-distance)
//! without changing the verdict; negative means it fails by that margin.
//!
//! ```bash
//! cargo run --example monitor_robustness
//! ```

use stlstar::formula::parse;
use stlstar::monitor::{boolean_monitor, format_robustness, monitor};
use stlstar::odesim::{builtin, integrate};

fn main() {
    // "within time 1 to 5, at least 50 individuals are infected"
    let phi = parse("F[1,5](I >= 50)").unwrap();
    println!("formula: {phi}");
    println!("necessary input length: {}", phi.necessary_length());

    let model = builtin("sir").unwrap();
    for (alpha, beta) in [(0.01, 0.1), (0.02, 0.3), (0.012, 0.6)] {
        let trajectory =
            integrate(&model, &[95.0, 5.0, 0.0], &[alpha, beta], 0.02, 10.0).unwrap();
        let rho = monitor(&phi, &trajectory).unwrap();
        let satisfied = boolean_monitor(&phi, &trajectory).unwrap();
        println!(
            "alpha = {alpha:<6} beta = {beta:<4} -> robustness {:>16}, satisfied: {satisfied}",
            format_robustness(rho)
        );
    }
}
