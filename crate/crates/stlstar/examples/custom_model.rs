//! Define an ODE model from plain arithmetic expressions and monitor a
//! freeze formula against it. The same model shape can be loaded by the
//! CLI from the JSON config's inline `model` object.
//!
//! ```bash
//! cargo run --example custom_model
//! ```

use stlstar::formula::parse;
use stlstar::monitor::{boolean_monitor, monitor};
use stlstar::odesim::{integrate, OdeModel};

fn main() {
    // damped oscillator: x'' = -k*x - c*x' written as a first-order system
    let model = OdeModel::from_expressions(
        "damped_oscillator",
        vec![
            ("x".into(), "v".into(), 5.0),
            ("v".into(), "-k*x - c*v".into(), 0.0),
        ],
        vec![("k".into(), 1.0), ("c".into(), 0.15)],
    )
    .unwrap();

    // recurrence: from every point, about one period later the signal
    // returns to within 0.5 of the frozen value - holds for light damping,
    // fails when the amplitude decays too fast
    let recurrent = parse("G[0,10] * F[5.5,7](x - x* >= -0.5 && x* - x >= -0.5)").unwrap();
    println!("formula: {recurrent}");
    println!("necessary input length: {}", recurrent.necessary_length());

    for damping in [0.02, 0.15] {
        let trajectory =
            integrate(&model, &[5.0, 0.0], &[1.0, damping], 0.05, 30.0).unwrap();
        let rho = monitor(&recurrent, &trajectory).unwrap();
        let satisfied = boolean_monitor(&recurrent, &trajectory).unwrap();
        println!(
            "damping c = {damping:<5} -> robustness {rho:>8.4}, satisfied: {satisfied}"
        );
    }
}
