//! Simulate the built-in population models and write their trajectories
//! as CSV.
//!
//! ```bash
//! cargo run --example simulate_models
//! ```

use stlstar::odesim::{builtin, integrate_default};

fn main() {
    let sir = builtin("sir").unwrap();
    let trajectory = integrate_default(&sir, 0.1, 10.0).unwrap();
    println!("# sir: {} samples", trajectory.len());
    let mut csv = Vec::new();
    trajectory.write_csv(&mut csv).unwrap();
    // print every tenth row to keep the demo short
    for (k, line) in String::from_utf8(csv).unwrap().lines().enumerate() {
        if k == 0 || k % 10 == 0 {
            println!("{line}");
        }
    }

    let lv = builtin("lotka_volterra").unwrap();
    let trajectory = integrate_default(&lv, 1.0, 120.0).unwrap();
    println!("\n# lotka_volterra: {} samples", trajectory.len());
    let x = trajectory.variable_position("X").unwrap();
    let y = trajectory.variable_position("Y").unwrap();
    for k in (0..trajectory.len()).step_by(10) {
        let state = trajectory.state(k);
        println!(
            "t = {:>5}  prey {:>8.2}  predators {:>8.2}",
            trajectory.times()[k],
            state[x],
            state[y]
        );
    }
}
