//! Map robustness over a box of model parameters: simulate a grid of
//! points, then adaptively subdivide where robustness is small or changes
//! sign. Writes `sweep.csv` and a `sweep.svg` scatter map (green positive,
//! orange negative, darker means larger magnitude).
//!
//! ```bash
//! cargo run --example parameter_sweep
//! ```

use std::path::Path;

use stlstar::formula::parse;
use stlstar::odesim::builtin;
use stlstar::sweep::{export, run_sweep, ParamAxis, PerturbationSpace, SimSettings, SweepOptions};

fn main() {
    let model = builtin("sir").unwrap();
    let phi = parse("F[1,5](I >= 50)").unwrap();
    let space = PerturbationSpace {
        axes: vec![
            ParamAxis {
                name: "alpha".into(),
                lo: 0.01,
                hi: 0.04,
                resolution: 9,
            },
            ParamAxis {
                name: "beta".into(),
                lo: 0.1,
                hi: 0.7,
                resolution: 9,
            },
        ],
        refine_cap: 2,
        threshold: None, // 10% of the initial grid's median |robustness|
    };
    let sim = SimSettings {
        init: vec![95.0, 5.0, 0.0],
        base_params: model.default_params().to_vec(),
        step: 0.02,
        horizon: 10.0,
    };
    let result = run_sweep(&model, &space, &phi, &sim, &SweepOptions::default()).unwrap();

    println!("formula: {}", result.formula);
    println!(
        "evaluated {} trajectories of {} samples in {:?}",
        result.points.len(),
        result.points_per_trajectory,
        result.elapsed
    );
    println!(
        "positive: {}  negative: {}  (refinement threshold {:.3})",
        result.positive_count(),
        result.negative_count(),
        result.threshold
    );
    let refined = result.points.iter().filter(|p| p.depth > 0).count();
    println!("refinement added {refined} points near the satisfaction boundary");

    let files = export(&result, Path::new("sweep-out")).unwrap();
    for file in files {
        println!("wrote {}", file.display());
    }
}
