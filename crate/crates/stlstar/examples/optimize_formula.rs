//! Rewrite a formula to use fewer frozen indices. Monitoring cost grows
//! exponentially in the number of indices, and predicates whose frozen
//! times always coincide also lose robustness through an inflated
//! denominator, so merging them helps twice.
//!
//! ```bash
//! cargo run --example optimize_formula
//! ```

use stlstar::formula::parse;
use stlstar::rewrite::optimize;

fn main() {
    // both freezes fire at the same instant, so one index suffices
    let badly_written = parse("G[0,10](*1 !*2 F[0,1](x*1 + x*2 >= x))").unwrap();
    let report = optimize(&badly_written);

    println!("original:  {}", report.input);
    println!("optimized: {}", report.output);
    println!(
        "frozen indices: {} -> {}",
        report.indices_before, report.indices_after
    );
    println!("pass chain:");
    for (pass, formula) in &report.steps {
        println!("  {pass:<28} {formula}");
    }

    // an already-minimal formula passes through unchanged
    let tight = parse("F[1,5](I >= 50 && * G[0.25,5](I* >= I))").unwrap();
    let report = optimize(&tight);
    println!();
    println!("already optimal: {}", report.output);
    println!(
        "frozen indices: {} -> {} ({} passes applied)",
        report.indices_before,
        report.indices_after,
        report.steps.len()
    );
}
