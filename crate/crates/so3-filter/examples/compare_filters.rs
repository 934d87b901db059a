//! Adaptive stochastic filter vs the classical deterministic baseline on
//! identical noise realizations.
//!
//!     cargo run --release --example compare_filters

use so3_filter::filter::FilterKind;
use so3_filter::output;
use so3_filter::sim::{paper_scenario, MonteCarloSummary, run_trials, Scenario};

fn main() {
    let base = paper_scenario();
    let n = 30;

    let mut summaries = Vec::new();
    for kind in [FilterKind::Stochastic, FilterKind::Baseline] {
        let sc = Scenario {
            filter_kind: kind,
            ..base.clone()
        };
        // trial seeds derive from the base seed, so both kinds see the
        // same gyro and body-vector noise
        summaries.push(MonteCarloSummary::from_trials(&run_trials(&sc, n, 10)));
    }

    print!("{}", output::compare_summary(&base, &summaries[0], &summaries[1]));

    println!("\nmean dist over time (stochastic vs baseline):");
    let stride = (summaries[0].times.len() / 16).max(1);
    for ((t, a), b) in summaries[0]
        .times
        .iter()
        .zip(&summaries[0].mean_dist)
        .zip(&summaries[1].mean_dist)
        .step_by(stride)
    {
        println!("  t = {t:6.2} s   {a:.4e}   {b:.4e}");
    }
}
