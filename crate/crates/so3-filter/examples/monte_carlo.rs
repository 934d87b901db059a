//! Monte Carlo evaluation of the benchmark scenario: per-trial seeds are
//! derived from the base seed, trials run in parallel, and the summary
//! aggregates transient and steady-state behavior.
//!
//!     cargo run --release --example monte_carlo [n_trials]

use so3_filter::sim::{monte_carlo, paper_scenario};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);

    let sc = paper_scenario();
    let summary = monte_carlo(&sc, n, 10);

    println!("{n} trials of the benchmark scenario (base seed {}):", sc.seed);
    println!("  failed trials: {}", summary.failures.len());
    let st = &summary.steady;
    println!("  steady mean dist          {:.4e} (sem {:.1e})", st.mean_dist, st.sem_dist);
    println!("  steady mean |b_tilde|     {:.4e}", st.mean_b_err);
    println!("  steady mean |sigma_tilde| {:.4e}", st.mean_s_err);
    println!("  steady mean-square (rho, b, sigma): {:.4e}", st.ms_combined);

    // the mean error trajectory across trials, decimated for the console
    println!("\nmean dist across trials:");
    let stride = (summary.times.len() / 20).max(1);
    for (t, d) in summary
        .times
        .iter()
        .zip(&summary.mean_dist)
        .step_by(stride)
    {
        println!("  t = {t:6.2} s   mean dist = {d:.4e}");
    }

    let worst_min = summary
        .per_trial_min_dist
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    println!("\nevery trial dipped below {worst_min:.1e} at some point");
}
