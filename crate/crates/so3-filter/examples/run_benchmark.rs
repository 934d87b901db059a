//! Run the built-in benchmark scenario once and plot the attitude error
//! decay as a crude console trace.
//!
//!     cargo run --release --example run_benchmark

use so3_filter::output;
use so3_filter::sim::{paper_scenario, run};

fn main() {
    let sc = paper_scenario();
    let log = run(&sc, 10).expect("benchmark scenario converges");

    println!("{}", output::run_summary(&sc, &log));

    // console trace of dist over time, log scale from 1 down to 1e-4
    println!("normalized attitude error |.|_I over time:");
    let cols = 64usize;
    let stride = (log.records.len() / 24).max(1);
    for rec in log.records.iter().step_by(stride) {
        let d = rec.dist_tilde.max(1e-4);
        let frac = (d.log10() + 4.0) / 4.0; // 1e-4 .. 1 -> 0 .. 1
        let n = ((cols as f64) * frac).round() as usize;
        println!("  t={:5.2}s |{}{}| {:.3e}", rec.t, "#".repeat(n), " ".repeat(cols - n), rec.dist_tilde);
    }

    let path = std::env::temp_dir().join("so3-filter-benchmark.csv");
    output::write_csv(&log, &path).expect("write csv");
    println!("\nfull trajectory written to {}", path.display());
}
