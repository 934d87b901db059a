//! Write a scenario file, parse it back, and run it: the same path the
//! `run --scenario` command takes.
//!
//!     cargo run --release --example custom_scenario

use so3_filter::output;
use so3_filter::scenario_file::parse_scenario_file;
use so3_filter::sim::run;

const SCENARIO: &str = "\
# slow tumble with moderate sensor noise and a quarter-turn initial error
sim.duration = 5.0
sim.dt = 0.001
sim.seed = 2718

truth.r0 = identity
estimate.r0 = angle_axis 90 0 1 0

omega.value = 0.3 -0.1 0.2

gyro.bias = 0.05 -0.02 0.03
gyro.q = 0.05 0.05 0.05

ref.1.inertial = 1 0 0
ref.1.noise_std = 0.05
ref.2.inertial = 0 1 0
ref.2.noise_std = 0.05
";

fn main() {
    let path = std::env::temp_dir().join("so3-filter-custom.scn");
    std::fs::write(&path, SCENARIO).expect("write scenario");
    println!("scenario file at {}:\n\n{SCENARIO}", path.display());

    let sc = parse_scenario_file(&path).expect("valid scenario");
    println!(
        "parsed: {} steps, {} references, gains (k_w, k_b, k_sigma, gamma, epsilon) = ({}, {}, {}, {}, {})",
        sc.steps(),
        sc.refs.len(),
        sc.gains.k_w,
        sc.gains.k_b,
        sc.gains.k_sigma,
        sc.gains.gamma,
        sc.gains.epsilon
    );

    let log = run(&sc, 10).expect("run");
    print!("\n{}", output::run_summary(&sc, &log));
}
