//! Trajectory CSV emission and parsing, plus run summaries.
//!
//! One CSV file per trial: an optional provenance comment (`# seed=...`),
//! a header, then one row per logged record. Values are printed with Rust's
//! shortest-round-trip float formatting, so parsing a file recovers the
//! emitted numbers exactly; the decimal separator is always `.` and rows end
//! with a bare LF. Euler angle columns are in degrees; everything else keeps
//! its internal unit (seconds, rad/s). `v_potential` is NaN on records where
//! the attitude error sat inside the half-turn guard band.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{
    MonteCarloSummary, Record, Scenario, TrajectoryLog, STEADY_WINDOW_FRACTION,
};

/// Column order of the trajectory CSV.
pub const CSV_COLUMNS: [&str; 23] = [
    "t",
    "dist_tilde",
    "dist_weighted",
    "upsilon",
    "bhat_x",
    "bhat_y",
    "bhat_z",
    "shat_x",
    "shat_y",
    "shat_z",
    "btilde_x",
    "btilde_y",
    "btilde_z",
    "stilde_x",
    "stilde_y",
    "stilde_z",
    "euler_true_yaw_deg",
    "euler_true_pitch_deg",
    "euler_true_roll_deg",
    "euler_hat_yaw_deg",
    "euler_hat_pitch_deg",
    "euler_hat_roll_deg",
    "v_potential",
];

/// Row values of one record, in file units (degrees for angles).
pub fn csv_row(r: &Record) -> [f64; 23] {
    [
        r.t,
        r.dist_tilde,
        r.dist_weighted,
        r.upsilon,
        r.b_hat.x,
        r.b_hat.y,
        r.b_hat.z,
        r.sigma_hat.x,
        r.sigma_hat.y,
        r.sigma_hat.z,
        r.b_tilde.x,
        r.b_tilde.y,
        r.b_tilde.z,
        r.sigma_tilde.x,
        r.sigma_tilde.y,
        r.sigma_tilde.z,
        r.euler_true.x.to_degrees(),
        r.euler_true.y.to_degrees(),
        r.euler_true.z.to_degrees(),
        r.euler_hat.x.to_degrees(),
        r.euler_hat.y.to_degrees(),
        r.euler_hat.z.to_degrees(),
        r.v_potential,
    ]
}

/// Renders a trajectory log as CSV text.
pub fn csv_string(log: &TrajectoryLog) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# seed={} config_hash={:016x} decimation={} steps={}",
        log.seed, log.config_hash, log.decimation, log.steps
    );
    s.push_str(&CSV_COLUMNS.join(","));
    s.push('\n');
    for r in &log.records {
        let row = csv_row(r);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v}");
        }
        s.push('\n');
    }
    s
}

/// Writes a trajectory log to `path`.
pub fn write_csv(log: &TrajectoryLog, path: &Path) -> Result<()> {
    fs::write(path, csv_string(log))?;
    Ok(())
}

/// Parsed CSV content.
#[derive(Debug, Clone)]
pub struct CsvData {
    pub seed: Option<u64>,
    pub config_hash: Option<u64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvData {
    /// Values of a named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parses CSV text produced by [`csv_string`].
pub fn parse_csv_str(text: &str) -> Result<CsvData> {
    let mut seed = None;
    let mut config_hash = None;
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                if let Some(v) = token.strip_prefix("seed=") {
                    seed = v.parse().ok();
                } else if let Some(v) = token.strip_prefix("config_hash=") {
                    config_hash = u64::from_str_radix(v, 16).ok();
                }
            }
            continue;
        }
        match &header {
            None => header = Some(line.split(',').map(str::to_string).collect()),
            Some(h) => {
                let row: std::result::Result<Vec<f64>, _> =
                    line.split(',').map(str::parse::<f64>).collect();
                let row = row.map_err(|e| Error::InvalidConfig(format!(
                    "CSV line {}: {e}",
                    i + 1
                )))?;
                if row.len() != h.len() {
                    return Err(Error::InvalidConfig(format!(
                        "CSV line {}: {} fields, header has {}",
                        i + 1,
                        row.len(),
                        h.len()
                    )));
                }
                rows.push(row);
            }
        }
    }
    Ok(CsvData {
        seed,
        config_hash,
        header: header.ok_or_else(|| Error::InvalidConfig("CSV has no header".into()))?,
        rows,
    })
}

/// Reads and parses a trajectory CSV.
pub fn read_csv(path: &Path) -> Result<CsvData> {
    parse_csv_str(&fs::read_to_string(path)?)
}

/// Human-readable summary of one run.
pub fn run_summary(sc: &Scenario, log: &TrajectoryLog) -> String {
    let steady = log.steady_window(STEADY_WINDOW_FRACTION);
    let mean =
        |f: &dyn Fn(&Record) -> f64| steady.iter().map(f).sum::<f64>() / steady.len() as f64;
    let mut s = String::new();
    let _ = writeln!(s, "seed            {}", log.seed);
    let _ = writeln!(s, "config hash     {:016x}", log.config_hash);
    let _ = writeln!(s, "filter          {:?}", sc.filter_kind);
    let _ = writeln!(
        s,
        "horizon         {} s, dt {} s, {} steps, {} records (decimation {})",
        sc.duration,
        sc.dt,
        log.steps,
        log.records.len(),
        log.decimation
    );
    let _ = writeln!(s, "initial dist    {:.6}", log.initial().dist_tilde);
    let _ = writeln!(s, "final dist      {:.6e}", log.last().dist_tilde);
    let _ = writeln!(
        s,
        "steady mean dist (last {:.0}%)    {:.6e}",
        100.0 * STEADY_WINDOW_FRACTION,
        mean(&|r| r.dist_tilde)
    );
    let _ = writeln!(
        s,
        "steady mean |b_tilde|            {:.6e}",
        mean(&|r| r.b_tilde.norm())
    );
    let _ = writeln!(
        s,
        "steady mean |sigma_tilde|        {:.6e}",
        mean(&|r| r.sigma_tilde.norm())
    );
    let _ = writeln!(s, "min sigma_hat component          {:.3e}", log.sigma_hat_min);
    s
}

/// Human-readable summary of a Monte Carlo batch.
pub fn mc_summary(sc: &Scenario, summary: &MonteCarloSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "base seed       {}", sc.seed);
    let _ = writeln!(s, "config hash     {:016x}", sc.config_hash());
    let _ = writeln!(s, "filter          {:?}", sc.filter_kind);
    let _ = writeln!(
        s,
        "trials          {} ({} failed)",
        summary.n_trials,
        summary.failures.len()
    );
    for (i, msg) in &summary.failures {
        let _ = writeln!(s, "  trial {i} failed: {msg}");
    }
    let st = &summary.steady;
    let _ = writeln!(
        s,
        "steady window (last {:.0}%):",
        100.0 * st.window_fraction
    );
    let _ = writeln!(
        s,
        "  mean dist           {:.6e}  (sem {:.1e})",
        st.mean_dist, st.sem_dist
    );
    let _ = writeln!(s, "  mean-square dist    {:.6e}", st.ms_dist);
    let _ = writeln!(s, "  mean |b_tilde|      {:.6e}", st.mean_b_err);
    let _ = writeln!(s, "  mean |sigma_tilde|  {:.6e}", st.mean_s_err);
    let _ = writeln!(
        s,
        "  mean-square (rho, b_tilde, sigma_tilde)  {:.6e}",
        st.ms_combined
    );
    let worst_min = summary
        .per_trial_min_dist
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let (lo, hi) = summary.per_trial_steady_mean_dist.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY),
        |(lo, hi), &m| (lo.min(m), hi.max(m)),
    );
    let _ = writeln!(s, "per-trial steady mean dist   [{lo:.3e}, {hi:.3e}]");
    let _ = writeln!(s, "worst per-trial min dist     {worst_min:.3e}");
    s
}

/// Side-by-side summary of the two filters on identical noise.
pub fn compare_summary(
    sc: &Scenario,
    stochastic: &MonteCarloSummary,
    baseline: &MonteCarloSummary,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "base seed       {}", sc.seed);
    let _ = writeln!(s, "trials          {}", stochastic.n_trials);
    let _ = writeln!(
        s,
        "{:<34}{:>16}{:>16}",
        "steady-window statistic", "stochastic", "baseline"
    );
    let rows: [(&str, f64, f64); 5] = [
        (
            "mean dist",
            stochastic.steady.mean_dist,
            baseline.steady.mean_dist,
        ),
        (
            "mean-square dist",
            stochastic.steady.ms_dist,
            baseline.steady.ms_dist,
        ),
        (
            "mean |b_tilde|",
            stochastic.steady.mean_b_err,
            baseline.steady.mean_b_err,
        ),
        (
            "mean |sigma_tilde|",
            stochastic.steady.mean_s_err,
            baseline.steady.mean_s_err,
        ),
        (
            "mean-square (rho, b, sigma)",
            stochastic.steady.ms_combined,
            baseline.steady.ms_combined,
        ),
    ];
    for (name, a, b) in rows {
        let _ = writeln!(s, "{name:<34}{a:>16.6e}{b:>16.6e}");
    }
    let _ = writeln!(
        s,
        "{:<34}{:>16}{:>16}",
        "failed trials",
        stochastic.failures.len(),
        baseline.failures.len()
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{paper_scenario, run};

    #[test]
    fn csv_round_trips_emitted_values() {
        let mut sc = paper_scenario();
        sc.duration = 0.05;
        let log = run(&sc, 5).unwrap();
        let text = csv_string(&log);
        assert!(!text.contains('\r'));
        let parsed = parse_csv_str(&text).unwrap();
        assert_eq!(parsed.seed, Some(log.seed));
        assert_eq!(parsed.config_hash, Some(log.config_hash));
        assert_eq!(parsed.header, CSV_COLUMNS);
        assert_eq!(parsed.rows.len(), log.records.len());
        for (row, rec) in parsed.rows.iter().zip(&log.records) {
            for (a, b) in row.iter().zip(csv_row(rec)) {
                // bit-exact round trip of every emitted value
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn summary_matches_recomputation_from_csv() {
        let mut sc = paper_scenario();
        sc.duration = 0.2;
        let log = run(&sc, 10).unwrap();
        let text = csv_string(&log);
        let parsed = parse_csv_str(&text).unwrap();
        let dist = parsed.column("dist_tilde").unwrap();
        let t = parsed.column("t").unwrap();
        let summary = run_summary(&sc, &log);

        let initial: f64 = summary
            .lines()
            .find(|l| l.starts_with("initial dist"))
            .unwrap()
            .split_whitespace()
            .last()
            .unwrap()
            .parse()
            .unwrap();
        assert!((initial - dist[0]).abs() < 1e-6);

        let t_end = *t.last().unwrap();
        let steady: Vec<f64> = t
            .iter()
            .zip(&dist)
            .filter(|(ti, _)| **ti >= t_end * 0.8)
            .map(|(_, d)| *d)
            .collect();
        let mean = steady.iter().sum::<f64>() / steady.len() as f64;
        let reported: f64 = summary
            .lines()
            .find(|l| l.starts_with("steady mean dist"))
            .unwrap()
            .split_whitespace()
            .last()
            .unwrap()
            .parse()
            .unwrap();
        assert!((reported / mean - 1.0).abs() < 1e-5);
    }
}
