//! Scenario assembly, co-simulation of truth + gyro + filter, and Monte
//! Carlo aggregation.
//!
//! A [`Scenario`] is a complete, serializable description of one experiment;
//! [`run`] produces a decimated [`TrajectoryLog`] that is bit-identical for
//! identical `(seed, config)`. Trials of [`monte_carlo`] derive their seeds
//! from the scenario seed and run in parallel.

use rayon::prelude::*;

use crate::dynamics::{
    propagate_true, sample_gyro, sigma_of, AngularVelocitySignal, GyroModel, QSchedule,
    SigmaBound, TrueState,
};
use crate::error::{Error, Result};
use crate::filter::{
    baseline_step, diagnostics, error_triple, filter_step, FilterGains, FilterKind, FilterState,
};
use crate::measurement::{
    augment_cross, exact_frame, inertial_matrix, normalize_frame, synthesize_body, InertialMatrix,
    ReferenceVector, ReferenceVectorSet,
};
use crate::rng::RandomStream;
use crate::so3::{AngleAxis, RotationMatrix, Vector3};

/// Whether the Brownian gyro noise also perturbs the true rotation.
///
/// `Deterministic` treats the true rate as a known signal and lets noise
/// enter through the measurement only. `Diffused` applies the same sampled
/// increment to the true attitude that the gyro reports, so the noise is
/// physical motion jitter rather than pure sensor error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthNoise {
    Deterministic,
    Diffused,
}

/// Complete description of one simulation experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub duration: f64,
    pub dt: f64,
    pub omega_signal: AngularVelocitySignal,
    pub gyro: GyroModel,
    pub refs: ReferenceVectorSet,
    pub r0_true: RotationMatrix,
    pub r0_hat: RotationMatrix,
    pub gains: FilterGains,
    pub seed: u64,
    pub filter_kind: FilterKind,
    pub truth_noise: TruthNoise,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let steps_ok = self.dt.is_finite()
            && self.duration.is_finite()
            && self.dt > 0.0
            && self.duration >= self.dt;
        if !steps_ok {
            return Err(Error::InvalidConfig(format!(
                "need 0 < dt <= duration, got dt = {}, duration = {}",
                self.dt, self.duration
            )));
        }
        self.gyro.q.validate()?;
        self.gains.validate()?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        let n = self.duration / self.dt;
        if (n - n.round()).abs() < 1e-9 {
            n.round() as usize
        } else {
            n.ceil() as usize
        }
    }

    /// Stable FNV-1a hash of the canonical configuration string; ties a log
    /// or CSV file back to the exact configuration that produced it.
    pub fn config_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.canonical_string().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        h
    }

    fn canonical_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("duration={:?};dt={:?};", self.duration, self.dt));
        s.push_str(&format!("omega={:?};", self.omega_signal));
        s.push_str(&format!("gyro={:?};", self.gyro));
        for e in self.refs.entries() {
            s.push_str(&format!(
                "ref={:?},{:?},{:?},{:?};",
                e.inertial, e.body_bias, e.noise_std, e.weight
            ));
        }
        s.push_str(&format!(
            "r0={:?};rhat0={:?};",
            self.r0_true.matrix(),
            self.r0_hat.matrix()
        ));
        s.push_str(&format!("gains={:?};", self.gains));
        s.push_str(&format!(
            "kind={:?};truth_noise={:?};",
            self.filter_kind, self.truth_noise
        ));
        s
    }
}

/// Built-in benchmark scenario (`paper`).
///
/// Large initial attitude error just off the half-turn set, heavy gyro and
/// vector-measurement corruption, two non-collinear reference directions,
/// and the stock gain set. 10 s horizon at 1 ms steps.
pub fn paper_scenario() -> Scenario {
    let refs = ReferenceVectorSet::new(vec![
        ReferenceVector {
            inertial: Vector3::new(1.0, -1.0, 1.0) / 3.0_f64.sqrt(),
            body_bias: 0.1 * Vector3::new(-1.0, 1.0, 0.5),
            noise_std: 0.2,
            weight: 1.0,
        },
        ReferenceVector {
            inertial: Vector3::new(0.0, 0.0, 1.0),
            body_bias: 0.1 * Vector3::new(0.0, 0.0, 1.0),
            noise_std: 0.2,
            weight: 1.0,
        },
    ])
    .expect("benchmark reference set is valid");
    let r0_hat = RotationMatrix::from_angle_axis(
        &AngleAxis::from_axis(179.0_f64.to_radians(), Vector3::new(1.0, 5.0, 3.0))
            .expect("benchmark axis is valid"),
    );
    Scenario {
        duration: 10.0,
        dt: 1e-3,
        omega_signal: AngularVelocitySignal::SumOfSines {
            amp: Vector3::new(1.0, 0.7, 0.5),
            freq: Vector3::new(0.7, 0.5, 0.3),
            phase: Vector3::new(0.0, std::f64::consts::PI, std::f64::consts::FRAC_PI_3),
        },
        gyro: GyroModel {
            bias: 0.2 * Vector3::new(1.0, -1.0, 1.0),
            q: QSchedule::Constant(Vector3::new(0.2, 0.2, 0.2)),
        },
        refs,
        r0_true: RotationMatrix::identity(),
        r0_hat,
        gains: FilterGains::new(5.0, 0.5, 0.5, 1.0, 0.5).expect("benchmark gains are valid"),
        seed: 42,
        filter_kind: FilterKind::Stochastic,
        truth_noise: TruthNoise::Deterministic,
    }
}

/// One logged instant of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub t: f64,
    /// Normalized attitude error distance of `R Rhat^T`.
    pub dist_tilde: f64,
    /// Weighted matrix-space distance at the true error.
    pub dist_weighted: f64,
    /// Trace diagnostic at the true error.
    pub upsilon: f64,
    pub b_hat: Vector3,
    pub sigma_hat: Vector3,
    pub b_tilde: Vector3,
    pub sigma_tilde: Vector3,
    /// ZYX Euler angles of the truth, radians (gimbal band folded).
    pub euler_true: Vector3,
    /// ZYX Euler angles of the estimate, radians.
    pub euler_hat: Vector3,
    /// Adaptive potential value; NaN near half-turn errors.
    pub v_potential: f64,
}

/// Time series of one run plus its provenance.
#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub records: Vec<Record>,
    pub seed: u64,
    pub config_hash: u64,
    pub decimation: usize,
    pub steps: usize,
    /// Smallest covariance-estimate component seen anywhere in the run;
    /// negative excursions are expected and recorded, never clipped.
    pub sigma_hat_min: f64,
}

impl TrajectoryLog {
    pub fn initial(&self) -> &Record {
        self.records.first().expect("log is never empty")
    }

    pub fn last(&self) -> &Record {
        self.records.last().expect("log is never empty")
    }

    /// Records in the trailing `fraction` of the horizon.
    pub fn steady_window(&self, fraction: f64) -> &[Record] {
        let t_end = self.last().t;
        let t_from = t_end * (1.0 - fraction);
        let start = self.records.partition_point(|r| r.t < t_from);
        &self.records[start..]
    }

    pub fn steady_mean_dist(&self, fraction: f64) -> f64 {
        let w = self.steady_window(fraction);
        w.iter().map(|r| r.dist_tilde).sum::<f64>() / w.len() as f64
    }

    pub fn min_dist(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.dist_tilde)
            .fold(f64::INFINITY, f64::min)
    }
}

fn euler_or_fold(r: &RotationMatrix) -> Vector3 {
    match r.to_euler_zyx() {
        Ok(e) => e,
        Err(_) => {
            // gimbal band: fold roll into yaw by the usual convention
            let m = r.matrix();
            let pitch = std::f64::consts::FRAC_PI_2.copysign(-m[(2, 0)]);
            let yaw = (-m[(0, 1)]).atan2(m[(1, 1)]);
            Vector3::new(yaw, pitch, 0.0)
        }
    }
}

fn make_record(
    truth: &TrueState,
    state: &FilterState,
    mats: &InertialMatrix,
    sc: &Scenario,
    sigma_bound: &SigmaBound,
) -> Record {
    let err = error_triple(truth, state, &sc.gyro, sigma_bound);
    let diag = diagnostics(&err, mats, &sc.gains, truth.t);
    Record {
        t: truth.t,
        dist_tilde: err.r_tilde.ecl_dist(),
        dist_weighted: diag.dist_weighted,
        upsilon: diag.upsilon,
        b_hat: state.b_hat,
        sigma_hat: state.sigma_hat,
        b_tilde: err.b_tilde,
        sigma_tilde: err.sigma_tilde,
        euler_true: euler_or_fold(&truth.r),
        euler_hat: euler_or_fold(&state.r_hat),
        v_potential: diag.v_potential.unwrap_or(f64::NAN),
    }
}

/// Runs one scenario, logging every `decimation`-th step plus the final
/// state. Deterministic given `(scenario, decimation)`.
pub fn run(sc: &Scenario, decimation: usize) -> Result<TrajectoryLog> {
    sc.validate()?;
    if decimation == 0 {
        return Err(Error::InvalidConfig("decimation must be >= 1".into()));
    }
    let steps = sc.steps();
    let mut rng = RandomStream::from_seed(sc.seed);
    let sigma_bound = sigma_of(&sc.gyro.q, sc.duration, sc.dt);
    let mats = inertial_matrix(&exact_frame(&sc.r0_true, &sc.refs)?)?;

    let mut truth = TrueState {
        r: sc.r0_true,
        t: 0.0,
    };
    let mut state = FilterState::new(sc.r0_hat);
    let mut records = Vec::with_capacity(steps / decimation + 2);
    let mut sigma_hat_min = f64::INFINITY;

    for k in 0..steps {
        let t = k as f64 * sc.dt;
        let omega = sc.omega_signal.eval(t);

        // rng order per step is fixed: 3 gyro draws, then 3 per reference
        let (omega_m, truth_step) = match sc.truth_noise {
            TruthNoise::Deterministic => (
                sample_gyro(&sc.gyro, &omega, t, sc.dt, &mut rng),
                omega * sc.dt,
            ),
            TruthNoise::Diffused => {
                let noise = sc.gyro.q.eval(t).component_mul(&rng.normal_vector(1.0));
                (
                    omega + sc.gyro.bias + noise / sc.dt.sqrt(),
                    omega * sc.dt + noise * sc.dt.sqrt(),
                )
            }
        };
        let raw = synthesize_body(&truth.r, &sc.refs, &mut rng);

        let abort = |e: Error| Error::RunAborted {
            step: k,
            source: Box::new(e),
        };
        let frame = augment_cross(normalize_frame(&raw, &sc.refs).map_err(abort)?).map_err(abort)?;

        if k % decimation == 0 {
            records.push(make_record(&truth, &state, &mats, sc, &sigma_bound));
        }

        state = match sc.filter_kind {
            FilterKind::Stochastic => {
                filter_step(&state, &omega_m, &frame, &mats, &sc.gains, sc.dt).map_err(abort)?
            }
            FilterKind::Baseline => {
                baseline_step(&state, &omega_m, &frame, &sc.gains, sc.dt).map_err(abort)?
            }
        };
        sigma_hat_min = sigma_hat_min.min(state.sigma_hat.min());

        truth = match sc.truth_noise {
            TruthNoise::Deterministic => propagate_true(&truth, &omega, sc.dt),
            TruthNoise::Diffused => {
                let next = truth.r * RotationMatrix::exp(&truth_step);
                TrueState {
                    r: RotationMatrix::reproject(next.matrix()).unwrap_or(next),
                    t: truth.t + sc.dt,
                }
            }
        };
    }
    records.push(make_record(&truth, &state, &mats, sc, &sigma_bound));

    Ok(TrajectoryLog {
        records,
        seed: sc.seed,
        config_hash: sc.config_hash(),
        decimation,
        steps,
        sigma_hat_min,
    })
}

/// Runs `n` trials with derived seeds, in parallel; per-trial failures are
/// reported alongside the successes instead of aborting the batch.
pub fn run_trials(sc: &Scenario, n: usize, decimation: usize) -> Vec<(u64, Result<TrajectoryLog>)> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = RandomStream::derive(sc.seed, i);
            let trial = Scenario {
                seed,
                ..sc.clone()
            };
            (seed, run(&trial, decimation))
        })
        .collect()
}

/// Aggregate statistics over a Monte Carlo batch.
#[derive(Debug, Clone)]
pub struct MonteCarloSummary {
    pub n_trials: usize,
    /// `(trial index, error message)` of trials that aborted.
    pub failures: Vec<(usize, String)>,
    /// Logged times shared by all trials.
    pub times: Vec<f64>,
    pub mean_dist: Vec<f64>,
    pub ms_dist: Vec<f64>,
    pub mean_b_err: Vec<f64>,
    pub ms_b_err: Vec<f64>,
    pub mean_s_err: Vec<f64>,
    pub ms_s_err: Vec<f64>,
    pub per_trial_steady_mean_dist: Vec<f64>,
    pub per_trial_min_dist: Vec<f64>,
    /// Steady-state window statistics over the last 20% of the horizon.
    pub steady: SteadyStats,
}

/// Statistics over the trailing window of the horizon, across trials.
#[derive(Debug, Clone, Copy)]
pub struct SteadyStats {
    pub window_fraction: f64,
    pub mean_dist: f64,
    pub ms_dist: f64,
    pub mean_b_err: f64,
    pub mean_s_err: f64,
    /// Mean of `|rho|^2 + |b~|^2 + |sigma~|^2` over window and trials.
    pub ms_combined: f64,
    /// Standard error of the per-trial steady means.
    pub sem_dist: f64,
}

pub const STEADY_WINDOW_FRACTION: f64 = 0.2;

impl MonteCarloSummary {
    pub fn from_trials(trials: &[(u64, Result<TrajectoryLog>)]) -> Self {
        let logs: Vec<&TrajectoryLog> = trials
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .collect();
        let failures: Vec<(usize, String)> = trials
            .iter()
            .enumerate()
            .filter_map(|(i, (_, r))| r.as_ref().err().map(|e| (i, e.to_string())))
            .collect();
        assert!(!logs.is_empty(), "no successful trials to summarize");
        let len = logs[0].records.len();
        assert!(
            logs.iter().all(|l| l.records.len() == len),
            "trials logged different lengths"
        );

        let times: Vec<f64> = logs[0].records.iter().map(|r| r.t).collect();
        let n = logs.len() as f64;
        let mut mean_dist = vec![0.0; len];
        let mut ms_dist = vec![0.0; len];
        let mut mean_b_err = vec![0.0; len];
        let mut ms_b_err = vec![0.0; len];
        let mut mean_s_err = vec![0.0; len];
        let mut ms_s_err = vec![0.0; len];
        for log in &logs {
            for (i, r) in log.records.iter().enumerate() {
                let b = r.b_tilde.norm();
                let s = r.sigma_tilde.norm();
                mean_dist[i] += r.dist_tilde / n;
                ms_dist[i] += r.dist_tilde * r.dist_tilde / n;
                mean_b_err[i] += b / n;
                ms_b_err[i] += b * b / n;
                mean_s_err[i] += s / n;
                ms_s_err[i] += s * s / n;
            }
        }

        let per_trial_steady_mean_dist: Vec<f64> = logs
            .iter()
            .map(|l| l.steady_mean_dist(STEADY_WINDOW_FRACTION))
            .collect();
        let per_trial_min_dist: Vec<f64> = logs.iter().map(|l| l.min_dist()).collect();

        let mut w_dist = 0.0;
        let mut w_dist2 = 0.0;
        let mut w_b = 0.0;
        let mut w_s = 0.0;
        let mut w_combined = 0.0;
        let mut w_count = 0usize;
        for log in &logs {
            for r in log.steady_window(STEADY_WINDOW_FRACTION) {
                w_dist += r.dist_tilde;
                w_dist2 += r.dist_tilde * r.dist_tilde;
                w_b += r.b_tilde.norm();
                w_s += r.sigma_tilde.norm();
                // |rho|^2 = dist / (1 - dist); steady states sit far from 1
                let rho2 = if r.dist_tilde < 1.0 - 1e-9 {
                    r.dist_tilde / (1.0 - r.dist_tilde)
                } else {
                    f64::NAN
                };
                if rho2.is_finite() {
                    w_combined += rho2 + r.b_tilde.norm_squared() + r.sigma_tilde.norm_squared();
                    w_count += 1;
                }
            }
        }
        let w_total: usize = logs
            .iter()
            .map(|l| l.steady_window(STEADY_WINDOW_FRACTION).len())
            .sum();
        let mean_steady = w_dist / w_total as f64;
        let trial_mean = per_trial_steady_mean_dist.iter().sum::<f64>()
            / per_trial_steady_mean_dist.len() as f64;
        let trial_var = per_trial_steady_mean_dist
            .iter()
            .map(|m| (m - trial_mean) * (m - trial_mean))
            .sum::<f64>()
            / (per_trial_steady_mean_dist.len().max(2) - 1) as f64;
        let steady = SteadyStats {
            window_fraction: STEADY_WINDOW_FRACTION,
            mean_dist: mean_steady,
            ms_dist: w_dist2 / w_total as f64,
            mean_b_err: w_b / w_total as f64,
            mean_s_err: w_s / w_total as f64,
            ms_combined: w_combined / w_count.max(1) as f64,
            sem_dist: (trial_var / per_trial_steady_mean_dist.len() as f64).sqrt(),
        };

        MonteCarloSummary {
            n_trials: trials.len(),
            failures,
            times,
            mean_dist,
            ms_dist,
            mean_b_err,
            ms_b_err,
            mean_s_err,
            ms_s_err,
            per_trial_steady_mean_dist,
            per_trial_min_dist,
            steady,
        }
    }
}

/// Runs `n` derived-seed trials and summarizes them.
pub fn monte_carlo(sc: &Scenario, n: usize, decimation: usize) -> MonteCarloSummary {
    MonteCarloSummary::from_trials(&run_trials(sc, n, decimation))
}
