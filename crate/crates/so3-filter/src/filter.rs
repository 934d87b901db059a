//! Adaptive stochastic attitude filter and its deterministic baseline.
//!
//! The estimator carries a rotation estimate `R_hat`, a gyro-bias estimate
//! `b_hat`, and an estimate `sigma_hat` of the per-axis bound on the squared
//! gyro-noise diffusion. All three are driven by quantities reconstructed
//! from vector measurements alone ([`crate::measurement`]): the correction
//! vector `phi`, the weighted distance `dist`, and the trace diagnostic
//! `upsilon`.
//!
//! Continuous-time laws, with `lam` the minimum singular value of the
//! alignment complement and `u = 1 + upsilon`:
//!
//! ```text
//! dR_hat/dt     = R_hat [omega_m - b_hat]x + [W]x R_hat
//! db_hat/dt     = -gamma dist R_hat^T phi - gamma k_b b_hat
//! dsigma_hat/dt = (gamma dist / (lam u)) (R_hat^T phi)^2 - gamma k_s sigma_hat
//! W             = (k_w / (eps lam)) ((u^2 lam^2 + 1) / u) phi
//!               + R_hat ((R_hat^T phi) . sigma_hat) / (lam u)
//! ```
//!
//! where `(.)^2` and `.` act componentwise. The `1/u` factors blow up as the
//! attitude error approaches a half-turn, which is what kicks the estimate
//! off the unstable set; the laws are undefined on the set itself, so every
//! step guards `|u| >= 1e-6` and fails with
//! [`Error::NearUnstableSet`] instead of
//! clamping. Noise-free measurements keep `u >= 0`; noisy frames can push
//! the reconstructed `u` slightly negative near the set, which the update
//! survives (one sign-flipped high-gain step), so only the degenerate
//! divisor itself is an error.
//!
//! Discretization: one step advances the rotation by the exact exponentials
//! `R_hat <- exp([W dt]x) R_hat exp([(omega_m - b_hat) dt]x)` (inertial-side
//! correction on the left, body-side rates on the right, matching the
//! continuous law) followed by a polar reprojection; `b_hat` and `sigma_hat`
//! use explicit Euler at the same step, which is adequate because their
//! dynamics are slow compared to the attitude loop.
//!
//! [`baseline_step`] is the classical deterministic observer derived from
//! the quadratic attitude potential: the same structure with `W = k_w phi`
//! and no covariance adaptation. The quadratic potential fixes the
//! correction shape but not the gain arrangement; the pairing used here
//! mirrors the adaptive filter minus its upsilon-shaped gain and
//! `sigma_hat` path, so the two are comparable on identical noise.
//!
//! `sigma_hat` is deliberately not clamped to the non-negative orthant: the
//! driving term is componentwise non-negative but the leakage can push
//! transients below zero, and runs record the excursion instead of hiding it.

use crate::dynamics::{GyroModel, SigmaBound, TrueState};
use crate::error::{Error, Result};
use crate::measurement::{
    dist_from_vectors, phi_from_vectors, upsilon_from_vectors, InertialMatrix, MeasurementFrame,
};
use crate::so3::{vex_antisym, Matrix3, RodriguezVector, RotationMatrix, Vector3};

/// Smallest allowed `1 + upsilon` before a step refuses to proceed.
pub const UNSTABLE_GUARD: f64 = 1e-6;

/// Strictly positive filter gains; `2 k_w > 1` is additionally required.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterGains {
    pub k_w: f64,
    pub k_b: f64,
    pub k_sigma: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl FilterGains {
    pub fn new(k_w: f64, k_b: f64, k_sigma: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        let gains = Self {
            k_w,
            k_b,
            k_sigma,
            gamma,
            epsilon,
        };
        gains.validate()?;
        Ok(gains)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_w", self.k_w),
            ("k_b", self.k_b),
            ("k_sigma", self.k_sigma),
            ("gamma", self.gamma),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "gain {name} must be strictly positive, got {v}"
                )));
            }
        }
        if 2.0 * self.k_w <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "need 2 k_w > 1, got k_w = {}",
                self.k_w
            )));
        }
        Ok(())
    }
}

/// Estimator state.
#[derive(Debug, Clone, Copy)]
pub struct FilterState {
    pub r_hat: RotationMatrix,
    pub b_hat: Vector3,
    pub sigma_hat: Vector3,
}

impl FilterState {
    /// Zero bias and covariance estimates at the given initial attitude.
    pub fn new(r_hat: RotationMatrix) -> Self {
        Self {
            r_hat,
            b_hat: Vector3::zeros(),
            sigma_hat: Vector3::zeros(),
        }
    }
}

/// Which estimator a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Stochastic,
    Baseline,
}

/// Measurement-space inputs of one filter step.
#[derive(Debug, Clone, Copy)]
pub struct Signals {
    pub phi: Vector3,
    pub dist: f64,
    pub upsilon: f64,
}

impl Signals {
    /// Reconstruct all three signals from one frame.
    pub fn from_frame(frame: &MeasurementFrame, r_hat: &RotationMatrix) -> Result<Self> {
        Ok(Self {
            phi: phi_from_vectors(frame, r_hat),
            dist: dist_from_vectors(frame, r_hat),
            upsilon: upsilon_from_vectors(frame, r_hat)?,
        })
    }

    fn guarded_one_plus_upsilon(&self) -> Result<f64> {
        // noise-free, upsilon >= -1 with equality exactly on the unstable
        // set; noisy frames can push the reconstruction below -1 near it,
        // which leaves the update defined (sign-flipped gain), so only a
        // degenerate divisor is refused
        let one_plus = 1.0 + self.upsilon;
        if one_plus.abs() < UNSTABLE_GUARD {
            return Err(Error::NearUnstableSet {
                one_plus_upsilon: one_plus,
            });
        }
        Ok(one_plus)
    }
}

fn attitude_gain(one_plus_upsilon: f64, lambda_min: f64, gains: &FilterGains) -> f64 {
    gains.k_w / (gains.epsilon * lambda_min)
        * ((one_plus_upsilon * one_plus_upsilon * lambda_min * lambda_min + 1.0)
            / one_plus_upsilon)
}

fn correction_from_signals(
    signals: &Signals,
    state: &FilterState,
    mats: &InertialMatrix,
    gains: &FilterGains,
) -> Result<Vector3> {
    let u = signals.guarded_one_plus_upsilon()?;
    let lam = mats.lambda_min;
    let body_phi = state.r_hat.transpose() * signals.phi;
    let shaped = state.r_hat * body_phi.component_mul(&state.sigma_hat);
    Ok(attitude_gain(u, lam, gains) * signals.phi + shaped / (lam * u))
}

fn bias_rate_from_signals(
    signals: &Signals,
    state: &FilterState,
    gains: &FilterGains,
) -> Vector3 {
    let body_phi = state.r_hat.transpose() * signals.phi;
    -gains.gamma * signals.dist * body_phi - gains.gamma * gains.k_b * state.b_hat
}

fn sigma_rate_from_signals(
    signals: &Signals,
    state: &FilterState,
    mats: &InertialMatrix,
    gains: &FilterGains,
) -> Result<Vector3> {
    let u = signals.guarded_one_plus_upsilon()?;
    let body_phi = state.r_hat.transpose() * signals.phi;
    let drive = (gains.gamma * signals.dist / (mats.lambda_min * u))
        * body_phi.component_mul(&body_phi);
    Ok(drive - gains.gamma * gains.k_sigma * state.sigma_hat)
}

/// Correction rate `W` of the stochastic filter.
pub fn correction_w(
    frame: &MeasurementFrame,
    state: &FilterState,
    mats: &InertialMatrix,
    gains: &FilterGains,
) -> Result<Vector3> {
    let signals = Signals::from_frame(frame, &state.r_hat)?;
    correction_from_signals(&signals, state, mats, gains)
}

/// Gyro-bias estimate rate; decays by leakage when the correction vanishes.
pub fn bias_update(
    frame: &MeasurementFrame,
    state: &FilterState,
    gains: &FilterGains,
) -> Result<Vector3> {
    let signals = Signals::from_frame(frame, &state.r_hat)?;
    Ok(bias_rate_from_signals(&signals, state, gains))
}

/// Covariance-bound estimate rate; the driving term is componentwise
/// non-negative whenever the guard holds.
pub fn sigma_update(
    frame: &MeasurementFrame,
    state: &FilterState,
    mats: &InertialMatrix,
    gains: &FilterGains,
) -> Result<Vector3> {
    let signals = Signals::from_frame(frame, &state.r_hat)?;
    sigma_rate_from_signals(&signals, state, mats, gains)
}

fn integrate(
    state: &FilterState,
    omega_m: &Vector3,
    w: &Vector3,
    bias_rate: &Vector3,
    sigma_rate: &Vector3,
    dt: f64,
) -> Result<FilterState> {
    let left = RotationMatrix::exp(&(w * dt));
    let right = RotationMatrix::exp(&((omega_m - state.b_hat) * dt));
    let r_next = RotationMatrix::reproject((left * state.r_hat * right).matrix())?;
    Ok(FilterState {
        r_hat: r_next,
        b_hat: state.b_hat + bias_rate * dt,
        sigma_hat: state.sigma_hat + sigma_rate * dt,
    })
}

/// One step of the stochastic filter.
pub fn filter_step(
    state: &FilterState,
    omega_m: &Vector3,
    frame: &MeasurementFrame,
    mats: &InertialMatrix,
    gains: &FilterGains,
    dt: f64,
) -> Result<FilterState> {
    let signals = Signals::from_frame(frame, &state.r_hat)?;
    let w = correction_from_signals(&signals, state, mats, gains)?;
    let bias_rate = bias_rate_from_signals(&signals, state, gains);
    let sigma_rate = sigma_rate_from_signals(&signals, state, mats, gains)?;
    integrate(state, omega_m, &w, &bias_rate, &sigma_rate, dt)
}

/// One step of the deterministic baseline (`W = k_w phi`, frozen
/// `sigma_hat`); same integration and guard as [`filter_step`].
pub fn baseline_step(
    state: &FilterState,
    omega_m: &Vector3,
    frame: &MeasurementFrame,
    gains: &FilterGains,
    dt: f64,
) -> Result<FilterState> {
    let signals = Signals::from_frame(frame, &state.r_hat)?;
    signals.guarded_one_plus_upsilon()?;
    let w = gains.k_w * signals.phi;
    let bias_rate = bias_rate_from_signals(&signals, state, gains);
    integrate(state, omega_m, &w, &bias_rate, &Vector3::zeros(), dt)
}

/// Attitude, bias, and covariance-bound errors against the truth.
#[derive(Debug, Clone, Copy)]
pub struct ErrorTriple {
    /// `Rt = R R_hat^T`.
    pub r_tilde: RotationMatrix,
    /// Rodriguez vector of `r_tilde`; `None` within the half-turn guard band.
    pub rho_tilde: Option<RodriguezVector>,
    pub b_tilde: Vector3,
    pub sigma_tilde: Vector3,
}

/// All error quantities of a state against the simulated truth.
pub fn error_triple(
    truth: &TrueState,
    state: &FilterState,
    gyro: &GyroModel,
    sigma: &SigmaBound,
) -> ErrorTriple {
    let r_tilde = truth.r * state.r_hat.transpose();
    ErrorTriple {
        r_tilde,
        rho_tilde: r_tilde.to_rodriguez().ok(),
        b_tilde: gyro.bias - state.b_hat,
        sigma_tilde: sigma.sigma - state.sigma_hat,
    }
}

/// Runtime diagnostic value of the adaptive potential:
/// `(rho^T Mbar rho / (1 + |rho|^2))^2 / 4 + |b~|^2 / 2 gamma + |s~|^2 / 2 gamma`.
pub fn potential_v(err: &ErrorTriple, mats: &InertialMatrix, gains: &FilterGains) -> Result<f64> {
    let rho = err.rho_tilde.ok_or(Error::RhoUnavailable)?;
    let quad = rho.0.dot(&(mats.m_bar * rho.0)) / (1.0 + rho.norm_squared());
    Ok(0.25 * quad * quad
        + err.b_tilde.norm_squared() / (2.0 * gains.gamma)
        + err.sigma_tilde.norm_squared() / (2.0 * gains.gamma))
}

/// Matrix-space diagnostics of one instant, for logging.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticSample {
    pub t: f64,
    /// `None` when the Rodriguez error is unavailable near a half-turn.
    pub v_potential: Option<f64>,
    pub dist_weighted: f64,
    pub upsilon: f64,
    pub phi_vec: Vector3,
}

/// Evaluates the matrix-space diagnostics at the true error.
pub fn diagnostics(
    err: &ErrorTriple,
    mats: &InertialMatrix,
    gains: &FilterGains,
    t: f64,
) -> DiagnosticSample {
    let m_rt = mats.m * err.r_tilde.matrix();
    DiagnosticSample {
        t,
        v_potential: potential_v(err, mats, gains).ok(),
        dist_weighted: 0.25 * (mats.m * (Matrix3::identity() - err.r_tilde.matrix())).trace(),
        upsilon: (mats.inverse() * m_rt).trace(),
        phi_vec: vex_antisym(&m_rt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::QSchedule;
    use crate::measurement::{exact_frame, inertial_matrix};
    use crate::rng::RandomStream;
    use crate::sim::paper_scenario;
    use crate::so3::{self, AngleAxis};
    use crate::verify::sample;

    fn fixture() -> (crate::measurement::ReferenceVectorSet, FilterGains) {
        let sc = paper_scenario();
        (sc.refs, sc.gains)
    }

    #[test]
    fn gains_validation() {
        assert!(FilterGains::new(5.0, 0.5, 0.5, 1.0, 0.5).is_ok());
        assert!(FilterGains::new(0.4, 0.5, 0.5, 1.0, 0.5).is_err()); // 2 k_w <= 1
        assert!(FilterGains::new(5.0, 0.0, 0.5, 1.0, 0.5).is_err());
        assert!(FilterGains::new(5.0, 0.5, 0.5, -1.0, 0.5).is_err());
    }

    #[test]
    fn correction_vanishes_at_perfect_estimate() {
        let (refs, gains) = fixture();
        let mut rng = RandomStream::from_seed(20);
        let r = sample::rotation(&mut rng);
        let frame = exact_frame(&r, &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();
        let state = FilterState::new(r);
        let w = correction_w(&frame, &state, &mats, &gains).unwrap();
        assert!(w.norm() < 1e-12);
    }

    #[test]
    fn correction_matches_term_by_term_expansion() {
        let (refs, gains) = fixture();
        let mut rng = RandomStream::from_seed(21);
        for _ in 0..100 {
            let r = sample::rotation(&mut rng);
            let r_hat = sample::rotation(&mut rng);
            if 1.0 + (r * r_hat.transpose()).trace() < 0.05 {
                continue;
            }
            let frame = exact_frame(&r, &refs).unwrap();
            let mats = inertial_matrix(&frame).unwrap();
            let mut state = FilterState::new(r_hat);
            state.sigma_hat = sample::vector(&mut rng, 0.3);

            let w = correction_w(&frame, &state, &mats, &gains).unwrap();

            // independent evaluation from matrix-space primitives
            let r_tilde = r * r_hat.transpose();
            let phi = so3::vex_antisym(&(mats.m * r_tilde.matrix()));
            let ups = (mats.inverse() * mats.m * r_tilde.matrix()).trace();
            let u = 1.0 + ups;
            let lam = mats.lambda_min;
            let first = gains.k_w / (gains.epsilon * lam) * ((u * u * lam * lam + 1.0) / u) * phi;
            let body_phi = r_hat.transpose() * phi;
            let second = r_hat * body_phi.component_mul(&state.sigma_hat) / (lam * u);
            assert!(
                (w - (first + second)).norm() < 1e-9 * (1.0 + w.norm()),
                "w mismatch: {w:?}"
            );

            // with zero sigma_hat the correction is parallel to phi
            state.sigma_hat = Vector3::zeros();
            let w0 = correction_w(&frame, &state, &mats, &gains).unwrap();
            assert!((w0 - attitude_gain(u, lam, &gains) * phi).norm() < 1e-9 * (1.0 + w0.norm()));
        }
    }

    #[test]
    fn attitude_gain_at_aligned_limit() {
        // at upsilon = 3 (zero error) the leading gain reduces to
        // k_w / (eps lam) * (16 lam^2 + 1) / 4
        let gains = FilterGains::new(5.0, 0.5, 0.5, 1.0, 0.5).unwrap();
        let mut rng = RandomStream::from_seed(22);
        for _ in 0..20 {
            let lam = rng.uniform(0.5, 2.0);
            let expected = (5.0 / (0.5 * lam)) * (16.0 * lam * lam + 1.0) / 4.0;
            assert!((attitude_gain(4.0, lam, &gains) - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn bias_rate_cases() {
        let (refs, gains) = fixture();
        let mut rng = RandomStream::from_seed(23);
        let r = sample::rotation(&mut rng);
        let frame = exact_frame(&r, &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();

        // perfect estimate, zero bias estimate: no drive
        let state = FilterState::new(r);
        assert!(bias_update(&frame, &state, &gains).unwrap().norm() < 1e-12);

        // perfect estimate (phi = 0) with b_hat = v: pure leakage
        let mut state = FilterState::new(r);
        state.b_hat = Vector3::new(0.2, -0.1, 0.4);
        let rate = bias_update(&frame, &state, &gains).unwrap();
        assert!((rate + gains.gamma * gains.k_b * state.b_hat).norm() < 1e-12);

        // random pose error: term-by-term oracle
        for _ in 0..50 {
            let r_hat = sample::rotation(&mut rng);
            let mut state = FilterState::new(r_hat);
            state.b_hat = sample::vector(&mut rng, 0.5);
            let got = bias_update(&frame, &state, &gains).unwrap();
            let r_tilde = r * r_hat.transpose();
            let phi = so3::vex_antisym(&(mats.m * r_tilde.matrix()));
            let dist = so3::weighted_dist(&mats.m, &r_tilde).unwrap();
            let oracle = -gains.gamma * dist * (r_hat.transpose() * phi)
                - gains.gamma * gains.k_b * state.b_hat;
            assert!((got - oracle).norm() < 1e-10);
        }
    }

    #[test]
    fn sigma_rate_cases() {
        let (refs, gains) = fixture();
        let mut rng = RandomStream::from_seed(24);
        let r = sample::rotation(&mut rng);
        let frame = exact_frame(&r, &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();

        let state = FilterState::new(r);
        assert!(sigma_update(&frame, &state, &mats, &gains).unwrap().norm() < 1e-12);

        let mut state = FilterState::new(r);
        state.sigma_hat = Vector3::new(0.1, 0.2, -0.05);
        let rate = sigma_update(&frame, &state, &mats, &gains).unwrap();
        assert!((rate + gains.gamma * gains.k_sigma * state.sigma_hat).norm() < 1e-12);
    }

    #[test]
    fn sigma_drive_is_componentwise_nonnegative() {
        let (refs, gains) = fixture();
        let mut rng = RandomStream::from_seed(25);
        let mut checked = 0usize;
        while checked < 10_000 {
            let r = sample::rotation(&mut rng);
            let r_hat = sample::rotation(&mut rng);
            if 1.0 + (r * r_hat.transpose()).trace() < UNSTABLE_GUARD * 4.0 {
                continue;
            }
            let frame = exact_frame(&r, &refs).unwrap();
            let mats = inertial_matrix(&frame).unwrap();
            let state = FilterState::new(r_hat); // sigma_hat = 0 isolates the drive
            let rate = sigma_update(&frame, &state, &mats, &gains).unwrap();
            for i in 0..3 {
                assert!(rate[i] >= -1e-15, "component {i} negative: {}", rate[i]);
            }
            checked += 1;
        }
    }

    #[test]
    fn fixed_point_at_origin() {
        let (refs, gains) = fixture();
        let r = RotationMatrix::identity();
        let frame = exact_frame(&r, &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();
        let state = FilterState::new(r);
        let next = filter_step(&state, &Vector3::zeros(), &frame, &mats, &gains, 1e-3).unwrap();
        assert!(so3::max_abs_entry(&(next.r_hat.matrix() - state.r_hat.matrix())) < 1e-14);
        assert_eq!(next.b_hat, Vector3::zeros());
        assert_eq!(next.sigma_hat, Vector3::zeros());
    }

    #[test]
    fn near_unstable_set_is_an_error() {
        let (refs, gains) = fixture();
        let r = RotationMatrix::identity();
        let frame = exact_frame(&r, &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();
        // estimate exactly a half-turn away: 1 + upsilon == 0
        let r_hat = RotationMatrix::from_angle_axis(
            &AngleAxis::new(std::f64::consts::PI, Vector3::z()).unwrap(),
        );
        let state = FilterState::new(r_hat);
        let got = filter_step(&state, &Vector3::zeros(), &frame, &mats, &gains, 1e-3);
        assert!(matches!(got, Err(Error::NearUnstableSet { .. })));
        let got = baseline_step(&state, &Vector3::zeros(), &frame, &gains, 1e-3);
        assert!(matches!(got, Err(Error::NearUnstableSet { .. })));
    }

    #[test]
    fn leakage_decay_matches_exponential() {
        // with phi forced to zero both adaptive states decay as exp(-gamma k t)
        let gains = FilterGains::new(5.0, 0.5, 0.5, 1.0, 0.5).unwrap();
        let signals = Signals {
            phi: Vector3::zeros(),
            dist: 0.0,
            upsilon: 3.0,
        };
        let refs = paper_scenario().refs;
        let frame = exact_frame(&RotationMatrix::identity(), &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();
        let mut state = FilterState::new(RotationMatrix::identity());
        state.b_hat = Vector3::new(1.0, -2.0, 0.5);
        state.sigma_hat = Vector3::new(0.3, 0.1, 0.7);
        let b0 = state.b_hat;
        let s0 = state.sigma_hat;
        let dt = 1e-3;
        let tc = 1.0 / (gains.gamma * gains.k_b); // = 1 / (gamma k_sigma) here too
        let steps = (5.0 * tc / dt).round() as usize;
        for _ in 0..steps {
            let db = bias_rate_from_signals(&signals, &state, &gains);
            let ds = sigma_rate_from_signals(&signals, &state, &mats, &gains).unwrap();
            state.b_hat += db * dt;
            state.sigma_hat += ds * dt;
        }
        let expected = (-5.0_f64).exp();
        for i in 0..3 {
            assert!(
                (state.b_hat[i] / (b0[i] * expected) - 1.0).abs() < 0.01,
                "b axis {i}"
            );
            assert!(
                (state.sigma_hat[i] / (s0[i] * expected) - 1.0).abs() < 0.01,
                "sigma axis {i}"
            );
        }
    }

    #[test]
    fn error_triple_cases() {
        let sc = paper_scenario();
        let gyro = GyroModel {
            bias: Vector3::new(0.2, -0.2, 0.2),
            q: QSchedule::Constant(Vector3::new(0.2, 0.2, 0.2)),
        };
        let bound = SigmaBound {
            sigma: Vector3::new(0.04, 0.04, 0.04),
        };
        let mut rng = RandomStream::from_seed(26);
        let r = sample::rotation(&mut rng);
        let truth = TrueState { r, t: 0.0 };

        // perfect estimate
        let mut state = FilterState::new(r);
        state.b_hat = gyro.bias;
        state.sigma_hat = bound.sigma;
        let err = error_triple(&truth, &state, &gyro, &bound);
        assert!(err.r_tilde.ecl_dist() < 1e-15);
        assert_eq!(err.rho_tilde.unwrap(), RodriguezVector::zero());
        assert_eq!(err.b_tilde, Vector3::zeros());
        assert_eq!(err.sigma_tilde, Vector3::zeros());

        // small rotation error: ecl ~ |delta|^2 / 4
        let delta = Vector3::new(1e-3, -2e-3, 0.5e-3);
        let state = FilterState::new(r * RotationMatrix::exp(&delta).transpose());
        let err = error_triple(&truth, &state, &gyro, &bound);
        let expected = delta.norm_squared() / 4.0;
        assert!((err.r_tilde.ecl_dist() / expected - 1.0).abs() < 1e-4);

        // benchmark initialization sits just off the unstable set
        let truth0 = TrueState {
            r: sc.r0_true,
            t: 0.0,
        };
        let err0 = error_triple(&truth0, &FilterState::new(sc.r0_hat), &gyro, &bound);
        assert!((err0.r_tilde.ecl_dist() - 0.9999).abs() < 5e-4);
        assert!(err0.rho_tilde.is_some());
    }

    #[test]
    fn potential_value_cases() {
        let (refs, gains) = fixture();
        let frame = exact_frame(&RotationMatrix::identity(), &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();

        let zero = ErrorTriple {
            r_tilde: RotationMatrix::identity(),
            rho_tilde: Some(RodriguezVector::zero()),
            b_tilde: Vector3::zeros(),
            sigma_tilde: Vector3::zeros(),
        };
        assert_eq!(potential_v(&zero, &mats, &gains).unwrap(), 0.0);

        let b_only = ErrorTriple {
            b_tilde: Vector3::new(0.3, 0.0, -0.4),
            ..zero
        };
        let v = potential_v(&b_only, &mats, &gains).unwrap();
        assert!((v - 0.25 / (2.0 * gains.gamma)).abs() < 1e-15);

        // attitude term equals the squared weighted distance
        let mut rng = RandomStream::from_seed(27);
        for _ in 0..100 {
            let rho = sample::rodriguez(&mut rng);
            let r_tilde = RotationMatrix::from_rodriguez(&rho);
            let err = ErrorTriple {
                r_tilde,
                rho_tilde: Some(rho),
                b_tilde: Vector3::zeros(),
                sigma_tilde: Vector3::zeros(),
            };
            let v = potential_v(&err, &mats, &gains).unwrap();
            let wd = so3::weighted_dist(&mats.m, &r_tilde).unwrap();
            assert!((v - wd * wd).abs() < 1e-10, "{v} vs {}", wd * wd);
        }

        let unavailable = ErrorTriple {
            rho_tilde: None,
            ..zero
        };
        assert!(matches!(
            potential_v(&unavailable, &mats, &gains),
            Err(Error::RhoUnavailable)
        ));
    }

    #[test]
    fn diagnostics_match_primitives() {
        let (refs, gains) = fixture();
        let mut rng = RandomStream::from_seed(28);
        let r = sample::rotation(&mut rng);
        let r_hat = sample::rotation(&mut rng);
        let frame = exact_frame(&r, &refs).unwrap();
        let mats = inertial_matrix(&frame).unwrap();
        let gyro = GyroModel::noiseless(Vector3::zeros());
        let bound = SigmaBound {
            sigma: Vector3::zeros(),
        };
        let err = error_triple(&TrueState { r, t: 1.5 }, &FilterState::new(r_hat), &gyro, &bound);
        let d = diagnostics(&err, &mats, &gains, 1.5);
        assert_eq!(d.t, 1.5);
        let r_tilde = r * r_hat.transpose();
        assert!((d.dist_weighted - so3::weighted_dist(&mats.m, &r_tilde).unwrap()).abs() < 1e-12);
        assert!((d.phi_vec - so3::vex_antisym(&(mats.m * r_tilde.matrix()))).norm() < 1e-12);
        assert!(d.v_potential.is_some());
    }

    #[test]
    fn deterministic_convergence_from_small_error() {
        // noise-free, bias-free: a modest initial error contracts fast
        let (refs, gains) = fixture();
        let dt = 1e-3;
        let mut truth = TrueState {
            r: RotationMatrix::identity(),
            t: 0.0,
        };
        let signal = AngularVelocitySignalFixture;
        let mut state = FilterState::new(
            truth.r * RotationMatrix::exp(&Vector3::new(0.3, -0.2, 0.1)).transpose(),
        );
        for k in 0..10_000 {
            let t = k as f64 * dt;
            let omega = signal.eval(t);
            let frame = exact_frame(&truth.r, &refs).unwrap();
            let mats = inertial_matrix(&frame).unwrap();
            state = filter_step(&state, &omega, &frame, &mats, &gains, dt).unwrap();
            truth = crate::dynamics::propagate_true(&truth, &omega, dt);
        }
        let final_dist = (truth.r * state.r_hat.transpose()).ecl_dist();
        assert!(final_dist < 1e-3, "final dist {final_dist}");
    }

    struct AngularVelocitySignalFixture;

    impl AngularVelocitySignalFixture {
        fn eval(&self, t: f64) -> Vector3 {
            Vector3::new(
                (0.7 * t).sin(),
                0.7 * (0.5 * t + std::f64::consts::PI).sin(),
                0.5 * (0.3 * t + std::f64::consts::FRAC_PI_3).sin(),
            )
        }
    }
}
