//! Ground-truth rigid-body motion and gyro measurement synthesis.
//!
//! The true attitude follows `dR = R [omega]x dt` and is integrated with the
//! exponential map so it stays on SO(3); reprojection after every step keeps
//! accumulated rounding below the orthonormality tolerance over long runs.
//!
//! Gyro readings are the true rate plus a constant bias plus white noise
//! modeled as the increment of a Brownian motion with diagonal diffusion `Q`:
//! a sampled measurement is `omega + b + Q xi / sqrt(dt)` with standard
//! normal `xi`, so the integrated noise over one step has covariance
//! `Q^2 dt`. The per-axis bound `sigma_i = max_t Q_ii(t)^2` is what the
//! filter's covariance adaptation tracks.

use crate::rng::RandomStream;
use crate::so3::{skew, Matrix3, RotationMatrix, RodriguezVector, Vector3};

/// True attitude at time `t`.
#[derive(Debug, Clone, Copy)]
pub struct TrueState {
    pub r: RotationMatrix,
    pub t: f64,
}

/// Diagonal diffusion magnitude schedule `t -> q(t)`, with `Q(t) = diag(q)`.
#[derive(Debug, Clone)]
pub enum QSchedule {
    Constant(Vector3),
    /// `q_i(t) = base_i + amp_i * sin(freq_i * t + phase_i)`.
    Sinusoid {
        base: Vector3,
        amp: Vector3,
        freq: Vector3,
        phase: Vector3,
    },
}

impl QSchedule {
    pub fn eval(&self, t: f64) -> Vector3 {
        match self {
            QSchedule::Constant(q) => *q,
            QSchedule::Sinusoid {
                base,
                amp,
                freq,
                phase,
            } => Vector3::new(
                base.x + amp.x * (freq.x * t + phase.x).sin(),
                base.y + amp.y * (freq.y * t + phase.y).sin(),
                base.z + amp.z * (freq.z * t + phase.z).sin(),
            ),
        }
    }

    /// Diffusion magnitudes must stay non-negative; for sinusoids the whole
    /// range `base_i - |amp_i|` is required to be, regardless of horizon.
    pub fn validate(&self) -> crate::error::Result<()> {
        let floor = match self {
            QSchedule::Constant(q) => q.min(),
            QSchedule::Sinusoid { base, amp, .. } => {
                (0..3).map(|i| base[i] - amp[i].abs()).fold(f64::INFINITY, f64::min)
            }
        };
        if !floor.is_finite() || floor < 0.0 {
            return Err(crate::error::Error::InvalidConfig(format!(
                "gyro diffusion schedule reaches {floor}, must stay >= 0"
            )));
        }
        Ok(())
    }
}

/// Rate-gyro corruption model: constant bias plus Brownian-driven noise.
#[derive(Debug, Clone)]
pub struct GyroModel {
    pub bias: Vector3,
    pub q: QSchedule,
}

impl GyroModel {
    pub fn noiseless(bias: Vector3) -> Self {
        Self {
            bias,
            q: QSchedule::Constant(Vector3::zeros()),
        }
    }
}

/// Per-axis upper bound of the squared diffusion over a horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBound {
    pub sigma: Vector3,
}

/// Per-axis max of `q_i(t)^2` over `[0, horizon]`, sampled at `dt`.
pub fn sigma_of(schedule: &QSchedule, horizon: f64, dt: f64) -> SigmaBound {
    match schedule {
        QSchedule::Constant(q) => SigmaBound {
            sigma: q.component_mul(q),
        },
        QSchedule::Sinusoid { .. } => {
            let mut sigma = Vector3::zeros();
            let steps = (horizon / dt).ceil() as usize;
            for k in 0..=steps {
                let q = schedule.eval((k as f64 * dt).min(horizon));
                for i in 0..3 {
                    sigma[i] = sigma[i].max(q[i] * q[i]);
                }
            }
            SigmaBound { sigma }
        }
    }
}

/// True angular velocity as a function of time, rad/s.
#[derive(Debug, Clone)]
pub enum AngularVelocitySignal {
    Zero,
    Constant(Vector3),
    /// `omega_i(t) = amp_i * sin(freq_i * t + phase_i)`.
    SumOfSines {
        amp: Vector3,
        freq: Vector3,
        phase: Vector3,
    },
}

impl AngularVelocitySignal {
    pub fn eval(&self, t: f64) -> Vector3 {
        match self {
            AngularVelocitySignal::Zero => Vector3::zeros(),
            AngularVelocitySignal::Constant(w) => *w,
            AngularVelocitySignal::SumOfSines { amp, freq, phase } => Vector3::new(
                amp.x * (freq.x * t + phase.x).sin(),
                amp.y * (freq.y * t + phase.y).sin(),
                amp.z * (freq.z * t + phase.z).sin(),
            ),
        }
    }
}

/// Advances the true attitude by one step: `R <- R exp([omega dt]x)`.
pub fn propagate_true(state: &TrueState, omega: &Vector3, dt: f64) -> TrueState {
    let step = RotationMatrix::exp(&(omega * dt));
    let next = state.r * step;
    // cheap drift repair; the product of exact exponentials only accumulates
    // rounding, so one Newton iteration of the polar projection suffices
    let repaired = RotationMatrix::reproject(next.matrix()).unwrap_or(next);
    TrueState {
        r: repaired,
        t: state.t + dt,
    }
}

/// Rodriguez-vector kinematics `(I + [rho]x + rho rho^T) omega / 2`.
pub fn rodriguez_rate(rho: &RodriguezVector, omega: &Vector3) -> Vector3 {
    let r = &rho.0;
    0.5 * ((Matrix3::identity() + skew(r) + r * r.transpose()) * omega)
}

/// One gyro sample at time `t`: `omega + b + Q(t) xi / sqrt(dt)`.
pub fn sample_gyro(
    model: &GyroModel,
    omega_true: &Vector3,
    t: f64,
    dt: f64,
    rng: &mut RandomStream,
) -> Vector3 {
    let q = model.q.eval(t);
    let xi = rng.normal_vector(1.0);
    omega_true + model.bias + q.component_mul(&xi) / dt.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::sample;

    #[test]
    fn zero_rate_leaves_attitude_unchanged() {
        let state = TrueState {
            r: RotationMatrix::identity(),
            t: 0.0,
        };
        let next = propagate_true(&state, &Vector3::zeros(), 1e-3);
        assert_eq!(next.r.matrix(), state.r.matrix());
        assert_eq!(next.t, 1e-3);
    }

    #[test]
    fn constant_axis_rotation_accumulates_angle() {
        let mut state = TrueState {
            r: RotationMatrix::identity(),
            t: 0.0,
        };
        let omega = Vector3::new(0.0, 0.0, 0.3);
        let dt = 1e-3;
        for _ in 0..1000 {
            state = propagate_true(&state, &omega, dt);
        }
        let expected = RotationMatrix::exp(&Vector3::new(0.0, 0.0, 0.3));
        assert!(
            crate::so3::max_abs_entry(&(state.r.matrix() - expected.matrix())) < 1e-9,
            "constant-axis integration drifted"
        );
    }

    #[test]
    fn long_run_stays_on_group() {
        let signal = AngularVelocitySignal::SumOfSines {
            amp: Vector3::new(1.0, 0.7, 0.5),
            freq: Vector3::new(0.7, 0.5, 0.3),
            phase: Vector3::new(0.0, std::f64::consts::PI, std::f64::consts::FRAC_PI_3),
        };
        let dt = 1e-3;
        let mut state = TrueState {
            r: RotationMatrix::identity(),
            t: 0.0,
        };
        let mut worst = 0.0_f64;
        for k in 0..100_000 {
            state = propagate_true(&state, &signal.eval(k as f64 * dt), dt);
            if k % 100 == 0 {
                worst = worst.max(state.r.orthonormality_defect());
                worst = worst.max((state.r.matrix().determinant() - 1.0).abs());
            }
        }
        worst = worst.max(state.r.orthonormality_defect());
        assert!(worst < 1e-9, "worst defect {worst}");
    }

    #[test]
    fn rodriguez_rate_special_cases() {
        let omega = Vector3::new(0.4, -0.2, 0.9);
        assert_eq!(
            rodriguez_rate(&RodriguezVector::zero(), &omega),
            0.5 * omega
        );
        assert_eq!(
            rodriguez_rate(&RodriguezVector::new(1.0, 2.0, 3.0), &Vector3::zeros()),
            Vector3::zeros()
        );
    }

    #[test]
    fn rodriguez_rate_matches_flow_to_first_order() {
        let mut rng = RandomStream::from_seed(11);
        for _ in 0..40 {
            // keep |rho| < 2 so the chart stays well-conditioned
            let rho = RodriguezVector(sample::unit_vector(&mut rng) * rng.uniform(0.05, 1.8));
            let omega = sample::vector(&mut rng, 1.0);
            let r = RotationMatrix::from_rodriguez(&rho);
            let rate = rodriguez_rate(&rho, &omega);

            // fit the quadratic error constant at the coarsest step, then
            // require first-order convergence at the finer ones
            let err = |dt: f64| -> f64 {
                let r_next = r * RotationMatrix::exp(&(omega * dt));
                let rho_next = r_next.to_rodriguez().unwrap();
                (rho_next.0 - rho.0 - rate * dt).norm()
            };
            let c = err(1e-2) / 1e-4;
            assert!(err(1e-3) <= 3.0 * c * 1e-6 + 1e-12, "dt=1e-3");
            assert!(err(1e-4) <= 3.0 * c * 1e-8 + 1e-12, "dt=1e-4");
        }
    }

    #[test]
    fn gyro_noiseless_returns_rate_plus_bias() {
        let model = GyroModel::noiseless(Vector3::new(0.1, -0.1, 0.2));
        let mut rng = RandomStream::from_seed(12);
        let omega = Vector3::new(0.5, 0.0, -0.5);
        let m = sample_gyro(&model, &omega, 0.0, 1e-3, &mut rng);
        assert_eq!(m, omega + model.bias);
    }

    #[test]
    fn gyro_increment_statistics() {
        let model = GyroModel {
            bias: 0.2 * Vector3::new(1.0, -1.0, 1.0),
            q: QSchedule::Constant(Vector3::new(0.2, 0.2, 0.2)),
        };
        let dt = 1e-3;
        let n = 100_000;
        let omega = Vector3::new(0.3, 0.1, -0.2);
        let mut rng = RandomStream::from_seed(13);
        let mut mean = Vector3::zeros();
        let mut var = Vector3::zeros();
        for _ in 0..n {
            let inc = (sample_gyro(&model, &omega, 0.0, dt, &mut rng) - omega - model.bias) * dt;
            mean += inc;
            var += inc.component_mul(&inc);
        }
        mean /= n as f64;
        var /= n as f64;
        let expected = 0.2 * 0.2 * dt;
        for i in 0..3 {
            assert!(
                (var[i] / expected - 1.0).abs() < 0.05,
                "axis {i} variance off: {} vs {expected}",
                var[i]
            );
        }
        // mean of omega_m - omega is b within 3 sigma / sqrt(n)
        let mut mean_m = Vector3::zeros();
        for _ in 0..n {
            mean_m += sample_gyro(&model, &omega, 0.0, dt, &mut rng) - omega;
        }
        mean_m /= n as f64;
        let bound = 3.0 * (0.2 / dt.sqrt()) / (n as f64).sqrt();
        for i in 0..3 {
            assert!(
                (mean_m[i] - model.bias[i]).abs() < bound,
                "axis {i} bias recovery: {} vs {}",
                mean_m[i],
                model.bias[i]
            );
        }
    }

    #[test]
    fn sigma_of_constant_and_sinusoid() {
        let constant = QSchedule::Constant(Vector3::new(0.2, 0.2, 0.2));
        let q2 = 0.2 * 0.2;
        assert_eq!(sigma_of(&constant, 10.0, 1e-3).sigma, Vector3::new(q2, q2, q2));
        assert_eq!(
            sigma_of(&QSchedule::Constant(Vector3::zeros()), 10.0, 1e-3).sigma,
            Vector3::zeros()
        );

        let sin = QSchedule::Sinusoid {
            base: Vector3::new(0.1, 0.0, 0.0),
            amp: Vector3::new(0.1, 0.0, 0.0),
            freq: Vector3::new(1.0, 1.0, 1.0),
            phase: Vector3::zeros(),
        };
        let sigma = sigma_of(&sin, 10.0, 1e-3).sigma;
        assert!((sigma.x - 0.04).abs() < 1e-6, "sigma_x = {}", sigma.x);
        assert_eq!(sigma.y, 0.0);

        // dominance at every sampled instant
        for k in 0..10_000 {
            let q = sin.eval(k as f64 * 1e-3);
            assert!(sigma.x >= q.x * q.x - 1e-15);
        }
    }
}
