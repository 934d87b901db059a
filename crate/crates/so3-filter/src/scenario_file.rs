//! Flat key/value scenario files.
//!
//! The on-disk scenario format is line-oriented `key = value` text with
//! dotted section keys, chosen over nested formats so configuration diffs
//! stay one line per change. Blank lines and lines starting with `#` are
//! ignored. Unknown or duplicated keys are errors, not warnings.
//!
//! ```text
//! # required
//! sim.duration = 10.0            # seconds
//! sim.dt = 0.001                 # seconds
//! ref.1.inertial = 0.577 -0.577 0.577
//! ref.2.inertial = 0 0 1
//!
//! # optional, with defaults
//! sim.seed = 42
//! sim.filter = stochastic        # stochastic | baseline
//! sim.truth_noise = deterministic  # deterministic | diffused
//! truth.r0 = identity            # identity | angle_axis <deg> <x> <y> <z>
//! estimate.r0 = angle_axis 179 1 5 3
//! omega.amp = 1.0 0.7 0.5        # omega_i = amp_i sin(freq_i t + phase_i)
//! omega.freq = 0.7 0.5 0.3
//! omega.phase = 0 3.14159 1.0472
//! omega.value = 0 0 0.5          # constant rate instead of sines
//! gyro.bias = 0.2 -0.2 0.2
//! gyro.q = 0.2 0.2 0.2           # constant diagonal diffusion
//! gyro.q_base = 0.1 0 0          # or a sinusoid schedule:
//! gyro.q_amp = 0.1 0 0           # q_i = base_i + amp_i sin(freq_i t + ph_i)
//! gyro.q_freq = 1 0 0
//! gyro.q_phase = 0 0 0
//! gains.k_w = 5.0
//! gains.k_b = 0.5
//! gains.k_sigma = 0.5
//! gains.gamma = 1.0
//! gains.epsilon = 0.5
//! ref.1.bias = -0.1 0.1 0.05
//! ref.1.noise_std = 0.2
//! ref.1.weight = 1.0
//! ```
//!
//! References are numbered from 1 and must be contiguous. Omitted optional
//! keys fall back to: seed 42, stochastic filter, deterministic truth noise,
//! identity attitudes, zero angular velocity, noiseless unbiased gyro, zero
//! body bias/noise, unit weights, and the stock gain set
//! `(k_w, k_b, k_sigma, gamma, epsilon) = (5, 0.5, 0.5, 1, 0.5)`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dynamics::{AngularVelocitySignal, GyroModel, QSchedule};
use crate::error::{Error, Result};
use crate::filter::{FilterGains, FilterKind};
use crate::measurement::{ReferenceVector, ReferenceVectorSet};
use crate::sim::{Scenario, TruthNoise};
use crate::so3::{AngleAxis, RotationMatrix, Vector3};

struct Entry {
    line: usize,
    value: String,
    consumed: bool,
}

struct Keys {
    map: BTreeMap<String, Entry>,
}

impl Keys {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or(Error::ScenarioFile {
                line,
                message: format!("expected `key = value`, got `{stripped}`"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if map.contains_key(&key) {
                return Err(Error::ScenarioFile {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            map.insert(
                key,
                Entry {
                    line,
                    value,
                    consumed: false,
                },
            );
        }
        Ok(Self { map })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.get_mut(key).map(|e| {
            e.consumed = true;
            (e.line, e.value.clone())
        })
    }

    fn finish(&self) -> Result<()> {
        for (key, e) in &self.map {
            if !e.consumed {
                return Err(Error::ScenarioFile {
                    line: e.line,
                    message: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(())
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::ScenarioFile {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| bad(line, format!("expected a number, got `{v}`")))
}

fn parse_u64(line: usize, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| bad(line, format!("expected an integer, got `{v}`")))
}

fn parse_vector(line: usize, v: &str) -> Result<Vector3> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(bad(line, format!("expected three numbers, got `{v}`")));
    }
    Ok(Vector3::new(
        parse_f64(line, parts[0])?,
        parse_f64(line, parts[1])?,
        parse_f64(line, parts[2])?,
    ))
}

fn parse_rotation(line: usize, v: &str) -> Result<RotationMatrix> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        ["identity"] => Ok(RotationMatrix::identity()),
        ["angle_axis", deg, x, y, z] => {
            let angle = parse_f64(line, deg)?.to_radians();
            let axis = Vector3::new(
                parse_f64(line, x)?,
                parse_f64(line, y)?,
                parse_f64(line, z)?,
            );
            let aa = AngleAxis::from_axis(angle, axis)
                .map_err(|e| bad(line, format!("bad axis: {e}")))?;
            Ok(RotationMatrix::from_angle_axis(&aa))
        }
        _ => Err(bad(
            line,
            format!("expected `identity` or `angle_axis <deg> <x> <y> <z>`, got `{v}`"),
        )),
    }
}

/// Parses scenario text; see the module docs for the schema.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let mut keys = Keys::parse(text)?;

    let (line, v) = keys
        .take("sim.duration")
        .ok_or_else(|| bad(0, "missing required key `sim.duration`"))?;
    let duration = parse_f64(line, &v)?;
    let (line, v) = keys
        .take("sim.dt")
        .ok_or_else(|| bad(0, "missing required key `sim.dt`"))?;
    let dt = parse_f64(line, &v)?;

    let seed = match keys.take("sim.seed") {
        Some((line, v)) => parse_u64(line, &v)?,
        None => 42,
    };
    let filter_kind = match keys.take("sim.filter") {
        Some((line, v)) => match v.as_str() {
            "stochastic" => FilterKind::Stochastic,
            "baseline" => FilterKind::Baseline,
            other => return Err(bad(line, format!("unknown filter kind `{other}`"))),
        },
        None => FilterKind::Stochastic,
    };
    let truth_noise = match keys.take("sim.truth_noise") {
        Some((line, v)) => match v.as_str() {
            "deterministic" => TruthNoise::Deterministic,
            "diffused" => TruthNoise::Diffused,
            other => return Err(bad(line, format!("unknown truth noise mode `{other}`"))),
        },
        None => TruthNoise::Deterministic,
    };

    let r0_true = match keys.take("truth.r0") {
        Some((line, v)) => parse_rotation(line, &v)?,
        None => RotationMatrix::identity(),
    };
    let r0_hat = match keys.take("estimate.r0") {
        Some((line, v)) => parse_rotation(line, &v)?,
        None => RotationMatrix::identity(),
    };

    let omega_value = keys.take("omega.value");
    let omega_amp = keys.take("omega.amp");
    let omega_freq = keys.take("omega.freq");
    let omega_phase = keys.take("omega.phase");
    let omega_signal = match (omega_value, &omega_amp) {
        (Some((line, v)), None) => AngularVelocitySignal::Constant(parse_vector(line, &v)?),
        (Some((line, _)), Some(_)) => {
            return Err(bad(line, "`omega.value` conflicts with `omega.amp`"));
        }
        (None, Some(_)) => {
            let (l1, amp) = omega_amp.unwrap();
            let (l2, freq) = omega_freq
                .ok_or_else(|| bad(l1, "`omega.amp` requires `omega.freq`"))?;
            let (l3, phase) = omega_phase
                .ok_or_else(|| bad(l1, "`omega.amp` requires `omega.phase`"))?;
            AngularVelocitySignal::SumOfSines {
                amp: parse_vector(l1, &amp)?,
                freq: parse_vector(l2, &freq)?,
                phase: parse_vector(l3, &phase)?,
            }
        }
        (None, None) => {
            if let Some((line, _)) = omega_freq.or(omega_phase) {
                return Err(bad(line, "`omega.freq`/`omega.phase` require `omega.amp`"));
            }
            AngularVelocitySignal::Zero
        }
    };

    let bias = match keys.take("gyro.bias") {
        Some((line, v)) => parse_vector(line, &v)?,
        None => Vector3::zeros(),
    };
    let q_const = keys.take("gyro.q");
    let q_base = keys.take("gyro.q_base");
    let q = match (q_const, q_base) {
        (Some((line, v)), None) => QSchedule::Constant(parse_vector(line, &v)?),
        (Some((line, _)), Some(_)) => {
            return Err(bad(line, "`gyro.q` conflicts with `gyro.q_base`"));
        }
        (None, Some((l1, base))) => {
            let (l2, amp) = keys
                .take("gyro.q_amp")
                .ok_or_else(|| bad(l1, "`gyro.q_base` requires `gyro.q_amp`"))?;
            let (l3, freq) = keys
                .take("gyro.q_freq")
                .ok_or_else(|| bad(l1, "`gyro.q_base` requires `gyro.q_freq`"))?;
            let (l4, phase) = keys
                .take("gyro.q_phase")
                .ok_or_else(|| bad(l1, "`gyro.q_base` requires `gyro.q_phase`"))?;
            QSchedule::Sinusoid {
                base: parse_vector(l1, &base)?,
                amp: parse_vector(l2, &amp)?,
                freq: parse_vector(l3, &freq)?,
                phase: parse_vector(l4, &phase)?,
            }
        }
        (None, None) => QSchedule::Constant(Vector3::zeros()),
    };

    let gains = FilterGains::new(
        match keys.take("gains.k_w") {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 5.0,
        },
        match keys.take("gains.k_b") {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 0.5,
        },
        match keys.take("gains.k_sigma") {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 0.5,
        },
        match keys.take("gains.gamma") {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 1.0,
        },
        match keys.take("gains.epsilon") {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 0.5,
        },
    )?;

    let mut entries = Vec::new();
    for i in 1.. {
        let inertial = match keys.take(&format!("ref.{i}.inertial")) {
            Some((line, v)) => parse_vector(line, &v)?,
            None => break,
        };
        let body_bias = match keys.take(&format!("ref.{i}.bias")) {
            Some((line, v)) => parse_vector(line, &v)?,
            None => Vector3::zeros(),
        };
        let noise_std = match keys.take(&format!("ref.{i}.noise_std")) {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 0.0,
        };
        let weight = match keys.take(&format!("ref.{i}.weight")) {
            Some((line, v)) => parse_f64(line, &v)?,
            None => 1.0,
        };
        entries.push(ReferenceVector {
            inertial,
            body_bias,
            noise_std,
            weight,
        });
    }
    let refs = ReferenceVectorSet::new(entries)?;

    keys.finish()?;

    let sc = Scenario {
        duration,
        dt,
        omega_signal,
        gyro: GyroModel { bias, q },
        refs,
        r0_true,
        r0_hat,
        gains,
        seed,
        filter_kind,
        truth_noise,
    };
    sc.validate()?;
    Ok(sc)
}

/// Reads and parses a scenario file.
pub fn parse_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario_str(&text)
}
