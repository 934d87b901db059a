//! SO(3) kernel: rotation representations, Lie-algebra maps, and distances.
//!
//! Everything in this crate is built on a small set of operators on 3×3
//! matrices: the skew map `[.]x` from vectors to antisymmetric matrices, its
//! inverse `vex`, the antisymmetric projection `(A - A^T)/2`, and their
//! composition [`vex_antisym`]. Attitudes are orthonormal matrices with unit
//! determinant, wrapped in [`RotationMatrix`]; the Rodriguez vector
//! `rho = u tan(theta/2)` is the 3-parameter chart used for error analysis,
//! singular only at half-turns (trace = -1).
//!
//! All functions are pure and the types are plain `Copy` values, so they are
//! safe to use from any number of threads.

use std::ops::Mul;

use crate::error::{Error, Result};

pub type Vector3 = nalgebra::Vector3<f64>;
pub type Matrix3 = nalgebra::Matrix3<f64>;

/// Numerical tolerances used by validators and guards in this module.
///
/// Tests that need looser or tighter bounds take explicit tolerance
/// parameters instead of mutating these.
pub mod tol {
    /// Max allowed entry of `R^T R - I` for a valid rotation.
    pub const ORTHONORMALITY: f64 = 1e-9;
    /// Max allowed deviation of `det R` from 1.
    pub const DETERMINANT: f64 = 1e-9;
    /// Max allowed entry of `m + m^T` for `vex`.
    pub const ANTISYMMETRY: f64 = 1e-9;
    /// Max allowed entry of `m - m^T` for weighted distances.
    pub const SYMMETRY: f64 = 1e-9;
    /// Max allowed deviation of an axis norm from 1.
    pub const UNIT_AXIS: f64 = 1e-12;
    /// Margin on `trace > -1` below which the Rodriguez chart is refused.
    pub const NEAR_PI_TRACE_MARGIN: f64 = 1e-6;
    /// Below this rotation angle the exponential map switches to its series.
    pub const SMALL_ANGLE: f64 = 1e-8;
    /// Margin on `|pitch| < pi/2` below which Euler extraction is refused.
    pub const GIMBAL_MARGIN: f64 = 1e-6;
}

/// Largest absolute entry of a matrix.
pub fn max_abs_entry(m: &Matrix3) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Skew-symmetric matrix of `v`, so that `skew(v) * w = v x w`.
pub fn skew(v: &Vector3) -> Matrix3 {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`skew`].
///
/// Rejects matrices whose symmetric part exceeds [`tol::ANTISYMMETRY`]; use
/// [`vex_antisym`] when the input is only antisymmetric up to larger noise.
pub fn vex(m: &Matrix3) -> Result<Vector3> {
    let deviation = max_abs_entry(&(m + m.transpose()));
    if deviation > tol::ANTISYMMETRY {
        return Err(Error::NotAntisymmetric { deviation });
    }
    Ok(vex_unchecked(m))
}

fn vex_unchecked(m: &Matrix3) -> Vector3 {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Antisymmetric projection `(a - a^T) / 2`.
pub fn antisym(a: &Matrix3) -> Matrix3 {
    0.5 * (a - a.transpose())
}

/// `vex` of the antisymmetric projection; total on all of R^{3x3}.
///
/// For a rotation built from Rodriguez vector `rho` this evaluates to
/// `2 rho / (1 + |rho|^2)`.
pub fn vex_antisym(a: &Matrix3) -> Vector3 {
    vex_unchecked(&antisym(a))
}

/// Weighted attitude distance `Tr{m (I - R)} / 4` for symmetric `m`.
pub fn weighted_dist(m: &Matrix3, r: &RotationMatrix) -> Result<f64> {
    let deviation = max_abs_entry(&(m - m.transpose()));
    if deviation > tol::SYMMETRY {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok(0.25 * (m * (Matrix3::identity() - r.matrix())).trace())
}

/// Angle-axis attitude parameterization with a unit axis.
#[derive(Debug, Clone, Copy)]
pub struct AngleAxis {
    pub angle: f64,
    pub axis: Vector3,
}

impl AngleAxis {
    /// Requires `axis` to be unit length within [`tol::UNIT_AXIS`].
    pub fn new(angle: f64, axis: Vector3) -> Result<Self> {
        let norm = axis.norm();
        if (norm - 1.0).abs() > tol::UNIT_AXIS {
            return Err(Error::NonUnitAxis { norm });
        }
        Ok(Self { angle, axis })
    }

    /// Normalizes an arbitrary non-zero axis.
    pub fn from_axis(angle: f64, axis: Vector3) -> Result<Self> {
        let norm = axis.norm();
        if norm < 1e-12 {
            return Err(Error::NonUnitAxis { norm });
        }
        Ok(Self {
            angle,
            axis: axis / norm,
        })
    }
}

/// Rodriguez parameter vector `rho = u tan(theta/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodriguezVector(pub Vector3);

impl RodriguezVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    pub fn as_vector(&self) -> &Vector3 {
        &self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// Orthonormal 3×3 attitude matrix with determinant 1.
///
/// Constructors either build exact rotations from parameterizations or
/// validate/repair a raw matrix ([`RotationMatrix::try_from_matrix`],
/// [`RotationMatrix::reproject`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix {
    m: Matrix3,
}

impl RotationMatrix {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    /// `I + sin(a) [u]x + (1 - cos(a)) [u]x^2`.
    pub fn from_angle_axis(aa: &AngleAxis) -> Self {
        let k = skew(&aa.axis);
        Self {
            m: Matrix3::identity() + aa.angle.sin() * k + (1.0 - aa.angle.cos()) * (k * k),
        }
    }

    /// `((1 - |rho|^2) I + 2 rho rho^T + 2 [rho]x) / (1 + |rho|^2)`.
    pub fn from_rodriguez(p: &RodriguezVector) -> Self {
        let n2 = p.norm_squared();
        let r = &p.0;
        let m = ((1.0 - n2) * Matrix3::identity() + 2.0 * r * r.transpose() + 2.0 * skew(r))
            / (1.0 + n2);
        Self { m }
    }

    /// Exponential map of the rotation vector `w` (angle = |w|, axis = w/|w|).
    ///
    /// Below [`tol::SMALL_ANGLE`] the sin/cos coefficients are replaced by
    /// their second-order series to avoid dividing by a vanishing angle.
    pub fn exp(w: &Vector3) -> Self {
        let theta2 = w.norm_squared();
        let theta = theta2.sqrt();
        let k = skew(w);
        let (a, b) = if theta < tol::SMALL_ANGLE {
            (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
        } else {
            (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
        };
        Self {
            m: Matrix3::identity() + a * k + b * (k * k),
        }
    }

    /// Recompose a rotation from ZYX Euler angles `[yaw, pitch, roll]`.
    pub fn from_euler_zyx(yaw: f64, pitch: f64, roll: f64) -> Self {
        let rz = Self::exp(&Vector3::new(0.0, 0.0, yaw));
        let ry = Self::exp(&Vector3::new(0.0, pitch, 0.0));
        let rx = Self::exp(&Vector3::new(roll, 0.0, 0.0));
        rz * ry * rx
    }

    /// Validates orthonormality and determinant of a raw matrix.
    pub fn try_from_matrix(m: Matrix3) -> Result<Self> {
        let deviation = max_abs_entry(&(m.transpose() * m - Matrix3::identity()));
        if deviation > tol::ORTHONORMALITY {
            return Err(Error::NotRotation { deviation });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > tol::DETERMINANT {
            return Err(Error::NotRotation {
                deviation: (det - 1.0).abs(),
            });
        }
        Ok(Self { m })
    }

    /// Nearest rotation to `m` (polar factor), for `det(m) > 0`.
    ///
    /// Newton iteration `X <- (X + X^{-T}) / 2`, which converges to the
    /// orthogonal polar factor for any nonsingular input and is invariant to
    /// positive scaling of `m`. Inputs already on SO(3) pass through to
    /// machine precision.
    pub fn reproject(m: &Matrix3) -> Result<Self> {
        let det = m.determinant();
        if !det.is_finite() || det <= 0.0 || !m.iter().all(|x| x.is_finite()) {
            return Err(Error::DegenerateMatrix { det });
        }
        let mut x = *m;
        for _ in 0..60 {
            let inv_t = match x.try_inverse() {
                Some(inv) => inv.transpose(),
                None => return Err(Error::DegenerateMatrix { det }),
            };
            let next = 0.5 * (x + inv_t);
            let step = max_abs_entry(&(next - x));
            x = next;
            if step < 1e-14 {
                break;
            }
        }
        let defect = max_abs_entry(&(x.transpose() * x - Matrix3::identity()));
        if defect > tol::ORTHONORMALITY {
            return Err(Error::DegenerateMatrix { det });
        }
        Ok(Self { m: x })
    }

    pub fn matrix(&self) -> &Matrix3 {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix3 {
        self.m
    }

    /// Inverse rotation.
    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Normalized attitude distance `Tr{I - R} / 4`, in `[0, 1]`.
    ///
    /// 0 at the identity, 1 at half-turns; equals `sin^2(theta/2)` for a
    /// rotation by `theta` and `|rho|^2 / (1 + |rho|^2)` in Rodriguez form.
    pub fn ecl_dist(&self) -> f64 {
        (0.25 * (3.0 - self.m.trace())).clamp(0.0, 1.0)
    }

    /// Rodriguez vector of this rotation.
    ///
    /// Closed-form Cayley inverse `rho = 2 vex(Pa(R)) / (1 + Tr R)`, refused
    /// within [`tol::NEAR_PI_TRACE_MARGIN`] of the half-turn set where the
    /// chart blows up.
    pub fn to_rodriguez(&self) -> Result<RodriguezVector> {
        let trace = self.m.trace();
        if trace <= -1.0 + tol::NEAR_PI_TRACE_MARGIN {
            return Err(Error::NearPiRotation { trace });
        }
        Ok(RodriguezVector(
            2.0 * vex_antisym(&self.m) / (1.0 + trace),
        ))
    }

    /// ZYX (yaw-pitch-roll) Euler angles in radians, `[yaw, pitch, roll]`.
    pub fn to_euler_zyx(&self) -> Result<Vector3> {
        let s = (-self.m[(2, 0)]).clamp(-1.0, 1.0);
        let pitch = s.asin();
        if pitch.abs() >= std::f64::consts::FRAC_PI_2 - tol::GIMBAL_MARGIN {
            return Err(Error::GimbalLock { pitch });
        }
        let yaw = self.m[(1, 0)].atan2(self.m[(0, 0)]);
        let roll = self.m[(2, 1)].atan2(self.m[(2, 2)]);
        Ok(Vector3::new(yaw, pitch, roll))
    }

    /// Orthonormality defect `max |R^T R - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        max_abs_entry(&(self.m.transpose() * self.m - Matrix3::identity()))
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix { m: self.m * rhs.m }
    }
}

impl Mul<Vector3> for RotationMatrix {
    type Output = Vector3;

    fn mul(self, rhs: Vector3) -> Vector3 {
        self.m * rhs
    }
}
