//! Vector-measurement model.
//!
//! A rigid body observes a set of known inertial-frame reference directions
//! through body-frame sensors; each raw body vector is the rotated reference
//! plus a per-sensor bias and Gaussian noise. The filter never reconstructs
//! an attitude from these vectors. Instead it consumes three scalar/vector
//! quantities that are computable directly from the normalized vector pairs:
//! the correction vector [`phi_from_vectors`], the weighted attitude distance
//! [`dist_from_vectors`], and the trace diagnostic [`upsilon_from_vectors`].
//! For noise-free measurements these agree with their matrix-space
//! counterparts evaluated at the true attitude error.
//!
//! Frames are immutable after construction; all functions here are pure
//! except [`synthesize_body`], which advances its caller-owned random stream.

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::so3::{Matrix3, RotationMatrix, Vector3};

/// `|cos|` at or above this marks a vector pair as collinear.
pub const COLLINEARITY_LIMIT: f64 = 1.0 - 1e-6;

/// One reference direction with the body-side corruption model applied to it.
#[derive(Debug, Clone)]
pub struct ReferenceVector {
    /// Known inertial-frame direction (need not be unit length).
    pub inertial: Vector3,
    /// Constant additive bias on the raw body-frame measurement.
    pub body_bias: Vector3,
    /// Per-axis standard deviation of the body-frame measurement noise.
    pub noise_std: f64,
    /// Sensor confidence weight; rescaled so frame weights sum to 3.
    pub weight: f64,
}

/// Set of reference directions observed by the body sensors.
#[derive(Debug, Clone)]
pub struct ReferenceVectorSet {
    entries: Vec<ReferenceVector>,
}

impl ReferenceVectorSet {
    /// Validates counts, weights, and that a non-collinear pair exists.
    pub fn new(entries: Vec<ReferenceVector>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least two reference vectors, got {}",
                entries.len()
            )));
        }
        let mut units = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            let norm = e.inertial.norm();
            if norm < 1e-9 {
                return Err(Error::DegenerateVector { index: i, norm });
            }
            if e.weight <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "reference {i} has non-positive weight {}",
                    e.weight
                )));
            }
            if e.noise_std < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "reference {i} has negative noise std {}",
                    e.noise_std
                )));
            }
            units.push(e.inertial / norm);
        }
        let mut best = 1.0_f64;
        for i in 0..units.len() {
            for j in (i + 1)..units.len() {
                best = best.min(units[i].dot(&units[j]).abs());
            }
        }
        if best >= COLLINEARITY_LIMIT {
            return Err(Error::CollinearPair { cos_angle: best });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[ReferenceVector] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One epoch of normalized inertial/body vector pairs with weights.
#[derive(Debug, Clone)]
pub struct MeasurementFrame {
    inertial: Vec<Vector3>,
    body: Vec<Vector3>,
    weights: Vec<f64>,
}

impl MeasurementFrame {
    pub fn n(&self) -> usize {
        self.inertial.len()
    }

    pub fn inertial(&self) -> &[Vector3] {
        &self.inertial
    }

    pub fn body(&self) -> &[Vector3] {
        &self.body
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Raw body-frame observations of the reference set at attitude `r_true`.
///
/// Returns `R^T v_i + bias_i + noise_i` per reference, drawing three normal
/// deviates per vector from `rng` in reference order.
pub fn synthesize_body(
    r_true: &RotationMatrix,
    refs: &ReferenceVectorSet,
    rng: &mut RandomStream,
) -> Vec<Vector3> {
    let rt = r_true.transpose();
    refs.entries
        .iter()
        .map(|e| rt * e.inertial + e.body_bias + rng.normal_vector(e.noise_std))
        .collect()
}

/// Normalizes raw body vectors and the reference directions into a frame.
///
/// Weights are rescaled so they sum to 3.
pub fn normalize_frame(raw: &[Vector3], refs: &ReferenceVectorSet) -> Result<MeasurementFrame> {
    if raw.len() != refs.len() {
        return Err(Error::InvalidConfig(format!(
            "got {} raw vectors for {} references",
            raw.len(),
            refs.len()
        )));
    }
    let mut inertial = Vec::with_capacity(raw.len());
    let mut body = Vec::with_capacity(raw.len());
    for (i, (v, e)) in raw.iter().zip(refs.entries.iter()).enumerate() {
        let norm = v.norm();
        if norm < 1e-9 {
            return Err(Error::DegenerateVector { index: i, norm });
        }
        body.push(v / norm);
        inertial.push(e.inertial / e.inertial.norm());
    }
    let weights = rescale_weights(refs.entries.iter().map(|e| e.weight).collect());
    Ok(MeasurementFrame {
        inertial,
        body,
        weights,
    })
}

fn rescale_weights(mut w: Vec<f64>) -> Vec<f64> {
    let sum: f64 = w.iter().sum();
    for x in &mut w {
        *x *= 3.0 / sum;
    }
    w
}

/// Completes a two-vector frame with the normalized cross products.
///
/// The synthetic pair gets the mean of the existing weights before the sum
/// is rescaled back to 3. Frames that already hold three or more vectors
/// pass through unchanged.
pub fn augment_cross(frame: MeasurementFrame) -> Result<MeasurementFrame> {
    if frame.n() >= 3 {
        return Ok(frame);
    }
    let cos = frame.inertial[0].dot(&frame.inertial[1]).abs();
    if cos >= COLLINEARITY_LIMIT {
        return Err(Error::CollinearPair { cos_angle: cos });
    }
    let cos_body = frame.body[0].dot(&frame.body[1]).abs();
    if cos_body >= COLLINEARITY_LIMIT {
        return Err(Error::CollinearPair {
            cos_angle: cos_body,
        });
    }
    let mut inertial = frame.inertial;
    let mut body = frame.body;
    let mut weights = frame.weights;
    let ci = inertial[0].cross(&inertial[1]);
    let cb = body[0].cross(&body[1]);
    inertial.push(ci / ci.norm());
    body.push(cb / cb.norm());
    weights.push(0.5 * (weights[0] + weights[1]));
    Ok(MeasurementFrame {
        inertial,
        body,
        weights: rescale_weights(weights),
    })
}

/// Weighted sum of inertial outer products and derived quantities.
#[derive(Debug, Clone)]
pub struct InertialMatrix {
    /// `M = sum_i s_i u_i u_i^T`, symmetric with trace 3.
    pub m: Matrix3,
    /// Trace complement `Tr{M} I - M`, symmetric positive-definite.
    pub m_bar: Matrix3,
    /// Minimum singular value of `m_bar`.
    pub lambda_min: f64,
    m_inv: Matrix3,
}

impl InertialMatrix {
    pub fn inverse(&self) -> &Matrix3 {
        &self.m_inv
    }
}

/// Builds the [`InertialMatrix`] of a full-rank frame.
pub fn inertial_matrix(frame: &MeasurementFrame) -> Result<InertialMatrix> {
    let m = weighted_outer_sum(frame.inertial(), frame.weights());
    let trace = m.trace();
    if (trace - 3.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "inertial matrix trace {trace} deviates from 3"
        )));
    }
    let eigen = m.symmetric_eigenvalues();
    let min_eigenvalue = eigen.min();
    if min_eigenvalue <= 1e-9 {
        return Err(Error::RankDeficient { min_eigenvalue });
    }
    let m_bar = trace * Matrix3::identity() - m;
    // eigenvalues of m_bar are pairwise sums of those of m; for a full-rank
    // frame they are all positive and the smallest is trace - max eigenvalue
    let lambda_min = trace - eigen.max();
    let m_inv = m.try_inverse().ok_or(Error::SingularMatrix {
        det: m.determinant(),
    })?;
    Ok(InertialMatrix {
        m,
        m_bar,
        lambda_min,
        m_inv,
    })
}

fn weighted_outer_sum(vectors: &[Vector3], weights: &[f64]) -> Matrix3 {
    vectors
        .iter()
        .zip(weights)
        .fold(Matrix3::zeros(), |acc, (v, s)| {
            acc + *s * v * v.transpose()
        })
}

/// Correction vector `R_hat sum_i (s_i / 2) (u_i^B x u_hat_i^B)`.
///
/// With noise-free body vectors this equals `vex(Pa(M Rt))` for the true
/// attitude error `Rt = R R_hat^T`.
pub fn phi_from_vectors(frame: &MeasurementFrame, r_hat: &RotationMatrix) -> Vector3 {
    let rt = r_hat.transpose();
    let mut c = Vector3::zeros();
    for ((ui, ub), s) in frame
        .inertial
        .iter()
        .zip(&frame.body)
        .zip(&frame.weights)
    {
        let predicted = rt * *ui;
        c += 0.5 * s * ub.cross(&predicted);
    }
    *r_hat * c
}

/// Weighted attitude distance `3/4 - Tr{R_hat S R_hat^T} / 4` with
/// `S = sum_i s_i u_hat_i^B (u_i^B)^T`; non-negative by construction.
pub fn dist_from_vectors(frame: &MeasurementFrame, r_hat: &RotationMatrix) -> f64 {
    let s = predicted_outer_sum(frame, r_hat);
    0.75 - 0.25 * (r_hat.matrix() * s * r_hat.matrix().transpose()).trace()
}

/// Trace diagnostic `Tr{M^{-1} R_hat S R_hat^T}`.
///
/// Noise-free this equals `Tr{Rt}`; it is tied to the Rodriguez error by
/// `1 + |rho|^2 = 4 / (1 + upsilon)`.
pub fn upsilon_from_vectors(frame: &MeasurementFrame, r_hat: &RotationMatrix) -> Result<f64> {
    let m = weighted_outer_sum(frame.inertial(), frame.weights());
    let det = m.determinant();
    let m_inv = m.try_inverse().ok_or(Error::SingularMatrix { det })?;
    if det.abs() < 1e-12 {
        return Err(Error::SingularMatrix { det });
    }
    let s = predicted_outer_sum(frame, r_hat);
    Ok((m_inv * r_hat.matrix() * s * r_hat.matrix().transpose()).trace())
}

fn predicted_outer_sum(frame: &MeasurementFrame, r_hat: &RotationMatrix) -> Matrix3 {
    let rt = r_hat.transpose();
    frame
        .inertial
        .iter()
        .zip(&frame.body)
        .zip(&frame.weights)
        .fold(Matrix3::zeros(), |acc, ((ui, ub), s)| {
            let predicted = rt * *ui;
            acc + *s * predicted * ub.transpose()
        })
}

/// Noise-free frame for `r_true`: synthesis, normalization, and cross
/// augmentation without touching a random stream.
pub fn exact_frame(r_true: &RotationMatrix, refs: &ReferenceVectorSet) -> Result<MeasurementFrame> {
    let rt = r_true.transpose();
    let raw: Vec<Vector3> = refs.entries.iter().map(|e| rt * e.inertial).collect();
    augment_cross(normalize_frame(&raw, refs)?)
}
