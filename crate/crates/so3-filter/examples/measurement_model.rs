//! Vector-measurement model: synthesize corrupted body-frame observations
//! and reconstruct the filter's driving signals from them.
//!
//!     cargo run --release --example measurement_model

use so3_filter::measurement::{
    augment_cross, dist_from_vectors, exact_frame, inertial_matrix, normalize_frame,
    phi_from_vectors, synthesize_body, upsilon_from_vectors,
};
use so3_filter::so3::{self, AngleAxis, RotationMatrix, Vector3};
use so3_filter::{paper_scenario, RandomStream};

fn main() {
    let refs = paper_scenario().refs;
    let r_true = RotationMatrix::from_angle_axis(
        &AngleAxis::from_axis(0.8, Vector3::new(0.2, 1.0, -0.5)).unwrap(),
    );
    let r_hat = RotationMatrix::identity();

    // noisy pipeline: synthesize -> normalize -> cross-augment
    let mut rng = RandomStream::from_seed(1);
    let raw = synthesize_body(&r_true, &refs, &mut rng);
    println!("raw body vectors (biased, noisy):");
    for v in &raw {
        println!("  [{:+.4} {:+.4} {:+.4}]  |v| = {:.4}", v.x, v.y, v.z, v.norm());
    }
    let frame = augment_cross(normalize_frame(&raw, &refs).unwrap()).unwrap();
    println!("frame holds {} unit vector pairs, weights {:?}", frame.n(), frame.weights());

    let mats = inertial_matrix(&frame).unwrap();
    println!("\nalignment matrix M =\n{:.4}", mats.m);
    println!("min singular value of the complement: {:.6}", mats.lambda_min);

    // reconstructions vs their matrix-space counterparts (noise-free frame)
    let clean = exact_frame(&r_true, &refs).unwrap();
    let r_tilde = r_true * r_hat.transpose();
    let phi = phi_from_vectors(&clean, &r_hat);
    let phi_matrix = so3::vex_antisym(&(mats.m * r_tilde.matrix()));
    println!("\nnoise-free reconstruction vs matrix space:");
    println!("  phi      {:?}", phi);
    println!("  phi (M)  {:?}", phi_matrix);
    println!(
        "  dist     {:.6} vs {:.6}",
        dist_from_vectors(&clean, &r_hat),
        so3::weighted_dist(&mats.m, &r_tilde).unwrap()
    );
    let ups = upsilon_from_vectors(&clean, &r_hat).unwrap();
    let rho = r_tilde.to_rodriguez().unwrap();
    println!(
        "  upsilon  {ups:.6}; 4/(1+upsilon) = {:.6} = 1 + |rho|^2 = {:.6}",
        4.0 / (1.0 + ups),
        1.0 + rho.norm_squared()
    );

    // the same reconstructions on the noisy frame
    println!("\nnoisy-frame signals (what the filter actually consumes):");
    println!("  phi      {:?}", phi_from_vectors(&frame, &r_hat));
    println!("  dist     {:.6}", dist_from_vectors(&frame, &r_hat));
    println!("  upsilon  {:.6}", upsilon_from_vectors(&frame, &r_hat).unwrap());
}
