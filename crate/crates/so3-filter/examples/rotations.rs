//! Tour of the SO(3) kernel: parameterizations, Lie-algebra maps, and
//! attitude distances.
//!
//!     cargo run --release --example rotations

use so3_filter::so3::{self, skew, AngleAxis, RodriguezVector, RotationMatrix, Vector3};

fn main() {
    // skew / vex are mutually inverse maps between vectors and the algebra
    let v = Vector3::new(1.0, 2.0, 3.0);
    let k = skew(&v);
    println!("skew([1,2,3]) =\n{k:.1}");
    println!("vex(skew(v)) = {:?}", so3::vex(&k).unwrap());

    // the same rotation through three charts
    let axis = Vector3::new(1.0, 5.0, 3.0);
    let aa = AngleAxis::from_axis(179.0_f64.to_radians(), axis).unwrap();
    let r = RotationMatrix::from_angle_axis(&aa);
    println!("\n179 deg about [1,5,3]/|.| =\n{:.4}", r.matrix());
    println!("normalized distance from identity: {:.6}", r.ecl_dist());

    let rho = RodriguezVector::new(0.3, -0.2, 0.5);
    let from_rho = RotationMatrix::from_rodriguez(&rho);
    let back = from_rho.to_rodriguez().unwrap();
    println!("\nRodriguez round trip: {:?} -> {:?}", rho.as_vector(), back.as_vector());

    let w = Vector3::new(0.2, -0.1, 0.4);
    let exp = RotationMatrix::exp(&w);
    println!(
        "exp map inverse check: |exp(w) exp(-w) - I| = {:.2e}",
        so3::max_abs_entry(&(
            (exp * RotationMatrix::exp(&(-w))).matrix() - so3_filter::Matrix3::identity()
        ))
    );

    // drift repair: perturb a rotation off the group and project back
    let dirty = r.matrix() + 1e-5 * so3_filter::Matrix3::from_element(1.0);
    let repaired = RotationMatrix::reproject(&dirty).unwrap();
    println!(
        "reprojection: defect before {:.1e}, after {:.1e}",
        so3::max_abs_entry(&(dirty.transpose() * dirty - so3_filter::Matrix3::identity())),
        repaired.orthonormality_defect()
    );

    let euler = r.to_euler_zyx().unwrap();
    println!(
        "\nZYX Euler angles: yaw {:.2} deg, pitch {:.2} deg, roll {:.2} deg",
        euler.x.to_degrees(),
        euler.y.to_degrees(),
        euler.z.to_degrees()
    );
}
