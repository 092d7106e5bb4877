//! SU(2) coherent states and the spherical quadrature.
//!
//! Shows the overlap law `|⟨z₁|z₂⟩|² = cos^{4J}(η/2)` (η the geodesic
//! angle), the Husimi function of a polar coherent state, and two quadrature
//! sanity checks: total mass one and the probability mass of the upper
//! hemisphere for a spin-1/2 pointing up.

use spinphase::{
    build_quadrature, coherent_state, husimi, region_probability, DensityMatrix, HalfInt,
    PhasePoint,
};

fn main() {
    let j = HalfInt::from_int(2);
    let north = coherent_state(j, PhasePoint::new(0.0, 0.0));
    println!("overlap vs geodesic angle (J = {j}):");
    for deg in [0.0f64, 30.0, 60.0, 90.0, 180.0] {
        let eta = deg.to_radians();
        let other = coherent_state(j, PhasePoint::new(eta, 0.0));
        let overlap = north.overlap(&other);
        let law = (eta / 2.0).cos().powi(2 * j.doubled() as i32);
        println!(
            "  η = {deg:>5}°: |⟨z1|z2⟩|² = {:.8}, cos^(4J)(η/2) = {law:.8}",
            overlap.norm_sqr()
        );
    }

    println!("\nHusimi values of the north coherent state along a meridian:");
    let rho = north.density();
    for deg in [0.0f64, 45.0, 90.0, 180.0] {
        let p = PhasePoint::new(deg.to_radians(), 0.0);
        println!("  θ = {deg:>5}°: F^(-1) = {:.8}", husimi(&rho, p));
    }

    let half = HalfInt::from_doubled(1);
    let up = coherent_state(half, PhasePoint::new(0.0, 0.0)).density();
    let quad = build_quadrature(half, 2000);
    let total = region_probability(&up, |_| true, &quad).unwrap();
    let upper = region_probability(&up, |p| p.theta < std::f64::consts::FRAC_PI_2, &quad).unwrap();
    println!("\nspin-1/2 up, measurement-outcome mass (quadrature degree 2000):");
    println!("  whole sphere: {:.9} (exactly 1)", total.value);
    println!("  upper hemisphere: {:.9} (exactly 3/4)", upper.value);

    let mixed = DensityMatrix::maximally_mixed(half);
    let upper_mixed =
        region_probability(&mixed, |p| p.theta < std::f64::consts::FRAC_PI_2, &quad).unwrap();
    println!("  upper hemisphere, maximally mixed: {:.9} (exactly 1/2)", upper_mixed.value);
}
