//! For spin 1/2 the two decoherence models coincide on a time grid.
//!
//! One coherent-state measurement shrinks every rank-1 moment by exactly 1/3,
//! and the continuous flow does the same after time `t = ln3/γ` — so `n`
//! measurements land on the flow at `t = n·ln3/γ`, exactly, for every state.

use spinphase::linalg::C64;
use spinphase::{
    expand, lindblad_propagate_analytic, povm_iterate, reconstruct, DensityMatrix, HalfInt,
    LindbladParams, TensorBasis,
};
use ndarray::array;

fn main() {
    let j = HalfInt::from_doubled(1);
    let basis = TensorBasis::build(j);
    let gamma = 0.8;
    let params = LindbladParams::new(gamma, j).unwrap();
    let step = 3f64.ln() / gamma;

    // a generic mixed state with coherences
    let rho = DensityMatrix::new(
        j,
        array![
            [C64::new(0.7, 0.0), C64::new(0.2, 0.1)],
            [C64::new(0.2, -0.1), C64::new(0.3, 0.0)]
        ],
    )
    .unwrap();
    let m0 = expand(&rho, &basis).unwrap();

    println!("spin 1/2, gamma = {gamma}; one measurement ↔ flow time ln3/γ = {step:.6}\n");
    println!("  n   t = n·ln3/γ    max |Φⁿρ − e^(t𝓛)ρ|");
    for n in 0..=5u32 {
        let a = reconstruct(&povm_iterate(&m0, n), &basis).unwrap().matrix;
        let t = f64::from(n) * step;
        let b = reconstruct(
            &lindblad_propagate_analytic(&m0, t, &params).unwrap(),
            &basis,
        )
        .unwrap()
        .matrix;
        let diff = (&a - &b).iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
        println!("  {n}   {t:<12.6}   {diff:.3e}");
    }

    println!("\nthe equality is basis-independent: moments after one measurement");
    let m1 = povm_iterate(&m0, 1);
    for (l, k, v) in m1.iter() {
        let v0 = m0.get(l, k);
        let factor = if l == 0 { 1.0 } else { 3.0 };
        println!(
            "  ρ_({l},{k}): {:.6}{:+.6}i = (1/{factor:.0})·initial ({:.6}{:+.6}i)",
            v.re, v.im, v0.re, v0.im
        );
    }
}
