//! The irreducible tensor-operator basis and its algebra.
//!
//! Builds `T_{L,k}` for a few spins and verifies, numerically: Hilbert–
//! Schmidt orthonormality, the adjoint image `T† = (−1)^k T_{L,−k}`, the
//! ladder commutators, and that expanding a state into moments and
//! reconstructing it is the identity.

use spinphase::linalg::{dagger, C64};
use spinphase::{
    commutator_check, expand, reconstruct, spin_matrices, DensityMatrix, HalfInt, TensorBasis,
};

fn main() {
    for two_j in [1, 3, 4] {
        let j = HalfInt::from_doubled(two_j);
        let basis = TensorBasis::build(j);
        let ops = spin_matrices(j);

        let mut ortho = 0.0f64;
        for (l1, k1, t1) in basis.iter() {
            for (l2, k2, t2) in basis.iter() {
                let mut tr = C64::new(0.0, 0.0);
                for (a, b) in t1.iter().zip(dagger(t2).t().iter()) {
                    tr += a * b;
                }
                let expect = f64::from(u8::from(l1 == l2 && k1 == k2));
                ortho = ortho.max((tr - expect).norm());
            }
        }

        let mut adjoint = 0.0f64;
        for (l, k, t) in basis.iter() {
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let image = basis.get(l, -k).unwrap();
            for (a, b) in dagger(t).iter().zip(image.iter()) {
                adjoint = adjoint.max((a - sign * b).norm());
            }
        }

        let comm = commutator_check(&ops, &basis).unwrap();
        println!(
            "J = {j}: orthonormality {ortho:.2e}, adjoint image {adjoint:.2e}, \
             commutators jz {:.2e} / raising {:.2e} / lowering {:.2e}",
            comm.jz, comm.raising, comm.lowering
        );
    }

    // moments round-trip: state -> moments -> state
    let j = HalfInt::from_doubled(3);
    let basis = TensorBasis::build(j);
    let rho = DensityMatrix::maximally_mixed(j);
    let m = expand(&rho, &basis).unwrap();
    println!("\nmaximally mixed J = {j}: monopole moment = {:.6} = 1/sqrt(2J+1)", m.monopole().re);
    let back = reconstruct(&m, &basis).unwrap();
    let gap = (rho.matrix() - &back.matrix)
        .iter()
        .fold(0.0f64, |a, v| a.max(v.norm()));
    println!("reconstruction round-trip error: {gap:.2e} (hermitian: {})", back.hermitian);
}
