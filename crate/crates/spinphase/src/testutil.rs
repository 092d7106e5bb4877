//! Shared helpers for unit tests: reproducible random states and points.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::halfint::HalfInt;
use crate::harmonics::PhasePoint;
use crate::linalg::{self, trace, C64};
use crate::su2::DensityMatrix;

/// Random full-rank density matrix `ρ = AA†/tr(AA†)`.
pub(crate) fn random_density(j: HalfInt, seed: u64) -> DensityMatrix {
    let d = j.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Array2::<C64>::zeros((d, d));
    for v in a.iter_mut() {
        *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let aa = a.dot(&linalg::dagger(&a));
    let tr = trace(&aa).re;
    DensityMatrix::new(j, aa.mapv(|v| v / tr)).unwrap()
}

/// Random normalized state vector.
pub(crate) fn random_pure(j: HalfInt, seed: u64) -> Array1<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi = Array1::<C64>::zeros(j.dim());
    for v in psi.iter_mut() {
        *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.mapv(|a| a / norm)
}

/// Uniformly distributed random point on the sphere.
pub(crate) fn random_point(rng: &mut impl Rng) -> PhasePoint {
    PhasePoint::new(
        rng.gen_range(-1.0f64..1.0).acos(),
        rng.gen_range(0.0..2.0 * std::f64::consts::PI),
    )
}
