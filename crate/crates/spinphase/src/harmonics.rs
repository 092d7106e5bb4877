//! Spherical harmonics `Y^k_L`, Legendre polynomials, and points on the
//! sphere.
//!
//! The scale convention is `Y⁰₀ = 1`: the harmonics are orthonormal with
//! respect to the uniform *probability* measure `dμ⁰ = sinθ dθ dφ / 4π`
//! (a factor `√(4π)` above the unit-sphere-orthonormal convention).  The
//! azimuthal phase is `e^{-ikφ}` for `k ≥ 0` with Condon–Shortley sign,
//!
//! ```text
//! Y^k_L(θ,φ) = (-1)^k √((2L+1)(L-k)!/(L+k)!) P^k_L(cosθ) e^{-ikφ},   k ≥ 0,
//! Y^{-k}_L   = (-1)^k conj(Y^k_L),
//! ```
//!
//! the orientation in which the coherent-state expansion identity
//! `⟨z|T†_{L,k}|z⟩ = (2J+1)^{-1/2} r_L^{1/2} Y^k_L` and the kernel identity
//! `ŵ^{-1} = |z⟩⟨z|` hold verbatim (both are cross-checked by brute force in
//! the `coherent` and `phasespace` tests).
//!
//! Numerics: the associated Legendre values are built by the standard stable
//! upward recurrence in `L` at fixed `k`, seeded at `L = k` through the
//! double-factorial closed form evaluated in log space — stable far beyond
//! `L = 200`.

use crate::linalg::C64;

/// A point `(θ, φ)` on the sphere, `θ ∈ [0, π]` from the north pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub theta: f64,
    pub phi: f64,
}

impl PhasePoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        PhasePoint { theta, phi }
    }

    /// Cartesian unit vector.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        let (sp, cp) = (self.phi.sin(), self.phi.cos());
        [st * cp, st * sp, ct]
    }

    /// Cosine of the great-circle angle to another point:
    /// `cos η = cosθ cosθ' + sinθ sinθ' cos(φ-φ')`.
    pub fn geodesic_cos(&self, other: &PhasePoint) -> f64 {
        self.theta.cos() * other.theta.cos()
            + self.theta.sin() * other.theta.sin() * (self.phi - other.phi).cos()
    }
}

/// Legendre polynomial `P_L(x)` with `P_L(1) = 1`, by the three-term
/// recurrence `(L+1)P_{L+1} = (2L+1)x P_L - L P_{L-1}`.
pub fn legendre_p(l: u32, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut pm1, mut p) = (1.0, x);
            for n in 1..l {
                let nf = f64::from(n);
                let next = ((2.0 * nf + 1.0) * x * p - nf * pm1) / (nf + 1.0);
                pm1 = p;
                p = next;
            }
            p
        }
    }
}

/// Column of normalized associated Legendre values
/// `N_L^k(x) = √((2L+1)(L-k)!/(L+k)!)·P^k_L(x)` (no Condon–Shortley sign)
/// for `L = k, …, lmax`, with `s = sinθ ≥ 0` and `x = cosθ`.
fn normalized_assoc_column(lmax: u32, k: u32, x: f64, s: f64) -> Vec<f64> {
    debug_assert!(k <= lmax);
    let n = (lmax - k + 1) as usize;
    let mut col = Vec::with_capacity(n);
    // seed N_k^k = √((2k+1)·(2k-1)!!/(2k)!!)·s^k, in log space
    let seed = if k == 0 {
        1.0
    } else if s == 0.0 {
        0.0
    } else {
        let mut ln = (2.0 * f64::from(k) + 1.0).ln();
        for i in 1..=k {
            ln += ((2.0 * f64::from(i) - 1.0) / (2.0 * f64::from(i))).ln();
        }
        (0.5 * ln + f64::from(k) * s.ln()).exp()
    };
    col.push(seed);
    if lmax == k {
        return col;
    }
    // N_{k+1}^k = √(2k+3)·x·N_k^k
    col.push((2.0 * f64::from(k) + 3.0).sqrt() * x * seed);
    for l in (k + 2)..=lmax {
        let lf = f64::from(l);
        let kf = f64::from(k);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - kf * kf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - kf * kf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
            .sqrt();
        let len = col.len();
        let next = a * (x * col[len - 1] - b * col[len - 2]);
        col.push(next);
    }
    col
}

/// All harmonics `Y^k_L` at one point, for `L ≤ lmax`, indexed by
/// `L² + L + k` like the tensor-operator basis.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    lmax: u32,
    values: Vec<C64>,
}

impl HarmonicTable {
    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    /// `Y^k_L` from the table.
    ///
    /// # Panics
    /// If `L > lmax` or `|k| > L`.
    pub fn get(&self, l: u32, k: i32) -> C64 {
        assert!(l <= self.lmax && k.unsigned_abs() <= l, "harmonic index out of range");
        self.values[(l * l) as usize + (l as i32 + k) as usize]
    }

    /// Iterates `(L, k, Y^k_L)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, C64)> + '_ {
        let lmax = self.lmax;
        (0..=lmax)
            .flat_map(|l| (-(l as i32)..=(l as i32)).map(move |k| (l, k)))
            .map(move |(l, k)| (l, k, self.get(l, k)))
    }
}

/// Evaluates every `Y^k_L(p)` with `L ≤ lmax` in one sweep (one Legendre
/// column per `|k|`).
pub fn eval_all(lmax: u32, p: PhasePoint) -> HarmonicTable {
    let x = p.theta.cos();
    let s = p.theta.sin().abs();
    let dim = ((lmax + 1) * (lmax + 1)) as usize;
    let mut values = vec![C64::new(0.0, 0.0); dim];
    for k in 0..=lmax {
        let col = normalized_assoc_column(lmax, k, x, s);
        // phase e^{-ikφ}; Condon–Shortley sign on the +k side
        let phase = C64::from_polar(1.0, -f64::from(k) * p.phi);
        let cs = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (off, &nk) in col.iter().enumerate() {
            let l = k + off as u32;
            let base = (l * l + l) as usize;
            values[base + k as usize] = phase * (cs * nk);
            values[base - k as usize] = phase.conj() * nk;
        }
    }
    HarmonicTable { lmax, values }
}

/// Single harmonic `Y^k_L(p)`.
///
/// # Panics
/// If `|k| > L`; use the checked wrapper in `phasespace` for fallible lookup.
pub fn spherical_harmonic(l: u32, k: i32, p: PhasePoint) -> C64 {
    assert!(k.unsigned_abs() <= l, "harmonic index out of range");
    let ka = k.unsigned_abs();
    let x = p.theta.cos();
    let s = p.theta.sin().abs();
    let col = normalized_assoc_column(l, ka, x, s);
    let nk = col[(l - ka) as usize];
    if k >= 0 {
        let cs = if ka % 2 == 0 { 1.0 } else { -1.0 };
        C64::from_polar(1.0, -f64::from(ka) * p.phi) * (cs * nk)
    } else {
        C64::from_polar(1.0, f64::from(ka) * p.phi) * nk
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_point(rng: &mut impl Rng) -> PhasePoint {
        // uniform on the sphere via cosθ ~ U(-1,1)
        PhasePoint::new(rng.gen_range(-1.0f64..1.0).acos(), rng.gen_range(0.0..2.0 * PI))
    }

    #[test]
    fn monopole_is_one_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let y = spherical_harmonic(0, 0, p);
            assert_abs_diff_eq!(y.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(y.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn low_order_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let (st, ct) = (p.theta.sin(), p.theta.cos());

            let y10 = spherical_harmonic(1, 0, p);
            assert_abs_diff_eq!(y10.re, 3f64.sqrt() * ct, epsilon = 1e-14);
            assert_abs_diff_eq!(y10.im, 0.0, epsilon = 1e-14);

            let y11 = spherical_harmonic(1, 1, p);
            let expect = C64::from_polar(1.0, -p.phi) * (-(1.5f64).sqrt() * st);
            assert_abs_diff_eq!((y11 - expect).norm(), 0.0, epsilon = 1e-14);

            let y1m1 = spherical_harmonic(1, -1, p);
            let expect = C64::from_polar(1.0, p.phi) * ((1.5f64).sqrt() * st);
            assert_abs_diff_eq!((y1m1 - expect).norm(), 0.0, epsilon = 1e-14);

            let y20 = spherical_harmonic(2, 0, p);
            assert_abs_diff_eq!(y20.re, 5f64.sqrt() * (3.0 * ct * ct - 1.0) / 2.0, epsilon = 1e-13);

            let y22 = spherical_harmonic(2, 2, p);
            let expect = C64::from_polar(1.0, -2.0 * p.phi) * ((15f64 / 8.0).sqrt() * st * st);
            assert_abs_diff_eq!((y22 - expect).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn conjugation_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let p = random_point(&mut rng);
            let table = eval_all(10, p);
            for (l, k, y) in table.iter() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let partner = table.get(l, -k) * sign;
                assert_abs_diff_eq!((y.conj() - partner).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn poles() {
        for l in 0..=12u32 {
            let north = spherical_harmonic(l, 0, PhasePoint::new(0.0, 0.3));
            assert_abs_diff_eq!(north.re, (2.0 * f64::from(l) + 1.0).sqrt(), epsilon = 1e-12);
            if l > 0 {
                for k in 1..=(l as i32) {
                    assert_eq!(spherical_harmonic(l, k, PhasePoint::new(0.0, 0.3)).norm(), 0.0);
                }
            }
            let south = spherical_harmonic(l, 0, PhasePoint::new(PI, 0.0));
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(south.re, sign * (2.0 * f64::from(l) + 1.0).sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn legendre_polynomial_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for l in 0..=12u32 {
            assert_abs_diff_eq!(legendre_p(l, 1.0), 1.0, epsilon = 1e-13);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(legendre_p(l, -1.0), sign, epsilon = 1e-13);
            for _ in 0..20 {
                let x = rng.gen_range(-1.0..1.0);
                assert!(legendre_p(l, x).abs() <= 1.0 + 1e-12);
            }
        }
        let x = 0.37;
        assert_abs_diff_eq!(legendre_p(2, x), (3.0 * x * x - 1.0) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(legendre_p(3, x), (5.0 * x * x * x - 3.0 * x) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn addition_theorem() {
        // Σ_k Y^k_L(p) conj(Y^k_L(p')) = (2L+1)·P_L(cos η)
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let p1 = random_point(&mut rng);
            let p2 = random_point(&mut rng);
            let t1 = eval_all(8, p1);
            let t2 = eval_all(8, p2);
            let cos_eta = p1.geodesic_cos(&p2);
            for l in 0..=8u32 {
                let mut sum = C64::new(0.0, 0.0);
                for k in -(l as i32)..=(l as i32) {
                    sum += t1.get(l, k) * t2.get(l, k).conj();
                }
                let expect = (2.0 * f64::from(l) + 1.0) * legendre_p(l, cos_eta);
                assert_abs_diff_eq!(sum.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(sum.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn table_matches_single_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let p = random_point(&mut rng);
            let table = eval_all(12, p);
            for (l, k, y) in table.iter() {
                let single = spherical_harmonic(l, k, p);
                assert_abs_diff_eq!((y - single).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn high_degree_stability() {
        // At p = p' the addition theorem gives Σ_k |Y^k_L|² = 2L+1; passing it
        // at L = 200 exercises the whole recurrence without catastrophic loss.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let p = random_point(&mut rng);
            let table = eval_all(200, p);
            for l in [150u32, 200] {
                let sum: f64 = (-(l as i32)..=(l as i32))
                    .map(|k| table.get(l, k).norm_sqr())
                    .sum();
                let expect = 2.0 * f64::from(l) + 1.0;
                assert!((sum - expect).abs() / expect < 1e-11, "L={l}: {sum} vs {expect}");
            }
        }
    }
}
