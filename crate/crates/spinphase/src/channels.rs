//! The two isotropic decoherence channels and their decay rates.
//!
//! **Continuous model** — the Lindblad flow generated by all three spin
//! components with equal strength,
//!
//! ```text
//! 𝓛(ρ) = -(γ/2) Σ_{i=x,y,z} [Ĵᵢ, [Ĵᵢ, ρ]]
//!       = γ ( ½ Ĵ₊ρĴ₋ + ½ Ĵ₋ρĴ₊ + ĴzρĴz - J(J+1)ρ ) .
//! ```
//!
//! **Iterated-measurement model** — the coherent-state POVM channel
//! `Φ[ρ] = ∫ ⟨z|ρ|z⟩ |z⟩⟨z| dμ^J`, one application per measurement.
//!
//! Both channels are diagonal in the irreducible-tensor basis — hence they
//! commute — but with different spectra: the rank-`L` moment decays per unit
//! time as `Γ_L = γL(L+1)/2` under the flow and per iteration as
//! `Γ_L = -log r_L`, `r_L = binom(2J,L)/binom(2J+L+1,L)`, under the map.
//! The two spectra agree only for `J = 1/2` (with `γ = log 3`) and approach
//! each other like `1/J` when `γ = 1/J`.
//!
//! Every result is computed by two independent routes (spectral vs
//! brute-force matrix/quadrature) that serve as each other's oracle in the
//! tests.

use ndarray::Array2;

use crate::binom;
use crate::coherent::{coherent_state, PhasePoint, SphericalQuadrature};
use crate::halfint::HalfInt;
use crate::linalg::{self, C64};
use crate::su2::{DensityMatrix, MomentVector, SpinOperators, Su2Error};
use thiserror::Error;

/// Errors from channel construction and application.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("decoherence rate must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("quadrature degree {actual} below the exactness requirement {required}")]
    InsufficientDegree { required: u32, actual: u32 },
    #[error("time series is empty or has fewer than two samples")]
    SeriesTooShort,
    #[error("time series lengths differ: {a} vs {b}")]
    SeriesLengthMismatch { a: usize, b: usize },
    #[error("time series sample times disagree at index {0}")]
    SeriesTimeMismatch(usize),
    #[error("initial moment is zero; the ratio statistic is undefined")]
    ZeroInitialMoment,
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

/// Parameters of the continuous monitoring model.
#[derive(Debug, Clone, Copy)]
pub struct LindbladParams {
    gamma: f64,
    j: HalfInt,
}

impl LindbladParams {
    /// Requires `γ > 0` and finite.
    pub fn new(gamma: f64, j: HalfInt) -> Result<Self, ChannelError> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(ChannelError::InvalidGamma(gamma));
        }
        Ok(LindbladParams { gamma, j })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }
}

/// Right-hand side `𝓛(A)` in the double-commutator form, on an arbitrary
/// operator.
pub fn lindblad_rhs_double_commutator(
    a: &Array2<C64>,
    ops: &SpinOperators,
    gamma: f64,
) -> Array2<C64> {
    let mut acc = Array2::<C64>::zeros(a.raw_dim());
    for ji in [&ops.jx, &ops.jy, &ops.jz] {
        let inner = linalg::commutator(ji, a);
        acc += &linalg::commutator(ji, &inner);
    }
    acc.mapv(|v| v * (-0.5 * gamma))
}

/// Right-hand side `𝓛(A)` in the ladder form
/// `γ(½J₊AJ₋ + ½J₋AJ₊ + JzAJz - J(J+1)A)`.
pub fn lindblad_rhs_ladder(a: &Array2<C64>, ops: &SpinOperators, gamma: f64) -> Array2<C64> {
    let jv = ops.j.value();
    let mut acc = ops.jplus.dot(a).dot(&ops.jminus).mapv(|v| v * 0.5);
    acc += &ops.jminus.dot(a).dot(&ops.jplus).mapv(|v| v * 0.5);
    acc += &ops.jz.dot(a).dot(&ops.jz);
    acc -= &a.mapv(|v| v * (jv * (jv + 1.0)));
    acc.mapv(|v| v * gamma)
}

/// The generator `dρ/dt = 𝓛(ρ)` applied to a state.
pub fn lindblad_generator(rho: &DensityMatrix, params: &LindbladParams) -> Result<Array2<C64>, ChannelError> {
    if rho.j() != params.j {
        return Err(Su2Error::JMismatch { a: rho.j(), b: params.j }.into());
    }
    let ops = crate::su2::spin_matrices(params.j);
    Ok(lindblad_rhs_ladder(rho.matrix(), &ops, params.gamma))
}

/// Closed-form flow in the tensor basis:
/// `ρ_{Lk}(t) = e^{-γL(L+1)t/2} ρ_{Lk}(0)`.  Exact semigroup.
pub fn lindblad_propagate_analytic(
    m: &MomentVector,
    t: f64,
    params: &LindbladParams,
) -> Result<MomentVector, ChannelError> {
    if m.j() != params.j {
        return Err(Su2Error::JMismatch { a: m.j(), b: params.j }.into());
    }
    if !(t >= 0.0) {
        return Err(ChannelError::NegativeTime(t));
    }
    let mut out = m.clone();
    for l in 0..=m.lmax() {
        let lf = f64::from(l);
        let factor = (-0.5 * params.gamma * lf * (lf + 1.0) * t).exp();
        for k in -(l as i32)..=(l as i32) {
            out.set(l, k, m.get(l, k) * factor);
        }
    }
    Ok(out)
}

/// Classical fixed-step fourth-order Runge–Kutta integration of the matrix
/// ODE — the independent numeric check on the closed form.
///
/// # Panics
/// If `steps == 0` or `t < 0`.
pub fn lindblad_propagate_numeric(
    rho: &DensityMatrix,
    t: f64,
    params: &LindbladParams,
    steps: usize,
) -> Result<DensityMatrix, ChannelError> {
    if rho.j() != params.j {
        return Err(Su2Error::JMismatch { a: rho.j(), b: params.j }.into());
    }
    assert!(steps >= 1, "integrator needs at least one step");
    assert!(t >= 0.0, "integrator runs forward in time");
    let ops = crate::su2::spin_matrices(params.j);
    let dt = t / steps as f64;
    let mut state = rho.matrix().clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs_ladder(&state, &ops, params.gamma);
        let s2 = &state + &k1.mapv(|v| v * (0.5 * dt));
        let k2 = lindblad_rhs_ladder(&s2, &ops, params.gamma);
        let s3 = &state + &k2.mapv(|v| v * (0.5 * dt));
        let k3 = lindblad_rhs_ladder(&s3, &ops, params.gamma);
        let s4 = &state + &k3.mapv(|v| v * dt);
        let k4 = lindblad_rhs_ladder(&s4, &ops, params.gamma);
        state += &(k1 + k2.mapv(|v| v * 2.0) + k3.mapv(|v| v * 2.0) + k4)
            .mapv(|v| v * (dt / 6.0));
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho.j(), state))
}

/// POVM channel eigenvalue `r_L = binom(2J, L)/binom(2J+L+1, L)`.
///
/// # Panics
/// If `L > 2J`.
pub fn povm_factor(j: HalfInt, l: u32) -> f64 {
    let two_j = j.doubled() as u32;
    assert!(l <= two_j, "tensor rank exceeds 2J");
    binom::ratio(two_j, l)
}

/// Per-iteration decay rate `-log r_L`, accumulated in log space.
pub fn povm_decay_rate(j: HalfInt, l: u32) -> f64 {
    let two_j = j.doubled() as u32;
    assert!(l <= two_j, "tensor rank exceeds 2J");
    // + 0.0 turns the L = 0 result into positive zero
    -binom::ln_ratio(two_j, l) + 0.0
}

/// One POVM measurement in the tensor basis: `ρ_{Lk} ← r_L·ρ_{Lk}`.
pub fn povm_apply_spectral(m: &MomentVector) -> MomentVector {
    povm_iterate(m, 1)
}

/// `n` measurements at once: `ρ_{Lk} ← r_L^n·ρ_{Lk}`.
pub fn povm_iterate(m: &MomentVector, n: u32) -> MomentVector {
    let two_j = m.j().doubled() as u32;
    let mut out = m.clone();
    for l in 0..=m.lmax() {
        let factor = binom::ratio(two_j, l).powi(n as i32);
        for k in -(l as i32)..=(l as i32) {
            out.set(l, k, m.get(l, k) * factor);
        }
    }
    out
}

/// Brute-force POVM channel on an arbitrary operator,
/// `Φ[A] = ∫ ⟨z|A|z⟩ |z⟩⟨z| dμ^J`, evaluated on a quadrature whose degree
/// must cover the harmonic content `4J` of the integrand.
pub fn povm_apply_matrix(
    a: &Array2<C64>,
    j: HalfInt,
    quad: &SphericalQuadrature,
) -> Result<Array2<C64>, ChannelError> {
    let required = 2 * j.doubled() as u32;
    if quad.degree() < required {
        return Err(ChannelError::InsufficientDegree { required, actual: quad.degree() });
    }
    let d = j.dim();
    let mass = d as f64; // dμ^J carries 2J+1 over the probability measure
    let mut acc = Array2::<C64>::zeros((d, d));
    for &(p, w) in quad.nodes() {
        let z = coherent_state(j, p);
        let v = a.dot(z.amplitudes());
        let expectation: C64 =
            z.amplitudes().iter().zip(v.iter()).map(|(zi, vi)| zi.conj() * vi).sum();
        let scale = expectation * (w * mass);
        // acc += scale·|z⟩⟨z| without forming the projector
        for (r, zr) in z.amplitudes().iter().enumerate() {
            for (c, zc) in z.amplitudes().iter().enumerate() {
                acc[(r, c)] += scale * zr * zc.conj();
            }
        }
    }
    Ok(acc)
}

/// Brute-force POVM channel on a state.
pub fn povm_apply_quadrature(
    rho: &DensityMatrix,
    quad: &SphericalQuadrature,
) -> Result<DensityMatrix, ChannelError> {
    let out = povm_apply_matrix(rho.matrix(), rho.j(), quad)?;
    Ok(DensityMatrix::from_matrix_unchecked(rho.j(), out))
}

/// Decay rates of both models for every rank `L = 0..=2J`.
#[derive(Debug, Clone)]
pub struct DecayRateTable {
    j: HalfInt,
    gamma: f64,
    lindblad: Vec<f64>,
    povm: Vec<f64>,
}

impl DecayRateTable {
    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Γ_L = γL(L+1)/2` (per unit time).
    pub fn lindblad(&self, l: u32) -> f64 {
        self.lindblad[l as usize]
    }

    /// `Γ_L = -log r_L` (per iteration).
    pub fn povm(&self, l: u32) -> f64 {
        self.povm[l as usize]
    }

    /// Rows `(L, Γ^Lind_L, Γ^POVM_L)` in increasing `L`.
    pub fn rows(&self) -> impl Iterator<Item = (u32, f64, f64)> + '_ {
        (0..self.lindblad.len()).map(|l| (l as u32, self.lindblad[l], self.povm[l]))
    }
}

/// Builds the decay-rate table; requires `γ > 0`.
pub fn decay_rates(j: HalfInt, gamma: f64) -> Result<DecayRateTable, ChannelError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(ChannelError::InvalidGamma(gamma));
    }
    let lmax = j.doubled() as u32;
    let mut lindblad = Vec::with_capacity(lmax as usize + 1);
    let mut povm = Vec::with_capacity(lmax as usize + 1);
    for l in 0..=lmax {
        let lf = f64::from(l);
        lindblad.push(0.5 * gamma * lf * (lf + 1.0));
        povm.push(povm_decay_rate(j, l));
    }
    Ok(DecayRateTable { j, gamma, lindblad, povm })
}

/// Three-term large-spin expansion of the per-iteration rate:
/// `Γ^POVM_L ≈ L(L+1)/(2J) - L(L+1)/(4J²) + L(L+1)(L²+L+6)/(48J³)`,
/// accurate to `O(J⁻⁴)` at fixed `L`.
pub fn povm_rate_large_j(j: HalfInt, l: u32) -> f64 {
    let jv = j.value();
    let lf = f64::from(l);
    let ll1 = lf * (lf + 1.0);
    ll1 / (2.0 * jv) - ll1 / (4.0 * jv * jv)
        + ll1 * (lf * lf + lf + 6.0) / (48.0 * jv * jv * jv)
}

/// The discrimination statistic `R` formed from a rank-1 and a rank-2 moment
/// time series.
#[derive(Debug, Clone)]
pub struct RatioStatistic {
    /// Mean of the per-sample ratios.
    pub r: f64,
    /// `(t, R(t))` for every sample after the first.
    pub per_time: Vec<(f64, f64)>,
    /// Largest absolute deviation of any `R(t)` from the mean.
    pub max_deviation: f64,
}

impl RatioStatistic {
    /// Whether the ratio is time-independent within `tol`.
    pub fn time_independent(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// `R = log(|ρ₂(t)|/|ρ₂(0)|) / log(|ρ₁(t)|/|ρ₁(0)|)` per sample; the first
/// sample of each series is the reference.  Requires equal sample times and
/// nonzero moments.
pub fn ratio_statistic(
    rank1: &[(f64, C64)],
    rank2: &[(f64, C64)],
) -> Result<RatioStatistic, ChannelError> {
    if rank1.len() != rank2.len() {
        return Err(ChannelError::SeriesLengthMismatch { a: rank1.len(), b: rank2.len() });
    }
    if rank1.len() < 2 {
        return Err(ChannelError::SeriesTooShort);
    }
    let (t0, m1_0) = rank1[0];
    let (t0b, m2_0) = rank2[0];
    if (t0 - t0b).abs() > 1e-12 {
        return Err(ChannelError::SeriesTimeMismatch(0));
    }
    if m1_0.norm() == 0.0 || m2_0.norm() == 0.0 {
        return Err(ChannelError::ZeroInitialMoment);
    }
    let mut per_time = Vec::with_capacity(rank1.len() - 1);
    for (i, (&(t1, v1), &(t2, v2))) in rank1[1..].iter().zip(rank2[1..].iter()).enumerate() {
        if (t1 - t2).abs() > 1e-12 {
            return Err(ChannelError::SeriesTimeMismatch(i + 1));
        }
        if v1.norm() == 0.0 || v2.norm() == 0.0 {
            return Err(ChannelError::ZeroInitialMoment);
        }
        let denom = (v1.norm() / m1_0.norm()).ln();
        let numer = (v2.norm() / m2_0.norm()).ln();
        per_time.push((t1, numer / denom));
    }
    let mean = per_time.iter().map(|&(_, r)| r).sum::<f64>() / per_time.len() as f64;
    let max_deviation =
        per_time.iter().map(|&(_, r)| (r - mean).abs()).fold(0.0f64, f64::max);
    Ok(RatioStatistic { r: mean, per_time, max_deviation })
}

/// Result of integrating the detection density over a region.
#[derive(Debug, Clone, Copy)]
pub struct RegionProbability {
    /// `∫_A ⟨z|ρ|z⟩ dμ^J` over the quadrature nodes inside the region.
    pub value: f64,
    /// Number of quadrature nodes that fell inside the region; zero means
    /// the rule cannot resolve the region at all.
    pub nodes_in_region: usize,
}

/// Probability of a phase-space detection inside `region`.  The full sphere
/// returns 1 to quadrature exactness; a region boundary that cuts between
/// nodes is resolved only to the node spacing, so accuracy improves like the
/// ring count for partial regions.
pub fn region_probability<F: Fn(PhasePoint) -> bool>(
    rho: &DensityMatrix,
    region: F,
    quad: &SphericalQuadrature,
) -> Result<RegionProbability, ChannelError> {
    let required = 2 * rho.j().doubled() as u32;
    if quad.degree() < required {
        return Err(ChannelError::InsufficientDegree { required, actual: quad.degree() });
    }
    let mass = rho.j().dim() as f64;
    let mut vals = Vec::new();
    let mut inside = 0usize;
    for &(p, w) in quad.nodes() {
        if region(p) {
            inside += 1;
            vals.push(w * mass * crate::coherent::husimi(rho, p));
        }
    }
    Ok(RegionProbability { value: linalg::pairwise_sum(&vals), nodes_in_region: inside })
}
