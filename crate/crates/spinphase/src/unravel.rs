//! Stochastic unraveling of the isotropic Lindblad flow by random unitary
//! kicks.
//!
//! Each time step applies the exact unitary
//!
//! ```text
//! U = exp(-i √(γ·dt) (ξ·Ĵ)),   ξ = (ξx, ξy, ξz) i.i.d. standard normal,
//! ```
//!
//! to a pure state.  A single kick changes the state by
//! `E[UρU†] − ρ = 𝓛(ρ)·dt + O(dt²)`, so the ensemble average over many
//! trajectories converges to the Lindblad solution with weak order one in
//! `dt` and Monte Carlo error `∝ 1/√n_traj`.
//!
//! The generator is realized exactly (eigendecomposition of the Hermitian
//! kick generator, never a truncated series), so every trajectory stays a
//! unit-norm pure state no matter how large the kick.  Trajectory `i` owns
//! the counter-based random stream `(seed, i)`, and ensemble reduction is an
//! ordered pairwise sum over fixed-size chunks, which makes every result
//! bit-identical for a given seed regardless of how many worker threads run.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::halfint::HalfInt;
use crate::linalg::{self, C64};
use crate::su2::{moment_index, DensityMatrix, MomentVector, Su2Error, TensorBasis};
use thiserror::Error;

/// Errors from ensemble configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnravelError {
    #[error("kick strength must be non-negative and finite, got {0}")]
    InvalidGamma(f64),
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("at least one step is required")]
    NoSteps,
    #[error("at least one trajectory is required")]
    NoTrajectories,
    #[error("record stride must be at least 1")]
    NoRecordStride,
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

/// Parameters of one unraveling run.
#[derive(Debug, Clone, Copy)]
pub struct KickConfig {
    pub gamma: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    pub seed: u64,
}

impl KickConfig {
    /// Validates `γ ≥ 0`, `dt > 0`, and nonzero step/trajectory counts.
    pub fn new(
        gamma: f64,
        dt: f64,
        n_steps: usize,
        n_traj: usize,
        seed: u64,
    ) -> Result<Self, UnravelError> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(UnravelError::InvalidGamma(gamma));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(UnravelError::InvalidTimeStep(dt));
        }
        if n_steps == 0 {
            return Err(UnravelError::NoSteps);
        }
        if n_traj == 0 {
            return Err(UnravelError::NoTrajectories);
        }
        Ok(KickConfig { gamma, dt, n_steps, n_traj, seed })
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Dimensionless per-step kick strength `γ(2J)²dt`; the discretization
    /// is trustworthy only when this is small.
    pub fn kick_strength(&self, j: HalfInt) -> f64 {
        let two_j = f64::from(j.doubled());
        self.gamma * two_j * two_j * self.dt
    }

    /// Whether the per-step strength exceeds the recommended ceiling 0.1.
    pub fn strength_warning(&self, j: HalfInt) -> bool {
        self.kick_strength(j) > 0.1
    }
}

/// Reusable buffers for the hot kick loop; no allocation per step.
struct KickEngine {
    d: usize,
    scale: f64,
    jx: Vec<C64>,
    jy: Vec<C64>,
    jz: Vec<C64>,
    g: Vec<C64>,
    v: Vec<C64>,
    tmp: Vec<C64>,
}

impl KickEngine {
    fn new(j: HalfInt, gamma: f64, dt: f64) -> KickEngine {
        let ops = crate::su2::spin_matrices(j);
        let d = j.dim();
        KickEngine {
            d,
            scale: (gamma * dt).sqrt(),
            jx: linalg::to_flat(&ops.jx),
            jy: linalg::to_flat(&ops.jy),
            jz: linalg::to_flat(&ops.jz),
            g: vec![C64::new(0.0, 0.0); d * d],
            v: vec![C64::new(0.0, 0.0); d * d],
            tmp: vec![C64::new(0.0, 0.0); d],
        }
    }

    /// One kick: draw ξ, apply `exp(-i √(γdt) ξ·Ĵ)` exactly.
    fn kick<R: Rng>(&mut self, psi: &mut [C64], rng: &mut R) {
        let xi: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if self.scale == 0.0 {
            return; // γ = 0: the kick is the identity, exactly
        }
        let d = self.d;
        for i in 0..d * d {
            self.g[i] = (self.jx[i] * xi[0] + self.jy[i] * xi[1] + self.jz[i] * xi[2])
                * self.scale;
        }
        for (i, v) in self.v.iter_mut().enumerate() {
            *v = if i % (d + 1) == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        linalg::jacobi_hermitian_flat(&mut self.g, &mut self.v, d);
        // tmp = e^{-iΛ} V† ψ, then ψ = V tmp
        for k in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                acc += self.v[i * d + k].conj() * psi[i];
            }
            self.tmp[k] = acc * C64::from_polar(1.0, -self.g[k * d + k].re);
        }
        for i in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += self.v[i * d + k] * self.tmp[k];
            }
            psi[i] = acc;
        }
    }
}

/// Applies one random kick to a state vector.  Convenience wrapper that
/// rebuilds the spin matrices on each call; [`run_ensemble`] amortizes them.
///
/// # Panics
/// If `gamma < 0`, `dt ≤ 0`, or the state length is not a spin dimension.
pub fn kick_step<R: Rng>(state: &mut Array1<C64>, gamma: f64, dt: f64, rng: &mut R) {
    assert!(gamma >= 0.0 && gamma.is_finite(), "kick_step needs γ ≥ 0");
    assert!(dt > 0.0 && dt.is_finite(), "kick_step needs dt > 0");
    let d = state.len();
    assert!(d >= 1, "empty state");
    let j = HalfInt::from_doubled(d as i32 - 1);
    let mut engine = KickEngine::new(j, gamma, dt);
    let slice = state.as_slice_mut().expect("contiguous state vector");
    engine.kick(slice, rng);
}

/// Ensemble statistics of one unraveling run.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    j: HalfInt,
    config: KickConfig,
    record_steps: Vec<usize>,
    means: Vec<MomentVector>,
    stderrs: Vec<Vec<f64>>,
    final_states: Vec<Array1<C64>>,
}

impl TrajectoryEnsemble {
    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn config(&self) -> &KickConfig {
        &self.config
    }

    /// Recorded times, in step order (always includes 0 and the final time).
    pub fn times(&self) -> Vec<f64> {
        self.record_steps.iter().map(|&s| s as f64 * self.config.dt).collect()
    }

    pub fn n_records(&self) -> usize {
        self.record_steps.len()
    }

    /// Ensemble-mean moments at record index `i`.
    pub fn mean_moments(&self, i: usize) -> &MomentVector {
        &self.means[i]
    }

    /// Monte Carlo standard error of the `(L,k)` moment at record index `i`.
    pub fn stderr(&self, i: usize, l: u32, k: i32) -> f64 {
        self.stderrs[i][moment_index(l, k)]
    }

    /// Final pure state of every trajectory, in trajectory order.
    pub fn final_states(&self) -> &[Array1<C64>] {
        &self.final_states
    }

    /// Ensemble-mean state at the final time, reconstructed from the mean
    /// moments.  Not re-validated: Monte Carlo noise can leave eigenvalues
    /// a hair negative.
    pub fn mean_final_state(&self, basis: &TensorBasis) -> Result<DensityMatrix, Su2Error> {
        let rec = crate::su2::reconstruct(self.means.last().expect("has records"), basis)?;
        Ok(DensityMatrix::from_matrix_unchecked(self.j, rec.matrix))
    }
}

/// Per-chunk accumulator: running means and squared scatter per record and
/// moment (Welford update, Chan merge).  Exact when every sample is
/// identical — a γ = 0 run reports the initial moments bit-for-bit with
/// zero standard error.
struct Partial {
    count: usize,
    mean: Vec<Vec<C64>>,
    m2: Vec<Vec<f64>>,
    states: Vec<Array1<C64>>,
}

impl Partial {
    fn empty(n_records: usize, n_moments: usize) -> Partial {
        Partial {
            count: 0,
            mean: vec![vec![C64::new(0.0, 0.0); n_moments]; n_records],
            m2: vec![vec![0.0; n_moments]; n_records],
            states: Vec::new(),
        }
    }

    /// Push one trajectory's moment value for `(record, moment)`.  The
    /// caller bumps `count` once per trajectory after all records.
    fn push(&mut self, rec: usize, m: usize, value: C64) {
        let k = (self.count + 1) as f64;
        let delta = value - self.mean[rec][m];
        self.mean[rec][m] += delta / k;
        let delta2 = value - self.mean[rec][m];
        self.m2[rec][m] += delta.re * delta2.re + delta.im * delta2.im;
    }

    fn absorb(&mut self, other: Partial) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for rec in 0..self.mean.len() {
            for m in 0..self.mean[rec].len() {
                let delta = other.mean[rec][m] - self.mean[rec][m];
                self.mean[rec][m] += delta * (nb / n);
                self.m2[rec][m] +=
                    other.m2[rec][m] + delta.norm_sqr() * (na * nb / n);
            }
        }
        self.count += other.count;
        self.states.extend(other.states);
    }
}

/// Pairwise merge in fixed chunk order — the split points depend only on the
/// chunk count, so the result is independent of thread scheduling.
fn merge_pairwise(mut parts: Vec<Partial>) -> Partial {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.absorb(b);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

const CHUNK: usize = 64;

/// Runs `n_traj` independent kick trajectories from `rho0` and records the
/// ensemble-mean moments every `record_every` steps (step 0 and the final
/// step are always recorded).
///
/// A pure `rho0` starts every trajectory from its state vector; a mixed one
/// starts each trajectory from an eigenvector drawn with the eigenvalue
/// weights, using the trajectory's own stream.
pub fn run_ensemble(
    rho0: &DensityMatrix,
    cfg: &KickConfig,
    record_every: usize,
) -> Result<TrajectoryEnsemble, UnravelError> {
    // surface invalid parameter combinations even on hand-built configs
    let cfg = KickConfig::new(cfg.gamma, cfg.dt, cfg.n_steps, cfg.n_traj, cfg.seed)?;
    if record_every == 0 {
        return Err(UnravelError::NoRecordStride);
    }
    let j = rho0.j();
    let d = j.dim();

    // initial pure-state table: eigenvectors with eigenvalue weights
    let (vals, vecs) = linalg::hermitian_eigen(rho0.matrix());
    let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let weights: Vec<f64> = clamped.iter().map(|&v| v / total).collect();
    let dominant = weights
        .iter()
        .position(|&w| w >= 1.0 - 1e-12)
        .map(|idx| {
            let mut psi = vec![C64::new(0.0, 0.0); d];
            for i in 0..d {
                psi[i] = vecs[(i, idx)];
            }
            psi
        });

    let mut record_steps: Vec<usize> =
        (0..=cfg.n_steps).filter(|s| s % record_every == 0).collect();
    if *record_steps.last().unwrap() != cfg.n_steps {
        record_steps.push(cfg.n_steps);
    }
    let n_records = record_steps.len();

    let basis = TensorBasis::build(j);
    // flat T†_{L,k} in moment-index order
    let tdags: Vec<Vec<C64>> = basis
        .iter()
        .map(|(_, _, t)| linalg::to_flat(&linalg::dagger(t)))
        .collect();
    let n_moments = tdags.len();

    let n_chunks = cfg.n_traj.div_ceil(CHUNK);
    let parts: Vec<Partial> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut part = Partial::empty(n_records, n_moments);
            let mut engine = KickEngine::new(j, cfg.gamma, cfg.dt);
            let mut psi = vec![C64::new(0.0, 0.0); d];
            let mut tval = vec![C64::new(0.0, 0.0); d];
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(cfg.n_traj);
            for traj in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(traj as u64);
                match &dominant {
                    Some(pure) => psi.copy_from_slice(pure),
                    None => {
                        let u: f64 = rng.gen();
                        let mut acc = 0.0;
                        let mut pick = weights.len() - 1;
                        for (idx, &w) in weights.iter().enumerate() {
                            acc += w;
                            if u < acc {
                                pick = idx;
                                break;
                            }
                        }
                        for i in 0..d {
                            psi[i] = vecs[(i, pick)];
                        }
                    }
                }
                let mut rec = 0;
                for step in 0..=cfg.n_steps {
                    if step > 0 {
                        engine.kick(&mut psi, &mut rng);
                    }
                    if rec < n_records && record_steps[rec] == step {
                        for (m, tdag) in tdags.iter().enumerate() {
                            linalg::matvec_flat(tdag, &psi, &mut tval, d);
                            let mut mom = C64::new(0.0, 0.0);
                            for i in 0..d {
                                mom += psi[i].conj() * tval[i];
                            }
                            part.push(rec, m, mom);
                        }
                        rec += 1;
                    }
                }
                part.count += 1;
                part.states.push(Array1::from(psi.clone()));
            }
            part
        })
        .collect();

    let merged = merge_pairwise(parts);
    debug_assert_eq!(merged.count, cfg.n_traj);
    let n = cfg.n_traj as f64;
    let mut means = Vec::with_capacity(n_records);
    let mut stderrs = Vec::with_capacity(n_records);
    for rec in 0..n_records {
        let mut mv = MomentVector::zeros(j);
        let mut errs = vec![0.0; n_moments];
        for l in 0..=mv.lmax() {
            for k in -(l as i32)..=(l as i32) {
                let idx = moment_index(l, k);
                mv.set(l, k, merged.mean[rec][idx]);
                errs[idx] = (merged.m2[rec][idx].max(0.0)).sqrt() / n;
            }
        }
        means.push(mv);
        stderrs.push(errs);
    }

    Ok(TrajectoryEnsemble {
        j,
        config: cfg,
        record_steps,
        means,
        stderrs,
        final_states: merged.states,
    })
}

/// Fits the Monte Carlo convergence exponent from one trajectory pool.
///
/// For each requested block size `N` the pool is partitioned into disjoint
/// blocks of `N` trajectories; the squared errors of the block-mean moments
/// against `reference` are pooled over all blocks and all non-monopole
/// `(L,k)` moments; the function returns the least-squares slope of
/// `log RMS` versus `log N` — ideally `-1/2`.
///
/// # Panics
/// If a block size exceeds the pool or fewer than two sizes are given.
pub fn block_error_slope(
    states: &[Array1<C64>],
    basis: &TensorBasis,
    reference: &MomentVector,
    block_sizes: &[usize],
) -> f64 {
    assert!(block_sizes.len() >= 2, "need at least two block sizes for a fit");
    let d = basis.j().dim();
    let mut tval = vec![C64::new(0.0, 0.0); d];
    // per-trajectory values of every non-monopole moment
    let mut series: Vec<(u32, i32, Vec<C64>)> = Vec::new();
    for (l, k, t) in basis.iter() {
        if l == 0 {
            continue;
        }
        let tdag = linalg::to_flat(&linalg::dagger(t));
        let vals: Vec<C64> = states
            .iter()
            .map(|psi| {
                let slice = psi.as_slice().expect("contiguous state");
                linalg::matvec_flat(&tdag, slice, &mut tval, d);
                let mut mom = C64::new(0.0, 0.0);
                for i in 0..d {
                    mom += slice[i].conj() * tval[i];
                }
                mom
            })
            .collect();
        series.push((l, k, vals));
    }
    let mut points = Vec::with_capacity(block_sizes.len());
    for &size in block_sizes {
        assert!(size >= 1 && size <= states.len(), "block size out of range");
        let n_blocks = states.len() / size;
        let mut sq = 0.0;
        let mut count = 0usize;
        for (l, k, vals) in &series {
            let reference = reference.get(*l, *k);
            for b in 0..n_blocks {
                let mean = vals[b * size..(b + 1) * size]
                    .iter()
                    .sum::<C64>()
                    / size as f64;
                sq += (mean - reference).norm_sqr();
                count += 1;
            }
        }
        points.push(((size as f64).ln(), (sq / count as f64).sqrt().ln()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
