//! Isotropic decoherence of a single spin, viewed on its spherical phase space.
//!
//! The crate models two ways a spin-`J` state loses coherence isotropically:
//!
//! * a continuous Lindblad flow generated by all three spin components,
//!   `dρ/dt = -(γ/2) Σᵢ [Jᵢ, [Jᵢ, ρ]]`, and
//! * a discrete measurement channel `Φ[ρ] = ∫ ⟨z|ρ|z⟩ |z⟩⟨z| dμᴶ(z)` built
//!   from SU(2) coherent states, applied once per step.
//!
//! Both channels are diagonal in the irreducible-tensor basis `T_{L,k}`, so a
//! state is tracked either as a matrix or as its multipole moments `ρ_{Lk}`,
//! which simply decay: `e^{-γL(L+1)t/2}` for the flow, a binomial ratio per
//! application for the measurement channel.  On the phase-space side the same
//! dynamics becomes heat flow on the sphere acting on a σ-parametrized
//! family of quasiprobability distributions, with negative regions dying out
//! after a computable time.  A stochastic unraveling by random unitary kicks
//! reproduces the flow in the ensemble mean.
//!
//! # Layout
//!
//! | module | contents |
//! |--------|----------|
//! | [`halfint`] | exact half-integer arithmetic for `J` and `m` labels |
//! | [`su2`] | spin matrices, Clebsch–Gordan coefficients, tensor basis, states |
//! | [`harmonics`] | Legendre polynomials and `Y⁰₀ = 1`-normalized spherical harmonics |
//! | [`coherent`] | coherent states, Husimi function, product quadrature on the sphere |
//! | [`channels`] | the two decoherence channels, decay-rate tables, ratio diagnostics |
//! | [`phasespace`] | kernels, quasiprobability distributions, heat flow, positivity |
//! | [`unravel`] | Monte Carlo unitary-kick unraveling of the Lindblad flow |
//! | [`export`] | CSV / JSON / PPM writers and the snapshot format |
//! | [`cli`] | the `spinphase` command-line front end |
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example decay_rates         # multipole decay rates for both channels
//! cargo run --example tensor_algebra      # tensor-operator basis and its algebra
//! cargo run --example coherent_states     # overlaps, Husimi values, quadrature checks
//! cargo run --example channel_equivalence # spin-1/2: measurement channel = Lindblad flow
//! cargo run --example moment_decay        # moment time series for both channels
//! cargo run --example wigner_heatmaps     # phase-space distributions rendered to PPM
//! cargo run --example heat_flow           # spectral vs. kernel propagation of the heat flow
//! cargo run --example positivity_times    # when distributions become pointwise positive
//! cargo run --example monte_carlo_kicks   # stochastic unraveling vs. the exact solution
//! ```
//!
//! The thin `spinphase` binary drives the same library from the shell; see the
//! README for the subcommand reference and file formats.

mod binom;
pub mod channels;
pub mod cli;
pub mod coherent;
pub mod export;
pub mod halfint;
pub mod harmonics;
pub mod linalg;
pub mod phasespace;
pub mod su2;
pub mod unravel;
#[cfg(test)]
pub(crate) mod testutil;

pub use channels::{
    decay_rates, lindblad_generator, lindblad_propagate_analytic, lindblad_propagate_numeric,
    povm_apply_quadrature, povm_apply_spectral, povm_factor, povm_iterate, povm_rate_large_j,
    ratio_statistic, region_probability, ChannelError, DecayRateTable, LindbladParams,
    RatioStatistic, RegionProbability,
};
pub use coherent::{
    build_quadrature, coherent_state, husimi, CoherentState, PhasePoint, SphericalQuadrature,
};
pub use export::{
    read_snapshot_json, write_ensemble_comparison_csv, write_ensemble_csv, write_grid_csv,
    write_moments_csv, write_ppm, write_rates_csv, write_snapshot_json, write_spectral_json,
    write_tensor_table_json, ExportError,
};
pub use halfint::HalfInt;
pub use phasespace::{
    damped_kernel_condition, display_grid, evaluate_grid, first_positive_time,
    heat_propagate_kernel, heat_propagate_spectral, heat_residual, positivity_iterations,
    positivity_scan, positivity_time, povm_sigma_shift, quasidistribution, sw_kernel_matrix,
    PhaseSpaceError, PositivityKind, PositivityScan, PositivityTime, QuasiDist, SigmaIndex,
    SwKernel,
};
pub use su2::{
    clebsch_gordan, commutator_check, expand, expand_matrix, reconstruct, reconstruct_state,
    spin_matrices, DensityMatrix, MomentVector, SpinOperators, Su2Error, TensorBasis,
};
pub use unravel::{
    block_error_slope, kick_step, run_ensemble, KickConfig, TrajectoryEnsemble, UnravelError,
};
