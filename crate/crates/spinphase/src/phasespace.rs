//! Quasiprobability distributions on the sphere and their relaxation.
//!
//! A spin state maps to a family of real functions on the sphere indexed by
//! an ordering parameter `σ`,
//!
//! ```text
//! F^σ(p) = tr(ρ ŵ^σ(p)),
//! ŵ^σ(p) = a_J Σ_{L,k} r_L^{-σ/2} Y^k_L(p) T_{L,k},   a_J = (2J+1)^{-1/2},
//! ```
//!
//! where `r_L` is the measurement-channel eigenvalue of rank `L` and the
//! harmonics are normalized to `Y⁰₀ = 1`.  `σ = -1` is the Husimi function
//! (coherent-state expectation, manifestly positive), `σ = 0` the Wigner
//! function, `σ = +1` the Glauber–Sudarshan function.
//!
//! Under the isotropic Lindblad flow every member of the family obeys the
//! heat equation on the sphere: the spectral coefficients decay as
//! `e^{-γL(L+1)t/2}` — equivalently the distribution is convolved with the
//! zonal heat kernel.  One measurement-channel application lowers `σ` by 2
//! at fixed state, so negativity is erased after `⌈(σ+1)/2⌉` measurements or
//! a computable Lindblad time; both are exposed here along with an empirical
//! grid scan.

use ndarray::Array2;

use crate::binom;
use crate::coherent::SphericalQuadrature;
use crate::halfint::HalfInt;
use crate::harmonics::{self, PhasePoint};
use crate::linalg::{self, C64};
use crate::su2::{expand, DensityMatrix, MomentVector, Su2Error, TensorBasis};
use thiserror::Error;

/// Errors from phase-space construction and propagation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseSpaceError {
    #[error("harmonic index (L={l}, k={k}) is out of range")]
    HarmonicIndex { l: u32, k: i32 },
    #[error("ordering parameter must be finite, got {0}")]
    InvalidSigma(f64),
    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("decoherence rate must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("quadrature degree {actual} below the exactness requirement {required}")]
    InsufficientDegree { required: u32, actual: u32 },
    #[error("distribution carries no grid samples")]
    MissingGrid,
    #[error("grid has {actual} samples but the quadrature has {expected} nodes")]
    GridLength { expected: usize, actual: usize },
    #[error("no positive time found up to t = {0}; the scan floor was never reached")]
    NoPositiveTime(f64),
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

/// Ordering parameter of the distribution family.
///
/// Any finite real value is admitted; the integer points carry names:
/// `-1` Husimi, `0` Wigner, `+1` Glauber–Sudarshan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaIndex(pub f64);

impl SigmaIndex {
    pub const HUSIMI: SigmaIndex = SigmaIndex(-1.0);
    pub const WIGNER: SigmaIndex = SigmaIndex(0.0);
    pub const GLAUBER: SigmaIndex = SigmaIndex(1.0);

    /// Requires a finite value.
    pub fn new(value: f64) -> Result<Self, PhaseSpaceError> {
        if !value.is_finite() {
            return Err(PhaseSpaceError::InvalidSigma(value));
        }
        Ok(SigmaIndex(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The parameter after `n` measurement-channel applications at fixed
    /// state: `σ - 2n`.
    pub fn shifted_by_measurements(self, n: u32) -> Self {
        SigmaIndex(self.0 - 2.0 * f64::from(n))
    }
}

impl std::fmt::Display for SigmaIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Normalization `a_J = (2J+1)^{-1/2}`.
fn a_scale(dim: usize) -> f64 {
    (dim as f64).sqrt().recip()
}

/// Rank weight `r_L^{-σ/2}` of the kernel.
fn ordering_weight(two_j: u32, l: u32, sigma: SigmaIndex) -> f64 {
    binom::ratio(two_j, l).powf(-0.5 * sigma.0)
}

/// Checked harmonic lookup: `Y^k_L(p)` in the `Y⁰₀ = 1` convention.
pub fn spherical_harmonic(l: u32, k: i32, p: PhasePoint) -> Result<C64, PhaseSpaceError> {
    if k.unsigned_abs() > l {
        return Err(PhaseSpaceError::HarmonicIndex { l, k });
    }
    Ok(harmonics::spherical_harmonic(l, k, p))
}

/// The operator-valued kernel `ŵ^σ` of one spin and ordering parameter.
///
/// At every point the kernel is Hermitian with unit trace, and its integral
/// over the sphere with the `(2J+1)`-weighted measure is the identity.
#[derive(Debug, Clone)]
pub struct SwKernel {
    sigma: SigmaIndex,
    basis: TensorBasis,
    weights: Vec<f64>,
}

impl SwKernel {
    pub fn new(j: HalfInt, sigma: SigmaIndex) -> SwKernel {
        assert!(sigma.0.is_finite(), "ordering parameter must be finite");
        let basis = TensorBasis::build(j);
        let two_j = j.doubled() as u32;
        let weights = (0..=two_j).map(|l| ordering_weight(two_j, l, sigma)).collect();
        SwKernel { sigma, basis, weights }
    }

    pub fn j(&self) -> HalfInt {
        self.basis.j()
    }

    pub fn sigma(&self) -> SigmaIndex {
        self.sigma
    }

    pub fn basis(&self) -> &TensorBasis {
        &self.basis
    }

    /// The matrix `ŵ^σ(p) = a_J Σ_{L,k} r_L^{-σ/2} Y^k_L(p) T_{L,k}`.
    pub fn matrix(&self, p: PhasePoint) -> Array2<C64> {
        let d = self.j().dim();
        let table = harmonics::eval_all(self.basis.lmax(), p);
        let aj = a_scale(d);
        let mut acc = Array2::<C64>::zeros((d, d));
        for (l, k, t) in self.basis.iter() {
            let c = table.get(l, k) * (aj * self.weights[l as usize]);
            ndarray::Zip::from(&mut acc).and(t).for_each(|a, &b| *a += b * c);
        }
        acc
    }

    /// `tr(ρ ŵ^σ(p))` through the explicit kernel matrix — the brute-force
    /// counterpart of the spectral evaluation in [`QuasiDist`].
    pub fn trace_with(&self, rho: &Array2<C64>, p: PhasePoint) -> C64 {
        let w = self.matrix(p);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..w.nrows() {
            for jx in 0..w.ncols() {
                acc += rho[(i, jx)] * w[(jx, i)];
            }
        }
        acc
    }
}

/// Free-function form of the kernel matrix; builds the tensor basis on each
/// call, so prefer [`SwKernel`] in loops.
pub fn sw_kernel_matrix(j: HalfInt, sigma: SigmaIndex, p: PhasePoint) -> Array2<C64> {
    SwKernel::new(j, sigma).matrix(p)
}

/// One member of the distribution family: spectral coefficients
/// `g_{Lk} = r_L^{-σ/2} ρ_{Lk}`, evaluated as `F(p) = a_J Σ g_{Lk} conj(Y^k_L(p))`,
/// optionally with samples on a quadrature node set.
///
/// For a physical state the coefficients obey the image rule
/// `g_{L,-k} = (-1)^k conj(g_{Lk})` (reality on the sphere) and
/// `g_{00} = 1/√(2J+1)` (normalization `∫F dμ^J = 1`).
#[derive(Debug, Clone)]
pub struct QuasiDist {
    sigma: SigmaIndex,
    spectral: MomentVector,
    grid: Option<Vec<f64>>,
    grid_max_imag: f64,
    time_label: f64,
}

impl QuasiDist {
    /// Wraps raw spectral coefficients (no grid).  The caller is responsible
    /// for the image rule if a real distribution is expected.
    pub fn from_coefficients(sigma: SigmaIndex, coeffs: MomentVector, time_label: f64) -> Self {
        QuasiDist { sigma, spectral: coeffs, grid: None, grid_max_imag: 0.0, time_label }
    }

    pub fn j(&self) -> HalfInt {
        self.spectral.j()
    }

    pub fn sigma(&self) -> SigmaIndex {
        self.sigma
    }

    /// The coefficients `g_{Lk}`.
    pub fn coefficients(&self) -> &MomentVector {
        &self.spectral
    }

    /// Samples on the quadrature nodes this distribution was built with, in
    /// node order, if any.
    pub fn grid(&self) -> Option<&[f64]> {
        self.grid.as_deref()
    }

    /// Largest imaginary part dropped when the grid was sampled.
    pub fn grid_max_imag(&self) -> f64 {
        self.grid_max_imag
    }

    /// Time (or iteration count) this snapshot is labeled with.
    pub fn time_label(&self) -> f64 {
        self.time_label
    }

    /// Spectral evaluation `a_J Σ g_{Lk} conj(Y^k_L(p))` with the imaginary
    /// part kept (it is ≤ 1e-12 for Hermitian input).
    pub fn evaluate_complex(&self, p: PhasePoint) -> C64 {
        let table = harmonics::eval_all(self.spectral.lmax(), p);
        let mut acc = C64::new(0.0, 0.0);
        for (l, k, g) in self.spectral.iter() {
            acc += g * table.get(l, k).conj();
        }
        acc * a_scale(self.j().dim())
    }

    /// Real part of the spectral evaluation.
    pub fn evaluate(&self, p: PhasePoint) -> f64 {
        self.evaluate_complex(p).re
    }
}

/// Builds `F^σ` of a state: spectral coefficients always, plus kernel-traced
/// samples `tr(ρ ŵ^σ)` on the quadrature nodes when one is supplied.  The
/// two representations are computed independently and agree to ≤ 1e-11.
pub fn quasidistribution(
    rho: &DensityMatrix,
    sigma: SigmaIndex,
    quad: Option<&SphericalQuadrature>,
) -> Result<QuasiDist, PhaseSpaceError> {
    if !sigma.0.is_finite() {
        return Err(PhaseSpaceError::InvalidSigma(sigma.0));
    }
    let kernel = SwKernel::new(rho.j(), sigma);
    let moments = expand(rho, kernel.basis())?;
    let two_j = rho.j().doubled() as u32;
    let mut spectral = MomentVector::zeros(rho.j());
    for (l, k, v) in moments.iter() {
        spectral.set(l, k, v * ordering_weight(two_j, l, sigma));
    }
    let mut grid = None;
    let mut grid_max_imag = 0.0f64;
    if let Some(q) = quad {
        if q.j() != rho.j() {
            return Err(Su2Error::JMismatch { a: q.j(), b: rho.j() }.into());
        }
        let mut vals = Vec::with_capacity(q.nodes().len());
        for &(p, _) in q.nodes() {
            let v = kernel.trace_with(rho.matrix(), p);
            grid_max_imag = grid_max_imag.max(v.im.abs());
            vals.push(v.re);
        }
        grid = Some(vals);
    }
    Ok(QuasiDist { sigma, spectral, grid, grid_max_imag, time_label: 0.0 })
}

/// Scales each rank by `factor(L)`; grid samples are dropped as stale.
fn scale_ranks(f: &QuasiDist, label: f64, factor: impl Fn(u32) -> f64) -> QuasiDist {
    let mut spectral = f.coefficients().clone();
    for l in 0..=spectral.lmax() {
        let s = factor(l);
        for k in -(l as i32)..=(l as i32) {
            spectral.set(l, k, f.coefficients().get(l, k) * s);
        }
    }
    QuasiDist {
        sigma: f.sigma,
        spectral,
        grid: None,
        grid_max_imag: 0.0,
        time_label: label,
    }
}

/// Heat flow in spectral form: `g_{Lk} ← e^{-γL(L+1)t/2} g_{Lk}`.
///
/// This is exactly the image of the Lindblad flow: building `F^σ` of the
/// evolved state equals heat-propagating `F^σ` of the initial state.
pub fn heat_propagate_spectral(
    f: &QuasiDist,
    t: f64,
    gamma: f64,
) -> Result<QuasiDist, PhaseSpaceError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(PhaseSpaceError::InvalidGamma(gamma));
    }
    if !(t >= 0.0) {
        return Err(PhaseSpaceError::NegativeTime(t));
    }
    Ok(scale_ranks(f, f.time_label + t, |l| {
        let lf = f64::from(l);
        (-0.5 * gamma * lf * (lf + 1.0) * t).exp()
    }))
}

/// All Legendre polynomials `P_0..P_lmax` at `x` by upward recurrence.
fn legendre_all(lmax: u32, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if lmax == 0 {
        return;
    }
    out.push(x);
    for l in 2..=lmax {
        let lf = l as f64;
        let next = ((2.0 * lf - 1.0) * x * out[l as usize - 1]
            - (lf - 1.0) * out[l as usize - 2])
            / lf;
        out.push(next);
    }
}

/// Heat flow by zonal-kernel convolution of the grid samples:
///
/// ```text
/// F(p,t) = Σ_{L≤2J} e^{-γL(L+1)t/2} (2L+1) Σ_j w_j P_L(cos η(p, p_j)) F(p_j, 0)
/// ```
///
/// with `η` the geodesic angle.  Independent of the spectral route except
/// for the shared initial samples; the output also carries the spectrally
/// decayed coefficients so the object stays self-consistent.
pub fn heat_propagate_kernel(
    f: &QuasiDist,
    quad: &SphericalQuadrature,
    t: f64,
    gamma: f64,
) -> Result<QuasiDist, PhaseSpaceError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(PhaseSpaceError::InvalidGamma(gamma));
    }
    if !(t >= 0.0) {
        return Err(PhaseSpaceError::NegativeTime(t));
    }
    let required = 2 * f.j().doubled() as u32;
    if quad.degree() < required {
        return Err(PhaseSpaceError::InsufficientDegree {
            required,
            actual: quad.degree(),
        });
    }
    let initial = f.grid().ok_or(PhaseSpaceError::MissingGrid)?;
    if initial.len() != quad.nodes().len() {
        return Err(PhaseSpaceError::GridLength {
            expected: quad.nodes().len(),
            actual: initial.len(),
        });
    }
    let lmax = f.j().doubled() as u32;
    let damp: Vec<f64> = (0..=lmax)
        .map(|l| {
            let lf = f64::from(l);
            (-0.5 * gamma * lf * (lf + 1.0) * t).exp() * (2.0 * lf + 1.0)
        })
        .collect();
    let mut pl = Vec::with_capacity(lmax as usize + 1);
    let mut out = Vec::with_capacity(initial.len());
    for &(p, _) in quad.nodes() {
        let mut terms = Vec::with_capacity(initial.len());
        for (&(q, w), &f0) in quad.nodes().iter().zip(initial.iter()) {
            legendre_all(lmax, p.geodesic_cos(&q), &mut pl);
            let kernel: f64 =
                damp.iter().zip(pl.iter()).map(|(&d, &leg)| d * leg).sum();
            terms.push(kernel * w * f0);
        }
        out.push(linalg::pairwise_sum(&terms));
    }
    let mut propagated = scale_ranks(f, f.time_label + t, |l| {
        let lf = f64::from(l);
        (-0.5 * gamma * lf * (lf + 1.0) * t).exp()
    });
    propagated.grid = Some(out);
    Ok(propagated)
}

/// Largest pointwise violation of the heat equation,
/// `max_p |∂_t F(p) - (γ/2) Δ_{S²} F(p)|`, with the time derivative taken by
/// central differences over `±delta_t` and the Laplacian spectrally
/// (`Δ Y^k_L = -L(L+1) Y^k_L`).
///
/// The central difference leaves an `O(delta_t²)` floor proportional to the
/// cube of the largest rank rate, so the residual is meaningful only for
/// `delta_t` well below the fastest decay time.
pub fn heat_residual(
    f: &QuasiDist,
    gamma: f64,
    delta_t: f64,
    points: &[PhasePoint],
) -> Result<f64, PhaseSpaceError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(PhaseSpaceError::InvalidGamma(gamma));
    }
    if !(delta_t > 0.0) {
        return Err(PhaseSpaceError::NegativeTime(delta_t));
    }
    let lmax = f.coefficients().lmax();
    let rate = |l: u32| {
        let lf = f64::from(l);
        0.5 * gamma * lf * (lf + 1.0)
    };
    let aj = a_scale(f.j().dim());
    let mut worst = 0.0f64;
    for &p in points {
        let table = harmonics::eval_all(lmax, p);
        let mut forward = C64::new(0.0, 0.0);
        let mut backward = C64::new(0.0, 0.0);
        let mut laplace = C64::new(0.0, 0.0);
        for (l, k, g) in f.coefficients().iter() {
            let y = table.get(l, k).conj();
            let lam = rate(l);
            forward += g * y * (-lam * delta_t).exp();
            backward += g * y * (lam * delta_t).exp();
            let lf = f64::from(l);
            laplace += g * y * (-lf * (lf + 1.0));
        }
        let dt = (forward - backward) * (aj / (2.0 * delta_t));
        let rhs = laplace * (aj * 0.5 * gamma);
        worst = worst.max((dt - rhs).norm());
    }
    Ok(worst)
}

/// The measurement-channel shift: `F^σ` of the `n`-times measured state is
/// `F^{σ-2n}` of the original state.  Pointwise the two objects are equal;
/// this returns the relabeled distribution with coefficients scaled by
/// `r_L^n`.
pub fn povm_sigma_shift(f: &QuasiDist, n: u32) -> QuasiDist {
    let two_j = f.j().doubled() as u32;
    let mut out = scale_ranks(f, f.time_label, |l| binom::ratio(two_j, l).powi(n as i32));
    out.sigma = f.sigma.shifted_by_measurements(n);
    out
}

/// Equiangular scan grid: `n_theta` colatitudes including both poles,
/// `n_phi` equally spaced azimuths.
///
/// # Panics
/// If `n_theta < 2` or `n_phi < 1`.
pub fn display_grid(n_theta: usize, n_phi: usize) -> Vec<PhasePoint> {
    assert!(n_theta >= 2 && n_phi >= 1, "display grid too small");
    let mut points = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for jx in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * jx as f64 / n_phi as f64;
            points.push(PhasePoint::new(theta, phi));
        }
    }
    points
}

/// Distribution values over [`display_grid`], shaped `n_theta × n_phi`
/// with row 0 at the north pole (θ = 0).
pub fn evaluate_grid(f: &QuasiDist, n_theta: usize, n_phi: usize) -> Array2<f64> {
    let points = display_grid(n_theta, n_phi);
    Array2::from_shape_fn((n_theta, n_phi), |(i, jx)| f.evaluate(points[i * n_phi + jx]))
}

/// Result of a pointwise minimum scan.
#[derive(Debug, Clone, Copy)]
pub struct PositivityScan {
    pub min: f64,
    pub argmin: PhasePoint,
}

/// Minimum of the distribution over an equiangular grid.  The scan bounds
/// the true minimum only to the grid resolution; doubling the resolution
/// and comparing gives a practical error bar.
pub fn positivity_scan(f: &QuasiDist, n_theta: usize, n_phi: usize) -> PositivityScan {
    let mut best = PositivityScan {
        min: f64::INFINITY,
        argmin: PhasePoint::new(0.0, 0.0),
    };
    for p in display_grid(n_theta, n_phi) {
        let v = f.evaluate(p);
        if v < best.min {
            best = PositivityScan { min: v, argmin: p };
        }
    }
    best
}

/// Number of measurements after which `F^σ` is manifestly positive:
/// `⌈(σ+1)/2⌉`, floored at zero.
pub fn positivity_iterations(sigma: SigmaIndex) -> u32 {
    let n = ((sigma.0 + 1.0) / 2.0).ceil();
    if n > 0.0 {
        n as u32
    } else {
        0
    }
}

/// Whether the positivity time is exact or only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityKind {
    Exact,
    Bound,
}

/// A Lindblad time after which `F^σ` of any state is pointwise positive.
#[derive(Debug, Clone, Copy)]
pub struct PositivityTime {
    pub t_star: f64,
    pub kind: PositivityKind,
    /// Large-spin closed form `(σ+1)/(4γJ²)·(4J log2 - ½log(2πJ))`,
    /// reported for `J ≥ 10`.
    pub asymptote: Option<f64>,
}

/// Computes the positivity time.
///
/// * `J = 1/2` (and the trivial `J = 0`): `t* = (log3/γ)·⌈(σ+1)/2⌉`,
///   exact — each measurement equals a Lindblad interval `log3/γ` there.
/// * `J > 1/2`: `t* = (σ+1)/(2γJ(2J+1))·log binom(4J+1, 2J)`, the time at
///   which every damped rank weight drops below the manifestly positive
///   `σ = -1` weight; reported as a bound, never exact.
///
/// # Panics
/// If `gamma ≤ 0` or not finite.
pub fn positivity_time(j: HalfInt, sigma: SigmaIndex, gamma: f64) -> PositivityTime {
    assert!(gamma > 0.0 && gamma.is_finite(), "positivity_time needs γ > 0");
    let two_j = j.doubled() as u64;
    if two_j <= 1 {
        let t = f64::from(positivity_iterations(sigma)) * 3f64.ln() / gamma;
        return PositivityTime { t_star: t, kind: PositivityKind::Exact, asymptote: None };
    }
    let excess = (sigma.0 + 1.0).max(0.0);
    let jv = j.value();
    let t = excess / (2.0 * gamma * jv * (2.0 * jv + 1.0))
        * binom::ln_binomial(2 * two_j + 1, two_j);
    let asymptote = if jv >= 10.0 {
        Some(
            excess / (4.0 * gamma * jv * jv)
                * (4.0 * jv * 2f64.ln()
                    - 0.5 * (2.0 * std::f64::consts::PI * jv).ln()),
        )
    } else {
        None
    };
    PositivityTime { t_star: t, kind: PositivityKind::Bound, asymptote }
}

/// Whether the damped rank weights at time `t` are all below the manifestly
/// positive `σ = -1` weights: `e^{-γL(L+1)t/2} r_L^{-σ/2} ≤ r_L^{1/2}` for
/// every `L ≤ 2J`.  When true, the distribution is conjectured (and
/// empirically observed) to be pointwise positive.
pub fn damped_kernel_condition(j: HalfInt, sigma: SigmaIndex, gamma: f64, t: f64) -> bool {
    let two_j = j.doubled() as u32;
    (0..=two_j).all(|l| {
        let lf = f64::from(l);
        let damped = (-0.5 * gamma * lf * (lf + 1.0) * t).exp()
            * ordering_weight(two_j, l, sigma);
        damped <= ordering_weight(two_j, l, SigmaIndex::HUSIMI) * (1.0 + 1e-12)
    })
}

/// First time at which the grid minimum clears the floor `-1e-9`, located
/// by doubling then bisection to `rel_tol` relative width.
pub fn first_positive_time(
    f0: &QuasiDist,
    gamma: f64,
    n_theta: usize,
    n_phi: usize,
    rel_tol: f64,
) -> Result<f64, PhaseSpaceError> {
    const FLOOR: f64 = -1e-9;
    let min_at = |t: f64| -> Result<f64, PhaseSpaceError> {
        Ok(positivity_scan(&heat_propagate_spectral(f0, t, gamma)?, n_theta, n_phi).min)
    };
    if min_at(0.0)? >= FLOOR {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 0.5 / gamma;
    let cap = 1e4 / gamma;
    while min_at(hi)? < FLOOR {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(PhaseSpaceError::NoPositiveTime(cap));
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if min_at(mid)? >= FLOOR {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
