//! Spin-`J` operator algebra and the irreducible-tensor decomposition.
//!
//! The `d = 2J + 1` dimensional Hilbert space carries the spin components
//! `Jx, Jy, Jz` (`ħ = 1`) in the eigenbasis of `Jz`, ordered `m = J, …, -J`
//! (row 0 is the highest weight).  On operators, the orthonormal tensor basis
//!
//! ```text
//! ⟨J m'| T_{L,k} |J m⟩ = √((2L+1)/(2J+1)) ⟨J m; L k | J m'⟩ ,   L = 0..2J, k = -L..L
//! ```
//!
//! diagonalizes every isotropic channel in this crate, so a density matrix is
//! freely converted to its moment vector `ρ_{Lk} = tr(T†_{L,k} ρ)` and back.

pub mod cg;

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::halfint::HalfInt;
use crate::linalg::{
    self, commutator, frobenius_norm, hermiticity_deviation, hs_inner, min_eigenvalue, trace, C64,
};

pub use cg::clebsch_gordan;

/// Errors from operator-algebra construction and state validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Su2Error {
    #[error("not a valid spin magnitude: {0}")]
    InvalidSpin(HalfInt),
    #[error("projection m = {m} is not admissible for j = {j}")]
    InvalidProjection { j: HalfInt, m: HalfInt },
    #[error("matrix is {rows}x{cols} but spin {j} needs {dim}x{dim}")]
    DimensionMismatch { j: HalfInt, dim: usize, rows: usize, cols: usize },
    #[error("spin labels disagree: {a} vs {b}")]
    JMismatch { a: HalfInt, b: HalfInt },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace:?}, expected 1")]
    TraceNotOne { trace: (f64, f64) },
    #[error("matrix has negative eigenvalue {min:.3e}")]
    NotPositive { min: f64 },
    #[error("moment index (L={l}, k={k}) out of range for L_max = {lmax}")]
    MomentIndex { l: u32, k: i32, lmax: u32 },
    #[error("state vector has zero norm")]
    ZeroVector,
}

/// Tolerances used when validating density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// The spin component matrices for one magnitude `J`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub j: HalfInt,
    pub jx: Array2<C64>,
    pub jy: Array2<C64>,
    pub jz: Array2<C64>,
    pub jplus: Array2<C64>,
    pub jminus: Array2<C64>,
}

impl SpinOperators {
    /// The Casimir `J² = Jx² + Jy² + Jz² = J(J+1)·1`.
    pub fn jsq(&self) -> Array2<C64> {
        let jv = self.j.value();
        let mut m = Array2::zeros((self.j.dim(), self.j.dim()));
        for i in 0..self.j.dim() {
            m[(i, i)] = C64::new(jv * (jv + 1.0), 0.0);
        }
        m
    }
}

/// Builds `Jx, Jy, Jz, J±` for spin `j` in the descending-`m` basis.
///
/// Ladder action: `J₊ |J,m⟩ = √((J-m)(J+m+1)) |J,m+1⟩`, so `J₊` has its
/// nonzero entries on the superdiagonal.
///
/// # Panics
/// If `j` is negative.
pub fn spin_matrices(j: HalfInt) -> SpinOperators {
    assert!(j.is_valid_spin(), "spin_matrices: negative magnitude {j}");
    let d = j.dim();
    let two_j = f64::from(j.doubled());
    let mut jz = Array2::<C64>::zeros((d, d));
    let mut jplus = Array2::<C64>::zeros((d, d));
    for i in 0..d {
        jz[(i, i)] = C64::new(j.projection_at(i).value(), 0.0);
        if i > 0 {
            // column i holds m = J - i; raising lands on row i-1
            let amp = (i as f64 * (two_j + 1.0 - i as f64)).sqrt();
            jplus[(i - 1, i)] = C64::new(amp, 0.0);
        }
    }
    let jminus = linalg::dagger(&jplus);
    let jx = (&jplus + &jminus).mapv(|v| v * 0.5);
    let jy = (&jplus - &jminus).mapv(|v| v * C64::new(0.0, -0.5));
    SpinOperators { j, jx, jy, jz, jplus, jminus }
}

/// Flat index of the `(L, k)` moment: `L² + L + k`.
pub fn moment_index(l: u32, k: i32) -> usize {
    debug_assert!(k.unsigned_abs() <= l);
    (l * l) as usize + (l as i32 + k) as usize
}

/// The orthonormal irreducible-tensor operator basis for one spin.
///
/// Orthonormality is in the Hilbert–Schmidt sense,
/// `tr(T†_{L,k} T_{L',k'}) = δ_{LL'} δ_{kk'}`, and the adjoint rule
/// `T†_{L,k} = (-1)^k T_{L,-k}` holds entrywise.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    j: HalfInt,
    ops: Vec<Array2<C64>>,
}

impl TensorBasis {
    /// Builds all `(2J+1)²` tensor operators for spin `j`.
    ///
    /// # Panics
    /// If `j` is negative.
    pub fn build(j: HalfInt) -> TensorBasis {
        assert!(j.is_valid_spin(), "TensorBasis: negative magnitude {j}");
        let d = j.dim();
        let lmax = j.doubled() as u32; // L runs over integers 0..=2J
        let mut facts = cg::Factorials::new();
        let mut ops = Vec::with_capacity(d * d);
        for l in 0..=lmax {
            let lh = HalfInt::from_int(l as i32);
            let scale = ((2.0 * f64::from(l) + 1.0) / d as f64).sqrt();
            for k in -(l as i32)..=(l as i32) {
                let kh = HalfInt::from_int(k);
                let mut t = Array2::<C64>::zeros((d, d));
                for col in 0..d {
                    let m = j.projection_at(col);
                    let mp = m + kh;
                    if j.admits_projection(mp) {
                        let row = j.index_of(mp);
                        let c = cg::cg_with_table(&mut facts, j, m, lh, kh, j, mp)
                            .expect("validated quantum numbers");
                        t[(row, col)] = C64::new(scale * c, 0.0);
                    }
                }
                ops.push(t);
            }
        }
        TensorBasis { j, ops }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    /// Largest rank in the basis, `L_max = 2J`.
    pub fn lmax(&self) -> u32 {
        self.j.doubled() as u32
    }

    /// The operator `T_{L,k}`.
    ///
    /// # Panics
    /// If the index is out of range; use [`TensorBasis::get`] for a checked
    /// lookup.
    pub fn element(&self, l: u32, k: i32) -> &Array2<C64> {
        self.get(l, k).expect("tensor index out of range")
    }

    /// Checked lookup of `T_{L,k}`.
    pub fn get(&self, l: u32, k: i32) -> Result<&Array2<C64>, Su2Error> {
        if l > self.lmax() || k.unsigned_abs() > l {
            return Err(Su2Error::MomentIndex { l, k, lmax: self.lmax() });
        }
        Ok(&self.ops[moment_index(l, k)])
    }

    /// Iterates `(L, k, T_{L,k})` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, &Array2<C64>)> {
        let lmax = self.lmax();
        (0..=lmax)
            .flat_map(|l| (-(l as i32)..=(l as i32)).map(move |k| (l, k)))
            .map(move |(l, k)| (l, k, &self.ops[moment_index(l, k)]))
    }
}

/// Moments `ρ_{Lk} = tr(T†_{L,k} ρ)` of an operator, indexed like the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    j: HalfInt,
    coeffs: Vec<C64>,
}

impl MomentVector {
    pub fn zeros(j: HalfInt) -> Self {
        MomentVector { j, coeffs: vec![C64::new(0.0, 0.0); j.dim() * j.dim()] }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn lmax(&self) -> u32 {
        self.j.doubled() as u32
    }

    pub fn get(&self, l: u32, k: i32) -> C64 {
        assert!(l <= self.lmax() && k.unsigned_abs() <= l, "moment index out of range");
        self.coeffs[moment_index(l, k)]
    }

    pub fn set(&mut self, l: u32, k: i32, v: C64) {
        assert!(l <= self.lmax() && k.unsigned_abs() <= l, "moment index out of range");
        self.coeffs[moment_index(l, k)] = v;
    }

    /// Iterates `(L, k, ρ_{Lk})` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, C64)> + '_ {
        let lmax = self.lmax();
        (0..=lmax)
            .flat_map(|l| (-(l as i32)..=(l as i32)).map(move |k| (l, k)))
            .map(move |(l, k)| (l, k, self.coeffs[moment_index(l, k)]))
    }

    /// The monopole moment `ρ_{00}`; for a unit-trace state it equals
    /// `1/√(2J+1)`.
    pub fn monopole(&self) -> C64 {
        self.coeffs[0]
    }

    /// Largest violation of the Hermiticity image rule
    /// `ρ_{L,-k} = (-1)^k conj(ρ_{L,k})`.
    pub fn hermiticity_image_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for l in 0..=self.lmax() {
            for k in 0..=(l as i32) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let a = self.coeffs[moment_index(l, -k)];
                let b = self.coeffs[moment_index(l, k)].conj() * sign;
                dev = dev.max((a - b).norm());
            }
        }
        dev
    }

    /// Sum of squared moduli; equals `tr(ρ²)` for the moments of `ρ`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// A validated density matrix for one spin.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    j: HalfInt,
    mat: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (≤ 1e-12), unit trace (≤ 1e-12) and spectrum
    /// (eigenvalues ≥ -1e-10) before accepting the matrix.
    pub fn new(j: HalfInt, mat: Array2<C64>) -> Result<Self, Su2Error> {
        if !j.is_valid_spin() {
            return Err(Su2Error::InvalidSpin(j));
        }
        let d = j.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Su2Error::DimensionMismatch { j, dim: d, rows: mat.nrows(), cols: mat.ncols() });
        }
        let dev = hermiticity_deviation(&mat);
        if dev > HERMITICITY_TOL {
            return Err(Su2Error::NotHermitian { deviation: dev });
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Su2Error::TraceNotOne { trace: (tr.re, tr.im) });
        }
        let min = min_eigenvalue(&mat);
        if min < EIGENVALUE_FLOOR {
            return Err(Su2Error::NotPositive { min });
        }
        Ok(DensityMatrix { j, mat })
    }

    /// Wraps a matrix without validation.  For intermediate results whose
    /// invariants are guaranteed by construction; prefer [`DensityMatrix::new`].
    pub fn from_matrix_unchecked(j: HalfInt, mat: Array2<C64>) -> Self {
        DensityMatrix { j, mat }
    }

    /// Pure state `|ψ⟩⟨ψ|` from an amplitude vector (normalized here).
    pub fn pure(j: HalfInt, psi: &Array1<C64>) -> Result<Self, Su2Error> {
        if !j.is_valid_spin() {
            return Err(Su2Error::InvalidSpin(j));
        }
        let d = j.dim();
        if psi.len() != d {
            return Err(Su2Error::DimensionMismatch { j, dim: d, rows: psi.len(), cols: 1 });
        }
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Su2Error::ZeroVector);
        }
        let scaled = psi.mapv(|a| a / norm);
        Ok(DensityMatrix { j, mat: linalg::outer(&scaled, &scaled) })
    }

    /// The eigenstate `|J, m⟩⟨J, m|`.
    pub fn basis_state(j: HalfInt, m: HalfInt) -> Result<Self, Su2Error> {
        if !j.is_valid_spin() {
            return Err(Su2Error::InvalidSpin(j));
        }
        if !j.admits_projection(m) {
            return Err(Su2Error::InvalidProjection { j, m });
        }
        let d = j.dim();
        let mut mat = Array2::zeros((d, d));
        let i = j.index_of(m);
        mat[(i, i)] = C64::new(1.0, 0.0);
        Ok(DensityMatrix { j, mat })
    }

    /// The maximally mixed state `1/(2J+1)`.
    pub fn maximally_mixed(j: HalfInt) -> Self {
        let d = j.dim();
        let mut mat = Array2::zeros((d, d));
        for i in 0..d {
            mat[(i, i)] = C64::new(1.0 / d as f64, 0.0);
        }
        DensityMatrix { j, mat }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    /// Purity `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        hs_inner(&self.mat, &self.mat).re
    }

    /// Smallest eigenvalue (0 down to roundoff for valid states).
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.mat)
    }
}

/// Expands a state into its tensor moments, `ρ_{Lk} = tr(T†_{L,k} ρ)`.
pub fn expand(rho: &DensityMatrix, basis: &TensorBasis) -> Result<MomentVector, Su2Error> {
    if rho.j() != basis.j() {
        return Err(Su2Error::JMismatch { a: rho.j(), b: basis.j() });
    }
    Ok(expand_matrix(rho.matrix(), basis))
}

/// Moment expansion of an arbitrary operator (not necessarily a state).
pub fn expand_matrix(op: &Array2<C64>, basis: &TensorBasis) -> MomentVector {
    let mut m = MomentVector::zeros(basis.j());
    for (l, k, t) in basis.iter() {
        m.set(l, k, hs_inner(t, op));
    }
    m
}

/// Result of reassembling a matrix from moments.
///
/// `hermitian` reports whether the moments satisfied the Hermiticity image
/// rule (within 1e-12); when they do not, the matrix is returned anyway and
/// is genuinely non-Hermitian.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub matrix: Array2<C64>,
    pub hermitian: bool,
}

/// Linear inverse of [`expand`]: `ρ = Σ_{L,k} ρ_{Lk} T_{L,k}`.
pub fn reconstruct(m: &MomentVector, basis: &TensorBasis) -> Result<Reconstruction, Su2Error> {
    if m.j() != basis.j() {
        return Err(Su2Error::JMismatch { a: m.j(), b: basis.j() });
    }
    let d = basis.j().dim();
    let mut mat = Array2::<C64>::zeros((d, d));
    for (l, k, t) in basis.iter() {
        let c = m.get(l, k);
        if c != C64::new(0.0, 0.0) {
            mat.zip_mut_with(t, |o, ti| *o += c * ti);
        }
    }
    let hermitian = m.hermiticity_image_deviation() <= HERMITICITY_TOL;
    Ok(Reconstruction { matrix: mat, hermitian })
}

/// [`reconstruct`] followed by full density-matrix validation.
pub fn reconstruct_state(m: &MomentVector, basis: &TensorBasis) -> Result<DensityMatrix, Su2Error> {
    let rec = reconstruct(m, basis)?;
    DensityMatrix::new(basis.j(), rec.matrix)
}

/// Frobenius residuals of the defining commutation relations of the tensor
/// basis against the spin matrices.
#[derive(Debug, Clone, Copy)]
pub struct CommutatorResiduals {
    /// max over (L,k) of ‖[Jz, T_{L,k}] - k T_{L,k}‖
    pub jz: f64,
    /// max over (L,k) of ‖[J₊, T_{L,k}] - √((L-k)(L+k+1)) T_{L,k+1}‖
    pub raising: f64,
    /// max over (L,k) of ‖[J₋, T_{L,k}] - √((L+k)(L-k+1)) T_{L,k-1}‖
    pub lowering: f64,
}

impl CommutatorResiduals {
    pub fn max(&self) -> f64 {
        self.jz.max(self.raising).max(self.lowering)
    }
}

/// Verifies that the tensor basis transforms correctly under the spin
/// algebra; the returned residuals are at roundoff scale for a correct build.
pub fn commutator_check(
    ops: &SpinOperators,
    basis: &TensorBasis,
) -> Result<CommutatorResiduals, Su2Error> {
    if ops.j != basis.j() {
        return Err(Su2Error::JMismatch { a: ops.j, b: basis.j() });
    }
    let d = ops.j.dim();
    let zero = Array2::<C64>::zeros((d, d));
    let mut res = CommutatorResiduals { jz: 0.0, raising: 0.0, lowering: 0.0 };
    for (l, k, t) in basis.iter() {
        let li = l as i32;
        let czz = commutator(&ops.jz, t) - t.mapv(|v| v * f64::from(k));
        res.jz = res.jz.max(frobenius_norm(&czz));

        let up_target = if k < li { basis.element(l, k + 1) } else { &zero };
        let up_amp = (f64::from(li - k) * f64::from(li + k + 1)).sqrt();
        let cup = commutator(&ops.jplus, t) - up_target.mapv(|v| v * up_amp);
        res.raising = res.raising.max(frobenius_norm(&cup));

        let dn_target = if -k < li { basis.element(l, k - 1) } else { &zero };
        let dn_amp = (f64::from(li + k) * f64::from(li - k + 1)).sqrt();
        let cdn = commutator(&ops.jminus, t) - dn_target.mapv(|v| v * dn_amp);
        res.lowering = res.lowering.max(frobenius_norm(&cdn));
    }
    Ok(res)
}
