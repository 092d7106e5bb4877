//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything in the crate lives in dimensions `d = 2J + 1` of at most a few
//! hundred, so a cyclic Jacobi eigensolver is both simpler and more accurate
//! than linking an external LAPACK: it converges to machine precision and has
//! no cross-platform variability.  The flat-slice kernels exist so the
//! Monte Carlo hot loop can run without per-step allocation; the `ndarray`
//! wrappers are the public face.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    let mut out = Array2::zeros((a.ncols(), a.nrows()));
    for ((i, j), v) in a.indexed_iter() {
        out[(j, i)] = v.conj();
    }
    out
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

/// Anticommutator `{a, b} = ab + ba`.
pub fn anticommutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) + b.dot(a)
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise absolute difference.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation from Hermiticity, `max |a - a†|`.
pub fn hermiticity_deviation(a: &Array2<C64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Identity matrix of complex type.
pub fn eye(d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for i in 0..d {
        m[(i, i)] = C64::new(1.0, 0.0);
    }
    m
}

/// In-place cyclic Jacobi diagonalization of a Hermitian matrix in flat
/// row-major storage.
///
/// On return `a` holds the (numerically) diagonal matrix and `v` the unitary
/// with eigenvectors as columns, such that the input satisfies
/// `A = V diag(a) V†`.  Eigenvalues are *not* sorted here.
///
/// `v` must come in as the identity (or any unitary to accumulate onto).
pub fn jacobi_hermitian_flat(a: &mut [C64], v: &mut [C64], d: usize) {
    debug_assert_eq!(a.len(), d * d);
    debug_assert_eq!(v.len(), d * d);
    if d <= 1 {
        return;
    }
    let scale: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    s += a[p * d + q].norm_sqr();
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let b = a[p * d + q];
                let absb = b.norm();
                if absb <= 1e-300 {
                    continue;
                }
                let phase = b / absb; // e^{iβ}
                let app = a[p * d + p].re;
                let aqq = a[q * d + q].re;
                let tau = (app - aqq) / (2.0 * absb);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s; // s·e^{iβ}
                let spc = sp.conj();
                // Right-multiply by the rotation: update columns p, q.
                for i in 0..d {
                    let ap = a[i * d + p];
                    let aq = a[i * d + q];
                    a[i * d + p] = ap * c + aq * spc;
                    a[i * d + q] = aq * c - ap * sp;
                }
                // Left-multiply by its adjoint: update rows p, q.
                for jj in 0..d {
                    let rp = a[p * d + jj];
                    let rq = a[q * d + jj];
                    a[p * d + jj] = rp * c + rq * sp;
                    a[q * d + jj] = rq * c - rp * spc;
                }
                // Accumulate the eigenvector basis.
                for i in 0..d {
                    let vp = v[i * d + p];
                    let vq = v[i * d + q];
                    v[i * d + p] = vp * c + vq * spc;
                    v[i * d + q] = vq * c - vp * sp;
                }
            }
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors, so `a = V diag(λ) V†`.  The input is
/// symmetrized first, making the routine robust to roundoff-level
/// non-Hermiticity; genuinely non-Hermitian input is a caller bug.
pub fn hermitian_eigen(a: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let d = a.nrows();
    assert_eq!(d, a.ncols(), "hermitian_eigen needs a square matrix");
    let mut m = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            m[i * d + j] = 0.5 * (a[(i, j)] + a[(j, i)].conj());
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(1.0, 0.0);
    }
    jacobi_hermitian_flat(&mut m, &mut v, d);
    let mut order: Vec<usize> = (0..d).collect();
    let vals: Vec<f64> = (0..d).map(|i| m[i * d + i].re).collect();
    order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut vecs = Array2::zeros((d, d));
    for (col, &src) in order.iter().enumerate() {
        for i in 0..d {
            vecs[(i, col)] = v[i * d + src];
        }
    }
    (sorted_vals, vecs)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &Array2<C64>) -> f64 {
    hermitian_eigen(a).0[0]
}

/// Unitary `exp(-i A)` of a Hermitian `A`, via eigendecomposition.
pub fn exp_neg_i_hermitian(a: &Array2<C64>) -> Array2<C64> {
    let d = a.nrows();
    let (vals, vecs) = hermitian_eigen(a);
    let mut u = Array2::zeros((d, d));
    for (k, &lam) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -lam);
        for i in 0..d {
            let vik = vecs[(i, k)] * ph;
            for j in 0..d {
                u[(i, j)] += vik * vecs[(j, k)].conj();
            }
        }
    }
    u
}

/// Applies a flat row-major matrix to a vector: `out = m · x`.
pub fn matvec_flat(m: &[C64], x: &[C64], out: &mut [C64], d: usize) {
    for i in 0..d {
        let mut acc = C64::new(0.0, 0.0);
        let row = &m[i * d..(i + 1) * d];
        for (mij, xj) in row.iter().zip(x.iter()) {
            acc += mij * xj;
        }
        out[i] = acc;
    }
}

/// Pairwise (cascade) sum of a slice; bit-stable regardless of thread count
/// because the split points depend only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Complex pairwise sum with the same deterministic split rule as
/// [`pairwise_sum`].
pub fn pairwise_sum_c64(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum_c64(&xs[..mid]) + pairwise_sum_c64(&xs[mid..])
        }
    }
}

/// Converts a flat row-major buffer into an `Array2`.
pub fn from_flat(buf: &[C64], d: usize) -> Array2<C64> {
    Array2::from_shape_vec((d, d), buf.to_vec()).expect("flat buffer length mismatch")
}

/// Flattens an `Array2` into row-major storage.
pub fn to_flat(a: &Array2<C64>) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.nrows() * a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Outer product `x y†` as a matrix.
pub fn outer(x: &Array1<C64>, y: &Array1<C64>) -> Array2<C64> {
    let d = x.len();
    let mut m = Array2::zeros((d, y.len()));
    for i in 0..d {
        for j in 0..y.len() {
            m[(i, j)] = x[i] * y[j].conj();
        }
    }
    m
}
