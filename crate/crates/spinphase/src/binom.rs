//! Binomial-coefficient ratios shared by the channel maps and the
//! coherent-state expansion coefficients.
//!
//! The central quantity is
//!
//! ```text
//! r_L(J) = binom(2J, L) / binom(2J+L+1, L) = Π_{i=0}^{L-1} (2J-i)/(2J+L+1-i) ,
//! ```
//!
//! a product of `L` factors each in (0, 1), accumulated directly (for the
//! ratio) and in log space (for the decay rate `-log r_L`), so no
//! intermediate ever overflows — stable to arbitrary `J` without
//! special-function dependencies.  An exact integer path over `u128` is kept
//! for small spins as an independent cross-check.

/// `r_L = binom(2J, L)/binom(2J+L+1, L)` as a direct product, `two_j = 2J`.
pub(crate) fn ratio(two_j: u32, l: u32) -> f64 {
    debug_assert!(l <= two_j, "tensor rank exceeds 2J");
    let tj = f64::from(two_j);
    let lf = f64::from(l);
    let mut r = 1.0;
    for i in 0..l {
        let fi = f64::from(i);
        r *= (tj - fi) / (tj + lf + 1.0 - fi);
    }
    r
}

/// `ln r_L`, accumulated factor-by-factor in log space.
pub(crate) fn ln_ratio(two_j: u32, l: u32) -> f64 {
    debug_assert!(l <= two_j, "tensor rank exceeds 2J");
    let tj = f64::from(two_j);
    let lf = f64::from(l);
    let mut s = 0.0;
    for i in 0..l {
        let fi = f64::from(i);
        s += ((tj - fi) / (tj + lf + 1.0 - fi)).ln();
    }
    s
}

/// Exact `(binom(2J, L), binom(2J+L+1, L))` over `u128`; `None` when the
/// larger coefficient would overflow (safe well past `J = 15`).
#[cfg(test)]
pub(crate) fn exact_ratio_u128(two_j: u32, l: u32) -> Option<(u128, u128)> {
    Some((binomial_u128(two_j as u128, l as u128)?, binomial_u128((two_j + l + 1) as u128, l as u128)?))
}

#[cfg(test)]
fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // multiply before divide stays exact: acc always holds binom(n, i)
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// `ln binom(n, k)` via a factor-wise log sum.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut s = 0.0;
    for i in 1..=k {
        s += ((n - k + i) as f64 / i as f64).ln();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_spin_reference_ratios() {
        // 2J = 1: r_1 = binom(1,1)/binom(3,1) = 1/3
        assert_abs_diff_eq!(ratio(1, 1), 1.0 / 3.0, epsilon = 1e-15);
        // 2J = 2: r_1 = 2/4 = 1/2, r_2 = 1/binom(5,2) = 1/10
        assert_abs_diff_eq!(ratio(2, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ratio(2, 2), 0.1, epsilon = 1e-15);
        // L = 0 is always 1 (empty product)
        for two_j in 0..10 {
            assert_eq!(ratio(two_j, 0), 1.0);
            assert_eq!(ln_ratio(two_j, 0), 0.0);
        }
    }

    #[test]
    fn product_agrees_with_exact_integers() {
        for two_j in 1..=30u32 {
            for l in 0..=two_j {
                let (num, den) = exact_ratio_u128(two_j, l).unwrap();
                let exact = num as f64 / den as f64;
                assert_abs_diff_eq!(ratio(two_j, l), exact, epsilon = 1e-14 * exact.max(1e-300));
                assert_abs_diff_eq!(
                    ln_ratio(two_j, l),
                    exact.ln(),
                    epsilon = 1e-12 * exact.ln().abs().max(1.0)
                );
            }
        }
    }

    #[test]
    fn ln_binomial_matches_exact() {
        assert_abs_diff_eq!(ln_binomial(4, 2), 6f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(ln_binomial(10, 0), 0.0, epsilon = 0.0);
        let exact = binomial_u128(41, 20).unwrap() as f64;
        assert_abs_diff_eq!(ln_binomial(41, 20), exact.ln(), epsilon = 1e-12);
    }

    #[test]
    fn ratios_strictly_decrease_in_l() {
        for two_j in [1u32, 4, 11, 40] {
            let mut prev = 1.0;
            for l in 1..=two_j {
                let r = ratio(two_j, l);
                assert!(r < prev && r > 0.0);
                prev = r;
            }
        }
    }
}
