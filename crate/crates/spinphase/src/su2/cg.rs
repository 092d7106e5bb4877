//! Clebsch–Gordan coefficients in exact integer arithmetic.
//!
//! The coefficient `⟨j₁ m₁; j₂ m₂ | J M⟩` is evaluated from the closed-form
//! alternating sum
//!
//! ```text
//! C = δ_{M,m₁+m₂} √[(2J+1) Δ(j₁j₂J)²  (J+M)!(J-M)!(j₁+m₁)!(j₁-m₁)!(j₂+m₂)!(j₂-m₂)!]
//!     × Σ_t (-1)^t / [t!(j₁+j₂-J-t)!(j₁-m₁-t)!(j₂+m₂-t)!(J-j₂+m₁+t)!(J-j₁-m₂+t)!]
//! ```
//!
//! with `Δ(abc)² = (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!`, in the
//! Condon–Shortley phase convention (all coefficients real, and
//! `⟨j₁ j₁; j₂ J-j₁ | J J⟩ > 0`).
//!
//! The factorials grow far beyond `f64` range already for modest spins, and
//! the alternating sum cancels catastrophically in floating point, so every
//! intermediate here is an exact big rational; the only rounding happens in
//! the final square root.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::halfint::HalfInt;

use super::Su2Error;

/// Growable table of exact factorials.
pub(crate) struct Factorials {
    table: Vec<BigInt>,
}

impl Factorials {
    pub(crate) fn new() -> Self {
        Factorials { table: vec![BigInt::one()] }
    }

    fn get(&mut self, n: i64) -> BigInt {
        assert!(n >= 0, "factorial of negative integer");
        let n = n as usize;
        while self.table.len() <= n {
            let k = self.table.len();
            let next = self.table[k - 1].clone() * BigInt::from(k);
            self.table.push(next);
        }
        self.table[n].clone()
    }
}

/// Rounds an exact big rational to the nearest `f64`, safe for numerators and
/// denominators far outside `f64` range.  The quotient is first scaled by a
/// power of two to ~80 bits, converted, then rescaled (a power of two, so the
/// rescale is exact).
fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let num = r.numer().abs();
    let den = r.denom().abs();
    let shift: i64 = 80 - (num.bits() as i64 - den.bits() as i64);
    let q: BigInt = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    sign * qf * 2f64.powi(-shift as i32)
}

/// Exact-integer core shared by the public function and the tensor-basis
/// builder (which reuses one factorial table across many coefficients).
pub(crate) fn cg_with_table(
    facts: &mut Factorials,
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64, Su2Error> {
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if !jj.is_valid_spin() {
            return Err(Su2Error::InvalidSpin(jj));
        }
        if !jj.admits_projection(mm) {
            return Err(Su2Error::InvalidProjection { j: jj, m: mm });
        }
    }
    // Selection rules give an exact zero, not an error.
    if m.doubled() != m1.doubled() + m2.doubled() {
        return Ok(0.0);
    }
    let (t1, t2, tj) = (i64::from(j1.doubled()), i64::from(j2.doubled()), i64::from(j.doubled()));
    if tj > t1 + t2 || tj < (t1 - t2).abs() || (t1 + t2 - tj) % 2 != 0 {
        return Ok(0.0);
    }

    // All of these are exact integers once the rules above hold.
    let half = |x: i64| -> i64 {
        debug_assert!(x % 2 == 0);
        x / 2
    };
    let (tm1, tm2, tm) = (i64::from(m1.doubled()), i64::from(m2.doubled()), i64::from(m.doubled()));
    let a = half(t1 + t2 - tj);
    let b = half(t1 - t2 + tj);
    let c = half(-t1 + t2 + tj);
    let j1p = half(t1 + tm1);
    let j1m = half(t1 - tm1);
    let j2p = half(t2 + tm2);
    let j2m = half(t2 - tm2);
    let jp = half(tj + tm);
    let jm = half(tj - tm);
    let e = half(tj - t2 + tm1); // J - j₂ + m₁  (may be negative)
    let f = half(tj - t1 - tm2); // J - j₁ - m₂  (may be negative)

    let t_lo = 0.max(-e).max(-f);
    let t_hi = a.min(j1m).min(j2p);
    if t_lo > t_hi {
        return Ok(0.0);
    }

    // Alternating sum as an exact rational.
    let mut s = BigRational::zero();
    for t in t_lo..=t_hi {
        let den = facts.get(t)
            * facts.get(a - t)
            * facts.get(j1m - t)
            * facts.get(j2p - t)
            * facts.get(e + t)
            * facts.get(f + t);
        let num = if t % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        s += BigRational::new(num, den);
    }
    if s.is_zero() {
        return Ok(0.0);
    }

    // Prefactor under the square root, also exact.
    let numer = BigInt::from(tj + 1)
        * facts.get(a)
        * facts.get(b)
        * facts.get(c)
        * facts.get(jp)
        * facts.get(jm)
        * facts.get(j1p)
        * facts.get(j1m)
        * facts.get(j2p)
        * facts.get(j2m);
    let denom = facts.get(half(t1 + t2 + tj) + 1);
    let prefactor = BigRational::new(numer, denom);

    let sign = if s.is_negative() { -1.0 } else { 1.0 };
    let c_sq = prefactor * &s * &s;
    Ok(sign * big_ratio_to_f64(&c_sq).sqrt())
}

/// Clebsch–Gordan coefficient `⟨j₁ m₁; j₂ m₂ | J M⟩` (Condon–Shortley).
///
/// Returns an error for malformed quantum numbers (negative magnitudes,
/// `|m| > j`, or `j - m` not an integer) and exact `0.0` when a selection
/// rule (`M ≠ m₁+m₂`, triangle violation, non-integer coupling) forbids the
/// coefficient.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64, Su2Error> {
    cg_with_table(&mut Factorials::new(), j1, m1, j2, m2, j, m)
}
