//! Multipole decay rates of the two decoherence channels.
//!
//! The continuous flow damps the rank-`L` moments at rate `γL(L+1)/2`; one
//! coherent-state measurement multiplies them by `r_L = binom(2J,L)/
//! binom(2J+L+1,L)`, i.e. a per-step rate `−ln r_L`.  For growing `J` (with
//! `γ = 1/J`) the two agree, and a `1/J` expansion quantifies the gap.

use spinphase::{decay_rates, povm_rate_large_j, HalfInt};

fn main() {
    for (label, two_j) in [("1/2", 1), ("1", 2), ("5", 10)] {
        let j = HalfInt::from_doubled(two_j);
        let gamma = 1.0 / j.value();
        let table = decay_rates(j, gamma).unwrap();
        println!("J = {label}, gamma = 1/J = {gamma:.4}");
        println!("  L   flow rate     per-measurement rate   ratio");
        for (l, lind, povm) in table.rows() {
            if lind > 0.0 {
                println!("  {l}   {lind:<12.6}  {povm:<20.6}   {:.4}", povm / lind);
            } else {
                println!("  {l}   {lind:<12.6}  {povm:<20.6}   —");
            }
        }
        println!();
    }

    println!("large-spin expansion of the per-measurement rate (J = 25):");
    let j = HalfInt::from_int(25);
    let table = decay_rates(j, 1.0 / j.value()).unwrap();
    for l in [1, 2, 3] {
        let exact = table.povm(l);
        let expansion = povm_rate_large_j(j, l);
        println!(
            "  L = {l}: exact {exact:.10}, 3-term expansion {expansion:.10}, err {:.2e}",
            (exact - expansion).abs()
        );
    }
}
