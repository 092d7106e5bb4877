//! Moment decay curves for both models, at two spins.
//!
//! Starting from a coherent state at the north pole, prints the rank-1 and
//! rank-2 moments under the continuous flow (with `γ = 1/J`) and under
//! iterated measurements, plus the rank-2/rank-1 log-decay ratio each model
//! produces: `3` for the flow, `ln r_2/ln r_1` for the measurement channel.

use spinphase::{
    coherent_state, expand, lindblad_propagate_analytic, povm_iterate, ratio_statistic, HalfInt,
    LindbladParams, PhasePoint, TensorBasis,
};

fn main() {
    for two_j in [2, 10] {
        let j = HalfInt::from_doubled(two_j);
        let gamma = 1.0 / j.value();
        let basis = TensorBasis::build(j);
        let rho = coherent_state(j, PhasePoint::new(0.0, 0.0)).density();
        let m0 = expand(&rho, &basis).unwrap();
        let params = LindbladParams::new(gamma, j).unwrap();

        println!("J = {j}, gamma = 1/J = {gamma:.3}");
        println!("  flow:         t      ρ_(1,0)      ρ_(2,0)");
        let mut r1 = Vec::new();
        let mut r2 = Vec::new();
        for i in 0..=4 {
            let t = 0.5 * f64::from(i);
            let m = lindblad_propagate_analytic(&m0, t, &params).unwrap();
            println!("           {t:>6.2}   {:>10.6}   {:>10.6}", m.get(1, 0).re, m.get(2, 0).re);
            r1.push((t, m.get(1, 0)));
            r2.push((t, m.get(2, 0)));
        }
        let stat = ratio_statistic(&r1, &r2).unwrap();
        println!("  flow log-decay ratio rank2/rank1: {:.6} (exactly 3)", stat.r);

        println!("  measurements: n      ρ_(1,0)      ρ_(2,0)");
        let mut r1 = Vec::new();
        let mut r2 = Vec::new();
        for n in 0..=4u32 {
            let m = povm_iterate(&m0, n);
            println!("           {n:>6}   {:>10.6}   {:>10.6}", m.get(1, 0).re, m.get(2, 0).re);
            r1.push((f64::from(n), m.get(1, 0)));
            r2.push((f64::from(n), m.get(2, 0)));
        }
        let stat = ratio_statistic(&r1, &r2).unwrap();
        println!("  measurement log-decay ratio rank2/rank1: {:.6}\n", stat.r);
    }
}
