//! Capacity regions on worked examples, checked against closed forms and the
//! grid oracle.

use twoway_core::capacity::{
    concave_envelope, dbc_boundary, dbc_brute_force_oracle, dbc_rate_pair, envelope_value,
    region_2twc, sum_rate_mac, AuxiliaryInput, DbcBoundary, DbcSettings, OracleSettings,
};
use twoway_core::noise::{MarkovNoise, NoiseModel};
use twoway_core::{Alphabet, Execution, Pmf};

fn h2(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

#[test]
fn binary_symmetric_rectangle() {
    let z = NoiseModel::iid(Pmf::bernoulli(0.1).unwrap());
    let r = region_2twc(&z, &NoiseModel::iid(Pmf::bernoulli(0.25).unwrap())).unwrap();
    assert!((r.c1 - (1.0 - h2(0.25))).abs() < 1e-12);
    assert!((r.c2 - (1.0 - h2(0.1))).abs() < 1e-12);
}

#[test]
fn markov_sum_rate_uses_entropy_rate() {
    let z3 = NoiseModel::Markov(MarkovNoise::new(vec![vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap());
    let rate = 0.75 * h2(0.1) + 0.25 * h2(0.3);
    assert!((sum_rate_mac(&z3) - (1.0 - rate)).abs() < 1e-12);
}

#[test]
fn extreme_auxiliaries_hit_the_axes() {
    let q = Alphabet::binary();
    let z1 = Pmf::bernoulli(0.1).unwrap();
    let z2 = Pmf::bernoulli(0.2).unwrap();
    let z12 = z1.convolve(&z2).unwrap();
    let (a, b) = dbc_rate_pair(&AuxiliaryInput::constant_uniform(q), &z1, &z2).unwrap();
    assert!((a - (1.0 - h2(0.1))).abs() < 1e-12 && b.abs() < 1e-12);
    let (a, b) = dbc_rate_pair(&AuxiliaryInput::identity_uniform(q), &z1, &z2).unwrap();
    assert!(a.abs() < 1e-12 && (b - (1.0 - z12.entropy())).abs() < 1e-12);
}

#[test]
fn ternary_boundary_dominates_oracle() {
    let q = Alphabet::new(3).unwrap();
    let z1 = Pmf::symmetric(q, 0.15).unwrap();
    let z2 = Pmf::new(vec![0.8, 0.15, 0.05]).unwrap();
    let settings = DbcSettings {
        starts: 12,
        ..Default::default()
    };
    let boundary = dbc_boundary(
        &z1,
        &z2,
        &DbcBoundary::lambda_grid(9),
        &settings,
        Execution::Parallel,
    )
    .unwrap();
    let oracle_settings = OracleSettings {
        step: 0.05,
        u_card: Some(2),
        ..Default::default()
    };
    let oracle = dbc_brute_force_oracle(&z1, &z2, &oracle_settings, Execution::Parallel).unwrap();
    let env = concave_envelope(&boundary.rate_pairs());
    for (x, y) in oracle {
        let b = envelope_value(&env, x).expect("oracle inside boundary span");
        assert!(b >= y - 2e-3, "oracle point ({x}, {y}) above boundary {b}");
    }
}
