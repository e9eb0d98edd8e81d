//! Composed codes simulated end to end.

use std::sync::Arc;

use twoway_core::channels::TwoWayChannel;
use twoway_core::coding::{compose_2twc, random_coset_code, BlockCode, Corruption};
use twoway_core::noise::{MarkovNoise, NoiseModel, TwoWayNoise};
use twoway_core::seeds::rng;
use twoway_core::verification::{coupled_equivalence, monte_carlo_2twc, replay_2twc};
use twoway_core::{Alphabet, Execution, Pmf};

fn setup() -> (TwoWayChannel, Arc<BlockCode>, Arc<BlockCode>) {
    let q = Alphabet::new(3).unwrap();
    let z1 = NoiseModel::iid(Pmf::symmetric(q, 0.2).unwrap());
    let z2 = NoiseModel::Markov(MarkovNoise::symmetric_flip(q, 0.1).unwrap());
    let mut r = rng(9);
    let code1 = Arc::new(random_coset_code(q, 6, 9, z2.clone(), &mut r).unwrap());
    let code2 = Arc::new(random_coset_code(q, 6, 9, z1.clone(), &mut r).unwrap());
    (
        TwoWayChannel::new(TwoWayNoise::independent(z1, z2).unwrap()),
        code1,
        code2,
    )
}

#[test]
fn negative_control_breaks_equivalence() {
    let (channel, c1, c2) = setup();
    let report = coupled_equivalence(
        c1,
        c2,
        &channel,
        5_000,
        3,
        Corruption::OffByOne,
        Execution::Parallel,
    )
    .unwrap();
    assert!(report.mismatch_count.unwrap() > 0);
}

#[test]
fn reports_do_not_depend_on_strategy() {
    let (channel, c1, c2) = setup();
    let (s1, s2) = compose_2twc(c1, c2).unwrap();
    let seq = monte_carlo_2twc(&channel, &s1, &s2, 20_000, 5, Execution::Sequential).unwrap();
    let par = monte_carlo_2twc(&channel, &s1, &s2, 20_000, 5, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    assert!(seq.link("pe1").unwrap().errors > 0);
}

#[test]
fn replayed_trials_reproduce_the_counts() {
    let (channel, c1, c2) = setup();
    let (s1, s2) = compose_2twc(c1, c2).unwrap();
    let trials = 2_000;
    let report = monte_carlo_2twc(&channel, &s1, &s2, trials, 11, Execution::Parallel).unwrap();
    let mut errors = (0, 0);
    for t in 0..trials {
        let tr = replay_2twc(&channel, &s1, &s2, 11, t).unwrap();
        assert!(tr.audit());
        let (e1, e2) = tr.errors();
        errors.0 += u64::from(e1);
        errors.1 += u64::from(e2);
    }
    assert_eq!(errors.0, report.link("pe1").unwrap().errors);
    assert_eq!(errors.1, report.link("pe2").unwrap().errors);
}
