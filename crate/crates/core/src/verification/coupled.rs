//! Pathwise comparison of composed two-way schemes with their one-way parts.
//!
//! Each trial draws messages and noise once, then feeds the same realization
//! to the composed scheme on the two-way network and to every component code
//! on its own one-way channel. With a correct composition the reconstructions
//! agree on every single trial, not just on average.

use std::sync::Arc;

use super::{add_counts, check_trials, TrialReport, CHUNK};
use crate::alphabet::{Alphabet, Symbol};
use crate::channels::{
    run_2twc, run_madbc, AdaptiveScheme, MaDbcChannel, MaDbcMessages, TwoWayChannel,
};
use crate::coding::{compose_2twc, compose_madbc, BlockCode, Corruption, DbcCode, MacCodePair};
use crate::error::Result;
use crate::parallel::Execution;
use crate::seeds::unit_rng;

fn plus(q: Alphabet, a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
    q.add_words(a, b)
}

/// `code1` carries `W1` to user 2 through `Z2`; `code2` carries `W2` to
/// user 1 through `Z1`.
///
/// Links: `pe1`/`pe2` for the composed scheme, `oneway_pe1`/`oneway_pe2` for
/// the separate runs.
pub fn coupled_equivalence(
    code1: Arc<BlockCode>,
    code2: Arc<BlockCode>,
    channel: &TwoWayChannel,
    trials: u64,
    seed: u64,
    corruption: Corruption,
    exec: Execution,
) -> Result<TrialReport> {
    check_trials(trials)?;
    let (s1, s2) = compose_2twc(code1.clone(), code2.clone())?;
    let (s1, s2) = (
        s1.with_corruption(corruption),
        s2.with_corruption(corruption),
    );
    let q = channel.alphabet();
    let n = code1.blocklength();
    let chunks = exec.map_chunks(trials, CHUNK, |range| {
        // composed pe1, composed pe2, one-way pe1, one-way pe2, mismatches
        let mut c = [0u64; 5];
        for t in range {
            let mut rng = unit_rng(seed, t);
            let w1 = s1.sample_message(&mut rng);
            let w2 = s2.sample_message(&mut rng);
            let (z1, z2) = channel.sample_noise(n, &mut rng);
            let tr = run_2twc(channel, &s1, &s2, w1, w2, &z1, &z2)?;
            let one1 = code1.decode(&plus(q, code1.encode(w1), &z2));
            let one2 = code2.decode(&plus(q, code2.encode(w2), &z1));
            let (e1, e2) = tr.errors();
            c[0] += u64::from(e1);
            c[1] += u64::from(e2);
            c[2] += u64::from(one2 != w2);
            c[3] += u64::from(one1 != w1);
            c[4] += u64::from(tr.reconstructions.w1 != one1 || tr.reconstructions.w2 != one2);
        }
        Ok(c)
    });
    let c = add_counts(chunks)?;
    Ok(TrialReport::from_counts(
        &["pe1", "pe2", "oneway_pe1", "oneway_pe2"],
        &c[..4],
        trials,
        seed,
        Some(c[4]),
    ))
}

/// MA/DBC analogue: the MAC pair is checked against its one-way MAC run and
/// the broadcast code against its degraded broadcast run.
///
/// Links: `pe3`, `w31`, `w32` composed, then the same with a `oneway_` prefix.
pub fn coupled_equivalence_madbc(
    mac: Arc<MacCodePair>,
    dbc: Arc<DbcCode>,
    channel: &MaDbcChannel,
    trials: u64,
    seed: u64,
    corruption: Corruption,
    exec: Execution,
) -> Result<TrialReport> {
    check_trials(trials)?;
    let (s1, s2, s3) = compose_madbc(mac.clone(), dbc.clone())?;
    let s1 = s1.with_corruption(corruption);
    let s2 = s2.with_corruption(corruption);
    let s3 = s3.with_corruption(corruption);
    let q = channel.alphabet();
    let n = mac.blocklength();
    let chunks = exec.map_chunks(trials, CHUNK, |range| {
        let mut c = [0u64; 7];
        for t in range {
            let mut rng = unit_rng(seed, t);
            let w13 = s1.sample_message(&mut rng);
            let w23 = s2.sample_message(&mut rng);
            let (w31, w32) = s3.sample_message(&mut rng);
            let [z1, z2, z3] = channel.sample_noise(n, &mut rng);
            let m = MaDbcMessages { w13, w23, w31, w32 };
            let tr = run_madbc(channel, (&s1, &s2, &s3), m, [&z1, &z2, &z3])?;

            let sum = plus(q, mac.codebook(0).word(w13), mac.codebook(1).word(w23));
            let mac_hat = mac.joint_decode(&plus(q, &sum, &z3));
            let x3 = dbc.encode(w31, w32);
            let y1 = plus(q, x3, &z1);
            let strong_hat = dbc.decode_strong(&y1);
            let weak_hat = dbc.decode_weak(&plus(q, &y1, &z2));

            let r = tr.reconstructions;
            for (k, e) in tr.errors().into_iter().enumerate() {
                c[k] += u64::from(e);
            }
            c[3] += u64::from(mac_hat != (w13, w23));
            c[4] += u64::from(strong_hat != w31);
            c[5] += u64::from(weak_hat != w32);
            c[6] +=
                u64::from((r.w13, r.w23) != mac_hat || r.w31 != strong_hat || r.w32 != weak_hat);
        }
        Ok(c)
    });
    let c = add_counts(chunks)?;
    Ok(TrialReport::from_counts(
        &[
            "pe3",
            "w31",
            "w32",
            "oneway_pe3",
            "oneway_w31",
            "oneway_w32",
        ],
        &c[..6],
        trials,
        seed,
        Some(c[6]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Pmf;
    use crate::capacity::AuxiliaryInput;
    use crate::coding::{
        mac_joint_ml_code, random_coset_code, superposition_code, DEFAULT_PAIR_CAP,
    };
    use crate::noise::{IidNoise, MarkovNoise, NoiseModel, TwoWayNoise};
    use crate::seeds::rng;

    fn two_way(
        q: Alphabet,
        n1: NoiseModel,
        n2: NoiseModel,
        seed: u64,
    ) -> (Arc<BlockCode>, Arc<BlockCode>, TwoWayChannel) {
        let mut g = rng(seed);
        let c1 = Arc::new(random_coset_code(q, 6, 4, n2.clone(), &mut g).unwrap());
        let c2 = Arc::new(random_coset_code(q, 6, 3, n1.clone(), &mut g).unwrap());
        (
            c1,
            c2,
            TwoWayChannel::new(TwoWayNoise::independent(n1, n2).unwrap()),
        )
    }

    #[test]
    fn composed_matches_one_way() {
        let q = Alphabet::new(3).unwrap();
        let m = NoiseModel::Markov(MarkovNoise::symmetric_flip(q, 0.2).unwrap());
        let i = NoiseModel::iid(Pmf::new(vec![0.7, 0.2, 0.1]).unwrap());
        let (c1, c2, ch) = two_way(q, m, i, 1);
        let r = coupled_equivalence(c1, c2, &ch, 4000, 2, Corruption::None, Execution::Parallel)
            .unwrap();
        assert_eq!(r.mismatch_count, Some(0));
        assert_eq!(
            r.link("pe1").unwrap().errors,
            r.link("oneway_pe1").unwrap().errors
        );
        assert_eq!(
            r.link("pe2").unwrap().errors,
            r.link("oneway_pe2").unwrap().errors
        );
        assert!(r.link("pe1").unwrap().errors > 0);
    }

    #[test]
    fn corrupted_composition_is_caught() {
        let q = Alphabet::binary();
        let b = NoiseModel::iid(Pmf::bernoulli(0.1).unwrap());
        let (c1, c2, ch) = two_way(q, b.clone(), b, 4);
        let r = coupled_equivalence(
            c1,
            c2,
            &ch,
            1000,
            2,
            Corruption::OffByOne,
            Execution::Parallel,
        )
        .unwrap();
        assert!(r.mismatch_count.unwrap() > 0);
    }

    fn madbc(seed: u64) -> (Arc<MacCodePair>, Arc<DbcCode>, MaDbcChannel) {
        let q = Alphabet::binary();
        let z = Pmf::bernoulli(0.1).unwrap();
        let z3 = NoiseModel::iid(z.clone());
        let mut g = rng(seed);
        let mac = mac_joint_ml_code(q, 8, 2, 4, z3.clone(), &mut g, DEFAULT_PAIR_CAP).unwrap();
        let aux = AuxiliaryInput::symmetric_superposition(&Pmf::bernoulli(0.1).unwrap());
        let dbc = superposition_code(&aux, 8, 2, 2, &z, &z, &mut g).unwrap();
        let ch = MaDbcChannel::new(IidNoise::new(z.clone()), IidNoise::new(z), z3).unwrap();
        (Arc::new(mac), Arc::new(dbc), ch)
    }

    #[test]
    fn madbc_composed_matches_one_way() {
        let (mac, dbc, ch) = madbc(8);
        let a = coupled_equivalence_madbc(
            mac.clone(),
            dbc.clone(),
            &ch,
            3000,
            9,
            Corruption::None,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(a.mismatch_count, Some(0));
        let b = coupled_equivalence_madbc(
            mac,
            dbc,
            &ch,
            3000,
            9,
            Corruption::None,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn madbc_negative_control() {
        let (mac, dbc, ch) = madbc(8);
        let r = coupled_equivalence_madbc(
            mac,
            dbc,
            &ch,
            1000,
            9,
            Corruption::OffByOne,
            Execution::Parallel,
        )
        .unwrap();
        assert!(r.mismatch_count.unwrap() > 0);
    }
}
