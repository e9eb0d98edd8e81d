//! Decoder tie handling and the stationary laws it depends on.

use twoway_core::coding::{BlockCode, Codebook, DbcCode, MacCodePair, DEFAULT_PAIR_CAP};
use twoway_core::noise::{stationary_distribution, MarkovNoise, NoiseModel};
use twoway_core::{Alphabet, Pmf};

fn asymmetric() -> NoiseModel {
    // Stationary law (3/4, 1/4): paths 01 and 10 both have probability 0.075.
    NoiseModel::Markov(MarkovNoise::new(vec![vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap())
}

#[test]
fn doubly_stochastic_chains_are_exactly_uniform() {
    let flip = MarkovNoise::symmetric_flip(Alphabet::new(2).unwrap(), 0.2).unwrap();
    assert_eq!(flip.stationary().probs(), &[0.5, 0.5]);
    let cyclic = vec![
        vec![0.5, 0.3, 0.2],
        vec![0.2, 0.5, 0.3],
        vec![0.3, 0.2, 0.5],
    ];
    let pi = stationary_distribution(&cyclic).unwrap();
    assert!(pi.probs().iter().all(|&p| p == 1.0 / 3.0));
}

#[test]
fn general_chain_stationary_law() {
    let pi = stationary_distribution(&[vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
    assert!((pi.probs()[0] - 0.75).abs() < 1e-12);
}

#[test]
fn equally_likely_paths_tie_to_smallest_index() {
    let q = Alphabet::binary();
    for words in [vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]] {
        let code = BlockCode::ml(Codebook::new(q, words).unwrap(), asymmetric()).unwrap();
        assert_eq!(code.decode(&[0, 0]), 0);
        assert_eq!(code.decode(&[1, 1]), 0);
    }
}

#[test]
fn mac_ties_are_lexicographic() {
    let q = Alphabet::binary();
    for first in [vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]]] {
        let code1 = Codebook::new(q, first).unwrap();
        let code2 = Codebook::new(q, vec![vec![0, 0], vec![1, 1]]).unwrap();
        let pair = MacCodePair::new(code1, code2, asymmetric(), DEFAULT_PAIR_CAP).unwrap();
        // Every residual is 01 or 10, and those are equally likely.
        assert_eq!(pair.joint_decode(&[0, 0]), (0, 0));
    }
}

#[test]
fn broadcast_decoders_break_symmetric_ties_low() {
    let z = Pmf::bernoulli(0.2).unwrap();
    let words = vec![vec![0], vec![1], vec![1], vec![0]];
    let code = DbcCode::from_codewords(2, 2, words, &z, &z).unwrap();
    // Every message is equally plausible for either receiver.
    for y in [[0], [1]] {
        assert_eq!(code.decode_strong(&y), 0);
        assert_eq!(code.decode_weak(&y), 0);
    }
}
