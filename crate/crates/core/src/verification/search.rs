//! Exact optimization over every deterministic encoder family at tiny sizes.
//!
//! An adaptive encoder of a user with `M` messages is a table giving the
//! input at time `i` for every message and every received prefix
//! `y^{i-1}`, so it has `M * (1 + q + ... + q^{n-1})` entries. Non-adaptive
//! encoders ignore the prefix and have `M * n` entries. For every pair of
//! families the error probabilities are computed exactly by summing over all
//! messages and all noise realizations, with MAP decoders read off the joint
//! law of the message and the received block.

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::channels::AdaptiveScheme;
use crate::error::{Error, Result};
use crate::noise::{JointRealization, TwoWayNoise};
use crate::parallel::Execution;
use crate::seeds::SimRng;

pub const DEFAULT_SEARCH_CAP: u128 = 10_000_000;

const PAIRS_PER_UNIT: u64 = 4096;

/// Deterministic encoder and decoder tables for one user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableScheme {
    pub q: u8,
    pub n: usize,
    pub messages: usize,
    pub peer_messages: usize,
    /// Entry `w * L + (q^i - 1) / (q - 1) + index(y^i)` is the input at time
    /// `i + 1`, where `L` is the number of prefixes.
    pub inputs: Vec<Symbol>,
    /// Entry `w * q^n + index(y^n)` is the estimate of the peer's message.
    pub decoder: Vec<usize>,
}

impl TableScheme {
    fn q(&self) -> Alphabet {
        Alphabet::new(self.q).expect("valid alphabet")
    }

    fn prefixes(&self) -> usize {
        prefix_count(self.q(), self.n)
    }

    /// Whether every input ignores the received prefix.
    pub fn is_nonadaptive(&self) -> bool {
        let q = self.q();
        let l = self.prefixes();
        (0..self.messages).all(|w| {
            (0..self.n).all(|i| {
                let base = w * l + prefix_offset(q, i);
                let block = &self.inputs[base..base + q.word_count(i).unwrap_or(0)];
                block.iter().all(|&x| x == block[0])
            })
        })
    }
}

impl AdaptiveScheme for TableScheme {
    type Message = usize;
    type Estimate = usize;

    fn alphabet(&self) -> Alphabet {
        self.q()
    }

    fn blocklength(&self) -> usize {
        self.n
    }

    fn accepts(&self, m: usize) -> bool {
        m < self.messages
    }

    fn sample_message(&self, rng: &mut SimRng) -> usize {
        use rand::Rng;
        rng.gen_range(0..self.messages)
    }

    fn transmit(&self, w: usize, history: &[Symbol]) -> Symbol {
        let q = self.q();
        let i = history.len();
        self.inputs[w * self.prefixes() + prefix_offset(q, i) + q.word_index(history)]
    }

    fn decode(&self, w: usize, received: &[Symbol]) -> usize {
        let words = self.q().word_count(self.n).expect("small block");
        self.decoder[w * words + self.q().word_index(received)]
    }
}

/// Optimum over one encoder class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassOptimum {
    /// Number of encoder-family pairs evaluated.
    pub search_space: u64,
    /// `max(pe1, pe2)` of the witness.
    pub error: f64,
    pub pe1: f64,
    pub pe2: f64,
    pub user1: TableScheme,
    pub user2: TableScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub q: u8,
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub best_adaptive_error: f64,
    pub best_nonadaptive_error: f64,
    pub adaptive: ClassOptimum,
    pub nonadaptive: ClassOptimum,
}

fn prefix_offset(q: Alphabet, i: usize) -> usize {
    (0..i).map(|k| q.word_count(k).expect("small block")).sum()
}

fn prefix_count(q: Alphabet, n: usize) -> usize {
    prefix_offset(q, n)
}

/// Encoder table of family `index`, expanded to the adaptive layout.
fn family_table(q: Alphabet, n: usize, m: usize, adaptive: bool, mut index: u128) -> Vec<Symbol> {
    let l = prefix_count(q, n);
    let qq = q.len() as u128;
    let mut digit = || {
        let d = (index % qq) as Symbol;
        index /= qq;
        d
    };
    let mut table = vec![0; m * l];
    for w in 0..m {
        for i in 0..n {
            let base = w * l + prefix_offset(q, i);
            let width = q.word_count(i).expect("small block");
            if adaptive {
                for slot in &mut table[base..base + width] {
                    *slot = digit();
                }
            } else {
                table[base..base + width].fill(digit());
            }
        }
    }
    table
}

fn family_count(q: Alphabet, n: usize, m: usize, adaptive: bool) -> Option<u128> {
    let entries = if adaptive {
        m * prefix_count(q, n)
    } else {
        m * n
    };
    (q.len() as u128).checked_pow(u32::try_from(entries).ok()?)
}

struct Problem {
    q: Alphabet,
    n: usize,
    m1: usize,
    m2: usize,
    words: usize,
    prefixes: usize,
    law: Vec<JointRealization>,
}

struct Evaluation {
    pe1: f64,
    pe2: f64,
    decoder1: Vec<usize>,
    decoder2: Vec<usize>,
}

impl Problem {
    /// Exact error probabilities for one pair of encoder tables.
    ///
    /// `a1[w1][y1][w2]` accumulates `P(W1 = w1, Y1 = y1, W2 = w2)`; user 1's
    /// MAP rule picks the largest `w2` cell, so its error is the row mass not
    /// captured by the maximum. User 2 is symmetric.
    fn evaluate(
        &self,
        f1: &[Symbol],
        f2: &[Symbol],
        a1: &mut [f64],
        a2: &mut [f64],
        decoders: bool,
    ) -> Evaluation {
        let (q, n, m1, m2, words, l) =
            (self.q, self.n, self.m1, self.m2, self.words, self.prefixes);
        a1.fill(0.0);
        a2.fill(0.0);
        let scale = 1.0 / (m1 * m2) as f64;
        for w1 in 0..m1 {
            for w2 in 0..m2 {
                for (z1, z2, p) in &self.law {
                    let (mut y1, mut y2) = (0usize, 0usize);
                    for i in 0..n {
                        let off = prefix_offset(q, i);
                        let x1 = f1[w1 * l + off + y1];
                        let x2 = f2[w2 * l + off + y2];
                        let s = q.add(x1, x2);
                        y1 = y1 * q.len() + q.add(s, z1[i]) as usize;
                        y2 = y2 * q.len() + q.add(s, z2[i]) as usize;
                    }
                    a1[(w1 * words + y1) * m2 + w2] += p * scale;
                    a2[(w2 * words + y2) * m1 + w1] += p * scale;
                }
            }
        }
        let (pe1, decoder1) = map_error(a1, m2, decoders);
        let (pe2, decoder2) = map_error(a2, m1, decoders);
        Evaluation {
            pe1,
            pe2,
            decoder1,
            decoder2,
        }
    }
}

/// Error of the MAP rule over cells of width `m`; ties go to the smallest
/// message.
fn map_error(cells: &[f64], m: usize, decoders: bool) -> (f64, Vec<usize>) {
    let mut err = 0.0;
    let mut decoder = Vec::new();
    for cell in cells.chunks(m) {
        let mut best = 0;
        for k in 1..m {
            if cell[k] > cell[best] {
                best = k;
            }
        }
        err += cell
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != best)
            .map(|(_, p)| p)
            .sum::<f64>();
        if decoders {
            decoder.push(best);
        }
    }
    (err, decoder)
}

fn search_class(
    problem: &Problem,
    adaptive: bool,
    cap: u128,
    exec: Execution,
) -> Result<ClassOptimum> {
    let (q, n, m1, m2) = (problem.q, problem.n, problem.m1, problem.m2);
    let too_big = || Error::CapExceeded {
        required: u128::MAX,
        cap,
    };
    let f1 = family_count(q, n, m1, adaptive).ok_or_else(too_big)?;
    let f2 = family_count(q, n, m2, adaptive).ok_or_else(too_big)?;
    let pairs = f1.checked_mul(f2).ok_or_else(too_big)?;
    if pairs > cap {
        return Err(Error::CapExceeded {
            required: pairs,
            cap,
        });
    }
    let pairs = pairs as u64;
    let cells1 = m1 * problem.words * m2;

    let best = exec
        .map_chunks(pairs, PAIRS_PER_UNIT, |range| {
            let mut a1 = vec![0.0; cells1];
            let mut a2 = vec![0.0; cells1];
            let mut best: Option<(f64, u64)> = None;
            let mut current: Option<(u128, Vec<Symbol>)> = None;
            for idx in range {
                let (i1, i2) = (idx as u128 / f2, idx as u128 % f2);
                if current.as_ref().is_none_or(|(k, _)| *k != i1) {
                    current = Some((i1, family_table(q, n, m1, adaptive, i1)));
                }
                let t1 = &current.as_ref().expect("set above").1;
                let t2 = family_table(q, n, m2, adaptive, i2);
                let e = problem.evaluate(t1, &t2, &mut a1, &mut a2, false);
                let obj = e.pe1.max(e.pe2);
                if best.is_none_or(|(b, _)| obj < b) {
                    best = Some((obj, idx));
                }
            }
            best
        })
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, u64)>, (obj, idx)| match acc {
            Some((b, _)) if b <= obj => acc,
            _ => Some((obj, idx)),
        })
        .expect("nonempty search space");

    let (i1, i2) = (best.1 as u128 / f2, best.1 as u128 % f2);
    let t1 = family_table(q, n, m1, adaptive, i1);
    let t2 = family_table(q, n, m2, adaptive, i2);
    let mut a1 = vec![0.0; cells1];
    let mut a2 = vec![0.0; cells1];
    let e = problem.evaluate(&t1, &t2, &mut a1, &mut a2, true);
    let scheme = |inputs, decoder, messages, peer_messages| TableScheme {
        q: q.size(),
        n,
        messages,
        peer_messages,
        inputs,
        decoder,
    };
    Ok(ClassOptimum {
        search_space: pairs,
        error: e.pe1.max(e.pe2),
        pe1: e.pe1,
        pe2: e.pe2,
        user1: scheme(t1, e.decoder1, m1, m2),
        user2: scheme(t2, e.decoder2, m2, m1),
    })
}

/// Minimizes `max(pe1, pe2)` over all non-adaptive encoder pairs and over
/// all adaptive encoder pairs for blocklength `n <= 2`.
///
/// `cap` bounds the number of family pairs in each class.
pub fn exhaustive_code_search(
    noise: &TwoWayNoise,
    n: usize,
    m1: usize,
    m2: usize,
    cap: u128,
    exec: Execution,
) -> Result<SearchResult> {
    if !(1..=2).contains(&n) {
        return Err(Error::Unsupported(format!(
            "exhaustive search needs 1 <= n <= 2, got {n}"
        )));
    }
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidCode("message sets must be nonempty".into()));
    }
    let q = noise.alphabet();
    let words = q.word_count(n).expect("small block");
    for m in [m1, m2] {
        if m > words {
            return Err(Error::InvalidCode(format!(
                "{m} messages exceed {words} input words"
            )));
        }
    }
    let problem = Problem {
        q,
        n,
        m1,
        m2,
        words,
        prefixes: prefix_count(q, n),
        law: noise.joint_law(n)?,
    };
    let nonadaptive = search_class(&problem, false, cap, exec)?;
    let adaptive = search_class(&problem, true, cap, exec)?;
    Ok(SearchResult {
        q: q.size(),
        n,
        m1,
        m2,
        best_adaptive_error: adaptive.error,
        best_nonadaptive_error: nonadaptive.error,
        adaptive,
        nonadaptive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Pmf;
    use crate::channels::{run_2twc, TwoWayChannel};
    use crate::noise::{DelayedCopyPair, NoiseModel};

    fn iid(p: f64) -> NoiseModel {
        NoiseModel::iid(Pmf::bernoulli(p).unwrap())
    }

    fn pair(a: f64, b: f64) -> TwoWayNoise {
        TwoWayNoise::independent(iid(a), iid(b)).unwrap()
    }

    #[test]
    fn family_tables_enumerate_once() {
        let q = Alphabet::binary();
        let count = family_count(q, 2, 2, true).unwrap();
        assert_eq!(count, 64);
        let mut seen = std::collections::HashSet::new();
        for i in 0..count {
            assert!(seen.insert(family_table(q, 2, 2, true, i)));
        }
        assert_eq!(family_count(q, 2, 2, false), Some(16));
        for i in 0..16 {
            let t = TableScheme {
                q: 2,
                n: 2,
                messages: 2,
                peer_messages: 1,
                inputs: family_table(q, 2, 2, false, i),
                decoder: vec![0; 8],
            };
            assert!(t.is_nonadaptive());
        }
    }

    #[test]
    fn noiseless_single_symbol() {
        let r = exhaustive_code_search(
            &pair(0.0, 0.0),
            1,
            2,
            1,
            DEFAULT_SEARCH_CAP,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(r.best_adaptive_error, 0.0);
        assert_eq!(r.best_nonadaptive_error, 0.0);
    }

    #[test]
    fn useless_channel_gives_half() {
        for n in [1, 2] {
            let r = exhaustive_code_search(
                &pair(0.0, 0.5),
                n,
                2,
                1,
                DEFAULT_SEARCH_CAP,
                Execution::Parallel,
            )
            .unwrap();
            assert!((r.nonadaptive.pe2 - 0.5).abs() < 1e-12);
            assert!((r.adaptive.pe2 - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn delayed_copy_gap() {
        let noise = TwoWayNoise::DelayedCopy(DelayedCopyPair);
        let r = exhaustive_code_search(&noise, 2, 4, 1, DEFAULT_SEARCH_CAP, Execution::Parallel)
            .unwrap();
        assert_eq!(r.best_adaptive_error, 0.0);
        assert!(r.best_nonadaptive_error > 0.0);
        assert!(!r.adaptive.user1.is_nonadaptive());
    }

    #[test]
    fn witness_replays_on_the_channel() {
        let noise = TwoWayNoise::DelayedCopy(DelayedCopyPair);
        let r = exhaustive_code_search(&noise, 2, 4, 1, DEFAULT_SEARCH_CAP, Execution::Parallel)
            .unwrap();
        let ch = TwoWayChannel::new(noise.clone());
        for (z1, z2, _) in noise.joint_law(2).unwrap() {
            for w1 in 0..4 {
                let t =
                    run_2twc(&ch, &r.adaptive.user1, &r.adaptive.user2, w1, 0, &z1, &z2).unwrap();
                assert_eq!(t.errors(), (false, false));
            }
        }
    }

    #[test]
    fn independent_noise_shows_no_gap() {
        for (a, b, m1, m2) in [(0.1, 0.2, 2, 2), (0.3, 0.1, 3, 2), (0.25, 0.25, 4, 1)] {
            let r = exhaustive_code_search(
                &pair(a, b),
                2,
                m1,
                m2,
                DEFAULT_SEARCH_CAP,
                Execution::Parallel,
            )
            .unwrap();
            assert!(r.best_adaptive_error <= r.best_nonadaptive_error + 1e-12);
            assert!(
                (r.best_adaptive_error - r.best_nonadaptive_error).abs() < 1e-12,
                "{r:?}"
            );
        }
    }

    #[test]
    fn strategies_agree_and_cap_applies() {
        let noise = pair(0.1, 0.2);
        let a = exhaustive_code_search(&noise, 2, 2, 2, DEFAULT_SEARCH_CAP, Execution::Sequential)
            .unwrap();
        let b = exhaustive_code_search(&noise, 2, 2, 2, DEFAULT_SEARCH_CAP, Execution::Parallel)
            .unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            exhaustive_code_search(&noise, 2, 2, 2, 100, Execution::Sequential),
            Err(Error::CapExceeded { .. })
        ));
        assert!(
            exhaustive_code_search(&noise, 3, 2, 2, DEFAULT_SEARCH_CAP, Execution::Sequential)
                .is_err()
        );
    }
}
