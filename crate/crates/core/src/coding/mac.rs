use crate::alphabet::{Alphabet, Symbol};
use crate::coding::block::Codebook;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::seeds::SimRng;

/// Default cap on `M1 * M2` for the joint decoder.
pub const DEFAULT_PAIR_CAP: usize = 1 << 20;

/// Two independent codebooks for the multiple-access direction
/// `Y3 = X1 + X2 + Z3` and a joint ML decoder over message pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MacCodePair {
    code1: Codebook,
    code2: Codebook,
    noise: NoiseModel,
}

impl MacCodePair {
    pub fn new(
        code1: Codebook,
        code2: Codebook,
        noise: NoiseModel,
        pair_cap: usize,
    ) -> Result<Self> {
        let q = code1.alphabet();
        for other in [code2.alphabet(), noise.alphabet()] {
            if other != q {
                return Err(Error::AlphabetMismatch {
                    expected: q.size(),
                    found: other.size(),
                });
            }
        }
        if code1.blocklength() != code2.blocklength() {
            return Err(Error::LengthMismatch {
                expected: code1.blocklength(),
                found: code2.blocklength(),
            });
        }
        let pairs = code1.len().saturating_mul(code2.len());
        if pairs > pair_cap {
            return Err(Error::CapExceeded {
                required: pairs as u128,
                cap: pair_cap as u128,
            });
        }
        Ok(Self {
            code1,
            code2,
            noise,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.code1.alphabet()
    }

    pub fn blocklength(&self) -> usize {
        self.code1.blocklength()
    }

    pub fn codebook(&self, user: usize) -> &Codebook {
        if user == 0 {
            &self.code1
        } else {
            &self.code2
        }
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// `(M1, M2)`.
    pub fn message_counts(&self) -> (usize, usize) {
        (self.code1.len(), self.code2.len())
    }

    /// ML pair for `received = x1(m1) + x2(m2) + z3`; ties go to the
    /// lexicographically smallest pair.
    pub fn joint_decode(&self, received: &[Symbol]) -> (usize, usize) {
        let q = self.alphabet();
        let mut scratch = vec![0u32; q.len() * q.len()];
        let mut residual = vec![0; received.len()];
        let mut best = (0, 0);
        let mut best_score = f64::NEG_INFINITY;
        for (m1, c1) in self.code1.codewords().iter().enumerate() {
            for (r, (&y, &x)) in residual.iter_mut().zip(received.iter().zip(c1)) {
                *r = q.sub(y, x);
            }
            for (m2, c2) in self.code2.codewords().iter().enumerate() {
                let diff = residual.iter().zip(c2).map(|(&r, &x)| q.sub(r, x));
                let score = self.noise.log_likelihood(diff, &mut scratch);
                if super::beats(score, best_score) {
                    best_score = score;
                    best = (m1, m2);
                }
            }
        }
        best
    }
}

/// Independent uniform codebooks with joint ML decoding against `noise3`.
pub fn mac_joint_ml_code(
    q: Alphabet,
    n: usize,
    m1: usize,
    m2: usize,
    noise3: NoiseModel,
    rng: &mut SimRng,
    pair_cap: usize,
) -> Result<MacCodePair> {
    let pairs = m1.saturating_mul(m2);
    if pairs > pair_cap {
        return Err(Error::CapExceeded {
            required: pairs as u128,
            cap: pair_cap as u128,
        });
    }
    let code1 = Codebook::random(q, n, m1, rng)?;
    let code2 = Codebook::random(q, n, m2, rng)?;
    MacCodePair::new(code1, code2, noise3, pair_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Pmf;
    use crate::coding::block::BlockCode;
    use crate::seeds::{rng, unit_rng};

    #[test]
    fn noiseless_sum_distinct_codebooks_decode_perfectly() {
        let q = Alphabet::binary();
        // Sums c1 + c2 are all distinct.
        let c1 = Codebook::new(q, vec![vec![0, 0, 0], vec![1, 0, 0]]).unwrap();
        let c2 = Codebook::new(q, vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let mac = MacCodePair::new(
            c1.clone(),
            c2.clone(),
            NoiseModel::silent(q),
            DEFAULT_PAIR_CAP,
        )
        .unwrap();
        for m1 in 0..2 {
            for m2 in 0..3 {
                let y = q.add_words(c1.word(m1), c2.word(m2));
                assert_eq!(mac.joint_decode(&y), (m1, m2));
            }
        }
    }

    #[test]
    fn single_message_reduces_to_point_to_point() {
        let q = Alphabet::new(3).unwrap();
        let noise = NoiseModel::iid(Pmf::new(vec![0.7, 0.2, 0.1]).unwrap());
        let mut r = rng(8);
        let mac = mac_joint_ml_code(q, 5, 1, 7, noise.clone(), &mut r, DEFAULT_PAIR_CAP).unwrap();
        let p2p = BlockCode::ml(mac.codebook(1).clone(), noise.clone()).unwrap();
        for k in 0..200 {
            let mut r = unit_rng(3, k);
            let y: Vec<u8> = noise
                .sample_path(5, &mut r)
                .iter()
                .map(|&z| q.add(z, (k % 3) as u8))
                .collect();
            let shifted = q.sub_words(&y, mac.codebook(0).word(0));
            assert_eq!(mac.joint_decode(&y), (0, p2p.decode(&shifted)));
        }
    }

    #[test]
    fn pair_cap_is_enforced() {
        let q = Alphabet::binary();
        let r = mac_joint_ml_code(q, 12, 100, 100, NoiseModel::silent(q), &mut rng(1), 1000);
        assert!(matches!(r, Err(Error::CapExceeded { .. })));
    }
}
