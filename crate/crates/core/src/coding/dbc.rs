use crate::alphabet::{Alphabet, Pmf, Symbol};
use crate::capacity::AuxiliaryInput;
use crate::coding::block::check_size;
use crate::error::{Error, Result};
use crate::noise::{IidNoise, NoiseModel};
use crate::seeds::SimRng;

/// Superposition code for the degraded broadcast direction
/// `Y1 = X3 + Z1`, `Y2 = X3 + Z1 + Z2`.
///
/// Codeword `(m31, m32)` is stored at `m32 * M31 + m31`. The strong receiver
/// decodes `m31` and the weak receiver `m32`, each by maximizing the
/// likelihood summed over the other message.
#[derive(Debug, Clone, PartialEq)]
pub struct DbcCode {
    q: Alphabet,
    n: usize,
    m31: usize,
    m32: usize,
    codewords: Vec<Vec<Symbol>>,
    strong: NoiseModel,
    weak: NoiseModel,
}

impl DbcCode {
    pub fn from_codewords(
        m31: usize,
        m32: usize,
        codewords: Vec<Vec<Symbol>>,
        z1: &Pmf,
        z2: &Pmf,
    ) -> Result<Self> {
        let q = z1.q();
        if m31 == 0 || m32 == 0 || codewords.len() != m31 * m32 {
            return Err(Error::InvalidCode(format!(
                "{} codewords for M31 = {m31}, M32 = {m32}",
                codewords.len()
            )));
        }
        let n = codewords[0].len();
        if n == 0 {
            return Err(Error::InvalidCode("zero blocklength".into()));
        }
        for w in &codewords {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            q.check_all(w)?;
        }
        let weak = z1.convolve(z2)?;
        Ok(Self {
            q,
            n,
            m31,
            m32,
            codewords,
            strong: NoiseModel::iid(z1.clone()),
            weak: NoiseModel::iid(weak),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.q
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    /// `(M31, M32)`.
    pub fn message_counts(&self) -> (usize, usize) {
        (self.m31, self.m32)
    }

    pub fn encode(&self, m31: usize, m32: usize) -> &[Symbol] {
        &self.codewords[m32 * self.m31 + m31]
    }

    pub fn decode_strong(&self, received: &[Symbol]) -> usize {
        self.marginal_ml(received, &self.strong, self.m31, |target, other| {
            (target, other)
        })
    }

    pub fn decode_weak(&self, received: &[Symbol]) -> usize {
        self.marginal_ml(received, &self.weak, self.m32, |target, other| {
            (other, target)
        })
    }

    fn marginal_ml(
        &self,
        received: &[Symbol],
        noise: &NoiseModel,
        targets: usize,
        index: impl Fn(usize, usize) -> (usize, usize),
    ) -> usize {
        let q = self.q;
        let others = self.m31 * self.m32 / targets;
        let mut scratch = vec![0u32; q.len() * q.len()];
        let mut scores = vec![0.0; others];
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for t in 0..targets {
            for (o, s) in scores.iter_mut().enumerate() {
                let (m31, m32) = index(t, o);
                let c = self.encode(m31, m32);
                let diff = received.iter().zip(c).map(|(&y, &x)| q.sub(y, x));
                *s = noise.log_likelihood(diff, &mut scratch);
            }
            let score = log_sum_exp(&scores);
            if super::beats(score, best_score) {
                best_score = score;
                best = t;
            }
        }
        best
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Random superposition code: cloud centers `u^n(m32)` drawn i.i.d. from
/// `p(u)`, satellites `x^n(m31, m32)` drawn symbolwise from `p(x | u)`.
pub fn superposition_code(
    aux: &AuxiliaryInput,
    n: usize,
    m31: usize,
    m32: usize,
    z1: &Pmf,
    z2: &Pmf,
    rng: &mut SimRng,
) -> Result<DbcCode> {
    let q = aux.alphabet();
    if z1.q() != q {
        return Err(Error::AlphabetMismatch {
            expected: q.size(),
            found: z1.q().size(),
        });
    }
    check_size(q, n, m31.saturating_mul(m32))?;
    let cloud_law = IidNoise::new(aux.p_u().clone());
    let rows: Vec<IidNoise> = aux.rows().iter().cloned().map(IidNoise::new).collect();
    let mut codewords = vec![Vec::new(); m31 * m32];
    for w32 in 0..m32 {
        let center = cloud_law.sample_path(n, rng);
        for w31 in 0..m31 {
            codewords[w32 * m31 + w31] = center
                .iter()
                .map(|&u| rows[u as usize].sample_path(1, rng)[0])
                .collect();
        }
    }
    DbcCode::from_codewords(m31, m32, codewords, z1, z2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng;

    #[test]
    fn noiseless_injective_code_recovers_both_messages() {
        let q = Alphabet::binary();
        let words: Vec<Vec<u8>> = (0..8).map(|i| q.word_from_index(i, 3)).collect();
        let zero = Pmf::point_mass(q, 0).unwrap();
        let code = DbcCode::from_codewords(2, 4, words, &zero, &zero).unwrap();
        for m32 in 0..4 {
            for m31 in 0..2 {
                let x = code.encode(m31, m32);
                assert_eq!(code.decode_strong(x), m31);
                assert_eq!(code.decode_weak(x), m32);
            }
        }
    }

    #[test]
    fn weak_receiver_sums_over_satellites() {
        // Cloud 0 = {000, 001}, cloud 1 = {111, 110}.
        let q = Alphabet::binary();
        let words = vec![vec![0, 0, 0], vec![0, 0, 1], vec![1, 1, 1], vec![1, 1, 0]];
        let zero = Pmf::point_mass(q, 0).unwrap();
        let light = Pmf::bernoulli(0.05).unwrap();
        let code = DbcCode::from_codewords(2, 2, words, &light, &zero).unwrap();
        assert_eq!(code.decode_weak(&[0, 0, 1]), 0);
        assert_eq!(code.decode_weak(&[1, 1, 1]), 1);
        assert_eq!(code.decode_strong(&[1, 1, 0]), 1);
    }

    #[test]
    fn superposition_respects_conditional_law() {
        let q = Alphabet::binary();
        // U = X3 exactly: every satellite equals its cloud center.
        let aux = AuxiliaryInput::new(
            Pmf::uniform(q),
            vec![
                Pmf::point_mass(q, 0).unwrap(),
                Pmf::point_mass(q, 1).unwrap(),
            ],
        )
        .unwrap();
        let z = Pmf::bernoulli(0.1).unwrap();
        let code = superposition_code(&aux, 6, 3, 4, &z, &z, &mut rng(2)).unwrap();
        for m32 in 0..4 {
            for m31 in 1..3 {
                assert_eq!(code.encode(m31, m32), code.encode(0, m32));
            }
        }
        assert!(superposition_code(&aux, 2, 4, 4, &z, &z, &mut rng(2)).is_err());
    }

    #[test]
    fn shape_validation() {
        let z = Pmf::bernoulli(0.1).unwrap();
        assert!(DbcCode::from_codewords(2, 2, vec![vec![0]; 3], &z, &z).is_err());
        assert!(DbcCode::from_codewords(1, 2, vec![vec![0], vec![0, 1]], &z, &z).is_err());
    }
}
