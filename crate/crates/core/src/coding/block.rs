use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::seeds::{rng, SimRng};

/// Encoder table of a block code: message `m` maps to `codewords[m]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCodebook", into = "RawCodebook")]
pub struct Codebook {
    q: Alphabet,
    n: usize,
    codewords: Vec<Vec<Symbol>>,
}

#[derive(Serialize, Deserialize)]
struct RawCodebook {
    q: u8,
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    codewords: Vec<Vec<Symbol>>,
}

impl TryFrom<RawCodebook> for Codebook {
    type Error = Error;
    fn try_from(raw: RawCodebook) -> Result<Self> {
        if raw.codewords.len() != raw.m {
            return Err(Error::InvalidCode(format!(
                "M = {} but {} codewords listed",
                raw.m,
                raw.codewords.len()
            )));
        }
        let cb = Codebook::new(Alphabet::new(raw.q)?, raw.codewords)?;
        if cb.n != raw.n {
            return Err(Error::LengthMismatch {
                expected: raw.n,
                found: cb.n,
            });
        }
        Ok(cb)
    }
}

impl From<Codebook> for RawCodebook {
    fn from(c: Codebook) -> Self {
        RawCodebook {
            q: c.q.size(),
            n: c.n,
            m: c.codewords.len(),
            codewords: c.codewords,
        }
    }
}

/// Parameters from which a uniform random codebook is regenerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookSeed {
    pub seed: u64,
    pub q: u8,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl Codebook {
    pub fn new(q: Alphabet, codewords: Vec<Vec<Symbol>>) -> Result<Self> {
        let n = codewords
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidCode("empty codebook".into()))?;
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
        Ok(Self { q, n, codewords })
    }

    /// `m` codewords with i.i.d. uniform symbols.
    pub fn random(q: Alphabet, n: usize, m: usize, rng: &mut SimRng) -> Result<Self> {
        check_size(q, n, m)?;
        let codewords = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(0..q.size())).collect())
            .collect();
        Self::new(q, codewords)
    }

    pub fn regenerate(recipe: CodebookSeed) -> Result<Self> {
        Self::random(
            Alphabet::new(recipe.q)?,
            recipe.n,
            recipe.m,
            &mut rng(recipe.seed),
        )
    }

    pub fn alphabet(&self) -> Alphabet {
        self.q
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn word(&self, m: usize) -> &[Symbol] {
        &self.codewords[m]
    }

    pub fn codewords(&self) -> &[Vec<Symbol>] {
        &self.codewords
    }

    /// `log2(M) / n` bits per channel use.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).log2() / self.n as f64
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.codewords.iter().all(|w| seen.insert(w))
    }
}

pub(crate) fn check_size(q: Alphabet, n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidCode("n and M must be positive".into()));
    }
    let fits = q.word_count(n).is_none_or(|words| m <= words);
    if !fits {
        return Err(Error::InvalidCode(format!(
            "M = {m} exceeds q^n = {}^{n}",
            q.size()
        )));
    }
    Ok(())
}

/// Decoding rule of a point-to-point code observing `codeword + noise`.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoder {
    /// Maximum likelihood against the declared noise process; ties go to the
    /// smallest message index.
    MaximumLikelihood(NoiseModel),
    /// Explicit table indexed by the base-q value of the received word.
    Table(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    codebook: Codebook,
    decoder: Decoder,
}

impl BlockCode {
    pub fn new(codebook: Codebook, decoder: Decoder) -> Result<Self> {
        match &decoder {
            Decoder::MaximumLikelihood(noise) => {
                if noise.alphabet() != codebook.q {
                    return Err(Error::AlphabetMismatch {
                        expected: codebook.q.size(),
                        found: noise.alphabet().size(),
                    });
                }
            }
            Decoder::Table(table) => {
                let words = codebook.q.word_count(codebook.n);
                if words != Some(table.len()) {
                    return Err(Error::InvalidCode(format!(
                        "decoder table has {} entries, expected q^n",
                        table.len()
                    )));
                }
                if let Some(&bad) = table.iter().find(|&&m| m >= codebook.len()) {
                    return Err(Error::MessageOutOfRange {
                        message: bad,
                        count: codebook.len(),
                    });
                }
            }
        }
        Ok(Self { codebook, decoder })
    }

    pub fn ml(codebook: Codebook, noise: NoiseModel) -> Result<Self> {
        Self::new(codebook, Decoder::MaximumLikelihood(noise))
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn alphabet(&self) -> Alphabet {
        self.codebook.q
    }

    pub fn blocklength(&self) -> usize {
        self.codebook.n
    }

    pub fn message_count(&self) -> usize {
        self.codebook.len()
    }

    pub fn rate(&self) -> f64 {
        self.codebook.rate()
    }

    pub fn encode(&self, m: usize) -> &[Symbol] {
        self.codebook.word(m)
    }

    pub fn decode(&self, received: &[Symbol]) -> usize {
        debug_assert_eq!(received.len(), self.codebook.n);
        match &self.decoder {
            Decoder::Table(table) => table[self.codebook.q.word_index(received)],
            Decoder::MaximumLikelihood(noise) => ml_decode(noise, &self.codebook, received),
        }
    }
}

fn ml_decode(noise: &NoiseModel, codebook: &Codebook, received: &[Symbol]) -> usize {
    let q = codebook.q;
    let mut scratch = vec![0u32; q.len() * q.len()];
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (m, c) in codebook.codewords.iter().enumerate() {
        let diff = received.iter().zip(c).map(|(&y, &x)| q.sub(y, x));
        let score = noise.log_likelihood(diff, &mut scratch);
        if super::beats(score, best_score) {
            best_score = score;
            best = m;
        }
    }
    best
}

/// Uniform random codebook with an exact ML decoder for `noise`.
pub fn random_coset_code(
    q: Alphabet,
    n: usize,
    m: usize,
    noise: NoiseModel,
    rng: &mut SimRng,
) -> Result<BlockCode> {
    BlockCode::ml(Codebook::random(q, n, m, rng)?, noise)
}
