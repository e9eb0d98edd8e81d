//! Modulo-q symbol arithmetic and information functionals on finite
//! distributions.
//!
//! Symbols are the representatives `0..q`. Logarithms are base 2 and the
//! convention `0 log 0 = 0` is used throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A channel symbol. Valid values for an alphabet of size `q` are `0..q`.
pub type Symbol = u8;

/// Tolerance on the total mass accepted when building a [`Pmf`].
pub const PMF_TOLERANCE: f64 = 1e-12;

/// The common finite alphabet `{0, ..., q-1}` shared by all inputs, outputs
/// and noise symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Alphabet {
    q: u8,
}

impl Alphabet {
    pub fn new(q: u8) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidAlphabet(q as usize));
        }
        Ok(Self { q })
    }

    pub const fn binary() -> Self {
        Self { q: 2 }
    }

    #[inline]
    pub fn size(self) -> u8 {
        self.q
    }

    #[inline]
    pub fn len(self) -> usize {
        self.q as usize
    }

    /// Always false; present for symmetry with `len`.
    pub fn is_empty(self) -> bool {
        false
    }

    #[inline]
    pub fn contains(self, s: Symbol) -> bool {
        s < self.q
    }

    pub fn check(self, s: Symbol) -> Result<Symbol> {
        if self.contains(s) {
            Ok(s)
        } else {
            Err(Error::InvalidSymbol {
                symbol: s,
                q: self.q,
            })
        }
    }

    pub fn check_all(self, symbols: &[Symbol]) -> Result<()> {
        symbols.iter().try_for_each(|&s| self.check(s).map(|_| ()))
    }

    #[inline]
    pub fn add(self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!(self.contains(a) && self.contains(b));
        ((a as u16 + b as u16) % self.q as u16) as Symbol
    }

    #[inline]
    pub fn sub(self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!(self.contains(a) && self.contains(b));
        ((a as u16 + self.q as u16 - b as u16) % self.q as u16) as Symbol
    }

    #[inline]
    pub fn neg(self, a: Symbol) -> Symbol {
        self.sub(0, a)
    }

    /// Symbolwise `a + b` over equal-length words.
    pub fn add_words(self, a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    /// Symbolwise `a - b` over equal-length words.
    pub fn sub_words(self, a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    /// Base-q index of a word, first symbol most significant.
    pub fn word_index(self, word: &[Symbol]) -> usize {
        word.iter()
            .fold(0usize, |acc, &s| acc * self.len() + s as usize)
    }

    /// Inverse of [`Alphabet::word_index`] for words of length `n`.
    pub fn word_from_index(self, mut index: usize, n: usize) -> Vec<Symbol> {
        let mut word = vec![0; n];
        for slot in word.iter_mut().rev() {
            *slot = (index % self.len()) as Symbol;
            index /= self.len();
        }
        word
    }

    /// Number of words of length `n`, if it fits in a `usize`.
    pub fn word_count(self, n: usize) -> Option<usize> {
        (self.len()).checked_pow(u32::try_from(n).ok()?)
    }

    pub fn symbols(self) -> impl Iterator<Item = Symbol> {
        0..self.q
    }
}

impl TryFrom<u8> for Alphabet {
    type Error = Error;
    fn try_from(q: u8) -> Result<Self> {
        Alphabet::new(q)
    }
}

impl From<Alphabet> for u8 {
    fn from(a: Alphabet) -> u8 {
        a.q
    }
}

/// `(a + b) mod q`.
pub fn mod_add(a: Symbol, b: Symbol, q: Alphabet) -> Symbol {
    q.add(a, b)
}

/// `(a - b) mod q`.
pub fn mod_sub(a: Symbol, b: Symbol, q: Alphabet) -> Symbol {
    q.sub(a, b)
}

/// Probability mass function over a modulo-q alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf", into = "RawPmf")]
pub struct Pmf {
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPmf {
    q: u8,
    probs: Vec<f64>,
}

impl TryFrom<RawPmf> for Pmf {
    type Error = Error;
    fn try_from(raw: RawPmf) -> Result<Self> {
        if raw.probs.len() != raw.q as usize {
            return Err(Error::InvalidPmf(format!(
                "q = {} but {} probabilities given",
                raw.q,
                raw.probs.len()
            )));
        }
        Pmf::new(raw.probs)
    }
}

impl From<Pmf> for RawPmf {
    fn from(p: Pmf) -> RawPmf {
        RawPmf {
            q: p.q().size(),
            probs: p.probs,
        }
    }
}

impl Pmf {
    /// Validates and renormalizes once. The alphabet size is the number of
    /// entries.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, PMF_TOLERANCE)
    }

    pub fn with_tolerance(mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.len() < 2 || probs.len() > u8::MAX as usize {
            return Err(Error::InvalidPmf(format!(
                "alphabet size {} outside 2..=255",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPmf(format!(
                "entry {bad} is not a probability"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidPmf(format!("mass sums to {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self { probs })
    }

    pub fn uniform(q: Alphabet) -> Self {
        Self {
            probs: vec![1.0 / q.len() as f64; q.len()],
        }
    }

    pub fn point_mass(q: Alphabet, s: Symbol) -> Result<Self> {
        q.check(s)?;
        let mut probs = vec![0.0; q.len()];
        probs[s as usize] = 1.0;
        Ok(Self { probs })
    }

    /// Binary distribution with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![1.0 - p, p])
    }

    /// Mass `1 - p` on zero and `p` spread evenly over the nonzero symbols.
    pub fn symmetric(q: Alphabet, p: f64) -> Result<Self> {
        let rest = p / (q.len() - 1) as f64;
        let mut probs = vec![rest; q.len()];
        probs[0] = 1.0 - p;
        Self::new(probs)
    }

    pub fn q(&self) -> Alphabet {
        Alphabet {
            q: self.probs.len() as u8,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, s: Symbol) -> f64 {
        self.probs[s as usize]
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    /// Law of the modulo-q sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Pmf) -> Result<Pmf> {
        let q = self.q();
        if other.q() != q {
            return Err(Error::AlphabetMismatch {
                expected: q.size(),
                found: other.q().size(),
            });
        }
        Ok(Pmf {
            probs: convolve_slices(&self.probs, &other.probs),
        })
    }

    /// Law of `X + c` for a fixed shift `c`.
    pub fn shifted(&self, c: Symbol) -> Pmf {
        let q = self.q();
        let mut probs = vec![0.0; q.len()];
        for s in q.symbols() {
            probs[q.add(s, c) as usize] = self.prob(s);
        }
        Pmf { probs }
    }

    pub fn is_point_mass(&self) -> bool {
        self.probs.contains(&1.0)
    }
}

/// Shannon entropy in bits of a nonnegative weight vector summing to one.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

pub fn convolve_pmf(p: &Pmf, r: &Pmf) -> Result<Pmf> {
    p.convolve(r)
}

/// Cyclic convolution of two weight vectors of equal length.
pub(crate) fn convolve_slices(a: &[f64], b: &[f64]) -> Vec<f64> {
    let q = a.len();
    let mut out = vec![0.0; q];
    for (i, &pa) in a.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (j, &pb) in b.iter().enumerate() {
            out[(i + j) % q] += pa * pb;
        }
    }
    out
}

/// `I(X; Y | U)` in bits for a joint table indexed `[u][x][y]`.
pub fn conditional_mutual_information(joint: &[Vec<Vec<f64>>]) -> Result<f64> {
    let mut total = 0.0;
    let mut cmi = 0.0;
    for slice in joint {
        let cols = slice.first().map_or(0, Vec::len);
        if slice.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch("ragged joint table".into()));
        }
        let p_u: f64 = slice.iter().flatten().sum();
        if slice.iter().flatten().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPmf("negative joint entry".into()));
        }
        total += p_u;
        if p_u <= 0.0 {
            continue;
        }
        let px: Vec<f64> = slice.iter().map(|row| row.iter().sum::<f64>()).collect();
        let py: Vec<f64> = (0..cols)
            .map(|y| slice.iter().map(|row| row[y]).sum())
            .collect();
        for (x, row) in slice.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    cmi += p * (p * p_u / (px[x] * py[y])).log2();
                }
            }
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPmf(format!("joint table sums to {total}")));
    }
    Ok(cmi.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u8) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    #[test]
    fn alphabet_rejects_degenerate_sizes() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
    }

    #[test]
    fn modular_examples() {
        assert_eq!(mod_add(1, 1, q(2)), 0);
        assert_eq!(mod_add(3, 4, q(5)), 2);
        assert_eq!(mod_sub(0, 1, q(2)), 1);
        assert_eq!(mod_sub(1, 3, q(5)), 3);
        for n in 2..=7 {
            for x in 0..n {
                assert_eq!(mod_add(0, x, q(n)), x);
                assert_eq!(mod_sub(x, x, q(n)), 0);
            }
        }
    }

    #[test]
    fn group_laws_hold_exhaustively() {
        for n in [2u8, 3, 5] {
            let a = q(n);
            for x in a.symbols() {
                assert_eq!(a.add(x, a.neg(x)), 0);
                for y in a.symbols() {
                    assert_eq!(a.add(x, y), a.add(y, x));
                    assert_eq!(a.add(a.sub(x, y), y), x);
                    for z in a.symbols() {
                        assert_eq!(a.add(a.add(x, y), z), a.add(x, a.add(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn word_index_round_trips() {
        let a = q(3);
        for i in 0..27 {
            assert_eq!(a.word_index(&a.word_from_index(i, 3)), i);
        }
        assert_eq!(a.word_index(&[1, 0, 2]), 11);
    }

    #[test]
    fn entropy_examples() {
        assert!((Pmf::uniform(q(2)).entropy() - 1.0).abs() < 1e-15);
        assert_eq!(Pmf::point_mass(q(4), 2).unwrap().entropy(), 0.0);
        let direct = -0.1 * 0.1f64.log2() - 0.9 * 0.9f64.log2();
        let h = Pmf::bernoulli(0.1).unwrap().entropy();
        assert!((h - direct).abs() < 1e-15);
        assert!((h - 0.46899).abs() < 1e-4);
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![1.0]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
        let p = Pmf::new(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(p.q().size(), 3);
    }

    #[test]
    fn convolution_examples() {
        // Four joint outcomes: (0,1) and (1,0) give a 1, each with mass 0.09.
        let b = Pmf::bernoulli(0.1).unwrap();
        let c = b.convolve(&b).unwrap();
        assert!((c.prob(1) - 0.18).abs() < 1e-15);

        let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let id = p.convolve(&Pmf::point_mass(q(3), 0).unwrap()).unwrap();
        assert_eq!(id, p);
        let u = Pmf::uniform(q(3)).convolve(&p).unwrap();
        for s in 0..3 {
            assert!((u.prob(s) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(p.convolve(&b).is_err());
    }

    #[test]
    fn shifting_moves_mass() {
        let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(p.shifted(1).probs(), &[0.5, 0.2, 0.3]);
    }

    #[test]
    fn cmi_examples() {
        // U independent of (X, Y), X = Y uniform binary.
        let joint = vec![
            vec![vec![0.25, 0.0], vec![0.0, 0.25]],
            vec![vec![0.25, 0.0], vec![0.0, 0.25]],
        ];
        assert!((conditional_mutual_information(&joint).unwrap() - 1.0).abs() < 1e-12);

        // X and Y independent given U.
        let joint = vec![
            vec![vec![0.1 * 0.3, 0.1 * 0.7], vec![0.4 * 0.3, 0.4 * 0.7]],
            vec![vec![0.25 * 0.5, 0.25 * 0.5], vec![0.25 * 0.5, 0.25 * 0.5]],
        ];
        assert!(conditional_mutual_information(&joint).unwrap().abs() < 1e-12);

        // U = X3 uniform, Y = X3 + Z1.
        let mut joint = vec![vec![vec![0.0; 2]; 2]; 2];
        for u in 0..2 {
            joint[u][u][u] = 0.5 * 0.9;
            joint[u][u][1 - u] = 0.5 * 0.1;
        }
        assert!(conditional_mutual_information(&joint).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cmi_of_additive_channel_is_output_minus_noise_entropy() {
        for (n, noise) in [(2u8, vec![0.9, 0.1]), (3, vec![0.7, 0.2, 0.1])] {
            let a = q(n);
            let z = Pmf::new(noise).unwrap();
            let px = 1.0 / n as f64;
            let mut slice = vec![vec![0.0; n as usize]; n as usize];
            for x in a.symbols() {
                for s in a.symbols() {
                    slice[x as usize][a.add(x, s) as usize] += px * z.prob(s);
                }
            }
            let py = Pmf::uniform(a).convolve(&z).unwrap();
            let expected = py.entropy() - z.entropy();
            let got = conditional_mutual_information(&[slice]).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn cmi_rejects_bad_tables() {
        assert!(conditional_mutual_information(&[vec![vec![0.5, 0.6]]]).is_err());
        assert!(conditional_mutual_information(&[vec![vec![0.5], vec![0.25, 0.25]]]).is_err());
    }

    #[test]
    fn pmf_json_round_trip() {
        let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"q":3,"probs":[0.2,0.3,0.5]}"#);
        assert_eq!(serde_json::from_str::<Pmf>(&json).unwrap(), p);
        assert!(serde_json::from_str::<Pmf>(r#"{"q":2,"probs":[0.2,0.3,0.5]}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pmf(n: usize) -> impl Strategy<Value = Pmf> {
            prop::collection::vec(0.0f64..1.0, n).prop_filter_map("zero mass", |w| {
                let s: f64 = w.iter().sum();
                (s > 1e-6)
                    .then(|| Pmf::with_tolerance(w.iter().map(|x| x / s).collect(), 1e-9).unwrap())
            })
        }

        proptest! {
            #[test]
            fn convolution_never_lowers_entropy((p, r) in (2usize..6).prop_flat_map(|n| (pmf(n), pmf(n)))) {
                let c = p.convolve(&r).unwrap();
                prop_assert!(c.entropy() + 1e-12 >= p.entropy().max(r.entropy()));
                prop_assert!(c.entropy() <= (p.q().len() as f64).log2() + 1e-12);
                let c2 = r.convolve(&p).unwrap();
                for (a, b) in c.probs().iter().zip(c2.probs()) {
                    prop_assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }
}
