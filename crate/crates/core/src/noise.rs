//! Stationary ergodic noise processes.
//!
//! Single processes are i.i.d. or first-order Markov. The delayed-copy pair
//! is the one correlated two-way noise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{entropy_of, Alphabet, Pmf, Symbol};
use crate::error::{Error, Result};
use crate::seeds::SimRng;

/// Row-sum tolerance for transition matrices.
pub const ROW_TOLERANCE: f64 = 1e-12;
/// Accepted residual of `pi P = pi` for the computed stationary law.
pub const STATIONARY_TOLERANCE: f64 = 1e-10;
/// Minimum average number of samples per (context, symbol) cell demanded by
/// [`empirical_entropy_rate`].
pub const MIN_SAMPLES_PER_CELL: usize = 10;

/// Inverse-CDF sampler over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
struct Sampler {
    cdf: Vec<f64>,
    last_support: Symbol,
}

impl Sampler {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_support = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as Symbol;
        Self { cdf, last_support }
    }

    #[inline]
    fn draw(&self, rng: &mut SimRng) -> Symbol {
        let u: f64 = rng.gen();
        self.cdf
            .iter()
            .position(|&c| c > u)
            .map_or(self.last_support, |i| i as Symbol)
    }
}

fn log_table(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect()
}

/// Memoryless noise with a fixed marginal law.
#[derive(Debug, Clone, PartialEq)]
pub struct IidNoise {
    pmf: Pmf,
    sampler: Sampler,
    log_probs: Vec<f64>,
}

impl IidNoise {
    pub fn new(pmf: Pmf) -> Self {
        let sampler = Sampler::new(pmf.probs());
        let log_probs = log_table(pmf.probs());
        Self {
            pmf,
            sampler,
            log_probs,
        }
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn alphabet(&self) -> Alphabet {
        self.pmf.q()
    }

    pub fn sample_path(&self, n: usize, rng: &mut SimRng) -> Vec<Symbol> {
        (0..n).map(|_| self.sampler.draw(rng)).collect()
    }
}

/// First-order stationary Markov noise. Paths start in the stationary law.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovNoise {
    transition: Vec<Vec<f64>>,
    stationary: Pmf,
    initial: Sampler,
    rows: Vec<Sampler>,
    log_stationary: Vec<f64>,
    log_transition: Vec<Vec<f64>>,
}

impl MarkovNoise {
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self> {
        let transition = validate_transition(transition)?;
        let stationary = stationary_distribution(&transition)?;
        Ok(Self {
            initial: Sampler::new(stationary.probs()),
            rows: transition.iter().map(|r| Sampler::new(r)).collect(),
            log_stationary: log_table(stationary.probs()),
            log_transition: transition.iter().map(|r| log_table(r)).collect(),
            transition,
            stationary,
        })
    }

    /// Two-or-more-state chain that stays put with probability `1 - p` and
    /// otherwise jumps uniformly to one of the other states.
    pub fn symmetric_flip(q: Alphabet, p: f64) -> Result<Self> {
        let off = p / (q.len() - 1) as f64;
        let transition = (0..q.len())
            .map(|i| {
                (0..q.len())
                    .map(|j| if i == j { 1.0 - p } else { off })
                    .collect()
            })
            .collect();
        Self::new(transition)
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &Pmf {
        &self.stationary
    }

    pub fn alphabet(&self) -> Alphabet {
        self.stationary.q()
    }
}

fn validate_transition(mut transition: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let q = transition.len();
    if !(2..=u8::MAX as usize).contains(&q) {
        return Err(Error::InvalidTransition(format!("{q} states")));
    }
    for (i, row) in transition.iter_mut().enumerate() {
        if row.len() != q {
            return Err(Error::InvalidTransition(format!(
                "row {i} has {} entries, expected {q}",
                row.len()
            )));
        }
        if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidTransition(format!(
                "row {i} has a negative entry"
            )));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_TOLERANCE {
            return Err(Error::InvalidTransition(format!("row {i} sums to {s}")));
        }
        row.iter_mut().for_each(|p| *p /= s);
    }
    Ok(transition)
}

/// Breadth-first levels from state 0 over positive-probability edges.
fn bfs_levels(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[0] = Some(0);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let next = level[u].map(|l| l + 1);
        for &v in &adj[u] {
            if level[v].is_none() {
                level[v] = next;
                queue.push_back(v);
            }
        }
    }
    level
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Unique stationary law of an irreducible aperiodic transition matrix.
#[allow(clippy::needless_range_loop)]
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Pmf> {
    let p = validate_transition(transition.to_vec())?;
    let q = p.len();
    let forward: Vec<Vec<usize>> = (0..q)
        .map(|i| (0..q).filter(|&j| p[i][j] > 0.0).collect())
        .collect();
    let backward: Vec<Vec<usize>> = (0..q)
        .map(|j| (0..q).filter(|&i| p[i][j] > 0.0).collect())
        .collect();
    let level = bfs_levels(&forward);
    if level.iter().any(Option::is_none) || bfs_levels(&backward).iter().any(Option::is_none) {
        return Err(Error::NotErgodic("chain is reducible".into()));
    }
    let level: Vec<usize> = level.into_iter().flatten().collect();
    let period = (0..q)
        .flat_map(|u| forward[u].iter().map(move |&v| (u, v)))
        .fold(0, |g, (u, v)| gcd(g, (level[u] + 1).abs_diff(level[v])));
    if period != 1 {
        return Err(Error::NotErgodic(format!("chain has period {period}")));
    }

    // Doubly stochastic chains are exactly uniform; elimination would leave
    // rounding dust that breaks ties between equally likely paths.
    if (0..q).all(|j| ((0..q).map(|i| p[i][j]).sum::<f64>() - 1.0).abs() <= 1e-12) {
        return Ok(Pmf::uniform(Alphabet::new(q as u8)?));
    }

    // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    let mut a: Vec<Vec<f64>> = (0..q)
        .map(|r| {
            let mut row: Vec<f64> = (0..q).map(|c| p[c][r]).collect();
            row[r] -= 1.0;
            row.push(0.0);
            row
        })
        .collect();
    a[q - 1] = vec![1.0; q + 1];
    for col in 0..q {
        let pivot = (col..q)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        let d = a[col][col];
        if d.abs() < 1e-300 {
            return Err(Error::NotErgodic("singular stationary system".into()));
        }
        for r in 0..q {
            if r != col {
                let f = a[r][col] / d;
                if f != 0.0 {
                    for c in col..=q {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    let pi: Vec<f64> = (0..q).map(|i| (a[i][q] / a[i][i]).max(0.0)).collect();
    let pmf = Pmf::with_tolerance(pi, 1e-9)?;
    for j in 0..q {
        let lhs: f64 = (0..q).map(|i| pmf.probs()[i] * p[i][j]).sum();
        if (lhs - pmf.probs()[j]).abs() > STATIONARY_TOLERANCE {
            return Err(Error::NotErgodic(format!(
                "stationary residual {} at state {j}",
                (lhs - pmf.probs()[j]).abs()
            )));
        }
    }
    if pmf.probs().iter().any(|&x| x <= 0.0) {
        return Err(Error::NotErgodic("stationary law has a zero entry".into()));
    }
    Ok(pmf)
}

/// A single stationary ergodic noise process.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    Iid(IidNoise),
    Markov(MarkovNoise),
}

impl From<IidNoise> for NoiseModel {
    fn from(n: IidNoise) -> Self {
        NoiseModel::Iid(n)
    }
}

impl From<MarkovNoise> for NoiseModel {
    fn from(n: MarkovNoise) -> Self {
        NoiseModel::Markov(n)
    }
}

impl NoiseModel {
    pub fn iid(pmf: Pmf) -> Self {
        NoiseModel::Iid(IidNoise::new(pmf))
    }

    /// Noise that is always zero.
    pub fn silent(q: Alphabet) -> Self {
        Self::iid(Pmf::point_mass(q, 0).expect("0 is a valid symbol"))
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            NoiseModel::Iid(n) => n.alphabet(),
            NoiseModel::Markov(n) => n.alphabet(),
        }
    }

    /// Single-letter marginal law.
    pub fn marginal(&self) -> &Pmf {
        match self {
            NoiseModel::Iid(n) => n.pmf(),
            NoiseModel::Markov(n) => n.stationary(),
        }
    }

    pub fn is_memoryless(&self) -> bool {
        matches!(self, NoiseModel::Iid(_))
    }

    /// Entropy rate in bits per symbol.
    pub fn entropy_rate(&self) -> f64 {
        match self {
            NoiseModel::Iid(n) => n.pmf.entropy(),
            NoiseModel::Markov(n) => n
                .stationary
                .probs()
                .iter()
                .zip(&n.transition)
                .map(|(pi, row)| pi * entropy_of(row))
                .sum(),
        }
    }

    pub fn sample_path(&self, n: usize, rng: &mut SimRng) -> Vec<Symbol> {
        let mut out = Vec::with_capacity(n);
        self.sample_into(n, rng, &mut out);
        out
    }

    /// Appends a fresh length-`n` path to `out`.
    pub fn sample_into(&self, n: usize, rng: &mut SimRng, out: &mut Vec<Symbol>) {
        match self {
            NoiseModel::Iid(m) => out.extend((0..n).map(|_| m.sampler.draw(rng))),
            NoiseModel::Markov(m) => {
                if n == 0 {
                    return;
                }
                let mut s = m.initial.draw(rng);
                out.push(s);
                for _ in 1..n {
                    s = m.rows[s as usize].draw(rng);
                    out.push(s);
                }
            }
        }
    }

    /// Natural-log probability of a path, computed from symbol (or
    /// transition) counts so that paths with equal counts score identically.
    /// `counts` is scratch space of at least `q * q` entries.
    pub fn log_likelihood<I>(&self, path: I, counts: &mut [u32]) -> f64
    where
        I: IntoIterator<Item = Symbol>,
    {
        let q = self.alphabet().len();
        match self {
            NoiseModel::Iid(m) => {
                let counts = &mut counts[..q];
                counts.fill(0);
                path.into_iter().for_each(|s| counts[s as usize] += 1);
                weighted_log(counts, &m.log_probs)
            }
            NoiseModel::Markov(m) => {
                let counts = &mut counts[..q * q];
                counts.fill(0);
                let mut it = path.into_iter();
                let Some(first) = it.next() else { return 0.0 };
                let mut prev = first as usize;
                for s in it {
                    counts[prev * q + s as usize] += 1;
                    prev = s as usize;
                }
                let mut total = m.log_stationary[first as usize];
                for (a, row) in m.log_transition.iter().enumerate() {
                    total += weighted_log(&counts[a * q..(a + 1) * q], row);
                }
                total
            }
        }
    }

    /// Exact probability of a path, as a running product.
    pub fn path_probability(&self, path: &[Symbol]) -> f64 {
        match self {
            NoiseModel::Iid(m) => path.iter().map(|&s| m.pmf.prob(s)).product(),
            NoiseModel::Markov(m) => match path.split_first() {
                None => 1.0,
                Some((&first, rest)) => {
                    let mut p = m.stationary.prob(first);
                    let mut prev = first;
                    for &s in rest {
                        p *= m.transition[prev as usize][s as usize];
                        prev = s;
                    }
                    p
                }
            },
        }
    }
}

fn weighted_log(counts: &[u32], log_probs: &[f64]) -> f64 {
    counts
        .iter()
        .zip(log_probs)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &lp)| c as f64 * lp)
        .sum()
}

pub fn sample_path(model: &NoiseModel, n: usize, rng: &mut SimRng) -> Vec<Symbol> {
    model.sample_path(n, rng)
}

pub fn entropy_rate(model: &NoiseModel) -> f64 {
    model.entropy_rate()
}

/// Binary pair with `Z1` i.i.d. uniform and `Z2[i] = Z1[i-1]`, where the
/// symbol before the first, `Z1[0]`, is taken to be 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DelayedCopyPair;

impl DelayedCopyPair {
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::binary()
    }

    pub fn sample(&self, n: usize, rng: &mut SimRng) -> (Vec<Symbol>, Vec<Symbol>) {
        let z1: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let z2 = Self::delayed(&z1);
        (z1, z2)
    }

    pub fn delayed(z1: &[Symbol]) -> Vec<Symbol> {
        std::iter::once(0)
            .chain(z1.iter().copied())
            .take(z1.len())
            .collect()
    }

    /// Entropy rates of the two marginal processes: one bit each.
    pub fn marginal_entropy_rates(&self) -> (f64, f64) {
        (1.0, 1.0)
    }
}

/// `(z1^n, z2^n, probability)`.
pub type JointRealization = (Vec<Symbol>, Vec<Symbol>, f64);

/// Joint law of the noise pair of a two-user two-way channel.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum TwoWayNoise {
    /// `Z1` (into user 1) and `Z2` (into user 2) independent.
    Independent {
        z1: NoiseModel,
        z2: NoiseModel,
    },
    DelayedCopy(DelayedCopyPair),
}

impl TwoWayNoise {
    pub fn independent(z1: NoiseModel, z2: NoiseModel) -> Result<Self> {
        if z1.alphabet() != z2.alphabet() {
            return Err(Error::AlphabetMismatch {
                expected: z1.alphabet().size(),
                found: z2.alphabet().size(),
            });
        }
        Ok(TwoWayNoise::Independent { z1, z2 })
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            TwoWayNoise::Independent { z1, .. } => z1.alphabet(),
            TwoWayNoise::DelayedCopy(p) => p.alphabet(),
        }
    }

    pub fn sample(&self, n: usize, rng: &mut SimRng) -> (Vec<Symbol>, Vec<Symbol>) {
        match self {
            TwoWayNoise::Independent { z1, z2 } => {
                let a = z1.sample_path(n, rng);
                let b = z2.sample_path(n, rng);
                (a, b)
            }
            TwoWayNoise::DelayedCopy(p) => p.sample(n, rng),
        }
    }

    /// `(H(Z1), H(Z2))` entropy rates of the marginal processes.
    pub fn marginal_entropy_rates(&self) -> (f64, f64) {
        match self {
            TwoWayNoise::Independent { z1, z2 } => (z1.entropy_rate(), z2.entropy_rate()),
            TwoWayNoise::DelayedCopy(p) => p.marginal_entropy_rates(),
        }
    }

    /// Memoryless processes with the same entropy rates as the marginals.
    /// For independent noise these are the marginals themselves.
    pub fn marginals(&self) -> (NoiseModel, NoiseModel) {
        match self {
            TwoWayNoise::Independent { z1, z2 } => (z1.clone(), z2.clone()),
            TwoWayNoise::DelayedCopy(p) => {
                let u = NoiseModel::iid(Pmf::uniform(p.alphabet()));
                (u.clone(), u)
            }
        }
    }

    /// Every pair of length-`n` noise paths with positive probability.
    pub fn joint_law(&self, n: usize) -> Result<Vec<JointRealization>> {
        let q = self.alphabet();
        let words = q.word_count(n).filter(|&w| w <= 1 << 16).ok_or_else(|| {
            Error::Unsupported(format!("noise law over {n} symbols is too large"))
        })?;
        let all: Vec<Vec<Symbol>> = (0..words).map(|i| q.word_from_index(i, n)).collect();
        let mut law = Vec::new();
        match self {
            TwoWayNoise::Independent { z1, z2 } => {
                let p2: Vec<f64> = all.iter().map(|w| z2.path_probability(w)).collect();
                for a in &all {
                    let pa = z1.path_probability(a);
                    if pa == 0.0 {
                        continue;
                    }
                    for (b, &pb) in all.iter().zip(&p2) {
                        if pb > 0.0 {
                            law.push((a.clone(), b.clone(), pa * pb));
                        }
                    }
                }
            }
            TwoWayNoise::DelayedCopy(_) => {
                let p = 1.0 / words as f64;
                for a in &all {
                    law.push((a.clone(), DelayedCopyPair::delayed(a), p));
                }
            }
        }
        Ok(law)
    }
}

/// Plug-in estimate of `H(Z_i | Z_{i-m}, ..., Z_{i-1})` in bits.
pub fn empirical_entropy_rate(path: &[Symbol], q: Alphabet, context_order: usize) -> Result<f64> {
    q.check_all(path)?;
    let cells = q
        .word_count(context_order + 1)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::InsufficientData("context order too large".into()))?;
    let samples = path.len().saturating_sub(context_order);
    if samples < MIN_SAMPLES_PER_CELL * cells {
        return Err(Error::InsufficientData(format!(
            "{samples} samples for {cells} context cells (need {} per cell)",
            MIN_SAMPLES_PER_CELL
        )));
    }
    let k = q.len();
    let mut counts = vec![0u64; cells];
    let modulus = cells / k;
    let mut ctx = q.word_index(&path[..context_order]);
    for &s in &path[context_order..] {
        counts[ctx * k + s as usize] += 1;
        ctx = if modulus > 1 {
            (ctx * k + s as usize) % modulus
        } else {
            0
        };
    }
    let n = samples as f64;
    let mut h = 0.0;
    for row in counts.chunks(k) {
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let t = total as f64;
        for &c in row.iter().filter(|&&c| c > 0) {
            h -= (c as f64 / n) * (c as f64 / t).log2();
        }
    }
    Ok(h.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Iid,
    Markov,
    DelayedCopy,
}

/// JSON description of a noise process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub q: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
}

impl NoiseConfig {
    pub fn iid(pmf: &Pmf) -> Self {
        Self {
            kind: NoiseKind::Iid,
            q: pmf.q().size(),
            pmf: Some(pmf.probs().to_vec()),
            transition: None,
        }
    }

    pub fn delayed_copy() -> Self {
        Self {
            kind: NoiseKind::DelayedCopy,
            q: 2,
            pmf: None,
            transition: None,
        }
    }

    /// Builds a single process; the delayed-copy kind describes a pair and
    /// is rejected here.
    pub fn to_model(&self) -> Result<NoiseModel> {
        let model = match self.kind {
            NoiseKind::Iid => {
                let probs = self
                    .pmf
                    .clone()
                    .ok_or_else(|| Error::InvalidPmf("iid noise needs \"pmf\"".into()))?;
                NoiseModel::iid(Pmf::new(probs)?)
            }
            NoiseKind::Markov => {
                let t = self.transition.clone().ok_or_else(|| {
                    Error::InvalidTransition("markov noise needs \"transition\"".into())
                })?;
                NoiseModel::Markov(MarkovNoise::new(t)?)
            }
            NoiseKind::DelayedCopy => {
                return Err(Error::Unsupported(
                    "delayed_copy describes a noise pair, not a single process".into(),
                ))
            }
        };
        if model.alphabet().size() != self.q {
            return Err(Error::AlphabetMismatch {
                expected: self.q,
                found: model.alphabet().size(),
            });
        }
        Ok(model)
    }
}

impl From<&NoiseModel> for NoiseConfig {
    fn from(m: &NoiseModel) -> Self {
        match m {
            NoiseModel::Iid(n) => NoiseConfig::iid(n.pmf()),
            NoiseModel::Markov(n) => NoiseConfig {
                kind: NoiseKind::Markov,
                q: n.alphabet().size(),
                pmf: None,
                transition: Some(n.transition().to_vec()),
            },
        }
    }
}
