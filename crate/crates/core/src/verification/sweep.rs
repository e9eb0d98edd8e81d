//! Block error of random codes against rate and blocklength.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{wilson_interval, CHUNK};
use crate::alphabet::Alphabet;
use crate::coding::{BlockCode, Codebook, CodebookSeed};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::parallel::Execution;
use crate::seeds::{derive, unit_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub codebooks: u64,
    pub trials_per_codebook: u64,
    pub seed: u64,
    /// Largest message set a row may ask for.
    pub max_messages: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            codebooks: 200,
            trials_per_codebook: 50,
            seed: 0,
            max_messages: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Requested rate in bits per channel use.
    pub rate: f64,
    pub n: usize,
    /// `round(2^(n * rate))`, at least 1.
    pub messages: usize,
    /// `log2(messages) / n`.
    pub actual_rate: f64,
    pub codebooks: u64,
    pub trials: u64,
    pub errors: u64,
    pub mean_error: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Seed of codebook `c` in the row for `(rate, n)`; independent of the order
/// in which rows are listed.
fn codebook_seed(seed: u64, rate: f64, n: usize, c: u64) -> u64 {
    derive(derive(derive(seed, rate.to_bits()), n as u64), c)
}

/// Average ML block error of uniform random codes on `Y = X + Z`, one row
/// per `(rate, n)` in row-major order.
pub fn rate_capacity_sweep(
    noise: &NoiseModel,
    rates: &[f64],
    blocklengths: &[usize],
    settings: &SweepSettings,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let q: Alphabet = noise.alphabet();
    if settings.codebooks == 0 || settings.trials_per_codebook == 0 {
        return Err(Error::InvalidCode(
            "sweep needs codebooks and trials".into(),
        ));
    }
    let mut rows = Vec::new();
    for &rate in rates {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidCode(format!(
                "rate {rate} must be nonnegative"
            )));
        }
        for &n in blocklengths {
            if n == 0 {
                return Err(Error::InvalidCode("zero blocklength".into()));
            }
            let m = (n as f64 * rate).exp2().round().max(1.0);
            let words = q.word_count(n).map_or(f64::INFINITY, |w| w as f64);
            if m > words {
                return Err(Error::InvalidCode(format!(
                    "rate {rate} needs {m} messages but only {words} words of length {n} exist"
                )));
            }
            if m > settings.max_messages as f64 {
                return Err(Error::CapExceeded {
                    required: m as u128,
                    cap: settings.max_messages as u128,
                });
            }
            let m = m as usize;
            let per = settings.trials_per_codebook;
            let total = settings.codebooks * per;
            let units = exec.map_chunks(settings.codebooks, (CHUNK / per).max(1), |range| {
                let mut errors = 0u64;
                for c in range {
                    let seed = codebook_seed(settings.seed, rate, n, c);
                    let book = Codebook::regenerate(CodebookSeed {
                        seed,
                        q: q.size(),
                        n,
                        m,
                    })?;
                    let code = BlockCode::ml(book, noise.clone())?;
                    let mut rng = unit_rng(seed, 1);
                    for _ in 0..per {
                        let w = rng.gen_range(0..m);
                        let z = noise.sample_path(n, &mut rng);
                        let y = q.add_words(code.encode(w), &z);
                        errors += u64::from(code.decode(&y) != w);
                    }
                }
                Ok::<_, Error>(errors)
            });
            let errors = units.into_iter().sum::<Result<u64>>()?;
            let (wilson_low, wilson_high) = wilson_interval(errors, total);
            rows.push(SweepRow {
                rate,
                n,
                messages: m,
                actual_rate: (m as f64).log2() / n as f64,
                codebooks: settings.codebooks,
                trials: total,
                errors,
                mean_error: errors as f64 / total as f64,
                wilson_low,
                wilson_high,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Pmf;

    fn bsc() -> NoiseModel {
        NoiseModel::iid(Pmf::bernoulli(0.1).unwrap())
    }

    fn small() -> SweepSettings {
        SweepSettings {
            codebooks: 20,
            trials_per_codebook: 20,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn zero_rate_is_errorless() {
        let rows =
            rate_capacity_sweep(&bsc(), &[0.0], &[4, 8], &small(), Execution::Parallel).unwrap();
        assert!(rows.iter().all(|r| r.messages == 1 && r.errors == 0));
    }

    #[test]
    fn rows_are_order_independent_and_replayable() {
        let s = small();
        let a =
            rate_capacity_sweep(&bsc(), &[0.25, 0.5], &[4, 8], &s, Execution::Parallel).unwrap();
        let b =
            rate_capacity_sweep(&bsc(), &[0.5, 0.25], &[8, 4], &s, Execution::Sequential).unwrap();
        for r in &a {
            assert!(b.contains(r));
        }
        assert_eq!(a[1].messages, 4);
        assert_eq!(a[3].messages, 16);
    }

    #[test]
    fn oversized_rows_are_rejected() {
        let s = SweepSettings {
            max_messages: 256,
            ..small()
        };
        assert!(rate_capacity_sweep(&bsc(), &[0.9], &[16], &s, Execution::Sequential).is_err());
        assert!(
            rate_capacity_sweep(&bsc(), &[1.5], &[4], &small(), Execution::Sequential).is_err()
        );
    }
}
