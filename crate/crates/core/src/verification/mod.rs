//! Empirical and exhaustive checks of coding schemes.
//!
//! Randomized checks draw every trial from its own seeded stream. The
//! exhaustive search enumerates tiny blocklengths only.

mod coupled;
mod monte_carlo;
mod search;
mod sweep;

use serde::{Deserialize, Serialize};

pub use coupled::{coupled_equivalence, coupled_equivalence_madbc};
pub use monte_carlo::{monte_carlo_2twc, monte_carlo_madbc, replay_2twc, replay_madbc};
pub use search::{
    exhaustive_code_search, ClassOptimum, SearchResult, TableScheme, DEFAULT_SEARCH_CAP,
};
pub use sweep::{rate_capacity_sweep, SweepRow, SweepSettings};

/// Trials per parallel work unit.
pub(crate) const CHUNK: u64 = 512;

const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The exact endpoints are 0 and 1 at the extremes; avoid rounding dust.
    let low = if errors == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if errors >= trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

/// Error statistics of one link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    pub link: String,
    pub trials: u64,
    pub errors: u64,
    pub error_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub half_width: f64,
}

impl LinkStats {
    pub fn new(link: impl Into<String>, errors: u64, trials: u64) -> Self {
        let (wilson_low, wilson_high) = wilson_interval(errors, trials);
        Self {
            link: link.into(),
            trials,
            errors,
            error_rate: if trials == 0 {
                0.0
            } else {
                errors as f64 / trials as f64
            },
            wilson_low,
            wilson_high,
            half_width: (wilson_high - wilson_low) / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trials: u64,
    pub seed: u64,
    pub links: Vec<LinkStats>,
    /// Trials whose composed and one-way reconstructions differ.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mismatch_count: Option<u64>,
}

impl TrialReport {
    pub(crate) fn from_counts(
        names: &[&str],
        counts: &[u64],
        trials: u64,
        seed: u64,
        mismatch_count: Option<u64>,
    ) -> Self {
        Self {
            trials,
            seed,
            links: names
                .iter()
                .zip(counts)
                .map(|(n, &c)| LinkStats::new(*n, c, trials))
                .collect(),
            mismatch_count,
        }
    }

    pub fn link(&self, name: &str) -> Option<&LinkStats> {
        self.links.iter().find(|l| l.link == name)
    }
}

/// Sums per-chunk count vectors.
pub(crate) fn add_counts<const K: usize>(
    chunks: Vec<crate::Result<[u64; K]>>,
) -> crate::Result<[u64; K]> {
    let mut total = [0u64; K];
    for c in chunks {
        for (t, x) in total.iter_mut().zip(c?) {
            *t += x;
        }
    }
    Ok(total)
}

pub(crate) fn check_trials(trials: u64) -> crate::Result<()> {
    if trials == 0 {
        return Err(crate::Error::InvalidCode(
            "at least one trial is required".into(),
        ));
    }
    Ok(())
}
