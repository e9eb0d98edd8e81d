//! Exhaustive grid evaluation of the broadcast rate pairs.
//!
//! This deliberately shares nothing with the optimizer beyond the entropy
//! helpers: it enumerates `p(u)` and `p(x3 | u)` on a lattice and keeps the
//! Pareto frontier of everything it sees.

use serde::{Deserialize, Serialize};

use crate::alphabet::{convolve_slices, entropy_of, Pmf};
use crate::error::{Error, Result};
use crate::parallel::Execution;

pub const DEFAULT_ORACLE_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSettings {
    /// Lattice spacing; `1 / step` must be an integer.
    pub step: f64,
    /// Defaults to `q + 1`.
    pub u_card: Option<usize>,
    /// Upper bound on the number of rate pairs evaluated.
    pub cap: u128,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            step: 0.02,
            u_card: None,
            cap: DEFAULT_ORACLE_CAP,
        }
    }
}

/// All points of the simplex in `dim` coordinates with denominator `res`.
fn lattice(res: usize, dim: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, dim: usize, res: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if dim == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / res as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(left - c, dim - 1, res, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(res, dim, res, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Clears rounding dust so exact zeros compare equal.
fn snap(x: f64) -> f64 {
    if x < 1e-12 {
        0.0
    } else {
        x
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Nondecreasing index tuples of length `len` over `0..n`.
fn multisets(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; len];
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..len).rev().find(|&i| cur[i] + 1 < n) else {
            return out;
        };
        let next = cur[pos] + 1;
        cur[pos..].fill(next);
    }
}

fn frontier(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut best = f64::NEG_INFINITY;
    let mut kept: Vec<(f64, f64)> = pts
        .into_iter()
        .filter(|p| {
            let keep = p.1 > best;
            best = best.max(p.1);
            keep
        })
        .collect();
    kept.reverse();
    kept
}

/// Pareto frontier of `(r31, r32)` over the lattice, sorted by `r31`.
///
/// Because the weights `p(u)` range over the whole lattice, the conditional
/// rows only need to be enumerated as multisets.
pub fn dbc_brute_force_oracle(
    z1: &Pmf,
    z2: &Pmf,
    settings: &OracleSettings,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    if z1.q() != z2.q() {
        return Err(Error::AlphabetMismatch {
            expected: z1.q().size(),
            found: z2.q().size(),
        });
    }
    let step = settings.step;
    let res = (1.0 / step).round();
    if !(0.01..=1.0).contains(&step) || ((res * step) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidCode(format!(
            "grid step {step} must be at least 0.01 and divide 1"
        )));
    }
    let res = res as usize;
    let q = z1.q().len();
    let card = settings.u_card.unwrap_or(q + 1);
    if card == 0 || card > q + 1 {
        return Err(Error::DimensionMismatch(format!(
            "|U| = {card} outside 1..={}",
            q + 1
        )));
    }

    let lattice_size = |dim: usize| binomial((res + dim - 1) as u128, (dim - 1) as u128);
    let row_count = lattice_size(q);
    let required =
        binomial(row_count + card as u128 - 1, card as u128).saturating_mul(lattice_size(card));
    if required > settings.cap {
        return Err(Error::CapExceeded {
            required,
            cap: settings.cap,
        });
    }

    let rows = lattice(res, q);
    let weights = lattice(res, card);
    let z12 = z1.convolve(z2)?;
    let h_z1 = z1.entropy();
    let strong: Vec<f64> = rows
        .iter()
        .map(|r| entropy_of(&convolve_slices(r, z1.probs())) - h_z1)
        .collect();
    let weak: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| convolve_slices(r, z12.probs()))
        .collect();
    let weak_h: Vec<f64> = weak.iter().map(|w| entropy_of(w)).collect();
    let combos = multisets(rows.len(), card);

    let fronts = exec.map(combos.len(), |c| {
        let combo = &combos[c];
        let mut mix = vec![0.0; q];
        let pts = weights
            .iter()
            .map(|pu| {
                mix.fill(0.0);
                let (mut r31, mut cond) = (0.0, 0.0);
                for (&w, &r) in pu.iter().zip(combo) {
                    if w == 0.0 {
                        continue;
                    }
                    r31 += w * strong[r];
                    cond += w * weak_h[r];
                    for (m, x) in mix.iter_mut().zip(&weak[r]) {
                        *m += w * x;
                    }
                }
                (snap(r31), snap(entropy_of(&mix) - cond))
            })
            .collect();
        frontier(pts)
    });
    Ok(frontier(fronts.into_iter().flatten().collect()))
}
