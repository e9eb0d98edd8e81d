//! Weighted-sum tracing of the degraded broadcast boundary.
//!
//! For each weight `λ` the objective `λ·r32 + (1-λ)·r31` is maximized over
//! `p(u)` and `p(x3 | u)` with `|U| = q + 1`. The search is a multi-start
//! pattern search on the product of simplices: every move shifts mass between
//! two coordinates of one simplex, so iterates never leave the feasible set.
//! Facets of the resulting hull are then refined with the weight whose level
//! lines are parallel to them, which fills in nearly straight stretches of the
//! boundary that a uniform weight grid would skip.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hull::concave_envelope;
use super::{AuxiliaryInput, DbcNoise};
use crate::alphabet::Pmf;
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::seeds::{derive, unit_rng, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DbcSettings {
    /// Random starts per weight, on top of the analytic ones.
    pub starts: usize,
    pub seed: u64,
    /// A sweep that gains less than this halves the step.
    pub tolerance: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: u64,
    /// Also start from `U` constant with uniform `X3` and from `U = X3`.
    pub analytic_starts: bool,
    pub refine: bool,
    /// Minimum gain over a hull facet for a refined point to count.
    pub refine_tolerance: f64,
    pub max_refinements: usize,
}

impl Default for DbcSettings {
    fn default() -> Self {
        Self {
            starts: 32,
            seed: 0,
            tolerance: 1e-8,
            initial_step: 0.25,
            min_step: 1e-9,
            max_evaluations: 200_000,
            analytic_starts: true,
            refine: true,
            refine_tolerance: 1e-7,
            max_refinements: 64,
        }
    }
}

impl DbcSettings {
    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.starts + 2 * usize::from(self.analytic_starts) == 0 {
            return Err(Error::InvalidCode(
                "optimizer needs at least one start".into(),
            ));
        }
        if !positive(self.tolerance)
            || !positive(self.min_step)
            || !positive(self.initial_step)
            || self.initial_step > 1.0
            || self.refine_tolerance.is_nan()
            || self.refine_tolerance < 0.0
        {
            return Err(Error::InvalidCode(
                "optimizer steps and tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Convergence record of one weighted maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lambda: f64,
    pub objective: f64,
    /// Seed from which the random starts for this weight were drawn.
    pub seed: u64,
    pub starts: usize,
    pub best_start: usize,
    pub converged_starts: usize,
    pub evaluations: u64,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub r31: f64,
    pub r32: f64,
    #[serde(flatten)]
    pub aux: AuxiliaryInput,
    pub diagnostics: Diagnostics,
}

/// Pareto points sorted by increasing `r31`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DbcBoundary {
    pub points: Vec<BoundaryPoint>,
}

impl DbcBoundary {
    pub fn rate_pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.r31, p.r32)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `k` evenly spaced weights covering `[0, 1]`.
    pub fn lambda_grid(k: usize) -> Vec<f64> {
        match k {
            0 => Vec::new(),
            1 => vec![0.5],
            _ => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
        }
    }
}

/// Simplex coordinates: `w[0]` is `p(u)`, `w[1 + u]` is `p(x3 | u)`.
type Point = Vec<Vec<f64>>;

struct Outcome {
    point: Point,
    value: f64,
    evaluations: u64,
    converged: bool,
}

struct Problem<'a> {
    noise: &'a DbcNoise,
    lambda: f64,
    settings: &'a DbcSettings,
}

impl Problem<'_> {
    fn value(&self, w: &Point) -> f64 {
        let (r31, r32) = self.noise.rates(&w[0], &w[1..]);
        self.lambda * r32 + (1.0 - self.lambda) * r31
    }

    fn search(&self, mut w: Point) -> Outcome {
        let mut value = self.value(&w);
        let mut evaluations = 1;
        let mut step = self.settings.initial_step;
        let mut converged = false;
        while evaluations < self.settings.max_evaluations {
            let start = value;
            for s in 0..w.len() {
                let dim = w[s].len();
                for from in 0..dim {
                    for to in 0..dim {
                        if from == to {
                            continue;
                        }
                        // Line search along one mass transfer, doubling while it pays.
                        let mut delta = step;
                        loop {
                            let moved = delta.min(w[s][from]);
                            if moved <= 0.0 {
                                break;
                            }
                            w[s][from] -= moved;
                            w[s][to] += moved;
                            let candidate = self.value(&w);
                            evaluations += 1;
                            if candidate > value {
                                value = candidate;
                                if moved < delta {
                                    break;
                                }
                                delta *= 2.0;
                            } else {
                                w[s][from] += moved;
                                w[s][to] -= moved;
                                break;
                            }
                        }
                    }
                }
            }
            if value - start < self.settings.tolerance {
                step *= 0.5;
                if step < self.settings.min_step {
                    converged = true;
                    break;
                }
            }
        }
        Outcome {
            point: w,
            value,
            evaluations,
            converged,
        }
    }
}

fn random_simplex(dim: usize, rng: &mut SimRng) -> Vec<f64> {
    let w: Vec<f64> = (0..dim)
        .map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn analytic_start(q: usize, index: usize) -> Point {
    let card = q + 1;
    let uniform = vec![1.0 / q as f64; q];
    let mut w = Vec::with_capacity(card + 1);
    if index == 0 {
        // U constant, X3 uniform.
        let mut p_u = vec![0.0; card];
        p_u[0] = 1.0;
        w.push(p_u);
        w.extend(std::iter::repeat_n(uniform, card));
    } else {
        // U = X3 uniform; the spare label is unused.
        let mut p_u = vec![1.0 / q as f64; card];
        p_u[q] = 0.0;
        w.push(p_u);
        for x in 0..q {
            let mut row = vec![0.0; q];
            row[x] = 1.0;
            w.push(row);
        }
        w.push(uniform);
    }
    w
}

struct Traced {
    lambda: f64,
    seed: u64,
    best: Outcome,
    best_start: usize,
    starts: usize,
    converged: usize,
    evaluations: u64,
}

/// Runs every start of every weight as one flat parallel batch.
fn trace(
    noise: &DbcNoise,
    lambdas: &[f64],
    settings: &DbcSettings,
    exec: Execution,
) -> Vec<Traced> {
    let q = noise.q();
    let analytic = if settings.analytic_starts { 2 } else { 0 };
    let per = analytic + settings.starts;
    let seeds: Vec<u64> = lambdas
        .iter()
        .map(|l| derive(settings.seed, l.to_bits()))
        .collect();
    let runs = exec.map(lambdas.len() * per, |job| {
        let (li, k) = (job / per, job % per);
        let start = if k < analytic {
            analytic_start(q, k)
        } else {
            let mut rng = unit_rng(seeds[li], (k - analytic) as u64);
            let mut w = vec![random_simplex(q + 1, &mut rng)];
            w.extend((0..=q).map(|_| random_simplex(q, &mut rng)));
            w
        };
        Problem {
            noise,
            lambda: lambdas[li],
            settings,
        }
        .search(start)
    });
    let mut runs = runs.into_iter();
    lambdas
        .iter()
        .zip(seeds)
        .map(|(&lambda, seed)| {
            let mut converged = 0;
            let mut evaluations = 0;
            let mut best: Option<(usize, Outcome)> = None;
            for (k, out) in runs.by_ref().take(per).enumerate() {
                converged += usize::from(out.converged);
                evaluations += out.evaluations;
                if best.as_ref().is_none_or(|(_, b)| out.value > b.value) {
                    best = Some((k, out));
                }
            }
            let (best_start, best) = best.expect("at least one start");
            Traced {
                lambda,
                seed,
                best,
                best_start,
                starts: per,
                converged,
                evaluations,
            }
        })
        .collect()
}

fn to_point(noise: &DbcNoise, t: Traced, refined: bool) -> Result<BoundaryPoint> {
    let w = &t.best.point;
    let (r31, r32) = noise.rates(&w[0], &w[1..]);
    let rows = w[1..]
        .iter()
        .map(|r| Pmf::with_tolerance(r.iter().map(|x| x.max(0.0)).collect(), 1e-9))
        .collect::<Result<_>>()?;
    let p_u = Pmf::with_tolerance(w[0].iter().map(|x| x.max(0.0)).collect(), 1e-9)?;
    Ok(BoundaryPoint {
        r31,
        r32,
        aux: AuxiliaryInput::new(p_u, rows)?,
        diagnostics: Diagnostics {
            lambda: t.lambda,
            objective: t.best.value,
            seed: t.seed,
            starts: t.starts,
            best_start: t.best_start,
            converged_starts: t.converged,
            evaluations: t.evaluations,
            refined,
        },
    })
}

/// Keeps points not dominated by another, sorted by increasing `r31`.
fn pareto(mut points: Vec<BoundaryPoint>) -> Vec<BoundaryPoint> {
    points.sort_by(|a, b| b.r31.total_cmp(&a.r31).then(b.r32.total_cmp(&a.r32)));
    let mut best = f64::NEG_INFINITY;
    let mut kept = Vec::new();
    for p in points {
        if p.r32 > best + 1e-12 {
            best = p.r32;
            kept.push(p);
        }
    }
    kept.reverse();
    kept
}

/// Facet weights of the current hull that have not been tried yet.
fn facet_lambdas(points: &[BoundaryPoint], tried: &[f64]) -> Vec<(f64, f64)> {
    let env = concave_envelope(&points.iter().map(|p| (p.r31, p.r32)).collect::<Vec<_>>());
    env.windows(2)
        .filter_map(|w| {
            let (a, b) = (w[0], w[1]);
            let slope = (b.1 - a.1) / (b.0 - a.0);
            if !(slope.is_finite() && slope < 0.0) {
                return None;
            }
            let lambda = 1.0 / (1.0 - slope);
            let facet = lambda * a.1 + (1.0 - lambda) * a.0;
            (!tried.iter().any(|t| (t - lambda).abs() < 1e-12)).then_some((lambda, facet))
        })
        .collect()
}

/// Boundary of the degraded broadcast region for noises `Z1` and `Z1 ⊛ Z2`.
///
/// Per-weight results are merged in weight order, so the output depends only
/// on the inputs and `settings`, never on `exec`.
pub fn dbc_boundary(
    z1: &Pmf,
    z2: &Pmf,
    lambdas: &[f64],
    settings: &DbcSettings,
    exec: Execution,
) -> Result<DbcBoundary> {
    if lambdas.is_empty() {
        return Err(Error::InvalidCode("empty weight grid".into()));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidCode(format!("weight {bad} outside [0, 1]")));
    }
    if z1.q() != z2.q() {
        return Err(Error::AlphabetMismatch {
            expected: z1.q().size(),
            found: z2.q().size(),
        });
    }
    settings.validate()?;
    let noise = DbcNoise::new(z1, z2)?;

    let mut points = trace(&noise, lambdas, settings, exec)
        .into_iter()
        .map(|t| to_point(&noise, t, false))
        .collect::<Result<Vec<_>>>()?;
    let mut tried: Vec<f64> = lambdas.to_vec();

    if settings.refine {
        let mut budget = settings.max_refinements;
        while budget > 0 {
            let current = pareto(points.clone());
            let mut facets = facet_lambdas(&current, &tried);
            facets.truncate(budget);
            if facets.is_empty() {
                break;
            }
            budget -= facets.len();
            let weights: Vec<f64> = facets.iter().map(|f| f.0).collect();
            tried.extend(&weights);
            let mut gained = false;
            for ((_, facet), t) in facets.iter().zip(trace(&noise, &weights, settings, exec)) {
                if t.best.value > facet + settings.refine_tolerance {
                    gained = true;
                    points.push(to_point(&noise, t, true)?);
                }
            }
            if !gained {
                break;
            }
        }
    }
    Ok(DbcBoundary {
        points: pareto(points),
    })
}
