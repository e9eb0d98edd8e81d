//! Capacity regions of the two-way channel and of the MA/DBC network.
//!
//! The 2TWC region is the rectangle `R1 <= log q - H(Z2)`,
//! `R2 <= log q - H(Z1)` with entropy rates in place of entropies. The MA/DBC
//! region is the product of the MAC sum-rate simplex
//! `R13 + R23 <= log q - H(Z3)` and the degraded broadcast region traced by
//! an auxiliary variable `U` with at most `q + 1` values.

mod boundary;
mod hull;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::alphabet::{convolve_slices, entropy_of, Alphabet, Pmf};
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, TwoWayNoise};

pub use boundary::{dbc_boundary, BoundaryPoint, DbcBoundary, DbcSettings, Diagnostics};
pub use hull::{concave_envelope, envelope_value};
pub use oracle::{dbc_brute_force_oracle, OracleSettings, DEFAULT_ORACLE_CAP};

/// Capacity rectangle of the two-user two-way channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle2TWC {
    pub q: u8,
    /// Capacity of the link from user 1 to user 2.
    pub c1: f64,
    /// Capacity of the link from user 2 to user 1.
    pub c2: f64,
}

fn log_q(q: Alphabet) -> f64 {
    (q.len() as f64).log2()
}

/// `noise1` corrupts what user 1 receives, `noise2` what user 2 receives.
pub fn region_2twc(noise1: &NoiseModel, noise2: &NoiseModel) -> Result<Rectangle2TWC> {
    let q = noise1.alphabet();
    if noise2.alphabet() != q {
        return Err(Error::AlphabetMismatch {
            expected: q.size(),
            found: noise2.alphabet().size(),
        });
    }
    Ok(rectangle(q, noise1.entropy_rate(), noise2.entropy_rate()))
}

/// Rectangle from the marginal entropy rates of any noise pair.
pub fn region_2twc_marginals(noise: &TwoWayNoise) -> Rectangle2TWC {
    let (h1, h2) = noise.marginal_entropy_rates();
    rectangle(noise.alphabet(), h1, h2)
}

fn rectangle(q: Alphabet, h1: f64, h2: f64) -> Rectangle2TWC {
    let top = log_q(q);
    Rectangle2TWC {
        q: q.size(),
        c1: (top - h2).clamp(0.0, top),
        c2: (top - h1).clamp(0.0, top),
    }
}

/// `log q - H(Z3)`, the sum-rate bound of the multiple-access direction.
pub fn sum_rate_mac(noise3: &NoiseModel) -> f64 {
    let top = log_q(noise3.alphabet());
    (top - noise3.entropy_rate()).clamp(0.0, top)
}

/// Auxiliary input `p(u) p(x3 | u)` of the broadcast direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAux", into = "RawAux")]
pub struct AuxiliaryInput {
    p_u: Pmf,
    rows: Vec<Pmf>,
}

#[derive(Serialize, Deserialize)]
struct RawAux {
    p_u: Vec<f64>,
    p_x3_given_u: Vec<Vec<f64>>,
}

impl TryFrom<RawAux> for AuxiliaryInput {
    type Error = Error;
    fn try_from(raw: RawAux) -> Result<Self> {
        let rows = raw
            .p_x3_given_u
            .into_iter()
            .map(|r| Pmf::with_tolerance(r, 1e-9))
            .collect::<Result<_>>()?;
        AuxiliaryInput::new(Pmf::with_tolerance(raw.p_u, 1e-9)?, rows)
    }
}

impl From<AuxiliaryInput> for RawAux {
    fn from(a: AuxiliaryInput) -> Self {
        RawAux {
            p_u: a.p_u.probs().to_vec(),
            p_x3_given_u: a.rows.iter().map(|r| r.probs().to_vec()).collect(),
        }
    }
}

impl AuxiliaryInput {
    pub fn new(p_u: Pmf, rows: Vec<Pmf>) -> Result<Self> {
        if rows.len() != p_u.q().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} conditional rows for |U| = {}",
                rows.len(),
                p_u.q().len()
            )));
        }
        let q = rows[0].q();
        if let Some(bad) = rows.iter().find(|r| r.q() != q) {
            return Err(Error::AlphabetMismatch {
                expected: q.size(),
                found: bad.q().size(),
            });
        }
        if rows.len() > q.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "|U| = {} exceeds q + 1 = {}",
                rows.len(),
                q.len() + 1
            )));
        }
        Ok(Self { p_u, rows })
    }

    /// `U` constant and `X3` uniform.
    pub fn constant_uniform(q: Alphabet) -> Self {
        let p_u = Pmf::point_mass(Alphabet::binary(), 0).expect("valid");
        Self::new(p_u, vec![Pmf::uniform(q); 2]).expect("valid")
    }

    /// `U = X3`, uniform.
    pub fn identity_uniform(q: Alphabet) -> Self {
        let rows = q
            .symbols()
            .map(|s| Pmf::point_mass(q, s).expect("valid"))
            .collect();
        Self::new(Pmf::uniform(q), rows).expect("valid")
    }

    /// `U` uniform on `Q`, `X3 = U + V` with `V` having law `perturbation`.
    pub fn symmetric_superposition(perturbation: &Pmf) -> Self {
        let q = perturbation.q();
        let rows = q.symbols().map(|s| perturbation.shifted(s)).collect();
        Self::new(Pmf::uniform(q), rows).expect("valid")
    }

    pub fn alphabet(&self) -> Alphabet {
        self.rows[0].q()
    }

    pub fn u_card(&self) -> usize {
        self.rows.len()
    }

    pub fn p_u(&self) -> &Pmf {
        &self.p_u
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    /// Marginal law of `X3`.
    pub fn p_x3(&self) -> Vec<f64> {
        let mut px = vec![0.0; self.alphabet().len()];
        for (pu, row) in self.p_u.probs().iter().zip(&self.rows) {
            for (acc, p) in px.iter_mut().zip(row.probs()) {
                *acc += pu * p;
            }
        }
        px
    }
}

/// Precomputed noise laws for repeated rate evaluation.
#[derive(Debug, Clone)]
pub(crate) struct DbcNoise {
    pub z1: Vec<f64>,
    pub z12: Vec<f64>,
    pub h_z1: f64,
}

impl DbcNoise {
    pub fn new(z1: &Pmf, z2: &Pmf) -> Result<Self> {
        let z12 = z1.convolve(z2)?;
        Ok(Self {
            z1: z1.probs().to_vec(),
            z12: z12.probs().to_vec(),
            h_z1: z1.entropy(),
        })
    }

    pub fn q(&self) -> usize {
        self.z1.len()
    }

    /// `(r31, r32)` for weights `p_u` and conditional rows.
    pub fn rates<R: AsRef<[f64]>>(&self, p_u: &[f64], rows: &[R]) -> (f64, f64) {
        let q = self.q();
        let mut r31 = 0.0;
        let mut cond_weak = 0.0;
        let mut mix = vec![0.0; q];
        for (&pu, row) in p_u.iter().zip(rows) {
            if pu <= 0.0 {
                continue;
            }
            let row = row.as_ref();
            r31 += pu * (entropy_of(&convolve_slices(row, &self.z1)) - self.h_z1);
            let weak = convolve_slices(row, &self.z12);
            cond_weak += pu * entropy_of(&weak);
            for (m, w) in mix.iter_mut().zip(&weak) {
                *m += pu * w;
            }
        }
        let r32 = entropy_of(&mix) - cond_weak;
        // Values this small are cancellation error, not rate.
        let clean = |r: f64| if r < 1e-12 { 0.0 } else { r };
        (clean(r31), clean(r32))
    }
}

/// `(I(X3; X3 + Z1 | U), I(U; X3 + Z1 + Z2))` in bits.
pub fn dbc_rate_pair(aux: &AuxiliaryInput, z1: &Pmf, z2: &Pmf) -> Result<(f64, f64)> {
    if z1.q() != aux.alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: aux.alphabet().size(),
            found: z1.q().size(),
        });
    }
    let noise = DbcNoise::new(z1, z2)?;
    let rows: Vec<&[f64]> = aux.rows.iter().map(|r| r.probs()).collect();
    Ok(noise.rates(aux.p_u.probs(), &rows))
}

/// Capacity region of the MA/DBC network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaDbcRegion {
    pub q: u8,
    pub sum_rate: f64,
    pub boundary: DbcBoundary,
}

impl MaDbcRegion {
    pub fn new(noise3: &NoiseModel, boundary: DbcBoundary) -> Self {
        Self {
            q: noise3.alphabet().size(),
            sum_rate: sum_rate_mac(noise3),
            boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    TwoWay(Rectangle2TWC),
    Madbc(MaDbcRegion),
}

/// Membership with slack `tol`. Two-way regions take `(r1, r2)`; MA/DBC
/// regions take `(r13, r23, r31, r32)` and are convexified by time sharing.
pub fn region_contains(region: &Region, point: &[f64], tol: f64) -> Result<bool> {
    let nonnegative = point.iter().all(|&r| r >= -tol);
    match region {
        Region::TwoWay(rect) => {
            let [r1, r2] = point else {
                return Err(Error::DimensionMismatch(format!(
                    "two-way region takes 2 rates, got {}",
                    point.len()
                )));
            };
            Ok(nonnegative && *r1 <= rect.c1 + tol && *r2 <= rect.c2 + tol)
        }
        Region::Madbc(reg) => {
            let [r13, r23, r31, r32] = point else {
                return Err(Error::DimensionMismatch(format!(
                    "MA/DBC region takes 4 rates, got {}",
                    point.len()
                )));
            };
            if !nonnegative || r13 + r23 > reg.sum_rate + tol {
                return Ok(false);
            }
            let env = concave_envelope(&reg.boundary.rate_pairs());
            Ok(envelope_value(&env, (r31 - tol).max(0.0)).is_some_and(|y| *r32 <= y + tol))
        }
    }
}
