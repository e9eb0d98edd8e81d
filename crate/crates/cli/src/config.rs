//! Experiment configuration files.
//!
//! A configuration names the channel once and carries one optional section
//! per subcommand, so one file can drive every subcommand. Every field outside `channel` has a default.

use serde::{Deserialize, Serialize};
use twoway_core::capacity::{AuxiliaryInput, DbcBoundary, DbcSettings, OracleSettings};
use twoway_core::coding::DEFAULT_PAIR_CAP;
use twoway_core::noise::{
    DelayedCopyPair, IidNoise, NoiseConfig, NoiseKind, NoiseModel, TwoWayNoise,
};
use twoway_core::verification::{SweepSettings, DEFAULT_SEARCH_CAP};
use twoway_core::Pmf;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Region,
    Simulate,
    Search,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    /// If present, the subcommand must match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    /// Master seed; may instead come from `--seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub channel: ChannelConfig,
    #[serde(default)]
    pub region: RegionConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    /// `noise1` corrupts user 1's output and `noise2` user 2's. A
    /// `delayed_copy` `noise1` describes the whole pair and takes no `noise2`.
    TwoWay {
        noise1: NoiseConfig,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        noise2: Option<NoiseConfig>,
    },
    Madbc {
        z1: NoiseConfig,
        z2: NoiseConfig,
        z3: NoiseConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    /// Explicit weights; overrides `lambda_points`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    pub lambda_points: usize,
    pub optimizer: DbcSettings,
    /// Also run the grid oracle and report it next to the boundary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSettings>,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            lambdas: None,
            lambda_points: 21,
            optimizer: DbcSettings::default(),
            oracle: None,
        }
    }
}

impl RegionConfig {
    pub fn weights(&self) -> Vec<f64> {
        self.lambdas
            .clone()
            .unwrap_or_else(|| DbcBoundary::lambda_grid(self.lambda_points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimulateMode {
    #[default]
    MonteCarlo,
    Coupled,
    /// Binary adaptive scheme that cancels a delayed copy of the noise.
    Cancellation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: SimulateMode,
    pub n: usize,
    pub trials: u64,
    /// Message counts of users 1 and 2 on the two-way channel.
    pub m1: usize,
    pub m2: usize,
    /// `(M13, M23)` on the MA/DBC.
    pub mac_messages: (usize, usize),
    /// `(M31, M32)` on the MA/DBC.
    pub dbc_messages: (usize, usize),
    /// Superposition law for the broadcast code; defaults to `U` uniform and
    /// `X3 = U + V` with `V` equal to 0 with probability 0.9.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxiliaryInput>,
    pub pair_cap: usize,
    /// Corrupt the composed decoders; coupled runs should then mismatch.
    pub negative_control: bool,
    /// Number of leading trials whose full transcripts are written out.
    pub transcripts: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            mode: SimulateMode::MonteCarlo,
            n: 8,
            trials: 10_000,
            m1: 4,
            m2: 4,
            mac_messages: (2, 2),
            dbc_messages: (2, 2),
            aux: None,
            pair_cap: DEFAULT_PAIR_CAP,
            negative_control: false,
            transcripts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n: 2,
            m1: 2,
            m2: 1,
            cap: DEFAULT_SEARCH_CAP as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub rates: Vec<f64>,
    pub blocklengths: Vec<usize>,
    pub codebooks: u64,
    pub trials_per_codebook: u64,
    pub max_messages: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let s = SweepSettings::default();
        Self {
            rates: vec![0.25, 0.5, 0.9],
            blocklengths: vec![4, 8, 12, 16],
            codebooks: s.codebooks,
            trials_per_codebook: s.trials_per_codebook,
            max_messages: s.max_messages,
        }
    }
}

/// Channel after validation.
pub enum Channel {
    TwoWay(TwoWayNoise),
    Madbc { z1: Pmf, z2: Pmf, z3: NoiseModel },
}

impl Channel {
    pub fn iid_parts(&self) -> Option<(IidNoise, IidNoise)> {
        match self {
            Channel::Madbc { z1, z2, .. } => {
                Some((IidNoise::new(z1.clone()), IidNoise::new(z2.clone())))
            }
            Channel::TwoWay(_) => None,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn iid_pmf(name: &str, cfg: &NoiseConfig) -> Result<Pmf, CliError> {
    match cfg
        .to_model()
        .map_err(|e| config_err(format!("{name}: {e}")))?
    {
        NoiseModel::Iid(n) => Ok(n.pmf().clone()),
        NoiseModel::Markov(_) => Err(config_err(format!("{name} must be iid on the MA/DBC"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn channel(&self) -> Result<Channel, CliError> {
        match &self.channel {
            ChannelConfig::TwoWay { noise1, noise2 } => {
                if noise1.kind == NoiseKind::DelayedCopy {
                    if noise2.is_some() {
                        return Err(config_err("delayed_copy noise1 takes no noise2"));
                    }
                    if noise1.q != 2 {
                        return Err(config_err("delayed_copy noise is binary"));
                    }
                    return Ok(Channel::TwoWay(TwoWayNoise::DelayedCopy(DelayedCopyPair)));
                }
                let noise2 = noise2
                    .as_ref()
                    .ok_or_else(|| config_err("two_way channel needs noise2"))?;
                let n1 = noise1
                    .to_model()
                    .map_err(|e| config_err(format!("noise1: {e}")))?;
                let n2 = noise2
                    .to_model()
                    .map_err(|e| config_err(format!("noise2: {e}")))?;
                Ok(Channel::TwoWay(
                    TwoWayNoise::independent(n1, n2).map_err(config_err)?,
                ))
            }
            ChannelConfig::Madbc { z1, z2, z3 } => {
                let z1 = iid_pmf("z1", z1)?;
                let z2 = iid_pmf("z2", z2)?;
                let z3 = z3.to_model().map_err(|e| config_err(format!("z3: {e}")))?;
                if z1.q() != z2.q() || z1.q() != z3.alphabet() {
                    return Err(config_err("z1, z2 and z3 must share one alphabet"));
                }
                Ok(Channel::Madbc { z1, z2, z3 })
            }
        }
    }

    /// The master seed, with `--seed` taking precedence.
    pub fn resolve_seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        flag.or(self.seed).ok_or_else(|| {
            config_err("a seed is required: set \"seed\" in the config or pass --seed")
        })
    }

    pub fn check_command(&self, cmd: CommandKind) -> Result<(), CliError> {
        match self.command {
            Some(c) if c != cmd => Err(config_err(format!(
                "config is for {c:?} but the {cmd:?} subcommand was invoked"
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_WAY: &str = r#"{
        "seed": 7,
        "channel": {
            "kind": "two_way",
            "noise1": {"kind": "iid", "q": 2, "pmf": [0.9, 0.1]},
            "noise2": {"kind": "markov", "q": 2, "transition": [[0.9, 0.1], [0.1, 0.9]]}
        },
        "simulate": {"mode": "coupled", "trials": 100}
    }"#;

    #[test]
    fn parses_defaults_and_round_trips() {
        let cfg = ExperimentConfig::parse(TWO_WAY).unwrap();
        assert_eq!(cfg.schema_version, 1);
        assert_eq!(cfg.simulate.mode, SimulateMode::Coupled);
        assert_eq!(cfg.simulate.n, 8);
        assert_eq!(cfg.region.weights().len(), 21);
        let again = ExperimentConfig::parse(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        assert!(matches!(
            cfg.channel().unwrap(),
            Channel::TwoWay(TwoWayNoise::Independent { .. })
        ));
    }

    #[test]
    fn seed_resolution() {
        let cfg = ExperimentConfig::parse(TWO_WAY).unwrap();
        assert_eq!(cfg.resolve_seed(None).unwrap(), 7);
        assert_eq!(cfg.resolve_seed(Some(9)).unwrap(), 9);
        let no_seed = ExperimentConfig { seed: None, ..cfg };
        assert!(no_seed.resolve_seed(None).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"channel": {"kind": "two_way", "noise1": {"kind": "iid", "q": 2, "pmf": [0.9, 0.1]}}, "bogus": 1}"#,
            r#"{"schema_version": 2, "channel": {"kind": "two_way", "noise1": {"kind": "delayed_copy", "q": 2}}}"#,
            "{ not json",
        ] {
            assert!(
                matches!(ExperimentConfig::parse(bad), Err(CliError::Config(_))),
                "{bad}"
            );
        }
        let missing = ExperimentConfig::parse(
            r#"{"channel": {"kind": "two_way", "noise1": {"kind": "iid", "q": 2, "pmf": [0.9, 0.1]}}}"#,
        )
        .unwrap();
        assert!(missing.channel().is_err());
        let markov_dbc = ExperimentConfig::parse(
            r#"{"channel": {"kind": "madbc",
                "z1": {"kind": "markov", "q": 2, "transition": [[0.9, 0.1], [0.1, 0.9]]},
                "z2": {"kind": "iid", "q": 2, "pmf": [0.9, 0.1]},
                "z3": {"kind": "iid", "q": 2, "pmf": [0.9, 0.1]}}}"#,
        )
        .unwrap();
        assert!(markov_dbc.channel().is_err());
    }

    #[test]
    fn delayed_copy_channel() {
        let cfg = ExperimentConfig::parse(
            r#"{"channel": {"kind": "two_way", "noise1": {"kind": "delayed_copy", "q": 2}}}"#,
        )
        .unwrap();
        assert!(matches!(
            cfg.channel().unwrap(),
            Channel::TwoWay(TwoWayNoise::DelayedCopy(_))
        ));
    }

    #[test]
    fn command_mismatch_is_reported() {
        let mut cfg = ExperimentConfig::parse(TWO_WAY).unwrap();
        cfg.command = Some(CommandKind::Search);
        assert!(cfg.check_command(CommandKind::Region).is_err());
        assert!(cfg.check_command(CommandKind::Search).is_ok());
    }
}
