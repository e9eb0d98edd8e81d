//! Subcommand implementations. Each returns the files it produced as
//! `(name, bytes)` pairs; nothing here touches the filesystem or the clock.

use std::sync::Arc;

use serde::Serialize;
use twoway_core::capacity::{
    dbc_boundary, dbc_brute_force_oracle, region_2twc_marginals, AuxiliaryInput, MaDbcRegion,
    Region,
};
use twoway_core::channels::{MaDbcChannel, TwoWayChannel};
use twoway_core::coding::{
    cancellation_scheme, compose_2twc, compose_madbc, mac_joint_ml_code, random_coset_code,
    superposition_code, Corruption, HubUser, MacUser, NonAdaptiveScheme,
};
use twoway_core::noise::{NoiseModel, TwoWayNoise};
use twoway_core::seeds::{derive, rng};
use twoway_core::verification::{
    coupled_equivalence, coupled_equivalence_madbc, exhaustive_code_search, monte_carlo_2twc,
    monte_carlo_madbc, rate_capacity_sweep, replay_2twc, replay_madbc, SweepSettings, TrialReport,
};
use twoway_core::{Execution, Pmf};

use crate::config::{Channel, CommandKind, ExperimentConfig, SimulateMode, SCHEMA_VERSION};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub type Files = Vec<(String, Vec<u8>)>;

/// Top-level JSON document of every command.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: CommandKind,
    seed: u64,
    config: &'a ExperimentConfig,
    result: T,
}

fn json<T: Serialize>(cmd: CommandKind, seed: u64, cfg: &ExperimentConfig, result: T) -> Vec<u8> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: cmd,
        seed,
        config: cfg,
        result,
    };
    let mut out = serde_json::to_vec_pretty(&env).expect("results serialize");
    out.push(b'\n');
    out
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Other(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Other(e.to_string()))
}

/// Seeds of the independent parts of one run.
const CODE_STREAM: u64 = 1;
const TRIAL_STREAM: u64 = 2;

pub fn run(
    cmd: CommandKind,
    cfg: &ExperimentConfig,
    seed: u64,
    format: Format,
    exec: Execution,
) -> Result<Files, CliError> {
    cfg.check_command(cmd)?;
    let channel = cfg.channel()?;
    match cmd {
        CommandKind::Region => region(cfg, &channel, seed, format, exec),
        CommandKind::Simulate => simulate(cfg, &channel, seed, format, exec),
        CommandKind::Search => search(cfg, &channel, seed, format, exec),
        CommandKind::Sweep => sweep(cfg, &channel, seed, format, exec),
    }
}

#[derive(Serialize)]
struct RectangleRow {
    schema_version: u32,
    kind: &'static str,
    q: u8,
    c1: f64,
    c2: f64,
}

#[derive(Serialize)]
struct BoundaryRow {
    schema_version: u32,
    r31: f64,
    r32: f64,
    lambda: f64,
    sum_rate: f64,
    p_u: String,
    p_x3_given_u: String,
}

#[derive(Serialize)]
struct OracleRow {
    r31: f64,
    r32: f64,
}

#[derive(Serialize)]
struct RegionResult {
    #[serde(flatten)]
    region: Region,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Vec<OracleRow>>,
}

fn region(
    cfg: &ExperimentConfig,
    channel: &Channel,
    seed: u64,
    format: Format,
    exec: Execution,
) -> Result<Files, CliError> {
    let region = match channel {
        Channel::TwoWay(noise) => Region::TwoWay(region_2twc_marginals(noise)),
        Channel::Madbc { z1, z2, z3 } => {
            let mut settings = cfg.region.optimizer.clone();
            settings.seed = seed;
            let boundary = dbc_boundary(z1, z2, &cfg.region.weights(), &settings, exec)?;
            Region::Madbc(MaDbcRegion::new(z3, boundary))
        }
    };
    let oracle = match (&cfg.region.oracle, channel) {
        (Some(o), Channel::Madbc { z1, z2, .. }) => Some(
            dbc_brute_force_oracle(z1, z2, o, exec)?
                .into_iter()
                .map(|(r31, r32)| OracleRow { r31, r32 })
                .collect::<Vec<_>>(),
        ),
        _ => None,
    };
    let mut files = Files::new();
    if let Region::Madbc(reg) = &region {
        let rows = reg.boundary.points.iter().map(|p| BoundaryRow {
            schema_version: SCHEMA_VERSION,
            r31: p.r31,
            r32: p.r32,
            lambda: p.diagnostics.lambda,
            sum_rate: reg.sum_rate,
            p_u: serde_json::to_string(p.aux.p_u().probs()).expect("serializes"),
            p_x3_given_u: serde_json::to_string(
                &p.aux.rows().iter().map(|r| r.probs()).collect::<Vec<_>>(),
            )
            .expect("serializes"),
        });
        files.push(("boundary.csv".into(), csv_rows(rows)?));
        if let Some(o) = &oracle {
            files.push(("oracle.csv".into(), csv_rows(o)?));
        }
    }
    match format {
        Format::Json => {
            let result = RegionResult { region, oracle };
            files.push((
                "region.json".into(),
                json(CommandKind::Region, seed, cfg, result),
            ));
        }
        Format::Csv => {
            if let Region::TwoWay(r) = region {
                let row = RectangleRow {
                    schema_version: SCHEMA_VERSION,
                    kind: "two_way",
                    q: r.q,
                    c1: r.c1,
                    c2: r.c2,
                };
                files.push(("region.csv".into(), csv_rows([row])?));
            }
        }
    }
    Ok(files)
}

#[derive(Serialize)]
struct LinkRow<'a> {
    schema_version: u32,
    seed: u64,
    link: &'a str,
    trials: u64,
    errors: u64,
    error_rate: f64,
    wilson_low: f64,
    wilson_high: f64,
    half_width: f64,
    mismatch_count: Option<u64>,
}

fn report_files(
    cfg: &ExperimentConfig,
    seed: u64,
    format: Format,
    report: &TrialReport,
    extra: impl Serialize,
) -> Result<Files, CliError> {
    #[derive(Serialize)]
    struct SimResult<'a, E: Serialize> {
        report: &'a TrialReport,
        #[serde(flatten)]
        extra: E,
    }
    Ok(match format {
        Format::Json => vec![(
            "report.json".into(),
            json(
                CommandKind::Simulate,
                seed,
                cfg,
                SimResult { report, extra },
            ),
        )],
        Format::Csv => {
            let rows = report.links.iter().map(|link| LinkRow {
                schema_version: SCHEMA_VERSION,
                seed: report.seed,
                link: &link.link,
                trials: link.trials,
                errors: link.errors,
                error_rate: link.error_rate,
                wilson_low: link.wilson_low,
                wilson_high: link.wilson_high,
                half_width: link.half_width,
                mismatch_count: report.mismatch_count,
            });
            vec![("report.csv".into(), csv_rows(rows)?)]
        }
    })
}

fn transcripts_file<T: Serialize>(items: Vec<T>) -> (String, Vec<u8>) {
    let mut bytes = serde_json::to_vec_pretty(&items).expect("transcripts serialize");
    bytes.push(b'\n');
    ("transcripts.json".into(), bytes)
}

#[derive(Serialize)]
struct CodeSeeds {
    code_seed: u64,
    trial_seed: u64,
}

fn simulate(
    cfg: &ExperimentConfig,
    channel: &Channel,
    seed: u64,
    format: Format,
    exec: Execution,
) -> Result<Files, CliError> {
    let s = &cfg.simulate;
    let seeds = CodeSeeds {
        code_seed: derive(seed, CODE_STREAM),
        trial_seed: derive(seed, TRIAL_STREAM),
    };
    let corruption = if s.negative_control {
        Corruption::OffByOne
    } else {
        Corruption::None
    };
    match channel {
        Channel::TwoWay(noise) => {
            let ch = TwoWayChannel::new(noise.clone());
            if s.mode == SimulateMode::Cancellation {
                if !matches!(noise, TwoWayNoise::DelayedCopy(_)) {
                    return Err(CliError::Config(
                        "cancellation mode needs delayed_copy noise".into(),
                    ));
                }
                let (s1, s2) = cancellation_scheme(ch.alphabet(), s.n)?;
                let report = monte_carlo_2twc(&ch, &s1, &s2, s.trials, seeds.trial_seed, exec)?;
                let mut files = report_files(cfg, seed, format, &report, &seeds)?;
                if s.transcripts > 0 {
                    let t = (0..s.transcripts.min(s.trials))
                        .map(|t| replay_2twc(&ch, &s1, &s2, seeds.trial_seed, t))
                        .collect::<Result<Vec<_>, _>>()?;
                    files.push(transcripts_file(t));
                }
                return Ok(files);
            }
            let (n1, n2) = noise.marginals();
            let mut g = rng(seeds.code_seed);
            let q = ch.alphabet();
            // Link 1 -> 2 is decoded against Z2 and link 2 -> 1 against Z1.
            let c1 = Arc::new(random_coset_code(q, s.n, s.m1, n2, &mut g)?);
            let c2 = Arc::new(random_coset_code(q, s.n, s.m2, n1, &mut g)?);
            let report = match s.mode {
                SimulateMode::Coupled => coupled_equivalence(
                    c1.clone(),
                    c2.clone(),
                    &ch,
                    s.trials,
                    seeds.trial_seed,
                    corruption,
                    exec,
                )?,
                _ => {
                    let (u1, u2) = two_way_users(c1.clone(), c2.clone(), corruption)?;
                    monte_carlo_2twc(&ch, &u1, &u2, s.trials, seeds.trial_seed, exec)?
                }
            };
            let mut files = report_files(cfg, seed, format, &report, &seeds)?;
            if s.transcripts > 0 {
                let (u1, u2) = two_way_users(c1, c2, corruption)?;
                let t = (0..s.transcripts.min(s.trials))
                    .map(|t| replay_2twc(&ch, &u1, &u2, seeds.trial_seed, t))
                    .collect::<Result<Vec<_>, _>>()?;
                files.push(transcripts_file(t));
            }
            Ok(files)
        }
        Channel::Madbc { z1, z2, z3 } => {
            if s.mode == SimulateMode::Cancellation {
                return Err(CliError::Config(
                    "cancellation mode needs a two_way channel".into(),
                ));
            }
            let (i1, i2) = channel.iid_parts().expect("MA/DBC channel");
            let ch = MaDbcChannel::new(i1, i2, z3.clone())?;
            let q = ch.alphabet();
            let aux = match &s.aux {
                Some(a) => a.clone(),
                None => AuxiliaryInput::symmetric_superposition(&Pmf::symmetric(q, 0.1)?),
            };
            let mut g = rng(seeds.code_seed);
            let (m13, m23) = s.mac_messages;
            let (m31, m32) = s.dbc_messages;
            let mac = Arc::new(mac_joint_ml_code(
                q,
                s.n,
                m13,
                m23,
                z3.clone(),
                &mut g,
                s.pair_cap,
            )?);
            let dbc = Arc::new(superposition_code(&aux, s.n, m31, m32, z1, z2, &mut g)?);
            let report = match s.mode {
                SimulateMode::Coupled => coupled_equivalence_madbc(
                    mac.clone(),
                    dbc.clone(),
                    &ch,
                    s.trials,
                    seeds.trial_seed,
                    corruption,
                    exec,
                )?,
                _ => {
                    let (u1, u2, u3) = madbc_users(mac.clone(), dbc.clone(), corruption)?;
                    monte_carlo_madbc(&ch, (&u1, &u2, &u3), s.trials, seeds.trial_seed, exec)?
                }
            };
            let mut files = report_files(cfg, seed, format, &report, &seeds)?;
            if s.transcripts > 0 {
                let (u1, u2, u3) = madbc_users(mac, dbc, corruption)?;
                let t = (0..s.transcripts.min(s.trials))
                    .map(|t| replay_madbc(&ch, (&u1, &u2, &u3), seeds.trial_seed, t))
                    .collect::<Result<Vec<_>, _>>()?;
                files.push(transcripts_file(t));
            }
            Ok(files)
        }
    }
}

fn two_way_users(
    c1: Arc<twoway_core::coding::BlockCode>,
    c2: Arc<twoway_core::coding::BlockCode>,
    corruption: Corruption,
) -> Result<(NonAdaptiveScheme, NonAdaptiveScheme), CliError> {
    let (u1, u2) = compose_2twc(c1, c2)?;
    Ok((
        u1.with_corruption(corruption),
        u2.with_corruption(corruption),
    ))
}

fn madbc_users(
    mac: Arc<twoway_core::coding::MacCodePair>,
    dbc: Arc<twoway_core::coding::DbcCode>,
    corruption: Corruption,
) -> Result<(MacUser, MacUser, HubUser), CliError> {
    let (u1, u2, u3) = compose_madbc(mac, dbc)?;
    Ok((
        u1.with_corruption(corruption),
        u2.with_corruption(corruption),
        u3.with_corruption(corruption),
    ))
}

#[derive(Serialize)]
struct SearchRow {
    schema_version: u32,
    class: &'static str,
    n: usize,
    m1: usize,
    m2: usize,
    search_space: u64,
    error: f64,
    pe1: f64,
    pe2: f64,
}

fn search(
    cfg: &ExperimentConfig,
    channel: &Channel,
    seed: u64,
    format: Format,
    exec: Execution,
) -> Result<Files, CliError> {
    let Channel::TwoWay(noise) = channel else {
        return Err(CliError::Config("search needs a two_way channel".into()));
    };
    let s = &cfg.search;
    let result = exhaustive_code_search(noise, s.n, s.m1, s.m2, u128::from(s.cap), exec)?;
    Ok(match format {
        Format::Json => vec![(
            "search.json".into(),
            json(CommandKind::Search, seed, cfg, &result),
        )],
        Format::Csv => {
            let row = |class, o: &twoway_core::verification::ClassOptimum| SearchRow {
                schema_version: SCHEMA_VERSION,
                class,
                n: result.n,
                m1: result.m1,
                m2: result.m2,
                search_space: o.search_space,
                error: o.error,
                pe1: o.pe1,
                pe2: o.pe2,
            };
            let rows = [
                row("nonadaptive", &result.nonadaptive),
                row("adaptive", &result.adaptive),
            ];
            vec![("search.csv".into(), csv_rows(rows)?)]
        }
    })
}

fn sweep(
    cfg: &ExperimentConfig,
    channel: &Channel,
    seed: u64,
    format: Format,
    exec: Execution,
) -> Result<Files, CliError> {
    let Channel::TwoWay(noise) = channel else {
        return Err(CliError::Config("sweep needs a two_way channel".into()));
    };
    // Link 1 -> 2, corrupted by Z2.
    let (_, link): (NoiseModel, NoiseModel) = noise.marginals();
    let s = &cfg.sweep;
    let settings = SweepSettings {
        codebooks: s.codebooks,
        trials_per_codebook: s.trials_per_codebook,
        seed,
        max_messages: s.max_messages,
    };
    let rows = rate_capacity_sweep(&link, &s.rates, &s.blocklengths, &settings, exec)?;
    Ok(match format {
        Format::Json => vec![(
            "sweep.json".into(),
            json(CommandKind::Sweep, seed, cfg, &rows),
        )],
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                schema_version: u32,
                rate: f64,
                n: usize,
                messages: usize,
                actual_rate: f64,
                codebooks: u64,
                trials: u64,
                errors: u64,
                mean_error: f64,
                wilson_low: f64,
                wilson_high: f64,
            }
            let rows = rows.iter().map(|r| Row {
                schema_version: SCHEMA_VERSION,
                rate: r.rate,
                n: r.n,
                messages: r.messages,
                actual_rate: r.actual_rate,
                codebooks: r.codebooks,
                trials: r.trials,
                errors: r.errors,
                mean_error: r.mean_error,
                wilson_low: r.wilson_low,
                wilson_high: r.wilson_high,
            });
            vec![("sweep.csv".into(), csv_rows(rows)?)]
        }
    })
}
