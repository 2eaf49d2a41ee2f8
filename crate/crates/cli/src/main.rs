//! `signet` — signed-network link analysis from the command line.
//!
//! Subcommands: `ingest-check`, `stats`, `personality`, `test`, `triads`,
//! `synth`, `run-all`. All randomness is controlled solely by `--seed`;
//! reruns with the same inputs and flags produce byte-identical output.
//! Errors print a machine-readable category to stderr and exit nonzero.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use signet_core::io::{FrozenDataset, IdMap, IngestError, IngestOptions, ingest_paths};
use signet_core::pipelines::{
    LinkDirection, PipelineConfig, PipelineError, diffusion_test, emo_existence_test,
    emo_strength_test, personality_test,
};
use signet_core::report::{
    InputDigest, Manifest, Report, RunConfig, dataset_scores, error_category, run_all, sha256_hex,
};
use signet_core::synth::{GeneratorConfig, PersonalityDist, SynthError, generate};
use signet_core::{
    PersonalityScores, Sign, compute_stats, emotion_based_scores, rating_based_scores,
    triad_census,
};

#[derive(Parser)]
#[command(name = "signet", version, about = "Signed-network link analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Link file: source<TAB>target<TAB>sign with sign 1 or -1.
    #[arg(long)]
    links: PathBuf,
    /// Emotion file: source<TAB>target<TAB>(1..6 score or P|N polarity).
    #[arg(long)]
    emotions: Option<PathBuf>,
    /// Rating file: user<TAB>item<TAB>score with score 1..5.
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Fixed user id map (JSON array) from a previous run.
    #[arg(long)]
    user_map: Option<PathBuf>,
    /// Fixed item id map (JSON array) from a previous run.
    #[arg(long)]
    item_map: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    EmoExistence,
    EmoStrength,
    Diffusion,
    Personality,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreSourceArg {
    Auto,
    Rating,
    Emotion,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Outgoing,
    Incoming,
}

impl From<DirectionArg> for LinkDirection {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Outgoing => LinkDirection::Outgoing,
            DirectionArg::Incoming => LinkDirection::Incoming,
        }
    }
}

fn parse_sign(raw: &str) -> Result<Sign, String> {
    match raw {
        "1" | "+1" => Ok(Sign::Positive),
        "-1" => Ok(Sign::Negative),
        _ => Err(format!("sign must be 1 or -1, got `{raw}`")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate input files and print ingestion statistics.
    IngestCheck {
        #[command(flatten)]
        input: InputArgs,
        /// Write the user id map (JSON) here after ingestion.
        #[arg(long)]
        write_user_map: Option<PathBuf>,
        /// Write the item id map (JSON) here after ingestion.
        #[arg(long)]
        write_item_map: Option<PathBuf>,
    },
    /// Print the dataset statistics block.
    Stats {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Compute per-user optimism/pessimism scores.
    Personality {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "auto")]
        source: ScoreSourceArg,
        /// Write a per-user TSV of scores here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one hypothesis pipeline.
    Test {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        pipeline: PipelineArg,
        /// Hypothesis family: 1 (positive) or -1 (negative).
        #[arg(long, default_value = "1", value_parser = parse_sign)]
        sign: Sign,
        /// Group count for the ranked pipelines.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Retry cap per control observation.
        #[arg(long, default_value_t = 100)]
        attempts: u32,
        #[arg(long, value_enum, default_value = "outgoing")]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value = "auto")]
        source: ScoreSourceArg,
    },
    /// Classify closed signed triples (balance-theory census).
    Triads {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Generate a synthetic dataset with planted effects.
    Synth {
        #[arg(long)]
        users: usize,
        #[arg(long, default_value_t = 0.005)]
        link_density: f64,
        #[arg(long, default_value_t = 0.01)]
        emotion_density: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_emo: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_diff: f64,
        #[arg(long, default_value_t = 0.0)]
        theta_pers: f64,
        /// Beta-distribution alpha for latent personality.
        #[arg(long, default_value_t = 1.0)]
        personality_alpha: f64,
        /// Beta-distribution beta for latent personality.
        #[arg(long, default_value_t = 1.0)]
        personality_beta: f64,
        #[arg(long)]
        items: Option<usize>,
        #[arg(long, default_value_t = 0.02)]
        rating_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for links.tsv, emotions.tsv, ratings.tsv,
        /// users.json, items.json, ground-truth.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole analysis battery and write a report.
    RunAll {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// K values for the emotion-strength test.
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 30, 50])]
        k_strength: Vec<usize>,
        /// K values for the personality test.
        #[arg(long, value_delimiter = ',', default_values_t = [20usize, 30, 50])]
        k_personality: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        attempts: u32,
        #[arg(long, value_enum, default_value = "outgoing")]
        direction: DirectionArg,
        /// Report path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a plot-ready flat TSV here.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Worker threads for the pipeline battery (0 = rayon default).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Record this timestamp in the manifest (omitted when not given,
        /// keeping reruns byte-identical).
        #[arg(long)]
        timestamp: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = categorize(&err);
            let payload = serde_json::json!({
                "error": { "category": category, "message": format!("{err:#}") }
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

/// Stable machine-readable category for any failure.
fn categorize(err: &anyhow::Error) -> &'static str {
    if let Some(ingest) = err.downcast_ref::<IngestError>() {
        return match ingest {
            IngestError::Io(_) => "io",
            IngestError::Malformed { .. } | IngestError::UnknownSign { .. } => "parse",
            IngestError::UnknownIds { .. } => "unknown-ids",
        };
    }
    if let Some(pipeline) = err.downcast_ref::<PipelineError>() {
        return error_category(pipeline);
    }
    if err.downcast_ref::<SynthError>().is_some() {
        return "invalid-config";
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return "io";
    }
    "internal"
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::IngestCheck {
            input,
            write_user_map,
            write_item_map,
        } => {
            let dataset = load(&input)?;
            if let Some(path) = write_user_map {
                write_json(&path, &dataset.users)?;
            }
            if let Some(path) = write_item_map {
                write_json(&path, &dataset.items)?;
            }
            let stats = compute_stats(&dataset.network, &dataset.emotions)?;
            print_json(&serde_json::json!({
                "stats": stats,
                "ingest": dataset.report,
                "link_conflicts": dataset.network.conflict_count(),
            }))
        }
        Command::Stats { input } => {
            let dataset = load(&input)?;
            print_json(&compute_stats(&dataset.network, &dataset.emotions)?)
        }
        Command::Personality { input, source, out } => {
            let dataset = load(&input)?;
            let (scores, source_used) = scores_for(&dataset, source)?;
            if let Some(path) = out {
                let mut w = std::io::BufWriter::new(fs::File::create(&path)?);
                writeln!(w, "user\to\tp\tol\toh\tph\tpl")?;
                for u in 0..scores.num_users() {
                    let fmt = |v: Option<f64>| v.map_or("-".into(), |x| x.to_string());
                    writeln!(
                        w,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        dataset.users.name(u as u32).unwrap_or("?"),
                        fmt(scores.o[u]),
                        fmt(scores.p[u]),
                        scores.ol_size[u],
                        scores.oh_size[u],
                        scores.ph_size[u],
                        scores.pl_size[u],
                    )?;
                }
            }
            let mean = |vals: &[Option<f64>]| {
                let defined: Vec<f64> = vals.iter().flatten().copied().collect();
                (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
            };
            print_json(&serde_json::json!({
                "source": source_used,
                "users": scores.num_users(),
                "users_with_optimism": scores.defined_o(),
                "users_with_pessimism": scores.defined_p(),
                "mean_optimism": mean(&scores.o),
                "mean_pessimism": mean(&scores.p),
            }))
        }
        Command::Test {
            input,
            pipeline,
            sign,
            k,
            alpha,
            seed,
            attempts,
            direction,
            source,
        } => {
            let dataset = load(&input)?;
            let cfg = PipelineConfig {
                sign,
                k: k.unwrap_or(match pipeline {
                    PipelineArg::Personality => 20,
                    _ => 10,
                }),
                alpha,
                seed,
                sampling_attempts: attempts,
                direction: direction.into(),
            };
            let report = match pipeline {
                PipelineArg::EmoExistence => {
                    emo_existence_test(&dataset.network, &dataset.emotions, &cfg)?
                }
                PipelineArg::EmoStrength => {
                    emo_strength_test(&dataset.network, &dataset.emotions, &cfg)?
                }
                PipelineArg::Diffusion => diffusion_test(&dataset.network, &cfg)?,
                PipelineArg::Personality => {
                    let (scores, _) = scores_for(&dataset, source)?;
                    personality_test(&dataset.network, &scores, &cfg)?
                }
            };
            print_json(&report)
        }
        Command::Triads { input } => {
            let dataset = load(&input)?;
            let census = triad_census(&dataset.network);
            print_json(&serde_json::json!({
                "census": census,
                "balanced_fraction": census.balanced_fraction(),
                "total_closed": census.total_closed(),
            }))
        }
        Command::Synth {
            users,
            link_density,
            emotion_density,
            theta_emo,
            theta_diff,
            theta_pers,
            personality_alpha,
            personality_beta,
            items,
            rating_density,
            seed,
            out,
        } => {
            let cfg = GeneratorConfig {
                num_users: users,
                link_density,
                emotion_density,
                theta_emo,
                theta_diff,
                theta_pers,
                personality: PersonalityDist {
                    alpha: personality_alpha,
                    beta: personality_beta,
                },
                num_items: items.unwrap_or((users / 10).max(1)),
                rating_density,
                seed,
            };
            let data = generate(&cfg)?;
            fs::create_dir_all(&out)?;
            let users_map = IdMap::numbered("u", cfg.num_users);
            let items_map = IdMap::numbered("i", cfg.num_items);
            write_with(&out.join("links.tsv"), |w| {
                signet_core::io::write_links(&data.network, &users_map, w)
            })?;
            write_with(&out.join("emotions.tsv"), |w| {
                signet_core::io::write_emotions(&data.emotions, &users_map, w)
            })?;
            write_with(&out.join("ratings.tsv"), |w| {
                signet_core::io::write_ratings(&data.ratings, &users_map, &items_map, w)
            })?;
            write_json(&out.join("users.json"), &users_map)?;
            write_json(&out.join("items.json"), &items_map)?;
            write_json(&out.join("ground-truth.json"), &data.truth)?;
            print_json(&data.truth.stats)
        }
        Command::RunAll {
            input,
            seed,
            alpha,
            k_strength,
            k_personality,
            attempts,
            direction,
            out,
            table,
            threads,
            timestamp,
        } => {
            let dataset = load(&input)?;
            let run = RunConfig {
                seed,
                alpha,
                strength_ks: k_strength,
                personality_ks: k_personality,
                sampling_attempts: attempts,
                direction: direction.into(),
            };
            let manifest = Manifest::new(digests(&input)?, run.clone(), timestamp);
            let report = if threads == 0 {
                run_all(&dataset, &run, manifest)
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .context("building thread pool")?;
                pool.install(|| run_all(&dataset, &run, manifest))
            };
            emit_report(&report, out.as_deref(), table.as_deref())
        }
    }
}

fn load(input: &InputArgs) -> anyhow::Result<FrozenDataset> {
    let options = IngestOptions {
        fixed_users: input
            .user_map
            .as_deref()
            .map(read_id_map)
            .transpose()?,
        fixed_items: input
            .item_map
            .as_deref()
            .map(read_id_map)
            .transpose()?,
    };
    let dataset = ingest_paths(
        &input.links,
        input.emotions.as_deref(),
        input.ratings.as_deref(),
        options,
    )?;
    Ok(dataset)
}

fn scores_for(
    dataset: &FrozenDataset,
    source: ScoreSourceArg,
) -> anyhow::Result<(PersonalityScores, &'static str)> {
    match source {
        ScoreSourceArg::Auto => {
            let (scores, src) = dataset_scores(dataset);
            Ok((
                scores,
                match src {
                    signet_core::report::ScoreSource::Rating => "rating",
                    signet_core::report::ScoreSource::Emotion => "emotion",
                },
            ))
        }
        ScoreSourceArg::Rating => {
            let table = dataset
                .ratings
                .as_ref()
                .context("--source rating requires --ratings")?;
            Ok((rating_based_scores(table), "rating"))
        }
        ScoreSourceArg::Emotion => Ok((emotion_based_scores(&dataset.emotions), "emotion")),
    }
}

fn digests(input: &InputArgs) -> anyhow::Result<Vec<InputDigest>> {
    let mut digests = Vec::new();
    let mut push = |role: &str, path: Option<&Path>| -> anyhow::Result<()> {
        if let Some(path) = path {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            digests.push(InputDigest {
                role: role.to_string(),
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            });
        }
        Ok(())
    };
    push("links", Some(&input.links))?;
    push("emotions", input.emotions.as_deref())?;
    push("ratings", input.ratings.as_deref())?;
    push("user-map", input.user_map.as_deref())?;
    push("item-map", input.item_map.as_deref())?;
    Ok(digests)
}

fn emit_report(
    report: &Report,
    out: Option<&Path>,
    table: Option<&Path>,
) -> anyhow::Result<()> {
    let json = report.to_json();
    match out {
        Some(path) => fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    if let Some(path) = table {
        fs::write(path, report.to_flat_table())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_id_map(path: &Path) -> anyhow::Result<IdMap> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let map: IdMap = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing id map {}", path.display()))?;
    Ok(map)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_with(
    path: &Path,
    f: impl FnOnce(&mut std::io::BufWriter<fs::File>) -> std::io::Result<()>,
) -> anyhow::Result<()> {
    let mut w = std::io::BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}
