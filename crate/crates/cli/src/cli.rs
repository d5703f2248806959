//! The `imbf` command line: one subcommand per pipeline stage.
//!
//! `split` scans and splits a dataset, `plan` builds a rebalancing plan,
//! `augment` materializes it, `train`/`evaluate`/`report` cover the model
//! lifecycle, and `scale` evaluates compound-scaling configurations.
//!
//! Every flag can also come from a JSON file via `--config` (flags win), and
//! each run writes its fully resolved configuration next to its primary
//! output as `<output>.config.json`. Exit codes: 0 success, 1
//! internal/environment error, 2 invalid input, 3 strict-mode constraint
//! failure. `IMBF_LOG=debug|info|warn` controls logging on standard error;
//! data only ever goes to files.

use std::error::Error as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use imbf_core::augment::{IntensivePolicy, StandardLevel};
use imbf_core::manifest::{stratified_split, Split, SplitRatios};
use imbf_core::metrics::compare_reports;
use imbf_core::nn::{compound_scale, CompoundScaling};
use imbf_core::rebalance::{build_plan, class_counts, coarse_counts, Strategy};
use imbf_core::rng::derive_stream_seed;
use imbf_core::train::InitSource;

use crate::dataset::{scan_directory, validate_manifest, Layout};
use crate::error::PipelineError;
use crate::io::checkpoint_file::{load_checkpoint, save_checkpoint};
use crate::io::manifest_csv::{read_manifest, write_manifest};
use crate::io::plan_json::{read_plan, read_targets, write_plan};
use crate::io::report_json::{confusion_to_csv, read_report, write_comparison, write_report};
use crate::materialize::materialize;
use crate::trainer::{epoch_log_to_jsonl, evaluate, run_training, TrainSettings};

#[derive(Parser, Debug)]
#[command(
    name = "imbf",
    version,
    about = "Class-imbalance-aware image classification pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scan an image tree and assign stratified train/val/test splits
    Split(SplitArgs),
    /// Build a rebalancing plan from a manifest's training counts
    Plan(PlanArgs),
    /// Materialize a plan: write augmented copies and an updated manifest
    Augment(AugmentArgs),
    /// Train a classifier from a manifest
    Train(TrainArgs),
    /// Evaluate a checkpoint on one split and write a report
    Evaluate(EvaluateArgs),
    /// Compare two reports
    Report(ReportArgs),
    /// Evaluate a compound-scaling configuration
    Scale(ScaleArgs),
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    init_logger();
    let result = match cli.command {
        Command::Split(args) => cmd_split(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Augment(args) => cmd_augment(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Report(args) => cmd_report(args),
        Command::Scale(args) => cmd_scale(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}

fn init_logger() {
    let env = env_logger::Env::new().filter_or("IMBF_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

fn load_file_config<T: DeserializeOwned + Default>(
    path: Option<&PathBuf>,
) -> Result<T, PipelineError> {
    match path {
        None => Ok(T::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
            serde_json::from_str(&text).map_err(|e| PipelineError::FileFormat {
                path: path.clone(),
                msg: e.to_string(),
            })
        }
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, PipelineError> {
    value.ok_or_else(|| PipelineError::invalid(flag, "missing (pass the flag or set it in --config)"))
}

/// Writes the fully resolved configuration beside the primary output.
fn write_config_echo<T: Serialize>(resolved: &T, out: &Path) -> Result<String, PipelineError> {
    let json = serde_json::to_string_pretty(resolved)
        .map_err(|e| PipelineError::invalid("config", e.to_string()))?;
    let echo_path = PathBuf::from(format!("{}.config.json", out.display()));
    fs::write(&echo_path, format!("{json}\n")).map_err(|e| PipelineError::io(&echo_path, e))?;
    Ok(json)
}

fn fingerprint_of(config_json: &str) -> String {
    format!("{:016x}", derive_stream_seed(0, config_json, 0))
}

fn parse_ratios(s: &str) -> Result<SplitRatios, PipelineError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(PipelineError::invalid(
            "--ratios",
            format!("expected three comma-separated fractions, got {s:?}"),
        ));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| PipelineError::invalid("--ratios", format!("bad fraction {part:?}")))?;
    }
    Ok(SplitRatios::new(values[0], values[1], values[2])?)
}

fn parse_init(s: &str) -> Result<InitSource, PipelineError> {
    if s == "fresh" {
        Ok(InitSource::Fresh)
    } else if let Some(path) = s.strip_prefix("from=") {
        Ok(InitSource::FromCheckpoint(path.to_string()))
    } else {
        Err(PipelineError::invalid(
            "--init",
            format!("expected `fresh` or `from=<checkpoint>`, got {s:?}"),
        ))
    }
}

fn parse_on_off(s: &str, flag: &str) -> Result<bool, PipelineError> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(PipelineError::invalid(
            flag,
            format!("expected `on` or `off`, got {other:?}"),
        )),
    }
}

// ---------------------------------------------------------------- split

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Dataset root directory
    #[arg(long)]
    root: Option<PathBuf>,
    /// Layout: `subclass` (root/<subclass>/...) or `class` (root/<coarse>/<subclass>/...)
    #[arg(long)]
    layout: Option<String>,
    /// Comma-separated train,val,test fractions (default 0.8,0.1,0.1)
    #[arg(long)]
    ratios: Option<String>,
    /// Seed for the stratified shuffle (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output manifest CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SplitFileConfig {
    root: Option<PathBuf>,
    layout: Option<String>,
    ratios: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SplitResolved {
    command: &'static str,
    root: String,
    layout: String,
    ratios: [f64; 3],
    seed: u64,
    out: String,
}

fn cmd_split(args: SplitArgs) -> Result<(), PipelineError> {
    let file: SplitFileConfig = load_file_config(args.config.as_ref())?;
    let root = required(args.root.or(file.root), "--root")?;
    let layout_token = args.layout.or(file.layout).unwrap_or_else(|| "subclass".into());
    let layout = Layout::from_token(&layout_token)
        .ok_or_else(|| PipelineError::invalid("--layout", format!("unknown layout {layout_token:?}")))?;
    let ratios_text = args
        .ratios
        .or(file.ratios)
        .unwrap_or_else(|| "0.8,0.1,0.1".into());
    let ratios = parse_ratios(&ratios_text)?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let out = required(args.out.or(file.out), "--out")?;

    let manifest = scan_directory(&root, layout)?;
    log::info!("scanned {} images under {}", manifest.entries.len(), root.display());
    let split = stratified_split(&manifest, &ratios, seed)?;

    let issues = validate_manifest(&split);
    if !issues.is_empty() {
        let report = issues
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("\n");
        return Err(PipelineError::ManifestInvalid { report });
    }

    write_manifest(&split, &out)?;
    let resolved = SplitResolved {
        command: "split",
        root: root.display().to_string(),
        layout: layout.token().to_string(),
        ratios: [ratios.train, ratios.val, ratios.test],
        seed,
        out: out.display().to_string(),
    };
    write_config_echo(&resolved, &out)?;
    log::info!("wrote {}", out.display());
    Ok(())
}

// ----------------------------------------------------------------- plan

#[derive(Args, Debug)]
pub struct PlanArgs {
    /// Input manifest CSV (split already assigned)
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// `double-below-mean` or `targets=<json file>` (default double-below-mean)
    #[arg(long)]
    strategy: Option<String>,
    /// Count classes `by-subclass` or `by-coarse` (default by-subclass)
    #[arg(long)]
    by: Option<String>,
    /// Seed recorded in the plan and used at materialization (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output plan JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PlanFileConfig {
    manifest: Option<PathBuf>,
    strategy: Option<String>,
    by: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PlanResolved {
    command: &'static str,
    manifest: String,
    strategy: String,
    by: String,
    seed: u64,
    out: String,
}

fn cmd_plan(args: PlanArgs) -> Result<(), PipelineError> {
    let file: PlanFileConfig = load_file_config(args.config.as_ref())?;
    let manifest_path = required(args.manifest.or(file.manifest), "--manifest")?;
    let strategy_text = args
        .strategy
        .or(file.strategy)
        .unwrap_or_else(|| "double-below-mean".into());
    let by = args.by.or(file.by).unwrap_or_else(|| "by-subclass".into());
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let out = required(args.out.or(file.out), "--out")?;

    let manifest = read_manifest(&manifest_path)?;
    let counts = match by.as_str() {
        "by-subclass" | "subclass" => class_counts(&manifest, Split::Train),
        "by-coarse" | "coarse" => coarse_counts(&manifest, Split::Train),
        other => {
            return Err(PipelineError::invalid(
                "--by",
                format!("expected `by-subclass` or `by-coarse`, got {other:?}"),
            ))
        }
    };

    let strategy = if strategy_text == "double-below-mean" {
        Strategy::DoubleBelowMean
    } else if let Some(path) = strategy_text.strip_prefix("targets=") {
        Strategy::ExplicitTargets(read_targets(Path::new(path))?)
    } else {
        return Err(PipelineError::invalid(
            "--strategy",
            format!("expected `double-below-mean` or `targets=<file>`, got {strategy_text:?}"),
        ));
    };

    let plan = build_plan(&counts, strategy, seed)?;
    log::info!(
        "plan: {} classes, total target {}",
        plan.classes.len(),
        plan.total_target()
    );
    write_plan(&plan, &out)?;
    let resolved = PlanResolved {
        command: "plan",
        manifest: manifest_path.display().to_string(),
        strategy: strategy_text,
        by,
        seed,
        out: out.display().to_string(),
    };
    write_config_echo(&resolved, &out)?;
    Ok(())
}

// -------------------------------------------------------------- augment

#[derive(Args, Debug)]
pub struct AugmentArgs {
    /// Input manifest CSV
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Plan JSON produced by `plan`
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Directory for the augmented images
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Output manifest CSV including the augmented entries
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; outputs are byte-identical for every value (default 1)
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct AugmentFileConfig {
    manifest: Option<PathBuf>,
    plan: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

#[derive(Serialize)]
struct AugmentResolved {
    command: &'static str,
    manifest: String,
    plan: String,
    out_dir: String,
    out: String,
    jobs: usize,
}

fn cmd_augment(args: AugmentArgs) -> Result<(), PipelineError> {
    let file: AugmentFileConfig = load_file_config(args.config.as_ref())?;
    let manifest_path = required(args.manifest.or(file.manifest), "--manifest")?;
    let plan_path = required(args.plan.or(file.plan), "--plan")?;
    let out_dir = required(args.out_dir.or(file.out_dir), "--out-dir")?;
    let out = required(args.out.or(file.out), "--out")?;
    let jobs = args.jobs.or(file.jobs).unwrap_or(1).max(1);

    let manifest = read_manifest(&manifest_path)?;
    let plan = read_plan(&plan_path)?;
    let result = materialize(&plan, &manifest, &IntensivePolicy::default(), &out_dir, jobs)?;
    let added = result.entries.len() - manifest.entries.len();
    log::info!("materialized {added} augmented copies under {}", out_dir.display());
    write_manifest(&result, &out)?;
    let resolved = AugmentResolved {
        command: "augment",
        manifest: manifest_path.display().to_string(),
        plan: plan_path.display().to_string(),
        out_dir: out_dir.display().to_string(),
        out: out.display().to_string(),
        jobs,
    };
    write_config_echo(&resolved, &out)?;
    Ok(())
}

// ---------------------------------------------------------------- train

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Task: `binary` or `multi`
    #[arg(long)]
    task: Option<String>,
    /// Input manifest CSV
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// `fresh` or `from=<checkpoint>` (default fresh)
    #[arg(long)]
    init: Option<String>,
    /// Standard augmentation level: l1, l2, or l3 (default l2)
    #[arg(long)]
    policy: Option<String>,
    /// Cost-sensitive class weights: `on` or `off` (default on)
    #[arg(long)]
    class_weights: Option<String>,
    /// Training epochs (default 20)
    #[arg(long)]
    epochs: Option<usize>,
    /// Batch size (default 32)
    #[arg(long)]
    batch_size: Option<usize>,
    /// Adam learning rate (default 0.001)
    #[arg(long)]
    lr: Option<f64>,
    /// Dropout rate before the dense layer (default 0.2)
    #[arg(long)]
    dropout: Option<f64>,
    /// Input resolution for fresh models (default 64)
    #[arg(long)]
    resolution: Option<usize>,
    /// Run seed; all randomness derives from it (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output checkpoint path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Epoch log path (default `<out>.log.jsonl`)
    #[arg(long)]
    log: Option<PathBuf>,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TrainFileConfig {
    task: Option<String>,
    manifest: Option<PathBuf>,
    init: Option<String>,
    policy: Option<String>,
    class_weights: Option<String>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    lr: Option<f64>,
    dropout: Option<f64>,
    resolution: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    log: Option<PathBuf>,
}

#[derive(Serialize)]
struct TrainResolved {
    command: &'static str,
    task: String,
    manifest: String,
    init: String,
    policy: String,
    class_weights: String,
    epochs: usize,
    batch_size: usize,
    lr: f64,
    dropout: f64,
    resolution: usize,
    seed: u64,
    out: String,
    log: String,
}

fn cmd_train(args: TrainArgs) -> Result<(), PipelineError> {
    let file: TrainFileConfig = load_file_config(args.config.as_ref())?;
    let task_token = required(args.task.or(file.task), "--task")?;
    let binary = match task_token.as_str() {
        "binary" => true,
        "multi" => false,
        other => {
            return Err(PipelineError::invalid(
                "--task",
                format!("expected `binary` or `multi`, got {other:?}"),
            ))
        }
    };
    let manifest_path = required(args.manifest.or(file.manifest), "--manifest")?;
    let init_token = args.init.or(file.init).unwrap_or_else(|| "fresh".into());
    let init = parse_init(&init_token)?;
    let policy_token = args.policy.or(file.policy).unwrap_or_else(|| "l2".into());
    let policy = StandardLevel::from_token(&policy_token).ok_or_else(|| {
        PipelineError::invalid("--policy", format!("expected l1, l2, or l3, got {policy_token:?}"))
    })?;
    let weights_token = args
        .class_weights
        .or(file.class_weights)
        .unwrap_or_else(|| "on".into());
    let use_class_weights = parse_on_off(&weights_token, "--class-weights")?;
    let epochs = args.epochs.or(file.epochs).unwrap_or(20);
    let batch_size = args.batch_size.or(file.batch_size).unwrap_or(32);
    let lr = args.lr.or(file.lr).unwrap_or(1e-3);
    let dropout = args.dropout.or(file.dropout).unwrap_or(0.2);
    let resolution = args.resolution.or(file.resolution).unwrap_or(64);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let out = required(args.out.or(file.out), "--out")?;
    let log_path = args
        .log
        .or(file.log)
        .unwrap_or_else(|| PathBuf::from(format!("{}.log.jsonl", out.display())));

    let manifest = read_manifest(&manifest_path)?;
    let settings = TrainSettings {
        binary,
        epochs,
        batch_size,
        learning_rate: lr,
        dropout,
        resolution,
        seed,
        policy,
        use_class_weights,
        init,
    };
    let (checkpoint, log) = run_training(&manifest, &settings)?;
    save_checkpoint(&checkpoint, &out)?;
    fs::write(&log_path, epoch_log_to_jsonl(&log))
        .map_err(|e| PipelineError::io(&log_path, e))?;

    let resolved = TrainResolved {
        command: "train",
        task: task_token,
        manifest: manifest_path.display().to_string(),
        init: init_token,
        policy: policy_token,
        class_weights: weights_token,
        epochs,
        batch_size,
        lr,
        dropout,
        resolution,
        seed,
        out: out.display().to_string(),
        log: log_path.display().to_string(),
    };
    write_config_echo(&resolved, &out)?;
    log::info!(
        "trained {} epochs, final val accuracy {:.4}",
        log.len(),
        checkpoint.provenance.final_val_accuracy
    );
    Ok(())
}

// ------------------------------------------------------------- evaluate

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Checkpoint to evaluate
    #[arg(long)]
    ckpt: Option<PathBuf>,
    /// Manifest CSV with split assignments
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Split to evaluate: train, val, or test (default test)
    #[arg(long)]
    split: Option<String>,
    /// Output report JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also export the confusion matrix as CSV
    #[arg(long, value_name = "PATH")]
    confusion_csv: Option<PathBuf>,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct EvaluateFileConfig {
    ckpt: Option<PathBuf>,
    manifest: Option<PathBuf>,
    split: Option<String>,
    out: Option<PathBuf>,
    confusion_csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvaluateResolved {
    command: &'static str,
    ckpt: String,
    manifest: String,
    split: String,
    out: String,
    confusion_csv: Option<String>,
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), PipelineError> {
    let file: EvaluateFileConfig = load_file_config(args.config.as_ref())?;
    let ckpt_path = required(args.ckpt.or(file.ckpt), "--ckpt")?;
    let manifest_path = required(args.manifest.or(file.manifest), "--manifest")?;
    let split_token = args.split.or(file.split).unwrap_or_else(|| "test".into());
    let split = Split::from_token(&split_token).ok_or_else(|| {
        PipelineError::invalid("--split", format!("unknown split {split_token:?}"))
    })?;
    let out = required(args.out.or(file.out), "--out")?;
    let confusion_csv = args.confusion_csv.or(file.confusion_csv);

    let resolved = EvaluateResolved {
        command: "evaluate",
        ckpt: ckpt_path.display().to_string(),
        manifest: manifest_path.display().to_string(),
        split: split_token,
        out: out.display().to_string(),
        confusion_csv: confusion_csv.as_ref().map(|p| p.display().to_string()),
    };
    let resolved_json = serde_json::to_string_pretty(&resolved)
        .map_err(|e| PipelineError::invalid("config", e.to_string()))?;
    let fingerprint = fingerprint_of(&resolved_json);

    let ckpt = load_checkpoint(&ckpt_path)?;
    let manifest = read_manifest(&manifest_path)?;
    let report = evaluate(&ckpt, &manifest, split, &fingerprint)?;
    write_report(&report, &out)?;
    if let Some(csv_path) = &confusion_csv {
        fs::write(csv_path, confusion_to_csv(&report.confusion))
            .map_err(|e| PipelineError::io(csv_path, e))?;
    }
    write_config_echo(&resolved, &out)?;
    log::info!("accuracy {:.4} on {} samples", report.accuracy, report.confusion.total());
    Ok(())
}

// --------------------------------------------------------------- report

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Two report files to compare: deltas are second minus first
    #[arg(long, num_args = 2, value_names = ["BASELINE", "CANDIDATE"])]
    compare: Option<Vec<PathBuf>>,
    /// Output comparison JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ReportFileConfig {
    compare: Option<Vec<PathBuf>>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ReportResolved {
    command: &'static str,
    compare: [String; 2],
    out: String,
}

fn cmd_report(args: ReportArgs) -> Result<(), PipelineError> {
    let file: ReportFileConfig = load_file_config(args.config.as_ref())?;
    let compare = required(args.compare.or(file.compare), "--compare")?;
    if compare.len() != 2 {
        return Err(PipelineError::invalid(
            "--compare",
            format!("expected exactly two report paths, got {}", compare.len()),
        ));
    }
    let out = required(args.out.or(file.out), "--out")?;

    let baseline = read_report(&compare[0])?;
    let candidate = read_report(&compare[1])?;
    let comparison = compare_reports(&baseline, &candidate)?;
    write_comparison(&comparison, &out)?;
    let resolved = ReportResolved {
        command: "report",
        compare: [
            compare[0].display().to_string(),
            compare[1].display().to_string(),
        ],
        out: out.display().to_string(),
    };
    write_config_echo(&resolved, &out)?;
    Ok(())
}

// ---------------------------------------------------------------- scale

#[derive(Args, Debug)]
pub struct ScaleArgs {
    /// Depth base factor
    #[arg(long)]
    alpha: Option<f64>,
    /// Width base factor
    #[arg(long)]
    beta: Option<f64>,
    /// Resolution base factor
    #[arg(long)]
    gamma: Option<f64>,
    /// Compound coefficient (default 1)
    #[arg(long)]
    phi: Option<f64>,
    /// Exit with code 3 when the constraint is violated
    #[arg(long)]
    strict: bool,
    /// JSON file mirroring these flags; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ScaleFileConfig {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    phi: Option<f64>,
    strict: Option<bool>,
}

fn cmd_scale(args: ScaleArgs) -> Result<(), PipelineError> {
    let file: ScaleFileConfig = load_file_config(args.config.as_ref())?;
    let alpha = required(args.alpha.or(file.alpha), "--alpha")?;
    let beta = required(args.beta.or(file.beta), "--beta")?;
    let gamma = required(args.gamma.or(file.gamma), "--gamma")?;
    let phi = args.phi.or(file.phi).unwrap_or(1.0);
    let strict = args.strict || file.strict.unwrap_or(false);

    let result = compound_scale(&CompoundScaling {
        alpha,
        beta,
        gamma,
        phi,
    })?;
    println!(
        "depth x{:.6}  width x{:.6}  resolution x{:.6}",
        result.depth, result.width, result.resolution
    );
    println!(
        "constraint alpha*beta^2*gamma^2 = {:.6} -> {}",
        result.constraint_value,
        if result.constraint_ok { "OK" } else { "VIOLATED" }
    );
    if strict && !result.constraint_ok {
        return Err(PipelineError::ConstraintViolated {
            value: result.constraint_value,
        });
    }
    Ok(())
}
