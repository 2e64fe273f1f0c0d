use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use climact::experiments::{
    ablation_csv, engagement_csv, engagement_demographic_correlations, report, run_ablation, run_robustness,
    AblationConfig, AblationRow,
};
use climact::inference::{derive_seed, fit, FitConfig, FitResult, GuideState};
use climact::ingestion::{
    load_catalog, load_dataset, save_catalog, save_users, write_atomic, DatasetPaths, LoadOptions, LONG_END_WEEKS,
    SHORT_WEEKS, YEAR_WEEKS,
};
use climact::model::{
    extend_long_participation, forward_sample, parse_groups, random_catalog, Dataset, Hyperparameters, LatentState,
    MediaGenerator, ModelParameters, Structure, AXES, DEFAULT_VAR_S_SWEEP,
};
use climact::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "climact", version, about = "Climate-activism activation network: simulate, fit, ablate, report")]
struct Cli {
    /// key = value file supplying defaults for any flag; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a synthetic dataset from the network
    Simulate(SimulateArgs),
    /// Fit the network once per var(S) value
    Fit(FitArgs),
    /// Refit with each variable group removed in turn
    Ablate(AblateArgs),
    /// Compare fits with and without the gap before the short-term window
    Robustness(RobustnessArgs),
    /// Write coefficient tables and figures from fit outputs
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
struct SimulateArgs {
    /// Parameter file (JSON, or TOML with a .toml extension); built-in example set if omitted
    #[arg(long)]
    params: Option<PathBuf>,
    /// Catalog CSV; a random catalog of --k subreddits if omitted
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n_users: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    var_s: Option<f64>,
    /// Users share media features within this many areas (0 = per-user media)
    #[arg(long)]
    media_areas: Option<usize>,
    /// Correlation of short- with long-term media features; 1 makes media constant in time
    #[arg(long)]
    media_corr: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
struct FitOptions {
    /// Comma-separated var(S) values
    #[arg(long)]
    var_s: Option<String>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    predictive_samples: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Fraction of users per gradient step
    #[arg(long)]
    minibatch: Option<f64>,
    /// Relative ELBO improvement below which a restart stops; 0 disables early stopping
    #[arg(long)]
    early_stop_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Keep engagement and media columns as given instead of z-scoring them
    #[arg(long)]
    no_standardize: bool,
}

#[derive(Args, Debug, Default)]
struct FitArgs {
    /// Directory with catalog.csv, users.csv and optionally media.csv, location_map.csv
    #[arg(long)]
    data: Option<PathBuf>,
    /// Users file overriding <data>/users.csv
    #[arg(long)]
    users: Option<PathBuf>,
    /// Comma-separated groups to remove from the network
    #[arg(long)]
    remove: Option<String>,
    /// Long-term window runs up to the short-term window
    #[arg(long)]
    no_gap: bool,
    #[command(flatten)]
    fit: FitOptions,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct AblateArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    users: Option<PathBuf>,
    /// Comma-separated subset of E,I,M,D
    #[arg(long)]
    groups: Option<String>,
    /// Also fit the variant with all listed groups removed together
    #[arg(long)]
    joint: bool,
    #[arg(long)]
    no_gap: bool,
    #[command(flatten)]
    fit: FitOptions,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct RobustnessArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    /// Users file for the no-gap regime; defaults to <data>/users_nogap.csv when present
    #[arg(long)]
    nogap_users: Option<PathBuf>,
    #[command(flatten)]
    fit: FitOptions,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct ReportArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Contents of a `--config` file. Keys are the flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ConfigFile {
    params: Option<PathBuf>,
    catalog: Option<PathBuf>,
    k: Option<usize>,
    n_users: Option<usize>,
    seed: Option<u64>,
    var_s: Option<VarS>,
    media_areas: Option<usize>,
    media_corr: Option<f64>,
    out: Option<PathBuf>,
    data: Option<PathBuf>,
    users: Option<PathBuf>,
    nogap_users: Option<PathBuf>,
    remove: Option<String>,
    groups: Option<String>,
    joint: Option<bool>,
    no_gap: Option<bool>,
    no_standardize: Option<bool>,
    restarts: Option<usize>,
    steps: Option<usize>,
    lr: Option<f64>,
    predictive_samples: Option<usize>,
    mc_samples: Option<usize>,
    minibatch: Option<f64>,
    early_stop_tol: Option<f64>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum VarS {
    One(f64),
    List(Vec<f64>),
    Text(String),
}

impl VarS {
    fn to_list(&self) -> Result<Vec<f64>> {
        match self {
            VarS::One(v) => Ok(vec![*v]),
            VarS::List(v) => Ok(v.clone()),
            VarS::Text(s) => parse_list(s),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| invalid("var-s", format!("{t:?} is not a number"))))
        .collect()
}

fn invalid(what: &str, reason: impl Into<String>) -> Error {
    Error::InvalidValue {
        what: what.into(),
        reason: reason.into(),
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| invalid(flag, format!("--{flag} is required")))
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| Error::Schema {
        file: path.into(),
        line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
        reason: e.message().to_string(),
    })
}

/// Resolved settings, recorded in the manifest.
#[derive(Debug, Serialize)]
struct Resolved {
    fit: FitConfig,
    var_s_values: Vec<f64>,
    standardize: bool,
}

fn resolve_fit(opts: &FitOptions, cfg: &ConfigFile) -> Result<Resolved> {
    let defaults = FitConfig::default();
    let var_s_values = match (&opts.var_s, &cfg.var_s) {
        (Some(s), _) => parse_list(s)?,
        (None, Some(v)) => v.to_list()?,
        (None, None) => DEFAULT_VAR_S_SWEEP.to_vec(),
    };
    if var_s_values.is_empty() {
        return Err(invalid("var-s", "no values given"));
    }
    for v in &var_s_values {
        Hyperparameters::with_var_s(*v).validate()?;
    }
    let tol = opts.early_stop_tol.or(cfg.early_stop_tol);
    let fit = FitConfig {
        learning_rate: opts.lr.or(cfg.lr).unwrap_or(defaults.learning_rate),
        n_restarts: opts.restarts.or(cfg.restarts).unwrap_or(defaults.n_restarts),
        n_steps: opts.steps.or(cfg.steps).unwrap_or(defaults.n_steps),
        mc_samples_per_step: opts.mc_samples.or(cfg.mc_samples).unwrap_or(defaults.mc_samples_per_step),
        n_predictive_samples: opts
            .predictive_samples
            .or(cfg.predictive_samples)
            .unwrap_or(defaults.n_predictive_samples),
        seed: opts.seed.or(cfg.seed).unwrap_or(defaults.seed),
        var_s: var_s_values[0],
        early_stop_rel_tol: match tol {
            Some(t) if t <= 0.0 => None,
            Some(t) => Some(t),
            None => defaults.early_stop_rel_tol,
        },
        minibatch_fraction: opts.minibatch.or(cfg.minibatch),
        ..defaults
    };
    fit.validate()?;
    Ok(Resolved {
        fit,
        var_s_values,
        standardize: !(opts.no_standardize || cfg.no_standardize.unwrap_or(false)),
    })
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    Ok(serde_json::from_slice(&bytes)?)
}

fn write_manifest(out: &Path, command: &str, settings: Value, inputs: &[&Path]) -> Result<()> {
    let mut digests = BTreeMap::new();
    for p in inputs {
        digests.insert(p.display().to_string(), sha256_file(p)?);
    }
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "settings": settings,
        "inputs": digests,
    });
    write_json(&out.join("manifest.json"), &manifest)
}

fn var_s_dir(v: f64) -> String {
    format!("var_s_{v}")
}

fn latents_csv(fit: &FitResult) -> Vec<u8> {
    let mut s = String::from("user_id,A,sympathy_mean,sympathy_sd");
    for a in AXES {
        let _ = write!(s, ",D_{a}");
    }
    s.push('\n');
    for l in &fit.latents {
        let _ = write!(s, "{},{},{},{}", l.user_id, u8::from(l.activated), l.sympathy_mean, l.sympathy_sd);
        match l.demographics_mean {
            Some(d) => d.iter().for_each(|v| {
                let _ = write!(s, ",{v}");
            }),
            None => s.push_str(",,,,"),
        }
        s.push('\n');
    }
    s.into_bytes()
}

fn save_fit(dir: &Path, fit: &FitResult) -> Result<()> {
    write_json(&dir.join("fit_result.json"), fit)?;
    write_atomic(&dir.join("latents.csv"), &latents_csv(fit))?;
    write_json::<GuideState>(&dir.join("guide.json"), &fit.best_guide)
}

struct Loaded {
    dataset: Dataset,
    inputs: Vec<PathBuf>,
}

fn load(paths: &DatasetPaths, options: &LoadOptions) -> Result<Loaded> {
    let loaded = load_dataset(paths, options)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let mut inputs = vec![paths.catalog.clone(), paths.users.clone()];
    inputs.extend(paths.media.clone());
    inputs.extend(paths.location_map.clone());
    Ok(Loaded {
        dataset: loaded.dataset,
        inputs,
    })
}

fn data_paths(data: Option<PathBuf>, users: Option<PathBuf>) -> Result<DatasetPaths> {
    let dir = required(data, "data")?;
    let paths = DatasetPaths::in_dir(&dir);
    Ok(match users {
        Some(u) => paths.with_users(u),
        None => paths,
    })
}

fn cmd_simulate(a: SimulateArgs, cfg: ConfigFile) -> Result<()> {
    let out = required(a.out.or(cfg.out), "out")?;
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let n_users = a.n_users.or(cfg.n_users).unwrap_or(2000);
    let var_s = a.var_s.or(cfg.var_s.as_ref().map(VarS::to_list).transpose()?.and_then(|v| v.first().copied()));
    let hyper = Hyperparameters::with_var_s(var_s.unwrap_or(1.0));
    hyper.validate()?;
    let media = MediaGenerator {
        n_areas: a.media_areas.or(cfg.media_areas).unwrap_or(0),
        long_short_corr: a.media_corr.or(cfg.media_corr).unwrap_or(MediaGenerator::default().long_short_corr),
        ..MediaGenerator::default()
    };
    let mut inputs = Vec::new();
    let params = match a.params.or(cfg.params) {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            let parsed: ModelParameters = if p.extension().is_some_and(|e| e == "toml") {
                toml::from_str(&text).map_err(|e| invalid("params", e.to_string()))?
            } else {
                serde_json::from_str(&text)?
            };
            inputs.push(p);
            parsed
        }
        None => ModelParameters::example(),
    };
    params.validate()?;
    let catalog = match a.catalog.or(cfg.catalog) {
        Some(p) => {
            let c = load_catalog(&p)?;
            inputs.push(p);
            c
        }
        None => random_catalog(a.k.or(cfg.k).unwrap_or(50), derive_seed(seed, 0, 0))?,
    };
    let (users, latents) = forward_sample(&params, &catalog, &hyper, n_users, &media, derive_seed(seed, 0, 1))?;
    let gap_weeks = (YEAR_WEEKS - LONG_END_WEEKS) as u32;
    let extra_weeks = (LONG_END_WEEKS - SHORT_WEEKS) as u32;
    let nogap = extend_long_participation(
        &users,
        &latents,
        &params,
        &catalog,
        gap_weeks,
        extra_weeks,
        derive_seed(seed, 0, 2),
    )?;

    save_catalog(&catalog, &out.join("catalog.csv"))?;
    save_users(&users, &out.join("users.csv"))?;
    save_users(&nogap, &out.join("users_nogap.csv"))?;
    write_json(
        &out.join("truth.json"),
        &json!({ "params": params, "var_s": hyper.var_s, "n_users": n_users, "seed": seed, "media": media }),
    )?;
    write_atomic(&out.join("truth_latents.csv"), &truth_latents_csv(&users, &latents))?;
    let settings = json!({ "n_users": n_users, "seed": seed, "var_s": hyper.var_s, "media": media, "k": catalog.len() });
    write_manifest(&out, "simulate", settings, &inputs.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
    println!("wrote {n_users} users over {} subreddits to {}", catalog.len(), out.display());
    Ok(())
}

fn truth_latents_csv(users: &[climact::model::UserObservation], latents: &LatentState) -> Vec<u8> {
    let mut s = String::from("user_id,S");
    for a in AXES {
        let _ = write!(s, ",D_{a}");
    }
    s.push('\n');
    for ((u, sym), d) in users.iter().zip(&latents.sympathy).zip(&latents.demographics) {
        let _ = writeln!(s, "{},{},{},{},{},{}", u.id, sym, d[0], d[1], d[2], d[3]);
    }
    s.into_bytes()
}

fn cmd_fit(a: FitArgs, cfg: ConfigFile) -> Result<()> {
    let out = required(a.out.or(cfg.out.clone()), "out")?;
    let resolved = resolve_fit(&a.fit, &cfg)?;
    let structure = match a.remove.or(cfg.remove.clone()) {
        Some(list) => Structure::without(parse_groups(&list)?),
        None => Structure::full(),
    };
    let gap_enabled = !(a.no_gap || cfg.no_gap.unwrap_or(false));
    let paths = data_paths(a.data.or(cfg.data.clone()), a.users.or(cfg.users.clone()))?;
    let options = LoadOptions {
        gap_enabled,
        standardize: resolved.standardize,
    };
    let loaded = load(&paths, &options)?;
    let hyper = Hyperparameters::default();
    let fits: Vec<FitResult> = resolved
        .var_s_values
        .par_iter()
        .map(|&v| {
            let c = FitConfig {
                var_s: v,
                ..resolved.fit.clone()
            };
            fit(&loaded.dataset, &hyper, &structure, &c)
        })
        .collect::<Result<_>>()?;
    for f in &fits {
        save_fit(&out.join(var_s_dir(f.var_s)), f)?;
        println!(
            "var_S={}: accuracy {:.4} ± {:.4} (restart {})",
            f.var_s,
            f.accuracy(),
            f.best().accuracy_sd,
            f.best_restart
        );
    }
    let reference = fits.iter().find(|f| f.var_s == 1.0).unwrap_or(&fits[0]);
    let corr = engagement_demographic_correlations(&loaded.dataset, Some(reference));
    write_atomic(&out.join("engagement_demographics.csv"), &engagement_csv(&corr)?)?;
    let settings = json!({ "resolved": resolved, "structure": structure, "gap_enabled": gap_enabled });
    write_manifest(&out, "fit", settings, &loaded.inputs.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

fn cmd_ablate(a: AblateArgs, cfg: ConfigFile) -> Result<()> {
    let out = required(a.out.or(cfg.out.clone()), "out")?;
    let resolved = resolve_fit(&a.fit, &cfg)?;
    let groups = parse_groups(a.groups.or(cfg.groups.clone()).as_deref().unwrap_or("E,I,M,D"))?;
    let paths = data_paths(a.data.or(cfg.data.clone()), a.users.or(cfg.users.clone()))?;
    let loaded = load(
        &paths,
        &LoadOptions {
            gap_enabled: !(a.no_gap || cfg.no_gap.unwrap_or(false)),
            standardize: resolved.standardize,
        },
    )?;
    let config = AblationConfig {
        groups,
        var_s_values: resolved.var_s_values.clone(),
        fit: resolved.fit.clone(),
        include_joint_removal: a.joint || cfg.joint.unwrap_or(false),
    };
    let outcome = run_ablation(&loaded.dataset, &Hyperparameters::default(), &config)?;
    for f in &outcome.fits {
        save_fit(&out.join(f.structure.label()).join(var_s_dir(f.var_s)), f)?;
    }
    write_atomic(&out.join("ablation.csv"), &ablation_csv(&outcome.rows)?)?;
    write_json(&out.join("ablation.json"), &outcome.rows)?;
    for r in &outcome.rows {
        println!("{:>8} var_S={:<6} accuracy {:.4} ± {:.4}", r.variant, r.var_s, r.accuracy_mean, r.accuracy_sd);
    }
    let settings = json!({ "resolved": resolved, "ablation": config });
    write_manifest(&out, "ablate", settings, &loaded.inputs.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

fn cmd_robustness(a: RobustnessArgs, cfg: ConfigFile) -> Result<()> {
    let out = required(a.out.or(cfg.out.clone()), "out")?;
    let mut resolved = resolve_fit(&a.fit, &cfg)?;
    if a.fit.var_s.is_none() && cfg.var_s.is_none() {
        resolved.var_s_values = vec![1.0];
    }
    if resolved.var_s_values.len() != 1 {
        return Err(invalid("var-s", "robustness takes a single var(S) value"));
    }
    resolved.fit.var_s = resolved.var_s_values[0];
    let dir = required(a.data.or(cfg.data.clone()), "data")?;
    let on_paths = DatasetPaths::in_dir(&dir);
    let nogap = a.nogap_users.or(cfg.nogap_users.clone()).or_else(|| {
        let p = dir.join("users_nogap.csv");
        p.exists().then_some(p)
    });
    let off_paths = match nogap {
        Some(p) => on_paths.clone().with_users(p),
        None => on_paths.clone(),
    };
    let on = load(
        &on_paths,
        &LoadOptions {
            gap_enabled: true,
            standardize: resolved.standardize,
        },
    )?;
    let off = load(
        &off_paths,
        &LoadOptions {
            gap_enabled: false,
            standardize: resolved.standardize,
        },
    )?;
    let outcome = run_robustness(
        &on.dataset,
        &off.dataset,
        &Hyperparameters::default(),
        &Structure::full(),
        &resolved.fit,
    )?;
    save_fit(&out.join("gap_on"), &outcome.gap_on)?;
    save_fit(&out.join("gap_off"), &outcome.gap_off)?;
    let mut csv = String::from("name,gap_on,gap_off\n");
    for p in &outcome.pairs {
        let _ = writeln!(csv, "{},{},{}", p.name, p.gap_on, p.gap_off);
    }
    write_atomic(&out.join("robustness.csv"), csv.as_bytes())?;
    write_json(
        &out.join("robustness.json"),
        &json!({ "correlation": outcome.correlation, "n_parameters": outcome.pairs.len(), "var_s": resolved.fit.var_s }),
    )?;
    println!(
        "gap-on vs gap-off coefficient correlation {:.4} over {} parameters",
        outcome.correlation,
        outcome.pairs.len()
    );
    let mut inputs = on.inputs.clone();
    inputs.extend(off.inputs.into_iter().filter(|p| !on.inputs.contains(p)));
    write_manifest(
        &out,
        "robustness",
        json!({ "resolved": resolved }),
        &inputs.iter().map(PathBuf::as_path).collect::<Vec<_>>(),
    )
}

fn find_files(dir: &Path, name: &str, found: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.into(),
        source: e,
    })?;
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for p in paths {
        if p.is_dir() {
            find_files(&p, name, found)?;
        } else if p.file_name().is_some_and(|f| f == name) {
            found.push(p);
        }
    }
    Ok(())
}

fn cmd_report(a: ReportArgs, cfg: ConfigFile) -> Result<()> {
    let input = required(a.input.or(cfg.input), "in")?;
    let out = required(a.out.or(cfg.out), "out")?;
    let mut fit_files = Vec::new();
    find_files(&input, "fit_result.json", &mut fit_files)?;
    if fit_files.is_empty() {
        return Err(invalid("in", format!("no fit_result.json under {}", input.display())));
    }
    let fits: Vec<FitResult> = fit_files.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    // keep the full-network fits when an ablation directory is reported
    let full: Vec<FitResult> = fits.iter().filter(|f| f.structure.is_full()).cloned().collect();
    let shown = if full.is_empty() { fits } else { full };
    let ablation_path = input.join("ablation.json");
    let ablation: Option<Vec<AblationRow>> = ablation_path.exists().then(|| read_json(&ablation_path)).transpose()?;
    let written = report(&shown, ablation.as_deref(), &out)?;
    for p in &written {
        println!("wrote {}", p.display());
    }
    let mut inputs = fit_files.clone();
    if ablation.is_some() {
        inputs.push(ablation_path);
    }
    write_manifest(
        &out,
        "report",
        json!({ "in": input.display().to_string() }),
        &inputs.iter().map(PathBuf::as_path).collect::<Vec<_>>(),
    )
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a, cfg),
        Command::Fit(a) => cmd_fit(a, cfg),
        Command::Ablate(a) => cmd_ablate(a, cfg),
        Command::Robustness(a) => cmd_robustness(a, cfg),
        Command::Report(a) => cmd_report(a, cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
