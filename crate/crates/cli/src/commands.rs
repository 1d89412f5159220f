use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use cohesion_core::analysis::{analyze, AnalysisConfig, AnalysisError};
use cohesion_core::bundle::{default_honey_pots, BundleError, HoneyPot, StudyBundle, DEFAULT_INSTRUCTIONS};
use cohesion_core::model::{
    load_timeline, read_expert_csv, read_ratings_csv, read_units_csv, write_expert_csv, write_ratings_csv, CodingUnit,
    ExpertScore, InteractionTimeline, ModelError, Questionnaire,
};
use cohesion_core::simulate::{simulate_ratings, SimulationConfig};
use cohesion_core::stats::StatsError;
use cohesion_core::unitize::{
    group_by_technique, unit_summary, ActConfig, EstConfig, IntervalConfig, TailPolicy, UnitizeError, Unitizer,
};
use cohesion_core::Seconds;
use cohesion_service::{read_events, DiscardScope, ServiceConfig, ServiceError, Study, StudyOptions};

use crate::config::{ConfigError, FileConfig};
use crate::{
    AnalyzeArgs, BundleArgs, Cli, Command, ExportArgs, ServeArgs, SimulateArgs, TailArg, TechniqueArg, UnitizeArgs,
};

pub const DEFAULT_SEED: u64 = 0;

/// A flag combination that cannot be acted on.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for usage and input-validation failures, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        let validation = if cause.is::<UsageError>() || cause.is::<ConfigError>() || cause.is::<StatsError>() {
            Some(true)
        } else if let Some(e) = cause.downcast_ref::<ModelError>() {
            Some(e.is_validation())
        } else if let Some(e) = cause.downcast_ref::<UnitizeError>() {
            Some(match e {
                UnitizeError::Timeline(m) => m.is_validation(),
                _ => true,
            })
        } else if let Some(e) = cause.downcast_ref::<BundleError>() {
            Some(e.is_validation())
        } else if let Some(e) = cause.downcast_ref::<AnalysisError>() {
            Some(e.is_validation())
        } else {
            cause.downcast_ref::<ServiceError>().map(ServiceError::is_validation)
        };
        if let Some(v) = validation {
            return if v { 2 } else { 1 };
        }
    }
    1
}

struct Ctx {
    file: FileConfig,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.seed.or(self.file.seed).unwrap_or(DEFAULT_SEED)
    }

    fn out_dir(&self) -> Option<&Path> {
        self.out_dir.as_deref().or(self.file.out_dir.as_deref())
    }

    /// `explicit`, else `<out-dir>/<name>`, else `<name>` in the working directory.
    fn output(&self, explicit: Option<PathBuf>, name: &str) -> PathBuf {
        explicit.unwrap_or_else(|| self.out_dir().map_or_else(|| PathBuf::from(name), |d| d.join(name)))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        file,
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    match cli.command {
        Command::Unitize(a) => unitize(&ctx, a),
        Command::Bundle(a) => bundle(&ctx, a),
        Command::Serve(a) => serve(&ctx, a),
        Command::SimulateRaters(a) => simulate(&ctx, a),
        Command::Export(a) => export(&ctx, a),
        Command::Analyze(a) => analyze_cmd(&ctx, a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(bytes)?;
    w.flush()?;
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn seconds(flag: &str, v: f64) -> Result<Seconds> {
    Seconds::from_secs_f64(v)
        .filter(|s| s.is_positive())
        .ok_or_else(|| usage(format!("--{flag} must be a positive number of seconds, got {v}")))
}

/// Expands directories to their `*.json` files, sorted by name.
fn timeline_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            if found.is_empty() {
                bail!(usage(format!("{} contains no .json timelines", p.display())));
            }
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load_timelines(inputs: &[PathBuf]) -> Result<Vec<InteractionTimeline>> {
    let mut tls: Vec<InteractionTimeline> = Vec::new();
    for p in timeline_paths(inputs)? {
        let tl = load_timeline(&p)?;
        if tls.iter().any(|t| t.id == tl.id) {
            bail!(usage(format!("duplicate interaction id {} ({})", tl.id, p.display())));
        }
        tls.push(tl);
    }
    Ok(tls)
}

fn load_units(paths: &[PathBuf]) -> Result<Vec<CodingUnit>> {
    let mut units = Vec::new();
    for p in paths {
        units.extend(read_units_csv(open(p)?).map_err(|e| anyhow::Error::new(e).context(p.display().to_string()))?);
    }
    Ok(units)
}

fn load_questionnaire(path: Option<&Path>) -> Result<Questionnaire> {
    Ok(match path {
        Some(p) => Questionnaire::load(p)?,
        None => Questionnaire::default(),
    })
}

fn load_expert(path: &Path) -> Result<Vec<ExpertScore>> {
    read_expert_csv(open(path)?).map_err(|e| anyhow::Error::new(e).context(path.display().to_string()))
}

fn unitizer(ctx: &Ctx, a: &UnitizeArgs) -> Result<Unitizer> {
    let cfg = &ctx.file.unitize;
    let aut_only = a.window.is_some() || a.tail.is_some();
    Ok(match a.technique {
        TechniqueArg::Aut => {
            let window = a
                .window
                .or(cfg.window)
                .ok_or_else(|| usage("--technique aut requires --window"))?;
            let tail = match a.tail {
                Some(TailArg::Drop) => TailPolicy::Drop,
                Some(TailArg::Keep) => TailPolicy::Keep,
                Some(TailArg::Merge) => TailPolicy::MergeIntoLast,
                None => cfg.tail.unwrap_or_default(),
            };
            Unitizer::Interval(IntervalConfig::new(seconds("window", window)?, tail))
        }
        _ if aut_only => bail!(usage("--window and --tail apply only to --technique aut")),
        TechniqueArg::Act => {
            let mut c = ActConfig::default();
            if let Some(m) = a.max_turn.or(cfg.max_turn) {
                c.max_turn_duration = seconds("max-turn", m)?;
            }
            Unitizer::Act(c)
        }
        TechniqueArg::Est => {
            let mut c = EstConfig::default();
            if let Some(t) = cfg.est_threshold {
                c.threshold = t;
            }
            c.validate()?;
            Unitizer::Est(c)
        }
    })
}

fn unitize(ctx: &Ctx, a: UnitizeArgs) -> Result<()> {
    let u = unitizer(ctx, &a)?;
    let mut units = Vec::new();
    for tl in load_timelines(&a.inputs)? {
        units.extend(u.apply(&tl)?);
    }
    let out = a.out.clone().or_else(|| ctx.out_dir().map(|d| d.join("units.csv")));
    match &out {
        Some(p) => {
            let mut w = create(p)?;
            cohesion_core::model::write_units_csv(&mut w, &units)?;
            w.flush()?;
        }
        None => cohesion_core::model::write_units_csv(std::io::stdout().lock(), &units)?,
    }
    for s in unit_summary(&group_by_technique(&units))? {
        let s = s.rounded(3);
        eprintln!(
            "{}: {} units, mean {:.3} s, sd {:.3} s",
            s.technique, s.count, s.mean_duration, s.duration_sd
        );
    }
    if let Some(p) = out {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn bundle(ctx: &Ctx, a: BundleArgs) -> Result<()> {
    let honey_pots: Vec<HoneyPot> = match &a.honey_pots {
        Some(p) => serde_json::from_reader(open(p)?).map_err(|source| ModelError::Json {
            context: p.display().to_string(),
            source,
        })?,
        None => default_honey_pots(),
    };
    let instructions = match &a.instructions {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => DEFAULT_INSTRUCTIONS.to_string(),
    };
    let b = StudyBundle {
        instructions,
        timelines: load_timelines(&a.timelines)?.into_iter().map(|t| (t.id.clone(), t)).collect(),
        units: load_units(&a.units)?,
        questionnaire: load_questionnaire(a.questionnaire.as_deref())?,
        honey_pots,
        expert: a.expert.as_deref().map(load_expert).transpose()?,
    };
    let dir = ctx.output(a.out, "bundle");
    let manifest = b.write(&dir)?;
    eprintln!(
        "wrote {} ({} timelines, {} units, {} files)",
        dir.display(),
        b.timelines.len(),
        b.units.len(),
        manifest.files.len()
    );
    Ok(())
}

fn scope(flag: Option<&str>, file: Option<DiscardScope>) -> Result<Option<DiscardScope>> {
    match flag {
        Some(s) => Ok(Some(s.parse().map_err(|e: String| usage(format!("--discard-scope: {e}")))?)),
        None => Ok(file),
    }
}

fn serve(ctx: &Ctx, a: ServeArgs) -> Result<()> {
    let file = &ctx.file.serve;
    let mut cfg = ServiceConfig::new(PathBuf::new());
    if let Some(b) = &file.bundle {
        cfg.bundle = b.clone();
    }
    if let Some(s) = &file.store {
        cfg.store = s.clone();
    }
    if let Some(b) = &file.bind {
        cfg.bind = b.parse().map_err(|e| ConfigError(format!("serve.bind {b:?}: {e}")))?;
    }
    if let Some(s) = ctx.file.discard_scope()? {
        cfg.options.discard_scope = s;
    }
    cfg.options.balanced = file.balanced.unwrap_or(false);
    let mut cfg = cfg.apply_env()?;
    if let Some(b) = a.bundle {
        cfg.bundle = b;
    }
    if let Some(s) = a.store {
        cfg.store = s;
    }
    if let Some(b) = a.bind {
        cfg.bind = b.parse().map_err(|e| usage(format!("--bind {b:?}: {e}")))?;
    }
    if let Some(s) = scope(a.discard_scope.as_deref(), None)? {
        cfg.options.discard_scope = s;
    }
    cfg.options.balanced |= a.balanced;
    if let Some(seed) = ctx.seed.or(ctx.file.seed) {
        cfg.options.master_seed = Some(seed);
    }
    if cfg.bundle.as_os_str().is_empty() {
        bail!(usage("no bundle: pass --bundle or set COHESION_BUNDLE"));
    }
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(cohesion_service::serve(cfg))?;
    Ok(())
}

fn simulate(ctx: &Ctx, a: SimulateArgs) -> Result<()> {
    let file = &ctx.file.simulate;
    let d = SimulationConfig::default();
    let cfg = SimulationConfig {
        raters: a.raters.or(file.raters).unwrap_or(d.raters),
        noise_sd: a.noise_sd.or(file.noise_sd).unwrap_or(d.noise_sd),
        unit_sd: a.unit_sd.or(file.unit_sd).unwrap_or(d.unit_sd),
        coverage: a.coverage.or(file.coverage).unwrap_or(d.coverage),
    };
    let units = load_units(&a.units)?;
    let q = load_questionnaire(a.questionnaire.as_deref())?;
    let sim = simulate_ratings(&units, &q, &cfg, ctx.seed())?;
    let ratings_path = ctx.output(a.out, "ratings.csv");
    let expert_path = ctx.output(a.expert_out, "expert.csv");
    let mut w = create(&ratings_path)?;
    write_ratings_csv(&mut w, &sim.ratings)?;
    w.flush()?;
    let mut w = create(&expert_path)?;
    write_expert_csv(&mut w, &sim.expert)?;
    w.flush()?;
    eprintln!(
        "wrote {} ratings to {} and {} expert scores to {}",
        sim.ratings.len(),
        ratings_path.display(),
        sim.expert.len(),
        expert_path.display()
    );
    Ok(())
}

fn export(ctx: &Ctx, a: ExportArgs) -> Result<()> {
    let bundle = Arc::new(StudyBundle::load(&a.bundle)?);
    let mut options = StudyOptions::default();
    if let Some(s) = scope(a.discard_scope.as_deref(), ctx.file.discard_scope()?)? {
        options.discard_scope = s;
    }
    if !a.store.exists() {
        bail!("event log {} does not exist", a.store.display());
    }
    let events = read_events(&a.store)?;
    let mut study = Study::from_events(bundle, options, &events)?;
    let report = study.apply_validity_filter()?;
    let ratings_path = ctx.output(a.ratings_out, "ratings.csv");
    write_file(&ratings_path, &study.export_ratings_csv()?)?;
    let matrices_path = ctx.output(a.matrices_out, "matrices.json");
    let mut json = serde_json::to_string_pretty(&study.export_matrices()?)?;
    json.push('\n');
    write_file(&matrices_path, json.as_bytes())?;
    eprintln!(
        "{} ratings ({} discarded, scope {:?}) -> {}, {}",
        report.total_ratings,
        report.discarded,
        report.scope,
        ratings_path.display(),
        matrices_path.display()
    );
    Ok(())
}

fn analyze_cmd(ctx: &Ctx, a: AnalyzeArgs) -> Result<()> {
    let file = &ctx.file.analyze;
    let d = AnalysisConfig::default();
    let cfg = AnalysisConfig {
        alpha: a.alpha.or(file.alpha).unwrap_or(d.alpha),
        decimals: a.decimals.or(file.decimals).unwrap_or(d.decimals),
        variant: a.variant.or(file.variant).unwrap_or(d.variant),
    };
    let units = load_units(&a.units)?;
    let ratings = read_ratings_csv(open(&a.ratings)?)
        .map_err(|e| anyhow::Error::new(e).context(a.ratings.display().to_string()))?;
    let expert = match &a.expert {
        Some(p) => load_expert(p)?,
        None => Vec::new(),
    };
    let q = load_questionnaire(a.questionnaire.as_deref())?;
    let report = analyze(&units, &ratings, &q, &expert, &cfg)?;
    let dir = ctx.out_dir().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let text = report.to_text();
    write_file(&dir.join("report.json"), report.to_json().as_bytes())?;
    write_file(&dir.join("report.txt"), text.as_bytes())?;
    print!("{text}");
    eprintln!("wrote {} and {}", dir.join("report.json").display(), dir.join("report.txt").display());
    Ok(())
}
