mod config;
mod manifest;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ombench_core::build::{build_subsumption_dataset, extract_equivalence, prune, HubTable};
use ombench_core::candidates::{
    read_candidates, read_scored, read_tsv_candidates, write_candidates, write_scored,
};
use ombench_core::editsim::{
    default_threshold_grid, match_ontologies, score_candidates, tune_threshold, MatcherConfig,
    DEFAULT_CANDIDATE_K, DEFAULT_THRESHOLD,
};
use ombench_core::import::{export_json, import_json, import_rdfxml_subset, preprocess, ImportConfig};
use ombench_core::metrics::{
    global_matching_metrics, local_ranking_metrics, split_references, EvalReport, SplitScheme,
};
use ombench_core::sampling::{
    build_inverted_index, generate_all, SamplingContext, SamplingPlan, Strategy, Tokenizer,
    DEFAULT_MAX_HOPS,
};
use ombench_core::{MappingSet, OntologySnapshot, Relation};
use serde_json::json;

use config::{FileConfig, DEFAULT_SEED};
use manifest::{manifest_path, Run};

#[derive(Parser)]
#[command(name = "ombench", version, about = "Build and evaluate ontology matching benchmarks")]
struct Cli {
    /// Seed for every stochastic step
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON file with default settings (flags win)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output (repeatable)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an RDF/XML ontology into a JSON snapshot
    Import(ImportArgs),
    /// Strip cross-references and drop deprecated classes
    Preprocess(PreprocessArgs),
    /// Keep only the listed classes, preserving the hierarchy
    Prune(PruneArgs),
    /// Derive equivalence mappings from a hub cross-reference table
    ExtractEquiv(ExtractArgs),
    /// Build subsumption mappings by deleting equivalence targets
    GenSubs(GenSubsArgs),
    /// Sample negative candidates for reference mappings
    SampleCands(SampleArgs),
    /// Split reference mappings into train/val/test files
    Split(SplitArgs),
    /// MRR and Hits@K over scored candidate records
    RankEval(RankEvalArgs),
    /// Precision, recall and F-score of a system output
    MatchEval(MatchEvalArgs),
    /// Run the edit-similarity matcher
    EditsimMatch(EditsimMatchArgs),
    /// Score candidate records with edit similarity
    EditsimScore(EditsimScoreArgs),
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Base IRI when the document declares none
    #[arg(long)]
    base: Option<String>,
}

#[derive(Args)]
struct PreprocessArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Annotation property to strip (repeatable)
    #[arg(long = "xref-property")]
    xref_properties: Vec<String>,
    #[arg(long)]
    keep_deprecated: bool,
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    input: PathBuf,
    /// File with one class IRI per line
    #[arg(long)]
    preserve: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    hub: PathBuf,
    #[arg(long)]
    src_onto: PathBuf,
    /// Ontology key of the source in the hub table
    #[arg(long)]
    src_id: String,
    #[arg(long)]
    tgt_onto: PathBuf,
    #[arg(long)]
    tgt_id: String,
    #[arg(long)]
    output: PathBuf,
    /// CURIE expansion, PREFIX=NAMESPACE (repeatable)
    #[arg(long = "prefix")]
    prefixes: Vec<String>,
}

#[derive(Args)]
struct GenSubsArgs {
    #[arg(long)]
    src_onto: PathBuf,
    #[arg(long)]
    tgt_onto: PathBuf,
    #[arg(long)]
    equiv: PathBuf,
    /// Subsumption mappings (TSV)
    #[arg(long)]
    output: PathBuf,
    /// Target ontology with the used equivalence targets deleted
    #[arg(long)]
    target_out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Task {
    Equiv,
    Subs,
}

impl Task {
    fn relation(self) -> Relation {
        match self {
            Task::Equiv => Relation::Equivalence,
            Task::Subs => Relation::Subsumption,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    /// Mappings to generate candidates for
    #[arg(long)]
    refs: PathBuf,
    /// Complete reference set used to exclude valid targets (defaults to --refs)
    #[arg(long)]
    all_refs: Option<PathBuf>,
    /// Equivalence mappings whose targets' ancestors are excluded for subsumption
    #[arg(long)]
    equiv: Option<PathBuf>,
    #[arg(long)]
    tgt_onto: PathBuf,
    #[arg(long, value_enum, default_value = "equiv")]
    task: Task,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    idf: Option<usize>,
    #[arg(long, alias = "neighbor")]
    neighbour: Option<usize>,
    #[arg(long)]
    random: Option<usize>,
    /// Ordered strategy as NAME:COUNT (repeatable; excludes --idf/--neighbour/--random)
    #[arg(long = "strategy")]
    strategies: Vec<String>,
    #[arg(long)]
    max_hops: Option<usize>,
    /// Sub-word vocabulary, one piece per line
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long = "synonym-property")]
    synonym_properties: Vec<String>,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    refs: PathBuf,
    #[arg(long, value_enum, default_value = "equiv")]
    task: Task,
    /// unsup (10/90) or semi (20/10/70)
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RankEvalArgs {
    #[arg(long)]
    scored: PathBuf,
    /// Cut-offs for Hits@K
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct MatchEvalArgs {
    /// System output mappings (TSV)
    #[arg(long)]
    pred: PathBuf,
    /// Full reference mappings
    #[arg(long)]
    refs: PathBuf,
    /// Evaluation subset, e.g. the test split
    #[arg(long)]
    eval: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "equiv")]
    task: Task,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EditsimMatchArgs {
    #[arg(long)]
    src_onto: PathBuf,
    #[arg(long)]
    tgt_onto: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    threshold: Option<f64>,
    /// Choose the threshold on this validation split instead
    #[arg(long, conflicts_with = "threshold")]
    tune_val: Option<PathBuf>,
    #[arg(long)]
    candidate_k: Option<usize>,
    /// Keep every target above the threshold, not only the best
    #[arg(long)]
    all_above: bool,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long = "synonym-property")]
    synonym_properties: Vec<String>,
}

#[derive(Args)]
struct EditsimScoreArgs {
    /// Candidate records (JSON Lines, or TSV with a TgtCandidates column)
    #[arg(long)]
    cands: PathBuf,
    #[arg(long)]
    src_onto: PathBuf,
    #[arg(long)]
    tgt_onto: PathBuf,
    #[arg(long, value_enum, default_value = "equiv")]
    task: Task,
    #[arg(long)]
    output: PathBuf,
    #[arg(long = "synonym-property")]
    synonym_properties: Vec<String>,
}

/// Bad flag combinations found after parsing; reported with exit code 1.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Ctx {
    seed: u64,
    jobs: usize,
    file: FileConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref()).map_err(|e| usage(format!("{:#}", e)))?;
    let ctx = Ctx {
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        jobs: cli.jobs.or(file.jobs).unwrap_or(1).max(1),
        file,
    };
    match cli.command {
        Command::Import(a) => cmd_import(&ctx, a),
        Command::Preprocess(a) => cmd_preprocess(&ctx, a),
        Command::Prune(a) => cmd_prune(&ctx, a),
        Command::ExtractEquiv(a) => cmd_extract(&ctx, a),
        Command::GenSubs(a) => cmd_gen_subs(&ctx, a),
        Command::SampleCands(a) => cmd_sample(&ctx, a),
        Command::Split(a) => cmd_split(&ctx, a),
        Command::RankEval(a) => cmd_rank_eval(&ctx, a),
        Command::MatchEval(a) => cmd_match_eval(&ctx, a),
        Command::EditsimMatch(a) => cmd_editsim_match(&ctx, a),
        Command::EditsimScore(a) => cmd_editsim_score(&ctx, a),
    }
}

/// Loads a JSON snapshot, or RDF/XML when the file does not look like JSON.
fn load_onto(run: &mut Run, path: &Path) -> anyhow::Result<OntologySnapshot> {
    let bytes = run.read(path)?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    let snap = if first == Some(&b'{') {
        import_json(&bytes)?
    } else {
        import_rdfxml_subset(&bytes, None)?.0
    };
    Ok(snap)
}

fn load_mappings(run: &mut Run, path: &Path, relation: Relation) -> anyhow::Result<MappingSet> {
    let text = run.read_text(path)?;
    MappingSet::from_tsv(&text, relation).with_context(|| format!("in {}", path.display()))
}

fn load_tokenizer(run: &mut Run, vocab: Option<&Path>) -> anyhow::Result<Tokenizer> {
    match vocab {
        None => Ok(Tokenizer::words()),
        Some(p) => {
            let text = run.read_text(p)?;
            Ok(Tokenizer::with_vocab(text.lines().map(str::trim).filter(|l| !l.is_empty())))
        }
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn cmd_import(ctx: &Ctx, a: ImportArgs) -> anyhow::Result<()> {
    let mut run = Run::new("import", ctx.seed);
    let bytes = run.read(&a.input)?;
    let (snap, report) = import_rdfxml_subset(&bytes, a.base.as_deref())
        .with_context(|| format!("in {}", a.input.display()))?;
    log::info!("imported {} classes", snap.len());
    run.write(&a.output, &export_json(&snap))?;
    run.config(&json!({ "base": a.base }));
    run.report(&report);
    run.finish(manifest_path(&a.output))
}

fn cmd_preprocess(ctx: &Ctx, a: PreprocessArgs) -> anyhow::Result<()> {
    let mut run = Run::new("preprocess", ctx.seed);
    let mut cfg = ImportConfig::default();
    if !a.xref_properties.is_empty() {
        cfg.xref_properties = a.xref_properties;
    } else if let Some(x) = &ctx.file.xref_properties {
        cfg.xref_properties = x.clone();
    }
    cfg.synonym_properties = ctx.file.label_properties(&[]);
    cfg.drop_deprecated = !(a.keep_deprecated || ctx.file.keep_deprecated.unwrap_or(false));
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let onto = load_onto(&mut run, &a.input)?;
    let before = onto.len();
    let out = preprocess(&onto, &cfg)?;
    run.write(&a.output, &export_json(&out))?;
    run.config(&cfg);
    run.report(&json!({ "classes_before": before, "classes_after": out.len() }));
    run.finish(manifest_path(&a.output))
}

fn cmd_prune(ctx: &Ctx, a: PruneArgs) -> anyhow::Result<()> {
    let mut run = Run::new("prune", ctx.seed);
    let onto = load_onto(&mut run, &a.input)?;
    let preserve: BTreeSet<String> = run
        .read_text(&a.preserve)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    let (out, report) = prune(&onto, &preserve)?;
    run.write(&a.output, &export_json(&out))?;
    run.config(&json!({}));
    run.report(&report);
    run.finish(manifest_path(&a.output))
}

fn parse_prefixes(flags: &[String], file: &FileConfig) -> anyhow::Result<BTreeMap<String, String>> {
    if flags.is_empty() {
        return Ok(file.prefixes.clone().unwrap_or_default());
    }
    flags
        .iter()
        .map(|f| {
            f.split_once('=')
                .map(|(p, ns)| (p.to_string(), ns.to_string()))
                .ok_or_else(|| usage(format!("--prefix expects PREFIX=NAMESPACE, got {:?}", f)))
        })
        .collect()
}

fn cmd_extract(ctx: &Ctx, a: ExtractArgs) -> anyhow::Result<()> {
    let mut run = Run::new("extract-equiv", ctx.seed);
    let prefixes = parse_prefixes(&a.prefixes, &ctx.file)?;
    let hub = HubTable::from_json(&run.read(&a.hub)?).with_context(|| format!("in {}", a.hub.display()))?;
    let hub = if prefixes.is_empty() { hub } else { hub.expand_curies(&prefixes) };
    let src = load_onto(&mut run, &a.src_onto)?;
    let tgt = load_onto(&mut run, &a.tgt_onto)?;
    let (equiv, report) = extract_equivalence(&hub, &a.src_id, &src, &a.tgt_id, &tgt);
    if report.invalid_concepts > 0 {
        log::warn!("{} hub concepts have missing class IDs", report.invalid_concepts);
    }
    run.write(&a.output, equiv.to_tsv().as_bytes())?;
    run.config(&json!({ "src_id": a.src_id, "tgt_id": a.tgt_id, "prefixes": prefixes }));
    run.report(&report);
    run.finish(manifest_path(&a.output))
}

fn cmd_gen_subs(ctx: &Ctx, a: GenSubsArgs) -> anyhow::Result<()> {
    let mut run = Run::new("gen-subs", ctx.seed);
    let src = load_onto(&mut run, &a.src_onto)?;
    let tgt = load_onto(&mut run, &a.tgt_onto)?;
    let equiv = load_mappings(&mut run, &a.equiv, Relation::Equivalence)?;
    let result = build_subsumption_dataset(&src, &tgt, &equiv, ctx.seed);
    run.write(&a.output, result.subs_mappings.to_tsv().as_bytes())?;
    run.write(&a.target_out, &export_json(&result.modified_target))?;
    run.config(&json!({}));
    run.report(&result.report(equiv.len()));
    run.finish(manifest_path(&a.output))
}

fn sampling_plan(ctx: &Ctx, a: &SampleArgs) -> anyhow::Result<Vec<(Strategy, usize)>> {
    let counts = [
        (Strategy::Idf, a.idf.or(ctx.file.idf)),
        (Strategy::Neighbour, a.neighbour.or(ctx.file.neighbour)),
        (Strategy::Random, a.random.or(ctx.file.random)),
    ];
    if !a.strategies.is_empty() {
        if a.idf.is_some() || a.neighbour.is_some() || a.random.is_some() {
            return Err(usage("--strategy cannot be combined with --idf/--neighbour/--random"));
        }
        return a
            .strategies
            .iter()
            .map(|s| {
                let (name, n) = s
                    .split_once(':')
                    .ok_or_else(|| usage(format!("--strategy expects NAME:COUNT, got {:?}", s)))?;
                let strategy: Strategy = name.parse().map_err(|e: ombench_core::Error| usage(e.to_string()))?;
                let n: usize = n.parse().map_err(|_| usage(format!("bad count in {:?}", s)))?;
                Ok((strategy, n))
            })
            .collect();
    }
    let plan: Vec<(Strategy, usize)> = counts
        .into_iter()
        .filter_map(|(s, n)| n.map(|n| (s, n)))
        .collect();
    if plan.is_empty() {
        return Err(usage("no sampling strategy given; use --idf, --neighbour, --random or --strategy"));
    }
    Ok(plan)
}

fn cmd_sample(ctx: &Ctx, a: SampleArgs) -> anyhow::Result<()> {
    let mut run = Run::new("sample-cands", ctx.seed);
    let strategies = sampling_plan(ctx, &a)?;
    let max_hops = a.max_hops.or(ctx.file.max_hops).unwrap_or(DEFAULT_MAX_HOPS);
    let plan = SamplingPlan::new(strategies, max_hops, ctx.seed).map_err(|e| usage(e.to_string()))?;
    let relation = a.task.relation();
    let props = ctx.file.label_properties(&a.synonym_properties);

    let targets = load_mappings(&mut run, &a.refs, relation)?;
    let all_refs = match &a.all_refs {
        Some(p) => load_mappings(&mut run, p, relation)?,
        None => targets.clone(),
    };
    let equiv = match &a.equiv {
        Some(p) => Some(load_mappings(&mut run, p, Relation::Equivalence)?),
        None => None,
    };
    let onto = load_onto(&mut run, &a.tgt_onto)?;
    let vocab = a.vocab.clone().or_else(|| ctx.file.vocab.as_ref().map(PathBuf::from));
    let tokenizer = load_tokenizer(&mut run, vocab.as_deref())?;
    let index = build_inverted_index(&onto, &props, &tokenizer);
    let sctx = SamplingContext {
        refs: &all_refs,
        equiv_partners: equiv.as_ref(),
        index: &index,
        onto_tgt: &onto,
    };
    let records = generate_all(&targets, &plan, &sctx, ctx.jobs)?;
    run.write(&a.output, write_candidates(&records).as_bytes())?;
    run.config(&json!({
        "task": relation,
        "strategies": plan.strategies,
        "max_hops": plan.max_hops,
        "vocab": vocab.as_deref().map(file_name),
        "synonym_properties": props,
    }));
    run.report(&json!({ "records": records.len(), "negatives_per_record": plan.total() }));
    run.finish(manifest_path(&a.output))
}

fn cmd_split(ctx: &Ctx, a: SplitArgs) -> anyhow::Result<()> {
    let mut run = Run::new("split", ctx.seed);
    let scheme_name = a
        .scheme
        .clone()
        .or_else(|| ctx.file.scheme.clone())
        .ok_or_else(|| usage("--scheme is required (unsup or semi)"))?;
    let scheme: SplitScheme = scheme_name.parse().map_err(|e: ombench_core::Error| usage(e.to_string()))?;
    let refs = load_mappings(&mut run, &a.refs, a.task.relation())?;
    let bundle = split_references(&refs, scheme, ctx.seed)?;
    if scheme == SplitScheme::SemiSupervised {
        run.write(&a.out_dir.join("train.tsv"), bundle.train.to_tsv().as_bytes())?;
    }
    run.write(&a.out_dir.join("val.tsv"), bundle.val.to_tsv().as_bytes())?;
    run.write(&a.out_dir.join("test.tsv"), bundle.test.to_tsv().as_bytes())?;
    run.config(&json!({ "scheme": scheme, "task": a.task.relation() }));
    run.report(&json!({
        "train": bundle.train.len(),
        "val": bundle.val.len(),
        "test": bundle.test.len(),
    }));
    run.finish(a.out_dir.join("manifest.json"))
}

fn cmd_rank_eval(ctx: &Ctx, a: RankEvalArgs) -> anyhow::Result<()> {
    let mut run = Run::new("rank-eval", ctx.seed);
    let ks = if !a.ks.is_empty() {
        a.ks
    } else {
        ctx.file.ks.clone().unwrap_or_else(|| vec![1, 5, 10])
    };
    if ks.contains(&0) {
        return Err(usage("Hits@K cut-offs must be positive"));
    }
    let text = run.read_text(&a.scored)?;
    let records = read_scored(&text).with_context(|| format!("in {}", a.scored.display()))?;
    let report = local_ranking_metrics(&records, &ks)?;
    let eval = EvalReport::from_ranking(&report);
    let bytes = eval.to_json();
    run.write(&a.output, &bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    run.config(&json!({ "ks": ks }));
    run.report(&json!({ "n": report.n, "excluded": report.excluded }));
    run.finish(manifest_path(&a.output))
}

fn cmd_match_eval(ctx: &Ctx, a: MatchEvalArgs) -> anyhow::Result<()> {
    let mut run = Run::new("match-eval", ctx.seed);
    let beta = a.beta.or(ctx.file.beta).unwrap_or(1.0);
    if !(beta.is_finite() && beta > 0.0) {
        return Err(usage("--beta must be positive"));
    }
    let relation = a.task.relation();
    let pred = load_mappings(&mut run, &a.pred, relation)?;
    let refs = load_mappings(&mut run, &a.refs, relation)?;
    let eval = match &a.eval {
        Some(p) => Some(load_mappings(&mut run, p, relation)?),
        None => None,
    };
    if let Some(e) = &eval {
        let outside = e.difference(&refs).len();
        if outside > 0 {
            bail!("{} evaluation mappings are not in the reference set", outside);
        }
    }
    let report = global_matching_metrics(&pred, &refs, eval.as_ref(), beta);
    if report.precision_undefined {
        log::warn!("no countable output mappings; precision reported as 0");
    }
    let bytes = EvalReport::from_matching(&report).to_json();
    run.write(&a.output, &bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    run.config(&json!({ "beta": beta, "task": relation }));
    run.report(&report);
    run.finish(manifest_path(&a.output))
}

fn cmd_editsim_match(ctx: &Ctx, a: EditsimMatchArgs) -> anyhow::Result<()> {
    let mut run = Run::new("editsim-match", ctx.seed);
    let mut cfg = MatcherConfig {
        threshold: a.threshold.or(ctx.file.threshold).unwrap_or(DEFAULT_THRESHOLD),
        candidate_k: a.candidate_k.or(ctx.file.candidate_k).unwrap_or(DEFAULT_CANDIDATE_K),
        synonym_properties: ctx.file.label_properties(&a.synonym_properties),
        all_above_threshold: a.all_above,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let src = load_onto(&mut run, &a.src_onto)?;
    let tgt = load_onto(&mut run, &a.tgt_onto)?;
    let vocab = a.vocab.clone().or_else(|| ctx.file.vocab.as_ref().map(PathBuf::from));
    let tokenizer = load_tokenizer(&mut run, vocab.as_deref())?;
    let index = build_inverted_index(&tgt, &cfg.synonym_properties, &tokenizer);

    let mut tuning = None;
    if let Some(val_path) = &a.tune_val {
        let val = load_mappings(&mut run, val_path, Relation::Equivalence)?;
        let raw_cfg = MatcherConfig {
            threshold: 0.0,
            all_above_threshold: false,
            ..cfg.clone()
        };
        let (raw, _) = match_ontologies(&src, &tgt, &index, &tokenizer, &raw_cfg, ctx.jobs)?;
        let choice = tune_threshold(&raw, &val, &default_threshold_grid())
            .ok_or_else(|| anyhow::anyhow!("validation split {} is empty", val_path.display()))?;
        log::info!(
            "tuned threshold {:.2} (validation F1 {:.3}, hit accuracy {:.3})",
            choice.threshold,
            choice.f1,
            choice.hit_accuracy
        );
        cfg.threshold = choice.threshold;
        tuning = Some(choice);
    }
    let (out, stats) = match_ontologies(&src, &tgt, &index, &tokenizer, &cfg, ctx.jobs)?;
    run.write(&a.output, out.to_tsv().as_bytes())?;
    run.config(&json!({ "matcher": cfg, "vocab": vocab.as_deref().map(file_name) }));
    run.report(&json!({ "mappings": out.len(), "stats": stats, "tuning": tuning }));
    run.finish(manifest_path(&a.output))
}

fn cmd_editsim_score(ctx: &Ctx, a: EditsimScoreArgs) -> anyhow::Result<()> {
    let mut run = Run::new("editsim-score", ctx.seed);
    let props = ctx.file.label_properties(&a.synonym_properties);
    let text = run.read_text(&a.cands)?;
    let records = if text.starts_with("SrcEntity\t") {
        read_tsv_candidates(&text, a.task.relation())
    } else {
        read_candidates(&text, a.task.relation())
    }
    .with_context(|| format!("in {}", a.cands.display()))?;
    let src = load_onto(&mut run, &a.src_onto)?;
    let tgt = load_onto(&mut run, &a.tgt_onto)?;
    let mut scored = Vec::with_capacity(records.len());
    let mut failed = 0usize;
    for (i, r) in score_candidates(&records, &src, &tgt, &props, ctx.jobs).into_iter().enumerate() {
        match r {
            Ok(s) => scored.push(s),
            Err(e) => {
                failed += 1;
                log::warn!("record {} skipped: {}", i + 1, e);
            }
        }
    }
    run.write(&a.output, write_scored(&scored).as_bytes())?;
    run.config(&json!({ "task": a.task.relation(), "synonym_properties": props }));
    run.report(&json!({ "scored": scored.len(), "failed": failed }));
    run.finish(manifest_path(&a.output))
}
