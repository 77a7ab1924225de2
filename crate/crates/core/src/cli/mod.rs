//! The `holoq` command line.
//!
//! [`run`] parses arguments and returns the text to print together with the
//! process exit code, so the binary stays a thin wrapper and the commands can
//! be tested in-process.

pub mod describe;
pub mod files;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{HoloqError, Result};
use crate::fmt_probability;
use crate::gatelib::{pseudo_gate_tree, TruthPerspective};
use crate::holistic::HolisticEvaluation;
use crate::judgments::{
    check_consequence, maximal_model_for, Claim, Counterexample, PerspectiveScope, Verdict,
};
use crate::judgments::{run_situation, ScenarioConfig, ScenarioReport};
use crate::lang::{parse_sentence, print_sentence, Sentence, SyntacticalTree};

use self::describe::describe;
pub use self::files::{
    load_replay, replay_from_json, replay_to_json, save_replay, ClaimFile, ModelFile,
    MODEL_VERSION, REPLAY_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONSTRAINT: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;
pub const EXIT_PRESET: i32 = 5;

/// Levels wider than this many qubits print as digests unless `--full`.
const ELIDE_QUBITS: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "holoq",
    version,
    about = "Holistic quantum semantics for epistemic sentences"
)]
pub struct Cli {
    /// Model file (`holoq-model/1`).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Truth perspective: I, H, X, a name from the model file, or per-agent:a@t.
    #[arg(long, global = true)]
    pub perspective: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a sentence and print its canonical form.
    Parse { sentence: String },
    /// Print the syntactical tree, and the pseudo-gates when a perspective is given.
    Tree { sentence: String },
    /// Evaluate a sentence against the model file's assignment.
    Eval {
        sentence: String,
        /// Print every level meaning in full.
        #[arg(long)]
        full: bool,
    },
    /// Check a claim file, or re-run a replay file.
    Check {
        file: PathBuf,
        /// Where to write a counterexample (default: next to the claim).
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Run one of the nine epistemic situations, or all of them.
    Scenario {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        k: Option<u8>,
        #[arg(long)]
        all: bool,
        /// Directory for countermodel replay files.
        #[arg(long)]
        replay_dir: Option<PathBuf>,
    },
    /// Countermodel search for `alpha... |= beta` in a context, over several seeds.
    Search {
        context: String,
        /// Premise occurrences (repeatable).
        #[arg(long)]
        alpha: Vec<String>,
        /// Conclusion occurrence (default: the context).
        #[arg(long)]
        beta: Option<String>,
        /// Harmonic consequence instead of plain consequence.
        #[arg(long)]
        harmonic: bool,
        /// Seeds tried, starting at `--seed`.
        #[arg(long, default_value_t = 4)]
        rounds: u64,
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

/// Text and exit code of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: i32, stdout: String) -> Self {
        Output {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn exit_code(e: &HoloqError) -> i32 {
    match e {
        HoloqError::ConstraintViolation { .. } => EXIT_CONSTRAINT,
        HoloqError::SamplerExhausted { .. } => EXIT_EXHAUSTED,
        HoloqError::Preset(_) => EXIT_PRESET,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output::ok(code, text)
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Output {
    match dispatch(cli) {
        Ok(out) => out,
        Err(e) => {
            let code = exit_code(&e);
            let stderr = if cli.json {
                to_json(&json!({"error": e.to_string(), "exit_code": code}))
            } else {
                format!("error: {e}\n")
            };
            Output {
                code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Parse { sentence } => cmd_parse(cli, sentence),
        Command::Tree { sentence } => cmd_tree(cli, sentence),
        Command::Eval { sentence, full } => cmd_eval(cli, sentence, *full),
        Command::Check { file, replay } => cmd_check(cli, file, replay.as_deref()),
        Command::Scenario { k, all, replay_dir } => {
            cmd_scenario(cli, *k, *all, replay_dir.as_deref())
        }
        Command::Search {
            context,
            alpha,
            beta,
            harmonic,
            rounds,
            replay,
        } => cmd_search(
            cli,
            context,
            alpha,
            beta.as_deref(),
            *harmonic,
            *rounds,
            replay.as_deref(),
        ),
    }
}

fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("value prints") + "\n"
}

fn load_model(cli: &Cli) -> Result<Option<ModelFile>> {
    cli.model.as_deref().map(ModelFile::load).transpose()
}

fn cmd_parse(cli: &Cli, text: &str) -> Result<Output> {
    let s = parse_sentence(text)?;
    let printed = print_sentence(&s);
    let out = if cli.json {
        to_json(&json!({
            "sentence": printed,
            "atomic_complexity": s.atomic_complexity(),
            "labels": s.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        }))
    } else {
        format!("{printed}\n")
    };
    Ok(Output::ok(EXIT_OK, out))
}

fn tree_json(tree: &SyntacticalTree) -> Value {
    let levels: Vec<Value> = tree
        .levels()
        .map(|(i, occs)| {
            json!({
                "level": i,
                "occurrences": occs.iter().map(|o| json!({
                    "sentence": o.sentence.to_string(),
                    "qubits": [o.span.start, o.span.end],
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"height": tree.height(), "width": tree.width(), "levels": levels})
}

fn cmd_tree(cli: &Cli, text: &str) -> Result<Output> {
    let s = parse_sentence(text)?;
    let tree = SyntacticalTree::build(&s);
    let model = load_model(cli)?;
    let gates = match (&cli.perspective, &model) {
        (None, None) => None,
        (spec, model) => {
            let spec = spec.as_deref().unwrap_or("I");
            let (p, qm) = match model {
                Some(m) => (m.resolve_perspective(spec)?, m.quasi_model.clone()),
                None => {
                    let p = named(spec)?;
                    let qm = maximal_model_for(&s, &p);
                    (p, qm)
                }
            };
            Some(pseudo_gate_tree(&s, &p, &qm)?)
        }
    };
    let out = if cli.json {
        let mut v = tree_json(&tree);
        if let Some(g) = &gates {
            v["pseudo_gates"] = g
                .iter()
                .map(|pg| json!({"target_level": pg.target_level, "gate": pg.to_string()}))
                .collect();
        }
        to_json(&v)
    } else {
        let mut out = tree.render();
        if let Some(g) = &gates {
            out.push_str(&format!("pseudo-gates ({}):\n", g.len()));
            for pg in g {
                out.push_str(&format!(
                    "  Level_{} <- Level_{}: {pg}\n",
                    pg.target_level,
                    pg.target_level + 1
                ));
            }
        }
        out
    };
    Ok(Output::ok(EXIT_OK, out))
}

fn named(spec: &str) -> Result<TruthPerspective> {
    TruthPerspective::preset(spec)
        .ok_or_else(|| HoloqError::Unresolved(format!("perspective `{spec}`")))
}

/// The perspective for `s`: `--perspective`, or the only one assigned to `s`.
fn eval_perspective(cli: &Cli, model: &ModelFile, s: &Sentence) -> Result<TruthPerspective> {
    if let Some(spec) = &cli.perspective {
        return model.resolve_perspective(spec);
    }
    let keys: Vec<&str> = model
        .assignment
        .iter()
        .filter(|(t, _, _)| *t == s)
        .map(|(_, k, _)| k)
        .collect();
    match keys.as_slice() {
        [one] => model.named_perspective(one),
        [] => Err(HoloqError::MissingAssignment {
            sentence: s.to_string(),
            perspective: "any".into(),
        }),
        _ => Err(HoloqError::ModelFile(format!(
            "`{s}` has assignments under {}; pick one with --perspective",
            keys.join(", ")
        ))),
    }
}

fn cmd_eval(cli: &Cli, text: &str, full: bool) -> Result<Output> {
    let s = parse_sentence(text)?;
    let model =
        load_model(cli)?.ok_or_else(|| HoloqError::ModelFile("eval needs --model".into()))?;
    let p = eval_perspective(cli, &model, &s)?;
    let ev = model.evaluate(&s, &p)?;
    let out = if cli.json {
        to_json(&eval_json(&ev, &model))
    } else {
        eval_text(&ev, &model, full)
    };
    Ok(Output::ok(EXIT_OK, out))
}

fn contextual_rows(ev: &HolisticEvaluation) -> Vec<(String, String, String, String)> {
    let tree = ev.tree();
    let mut rows = Vec::new();
    for path in tree.paths().filter(|p| p.level > 1) {
        let occ = tree.get(path).expect("listed path");
        if let Ok(rho) = ev.contextual_meaning(path) {
            let p = crate::qlin::probability(ev.perspective(), &rho);
            rows.push((
                path.to_string(),
                occ.sentence.to_string(),
                describe(&rho),
                fmt_probability(p),
            ));
        }
    }
    rows
}

fn eval_text(ev: &HolisticEvaluation, model: &ModelFile, full: bool) -> String {
    let perspective = model
        .perspective_name(ev.perspective())
        .unwrap_or_else(|| ev.perspective().to_string());
    let mut out = format!("sentence: {}\nperspective: {perspective}\n", ev.sentence());
    for i in (1..=ev.height()).rev() {
        let rho = ev.level_meaning(i).expect("level exists");
        let shown = if rho.qubits() > ELIDE_QUBITS && !full {
            format!(
                "{} qubits, purity {}",
                rho.qubits(),
                fmt_probability(describe::purity(rho))
            )
        } else {
            describe(rho)
        };
        out.push_str(&format!("Level_{i}: {shown}\n"));
    }
    out.push_str(&format!("p = {}\n", fmt_probability(ev.probability())));
    let checked = ev.constraints().len();
    out.push_str(&format!("constraints: ok ({checked} t/f occurrences)\n"));
    out.push_str(&format!("normality: {}\n", ev.check_normal()));
    out.push_str(&format!("commutation: {}\n", ev.check_commutation()));
    for note in ev.domain_notes() {
        out.push_str(&format!("note: {note}\n"));
    }
    out.push_str("contextual meanings:\n");
    for (path, s, d, p) in contextual_rows(ev) {
        out.push_str(&format!("  {path} {s}: {d}, p = {p}\n"));
    }
    out
}

fn eval_json(ev: &HolisticEvaluation, model: &ModelFile) -> Value {
    let levels: Vec<Value> = (1..=ev.height())
        .map(|i| {
            let rho = ev.level_meaning(i).expect("level exists");
            json!({
                "level": i,
                "qubits": rho.qubits(),
                "description": describe(rho),
                "state": files::state_to_json(rho),
                "probability": crate::qlin::probability(ev.perspective(), rho),
            })
        })
        .collect();
    let normal = ev.check_normal();
    let commutation = ev.check_commutation();
    json!({
        "sentence": ev.sentence().to_string(),
        "perspective": model.perspective_name(ev.perspective()).unwrap_or_else(|| ev.perspective().to_string()),
        "probability": ev.probability(),
        "probability_text": fmt_probability(ev.probability()),
        "levels": levels,
        "constraints": ev.constraints().iter().map(|c| json!({
            "path": c.path.to_string(), "constant": c.constant.to_string(), "defect": c.defect,
        })).collect::<Vec<_>>(),
        "normal": normal.is_normal(),
        "normality": normal.to_string(),
        "commutation_holds": commutation.holds(),
        "commutation": commutation.to_string(),
        "domain_notes": ev.domain_notes(),
        "contextual": contextual_rows(ev).into_iter().map(|(path, s, d, p)| json!({
            "path": path, "sentence": s, "description": d, "probability": p,
        })).collect::<Vec<_>>(),
    })
}

fn is_replay(path: &Path) -> Result<bool> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(v.get("version").and_then(Value::as_str) == Some(REPLAY_VERSION))
}

fn apply_overrides(cli: &Cli, cf: &mut ClaimFile) -> Result<()> {
    if let Some(m) = load_model(cli)? {
        cf.model = m;
    }
    if let Some(spec) = &cli.perspective {
        cf.claim.scope = if spec == "sampled" {
            PerspectiveScope::Sampled
        } else if let Some(l) = spec.strip_prefix("per-agent:") {
            PerspectiveScope::Agent(files::parse_label(l)?)
        } else {
            PerspectiveScope::Fixed(cf.model.named_perspective(spec)?)
        };
    }
    if let Some(seed) = cli.seed {
        cf.sampler.seed = seed;
    }
    if let Some(n) = cli.samples {
        cf.sampler.samples = n;
    }
    Ok(())
}

fn verdict_json(claim: &Claim, v: &Verdict, replay: Option<&Path>) -> Value {
    let cx = v.counterexample();
    json!({
        "claim": claim.to_string(),
        "verdict": if cx.is_some() { "counterexample" } else { "no-counterexample" },
        "summary": v.to_string(),
        "drawn": v.drawn,
        "accepted": v.accepted,
        "antecedent_hits": v.antecedent_hits,
        "rejected_constraint": v.rejected_constraint,
        "rejected_non_normal": v.rejected_non_normal,
        "counterexample": cx.map(|c| json!({
            "sample_index": c.sample_index,
            "perspective": c.perspective.to_string(),
            "premise_probabilities": c.premise_probabilities,
            "conclusion_probability": c.conclusion_probability,
        })),
        "replay_file": replay.map(|p| p.display().to_string()),
    })
}

fn verdict_text(claim: &Claim, v: &Verdict, replay: Option<&Path>) -> String {
    let mut out = format!("claim: {claim}\n");
    out.push_str(&format!(
        "samples: {} drawn, {} accepted, {} with true premises, {} rejected by constraints, {} not normal\n",
        v.drawn, v.accepted, v.antecedent_hits, v.rejected_constraint, v.rejected_non_normal
    ));
    out.push_str(&format!("verdict: {v}\n"));
    if let Some(c) = v.counterexample() {
        let ps: Vec<String> = c
            .premise_probabilities
            .iter()
            .map(|&x| fmt_probability(x))
            .collect();
        out.push_str(&format!("  perspective: {}\n", c.perspective));
        out.push_str(&format!("  premises p = [{}]\n", ps.join(", ")));
        out.push_str(&format!(
            "  conclusion p = {}\n",
            fmt_probability(c.conclusion_probability)
        ));
    }
    if let Some(path) = replay {
        out.push_str(&format!("replay written to {}\n", path.display()));
    }
    out
}

fn default_replay_path(claim_path: &Path) -> PathBuf {
    let stem = claim_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("claim");
    claim_path.with_file_name(format!("{stem}.replay.json"))
}

fn cmd_check(cli: &Cli, file: &Path, replay: Option<&Path>) -> Result<Output> {
    if is_replay(file)? {
        return cmd_replay(cli, file);
    }
    let mut cf = ClaimFile::load(file)?;
    apply_overrides(cli, &mut cf)?;
    let v = check_consequence(&cf.claim, &cf.model.quasi_model, &cf.sampler)?;
    let written = match v.counterexample() {
        Some(cx) => {
            let path = replay.map_or_else(|| default_replay_path(file), Path::to_path_buf);
            save_replay(cx, &path)?;
            Some(path)
        }
        None => None,
    };
    let code = if v.found_counterexample() {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_OK
    };
    let out = if cli.json {
        to_json(&verdict_json(&cf.claim, &v, written.as_deref()))
    } else {
        verdict_text(&cf.claim, &v, written.as_deref())
    };
    Ok(Output::ok(code, out))
}

/// Tolerance for a replay to count as reproducing its recorded probabilities.
pub const REPLAY_TOL: f64 = 1e-12;

fn cmd_replay(cli: &Cli, file: &Path) -> Result<Output> {
    let cx = load_replay(file)?;
    let r = cx.replay()?;
    let reproduces = cx.reproduces(REPLAY_TOL)?;
    let fails = r.fails_claim();
    let code = match (reproduces, fails) {
        (true, true) => EXIT_COUNTEREXAMPLE,
        (true, false) => EXIT_OK,
        (false, _) => {
            return Err(HoloqError::ModelFile(format!(
                "replay does not reproduce its recorded probabilities within {REPLAY_TOL:e}"
            )))
        }
    };
    let out = if cli.json {
        to_json(&json!({
            "claim": cx.claim.to_string(),
            "reproduces": reproduces,
            "fails_claim": fails,
            "premise_probabilities": r.premise_probabilities,
            "conclusion_probability": r.conclusion_probability,
        }))
    } else {
        let ps: Vec<String> = r
            .premise_probabilities
            .iter()
            .map(|&x| fmt_probability(x))
            .collect();
        format!(
            "claim: {}\nreplay reproduces: premises p = [{}], conclusion p = {}\nverdict: {}\n",
            cx.claim,
            ps.join(", "),
            fmt_probability(r.conclusion_probability),
            if fails {
                "counterexample confirmed"
            } else {
                "claim holds in this model"
            }
        )
    };
    Ok(Output::ok(code, out))
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn write_scenario_replays(report: &ScenarioReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, cx) in report.counterexamples() {
        let path = dir.join(format!(
            "situation-{}-{}.json",
            report.situation,
            slug(name)
        ));
        save_replay(cx, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

fn report_json(r: &ScenarioReport, replays: &[PathBuf]) -> Value {
    json!({
        "situation": r.situation,
        "title": r.title,
        "passed": r.passed(),
        "samples": r.samples(),
        "checks": r.checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "informational": c.informational,
            "samples": c.samples,
            "detail": c.detail,
            "counterexample": c.counterexample.is_some(),
        })).collect::<Vec<_>>(),
        "replay_files": replays.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    })
}

fn cmd_scenario(cli: &Cli, k: Option<u8>, all: bool, replay_dir: Option<&Path>) -> Result<Output> {
    let mut cfg = ScenarioConfig::default();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.samples {
        cfg.samples = n;
    }
    cfg.model = load_model(cli)?.map(|m| m.quasi_model);
    let ks: Vec<u8> = if all {
        (1..=9).collect()
    } else {
        vec![k.expect("clap requires k or --all")]
    };
    let mut reports = Vec::new();
    for k in ks {
        let r = run_situation(k, &cfg)?;
        let replays = match replay_dir {
            Some(dir) => write_scenario_replays(&r, dir)?,
            None => Vec::new(),
        };
        reports.push((r, replays));
    }
    let passed = reports.iter().all(|(r, _)| r.passed());
    let code = if passed { EXIT_OK } else { EXIT_COUNTEREXAMPLE };
    let out = if cli.json {
        let list: Vec<Value> = reports.iter().map(|(r, p)| report_json(r, p)).collect();
        to_json(&json!({"passed": passed, "situations": list}))
    } else if all {
        let mut out = format!(
            "{:<3} {:<68} {:>7} {:>8}  verdict\n",
            "#", "situation", "checks", "samples"
        );
        for (r, _) in &reports {
            let counted = r.checks.iter().filter(|c| !c.informational).count();
            out.push_str(&format!(
                "{:<3} {:<68} {:>7} {:>8}  {}\n",
                r.situation,
                r.title,
                counted,
                r.samples(),
                if r.passed() { "pass" } else { "FAIL" }
            ));
        }
        let n = reports.iter().filter(|(r, _)| r.passed()).count();
        out.push_str(&format!("{n}/{} situations pass\n", reports.len()));
        out
    } else {
        let mut out = String::new();
        for (r, replays) in &reports {
            out.push_str(&r.to_string());
            for p in replays {
                out.push_str(&format!("replay written to {}\n", p.display()));
            }
        }
        out
    };
    Ok(Output::ok(code, out))
}

fn cmd_search(
    cli: &Cli,
    context: &str,
    alpha: &[String],
    beta: Option<&str>,
    harmonic: bool,
    rounds: u64,
    replay: Option<&Path>,
) -> Result<Output> {
    let context = parse_sentence(context)?;
    let premises = alpha
        .iter()
        .map(|a| parse_sentence(a))
        .collect::<Result<Vec<_>>>()?;
    let conclusion = beta
        .map(parse_sentence)
        .transpose()?
        .unwrap_or_else(|| context.clone());
    let model = match load_model(cli)? {
        Some(m) => m,
        None => ModelFile::new(maximal_model_for(&context, &TruthPerspective::identity())),
    };
    let claim = if harmonic {
        Claim::harmonic(context, premises, conclusion)
    } else {
        let scope = match cli.perspective.as_deref() {
            None | Some("sampled") => PerspectiveScope::Sampled,
            Some(spec) => match spec.strip_prefix("per-agent:") {
                Some(l) => PerspectiveScope::Agent(files::parse_label(l)?),
                None => PerspectiveScope::Fixed(model.named_perspective(spec)?),
            },
        };
        Claim::consequence(context, premises, conclusion, scope)
    };
    let base =
        crate::judgments::SamplerConfig::new(cli.seed.unwrap_or(0), cli.samples.unwrap_or(200));
    let mut rounds_run = Vec::new();
    let mut found: Option<(Verdict, u64)> = None;
    let mut exhausted = 0;
    for r in 0..rounds.max(1) {
        let mut cfg = base.clone();
        cfg.seed = base.seed.wrapping_add(r);
        match check_consequence(&claim, &model.quasi_model, &cfg) {
            Ok(v) => {
                rounds_run.push((cfg.seed, v.to_string()));
                if v.found_counterexample() {
                    found = Some((v, cfg.seed));
                    break;
                }
            }
            Err(HoloqError::SamplerExhausted { .. }) => {
                exhausted += 1;
                rounds_run.push((cfg.seed, "no sample made the premises true".into()));
            }
            Err(e) => return Err(e),
        }
    }
    if exhausted == rounds_run.len() {
        return Err(HoloqError::SamplerExhausted {
            samples: base.samples * rounds_run.len(),
        });
    }
    let written = match (&found, replay) {
        (Some((v, _)), Some(path)) => {
            save_replay(v.counterexample().expect("found"), path)?;
            Some(path.to_path_buf())
        }
        _ => None,
    };
    let code = if found.is_some() {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_OK
    };
    let cx: Option<&Counterexample> = found.as_ref().and_then(|(v, _)| v.counterexample());
    let out = if cli.json {
        to_json(&json!({
            "claim": claim.to_string(),
            "kind": claim.kind.name(),
            "rounds": rounds_run.iter().map(|(s, t)| json!({"seed": s, "result": t})).collect::<Vec<_>>(),
            "counterexample": cx.map(|c| json!({
                "seed": found.as_ref().map(|(_, s)| *s),
                "sample_index": c.sample_index,
                "perspective": c.perspective.to_string(),
                "premise_probabilities": c.premise_probabilities,
                "conclusion_probability": c.conclusion_probability,
                "replay": replay_to_json_value(c),
            })),
            "replay_file": written.as_ref().map(|p| p.display().to_string()),
        }))
    } else {
        let mut out = format!("claim: {claim}\n");
        for (seed, t) in &rounds_run {
            out.push_str(&format!("seed {seed}: {t}\n"));
        }
        match cx {
            Some(c) => {
                out.push_str(&format!(
                    "countermodel: perspective {}, conclusion p = {}\n",
                    c.perspective,
                    fmt_probability(c.conclusion_probability)
                ));
                out.push_str(&format!("top: {}\n", describe(&c.top)));
            }
            None => out.push_str("no countermodel found\n"),
        }
        if let Some(p) = &written {
            out.push_str(&format!("replay written to {}\n", p.display()));
        }
        out
    };
    Ok(Output::ok(code, out))
}

fn replay_to_json_value(c: &Counterexample) -> Value {
    serde_json::from_str(&replay_to_json(c)).expect("replay is JSON")
}
