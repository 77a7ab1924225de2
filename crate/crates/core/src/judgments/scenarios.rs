use std::collections::BTreeMap;
use std::fmt;

use super::{
    check_consequence, prob, state_defect, Claim, Counterexample, Generator, Outcome,
    PerspectiveScope, SamplerConfig, TRUTH_THRESHOLD,
};
use crate::error::{HoloqError, Result};
use crate::gatelib::{
    epistemic_distance, precedes, EpistemicOp, EpistemicSituation, Fallback, KrausMap, Preset,
    PresetKind, QuasiModel, Realization, TableMap, TruthPerspective,
};
use crate::holistic::evaluate;
use crate::lang::{parse_sentence, EpistemicKind, Label, OccurrencePath, Sentence};
use crate::qlin::{c, CMatrix, Qumix};
use crate::random::random_perspective;

/// Situation numbers with a short description of what each checks.
pub const SITUATIONS: [(u8, &str); 9] = [
    (1, "harmonic knowledge implies truth"),
    (2, "knowing that one knows implies knowing, not conversely"),
    (
        3,
        "knowledge implies truth under the knower's own perspective",
    ),
    (
        4,
        "knowing another's knowledge implies truth but not own knowledge",
    ),
    (5, "sound agents know t and not f"),
    (6, "knowing a conjunction without knowing a conjunct"),
    (7, "knowledge is not closed under conjunction"),
    (8, "no agent knows a contradiction"),
    (9, "an agent can know that another agent is wrong"),
];

/// Seed and sample count for scenario runs, with an optional user model
/// replacing the built-in presets where a situation allows it.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub samples: usize,
    pub model: Option<QuasiModel>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 0,
            samples: 200,
            model: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioCheck {
    pub name: String,
    pub passed: bool,
    /// Reported but not counted towards the situation's verdict.
    pub informational: bool,
    pub samples: usize,
    pub detail: String,
    pub counterexample: Option<Box<Counterexample>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub situation: u8,
    pub title: &'static str,
    pub checks: Vec<ScenarioCheck>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.informational)
            .all(|c| c.passed)
    }

    pub fn samples(&self) -> usize {
        self.checks.iter().map(|c| c.samples).sum()
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = (&str, &Counterexample)> {
        self.checks
            .iter()
            .filter_map(|c| c.counterexample.as_deref().map(|cx| (c.name.as_str(), cx)))
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        writeln!(
            f,
            "situation {}: {} ... {verdict}",
            self.situation, self.title
        )?;
        for c in &self.checks {
            let mark = match (c.passed, c.informational) {
                (true, false) => "ok",
                (false, false) => "FAILED",
                (_, true) => "info",
            };
            writeln!(f, "  [{mark}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn sp(s: &str) -> Sentence {
    parse_sentence(s).expect("scenario sentences are well formed")
}

fn m2(a: [f64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &a.map(|x| c(x, 0.0)))
}

fn p0() -> CMatrix {
    m2([1.0, 0.0, 0.0, 0.0])
}

fn p1() -> CMatrix {
    m2([0.0, 0.0, 0.0, 1.0])
}

fn paulis() -> [CMatrix; 4] {
    [
        CMatrix::identity(2, 2),
        m2([0.0, 1.0, 1.0, 0.0]),
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        m2([1.0, 0.0, 0.0, -1.0]),
    ]
}

/// Two-qubit channel: if the first qubit is false, keep the state; if it
/// is true, fully depolarize the second. With `flip`, the first qubit is
/// negated afterwards.
fn forget_if_first(flip: bool) -> Vec<CMatrix> {
    let f = if flip {
        paulis()[1].clone()
    } else {
        CMatrix::identity(2, 2)
    };
    let mut ops = vec![(&f * p0()).kronecker(&CMatrix::identity(2, 2))];
    for s in paulis() {
        ops.push((&f * p1()).kronecker(&(s * c(0.5, 0.0))));
    }
    ops
}

/// Two-qubit channel resetting the first qubit to false.
fn reset_first() -> Vec<CMatrix> {
    let lower = m2([0.0, 1.0, 0.0, 0.0]);
    vec![
        p0().kronecker(&CMatrix::identity(2, 2)),
        lower.kronecker(&CMatrix::identity(2, 2)),
    ]
}

fn conj(p: &TruthPerspective, ops: Vec<CMatrix>) -> Vec<CMatrix> {
    ops.into_iter()
        .map(|k| {
            let n = (k.nrows() as f64).log2().round() as usize;
            let u = p.power(n);
            &u * k * u.adjoint()
        })
        .collect()
}

fn kraus(p: &TruthPerspective, arities: Vec<(usize, Vec<CMatrix>)>) -> Realization {
    let map: BTreeMap<usize, Vec<CMatrix>> = arities
        .into_iter()
        .map(|(n, ops)| (n, conj(p, ops)))
        .collect();
    Realization::Kraus(KrausMap::new(map).expect("scenario channels are trace preserving"))
}

fn identity_ops(n: usize) -> Vec<CMatrix> {
    vec![CMatrix::identity(1 << n, 1 << n)]
}

fn agent(name: &str, p: &TruthPerspective, r: Realization) -> EpistemicSituation {
    let l = Label::new(name, "t");
    EpistemicSituation::with_ops(
        name,
        "t",
        p.clone(),
        EpistemicOp::new(EpistemicKind::Understands, l.clone(), r.clone()),
        EpistemicOp::new(EpistemicKind::Knows, l, r),
    )
}

fn preset_agent(name: &str, p: &TruthPerspective, kind: PresetKind) -> EpistemicSituation {
    EpistemicSituation::with_preset(name, "t", p.clone(), Preset::new(kind, p.clone()))
}

fn perspectives(seed: u64) -> Vec<TruthPerspective> {
    let mut rng = SamplerConfig::new(seed, 1).rng(usize::MAX - 1);
    vec![
        TruthPerspective::identity(),
        TruthPerspective::hadamard(),
        random_perspective(&mut rng),
    ]
}

/// Knowledge operations of every situation must dominate truth at the
/// arities used, checked on 200 sampled states each.
fn require_truth_domination(qm: &QuasiModel, arities: &[usize], seed: u64) -> Result<()> {
    for (k, s) in qm.situations.values().enumerate() {
        let used: Vec<usize> = arities
            .iter()
            .copied()
            .filter(|&n| s.know.supports_arity(n))
            .collect();
        let mut rng = SamplerConfig::new(seed, 1).rng(1_000_000 + k);
        let d = s
            .know
            .truth_domination(&s.perspective, &used, 200, &mut rng);
        if !d.sound {
            return Err(HoloqError::Preset(format!(
                "{} does not dominate truth under its perspective",
                s.know
            )));
        }
    }
    Ok(())
}

fn require_harmonic(qm: &QuasiModel) -> Result<()> {
    if !qm.is_harmonic() {
        return Err(HoloqError::Preset(
            "situation needs a harmonic quasi-model".into(),
        ));
    }
    Ok(())
}

/// The first two agents (or one agent twice) and the first time of a user model.
fn user_names(qm: &QuasiModel) -> Result<(String, String, String)> {
    let a = qm
        .agents
        .first()
        .ok_or_else(|| HoloqError::Preset("model has no agents".into()))?;
    let b = qm.agents.get(1).unwrap_or(a);
    let t = qm
        .times
        .first()
        .ok_or_else(|| HoloqError::Preset("model has no times".into()))?;
    Ok((a.clone(), b.clone(), t.clone()))
}

/// Runs every claim and folds the verdicts into one check. With
/// `expect_holds`, passes iff no claim has a counterexample; otherwise
/// passes iff every claim has one and it replays.
fn run_claims(
    name: &str,
    claims: &[(Claim, QuasiModel)],
    cfg: &SamplerConfig,
    expect_holds: bool,
) -> Result<ScenarioCheck> {
    let mut samples = 0;
    let mut hits = 0;
    let mut first_cx: Option<Box<Counterexample>> = None;
    let mut found = 0;
    let mut exhausted = Vec::new();
    for (claim, qm) in claims {
        match check_consequence(claim, qm, cfg) {
            Ok(v) => {
                samples += v.accepted;
                hits += v.antecedent_hits;
                if let Outcome::CounterexampleFound(cx) = v.outcome {
                    found += 1;
                    if !cx.reproduces(1e-12)? {
                        return Err(HoloqError::Preset(format!(
                            "counterexample for {claim} does not replay"
                        )));
                    }
                    first_cx.get_or_insert(cx);
                }
            }
            Err(HoloqError::SamplerExhausted { .. }) => exhausted.push(claim.to_string()),
            Err(e) => return Err(e),
        }
    }
    let (passed, detail) = if expect_holds {
        let ok = found == 0 && exhausted.is_empty();
        let mut d = format!(
            "{} claims, {samples} accepted samples, {hits} with true premises, {found} counterexamples",
            claims.len()
        );
        if !exhausted.is_empty() {
            d.push_str(&format!("; no antecedent hit for {}", exhausted.join("; ")));
        }
        (ok, d)
    } else {
        let ok = found == claims.len();
        let d = match &first_cx {
            Some(cx) => format!(
                "countermodel: premises p = [{}], conclusion p = {} (replays)",
                cx.premise_probabilities
                    .iter()
                    .map(|&x| crate::fmt_probability(x))
                    .collect::<Vec<_>>()
                    .join(", "),
                crate::fmt_probability(cx.conclusion_probability)
            ),
            None => format!("no countermodel found in {samples} samples"),
        };
        (ok, d)
    };
    Ok(ScenarioCheck {
        name: name.to_string(),
        passed,
        informational: false,
        samples,
        detail,
        counterexample: first_cx,
    })
}

/// Harmonic models used by situations 1, 2 and 4, with the sentences'
/// agent names. `None` model means built-in presets over three perspectives.
struct Harmonic {
    models: Vec<QuasiModel>,
    a: String,
    b: String,
    t: String,
    /// Agent whose knowledge is only defined at arities 1 and 2.
    narrow: Option<String>,
}

fn harmonic_models(cfg: &ScenarioConfig) -> Result<Harmonic> {
    if let Some(qm) = &cfg.model {
        require_harmonic(qm)?;
        require_truth_domination(qm, &[1, 2, 3], cfg.seed)?;
        let (a, b, t) = user_names(qm)?;
        return Ok(Harmonic {
            models: vec![qm.clone()],
            a,
            b,
            t,
            narrow: None,
        });
    }
    let models: Vec<QuasiModel> = perspectives(cfg.seed)
        .iter()
        .map(|p| {
            QuasiModel::new()
                .with_situation(preset_agent("a", p, PresetKind::DephaseInBasis))
                .with_situation(preset_agent("b", p, PresetKind::Identity))
                .with_situation(agent(
                    "c",
                    p,
                    kraus(p, vec![(1, identity_ops(1)), (2, forget_if_first(true))]),
                ))
        })
        .collect();
    for qm in &models {
        require_truth_domination(qm, &[1, 2, 3], cfg.seed)?;
    }
    Ok(Harmonic {
        models,
        a: "a".into(),
        b: "b".into(),
        t: "t".into(),
        narrow: Some("c".into()),
    })
}

fn sampler(cfg: &ScenarioConfig) -> SamplerConfig {
    SamplerConfig::new(cfg.seed, cfg.samples.max(1))
}

const WIDE: [&str; 5] = ["q", "not q", "q (+) r", "q /\\ r", "sqrtid sqrtid q"];
const NARROW: [&str; 3] = ["q", "not q", "q (+) r"];

fn situation_1(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let h = harmonic_models(cfg)?;
    let mut claims = Vec::new();
    for qm in &h.models {
        let mut push = |x: &str, alphas: &[&str]| {
            for a in alphas {
                let k = sp(&format!("K[{x}@{}] {a}", h.t));
                claims.push((Claim::harmonic(k.clone(), vec![k], sp(a)), qm.clone()));
            }
        };
        push(&h.a, &WIDE);
        push(&h.b, &WIDE);
        push(&h.a, &[&format!("K[{}@{}] q", h.b, h.t)]);
        if let Some(c) = &h.narrow {
            push(c, &NARROW);
        }
    }
    Ok(vec![run_claims(
        "K a alpha |= alpha",
        &claims,
        &sampler(cfg),
        true,
    )?])
}

fn situation_2(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let h = harmonic_models(cfg)?;
    let mut claims = Vec::new();
    for qm in &h.models {
        let mut push = |x: &str, alphas: &[&str]| {
            for a in alphas {
                let inner = sp(&format!("K[{x}@{}] {a}", h.t));
                let outer = Sentence::Epistemic(
                    EpistemicKind::Knows,
                    Label::new(x, &h.t),
                    Box::new(inner.clone()),
                );
                claims.push((
                    Claim::harmonic(outer.clone(), vec![outer], inner),
                    qm.clone(),
                ));
            }
        };
        push(&h.a, &WIDE);
        push(&h.b, &NARROW);
    }
    let mut checks = vec![run_claims(
        "K a K a alpha |= K a alpha",
        &claims,
        &sampler(cfg),
        true,
    )?];

    // Converse: an agent that forgets once it has learned.
    let p = TruthPerspective::identity();
    let qm = QuasiModel::new().with_situation(agent(
        "a",
        &p,
        kraus(&p, vec![(1, identity_ops(1)), (2, forget_if_first(true))]),
    ));
    require_truth_domination(&qm, &[1, 2], cfg.seed)?;
    let inner = sp("K[a@t] (q (+) r)");
    let outer = sp("K[a@t] K[a@t] (q (+) r)");
    let converse = Claim::harmonic(outer.clone(), vec![inner], outer);
    checks.push(run_claims(
        "K a alpha does not entail K a K a alpha",
        &[(converse, qm)],
        &sampler(cfg),
        false,
    )?);
    Ok(checks)
}

fn situation_3(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let i = TruthPerspective::identity();
    let h = TruthPerspective::hadamard();
    let qm = match &cfg.model {
        Some(qm) => qm.clone(),
        None => QuasiModel::new()
            .with_situation(preset_agent("a", &i, PresetKind::PhaseInBasis))
            .with_situation(preset_agent("b", &h, PresetKind::DephaseInBasis)),
    };
    require_truth_domination(&qm, &[1, 2, 3], cfg.seed)?;
    let (a, b, t) = user_names(&qm)?;
    let alphas = ["q", "not q", "q (+) r", "q /\\ r"];
    let mut one = Vec::new();
    let mut two = Vec::new();
    for x in [&a, &b] {
        let scope = PerspectiveScope::Agent(Label::new(x.as_str(), t.as_str()));
        for al in alphas {
            let k = sp(&format!("K[{x}@{t}] {al}"));
            let kk = sp(&format!("K[{x}@{t}] K[{x}@{t}] {al}"));
            one.push((
                Claim::consequence(k.clone(), vec![k.clone()], sp(al), scope.clone()),
                qm.clone(),
            ));
            two.push((
                Claim::consequence(kk.clone(), vec![kk], k, scope.clone()),
                qm.clone(),
            ));
        }
    }
    let s = sampler(cfg);
    let mut checks = vec![
        run_claims(
            "3.1 K x alpha |= alpha under x's perspective",
            &one,
            &s,
            true,
        )?,
        run_claims(
            "3.2 K x K x alpha |= K x alpha under x's perspective",
            &two,
            &s,
            true,
        )?,
    ];
    if cfg.model.is_none() {
        // Judged from b's perspective, a's knowledge need not be truthful.
        let k = sp("K[a@t] q");
        let cross = Claim::consequence(
            k.clone(),
            vec![k],
            sp("q"),
            PerspectiveScope::Agent(Label::new("b", "t")),
        );
        let search = SamplerConfig::new(cfg.seed, cfg.samples.max(1))
            .with_generators(&[Generator::BackSolved]);
        let mut c = run_claims(
            "K a q |= q under b's perspective",
            &[(cross, qm)],
            &search,
            false,
        )?;
        c.informational = true;
        c.detail = format!("stronger cross-perspective form: {}", c.detail);
        checks.push(c);
    }
    Ok(checks)
}

fn situation_4(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let h = harmonic_models(cfg)?;
    let mut claims = Vec::new();
    for qm in &h.models {
        for al in WIDE {
            let g = sp(&format!("K[{}@{t}] K[{}@{t}] {al}", h.a, h.b, t = h.t));
            claims.push((Claim::harmonic(g.clone(), vec![g], sp(al)), qm.clone()));
        }
    }
    // The same claim in the model used for the negative half.
    let i = TruthPerspective::identity();
    let qm = QuasiModel::new()
        .with_situation(agent(
            "a",
            &i,
            kraus(&i, vec![(1, identity_ops(1)), (2, forget_if_first(false))]),
        ))
        .with_situation(agent(
            "b",
            &i,
            kraus(&i, vec![(1, identity_ops(1)), (2, reset_first())]),
        ));
    require_truth_domination(&qm, &[1, 2], cfg.seed)?;
    for al in NARROW {
        let g = sp(&format!("K[a@t] K[b@t] {al}"));
        claims.push((Claim::harmonic(g.clone(), vec![g], sp(al)), qm.clone()));
    }
    let mut checks = vec![run_claims(
        "K a K b alpha |= alpha",
        &claims,
        &sampler(cfg),
        true,
    )?];

    let context = sp("(K[a@t] K[b@t] (q (+) r)) (+) (K[a@t] (q (+) r))");
    let negative = Claim::harmonic(
        context,
        vec![sp("K[a@t] K[b@t] (q (+) r)")],
        sp("K[a@t] (q (+) r)"),
    );
    checks.push(run_claims(
        "K a K b alpha does not entail K a alpha",
        &[(negative, qm)],
        &sampler(cfg),
        false,
    )?);
    Ok(checks)
}

fn situation_5(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let kinds = [
        PresetKind::Identity,
        PresetKind::DephaseInBasis,
        PresetKind::PhaseInBasis,
    ];
    let mut evaluated = 0;
    let mut failures = Vec::new();
    let s = sampler(cfg);
    for k in 0..s.samples {
        let (qm, a, t) = match &cfg.model {
            Some(qm) => {
                require_harmonic(qm)?;
                let (a, _, t) = user_names(qm)?;
                (qm.clone(), a, t)
            }
            None => {
                let mut rng = s.rng(k);
                let p = match k % 4 {
                    0 => TruthPerspective::identity(),
                    1 => TruthPerspective::hadamard(),
                    _ => random_perspective(&mut rng),
                };
                let qm = QuasiModel::new()
                    .with_situation(preset_agent("a", &p, kinds[k % kinds.len()]))
                    .with_situation(preset_agent("b", &p, kinds[(k + 1) % kinds.len()]));
                (qm, "a".to_string(), "t".to_string())
            }
        };
        if !qm.is_sound() {
            return Err(HoloqError::Preset(
                "situation 5 needs agents with a sound epistemic capacity".into(),
            ));
        }
        let p = qm.shared_perspective().expect("harmonic");
        for (text, top) in [
            (format!("K[{a}@{t}] t"), p.truth()),
            (format!("K[{a}@{t}] not f"), p.falsity()),
        ] {
            let ev = evaluate(&qm, &p, &sp(&text), &top)?;
            evaluated += 1;
            if ev.probability() < TRUTH_THRESHOLD {
                failures.push(format!(
                    "{text} at sample {k}: p = {}",
                    crate::fmt_probability(ev.probability())
                ));
            }
        }
        if cfg.model.is_some() {
            break;
        }
    }
    Ok(vec![ScenarioCheck {
        name: "|= K a t and |= K a not f".into(),
        passed: failures.is_empty(),
        informational: false,
        samples: evaluated,
        detail: if failures.is_empty() {
            format!("true in all {evaluated} evaluations")
        } else {
            failures.join("; ")
        },
        counterexample: None,
    }])
}

fn situation_6(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let i = TruthPerspective::identity();
    // Identity on three qubits; on one qubit the truth is turned into falsity.
    let table = TableMap::with_arities(
        &[1, 3],
        vec![(Qumix::p1(), Qumix::p0())],
        Fallback::Identity,
    )?;
    let qm = QuasiModel::new().with_situation(agent("a", &i, Realization::Table(table)));
    let s = sampler(cfg).with_generators(&[Generator::BasisProducts, Generator::RandomMixed]);
    let mut checks = Vec::new();
    for member in ["q", "r"] {
        let context = sp(&format!("(K[a@t] (q /\\ r)) (+) (K[a@t] {member})"));
        let claim = Claim::consequence(
            context,
            vec![sp("K[a@t] (q /\\ r)")],
            sp(&format!("K[a@t] {member}")),
            PerspectiveScope::Fixed(i.clone()),
        );
        checks.push(run_claims(
            &format!("K a (q /\\ r) does not entail K a {member}"),
            &[(claim, qm.clone())],
            &s,
            false,
        )?);
    }
    Ok(checks)
}

fn situation_7(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let i = TruthPerspective::identity();
    let flip = vec![CMatrix::identity(4, 4).kronecker(&paulis()[1])];
    let qm = QuasiModel::new().with_situation(agent(
        "a",
        &i,
        kraus(&i, vec![(1, identity_ops(1)), (3, flip)]),
    ));
    let claim = Claim::consequence(
        sp("T(K[a@t] q, K[a@t] r, K[a@t] (q /\\ r))"),
        vec![sp("K[a@t] q"), sp("K[a@t] r")],
        sp("K[a@t] (q /\\ r)"),
        PerspectiveScope::Fixed(i),
    );
    Ok(vec![run_claims(
        "K a q and K a r do not give K a (q /\\ r)",
        &[(claim, qm)],
        &sampler(cfg),
        false,
    )?])
}

fn situation_8(cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let samples = cfg.samples.max(500);
    let s = SamplerConfig::new(cfg.seed, samples);
    let mut prng = s.rng(usize::MAX - 2);
    let mut ps = vec![
        TruthPerspective::identity(),
        TruthPerspective::hadamard(),
        TruthPerspective::bit_flip(),
    ];
    ps.push(random_perspective(&mut prng));
    ps.push(random_perspective(&mut prng));
    let kinds = [
        PresetKind::Identity,
        PresetKind::DephaseInBasis,
        PresetKind::PhaseInBasis,
    ];
    let (a, t) = match &cfg.model {
        Some(qm) => {
            let (a, _, t) = user_names(qm)?;
            (a, t)
        }
        None => ("a".to_string(), "t".to_string()),
    };
    let mut checks = Vec::new();
    for alpha in ["q", "q (+) r"] {
        let text = format!("K[{a}@{t}] (({alpha}) /\\ not ({alpha}))");
        let g = sp(&text);
        let layout = super::TopLayout::of(&crate::lang::SyntacticalTree::build(&g));
        let mut evaluated = 0;
        let mut max_p: f64 = 0.0;
        let mut violation = None;
        for k in 0..samples {
            let p = &ps[k % ps.len()];
            let qm = match &cfg.model {
                Some(qm) => qm.clone(),
                None => QuasiModel::new().with_situation(preset_agent(
                    "a",
                    p,
                    kinds[(k / ps.len()) % kinds.len()],
                )),
            };
            let situation = qm.resolve(&Label::new(a.as_str(), t.as_str()))?;
            let p = &situation.perspective.clone();
            let mut rng = s.rng(k);
            let top = super::sample_top(&layout, p, s.generator(k), &mut rng)?;
            let ev = match evaluate(&qm, p, &g, &top) {
                Ok(ev) => ev,
                Err(e) if super::rejectable(&e) => continue,
                Err(e) => return Err(e),
            };
            if !ev.check_normal().is_normal() {
                continue;
            }
            evaluated += 1;
            let pr = ev.probability();
            max_p = max_p.max(pr);
            if pr >= 1.0 - 1e-6 && violation.is_none() {
                violation = Some(k);
            }
        }
        if cfg.model.is_none() {
            for qm in ps
                .iter()
                .flat_map(|p| kinds.iter().map(move |&kd| preset_agent("a", p, kd)))
            {
                let qm = QuasiModel::new().with_situation(qm);
                require_truth_domination(&qm, &[layout.width], cfg.seed)?;
            }
        }
        checks.push(ScenarioCheck {
            name: format!("not |= {text}"),
            passed: violation.is_none() && evaluated >= 500.min(samples),
            informational: false,
            samples: evaluated,
            detail: match violation {
                None => format!(
                    "0 of {evaluated} models over {} perspectives reach p >= 1 - 1e-6 (max p = {})",
                    ps.len(),
                    crate::fmt_probability(max_p)
                ),
                Some(k) => format!("sample {k} reaches p = {}", crate::fmt_probability(max_p)),
            },
            counterexample: None,
        });
    }
    Ok(checks)
}

fn situation_9(_cfg: &ScenarioConfig) -> Result<Vec<ScenarioCheck>> {
    let ta = TruthPerspective::identity();
    let tb = TruthPerspective::hadamard();
    let qm = QuasiModel::new()
        .with_situation(preset_agent("a", &ta, PresetKind::Identity))
        .with_situation(EpistemicSituation::with_preset(
            "b",
            "t",
            tb.clone(),
            Preset::new(PresetKind::FlipInBasis, ta.clone()),
        ));
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(ScenarioCheck {
            name: name.into(),
            passed,
            informational: false,
            samples: 0,
            detail,
            counterexample: None,
        })
    };

    let d = epistemic_distance(&ta, &tb);
    check(
        "epistemic distance of a and b",
        d >= 0.5 - 1e-12 && precedes(&tb, &ta.truth(), &ta.falsity()),
        format!(
            "distance = {}; a's truth precedes a's falsity under b",
            crate::fmt_probability(d)
        ),
    );
    let kb = qm
        .resolve(&Label::new("b", "t"))?
        .know
        .apply(&ta.falsity())?;
    check(
        "K_b maps a's falsity to a's truth",
        state_defect(&kb, &ta.truth()) < 1e-12,
        format!("defect {:.1e}", state_defect(&kb, &ta.truth())),
    );
    let ka = qm.resolve(&Label::new("a", "t"))?.know.apply(&ta.truth())?;
    check(
        "K_a fixes a's truth",
        state_defect(&ka, &ta.truth()) < 1e-12,
        format!("defect {:.1e}", state_defect(&ka, &ta.truth())),
    );

    let s = sp("K[a@t] K[b@t] f");
    let ev = evaluate(&qm, &ta, &s, &ta.falsity())?;
    let pa = ev.probability();
    let level2 = ev.contextual_meaning(OccurrencePath::new(2, 1))?;
    let pb_level2 = prob(&tb, &level2);
    check(
        "|= K a K b f under a's perspective",
        (pa - 1.0).abs() < 1e-12,
        format!("p_a = {}", crate::fmt_probability(pa)),
    );
    check(
        "level-2 meaning is not true under b's perspective",
        pb_level2 < TRUTH_THRESHOLD,
        format!("p_b(K b f) = {}", crate::fmt_probability(pb_level2)),
    );
    let own = evaluate(&qm, &tb, &sp("K[b@t] f"), &tb.falsity())?;
    check(
        "not |= K b f under b's perspective",
        own.probability() < TRUTH_THRESHOLD,
        format!("p_b = {}", crate::fmt_probability(own.probability())),
    );
    Ok(checks)
}

/// Runs one situation (1 to 9).
pub fn run_situation(k: u8, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let (_, title) = SITUATIONS
        .iter()
        .find(|(n, _)| *n == k)
        .copied()
        .ok_or_else(|| HoloqError::Preset(format!("no situation {k}; expected 1 to 9")))?;
    let checks = match k {
        1 => situation_1(cfg)?,
        2 => situation_2(cfg)?,
        3 => situation_3(cfg)?,
        4 => situation_4(cfg)?,
        5 => situation_5(cfg)?,
        6 => situation_6(cfg)?,
        7 => situation_7(cfg)?,
        8 => situation_8(cfg)?,
        _ => situation_9(cfg)?,
    };
    Ok(ScenarioReport {
        situation: k,
        title,
        checks,
    })
}

/// Runs situations 1 to 9 with the built-in presets.
pub fn run_all(cfg: &ScenarioConfig) -> Result<Vec<ScenarioReport>> {
    (1..=9).map(|k| run_situation(k, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels_are_valid() {
        let p = TruthPerspective::hadamard();
        for ops in [forget_if_first(true), forget_if_first(false), reset_first()] {
            assert!(KrausMap::single(2, conj(&p, ops)).is_ok());
        }
    }

    #[test]
    fn situation_nine() {
        let r = run_situation(9, &ScenarioConfig::default()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn countermodel_situations() {
        let cfg = ScenarioConfig {
            samples: 60,
            ..Default::default()
        };
        for k in [6, 7] {
            let r = run_situation(k, &cfg).unwrap();
            assert!(r.passed(), "{r}");
            assert!(r.counterexamples().count() >= 1);
        }
    }

    #[test]
    fn unsound_model_rejected_for_situation_five() {
        let p = TruthPerspective::identity();
        let qm = QuasiModel::new().with_situation(preset_agent("a", &p, PresetKind::FlipInBasis));
        let cfg = ScenarioConfig {
            model: Some(qm),
            ..Default::default()
        };
        assert!(matches!(run_situation(5, &cfg), Err(HoloqError::Preset(_))));
        assert!(matches!(
            run_situation(10, &ScenarioConfig::default()),
            Err(HoloqError::Preset(_))
        ));
    }
}
