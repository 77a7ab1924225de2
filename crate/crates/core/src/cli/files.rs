//! Model, claim and replay files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HoloqError, Result};
use crate::gatelib::{
    Den, Domain, EpistemicOp, EpistemicSituation, Fallback, KrausMap, Preset, PresetKind,
    QuasiModel, Realization, TableMap, TruthPerspective,
};
use crate::holistic::{evaluate, HolisticEvaluation, ModelAssignment};
use crate::judgments::{
    Claim, ClaimKind, Counterexample, Generator, PerspectiveScope, SamplerConfig,
};
use crate::lang::{parse_sentence, EpistemicKind, Label, Sentence};
use crate::qlin::{c, max_entry_distance, CMatrix, Ket, Qumix};

pub const MODEL_VERSION: &str = "holoq-model/1";
pub const REPLAY_VERSION: &str = "holoq-replay/1";

fn bad(msg: impl Into<String>) -> HoloqError {
    HoloqError::ModelFile(msg.into())
}

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerspectiveJson {
    Name(String),
    Matrix(MatrixJson),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateJson {
    Ket(Vec<[f64; 2]>),
    Matrix(MatrixJson),
    /// Computational basis bit string such as `"010"`.
    Basis(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainJson {
    Keyword(String),
    Listed(Vec<StateJson>),
}

impl Default for DomainJson {
    fn default() -> Self {
        DomainJson::Keyword("all".into())
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FallbackJson {
    #[default]
    Identity,
    Error,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OpJson {
    Kraus {
        arities: BTreeMap<String, Vec<MatrixJson>>,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arity: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arities: Option<Vec<usize>>,
        pairs: Vec<[StateJson; 2]>,
        #[serde(default)]
        fallback: FallbackJson,
    },
    Preset {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis: Option<PerspectiveJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strength: Option<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsitJson {
    pub agent: String,
    pub time: String,
    pub perspective: PerspectiveJson,
    #[serde(default)]
    pub domain: DomainJson,
    pub understand: OpJson,
    pub know: OpJson,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenJson {
    #[serde(default)]
    pub agents: BTreeMap<String, String>,
    #[serde(default)]
    pub times: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub version: String,
    #[serde(default)]
    pub times: Vec<String>,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub perspectives: BTreeMap<String, MatrixJson>,
    #[serde(default)]
    pub epsit: Vec<EpsitJson>,
    #[serde(default)]
    pub den: DenJson,
    #[serde(default)]
    pub assignments: BTreeMap<String, BTreeMap<String, StateJson>>,
}

fn matrix_from_json(m: &MatrixJson) -> Result<CMatrix> {
    let rows = m.len();
    if rows == 0 || m.iter().any(|r| r.len() != rows) {
        return Err(bad("matrix must be square and nonempty"));
    }
    Ok(CMatrix::from_fn(rows, rows, |r, k| {
        c(m[r][k][0], m[r][k][1])
    }))
}

fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|k| [m[(r, k)].re, m[(r, k)].im])
                .collect()
        })
        .collect()
}

pub fn state_from_json(s: &StateJson) -> Result<Qumix> {
    match s {
        StateJson::Ket(v) => Ok(Qumix::pure(&Ket::new(
            v.iter().map(|z| c(z[0], z[1])).collect(),
        )?)),
        StateJson::Matrix(m) => Qumix::from_matrix(matrix_from_json(m)?),
        StateJson::Basis(bits) => Ok(Qumix::pure(&Ket::basis(bits)?)),
    }
}

pub fn state_to_json(rho: &Qumix) -> StateJson {
    StateJson::Matrix(matrix_to_json(rho.matrix()))
}

/// A quasi-model together with top-level assignments and named perspectives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelFile {
    pub quasi_model: QuasiModel,
    pub assignment: ModelAssignment,
    pub perspectives: BTreeMap<String, TruthPerspective>,
}

impl ModelFile {
    pub fn new(quasi_model: QuasiModel) -> Self {
        ModelFile {
            quasi_model,
            ..Self::default()
        }
    }

    /// Resolves `I`, `H`, `X` or a name from the file's `perspectives`.
    pub fn named_perspective(&self, name: &str) -> Result<TruthPerspective> {
        TruthPerspective::preset(name)
            .or_else(|| self.perspectives.get(name).cloned())
            .ok_or_else(|| HoloqError::Unresolved(format!("perspective `{name}`")))
    }

    fn perspective_from_json(&self, p: &PerspectiveJson) -> Result<TruthPerspective> {
        match p {
            PerspectiveJson::Name(n) => self.named_perspective(n),
            PerspectiveJson::Matrix(m) => TruthPerspective::from_matrix(matrix_from_json(m)?),
        }
    }

    fn perspective_to_json(&self, p: &TruthPerspective) -> PerspectiveJson {
        if let Some(n) = p.preset_name() {
            return PerspectiveJson::Name(n.into());
        }
        match self.perspective_name(p) {
            Some(n) => PerspectiveJson::Name(n),
            None => PerspectiveJson::Matrix(matrix_to_json(p.matrix())),
        }
    }

    /// Name under which `p` is known to this file, if any.
    pub fn perspective_name(&self, p: &TruthPerspective) -> Option<String> {
        if let Some(n) = p.preset_name() {
            return Some(n.into());
        }
        self.perspectives
            .iter()
            .find(|(_, q)| max_entry_distance(q.matrix(), p.matrix()) < 1e-12)
            .map(|(n, _)| n.clone())
    }

    /// Top meaning assigned to `s` under a key resolving to `p`.
    pub fn top_for(&self, s: &Sentence, p: &TruthPerspective) -> Result<&Qumix> {
        for (t, key, rho) in self.assignment.iter() {
            if t == s {
                if let Ok(q) = self.named_perspective(key) {
                    if max_entry_distance(q.matrix(), p.matrix()) < 1e-12 {
                        return Ok(rho);
                    }
                }
            }
        }
        Err(HoloqError::MissingAssignment {
            sentence: s.to_string(),
            perspective: p.to_string(),
        })
    }

    pub fn evaluate(&self, s: &Sentence, p: &TruthPerspective) -> Result<HolisticEvaluation> {
        evaluate(&self.quasi_model, p, s, self.top_for(s, p)?)
    }

    fn op_from_json(
        &self,
        kind: EpistemicKind,
        label: &Label,
        perspective: &TruthPerspective,
        op: &OpJson,
    ) -> Result<EpistemicOp> {
        let realization = match op {
            OpJson::Kraus { arities } => {
                let mut map = BTreeMap::new();
                for (k, ops) in arities {
                    let n: usize = k
                        .parse()
                        .map_err(|_| bad(format!("arity key `{k}` is not a number")))?;
                    map.insert(
                        n,
                        ops.iter()
                            .map(matrix_from_json)
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                Realization::Kraus(KrausMap::new(map)?)
            }
            OpJson::Table {
                arity,
                arities,
                pairs,
                fallback,
            } => {
                let list: Vec<usize> = match (arity, arities) {
                    (Some(a), None) => vec![*a],
                    (None, Some(v)) => v.clone(),
                    _ => return Err(bad("table needs exactly one of `arity` and `arities`")),
                };
                let pairs = pairs
                    .iter()
                    .map(|[i, o]| Ok((state_from_json(i)?, state_from_json(o)?)))
                    .collect::<Result<Vec<_>>>()?;
                let fallback = match fallback {
                    FallbackJson::Identity => Fallback::Identity,
                    FallbackJson::Error => Fallback::Error,
                };
                Realization::Table(TableMap::with_arities(&list, pairs, fallback)?)
            }
            OpJson::Preset {
                name,
                basis,
                strength,
            } => {
                let kind = PresetKind::from_name(name)
                    .ok_or_else(|| bad(format!("unknown preset `{name}`")))?;
                let basis = match basis {
                    Some(b) => self.perspective_from_json(b)?,
                    None => perspective.clone(),
                };
                let mut preset = Preset::new(kind, basis);
                preset.strength = strength.unwrap_or(0.0);
                Realization::Preset(preset)
            }
        };
        Ok(EpistemicOp::new(kind, label.clone(), realization))
    }

    fn op_to_json(&self, op: &EpistemicOp) -> OpJson {
        match &op.realization {
            Realization::Kraus(k) => OpJson::Kraus {
                arities: k
                    .arities()
                    .iter()
                    .map(|(n, ops)| (n.to_string(), ops.iter().map(matrix_to_json).collect()))
                    .collect(),
            },
            Realization::Table(t) => {
                let (arity, arities) = match t.arities() {
                    [a] => (Some(*a), None),
                    many => (None, Some(many.to_vec())),
                };
                OpJson::Table {
                    arity,
                    arities,
                    pairs: t
                        .pairs()
                        .iter()
                        .map(|(i, o)| [state_to_json(i), state_to_json(o)])
                        .collect(),
                    fallback: match t.fallback() {
                        Fallback::Identity => FallbackJson::Identity,
                        Fallback::Error => FallbackJson::Error,
                    },
                }
            }
            Realization::Preset(p) => OpJson::Preset {
                name: p.kind.name().into(),
                basis: Some(self.perspective_to_json(&p.basis)),
                strength: (p.kind == PresetKind::Depolarize).then_some(p.strength),
            },
        }
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let raw: ModelJson = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
        if raw.version != MODEL_VERSION {
            return Err(bad(format!(
                "unsupported version `{}`; expected `{MODEL_VERSION}`",
                raw.version
            )));
        }
        let mut file = ModelFile::default();
        for (name, m) in &raw.perspectives {
            file.perspectives.insert(
                name.clone(),
                TruthPerspective::from_matrix(matrix_from_json(m)?)?,
            );
        }
        let mut qm = QuasiModel::new();
        qm.agents = raw.agents.clone();
        qm.times = raw.times.clone();
        for e in &raw.epsit {
            if !raw.agents.contains(&e.agent) {
                return Err(bad(format!("epsit agent `{}` is not declared", e.agent)));
            }
            if !raw.times.contains(&e.time) {
                return Err(bad(format!("epsit time `{}` is not declared", e.time)));
            }
            let p = file.perspective_from_json(&e.perspective)?;
            let label = Label::new(e.agent.as_str(), e.time.as_str());
            let domain = match &e.domain {
                DomainJson::Keyword(w) if w == "all" => Domain::All,
                DomainJson::Keyword(w) => return Err(bad(format!("unknown domain `{w}`"))),
                DomainJson::Listed(states) => Domain::Listed(
                    states
                        .iter()
                        .map(state_from_json)
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            let mut u = file.op_from_json(EpistemicKind::Understands, &label, &p, &e.understand)?;
            let mut k = file.op_from_json(EpistemicKind::Knows, &label, &p, &e.know)?;
            u.domain = domain.clone();
            k.domain = domain.clone();
            let mut s = EpistemicSituation::with_ops(&e.agent, &e.time, p, u, k);
            s.domain = domain;
            qm.insert(s);
        }
        for (name, target) in &raw.den.agents {
            if !raw.agents.contains(target) {
                return Err(bad(format!(
                    "den maps `{name}` to undeclared agent `{target}`"
                )));
            }
        }
        for (name, target) in &raw.den.times {
            if !raw.times.contains(target) {
                return Err(bad(format!(
                    "den maps `{name}` to undeclared time `{target}`"
                )));
            }
        }
        qm.den = Den {
            agents: raw.den.agents.clone(),
            times: raw.den.times.clone(),
        };
        file.quasi_model = qm;
        for (text, per) in &raw.assignments {
            let s = parse_sentence(text)?;
            for (key, state) in per {
                file.named_perspective(key)?;
                file.assignment.insert(&s, key, state_from_json(state)?)?;
            }
        }
        Ok(file)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let qm = &self.quasi_model;
        let epsit = qm
            .situations
            .values()
            .map(|s| EpsitJson {
                agent: s.agent.clone(),
                time: s.time.clone(),
                perspective: self.perspective_to_json(&s.perspective),
                domain: match &s.domain {
                    Domain::All => DomainJson::default(),
                    Domain::Listed(v) => DomainJson::Listed(v.iter().map(state_to_json).collect()),
                },
                understand: self.op_to_json(&s.understand),
                know: self.op_to_json(&s.know),
            })
            .collect();
        let mut assignments: BTreeMap<String, BTreeMap<String, StateJson>> = BTreeMap::new();
        for (s, key, rho) in self.assignment.iter() {
            assignments
                .entry(s.to_string())
                .or_default()
                .insert(key.to_string(), state_to_json(rho));
        }
        let raw = ModelJson {
            version: MODEL_VERSION.into(),
            times: qm.times.clone(),
            agents: qm.agents.clone(),
            perspectives: self
                .perspectives
                .iter()
                .map(|(n, p)| (n.clone(), matrix_to_json(p.matrix())))
                .collect(),
            epsit,
            den: DenJson {
                agents: qm.den.agents.clone(),
                times: qm.den.times.clone(),
            },
            assignments,
        };
        serde_json::to_value(raw).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(text)?)
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("value prints")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Resolves a perspective argument: `I`, `H`, `X`, a named perspective,
    /// or `per-agent:a@t`.
    pub fn resolve_perspective(&self, spec: &str) -> Result<TruthPerspective> {
        match spec.strip_prefix("per-agent:") {
            Some(l) => Ok(self
                .quasi_model
                .resolve(&parse_label(l)?)?
                .perspective
                .clone()),
            None => self.named_perspective(spec),
        }
    }
}

/// Parses `agent@time`.
pub fn parse_label(text: &str) -> Result<Label> {
    match text.split_once('@') {
        Some((a, t)) if !a.is_empty() && !t.is_empty() => Ok(Label::new(a, t)),
        _ => Err(bad(format!("expected `agent@time`, found `{text}`"))),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PremisesJson {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Path(String),
    Inline(serde_json::Value),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimJson {
    pub kind: String,
    pub context: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<PremisesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perspective: Option<PerspectiveJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasi_model: Option<ModelRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerJson>,
}

/// A claim with its quasi-model and sampler settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimFile {
    pub claim: Claim,
    pub model: ModelFile,
    pub sampler: SamplerConfig,
}

impl ClaimFile {
    /// Parses a claim; a `quasi_model` path is read relative to `base`.
    pub fn from_json_value(v: serde_json::Value, base: Option<&Path>) -> Result<Self> {
        let raw: ClaimJson = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
        let model = match &raw.quasi_model {
            None => ModelFile::default(),
            Some(ModelRef::Inline(v)) => ModelFile::from_json_value(v.clone())?,
            Some(ModelRef::Path(p)) => {
                let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
                ModelFile::load(&path)?
            }
        };
        let kind = ClaimKind::from_name(&raw.kind)
            .ok_or_else(|| bad(format!("unknown claim kind `{}`", raw.kind)))?;
        let context = parse_sentence(&raw.context)?;
        let premises = match &raw.alpha {
            None => Vec::new(),
            Some(PremisesJson::One(s)) => vec![parse_sentence(s)?],
            Some(PremisesJson::Many(v)) => {
                v.iter().map(|s| parse_sentence(s)).collect::<Result<_>>()?
            }
        };
        let conclusion = match &raw.beta {
            Some(b) => parse_sentence(b)?,
            None => context.clone(),
        };
        if matches!(kind, ClaimKind::Truth | ClaimKind::ContextualTruth) && !premises.is_empty() {
            return Err(bad("truth claims take no `alpha`"));
        }
        if matches!(
            kind,
            ClaimKind::Consequence | ClaimKind::HarmonicConsequence
        ) && raw.beta.is_none()
        {
            return Err(bad("consequence claims need `beta`"));
        }
        let scope = match &raw.perspective {
            None => PerspectiveScope::Sampled,
            Some(PerspectiveJson::Name(n)) if n == "sampled" => PerspectiveScope::Sampled,
            Some(PerspectiveJson::Name(n)) => match n.strip_prefix("per-agent:") {
                Some(l) => PerspectiveScope::Agent(parse_label(l)?),
                None => PerspectiveScope::Fixed(model.named_perspective(n)?),
            },
            Some(PerspectiveJson::Matrix(m)) => {
                PerspectiveScope::Fixed(TruthPerspective::from_matrix(matrix_from_json(m)?)?)
            }
        };
        let mut sampler = SamplerConfig::default();
        if let Some(s) = &raw.sampler {
            if let Some(seed) = s.seed {
                sampler.seed = seed;
            }
            if let Some(count) = s.count {
                sampler.samples = count;
            }
            if let Some(g) = &s.generators {
                sampler.generators = g
                    .iter()
                    .map(|n| {
                        Generator::from_name(n)
                            .ok_or_else(|| bad(format!("unknown generator `{n}`")))
                    })
                    .collect::<Result<_>>()?;
            }
        }
        let claim = Claim {
            kind,
            context,
            premises,
            conclusion,
            scope,
        };
        Ok(ClaimFile {
            claim,
            model,
            sampler,
        })
    }

    /// JSON form with the quasi-model inlined.
    pub fn to_json_value(&self) -> serde_json::Value {
        claim_json(&self.claim, &self.model, Some(&self.sampler))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_json_value(v, path.parent())
    }
}

fn claim_json(
    claim: &Claim,
    model: &ModelFile,
    sampler: Option<&SamplerConfig>,
) -> serde_json::Value {
    let premises = match claim.premises.as_slice() {
        [] => None,
        [one] => Some(PremisesJson::One(one.to_string())),
        many => Some(PremisesJson::Many(
            many.iter().map(|s| s.to_string()).collect(),
        )),
    };
    let beta = match claim.kind {
        ClaimKind::Truth => None,
        _ => Some(claim.conclusion.to_string()),
    };
    let perspective = Some(match &claim.scope {
        PerspectiveScope::Sampled => PerspectiveJson::Name("sampled".into()),
        PerspectiveScope::Agent(l) => PerspectiveJson::Name(format!("per-agent:{l}")),
        PerspectiveScope::Fixed(p) => model.perspective_to_json(p),
    });
    let raw = ClaimJson {
        kind: claim.kind.name().into(),
        context: claim.context.to_string(),
        alpha: premises,
        beta,
        perspective,
        quasi_model: Some(ModelRef::Inline(model.to_json_value())),
        sampler: sampler.map(|s| SamplerJson {
            seed: Some(s.seed),
            count: Some(s.samples),
            generators: Some(s.generators.iter().map(|g| g.name().to_string()).collect()),
        }),
    };
    serde_json::to_value(raw).expect("claim serializes")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilitiesJson {
    pub premises: Vec<f64>,
    pub conclusion: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayJson {
    pub version: String,
    pub claim: serde_json::Value,
    pub perspective: PerspectiveJson,
    pub top: StateJson,
    #[serde(default)]
    pub sample_index: Option<usize>,
    pub probabilities: ProbabilitiesJson,
}

/// Key under which a replay stores its perspective when it is not a preset.
const REPLAY_PERSPECTIVE: &str = "replay";

/// Serializes a counterexample; the model inside also carries the top
/// meaning as an assignment, so it can be evaluated on its own.
pub fn replay_to_json(cx: &Counterexample) -> String {
    let mut model = ModelFile::new(cx.model.clone());
    let key = match cx.perspective.preset_name() {
        Some(n) => n.to_string(),
        None => {
            model
                .perspectives
                .insert(REPLAY_PERSPECTIVE.into(), cx.perspective.clone());
            REPLAY_PERSPECTIVE.into()
        }
    };
    model
        .assignment
        .insert(&cx.claim.context, &key, cx.top.clone())
        .expect("top lives on the context's qubits");
    let raw = ReplayJson {
        version: REPLAY_VERSION.into(),
        claim: claim_json(&cx.claim, &model, None),
        perspective: model.perspective_to_json(&cx.perspective),
        top: state_to_json(&cx.top),
        sample_index: cx.sample_index,
        probabilities: ProbabilitiesJson {
            premises: cx.premise_probabilities.clone(),
            conclusion: cx.conclusion_probability,
        },
    };
    serde_json::to_string_pretty(&serde_json::to_value(raw).expect("replay serializes"))
        .expect("value prints")
}

pub fn replay_from_json(text: &str) -> Result<Counterexample> {
    let raw: ReplayJson = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if raw.version != REPLAY_VERSION {
        return Err(bad(format!(
            "unsupported version `{}`; expected `{REPLAY_VERSION}`",
            raw.version
        )));
    }
    let cf = ClaimFile::from_json_value(raw.claim, None)?;
    let perspective = cf.model.perspective_from_json(&raw.perspective)?;
    Ok(Counterexample {
        claim: cf.claim,
        model: cf.model.quasi_model,
        perspective,
        top: state_from_json(&raw.top)?,
        sample_index: raw.sample_index,
        premise_probabilities: raw.probabilities.premises,
        conclusion_probability: raw.probabilities.conclusion,
    })
}

pub fn save_replay(cx: &Counterexample, path: &Path) -> Result<()> {
    std::fs::write(path, replay_to_json(cx) + "\n")?;
    Ok(())
}

pub fn load_replay(path: &Path) -> Result<Counterexample> {
    replay_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED_MODEL: &str = r#"{
        "version": "holoq-model/1",
        "times": ["t"],
        "agents": ["a"],
        "epsit": [{
            "agent": "a", "time": "t", "perspective": "I",
            "understand": {"kind": "preset", "name": "identity"},
            "know": {"kind": "preset", "name": "identity"}
        }],
        "assignments": {
            "K[a@t] not T(q, not q, f)": {
                "I": {"ket": [[0.5,0],[0,0],[0.5,0],[0,0],[0.5,0],[0,0],[0.5,0],[0,0]]}
            }
        }
    }"#;

    #[test]
    fn loads_and_evaluates() {
        let m = ModelFile::from_json(WORKED_MODEL).unwrap();
        let s = parse_sentence("K[a@t] not T(q, not q, f)").unwrap();
        let ev = m.evaluate(&s, &TruthPerspective::identity()).unwrap();
        assert!((ev.probability() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let m = ModelFile::from_json(WORKED_MODEL).unwrap();
        let again = ModelFile::from_json(&m.to_json()).unwrap();
        assert_eq!(again.to_json(), m.to_json());
        assert_eq!(again.quasi_model, m.quasi_model);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ModelFile::from_json(r#"{"version": "holoq-model/2"}"#).is_err());
        let undeclared = WORKED_MODEL.replace(r#""agents": ["a"]"#, r#""agents": ["b"]"#);
        assert!(matches!(
            ModelFile::from_json(&undeclared),
            Err(HoloqError::ModelFile(_))
        ));
        let unknown = WORKED_MODEL.replace(r#""I": {"ket""#, r#""Z": {"ket""#);
        assert!(matches!(
            ModelFile::from_json(&unknown),
            Err(HoloqError::Unresolved(_))
        ));
    }

    #[test]
    fn claim_with_inline_model() {
        let v = serde_json::json!({
            "kind": "consequence",
            "context": "K[a@t] q",
            "alpha": "K[a@t] q",
            "beta": "q",
            "perspective": "per-agent:a@t",
            "quasi_model": serde_json::from_str::<serde_json::Value>(WORKED_MODEL).unwrap(),
            "sampler": {"seed": 3, "count": 10}
        });
        let cf = ClaimFile::from_json_value(v, None).unwrap();
        assert_eq!(cf.claim.premises.len(), 1);
        assert_eq!(cf.sampler.samples, 10);
        assert_eq!(
            cf.claim.scope,
            PerspectiveScope::Agent(Label::new("a", "t"))
        );
        let again = ClaimFile::from_json_value(cf.to_json_value(), None).unwrap();
        assert_eq!(again, cf);
    }
}
