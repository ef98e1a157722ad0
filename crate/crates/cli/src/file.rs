//! The on-disk model format: one JSON document per model, with named states
//! and agents. Topologies are stored as subbases and regenerated on load.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use topoev::models::{
    ev_pseudo_of_rel, group_of_mask, rel_of_standard_pseudo, rel_of_topo, topo_of_rel, validate_ev_pseudo,
    validate_kb_pseudo, validate_relational, validate_topo,
};
use topoev::representation::{evidence_from_kb, kb_from_evidence};
use topoev::topology::{generate_topology, Partition};
use topoev::{
    parse_group, Error, EvPseudoModel, KBPseudoModel, Label, Relation, RelationalEvidenceModel, Result, Signature,
    StateSet, TopoEModel, Valuation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Topo,
    Relational,
    #[value(name = "ev_pseudo", alias = "ev-pseudo")]
    EvPseudo,
    #[value(name = "kb_pseudo", alias = "kb-pseudo")]
    KbPseudo,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Topo => "topo",
            Kind::Relational => "relational",
            Kind::EvPseudo => "ev_pseudo",
            Kind::KbPseudo => "kb_pseudo",
        }
    }
}

pub type Edge = [String; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopoAgent {
    pub name: String,
    pub partition: Vec<Vec<String>>,
    pub subbasis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelAgent {
    pub name: String,
    pub leq: Vec<Edge>,
    pub sim: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvGroup {
    /// Group literal such as `{a,b}` or `{A}`.
    pub group: String,
    pub leq: Vec<Edge>,
    pub sim: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbGroup {
    pub group: String,
    pub know: Vec<Edge>,
    pub believe: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureName {
    Full,
    Fragment,
}

impl From<Signature> for SignatureName {
    fn from(s: Signature) -> Self {
        match s {
            Signature::Full => SignatureName::Full,
            Signature::Fragment => SignatureName::Fragment,
        }
    }
}

impl From<SignatureName> for Signature {
    fn from(s: SignatureName) -> Self {
        match s {
            SignatureName::Full => Signature::Full,
            SignatureName::Fragment => Signature::Fragment,
        }
    }
}

/// The serialized document. Field order is the order written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelFile {
    Topo {
        states: Vec<String>,
        agents: Vec<TopoAgent>,
        valuation: BTreeMap<String, Vec<String>>,
    },
    Relational {
        states: Vec<String>,
        agents: Vec<RelAgent>,
        valuation: BTreeMap<String, Vec<String>>,
    },
    EvPseudo {
        states: Vec<String>,
        agents: Vec<String>,
        signature: SignatureName,
        relations: Vec<EvGroup>,
        valuation: BTreeMap<String, Vec<String>>,
    },
    KbPseudo {
        states: Vec<String>,
        agents: Vec<String>,
        relations: Vec<KbGroup>,
        valuation: BTreeMap<String, Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyModel {
    Topo(TopoEModel),
    Relational(RelationalEvidenceModel),
    EvPseudo(EvPseudoModel),
    KbPseudo(KBPseudoModel),
}

impl AnyModel {
    pub fn kind(&self) -> Kind {
        match self {
            AnyModel::Topo(_) => Kind::Topo,
            AnyModel::Relational(_) => Kind::Relational,
            AnyModel::EvPseudo(_) => Kind::EvPseudo,
            AnyModel::KbPseudo(_) => Kind::KbPseudo,
        }
    }

    pub fn carrier_size(&self) -> usize {
        match self {
            AnyModel::Topo(m) => m.carrier_size(),
            AnyModel::Relational(m) => m.carrier_size(),
            AnyModel::EvPseudo(m) => m.carrier_size(),
            AnyModel::KbPseudo(m) => m.carrier_size(),
        }
    }

    /// Violations of the kind's defining conditions.
    pub fn violations(&self) -> Vec<String> {
        match self {
            AnyModel::Topo(m) => validate_topo(m).violations,
            AnyModel::Relational(m) => validate_relational(m).violations,
            AnyModel::EvPseudo(m) => validate_ev_pseudo(m).violations,
            AnyModel::KbPseudo(m) => validate_kb_pseudo(m)
                .failed()
                .into_iter()
                .map(|c| match &c.counterexample {
                    Some(x) => format!("{}: {x}", c.name),
                    None => c.name.to_string(),
                })
                .collect(),
        }
    }
}

/// A model together with the names of its states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub states: Vec<String>,
    pub model: AnyModel,
}

struct Names<'a> {
    states: &'a [String],
    index: BTreeMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn new(states: &'a [String]) -> Result<Self> {
        if states.is_empty() {
            return Err(invalid("no states declared"));
        }
        let mut index = BTreeMap::new();
        for (k, s) in states.iter().enumerate() {
            if s.is_empty() {
                return Err(invalid("empty state name"));
            }
            if index.insert(s.as_str(), k).is_some() {
                return Err(invalid(format!("state `{s}` declared twice")));
            }
        }
        Ok(Names { states, index })
    }

    fn n(&self) -> usize {
        self.states.len()
    }

    fn state(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| invalid(format!("undeclared state `{name}`")))
    }

    fn set(&self, names: &[String]) -> Result<StateSet> {
        let mut s = StateSet::empty(self.n());
        for x in names {
            s.insert(self.state(x)?);
        }
        Ok(s)
    }

    fn relation(&self, edges: &[Edge]) -> Result<Relation> {
        let pairs = edges.iter().map(|[s, t]| Ok((self.state(s)?, self.state(t)?))).collect::<Result<Vec<_>>>()?;
        Relation::from_pairs(self.n(), pairs)
    }

    fn valuation(&self, v: &BTreeMap<String, Vec<String>>) -> Result<Valuation> {
        v.iter().map(|(p, xs)| Ok((p.clone(), self.set(xs)?))).collect()
    }

    fn write_set(&self, s: &StateSet) -> Vec<String> {
        s.iter().map(|x| self.states[x].clone()).collect()
    }

    fn write_relation(&self, r: &Relation) -> Vec<Edge> {
        r.pairs().map(|(s, t)| [self.states[s].clone(), self.states[t].clone()]).collect()
    }

    fn write_valuation(&self, v: &Valuation) -> BTreeMap<String, Vec<String>> {
        v.iter().map(|(p, s)| (p.clone(), self.write_set(s))).collect()
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(vec![msg.into()])
}

fn unique_agents<'a>(names: impl Iterator<Item = &'a String>) -> Result<Vec<String>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in names {
        if !seen.insert(a.as_str()) {
            return Err(invalid(format!("agent `{a}` declared twice")));
        }
        out.push(a.clone());
    }
    Ok(out)
}

fn label_name(label: Label, agents: &[String]) -> String {
    match label {
        Label::Everyone => "{A}".to_string(),
        Label::Group(mask) => group_of_mask(mask, agents).explicit(agents).to_string(),
    }
}

/// Looks up the stored label of each listed group, requiring every label to
/// appear exactly once.
fn labels_in_order(
    groups: impl Iterator<Item = String>,
    labels: &[Label],
    resolve: impl Fn(&topoev::Group) -> Result<Label>,
) -> Result<BTreeMap<Label, usize>> {
    let mut found = BTreeMap::new();
    for (k, text) in groups.enumerate() {
        let label = resolve(&parse_group(&text)?)?;
        if found.insert(label, k).is_some() {
            return Err(invalid(format!("relations for group {text} given twice")));
        }
    }
    for &l in labels {
        if !found.contains_key(&l) {
            return Err(invalid(format!("missing relations for label {l:?}")));
        }
    }
    Ok(found)
}

impl ModelFile {
    /// Builds the model without checking its kind's conditions.
    pub fn to_document_unchecked(&self) -> Result<Document> {
        let states = match self {
            ModelFile::Topo { states, .. }
            | ModelFile::Relational { states, .. }
            | ModelFile::EvPseudo { states, .. }
            | ModelFile::KbPseudo { states, .. } => states,
        };
        let names = Names::new(states)?;
        let n = names.n();
        let model = match self {
            ModelFile::Topo { agents, valuation, .. } => {
                let names_a = unique_agents(agents.iter().map(|a| &a.name))?;
                let mut partitions = Vec::new();
                let mut topologies = Vec::new();
                for a in agents {
                    let cells = a.partition.iter().map(|c| names.set(c)).collect::<Result<Vec<_>>>()?;
                    partitions.push(Partition::new(n, cells).map_err(|e| context(&a.name, e))?);
                    let sub = a.subbasis.iter().map(|c| names.set(c)).collect::<Result<Vec<_>>>()?;
                    topologies.push(generate_topology(&sub, n).map_err(|e| context(&a.name, e))?);
                }
                AnyModel::Topo(TopoEModel::new(n, names_a, partitions, topologies, names.valuation(valuation)?)?)
            }
            ModelFile::Relational { agents, valuation, .. } => {
                let names_a = unique_agents(agents.iter().map(|a| &a.name))?;
                let leq = agents.iter().map(|a| names.relation(&a.leq)).collect::<Result<Vec<_>>>()?;
                let sim = agents.iter().map(|a| names.relation(&a.sim)).collect::<Result<Vec<_>>>()?;
                AnyModel::Relational(RelationalEvidenceModel::new(n, names_a, leq, sim, names.valuation(valuation)?)?)
            }
            ModelFile::EvPseudo { agents, signature, relations, valuation, .. } => {
                let agents = unique_agents(agents.iter())?;
                let signature = Signature::from(*signature);
                let valuation = names.valuation(valuation)?;
                // A throwaway model resolves group literals to labels.
                let shape = EvPseudoModel::from_fn(n, agents.clone(), signature, Valuation::new(), |_| {
                    (Relation::empty(n), Relation::empty(n))
                })?;
                let order =
                    labels_in_order(relations.iter().map(|r| r.group.clone()), shape.labels(), |g| shape.label_for(g))?;
                let mut pairs = BTreeMap::new();
                for (&l, &k) in &order {
                    let r = &relations[k];
                    pairs.insert(l, (names.relation(&r.leq)?, names.relation(&r.sim)?));
                }
                AnyModel::EvPseudo(EvPseudoModel::from_fn(n, agents, signature, valuation, |l| pairs[&l].clone())?)
            }
            ModelFile::KbPseudo { agents, relations, valuation, .. } => {
                let agents = unique_agents(agents.iter())?;
                let k = agents.len();
                let shape = KBPseudoModel::new(
                    n,
                    agents.clone(),
                    vec![Relation::empty(n); k + 1],
                    vec![Relation::empty(n); k + 1],
                    Valuation::new(),
                )?;
                let order = labels_in_order(relations.iter().map(|r| r.group.clone()), &shape.labels(), |g| {
                    shape.label_for(g)
                })?;
                let mut know = Vec::new();
                let mut believe = Vec::new();
                for l in shape.labels() {
                    let r = &relations[order[&l]];
                    know.push(names.relation(&r.know)?);
                    believe.push(names.relation(&r.believe)?);
                }
                AnyModel::KbPseudo(KBPseudoModel::new(n, agents, know, believe, names.valuation(valuation)?)?)
            }
        };
        Ok(Document { states: states.clone(), model })
    }

    /// Builds the model and rejects it when its kind's conditions fail.
    pub fn to_document(&self) -> Result<Document> {
        let doc = self.to_document_unchecked()?;
        let v = doc.model.violations();
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        Ok(doc)
    }

    pub fn from_document(doc: &Document) -> ModelFile {
        let names = Names { states: &doc.states, index: BTreeMap::new() };
        let states = doc.states.clone();
        match &doc.model {
            AnyModel::Topo(m) => ModelFile::Topo {
                states,
                agents: m
                    .agents()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| TopoAgent {
                        name: a.clone(),
                        partition: m.partition(i).cells().iter().map(|c| names.write_set(c)).collect(),
                        subbasis: m.topology(i).subbasis().iter().map(|c| names.write_set(c)).collect(),
                    })
                    .collect(),
                valuation: names.write_valuation(m.valuation()),
            },
            AnyModel::Relational(m) => ModelFile::Relational {
                states,
                agents: m
                    .agents()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| RelAgent {
                        name: a.clone(),
                        leq: names.write_relation(m.leq(i)),
                        sim: names.write_relation(m.sim(i)),
                    })
                    .collect(),
                valuation: names.write_valuation(m.valuation()),
            },
            AnyModel::EvPseudo(m) => ModelFile::EvPseudo {
                states,
                agents: m.agents().to_vec(),
                signature: m.signature().into(),
                relations: m
                    .labels()
                    .iter()
                    .map(|&l| EvGroup {
                        group: label_name(l, m.agents()),
                        leq: names.write_relation(m.leq(l).expect("stored label")),
                        sim: names.write_relation(m.sim(l).expect("stored label")),
                    })
                    .collect(),
                valuation: names.write_valuation(m.valuation()),
            },
            AnyModel::KbPseudo(m) => ModelFile::KbPseudo {
                states,
                agents: m.agents().to_vec(),
                relations: m
                    .labels()
                    .into_iter()
                    .map(|l| KbGroup {
                        group: label_name(l, m.agents()),
                        know: names.write_relation(m.know(l).expect("stored label")),
                        believe: names.write_relation(m.believe(l).expect("stored label")),
                    })
                    .collect(),
                valuation: names.write_valuation(m.valuation()),
            },
        }
    }
}

fn context(agent: &str, e: Error) -> Error {
    match e {
        Error::Invalid(v) => Error::Invalid(v.into_iter().map(|m| format!("agent {agent}: {m}")).collect()),
        other => Error::Invalid(vec![format!("agent {agent}: {other}")]),
    }
}

/// Parses a document and validates the model.
pub fn load_str(text: &str) -> Result<Document> {
    parse_file(text)?.to_document()
}

pub fn parse_file(text: &str) -> Result<ModelFile> {
    serde_json::from_str(text).map_err(|e| invalid(format!("malformed model file: {e}")))
}

/// Indented JSON with a trailing newline. Arrays of scalars stay on one line
/// so that edge lists and state sets read as rows.
pub fn save_string(doc: &Document) -> String {
    let v = serde_json::to_value(ModelFile::from_document(doc)).expect("serializable");
    let mut s = String::new();
    write_value(&v, 0, &mut s);
    s.push('\n');
    s
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| !x.is_object() && (!x.is_array() || is_flat_leaf(x))),
        _ => true,
    }
}

fn is_flat_leaf(v: &Value) -> bool {
    matches!(v, Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Array(xs) if xs.is_empty() => out.push_str("[]"),
        Value::Array(xs) if is_flat_leaf(v) || (is_flat(v) && xs.len() <= 1) => {
            out.push('[');
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(xs) => {
            out.push_str("[\n");
            for (k, x) in xs.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if k + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (k, (key, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("serializable"));
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if k + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("serializable")),
    }
}

/// Default names `s0, s1, ...`.
pub fn default_state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// Converts between kinds, going through intermediate kinds where needed.
/// State names are kept.
pub fn convert(model: &AnyModel, to: Kind) -> Result<AnyModel> {
    use AnyModel as M;
    Ok(match (model, to) {
        (m, k) if m.kind() == k => m.clone(),
        (M::Topo(m), Kind::Relational) => M::Relational(rel_of_topo(m)?),
        (M::Relational(x), Kind::Topo) => M::Topo(topo_of_rel(x)?),
        (M::Relational(x), Kind::EvPseudo) => M::EvPseudo(ev_pseudo_of_rel(x)?),
        (M::EvPseudo(s), Kind::Relational) => M::Relational(rel_of_standard_pseudo(s)?),
        (M::EvPseudo(s), Kind::KbPseudo) => M::KbPseudo(kb_from_evidence(s)?),
        (M::KbPseudo(m), Kind::EvPseudo) => M::EvPseudo(evidence_from_kb(m)?),
        (M::Topo(_), _) => convert(&convert(model, Kind::Relational)?, to)?,
        (M::Relational(_), _) => convert(&convert(model, Kind::EvPseudo)?, to)?,
        (M::EvPseudo(_), Kind::Topo) => convert(&convert(model, Kind::Relational)?, to)?,
        (M::KbPseudo(_), _) => convert(&convert(model, Kind::EvPseudo)?, to)?,
        (M::EvPseudo(_), _) => unreachable!("all targets covered"),
    })
}
