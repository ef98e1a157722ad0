//! Batch front end: argument definitions and the commands behind them.
//!
//! Every command returns a [`Report`] instead of printing, so the binary and
//! the tests share one code path.

pub mod file;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use topoev::models::{share_update, validate_kb_pseudo};
use topoev::representation::{
    axiom_audit, bounded_sat_with, evidence_from_kb, last_pmorphism_check, search_signature, unravel, AuditConfig,
    AuditSemantics, Outcome, SatModel, SatOptions, SatSemantics, StepKind,
};
use topoev::semantics::{eval_ev_pseudo_traced, eval_kb_pseudo_traced, eval_relational_traced, eval_topo_traced};
use topoev::syntax::{closure_set, expand_kb, reduce_dynamic, DynSystem};
use topoev::{models::resolve_group, parse, parse_group, Error, Formula, Label, Modality, StateSet};

use file::{convert, default_state_names, load_str, parse_file, save_string, AnyModel, Document, Kind, ModelFile};

#[derive(Debug, Parser)]
#[command(name = "topoev", version, about = "Evidence, knowledge and belief on finite topo-e-models")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Translate knowledge and belief into evidence modalities.
    Tr,
    /// Eliminate sharing by the reduction axioms.
    Reduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Ev,
    Kb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SatSemanticsArg {
    Topo,
    #[value(name = "ev_pseudo", alias = "ev-pseudo")]
    EvPseudo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditSemanticsArg {
    Topo,
    #[value(name = "ev_pseudo", alias = "ev-pseudo")]
    EvPseudo,
    #[value(name = "kb_pseudo", alias = "kb-pseudo")]
    KbPseudo,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula on a model.
    Check {
        model: PathBuf,
        formula: String,
        /// Report the verdict at one state; exits 1 when it is false.
        #[arg(long)]
        at: Option<String>,
        /// Print the extension of every subformula.
        #[arg(long)]
        trace: bool,
    },
    /// Apply evidence sharing within a group of a topo model.
    Share {
        model: PathBuf,
        group: String,
        /// Write the updated model here and print only the diff.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Translate or reduce a formula.
    Translate {
        formula: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Reduction axioms to use.
        #[arg(long, value_enum, default_value = "ev")]
        system: SystemArg,
        /// Check that input and output agree on this model; exits 1 when not.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Convert a model to another kind, keeping state names.
    Convert {
        model: PathBuf,
        #[arg(long, value_enum)]
        to: Kind,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search for a model of a formula with few states; exits 1 when none.
    Sat {
        formula: String,
        #[arg(long, default_value_t = 4)]
        max: usize,
        #[arg(long, value_enum, default_value = "topo")]
        semantics: SatSemanticsArg,
        /// Comma-separated agents of the search signature.
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
        /// Disable symmetry pruning.
        #[arg(long)]
        naive: bool,
        /// Write the witness model here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check every axiom scheme on random models; exits 1 on any surprise.
    Audit {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_states: usize,
        #[arg(long, value_enum, value_delimiter = ',')]
        semantics: Option<Vec<AuditSemanticsArg>>,
    },
    /// List the closure set of a formula.
    Closure {
        formula: String,
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
    },
    /// Unravel a model from a state into a tree of histories.
    Unravel {
        model: PathBuf,
        state: String,
        depth: usize,
        /// Print every history.
        #[arg(long)]
        list: bool,
        /// Write the unraveled evidence pseudo-model here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a model file against its kind's conditions; exits 1 when invalid.
    Validate { model: PathBuf },
}

/// Exit code and captured output of one command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

impl Report {
    fn ok(stdout: String) -> Report {
        Report { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn with_code(code: i32, stdout: String) -> Report {
        Report { code, stdout, stderr: String::new() }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Report {
    match dispatch(cli) {
        Ok(r) => r,
        Err(e) => {
            let stderr =
                if cli.json { format!("{}\n", json!({ "error": e.to_string() })) } else { format!("error: {e}\n") };
            Report { code: EXIT_INPUT, stdout: String::new(), stderr }
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, S>(args: I) -> Report
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Report::ok(text)
            } else {
                Report { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

type Res<T> = Result<T, Error>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(vec![format!("cannot read {}: {e}", path.display())]))
}

fn write(path: &Path, text: &str) -> Res<()> {
    std::fs::write(path, text).map_err(|e| Error::Invalid(vec![format!("cannot write {}: {e}", path.display())]))
}

pub fn load(path: &Path) -> Res<Document> {
    load_str(&read(path)?).map_err(|e| match e {
        Error::Invalid(v) => Error::Invalid(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
        other => other,
    })
}

fn set_names(s: &StateSet, names: &[String]) -> Vec<String> {
    s.iter().map(|x| names[x].clone()).collect()
}

fn show_set(s: &StateSet, names: &[String]) -> String {
    format!("{{{}}}", set_names(s, names).join(","))
}

fn state_index(doc: &Document, name: &str) -> Res<usize> {
    doc.states.iter().position(|s| s == name).ok_or_else(|| Error::Invalid(vec![format!("unknown state `{name}`")]))
}

fn uses_kb(f: &Formula) -> bool {
    f.uses(Modality::K) || f.uses(Modality::B)
}

/// Rewrites a formula into the language the model kind interprets: sharing is
/// reduced away off topo models, and knowledge and belief are translated on
/// relational and evidence pseudo-models.
fn prepare(model: &AnyModel, f: &Formula) -> Res<Formula> {
    let has_share = f.uses(Modality::Share);
    Ok(match model {
        AnyModel::Topo(_) => f.clone(),
        AnyModel::Relational(_) | AnyModel::EvPseudo(_) => {
            let g = if has_share { reduce_dynamic(f, DynSystem::EvDyn)? } else { f.clone() };
            if uses_kb(&g) {
                expand_kb(&g)?
            } else {
                g
            }
        }
        AnyModel::KbPseudo(_) => {
            if has_share {
                reduce_dynamic(f, DynSystem::KBDyn)?
            } else {
                f.clone()
            }
        }
    })
}

fn evaluate(model: &AnyModel, f: &Formula) -> Res<topoev::EvalResult> {
    let g = prepare(model, f)?;
    match model {
        AnyModel::Topo(m) => eval_topo_traced(m, &g),
        AnyModel::Relational(m) => eval_relational_traced(m, &g),
        AnyModel::EvPseudo(m) => eval_ev_pseudo_traced(m, &g),
        AnyModel::KbPseudo(m) => eval_kb_pseudo_traced(m, &g),
    }
}

fn dispatch(cli: &Cli) -> Res<Report> {
    match &cli.command {
        Command::Check { model, formula, at, trace } => check(cli.json, model, formula, at.as_deref(), *trace),
        Command::Share { model, group, out } => share(cli.json, model, group, out.as_deref()),
        Command::Translate { formula, mode, system, verify } => {
            translate(cli.json, formula, *mode, *system, verify.as_deref())
        }
        Command::Convert { model, to, out } => {
            let doc = load(model)?;
            let converted = Document { states: doc.states.clone(), model: convert(&doc.model, *to)? };
            emit_model(
                cli.json,
                &converted,
                out.as_deref(),
                format!("converted {} to {}", doc.model.kind().name(), to.name()),
            )
        }
        Command::Sat { formula, max, semantics, agents, naive, out } => {
            sat(cli.json, formula, *max, *semantics, agents.clone(), *naive, out.as_deref())
        }
        Command::Audit { n, seed, max_states, semantics } => {
            audit(cli.json, *n, *seed, *max_states, semantics.as_deref())
        }
        Command::Closure { formula, agents } => closure(cli.json, formula, agents.clone()),
        Command::Unravel { model, state, depth, list, out } => {
            unravel_cmd(cli.json, model, state, *depth, *list, out.as_deref())
        }
        Command::Validate { model } => validate(cli.json, model),
    }
}

fn check(as_json: bool, path: &Path, text: &str, at: Option<&str>, trace: bool) -> Res<Report> {
    let doc = load(path)?;
    let f = parse(text)?;
    let evaluated = prepare(&doc.model, &f)?;
    let r = evaluate(&doc.model, &f)?;
    let names = &doc.states;
    let verdict = match at {
        Some(s) => Some((s.to_string(), r.extension.contains(state_index(&doc, s)?))),
        None => None,
    };
    let mut rows: Vec<(Formula, StateSet)> = r.trace.clone().unwrap_or_default().into_iter().collect();
    rows.sort_by_key(|(g, _)| (g.size(), g.to_string()));
    let code = match verdict {
        Some((_, false)) => EXIT_NEGATIVE,
        _ => EXIT_OK,
    };
    if as_json {
        let mut v = json!({
            "formula": f.to_string(),
            "evaluated": evaluated.to_string(),
            "extension": set_names(&r.extension, names),
        });
        if let Some((s, holds)) = &verdict {
            v["at"] = json!({ "state": s, "holds": holds });
        }
        if trace {
            v["trace"] = Value::Array(
                rows.iter()
                    .map(|(g, s)| json!({ "formula": g.to_string(), "extension": set_names(s, names) }))
                    .collect(),
            );
        }
        return Ok(Report::with_code(code, format!("{v}\n")));
    }
    let mut out = String::new();
    if evaluated != f {
        writeln!(out, "evaluated as: {evaluated}").unwrap();
    }
    match &verdict {
        Some((s, holds)) => writeln!(out, "{s}: {holds}").unwrap(),
        None => writeln!(out, "{}", show_set(&r.extension, names)).unwrap(),
    }
    if trace {
        let width = rows.iter().map(|(g, _)| g.to_string().len()).max().unwrap_or(0);
        for (g, s) in &rows {
            writeln!(out, "  {:<width$}  {}", g.to_string(), show_set(s, names)).unwrap();
        }
    }
    Ok(Report::with_code(code, out))
}

fn emit_model(as_json: bool, doc: &Document, out: Option<&Path>, summary: String) -> Res<Report> {
    let text = save_string(doc);
    match out {
        Some(p) => {
            write(p, &text)?;
            if as_json {
                Ok(Report::ok(format!("{}\n", json!({ "written": p.display().to_string(), "summary": summary }))))
            } else {
                Ok(Report::ok(format!("{summary}\nwritten to {}\n", p.display())))
            }
        }
        None => Ok(Report::ok(text)),
    }
}

fn share(as_json: bool, path: &Path, group: &str, out: Option<&Path>) -> Res<Report> {
    let doc = load(path)?;
    let AnyModel::Topo(m) = &doc.model else {
        return Err(Error::Unsupported(format!("share needs a topo model, got {}", doc.model.kind().name())));
    };
    let g = parse_group(group)?;
    let mask = resolve_group(&g, m.agents())?;
    let updated = share_update(m, mask)?;
    let names = &doc.states;
    let mut diff = Vec::new();
    for (i, a) in m.agents().iter().enumerate() {
        let (p0, p1) = (m.partition(i), updated.partition(i));
        if p0 != p1 {
            let cells = |p: &topoev::topology::Partition| {
                p.cells().iter().map(|c| show_set(c, names)).collect::<Vec<_>>().join(" ")
            };
            diff.push(format!("{a}: partition {} -> {}", cells(p0), cells(p1)));
        }
        let (t0, t1) = (m.topology(i), updated.topology(i));
        if t0 != t1 {
            diff.push(format!("{a}: opens {} -> {}", t0.opens().len(), t1.opens().len()));
        }
    }
    let doc2 = Document { states: doc.states.clone(), model: AnyModel::Topo(updated) };
    let text = save_string(&doc2);
    if let Some(p) = out {
        write(p, &text)?;
    }
    if as_json {
        let mut v = json!({ "group": g.to_string(), "diff": diff });
        match out {
            Some(p) => v["written"] = json!(p.display().to_string()),
            None => v["model"] = serde_json::to_value(ModelFile::from_document(&doc2)).expect("serializable"),
        }
        return Ok(Report::ok(format!("{v}\n")));
    }
    let summary = if diff.is_empty() { "no change".to_string() } else { diff.join("\n") };
    let stderr = format!("{summary}\n");
    Ok(match out {
        Some(p) => Report::ok(format!("{stderr}written to {}\n", p.display())),
        None => Report { code: EXIT_OK, stdout: text, stderr },
    })
}

fn translate(as_json: bool, text: &str, mode: Mode, system: SystemArg, verify: Option<&Path>) -> Res<Report> {
    let f = parse(text)?;
    let g = match mode {
        Mode::Tr => expand_kb(&f)?,
        Mode::Reduce => reduce_dynamic(
            &f,
            match system {
                SystemArg::Ev => DynSystem::EvDyn,
                SystemArg::Kb => DynSystem::KBDyn,
            },
        )?,
    };
    let mut code = EXIT_OK;
    let mut check = None;
    if let Some(p) = verify {
        let doc = load(p)?;
        let a = evaluate(&doc.model, &f)?.extension;
        let b = evaluate(&doc.model, &g)?.extension;
        if a != b {
            code = EXIT_NEGATIVE;
        }
        check = Some((p.display().to_string(), a == b, show_set(&a, &doc.states), show_set(&b, &doc.states)));
    }
    if as_json {
        let mut v = json!({ "input": f.to_string(), "output": g.to_string() });
        if let Some((p, same, a, b)) = &check {
            v["verify"] = json!({ "model": p, "equivalent": same, "input_extension": a, "output_extension": b });
        }
        return Ok(Report::with_code(code, format!("{v}\n")));
    }
    let mut out = format!("{g}\n");
    if let Some((p, same, a, b)) = check {
        if same {
            writeln!(out, "equivalent on {p}: {a}").unwrap();
        } else {
            writeln!(out, "NOT equivalent on {p}: {a} vs {b}").unwrap();
        }
    }
    Ok(Report::with_code(code, out))
}

fn sat(
    as_json: bool,
    text: &str,
    max: usize,
    semantics: SatSemanticsArg,
    agents: Option<Vec<String>>,
    naive: bool,
    out: Option<&Path>,
) -> Res<Report> {
    let f = parse(text)?;
    let semantics = match semantics {
        SatSemanticsArg::Topo => SatSemantics::Topo,
        SatSemanticsArg::EvPseudo => SatSemantics::EvPseudo,
    };
    let mut options = SatOptions::new(max, semantics);
    options.agents = agents;
    options.prune = !naive;
    let v = bounded_sat_with(&f, &options)?;
    let stats = json!({
        "models_examined": v.stats.models_examined,
        "steps": v.stats.steps,
        "closure_size": v.closure_size,
        "bound": v.theoretical_bound(),
    });
    match &v.outcome {
        Outcome::UnsatUpTo(k) => {
            if as_json {
                let j =
                    json!({ "verdict": "UNSAT_UP_TO", "max": k, "searched": v.searched.to_string(), "stats": stats });
                return Ok(Report::with_code(EXIT_NEGATIVE, format!("{j}\n")));
            }
            Ok(Report::with_code(
                EXIT_NEGATIVE,
                format!(
                    "UNSAT_UP_TO {k}\nsearched: {}\nmodels examined: {}, steps: {}, closure size: {} (bound {})\n",
                    v.searched,
                    v.stats.models_examined,
                    v.stats.steps,
                    v.closure_size,
                    v.theoretical_bound()
                ),
            ))
        }
        Outcome::Sat { model, state } => {
            let n = model.carrier_size();
            let states = default_state_names(n);
            let any = match model {
                SatModel::Topo(m) => AnyModel::Topo(m.clone()),
                SatModel::EvPseudo(s) => AnyModel::EvPseudo(s.clone()),
            };
            let doc = Document { states: states.clone(), model: any };
            let file_text = save_string(&doc);
            if let Some(p) = out {
                write(p, &file_text)?;
            }
            if as_json {
                let j = json!({
                    "verdict": "SAT",
                    "states": n,
                    "state": states[*state],
                    "searched": v.searched.to_string(),
                    "witness": serde_json::to_value(ModelFile::from_document(&doc)).expect("serializable"),
                    "stats": stats,
                });
                return Ok(Report::ok(format!("{j}\n")));
            }
            let mut s = format!(
                "SAT with {n} states at {}\nmodels examined: {}, steps: {}\n",
                states[*state], v.stats.models_examined, v.stats.steps
            );
            match out {
                Some(p) => writeln!(s, "witness written to {}", p.display()).unwrap(),
                None => s.push_str(&file_text),
            }
            Ok(Report::ok(s))
        }
    }
}

fn audit(
    as_json: bool,
    n: usize,
    seed: u64,
    max_states: usize,
    semantics: Option<&[AuditSemanticsArg]>,
) -> Res<Report> {
    let mut config = AuditConfig { models: n, seed, max_states, ..AuditConfig::default() };
    if let Some(list) = semantics {
        config.semantics = list
            .iter()
            .map(|s| match s {
                AuditSemanticsArg::Topo => AuditSemantics::Topo,
                AuditSemanticsArg::EvPseudo => AuditSemantics::EvPseudo,
                AuditSemanticsArg::KbPseudo => AuditSemantics::KbPseudo,
            })
            .collect();
    }
    let report = axiom_audit(&config)?;
    let code = if report.is_ok() { EXIT_OK } else { EXIT_NEGATIVE };
    if as_json {
        let schemes: Vec<Value> = report
            .schemes
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "source": s.source,
                    "expected_valid": s.expected_valid,
                    "instances": s.instances,
                    "failures": s.failures,
                    "as_expected": s.as_expected(),
                    "first_counterexample": s.first.as_ref().map(|c| json!({
                        "semantics": c.semantics.name(),
                        "model": c.model,
                        "state": c.state,
                        "instance": c.instance,
                    })),
                })
            })
            .collect();
        let models: serde_json::Map<String, Value> =
            report.models.iter().map(|(k, v)| (k.name().to_string(), json!(v))).collect();
        let j = json!({ "ok": report.is_ok(), "seed": seed, "models": models, "schemes": schemes });
        return Ok(Report::with_code(code, format!("{j}\n")));
    }
    let mut out = String::new();
    for (k, v) in &report.models {
        writeln!(out, "{}: {v} models", k.name()).unwrap();
    }
    for s in &report.schemes {
        let tag = if s.as_expected() { "ok  " } else { "FAIL" };
        let exp = if s.expected_valid { "valid" } else { "invalid" };
        writeln!(
            out,
            "{tag} {:<56} {exp:<7} {:>8} instances {:>6} failures  ({})",
            s.name, s.instances, s.failures, s.source
        )
        .unwrap();
        if let Some(c) = &s.first {
            if !s.as_expected() || !s.expected_valid {
                writeln!(out, "       e.g. {} model {} state {}: {}", c.semantics.name(), c.model, c.state, c.instance)
                    .unwrap();
            }
        }
    }
    writeln!(out, "{}", if report.is_ok() { "audit passed" } else { "audit FAILED" }).unwrap();
    Ok(Report::with_code(code, out))
}

fn closure(as_json: bool, text: &str, agents: Option<Vec<String>>) -> Res<Report> {
    let f = parse(text)?;
    let universe = match agents {
        Some(a) => a,
        None => search_signature(&f).1,
    };
    let set = closure_set(&f, &universe)?;
    let mut list: Vec<&Formula> = set.iter().collect();
    list.sort_by_key(|g| (g.size(), g.to_string()));
    if as_json {
        let j = json!({
            "formula": f.to_string(),
            "agents": universe,
            "size": list.len(),
            "closure": list.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        });
        return Ok(Report::ok(format!("{j}\n")));
    }
    let mut out = String::new();
    for g in &list {
        writeln!(out, "{g}").unwrap();
    }
    writeln!(out, "{} formulas over agents {}", list.len(), universe.join(",")).unwrap();
    Ok(Report::ok(out))
}

fn unravel_cmd(as_json: bool, path: &Path, state: &str, depth: usize, list: bool, out: Option<&Path>) -> Res<Report> {
    let doc = load(path)?;
    let s0 = state_index(&doc, state)?;
    let pseudo = match &doc.model {
        AnyModel::KbPseudo(m) => evidence_from_kb(m)?,
        other => match convert(other, Kind::EvPseudo)? {
            AnyModel::EvPseudo(s) => s,
            _ => unreachable!("converted to ev_pseudo"),
        },
    };
    let u = unravel(&pseudo, s0, depth)?;
    let report = last_pmorphism_check(&u, &pseudo)?;
    let agents = pseudo.agents();
    let label = |l: Label| match l {
        Label::Everyone => "A".to_string(),
        Label::Group(m) => topoev::models::members(m).map(|i| agents[i].clone()).collect::<Vec<_>>().join(","),
    };
    let names: Vec<String> = u
        .histories()
        .iter()
        .map(|h| {
            let mut s = doc.states[h.root].clone();
            for st in &h.steps {
                let rel = if st.kind == StepKind::P { "<=" } else { "~" };
                write!(s, " {rel}{} {}", label(st.label), doc.states[st.state]).unwrap();
            }
            s
        })
        .collect();
    if let Some(p) = out {
        let tree = Document { states: names.clone(), model: AnyModel::EvPseudo(u.pseudo().clone()) };
        write(p, &save_string(&tree))?;
    }
    let code = if report.is_ok() { EXIT_OK } else { EXIT_NEGATIVE };
    if as_json {
        let mut j = json!({
            "root": state,
            "depth": depth,
            "histories": names.len(),
            "frontier": report.frontier,
            "pairs_checked": report.pairs_checked,
            "atom_violations": report.atom_violations,
            "forth_violations": report.forth_violations,
            "back_violations": report.back_violations,
            "ok": report.is_ok(),
        });
        if list {
            j["list"] = json!(names);
        }
        return Ok(Report::with_code(code, format!("{j}\n")));
    }
    let mut s =
        format!("{} histories of length <= {depth} from {state} ({} at the frontier)\n", names.len(), report.frontier);
    writeln!(
        s,
        "last map: {} atom, {} forth, {} back violations over {} pairs",
        report.atom_violations.len(),
        report.forth_violations.len(),
        report.back_violations.len(),
        report.pairs_checked
    )
    .unwrap();
    for v in report.atom_violations.iter().chain(&report.forth_violations).chain(&report.back_violations).take(10) {
        writeln!(s, "  {v}").unwrap();
    }
    if list {
        for n in &names {
            writeln!(s, "{n}").unwrap();
        }
    }
    if let Some(p) = out {
        writeln!(s, "written to {}", p.display()).unwrap();
    }
    Ok(Report::with_code(code, s))
}

fn validate(as_json: bool, path: &Path) -> Res<Report> {
    let doc = parse_file(&read(path)?)?.to_document_unchecked()?;
    let kind = doc.model.kind().name();
    let violations = doc.model.violations();
    let code = if violations.is_empty() { EXIT_OK } else { EXIT_NEGATIVE };
    let conditions = match &doc.model {
        AnyModel::KbPseudo(m) => validate_kb_pseudo(m).conditions.iter().map(|c| (c.name, c.passed)).collect(),
        _ => Vec::new(),
    };
    if as_json {
        let mut j = json!({ "kind": kind, "valid": violations.is_empty(), "violations": violations });
        if !conditions.is_empty() {
            j["conditions"] = Value::Array(conditions.iter().map(|(n, p)| json!({ "name": n, "passed": p })).collect());
        }
        return Ok(Report::with_code(code, format!("{j}\n")));
    }
    let mut out = String::new();
    for (n, p) in &conditions {
        writeln!(out, "{} {n}", if *p { "ok  " } else { "FAIL" }).unwrap();
    }
    if violations.is_empty() {
        writeln!(out, "valid {kind} model with {} states", doc.states.len()).unwrap();
    } else {
        writeln!(out, "invalid {kind} model:").unwrap();
        for v in &violations {
            writeln!(out, "  {v}").unwrap();
        }
    }
    Ok(Report::with_code(code, out))
}
