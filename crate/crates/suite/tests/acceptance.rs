//! Acceptance run: one line per criterion, non-zero exit when any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoev::fixtures::example1;
use topoev::models::{
    ev_pseudo_of_rel, full_mask, group_structure, members, rel_of_topo, share_update, validate_kb_pseudo,
};
use topoev::random::{
    agent_names, atom_names, random_ev_pseudo, random_formula, random_set, random_topo_model, FormulaSpec,
};
use topoev::representation::{
    axiom_audit, bounded_sat, bounded_sat_with, evidence_from_kb, kb_from_evidence, last_pmorphism_check, unravel,
    AuditConfig, Outcome, SatOptions, SatSemantics,
};
use topoev::semantics::{knowledge_dense_interior, op_table};
use topoev::syntax::{expand_kb, reduce_dynamic, DynSystem};
use topoev::{
    eval_ev_pseudo, eval_kb_pseudo, eval_relational, eval_topo, parse, Formula, Modality, Signature, StateSet,
    TopoEModel,
};
use topoev_cli::file::{load_str, AnyModel};

type Outcome_ = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome_);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn set(n: usize, xs: &[usize]) -> StateSet {
    StateSet::from_members(n, xs.iter().copied()).unwrap()
}

fn criterion1() -> Outcome_ {
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../cli/fixtures/example1.json")).map_err(err)?;
    let doc = load_str(&text).map_err(err)?;
    ensure(doc.states == ["w1", "w2", "w3", "w4"], || format!("states {:?}", doc.states))?;
    let AnyModel::Topo(m) = doc.model else { return Err("fixture is not a topo model".into()) };
    ensure(m == example1(), || "fixture differs from the built-in model".into())?;
    let ev = |s: &str| eval_topo(&m, &parse(s).unwrap()).map(|r| r.extension).map_err(err);
    let ka = ev("K{a}p")?;
    let kb = ev("K{b}p")?;
    ensure(ka == set(4, &[1, 3]), || format!("K_a p = {ka}"))?;
    ensure(kb == set(4, &[0, 1]), || format!("K_b p = {kb}"))?;
    ensure(ev("K{a}p & K{b}p")?.contains(1), || "w2 does not satisfy K_a p & K_b p".into())?;
    let bab = ev("B{a,b}p")?;
    let kab = ev("K{a,b}p")?;
    ensure(bab.is_empty(), || format!("B_ab p = {bab}"))?;
    ensure(kab.is_empty(), || format!("K_ab p = {kab}"))?;
    let (_, t) = group_structure(&m, 0b11).map_err(err)?;
    ensure(t.opens().len() == 16, || format!("tau_ab has {} opens", t.opens().len()))?;
    Ok("K_a p={w2,w4}, K_b p={w1,w2}, B_ab p=K_ab p=∅, |tau_ab|=16".into())
}

/// Pool shared by the operator and sharing suites.
fn topo_pool() -> Vec<TopoEModel> {
    let mut r = rng(2);
    let atoms = atom_names(1);
    (0..500).map(|k| random_topo_model(&mut r, 1 + k % 5, 1 + (k / 5) % 3, &atoms)).collect()
}

/// Every proposition for small carriers, 64 sampled ones for carrier 5.
fn propositions(r: &mut ChaCha8Rng, n: usize) -> Vec<StateSet> {
    if n <= 4 {
        StateSet::all_subsets(n).collect()
    } else {
        (0..64).map(|_| random_set(r, n)).collect()
    }
}

/// Group structure rebuilt from the individual opens: the basis of pairwise
/// (k-wise) intersections, and the cellwise intersection of partitions.
struct Brute {
    basis: Vec<StateSet>,
    cells: Vec<StateSet>,
}

impl Brute {
    fn new(m: &TopoEModel, group: u32) -> Brute {
        let n = m.carrier_size();
        let mut basis = vec![StateSet::full(n)];
        let mut cells = vec![StateSet::full(n)];
        for i in members(group) {
            let opens = m.topology(i).opens();
            let next: BTreeSet<StateSet> =
                basis.iter().flat_map(|b| opens.iter().map(move |o| b.intersection(o))).collect();
            basis = next.into_iter().collect();
            let next: BTreeSet<StateSet> = cells
                .iter()
                .flat_map(|c| m.partition(i).cells().iter().map(move |d| c.intersection(d)))
                .filter(|c| !c.is_empty())
                .collect();
            cells = next.into_iter().collect();
        }
        Brute { basis, cells }
    }

    fn int(&self, a: &StateSet) -> StateSet {
        let mut out = StateSet::empty(a.carrier_size());
        for b in self.basis.iter().filter(|b| b.is_subset(a)) {
            out.union_with(b);
        }
        out
    }

    fn cl(&self, a: &StateSet) -> StateSet {
        self.int(&a.complement()).complement()
    }

    fn forall(&self, a: &StateSet) -> StateSet {
        let mut out = StateSet::empty(a.carrier_size());
        for c in self.cells.iter().filter(|c| c.is_subset(a)) {
            out.union_with(c);
        }
        out
    }
}

fn criterion2() -> Outcome_ {
    let mut r = rng(3);
    let mut checks = 0u64;
    for (k, m) in topo_pool().iter().enumerate() {
        let n = m.carrier_size();
        for group in 1..=full_mask(m.agents().len()) {
            let brute = Brute::new(m, group);
            for p in propositions(&mut r, n) {
                let t = op_table(m, group, &p).map_err(err)?;
                let fail = |what: &str| format!("model {k} group {group:b} P={p}: {what}");
                ensure(t.forall == brute.forall(&p), || fail("[∀] differs from brute force"))?;
                ensure(t.nec == brute.int(&p), || fail("□ differs from brute force"))?;
                ensure(t.poss == brute.cl(&p), || fail("◇ differs from brute force"))?;
                ensure(t.forall.is_subset(&t.nec), || fail("[∀] ⊄ □"))?;
                ensure(t.knowledge.is_subset(&t.belief), || fail("K ⊄ B"))?;
                ensure(t.belief == brute.forall(&brute.cl(&brute.int(&p))), || fail("B ≠ [∀]◇□"))?;
                ensure(t.knowledge == t.nec.intersection(&t.belief), || fail("K ≠ □ ∩ B"))?;
                let kk = op_table(m, group, &t.knowledge).map_err(err)?;
                ensure(t.belief == kk.knowledge_dual, || fail("B ≠ ⟨K⟩K"))?;
                let dense = knowledge_dense_interior(m, group, &p).map_err(err)?;
                ensure(t.knowledge == dense, || fail("K ≠ dense-open interior"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (model, group, P) triples, 0 violations"))
}

fn criterion3() -> Outcome_ {
    let mut r = rng(4);
    let mut checks = 0u64;
    for (k, m) in topo_pool().iter().enumerate() {
        let n = m.carrier_size();
        for group in 1..=full_mask(m.agents().len()) {
            let shared = share_update(m, group).map_err(err)?;
            for p in propositions(&mut r, n) {
                let before = op_table(m, group, &p).map_err(err)?;
                for i in members(group) {
                    let after = op_table(&shared, 1 << i, &p).map_err(err)?;
                    let fail = |what: &str| format!("model {k} group {group:b} agent {i} P={p}: {what}");
                    ensure(after.nec == before.nec, || fail("□"))?;
                    ensure(after.forall == before.forall, || fail("[∀]"))?;
                    ensure(after.knowledge == before.knowledge, || fail("K"))?;
                    ensure(after.belief == before.belief, || fail("B"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (model, group, member, P) cases, 0 violations"))
}

fn criterion4() -> Outcome_ {
    let report = axiom_audit(&AuditConfig::default()).map_err(err)?;
    let fp: Vec<_> = report.false_positives().iter().map(|s| s.name).collect();
    let fne: Vec<_> = report.false_negatives().iter().map(|s| s.name).collect();
    ensure(report.is_ok(), || format!("unexpected failures in {fp:?}; no counterexample for {fne:?}"))?;
    let valid = report.schemes.iter().filter(|s| s.expected_valid).count();
    let instances: u64 = report.schemes.iter().map(|s| s.instances).sum();
    let invalid: Vec<String> = report
        .schemes
        .iter()
        .filter(|s| !s.expected_valid)
        .map(|s| format!("{}: {} counterexamples", s.name, s.failures))
        .collect();
    let models: Vec<String> = report.models.iter().map(|(k, v)| format!("{}={v}", k.name())).collect();
    Ok(format!("{} models; {valid} valid schemes, {instances} instances; {}", models.join(" "), invalid.join("; ")))
}

fn criterion5() -> Outcome_ {
    let atoms = atom_names(2);
    let mut r = rng(5);
    let kb = [Modality::K, Modality::B];
    let dynamic = [Modality::Box, Modality::Forall, Modality::K, Modality::B, Modality::Share];
    let pools = |r: &mut ChaCha8Rng, mods: &[Modality]| -> Vec<Vec<Formula>> {
        (1..=3)
            .map(|k| {
                let spec = FormulaSpec::new(&atoms, &agent_names(k), mods, false, 3);
                (0..300).map(|_| random_formula(r, &spec)).collect()
            })
            .collect()
    };
    let kb_pool = pools(&mut r, &kb);
    let dyn_pool = pools(&mut r, &dynamic);
    let models: Vec<TopoEModel> =
        (0..100).map(|k| random_topo_model(&mut r, 1 + k % 5, 1 + (k / 5) % 3, &atoms)).collect();
    let tr: Vec<Vec<Formula>> = kb_pool.iter().map(|fs| fs.iter().map(|f| expand_kb(f).unwrap()).collect()).collect();
    let red: Vec<Vec<Formula>> =
        dyn_pool.iter().map(|fs| fs.iter().map(|f| reduce_dynamic(f, DynSystem::EvDyn).unwrap()).collect()).collect();
    let mut checks = 0;
    for (k, m) in models.iter().enumerate() {
        let a = m.agents().len() - 1;
        for (f, g) in kb_pool[a].iter().zip(&tr[a]) {
            let x = eval_topo(m, f).map_err(err)?.extension;
            let y = eval_topo(m, g).map_err(err)?.extension;
            ensure(x == y, || format!("model {k}: tr({f}) = {g} gives {y}, expected {x}"))?;
            checks += 1;
        }
        for (f, g) in dyn_pool[a].iter().zip(&red[a]) {
            let x = eval_topo(m, f).map_err(err)?.extension;
            let y = eval_topo(m, g).map_err(err)?.extension;
            ensure(x == y, || format!("model {k}: reduce({f}) = {g} gives {y}, expected {x}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (model, formula) pairs, 300 KB and 300 dynamic formulas per agent count, all equal"))
}

fn criterion6() -> Outcome_ {
    let atoms = atom_names(2);
    let mut r = rng(6);
    let mut checks = 0;
    for k in 0..200 {
        let agents = 1 + (k / 5) % 3;
        let m = random_topo_model(&mut r, 1 + k % 5, agents, &atoms);
        let x = rel_of_topo(&m).map_err(err)?;
        let s = ev_pseudo_of_rel(&x).map_err(err)?;
        let spec = FormulaSpec::new(&atoms, &agent_names(agents), &[Modality::Box, Modality::Forall], false, 3);
        for _ in 0..100 {
            let f = random_formula(&mut r, &spec);
            let a = eval_topo(&m, &f).map_err(err)?.extension;
            let b = eval_relational(&x, &f).map_err(err)?.extension;
            let c = eval_ev_pseudo(&s, &f).map_err(err)?.extension;
            ensure(a == b && b == c, || format!("model {k}, {f}: topo {a}, relational {b}, pseudo {c}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (model, formula) pairs agree on all three semantics"))
}

fn criterion7() -> Outcome_ {
    let atoms = atom_names(2);
    let mut r = rng(7);
    let mut formulas = 0;
    let mut nonstandard = 0;
    for k in 0..200 {
        let agents = 1 + k % 3;
        let sig = if k % 2 == 0 { Signature::Full } else { Signature::Fragment };
        let s = random_ev_pseudo(&mut r, 1 + (k / 3) % 5, agents, &atoms, sig);
        if !topoev::models::is_standard(&s).is_valid() {
            nonstandard += 1;
        }
        let kb = kb_from_evidence(&s).map_err(err)?;
        let report = validate_kb_pseudo(&kb);
        ensure(report.is_valid(), || {
            let names: Vec<_> = report.failed().iter().map(|c| c.name).collect();
            format!("model {k}: conditions failed: {names:?}")
        })?;
        let spec = FormulaSpec::new(&atoms, &agent_names(agents), &[Modality::K, Modality::B], true, 3);
        for _ in 0..50 {
            let f = random_formula(&mut r, &spec);
            let a = eval_kb_pseudo(&kb, &f).map_err(err)?.extension;
            let b = eval_ev_pseudo(&s, &expand_kb(&f).map_err(err)?).map_err(err)?.extension;
            ensure(a == b, || format!("model {k}, {f}: KB gives {a}, evidence gives {b}"))?;
            formulas += 1;
        }
        let again = kb_from_evidence(&evidence_from_kb(&kb).map_err(err)?).map_err(err)?;
        ensure(again == kb, || format!("model {k}: KB structure not reproduced after the round trip"))?;
    }
    Ok(format!(
        "200 models ({nonstandard} non-standard), all conditions hold, {formulas} formulas agree, round trip exact"
    ))
}

fn criterion8() -> Outcome_ {
    let atoms = atom_names(2);
    let mut r = rng(8);
    let mut mismatches = [0usize; 3];
    let mut checked = [0usize; 3];
    let mut first: Option<String> = None;
    let mut forth = 0;
    for k in 0..50 {
        let agents = 1 + k % 2;
        let n = 1 + (k / 2) % 3;
        let sig = if k % 4 < 2 { Signature::Full } else { Signature::Fragment };
        let s = random_ev_pseudo(&mut r, n, agents, &atoms, sig);
        let s0 = r.gen_range(0..n);
        for d in 0..=2 {
            let u = unravel(&s, s0, d).map_err(err)?;
            let report = last_pmorphism_check(&u, &s).map_err(err)?;
            forth += report.forth_violations.len();
            let spec = FormulaSpec::new(
                &atoms,
                &agent_names(agents),
                &[Modality::Box, Modality::Forall],
                sig == Signature::Fragment,
                d,
            );
            for _ in 0..100 {
                let f = random_formula(&mut r, &spec);
                let want = eval_ev_pseudo(&s, &f).map_err(err)?.extension.contains(s0);
                let got = eval_ev_pseudo(u.pseudo(), &f).map_err(err)?.extension.contains(0);
                checked[d] += 1;
                if want != got {
                    mismatches[d] += 1;
                    first.get_or_insert_with(|| {
                        format!("model {k} (n={n}, {agents} agents) from {s0}, depth {d}: {f} is {want} in S, {got} at the root")
                    });
                }
            }
        }
    }
    let summary = format!(
        "truth mismatches at depth 0/1/2: {}/{}/{} of {}/{}/{}; forth violations {forth}",
        mismatches[0], mismatches[1], mismatches[2], checked[0], checked[1], checked[2]
    );
    ensure(mismatches.iter().all(|&m| m == 0) && forth == 0, || {
        format!("{summary}; first: {}", first.clone().unwrap_or_default())
    })?;
    Ok(summary)
}

fn criterion9() -> Outcome_ {
    let t = Instant::now();
    let v = bounded_sat(&parse("K{a}p & K{b}p & ~B{A}p").unwrap(), 4, SatSemantics::Topo).map_err(err)?;
    let elapsed = t.elapsed();
    let size = match &v.outcome {
        Outcome::Sat { model, .. } => model.carrier_size(),
        Outcome::UnsatUpTo(k) => return Err(format!("example formula UNSAT_UP_TO {k}")),
    };
    ensure(elapsed < Duration::from_secs(10), || format!("example search took {elapsed:?}"))?;
    let factive = bounded_sat(&parse("~(K{a}p -> p)").unwrap(), 4, SatSemantics::Topo).map_err(err)?;
    ensure(factive.outcome == Outcome::UnsatUpTo(4), || "~(K{a}p -> p) is satisfiable".into())?;
    let reduced = reduce_dynamic(&parse("~([share{a,b}]p <-> p)").unwrap(), DynSystem::EvDyn).map_err(err)?;
    let atomic = bounded_sat(&reduced, 4, SatSemantics::Topo).map_err(err)?;
    ensure(atomic.outcome == Outcome::UnsatUpTo(4), || format!("reduced form {reduced} is satisfiable"))?;

    let mut r = rng(9);
    let mut pool: Vec<Formula> = [
        "K{a}p & K{b}p & ~B{A}p",
        "~(K{a}p -> p)",
        "Box{a}p & ~Box{b}p",
        "B{a} p & ~K{a} p",
        "Dia{a}p & Dia{a}~p & Forall{a}(p | q)",
        "Exists{a} Box{a,b} p & ~Box{a} p",
        "K{a} p & ~K{a} K{a} p",
    ]
    .iter()
    .map(|s| parse(s).unwrap())
    .collect();
    let spec =
        FormulaSpec::new(&atom_names(2), &agent_names(2), &[Modality::Box, Modality::Forall, Modality::K], false, 2);
    pool.extend((0..20).map(|_| random_formula(&mut r, &spec)));
    let mut compared = 0;
    for f in &pool {
        for semantics in [SatSemantics::Topo, SatSemantics::EvPseudo] {
            for bound in 1..=3 {
                let mut o = SatOptions::new(bound, semantics);
                let a = bounded_sat_with(f, &o).map_err(err)?;
                o.prune = false;
                let b = bounded_sat_with(f, &o).map_err(err)?;
                let shape = |x: &Outcome| match x {
                    Outcome::Sat { model, .. } => Some(model.carrier_size()),
                    Outcome::UnsatUpTo(_) => None,
                };
                ensure(shape(&a.outcome) == shape(&b.outcome), || {
                    format!(
                        "{f} bound {bound} {semantics:?}: pruned {:?}, naive {:?}",
                        shape(&a.outcome),
                        shape(&b.outcome)
                    )
                })?;
                compared += 1;
            }
        }
    }
    Ok(format!(
        "example SAT with {size} states in {:.2}s; both negative cases UNSAT_UP_TO 4; {compared} pruned/naive runs agree",
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("worked example golden values", criterion1),
        ("operator identities", criterion2),
        ("sharing equalities", criterion3),
        ("axiom audit", criterion4),
        ("translation and reduction oracles", criterion5),
        ("cross-semantics agreement", criterion6),
        ("representation round trip", criterion7),
        ("bounded unraveling", criterion8),
        ("bounded satisfiability", criterion9),
    ];
    let limits = [Some(1.0), Some(30.0), None, None, None, None, None, None, None];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        let result = match (result, limits[k]) {
            (Ok(_), Some(limit)) if secs > limit => Err(format!("took {secs:.2}s, limit {limit}s")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS {} {name} ({secs:.2}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.2}s): {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
