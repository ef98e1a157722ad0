use std::path::PathBuf;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topoev::random::{atom_names, random_ev_pseudo, random_topo_model};
use topoev::representation::kb_from_evidence;
use topoev::Signature;
use topoev_cli::file::{convert, load_str, save_string, AnyModel, Document, Kind};
use topoev_cli::{run_args, Report};

fn fixture() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example1.json").to_string()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("topoev-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn cli(args: &[&str]) -> Report {
    run_args(std::iter::once("topoev").chain(args.iter().copied()))
}

fn stdout_of(args: &[&str]) -> String {
    let r = cli(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

#[test]
fn check_example_formulas() {
    let f = fixture();
    assert_eq!(stdout_of(&["check", &f, "K{a}p & K{b}p"]), "{w2}\n");
    assert_eq!(stdout_of(&["check", &f, "K{a}p"]), "{w2,w4}\n");
    assert_eq!(stdout_of(&["check", &f, "K{b}p"]), "{w1,w2}\n");
    assert_eq!(stdout_of(&["check", &f, "B{a,b}p"]), "{}\n");
    assert_eq!(stdout_of(&["check", &f, "p | ~p"]), "{w1,w2,w3,w4}\n");
    assert_eq!(stdout_of(&["check", &f, "K{a}p & K{b}p", "--at", "w2"]), "w2: true\n");
    let r = cli(&["check", &f, "K{a}p", "--at", "w1"]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "w1: false\n"));
}

#[test]
fn check_json_and_trace() {
    let out = stdout_of(&["--json", "check", &fixture(), "B{a,b}p", "--trace"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["extension"], serde_json::json!([]));
    assert_eq!(v["trace"][0]["formula"], "p");
    assert_eq!(v["trace"][0]["extension"], serde_json::json!(["w1", "w2", "w4"]));
}

#[test]
fn input_errors_exit_two() {
    let f = fixture();
    assert_eq!(cli(&["check", &f, "K{a} &"]).code, 2);
    assert_eq!(cli(&["check", &f, "K{z} p"]).code, 2);
    assert_eq!(cli(&["check", &f, "q"]).code, 2);
    assert_eq!(cli(&["check", "/nonexistent.json", "p"]).code, 2);
    assert_eq!(cli(&["check", &f, "p", "--at", "w9"]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{\"kind\": \"topo\", \"states\": []}").unwrap();
    assert_eq!(cli(&["check", bad.to_str().unwrap(), "p"]).code, 2);
}

#[test]
fn share_updates_both_agents() {
    let out = tmp("shared.json");
    let r = cli(&["share", &fixture(), "{a,b}", "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("a: opens 6 -> 16"));
    let doc = load_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let AnyModel::Topo(m) = doc.model else { panic!("topo") };
    for i in 0..2 {
        assert_eq!(m.topology(i).opens().len(), 16);
        assert_eq!(m.partition(i).cells().len(), 1);
    }
    // After sharing, individual knowledge is the group's.
    let f = out.to_str().unwrap();
    assert_eq!(stdout_of(&["check", f, "K{a}p"]), stdout_of(&["check", &fixture(), "K{a,b}p"]));
    assert_eq!(stdout_of(&["check", f, "B{b}p"]), stdout_of(&["check", &fixture(), "B{a,b}p"]));
}

#[test]
fn singleton_share_is_byte_identical() {
    let original = std::fs::read_to_string(fixture()).unwrap();
    let r = cli(&["share", &fixture(), "{a}"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, original);
    assert_eq!(r.stderr, "no change\n");
}

#[test]
fn share_needs_topo() {
    let rel = tmp("rel-for-share.json");
    assert_eq!(cli(&["convert", &fixture(), "--to", "relational", "-o", rel.to_str().unwrap()]).code, 0);
    assert_eq!(cli(&["share", rel.to_str().unwrap(), "{a}"]).code, 2);
}

#[test]
fn translate_examples() {
    assert_eq!(stdout_of(&["translate", "--mode", "tr", "B{a}p"]), "Forall{a} Dia{a} Box{a} p\n");
    assert_eq!(stdout_of(&["translate", "--mode", "reduce", "[share{a,b}]p"]), "p\n");
    assert_eq!(stdout_of(&["translate", "--mode", "reduce", "[share{a}][share{a}]p"]), "p\n");
    assert_eq!(cli(&["translate", "--mode", "tr", "[share{a}]K{a}p"]).code, 2);
    assert_eq!(cli(&["translate", "--mode", "reduce", "--system", "kb", "[share{a}]Box{a}p"]).code, 2);
    let out = stdout_of(&["translate", "--mode", "reduce", "[share{a,b}] K{a} p", "--verify", &fixture()]);
    assert!(out.starts_with("K{a,b} p\nequivalent on"), "{out}");
}

#[test]
fn conversions_preserve_check_results() {
    let formulas = [
        "p",
        "K{a}p",
        "K{b}p",
        "B{a}p",
        "B{a,b}p",
        "K{A}~p",
        "Box{a}p | Forall{b}~p",
        "<B{b}> ~p & Dia{a} p",
        "Exists{a,b} Box{a,b} p",
        "[share{a}] K{b} p",
    ];
    let rel = tmp("rel.json");
    let ev = tmp("ev.json");
    let kb = tmp("kb.json");
    let back = tmp("back.json");
    for (path, kind) in [(&rel, "relational"), (&ev, "ev_pseudo"), (&kb, "kb_pseudo")] {
        assert_eq!(cli(&["convert", &fixture(), "--to", kind, "-o", path.to_str().unwrap()]).code, 0);
    }
    assert_eq!(cli(&["convert", rel.to_str().unwrap(), "--to", "topo", "-o", back.to_str().unwrap()]).code, 0);
    for f in formulas {
        let want = stdout_of(&["check", &fixture(), f]);
        for p in [&rel, &ev, &back] {
            let got = stdout_of(&["check", p.to_str().unwrap(), f]);
            assert_eq!(got.lines().last(), want.lines().last(), "{f} on {}", p.display());
        }
    }
    // The KB pseudo-model only speaks knowledge and belief of agents and A.
    for f in ["K{a}p", "K{b}p", "B{a}p", "K{A}~p", "B{A}p", "<B{b}> ~p"] {
        assert_eq!(stdout_of(&["check", kb.to_str().unwrap(), f]), stdout_of(&["check", &fixture(), f]), "{f}");
    }
}

#[test]
fn sat_example() {
    let r = cli(&["sat", "K{a}p & K{b}p & ~B{A}p", "--max", "4"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("SAT with "));
    let n: usize = r.stdout["SAT with ".len()..].split(' ').next().unwrap().parse().unwrap();
    assert!(n <= 4);
    // The worked example is itself a 4-state witness.
    assert_eq!(stdout_of(&["check", &fixture(), "K{a}p & K{b}p & ~B{A}p", "--at", "w2"]), "w2: true\n");
    let r = cli(&["sat", "~(K{a}p -> p)", "--max", "3"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("UNSAT_UP_TO 3"));
    let out = stdout_of(&["--json", "sat", "Box{a} p & ~Box{b} p", "--max", "3"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "SAT");
    // The witness is a loadable model file on which the formula holds.
    let w = tmp("witness.json");
    std::fs::write(&w, serde_json::to_string(&v["witness"]).unwrap()).unwrap();
    let at = v["state"].as_str().unwrap();
    assert_eq!(cli(&["check", w.to_str().unwrap(), "Box{a} p & ~Box{b} p", "--at", at]).code, 0);
}

#[test]
fn closure_listing() {
    let out = stdout_of(&["closure", "Box{a}p", "--agents", "a,b"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.last().unwrap(), &"6 formulas over agents a,b");
    for f in ["p", "~p", "Box{a} p", "~Box{a} p", "Box{a,b} p", "~Box{a,b} p"] {
        assert!(lines.contains(&f), "{f}");
    }
}

#[test]
fn unravel_and_validate() {
    let out = stdout_of(&["unravel", &fixture(), "w2", "1"]);
    assert!(out.contains("0 atom, 0 forth"), "{out}");
    let tree = tmp("tree.json");
    assert_eq!(cli(&["unravel", &fixture(), "w1", "1", "-o", tree.to_str().unwrap()]).code, 0);
    let doc = load_str(&std::fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(doc.states[0], "w1");
    assert!(doc.states.iter().any(|s| s == "w1 <=a w4"));

    assert!(stdout_of(&["validate", &fixture()]).starts_with("valid topo model"));
    let broken = tmp("broken.json");
    let text = std::fs::read_to_string(fixture()).unwrap().replacen(
        "\"partition\": [[\"w1\", \"w2\", \"w3\", \"w4\"]]",
        "\"partition\": [[\"w1\"], [\"w2\", \"w3\", \"w4\"]]",
        1,
    );
    std::fs::write(&broken, text).unwrap();
    let r = cli(&["validate", broken.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("invalid topo model"));
    assert_eq!(cli(&["check", broken.to_str().unwrap(), "p"]).code, 2);
}

#[test]
fn audit_small_run_is_deterministic() {
    let a = cli(&["--json", "audit", "--n", "5", "--seed", "3"]);
    let b = cli(&["--json", "audit", "--n", "5", "--seed", "3"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    assert!(v["schemes"].as_array().unwrap().len() > 30);
}

#[test]
fn random_models_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..40 {
        let n = 1 + k % 4;
        let agents = 1 + k % 3;
        let atoms = atom_names(2);
        let states: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let topo = random_topo_model(&mut rng, n, agents, &atoms);
        let sig = if k % 2 == 0 { Signature::Full } else { Signature::Fragment };
        let pseudo = random_ev_pseudo(&mut rng, n, agents, &atoms, sig);
        let mut models = vec![AnyModel::Topo(topo.clone()), AnyModel::EvPseudo(pseudo.clone())];
        models.push(convert(&models[0], Kind::Relational).unwrap());
        models.push(AnyModel::KbPseudo(kb_from_evidence(&pseudo).unwrap()));
        for model in models {
            let doc = Document { states: states.clone(), model };
            let text = save_string(&doc);
            assert_eq!(load_str(&text).unwrap(), doc);
        }
    }
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_topoev");
    let out = Command::new(bin).args(["check", &fixture(), "K{a}p & K{b}p"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "{w2}\n");
    let out = Command::new(bin).args(["sat", "~(K{a}p -> p)", "--max", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin).args(["check", &fixture(), "(p"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: parse error"));
}
