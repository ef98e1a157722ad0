//! Shared inputs for the benchmarks, fixed by seed so runs compare.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoev::random::{agent_names, atom_names, random_formula, random_topo_model, FormulaSpec};
use topoev::{Formula, Modality, StateSet, TopoEModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` random nonempty subsets of an `n`-point carrier.
pub fn subbasis(n: usize, count: usize, seed: u64) -> Vec<StateSet> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let mut s = StateSet::empty(n);
            while s.is_empty() {
                for x in 0..n {
                    if r.gen_bool(0.4) {
                        s.insert(x);
                    }
                }
            }
            s
        })
        .collect()
}

pub fn models(n: usize, agents: usize, count: usize, seed: u64) -> Vec<TopoEModel> {
    let mut r = rng(seed);
    (0..count).map(|_| random_topo_model(&mut r, n, agents, &atom_names(2))).collect()
}

/// Random formulas over every modality, groups drawn from `agents` names.
pub fn formulas(agents: usize, depth: usize, count: usize, seed: u64) -> Vec<Formula> {
    let mut r = rng(seed);
    let mods = [Modality::Box, Modality::Forall, Modality::K, Modality::B, Modality::Share];
    let spec = FormulaSpec::new(&atom_names(2), &agent_names(agents), &mods, false, depth);
    (0..count).map(|_| random_formula(&mut r, &spec)).collect()
}
