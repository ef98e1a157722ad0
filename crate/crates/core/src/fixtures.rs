//! The worked four-state example: two agents with trivial hard evidence and
//! soft evidence that is jointly inconsistent with any dense justification.

use crate::models::{TopoEModel, Valuation};
use crate::topology::{generate_topology, Partition, StateSet};

/// States `w1..w4` are `0..3`; `p = {w1, w2, w4}`;
/// agent `a` has evidence `{w2,w4}`, `{w3,w4}` and agent `b` has `{w1,w2}`, `{w1,w3}`.
pub fn example1() -> TopoEModel {
    let n = 4;
    let s = |xs: &[usize]| StateSet::from_members(n, xs.iter().copied()).expect("in range");
    let ta = generate_topology(&[s(&[1, 3]), s(&[2, 3])], n).expect("subbasis");
    let tb = generate_topology(&[s(&[0, 1]), s(&[0, 2])], n).expect("subbasis");
    let mut v = Valuation::new();
    v.insert("p".into(), s(&[0, 1, 3]));
    TopoEModel::new(
        n,
        vec!["a".into(), "b".into()],
        vec![Partition::trivial(n), Partition::trivial(n)],
        vec![ta, tb],
        v,
    )
    .expect("well-formed")
}

/// State names used by the bundled fixture.
pub const EXAMPLE1_STATES: [&str; 4] = ["w1", "w2", "w3", "w4"];
