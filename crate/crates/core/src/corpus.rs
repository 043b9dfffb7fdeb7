//! Shared test corpora: a spread of small finite groups (orders up to
//! 200) and the builtin presentation catalog, used by the invariant suite
//! and the integration tests.

use crate::caps::Caps;
use crate::error::Result;
use crate::fingroup::FiniteGroup;
use crate::presentation::builtin;

pub fn s3() -> FiniteGroup {
    FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], &Caps::default())
        .expect("S3")
}

pub fn d4() -> FiniteGroup {
    FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]], &Caps::default())
        .expect("D4")
}

pub fn a4() -> FiniteGroup {
    FiniteGroup::from_permutations(4, &[vec![1, 2, 0, 3], vec![0, 2, 3, 1]], &Caps::default())
        .expect("A4")
}

/// Finite groups of order at most 200: cyclic groups, the small
/// permutation groups, and mod-m quotients of catalog presentations.
pub fn finite_corpus() -> Result<Vec<(String, FiniteGroup)>> {
    let caps = Caps::default();
    let mut out: Vec<(String, FiniteGroup)> = Vec::new();
    for n in 1..=12u32 {
        out.push((format!("Z{n}"), FiniteGroup::cyclic(n)));
    }
    out.push(("S3".into(), s3()));
    out.push(("D4".into(), d4()));
    out.push(("A4".into(), a4()));
    for (name, m) in [("p4", 2i64), ("pm", 3), ("p3", 2), ("p4", 3)] {
        let p = builtin(name)?;
        let q = p.finite_quotient(m, &caps)?;
        out.push((format!("{name}/mod{m}"), q.group));
    }
    Ok(out)
}

/// The smaller groups of the corpus, for the more expensive sweeps.
pub fn finite_corpus_small() -> Result<Vec<(String, FiniteGroup)>> {
    Ok(finite_corpus()?
        .into_iter()
        .filter(|(_, g)| g.order() <= 36)
        .collect())
}
