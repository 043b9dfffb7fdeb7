//! Finite skeleta of the coset-chain model: simplices are sequences of
//! left cosets (C_0, ..., C_n) whose conjugated subgroups C_i C_i^{-1}
//! nest (non-strictly) and belong to a conjugation-closed family. The
//! ambient group acts diagonally; the fixed complex of a member H is the
//! set of chains with H inside C_0 C_0^{-1}, and prepending the coset H
//! cones it off. Unions, intersections, joins, and classifying maps from
//! simplicial group-sets are checked at skeleton level.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fingroup::{FiniteGroup, Subgroup};
use crate::hyperelem::{hyperelementary_cert_any, p_hyperelementary_cert_in};

/// An explicit family of subgroups, closed under conjugation. The
/// subgroup-closure flag is optional: families need not contain all
/// subgroups of their members unless requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub members: Vec<Subgroup>,
    pub subgroup_closed: bool,
}

impl Family {
    pub fn new(group: &FiniteGroup, members: Vec<Subgroup>) -> Result<Self> {
        let mut members = members;
        members.sort();
        members.dedup();
        for m in &members {
            m.validate(group)?;
        }
        let fam = Family {
            members,
            subgroup_closed: false,
        };
        for m in &fam.members {
            for g in 0..group.order() {
                let c = group.conjugate_subgroup(m, g);
                if fam.member_index(&c).is_none() {
                    return Err(Error::Invalid(format!(
                        "family is not closed under conjugation: conjugate of {:?} by {g} missing",
                        m.elems
                    )));
                }
            }
        }
        Ok(fam)
    }

    /// Like [`Family::new`] but additionally requires closure under taking
    /// subgroups.
    pub fn new_subgroup_closed(group: &FiniteGroup, members: Vec<Subgroup>, caps: &Caps) -> Result<Self> {
        let mut fam = Family::new(group, members)?;
        for sub in group.subgroups(caps)? {
            let inside_member = fam.members.iter().any(|m| sub.is_subset_of(m));
            if inside_member && fam.member_index(&sub).is_none() {
                return Err(Error::Invalid(
                    "family is not closed under subgroups".into(),
                ));
            }
        }
        fam.subgroup_closed = true;
        Ok(fam)
    }

    pub fn member_index(&self, sub: &Subgroup) -> Option<usize> {
        self.members.binary_search(sub).ok()
    }

    pub fn all_subgroups(group: &FiniteGroup, caps: &Caps) -> Result<Self> {
        Family::new(group, group.subgroups(caps)?)
    }

    pub fn trivial_only(group: &FiniteGroup) -> Result<Self> {
        Family::new(group, vec![Subgroup::trivial()])
    }

    pub fn cyclic_members(group: &FiniteGroup, caps: &Caps) -> Result<Self> {
        let members = group
            .subgroups(caps)?
            .into_iter()
            .filter(|s| s.is_cyclic_in(group))
            .collect();
        Family::new(group, members)
    }

    pub fn p_hyperelementary_members(group: &FiniteGroup, p: u64, caps: &Caps) -> Result<Self> {
        let members = group
            .subgroups(caps)?
            .into_iter()
            .filter(|s| p_hyperelementary_cert_in(group, s, p).is_some())
            .collect();
        Family::new(group, members)
    }

    pub fn hyperelementary_members(group: &FiniteGroup, caps: &Caps) -> Result<Self> {
        let members = group
            .subgroups(caps)?
            .into_iter()
            .filter(|s| hyperelementary_cert_any(group, s).is_some())
            .collect();
        Family::new(group, members)
    }

    pub fn union(&self, other: &Family, group: &FiniteGroup) -> Result<Family> {
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Family::new(group, members)
    }

    pub fn intersection(&self, other: &Family, group: &FiniteGroup) -> Result<Family> {
        let members = self
            .members
            .iter()
            .filter(|m| other.member_index(m).is_some())
            .cloned()
            .collect();
        Family::new(group, members)
    }

    pub fn difference(&self, other: &Family, group: &FiniteGroup) -> Result<Family> {
        let members = self
            .members
            .iter()
            .filter(|m| other.member_index(m).is_none())
            .cloned()
            .collect();
        Family::new(group, members)
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.members
            .iter()
            .all(|m| other.member_index(m).is_some())
    }

    /// `self` is closed relative to `other` when every member of `other`
    /// contained in some member of `self` already belongs to `self`.
    pub fn is_closed_relative_to(&self, other: &Family) -> bool {
        other.members.iter().all(|k| {
            let inside = self.members.iter().any(|m| k.is_subset_of(m));
            !inside || self.member_index(k).is_some()
        })
    }
}

/// A left coset, stored as (family member index, least coset element).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coset {
    pub subgroup: u32,
    pub rep: u32,
}

/// A coset chain (C_0, ..., C_n).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CosetChain {
    pub cosets: Vec<Coset>,
}

impl CosetChain {
    pub fn dim(&self) -> usize {
        self.cosets.len() - 1
    }

    /// Omits entry k.
    pub fn face(&self, k: usize) -> CosetChain {
        let mut cosets = self.cosets.clone();
        cosets.remove(k);
        CosetChain { cosets }
    }

    /// Duplicates entry k.
    pub fn degeneracy(&self, k: usize) -> CosetChain {
        let mut cosets = self.cosets.clone();
        cosets.insert(k, cosets[k]);
        CosetChain { cosets }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.cosets.windows(2).all(|w| w[0] != w[1])
    }

    /// Family-independent form for cross-family comparisons: pairs of
    /// (sorted subgroup elements, representative).
    pub fn canonical(&self, fam: &Family) -> Vec<(Vec<u32>, u32)> {
        self.cosets
            .iter()
            .map(|c| (fam.members[c.subgroup as usize].elems.clone(), c.rep))
            .collect()
    }
}

fn canon_rep(group: &FiniteGroup, member: &Subgroup, elem: u32) -> u32 {
    member
        .elems
        .iter()
        .map(|&h| group.mul(elem, h))
        .min()
        .unwrap()
}

/// The conjugated subgroup C C^{-1} of a coset.
pub fn coset_conj_subgroup(group: &FiniteGroup, fam: &Family, c: &Coset) -> Subgroup {
    group.conjugate_subgroup(&fam.members[c.subgroup as usize], c.rep)
}

/// Checks the chain invariants: representatives canonical, conjugated
/// subgroups in the family and nested along the chain.
pub fn chain_valid(group: &FiniteGroup, fam: &Family, chain: &CosetChain) -> Result<()> {
    if chain.cosets.is_empty() {
        return Err(Error::Invalid("chain must be nonempty".into()));
    }
    let mut prev: Option<Subgroup> = None;
    for c in &chain.cosets {
        if c.subgroup as usize >= fam.members.len() {
            return Err(Error::Invalid("coset subgroup index out of range".into()));
        }
        let member = &fam.members[c.subgroup as usize];
        if canon_rep(group, member, c.rep) != c.rep {
            return Err(Error::Invalid("coset representative not canonical".into()));
        }
        let conj = coset_conj_subgroup(group, fam, c);
        if fam.member_index(&conj).is_none() {
            return Err(Error::Invalid(
                "conjugated subgroup is not a family member".into(),
            ));
        }
        if let Some(p) = &prev {
            if !p.is_subset_of(&conj) {
                return Err(Error::Invalid("chain nesting violated".into()));
            }
        }
        prev = Some(conj);
    }
    Ok(())
}

/// A finite skeleton: the nondegenerate chains in each dimension 0..=d.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Skeleton {
    pub family: Family,
    pub by_dim: Vec<Vec<CosetChain>>,
}

impl Skeleton {
    pub fn simplex_count(&self) -> usize {
        self.by_dim.iter().map(|v| v.len()).sum()
    }

    pub fn canonical_set(&self) -> BTreeSet<Vec<(Vec<u32>, u32)>> {
        self.by_dim
            .iter()
            .flatten()
            .map(|c| c.canonical(&self.family))
            .collect()
    }
}

/// All nondegenerate chains of dimension at most d, in deterministic
/// order: cosets sorted by (subgroup index, representative), chains
/// extended depth-first.
pub fn skeleton(group: &FiniteGroup, fam: &Family, d: usize, caps: &Caps) -> Result<Skeleton> {
    if d > 4 {
        return Err(Error::Capacity {
            what: "skeleton dimension",
            value: d as u128,
            cap: 4,
        });
    }
    // enumerate cosets
    let mut cosets: Vec<Coset> = Vec::new();
    for (mi, member) in fam.members.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for g in 0..group.order() {
            let rep = canon_rep(group, member, g);
            if seen.insert(rep) {
                cosets.push(Coset {
                    subgroup: mi as u32,
                    rep,
                });
            }
        }
    }
    cosets.sort();
    // nesting relation between cosets via their conjugated subgroups
    let conj: Vec<Subgroup> = cosets
        .iter()
        .map(|c| coset_conj_subgroup(group, fam, c))
        .collect();
    for c in &conj {
        if fam.member_index(c).is_none() {
            return Err(Error::Internal(
                "conjugated subgroup escaped the family".into(),
            ));
        }
    }
    let n = cosets.len();
    let mut nest = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            nest[i * n + j] = conj[i].is_subset_of(&conj[j]);
        }
    }

    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
    let mut total = n as u64;
    for _ in 1..=d {
        let prev = by_dim.last().unwrap();
        let mut next: Vec<Vec<usize>> = Vec::new();
        for chain in prev {
            let last = *chain.last().unwrap();
            for j in 0..n {
                if j != last && nest[last * n + j] {
                    total += 1;
                    if total > caps.simplices {
                        return Err(Error::Capacity {
                            what: "simplex count",
                            value: total as u128,
                            cap: caps.simplices as u128,
                        });
                    }
                    let mut c = chain.clone();
                    c.push(j);
                    next.push(c);
                }
            }
        }
        by_dim.push(next);
    }

    let by_dim = by_dim
        .into_iter()
        .map(|chains| {
            chains
                .into_iter()
                .map(|idxs| CosetChain {
                    cosets: idxs.into_iter().map(|i| cosets[i]).collect(),
                })
                .collect()
        })
        .collect();
    Ok(Skeleton {
        family: fam.clone(),
        by_dim,
    })
}

/// The diagonal action: g (C_0, ..., C_n) = (g C_0, ..., g C_n).
pub fn act(group: &FiniteGroup, fam: &Family, g: u32, chain: &CosetChain) -> CosetChain {
    let cosets = chain
        .cosets
        .iter()
        .map(|c| Coset {
            subgroup: c.subgroup,
            rep: canon_rep(
                group,
                &fam.members[c.subgroup as usize],
                group.mul(g, c.rep),
            ),
        })
        .collect();
    CosetChain { cosets }
}

/// Chains fixed pointwise by every element of H, computed literally and
/// checked against the membership condition H inside C_0 C_0^{-1}.
pub fn fixed_complex(
    group: &FiniteGroup,
    skel: &Skeleton,
    h: &Subgroup,
) -> Result<Vec<CosetChain>> {
    let fam = &skel.family;
    let mut out = Vec::new();
    for chain in skel.by_dim.iter().flatten() {
        let literally_fixed = h
            .elems
            .iter()
            .all(|&g| act(group, fam, g, chain) == *chain);
        let c0 = coset_conj_subgroup(group, fam, &chain.cosets[0]);
        let by_condition = h.is_subset_of(&c0);
        if literally_fixed != by_condition {
            return Err(Error::Internal(
                "pointwise fixedness differs from the first-coset condition".into(),
            ));
        }
        if literally_fixed {
            out.push(chain.clone());
        }
    }
    Ok(out)
}

/// The strict stratum: chains whose first conjugated subgroup equals H
/// exactly (a subcomplex variant of the fixed complex).
pub fn fixed_complex_strict(
    group: &FiniteGroup,
    skel: &Skeleton,
    h: &Subgroup,
) -> Vec<CosetChain> {
    skel.by_dim
        .iter()
        .flatten()
        .filter(|chain| coset_conj_subgroup(group, &skel.family, &chain.cosets[0]) == *h)
        .cloned()
        .collect()
}

/// The cone: prepend the coset H of itself to a chain fixed by H. Output
/// may be degenerate (when C_0 is the coset H) but is always a valid
/// chain, and its 0-th face recovers the input.
pub fn cone_contract(
    group: &FiniteGroup,
    fam: &Family,
    h: &Subgroup,
    chain: &CosetChain,
) -> Result<CosetChain> {
    let hi = fam
        .member_index(h)
        .ok_or_else(|| Error::Precondition("cone subgroup is not a family member".into()))?;
    let c0 = coset_conj_subgroup(group, fam, &chain.cosets[0]);
    if !h.is_subset_of(&c0) {
        return Err(Error::Precondition(
            "chain is not fixed by the cone subgroup".into(),
        ));
    }
    let mut cosets = vec![Coset {
        subgroup: hi as u32,
        rep: 0,
    }];
    cosets.extend(chain.cosets.iter().copied());
    let cone = CosetChain { cosets };
    chain_valid(group, fam, &cone)?;
    Ok(cone)
}

/// Skeleton-level statement of the union/intersection identities for two
/// mutually relatively closed families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnionReport {
    pub closedness_ok: bool,
    pub union_equal: bool,
    pub intersection_equal: bool,
    pub intersection_member_count: usize,
    pub dims_checked: usize,
}

pub fn union_check(
    group: &FiniteGroup,
    fam_g: &Family,
    fam_h: &Family,
    d: usize,
    caps: &Caps,
) -> Result<UnionReport> {
    let closedness_ok =
        fam_g.is_closed_relative_to(fam_h) && fam_h.is_closed_relative_to(fam_g);
    if !closedness_ok {
        return Ok(UnionReport {
            closedness_ok,
            union_equal: false,
            intersection_equal: false,
            intersection_member_count: 0,
            dims_checked: 0,
        });
    }
    let union_fam = fam_g.union(fam_h, group)?;
    let inter_fam = fam_g.intersection(fam_h, group)?;
    let sk_g = skeleton(group, fam_g, d, caps)?.canonical_set();
    let sk_h = skeleton(group, fam_h, d, caps)?.canonical_set();
    let sk_union = skeleton(group, &union_fam, d, caps)?.canonical_set();
    let sk_inter = skeleton(group, &inter_fam, d, caps)?.canonical_set();
    let union_outer: BTreeSet<_> = sk_g.union(&sk_h).cloned().collect();
    let inter_outer: BTreeSet<_> = sk_g.intersection(&sk_h).cloned().collect();
    Ok(UnionReport {
        closedness_ok,
        union_equal: sk_union == union_outer,
        intersection_equal: sk_inter == inter_outer,
        intersection_member_count: inter_fam.members.len(),
        dims_checked: d,
    })
}

/// A join simplex: a pair of simplices, one possibly the formal empty
/// simplex of degree -1 (but not both). Dimensions add plus one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JoinSimplex {
    pub left: Option<CosetChain>,
    pub right: Option<CosetChain>,
}

impl JoinSimplex {
    pub fn dim(&self) -> i64 {
        let l = self.left.as_ref().map_or(-1, |c| c.dim() as i64);
        let r = self.right.as_ref().map_or(-1, |c| c.dim() as i64);
        l + r + 1
    }

    /// Face maps split by the left dimension: the k-th face acts on the
    /// left part for k <= dim(left) and on the right part above, with the
    /// extra face on 0-simplices landing in the empty simplex.
    pub fn face(&self, k: i64) -> Result<JoinSimplex> {
        if k < 0 || k > self.dim() {
            return Err(Error::Invalid("face index out of range".into()));
        }
        let ldim = self.left.as_ref().map_or(-1, |c| c.dim() as i64);
        if k <= ldim {
            let left = self.left.as_ref().unwrap();
            let new_left = if left.dim() == 0 {
                None
            } else {
                Some(left.face(k as usize))
            };
            Ok(JoinSimplex {
                left: new_left,
                right: self.right.clone(),
            })
        } else {
            let right = self.right.as_ref().ok_or_else(|| {
                Error::Invalid("face index beyond the left part of a right-empty join".into())
            })?;
            let j = (k - ldim - 1) as usize;
            let new_right = if right.dim() == 0 {
                None
            } else {
                Some(right.face(j))
            };
            Ok(JoinSimplex {
                left: self.left.clone(),
                right: new_right,
            })
        }
    }
}

/// All join simplices of dimension at most d built from two skeleta.
pub fn join_skeleton(
    x: &Skeleton,
    y: &Skeleton,
    d: usize,
    caps: &Caps,
) -> Result<Vec<Vec<JoinSimplex>>> {
    let mut by_dim: Vec<Vec<JoinSimplex>> = Vec::with_capacity(d + 1);
    let mut total = 0u64;
    for n in 0..=d {
        let mut level: Vec<JoinSimplex> = Vec::new();
        if n < x.by_dim.len() {
            for c in &x.by_dim[n] {
                level.push(JoinSimplex {
                    left: Some(c.clone()),
                    right: None,
                });
            }
        }
        if n < y.by_dim.len() {
            for c in &y.by_dim[n] {
                level.push(JoinSimplex {
                    left: None,
                    right: Some(c.clone()),
                });
            }
        }
        for i in 0..n {
            let j = n - 1 - i;
            if i < x.by_dim.len() && j < y.by_dim.len() {
                for cx in &x.by_dim[i] {
                    for cy in &y.by_dim[j] {
                        level.push(JoinSimplex {
                            left: Some(cx.clone()),
                            right: Some(cy.clone()),
                        });
                    }
                }
            }
        }
        total += level.len() as u64;
        if total > caps.simplices {
            return Err(Error::Capacity {
                what: "join simplex count",
                value: total as u128,
                cap: caps.simplices as u128,
            });
        }
        by_dim.push(level);
    }
    Ok(by_dim)
}

/// Verification record for the equivariant inclusion of the full-family
/// skeleton into the join of a relatively closed subfamily and its
/// complement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JoinReport {
    pub preconditions_ok: bool,
    pub well_defined: bool,
    pub injective: bool,
    pub simplicial: bool,
    pub equivariant: bool,
    pub chains_checked: usize,
}

impl JoinReport {
    pub fn holds(&self) -> bool {
        self.preconditions_ok
            && self.well_defined
            && self.injective
            && self.simplicial
            && self.equivariant
    }
}

fn split_chain(
    group: &FiniteGroup,
    fam_g: &Family,
    fam_h: &Family,
    chain: &CosetChain,
) -> JoinSimplex {
    let mut split = -1i64;
    for (i, c) in chain.cosets.iter().enumerate() {
        let conj = coset_conj_subgroup(group, fam_g, c);
        if fam_h.member_index(&conj).is_some() {
            split = i as i64;
        }
    }
    let to_sub = |cs: &[Coset]| {
        if cs.is_empty() {
            None
        } else {
            Some(CosetChain {
                cosets: cs.to_vec(),
            })
        }
    };
    let cut = (split + 1) as usize;
    JoinSimplex {
        left: to_sub(&chain.cosets[..cut]),
        right: to_sub(&chain.cosets[cut..]),
    }
}

/// Remaps a chain's member indices from one family to another (the
/// subgroups must be members of the target family).
fn remap_chain(src: &Family, dst: &Family, chain: &CosetChain) -> Option<CosetChain> {
    let cosets = chain
        .cosets
        .iter()
        .map(|c| {
            dst.member_index(&src.members[c.subgroup as usize])
                .map(|mi| Coset {
                    subgroup: mi as u32,
                    rep: c.rep,
                })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(CosetChain { cosets })
}

pub fn join_inclusion_check(
    group: &FiniteGroup,
    fam_h: &Family,
    fam_g: &Family,
    d: usize,
    caps: &Caps,
) -> Result<JoinReport> {
    let preconditions_ok =
        fam_h.is_subfamily_of(fam_g) && fam_h.is_closed_relative_to(fam_g);
    if !preconditions_ok {
        return Ok(JoinReport {
            preconditions_ok,
            well_defined: false,
            injective: false,
            simplicial: false,
            equivariant: false,
            chains_checked: 0,
        });
    }
    let fam_rest = fam_g.difference(fam_h, group)?;
    let sk_g = skeleton(group, fam_g, d, caps)?;
    let sk_h = skeleton(group, fam_h, d, caps)?;
    let sk_rest = skeleton(group, &fam_rest, d, caps)?;
    let join = join_skeleton(&sk_h, &sk_rest, d, caps)?;
    let join_sets: Vec<BTreeSet<&JoinSimplex>> =
        join.iter().map(|level| level.iter().collect()).collect();

    // the image lives in the (E_H, E_rest) indexing
    let image_of = |chain: &CosetChain| -> Option<JoinSimplex> {
        let raw = split_chain(group, &sk_g.family, fam_h, chain);
        let left = match raw.left {
            None => None,
            Some(c) => Some(remap_chain(&sk_g.family, fam_h, &c)?),
        };
        let right = match raw.right {
            None => None,
            Some(c) => Some(remap_chain(&sk_g.family, &fam_rest, &c)?),
        };
        Some(JoinSimplex { left, right })
    };

    let mut well_defined = true;
    let mut injective = true;
    let mut simplicial = true;
    let mut equivariant = true;
    let mut seen: BTreeSet<JoinSimplex> = BTreeSet::new();
    let mut checked = 0usize;
    for chain in sk_g.by_dim.iter().flatten() {
        checked += 1;
        let Some(img) = image_of(chain) else {
            well_defined = false;
            continue;
        };
        let n = img.dim();
        if n as usize != chain.dim()
            || !join_sets
                .get(chain.dim())
                .is_some_and(|level| level.contains(&img))
        {
            well_defined = false;
            continue;
        }
        if !seen.insert(img.clone()) {
            injective = false;
        }
        // simplicial: faces commute with the splitting
        if chain.dim() >= 1 {
            for k in 0..=chain.dim() {
                let face_then_image = image_of(&chain.face(k));
                let image_then_face = img.face(k as i64).ok();
                if face_then_image.is_none()
                    || image_then_face.is_none()
                    || face_then_image != image_then_face
                {
                    simplicial = false;
                }
            }
        }
        // equivariance: the action passes to both join components
        for g in 0..group.order() {
            let moved = act(group, &sk_g.family, g, chain);
            let lhs = image_of(&moved);
            let rhs = JoinSimplex {
                left: img.left.as_ref().map(|c| act(group, fam_h, g, c)),
                right: img.right.as_ref().map(|c| act(group, &fam_rest, g, c)),
            };
            if lhs.as_ref() != Some(&rhs) {
                equivariant = false;
            }
        }
    }
    Ok(JoinReport {
        preconditions_ok,
        well_defined,
        injective,
        simplicial,
        equivariant,
        chains_checked: checked,
    })
}

/// A simplicial set with a group action, given concretely: a vertex set
/// with one permutation per group element, and simplices as ordered
/// vertex lists.
#[derive(Debug, Clone)]
pub struct SimplicialGSet {
    pub num_vertices: usize,
    /// `action[g][v]` is the image vertex of v under g.
    pub action: Vec<Vec<u32>>,
    pub simplices: Vec<Vec<u32>>,
}

impl SimplicialGSet {
    pub fn validate(&self, group: &FiniteGroup) -> Result<()> {
        if self.action.len() != group.order() as usize {
            return Err(Error::Invalid("action table length mismatch".into()));
        }
        for (g, perm) in self.action.iter().enumerate() {
            if perm.len() != self.num_vertices {
                return Err(Error::Invalid(format!("permutation {g} has wrong length")));
            }
            let mut seen = vec![false; self.num_vertices];
            for &v in perm {
                if v as usize >= self.num_vertices || seen[v as usize] {
                    return Err(Error::Invalid(format!("action of {g} is not a permutation")));
                }
                seen[v as usize] = true;
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul(a, b);
                for v in 0..self.num_vertices {
                    let lhs = self.action[a as usize][self.action[b as usize][v] as usize];
                    if lhs != self.action[ab as usize][v] {
                        return Err(Error::Invalid(format!(
                            "action is not a homomorphism at ({a}, {b})"
                        )));
                    }
                }
            }
        }
        for s in &self.simplices {
            if s.is_empty() || s.iter().any(|&v| v as usize >= self.num_vertices) {
                return Err(Error::Invalid("simplex vertex out of range".into()));
            }
        }
        Ok(())
    }

    pub fn vertex_stabilizer(&self, group: &FiniteGroup, v: u32) -> Subgroup {
        let elems = (0..group.order())
            .filter(|&g| self.action[g as usize][v as usize] == v)
            .collect();
        Subgroup { elems }
    }
}

/// The classifying map data: orbit representatives, the vertex-to-coset
/// assignment, and the image chain of every simplex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyingMap {
    pub orbit_reps: Vec<u32>,
    pub vertex_images: Vec<Coset>,
    pub simplex_images: Vec<CosetChain>,
}

/// Builds the classifying map of a simplicial group-set into the coset
/// model: each orbit representative maps to its stabilizer's coset, and
/// translates follow the action. Preconditions (setwise stabilizers fix
/// pointwise; fixing a vertex fixes all later vertices of a simplex;
/// stabilizers in the family) are checked and reported with the offending
/// simplex. The result is verified equivariant and simplicial.
pub fn classifying_map(
    group: &FiniteGroup,
    x: &SimplicialGSet,
    fam: &Family,
) -> Result<ClassifyingMap> {
    x.validate(group)?;

    for (si, s) in x.simplices.iter().enumerate() {
        for g in 0..group.order() {
            let perm = &x.action[g as usize];
            let moved: BTreeSet<u32> = s.iter().map(|&v| perm[v as usize]).collect();
            let orig: BTreeSet<u32> = s.iter().copied().collect();
            if moved == orig && s.iter().any(|&v| perm[v as usize] != v) {
                return Err(Error::Precondition(format!(
                    "element {g} permutes simplex {si} without fixing it pointwise"
                )));
            }
            // fixing a vertex must fix all later vertices
            let mut fixed_seen = false;
            for &v in s {
                let fixed = perm[v as usize] == v;
                if fixed_seen && !fixed {
                    return Err(Error::Precondition(format!(
                        "element {g} fixes an early vertex of simplex {si} but moves a later one"
                    )));
                }
                fixed_seen = fixed_seen || fixed;
            }
        }
    }

    // orbit representatives: least vertex per orbit
    let mut orbit_of: Vec<Option<usize>> = vec![None; x.num_vertices];
    let mut orbit_reps: Vec<u32> = Vec::new();
    let mut transporter: Vec<u32> = vec![0; x.num_vertices];
    for v in 0..x.num_vertices as u32 {
        if orbit_of[v as usize].is_some() {
            continue;
        }
        let oi = orbit_reps.len();
        orbit_reps.push(v);
        for g in 0..group.order() {
            let img = x.action[g as usize][v as usize];
            if orbit_of[img as usize].is_none() {
                orbit_of[img as usize] = Some(oi);
                transporter[img as usize] = g;
            }
        }
    }

    // stabilizers must be family members
    let mut stab_member: BTreeMap<u32, usize> = BTreeMap::new();
    for &rep in &orbit_reps {
        let stab = x.vertex_stabilizer(group, rep);
        let mi = fam.member_index(&stab).ok_or_else(|| {
            Error::Precondition(format!(
                "stabilizer of vertex {rep} is not a family member"
            ))
        })?;
        stab_member.insert(rep, mi);
    }

    let vertex_images: Vec<Coset> = (0..x.num_vertices as u32)
        .map(|v| {
            let oi = orbit_of[v as usize].unwrap();
            let rep = orbit_reps[oi];
            let mi = stab_member[&rep];
            Coset {
                subgroup: mi as u32,
                rep: canon_rep(group, &fam.members[mi], transporter[v as usize]),
            }
        })
        .collect();

    // equivariance of the vertex assignment
    for g in 0..group.order() {
        for v in 0..x.num_vertices {
            let moved = x.action[g as usize][v] as usize;
            let img = vertex_images[v];
            let expected = Coset {
                subgroup: img.subgroup,
                rep: canon_rep(
                    group,
                    &fam.members[img.subgroup as usize],
                    group.mul(g, img.rep),
                ),
            };
            if vertex_images[moved] != expected {
                return Err(Error::Internal(
                    "vertex assignment is not equivariant".into(),
                ));
            }
        }
    }

    // extend over simplices and validate the image chains
    let mut simplex_images = Vec::with_capacity(x.simplices.len());
    for (si, s) in x.simplices.iter().enumerate() {
        let chain = CosetChain {
            cosets: s.iter().map(|&v| vertex_images[v as usize]).collect(),
        };
        chain_valid(group, fam, &chain).map_err(|e| {
            Error::Precondition(format!("simplex {si} maps to an invalid chain: {e}"))
        })?;
        simplex_images.push(chain);
    }

    Ok(ClassifyingMap {
        orbit_reps,
        vertex_images,
        simplex_images,
    })
}

/// One simplex per line: `(dim, [(subgroup-id, rep-index), ...])`.
pub fn render_skeleton(skel: &Skeleton) -> String {
    let mut out = String::new();
    for level in &skel.by_dim {
        for chain in level {
            let body: Vec<String> = chain
                .cosets
                .iter()
                .map(|c| format!("({}, {})", c.subgroup, c.rep))
                .collect();
            out.push_str(&format!("({}, [{}])\n", chain.dim(), body.join(", ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FiniteGroup {
        FiniteGroup::cyclic(2)
    }

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], &Caps::default())
            .unwrap()
    }

    #[test]
    fn z2_free_model_counts() {
        let g = z2();
        let fam = Family::trivial_only(&g).unwrap();
        let sk = skeleton(&g, &fam, 3, &Caps::default()).unwrap();
        // two cosets of the trivial subgroup, chains alternate
        assert_eq!(sk.by_dim[0].len(), 2);
        assert_eq!(sk.by_dim[1].len(), 2);
        assert_eq!(sk.by_dim[2].len(), 2);
        assert_eq!(sk.by_dim[3].len(), 2);
    }

    #[test]
    fn z2_full_family_counts() {
        let g = z2();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        assert_eq!(sk.by_dim[0].len(), 3);
        assert_eq!(sk.by_dim[1].len(), 4);
    }

    #[test]
    fn trivial_group_skeleton() {
        let g = FiniteGroup::cyclic(1);
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let sk = skeleton(&g, &fam, 2, &Caps::default()).unwrap();
        assert_eq!(sk.by_dim[0].len(), 1);
        assert_eq!(sk.by_dim[1].len(), 0);
        assert_eq!(sk.by_dim[2].len(), 0);
    }

    #[test]
    fn action_examples() {
        let g = z2();
        let fam = Family::trivial_only(&g).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let v0 = &sk.by_dim[0][0];
        assert_eq!(act(&g, &fam, 0, v0), *v0);
        let moved = act(&g, &fam, 1, v0);
        assert_eq!(moved.cosets[0].rep, 1);
    }

    #[test]
    fn action_is_group_action_and_simplicial() {
        let g = s3();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let sk = skeleton(&g, &fam, 2, &Caps::default()).unwrap();
        for chain in sk.by_dim.iter().flatten().take(40) {
            for a in 0..g.order() {
                for b in 0..g.order() {
                    let lhs = act(&g, &fam, a, &act(&g, &fam, b, chain));
                    let rhs = act(&g, &fam, g.mul(a, b), chain);
                    assert_eq!(lhs, rhs);
                }
            }
            if chain.dim() >= 1 {
                for k in 0..=chain.dim() {
                    let lhs = act(&g, &fam, 2, &chain.face(k));
                    let rhs = act(&g, &fam, 2, chain).face(k);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn orbit_sizes_divide_group_order() {
        let g = s3();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let mut remaining: BTreeSet<CosetChain> =
            sk.by_dim[1].iter().cloned().collect();
        while let Some(chain) = remaining.iter().next().cloned() {
            let orbit: BTreeSet<CosetChain> = (0..g.order())
                .map(|e| act(&g, &fam, e, &chain))
                .collect();
            assert_eq!(g.order() as usize % orbit.len(), 0);
            for c in orbit {
                remaining.remove(&c);
            }
        }
    }

    #[test]
    fn fixed_complex_examples() {
        let g = z2();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let all = fixed_complex(&g, &sk, &Subgroup::trivial()).unwrap();
        assert_eq!(all.len(), sk.simplex_count());
        let full = fixed_complex(&g, &sk, &g.full_subgroup()).unwrap();
        // only chains starting at the whole-group coset
        assert!(full
            .iter()
            .all(|c| coset_conj_subgroup(&g, &fam, &c.cosets[0]).order() == 2));
        // only the vertex (G): the one candidate edge (G, G) is degenerate
        assert_eq!(full.len(), 1);
    }

    #[test]
    fn fixed_complex_empty_when_subgroup_not_below_members() {
        let g = s3();
        let fam = Family::trivial_only(&g).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let z3 = g.closure(&[g.mul(1, 2)]); // some nontrivial subgroup
        let fixed = fixed_complex(&g, &sk, &z3).unwrap();
        assert!(fixed.is_empty());
    }

    #[test]
    fn cone_examples() {
        let g = z2();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let full = g.full_subgroup();
        // cone over the vertex (G) itself: degenerate edge (G, G)
        let v = sk.by_dim[0]
            .iter()
            .find(|c| coset_conj_subgroup(&g, &fam, &c.cosets[0]).order() == 2)
            .unwrap();
        let cone = cone_contract(&g, &fam, &full, v).unwrap();
        assert_eq!(cone.cosets.len(), 2);
        assert_eq!(cone.cosets[0], cone.cosets[1]);
        assert!(!cone.is_nondegenerate());
        assert_eq!(cone.face(0), *v);
    }

    #[test]
    fn cone_chain_in_s3() {
        let g = s3();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let z3: Subgroup = fam
            .members
            .iter()
            .find(|m| m.order() == 3)
            .cloned()
            .unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let fixed = fixed_complex(&g, &sk, &z3).unwrap();
        for chain in &fixed {
            let cone = cone_contract(&g, &fam, &z3, chain).unwrap();
            chain_valid(&g, &fam, &cone).unwrap();
            assert_eq!(cone.face(0), *chain);
        }
        // the (Z/3, S3) edge cones to (Z/3, Z/3, S3)
        let edge = fixed
            .iter()
            .find(|c| c.dim() == 1 && coset_conj_subgroup(&g, &fam, &c.cosets[1]).order() == 6)
            .unwrap();
        let cone = cone_contract(&g, &fam, &z3, edge).unwrap();
        assert_eq!(cone.cosets.len(), 3);
    }

    #[test]
    fn union_check_z6_two_primes() {
        let g = FiniteGroup::cyclic(6);
        let subs = g.subgroups(&Caps::default()).unwrap();
        let z2m = subs.iter().find(|s| s.order() == 2).unwrap().clone();
        let z3m = subs.iter().find(|s| s.order() == 3).unwrap().clone();
        let fam_g = Family::new(&g, vec![Subgroup::trivial(), z2m]).unwrap();
        let fam_h = Family::new(&g, vec![Subgroup::trivial(), z3m]).unwrap();
        let rep = union_check(&g, &fam_g, &fam_h, 2, &Caps::default()).unwrap();
        assert!(rep.closedness_ok);
        assert!(rep.union_equal);
        assert!(rep.intersection_equal);
        assert_eq!(rep.intersection_member_count, 1);
    }

    #[test]
    fn union_check_same_family() {
        let g = s3();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let rep = union_check(&g, &fam, &fam, 1, &Caps::default()).unwrap();
        assert!(rep.closedness_ok && rep.union_equal && rep.intersection_equal);
    }

    #[test]
    fn union_check_s3_two_primes() {
        let g = s3();
        let fam2 = Family::p_hyperelementary_members(&g, 2, &Caps::default()).unwrap();
        let fam3 = Family::p_hyperelementary_members(&g, 3, &Caps::default()).unwrap();
        let rep = union_check(&g, &fam2, &fam3, 2, &Caps::default()).unwrap();
        assert!(rep.closedness_ok);
        assert!(rep.union_equal);
        assert!(rep.intersection_equal);
    }

    #[test]
    fn join_of_two_points_is_interval() {
        let g = FiniteGroup::cyclic(1);
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let pt = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let join = join_skeleton(&pt, &pt, 1, &Caps::default()).unwrap();
        assert_eq!(join[0].len(), 2); // the two endpoint inclusions
        assert_eq!(join[1].len(), 1); // the connecting 1-simplex
    }

    #[test]
    fn join_with_empty_left_embeds_right() {
        let g = z2();
        let fam = Family::trivial_only(&g).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let empty = Skeleton {
            family: fam.clone(),
            by_dim: vec![Vec::new(), Vec::new()],
        };
        let join = join_skeleton(&empty, &sk, 1, &Caps::default()).unwrap();
        assert_eq!(join[0].len(), sk.by_dim[0].len());
        assert!(join[0].iter().all(|j| j.left.is_none()));
        assert_eq!(join[1].len(), sk.by_dim[1].len());
    }

    #[test]
    fn join_of_two_point_sets() {
        // two 2-point discrete skeleta: 4 connecting 1-simplices
        let g = z2();
        let fam = Family::trivial_only(&g).unwrap();
        let sk = skeleton(&g, &fam, 0, &Caps::default()).unwrap();
        let join = join_skeleton(&sk, &sk, 1, &Caps::default()).unwrap();
        assert_eq!(join[0].len(), 4);
        let connecting: Vec<_> = join[1]
            .iter()
            .filter(|j| j.left.is_some() && j.right.is_some())
            .collect();
        assert_eq!(connecting.len(), 4);
    }

    #[test]
    fn join_inclusion_s3_cyclic_in_all() {
        let g = s3();
        let all = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let cyc = Family::cyclic_members(&g, &Caps::default()).unwrap();
        let rep = join_inclusion_check(&g, &cyc, &all, 2, &Caps::default()).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn join_inclusion_whole_family() {
        let g = z2();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let rep = join_inclusion_check(&g, &fam, &fam, 2, &Caps::default()).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn join_inclusion_trivial_in_all() {
        let g = z2();
        let all = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let triv = Family::trivial_only(&g).unwrap();
        let rep = join_inclusion_check(&g, &triv, &all, 2, &Caps::default()).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn classifying_map_left_translation() {
        let g = s3();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        let x = SimplicialGSet {
            num_vertices: 6,
            action: (0..6)
                .map(|a| (0..6).map(|v| g.mul(a, v)).collect())
                .collect(),
            simplices: (0..6u32).map(|v| vec![v]).collect(),
        };
        let map = classifying_map(&g, &x, &fam).unwrap();
        assert_eq!(map.orbit_reps, vec![0]);
        // every vertex maps to its own trivial coset
        for (v, img) in map.vertex_images.iter().enumerate() {
            assert_eq!(fam.members[img.subgroup as usize].order(), 1);
            assert_eq!(img.rep, v as u32);
        }
    }

    #[test]
    fn classifying_map_single_orbit_of_cosets() {
        let g = s3();
        let caps = Caps::default();
        let fam = Family::all_subgroups(&g, &caps).unwrap();
        // the orbit G/H for H of order 2: vertices are cosets of H
        let h = g.closure(&[1]);
        assert_eq!(h.order(), 2);
        let mut cosets: Vec<Vec<u32>> = Vec::new();
        for a in 0..g.order() {
            let mut c: Vec<u32> = h.elems.iter().map(|&x| g.mul(a, x)).collect();
            c.sort_unstable();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        let action: Vec<Vec<u32>> = (0..g.order())
            .map(|a| {
                cosets
                    .iter()
                    .map(|c| {
                        let mut moved: Vec<u32> = c.iter().map(|&x| g.mul(a, x)).collect();
                        moved.sort_unstable();
                        cosets.iter().position(|d| *d == moved).unwrap() as u32
                    })
                    .collect()
            })
            .collect();
        let x = SimplicialGSet {
            num_vertices: cosets.len(),
            action,
            simplices: (0..cosets.len() as u32).map(|v| vec![v]).collect(),
        };
        let map = classifying_map(&g, &x, &fam).unwrap();
        assert_eq!(map.orbit_reps.len(), 1);
        for img in &map.vertex_images {
            assert_eq!(fam.members[img.subgroup as usize].order(), 2);
        }
    }

    #[test]
    fn classifying_map_two_orbits() {
        let g = z2();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        // a swapped pair and a fixed point
        let x = SimplicialGSet {
            num_vertices: 3,
            action: vec![vec![0, 1, 2], vec![1, 0, 2]],
            simplices: vec![vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]],
        };
        let map = classifying_map(&g, &x, &fam).unwrap();
        assert_eq!(map.orbit_reps, vec![0, 2]);
        // equivariance spot check: the swap carries vertex 0's image to 1's
        let img0 = map.vertex_images[0];
        let img1 = map.vertex_images[1];
        assert_eq!(img0.subgroup, img1.subgroup);
        assert_ne!(img0.rep, img1.rep);
        for chain in &map.simplex_images {
            chain_valid(&g, &fam, chain).unwrap();
        }
    }

    #[test]
    fn classifying_map_rejects_bad_ordering() {
        let g = z2();
        let fam = Family::all_subgroups(&g, &Caps::default()).unwrap();
        // simplex (fixed vertex, moved vertex) violates the ordering rule
        let x = SimplicialGSet {
            num_vertices: 3,
            action: vec![vec![0, 1, 2], vec![1, 0, 2]],
            simplices: vec![vec![0], vec![1], vec![2], vec![2, 0]],
        };
        let err = classifying_map(&g, &x, &fam).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn render_format() {
        let g = z2();
        let fam = Family::trivial_only(&g).unwrap();
        let sk = skeleton(&g, &fam, 1, &Caps::default()).unwrap();
        let text = render_skeleton(&sk);
        let first = text.lines().next().unwrap();
        assert_eq!(first, "(0, [(0, 0)])");
        assert_eq!(text.lines().count(), 4);
    }
}
