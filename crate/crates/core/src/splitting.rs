//! The splitting toolkit: from a choice of preimages x_j over the finite
//! quotient Q, the correction map `beta(g) = sum_j A-part(g x_j x_{pi(g)j}^{-1})`
//! assembles a homomorphism `(beta, pi)` into the split companion group.
//! Composing with scalar expansion gives the expansive endomorphisms
//! `g -> (n beta(g) + vec(g), q(g))` of expansion `1 + n |Q|`, and the
//! effective construction of a crystallographic quotient of the same rank.

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::intmat::{self, IMat, IVec};
use crate::presentation::{Cocycle, Element, LatticeAction, VAPresentation};

/// A choice of preimage x_j for every j in Q, with x_1 = 1. The default
/// choice lifts each j to (0, j); any valid choice yields the same
/// decisions (not the same values) in the operations below.
#[derive(Debug, Clone)]
pub struct SplittingData<'p> {
    pub pres: &'p VAPresentation,
    pub reps: Vec<Element>,
}

impl<'p> SplittingData<'p> {
    pub fn new(pres: &'p VAPresentation) -> Self {
        let reps = (0..pres.qorder())
            .map(|q| Element::new(vec![0; pres.rank], q))
            .collect();
        SplittingData { pres, reps }
    }

    pub fn with_reps(pres: &'p VAPresentation, reps: Vec<Element>) -> Result<Self> {
        if reps.len() != pres.qorder() as usize {
            return Err(Error::Invalid(format!(
                "need {} representatives, got {}",
                pres.qorder(),
                reps.len()
            )));
        }
        for (j, r) in reps.iter().enumerate() {
            pres.check_element(r)?;
            if r.q != j as u32 {
                return Err(Error::Invalid(format!(
                    "representative {j} lies over Q-index {}",
                    r.q
                )));
            }
        }
        if reps[0] != pres.identity() {
            return Err(Error::Invalid(
                "the representative over the identity must be the identity".into(),
            ));
        }
        Ok(SplittingData { pres, reps })
    }

    /// The lattice part of the product over j of `g x_j x_{pi(g) j}^{-1}`.
    /// Every factor lands in the lattice; the sum is exact.
    pub fn beta(&self, g: &Element) -> Result<IVec> {
        let p = self.pres;
        p.check_element(g)?;
        let mut acc = vec![0i64; p.rank];
        for j in 0..p.qorder() {
            let target = p.q.mul(g.q, j);
            let t = p.multiply(&p.multiply(g, &self.reps[j as usize])?,
                               &p.inverse(&self.reps[target as usize])?)?;
            if t.q != 0 {
                return Err(Error::Internal(format!(
                    "beta factor at j = {j} does not land in the lattice (presentation corruption)"
                )));
            }
            acc = intmat::vec_add(&acc, &t.vec)?;
        }
        Ok(acc)
    }

    /// `(beta(g), pi(g))` as an element of the split companion
    /// presentation (same rank, Q, and action, zero cocycle).
    pub fn hom(&self, g: &Element) -> Result<Element> {
        Ok(Element::new(self.beta(g)?, g.q))
    }

    /// `beta` of the zero-vector lift of q; beta(a, q) decomposes as
    /// `|Q| a + beta_of_q(q)`.
    pub fn beta_of_q(&self, q: u32) -> Result<IVec> {
        self.beta(&Element::new(vec![0; self.pres.rank], q))
    }
}

/// The endomorphism `g -> (n beta(g) + vec(g), q(g))`, of expansion
/// `1 + n |Q|` on the lattice coordinate after splitting.
#[derive(Debug, Clone)]
pub struct ExpansiveMap<'p> {
    pub splitting: SplittingData<'p>,
    pub n: i64,
}

impl<'p> ExpansiveMap<'p> {
    pub fn new(splitting: SplittingData<'p>, n: i64) -> Self {
        ExpansiveMap { splitting, n }
    }

    pub fn expansion(&self) -> Result<i64> {
        intmat::checked_add(
            1,
            intmat::checked_mul(self.n, self.splitting.pres.qorder() as i64)?,
        )
    }

    pub fn apply(&self, g: &Element) -> Result<Element> {
        let beta = self.splitting.beta(g)?;
        let vec = intmat::vec_add(&intmat::vec_scale(self.n, &beta)?, &g.vec)?;
        Ok(Element::new(vec, g.q))
    }

    /// True when splitting the image equals scaling the split lattice
    /// coordinate by the expansion.
    pub fn diagram_commutes(&self, g: &Element) -> Result<bool> {
        let lhs = self.splitting.hom(&self.apply(g)?)?;
        let split = self.splitting.hom(g)?;
        let rhs = Element::new(
            intmat::vec_scale(self.expansion()?, &split.vec)?,
            split.q,
        );
        Ok(lhs == rhs)
    }
}

/// The crystallographic quotient of a presentation: the image of the group
/// under `(beta, pi)` followed by `Q -> alpha(Q)`, re-presented over its
/// own translation lattice. The quotient has the same rank, a faithful
/// point-group action, and finite kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrystQuotient {
    pub target: VAPresentation,
    /// Q-index of the source to Q-index of the target.
    pub q_map: Vec<u32>,
    /// Rows: basis of the image translation lattice in ambient coordinates.
    pub basis: IMat,
    /// Per target Q-element: the ambient lattice part of the chosen
    /// transversal representative.
    pub reps: Vec<IVec>,
    /// The (finite) kernel of the quotient map, listed explicitly.
    pub kernel: Vec<Element>,
}

impl CrystQuotient {
    /// Image of a source element, in the coordinates of `target`.
    pub fn apply(&self, source: &VAPresentation, g: &Element) -> Result<Element> {
        let s = SplittingData::new(source);
        let beta = s.beta(g)?;
        let qp = self.q_map[g.q as usize];
        let l = intmat::vec_sub(&beta, &self.reps[qp as usize])?;
        let coords = intmat::lattice_coordinates(&self.basis, &l)?.ok_or_else(|| {
            Error::Internal("image does not decompose over the image lattice".into())
        })?;
        Ok(Element::new(coords, qp))
    }
}

/// Builds the crystallographic quotient: map the standard generators
/// through `(beta, pi)` composed with `Q -> alpha(Q)`, close the lattice
/// parts of products landing over the identity (Schreier generators), and
/// take the Hermite basis of the resulting sublattice.
pub fn crystallographic_quotient(p: &VAPresentation, _caps: &Caps) -> Result<CrystQuotient> {
    let n = p.rank;
    let qord = p.qorder();
    let s = SplittingData::new(p);

    // the image point group: distinct action matrices, identity first,
    // the rest sorted by flattened entries
    let mut distinct: Vec<IMat> = Vec::new();
    for m in &p.action.mats {
        if !distinct.contains(m) {
            distinct.push(m.clone());
        }
    }
    let id = intmat::mat_identity(n);
    distinct.retain(|m| *m != id);
    distinct.sort();
    distinct.insert(0, id);
    let qp_order = distinct.len() as u32;
    let index_of = |m: &IMat| -> Result<u32> {
        distinct
            .iter()
            .position(|x| x == m)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Internal("matrix image not closed".into()))
    };
    let mut qp_mul = vec![0u32; (qp_order * qp_order) as usize];
    for (i, a) in distinct.iter().enumerate() {
        for (j, b) in distinct.iter().enumerate() {
            qp_mul[i * qp_order as usize + j] = index_of(&intmat::mat_mul(a, b)?)?;
        }
    }
    let qp_group = FiniteGroup::from_mul_table_trusted(qp_order, qp_mul)?;
    let q_map: Vec<u32> = (0..qord)
        .map(|q| index_of(&p.action.mats[q as usize]))
        .collect::<Result<_>>()?;

    // generators of the image inside the ambient semidirect product
    // (lattice part, target Q-index)
    let mut gens: Vec<(IVec, u32)> = Vec::new();
    for i in 0..n {
        let mut v = vec![0i64; n];
        v[i] = qord as i64;
        gens.push((v, 0));
    }
    for q in 1..qord {
        gens.push((s.beta_of_q(q)?, q_map[q as usize]));
    }

    // ambient semidirect multiplication over the image point group
    let amb_mul = |a: &(IVec, u32), b: &(IVec, u32)| -> Result<(IVec, u32)> {
        let moved = intmat::mat_vec(&distinct[a.1 as usize], &b.0)?;
        Ok((
            intmat::vec_add(&a.0, &moved)?,
            qp_group.mul(a.1, b.1),
        ))
    };
    let amb_inv = |a: &(IVec, u32)| -> Result<(IVec, u32)> {
        let qi = qp_group.inv(a.1);
        let v = intmat::vec_neg(&intmat::mat_vec(&distinct[qi as usize], &a.0)?)?;
        Ok((v, qi))
    };

    // BFS transversal over the point group
    let mut transversal: Vec<Option<(IVec, u32)>> = vec![None; qp_order as usize];
    transversal[0] = Some((vec![0i64; n], 0));
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(u) = queue.pop_front() {
        let w = transversal[u as usize].clone().unwrap();
        for g in &gens {
            let next = amb_mul(&w, g)?;
            let slot = next.1 as usize;
            if transversal[slot].is_none() {
                queue.push_back(next.1);
                transversal[slot] = Some(next);
            }
        }
    }
    let transversal: Vec<(IVec, u32)> = transversal
        .into_iter()
        .map(|t| t.ok_or_else(|| Error::Internal("image does not reach the point group".into())))
        .collect::<Result<_>>()?;

    // Schreier generators of the kernel lattice
    let mut lattice_rows: Vec<IVec> = Vec::new();
    for w in &transversal {
        for g in &gens {
            let wg = amb_mul(w, g)?;
            let k = amb_mul(&wg, &amb_inv(&transversal[wg.1 as usize])?)?;
            debug_assert_eq!(k.1, 0);
            if !intmat::is_zero_vec(&k.0) {
                lattice_rows.push(k.0);
            }
        }
    }
    let basis = intmat::row_hnf(&lattice_rows)?;
    if basis.len() != n {
        return Err(Error::Internal(format!(
            "image lattice has rank {} instead of {n}",
            basis.len()
        )));
    }

    // the point-group action in lattice coordinates
    let mut mats = Vec::with_capacity(qp_order as usize);
    for m in &distinct {
        let mut cols: Vec<IVec> = Vec::with_capacity(n);
        for b in &basis {
            let img = intmat::mat_vec(m, b)?;
            let coords = intmat::lattice_coordinates(&basis, &img)?.ok_or_else(|| {
                Error::Internal("image lattice is not invariant".into())
            })?;
            cols.push(coords);
        }
        let mat: IMat = (0..n)
            .map(|i| (0..n).map(|j| cols[j][i]).collect())
            .collect();
        mats.push(mat);
    }

    // the cocycle of the image extension over the chosen transversal
    let mut cocycle = Cocycle::zero(n, qp_order as usize);
    for a in 0..qp_order {
        for b in 0..qp_order {
            let ab = qp_group.mul(a, b);
            let prod = amb_mul(&transversal[a as usize], &transversal[b as usize])?;
            let k = amb_mul(&prod, &amb_inv(&transversal[ab as usize])?)?;
            debug_assert_eq!(k.1, 0);
            let coords = intmat::lattice_coordinates(&basis, &k.0)?.ok_or_else(|| {
                Error::Internal("cocycle value escapes the image lattice".into())
            })?;
            cocycle.set(a, b, coords);
        }
    }

    let name = p
        .name
        .as_ref()
        .map(|s| format!("{s}-crystallographic"));
    let target = VAPresentation::new(
        n,
        qp_group,
        LatticeAction { rank: n, mats },
        cocycle,
        name,
    )?;

    // the kernel: elements (a, q) with trivial matrix and |Q| a = -beta_q
    let mut kernel = Vec::new();
    for q in 0..qord {
        if q_map[q as usize] != 0 {
            continue;
        }
        let bq = s.beta_of_q(q)?;
        if bq.iter().all(|&x| x.rem_euclid(qord as i64) == 0) {
            let a: IVec = bq.iter().map(|&x| -x / qord as i64).collect();
            kernel.push(Element::new(a, q));
        }
    }

    Ok(CrystQuotient {
        target,
        q_map,
        basis,
        reps: transversal.into_iter().map(|(v, _)| v).collect(),
        kernel,
    })
}

/// Outcome of the factoring criterion for a finitely generated subgroup
/// against the expansive map of expansion r.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorDecision {
    /// The image of the subgroup in G/(r A) injects into Q.
    pub injective_to_q: bool,
    /// The image in the split companion mod r is |Q|-torsion. Always equal
    /// to `injective_to_q`; both routes are computed independently.
    pub qtorsion_in_split: bool,
    pub witness: Option<FactorWitness>,
}

impl FactorDecision {
    pub fn factors(&self) -> bool {
        self.injective_to_q
    }
}

/// A verified factorization: conjugating the subgroup by `conjugator`
/// lands it in the image of the expansion-r endomorphism, with the listed
/// preimages of the conjugated generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorWitness {
    pub conjugator: Element,
    pub expansion: i64,
    pub preimage_gens: Vec<Element>,
}

impl FactorWitness {
    /// Re-verifies the witness: applying the expansive map built from the
    /// same splitting data to each preimage must reproduce the conjugated
    /// generator exactly.
    pub fn verify(&self, p: &VAPresentation, s: &SplittingData<'_>, gens: &[Element]) -> Result<()> {
        let qord = p.qorder() as i64;
        let n = (self.expansion - 1) / qord;
        let e = ExpansiveMap::new(s.clone(), n);
        if self.preimage_gens.len() != gens.len() {
            return Err(Error::Internal("witness generator count mismatch".into()));
        }
        for (x, g) in self.preimage_gens.iter().zip(gens) {
            let conj = p.conjugate(&self.conjugator, g)?;
            if e.apply(x)? != conj {
                return Err(Error::Internal(format!(
                    "expansive image of {x} is not the conjugated generator"
                )));
            }
        }
        Ok(())
    }
}

/// Decides whether the subgroup generated by `gens` factors (up to
/// conjugacy) through the expansive map of expansion r, by the injectivity
/// of its image in G/(r A) over Q. Requires `r = 1 mod |Q|`; together with
/// the torsion-free lattice this makes the subgroup automatically free of
/// r-torsion. Both equivalent criteria are evaluated and compared.
pub fn factors_through_expansive(
    p: &VAPresentation,
    s: &SplittingData<'_>,
    gens: &[Element],
    r: i64,
    caps: &Caps,
) -> Result<FactorDecision> {
    let qord = p.qorder() as i64;
    if r < 1 || r.rem_euclid(qord) != 1 {
        return Err(Error::Precondition(format!(
            "expansion {r} is not congruent to 1 mod |Q| = {qord}"
        )));
    }
    let n_mult = (r - 1) / qord;
    let fq = p.finite_quotient(r, caps)?;
    let mut seed = Vec::new();
    for g in gens {
        seed.push(fq.project(g)?);
    }
    let image = fq.group.closure(&seed);

    // criterion: the image injects into Q
    let injective_to_q = image
        .elems
        .iter()
        .all(|&x| x == 0 || fq.section(x).q != 0);

    // independent route: |Q|-torsion of the split image mod r
    let split = p.semidirect();
    let split_fq = split.finite_quotient(r, caps)?;
    let mut qtorsion_in_split = true;
    for &x in &image.elems {
        let lift = fq.section(x);
        let img = s.hom(&lift)?;
        let idx = split_fq.project(&img)?;
        let ord = split_fq.group.order_of(idx);
        if qord % ord as i64 != 0 {
            qtorsion_in_split = false;
            break;
        }
    }
    if injective_to_q != qtorsion_in_split {
        return Err(Error::Internal(format!(
            "criteria disagree: injective-to-Q = {injective_to_q}, |Q|-torsion = {qtorsion_in_split}"
        )));
    }

    if !injective_to_q {
        return Ok(FactorDecision {
            injective_to_q,
            qtorsion_in_split,
            witness: None,
        });
    }

    // exhaustive conjugator search over the finite quotient
    for cand in 0..fq.order() {
        let k = fq.section(cand);
        let mut preimages = Vec::with_capacity(gens.len());
        let mut ok = true;
        for g in gens {
            let conj = p.conjugate(&k, g)?;
            let beta = s.beta(&conj)?;
            if beta.iter().any(|&b| b.rem_euclid(r) != 0) {
                ok = false;
                break;
            }
            let beta_q = s.beta_of_q(conj.q)?;
            let mut v = Vec::with_capacity(p.rank);
            let mut exact = true;
            for i in 0..p.rank {
                let num = conj.vec[i] - n_mult * beta_q[i];
                if num % r != 0 {
                    exact = false;
                    break;
                }
                v.push(num / r);
            }
            if !exact {
                ok = false;
                break;
            }
            preimages.push(Element::new(v, conj.q));
        }
        if ok {
            let witness = FactorWitness {
                conjugator: k,
                expansion: r,
                preimage_gens: preimages,
            };
            witness.verify(p, s, gens)?;
            return Ok(FactorDecision {
                injective_to_q,
                qtorsion_in_split,
                witness: Some(witness),
            });
        }
    }
    Err(Error::Internal(
        "no conjugator found although the injectivity criterion holds".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin;

    #[test]
    fn beta_on_lattice_multiplies_by_qorder() {
        let p = builtin("Dinf").unwrap();
        let s = SplittingData::new(&p);
        for a in [-3i64, 0, 1, 7] {
            assert_eq!(s.beta(&Element::new(vec![a], 0)).unwrap(), vec![2 * a]);
        }
    }

    #[test]
    fn beta_dinf_reflection() {
        let p = builtin("Dinf").unwrap();
        let s = SplittingData::new(&p);
        assert_eq!(s.beta(&Element::new(vec![1], 1)).unwrap(), vec![2]);
    }

    #[test]
    fn beta_twisted_z() {
        let p = builtin("twistedZ").unwrap();
        let s = SplittingData::new(&p);
        assert_eq!(s.beta(&Element::new(vec![0], 1)).unwrap(), vec![1]);
        assert_eq!(s.hom(&Element::new(vec![0], 1)).unwrap(), Element::new(vec![1], 1));
    }

    #[test]
    fn splitting_hom_identity_and_lattice() {
        let p = builtin("Dinf").unwrap();
        let s = SplittingData::new(&p);
        assert_eq!(s.hom(&p.identity()).unwrap(), p.identity());
        assert_eq!(
            s.hom(&Element::new(vec![5], 0)).unwrap(),
            Element::new(vec![10], 0)
        );
    }

    #[test]
    fn splitting_hom_is_homomorphism() {
        for name in ["Dinf", "twistedZ", "p4", "pg"] {
            let p = builtin(name).unwrap();
            let split = p.semidirect();
            let s = SplittingData::new(&p);
            let samples = [
                Element::new(vec![1; p.rank], 1 % p.qorder()),
                Element::new(vec![-2; p.rank], p.qorder() - 1),
                Element::new(vec![3; p.rank], 0),
            ];
            for a in &samples {
                for b in &samples {
                    let lhs = s.hom(&p.multiply(a, b).unwrap()).unwrap();
                    let rhs = split.multiply(&s.hom(a).unwrap(), &s.hom(b).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "{name}");
                }
            }
        }
    }

    #[test]
    fn expansive_endo_examples() {
        let p = builtin("Dinf").unwrap();
        let e = ExpansiveMap::new(SplittingData::new(&p), 1);
        assert_eq!(e.expansion().unwrap(), 3);
        assert_eq!(
            e.apply(&Element::new(vec![1], 0)).unwrap(),
            Element::new(vec![3], 0)
        );
        // the zero-vector reflection lift is fixed: beta((0, s)) = 0 with
        // the default representatives, consistent with the factoring of its
        // span through every odd expansion
        assert_eq!(
            e.apply(&Element::new(vec![0], 1)).unwrap(),
            Element::new(vec![0], 1)
        );
        assert_eq!(
            e.apply(&Element::new(vec![1], 1)).unwrap(),
            Element::new(vec![3], 1)
        );
        let id_map = ExpansiveMap::new(SplittingData::new(&p), 0);
        let g = Element::new(vec![4], 1);
        assert_eq!(id_map.apply(&g).unwrap(), g);
    }

    #[test]
    fn expansive_diagram_dinf() {
        let p = builtin("Dinf").unwrap();
        let e = ExpansiveMap::new(SplittingData::new(&p), 1);
        let g = Element::new(vec![1], 0);
        // both routes evaluate to (6, id)
        assert_eq!(
            e.splitting.hom(&e.apply(&g).unwrap()).unwrap(),
            Element::new(vec![6], 0)
        );
        assert!(e.diagram_commutes(&g).unwrap());
    }

    #[test]
    fn cryst_quotient_kills_trivially_acting_q() {
        let p = builtin("ZxZ2").unwrap();
        let c = crystallographic_quotient(&p, &Caps::default()).unwrap();
        assert_eq!(c.target.rank, 1);
        assert_eq!(c.target.qorder(), 1);
        assert!(c.target.is_faithful());
    }

    #[test]
    fn cryst_quotient_of_z4_through_signs_is_dihedral() {
        // rank 1, Q = Z/4 acting through ±1
        let q = FiniteGroup::cyclic(4);
        let p = VAPresentation::new(
            1,
            q,
            LatticeAction {
                rank: 1,
                mats: vec![vec![vec![1]], vec![vec![-1]], vec![vec![1]], vec![vec![-1]]],
            },
            Cocycle::zero(1, 4),
            Some("z4-signs".into()),
        )
        .unwrap();
        let c = crystallographic_quotient(&p, &Caps::default()).unwrap();
        let dinf = builtin("Dinf").unwrap();
        assert_eq!(c.target.rank, 1);
        assert_eq!(c.target.q, dinf.q);
        assert_eq!(c.target.action, dinf.action);
        assert_eq!(c.target.cocycle, dinf.cocycle);
        // kernel is the trivially-acting half of Q over compatible vectors
        assert_eq!(c.kernel.len(), 2);
    }

    #[test]
    fn cryst_quotient_twisted_z_is_injective() {
        let p = builtin("twistedZ").unwrap();
        let c = crystallographic_quotient(&p, &Caps::default()).unwrap();
        assert_eq!(c.target.rank, 1);
        assert_eq!(c.target.qorder(), 1);
        assert_eq!(c.kernel.len(), 1); // only the identity
        assert_eq!(c.kernel[0], p.identity());
    }

    #[test]
    fn cryst_quotient_respects_multiplication() {
        for name in ["Dinf", "twistedZ", "pg", "p4", "ZxZ3"] {
            let p = builtin(name).unwrap();
            let c = crystallographic_quotient(&p, &Caps::default()).unwrap();
            assert_eq!(c.target.rank, p.rank);
            assert!(c.target.is_faithful(), "{name}");
            let samples = [
                Element::new(vec![1; p.rank], p.qorder() - 1),
                Element::new(vec![-1; p.rank], 1 % p.qorder()),
                Element::new(vec![2; p.rank], 0),
            ];
            for a in &samples {
                for b in &samples {
                    let lhs = c.apply(&p, &p.multiply(a, b).unwrap()).unwrap();
                    let rhs = c
                        .target
                        .multiply(&c.apply(&p, a).unwrap(), &c.apply(&p, b).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs, "{name}");
                }
            }
        }
    }

    #[test]
    fn factors_dinf_torsion_subgroup() {
        let p = builtin("Dinf").unwrap();
        let s = SplittingData::new(&p);
        let gens = [Element::new(vec![0], 1)];
        let d = factors_through_expansive(&p, &s, &gens, 3, &Caps::default()).unwrap();
        assert!(d.factors());
        let w = d.witness.unwrap();
        assert_eq!(w.preimage_gens, vec![Element::new(vec![0], 1)]);
        w.verify(&p, &s, &gens).unwrap();
    }

    #[test]
    fn factors_dinf_lattice_does_not_factor() {
        let p = builtin("Dinf").unwrap();
        let s = SplittingData::new(&p);
        let gens = [Element::new(vec![1], 0)];
        let d = factors_through_expansive(&p, &s, &gens, 3, &Caps::default()).unwrap();
        assert!(!d.factors());
        assert!(d.witness.is_none());
    }

    #[test]
    fn factors_p4_rotation_with_trivial_conjugator() {
        let p = builtin("p4").unwrap();
        let s = SplittingData::new(&p);
        let gens = [Element::new(vec![0, 0], 1)];
        let d = factors_through_expansive(&p, &s, &gens, 9, &Caps::default()).unwrap();
        assert!(d.factors());
        let w = d.witness.unwrap();
        assert_eq!(w.conjugator, p.identity());
        assert_eq!(w.preimage_gens, vec![Element::new(vec![0, 0], 1)]);
    }

    #[test]
    fn factors_requires_congruent_expansion() {
        let p = builtin("p4").unwrap();
        let s = SplittingData::new(&p);
        let gens = [p.identity()];
        assert!(matches!(
            factors_through_expansive(&p, &s, &gens, 3, &Caps::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn decisions_do_not_depend_on_representatives() {
        let p = builtin("Dinf").unwrap();
        let default = SplittingData::new(&p);
        let shifted = SplittingData::with_reps(
            &p,
            vec![p.identity(), Element::new(vec![3], 1)],
        )
        .unwrap();
        for gens in [vec![Element::new(vec![0], 1)], vec![Element::new(vec![1], 0)]] {
            let a = factors_through_expansive(&p, &default, &gens, 3, &Caps::default())
                .unwrap()
                .factors();
            let b = factors_through_expansive(&p, &shifted, &gens, 3, &Caps::default())
                .unwrap()
                .factors();
            assert_eq!(a, b);
        }
        // the diagram commutes for any valid choice of representatives
        for n in 0..3 {
            let e = ExpansiveMap::new(shifted.clone(), n);
            for g in [Element::new(vec![2], 1), Element::new(vec![-1], 0)] {
                assert!(e.diagram_commutes(&g).unwrap());
            }
        }
    }
}
