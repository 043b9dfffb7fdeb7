//! The case classifier for hyperelementary subgroups of a finite quotient
//! G/(p^r A): each conjugacy class projects to Q either non-surjectively,
//! surjectively with kernel, or isomorphically. Isomorphic classes carry a
//! verified factorization through the expansion-p^r endomorphism whenever
//! p^r = 1 mod |Q|; kernel classes exhibit an invariant cyclic subgroup
//! inside the kernel. Also here: the small-norm kernel homomorphisms on
//! rank-2 lattices and their contraction factors.

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fingroup::{is_prime, FiniteGroup, Subgroup};
use crate::hyperelem::{hyperelementary_subgroups, HyperelemCert};
use crate::intmat::{self, IVec};
use crate::presentation::{Element, VAPresentation};
use crate::quotient::FiniteQuotient;
use crate::reducibility::{good_primes, invariant_line_bruteforce};
use crate::splitting::{factors_through_expansive, FactorWitness, SplittingData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    NotOnto,
    OntoNotInjective,
    Iso,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseTag::NotOnto => "NotOnto",
            CaseTag::OntoNotInjective => "OntoNotInjective",
            CaseTag::Iso => "Iso",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FactorizationStatus {
    /// Only isomorphic classes factor.
    NotApplicable,
    /// p^r is not 1 mod |Q|, so no expansion of that size exists.
    UnavailableAtThisR,
    Witness(FactorWitness),
}

/// Classification record for one hyperelementary conjugacy class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    /// Conjugacy representative inside the finite quotient.
    pub subgroup: Subgroup,
    pub order: u32,
    pub tag: CaseTag,
    pub cert: HyperelemCert,
    /// For the onto-with-kernel case: element indices (in the quotient) of
    /// a nontrivial cyclic subgroup of the kernel invariant under the
    /// lattice action.
    pub kernel_witness: Option<Vec<u32>>,
    pub factorization: FactorizationStatus,
}

/// A small generating set of a subgroup: greedily absorb the least
/// elements not yet generated.
pub fn generating_set(group: &FiniteGroup, h: &Subgroup) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut closure = Subgroup::trivial();
    for &x in &h.elems {
        if !closure.contains(x) {
            gens.push(x);
            closure = group.closure(&gens);
            if closure.order() == h.order() {
                break;
            }
        }
    }
    gens
}

fn q_part(fq: &FiniteQuotient, idx: u32) -> u32 {
    idx % fq.qorder
}

/// A nontrivial cyclic subgroup of the kernel invariant under the lattice
/// action mod the quotient modulus, as quotient element indices.
fn invariant_cyclic_in_kernel(
    pres: &VAPresentation,
    fq: &FiniteQuotient,
    kernel: &[u32],
) -> Result<Option<Vec<u32>>> {
    let m = fq.modulus;
    for &k in kernel {
        if k == 0 {
            continue;
        }
        let gen = fq.section(k);
        // multiples of the generator mod m
        let mut sub: Vec<IVec> = Vec::new();
        let mut acc = vec![0i64; pres.rank];
        loop {
            acc = intmat::vec_add(&acc, &gen.vec)?
                .iter()
                .map(|&x| x.rem_euclid(m))
                .collect();
            if acc.iter().all(|&x| x == 0) {
                break;
            }
            sub.push(acc.clone());
        }
        let contains = |x: &IVec| sub.iter().any(|s| s == x) || x.iter().all(|&v| v == 0);
        let mut invariant = true;
        for q in 0..pres.qorder() {
            let img: IVec = pres
                .action
                .apply(q, &gen.vec)?
                .iter()
                .map(|&x| x.rem_euclid(m))
                .collect();
            if !contains(&img) {
                invariant = false;
                break;
            }
        }
        if invariant {
            let mut indices = vec![0u32];
            for v in &sub {
                indices.push(fq.project(&Element::new(v.clone(), 0))?);
            }
            indices.sort_unstable();
            return Ok(Some(indices));
        }
    }
    Ok(None)
}

/// Classifies every hyperelementary conjugacy class of G/(p^r A) by the
/// image and kernel of its projection to Q. With |Q| = 1 the projection
/// is always onto, so the trivial class is the unique isomorphism and
/// every other class lands in the kernel case.
pub fn classify_subgroups(
    pres: &VAPresentation,
    p: u64,
    r: u32,
    caps: &Caps,
) -> Result<Vec<CaseReport>> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if !good_primes(pres.qorder() as u64, p).contains(&p) {
        return Err(Error::Precondition(format!(
            "{p} is not a good prime for |Q| = {}: need p coprime to |Q|, \
             p != 1 mod odd prime divisors of |Q|, and p = 3 mod 4 when |Q| is even",
            pres.qorder()
        )));
    }
    let modulus = (p as i64)
        .checked_pow(r)
        .ok_or(Error::Overflow("modulus"))?;
    let fq = pres.finite_quotient(modulus, caps)?;
    let qord = pres.qorder();
    let expansion_exists = modulus.rem_euclid(qord as i64) == 1;
    let splitting = SplittingData::new(pres);

    let classes = hyperelementary_subgroups(&fq.group, None, caps)?;
    let mut reports = Vec::with_capacity(classes.len());
    for (h, cert) in classes {
        let mut image: Vec<u32> = h.elems.iter().map(|&x| q_part(&fq, x)).collect();
        image.sort_unstable();
        image.dedup();
        let kernel: Vec<u32> = h
            .elems
            .iter()
            .copied()
            .filter(|&x| q_part(&fq, x) == 0)
            .collect();
        let onto = image.len() == qord as usize;
        let injective = kernel.len() == 1;
        let tag = if !onto {
            CaseTag::NotOnto
        } else if !injective {
            CaseTag::OntoNotInjective
        } else {
            CaseTag::Iso
        };

        let kernel_witness = if tag == CaseTag::OntoNotInjective {
            let w = invariant_cyclic_in_kernel(pres, &fq, &kernel)?;
            if w.is_none() {
                return Err(Error::Internal(
                    "onto-with-kernel class has no invariant cyclic subgroup in its kernel".into(),
                ));
            }
            w
        } else {
            None
        };

        let factorization = if tag != CaseTag::Iso {
            FactorizationStatus::NotApplicable
        } else if !expansion_exists {
            FactorizationStatus::UnavailableAtThisR
        } else {
            let gens: Vec<Element> = generating_set(&fq.group, &h)
                .into_iter()
                .map(|x| fq.section(x))
                .collect();
            let decision = factors_through_expansive(pres, &splitting, &gens, modulus, caps)?;
            if !decision.injective_to_q || !decision.qtorsion_in_split {
                return Err(Error::Internal(
                    "isomorphic class fails the factoring criterion".into(),
                ));
            }
            match decision.witness {
                Some(w) => FactorizationStatus::Witness(w),
                None => {
                    return Err(Error::Internal("missing factorization witness".into()));
                }
            }
        };

        reports.push(CaseReport {
            order: h.order(),
            subgroup: h,
            tag,
            cert,
            kernel_witness,
            factorization,
        });
    }
    Ok(reports)
}

/// The contrapositive consistency check: an irreducible action (no
/// invariant line) must produce no onto-with-kernel class at a good prime.
pub fn irreducibility_consistency(
    pres: &VAPresentation,
    p: u64,
    r: u32,
    caps: &Caps,
) -> Result<bool> {
    let oracle = invariant_line_bruteforce(&pres.action, &pres.q)?;
    let reports = classify_subgroups(pres, p, r, caps)?;
    let any_kernel_case = reports
        .iter()
        .any(|rep| rep.tag == CaseTag::OntoNotInjective);
    Ok(!(oracle.is_none() && any_kernel_case))
}

/// A homomorphism h(x, y) = u x + v y on the rank-2 lattice whose mod-p
/// kernel is a prescribed line, with u^2 + v^2 < 2p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelHom {
    pub u: i64,
    pub v: i64,
    pub p: u64,
    /// Canonical generator of the target line: (1, c) or (0, 1) mod p.
    pub line: (i64, i64),
}

impl KernelHom {
    pub fn norm_sq(&self) -> i64 {
        self.u * self.u + self.v * self.v
    }

    pub fn apply(&self, x: i64, y: i64) -> i64 {
        self.u * x + self.v * y
    }

    /// Canonical generator of the mod-p kernel of (u, v): the vector
    /// (v, -u) normalized to leading coefficient 1.
    pub fn kernel_line(&self) -> (i64, i64) {
        canonical_line(self.v, -self.u, self.p)
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p as i64;
        if self.norm_sq() >= 2 * p {
            return Err(Error::Invalid(format!(
                "norm^2 = {} is not below 2p = {}",
                self.norm_sq(),
                2 * p
            )));
        }
        if self.u.rem_euclid(p) == 0 && self.v.rem_euclid(p) == 0 {
            return Err(Error::Invalid("homomorphism vanishes mod p".into()));
        }
        if self.apply(self.line.0, self.line.1).rem_euclid(p) != 0 {
            return Err(Error::Invalid("line generator not in the kernel".into()));
        }
        if self.kernel_line() != self.line {
            return Err(Error::Invalid("kernel differs from the target line".into()));
        }
        Ok(())
    }
}

/// Normalizes a nonzero mod-p vector to the canonical line generator
/// (1, c) with c in [0, p), or (0, 1).
pub fn canonical_line(a: i64, b: i64, p: u64) -> (i64, i64) {
    let pi = p as i64;
    let (a, b) = (a.rem_euclid(pi), b.rem_euclid(pi));
    if a != 0 {
        let inv = mod_inverse(a, pi);
        (1, (b * inv).rem_euclid(pi))
    } else {
        (0, 1)
    }
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    let (_, x, _) = intmat::egcd(a.rem_euclid(p), p);
    x.rem_euclid(p)
}

/// Constructs the small-norm kernel homomorphism for a nontrivial cyclic
/// subgroup of (Z/p)^2. Lines inside a coordinate factor are killed by
/// projection to the other factor; otherwise the generator is (1, c) and a
/// pigeonhole over {r a mod p : 0 <= a <= sqrt(p)}, r the inverse of c,
/// yields coefficients below sqrt(p) each. Ties pick the lexicographically
/// least index pair.
pub fn small_norm_kernel_hom(p: u64, generator: (i64, i64)) -> Result<KernelHom> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    let pi = p as i64;
    let (g0, g1) = (generator.0.rem_euclid(pi), generator.1.rem_euclid(pi));
    if g0 == 0 && g1 == 0 {
        return Err(Error::Precondition("the subgroup must be nontrivial".into()));
    }
    let line = canonical_line(g0, g1, p);
    let hom = if line == (0, 1) {
        // the second factor: projection to the first works
        KernelHom {
            u: 1,
            v: 0,
            p,
            line,
        }
    } else if line == (1, 0) {
        KernelHom {
            u: 0,
            v: 1,
            p,
            line,
        }
    } else {
        let c = line.1;
        let r = mod_inverse(c, pi);
        let m = (p as f64).sqrt() as i64;
        let residues: Vec<i64> = (0..=m).map(|a| (r * a).rem_euclid(pi)).collect();
        let mut best: Option<(i64, (usize, usize))> = None;
        for a1 in 0..residues.len() {
            for a2 in a1 + 1..residues.len() {
                let d = (residues[a1] - residues[a2]).abs();
                let circ = d.min(pi - d);
                if best.as_ref().map_or(true, |&(bd, _)| circ < bd) {
                    best = Some((circ, (a1, a2)));
                }
            }
        }
        let (_, (a1, a2)) = best.ok_or_else(|| Error::Internal("pigeonhole scan empty".into()))?;
        let alpha = (a2 - a1) as i64;
        let rho = (r * alpha).rem_euclid(pi);
        let val = if 2 * rho > pi { rho - pi } else { rho };
        KernelHom {
            u: alpha,
            v: -val,
            p,
            line,
        }
    };
    hom.validate()?;
    Ok(hom)
}

/// Brute-force oracle: minimal norm^2 over all (u, v) with norm^2 < 2p
/// whose mod-p kernel is the given line. The lemma guarantees existence.
pub fn minimal_norm_kernel_hom(p: u64, generator: (i64, i64)) -> Option<KernelHom> {
    let pi = p as i64;
    let line = canonical_line(generator.0, generator.1, p);
    let bound = {
        let mut b = 0i64;
        while (b + 1) * (b + 1) < 2 * pi {
            b += 1;
        }
        b
    };
    let mut best: Option<KernelHom> = None;
    for u in -bound..=bound {
        for v in -bound..=bound {
            if u == 0 && v == 0 {
                continue;
            }
            let cand = KernelHom { u, v, p, line };
            if cand.norm_sq() >= 2 * pi {
                continue;
            }
            if cand.validate().is_ok()
                && best
                    .as_ref()
                    .map_or(true, |b| cand.norm_sq() < b.norm_sq())
            {
                best = Some(cand);
            }
        }
    }
    best
}

/// The length-contraction bookkeeping: applying h multiplies lengths by at
/// most |h|, while the expansion divides them by p, so the net factor is
/// |h|/p with square norm^2 / p^2 < 2/p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub norm_sq: i64,
    pub p: u64,
    pub p_sq: u64,
    /// norm^2 * p < 2 * p^2, i.e. norm^2/p^2 < 2/p, verified exactly.
    pub below_bound: bool,
}

pub fn contraction_factor(h: &KernelHom) -> Result<ContractionReport> {
    h.validate()?;
    let norm_sq = h.norm_sq();
    let p = h.p;
    let below = (norm_sq as i128) * (p as i128) < 2 * (p as i128) * (p as i128);
    if !below {
        return Err(Error::Internal(
            "contraction factor is not below the bound".into(),
        ));
    }
    Ok(ContractionReport {
        norm_sq,
        p,
        p_sq: p * p,
        below_bound: below,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin;

    #[test]
    fn dinf_trichotomy_at_3_1() {
        let p = builtin("Dinf").unwrap();
        let reports = classify_subgroups(&p, 3, 1, &Caps::default()).unwrap();
        assert_eq!(reports.len(), 4);
        let tags: Vec<(u32, CaseTag)> = reports.iter().map(|r| (r.order, r.tag)).collect();
        assert!(tags.contains(&(1, CaseTag::NotOnto)));
        assert!(tags.contains(&(3, CaseTag::NotOnto)));
        assert!(tags.contains(&(2, CaseTag::Iso)));
        assert!(tags.contains(&(6, CaseTag::OntoNotInjective)));
        for rep in &reports {
            match rep.tag {
                CaseTag::Iso => {
                    assert!(matches!(rep.factorization, FactorizationStatus::Witness(_)));
                }
                CaseTag::OntoNotInjective => {
                    let w = rep.kernel_witness.as_ref().unwrap();
                    assert_eq!(w.len(), 3);
                }
                CaseTag::NotOnto => {
                    assert!(rep.kernel_witness.is_none());
                }
            }
        }
    }

    #[test]
    fn trivial_q_convention() {
        let p = builtin("Z2").unwrap();
        let reports = classify_subgroups(&p, 3, 1, &Caps::default()).unwrap();
        // projection to the trivial group is always onto; only the trivial
        // class is injective
        for rep in &reports {
            if rep.order == 1 {
                assert_eq!(rep.tag, CaseTag::Iso);
            } else {
                assert_eq!(rep.tag, CaseTag::OntoNotInjective);
                assert!(rep.kernel_witness.is_some());
            }
        }
        assert!(reports.iter().all(|r| r.tag != CaseTag::NotOnto));
    }

    #[test]
    fn consistency_examples() {
        let caps = Caps::default();
        assert!(irreducibility_consistency(&builtin("p4").unwrap(), 3, 1, &caps).unwrap());
        assert!(irreducibility_consistency(&builtin("Dinf").unwrap(), 3, 1, &caps).unwrap());
        assert!(irreducibility_consistency(&builtin("Z2negI").unwrap(), 3, 1, &caps).unwrap());
    }

    #[test]
    fn bad_prime_rejected() {
        let p = builtin("p4").unwrap();
        let err = classify_subgroups(&p, 5, 1, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn kernel_hom_factor_case() {
        for p in [2u64, 5, 97] {
            let h = small_norm_kernel_hom(p, (1, 0)).unwrap();
            assert_eq!((h.u, h.v), (0, 1));
        }
    }

    #[test]
    fn kernel_hom_p5_example() {
        let h = small_norm_kernel_hom(5, (1, 2)).unwrap();
        assert_eq!((h.u, h.v), (2, -1));
        assert_eq!(h.apply(1, 2), 0);
        assert_eq!(h.norm_sq(), 5);
    }

    #[test]
    fn kernel_hom_p13_example() {
        let h = small_norm_kernel_hom(13, (1, 5)).unwrap();
        assert!(h.norm_sq() < 26);
        assert_eq!(h.apply(1, 5).rem_euclid(13), 0);
        assert_eq!((h.u, h.v), (3, 2));
    }

    #[test]
    fn kernel_hom_exhaustive_small() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let pi = p as i64;
            let mut lines = vec![(0i64, 1i64)];
            for c in 0..pi {
                lines.push((1, c));
            }
            assert_eq!(lines.len(), p as usize + 1);
            for line in lines {
                let h = small_norm_kernel_hom(p, line).unwrap();
                assert!(h.norm_sq() < 2 * pi, "p={p} line={line:?}");
                assert_eq!(h.kernel_line(), line);
                let min = minimal_norm_kernel_hom(p, line).unwrap();
                assert!(h.norm_sq() >= min.norm_sq());
            }
        }
    }

    #[test]
    fn contraction_examples() {
        let h = KernelHom {
            u: 0,
            v: 1,
            p: 101,
            line: (1, 0),
        };
        let c = contraction_factor(&h).unwrap();
        assert_eq!(c.norm_sq, 1);
        assert_eq!(c.p_sq, 10201);
        assert!(c.below_bound);

        let h = small_norm_kernel_hom(5, (1, 2)).unwrap();
        let c = contraction_factor(&h).unwrap();
        assert_eq!(c.norm_sq, 5); // 5/25 = 1/5 < 2/5
        let h = small_norm_kernel_hom(13, (1, 5)).unwrap();
        let c = contraction_factor(&h).unwrap();
        assert_eq!(c.norm_sq, 13); // 13/169 = 1/13 < 2/13
    }

    #[test]
    fn generating_sets_are_small() {
        let p = builtin("Dinf").unwrap();
        let fq = p.finite_quotient(3, &Caps::default()).unwrap();
        let full = fq.group.full_subgroup();
        let gens = generating_set(&fq.group, &full);
        assert!(gens.len() <= 2);
        assert_eq!(fq.group.closure(&gens).order(), 6);
    }
}
