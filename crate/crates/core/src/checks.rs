//! The invariant suite: every module's contract, run as a deterministic
//! seeded battery. The same functions back the `check` command and the
//! acceptance tests, so a passing suite is the library's exit criterion.
//!
//! Coverage map (check name -> contract):
//!   va-core/element-laws          associativity, identity, inverse laws
//!   va-core/quotient-homomorphism projection is a homomorphism, kernel m Z^n
//!   va-core/quotient-order        |G/(m A)| = m^n |Q|
//!   va-core/subgroup-enumeration  counts for S3 and Z/6, closure revalidation
//!   splitting/hom-law             (beta, pi) multiplicative, beta = |Q| on A
//!   splitting/expansive-diagram   split-then-scale equals expand-then-split
//!   splitting/endo-law            expansive maps are endomorphisms
//!   splitting/crystallographic    faithful same-rank quotient, finite kernel
//!   splitting/factor-criteria     injectivity-to-Q equals |Q|-torsion route
//!   hyperelementary/two-primes-cyclic  p- and q-hyperelementary forces cyclic
//!   hyperelementary/metacyclic-exponent  exponent p^w whenever w >= s
//!   hyperelementary/union-over-primes  unrestricted list = union of p-lists
//!   hyperelementary/cert-revalidation  certificates re-validate
//!   reducibility/sign-character-exhaustive  |Q|-torsion units are signs
//!   reducibility/quotient-implication  detection implies an invariant line
//!   induction/dinf-trichotomy     the four reports of the order-6 quotient
//!   induction/p4-irreducible      no kernel case at the order-324 quotient
//!   induction/case-partition      tags recompute from images and kernels
//!   induction/kernel-hom-exhaustive  norm^2 < 2p with the correct kernel
//!   induction/contraction-factors norm^2/p^2 < 2/p exactly
//!   cosetspace/z2-counts          hand-enumerated skeleton counts
//!   cosetspace/cone-face0         cones are valid chains; face 0 recovers
//!   cosetspace/union-identities   union/intersection of two-prime families
//!   cosetspace/join-inclusion     the join embedding is checked
//!   cosetspace/two-prime-families p-members meet q-members in cyclic members
//!   lines/stability               line(g^m) = line(g)
//!   lines/action-factoring        conjugation factors through the point group
//!   lines/orbit-partition         box enumeration and exact orbit partitions

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::classify::{
    classify_subgroups, contraction_factor, minimal_norm_kernel_hom, small_norm_kernel_hom,
    CaseTag, FactorizationStatus,
};
use crate::corpus::{finite_corpus, finite_corpus_small, s3};
use crate::cosetspace::{
    chain_valid, cone_contract, fixed_complex, join_inclusion_check, skeleton, union_check,
    Family,
};
use crate::error::{Error, Result};
use crate::fingroup::{primes_upto, FiniteGroup, Subgroup};
use crate::hyperelem::{hyperelementary_subgroups, is_p_hyperelementary, metacyclic_exponent};
use crate::intmat;
use crate::lines::{conj_action, line_of, line_orbits, PointedLine};
use crate::presentation::{builtin, catalog, Cocycle, Element, VAPresentation};
use crate::reducibility::{detect_via_quotient, good_primes, invariant_line_bruteforce, CyclicSearch};
use crate::splitting::{factors_through_expansive, ExpansiveMap, SplittingData};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &str, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn from_result(name: &str, res: Result<String>) -> Self {
        match res {
            Ok(detail) => CheckOutcome::pass(name, detail),
            Err(e) => CheckOutcome {
                name: name.into(),
                passed: false,
                detail: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckSummary {
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckSummary {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let tag = if o.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {}\n", o.name, o.detail));
        }
        let passed = self.outcomes.iter().filter(|o| o.passed).count();
        out.push_str(&format!(
            "{} checks, {} passed, {} failed (seed {})\n",
            self.outcomes.len(),
            passed,
            self.outcomes.len() - passed,
            self.seed
        ));
        out
    }
}

fn random_element(rng: &mut ChaCha8Rng, p: &VAPresentation) -> Element {
    let vec = (0..p.rank).map(|_| rng.gen_range(-9..=9)).collect();
    Element::new(vec, rng.gen_range(0..p.qorder()))
}

fn err(msg: String) -> Error {
    Error::Invalid(msg)
}

/// Presentations for the randomized sweeps; a corrupted copy of the
/// catalog is injected by the check command's fault hook to exercise the
/// failure path end to end.
pub fn catalog_or(corrupted: bool) -> Vec<VAPresentation> {
    let mut groups = catalog();
    if corrupted {
        let mut bad_cocycle = Cocycle::zero(1, 2);
        bad_cocycle.set(1, 1, vec![1]);
        let dinf = builtin("Dinf").expect("catalog");
        groups.push(VAPresentation::from_raw_parts(
            1,
            dinf.q,
            dinf.action,
            bad_cocycle,
            Some("corrupted".into()),
        ));
    }
    groups
}

// ---------------------------------------------------------------- va-core

pub fn check_element_laws(seed: u64, groups: &[VAPresentation]) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if groups.len() < 8 {
            return Err(err(format!("catalog has only {} groups", groups.len())));
        }
        for p in groups {
            p.validate().map_err(|e| {
                err(format!(
                    "presentation {} violates an invariant: {e}",
                    p.name.as_deref().unwrap_or("?")
                ))
            })?;
            let id = p.identity();
            for _ in 0..1000 {
                let a = random_element(&mut rng, p);
                let b = random_element(&mut rng, p);
                let c = random_element(&mut rng, p);
                let ab_c = p.multiply(&p.multiply(&a, &b)?, &c)?;
                let a_bc = p.multiply(&a, &p.multiply(&b, &c)?)?;
                if ab_c != a_bc {
                    return Err(err(format!("associativity fails in {:?}", p.name)));
                }
                if p.multiply(&a, &id)? != a || p.multiply(&id, &a)? != a {
                    return Err(err(format!("identity law fails in {:?}", p.name)));
                }
                let inv = p.inverse(&a)?;
                if p.multiply(&a, &inv)? != id || p.multiply(&inv, &a)? != id {
                    return Err(err(format!("inverse law fails in {:?}", p.name)));
                }
            }
        }
        Ok(format!("{} groups x 1000 triples", groups.len()))
    };
    CheckOutcome::from_result("va-core/element-laws", run())
}

pub fn check_quotient_homomorphism(seed: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x71);
        let mut pairs = 0usize;
        for p in catalog() {
            let m = if p.rank >= 3 { 2 } else { 3 };
            let fq = p.finite_quotient(m, &caps)?;
            for _ in 0..1000 {
                let a = random_element(&mut rng, &p);
                let b = random_element(&mut rng, &p);
                let lhs = fq.project(&p.multiply(&a, &b)?)?;
                let rhs = fq.group.mul(fq.project(&a)?, fq.project(&b)?);
                if lhs != rhs {
                    return Err(err(format!("projection not multiplicative in {:?}", p.name)));
                }
                pairs += 1;
                // kernel: exactly the scaled lattice over the identity
                let in_kernel = fq.project(&a)? == 0;
                let expected = a.q == 0 && a.vec.iter().all(|&x| x.rem_euclid(m) == 0);
                if in_kernel != expected {
                    return Err(err(format!("projection kernel wrong in {:?}", p.name)));
                }
            }
        }
        Ok(format!("{pairs} random pairs"))
    };
    CheckOutcome::from_result("va-core/quotient-homomorphism", run())
}

pub fn check_quotient_order() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut cases = 0;
        for p in catalog() {
            for m in 1..=3i64 {
                let expected = (m as u128).pow(p.rank as u32) * p.qorder() as u128;
                if expected > caps.group_order as u128 {
                    continue;
                }
                let fq = p.finite_quotient(m, &caps)?;
                if fq.order() as u128 != expected {
                    return Err(err(format!(
                        "order of {:?} mod {m} is {} not {expected}",
                        p.name,
                        fq.order()
                    )));
                }
                cases += 1;
            }
        }
        Ok(format!("{cases} (group, modulus) pairs"))
    };
    CheckOutcome::from_result("va-core/quotient-order", run())
}

pub fn check_subgroup_enumeration() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let s3g = s3();
        if s3g.subgroups(&caps)?.len() != 6 {
            return Err(err("S3 must have 6 subgroups".into()));
        }
        if s3g.subgroup_classes(&caps)?.len() != 4 {
            return Err(err("S3 must have 4 conjugacy classes".into()));
        }
        if FiniteGroup::cyclic(6).subgroups(&caps)?.len() != 4 {
            return Err(err("Z/6 must have 4 subgroups".into()));
        }
        let mut validated = 0;
        for (name, g) in finite_corpus_small()? {
            for sub in g.subgroups(&caps)? {
                sub.validate(&g)
                    .map_err(|e| err(format!("{name}: invalid subgroup: {e}")))?;
                validated += 1;
            }
        }
        Ok(format!("{validated} subgroups revalidated"))
    };
    CheckOutcome::from_result("va-core/subgroup-enumeration", run())
}

// --------------------------------------------------------------- splitting

pub fn check_splitting_hom_law(seed: u64, groups: &[VAPresentation]) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x591);
        if groups.len() < 8 {
            return Err(err("need at least 8 catalog groups".into()));
        }
        for p in groups {
            let split = p.semidirect();
            let s = SplittingData::new(p);
            for _ in 0..1000 {
                let a = random_element(&mut rng, p);
                let b = random_element(&mut rng, p);
                let lhs = s.hom(&p.multiply(&a, &b)?)?;
                let rhs = split.multiply(&s.hom(&a)?, &s.hom(&b)?)?;
                if lhs != rhs {
                    return Err(err(format!("splitting hom not multiplicative in {:?}", p.name)));
                }
            }
            // beta on the lattice multiplies by |Q|
            for _ in 0..50 {
                let mut a = random_element(&mut rng, p);
                a.q = 0;
                let beta = s.beta(&a)?;
                let expected = intmat::vec_scale(p.qorder() as i64, &a.vec)?;
                if beta != expected {
                    return Err(err(format!("beta on the lattice wrong in {:?}", p.name)));
                }
            }
        }
        Ok(format!("{} groups x 1000 pairs", groups.len()))
    };
    CheckOutcome::from_result("splitting/hom-law", run())
}

pub fn check_expansive_diagram(seed: u64, groups: &[VAPresentation]) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1a);
        let mut total = 0usize;
        for p in groups {
            for n in 0..4i64 {
                let e = ExpansiveMap::new(SplittingData::new(p), n);
                for _ in 0..500 {
                    let g = random_element(&mut rng, p);
                    if !e.diagram_commutes(&g)? {
                        return Err(err(format!(
                            "diagram fails for n = {n} in {:?} at {g}",
                            p.name
                        )));
                    }
                    total += 1;
                }
            }
        }
        Ok(format!("{total} commuting squares"))
    };
    CheckOutcome::from_result("splitting/expansive-diagram", run())
}

pub fn check_expansive_endo_law(seed: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe0d0);
        for p in catalog() {
            for n in 0..3i64 {
                let e = ExpansiveMap::new(SplittingData::new(&p), n);
                for _ in 0..200 {
                    let a = random_element(&mut rng, &p);
                    let b = random_element(&mut rng, &p);
                    let lhs = e.apply(&p.multiply(&a, &b)?)?;
                    let rhs = p.multiply(&e.apply(&a)?, &e.apply(&b)?)?;
                    if lhs != rhs {
                        return Err(err(format!("expansive map not an endomorphism in {:?}", p.name)));
                    }
                }
            }
        }
        Ok("catalog x n in 0..3 x 200 pairs".into())
    };
    CheckOutcome::from_result("splitting/endo-law", run())
}

pub fn check_crystallographic(seed: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0de);
        for p in catalog() {
            let c = crate::splitting::crystallographic_quotient(&p, &caps)?;
            if c.target.rank != p.rank {
                return Err(err(format!("rank changed for {:?}", p.name)));
            }
            if !c.target.is_faithful() {
                return Err(err(format!("quotient action not faithful for {:?}", p.name)));
            }
            for _ in 0..200 {
                let a = random_element(&mut rng, &p);
                let b = random_element(&mut rng, &p);
                let lhs = c.apply(&p, &p.multiply(&a, &b)?)?;
                let rhs = c
                    .target
                    .multiply(&c.apply(&p, &a)?, &c.apply(&p, &b)?)?;
                if lhs != rhs {
                    return Err(err(format!("quotient map not multiplicative for {:?}", p.name)));
                }
            }
            // the kernel is a finite set closed under multiplication
            if c.kernel.len() > p.qorder() as usize {
                return Err(err(format!("kernel too large for {:?}", p.name)));
            }
            for a in &c.kernel {
                for b in &c.kernel {
                    let prod = p.multiply(a, b)?;
                    if !c.kernel.contains(&prod) {
                        return Err(err(format!("kernel not closed for {:?}", p.name)));
                    }
                }
            }
        }
        Ok("catalog: faithful, same rank, multiplicative, finite kernel".into())
    };
    CheckOutcome::from_result("splitting/crystallographic", run())
}

pub fn check_factor_criteria() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut decided = 0usize;
        // sweep subgroups of small quotients: the two routes of the
        // factoring criterion are compared inside the call
        for (name, r) in [("Dinf", 3i64), ("Dinf", 5), ("ZxZ2", 3), ("twistedZ", 3)] {
            let p = builtin(name)?;
            let s = SplittingData::new(&p);
            let fq = p.finite_quotient(r, &caps)?;
            for h in fq.group.subgroup_classes(&caps)? {
                let gens: Vec<Element> = crate::classify::generating_set(&fq.group, &h)
                    .into_iter()
                    .map(|x| fq.section(x))
                    .collect();
                if gens.is_empty() {
                    continue;
                }
                let d = factors_through_expansive(&p, &s, &gens, r, &caps)?;
                if d.injective_to_q != d.qtorsion_in_split {
                    return Err(err("criteria disagree".into()));
                }
                decided += 1;
            }
        }
        let p4 = builtin("p4")?;
        let s = SplittingData::new(&p4);
        let d = factors_through_expansive(
            &p4,
            &s,
            &[Element::new(vec![0, 0], 1)],
            9,
            &caps,
        )?;
        if !d.factors() {
            return Err(err("rotation subgroup must factor through expansion 9".into()));
        }
        decided += 1;
        Ok(format!("{decided} subgroup decisions, both routes equal"))
    };
    CheckOutcome::from_result("splitting/factor-criteria", run())
}

// ---------------------------------------------------------- hyperelementary

pub fn check_two_primes_cyclic() -> CheckOutcome {
    let run = || -> Result<String> {
        let mut tested = 0;
        for (name, g) in finite_corpus()? {
            if g.order() > 200 {
                continue;
            }
            let primes = primes_upto(g.order() as u64);
            for (i, &p) in primes.iter().enumerate() {
                for &q in &primes[i + 1..] {
                    let both = is_p_hyperelementary(&g, p)?.is_some()
                        && is_p_hyperelementary(&g, q)?.is_some();
                    if both && !g.is_cyclic() {
                        return Err(err(format!(
                            "{name} is {p}- and {q}-hyperelementary but not cyclic"
                        )));
                    }
                    tested += 1;
                }
            }
        }
        Ok(format!("{tested} (group, prime pair) cases"))
    };
    CheckOutcome::from_result("hyperelementary/two-primes-cyclic", run())
}

pub fn check_metacyclic_exponent() -> CheckOutcome {
    let run = || -> Result<String> {
        let mut cases = 0;
        for p in [2u64, 3, 5] {
            for s in 1..=4u32 {
                for w in s..=4u32 {
                    let ps1 = p.pow(s - 1) as i64;
                    for n in 0..ps1 {
                        match metacyclic_exponent(p, s, w, n) {
                            Ok(e) => {
                                if e != p.pow(w) {
                                    return Err(err(format!(
                                        "exponent({p},{s},{w},{n}) = {e}, expected {}",
                                        p.pow(w)
                                    )));
                                }
                                cases += 1;
                            }
                            Err(Error::Invalid(_)) => {} // twist not an action: skip
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        Ok(format!("{cases} valid (p, s, w, n) grids, all p^w"))
    };
    CheckOutcome::from_result("hyperelementary/metacyclic-exponent", run())
}

pub fn check_union_over_primes() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut groups = 0;
        for (name, g) in finite_corpus_small()? {
            let unrestricted: Vec<Subgroup> = hyperelementary_subgroups(&g, None, &caps)?
                .into_iter()
                .map(|(h, _)| h)
                .collect();
            let mut union: Vec<Subgroup> = Vec::new();
            for p in primes_upto(g.order() as u64).into_iter().chain([2]) {
                for (h, _) in hyperelementary_subgroups(&g, Some(p), &caps)? {
                    if !union.contains(&h) {
                        union.push(h);
                    }
                }
            }
            union.sort();
            let mut unres = unrestricted.clone();
            unres.sort();
            if unres != union {
                return Err(err(format!("{name}: union over primes differs")));
            }
            groups += 1;
        }
        Ok(format!("{groups} corpus groups"))
    };
    CheckOutcome::from_result("hyperelementary/union-over-primes", run())
}

pub fn check_cert_revalidation() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut certs = 0;
        for (name, g) in finite_corpus_small()? {
            for (h, cert) in hyperelementary_subgroups(&g, None, &caps)? {
                cert.validate(&g, &h)
                    .map_err(|e| err(format!("{name}: certificate fails: {e}")))?;
                certs += 1;
            }
        }
        Ok(format!("{certs} certificates"))
    };
    CheckOutcome::from_result("hyperelementary/cert-revalidation", run())
}

// ------------------------------------------------------------ reducibility

pub fn check_sign_character_exhaustive(p_max: u64, q_max: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut pairs = 0;
        for qorder in 1..=q_max {
            for p in good_primes(qorder, p_max) {
                // every unit of order dividing |Q| must be a sign
                for u in 1..p {
                    let mut acc = 1u64;
                    for _ in 0..qorder {
                        acc = acc * u % p;
                    }
                    if acc == 1 && u != 1 && u != p - 1 {
                        return Err(err(format!(
                            "unit {u} mod {p} has order dividing {qorder} but is not a sign"
                        )));
                    }
                }
                pairs += 1;
            }
        }
        Ok(format!("{pairs} good (p, |Q|) pairs"))
    };
    CheckOutcome::from_result("reducibility/sign-character-exhaustive", run())
}

pub fn check_quotient_implication() -> CheckOutcome {
    let run = || -> Result<String> {
        let mut detections = 0;
        let mut runs = 0;
        for p in catalog() {
            for prime in good_primes(p.qorder() as u64, 30) {
                for r in 1..=2u32 {
                    if (prime as i64).pow(r) > 5_000 {
                        continue;
                    }
                    // the implication and the averaged-witness invariants
                    // are asserted inside the detection
                    let rep = detect_via_quotient(&p, prime, r, CyclicSearch::OrderP)?;
                    if !rep.implication_holds {
                        return Err(err(format!(
                            "implication fails for {:?} at ({prime}, {r})",
                            p.name
                        )));
                    }
                    if rep.finding.is_some() {
                        detections += 1;
                    }
                    runs += 1;
                }
            }
        }
        if detections == 0 {
            return Err(err("sweep never detected an invariant subgroup".into()));
        }
        Ok(format!("{runs} runs, {detections} detections, implication holds"))
    };
    CheckOutcome::from_result("reducibility/quotient-implication", run())
}

// --------------------------------------------------------------- induction

pub fn check_dinf_trichotomy() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let p = builtin("Dinf")?;
        let reports = classify_subgroups(&p, 3, 1, &caps)?;
        if reports.len() != 4 {
            return Err(err(format!("expected 4 reports, got {}", reports.len())));
        }
        let mut tags: Vec<(u32, CaseTag)> = reports.iter().map(|r| (r.order, r.tag)).collect();
        tags.sort_by_key(|t| t.0);
        let expected = vec![
            (1, CaseTag::NotOnto),
            (2, CaseTag::Iso),
            (3, CaseTag::NotOnto),
            (6, CaseTag::OntoNotInjective),
        ];
        if tags != expected {
            return Err(err(format!("unexpected case table: {tags:?}")));
        }
        for rep in &reports {
            match rep.tag {
                CaseTag::Iso => {
                    let FactorizationStatus::Witness(w) = &rep.factorization else {
                        return Err(err("isomorphic class lacks a witness".into()));
                    };
                    if w.expansion != 3 {
                        return Err(err("expected an expansion-3 witness".into()));
                    }
                }
                CaseTag::OntoNotInjective => {
                    let Some(k) = &rep.kernel_witness else {
                        return Err(err("kernel class lacks a cyclic witness".into()));
                    };
                    if k.len() != 3 {
                        return Err(err("kernel witness must be the order-3 subgroup".into()));
                    }
                }
                CaseTag::NotOnto => {}
            }
        }
        Ok("four reports match the expected table".into())
    };
    CheckOutcome::from_result("induction/dinf-trichotomy", run())
}

pub fn check_p4_irreducible() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let p = builtin("p4")?;
        if invariant_line_bruteforce(&p.action, &p.q)?.is_some() {
            return Err(err("the order-4 rotation must have no invariant line".into()));
        }
        let reports = classify_subgroups(&p, 3, 2, &caps)?;
        let mut iso = 0;
        for rep in &reports {
            if rep.tag == CaseTag::OntoNotInjective {
                return Err(err("kernel case appeared for an irreducible action".into()));
            }
            if rep.tag == CaseTag::Iso {
                let FactorizationStatus::Witness(w) = &rep.factorization else {
                    return Err(err("isomorphic class lacks a witness".into()));
                };
                if w.expansion != 9 {
                    return Err(err("expected expansion 9".into()));
                }
                iso += 1;
            }
        }
        if iso == 0 {
            return Err(err("no isomorphic classes found".into()));
        }
        Ok(format!(
            "{} classes over the order-324 quotient, {iso} isomorphic, none onto-with-kernel",
            reports.len()
        ))
    };
    CheckOutcome::from_result("induction/p4-irreducible", run())
}

pub fn check_case_partition() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut classes = 0;
        for (name, prime, r) in [
            ("Dinf", 3u64, 1u32),
            ("pm", 3, 1),
            ("p2", 3, 1),
            ("Z2", 3, 1),
            ("p4", 3, 1),
            ("twistedZ", 3, 1),
        ] {
            let p = builtin(name)?;
            let fq = p.finite_quotient((prime as i64).pow(r), &caps)?;
            let reports = classify_subgroups(&p, prime, r, &caps)?;
            for rep in &reports {
                // recompute the tag from scratch
                let mut image: Vec<u32> =
                    rep.subgroup.elems.iter().map(|&x| x % fq.qorder).collect();
                image.sort_unstable();
                image.dedup();
                let kernel = rep
                    .subgroup
                    .elems
                    .iter()
                    .filter(|&&x| x % fq.qorder == 0)
                    .count();
                let expected = if image.len() != fq.qorder as usize {
                    CaseTag::NotOnto
                } else if kernel != 1 {
                    CaseTag::OntoNotInjective
                } else {
                    CaseTag::Iso
                };
                if rep.tag != expected {
                    return Err(err(format!("{name}: stored tag differs from recomputation")));
                }
                rep.cert
                    .validate(&fq.group, &rep.subgroup)
                    .map_err(|e| err(format!("{name}: certificate fails: {e}")))?;
                classes += 1;
            }
        }
        Ok(format!("{classes} classes recomputed"))
    };
    CheckOutcome::from_result("induction/case-partition", run())
}

pub fn check_kernel_hom_exhaustive(p_max: u64, oracle_max: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut homs = 0;
        for p in primes_upto(p_max) {
            let pi = p as i64;
            let mut lines: Vec<(i64, i64)> = vec![(0, 1)];
            for c in 0..pi {
                lines.push((1, c));
            }
            for line in lines {
                let h = small_norm_kernel_hom(p, line)?;
                if h.norm_sq() >= 2 * pi {
                    return Err(err(format!("norm bound fails at p = {p}, line {line:?}")));
                }
                if h.kernel_line() != line {
                    return Err(err(format!("kernel wrong at p = {p}, line {line:?}")));
                }
                if p <= oracle_max {
                    let min = minimal_norm_kernel_hom(p, line).ok_or_else(|| {
                        err(format!("oracle found no qualifying map at p = {p}"))
                    })?;
                    if h.norm_sq() < min.norm_sq() {
                        return Err(err("constructed norm beats the claimed minimum".into()));
                    }
                }
                homs += 1;
            }
        }
        Ok(format!("{homs} (p, line) cases, norms below 2p"))
    };
    CheckOutcome::from_result("induction/kernel-hom-exhaustive", run())
}

pub fn check_contraction_factors() -> CheckOutcome {
    let run = || -> Result<String> {
        let mut cases = 0;
        for p in primes_upto(200) {
            for line in [(0i64, 1i64), (1, 1), (1, (p as i64) - 1)] {
                let h = small_norm_kernel_hom(p, line)?;
                let c = contraction_factor(&h)?;
                // norm^2 / p^2 < 2 / p exactly
                if (c.norm_sq as i128) * (p as i128) >= 2 * (p as i128) * (p as i128) {
                    return Err(err(format!("contraction bound fails at p = {p}")));
                }
                cases += 1;
            }
        }
        Ok(format!("{cases} contraction factors below 2/p"))
    };
    CheckOutcome::from_result("induction/contraction-factors", run())
}

// -------------------------------------------------------------- cosetspace

pub fn check_z2_counts() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let g = FiniteGroup::cyclic(2);
        let free = skeleton(&g, &Family::trivial_only(&g)?, 4, &caps)?;
        let free_counts: Vec<usize> = free.by_dim.iter().map(|v| v.len()).collect();
        if free_counts != vec![2, 2, 2, 2, 2] {
            return Err(err(format!("free model counts {free_counts:?}")));
        }
        let full = skeleton(&g, &Family::all_subgroups(&g, &caps)?, 1, &caps)?;
        if full.by_dim[0].len() != 3 || full.by_dim[1].len() != 4 {
            return Err(err(format!(
                "full family counts ({}, {})",
                full.by_dim[0].len(),
                full.by_dim[1].len()
            )));
        }
        Ok("free model 2/2/2/2/2, full family 3/4".into())
    };
    CheckOutcome::from_result("cosetspace/z2-counts", run())
}

pub fn check_cone_face0() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let corpus: Vec<(&str, FiniteGroup)> = vec![
            ("Z2", FiniteGroup::cyclic(2)),
            ("Z4", FiniteGroup::cyclic(4)),
            ("Z6", FiniteGroup::cyclic(6)),
            ("S3", s3()),
        ];
        let mut cones = 0;
        for (name, g) in corpus {
            let fam = Family::all_subgroups(&g, &caps)?;
            let sk = skeleton(&g, &fam, 3, &caps)?;
            for chain in sk.by_dim.iter().flatten() {
                chain_valid(&g, &fam, chain)
                    .map_err(|e| err(format!("{name}: emitted chain invalid: {e}")))?;
            }
            for h in &fam.members {
                let fixed = fixed_complex(&g, &sk, h)?;
                for chain in &fixed {
                    let cone = cone_contract(&g, &fam, h, chain)?;
                    chain_valid(&g, &fam, &cone)
                        .map_err(|e| err(format!("{name}: cone invalid: {e}")))?;
                    if cone.face(0) != *chain {
                        return Err(err(format!("{name}: face 0 does not recover the chain")));
                    }
                    cones += 1;
                }
            }
        }
        Ok(format!("{cones} cones validated with face-0 recovery"))
    };
    CheckOutcome::from_result("cosetspace/cone-face0", run())
}

pub fn check_union_identities() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        // Z/6 with the 2-part and 3-part families
        let z6 = FiniteGroup::cyclic(6);
        let subs = z6.subgroups(&caps)?;
        let z2m = subs.iter().find(|s| s.order() == 2).unwrap().clone();
        let z3m = subs.iter().find(|s| s.order() == 3).unwrap().clone();
        let fam_g = Family::new(&z6, vec![Subgroup::trivial(), z2m])?;
        let fam_h = Family::new(&z6, vec![Subgroup::trivial(), z3m])?;
        let rep = union_check(&z6, &fam_g, &fam_h, 2, &caps)?;
        if !(rep.closedness_ok && rep.union_equal && rep.intersection_equal) {
            return Err(err(format!("Z/6 union identities fail: {rep:?}")));
        }
        if rep.intersection_member_count != 1 {
            return Err(err("Z/6: intersection family must be the trivial family".into()));
        }
        // S3 with 2- and 3-hyperelementary families
        let g = s3();
        let fam2 = Family::p_hyperelementary_members(&g, 2, &caps)?;
        let fam3 = Family::p_hyperelementary_members(&g, 3, &caps)?;
        let rep = union_check(&g, &fam2, &fam3, 2, &caps)?;
        if !(rep.closedness_ok && rep.union_equal && rep.intersection_equal) {
            return Err(err(format!("S3 union identities fail: {rep:?}")));
        }
        Ok("union and intersection identities hold through dimension 2".into())
    };
    CheckOutcome::from_result("cosetspace/union-identities", run())
}

pub fn check_join_inclusion() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let g = s3();
        let all = Family::all_subgroups(&g, &caps)?;
        let cyc = Family::cyclic_members(&g, &caps)?;
        let rep = join_inclusion_check(&g, &cyc, &all, 2, &caps)?;
        if !rep.holds() {
            return Err(err(format!("join inclusion fails: {rep:?}")));
        }
        let z2 = FiniteGroup::cyclic(2);
        let all2 = Family::all_subgroups(&z2, &caps)?;
        let triv = Family::trivial_only(&z2)?;
        let rep2 = join_inclusion_check(&z2, &triv, &all2, 2, &caps)?;
        if !rep2.holds() {
            return Err(err(format!("trivial-family inclusion fails: {rep2:?}")));
        }
        Ok(format!(
            "embeddings checked on {} + {} chains",
            rep.chains_checked, rep2.chains_checked
        ))
    };
    CheckOutcome::from_result("cosetspace/join-inclusion", run())
}

pub fn check_two_prime_families() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let mut groups = 0;
        for (name, g) in finite_corpus_small()? {
            let mut primes: Vec<u64> = primes_upto(g.order() as u64)
                .into_iter()
                .filter(|p| g.order() as u64 % p == 0)
                .collect();
            if primes.len() < 2 {
                primes = vec![2, 3];
            }
            let cyc = Family::cyclic_members(&g, &caps)?;
            for (i, &p) in primes.iter().enumerate() {
                for &q in &primes[i + 1..] {
                    let fam_p = Family::p_hyperelementary_members(&g, p, &caps)?;
                    let fam_q = Family::p_hyperelementary_members(&g, q, &caps)?;
                    let inter = fam_p.intersection(&fam_q, &g)?;
                    if inter.members != cyc.members {
                        return Err(err(format!(
                            "{name}: {p}-members meet {q}-members off the cyclic family"
                        )));
                    }
                    if g.order() <= 12 {
                        let rep = union_check(&g, &fam_p, &fam_q, 2, &caps)?;
                        if !(rep.closedness_ok && rep.intersection_equal) {
                            return Err(err(format!(
                                "{name}: skeleton intersection identity fails"
                            )));
                        }
                    }
                }
            }
            groups += 1;
        }
        Ok(format!("{groups} corpus groups"))
    };
    CheckOutcome::from_result("cosetspace/two-prime-families", run())
}

// ------------------------------------------------------------------- lines

pub fn check_line_stability(seed: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11e);
        let mut cases = 0;
        for p in catalog() {
            for _ in 0..100 {
                let g = random_element(&mut rng, &p);
                let base = line_of(&p, &g)?;
                for m in 1..=6i64 {
                    let gm = p.power(&g, m)?;
                    let lm = line_of(&p, &gm)?;
                    let expected = if base == PointedLine::Basepoint {
                        PointedLine::Basepoint
                    } else {
                        base.clone()
                    };
                    if lm != expected {
                        return Err(err(format!(
                            "line of a power differs in {:?} at {g} with m = {m}",
                            p.name
                        )));
                    }
                    cases += 1;
                }
            }
        }
        Ok(format!("{cases} power comparisons"))
    };
    CheckOutcome::from_result("lines/stability", run())
}

pub fn check_line_action_factoring(seed: u64) -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfac);
        for p in catalog() {
            for _ in 0..100 {
                let g = random_element(&mut rng, &p);
                let line = line_of(&p, &g)?;
                // lattice conjugators act trivially
                let mut t = random_element(&mut rng, &p);
                t.q = 0;
                if conj_action(&p, &t, &line)? != line {
                    return Err(err(format!("lattice conjugation moved a line in {:?}", p.name)));
                }
                // composition law through the finite quotient
                let a = random_element(&mut rng, &p);
                let b = random_element(&mut rng, &p);
                let lhs = conj_action(&p, &a, &conj_action(&p, &b, &line)?)?;
                let rhs = conj_action(&p, &p.multiply(&a, &b)?, &line)?;
                if lhs != rhs {
                    return Err(err(format!("conjugation is not an action in {:?}", p.name)));
                }
            }
        }
        Ok("catalog x 100 samples".into())
    };
    CheckOutcome::from_result("lines/action-factoring", run())
}

pub fn check_orbit_partition() -> CheckOutcome {
    let run = || -> Result<String> {
        let caps = Caps::default();
        let z2 = builtin("Z2")?;
        let orbits = line_orbits(&z2, 2, &caps)?;
        if orbits.len() != 8 || orbits.iter().any(|o| o.len() != 1) {
            return Err(err(format!("Z^2 bound-2 orbits: {}", orbits.len())));
        }
        let p4 = builtin("p4")?;
        let orbits = line_orbits(&p4, 2, &caps)?;
        if orbits.len() != 4 {
            return Err(err(format!("p4 bound-2 orbits: {}", orbits.len())));
        }
        // partition: disjoint and covering for a twisted example
        for name in ["pg", "p3", "pm"] {
            let p = builtin(name)?;
            let orbits = line_orbits(&p, 2, &caps)?;
            let mut seen = std::collections::BTreeSet::new();
            for orbit in &orbits {
                for l in orbit {
                    if !seen.insert(l.vector.clone()) {
                        return Err(err(format!("{name}: orbits overlap")));
                    }
                }
            }
            for v in crate::lines::primitive_vectors_in_box(2, 2, &caps)? {
                if !seen.contains(&v) {
                    return Err(err(format!("{name}: line {v:?} missed")));
                }
            }
        }
        Ok("counts 8 and 4; partitions disjoint and covering".into())
    };
    CheckOutcome::from_result("lines/orbit-partition", run())
}

/// The full battery in deterministic order. `inject_fault` corrupts one
/// presentation to exercise the failing exit path.
pub fn run_full_suite(seed: u64, inject_fault: bool) -> CheckSummary {
    let groups = catalog_or(inject_fault);
    let outcomes = vec![
        check_element_laws(seed, &groups),
        check_quotient_homomorphism(seed),
        check_quotient_order(),
        check_subgroup_enumeration(),
        check_splitting_hom_law(seed, &groups),
        check_expansive_diagram(seed, &groups),
        check_expansive_endo_law(seed),
        check_crystallographic(seed),
        check_factor_criteria(),
        check_two_primes_cyclic(),
        check_metacyclic_exponent(),
        check_union_over_primes(),
        check_cert_revalidation(),
        check_sign_character_exhaustive(200, 24),
        check_quotient_implication(),
        check_dinf_trichotomy(),
        check_p4_irreducible(),
        check_case_partition(),
        check_kernel_hom_exhaustive(997, 97),
        check_contraction_factors(),
        check_z2_counts(),
        check_cone_face0(),
        check_union_identities(),
        check_join_inclusion(),
        check_two_prime_families(),
        check_line_stability(seed),
        check_line_action_factoring(seed),
        check_orbit_partition(),
    ];
    CheckSummary { seed, outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injection_fails_and_names_the_invariant() {
        let groups = catalog_or(true);
        let outcome = check_element_laws(42, &groups);
        assert!(!outcome.passed);
        assert!(
            outcome.detail.contains("cocycle identity"),
            "got: {}",
            outcome.detail
        );
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_full_suite(7, false).render_text();
        let b = run_full_suite(7, false).render_text();
        assert_eq!(a, b);
    }
}
