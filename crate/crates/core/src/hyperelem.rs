//! Hyperelementary recognition: a finite group is p-hyperelementary when a
//! normal cyclic subgroup has p-group quotient. Recognition brute-forces
//! the cyclic subgroups; certificates carry the witness subgroup and
//! re-validate on demand. Also: the structure dichotomy for infinite
//! rank-1 groups and the exponent of the metacyclic p-groups
//! `Z/p^s x| Z/p^w` by exhaustive element-order enumeration.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fingroup::{is_power_of, is_prime, primes_upto, FiniteGroup, Subgroup};
use crate::intmat;
use crate::presentation::{Element, VAPresentation};
use crate::splitting::{crystallographic_quotient, CrystQuotient, SplittingData};

/// Why a finite group is hyperelementary: either it is cyclic (which
/// qualifies for every prime), or a specific prime's defining sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertKind {
    Cyclic,
    Prime(u64),
}

/// A verified witness: `normal_cyclic` is normal and cyclic in the ambient
/// subgroup, with quotient order a power of the certificate prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperelemCert {
    pub kind: CertKind,
    /// Element indices of the witness subgroup, in ambient-group indexing.
    pub normal_cyclic: Subgroup,
}

impl HyperelemCert {
    /// Re-validates against the ambient group and the subgroup it
    /// certifies: the witness is cyclic, normal in `h`, contained in `h`,
    /// and the index is a power of the certificate prime (trivial for the
    /// cyclic marker, where the witness is `h` itself).
    pub fn validate(&self, group: &FiniteGroup, h: &Subgroup) -> Result<()> {
        let n = &self.normal_cyclic;
        n.validate(group)?;
        if !n.is_subset_of(h) {
            return Err(Error::Invalid("witness subgroup not contained".into()));
        }
        if !n.is_cyclic_in(group) {
            return Err(Error::Invalid("witness subgroup not cyclic".into()));
        }
        if !group.is_normal(n, h) {
            return Err(Error::Invalid("witness subgroup not normal".into()));
        }
        match self.kind {
            CertKind::Cyclic => {
                if n != h {
                    return Err(Error::Invalid(
                        "cyclic certificate must use the whole subgroup".into(),
                    ));
                }
            }
            CertKind::Prime(p) => {
                let index = (h.order() / n.order()) as u64;
                if !is_prime(p) || !is_power_of(index, p) {
                    return Err(Error::Invalid(format!(
                        "index {index} is not a power of {p}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Searches the cyclic subgroups of `h` (inside `group`) for one that is
/// normal in `h` with p-power index. Candidates are scanned in the
/// deterministic order of sorted element lists.
pub fn p_hyperelementary_cert_in(
    group: &FiniteGroup,
    h: &Subgroup,
    p: u64,
) -> Option<HyperelemCert> {
    let mut candidates: BTreeSet<Vec<u32>> = BTreeSet::new();
    for &g in &h.elems {
        let mut elems = vec![0u32];
        let mut x = g;
        while x != 0 {
            elems.push(x);
            x = group.mul(x, g);
        }
        elems.sort_unstable();
        candidates.insert(elems);
    }
    for elems in candidates {
        let n = Subgroup { elems };
        let index = (h.order() / n.order()) as u64;
        if h.order() % n.order() != 0 || !is_power_of(index, p) {
            continue;
        }
        if group.is_normal(&n, h) {
            return Some(HyperelemCert {
                kind: CertKind::Prime(p),
                normal_cyclic: n,
            });
        }
    }
    None
}

/// p-hyperelementary test for a standalone finite group.
pub fn is_p_hyperelementary(h: &FiniteGroup, p: u64) -> Result<Option<HyperelemCert>> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    Ok(p_hyperelementary_cert_in(h, &h.full_subgroup(), p))
}

/// Smallest prime for which the group is hyperelementary, with its
/// certificate.
pub fn hyperelementary_cert_any(
    group: &FiniteGroup,
    h: &Subgroup,
) -> Option<(u64, HyperelemCert)> {
    let order = h.order() as u64;
    let mut primes: Vec<u64> = primes_upto(order).into_iter().filter(|p| order % p == 0).collect();
    if primes.is_empty() {
        primes.push(2); // trivial group: any prime certifies
    }
    for p in primes {
        if let Some(cert) = p_hyperelementary_cert_in(group, h, p) {
            return Some((p, cert));
        }
    }
    None
}

/// Hyperelementary relative to a set of inverted primes: cyclic groups
/// always qualify; otherwise some prime q outside the inverted set must
/// certify. With every prime inverted only the cyclic marker remains.
pub fn is_lambda_hyperelementary(
    h: &FiniteGroup,
    inverted: &BTreeSet<u64>,
) -> Result<Option<HyperelemCert>> {
    if h.is_cyclic() {
        return Ok(Some(HyperelemCert {
            kind: CertKind::Cyclic,
            normal_cyclic: h.full_subgroup(),
        }));
    }
    let order = h.order() as u64;
    for q in primes_upto(order) {
        if order % q != 0 || inverted.contains(&q) {
            continue;
        }
        if let Some(cert) = p_hyperelementary_cert_in(h, &h.full_subgroup(), q) {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// All hyperelementary subgroups of `g` up to conjugacy, in deterministic
/// order. For `p = Some(_)` only that prime's certificates count; for
/// `None` the smallest qualifying prime certifies.
pub fn hyperelementary_subgroups(
    g: &FiniteGroup,
    p: Option<u64>,
    caps: &Caps,
) -> Result<Vec<(Subgroup, HyperelemCert)>> {
    if let Some(p) = p {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
    }
    let classes = g.subgroup_classes(caps)?;
    let mut out = Vec::new();
    for h in classes {
        let cert = match p {
            Some(p) => p_hyperelementary_cert_in(g, &h, p),
            None => hyperelementary_cert_any(g, &h).map(|(_, c)| c),
        };
        if let Some(cert) = cert {
            out.push((h, cert));
        }
    }
    Ok(out)
}

/// Exponent of `Z/p^s x| Z/p^w` where the generator of the cyclic p-group
/// on the right acts by `x -> (1 + p n) x`, computed by enumerating the
/// order of every element. The action must be well defined: the order of
/// `1 + p n` modulo `p^s` must divide `p^w`.
pub fn metacyclic_exponent(p: u64, s: u32, w: u32, n: i64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if s < 1 || w < 1 {
        return Err(Error::Invalid("exponents s, w must be >= 1".into()));
    }
    let ps = p
        .checked_pow(s)
        .ok_or(Error::Overflow("metacyclic modulus"))?;
    let pw = p
        .checked_pow(w)
        .ok_or(Error::Overflow("metacyclic modulus"))?;
    let total = (ps as u128) * (pw as u128);
    if total > 100_000_000 {
        return Err(Error::Capacity {
            what: "metacyclic group order",
            value: total,
            cap: 100_000_000,
        });
    }
    let u = (1i128 + (p as i128) * (n as i128)).rem_euclid(ps as i128) as u64;
    if intmat::gcd(u as i64, p as i64) != 1 {
        return Err(Error::Invalid(format!(
            "multiplier {u} is not a unit mod {ps}"
        )));
    }
    // order of u mod p^s must divide p^w
    let mut acc = u;
    let mut ord: u64 = 1;
    while acc != 1 {
        acc = acc * u % ps;
        ord += 1;
        if ord > ps {
            return Err(Error::Internal("unit order overflow".into()));
        }
    }
    if pw % ord != 0 {
        return Err(Error::Invalid(format!(
            "x -> {u} x has order {ord} mod {ps}, which does not divide {pw}: \
             the twist is not an action of the cyclic group"
        )));
    }

    // step[j] = sum_{i < p} (u^j)^i mod p^s: one p-th power step sends
    // (x, j) to (step[j] x, p j)
    let mut upow = vec![1u64; pw as usize];
    for j in 1..pw as usize {
        upow[j] = upow[j - 1] * u % ps;
    }
    let step: Vec<u64> = (0..pw as usize)
        .map(|j| {
            let uj = upow[j];
            let mut sum = 0u64;
            let mut term = 1u64;
            for _ in 0..p {
                sum = (sum + term) % ps;
                term = term * uj % ps;
            }
            sum
        })
        .collect();

    let mut max_steps = 0u32;
    for x0 in 0..ps {
        for j0 in 0..pw {
            let (mut x, mut j) = (x0, j0);
            let mut steps = 0u32;
            while x != 0 || j != 0 {
                x = step[j as usize] * x % ps;
                j = j * p % pw;
                steps += 1;
            }
            max_steps = max_steps.max(steps);
        }
    }
    let exponent = p.pow(max_steps);
    if w >= s && exponent != pw {
        return Err(Error::Internal(format!(
            "exponent {exponent} differs from {pw} although w >= s"
        )));
    }
    Ok(exponent)
}

/// The structure of an infinite rank-1 hyperelementary group: either it
/// maps onto the infinite dihedral group, or it splits as a finite
/// p-group extended by an infinite cyclic group whose generator acts with
/// p-power order.
#[derive(Debug, Clone)]
pub enum InfHyperelemStructure {
    DihedralImage {
        quotient: CrystQuotient,
    },
    Semidirect {
        /// The torsion subgroup, listed explicitly (identity first).
        torsion_elems: Vec<Element>,
        torsion: FiniteGroup,
        /// Conjugation by the infinite-order generator, as a permutation of
        /// `torsion_elems` indices.
        aut: Vec<u32>,
        t_gen: Element,
        /// The prime of the torsion p-group; `None` when torsion is trivial
        /// (the group is infinite cyclic).
        prime: Option<u64>,
    },
}

#[derive(Debug, Clone)]
pub enum InfHyperelemDecision {
    Hyperelementary(InfHyperelemStructure),
    Not { obstruction: String },
}

/// Affine solution sets over the integers for the normality constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
enum SolSet {
    All,
    Finite(BTreeSet<i64>),
}

impl SolSet {
    fn intersect(self, other: SolSet) -> SolSet {
        match (self, other) {
            (SolSet::All, x) | (x, SolSet::All) => x,
            (SolSet::Finite(a), SolSet::Finite(b)) => {
                SolSet::Finite(a.intersection(&b).cloned().collect())
            }
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, SolSet::Finite(s) if s.is_empty())
    }
}

/// Solutions of `coef * a = rhs`.
fn solve_linear(coef: i64, rhs: i64) -> SolSet {
    if coef == 0 {
        if rhs == 0 {
            SolSet::All
        } else {
            SolSet::Finite(BTreeSet::new())
        }
    } else if rhs % coef == 0 {
        SolSet::Finite(BTreeSet::from([rhs / coef]))
    } else {
        SolSet::Finite(BTreeSet::new())
    }
}

fn prime_power_root(m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    let mut d = 2;
    let mut m = m;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            return if m == 1 { Some(d) } else { None };
        }
        d += 1;
    }
    Some(m)
}

/// Is some positive power of p congruent to w0 or -w0 mod e? Residues of
/// p^k mod e are eventually periodic with preperiod + period at most 2e.
fn prime_power_hits_residue(p: u64, w0: i64, e: i64) -> bool {
    let targets = [w0.rem_euclid(e), (-w0).rem_euclid(e)];
    let mut v: i64 = 1 % e;
    for _ in 0..(2 * e + 4) {
        if targets.contains(&v) {
            return true;
        }
        v = (v * (p as i64 % e)).rem_euclid(e);
    }
    false
}

/// Is there a prime power (or 1) congruent to ±w0 mod e at all? Used when
/// the cyclic candidate exhausts the whole quotient (D = 1).
fn some_prime_power_hits_residue(w0: i64, e: i64) -> bool {
    let targets = [w0.rem_euclid(e), (-w0).rem_euclid(e)];
    if targets.contains(&(1 % e)) {
        return true;
    }
    for target in targets {
        let g = intmat::gcd(target, e) as u64;
        if g <= 1 {
            // gcd 1: some prime lies in the progression; scan for a witness
            let mut v = if target == 0 { e } else { target };
            for _ in 0..1_000_000 {
                if is_prime(v as u64) {
                    return true;
                }
                v += e;
            }
        } else if let Some(p) = prime_power_root(g) {
            if prime_power_hits_residue(p, target, e) {
                return true;
            }
        }
    }
    false
}

/// Decides hyperelementarity of a rank-1 presentation and returns the
/// structure dichotomy. A normal infinite cyclic subgroup with p-group
/// quotient either lies in the lattice (possible exactly when |Q| is a
/// prime power) or is generated over a trivially-acting q in Q; the
/// candidates over each such q form an affine family, searched exactly.
pub fn infinite_hyperelementary_structure(
    p: &VAPresentation,
    caps: &Caps,
) -> Result<InfHyperelemDecision> {
    if p.rank != 1 {
        return Err(Error::Precondition(format!(
            "structure dichotomy needs rank 1, got rank {}",
            p.rank
        )));
    }
    let qord = p.qorder() as i64;
    let s = SplittingData::new(p);

    let mut obstructions: Vec<String> = Vec::new();
    let mut hyper = false;

    if prime_power_root(qord as u64).is_some() || qord == 1 {
        // the lattice itself is normal infinite cyclic with quotient Q
        hyper = true;
    } else {
        obstructions.push(format!(
            "|Q| = {qord} is not a prime power, so no lattice-contained candidate works"
        ));
        // candidates over trivially-acting q != id
        for q in 1..p.qorder() {
            if !intmat::is_identity(&p.action.mats[q as usize]) {
                continue;
            }
            // conjugates of q inside Q must stay in {q, q^{-1}}
            let qi = p.q.inv(q);
            if (0..p.qorder()).any(|h| {
                let c = p.q.mul(p.q.mul(h, q), p.q.inv(h));
                c != q && c != qi
            }) {
                obstructions.push(format!("candidate over q{q}: not normalized by Q"));
                continue;
            }
            // normality constraints on the lattice offset a, affine per h
            let eval_conj = |h: &Element, a: i64| -> Result<Element> {
                p.conjugate(h, &Element::new(vec![a], q))
            };
            let mut sols = SolSet::All;
            let mut hs: Vec<Element> = vec![Element::new(vec![1], 0)];
            for h in 0..p.qorder() {
                hs.push(Element::new(vec![0], h));
            }
            for h in &hs {
                let c0 = eval_conj(h, 0)?;
                let c1 = eval_conj(h, 1)?;
                let coef = c1.vec[0] - c0.vec[0];
                let konst = c0.vec[0];
                // target q-part decides which powers of the generator are
                // admissible images
                let inv_of = p.inverse(&Element::new(vec![0], q))?;
                let mut branch = SolSet::Finite(BTreeSet::new());
                if c0.q == q {
                    // h (a, q) h^{-1} = (a, q): coef a + konst = a
                    branch = solve_linear(coef - 1, -konst);
                }
                if c0.q == qi {
                    // h (a, q) h^{-1} = (a, q)^{-1} = (-a - c', q^{-1})
                    let cprime = -inv_of.vec[0]; // inverse of (0,q) is (-c', q^{-1})
                    let alt = solve_linear(coef + 1, -cprime - konst);
                    branch = match (branch, alt) {
                        (SolSet::All, _) | (_, SolSet::All) => SolSet::All,
                        (SolSet::Finite(a), SolSet::Finite(b)) => {
                            SolSet::Finite(a.union(&b).cloned().collect())
                        }
                    };
                }
                if c0.q != q && c0.q != qi {
                    branch = SolSet::Finite(BTreeSet::new());
                }
                sols = sols.intersect(branch);
                if sols.is_empty() {
                    break;
                }
            }
            if sols.is_empty() {
                obstructions.push(format!("candidate over q{q}: no normal lattice offset"));
                continue;
            }
            let e = p.q.order_of(q) as i64;
            let w0 = p.power(&Element::new(vec![0], q), e)?.vec[0];
            let d_factor = qord / e;
            match sols {
                SolSet::Finite(set) => {
                    for a in set {
                        let w = e * a + w0;
                        if w == 0 {
                            continue; // torsion generator
                        }
                        let f = qord * w.abs();
                        debug_assert_eq!(f % e, 0);
                        let f = (f / e) as u64;
                        if f == 1 || prime_power_root(f).is_some() {
                            hyper = true;
                        }
                    }
                    if !hyper {
                        obstructions
                            .push(format!("candidate over q{q}: quotient never a prime power"));
                    }
                }
                SolSet::All => {
                    let ok = if d_factor == 1 {
                        some_prime_power_hits_residue(w0, e)
                    } else {
                        match prime_power_root(d_factor as u64) {
                            Some(pp) => prime_power_hits_residue(pp, w0, e),
                            None => false,
                        }
                    };
                    if ok {
                        hyper = true;
                    } else {
                        obstructions.push(format!(
                            "candidate over q{q}: no prime-power quotient in the affine family"
                        ));
                    }
                }
            }
            if hyper {
                break;
            }
        }
    }

    if !hyper {
        return Ok(InfHyperelemDecision::Not {
            obstruction: obstructions.join("; "),
        });
    }

    // dichotomy: nontrivial action on the lattice means a dihedral image
    if p.action.mats.iter().any(|m| !intmat::is_identity(m)) {
        let quotient = crystallographic_quotient(p, caps)?;
        if quotient.target.qorder() != 2 {
            return Err(Error::Internal(
                "rank-1 action image is not of order 2".into(),
            ));
        }
        return Ok(InfHyperelemDecision::Hyperelementary(
            InfHyperelemStructure::DihedralImage { quotient },
        ));
    }

    // trivial action: the lattice is central; torsion elements are the
    // beta-kernel, one candidate per Q-element
    let mut torsion_elems = Vec::new();
    for q in 0..p.qorder() {
        let bq = s.beta_of_q(q)?[0];
        if bq.rem_euclid(qord) == 0 {
            torsion_elems.push(Element::new(vec![-bq / qord], q));
        }
    }
    torsion_elems.sort();
    let id_pos = torsion_elems
        .iter()
        .position(|e| *e == p.identity())
        .ok_or_else(|| Error::Internal("identity missing from torsion".into()))?;
    torsion_elems.swap(0, id_pos);
    torsion_elems[1..].sort();
    let tn = torsion_elems.len();
    let index_of = |e: &Element| -> Result<u32> {
        torsion_elems
            .iter()
            .position(|x| x == e)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Internal("torsion set not closed".into()))
    };
    let mut mul = vec![0u32; tn * tn];
    for (i, a) in torsion_elems.iter().enumerate() {
        for (j, b) in torsion_elems.iter().enumerate() {
            mul[i * tn + j] = index_of(&p.multiply(a, b)?)?;
        }
    }
    let torsion = FiniteGroup::from_mul_table_trusted(tn as u32, mul)?;

    // infinite-order generator: smallest positive value of beta is a gcd
    let mut d = qord;
    for q in 0..p.qorder() {
        d = intmat::gcd(d, s.beta_of_q(q)?[0]);
    }
    let mut t_gen = None;
    for q in 0..p.qorder() {
        let bq = s.beta_of_q(q)?[0];
        if (d - bq).rem_euclid(qord) == 0 {
            t_gen = Some(Element::new(vec![(d - bq) / qord], q));
            break;
        }
    }
    let t_gen = t_gen.ok_or_else(|| Error::Internal("no generator realizes the gcd".into()))?;

    let mut aut = Vec::with_capacity(tn);
    for x in &torsion_elems {
        aut.push(index_of(&p.conjugate(&t_gen, x)?)?);
    }

    let prime = if tn == 1 {
        None
    } else {
        let pp = prime_power_root(tn as u64).ok_or_else(|| {
            Error::Internal(format!("torsion order {tn} is not a prime power"))
        })?;
        // conjugation by the generator must have p-power order
        let is_id = |perm: &[u32]| perm.iter().enumerate().all(|(i, &x)| x == i as u32);
        let mut perm = aut.clone();
        let mut ord = 1u64;
        while !is_id(&perm) {
            perm = perm.iter().map(|&i| aut[i as usize]).collect();
            ord += 1;
            if ord > tn as u64 * tn as u64 {
                return Err(Error::Internal("automorphism order runaway".into()));
            }
        }
        if !is_power_of(ord, pp) {
            return Err(Error::Internal(format!(
                "generator acts with order {ord}, not a power of {pp}"
            )));
        }
        Some(pp)
    };

    Ok(InfHyperelemDecision::Hyperelementary(
        InfHyperelemStructure::Semidirect {
            torsion_elems,
            torsion,
            aut,
            t_gen,
            prime,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], &Caps::default())
            .unwrap()
    }

    #[test]
    fn s3_is_2_hyperelementary_with_z3_witness() {
        let g = s3();
        let cert = is_p_hyperelementary(&g, 2).unwrap().unwrap();
        assert_eq!(cert.normal_cyclic.order(), 3);
        cert.validate(&g, &g.full_subgroup()).unwrap();
    }

    #[test]
    fn s3_is_not_3_hyperelementary() {
        let g = s3();
        assert!(is_p_hyperelementary(&g, 3).unwrap().is_none());
    }

    #[test]
    fn cyclic_groups_certify_for_every_prime() {
        let z6 = FiniteGroup::cyclic(6);
        for p in [2, 3, 5, 7] {
            let cert = is_p_hyperelementary(&z6, p).unwrap().unwrap();
            cert.validate(&z6, &z6.full_subgroup()).unwrap();
        }
    }

    #[test]
    fn lambda_hyperelementary_examples() {
        let g = s3();
        let inverted2: BTreeSet<u64> = BTreeSet::from([2]);
        assert!(is_lambda_hyperelementary(&g, &inverted2).unwrap().is_none());
        let inverted3: BTreeSet<u64> = BTreeSet::from([3]);
        assert!(is_lambda_hyperelementary(&g, &inverted3).unwrap().is_some());
        let z6 = FiniteGroup::cyclic(6);
        let all: BTreeSet<u64> = primes_upto(100).into_iter().collect();
        let cert = is_lambda_hyperelementary(&z6, &all).unwrap().unwrap();
        assert_eq!(cert.kind, CertKind::Cyclic);
    }

    #[test]
    fn s3_all_four_classes_qualify() {
        let g = s3();
        let list = hyperelementary_subgroups(&g, None, &Caps::default()).unwrap();
        assert_eq!(list.len(), 4);
        for (h, cert) in &list {
            cert.validate(&g, h).unwrap();
        }
    }

    #[test]
    fn a4_itself_does_not_qualify() {
        let a4 = FiniteGroup::from_permutations(
            4,
            &[vec![1, 2, 0, 3], vec![0, 2, 3, 1]],
            &Caps::default(),
        )
        .unwrap();
        let list = hyperelementary_subgroups(&a4, None, &Caps::default()).unwrap();
        assert!(list.iter().all(|(h, _)| h.order() < 12));
        // every proper class qualifies: 1, Z/2, Z/3, V4 (2-hyperelementary)
        let classes = a4.subgroup_classes(&Caps::default()).unwrap();
        assert_eq!(list.len(), classes.len() - 1);
    }

    #[test]
    fn z2_subgroup_list() {
        let z2 = FiniteGroup::cyclic(2);
        let list = hyperelementary_subgroups(&z2, None, &Caps::default()).unwrap();
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn metacyclic_examples() {
        // trivial action: Z/3 x Z/9
        assert_eq!(metacyclic_exponent(3, 1, 2, 1).unwrap(), 9);
        // x -> x^3 on Z/4
        assert_eq!(metacyclic_exponent(2, 2, 2, 1).unwrap(), 4);
        assert_eq!(metacyclic_exponent(2, 3, 3, 1).unwrap(), 8);
    }

    #[test]
    fn metacyclic_invalid_twist() {
        // 4 has order 3 mod 27, which does not divide 3^1
        let err = metacyclic_exponent(3, 3, 1, 1).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn dinf_maps_onto_dihedral() {
        let p = builtin("Dinf").unwrap();
        match infinite_hyperelementary_structure(&p, &Caps::default()).unwrap() {
            InfHyperelemDecision::Hyperelementary(InfHyperelemStructure::DihedralImage {
                quotient,
            }) => {
                assert_eq!(quotient.target.qorder(), 2);
                assert_eq!(quotient.kernel.len(), 1);
            }
            other => panic!("expected dihedral image, got {other:?}"),
        }
    }

    #[test]
    fn z_cross_z4_splits() {
        let p = builtin("ZxZ4").unwrap();
        match infinite_hyperelementary_structure(&p, &Caps::default()).unwrap() {
            InfHyperelemDecision::Hyperelementary(InfHyperelemStructure::Semidirect {
                torsion,
                aut,
                prime,
                t_gen,
                ..
            }) => {
                assert_eq!(torsion.order(), 4);
                assert!(torsion.is_cyclic());
                assert!(aut.iter().enumerate().all(|(i, &x)| x == i as u32));
                assert_eq!(prime, Some(2));
                assert_eq!(t_gen, Element::new(vec![1], 0));
            }
            other => panic!("expected semidirect, got {other:?}"),
        }
    }

    #[test]
    fn z_cross_z6_is_not_hyperelementary() {
        // rank 1, Q = Z/6 trivial action, zero cocycle
        let q = FiniteGroup::cyclic(6);
        let p = VAPresentation::new(
            1,
            q,
            crate::presentation::LatticeAction::trivial(1, 6),
            crate::presentation::Cocycle::zero(1, 6),
            Some("ZxZ6".into()),
        )
        .unwrap();
        match infinite_hyperelementary_structure(&p, &Caps::default()).unwrap() {
            InfHyperelemDecision::Not { obstruction } => {
                assert!(obstruction.contains("not a prime power"));
            }
            other => panic!("expected not hyperelementary, got {other:?}"),
        }
    }

    #[test]
    fn twisted_z_is_infinite_cyclic() {
        let p = builtin("twistedZ").unwrap();
        match infinite_hyperelementary_structure(&p, &Caps::default()).unwrap() {
            InfHyperelemDecision::Hyperelementary(InfHyperelemStructure::Semidirect {
                torsion,
                prime,
                t_gen,
                ..
            }) => {
                assert_eq!(torsion.order(), 1);
                assert_eq!(prime, None);
                // the generator realizes beta = 1
                assert_eq!(t_gen, Element::new(vec![0], 1));
            }
            other => panic!("expected semidirect, got {other:?}"),
        }
    }

    #[test]
    fn rank_restriction() {
        let p = builtin("p4").unwrap();
        assert!(matches!(
            infinite_hyperelementary_structure(&p, &Caps::default()),
            Err(Error::Precondition(_))
        ));
    }
}
