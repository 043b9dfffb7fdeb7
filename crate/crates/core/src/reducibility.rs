//! Detecting normal infinite cyclic subgroups through finite quotients.
//! For a good prime p (no congruence to 1 mod odd divisors of |Q|, and
//! 3 mod 4 when |Q| is even), any invariant cyclic subgroup of the mod-p^r
//! lattice forces the action on it to be by signs; averaging a lift of its
//! generator against that sign character produces an exactly invariant
//! lattice vector. An independent brute-force oracle finds invariant lines
//! directly from integer kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingroup::{is_prime, primes_upto, FiniteGroup};
use crate::intmat::{self, IVec};
use crate::presentation::{LatticeAction, VAPresentation};

/// A homomorphism from Q to {+1, -1}, stored by value per element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignChar {
    pub values: Vec<i8>,
}

impl SignChar {
    pub fn trivial(qorder: usize) -> Self {
        SignChar {
            values: vec![1; qorder],
        }
    }

    pub fn get(&self, q: u32) -> i64 {
        self.values[q as usize] as i64
    }

    pub fn validate(&self, q: &FiniteGroup) -> Result<()> {
        if self.values.len() != q.order() as usize {
            return Err(Error::Invalid("sign character length mismatch".into()));
        }
        if self.values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::Invalid("sign character value out of {±1}".into()));
        }
        for a in 0..q.order() {
            for b in 0..q.order() {
                if self.get(q.mul(a, b)) != self.get(a) * self.get(b) {
                    return Err(Error::Invalid(format!(
                        "sign character is not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A primitive lattice vector spanning an invariant line, together with
/// the sign character it transforms by: `action(q) v = rho(q) v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibilityWitness {
    pub vector: IVec,
    pub rho: SignChar,
}

impl ReducibilityWitness {
    pub fn validate(&self, action: &LatticeAction, q: &FiniteGroup) -> Result<()> {
        self.rho.validate(q)?;
        if intmat::content(&self.vector) != 1 {
            return Err(Error::Invalid("witness vector is not primitive".into()));
        }
        for g in 0..q.order() {
            let lhs = action.apply(g, &self.vector)?;
            let rhs = intmat::vec_scale(self.rho.get(g), &self.vector)?;
            if lhs != rhs {
                return Err(Error::Invalid(format!(
                    "witness does not transform by the sign character at {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Primes p <= bound with p not dividing |Q|, p not congruent to 1 mod any
/// odd prime divisor of |Q|, and p congruent to 3 mod 4 when |Q| is even.
pub fn good_primes(qorder: u64, bound: u64) -> Vec<u64> {
    let odd_divisors: Vec<u64> = primes_upto(qorder)
        .into_iter()
        .filter(|&d| d != 2 && qorder % d == 0)
        .collect();
    primes_upto(bound)
        .into_iter()
        .filter(|&p| {
            qorder % p != 0
                && odd_divisors.iter().all(|&d| p % d != 1)
                && (qorder % 2 != 0 || p % 4 == 3)
        })
        .collect()
}

/// Reads off the sign character from an action of Q on a cyclic group of
/// order p given as units mod p, verifying that every value is ±1. For a
/// good prime the verification cannot fail; a non-sign value reports a
/// hypothesis violation.
pub fn sign_character(p: u64, q: &FiniteGroup, action_units: &[u64]) -> Result<SignChar> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if action_units.len() != q.order() as usize {
        return Err(Error::Invalid("unit action length mismatch".into()));
    }
    for (i, &u) in action_units.iter().enumerate() {
        if u == 0 || u >= p {
            return Err(Error::Invalid(format!(
                "action value {u} at {i} is not a unit mod {p}"
            )));
        }
    }
    for a in 0..q.order() {
        for b in 0..q.order() {
            let lhs = action_units[a as usize] * action_units[b as usize] % p;
            if lhs != action_units[q.mul(a, b) as usize] {
                return Err(Error::Invalid(format!(
                    "unit action is not a homomorphism at ({a}, {b})"
                )));
            }
        }
    }
    let mut values = Vec::with_capacity(action_units.len());
    for (i, &u) in action_units.iter().enumerate() {
        if u == 1 {
            values.push(1i8);
        } else if u == p - 1 {
            values.push(-1i8);
        } else {
            return Err(Error::Hypothesis(format!(
                "element {i} acts by {u} mod {p}, which is not ±1: \
                 the good-prime congruences do not hold for this pair"
            )));
        }
    }
    let rho = SignChar { values };
    rho.validate(q)?;
    Ok(rho)
}

/// The signed average `sum_f rho(f) (action(f) a)`. Exactly invariant up
/// to sign: `action(g) result = rho(g) result` for all g. A zero average
/// means the hypotheses were not satisfied by the input vector.
pub fn averaged_generator(
    p: &VAPresentation,
    a: &[i64],
    rho: &SignChar,
) -> Result<IVec> {
    if a.len() != p.rank {
        return Err(Error::RankMismatch {
            expected: p.rank,
            got: a.len(),
        });
    }
    if intmat::is_zero_vec(a) {
        return Err(Error::Invalid("input vector must be nonzero".into()));
    }
    rho.validate(&p.q)?;
    let mut acc = vec![0i64; p.rank];
    for f in 0..p.qorder() {
        let moved = p.action.apply(f, a)?;
        acc = intmat::vec_add(&acc, &intmat::vec_scale(rho.get(f), &moved)?)?;
    }
    if intmat::is_zero_vec(&acc) {
        return Err(Error::AveragingCollapsed);
    }
    for g in 0..p.qorder() {
        let lhs = p.action.apply(g, &acc)?;
        let rhs = intmat::vec_scale(rho.get(g), &acc)?;
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "averaged vector does not transform by the character at {g}"
            )));
        }
    }
    Ok(acc)
}

/// All homomorphisms Q -> {±1}, ordered lexicographically by value vector
/// (with +1 before -1).
pub fn sign_characters(q: &FiniteGroup) -> Vec<SignChar> {
    let n = q.order() as usize;
    let mut out = Vec::new();
    // enumerate by the values on a generating set closure: brute force over
    // all ±1 vectors is fine at |Q| <= 24, but prune by homomorphy early
    let mut stack: Vec<Vec<i8>> = vec![vec![1]];
    while let Some(partial) = stack.pop() {
        if partial.len() == n {
            let cand = SignChar {
                values: partial.clone(),
            };
            if cand.validate(q).is_ok() {
                out.push(cand);
            }
            continue;
        }
        // next index value; try +1 first so the final list sorts with the
        // trivial character first
        for v in [-1i8, 1i8] {
            let mut next = partial.clone();
            next.push(v);
            stack.push(next);
        }
    }
    out.sort_by_key(|c| c.values.iter().map(|&v| if v == 1 { 0u8 } else { 1 }).collect::<Vec<_>>());
    out
}

/// Brute-force oracle: for each sign character rho, the integer kernel of
/// the stacked system {action(q) - rho(q) I}. Returns the first primitive
/// kernel vector in the deterministic character order, if any.
pub fn invariant_line_bruteforce(
    action: &LatticeAction,
    q: &FiniteGroup,
) -> Result<Option<ReducibilityWitness>> {
    if action.rank > 6 {
        return Err(Error::Capacity {
            what: "oracle rank",
            value: action.rank as u128,
            cap: 6,
        });
    }
    if action.rank == 0 {
        return Ok(None);
    }
    for rho in sign_characters(q) {
        let mut stacked: Vec<IVec> = Vec::new();
        for g in 0..q.order() {
            let m = &action.mats[g as usize];
            for (i, row) in m.iter().enumerate() {
                let mut r = row.clone();
                r[i] -= rho.get(g);
                stacked.push(r);
            }
        }
        let kernel = intmat::kernel_basis(&stacked)?;
        if let Some(first) = kernel.first() {
            let vector = intmat::primitive(first)?;
            let witness = ReducibilityWitness { vector, rho };
            witness.validate(action, q)?;
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// One invariant order-p cyclic subgroup of the mod-p^r lattice, with the
/// derived sign character and exactly invariant averaged lift.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantCyclicFinding {
    /// Mod-p line generator with first nonzero coordinate 1.
    pub line_mod_p: IVec,
    /// Lift of the order-p generator of the subgroup: p^{r-1} times the
    /// line generator, entries in [0, p^r).
    pub generator_lift: IVec,
    pub rho: SignChar,
    /// The signed average of the lift: nonzero, exactly invariant up to
    /// sign, and congruent to |Q| times the lift mod p^r.
    pub averaged: IVec,
}

/// Report of the quotient-level detection next to the integer oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectReport {
    pub p: u64,
    pub r: u32,
    pub finding: Option<InvariantCyclicFinding>,
    pub oracle: Option<ReducibilityWitness>,
    /// The implication "quotient detection => integer invariant line",
    /// checked on this instance.
    pub implication_holds: bool,
}

/// Search mode for the quotient detection: order-p subgroups only (the
/// proof's reduction) or every cyclic subgroup of the quotient lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CyclicSearch {
    OrderP,
    AllCyclic,
}

/// Do the lines of the mod-p lattice contain one invariant under the
/// action? Every invariant cyclic subgroup of the mod-p^r lattice contains
/// an invariant subgroup of order p, i.e. an invariant line mod p, so the
/// order-p search decides existence.
fn invariant_line_mod_p(p: u64, pres: &VAPresentation) -> Result<Option<(IVec, Vec<u64>)>> {
    let n = pres.rank;
    let pi = p as i64;
    // enumerate normalized line generators over F_p: first nonzero = 1
    let mut gens: Vec<IVec> = Vec::new();
    for lead in 0..n {
        // vectors with zeros before `lead`, 1 at lead, arbitrary after
        let tail = n - lead - 1;
        let count = (p as u128).pow(tail as u32);
        for mut idx in 0..count {
            let mut v = vec![0i64; n];
            v[lead] = 1;
            for slot in (lead + 1..n).rev() {
                v[slot] = (idx % p as u128) as i64;
                idx /= p as u128;
            }
            gens.push(v);
        }
    }
    for v in gens {
        let mut units: Vec<u64> = Vec::with_capacity(pres.qorder() as usize);
        let mut ok = true;
        for qidx in 0..pres.qorder() {
            let img = pres.action.apply(qidx, &v)?;
            // img must be lambda * v mod p for a scalar lambda
            let lead = v.iter().position(|&x| x != 0).unwrap();
            let lambda = img[lead].rem_euclid(pi) as u64; // v[lead] = 1
            if lambda == 0 {
                ok = false;
                break;
            }
            for i in 0..n {
                if (img[i] - (lambda as i64) * v[i]).rem_euclid(pi) != 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
            units.push(lambda);
        }
        if ok {
            return Ok(Some((v, units)));
        }
    }
    Ok(None)
}

/// Exhaustive search over every cyclic subgroup of (Z/p^r)^n for an
/// invariant one; only used under the `AllCyclic` flag and capped.
fn invariant_cyclic_exhaustive(p: u64, r: u32, pres: &VAPresentation) -> Result<bool> {
    let modulus = (p as i64).pow(r);
    let n = pres.rank;
    let total = (modulus as u128).pow(n as u32);
    if total > 200_000 {
        return Err(Error::Capacity {
            what: "cyclic subgroup search space",
            value: total,
            cap: 200_000,
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for mut idx in 1..total {
        let mut v = vec![0i64; n];
        for slot in (0..n).rev() {
            v[slot] = (idx % modulus as u128) as i64;
            idx /= modulus as u128;
        }
        // the cyclic subgroup generated by v mod p^r
        let mut sub: Vec<IVec> = Vec::new();
        let mut acc = vec![0i64; n];
        loop {
            acc = intmat::vec_add(&acc, &v)?
                .iter()
                .map(|&x| x.rem_euclid(modulus))
                .collect();
            if acc.iter().all(|&x| x == 0) {
                break;
            }
            sub.push(acc.clone());
        }
        if sub.is_empty() {
            continue;
        }
        let mut canon = sub.clone();
        canon.sort();
        if !seen.insert(canon) {
            continue;
        }
        let contains = |x: &IVec| -> bool {
            sub.iter().any(|s| s == x)
        };
        let mut invariant = true;
        for qidx in 0..pres.qorder() {
            let img: IVec = pres
                .action
                .apply(qidx, &v)?
                .iter()
                .map(|&x| x.rem_euclid(modulus))
                .collect();
            if !(img.iter().all(|&x| x == 0) || contains(&img)) {
                invariant = false;
                break;
            }
        }
        if invariant {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Quotient-level detection: find an invariant cyclic subgroup of the
/// mod-p^r lattice, derive its sign character, average the lifted
/// generator, and compare with the integer oracle. The implication
/// "detected => oracle finds an invariant line" is asserted.
pub fn detect_via_quotient(
    pres: &VAPresentation,
    p: u64,
    r: u32,
    search: CyclicSearch,
) -> Result<DetectReport> {
    if !good_primes(pres.qorder() as u64, p).contains(&p) {
        return Err(Error::Precondition(format!(
            "{p} is not a good prime for |Q| = {}: need p coprime to |Q|, \
             p != 1 mod odd prime divisors of |Q|, and p = 3 mod 4 when |Q| is even",
            pres.qorder()
        )));
    }
    if r < 1 {
        return Err(Error::Precondition("r must be >= 1".into()));
    }
    let pr = (p as i64)
        .checked_pow(r)
        .ok_or(Error::Overflow("modulus"))?;
    if pr > 5_000 {
        return Err(Error::Capacity {
            what: "quotient modulus",
            value: pr as u128,
            cap: 5_000,
        });
    }

    let line = invariant_line_mod_p(p, pres)?;
    if let CyclicSearch::AllCyclic = search {
        let full = invariant_cyclic_exhaustive(p, r, pres)?;
        if full != line.is_some() {
            return Err(Error::Internal(
                "order-p search and full cyclic search disagree".into(),
            ));
        }
    }

    let finding = match line {
        None => None,
        Some((v, units)) => {
            let rho = sign_character(p, &pres.q, &units)?;
            let scale = pr / p as i64;
            let lift: IVec = v.iter().map(|&x| (x * scale).rem_euclid(pr)).collect();
            let averaged = averaged_generator(pres, &lift, &rho)?;
            // nontriviality mod p^r: the average is |Q| times the lift
            let qord = pres.qorder() as i64;
            let mut nonzero_mod = false;
            for i in 0..pres.rank {
                let diff = averaged[i] - qord * lift[i];
                if diff.rem_euclid(pr) != 0 {
                    return Err(Error::Internal(
                        "averaged vector is not |Q| times the lift mod p^r".into(),
                    ));
                }
                if averaged[i].rem_euclid(pr) != 0 {
                    nonzero_mod = true;
                }
            }
            if !nonzero_mod {
                return Err(Error::Internal(
                    "averaged vector vanishes mod p^r despite p coprime to |Q|".into(),
                ));
            }
            Some(InvariantCyclicFinding {
                line_mod_p: v,
                generator_lift: lift,
                rho,
                averaged,
            })
        }
    };

    let oracle = invariant_line_bruteforce(&pres.action, &pres.q)?;
    let implication_holds = finding.is_none() || oracle.is_some();
    if !implication_holds {
        return Err(Error::Internal(
            "quotient detection found an invariant subgroup but the oracle found no line".into(),
        ));
    }
    Ok(DetectReport {
        p,
        r,
        finding,
        oracle,
        implication_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin;

    #[test]
    fn good_primes_examples() {
        assert_eq!(good_primes(2, 25), vec![3, 7, 11, 19, 23]);
        assert_eq!(good_primes(6, 25), vec![11, 23]);
        assert_eq!(good_primes(1, 10), vec![2, 3, 5, 7]);
    }

    #[test]
    fn sign_character_inversion() {
        let q = FiniteGroup::cyclic(2);
        // x -> x^{-1} on Z/7 is the unit 6
        let rho = sign_character(7, &q, &[1, 6]).unwrap();
        assert_eq!(rho.values, vec![1, -1]);
        // trivial action mod 11
        let rho = sign_character(11, &q, &[1, 1]).unwrap();
        assert_eq!(rho.values, vec![1, 1]);
    }

    #[test]
    fn sign_character_bad_prime_errors() {
        // 7 = 1 mod 3: x -> x^2 has the order-3 unit 2 mod 7
        let q = FiniteGroup::cyclic(3);
        let err = sign_character(7, &q, &[1, 2, 4]).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn averaged_generator_examples() {
        let dinf = builtin("Dinf").unwrap();
        let rho = SignChar {
            values: vec![1, -1],
        };
        assert_eq!(averaged_generator(&dinf, &[1], &rho).unwrap(), vec![2]);

        let zx3 = builtin("ZxZ3").unwrap();
        let trivial = SignChar::trivial(3);
        assert_eq!(averaged_generator(&zx3, &[2], &trivial).unwrap(), vec![6]);

        let negi = builtin("Z2negI").unwrap();
        let rho = SignChar {
            values: vec![1, -1],
        };
        assert_eq!(
            averaged_generator(&negi, &[1, 0], &rho).unwrap(),
            vec![2, 0]
        );
    }

    #[test]
    fn averaging_collapse_detected() {
        let dinf = builtin("Dinf").unwrap();
        let trivial = SignChar::trivial(2);
        // with the trivial character the ±1 action cancels
        assert!(matches!(
            averaged_generator(&dinf, &[1], &trivial),
            Err(Error::AveragingCollapsed)
        ));
    }

    #[test]
    fn oracle_examples() {
        let p4 = builtin("p4").unwrap();
        assert!(invariant_line_bruteforce(&p4.action, &p4.q)
            .unwrap()
            .is_none());

        let pm = builtin("pm").unwrap(); // diag(1, -1) action of Z/2
        let w = invariant_line_bruteforce(&pm.action, &pm.q)
            .unwrap()
            .unwrap();
        assert_eq!(w.vector, vec![1, 0]);
        assert_eq!(w.rho.values, vec![1, 1]);

        let z2 = builtin("Z2").unwrap();
        let w = invariant_line_bruteforce(&z2.action, &z2.q)
            .unwrap()
            .unwrap();
        assert_eq!(w.vector, vec![1, 0]);
    }

    #[test]
    fn detect_dinf() {
        let p = builtin("Dinf").unwrap();
        let rep = detect_via_quotient(&p, 3, 1, CyclicSearch::AllCyclic).unwrap();
        let finding = rep.finding.unwrap();
        assert_eq!(finding.line_mod_p, vec![1]);
        assert_eq!(finding.averaged, vec![2]); // twice the lift
        assert!(rep.oracle.is_some());
        assert!(rep.implication_holds);
    }

    #[test]
    fn detect_p4_finds_nothing() {
        let p = builtin("p4").unwrap();
        let rep = detect_via_quotient(&p, 3, 1, CyclicSearch::AllCyclic).unwrap();
        assert!(rep.finding.is_none());
        assert!(rep.oracle.is_none());
        assert!(rep.implication_holds);
    }

    #[test]
    fn detect_trivial_action() {
        let p = builtin("Z2").unwrap();
        let rep = detect_via_quotient(&p, 3, 1, CyclicSearch::OrderP).unwrap();
        assert!(rep.finding.is_some());
        assert!(rep.oracle.is_some());
    }

    #[test]
    fn detect_rejects_bad_prime() {
        let p = builtin("p4").unwrap();
        assert!(matches!(
            detect_via_quotient(&p, 5, 1, CyclicSearch::OrderP),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn characters_enumerated_deterministically() {
        let q = FiniteGroup::cyclic(2);
        let chars = sign_characters(&q);
        assert_eq!(chars.len(), 2);
        assert_eq!(chars[0].values, vec![1, 1]);
        assert_eq!(chars[1].values, vec![1, -1]);
        let z3 = FiniteGroup::cyclic(3);
        assert_eq!(sign_characters(&z3).len(), 1);
    }
}
