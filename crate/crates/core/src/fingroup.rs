//! Finite groups as explicit multiplication tables, with exhaustive
//! subgroup enumeration. Element 0 is always the identity. All orders are
//! bounded by [`Caps::group_order`]; enumeration is deterministic
//! (subgroups are ordered by their sorted element lists).

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: u32,
    /// Flattened multiplication table: `mul[a * order + b] = a * b`.
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, checking the axioms:
    /// index 0 is a two-sided identity, every element has an inverse, and
    /// the table is associative on all triples.
    pub fn from_mul_table(order: u32, mul: Vec<u32>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("group order must be positive".into()));
        }
        let n = order as usize;
        if mul.len() != n * n {
            return Err(Error::Invalid(format!(
                "multiplication table must have {} entries, got {}",
                n * n,
                mul.len()
            )));
        }
        if mul.iter().any(|&x| x >= order) {
            return Err(Error::Invalid(
                "multiplication table entry out of range".into(),
            ));
        }
        for a in 0..order {
            if mul[(a as usize) * n] != a || mul[a as usize] != a {
                return Err(Error::Invalid(format!(
                    "element 0 is not a two-sided identity at {a}"
                )));
            }
        }
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 && mul[b * n + a] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(Error::Invalid(format!("element {a} has no inverse")));
            }
        }
        let g = FiniteGroup { order, mul, inv };
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)) {
                        return Err(Error::Invalid(format!(
                            "multiplication table is not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Table constructor for internally generated groups whose axioms hold
    /// by construction (quotients, permutation closures). Still computes
    /// inverses and checks the identity row/column.
    pub(crate) fn from_mul_table_trusted(order: u32, mul: Vec<u32>) -> Result<Self> {
        let n = order as usize;
        debug_assert_eq!(mul.len(), n * n);
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(Error::Internal(format!("element {a} has no inverse")));
            }
        }
        Ok(FiniteGroup { order, mul, inv })
    }

    pub fn cyclic(n: u32) -> Self {
        let order = n.max(1);
        let m = order as usize;
        let mut mul = vec![0u32; m * m];
        for a in 0..m {
            for b in 0..m {
                mul[a * m + b] = ((a + b) % m) as u32;
            }
        }
        FiniteGroup::from_mul_table_trusted(order, mul).expect("cyclic group is valid")
    }

    /// Closure of permutations of `0..degree` under composition. The
    /// generated group is re-indexed so the identity is element 0 and the
    /// remaining elements are sorted by their permutation word.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>], caps: &Caps) -> Result<Self> {
        for g in gens {
            if g.len() != degree {
                return Err(Error::Invalid("permutation has wrong degree".into()));
            }
            let mut seen = vec![false; degree];
            for &i in g {
                if i >= degree || seen[i] {
                    return Err(Error::Invalid("not a permutation".into()));
                }
                seen[i] = true;
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems: BTreeSet<Vec<usize>> = BTreeSet::new();
        elems.insert(id.clone());
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        queue.push_back(id.clone());
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q: Vec<usize> = (0..degree).map(|i| g[p[i]]).collect();
                if elems.insert(q.clone()) {
                    caps.check_group_order(elems.len() as u128)?;
                    queue.push_back(q);
                }
            }
        }
        let mut sorted: Vec<Vec<usize>> = elems.into_iter().collect();
        // identity first, the rest in word order
        let id_pos = sorted.iter().position(|p| *p == id).unwrap();
        sorted.swap(0, id_pos);
        sorted[1..].sort();
        let index = |p: &Vec<usize>| sorted.iter().position(|q| q == p).unwrap() as u32;
        let n = sorted.len();
        let mut mul = vec![0u32; n * n];
        for (a, pa) in sorted.iter().enumerate() {
            for (b, pb) in sorted.iter().enumerate() {
                let prod: Vec<usize> = (0..degree).map(|i| pa[pb[i]]).collect();
                mul[a * n + b] = index(&prod);
            }
        }
        FiniteGroup::from_mul_table_trusted(n as u32, mul)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a as usize) * (self.order as usize) + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn order_of(&self, a: u32) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order).any(|a| self.order_of(a) == self.order)
    }

    /// Multiset of element orders, ascending. A cheap isomorphism
    /// fingerprint for the small groups used in tests.
    pub fn order_multiset(&self) -> Vec<u32> {
        let mut v: Vec<u32> = (0..self.order).map(|a| self.order_of(a)).collect();
        v.sort_unstable();
        v
    }

    /// Closure of a set of elements as a sorted element list.
    pub fn closure(&self, seed: &[u32]) -> Subgroup {
        let n = self.order as usize;
        let mut in_set = vec![false; n];
        in_set[0] = true;
        let mut members = vec![0u32];
        let mut queue: Vec<u32> = Vec::new();
        for &s in seed {
            if !in_set[s as usize] {
                in_set[s as usize] = true;
                members.push(s);
                queue.push(s);
            }
        }
        while let Some(x) = queue.pop() {
            let snapshot = members.clone();
            for &y in &snapshot {
                for z in [self.mul(x, y), self.mul(y, x), self.inv(x)] {
                    if !in_set[z as usize] {
                        in_set[z as usize] = true;
                        members.push(z);
                        queue.push(z);
                    }
                }
            }
        }
        members.sort_unstable();
        Subgroup { elems: members }
    }

    /// All subgroups, ordered by sorted element lists. Every subgroup is
    /// reached by repeatedly extending known subgroups by one generator.
    pub fn subgroups(&self, caps: &Caps) -> Result<Vec<Subgroup>> {
        caps.check_group_order(self.order as u128)?;
        let trivial = Subgroup { elems: vec![0] };
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        seen.insert(trivial.elems.clone());
        let mut queue: VecDeque<Subgroup> = VecDeque::new();
        queue.push_back(trivial.clone());
        let mut all = vec![trivial];
        while let Some(h) = queue.pop_front() {
            let mut covered = vec![false; self.order as usize];
            for &x in &h.elems {
                covered[x as usize] = true;
            }
            for g in 0..self.order {
                if covered[g as usize] {
                    continue;
                }
                // every g' in the coset Hg generates the same extension
                for &x in &h.elems {
                    covered[self.mul(x, g) as usize] = true;
                }
                let ext = self.closure_extend(&h, g);
                if seen.insert(ext.elems.clone()) {
                    queue.push_back(ext.clone());
                    all.push(ext);
                }
            }
        }
        all.sort_by(|a, b| a.elems.cmp(&b.elems));
        Ok(all)
    }

    /// Closure of `h` extended by one element; starts from the known
    /// subgroup rather than from scratch.
    fn closure_extend(&self, h: &Subgroup, g: u32) -> Subgroup {
        let n = self.order as usize;
        let mut in_set = vec![false; n];
        for &x in &h.elems {
            in_set[x as usize] = true;
        }
        let mut members = h.elems.clone();
        let mut queue = vec![g];
        in_set[g as usize] = true;
        members.push(g);
        while let Some(x) = queue.pop() {
            let snapshot = members.clone();
            for &y in &snapshot {
                for z in [self.mul(x, y), self.mul(y, x), self.inv(x)] {
                    if !in_set[z as usize] {
                        in_set[z as usize] = true;
                        members.push(z);
                        queue.push(z);
                    }
                }
            }
        }
        members.sort_unstable();
        Subgroup { elems: members }
    }

    pub fn conjugate_subgroup(&self, h: &Subgroup, g: u32) -> Subgroup {
        let mut elems: Vec<u32> = h.elems.iter().map(|&x| self.conj(g, x)).collect();
        elems.sort_unstable();
        Subgroup { elems }
    }

    /// One representative per conjugacy class of subgroups: the
    /// lexicographically least member of each class, listed in order.
    pub fn subgroup_classes(&self, caps: &Caps) -> Result<Vec<Subgroup>> {
        let all = self.subgroups(caps)?;
        let mut reps: Vec<Subgroup> = Vec::new();
        let mut classed: HashSet<Vec<u32>> = HashSet::new();
        for h in &all {
            if classed.contains(&h.elems) {
                continue;
            }
            // h is lex-least in its class because `all` is sorted
            for g in 0..self.order {
                classed.insert(self.conjugate_subgroup(h, g).elems);
            }
            reps.push(h.clone());
        }
        Ok(reps)
    }

    /// All cyclic subgroups, ordered by sorted element lists.
    pub fn cyclic_subgroups(&self) -> Vec<Subgroup> {
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        for g in 0..self.order {
            let mut elems = vec![0u32];
            let mut x = g;
            while x != 0 {
                elems.push(x);
                x = self.mul(x, g);
            }
            elems.sort_unstable();
            seen.insert(elems);
        }
        seen.into_iter().map(|elems| Subgroup { elems }).collect()
    }

    pub fn is_normal(&self, h: &Subgroup, ambient: &Subgroup) -> bool {
        ambient
            .elems
            .iter()
            .all(|&g| h.elems.iter().all(|&x| h.contains(self.conj(g, x))))
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup {
            elems: (0..self.order).collect(),
        }
    }
}

/// A subgroup stored as its sorted element list in some ambient group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    pub elems: Vec<u32>,
}

impl Subgroup {
    pub fn new(group: &FiniteGroup, elems: Vec<u32>) -> Result<Self> {
        let mut sorted = elems;
        sorted.sort_unstable();
        sorted.dedup();
        let s = Subgroup { elems: sorted };
        s.validate(group)?;
        Ok(s)
    }

    pub fn trivial() -> Self {
        Subgroup { elems: vec![0] }
    }

    pub fn order(&self) -> u32 {
        self.elems.len() as u32
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    /// Checks closure under multiplication and inverse and that the
    /// identity is present.
    pub fn validate(&self, group: &FiniteGroup) -> Result<()> {
        if !self.contains(0) {
            return Err(Error::Invalid("subgroup does not contain identity".into()));
        }
        for &a in &self.elems {
            if a >= group.order() {
                return Err(Error::Invalid("subgroup element out of range".into()));
            }
            if !self.contains(group.inv(a)) {
                return Err(Error::Invalid(format!(
                    "subgroup not closed under inverse at {a}"
                )));
            }
            for &b in &self.elems {
                if !self.contains(group.mul(a, b)) {
                    return Err(Error::Invalid(format!(
                        "subgroup not closed under product at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_cyclic_in(&self, group: &FiniteGroup) -> bool {
        self.elems
            .iter()
            .any(|&g| group.order_of(g) == self.order())
    }

    /// Re-indexes the subgroup as a standalone group. Element i of the
    /// result corresponds to `self.elems[perm[i]]`; the identity moves to
    /// index 0 and the rest keep their sorted order.
    pub fn as_group(&self, group: &FiniteGroup) -> Result<FiniteGroup> {
        self.validate(group)?;
        let n = self.elems.len();
        // elems is sorted and contains 0, so elems[0] == 0 already
        let index_of = |x: u32| self.elems.binary_search(&x).unwrap() as u32;
        let mut mul = vec![0u32; n * n];
        for (i, &a) in self.elems.iter().enumerate() {
            for (j, &b) in self.elems.iter().enumerate() {
                mul[i * n + j] = index_of(group.mul(a, b));
            }
        }
        FiniteGroup::from_mul_table_trusted(n as u32, mul)
    }
}

/// Primes up to `bound`, ascending.
pub fn primes_upto(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n as u64).filter(|&i| sieve[i as usize]).collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// True when n is p^k for some k >= 0 (so 1 counts as a power of any prime).
pub fn is_power_of(n: u64, p: u64) -> bool {
    let mut n = n;
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], &Caps::default())
            .unwrap()
    }

    #[test]
    fn cyclic_basics() {
        let z6 = FiniteGroup::cyclic(6);
        assert_eq!(z6.order(), 6);
        assert_eq!(z6.mul(4, 5), 3);
        assert_eq!(z6.inv(2), 4);
        assert_eq!(z6.order_of(2), 3);
        assert!(z6.is_cyclic());
    }

    #[test]
    fn z2_subgroups() {
        let z2 = FiniteGroup::cyclic(2);
        let subs = z2.subgroups(&Caps::default()).unwrap();
        assert_eq!(subs.len(), 2);
        assert_eq!(subs[0].elems, vec![0]);
        assert_eq!(subs[1].elems, vec![0, 1]);
    }

    #[test]
    fn s3_has_six_subgroups_four_classes() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        let subs = g.subgroups(&Caps::default()).unwrap();
        assert_eq!(subs.len(), 6);
        for s in &subs {
            s.validate(&g).unwrap();
        }
        let classes = g.subgroup_classes(&Caps::default()).unwrap();
        assert_eq!(classes.len(), 4);
        let orders: Vec<u32> = classes.iter().map(|c| c.order()).collect();
        let mut sorted = orders.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 6]);
    }

    #[test]
    fn z6_has_four_subgroups() {
        let z6 = FiniteGroup::cyclic(6);
        let subs = z6.subgroups(&Caps::default()).unwrap();
        assert_eq!(subs.len(), 4);
        let orders: Vec<u32> = subs.iter().map(|s| s.order()).collect();
        let mut sorted = orders.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 6]);
    }

    #[test]
    fn a4_subgroups() {
        let a4 =
            FiniteGroup::from_permutations(4, &[vec![1, 2, 0, 3], vec![0, 2, 3, 1]], &Caps::default())
                .unwrap();
        assert_eq!(a4.order(), 12);
        let subs = a4.subgroups(&Caps::default()).unwrap();
        assert_eq!(subs.len(), 10);
    }

    #[test]
    fn subgroup_as_group_roundtrip() {
        let g = s3();
        let classes = g.subgroup_classes(&Caps::default()).unwrap();
        let z3 = classes.iter().find(|c| c.order() == 3).unwrap();
        let h = z3.as_group(&g).unwrap();
        assert_eq!(h.order(), 3);
        assert!(h.is_cyclic());
    }

    #[test]
    fn invalid_table_rejected() {
        // order 2 with broken identity row
        let err = FiniteGroup::from_mul_table(2, vec![0, 1, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn nonassociative_table_rejected() {
        // identity rows valid, but 1*1 = 2, 2*2 = 1, 1*2 = 0, 2*1 = 0 in a
        // 3-element magma that is not associative
        let mul = vec![0, 1, 2, 1, 2, 0, 2, 1, 0];
        let err = FiniteGroup::from_mul_table(3, mul).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(primes_upto(25), vec![2, 3, 5, 7, 11, 13, 17, 19, 23]);
        assert!(is_power_of(8, 2));
        assert!(is_power_of(1, 7));
        assert!(!is_power_of(12, 2));
    }
}
