//! Finite quotients of a presented group by the scaled sublattice m·Z^n.
//! The quotient has order m^n·|Q|; its elements are indexed by
//! (vector in [0, m)^n in lexicographic order, Q-index), so the projection
//! and section are exact and deterministic.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::presentation::{Element, VAPresentation};

#[derive(Debug, Clone)]
pub struct FiniteQuotient {
    pub modulus: i64,
    pub rank: usize,
    pub qorder: u32,
    pub group: FiniteGroup,
}

impl FiniteQuotient {
    pub fn order(&self) -> u32 {
        self.group.order()
    }

    /// Index of the residue of an element. A surjective homomorphism with
    /// kernel exactly m·Z^n over the identity of Q.
    pub fn project(&self, g: &Element) -> Result<u32> {
        if g.vec.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: g.vec.len(),
            });
        }
        if g.q >= self.qorder {
            return Err(Error::Invalid("Q-index out of range".into()));
        }
        let mut idx: u64 = 0;
        for &x in &g.vec {
            idx = idx * (self.modulus as u64) + x.rem_euclid(self.modulus) as u64;
        }
        Ok((idx * self.qorder as u64 + g.q as u64) as u32)
    }

    /// The canonical preimage: vector entries in [0, m).
    pub fn section(&self, index: u32) -> Element {
        let q = index % self.qorder;
        let mut rest = (index / self.qorder) as u64;
        let m = self.modulus as u64;
        let mut vec = vec![0i64; self.rank];
        for i in (0..self.rank).rev() {
            vec[i] = (rest % m) as i64;
            rest /= m;
        }
        Element::new(vec, q)
    }
}

impl VAPresentation {
    /// The quotient by the sublattice m·Z^n, materialized as a table group
    /// of order m^n·|Q|.
    pub fn finite_quotient(&self, m: i64, caps: &Caps) -> Result<FiniteQuotient> {
        if m < 1 {
            return Err(Error::Invalid(format!("modulus must be >= 1, got {m}")));
        }
        let mut order: u128 = self.q.order() as u128;
        for _ in 0..self.rank {
            order = order
                .checked_mul(m as u128)
                .ok_or(Error::Overflow("quotient order"))?;
        }
        caps.check_group_order(order)?;
        let n = order as usize;
        let quotient = FiniteQuotient {
            modulus: m,
            rank: self.rank,
            qorder: self.q.order(),
            group: FiniteGroup::cyclic(1), // placeholder, replaced below
        };
        let mut mul = vec![0u32; n * n];
        let sections: Vec<Element> = (0..n as u32).map(|i| quotient.section(i)).collect();
        for (i, a) in sections.iter().enumerate() {
            for (j, b) in sections.iter().enumerate() {
                let prod = self.multiply(a, b)?;
                mul[i * n + j] = quotient.project(&prod)?;
            }
        }
        let group = FiniteGroup::from_mul_table_trusted(n as u32, mul)?;
        Ok(FiniteQuotient { group, ..quotient })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin;

    #[test]
    fn dinf_mod_1_is_q() {
        let p = builtin("Dinf").unwrap();
        let q = p.finite_quotient(1, &Caps::default()).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(q.group.order_multiset(), vec![1, 2]);
    }

    #[test]
    fn dinf_mod_3_is_s3() {
        let p = builtin("Dinf").unwrap();
        let q = p.finite_quotient(3, &Caps::default()).unwrap();
        assert_eq!(q.order(), 6);
        assert!(!q.group.is_abelian());
        // the element-order multiset pins the isomorphism type among the
        // two order-6 groups
        assert_eq!(q.group.order_multiset(), vec![1, 2, 2, 2, 3, 3]);
    }

    #[test]
    fn p4_mod_3_has_order_36() {
        let p = builtin("p4").unwrap();
        let q = p.finite_quotient(3, &Caps::default()).unwrap();
        assert_eq!(q.order(), 36);
    }

    #[test]
    fn projection_section_contract() {
        let p = builtin("p4").unwrap();
        let q = p.finite_quotient(3, &Caps::default()).unwrap();
        for i in 0..q.order() {
            assert_eq!(q.project(&q.section(i)).unwrap(), i);
        }
        // kernel is exactly 3Z^2 over the identity of Q
        for i in 0..q.order() {
            let e = q.section(i);
            let is_kernel = q.project(&e).unwrap() == 0;
            let expected = e.q == 0 && e.vec.iter().all(|&x| x.rem_euclid(3) == 0);
            assert_eq!(is_kernel, expected);
        }
    }

    #[test]
    fn projection_is_homomorphism() {
        let p = builtin("pg").unwrap();
        let q = p.finite_quotient(2, &Caps::default()).unwrap();
        let a = Element::new(vec![3, -2], 1);
        let b = Element::new(vec![-1, 4], 1);
        let lhs = q.project(&p.multiply(&a, &b).unwrap()).unwrap();
        let rhs = q.group.mul(q.project(&a).unwrap(), q.project(&b).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn capacity_guard() {
        let p = builtin("Z3").unwrap();
        let err = p.finite_quotient(100, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
