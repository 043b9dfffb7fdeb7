//! Virtually abelian groups presented as extensions of a finite group by a
//! free abelian lattice: a rank, a finite group Q, an integer-matrix action
//! of Q on the lattice, and a normalized 2-cocycle. Elements are pairs
//! (lattice vector, Q-index) with the twisted multiplication
//! `(a, q)(b, r) = (a + action(q) b + cocycle(q, r), qr)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::intmat::{self, IMat, IVec};

/// The action of Q on the lattice: one n-by-n integer matrix per element,
/// multiplicative (`mats[q] * mats[r] = mats[qr]`), each of determinant ±1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeAction {
    pub rank: usize,
    pub mats: Vec<IMat>,
}

impl LatticeAction {
    pub fn trivial(rank: usize, qorder: usize) -> Self {
        LatticeAction {
            rank,
            mats: vec![intmat::mat_identity(rank); qorder],
        }
    }

    pub fn apply(&self, q: u32, v: &[i64]) -> Result<IVec> {
        intmat::mat_vec(&self.mats[q as usize], v)
    }

    pub fn validate(&self, q: &FiniteGroup) -> Result<()> {
        if self.mats.len() != q.order() as usize {
            return Err(Error::Invalid(format!(
                "action has {} matrices for a group of order {}",
                self.mats.len(),
                q.order()
            )));
        }
        for (i, m) in self.mats.iter().enumerate() {
            if m.len() != self.rank || m.iter().any(|r| r.len() != self.rank) {
                return Err(Error::Invalid(format!(
                    "action matrix {i} is not {n}x{n}",
                    n = self.rank
                )));
            }
            let d = intmat::det(m)?;
            if d != 1 && d != -1 {
                return Err(Error::Invalid(format!(
                    "action matrix {i} has determinant {d}, expected ±1"
                )));
            }
        }
        if !intmat::is_identity(&self.mats[0]) {
            return Err(Error::Invalid(
                "action of the identity is not the identity matrix".into(),
            ));
        }
        for a in 0..q.order() {
            for b in 0..q.order() {
                let prod = intmat::mat_mul(&self.mats[a as usize], &self.mats[b as usize])?;
                if prod != self.mats[q.mul(a, b) as usize] {
                    return Err(Error::Invalid(format!(
                        "action is not multiplicative at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when distinct elements of Q act by distinct matrices.
    pub fn is_faithful(&self) -> bool {
        for i in 0..self.mats.len() {
            for j in i + 1..self.mats.len() {
                if self.mats[i] == self.mats[j] {
                    return false;
                }
            }
        }
        true
    }
}

/// A normalized 2-cocycle with values in the lattice: `c(1, q) = c(q, 1) = 0`
/// and `action(q) c(r, s) - c(qr, s) + c(q, rs) - c(q, r) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle {
    pub rank: usize,
    pub qorder: usize,
    /// Flattened table: `values[q * qorder + r]` is the vector c(q, r).
    pub values: Vec<IVec>,
}

impl Cocycle {
    pub fn zero(rank: usize, qorder: usize) -> Self {
        Cocycle {
            rank,
            qorder,
            values: vec![vec![0; rank]; qorder * qorder],
        }
    }

    pub fn get(&self, q: u32, r: u32) -> &IVec {
        &self.values[(q as usize) * self.qorder + (r as usize)]
    }

    pub fn set(&mut self, q: u32, r: u32, v: IVec) {
        self.values[(q as usize) * self.qorder + (r as usize)] = v;
    }

    pub fn validate(&self, q: &FiniteGroup, action: &LatticeAction) -> Result<()> {
        if self.qorder != q.order() as usize {
            return Err(Error::Invalid("cocycle table size mismatch".into()));
        }
        if self.values.len() != self.qorder * self.qorder
            || self.values.iter().any(|v| v.len() != self.rank)
        {
            return Err(Error::Invalid("cocycle table shape mismatch".into()));
        }
        for x in 0..q.order() {
            if !intmat::is_zero_vec(self.get(0, x)) || !intmat::is_zero_vec(self.get(x, 0)) {
                return Err(Error::Invalid(format!(
                    "cocycle is not normalized at identity and {x}"
                )));
            }
        }
        for a in 0..q.order() {
            for b in 0..q.order() {
                for c in 0..q.order() {
                    let t1 = action.apply(a, self.get(b, c))?;
                    let t2 = self.get(q.mul(a, b), c);
                    let t3 = self.get(a, q.mul(b, c));
                    let t4 = self.get(a, b);
                    let lhs = intmat::vec_add(
                        &intmat::vec_sub(&t1, t2)?,
                        &intmat::vec_sub(t3, t4)?,
                    )?;
                    if !intmat::is_zero_vec(&lhs) {
                        return Err(Error::Invalid(format!(
                            "cocycle identity violated at (q, r, s) = ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// An element (lattice vector, Q-index) of a presented group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element {
    pub vec: IVec,
    pub q: u32,
}

impl Element {
    pub fn new(vec: IVec, q: u32) -> Self {
        Element { vec, q }
    }

    pub fn translation(vec: IVec) -> Self {
        Element { vec, q: 0 }
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}; q{})",
            self.vec
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            self.q
        )
    }
}

/// A virtually abelian presentation: rank, finite quotient group Q, lattice
/// action, and normalized 2-cocycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VAPresentation {
    pub rank: usize,
    pub q: FiniteGroup,
    pub action: LatticeAction,
    pub cocycle: Cocycle,
    pub name: Option<String>,
}

impl VAPresentation {
    pub fn new(
        rank: usize,
        q: FiniteGroup,
        action: LatticeAction,
        cocycle: Cocycle,
        name: Option<String>,
    ) -> Result<Self> {
        let p = VAPresentation {
            rank,
            q,
            action,
            cocycle,
            name,
        };
        p.validate()?;
        Ok(p)
    }

    /// Assembles without validation. Only for tests that need a corrupted
    /// presentation to exercise error paths.
    #[doc(hidden)]
    pub fn from_raw_parts(
        rank: usize,
        q: FiniteGroup,
        action: LatticeAction,
        cocycle: Cocycle,
        name: Option<String>,
    ) -> Self {
        VAPresentation {
            rank,
            q,
            action,
            cocycle,
            name,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.action.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: self.action.rank,
            });
        }
        if self.cocycle.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: self.cocycle.rank,
            });
        }
        self.action.validate(&self.q)?;
        self.cocycle.validate(&self.q, &self.action)?;
        Ok(())
    }

    pub fn qorder(&self) -> u32 {
        self.q.order()
    }

    pub fn identity(&self) -> Element {
        Element::new(vec![0; self.rank], 0)
    }

    pub fn check_element(&self, g: &Element) -> Result<()> {
        if g.vec.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: g.vec.len(),
            });
        }
        if g.q >= self.q.order() {
            return Err(Error::Invalid(format!(
                "Q-index {} out of range for |Q| = {}",
                g.q,
                self.q.order()
            )));
        }
        Ok(())
    }

    /// Twisted product `(a, q)(b, r) = (a + action(q) b + c(q, r), qr)`.
    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check_element(g)?;
        self.check_element(h)?;
        let moved = self.action.apply(g.q, &h.vec)?;
        let vec = intmat::vec_add(
            &intmat::vec_add(&g.vec, &moved)?,
            self.cocycle.get(g.q, h.q),
        )?;
        Ok(Element::new(vec, self.q.mul(g.q, h.q)))
    }

    /// Inverse: solve `(a, q)(x, q^{-1}) = (0, 1)`.
    pub fn inverse(&self, g: &Element) -> Result<Element> {
        self.check_element(g)?;
        let qi = self.q.inv(g.q);
        let sum = intmat::vec_add(&g.vec, self.cocycle.get(g.q, qi))?;
        let x = intmat::vec_neg(&self.action.apply(qi, &sum)?)?;
        Ok(Element::new(x, qi))
    }

    pub fn power(&self, g: &Element, k: i64) -> Result<Element> {
        if k < 0 {
            let inv = self.inverse(g)?;
            return self.power(&inv, -k);
        }
        let mut acc = self.identity();
        for _ in 0..k {
            acc = self.multiply(&acc, g)?;
        }
        Ok(acc)
    }

    pub fn conjugate(&self, g: &Element, x: &Element) -> Result<Element> {
        let gx = self.multiply(g, x)?;
        self.multiply(&gx, &self.inverse(g)?)
    }

    /// The split companion: same rank, Q, and action, zero cocycle.
    pub fn semidirect(&self) -> VAPresentation {
        VAPresentation {
            rank: self.rank,
            q: self.q.clone(),
            action: self.action.clone(),
            cocycle: Cocycle::zero(self.rank, self.q.order() as usize),
            name: self.name.as_ref().map(|n| format!("{n}-split")),
        }
    }

    /// Lattice basis vectors and a lift of every nontrivial Q-element:
    /// a generating set used by homomorphism constructions.
    pub fn standard_generators(&self) -> Vec<Element> {
        let mut gens = Vec::new();
        for i in 0..self.rank {
            let mut v = vec![0; self.rank];
            v[i] = 1;
            gens.push(Element::new(v, 0));
        }
        for q in 1..self.q.order() {
            gens.push(Element::new(vec![0; self.rank], q));
        }
        gens
    }

    pub fn is_faithful(&self) -> bool {
        self.action.is_faithful()
    }
}

fn simple(name: &str, rank: usize, q: FiniteGroup, mats: Vec<IMat>) -> VAPresentation {
    let qorder = q.order() as usize;
    VAPresentation::new(
        rank,
        q,
        LatticeAction { rank, mats },
        Cocycle::zero(rank, qorder),
        Some(name.to_string()),
    )
    .expect("catalog entry must validate")
}

/// Names of the builtin presentations, in catalog order.
pub fn catalog_names() -> Vec<&'static str> {
    vec![
        "Z", "Z2", "Z3", "Dinf", "twistedZ", "ZxZ2", "ZxZ3", "ZxZ4", "p1", "p2", "p3", "p4",
        "pm", "pg", "Z2negI",
    ]
}

/// Builtin presentation catalog. Wallpaper-style names follow the usual
/// plane-group conventions; `Z2negI` is the rank-2 lattice with the central
/// inversion acting.
pub fn builtin(name: &str) -> Result<VAPresentation> {
    let id1 = vec![vec![1]];
    let neg1 = vec![vec![-1]];
    match name {
        "Z" => Ok(simple("Z", 1, FiniteGroup::cyclic(1), vec![id1])),
        "Z2" | "p1" => Ok(simple(
            name,
            2,
            FiniteGroup::cyclic(1),
            vec![intmat::mat_identity(2)],
        )),
        "Z3" => Ok(simple(
            "Z3",
            3,
            FiniteGroup::cyclic(1),
            vec![intmat::mat_identity(3)],
        )),
        "Dinf" => Ok(simple(
            "Dinf",
            1,
            FiniteGroup::cyclic(2),
            vec![id1, neg1],
        )),
        "twistedZ" => {
            let q = FiniteGroup::cyclic(2);
            let mut c = Cocycle::zero(1, 2);
            c.set(1, 1, vec![1]);
            VAPresentation::new(1, q, LatticeAction::trivial(1, 2), c, Some("twistedZ".into()))
        }
        "ZxZ2" => Ok(simple(
            "ZxZ2",
            1,
            FiniteGroup::cyclic(2),
            vec![id1.clone(), id1],
        )),
        "ZxZ3" => Ok(simple(
            "ZxZ3",
            1,
            FiniteGroup::cyclic(3),
            vec![id1.clone(), id1.clone(), id1],
        )),
        "ZxZ4" => Ok(simple(
            "ZxZ4",
            1,
            FiniteGroup::cyclic(4),
            vec![id1.clone(), id1.clone(), id1.clone(), id1],
        )),
        "p2" | "Z2negI" => {
            let i = intmat::mat_identity(2);
            let neg = vec![vec![-1, 0], vec![0, -1]];
            Ok(simple(name, 2, FiniteGroup::cyclic(2), vec![i, neg]))
        }
        "p3" => {
            let r = vec![vec![0, -1], vec![1, -1]];
            let r2 = intmat::mat_mul(&r, &r)?;
            Ok(simple(
                "p3",
                2,
                FiniteGroup::cyclic(3),
                vec![intmat::mat_identity(2), r, r2],
            ))
        }
        "p4" => {
            let r = vec![vec![0, -1], vec![1, 0]];
            let r2 = intmat::mat_mul(&r, &r)?;
            let r3 = intmat::mat_mul(&r2, &r)?;
            Ok(simple(
                "p4",
                2,
                FiniteGroup::cyclic(4),
                vec![intmat::mat_identity(2), r, r2, r3],
            ))
        }
        "pm" => {
            let m = vec![vec![1, 0], vec![0, -1]];
            Ok(simple(
                "pm",
                2,
                FiniteGroup::cyclic(2),
                vec![intmat::mat_identity(2), m],
            ))
        }
        "pg" => {
            let q = FiniteGroup::cyclic(2);
            let m = vec![vec![1, 0], vec![0, -1]];
            let action = LatticeAction {
                rank: 2,
                mats: vec![intmat::mat_identity(2), m],
            };
            let mut c = Cocycle::zero(2, 2);
            // the glide squares to the unit translation along the axis
            c.set(1, 1, vec![1, 0]);
            VAPresentation::new(2, q, action, c, Some("pg".into()))
        }
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// Every catalog presentation, in catalog order (aliases deduplicated by
/// name, so `p1`/`Z2` and `p2`/`Z2negI` each appear under both names).
pub fn catalog() -> Vec<VAPresentation> {
    catalog_names()
        .into_iter()
        .map(|n| builtin(n).expect("catalog entry"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dinf_reflection_squares_to_identity() {
        let p = builtin("Dinf").unwrap();
        let g = Element::new(vec![1], 1);
        let prod = p.multiply(&g, &g).unwrap();
        assert_eq!(prod, p.identity());
    }

    #[test]
    fn p4_twisted_product() {
        let p = builtin("p4").unwrap();
        let g = Element::new(vec![1, 0], 1);
        let prod = p.multiply(&g, &g).unwrap();
        assert_eq!(prod, Element::new(vec![1, 1], 2));
    }

    #[test]
    fn twisted_z_cocycle_term() {
        let p = builtin("twistedZ").unwrap();
        let g = Element::new(vec![0], 1);
        let prod = p.multiply(&g, &g).unwrap();
        assert_eq!(prod, Element::new(vec![1], 0));
    }

    #[test]
    fn inverse_examples() {
        let p = builtin("Dinf").unwrap();
        assert_eq!(p.inverse(&p.identity()).unwrap(), p.identity());
        assert_eq!(
            p.inverse(&Element::new(vec![3], 0)).unwrap(),
            Element::new(vec![-3], 0)
        );
        let t = builtin("twistedZ").unwrap();
        assert_eq!(
            t.inverse(&Element::new(vec![0], 1)).unwrap(),
            Element::new(vec![-1], 1)
        );
    }

    #[test]
    fn rank_mismatch_rejected() {
        let p = builtin("Dinf").unwrap();
        let bad = Element::new(vec![1, 2], 0);
        assert!(matches!(
            p.multiply(&bad, &p.identity()),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn builtin_examples() {
        let z2 = builtin("Z2").unwrap();
        assert_eq!(z2.rank, 2);
        assert_eq!(z2.qorder(), 1);

        let d = builtin("Dinf").unwrap();
        assert_eq!(d.rank, 1);
        assert_eq!(d.action.mats[1], vec![vec![-1]]);

        let p4 = builtin("p4").unwrap();
        assert_eq!(p4.action.mats[1], vec![vec![0, -1], vec![1, 0]]);
        assert_eq!(intmat::det(&p4.action.mats[1]).unwrap(), 1);
        // the rotation matrix has multiplicative order 4
        let r = &p4.action.mats[1];
        let r2 = intmat::mat_mul(r, r).unwrap();
        let r4 = intmat::mat_mul(&r2, &r2).unwrap();
        assert!(!intmat::is_identity(&r2));
        assert!(intmat::is_identity(&r4));

        assert!(matches!(builtin("nope"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn every_catalog_entry_validates() {
        for p in catalog() {
            p.validate().unwrap();
        }
    }

    #[test]
    fn corrupted_cocycle_detected() {
        let mut c = Cocycle::zero(1, 2);
        c.set(1, 1, vec![1]);
        let p = VAPresentation::from_raw_parts(
            1,
            FiniteGroup::cyclic(2),
            LatticeAction {
                rank: 1,
                mats: vec![vec![vec![1]], vec![vec![-1]]],
            },
            c,
            None,
        );
        // with the -1 action, c(s,s)=1 violates the cocycle identity
        let err = p.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cocycle identity"), "got: {msg}");
    }
}
