//! Rational lines of a presented group: a non-torsion element g with
//! Q-part of order k has g^k in the lattice, and the primitive form of
//! that vector (first nonzero entry positive) names the commensurability
//! class of the cyclic subgroup it generates. Torsion elements map to a
//! basepoint. Conjugation acts through the lattice action, and primitive
//! vectors in a bounded box fall into finite orbits, completed beyond the
//! box so that orbits are intrinsic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::intmat::{self, IVec};
use crate::presentation::{Element, VAPresentation};

/// A primitive lattice vector with the first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RationalLine {
    pub vector: IVec,
}

impl RationalLine {
    pub fn from_vector(v: &[i64]) -> Result<Self> {
        Ok(RationalLine {
            vector: intmat::primitive(v)?,
        })
    }
}

/// A rational line or the basepoint that absorbs torsion elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PointedLine {
    Basepoint,
    Line(RationalLine),
}

/// The line generated by an element: with k the order of its Q-part, the
/// k-th power lands in the lattice; a zero vector there means torsion.
pub fn line_of(p: &VAPresentation, g: &Element) -> Result<PointedLine> {
    p.check_element(g)?;
    let k = p.q.order_of(g.q);
    let power = p.power(g, k as i64)?;
    if power.q != 0 {
        return Err(Error::Internal("power did not land in the lattice".into()));
    }
    if intmat::is_zero_vec(&power.vec) {
        Ok(PointedLine::Basepoint)
    } else {
        Ok(PointedLine::Line(RationalLine::from_vector(&power.vec)?))
    }
}

/// Conjugation on lines: the basepoint is fixed and a line moves by the
/// lattice action of the conjugator's Q-part (its lattice part acts
/// trivially).
pub fn conj_action(p: &VAPresentation, h: &Element, line: &PointedLine) -> Result<PointedLine> {
    p.check_element(h)?;
    match line {
        PointedLine::Basepoint => Ok(PointedLine::Basepoint),
        PointedLine::Line(l) => {
            let moved = p.action.apply(h.q, &l.vector)?;
            Ok(PointedLine::Line(RationalLine::from_vector(&moved)?))
        }
    }
}

/// Primitive vectors with sup-norm at most `bound`, normalized, in
/// lexicographic order.
pub fn primitive_vectors_in_box(rank: usize, bound: i64, caps: &Caps) -> Result<Vec<IVec>> {
    if bound < 1 {
        return Err(Error::Precondition("bound must be >= 1".into()));
    }
    if rank == 0 {
        return Ok(Vec::new());
    }
    let width = (2 * bound + 1) as u128;
    let mut total: u128 = 1;
    for _ in 0..rank {
        total = total.saturating_mul(width);
    }
    if total > caps.lines as u128 * 4 {
        return Err(Error::Capacity {
            what: "line box",
            value: total,
            cap: caps.lines as u128 * 4,
        });
    }
    let mut out = BTreeSet::new();
    let mut v = vec![-bound; rank];
    loop {
        if !intmat::is_zero_vec(&v) {
            let prim = intmat::primitive(&v)?;
            if prim.iter().all(|&x| x.abs() <= bound) {
                out.insert(prim);
            }
        }
        // increment odometer
        let mut i = rank;
        loop {
            if i == 0 {
                let out: Vec<IVec> = out.into_iter().collect();
                if out.len() as u64 > caps.lines {
                    return Err(Error::Capacity {
                        what: "line count",
                        value: out.len() as u128,
                        cap: caps.lines as u128,
                    });
                }
                return Ok(out);
            }
            i -= 1;
            if v[i] < bound {
                v[i] += 1;
                break;
            }
            v[i] = -bound;
        }
    }
}

/// The lines in a box, partitioned into conjugation orbits. Orbits are
/// completed under the full point-group action even when they leave the
/// box, so the partition refines into genuinely invariant classes.
pub fn line_orbits(p: &VAPresentation, bound: i64, caps: &Caps) -> Result<Vec<Vec<RationalLine>>> {
    let box_lines = primitive_vectors_in_box(p.rank, bound, caps)?;
    let mut assigned: BTreeSet<IVec> = BTreeSet::new();
    let mut orbits = Vec::new();
    for v in &box_lines {
        if assigned.contains(v) {
            continue;
        }
        let mut orbit: BTreeSet<IVec> = BTreeSet::new();
        let mut queue = vec![v.clone()];
        orbit.insert(v.clone());
        while let Some(x) = queue.pop() {
            for q in 0..p.qorder() {
                let moved = intmat::primitive(&p.action.apply(q, &x)?)?;
                if orbit.insert(moved.clone()) {
                    if orbit.len() as u64 > caps.lines {
                        return Err(Error::Capacity {
                            what: "orbit size",
                            value: orbit.len() as u128,
                            cap: caps.lines as u128,
                        });
                    }
                    queue.push(moved);
                }
            }
        }
        for x in &orbit {
            assigned.insert(x.clone());
        }
        orbits.push(
            orbit
                .into_iter()
                .map(|vector| RationalLine { vector })
                .collect::<Vec<_>>(),
        );
    }
    Ok(orbits)
}

/// Homomorphism data between two presentations, given by the images of
/// the lattice basis and of the zero-vector lift of every Q-element.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresHom {
    pub basis_images: Vec<Element>,
    pub q_images: Vec<Element>,
}

impl PresHom {
    /// The identity-shaped inclusion for presentations sharing a lattice.
    pub fn lattice_inclusion(src: &VAPresentation, dst: &VAPresentation) -> Result<Self> {
        if src.rank != dst.rank {
            return Err(Error::RankMismatch {
                expected: dst.rank,
                got: src.rank,
            });
        }
        let mut basis_images = Vec::new();
        for i in 0..src.rank {
            let mut v = vec![0; dst.rank];
            v[i] = 1;
            basis_images.push(Element::new(v, 0));
        }
        Ok(PresHom {
            basis_images,
            q_images: vec![dst.identity(); src.qorder() as usize],
        })
    }

    pub fn apply(&self, src: &VAPresentation, dst: &VAPresentation, g: &Element) -> Result<Element> {
        src.check_element(g)?;
        let mut acc = dst.identity();
        for (i, &coeff) in g.vec.iter().enumerate() {
            let img = dst.power(&self.basis_images[i], coeff)?;
            acc = dst.multiply(&acc, &img)?;
        }
        dst.multiply(&acc, &self.q_images[g.q as usize])
    }

    /// Verifies multiplicativity on all pairs from the sample.
    pub fn verify_on(
        &self,
        src: &VAPresentation,
        dst: &VAPresentation,
        sample: &[Element],
    ) -> Result<()> {
        for a in sample {
            for b in sample {
                let lhs = self.apply(src, dst, &src.multiply(a, b)?)?;
                let rhs = dst.multiply(&self.apply(src, dst, a)?, &self.apply(src, dst, b)?)?;
                if lhs != rhs {
                    return Err(Error::Invalid(format!(
                        "homomorphism check failed at {a} and {b}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The kernel is finite exactly when the induced map on a finite-index
    /// sublattice of the source is injective: |Q_dst| times the source
    /// basis maps into the target lattice, and the rank of the resulting
    /// integer matrix decides.
    pub fn has_finite_kernel(&self, src: &VAPresentation, dst: &VAPresentation) -> Result<bool> {
        let scale = dst.qorder() as i64;
        let mut rows: Vec<IVec> = Vec::new();
        for i in 0..src.rank {
            let mut v = vec![0; src.rank];
            v[i] = scale;
            let img = self.apply(src, dst, &Element::new(v, 0))?;
            if img.q != 0 {
                return Err(Error::Internal(
                    "scaled basis image escaped the target lattice".into(),
                ));
            }
            rows.push(img.vec);
        }
        let hnf = intmat::row_hnf(&rows)?;
        Ok(hnf.len() == src.rank)
    }
}

/// Line-level functoriality record of a finite-kernel homomorphism on a
/// sample: no two distinct lines may merge and no non-torsion element may
/// become torsion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctorialityReport {
    pub sample_size: usize,
    pub lines_seen: usize,
    pub merged_pairs: Vec<(Element, Element)>,
    pub torsion_collapses: Vec<Element>,
}

impl FunctorialityReport {
    pub fn holds(&self) -> bool {
        self.merged_pairs.is_empty() && self.torsion_collapses.is_empty()
    }
}

pub fn qp_plus_functoriality(
    src: &VAPresentation,
    dst: &VAPresentation,
    hom: &PresHom,
    sample: &[Element],
) -> Result<FunctorialityReport> {
    hom.verify_on(src, dst, sample)?;
    if !hom.has_finite_kernel(src, dst)? {
        return Err(Error::Precondition(
            "homomorphism has infinite kernel: line functoriality needs a finite kernel".into(),
        ));
    }
    let mut merged = Vec::new();
    let mut collapses = Vec::new();
    let mut lines = BTreeSet::new();
    for g in sample {
        let line = line_of(src, g)?;
        if let PointedLine::Line(l) = &line {
            lines.insert(l.clone());
            let img_line = line_of(dst, &hom.apply(src, dst, g)?)?;
            if img_line == PointedLine::Basepoint {
                collapses.push(g.clone());
            }
        }
    }
    for (i, a) in sample.iter().enumerate() {
        for b in &sample[i + 1..] {
            let la = line_of(src, a)?;
            let lb = line_of(src, b)?;
            if la == PointedLine::Basepoint || lb == PointedLine::Basepoint || la == lb {
                continue;
            }
            let ia = line_of(dst, &hom.apply(src, dst, a)?)?;
            let ib = line_of(dst, &hom.apply(src, dst, b)?)?;
            if ia != PointedLine::Basepoint && ia == ib {
                merged.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(FunctorialityReport {
        sample_size: sample.len(),
        lines_seen: lines.len(),
        merged_pairs: merged,
        torsion_collapses: collapses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin;

    #[test]
    fn line_of_examples() {
        let dinf = builtin("Dinf").unwrap();
        assert_eq!(
            line_of(&dinf, &Element::new(vec![1], 0)).unwrap(),
            PointedLine::Line(RationalLine { vector: vec![1] })
        );
        // reflections are torsion
        assert_eq!(
            line_of(&dinf, &Element::new(vec![1], 1)).unwrap(),
            PointedLine::Basepoint
        );
        // the rotation's fourth power cancels: column sums of I+R+R^2+R^3 vanish
        let p4 = builtin("p4").unwrap();
        assert_eq!(
            line_of(&p4, &Element::new(vec![1, 0], 1)).unwrap(),
            PointedLine::Basepoint
        );
    }

    #[test]
    fn line_of_power_stability() {
        let pg = builtin("pg").unwrap();
        let g = Element::new(vec![2, 1], 1);
        let base = line_of(&pg, &g).unwrap();
        assert_ne!(base, PointedLine::Basepoint);
        for m in 1..=6 {
            let gm = pg.power(&g, m).unwrap();
            assert_eq!(line_of(&pg, &gm).unwrap(), base);
        }
    }

    #[test]
    fn conj_action_examples() {
        let p4 = builtin("p4").unwrap();
        let line = PointedLine::Line(RationalLine {
            vector: vec![1, 0],
        });
        // lattice conjugators act trivially
        let by_translation = conj_action(&p4, &Element::new(vec![5, -3], 0), &line).unwrap();
        assert_eq!(by_translation, line);
        // the rotation carries the first axis to the second
        let by_rot = conj_action(&p4, &Element::new(vec![0, 0], 1), &line).unwrap();
        assert_eq!(
            by_rot,
            PointedLine::Line(RationalLine {
                vector: vec![0, 1]
            })
        );
        assert_eq!(
            conj_action(&p4, &Element::new(vec![0, 0], 3), &PointedLine::Basepoint).unwrap(),
            PointedLine::Basepoint
        );
    }

    #[test]
    fn z2_box_two_lines() {
        let z2 = builtin("Z2").unwrap();
        let orbits = line_orbits(&z2, 2, &Caps::default()).unwrap();
        assert_eq!(orbits.len(), 8);
        assert!(orbits.iter().all(|o| o.len() == 1));
        let all: BTreeSet<IVec> = orbits
            .iter()
            .flatten()
            .map(|l| l.vector.clone())
            .collect();
        let expected: BTreeSet<IVec> = [
            vec![0, 1],
            vec![1, -2],
            vec![1, -1],
            vec![1, 0],
            vec![1, 1],
            vec![1, 2],
            vec![2, -1],
            vec![2, 1],
        ]
        .into_iter()
        .collect();
        assert_eq!(all, expected);
    }

    #[test]
    fn p4_orbit_partition() {
        let p4 = builtin("p4").unwrap();
        let orbits = line_orbits(&p4, 2, &Caps::default()).unwrap();
        assert_eq!(orbits.len(), 4);
        let as_sets: BTreeSet<BTreeSet<IVec>> = orbits
            .iter()
            .map(|o| o.iter().map(|l| l.vector.clone()).collect())
            .collect();
        let expected: BTreeSet<BTreeSet<IVec>> = [
            BTreeSet::from([vec![1, 0], vec![0, 1]]),
            BTreeSet::from([vec![1, 1], vec![1, -1]]),
            BTreeSet::from([vec![1, 2], vec![2, -1]]),
            BTreeSet::from([vec![2, 1], vec![1, -2]]),
        ]
        .into_iter()
        .collect();
        assert_eq!(as_sets, expected);
    }

    #[test]
    fn dinf_single_line() {
        let dinf = builtin("Dinf").unwrap();
        for bound in [1, 3, 7] {
            let orbits = line_orbits(&dinf, bound, &Caps::default()).unwrap();
            assert_eq!(orbits.len(), 1);
            assert_eq!(orbits[0][0].vector, vec![1]);
        }
    }

    #[test]
    fn orbits_partition_everything() {
        let pg = builtin("pg").unwrap();
        let orbits = line_orbits(&pg, 2, &Caps::default()).unwrap();
        let mut seen = BTreeSet::new();
        for orbit in &orbits {
            for line in orbit {
                assert!(seen.insert(line.vector.clone()), "orbits overlap");
            }
        }
        for v in primitive_vectors_in_box(2, 2, &Caps::default()).unwrap() {
            assert!(seen.contains(&v), "line {v:?} missed");
        }
    }

    #[test]
    fn functoriality_lattice_inclusion() {
        let z1 = builtin("Z").unwrap();
        let dinf = builtin("Dinf").unwrap();
        let hom = PresHom::lattice_inclusion(&z1, &dinf).unwrap();
        let sample = vec![
            Element::new(vec![1], 0),
            Element::new(vec![-2], 0),
            Element::new(vec![3], 0),
        ];
        let rep = qp_plus_functoriality(&z1, &dinf, &hom, &sample).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.lines_seen, 1);
    }

    #[test]
    fn functoriality_z2_into_p4() {
        let z2 = builtin("Z2").unwrap();
        let p4 = builtin("p4").unwrap();
        let hom = PresHom::lattice_inclusion(&z2, &p4).unwrap();
        let sample = vec![
            Element::new(vec![1, 0], 0),
            Element::new(vec![0, 1], 0),
            Element::new(vec![2, 3], 0),
            Element::new(vec![-1, 2], 0),
        ];
        let rep = qp_plus_functoriality(&z2, &p4, &hom, &sample).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.lines_seen, 4);
    }

    #[test]
    fn functoriality_refuses_infinite_kernel() {
        // collapse p4's lattice: everything maps to the Q-part only
        let p4 = builtin("p4").unwrap();
        let z1 = builtin("Z").unwrap();
        let hom = PresHom {
            basis_images: vec![z1.identity(), z1.identity()],
            q_images: vec![z1.identity(); 4],
        };
        let sample = vec![Element::new(vec![1, 0], 0), Element::new(vec![0, 1], 0)];
        let err = qp_plus_functoriality(&p4, &z1, &hom, &sample).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
