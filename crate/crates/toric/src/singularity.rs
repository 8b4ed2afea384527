//! Terminal/canonical classification via shed lattice points, discrepancies
//! and cyclic quotient constructions.
//!
//! With psi the piecewise linear function taking the value 1 on every ray
//! (defined per cone when the canonical divisor is Q-Cartier), the shed is
//! the region psi <= 1. A fan is terminal when the only nonzero lattice
//! points of the shed are the ray generators, canonical when no lattice
//! point has psi strictly below 1, and the discrepancy of a primitive
//! vector v of the support is psi(v) - 1.

use crate::arith::{dot, Int, QVec, Rat};
use crate::cone::{lattice_points_under, Cone};
use crate::divisor::{CartierData, Divisor};
use crate::error::{Error, Result};
use crate::fan::{Fan, FanRef};
use crate::lattice::Lattice;
use num_traits::{One, Signed};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SingularityClass {
    Smooth,
    Terminal,
    Canonical,
    NotCanonical,
    NotQGorenstein,
}

impl std::fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SingularityClass::Smooth => "smooth",
            SingularityClass::Terminal => "terminal",
            SingularityClass::Canonical => "canonical",
            SingularityClass::NotCanonical => "not-canonical",
            SingularityClass::NotQGorenstein => "not-qgorenstein",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct SingularityReport {
    pub qgorenstein: bool,
    pub gorenstein_index: Option<Int>,
    pub class: SingularityClass,
    /// Nonzero non-generator shed points (psi <= 1); nonempty exactly when
    /// the fan fails to be terminal.
    pub shed_witnesses: Vec<QVec>,
    /// Points with psi < 1; nonempty exactly when the fan fails to be
    /// canonical.
    pub negative_witnesses: Vec<QVec>,
    /// Indices of maximal cones that are not smooth.
    pub singular_cones: Vec<usize>,
}

/// Cartier data of the canonical divisor, when it exists.
pub fn qgorenstein_data(fan: &FanRef) -> Option<CartierData> {
    Divisor::canonical(fan.clone()).cartier_data()
}

/// psi(v) - 1 for a primitive vector of the support that is not a ray.
pub fn discrepancy(fan: &Fan, v: &QVec) -> Result<Rat> {
    let fan_ref: FanRef = Arc::new(fan.clone());
    let k = Divisor::canonical(fan_ref);
    let cartier = k.cartier_data().ok_or(Error::NotQGorenstein)?;
    if fan.ray_index(v).is_some() {
        return Err(Error::RayOfFan);
    }
    if !fan.support_contains(v) {
        return Err(Error::OutsideSupport);
    }
    // the canonical covectors pair to +1 with every ray, so psi is the
    // support function itself
    let psi = k.support_value(&cartier, v)?;
    Ok(psi - Rat::one())
}

/// Classifies the fan through its shed lattice points.
pub fn classify(fan: &FanRef) -> SingularityReport {
    let singular_cones: Vec<usize> = (0..fan.max_cones().len())
        .filter(|&i| !fan.cone(i).is_smooth_cone())
        .collect();
    let Some(cartier) = qgorenstein_data(fan) else {
        return SingularityReport {
            qgorenstein: false,
            gorenstein_index: None,
            class: SingularityClass::NotQGorenstein,
            shed_witnesses: Vec::new(),
            negative_witnesses: Vec::new(),
            singular_cones,
        };
    };
    let mut shed: Vec<QVec> = Vec::new();
    let mut negative: Vec<QVec> = Vec::new();
    let one = Rat::one();
    for (ci, _) in fan.max_cones().iter().enumerate() {
        let cone = fan.cone(ci);
        // psi is linear on the cone, given by the canonical covector
        let psi: QVec = cartier.covectors[ci].clone();
        let points =
            lattice_points_under(cone, &psi, &one).expect("psi is positive on the cone");
        for p in points {
            if fan.ray_index(&p).is_some() {
                continue;
            }
            if dot(&psi, &p) < one && !negative.contains(&p) {
                negative.push(p.clone());
            }
            if !shed.contains(&p) {
                shed.push(p);
            }
        }
    }
    shed.sort();
    negative.sort();
    let class = if !negative.is_empty() {
        SingularityClass::NotCanonical
    } else if !shed.is_empty() {
        SingularityClass::Canonical
    } else if singular_cones.is_empty() {
        SingularityClass::Smooth
    } else {
        SingularityClass::Terminal
    };
    SingularityReport {
        qgorenstein: true,
        gorenstein_index: Some(cartier.cartier_index),
        class,
        shed_witnesses: shed,
        negative_witnesses: negative,
        singular_cones,
    }
}

/// Recognizes the three-dimensional ordinary double point: the cone over a
/// unit square, up to a lattice isomorphism.
pub fn is_odp(cone: &Cone) -> Result<bool> {
    if cone.dim() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            got: cone.dim(),
        });
    }
    if cone.gens().len() != 4 {
        return Ok(false);
    }
    // model: <(1,0,0), (0,1,0), (1,0,1), (0,1,1)>; try moving three
    // generators to a model triple and check the fourth
    let lattice = cone.lattice();
    let reb: Vec<QVec> = cone
        .gens()
        .iter()
        .map(|g| lattice.rebase_q(g))
        .collect();
    let model: Vec<QVec> = vec![
        crate::arith::qvec(&[1, 0, 0]),
        crate::arith::qvec(&[0, 1, 0]),
        crate::arith::qvec(&[1, 0, 1]),
        crate::arith::qvec(&[0, 1, 1]),
    ];
    let idx = [0usize, 1, 2, 3];
    for perm in permutations(&idx) {
        let src = crate::mat::QMat::from_cols(&[
            reb[perm[0]].clone(),
            reb[perm[1]].clone(),
            reb[perm[2]].clone(),
        ]);
        let Some(src_inv) = src.inverse() else { continue };
        let dst = crate::mat::QMat::from_cols(&model[..3].to_vec());
        let a = dst.mul(&src_inv);
        let integral =
            (0..3).all(|i| (0..3).all(|j| a[(i, j)].denom().is_one()));
        if !integral || a.det().abs() != Rat::one() {
            continue;
        }
        if a.mul_vec(&reb[perm[3]]) == model[3] {
            return Ok(true);
        }
    }
    Ok(false)
}

fn permutations(items: &[usize; 4]) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out.push([items[a], items[b], items[c], items[d]]);
            }
        }
    }
    out
}

/// A cyclic quotient: order r acting with the given weights, realized by
/// extending the lattice with the generator (a_1/r, ..., a_n/r).
#[derive(Debug, Clone)]
pub struct QuotientSpec {
    pub order: i64,
    pub weights: Vec<i64>,
    pub base: FanRef,
}

/// The fan of the quotient: same cones, finer lattice, rays re-primitivized.
pub fn quotient_fan(spec: &QuotientSpec) -> Result<Fan> {
    let n = spec.base.rank();
    if spec.order < 1 || spec.weights.len() != n {
        return Err(Error::InvalidWeights);
    }
    if !spec.base.lattice().is_standard() {
        return Err(Error::InvalidWeights);
    }
    let extra: QVec = spec
        .weights
        .iter()
        .map(|&a| crate::arith::ratio(a, spec.order))
        .collect();
    let lattice = if spec.order == 1 {
        Lattice::standard(n)
    } else {
        Lattice::with_extra_gens(n, vec![extra])?
    };
    let rays: Vec<QVec> = spec
        .base
        .rays()
        .iter()
        .map(|v| lattice.primitivize(v))
        .collect::<Result<_>>()?;
    Fan::validate(lattice, rays, spec.base.max_cones().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qvec, rat, ratio};

    fn fan(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> FanRef {
        Arc::new(
            Fan::validate(
                Lattice::standard(rank),
                rays.iter().map(|r| qvec(r)).collect(),
                cones.iter().map(|c| c.to_vec()).collect(),
            )
            .unwrap(),
        )
    }

    const FLIP_RAYS: [&[i64]; 6] = [
        &[1, 0, 0],
        &[0, 1, 0],
        &[0, 0, 1],
        &[1, 1, -1],
        &[3, 1, -2],
        &[-1, 1, 2],
    ];

    #[test]
    fn flip_source_is_canonical_not_terminal() {
        let a = fan(3, &FLIP_RAYS, &[&[0, 2, 4, 5], &[1, 3, 4, 5]]);
        let report = classify(&a);
        assert_eq!(report.class, SingularityClass::Canonical);
        assert_eq!(report.gorenstein_index, Some(Int::one()));
        assert_eq!(
            report.shed_witnesses,
            vec![qvec(&[0, 1, 1]), qvec(&[1, 1, 0]), qvec(&[2, 1, -1])]
        );
        assert!(report.negative_witnesses.is_empty());
    }

    #[test]
    fn flip_target_side_is_terminal_with_one_odp() {
        let b = fan(3, &FLIP_RAYS, &[&[0, 3, 4], &[1, 2, 5], &[0, 1, 2, 3]]);
        let report = classify(&b);
        assert_eq!(report.class, SingularityClass::Terminal);
        assert_eq!(report.singular_cones.len(), 1);
        let ci = report.singular_cones[0];
        assert_eq!(b.max_cones()[ci], vec![0, 1, 2, 3]);
        assert!(is_odp(b.cone(ci)).unwrap());
    }

    #[test]
    fn sato_source_is_terminal() {
        let x = fan(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, -1],
                &[1, 1, 0],
                &[0, 1, 1],
            ],
            &[&[0, 3, 4], &[0, 2, 4, 5], &[1, 3, 4, 5]],
        );
        let report = classify(&x);
        assert_eq!(report.class, SingularityClass::Terminal);
    }

    #[test]
    fn five_ray_cone_is_not_qgorenstein() {
        let w = fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1], &[-1, 1, 2]],
            &[&[0, 1, 2, 3, 4]],
        );
        let report = classify(&w);
        assert_eq!(report.class, SingularityClass::NotQGorenstein);
        assert!(discrepancy(&w, &qvec(&[0, 1, 1])).is_err());
    }

    #[test]
    fn discrepancy_values() {
        let a = fan(3, &FLIP_RAYS, &[&[0, 2, 4, 5], &[1, 3, 4, 5]]);
        assert_eq!(discrepancy(&a, &qvec(&[0, 1, 1])).unwrap(), rat(0));
        assert!(matches!(
            discrepancy(&a, &qvec(&[3, 1, -2])),
            Err(Error::RayOfFan)
        ));
        assert!(matches!(
            discrepancy(&a, &qvec(&[0, 0, -1])),
            Err(Error::OutsideSupport)
        ));
        // smooth blow-up center in the plane: discrepancy 1
        let quad = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        assert_eq!(discrepancy(&quad, &qvec(&[1, 1])).unwrap(), rat(1));
    }

    #[test]
    fn odp_examples() {
        let l = Lattice::standard(3);
        let square = Cone::from_gens(
            &l,
            &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1]), qvec(&[1, 1, -1])],
        )
        .unwrap();
        assert!(is_odp(&square).unwrap());
        let smooth = Cone::from_gens(
            &l,
            &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])],
        )
        .unwrap();
        assert!(!is_odp(&smooth).unwrap());
        let ray = Cone::from_gens(&l, &[qvec(&[1, 0, 0])]).unwrap();
        assert!(is_odp(&ray).is_err());
    }

    #[test]
    fn quarter_quotient_is_not_canonical() {
        let octant = fan(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[&[0, 1, 2]]);
        let spec = QuotientSpec {
            order: 4,
            weights: vec![1, 1, 1],
            base: octant,
        };
        let y = Arc::new(quotient_fan(&spec).unwrap());
        let report = classify(&y);
        assert_eq!(report.class, SingularityClass::NotCanonical);
        let quarter = vec![ratio(1, 4), ratio(1, 4), ratio(1, 4)];
        assert!(report.negative_witnesses.contains(&quarter));
        assert_eq!(discrepancy(&y, &quarter).unwrap(), ratio(-1, 4));
    }

    #[test]
    fn trivial_quotient_is_identity() {
        let octant = fan(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[&[0, 1, 2]]);
        let spec = QuotientSpec {
            order: 1,
            weights: vec![0, 0, 0],
            base: octant.clone(),
        };
        let same = quotient_fan(&spec).unwrap();
        assert!(same.same_fan(&octant));
    }

    #[test]
    fn mori_fiber_source_quotient_is_terminal_and_simplicial() {
        // P^1 x C^3 with the order-four action: weights (2,1,1,1)
        let base = fan(
            4,
            &[
                &[1, 0, 0, 0],
                &[-1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
            ],
            &[&[0, 2, 3, 4], &[1, 2, 3, 4]],
        );
        let spec = QuotientSpec {
            order: 4,
            weights: vec![2, 1, 1, 1],
            base,
        };
        let x = Arc::new(quotient_fan(&spec).unwrap());
        assert!(x.is_simplicial());
        let report = classify(&x);
        assert_eq!(report.class, SingularityClass::Terminal);
        assert!(!report.singular_cones.is_empty());
    }
}
