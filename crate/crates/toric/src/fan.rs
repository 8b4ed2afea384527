//! Fans: validated collections of strongly convex cones closed under faces.
//!
//! Input format is rays plus maximal cones (ray index sets); the face
//! closure, the wall list and per-cone facet data are derived during
//! validation. Ray order is significant: divisor coefficients align by ray
//! index.

use crate::arith::{QVec, Rat};
use crate::cone::{same_gen_set, Cone};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::mat::QMat;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaceKey {
    /// Sorted ray indices generating the face (empty = zero cone).
    pub rays: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct Wall {
    /// Sorted ray indices of the codimension-one cone.
    pub rays: Vec<usize>,
    /// Indices of maximal cones having this face as a facet.
    pub sides: Vec<usize>,
}

impl Wall {
    pub fn is_interior(&self) -> bool {
        self.sides.len() == 2
    }
}

#[derive(Debug, Clone)]
pub struct Fan {
    lattice: Lattice,
    rays: Vec<QVec>,
    max_cones: Vec<Vec<usize>>,
    cones: Vec<Cone>,
    faces: Vec<FaceKey>,
    walls: Vec<Wall>,
}

impl Fan {
    /// Validates rays and maximal cones into a fan. The generators of every
    /// listed cone must be exactly its extreme rays, pairwise intersections
    /// must be common faces, and every ray must be used.
    pub fn validate(lattice: Lattice, rays: Vec<QVec>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if max_cones.is_empty() {
            return Err(Error::EmptyFan);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != lattice.rank() {
                return Err(Error::Malformed(format!("ray {i} has wrong length")));
            }
            if r.iter().all(|c| c.is_zero()) {
                return Err(Error::NonPrimitiveRay(i));
            }
            if !lattice.is_primitive(r) {
                return Err(Error::NonPrimitiveRay(i));
            }
        }
        for i in 0..rays.len() {
            for j in (i + 1)..rays.len() {
                if rays[i] == rays[j] {
                    return Err(Error::NotAFan(format!("duplicate rays {i} and {j}")));
                }
            }
        }
        let mut sorted_cones: Vec<Vec<usize>> = Vec::new();
        for c in &max_cones {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != c.len() {
                return Err(Error::NotAFan(format!("repeated ray index in cone {c:?}")));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::Malformed(format!("ray index {bad} out of range")));
            }
            sorted_cones.push(s);
        }
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut cones: Vec<Cone> = Vec::new();
        for idx in &sorted_cones {
            used.extend(idx.iter());
            let gens: Vec<QVec> = idx.iter().map(|&i| rays[i].clone()).collect();
            let cone = if gens.is_empty() {
                Cone::zero(&lattice)
            } else {
                Cone::from_gens(&lattice, &gens).map_err(|e| match e {
                    Error::NotStronglyConvex(_) => {
                        Error::NotAFan(format!("cone {idx:?} is not strongly convex"))
                    }
                    other => other,
                })?
            };
            if cone.gens().len() != idx.len() {
                return Err(Error::NotAFan(format!(
                    "cone {idx:?} has a generator that is not an extreme ray"
                )));
            }
            cones.push(cone);
        }
        if !rays.is_empty() && used.len() != rays.len() {
            let unused: Vec<usize> = (0..rays.len()).filter(|i| !used.contains(i)).collect();
            return Err(Error::NotAFan(format!("rays {unused:?} lie in no cone")));
        }

        // face closure per maximal cone, with faces identified by ray indices
        let ray_index = |v: &QVec| -> Option<usize> { rays.iter().position(|r| r == v) };
        let mut face_sets: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        let mut all_faces: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for cone in &cones {
            let mut set = BTreeSet::new();
            for f in cone.faces() {
                let mut idx: Vec<usize> = Vec::with_capacity(f.gens().len());
                for g in f.gens() {
                    idx.push(ray_index(g).expect("face generators are fan rays"));
                }
                idx.sort_unstable();
                all_faces.insert(idx.clone(), f.dim());
                set.insert(idx);
            }
            face_sets.push(set);
        }

        // maximality and the fan axiom
        for i in 0..cones.len() {
            for j in (i + 1)..cones.len() {
                if cones[i].contains_cone(&cones[j]) || cones[j].contains_cone(&cones[i]) {
                    return Err(Error::NotAFan(format!(
                        "cone {:?} is contained in cone {:?}",
                        sorted_cones[j], sorted_cones[i]
                    )));
                }
                let inter = cones[i].intersection(&cones[j]).map_err(|_| {
                    Error::NotAFan(format!(
                        "cones {:?} and {:?} intersect badly",
                        sorted_cones[i], sorted_cones[j]
                    ))
                })?;
                let mut idx: Vec<usize> = Vec::new();
                let mut ok = true;
                for g in inter.gens() {
                    match ray_index(g) {
                        Some(k) => idx.push(k),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                idx.sort_unstable();
                if !ok || !face_sets[i].contains(&idx) || !face_sets[j].contains(&idx) {
                    return Err(Error::NotAFan(format!(
                        "intersection of {:?} and {:?} is not a common face",
                        sorted_cones[i], sorted_cones[j]
                    )));
                }
            }
        }

        let faces: Vec<FaceKey> = all_faces
            .into_iter()
            .map(|(rays, dim)| FaceKey { rays, dim })
            .collect();

        // walls: facets of maximal cones with incidence counts
        let mut wall_map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in cones.iter().enumerate() {
            for f in cone.facet_cones() {
                let mut idx: Vec<usize> = f
                    .gens()
                    .iter()
                    .map(|g| ray_index(g).expect("facet generators are fan rays"))
                    .collect();
                idx.sort_unstable();
                wall_map.entry(idx).or_default().push(ci);
            }
        }
        let walls = wall_map
            .into_iter()
            .map(|(rays, sides)| Wall { rays, sides })
            .collect();

        Ok(Fan {
            lattice,
            rays,
            max_cones: sorted_cones,
            cones,
            faces,
            walls,
        })
    }

    /// The fan of a point: the zero cone in a rank-zero lattice.
    pub fn point() -> Fan {
        Fan::validate(Lattice::standard(0), Vec::new(), vec![Vec::new()])
            .expect("point fan is valid")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn ray_index(&self, v: &QVec) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, i: usize) -> &Cone {
        &self.cones[i]
    }

    pub fn faces(&self) -> &[FaceKey] {
        &self.faces
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn interior_walls(&self) -> impl Iterator<Item = &Wall> {
        self.walls.iter().filter(|w| w.is_interior())
    }

    pub fn face_cone(&self, key: &[usize]) -> Cone {
        if key.is_empty() {
            return Cone::zero(&self.lattice);
        }
        let gens: Vec<QVec> = key.iter().map(|&i| self.rays[i].clone()).collect();
        Cone::from_gens(&self.lattice, &gens).expect("face of a validated fan")
    }

    pub fn support_contains(&self, x: &[Rat]) -> bool {
        self.cones.iter().any(|c| c.contains(x))
    }

    /// Smallest face whose relative interior contains x, as a face key.
    pub fn minimal_face_containing(&self, x: &[Rat]) -> Option<FaceKey> {
        let mut best: Option<FaceKey> = None;
        for f in &self.faces {
            let cone = self.face_cone(&f.rays);
            if cone.contains(x) {
                if best.as_ref().map(|b| f.dim < b.dim).unwrap_or(true) {
                    best = Some(f.clone());
                }
            }
        }
        best
    }

    pub fn is_complete(&self) -> bool {
        let n = self.rank();
        self.cones.iter().all(|c| c.dim() == n)
            && self.walls.iter().all(|w| w.sides.len() == 2)
    }

    /// Simpliciality of every maximal cone; the fan-level Q-factoriality test.
    pub fn is_simplicial(&self) -> bool {
        self.cones
            .iter()
            .zip(&self.max_cones)
            .all(|(c, idx)| idx.len() == c.dim())
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| c.is_smooth_cone())
    }

    /// Structural equality up to ray reordering (same lattice, same ray set,
    /// same maximal cones).
    pub fn same_fan(&self, other: &Fan) -> bool {
        if self.lattice != other.lattice || self.rays.len() != other.rays.len() {
            return false;
        }
        let mut perm: Vec<usize> = Vec::with_capacity(self.rays.len());
        for r in &self.rays {
            match other.ray_index(r) {
                Some(j) => perm.push(j),
                None => return false,
            }
        }
        if self.max_cones.len() != other.max_cones.len() {
            return false;
        }
        self.max_cones.iter().all(|c| {
            let mut mapped: Vec<usize> = c.iter().map(|&i| perm[i]).collect();
            mapped.sort_unstable();
            other.max_cones.contains(&mapped)
        })
    }

    /// Does every cone of `self` appear verbatim in `other`'s face closure?
    pub fn is_subfan_of(&self, other: &Fan) -> bool {
        if self.lattice != other.lattice {
            return false;
        }
        self.max_cones.iter().all(|c| {
            let gens: Vec<QVec> = c.iter().map(|&i| self.rays[i].clone()).collect();
            other.faces.iter().any(|f| {
                f.rays.len() == gens.len()
                    && same_gen_set(
                        &f.rays
                            .iter()
                            .map(|&i| other.rays[i].clone())
                            .collect::<Vec<_>>(),
                        &gens,
                    )
            })
        })
    }
}

/// Searches for a lattice isomorphism carrying the rays and maximal cones of
/// `f` onto those of `g`; returns the matrix in standard coordinates.
pub fn fan_iso(f: &Fan, g: &Fan) -> Option<QMat> {
    if f.rank() != g.rank()
        || f.rays().len() != g.rays().len()
        || f.max_cones().len() != g.max_cones().len()
    {
        return None;
    }
    let n = f.rank();
    let mut f_sizes: Vec<usize> = f.max_cones().iter().map(|c| c.len()).collect();
    let mut g_sizes: Vec<usize> = g.max_cones().iter().map(|c| c.len()).collect();
    f_sizes.sort_unstable();
    g_sizes.sort_unstable();
    if f_sizes != g_sizes {
        return None;
    }
    if n == 0 {
        return Some(QMat::identity(0));
    }

    // spanning subset of f-rays (rebased coordinates)
    let f_reb: Vec<QVec> = f.rays().iter().map(|r| f.lattice().rebase_q(r)).collect();
    let g_reb: Vec<QVec> = g.rays().iter().map(|r| g.lattice().rebase_q(r)).collect();
    let mut span_idx: Vec<usize> = Vec::new();
    let mut rows: Vec<QVec> = Vec::new();
    for (i, r) in f_reb.iter().enumerate() {
        rows.push(r.clone());
        if QMat::from_rows(&rows).rank() == rows.len() {
            span_idx.push(i);
        } else {
            rows.pop();
        }
        if span_idx.len() == n {
            break;
        }
    }
    if span_idx.len() < n {
        return None; // degenerate ray span; not needed for fans with full support
    }
    let rf = QMat::from_cols(&span_idx.iter().map(|&i| f_reb[i].clone()).collect::<Vec<_>>());
    let rf_inv = rf.inverse()?;

    let k = f.rays().len();
    let mut assignment = vec![usize::MAX; n];
    let mut stack = vec![0usize];
    'search: while let Some(_) = stack.last() {
        let depth = stack.len() - 1;
        let candidate = stack[depth];
        if candidate >= k {
            stack.pop();
            if let Some(last) = stack.last_mut() {
                *last += 1;
            }
            continue;
        }
        if stack[..depth].contains(&candidate) {
            stack[depth] += 1;
            continue;
        }
        assignment[depth] = candidate;
        if depth + 1 < n {
            stack.push(0);
            continue;
        }
        // full assignment of spanning rays: solve for the matrix
        let sg = QMat::from_cols(
            &assignment
                .iter()
                .map(|&j| g_reb[j].clone())
                .collect::<Vec<_>>(),
        );
        let a = sg.mul(&rf_inv);
        // must be a lattice isomorphism: integer entries, unit determinant
        let integral = (0..n).all(|i| (0..n).all(|j| a[(i, j)].denom().is_one()));
        if integral && a.det().abs() == Rat::one() {
            // induced ray bijection
            let mut perm: Vec<usize> = Vec::with_capacity(k);
            let mut ok = true;
            for r in &f_reb {
                let img = a.mul_vec(r);
                match g_reb.iter().position(|s| *s == img) {
                    Some(j) if !perm.contains(&j) => perm.push(j),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let cones_match = f.max_cones().iter().all(|c| {
                    let mut mapped: Vec<usize> = c.iter().map(|&i| perm[i]).collect();
                    mapped.sort_unstable();
                    g.max_cones().contains(&mapped)
                });
                if cones_match {
                    // back to standard coordinates
                    let std = QMat::from_cols(&g.lattice().basis_columns())
                        .mul(&a)
                        .mul(
                            &QMat::from_cols(&f.lattice().basis_columns())
                                .inverse()
                                .expect("lattice basis invertible"),
                        );
                    return Some(std);
                }
            }
        }
        stack[depth] += 1;
        while let Some(&top) = stack.last() {
            if top >= k {
                stack.pop();
                if let Some(last) = stack.last_mut() {
                    *last += 1;
                } else {
                    break 'search;
                }
            } else {
                break;
            }
        }
    }
    None
}

/// Shared handle used by divisors and morphisms.
pub type FanRef = Arc<Fan>;

/// Transports a fan along an injective lattice map: rays are mapped and
/// re-primitivized, the cone structure is kept.
pub fn map_fan(fan: &Fan, a: &crate::mat::QMat, target: &Lattice) -> crate::error::Result<Fan> {
    let rays: Vec<QVec> = fan
        .rays()
        .iter()
        .map(|v| target.primitivize(&a.mul_vec(v)))
        .collect::<crate::error::Result<_>>()?;
    Fan::validate(target.clone(), rays, fan.max_cones().to_vec())
}

/// Stellar subdivision at a primitive lattice point: every cone whose
/// relative interior or boundary contains the point is replaced by joins of
/// the point with its faces not containing it.
pub fn stellar_subdivide(fan: &Fan, point: &QVec) -> crate::error::Result<Fan> {
    let lattice = fan.lattice().clone();
    let p = lattice.primitivize(point)?;
    let mut rays: Vec<QVec> = fan.rays().to_vec();
    let p_idx = match rays.iter().position(|r| r == &p) {
        Some(i) => i,
        None => {
            rays.push(p.clone());
            rays.len() - 1
        }
    };
    let mut max_cones: Vec<Vec<usize>> = Vec::new();
    for (ci, cone_rays) in fan.max_cones().iter().enumerate() {
        let cone = fan.cone(ci);
        if !cone.contains(&p) {
            max_cones.push(cone_rays.clone());
            continue;
        }
        // joins of p with the facets not containing p
        for facet in cone.facet_cones() {
            if facet.contains(&p) {
                continue;
            }
            let mut idx: Vec<usize> = facet
                .gens()
                .iter()
                .map(|g| rays.iter().position(|r| r == g).expect("facet ray"))
                .collect();
            idx.push(p_idx);
            idx.sort_unstable();
            if !max_cones.contains(&idx) {
                max_cones.push(idx);
            }
        }
    }
    // drop rays that no longer appear (the subdivided fan keeps them all in
    // practice, but a point equal to an existing ray changes nothing)
    let mut used: Vec<bool> = vec![false; rays.len()];
    for c in &max_cones {
        for &i in c {
            used[i] = true;
        }
    }
    let remap: Vec<Option<usize>> = {
        let mut out = Vec::new();
        let mut next = 0usize;
        for u in &used {
            if *u {
                out.push(Some(next));
                next += 1;
            } else {
                out.push(None);
            }
        }
        out
    };
    let new_rays: Vec<QVec> = rays
        .iter()
        .zip(&used)
        .filter(|(_, u)| **u)
        .map(|(r, _)| r.clone())
        .collect();
    let new_cones: Vec<Vec<usize>> = max_cones
        .iter()
        .map(|c| c.iter().map(|&i| remap[i].expect("used ray")).collect())
        .collect();
    Fan::validate(lattice, new_rays, new_cones)
}

/// The complete fan of projective space of the given dimension: rays are the
/// standard basis vectors and their negated sum.
pub fn projective_space(n: usize) -> Fan {
    let lattice = Lattice::standard(n);
    let mut rays: Vec<QVec> = Vec::new();
    for i in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[i] = Rat::one();
        rays.push(e);
    }
    rays.push(vec![-Rat::one(); n]);
    let max_cones: Vec<Vec<usize>> = (0..=n)
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    Fan::validate(lattice, rays, max_cones).expect("projective space fan")
}

/// The fan of the weighted projective plane P(1,1,2).
pub fn p112() -> Fan {
    let lattice = Lattice::standard(2);
    let rays = vec![
        vec![Rat::one(), Rat::zero()],
        vec![Rat::zero(), Rat::one()],
        vec![-Rat::one(), Rat::from_integer((-2).into())],
    ];
    Fan::validate(lattice, rays, vec![vec![0, 1], vec![1, 2], vec![0, 2]])
        .expect("P(1,1,2) fan")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qvec;

    pub(crate) fn fan_from_i64(
        rank: usize,
        rays: &[&[i64]],
        cones: &[&[usize]],
    ) -> Result<Fan> {
        Fan::validate(
            Lattice::standard(rank),
            rays.iter().map(|r| qvec(r)).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    #[test]
    fn single_cone_fan_of_the_square() {
        let f = fan_from_i64(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1]],
            &[&[0, 1, 2, 3]],
        )
        .unwrap();
        assert!(!f.is_complete());
        assert!(!f.is_simplicial());
        assert!(!f.is_smooth());
        assert_eq!(f.walls().len(), 4);
        assert!(f.walls().iter().all(|w| w.sides.len() == 1));
    }

    #[test]
    fn flip_source_fan_is_valid() {
        let f = fan_from_i64(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, -1],
                &[3, 1, -2],
                &[-1, 1, 2],
            ],
            &[&[0, 2, 4, 5], &[1, 3, 4, 5]],
        )
        .unwrap();
        assert!(!f.is_simplicial());
        let interior: Vec<&Wall> = f.interior_walls().collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].rays, vec![4, 5]);
    }

    #[test]
    fn overlapping_cones_are_rejected() {
        let r = fan_from_i64(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]],
            &[&[0, 1, 2], &[0, 1, 3]],
        );
        assert!(matches!(r, Err(Error::NotAFan(_))));
    }

    #[test]
    fn redundant_generator_is_rejected() {
        // (1,1) is inside the first quadrant
        let r = fan_from_i64(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1, 2]]);
        assert!(matches!(r, Err(Error::NotAFan(_))));
    }

    #[test]
    fn non_primitive_ray_is_rejected() {
        let r = fan_from_i64(2, &[&[2, 0], &[0, 1]], &[&[0, 1]]);
        assert!(matches!(r, Err(Error::NonPrimitiveRay(0))));
    }

    #[test]
    fn p1_fan_is_complete_with_origin_wall() {
        let f = fan_from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).unwrap();
        assert!(f.is_complete());
        assert!(f.is_simplicial());
        assert!(f.is_smooth());
        assert_eq!(f.walls().len(), 1);
        assert!(f.walls()[0].rays.is_empty());
        assert_eq!(f.walls()[0].sides.len(), 2);
    }

    #[test]
    fn p112_props() {
        let f = p112();
        assert!(f.is_complete());
        assert!(f.is_simplicial());
        assert!(!f.is_smooth());
    }

    #[test]
    fn projective_space_fans() {
        let p2 = projective_space(2);
        assert!(p2.is_complete());
        assert!(p2.is_smooth());
        let p3 = projective_space(3);
        assert!(p3.is_complete());
        assert!(p3.is_smooth());
    }

    #[test]
    fn fan_iso_p2_permuted() {
        let p2 = projective_space(2);
        let permuted = fan_from_i64(2, &[&[-1, -1], &[1, 0], &[0, 1]], &[&[0, 1], &[1, 2], &[0, 2]])
            .unwrap();
        let a = fan_iso(&p2, &permuted).unwrap();
        assert_eq!(a.det().abs(), Rat::one());
        assert!(fan_iso(&permuted, &p2).is_some());
    }

    #[test]
    fn fan_iso_rejects_different_spaces() {
        assert!(fan_iso(&projective_space(2), &p112()).is_none());
    }

    #[test]
    fn point_fan() {
        let p = Fan::point();
        assert!(p.is_complete());
        assert_eq!(p.rank(), 0);
    }
}
