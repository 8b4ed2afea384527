//! Intersection numbers of Q-Cartier divisors with invariant wall curves,
//! relative curve classes, extremal rays and their contractions.
//!
//! The number D.V(tau) for an interior wall tau with sides sigma, sigma' is
//! the bending of the support function across the wall, normalized so that
//! a degree-one divisor on the projective line pairs to +1 with the origin
//! wall: with zeta the quotient coordinate positive on the sigma' side and
//! equal to 1 on the primitive generator, D.V(tau) =
//! <u_sigma - u_sigma', y> / zeta(y) for any lattice point y of sigma'
//! off the wall.

use crate::arith::{dot, normalize_direction, qvec_from_int, QVec, Rat};
use crate::cone::{region_covered_by, Cone, HRegion};
use crate::divisor::{
    basis_of_span, principal_space, qcartier_space, CartierData, Divisor,
};
use crate::error::{Error, Result};
use crate::fan::{Fan, FanRef, Wall};
use crate::lattice::Lattice;
use crate::mat::QMat;
use crate::morphism::Morphism;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// D.V(tau) for an interior wall of D's fan.
pub fn intersect(d: &Divisor, wall: &Wall) -> Result<Rat> {
    let cartier = d.cartier_data().ok_or(Error::NotQCartier)?;
    intersect_with_data(d, &cartier, wall)
}

pub fn intersect_with_data(d: &Divisor, cartier: &CartierData, wall: &Wall) -> Result<Rat> {
    if wall.sides.len() != 2 {
        return Err(Error::BoundaryWall);
    }
    let fan = &d.fan;
    let (si, sj) = (wall.sides[0], wall.sides[1]);
    let lattice = fan.lattice();
    let tau_gens: Vec<QVec> = wall.rays.iter().map(|&i| fan.rays()[i].clone()).collect();
    let sub = lattice.saturate_span(&tau_gens);
    let proj = lattice.sublattice_quotient_map(&lattice.basis_columns(), &sub);

    // the two sides must map to opposite rays in the quotient
    let side_dir = |cone_idx: usize| -> QVec {
        let extra = fan.max_cones()[cone_idx]
            .iter()
            .find(|i| !wall.rays.contains(i))
            .expect("side has a ray off the wall");
        proj.mul_vec(&fan.rays()[*extra])
    };
    let dir_i = side_dir(si);
    let dir_j = side_dir(sj);
    let prim_j = qvec_from_int(&normalize_direction(&dir_j).ok_or(Error::BoundaryWall)?);
    let prim_i = qvec_from_int(&normalize_direction(&dir_i).ok_or(Error::BoundaryWall)?);
    if crate::arith::add(&prim_i, &prim_j).iter().any(|c| !c.is_zero()) {
        return Err(Error::BoundaryWall); // wall curve is not complete
    }

    // zeta: coefficient along prim_j, so zeta = 1 on the primitive generator
    // of the sigma'-side image
    let norm: Rat = prim_j.iter().map(|c| c * c).sum();
    let zeta = |x: &QVec| -> Rat { dot(&proj.mul_vec(x), &prim_j) / &norm };

    let y_idx = fan.max_cones()[sj]
        .iter()
        .find(|i| !wall.rays.contains(i))
        .copied()
        .expect("side has a ray off the wall");
    let y = &fan.rays()[y_idx];
    let diff = crate::arith::sub(&cartier.covectors[si], &cartier.covectors[sj]);
    Ok(dot(&diff, y) / zeta(y))
}

/// Interior walls whose curve is contracted by the morphism: both sides map
/// into a single target cone.
pub fn contracted_walls(phi: &Morphism) -> Vec<Wall> {
    let x = phi.source();
    x.interior_walls()
        .filter(|w| {
            let (si, sj) = (w.sides[0], w.sides[1]);
            (0..phi.target().max_cones().len())
                .any(|ti| phi.maps_into_target_cone(si, ti) && phi.maps_into_target_cone(sj, ti))
        })
        .cloned()
        .collect()
}

/// Contracted wall curves with their classes in the relative divisor-class
/// pairing.
#[derive(Debug, Clone)]
pub struct CurveData {
    /// Representative Q-Cartier divisors spanning the relative class space.
    pub divisor_basis: Vec<Divisor>,
    pub walls: Vec<Wall>,
    /// One class vector (length rho) per wall.
    pub classes: Vec<QVec>,
}

pub fn curve_data(phi: &Morphism) -> Result<CurveData> {
    if !phi.is_proper() {
        return Err(Error::NotProper);
    }
    let x = phi.source();
    let qc = qcartier_space(x);
    let mut denom: Vec<QVec> = principal_space(x);
    for dy in qcartier_space(phi.target()) {
        let div = Divisor::new(phi.target_ref(), dy)?;
        denom.push(phi.pullback(&div)?.coeffs);
    }
    let denom = basis_of_span(&denom);
    let mut reps: Vec<QVec> = Vec::new();
    for v in &qc {
        let mut stack = denom.clone();
        stack.extend(reps.iter().cloned());
        stack.push(v.clone());
        if QMat::from_rows(&stack).rank() == stack.len() {
            reps.push(v.clone());
        }
    }
    let fan_ref = phi.source_ref();
    let divisor_basis: Vec<Divisor> = reps
        .into_iter()
        .map(|coeffs| Divisor::new(fan_ref.clone(), coeffs))
        .collect::<Result<_>>()?;
    let walls = contracted_walls(phi);
    let mut classes = Vec::with_capacity(walls.len());
    for w in &walls {
        let mut class = Vec::with_capacity(divisor_basis.len());
        for d in &divisor_basis {
            class.push(intersect(d, w)?);
        }
        classes.push(class);
    }
    Ok(CurveData {
        divisor_basis,
        walls,
        classes,
    })
}

#[derive(Debug, Clone)]
pub struct ExtremalRay {
    /// Primitive direction of the ray in class coordinates.
    pub class: QVec,
    /// Indices into the wall list of `CurveData` whose classes lie on the ray.
    pub wall_indices: Vec<usize>,
}

/// Is `v` a nonnegative combination of `gens`?
fn in_cone_span(gens: &[QVec], v: &QVec) -> bool {
    if v.iter().all(|c| c.is_zero()) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let m = gens.len();
    let dim = v.len();
    let mut constraints: Vec<(QVec, Rat)> = Vec::new();
    for i in 0..m {
        let mut e = vec![Rat::zero(); m];
        e[i] = Rat::one();
        constraints.push((e, Rat::zero()));
    }
    for k in 0..dim {
        let row: QVec = gens.iter().map(|g| g[k].clone()).collect();
        constraints.push((row.clone(), v[k].clone()));
        constraints.push((row.iter().map(|c| -c).collect(), -v[k].clone()));
    }
    crate::lp::find_feasible(m, &constraints).is_some()
}

/// Extreme rays of the cone of contracted curve classes.
pub fn mori_extremal_rays(phi: &Morphism) -> Result<(CurveData, Vec<ExtremalRay>)> {
    let data = curve_data(phi)?;
    if data.walls.is_empty() {
        return Err(Error::NoContractedCurves);
    }
    // primitive directions of the nonzero classes
    let mut dirs: Vec<QVec> = Vec::new();
    let mut wall_dir: Vec<Option<usize>> = Vec::new();
    for class in &data.classes {
        match normalize_direction(class) {
            Some(d) => {
                let d = qvec_from_int(&d);
                let pos = dirs.iter().position(|x| x == &d).unwrap_or_else(|| {
                    dirs.push(d.clone());
                    dirs.len() - 1
                });
                wall_dir.push(Some(pos));
            }
            None => wall_dir.push(None),
        }
    }
    // pointedness of the curve cone
    for d in &dirs {
        let neg: QVec = d.iter().map(|c| -c).collect();
        if in_cone_span(&dirs, &neg) {
            return Err(Error::ConeNotPointed);
        }
    }
    let mut rays = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let others: Vec<QVec> = dirs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, x)| x.clone())
            .collect();
        if !in_cone_span(&others, d) {
            let wall_indices: Vec<usize> = wall_dir
                .iter()
                .enumerate()
                .filter(|(_, wd)| **wd == Some(i))
                .map(|(k, _)| k)
                .collect();
            rays.push(ExtremalRay {
                class: d.clone(),
                wall_indices,
            });
        }
    }
    // deterministic order: lexicographically by class vector
    rays.sort_by(|a, b| a.class.partial_cmp(&b.class).unwrap());
    Ok((data, rays))
}

/// Pairing of a divisor with an extremal ray, evaluated on a representative
/// wall.
pub fn ray_value(d: &Divisor, data: &CurveData, ray: &ExtremalRay) -> Result<Rat> {
    let w = &data.walls[ray.wall_indices[0]];
    intersect(d, w)
}

/// Contraction of an extremal ray: maximal cones are merged transitively
/// along every wall whose class lies on the ray. Returns the contraction
/// X -> W and the structure morphism W -> Y.
pub fn contract_ray(
    phi: &Morphism,
    data: &CurveData,
    ray: &ExtremalRay,
) -> Result<(Morphism, Morphism)> {
    let x = phi.source();
    let n = x.rank();
    // union-find over maximal cones
    let mut parent: Vec<usize> = (0..x.max_cones().len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for &wi in &ray.wall_indices {
        let w = &data.walls[wi];
        let (a, b) = (find(&mut parent, w.sides[0]), find(&mut parent, w.sides[1]));
        if a != b {
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..x.max_cones().len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }

    // hull of each merged group, detecting fiber type by lost strong convexity
    struct Group {
        gens: Vec<QVec>,
        lineality: Vec<QVec>,
    }
    let mut merged: Vec<Group> = Vec::new();
    for (_, members) in groups {
        let mut gens: Vec<QVec> = Vec::new();
        for &m in &members {
            for &ri in &x.max_cones()[m] {
                let g = x.rays()[ri].clone();
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
        }
        let (span_eqs, facets) = crate::cone::dual_extreme_rays(&gens, n);
        let mut stack: Vec<QVec> = facets.clone();
        stack.extend(span_eqs.iter().cloned());
        let lineality = if stack.is_empty() {
            (0..n)
                .map(|i| {
                    let mut e = vec![Rat::zero(); n];
                    e[i] = Rat::one();
                    e
                })
                .collect()
        } else {
            QMat::from_rows(&stack).kernel_basis()
        };
        // convexity of the union: the hull must be covered by the members
        if members.len() > 1 {
            let pieces: Vec<&Cone> = members.iter().map(|&m| x.cone(m)).collect();
            let region = HRegion::new(n, facets.clone(), span_eqs.clone());
            if !region_covered_by(&region, &pieces) {
                let idx: Vec<usize> = members
                    .iter()
                    .flat_map(|&m| x.max_cones()[m].iter().copied())
                    .collect();
                return Err(Error::MergeNotConvex(idx));
            }
        }
        merged.push(Group { gens, lineality });
    }

    let fiber_type = merged.iter().any(|g| !g.lineality.is_empty());
    let (w_lattice, proj) = if fiber_type {
        let mut span_vectors: Vec<QVec> = Vec::new();
        for g in &merged {
            span_vectors.extend(g.lineality.iter().cloned());
        }
        let sub = x.lattice().saturate_span(&span_vectors);
        // contracted directions must map to points downstairs
        for v in &sub {
            if phi.apply(v).iter().any(|c| !c.is_zero()) {
                return Err(Error::NotAFanAfterMerge(
                    "collapsed directions are not contracted by the base morphism".into(),
                ));
            }
        }
        let proj = x
            .lattice()
            .sublattice_quotient_map(&x.lattice().basis_columns(), &sub);
        (Lattice::standard(n - sub.len()), proj)
    } else {
        (x.lattice().clone(), QMat::identity(n))
    };

    // image fan
    let mut rays: Vec<QVec> = Vec::new();
    let mut max_cones: Vec<Vec<usize>> = Vec::new();
    for g in &merged {
        let images: Vec<QVec> = g
            .gens
            .iter()
            .map(|v| proj.mul_vec(v))
            .filter(|v| !crate::arith::is_zero_vec(v))
            .collect();
        let cone = if images.is_empty() {
            Cone::zero(&w_lattice)
        } else {
            Cone::from_gens(&w_lattice, &images)
                .map_err(|e| Error::NotAFanAfterMerge(e.to_string()))?
        };
        let mut idx: Vec<usize> = Vec::new();
        for gen in cone.gens() {
            let pos = match rays.iter().position(|r| r == gen) {
                Some(p) => p,
                None => {
                    rays.push(gen.clone());
                    rays.len() - 1
                }
            };
            idx.push(pos);
        }
        idx.sort_unstable();
        if !max_cones.contains(&idx) {
            max_cones.push(idx);
        }
    }
    let w_fan = Arc::new(
        Fan::validate(w_lattice, rays, max_cones)
            .map_err(|e| Error::NotAFanAfterMerge(e.to_string()))?,
    );

    let phi_r = Morphism::check(phi.source_ref(), w_fan.clone(), proj.clone())?;
    // structure map W -> Y: solve B * proj = A
    let b = if fiber_type {
        let pt = proj.transpose();
        let gram = proj.mul(&pt);
        let gram_inv = gram.inverse().expect("projection has full row rank");
        phi.matrix().mul(&pt).mul(&gram_inv)
    } else {
        phi.matrix().clone()
    };
    debug_assert_eq!(b.mul(&proj), *phi.matrix());
    let psi = Morphism::check(w_fan, phi.target_ref(), b)?;
    Ok((phi_r, psi))
}
