//! Rational polyhedral cones with both generator and facet descriptions.
//!
//! Cones are built from generators; the facet inequalities come from an
//! incremental double description run on the dual side, so V- and
//! H-descriptions are always available together and consistency between the
//! two is a cheap assertion rather than an act of faith.

use crate::arith::{
    dot, is_zero_vec, normalize_direction, qvec_from_int, same_ray, QVec, Rat,
};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::mat::{snf, IMat, QMat};
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

/// Extreme rays of {x : <a, x> >= 0 for all a in ineqs}, together with a
/// basis of the lineality space. Rays are primitive integer directions and
/// are taken modulo lineality.
pub fn dual_extreme_rays(ineqs: &[QVec], dim: usize) -> (Vec<QVec>, Vec<QVec>) {
    let nontrivial: Vec<QVec> = ineqs.iter().filter(|a| !is_zero_vec(a)).cloned().collect();
    if nontrivial.is_empty() {
        let lin = (0..dim)
            .map(|i| {
                let mut e = vec![Rat::zero(); dim];
                e[i] = Rat::from_integer(1.into());
                e
            })
            .collect();
        return (lin, Vec::new());
    }
    let m = QMat::from_rows(&nontrivial);
    let lineality = m.kernel_basis();
    let r = m.rank();

    // coordinates on a complement of the lineality: basis of the row space
    let (echelon, pivots) = {
        // row-space basis: nonzero rows of the reduced matrix
        let mut rows: Vec<QVec> = Vec::new();
        let mt = m.clone();
        let mut work = mt;
        let mut piv = Vec::new();
        let mut rr = 0usize;
        for j in 0..work.cols {
            if rr >= work.rows {
                break;
            }
            let Some(p) = (rr..work.rows).find(|&i| !work[(i, j)].is_zero()) else {
                continue;
            };
            for k in 0..work.cols {
                let (x, y) = (work[(rr, k)].clone(), work[(p, k)].clone());
                work[(rr, k)] = y;
                work[(p, k)] = x;
            }
            let inv = work[(rr, j)].recip();
            for k in 0..work.cols {
                let x = &work[(rr, k)] * &inv;
                work[(rr, k)] = x;
            }
            for i in 0..work.rows {
                if i != rr && !work[(i, j)].is_zero() {
                    let f = work[(i, j)].clone();
                    for k in 0..work.cols {
                        let sub = &f * &work[(rr, k)];
                        work[(i, k)] -= sub;
                    }
                }
            }
            piv.push(j);
            rr += 1;
        }
        for i in 0..rr {
            rows.push(work.row(i).to_vec());
        }
        (rows, piv)
    };
    let _ = pivots;
    let w = QMat::from_rows(&echelon); // r x dim, rows span the row space
    debug_assert_eq!(w.rows, r);

    // inequalities in W-coordinates: y maps to x = W^T y
    let wt = w.transpose();
    let b_rows: Vec<QVec> = nontrivial
        .iter()
        .map(|a| {
            (0..r)
                .map(|j| dot(a, &wt.col(j).to_vec()))
                .collect::<QVec>()
        })
        .collect();

    let rays_y = pointed_extreme_rays(&b_rows, r);

    let rays = rays_y
        .iter()
        .map(|y| {
            let x: QVec = (0..dim)
                .map(|i| {
                    y.iter()
                        .enumerate()
                        .map(|(j, c)| c * &w[(j, i)])
                        .sum::<Rat>()
                })
                .collect();
            qvec_from_int(&normalize_direction(&x).expect("extreme ray is nonzero"))
        })
        .collect();
    (lineality, rays)
}

/// Incremental double description for a pointed cone {y : <b_i, y> >= 0}
/// of full rank inside Q^r.
fn pointed_extreme_rays(ineqs: &[QVec], r: usize) -> Vec<QVec> {
    if r == 0 {
        return Vec::new();
    }
    // initial simplex from r independent inequalities
    let mut chosen: Vec<usize> = Vec::new();
    let mut mat_rows: Vec<QVec> = Vec::new();
    for (i, row) in ineqs.iter().enumerate() {
        mat_rows.push(row.clone());
        if QMat::from_rows(&mat_rows).rank() == mat_rows.len() {
            chosen.push(i);
        } else {
            mat_rows.pop();
        }
        if chosen.len() == r {
            break;
        }
    }
    assert_eq!(chosen.len(), r, "inequality system must have full rank");
    let b0 = QMat::from_rows(&mat_rows);
    let b0_inv = b0.inverse().expect("chosen rows are independent");

    // ray k = column k of B0^-1: <b_i, ray_k> = delta_ik
    struct Ray {
        dir: QVec,
        zero: BTreeSet<usize>, // inserted inequality indices tight at this ray
    }
    let mut inserted: Vec<usize> = chosen.clone();
    let mut rays: Vec<Ray> = (0..r)
        .map(|k| {
            let dir = qvec_from_int(
                &normalize_direction(&b0_inv.col(k)).expect("simplex ray is nonzero"),
            );
            let zero = chosen
                .iter()
                .copied()
                .filter(|&i| dot(&ineqs[i], &dir).is_zero())
                .collect();
            Ray { dir, zero }
        })
        .collect();

    for (h_idx, h) in ineqs.iter().enumerate() {
        if chosen.contains(&h_idx) {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|ray| dot(h, &ray.dir)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for ray in rays.iter_mut().enumerate() {
                if vals[ray.0].is_zero() {
                    ray.1.zero.insert(h_idx);
                }
            }
            inserted.push(h_idx);
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for (i, ray) in rays.iter().enumerate() {
            if !vals[i].is_negative() {
                let mut zero = ray.zero.clone();
                if vals[i].is_zero() {
                    zero.insert(h_idx);
                }
                next.push(Ray {
                    dir: ray.dir.clone(),
                    zero,
                });
            }
        }
        for &p in &pos {
            for &n in &neg {
                // combinatorial adjacency: no third ray's zero set contains
                // the common zero set of p and n
                let common: BTreeSet<usize> =
                    rays[p].zero.intersection(&rays[n].zero).copied().collect();
                let adjacent = rays.iter().enumerate().all(|(k, other)| {
                    k == p || k == n || !common.is_subset(&other.zero)
                });
                if !adjacent {
                    continue;
                }
                let dir: QVec = rays[p]
                    .dir
                    .iter()
                    .zip(&rays[n].dir)
                    .map(|(dp, dn)| &vals[p] * dn - &vals[n] * dp)
                    .collect();
                let dir = qvec_from_int(
                    &normalize_direction(&dir).expect("combined ray is nonzero"),
                );
                if next.iter().any(|ray| ray.dir == dir) {
                    continue;
                }
                let mut zero: BTreeSet<usize> = common;
                zero.insert(h_idx);
                // recompute tightness against all inserted inequalities
                for &i in &inserted {
                    if dot(&ineqs[i], &dir).is_zero() {
                        zero.insert(i);
                    }
                }
                next.push(Ray { dir, zero });
            }
        }
        inserted.push(h_idx);
        rays = next;
    }
    rays.into_iter().map(|ray| ray.dir).collect()
}

#[derive(Debug, Clone)]
pub struct Cone {
    lattice: Lattice,
    /// Primitive extreme ray generators in standard coordinates.
    gens: Vec<QVec>,
    /// Facet normals: <a, x> >= 0 on the cone, tight exactly on a facet.
    facets: Vec<QVec>,
    /// Covectors cutting out the linear span.
    span_eqs: Vec<QVec>,
    dim: usize,
}

impl Cone {
    /// Builds the cone generated by `gens`, primitivizing and reducing to
    /// extreme rays. Rejects cones that are not strongly convex.
    pub fn from_gens(lattice: &Lattice, gens: &[QVec]) -> Result<Cone> {
        let mut prim: Vec<QVec> = Vec::new();
        for g in gens {
            let p = lattice.primitivize(g)?;
            if !prim.contains(&p) {
                prim.push(p);
            }
        }
        Cone::from_primitive_gens(lattice, prim)
    }

    pub fn zero(lattice: &Lattice) -> Cone {
        let n = lattice.rank();
        let span_eqs = (0..n)
            .map(|i| {
                let mut e = vec![Rat::zero(); n];
                e[i] = Rat::from_integer(1.into());
                e
            })
            .collect();
        Cone {
            lattice: lattice.clone(),
            gens: Vec::new(),
            facets: Vec::new(),
            span_eqs,
            dim: 0,
        }
    }

    fn from_primitive_gens(lattice: &Lattice, prim: Vec<QVec>) -> Result<Cone> {
        if prim.is_empty() {
            return Ok(Cone::zero(lattice));
        }
        let n = lattice.rank();
        // H-description: facet normals are the extreme rays of the dual cone,
        // span equations its lineality.
        let (span_eqs, facets) = dual_extreme_rays(&prim, n);
        // strong convexity: no lineality in the cone itself
        if QMat::stack_rank(&facets, &span_eqs) < n {
            let idx = (0..prim.len()).collect();
            return Err(Error::NotStronglyConvex(idx));
        }
        let dim = n - span_eqs.len();
        // extreme rays among the generators: tight facets of rank dim-1
        let mut extreme: Vec<QVec> = Vec::new();
        for g in &prim {
            let tight: Vec<QVec> = facets
                .iter()
                .filter(|a| dot(a, g).is_zero())
                .cloned()
                .collect();
            if QMat::stack_rank(&tight, &span_eqs) == n - 1 {
                extreme.push(g.clone());
            }
        }
        Ok(Cone {
            lattice: lattice.clone(),
            gens: extreme,
            facets,
            span_eqs,
            dim,
        })
    }

    /// Cone cut out by inequalities and equations; must be strongly convex.
    pub fn from_h(lattice: &Lattice, ineqs: &[QVec], eqs: &[QVec]) -> Result<Cone> {
        let mut system: Vec<QVec> = ineqs.to_vec();
        for e in eqs {
            system.push(e.clone());
            system.push(e.iter().map(|c| -c).collect());
        }
        let (lineality, rays) = dual_extreme_rays(&system, lattice.rank());
        if !lineality.is_empty() {
            return Err(Error::NotStronglyConvex(Vec::new()));
        }
        let prim: Vec<QVec> = rays
            .iter()
            .map(|r| lattice.primitivize(r))
            .collect::<Result<_>>()?;
        Cone::from_primitive_gens(lattice, prim)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn gens(&self) -> &[QVec] {
        &self.gens
    }

    pub fn facets(&self) -> &[QVec] {
        &self.facets
    }

    pub fn span_eqs(&self) -> &[QVec] {
        &self.span_eqs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.span_eqs.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|a| !dot(a, x).is_negative())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.is_zero() || other.gens.iter().all(|g| self.contains(g))
    }

    pub fn relint_contains(&self, x: &[Rat]) -> bool {
        if self.is_zero() {
            return is_zero_vec(x);
        }
        self.span_eqs.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|a| dot(a, x).is_positive())
    }

    /// A point in the relative interior (sum of the extreme rays).
    pub fn relint_point(&self) -> QVec {
        let n = self.lattice.rank();
        let mut p = vec![Rat::zero(); n];
        for g in &self.gens {
            for i in 0..n {
                p[i] += &g[i];
            }
        }
        p
    }

    /// Set equality as cones.
    pub fn same_cone(&self, other: &Cone) -> bool {
        self.dim == other.dim
            && self.gens.len() == other.gens.len()
            && self.gens.iter().all(|g| other.gens.contains(g))
    }

    pub fn intersection(&self, other: &Cone) -> Result<Cone> {
        let ineqs: Vec<QVec> = self
            .facets
            .iter()
            .chain(other.facets.iter())
            .cloned()
            .collect();
        let eqs: Vec<QVec> = self
            .span_eqs
            .iter()
            .chain(other.span_eqs.iter())
            .cloned()
            .collect();
        Cone::from_h(&self.lattice, &ineqs, &eqs)
    }

    /// All faces, including {0} and the cone itself.
    pub fn faces(&self) -> Vec<Cone> {
        let mut out: Vec<Cone> = Vec::new();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: Vec<Vec<usize>> = vec![(0..self.gens.len()).collect()];
        while let Some(subset) = queue.pop() {
            if !seen.insert(subset.clone()) {
                continue;
            }
            let gens: Vec<QVec> = subset.iter().map(|&i| self.gens[i].clone()).collect();
            let face = if gens.is_empty() {
                Cone::zero(&self.lattice)
            } else {
                Cone::from_primitive_gens(&self.lattice, gens)
                    .expect("face of a strongly convex cone")
            };
            for a in &self.facets {
                let smaller: Vec<usize> = subset
                    .iter()
                    .copied()
                    .filter(|&i| dot(a, &self.gens[i]).is_zero())
                    .collect();
                if smaller.len() < subset.len() {
                    queue.push(smaller);
                }
            }
            out.push(face);
        }
        out
    }

    /// Codimension-one faces.
    pub fn facet_cones(&self) -> Vec<Cone> {
        self.faces()
            .into_iter()
            .filter(|f| f.dim + 1 == self.dim)
            .collect()
    }

    /// True when the primitive generators extend to a lattice basis.
    pub fn is_smooth_cone(&self) -> bool {
        if self.gens.len() != self.dim {
            return false;
        }
        self.multiplicity() == 1.into()
    }

    /// Index of the subgroup generated by the ray generators inside the
    /// saturated span lattice (1 for smooth simplicial cones). For
    /// non-simplicial cones this uses all extreme rays.
    pub fn multiplicity(&self) -> crate::arith::Int {
        if self.gens.is_empty() {
            return 1.into();
        }
        let rows: Vec<crate::arith::IVec> = self
            .gens
            .iter()
            .map(|g| self.lattice.rebase(g).expect("generators are lattice points"))
            .collect();
        let f = snf(&IMat::from_rows(&rows));
        f.diagonal()
            .iter()
            .filter(|d| !d.is_zero())
            .product::<crate::arith::Int>()
            .abs()
    }

    /// V -> H -> V round trip: recomputed extreme rays from the facet
    /// description, as primitive vectors.
    pub fn rays_from_facets(&self) -> Result<Vec<QVec>> {
        let c = Cone::from_h(&self.lattice, &self.facets, &self.span_eqs)?;
        Ok(c.gens)
    }
}

/// All nonzero lattice points x in `cone` with `<psi, x> <= bound`, where
/// `psi` must be strictly positive on the nonzero part of the cone.
/// Enumeration scans the integer box around the truncated cone in rebased
/// coordinates.
pub fn lattice_points_under(cone: &Cone, psi: &[Rat], bound: &Rat) -> Result<Vec<QVec>> {
    if cone.is_zero() {
        return Ok(Vec::new());
    }
    for g in cone.gens() {
        if !dot(psi, g).is_positive() {
            return Err(Error::UnboundedRegion);
        }
    }
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let lattice = cone.lattice();
    let n = lattice.rank();
    // vertices of {x in cone : psi(x) <= bound}: origin and scaled rays
    let mut vertices: Vec<QVec> = vec![vec![Rat::zero(); n]];
    for g in cone.gens() {
        let t = bound / dot(psi, g);
        vertices.push(g.iter().map(|c| c * &t).collect());
    }
    let rebased: Vec<QVec> = vertices.iter().map(|v| lattice.rebase_q(v)).collect();
    let mut lo = vec![Rat::zero(); n];
    let mut hi = vec![Rat::zero(); n];
    for j in 0..n {
        for v in &rebased {
            if v[j] < lo[j] {
                lo[j] = v[j].clone();
            }
            if v[j] > hi[j] {
                hi[j] = v[j].clone();
            }
        }
    }
    let lo: Vec<i128> = lo.iter().map(|c| c.floor().numer().try_into().unwrap()).collect();
    let hi: Vec<i128> = hi.iter().map(|c| c.ceil().numer().try_into().unwrap()).collect();
    let mut total: i128 = 1;
    for j in 0..n {
        total = total.saturating_mul(hi[j] - lo[j] + 1);
        if total > 2_000_000 {
            return Err(Error::Malformed("enumeration box too large".into()));
        }
    }
    let mut out = Vec::new();
    let mut cursor = lo.clone();
    loop {
        let y: crate::arith::IVec = cursor.iter().map(|&c| crate::arith::Int::from(c)).collect();
        let x = lattice.unrebase(&y);
        if !is_zero_vec(&x) && cone.contains(&x) && dot(psi, &x) <= *bound {
            out.push(x);
        }
        // advance odometer
        let mut j = 0;
        loop {
            if j == n {
                return Ok(out);
            }
            cursor[j] += 1;
            if cursor[j] <= hi[j] {
                break;
            }
            cursor[j] = lo[j];
            j += 1;
        }
    }
}

/// Convenience equality of generator sets up to order (primitive vectors).
pub fn same_gen_set(a: &[QVec], b: &[QVec]) -> bool {
    a.len() == b.len() && a.iter().all(|g| b.iter().any(|h| same_ray(g, h)))
}

/// A polyhedral cone in H-description, possibly with lineality: the set
/// {x : <a, x> >= 0 for a in ineqs, <e, x> = 0 for e in eqs}.
#[derive(Debug, Clone)]
pub struct HRegion {
    pub dim: usize,
    pub ineqs: Vec<QVec>,
    pub eqs: Vec<QVec>,
}

impl HRegion {
    pub fn new(dim: usize, ineqs: Vec<QVec>, eqs: Vec<QVec>) -> HRegion {
        HRegion { dim, ineqs, eqs }
    }

    fn generators(&self) -> (Vec<QVec>, Vec<QVec>) {
        let mut system = self.ineqs.clone();
        for e in &self.eqs {
            system.push(e.clone());
            system.push(e.iter().map(|c| -c).collect());
        }
        dual_extreme_rays(&system, self.dim)
    }

    fn with_ineq(&self, a: &QVec) -> HRegion {
        let mut ineqs = self.ineqs.clone();
        ineqs.push(a.clone());
        HRegion {
            dim: self.dim,
            ineqs,
            eqs: self.eqs.clone(),
        }
    }
}

/// Exact covering test: is the region contained in the union of the cones?
///
/// Recursively splits the region along facet and span hyperplanes of the
/// candidate cones until each cell either lies inside one cone or a
/// relative-interior point witnesses non-coverage.
pub fn region_covered_by(region: &HRegion, pieces: &[&Cone]) -> bool {
    let mut hyperplanes: Vec<QVec> = Vec::new();
    for p in pieces {
        for a in p.facets().iter().chain(p.span_eqs().iter()) {
            if let Some(d) = normalize_direction(a) {
                let v = qvec_from_int(&d);
                let neg: QVec = v.iter().map(|c| -c).collect();
                if !hyperplanes.contains(&v) && !hyperplanes.contains(&neg) {
                    hyperplanes.push(v);
                }
            }
        }
    }
    covered_rec(region, pieces, &hyperplanes)
}

fn covered_rec(region: &HRegion, pieces: &[&Cone], hyperplanes: &[QVec]) -> bool {
    let (lineality, rays) = region.generators();
    if rays.is_empty() && lineality.is_empty() {
        return true; // region is {0}
    }
    let inside_piece = |p: &Cone| {
        rays.iter().all(|r| p.contains(r))
            && lineality.iter().all(|l| {
                p.contains(l) && p.contains(&l.iter().map(|c| -c).collect::<QVec>())
            })
    };
    if pieces.iter().any(|p| inside_piece(p)) {
        return true;
    }
    for (hi, h) in hyperplanes.iter().enumerate() {
        let mut pos = false;
        let mut neg = false;
        for r in &rays {
            let v = dot(h, r);
            pos = pos || v.is_positive();
            neg = neg || v.is_negative();
        }
        for l in &lineality {
            if !dot(h, l).is_zero() {
                pos = true;
                neg = true;
            }
        }
        if pos && neg {
            let rest: Vec<QVec> = hyperplanes
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != hi)
                .map(|(_, a)| a.clone())
                .collect();
            let minus: QVec = h.iter().map(|c| -c).collect();
            return covered_rec(&region.with_ineq(h), pieces, &rest)
                && covered_rec(&region.with_ineq(&minus), pieces, &rest);
        }
    }
    // sign-constant cell not inside any piece: not covered
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qvec, rat, ratio};
    use num_traits::One as _;

    fn z3() -> Lattice {
        Lattice::standard(3)
    }

    /// Brute-force facet oracle: every pair/triple of generators spans a
    /// candidate hyperplane; keep normals that support the whole cone and
    /// are tight on a (dim-1)-dimensional subset.
    fn facet_oracle(gens: &[QVec]) -> Vec<QVec> {
        let n = gens[0].len();
        let mut candidates: Vec<QVec> = Vec::new();
        let idx: Vec<usize> = (0..gens.len()).collect();
        // all subsets of size n-1
        fn subsets(idx: &[usize], k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for (i, &x) in idx.iter().enumerate() {
                for mut rest in subsets(&idx[i + 1..], k - 1) {
                    rest.insert(0, x);
                    out.push(rest);
                }
            }
            out
        }
        for sub in subsets(&idx, n - 1) {
            let rows: Vec<QVec> = sub.iter().map(|&i| gens[i].clone()).collect();
            let m = QMat::from_rows(&rows);
            for k in m.kernel_basis() {
                candidates.push(k);
            }
        }
        let mut out: Vec<QVec> = Vec::new();
        for c in candidates {
            for sign in [1i64, -1] {
                let a: QVec = c.iter().map(|x| x * rat(sign)).collect();
                let vals: Vec<Rat> = gens.iter().map(|g| dot(&a, g)).collect();
                if vals.iter().any(|v| v.is_negative()) {
                    continue;
                }
                let tight: Vec<QVec> = gens
                    .iter()
                    .zip(&vals)
                    .filter(|(_, v)| v.is_zero())
                    .map(|(g, _)| g.clone())
                    .collect();
                let dim_all = QMat::from_rows(&gens.to_vec()).rank();
                if tight.is_empty() || QMat::from_rows(&tight).rank() != dim_all - 1 {
                    continue;
                }
                let a = qvec_from_int(&normalize_direction(&a).unwrap());
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    #[test]
    fn octant_facets() {
        let c = Cone::from_gens(&z3(), &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])])
            .unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.facets().len(), 3);
        let expected = facet_oracle(c.gens());
        assert!(same_gen_set(c.facets(), &expected));
    }

    #[test]
    fn cone_over_square_facets_and_faces() {
        // e4 = e1 + e2 - e3
        let gens = [
            qvec(&[1, 0, 0]),
            qvec(&[0, 1, 0]),
            qvec(&[0, 0, 1]),
            qvec(&[1, 1, -1]),
        ];
        let c = Cone::from_gens(&z3(), &gens).unwrap();
        assert_eq!(c.gens().len(), 4);
        assert_eq!(c.facets().len(), 4);
        assert!(same_gen_set(c.facets(), &facet_oracle(c.gens())));
        // 1 zero + 4 rays + 4 two-faces + the cone = 10 faces
        assert_eq!(c.faces().len(), 10);
        assert!(!c.is_smooth_cone());
        // the four rays together generate the full lattice
        assert_eq!(c.multiplicity(), 1.into());
        // singular simplicial comparison point: the index-two cone of P(1,1,2)
        let l2 = Lattice::standard(2);
        let sing = Cone::from_gens(&l2, &[qvec(&[1, 0]), qvec(&[-1, -2])]).unwrap();
        assert_eq!(sing.multiplicity(), 2.into());
        assert!(!sing.is_smooth_cone());
    }

    #[test]
    fn flip_example_cone_lies_on_its_roof() {
        // <e1, e3, f1, f2> with f1 = (3,1,-2), f2 = (-1,1,2)
        let gens = [
            qvec(&[1, 0, 0]),
            qvec(&[0, 0, 1]),
            qvec(&[3, 1, -2]),
            qvec(&[-1, 1, 2]),
        ];
        let c = Cone::from_gens(&z3(), &gens).unwrap();
        assert_eq!(c.facets().len(), 4);
        // all generators on {x + z = 1}
        for g in c.gens() {
            assert_eq!(&g[0] + &g[2], rat(1));
        }
        assert!(same_gen_set(c.facets(), &facet_oracle(c.gens())));
        // V -> H -> V round trip
        let back = c.rays_from_facets().unwrap();
        assert!(same_gen_set(&back, c.gens()));
    }

    #[test]
    fn non_strongly_convex_is_rejected() {
        let r = Cone::from_gens(&z3(), &[qvec(&[1, 0, 0]), qvec(&[-1, 0, 0])]);
        assert!(matches!(r, Err(Error::NotStronglyConvex(_))));
        let half_plane = Cone::from_gens(
            &z3(),
            &[qvec(&[1, 0, 0]), qvec(&[-1, 0, 0]), qvec(&[0, 1, 0])],
        );
        assert!(half_plane.is_err());
    }

    #[test]
    fn ray_faces() {
        let ray = Cone::from_gens(&Lattice::standard(1), &[qvec(&[1])]).unwrap();
        let faces = ray.faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().any(|f| f.is_zero()));
    }

    #[test]
    fn two_dim_cone_faces() {
        let c = Cone::from_gens(&Lattice::standard(2), &[qvec(&[1, 0]), qvec(&[0, 1])]).unwrap();
        assert_eq!(c.faces().len(), 4);
    }

    #[test]
    fn intersection_is_common_face() {
        let l = z3();
        let a = Cone::from_gens(&l, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])])
            .unwrap();
        let b = Cone::from_gens(&l, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, -1])])
            .unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.dim(), 2);
        assert!(same_gen_set(i.gens(), &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]));
    }

    #[test]
    fn shed_points_of_flip_wall_cone() {
        // cone <f1, f2>, psi with value 1 on both: psi = (0,1,0)
        let l = z3();
        let c = Cone::from_gens(&l, &[qvec(&[3, 1, -2]), qvec(&[-1, 1, 2])]).unwrap();
        let psi = qvec(&[0, 1, 0]);
        let pts = lattice_points_under(&c, &psi, &rat(1)).unwrap();
        let expect = [
            qvec(&[3, 1, -2]),
            qvec(&[-1, 1, 2]),
            qvec(&[0, 1, 1]),
            qvec(&[1, 1, 0]),
            qvec(&[2, 1, -1]),
        ];
        assert_eq!(pts.len(), expect.len());
        for e in &expect {
            assert!(pts.contains(e));
        }
    }

    #[test]
    fn quarter_point_shows_up_in_extended_lattice() {
        let l =
            Lattice::with_extra_gens(3, vec![vec![ratio(1, 4), ratio(1, 4), ratio(1, 4)]]).unwrap();
        let c = Cone::from_gens(&l, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])])
            .unwrap();
        let psi = qvec(&[1, 1, 1]);
        let pts = lattice_points_under(&c, &psi, &rat(1)).unwrap();
        let quarter = vec![ratio(1, 4), ratio(1, 4), ratio(1, 4)];
        assert!(pts.contains(&quarter));
        assert_eq!(dot(&psi, &quarter), ratio(3, 4));
        // oracle: coset scan over (1/4)Z^3 with explicit membership test
        let mut oracle = Vec::new();
        for a in 0..=4i64 {
            for b in 0..=4i64 {
                for c_ in 0..=4i64 {
                    let x = vec![ratio(a, 4), ratio(b, 4), ratio(c_, 4)];
                    let member = (0..4).any(|m| {
                        x.iter()
                            .zip([m, m, m])
                            .all(|(xi, g)| (xi - ratio(g, 4)).denom().is_one())
                    });
                    if member
                        && !is_zero_vec(&x)
                        && dot(&psi, &x) <= rat(1)
                        && x.iter().all(|v| !v.is_negative())
                    {
                        oracle.push(x);
                    }
                }
            }
        }
        assert_eq!(pts.len(), oracle.len());
        for p in &oracle {
            assert!(pts.contains(p));
        }
    }
}
