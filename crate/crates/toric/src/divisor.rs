//! Torus-invariant Weil divisors, support functions and Q-Cartier data.
//!
//! A divisor is one rational coefficient per ray of its fan. Q-Cartier
//! divisors carry one covector per maximal cone with `<u, v_i> = -d_i` on
//! the rays of that cone; the support function of D on a cone is
//! `x -> <u, x>`. The sign convention is pinned by the intersection
//! normalization (degree-one divisor on the projective line pairs to +1
//! with the fan's single wall).

use crate::arith::{dot, lcm_of_denominators, Int, QVec, Rat};
use crate::error::{Error, Result};
use crate::fan::{Fan, FanRef};
use crate::mat::{integral_scaling, IMat, QMat};
use crate::morphism::Morphism;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct Divisor {
    pub fan: FanRef,
    pub coeffs: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub struct CartierData {
    /// One covector per maximal cone, in standard dual coordinates. On
    /// cones of less than full dimension the covector is one representative
    /// of its class modulo the span's annihilator.
    pub covectors: Vec<QVec>,
    /// Smallest positive integer l such that l*D is Cartier.
    pub cartier_index: Int,
}

impl Divisor {
    pub fn new(fan: FanRef, coeffs: Vec<Rat>) -> Result<Divisor> {
        if coeffs.len() != fan.rays().len() {
            return Err(Error::Malformed(format!(
                "divisor has {} coefficients for {} rays",
                coeffs.len(),
                fan.rays().len()
            )));
        }
        Ok(Divisor { fan, coeffs })
    }

    pub fn zero(fan: FanRef) -> Divisor {
        let n = fan.rays().len();
        Divisor {
            fan,
            coeffs: vec![Rat::zero(); n],
        }
    }

    /// The canonical divisor: coefficient -1 on every ray.
    pub fn canonical(fan: FanRef) -> Divisor {
        let n = fan.rays().len();
        Divisor {
            fan,
            coeffs: vec![-Rat::one(); n],
        }
    }

    /// The reduced toric boundary: coefficient +1 on every ray.
    pub fn boundary(fan: FanRef) -> Divisor {
        let n = fan.rays().len();
        Divisor {
            fan,
            coeffs: vec![Rat::one(); n],
        }
    }

    /// div(chi^m) for an integral character m: coefficients <m, v_i>.
    pub fn principal(fan: FanRef, m: &QVec) -> Result<Divisor> {
        if !fan.lattice().covector_is_integral(m) {
            return Err(Error::NonIntegralCharacter);
        }
        let coeffs = fan.rays().iter().map(|v| dot(m, v)).collect();
        Ok(Divisor { fan, coeffs })
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        debug_assert!(self.fan.same_fan(&other.fan));
        Divisor {
            fan: self.fan.clone(),
            coeffs: crate::arith::add(&self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, c: &Rat) -> Divisor {
        Divisor {
            fan: self.fan.clone(),
            coeffs: crate::arith::scale(&self.coeffs, c),
        }
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            fan: self.fan.clone(),
            coeffs: crate::arith::neg(&self.coeffs),
        }
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn is_zero_divisor(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Per-cone linear data if the divisor is Q-Cartier, None otherwise.
    pub fn cartier_data(&self) -> Option<CartierData> {
        let fan = &self.fan;
        let n = fan.rank();
        let mut covectors = Vec::with_capacity(fan.max_cones().len());
        let l0 = lcm_of_denominators(&self.coeffs);
        let mut index = Int::one();
        for (ci, cone_rays) in fan.max_cones().iter().enumerate() {
            let rows: Vec<QVec> = cone_rays.iter().map(|&i| fan.rays()[i].clone()).collect();
            let rhs: QVec = cone_rays.iter().map(|&i| -&self.coeffs[i]).collect();
            if rows.is_empty() {
                covectors.push(vec![Rat::zero(); n]);
                continue;
            }
            let a = QMat::from_rows(&rows);
            let u = a.solve(&rhs)?;
            covectors.push(u);
            // minimal k with <w, y_i> = -k*l0*d_i integrally solvable in the
            // dual of the rebased lattice
            let reb_rows: Vec<crate::arith::IVec> = cone_rays
                .iter()
                .map(|&i| {
                    fan.lattice()
                        .rebase(&fan.rays()[i])
                        .expect("fan rays are lattice points")
                })
                .collect();
            let c0: crate::arith::IVec = cone_rays
                .iter()
                .map(|&i| {
                    let x = -&self.coeffs[i] * Rat::from_integer(l0.clone());
                    debug_assert!(x.denom().is_one());
                    x.numer().clone()
                })
                .collect();
            let k = integral_scaling(&IMat::from_rows(&reb_rows), &c0);
            index = index.lcm(&k);
            let _ = ci;
        }
        // face consistency is automatic (shared rays pin both sides); assert
        debug_assert!(self.cartier_faces_consistent(&covectors));
        Some(CartierData {
            covectors,
            cartier_index: l0 * index,
        })
    }

    fn cartier_faces_consistent(&self, covectors: &[QVec]) -> bool {
        let fan = &self.fan;
        for i in 0..fan.max_cones().len() {
            for j in (i + 1)..fan.max_cones().len() {
                let shared: Vec<usize> = fan.max_cones()[i]
                    .iter()
                    .copied()
                    .filter(|k| fan.max_cones()[j].contains(k))
                    .collect();
                for k in shared {
                    let v = &fan.rays()[k];
                    if dot(&covectors[i], v) != dot(&covectors[j], v) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_qcartier(&self) -> bool {
        self.cartier_data().is_some()
    }

    /// Support function value h_D(x) = <u_sigma, x> for x in the support.
    pub fn support_value(&self, cartier: &CartierData, x: &[Rat]) -> Result<Rat> {
        for (ci, _) in self.fan.max_cones().iter().enumerate() {
            if self.fan.cone(ci).contains(x) {
                return Ok(dot(&cartier.covectors[ci], x));
            }
        }
        Err(Error::OutsideSupport)
    }
}

/// Basis of the subspace of Q-Cartier coefficient vectors of the fan.
///
/// Solved as one big linear system in the coefficients and one covector per
/// maximal cone, then projected to the coefficient coordinates.
pub fn qcartier_space(fan: &Fan) -> Vec<QVec> {
    let k = fan.rays().len();
    let n = fan.rank();
    let cones = fan.max_cones();
    let nvars = k + n * cones.len();
    let mut rows: Vec<QVec> = Vec::new();
    for (ci, cone_rays) in cones.iter().enumerate() {
        for &i in cone_rays {
            // <u_ci, v_i> + d_i = 0
            let mut row = vec![Rat::zero(); nvars];
            row[i] = Rat::one();
            for j in 0..n {
                row[k + ci * n + j] = fan.rays()[i][j].clone();
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return (0..k)
            .map(|i| {
                let mut e = vec![Rat::zero(); k];
                e[i] = Rat::one();
                e
            })
            .collect();
    }
    let kernel = QMat::from_rows(&rows).kernel_basis();
    let projected: Vec<QVec> = kernel.iter().map(|v| v[..k].to_vec()).collect();
    basis_of_span(&projected)
}

/// Row-reduce a spanning set to a basis.
pub fn basis_of_span(vectors: &[QVec]) -> Vec<QVec> {
    let mut basis: Vec<QVec> = Vec::new();
    for v in vectors {
        if v.iter().all(|c| c.is_zero()) {
            continue;
        }
        basis.push(v.clone());
        if QMat::from_rows(&basis).rank() < basis.len() {
            basis.pop();
        }
    }
    basis
}

/// The subspace of principal divisor coefficient vectors.
pub fn principal_space(fan: &Fan) -> Vec<QVec> {
    let n = fan.rank();
    let gens: Vec<QVec> = (0..n)
        .map(|j| {
            let mut m = vec![Rat::zero(); n];
            m[j] = Rat::one();
            fan.rays().iter().map(|v| dot(&m, v)).collect()
        })
        .collect();
    basis_of_span(&gens)
}

/// Relative Picard number rho(X/Y): the rank of Q-Cartier invariant divisor
/// classes modulo principal divisors and pullbacks of Q-Cartier divisors
/// from the target.
pub fn relative_picard_rank(phi: &Morphism) -> Result<usize> {
    if !phi.is_proper() {
        return Err(Error::NotProper);
    }
    let x = phi.source();
    let y = phi.target();
    let qc = qcartier_space(x);
    let mut denom: Vec<QVec> = principal_space(x);
    for dy in qcartier_space(y) {
        let div = Divisor::new(phi.target_ref(), dy)?;
        let pulled = phi.pullback(&div)?;
        denom.push(pulled.coeffs);
    }
    let denom = basis_of_span(&denom);
    // all denominator vectors are Q-Cartier, so rho = dim QC - dim denom
    debug_assert!(denom
        .iter()
        .all(|d| QMat::stack_rank(&qc, std::slice::from_ref(d)) == qc.len()));
    Ok(qc.len() - denom.len())
}

/// D is nef over the base when it pairs nonnegatively with every wall curve
/// contracted by the morphism.
pub fn is_nef_over(d: &Divisor, phi: &Morphism) -> Result<bool> {
    let cartier = d.cartier_data().ok_or(Error::NotQCartier)?;
    if !phi.is_proper() {
        return Err(Error::NotProper);
    }
    for wall in crate::intersection::contracted_walls(phi) {
        let val = crate::intersection::intersect_with_data(d, &cartier, &wall)?;
        if val.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative ampleness: strictly positive on contracted wall curves, and the
/// roof over each target cone is strictly convex (no two maximal cones over
/// a common target cone share their covector).
pub fn is_ample_over(d: &Divisor, phi: &Morphism) -> Result<bool> {
    let cartier = d.cartier_data().ok_or(Error::NotQCartier)?;
    if !phi.is_proper() {
        return Err(Error::NotProper);
    }
    for wall in crate::intersection::contracted_walls(phi) {
        let val = crate::intersection::intersect_with_data(d, &cartier, &wall)?;
        if !val.is_positive() {
            return Ok(false);
        }
    }
    let x = phi.source();
    for (ti, _) in phi.target().max_cones().iter().enumerate() {
        let members: Vec<usize> = (0..x.max_cones().len())
            .filter(|&si| phi.maps_into_target_cone(si, ti))
            .collect();
        for (a, &si) in members.iter().enumerate() {
            for &sj in members.iter().skip(a + 1) {
                let mut same = true;
                for &r in x.max_cones()[si].iter().chain(x.max_cones()[sj].iter()) {
                    let v = &x.rays()[r];
                    if dot(&cartier.covectors[si], v) != dot(&cartier.covectors[sj], v) {
                        same = false;
                        break;
                    }
                }
                if same {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qvec, rat};
    use crate::fan::Fan;
    use crate::lattice::Lattice;
    use std::sync::Arc;

    fn fan_3d(rays: &[&[i64]], cones: &[&[usize]]) -> FanRef {
        Arc::new(
            Fan::validate(
                Lattice::standard(3),
                rays.iter().map(|r| qvec(r)).collect(),
                cones.iter().map(|c| c.to_vec()).collect(),
            )
            .unwrap(),
        )
    }

    fn delta_a() -> FanRef {
        fan_3d(
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
    }

    #[test]
    fn canonical_on_flip_source_has_the_two_roofs() {
        let fan = delta_a();
        let k = Divisor::canonical(fan.clone());
        let data = k.cartier_data().expect("K is Q-Cartier on this fan");
        assert_eq!(data.cartier_index, Int::one());
        // roof over <e1,e3,f1,f2> is x + z = 1, over <e2,e4,f1,f2> is y = 1
        let i_a = fan
            .max_cones()
            .iter()
            .position(|c| c == &vec![0, 2, 4, 5])
            .unwrap();
        let i_b = fan
            .max_cones()
            .iter()
            .position(|c| c == &vec![1, 3, 4, 5])
            .unwrap();
        assert_eq!(data.covectors[i_a], qvec(&[1, 0, 1]));
        assert_eq!(data.covectors[i_b], qvec(&[0, 1, 0]));
    }

    #[test]
    fn zero_divisor_is_cartier_index_one() {
        let fan = delta_a();
        let z = Divisor::zero(fan);
        let data = z.cartier_data().unwrap();
        assert_eq!(data.cartier_index, Int::one());
        assert!(data.covectors.iter().flatten().all(|c| c.is_zero()));
    }

    #[test]
    fn canonical_plus_boundary_vanishes() {
        let fan = delta_a();
        let k = Divisor::canonical(fan.clone());
        let b = Divisor::boundary(fan);
        assert!(k.add(&b).is_zero_divisor());
    }

    #[test]
    fn non_qcartier_on_the_five_ray_cone() {
        // single cone on e1..e4, f2: K is not Q-Cartier
        let fan = fan_3d(
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1], &[-1, 1, 2]],
            &[&[0, 1, 2, 3, 4]],
        );
        let k = Divisor::canonical(fan);
        assert!(k.cartier_data().is_none());
    }

    #[test]
    fn principal_divisor_examples() {
        let p1 = Arc::new(
            Fan::validate(
                Lattice::standard(1),
                vec![qvec(&[1]), qvec(&[-1])],
                vec![vec![0], vec![1]],
            )
            .unwrap(),
        );
        let d = Divisor::principal(p1.clone(), &qvec(&[1])).unwrap();
        assert_eq!(d.coeffs, vec![rat(1), rat(-1)]);
        let z = Divisor::principal(p1, &qvec(&[0])).unwrap();
        assert!(z.is_zero_divisor());

        let fan = delta_a();
        let d = Divisor::principal(fan, &qvec(&[1, 0, 1])).unwrap();
        // coefficient 1 exactly on the four rays of the H1 roof
        assert_eq!(
            d.coeffs,
            vec![rat(1), rat(0), rat(1), rat(0), rat(1), rat(1)]
        );
    }

    #[test]
    fn qcartier_space_dimensions_of_the_flip_fans() {
        let a = delta_a();
        assert_eq!(qcartier_space(&a).len(), 4);
        assert_eq!(principal_space(&a).len(), 3);
        // Delta_b: two simplicial cones and the square cone
        let b = fan_3d(
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, -1],
                &[3, 1, -2],
                &[-1, 1, 2],
            ],
            &[&[0, 3, 4], &[1, 2, 5], &[0, 1, 2, 3]],
        );
        assert_eq!(qcartier_space(&b).len(), 5);
    }

    #[test]
    fn cartier_indexes_on_p112() {
        // the canonical divisor of P(1,1,2) is Cartier (du Val singularity)
        let fan = Arc::new(crate::fan::p112());
        let k = Divisor::canonical(fan.clone());
        assert_eq!(k.cartier_data().unwrap().cartier_index, Int::one());
        // a single ray divisor needs a half-integral covector on the
        // singular cone
        let d = Divisor::new(fan, vec![rat(1), rat(0), rat(0)]).unwrap();
        assert_eq!(d.cartier_data().unwrap().cartier_index, Int::from(2));
    }

    #[test]
    fn character_shift_moves_covectors_by_the_character() {
        let fan = delta_a();
        let k = Divisor::canonical(fan.clone());
        let m = qvec(&[1, 0, 1]);
        let shifted = k.add(&Divisor::principal(fan, &m).unwrap());
        let d0 = k.cartier_data().unwrap();
        let d1 = shifted.cartier_data().unwrap();
        for (u0, u1) in d0.covectors.iter().zip(&d1.covectors) {
            let diff = crate::arith::sub(u0, u1);
            assert_eq!(diff, m);
        }
    }
}
