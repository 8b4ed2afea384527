//! Equivariant morphisms of toric varieties as lattice maps between fans.
//!
//! A morphism is an integral lattice map sending every source cone into
//! some target cone (the minimal such cone is cached per maximal cone).
//! Properness is decided by an exact covering test of each target cone's
//! preimage; birational morphisms are classified as small or divisorial by
//! their exceptional rays; fibers over distinguished points come out as
//! fans in the quotient lattice, with the scheme-theoretic multiplicity.

use crate::arith::{Int, QVec, Rat};
use crate::cone::{region_covered_by, Cone, HRegion};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::fan::{FaceKey, Fan, FanRef};
use crate::lattice::Lattice;
use crate::mat::{snf, IMat, QMat};
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Morphism {
    source: FanRef,
    target: FanRef,
    /// Lattice map in standard coordinates (target rank x source rank).
    matrix: QMat,
    /// Minimal target face containing the image of each maximal source cone.
    cone_map: Vec<FaceKey>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalData {
    pub exceptional_ray_indices: Vec<usize>,
    pub is_small: bool,
    pub is_divisorial: bool,
}

impl Morphism {
    /// Validates a lattice map against the two fans.
    pub fn check(source: FanRef, target: FanRef, matrix: QMat) -> Result<Morphism> {
        if matrix.rows != target.rank() || matrix.cols != source.rank() {
            return Err(Error::Malformed(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows,
                matrix.cols,
                target.rank(),
                source.rank()
            )));
        }
        // integrality on the lattices
        for b in source.lattice().basis_columns() {
            let img = matrix.mul_vec(&b);
            if !target.lattice().contains(&img) {
                return Err(Error::NonIntegralMap);
            }
        }
        let mut cone_map = Vec::with_capacity(source.max_cones().len());
        for (ci, cone_rays) in source.max_cones().iter().enumerate() {
            let images: Vec<QVec> = cone_rays
                .iter()
                .map(|&i| matrix.mul_vec(&source.rays()[i]))
                .collect();
            let face = minimal_target_face(&target, &images)
                .ok_or_else(|| Error::IncompatibleCone(cone_rays.clone()))?;
            cone_map.push(face);
            let _ = ci;
        }
        Ok(Morphism {
            source,
            target,
            matrix,
            cone_map,
        })
    }

    pub fn identity(fan: FanRef) -> Morphism {
        let n = fan.rank();
        Morphism::check(fan.clone(), fan, QMat::identity(n)).expect("identity is compatible")
    }

    /// The unique morphism to the point fan.
    pub fn to_point(fan: FanRef) -> Morphism {
        let point = Arc::new(Fan::point());
        let m = QMat::new(0, fan.rank(), Vec::new());
        Morphism::check(fan, point, m).expect("collapse to a point")
    }

    pub fn source(&self) -> &Fan {
        &self.source
    }

    pub fn target(&self) -> &Fan {
        &self.target
    }

    pub fn source_ref(&self) -> FanRef {
        self.source.clone()
    }

    pub fn target_ref(&self) -> FanRef {
        self.target.clone()
    }

    pub fn matrix(&self) -> &QMat {
        &self.matrix
    }

    pub fn cone_map(&self) -> &[FaceKey] {
        &self.cone_map
    }

    pub fn apply(&self, x: &[Rat]) -> QVec {
        self.matrix.mul_vec(x)
    }

    /// Does the image of source maximal cone `si` land inside target maximal
    /// cone `ti`?
    pub fn maps_into_target_cone(&self, si: usize, ti: usize) -> bool {
        let t = self.target.cone(ti);
        self.source.max_cones()[si]
            .iter()
            .all(|&r| t.contains(&self.apply(&self.source.rays()[r])))
    }

    /// psi o phi, defined when this target is psi's source.
    pub fn compose(&self, outer: &Morphism) -> Result<Morphism> {
        if !self.target.same_fan(outer.source()) {
            return Err(Error::Malformed(
                "composition targets do not match".into(),
            ));
        }
        Morphism::check(
            self.source.clone(),
            outer.target_ref(),
            outer.matrix.mul(&self.matrix),
        )
    }

    /// Support equality A^-1(|target|) = |source|, tested cone by cone with
    /// exact polyhedral covering.
    pub fn is_proper(&self) -> bool {
        let n = self.source.rank();
        let pieces: Vec<&Cone> = (0..self.source.max_cones().len())
            .map(|i| self.source.cone(i))
            .collect();
        for (ti, _) in self.target.max_cones().iter().enumerate() {
            let t = self.target.cone(ti);
            let pull = |a: &QVec| -> QVec {
                // covector a on the target pulled back along the matrix
                (0..n)
                    .map(|j| {
                        (0..self.target.rank())
                            .map(|i| &a[i] * &self.matrix[(i, j)])
                            .sum()
                    })
                    .collect()
            };
            let ineqs: Vec<QVec> = t.facets().iter().map(&pull).collect();
            let eqs: Vec<QVec> = t.span_eqs().iter().map(&pull).collect();
            let region = HRegion::new(n, ineqs, eqs);
            if !region_covered_by(&region, &pieces) {
                return false;
            }
        }
        true
    }

    /// Is the underlying lattice map an isomorphism?
    pub fn is_lattice_iso(&self) -> bool {
        if self.source.rank() != self.target.rank() {
            return false;
        }
        let reb = QMat::from_cols(&self.target.lattice().basis_columns())
            .inverse()
            .expect("basis invertible")
            .mul(&self.matrix)
            .mul(&QMat::from_cols(&self.source.lattice().basis_columns()));
        (0..reb.rows).all(|i| (0..reb.cols).all(|j| reb[(i, j)].denom().is_one()))
            && reb.det().abs() == Rat::one()
    }

    /// Exceptional rays and the small/divisorial dichotomy for proper
    /// birational morphisms.
    pub fn classify_birational(&self) -> Result<ExceptionalData> {
        if !self.is_lattice_iso() {
            return Err(Error::NotBirational);
        }
        let mut exceptional = Vec::new();
        for (i, v) in self.source.rays().iter().enumerate() {
            let img = self.apply(v);
            if self.target.ray_index(&img).is_none() {
                exceptional.push(i);
            }
        }
        let is_small = exceptional.is_empty();
        Ok(ExceptionalData {
            exceptional_ray_indices: exceptional,
            is_small,
            is_divisorial: !is_small,
        })
    }

    /// Pullback of a Q-Cartier divisor: coefficients -h_D(A v_i).
    pub fn pullback(&self, d: &Divisor) -> Result<Divisor> {
        let cartier = d.cartier_data().ok_or(Error::NotQCartier)?;
        let mut coeffs = Vec::with_capacity(self.source.rays().len());
        for v in self.source.rays() {
            let img = self.apply(v);
            coeffs.push(-d.support_value(&cartier, &img)?);
        }
        Divisor::new(self.source_ref(), coeffs)
    }

    /// Pushforward of a divisor along a birational morphism: coefficients
    /// are copied on surviving rays.
    pub fn pushforward(&self, d: &Divisor) -> Result<Divisor> {
        if !self.is_lattice_iso() {
            return Err(Error::NotBirational);
        }
        let mut coeffs = vec![Rat::zero(); self.target.rays().len()];
        for (i, v) in self.source.rays().iter().enumerate() {
            if let Some(j) = self.target.ray_index(&self.apply(v)) {
                coeffs[j] = d.coeffs[i].clone();
            }
        }
        Divisor::new(self.target_ref(), coeffs)
    }

    /// Face-level cone map: the minimal target face containing the image of
    /// an arbitrary source face.
    pub fn face_image(&self, face: &[usize]) -> Option<FaceKey> {
        let images: Vec<QVec> = face
            .iter()
            .map(|&i| self.apply(&self.source.rays()[i]))
            .collect();
        minimal_target_face(&self.target, &images)
    }

    /// The fan of the reduced fiber over the distinguished point of the
    /// given target face, together with the multiplicity of the fiber.
    pub fn fiber_fan(&self, target_face: &[usize]) -> Result<(Fan, Int)> {
        if !self.is_proper() {
            return Err(Error::NotProper);
        }
        let mut key = target_face.to_vec();
        key.sort_unstable();
        // source faces whose relative interior maps into relint of the face
        let candidates: Vec<Vec<usize>> = self
            .source
            .faces()
            .iter()
            .filter(|f| {
                self.face_image(&f.rays)
                    .map(|img| img.rays == key)
                    .unwrap_or(false)
            })
            .map(|f| f.rays.clone())
            .collect();
        let minimal: Vec<Vec<usize>> = candidates
            .iter()
            .filter(|c| {
                !candidates
                    .iter()
                    .any(|other| *other != **c && other.iter().all(|i| c.contains(i)))
            })
            .cloned()
            .collect();
        if minimal.is_empty() {
            return Err(Error::NoMinimalCone);
        }
        if minimal.len() > 1 {
            return Err(Error::ReducibleFiber(minimal));
        }
        let sigma0 = &minimal[0];

        let n_lat = self.source.lattice();
        let target_cone = self.target.face_cone(&key);
        // ambient: lattice points mapping into the span of the target face
        let pulled_eqs: Vec<QVec> = target_cone
            .span_eqs()
            .iter()
            .map(|e| {
                (0..self.source.rank())
                    .map(|j| {
                        (0..self.target.rank())
                            .map(|i| &e[i] * &self.matrix[(i, j)])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let ambient = n_lat.saturate_equations(&pulled_eqs);
        let sub = n_lat.saturate_span(
            &sigma0
                .iter()
                .map(|&i| self.source.rays()[i].clone())
                .collect::<Vec<_>>(),
        );
        let proj = n_lat.sublattice_quotient_map(&ambient, &sub);
        let q_rank = ambient.len() - sub.len();
        let q_lattice = Lattice::standard(q_rank);

        // star cones: faces containing sigma0 whose image stays in the face
        let star: Vec<Vec<usize>> = self
            .source
            .faces()
            .iter()
            .filter(|f| {
                sigma0.iter().all(|i| f.rays.contains(i))
                    && f.rays.iter().all(|&i| {
                        target_cone.contains(&self.apply(&self.source.rays()[i]))
                    })
            })
            .map(|f| f.rays.clone())
            .collect();

        let mut image_cones: Vec<Cone> = Vec::new();
        for cone_rays in &star {
            let gens: Vec<QVec> = cone_rays
                .iter()
                .filter(|i| !sigma0.contains(i))
                .map(|&i| proj.mul_vec(&self.source.rays()[i]))
                .collect();
            let c = if gens.is_empty() {
                Cone::zero(&q_lattice)
            } else {
                Cone::from_gens(&q_lattice, &gens)?
            };
            image_cones.push(c);
        }
        // maximal image cones
        let mut max_idx: Vec<usize> = Vec::new();
        for i in 0..image_cones.len() {
            let contained = image_cones
                .iter()
                .enumerate()
                .any(|(j, c)| j != i && c.contains_cone(&image_cones[i]) && !image_cones[i].same_cone(c));
            if !contained {
                max_idx.push(i);
            }
        }
        let mut rays: Vec<QVec> = Vec::new();
        let mut max_cones: Vec<Vec<usize>> = Vec::new();
        for &i in &max_idx {
            let mut indices = Vec::new();
            for g in image_cones[i].gens() {
                let pos = match rays.iter().position(|r| r == g) {
                    Some(p) => p,
                    None => {
                        rays.push(g.clone());
                        rays.len() - 1
                    }
                };
                indices.push(pos);
            }
            indices.sort_unstable();
            if !max_cones.contains(&indices) {
                max_cones.push(indices);
            }
        }
        let fiber = Fan::validate(q_lattice, rays, max_cones)?;

        // multiplicity: index of the image of the sigma0-lattice inside the
        // saturated lattice of the target face span
        let target_span = self
            .target
            .lattice()
            .saturate_span(target_cone.gens());
        let mult = if sub.is_empty() || target_span.is_empty() {
            Int::one()
        } else {
            let span_map = self
                .target
                .lattice()
                .sublattice_quotient_map(&target_span, &[]);
            let rows: Vec<crate::arith::IVec> = sub
                .iter()
                .map(|g| {
                    let img = span_map.mul_vec(&self.apply(g));
                    img.iter()
                        .map(|c| {
                            debug_assert!(c.denom().is_one());
                            c.numer().clone()
                        })
                        .collect()
                })
                .collect();
            let f = snf(&IMat::from_rows(&rows));
            let d = f.diagonal();
            if f.rank() < target_span.len() {
                Int::one()
            } else {
                d.iter().filter(|x| !x.is_zero()).product::<Int>().abs()
            }
        };
        Ok((fiber, mult))
    }
}

/// Minimal face of the fan containing all the given points, if any single
/// cone contains them.
fn minimal_target_face(fan: &Fan, points: &[QVec]) -> Option<FaceKey> {
    let mut best: Option<FaceKey> = None;
    for f in fan.faces() {
        let cone = fan.face_cone(&f.rays);
        if points.iter().all(|p| cone.contains(p)) {
            if best.as_ref().map(|b| f.dim < b.dim).unwrap_or(true) {
                best = Some(f.clone());
            }
        }
    }
    best
}
