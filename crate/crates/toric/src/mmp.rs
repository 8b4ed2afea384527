//! The minimal model program over a base, at fan level.
//!
//! Relative Proj of a divisorial algebra is realized as the regular
//! subdivision induced by the section polyhedra: over each maximal target
//! cone the sections of D form a polyhedron, its vertices give a concave
//! roof, and the domains of linearity of that roof are the cones of the new
//! fan. Divisorial and small contractions both continue through this
//! construction; fiber-type contractions stop the program.

use crate::arith::{dot, is_zero_vec, lcm_of_denominators, Int, QVec, Rat};
use crate::cone::Cone;
use crate::divisor::{is_ample_over, is_nef_over, Divisor};
use crate::error::{Error, Result};
use crate::fan::{map_fan, stellar_subdivide, Fan, FanRef, Wall};
use crate::intersection::{
    contract_ray, contracted_walls, intersect, mori_extremal_rays, ray_value, CurveData,
    ExtremalRay,
};
use crate::morphism::Morphism;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Relative Proj of the section algebra of `d` along a proper birational
/// morphism. Returns the new fan, its structure morphism to the target and
/// the strict transform of the divisor, which is ample over the target.
pub fn relative_proj(phi: &Morphism, d: &Divisor) -> Result<(FanRef, Morphism, Divisor)> {
    if !phi.is_lattice_iso() {
        // the one supported non-birational case: nothing to do
        if d.cartier_data().is_some() && is_ample_over(d, phi)? {
            return Ok((phi.source_ref(), phi.clone(), d.clone()));
        }
        return Err(Error::NonBirationalUnsupported);
    }
    let target = phi.target_ref();
    let n = target.rank();
    // work in target coordinates
    let images: Vec<QVec> = phi
        .source()
        .rays()
        .iter()
        .map(|v| phi.apply(v))
        .collect();

    struct Piece {
        cone: Cone,
        covector: QVec,
    }
    let mut pieces: Vec<Piece> = Vec::new();
    for (ti, _) in target.max_cones().iter().enumerate() {
        let tcone = target.cone(ti);
        let relevant: Vec<usize> = (0..images.len())
            .filter(|&i| tcone.contains(&images[i]))
            .collect();
        let ineqs: Vec<(QVec, Rat)> = relevant
            .iter()
            .map(|&i| (images[i].clone(), -&d.coeffs[i]))
            .collect();
        let sections = crate::polyhedron::Polyhedron::from_ineqs(n, &ineqs);
        if sections.is_empty() {
            return Err(Error::EmptySectionPolyhedron(
                target.max_cones()[ti].clone(),
            ));
        }
        for (vi, u) in sections.vertices.iter().enumerate() {
            // domain of linearity of the roof at this vertex
            let mut cut: Vec<QVec> = tcone.facets().to_vec();
            for (vj, w) in sections.vertices.iter().enumerate() {
                if vi != vj {
                    cut.push(crate::arith::sub(w, u));
                }
            }
            let domain = Cone::from_h(target.lattice(), &cut, tcone.span_eqs())?;
            if domain.dim() == tcone.dim()
                && !pieces.iter().any(|p| p.cone.same_cone(&domain))
            {
                pieces.push(Piece {
                    cone: domain,
                    covector: u.clone(),
                });
            }
        }
    }

    let mut rays: Vec<QVec> = Vec::new();
    let mut max_cones: Vec<Vec<usize>> = Vec::new();
    for p in &pieces {
        let mut idx: Vec<usize> = Vec::new();
        for g in p.cone.gens() {
            let pos = match rays.iter().position(|r| r == g) {
                Some(k) => k,
                None => {
                    rays.push(g.clone());
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
    let plus = Arc::new(Fan::validate(
        target.lattice().clone(),
        rays,
        max_cones,
    )?);

    // strict transform: coefficients are copied on surviving rays and read
    // off the roof on new rays
    let mut coeffs: Vec<Rat> = Vec::with_capacity(plus.rays().len());
    for ray in plus.rays() {
        let copied = images
            .iter()
            .position(|v| v == ray)
            .map(|i| d.coeffs[i].clone());
        let roof = pieces
            .iter()
            .find(|p| p.cone.contains(ray))
            .map(|p| -dot(&p.covector, ray))
            .expect("new rays lie in some linearity domain");
        if let Some(c) = copied {
            debug_assert_eq!(c, roof, "surviving ray off the roof");
            coeffs.push(c);
        } else {
            coeffs.push(roof);
        }
    }
    let d_plus = Divisor::new(plus.clone(), coeffs)?;
    let phi_plus = Morphism::check(
        plus.clone(),
        target.clone(),
        crate::mat::QMat::identity(n),
    )?;
    if d_plus.cartier_data().is_none() || !is_ample_over(&d_plus, &phi_plus)? {
        return Err(Error::Malformed(
            "relative Proj output is not ample over the base".into(),
        ));
    }
    Ok((plus, phi_plus, d_plus))
}

/// The elementary transformation (flip) of a small contraction with respect
/// to a divisor whose negative is relatively ample.
pub fn elementary_transform(
    phi: &Morphism,
    d: &Divisor,
) -> Result<(FanRef, Morphism, Divisor)> {
    let class = phi.classify_birational()?;
    if !class.is_small {
        return Err(Error::NotSmall);
    }
    if !is_ample_over(&d.neg(), phi)? {
        return Err(Error::MinusDNotAmple);
    }
    let (plus, phi_plus, d_plus) = relative_proj(phi, d)?;
    let class_plus = phi_plus.classify_birational()?;
    if !class_plus.is_small {
        return Err(Error::Malformed("flip output is not small".into()));
    }
    // new walls must lie over the non-isomorphism locus
    let old_walls: Vec<Vec<QVec>> = phi
        .source()
        .interior_walls()
        .map(|w| {
            w.rays
                .iter()
                .map(|&i| phi.apply(&phi.source().rays()[i]))
                .collect()
        })
        .collect();
    let iso = iso_locus_faces(phi);
    for w in phi_plus.source().interior_walls() {
        let gens: Vec<QVec> = w
            .rays
            .iter()
            .map(|&i| phi_plus.source().rays()[i].clone())
            .collect();
        let is_old = old_walls
            .iter()
            .any(|ow| crate::cone::same_gen_set(ow, &gens));
        if !is_old {
            if let Some(img) = phi_plus.face_image(&w.rays) {
                if iso.contains(&img.rays) {
                    return Err(Error::Malformed(
                        "flip produced a wall over the isomorphism locus".into(),
                    ));
                }
            }
        }
    }
    Ok((plus, phi_plus, d_plus))
}

/// Target faces over which the morphism is an isomorphism: exactly one
/// source face maps onto them, bijectively at cone level.
pub fn iso_locus_faces(phi: &Morphism) -> std::collections::BTreeSet<Vec<usize>> {
    let mut iso = std::collections::BTreeSet::new();
    for tf in phi.target().faces() {
        let over: Vec<&crate::fan::FaceKey> = phi
            .source()
            .faces()
            .iter()
            .filter(|sf| {
                phi.face_image(&sf.rays)
                    .map(|img| img.rays == tf.rays)
                    .unwrap_or(false)
            })
            .collect();
        if over.len() == 1 && over[0].dim == tf.dim {
            let tcone = phi.target().face_cone(&tf.rays);
            let src = phi.source().face_cone(&over[0].rays);
            let mapped: Vec<QVec> = src.gens().iter().map(|g| phi.apply(g)).collect();
            if crate::cone::same_gen_set(&mapped, tcone.gens()) {
                iso.insert(tf.rays.clone());
            }
        }
    }
    iso
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Divisorial,
    SmallFlip,
    FiberType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    MinimalModel,
    FiberTypeStop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Lexicographically smallest negative extremal class. Deterministic.
    FirstNegative,
    /// Restrict the choice to K-trivial rays.
    KTrivialFirst,
    /// Pick the i-th negative ray (modulo the number of candidates).
    ByIndex(usize),
}

#[derive(Debug, Clone)]
pub struct MmpStep {
    pub kind: StepKind,
    pub ray_class: QVec,
    pub before: FanRef,
    pub after: FanRef,
    pub divisor_before: Divisor,
    pub divisor_after: Divisor,
    /// (ray count, sum of negative parts of D against interior walls).
    pub measure_before: (usize, Rat),
    pub measure_after: (usize, Rat),
    pub rho_before: usize,
}

#[derive(Debug, Clone)]
pub struct MmpTrace {
    pub steps: Vec<MmpStep>,
    pub terminal: Terminal,
    /// The structure morphism of the final model over the base.
    pub final_morphism: Morphism,
    pub final_divisor: Divisor,
    /// Smallest integer making the divisor a Weil divisor.
    pub weil_scale: Int,
}

fn flip_potential(d: &Divisor) -> Rat {
    let mut total = Rat::zero();
    if let Some(cartier) = d.cartier_data() {
        for w in d.fan.interior_walls() {
            if let Ok(v) = crate::intersection::intersect_with_data(d, &cartier, w) {
                if v.is_negative() {
                    total -= v;
                }
            }
        }
    }
    total
}

fn measure(d: &Divisor) -> (usize, Rat) {
    (d.fan.rays().len(), flip_potential(d))
}

/// Runs the D-MMP over the base of `phi`: contract a D-negative extremal
/// ray, replace the result by the relative Proj of the section algebra, and
/// repeat until D is nef over the base or a fiber-type contraction appears.
pub fn mmp_run(phi: &Morphism, d: &Divisor, strategy: Strategy) -> Result<MmpTrace> {
    if d.cartier_data().is_none() {
        return Err(Error::NotQCartier);
    }
    if !phi.is_proper() {
        return Err(Error::NotProper);
    }
    let weil_scale = lcm_of_denominators(&d.coeffs);
    let cap = {
        let r = phi.source().rays().len();
        let w = phi.source().walls().len();
        (r + w) * (r + w)
    };
    let mut current = phi.clone();
    let mut divisor = d.clone();
    let mut steps: Vec<MmpStep> = Vec::new();
    loop {
        if steps.len() > cap {
            return Err(Error::IterationCapExceeded(cap));
        }
        if is_nef_over(&divisor, &current)? {
            return Ok(MmpTrace {
                steps,
                terminal: Terminal::MinimalModel,
                final_morphism: current,
                final_divisor: divisor,
                weil_scale,
            });
        }
        let (data, rays) = mori_extremal_rays(&current)?;
        let mut candidates: Vec<&ExtremalRay> = Vec::new();
        for ray in &rays {
            if ray_value(&divisor, &data, ray)?.is_negative() {
                candidates.push(ray);
            }
        }
        if candidates.is_empty() {
            return Err(Error::NoNegativeRay);
        }
        let chosen: &ExtremalRay = match strategy {
            Strategy::FirstNegative => candidates[0],
            Strategy::ByIndex(i) => candidates[i % candidates.len()],
            Strategy::KTrivialFirst => {
                let k = Divisor::canonical(current.source_ref());
                if k.cartier_data().is_none() {
                    return Err(Error::NotQGorenstein);
                }
                let trivial = candidates
                    .iter()
                    .find(|r| {
                        ray_value(&k, &data, r)
                            .map(|v| v.is_zero())
                            .unwrap_or(false)
                    })
                    .copied();
                trivial.ok_or(Error::NoNegativeRay)?
            }
        };
        let before = current.source_ref();
        let divisor_before = divisor.clone();
        let measure_before = measure(&divisor);
        let rho_before = crate::divisor::relative_picard_rank(&current)?;
        let (phi_r, psi) = contract_ray(&current, &data, chosen)?;
        if phi_r.target().rank() < before.rank() {
            let after = phi_r.target_ref();
            steps.push(MmpStep {
                kind: StepKind::FiberType,
                ray_class: chosen.class.clone(),
                before: before.clone(),
                after,
                divisor_before: divisor_before.clone(),
                divisor_after: divisor_before.clone(),
                measure_before: measure_before.clone(),
                measure_after: measure_before,
                rho_before,
            });
            return Ok(MmpTrace {
                steps,
                terminal: Terminal::FiberTypeStop,
                final_morphism: current,
                final_divisor: divisor,
                weil_scale,
            });
        }
        let kind = if phi_r.classify_birational()?.is_divisorial {
            StepKind::Divisorial
        } else {
            StepKind::SmallFlip
        };
        let (_, phi_plus, d_plus) = relative_proj(&phi_r, &divisor)?;
        let next = phi_plus.compose(&psi)?;
        let measure_after = measure(&d_plus);
        steps.push(MmpStep {
            kind,
            ray_class: chosen.class.clone(),
            before,
            after: phi_plus.source_ref(),
            divisor_before,
            divisor_after: d_plus.clone(),
            measure_before,
            measure_after,
            rho_before,
        });
        current = next;
        divisor = d_plus;
    }
}

/// Contracts every D-trivial extremal ray of the final model: the ample
/// model of the divisor over the base.
pub fn ample_model(phi: &Morphism, d: &Divisor) -> Result<(FanRef, Morphism, Divisor)> {
    let mut current = phi.clone();
    let mut divisor = d.clone();
    let cap = phi.source().rays().len() + phi.source().walls().len() + 2;
    for _ in 0..cap {
        if !is_nef_over(&divisor, &current)? {
            return Err(Error::NoNegativeRay);
        }
        let (data, rays) = match mori_extremal_rays(&current) {
            Ok(x) => x,
            Err(Error::NoContractedCurves) => {
                return Ok((current.source_ref(), current, divisor))
            }
            Err(e) => return Err(e),
        };
        let trivial = rays
            .iter()
            .find(|r| {
                ray_value(&divisor, &data, r)
                    .map(|v| v.is_zero())
                    .unwrap_or(false)
            })
            .cloned();
        let Some(ray) = trivial else {
            return Ok((current.source_ref(), current, divisor));
        };
        let (phi_r, psi) = contract_ray(&current, &data, &ray)?;
        if phi_r.target().rank() < current.source().rank() {
            // fiber-type collapse of a trivial ray: only the zero divisor
            // descends without extra bookkeeping
            if !divisor.is_zero_divisor() {
                return Err(Error::NonBirationalUnsupported);
            }
            divisor = Divisor::zero(phi_r.target_ref());
        } else {
            divisor = phi_r.pushforward(&divisor)?;
            if divisor.cartier_data().is_none() {
                return Err(Error::NotQCartier);
            }
        }
        current = psi;
    }
    Err(Error::IterationCapExceeded(cap))
}

/// The D-canonical model over the base: the ample model of the D-minimal
/// model. When the section polyhedra are nonempty the same fan also comes
/// out of the relative Proj over the base directly; the agreement of the
/// two routes is checked.
pub fn dagger_model(phi: &Morphism, d: &Divisor, strategy: Strategy) -> Result<(FanRef, Morphism, Divisor)> {
    let trace = mmp_run(phi, d, strategy)?;
    if trace.terminal != Terminal::MinimalModel {
        return Err(Error::Malformed(
            "no minimal model: the MMP stopped with a fiber-type contraction".into(),
        ));
    }
    let (fan, morphism, divisor) = ample_model(&trace.final_morphism, &trace.final_divisor)?;
    // independence of the route when the direct Proj is available
    if phi.is_lattice_iso() && !d.coeffs.is_empty() {
        if let Ok((direct, _, _)) = relative_proj(phi, d) {
            if !direct.same_fan(&fan) {
                return Err(Error::Malformed(
                    "canonical model differs between the two construction routes".into(),
                ));
            }
        }
    }
    Ok((fan, morphism, divisor))
}

/// Blow-down to the prescribed irreducible exceptional divisor: the only
/// divisor extracted by the resulting morphism is the one given.
pub struct Blowdown {
    pub model: FanRef,
    /// X' -> X
    pub morphism: Morphism,
    /// strict transform of E on X'
    pub exceptional: Divisor,
    /// discrepancy of E over X when the base is Q-Gorenstein
    pub discrepancy: Option<Rat>,
}

pub fn blowdown_prescribed(g: &Morphism, e_ray: usize) -> Result<Blowdown> {
    let class = g.classify_birational()?;
    if !class.exceptional_ray_indices.contains(&e_ray) {
        return Err(Error::NotExceptional);
    }
    let z = g.source_ref();
    let mut coeffs = vec![Rat::zero(); z.rays().len()];
    coeffs[e_ray] = -Rat::one(); // D = -E
    let d = Divisor::new(z.clone(), coeffs)?;
    let (model, morphism, d_model) = dagger_model(g, &d, Strategy::FirstNegative)?;
    // -E' must be relatively ample, and E' must survive
    let e_vector = g.apply(&z.rays()[e_ray]);
    let e_prim = g.target().lattice().primitivize(&e_vector)?;
    let e_idx = model
        .ray_index(&e_prim)
        .ok_or(Error::NotExceptional)?;
    if !is_ample_over(&d_model, &morphism)? {
        return Err(Error::Malformed("-E' is not ample over the base".into()));
    }
    // away from E' the model agrees with the base fan
    for (ci, cone_rays) in model.max_cones().iter().enumerate() {
        if cone_rays.contains(&e_idx) {
            continue;
        }
        let gens: Vec<QVec> = cone_rays.iter().map(|&i| model.rays()[i].clone()).collect();
        let in_base = g.target().faces().iter().any(|f| {
            f.rays.len() == gens.len()
                && crate::cone::same_gen_set(
                    &f.rays
                        .iter()
                        .map(|&i| g.target().rays()[i].clone())
                        .collect::<Vec<_>>(),
                    &gens,
                )
        });
        if !in_base {
            return Err(Error::Malformed(
                "blow-down modified the fan away from the exceptional divisor".into(),
            ));
        }
        let _ = ci;
    }
    let exceptional = Divisor::new(
        model.clone(),
        (0..model.rays().len())
            .map(|i| if i == e_idx { Rat::one() } else { Rat::zero() })
            .collect(),
    )?;
    // discrepancy bookkeeping when K downstairs is Q-Cartier
    let k_base = Divisor::canonical(g.target_ref());
    let discrepancy = if k_base.cartier_data().is_some() {
        let a = crate::singularity::discrepancy(g.target(), &e_prim)?;
        // verify K_{X'} = h^* K_X + a E'
        let pulled = morphism.pullback(&k_base)?;
        let k_model = Divisor::canonical(model.clone());
        let lhs = k_model.coeffs.clone();
        let rhs: Vec<Rat> = pulled
            .coeffs
            .iter()
            .zip(&exceptional.coeffs)
            .map(|(p, e)| p + &a * e)
            .collect();
        if lhs != rhs {
            return Err(Error::Malformed(
                "discrepancy equation failed on the blow-down".into(),
            ));
        }
        Some(a)
    } else {
        None
    };
    Ok(Blowdown {
        model,
        morphism,
        exceptional,
        discrepancy,
    })
}

/// Outcome of the negativity comparison of two relative models.
#[derive(Debug, Clone)]
pub struct NegativityReport {
    /// The common refinement the divisors were compared on.
    pub refinement: FanRef,
    /// E = mu^* D - nu^* D'.
    pub difference: Divisor,
    pub effective: bool,
    pub nonzero: bool,
    pub exceptional_support: bool,
}

/// Pulls both divisors back to a simplicial common refinement and reports
/// on E = mu^*D - nu^*D'.
pub fn negativity_check(
    f: &Morphism,
    g: &Morphism,
    d_u: &Divisor,
    d_v: &Divisor,
) -> Result<NegativityReport> {
    if !f.target().same_fan(g.target()) {
        return Err(Error::Malformed("the two morphisms have different targets".into()));
    }
    if !f.is_proper() || !g.is_proper() {
        return Err(Error::NotProper);
    }
    f.classify_birational()?;
    g.classify_birational()?;
    let w = f.target_ref();
    // transport both sides into base coordinates
    let u_fan = Arc::new(map_fan(f.source(), f.matrix(), w.lattice())?);
    let v_fan = Arc::new(map_fan(g.source(), g.matrix(), w.lattice())?);
    let transport = |fan: &Fan, src: &Fan, m: &crate::mat::QMat, d: &Divisor| -> Divisor {
        let coeffs = fan
            .rays()
            .iter()
            .map(|r| {
                let i = src
                    .rays()
                    .iter()
                    .position(|v| &m.mul_vec(v) == r)
                    .expect("transported ray");
                d.coeffs[i].clone()
            })
            .collect();
        Divisor { fan: Arc::new(fan.clone()), coeffs }
    };
    let d_u_w = transport(&u_fan, f.source(), f.matrix(), d_u);
    let d_v_w = transport(&v_fan, g.source(), g.matrix(), d_v);

    // pushforwards must agree on the base
    for (i, ray) in w.rays().iter().enumerate() {
        let cu = u_fan.ray_index(ray).map(|j| d_u_w.coeffs[j].clone());
        let cv = v_fan.ray_index(ray).map(|j| d_v_w.coeffs[j].clone());
        if let (Some(a), Some(b)) = (&cu, &cv) {
            if a != b {
                let key: Vec<i64> = Vec::new();
                let _ = key;
                return Err(Error::PushforwardMismatch(
                    ray.iter()
                        .map(|c| c.numer().try_into().unwrap_or(0))
                        .collect(),
                ));
            }
        }
        let _ = i;
    }

    let refinement = Arc::new(common_refinement(&u_fan, &v_fan)?);
    let refinement = Arc::new(simplicialize(&refinement)?);
    let mu = Morphism::check(
        refinement.clone(),
        u_fan.clone(),
        crate::mat::QMat::identity(w.rank()),
    )?;
    let nu = Morphism::check(
        refinement.clone(),
        v_fan.clone(),
        crate::mat::QMat::identity(w.rank()),
    )?;
    let pu = mu.pullback(&d_u_w)?;
    let pv = nu.pullback(&d_v_w)?;
    let diff = pu.add(&pv.neg());
    let effective = diff.is_effective();
    let nonzero = !diff.is_zero_divisor();
    let exceptional_support = diff
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .all(|(i, _)| w.ray_index(&refinement.rays()[i]).is_none());
    Ok(NegativityReport {
        refinement: refinement.clone(),
        difference: Divisor {
            fan: refinement,
            coeffs: diff.coeffs,
        },
        effective,
        nonzero,
        exceptional_support,
    })
}

/// Common refinement of two fans with equal support: maximal pairwise
/// intersections of their cones.
pub fn common_refinement(a: &Fan, b: &Fan) -> Result<Fan> {
    let mut cones: Vec<Cone> = Vec::new();
    for i in 0..a.max_cones().len() {
        for j in 0..b.max_cones().len() {
            let c = a.cone(i).intersection(b.cone(j))?;
            if !c.is_zero() && !cones.iter().any(|x| x.same_cone(&c)) {
                cones.push(c);
            }
        }
    }
    let maximal: Vec<&Cone> = cones
        .iter()
        .filter(|c| {
            !cones
                .iter()
                .any(|d| !d.same_cone(c) && d.contains_cone(c))
        })
        .collect();
    let lattice = a.lattice().clone();
    let mut rays: Vec<QVec> = Vec::new();
    let mut max_cones: Vec<Vec<usize>> = Vec::new();
    for c in maximal {
        let mut idx = Vec::new();
        for g in c.gens() {
            let pos = match rays.iter().position(|r| r == g) {
                Some(k) => k,
                None => {
                    rays.push(g.clone());
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
    Fan::validate(lattice, rays, max_cones)
}

/// Subdivides until every maximal cone is simplicial, using stellar
/// subdivisions at existing rays.
pub fn simplicialize(fan: &Fan) -> Result<Fan> {
    let mut current = fan.clone();
    for _ in 0..64 {
        let bad = current
            .max_cones()
            .iter()
            .enumerate()
            .find(|(i, c)| c.len() != current.cone(*i).dim());
        let Some((ci, cone_rays)) = bad else {
            return Ok(current);
        };
        let ray = current.rays()[cone_rays[0]].clone();
        let _ = ci;
        current = stellar_subdivide(&current, &ray)?;
    }
    Err(Error::CompletionFailed("simplicialization did not terminate".into()))
}

/// A witness for the bound on the length of an extremal ray.
#[derive(Debug, Clone)]
pub struct LengthWitness {
    pub ray_class: QVec,
    pub wall: Wall,
    /// -(K+D) . C for the best invariant witness curve.
    pub value: Rat,
    /// value <= dim X + 1
    pub within_bound: bool,
    /// value <= dim X (expected unless X is projective space with small D)
    pub within_dim: bool,
}

/// For each extremal ray over the base, the smallest -(K+D) degree of an
/// invariant wall curve on the ray, compared against dim X + 1.
pub fn extremal_length_check(phi: &Morphism, boundary: &Divisor) -> Result<Vec<LengthWitness>> {
    for c in &boundary.coeffs {
        if c.is_negative() || c > &Rat::one() {
            return Err(Error::Malformed(
                "boundary coefficients must lie in [0, 1]".into(),
            ));
        }
    }
    let k = Divisor::canonical(phi.source_ref());
    let kd = k.add(boundary);
    if kd.cartier_data().is_none() {
        return Err(Error::NotQCartier);
    }
    let n = phi.source().rank();
    let bound = Rat::from_integer(Int::from(n as i64 + 1));
    let dim_bound = Rat::from_integer(Int::from(n as i64));
    let (data, rays) = mori_extremal_rays(phi)?;
    let mut out = Vec::new();
    for ray in rays {
        let mut best: Option<(usize, Rat)> = None;
        for &wi in &ray.wall_indices {
            let v = -intersect(&kd, &data.walls[wi])?;
            if best.as_ref().map(|(_, b)| v < *b).unwrap_or(true) {
                best = Some((wi, v));
            }
        }
        let (wi, value) = best.expect("extremal ray has a representative wall");
        out.push(LengthWitness {
            ray_class: ray.class.clone(),
            wall: data.walls[wi].clone(),
            within_bound: value <= bound,
            within_dim: value <= dim_bound,
            value,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qvec, rat};
    use crate::fan::projective_space;
    use crate::lattice::Lattice;
    use crate::mat::QMat;

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

    fn delta_a() -> FanRef {
        fan(3, &FLIP_RAYS, &[&[0, 2, 4, 5], &[1, 3, 4, 5]])
    }

    fn delta_b() -> FanRef {
        fan(3, &FLIP_RAYS, &[&[0, 3, 4], &[1, 2, 5], &[0, 1, 2, 3]])
    }

    fn delta_c() -> FanRef {
        fan(3, &FLIP_RAYS, &[&[0, 1, 2, 3, 4, 5]])
    }

    fn flip_f() -> Morphism {
        Morphism::check(delta_a(), delta_c(), QMat::identity(3)).unwrap()
    }

    #[test]
    fn relative_proj_of_the_flip_lands_on_delta_b() {
        let f = flip_f();
        let k = Divisor::canonical(f.source_ref());
        let (plus, phi_plus, k_plus) = relative_proj(&f, &k).unwrap();
        assert!(plus.same_fan(&delta_b()));
        assert!(k_plus.coeffs.iter().all(|c| c == &rat(-1)));
        assert!(is_ample_over(&k_plus, &phi_plus).unwrap());
    }

    #[test]
    fn relative_proj_is_idempotent_on_its_output() {
        let f = flip_f();
        let k = Divisor::canonical(f.source_ref());
        let (_, phi_plus, k_plus) = relative_proj(&f, &k).unwrap();
        let (again, _, _) = relative_proj(&phi_plus, &k_plus).unwrap();
        assert!(again.same_fan(phi_plus.source()));
    }

    #[test]
    fn flip_reversal_recovers_the_source() {
        let f = flip_f();
        let k = Divisor::canonical(f.source_ref());
        let (_, phi_plus, k_plus) = elementary_transform(&f, &k).unwrap();
        let (back, _, _) = elementary_transform(&phi_plus, &k_plus.neg()).unwrap();
        assert!(back.same_fan(&delta_a()));
    }

    #[test]
    fn mmp_on_the_flip_is_one_small_step() {
        let f = flip_f();
        let k = Divisor::canonical(f.source_ref());
        let trace = mmp_run(&f, &k, Strategy::FirstNegative).unwrap();
        assert_eq!(trace.terminal, Terminal::MinimalModel);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].kind, StepKind::SmallFlip);
        assert!(trace.final_morphism.source().same_fan(&delta_b()));
        // the flip potential drops strictly
        assert!(trace.steps[0].measure_after.1 < trace.steps[0].measure_before.1);
        assert_eq!(trace.steps[0].measure_before.0, trace.steps[0].measure_after.0);
        // rho rises from 1 to 2 across this flip
        assert_eq!(trace.steps[0].rho_before, 1);
    }

    #[test]
    fn mmp_with_nef_divisor_stops_immediately() {
        let f = flip_f();
        let minus_k = Divisor::canonical(f.source_ref()).neg();
        let trace = mmp_run(&f, &minus_k, Strategy::FirstNegative).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.terminal, Terminal::MinimalModel);
    }

    fn delta_d() -> FanRef {
        // rays e1..e4, f2, f3 with f3 = (0,1,1)
        fan(
            3,
            &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 1, -1],
                &[-1, 1, 2],
                &[0, 1, 1],
            ],
            &[&[0, 3, 5], &[0, 2, 4, 5], &[1, 3, 4, 5]],
        )
    }

    fn delta_e() -> FanRef {
        fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1], &[-1, 1, 2]],
            &[&[0, 1, 2, 3], &[1, 2, 4]],
        )
    }

    fn delta_f() -> FanRef {
        fan(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1], &[-1, 1, 2]],
            &[&[0, 1, 2, 3, 4]],
        )
    }

    #[test]
    fn divisorial_example_runs_through_proj() {
        let phi = Morphism::check(delta_d(), delta_f(), QMat::identity(3)).unwrap();
        assert!(phi.is_proper());
        let e = phi.classify_birational().unwrap();
        assert!(e.is_divisorial);
        assert_eq!(e.exceptional_ray_indices, vec![5]);
        let k = Divisor::canonical(phi.source_ref());
        let (plus, phi_plus, _) = relative_proj(&phi, &k).unwrap();
        assert!(plus.same_fan(&delta_e()));
        assert!(phi_plus.classify_birational().unwrap().is_small);
        // one divisorial MMP step, landing on the minimal model
        let trace = mmp_run(&phi, &k, Strategy::FirstNegative).unwrap();
        assert_eq!(trace.terminal, Terminal::MinimalModel);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].kind, StepKind::Divisorial);
        assert!(trace.final_morphism.source().same_fan(&delta_e()));
        assert!(trace.steps[0].measure_after.0 < trace.steps[0].measure_before.0);
    }

    #[test]
    fn dagger_of_the_flip_is_delta_b() {
        let f = flip_f();
        let k = Divisor::canonical(f.source_ref());
        let (dagger, _, _) = dagger_model(&f, &k, Strategy::FirstNegative).unwrap();
        assert!(dagger.same_fan(&delta_b()));
    }

    #[test]
    fn dagger_of_zero_collapses_to_the_base() {
        let f = flip_f();
        let zero = Divisor::zero(f.source_ref());
        let (dagger, _, _) = dagger_model(&f, &zero, Strategy::FirstNegative).unwrap();
        assert!(dagger.same_fan(&delta_c()));
    }

    #[test]
    fn mmp_stops_on_fiber_type() {
        // the Fano threefold over a point with D = K stops at a fibration
        let x = fan(
            3,
            &[
                &[0, 0, 1],
                &[-1, 0, 0],
                &[1, 0, -1],
                &[0, -1, 0],
                &[0, 2, -1],
            ],
            &[
                &[0, 1, 3],
                &[0, 1, 4],
                &[0, 2, 3],
                &[0, 2, 4],
                &[1, 2, 3],
                &[1, 2, 4],
            ],
        );
        let phi = Morphism::to_point(x.clone());
        let k = Divisor::canonical(x);
        let trace = mmp_run(&phi, &k, Strategy::FirstNegative).unwrap();
        assert_eq!(trace.terminal, Terminal::FiberTypeStop);
    }

    #[test]
    fn blowdown_of_a_star_subdivision_is_idempotent() {
        // Z = star subdivision of the plane quadrant at e1 + e2
        let z = fan(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 2], &[1, 2]]);
        let base = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let g = Morphism::check(z.clone(), base, QMat::identity(2)).unwrap();
        let blow = blowdown_prescribed(&g, 2).unwrap();
        assert!(blow.model.same_fan(&z));
        assert_eq!(blow.discrepancy, Some(rat(1)));
    }

    #[test]
    fn blowdown_keeps_only_the_prescribed_ray() {
        // two-ray subdivision of the quadrant; blow down to one of them
        let z = fan(
            2,
            &[&[1, 0], &[0, 1], &[2, 1], &[1, 1]],
            &[&[0, 2], &[2, 3], &[1, 3]],
        );
        let base = fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let g = Morphism::check(z, base, QMat::identity(2)).unwrap();
        let blow = blowdown_prescribed(&g, 2).unwrap();
        // the model keeps (2,1) and drops (1,1)
        assert!(blow.model.ray_index(&qvec(&[2, 1])).is_some());
        assert!(blow.model.ray_index(&qvec(&[1, 1])).is_none());
        let blow2 = blowdown_prescribed(&g, 3).unwrap();
        assert!(blow2.model.ray_index(&qvec(&[1, 1])).is_some());
        assert!(blow2.model.ray_index(&qvec(&[2, 1])).is_none());
    }

    #[test]
    fn negativity_on_the_flip_pair() {
        let f = flip_f();
        let fp = Morphism::check(delta_b(), delta_c(), QMat::identity(3)).unwrap();
        let k_u = Divisor::canonical(f.source_ref());
        let k_v = Divisor::canonical(fp.source_ref());
        let report = negativity_check(&f, &fp, &k_u, &k_v).unwrap();
        assert!(report.effective);
        assert!(report.nonzero);
        assert!(report.exceptional_support);
    }

    #[test]
    fn negativity_identity_gives_zero() {
        let a = delta_a();
        let id = Morphism::identity(a.clone());
        let k = Divisor::canonical(a);
        let report = negativity_check(&id, &id, &k, &k).unwrap();
        assert!(report.effective);
        assert!(!report.nonzero);
    }

    #[test]
    fn length_bound_on_p3() {
        let p3 = Arc::new(projective_space(3));
        let phi = Morphism::to_point(p3.clone());
        let zero = Divisor::zero(p3.clone());
        let witnesses = extremal_length_check(&phi, &zero).unwrap();
        assert_eq!(witnesses.len(), 1);
        assert_eq!(witnesses[0].value, rat(4));
        assert!(witnesses[0].within_bound);
        assert!(!witnesses[0].within_dim);
        // with the full boundary the pairing drops to zero
        let b = Divisor::boundary(p3);
        let witnesses = extremal_length_check(&phi, &b).unwrap();
        assert_eq!(witnesses[0].value, rat(0));
        assert!(witnesses[0].within_dim);
    }

    #[test]
    fn elementary_transform_rejects_divisorial_input() {
        let phi = Morphism::check(delta_d(), delta_f(), QMat::identity(3)).unwrap();
        let k = Divisor::canonical(phi.source_ref());
        assert!(matches!(
            elementary_transform(&phi, &k),
            Err(Error::NotSmall)
        ));
    }

    #[test]
    fn common_refinement_of_flip_sides() {
        let a = delta_a();
        let b = delta_b();
        let z = common_refinement(&a, &b).unwrap();
        // the refinement maps to both sides
        assert!(Morphism::check(Arc::new(z.clone()), a, QMat::identity(3)).is_ok());
        assert!(Morphism::check(Arc::new(z), b, QMat::identity(3)).is_ok());
    }
}
