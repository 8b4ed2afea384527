//! Rational polyhedra through homogenization.
//!
//! A polyhedron {u : <a_i, u> >= b_i} is handled as the cone
//! {(u, t) : <a_i, u> - b_i t >= 0, t >= 0}; extreme rays with t > 0 are
//! vertices (or minimal-face representatives when the polyhedron has
//! lineality), rays with t = 0 form the recession cone.

use crate::arith::{dot, QVec, Rat};
use crate::cone::dual_extreme_rays;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone)]
pub struct Polyhedron {
    pub dim: usize,
    pub ineqs: Vec<(QVec, Rat)>,
    /// Vertices, or one representative per minimal face if there is lineality.
    pub vertices: Vec<QVec>,
    /// Extreme rays of the recession cone (modulo lineality).
    pub rays: Vec<QVec>,
    pub lineality: Vec<QVec>,
}

impl Polyhedron {
    /// Builds the double description of {u : <a, u> >= b for (a, b) in ineqs}.
    pub fn from_ineqs(dim: usize, ineqs: &[(QVec, Rat)]) -> Polyhedron {
        let mut hom: Vec<QVec> = Vec::new();
        for (a, b) in ineqs {
            let mut row = a.clone();
            row.push(-b.clone());
            hom.push(row);
        }
        let mut t_pos = vec![Rat::zero(); dim + 1];
        t_pos[dim] = Rat::from_integer(1.into());
        hom.push(t_pos);

        let (lin, rays) = dual_extreme_rays(&hom, dim + 1);
        let mut vertices = Vec::new();
        let mut recession = Vec::new();
        let mut lineality = Vec::new();
        for l in lin {
            debug_assert!(l[dim].is_zero());
            lineality.push(l[..dim].to_vec());
        }
        for r in rays {
            let t = &r[dim];
            if t.is_zero() {
                recession.push(r[..dim].to_vec());
            } else {
                debug_assert!(t.is_positive());
                vertices.push(r[..dim].iter().map(|c| c / t).collect());
            }
        }
        Polyhedron {
            dim,
            ineqs: ineqs.to_vec(),
            vertices,
            rays: recession,
            lineality,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, u: &[Rat]) -> bool {
        self.ineqs.iter().all(|(a, b)| dot(a, u) >= *b)
    }

    /// Minimum of <., x> over the polyhedron, None when unbounded below in
    /// direction x or the polyhedron is empty. Lineality directions must
    /// pair to zero with x for the minimum to exist.
    pub fn support_min(&self, x: &[Rat]) -> Option<Rat> {
        if self.is_empty() {
            return None;
        }
        for l in &self.lineality {
            if !dot(l, x).is_zero() {
                return None;
            }
        }
        for r in &self.rays {
            if dot(r, x).is_negative() {
                return None;
            }
        }
        self.vertices.iter().map(|v| dot(v, x)).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qvec, rat};

    #[test]
    fn simplex_dd() {
        // {x >= 0, y >= 0, x + y <= 1}
        let p = Polyhedron::from_ineqs(
            2,
            &[
                (qvec(&[1, 0]), rat(0)),
                (qvec(&[0, 1]), rat(0)),
                (qvec(&[-1, -1]), rat(-1)),
            ],
        );
        assert_eq!(p.vertices.len(), 3);
        assert!(p.rays.is_empty());
        assert!(p.contains(&qvec(&[0, 0])));
        assert!(!p.contains(&qvec(&[1, 1])));
        assert_eq!(p.support_min(&qvec(&[1, 1])).unwrap(), rat(0));
    }

    #[test]
    fn unbounded_polyhedron() {
        // {x >= 1}
        let p = Polyhedron::from_ineqs(2, &[(qvec(&[1, 0]), rat(1))]);
        assert!(!p.is_empty());
        assert_eq!(p.lineality.len(), 1);
        assert!(p.support_min(&qvec(&[0, 1])).is_none());
        assert_eq!(p.support_min(&qvec(&[1, 0])).unwrap(), rat(1));
    }

    #[test]
    fn empty_polyhedron() {
        let p = Polyhedron::from_ineqs(1, &[(qvec(&[1]), rat(1)), (qvec(&[-1]), rat(0))]);
        assert!(p.is_empty());
    }

    #[test]
    fn section_polyhedron_of_the_flip() {
        // {u : <u, v> >= 1 for the six rays of the flip example}
        let rays = [
            qvec(&[1, 0, 0]),
            qvec(&[0, 1, 0]),
            qvec(&[0, 0, 1]),
            qvec(&[1, 1, -1]),
            qvec(&[3, 1, -2]),
            qvec(&[-1, 1, 2]),
        ];
        let ineqs: Vec<(QVec, Rat)> = rays.iter().map(|r| (r.clone(), rat(1))).collect();
        let p = Polyhedron::from_ineqs(3, &ineqs);
        let mut vs = p.vertices.clone();
        vs.sort();
        assert_eq!(
            vs,
            vec![qvec(&[1, 1, 1]), qvec(&[1, 2, 2]), qvec(&[2, 1, 1])]
        );
    }
}
