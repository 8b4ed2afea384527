//! Finitely generated lattices N with Z^n <= N < Q^n of finite index.
//!
//! A lattice is the group generated by Z^n together with finitely many
//! rational vectors (the `extra_gens`), as in cyclic quotient constructions.
//! On construction we compute a basis in standard coordinates; a point is a
//! lattice point iff its coordinates with respect to that basis are integral.
//! All fan data lives in standard Q^n coordinates, and "rebased" coordinates
//! (integer coordinates with respect to the basis) are used wherever
//! primitivity or integrality matters.

use crate::arith::{lcm_of_denominators, qvec_from_int, Int, IVec, QVec, Rat};
use crate::error::{Error, Result};
use crate::mat::{snf, IMat, QMat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct Lattice {
    rank: usize,
    extra_gens: Vec<QVec>,
    /// Basis vectors as columns; x = basis * y for rebased coordinates y.
    basis: QMat,
    basis_inv: QMat,
    /// Index of the lattice over Z^n (product of elementary divisors).
    index: Int,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.index == other.index && {
            // same subgroup of Q^n: each basis vector of one is a point of the other
            (0..self.rank).all(|j| other.contains(&self.basis.col(j)))
                && (0..other.rank).all(|j| self.contains(&other.basis.col(j)))
        }
    }
}
impl Eq for Lattice {}

impl Lattice {
    pub fn standard(rank: usize) -> Self {
        Lattice {
            rank,
            extra_gens: Vec::new(),
            basis: QMat::identity(rank),
            basis_inv: QMat::identity(rank),
            index: Int::one(),
        }
    }

    pub fn with_extra_gens(rank: usize, extra_gens: Vec<QVec>) -> Result<Self> {
        for g in &extra_gens {
            if g.len() != rank {
                return Err(Error::Malformed(format!(
                    "extra generator has {} coordinates, expected {}",
                    g.len(),
                    rank
                )));
            }
        }
        if extra_gens.is_empty() {
            return Ok(Lattice::standard(rank));
        }
        // d*N is generated over Z by d*e_i and d*g_j; a column-lattice basis
        // of that integer span comes out of the Smith normal form.
        let mut denom = Int::one();
        for g in &extra_gens {
            denom = denom.lcm(&lcm_of_denominators(g));
        }
        let mut cols: Vec<IVec> = Vec::new();
        for i in 0..rank {
            let mut e = vec![Int::zero(); rank];
            e[i] = denom.clone();
            cols.push(e);
        }
        for g in &extra_gens {
            cols.push(
                g.iter()
                    .map(|x| x.numer() * (&denom / x.denom()))
                    .collect(),
            );
        }
        let gens = IMat::from_rows(&cols).transpose(); // rank x (rank + k), generators as columns
        let f = snf(&gens);
        if f.rank() < rank {
            return Err(Error::Malformed("lattice generators do not span".into()));
        }
        // gens = U^-1 * S * V^-1, so the column span is U^-1 * diag(s_i) Z^rank
        let u_inv = f
            .u
            .to_qmat()
            .inverse()
            .expect("snf transform is unimodular");
        let mut basis = QMat::identity(rank);
        let d = Rat::from_integer(denom.clone());
        for j in 0..rank {
            let sj = Rat::from_integer(f.s[(j, j)].clone());
            for i in 0..rank {
                basis[(i, j)] = &u_inv[(i, j)] * &sj / &d;
            }
        }
        let basis_inv = basis.inverse().expect("basis is invertible");
        let index = (basis.det().recip().abs().numer()).clone();
        Ok(Lattice {
            rank,
            extra_gens,
            basis,
            basis_inv,
            index,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn extra_gens(&self) -> &[QVec] {
        &self.extra_gens
    }

    pub fn is_standard(&self) -> bool {
        self.extra_gens.is_empty()
    }

    /// Index over Z^n.
    pub fn index_over_standard(&self) -> &Int {
        &self.index
    }

    pub fn basis_columns(&self) -> Vec<QVec> {
        (0..self.rank).map(|j| self.basis.col(j)).collect()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.rebase(x).is_some()
    }

    /// Integer coordinates with respect to the lattice basis, if `x` is a
    /// lattice point.
    pub fn rebase(&self, x: &[Rat]) -> Option<IVec> {
        assert_eq!(x.len(), self.rank);
        let y = self.basis_inv.mul_vec(x);
        y.iter()
            .map(|c| c.denom().is_one().then(|| c.numer().clone()))
            .collect()
    }

    pub fn unrebase(&self, y: &[Int]) -> QVec {
        self.basis.mul_vec(&qvec_from_int(y))
    }

    /// Rational coordinates with respect to the lattice basis.
    pub fn rebase_q(&self, x: &[Rat]) -> QVec {
        self.basis_inv.mul_vec(x)
    }

    /// Shortest lattice point on the ray through `v`.
    pub fn primitivize(&self, v: &[Rat]) -> Result<QVec> {
        if v.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroVector);
        }
        let y = self.rebase_q(v);
        let denom = lcm_of_denominators(&y);
        let ints: IVec = y.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
        let g = ints.iter().fold(Int::zero(), |acc, c| acc.gcd(c));
        let prim: IVec = ints.iter().map(|c| c / &g).collect();
        Ok(self.unrebase(&prim))
    }

    pub fn is_primitive(&self, v: &[Rat]) -> bool {
        match self.rebase(v) {
            Some(y) => {
                let g = y.iter().fold(Int::zero(), |acc, c| acc.gcd(c));
                g.is_one()
            }
            None => false,
        }
    }

    /// Is a covector (given in standard dual coordinates) integral on N?
    pub fn covector_is_integral(&self, u: &[Rat]) -> bool {
        (0..self.rank).all(|j| {
            let val: Rat = u
                .iter()
                .zip(self.basis.col(j).iter())
                .map(|(a, b)| a * b)
                .sum();
            val.denom().is_one()
        })
    }

    /// Saturation of the sublattice N ∩ span(vectors): a basis of it in
    /// standard coordinates.
    pub fn saturate_span(&self, vectors: &[QVec]) -> Vec<QVec> {
        if vectors.is_empty() {
            return Vec::new();
        }
        // kernel of the map cutting out the span, computed in rebased coords
        let rows: Vec<QVec> = vectors.iter().map(|v| self.rebase_q(v)).collect();
        let m = QMat::from_rows(&rows);
        let span_dim = m.rank();
        if span_dim == 0 {
            return Vec::new();
        }
        // covectors (in rebased dual coordinates) vanishing on the span
        let covectors = m.kernel_basis();
        let basis = self.kernel_sublattice_rebased(&covectors);
        debug_assert_eq!(basis.len(), span_dim);
        basis
    }

    /// Basis of {x in N : <e, x> = 0 for all e}, with the equations given in
    /// standard dual coordinates.
    pub fn saturate_equations(&self, equations: &[QVec]) -> Vec<QVec> {
        // translate the equations to rebased dual coordinates: e(x) for
        // x = basis*y becomes (e*basis)(y)
        let rebased_eqs: Vec<QVec> = equations
            .iter()
            .map(|e| {
                (0..self.rank)
                    .map(|j| {
                        e.iter()
                            .zip(self.basis.col(j).iter())
                            .map(|(a, b)| a * b)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        self.kernel_sublattice_rebased(&rebased_eqs)
    }

    /// Integer kernel of covectors given in rebased dual coordinates.
    fn kernel_sublattice_rebased(&self, covectors: &[QVec]) -> Vec<QVec> {
        let nonzero: Vec<&QVec> = covectors
            .iter()
            .filter(|w| !w.iter().all(|c| c.is_zero()))
            .collect();
        if nonzero.is_empty() {
            return self.basis_columns();
        }
        let mut int_rows: Vec<IVec> = Vec::new();
        for w in nonzero {
            let denom = lcm_of_denominators(w);
            int_rows.push(w.iter().map(|c| c.numer() * (&denom / c.denom())).collect());
        }
        let a = IMat::from_rows(&int_rows);
        let f = snf(&a);
        let r = f.rank();
        let mut basis = Vec::new();
        for j in r..a.cols {
            let col: IVec = (0..a.cols).map(|i| f.v[(i, j)].clone()).collect();
            basis.push(self.unrebase(&col));
        }
        basis
    }

    /// Projection matrix (in standard coordinates) for the quotient of the
    /// sublattice spanned by `ambient_basis` by the saturated sublattice
    /// spanned by `sub_basis`. The image is the standard lattice of rank
    /// `ambient_basis.len() - sub_basis.len()`.
    pub fn sublattice_quotient_map(
        &self,
        ambient_basis: &[QVec],
        sub_basis: &[QVec],
    ) -> QMat {
        let m = ambient_basis.len();
        let s = sub_basis.len();
        assert!(s <= m);
        if m == 0 {
            return QMat::new(0, self.rank, Vec::new());
        }
        let b = QMat::from_cols(ambient_basis); // n x m, full column rank
        // coordinates of x in the ambient basis: solve b*y = x via the
        // pseudo-inverse (b^T b)^-1 b^T, exact on the column space
        let bt = b.transpose();
        let gram = bt.mul(&b);
        let gram_inv = gram.inverse().expect("ambient basis is independent");
        let coords = gram_inv.mul(&bt); // m x n
        if s == 0 {
            return coords;
        }
        let t_cols: Vec<IVec> = sub_basis
            .iter()
            .map(|g| {
                let y = coords.mul_vec(g);
                y.iter()
                    .map(|c| {
                        assert!(c.denom().is_one(), "sub basis must lie in the ambient lattice");
                        c.numer().clone()
                    })
                    .collect()
            })
            .collect();
        let t = IMat::from_rows(&t_cols).transpose(); // m x s
        let f = snf(&t);
        for d in f.diagonal() {
            assert!(d.is_one(), "sublattice must be saturated in the ambient lattice");
        }
        // adapted basis: columns of U^-1; quotient coords: last m-s of U*y
        let uq = f.u.to_qmat();
        let mut rows: Vec<QVec> = Vec::new();
        for i in s..m {
            rows.push(uq.row(i).to_vec());
        }
        QMat::from_rows(&rows).mul(&coords)
    }

    /// Quotient by a saturated sublattice. Returns the quotient lattice as a
    /// standard Z^(n-s) and the projection in standard coordinates.
    pub fn quotient(&self, sub_basis: &[QVec]) -> (Lattice, QMat) {
        let n = self.rank;
        let s = sub_basis.len();
        if s == 0 {
            return (self.clone(), self.basis_inv.clone());
        }
        // sublattice basis in rebased coordinates (integral by saturation)
        let cols: Vec<IVec> = sub_basis
            .iter()
            .map(|v| self.rebase(v).expect("sublattice basis must be lattice points"))
            .collect();
        let t = IMat::from_rows(&cols).transpose(); // n x s
        let f = snf(&t);
        for d in f.diagonal() {
            assert!(d.is_one(), "sublattice must be saturated");
        }
        // t = U^-1 S V^-1: adapted basis of Z^n is U^-1; quotient coordinates
        // are the last n-s entries of U*y.
        let mut proj_rows: Vec<QVec> = Vec::new();
        let uq = f.u.to_qmat();
        for i in s..n {
            proj_rows.push(uq.row(i).to_vec());
        }
        let proj = QMat::from_rows(&proj_rows).mul(&self.basis_inv);
        (Lattice::standard(n - s), proj)
    }
}
