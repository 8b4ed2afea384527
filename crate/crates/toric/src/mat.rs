//! Dense integer and rational matrices, sized for lattice work in rank <= 4.
//!
//! The integer side carries Smith normal form with unimodular transforms;
//! the rational side carries Gaussian elimination (solve, kernel, rank,
//! inverse). Row-major storage, column-vector convention: `a.mul_vec(x)`
//! is A*x.

use crate::arith::{Int, IVec, QVec, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IMat { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        IMat::new(rows, cols, data.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn from_rows(rows: &[IVec]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.iter().cloned());
        }
        IMat { rows: r, cols: c, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::new(n, n, vec![Int::zero(); n * n]);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat::new(rows, cols, vec![Int::zero(); rows * cols])
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Int]) -> IVec {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_qvec(&self, x: &[Rat]) -> QVec {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| Rat::from_integer(a.clone()) * b)
                    .sum()
            })
            .collect()
    }

    pub fn transpose(&self) -> IMat {
        let mut out = IMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_qmat(&self) -> QMat {
        QMat::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|x| Rat::from_integer(x.clone()))
                .collect(),
        )
    }

    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        let d = self.to_qmat().det();
        debug_assert!(d.denom().is_one());
        d.numer().clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form: `u * m * v = s` with `u`, `v` unimodular and `s`
/// diagonal, each diagonal entry nonnegative and dividing the next.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IMat,
    pub s: IMat,
    pub v: IMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<Int> {
        let n = self.s.rows.min(self.s.cols);
        (0..n).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn snf(m: &IMat) -> Snf {
    let mut s = m.clone();
    let mut u = IMat::identity(m.rows);
    let mut v = IMat::identity(m.cols);

    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // pivot: nonzero entry of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows {
            for j in t..s.cols {
                if !s[(i, j)].is_zero()
                    && pivot
                        .map(|(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows(&mut s, &mut u, t, pi);
        swap_cols(&mut s, &mut v, t, pj);

        // clear row and column t by Euclidean steps
        loop {
            let mut clean = true;
            for i in (t + 1)..s.rows {
                if !s[(i, t)].is_zero() {
                    let q = div_round(&s[(i, t)], &s[(t, t)]);
                    row_axpy(&mut s, &mut u, i, t, &-q);
                    if !s[(i, t)].is_zero() {
                        swap_rows(&mut s, &mut u, t, i);
                        clean = false;
                    }
                }
            }
            for j in (t + 1)..s.cols {
                if !s[(t, j)].is_zero() {
                    let q = div_round(&s[(t, j)], &s[(t, t)]);
                    col_axpy(&mut s, &mut v, j, t, &-q);
                    if !s[(t, j)].is_zero() {
                        swap_cols(&mut s, &mut v, t, j);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }

        // enforce divisibility s[t,t] | s[i,j] for the remaining block
        let mut fixed = true;
        'outer: for i in (t + 1)..s.rows {
            for j in (t + 1)..s.cols {
                if !(&s[(i, j)] % &s[(t, t)]).is_zero() {
                    // fold row i into row t and redo this pivot
                    row_axpy(&mut s, &mut u, t, i, &Int::one());
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            t += 1;
        }
    }

    // sign normalization (negating a row of s is a row operation on u)
    for i in 0..n {
        if s[(i, i)].is_negative() {
            for j in 0..s.cols {
                let x = -s[(i, j)].clone();
                s[(i, j)] = x;
            }
            for j in 0..u.cols {
                let x = -u[(i, j)].clone();
                u[(i, j)] = x;
            }
        }
    }

    debug_assert_eq!(u.mul(m).mul(&v), s);
    Snf { u, s, v }
}

fn swap_rows(s: &mut IMat, u: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..s.cols {
        let (x, y) = (s[(a, j)].clone(), s[(b, j)].clone());
        s[(a, j)] = y;
        s[(b, j)] = x;
    }
    for j in 0..u.cols {
        let (x, y) = (u[(a, j)].clone(), u[(b, j)].clone());
        u[(a, j)] = y;
        u[(b, j)] = x;
    }
}

fn swap_cols(s: &mut IMat, v: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..s.rows {
        let (x, y) = (s[(i, a)].clone(), s[(i, b)].clone());
        s[(i, a)] = y;
        s[(i, b)] = x;
    }
    for i in 0..v.rows {
        let (x, y) = (v[(i, a)].clone(), v[(i, b)].clone());
        v[(i, a)] = y;
        v[(i, b)] = x;
    }
}

/// row a += q * row b (also applied to u)
fn row_axpy(s: &mut IMat, u: &mut IMat, a: usize, b: usize, q: &Int) {
    for j in 0..s.cols {
        let add = q * &s[(b, j)];
        s[(a, j)] += add;
    }
    for j in 0..u.cols {
        let add = q * &u[(b, j)];
        u[(a, j)] += add;
    }
}

/// col a += q * col b (also applied to v)
fn col_axpy(s: &mut IMat, v: &mut IMat, a: usize, b: usize, q: &Int) {
    for i in 0..s.rows {
        let add = q * &s[(i, b)];
        s[(i, a)] += add;
    }
    for i in 0..v.rows {
        let add = q * &v[(i, b)];
        v[(i, a)] += add;
    }
}

/// Rounded division keeping |a - q*b| <= |b|/2, which makes the Euclidean
/// steps terminate quickly.
fn div_round(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_rem(b);
    if &(r.abs() * 2) > &b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Solves `a * x = b` over the integers. Returns None when no integral
/// solution exists.
pub fn solve_integral(a: &IMat, b: &[Int]) -> Option<IVec> {
    let f = snf(a);
    let c = f.u.mul_vec(b);
    let diag = f.diagonal();
    let mut y = vec![Int::zero(); a.cols];
    for i in 0..a.rows {
        if i < diag.len() && !diag[i].is_zero() {
            let (q, r) = c[i].div_rem(&diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    Some(f.v.mul_vec(&y))
}

/// Smallest positive k such that `a * x = k * b` has an integral solution,
/// assuming the system is solvable over the rationals.
pub fn integral_scaling(a: &IMat, b: &[Int]) -> Int {
    let f = snf(a);
    let c = f.u.mul_vec(b);
    let diag = f.diagonal();
    let mut k = Int::one();
    for i in 0..diag.len() {
        if diag[i].is_zero() {
            continue;
        }
        let g = diag[i].gcd(&c[i]);
        k = k.lcm(&(&diag[i] / &g));
    }
    k
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols);
        QMat { rows, cols, data }
    }

    pub fn from_rows(rows: &[QVec]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.iter().cloned());
        }
        QMat { rows: r, cols: c, data }
    }

    pub fn from_cols(cols: &[QVec]) -> Self {
        QMat::from_rows(cols).transpose()
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::new(n, n, vec![Rat::zero(); n * n]);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> QVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        QMat::new(self.cols, self.rows, data)
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::new(self.rows, other.cols, vec![Rat::zero(); self.rows * other.cols]);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rat]) -> QVec {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn echelon(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..m.cols {
            if r >= m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, j)].is_zero()) else {
                continue;
            };
            for k in 0..m.cols {
                let (x, y) = (m[(r, k)].clone(), m[(p, k)].clone());
                m[(r, k)] = y;
                m[(p, k)] = x;
            }
            let inv = m[(r, j)].recip();
            for k in 0..m.cols {
                let x = &m[(r, k)] * &inv;
                m[(r, k)] = x;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, j)].is_zero() {
                    let f = m[(i, j)].clone();
                    for k in 0..m.cols {
                        let sub = &f * &m[(r, k)];
                        m[(i, k)] -= sub;
                    }
                }
            }
            pivots.push(j);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// One solution of `self * x = b`, if the system is consistent.
    pub fn solve(&self, b: &[Rat]) -> Option<QVec> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMat::new(
            self.rows,
            self.cols + 1,
            vec![Rat::zero(); self.rows * (self.cols + 1)],
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (e, pivots) = aug.echelon();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &j) in pivots.iter().enumerate() {
            x[j] = e[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the right kernel {x : self * x = 0}.
    pub fn kernel_basis(&self) -> Vec<QVec> {
        let (e, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rat::zero(); self.cols];
                x[f] = Rat::one();
                for (r, &j) in pivots.iter().enumerate() {
                    x[j] = -e[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = Rat::one();
        for j in 0..m.cols {
            let Some(p) = (j..m.rows).find(|&i| !m[(i, j)].is_zero()) else {
                return Rat::zero();
            };
            if p != j {
                det = -det;
                for k in 0..m.cols {
                    let (x, y) = (m[(j, k)].clone(), m[(p, k)].clone());
                    m[(j, k)] = y;
                    m[(p, k)] = x;
                }
            }
            det *= m[(j, j)].clone();
            let inv = m[(j, j)].recip();
            for i in (j + 1)..m.rows {
                if m[(i, j)].is_zero() {
                    continue;
                }
                let f = &m[(i, j)] * &inv;
                for k in j..m.cols {
                    let sub = &f * &m[(j, k)];
                    m[(i, k)] -= sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::new(n, 2 * n, vec![Rat::zero(); n * 2 * n]);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (e, pivots) = aug.echelon();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = QMat::identity(n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = e[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Rank of the stack of two row families.
    pub fn stack_rank(a: &[QVec], b: &[QVec]) -> usize {
        let mut rows: Vec<QVec> = a.to_vec();
        rows.extend(b.iter().cloned());
        if rows.is_empty() {
            return 0;
        }
        QMat::from_rows(&rows).rank()
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ivec, qvec, rat};

    /// Naive SNF oracle: repeated gcd row/column reduction without transform
    /// bookkeeping. Only the diagonal is compared against the real thing.
    fn snf_diagonal_oracle(m: &IMat) -> Vec<Int> {
        let mut a = m.clone();
        let n = a.rows.min(a.cols);
        let mut t = 0;
        while t < n {
            let mut found = false;
            for i in t..a.rows {
                for j in t..a.cols {
                    if !a[(i, j)].is_zero() {
                        found = true;
                    }
                }
            }
            if !found {
                break;
            }
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..a.rows {
                    for j in t..a.cols {
                        if !a[(i, j)].is_zero()
                            && best
                                .map(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                                .unwrap_or(true)
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let (bi, bj) = best.unwrap();
                let mut id_r = IMat::identity(a.rows);
                swap_rows(&mut a, &mut id_r, t, bi);
                let mut id_c = IMat::identity(a.cols);
                swap_cols(&mut a, &mut id_c, t, bj);
                let mut dirty = false;
                for i in (t + 1)..a.rows {
                    if !a[(i, t)].is_zero() {
                        let q = div_round(&a[(i, t)], &a[(t, t)]);
                        let mut id = IMat::identity(a.rows);
                        row_axpy(&mut a, &mut id, i, t, &-q);
                        dirty = dirty || !a[(i, t)].is_zero();
                    }
                }
                for j in (t + 1)..a.cols {
                    if !a[(t, j)].is_zero() {
                        let q = div_round(&a[(t, j)], &a[(t, t)]);
                        let mut id = IMat::identity(a.cols);
                        col_axpy(&mut a, &mut id, j, t, &-q);
                        dirty = dirty || !a[(t, j)].is_zero();
                    }
                }
                let mut divisible = true;
                'fix: for i in (t + 1)..a.rows {
                    for j in (t + 1)..a.cols {
                        if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                            let mut id = IMat::identity(a.rows);
                            row_axpy(&mut a, &mut id, t, i, &Int::one());
                            divisible = false;
                            break 'fix;
                        }
                    }
                }
                if !dirty && divisible {
                    break;
                }
            }
            t += 1;
        }
        (0..n).map(|i| a[(i, i)].abs()).collect()
    }

    #[test]
    fn snf_identity() {
        let m = IMat::identity(3);
        let f = snf(&m);
        assert_eq!(f.s, IMat::identity(3));
    }

    #[test]
    fn snf_already_diagonal() {
        let m = IMat::from_i64(2, 2, &[2, 0, 0, 2]);
        let f = snf(&m);
        assert_eq!(f.diagonal(), ivec(&[2, 2]));
    }

    #[test]
    fn snf_2x2_matches_oracle() {
        let m = IMat::from_i64(2, 2, &[2, 4, 6, 8]);
        let f = snf(&m);
        assert_eq!(f.diagonal(), ivec(&[2, 4]));
        assert_eq!(f.diagonal(), snf_diagonal_oracle(&m));
        assert_eq!(f.u.mul(&m).mul(&f.v), f.s);
        assert!(f.u.is_unimodular());
        assert!(f.v.is_unimodular());
    }

    #[test]
    fn snf_transforms_are_exact_on_a_wide_matrix() {
        let m = IMat::from_i64(2, 3, &[6, 10, 15, 4, 8, 9]);
        let f = snf(&m);
        assert_eq!(f.u.mul(&m).mul(&f.v), f.s);
        assert!(f.u.is_unimodular());
        assert!(f.v.is_unimodular());
        let d = f.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        assert_eq!(d, snf_diagonal_oracle(&m));
    }

    #[test]
    fn integral_solve() {
        let a = IMat::from_i64(2, 2, &[2, 0, 0, 3]);
        assert_eq!(solve_integral(&a, &ivec(&[4, 9])), Some(ivec(&[2, 3])));
        assert_eq!(solve_integral(&a, &ivec(&[1, 0])), None);
        assert_eq!(integral_scaling(&a, &ivec(&[1, 1])), Int::from(6));
    }

    #[test]
    fn qmat_solve_kernel_inverse() {
        let a = QMat::from_rows(&[qvec(&[1, 2]), qvec(&[3, 4])]);
        let x = a.solve(&qvec(&[5, 11])).unwrap();
        assert_eq!(a.mul_vec(&x), qvec(&[5, 11]));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMat::identity(2));
        assert_eq!(a.det(), rat(-2));

        let sing = QMat::from_rows(&[qvec(&[1, 2, 3]), qvec(&[2, 4, 6])]);
        assert_eq!(sing.rank(), 1);
        let ker = sing.kernel_basis();
        assert_eq!(ker.len(), 2);
        for k in &ker {
            assert!(sing.mul_vec(k).iter().all(|v| v.is_zero()));
        }
        assert!(sing.solve(&qvec(&[1, 0])).is_none());
    }
}
