//! Exact rational linear feasibility via two-phase simplex with Bland's rule.
//!
//! Only feasibility is needed here: ample certificates are searched as
//! solutions of `<a_i, x> >= b_i` with free variables, strictness handled by
//! normalizing the right-hand side to 1 (everything in sight is a cone, so
//! scaling is free).

use crate::arith::{QVec, Rat};
use num_traits::{One, Signed, Zero};

/// Finds x with `<a, x> >= b` for every (a, b), or None when infeasible.
pub fn find_feasible(dim: usize, constraints: &[(QVec, Rat)]) -> Option<QVec> {
    let m = constraints.len();
    if m == 0 {
        return Some(vec![Rat::zero(); dim]);
    }
    // variables: x = p - q with p, q >= 0 (2*dim), slack s >= 0 (m),
    // artificial t >= 0 (m); rows: a.p - a.q - s + t = b with b >= 0.
    let nvars = 2 * dim + m + m;
    let mut rows: Vec<QVec> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for (i, (a, b)) in constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); nvars];
        let flip = b.is_negative();
        let sign = if flip { -Rat::one() } else { Rat::one() };
        for j in 0..dim {
            row[j] = &a[j] * &sign;
            row[dim + j] = -&a[j] * &sign;
        }
        row[2 * dim + i] = -&sign * Rat::one();
        row[2 * dim + m + i] = Rat::one();
        rows.push(row);
        rhs.push(if flip { -b.clone() } else { b.clone() });
    }
    // phase 1: minimize the sum of artificials
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * dim + m + i).collect();
    let mut tableau = rows;
    let mut b = rhs;

    // reduced cost for minimizing sum of artificials: c_j - sum over basic
    // artificial rows of coefficient
    loop {
        // compute reduced costs: cost of artificials is 1, others 0
        let mut entering: Option<usize> = None;
        for j in 0..nvars {
            if basis.contains(&j) {
                continue;
            }
            let cj = if j >= 2 * dim + m { Rat::one() } else { Rat::zero() };
            let mut reduced = cj;
            for (r, &bv) in basis.iter().enumerate() {
                if bv >= 2 * dim + m {
                    reduced -= tableau[r][j].clone();
                }
            }
            if reduced.is_negative() {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(e) = entering else { break };
        // ratio test, Bland tie-break by smallest basis index
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for r in 0..m {
            if tableau[r][e].is_positive() {
                let ratio = &b[r] / &tableau[r][e];
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        ratio < *cur || (ratio == *cur && basis[r] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
        }
        let Some(l) = leave else {
            return None; // unbounded phase-1 cannot happen; defensive
        };
        pivot(&mut tableau, &mut b, &mut basis, l, e);
    }

    // optimum of phase 1: sum of artificial basic values
    let infeasibility: Rat = basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= 2 * dim + m)
        .map(|(r, _)| b[r].clone())
        .sum();
    if !infeasibility.is_zero() {
        return None;
    }
    let mut x = vec![Rat::zero(); dim];
    for (r, &bv) in basis.iter().enumerate() {
        if bv < dim {
            x[bv] += b[r].clone();
        } else if bv < 2 * dim {
            x[bv - dim] -= b[r].clone();
        }
    }
    debug_assert!(constraints
        .iter()
        .all(|(a, bb)| crate::arith::dot(a, &x) >= *bb));
    Some(x)
}

fn pivot(tableau: &mut [QVec], b: &mut [Rat], basis: &mut [usize], l: usize, e: usize) {
    let piv = tableau[l][e].clone();
    for v in tableau[l].iter_mut() {
        *v /= piv.clone();
    }
    b[l] /= piv;
    for r in 0..tableau.len() {
        if r == l || tableau[r][e].is_zero() {
            continue;
        }
        let f = tableau[r][e].clone();
        for j in 0..tableau[r].len() {
            let sub = &f * &tableau[l][j];
            tableau[r][j] -= sub;
        }
        let sub = &f * &b[l];
        b[r] -= sub;
    }
    basis[l] = e;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{dot, qvec, rat};

    #[test]
    fn feasible_system() {
        // x >= 1, -x >= -3, y - x >= 0
        let cs = vec![
            (qvec(&[1, 0]), rat(1)),
            (qvec(&[-1, 0]), rat(-3)),
            (qvec(&[-1, 1]), rat(0)),
        ];
        let x = find_feasible(2, &cs).unwrap();
        for (a, b) in &cs {
            assert!(dot(a, &x) >= *b);
        }
    }

    #[test]
    fn infeasible_system() {
        let cs = vec![(qvec(&[1]), rat(1)), (qvec(&[-1]), rat(0))];
        assert!(find_feasible(1, &cs).is_none());
    }

    #[test]
    fn strictly_convex_support_on_p1() {
        // height function on the fan of the projective line:
        // d_+ + d_- >= 1 is the wall inequality for ampleness
        let cs = vec![(qvec(&[1, 1]), rat(1))];
        let x = find_feasible(2, &cs).unwrap();
        assert!(dot(&qvec(&[1, 1]), &x) >= rat(1));
    }
}
