//! Exact rational scalars and vectors.
//!
//! Everything downstream works over `Rat` (arbitrary-precision, always
//! reduced, positive denominator — `num_rational` maintains both invariants).
//! Vectors are plain `Vec<Rat>` with free-function helpers; sizes here are a
//! handful of coordinates, so there is nothing to gain from a matrix library.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = num_rational::BigRational;
/// Vector in the ambient rational space (standard coordinates).
pub type QVec = Vec<Rat>;
/// Integer vector (rebased lattice coordinates, matrix rows, ...).
pub type IVec = Vec<Int>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn qvec(coords: &[i64]) -> QVec {
    coords.iter().map(|&c| rat(c)).collect()
}

pub fn ivec(coords: &[i64]) -> IVec {
    coords.iter().map(|&c| Int::from(c)).collect()
}

pub fn qvec_from_int(v: &[Int]) -> QVec {
    v.iter().map(|c| Rat::from_integer(c.clone())).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rat], c: &Rat) -> QVec {
    a.iter().map(|x| x * c).collect()
}

pub fn neg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Clears denominators and divides by the content, preserving direction.
/// The result is an integer vector with coprime entries.
pub fn normalize_direction(a: &[Rat]) -> Option<IVec> {
    if is_zero_vec(a) {
        return None;
    }
    let lcm = a
        .iter()
        .fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let ints: IVec = a.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints
        .iter()
        .fold(Int::zero(), |acc, x| acc.gcd(x));
    Some(ints.iter().map(|x| x / &g).collect())
}

/// Same direction up to positive scaling.
pub fn same_ray(a: &[Rat], b: &[Rat]) -> bool {
    match (normalize_direction(a), normalize_direction(b)) {
        (Some(x), Some(y)) => x == y,
        (None, None) => true,
        _ => false,
    }
}

pub fn lcm_of_denominators(a: &[Rat]) -> Int {
    a.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => {
            let n: Int = s.parse().ok()?;
            Some(Rat::from_integer(n))
        }
    }
}

/// Renders as "p" for integers, "p/q" otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_qvec(v: &[Rat]) -> String {
    let inner: Vec<String> = v.iter().map(format_rat).collect();
    format!("({})", inner.join(","))
}

pub fn abs_int(x: &Int) -> Int {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-5", "1/2", "-7/3", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(format_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("abc").is_none());
    }

    #[test]
    fn direction_normalization() {
        let v = vec![ratio(1, 2), ratio(-3, 2), rat(1)];
        assert_eq!(normalize_direction(&v).unwrap(), ivec(&[1, -3, 2]));
        assert!(normalize_direction(&zeros(3)).is_none());
        assert!(same_ray(&qvec(&[2, 4]), &qvec(&[1, 2])));
        assert!(!same_ray(&qvec(&[2, 4]), &qvec(&[-1, -2])));
    }
}
