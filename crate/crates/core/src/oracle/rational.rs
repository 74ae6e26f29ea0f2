//! Exact rational linear algebra for the oracle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Continued-fraction rounding of `v` to the simplest rational within `tol * max(1, |v|)`.
pub fn rationalize(v: f64, tol: f64) -> Q {
    assert!(v.is_finite(), "cannot rationalize {v}");
    if v.fract() == 0.0 && v.abs() < 9e15 {
        return q_int(v as i64);
    }
    let target = tol * v.abs().max(1.0);
    let sign = if v < 0.0 { -1 } else { 1 };
    let a = v.abs();
    // Convergents h/k.
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = a;
    for _ in 0..64 {
        let ai = rest.floor();
        let ai_big = BigInt::from(ai as u64);
        let h2 = &ai_big * &h1 + &h0;
        let k2 = &ai_big * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = h1.to_f64().unwrap_or(f64::INFINITY) / k1.to_f64().unwrap_or(1.0);
        let frac = rest - ai;
        if (approx - a).abs() <= target || frac < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
        if !rest.is_finite() {
            break;
        }
    }
    Q::new(BigInt::from(sign) * h1, k1)
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn mat_vec(m: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    m.iter().map(|r| dot(r, x)).collect()
}

pub fn one_norm(v: &[Q]) -> Q {
    v.iter().fold(Q::zero(), |acc, x| acc + x.abs())
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..m[i].len() {
                    let sub = &f * &m[r][k];
                    m[i][k] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>], cols: usize) -> usize {
    let mut w = m.to_vec();
    rref(&mut w, cols).len()
}

/// Basis of the right kernel of `m` (`cols` columns).
pub fn kernel(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

/// Unique solution of `m x = rhs` when `m` has full column rank and the system is consistent.
pub fn solve_unique(m: &[Vec<Q>], rhs: &[Q], cols: usize) -> Option<Vec<Q>> {
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, cols + 1);
    if pivots.len() != cols || pivots.contains(&cols) {
        return None;
    }
    Some((0..cols).map(|r| aug[r][cols].clone()).collect())
}

/// Scales a nonzero rational vector to coprime integers, keeping its direction.
pub fn to_coprime_integers(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Q::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn int_to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}
