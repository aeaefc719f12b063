//! Integer row reduction over `BigInt`.
//!
//! Matrices are plain `Vec<Row>` with an explicit column count so that empty
//! matrices still know their width.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Row = Vec<BigInt>;

pub fn zero_row(n: usize) -> Row {
    vec![BigInt::zero(); n]
}

pub fn unit_row(n: usize, i: usize) -> Row {
    let mut r = zero_row(n);
    r[i] = BigInt::one();
    r
}

pub fn identity(n: usize) -> Vec<Row> {
    (0..n).map(|i| unit_row(n, i)).collect()
}

pub fn is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn dot(u: &[BigInt], v: &[BigInt]) -> BigInt {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// gcd of all entries, zero for the zero vector.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn add_scaled(dst: &mut [BigInt], src: &[BigInt], k: &BigInt) {
    if k.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += k * s;
    }
}

pub fn scaled(v: &[BigInt], k: &BigInt) -> Row {
    v.iter().map(|x| x * k).collect()
}

pub fn combine(coeffs: &[BigInt], rows: &[Row], ncols: usize) -> Row {
    let mut out = zero_row(ncols);
    for (c, r) in coeffs.iter().zip(rows) {
        add_scaled(&mut out, r, c);
    }
    out
}

/// Extended gcd of a list: returns `(g, c)` with `sum c_i x_i = g >= 0`.
pub fn ext_gcd_vec(xs: &[BigInt]) -> (BigInt, Row) {
    let mut g = BigInt::zero();
    let mut coeffs = zero_row(xs.len());
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let e = g.extended_gcd(x);
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in coeffs.iter_mut() {
            *c = -&*c;
        }
    }
    (g, coeffs)
}

struct Echelon {
    h: Vec<Row>,
    u: Vec<Row>,
    rank: usize,
    pivots: Vec<usize>,
    det_sign: i8,
}

/// Hermite reduction with a unimodular transform `u` so that `u * m = h`.
fn echelon(m: &[Row], ncols: usize, track: bool) -> Echelon {
    let nrows = m.len();
    let mut h: Vec<Row> = m.to_vec();
    let mut u = if track { identity(nrows) } else { Vec::new() };
    let mut sign = 1i8;
    let mut pr = 0usize;
    let mut pivots = Vec::new();

    for col in 0..ncols {
        if pr == nrows {
            break;
        }
        loop {
            let best = (pr..nrows)
                .filter(|&i| !h[i][col].is_zero())
                .min_by(|&a, &b| h[a][col].abs().cmp(&h[b][col].abs()));
            let Some(best) = best else { break };
            if best != pr {
                h.swap(best, pr);
                if track {
                    u.swap(best, pr);
                }
                sign = -sign;
            }
            let mut done = true;
            for i in pr + 1..nrows {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = -h[i][col].div_floor(&h[pr][col]);
                let (top, rest) = h.split_at_mut(i);
                add_scaled(&mut rest[0], &top[pr], &q);
                if track {
                    let (top, rest) = u.split_at_mut(i);
                    add_scaled(&mut rest[0], &top[pr], &q);
                }
                if !h[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pr][col].is_zero() {
            continue;
        }
        if h[pr][col].is_negative() {
            for x in h[pr].iter_mut() {
                *x = -&*x;
            }
            if track {
                for x in u[pr].iter_mut() {
                    *x = -&*x;
                }
            }
            sign = -sign;
        }
        for i in 0..pr {
            let q = -h[i][col].div_floor(&h[pr][col]);
            if q.is_zero() {
                continue;
            }
            let (top, rest) = h.split_at_mut(pr);
            add_scaled(&mut top[i], &rest[0], &q);
            if track {
                let (top, rest) = u.split_at_mut(pr);
                add_scaled(&mut top[i], &rest[0], &q);
            }
        }
        pivots.push(col);
        pr += 1;
    }
    Echelon { h, u, rank: pr, pivots, det_sign: sign }
}

/// Row Hermite normal form of the lattice spanned by `rows`, zero rows dropped.
/// Pivots are positive and entries above a pivot lie in `[0, pivot)`.
pub fn hnf(rows: &[Row], ncols: usize) -> Vec<Row> {
    let mut e = echelon(rows, ncols, false);
    e.h.truncate(e.rank);
    e.h
}

/// Column indices of the pivots of an HNF basis.
pub fn pivot_columns(basis: &[Row]) -> Vec<usize> {
    basis
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("zero row in HNF basis"))
        .collect()
}

/// Basis (in HNF) of `{x : x^T m = 0}`.
pub fn left_kernel(m: &[Row], ncols: usize) -> Vec<Row> {
    let e = echelon(m, ncols, true);
    let ker: Vec<Row> = e.u[e.rank..].to_vec();
    hnf(&ker, m.len())
}

pub fn transpose(m: &[Row], ncols: usize) -> Vec<Row> {
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Basis (in HNF) of `{y : m y = 0}`.
pub fn right_kernel(m: &[Row], ncols: usize) -> Vec<Row> {
    left_kernel(&transpose(m, ncols), m.len())
}

/// Smallest saturated lattice containing the row span.
pub fn saturate(rows: &[Row], ncols: usize) -> Vec<Row> {
    let k = right_kernel(rows, ncols);
    right_kernel(&k, ncols)
}

pub fn rank(rows: &[Row], ncols: usize) -> usize {
    echelon(rows, ncols, false).rank
}

pub fn det(m: &[Row]) -> BigInt {
    let n = m.len();
    let e = echelon(m, n, false);
    if e.rank < n {
        return BigInt::zero();
    }
    let mut d: BigInt = (0..n).map(|i| e.h[i][e.pivots[i]].clone()).product();
    if e.det_sign < 0 {
        d = -d;
    }
    d
}

/// Coordinates of `v` in an HNF basis, or `None` if `v` is outside its span.
pub fn coords_in_hnf(basis: &[Row], v: &[BigInt]) -> Option<Row> {
    let pivots = pivot_columns(basis);
    let mut rest = v.to_vec();
    let mut coeffs = Vec::with_capacity(basis.len());
    for (row, &p) in basis.iter().zip(&pivots) {
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        add_scaled(&mut rest, row, &-&q);
        coeffs.push(q);
    }
    if is_zero(&rest) {
        Some(coeffs)
    } else {
        None
    }
}

pub fn primitive_part(v: &[BigInt]) -> Row {
    let c = content(v);
    if c.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &c).collect()
}
