//! The standard symplectic lattice `Z^{2g}` with basis `a1,b1,...,ag,bg`
//! and `ai.bi = +1`.
//!
//! Submodules are stored saturated, as the row Hermite normal form of a
//! basis, so structural equality is submodule equality.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{self, Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticLattice {
    genus: usize,
}

impl SymplecticLattice {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::input("genus must be positive"));
        }
        Ok(SymplecticLattice { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    /// `a_i`, 1-based.
    pub fn a(&self, i: usize) -> LatticeVector {
        LatticeVector::unit(self.rank(), 2 * (i - 1))
    }

    /// `b_i`, 1-based.
    pub fn b(&self, i: usize) -> LatticeVector {
        LatticeVector::unit(self.rank(), 2 * (i - 1) + 1)
    }

    pub fn zero(&self) -> LatticeVector {
        LatticeVector(intmat::zero_row(self.rank()))
    }

    pub fn symp_product(&self, u: &LatticeVector, v: &LatticeVector) -> Result<BigInt> {
        if u.len() != self.rank() || v.len() != self.rank() {
            return Err(Error::input(format!(
                "vector length mismatch: expected {}, got {} and {}",
                self.rank(),
                u.len(),
                v.len()
            )));
        }
        Ok(symp(&u.0, &v.0))
    }

    pub fn whole(&self) -> Submodule {
        Submodule { dim: self.rank(), basis: intmat::identity(self.rank()) }
    }

    pub fn standard_basis(&self) -> SymplecticBasis {
        SymplecticBasis {
            vectors: (0..self.rank()).map(|j| LatticeVector::unit(self.rank(), j)).collect(),
        }
    }
}

/// `u.v = sum_i u_ai v_bi - u_bi v_ai`. Also used verbatim on cohomology
/// value vectors.
pub fn symp(u: &[BigInt], v: &[BigInt]) -> BigInt {
    assert_eq!(u.len(), v.len(), "symplectic product of vectors of different length");
    let mut s = BigInt::zero();
    for i in (0..u.len()).step_by(2) {
        s += &u[i] * &v[i + 1];
        s -= &u[i + 1] * &v[i];
    }
    s
}

/// Coefficient vector of the functional `x -> u.x`.
pub fn j_dual(u: &[BigInt]) -> Row {
    let mut out = intmat::zero_row(u.len());
    for i in (0..u.len()).step_by(2) {
        out[i] = -&u[i + 1];
        out[i + 1] = u[i].clone();
    }
    out
}

/// Inverse of [`j_dual`]: the vector `z` with `z.x = f.x` (ordinary dot) for all `x`.
pub fn j_dual_inverse(f: &[BigInt]) -> Row {
    let mut out = intmat::zero_row(f.len());
    for i in (0..f.len()).step_by(2) {
        out[i] = f[i + 1].clone();
        out[i + 1] = -&f[i];
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Row);

impl LatticeVector {
    pub fn unit(n: usize, j: usize) -> Self {
        LatticeVector(intmat::unit_row(n, j))
    }

    pub fn from_i64s(xs: &[i64]) -> Self {
        LatticeVector(xs.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        intmat::is_zero(&self.0)
    }

    pub fn content(&self) -> BigInt {
        intmat::content(&self.0)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector(intmat::scaled(&self.0, k))
    }

    pub fn symp(&self, other: &LatticeVector) -> BigInt {
        symp(&self.0, &other.0)
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// `a + k (a.c) c`, the homological action of the `k`-th power of a Dehn twist.
pub fn dehn_twist(a: &LatticeVector, c: &LatticeVector, k: &BigInt) -> LatticeVector {
    let m = k * a.symp(c);
    &c.scale(&m) + a
}

/// A saturated submodule of `Z^dim` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Submodule {
    dim: usize,
    basis: Vec<Row>,
}

impl Submodule {
    /// Saturation of the span of `rows`.
    pub fn saturate(rows: &[Row], dim: usize) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::input(format!("row of length {} in ambient rank {dim}", r.len())));
        }
        Ok(Submodule { dim, basis: intmat::saturate(rows, dim) })
    }

    pub fn from_vectors(vs: &[LatticeVector], dim: usize) -> Result<Self> {
        let rows: Vec<Row> = vs.iter().map(|v| v.0.clone()).collect();
        Self::saturate(&rows, dim)
    }

    /// Accepts a basis only if it spans a saturated module of full rank `rows.len()`.
    pub fn from_basis_exact(rows: &[Row], dim: usize) -> Result<Self> {
        let s = Self::saturate(rows, dim)?;
        if s.rank() != rows.len() {
            return Err(Error::input("basis rows are linearly dependent"));
        }
        if intmat::hnf(rows, dim) != s.basis {
            return Err(Error::input("basis does not span a saturated submodule"));
        }
        Ok(s)
    }

    pub fn zero(dim: usize) -> Self {
        Submodule { dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Row] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<LatticeVector> {
        self.basis.iter().cloned().map(LatticeVector).collect()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.dim && intmat::coords_in_hnf(&self.basis, v).is_some()
    }

    /// Coordinates of `v` with respect to the canonical basis.
    pub fn coords_of(&self, v: &[BigInt]) -> Option<Row> {
        intmat::coords_in_hnf(&self.basis, v)
    }

    pub fn contains_module(&self, other: &Submodule) -> bool {
        other.basis.iter().all(|r| self.contains(r))
    }

    /// `{v : v.s = 0 for all s in S}`.
    pub fn orthogonal_complement(&self) -> Submodule {
        perp_of_rows(&self.basis, self.dim)
    }

    pub fn intersect(&self, other: &Submodule) -> Submodule {
        let mut rows = self.orthogonal_complement().basis;
        rows.extend(other.orthogonal_complement().basis);
        perp_of_rows(&rows, self.dim)
    }

    /// Saturation of `S + T`.
    pub fn saturated_sum(&self, other: &Submodule) -> Submodule {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Submodule { dim: self.dim, basis: intmat::saturate(&rows, self.dim) }
    }

    /// `S` intersected with the orthogonal of the given vectors.
    pub fn perp_within(&self, vs: &[Row]) -> Submodule {
        if vs.is_empty() || self.basis.is_empty() {
            return self.clone();
        }
        let m: Vec<Row> =
            self.basis.iter().map(|r| vs.iter().map(|v| symp(r, v)).collect()).collect();
        let ker = intmat::left_kernel(&m, vs.len());
        let rows: Vec<Row> =
            ker.iter().map(|c| intmat::combine(c, &self.basis, self.dim)).collect();
        Submodule { dim: self.dim, basis: intmat::hnf(&rows, self.dim) }
    }

    pub fn gram(&self) -> Vec<Row> {
        self.basis.iter().map(|u| self.basis.iter().map(|v| symp(u, v)).collect()).collect()
    }

    pub fn is_symplectic(&self) -> bool {
        let r = self.rank();
        r.is_multiple_of(2) && (r == 0 || intmat::det(&self.gram()).abs().is_one())
    }

    pub fn is_orthogonal_to(&self, other: &Submodule) -> bool {
        self.basis.iter().all(|u| other.basis.iter().all(|v| symp(u, v).is_zero()))
    }
}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, r) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", LatticeVector(r.clone()))?;
        }
        write!(f, ">")
    }
}

// JSON form: {"rank": r, "basis": [[...], ...]}; rank-0 modules may carry "dim".
#[derive(Serialize, Deserialize)]
struct SubmoduleWire {
    rank: usize,
    #[serde(with = "crate::numfmt::big_matrix")]
    basis: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

impl Serialize for Submodule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dim = if self.basis.is_empty() { Some(self.dim) } else { None };
        SubmoduleWire { rank: self.rank(), basis: self.basis.clone(), dim }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Submodule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = SubmoduleWire::deserialize(d)?;
        if w.rank != w.basis.len() {
            return Err(D::Error::custom(format!(
                "rank {} does not match {} basis rows",
                w.rank,
                w.basis.len()
            )));
        }
        let dim = match (w.basis.first(), w.dim) {
            (Some(r), _) => r.len(),
            (None, Some(d)) => d,
            (None, None) => 0,
        };
        Submodule::from_basis_exact(&w.basis, dim).map_err(D::Error::custom)
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::numfmt::big_vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        crate::numfmt::big_vec::deserialize(d).map(LatticeVector)
    }
}

/// `{v : r.v = 0 for all rows r}`.
pub fn perp_of_rows(rows: &[Row], dim: usize) -> Submodule {
    let duals: Vec<Row> = rows.iter().map(|r| j_dual(r)).collect();
    Submodule { dim, basis: intmat::right_kernel(&duals, dim) }
}

/// Symplectic basis `a1,b1,...` of the whole lattice or of a symplectic submodule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticBasis {
    pub vectors: Vec<LatticeVector>,
}

impl SymplecticBasis {
    pub fn is_valid(&self) -> bool {
        let n = self.vectors.len();
        n.is_multiple_of(2)
            && (0..n).all(|i| {
                (0..n).all(|j| self.vectors[i].symp(&self.vectors[j]) == j_entry(i, j))
            })
    }

    pub fn a(&self, i: usize) -> &LatticeVector {
        &self.vectors[2 * (i - 1)]
    }

    pub fn b(&self, i: usize) -> &LatticeVector {
        &self.vectors[2 * (i - 1) + 1]
    }

    pub fn half_rank(&self) -> usize {
        self.vectors.len() / 2
    }
}

fn j_entry(i: usize, j: usize) -> BigInt {
    if i.is_multiple_of(2) && j == i + 1 {
        BigInt::one()
    } else if i % 2 == 1 && j + 1 == i {
        -BigInt::one()
    } else {
        BigInt::zero()
    }
}

/// Extends `partial` to a symplectic basis of the whole lattice.
pub fn complete_symplectic_basis(
    lattice: &SymplecticLattice,
    partial: &[LatticeVector],
) -> Result<SymplecticBasis> {
    complete_in(&lattice.whole(), partial)
}

/// Extends `partial` to a symplectic basis of the symplectic submodule `u`.
///
/// Partners are found by an extended gcd over the current orthogonal
/// remainder, whose first canonical row seeds each new pair.
pub fn complete_in(u: &Submodule, partial: &[LatticeVector]) -> Result<SymplecticBasis> {
    let dim = u.dim();
    if !u.is_symplectic() {
        return Err(Error::precondition("ambient submodule is not symplectic"));
    }
    for (i, x) in partial.iter().enumerate() {
        if x.len() != dim {
            return Err(Error::input(format!("vector {i} has length {}, expected {dim}", x.len())));
        }
        if !u.contains(&x.0) {
            return Err(Error::precondition(format!("vector {i} lies outside the module")));
        }
        for (j, y) in partial.iter().enumerate() {
            if x.symp(y) != j_entry(i, j) {
                return Err(Error::precondition(format!(
                    "pairing of vectors {i} and {j} is inconsistent with a symplectic basis"
                )));
            }
        }
    }
    if partial.len() > u.rank() {
        return Err(Error::precondition("more vectors than the rank of the module"));
    }

    let mut out: Vec<LatticeVector> = partial.to_vec();
    let full_pairs = partial.len() / 2 * 2;
    let paired: Vec<Row> = partial[..full_pairs].iter().map(|v| v.0.clone()).collect();
    let mut rest = u.perp_within(&paired);

    let mut lone = if partial.len() % 2 == 1 { Some(partial[full_pairs].clone()) } else { None };
    loop {
        let x = match lone.take() {
            Some(x) => {
                if !x.is_primitive() {
                    return Err(Error::precondition(format!("{x} is not primitive")));
                }
                x
            }
            None => match rest.basis().first() {
                Some(r) => {
                    let x = LatticeVector(r.clone());
                    out.push(x.clone());
                    x
                }
                None => break,
            },
        };
        let pairings: Row = rest.basis().iter().map(|r| symp(&x.0, r)).collect();
        let (g, c) = intmat::ext_gcd_vec(&pairings);
        if !g.is_one() {
            return Err(Error::precondition(format!("{x} has no dual partner in the module")));
        }
        let y = LatticeVector(intmat::combine(&c, rest.basis(), dim));
        rest = rest.perp_within(&[x.0.clone(), y.0.clone()]);
        out.push(y);
    }

    let basis = SymplecticBasis { vectors: out };
    if basis.vectors.len() != u.rank() || !basis.is_valid() {
        return Err(Error::internal("basis completion", "output fails the symplectic check"));
    }
    Ok(basis)
}

/// Determinant of the matrix whose rows are the stacked bases.
pub fn stacked_det(mods: &[&Submodule]) -> BigInt {
    let rows: Vec<Row> = mods.iter().flat_map(|m| m.basis().iter().cloned()).collect();
    if rows.is_empty() || rows.len() != rows[0].len() {
        return BigInt::zero();
    }
    intmat::det(&rows)
}
