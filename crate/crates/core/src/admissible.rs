//! `p`-admissible elements and decompositions.
//!
//! A decomposition into pairwise orthogonal symplectic factors is
//! `p`-admissible when `p` is nonzero on every factor. A nonzero `v` is
//! admissible when `p` does not vanish on `v^perp`; exactly those vectors lie
//! in a rank-two factor of some admissible decomposition.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{self, Row};
use crate::periods::{torsion_coordinates, PeriodHom};
use crate::symplattice::{complete_in, j_dual_inverse, stacked_det, LatticeVector, Submodule};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub factors: Vec<Submodule>,
}

impl Decomposition {
    pub fn new(factors: Vec<Submodule>) -> Self {
        Decomposition { factors }
    }

    pub fn dim(&self) -> usize {
        self.factors.first().map_or(0, Submodule::dim)
    }

    /// Structural check: nontrivial symplectic factors, pairwise orthogonal,
    /// summing to the whole lattice.
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.factors.first() else {
            return Err(Error::precondition("decomposition has no factors"));
        };
        let dim = first.dim();
        for (i, f) in self.factors.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::precondition(format!("factor {i} lives in a different lattice")));
            }
            if f.rank() == 0 || !f.is_symplectic() {
                return Err(Error::precondition(format!("factor {i} is not a nontrivial symplectic submodule")));
            }
            for (j, h) in self.factors.iter().enumerate().skip(i + 1) {
                if !f.is_orthogonal_to(h) {
                    return Err(Error::precondition(format!("factors {i} and {j} are not orthogonal")));
                }
            }
        }
        let refs: Vec<&Submodule> = self.factors.iter().collect();
        if !stacked_det(&refs).abs().is_one() {
            return Err(Error::precondition("factors do not sum to the whole lattice"));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

pub fn is_admissible_decomposition(p: &PeriodHom, d: &Decomposition) -> bool {
    d.dim() == p.lattice().rank() && d.is_valid() && d.factors.iter().all(|f| p.is_nonzero_on(f))
}

fn check_element_preconditions(p: &PeriodHom, v: &[BigInt]) -> Result<()> {
    if v.len() != p.lattice().rank() {
        return Err(Error::input("vector length differs from lattice rank"));
    }
    if p.lattice().rank() < 4 {
        return Err(Error::precondition("admissibility of elements needs rank at least 4"));
    }
    if intmat::is_zero(v) {
        return Err(Error::precondition("the zero vector is never admissible"));
    }
    if p.is_zero() {
        return Err(Error::precondition("p is zero"));
    }
    Ok(())
}

/// `p` restricted to `v^perp` is nonzero.
pub fn is_admissible_element(p: &PeriodHom, v: &LatticeVector) -> Result<bool> {
    check_element_preconditions(p, v.coords())?;
    let line = Submodule::saturate(std::slice::from_ref(&v.0), v.len())?;
    Ok(p.is_nonzero_on(&line.orthogonal_complement()))
}

/// Admissibility relative to a symplectic submodule `u` containing `v`.
pub fn is_admissible_in(p: &PeriodHom, u: &Submodule, v: &[BigInt]) -> bool {
    p.is_nonzero_on(&u.perp_within(&[v.to_vec()]))
}

/// The set of non-admissible vectors of `p`.
///
/// `v` is non-admissible iff `p = t * (v . -)` for some value `t`, which
/// pins `v` down to a line when the image is infinite cyclic and to a
/// congruence class around an axis when the image is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonAdmissibleLocus {
    Empty,
    /// Nonzero multiples of `axis`.
    Line { axis: LatticeVector },
    /// Nonzero `v` whose primitive part is `s * axis mod modulus` for a unit `s`.
    Congruence { axis: LatticeVector, modulus: BigInt },
}

impl NonAdmissibleLocus {
    /// The saturated module spanned by the axis (rank 0 or 1).
    pub fn axis_submodule(&self, dim: usize) -> Submodule {
        match self {
            NonAdmissibleLocus::Empty => Submodule::zero(dim),
            NonAdmissibleLocus::Line { axis } | NonAdmissibleLocus::Congruence { axis, .. } => {
                Submodule::saturate(std::slice::from_ref(&axis.0), dim).expect("axis has lattice length")
            }
        }
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        if v.is_zero() {
            return false;
        }
        let v0 = intmat::primitive_part(&v.0);
        match self {
            NonAdmissibleLocus::Empty => false,
            NonAdmissibleLocus::Line { axis } => {
                v0 == axis.0 || v0.iter().zip(&axis.0).all(|(a, b)| *a == -b)
            }
            NonAdmissibleLocus::Congruence { axis, modulus } => {
                let mut xs = axis.0.clone();
                xs.push(modulus.clone());
                let (_, y) = intmat::ext_gcd_vec(&xs);
                // the only candidate unit: s = y . v0 (since y . axis = 1 mod N)
                let s = intmat::dot(&y[..v0.len()], &v0).mod_floor(modulus);
                s.gcd(modulus).is_one()
                    && v0.iter().zip(&axis.0).all(|(a, z)| (a - &s * z).mod_floor(modulus).is_zero())
            }
        }
    }
}

pub fn non_admissible_locus(p: &PeriodHom) -> Result<NonAdmissibleLocus> {
    let n = p.lattice().rank();
    if n < 4 {
        return Err(Error::precondition("admissibility of elements needs rank at least 4"));
    }
    if p.is_zero() {
        return Err(Error::precondition("p is zero"));
    }
    if let Some((modulus, c)) = torsion_coordinates(p.values()) {
        let half = &modulus / 2;
        let sym: Row = c
            .iter()
            .map(|x| {
                let r = x.mod_floor(&modulus);
                if r > half {
                    r - &modulus
                } else {
                    r
                }
            })
            .collect();
        let axis = LatticeVector(intmat::primitive_part(&j_dual_inverse(&sym)));
        return Ok(NonAdmissibleLocus::Congruence { axis, modulus });
    }

    // infinite image: the imaginary parts must be an integer vector times one number
    let embedded: Vec<_> = p.values().iter().map(|v| v.embed()).collect();
    let base = &embedded.iter().find(|(_, im)| !im.is_zero()).expect("infinite image has an imaginary part").1;
    let mut ratios = Vec::with_capacity(n);
    for (_, im) in &embedded {
        match base.rational_ratio(im) {
            Some(r) => ratios.push(r),
            None => return Ok(NonAdmissibleLocus::Empty),
        }
    }
    let den = ratios.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scaled: Row = ratios.iter().map(|r| (r * BigRational::from_integer(den.clone())).to_integer()).collect();
    let u = intmat::primitive_part(&scaled);
    let (_, y) = intmat::ext_gcd_vec(&u);
    let rho: BigRational = y.iter().zip(&embedded).map(|(k, (re, _))| re * BigRational::from_integer(k.clone())).sum();
    let consistent = u
        .iter()
        .zip(&embedded)
        .all(|(k, (re, _))| (&rho * BigRational::from_integer(k.clone()) - re).is_integer());
    if !consistent {
        return Ok(NonAdmissibleLocus::Empty);
    }
    Ok(NonAdmissibleLocus::Line { axis: LatticeVector(j_dual_inverse(&u)) })
}

/// Splits the symplectic module `u` as `W1 + W2` with `v` in the rank-two
/// factor `W1` and `p` nonzero on both factors.
pub fn rank2_envelope_in(p: &PeriodHom, u: &Submodule, v: &[BigInt]) -> Result<(Submodule, Submodule)> {
    if u.rank() < 4 {
        return Err(Error::precondition("envelope needs a module of rank at least 4"));
    }
    if !u.contains(v) {
        return Err(Error::precondition("vector lies outside the module"));
    }
    if !intmat::content(v).is_one() {
        return Err(Error::precondition("vector is not primitive"));
    }
    if !is_admissible_in(p, u, v) {
        return Err(Error::precondition(format!(
            "{} is not admissible: p vanishes on its orthogonal",
            LatticeVector(v.to_vec())
        )));
    }
    let mut basis = complete_in(u, &[LatticeVector(v.to_vec())])?.vectors;
    let h = basis.len() / 2;
    let nz = |x: &LatticeVector| !p.evaluate(x.coords()).is_zero();
    let (a1, b1) = (basis[0].clone(), basis[1].clone());

    let second = if nz(&a1) {
        if basis[2..].iter().any(nz) {
            b1
        } else {
            &b1 - &basis[3]
        }
    } else {
        let j = (1..h)
            .find(|&j| nz(&basis[2 * j]) || nz(&basis[2 * j + 1]))
            .ok_or_else(|| Error::internal("rank2_envelope", "no p-nonzero vector in v^perp"))?;
        if !nz(&basis[2 * j]) {
            let (aj, bj) = (basis[2 * j].clone(), basis[2 * j + 1].clone());
            basis[2 * j] = bj;
            basis[2 * j + 1] = -&aj;
        }
        basis.swap(2, 2 * j);
        basis.swap(3, 2 * j + 1);
        if nz(&b1) {
            b1
        } else {
            &b1 + &basis[2]
        }
    };
    let dim = u.dim();
    let w1 = Submodule::from_vectors(&[a1, second], dim)?;
    let w2 = u.perp_within(w1.basis());
    let ok = w1.rank() == 2
        && w1.is_symplectic()
        && w2.rank() + 2 == u.rank()
        && w2.is_symplectic()
        && w1.contains(v)
        && p.is_nonzero_on(&w1)
        && p.is_nonzero_on(&w2);
    if !ok {
        return Err(Error::internal("rank2_envelope", format!("construction failed for W1 = {w1}")));
    }
    Ok((w1, w2))
}

pub fn rank2_envelope(p: &PeriodHom, v: &LatticeVector) -> Result<Decomposition> {
    check_element_preconditions(p, v.coords())?;
    let (w1, w2) = rank2_envelope_in(p, &p.lattice().whole(), v.coords())?;
    Ok(Decomposition::new(vec![w1, w2]))
}

/// Deterministic sequence of small primitive vectors: unit vectors first,
/// then boxes of growing size.
pub(crate) fn small_primitive_vectors(n: usize, max_box: i64) -> impl Iterator<Item = Row> {
    let units = (0..n).map(move |j| intmat::unit_row(n, j));
    let boxes = (1..=max_box).flat_map(move |b| {
        crate::haupt::box_vectors(n, b)
            .filter(move |v| v.iter().any(|x| x.abs() == b))
            .map(|v| v.into_iter().map(BigInt::from).collect::<Row>())
            .filter(|v: &Row| intmat::content(v).is_one())
    });
    units.chain(boxes)
}

/// A two-factor `p`-admissible decomposition. With `want_degree3_factors`
/// the construction runs against `p mod Z/2`, so that `p` takes at least
/// three values on every factor.
pub fn find_admissible_decomposition(p: &PeriodHom, want_degree3_factors: bool) -> Result<Decomposition> {
    if p.lattice().rank() < 4 {
        return Err(Error::precondition("admissible decompositions need rank at least 4"));
    }
    if p.is_zero() {
        return Err(Error::precondition("p is zero"));
    }
    let target = if want_degree3_factors {
        if !p.degree().at_least(3) {
            return Err(Error::precondition(format!("degree of p is {}, need at least 3", p.degree())));
        }
        p.reduce_half()?
    } else {
        p.clone()
    };
    let n = p.lattice().rank();
    let whole = p.lattice().whole();
    for v in small_primitive_vectors(n, 2) {
        if is_admissible_in(&target, &whole, &v) {
            let (w1, w2) = rank2_envelope_in(&target, &whole, &v)?;
            let d = Decomposition::new(vec![w1, w2]);
            if !is_admissible_decomposition(p, &d) {
                return Err(Error::internal("find_admissible_decomposition", "output is not admissible"));
            }
            return Ok(d);
        }
    }
    Err(Error::internal("find_admissible_decomposition", "no admissible vector among small candidates"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::{AbelianValue, GroupKind};
    use crate::qsqrt2::QSqrt2;
    use crate::numfmt::rat;

    fn lv(xs: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(xs)
    }

    fn module(rows: &[&[i64]]) -> Submodule {
        let rows: Vec<Row> = rows.iter().map(|r| lv(r).0).collect();
        Submodule::saturate(&rows, rows[0].len()).unwrap()
    }

    fn p2(vals: &[(i64, i64)]) -> PeriodHom {
        PeriodHom::rational(vals.len() / 2, vals).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let p = p2(&[(1, 3), (0, 1), (1, 3), (0, 1)]);
        let h1 = module(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let h2 = module(&[&[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert!(is_admissible_decomposition(&p, &Decomposition::new(vec![h1.clone(), h2.clone()])));
        assert!(!is_admissible_decomposition(&p, &Decomposition::new(vec![h1.clone()])));
        let q = p2(&[(1, 3), (0, 1), (0, 1), (0, 1)]);
        assert!(!is_admissible_decomposition(&q, &Decomposition::new(vec![h1, h2])));
    }

    #[test]
    fn element_examples() {
        let p = p2(&[(0, 1), (0, 1), (1, 3), (0, 1)]);
        assert!(is_admissible_element(&p, &lv(&[0, 0, 1, 0])).unwrap());
        assert!(!is_admissible_element(&p, &lv(&[0, 0, 0, 1])).unwrap());
        let q = p2(&[(1, 2), (0, 1), (1, 3), (0, 1)]);
        for v in [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]] {
            assert!(is_admissible_element(&q, &lv(&v)).unwrap());
        }
        assert!(is_admissible_element(&q, &lv(&[0, 0, 0, 0])).is_err());
        let g1 = p2(&[(1, 3), (0, 1)]);
        assert!(is_admissible_element(&g1, &lv(&[1, 0])).is_err());
    }

    #[test]
    fn locus_examples() {
        let p = p2(&[(0, 1), (0, 1), (1, 3), (0, 1)]);
        let na = non_admissible_locus(&p).unwrap();
        assert_eq!(na.axis_submodule(4), module(&[&[0, 0, 0, 1]]));
        // the axis is not the whole story: b2 + 3a1 is also non-admissible
        assert!(na.contains(&lv(&[3, 0, 0, 1])));
        assert!(!is_admissible_element(&p, &lv(&[3, 0, 0, 1])).unwrap());

        // 3b1 + 2b2 kills p(a1) = 1/2, p(a2) = 1/3 on its orthogonal
        let q = p2(&[(1, 2), (0, 1), (1, 3), (0, 1)]);
        let na = non_admissible_locus(&q).unwrap();
        assert_eq!(na.axis_submodule(4), module(&[&[0, 3, 0, 2]]));
        assert!(!is_admissible_element(&q, &lv(&[0, 3, 0, 2])).unwrap());

        let r = p2(&[(1, 3), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(non_admissible_locus(&r).unwrap().axis_submodule(6), module(&[&[0, 1, 0, 0, 0, 0]]));
    }

    #[test]
    fn locus_infinite_image() {
        // p = (1/3 + i) * (z . -) with z = b1 + 2a2
        let z = lv(&[0, 1, 2, 0]);
        let t_re = rat(1, 3);
        let vals: Vec<AbelianValue> = (0..4)
            .map(|j| {
                let k = BigRational::from_integer(crate::symplattice::symp(&z.0, &intmat::unit_row(4, j)));
                AbelianValue::CModZ { re: &t_re * &k, im: QSqrt2::from_rat(k) }.normalized()
            })
            .collect();
        let p = PeriodHom::new(2, GroupKind::CModZ, vals).unwrap();
        let na = non_admissible_locus(&p).unwrap();
        assert!(matches!(na, NonAdmissibleLocus::Line { .. }));
        assert!(na.contains(&z) && na.contains(&z.scale(&BigInt::from(-3))));
        assert!(!is_admissible_element(&p, &z).unwrap());

        let generic = PeriodHom::new(
            2,
            GroupKind::CModZ,
            vec![
                AbelianValue::CModZ { re: rat(0, 1), im: QSqrt2::one() },
                AbelianValue::CModZ { re: rat(0, 1), im: QSqrt2::sqrt2() },
                AbelianValue::rational(rat(1, 2)),
                AbelianValue::rational(rat(0, 1)),
            ],
        )
        .unwrap();
        assert_eq!(non_admissible_locus(&generic).unwrap(), NonAdmissibleLocus::Empty);
    }

    #[test]
    fn envelope_examples() {
        let p = p2(&[(1, 3), (0, 1), (0, 1), (0, 1)]);
        let d = rank2_envelope(&p, &lv(&[1, 0, 0, 0])).unwrap();
        assert_eq!(d.factors[0], module(&[&[1, 0, 0, 0], &[0, 1, 0, -1]]));
        assert!(is_admissible_decomposition(&p, &d));

        let q = p2(&[(0, 1), (0, 1), (1, 3), (0, 1)]);
        let d = rank2_envelope(&q, &lv(&[1, 0, 0, 0])).unwrap();
        assert_eq!(d.factors[0], module(&[&[1, 0, 0, 0], &[0, 1, 1, 0]]));
        assert!(is_admissible_decomposition(&q, &d));

        // a1 is not admissible when only p(b1) is nonzero
        let r = p2(&[(0, 1), (1, 3), (0, 1), (0, 1)]);
        assert!(matches!(rank2_envelope(&r, &lv(&[1, 0, 0, 0])), Err(Error::Precondition(_))));
        let d = rank2_envelope(&r, &lv(&[0, 0, 1, 0])).unwrap();
        assert!(is_admissible_decomposition(&r, &d));
    }

    #[test]
    fn find_examples() {
        let p = p2(&[(1, 3), (0, 1), (1, 5), (0, 1)]);
        let d = find_admissible_decomposition(&p, false).unwrap();
        assert!(is_admissible_decomposition(&p, &d));
        let d3 = find_admissible_decomposition(&p, true).unwrap();
        for f in &d3.factors {
            assert!(p.restrict(f).degree().at_least(3));
        }
        let q = p2(&[(1, 2), (0, 1), (1, 2), (0, 1)]);
        assert!(is_admissible_decomposition(&q, &find_admissible_decomposition(&q, false).unwrap()));
        let r = p2(&[(1, 2), (0, 1), (0, 1), (0, 1)]);
        assert!(matches!(find_admissible_decomposition(&r, true), Err(Error::Precondition(_))));
    }
}
