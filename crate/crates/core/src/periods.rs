//! Period homomorphisms `p : Z^{2g} -> A` given by their values on the
//! standard basis.
//!
//! Every supported target embeds into `C/Z` (with real parts in `Q` and
//! imaginary parts in `Q(sqrt 2)`), and degree computations go through that
//! embedding: `C/(Z/2)` by doubling, `Z/n` by `r -> r/n`, `F2` by `b -> b/2`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haupt::PeriodLift;
use crate::numfmt;
use crate::qsqrt2::QSqrt2;
use crate::symplattice::{LatticeVector, SymplecticLattice, Submodule};

/// Reduces `q` into `[0, m)`.
fn reduce_mod(q: &BigRational, m: &BigRational) -> BigRational {
    q - m * (q / m).floor()
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "group")]
pub enum AbelianValue {
    CModZ {
        #[serde(with = "numfmt::rational")]
        re: BigRational,
        #[serde(default)]
        im: QSqrt2,
    },
    CModHalfZ {
        #[serde(with = "numfmt::rational")]
        re: BigRational,
        #[serde(default)]
        im: QSqrt2,
    },
    Cyclic {
        #[serde(with = "numfmt::big")]
        modulus: BigInt,
        #[serde(with = "numfmt::big")]
        residue: BigInt,
    },
    F2 {
        bit: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKind {
    CModZ,
    CModHalfZ,
    Cyclic(BigInt),
    F2,
}

impl GroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::CModZ => "CModZ",
            GroupKind::CModHalfZ => "CModHalfZ",
            GroupKind::Cyclic(_) => "Cyclic",
            GroupKind::F2 => "F2",
        }
    }
}

/// Cardinality of a subgroup; `Infinite` for non-torsion images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Degree {
    Finite(BigInt),
    Infinite,
}

impl Degree {
    pub fn at_least(&self, n: u32) -> bool {
        match self {
            Degree::Finite(d) => *d >= BigInt::from(n),
            Degree::Infinite => true,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::Infinite => write!(f, "infinity"),
        }
    }
}

impl AbelianValue {
    pub fn zero(kind: &GroupKind) -> Self {
        match kind {
            GroupKind::CModZ => AbelianValue::CModZ { re: BigRational::zero(), im: QSqrt2::zero() },
            GroupKind::CModHalfZ => {
                AbelianValue::CModHalfZ { re: BigRational::zero(), im: QSqrt2::zero() }
            }
            GroupKind::Cyclic(n) => {
                AbelianValue::Cyclic { modulus: n.clone(), residue: BigInt::zero() }
            }
            GroupKind::F2 => AbelianValue::F2 { bit: 0 },
        }
    }

    /// Real rational value mod 1.
    pub fn rational(q: BigRational) -> Self {
        AbelianValue::CModZ { re: q, im: QSqrt2::zero() }.normalized()
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            AbelianValue::CModZ { .. } => GroupKind::CModZ,
            AbelianValue::CModHalfZ { .. } => GroupKind::CModHalfZ,
            AbelianValue::Cyclic { modulus, .. } => GroupKind::Cyclic(modulus.clone()),
            AbelianValue::F2 { .. } => GroupKind::F2,
        }
    }

    pub fn normalized(self) -> Self {
        match self {
            AbelianValue::CModZ { re, im } => {
                AbelianValue::CModZ { re: reduce_mod(&re, &BigRational::one()), im }
            }
            AbelianValue::CModHalfZ { re, im } => {
                AbelianValue::CModHalfZ { re: reduce_mod(&re, &half()), im }
            }
            AbelianValue::Cyclic { modulus, residue } => {
                let residue = residue.mod_floor(&modulus);
                AbelianValue::Cyclic { modulus, residue }
            }
            AbelianValue::F2 { bit } => AbelianValue::F2 { bit: bit & 1 },
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            AbelianValue::Cyclic { modulus, .. } if !modulus.is_positive() => {
                Err(Error::input("cyclic modulus must be positive"))
            }
            AbelianValue::F2 { bit } if *bit > 1 => Err(Error::input("F2 bit must be 0 or 1")),
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self.clone().normalized() {
            AbelianValue::CModZ { re, im } | AbelianValue::CModHalfZ { re, im } => {
                re.is_zero() && im.is_zero()
            }
            AbelianValue::Cyclic { residue, .. } => residue.is_zero(),
            AbelianValue::F2 { bit } => bit == 0,
        }
    }

    /// Sum in the common group; panics on mixed groups (ruled out by `PeriodHom::new`).
    pub fn add(&self, other: &AbelianValue) -> AbelianValue {
        use AbelianValue::*;
        match (self, other) {
            (CModZ { re: r1, im: i1 }, CModZ { re: r2, im: i2 }) => {
                CModZ { re: r1 + r2, im: i1 + i2 }.normalized()
            }
            (CModHalfZ { re: r1, im: i1 }, CModHalfZ { re: r2, im: i2 }) => {
                CModHalfZ { re: r1 + r2, im: i1 + i2 }.normalized()
            }
            (Cyclic { modulus, residue: a }, Cyclic { modulus: m2, residue: b }) if modulus == m2 => {
                Cyclic { modulus: modulus.clone(), residue: a + b }.normalized()
            }
            (F2 { bit: a }, F2 { bit: b }) => F2 { bit: a ^ b },
            _ => panic!("adding values of different groups"),
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> AbelianValue {
        use AbelianValue::*;
        let kq = BigRational::from_integer(k.clone());
        match self {
            CModZ { re, im } => CModZ { re: re * &kq, im: im.scale(&kq) }.normalized(),
            CModHalfZ { re, im } => CModHalfZ { re: re * &kq, im: im.scale(&kq) }.normalized(),
            Cyclic { modulus, residue } => {
                Cyclic { modulus: modulus.clone(), residue: residue * k }.normalized()
            }
            F2 { bit } => F2 { bit: if k.is_odd() { *bit } else { 0 } },
        }
    }

    pub fn neg(&self) -> AbelianValue {
        self.mul_int(&-BigInt::one())
    }

    /// Image under the injective embedding into `C/Z`: `(re mod 1, im)`.
    pub fn embed(&self) -> (BigRational, QSqrt2) {
        let two = BigRational::from_integer(BigInt::from(2));
        let (re, im) = match self {
            AbelianValue::CModZ { re, im } => (re.clone(), im.clone()),
            AbelianValue::CModHalfZ { re, im } => (re * &two, im.scale(&two)),
            AbelianValue::Cyclic { modulus, residue } => {
                (BigRational::new(residue.clone(), modulus.clone()), QSqrt2::zero())
            }
            AbelianValue::F2 { bit } => (BigRational::new(BigInt::from(*bit), BigInt::from(2)), QSqrt2::zero()),
        };
        (reduce_mod(&re, &BigRational::one()), im)
    }

    /// Inverse of [`AbelianValue::embed`] on torsion elements of `Q/Z`.
    pub fn from_embedded(kind: &GroupKind, q: &BigRational) -> Result<AbelianValue> {
        let q = reduce_mod(q, &BigRational::one());
        match kind {
            GroupKind::CModZ => Ok(AbelianValue::CModZ { re: q, im: QSqrt2::zero() }),
            GroupKind::CModHalfZ => Ok(AbelianValue::CModHalfZ { re: q * half(), im: QSqrt2::zero() }
                .normalized()),
            GroupKind::Cyclic(n) => {
                let r = &q * BigRational::from_integer(n.clone());
                if !r.is_integer() {
                    return Err(Error::precondition("value outside Z/n"));
                }
                Ok(AbelianValue::Cyclic { modulus: n.clone(), residue: r.to_integer() })
            }
            GroupKind::F2 => {
                let r = &q * BigRational::from_integer(BigInt::from(2));
                if !r.is_integer() {
                    return Err(Error::precondition("value outside F2"));
                }
                Ok(AbelianValue::F2 { bit: if r.is_zero() { 0 } else { 1 } })
            }
        }
    }
}

impl fmt::Display for AbelianValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbelianValue::CModZ { re, im } | AbelianValue::CModHalfZ { re, im } => {
                write!(f, "{}", numfmt::rat_to_string(re))?;
                if !im.is_zero() {
                    write!(f, " + ({im})i")?;
                }
                Ok(())
            }
            AbelianValue::Cyclic { modulus, residue } => write!(f, "{residue} mod {modulus}"),
            AbelianValue::F2 { bit } => write!(f, "{bit}"),
        }
    }
}

/// Order of the subgroup generated by `values`.
pub fn degree_of(values: &[AbelianValue]) -> Degree {
    let mut lcm = BigInt::one();
    for v in values {
        let (re, im) = v.embed();
        if !im.is_zero() {
            return Degree::Infinite;
        }
        lcm = lcm.lcm(re.denom());
    }
    Degree::Finite(lcm)
}

/// Torsion image of order `n` written as `p(e_j) = c_j / n` in `Q/Z`.
pub fn torsion_coordinates(values: &[AbelianValue]) -> Option<(BigInt, Vec<BigInt>)> {
    let Degree::Finite(n) = degree_of(values) else { return None };
    let nq = BigRational::from_integer(n.clone());
    let cs = values.iter().map(|v| (v.embed().0 * &nq).to_integer()).collect();
    Some((n, cs))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodHom {
    lattice: SymplecticLattice,
    group: GroupKind,
    values: Vec<AbelianValue>,
}

impl PeriodHom {
    pub fn new(genus: usize, group: GroupKind, values: Vec<AbelianValue>) -> Result<Self> {
        let lattice = SymplecticLattice::new(genus)?;
        if values.len() != lattice.rank() {
            return Err(Error::input(format!(
                "expected {} values for genus {genus}, got {}",
                lattice.rank(),
                values.len()
            )));
        }
        if let GroupKind::Cyclic(n) = &group {
            if !n.is_positive() {
                return Err(Error::input("cyclic modulus must be positive"));
            }
        }
        for (j, v) in values.iter().enumerate() {
            v.validate()?;
            if v.kind() != group {
                return Err(Error::input(format!(
                    "value {j} lies in {} but the homomorphism targets {}",
                    v.kind().name(),
                    group.name()
                )));
            }
        }
        let values = values.into_iter().map(AbelianValue::normalized).collect();
        Ok(PeriodHom { lattice, group, values })
    }

    /// Real rational values mod 1, given as `(numerator, denominator)` pairs.
    pub fn rational(genus: usize, values: &[(i64, i64)]) -> Result<Self> {
        let vals = values
            .iter()
            .map(|&(n, d)| {
                if d == 0 {
                    Err(Error::input("zero denominator"))
                } else {
                    Ok(AbelianValue::rational(numfmt::rat(n, d)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(genus, GroupKind::CModZ, vals)
    }

    pub fn lattice(&self) -> &SymplecticLattice {
        &self.lattice
    }

    pub fn genus(&self) -> usize {
        self.lattice.genus()
    }

    pub fn group(&self) -> &GroupKind {
        &self.group
    }

    pub fn values(&self) -> &[AbelianValue] {
        &self.values
    }

    pub fn evaluate(&self, v: &[BigInt]) -> AbelianValue {
        assert_eq!(v.len(), self.values.len(), "vector length differs from lattice rank");
        let mut acc = AbelianValue::zero(&self.group);
        for (c, val) in v.iter().zip(&self.values) {
            if !c.is_zero() {
                acc = acc.add(&val.mul_int(c));
            }
        }
        acc
    }

    pub fn evaluate_vector(&self, v: &LatticeVector) -> Result<AbelianValue> {
        if v.len() != self.values.len() {
            return Err(Error::input("vector length differs from lattice rank"));
        }
        Ok(self.evaluate(v.coords()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(AbelianValue::is_zero)
    }

    pub fn degree(&self) -> Degree {
        degree_of(&self.values)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.embed().1.is_zero())
    }

    /// Composition with `C/Z -> C/(Z/2)`.
    pub fn reduce_half(&self) -> Result<PeriodHom> {
        if self.group != GroupKind::CModZ {
            return Err(Error::input(format!("reduce_half needs a CModZ period, got {}", self.group.name())));
        }
        let values = self
            .values
            .iter()
            .map(|v| match v {
                AbelianValue::CModZ { re, im } => {
                    AbelianValue::CModHalfZ { re: re.clone(), im: im.clone() }.normalized()
                }
                _ => unreachable!(),
            })
            .collect();
        Ok(PeriodHom { lattice: self.lattice, group: GroupKind::CModHalfZ, values })
    }

    pub fn restrict(&self, s: &Submodule) -> Restriction {
        Restriction {
            module: s.clone(),
            values: s.basis().iter().map(|r| self.evaluate(r)).collect(),
        }
    }

    pub fn is_nonzero_on(&self, s: &Submodule) -> bool {
        s.basis().iter().any(|r| !self.evaluate(r).is_zero())
    }

    /// `u.v` of the lift reduced modulo the positive generator of the
    /// imaginary image.
    pub fn deg_alpha(&self, lift: &PeriodLift) -> Result<AlphaResidue> {
        if self.group != GroupKind::CModZ {
            return Err(Error::input("deg_alpha needs a CModZ period"));
        }
        if lift.values.len() != self.values.len() {
            return Err(Error::input("lift and period have different ranks"));
        }
        for (j, (l, v)) in lift.values.iter().zip(&self.values).enumerate() {
            let AbelianValue::CModZ { re, im } = v else { unreachable!() };
            let diff = &l.re - &QSqrt2::from_rat(re.clone());
            if !diff.is_rational() || !diff.rat.is_integer() || l.im != *im {
                return Err(Error::precondition(format!("lift does not reduce to p on basis vector {j}")));
            }
        }
        let ims: Vec<QSqrt2> = lift.values.iter().map(|z| z.im.clone()).collect();
        let alpha = cyclic_generator(&ims)?;
        let x = lift.symplectic_volume();
        let k = (&x / &alpha).floor();
        let residue = &x - &alpha.scale(&BigRational::from_integer(k));
        Ok(AlphaResidue { alpha, residue })
    }
}

/// Positive generator of the subgroup of `R` generated by `xs`, which must be
/// nonzero and discrete.
fn cyclic_generator(xs: &[QSqrt2]) -> Result<QSqrt2> {
    let Some(base) = xs.iter().find(|x| !x.is_zero()) else {
        return Err(Error::precondition("imaginary image is zero (real-valued period)"));
    };
    let mut g = BigRational::zero();
    for x in xs {
        let r = base.rational_ratio(x).ok_or_else(|| {
            Error::precondition("imaginary image is not discrete (incommensurable generators)")
        })?;
        g = rat_gcd(&g, &r);
    }
    Ok(base.scale(&g).abs())
}

fn rat_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    BigRational::new(num, a.denom() * b.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResidue {
    pub alpha: QSqrt2,
    pub residue: QSqrt2,
}

/// `p` restricted to a submodule, on its canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub module: Submodule,
    pub values: Vec<AbelianValue>,
}

impl Restriction {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(AbelianValue::is_zero)
    }

    pub fn degree(&self) -> Degree {
        degree_of(&self.values)
    }

    /// Evaluates on an element given by its coordinates in the canonical basis.
    pub fn evaluate_coords(&self, coords: &[BigInt]) -> AbelianValue {
        let mut acc = AbelianValue::zero(&self.values[0].kind());
        for (c, v) in coords.iter().zip(&self.values) {
            acc = acc.add(&v.mul_int(c));
        }
        acc
    }
}

// JSON form: {"genus":g,"group":name,"modulus"?:n,"values":[...]}
#[derive(Serialize, Deserialize)]
struct PeriodHomWire {
    genus: usize,
    group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<String>,
    values: Vec<AbelianValue>,
}

impl Serialize for PeriodHom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let modulus = match &self.group {
            GroupKind::Cyclic(n) => Some(n.to_string()),
            _ => None,
        };
        PeriodHomWire {
            genus: self.genus(),
            group: self.group.name().to_string(),
            modulus,
            values: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodHom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PeriodHomWire::deserialize(d)?;
        let group = match w.group.as_str() {
            "CModZ" => GroupKind::CModZ,
            "CModHalfZ" => GroupKind::CModHalfZ,
            "F2" => GroupKind::F2,
            "Cyclic" => {
                let m = w.modulus.as_deref().ok_or_else(|| D::Error::custom("Cyclic group needs a modulus"))?;
                GroupKind::Cyclic(numfmt::parse_bigint(m).map_err(D::Error::custom)?)
            }
            other => return Err(D::Error::custom(format!("unknown group {other:?}"))),
        };
        PeriodHom::new(w.genus, group, w.values).map_err(D::Error::custom)
    }
}

/// Symplectic product of two value vectors, `sum u(a_i)v(b_i) - u(b_i)v(a_i)`.
pub fn cohomology_product(u: &[QSqrt2], v: &[QSqrt2]) -> QSqrt2 {
    let mut s = QSqrt2::zero();
    for i in (0..u.len()).step_by(2) {
        s = s + &u[i] * &v[i + 1] - &u[i + 1] * &v[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfmt::rat;
    use crate::qsqrt2::ComplexQ2;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn evaluation_examples() {
        let p = PeriodHom::rational(2, &[(1, 3), (0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(p.evaluate(&v(&[3, 0, 0, 0])).is_zero());
        assert!(p.evaluate(&v(&[0, 0, 0, 0])).is_zero());
        let q = PeriodHom::rational(2, &[(1, 2), (0, 1), (1, 3), (0, 1)]).unwrap();
        assert_eq!(q.evaluate(&v(&[1, 0, 1, 0])), AbelianValue::rational(rat(5, 6)));
    }

    /// Brute-force closure of the generated subgroup of `Q/Z`.
    fn closure_size(values: &[BigRational]) -> usize {
        let mut set = std::collections::BTreeSet::new();
        set.insert(BigRational::zero());
        loop {
            let mut next = set.clone();
            for x in &set {
                for g in values {
                    next.insert(reduce_mod(&(x + g), &BigRational::one()));
                }
            }
            if next.len() == set.len() {
                return set.len();
            }
            set = next;
        }
    }

    #[test]
    fn degree_examples() {
        let zero = PeriodHom::rational(2, &[(0, 1); 4]).unwrap();
        assert_eq!(zero.degree(), Degree::Finite(BigInt::one()));
        let p = PeriodHom::rational(2, &[(1, 3), (0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(p.degree(), Degree::Finite(BigInt::from(3)));
        let q = PeriodHom::rational(2, &[(1, 2), (0, 1), (1, 3), (0, 1)]).unwrap();
        assert_eq!(q.degree(), Degree::Finite(BigInt::from(6)));
        assert_eq!(closure_size(&[rat(1, 2), rat(1, 3)]), 6);
        let inf = PeriodHom::new(
            1,
            GroupKind::CModZ,
            vec![
                AbelianValue::CModZ { re: rat(0, 1), im: QSqrt2::one() },
                AbelianValue::rational(rat(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(inf.degree(), Degree::Infinite);
    }

    #[test]
    fn degree_matches_closure_on_small_denominators() {
        for a in 1..7i64 {
            for b in 1..7i64 {
                let vals = [rat(1, a), rat(1, b), rat(a - 1, a * b)];
                let p = PeriodHom::rational(
                    2,
                    &[(1, a), (1, b), (a - 1, a * b), (0, 1)],
                )
                .unwrap();
                assert_eq!(p.degree(), Degree::Finite(BigInt::from(closure_size(&vals))));
            }
        }
    }

    #[test]
    fn half_reduction_examples() {
        let p = PeriodHom::rational(2, &[(1, 2), (0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(p.reduce_half().unwrap().is_zero());
        let q = PeriodHom::rational(2, &[(1, 3), (0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(!q.reduce_half().unwrap().is_zero());
        let r = PeriodHom::rational(2, &[(1, 2), (0, 1), (0, 1), (1, 2)]).unwrap();
        assert!(r.reduce_half().unwrap().is_zero());
        assert_eq!(r.degree(), Degree::Finite(BigInt::from(2)));
        assert!(r.reduce_half().unwrap().reduce_half().is_err());
    }

    #[test]
    fn restriction_examples() {
        let p = PeriodHom::rational(2, &[(1, 3), (0, 1), (0, 1), (0, 1)]).unwrap();
        let h2 = Submodule::saturate(&[v(&[0, 0, 1, 0]), v(&[0, 0, 0, 1])], 4).unwrap();
        assert!(p.restrict(&h2).is_zero());
        let h1 = Submodule::saturate(&[v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])], 4).unwrap();
        assert_eq!(p.restrict(&h1).degree(), Degree::Finite(BigInt::from(3)));
        let whole = p.lattice().whole();
        assert_eq!(p.restrict(&whole).values, p.values());

        let q = PeriodHom::rational(2, &[(1, 2), (0, 1), (1, 2), (0, 1)]).unwrap();
        let s = Submodule::saturate(&[v(&[1, 0, 1, 0]), v(&[0, 0, 0, 1])], 4).unwrap();
        let r = q.restrict(&s);
        let c = s.coords_of(&v(&[1, 0, 1, 0])).unwrap();
        assert!(r.evaluate_coords(&c).is_zero());
    }

    fn lift(vals: &[((i64, i64), (i64, i64))]) -> PeriodLift {
        PeriodLift::new(
            vals.iter()
                .map(|&(re, im)| {
                    ComplexQ2::new(QSqrt2::from_rat(rat(re.0, re.1)), QSqrt2::from_rat(rat(im.0, im.1)))
                })
                .collect(),
        )
    }

    #[test]
    fn deg_alpha_examples() {
        let p = PeriodHom::new(
            1,
            GroupKind::CModZ,
            vec![
                AbelianValue::CModZ { re: rat(0, 1), im: QSqrt2::one() },
                AbelianValue::rational(rat(1, 2)),
            ],
        )
        .unwrap();
        let l = lift(&[((0, 1), (1, 1)), ((1, 2), (0, 1))]);
        // u = (0, 1/2), v = (1, 0): u.v = 0*0 - (1/2)*1 = -1/2
        let r = p.deg_alpha(&l).unwrap();
        assert_eq!(r.alpha, QSqrt2::one());
        assert_eq!(r.residue, QSqrt2::from_rat(rat(1, 2)));
        let shifted = lift(&[((1, 1), (1, 1)), ((1, 2), (0, 1))]);
        assert_eq!(p.deg_alpha(&shifted).unwrap(), r);

        let real = PeriodHom::rational(1, &[(1, 3), (0, 1)]).unwrap();
        let l = lift(&[((1, 3), (0, 1)), ((0, 1), (0, 1))]);
        assert!(matches!(real.deg_alpha(&l), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip() {
        let p = PeriodHom::rational(2, &[(1, 3), (0, 1), (2, 5), (0, 1)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: PeriodHom = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let raw = r#"{"genus":1,"group":"Cyclic","modulus":"5","values":[
            {"group":"Cyclic","modulus":"5","residue":"7"},{"group":"Cyclic","modulus":"5","residue":"0"}]}"#;
        let c: PeriodHom = serde_json::from_str(raw).unwrap();
        assert_eq!(c.degree(), Degree::Finite(BigInt::from(5)));
        let bad = r#"{"genus":1,"group":"F2","values":[{"group":"F2","bit":1}]}"#;
        assert!(serde_json::from_str::<PeriodHom>(bad).is_err());
    }
}
