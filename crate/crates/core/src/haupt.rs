//! Haupt realizability of lifts `P = u + iv` of a period `p mod Z`.
//!
//! A lift is realized by a holomorphic form iff `u.v > 0` and, when the image
//! of `P` is a lattice in `C`, `u.v` strictly exceeds its covolume.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat;
use crate::periods::{cohomology_product, AbelianValue, GroupKind, PeriodHom};
use crate::qsqrt2::{ComplexQ2, QSqrt2};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodLift {
    pub values: Vec<ComplexQ2>,
}

impl PeriodLift {
    pub fn new(values: Vec<ComplexQ2>) -> Self {
        PeriodLift { values }
    }

    /// Lift from `(re, im)` pairs of rationals given as `(num, den)`.
    pub fn from_rationals(vals: &[((i64, i64), (i64, i64))]) -> Self {
        use crate::numfmt::rat;
        PeriodLift::new(
            vals.iter()
                .map(|&(re, im)| {
                    ComplexQ2::new(QSqrt2::from_rat(rat(re.0, re.1)), QSqrt2::from_rat(rat(im.0, im.1)))
                })
                .collect(),
        )
    }

    pub fn genus(&self) -> usize {
        self.values.len() / 2
    }

    pub fn u(&self) -> Vec<QSqrt2> {
        self.values.iter().map(|z| z.re.clone()).collect()
    }

    pub fn v(&self) -> Vec<QSqrt2> {
        self.values.iter().map(|z| z.im.clone()).collect()
    }

    /// `u.v`, the area of any form with these periods.
    pub fn symplectic_volume(&self) -> QSqrt2 {
        cohomology_product(&self.u(), &self.v())
    }

    /// The canonical lift of `p`: real parts in `[0, 1)`.
    pub fn canonical(p: &PeriodHom) -> Result<PeriodLift> {
        if *p.group() != GroupKind::CModZ {
            return Err(Error::input("lifts are defined for CModZ periods"));
        }
        let values = p
            .values()
            .iter()
            .map(|v| match v {
                AbelianValue::CModZ { re, im } => ComplexQ2::new(QSqrt2::from_rat(re.clone()), im.clone()),
                _ => unreachable!(),
            })
            .collect();
        Ok(PeriodLift { values })
    }

    /// `P + w` for an integer cohomology class `w`.
    pub fn shifted(&self, w: &[BigInt]) -> PeriodLift {
        let values = self
            .values
            .iter()
            .zip(w)
            .map(|(z, k)| {
                ComplexQ2::new(&z.re + &QSqrt2::from_rat(BigRational::from_integer(k.clone())), z.im.clone())
            })
            .collect();
        PeriodLift { values }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageAnalysis {
    /// Rank of the image as an abelian group.
    pub rank: usize,
    /// Dimension of its real span in `C = R^2`.
    pub real_span_dim: usize,
    pub discrete: bool,
    /// Z-basis and covolume when the image is a lattice of rank 2.
    pub lattice_basis: Option<[ComplexQ2; 2]>,
    pub covolume: Option<QSqrt2>,
}

fn rational_coords(z: &ComplexQ2) -> [BigRational; 4] {
    [z.re.rat.clone(), z.re.sqrt2.clone(), z.im.rat.clone(), z.im.sqrt2.clone()]
}

fn rational_rank(rows: &[[BigRational; 4]]) -> usize {
    let (_, int_rows) = integerize(rows);
    intmat::rank(&int_rows, 4)
}

/// Scales rows by a common denominator.
fn integerize(rows: &[[BigRational; 4]]) -> (BigInt, Vec<Vec<BigInt>>) {
    let d = rows.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let dq = BigRational::from_integer(d.clone());
    let int_rows = rows.iter().map(|r| r.iter().map(|q| (q * &dq).to_integer()).collect()).collect();
    (d, int_rows)
}

/// Rank over `Q(sqrt 2)` of the real `2 x n` matrix `[Re; Im]`.
fn real_rank(values: &[ComplexQ2]) -> usize {
    let Some(first) = values.iter().find(|z| !z.is_zero()) else { return 0 };
    // rank 2 iff some 2x2 minor re_i im_j - re_j im_i is nonzero
    let independent = values.iter().any(|z| !(&(&first.re * &z.im) - &(&first.im * &z.re)).is_zero());
    if independent {
        2
    } else {
        1
    }
}

pub fn image_subgroup_analysis(lift: &PeriodLift) -> ImageAnalysis {
    let coords: Vec<[BigRational; 4]> = lift.values.iter().map(rational_coords).collect();
    let rank = rational_rank(&coords);
    let real_span_dim = real_rank(&lift.values);
    let discrete = rank == real_span_dim;
    let (mut lattice_basis, mut covolume) = (None, None);
    if discrete && rank == 2 {
        let (d, int_rows) = integerize(&coords);
        let h = intmat::hnf(&int_rows, 4);
        let to_c = |r: &Vec<BigInt>| {
            let q = |x: &BigInt| BigRational::new(x.clone(), d.clone());
            ComplexQ2::new(QSqrt2::new(q(&r[0]), q(&r[1])), QSqrt2::new(q(&r[2]), q(&r[3])))
        };
        let (z1, z2) = (to_c(&h[0]), to_c(&h[1]));
        // Im(conj(z1) z2) = x1 y2 - y1 x2
        let area = (&(&z1.re * &z2.im) - &(&z1.im * &z2.re)).abs();
        covolume = Some(area);
        lattice_basis = Some([z1, z2]);
    }
    ImageAnalysis { rank, real_span_dim, discrete, lattice_basis, covolume }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    VolumeNonpositive,
    LatticeCovolume,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum HauptVerdict {
    NotRealizable { reason: RejectReason },
    RealizableNonLattice,
    RealizableLattice { covolume: QSqrt2, basis: [ComplexQ2; 2] },
}

impl HauptVerdict {
    pub fn is_realizable(&self) -> bool {
        !matches!(self, HauptVerdict::NotRealizable { .. })
    }
}

fn check_genus(g: usize) -> Result<()> {
    if g < 2 {
        return Err(Error::precondition(format!(
            "Haupt classification is not supported in genus {g} (needs g >= 2)"
        )));
    }
    Ok(())
}

pub fn haupt_check(lift: &PeriodLift) -> Result<HauptVerdict> {
    if !lift.values.len().is_multiple_of(2) {
        return Err(Error::input("a lift needs an even number of values"));
    }
    check_genus(lift.genus())?;
    Ok(verdict_with_volume(lift, &lift.symplectic_volume()))
}

fn verdict_with_volume(lift: &PeriodLift, volume: &QSqrt2) -> HauptVerdict {
    if volume.signum() <= 0 {
        return HauptVerdict::NotRealizable { reason: RejectReason::VolumeNonpositive };
    }
    let a = image_subgroup_analysis(lift);
    match (a.covolume, a.lattice_basis) {
        (Some(cov), Some(basis)) => {
            if *volume > cov {
                HauptVerdict::RealizableLattice { covolume: cov, basis }
            } else {
                HauptVerdict::NotRealizable { reason: RejectReason::LatticeCovolume }
            }
        }
        _ => HauptVerdict::RealizableNonLattice,
    }
}

/// Every integer vector in `[-b, b]^n`, in lexicographic order.
pub(crate) fn box_vectors(n: usize, b: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * b + 1) as u64;
    let total = side.checked_pow(n as u32).expect("box too large");
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % side) as i64 - b;
            idx /= side;
        }
        v
    })
}

/// All lifts `P0 + w` with `w` in `[-b, b]^{2g}` and their verdicts.
pub fn enumerate_lifts(p: &PeriodHom, b: u32) -> Result<Vec<(PeriodLift, HauptVerdict)>> {
    check_genus(p.genus())?;
    let p0 = PeriodLift::canonical(p)?;
    let base_volume = p0.symplectic_volume();
    let v = p0.v();
    let mut out = Vec::new();
    for w in box_vectors(p0.values.len(), b as i64) {
        let w: Vec<BigInt> = w.into_iter().map(BigInt::from).collect();
        // (u + w).v = u.v + w.v
        let wq: Vec<QSqrt2> =
            w.iter().map(|k| QSqrt2::from_rat(BigRational::from_integer(k.clone()))).collect();
        let volume = &base_volume + &cohomology_product(&wq, &v);
        let lift = p0.shifted(&w);
        let verdict = verdict_with_volume(&lift, &volume);
        out.push((lift, verdict));
    }
    Ok(out)
}

pub fn count_realizable(p: &PeriodHom, b: u32) -> Result<usize> {
    Ok(enumerate_lifts(p, b)?.iter().filter(|(_, v)| v.is_realizable()).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfmt::rat;

    fn c(re: (i64, i64), im: (i64, i64)) -> ComplexQ2 {
        ComplexQ2::new(QSqrt2::from_rat(rat(re.0, re.1)), QSqrt2::from_rat(rat(im.0, im.1)))
    }

    const ONE: ((i64, i64), (i64, i64)) = ((1, 1), (0, 1));
    const I: ((i64, i64), (i64, i64)) = ((0, 1), (1, 1));
    const ZERO: ((i64, i64), (i64, i64)) = ((0, 1), (0, 1));

    #[test]
    fn analysis_examples() {
        let sq = image_subgroup_analysis(&PeriodLift::from_rationals(&[ONE, I]));
        assert_eq!((sq.rank, sq.real_span_dim, sq.discrete), (2, 2, true));
        assert_eq!(sq.covolume, Some(QSqrt2::one()));

        let dense = PeriodLift::new(vec![c((1, 1), (0, 1)), ComplexQ2::new(QSqrt2::sqrt2(), QSqrt2::zero())]);
        let a = image_subgroup_analysis(&dense);
        assert_eq!((a.rank, a.real_span_dim, a.discrete), (2, 1, false));

        let dup = image_subgroup_analysis(&PeriodLift::from_rationals(&[ONE, I, ONE, I]));
        assert_eq!((dup.rank, dup.discrete), (2, true));
        assert_eq!(dup.covolume, Some(QSqrt2::one()));
    }

    #[test]
    fn verdict_examples() {
        let v = haupt_check(&PeriodLift::from_rationals(&[ONE, I, ONE, I])).unwrap();
        assert!(matches!(v, HauptVerdict::RealizableLattice { .. }));
        let v = haupt_check(&PeriodLift::from_rationals(&[ONE, I, ZERO, ZERO])).unwrap();
        assert_eq!(v, HauptVerdict::NotRealizable { reason: RejectReason::LatticeCovolume });
        let real = PeriodLift::from_rationals(&[((1, 3), (0, 1)), ((1, 2), (0, 1)), ONE, ZERO]);
        assert_eq!(
            haupt_check(&real).unwrap(),
            HauptVerdict::NotRealizable { reason: RejectReason::VolumeNonpositive }
        );
        assert!(haupt_check(&PeriodLift::from_rationals(&[ONE, I])).is_err());
    }

    #[test]
    fn non_lattice_realizable() {
        // u = (1, 0, sqrt2, 0), v = (0, 1, 0, 1): u.v = 1 + sqrt2 > 0, dense image
        let l = PeriodLift::new(vec![
            c((1, 1), (0, 1)),
            c((0, 1), (1, 1)),
            ComplexQ2::new(QSqrt2::sqrt2(), QSqrt2::zero()),
            c((0, 1), (1, 1)),
        ]);
        assert_eq!(haupt_check(&l).unwrap(), HauptVerdict::RealizableNonLattice);
    }

    /// Floating-point separation oracle for discreteness.
    fn min_nonzero_norm(l: &PeriodLift, bound: i64) -> f64 {
        let pts: Vec<(f64, f64)> = l.values.iter().map(|z| (z.re.to_f64(), z.im.to_f64())).collect();
        let mut best = f64::INFINITY;
        for w in box_vectors(pts.len(), bound) {
            let (x, y) = w.iter().zip(&pts).fold((0.0, 0.0), |(x, y), (&k, &(a, b))| {
                (x + k as f64 * a, y + k as f64 * b)
            });
            let n = (x * x + y * y).sqrt();
            if n > 1e-12 {
                best = best.min(n);
            }
        }
        best
    }

    #[test]
    fn discreteness_agrees_with_separation_oracle() {
        let s2 = QSqrt2::sqrt2();
        let cases = vec![
            PeriodLift::from_rationals(&[ONE, I, ((1, 2), (1, 3)), ZERO]),
            PeriodLift::from_rationals(&[((2, 1), (0, 1)), ((0, 1), (3, 1)), ((1, 1), (1, 1)), ZERO]),
            PeriodLift::new(vec![c((1, 1), (0, 1)), ComplexQ2::new(s2.clone(), QSqrt2::zero()), c((0, 1), (1, 1)), c((0, 1), (0, 1))]),
            PeriodLift::new(vec![c((0, 1), (1, 1)), ComplexQ2::new(QSqrt2::zero(), s2.clone()), c((0, 1), (0, 1)), c((0, 1), (0, 1))]),
            PeriodLift::new(vec![ComplexQ2::new(s2.clone(), QSqrt2::zero()), c((0, 1), (1, 1)), c((0, 1), (0, 1)), c((0, 1), (0, 1))]),
        ];
        for l in cases {
            let a = image_subgroup_analysis(&l);
            let sep = min_nonzero_norm(&l, 6);
            if a.discrete {
                assert!(sep > 0.2, "discrete case with separation {sep}");
            } else {
                assert!(sep < 0.2, "dense case with separation {sep}");
            }
        }
    }

    #[test]
    fn lift_enumeration() {
        let real = PeriodHom::rational(2, &[(1, 3), (1, 5), (0, 1), (2, 7)]).unwrap();
        for b in 1..=2 {
            assert_eq!(count_realizable(&real, b).unwrap(), 0);
        }
        let g1 = PeriodHom::rational(1, &[(1, 3), (0, 1)]).unwrap();
        assert!(enumerate_lifts(&g1, 1).is_err());

        let zero = PeriodHom::rational(2, &[(0, 1); 4]).unwrap();
        let lifts = enumerate_lifts(&zero, 1).unwrap();
        let (l0, v0) = lifts.iter().find(|(l, _)| l.values.iter().all(ComplexQ2::is_zero)).unwrap();
        assert!(l0.symplectic_volume().is_zero());
        assert!(!v0.is_realizable());
    }

    #[test]
    fn translation_changes_volume_by_w_dot_v() {
        let p = PeriodHom::new(
            2,
            GroupKind::CModZ,
            vec![
                AbelianValue::CModZ { re: rat(1, 2), im: QSqrt2::zero() },
                AbelianValue::CModZ { re: rat(0, 1), im: QSqrt2::one() },
                AbelianValue::CModZ { re: rat(1, 3), im: QSqrt2::sqrt2() },
                AbelianValue::CModZ { re: rat(0, 1), im: QSqrt2::from_int(2) },
            ],
        )
        .unwrap();
        let p0 = PeriodLift::canonical(&p).unwrap();
        let v = p0.v();
        for w in box_vectors(4, 1) {
            let wb: Vec<BigInt> = w.iter().map(|&k| BigInt::from(k)).collect();
            let wq: Vec<QSqrt2> = w.iter().map(|&k| QSqrt2::from_int(k)).collect();
            let expect = &p0.symplectic_volume() + &cohomology_product(&wq, &v);
            assert_eq!(p0.shifted(&wb).symplectic_volume(), expect);
        }
    }
}
