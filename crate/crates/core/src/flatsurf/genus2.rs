//! Odd genus-two forms with two simple poles and prescribed real periods.
//!
//! The half surface is a unit pole cylinder `C0` over three vertical
//! cylinders `C1, C2, C3` of height one and circumferences `P1, P2, P3`
//! summing to one. It is doubled by the point reflection of every rectangle,
//! and the boundary circles `d_k` between halves are twisted to adjust the
//! periods of the transverse cycles.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::surface::{modulo, Complex, Gluing, MarkedCycle, Pole, Rect, RectSurface, SegRef, Side, SideRef, Step, Q};
use super::twist::Twist;
use crate::admissible::small_primitive_vectors;
use crate::error::{Error, Result};
use crate::intmat::{self, Row};
use crate::numfmt;
use crate::periods::{AbelianValue, GroupKind, PeriodHom};
use crate::symplattice::{complete_in, complete_symplectic_basis, symp, LatticeVector, Submodule, SymplecticLattice};

/// Basis `(a1, b1, a2, b2)` with `p(a1), p(a2), p(a1 + a2)` nonzero, and the
/// real lifts `P1, P2` of `p(a1), p(a2)` in `(0, 1)` with `P1 + P2 < 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimBasis {
    #[serde(with = "numfmt::big_matrix")]
    pub basis: Vec<Row>,
    #[serde(with = "lift_serde")]
    pub lift: [Q; 3],
    pub flipped: bool,
}

mod lift_serde {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q; 3], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(crate::numfmt::rat_to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 3], D::Error> {
        use serde::de::Error;
        let v: Vec<String> = Vec::deserialize(d)?;
        let qs: Vec<Q> = v.iter().map(|x| crate::numfmt::parse_rat(x).map_err(D::Error::custom)).collect::<Result<_, _>>()?;
        qs.try_into().map_err(|_| D::Error::custom("expected three lift values"))
    }
}

fn real_part(v: &AbelianValue) -> Q {
    match v {
        AbelianValue::CModZ { re, .. } => re.clone(),
        _ => unreachable!("checked real CModZ period"),
    }
}

fn check_real_genus2(p: &PeriodHom) -> Result<()> {
    if p.genus() != 2 {
        return Err(Error::precondition(format!("genus 2 required, got {}", p.genus())));
    }
    if *p.group() != GroupKind::CModZ || !p.is_real() {
        return Err(Error::precondition("period must be real valued in C/Z"));
    }
    if !p.degree().at_least(3) {
        return Err(Error::precondition(format!("period has degree {}, at least 3 required", p.degree())));
    }
    Ok(())
}

pub fn claim_basis_and_lift(p: &PeriodHom) -> Result<ClaimBasis> {
    check_real_genus2(p)?;
    let lat = SymplecticLattice::new(2)?;
    let nonzero = |v: &[BigInt]| !p.evaluate(v).is_zero();
    for a1 in small_primitive_vectors(4, 2) {
        if !nonzero(&a1) {
            continue;
        }
        let full = complete_symplectic_basis(&lat, &[LatticeVector(a1.clone())])?;
        let (b1, a2, b2) = (full.b(1).0.clone(), full.a(2).0.clone(), full.b(2).0.clone());
        let w = Submodule::saturate(&[a2.clone(), b2.clone()], 4)?;
        for st in small_primitive_vectors(2, 3) {
            let x = intmat::combine(&st, &[a2.clone(), b2.clone()], 4);
            let sum: Row = a1.iter().zip(&x).map(|(u, v)| u + v).collect();
            if nonzero(&x) && nonzero(&sum) {
                let inner = complete_in(&w, &[LatticeVector(x.clone())])?;
                let mut basis = vec![a1.clone(), b1.clone(), x, inner.b(1).0.clone()];
                let lift_of = |v: &[BigInt]| modulo(&real_part(&p.evaluate(v)), &Q::one());
                let (mut p1, mut p2) = (lift_of(&basis[0]), lift_of(&basis[2]));
                let flipped = &p1 + &p2 > Q::one();
                if flipped {
                    for v in &mut basis {
                        *v = v.iter().map(|c| -c).collect();
                    }
                    p1 = Q::one() - p1;
                    p2 = Q::one() - p2;
                }
                let p3 = Q::one() - &p1 - &p2;
                return Ok(ClaimBasis { basis, lift: [p1, p2, p3], flipped });
            }
        }
    }
    Err(Error::internal("claim basis", "no basis found in the search boxes"))
}

/// Involution acting on each rectangle by the point reflection onto its image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceInvolution {
    pub rect_map: Vec<usize>,
}

/// Partner of a boundary point lying strictly inside a glued segment.
fn glued_point(s: &RectSurface, rect: usize, side: Side, pos: &Q) -> Option<(usize, Side, Q)> {
    for g in &s.gluings {
        for (a, b) in [(&g.from, &g.to), (&g.to, &g.from)] {
            if a.rect == rect && a.side == side && pos > &a.start && *pos < &a.start + &g.len {
                return Some((b.rect, b.side, &b.start + (pos - &a.start)));
            }
        }
    }
    None
}

impl SurfaceInvolution {
    fn image(&self, s: &RectSurface, rect: usize, side: Side, pos: &Q) -> (usize, Side, Q) {
        let r = &s.rectangles[rect];
        (self.rect_map[rect], side.opposite(), r.side_len(side) - pos)
    }

    /// Checks that the reflections respect all gluings and poles, so the
    /// involution is well defined and pulls `dz` back to `-dz`.
    pub fn is_odd_involution(&self, s: &RectSurface) -> bool {
        let n = s.rectangles.len();
        if self.rect_map.len() != n || self.rect_map.iter().any(|&j| j >= n) {
            return false;
        }
        for i in 0..n {
            let j = self.rect_map[i];
            if self.rect_map[j] != i || s.rectangles[i] != s.rectangles[j] {
                return false;
            }
        }
        for g in &s.gluings {
            let (img_rect, img_side, _) = self.image(s, g.from.rect, g.from.side, &Q::zero());
            let side_len = s.rectangles[g.from.rect].side_len(g.from.side).clone();
            let mut cuts = vec![g.from.start.clone(), &g.from.start + &g.len];
            for h in &s.gluings {
                for seg in [&h.from, &h.to] {
                    if seg.rect == img_rect && seg.side == img_side {
                        for b in [seg.start.clone(), &seg.start + &h.len] {
                            let t = &side_len - b;
                            if t > g.from.start && t < &g.from.start + &g.len {
                                cuts.push(t);
                            }
                        }
                    }
                }
            }
            cuts.sort();
            cuts.dedup();
            for w in cuts.windows(2) {
                let m = (&w[0] + &w[1]) / Q::from_integer(2.into());
                let (r, sd, x) = self.image(s, g.from.rect, g.from.side, &m);
                let lhs = glued_point(s, r, sd, &x);
                let partner = glued_point(s, g.from.rect, g.from.side, &m).expect("point inside its gluing");
                let rhs = self.image(s, partner.0, partner.1, &partner.2);
                if lhs != Some(rhs) {
                    return false;
                }
            }
        }
        for p in &s.poles {
            let images: Vec<SideRef> =
                p.sides.iter().map(|sr| SideRef { rect: self.rect_map[sr.rect], side: sr.side.opposite() }).collect();
            let matched = s.poles.iter().any(|q| {
                q.residue == -p.residue && images.len() == q.sides.len() && images.iter().all(|x| q.sides.contains(x))
            });
            if !matched {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genus2Branch {
    pub surface: RectSurface,
    pub involution: SurfaceInvolution,
    pub claim: ClaimBasis,
    /// Cycles realizing `a1, b1, a2, b2` of the claim basis.
    pub marking: Vec<MarkedCycle>,
    #[serde(with = "theta_serde")]
    pub theta: [Q; 2],
}

mod theta_serde {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q; 2], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(crate::numfmt::rat_to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 2], D::Error> {
        use serde::de::Error;
        let v: Vec<String> = Vec::deserialize(d)?;
        let qs: Vec<Q> = v.iter().map(|x| crate::numfmt::parse_rat(x).map_err(D::Error::custom)).collect::<Result<_, _>>()?;
        qs.try_into().map_err(|_| D::Error::custom("expected two twist values"))
    }
}

const C_MINUS: usize = 0;
const C_PLUS: usize = 7;

fn d_minus(k: usize) -> usize {
    k
}

fn d_plus(k: usize) -> usize {
    3 + k
}

/// Untwisted doubled surface for circumferences `lift`.
fn baseline_surface(lift: &[Q; 3]) -> (RectSurface, [Q; 3]) {
    let one = Q::one();
    let starts = [Q::zero(), lift[0].clone(), &lift[0] + &lift[1]];
    let mut rectangles = vec![Rect::new(one.clone(), one.clone())];
    for p in lift {
        rectangles.push(Rect::new(p.clone(), one.clone()));
    }
    for p in lift {
        rectangles.push(Rect::new(p.clone(), one.clone()));
    }
    rectangles.push(Rect::new(one.clone(), one.clone()));
    let mut gluings: Vec<Gluing> = (0..rectangles.len())
        .map(|r| Gluing { from: SegRef::new(r, Side::Right, Q::zero()), to: SegRef::new(r, Side::Left, Q::zero()), len: one.clone() })
        .collect();
    for k in 1..=3 {
        let (p, s) = (&lift[k - 1], &starts[k - 1]);
        gluings.push(Gluing {
            from: SegRef::new(C_MINUS, Side::Top, &one - s - p),
            to: SegRef::new(d_minus(k), Side::Bottom, Q::zero()),
            len: p.clone(),
        });
        gluings.push(Gluing {
            from: SegRef::new(d_minus(k), Side::Top, Q::zero()),
            to: SegRef::new(d_plus(k), Side::Bottom, Q::zero()),
            len: p.clone(),
        });
        gluings.push(Gluing {
            from: SegRef::new(d_plus(k), Side::Top, Q::zero()),
            to: SegRef::new(C_PLUS, Side::Bottom, s.clone()),
            len: p.clone(),
        });
    }
    let poles = vec![
        Pole { sides: vec![SideRef { rect: C_MINUS, side: Side::Bottom }], residue: -1 },
        Pole { sides: vec![SideRef { rect: C_PLUS, side: Side::Top }], residue: 1 },
    ];
    (RectSurface { rectangles, gluings, poles }, starts)
}

/// Core of `C_k` and a transverse loop running up `C_k`, over to `C_3`, down
/// `C_3` and back under `C0`.
fn baseline_cycles(lift: &[Q; 3], starts: &[Q; 3]) -> Vec<MarkedCycle> {
    let one = Q::one();
    let mut out = Vec::new();
    for k in 1..=2 {
        out.push(MarkedCycle {
            label: format!("a{k}~"),
            steps: vec![Step::new(d_minus(k), Side::Bottom, Q::zero(), lift[k - 1].clone())],
        });
        out.push(MarkedCycle {
            label: format!("b{k}~"),
            steps: vec![
                Step::new(d_minus(k), Side::Left, Q::zero(), one.clone()),
                Step::new(d_plus(k), Side::Left, Q::zero(), one.clone()),
                Step::new(C_PLUS, Side::Bottom, starts[k - 1].clone(), starts[2].clone()),
                Step::new(d_plus(3), Side::Left, one.clone(), Q::zero()),
                Step::new(d_minus(3), Side::Left, one.clone(), Q::zero()),
                Step::new(C_MINUS, Side::Top, &one - &starts[2] - &lift[2], &one - &starts[k - 1] - &lift[k - 1]),
            ],
        });
    }
    out
}

fn gram(c: &Complex, s: &RectSurface, cycles: &[MarkedCycle]) -> Result<Vec<Vec<i64>>> {
    let edges: Vec<Vec<(usize, i8)>> = cycles.iter().map(|m| c.path_edges(s, &m.steps)).collect::<Result<_>>()?;
    Ok(edges.iter().map(|a| edges.iter().map(|b| c.intersection(a, &Complex::chain(b))).collect()).collect())
}

pub fn genus2_odd_branch_point(p: &PeriodHom) -> Result<Genus2Branch> {
    let claim = claim_basis_and_lift(p)?;
    let (mut surface, starts) = baseline_surface(&claim.lift);
    let mut cycles = baseline_cycles(&claim.lift, &starts);
    let c = surface.complex()?;
    // Make b2~ orthogonal to b1~ by adding copies of a1~ at the corner of C0
    // where both loops pass; that corner is also the vertex of a1~.
    let m = gram(&c, &surface, &cycles)?[1][3];
    let a1_step = if m > 0 {
        Step::new(d_minus(1), Side::Bottom, Q::zero(), claim.lift[0].clone())
    } else {
        Step::new(d_minus(1), Side::Bottom, claim.lift[0].clone(), Q::zero())
    };
    for _ in 0..m.abs() {
        cycles[3].steps.insert(5, a1_step.clone());
    }
    let g = gram(&c, &surface, &cycles)?;
    let standard = |i: usize, j: usize| -> i64 {
        if i.is_multiple_of(2) && j == i + 1 {
            1
        } else if i % 2 == 1 && j + 1 == i {
            -1
        } else {
            0
        }
    };
    if (0..4).any(|i| (0..4).any(|j| g[i][j] != standard(i, j))) {
        return Err(Error::internal("genus-2 marking", format!("baseline cycles have intersection matrix {g:?}")));
    }

    let mut theta = [Q::zero(), Q::zero()];
    for k in 1..=2 {
        let tw_probe = Twist::new(vec![d_minus(k)], Q::zero());
        let core = c.path_edges(&surface, &tw_probe.core_curve(&surface))?;
        let b_idx = 2 * (k - 1) + 1;
        let crossing = c.intersection(&core, &Complex::chain(&c.path_edges(&surface, &cycles[b_idx].steps)?));
        if crossing != 1 {
            return Err(Error::internal("genus-2 marking", format!("twist circle {k} meets b{k}~ {crossing} times")));
        }
        let baseline = c.period_of_edges(&c.path_edges(&surface, &cycles[b_idx].steps)?);
        let target = real_part(&p.evaluate(&claim.basis[b_idx]));
        theta[k - 1] = modulo(&(target - baseline.re), &Q::one());
    }
    for k in 1..=2 {
        if theta[k - 1].is_zero() {
            continue;
        }
        let tw = Twist::new(vec![d_minus(k)], theta[k - 1].clone());
        let next = tw.apply(&surface)?;
        for m in &mut cycles {
            m.steps = tw.transport(&surface, &next, &m.steps)?;
        }
        surface = next;
    }
    let rect_map = vec![C_PLUS, d_plus(1), d_plus(2), d_plus(3), d_minus(1), d_minus(2), d_minus(3), C_MINUS];
    Ok(Genus2Branch { surface, involution: SurfaceInvolution { rect_map }, claim, marking: cycles, theta })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchChecks {
    pub genus_two: bool,
    pub simple_poles: bool,
    pub odd: bool,
    pub periods_match: bool,
    pub lift_ok: bool,
    pub zero_orders: Vec<u32>,
}

impl BranchChecks {
    pub fn all(&self) -> bool {
        self.genus_two && self.simple_poles && self.odd && self.periods_match && self.lift_ok
    }
}

/// Independent checks of a constructed branch point against `p`.
pub fn check_branch(p: &PeriodHom, b: &Genus2Branch) -> Result<BranchChecks> {
    let c = b.surface.complex()?;
    let info = c.info();
    let mut residues = info.pole_residues.clone();
    residues.sort();
    let periods: Vec<_> =
        b.marking.iter().map(|m| Ok(c.period_of_edges(&c.path_edges(&b.surface, &m.steps)?))).collect::<Result<_>>()?;
    let basis = &b.claim.basis;
    // e_j = sum_k (e_j . b_k) a_k + (a_k . e_j) b_k in a symplectic basis.
    let mut periods_match = periods.iter().all(|w| w.im.is_zero()) && basis.len() == 4;
    for j in 0..4 {
        let e = intmat::unit_row(4, j);
        let mut total = Q::zero();
        for k in 0..2 {
            let (a, bb) = (&basis[2 * k], &basis[2 * k + 1]);
            total += Q::from_integer(symp(&e, bb)) * &periods[2 * k].re;
            total += Q::from_integer(symp(a, &e)) * &periods[2 * k + 1].re;
        }
        periods_match &= AbelianValue::rational(total) == p.values()[j];
    }
    let [p1, p2, p3] = &b.claim.lift;
    let lift_ok = p1.is_positive()
        && p2.is_positive()
        && p3.is_positive()
        && (p1 + p2) < Q::one()
        && p1 + p2 + p3 == Q::one()
        && periods[0].re == *p1
        && periods[2].re == *p2;
    Ok(BranchChecks {
        genus_two: info.genus == 2,
        simple_poles: residues == vec![-1, 1],
        odd: b.involution.is_odd_involution(&b.surface),
        periods_match,
        lift_ok,
        zero_orders: info.zero_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfmt::rat;

    fn hom(vals: &[(i64, i64)]) -> PeriodHom {
        PeriodHom::rational(2, vals).unwrap()
    }

    #[test]
    fn claim_identity_case() {
        let p = hom(&[(1, 3), (0, 1), (1, 3), (0, 1)]);
        let c = claim_basis_and_lift(&p).unwrap();
        assert_eq!(c.basis, intmat::identity(4));
        assert_eq!(c.lift, [rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert!(!c.flipped);
    }

    #[test]
    fn claim_flip_case() {
        let p = hom(&[(2, 3), (0, 1), (2, 3), (0, 1)]);
        let c = claim_basis_and_lift(&p).unwrap();
        let neg: Vec<Row> = intmat::identity(4).into_iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        assert_eq!(c.basis, neg);
        assert_eq!(c.lift, [rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert!(c.flipped);
    }

    #[test]
    fn claim_rejects_degree_two_and_non_real() {
        let p = hom(&[(1, 2), (0, 1), (0, 1), (0, 1)]);
        assert!(matches!(claim_basis_and_lift(&p), Err(Error::Precondition(_))));
        assert!(matches!(genus2_odd_branch_point(&p), Err(Error::Precondition(_))));
        let p3 = PeriodHom::rational(3, &[(1, 3), (0, 1), (1, 3), (0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(matches!(claim_basis_and_lift(&p3), Err(Error::Precondition(_))));
    }

    #[test]
    fn branch_point_for_thirds() {
        let p = hom(&[(1, 3), (0, 1), (1, 3), (0, 1)]);
        let b = genus2_odd_branch_point(&p).unwrap();
        let checks = check_branch(&p, &b).unwrap();
        assert!(checks.all(), "{checks:?}");
        assert_eq!(checks.zero_orders, vec![2, 2]);
    }

    #[test]
    fn twisting_one_circle_moves_only_its_transverse_period() {
        let lift = [rat(1, 5), rat(2, 5), rat(2, 5)];
        let (s, starts) = baseline_surface(&lift);
        let cycles = baseline_cycles(&lift, &starts);
        let theta = rat(3, 7);
        let tw = Twist::new(vec![d_minus(1)], theta.clone());
        let s2 = tw.apply(&s).unwrap();
        for m in &cycles {
            let before = s.period(&m.steps).unwrap();
            let after = s2.period(&tw.transport(&s, &s2, &m.steps).unwrap()).unwrap();
            let expected = if m.label == "b1~" { theta.clone() } else { Q::zero() };
            assert_eq!(after.sub(&before).re, expected, "{}", m.label);
        }
    }

    #[test]
    fn broken_involution_is_detected() {
        let p = hom(&[(1, 3), (1, 5), (1, 3), (2, 7)]);
        let b = genus2_odd_branch_point(&p).unwrap();
        assert!(b.involution.is_odd_involution(&b.surface));
        let mut bad = b.involution.clone();
        bad.rect_map.swap(1, 2);
        assert!(!bad.is_odd_involution(&b.surface));
    }
}
