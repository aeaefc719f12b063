//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use isoperiodic::admissible::Decomposition;
use isoperiodic::arnoldf2::{sp_group, sp_orbit_arnold, stab_order_period, ArnoldMap, MEElement, SpF2};
use isoperiodic::decompgraph::{connect, enumerate_bounded, grouping, verify_certificate, Certificate, Vertex};
use isoperiodic::error::Error;
use isoperiodic::flatsurf::{
    check_branch, genus2_odd_branch_point, genus2_rows, random_cylinder_graph, random_origami, random_twist_case,
    CylinderGraph, PathChoice,
};
use isoperiodic::haupt::{count_realizable, haupt_check, HauptVerdict, PeriodLift, RejectReason};
use isoperiodic::intmat;
use isoperiodic::periods::PeriodHom;
use isoperiodic::random;
use isoperiodic::symplattice::{complete_symplectic_basis, dehn_twist, LatticeVector, Submodule, SymplecticLattice};
use num_bigint::BigInt;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_certificates() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(101);
    let mut longest = 0;
    for (g, n) in [(3, 500), (4, 100)] {
        for case in 0..n {
            let p = random::random_period_degree3(&mut rng, g);
            let d1 = random::random_admissible_decomposition(&mut rng, &p, 10);
            let d2 = random::random_admissible_decomposition(&mut rng, &p, 10);
            let c = connect(&p, &d1, &d2).map_err(|e| format!("g={g} case {case}: {e}"))?;
            let text = serde_json::to_string(&c).map_err(|e| e.to_string())?;
            let back: Certificate = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            ensure(back == c, || format!("g={g} case {case}: certificate JSON round trip differs"))?;
            ensure(verify_certificate(&p, &back), || format!("g={g} case {case}: certificate rejected"))?;
            let ends = (grouping(&d1).map_err(|e| e.to_string())?, grouping(&d2).map_err(|e| e.to_string())?);
            ensure(back.start() == &ends.0 && back.end() == &ends.1, || format!("g={g} case {case}: wrong endpoints"))?;
            longest = longest.max(c.edges());
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("600 certificates verified, longest {longest} edges, {t:.1?}"))
}

fn c2_bounded_graph() -> Outcome {
    let mut rng = random::rng(102);
    let mut periods = vec![PeriodHom::rational(3, &[(1, 3), (0, 1), (1, 3), (0, 1), (1, 3), (0, 1)]).unwrap()];
    periods.push(random::random_period_degree3(&mut rng, 3));
    let mut report = vec![];
    for p in &periods {
        let graph = enumerate_bounded(p, 1, 1_000_000).map_err(|e| e.to_string())?;
        ensure(!graph.truncated, || "enumeration truncated".into())?;
        ensure(!graph.vertices.is_empty(), || "no vertices".into())?;
        let as_decomp = |v: &Vertex| Decomposition::new(v.factors().to_vec());
        let base = &graph.vertices[0];
        for v in &graph.vertices {
            let c = connect(p, &as_decomp(base), &as_decomp(v)).map_err(|e| format!("{v}: {e}"))?;
            ensure(verify_certificate(p, &c) && c.start() == base && c.end() == v, || format!("{v}: bad certificate"))?;
        }
        report.push(graph.vertices.len());
    }
    Ok(format!("vertex counts {report:?}, all reach the base vertex"))
}

fn c3_degree_reduction() -> Outcome {
    let mut rng = random::rng(103);
    let mut high = 0;
    for g in 1..=3 {
        for _ in 0..200 {
            let p = random::random_rational_period(&mut rng, g, 8, 0.5);
            let lhs = p.degree().at_least(3);
            let rhs = !p.reduce_half().map_err(|e| e.to_string())?.is_zero();
            ensure(lhs == rhs, || format!("mismatch at {p:?}"))?;
            high += lhs as usize;
        }
    }
    Ok(format!("600 periods agree, {high} of degree at least 3"))
}

fn even_elements(g: usize) -> Vec<u16> {
    let mut v: Vec<u16> = (1u16..1 << (2 * g + 2))
        .map(|m| MEElement::new(g, m))
        .filter(|e| e.is_even() && e.mask() != 0)
        .map(|e| e.mask())
        .collect();
    v.sort();
    v.dedup();
    v
}

fn valid_maps_g2() -> Vec<ArnoldMap> {
    let evens = even_elements(2);
    let mut out = vec![];
    for a in &evens {
        for b in &evens {
            for c in &evens {
                for d in &evens {
                    let m = ArnoldMap::new(2, &[*a, *b, *c, *d]).unwrap();
                    if m.is_valid() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

fn class_representatives() -> BTreeMap<ArnoldMap, ArnoldMap> {
    let mut reps = BTreeMap::new();
    for m in valid_maps_g2() {
        let class = m.class().unwrap();
        reps.entry(class).or_insert(m);
    }
    reps
}

fn c4_stabilizers() -> Outcome {
    let sp = sp_group(2).map_err(|e| e.to_string())?;
    ensure(sp.len() == 720 && sp.iter().all(SpF2::is_symplectic), || format!("|Sp(4, F2)| = {}", sp.len()))?;
    let fixed = sp.iter().filter(|m| m.apply(1) == 1).count();
    let stab = stab_order_period(2).map_err(|e| e.to_string())?;
    ensure(stab == BigInt::from(48) && fixed == 48, || format!("stabilizer order {stab}, brute force {fixed}"))?;
    let bound: u32 = (1..=4).product();
    ensure(stab > BigInt::from(bound), || format!("{stab} <= {bound}"))?;
    let reps = class_representatives();
    let mut worst = 0;
    for (class, a) in &reps {
        let order = sp.iter().filter(|m| a.compose_inverse(m).class().unwrap() == *class).count();
        worst = worst.max(order);
    }
    ensure(worst <= 24, || format!("class stabilizer of order {worst}"))?;
    Ok(format!("|Sp(4,F2)| = 720, period stabilizer 48 > 24, max class stabilizer {worst} over {} classes", reps.len()))
}

fn c5_orbits() -> Outcome {
    let start = Instant::now();
    let reps = class_representatives();
    let mut tested = 0;
    let mut fewest = usize::MAX;
    for a in reps.values() {
        let r = sp_orbit_arnold(a).map_err(|e| e.to_string())?;
        ensure(r.count >= 2, || format!("{a:?}: single class in orbit"))?;
        fewest = fewest.min(r.count);
        tested += 1;
    }
    let t = start.elapsed();
    ensure(tested >= 10, || format!("only {tested} maps tested"))?;
    ensure(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!("{tested} distinct maps, each orbit has at least {fewest} classes, {t:.1?}"))
}

fn c6_haupt() -> Outcome {
    let mut rng = random::rng(106);
    for _ in 0..4 {
        let p = random::random_rational_period(&mut rng, 2, 7, 0.3);
        for b in 1..=3 {
            let n = count_realizable(&p, b).map_err(|e| e.to_string())?;
            ensure(n == 0, || format!("real {p:?} has {n} realizable lifts at B={b}"))?;
        }
    }
    let p3 = random::random_rational_period(&mut rng, 3, 7, 0.3);
    ensure(count_realizable(&p3, 2).map_err(|e| e.to_string())? == 0, || "real genus 3 lift realizable".into())?;

    let one = ((1, 1), (0, 1));
    let i = ((0, 1), (1, 1));
    let zero = ((0, 1), (0, 1));
    let v = haupt_check(&PeriodLift::from_rationals(&[one, i, one, i])).map_err(|e| e.to_string())?;
    ensure(matches!(v, HauptVerdict::RealizableLattice { .. }), || format!("(1,i,1,i): {v:?}"))?;
    let v = haupt_check(&PeriodLift::from_rationals(&[one, i, zero, zero])).map_err(|e| e.to_string())?;
    ensure(v == HauptVerdict::NotRealizable { reason: RejectReason::LatticeCovolume }, || format!("(1,i,0,0): {v:?}"))?;

    let mut monotone = 0;
    for _ in 0..6 {
        let p = complex_period(&mut rng);
        let counts: Vec<usize> = (1..=2).map(|b| count_realizable(&p, b)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        ensure(counts.windows(2).all(|w| w[0] <= w[1]), || format!("{p:?}: counts {counts:?}"))?;
        monotone += (counts[1] > counts[0]) as usize;
    }
    Ok(format!("real periods: 0 realizable lifts for B<=3; examples match; counts nondecreasing ({monotone} strictly)"))
}

fn complex_period<R: Rng>(rng: &mut R) -> PeriodHom {
    use isoperiodic::numfmt::rat;
    use isoperiodic::periods::{AbelianValue, GroupKind};
    use isoperiodic::qsqrt2::QSqrt2;
    let values = (0..4)
        .map(|_| {
            let d = rng.gen_range(1..=4);
            AbelianValue::CModZ { re: rat(rng.gen_range(0..d), d), im: QSqrt2::from_int(rng.gen_range(-2..=2)) }
        })
        .collect();
    PeriodHom::new(2, GroupKind::CModZ, values).unwrap()
}

fn c7_branch_points() -> Outcome {
    let mut rng = random::rng(107);
    for case in 0..20 {
        let p = random::random_period_degree3(&mut rng, 2);
        let b = genus2_odd_branch_point(&p).map_err(|e| format!("case {case}: {e}"))?;
        let checks = check_branch(&p, &b).map_err(|e| format!("case {case}: {e}"))?;
        ensure(checks.all(), || format!("case {case}: {checks:?}"))?;
    }
    Ok("20 surfaces: genus 2, poles -1/+1, odd, periods match, lift inequalities hold".into())
}

fn c8_twists() -> Outcome {
    let mut rng = random::rng(108);
    let mut crossing = 0;
    for case in 0..200 {
        let t = if case % 5 == 4 {
            let p = random::random_period_degree3(&mut rng, 2);
            let b = genus2_odd_branch_point(&p).map_err(|e| e.to_string())?;
            random_twist_case(&mut rng, &b.surface, &genus2_rows(&b))
        } else {
            let (s, rows) = random_origami(&mut rng, 8);
            random_twist_case(&mut rng, &s, &rows)
        }
        .map_err(|e| format!("case {case}: {e}"))?;
        let check = t.evaluate().map_err(|e| format!("case {case}: {e}"))?;
        ensure(check.holds(), || format!("case {case}: {check:?}"))?;
        crossing += (check.intersection != 0) as usize;
    }
    Ok(format!("200 cases exact, {crossing} with nonzero intersection"))
}

/// Cylinders crossing height `y`; pole cylinders extend to infinity.
fn crossing(g: &CylinderGraph, y: &isoperiodic::flatsurf::Q) -> usize {
    g.edges
        .iter()
        .filter(|e| e.lower.is_none_or(|v| &g.levels[v] < y) && e.upper.is_none_or(|v| &g.levels[v] > y))
        .count()
}

fn c9_degeneration() -> Outcome {
    let mut rng = random::rng(109);
    let mut moves = 0;
    for g in 1..=6 {
        for case in 0..100 {
            let graph = random_cylinder_graph(&mut rng, g);
            graph.validate().map_err(|e| format!("g={g} case {case}: {e}"))?;
            let choice = if rng.gen_bool(0.5) { PathChoice::LowerIndex } else { PathChoice::HigherIndex };
            let bound = graph.meeting_paths(choice).map_err(|e| e.to_string())?.count;
            match graph.degenerate_real(choice) {
                Err(Error::Precondition(_)) if g == 1 => continue,
                Err(e) => return Err(format!("g={g} case {case}: {e}")),
                Ok(_) if g == 1 => return Err("genus 1 graph degenerated".into()),
                Ok(d) => {
                    for h in &d.graphs {
                        h.validate().map_err(|e| format!("g={g} case {case}: intermediate graph: {e}"))?;
                    }
                    ensure(d.moves.len() + 2 <= bound.max(2), || format!("g={g} case {case}: {} moves", d.moves.len()))?;
                    let last = d.graphs.last().unwrap();
                    let n = crossing(last, &d.level.level);
                    ensure(n == 1, || format!("g={g} case {case}: level crossed by {n} cylinders"))?;
                    moves += d.moves.len();
                }
            }
        }
    }
    Ok(format!("600 graphs valid; 500 degenerations (g=2..6) with {moves} moves; g=1 refused as a precondition"))
}

fn c10_algebra() -> Outcome {
    const N: usize = 1000;
    let mut rng = random::rng(110);
    let lat = SymplecticLattice::new(3).unwrap();
    for i in 0..N {
        let u = random::random_vector(&mut rng, 6, 9);
        let v = random::random_vector(&mut rng, 6, 9);
        let w = random::random_vector(&mut rng, 6, 9);
        let k = BigInt::from(rng.gen_range(-5..=5));
        ensure(u.symp(&v) == -v.symp(&u), || format!("antisymmetry {i}"))?;
        ensure((&u.scale(&k) + &w).symp(&v) == &k * u.symp(&v) + w.symp(&v), || format!("bilinearity {i}"))?;

        let rows: Vec<LatticeVector> = (0..rng.gen_range(1..=4)).map(|_| random::random_vector(&mut rng, 6, 4)).collect();
        let s = Submodule::from_vectors(&rows, 6).map_err(|e| e.to_string())?;
        ensure(Submodule::saturate(s.basis(), 6).map_err(|e| e.to_string())? == s, || format!("saturation {i}"))?;
        ensure(s.orthogonal_complement().orthogonal_complement() == s, || format!("double complement {i}"))?;

        let basis = random::random_symplectic_basis(&mut rng, 3, 6, 20);
        let c = random::random_vector(&mut rng, 6, 3);
        if !c.is_zero() {
            let c = LatticeVector(intmat::primitive_part(&c.0));
            let k = BigInt::from(rng.gen_range(-3..=3));
            let moved: Vec<LatticeVector> = basis.vectors.iter().map(|x| dehn_twist(x, &c, &k)).collect();
            for a in 0..6 {
                for b in 0..6 {
                    ensure(moved[a].symp(&moved[b]) == basis.vectors[a].symp(&basis.vectors[b]), || format!("Dehn twist {i}"))?;
                }
            }
        }

        let seed = random::random_vector(&mut rng, 6, 20);
        if !seed.is_zero() {
            let v = LatticeVector(intmat::primitive_part(&seed.0));
            let b = complete_symplectic_basis(&lat, std::slice::from_ref(&v)).map_err(|e| e.to_string())?;
            ensure(b.is_valid() && b.a(1) == &v, || format!("basis completion {i}"))?;
        }
    }
    Ok(format!("{N} instances of each invariant"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("certificate soundness", c1_certificates),
        ("bounded graph connectivity", c2_bounded_graph),
        ("degree and half reduction", c3_degree_reduction),
        ("finite symplectic stabilizers", c4_stabilizers),
        ("several Arnold classes", c5_orbits),
        ("Haupt verdicts", c6_haupt),
        ("genus-two branch point", c7_branch_points),
        ("twist formula", c8_twists),
        ("cylinder degeneration", c9_degeneration),
        ("exact algebra invariants", c10_algebra),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| *f == n.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail} [{t:.1?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail} [{t:.1?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
