use std::time::Instant;

use isoperiodic::decompgraph::{connect, connect_traced, enumerate_bounded, grouping, verify_certificate, MAX_CERTIFICATE_EDGES};
use isoperiodic::periods::PeriodHom;
use isoperiodic::random;

#[test]
fn connect_is_sound_on_random_pairs() {
    let mut rng = random::rng(2024);
    let mut longest = 0;
    for case in 0..500 {
        let g = if case % 2 == 0 { 3 } else { 4 };
        let p = random::random_period_degree3(&mut rng, g);
        let d1 = random::random_admissible_decomposition(&mut rng, &p, 10);
        let d2 = random::random_admissible_decomposition(&mut rng, &p, 10);
        let t = connect_traced(&p, &d1, &d2).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let c = &t.certificate;
        assert!(verify_certificate(&p, c), "case {case}");
        assert_eq!(c.start(), &grouping(&d1).unwrap());
        assert_eq!(c.end(), &grouping(&d2).unwrap());
        assert!(c.edges() <= MAX_CERTIFICATE_EDGES);
        longest = longest.max(c.edges());
    }
    println!("longest certificate: {longest} edges");
}

#[test]
fn bounded_vertices_all_connect_to_a_base_vertex() {
    let p = PeriodHom::rational(3, &[(1, 2), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]).unwrap();
    let start = Instant::now();
    let graph = enumerate_bounded(&p, 1, 1_000_000).unwrap();
    assert!(!graph.truncated);
    assert!(!graph.vertices.is_empty());
    println!("{} vertices, {} edges in {:?}", graph.vertices.len(), graph.edges.len(), start.elapsed());
    let base = &graph.vertices[0];
    let as_decomp = |v: &isoperiodic::decompgraph::Vertex| isoperiodic::admissible::Decomposition::new(v.factors().to_vec());
    for v in &graph.vertices {
        let c = connect(&p, &as_decomp(base), &as_decomp(v)).unwrap();
        assert!(verify_certificate(&p, &c));
        assert_eq!(c.end(), v);
    }
}
