//! The graph of `p`-admissible decompositions.
//!
//! Vertices are unordered pairs `{W, W^perp}` of `p`-nontrivial symplectic
//! factors. Two vertices are adjacent when some admissible decomposition
//! with at least three factors has a factor of each. Connectivity is shown
//! constructively: [`connect`] returns a [`Certificate`] that
//! [`verify_certificate`] checks without trusting the construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::admissible::{is_admissible_decomposition, is_admissible_in, rank2_envelope_in, small_primitive_vectors, Decomposition};
use crate::error::{Error, Result};
use crate::intmat::{self, Row};
use crate::periods::{degree_of, AbelianValue, PeriodHom};
use crate::symplattice::{complete_in, symp, LatticeVector, Submodule};

/// Longest certificate the pipeline of [`connect`] can emit.
pub const MAX_CERTIFICATE_EDGES: usize = 12;

/// Coefficient boxes tried, in order, by the searches of the case machine.
const SEARCH_BOXES: [i64; 3] = [2, 4, 8];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "VertexRepr")]
pub struct Vertex {
    factors: [Submodule; 2],
}

#[derive(Deserialize)]
struct VertexRepr {
    factors: [Submodule; 2],
}

impl From<VertexRepr> for Vertex {
    fn from(r: VertexRepr) -> Self {
        let [x, y] = r.factors;
        Vertex::from_pair(x, y)
    }
}

impl Vertex {
    /// The vertex `{w, w^perp}`.
    pub fn new(w: Submodule) -> Self {
        let c = w.orthogonal_complement();
        Vertex::from_pair(w, c)
    }

    fn from_pair(x: Submodule, y: Submodule) -> Self {
        if x <= y {
            Vertex { factors: [x, y] }
        } else {
            Vertex { factors: [y, x] }
        }
    }

    pub fn factors(&self) -> &[Submodule; 2] {
        &self.factors
    }

    pub fn has_factor(&self, s: &Submodule) -> bool {
        self.factors.iter().any(|f| f == s)
    }

    pub fn is_valid(&self, p: &PeriodHom) -> bool {
        is_admissible_decomposition(p, &Decomposition::new(self.factors.to_vec()))
    }

    /// A factor of rank two, if any.
    pub fn rank2_factor(&self) -> Option<&Submodule> {
        self.factors.iter().find(|f| f.rank() == 2)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} | {}}}", self.factors[0], self.factors[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub refinement: Decomposition,
    pub left_factor_index: usize,
    pub right_factor_index: usize,
}

impl EdgeWitness {
    pub fn new(factors: Vec<Submodule>, left: usize, right: usize) -> Self {
        EdgeWitness { refinement: Decomposition::new(factors), left_factor_index: left, right_factor_index: right }
    }

    pub fn reversed(&self) -> Self {
        EdgeWitness {
            refinement: self.refinement.clone(),
            left_factor_index: self.right_factor_index,
            right_factor_index: self.left_factor_index,
        }
    }
}

/// A vertex path together with one witness per edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub period: PeriodHom,
    pub vertices: Vec<Vertex>,
    pub witnesses: Vec<EdgeWitness>,
}

impl Certificate {
    pub fn single(p: &PeriodHom, v: Vertex) -> Self {
        Certificate { period: p.clone(), vertices: vec![v], witnesses: vec![] }
    }

    pub fn edges(&self) -> usize {
        self.witnesses.len()
    }

    pub fn start(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Vertex {
        self.vertices.last().expect("certificates are nonempty")
    }

    /// Appends an edge, erasing any loop it closes.
    fn push(&mut self, w: EdgeWitness, next: Vertex) {
        if let Some(k) = self.vertices.iter().position(|v| *v == next) {
            self.vertices.truncate(k + 1);
            self.witnesses.truncate(k);
        } else {
            self.vertices.push(next);
            self.witnesses.push(w);
        }
    }

    fn append(&mut self, other: Certificate) -> Result<()> {
        if other.start() != self.end() {
            return Err(Error::internal("certificate concatenation", "endpoints do not match"));
        }
        for (w, v) in other.witnesses.into_iter().zip(other.vertices.into_iter().skip(1)) {
            self.push(w, v);
        }
        Ok(())
    }

    pub fn reversed(&self) -> Self {
        Certificate {
            period: self.period.clone(),
            vertices: self.vertices.iter().rev().cloned().collect(),
            witnesses: self.witnesses.iter().rev().map(EdgeWitness::reversed).collect(),
        }
    }
}

pub fn verify_edge(p: &PeriodHom, v1: &Vertex, v2: &Vertex, w: &EdgeWitness) -> bool {
    let f = &w.refinement.factors;
    f.len() >= 3
        && w.left_factor_index < f.len()
        && w.right_factor_index < f.len()
        && v1.has_factor(&f[w.left_factor_index])
        && v2.has_factor(&f[w.right_factor_index])
        && is_admissible_decomposition(p, &w.refinement)
}

pub fn verify_certificate(p: &PeriodHom, c: &Certificate) -> bool {
    !c.vertices.is_empty()
        && c.witnesses.len() + 1 == c.vertices.len()
        && c.vertices.iter().all(|v| v.is_valid(p))
        && c.witnesses.iter().enumerate().all(|(i, w)| verify_edge(p, &c.vertices[i], &c.vertices[i + 1], w))
}

/// Branch of the case machine of [`connect_intersecting`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    Identical,
    Case0,
    Case1_1,
    Case1_2_1,
    Case1_2_2,
    Case2_1,
    Case2_2,
}

impl CaseLabel {
    pub fn name(&self) -> &'static str {
        match self {
            CaseLabel::Identical => "identical",
            CaseLabel::Case0 => "0",
            CaseLabel::Case1_1 => "1.1",
            CaseLabel::Case1_2_1 => "1.2.1",
            CaseLabel::Case1_2_2 => "1.2.2",
            CaseLabel::Case2_1 => "2.1",
            CaseLabel::Case2_2 => "2.2",
        }
    }

    fn is_direct(&self) -> bool {
        matches!(self, CaseLabel::Identical | CaseLabel::Case0 | CaseLabel::Case1_1)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Certificate plus the case labels visited, outermost first.
#[derive(Debug, Clone)]
pub struct Traced {
    pub certificate: Certificate,
    pub cases: Vec<CaseLabel>,
}

fn check_rank2_factor(p: &PeriodHom, w: &Submodule, name: &str) -> Result<()> {
    if w.dim() != p.lattice().rank() {
        return Err(Error::input(format!("{name} lives in a lattice of rank {}", w.dim())));
    }
    if w.rank() != 2 || !Vertex::new(w.clone()).is_valid(p) {
        return Err(Error::precondition(format!("{name} = {w} is not a p-admissible rank-two factor")));
    }
    Ok(())
}

fn check_rank6(p: &PeriodHom) -> Result<()> {
    if p.lattice().rank() < 6 {
        return Err(Error::precondition("the decomposition graph is handled for rank at least 6"));
    }
    if p.is_zero() {
        return Err(Error::precondition("p is zero"));
    }
    Ok(())
}

/// First primitive vector of `m`, by small coefficient boxes, satisfying `pred`.
fn search_in(m: &Submodule, mut pred: impl FnMut(&Row) -> bool) -> Option<Row> {
    let max_box = if m.rank() <= 4 { 6 } else { 3 };
    small_primitive_vectors(m.rank(), max_box)
        .map(|c| intmat::combine(&c, m.basis(), m.dim()))
        .find(|v| pred(v))
}

/// Element `y` of the rank-two module `w` with `x . y = 1`.
fn partner_in(w: &Submodule, x: &[BigInt]) -> Result<Row> {
    let pairings: Row = w.basis().iter().map(|r| symp(x, r)).collect();
    let (g, c) = intmat::ext_gcd_vec(&pairings);
    if !g.is_one() {
        return Err(Error::internal("normalization", "intersection generator has no partner"));
    }
    Ok(intmat::combine(&c, w.basis(), w.dim()))
}

fn edge(p: &PeriodHom, from: &Vertex, to: &Vertex, w: EdgeWitness) -> Result<Certificate> {
    if !verify_edge(p, from, to, &w) {
        return Err(Error::internal("edge construction", format!("witness rejected between {from} and {to}")));
    }
    let mut c = Certificate::single(p, from.clone());
    c.push(w, to.clone());
    Ok(c)
}

/// Pairs two rank-two factors that share no nonzero vector with ones that
/// do, one edge on each side.
#[derive(Debug, Clone)]
pub struct ForcedIntersection {
    pub w1: Submodule,
    pub w1_prime: Submodule,
    /// From `{W, W^perp}` to `{W1, W1^perp}`.
    pub left: Certificate,
    /// From `{W', W'^perp}` to `{W1', W1'^perp}`.
    pub right: Certificate,
}

pub fn force_intersection(p: &PeriodHom, w: &Submodule, w_prime: &Submodule) -> Result<ForcedIntersection> {
    check_rank6(p)?;
    check_rank2_factor(p, w, "W")?;
    check_rank2_factor(p, w_prime, "W'")?;
    let (vw, vwp) = (Vertex::new(w.clone()), Vertex::new(w_prime.clone()));
    if w.intersect(w_prime).rank() > 0 {
        return Ok(ForcedIntersection {
            w1: w.clone(),
            w1_prime: w_prime.clone(),
            left: Certificate::single(p, vw),
            right: Certificate::single(p, vwp),
        });
    }
    let (c, cp) = (w.orthogonal_complement(), w_prime.orthogonal_complement());
    let shared = c.intersect(&cp);
    let v = search_in(&shared, |v| is_admissible_in(p, &c, v) && is_admissible_in(p, &cp, v))
        .ok_or_else(|| Error::internal("force_intersection", "no vector admissible in both complements"))?;
    let (w1, w2) = rank2_envelope_in(p, &c, &v)?;
    let (w1p, w2p) = rank2_envelope_in(p, &cp, &v)?;
    let left = edge(p, &vw, &Vertex::new(w1.clone()), EdgeWitness::new(vec![w.clone(), w1.clone(), w2], 0, 1))?;
    let right =
        edge(p, &vwp, &Vertex::new(w1p.clone()), EdgeWitness::new(vec![w_prime.clone(), w1p.clone(), w2p], 0, 1))?;
    Ok(ForcedIntersection { w1, w1_prime: w1p, left, right })
}

/// Data of the normal form `W1 = <a1, b1>`, `W1' = <a1, b1 + alpha2 a2>`
/// with `a2, b2, a3, b3, ...` a symplectic basis of `W1^perp`.
struct Normalized {
    a1: Row,
    b1: Row,
    alpha2: BigInt,
    /// `a2, b2, a3, b3, ..., ag, bg`.
    rest: Vec<Row>,
}

fn normalize(w1: &Submodule, w1p: &Submodule) -> Result<Normalized> {
    let inter = w1.intersect(w1p);
    if inter.rank() != 1 {
        return Err(Error::precondition("W1 and W1' must meet in a line"));
    }
    let a1 = inter.basis()[0].clone();
    let b1 = partner_in(w1, &a1)?;
    let w = partner_in(w1p, &a1)?;
    let diff: Row = w.iter().zip(&b1).map(|(x, y)| x - y).collect();
    let lambda = symp(&diff, &b1);
    let mut x = diff;
    intmat::add_scaled(&mut x, &a1, &-lambda);
    let alpha2 = intmat::content(&x);
    if alpha2.is_zero() {
        return Err(Error::internal("normalization", "W1 and W1' coincide"));
    }
    let a2 = intmat::primitive_part(&x);
    let comp = w1.orthogonal_complement();
    if !comp.contains(&a2) {
        return Err(Error::internal("normalization", "a2 is not orthogonal to W1"));
    }
    let rest = complete_in(&comp, &[LatticeVector(a2)])?.vectors.into_iter().map(|v| v.0).collect();
    Ok(Normalized { a1, b1, alpha2, rest })
}

fn add(x: &[BigInt], y: &[BigInt]) -> Row {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn axpy(x: &[BigInt], k: &BigInt, y: &[BigInt]) -> Row {
    let mut out = x.to_vec();
    intmat::add_scaled(&mut out, y, k);
    out
}

impl Normalized {
    fn dim(&self) -> usize {
        self.a1.len()
    }

    fn a2(&self) -> &Row {
        &self.rest[0]
    }

    fn w3_vectors(&self) -> &[Row] {
        &self.rest[2..]
    }

    /// `(W2, W2', W3)` for the twist parameters `mn = (m3, n3, m4, n4, ...)`.
    fn modules(&self, mn: &[BigInt]) -> Result<(Submodule, Submodule, Submodule)> {
        let dim = self.dim();
        let a2 = self.a2();
        let mut b2 = self.rest[1].clone();
        let mut w3 = Vec::new();
        for (i, pair) in self.w3_vectors().chunks(2).enumerate() {
            let (m, n) = (&mn[2 * i], &mn[2 * i + 1]);
            w3.push(axpy(&pair[0], m, a2));
            w3.push(axpy(&pair[1], n, a2));
            intmat::add_scaled(&mut b2, &pair[0], n);
            intmat::add_scaled(&mut b2, &pair[1], &-m);
        }
        let w2 = Submodule::saturate(&[a2.clone(), b2.clone()], dim)?;
        let w2p = Submodule::saturate(&[a2.clone(), axpy(&b2, &self.alpha2, &self.a1)], dim)?;
        let w3 = Submodule::saturate(&w3, dim)?;
        Ok((w2, w2p, w3))
    }
}

fn classify(p: &PeriodHom, n: &Normalized) -> CaseLabel {
    let nz = |v: &Row| !p.evaluate(v).is_zero();
    if nz(n.a2()) {
        return CaseLabel::Case0;
    }
    let w3_values: Vec<AbelianValue> = n.w3_vectors().iter().map(|v| p.evaluate(v)).collect();
    let w3_nonzero = w3_values.iter().any(|x| !x.is_zero());
    match (w3_nonzero, nz(&n.a1)) {
        (true, false) => CaseLabel::Case1_1,
        (true, true) if degree_of(&w3_values).at_least(3) => CaseLabel::Case1_2_1,
        (true, true) => CaseLabel::Case1_2_2,
        (false, true) => CaseLabel::Case2_1,
        (false, false) => CaseLabel::Case2_2,
    }
}

/// Cases 0, 1.1 and 1.2.1: `{W1} - {W3} - {W1'}` for suitable twist parameters.
fn through_w3(p: &PeriodHom, w1: &Submodule, w1p: &Submodule, n: &Normalized, label: CaseLabel) -> Result<Certificate> {
    let params = 2 * (n.rest.len() / 2 - 1);
    for b in SEARCH_BOXES {
        for mn in crate::haupt::box_vectors(params, b) {
            let mn: Row = mn.into_iter().map(BigInt::from).collect();
            let (w2, w2p, w3) = n.modules(&mn)?;
            let r = Decomposition::new(vec![w1.clone(), w2, w3.clone()]);
            let rp = Decomposition::new(vec![w1p.clone(), w2p, w3.clone()]);
            if is_admissible_decomposition(p, &r) && is_admissible_decomposition(p, &rp) {
                let v3 = Vertex::new(w3);
                let mut c = edge(p, &Vertex::new(w1.clone()), &v3, EdgeWitness { refinement: r, left_factor_index: 0, right_factor_index: 2 })?;
                c.append(edge(p, &v3, &Vertex::new(w1p.clone()), EdgeWitness { refinement: rp, left_factor_index: 2, right_factor_index: 0 })?)?;
                return Ok(c);
            }
        }
    }
    Err(Error::internal(format!("connect_intersecting case {label}"), "no twist parameters make both refinements admissible"))
}

fn turn(p: &PeriodHom, w1: &Submodule, w1p: &Submodule, depth: usize, cases: &mut Vec<CaseLabel>) -> Result<Certificate> {
    if w1 == w1p {
        cases.push(CaseLabel::Identical);
        return Ok(Certificate::single(p, Vertex::new(w1.clone())));
    }
    if depth > 2 {
        return Err(Error::internal("connect_intersecting", "recursion deeper than two levels"));
    }
    let n = normalize(w1, w1p)?;
    let label = classify(p, &n);
    cases.push(label);
    let nested = |c: &[CaseLabel], from: usize| -> Result<()> {
        match c[from..].first() {
            Some(l) if l.is_direct() => Ok(()),
            other => Err(Error::internal(
                format!("connect_intersecting case {label}"),
                format!("recursion landed in case {}", other.map_or("none", |l| l.name())),
            )),
        }
    };
    match label {
        CaseLabel::Case0 | CaseLabel::Case1_1 | CaseLabel::Case1_2_1 => through_w3(p, w1, w1p, &n, label),
        CaseLabel::Case1_2_2 | CaseLabel::Case2_1 => {
            let (c, cp) = (w1.orthogonal_complement(), w1p.orthogonal_complement());
            let k_space = c.intersect(&cp);
            let k = search_in(&k_space, |v| {
                p.evaluate(v).is_zero() && is_admissible_in(p, &c, v) && is_admissible_in(p, &cp, v)
            })
            .ok_or_else(|| Error::internal(format!("connect_intersecting case {label}"), "no admissible kernel vector"))?;
            let (w2, w2c) = rank2_envelope_in(p, &c, &k)?;
            let (w2p, w2pc) = rank2_envelope_in(p, &cp, &k)?;
            let mut cert = edge(p, &Vertex::new(w1.clone()), &Vertex::new(w2.clone()), EdgeWitness::new(vec![w1.clone(), w2.clone(), w2c], 0, 1))?;
            let mark = cases.len();
            let inner = turn(p, &w2, &w2p, depth + 1, cases)?;
            nested(cases, mark)?;
            cert.append(inner)?;
            cert.append(edge(p, &Vertex::new(w2p.clone()), &Vertex::new(w1p.clone()), EdgeWitness::new(vec![w1p.clone(), w2p.clone(), w2pc], 1, 0))?)?;
            Ok(cert)
        }
        CaseLabel::Case2_2 => {
            let b1pp = add(&axpy(&n.b1, &n.alpha2, n.a2()), &n.rest[3]);
            let w1pp = Submodule::saturate(&[n.a1.clone(), b1pp], n.dim())?;
            if !Vertex::new(w1pp.clone()).is_valid(p) {
                return Err(Error::internal("connect_intersecting case 2.2", "W1'' is not admissible"));
            }
            let mark = cases.len();
            let mut cert = turn(p, w1, &w1pp, depth + 1, cases)?;
            nested(cases, mark)?;
            let mark = cases.len();
            let second = turn(p, &w1pp, w1p, depth + 1, cases)?;
            nested(cases, mark)?;
            cert.append(second)?;
            Ok(cert)
        }
        CaseLabel::Identical => unreachable!("handled above"),
    }
}

/// Certificate from `{W1, W1^perp}` to `{W1', W1'^perp}` for rank-two
/// factors meeting in a nonzero vector.
pub fn connect_intersecting_traced(p: &PeriodHom, w1: &Submodule, w1p: &Submodule) -> Result<Traced> {
    check_rank6(p)?;
    check_rank2_factor(p, w1, "W1")?;
    check_rank2_factor(p, w1p, "W1'")?;
    if w1.intersect(w1p).rank() == 0 {
        return Err(Error::precondition("W1 and W1' have trivial intersection"));
    }
    let mut cases = Vec::new();
    let certificate = turn(p, w1, w1p, 0, &mut cases)?;
    if !verify_certificate(p, &certificate) {
        return Err(Error::internal("connect_intersecting", "emitted certificate does not verify"));
    }
    Ok(Traced { certificate, cases })
}

pub fn connect_intersecting(p: &PeriodHom, w1: &Submodule, w1p: &Submodule) -> Result<Certificate> {
    connect_intersecting_traced(p, w1, w1p).map(|t| t.certificate)
}

/// The two-factor grouping `{F, F^perp}` of a decomposition with first factor `F`.
pub fn grouping(d: &Decomposition) -> Result<Vertex> {
    let f = d.factors.first().ok_or_else(|| Error::input("empty decomposition"))?;
    Ok(Vertex::new(f.clone()))
}

/// A rank-two factor `W` and a certificate from `v` to `{W, W^perp}`.
fn reduce_to_rank2(p: &PeriodHom, v: &Vertex) -> Result<(Submodule, Certificate)> {
    if let Some(w) = v.rank2_factor() {
        return Ok((w.clone(), Certificate::single(p, v.clone())));
    }
    let [f, rest] = v.factors().clone();
    let x = search_in(&f, |x| is_admissible_in(p, &f, x))
        .ok_or_else(|| Error::internal("rank-two reduction", "no admissible vector in the factor"))?;
    let (w, w2) = rank2_envelope_in(p, &f, &x)?;
    let c = edge(p, v, &Vertex::new(w.clone()), EdgeWitness::new(vec![w.clone(), w2, rest], 2, 0))?;
    Ok((w, c))
}

/// Certificate joining the groupings of two admissible decompositions.
pub fn connect_traced(p: &PeriodHom, d1: &Decomposition, d2: &Decomposition) -> Result<Traced> {
    check_rank6(p)?;
    for (name, d) in [("D1", d1), ("D2", d2)] {
        if d.dim() != p.lattice().rank() {
            return Err(Error::input(format!("{name} lives in a lattice of rank {}", d.dim())));
        }
        if !is_admissible_decomposition(p, d) {
            return Err(Error::precondition(format!("{name} is not p-admissible")));
        }
    }
    let (g1, g2) = (grouping(d1)?, grouping(d2)?);
    let (w, mut cert) = reduce_to_rank2(p, &g1)?;
    let (wp, back) = reduce_to_rank2(p, &g2)?;
    let forced = force_intersection(p, &w, &wp)?;
    cert.append(forced.left)?;
    let mut cases = Vec::new();
    cert.append(turn(p, &forced.w1, &forced.w1_prime, 0, &mut cases)?)?;
    cert.append(forced.right.reversed())?;
    cert.append(back.reversed())?;
    if cert.start() != &g1 || cert.end() != &g2 || !verify_certificate(p, &cert) {
        return Err(Error::internal("connect", "emitted certificate does not verify"));
    }
    if cert.edges() > MAX_CERTIFICATE_EDGES {
        return Err(Error::internal("connect", format!("certificate has {} edges", cert.edges())));
    }
    Ok(Traced { certificate: cert, cases })
}

pub fn connect(p: &PeriodHom, d1: &Decomposition, d2: &Decomposition) -> Result<Certificate> {
    connect_traced(p, d1, d2).map(|t| t.certificate)
}

/// Vertices and witnessed edges with all factor entries in `[-B, B]`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundedGraph {
    pub bound: u32,
    pub vertices: Vec<Vertex>,
    /// Index pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Set when the vertex cap stopped the enumeration early.
    pub truncated: bool,
}

fn bounded(s: &Submodule, b: u32) -> bool {
    let b = BigInt::from(b);
    s.basis().iter().flatten().all(|x| x.abs() <= b)
}

fn small_symp(u: &[i64], v: &[i64]) -> i64 {
    u.chunks(2).zip(v.chunks(2)).map(|(x, y)| x[0] * y[1] - x[1] * y[0]).sum()
}

/// Rank-two symplectic saturated modules whose canonical basis has entries in `[-b, b]`.
fn bounded_rank2_modules(n: usize, b: i64) -> Vec<(Submodule, Vec<Vec<i64>>)> {
    let pivot = |v: &[i64]| v.iter().position(|x| *x != 0);
    let rows: Vec<Vec<i64>> = crate::haupt::box_vectors(n, b)
        .filter(|v| pivot(v).is_some_and(|i| v[i] > 0))
        .collect();
    let mut out = Vec::new();
    for r1 in &rows {
        let p1 = pivot(r1).unwrap();
        for r2 in &rows {
            let p2 = pivot(r2).unwrap();
            if p2 <= p1 || r1[p2] < 0 || r1[p2] >= r2[p2] || small_symp(r1, r2).abs() != 1 {
                continue;
            }
            let basis: Vec<Row> = [r1, r2].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            // A unimodular pairing forces saturation, so the rows are already canonical.
            let s = Submodule::saturate(&basis, n).expect("rows have lattice length");
            debug_assert_eq!(s.basis(), &basis[..]);
            out.push((s, vec![r1.clone(), r2.clone()]));
        }
    }
    out
}

/// Finite slice of the decomposition graph: vertices having a rank-two
/// factor, and edges witnessed by refinements `U1 + U2 + (U1 + U2)^perp`
/// with `U1, U2` of rank two, all entries bounded by `b`.
pub fn enumerate_bounded(p: &PeriodHom, b: u32, max_vertices: usize) -> Result<BoundedGraph> {
    if b == 0 {
        return Err(Error::input("bound must be positive"));
    }
    let n = p.lattice().rank();
    let mut graph = BoundedGraph { bound: b, vertices: vec![], edges: vec![], truncated: false };
    if n < 4 || p.is_zero() {
        return Ok(graph);
    }
    if n > 8 {
        return Err(Error::precondition("bounded enumeration supports rank at most 8"));
    }
    let modules: Vec<(Submodule, Vec<Vec<i64>>)> =
        bounded_rank2_modules(n, b as i64).into_iter().filter(|(s, _)| p.is_nonzero_on(s)).collect();

    let mut vertex_set = BTreeSet::new();
    for (s, _) in &modules {
        let v = Vertex::new(s.clone());
        if bounded(&v.factors()[0], b) && bounded(&v.factors()[1], b) && v.is_valid(p) {
            vertex_set.insert(v);
            if vertex_set.len() > max_vertices {
                graph.truncated = true;
                break;
            }
        }
    }
    graph.vertices = vertex_set.into_iter().collect();
    let index: HashMap<&Vertex, usize> = graph.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut edges = BTreeMap::new();
    if n >= 6 && !graph.truncated {
        for (i, (u1, r1)) in modules.iter().enumerate() {
            for (u2, r2) in &modules[i + 1..] {
                let orthogonal = r1.iter().all(|x| r2.iter().all(|y| small_symp(x, y) == 0));
                if !orthogonal {
                    continue;
                }
                let u3 = u1.saturated_sum(u2).orthogonal_complement();
                if !bounded(&u3, b) || !p.is_nonzero_on(&u3) {
                    continue;
                }
                let ends: Vec<Option<usize>> =
                    [u1, u2, &u3].iter().map(|u| index.get(&Vertex::new((*u).clone())).copied()).collect();
                for x in 0..3 {
                    for y in x + 1..3 {
                        if let (Some(i), Some(j)) = (ends[x], ends[y]) {
                            if i != j {
                                edges.entry((i.min(j), i.max(j))).or_insert(());
                            }
                        }
                    }
                }
            }
        }
    }
    graph.edges = edges.into_keys().collect();
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn lv(xs: &[i64]) -> Row {
        LatticeVector::from_i64s(xs).0
    }

    fn module(rows: &[&[i64]]) -> Submodule {
        let rows: Vec<Row> = rows.iter().map(|r| lv(r)).collect();
        Submodule::saturate(&rows, rows[0].len()).unwrap()
    }

    fn block(g: usize, i: usize) -> Submodule {
        let n = 2 * g;
        Submodule::saturate(&[intmat::unit_row(n, 2 * i), intmat::unit_row(n, 2 * i + 1)], n).unwrap()
    }

    fn thirds() -> PeriodHom {
        PeriodHom::rational(3, &[(1, 3), (0, 1), (1, 3), (0, 1), (1, 3), (0, 1)]).unwrap()
    }

    #[test]
    fn edge_through_three_blocks() {
        let p = thirds();
        let (w1, w2, w3) = (block(3, 0), block(3, 1), block(3, 2));
        let v1 = Vertex::new(w1.clone());
        let v3 = Vertex::new(w3.clone());
        let w = EdgeWitness::new(vec![w1.clone(), w2.clone(), w3.clone()], 0, 2);
        assert!(verify_edge(&p, &v1, &v3, &w));
        let two = EdgeWitness::new(vec![w1.clone(), w1.orthogonal_complement()], 0, 1);
        assert!(!verify_edge(&p, &v1, &Vertex::new(w1.clone()), &two));
        let wrong = EdgeWitness::new(vec![w1, w2, w3], 1, 2);
        assert!(!verify_edge(&p, &v1, &v3, &wrong));
    }

    #[test]
    fn certificate_checker() {
        let p = thirds();
        let single = Certificate::single(&p, Vertex::new(block(3, 0)));
        assert!(verify_certificate(&p, &single));
        let d1 = Decomposition::new(vec![block(3, 0), block(3, 1), block(3, 2)]);
        let d2 = Decomposition::new(vec![block(3, 1), block(3, 0), block(3, 2)]);
        let mut c = connect(&p, &d1, &d2).unwrap();
        assert!(verify_certificate(&p, &c));
        assert!(c.edges() >= 1);
        c.witnesses[0].refinement.factors[0] = module(&[&[1, 0, 0, 0, 0, 0], &[0, 1, 1, 0, 0, 0]]);
        assert!(!verify_certificate(&p, &c));
    }

    #[test]
    fn force_intersection_examples() {
        let p = thirds();
        let (w, wp) = (block(3, 0), block(3, 1));
        let f = force_intersection(&p, &w, &wp).unwrap();
        assert!(f.w1.intersect(&f.w1_prime).rank() > 0);
        assert!(f.w1.is_orthogonal_to(&w) && f.w1_prime.is_orthogonal_to(&wp));
        assert!(verify_certificate(&p, &f.left) && verify_certificate(&p, &f.right));
        assert_eq!(f.left.edges(), 1);

        let same = force_intersection(&p, &w, &w).unwrap();
        assert_eq!((same.w1.clone(), same.left.edges()), (w.clone(), 0));

        let p2 = PeriodHom::rational(2, &[(1, 3), (0, 1), (1, 3), (0, 1)]).unwrap();
        assert!(matches!(force_intersection(&p2, &block(2, 0), &block(2, 1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn case0_example() {
        // W1' = <a1, b1 + a2>; p(a2) = 1/3 and p(a1) = 1/3 so every factor is nontrivial.
        let p = PeriodHom::rational(3, &[(1, 3), (0, 1), (1, 3), (0, 1), (1, 3), (0, 1)]).unwrap();
        let w1 = block(3, 0);
        let w1p = module(&[&[1, 0, 0, 0, 0, 0], &[0, 1, 1, 0, 0, 0]]);
        let t = connect_intersecting_traced(&p, &w1, &w1p).unwrap();
        assert_eq!(t.cases, vec![CaseLabel::Case0]);
        assert_eq!(t.certificate.edges(), 2);
        assert!(verify_certificate(&p, &t.certificate));
        let mid = &t.certificate.vertices[1];
        assert!(mid.factors().iter().any(|f| f.rank() == 2 && f.is_orthogonal_to(&w1) && f.is_orthogonal_to(&w1p)));

        let same = connect_intersecting(&p, &w1, &w1).unwrap();
        assert_eq!(same.edges(), 0);
    }

    #[test]
    fn case2_2_example() {
        // Only b1 and b2 carry periods, so a2 and the third block are killed.
        let p = PeriodHom::rational(3, &[(0, 1), (1, 3), (0, 1), (1, 3), (0, 1), (0, 1)]).unwrap();
        let w1 = block(3, 0);
        let w1p = module(&[&[1, 0, 0, 0, 0, 0], &[0, 1, 1, 0, 0, 0]]);
        let t = connect_intersecting_traced(&p, &w1, &w1p).unwrap();
        assert_eq!(t.cases[0], CaseLabel::Case2_2);
        assert!(t.cases[1..].iter().all(|c| c.is_direct()));
        assert!(verify_certificate(&p, &t.certificate));
        // The route passes through <a1, b1 + a2 + b3>.
        let w1pp = module(&[&[1, 0, 0, 0, 0, 0], &[0, 1, 1, 0, 0, 1]]);
        assert!(t.certificate.vertices.iter().any(|v| v.has_factor(&w1pp)));
    }

    #[test]
    fn every_case_label_is_reachable() {
        let mut seen = BTreeSet::new();
        let mut r = random::rng(3);
        for _ in 0..400 {
            let p = random::random_rational_period(&mut r, 3, 4, 0.6);
            if p.is_zero() {
                continue;
            }
            let basis = random::random_symplectic_basis(&mut r, 3, 3, 10);
            let (a1, b1) = (basis.a(1).0.clone(), basis.b(1).0.clone());
            let a2 = basis.a(2).0.clone();
            let k = BigInt::from(rand::Rng::gen_range(&mut r, 1..=2));
            let w1 = Submodule::saturate(&[a1.clone(), b1.clone()], 6).unwrap();
            let w1p = Submodule::saturate(&[a1, axpy(&b1, &k, &a2)], 6).unwrap();
            if !Vertex::new(w1.clone()).is_valid(&p) || !Vertex::new(w1p.clone()).is_valid(&p) {
                continue;
            }
            let t = connect_intersecting_traced(&p, &w1, &w1p).unwrap();
            assert!(verify_certificate(&p, &t.certificate));
            seen.insert(t.cases[0].name());
        }
        for label in ["0", "1.1", "1.2.1", "1.2.2", "2.1", "2.2"] {
            assert!(seen.contains(label), "case {label} never hit: {seen:?}");
        }
    }

    #[test]
    fn connect_examples() {
        let p = thirds();
        let d1 = Decomposition::new(vec![block(3, 0), block(3, 1).saturated_sum(&block(3, 2))]);
        let d2 = Decomposition::new(vec![block(3, 1), block(3, 0).saturated_sum(&block(3, 2))]);
        let c = connect(&p, &d1, &d2).unwrap();
        assert!(verify_certificate(&p, &c));
        assert_eq!(c.start(), &grouping(&d1).unwrap());
        assert_eq!(c.end(), &grouping(&d2).unwrap());
        assert_eq!(connect(&p, &d1, &d1).unwrap().edges(), 0);

        let p2 = PeriodHom::rational(2, &[(1, 3), (0, 1), (1, 3), (0, 1)]).unwrap();
        let e = Decomposition::new(vec![block(2, 0), block(2, 1)]);
        assert!(matches!(connect(&p2, &e, &e), Err(Error::Precondition(_))));
    }

    #[test]
    fn bounded_enumeration_edge_cases() {
        let zero = PeriodHom::rational(3, &[(0, 1); 6]).unwrap();
        assert!(enumerate_bounded(&zero, 1, 1000).unwrap().vertices.is_empty());
        let g1 = PeriodHom::rational(1, &[(1, 2), (0, 1)]).unwrap();
        assert!(enumerate_bounded(&g1, 1, 1000).unwrap().vertices.is_empty());
    }

    #[test]
    fn vertex_json_is_order_insensitive() {
        let v = Vertex::new(block(3, 2));
        let [x, y] = v.factors().clone();
        let swapped = serde_json::json!({ "factors": [y, x] });
        let back: Vertex = serde_json::from_value(swapped).unwrap();
        assert_eq!(back, v);
    }
}
