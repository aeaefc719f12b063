//! Translation surfaces glued from rational rectangles, with the form `dz`.
//!
//! Sides are cut into segments; each segment is glued by a translation to a
//! segment of a parallel side of opposite type, or belongs to a pole circle.
//! A pole circle bounds a semi-infinite cylinder that is not modeled
//! geometrically: it is a boundary circle tagged with its residue.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt;

pub type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::Bottom | Side::Top)
    }

    /// Counterclockwise traversal runs in the increasing coordinate direction.
    fn ccw_increasing(self) -> bool {
        matches!(self, Side::Bottom | Side::Right)
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    #[serde(with = "numfmt::rational")]
    pub w: Q,
    #[serde(with = "numfmt::rational")]
    pub h: Q,
}

impl Rect {
    pub fn new(w: Q, h: Q) -> Self {
        Rect { w, h }
    }

    pub fn side_len(&self, s: Side) -> &Q {
        if s.is_horizontal() {
            &self.w
        } else {
            &self.h
        }
    }

    /// Counterclockwise perimeter coordinate of a boundary point, in `[0, 2w + 2h)`.
    pub fn perimeter(&self, side: Side, pos: &Q) -> Q {
        let (w, h) = (&self.w, &self.h);
        let s = match side {
            Side::Bottom => pos.clone(),
            Side::Right => w + pos,
            Side::Top => w + h + (w - pos),
            Side::Left => w + w + h + (h - pos),
        };
        let total = (w + h) * BigRational::from_integer(2.into());
        if s >= total {
            s - total
        } else {
            s
        }
    }

    fn corners(&self) -> [Q; 4] {
        let (w, h) = (&self.w, &self.h);
        [Q::zero(), w.clone(), w + h, w + w + h]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegRef {
    pub rect: usize,
    pub side: Side,
    #[serde(with = "numfmt::rational")]
    pub start: Q,
}

impl SegRef {
    pub fn new(rect: usize, side: Side, start: Q) -> Self {
        SegRef { rect, side, start }
    }
}

/// Translation identifying `from` (a top or right segment) with `to`
/// (a bottom or left segment), start to start.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gluing {
    pub from: SegRef,
    pub to: SegRef,
    #[serde(with = "numfmt::rational")]
    pub len: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SideRef {
    pub rect: usize,
    pub side: Side,
}

/// A boundary circle standing for a semi-infinite cylinder. Top sides face a
/// pole above (residue `+circumference`), bottom sides a pole below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pole {
    pub sides: Vec<SideRef>,
    pub residue: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectSurface {
    pub rectangles: Vec<Rect>,
    pub gluings: Vec<Gluing>,
    #[serde(default)]
    pub poles: Vec<Pole>,
}

/// A straight run along a side of a rectangle, between two vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub rect: usize,
    pub side: Side,
    #[serde(with = "numfmt::rational")]
    pub from: Q,
    #[serde(with = "numfmt::rational")]
    pub to: Q,
}

impl Step {
    pub fn new(rect: usize, side: Side, from: Q, to: Q) -> Self {
        Step { rect, side, from, to }
    }
}

/// A closed path of steps with a label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedCycle {
    pub label: String,
    pub steps: Vec<Step>,
}

/// Exact complex number with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CPeriod {
    #[serde(with = "numfmt::rational")]
    pub re: Q,
    #[serde(with = "numfmt::rational")]
    pub im: Q,
}

impl CPeriod {
    pub fn zero() -> Self {
        CPeriod { re: Q::zero(), im: Q::zero() }
    }

    pub fn add(&self, o: &CPeriod) -> CPeriod {
        CPeriod { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CPeriod) -> CPeriod {
        CPeriod { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn scale(&self, k: &Q) -> CPeriod {
        CPeriod { re: &self.re * k, im: &self.im * k }
    }
}

impl std::fmt::Display for CPeriod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum End {
    Start,
    End,
}

/// An edge end at a vertex.
pub type HalfEdge = (usize, End);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRep {
    pub rect: usize,
    pub side: Side,
    pub start: Q,
}

/// Edge of the cell complex, oriented rightwards or upwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub horizontal: bool,
    pub len: Q,
    pub reps: Vec<EdgeRep>,
    pub pole: Option<usize>,
}

#[derive(Debug, Clone)]
struct Segment {
    start: Q,
    end: Q,
    edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    /// Total cone angle in quarter turns, pole half-disks included.
    pub quarters: u32,
    /// Half-edges in counterclockwise order.
    pub link: Vec<HalfEdge>,
}

impl VertexData {
    pub fn order(&self) -> u32 {
        self.quarters / 4 - 1
    }
}

/// Cell structure and topology of a valid surface.
#[derive(Debug, Clone)]
pub struct Complex {
    pub edges: Vec<Edge>,
    pub vertices: Vec<VertexData>,
    sides: HashMap<(usize, Side), Vec<Segment>>,
    point_vertex: BTreeMap<(usize, Q), usize>,
    link_pos: HashMap<HalfEdge, (usize, usize)>,
    pub faces: usize,
    pub genus: usize,
    pub pole_residues: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceInfo {
    pub genus: usize,
    /// Orders of the zeros, largest first.
    pub zero_orders: Vec<u32>,
    pub pole_residues: Vec<i32>,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Corner of a rectangle met at perimeter coordinate `s`, with the side that
/// starts and the side that ends there counterclockwise.
fn corner_sides(r: &Rect, s: &Q) -> Option<(Side, Side)> {
    let c = r.corners();
    if *s == c[0] {
        Some((Side::Bottom, Side::Left))
    } else if *s == c[1] {
        Some((Side::Right, Side::Bottom))
    } else if *s == c[2] {
        Some((Side::Top, Side::Right))
    } else if *s == c[3] {
        Some((Side::Left, Side::Top))
    } else {
        None
    }
}

/// Side containing the non-corner perimeter point `s`, and the coordinate on it.
fn side_at(r: &Rect, s: &Q) -> (Side, Q) {
    let (w, h) = (&r.w, &r.h);
    if s < w {
        (Side::Bottom, s.clone())
    } else if *s < w + h {
        (Side::Right, s - w)
    } else if *s < w + w + h {
        (Side::Top, w + w + h - s)
    } else {
        (Side::Left, w + w + h + h - s)
    }
}

impl RectSurface {
    pub fn validate(&self) -> Result<SurfaceInfo> {
        let c = self.complex()?;
        Ok(c.info())
    }

    pub fn complex(&self) -> Result<Complex> {
        Complex::build(self)
    }

    /// Replaces rectangle `r` by its part below height `y` (same index) and
    /// the part above (new last index); returns the new surface.
    pub fn split_horizontally(&self, r: usize, y: &Q) -> Result<RectSurface> {
        let rect = self.rectangles.get(r).ok_or_else(|| Error::input(format!("no rectangle {r}")))?;
        if !y.is_positive() || y >= &rect.h {
            return Err(Error::input("split height must lie strictly inside the rectangle"));
        }
        let upper = self.rectangles.len();
        let mut out = self.clone();
        out.rectangles[r] = Rect::new(rect.w.clone(), y.clone());
        out.rectangles.push(Rect::new(rect.w.clone(), &rect.h - y));
        let map_point = |rr: usize, side: Side, pos: &Q| -> (usize, Q) {
            if rr != r {
                return (rr, pos.clone());
            }
            match side {
                Side::Top => (upper, pos.clone()),
                Side::Bottom => (r, pos.clone()),
                _ if pos >= y => (upper, pos - y),
                _ => (r, pos.clone()),
            }
        };
        let mut gluings = Vec::new();
        for g in &self.gluings {
            // Cut points in gluing coordinates where either side crosses height y.
            let mut cuts = BTreeSet::new();
            for seg in [&g.from, &g.to] {
                if seg.rect == r && !seg.side.is_horizontal() {
                    let t = y - &seg.start;
                    if t.is_positive() && t < g.len {
                        cuts.insert(t);
                    }
                }
            }
            let mut bounds: Vec<Q> = vec![Q::zero()];
            bounds.extend(cuts);
            bounds.push(g.len.clone());
            for win in bounds.windows(2) {
                let (a, b) = (&win[0], &win[1]);
                let f = map_point(g.from.rect, g.from.side, &(&g.from.start + a));
                let t = map_point(g.to.rect, g.to.side, &(&g.to.start + a));
                gluings.push(Gluing {
                    from: SegRef::new(f.0, g.from.side, f.1),
                    to: SegRef::new(t.0, g.to.side, t.1),
                    len: b - a,
                });
            }
        }
        gluings.push(Gluing { from: SegRef::new(r, Side::Top, Q::zero()), to: SegRef::new(upper, Side::Bottom, Q::zero()), len: rect.w.clone() });
        out.gluings = gluings;
        for p in &mut out.poles {
            for s in &mut p.sides {
                if s.rect == r && s.side == Side::Top {
                    s.rect = upper;
                }
            }
        }
        Ok(out)
    }
}

/// Rewrites a path on a surface after [`RectSurface::split_horizontally`].
pub fn map_steps_after_split(steps: &[Step], r: usize, y: &Q, upper: usize) -> Vec<Step> {
    let mut out = Vec::new();
    for s in steps {
        if s.rect != r {
            out.push(s.clone());
            continue;
        }
        match s.side {
            Side::Top => out.push(Step::new(upper, Side::Top, s.from.clone(), s.to.clone())),
            Side::Bottom => out.push(s.clone()),
            side => {
                let piece = |a: &Q, b: &Q| {
                    if a >= y && b >= y {
                        Step::new(upper, side, a - y, b - y)
                    } else {
                        Step::new(r, side, a.clone(), b.clone())
                    }
                };
                let crosses = (&s.from < y && &s.to > y) || (&s.from > y && &s.to < y);
                if crosses {
                    out.push(piece(&s.from, y));
                    out.push(piece(y, &s.to));
                } else {
                    out.push(piece(&s.from, &s.to));
                }
            }
        }
    }
    out
}

impl Complex {
    fn build(s: &RectSurface) -> Result<Complex> {
        let n = s.rectangles.len();
        if n == 0 {
            return Err(Error::input("surface has no rectangles"));
        }
        for (i, r) in s.rectangles.iter().enumerate() {
            if !r.w.is_positive() || !r.h.is_positive() {
                return Err(Error::input(format!("rectangle {i} has a nonpositive side")));
            }
        }
        let check_seg = |seg: &SegRef, len: &Q| -> Result<()> {
            let r = s.rectangles.get(seg.rect).ok_or_else(|| Error::input(format!("no rectangle {}", seg.rect)))?;
            if seg.start.is_negative() || &seg.start + len > *r.side_len(seg.side) {
                return Err(Error::input(format!("segment on rectangle {} {:?} leaves the side", seg.rect, seg.side)));
            }
            Ok(())
        };

        let mut edges = Vec::new();
        let mut sides: HashMap<(usize, Side), Vec<Segment>> = HashMap::new();
        for (k, g) in s.gluings.iter().enumerate() {
            let ok_pair = matches!((g.from.side, g.to.side), (Side::Top, Side::Bottom) | (Side::Right, Side::Left));
            if !ok_pair {
                return Err(Error::input(format!("gluing {k} must send a top or right segment to a bottom or left one")));
            }
            if !g.len.is_positive() {
                return Err(Error::input(format!("gluing {k} has nonpositive length")));
            }
            check_seg(&g.from, &g.len)?;
            check_seg(&g.to, &g.len)?;
            let e = edges.len();
            for seg in [&g.from, &g.to] {
                sides.entry((seg.rect, seg.side)).or_default().push(Segment {
                    start: seg.start.clone(),
                    end: &seg.start + &g.len,
                    edge: e,
                });
            }
            edges.push(Edge {
                horizontal: g.from.side.is_horizontal(),
                len: g.len.clone(),
                reps: vec![
                    EdgeRep { rect: g.from.rect, side: g.from.side, start: g.from.start.clone() },
                    EdgeRep { rect: g.to.rect, side: g.to.side, start: g.to.start.clone() },
                ],
                pole: None,
            });
        }
        for (pi, pole) in s.poles.iter().enumerate() {
            if pole.sides.is_empty() {
                return Err(Error::input(format!("pole {pi} has no sides")));
            }
            for sr in &pole.sides {
                let r = s.rectangles.get(sr.rect).ok_or_else(|| Error::input(format!("no rectangle {}", sr.rect)))?;
                if !sr.side.is_horizontal() {
                    return Err(Error::input(format!("pole {pi} uses a vertical side")));
                }
                let e = edges.len();
                sides.entry((sr.rect, sr.side)).or_default().push(Segment { start: Q::zero(), end: r.w.clone(), edge: e });
                edges.push(Edge {
                    horizontal: true,
                    len: r.w.clone(),
                    reps: vec![EdgeRep { rect: sr.rect, side: sr.side, start: Q::zero() }],
                    pole: Some(pi),
                });
            }
        }

        // Every side must be tiled exactly once.
        for (i, r) in s.rectangles.iter().enumerate() {
            for side in [Side::Bottom, Side::Right, Side::Top, Side::Left] {
                let segs = sides.entry((i, side)).or_default();
                segs.sort_by(|a, b| a.start.cmp(&b.start));
                let mut at = Q::zero();
                for seg in segs.iter() {
                    if seg.start > at {
                        return Err(Error::input(format!("rectangle {i} {side:?}: segment [{at}, {}] is unpaired", seg.start)));
                    }
                    if seg.start < at {
                        return Err(Error::input(format!("rectangle {i} {side:?}: overlapping segments at {}", seg.start)));
                    }
                    at = seg.end.clone();
                }
                if &at != r.side_len(side) {
                    return Err(Error::input(format!("rectangle {i} {side:?}: segment [{at}, {}] is unpaired", r.side_len(side))));
                }
            }
        }

        // Boundary points and their identification.
        let mut keys: BTreeSet<(usize, Q)> = BTreeSet::new();
        for ((ri, side), segs) in &sides {
            let r = &s.rectangles[*ri];
            for seg in segs {
                keys.insert((*ri, r.perimeter(*side, &seg.start)));
                keys.insert((*ri, r.perimeter(*side, &seg.end)));
            }
        }
        let keys: Vec<(usize, Q)> = keys.into_iter().collect();
        let index: BTreeMap<(usize, Q), usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let key_of = |rect: usize, side: Side, pos: &Q| (rect, s.rectangles[rect].perimeter(side, pos));
        let mut uf = UnionFind::new(keys.len());
        for g in &s.gluings {
            for off in [Q::zero(), g.len.clone()] {
                let a = index[&key_of(g.from.rect, g.from.side, &(&g.from.start + &off))];
                let b = index[&key_of(g.to.rect, g.to.side, &(&g.to.start + &off))];
                uf.union(a, b);
            }
        }
        let mut root_to_vertex = BTreeMap::new();
        let mut point_vertex = BTreeMap::new();
        for (i, k) in keys.iter().enumerate() {
            let root = uf.find(i);
            let next = root_to_vertex.len();
            let v = *root_to_vertex.entry(root).or_insert(next);
            point_vertex.insert(k.clone(), v);
        }
        let nv = root_to_vertex.len();

        // Corner occurrences with the half-edges bounding their sector.
        struct Occ {
            vertex: usize,
            quarters: u32,
            next: HalfEdge,
            prev: HalfEdge,
        }
        let find_seg = |rect: usize, side: Side, pos: &Q, starting: bool| -> usize {
            let segs = &sides[&(rect, side)];
            let hit = segs.iter().find(|g| if starting { g.start == *pos } else { g.end == *pos });
            hit.expect("breakpoint lies on a segment end").edge
        };
        let mut occs = Vec::new();
        for (i, r) in s.rectangles.iter().enumerate() {
            for (k, v) in point_vertex.range((i, Q::zero())..).take_while(|(k, _)| k.0 == i) {
                let sp = &k.1;
                let (next_side, prev_side, pos_next, pos_prev, quarters) = match corner_sides(r, sp) {
                    Some((ns, ps)) => {
                        let pn = if ns.ccw_increasing() { Q::zero() } else { r.side_len(ns).clone() };
                        let pp = if ps.ccw_increasing() { r.side_len(ps).clone() } else { Q::zero() };
                        (ns, ps, pn, pp, 1)
                    }
                    None => {
                        let (side, pos) = side_at(r, sp);
                        (side, side, pos.clone(), pos, 2)
                    }
                };
                // Counterclockwise start of the next segment, counterclockwise end of the previous one.
                let next = if next_side.ccw_increasing() {
                    (find_seg(i, next_side, &pos_next, true), End::Start)
                } else {
                    (find_seg(i, next_side, &pos_next, false), End::End)
                };
                let prev = if prev_side.ccw_increasing() {
                    (find_seg(i, prev_side, &pos_prev, false), End::End)
                } else {
                    (find_seg(i, prev_side, &pos_prev, true), End::Start)
                };
                occs.push(Occ { vertex: *v, quarters, next, prev });
            }
        }
        let mut by_next: HashMap<HalfEdge, usize> = HashMap::new();
        for (i, o) in occs.iter().enumerate() {
            if by_next.insert(o.next, i).is_some() {
                return Err(Error::internal("surface complex", "half-edge bounds two sectors"));
            }
        }

        let mut vertices: Vec<VertexData> = (0..nv).map(|_| VertexData { quarters: 0, link: vec![] }).collect();
        let mut cycles_at = vec![0usize; nv];
        let mut visited = vec![false; occs.len()];
        for o0 in 0..occs.len() {
            if visited[o0] {
                continue;
            }
            let v = occs[o0].vertex;
            cycles_at[v] += 1;
            let mut o = o0;
            loop {
                if visited[o] {
                    return Err(Error::input("vertex link is not a simple cycle"));
                }
                visited[o] = true;
                if occs[o].vertex != v {
                    return Err(Error::internal("surface complex", "sector chain changed vertex"));
                }
                vertices[v].quarters += occs[o].quarters;
                vertices[v].link.push(occs[o].next);
                let hp = occs[o].prev;
                o = match edges[hp.0].pole {
                    None => *by_next.get(&hp).ok_or_else(|| Error::internal("surface complex", "glued half-edge without sector"))?,
                    Some(pi) => {
                        vertices[v].link.push(hp);
                        vertices[v].quarters += 2;
                        let cands: Vec<usize> = occs
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| c.vertex == v && edges[c.next.0].pole == Some(pi))
                            .map(|(i, _)| i)
                            .collect();
                        if cands.len() != 1 {
                            return Err(Error::input(format!("pole {pi} meets a vertex more than once")));
                        }
                        cands[0]
                    }
                };
                if o == o0 {
                    break;
                }
            }
        }
        if let Some(v) = cycles_at.iter().position(|&c| c != 1) {
            return Err(Error::input(format!("vertex {v} has a disconnected link")));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.quarters % 4 != 0 || v.quarters < 4 {
                return Err(Error::input(format!("vertex {i} has cone angle {}pi/2, not a positive multiple of 2pi", v.quarters)));
            }
        }

        let mut ufr = UnionFind::new(n);
        for g in &s.gluings {
            ufr.union(g.from.rect, g.to.rect);
        }
        if (0..n).any(|i| ufr.find(i) != ufr.find(0)) {
            return Err(Error::input("surface is not connected"));
        }

        let mut pole_residues = Vec::new();
        for (pi, pole) in s.poles.iter().enumerate() {
            let top = pole.sides[0].side == Side::Top;
            if pole.sides.iter().any(|sr| (sr.side == Side::Top) != top) {
                return Err(Error::input(format!("pole {pi} mixes top and bottom sides")));
            }
            let circ: Q = pole.sides.iter().map(|sr| s.rectangles[sr.rect].w.clone()).sum();
            let geometric = if top { circ } else { -circ };
            if pole.residue.abs() != 1 || geometric != q(pole.residue as i64) {
                return Err(Error::input(format!(
                    "pole {pi}: declared residue {} but the circle gives {geometric}",
                    pole.residue
                )));
            }
            pole_residues.push(pole.residue);
        }
        if !s.poles.is_empty() {
            let mut r = pole_residues.clone();
            r.sort();
            if r != vec![-1, 1] {
                return Err(Error::input("expected exactly two poles with residues -1 and +1"));
            }
        }

        let chi = nv as i64 - edges.len() as i64 + n as i64 + s.poles.len() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::input(format!("Euler characteristic {chi} is not that of a closed surface")));
        }
        let genus = ((2 - chi) / 2) as usize;
        let order_sum: i64 = vertices.iter().map(|v| v.order() as i64).sum();
        if order_sum != 2 * genus as i64 - 2 + s.poles.len() as i64 {
            return Err(Error::internal("surface complex", "zero orders violate Gauss-Bonnet"));
        }

        let mut link_pos = HashMap::new();
        for (vi, v) in vertices.iter().enumerate() {
            for (k, h) in v.link.iter().enumerate() {
                link_pos.insert(*h, (vi, k));
            }
        }
        Ok(Complex { edges, vertices, sides, point_vertex, link_pos, faces: n, genus, pole_residues })
    }

    pub fn info(&self) -> SurfaceInfo {
        let mut zero_orders: Vec<u32> = self.vertices.iter().map(VertexData::order).filter(|&k| k > 0).collect();
        zero_orders.sort_by(|a, b| b.cmp(a));
        SurfaceInfo {
            genus: self.genus,
            zero_orders,
            pole_residues: self.pole_residues.clone(),
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            faces: self.faces,
        }
    }

    /// Vertex at a boundary point, when that point is a vertex.
    pub fn vertex_at(&self, s: &RectSurface, rect: usize, side: Side, pos: &Q) -> Option<usize> {
        let r = s.rectangles.get(rect)?;
        self.point_vertex.get(&(rect, r.perimeter(side, pos))).copied()
    }

    pub fn half_edge_vertex(&self, h: HalfEdge) -> usize {
        self.link_pos[&h].0
    }

    /// Segments of a side as `(start, end, edge)`.
    pub fn side_segments(&self, rect: usize, side: Side) -> Vec<(Q, Q, usize)> {
        self.sides.get(&(rect, side)).map_or(vec![], |v| v.iter().map(|g| (g.start.clone(), g.end.clone(), g.edge)).collect())
    }

    /// The edge steps `(edge, +-1)` of a closed path, checking closure.
    pub fn path_edges(&self, s: &RectSurface, steps: &[Step]) -> Result<Vec<(usize, i8)>> {
        if steps.is_empty() {
            return Err(Error::input("empty path"));
        }
        let mut out = Vec::new();
        for (k, st) in steps.iter().enumerate() {
            let r = s.rectangles.get(st.rect).ok_or_else(|| Error::input(format!("step {k}: no rectangle {}", st.rect)))?;
            let len = r.side_len(st.side);
            if st.from == st.to || st.from.is_negative() || st.to.is_negative() || &st.from > len || &st.to > len {
                return Err(Error::input(format!("step {k} is empty or leaves its side")));
            }
            let forward = st.to > st.from;
            let (lo, hi) = if forward { (&st.from, &st.to) } else { (&st.to, &st.from) };
            let segs = &self.sides[&(st.rect, st.side)];
            if !segs.iter().any(|g| &g.start == lo) || !segs.iter().any(|g| &g.end == hi) {
                return Err(Error::input(format!("step {k} does not start and end at vertices")));
            }
            let mut covered: Vec<(usize, i8)> = segs
                .iter()
                .filter(|g| &g.start >= lo && &g.end <= hi)
                .map(|g| (g.edge, if forward { 1 } else { -1 }))
                .collect();
            if !forward {
                covered.reverse();
            }
            out.extend(covered);
        }
        for k in 0..out.len() {
            let here = self.half_edge_vertex(arrival(out[k]));
            let next = self.half_edge_vertex(departure(out[(k + 1) % out.len()]));
            if here != next {
                return Err(Error::input("path is not closed"));
            }
        }
        Ok(out)
    }

    pub fn edge_period(&self, e: usize) -> CPeriod {
        let ed = &self.edges[e];
        if ed.horizontal {
            CPeriod { re: ed.len.clone(), im: Q::zero() }
        } else {
            CPeriod { re: Q::zero(), im: ed.len.clone() }
        }
    }

    pub fn period_of_edges(&self, es: &[(usize, i8)]) -> CPeriod {
        es.iter().fold(CPeriod::zero(), |acc, &(e, sgn)| {
            let p = self.edge_period(e);
            if sgn > 0 {
                acc.add(&p)
            } else {
                acc.sub(&p)
            }
        })
    }

    pub fn chain(es: &[(usize, i8)]) -> BTreeMap<usize, i64> {
        let mut m = BTreeMap::new();
        for &(e, s) in es {
            *m.entry(e).or_insert(0) += s as i64;
        }
        m.retain(|_, c| *c != 0);
        m
    }

    /// Algebraic intersection `alpha . beta` of a closed edge path with a
    /// closed chain, counted by pushing `alpha` off to its left and reading
    /// the crossings from the counterclockwise order at each vertex.
    pub fn intersection(&self, alpha: &[(usize, i8)], beta: &BTreeMap<usize, i64>) -> i64 {
        let mut total = 0;
        for k in 0..alpha.len() {
            let h_in = arrival(alpha[k]);
            let h_out = departure(alpha[(k + 1) % alpha.len()]);
            let (v, p_in) = self.link_pos[&h_in];
            let (_, p_out) = self.link_pos[&h_out];
            let m = self.vertices[v].link.len();
            let in_left = |h: &HalfEdge| -> bool {
                match self.link_pos.get(h) {
                    Some(&(w, p)) if w == v => {
                        let d = (p + m - p_out) % m;
                        // A backtracking visit pushes off around the whole vertex.
                        let span = match (p_in + m - p_out) % m {
                            0 => m,
                            k => k,
                        };
                        d > 0 && d < span
                    }
                    _ => false,
                }
            };
            for (&e, &c) in beta {
                if in_left(&(e, End::Start)) {
                    total += c;
                }
                if in_left(&(e, End::End)) {
                    total -= c;
                }
            }
        }
        total
    }

    /// A step realizing one edge in the given direction.
    pub fn edge_step(&self, e: usize, sign: i8) -> Step {
        let ed = &self.edges[e];
        let rep = &ed.reps[0];
        let end = &rep.start + &ed.len;
        if sign > 0 {
            Step::new(rep.rect, rep.side, rep.start.clone(), end)
        } else {
            Step::new(rep.rect, rep.side, end, rep.start.clone())
        }
    }

    /// Half-edges at vertex `v` in counterclockwise order.
    pub fn link(&self, v: usize) -> &[HalfEdge] {
        &self.vertices[v].link
    }
}

pub fn arrival((e, s): (usize, i8)) -> HalfEdge {
    (e, if s > 0 { End::End } else { End::Start })
}

pub fn departure((e, s): (usize, i8)) -> HalfEdge {
    (e, if s > 0 { End::Start } else { End::End })
}

impl RectSurface {
    pub fn period(&self, steps: &[Step]) -> Result<CPeriod> {
        let c = self.complex()?;
        Ok(c.period_of_edges(&c.path_edges(self, steps)?))
    }

    /// `alpha . beta` for two closed paths.
    pub fn intersection(&self, alpha: &[Step], beta: &[Step]) -> Result<i64> {
        let c = self.complex()?;
        let a = c.path_edges(self, alpha)?;
        let b = Complex::chain(&c.path_edges(self, beta)?);
        Ok(c.intersection(&a, &b))
    }
}

/// Unit square with opposite sides glued.
pub fn square_torus() -> RectSurface {
    RectSurface {
        rectangles: vec![Rect::new(q(1), q(1))],
        gluings: vec![
            Gluing { from: SegRef::new(0, Side::Right, q(0)), to: SegRef::new(0, Side::Left, q(0)), len: q(1) },
            Gluing { from: SegRef::new(0, Side::Top, q(0)), to: SegRef::new(0, Side::Bottom, q(0)), len: q(1) },
        ],
        poles: vec![],
    }
}

/// Square-tiled surface: square `i` has square `right[i]` on its right and
/// `up[i]` above; widths are constant along vertical cylinders and heights
/// along horizontal ones.
pub fn origami(right: &[usize], up: &[usize], widths: &[Q], heights: &[Q]) -> Result<RectSurface> {
    let n = right.len();
    if up.len() != n || widths.len() != n || heights.len() != n {
        return Err(Error::input("origami data of mismatched lengths"));
    }
    let mut gluings = Vec::new();
    for i in 0..n {
        let (r, u) = (right[i], up[i]);
        if r >= n || u >= n || heights[r] != heights[i] || widths[u] != widths[i] {
            return Err(Error::input(format!("square {i} has inconsistent neighbours")));
        }
        gluings.push(Gluing { from: SegRef::new(i, Side::Right, q(0)), to: SegRef::new(r, Side::Left, q(0)), len: heights[i].clone() });
        gluings.push(Gluing { from: SegRef::new(i, Side::Top, q(0)), to: SegRef::new(u, Side::Bottom, q(0)), len: widths[i].clone() });
    }
    let rectangles = (0..n).map(|i| Rect::new(widths[i].clone(), heights[i].clone())).collect();
    Ok(RectSurface { rectangles, gluings, poles: vec![] })
}

/// Three unit squares in an L: one zero of order two, genus two.
pub fn l_surface() -> RectSurface {
    origami(&[1, 0, 2], &[2, 1, 0], &[q(1), q(1), q(1)], &[q(1), q(1), q(1)]).expect("valid L")
}

/// `x mod m` in `[0, m)`.
pub fn modulo(x: &Q, m: &Q) -> Q {
    let k = (x / m).floor();
    x - m * k
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}
