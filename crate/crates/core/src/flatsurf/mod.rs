//! Rectangle-glued translation surfaces: cell complex, periods, intersection
//! numbers, cylinder twists, odd genus-two branch points and cylinder graphs.

pub mod cylgraph;
pub mod genus2;
pub mod surface;
pub mod twist;

use rand::seq::SliceRandom;
use rand::Rng;

pub use cylgraph::{random_cylinder_graph, CylEdge, CylinderGraph, Degeneration, PathChoice, UpwardMove};
pub use genus2::{check_branch, claim_basis_and_lift, genus2_odd_branch_point, BranchChecks, ClaimBasis, Genus2Branch, SurfaceInvolution};
pub use surface::{
    l_surface, origami, square_torus, CPeriod, Complex, Gluing, MarkedCycle, Pole, Rect, RectSurface, SegRef, Side, SideRef,
    Step, SurfaceInfo, Q,
};
pub use twist::{map_steps_after_row_split, split_row_at_core, Twist};

use crate::error::Result;
use crate::numfmt::rat;

fn random_length<R: Rng>(rng: &mut R) -> Q {
    rat(rng.gen_range(1..=6), rng.gen_range(1..=4))
}

/// A connected square-tiled surface on at most `max_squares` rectangles,
/// with random rational widths per vertical cylinder and heights per
/// horizontal one. Also returns the horizontal rows, left to right.
pub fn random_origami<R: Rng>(rng: &mut R, max_squares: usize) -> (RectSurface, Vec<Vec<usize>>) {
    loop {
        let n = rng.gen_range(1..=max_squares);
        let mut right: Vec<usize> = (0..n).collect();
        let mut up: Vec<usize> = (0..n).collect();
        right.shuffle(rng);
        up.shuffle(rng);
        if !transitive(&right, &up) {
            continue;
        }
        let rows = cycles(&right);
        let cols = cycles(&up);
        let mut widths = vec![rat(1, 1); n];
        let mut heights = vec![rat(1, 1); n];
        for c in &cols {
            let w = random_length(rng);
            for &i in c {
                widths[i] = w.clone();
            }
        }
        for r in &rows {
            let h = random_length(rng);
            for &i in r {
                heights[i] = h.clone();
            }
        }
        let s = origami(&right, &up, &widths, &heights).expect("consistent origami data");
        return (s, rows);
    }
}

fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut c = vec![];
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            c.push(j);
            j = perm[j];
        }
        out.push(c);
    }
    out
}

fn transitive(a: &[usize], b: &[usize]) -> bool {
    let mut seen = vec![false; a.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in [a[i], b[i]] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A random closed walk along edges, as single-edge steps; `None` when the
/// walk does not close up within `max_len` edges.
pub fn random_closed_walk<R: Rng>(rng: &mut R, c: &Complex, max_len: usize) -> Option<Vec<Step>> {
    let glued: Vec<usize> = (0..c.edges.len()).filter(|&e| c.edges[e].pole.is_none()).collect();
    let first = *glued.choose(rng)?;
    let sign0 = if rng.gen_bool(0.5) { 1 } else { -1 };
    let start = c.half_edge_vertex(surface::departure((first, sign0)));
    let mut walk = vec![(first, sign0)];
    let mut at = c.half_edge_vertex(surface::arrival((first, sign0)));
    while walk.len() < max_len {
        if at == start && rng.gen_bool(0.4) {
            break;
        }
        let out: Vec<(usize, i8)> = c
            .link(at)
            .iter()
            .filter(|(e, _)| c.edges[*e].pole.is_none())
            .map(|&(e, end)| (e, if end == surface::End::Start { 1 } else { -1 }))
            .collect();
        let step = *out.choose(rng)?;
        walk.push(step);
        at = c.half_edge_vertex(surface::arrival(step));
    }
    if at != start {
        return None;
    }
    let steps: Vec<Step> = walk.iter().map(|&(e, sg)| c.edge_step(e, sg)).collect();
    Some(steps)
}

/// One random twist-formula instance: a surface, a twist along the core of
/// one of its horizontal rows and a closed path on the split surface.
pub struct TwistCase {
    pub surface: RectSurface,
    pub twist: Twist,
    pub path: Vec<Step>,
}

pub fn random_twist_case<R: Rng>(rng: &mut R, base: &RectSurface, rows: &[Vec<usize>]) -> Result<TwistCase> {
    let row = rows.choose(rng).expect("surface has a row").clone();
    let (split, _) = split_row_at_core(base, &row)?;
    let c = split.complex()?;
    let path = loop {
        if let Some(p) = random_closed_walk(rng, &c, 24) {
            if !Complex::chain(&c.path_edges(&split, &p)?).is_empty() {
                break p;
            }
        }
    };
    let theta = rat(rng.gen_range(-20..=20), rng.gen_range(1..=7));
    Ok(TwistCase { surface: split, twist: Twist::new(row, theta), path })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistCheck {
    pub change: CPeriod,
    pub intersection: i64,
    pub theta: Q,
}

impl TwistCheck {
    /// Period change equals `theta * (c . gamma)`.
    pub fn holds(&self) -> bool {
        self.change == CPeriod { re: &self.theta * Q::from_integer(self.intersection.into()), im: Q::from_integer(0.into()) }
    }
}

impl TwistCase {
    /// Twists, transports the path and measures the period change against
    /// the intersection number with the twist circle on the old surface.
    pub fn evaluate(&self) -> Result<TwistCheck> {
        let new = self.twist.apply(&self.surface)?;
        let moved = self.twist.transport(&self.surface, &new, &self.path)?;
        let change = new.period(&moved)?.sub(&self.surface.period(&self.path)?);
        let intersection = self.surface.intersection(&self.twist.core_curve(&self.surface), &self.path)?;
        Ok(TwistCheck { change, intersection, theta: self.twist.theta.clone() })
    }
}

/// Horizontal rows of the surface returned by [`genus2_odd_branch_point`]:
/// every rectangle is glued to itself left to right.
pub fn genus2_rows(b: &Genus2Branch) -> Vec<Vec<usize>> {
    (0..b.surface.rectangles.len()).map(|i| vec![i]).collect()
}
