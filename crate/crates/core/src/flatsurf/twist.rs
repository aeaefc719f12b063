//! Cut-and-reglue along the top circle of a horizontal cylinder row, with
//! transport of closed paths to the twisted surface.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::surface::{modulo, Complex, Gluing, RectSurface, SegRef, Side, Step, Q};
use crate::error::{Error, Result};
use crate::numfmt;

/// Twist by `theta` along the top circle `c` of the row of rectangles `row`,
/// listed left to right. Points just below `c` at arc `x` end up glued to
/// what was above arc `x - theta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twist {
    pub row: Vec<usize>,
    #[serde(with = "numfmt::rational")]
    pub theta: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Touch {
    Below,
    Above,
}

struct Piece {
    step: Step,
    edge: usize,
    sign: i8,
    /// Signed arc displacement when the piece runs along `c`.
    arc: Option<(Q, Q)>,
}

impl Twist {
    pub fn new(row: Vec<usize>, theta: Q) -> Self {
        Twist { row, theta }
    }

    /// Arc coordinate of the left end of each row rectangle, and the circumference.
    fn arcs(&self, s: &RectSurface) -> (Vec<Q>, Q) {
        let mut xs = Vec::new();
        let mut at = Q::zero();
        for &r in &self.row {
            xs.push(at.clone());
            at += &s.rectangles[r].w;
        }
        (xs, at)
    }

    fn check_row(&self, s: &RectSurface) -> Result<()> {
        let m = self.row.len();
        if m == 0 || self.row.iter().any(|&r| r >= s.rectangles.len()) {
            return Err(Error::input("twist row must list existing rectangles"));
        }
        let mut seen = self.row.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != m {
            return Err(Error::input("twist row repeats a rectangle"));
        }
        for i in 0..m {
            let (a, b) = (self.row[i], self.row[(i + 1) % m]);
            let h = &s.rectangles[a].h;
            if &s.rectangles[b].h != h {
                return Err(Error::input("twist row rectangles differ in height"));
            }
            let glued = s.gluings.iter().any(|g| {
                g.from == SegRef::new(a, Side::Right, Q::zero()) && g.to == SegRef::new(b, Side::Left, Q::zero()) && &g.len == h
            });
            if !glued {
                return Err(Error::input(format!("rectangle {a} is not glued along its whole right side to rectangle {b}")));
            }
        }
        for p in &s.poles {
            if p.sides.iter().any(|sr| sr.side == Side::Top && self.row.contains(&sr.rect)) {
                return Err(Error::input("twist circle is a pole boundary"));
            }
        }
        Ok(())
    }

    /// Arc position of every vertex on `c`, after checking they are all regular.
    fn circle_vertices(&self, s: &RectSurface, c: &Complex) -> Result<HashMap<usize, Q>> {
        let (xs, total) = self.arcs(s);
        let mut out = HashMap::new();
        for (i, &r) in self.row.iter().enumerate() {
            let mut points: Vec<Q> = c.side_segments(r, Side::Top).into_iter().map(|(a, _, _)| a).collect();
            points.push(s.rectangles[r].w.clone());
            for pos in points {
                let v = c.vertex_at(s, r, Side::Top, &pos).expect("segment end is a vertex");
                if c.vertices[v].quarters != 4 {
                    return Err(Error::precondition(format!(
                        "the twist circle passes through a cone point (vertex {v}); \
                         cut the cylinder at its core with split_horizontally and twist there"
                    )));
                }
                let x = modulo(&(&xs[i] + &pos), &total);
                if let Some(old) = out.insert(v, x.clone()) {
                    if old != x {
                        return Err(Error::precondition("the twist circle meets a vertex twice"));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn core_curve(&self, s: &RectSurface) -> Vec<Step> {
        self.row.iter().map(|&r| Step::new(r, Side::Top, Q::zero(), s.rectangles[r].w.clone())).collect()
    }

    pub fn apply(&self, s: &RectSurface) -> Result<RectSurface> {
        self.check_row(s)?;
        let c = s.complex()?;
        self.circle_vertices(s, &c)?;
        let (xs, total) = self.arcs(s);
        let slot = |x: &Q| -> usize { (0..self.row.len()).rev().find(|&j| &xs[j] <= x).unwrap_or(0) };
        let mut gluings = Vec::new();
        for g in &s.gluings {
            let i = match self.row.iter().position(|&r| r == g.from.rect) {
                Some(i) if g.from.side == Side::Top => i,
                _ => {
                    gluings.push(g.clone());
                    continue;
                }
            };
            let u0 = modulo(&(&xs[i] + &g.from.start + &self.theta), &total);
            let mut done = Q::zero();
            while done < g.len {
                let u = modulo(&(&u0 + &done), &total);
                let j = slot(&u);
                let room = &xs[j] + &s.rectangles[self.row[j]].w - &u;
                let piece = room.min(&g.len - &done);
                gluings.push(Gluing {
                    from: SegRef::new(self.row[j], Side::Top, &u - &xs[j]),
                    to: SegRef::new(g.to.rect, g.to.side, &g.to.start + &done),
                    len: piece.clone(),
                });
                done += piece;
            }
        }
        let out = RectSurface { rectangles: s.rectangles.clone(), gluings, poles: s.poles.clone() };
        out.validate().map_err(|e| Error::internal("twist", format!("twisted surface invalid: {e}")))?;
        Ok(out)
    }

    /// Rewrites a closed path on `old` as a closed path on `self.apply(old)`.
    pub fn transport(&self, old: &RectSurface, new: &RectSurface, steps: &[Step]) -> Result<Vec<Step>> {
        self.check_row(old)?;
        let c = old.complex()?;
        let on_circle = self.circle_vertices(old, &c)?;
        let (xs, total) = self.arcs(old);
        let height = old.rectangles[self.row[0]].h.clone();
        c.path_edges(old, steps)?;

        let mut pieces = Vec::new();
        for st in steps {
            let forward = st.to > st.from;
            let (lo, hi) = if forward { (&st.from, &st.to) } else { (&st.to, &st.from) };
            let mut segs: Vec<(Q, Q, usize)> =
                c.side_segments(st.rect, st.side).into_iter().filter(|(a, b, _)| a >= lo && b <= hi).collect();
            if !forward {
                segs.reverse();
            }
            for (a, b, e) in segs {
                let sign = if forward { 1 } else { -1 };
                let step = if forward { Step::new(st.rect, st.side, a, b) } else { Step::new(st.rect, st.side, b, a) };
                let arc = c.edges[e].reps.iter().find_map(|rep| {
                    let i = self.row.iter().position(|&r| r == rep.rect)?;
                    (rep.side == Side::Top).then(|| {
                        let a = &xs[i] + &rep.start;
                        let b = &a + &c.edges[e].len;
                        if sign > 0 {
                            (a, b)
                        } else {
                            (b, a)
                        }
                    })
                });
                pieces.push(Piece { step, edge: e, sign, arc });
            }
        }

        let touch = |p: &Piece, at_end: bool| -> Touch {
            if p.arc.is_some() {
                return Touch::Below;
            }
            let s = &p.step;
            let y = if at_end { &s.to } else { &s.from };
            if self.row.contains(&s.rect) && !s.side.is_horizontal() && *y == height {
                Touch::Below
            } else {
                Touch::Above
            }
        };

        let n = pieces.len();
        let Some(first_other) = pieces.iter().position(|p| p.arc.is_none()) else {
            let disp: Q = pieces.iter().map(|p| {
                let (a, b) = p.arc.as_ref().unwrap();
                b - a
            }).sum();
            if disp.is_zero() {
                return Err(Error::input("path retraces the twist circle to a null chain"));
            }
            return self.run_steps(old, &xs, &total, &Q::zero(), &disp);
        };

        let mut out: Vec<Step> = Vec::new();
        let mut run: Option<(Q, Q)> = None;
        for k in 0..n {
            let idx = (first_other + k) % n;
            let next = (idx + 1) % n;
            let p = &pieces[idx];
            match &p.arc {
                Some((a, b)) => {
                    let r = run.get_or_insert_with(|| (a.clone(), Q::zero()));
                    r.1 += b - a;
                }
                None => {
                    if let Some((u, d)) = run.take() {
                        if !d.is_zero() {
                            out.extend(self.run_steps(old, &xs, &total, &u, &d)?);
                        }
                    }
                    out.push(p.step.clone());
                }
            }
            let v = c.half_edge_vertex(super::surface::arrival((p.edge, p.sign)));
            if let Some(x) = on_circle.get(&v) {
                match (touch(p, true), touch(&pieces[next], false)) {
                    (Touch::Below, Touch::Above) => {
                        let r = run.get_or_insert_with(|| (x.clone(), Q::zero()));
                        r.1 += &self.theta;
                    }
                    (Touch::Above, Touch::Below) => {
                        let r = run.get_or_insert_with(|| (x + &self.theta, Q::zero()));
                        r.1 -= &self.theta;
                    }
                    _ => {}
                }
            }
        }
        if let Some((u, d)) = run.take() {
            if !d.is_zero() {
                out.extend(self.run_steps(old, &xs, &total, &u, &d)?);
            }
        }
        let nc = new.complex()?;
        nc.path_edges(new, &out)
            .map_err(|e| Error::internal("twist transport", format!("transported path invalid: {e}")))?;
        Ok(out)
    }

    /// Steps along the row tops from arc `u` by the signed displacement `d`.
    fn run_steps(&self, s: &RectSurface, xs: &[Q], total: &Q, u: &Q, d: &Q) -> Result<Vec<Step>> {
        let mut out = Vec::new();
        let mut cur = modulo(u, total);
        let end = &cur + d;
        let turns = |x: &Q| -> Q { x - modulo(x, total) };
        while cur != end {
            let base = turns(&cur);
            let local = &cur - &base;
            if d.is_positive() {
                let j = (0..xs.len()).rev().find(|&j| xs[j] <= local).unwrap_or(0);
                let right = &base + &xs[j] + &s.rectangles[self.row[j]].w;
                let next = right.min(end.clone());
                out.push(Step::new(self.row[j], Side::Top, &cur - &base - &xs[j], &next - &base - &xs[j]));
                cur = next;
            } else {
                // Left-closed slots: a point at a slot start belongs to the slot on its left.
                let (j, base) = match (0..xs.len()).rev().find(|&j| xs[j] < local) {
                    Some(j) => (j, base),
                    None => (xs.len() - 1, &base - total),
                };
                let left = &base + &xs[j];
                let next = left.max(end.clone());
                out.push(Step::new(self.row[j], Side::Top, &cur - &base - &xs[j], &next - &base - &xs[j]));
                cur = next;
            }
        }
        Ok(out)
    }
}

/// Cuts every rectangle of a row at mid-height, so that the top of the lower
/// halves is the core circle of the cylinder. Returns the surface and the
/// indices of the upper halves.
pub fn split_row_at_core(s: &RectSurface, row: &[usize]) -> Result<(RectSurface, Vec<usize>)> {
    let mut out = s.clone();
    let mut uppers = Vec::new();
    for &r in row {
        let r_h = out.rectangles.get(r).ok_or_else(|| Error::input(format!("no rectangle {r}")))?.h.clone();
        let half = r_h / Q::from_integer(2.into());
        uppers.push(out.rectangles.len());
        out = out.split_horizontally(r, &half)?;
    }
    Ok((out, uppers))
}

/// Transport of paths through [`split_row_at_core`].
pub fn map_steps_after_row_split(s: &RectSurface, row: &[usize], steps: &[Step]) -> Vec<Step> {
    let mut out = steps.to_vec();
    let mut next = s.rectangles.len();
    for &r in row {
        let half = &s.rectangles[r].h / Q::from_integer(2.into());
        out = super::surface::map_steps_after_split(&out, r, &half, next);
        next += 1;
    }
    out
}
