//! Leveled trivalent graphs of horizontal cylinders of a real-period form
//! with two simple poles, and the upward moves of a zero.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::surface::Q;
use crate::error::{Error, Result};
use crate::numfmt::{self, rat};

/// A cylinder from `lower` to `upper`; `None` marks the pole ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylEdge {
    pub lower: Option<usize>,
    pub upper: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderGraph {
    pub genus: usize,
    #[serde(with = "levels_serde")]
    pub levels: Vec<Q>,
    pub edges: Vec<CylEdge>,
}

mod levels_serde {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(crate::numfmt::rat_to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        use serde::de::Error;
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter().map(|x| crate::numfmt::parse_rat(x).map_err(D::Error::custom)).collect()
    }
}

/// How a descending path leaves a vertex with two downward edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    #[default]
    LowerIndex,
    HigherIndex,
}

/// Two descending paths from the top vertex, leaving it along different
/// edges and stopped at their first common vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeetingPaths {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub meet: usize,
    /// Number of distinct vertices on the two paths.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpwardMove {
    pub v0: usize,
    pub v1: usize,
    pub e0: usize,
    pub e1: usize,
    #[serde(with = "numfmt::rational")]
    pub new_level: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatingLevel {
    #[serde(with = "numfmt::rational")]
    pub level: Q,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Degeneration {
    pub moves: Vec<UpwardMove>,
    pub meeting_counts: Vec<usize>,
    pub graphs: Vec<CylinderGraph>,
    pub level: SeparatingLevel,
}

impl CylinderGraph {
    pub fn vertex_count(&self) -> usize {
        self.levels.len()
    }

    fn up_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].lower == Some(v)).collect()
    }

    fn down_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].upper == Some(v)).collect()
    }

    fn top_vertex(&self) -> usize {
        (0..self.levels.len()).max_by(|&a, &b| self.levels[a].cmp(&self.levels[b])).expect("nonempty")
    }

    fn height(&self, e: usize) -> Option<Q> {
        let ed = &self.edges[e];
        Some(&self.levels[ed.upper?] - &self.levels[ed.lower?])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.levels.len();
        if self.genus == 0 || n != 2 * self.genus {
            return Err(Error::input(format!("expected {} vertices, found {n}", 2 * self.genus)));
        }
        let mut sorted = self.levels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::input("vertex levels are not distinct"));
        }
        if self.edges.len() != 3 * self.genus + 1 {
            return Err(Error::input(format!("expected {} cylinders, found {}", 3 * self.genus + 1, self.edges.len())));
        }
        let mut bottoms = Vec::new();
        let mut tops = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for end in [e.lower, e.upper].into_iter().flatten() {
                if end >= n {
                    return Err(Error::input(format!("cylinder {i} ends at missing vertex {end}")));
                }
            }
            match (e.lower, e.upper) {
                (None, None) => return Err(Error::input(format!("cylinder {i} is infinite at both ends"))),
                (None, Some(v)) => bottoms.push(v),
                (Some(v), None) => tops.push(v),
                (Some(a), Some(b)) => {
                    if self.levels[a] >= self.levels[b] {
                        return Err(Error::input(format!("cylinder {i} has nonpositive height")));
                    }
                }
            }
        }
        let lowest = (0..n).min_by(|&a, &b| self.levels[a].cmp(&self.levels[b])).unwrap();
        if bottoms != vec![lowest] || tops != vec![self.top_vertex()] {
            return Err(Error::input("pole cylinders must be attached to the unique lowest and highest vertices"));
        }
        for v in 0..n {
            let (u, d) = (self.up_edges(v).len(), self.down_edges(v).len());
            if !matches!((u, d), (1, 2) | (2, 1)) {
                return Err(Error::input(format!("vertex {v} has {u} upward and {d} downward cylinders")));
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                if let (Some(a), Some(b)) = (e.lower, e.upper) {
                    for (x, y) in [(a, b), (b, a)] {
                        if x == v && !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::input("cylinder graph is not connected"));
        }
        Ok(())
    }

    /// A level strictly between the lowest and highest zero met by exactly
    /// one cylinder, if any.
    pub fn separating_level(&self) -> Option<SeparatingLevel> {
        let mut lv = self.levels.clone();
        lv.sort();
        for w in lv.windows(2) {
            let mid = (&w[0] + &w[1]) / Q::from_integer(2.into());
            let crossing: Vec<usize> = (0..self.edges.len())
                .filter(|&e| {
                    let ed = &self.edges[e];
                    let below = ed.lower.is_none_or(|v| self.levels[v] < mid);
                    let above = ed.upper.is_none_or(|v| self.levels[v] > mid);
                    below && above
                })
                .collect();
            if crossing.len() == 1 {
                return Some(SeparatingLevel { level: mid, edge: crossing[0] });
            }
        }
        None
    }

    pub fn meeting_paths(&self, choice: PathChoice) -> Result<MeetingPaths> {
        let top = self.top_vertex();
        let starts = self.down_edges(top);
        if starts.len() != 2 {
            return Err(Error::input("top vertex must have two downward cylinders"));
        }
        let pick = |v: usize| -> usize {
            let d = self.down_edges(v);
            match choice {
                PathChoice::LowerIndex => d[0],
                PathChoice::HigherIndex => d[d.len() - 1],
            }
        };
        let mut left = vec![starts[0]];
        let mut right = vec![starts[1]];
        let end = |p: &Vec<usize>| self.edges[*p.last().unwrap()].lower;
        loop {
            let (a, b) = (end(&left), end(&right));
            let (Some(a), Some(b)) = (a, b) else {
                return Err(Error::internal("meeting paths", "a path left through the bottom pole"));
            };
            if a == b {
                let mut vs: Vec<usize> = vec![top];
                for p in [&left, &right] {
                    vs.extend(p.iter().filter_map(|&e| self.edges[e].lower));
                }
                vs.sort();
                vs.dedup();
                return Ok(MeetingPaths { left, right, meet: a, count: vs.len() });
            }
            if self.levels[a] > self.levels[b] {
                left.push(pick(a));
            } else {
                right.push(pick(b));
            }
        }
    }

    /// Slides the zero `v0` up along its shorter upward cylinder `e0`, past
    /// the zero `v1` at its top, into the upward cylinder `e1` of `v1`.
    ///
    /// The downward cylinder of `v0` is reattached to `v1`, `e0` becomes the
    /// cylinder from `v1` to `v0`, and `e1` now starts at `v0`, which sits
    /// just above `v1`.
    pub fn upward_move(&self, v0: usize, e1: usize) -> Result<(CylinderGraph, UpwardMove)> {
        self.validate()?;
        if v0 >= self.levels.len() {
            return Err(Error::input(format!("no vertex {v0}")));
        }
        let ups = self.up_edges(v0);
        if ups.len() != 2 {
            return Err(Error::precondition(format!("vertex {v0} does not have two upward cylinders")));
        }
        let len = |e: usize| self.height(e);
        let e0 = match (len(ups[0]), len(ups[1])) {
            (Some(x), Some(y)) => if y < x { ups[1] } else { ups[0] },
            (Some(_), None) => ups[0],
            (None, _) => ups[1],
        };
        let v1 = self.edges[e0].upper.ok_or_else(|| Error::precondition("both upward cylinders are infinite"))?;
        if self.edges.get(e1).map(|e| e.lower) != Some(Some(v1)) {
            return Err(Error::input(format!("cylinder {e1} does not leave vertex {v1} upward")));
        }
        let d0 = self.down_edges(v0)[0];
        let above: Option<Q> = self.levels.iter().filter(|l| *l > &self.levels[v1]).min().cloned();
        let new_level = match above {
            Some(a) => (&self.levels[v1] + a) / Q::from_integer(2.into()),
            None => &self.levels[v1] + Q::one(),
        };
        let mut g = self.clone();
        g.edges[d0].upper = Some(v1);
        g.edges[e0] = CylEdge { lower: Some(v1), upper: Some(v0) };
        g.edges[e1].lower = Some(v0);
        g.levels[v0] = new_level.clone();
        g.validate().map_err(|e| Error::internal("upward move", e.to_string()))?;
        Ok((g, UpwardMove { v0, v1, e0, e1, new_level }))
    }

    /// Moves zeros upward along the meeting paths until a level is crossed by
    /// a single cylinder.
    pub fn degenerate_real(&self, choice: PathChoice) -> Result<Degeneration> {
        self.validate()?;
        if self.genus < 2 {
            return Err(Error::precondition("a separating cylinder between two positive-genus parts needs genus at least 2"));
        }
        let mut g = self.clone();
        let mut paths = g.meeting_paths(choice)?;
        let initial = paths.count;
        let mut out = Degeneration { moves: vec![], meeting_counts: vec![paths.count], graphs: vec![g.clone()], level: SeparatingLevel { level: Q::zero(), edge: 0 } };
        loop {
            if let Some(level) = g.separating_level() {
                out.level = level;
                if out.moves.len() + 2 > initial.max(2) {
                    return Err(Error::internal("degeneration", "move bound exceeded"));
                }
                return Ok(out);
            }
            if paths.count <= 2 {
                return Err(Error::internal("degeneration", "meeting paths are minimal but no level separates"));
            }
            let (la, lb) = (*paths.left.last().unwrap(), *paths.right.last().unwrap());
            let shorter_left = match (g.height(la), g.height(lb)) {
                (Some(x), Some(y)) => x < y || (x == y && la < lb),
                _ => return Err(Error::internal("degeneration", "meeting vertex on a pole cylinder")),
            };
            let path = if shorter_left { &mut paths.left } else { &mut paths.right };
            if path.len() < 2 {
                return Err(Error::internal("degeneration", "shorter cylinder ends at the top vertex"));
            }
            let e1 = path[path.len() - 2];
            let (next, mv) = g.upward_move(paths.meet, e1)?;
            path.pop();
            let before = paths.count;
            paths.count = {
                let mut vs = vec![next.top_vertex()];
                for p in [&paths.left, &paths.right] {
                    vs.extend(p.iter().filter_map(|&e| next.edges[e].lower));
                }
                vs.sort();
                vs.dedup();
                vs.len()
            };
            if paths.count + 1 != before || next.edges[*paths.left.last().unwrap()].lower != Some(paths.meet)
                || next.edges[*paths.right.last().unwrap()].lower != Some(paths.meet)
            {
                return Err(Error::internal("degeneration", "move did not shorten the meeting paths by one vertex"));
            }
            g = next;
            out.moves.push(mv);
            out.meeting_counts.push(paths.count);
            out.graphs.push(g.clone());
        }
    }
}

/// Random valid graph: zeros are swept upward, each splitting one cylinder
/// or merging two.
pub fn random_cylinder_graph<R: Rng>(rng: &mut R, genus: usize) -> CylinderGraph {
    let n = 2 * genus;
    let mut edges = vec![CylEdge { lower: None, upper: None }];
    let mut open = vec![0usize];
    let (mut splits, mut merges) = (genus, genus);
    let mut levels = Vec::new();
    let mut level = Q::zero();
    for v in 0..n {
        level += rat(rng.gen_range(1..=5), rng.gen_range(1..=4));
        levels.push(level.clone());
        let split = splits > 0 && (open.len() == 1 || merges == 0 || rng.gen_bool(0.5));
        if split {
            let e = open.swap_remove(rng.gen_range(0..open.len()));
            edges[e].upper = Some(v);
            for _ in 0..2 {
                open.push(edges.len());
                edges.push(CylEdge { lower: Some(v), upper: None });
            }
            splits -= 1;
        } else {
            for _ in 0..2 {
                let e = open.swap_remove(rng.gen_range(0..open.len()));
                edges[e].upper = Some(v);
            }
            open.push(edges.len());
            edges.push(CylEdge { lower: Some(v), upper: None });
            merges -= 1;
        }
    }
    debug_assert_eq!(open.len(), 1);
    // Relabel vertices in a random order so indices carry no level information.
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut new_levels = vec![Q::zero(); n];
    for (v, l) in levels.into_iter().enumerate() {
        new_levels[perm[v]] = l;
    }
    for e in &mut edges {
        e.lower = e.lower.map(|v| perm[v]);
        e.upper = e.upper.map(|v| perm[v]);
    }
    CylinderGraph { genus, levels: new_levels, edges }
}
