//! Graph distance in the Farey graph.
//!
//! Exact distances are computed by breadth-first search over the *ladder*
//! of a pair: the vertices of the Farey triangles crossed by the hyperbolic
//! geodesic joining the two endpoints. Every edge of such a triangle
//! separates the graph, so every geodesic between the endpoints stays on the
//! ladder and the search is exact. The ladder is read off the continued
//! fraction of the target after an `SL(2,Z)` change of coordinates that
//! moves the source to `1/0`.
//!
//! The window-truncated breadth-first searches below do not use the ladder
//! and serve as independent oracles.

use std::collections::{HashMap, VecDeque};
use std::ops::RangeInclusive;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, ceil_div, ext_gcd, floor_div};
use crate::error::{FareyError, Result};
use crate::slope::{canonicalize_wide, expand_rational, intersection_number, Slope};

/// Largest admissible window bound. Keeps every cone and oracle computation
/// comfortably inside `i128`.
pub const MAX_WINDOW: i64 = 1 << 24;

/// Lattice box `|a| <= max_a`, `|b| <= max_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Window {
    max_a: i64,
    max_b: i64,
}

impl Window {
    pub fn new(max_a: i64, max_b: i64) -> Result<Window> {
        let ok = |v: i64| (1..=MAX_WINDOW).contains(&v);
        if !ok(max_a) || !ok(max_b) {
            return Err(FareyError::InvalidWindow {
                max_a,
                max_b,
                limit: MAX_WINDOW,
            });
        }
        Ok(Window { max_a, max_b })
    }

    pub fn square(bound: i64) -> Result<Window> {
        Window::new(bound, bound)
    }

    pub fn max_a(&self) -> i64 {
        self.max_a
    }

    pub fn max_b(&self) -> i64 {
        self.max_b
    }

    pub fn contains(&self, s: Slope) -> bool {
        s.a().unsigned_abs() <= self.max_a as u64 && s.b().unsigned_abs() <= self.max_b as u64
    }

    /// Componentwise `self >= other`.
    pub fn covers(&self, other: &Window) -> bool {
        self.max_a >= other.max_a && self.max_b >= other.max_b
    }

    pub fn doubled(&self) -> Result<Window> {
        Window::new(self.max_a.saturating_mul(2), self.max_b.saturating_mul(2))
    }

    /// Every canonical slope in the window, sorted by `(b, a)`.
    pub fn slopes(&self) -> Vec<Slope> {
        let mut out = vec![Slope::ZERO];
        for b in 1..=self.max_b {
            for a in -self.max_a..=self.max_a {
                if a.unsigned_abs().gcd(&(b as u64)) == 1 {
                    out.push(Slope::new(a, b).expect("primitive and nonzero"));
                }
            }
        }
        out
    }
}

/// Slopes within graph distance `radius` of `center`, restricted to a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallReport {
    pub center: Slope,
    pub radius: u32,
    pub window: Window,
    pub members: Vec<BallMember>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallMember {
    pub slope: Slope,
    pub distance: u32,
}

impl BallReport {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn distance_of(&self, s: Slope) -> Option<u32> {
        self.members
            .binary_search_by(|m| m.slope.cmp(&s))
            .ok()
            .map(|i| self.members[i].distance)
    }

    pub fn slopes(&self) -> impl Iterator<Item = Slope> + '_ {
        self.members.iter().map(|m| m.slope)
    }
}

/// A path in the Farey graph certifying a distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicWitness {
    pub vertices: Vec<Slope>,
}

impl GeodesicWitness {
    /// Number of edges.
    pub fn length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Consecutive vertices are adjacent.
    pub fn is_path(&self) -> bool {
        !self.vertices.is_empty()
            && self
                .vertices
                .windows(2)
                .all(|w| intersection_number(w[0], w[1]) == 1)
    }
}

pub fn are_adjacent(s: Slope, t: Slope) -> bool {
    intersection_number(s, t) == 1
}

/// A particular solution `(x, y)` of `b_s x - a_s y = sign`.
fn particular_solution(s: Slope, sign: i128) -> (i128, i128) {
    let (a, b) = (s.a() as i128, s.b() as i128);
    let (g, u, v) = ext_gcd(b, -a);
    debug_assert_eq!(g, 1);
    (sign * u, sign * v)
}

fn family_member(s: Slope, x0: i128, y0: i128, t: i128) -> Result<Slope> {
    let x = arith::add(
        x0,
        arith::mul(t, s.a() as i128, "neighbor family")?,
        "neighbor family",
    )?;
    let y = arith::add(
        y0,
        arith::mul(t, s.b() as i128, "neighbor family")?,
        "neighbor family",
    )?;
    canonicalize_wide(x, y)
}

/// The neighbours `(x_eps + t a_s, y_eps + t b_s)` of `s` for `t` in
/// `t_range` and both signs `eps`, deduplicated and sorted by `(b, a)`.
///
/// Every neighbour of `s` appears for some `t`. The `eps = -1` family is the
/// negation of the `eps = +1` family, so after canonicalisation they agree.
pub fn neighbor_family(s: Slope, t_range: RangeInclusive<i64>) -> Result<Vec<Slope>> {
    let mut out = Vec::new();
    for sign in [1, -1] {
        let (x0, y0) = particular_solution(s, sign);
        for t in t_range.clone() {
            out.push(family_member(s, x0, y0, t as i128)?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Range of `t` with `|x0 + t step| <= bound`; `None` when unconstrained.
fn clip(x0: i128, step: i128, bound: i128) -> Option<(i128, i128)> {
    if step == 0 {
        return if x0.abs() <= bound {
            None
        } else {
            Some((1, 0))
        };
    }
    Some(if step > 0 {
        (ceil_div(-bound - x0, step), floor_div(bound - x0, step))
    } else {
        (ceil_div(bound - x0, step), floor_div(-bound - x0, step))
    })
}

/// Neighbours of `s` inside `window`, using the `eps = +1` family with its
/// parameter range clipped to the window.
pub fn neighbors_in_window(s: Slope, window: &Window) -> Vec<Slope> {
    let (x0, y0) = particular_solution(s, 1);
    let ra = clip(x0, s.a() as i128, window.max_a as i128);
    let rb = clip(y0, s.b() as i128, window.max_b as i128);
    let (lo, hi) = match (ra, rb) {
        (Some((l1, h1)), Some((l2, h2))) => (l1.max(l2), h1.min(h2)),
        (Some(r), None) | (None, Some(r)) => r,
        (None, None) => unreachable!("(a, b) is nonzero"),
    };
    let mut out = Vec::new();
    let mut t = lo;
    while t <= hi {
        // Window bounds keep these values far from overflow.
        out.push(family_member(s, x0, y0, t).expect("window-bounded neighbour"));
        t += 1;
    }
    out
}

/// The ladder subgraph of a pair of non-adjacent distinct slopes.
struct Ladder {
    vertices: Vec<Slope>,
    adjacency: Vec<Vec<usize>>,
    source: usize,
    target: usize,
}

/// Chain indices `1..=len` kept from a fan around one pivot. Only the first
/// and last three chain vertices can lie on a geodesic: any longer detour
/// along the chain is beaten by the two edges through the pivot.
fn fan_indices(len: i128) -> impl Iterator<Item = i128> {
    let head = 1..=len.min(2);
    let tail = (len - 2).max(3)..=len;
    head.chain(tail)
}

impl Ladder {
    fn build(s: Slope, t: Slope) -> Result<Ladder> {
        const CTX: &str = "ladder";
        let (a, b) = (s.a() as i128, s.b() as i128);
        // a v - b u = 1; g = [[b, -a], [v, -u]] sends s to (0, 1) and
        // g^{-1} = [[-u, a], [-v, b]].
        let (_, v, u) = ext_gcd(a, -b);
        let to_source_frame = |x: i128, y: i128| -> Result<(i128, i128)> {
            Ok((arith::det2(b, a, y, x, CTX)?, arith::det2(v, u, y, x, CTX)?))
        };
        let from_source_frame = |x: i128, y: i128| -> Result<Slope> {
            let nx = arith::add(arith::mul(-u, x, CTX)?, arith::mul(a, y, CTX)?, CTX)?;
            let ny = arith::add(arith::mul(-v, x, CTX)?, arith::mul(b, y, CTX)?, CTX)?;
            canonicalize_wide(nx, ny)
        };

        let (mut x, mut y) = to_source_frame(t.a() as i128, t.b() as i128)?;
        if x < 0 {
            (x, y) = (-x, -y);
        }
        debug_assert!(x > 1, "pair must be non-adjacent");
        let cf = expand_rational(y, x);

        let mut frame: Vec<(i128, i128)> = vec![(0, 1), (1, cf[0])];
        let (mut older, mut old) = ((0i128, 1i128), (1i128, cf[0]));
        for &c in &cf[1..] {
            for j in fan_indices(c) {
                let vx = arith::add(older.0, arith::mul(j, old.0, CTX)?, CTX)?;
                let vy = arith::add(older.1, arith::mul(j, old.1, CTX)?, CTX)?;
                frame.push((vx, vy));
            }
            let next = (
                arith::add(older.0, arith::mul(c, old.0, CTX)?, CTX)?,
                arith::add(older.1, arith::mul(c, old.1, CTX)?, CTX)?,
            );
            (older, old) = (old, next);
        }

        let mut vertices = Vec::with_capacity(frame.len());
        let mut index = HashMap::new();
        for (fx, fy) in frame {
            let slope = from_source_frame(fx, fy)?;
            index.entry(slope).or_insert_with(|| {
                vertices.push(slope);
                vertices.len() - 1
            });
        }
        let target = *index
            .get(&t)
            .ok_or(FareyError::Overflow("ladder endpoint"))?;
        let adjacency = (0..vertices.len())
            .map(|i| {
                (0..vertices.len())
                    .filter(|&j| are_adjacent(vertices[i], vertices[j]))
                    .collect()
            })
            .collect();
        Ok(Ladder {
            vertices,
            adjacency,
            source: 0,
            target,
        })
    }

    fn distances_to_target(&self) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        let mut queue = VecDeque::from([self.target]);
        dist[self.target] = 0;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if dist[j] == u32::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        dist
    }
}

/// Exact Farey-graph distance.
///
/// Fails only when intermediate coordinates leave the `i128` range.
pub fn distance(s: Slope, t: Slope) -> Result<u32> {
    match intersection_number(s, t) {
        0 => Ok(0),
        1 => Ok(1),
        _ => {
            let ladder = Ladder::build(s, t)?;
            Ok(ladder.distances_to_target()[ladder.source])
        }
    }
}

/// A shortest path from `s` to `t`. At each step the next vertex is the
/// `(b, a)`-least neighbour one step closer to `t`.
pub fn geodesic_witness(s: Slope, t: Slope) -> Result<GeodesicWitness> {
    let vertices = match intersection_number(s, t) {
        0 => vec![s],
        1 => vec![s, t],
        _ => {
            let ladder = Ladder::build(s, t)?;
            let dist = ladder.distances_to_target();
            let mut path = vec![ladder.source];
            let mut cur = ladder.source;
            while cur != ladder.target {
                cur = ladder.adjacency[cur]
                    .iter()
                    .copied()
                    .filter(|&j| dist[j] + 1 == dist[cur])
                    .min_by_key(|&j| ladder.vertices[j])
                    .expect("connected ladder");
                path.push(cur);
            }
            path.into_iter().map(|i| ladder.vertices[i]).collect()
        }
    };
    Ok(GeodesicWitness { vertices })
}

/// Closed ball of radius `n` around `center`, truncated to `window`.
///
/// Each lattice point of the window is queried independently.
pub fn ball(center: Slope, n: u32, window: Window) -> Result<BallReport> {
    let candidates = window.slopes();
    let members = candidates
        .par_iter()
        .map(|&s| {
            distance(center, s).map(|d| {
                (d <= n).then_some(BallMember {
                    slope: s,
                    distance: d,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(BallReport {
        center,
        radius: n,
        window,
        members,
    })
}

/// Breadth-first distance in the finite graph of canonical slopes inside
/// `window`. `None` means the pair is disconnected there (or an endpoint
/// lies outside the window).
pub fn oracle_distance_bfs(s: Slope, t: Slope, window: Window) -> Option<u32> {
    if !window.contains(s) || !window.contains(t) {
        return None;
    }
    if s == t {
        return Some(0);
    }
    let mut dist = HashMap::from([(s, 0u32)]);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for w in neighbors_in_window(u, &window) {
            if w == t {
                return Some(d + 1);
            }
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    None
}

/// Single-source version of [`oracle_distance_bfs`]: truncated-graph
/// distances from `center` to every slope of the window it reaches.
pub fn oracle_distances(center: Slope, window: Window) -> HashMap<Slope, u32> {
    let mut dist = HashMap::new();
    if !window.contains(center) {
        return dist;
    }
    dist.insert(center, 0u32);
    let mut queue = VecDeque::from([center]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for w in neighbors_in_window(u, &window) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    dist
}

/// Window bounded by the endpoints' own coordinates.
pub fn safety_window(s: Slope, t: Slope) -> Window {
    let a = s.a().unsigned_abs().max(t.a().unsigned_abs()).max(1);
    let b = s.b().unsigned_abs().max(t.b().unsigned_abs()).max(1);
    Window {
        max_a: a.min(MAX_WINDOW as u64) as i64,
        max_b: b.min(MAX_WINDOW as u64) as i64,
    }
}

/// Bidirectional breadth-first search restricted to `window`.
pub fn bidirectional_bfs(s: Slope, t: Slope, window: Window) -> Option<u32> {
    if !window.contains(s) || !window.contains(t) {
        return None;
    }
    if s == t {
        return Some(0);
    }
    let mut seen = [HashMap::from([(s, 0u32)]), HashMap::from([(t, 0u32)])];
    let mut frontier = [vec![s], vec![t]];
    loop {
        let side = usize::from(frontier[1].len() < frontier[0].len());
        if frontier[side].is_empty() {
            return None;
        }
        let mut best: Option<u32> = None;
        let mut next = Vec::new();
        for &u in &frontier[side] {
            let d = seen[side][&u];
            for w in neighbors_in_window(u, &window) {
                if let Some(&e) = seen[1 - side].get(&w) {
                    best = Some(best.map_or(d + 1 + e, |m| m.min(d + 1 + e)));
                }
                if let std::collections::hash_map::Entry::Vacant(e) = seen[side].entry(w) {
                    e.insert(d + 1);
                    next.push(w);
                }
            }
        }
        if best.is_some() {
            return best;
        }
        frontier[side] = next;
    }
}

/// Outcome of the window-doubling distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowedDistance {
    pub distance: u32,
    /// Window at which the value was first confirmed by a doubled window.
    pub window: Window,
    pub doublings: u32,
}

/// Bidirectional search in the safety window of the pair, repeated with a
/// doubled window until two consecutive windows agree.
pub fn windowed_distance(s: Slope, t: Slope) -> Result<WindowedDistance> {
    const MAX_DOUBLINGS: u32 = 8;
    let mut window = safety_window(s, t);
    let mut current = bidirectional_bfs(s, t, window);
    for doublings in 0..MAX_DOUBLINGS {
        let wider = match window.doubled() {
            Ok(w) => w,
            Err(_) => break,
        };
        let next = bidirectional_bfs(s, t, wider);
        if let (Some(d), true) = (current, current == next) {
            return Ok(WindowedDistance {
                distance: d,
                window,
                doublings,
            });
        }
        window = wider;
        current = next;
    }
    Err(FareyError::Unstable(s, t))
}
