//! Cones of directions, the cone cover of a ball around `1/0`, and safe
//! cones avoiding that ball.
//!
//! A cone is an open interval `(lo, hi)` of finite direction values. A slope
//! `b/a` with `a != 0` lies in it when `lo < b/a < hi`. For `lo >= 0` this is
//! the sector `{x > 0, lo < y/x < hi}` of the upper half-plane; a cone with
//! `hi <= 0` is the mirror sector on the `x < 0` side.
//!
//! The cover of `B_n`, the ball of radius `n` around `1/0`, uses the lines
//! `X+- = {a = +-1}`, `Y = {b = 1}` and the points `1/0`, `0/1`, plus pairwise
//! disjoint cones built level by level:
//!
//! * for each anchor at distance `l - 1` (an integer `k/1` when `l = 2`) that
//!   is not already inside a cone, a cone around the anchor grows to absorb
//!   the nearest of its distance-`l` neighbours while staying disjoint from
//!   every cone placed so far;
//! * every distance-`l` member left uncovered is an exceptional point and
//!   gets its own cone of half-width `1/(4 A^2)`.
//!
//! Directions with denominators at most `A` are at least `1/A^2` apart, so
//! cone endpoints never coincide with window directions and a fresh
//! exceptional cone never meets an existing one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FareyError, Result};
use crate::metric::{ball, neighbors_in_window, oracle_distances, BallReport, Window};
use crate::rational::Rational;
use crate::slope::Slope;

/// Direction of a slope, ordered by its value `b/a` with `1/0` largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction(Slope);

impl Direction {
    pub fn of(s: Slope) -> Direction {
        Direction(s)
    }

    pub fn slope(&self) -> Slope {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinity()
    }

    pub fn value(&self) -> Option<Rational> {
        self.0
            .value()
            .map(|(n, d)| Rational::new(n as i128, d as i128))
    }
}

impl Ord for Direction {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0.value(), other.0.value()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some((n1, d1)), Some((n2, d2))) => {
                (n1 as i128 * d2 as i128).cmp(&(n2 as i128 * d1 as i128))
            }
        }
    }
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Open interval `(lo, hi)` of direction values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSector")]
pub struct ConeSector {
    lo: Rational,
    hi: Rational,
}

#[derive(Deserialize)]
struct RawSector {
    lo: Rational,
    hi: Rational,
}

impl TryFrom<RawSector> for ConeSector {
    type Error = FareyError;

    fn try_from(raw: RawSector) -> Result<Self> {
        ConeSector::new(raw.lo, raw.hi)
    }
}

impl ConeSector {
    pub fn new(lo: Rational, hi: Rational) -> Result<ConeSector> {
        if lo >= hi {
            return Err(FareyError::EmptyCone {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(ConeSector { lo, hi })
    }

    pub fn lo(&self) -> Rational {
        self.lo
    }

    pub fn hi(&self) -> Rational {
        self.hi
    }

    pub fn width(&self) -> Rational {
        self.hi - self.lo
    }

    pub fn contains(&self, s: Slope) -> bool {
        cone_contains(self, s)
    }

    fn contains_value(&self, v: Rational) -> bool {
        self.lo < v && v < self.hi
    }

    pub fn overlaps(&self, other: &ConeSector) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

impl fmt::Display for ConeSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Sign of `n/d - r` for `d > 0`, by one integer cross product.
fn cross_sign(n: i64, d: i64, r: Rational) -> Ordering {
    match (n as i128)
        .checked_mul(r.denom())
        .zip(r.numer().checked_mul(d as i128))
    {
        Some((lhs, rhs)) => lhs.cmp(&rhs),
        None => Rational::new(n as i128, d as i128).cmp(&r),
    }
}

/// Whether `s` lies in the open cone, decided by two cross-product signs.
/// `1/0` is never a member.
pub fn cone_contains(c: &ConeSector, s: Slope) -> bool {
    match s.value() {
        None => false,
        Some((n, d)) => {
            cross_sign(n, d, c.lo) == Ordering::Greater && cross_sign(n, d, c.hi) == Ordering::Less
        }
    }
}

/// On `X+-`, on `Y`, or one of `1/0`, `0/1`.
pub fn on_exceptional_set(s: Slope) -> bool {
    s.a().abs() == 1 || s.b() == 1 || s == Slope::INFINITY || s == Slope::ZERO
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    /// Grown around an anchor direction to absorb its neighbours.
    Anchor,
    /// Small cone around a single leftover member.
    Exceptional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCone {
    #[serde(flatten)]
    pub sector: ConeSector,
    pub kind: ConeKind,
    /// The anchor direction, or the exceptional point itself.
    pub around: Slope,
    /// Ball radius at which the cone was introduced.
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub lines: Vec<String>,
    pub points: Vec<Slope>,
}

impl Default for ExceptionalSet {
    fn default() -> Self {
        ExceptionalSet {
            lines: vec!["X+: a = 1".into(), "X-: a = -1".into(), "Y: b = 1".into()],
            points: vec![Slope::INFINITY, Slope::ZERO],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub disjoint: bool,
    pub covering: bool,
    pub safe: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverReport {
    pub n: u32,
    pub window: Window,
    /// Sorted by `lo`.
    pub cones: Vec<CoverCone>,
    pub exceptional: ExceptionalSet,
    /// Maximal open intervals of positive directions, between the smallest
    /// and largest positive ball direction, meeting no cone and no member.
    pub gaps: Vec<ConeSector>,
    pub safe_cone: Option<ConeSector>,
    pub certificates: Certificates,
}

impl CoverReport {
    pub fn covers(&self, s: Slope) -> bool {
        on_exceptional_set(s) || self.cones.iter().any(|c| c.sector.contains(s))
    }
}

/// Disjoint cones keyed by their lower endpoint.
#[derive(Default)]
struct ConeSet {
    by_lo: BTreeMap<Rational, CoverCone>,
}

impl ConeSet {
    fn containing(&self, v: Rational) -> Option<&CoverCone> {
        self.by_lo
            .range(..v)
            .next_back()
            .map(|(_, c)| c)
            .filter(|c| c.sector.contains_value(v))
    }

    fn overlaps(&self, candidate: &ConeSector) -> bool {
        // Cones are disjoint and sorted, so the last one starting below
        // `candidate.hi` reaches furthest right among those that could meet it.
        self.by_lo
            .range(..candidate.hi)
            .next_back()
            .is_some_and(|(_, c)| c.sector.hi > candidate.lo)
    }

    fn insert(&mut self, cone: CoverCone) -> Result<()> {
        if self.overlaps(&cone.sector) {
            return Err(FareyError::CoverFailed(format!(
                "cone {} around {} overlaps an existing cone",
                cone.sector, cone.around
            )));
        }
        self.by_lo.insert(cone.sector.lo, cone);
        Ok(())
    }
}

fn value_of(s: Slope) -> Rational {
    Direction(s).value().expect("finite direction")
}

/// Half-width of exceptional cones and inward margin of safe cones.
pub fn cone_margin(window: &Window) -> Rational {
    let a = window.max_a() as i128;
    Rational::new(1, 4 * a * a)
}

fn disjoint(cones: &[CoverCone]) -> bool {
    let mut sectors: Vec<ConeSector> = cones.iter().map(|c| c.sector).collect();
    sectors.sort_by_key(|s| s.lo);
    sectors.iter().all(|s| s.lo < s.hi) && sectors.windows(2).all(|w| w[0].hi <= w[1].lo)
}

fn covering<'a>(cones: &[CoverCone], members: impl IntoIterator<Item = &'a Slope>) -> bool {
    let mut sectors: Vec<ConeSector> = cones.iter().map(|c| c.sector).collect();
    sectors.sort_by_key(|s| s.lo);
    members.into_iter().all(|&s| {
        if on_exceptional_set(s) {
            return true;
        }
        let v = value_of(s);
        let idx = sectors.partition_point(|c| c.lo < v);
        idx > 0 && sectors[idx - 1].contains(s)
    })
}

fn gaps(cones: &[CoverCone], ball: &BallReport) -> Vec<ConeSector> {
    // Obstacles on the positive side: cones and member directions.
    let mut obstacles: Vec<(Rational, Rational)> = cones
        .iter()
        .filter(|c| c.sector.lo >= Rational::zero())
        .map(|c| (c.sector.lo, c.sector.hi))
        .collect();
    obstacles.extend(
        ball.slopes()
            .filter(|s| s.a() > 0 && s.b() > 0)
            .map(|s| (value_of(s), value_of(s))),
    );
    obstacles.sort();
    let mut out = Vec::new();
    let mut iter = obstacles.into_iter();
    let Some((_, mut reach)) = iter.next() else {
        return out;
    };
    for (lo, hi) in iter {
        if lo > reach {
            out.push(ConeSector { lo: reach, hi: lo });
        }
        reach = reach.max(hi);
    }
    out
}

fn widest_safe_gap(gaps: &[ConeSector], margin: Rational) -> Option<(ConeSector, ConeSector)> {
    let two = Rational::integer(2);
    gaps.iter()
        .filter(|g| g.width() > margin * two)
        // Widest first; ties go to the smallest lower bound.
        .min_by(|x, y| y.width().cmp(&x.width()).then(x.lo.cmp(&y.lo)))
        .map(|g| {
            let shrunk = ConeSector {
                lo: g.lo + margin,
                hi: g.hi - margin,
            };
            (*g, shrunk)
        })
}

/// The cone cover of `B_n` inside `window`, with certificates checked
/// against the ball that was used to build it.
pub fn build_cover(n: u32, window: Window) -> Result<CoverReport> {
    let ball = ball(Slope::INFINITY, n, window)?;
    let margin = cone_margin(&window);
    let zero = Rational::zero();
    let dist: HashMap<Slope, u32> = ball.members.iter().map(|m| (m.slope, m.distance)).collect();
    let mut cones = ConeSet::default();

    for level in 2..=n {
        let fresh: Vec<Slope> = ball
            .members
            .iter()
            .filter(|m| m.distance == level && !on_exceptional_set(m.slope))
            .map(|m| m.slope)
            .collect();

        // Parent: the (b, a)-least neighbour one level down with a finite
        // nonzero direction.
        let mut groups: BTreeMap<Slope, Vec<Slope>> = BTreeMap::new();
        for &s in &fresh {
            let parent = neighbors_in_window(s, &window)
                .into_iter()
                .filter(|p| dist.get(p) == Some(&(level - 1)) && p.a() != 0 && p.b() != 0)
                .min();
            if let Some(p) = parent {
                groups.entry(p).or_default().push(s);
            }
        }

        for (anchor, mut group) in groups {
            let av = value_of(anchor);
            if cones.containing(av).is_some() {
                // Nested inside an earlier cone: nothing new to grow.
                continue;
            }
            group.sort_by_key(|&s| ((value_of(s) - av).abs(), s));
            let (mut lo, mut hi) = (av, av);
            let mut absorbed = 0usize;
            for s in group {
                let v = value_of(s);
                let (clo, chi) = (lo.min(v), hi.max(v));
                let padded = ConeSector {
                    lo: clo - margin,
                    hi: chi + margin,
                };
                if padded.contains_value(zero) || cones.overlaps(&padded) {
                    continue;
                }
                (lo, hi) = (clo, chi);
                absorbed += 1;
            }
            if absorbed > 0 {
                cones.insert(CoverCone {
                    sector: ConeSector::new(lo - margin, hi + margin)?,
                    kind: ConeKind::Anchor,
                    around: anchor,
                    level,
                })?;
            }
        }

        for &s in &fresh {
            let v = value_of(s);
            if cones.containing(v).is_none() {
                cones.insert(CoverCone {
                    sector: ConeSector::new(v - margin, v + margin)?,
                    kind: ConeKind::Exceptional,
                    around: s,
                    level,
                })?;
            }
        }
    }

    let cones: Vec<CoverCone> = cones.by_lo.into_values().collect();
    let gaps = gaps(&cones, &ball);
    let safe_cone = widest_safe_gap(&gaps, margin).map(|(_, c)| c);
    let certificates = Certificates {
        disjoint: disjoint(&cones),
        covering: covering(&cones, ball.members.iter().map(|m| &m.slope)),
        safe: safe_cone.is_some_and(|c| !ball.slopes().any(|s| c.contains(s))),
    };
    if !certificates.disjoint || !certificates.covering {
        return Err(FareyError::CoverFailed(format!(
            "n = {n}: disjoint = {}, covering = {}",
            certificates.disjoint, certificates.covering
        )));
    }
    Ok(CoverReport {
        n,
        window,
        cones,
        exceptional: ExceptionalSet::default(),
        gaps,
        safe_cone,
        certificates,
    })
}

/// Independent re-check of a cover against a ball recomputed by the
/// window-truncated breadth-first oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverVerification {
    pub disjoint: bool,
    pub covering: bool,
}

pub fn verify_cover(report: &CoverReport) -> CoverVerification {
    let members: Vec<Slope> = oracle_distances(Slope::INFINITY, report.window)
        .into_iter()
        .filter(|&(_, d)| d <= report.n)
        .map(|(s, _)| s)
        .collect();
    CoverVerification {
        disjoint: disjoint(&report.cones),
        covering: covering(&report.cones, &members),
    }
}

/// Whether no member of the oracle ball `B_n` inside `window` lies in `cone`.
pub fn verify_safe_cone(cone: &ConeSector, n: u32, window: Window) -> bool {
    oracle_distances(Slope::INFINITY, window)
        .into_iter()
        .all(|(s, d)| d > n || !cone.contains(s))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SafeConeCertificate {
    pub n: u32,
    pub window: Window,
    pub cone: ConeSector,
    /// The gap the cone was cut from.
    pub gap: ConeSector,
    pub margin: Rational,
    pub ball_size: usize,
    /// No ball member lies in the cone.
    pub certificate: bool,
}

/// A positive cone avoiding every member of `B_n` inside `window`: the
/// widest gap of the cover, pulled inward by [`cone_margin`] on both sides.
pub fn find_safe_cone(n: u32, window: Window) -> Result<SafeConeCertificate> {
    if n < 1 {
        return Err(FareyError::RadiusTooSmall { min: 1, got: n });
    }
    let report = build_cover(n, window)?;
    let margin = cone_margin(&window);
    let ball = ball(Slope::INFINITY, n, window)?;
    let Some((gap, cone)) = widest_safe_gap(&report.gaps, margin) else {
        return Err(FareyError::NoSafeCone {
            obstructing: ball.slopes().filter(|s| s.a() > 0 && s.b() > 0).collect(),
        });
    };
    let certificate = !ball.slopes().any(|s| cone.contains(s));
    Ok(SafeConeCertificate {
        n,
        window,
        cone,
        gap,
        margin,
        ball_size: ball.len(),
        certificate,
    })
}
