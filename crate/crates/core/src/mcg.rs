//! Torus mapping classes as unimodular integer matrices.
//!
//! A matrix `(p, q; r, s)` acts on column vectors `(a, b)`, hence on slopes,
//! and on direction values `z = b/a` by `z -> (r + s z) / (p + q z)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, isqrt};
use crate::error::{FareyError, Result};
use crate::metric::distance;
use crate::rational::Rational;
use crate::slope::{canonicalize_wide, Slope};
use crate::surd::{periodic_cf, QuadSurd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MappingClass {
    p: i64,
    q: i64,
    r: i64,
    s: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Periodic,
    Reducible,
    Anosov,
}

impl MappingClass {
    pub const IDENTITY: MappingClass = MappingClass {
        p: 1,
        q: 0,
        r: 0,
        s: 1,
    };

    /// Row-major entries; the determinant must be `+1` or `-1`.
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<MappingClass> {
        let det = p as i128 * s as i128 - q as i128 * r as i128;
        if det.abs() != 1 {
            return Err(FareyError::NotUnimodular { p, q, r, s, det });
        }
        Ok(MappingClass { p, q, r, s })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.p, self.q, self.r, self.s]
    }

    pub fn determinant(&self) -> i128 {
        self.p as i128 * self.s as i128 - self.q as i128 * self.r as i128
    }

    pub fn trace(&self) -> i128 {
        self.p as i128 + self.s as i128
    }

    /// `self * other`, so that `(self * other)(x) = self(other(x))`.
    pub fn compose(&self, other: &MappingClass) -> Result<MappingClass> {
        let e = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = arith::add(
                arith::mul(x as i128, y as i128, "matrix product")?,
                arith::mul(z as i128, w as i128, "matrix product")?,
                "matrix product",
            )?;
            i64::try_from(v).map_err(|_| FareyError::Overflow("matrix product"))
        };
        MappingClass::new(
            e(self.p, other.p, self.q, other.r)?,
            e(self.p, other.q, self.q, other.s)?,
            e(self.r, other.p, self.s, other.r)?,
            e(self.r, other.q, self.s, other.s)?,
        )
    }

    pub fn inverse(&self) -> MappingClass {
        // det = +-1, so the inverse is det * adj.
        let d = self.determinant() as i64;
        MappingClass {
            p: d * self.s,
            q: -d * self.q,
            r: -d * self.r,
            s: d * self.p,
        }
    }

    /// `self^n` by repeated multiplication (negative `n` uses the inverse).
    pub fn power(&self, n: i64) -> Result<MappingClass> {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = MappingClass::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Image of a direction value under `z -> (r + s z) / (p + q z)`,
    /// or `None` when the image is `1/0`.
    pub fn act_on_value(&self, z: Rational) -> Option<Rational> {
        let (n, d) = (z.numer(), z.denom());
        let num = self.r as i128 * d + self.s as i128 * n;
        let den = self.p as i128 * d + self.q as i128 * n;
        (den != 0).then(|| Rational::new(num, den))
    }
}

impl fmt::Display for MappingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.p, self.q, self.r, self.s)
    }
}

impl FromStr for MappingClass {
    type Err = FareyError;

    /// Row-major `"p,q,r,s"`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || FareyError::ParseMatrix(text.to_string());
        let entries: Vec<i64> = text
            .split(',')
            .map(|e| e.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match entries[..] {
            [p, q, r, s] => MappingClass::new(p, q, r, s),
            _ => Err(bad()),
        }
    }
}

impl Serialize for MappingClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MappingClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [p, q, r, s] = <[i64; 4]>::deserialize(deserializer)?;
        MappingClass::new(p, q, r, s).map_err(serde::de::Error::custom)
    }
}

/// Trace trichotomy for orientation-preserving classes.
pub fn classify(m: &MappingClass) -> Result<Classification> {
    let det = m.determinant();
    if det != 1 {
        return Err(FareyError::OrientationReversing(det));
    }
    Ok(match m.trace().abs() {
        0 | 1 => Classification::Periodic,
        2 => Classification::Reducible,
        _ => Classification::Anosov,
    })
}

pub fn act(m: &MappingClass, s: Slope) -> Result<Slope> {
    const CTX: &str = "matrix action";
    let (a, b) = (s.a() as i128, s.b() as i128);
    let x = arith::add(
        arith::mul(m.p as i128, a, CTX)?,
        arith::mul(m.q as i128, b, CTX)?,
        CTX,
    )?;
    let y = arith::add(
        arith::mul(m.r as i128, a, CTX)?,
        arith::mul(m.s as i128, b, CTX)?,
        CTX,
    )?;
    canonicalize_wide(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStep {
    pub n: u32,
    pub image: Slope,
    pub dist: u32,
}

/// Distances `d(s, m^n s)` for `n = 1..=N` with a linear fit
/// `estimate*n - lower_offset <= dist(n) <= estimate*n + upper_offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitReport {
    pub matrix: MappingClass,
    pub start: Slope,
    pub steps: Vec<OrbitStep>,
    /// Secant slope of `dist` over the second half of the run.
    pub growth_slope_estimate: Rational,
    pub lower_offset: Rational,
    pub upper_offset: Rational,
    pub estimator: String,
}

impl OrbitReport {
    /// `dist(n) >= estimate*n - lower_offset` and
    /// `dist(n) <= estimate*n + upper_offset` for every recorded step.
    pub fn is_self_consistent(&self) -> bool {
        self.steps.iter().all(|st| {
            let linear = self.growth_slope_estimate * Rational::from(st.n as i128);
            let d = Rational::from(st.dist as i128);
            d >= linear - self.lower_offset && d <= linear + self.upper_offset
        })
    }

    pub fn distances(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.dist).collect()
    }
}

pub fn orbit_growth(m: &MappingClass, start: Slope, steps: u32) -> Result<OrbitReport> {
    match classify(m)? {
        Classification::Anosov => {}
        _ => return Err(FareyError::NotAnosov(m.trace())),
    }
    if steps == 0 {
        return Err(FareyError::NoSteps);
    }
    let mut images = Vec::with_capacity(steps as usize);
    let mut cur = start;
    for _ in 0..steps {
        cur = act(m, cur)?;
        images.push(cur);
    }
    let dists = images
        .par_iter()
        .map(|&img| distance(start, img))
        .collect::<Result<Vec<_>>>()?;
    let steps_out: Vec<OrbitStep> = images
        .iter()
        .zip(&dists)
        .enumerate()
        .map(|(i, (&image, &dist))| OrbitStep {
            n: i as u32 + 1,
            image,
            dist,
        })
        .collect();

    // Second-half secant from ceil(N/2) to N; with N = 1 the secant starts at
    // n = 0 where the distance is 0.
    let n_end = steps as i128;
    let n_mid = if steps == 1 { 0 } else { (n_end + 1) / 2 };
    let dist_at = |n: i128| {
        if n == 0 {
            0
        } else {
            dists[n as usize - 1] as i128
        }
    };
    let estimate = Rational::new(dist_at(n_end) - dist_at(n_mid), n_end - n_mid);

    let residuals: Vec<Rational> = steps_out
        .iter()
        .map(|st| Rational::from(st.dist as i128) - estimate * Rational::from(st.n as i128))
        .collect();
    let lower_offset = residuals
        .iter()
        .map(|r| -*r)
        .max()
        .unwrap_or_else(Rational::zero)
        .max(Rational::zero());
    let upper_offset = residuals
        .iter()
        .copied()
        .max()
        .unwrap_or_else(Rational::zero)
        .max(Rational::zero());

    Ok(OrbitReport {
        matrix: *m,
        start,
        steps: steps_out,
        growth_slope_estimate: estimate,
        lower_offset,
        upper_offset,
        estimator: "second-half secant (dist(N) - dist(ceil(N/2))) / (N - ceil(N/2))".into(),
    })
}

/// Fixed directions of an Anosov class and the continued fraction of the
/// attracting one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EigenDirectionReport {
    pub matrix: MappingClass,
    pub trace: i128,
    pub determinant: i128,
    /// `trace^2 - 4 det`; eigenvalues are `(trace +- sqrt(discriminant)) / 2`.
    pub discriminant: i128,
    /// Eigenvalue of the attracting direction first.
    pub eigenvalues: [QuadSurd; 2],
    pub attracting_direction: QuadSurd,
    pub repelling_direction: QuadSurd,
    pub cf_prefix: Vec<i128>,
    pub preperiod: Vec<i128>,
    pub periodic: Vec<i128>,
    /// The block maps its own tail to itself under exact substitution.
    pub block_verified: bool,
    /// A high convergent of the attracting direction moves strictly closer
    /// to it under the action, and one of the repelling direction does not.
    pub attraction_verified: bool,
    /// The discriminant is not a perfect square, so neither fixed direction
    /// is a vertex of the Farey graph; on the torus this holds for every
    /// Anosov class.
    pub irrational: bool,
}

/// Depth of the convergent used to tell the attractor from the repeller.
const ATTRACTION_DEPTH: usize = 12;

fn convergent_value(coefficients: &[i128]) -> Result<Rational> {
    let narrowed: Vec<i64> = coefficients.iter().map(|&c| c as i64).collect();
    let (p, q) = *crate::slope::convergents(&narrowed)?
        .last()
        .ok_or(FareyError::Surd("empty prefix".into()))?;
    Ok(Rational::new(p, q))
}

/// Whether a convergent of `z` is pulled strictly closer to `z` by `m`.
fn pulls_closer(m: &MappingClass, z: &QuadSurd) -> Result<bool> {
    let prefix = periodic_cf(z)?.prefix(ATTRACTION_DEPTH);
    let c = convergent_value(&prefix)?;
    let Some(image) = m.act_on_value(c) else {
        return Ok(false);
    };
    let before = QuadSurd::rational(c).sub(z)?.abs()?;
    let after = QuadSurd::rational(image).sub(z)?.abs()?;
    Ok(after.cmp_value(&before)?.is_lt())
}

pub fn eigen_directions(m: &MappingClass, k: usize) -> Result<EigenDirectionReport> {
    if classify(m)? != Classification::Anosov {
        return Err(FareyError::NotAnosov(m.trace()));
    }
    let [p, q, _, s] = m.entries().map(|e| e as i128);
    // Eigenvectors (1, z): q z^2 + (p - s) z - r = 0, z = ((s - p) +- sqrt(disc)) / (2q).
    // q != 0 for Anosov classes (q = 0 forces |trace| = 2).
    let disc = m.trace() * m.trace() - 4 * m.determinant();
    let root = isqrt(disc);
    let irrational = root * root != disc;
    let half = |n: i128| Rational::new(n, 2 * q);
    let z_plus = QuadSurd::new(half(s - p), half(1), disc)?;
    let z_minus = QuadSurd::new(half(s - p), half(-1), disc)?;

    let plus_attracts = pulls_closer(m, &z_plus)?;
    let minus_attracts = pulls_closer(m, &z_minus)?;
    let (attracting, repelling) = if plus_attracts {
        (z_plus, z_minus)
    } else {
        (z_minus, z_plus)
    };
    let attraction_verified = plus_attracts != minus_attracts;

    // Eigenvalue for (1, z) is p + q z.
    let eigen = |z: &QuadSurd| {
        QuadSurd::rational(Rational::integer(q))
            .mul(z)?
            .add(&QuadSurd::rational(Rational::integer(p)))
    };
    let eigenvalues = [eigen(&attracting)?, eigen(&repelling)?];

    let cf = periodic_cf(&attracting)?;
    let block_verified = cf.verify(&attracting)?;

    Ok(EigenDirectionReport {
        matrix: *m,
        trace: m.trace(),
        determinant: m.determinant(),
        discriminant: disc,
        eigenvalues,
        attracting_direction: attracting,
        repelling_direction: repelling,
        cf_prefix: cf.prefix(k),
        preperiod: cf.preperiod,
        periodic: cf.block,
        block_verified,
        attraction_verified,
        irrational,
    })
}
