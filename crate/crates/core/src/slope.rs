//! Slopes on the torus as primitive lattice vectors.
//!
//! A slope `b/a` is stored as the lattice point `(a, b)` normalised so that
//! `b > 0`, or `b = 0` and `a = 1`. With that convention `1/0` is `(0, 1)`
//! and `0/1` is `(1, 0)`. The derived ordering is lexicographic on `(b, a)`,
//! which is the ordering used by every report in the crate.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, floor_div};
use crate::error::{FareyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    // Field order drives the derived `Ord`: (b, a) lexicographic.
    b: i64,
    a: i64,
}

impl Slope {
    /// `1/0`, the vertical direction `(0, 1)`.
    pub const INFINITY: Slope = Slope { b: 1, a: 0 };
    /// `0/1`, the horizontal direction `(1, 0)`.
    pub const ZERO: Slope = Slope { b: 0, a: 1 };

    /// Canonical slope through the lattice vector `(x, y)`.
    pub fn new(x: i64, y: i64) -> Result<Slope> {
        canonicalize(x, y)
    }

    /// The integer slope `k/1`.
    pub fn integer(k: i64) -> Slope {
        canonicalize(1, k).expect("(1, k) is primitive")
    }

    /// Horizontal lattice coordinate.
    pub fn a(&self) -> i64 {
        self.a
    }

    /// Vertical lattice coordinate.
    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn is_infinity(&self) -> bool {
        self.a == 0
    }

    /// `|b_s a_t - a_s b_t|`.
    pub fn intersection_number(&self, other: &Slope) -> u128 {
        intersection_number(*self, *other)
    }

    /// The signed value `b/a` as `(numerator, denominator)` with a positive
    /// denominator, or `None` for `1/0`.
    pub fn value(&self) -> Option<(i64, i64)> {
        match self.a {
            0 => None,
            a if a < 0 => Some((-self.b, -a)),
            a => Some((self.b, a)),
        }
    }
}

/// Canonical representative of the projective class of `(x, y)`.
pub fn canonicalize(x: i64, y: i64) -> Result<Slope> {
    canonicalize_wide(x as i128, y as i128)
}

pub(crate) fn canonicalize_wide(x: i128, y: i128) -> Result<Slope> {
    if x == 0 && y == 0 {
        return Err(FareyError::ZeroVector);
    }
    let g = x.gcd(&y);
    let (mut x, mut y) = (x / g, y / g);
    if y < 0 || (y == 0 && x < 0) {
        x = -x;
        y = -y;
    }
    let a = i64::try_from(x).map_err(|_| FareyError::Overflow("slope coordinates"))?;
    let b = i64::try_from(y).map_err(|_| FareyError::Overflow("slope coordinates"))?;
    Ok(Slope { b, a })
}

/// Geometric intersection number of two slopes, `|b_s a_t - a_s b_t|`.
pub fn intersection_number(s: Slope, t: Slope) -> u128 {
    // i64 products cannot overflow i128, nor can their difference.
    let d = s.b as i128 * t.a as i128 - s.a as i128 * t.b as i128;
    d.unsigned_abs()
}

/// Componentwise sum of two adjacent slopes.
pub fn mediant(s: Slope, t: Slope) -> Result<Slope> {
    let i = intersection_number(s, t);
    if i != 1 {
        return Err(FareyError::NotAdjacent(s, t, i));
    }
    canonicalize_wide(s.a as i128 + t.a as i128, s.b as i128 + t.b as i128)
}

/// Regular continued fraction of a finite rational number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFExpansion {
    pub coefficients: Vec<i64>,
    /// `true` when the list is the complete expansion, `false` for a prefix.
    pub exact: bool,
}

impl CFExpansion {
    /// Folds the coefficients back into `(numerator, denominator)`.
    pub fn convergent(&self) -> Result<(i128, i128)> {
        let convergents = self.convergents()?;
        convergents
            .last()
            .copied()
            .ok_or(FareyError::Overflow("empty continued fraction"))
    }

    /// All convergents `p_k/q_k`, `k = 0..len`.
    pub fn convergents(&self) -> Result<Vec<(i128, i128)>> {
        convergents(&self.coefficients)
    }
}

pub(crate) fn convergents(coefficients: &[i64]) -> Result<Vec<(i128, i128)>> {
    // p_{-2}/q_{-2} = 0/1, p_{-1}/q_{-1} = 1/0, p_k = c_k p_{k-1} + p_{k-2}.
    let (mut p2, mut q2) = (0i128, 1i128);
    let (mut p1, mut q1) = (1i128, 0i128);
    let mut out = Vec::with_capacity(coefficients.len());
    for &c in coefficients {
        let c = c as i128;
        let p = arith::add(arith::mul(c, p1, "convergent")?, p2, "convergent")?;
        let q = arith::add(arith::mul(c, q1, "convergent")?, q2, "convergent")?;
        (p2, q2, p1, q1) = (p1, q1, p, q);
        out.push((p, q));
    }
    Ok(out)
}

/// Euclidean expansion of `num/den` with `den > 0`.
pub(crate) fn expand_rational(mut num: i128, mut den: i128) -> Vec<i128> {
    debug_assert!(den > 0);
    let mut out = Vec::new();
    loop {
        let c = floor_div(num, den);
        out.push(c);
        let r = num - c * den;
        if r == 0 {
            break;
        }
        (num, den) = (den, r);
    }
    out
}

/// Continued fraction of the signed rational value `b/a`.
pub fn continued_fraction(s: Slope) -> Result<CFExpansion> {
    let (num, den) = s.value().ok_or(FareyError::InfiniteSlope)?;
    Ok(CFExpansion {
        // Partial quotients of an i64 ratio fit in i64.
        coefficients: expand_rational(num as i128, den as i128)
            .into_iter()
            .map(|c| c as i64)
            .collect(),
        exact: true,
    })
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "1/0"),
            Some((num, den)) => write!(f, "{num}/{den}"),
        }
    }
}

/// Parses `"b/a"` (integers, either may be signed) or `"inf"`.
pub fn parse_slope(text: &str) -> Result<Slope> {
    let err = |column: usize, reason: &'static str| FareyError::ParseSlope {
        input: text.to_string(),
        column,
        reason,
    };
    if text == "inf" {
        return Ok(Slope::INFINITY);
    }
    if text.is_empty() {
        return Err(err(1, "empty input"));
    }
    let slash = text
        .find('/')
        .ok_or_else(|| err(text.len() + 1, "expected '/'"))?;
    let (num, den) = (&text[..slash], &text[slash + 1..]);
    let parse = |part: &str, offset: usize| -> Result<i64> {
        if part.is_empty() {
            return Err(err(offset + 1, "expected an integer"));
        }
        let digits_from = usize::from(part.starts_with(['-', '+']));
        if let Some(pos) = part[digits_from..].find(|c: char| !c.is_ascii_digit()) {
            return Err(err(offset + digits_from + pos + 1, "unexpected character"));
        }
        if digits_from == part.len() {
            return Err(err(offset + part.len() + 1, "expected digits after sign"));
        }
        part.parse::<i64>()
            .map_err(|_| err(offset + 1, "integer out of range"))
    };
    let b = parse(num, 0)?;
    let a = parse(den, slash + 1)?;
    if a == 0 && b == 0 {
        return Err(err(1, "0/0 is not a slope"));
    }
    canonicalize(a, b)
}

impl FromStr for Slope {
    type Err = FareyError;

    fn from_str(s: &str) -> Result<Self> {
        parse_slope(s)
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
