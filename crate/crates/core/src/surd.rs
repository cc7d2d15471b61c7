//! Quadratic surds `p + q*sqrt(d)` and their periodic continued fractions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, floor_div, isqrt};
use crate::error::{FareyError, Result};
use crate::rational::Rational;

/// `p + q*sqrt(d)` with rational `p, q` and a squarefree radicand `d >= 1`
/// (`d = 1` only when `q = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadSurd {
    pub p: Rational,
    pub q: Rational,
    pub d: i128,
}

/// Splits `n = k^2 * m` with `m` squarefree.
fn square_part(n: i128) -> (i128, i128) {
    let (mut k, mut m) = (1i128, n);
    let mut f = 2i128;
    while f * f <= m {
        while m % (f * f) == 0 {
            m /= f * f;
            k *= f;
        }
        f += 1;
    }
    (k, m)
}

const CTX: &str = "surd arithmetic";

fn add(x: Rational, y: Rational) -> Result<Rational> {
    x.checked_add(&y).ok_or(FareyError::Overflow(CTX))
}

fn mul(x: Rational, y: Rational) -> Result<Rational> {
    x.checked_mul(&y).ok_or(FareyError::Overflow(CTX))
}

impl QuadSurd {
    /// `p + q*sqrt(d)`, pulling square factors of `d` into `q`.
    pub fn new(p: Rational, q: Rational, d: i128) -> Result<QuadSurd> {
        if d < 0 {
            return Err(FareyError::Surd(format!("negative radicand {d}")));
        }
        let (k, m) = square_part(d);
        if m <= 1 || q.is_zero() {
            // Rational value.
            return Ok(QuadSurd::rational(add(
                p,
                mul(q, Rational::integer(k * m))?,
            )?));
        }
        Ok(QuadSurd {
            p,
            q: mul(q, Rational::integer(k))?,
            d: m,
        })
    }

    pub fn rational(p: Rational) -> QuadSurd {
        QuadSurd {
            p,
            q: Rational::zero(),
            d: 1,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    fn radicand_with(&self, other: &QuadSurd) -> Result<i128> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.d),
            (_, true) => Ok(self.d),
            _ if self.d == other.d => Ok(self.d),
            _ => Err(FareyError::Surd(format!(
                "radicands {} and {} differ",
                self.d, other.d
            ))),
        }
    }

    pub fn add(&self, other: &QuadSurd) -> Result<QuadSurd> {
        let d = self.radicand_with(other)?;
        QuadSurd::new(add(self.p, other.p)?, add(self.q, other.q)?, d)
    }

    pub fn sub(&self, other: &QuadSurd) -> Result<QuadSurd> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QuadSurd {
        QuadSurd {
            p: -self.p,
            q: -self.q,
            d: self.d,
        }
    }

    pub fn mul(&self, other: &QuadSurd) -> Result<QuadSurd> {
        let d = self.radicand_with(other)?;
        let dr = Rational::integer(d);
        QuadSurd::new(
            add(mul(self.p, other.p)?, mul(mul(self.q, other.q)?, dr)?)?,
            add(mul(self.p, other.q)?, mul(self.q, other.p)?)?,
            d,
        )
    }

    pub fn conjugate(&self) -> QuadSurd {
        QuadSurd {
            p: self.p,
            q: -self.q,
            d: self.d,
        }
    }

    /// `p^2 - q^2 d`.
    pub fn norm(&self) -> Result<Rational> {
        add(
            mul(self.p, self.p)?,
            -mul(mul(self.q, self.q)?, Rational::integer(self.d))?,
        )
    }

    pub fn div(&self, other: &QuadSurd) -> Result<QuadSurd> {
        let norm = other.norm()?;
        if norm.is_zero() {
            return Err(FareyError::Surd("division by zero".into()));
        }
        let num = self.mul(&other.conjugate())?;
        let div = |x: Rational| x.checked_div(&norm).ok_or(FareyError::Overflow(CTX));
        QuadSurd::new(div(num.p)?, div(num.q)?, num.d)
    }

    /// Exact sign of the real value.
    pub fn signum(&self) -> Result<i128> {
        let (sp, sq) = (self.p.signum(), self.q.signum());
        if sq == 0 || sp == sq {
            return Ok(if sp != 0 { sp } else { sq });
        }
        if sp == 0 {
            return Ok(sq);
        }
        // Opposite signs: compare p^2 with q^2 d.
        let lhs = mul(self.p, self.p)?;
        let rhs = mul(mul(self.q, self.q)?, Rational::integer(self.d))?;
        Ok(match lhs.cmp(&rhs) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        })
    }

    pub fn abs(&self) -> Result<QuadSurd> {
        Ok(if self.signum()? < 0 {
            self.neg()
        } else {
            *self
        })
    }

    pub fn cmp_value(&self, other: &QuadSurd) -> Result<Ordering> {
        Ok(self.sub(other)?.signum()?.cmp(&0))
    }

    /// Floor of the real value.
    pub fn floor(&self) -> Result<i128> {
        let mut guess = self.p.floor() + mul(self.q, Rational::integer(isqrt(self.d)))?.floor();
        let ge = |n: i128| -> Result<bool> {
            Ok(self.sub(&QuadSurd::rational(n.into()))?.signum()? >= 0)
        };
        while !ge(guess)? {
            guess -= 1;
        }
        while ge(guess + 1)? {
            guess += 1;
        }
        Ok(guess)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{} + {}*sqrt({})", self.p, self.q, self.d)
        }
    }
}

/// `(P + sqrt(D)) / Q` with `Q | D - P^2`, the state of the continued
/// fraction recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurdState {
    pub p: i128,
    pub q: i128,
    pub d: i128,
}

impl SurdState {
    pub fn from_surd(x: &QuadSurd) -> Result<SurdState> {
        const CTX: &str = "surd normal form";
        if x.is_rational() {
            return Err(FareyError::Surd(format!("{x} is rational")));
        }
        // x = (u + w sqrt(d)) / l over a common denominator l.
        let l = num_integer::lcm(x.p.denom(), x.q.denom());
        let u = arith::mul(x.p.numer(), l / x.p.denom(), CTX)?;
        let w = arith::mul(x.q.numer(), l / x.q.denom(), CTX)?;
        let (mut p, mut q) = if w > 0 { (u, l) } else { (-u, -l) };
        let mut d = arith::mul(arith::mul(w, w, CTX)?, x.d, CTX)?;
        if arith::sub(d, arith::mul(p, p, CTX)?, CTX)? % q != 0 {
            let aq = q.abs();
            p = arith::mul(p, aq, CTX)?;
            d = arith::mul(d, arith::mul(q, q, CTX)?, CTX)?;
            q = arith::mul(q, aq, CTX)?;
        }
        Ok(SurdState { p, q, d })
    }

    pub fn to_surd(&self) -> Result<QuadSurd> {
        QuadSurd::new(
            Rational::new(self.p, self.q),
            Rational::new(1, self.q),
            self.d,
        )
    }

    /// Next partial quotient and the state of the remainder.
    pub fn step(&self) -> Result<(i128, SurdState)> {
        const CTX: &str = "surd continued fraction";
        let root = isqrt(self.d);
        let bump = i128::from(self.q < 0);
        let a = floor_div(arith::add(self.p, root + bump, CTX)?, self.q);
        let p = arith::sub(arith::mul(a, self.q, CTX)?, self.p, CTX)?;
        let q = arith::sub(self.d, arith::mul(p, p, CTX)?, CTX)? / self.q;
        Ok((a, SurdState { p, q, d: self.d }))
    }
}

/// Eventually periodic continued fraction of a quadratic irrational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCf {
    pub preperiod: Vec<i128>,
    pub block: Vec<i128>,
    /// Recurrence state at the start of the repeating block.
    pub block_state: SurdState,
}

impl PeriodicCf {
    /// The first `k` partial quotients.
    pub fn prefix(&self, k: usize) -> Vec<i128> {
        self.preperiod
            .iter()
            .chain(self.block.iter().cycle())
            .take(k)
            .copied()
            .collect()
    }

    /// Checks by surd substitution that the block maps its tail to itself
    /// and that the preperiod maps that tail to `x`. Coefficients are
    /// substituted one at a time, `y -> c + 1/y`, so intermediate values
    /// stay as small as the complete quotients themselves.
    pub fn verify(&self, x: &QuadSurd) -> Result<bool> {
        let tail = self.block_state.to_surd()?;
        let block_ok = substitute(&self.block, &tail)? == tail;
        Ok(block_ok && substitute(&self.preperiod, &tail)? == *x)
    }
}

/// `[c_0; c_1, ..., c_{k-1}, y]` evaluated exactly.
fn substitute(coefficients: &[i128], y: &QuadSurd) -> Result<QuadSurd> {
    let one = QuadSurd::rational(Rational::integer(1));
    coefficients.iter().rev().try_fold(*y, |acc, &c| {
        QuadSurd::rational(Rational::integer(c)).add(&one.div(&acc)?)
    })
}

/// Runs the recurrence until a state repeats.
pub fn periodic_cf(x: &QuadSurd) -> Result<PeriodicCf> {
    const MAX_TERMS: usize = 100_000;
    let mut state = SurdState::from_surd(x)?;
    let mut seen: HashMap<SurdState, usize> = HashMap::new();
    let mut terms = Vec::new();
    let mut states = Vec::new();
    while terms.len() < MAX_TERMS {
        if let Some(&start) = seen.get(&state) {
            return Ok(PeriodicCf {
                preperiod: terms[..start].to_vec(),
                block: terms[start..].to_vec(),
                block_state: states[start],
            });
        }
        seen.insert(state, terms.len());
        states.push(state);
        let (a, next) = state.step()?;
        terms.push(a);
        state = next;
    }
    Err(FareyError::Surd(format!(
        "no period within {MAX_TERMS} terms"
    )))
}
