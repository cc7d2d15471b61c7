//! Small checked integer helpers shared by the lattice code.

use crate::error::{FareyError, Result};

/// Extended Euclid: returns `(g, x, y)` with `m*x + n*y = g = gcd(m, n) >= 0`.
pub(crate) fn ext_gcd(m: i128, n: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (m, n);
    let (mut old_x, mut x) = (1i128, 0i128);
    let (mut old_y, mut y) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_x, x) = (x, old_x - q * x);
        (old_y, y) = (y, old_y - q * y);
    }
    if old_r < 0 {
        (-old_r, -old_x, -old_y)
    } else {
        (old_r, old_x, old_y)
    }
}

pub(crate) fn floor_div(n: i128, d: i128) -> i128 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(n: i128, d: i128) -> i128 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) == (d < 0)) {
        q + 1
    } else {
        q
    }
}

pub(crate) fn mul(x: i128, y: i128, what: &'static str) -> Result<i128> {
    x.checked_mul(y).ok_or(FareyError::Overflow(what))
}

pub(crate) fn add(x: i128, y: i128, what: &'static str) -> Result<i128> {
    x.checked_add(y).ok_or(FareyError::Overflow(what))
}

pub(crate) fn sub(x: i128, y: i128, what: &'static str) -> Result<i128> {
    x.checked_sub(y).ok_or(FareyError::Overflow(what))
}

/// `x*w - y*z`, checked.
pub(crate) fn det2(x: i128, y: i128, z: i128, w: i128, what: &'static str) -> Result<i128> {
    sub(mul(x, w, what)?, mul(y, z, what)?, what)
}

/// Integer square root, `floor(sqrt(n))` for `n >= 0`.
pub(crate) fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}
