//! The Chialvo map
//!
//! ```text
//! x' = x² · exp(y − x) + k
//! y' = a·y − b·x + c
//! ```
//!
//! with pointwise evaluation in round-to-nearest and a rigorous rectangle
//! evaluation built on [`Interval`].

mod interval;

pub use interval::{exp_enclosure, ln_enclosure, IRect, Interval, TRANSCENDENTAL_ULPS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Map parameters; `0 < a, b, c < 1` and `k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
}

impl Params {
    pub fn new(a: f64, b: f64, c: f64, k: f64) -> Result<Self> {
        let unit = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "{name} = {v} is outside (0, 1)"
                )))
            }
        };
        unit("a", a)?;
        unit("b", b)?;
        unit("c", c)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParams(format!("k = {k} must be positive")));
        }
        Ok(Self { a, b, c, k })
    }

    /// `a + b ≥ 1`, the hypothesis under which `D̂₂⁺` is weakly absorbing.
    pub fn weak_hypothesis(&self) -> bool {
        self.a + self.b >= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist_inf(&self, other: &Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// One step in plain floating point; the result may be non-finite.
#[inline]
pub fn step_raw(p: &Params, x: f64, y: f64) -> (f64, f64) {
    (x * x * (y - x).exp() + p.k, p.a * y - p.b * x + p.c)
}

pub fn step(p: &Params, pt: Point) -> Result<Point> {
    let (x, y) = step_raw(p, pt.x, pt.y);
    let out = Point::new(x, y);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite { iteration: 1 })
    }
}

/// `n`-fold composition of [`step`]. A non-finite iterate reports its
/// 1-based index.
pub fn step_n(p: &Params, pt: Point, n: usize) -> Result<Point> {
    let mut cur = pt;
    for i in 0..n {
        cur = step(p, cur).map_err(|_| Error::NonFinite { iteration: i + 1 })?;
    }
    Ok(cur)
}

/// Rigorous enclosure of the image of `r`: every `step(p, pt)` with
/// `pt ∈ r` lies in the result.
pub fn step_rect(p: &Params, r: &IRect) -> Result<IRect> {
    let growth = (r.y - r.x).exp()?;
    let mut x = (r.x.sqr() * growth)
        .add_scalar(p.k)
        .ensure_finite("x image")?;
    // x²·e^(y−x) ≥ 0, so x̄ ≥ k exactly.
    x.lo = x.lo.max(p.k);
    let y = (r.y.scale(p.a) - r.x.scale(p.b))
        .add_scalar(p.c)
        .ensure_finite("y image")?;
    Ok(IRect { x, y })
}
