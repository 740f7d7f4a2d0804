//! Closed intervals with outward rounding.
//!
//! Endpoints are computed in round-to-nearest and then pushed one
//! representable value outward per operation. That gives enclosures that
//! are sound on any IEEE-754 platform without touching the rounding mode,
//! at the price of a few ulps of extra width.
//!
//! Arithmetic may overflow to infinite endpoints; callers that need the
//! finiteness invariant check [`Interval::ensure_finite`].

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extra ulps applied to each endpoint of `exp` and `ln`.
pub const TRANSCENDENTAL_ULPS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IRect {
    pub x: Interval,
    pub y: Interval,
}

fn down(v: f64) -> f64 {
    v.next_down()
}

fn up(v: f64) -> f64 {
    v.next_up()
}

fn down_n(mut v: f64, n: u32) -> f64 {
    for _ in 0..n {
        v = v.next_down();
    }
    v
}

fn up_n(mut v: f64, n: u32) -> f64 {
    for _ in 0..n {
        v = v.next_up();
    }
    v
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval lower end {lo} exceeds upper end {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub const fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Widens both ends by `delta` (absolute).
    pub fn inflate(&self, delta: f64) -> Interval {
        Interval {
            lo: down(self.lo - delta),
            hi: up(self.hi + delta),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn ensure_finite(self, what: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::Overflow(what))
        }
    }

    /// `self * s` for an exact scalar `s`.
    pub fn scale(&self, s: f64) -> Interval {
        let (a, b) = (self.lo * s, self.hi * s);
        Interval {
            lo: down(a.min(b)),
            hi: up(a.max(b)),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Interval {
        Interval {
            lo: down(self.lo + s),
            hi: up(self.hi + s),
        }
    }

    pub fn sqr(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval {
                lo: down(self.lo * self.lo).max(0.0),
                hi: up(self.hi * self.hi),
            }
        } else if self.hi <= 0.0 {
            Interval {
                lo: down(self.hi * self.hi).max(0.0),
                hi: up(self.lo * self.lo),
            }
        } else {
            let m = self.lo.abs().max(self.hi.abs());
            Interval {
                lo: 0.0,
                hi: up(m * m),
            }
        }
    }

    pub fn exp(&self) -> Result<Interval> {
        exp_enclosure(*self)
    }

    pub fn ln(&self) -> Result<Interval> {
        ln_enclosure(*self)
    }
}

/// Encloses `{e^x : x ∈ iv}`.
///
/// The lower end is clamped at zero, which also absorbs underflow.
pub fn exp_enclosure(iv: Interval) -> Result<Interval> {
    // e^0 = 1 is exact and needs no widening.
    let hi = if iv.hi == 0.0 {
        1.0
    } else {
        up_n(iv.hi.exp(), TRANSCENDENTAL_ULPS)
    };
    if !hi.is_finite() {
        return Err(Error::Overflow("exp"));
    }
    let lo = if iv.lo == 0.0 {
        1.0
    } else {
        down_n(iv.lo.exp(), TRANSCENDENTAL_ULPS).max(0.0)
    };
    Ok(Interval { lo, hi })
}

/// Encloses `{ln x : x ∈ iv}`; requires `iv.lo > 0`.
pub fn ln_enclosure(iv: Interval) -> Result<Interval> {
    if !(iv.lo > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ln of non-positive interval [{}, {}]",
            iv.lo, iv.hi
        )));
    }
    if !iv.hi.is_finite() {
        return Err(Error::Overflow("ln"));
    }
    Ok(Interval {
        lo: down_n(iv.lo.ln(), TRANSCENDENTAL_ULPS),
        hi: up_n(iv.hi.ln(), TRANSCENDENTAL_ULPS),
    })
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo + rhs.lo),
            hi: up(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo - rhs.hi),
            hi: up(self.hi - rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        // 0 * inf is NaN; an overflowed factor makes the whole product unbounded.
        if p.iter().any(|v| v.is_nan()) {
            return Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
        }
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
    }
}

impl Div for Interval {
    type Output = Interval;

    /// Division by an interval containing zero yields the unbounded interval.
    fn div(self, rhs: Interval) -> Interval {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
    }
}

impl IRect {
    pub fn new(x: Interval, y: Interval) -> Self {
        Self { x, y }
    }

    pub fn from_bounds(xlo: f64, xhi: f64, ylo: f64, yhi: f64) -> Result<Self> {
        Ok(Self {
            x: Interval::new(xlo, xhi)?,
            y: Interval::new(ylo, yhi)?,
        })
    }

    pub fn point(x: f64, y: f64) -> Self {
        Self {
            x: Interval::point(x),
            y: Interval::point(y),
        }
    }

    pub fn area(&self) -> f64 {
        self.x.width() * self.y.width()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }

    pub fn is_subset_of(&self, other: &IRect) -> bool {
        self.x.is_subset_of(&other.x) && self.y.is_subset_of(&other.y)
    }

    pub fn hull(&self, other: &IRect) -> IRect {
        IRect {
            x: self.x.hull(&other.x),
            y: self.y.hull(&other.y),
        }
    }

    pub fn inflate(&self, delta: f64) -> IRect {
        IRect {
            x: self.x.inflate(delta),
            y: self.y.inflate(delta),
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x.mid(), self.y.mid())
    }

    /// Splits into four quadrants at the midpoints.
    pub fn quadrants(&self) -> [IRect; 4] {
        let (xm, ym) = self.center();
        let xs = [
            Interval {
                lo: self.x.lo,
                hi: xm,
            },
            Interval {
                lo: xm,
                hi: self.x.hi,
            },
        ];
        let ys = [
            Interval {
                lo: self.y.lo,
                hi: ym,
            },
            Interval {
                lo: ym,
                hi: self.y.hi,
            },
        ];
        [
            IRect::new(xs[0], ys[0]),
            IRect::new(xs[1], ys[0]),
            IRect::new(xs[0], ys[1]),
            IRect::new(xs[1], ys[1]),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reversed_and_non_finite() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 0.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(-1.0, 1.0).is_ok());
    }

    #[test]
    fn exp_of_zero_is_tight() {
        let e = exp_enclosure(Interval::point(0.0)).unwrap();
        assert!(e.contains(1.0));
        assert!(e.width() <= 1e-15);
    }

    #[test]
    fn exp_of_one_contains_e() {
        let e = exp_enclosure(Interval::point(1.0)).unwrap();
        assert!(e.contains(std::f64::consts::E));
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn exp_width_is_within_eight_ulps_per_end() {
        // e^-1 and e^2 from a 40-digit reference.
        let e_m1 = 0.367_879_441_171_442_321_6_f64;
        let e_2 = 7.389_056_098_930_650_227_f64;
        let e = exp_enclosure(Interval::new(-1.0, 2.0).unwrap()).unwrap();
        assert!(e.lo <= e_m1 && e.hi >= e_2);
        assert!(up_n(e.lo, 8) >= e_m1);
        assert!(down_n(e.hi, 8) <= e_2);
    }

    #[test]
    fn exp_overflow_is_an_error() {
        assert_eq!(
            exp_enclosure(Interval::point(710.0)),
            Err(Error::Overflow("exp"))
        );
        // Underflow is fine: the lower end clamps at 0.
        let e = exp_enclosure(Interval::new(-1e4, -800.0).unwrap()).unwrap();
        assert_eq!(e.lo, 0.0);
        assert!(e.hi > 0.0);
    }

    #[test]
    fn ln_requires_positive_input() {
        assert!(ln_enclosure(Interval::new(0.0, 1.0).unwrap()).is_err());
        let l = ln_enclosure(Interval::point(std::f64::consts::E)).unwrap();
        assert!(l.contains(1.0));
    }

    #[test]
    fn sqr_handles_sign_straddle() {
        let s = Interval::new(-2.0, 1.0).unwrap().sqr();
        assert_eq!(s.lo, 0.0);
        assert!(s.contains(4.0));
        let s = Interval::new(-3.0, -2.0).unwrap().sqr();
        assert!(s.contains(4.0) && s.contains(9.0) && s.lo > 3.9);
    }

    #[test]
    fn mul_with_overflowed_factor_is_unbounded() {
        let inf = Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        };
        let z = Interval::point(0.0);
        let p = inf * z;
        assert!(!p.is_finite());
        assert!(p.ensure_finite("mul").is_err());
    }

    #[test]
    fn division_encloses_quotient() {
        let q = Interval::point(1.0) / Interval::point(3.0);
        assert!(q.contains(1.0 / 3.0) && q.lo < q.hi);
        assert!(!(Interval::point(1.0) / Interval::new(-1.0, 1.0).unwrap()).is_finite());
    }

    #[test]
    fn quadrants_tile_the_rectangle() {
        let r = IRect::from_bounds(0.0, 2.0, -1.0, 3.0).unwrap();
        let q = r.quadrants();
        let hull = q.iter().skip(1).fold(q[0], |acc, c| acc.hull(c));
        assert_eq!(hull, r);
        assert!((q.iter().map(IRect::area).sum::<f64>() - r.area()).abs() < 1e-12);
    }
}
