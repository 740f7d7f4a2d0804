//! Bounds of the absorbing (`D̂₁⁺`) and weakly absorbing (`D̂₂⁺`) rectangles,
//! plus the older `D⁺` bounds kept for the counterexample harness.
//!
//! Pointwise formulas are evaluated in round-to-nearest with a few
//! deliberate nudges: `û₁` is rounded up and `ŵ₁` down so that the
//! rectangle only grows, and `û₂` is returned only once the defining
//! inequality has been certified with interval arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{IRect, Interval, Params};

/// Default bisection tolerance for [`u2_hat`].
pub const U2_TOL: f64 = 1e-9;

/// Beyond this `v̂` the factor `e^v̂` in `û₁` leaves the double range.
pub const V_HAT_OVERFLOW: f64 = 700.0;

/// `4 / e²`, the maximum of `x² e^{-x}` (attained at `x = 2`).
pub const FOUR_OVER_E2: f64 = 0.541_341_132_946_450_8;

const MAX_DOUBLINGS: usize = 128;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegacyBounds {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    D1plus,
    D2plus,
    LegacyDplus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionRect {
    pub rect: IRect,
    pub kind: RegionKind,
}

impl RegionRect {
    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.rect.contains(x, y)
    }
}

/// `D̂₂⁺` together with the `a + b ≥ 1` flag under which it is proven
/// weakly absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D2Plus {
    pub region: RegionRect,
    pub weakly_absorbing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingBounds {
    pub v_hat: f64,
    pub u1_hat: f64,
    pub w1_hat: f64,
    pub u2_hat: Option<f64>,
    pub w2_hat: Option<f64>,
    /// `û₁ − k`, kept separately since it can be far below `ulp(k)`.
    pub u1_gap: f64,
}

impl AbsorbingBounds {
    /// `v̂`, `û₁`, `ŵ₁` only.
    pub fn absorbing(p: &Params) -> Result<Self> {
        let v = v_hat(p);
        let gap = u1_gap(p)?;
        let u1 = u1_from_gap(p, gap);
        Ok(Self {
            v_hat: v,
            u1_hat: u1,
            w1_hat: w1_from_u1(p, v, u1),
            u2_hat: None,
            w2_hat: None,
            u1_gap: gap,
        })
    }

    /// All bounds, with `û₂` searched to `tol`.
    pub fn compute(p: &Params, tol: f64) -> Result<Self> {
        let mut ab = Self::absorbing(p)?;
        let u2 = u2_hat(p, tol)?;
        ab.u2_hat = Some(u2);
        ab.w2_hat = Some(w2_hat(p, u2));
        Ok(ab)
    }

    pub fn d1_rect(&self, p: &Params) -> IRect {
        IRect {
            x: Interval {
                lo: p.k,
                hi: self.u1_hat,
            },
            y: Interval {
                lo: self.w1_hat,
                hi: self.v_hat,
            },
        }
    }

    pub fn d2_rect(&self, p: &Params) -> Option<IRect> {
        Some(IRect {
            x: Interval {
                lo: p.k,
                hi: self.u2_hat?,
            },
            y: Interval {
                lo: self.w2_hat?,
                hi: self.v_hat,
            },
        })
    }
}

/// Older bounds `u = 2a/(a−b)`, `v = (c−bk)/(1−a)`,
/// `w = (c(a−b) − 2ab)/(1−a)`; only meaningful for `a > b`.
pub fn legacy_bounds(p: &Params) -> Result<LegacyBounds> {
    if p.a == p.b {
        return Err(Error::DegenerateLegacy("a = b makes u infinite"));
    }
    if p.a < p.b {
        return Err(Error::DegenerateLegacy(
            "a < b makes u negative and D+ empty",
        ));
    }
    let (a, b, c, k) = (p.a, p.b, p.c, p.k);
    Ok(LegacyBounds {
        u: 2.0 * a / (a - b),
        v: (c - b * k) / (1.0 - a),
        w: (c * (a - b) - 2.0 * a * b) / (1.0 - a),
    })
}

/// The legacy `D⁺` as a closed rectangle `[k, u] × [w, v]`.
pub fn legacy_dplus(p: &Params) -> Result<RegionRect> {
    let lb = legacy_bounds(p)?;
    Ok(RegionRect {
        rect: IRect {
            x: Interval { lo: p.k, hi: lb.u },
            y: Interval { lo: lb.w, hi: lb.v },
        },
        kind: RegionKind::LegacyDplus,
    })
}

pub fn v_hat(p: &Params) -> f64 {
    (p.c - p.b * p.k) / (1.0 - p.a)
}

fn v_hat_enclosure(p: &Params) -> Interval {
    let num = Interval::point(p.c) - Interval::point(p.b) * Interval::point(p.k);
    num / (Interval::point(1.0) - Interval::point(p.a))
}

/// Upper bound on `û₁ − k = (4/e²)·e^v̂`.
pub fn u1_gap(p: &Params) -> Result<f64> {
    let v = v_hat(p);
    if v > V_HAT_OVERFLOW {
        return Err(Error::Overflow("u1_hat: exp(v_hat)"));
    }
    let four_e2 = Interval {
        lo: FOUR_OVER_E2.next_down(),
        hi: FOUR_OVER_E2.next_up(),
    };
    let g = four_e2 * v_hat_enclosure(p).exp()?;
    Ok(g.hi)
}

fn u1_from_gap(p: &Params, gap: f64) -> f64 {
    // Rounded up so that û₁ > k survives even when gap < ulp(k).
    (p.k + gap).next_up()
}

fn w1_from_u1(p: &Params, v: f64, u1: f64) -> f64 {
    let drop = Interval::point(p.b) * (Interval::point(u1) - Interval::point(p.k))
        / (Interval::point(1.0) - Interval::point(p.a));
    (v - drop.hi).next_down().min(v.next_down())
}

/// `û₁ = (4/e²)·e^v̂ + k`, rounded up.
pub fn u1_hat(p: &Params) -> Result<f64> {
    Ok(u1_from_gap(p, u1_gap(p)?))
}

/// `ŵ₁ = (c − b·û₁)/(1 − a)`, evaluated as `v̂ − b(û₁ − k)/(1 − a)` and
/// rounded down.
pub fn w1_hat(p: &Params) -> Result<f64> {
    Ok(w1_from_u1(p, v_hat(p), u1_hat(p)?))
}

/// Right-hand side of the leftward-motion condition:
/// `x + ln((x − k)/x²)`, in round-to-nearest.
pub fn c2_rhs(k: f64, x: f64) -> f64 {
    x + ((x - k) / (x * x)).ln()
}

/// Certified check of `v̂ < x + ln((x − k)/x²)`.
///
/// Both sides are enclosed; `true` means the strict inequality holds for
/// the real numbers, `false` means it fails or could not be decided.
pub fn c2_holds(p: &Params, x: f64) -> bool {
    if !(x > p.k) || !x.is_finite() {
        return false;
    }
    let xi = Interval::point(x);
    let ratio = (xi - Interval::point(p.k)) / xi.sqr();
    let Ok(log) = ratio.ln() else {
        return false;
    };
    let rhs = xi + log;
    v_hat_enclosure(p).hi < rhs.lo
}

/// Start of the `û₂` search: the larger root of `x² − (k+1)x + 2k` when it
/// exists and exceeds `k`, else `1.001·k`.
pub fn u2_search_origin(k: f64) -> f64 {
    let disc = k * k - 6.0 * k + 1.0;
    if disc >= 0.0 {
        let x1 = 0.5 * (k + 1.0 + disc.sqrt());
        if x1 > k {
            return x1;
        }
    }
    1.001 * k
}

/// Smallest `x₀ ≥ x₁` (to within `tol`) from which the leftward-motion
/// condition holds for every larger `x`.
///
/// Past the search origin the right-hand side is increasing, so the
/// condition is monotone there: bracket by doubling the offset, then bisect
/// and return the certified upper end.
pub fn u2_hat(p: &Params, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol = {tol} must be positive"
        )));
    }
    if v_hat(p) > V_HAT_OVERFLOW {
        return Err(Error::Overflow("u2_hat: v_hat out of range"));
    }
    let origin = u2_search_origin(p.k);
    if c2_holds(p, origin) {
        return Ok(origin);
    }

    let mut lo = origin;
    let mut offset = origin.max(1.0);
    let mut hi = origin + offset;
    let mut doublings = 0;
    while !c2_holds(p, hi) {
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::NoConvergence {
                iterations: doublings,
            });
        }
        lo = hi;
        offset *= 2.0;
        hi = origin + offset;
    }

    let mut steps = 0;
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if c2_holds(p, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
        if steps > MAX_BISECTIONS {
            return Err(Error::NoConvergence { iterations: steps });
        }
    }
    Ok(hi)
}

/// `ŵ₂ = (c − b·û₂)/(1 − a)`.
pub fn w2_hat(p: &Params, u2: f64) -> f64 {
    (p.c - p.b * u2) / (1.0 - p.a)
}

/// `D̂₁⁺ = [k, û₁] × [ŵ₁, v̂]`.
pub fn d1_plus(p: &Params) -> Result<RegionRect> {
    let ab = AbsorbingBounds::absorbing(p)?;
    Ok(RegionRect {
        rect: ab.d1_rect(p),
        kind: RegionKind::D1plus,
    })
}

/// `D̂₂⁺ = [k, û₂] × [ŵ₂, v̂]`.
pub fn d2_plus(p: &Params, tol: f64) -> Result<D2Plus> {
    let u2 = u2_hat(p, tol)?;
    let rect = IRect {
        x: Interval { lo: p.k, hi: u2 },
        y: Interval {
            lo: w2_hat(p, u2),
            hi: v_hat(p),
        },
    };
    Ok(D2Plus {
        region: RegionRect {
            rect,
            kind: RegionKind::D2plus,
        },
        weakly_absorbing: p.weak_hypothesis(),
    })
}
