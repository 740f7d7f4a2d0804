//! Phase-space regions around `D̂ᵢ⁺`, trajectory services, speed bounds,
//! and checks of the motion properties the construction relies on.
//!
//! Region conventions (evaluated in this order):
//!
//! ```text
//! Â  = { x < k }
//! B̂  = { x ≥ k, y > v̂ }
//! Ĉᵢ = { x > ûᵢ, y ≤ v̂ }
//! Êᵢ = { k ≤ x ≤ ûᵢ, y < ŵᵢ }
//! D̂ᵢ⁺ = [k, ûᵢ] × [ŵᵢ, v̂]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, AbsorbingBounds, LegacyBounds, RegionKind, RegionRect, FOUR_OVER_E2};
use crate::error::{Error, Result};
use crate::map::{self, IRect, Interval, Params, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    A,
    B,
    C(Variant),
    E(Variant),
    Dplus(Variant),
}

/// `(û, ŵ)` for the requested variant.
fn variant_bounds(ab: &AbsorbingBounds, variant: Variant) -> Result<(f64, f64)> {
    match variant {
        Variant::One => Ok((ab.u1_hat, ab.w1_hat)),
        Variant::Two => match (ab.u2_hat, ab.w2_hat) {
            (Some(u), Some(w)) => Ok((u, w)),
            _ => Err(Error::MissingU2),
        },
    }
}

pub fn classify(
    p: &Params,
    ab: &AbsorbingBounds,
    variant: Variant,
    pt: Point,
) -> Result<RegionLabel> {
    let (u, w) = variant_bounds(ab, variant)?;
    let (x, y) = (pt.x, pt.y);
    Ok(if x < p.k {
        RegionLabel::A
    } else if y > ab.v_hat {
        RegionLabel::B
    } else if x > u {
        RegionLabel::C(variant)
    } else if y < w {
        RegionLabel::E(variant)
    } else {
        RegionLabel::Dplus(variant)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedBounds {
    pub s_b: f64,
    pub s_e1: f64,
    pub eps_b: f64,
    pub eps_e1: f64,
    /// Same bound for `Ê₂`, when `û₂` is known.
    pub s_e2: Option<f64>,
    pub eps_e2: Option<f64>,
    /// Set when some bound is subnormal or flushed to zero.
    pub underflow: bool,
}

fn x2_exp_neg(x: f64) -> f64 {
    x * x * (-x).exp()
}

/// Largest `ε ≤ (û₂ − k)/2` (found by halving) with
/// `max_{x ∈ [û₂−ε, û₂]} x²e^{−x} · e^{ŵ₂} + k < û₂ − ε`, which makes the
/// two-step argument of the `Ê₁` case go through for `Ê₂`.
fn eps_e2(p: &Params, u2: f64, w2: f64) -> f64 {
    let mut eps = 0.5 * (u2 - p.k);
    for _ in 0..1100 {
        let lo = u2 - eps;
        let peak = if lo <= 2.0 && 2.0 <= u2 {
            FOUR_OVER_E2
        } else {
            x2_exp_neg(lo).max(x2_exp_neg(u2))
        };
        // 1e-12 relative slack for the round-to-nearest evaluation.
        if peak * w2.exp() * (1.0 + 1e-12) + p.k < u2 - eps {
            return eps;
        }
        eps *= 0.5;
        if eps == 0.0 {
            break;
        }
    }
    0.0
}

/// Speed bounds `s = b·ε` for the descent through `B̂` and the ascent
/// through `Ê₁` (and `Ê₂` when available).
pub fn speed_bounds(p: &Params, ab: &AbsorbingBounds) -> SpeedBounds {
    let v = ab.v_hat;
    let eps_b = (p.k * p.k * (v - p.k - 1.0).exp()).min(1.0);
    // e^v̂ − e^ŵ₁ = e^v̂ (1 − e^{−b(û₁−k)/(1−a)}), free of cancellation.
    let drop = p.b * ab.u1_gap / (1.0 - p.a);
    let eps_e1 = (FOUR_OVER_E2 * v.exp() * -(-drop).exp_m1()).min(0.5 * ab.u1_gap);
    let eps_e2 = match (ab.u2_hat, ab.w2_hat) {
        (Some(u), Some(w)) => Some(eps_e2(p, u, w)),
        _ => None,
    };
    let s_b = p.b * eps_b;
    let s_e1 = p.b * eps_e1;
    let s_e2 = eps_e2.map(|e| p.b * e);
    let tiny = |s: f64| !s.is_normal();
    SpeedBounds {
        s_b,
        s_e1,
        eps_b,
        eps_e1,
        s_e2,
        eps_e2,
        underflow: tiny(s_b) || tiny(s_e1) || s_e2.is_some_and(tiny),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitReport {
    pub first_hit: Option<usize>,
    /// For absorbing targets: whether every tracked iterate after the first
    /// hit stayed in the (inflated) target.
    pub stayed_after: Option<bool>,
    pub escape_seen: bool,
    pub iterations_run: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitOptions {
    pub max_iter: usize,
    /// Outward inflation of the target for membership tests.
    pub inflation: f64,
    /// Iterates to track after the first hit for `D1plus` targets;
    /// `None` tracks up to `max_iter`.
    pub persist: Option<usize>,
    /// First iterate index that counts as a hit.
    pub min_index: usize,
}

impl HitOptions {
    pub fn new(max_iter: usize) -> Self {
        Self {
            max_iter,
            inflation: 1e-9,
            persist: None,
            min_index: 0,
        }
    }
}

/// Iterates from `pt` until the orbit enters `target`.
pub fn first_hit(
    p: &Params,
    target: &RegionRect,
    pt: Point,
    opts: HitOptions,
) -> Result<HitReport> {
    if opts.max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let rect = target.rect.inflate(opts.inflation);
    let track = target.kind == RegionKind::D1plus;
    let (mut x, mut y) = (pt.x, pt.y);
    let mut first = None;
    let mut escape_seen = false;
    let mut n = 0usize;
    let mut end = opts.max_iter;
    loop {
        let inside = rect.contains(x, y);
        match first {
            None if inside && n >= opts.min_index => {
                first = Some(n);
                if !track {
                    break;
                }
                if let Some(m) = opts.persist {
                    end = n + m;
                }
            }
            Some(_) if !inside => escape_seen = true,
            _ => {}
        }
        if n >= end {
            break;
        }
        let (nx, ny) = map::step_raw(p, x, y);
        if !(nx.is_finite() && ny.is_finite()) {
            return Err(Error::NonFinite { iteration: n + 1 });
        }
        x = nx;
        y = ny;
        n += 1;
    }
    Ok(HitReport {
        first_hit: first,
        stayed_after: if track {
            first.map(|_| !escape_seen)
        } else {
            None
        },
        escape_seen,
        iterations_run: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementCheck {
    pub id: String,
    pub claim: String,
    pub params: Params,
    pub point: Point,
    pub image: Point,
    pub legacy: LegacyBounds,
    /// Whether the point lies in the legacy region the claim is about.
    pub in_region: bool,
    pub falsified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub statements: Vec<StatementCheck>,
}

impl CounterexampleReport {
    pub fn all_falsified(&self) -> bool {
        self.statements.iter().all(|s| s.in_region && s.falsified)
    }
}

fn legacy_in_d(p: &Params, lb: &LegacyBounds, pt: Point) -> bool {
    p.k <= pt.x && pt.x <= lb.u && pt.y <= lb.v
}

fn legacy_in_c(lb: &LegacyBounds, pt: Point) -> bool {
    pt.x > lb.u && pt.y <= lb.v
}

fn legacy_in_e(p: &Params, lb: &LegacyBounds, pt: Point) -> bool {
    p.k <= pt.x && pt.x <= lb.u && pt.y < lb.w
}

/// Re-evaluates the three known counterexamples to the legacy claims.
pub fn verify_statement_counterexamples() -> Result<CounterexampleReport> {
    let mut statements = Vec::with_capacity(3);

    let p = Params::new(0.2, 0.1, 0.1, 0.179)?;
    let pt = Point::new(0.2, -0.4);
    let lb = bounds::legacy_bounds(&p)?;
    let img = map::step(&p, pt)?;
    statements.push(StatementCheck {
        id: "S1".into(),
        claim: "x' < x on D".into(),
        params: p,
        point: pt,
        image: img,
        legacy: lb,
        in_region: legacy_in_d(&p, &lb, pt),
        falsified: img.x > pt.x,
    });

    let p = Params::new(0.5, 0.1, 0.9, 0.116)?;
    let pt = Point::new(2.6, 1.6);
    let lb = bounds::legacy_bounds(&p)?;
    let img = map::step(&p, pt)?;
    statements.push(StatementCheck {
        id: "S2".into(),
        claim: "trajectories in C move toward D (x' < x)".into(),
        params: p,
        point: pt,
        image: img,
        legacy: lb,
        in_region: legacy_in_c(&lb, pt),
        falsified: img.x > pt.x,
    });

    let p = Params::new(0.3, 0.2, 0.1, 0.01)?;
    let pt = Point::new(2.0, -0.4);
    let lb = bounds::legacy_bounds(&p)?;
    let img = map::step(&p, pt)?;
    statements.push(StatementCheck {
        id: "S3".into(),
        claim: "y' > y on E".into(),
        params: p,
        point: pt,
        image: img,
        legacy: lb,
        in_region: legacy_in_e(&p, &lb, pt),
        falsified: img.y < pt.y,
    });

    Ok(CounterexampleReport { statements })
}

/// Finite-difference Jacobian of `q ↦ fⁿ(q)`.
fn jacobian_n(p: &Params, q: Point, period: usize) -> Result<[[f64; 2]; 2]> {
    let base = map::step_n(p, q, period)?;
    let hx = 1e-7 * q.x.abs().max(1.0);
    let hy = 1e-7 * q.y.abs().max(1.0);
    let dx = map::step_n(p, Point::new(q.x + hx, q.y), period)?;
    let dy = map::step_n(p, Point::new(q.x, q.y + hy), period)?;
    Ok([
        [(dx.x - base.x) / hx, (dy.x - base.x) / hy],
        [(dx.y - base.y) / hx, (dy.y - base.y) / hy],
    ])
}

fn spectral_radius(j: &[[f64; 2]; 2]) -> f64 {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (0.5 * tr + s).abs().max((0.5 * tr - s).abs())
    } else {
        det.abs().sqrt()
    }
}

fn residual(p: &Params, q: Point, period: usize) -> Result<f64> {
    Ok(map::step_n(p, q, period)?.dist_inf(&q))
}

/// A point `q` with `|fⁿ(q) − q| < tol` componentwise.
///
/// Plain iteration of `fⁿ` when the Jacobian at the guess is contracting,
/// Newton with a finite-difference Jacobian otherwise (and as a fallback
/// when iteration stalls).
pub fn find_periodic_point(
    p: &Params,
    guess: Point,
    period: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Point> {
    if period == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "period must be ≥ 1 and tol > 0".into(),
        ));
    }
    let mut q = guess;
    if residual(p, q, period)? < tol {
        return Ok(q);
    }
    let contracting = spectral_radius(&jacobian_n(p, q, period)?) < 1.0;
    let mut used = 0;
    if contracting {
        while used < max_iter {
            q = map::step_n(p, q, period)?;
            used += 1;
            if residual(p, q, period)? < tol {
                return Ok(q);
            }
        }
        q = guess;
    }
    for _ in 0..max_iter.max(50) {
        let fq = map::step_n(p, q, period)?;
        let j = jacobian_n(p, q, period)?;
        // Solve (J − I) δ = −(fⁿ(q) − q)
        let (m00, m01, m10, m11) = (j[0][0] - 1.0, j[0][1], j[1][0], j[1][1] - 1.0);
        let det = m00 * m11 - m01 * m10;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let (r0, r1) = (q.x - fq.x, q.y - fq.y);
        let dx = (r0 * m11 - m01 * r1) / det;
        let dy = (m00 * r1 - m10 * r0) / det;
        q = Point::new(q.x + dx, q.y + dy);
        if !q.is_finite() {
            break;
        }
        if residual(p, q, period)? < tol {
            return Ok(q);
        }
    }
    Err(Error::NoConvergence {
        iterations: used + max_iter.max(50),
    })
}

pub fn find_fixed_point(p: &Params, guess: Point, tol: f64, max_iter: usize) -> Result<Point> {
    find_periodic_point(p, guess, 1, tol, max_iter)
}

/// Lemma-style properties checked pointwise by [`lemma_property_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    /// `B̂`: `y' < y`, plus the descent trichotomy with `s_B`.
    YyB,
    /// Outside `Â ∪ B̂` the image is not in `B̂`.
    NoB,
    /// `Ê₁`: `y' > y`, plus the ascent trichotomy with `s_E1`.
    UpE1,
    /// From `D̂₁ ∖ Ê₁` the image is not in `Ê₁`.
    NoE1,
    /// On `{x ≥ û₂, y ≤ v̂}`: `x' < x`.
    LeftC2,
    /// Under `a + b ≥ 1`, `Ê₂` maps into `D̂₂`.
    NoEC,
    /// `Ê₂`: `y' > y`, plus the ascent trichotomy with `s_E2`.
    UpE2,
    /// From `D̂₂ ∖ Ê₂` the image is not in `Ê₂`.
    NoE2,
    /// No image lies in `Â`; images of points off `Â` have `x' > k`.
    PropA,
    /// `Ĉ₁ ∪ D̂₁` maps into `D̂₁`.
    PropC1,
}

impl Lemma {
    pub const ALL: [Lemma; 10] = [
        Lemma::YyB,
        Lemma::NoB,
        Lemma::UpE1,
        Lemma::NoE1,
        Lemma::LeftC2,
        Lemma::NoEC,
        Lemma::UpE2,
        Lemma::NoE2,
        Lemma::PropA,
        Lemma::PropC1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Lemma::YyB => "yyB",
            Lemma::NoB => "noB",
            Lemma::UpE1 => "upE1",
            Lemma::NoE1 => "noE1",
            Lemma::LeftC2 => "leftC2",
            Lemma::NoEC => "noEC",
            Lemma::UpE2 => "upE2",
            Lemma::NoE2 => "noE2",
            Lemma::PropA => "propA",
            Lemma::PropC1 => "propC1",
        }
    }

    pub fn parse(s: &str) -> Option<Lemma> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
    }
}

/// Three-valued outcome of a check evaluated on enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truth {
    Holds,
    Fails,
    Unknown,
}

impl Truth {
    fn from_pair(certainly: bool, certainly_not: bool) -> Truth {
        if certainly {
            Truth::Holds
        } else if certainly_not {
            Truth::Fails
        } else {
            Truth::Unknown
        }
    }

    fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::Holds, _) | (_, Truth::Holds) => Truth::Holds,
            (Truth::Fails, Truth::Fails) => Truth::Fails,
            _ => Truth::Unknown,
        }
    }

    fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::Fails, _) | (_, Truth::Fails) => Truth::Fails,
            (Truth::Holds, Truth::Holds) => Truth::Holds,
            _ => Truth::Unknown,
        }
    }

    fn not(self) -> Truth {
        match self {
            Truth::Holds => Truth::Fails,
            Truth::Fails => Truth::Holds,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

fn lt(iv: Interval, s: f64) -> Truth {
    Truth::from_pair(iv.hi < s, iv.lo >= s)
}

fn le(iv: Interval, s: f64) -> Truth {
    Truth::from_pair(iv.hi <= s, iv.lo > s)
}

fn gt(iv: Interval, s: f64) -> Truth {
    Truth::from_pair(iv.lo > s, iv.hi <= s)
}

fn ge(iv: Interval, s: f64) -> Truth {
    Truth::from_pair(iv.lo >= s, iv.hi < s)
}

/// Image enclosure that saturates instead of failing: an overflowing
/// exponential leaves `x'` unbounded above.
fn image(p: &Params, r: &IRect) -> IRect {
    let arg = r.y - r.x;
    let growth = match arg.exp() {
        Ok(g) => g,
        Err(_) => {
            let lo = Interval::point(arg.lo)
                .exp()
                .map(|e| e.lo)
                .unwrap_or(f64::MAX);
            Interval {
                lo,
                hi: f64::INFINITY,
            }
        }
    };
    let mut x = (r.x.sqr() * growth).add_scalar(p.k);
    x.lo = x.lo.max(p.k);
    let y = (r.y.scale(p.a) - r.x.scale(p.b)).add_scalar(p.c);
    IRect { x, y }
}

struct RegionBox {
    k: f64,
    v: f64,
    u: f64,
    w: f64,
}

impl RegionBox {
    fn in_b(&self, r: &IRect) -> Truth {
        ge(r.x, self.k).and(gt(r.y, self.v))
    }

    fn in_e(&self, r: &IRect) -> Truth {
        ge(r.x, self.k).and(le(r.x, self.u)).and(lt(r.y, self.w))
    }

    fn in_d(&self, r: &IRect) -> Truth {
        ge(r.x, self.k).and(le(r.x, self.u)).and(le(r.y, self.v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub params: Params,
    pub samples: usize,
    pub holds: usize,
    pub inconclusive: usize,
    /// First sampled point at which the conclusion provably fails.
    pub witness: Option<Point>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Window half-width used beyond open sides of unbounded regions.
pub fn sampling_window(p: &Params, ab: &AbsorbingBounds) -> f64 {
    10.0 * (ab.u1_hat - p.k).max(1.0)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Samples `sample` points from the lemma's region and evaluates its
/// conclusion on rigorous enclosures of the images.
///
/// A conclusion that is refuted by the enclosures is a genuine
/// counterexample and is returned as `witness`; one that rounding cannot
/// decide is counted as inconclusive.
pub fn lemma_property_check(
    p: &Params,
    lemma: Lemma,
    sample: usize,
    seed: u64,
) -> Result<LemmaReport> {
    let ab = AbsorbingBounds::compute(p, bounds::U2_TOL)?;
    lemma_property_check_with(p, &ab, lemma, sample, seed)
}

pub fn lemma_property_check_with(
    p: &Params,
    ab: &AbsorbingBounds,
    lemma: Lemma,
    sample: usize,
    seed: u64,
) -> Result<LemmaReport> {
    if lemma == Lemma::NoEC && !p.weak_hypothesis() {
        return Err(Error::HypothesisNotMet("noEC requires a + b ≥ 1"));
    }
    let needs_u2 = matches!(
        lemma,
        Lemma::LeftC2 | Lemma::NoEC | Lemma::UpE2 | Lemma::NoE2
    );
    if needs_u2 && ab.u2_hat.is_none() {
        return Err(Error::MissingU2);
    }
    let speeds = speed_bounds(p, ab);
    let win = sampling_window(p, ab);
    let (k, v) = (p.k, ab.v_hat);
    let one = RegionBox {
        k,
        v,
        u: ab.u1_hat,
        w: ab.w1_hat,
    };
    let two = RegionBox {
        k,
        v,
        u: ab.u2_hat.unwrap_or(f64::NAN),
        w: ab.w2_hat.unwrap_or(f64::NAN),
    };
    let w_low = ab.w1_hat.min(ab.w2_hat.unwrap_or(ab.w1_hat)) - win;

    // Sampling box per lemma: (xlo, xhi, ylo, yhi, y strictly above ylo,
    // y strictly below yhi).
    let (xlo, xhi, ylo, yhi) = match lemma {
        Lemma::YyB => (k, ab.u1_hat + win, v, v + win),
        Lemma::NoB => (k, ab.u1_hat + win, w_low, v),
        Lemma::UpE1 => (k, one.u, one.w - win, one.w),
        Lemma::NoE1 => (k, one.u, one.w, v),
        Lemma::LeftC2 => (two.u, two.u + win, w_low, v),
        Lemma::NoEC | Lemma::UpE2 => (k, two.u, two.w - win, two.w),
        Lemma::NoE2 => (k, two.u, two.w, v),
        Lemma::PropA => (k - win, ab.u1_hat + win, w_low, v + win),
        Lemma::PropC1 => (k, ab.u1_hat + win, w_low, v),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holds = 0;
    let mut inconclusive = 0;
    let mut witness = None;
    for _ in 0..sample {
        let x = uniform(&mut rng, xlo, xhi);
        let mut y = uniform(&mut rng, ylo, yhi);
        // Open sides: B̂ excludes y = v̂, Êᵢ excludes y = ŵᵢ.
        let open_low = matches!(lemma, Lemma::YyB) && y <= ylo;
        let open_high = matches!(lemma, Lemma::UpE1 | Lemma::UpE2 | Lemma::NoEC) && y >= yhi;
        if open_low {
            y = ylo.next_up();
        }
        if open_high {
            y = yhi.next_down();
        }
        let pt = IRect::point(x, y);
        let img = image(p, &pt);
        let verdict = match lemma {
            Lemma::YyB => {
                let down = lt(img.y, y);
                let s = speeds.s_b;
                let one_step = ge(pt.y - img.y, s);
                let left = one.in_b(&img).not();
                let two_step = ge(img.y - image(p, &img).y, s);
                down.and(one_step.or(left).or(two_step))
            }
            Lemma::NoB => one.in_b(&img).not(),
            Lemma::UpE1 | Lemma::UpE2 => {
                let (region, s) = if lemma == Lemma::UpE1 {
                    (&one, speeds.s_e1)
                } else {
                    (&two, speeds.s_e2.unwrap_or(0.0))
                };
                let up = gt(img.y, y);
                let one_step = ge(img.y - pt.y, s);
                let left = region.in_e(&img).not();
                let two_step = ge(image(p, &img).y - img.y, s);
                up.and(one_step.or(left).or(two_step))
            }
            Lemma::NoE1 => one.in_e(&img).not(),
            Lemma::NoE2 => two.in_e(&img).not(),
            Lemma::LeftC2 => lt(img.x, x),
            Lemma::NoEC => two.in_d(&img),
            Lemma::PropA => {
                let not_a = ge(img.x, k);
                if x >= k {
                    not_a.and(gt(img.x, k))
                } else {
                    not_a
                }
            }
            Lemma::PropC1 => one.in_d(&img),
        };
        match verdict {
            Truth::Holds => holds += 1,
            Truth::Unknown => inconclusive += 1,
            Truth::Fails => {
                witness.get_or_insert(Point::new(x, y));
            }
        }
    }
    Ok(LemmaReport {
        lemma,
        params: *p,
        samples: sample,
        holds,
        inconclusive,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::U2_TOL;

    fn p(a: f64, b: f64, c: f64, k: f64) -> Params {
        Params::new(a, b, c, k).unwrap()
    }

    #[test]
    fn classify_examples() {
        let pp = p(0.6, 0.1, 0.9, 0.01);
        let ab = AbsorbingBounds::compute(&pp, U2_TOL).unwrap();
        assert_eq!(
            classify(&pp, &ab, Variant::Two, Point::new(2.553, 1.612)).unwrap(),
            RegionLabel::Dplus(Variant::Two)
        );
        assert_eq!(
            classify(&pp, &ab, Variant::One, Point::new(pp.k - 1.0, 0.0)).unwrap(),
            RegionLabel::A
        );
        let pp = p(0.5, 0.01, 0.98, 0.9);
        let ab = AbsorbingBounds::compute(&pp, U2_TOL).unwrap();
        assert_eq!(
            classify(&pp, &ab, Variant::Two, Point::new(4.01925, 1.8954493)).unwrap(),
            RegionLabel::C(Variant::Two)
        );
        assert_eq!(
            classify(&pp, &ab, Variant::Two, Point::new(2.8316796, 1.8875321)).unwrap(),
            RegionLabel::E(Variant::Two)
        );
        assert_eq!(
            classify(&pp, &ab, Variant::One, Point::new(4.01925, 1.8954493)).unwrap(),
            RegionLabel::Dplus(Variant::One)
        );
    }

    #[test]
    fn classify_boundaries_follow_set_builder_inequalities() {
        let pp = p(0.89, 0.18, 0.28, 0.025);
        let ab = AbsorbingBounds::compute(&pp, U2_TOL).unwrap();
        let v = Variant::One;
        let c = |x, y| classify(&pp, &ab, v, Point::new(x, y)).unwrap();
        assert_eq!(c(pp.k, 0.0), RegionLabel::Dplus(v));
        assert_eq!(c(pp.k, ab.v_hat), RegionLabel::Dplus(v));
        assert_eq!(c(pp.k, ab.v_hat.next_up()), RegionLabel::B);
        assert_eq!(c(ab.u1_hat, 0.0), RegionLabel::Dplus(v));
        assert_eq!(c(ab.u1_hat.next_up(), ab.v_hat), RegionLabel::C(v));
        assert_eq!(c(1.0, ab.w1_hat), RegionLabel::Dplus(v));
        assert_eq!(c(1.0, ab.w1_hat.next_down()), RegionLabel::E(v));
        assert_eq!(c(pp.k.next_down(), 100.0), RegionLabel::A);
    }

    #[test]
    fn classify_variant_two_needs_u2() {
        let pp = p(0.89, 0.18, 0.28, 0.025);
        let ab = AbsorbingBounds::absorbing(&pp).unwrap();
        assert_eq!(
            classify(&pp, &ab, Variant::Two, Point::new(1.0, 0.0)),
            Err(Error::MissingU2)
        );
    }

    #[test]
    fn speed_bounds_pathological_case() {
        let pp = p(0.99, 0.77, 0.01, 0.48);
        let ab = AbsorbingBounds::compute(&pp, U2_TOL).unwrap();
        let s = speed_bounds(&pp, &ab);
        assert!((s.s_b / 9.75e-18 - 1.0).abs() < 0.05, "{}", s.s_b);
        assert!(s.s_e1 > 1.44e-31 && s.s_e1 < 1.44e-29, "{}", s.s_e1);
        assert!(s.s_b > 0.0 && s.s_e1 > 0.0 && s.s_e2.unwrap() > 0.0);
        assert_eq!(s.s_b, pp.b * s.eps_b);
        assert_eq!(s.s_e1, pp.b * s.eps_e1);
    }

    #[test]
    fn speed_bounds_flag_underflow() {
        // v̂ = (0.01 − 0.99·20)/0.01 ≈ −1979: e^v̂ is zero in f64.
        let pp = p(0.99, 0.99, 0.01, 20.0);
        let ab = AbsorbingBounds::absorbing(&pp).unwrap();
        let s = speed_bounds(&pp, &ab);
        assert!(s.underflow);
    }

    #[test]
    fn first_hit_at_start() {
        let pp = p(0.89, 0.18, 0.28, 0.025);
        let d1 = bounds::d1_plus(&pp).unwrap();
        let (cx, cy) = d1.rect.center();
        let rep = first_hit(&pp, &d1, Point::new(cx, cy), HitOptions::new(100)).unwrap();
        assert_eq!(rep.first_hit, Some(0));
        assert_eq!(rep.stayed_after, Some(true));
        assert!(!rep.escape_seen);
        assert_eq!(rep.iterations_run, 100);
    }

    #[test]
    fn first_hit_rejects_zero_budget() {
        let pp = p(0.89, 0.18, 0.28, 0.025);
        let d1 = bounds::d1_plus(&pp).unwrap();
        assert!(first_hit(&pp, &d1, Point::new(0.0, 0.0), HitOptions::new(0)).is_err());
    }

    #[test]
    fn first_hit_reports_nonfinite_index() {
        let pp = p(0.5, 0.5, 0.5, 0.1);
        let d1 = bounds::d1_plus(&pp).unwrap();
        let err = first_hit(&pp, &d1, Point::new(1.0, 900.0), HitOptions::new(10)).unwrap_err();
        assert_eq!(err, Error::NonFinite { iteration: 1 });
    }

    #[test]
    fn escape_orbit_is_slow() {
        let pp = p(0.99, 0.03, 0.06, 0.41);
        let d1 = bounds::d1_plus(&pp).unwrap();
        let rep = first_hit(&pp, &d1, Point::new(0.41, 64.0), HitOptions::new(100_000)).unwrap();
        assert!(rep.first_hit.unwrap() > 5200, "{:?}", rep);
    }

    #[test]
    fn period_two_orbit_avoids_d2() {
        let pp = p(0.5, 0.01, 0.98, 0.9);
        let d2 = bounds::d2_plus(&pp, U2_TOL).unwrap().region;
        let rep = first_hit(
            &pp,
            &d2,
            Point::new(2.8316796, 1.8875321),
            HitOptions::new(100_000),
        )
        .unwrap();
        assert_eq!(rep.first_hit, None);
        assert_eq!(rep.iterations_run, 100_000);
    }

    #[test]
    fn counterexamples_reproduce() {
        let rep = verify_statement_counterexamples().unwrap();
        assert!(rep.all_falsified());
        let s = &rep.statements;
        assert!((s[0].image.x - 0.201).abs() < 5e-4);
        // 6.76/e + 0.116; the commonly quoted three digits are truncated, not rounded.
        assert!((s[1].image.x - 2.602865).abs() < 1e-6);
        assert!((s[2].image.y + 0.42).abs() < 5e-4);
        assert!((s[1].legacy.u - 2.5).abs() < 1e-12 && (s[1].legacy.v - 1.777).abs() < 1e-3);
        assert!((s[2].legacy.w + 0.157).abs() < 1e-3);
    }

    #[test]
    fn counter3_fixed_point() {
        let pp = p(0.6, 0.1, 0.9, 0.01);
        let q = find_fixed_point(&pp, Point::new(2.5, 1.6), 1e-12, 10_000).unwrap();
        assert!(q.dist_inf(&Point::new(2.553, 1.612)) < 1e-3);
    }

    #[test]
    fn linear_part_fixed_value_is_not_a_fixed_point() {
        let pp = p(0.89, 0.18, 0.28, 0.025);
        let q = Point::new(pp.k, bounds::v_hat(&pp));
        let img = map::step(&pp, q).unwrap();
        assert!((img.y - q.y).abs() < 1e-12);
        assert!(img.x - q.x > 1e-3);
    }

    #[test]
    fn unstable_fixed_point_by_newton() {
        let pp = p(0.89, 0.18, 0.28, 0.025);
        let d2 = bounds::d2_plus(&pp, U2_TOL).unwrap().region;
        let (cx, cy) = d2.rect.center();
        let q = find_fixed_point(&pp, Point::new(cx, cy), 1e-10, 200).unwrap();
        assert!(residual(&pp, q, 1).unwrap() < 1e-10);
    }

    #[test]
    fn no_ec_hypothesis_gate() {
        let pp = p(0.5, 0.01, 0.98, 0.9);
        assert_eq!(
            lemma_property_check(&pp, Lemma::NoEC, 10, 1).unwrap_err(),
            Error::HypothesisNotMet("noEC requires a + b ≥ 1")
        );
    }

    #[test]
    fn left_c2_holds_on_the_closure_boundary() {
        let pp = p(0.9, 0.1, 0.9, 0.1);
        let ab = AbsorbingBounds::compute(&pp, U2_TOL).unwrap();
        let u2 = ab.u2_hat.unwrap();
        for y in [ab.v_hat, 0.0, -50.0] {
            let img = image(&pp, &IRect::point(u2, y));
            assert_eq!(lt(img.x, u2), Truth::Holds);
        }
    }

    #[test]
    fn lemma_checks_on_reference_parameters() {
        for pp in [
            p(0.89, 0.18, 0.28, 0.025),
            p(0.9, 0.1, 0.9, 0.1),
            p(0.99, 0.99, 0.01, 0.04),
        ] {
            for lemma in Lemma::ALL {
                if lemma == Lemma::NoEC && !pp.weak_hypothesis() {
                    continue;
                }
                let rep = lemma_property_check(&pp, lemma, 500, 7).unwrap();
                assert!(rep.passed(), "{:?}", rep);
                assert_eq!(rep.holds + rep.inconclusive, 500);
            }
        }
    }

    #[test]
    fn lemma_names_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(Lemma::parse(l.name()), Some(l));
        }
        assert_eq!(Lemma::parse("nope"), None);
    }
}
