//! Experiment runners and the argument parser behind the `chialvo` binary.
//!
//! Every command returns a serializable report; [`run`] renders it and maps
//! errors to exit codes (see [`exit_code`]).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, AbsorbingBounds, LegacyBounds, RegionKind, RegionRect, U2_TOL};
use crate::error::{Error, Result};
use crate::map::{self, IRect, Params, Point};
use crate::regions::{self, first_hit, HitOptions, HitReport, Lemma, LemmaReport, StatementCheck};
use crate::setops::{self, CellSet, Lattice, DEFAULT_CELL_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_NOT_CLOSED: i32 = 4;
pub const EXIT_EMPTY: i32 = 5;
pub const EXIT_MISMATCH: i32 = 6;

/// Threshold on `û₁` above which sweep start boxes are built from `D̂₂⁺`.
pub const START_BOX_THRESHOLD: f64 = 105.0;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_)
        | Error::InvalidArgument(_)
        | Error::DegenerateLegacy(_)
        | Error::MissingU2
        | Error::HypothesisNotMet(_) => EXIT_INVALID,
        Error::NonFinite { .. }
        | Error::Overflow(_)
        | Error::NoConvergence { .. }
        | Error::TooManyCells { .. } => EXIT_OVERFLOW,
        Error::NotClosed { .. } => EXIT_NOT_CLOSED,
        Error::EmptyResult => EXIT_EMPTY,
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Debug, Clone, Serialize)]
pub struct Rects {
    pub d1_plus: RegionRect,
    pub d2_plus: Option<RegionRect>,
    pub legacy_dplus: Option<RegionRect>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsSummary {
    pub area_d1: f64,
    pub area_d2: Option<f64>,
    pub u2_minus_u1: Option<f64>,
    /// `a + b ≥ 1`: `D̂₂⁺` is proven weakly absorbing.
    pub weakly_absorbing: bool,
    pub u2_error: Option<String>,
    pub legacy_error: Option<String>,
}

/// `{params, bounds, legacy, rects, summary}` envelope shared by the
/// per-parameter commands.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<S: Serialize> {
    pub params: Params,
    pub bounds: AbsorbingBounds,
    pub legacy: Option<LegacyBounds>,
    pub rects: Rects,
    pub summary: S,
}

pub type BoundsReport = Envelope<BoundsSummary>;

fn envelope<S: Serialize>(p: &Params, summary: S) -> Result<Envelope<S>> {
    let b = cmd_bounds(p, false)?;
    Ok(Envelope {
        params: b.params,
        bounds: b.bounds,
        legacy: b.legacy,
        rects: b.rects,
        summary,
    })
}

/// All bounds and rectangles for `p`. A failing `û₂` search or undefined
/// legacy bounds are reported in the summary; with `require_legacy` the
/// latter is an error instead.
pub fn cmd_bounds(p: &Params, require_legacy: bool) -> Result<BoundsReport> {
    let mut ab = AbsorbingBounds::absorbing(p)?;
    let (u2_error, d2) = match bounds::d2_plus(p, U2_TOL) {
        Ok(d2) => {
            ab.u2_hat = Some(d2.region.rect.x.hi);
            ab.w2_hat = Some(d2.region.rect.y.lo);
            (None, Some(d2.region))
        }
        Err(e) => (Some(e.to_string()), None),
    };
    let (legacy, legacy_rect, legacy_error) = match bounds::legacy_bounds(p) {
        Ok(lb) => (Some(lb), bounds::legacy_dplus(p).ok(), None),
        Err(e) if require_legacy => return Err(e),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let d1 = RegionRect {
        rect: ab.d1_rect(p),
        kind: RegionKind::D1plus,
    };
    Ok(Envelope {
        params: *p,
        bounds: ab,
        legacy,
        rects: Rects {
            d1_plus: d1,
            d2_plus: d2,
            legacy_dplus: legacy_rect,
        },
        summary: BoundsSummary {
            area_d1: d1.area(),
            area_d2: d2.map(|r| r.area()),
            u2_minus_u1: ab.u2_hat.map(|u2| u2 - ab.u1_hat),
            weakly_absorbing: p.weak_hypothesis(),
            u2_error,
            legacy_error,
        },
    })
}

// ---------------------------------------------------------------------------
// simulate

/// Iterates `skip .. skip + n` of the orbit of `start`.
pub fn cmd_simulate(p: &Params, start: Point, n: usize, skip: usize) -> Result<Vec<Point>> {
    let mut q = start;
    for i in 0..skip {
        q = map::step(p, q).map_err(|_| Error::NonFinite { iteration: i + 1 })?;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            q = map::step(p, q).map_err(|_| Error::NonFinite {
                iteration: skip + i,
            })?;
        }
        out.push(q);
    }
    Ok(out)
}

pub fn write_points_csv<W: Write>(pts: &[Point], mut w: W) -> std::io::Result<()> {
    for q in pts {
        writeln!(w, "{},{}", fmt17(q.x), fmt17(q.y))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointCheck {
    pub params: Params,
    pub point: Point,
    pub residual: f64,
    pub in_legacy_dplus: bool,
    pub in_d1_plus: bool,
    pub reproduced: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodTwoCheck {
    pub params: Params,
    pub orbit: [Point; 2],
    pub residual: f64,
    pub in_d1_plus: bool,
    /// Iterations checked for entry into `D̂₂⁺`.
    pub horizon: usize,
    pub entered_d2: bool,
    pub reproduced: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub statements: Vec<StatementCheck>,
    pub fixed_point: FixedPointCheck,
    pub period_two: PeriodTwoCheck,
    pub lemmas: Vec<LemmaReport>,
    pub all_reproduced: bool,
}

pub fn check_fixed_point() -> Result<FixedPointCheck> {
    let p = Params::new(0.6, 0.1, 0.9, 0.01)?;
    let q = regions::find_fixed_point(&p, Point::new(2.5, 1.6), 1e-12, 10_000)?;
    let residual = map::step(&p, q)?.dist_inf(&q);
    let in_legacy = bounds::legacy_dplus(&p)?.contains(q.x, q.y);
    let in_d1 = bounds::d1_plus(&p)?.contains(q.x, q.y);
    Ok(FixedPointCheck {
        params: p,
        point: q,
        residual,
        in_legacy_dplus: in_legacy,
        in_d1_plus: in_d1,
        reproduced: !in_legacy && in_d1 && residual < 1e-9,
    })
}

pub fn check_period_two(horizon: usize) -> Result<PeriodTwoCheck> {
    let p = Params::new(0.5, 0.01, 0.98, 0.9)?;
    let q = regions::find_periodic_point(&p, Point::new(4.01925, 1.8954493), 2, 1e-12, 10_000)?;
    let q1 = map::step(&p, q)?;
    let residual = map::step(&p, q1)?.dist_inf(&q);
    let d1 = bounds::d1_plus(&p)?;
    let d2 = bounds::d2_plus(&p, U2_TOL)?.region;
    let hit = first_hit(&p, &d2, q, HitOptions::new(horizon))?;
    let in_d1 = d1.contains(q.x, q.y) && d1.contains(q1.x, q1.y);
    Ok(PeriodTwoCheck {
        params: p,
        orbit: [q, q1],
        residual,
        in_d1_plus: in_d1,
        horizon,
        entered_d2: hit.first_hit.is_some(),
        reproduced: residual < 1e-5 && in_d1 && hit.first_hit.is_none(),
    })
}

/// Counterexamples, the fixed point, the period-2 orbit, and lemma checks
/// at the reference parameter sets.
pub fn cmd_verify(seed: u64) -> Result<VerifyReport> {
    let statements = regions::verify_statement_counterexamples()?;
    let fixed_point = check_fixed_point()?;
    let period_two = check_period_two(100_000)?;
    let mut lemmas = Vec::new();
    for p in [
        Params::new(0.89, 0.18, 0.28, 0.025)?,
        Params::new(0.9, 0.1, 0.9, 0.1)?,
        Params::new(0.99, 0.99, 0.01, 0.04)?,
    ] {
        for lemma in Lemma::ALL {
            match regions::lemma_property_check(&p, lemma, 200, seed) {
                Ok(r) => lemmas.push(r),
                Err(Error::HypothesisNotMet(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let all_reproduced = statements.all_falsified()
        && fixed_point.reproduced
        && period_two.reproduced
        && lemmas.iter().all(LemmaReport::passed);
    Ok(VerifyReport {
        statements: statements.statements,
        fixed_point,
        period_two,
        lemmas,
        all_reproduced,
    })
}

// ---------------------------------------------------------------------------
// first-hit

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    D1,
    D2,
    Legacy,
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstHitSummary {
    pub start: Point,
    pub target: Target,
    pub report: HitReport,
}

pub fn cmd_first_hit(
    p: &Params,
    start: Point,
    target: Target,
    opts: HitOptions,
) -> Result<Envelope<FirstHitSummary>> {
    let region = match target {
        Target::D1 => bounds::d1_plus(p)?,
        Target::D2 => bounds::d2_plus(p, U2_TOL)?.region,
        Target::Legacy => bounds::legacy_dplus(p)?,
    };
    let report = first_hit(p, &region, start, opts)?;
    envelope(
        p,
        FirstHitSummary {
            start,
            target,
            report,
        },
    )
}

// ---------------------------------------------------------------------------
// sweeps

/// Parameter values are handled in units of 10⁻⁴ so that grids and the
/// `a + b < 1` filter are free of accumulation error.
const UNITS: f64 = 10_000.0;

fn to_units(v: f64) -> i64 {
    (v * UNITS).round() as i64
}

fn from_units(u: i64) -> f64 {
    u as f64 / UNITS
}

/// Arithmetic progression `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Progression {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Progression {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn single(v: f64) -> Self {
        Self::new(v, v, 1.0)
    }

    fn units(&self) -> Vec<i64> {
        let (s, e, d) = (
            to_units(self.start),
            to_units(self.stop),
            to_units(self.step).max(1),
        );
        (0..).map(|i| s + i * d).take_while(|&u| u <= e).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFilter {
    All,
    APlusBLt1,
    APlusBGe1,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub a: Vec<Progression>,
    pub b: Vec<Progression>,
    pub c: Vec<Progression>,
    pub k: Vec<Progression>,
    pub filter: SweepFilter,
    /// Tuples appended after the grid (before filtering).
    pub extra: Vec<Params>,
}

fn axis_units(ps: &[Progression]) -> Vec<i64> {
    let mut v: Vec<i64> = ps.iter().flat_map(Progression::units).collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl SweepSpec {
    /// Step-`step` grids from 0.01 to 0.99 for `a, b, c`; `k` adds 1..20.
    pub fn desk(step: f64) -> Self {
        let unit = vec![Progression::new(0.01, 0.99, step)];
        Self {
            a: unit.clone(),
            b: unit.clone(),
            c: unit.clone(),
            k: vec![
                Progression::new(0.01, 0.99, step),
                Progression::new(1.0, 20.0, 1.0),
            ],
            filter: SweepFilter::All,
            extra: Vec::new(),
        }
    }

    /// The full 0.01-step grid (about 2.8·10⁸ tuples).
    pub fn full() -> Self {
        let unit = vec![Progression::new(0.01, 0.99, 0.01)];
        Self {
            a: unit.clone(),
            b: unit.clone(),
            c: unit.clone(),
            k: vec![
                Progression::new(0.01, 0.99, 0.01),
                Progression::new(1.0, 20.0, 0.1),
            ],
            filter: SweepFilter::All,
            extra: Vec::new(),
        }
    }

    pub fn with_filter(mut self, f: SweepFilter) -> Self {
        self.filter = f;
        self
    }

    fn keep(&self, a: i64, b: i64) -> bool {
        let one = UNITS as i64;
        match self.filter {
            SweepFilter::All => true,
            SweepFilter::APlusBLt1 => a + b < one,
            SweepFilter::APlusBGe1 => a + b >= one,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
            ("k", &self.k),
        ] {
            let u = axis_units(axis);
            if u.is_empty() {
                return Err(Error::InvalidArgument(format!("empty grid for {name}")));
            }
            let one = UNITS as i64;
            let bad = if name == "k" {
                u[0] <= 0
            } else {
                u[0] <= 0 || *u.last().unwrap() >= one
            };
            if bad {
                return Err(Error::InvalidArgument(format!(
                    "grid for {name} leaves the admissible range"
                )));
            }
        }
        Ok(())
    }

    /// Grid tuples (in `a, b, c, k` lexicographic order) that pass the filter,
    /// followed by the passing extras.
    pub fn tuples(&self) -> Result<Vec<Params>> {
        self.validate()?;
        let (a, b, c, k) = (
            axis_units(&self.a),
            axis_units(&self.b),
            axis_units(&self.c),
            axis_units(&self.k),
        );
        let mut out = Vec::new();
        for &ua in &a {
            for &ub in &b {
                if !self.keep(ua, ub) {
                    continue;
                }
                for &uc in &c {
                    for &uk in &k {
                        out.push(Params::new(
                            from_units(ua),
                            from_units(ub),
                            from_units(uc),
                            from_units(uk),
                        )?);
                    }
                }
            }
        }
        for p in &self.extra {
            if self.keep(to_units(p.a), to_units(p.b)) && !out.contains(p) {
                out.push(*p);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport<R: Serialize, S: Serialize> {
    pub spec: SweepSpec,
    pub records: Vec<R>,
    pub summary: S,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffRecord {
    pub params: Params,
    pub u1_hat: Option<f64>,
    pub u2_hat: Option<f64>,
    pub diff: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffSummary {
    pub tuples: usize,
    pub computed: usize,
    pub skipped: usize,
    pub max_diff: Option<f64>,
    pub argmax: Option<Params>,
}

pub fn cmd_sweep_diff(spec: &SweepSpec) -> Result<ExperimentReport<DiffRecord, DiffSummary>> {
    let tuples = spec.tuples()?;
    let records: Vec<DiffRecord> = tuples
        .par_iter()
        .map(|p| {
            let r = AbsorbingBounds::absorbing(p)
                .and_then(|ab| Ok((ab.u1_hat, bounds::u2_hat(p, U2_TOL)?)));
            match r {
                Ok((u1, u2)) => DiffRecord {
                    params: *p,
                    u1_hat: Some(u1),
                    u2_hat: Some(u2),
                    diff: Some(u2 - u1),
                    skipped: None,
                },
                Err(e) => DiffRecord {
                    params: *p,
                    u1_hat: None,
                    u2_hat: None,
                    diff: None,
                    skipped: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut best: Option<(f64, Params)> = None;
    for r in &records {
        if let Some(d) = r.diff {
            if best.is_none_or(|(m, _)| d > m) {
                best = Some((d, r.params));
            }
        }
    }
    let skipped = records.iter().filter(|r| r.skipped.is_some()).count();
    let summary = DiffSummary {
        tuples: records.len(),
        computed: records.len() - skipped,
        skipped,
        max_diff: best.map(|b| b.0),
        argmax: best.map(|b| b.1),
    };
    Ok(ExperimentReport {
        spec: spec.clone(),
        records,
        summary,
    })
}

/// Start box for the weak-absorption sweep: `D̂₁⁺` when `û₁` is below the
/// threshold, otherwise `D̂₂⁺` stretched four times towards `+x` and `−y`.
pub fn start_box(p: &Params, ab: &AbsorbingBounds) -> Result<IRect> {
    if ab.u1_hat < START_BOX_THRESHOLD {
        return Ok(ab.d1_rect(p));
    }
    let (u2, w2) = (
        ab.u2_hat.ok_or(Error::MissingU2)?,
        ab.w2_hat.ok_or(Error::MissingU2)?,
    );
    IRect::from_bounds(
        p.k,
        u2 + 3.0 * (u2 - p.k),
        w2 - 3.0 * (ab.v_hat - w2),
        ab.v_hat,
    )
}

/// `n × n` cell-centred points of `r`, row by row from the lower left.
pub fn start_grid(r: &IRect, n: usize) -> Vec<Point> {
    let (dx, dy) = (r.x.width() / n as f64, r.y.width() / n as f64);
    (0..n)
        .flat_map(|j| {
            (0..n).map(move |i| {
                Point::new(
                    r.x.lo + (i as f64 + 0.5) * dx,
                    r.y.lo + (j as f64 + 0.5) * dy,
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeakOutcome {
    /// Every start reached `D̂₂⁺`.
    Entered {
        slowest: usize,
    },
    /// The orbit settled on a cycle of length 1 or 2 outside `D̂₂⁺`.
    Periodic {
        start: Point,
        period: usize,
        at: usize,
    },
    /// No entry within the iteration budget (inconclusive).
    Timeout {
        start: Point,
    },
    Skipped,
}

impl WeakOutcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, Self::Periodic { .. } | Self::Timeout { .. })
    }
}

enum Orbit {
    Hit(usize),
    Periodic(usize, usize),
    Timeout,
}

fn settled(a: (f64, f64), b: (f64, f64)) -> bool {
    let tol = |u: f64| 1e-13 * u.abs().max(1.0);
    (a.0 - b.0).abs() <= tol(a.0) && (a.1 - b.1).abs() <= tol(a.1)
}

/// Follows one orbit until an iterate with index ≥ 1 enters `target`.
fn weak_orbit(p: &Params, target: &IRect, start: Point, max_iter: usize) -> Result<Orbit> {
    let (mut prev2, mut prev1) = ((f64::NAN, f64::NAN), (f64::NAN, f64::NAN));
    let (mut x, mut y) = (start.x, start.y);
    for n in 1..=max_iter {
        let (nx, ny) = map::step_raw(p, x, y);
        if !(nx.is_finite() && ny.is_finite()) {
            return Err(Error::NonFinite { iteration: n });
        }
        (x, y) = (nx, ny);
        if target.contains(x, y) {
            return Ok(Orbit::Hit(n));
        }
        if settled((x, y), prev1) {
            return Ok(Orbit::Periodic(1, n));
        }
        if settled((x, y), prev2) {
            return Ok(Orbit::Periodic(2, n));
        }
        prev2 = prev1;
        prev1 = (x, y);
    }
    Ok(Orbit::Timeout)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakRecord {
    pub params: Params,
    pub outcome: WeakOutcome,
    pub skipped: Option<String>,
}

/// Observed `[min, max]` of each parameter over failing tuples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamRanges {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub k: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakSummary {
    pub tuples: usize,
    pub skipped: usize,
    pub failures: usize,
    pub periodic: usize,
    pub timeouts: usize,
    pub failure_percent: f64,
    pub periodic_percent_of_failures: f64,
    pub failure_ranges: Option<ParamRanges>,
    pub grid_pts: usize,
    pub max_iter: usize,
}

/// One tuple of the weak-absorption sweep; stops at the first failing start.
pub fn weak_tuple(p: &Params, grid_pts: usize, max_iter: usize) -> Result<WeakOutcome> {
    let ab = AbsorbingBounds::compute(p, U2_TOL)?;
    let target = ab.d2_rect(p).ok_or(Error::MissingU2)?.inflate(1e-9);
    let r = start_box(p, &ab)?;
    let mut slowest = 0;
    for q in start_grid(&r, grid_pts) {
        match weak_orbit(p, &target, q, max_iter)? {
            Orbit::Hit(n) => slowest = slowest.max(n),
            Orbit::Periodic(period, at) => {
                return Ok(WeakOutcome::Periodic {
                    start: q,
                    period,
                    at,
                })
            }
            Orbit::Timeout => return Ok(WeakOutcome::Timeout { start: q }),
        }
    }
    Ok(WeakOutcome::Entered { slowest })
}

pub fn cmd_sweep_weak(
    spec: &SweepSpec,
    grid_pts: usize,
    max_iter: usize,
) -> Result<ExperimentReport<WeakRecord, WeakSummary>> {
    if spec.filter != SweepFilter::APlusBLt1 {
        return Err(Error::InvalidArgument(
            "sweep-weak requires the a+b<1 filter".into(),
        ));
    }
    if grid_pts == 0 || max_iter == 0 {
        return Err(Error::InvalidArgument(
            "grid_pts and max_iter must be positive".into(),
        ));
    }
    let tuples = spec.tuples()?;
    let records: Vec<WeakRecord> = tuples
        .par_iter()
        .map(|p| match weak_tuple(p, grid_pts, max_iter) {
            Ok(outcome) => WeakRecord {
                params: *p,
                outcome,
                skipped: None,
            },
            Err(e) => WeakRecord {
                params: *p,
                outcome: WeakOutcome::Skipped,
                skipped: Some(e.to_string()),
            },
        })
        .collect();

    let failing: Vec<&WeakRecord> = records.iter().filter(|r| r.outcome.is_failure()).collect();
    let periodic = failing
        .iter()
        .filter(|r| matches!(r.outcome, WeakOutcome::Periodic { .. }))
        .count();
    let skipped = records.iter().filter(|r| r.skipped.is_some()).count();
    let span = |f: fn(&Params) -> f64| -> [f64; 2] {
        failing
            .iter()
            .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], r| {
                let v = f(&r.params);
                [lo.min(v), hi.max(v)]
            })
    };
    let failure_ranges = (!failing.is_empty()).then(|| ParamRanges {
        a: span(|p| p.a),
        b: span(|p| p.b),
        c: span(|p| p.c),
        k: span(|p| p.k),
    });
    let computed = records.len() - skipped;
    let pct = |n: usize, d: usize| {
        if d == 0 {
            0.0
        } else {
            100.0 * n as f64 / d as f64
        }
    };
    let summary = WeakSummary {
        tuples: records.len(),
        skipped,
        failures: failing.len(),
        periodic,
        timeouts: failing.len() - periodic,
        failure_percent: pct(failing.len(), computed),
        periodic_percent_of_failures: pct(periodic, failing.len()),
        failure_ranges,
        grid_pts,
        max_iter,
    };
    Ok(ExperimentReport {
        spec: spec.clone(),
        records,
        summary,
    })
}

// ---------------------------------------------------------------------------
// set-oriented commands

#[derive(Debug, Clone, Serialize)]
pub struct ClosureSummary {
    pub universe: IRect,
    pub lattice: Lattice,
    pub seed_cells: usize,
    pub rounds: usize,
    pub count: usize,
    pub area: f64,
    pub bounding_box: IRect,
    pub uncovered: usize,
    /// `area(D̂₂⁺) / area(D̂₁⁺)`.
    pub d2_d1_area_ratio: f64,
}

pub struct ClosureRun {
    pub report: Envelope<ClosureSummary>,
    pub cells: CellSet,
}

/// `D̂₂⁺` enlarged by `pad` on every side.
pub fn padded_d2(p: &Params, pad: f64) -> Result<IRect> {
    Ok(bounds::d2_plus(p, U2_TOL)?.region.rect.inflate(pad))
}

/// Forward closure of the `nx × ny` grid over `universe` (default: `D̂₂⁺`
/// padded by `pad`).
pub fn cmd_absorb_closure(
    p: &Params,
    nx: usize,
    ny: usize,
    universe: Option<IRect>,
    pad: f64,
    max_rounds: usize,
) -> Result<ClosureRun> {
    let universe = match universe {
        Some(u) => u,
        None => padded_d2(p, pad)?,
    };
    let lattice = Lattice::over(&universe, nx, ny)?;
    let d2 = bounds::d2_plus(p, U2_TOL)?.region;
    let seed = setops::cover(&lattice, &d2.rect, DEFAULT_CELL_CAP)?;
    let cl = setops::forward_closure(p, &seed, max_rounds, DEFAULT_CELL_CAP)?;
    let d1 = bounds::d1_plus(p)?;
    let summary = ClosureSummary {
        universe,
        lattice,
        seed_cells: seed.len(),
        rounds: cl.rounds,
        count: cl.cells.len(),
        area: cl.cells.area(),
        bounding_box: cl.cells.bounding_box().expect("nonempty closure"),
        uncovered: cl.uncovered,
        d2_d1_area_ratio: d2.area() / d1.area(),
    };
    Ok(ClosureRun {
        report: envelope(p, summary)?,
        cells: cl.cells,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundSummary {
    pub round: usize,
    pub candidates: usize,
    pub edges: usize,
    pub cells: usize,
    pub area: f64,
    pub bounding_box: IRect,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrentSummary {
    pub universe: IRect,
    pub nx: usize,
    pub ny: usize,
    pub rounds: Vec<RoundSummary>,
}

pub struct RecurrentRun {
    pub report: Envelope<RecurrentSummary>,
    pub rounds: Vec<setops::RecurrentRound>,
}

/// `D̂₁⁺` enlarged by a tenth of its width and height on every side.
pub fn default_recurrent_universe(p: &Params) -> Result<IRect> {
    let r = bounds::d1_plus(p)?.rect;
    let (dx, dy) = (0.1 * r.x.width(), 0.1 * r.y.width());
    IRect::from_bounds(r.x.lo - dx, r.x.hi + dx, r.y.lo - dy, r.y.hi + dy)
}

pub fn cmd_recurrent(
    p: &Params,
    universe: Option<IRect>,
    nx: usize,
    ny: usize,
    rounds: usize,
) -> Result<RecurrentRun> {
    let universe = match universe {
        Some(u) => u,
        None => default_recurrent_universe(p)?,
    };
    let rs = setops::recurrent_outer_bound(p, &universe, nx, ny, rounds)?;
    let summary = RecurrentSummary {
        universe,
        nx,
        ny,
        rounds: rs
            .iter()
            .map(|r| RoundSummary {
                round: r.round,
                candidates: r.candidates,
                edges: r.edges,
                cells: r.cells.len(),
                area: r.area(),
                bounding_box: r.cells.bounding_box().expect("nonempty round"),
            })
            .collect(),
    };
    Ok(RecurrentRun {
        report: envelope(p, summary)?,
        rounds: rs,
    })
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "chialvo",
    version,
    about = "Absorbing and weakly absorbing sets for the Chialvo map"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(short = 'a', allow_negative_numbers = true)]
    pub a: f64,
    #[arg(short = 'b', allow_negative_numbers = true)]
    pub b: f64,
    #[arg(short = 'c', allow_negative_numbers = true)]
    pub c: f64,
    #[arg(short = 'k', allow_negative_numbers = true)]
    pub k: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.a, self.b, self.c, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Restrict a to these values (comma separated).
    #[arg(short = 'a', value_delimiter = ',')]
    pub a: Vec<f64>,
    #[arg(short = 'b', value_delimiter = ',')]
    pub b: Vec<f64>,
    #[arg(short = 'c', value_delimiter = ',')]
    pub c: Vec<f64>,
    #[arg(short = 'k', value_delimiter = ',')]
    pub k: Vec<f64>,
    /// Grid step for a, b, c and the fractional part of k.
    #[arg(long, default_value_t = 0.07)]
    pub step: f64,
    /// Use the full 0.01-step grid (slow).
    #[arg(long)]
    pub paper_scale: bool,
    /// Extra tuples `a,b,c,k` appended to the grid.
    #[arg(long = "extra", value_parser = parse_tuple)]
    pub extra: Vec<Params>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    pub fn spec(&self, filter: SweepFilter) -> SweepSpec {
        let mut s = if self.paper_scale {
            SweepSpec::full()
        } else {
            SweepSpec::desk(self.step)
        };
        let pick = |v: &[f64], axis: &mut Vec<Progression>| {
            if !v.is_empty() {
                *axis = v.iter().map(|&x| Progression::single(x)).collect();
            }
        };
        pick(&self.a, &mut s.a);
        pick(&self.b, &mut s.b);
        pick(&self.c, &mut s.c);
        pick(&self.k, &mut s.k);
        s.extra = self.extra.clone();
        s.with_filter(filter)
    }
}

fn parse_tuple(s: &str) -> std::result::Result<Params, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c, k] => Params::new(*a, *b, *c, *k).map_err(|e| e.to_string()),
        _ => Err("expected a,b,c,k".into()),
    }
}

fn parse_rect(s: &str) -> std::result::Result<IRect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [xlo, xhi, ylo, yhi] => {
            IRect::from_bounds(*xlo, *xhi, *ylo, *yhi).map_err(|e| e.to_string())
        }
        _ => Err("expected xlo,xhi,ylo,yhi".into()),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print all bounds and rectangles as JSON.
    Bounds {
        #[command(flatten)]
        p: ParamArgs,
        /// Fail (exit 2) when the legacy bounds are undefined.
        #[arg(long)]
        legacy: bool,
    },
    /// Emit iterates skip .. skip+n of an orbit.
    Simulate {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        skip: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Re-check the known counterexamples (exit 6 on mismatch).
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// First entry of an orbit into a region.
    FirstHit {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long, value_enum, default_value_t = Target::D1)]
        target: Target,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Iterates to follow after the first hit (D1 only).
        #[arg(long)]
        persist: Option<usize>,
    },
    /// û₂ − û₁ over a parameter grid.
    SweepDiff {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Search for orbits avoiding D̂₂⁺ when a + b < 1.
    SweepWeak {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Starts per side of the start box (default 4; 10 with --paper-scale).
        #[arg(long)]
        grid_pts: Option<usize>,
        /// Iteration budget per start (default 10⁴; 10⁶ with --paper-scale).
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Forward closure of a grid cover of D̂₂⁺.
    AbsorbClosure {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, default_value_t = 128)]
        nx: usize,
        #[arg(long, default_value_t = 128)]
        ny: usize,
        /// Padding of D̂₂⁺ defining the grid box.
        #[arg(long, default_value_t = 0.01)]
        pad: f64,
        /// Explicit grid box `xlo,xhi,ylo,yhi` (overrides --pad).
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        universe: Option<IRect>,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outer bound of the recurrent set by graph refinement.
    Recurrent {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, default_value_t = 256)]
        nx: usize,
        #[arg(long, default_value_t = 256)]
        ny: usize,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        /// Grid box `xlo,xhi,ylo,yhi` (default: D̂₁⁺ enlarged by 10%).
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        universe: Option<IRect>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("i/o: {e}"))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports are serializable")
}

fn out_file(dir: &Path, name: &str) -> Result<fs::File> {
    fs::create_dir_all(dir).map_err(io_err)?;
    fs::File::create(dir.join(name)).map_err(io_err)
}

fn write_json_file<T: Serialize>(dir: &Path, name: &str, v: &T) -> Result<()> {
    let mut f = out_file(dir, name)?;
    writeln!(f, "{}", to_json(v)).map_err(io_err)
}

fn opt17(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

fn write_diff_csv(dir: &Path, recs: &[DiffRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(out_file(dir, "sweep_diff.csv")?);
    writeln!(f, "a,b,c,k,u1_hat,u2_hat,diff").map_err(io_err)?;
    for r in recs {
        let p = &r.params;
        writeln!(
            f,
            "{},{},{},{},{},{},{}",
            p.a,
            p.b,
            p.c,
            p.k,
            opt17(r.u1_hat),
            opt17(r.u2_hat),
            opt17(r.diff)
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn write_weak_csv(dir: &Path, recs: &[WeakRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(out_file(dir, "sweep_weak.csv")?);
    writeln!(f, "a,b,c,k,outcome,period,x0,y0").map_err(io_err)?;
    for r in recs {
        let p = &r.params;
        let (kind, period, start) = match r.outcome {
            WeakOutcome::Entered { .. } => ("entered", String::new(), None),
            WeakOutcome::Periodic { start, period, .. } => {
                ("periodic", period.to_string(), Some(start))
            }
            WeakOutcome::Timeout { start } => ("timeout", String::new(), Some(start)),
            WeakOutcome::Skipped => ("skipped", String::new(), None),
        };
        writeln!(
            f,
            "{},{},{},{},{kind},{period},{},{}",
            p.a,
            p.b,
            p.c,
            p.k,
            opt17(start.map(|q| q.x)),
            opt17(start.map(|q| q.y))
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn write_set(dir: &Path, stem: &str, set: &CellSet) -> Result<()> {
    setops::write_cells(
        set,
        std::io::BufWriter::new(out_file(dir, &format!("{stem}_cells.csv"))?),
    )?;
    setops::write_rects(
        set,
        std::io::BufWriter::new(out_file(dir, &format!("{stem}_rects.csv"))?),
    )
}

/// Runs a parsed command, writing its primary output to `out` and a short
/// human-readable line to `log`. Returns the exit code.
pub fn run<W: Write, L: Write>(cli: Cli, out: &mut W, log: &mut L) -> i32 {
    match execute(cli, out, log) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute<W: Write, L: Write>(cli: Cli, out: &mut W, log: &mut L) -> Result<i32> {
    match cli.command {
        Command::Bounds { p, legacy } => {
            let r = cmd_bounds(&p.params()?, legacy)?;
            writeln!(out, "{}", to_json(&r)).map_err(io_err)?;
            let _ = writeln!(
                log,
                "v_hat={} u1_hat={} w1_hat={} u2_hat={}",
                fmt6(r.bounds.v_hat),
                fmt6(r.bounds.u1_hat),
                fmt6(r.bounds.w1_hat),
                r.bounds.u2_hat.map(fmt6).unwrap_or_else(|| "-".into())
            );
        }
        Command::Simulate {
            p,
            x0,
            y0,
            n,
            skip,
            format,
        } => {
            let p = p.params()?;
            let pts = cmd_simulate(&p, Point::new(x0, y0), n, skip)?;
            match format {
                Format::Csv => write_points_csv(&pts, &mut *out).map_err(io_err)?,
                Format::Json => {
                    #[derive(Serialize)]
                    struct Sim<'a> {
                        params: Params,
                        skip: usize,
                        points: &'a [Point],
                    }
                    writeln!(
                        out,
                        "{}",
                        to_json(&Sim {
                            params: p,
                            skip,
                            points: &pts
                        })
                    )
                    .map_err(io_err)?
                }
            }
        }
        Command::Verify { seed } => {
            let r = cmd_verify(seed)?;
            writeln!(out, "{}", to_json(&r)).map_err(io_err)?;
            let _ = writeln!(log, "all reproduced: {}", r.all_reproduced);
            if !r.all_reproduced {
                return Ok(EXIT_MISMATCH);
            }
        }
        Command::FirstHit {
            p,
            x0,
            y0,
            target,
            max_iter,
            persist,
        } => {
            let mut opts = HitOptions::new(max_iter);
            opts.persist = persist;
            let r = cmd_first_hit(&p.params()?, Point::new(x0, y0), target, opts)?;
            writeln!(out, "{}", to_json(&r)).map_err(io_err)?;
        }
        Command::SweepDiff { sweep } => {
            let r = cmd_sweep_diff(&sweep.spec(SweepFilter::All))?;
            if let Some(dir) = &sweep.out {
                write_diff_csv(dir, &r.records)?;
                write_json_file(dir, "sweep_diff_summary.json", &r.summary)?;
            }
            writeln!(out, "{}", to_json(&r.summary)).map_err(io_err)?;
            let _ = writeln!(
                log,
                "tuples={} max_diff={}",
                r.summary.tuples,
                r.summary.max_diff.map(fmt6).unwrap_or_else(|| "-".into())
            );
        }
        Command::SweepWeak {
            sweep,
            grid_pts,
            max_iter,
        } => {
            let grid_pts = grid_pts.unwrap_or(if sweep.paper_scale { 10 } else { 4 });
            let max_iter = max_iter.unwrap_or(if sweep.paper_scale { 1_000_000 } else { 10_000 });
            let r = cmd_sweep_weak(&sweep.spec(SweepFilter::APlusBLt1), grid_pts, max_iter)?;
            if let Some(dir) = &sweep.out {
                write_weak_csv(dir, &r.records)?;
                write_json_file(dir, "sweep_weak_summary.json", &r.summary)?;
            }
            writeln!(out, "{}", to_json(&r.summary)).map_err(io_err)?;
            let _ = writeln!(
                log,
                "tuples={} failures={} ({}%)",
                r.summary.tuples,
                r.summary.failures,
                fmt6(r.summary.failure_percent)
            );
        }
        Command::AbsorbClosure {
            p,
            nx,
            ny,
            pad,
            universe,
            max_rounds,
            out: dir,
        } => {
            let run = cmd_absorb_closure(&p.params()?, nx, ny, universe, pad, max_rounds)?;
            if let Some(dir) = &dir {
                write_set(dir, "closure", &run.cells)?;
                write_json_file(dir, "closure_summary.json", &run.report)?;
            }
            writeln!(out, "{}", to_json(&run.report)).map_err(io_err)?;
            let s = &run.report.summary;
            let _ = writeln!(
                log,
                "rounds={} cells={} x_max={}",
                s.rounds,
                s.count,
                fmt6(s.bounding_box.x.hi)
            );
        }
        Command::Recurrent {
            p,
            nx,
            ny,
            rounds,
            universe,
            out: dir,
        } => {
            let run = cmd_recurrent(&p.params()?, universe, nx, ny, rounds)?;
            if let Some(dir) = &dir {
                for r in &run.rounds {
                    write_set(dir, &format!("recurrent_round{}", r.round), &r.cells)?;
                }
                write_json_file(dir, "recurrent_summary.json", &run.report)?;
            }
            writeln!(out, "{}", to_json(&run.report)).map_err(io_err)?;
            for r in &run.report.summary.rounds {
                let _ = writeln!(
                    log,
                    "round {}: cells={} area={}",
                    r.round,
                    r.cells,
                    fmt6(r.area)
                );
            }
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, c: f64, k: f64) -> Params {
        Params::new(a, b, c, k).unwrap()
    }

    #[test]
    fn desk_grid_sizes() {
        let s = SweepSpec::desk(0.07);
        assert_eq!(axis_units(&s.a).len(), 15);
        assert_eq!(axis_units(&s.k).len(), 35);
        assert_eq!(s.tuples().unwrap().len(), 15 * 15 * 15 * 35);
        let lt = s
            .clone()
            .with_filter(SweepFilter::APlusBLt1)
            .tuples()
            .unwrap();
        assert!(lt.iter().all(|q| q.a + q.b < 1.0 - 1e-12));
        let ge = s.with_filter(SweepFilter::APlusBGe1).tuples().unwrap();
        assert_eq!(lt.len() + ge.len(), 15 * 15 * 15 * 35);
        assert!(ge.iter().all(|q| !regions_lt(q)));
    }

    fn regions_lt(q: &Params) -> bool {
        to_units(q.a) + to_units(q.b) < 10_000
    }

    #[test]
    fn grid_values_are_exact_decimals() {
        let s = SweepSpec::desk(0.07);
        let a: Vec<f64> = axis_units(&s.a).into_iter().map(from_units).collect();
        assert_eq!(a[1], 0.08);
        assert_eq!(*a.last().unwrap(), 0.99);
    }

    #[test]
    fn full_grid_size() {
        let s = SweepSpec::full();
        let n = [&s.a, &s.b, &s.c, &s.k].map(|x| axis_units(x).len());
        assert_eq!(n, [99, 99, 99, 290]);
    }

    #[test]
    fn extras_respect_filter() {
        let mut s = SweepSpec::desk(0.49);
        s.extra = vec![p(0.99, 0.99, 0.01, 0.04)];
        assert!(s
            .clone()
            .tuples()
            .unwrap()
            .contains(&p(0.99, 0.99, 0.01, 0.04)));
        let lt = s.with_filter(SweepFilter::APlusBLt1).tuples().unwrap();
        assert!(!lt.contains(&p(0.99, 0.99, 0.01, 0.04)));
    }

    #[test]
    fn invalid_grid_rejected() {
        let mut s = SweepSpec::desk(0.07);
        s.a = vec![Progression::new(0.5, 1.2, 0.1)];
        assert!(s.tuples().is_err());
        s.a = vec![Progression::new(0.5, 0.4, 0.1)];
        assert!(s.tuples().is_err());
    }

    #[test]
    fn extremal_diff_tuple() {
        let mut s = SweepSpec::desk(0.07);
        for (axis, v) in [
            (&mut s.a, 0.99),
            (&mut s.b, 0.99),
            (&mut s.c, 0.01),
            (&mut s.k, 0.04),
        ] {
            *axis = vec![Progression::single(v)];
        }
        let r = cmd_sweep_diff(&s).unwrap();
        assert_eq!(r.records.len(), 1);
        assert!((r.summary.max_diff.unwrap() - 0.888).abs() < 1e-3);
    }

    #[test]
    fn start_box_switches_at_threshold() {
        let q = p(0.9, 0.1, 0.9, 0.1);
        let ab = AbsorbingBounds::compute(&q, U2_TOL).unwrap();
        let r = start_box(&q, &ab).unwrap();
        let (u2, w2) = (ab.u2_hat.unwrap(), ab.w2_hat.unwrap());
        assert!((r.x.hi - (u2 + 3.0 * (u2 - 0.1))).abs() < 1e-12);
        assert!((r.y.lo - (w2 - 3.0 * (ab.v_hat - w2))).abs() < 1e-12);
        let q = p(0.89, 0.18, 0.28, 0.025);
        let ab = AbsorbingBounds::compute(&q, U2_TOL).unwrap();
        assert_eq!(start_box(&q, &ab).unwrap(), ab.d1_rect(&q));
    }

    #[test]
    fn start_grid_is_cell_centred() {
        let r = IRect::from_bounds(0.0, 4.0, 0.0, 2.0).unwrap();
        let g = start_grid(&r, 2);
        assert_eq!(
            g,
            vec![
                Point::new(1.0, 0.5),
                Point::new(3.0, 0.5),
                Point::new(1.0, 1.5),
                Point::new(3.0, 1.5)
            ]
        );
    }

    #[test]
    fn weak_counterexample_tuple_fails_periodically() {
        let out = weak_tuple(&p(0.5, 0.01, 0.98, 0.9), 4, 10_000).unwrap();
        assert!(
            matches!(out, WeakOutcome::Periodic { period: 2, .. }),
            "{out:?}"
        );
    }

    #[test]
    fn weak_hypothesis_tuple_enters() {
        let out = weak_tuple(&p(0.89, 0.18, 0.28, 0.025), 4, 10_000).unwrap();
        assert!(matches!(out, WeakOutcome::Entered { .. }), "{out:?}");
    }

    #[test]
    fn sweep_weak_requires_filter() {
        assert!(cmd_sweep_weak(&SweepSpec::desk(0.07), 4, 100).is_err());
    }

    #[test]
    fn simulate_window() {
        let q = p(0.89, 0.18, 0.28, 0.025);
        assert!(cmd_simulate(&q, Point::new(1.0, 1.0), 0, 10)
            .unwrap()
            .is_empty());
        let a = cmd_simulate(&q, Point::new(1.0, 1.0), 3, 2).unwrap();
        let b = cmd_simulate(&q, Point::new(1.0, 1.0), 5, 0).unwrap();
        assert_eq!(a, b[2..].to_vec());
    }

    #[test]
    fn bounds_report_shape() {
        let r = cmd_bounds(&p(0.89, 0.18, 0.28, 0.025), false).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["params", "bounds", "legacy", "rects", "summary"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(cmd_bounds(&p(0.5, 0.5, 0.5, 0.1), true).is_err());
        let r = cmd_bounds(&p(0.5, 0.5, 0.5, 0.1), false).unwrap();
        assert!(r.legacy.is_none() && r.summary.legacy_error.is_some());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidParams("x".into())), 2);
        assert_eq!(exit_code(&Error::Overflow("x")), 3);
        assert_eq!(exit_code(&Error::NotClosed { rounds: 1 }), 4);
        assert_eq!(exit_code(&Error::EmptyResult), 5);
    }

    #[test]
    fn default_recurrent_universe_matches_setup() {
        let u = default_recurrent_universe(&p(0.89, 0.18, 0.28, 0.025)).unwrap();
        let want = [-0.637, 7.313, -9.42, 3.589];
        let got = [u.x.lo, u.x.hi, u.y.lo, u.y.hi];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-3, "{got:?}");
        }
    }
}
