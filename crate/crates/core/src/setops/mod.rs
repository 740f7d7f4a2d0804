//! Set-oriented machinery on a uniform, unbounded integer lattice.
//!
//! Cells are addressed by `(i, j) ∈ ℤ²`; cell `(i, j)` is the closed
//! rectangle `[x_i, x_{i+1}] × [y_j, y_{j+1}]` with `x_i = origin.x + i·w`
//! evaluated in floating point. Covers are computed against those exact
//! floating-point boundaries, so they are sound without any epsilon.

mod closure;
mod graph;
mod io;
mod recurrent;

pub use closure::{forward_closure, verify_closure, Closure};
pub use graph::{recurrent_cells, scc_ids, TransitionGraph};
pub use io::{read_cells, write_cells, write_rects};
pub use recurrent::{recurrent_outer_bound, recurrent_outer_bound_with, RecurrentRound};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{self, IRect, Interval, Params, Point};

/// Default cap on the number of cells in a set or a single cover.
pub const DEFAULT_CELL_CAP: usize = 50_000_000;

/// Largest index magnitude accepted; keeps `i as f64` exact.
const MAX_INDEX: f64 = 4.0e15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub i: i64,
    pub j: i64,
}

impl Cell {
    pub const fn new(i: i64, j: i64) -> Self {
        Self { i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub origin: Point,
    pub cell_w: f64,
    pub cell_h: f64,
}

/// Inclusive block of cells `[i0, i1] × [j0, j1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRange {
    pub i0: i64,
    pub i1: i64,
    pub j0: i64,
    pub j1: i64,
}

impl CellRange {
    pub fn len(&self) -> u128 {
        (self.i1 - self.i0 + 1) as u128 * (self.j1 - self.j0 + 1) as u128
    }

    pub fn is_empty(&self) -> bool {
        self.i1 < self.i0 || self.j1 < self.j0
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.i0 <= c.i && c.i <= self.i1 && self.j0 <= c.j && c.j <= self.j1
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        (self.j0..=self.j1).flat_map(move |j| (self.i0..=self.i1).map(move |i| Cell::new(i, j)))
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: &CellRange) -> Option<CellRange> {
        let r = CellRange {
            i0: self.i0.max(other.i0),
            i1: self.i1.min(other.i1),
            j0: self.j0.max(other.j0),
            j1: self.j1.min(other.j1),
        };
        (!r.is_empty()).then_some(r)
    }
}

impl Lattice {
    pub fn new(origin: Point, cell_w: f64, cell_h: f64) -> Result<Self> {
        if !origin.is_finite()
            || !(cell_w > 0.0 && cell_w.is_finite())
            || !(cell_h > 0.0 && cell_h.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "bad lattice: origin {origin:?}, cell {cell_w} x {cell_h}"
            )));
        }
        Ok(Self {
            origin,
            cell_w,
            cell_h,
        })
    }

    /// `nx × ny` cells with origin at the lower-left corner of `r`.
    pub fn over(r: &IRect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(
                "grid dimensions must be positive".into(),
            ));
        }
        Self::new(
            Point::new(r.x.lo, r.y.lo),
            r.x.width() / nx as f64,
            r.y.width() / ny as f64,
        )
    }

    pub fn x_at(&self, i: i64) -> f64 {
        self.origin.x + i as f64 * self.cell_w
    }

    pub fn y_at(&self, j: i64) -> f64 {
        self.origin.y + j as f64 * self.cell_h
    }

    pub fn rect(&self, c: Cell) -> IRect {
        IRect {
            x: Interval {
                lo: self.x_at(c.i),
                hi: self.x_at(c.i + 1),
            },
            y: Interval {
                lo: self.y_at(c.j),
                hi: self.y_at(c.j + 1),
            },
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_w * self.cell_h
    }

    /// Same origin, cells halved in both directions.
    pub fn refined(&self) -> Lattice {
        Lattice {
            origin: self.origin,
            cell_w: 0.5 * self.cell_w,
            cell_h: 0.5 * self.cell_h,
        }
    }

    /// The four cells of [`Lattice::refined`] tiling `c`.
    pub fn children(c: Cell) -> [Cell; 4] {
        let (i, j) = (2 * c.i, 2 * c.j);
        [
            Cell::new(i, j),
            Cell::new(i + 1, j),
            Cell::new(i, j + 1),
            Cell::new(i + 1, j + 1),
        ]
    }

    /// Index span `[first, last]` of cells along one axis covering `[lo, hi]`.
    fn axis_span(
        lo: f64,
        hi: f64,
        origin: f64,
        size: f64,
        at: impl Fn(i64) -> f64,
    ) -> Result<(i64, i64)> {
        let guess = |v: f64| -> Result<i64> {
            let t = ((v - origin) / size).floor();
            if !t.is_finite() || t.abs() > MAX_INDEX {
                return Err(Error::Overflow("lattice index"));
            }
            Ok(t as i64)
        };
        // first = max{i : at(i) ≤ lo}
        let mut first = guess(lo)?;
        while at(first) > lo {
            first -= 1;
        }
        while at(first + 1) <= lo {
            first += 1;
        }
        // last = min{i ≥ first : at(i + 1) ≥ hi}
        let mut last = guess(hi)?.max(first);
        while at(last + 1) < hi {
            last += 1;
        }
        while last > first && at(last) >= hi {
            last -= 1;
        }
        Ok((first, last))
    }

    /// Smallest block of cells whose union contains `r`.
    pub fn cover_range(&self, r: &IRect) -> Result<CellRange> {
        if !r.x.is_finite() || !r.y.is_finite() {
            return Err(Error::Overflow("cover of unbounded rectangle"));
        }
        let (i0, i1) =
            Self::axis_span(r.x.lo, r.x.hi, self.origin.x, self.cell_w, |i| self.x_at(i))?;
        let (j0, j1) =
            Self::axis_span(r.y.lo, r.y.hi, self.origin.y, self.cell_h, |j| self.y_at(j))?;
        Ok(CellRange { i0, i1, j0, j1 })
    }

    /// The cell whose half-open box `[x_i, x_{i+1}) × [y_j, y_{j+1})`
    /// contains the point.
    pub fn locate(&self, x: f64, y: f64) -> Result<Cell> {
        let r = self.cover_range(&IRect::point(x, y))?;
        Ok(Cell::new(r.i0, r.j0))
    }

    /// Block of cells `[0, nx) × [0, ny)`.
    pub fn grid(nx: usize, ny: usize) -> CellRange {
        CellRange {
            i0: 0,
            i1: nx as i64 - 1,
            j0: 0,
            j1: ny as i64 - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSet {
    pub lattice: Lattice,
    pub cells: HashSet<Cell>,
}

impl CellSet {
    pub fn new(lattice: Lattice) -> Self {
        Self {
            lattice,
            cells: HashSet::new(),
        }
    }

    pub fn from_range(lattice: Lattice, range: CellRange) -> Self {
        Self {
            lattice,
            cells: range.iter().collect(),
        }
    }

    pub fn from_cells(lattice: Lattice, cells: impl IntoIterator<Item = Cell>) -> Self {
        Self {
            lattice,
            cells: cells.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.cells.contains(c)
    }

    pub fn insert(&mut self, c: Cell) -> bool {
        self.cells.insert(c)
    }

    /// Cells in ascending `(i, j)` order.
    pub fn sorted(&self) -> Vec<Cell> {
        let mut v: Vec<Cell> = self.cells.iter().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn area(&self) -> f64 {
        self.cells.len() as f64 * self.lattice.cell_area()
    }

    pub fn index_bounds(&self) -> Option<CellRange> {
        let mut it = self.cells.iter();
        let first = it.next()?;
        let mut r = CellRange {
            i0: first.i,
            i1: first.i,
            j0: first.j,
            j1: first.j,
        };
        for c in it {
            r.i0 = r.i0.min(c.i);
            r.i1 = r.i1.max(c.i);
            r.j0 = r.j0.min(c.j);
            r.j1 = r.j1.max(c.j);
        }
        Some(r)
    }

    /// Bounding box of the union of cells.
    pub fn bounding_box(&self) -> Option<IRect> {
        let r = self.index_bounds()?;
        let l = &self.lattice;
        Some(IRect {
            x: Interval {
                lo: l.x_at(r.i0),
                hi: l.x_at(r.i1 + 1),
            },
            y: Interval {
                lo: l.y_at(r.j0),
                hi: l.y_at(r.j1 + 1),
            },
        })
    }

    /// Whether some member cell (closed) contains the point.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        match self.lattice.cover_range(&IRect::point(x, y)) {
            // A point on a cell boundary belongs to up to four closed cells.
            Ok(r) => (r.i0 - 1..=r.i1)
                .flat_map(|i| (r.j0 - 1..=r.j1).map(move |j| Cell::new(i, j)))
                .any(|c| self.cells.contains(&c) && self.lattice.rect(c).contains(x, y)),
            Err(_) => false,
        }
    }

    /// Each cell split 2×2 on the refined lattice.
    pub fn subdivided(&self) -> CellSet {
        CellSet {
            lattice: self.lattice.refined(),
            cells: self
                .cells
                .iter()
                .flat_map(|&c| Lattice::children(c))
                .collect(),
        }
    }
}

/// Minimal set of lattice cells whose union contains `r`.
pub fn cover(lattice: &Lattice, r: &IRect, cap: usize) -> Result<CellSet> {
    let range = lattice.cover_range(r)?;
    if range.len() > cap as u128 {
        return Err(Error::TooManyCells { cap });
    }
    Ok(CellSet::from_range(*lattice, range))
}

/// Cells covering a rigorous image of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageCells {
    Cells(CellRange),
    /// The enclosure overflowed; the image is not representable.
    Outside,
}

/// Enclosure of the image of a rectangle under some map.
pub trait RectMap: Sync {
    fn image(&self, r: &IRect) -> Result<IRect>;
}

impl RectMap for Params {
    fn image(&self, r: &IRect) -> Result<IRect> {
        map::step_rect(self, r)
    }
}

impl<F> RectMap for F
where
    F: Fn(&IRect) -> Result<IRect> + Sync,
{
    fn image(&self, r: &IRect) -> Result<IRect> {
        self(r)
    }
}

pub fn image_cells_with<M: RectMap + ?Sized>(f: &M, lattice: &Lattice, cell: Cell) -> ImageCells {
    match f.image(&lattice.rect(cell)) {
        Ok(img) => match lattice.cover_range(&img) {
            Ok(r) => ImageCells::Cells(r),
            Err(_) => ImageCells::Outside,
        },
        Err(_) => ImageCells::Outside,
    }
}

/// `cover(lattice, step_rect(p, rect(cell)))`, or `Outside` on overflow.
pub fn image_cells(p: &Params, lattice: &Lattice, cell: Cell) -> ImageCells {
    image_cells_with(p, lattice, cell)
}
