//! Text forms of cell sets: `i,j` lists with a lattice header, and
//! `xlo,xhi,ylo,yhi` rectangle CSV.

use std::io::{BufRead, Write};

use super::{Cell, CellSet, Lattice};
use crate::error::{Error, Result};
use crate::map::Point;

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("i/o: {e}"))
}

/// 17 significant digits.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_cells<W: Write>(set: &CellSet, mut w: W) -> Result<()> {
    let l = &set.lattice;
    writeln!(
        w,
        "# origin_x={} origin_y={} cell_w={} cell_h={}",
        fmt17(l.origin.x),
        fmt17(l.origin.y),
        fmt17(l.cell_w),
        fmt17(l.cell_h)
    )
    .map_err(io_err)?;
    writeln!(w, "i,j").map_err(io_err)?;
    for c in set.sorted() {
        writeln!(w, "{},{}", c.i, c.j).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_cells<R: BufRead>(r: R) -> Result<CellSet> {
    let bad = |m: &str| Error::InvalidArgument(format!("cell file: {m}"));
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| bad("empty"))?.map_err(io_err)?;
    let mut vals = [f64::NAN; 4];
    for part in header.trim_start_matches('#').split_whitespace() {
        let (key, v) = part.split_once('=').ok_or_else(|| bad("header"))?;
        let slot = match key {
            "origin_x" => 0,
            "origin_y" => 1,
            "cell_w" => 2,
            "cell_h" => 3,
            _ => return Err(bad(key)),
        };
        vals[slot] = v.parse().map_err(|_| bad(v))?;
    }
    let lattice = Lattice::new(Point::new(vals[0], vals[1]), vals[2], vals[3])?;
    let mut set = CellSet::new(lattice);
    for line in lines {
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() || line == "i,j" {
            continue;
        }
        let (i, j) = line.split_once(',').ok_or_else(|| bad(line))?;
        let c = Cell::new(
            i.trim().parse().map_err(|_| bad(line))?,
            j.trim().parse().map_err(|_| bad(line))?,
        );
        if !set.insert(c) {
            return Err(bad("duplicate cell"));
        }
    }
    Ok(set)
}

pub fn write_rects<W: Write>(set: &CellSet, mut w: W) -> Result<()> {
    writeln!(w, "xlo,xhi,ylo,yhi").map_err(io_err)?;
    for c in set.sorted() {
        let r = set.lattice.rect(c);
        writeln!(
            w,
            "{},{},{},{}",
            fmt17(r.x.lo),
            fmt17(r.x.hi),
            fmt17(r.y.lo),
            fmt17(r.y.hi)
        )
        .map_err(io_err)?;
    }
    Ok(())
}
