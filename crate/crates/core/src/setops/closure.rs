use rayon::prelude::*;

use super::{image_cells_with, Cell, CellSet, ImageCells, RectMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Closure {
    pub cells: CellSet,
    /// Number of rounds that added at least one cell.
    pub rounds: usize,
    /// Image cells missing from `cells` found by the final pass (0 when closed).
    pub uncovered: usize,
}

/// Smallest union of lattice cells containing `seed` and closed under the
/// cell-image map of `f`.
///
/// Works generation by generation: only cells added in the previous round
/// are expanded. Fails with `NotClosed` once more than `max_rounds` rounds
/// add cells, and with `Overflow` when some image is not representable.
pub fn forward_closure<M: RectMap + ?Sized>(
    f: &M,
    seed: &CellSet,
    max_rounds: usize,
    cap: usize,
) -> Result<Closure> {
    if seed.is_empty() {
        return Err(Error::InvalidArgument("closure seed is empty".into()));
    }
    let lattice = seed.lattice;
    let mut set = seed.clone();
    let mut frontier = seed.sorted();
    let mut rounds = 0;
    loop {
        let images: Vec<ImageCells> = frontier
            .par_iter()
            .map(|&c| image_cells_with(f, &lattice, c))
            .collect();
        let mut added: Vec<Cell> = Vec::new();
        for img in images {
            let range = match img {
                ImageCells::Cells(r) => r,
                ImageCells::Outside => return Err(Error::Overflow("closure image")),
            };
            if range.len() > cap as u128 {
                return Err(Error::TooManyCells { cap });
            }
            for c in range.iter() {
                if set.insert(c) {
                    added.push(c);
                }
            }
            if set.len() > cap {
                return Err(Error::TooManyCells { cap });
            }
        }
        if added.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > max_rounds {
            return Err(Error::NotClosed { rounds: max_rounds });
        }
        added.sort_unstable();
        frontier = added;
    }
    let uncovered = verify_closure(f, &set);
    Ok(Closure {
        cells: set,
        rounds,
        uncovered,
    })
}

/// Recomputes every member's image and counts cells outside the set;
/// an unrepresentable image counts as one.
pub fn verify_closure<M: RectMap + ?Sized>(f: &M, set: &CellSet) -> usize {
    let cells = set.sorted();
    cells
        .par_iter()
        .map(|&c| match image_cells_with(f, &set.lattice, c) {
            ImageCells::Cells(r) => r.iter().filter(|t| !set.contains(t)).count(),
            ImageCells::Outside => 1,
        })
        .sum()
}
