use super::{recurrent_cells, CellSet, Lattice, RectMap, TransitionGraph};
use crate::error::{Error, Result};
use crate::map::{IRect, Params};

#[derive(Debug, Clone)]
pub struct RecurrentRound {
    pub round: usize,
    pub cells: CellSet,
    /// Cells in the domain before selection.
    pub candidates: usize,
    pub edges: usize,
}

impl RecurrentRound {
    pub fn area(&self) -> f64 {
        self.cells.area()
    }
}

/// Outer bound of the recurrent set of `p` inside `universe`.
pub fn recurrent_outer_bound(
    p: &Params,
    universe: &IRect,
    nx: usize,
    ny: usize,
    rounds: usize,
) -> Result<Vec<RecurrentRound>> {
    recurrent_outer_bound_with(p, universe, nx, ny, rounds)
}

/// Round 1 works on the `nx × ny` grid over `universe`; each later round
/// subdivides the previous survivors 2×2. Images leaving the current
/// domain are dropped into the sink.
pub fn recurrent_outer_bound_with<M: RectMap + ?Sized>(
    f: &M,
    universe: &IRect,
    nx: usize,
    ny: usize,
    rounds: usize,
) -> Result<Vec<RecurrentRound>> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let lattice = Lattice::over(universe, nx, ny)?;
    let mut domain = CellSet::from_range(lattice, Lattice::grid(nx, ny));
    let mut out: Vec<RecurrentRound> = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        if round > 1 {
            domain = out.last().expect("previous round").cells.subdivided();
        }
        let g = TransitionGraph::build(f, &domain);
        let keep = recurrent_cells(&g);
        let cells = CellSet::from_cells(
            domain.lattice,
            g.cells
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&c, _)| c),
        );
        if cells.is_empty() {
            return Err(Error::EmptyResult);
        }
        out.push(RecurrentRound {
            round,
            cells,
            candidates: g.len(),
            edges: g.edge_count(),
        });
    }
    Ok(out)
}
