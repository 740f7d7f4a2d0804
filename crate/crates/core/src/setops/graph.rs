use std::collections::HashMap;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;

use super::{image_cells_with, Cell, CellSet, ImageCells, RectMap};

/// Directed graph on the cells of a domain; `edges[s]` holds indices of the
/// domain cells met by the image of cell `s`, `outside[s]` records that
/// part of that image falls outside the domain.
#[derive(Debug, Clone)]
pub struct TransitionGraph {
    pub cells: Vec<Cell>,
    pub edges: Vec<Vec<u32>>,
    pub outside: Vec<bool>,
    index: HashMap<Cell, u32>,
}

impl TransitionGraph {
    pub fn build<M: RectMap + ?Sized>(f: &M, domain: &CellSet) -> Self {
        let cells = domain.sorted();
        let index: HashMap<Cell, u32> = cells
            .iter()
            .enumerate()
            .map(|(n, &c)| (c, n as u32))
            .collect();
        let bbox = domain.index_bounds();
        let lattice = domain.lattice;
        let rows: Vec<(Vec<u32>, bool)> = cells
            .par_iter()
            .map(|&c| {
                let Some(bbox) = bbox else {
                    return (Vec::new(), true);
                };
                match image_cells_with(f, &lattice, c) {
                    ImageCells::Cells(r) => {
                        let Some(clip) = r.intersect(&bbox) else {
                            return (Vec::new(), true);
                        };
                        let mut out = clip != r;
                        let mut targets = Vec::new();
                        for t in clip.iter() {
                            match index.get(&t) {
                                Some(&n) => targets.push(n),
                                None => out = true,
                            }
                        }
                        (targets, out)
                    }
                    // Unknown image: connect to everything, which stays sound.
                    ImageCells::Outside => ((0..cells.len() as u32).collect(), true),
                }
            })
            .collect();
        let (edges, outside) = rows.into_iter().unzip();
        Self {
            cells,
            edges,
            outside,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        self.index.get(c).map(|&n| n as usize)
    }

    /// Target cells of `c` inside the domain.
    pub fn targets(&self, c: &Cell) -> Vec<Cell> {
        self.index_of(c)
            .map(|n| {
                self.edges[n]
                    .iter()
                    .map(|&t| self.cells[t as usize])
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}

/// Strongly connected components via petgraph's iterative Kosaraju.
/// Returns the component id of every vertex; ids are in reverse
/// topological order of the condensation.
pub fn scc_ids(edges: &[Vec<u32>]) -> Vec<u32> {
    let mut g: DiGraph<(), (), u32> =
        DiGraph::with_capacity(edges.len(), edges.iter().map(Vec::len).sum());
    for _ in 0..edges.len() {
        g.add_node(());
    }
    for (v, targets) in edges.iter().enumerate() {
        for &w in targets {
            g.add_edge(NodeIndex::new(v), NodeIndex::new(w as usize), ());
        }
    }
    let mut comp = vec![0u32; edges.len()];
    for (id, members) in kosaraju_scc(&g).into_iter().enumerate() {
        for v in members {
            comp[v.index()] = id as u32;
        }
    }
    comp
}

fn bfs(adj: &[Vec<u32>], start: &[bool]) -> Vec<bool> {
    let mut seen = start.to_vec();
    let mut queue: Vec<u32> = (0..adj.len() as u32)
        .filter(|&v| seen[v as usize])
        .collect();
    while let Some(v) = queue.pop() {
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push(w);
            }
        }
    }
    seen
}

/// Cells in a nontrivial SCC (more than one vertex, or a self-edge), plus
/// cells lying on a path from one such SCC to another.
pub fn recurrent_cells(g: &TransitionGraph) -> Vec<bool> {
    let n = g.len();
    let comp = scc_ids(&g.edges);
    let ncomp = comp.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut size = vec![0usize; ncomp];
    for &c in &comp {
        size[c as usize] += 1;
    }
    let kept: Vec<bool> = (0..n)
        .map(|v| size[comp[v] as usize] > 1 || g.edges[v].contains(&(v as u32)))
        .collect();
    let mut reverse = vec![Vec::new(); n];
    for (v, targets) in g.edges.iter().enumerate() {
        for &w in targets {
            reverse[w as usize].push(v as u32);
        }
    }
    let fwd = bfs(&g.edges, &kept);
    let bwd = bfs(&reverse, &kept);
    (0..n).map(|v| kept[v] || (fwd[v] && bwd[v])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use crate::map::{IRect, Interval, Point};
    use crate::setops::Lattice;

    fn graph(edges: Vec<Vec<u32>>) -> TransitionGraph {
        let n = edges.len();
        let cells: Vec<Cell> = (0..n as i64).map(|i| Cell::new(i, 0)).collect();
        let index = cells
            .iter()
            .enumerate()
            .map(|(n, &c)| (c, n as u32))
            .collect();
        TransitionGraph {
            cells,
            edges,
            outside: vec![false; n],
            index,
        }
    }

    #[test]
    fn scc_components() {
        // 0 -> 1 -> 2 -> 0, 2 -> 3, 3 -> 4, 4 -> 3, 5 isolated
        let comp = scc_ids(&[vec![1], vec![2], vec![0, 3], vec![4], vec![3], vec![]]);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[1], comp[2]);
        assert_eq!(comp[3], comp[4]);
        assert_ne!(comp[0], comp[3]);
        assert_ne!(comp[5], comp[0]);
        assert_ne!(comp[5], comp[3]);
        // reverse topological: the sink component {3,4} is numbered first
        assert!(comp[3] < comp[0]);
    }

    #[test]
    fn scc_long_chain() {
        let n = 200_000u32;
        let mut edges: Vec<Vec<u32>> = (0..n).map(|v| vec![(v + 1) % n]).collect();
        let comp = scc_ids(&edges);
        assert!(comp.iter().all(|&c| c == comp[0]));
        edges[(n - 1) as usize].clear();
        let comp = scc_ids(&edges);
        let distinct: std::collections::HashSet<u32> = comp.into_iter().collect();
        assert_eq!(distinct.len(), n as usize);
    }

    #[test]
    fn recurrent_selection_keeps_connecting_paths() {
        // {0,1} cycle -> 2 -> 3 self-loop; 4 -> 0 (transient in), 3 -> 5 (transient out)
        let g = graph(vec![
            vec![1],
            vec![0, 2],
            vec![3],
            vec![3, 5],
            vec![0],
            vec![],
        ]);
        let keep = recurrent_cells(&g);
        assert_eq!(keep, vec![true, true, true, true, false, false]);
    }

    #[test]
    fn identity_keeps_everything() {
        let id = |r: &IRect| -> Result<IRect> { Ok(*r) };
        let l = Lattice::new(Point::new(0.0, 0.0), 0.5, 0.5).unwrap();
        let dom = CellSet::from_range(l, Lattice::grid(6, 5));
        let g = TransitionGraph::build(&id, &dom);
        for (v, t) in g.edges.iter().enumerate() {
            assert!(t.contains(&(v as u32)));
        }
        assert!(recurrent_cells(&g).iter().all(|&k| k));
    }

    #[test]
    fn targets_outside_domain_are_flagged() {
        let shift = |r: &IRect| -> Result<IRect> {
            // exact on this lattice
            Ok(IRect {
                x: Interval {
                    lo: r.x.lo + 1.0,
                    hi: r.x.hi + 1.0,
                },
                y: r.y,
            })
        };
        let l = Lattice::new(Point::new(0.0, 0.0), 1.0, 1.0).unwrap();
        let dom = CellSet::from_range(l, Lattice::grid(3, 1));
        let g = TransitionGraph::build(&shift, &dom);
        assert!(g.outside[2]);
        assert_eq!(g.targets(&Cell::new(0, 0)), vec![Cell::new(1, 0)]);
        assert!(recurrent_cells(&g).iter().all(|&k| !k));
    }
}
