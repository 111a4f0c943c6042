use crate::error::{domain, Result};
use crate::geometry::{greedy_separated, CandidateSet};

/// A geodesic cell: a center candidate and the candidates assigned to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub center: usize,
    pub radius: f64,
    /// 0-based level.
    pub level: usize,
    pub members: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Hierarchical partition with radii ε_1 / 2^{ℓ-1}.
///
/// Children are built inside each parent starting from the parent's center, so sibling
/// centers are 2ε_ℓ-separated and members lie within 2ε_ℓ of their center. Members go
/// to the nearest child center (lowest index on ties).
#[derive(Clone, Debug)]
pub struct CellTree {
    pub eps1: f64,
    pub cells: Vec<Cell>,
    /// Cell ids per level.
    pub levels: Vec<Vec<usize>>,
}

impl CellTree {
    /// Builds up to `max_levels` levels, stopping early once every cell is a singleton.
    pub fn build(cs: &CandidateSet, eps1: f64, max_levels: usize) -> Result<Self> {
        let max = cs.manifold.inj_radius / 2.0;
        if !(eps1 > 0.0 && eps1 <= max * (1.0 + 1e-12)) {
            return domain(format!("base radius {eps1} outside (0, r_inj/2 = {max}]"));
        }
        if max_levels == 0 {
            return domain("need at least one level");
        }
        let mut tree = Self { eps1, cells: Vec::new(), levels: Vec::new() };
        let all: Vec<usize> = (0..cs.len()).collect();
        let top = tree.split(cs, &all, eps1, 0, None);
        tree.levels.push(top);
        while tree.levels.len() < max_levels {
            let prev = tree.levels.last().expect("non-empty");
            if prev.iter().all(|&c| tree.cells[c].members.len() == 1) {
                break;
            }
            let level = tree.levels.len();
            let eps = eps1 / 2f64.powi(level as i32);
            let mut next = Vec::new();
            for &p in &prev.clone() {
                let cell = &tree.cells[p];
                let mut order = vec![cell.center];
                order.extend(cell.members.iter().copied().filter(|&m| m != cell.center));
                let kids = tree.split(cs, &order, eps, level, Some(p));
                tree.cells[p].children = kids.clone();
                next.extend(kids);
            }
            tree.levels.push(next);
        }
        Ok(tree)
    }

    fn split(&mut self, cs: &CandidateSet, members: &[usize], eps: f64, level: usize, parent: Option<usize>) -> Vec<usize> {
        let centers = greedy_separated(cs, eps, Some(members));
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        for &m in &sorted {
            let mut best = 0;
            let mut bd = f64::INFINITY;
            for (k, &c) in centers.iter().enumerate() {
                let d = cs.dist(m, c);
                if d < bd || (d == bd && c < centers[best]) {
                    bd = d;
                    best = k;
                }
            }
            groups[best].push(m);
        }
        let base = self.cells.len();
        for (c, g) in centers.into_iter().zip(groups) {
            self.cells.push(Cell { center: c, radius: eps, level, members: g, parent, children: Vec::new() });
        }
        (base..self.cells.len()).collect()
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn radius(&self, level: usize) -> f64 {
        self.eps1 / 2f64.powi(level as i32)
    }

    /// Id of the level-`level` cell containing candidate `arm`.
    pub fn cell_of(&self, level: usize, arm: usize) -> usize {
        *self.levels[level]
            .iter()
            .find(|&&c| self.cells[c].members.contains(&arm))
            .expect("every candidate belongs to one cell per level")
    }
}

/// Members ordered by farthest-point traversal from the center, so that any prefix is
/// spread over the cell.
pub fn spread_order(cs: &CandidateSet, cell: &Cell) -> Vec<usize> {
    let mut order = vec![cell.center];
    let mut rest: Vec<usize> = cell.members.iter().copied().filter(|&m| m != cell.center).collect();
    let mut mind: Vec<f64> = rest.iter().map(|&m| cs.dist(m, cell.center)).collect();
    while !rest.is_empty() {
        let mut k = 0;
        for i in 1..rest.len() {
            if mind[i] > mind[k] {
                k = i;
            }
        }
        let pick = rest.swap_remove(k);
        mind.swap_remove(k);
        for (i, &m) in rest.iter().enumerate() {
            mind[i] = mind[i].min(cs.dist(m, pick));
        }
        order.push(pick);
    }
    order
}
