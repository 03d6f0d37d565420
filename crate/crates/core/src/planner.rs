//! Grid A* for routing the shepherd around bystander sheep.
//!
//! Cells are squares of edge `cell`; their centres are `origin + cell·(ix, iy)`.
//! A cell is blocked when its centre lies within `r_avoid` of a sheep that is
//! not exempt. Moves are 8-connected (cost 1 axial, √2 diagonal, in cell
//! units) without corner cutting, and the heuristic is the octile distance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::swarm::SwarmState;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub cell: f64,
    pub r_avoid: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            cell: 0.1,
            r_avoid: 0.4,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell > 0.0 && self.cell.is_finite()) {
            return Err(Error::InvalidParams("planner cell must be positive".into()));
        }
        if !(self.r_avoid >= 0.0 && self.r_avoid.is_finite()) {
            return Err(Error::InvalidParams("planner r_avoid must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerGrid {
    /// Centre of cell `(0, 0)`.
    pub origin: Vec2,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    blocked: Vec<bool>,
}

const NEIGHBORS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

impl PlannerGrid {
    pub fn new(origin: Vec2, cell: f64, width: usize, height: usize) -> Self {
        Self {
            origin,
            cell,
            width,
            height,
            blocked: vec![false; width * height],
        }
    }

    /// Smallest grid aligned to multiples of `cell` covering `points` plus `margin`.
    pub fn covering(points: impl IntoIterator<Item = Vec2>, cell: f64, margin: f64) -> Self {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        if !lo.x.is_finite() {
            lo = Vec2::zeros();
            hi = Vec2::zeros();
        }
        let ix0 = ((lo.x - margin) / cell).floor();
        let iy0 = ((lo.y - margin) / cell).floor();
        let ix1 = ((hi.x + margin) / cell).ceil();
        let iy1 = ((hi.y + margin) / cell).ceil();
        let width = (ix1 - ix0) as usize + 1;
        let height = (iy1 - iy0) as usize + 1;
        Self::new(Vec2::new(ix0 * cell, iy0 * cell), cell, width, height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn center(&self, idx: usize) -> Vec2 {
        let (ix, iy) = self.coords(idx);
        self.origin + Vec2::new(ix as f64, iy as f64) * self.cell
    }

    pub fn is_blocked(&self, idx: usize) -> bool {
        self.blocked[idx]
    }

    pub fn set_blocked(&mut self, idx: usize, blocked: bool) {
        self.blocked[idx] = blocked;
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }

    /// Cell whose centre is nearest to `p`, if `p` falls inside the grid.
    pub fn cell_of(&self, p: Vec2) -> Option<usize> {
        let rel = (p - self.origin) / self.cell;
        let ix = rel.x.round();
        let iy = rel.y.round();
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            return None;
        }
        Some(self.index(ix as usize, iy as usize))
    }

    /// Free cell with centre nearest to `p`; ties go to the lower index.
    pub fn nearest_free(&self, p: Vec2) -> Option<usize> {
        if let Some(idx) = self.cell_of(p) {
            if !self.blocked[idx] {
                return Some(idx);
            }
        }
        (0..self.len())
            .filter(|&i| !self.blocked[i])
            .map(|i| (i, (self.center(i) - p).norm_squared()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
    }

    /// Blocks every cell whose centre is within `radius` of `p`.
    pub fn block_disc(&mut self, p: Vec2, radius: f64) {
        let rel = (p - self.origin) / self.cell;
        let span = radius / self.cell;
        let x0 = (rel.x - span).floor().max(0.0) as usize;
        let y0 = (rel.y - span).floor().max(0.0) as usize;
        let x1 = (rel.x + span).ceil().min(self.width as f64 - 1.0);
        let y1 = (rel.y + span).ceil().min(self.height as f64 - 1.0);
        if x1 < 0.0 || y1 < 0.0 {
            return;
        }
        for iy in y0..=y1 as usize {
            for ix in x0..=x1 as usize {
                let idx = self.index(ix, iy);
                if (self.center(idx) - p).norm() <= radius {
                    self.blocked[idx] = true;
                }
            }
        }
    }

    /// Free 8-neighbours of `idx` with their move costs; diagonal moves
    /// require both adjacent axial cells to be free.
    pub fn successors(&self, idx: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (ix, iy) = self.coords(idx);
        let (ix, iy) = (ix as i64, iy as i64);
        let (w, h) = (self.width as i64, self.height as i64);
        let free = move |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && !self.blocked[(y * w + x) as usize];
        NEIGHBORS.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (ix + dx, iy + dy);
            if !free(nx, ny) {
                return None;
            }
            if dx != 0 && dy != 0 {
                if !free(ix + dx, iy) || !free(ix, iy + dy) {
                    return None;
                }
                Some(((ny * w + nx) as usize, std::f64::consts::SQRT_2))
            } else {
                Some(((ny * w + nx) as usize, 1.0))
            }
        })
    }

    pub fn octile(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let dx = ax.abs_diff(bx) as f64;
        let dy = ay.abs_diff(by) as f64;
        dx.max(dy) + (std::f64::consts::SQRT_2 - 1.0) * dx.min(dy)
    }
}

/// Grid covering all sheep, the shepherd and `extra` points with `margin`,
/// with non-exempt sheep blocking discs of radius `r_avoid`.
pub fn build_grid(
    state: &SwarmState,
    extra: &[Vec2],
    config: &PlannerConfig,
    margin: f64,
    exempt: &[usize],
) -> PlannerGrid {
    let points = state
        .positions
        .iter()
        .copied()
        .chain(std::iter::once(state.shepherd))
        .chain(extra.iter().copied());
    let mut grid = PlannerGrid::covering(points, config.cell, margin);
    for (i, &x) in state.positions.iter().enumerate() {
        if !exempt.contains(&i) {
            grid.block_disc(x, config.r_avoid);
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedPath {
    /// Cell centres from start to goal.
    pub waypoints: Vec<Vec2>,
    pub cells: Vec<usize>,
    /// Path cost in cell units.
    pub cost: f64,
    /// The requested goal was blocked or off-grid and replaced by the nearest free cell.
    pub goal_substituted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OpenEntry {
    f: f64,
    h: f64,
    idx: usize,
}

impl Eq for OpenEntry {}

impl Ord for OpenEntry {
    // Reversed so that `BinaryHeap` pops the smallest (f, h, idx).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(other.h.total_cmp(&self.h))
            .then(other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimal-cost path between the free cells nearest `start` and `goal`.
pub fn plan(grid: &PlannerGrid, start: Vec2, goal: Vec2) -> Result<PlannedPath> {
    let s = grid.nearest_free(start).ok_or(Error::Unreachable)?;
    let goal_cell = grid.cell_of(goal);
    let g = grid.nearest_free(goal).ok_or(Error::Unreachable)?;
    let goal_substituted = goal_cell != Some(g);
    let (cells, cost) = astar_cells(grid, s, g).ok_or(Error::Unreachable)?;
    Ok(PlannedPath {
        waypoints: cells.iter().map(|&c| grid.center(c)).collect(),
        cells,
        cost,
        goal_substituted,
    })
}

/// A* between two cells; returns the cell sequence and its cost.
pub fn astar_cells(grid: &PlannerGrid, start: usize, goal: usize) -> Option<(Vec<usize>, f64)> {
    let n = grid.len();
    let mut g_cost = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();

    g_cost[start] = 0.0;
    let h0 = grid.octile(start, goal);
    open.push(OpenEntry {
        f: h0,
        h: h0,
        idx: start,
    });

    while let Some(OpenEntry { idx, .. }) = open.pop() {
        if closed[idx] {
            continue;
        }
        if idx == goal {
            let mut cells = vec![goal];
            let mut cur = goal;
            while cur != start {
                cur = parent[cur];
                cells.push(cur);
            }
            cells.reverse();
            return Some((cells, g_cost[goal]));
        }
        closed[idx] = true;
        for (next, step) in grid.successors(idx) {
            if closed[next] {
                continue;
            }
            let tentative = g_cost[idx] + step;
            if tentative < g_cost[next] {
                g_cost[next] = tentative;
                parent[next] = idx;
                let h = grid.octile(next, goal);
                open.push(OpenEntry {
                    f: tentative + h,
                    h,
                    idx: next,
                });
            }
        }
    }
    None
}

/// Point reached by travelling `v_bar` along the polyline from the
/// projection of `y` onto it, or the endpoint when less remains. The result
/// is never farther than `v_bar` from `y`.
pub fn advance_along(path: &[Vec2], y: Vec2, v_bar: f64) -> Vec2 {
    let target = match path {
        [] => return y,
        [only] => *only,
        _ => {
            // Projection of y: closest point over all segments, first wins on ties.
            let mut best = (f64::INFINITY, 0usize, 0.0f64);
            for (k, seg) in path.windows(2).enumerate() {
                let d = seg[1] - seg[0];
                let len2 = d.norm_squared();
                let t = if len2 > 0.0 {
                    ((y - seg[0]).dot(&d) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let dist = (seg[0] + d * t - y).norm();
                if dist < best.0 {
                    best = (dist, k, t);
                }
            }
            let (_, mut seg, t) = best;
            let mut here = path[seg] + (path[seg + 1] - path[seg]) * t;
            let mut remaining = v_bar;
            loop {
                let end = path[seg + 1];
                let left = (end - here).norm();
                if left >= remaining {
                    if left > 0.0 {
                        here += (end - here) * (remaining / left);
                    }
                    break here;
                }
                remaining -= left;
                here = end;
                seg += 1;
                if seg + 1 >= path.len() {
                    break here;
                }
            }
        }
    };
    let step = target - y;
    let len = step.norm();
    if len > v_bar {
        y + step * (v_bar / len)
    } else {
        target
    }
}
