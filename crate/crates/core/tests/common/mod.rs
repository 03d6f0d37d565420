//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, BinaryHeap};

use petgraph::unionfind::UnionFind;
use rand::Rng;
use shepherd_core::planner::PlannerGrid;
use shepherd_core::swarm::{SwarmParams, SwarmState};
use shepherd_core::Vec2;

/// Brute-force synchronous step: evaluates every sheep's velocity from the
/// frozen positions first, then moves everyone. Mirrors the force formulas
/// term by term.
pub fn frozen_state_step(state: &SwarmState, params: &SwarmParams, saturate: bool) -> Vec<Vec2> {
    let n = state.positions.len();
    let mut vel = Vec::with_capacity(n);
    for i in 0..n {
        let xi = state.positions[i];
        let mut rep = Vec2::zeros();
        let mut att = Vec2::zeros();
        let mut count = 0usize;
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = state.positions[j] - xi;
            let dist = d.norm();
            if dist < params.r {
                rep -= d / (dist * dist * dist);
                att += d / dist;
                count += 1;
            }
        }
        if count == 0 {
            vel.push(Vec2::zeros());
            continue;
        }
        let dy = state.shepherd - xi;
        let dn = dy.norm();
        let shep = -dy / (dn * dn * dn);
        let c = count as f64;
        let raw = (rep / c) * params.k_s1 + (att / c) * params.k_s2 + shep * params.k_s3;
        let m = raw.norm();
        vel.push(if saturate && m > params.v_bar {
            raw * (params.v_bar / m)
        } else {
            raw
        });
    }
    (0..n).map(|i| state.positions[i] + vel[i]).collect()
}

/// Printed feasibility inequalities with thresholds computed from scratch.
pub fn printed_inequality(c: f64, params: &SwarmParams) -> bool {
    let (k1, k2, k3, r) = (params.k_s1, params.k_s2, params.k_s3, params.r);
    let outer = 2.0 * (k1 - r * r * k2 + r * r * k2.max(r)) / k3;
    let inner = 2.0 * (k2 * r * r - k1) / k3;
    if c < 0.0 {
        1.0 / (c * c) - 1.0 / ((1.0 - c) * (1.0 - c)) > outer
    } else if c > 0.0 && c < 1.0 {
        1.0 / (c * c) + 1.0 / ((c - 1.0) * (c - 1.0)) > inner
    } else if c > 1.0 {
        1.0 / ((c - 1.0) * (c - 1.0)) - 1.0 / (c * c) > outer
    } else {
        false
    }
}

/// Dijkstra over the same 8-connected, no-corner-cutting move model.
pub fn dijkstra_cost(grid: &PlannerGrid, start: usize, goal: usize) -> Option<f64> {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    let (w, h) = (grid.width as i64, grid.height as i64);
    let free = |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && !grid.is_blocked((y * w + x) as usize);
    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[start] = 0.0;
    heap.push(Entry(0.0, start));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == goal {
            return Some(d);
        }
        let (ux, uy) = ((u % grid.width) as i64, (u / grid.width) as i64);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (ux + dx, uy + dy);
                if !free(nx, ny) {
                    continue;
                }
                let cost = if dx != 0 && dy != 0 {
                    if !free(ux + dx, uy) || !free(ux, uy + dy) {
                        continue;
                    }
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                };
                let v = (ny * w + nx) as usize;
                if d + cost < dist[v] {
                    dist[v] = d + cost;
                    heap.push(Entry(d + cost, v));
                }
            }
        }
    }
    None
}

/// Components of the "closer than r" graph over `points`, via union-find.
pub fn union_find_components(points: &[Vec2], r: f64) -> BTreeSet<BTreeSet<usize>> {
    let mut uf = UnionFind::<usize>::new(points.len());
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() < r {
                uf.union(i, j);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut comps: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
    for (i, l) in labels.into_iter().enumerate() {
        comps.entry(l).or_default().insert(i);
    }
    comps.into_values().collect()
}

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec2 {
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    Vec2::new(a.cos(), a.sin())
}

/// Uniform draw from a union of open intervals, weighted by length.
pub fn sample_from_intervals<R: Rng>(rng: &mut R, intervals: &[(f64, f64)]) -> f64 {
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let mut u = rng.gen_range(0.0..total);
    for &(a, b) in intervals {
        if u < b - a {
            let c = a + u;
            if c > a && c < b {
                return c;
            }
            return 0.5 * (a + b);
        }
        u -= b - a;
    }
    let (a, b) = intervals[intervals.len() - 1];
    0.5 * (a + b)
}
