//! Pinning-sheep controller and the singling main loop.
//!
//! Each round picks a random sensing neighbour `p` of the target `t` (the
//! pinning sheep) and steers the shepherd until `p` and `t` are farther than
//! the sensing radius apart. The shepherd's goal each tick comes from an
//! [`IdealPositionRule`]: the proposed controller asks for the shepherd
//! location that would give `p` its ideal velocity and snaps it onto the
//! feasible two-sheep line; the bipartite baseline simply uses the midpoint
//! of `p` and `t`. Everything else in the loop is shared.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::metrics::{interaction_graph, is_separated};
use crate::planner::{advance_along, build_grid, plan, PlannerConfig};
use crate::separation::{feasible_sets, project_to_feasible_line, separation_gain, FeasibleSets, DEFAULT_DOMAIN_BOUND};
use crate::swarm::{force_components, neighbor_set, step, SwarmParams, SwarmState};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Bipartite,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Bipartite => "bipartite",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Method::Proposed),
            "bipartite" => Ok(Method::Bipartite),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Sign of a neighbour's contribution: +1 for the target, -1 otherwise.
fn label(j: usize, t: usize) -> f64 {
    if j == t {
        1.0
    } else {
        -1.0
    }
}

/// Sheep within the closed ball of radius `r + epsilon` around `p`, ascending.
pub fn extended_neighbor_set(state: &SwarmState, p: usize, params: &SwarmParams) -> Result<Vec<usize>> {
    state.check_index(p)?;
    let reach = params.r + params.epsilon;
    Ok((0..state.len())
        .filter(|&j| j != p && state.distance(p, j) <= reach)
        .collect())
}

/// Sum of signed slack `l_j (|x_p - x_j| - R)` over the extended neighbours.
pub fn connectivity_scalar(state: &SwarmState, p: usize, t: usize, params: &SwarmParams) -> Result<f64> {
    Ok(extended_neighbor_set(state, p, params)?
        .into_iter()
        .map(|j| label(j, t) * (state.distance(p, j) - params.r))
        .sum())
}

/// Sum of signed velocity mismatch `l_j |v_j - v_p|` over the extended neighbours.
pub fn alignment_scalar(state: &SwarmState, p: usize, t: usize, params: &SwarmParams) -> Result<f64> {
    Ok(extended_neighbor_set(state, p, params)?
        .into_iter()
        .map(|j| label(j, t) * (state.velocities[j] - state.velocities[p]).norm())
        .sum())
}

pub fn ideal_velocity(state: &SwarmState, p: usize, t: usize, params: &SwarmParams) -> Result<Vec2> {
    let ext = extended_neighbor_set(state, p, params)?;
    if ext.is_empty() {
        return Err(Error::EmptyExtendedNeighborhood(p));
    }
    let scalar = connectivity_scalar(state, p, t, params)? + alignment_scalar(state, p, t, params)?;
    let xp = state.positions[p];
    let dist_sum: f64 = ext.iter().map(|&j| state.distance(p, j)).sum();
    let offset_sum: Vec2 = ext.iter().map(|&j| xp - state.positions[j]).sum();
    Ok(-offset_sum * (scalar / dist_sum))
}

/// Controller quantities for one pinning decision.
#[derive(Debug, Clone, PartialEq)]
pub struct PinningContext {
    pub p: usize,
    pub t: usize,
    pub n_pg: Vec<usize>,
    pub d_p: f64,
    pub v_p_align: f64,
    pub v_p_star: Vec2,
    /// Velocity the shepherd's repulsion must contribute to `p`.
    pub required: Vec2,
    /// Ideal shepherd position before feasibility snapping (`None` if `required` is zero).
    pub y_raw: Option<Vec2>,
    pub y_star: Vec2,
    pub fallback: bool,
}

/// Shepherd location whose repulsion on a sheep at `x_p` equals `required`:
/// `K_s3 (x_p - y)/|x_p - y|^3 = required`.
pub fn shepherd_position_for(x_p: Vec2, required: Vec2, k_s3: f64) -> Option<Vec2> {
    let n = required.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(x_p - required / n * (k_s3 / n).sqrt())
}

pub fn pinning_context(
    state: &SwarmState,
    p: usize,
    t: usize,
    params: &SwarmParams,
    sets: &FeasibleSets,
) -> Result<PinningContext> {
    state.check_index(t)?;
    if p == t {
        return Err(Error::InvalidParams("pinning sheep must differ from the target".into()));
    }
    if params.k_s3 <= 0.0 {
        return Err(Error::ZeroShepherdGain);
    }
    if neighbor_set(state, p, params.r)?.is_empty() {
        return Err(Error::NoSensingNeighbors(p));
    }
    let n_pg = extended_neighbor_set(state, p, params)?;
    let d_p = connectivity_scalar(state, p, t, params)?;
    let v_p_align = alignment_scalar(state, p, t, params)?;
    let v_p_star = ideal_velocity(state, p, t, params)?;
    let forces = force_components(state, p, params)?;
    let required = v_p_star - forces.v1 * params.k_s1 - forces.v2 * params.k_s2;

    let xp = state.positions[p];
    let xt = state.positions[t];
    let y_raw = shepherd_position_for(xp, required, params.k_s3);
    let (y_star, fallback) = match y_raw {
        Some(y) => (project_to_feasible_line(y, xp, xt, sets)?, false),
        None => (strongest_feasible_point(xp, xt, params, sets)?, true),
    };
    Ok(PinningContext {
        p,
        t,
        n_pg,
        d_p,
        v_p_align,
        v_p_star,
        required,
        y_raw,
        y_star,
        fallback,
    })
}

/// Feasible-line point with the largest one-step separation gain among the
/// retracted interval endpoints.
fn strongest_feasible_point(xp: Vec2, xt: Vec2, params: &SwarmParams, sets: &FeasibleSets) -> Result<Vec2> {
    let delta = xt - xp;
    let mut best: Option<(f64, f64)> = None;
    for c in sets.interior_endpoints() {
        let Ok(gain) = separation_gain(delta, c, params) else {
            continue;
        };
        let gain = gain.abs();
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((c, gain));
        }
    }
    best.map(|(c, _)| xp + delta * c).ok_or(Error::EmptyFeasibleSet)
}

/// Ideal shepherd position of the proposed controller.
pub fn ideal_shepherd_position(
    state: &SwarmState,
    p: usize,
    t: usize,
    params: &SwarmParams,
    sets: &FeasibleSets,
) -> Result<Vec2> {
    Ok(pinning_context(state, p, t, params, sets)?.y_star)
}

/// Baseline goal: midpoint of the pinning and target sheep.
pub fn bipartite_ideal_position(state: &SwarmState, p: usize, t: usize) -> Vec2 {
    (state.positions[p] + state.positions[t]) * 0.5
}

/// Uniform draw from the target's current sensing neighbours.
pub fn select_pinning<R: Rng + ?Sized>(state: &SwarmState, t: usize, r: f64, rng: &mut R) -> Result<usize> {
    let candidates = neighbor_set(state, t, r)?;
    pick(&candidates, rng).ok_or(Error::AlreadySeparated(t))
}

fn pick<R: Rng + ?Sized>(candidates: &[usize], rng: &mut R) -> Option<usize> {
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.gen_range(0..candidates.len())])
    }
}

/// Goal proposed for the shepherd on one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealPosition {
    pub position: Vec2,
    pub fallback: bool,
}

/// Computes the shepherd's goal for a pinning/target pair; the only part
/// that differs between methods.
pub trait IdealPositionRule {
    fn ideal_position(
        &self,
        state: &SwarmState,
        p: usize,
        t: usize,
        params: &SwarmParams,
        sets: &FeasibleSets,
    ) -> Result<IdealPosition>;
}

impl IdealPositionRule for Method {
    fn ideal_position(
        &self,
        state: &SwarmState,
        p: usize,
        t: usize,
        params: &SwarmParams,
        sets: &FeasibleSets,
    ) -> Result<IdealPosition> {
        match self {
            Method::Bipartite => Ok(IdealPosition {
                position: bipartite_ideal_position(state, p, t),
                fallback: false,
            }),
            Method::Proposed => match pinning_context(state, p, t, params, sets) {
                Ok(ctx) => Ok(IdealPosition {
                    position: ctx.y_star,
                    fallback: ctx.fallback,
                }),
                // The shepherd cannot act on a neighbourless p; wait next to it
                // on the feasible line until it regains neighbours.
                Err(Error::NoSensingNeighbors(_)) => {
                    let xp = state.positions[p];
                    Ok(IdealPosition {
                        position: project_to_feasible_line(xp, xp, state.positions[t], sets)?,
                        fallback: true,
                    })
                }
                Err(e) => Err(e),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    pub planner: PlannerConfig,
    pub step_budget: u64,
    /// Allow a sheep that already served as pinning sheep to be drawn again.
    pub reselect_used_pinning: bool,
    /// Keep full per-step snapshots in the result (needed for CSV logs).
    pub record_trace: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            planner: PlannerConfig::default(),
            step_budget: 5000,
            reselect_used_pinning: true,
            record_trace: true,
        }
    }
}

/// Snapshot after one simulation step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: u64,
    pub shepherd: Vec2,
    pub positions: Vec<Vec2>,
    pub target_neighbors: usize,
    pub max_component: usize,
    pub pinning: Option<usize>,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub success: bool,
    /// Step of separation, or the number of steps taken when the budget ran out.
    pub steps: u64,
    /// Largest-component fraction of the remaining swarm after each step.
    pub connectivity_series: Vec<f64>,
    pub seed: u64,
    pub method: Method,
    pub fallback_events: u64,
    /// Longest shepherd move over the run.
    pub max_shepherd_step: f64,
    pub trace: Vec<StepRecord>,
    pub final_state: SwarmState,
}

impl TrialResult {
    /// Time average of the connectivity series (1 for an empty series).
    pub fn mean_connectivity(&self) -> f64 {
        if self.connectivity_series.is_empty() {
            1.0
        } else {
            self.connectivity_series.iter().sum::<f64>() / self.connectivity_series.len() as f64
        }
    }

    pub fn final_connectivity(&self) -> f64 {
        self.connectivity_series.last().copied().unwrap_or(1.0)
    }
}

/// Runs the singling loop with one of the built-in methods.
pub fn run_singling<R: Rng + ?Sized>(
    initial: &SwarmState,
    t: usize,
    params: &SwarmParams,
    method: Method,
    rng: &mut R,
    seed: u64,
    config: &ControllerConfig,
) -> Result<TrialResult> {
    run_singling_with(initial, t, params, &method, method, rng, seed, config)
}

struct Recorder<'a> {
    t: usize,
    r: f64,
    config: &'a ControllerConfig,
    series: Vec<f64>,
    trace: Vec<StepRecord>,
    fallback_events: u64,
    max_shepherd_step: f64,
}

impl Recorder<'_> {
    fn record(&mut self, prev_shepherd: Vec2, state: &SwarmState, pinning: usize, fallback: bool) -> Result<()> {
        let graph = interaction_graph(state, self.t, self.r)?;
        let max_component = graph.max_component_size();
        self.series.push(max_component as f64 / graph.nodes.len() as f64);
        self.max_shepherd_step = self.max_shepherd_step.max((state.shepherd - prev_shepherd).norm());
        if fallback {
            self.fallback_events += 1;
        }
        if self.config.record_trace {
            self.trace.push(StepRecord {
                k: state.k,
                shepherd: state.shepherd,
                positions: state.positions.clone(),
                target_neighbors: neighbor_set(state, self.t, self.r)?.len(),
                max_component,
                pinning: Some(pinning),
                fallback,
            });
        }
        Ok(())
    }
}

/// Singling loop over an arbitrary goal rule. `method` only labels the result.
#[allow(clippy::too_many_arguments)]
pub fn run_singling_with<R: Rng + ?Sized>(
    initial: &SwarmState,
    t: usize,
    params: &SwarmParams,
    rule: &dyn IdealPositionRule,
    method: Method,
    rng: &mut R,
    seed: u64,
    config: &ControllerConfig,
) -> Result<TrialResult> {
    initial.check_index(t)?;
    params.validate()?;
    config.planner.validate()?;
    if config.step_budget == 0 {
        return Err(Error::InvalidBudget);
    }
    let sets = feasible_sets(params, DEFAULT_DOMAIN_BOUND)?;

    let mut state = initial.clone();
    let mut rec = Recorder {
        t,
        r: params.r,
        config,
        series: Vec::new(),
        trace: Vec::new(),
        fallback_events: 0,
        max_shepherd_step: 0.0,
    };
    let mut used = Vec::new();
    let start_k = state.k;

    let success = loop {
        if is_separated(&state, t, params.r)? {
            break true;
        }
        if state.k - start_k >= config.step_budget {
            break false;
        }

        let neighbors = neighbor_set(&state, t, params.r)?;
        let fresh: Vec<usize> = neighbors.iter().copied().filter(|j| !used.contains(j)).collect();
        let pool = if config.reselect_used_pinning || fresh.is_empty() {
            &neighbors
        } else {
            &fresh
        };
        let p = pick(pool, rng).ok_or(Error::AlreadySeparated(t))?;
        if !used.contains(&p) {
            used.push(p);
        }

        while state.distance(t, p) <= params.r {
            if state.k - start_k >= config.step_budget {
                break;
            }
            let goal = rule.ideal_position(&state, p, t, params, &sets)?;
            let y = state.shepherd;
            let (next, planned_fallback) = if (y - goal.position).norm() <= params.v_bar {
                (goal.position, false)
            } else {
                shepherd_move(&state, p, t, goal.position, params, &config.planner)
            };
            let advanced = step(&state, params, next)?;
            rec.record(y, &advanced, p, goal.fallback || planned_fallback)?;
            state = advanced;
        }
    };

    Ok(TrialResult {
        success,
        steps: state.k - start_k,
        connectivity_series: rec.series,
        seed,
        method,
        fallback_events: rec.fallback_events,
        max_shepherd_step: rec.max_shepherd_step,
        trace: rec.trace,
        final_state: state,
    })
}

/// One planned shepherd move of length at most `v_bar` toward `goal`.
/// Returns the new position and whether the straight-line fallback was used.
pub fn shepherd_move(
    state: &SwarmState,
    p: usize,
    t: usize,
    goal: Vec2,
    params: &SwarmParams,
    planner: &PlannerConfig,
) -> (Vec2, bool) {
    let y = state.shepherd;
    let grid = build_grid(state, &[goal], planner, 2.0 * params.r, &[p, t]);
    match plan(&grid, y, goal) {
        Ok(path) => {
            let mut polyline = Vec::with_capacity(path.waypoints.len() + 1);
            polyline.push(y);
            polyline.extend_from_slice(&path.waypoints[1..]);
            if !path.goal_substituted {
                polyline.push(goal);
            }
            (advance_along(&polyline, y, params.v_bar), false)
        }
        Err(_) => {
            let d = goal - y;
            (y + d * (params.v_bar / d.norm()).min(1.0), true)
        }
    }
}
