//! Sheep dynamics: neighbour sensing, Boid repulsion/attraction, shepherd
//! repulsion, speed saturation and the synchronous first-order update.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec2};

/// Distances below this are treated as coincident agents.
pub const SINGULAR_DISTANCE: f64 = 1e-9;

/// Gains, radii and speed cap shared by every sheep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmParams {
    /// Inter-sheep repulsion gain.
    pub k_s1: f64,
    /// Inter-sheep attraction gain.
    pub k_s2: f64,
    /// Shepherd repulsion gain.
    pub k_s3: f64,
    /// Sensing radius (open disc).
    pub r: f64,
    /// Per-step speed cap for sheep and shepherd.
    pub v_bar: f64,
    /// Margin of the controller's extended neighbourhood, `0 < epsilon < r`.
    pub epsilon: f64,
    /// When set, sheep without neighbours still feel the shepherd.
    /// Off by default: an empty neighbourhood zeroes all three forces.
    pub isolated_sheep_feel_shepherd: bool,
}

impl Default for SwarmParams {
    fn default() -> Self {
        Self {
            k_s1: 1.0,
            k_s2: 4.0,
            k_s3: 0.5,
            r: 1.0,
            v_bar: 0.5,
            epsilon: 0.3,
            isolated_sheep_feel_shepherd: false,
        }
    }
}

impl SwarmParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.k_s1, self.k_s2, self.k_s3, self.r, self.v_bar, self.epsilon]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.k_s1 < 0.0 || self.k_s2 < 0.0 || self.k_s3 < 0.0 {
            return Err(Error::InvalidParams("gains must be nonnegative".into()));
        }
        if self.r <= 0.0 {
            return Err(Error::InvalidParams("sensing radius must be positive".into()));
        }
        if self.v_bar <= 0.0 {
            return Err(Error::InvalidParams("speed cap must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.r) {
            return Err(Error::InvalidParams(format!(
                "epsilon must lie in (0, r), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Whether the step applies the speed cap. Disabling it is only meaningful
/// for checking the unsaturated two-sheep analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Saturation {
    Enabled,
    Disabled,
}

/// Positions and last applied movement of all sheep plus the shepherd at step `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub k: u64,
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
    pub shepherd: Vec2,
}

impl SwarmState {
    /// Sheep at rest at `positions`, shepherd at `shepherd`, time zero.
    pub fn new(positions: Vec<Vec2>, shepherd: Vec2) -> Self {
        let velocities = vec![Vec2::zeros(); positions.len()];
        Self {
            k: 0,
            positions,
            velocities,
            shepherd,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.positions[i] - self.positions[j]).norm()
    }
}

/// The three unweighted movement vectors acting on one sheep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceTriple {
    /// Inter-sheep repulsion.
    pub v1: Vec2,
    /// Inter-sheep attraction.
    pub v2: Vec2,
    /// Shepherd repulsion.
    pub v3: Vec2,
}

impl ForceTriple {
    pub fn zero() -> Self {
        Self {
            v1: Vec2::zeros(),
            v2: Vec2::zeros(),
            v3: Vec2::zeros(),
        }
    }

    /// Gain-weighted sum before saturation.
    pub fn combine(&self, params: &SwarmParams) -> Vec2 {
        self.v1 * params.k_s1 + self.v2 * params.k_s2 + self.v3 * params.k_s3
    }
}

/// Caps the norm of `v` at `v_bar`, keeping its direction. Zero maps to zero.
pub fn saturate(v: Vec2, v_bar: f64) -> Vec2 {
    let n = v.norm();
    if n <= v_bar {
        v
    } else {
        v * (v_bar / n)
    }
}

/// Indices `j != i` strictly inside the sensing disc of sheep `i`, ascending.
pub fn neighbor_set(state: &SwarmState, i: usize, r: f64) -> Result<Vec<usize>> {
    state.check_index(i)?;
    let xi = state.positions[i];
    Ok(state
        .positions
        .iter()
        .enumerate()
        .filter(|&(j, xj)| j != i && (xj - xi).norm() < r)
        .map(|(j, _)| j)
        .collect())
}

fn checked_norm(d: Vec2, what: impl FnOnce() -> String) -> Result<f64> {
    let n = d.norm();
    if n < SINGULAR_DISTANCE {
        Err(Error::Singularity {
            what: what(),
            distance: n,
        })
    } else {
        Ok(n)
    }
}

/// Shepherd repulsion `-(y - x) / |y - x|^3` on a sheep at `x`.
pub fn shepherd_repulsion(x: Vec2, shepherd: Vec2, index: usize) -> Result<Vec2> {
    let d = shepherd - x;
    let n = checked_norm(d, || format!("sheep {index} and shepherd"))?;
    Ok(-d / (n * n * n))
}

pub fn force_components(state: &SwarmState, i: usize, params: &SwarmParams) -> Result<ForceTriple> {
    let neighbors = neighbor_set(state, i, params.r)?;
    let xi = state.positions[i];
    if neighbors.is_empty() {
        let mut forces = ForceTriple::zero();
        if params.isolated_sheep_feel_shepherd {
            forces.v3 = shepherd_repulsion(xi, state.shepherd, i)?;
        }
        return Ok(forces);
    }

    let mut v1 = Vec2::zeros();
    let mut v2 = Vec2::zeros();
    for &j in &neighbors {
        let d = state.positions[j] - xi;
        let n = checked_norm(d, || format!("sheep {i} and sheep {j}"))?;
        v1 -= d / (n * n * n);
        v2 += d / n;
    }
    let count = neighbors.len() as f64;
    Ok(ForceTriple {
        v1: v1 / count,
        v2: v2 / count,
        v3: shepherd_repulsion(xi, state.shepherd, i)?,
    })
}

/// One synchronous update with saturation enabled.
pub fn step(state: &SwarmState, params: &SwarmParams, shepherd_next: Vec2) -> Result<SwarmState> {
    step_with(state, params, shepherd_next, Saturation::Enabled)
}

/// One synchronous update. All forces are evaluated on the frozen current
/// state, including the current shepherd position; `shepherd_next` only
/// takes effect from the following step on.
pub fn step_with(
    state: &SwarmState,
    params: &SwarmParams,
    shepherd_next: Vec2,
    saturation: Saturation,
) -> Result<SwarmState> {
    let velocities = (0..state.len())
        .map(|i| {
            let raw = force_components(state, i, params)?.combine(params);
            Ok(match saturation {
                Saturation::Enabled => saturate(raw, params.v_bar),
                Saturation::Disabled => raw,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let positions = state.positions.iter().zip(&velocities).map(|(x, v)| x + v).collect();
    Ok(SwarmState {
        k: state.k + 1,
        positions,
        velocities,
        shepherd: shepherd_next,
    })
}
