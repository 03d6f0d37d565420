//! Two-sheep separation analysis.
//!
//! Placing the shepherd on the line through two interacting sheep,
//! `y = x_1 + c (x_2 - x_1)`, makes their distance grow in one unsaturated
//! step whenever `c` lies in one of three open sets:
//!
//! - `C1 ⊂ (-inf, 0)`: `c^-2 - (1-c)^-2 > T1`
//! - `C2 ⊂ (0, 1)`:    `c^-2 + (c-1)^-2 > T2`
//! - `C3 ⊂ (1, inf)`:  `(c-1)^-2 - c^-2 > T3`
//!
//! with `T1 = T3 = 2(K_s1 - R²K_s2 + R²max(K_s2, R))/K_s3` and
//! `T2 = 2(K_s2 R² - K_s1)/K_s3`. The first criterion decreases in `|c|`, the
//! second is convex with minimum 8 at `c = 1/2`, and the third mirrors the
//! first under `c -> 1 - c`, so each piece is one or two intervals whose
//! endpoints are found by bisection.

use serde::Serialize;

use crate::swarm::{SwarmParams, SINGULAR_DISTANCE};
use crate::{Error, Result, Vec2};

/// Finite extent kept for the unbounded pieces C1 and C3.
pub const DEFAULT_DOMAIN_BOUND: f64 = 10.0;
/// Endpoint resolution of the bisection.
pub const ENDPOINT_TOL: f64 = 1e-9;
/// Inward retraction of open endpoints when clamping a coefficient.
pub const CLAMP_MARGIN: f64 = 1e-6;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub fn contains(&self, c: f64) -> bool {
        self.lo < c && c < self.hi
    }

    /// Nearest coefficient at least `margin` inside the interval.
    fn clamp_inside(&self, c: f64, margin: f64) -> f64 {
        let lo = self.lo + margin;
        let hi = self.hi - margin;
        if lo > hi {
            0.5 * (self.lo + self.hi)
        } else {
            c.clamp(lo, hi)
        }
    }
}

/// Which of the three pieces an interval belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Piece {
    C1,
    C2,
    C3,
}

impl Piece {
    pub fn of(c: f64) -> Option<Piece> {
        if c < 0.0 {
            Some(Piece::C1)
        } else if c > 0.0 && c < 1.0 {
            Some(Piece::C2)
        } else if c > 1.0 {
            Some(Piece::C3)
        } else {
            None
        }
    }

    /// Left-hand side of the defining inequality.
    pub fn criterion(self, c: f64) -> f64 {
        let a = c.powi(-2);
        let b = (c - 1.0).powi(-2);
        match self {
            Piece::C1 => a - b,
            Piece::C2 => a + b,
            Piece::C3 => b - a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibleSets {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub c1: Vec<OpenInterval>,
    pub c2: Vec<OpenInterval>,
    pub c3: Vec<OpenInterval>,
    pub tol: f64,
    pub domain_bound: f64,
}

/// `(T1 = T3, T2)` for the given gains.
pub fn thresholds(params: &SwarmParams) -> Result<(f64, f64)> {
    if params.k_s3 <= 0.0 {
        return Err(Error::ZeroShepherdGain);
    }
    let r2 = params.r * params.r;
    let outer = 2.0 * (params.k_s1 - r2 * params.k_s2 + r2 * params.k_s2.max(params.r)) / params.k_s3;
    let inner = 2.0 * (params.k_s2 * r2 - params.k_s1) / params.k_s3;
    Ok((outer, inner))
}

/// Bisects between a point satisfying `pred` and one violating it; returns a
/// point on the satisfying side within `tol` of the boundary.
fn bisect_boundary(pred: impl Fn(f64) -> bool, mut inside: f64, mut outside: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        if (inside - outside).abs() <= tol {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

pub fn feasible_sets(params: &SwarmParams, domain_bound: f64) -> Result<FeasibleSets> {
    feasible_sets_with_tol(params, domain_bound, ENDPOINT_TOL)
}

pub fn feasible_sets_with_tol(params: &SwarmParams, domain_bound: f64, tol: f64) -> Result<FeasibleSets> {
    if !(domain_bound > 0.0 && domain_bound.is_finite()) {
        return Err(Error::InvalidParams("domain bound must be positive".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParams("endpoint tolerance must be positive".into()));
    }
    let (t13, t2) = thresholds(params)?;
    // Bisect a bit tighter than the advertised resolution so that mirrored
    // endpoints agree to `tol`.
    let inner_tol = 0.25 * tol;

    let c1 = {
        let pred = |c: f64| Piece::C1.criterion(c) > t13;
        let far = -domain_bound;
        if t13 <= 0.0 || pred(far) {
            vec![OpenInterval { lo: far, hi: 0.0 }]
        } else {
            let lo = bisect_boundary(pred, 0.0, far, inner_tol);
            vec![OpenInterval { lo, hi: 0.0 }]
        }
    };

    let c3 = {
        let pred = |c: f64| Piece::C3.criterion(c) > t13;
        let far = 1.0 + domain_bound;
        if t13 <= 0.0 || pred(far) {
            vec![OpenInterval { lo: 1.0, hi: far }]
        } else {
            let hi = bisect_boundary(pred, 1.0, far, inner_tol);
            vec![OpenInterval { lo: 1.0, hi }]
        }
    };

    let c2 = if t2 < 8.0 {
        vec![OpenInterval { lo: 0.0, hi: 1.0 }]
    } else {
        let pred = |c: f64| Piece::C2.criterion(c) > t2;
        let left = bisect_boundary(pred, 0.0, 0.5, inner_tol);
        let right = bisect_boundary(pred, 1.0, 0.5, inner_tol);
        vec![OpenInterval { lo: 0.0, hi: left }, OpenInterval { lo: right, hi: 1.0 }]
    };

    let strip = |v: Vec<OpenInterval>| v.into_iter().filter(|iv| iv.lo < iv.hi).collect();
    Ok(FeasibleSets {
        t1: t13,
        t2,
        t3: t13,
        c1: strip(c1),
        c2: strip(c2),
        c3: strip(c3),
        tol,
        domain_bound,
    })
}

impl FeasibleSets {
    pub fn intervals(&self) -> impl Iterator<Item = &OpenInterval> {
        self.c1.iter().chain(&self.c2).chain(&self.c3)
    }

    pub fn is_empty(&self) -> bool {
        self.intervals().next().is_none()
    }

    /// True iff `c` lies strictly inside a stored interval.
    pub fn contains(&self, c: f64) -> bool {
        self.intervals().any(|iv| iv.contains(c))
    }

    pub fn threshold(&self, piece: Piece) -> f64 {
        match piece {
            Piece::C1 => self.t1,
            Piece::C2 => self.t2,
            Piece::C3 => self.t3,
        }
    }

    /// Direct evaluation of the defining inequality, independent of the
    /// stored intervals (and of the domain bound).
    pub fn satisfies_inequality(&self, c: f64) -> bool {
        Piece::of(c).is_some_and(|p| p.criterion(c) > self.threshold(p))
    }

    /// How far the criterion exceeds its threshold at `c`; larger means a
    /// stronger one-step separation push.
    pub fn criterion_margin(&self, c: f64) -> f64 {
        Piece::of(c).map_or(f64::NEG_INFINITY, |p| p.criterion(c) - self.threshold(p))
    }

    /// Nearest feasible coefficient to `c`, retracted `CLAMP_MARGIN` inside
    /// open endpoints. Members are returned unchanged.
    pub fn clamp(&self, c: f64) -> Result<f64> {
        if self.contains(c) {
            return Ok(c);
        }
        let mut best: Option<(f64, f64)> = None;
        for iv in self.intervals() {
            let cand = iv.clamp_inside(c, CLAMP_MARGIN);
            let dist = (cand - c).abs();
            best = match best {
                None => Some((cand, dist)),
                Some((b, bd)) => {
                    let better = if dist != bd {
                        dist < bd
                    } else {
                        let (mc, mb) = (self.criterion_margin(cand), self.criterion_margin(b));
                        if mc != mb {
                            mc > mb
                        } else {
                            cand < b
                        }
                    };
                    if better {
                        Some((cand, dist))
                    } else {
                        Some((b, bd))
                    }
                }
            };
        }
        best.map(|(c, _)| c).ok_or(Error::EmptyFeasibleSet)
    }

    /// Retracted interval endpoints, the finite candidate set used when no
    /// direction information is available.
    pub fn interior_endpoints(&self) -> Vec<f64> {
        self.intervals()
            .flat_map(|iv| {
                [
                    iv.clamp_inside(iv.lo, CLAMP_MARGIN),
                    iv.clamp_inside(iv.hi, CLAMP_MARGIN),
                ]
            })
            .collect()
    }
}

/// Proof quantities for one two-sheep configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationProbe {
    pub delta: Vec2,
    pub c: f64,
    pub f: f64,
    pub e: f64,
}

impl SeparationProbe {
    pub fn new(delta: Vec2, c: f64, params: &SwarmParams) -> Result<Self> {
        let f = f_scalar(delta, c, params)?;
        Ok(Self {
            delta,
            c,
            f,
            e: gain_from_f(delta.norm(), f),
        })
    }
}

fn check_probe_args(delta: Vec2, c: f64) -> Result<f64> {
    let d = delta.norm();
    if d < SINGULAR_DISTANCE {
        return Err(Error::Singularity {
            what: "the two sheep".into(),
            distance: d,
        });
    }
    for (dist, who) in [
        (c.abs() * d, "shepherd and sheep 1"),
        ((c - 1.0).abs() * d, "shepherd and sheep 2"),
    ] {
        if dist < SINGULAR_DISTANCE {
            return Err(Error::Singularity {
                what: who.into(),
                distance: dist,
            });
        }
    }
    Ok(d)
}

/// Scalar `f` with `v_2 - v_1 = f Δ` for unsaturated dynamics when the
/// shepherd sits at `x_1 + cΔ`.
pub fn f_scalar(delta: Vec2, c: f64, params: &SwarmParams) -> Result<f64> {
    let d = check_probe_args(delta, c)?;
    let d3 = d * d * d;
    let cd = (c * delta).norm();
    let c1d = ((c - 1.0) * delta).norm();
    Ok(
        c * params.k_s3 / (cd * cd * cd) - (c - 1.0) * params.k_s3 / (c1d * c1d * c1d)
            + 2.0 * (params.k_s1 - params.k_s2 * d * d) / d3,
    )
}

/// One-step distance change `|Δ|(|f + 1| - 1)`.
pub fn gain_from_f(delta_norm: f64, f: f64) -> f64 {
    delta_norm * ((f + 1.0).abs() - 1.0)
}

pub fn separation_gain(delta: Vec2, c: f64, params: &SwarmParams) -> Result<f64> {
    let f = f_scalar(delta, c, params)?;
    Ok(gain_from_f(delta.norm(), f))
}

/// Coefficient of the orthogonal projection of `y` onto the line `x_p + c(x_t - x_p)`.
pub fn line_coefficient(y: Vec2, x_p: Vec2, x_t: Vec2) -> Result<f64> {
    let axis = x_t - x_p;
    if axis.norm() < SINGULAR_DISTANCE {
        return Err(Error::DegenerateLine);
    }
    Ok((y - x_p).dot(&axis) / axis.norm_squared())
}

/// Closest point to `y_star` on the feasible part of the line through
/// `x_p` and `x_t`.
pub fn project_to_feasible_line(y_star: Vec2, x_p: Vec2, x_t: Vec2, sets: &FeasibleSets) -> Result<Vec2> {
    if sets.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    let axis = x_t - x_p;
    let c_star = line_coefficient(y_star, x_p, x_t)?;
    let c = sets.clamp(c_star)?;
    let foot = x_p + axis * c;
    if c == c_star && (foot - y_star).norm() <= 1e-12 * axis.norm().max(1.0) {
        return Ok(y_star);
    }
    Ok(foot)
}
