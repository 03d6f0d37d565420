//! Initial swarm layouts.
//!
//! The reference scenario is a 5x5 square lattice at spacing 0.5 (the
//! pairwise force-balance distance for the default gains) occupying
//! `[0, 2]²`. Sheep `row * 5 + col` sits at `(0.5 col, 0.5 row)`. Target
//! labels:
//!
//! | label | (col, row) | role                |
//! |-------|------------|---------------------|
//! | A     | (0, 0)     | corner              |
//! | B     | (2, 0)     | edge midpoint       |
//! | C     | (1, 1)     | off-centre interior |
//! | D     | (2, 4)     | opposite edge midpoint |
//! | E     | (2, 2)     | centre              |
//!
//! The shepherd starts on the lattice diagonal beyond corner A at
//! `(-1.5, -1.5)`, 2.12 from the nearest sheep.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::config::{ExperimentConfig, Layout, Target, TargetLabel};
use crate::swarm::SwarmState;
use crate::{Error, Result, Vec2};

pub const GRID_SIDE: usize = 5;
pub const GRID_SPACING: f64 = 0.5;
pub const GRID_SHEPHERD: [f64; 2] = [-1.5, -1.5];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub state: SwarmState,
    pub labels: BTreeMap<TargetLabel, usize>,
}

impl Scenario {
    pub fn resolve(&self, target: Target) -> Result<usize> {
        let id = match target {
            Target::Id(id) => id,
            Target::Label(l) => *self
                .labels
                .get(&l)
                .ok_or_else(|| Error::Config(format!("label {l} not present in layout")))?,
        };
        if id >= self.state.len() {
            return Err(Error::Config(format!(
                "target {id} out of range for swarm of {}",
                self.state.len()
            )));
        }
        Ok(id)
    }
}

pub fn grid5x5() -> Scenario {
    let positions = (0..GRID_SIDE * GRID_SIDE)
        .map(|k| {
            let (col, row) = (k % GRID_SIDE, k / GRID_SIDE);
            Vec2::new(col as f64 * GRID_SPACING, row as f64 * GRID_SPACING)
        })
        .collect();
    let at = |col: usize, row: usize| row * GRID_SIDE + col;
    let labels = BTreeMap::from([
        (TargetLabel::A, at(0, 0)),
        (TargetLabel::B, at(2, 0)),
        (TargetLabel::C, at(1, 1)),
        (TargetLabel::D, at(2, 4)),
        (TargetLabel::E, at(2, 2)),
    ]);
    Scenario {
        state: SwarmState::new(positions, Vec2::new(GRID_SHEPHERD[0], GRID_SHEPHERD[1])),
        labels,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    shepherd: [f64; 2],
    sheep: Vec<[f64; 2]>,
    #[serde(default)]
    labels: BTreeMap<TargetLabel, usize>,
}

/// Loads a TOML layout:
///
/// ```toml
/// shepherd = [-2.0, 0.0]
/// sheep = [[0.0, 0.0], [0.5, 0.0]]
/// [labels]
/// A = 1
/// ```
pub fn load_layout(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_layout(&text).map_err(|message| Error::Format {
        path: path.to_path_buf(),
        message,
    })
}

fn parse_layout(text: &str) -> std::result::Result<Scenario, String> {
    let file: LayoutFile = toml::from_str(text).map_err(|e| e.to_string())?;
    if file.sheep.is_empty() {
        return Err("layout has no sheep".into());
    }
    let finite = |p: &[f64; 2]| p.iter().all(|x| x.is_finite());
    if !finite(&file.shepherd) || !file.sheep.iter().all(finite) {
        return Err("layout coordinates must be finite".into());
    }
    for (label, &id) in &file.labels {
        if id >= file.sheep.len() {
            return Err(format!("label {label} refers to missing sheep {id}"));
        }
    }
    let positions = file.sheep.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    Ok(Scenario {
        state: SwarmState::new(positions, Vec2::new(file.shepherd[0], file.shepherd[1])),
        labels: file.labels,
    })
}

/// Initial state and resolved target id for a config.
pub fn generate_initial(config: &ExperimentConfig) -> Result<(SwarmState, usize)> {
    let scenario = match &config.layout {
        Layout::Grid5x5 => grid5x5(),
        Layout::File(path) => load_layout(path)?,
    };
    let t = scenario.resolve(config.target)?;
    Ok((scenario.state, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::interaction_graph;

    #[test]
    fn lattice_shape() {
        let s = grid5x5();
        assert_eq!(s.state.len(), 25);
        let mut min = f64::INFINITY;
        for i in 0..25 {
            for j in i + 1..25 {
                min = min.min(s.state.distance(i, j));
            }
            assert!((s.state.positions[i] - s.state.shepherd).norm() >= 2.0);
        }
        assert_eq!(min, 0.5);
        for t in 0..25 {
            assert_eq!(interaction_graph(&s.state, t, 1.0).unwrap().components().len(), 1);
        }
    }

    #[test]
    fn labels_point_at_canonical_sheep() {
        let s = grid5x5();
        let pos = |l| s.state.positions[s.resolve(Target::Label(l)).unwrap()];
        assert_eq!(pos(TargetLabel::A), Vec2::new(0.0, 0.0));
        assert_eq!(pos(TargetLabel::B), Vec2::new(1.0, 0.0));
        assert_eq!(pos(TargetLabel::C), Vec2::new(0.5, 0.5));
        assert_eq!(pos(TargetLabel::D), Vec2::new(1.0, 2.0));
        assert_eq!(pos(TargetLabel::E), Vec2::new(1.0, 1.0));
        assert!(s.resolve(Target::Id(25)).is_err());
    }

    #[test]
    fn parses_layout_text() {
        let s = parse_layout("shepherd = [-2.0, 0.0]\nsheep = [[0.0, 0.0], [0.5, 0.0]]\n[labels]\nB = 1\n").unwrap();
        assert_eq!(s.state.len(), 2);
        assert_eq!(s.resolve(Target::Label(TargetLabel::B)).unwrap(), 1);
        assert!(s.resolve(Target::Label(TargetLabel::A)).is_err());
        assert!(parse_layout("shepherd = [0.0, 0.0]\nsheep = []").is_err());
        assert!(parse_layout("shepherd = [0.0, 0.0]\nsheep = [[0.0, 0.0]]\n[labels]\nA = 3").is_err());
        assert!(parse_layout("shepherd = [0.0]\nsheep = [[0.0, 0.0]]").is_err());
    }
}
