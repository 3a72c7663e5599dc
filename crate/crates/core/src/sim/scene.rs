//! Scene description, JSON loading, and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Pose, Rect, Vec2, Vec3};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("failed to read scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse scene file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("floor extent is degenerate: min {min:?}, max {max:?}")]
    DegenerateFloor { min: Vec2, max: Vec2 },
    #[error("box {index} ('{label}'): max corner not strictly above min corner on axis {axis}")]
    BoxInverted {
        index: usize,
        label: String,
        axis: char,
    },
    #[error("box {index} ('{label}'): does not rest on the floor (min z = {z})")]
    BoxFloating { index: usize, label: String, z: f64 },
    #[error("box {index} ('{label}'): footprint extends outside the floor extent")]
    BoxOutOfBounds { index: usize, label: String },
    #[error("goal {index} ('{label}'): box_index {box_index} out of range ({n_boxes} boxes)")]
    GoalBadBoxIndex {
        index: usize,
        label: String,
        box_index: usize,
        n_boxes: usize,
    },
    #[error("start pose ({x}, {y}) is outside the floor extent")]
    StartOutOfBounds { x: f64, y: f64 },
    #[error("start pose collides with box {index} ('{label}') (clearance {clearance:.3} m < radius {radius} m)")]
    StartCollision {
        index: usize,
        label: String,
        clearance: f64,
        radius: f64,
    },
}

/// The agent's cylindrical body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentBody {
    /// Meters.
    pub radius: f64,
    /// Meters.
    pub height: f64,
}

impl Default for AgentBody {
    fn default() -> Self {
        Self {
            radius: 0.17,
            height: 1.5,
        }
    }
}

/// Axis-aligned box resting on the floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxObstacle {
    /// Meters, world frame; `min.z` is expected to be 0 (resting).
    pub min: Vec3,
    pub max: Vec3,
    pub label: String,
    /// Surface color, 8-bit RGB.
    pub color: [u8; 3],
}

impl BoxObstacle {
    /// Floor-plane footprint.
    pub fn footprint(&self) -> Rect {
        Rect::new(self.min.xy(), self.max.xy())
    }

    pub fn center_xy(&self) -> Vec2 {
        Vec2::new(
            (self.min.x + self.max.x) / 2.0,
            (self.min.y + self.max.y) / 2.0,
        )
    }
}

/// A navigation target attached to one of the scene's boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalObject {
    pub label: String,
    /// Free-form description, usable as a description-modality goal.
    pub description: String,
    /// Meters, world frame; conventionally the footprint center.
    pub position: Vec2,
    pub box_index: usize,
}

/// An immutable scene: floor, boxes, goals, and the episode start pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub floor: Rect,
    pub boxes: Vec<BoxObstacle>,
    pub goals: Vec<GoalObject>,
    pub start: Pose,
    pub seed: u64,
}

impl Scene {
    /// Check all scene invariants; errors name the offending element.
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.floor.width() <= 0.0 || self.floor.height() <= 0.0 {
            return Err(SceneError::DegenerateFloor {
                min: self.floor.min,
                max: self.floor.max,
            });
        }
        for (i, b) in self.boxes.iter().enumerate() {
            for (axis, lo, hi) in [
                ('x', b.min.x, b.max.x),
                ('y', b.min.y, b.max.y),
                ('z', b.min.z, b.max.z),
            ] {
                if hi <= lo {
                    return Err(SceneError::BoxInverted {
                        index: i,
                        label: b.label.clone(),
                        axis,
                    });
                }
            }
            if b.min.z.abs() > 1e-9 {
                return Err(SceneError::BoxFloating {
                    index: i,
                    label: b.label.clone(),
                    z: b.min.z,
                });
            }
            if !self.floor.contains_rect(&b.footprint()) {
                return Err(SceneError::BoxOutOfBounds {
                    index: i,
                    label: b.label.clone(),
                });
            }
        }
        for (i, g) in self.goals.iter().enumerate() {
            if g.box_index >= self.boxes.len() {
                return Err(SceneError::GoalBadBoxIndex {
                    index: i,
                    label: g.label.clone(),
                    box_index: g.box_index,
                    n_boxes: self.boxes.len(),
                });
            }
        }
        let body = AgentBody::default();
        let start = self.start.position();
        if !self.floor.contains(start) {
            return Err(SceneError::StartOutOfBounds {
                x: start.x,
                y: start.y,
            });
        }
        for (i, b) in self.boxes.iter().enumerate() {
            let clearance = b.footprint().distance(start);
            if clearance < body.radius {
                return Err(SceneError::StartCollision {
                    index: i,
                    label: b.label.clone(),
                    clearance,
                    radius: body.radius,
                });
            }
        }
        Ok(())
    }

    /// Positions of every goal object whose label matches `label`.
    pub fn goal_positions(&self, label: &str) -> Vec<Vec2> {
        self.goals
            .iter()
            .filter(|g| g.label == label)
            .map(|g| g.position)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), SceneError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Load and validate a scene from its JSON file format.
pub fn load_scene(path: &Path) -> Result<Scene, SceneError> {
    let text = std::fs::read_to_string(path)?;
    let scene: Scene = serde_json::from_str(&text)?;
    scene.validate()?;
    Ok(scene)
}
