//! Self-contained egocentric RGB-D simulator over box-world scenes.
//!
//! A scene is a rectangular floor plus axis-aligned boxes resting on it.
//! The world is 2.5D: boxes block the agent regardless of their height,
//! height only matters to the camera and to obstacle classification. The
//! floor boundary behaves like a wall: motion, geodesic distances, and the
//! renderer all treat the world as ending there.

mod generate;
mod geodesic;
mod motion;
mod render;
mod scene;

pub use generate::{generate_scene, GenParams, GenerateError};
pub use geodesic::{geodesic_distance, DistanceField, NavGrid, GEODESIC_RESOLUTION};
pub use motion::{step, StepOutcome, MOTION_SUBSTEP};
pub use render::{render, HitLabel, RgbdFrame, DEPTH_NO_HIT_RGB, FLOOR_RGB};
pub use scene::{load_scene, AgentBody, BoxObstacle, GoalObject, Scene, SceneError};
