//! Action selectors: the things that decide which numbered action to take
//! and whether to stop.
//!
//! A selector sees the numbered action set, the (annotated) frame, the
//! goal, and optional history. The remote-model selector builds prompts
//! and parses replies; the oracle scores each action by a one-step
//! lookahead against ground-truth geodesic distance and stands in for the
//! model in tests and desk-scale benchmarks; the iterative-refinement
//! selector samples its own candidate marks instead of using the proposed
//! set; the replay selector re-emits a recorded episode.

mod http;
mod oracle;
mod pivot;
mod replay;
mod vlm;

pub use http::{ChatReply, HttpError, VlmClient, VlmConfig};
pub use oracle::OracleSelector;
pub use pivot::{PivotConfig, PivotPolicy};
pub use replay::{ReplaySelector, ReplayStep, ScriptedSelector};
pub use vlm::VlmSelector;

use image::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotator::AnnotatedImage;
use crate::camera::CameraModel;
use crate::geom::{PolarAction, Pose, Vec2};
use crate::prompting::{Goal, HistoryBuffer};
use crate::proposer::ActionSet;
use crate::sim::{AgentBody, DistanceField, Scene};

#[derive(Debug, Error)]
pub enum SelectorError {
    /// The backing service could not be reached after bounded retries;
    /// episodes abort with a distinguished status rather than failing.
    #[error("selector unavailable: {0}")]
    Unavailable(String),
}

/// Ground truth handed to selectors that are allowed to use it (the
/// oracle); model-backed selectors ignore it.
#[derive(Clone, Copy)]
pub struct WorldView<'a> {
    pub scene: &'a Scene,
    pub body: AgentBody,
    pub allow_slide: bool,
    pub goal_positions: &'a [Vec2],
    /// Geodesic distance-to-goal field, multi-source over all instances.
    pub goal_field: &'a DistanceField,
}

/// Everything available when choosing an action.
pub struct StepContext<'a> {
    pub world: WorldView<'a>,
    pub pose: Pose,
    pub camera: &'a CameraModel,
    pub goal: &'a Goal,
    pub actions: &'a ActionSet,
    /// Present unless the variant prompts over the raw image.
    pub annotated: Option<&'a AnnotatedImage>,
    pub raw_rgb: &'a RgbImage,
    pub history: &'a HistoryBuffer,
    /// Describe actions in words instead of referring to image marks.
    pub describe_actions_in_text: bool,
    pub success_threshold: f64,
}

impl StepContext<'_> {
    /// The image the model should look at for action selection.
    pub fn prompt_image(&self) -> &RgbImage {
        match self.annotated {
            Some(a) if !self.describe_actions_in_text => &a.rgb,
            _ => self.raw_rgb,
        }
    }
}

/// Everything available for the separate stop/continue decision.
pub struct StopContext<'a> {
    pub world: WorldView<'a>,
    pub pose: Pose,
    pub goal: &'a Goal,
    pub raw_rgb: &'a RgbImage,
    pub success_threshold: f64,
}

/// Record of one model exchange.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Transcript {
    pub prompt_sha256: String,
    pub response: String,
    pub retries: u32,
    pub latency_ms: u64,
}

/// The selected action.
#[derive(Debug, Clone)]
pub struct SelectorDecision {
    pub chosen_id: u32,
    pub chosen: PolarAction,
    /// Present when a model was consulted.
    pub transcript: Option<Transcript>,
}

/// The stop answer.
#[derive(Debug, Clone)]
pub struct StopDecision {
    pub stop: bool,
    pub transcript: Option<Transcript>,
}

/// One backing-service call, drained by the runner into the transcript
/// log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CallRecord {
    /// "action", "termination", or "pivot".
    pub purpose: String,
    pub prompt_sha256: String,
    pub response: String,
    pub latency_ms: u64,
}

pub trait ActionSelector: Send {
    fn select_action(&mut self, ctx: &StepContext<'_>) -> Result<SelectorDecision, SelectorError>;

    fn should_stop(&mut self, ctx: &StopContext<'_>) -> Result<StopDecision, SelectorError>;

    /// Calls made since the last drain; used for per-step transcript logs.
    fn drain_calls(&mut self) -> Vec<CallRecord> {
        Vec::new()
    }
}
