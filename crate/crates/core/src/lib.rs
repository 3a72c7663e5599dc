//! Desk-scale testbed for visually prompted navigation agents.
//!
//! The crate closes a full perception-to-action loop without any external
//! simulator or model service:
//!
//! - [`sim`] — a self-contained egocentric RGB-D simulator over box-world
//!   scenes, with sliding/non-sliding collision and geodesic ground truth.
//! - [`camera`] — pinhole camera with downward pitch; pixel/ray/point
//!   conversions shared by rendering, navigability, and annotation.
//! - [`navigability`] — floor mask and per-direction collision-free reach,
//!   producing the initial candidate action set.
//! - [`voxelmap`] — top-down exploration map (explored within 2 m of the
//!   agent, unexplored beyond).
//! - [`proposer`] — exploration-biased refinement into a numbered action set
//!   with angular spacing and range clipping.
//! - [`annotator`] — draws numbered action marks and arrows onto the frame.
//! - [`prompting`] — prompt construction and response parsing for a
//!   chat-with-images model endpoint.
//! - [`policy`] — action selectors: remote VLM, geodesic oracle (optionally
//!   noisy), iterative Gaussian refinement, and replay.
//! - [`runner`] — the episode loop with double-stop termination, SR/SPL
//!   metrics, benchmark orchestration, and JSONL logging.

pub mod annotator;
pub mod camera;
pub mod geom;
pub mod hash;
pub mod navigability;
pub mod policy;
pub mod prompting;
pub mod proposer;
pub mod runner;
pub mod sim;
pub mod voxelmap;

pub use camera::CameraModel;
pub use geom::{Pose, PolarAction, Vec2, Vec3};
pub use proposer::{ActionSet, ProposerConfig};
pub use sim::{AgentBody, Scene};
