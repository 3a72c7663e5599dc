//! Iterative Gaussian-refinement selector.
//!
//! Instead of the proposed action set, each step samples candidate polar
//! actions from an isotropic Gaussian, draws them as numbered marks on the
//! raw frame, asks the inner critic (model or oracle) to pick the best,
//! recenters the mean on the pick, shrinks the deviation, and repeats.
//! Samples are not filtered by navigability, and no turn-around mark is
//! offered: sampled angles only cover what the camera can show, which
//! bounds how sharply this selector can turn.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::annotator::annotate;
use crate::geom::PolarAction;
use crate::proposer::{ActionSet, NumberedAction};

use super::{
    ActionSelector, CallRecord, SelectorDecision, SelectorError, StepContext, StopContext,
    StopDecision,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PivotConfig {
    pub n_samples: usize,
    pub n_iterations: usize,
    /// Initial standard deviation of the angle, radians.
    pub sigma_theta: f64,
    /// Initial standard deviation of the range, meters.
    pub sigma_r: f64,
    /// Multiplies both deviations after every iteration.
    pub shrink_factor: f64,
    /// Initial mean range, meters (initial mean angle is 0).
    pub mean_r: f64,
    /// Sampled ranges clamp into this interval, meters.
    pub r_bounds: (f64, f64),
}

impl Default for PivotConfig {
    fn default() -> Self {
        Self {
            n_samples: 8,
            n_iterations: 3,
            sigma_theta: 60f64.to_radians(),
            sigma_r: 0.3,
            shrink_factor: 0.5,
            mean_r: 1.2,
            r_bounds: (0.45, 2.5),
        }
    }
}

/// Per-iteration record kept for step logs and call accounting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PivotIteration {
    pub samples: Vec<(f64, f64)>,
    pub chosen_index: usize,
    pub mean_theta: f64,
    pub mean_r: f64,
}

pub struct PivotPolicy {
    pub cfg: PivotConfig,
    critic: Box<dyn ActionSelector>,
    rng: ChaCha8Rng,
    iterations: Vec<PivotIteration>,
}

impl PivotPolicy {
    pub fn new(cfg: PivotConfig, critic: Box<dyn ActionSelector>, seed: u64) -> Self {
        Self {
            cfg,
            critic,
            rng: ChaCha8Rng::seed_from_u64(seed),
            iterations: Vec::new(),
        }
    }

    /// Iteration records since the last drain.
    pub fn drain_iterations(&mut self) -> Vec<PivotIteration> {
        std::mem::take(&mut self.iterations)
    }

    fn sample_set(
        &mut self,
        mean: (f64, f64),
        sigma: (f64, f64),
        theta_cap: f64,
    ) -> ActionSet {
        let theta_dist = Normal::new(mean.0, sigma.0.max(1e-6)).expect("valid normal");
        let r_dist = Normal::new(mean.1, sigma.1.max(1e-6)).expect("valid normal");
        let mut actions: Vec<NumberedAction> = (0..self.cfg.n_samples)
            .map(|i| {
                // Resample angles into the visible wedge a few times, then
                // clamp: marks must land on the image to be selectable.
                let mut theta = theta_dist.sample(&mut self.rng);
                for _ in 0..8 {
                    if theta.abs() <= theta_cap {
                        break;
                    }
                    theta = theta_dist.sample(&mut self.rng);
                }
                theta = theta.clamp(-theta_cap, theta_cap);
                let r = r_dist
                    .sample(&mut self.rng)
                    .clamp(self.cfg.r_bounds.0, self.cfg.r_bounds.1);
                NumberedAction {
                    id: 0,
                    action: PolarAction::new(theta, r),
                    unexplored: false,
                    insertion_rank: i as u32,
                    pre_clip_r: r,
                }
            })
            .collect();
        actions.sort_by(|a, b| b.action.theta.total_cmp(&a.action.theta));
        for (i, a) in actions.iter_mut().enumerate() {
            a.id = i as u32 + 1;
        }
        ActionSet {
            actions,
            includes_turnaround: false,
            explore_bias: false,
        }
    }
}

impl ActionSelector for PivotPolicy {
    fn select_action(&mut self, ctx: &StepContext<'_>) -> Result<SelectorDecision, SelectorError> {
        let theta_cap = ctx.camera.hfov / 2.0 - 2f64.to_radians();
        let mut mean = (0.0, self.cfg.mean_r);
        let mut sigma = (self.cfg.sigma_theta, self.cfg.sigma_r);
        let mut last: Option<SelectorDecision> = None;
        for _ in 0..self.cfg.n_iterations.max(1) {
            let set = self.sample_set(mean, sigma, theta_cap);
            let annotated = annotate(ctx.raw_rgb, &set, ctx.camera).map_err(|e| {
                SelectorError::Unavailable(format!("sample annotation failed: {e}"))
            })?;
            let sub_ctx = StepContext {
                world: ctx.world,
                pose: ctx.pose,
                camera: ctx.camera,
                goal: ctx.goal,
                actions: &set,
                annotated: Some(&annotated),
                raw_rgb: ctx.raw_rgb,
                history: ctx.history,
                describe_actions_in_text: false,
                success_threshold: ctx.success_threshold,
            };
            let decision = self.critic.select_action(&sub_ctx)?;
            mean = (decision.chosen.theta, decision.chosen.r);
            sigma = (
                sigma.0 * self.cfg.shrink_factor,
                sigma.1 * self.cfg.shrink_factor,
            );
            self.iterations.push(PivotIteration {
                samples: set
                    .actions
                    .iter()
                    .map(|a| (a.action.theta, a.action.r))
                    .collect(),
                chosen_index: set
                    .actions
                    .iter()
                    .position(|a| a.id == decision.chosen_id)
                    .unwrap_or(0),
                mean_theta: mean.0,
                mean_r: mean.1,
            });
            last = Some(decision);
        }
        Ok(last.expect("at least one iteration"))
    }

    fn should_stop(&mut self, ctx: &StopContext<'_>) -> Result<StopDecision, SelectorError> {
        self.critic.should_stop(ctx)
    }

    fn drain_calls(&mut self) -> Vec<CallRecord> {
        let mut calls = self.critic.drain_calls();
        for c in &mut calls {
            if c.purpose == "action" {
                c.purpose = "pivot".into();
            }
        }
        calls
    }
}
