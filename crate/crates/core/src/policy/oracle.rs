//! Ground-truth selector: scores every numbered action by simulating it
//! and reading the geodesic distance-to-goal field at the resulting pose.
//!
//! With `epsilon > 0` the selector picks uniformly among the non-optimal
//! actions with that probability, giving a controllable noisy stand-in for
//! a model. The stop answer is exact regardless of epsilon: true distance
//! to the nearest goal instance within the success threshold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sim;

use super::{
    ActionSelector, SelectorDecision, SelectorError, StepContext, StopContext, StopDecision,
};

pub struct OracleSelector {
    pub epsilon: f64,
    rng: ChaCha8Rng,
}

impl OracleSelector {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Distance-to-goal after executing `id` from the context pose.
    fn score(&self, ctx: &StepContext<'_>, id: u32) -> f64 {
        let action = ctx.actions.action_of(id).expect("id from the set");
        let outcome = sim::step(
            ctx.world.scene,
            ctx.pose,
            action,
            ctx.world.body,
            ctx.world.allow_slide,
        );
        ctx.world.goal_field.query(outcome.pose.position())
    }
}

impl ActionSelector for OracleSelector {
    fn select_action(&mut self, ctx: &StepContext<'_>) -> Result<SelectorDecision, SelectorError> {
        let ids = ctx.actions.ids();
        debug_assert!(!ids.is_empty());
        let mut best = ids[0];
        let mut best_score = f64::INFINITY;
        for id in &ids {
            let s = self.score(ctx, *id);
            if s < best_score {
                best_score = s;
                best = *id;
            }
        }
        let chosen_id = if self.epsilon > 0.0
            && ids.len() > 1
            && self.rng.random_bool(self.epsilon.clamp(0.0, 1.0))
        {
            let others: Vec<u32> = ids.iter().copied().filter(|i| *i != best).collect();
            others[self.rng.random_range(0..others.len())]
        } else {
            best
        };
        Ok(SelectorDecision {
            chosen_id,
            chosen: ctx.actions.action_of(chosen_id).expect("id from the set"),
            transcript: None,
        })
    }

    fn should_stop(&mut self, ctx: &StopContext<'_>) -> Result<StopDecision, SelectorError> {
        let pos = ctx.pose.position();
        let dist = ctx
            .world
            .goal_positions
            .iter()
            .map(|g| g.dist(pos))
            .fold(f64::INFINITY, f64::min);
        Ok(StopDecision {
            stop: dist <= ctx.success_threshold,
            transcript: None,
        })
    }
}
