//! Exploration-biased refinement of candidate actions.
//!
//! Candidates arrive as (theta, reach) pairs. With exploration bias on,
//! actions whose endpoint region is unexplored are inserted first under a
//! tight angular spacing, then explored actions fill remaining directions
//! under a looser spacing. Every surviving range is clipped to
//! `min(r_clip_factor * r, r_max)` so the agent stays off obstacles, and a
//! turn-around action (id 0) is always present — it is the entire set when
//! no candidate survives.

use serde::{Deserialize, Serialize};

use crate::geom::{PolarAction, Pose};
use crate::voxelmap::VoxelMap;

/// Tunables for the refinement pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposerConfig {
    /// Minimum angular spacing between unexplored insertions, radians.
    pub spacing_unexplored: f64,
    /// Minimum angular spacing for explored insertions, radians; must
    /// exceed `spacing_unexplored`.
    pub spacing_explored: f64,
    /// Post-clip range cap, meters.
    pub r_max: f64,
    /// Fraction of the measured reach kept after clipping.
    pub r_clip_factor: f64,
    /// When false, all candidates compete under the tight spacing,
    /// ignoring exploration state.
    pub explore_bias: bool,
}

impl Default for ProposerConfig {
    fn default() -> Self {
        Self {
            spacing_unexplored: 20f64.to_radians(),
            spacing_explored: 40f64.to_radians(),
            r_max: 1.7,
            r_clip_factor: 2.0 / 3.0,
            explore_bias: true,
        }
    }
}

/// One numbered action as shown to the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberedAction {
    /// 1-based display id; 0 is reserved for turn-around.
    pub id: u32,
    pub action: PolarAction,
    /// Exploration indicator: endpoint region unexplored when true.
    pub unexplored: bool,
    /// Order in which the greedy pass inserted this action.
    pub insertion_rank: u32,
    /// Reach before clipping, meters.
    pub pre_clip_r: f64,
}

/// The final numbered action set.
///
/// Regular actions are ordered left-to-right as they appear in the image
/// (descending theta) and numbered 1..=n in that order. Id 0 is the
/// turn-around action `(pi, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSet {
    pub actions: Vec<NumberedAction>,
    pub includes_turnaround: bool,
    /// Which spacing regime built this set (recorded for replay checks).
    pub explore_bias: bool,
}

impl ActionSet {
    /// All valid ids, including 0 when turn-around is present.
    pub fn ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = Vec::new();
        if self.includes_turnaround {
            ids.push(0);
        }
        ids.extend(self.actions.iter().map(|a| a.id));
        ids
    }

    /// Resolve an id to its action; id 0 resolves to turn-around.
    pub fn action_of(&self, id: u32) -> Option<PolarAction> {
        if id == 0 && self.includes_turnaround {
            return Some(PolarAction::TURN_AROUND);
        }
        self.actions.iter().find(|a| a.id == id).map(|a| a.action)
    }

    /// The regular action with the largest post-clip range, used as the
    /// parse-failure fallback; turn-around when the set has no regulars.
    pub fn largest_range_id(&self) -> u32 {
        self.actions
            .iter()
            .max_by(|a, b| a.action.r.total_cmp(&b.action.r))
            .map(|a| a.id)
            .unwrap_or(0)
    }

    pub fn is_empty_fallback(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Refine reach candidates into the numbered set shown to the model.
///
/// `initial` may be empty, in which case the set is exactly turn-around.
pub fn propose(
    initial: &[PolarAction],
    map: &VoxelMap,
    pose: Pose,
    cfg: &ProposerConfig,
) -> ActionSet {
    debug_assert!(cfg.spacing_unexplored > 0.0 && cfg.spacing_explored > cfg.spacing_unexplored);
    debug_assert!(cfg.r_clip_factor > 0.0 && cfg.r_clip_factor <= 1.0 && cfg.r_max > 0.0);

    // Exploration indicator on the unclipped endpoints.
    let mut flagged: Vec<(PolarAction, bool)> = initial
        .iter()
        .map(|a| (*a, map.is_unexplored(pose, *a)))
        .collect();
    // Deterministic scan order: ascending theta, ties broken by larger r.
    flagged.sort_by(|(a, _), (b, _)| {
        a.theta
            .total_cmp(&b.theta)
            .then(b.r.total_cmp(&a.r))
    });

    let spaced = |chosen: &[(PolarAction, bool, u32)], theta: f64, min_gap: f64| {
        chosen.iter().all(|(c, _, _)| (c.theta - theta).abs() >= min_gap)
    };

    let mut chosen: Vec<(PolarAction, bool, u32)> = Vec::new();
    let mut rank = 0u32;
    if cfg.explore_bias {
        for (a, unexplored) in flagged.iter().filter(|(_, e)| *e) {
            if spaced(&chosen, a.theta, cfg.spacing_unexplored) {
                chosen.push((*a, *unexplored, rank));
                rank += 1;
            }
        }
        for (a, unexplored) in flagged.iter().filter(|(_, e)| !*e) {
            if spaced(&chosen, a.theta, cfg.spacing_explored) {
                chosen.push((*a, *unexplored, rank));
                rank += 1;
            }
        }
    } else {
        for (a, unexplored) in &flagged {
            if spaced(&chosen, a.theta, cfg.spacing_unexplored) {
                chosen.push((*a, *unexplored, rank));
                rank += 1;
            }
        }
    }

    // Image order: left-to-right = descending theta.
    chosen.sort_by(|(a, _, _), (b, _, _)| b.theta.total_cmp(&a.theta));
    let actions = chosen
        .into_iter()
        .enumerate()
        .map(|(i, (a, unexplored, insertion_rank))| NumberedAction {
            id: i as u32 + 1,
            action: PolarAction::new(a.theta, (cfg.r_clip_factor * a.r).min(cfg.r_max)),
            unexplored,
            insertion_rank,
            pre_clip_r: a.r,
        })
        .collect();

    ActionSet {
        actions,
        includes_turnaround: true,
        explore_bias: cfg.explore_bias,
    }
}

/// A fixed evenly-spaced fan across the FOV at a fixed range, plus
/// turn-around: the action set of the static baseline and of the
/// post-first-stop mode.
pub fn static_fan(count: usize, hfov: f64, r: f64) -> ActionSet {
    let spacing = hfov / count as f64;
    let mut actions: Vec<NumberedAction> = (0..count)
        .map(|k| {
            let theta = -hfov / 2.0 + spacing / 2.0 + k as f64 * spacing;
            (theta, k as u32)
        })
        .map(|(theta, rank)| NumberedAction {
            id: 0, // assigned below in display order
            action: PolarAction::new(theta, r),
            unexplored: false,
            insertion_rank: rank,
            pre_clip_r: r,
        })
        .collect();
    actions.sort_by(|a, b| b.action.theta.total_cmp(&a.action.theta));
    for (i, a) in actions.iter_mut().enumerate() {
        a.id = i as u32 + 1;
    }
    ActionSet {
        actions,
        includes_turnaround: true,
        explore_bias: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::navigability::{CellState, LocalObstacleGrid};

    /// Map where everything within `explored_r` of the origin is explored
    /// and everything else observed is unexplored.
    fn map_explored_within(explored_r: f64) -> VoxelMap {
        let mut map = VoxelMap::new(Vec2::new(-10.0, -10.0), 20.0, 20.0, 0.1);
        let mut grid = LocalObstacleGrid::new_empty(8.0, 0.1);
        for iy in 0..grid.n {
            for ix in 0..grid.n {
                let c = grid.center_of(ix, iy);
                if c.norm() <= explored_r {
                    grid.set_state(ix, iy, CellState::Free);
                }
            }
        }
        // The 2 m explored radius comes from the update rule itself.
        map.update(Pose::new(0.0, 0.0, 0.0), &grid);
        map
    }

    fn origin() -> Pose {
        Pose::new(0.0, 0.0, 0.0)
    }

    #[test]
    fn empty_initial_yields_exactly_turnaround() {
        let map = map_explored_within(3.0);
        let set = propose(&[], &map, origin(), &ProposerConfig::default());
        assert!(set.actions.is_empty());
        assert!(set.includes_turnaround);
        assert_eq!(set.ids(), vec![0]);
        assert_eq!(set.action_of(0), Some(PolarAction::TURN_AROUND));
    }

    #[test]
    fn clip_rule_is_min_of_two_thirds_and_rmax() {
        let map = map_explored_within(0.5); // everything far is unexplored
        let set = propose(
            &[PolarAction::new(0.0, 3.0)],
            &map,
            origin(),
            &ProposerConfig::default(),
        );
        assert_eq!(set.actions.len(), 1);
        // min(2/3 * 3.0, 1.7) = min(2.0, 1.7) = 1.7
        assert!((set.actions[0].action.r - 1.7).abs() < 1e-12);
        assert_eq!(set.actions[0].pre_clip_r, 3.0);
    }

    #[test]
    fn worked_greedy_trace() {
        // All unexplored, spacing 20 degrees: {-40, -30, 0, 15, 45} keeps
        // {-40, 0, 45} under the ascending scan.
        let map = map_explored_within(0.1);
        let initial: Vec<PolarAction> = [-40.0f64, -30.0, 0.0, 15.0, 45.0]
            .iter()
            .map(|d| PolarAction::new(d.to_radians(), 2.0))
            .collect();
        let set = propose(&initial, &map, origin(), &ProposerConfig::default());
        let mut kept: Vec<f64> = set
            .actions
            .iter()
            .map(|a| a.action.theta.to_degrees())
            .collect();
        kept.sort_by(f64::total_cmp);
        assert_eq!(kept.len(), 3);
        for (got, want) in kept.iter().zip([-40.0, 0.0, 45.0]) {
            assert!((got - want).abs() < 1e-9, "kept {kept:?}");
        }
        // Exhaustive cross-check: every rejected candidate violates spacing
        // against the accepted set.
        for cand in &initial {
            let in_set = set
                .actions
                .iter()
                .any(|a| (a.action.theta - cand.theta).abs() < 1e-12);
            if !in_set {
                let violates = set.actions.iter().any(|a| {
                    (a.action.theta - cand.theta).abs()
                        < ProposerConfig::default().spacing_unexplored
                });
                assert!(violates, "rejected candidate {cand:?} violates nothing");
            }
        }
    }

    #[test]
    fn ids_are_contiguous_and_ordered_left_to_right() {
        let map = map_explored_within(0.1);
        let initial: Vec<PolarAction> = [-60.0f64, -20.0, 25.0, 60.0]
            .iter()
            .map(|d| PolarAction::new(d.to_radians(), 1.0))
            .collect();
        let set = propose(&initial, &map, origin(), &ProposerConfig::default());
        for (i, a) in set.actions.iter().enumerate() {
            assert_eq!(a.id, i as u32 + 1);
            if i > 0 {
                assert!(set.actions[i - 1].action.theta > a.action.theta);
            }
        }
        assert_eq!(set.ids()[0], 0);
    }

    #[test]
    fn explored_actions_need_wider_spacing() {
        // Unexplored at 0 degrees; explored candidates at 25 and 45.
        // 25 < 40 is rejected, 45 >= 40 accepted.
        let map = map_explored_within(2.5); // endpoints at r=2 are explored within 2 m? use r to control
        let initial = vec![
            PolarAction::new(0.0, 3.0),              // unexplored (far endpoint)
            PolarAction::new(25f64.to_radians(), 1.0), // explored endpoint
            PolarAction::new(45f64.to_radians(), 1.0), // explored endpoint
        ];
        let set = propose(&initial, &map, origin(), &ProposerConfig::default());
        let thetas: Vec<f64> = set
            .actions
            .iter()
            .map(|a| a.action.theta.to_degrees().round())
            .collect();
        assert!(thetas.contains(&0.0));
        assert!(thetas.contains(&45.0));
        assert!(!thetas.contains(&25.0));
        let a45 = set
            .actions
            .iter()
            .find(|a| a.action.theta.to_degrees().round() == 45.0)
            .unwrap();
        assert!(!a45.unexplored);
    }

    #[test]
    fn bias_off_ignores_exploration_state() {
        let map = map_explored_within(2.5);
        let initial = vec![
            PolarAction::new(0.0, 3.0),
            PolarAction::new(25f64.to_radians(), 1.0),
            PolarAction::new(45f64.to_radians(), 1.0),
        ];
        let cfg = ProposerConfig {
            explore_bias: false,
            ..Default::default()
        };
        let set = propose(&initial, &map, origin(), &cfg);
        // Single pass at 20 degrees: all three fit.
        assert_eq!(set.actions.len(), 3);
        assert!(!set.explore_bias);
    }

    #[test]
    fn insertion_replay_confirms_spacing_soundness() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let cfg = ProposerConfig::default();
        for _ in 0..300 {
            let explored_r = rng.random_range(0.5..4.0);
            let map = map_explored_within(explored_r);
            let n = rng.random_range(0..25);
            let initial: Vec<PolarAction> = (0..n)
                .map(|_| {
                    PolarAction::new(
                        rng.random_range(-1.15..1.15),
                        rng.random_range(0.3..5.0),
                    )
                })
                .collect();
            let set = propose(&initial, &map, origin(), &cfg);
            // Replay in insertion order.
            let mut by_rank: Vec<&NumberedAction> = set.actions.iter().collect();
            by_rank.sort_by_key(|a| a.insertion_rank);
            for (i, a) in by_rank.iter().enumerate() {
                let gap = if a.unexplored {
                    cfg.spacing_unexplored
                } else {
                    cfg.spacing_explored
                };
                for b in &by_rank[..i] {
                    assert!(
                        (a.action.theta - b.action.theta).abs() >= gap - 1e-12,
                        "spacing violated: {a:?} vs {b:?}"
                    );
                }
                // Clip bound.
                assert!(a.action.r <= cfg.r_max + 1e-12);
                assert!(a.action.r <= cfg.r_clip_factor * a.pre_clip_r + 1e-12);
                // Subset safety: (theta, pre-clip r) came from the input.
                assert!(initial
                    .iter()
                    .any(|c| c.theta == a.action.theta && c.r == a.pre_clip_r));
            }
            // Fallback totality.
            assert!(!set.ids().is_empty());
            // Bias effect: disabling the bias never reduces the number of
            // explored-endpoint actions.
            let no_bias = propose(
                &initial,
                &map,
                origin(),
                &ProposerConfig {
                    explore_bias: false,
                    ..cfg
                },
            );
            let explored_with = set.actions.iter().filter(|a| !a.unexplored).count();
            let explored_without = no_bias.actions.iter().filter(|a| !a.unexplored).count();
            assert!(
                explored_without >= explored_with,
                "bias off reduced explored actions: {explored_without} < {explored_with}"
            );
        }
    }

    #[test]
    fn fan_spacing_matches_even_arithmetic() {
        let set = static_fan(5, 130f64.to_radians(), 1.0);
        let mut degs: Vec<f64> = set
            .actions
            .iter()
            .map(|a| a.action.theta.to_degrees())
            .collect();
        degs.sort_by(f64::total_cmp);
        for (got, want) in degs.iter().zip([-52.0, -26.0, 0.0, 26.0, 52.0]) {
            assert!((got - want).abs() < 1e-9, "fan {degs:?}");
        }
        assert!(set.includes_turnaround);
    }

    #[test]
    fn largest_range_fallback() {
        let map = map_explored_within(0.1);
        let initial = vec![
            PolarAction::new(0.5, 1.0),
            PolarAction::new(-0.5, 2.2),
        ];
        let set = propose(&initial, &map, origin(), &ProposerConfig::default());
        let id = set.largest_range_id();
        let a = set.action_of(id).unwrap();
        assert!((a.theta + 0.5).abs() < 1e-12);
    }
}
