//! Prompt construction and model-response parsing.
//!
//! Two separate prompts drive an episode: the action prompt (system text
//! describing the embodiment, task text enumerating the numbered actions,
//! and the annotated frame) and the termination prompt, which asks a plain
//! stop/continue question over the *unannotated* frame so marks never
//! clutter the stopping decision. Default template texts ship with the
//! crate and can be overridden from a directory; placeholders use
//! `{name}` substitution.
//!
//! Parsers are total: every response string maps to exactly one of
//! valid / invalid-choice / unparseable, and retry policy lives with the
//! caller.

use std::collections::VecDeque;
use std::path::Path;

use image::RgbImage;
use regex::Regex;
use std::sync::OnceLock;

use crate::proposer::ActionSet;

// ---------------------------------------------------------------------------
// Goals
// ---------------------------------------------------------------------------

/// What the agent is asked to find. The modality decides which fields
/// exist and how the goal is rendered into prompts.
#[derive(Debug, Clone)]
pub enum Goal {
    /// Find any instance of a named object category.
    ObjectName { name: String },
    /// Find a specific object by free-form description.
    Description { name: String, description: String },
    /// Find the object shown in a goal image.
    Image { name: String, image: RgbImage },
}

impl Goal {
    /// Label used to resolve goal instances in the scene.
    pub fn label(&self) -> &str {
        match self {
            Goal::ObjectName { name } => name,
            Goal::Description { name, .. } => name,
            Goal::Image { name, .. } => name,
        }
    }

    pub fn goal_image(&self) -> Option<&RgbImage> {
        match self {
            Goal::Image { image, .. } => Some(image),
            _ => None,
        }
    }

    fn clause(&self, threshold: f64) -> String {
        match self {
            Goal::ObjectName { name } => {
                format!("find any '{name}' and stop within about {threshold} m of it.")
            }
            Goal::Description { name, description } => format!(
                "find this specific object: {description} (category: '{name}') and stop within about {threshold} m of it."
            ),
            Goal::Image { .. } => format!(
                "find the object shown in the FIRST image (the goal image) and stop within about {threshold} m of it."
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// History
// ---------------------------------------------------------------------------

/// One past step kept for context.
#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub frame: RgbImage,
    pub chosen_id: u32,
    pub step: usize,
}

/// Ring of the K most recent steps; K = 0 keeps nothing.
#[derive(Debug, Clone, Default)]
pub struct HistoryBuffer {
    cap: usize,
    entries: VecDeque<HistoryEntry>,
}

impl HistoryBuffer {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            entries: VecDeque::new(),
        }
    }

    pub fn push(&mut self, frame: RgbImage, chosen_id: u32, step: usize) {
        if self.cap == 0 {
            return;
        }
        if self.entries.len() == self.cap {
            self.entries.pop_front();
        }
        self.entries.push_back(HistoryEntry {
            frame,
            chosen_id,
            step,
        });
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

/// The three prompt templates. Defaults are compiled in; a directory with
/// `system.txt`, `action.txt`, `termination.txt` overrides them.
#[derive(Debug, Clone)]
pub struct PromptTemplates {
    pub system: String,
    pub action: String,
    pub termination: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self {
            system: include_str!("../templates/system.txt").to_string(),
            action: include_str!("../templates/action.txt").to_string(),
            termination: include_str!("../templates/termination.txt").to_string(),
        }
    }
}

impl PromptTemplates {
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        Ok(Self {
            system: std::fs::read_to_string(dir.join("system.txt"))?,
            action: std::fs::read_to_string(dir.join("action.txt"))?,
            termination: std::fs::read_to_string(dir.join("termination.txt"))?,
        })
    }
}

fn fill(template: &str, pairs: &[(&str, String)]) -> String {
    let mut out = template.to_string();
    for (key, value) in pairs {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

/// Everything one model call needs: system text, task text, and ordered
/// images (goal image first when present, history frames oldest-first,
/// current frame last).
#[derive(Debug, Clone)]
pub struct PromptBundle {
    pub system_text: String,
    pub task_text: String,
    pub images: Vec<RgbImage>,
}

impl PromptBundle {
    /// Stable content hash over texts and image bytes, for logs.
    pub fn sha256(&self) -> String {
        let mut bytes: Vec<u8> = Vec::new();
        bytes.extend_from_slice(self.system_text.as_bytes());
        bytes.push(0);
        bytes.extend_from_slice(self.task_text.as_bytes());
        for img in &self.images {
            bytes.push(0);
            bytes.extend_from_slice(img.as_raw());
        }
        crate::hash::sha256_hex(&bytes)
    }
}

/// Physical parameters injected into the system prompt.
#[derive(Debug, Clone, Copy)]
pub struct Embodiment {
    pub radius: f64,
    pub height: f64,
    pub pitch_deg: f64,
}

/// Inputs for [`build_action_prompt`].
pub struct ActionPromptInputs<'a> {
    pub goal: &'a Goal,
    pub actions: &'a ActionSet,
    pub history: &'a HistoryBuffer,
    /// The current frame: annotated for mark-based prompting, raw when
    /// `describe_actions_in_text` is set.
    pub current: &'a RgbImage,
    /// Describe each action in words instead of referring to image marks.
    pub describe_actions_in_text: bool,
    pub success_threshold: f64,
    pub embodiment: Embodiment,
}

fn action_words(id: u32, theta: f64, r: f64) -> String {
    if id == 0 {
        return "- 0: turn around (rotate 180 degrees in place, no displacement)".to_string();
    }
    let deg = theta.to_degrees();
    if deg.abs() < 0.5 {
        format!("- {id}: move forward {r:.1} m")
    } else if deg > 0.0 {
        format!("- {id}: turn left {:.0} degrees, then move forward {r:.1} m", deg)
    } else {
        format!("- {id}: turn right {:.0} degrees, then move forward {r:.1} m", -deg)
    }
}

/// Build the action-selection prompt.
pub fn build_action_prompt(tpl: &PromptTemplates, inp: &ActionPromptInputs) -> PromptBundle {
    let ids = inp.actions.ids();
    let id_list = ids
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ");

    let image_clause = if inp.describe_actions_in_text {
        "The last image is your current first-person camera view, with no annotations. Your \
         candidate actions are listed below."
            .to_string()
    } else {
        "The last image is your current first-person camera view. Each candidate action is drawn \
         on it as a black arrow ending in a white circle carrying the action id, placed where the \
         motion would take you. Action 0 is drawn on the left margin with the label 'Turn \
         Around'; it rotates you 180 degrees in place without moving."
            .to_string()
    };

    let action_lines = if inp.describe_actions_in_text {
        let mut lines: Vec<String> = Vec::new();
        if inp.actions.includes_turnaround {
            lines.push(action_words(0, std::f64::consts::PI, 0.0));
        }
        for a in &inp.actions.actions {
            lines.push(action_words(a.id, a.action.theta, a.action.r));
        }
        format!("{}\n", lines.join("\n"))
    } else {
        String::new()
    };

    let history_section = if inp.history.is_empty() {
        String::new()
    } else {
        let choices = inp
            .history
            .iter()
            .map(|e| format!("step {}: action {}", e.step, e.chosen_id))
            .collect::<Vec<_>>()
            .join("; ");
        format!(
            "\nBefore the current view you also see your {} most recent earlier views, oldest \
             first. The actions you chose at those steps were: {}.\n",
            inp.history.len(),
            choices
        )
    };

    let system_text = fill(
        &tpl.system,
        &[
            ("radius", format!("{:.2}", inp.embodiment.radius)),
            ("height", format!("{:.1}", inp.embodiment.height)),
            ("pitch_deg", format!("{:.0}", inp.embodiment.pitch_deg)),
        ],
    );
    let task_text = fill(
        &tpl.action,
        &[
            ("goal_clause", inp.goal.clause(inp.success_threshold)),
            ("image_clause", image_clause),
            ("id_list", id_list),
            ("action_lines", action_lines),
            ("history_section", history_section),
        ],
    );

    let mut images = Vec::new();
    if let Some(goal_img) = inp.goal.goal_image() {
        images.push(goal_img.clone());
    }
    for e in inp.history.iter() {
        images.push(e.frame.clone());
    }
    images.push(inp.current.clone());

    PromptBundle {
        system_text,
        task_text,
        images,
    }
}

/// Build the stop/continue prompt over the raw (unannotated) frame.
pub fn build_termination_prompt(
    tpl: &PromptTemplates,
    goal: &Goal,
    raw_frame: &RgbImage,
    success_threshold: f64,
    embodiment: Embodiment,
) -> PromptBundle {
    let image_clause = if goal.goal_image().is_some() {
        "The FIRST image shows the goal object. The last image is your current first-person \
         camera view."
            .to_string()
    } else {
        "The image is your current first-person camera view.".to_string()
    };
    let system_text = fill(
        &tpl.system,
        &[
            ("radius", format!("{:.2}", embodiment.radius)),
            ("height", format!("{:.1}", embodiment.height)),
            ("pitch_deg", format!("{:.0}", embodiment.pitch_deg)),
        ],
    );
    let task_text = fill(
        &tpl.termination,
        &[
            ("goal_clause", goal.clause(success_threshold)),
            ("image_clause", image_clause),
            ("threshold", format!("{success_threshold}")),
        ],
    );
    let mut images = Vec::new();
    if let Some(goal_img) = goal.goal_image() {
        images.push(goal_img.clone());
    }
    images.push(raw_frame.clone());
    PromptBundle {
        system_text,
        task_text,
        images,
    }
}

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

/// Outcome of parsing an action response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParsedAction {
    Valid(u32),
    /// A well-formed fragment named an id outside the valid set.
    InvalidChoice(i64),
    Unparseable,
}

/// Outcome of parsing a termination response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParsedStop {
    Valid(bool),
    Unparseable,
}

fn action_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"\{\s*"action"\s*:\s*(-?\d+)\s*\}"#).expect("valid regex"))
}

fn done_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"\{\s*"done"\s*:\s*(true|false)\s*\}"#).expect("valid regex"))
}

/// Extract the last well-formed `{"action": n}` fragment.
pub fn parse_action_response(text: &str, valid_ids: &[u32]) -> ParsedAction {
    let Some(caps) = action_re().captures_iter(text).last() else {
        return ParsedAction::Unparseable;
    };
    let n: i64 = match caps[1].parse() {
        Ok(n) => n,
        Err(_) => return ParsedAction::Unparseable,
    };
    if n >= 0 && valid_ids.contains(&(n as u32)) {
        ParsedAction::Valid(n as u32)
    } else {
        ParsedAction::InvalidChoice(n)
    }
}

/// Extract the last well-formed `{"done": true|false}` fragment.
pub fn parse_termination_response(text: &str) -> ParsedStop {
    match done_re().captures_iter(text).last() {
        Some(caps) => ParsedStop::Valid(&caps[1] == "true"),
        None => ParsedStop::Unparseable,
    }
}
