//! Remote-model selector: prompt construction, reply parsing, and retry
//! policy.
//!
//! Parse failures retry up to [`PARSE_RETRIES`] times with a correction
//! appended to the task text; after that the action call falls back to the
//! valid action with the largest range and the stop call conservatively
//! answers "keep navigating".

use crate::prompting::{
    build_action_prompt, build_termination_prompt, parse_action_response,
    parse_termination_response, ActionPromptInputs, Embodiment, ParsedAction, ParsedStop,
    PromptBundle, PromptTemplates,
};

use super::{
    ActionSelector, CallRecord, ChatReply, SelectorDecision, SelectorError, StepContext,
    StopContext, StopDecision, Transcript, VlmClient,
};

/// Maximum parse-level retries per call.
pub const PARSE_RETRIES: u32 = 2;

pub struct VlmSelector {
    client: VlmClient,
    templates: PromptTemplates,
    calls: Vec<CallRecord>,
}

impl VlmSelector {
    pub fn new(client: VlmClient, templates: PromptTemplates) -> Self {
        Self {
            client,
            templates,
            calls: Vec::new(),
        }
    }

    fn chat_logged(
        &mut self,
        purpose: &str,
        bundle: &PromptBundle,
    ) -> Result<(ChatReply, String), SelectorError> {
        let prompt_sha256 = bundle.sha256();
        let reply = self
            .client
            .chat(bundle)
            .map_err(|e| SelectorError::Unavailable(e.to_string()))?;
        self.calls.push(CallRecord {
            purpose: purpose.into(),
            prompt_sha256: prompt_sha256.clone(),
            response: reply.text.clone(),
            latency_ms: reply.latency_ms,
        });
        Ok((reply, prompt_sha256))
    }

    fn embodiment(ctx_body: crate::sim::AgentBody, pitch: f64) -> Embodiment {
        Embodiment {
            radius: ctx_body.radius,
            height: ctx_body.height,
            pitch_deg: pitch.to_degrees(),
        }
    }
}

fn correction_for(parsed: &ParsedAction, valid_ids: &[u32]) -> String {
    let ids = valid_ids
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    match parsed {
        ParsedAction::Unparseable => format!(
            "\n\nYour previous reply did not contain a parseable answer. Reply again and end \
             with exactly one fenced JSON block of the form {{\"action\": <id>}} where <id> is \
             one of [{ids}]."
        ),
        ParsedAction::InvalidChoice(n) => format!(
            "\n\nYour previous reply chose action {n}, which is not a valid id. Reply again and \
             end with exactly one fenced JSON block {{\"action\": <id>}} with <id> one of [{ids}]."
        ),
        ParsedAction::Valid(_) => String::new(),
    }
}

impl ActionSelector for VlmSelector {
    fn select_action(&mut self, ctx: &StepContext<'_>) -> Result<SelectorDecision, SelectorError> {
        let valid_ids = ctx.actions.ids();
        let mut bundle = build_action_prompt(
            &self.templates,
            &ActionPromptInputs {
                goal: ctx.goal,
                actions: ctx.actions,
                history: ctx.history,
                current: ctx.prompt_image(),
                describe_actions_in_text: ctx.describe_actions_in_text,
                success_threshold: ctx.success_threshold,
                embodiment: Self::embodiment(ctx.world.body, ctx.camera.pitch),
            },
        );
        let mut last: Option<(ChatReply, String)> = None;
        for retry in 0..=PARSE_RETRIES {
            let (reply, prompt_sha) = self.chat_logged("action", &bundle)?;
            let parsed = parse_action_response(&reply.text, &valid_ids);
            if let ParsedAction::Valid(id) = parsed {
                let chosen = ctx.actions.action_of(id).expect("validated id resolves");
                return Ok(SelectorDecision {
                    chosen_id: id,
                    chosen,
                    transcript: Some(Transcript {
                        prompt_sha256: prompt_sha,
                        response: reply.text,
                        retries: retry,
                        latency_ms: reply.latency_ms,
                    }),
                });
            }
            bundle.task_text.push_str(&correction_for(&parsed, &valid_ids));
            last = Some((reply, prompt_sha));
        }
        // Deterministic fallback: the action with the largest range.
        let id = ctx.actions.largest_range_id();
        let chosen = ctx.actions.action_of(id).expect("fallback id resolves");
        let (reply, prompt_sha) = last.expect("at least one attempt");
        Ok(SelectorDecision {
            chosen_id: id,
            chosen,
            transcript: Some(Transcript {
                prompt_sha256: prompt_sha,
                response: reply.text,
                retries: PARSE_RETRIES + 1,
                latency_ms: reply.latency_ms,
            }),
        })
    }

    fn should_stop(&mut self, ctx: &StopContext<'_>) -> Result<StopDecision, SelectorError> {
        let mut bundle = build_termination_prompt(
            &self.templates,
            ctx.goal,
            ctx.raw_rgb,
            ctx.success_threshold,
            Self::embodiment(ctx.world.body, 25f64.to_radians()),
        );
        let mut last: Option<(ChatReply, String)> = None;
        for retry in 0..=PARSE_RETRIES {
            let (reply, prompt_sha) = self.chat_logged("termination", &bundle)?;
            if let ParsedStop::Valid(stop) = parse_termination_response(&reply.text) {
                return Ok(StopDecision {
                    stop,
                    transcript: Some(Transcript {
                        prompt_sha256: prompt_sha,
                        response: reply.text,
                        retries: retry,
                        latency_ms: reply.latency_ms,
                    }),
                });
            }
            bundle.task_text.push_str(
                "\n\nYour previous reply did not contain a parseable answer. Reply again and \
                 end with exactly one fenced JSON block {\"done\": true} or {\"done\": false}.",
            );
            last = Some((reply, prompt_sha));
        }
        // Malformed after retries: keep navigating.
        let (reply, prompt_sha) = last.expect("at least one attempt");
        Ok(StopDecision {
            stop: false,
            transcript: Some(Transcript {
                prompt_sha256: prompt_sha,
                response: reply.text,
                retries: PARSE_RETRIES + 1,
                latency_ms: reply.latency_ms,
            }),
        })
    }

    fn drain_calls(&mut self) -> Vec<CallRecord> {
        std::mem::take(&mut self.calls)
    }
}
