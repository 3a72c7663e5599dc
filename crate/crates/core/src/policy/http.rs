//! Minimal chat-with-images HTTP client.
//!
//! The wire contract is a single JSON POST and a JSON reply, deliberately
//! provider-neutral so that thin adapters can front OpenAI- or
//! Gemini-style servers:
//!
//! ```json
//! // request
//! {"model": "...", "temperature": 0.2, "system": "...",
//!  "parts": [{"kind": "text", "text": "..."},
//!            {"kind": "image_png_base64", "data": "..."}]}
//! // response
//! {"text": "..."}
//! ```
//!
//! The API token comes only from the `MARKNAV_API_TOKEN` environment
//! variable and is sent as a bearer header. Rate limiting is client-side
//! (requests per minute, shared across threads); transport failures retry
//! up to `max_retries` with a short backoff.

use std::io::Cursor;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use base64::Engine;
use image::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompting::PromptBundle;

/// Environment variable holding the bearer token.
pub const TOKEN_ENV_VAR: &str = "MARKNAV_API_TOKEN";

#[derive(Debug, Error)]
pub enum HttpError {
    #[error("transport failure after {attempts} attempts: {last}")]
    Transport { attempts: u32, last: String },
    #[error("endpoint returned malformed response: {0}")]
    BadResponse(String),
}

/// Client configuration; mirrored in config files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VlmConfig {
    pub endpoint_url: String,
    pub model: String,
    pub temperature: f64,
    /// Transport retries per call.
    pub max_retries: u32,
    /// Requests per minute; 0 disables client-side limiting.
    pub rate_limit_rpm: f64,
    pub timeout_secs: u64,
}

impl Default for VlmConfig {
    fn default() -> Self {
        Self {
            endpoint_url: String::new(),
            model: "default".into(),
            temperature: 0.2,
            max_retries: 3,
            rate_limit_rpm: 0.0,
            timeout_secs: 60,
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    system: &'a str,
    parts: Vec<Part>,
}

#[derive(Serialize)]
#[serde(tag = "kind")]
enum Part {
    #[serde(rename = "text")]
    Text { text: String },
    #[serde(rename = "image_png_base64")]
    Image { data: String },
}

#[derive(Deserialize)]
struct ChatResponse {
    text: String,
}

/// One reply with its latency.
#[derive(Debug, Clone)]
pub struct ChatReply {
    pub text: String,
    pub latency_ms: u64,
}

/// Thread-safe client; clone-free sharing via `&self`.
pub struct VlmClient {
    cfg: VlmConfig,
    agent: ureq::Agent,
    token: Option<String>,
    last_request: Mutex<Option<Instant>>,
}

fn png_base64(img: &RgbImage) -> String {
    let mut buf = Vec::new();
    image::DynamicImage::ImageRgb8(img.clone())
        .write_to(&mut Cursor::new(&mut buf), image::ImageFormat::Png)
        .expect("png encoding into memory");
    base64::engine::general_purpose::STANDARD.encode(&buf)
}

impl VlmClient {
    pub fn new(cfg: VlmConfig) -> Self {
        let agent_cfg = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .build();
        Self {
            cfg,
            agent: agent_cfg.into(),
            token: std::env::var(TOKEN_ENV_VAR).ok(),
            last_request: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &VlmConfig {
        &self.cfg
    }

    fn throttle(&self) {
        if self.cfg.rate_limit_rpm <= 0.0 {
            return;
        }
        let min_interval = Duration::from_secs_f64(60.0 / self.cfg.rate_limit_rpm);
        let wait = {
            let mut last = self.last_request.lock().expect("rate limiter lock");
            let now = Instant::now();
            let wait = match *last {
                Some(prev) => min_interval.checked_sub(now.duration_since(prev)),
                None => None,
            };
            // Reserve the slot before sleeping so concurrent callers queue.
            *last = Some(now + wait.unwrap_or_default());
            wait
        };
        if let Some(w) = wait {
            std::thread::sleep(w);
        }
    }

    /// POST the bundle; retries transport failures, never retries on a
    /// malformed 200 body (that belongs to parse-level retry policy).
    pub fn chat(&self, bundle: &PromptBundle) -> Result<ChatReply, HttpError> {
        let mut parts = vec![Part::Text {
            text: bundle.task_text.clone(),
        }];
        for img in &bundle.images {
            parts.push(Part::Image {
                data: png_base64(img),
            });
        }
        let req = ChatRequest {
            model: &self.cfg.model,
            temperature: self.cfg.temperature,
            system: &bundle.system_text,
            parts,
        };
        let mut last_err = String::new();
        let attempts = self.cfg.max_retries.max(1);
        for attempt in 0..attempts {
            self.throttle();
            let started = Instant::now();
            let mut request = self.agent.post(&self.cfg.endpoint_url);
            if let Some(token) = &self.token {
                request = request.header("authorization", &format!("Bearer {token}"));
            }
            match request.send_json(&req) {
                Ok(mut resp) => {
                    let latency_ms = started.elapsed().as_millis() as u64;
                    let parsed: Result<ChatResponse, _> = resp.body_mut().read_json();
                    return match parsed {
                        Ok(body) => Ok(ChatReply {
                            text: body.text,
                            latency_ms,
                        }),
                        Err(e) => Err(HttpError::BadResponse(e.to_string())),
                    };
                }
                Err(e) => {
                    last_err = e.to_string();
                    if attempt + 1 < attempts {
                        std::thread::sleep(Duration::from_millis(50 * (attempt as u64 + 1)));
                    }
                }
            }
        }
        Err(HttpError::Transport {
            attempts,
            last: last_err,
        })
    }
}

#[cfg(test)]
pub(crate) mod test_server {
    //! A scripted single-threaded HTTP server speaking just enough of the
    //! wire contract for selector tests.

    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::sync::mpsc;

    /// Serve `replies` in order (as the `text` field), then stop. Returns
    /// the endpoint URL and a join handle.
    pub fn serve_scripted(replies: Vec<String>) -> (String, std::thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind test server");
        let addr = listener.local_addr().unwrap();
        let (_tx, _rx) = mpsc::channel::<()>();
        let handle = std::thread::spawn(move || {
            let mut bodies = Vec::new();
            for reply in replies {
                let (mut stream, _) = match listener.accept() {
                    Ok(s) => s,
                    Err(_) => break,
                };
                let mut buf = Vec::new();
                let mut tmp = [0u8; 4096];
                let body = loop {
                    let n = stream.read(&mut tmp).unwrap_or(0);
                    if n == 0 {
                        break String::new();
                    }
                    buf.extend_from_slice(&tmp[..n]);
                    if let Some(pos) = find_header_end(&buf) {
                        let headers = String::from_utf8_lossy(&buf[..pos]).to_string();
                        let len = content_length(&headers).unwrap_or(0);
                        while buf.len() < pos + 4 + len {
                            let n = stream.read(&mut tmp).unwrap_or(0);
                            if n == 0 {
                                break;
                            }
                            buf.extend_from_slice(&tmp[..n]);
                        }
                        break String::from_utf8_lossy(&buf[pos + 4..]).to_string();
                    }
                };
                bodies.push(body);
                let payload = serde_json::json!({ "text": reply }).to_string();
                let response = format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    payload.len(),
                    payload
                );
                let _ = stream.write_all(response.as_bytes());
            }
            bodies
        });
        (format!("http://{addr}/chat"), handle)
    }

    fn find_header_end(buf: &[u8]) -> Option<usize> {
        buf.windows(4).position(|w| w == b"\r\n\r\n")
    }

    fn content_length(headers: &str) -> Option<usize> {
        headers
            .lines()
            .find(|l| l.to_ascii_lowercase().starts_with("content-length:"))
            .and_then(|l| l.split(':').nth(1))
            .and_then(|v| v.trim().parse().ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompting::PromptBundle;

    fn bundle() -> PromptBundle {
        PromptBundle {
            system_text: "sys".into(),
            task_text: "task".into(),
            images: vec![RgbImage::from_pixel(4, 3, image::Rgb([1, 2, 3]))],
        }
    }

    #[test]
    fn scripted_server_round_trip() {
        let (url, handle) = test_server::serve_scripted(vec!["hello".into()]);
        let client = VlmClient::new(VlmConfig {
            endpoint_url: url,
            max_retries: 1,
            ..Default::default()
        });
        let reply = client.chat(&bundle()).unwrap();
        assert_eq!(reply.text, "hello");
        let bodies = handle.join().unwrap();
        assert!(bodies[0].contains("\"image_png_base64\""));
        assert!(bodies[0].contains("\"system\":\"sys\""));
    }

    #[test]
    fn dead_endpoint_reports_transport_failure() {
        let client = VlmClient::new(VlmConfig {
            endpoint_url: "http://127.0.0.1:1/chat".into(),
            max_retries: 2,
            timeout_secs: 2,
            ..Default::default()
        });
        match client.chat(&bundle()) {
            Err(HttpError::Transport { attempts: 2, .. }) => {}
            other => panic!("expected transport failure, got {other:?}"),
        }
    }
}
