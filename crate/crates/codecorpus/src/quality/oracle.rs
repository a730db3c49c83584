//! Completion clients: the remote oracle over HTTP, scripted and file-backed
//! mocks, and retry/rate-limit plumbing for batch labeling.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prompt-in / text-out completion interface. The quality oracle and the
/// needle-test backends both implement this.
pub trait CompletionClient: Send + Sync {
    fn complete(&self, prompt: &str) -> std::result::Result<String, OracleError>;

    fn name(&self) -> &str {
        "oracle"
    }
}

#[derive(Debug, Clone)]
pub enum OracleError {
    /// Worth retrying: timeouts, connection failures, 429/5xx.
    Transient(String),
    /// Authentication rejected; surfaced immediately, never retried.
    Auth(String),
    /// Permanent failure; never retried.
    Fatal(String),
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::Transient(m) => write!(f, "transient: {m}"),
            OracleError::Auth(m) => write!(f, "auth: {m}"),
            OracleError::Fatal(m) => write!(f, "fatal: {m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_backoff: Duration::from_millis(250),
            max_backoff: Duration::from_secs(4),
        }
    }
}

impl RetryPolicy {
    /// No sleeping between attempts; used by tests.
    pub fn immediate(max_retries: u32) -> Self {
        RetryPolicy {
            max_retries,
            initial_backoff: Duration::ZERO,
            max_backoff: Duration::ZERO,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResponse {
    pub text: String,
    /// Transient failures absorbed before the successful attempt.
    pub retries: u32,
}

/// Sends one prompt, retrying transient failures with exponential backoff up
/// to the policy cap. Auth and fatal errors surface immediately.
pub fn query_oracle(
    client: &dyn CompletionClient,
    prompt: &str,
    policy: &RetryPolicy,
) -> Result<OracleResponse> {
    let mut backoff = policy.initial_backoff;
    let mut retries = 0;
    loop {
        match client.complete(prompt) {
            Ok(text) => {
                if retries > 0 {
                    log::info!("oracle call succeeded after {retries} retries");
                }
                return Ok(OracleResponse { text, retries });
            }
            Err(OracleError::Auth(msg)) => return Err(Error::OracleAuth(msg)),
            Err(OracleError::Fatal(msg)) => {
                return Err(Error::OracleExhausted { attempts: retries + 1, reason: msg })
            }
            Err(OracleError::Transient(msg)) => {
                if retries >= policy.max_retries {
                    return Err(Error::OracleExhausted {
                        attempts: retries + 1,
                        reason: msg,
                    });
                }
                retries += 1;
                log::warn!("transient oracle failure ({msg}); retry {retries}");
                if !backoff.is_zero() {
                    std::thread::sleep(backoff);
                    backoff = (backoff * 2).min(policy.max_backoff);
                }
            }
        }
    }
}

/// Configuration for the HTTP chat-completion client. The bearer token is
/// read from the named environment variable, never from config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HttpOracleConfig {
    pub endpoint: String,
    pub model: String,
    pub token_env: String,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

fn default_timeout_secs() -> u64 {
    60
}

pub struct HttpCompletionClient {
    config: HttpOracleConfig,
    http: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatResponseMessage,
}

#[derive(Deserialize)]
struct ChatResponseMessage {
    content: String,
}

impl HttpCompletionClient {
    pub fn new(config: HttpOracleConfig) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| Error::config(format!("http client: {e}")))?;
        Ok(HttpCompletionClient { config, http })
    }
}

impl CompletionClient for HttpCompletionClient {
    fn complete(&self, prompt: &str) -> std::result::Result<String, OracleError> {
        let body = ChatRequest {
            model: &self.config.model,
            messages: [ChatMessage { role: "user", content: prompt }],
        };
        let mut req = self.http.post(&self.config.endpoint).json(&body);
        if let Ok(token) = std::env::var(&self.config.token_env) {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() || e.is_connect() {
                OracleError::Transient(e.to_string())
            } else {
                OracleError::Fatal(e.to_string())
            }
        })?;
        let status = resp.status();
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(OracleError::Auth(format!("endpoint returned {status}")));
        }
        if status.as_u16() == 408 || status.as_u16() == 429 || status.is_server_error() {
            return Err(OracleError::Transient(format!("endpoint returned {status}")));
        }
        if !status.is_success() {
            return Err(OracleError::Fatal(format!("endpoint returned {status}")));
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| OracleError::Fatal(format!("malformed completion payload: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| OracleError::Fatal("completion payload has no choices".into()))
    }

    fn name(&self) -> &str {
        &self.config.model
    }
}

/// Scripted outcome for the in-memory mock.
#[derive(Debug, Clone)]
pub enum MockOutcome {
    Reply(String),
    Timeout,
    AuthError,
}

/// In-memory scripted client; pops one outcome per call. When the script is
/// exhausted the last reply repeats.
pub struct MockClient {
    script: Mutex<VecDeque<MockOutcome>>,
    last_reply: Mutex<Option<String>>,
    pub calls: AtomicUsize,
}

impl MockClient {
    pub fn new(script: Vec<MockOutcome>) -> Self {
        MockClient {
            script: Mutex::new(script.into()),
            last_reply: Mutex::new(None),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn echoing(reply: impl Into<String>) -> Self {
        Self::new(vec![MockOutcome::Reply(reply.into())])
    }
}

impl CompletionClient for MockClient {
    fn complete(&self, _prompt: &str) -> std::result::Result<String, OracleError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let outcome = self.script.lock().unwrap().pop_front();
        match outcome {
            Some(MockOutcome::Reply(text)) => {
                *self.last_reply.lock().unwrap() = Some(text.clone());
                Ok(text)
            }
            Some(MockOutcome::Timeout) => Err(OracleError::Transient("mock timeout".into())),
            Some(MockOutcome::AuthError) => Err(OracleError::Auth("mock 401".into())),
            None => self
                .last_reply
                .lock()
                .unwrap()
                .clone()
                .ok_or_else(|| OracleError::Fatal("mock script exhausted".into())),
        }
    }

    fn name(&self) -> &str {
        "mock"
    }
}

/// File-backed mock: serves the lines of a text file as successive replies,
/// cycling when exhausted. Blank lines are skipped; `\n` escapes are
/// expanded so multi-line replies fit on one line.
pub struct FileMockClient {
    replies: Vec<String>,
    cursor: AtomicUsize,
}

impl FileMockClient {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let replies: Vec<String> = raw
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.replace("\\n", "\n"))
            .collect();
        if replies.is_empty() {
            return Err(Error::config(format!("mock file {} has no replies", path.display())));
        }
        Ok(FileMockClient { replies, cursor: AtomicUsize::new(0) })
    }
}

impl CompletionClient for FileMockClient {
    fn complete(&self, _prompt: &str) -> std::result::Result<String, OracleError> {
        let idx = self.cursor.fetch_add(1, Ordering::SeqCst) % self.replies.len();
        Ok(self.replies[idx].clone())
    }

    fn name(&self) -> &str {
        "file-mock"
    }
}

/// Paces callers to a global requests-per-second budget.
pub struct RateLimiter {
    min_interval: Duration,
    next_slot: Mutex<Instant>,
}

impl RateLimiter {
    pub fn per_second(rps: f64) -> Self {
        let min_interval = if rps > 0.0 {
            Duration::from_secs_f64(1.0 / rps)
        } else {
            Duration::ZERO
        };
        RateLimiter { min_interval, next_slot: Mutex::new(Instant::now()) }
    }

    pub fn acquire(&self) {
        if self.min_interval.is_zero() {
            return;
        }
        let wait = {
            let mut next = self.next_slot.lock().unwrap();
            let now = Instant::now();
            let at = (*next).max(now);
            *next = at + self.min_interval;
            at.saturating_duration_since(now)
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}
