//! Generation clients and retry policy.

use alloc::boxed::Box;
use alloc::string::String;
use core::time::Duration;

use crate::prompt::TokenEstimator;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRequest {
    pub prompt: String,
    pub max_output_tokens: usize,
    pub temperature: f64,
    pub model: String,
}

impl GenerationRequest {
    pub fn validate(&self) -> Result<(), GenerationError> {
        if self.prompt.is_empty() {
            return Err(GenerationError::InvalidRequest("prompt must not be empty".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(GenerationError::InvalidRequest("max_output_tokens must be at least 1".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(GenerationError::InvalidRequest("temperature must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Usage {
    pub prompt_tokens: usize,
    pub output_tokens: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationResult {
    pub text: String,
    pub usage: Usage,
    /// Request start to full response body.
    pub latency: Duration,
    pub client: &'static str,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("request timed out")]
    Timeout,
    #[error("network failure: {0}")]
    Network(String),
    #[error("server returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("malformed response: {0}")]
    Decode(String),
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: usize, last: Box<GenerationError> },
}

impl GenerationError {
    /// Timeouts, network failures, 429 and 5xx are worth retrying.
    pub fn is_transient(&self) -> bool {
        match self {
            GenerationError::Timeout | GenerationError::Network(_) => true,
            GenerationError::Status { status, .. } => *status == 429 || (500..600).contains(status),
            _ => false,
        }
    }
}

/// A text-generation backend.
pub trait Generator: Sync {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, GenerationError>;

    fn name(&self) -> &'static str;
}

impl<G: Generator + ?Sized> Generator for &G {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, GenerationError> {
        (**self).generate(req)
    }

    fn name(&self) -> &'static str {
        (**self).name()
    }
}

/// Deterministic offline client: echoes the first `max_output_tokens`
/// estimated tokens of the prompt behind a `MOCK:` prefix.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockClient {
    estimator: TokenEstimator,
}

impl MockClient {
    pub fn new(estimator: TokenEstimator) -> Self {
        MockClient { estimator }
    }
}

impl Generator for MockClient {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, GenerationError> {
        req.validate()?;
        let max_bytes = req.max_output_tokens.saturating_mul(self.estimator.chars_per_token());
        let mut end = max_bytes.min(req.prompt.len());
        while !req.prompt.is_char_boundary(end) {
            end -= 1;
        }
        let body = &req.prompt[..end];
        let mut text = String::with_capacity(5 + body.len());
        text.push_str("MOCK:");
        text.push_str(body);
        Ok(GenerationResult {
            usage: Usage { prompt_tokens: self.estimator.estimate(&req.prompt), output_tokens: self.estimator.estimate(body) },
            text,
            latency: Duration::ZERO,
            client: "mock",
        })
    }

    fn name(&self) -> &'static str {
        "mock"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: usize,
    /// Delay before the second attempt; doubles after each further failure.
    pub backoff_base: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 3, backoff_base: Duration::from_millis(500) }
    }
}

/// Runs `op` (given the 1-based attempt number) until it succeeds, fails
/// with a non-transient error, or `max_attempts` is reached. `sleep` receives
/// each backoff delay.
pub fn with_retry<T>(
    policy: RetryPolicy,
    mut op: impl FnMut(usize) -> Result<T, GenerationError>,
    mut sleep: impl FnMut(Duration),
) -> Result<T, GenerationError> {
    if policy.max_attempts == 0 {
        return Err(GenerationError::InvalidRequest("max_attempts must be at least 1".into()));
    }
    let mut delay = policy.backoff_base;
    let mut attempt = 1;
    loop {
        match op(attempt) {
            Ok(v) => return Ok(v),
            Err(e) if !e.is_transient() => return Err(e),
            Err(e) if attempt >= policy.max_attempts => {
                return Err(if attempt == 1 { e } else { GenerationError::Exhausted { attempts: attempt, last: Box::new(e) } })
            }
            Err(_) => {
                sleep(delay);
                delay = delay.saturating_mul(2);
                attempt += 1;
            }
        }
    }
}
