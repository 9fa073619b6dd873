//! Chat-completion client over HTTP.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use rgl_core::generation::{with_retry, GenerationError, GenerationRequest, GenerationResult, Generator, RetryPolicy, Usage};
use rgl_core::prompt::TokenEstimator;
use serde_json::{json, Value};

use crate::config::GenerationSection;

/// Counting semaphore bounding in-flight requests.
#[derive(Debug)]
pub struct Semaphore {
    free: Mutex<usize>,
    cv: Condvar,
}

pub struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    pub fn new(permits: usize) -> Self {
        Semaphore { free: Mutex::new(permits.max(1)), cv: Condvar::new() }
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("semaphore poisoned");
        while *free == 0 {
            free = self.cv.wait(free).expect("semaphore poisoned");
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("semaphore poisoned") += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HttpOptions {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub retry: RetryPolicy,
    pub concurrency: usize,
    /// Used for usage counts when the server reports none.
    pub estimator: TokenEstimator,
}

#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("config key `generation.endpoint` is required for the HTTP client")]
    MissingEndpoint,
    #[error("environment variable {0} (named by `generation.api_key_env`) is not set")]
    MissingKey(String),
}

impl HttpOptions {
    /// Reads the API key from the environment variable the config names.
    pub fn from_config(cfg: &GenerationSection, estimator: TokenEstimator) -> Result<Self, SetupError> {
        let endpoint = cfg.endpoint.clone().ok_or(SetupError::MissingEndpoint)?;
        let api_key = match &cfg.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| SetupError::MissingKey(var.clone()))?),
            None => None,
        };
        Ok(HttpOptions {
            endpoint,
            api_key,
            timeout: Duration::from_secs_f64(cfg.timeout_secs),
            retry: cfg.retry_policy(),
            concurrency: cfg.concurrency,
            estimator,
        })
    }
}

/// Posts OpenAI-style chat-completion requests.
///
/// A JSON reply must carry `choices[0].message.content`; any other reply
/// body is taken verbatim as the generated text.
pub struct HttpClient {
    agent: ureq::Agent,
    opts: HttpOptions,
    slots: Semaphore,
}

impl std::fmt::Debug for HttpClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpClient").field("endpoint", &self.opts.endpoint).finish_non_exhaustive()
    }
}

impl HttpClient {
    pub fn new(opts: HttpOptions) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(opts.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let slots = Semaphore::new(opts.concurrency);
        HttpClient { agent, opts, slots }
    }

    fn attempt(&self, req: &GenerationRequest) -> Result<GenerationResult, GenerationError> {
        let _permit = self.slots.acquire();
        let body = json!({
            "model": req.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "max_tokens": req.max_output_tokens,
            "temperature": req.temperature,
        });
        let start = Instant::now();
        let mut call = self.agent.post(&self.opts.endpoint).header("Content-Type", "application/json");
        if let Some(key) = &self.opts.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = call.send_json(&body).map_err(classify)?;
        let status = resp.status().as_u16();
        let is_json = resp
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .is_some_and(|v| v.contains("json"));
        let text = resp.body_mut().read_to_string().map_err(classify)?;
        let latency = start.elapsed();
        if !(200..300).contains(&status) {
            return Err(GenerationError::Status { status, body: text });
        }
        let (text, usage) = if is_json { decode(&text)? } else { (text, None) };
        let usage = usage.unwrap_or_else(|| Usage {
            prompt_tokens: self.opts.estimator.estimate(&req.prompt),
            output_tokens: self.opts.estimator.estimate(&text),
        });
        Ok(GenerationResult { text, usage, latency, client: "http" })
    }
}

fn decode(body: &str) -> Result<(String, Option<Usage>), GenerationError> {
    let v: Value = serde_json::from_str(body).map_err(|e| GenerationError::Decode(e.to_string()))?;
    let text = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| GenerationError::Decode("missing choices[0].message.content".into()))?;
    let count = |k: &str| v.pointer(k).and_then(Value::as_u64).map(|x| x as usize);
    let usage = match (count("/usage/prompt_tokens"), count("/usage/completion_tokens")) {
        (Some(prompt_tokens), Some(output_tokens)) => Some(Usage { prompt_tokens, output_tokens }),
        _ => None,
    };
    Ok((text.to_string(), usage))
}

fn classify(e: ureq::Error) -> GenerationError {
    use ureq::Error as E;
    match e {
        E::Timeout(_) => GenerationError::Timeout,
        E::StatusCode(status) => GenerationError::Status { status, body: String::new() },
        E::Io(_) | E::HostNotFound | E::ConnectionFailed | E::Protocol(_) | E::BodyStalled => {
            GenerationError::Network(e.to_string())
        }
        E::Json(e) => GenerationError::Decode(e.to_string()),
        other => GenerationError::InvalidRequest(other.to_string()),
    }
}

impl Generator for HttpClient {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, GenerationError> {
        req.validate()?;
        with_retry(self.opts.retry, |_| self.attempt(req), std::thread::sleep)
    }

    fn name(&self) -> &'static str {
        "http"
    }
}
