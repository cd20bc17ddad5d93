//! Client for the translator under test: profiles, backends, caching, rate
//! limiting and retries.

mod cache;
mod mock;
mod ratelimit;
mod remote;

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use cache::TranslationCache;
pub use mock::{Injection, MockBackend, MockConfig, UnknownPolicy};
pub use ratelimit::{Clock, FakeClock, RateLimiter, SystemClock};
pub use remote::{GenericJson, RemoteAdapter, RemoteBackend, API_KEY_ENV};

use crate::error::{Error, Result};
use crate::text::LanguageProfile;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    /// Timeouts, transport failures, throttling and server errors.
    #[error("transient translator failure: {0}")]
    Transient(String),
    #[error("translator rejected the request: {0}")]
    Permanent(String),
    #[error("malformed translator response: {0}")]
    Malformed(String),
}

/// What a backend returns before the client stamps it into a record.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTranslation {
    pub text: String,
    pub probability: Option<f64>,
}

pub trait Backend: Send + Sync {
    fn id(&self) -> &str;
    fn translate(&self, text: &str, source: &str, target: &str) -> std::result::Result<RawTranslation, TranslateError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub input: String,
    pub output: String,
    pub probability: Option<f64>,
    /// Unix seconds.
    pub timestamp: u64,
    pub backend_id: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Remote,
    Mock,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Remote => "remote",
            BackendKind::Mock => "mock",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslatorProfile {
    pub kind: BackendKind,
    pub backend_id: String,
    /// URL for remote backends, rule file for the mock.
    pub endpoint: String,
    pub source: String,
    pub target: String,
    /// Black-box access is always assumed; grey-box adds probabilities.
    pub grey_box: bool,
    /// Requests per second.
    pub rate_limit: f64,
    /// Seconds.
    pub timeout: f64,
}

impl TranslatorProfile {
    pub fn mock(endpoint: impl Into<String>, source: &str, target: &str, grey_box: bool) -> Self {
        let endpoint = endpoint.into();
        TranslatorProfile {
            kind: BackendKind::Mock,
            backend_id: format!("mock:{}", Path::new(&endpoint).file_name().map_or(endpoint.clone(), |n| n.to_string_lossy().into_owned())),
            endpoint,
            source: source.into(),
            target: target.into(),
            grey_box,
            rate_limit: 1000.0,
            timeout: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_limit > 0.0 && self.rate_limit.is_finite()) {
            return Err(Error::Config("rate_limit must be positive".into()));
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(Error::Config("timeout must be positive".into()));
        }
        if self.endpoint.is_empty() {
            return Err(Error::Config("endpoint is required".into()));
        }
        if self.source.is_empty() || self.target.is_empty() {
            return Err(Error::Config("source and target languages are required".into()));
        }
        Ok(())
    }

    /// Parses `key = value` lines. A relative mock endpoint is resolved
    /// against `base_dir`.
    pub fn parse(text: &str, source: &Path, base_dir: &Path) -> Result<Self> {
        let mut kind = None;
        let mut backend_id = None;
        let mut endpoint = None;
        let (mut src, mut tgt) = (None, None);
        let mut grey_box = false;
        let mut rate_limit = 10.0;
        let mut timeout = 30.0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, i + 1, "expected key = value"))?;
            let (k, v) = (k.trim(), v.trim().to_string());
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(source, i + 1, format!("{k} must be a number")))
            };
            match k {
                "kind" => {
                    kind = Some(match v.as_str() {
                        "mock" => BackendKind::Mock,
                        "remote" => BackendKind::Remote,
                        _ => return Err(Error::parse(source, i + 1, "kind must be mock or remote")),
                    })
                }
                "backend_id" => backend_id = Some(v),
                "endpoint" => endpoint = Some(v),
                "source" => src = Some(v),
                "target" => tgt = Some(v),
                "capabilities" => {
                    grey_box = false;
                    for cap in v.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                        match cap {
                            "black-box" => {}
                            "grey-box" | "gray-box" => grey_box = true,
                            _ => return Err(Error::parse(source, i + 1, format!("unknown capability {cap:?}"))),
                        }
                    }
                }
                "rate_limit" => rate_limit = num(&v)?,
                "timeout" => timeout = num(&v)?,
                _ => return Err(Error::parse(source, i + 1, format!("unknown key {k:?}"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::Config(format!("{}: kind is required", source.display())))?;
        let mut endpoint =
            endpoint.ok_or_else(|| Error::Config(format!("{}: endpoint is required", source.display())))?;
        if kind == BackendKind::Mock && Path::new(&endpoint).is_relative() {
            endpoint = base_dir.join(&endpoint).to_string_lossy().into_owned();
        }
        let profile = TranslatorProfile {
            backend_id: backend_id.unwrap_or_else(|| format!("{kind}:{endpoint}")),
            kind,
            endpoint,
            source: src.unwrap_or_default(),
            target: tgt.unwrap_or_default(),
            grey_box,
            rate_limit,
            timeout,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Self::parse(&text, path, &base)
    }

    pub fn build_backend(&self) -> Result<Box<dyn Backend>> {
        Ok(match self.kind {
            BackendKind::Mock => {
                let config = MockConfig::load(Path::new(&self.endpoint))?;
                Box::new(MockBackend::new(
                    self.backend_id.clone(),
                    config,
                    LanguageProfile::for_tag(&self.target),
                ))
            }
            BackendKind::Remote => Box::new(RemoteBackend::new(
                self.backend_id.clone(),
                self.endpoint.clone(),
                Duration::from_secs_f64(self.timeout),
            )),
        })
    }
}

pub const MAX_RETRIES: usize = 3;
pub const DEFAULT_BACKOFF: Duration = Duration::from_millis(250);

/// Shareable across threads; the cache and rate limiter are process-wide for
/// the client.
pub struct TranslatorClient {
    profile: TranslatorProfile,
    backend: Box<dyn Backend>,
    cache: Arc<TranslationCache>,
    limiter: RateLimiter,
    clock: Arc<dyn Clock>,
    backoff: Duration,
    backend_calls: AtomicUsize,
    cache_hits: AtomicUsize,
}

impl TranslatorClient {
    pub fn new(
        profile: TranslatorProfile,
        backend: Box<dyn Backend>,
        cache: Arc<TranslationCache>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self> {
        profile.validate()?;
        Ok(TranslatorClient {
            limiter: RateLimiter::new(profile.rate_limit),
            profile,
            backend,
            cache,
            clock,
            backoff: DEFAULT_BACKOFF,
            backend_calls: AtomicUsize::new(0),
            cache_hits: AtomicUsize::new(0),
        })
    }

    /// Builds the profile's backend and uses the system clock.
    pub fn from_profile(profile: TranslatorProfile, cache: Arc<TranslationCache>) -> Result<Self> {
        let backend = profile.build_backend()?;
        Self::new(profile, backend, cache, Arc::new(SystemClock::default()))
    }

    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn profile(&self) -> &TranslatorProfile {
        &self.profile
    }

    pub fn backend_calls(&self) -> usize {
        self.backend_calls.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> usize {
        self.cache_hits.load(Ordering::Relaxed)
    }

    pub fn translate(&self, text: &str) -> Result<TranslationRecord> {
        if text.trim().is_empty() {
            return Err(Error::InvalidInput("cannot translate empty text".into()));
        }
        let p = &self.profile;
        if let Some(hit) = self.cache.get(self.backend.id(), &p.source, &p.target, text) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(hit);
        }
        let mut attempt = 0;
        let raw = loop {
            self.limiter.acquire(self.clock.as_ref());
            self.backend_calls.fetch_add(1, Ordering::Relaxed);
            match self.backend.translate(text, &p.source, &p.target) {
                Ok(raw) => break raw,
                Err(TranslateError::Transient(msg)) if attempt < MAX_RETRIES => {
                    let wait = self.backoff * 2u32.pow(attempt as u32);
                    log::warn!("transient failure ({msg}); retry {} in {wait:?}", attempt + 1);
                    self.clock.sleep(wait);
                    attempt += 1;
                }
                Err(e) => return Err(e.into()),
            }
        };
        if raw.text.trim().is_empty() {
            return Err(TranslateError::Malformed("empty translation".into()).into());
        }
        let probability = match (p.grey_box, raw.probability) {
            (true, None) => {
                return Err(TranslateError::Malformed("grey-box backend returned no probability".into()).into())
            }
            (true, Some(prob)) => Some(prob),
            (false, _) => None,
        };
        let record = TranslationRecord {
            input: text.to_string(),
            output: raw.text,
            probability,
            timestamp: self.clock.unix_seconds(),
            backend_id: self.backend.id().to_string(),
            source: p.source.clone(),
            target: p.target.clone(),
        };
        self.cache.insert(record)
    }
}
