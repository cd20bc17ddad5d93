//! HTTP JSON translation backends.

use std::time::Duration;

use serde_json::{json, Value};

use super::{Backend, RawTranslation, TranslateError};

pub const API_KEY_ENV: &str = "TRANSCHECK_API_KEY";

/// Maps between the client's request/response shape and a vendor's wire
/// format.
pub trait RemoteAdapter: Send + Sync {
    fn request_body(&self, text: &str, source: &str, target: &str) -> Value;
    fn parse_response(&self, body: Value) -> Result<RawTranslation, TranslateError>;
}

/// `{text, source, target}` in, `{translation, probability?}` out.
#[derive(Debug, Clone, Copy, Default)]
pub struct GenericJson;

impl RemoteAdapter for GenericJson {
    fn request_body(&self, text: &str, source: &str, target: &str) -> Value {
        json!({ "text": text, "source": source, "target": target })
    }

    fn parse_response(&self, body: Value) -> Result<RawTranslation, TranslateError> {
        let text = body
            .get("translation")
            .and_then(Value::as_str)
            .ok_or_else(|| TranslateError::Malformed("response lacks a translation string".into()))?
            .to_string();
        let probability = match body.get("probability") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_f64().filter(|p| (0.0..=1.0).contains(p)).ok_or_else(|| {
                TranslateError::Malformed(format!("probability {v} is not a number in [0, 1]"))
            })?),
        };
        Ok(RawTranslation { text, probability })
    }
}

pub struct RemoteBackend {
    id: String,
    endpoint: String,
    agent: ureq::Agent,
    api_key: Option<String>,
    adapter: Box<dyn RemoteAdapter>,
}

impl RemoteBackend {
    pub fn new(id: impl Into<String>, endpoint: impl Into<String>, timeout: Duration) -> Self {
        RemoteBackend {
            id: id.into(),
            endpoint: endpoint.into(),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
            adapter: Box::new(GenericJson),
        }
    }

    pub fn with_adapter(mut self, adapter: Box<dyn RemoteAdapter>) -> Self {
        self.adapter = adapter;
        self
    }

    pub fn with_api_key(mut self, key: Option<String>) -> Self {
        self.api_key = key;
        self
    }
}

fn classify(err: ureq::Error) -> TranslateError {
    match err {
        ureq::Error::Status(code, resp) => {
            let detail = resp.into_string().unwrap_or_default();
            if code == 429 || code >= 500 {
                TranslateError::Transient(format!("HTTP {code}: {detail}"))
            } else {
                TranslateError::Permanent(format!("HTTP {code}: {detail}"))
            }
        }
        ureq::Error::Transport(t) => TranslateError::Transient(t.to_string()),
    }
}

impl Backend for RemoteBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn translate(&self, text: &str, source: &str, target: &str) -> Result<RawTranslation, TranslateError> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let resp = req
            .send_json(self.adapter.request_body(text, source, target))
            .map_err(classify)?;
        let body: Value = resp
            .into_json()
            .map_err(|e| TranslateError::Malformed(format!("response is not JSON: {e}")))?;
        self.adapter.parse_response(body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    /// Serves one canned HTTP response per connection and returns the
    /// request bodies it saw.
    fn serve(responses: Vec<(u16, &'static str)>) -> (String, std::thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/translate", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut bodies = Vec::new();
            for (status, body) in responses {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                bodies.push(String::from_utf8(buf).unwrap());
                let mut stream = stream;
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
            }
            bodies
        });
        (url, handle)
    }

    #[test]
    fn generic_json_round_trip() {
        let (url, handle) = serve(vec![(200, r#"{"translation":"x y","probability":0.5}"#)]);
        let b = RemoteBackend::new("remote", url, Duration::from_secs(5)).with_api_key(None);
        let out = b.translate("a b", "en", "de").unwrap();
        assert_eq!(out.text, "x y");
        assert_eq!(out.probability, Some(0.5));
        let bodies = handle.join().unwrap();
        let sent: Value = serde_json::from_str(&bodies[0]).unwrap();
        assert_eq!(sent, json!({"text": "a b", "source": "en", "target": "de"}));
    }

    #[test]
    fn status_classification() {
        let (url, handle) = serve(vec![(503, "{}"), (400, "{}"), (200, r#"{"nope":1}"#)]);
        let b = RemoteBackend::new("remote", url, Duration::from_secs(5)).with_api_key(None);
        assert!(matches!(b.translate("a", "en", "de"), Err(TranslateError::Transient(_))));
        assert!(matches!(b.translate("a", "en", "de"), Err(TranslateError::Permanent(_))));
        assert!(matches!(b.translate("a", "en", "de"), Err(TranslateError::Malformed(_))));
        handle.join().unwrap();
    }

    #[test]
    fn unreachable_is_transient() {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let b = RemoteBackend::new("remote", format!("http://127.0.0.1:{port}/"), Duration::from_secs(2));
        assert!(matches!(b.translate("a", "en", "de"), Err(TranslateError::Transient(_))));
    }
}
