//! Minimal JSON-over-HTTP client for external strategy endpoints.

use std::time::Duration;

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct HttpEndpoint {
    url: String,
    agent: ureq::Agent,
}

impl HttpEndpoint {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        Self { url: url.into(), agent }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn post(&self, body: &Value) -> Result<Value> {
        let resp = self
            .agent
            .post(&self.url)
            .send_json(body.clone())
            .map_err(|e| Error::Endpoint(format!("{}: {e}", self.url)))?;
        resp.into_json::<Value>()
            .map_err(|e| Error::Endpoint(format!("{}: invalid JSON response: {e}", self.url)))
    }

    /// Text-in/text-out contract: `{"input"}` to `{"output"}`.
    pub fn transform(&self, input: &str) -> Result<String> {
        let v = self.post(&json!({ "input": input }))?;
        v.get("output")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::Endpoint(format!("{}: response lacks string field `output`", self.url)))
    }

    /// Scoring contract: `{"query", "evidence"}` to `{"score"}`.
    pub fn score(&self, query: &str, evidence: &str) -> Result<f64> {
        let v = self.post(&json!({ "query": query, "evidence": evidence }))?;
        let s = v
            .get("score")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Endpoint(format!("{}: response lacks numeric field `score`", self.url)))?;
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Endpoint(format!("{}: score {s} outside [0, 1]", self.url)));
        }
        Ok(s)
    }
}
