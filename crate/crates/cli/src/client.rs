//! HTTP chat-completion client and replay-fixture loading.
//!
//! The wire convention is a POST of `{"model":…,"messages":[{role,content}…]}`
//! answered by `{"content":…}`. The assistant message is stripped from the
//! conversation before sending. Rate limits and server errors surface as
//! retryable transport errors; malformed responses and other client errors
//! are permanent.

use std::path::Path;
use std::time::Duration;

use proplang_core::{ClientError, EvalItem, Message, ModelClient, ReplayClient};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<&'a Message>,
}

#[derive(Deserialize)]
struct ChatResponse {
    content: String,
}

pub struct HttpChatClient {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
}

impl HttpChatClient {
    /// `api_key_env` names the environment variable carrying the bearer
    /// credential; an unset variable means unauthenticated requests.
    pub fn new(endpoint: &str, model: &str, api_key_env: &str) -> Result<Self, CliError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| CliError::Transport(format!("building http client: {e}")))?;
        Ok(HttpChatClient {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key: std::env::var(api_key_env).ok(),
            http,
        })
    }
}

impl ModelClient for HttpChatClient {
    fn complete(&self, item: &EvalItem) -> Result<String, ClientError> {
        let request = ChatRequest {
            model: &self.model,
            messages: item.record.prompt_messages().collect(),
        };
        let mut builder = self.http.post(&self.endpoint).json(&request);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = builder
            .send()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = response.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(ClientError::Transport(format!("status {status}")));
        }
        if !status.is_success() {
            return Err(ClientError::Permanent(format!("status {status}")));
        }
        let parsed: ChatResponse = response
            .json()
            .map_err(|e| ClientError::Permanent(format!("bad response body: {e}")))?;
        Ok(parsed.content)
    }
}

/// Load a `{"id":…,"response":…}` line-delimited replay fixture.
pub fn load_replay(path: &Path) -> Result<ReplayClient, CliError> {
    let text = crate::read_to_string(path)?;
    ReplayClient::parse(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}
