//! Chat client with live, fixture-replay and capture modes.
//!
//! Fixtures are a directory of JSON files keyed by the SHA-256 digest of the
//! prompt, so a recorded conversation replays byte-for-byte. In fixture mode
//! a miss is a hard error, never a silent fallback to the network.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ChatError {
    #[error("chat endpoint not configured: set {0}")]
    NotConfigured(&'static str),
    #[error("network failure after {attempts} attempts: {message}")]
    Network { attempts: u32, message: String },
    #[error("malformed chat response: {0}")]
    BadResponse(String),
    #[error("fixture miss for prompt digest {digest} (prompt starts: {prompt_head:?})")]
    FixtureMiss { digest: String, prompt_head: String },
    #[error("fixture io: {0}")]
    FixtureIo(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderTag {
    Cloud,
    Edge,
    Fixture,
}

/// One prompt/response exchange with its observed latency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatExchange {
    pub prompt: String,
    pub response: String,
    pub latency_seconds: f64,
    pub provider_tag: ProviderTag,
}

pub fn prompt_digest(prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(prompt.as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .take(16)
        .collect()
}

/// Directory of recorded exchanges.
#[derive(Debug, Clone)]
pub struct FixtureStore {
    dir: PathBuf,
}

impl FixtureStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureStore { dir: dir.into() }
    }

    fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    pub fn lookup(&self, prompt: &str) -> Result<ChatExchange, ChatError> {
        let digest = prompt_digest(prompt);
        let path = self.path_for(&digest);
        if !path.exists() {
            return Err(ChatError::FixtureMiss {
                digest,
                prompt_head: prompt.chars().take(60).collect(),
            });
        }
        let text = std::fs::read_to_string(&path)?;
        let exchange: ChatExchange = serde_json::from_str(&text)
            .map_err(|e| ChatError::BadResponse(format!("{}: {e}", path.display())))?;
        Ok(exchange)
    }

    pub fn store(&self, exchange: &ChatExchange) -> Result<PathBuf, ChatError> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&prompt_digest(&exchange.prompt));
        std::fs::write(&path, serde_json::to_string_pretty(exchange).unwrap())?;
        Ok(path)
    }
}

/// Configuration for a live chat-completion endpoint.
#[derive(Debug, Clone)]
pub struct LiveChatClient {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
    pub max_attempts: u32,
}

pub const ENV_ENDPOINT: &str = "PERSONA_CHAT_ENDPOINT";
pub const ENV_API_KEY: &str = "PERSONA_CHAT_API_KEY";
pub const ENV_MODEL: &str = "PERSONA_CHAT_MODEL";

impl LiveChatClient {
    /// Reads endpoint/credentials/model from the environment.
    pub fn from_env() -> Result<Self, ChatError> {
        let endpoint =
            std::env::var(ENV_ENDPOINT).map_err(|_| ChatError::NotConfigured(ENV_ENDPOINT))?;
        let model = std::env::var(ENV_MODEL).unwrap_or_else(|_| "default".to_string());
        Ok(LiveChatClient {
            endpoint,
            api_key: std::env::var(ENV_API_KEY).ok(),
            model,
            max_attempts: 3,
        })
    }

    /// Sends one chat-completion request (message list body, first choice
    /// text out) with simple retry on transport errors.
    pub fn send(&self, prompt: &str) -> Result<ChatExchange, ChatError> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [
                {"role": "user", "content": prompt}
            ]
        });
        let started = Instant::now();
        let mut last_error = String::new();
        for attempt in 1..=self.max_attempts {
            let mut request = ureq::post(&self.endpoint).set("content-type", "application/json");
            if let Some(key) = &self.api_key {
                request = request.set("authorization", &format!("Bearer {key}"));
            }
            match request.send_json(body.clone()) {
                Ok(response) => {
                    let value: serde_json::Value = response
                        .into_json()
                        .map_err(|e| ChatError::BadResponse(e.to_string()))?;
                    let text = value["choices"][0]["message"]["content"]
                        .as_str()
                        .ok_or_else(|| {
                            ChatError::BadResponse(
                                "response lacks choices[0].message.content".to_string(),
                            )
                        })?
                        .to_string();
                    return Ok(ChatExchange {
                        prompt: prompt.to_string(),
                        response: text,
                        latency_seconds: started.elapsed().as_secs_f64(),
                        provider_tag: ProviderTag::Cloud,
                    });
                }
                Err(e) => {
                    last_error = e.to_string();
                    if attempt == self.max_attempts {
                        break;
                    }
                }
            }
        }
        Err(ChatError::Network {
            attempts: self.max_attempts,
            message: last_error,
        })
    }
}

/// The chat surface reflection talks to.
#[derive(Debug, Clone)]
pub enum ChatClient {
    Live(LiveChatClient),
    /// Replay only; a miss is an error.
    Fixture(FixtureStore),
    /// Live, recording every exchange for later replay.
    Capture {
        live: LiveChatClient,
        store: FixtureStore,
    },
}

impl ChatClient {
    pub fn chat(&self, prompt: &str) -> Result<ChatExchange, ChatError> {
        match self {
            ChatClient::Live(live) => live.send(prompt),
            ChatClient::Fixture(store) => store.lookup(prompt),
            ChatClient::Capture { live, store } => {
                let exchange = live.send(prompt)?;
                store.store(&exchange)?;
                Ok(exchange)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_round_trip_and_miss() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::new(dir.path());
        let exchange = ChatExchange {
            prompt: "hello there".into(),
            response: "general reply".into(),
            latency_seconds: 1.25,
            provider_tag: ProviderTag::Fixture,
        };
        store.store(&exchange).unwrap();
        let got = store.lookup("hello there").unwrap();
        assert_eq!(got, exchange);
        let err = store.lookup("different prompt").unwrap_err();
        assert!(matches!(err, ChatError::FixtureMiss { .. }));
    }

    #[test]
    fn fixture_mode_never_contacts_the_network() {
        let dir = tempfile::tempdir().unwrap();
        let client = ChatClient::Fixture(FixtureStore::new(dir.path()));
        let err = client.chat("unrecorded").unwrap_err();
        assert!(matches!(err, ChatError::FixtureMiss { .. }));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(prompt_digest("abc"), prompt_digest("abc"));
        assert_ne!(prompt_digest("abc"), prompt_digest("abd"));
    }
}
