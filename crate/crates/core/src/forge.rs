//! Forge (tag and release) clients.
//!
//! [`ForgeHandle`] abstracts the hosting service: an in-memory fake backs
//! every test, and a REST mapping covers the GitHub and GitLab APIs. The
//! REST endpoint paths live in pure request builders so they are testable
//! without a network; transport is synchronous with a 30 s default
//! timeout. Create operations are deliberately not idempotent: repeating
//! one is an error, so callers must plan before applying.
//!
//! Authentication tokens come from `HOG_FORGE_TOKEN` and are never
//! printed or logged.

use std::fmt;
use std::sync::Mutex;
use std::time::Duration;

use serde_json::json;
use thiserror::Error;

use crate::versioner::{CommitRef, TagName};

/// Environment variable carrying the forge authentication token.
pub const FORGE_TOKEN_VAR: &str = "HOG_FORGE_TOKEN";

const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// An authentication token whose value is redacted from all formatting.
#[derive(Clone)]
pub struct AuthToken(String);

impl AuthToken {
    pub fn new(secret: impl Into<String>) -> AuthToken {
        AuthToken(secret.into())
    }

    fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for AuthToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AuthToken(***)")
    }
}

impl fmt::Display for AuthToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("***")
    }
}

/// A release attached to an existing tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Release {
    pub tag: TagName,
    pub title: String,
    pub notes: String,
    pub draft: bool,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ForgeError {
    #[error("forge unreachable: {reason}")]
    Unreachable { reason: String },
    #[error("forge authentication failed")]
    AuthFailed,
    #[error("tag {tag} already exists on the forge")]
    TagCollision { tag: TagName },
    #[error("tag {tag} does not exist on the forge")]
    MissingTag { tag: TagName },
    #[error("tag {tag} already has a release")]
    DuplicateRelease { tag: TagName },
    #[error("unexpected forge response: {reason}")]
    Protocol { reason: String },
}

impl ForgeError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            ForgeError::Unreachable { .. } => "ForgeUnreachable",
            ForgeError::AuthFailed => "AuthFailed",
            ForgeError::TagCollision { .. } => "TagCollision",
            ForgeError::MissingTag { .. } => "MissingTag",
            ForgeError::DuplicateRelease { .. } => "DuplicateRelease",
            ForgeError::Protocol { .. } => "ProtocolError",
        }
    }
}

#[derive(Debug, Default)]
struct FakeState {
    unreachable: bool,
    /// raw tag text -> target commit sha
    tags: Vec<(String, String)>,
    /// tag text -> release
    releases: Vec<(String, Release)>,
}

/// In-process forge with the same observable semantics as the REST
/// clients; sequentially consistent per handle.
#[derive(Debug, Default)]
pub struct FakeForge {
    state: Mutex<FakeState>,
}

impl FakeForge {
    pub fn new() -> FakeForge {
        FakeForge::default()
    }

    /// A fake that fails every operation, for exercising error paths.
    pub fn new_unreachable() -> FakeForge {
        FakeForge {
            state: Mutex::new(FakeState {
                unreachable: true,
                ..FakeState::default()
            }),
        }
    }

    /// Seeds a pre-existing tag; the text need not be a version tag.
    pub fn seed_tag(&self, text: &str, sha: &str) {
        let mut state = self.state.lock().unwrap();
        state.tags.push((text.to_string(), sha.to_string()));
    }

    /// Commit sha a tag points at, if the tag exists.
    pub fn tag_target(&self, text: &str) -> Option<String> {
        let state = self.state.lock().unwrap();
        state
            .tags
            .iter()
            .find(|(t, _)| t == text)
            .map(|(_, sha)| sha.clone())
    }

    /// All tags as `(text, sha)` pairs, for state assertions in tests.
    pub fn tags_snapshot(&self) -> Vec<(String, String)> {
        self.state.lock().unwrap().tags.clone()
    }

    /// Tag texts that carry a release.
    pub fn releases_snapshot(&self) -> Vec<String> {
        self.state
            .lock()
            .unwrap()
            .releases
            .iter()
            .map(|(t, _)| t.clone())
            .collect()
    }

    fn check_reachable(state: &FakeState) -> Result<(), ForgeError> {
        if state.unreachable {
            return Err(ForgeError::Unreachable {
                reason: "fake forge is configured unreachable".to_string(),
            });
        }
        Ok(())
    }

    fn list_tags(&self) -> Result<Vec<TagName>, ForgeError> {
        let state = self.state.lock().unwrap();
        Self::check_reachable(&state)?;
        Ok(state
            .tags
            .iter()
            .filter_map(|(text, _)| TagName::parse(text).ok())
            .collect())
    }

    fn create_tag(&self, tag: &TagName, commit: &CommitRef) -> Result<(), ForgeError> {
        let mut state = self.state.lock().unwrap();
        Self::check_reachable(&state)?;
        let text = tag.to_string();
        if state.tags.iter().any(|(t, _)| *t == text) {
            return Err(ForgeError::TagCollision { tag: *tag });
        }
        state.tags.push((text, commit.sha().to_string()));
        Ok(())
    }

    fn create_release(&self, release: &Release) -> Result<(), ForgeError> {
        let mut state = self.state.lock().unwrap();
        Self::check_reachable(&state)?;
        let text = release.tag.to_string();
        if !state.tags.iter().any(|(t, _)| *t == text) {
            return Err(ForgeError::MissingTag { tag: release.tag });
        }
        if state.releases.iter().any(|(t, _)| *t == text) {
            return Err(ForgeError::DuplicateRelease { tag: release.tag });
        }
        state.releases.push((text, release.clone()));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestKind {
    Github,
    Gitlab,
}

impl RestKind {
    fn default_base_url(&self) -> &'static str {
        match self {
            RestKind::Github => "https://api.github.com",
            RestKind::Gitlab => "https://gitlab.com/api/v4",
        }
    }
}

/// One REST call: method, full URL, and optional JSON body. Built by
/// pure functions so the endpoint mapping is testable offline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiRequest {
    pub method: &'static str,
    pub url: String,
    pub body: Option<serde_json::Value>,
}

pub fn list_tags_request(kind: RestKind, base_url: &str, repo: &str) -> ApiRequest {
    let url = match kind {
        RestKind::Github => format!("{base_url}/repos/{repo}/tags?per_page=100"),
        RestKind::Gitlab => format!("{base_url}/projects/{repo}/repository/tags?per_page=100"),
    };
    ApiRequest {
        method: "GET",
        url,
        body: None,
    }
}

pub fn create_tag_request(
    kind: RestKind,
    base_url: &str,
    repo: &str,
    tag: &TagName,
    commit: &CommitRef,
) -> ApiRequest {
    match kind {
        RestKind::Github => ApiRequest {
            method: "POST",
            url: format!("{base_url}/repos/{repo}/git/refs"),
            body: Some(json!({
                "ref": format!("refs/tags/{tag}"),
                "sha": commit.sha(),
            })),
        },
        RestKind::Gitlab => ApiRequest {
            method: "POST",
            url: format!("{base_url}/projects/{repo}/repository/tags"),
            body: Some(json!({
                "tag_name": tag.to_string(),
                "ref": commit.sha(),
            })),
        },
    }
}

pub fn create_release_request(
    kind: RestKind,
    base_url: &str,
    repo: &str,
    release: &Release,
) -> ApiRequest {
    match kind {
        RestKind::Github => ApiRequest {
            method: "POST",
            url: format!("{base_url}/repos/{repo}/releases"),
            body: Some(json!({
                "tag_name": release.tag.to_string(),
                "name": release.title,
                "body": release.notes,
                "draft": release.draft,
            })),
        },
        RestKind::Gitlab => ApiRequest {
            method: "POST",
            url: format!("{base_url}/projects/{repo}/releases"),
            body: Some(json!({
                "tag_name": release.tag.to_string(),
                "name": release.title,
                "description": release.notes,
            })),
        },
    }
}

/// REST client for a hosted forge.
#[derive(Debug)]
pub struct RestForge {
    kind: RestKind,
    base_url: String,
    /// `owner/name` for GitHub, project id or URL-encoded path for GitLab.
    repo: String,
    token: Option<AuthToken>,
    timeout: Duration,
}

impl RestForge {
    pub fn new(kind: RestKind, base_url: Option<String>, repo: String) -> RestForge {
        RestForge {
            kind,
            base_url: base_url.unwrap_or_else(|| kind.default_base_url().to_string()),
            repo,
            token: None,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_token(mut self, token: AuthToken) -> RestForge {
        self.token = Some(token);
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> RestForge {
        self.timeout = timeout;
        self
    }

    fn execute(&self, request: &ApiRequest) -> Result<serde_json::Value, ForgeError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .user_agent("hog")
            .build()
            .map_err(|e| ForgeError::Unreachable {
                reason: e.to_string(),
            })?;
        let mut builder = match request.method {
            "GET" => client.get(&request.url),
            "POST" => client.post(&request.url),
            other => {
                return Err(ForgeError::Protocol {
                    reason: format!("unsupported method {other}"),
                })
            }
        };
        if let Some(token) = &self.token {
            builder = match self.kind {
                RestKind::Github => builder.bearer_auth(token.expose()),
                RestKind::Gitlab => builder.header("PRIVATE-TOKEN", token.expose()),
            };
        }
        if let Some(body) = &request.body {
            builder = builder.json(body);
        }
        let response = builder.send().map_err(|e| ForgeError::Unreachable {
            // reqwest errors can embed the URL but never the token
            reason: e.to_string(),
        })?;
        let status = response.status();
        let body: serde_json::Value = response.json().unwrap_or(serde_json::Value::Null);
        match status.as_u16() {
            200..=299 => Ok(body),
            401 | 403 => Err(ForgeError::AuthFailed),
            code => Err(ForgeError::Protocol {
                reason: format!("HTTP {code}"),
            }),
        }
    }

    fn list_tags(&self) -> Result<Vec<TagName>, ForgeError> {
        let request = list_tags_request(self.kind, &self.base_url, &self.repo);
        let body = self.execute(&request)?;
        let items = body.as_array().ok_or_else(|| ForgeError::Protocol {
            reason: "expected a JSON array of tags".to_string(),
        })?;
        Ok(items
            .iter()
            .filter_map(|item| item.get("name").and_then(|n| n.as_str()))
            .filter_map(|name| TagName::parse(name).ok())
            .collect())
    }

    fn create_tag(&self, tag: &TagName, commit: &CommitRef) -> Result<(), ForgeError> {
        if self.list_tags()?.contains(tag) {
            return Err(ForgeError::TagCollision { tag: *tag });
        }
        let request = create_tag_request(self.kind, &self.base_url, &self.repo, tag, commit);
        self.execute(&request).map(|_| ()).map_err(|err| match err {
            ForgeError::Protocol { .. } => ForgeError::TagCollision { tag: *tag },
            other => other,
        })
    }

    fn create_release(&self, release: &Release) -> Result<(), ForgeError> {
        if !self.list_tags()?.contains(&release.tag) {
            return Err(ForgeError::MissingTag { tag: release.tag });
        }
        let request = create_release_request(self.kind, &self.base_url, &self.repo, release);
        self.execute(&request).map(|_| ()).map_err(|err| match err {
            ForgeError::Protocol { .. } => ForgeError::DuplicateRelease { tag: release.tag },
            other => other,
        })
    }
}

/// A connection to one forge, fake or hosted.
#[derive(Debug)]
pub enum ForgeHandle {
    Fake(FakeForge),
    Rest(RestForge),
}

impl ForgeHandle {
    pub fn fake() -> ForgeHandle {
        ForgeHandle::Fake(FakeForge::new())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ForgeHandle::Fake(_) => "fake",
            ForgeHandle::Rest(rest) => match rest.kind {
                RestKind::Github => "github",
                RestKind::Gitlab => "gitlab",
            },
        }
    }

    /// All version tags on the forge; non-version tags are filtered out.
    pub fn list_tags(&self) -> Result<Vec<TagName>, ForgeError> {
        match self {
            ForgeHandle::Fake(fake) => fake.list_tags(),
            ForgeHandle::Rest(rest) => rest.list_tags(),
        }
    }

    /// Creates `tag` pointing at `commit`. Not idempotent: an existing
    /// tag is a collision.
    pub fn create_tag(&self, tag: &TagName, commit: &CommitRef) -> Result<(), ForgeError> {
        match self {
            ForgeHandle::Fake(fake) => fake.create_tag(tag, commit),
            ForgeHandle::Rest(rest) => rest.create_tag(tag, commit),
        }
    }

    /// Records a release for an existing tag; at most one per tag.
    pub fn create_release(&self, release: &Release) -> Result<(), ForgeError> {
        match self {
            ForgeHandle::Fake(fake) => fake.create_release(release),
            ForgeHandle::Rest(rest) => rest.create_release(release),
        }
    }
}
