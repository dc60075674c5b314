//! Read-only repository access through the `git` command line.
//!
//! History is loaded once per command into an immutable
//! [`CommitGraph`](crate::versioner::CommitGraph) snapshot by parsing the
//! stable text output of `rev-list`, `tag --list`, `rev-parse`, and
//! `for-each-ref`. No Git library is linked; the tool never mutates the
//! repository.

use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::versioner::{CommitGraph, CommitRef, TagName, VersionerError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GitError {
    #[error("`{dir}` is not inside a Git repository")]
    NotARepository { dir: String },
    #[error("git {args} failed: {detail}")]
    Command { args: String, detail: String },
    #[error("could not parse git output: {reason}")]
    Parse { reason: String },
    #[error(transparent)]
    Version(#[from] VersionerError),
}

impl GitError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            GitError::NotARepository { .. } => "NotARepository",
            GitError::Command { .. } => "GitCommandFailed",
            GitError::Parse { .. } => "GitParseError",
            GitError::Version(inner) => inner.name(),
        }
    }
}

/// A discovered repository working tree.
#[derive(Debug, Clone)]
pub struct GitRepo {
    root: PathBuf,
}

fn run_git(dir: &Path, args: &[&str]) -> Result<String, GitError> {
    let output = Command::new("git")
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| GitError::Command {
            args: args.join(" "),
            detail: e.to_string(),
        })?;
    if !output.status.success() {
        return Err(GitError::Command {
            args: args.join(" "),
            detail: String::from_utf8_lossy(&output.stderr).trim().to_string(),
        });
    }
    String::from_utf8(output.stdout).map_err(|_| GitError::Parse {
        reason: "git output is not UTF-8".to_string(),
    })
}

impl GitRepo {
    /// Discovers the repository containing `dir`.
    pub fn open(dir: &Path) -> Result<GitRepo, GitError> {
        let root = run_git(dir, &["rev-parse", "--show-toplevel"]).map_err(|_| {
            GitError::NotARepository {
                dir: dir.display().to_string(),
            }
        })?;
        Ok(GitRepo {
            root: PathBuf::from(root.trim()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn git(&self, args: &[&str]) -> Result<String, GitError> {
        run_git(&self.root, args)
    }

    /// The commit HEAD points at.
    pub fn head(&self) -> Result<CommitRef, GitError> {
        let sha = self.git(&["rev-parse", "HEAD"])?;
        Ok(CommitRef::parse(sha.trim())?)
    }

    /// The branch HEAD is on, or `None` when detached.
    pub fn head_branch(&self) -> Result<Option<String>, GitError> {
        let name = self.git(&["rev-parse", "--abbrev-ref", "HEAD"])?;
        let name = name.trim();
        if name == "HEAD" {
            Ok(None)
        } else {
            Ok(Some(name.to_string()))
        }
    }

    /// Committer timestamp of a commit, in UTC.
    pub fn commit_time(&self, commit: &CommitRef) -> Result<DateTime<Utc>, GitError> {
        let out = self.git(&["show", "-s", "--format=%ct", commit.sha()])?;
        let secs: i64 = out.trim().parse().map_err(|_| GitError::Parse {
            reason: format!("`{}` is not an epoch timestamp", out.trim()),
        })?;
        DateTime::from_timestamp(secs, 0).ok_or_else(|| GitError::Parse {
            reason: format!("timestamp {secs} out of range"),
        })
    }

    /// Snapshots the full history: every commit reachable from any ref,
    /// all version tags (non-version tags are ignored), and all local
    /// branch heads.
    pub fn load_graph(&self) -> Result<CommitGraph, GitError> {
        let mut builder = CommitGraph::builder();

        let rev_list = self.git(&["rev-list", "--parents", "--all", "HEAD"])?;
        for line in rev_list.lines() {
            let mut fields = line.split_whitespace();
            let Some(sha) = fields.next() else { continue };
            let parents: Vec<&str> = fields.collect();
            builder = builder.commit(sha, &parents)?;
        }

        let tag_list = self.git(&["tag", "--list"])?;
        for line in tag_list.lines() {
            let text = line.trim();
            if text.is_empty() || TagName::parse(text).is_err() {
                continue;
            }
            // ^{commit} peels annotated tags to the tagged commit
            let target = self.git(&["rev-parse", &format!("{text}^{{commit}}")])?;
            builder = builder.tag(text, target.trim())?;
        }

        let refs = self.git(&[
            "for-each-ref",
            "--format=%(refname:short) %(objectname)",
            "refs/heads",
        ])?;
        for line in refs.lines() {
            let Some((branch, sha)) = line.trim().rsplit_once(' ') else {
                continue;
            };
            builder = builder.head(branch, sha)?;
        }

        Ok(builder.build()?)
    }
}
