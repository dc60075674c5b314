//! Version computation and tag planning over Git history.
//!
//! Versions follow the `M.m.p` scheme carried by `vM.m.p` tags. The version
//! at a commit is the lexicographic maximum over all version tags on its
//! ancestors (inclusive), which is merge-order independent. Tag planning
//! bumps the patch number by default; release branches (`release/M.m`)
//! accept only patch bumps, so hotfixes on past releases never disturb the
//! main line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Largest major/minor value representable in the packed version register.
pub const MAX_MAJOR: u32 = 255;
/// Largest minor value representable in the packed version register.
pub const MAX_MINOR: u32 = 255;
/// Largest patch value representable in the packed version register.
pub const MAX_PATCH: u32 = 65535;

/// A semantic version `M.m.p`, ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VersionTriple {
    pub major: u32,
    pub minor: u32,
    pub patch: u32,
}

impl VersionTriple {
    pub const ZERO: VersionTriple = VersionTriple {
        major: 0,
        minor: 0,
        patch: 0,
    };

    pub fn new(major: u32, minor: u32, patch: u32) -> Self {
        VersionTriple {
            major,
            minor,
            patch,
        }
    }

    /// True when every component fits the register packing bounds.
    pub fn fits_packing(&self) -> bool {
        self.major <= MAX_MAJOR && self.minor <= MAX_MINOR && self.patch <= MAX_PATCH
    }
}

impl fmt::Display for VersionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)
    }
}

/// A version tag `vM.m.p`. The text form and the triple are in bijection
/// (components carry no leading zeros), so only the triple is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagName(pub VersionTriple);

impl TagName {
    pub fn parse(text: &str) -> Result<TagName, VersionerError> {
        parse_tag(text).map(TagName)
    }

    pub fn version(&self) -> VersionTriple {
        self.0
    }
}

impl fmt::Display for TagName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A commit identifier: the full 40-hex SHA plus its 32-bit truncation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommitRef {
    sha: String,
    sha32: u32,
}

impl CommitRef {
    /// Validates a 40-hex commit id (normalized to lowercase) and derives
    /// the 32-bit truncation.
    pub fn parse(text: &str) -> Result<CommitRef, VersionerError> {
        let sha32 = sha32_of(text)?;
        Ok(CommitRef {
            sha: text.to_ascii_lowercase(),
            sha32,
        })
    }

    pub fn sha(&self) -> &str {
        &self.sha
    }

    pub fn sha32(&self) -> u32 {
        self.sha32
    }
}

impl fmt::Display for CommitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sha)
    }
}

/// Integer value of the first 8 hex characters of a 40-hex commit id.
pub fn sha32_of(sha: &str) -> Result<u32, VersionerError> {
    if sha.len() != 40 || !sha.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(VersionerError::MalformedSha {
            text: sha.to_string(),
        });
    }
    u32::from_str_radix(&sha[..8], 16).map_err(|_| VersionerError::MalformedSha {
        text: sha.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bump {
    Patch,
    Minor,
    Major,
}

impl Bump {
    pub fn as_str(&self) -> &'static str {
        match self {
            Bump::Patch => "patch",
            Bump::Minor => "minor",
            Bump::Major => "major",
        }
    }

    pub fn parse(s: &str) -> Option<Bump> {
        match s {
            "patch" => Some(Bump::Patch),
            "minor" => Some(Bump::Minor),
            "major" => Some(Bump::Major),
            _ => None,
        }
    }
}

/// Branch classification under a [`ReleaseNamingConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchClass {
    Main,
    Develop,
    Release { major: u32, minor: u32 },
    Other,
}

/// Configurable branch-name patterns for classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseNamingConfig {
    pub main_branches: Vec<String>,
    pub develop_branches: Vec<String>,
    pub release_prefix: String,
}

impl Default for ReleaseNamingConfig {
    fn default() -> Self {
        ReleaseNamingConfig {
            main_branches: vec!["main".to_string(), "master".to_string()],
            develop_branches: vec!["develop".to_string()],
            release_prefix: "release/".to_string(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum VersionerError {
    #[error("`{text}` is not a version tag")]
    NotAVersionTag { text: String },
    #[error("version {version} exceeds the register packing bounds ({MAX_MAJOR}.{MAX_MINOR}.{MAX_PATCH})")]
    Overflow { version: VersionTriple },
    #[error("`{text}` is not a 40-character hex commit id")]
    MalformedSha { text: String },
    #[error("graph error: {reason}")]
    Graph { reason: String },
    #[error("tag {tag} already exists")]
    TagCollision { tag: TagName },
    #[error("release branch {major}.{minor} does not match base version {base}")]
    LineMismatch {
        major: u32,
        minor: u32,
        base: VersionTriple,
    },
    #[error("release branches accept only patch bumps, got {bump}")]
    BumpNotAllowed { bump: &'static str },
}

impl VersionerError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            VersionerError::NotAVersionTag { .. } => "NotAVersionTag",
            VersionerError::Overflow { .. } => "Overflow",
            VersionerError::MalformedSha { .. } => "MalformedSha",
            VersionerError::Graph { .. } => "GraphError",
            VersionerError::TagCollision { .. } => "TagCollision",
            VersionerError::LineMismatch { .. } => "LineMismatch",
            VersionerError::BumpNotAllowed { .. } => "BumpNotAllowed",
        }
    }
}

fn parse_component(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    // no leading zeros, except the single digit 0
    if s.len() > 1 && s.starts_with('0') {
        return None;
    }
    s.parse().ok()
}

/// Parses `vM.m.p` tag text. Anything else is [`VersionerError::NotAVersionTag`];
/// callers ignore such tags rather than failing version computation.
pub fn parse_tag(text: &str) -> Result<VersionTriple, VersionerError> {
    let not_a_tag = || VersionerError::NotAVersionTag {
        text: text.to_string(),
    };
    let rest = text.strip_prefix('v').ok_or_else(not_a_tag)?;
    let mut parts = rest.split('.');
    let major = parts.next().and_then(parse_component).ok_or_else(not_a_tag)?;
    let minor = parts.next().and_then(parse_component).ok_or_else(not_a_tag)?;
    let patch = parts.next().and_then(parse_component).ok_or_else(not_a_tag)?;
    if parts.next().is_some() {
        return Err(not_a_tag());
    }
    Ok(VersionTriple::new(major, minor, patch))
}

/// Computes the successor version for a bump kind. Patch increments `p`;
/// minor resets `p`; major resets `m` and `p`. Errors when the result
/// exceeds the register packing bounds.
pub fn next_version(current: VersionTriple, bump: Bump) -> Result<VersionTriple, VersionerError> {
    let next = match bump {
        Bump::Patch => VersionTriple::new(current.major, current.minor, current.patch + 1),
        Bump::Minor => VersionTriple::new(current.major, current.minor + 1, 0),
        Bump::Major => VersionTriple::new(current.major + 1, 0, 0),
    };
    if !next.fits_packing() {
        return Err(VersionerError::Overflow { version: next });
    }
    Ok(next)
}

/// Matches a branch name against the configured patterns. Unrecognized
/// names fall back to [`BranchClass::Other`].
pub fn classify_branch(name: &str, naming: &ReleaseNamingConfig) -> BranchClass {
    if naming.main_branches.iter().any(|b| b == name) {
        return BranchClass::Main;
    }
    if naming.develop_branches.iter().any(|b| b == name) {
        return BranchClass::Develop;
    }
    if let Some(rest) = name.strip_prefix(&naming.release_prefix) {
        if let Some((major, minor)) = rest.split_once('.') {
            if let (Some(major), Some(minor)) = (parse_component(major), parse_component(minor)) {
                return BranchClass::Release { major, minor };
            }
        }
    }
    BranchClass::Other
}

/// An immutable snapshot of repository history: commits, parent edges,
/// version tags, and branch heads. Built through [`CommitGraphBuilder`],
/// which checks referential integrity and acyclicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitGraph {
    nodes: HashMap<String, CommitRef>,
    parents: HashMap<String, Vec<String>>,
    tags: BTreeMap<TagName, String>,
    heads: BTreeMap<String, String>,
}

impl CommitGraph {
    pub fn builder() -> CommitGraphBuilder {
        CommitGraphBuilder::default()
    }

    pub fn contains(&self, commit: &CommitRef) -> bool {
        self.nodes.contains_key(commit.sha())
    }

    pub fn commit(&self, sha: &str) -> Option<&CommitRef> {
        self.nodes.get(sha)
    }

    pub fn commits(&self) -> impl Iterator<Item = &CommitRef> {
        self.nodes.values()
    }

    pub fn tags(&self) -> &BTreeMap<TagName, String> {
        &self.tags
    }

    pub fn heads(&self) -> &BTreeMap<String, String> {
        &self.heads
    }

    pub fn has_tag(&self, tag: &TagName) -> bool {
        self.tags.contains_key(tag)
    }

    /// Head commit of the first branch whose name classifies as `class`
    /// (branch names are scanned in sorted order).
    pub fn head_of(&self, class: &BranchClass, naming: &ReleaseNamingConfig) -> Option<&CommitRef> {
        self.heads
            .iter()
            .find(|(name, _)| classify_branch(name, naming) == *class)
            .and_then(|(_, sha)| self.nodes.get(sha))
    }

    /// Adds a tag to the snapshot, pointing at an existing commit.
    pub fn add_tag(&mut self, tag: TagName, commit: &CommitRef) -> Result<(), VersionerError> {
        if !self.contains(commit) {
            return Err(VersionerError::Graph {
                reason: format!("tag target {commit} is not in the graph"),
            });
        }
        if self.tags.contains_key(&tag) {
            return Err(VersionerError::TagCollision { tag });
        }
        self.tags.insert(tag, commit.sha().to_string());
        Ok(())
    }

    fn ancestor_set(&self, head: &str) -> HashSet<&str> {
        let mut visited: HashSet<&str> = HashSet::new();
        let mut stack = vec![head];
        while let Some(sha) = stack.pop() {
            let Some((key, _)) = self.nodes.get_key_value(sha) else {
                continue;
            };
            if !visited.insert(key) {
                continue;
            }
            if let Some(parents) = self.parents.get(key.as_str()) {
                stack.extend(parents.iter().map(String::as_str));
            }
        }
        visited
    }
}

#[derive(Debug, Default)]
pub struct CommitGraphBuilder {
    commits: Vec<(CommitRef, Vec<String>)>,
    tags: Vec<(TagName, String)>,
    heads: Vec<(String, String)>,
}

impl CommitGraphBuilder {
    /// Records a commit with its ordered parent ids. Parents may be added
    /// later; integrity is checked by [`Self::build`].
    pub fn commit(mut self, sha: &str, parents: &[&str]) -> Result<Self, VersionerError> {
        let commit = CommitRef::parse(sha)?;
        let parents = parents
            .iter()
            .map(|p| Ok(CommitRef::parse(p)?.sha().to_string()))
            .collect::<Result<Vec<_>, VersionerError>>()?;
        self.commits.push((commit, parents));
        Ok(self)
    }

    pub fn tag(mut self, tag: &str, sha: &str) -> Result<Self, VersionerError> {
        let tag = TagName::parse(tag)?;
        let sha = CommitRef::parse(sha)?.sha().to_string();
        self.tags.push((tag, sha));
        Ok(self)
    }

    pub fn head(mut self, branch: &str, sha: &str) -> Result<Self, VersionerError> {
        let sha = CommitRef::parse(sha)?.sha().to_string();
        self.heads.push((branch.to_string(), sha));
        Ok(self)
    }

    pub fn build(self) -> Result<CommitGraph, VersionerError> {
        let mut nodes = HashMap::new();
        let mut parents = HashMap::new();
        for (commit, commit_parents) in self.commits {
            let sha = commit.sha().to_string();
            if nodes.insert(sha.clone(), commit).is_some() {
                return Err(VersionerError::Graph {
                    reason: format!("commit {sha} added twice"),
                });
            }
            parents.insert(sha, commit_parents);
        }

        for (sha, commit_parents) in &parents {
            for parent in commit_parents {
                if !nodes.contains_key(parent) {
                    return Err(VersionerError::Graph {
                        reason: format!("commit {sha} references unknown parent {parent}"),
                    });
                }
            }
        }

        let mut tags = BTreeMap::new();
        for (tag, sha) in self.tags {
            if !nodes.contains_key(&sha) {
                return Err(VersionerError::Graph {
                    reason: format!("tag {tag} references unknown commit {sha}"),
                });
            }
            if tags.insert(tag, sha).is_some() {
                return Err(VersionerError::Graph {
                    reason: format!("tag {tag} added twice"),
                });
            }
        }

        let mut heads = BTreeMap::new();
        for (branch, sha) in self.heads {
            if !nodes.contains_key(&sha) {
                return Err(VersionerError::Graph {
                    reason: format!("branch {branch} references unknown commit {sha}"),
                });
            }
            heads.insert(branch, sha);
        }

        let graph = CommitGraph {
            nodes,
            parents,
            tags,
            heads,
        };
        graph_check_acyclic(&graph)?;
        Ok(graph)
    }
}

fn graph_check_acyclic(graph: &CommitGraph) -> Result<(), VersionerError> {
    // iterative three-color DFS
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color: HashMap<&str, u8> = graph.nodes.keys().map(|k| (k.as_str(), WHITE)).collect();

    for start in graph.nodes.keys() {
        if color[start.as_str()] != WHITE {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
        color.insert(start.as_str(), GRAY);
        while let Some((sha, child_idx)) = stack.pop() {
            let node_parents = &graph.parents[sha];
            if child_idx < node_parents.len() {
                stack.push((sha, child_idx + 1));
                let next = node_parents[child_idx].as_str();
                match color[next] {
                    WHITE => {
                        color.insert(next, GRAY);
                        stack.push((next, 0));
                    }
                    GRAY => {
                        return Err(VersionerError::Graph {
                            reason: format!("cycle through commit {next}"),
                        })
                    }
                    _ => {}
                }
            } else {
                color.insert(sha, BLACK);
            }
        }
    }
    Ok(())
}

/// The version at `head`: the maximum version tag over ancestors of `head`
/// (inclusive). `exact` is true when `head` itself carries that tag. An
/// untagged history yields `(0.0.0, false)`.
pub fn compute_repo_version(
    graph: &CommitGraph,
    head: &CommitRef,
) -> Result<(VersionTriple, bool, CommitRef), VersionerError> {
    if !graph.contains(head) {
        return Err(VersionerError::Graph {
            reason: format!("commit {head} is not in the graph"),
        });
    }
    let ancestors = graph.ancestor_set(head.sha());
    let best = graph
        .tags
        .iter()
        .filter(|(_, sha)| ancestors.contains(sha.as_str()))
        .max_by_key(|(tag, _)| tag.version());
    match best {
        Some((tag, sha)) => Ok((tag.version(), sha == head.sha(), head.clone())),
        None => Ok((VersionTriple::ZERO, false, head.clone())),
    }
}

/// Plans the next tag on a branch using the default naming patterns.
pub fn plan_tag(
    graph: &CommitGraph,
    branch: &BranchClass,
    bump: Bump,
) -> Result<TagName, VersionerError> {
    plan_tag_with(graph, branch, bump, &ReleaseNamingConfig::default())
}

/// Plans the next tag on a branch: the base is the version at the branch
/// head; release branches are pinned to their `M.m` line and accept only
/// patch bumps. The planned tag must not already exist anywhere in the
/// graph.
pub fn plan_tag_with(
    graph: &CommitGraph,
    branch: &BranchClass,
    bump: Bump,
    naming: &ReleaseNamingConfig,
) -> Result<TagName, VersionerError> {
    if *branch == BranchClass::Other {
        return Err(VersionerError::Graph {
            reason: "cannot plan a tag on an unclassified branch".to_string(),
        });
    }
    let head = graph
        .head_of(branch, naming)
        .ok_or_else(|| VersionerError::Graph {
            reason: format!("no branch head matching {branch:?}"),
        })?
        .clone();
    let (base, _exact, _) = compute_repo_version(graph, &head)?;

    if let BranchClass::Release { major, minor } = branch {
        if bump != Bump::Patch {
            return Err(VersionerError::BumpNotAllowed {
                bump: bump.as_str(),
            });
        }
        if base.major != *major || base.minor != *minor {
            return Err(VersionerError::LineMismatch {
                major: *major,
                minor: *minor,
                base,
            });
        }
    }

    let planned = TagName(next_version(base, bump)?);
    if graph.has_tag(&planned) {
        return Err(VersionerError::TagCollision { tag: planned });
    }
    Ok(planned)
}
