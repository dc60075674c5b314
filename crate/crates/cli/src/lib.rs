//! Command-line front end over a repository working tree.
//!
//! [`run`] is the whole CLI as a function of `(argv, env, cwd)`, so the
//! binary stays a thin wrapper and tests drive commands in-process.
//! Projects live under `Top/<project>/hog.conf` with their list files in
//! a sibling `list/` directory.
//!
//! Exit codes: 0 success, 1 operation failure (the failing module's
//! error name appears in the diagnostics), 2 usage error. With `--json`
//! every executed command emits exactly one JSON document on standard
//! output; commands rejected during argument parsing emit none.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use hog_core::ci::{self, CiConfig, ContainerMode, Provider};
use hog_core::config::{
    self, parse_list_file, parse_project_config, validate_config, ListKind, ProjectConfig,
    SourceList,
};
use hog_core::forge::{AuthToken, FakeForge, ForgeHandle, Release, RestForge, RestKind};
use hog_core::generics::{
    builtin_generics, merge_generics, verify_traceability, ArtifactBlob, GenericBinding,
};
use hog_core::gitio::GitRepo;
use hog_core::projgen::{self, GenerationInput};
use hog_core::versioner::{
    classify_branch, compute_repo_version, plan_tag, BranchClass, Bump, CommitGraph,
    ReleaseNamingConfig,
};

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(name = "hog", version, about = "Git-driven HDL project management")]
struct Cli {
    /// Emit one JSON document on standard output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the vendor project-creation script for a project
    Create { project: String },
    /// Print the repository version at HEAD
    Version,
    /// Plan (default) or apply the next version tag on the current branch
    Tag {
        /// Only print the planned tag
        #[arg(long, conflicts_with = "apply")]
        plan: bool,
        /// Create the planned tag on the forge
        #[arg(long)]
        apply: bool,
        #[arg(long, value_parser = ["patch", "minor", "major"], default_value = "patch")]
        bump: String,
    },
    /// Continuous-integration helpers
    Ci {
        #[command(subcommand)]
        command: CiCmd,
    },
    /// Trace an artifact back to the commit it was built from
    Verify { artifact: PathBuf },
    /// Validate a project's configuration, lists, and environment
    Check { project: String },
}

#[derive(Subcommand)]
enum CiCmd {
    /// Write the workflow file for a CI provider
    Generate {
        #[arg(long)]
        provider: String,
        /// Project scope; defaults to every project under Top/
        #[arg(long = "project")]
        projects: Vec<String>,
        /// Target branches; defaults to main
        #[arg(long = "target")]
        targets: Vec<String>,
        #[arg(long)]
        doxygen: bool,
        #[arg(long)]
        release: bool,
        #[arg(long, value_name = "IMAGE", conflicts_with = "apptainer")]
        docker_image: Option<String>,
        #[arg(long)]
        apptainer: bool,
        #[arg(long = "runner-tag")]
        runner_tags: Vec<String>,
    },
}

#[derive(Debug)]
enum CliError {
    Config(config::ConfigError),
    Versioner(hog_core::versioner::VersionerError),
    Generics(hog_core::generics::GenericsError),
    ProjGen(projgen::ProjGenError),
    Ci(ci::CiError),
    Forge(hog_core::forge::ForgeError),
    Git(hog_core::gitio::GitError),
    Io { context: String, source: std::io::Error },
    ForgeConfig(String),
    DetachedHead,
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Config(e) => e.name(),
            CliError::Versioner(e) => e.name(),
            CliError::Generics(e) => e.name(),
            CliError::ProjGen(e) => e.name(),
            CliError::Ci(e) => e.name(),
            CliError::Forge(e) => e.name(),
            CliError::Git(e) => e.name(),
            CliError::Io { .. } => "IoError",
            CliError::ForgeConfig(_) => "ForgeConfigError",
            CliError::DetachedHead => "DetachedHead",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Versioner(e) => e.fmt(f),
            CliError::Generics(e) => e.fmt(f),
            CliError::ProjGen(e) => e.fmt(f),
            CliError::Ci(e) => e.fmt(f),
            CliError::Forge(e) => e.fmt(f),
            CliError::Git(e) => e.fmt(f),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::ForgeConfig(reason) => f.write_str(reason),
            CliError::DetachedHead => {
                f.write_str("HEAD is detached; tags are planned on a branch")
            }
        }
    }
}

macro_rules! from_error {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::$variant(e)
            }
        }
    };
}
from_error!(Config, config::ConfigError);
from_error!(Versioner, hog_core::versioner::VersionerError);
from_error!(Generics, hog_core::generics::GenericsError);
from_error!(ProjGen, projgen::ProjGenError);
from_error!(Ci, ci::CiError);
from_error!(Forge, hog_core::forge::ForgeError);
from_error!(Git, hog_core::gitio::GitError);

struct CmdOutput {
    human: String,
    json: serde_json::Value,
    /// lines for standard error even on success (e.g. check diagnostics)
    diagnostics: Vec<String>,
    failed: bool,
}

impl CmdOutput {
    fn ok(human: String, json: serde_json::Value) -> CmdOutput {
        CmdOutput {
            human,
            json,
            diagnostics: Vec::new(),
            failed: false,
        }
    }
}

/// Runs the CLI. `args` excludes the program name; `env` and `cwd` are
/// explicit so invocations are reproducible.
pub fn run(args: &[String], env: &BTreeMap<String, String>, cwd: &Path) -> CommandOutcome {
    run_with_forge(args, env, cwd, None)
}

/// [`run`] with an injected forge handle, used by tests and embedders to
/// observe forge state. Without one, `HOG_FORGE`/`HOG_FORGE_URL`/
/// `HOG_FORGE_REPO`/`HOG_FORGE_TOKEN` select the forge; the default is an
/// in-memory fake seeded with the repository's tags.
pub fn run_with_forge(
    args: &[String],
    env: &BTreeMap<String, String>,
    cwd: &Path,
    forge: Option<&ForgeHandle>,
) -> CommandOutcome {
    let mut argv = vec!["hog".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome {
                    exit_code: 0,
                    stdout: err.to_string(),
                    stderr: String::new(),
                },
                _ => CommandOutcome {
                    exit_code: 2,
                    stdout: String::new(),
                    stderr: err.to_string(),
                },
            };
        }
    };

    match dispatch(&cli, env, cwd, forge) {
        Ok(output) => {
            let stdout = if cli.json {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&output.json).expect("valid JSON value")
                )
            } else {
                output.human
            };
            let mut stderr = String::new();
            for line in &output.diagnostics {
                stderr.push_str(line);
                stderr.push('\n');
            }
            CommandOutcome {
                exit_code: if output.failed { 1 } else { 0 },
                stdout,
                stderr,
            }
        }
        Err(err) => {
            let stdout = if cli.json {
                let doc = json!({
                    "schema": 1,
                    "error": { "name": err.name(), "message": err.to_string() },
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("valid JSON value"))
            } else {
                String::new()
            };
            CommandOutcome {
                exit_code: 1,
                stdout,
                stderr: format!("error[{}]: {}\n", err.name(), err),
            }
        }
    }
}

fn dispatch(
    cli: &Cli,
    env: &BTreeMap<String, String>,
    cwd: &Path,
    forge: Option<&ForgeHandle>,
) -> Result<CmdOutput, CliError> {
    match &cli.command {
        Cmd::Version => cmd_version(cwd),
        Cmd::Create { project } => cmd_create(cwd, env, project),
        Cmd::Check { project } => cmd_check(cwd, env, project),
        Cmd::Tag { plan, apply, bump } => {
            let bump = Bump::parse(bump).expect("clap restricts bump values");
            cmd_tag(cwd, env, !apply || *plan, bump, forge)
        }
        Cmd::Verify { artifact } => cmd_verify(cwd, artifact),
        Cmd::Ci {
            command:
                CiCmd::Generate {
                    provider,
                    projects,
                    targets,
                    doxygen,
                    release,
                    docker_image,
                    apptainer,
                    runner_tags,
                },
        } => cmd_ci_generate(
            cwd,
            provider,
            projects,
            targets,
            *doxygen,
            *release,
            docker_image.as_deref(),
            *apptainer,
            runner_tags,
        ),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("reading {}", path.display()),
        source,
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            context: format!("creating {}", parent.display()),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

/// Loads `Top/<project>/hog.conf` and the list files under
/// `Top/<project>/list/`, sorted by file name.
fn load_project(repo_root: &Path, project: &str) -> Result<(ProjectConfig, Vec<SourceList>), CliError> {
    let project_dir = repo_root.join("Top").join(project);
    let config = parse_project_config(&read_file(&project_dir.join("hog.conf"))?)?;

    let mut lists = Vec::new();
    let list_dir = project_dir.join("list");
    if list_dir.is_dir() {
        let mut paths: Vec<PathBuf> = fs::read_dir(&list_dir)
            .map_err(|source| CliError::Io {
                context: format!("reading {}", list_dir.display()),
                source,
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .collect();
        paths.sort();
        for path in paths {
            let Some(kind) = path
                .extension()
                .and_then(|e| e.to_str())
                .and_then(ListKind::from_extension)
            else {
                continue;
            };
            lists.push(parse_list_file(&read_file(&path)?, kind)?);
        }
    }
    Ok((config, lists))
}

fn discover_projects(repo_root: &Path) -> Vec<String> {
    let top = repo_root.join("Top");
    let Ok(entries) = fs::read_dir(&top) else {
        return Vec::new();
    };
    let mut projects: Vec<String> = entries
        .filter_map(|entry| entry.ok())
        .filter(|e| e.path().join("hog.conf").is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    projects.sort();
    projects
}

fn cmd_version(cwd: &Path) -> Result<CmdOutput, CliError> {
    let repo = GitRepo::open(cwd)?;
    let graph = repo.load_graph()?;
    let head = repo.head()?;
    let (version, exact, at) = compute_repo_version(&graph, &head)?;
    let human = if exact {
        format!("{version}\n")
    } else {
        format!("{version}+{:08x}\n", at.sha32())
    };
    Ok(CmdOutput::ok(
        human,
        json!({
            "schema": 1,
            "command": "version",
            "version": version.to_string(),
            "exact": exact,
            "sha": at.sha(),
            "sha32": format!("{:08x}", at.sha32()),
        }),
    ))
}

fn user_bindings(config: &ProjectConfig) -> Result<Vec<GenericBinding>, CliError> {
    config
        .user_generics
        .iter()
        .map(|(name, value)| GenericBinding::user(name, value.clone()).map_err(CliError::from))
        .collect()
}

fn cmd_create(
    cwd: &Path,
    env: &BTreeMap<String, String>,
    project: &str,
) -> Result<CmdOutput, CliError> {
    let repo = GitRepo::open(cwd)?;
    let (config, lists) = load_project(repo.root(), project)?;
    projgen::ensure_environment(config.vendor, env)?;

    let graph = repo.load_graph()?;
    let head = repo.head()?;
    let (version, _, _) = compute_repo_version(&graph, &head)?;
    let time = repo.commit_time(&head)?;
    let builtins = builtin_generics(version, &head, time)?;
    let bindings = merge_generics(&builtins, &user_bindings(&config)?)?;

    let input = GenerationInput {
        lists,
        bindings,
        repo_root: repo.root().to_path_buf(),
        config,
    };
    let script = projgen::generate_creation_script(&input)?;
    let script_name = format!("{}.create.tcl", input.config.project_name);
    let script_path = repo.root().join("Top").join(project).join(&script_name);
    write_file(&script_path, script.as_bytes())?;

    let relative = format!("Top/{project}/{script_name}");
    Ok(CmdOutput::ok(
        format!("wrote {relative}\n"),
        json!({
            "schema": 1,
            "command": "create",
            "project": project,
            "script": relative,
            "version": version.to_string(),
        }),
    ))
}

fn cmd_check(
    cwd: &Path,
    env: &BTreeMap<String, String>,
    project: &str,
) -> Result<CmdOutput, CliError> {
    let repo = GitRepo::open(cwd)?;
    let (config, lists) = load_project(repo.root(), project)?;
    let mut diagnostics = validate_config(&config, &lists);
    for violation in projgen::check_environment(config.vendor, env) {
        diagnostics.push(format!(
            "environment: {} must be set ({})",
            violation.variable, violation.purpose
        ));
    }
    let failed = !diagnostics.is_empty();
    let human = if failed {
        format!("{}: {} issue(s)\n", project, diagnostics.len())
    } else {
        format!("{project}: ok\n")
    };
    Ok(CmdOutput {
        human,
        json: json!({
            "schema": 1,
            "command": "check",
            "project": project,
            "diagnostics": diagnostics,
        }),
        diagnostics,
        failed,
    })
}

/// Truthy values of `HOG_CREATE_OFFICIAL_RELEASE`.
fn release_toggle(env: &BTreeMap<String, String>) -> bool {
    matches!(
        env.get(ci::OFFICIAL_RELEASE_VAR).map(String::as_str),
        Some("1") | Some("true") | Some("yes")
    )
}

fn forge_from_env(
    env: &BTreeMap<String, String>,
    graph: &CommitGraph,
) -> Result<ForgeHandle, CliError> {
    let kind = env.get("HOG_FORGE").map(String::as_str).unwrap_or("fake");
    match kind {
        "fake" => {
            let fake = FakeForge::new();
            for (tag, sha) in graph.tags() {
                fake.seed_tag(&tag.to_string(), sha);
            }
            Ok(ForgeHandle::Fake(fake))
        }
        "github" | "gitlab" => {
            let repo = env.get("HOG_FORGE_REPO").cloned().ok_or_else(|| {
                CliError::ForgeConfig(format!(
                    "HOG_FORGE_REPO must be set when HOG_FORGE={kind}"
                ))
            })?;
            let rest_kind = if kind == "github" {
                RestKind::Github
            } else {
                RestKind::Gitlab
            };
            let mut rest = RestForge::new(rest_kind, env.get("HOG_FORGE_URL").cloned(), repo);
            if let Some(token) = env.get(hog_core::forge::FORGE_TOKEN_VAR) {
                rest = rest.with_token(AuthToken::new(token.clone()));
            }
            Ok(ForgeHandle::Rest(rest))
        }
        other => Err(CliError::ForgeConfig(format!(
            "unknown HOG_FORGE kind `{other}` (expected github, gitlab, or fake)"
        ))),
    }
}

fn cmd_tag(
    cwd: &Path,
    env: &BTreeMap<String, String>,
    plan_only: bool,
    bump: Bump,
    forge: Option<&ForgeHandle>,
) -> Result<CmdOutput, CliError> {
    let repo = GitRepo::open(cwd)?;
    let graph = repo.load_graph()?;
    let branch = repo.head_branch()?.ok_or(CliError::DetachedHead)?;
    let naming = ReleaseNamingConfig::default();
    let class = classify_branch(&branch, &naming);
    if class == BranchClass::Other {
        return Err(CliError::Versioner(
            hog_core::versioner::VersionerError::Graph {
                reason: format!("branch `{branch}` is not a main, develop, or release branch"),
            },
        ));
    }
    let tag = plan_tag(&graph, &class, bump)?;

    if plan_only {
        return Ok(CmdOutput::ok(
            format!("{tag}\n"),
            json!({
                "schema": 1,
                "command": "tag",
                "tag": tag.to_string(),
                "applied": false,
            }),
        ));
    }

    let head = repo.head()?;
    let default_handle;
    let handle = match forge {
        Some(handle) => handle,
        None => {
            default_handle = forge_from_env(env, &graph)?;
            &default_handle
        }
    };
    handle.create_tag(&tag, &head)?;
    let mut human = format!("created tag {tag} at {head}\n");
    let mut release_created = false;
    if release_toggle(env) {
        handle.create_release(&Release {
            tag,
            title: format!("Release {tag}"),
            notes: format!("Automated release for {tag}."),
            draft: false,
        })?;
        release_created = true;
        human.push_str(&format!("created release for {tag}\n"));
    }
    Ok(CmdOutput::ok(
        human,
        json!({
            "schema": 1,
            "command": "tag",
            "tag": tag.to_string(),
            "applied": true,
            "release_created": release_created,
            "forge": handle.kind(),
        }),
    ))
}

fn cmd_verify(cwd: &Path, artifact: &Path) -> Result<CmdOutput, CliError> {
    let bytes = fs::read(artifact).map_err(|source| CliError::Io {
        context: format!("reading {}", artifact.display()),
        source,
    })?;
    let blob = ArtifactBlob::from_bytes(&bytes)?;
    let repo = GitRepo::open(cwd)?;
    let graph = repo.load_graph()?;
    let commit = verify_traceability(&blob, &graph)?;
    Ok(CmdOutput::ok(
        format!("commit {commit}\n"),
        json!({
            "schema": 1,
            "command": "verify",
            "sha": commit.sha(),
            "sha32": format!("{:08x}", commit.sha32()),
        }),
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_ci_generate(
    cwd: &Path,
    provider: &str,
    projects: &[String],
    targets: &[String],
    doxygen: bool,
    release: bool,
    docker_image: Option<&str>,
    apptainer: bool,
    runner_tags: &[String],
) -> Result<CmdOutput, CliError> {
    let provider = Provider::parse(provider).ok_or_else(|| {
        CliError::Ci(ci::CiError::UnsupportedProvider {
            provider: provider.to_string(),
        })
    })?;
    let repo = GitRepo::open(cwd)?;
    let projects = if projects.is_empty() {
        discover_projects(repo.root())
    } else {
        projects.to_vec()
    };

    let mut cfg = CiConfig::new(provider, projects);
    if !targets.is_empty() {
        cfg.target_branches = targets.to_vec();
    }
    cfg.enable_doxygen = doxygen;
    cfg.enable_release = release;
    cfg.container = match (docker_image, apptainer) {
        (Some(image), _) => ContainerMode::Docker {
            image: image.to_string(),
        },
        (None, true) => ContainerMode::Apptainer,
        (None, false) => ContainerMode::None,
    };
    cfg.runner_tags = runner_tags.to_vec();

    let workflow = ci::emit_workflow(&cfg)?;
    let path = repo.root().join(provider.workflow_path());
    write_file(&path, workflow.as_bytes())?;

    Ok(CmdOutput::ok(
        format!("wrote {}\n", provider.workflow_path()),
        json!({
            "schema": 1,
            "command": "ci generate",
            "provider": provider.as_str(),
            "workflow": provider.workflow_path(),
            "projects": cfg.projects,
        }),
    ))
}
