//! CI workflow emission and pipeline simulation.
//!
//! Two pipelines exist per repository. A pull request toward a target
//! branch triggers the build pipeline (generate, build, simulate, and
//! optionally doc); once the request is merged, a push to the target
//! branch triggers the tag pipeline (tag, and optionally release). The
//! two never mix: build pipelines do not tag, tag pipelines do not build.
//!
//! [`emit_workflow`] renders this state machine as a provider workflow
//! file (`.github/workflows/hog.yml` or `.gitlab-ci.yml`), and
//! [`simulate_pipeline`] evaluates which jobs a forge event triggers
//! without running anything.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

/// Environment variable naming the Apptainer image used to wrap commands.
pub const APPTAINER_IMAGE_VAR: &str = "HOG_APPTAINER_IMAGE";

/// Truthy toggle: `tag --apply` also publishes a release for the new tag.
pub const OFFICIAL_RELEASE_VAR: &str = "HOG_CREATE_OFFICIAL_RELEASE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provider {
    Gitlab,
    Github,
}

impl Provider {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provider::Gitlab => "gitlab",
            Provider::Github => "github",
        }
    }

    pub fn parse(s: &str) -> Option<Provider> {
        match s {
            "gitlab" => Some(Provider::Gitlab),
            "github" => Some(Provider::Github),
            _ => None,
        }
    }

    /// Conventional location of the emitted workflow file.
    pub fn workflow_path(&self) -> &'static str {
        match self {
            Provider::Gitlab => ".gitlab-ci.yml",
            Provider::Github => ".github/workflows/hog.yml",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContainerMode {
    None,
    Docker { image: String },
    Apptainer,
}

/// Configuration for workflow emission and pipeline simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiConfig {
    pub provider: Provider,
    pub projects: Vec<String>,
    pub target_branches: Vec<String>,
    pub enable_doxygen: bool,
    pub enable_release: bool,
    pub container: ContainerMode,
    pub runner_tags: Vec<String>,
    /// Extra variables passed through into the emitted env blocks.
    pub variables: BTreeMap<String, String>,
}

impl CiConfig {
    /// A configuration with the default single `main` target branch, no
    /// container, and all toggles off.
    pub fn new(provider: Provider, projects: Vec<String>) -> CiConfig {
        CiConfig {
            provider,
            projects,
            target_branches: vec!["main".to_string()],
            enable_doxygen: false,
            enable_release: false,
            container: ContainerMode::None,
            runner_tags: Vec::new(),
            variables: BTreeMap::new(),
        }
    }
}

/// An event observed on the forge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForgeEvent {
    PrOpened { source: String, target: String },
    PrMerged { target: String },
    Push { branch: String },
}

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Generate,
    Build,
    Simulate,
    Doc,
    Tag,
    Release,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Generate => "generate",
            Stage::Build => "build",
            Stage::Simulate => "simulate",
            Stage::Doc => "doc",
            Stage::Tag => "tag",
            Stage::Release => "release",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JobScope {
    Repo,
    Project(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub name: String,
    pub stage: Stage,
    pub scope: JobScope,
}

/// The ordered job set one forge event triggers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelinePlan {
    pub jobs: Vec<Job>,
}

impl PipelinePlan {
    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn has_stage(&self, stage: Stage) -> bool {
        self.jobs.iter().any(|j| j.stage == stage)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CiError {
    #[error("unsupported CI provider `{provider}`")]
    UnsupportedProvider { provider: String },
    #[error("environment variable {variable} must be set")]
    MissingEnv { variable: &'static str },
    #[error("invalid CI configuration: {}", diagnostics.join("; "))]
    InvalidConfig { diagnostics: Vec<String> },
}

impl CiError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            CiError::UnsupportedProvider { .. } => "UnsupportedProvider",
            CiError::MissingEnv { .. } => "MissingEnv",
            CiError::InvalidConfig { .. } => "InvalidConfig",
        }
    }
}

/// Checks the configuration invariants. Empty means valid.
pub fn validate_ci_config(cfg: &CiConfig) -> Vec<String> {
    let mut diags = Vec::new();
    if cfg.projects.is_empty() {
        diags.push("at least one project is required".to_string());
    }
    for project in &cfg.projects {
        if project.is_empty() || !project.bytes().all(|b| b.is_ascii_graphic()) {
            diags.push(format!("invalid project name `{project}`"));
        }
    }
    if cfg.target_branches.is_empty() {
        diags.push("at least one target branch is required".to_string());
    }
    for branch in &cfg.target_branches {
        if branch.is_empty() {
            diags.push("target branch names must be non-empty".to_string());
        }
    }
    if let ContainerMode::Docker { image } = &cfg.container {
        if image.trim().is_empty() {
            diags.push("docker container selected but the image reference is empty".to_string());
        }
    }
    for tag in &cfg.runner_tags {
        if tag.is_empty() || !tag.bytes().all(|b| b.is_ascii_graphic()) {
            diags.push(format!("invalid runner tag `{tag}`"));
        }
    }
    diags
}

/// Wraps a command for container execution. Apptainer prefixes the
/// `apptainer exec <image>` invocation, taking the image path from
/// `HOG_APPTAINER_IMAGE`; Docker is delegated to the image field of the
/// emitted workflow, so the command passes through unchanged.
pub fn wrap_with_container(
    command: &[String],
    cfg: &CiConfig,
    env: &BTreeMap<String, String>,
) -> Result<Vec<String>, CiError> {
    match &cfg.container {
        ContainerMode::None | ContainerMode::Docker { .. } => Ok(command.to_vec()),
        ContainerMode::Apptainer => {
            let image = env
                .get(APPTAINER_IMAGE_VAR)
                .filter(|v| !v.trim().is_empty())
                .ok_or(CiError::MissingEnv {
                    variable: APPTAINER_IMAGE_VAR,
                })?;
            let mut wrapped = vec!["apptainer".to_string(), "exec".to_string(), image.clone()];
            wrapped.extend(command.iter().cloned());
            Ok(wrapped)
        }
    }
}

/// Evaluates the pipeline state machine for one event. Pull requests
/// toward a target branch get the build pipeline; merges into (or pushes
/// to) a target branch get the tag pipeline; everything else is an empty
/// plan.
pub fn simulate_pipeline(cfg: &CiConfig, event: &ForgeEvent) -> PipelinePlan {
    let is_target = |branch: &str| cfg.target_branches.iter().any(|b| b == branch);
    let mut jobs = Vec::new();
    match event {
        ForgeEvent::PrOpened { target, .. } if is_target(target) => {
            jobs.push(Job {
                name: "generate".to_string(),
                stage: Stage::Generate,
                scope: JobScope::Repo,
            });
            for project in &cfg.projects {
                jobs.push(Job {
                    name: format!("build-{project}"),
                    stage: Stage::Build,
                    scope: JobScope::Project(project.clone()),
                });
            }
            for project in &cfg.projects {
                jobs.push(Job {
                    name: format!("simulate-{project}"),
                    stage: Stage::Simulate,
                    scope: JobScope::Project(project.clone()),
                });
            }
            if cfg.enable_doxygen {
                jobs.push(Job {
                    name: "doc".to_string(),
                    stage: Stage::Doc,
                    scope: JobScope::Repo,
                });
            }
        }
        ForgeEvent::PrMerged { target } if is_target(target) => {
            push_tag_jobs(cfg, &mut jobs);
        }
        ForgeEvent::Push { branch } if is_target(branch) => {
            push_tag_jobs(cfg, &mut jobs);
        }
        _ => {}
    }
    PipelinePlan { jobs }
}

fn push_tag_jobs(cfg: &CiConfig, jobs: &mut Vec<Job>) {
    jobs.push(Job {
        name: "tag".to_string(),
        stage: Stage::Tag,
        scope: JobScope::Repo,
    });
    if cfg.enable_release {
        jobs.push(Job {
            name: "release".to_string(),
            stage: Stage::Release,
            scope: JobScope::Repo,
        });
    }
}

// ---------------------------------------------------------------------
// workflow emission

#[derive(Serialize)]
struct BranchFilter {
    branches: Vec<String>,
}

#[derive(Serialize)]
struct GithubTriggers {
    pull_request: BranchFilter,
    push: BranchFilter,
}

#[derive(Serialize)]
#[serde(untagged)]
enum GithubStep {
    Uses {
        uses: String,
        with: BTreeMap<String, serde_yaml::Value>,
    },
    Run {
        run: String,
    },
}

#[derive(Serialize)]
struct GithubJob {
    #[serde(rename = "if")]
    condition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    needs: Option<Vec<String>>,
    #[serde(rename = "runs-on")]
    runs_on: serde_yaml::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    container: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    env: BTreeMap<String, String>,
    steps: Vec<GithubStep>,
}

#[derive(Serialize)]
struct GithubWorkflow {
    name: String,
    #[serde(rename = "on")]
    triggers: GithubTriggers,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    env: BTreeMap<String, String>,
    jobs: IndexMap<String, GithubJob>,
}

#[derive(Serialize)]
struct GitlabRule {
    #[serde(rename = "if")]
    condition: String,
}

#[derive(Serialize)]
struct GitlabJob {
    stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    image: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    tags: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    variables: BTreeMap<String, String>,
    script: Vec<String>,
    rules: Vec<GitlabRule>,
}

#[derive(Serialize)]
struct GitlabPipeline {
    stages: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    variables: BTreeMap<String, String>,
    #[serde(flatten)]
    jobs: IndexMap<String, GitlabJob>,
}

/// One job's commands; comment lines document site-specific steps.
fn job_commands(cfg: &CiConfig, stage: Stage, project: Option<&str>) -> Vec<String> {
    match (stage, project) {
        (Stage::Generate, _) => cfg
            .projects
            .iter()
            .map(|p| format!("hog check {p}"))
            .collect(),
        (Stage::Build, Some(p)) => vec![
            format!("hog create {p}"),
            format!("# vendor synthesis for {p} runs here"),
        ],
        (Stage::Simulate, Some(p)) => vec![
            format!("# vendor simulation for {p} runs here"),
            format!("echo \"simulate {p}\""),
        ],
        (Stage::Doc, _) => vec!["doxygen Doxyfile".to_string()],
        (Stage::Tag, _) => vec!["hog tag --apply".to_string()],
        (Stage::Release, _) => match cfg.provider {
            Provider::Github => {
                vec!["gh release create \"v$(hog version)\" --generate-notes".to_string()]
            }
            Provider::Gitlab => vec![
                "release-cli create --tag-name \"v$(hog version)\" --name \"Release v$(hog version)\""
                    .to_string(),
            ],
        },
        _ => Vec::new(),
    }
}

/// Applies the Apptainer wrapper to every non-comment command line.
fn containerize(cfg: &CiConfig, commands: Vec<String>) -> Vec<String> {
    if cfg.container != ContainerMode::Apptainer {
        return commands;
    }
    commands
        .into_iter()
        .map(|line| {
            if line.starts_with('#') || line.is_empty() {
                line
            } else {
                format!("apptainer exec \"${APPTAINER_IMAGE_VAR}\" {line}")
            }
        })
        .collect()
}

fn docker_image(cfg: &CiConfig) -> Option<String> {
    match &cfg.container {
        ContainerMode::Docker { image } => Some(image.clone()),
        _ => None,
    }
}

fn emit_github(cfg: &CiConfig) -> String {
    let runs_on = if cfg.runner_tags.is_empty() {
        serde_yaml::Value::String("ubuntu-latest".to_string())
    } else {
        let mut labels = vec!["self-hosted".to_string()];
        labels.extend(cfg.runner_tags.iter().cloned());
        serde_yaml::Value::Sequence(labels.into_iter().map(serde_yaml::Value::String).collect())
    };
    let checkout = || GithubStep::Uses {
        uses: "actions/checkout@v4".to_string(),
        with: BTreeMap::from([(
            "fetch-depth".to_string(),
            serde_yaml::Value::Number(0.into()),
        )]),
    };
    let job = |condition: &str,
               needs: Option<Vec<String>>,
               env: BTreeMap<String, String>,
               commands: Vec<String>| GithubJob {
        condition: condition.to_string(),
        needs,
        runs_on: runs_on.clone(),
        container: docker_image(cfg),
        env,
        steps: vec![
            checkout(),
            GithubStep::Run {
                run: containerize(cfg, commands).join("\n"),
            },
        ],
    };
    const ON_PR: &str = "github.event_name == 'pull_request'";
    const ON_PUSH: &str = "github.event_name == 'push'";

    let mut jobs = IndexMap::new();
    jobs.insert(
        "generate".to_string(),
        job(ON_PR, None, BTreeMap::new(), job_commands(cfg, Stage::Generate, None)),
    );
    for project in &cfg.projects {
        jobs.insert(
            format!("build-{project}"),
            job(
                ON_PR,
                Some(vec!["generate".to_string()]),
                BTreeMap::new(),
                job_commands(cfg, Stage::Build, Some(project)),
            ),
        );
    }
    for project in &cfg.projects {
        jobs.insert(
            format!("simulate-{project}"),
            job(
                ON_PR,
                Some(vec![format!("build-{project}")]),
                BTreeMap::new(),
                job_commands(cfg, Stage::Simulate, Some(project)),
            ),
        );
    }
    if cfg.enable_doxygen {
        jobs.insert(
            "doc".to_string(),
            job(
                ON_PR,
                Some(vec!["generate".to_string()]),
                BTreeMap::new(),
                job_commands(cfg, Stage::Doc, None),
            ),
        );
    }
    let tag_env = BTreeMap::from([
        ("HOG_FORGE".to_string(), "github".to_string()),
        (
            "HOG_FORGE_REPO".to_string(),
            "${{ github.repository }}".to_string(),
        ),
        (
            "HOG_FORGE_TOKEN".to_string(),
            "${{ secrets.GITHUB_TOKEN }}".to_string(),
        ),
    ]);
    jobs.insert(
        "tag".to_string(),
        job(ON_PUSH, None, tag_env, job_commands(cfg, Stage::Tag, None)),
    );
    if cfg.enable_release {
        let release_env = BTreeMap::from([(
            "GH_TOKEN".to_string(),
            "${{ secrets.GITHUB_TOKEN }}".to_string(),
        )]);
        jobs.insert(
            "release".to_string(),
            job(
                ON_PUSH,
                Some(vec!["tag".to_string()]),
                release_env,
                job_commands(cfg, Stage::Release, None),
            ),
        );
    }

    let workflow = GithubWorkflow {
        name: "hog-ci".to_string(),
        triggers: GithubTriggers {
            pull_request: BranchFilter {
                branches: cfg.target_branches.clone(),
            },
            push: BranchFilter {
                branches: cfg.target_branches.clone(),
            },
        },
        env: cfg.variables.clone(),
        jobs,
    };
    serde_yaml::to_string(&workflow).expect("workflow model always serializes")
}

fn emit_gitlab(cfg: &CiConfig) -> String {
    let mr_rules: Vec<GitlabRule> = cfg
        .target_branches
        .iter()
        .map(|branch| GitlabRule {
            condition: format!(
                "$CI_PIPELINE_SOURCE == \"merge_request_event\" && \
                 $CI_MERGE_REQUEST_TARGET_BRANCH_NAME == \"{branch}\""
            ),
        })
        .collect();
    let push_rules: Vec<GitlabRule> = cfg
        .target_branches
        .iter()
        .map(|branch| GitlabRule {
            condition: format!(
                "$CI_PIPELINE_SOURCE == \"push\" && $CI_COMMIT_BRANCH == \"{branch}\""
            ),
        })
        .collect();
    let job = |stage: Stage,
               variables: BTreeMap<String, String>,
               commands: Vec<String>,
               rules: &[GitlabRule]| GitlabJob {
        stage: stage.as_str().to_string(),
        image: docker_image(cfg),
        tags: cfg.runner_tags.clone(),
        variables,
        script: containerize(cfg, commands),
        rules: rules
            .iter()
            .map(|r| GitlabRule {
                condition: r.condition.clone(),
            })
            .collect(),
    };

    let mut stages = vec![
        Stage::Generate.as_str().to_string(),
        Stage::Build.as_str().to_string(),
        Stage::Simulate.as_str().to_string(),
    ];
    if cfg.enable_doxygen {
        stages.push(Stage::Doc.as_str().to_string());
    }
    stages.push(Stage::Tag.as_str().to_string());
    if cfg.enable_release {
        stages.push(Stage::Release.as_str().to_string());
    }

    let mut jobs = IndexMap::new();
    jobs.insert(
        "generate".to_string(),
        job(
            Stage::Generate,
            BTreeMap::new(),
            job_commands(cfg, Stage::Generate, None),
            &mr_rules,
        ),
    );
    for project in &cfg.projects {
        jobs.insert(
            format!("build-{project}"),
            job(
                Stage::Build,
                BTreeMap::new(),
                job_commands(cfg, Stage::Build, Some(project)),
                &mr_rules,
            ),
        );
    }
    for project in &cfg.projects {
        jobs.insert(
            format!("simulate-{project}"),
            job(
                Stage::Simulate,
                BTreeMap::new(),
                job_commands(cfg, Stage::Simulate, Some(project)),
                &mr_rules,
            ),
        );
    }
    if cfg.enable_doxygen {
        jobs.insert(
            "doc".to_string(),
            job(
                Stage::Doc,
                BTreeMap::new(),
                job_commands(cfg, Stage::Doc, None),
                &mr_rules,
            ),
        );
    }
    let tag_vars = BTreeMap::from([
        ("HOG_FORGE".to_string(), "gitlab".to_string()),
        ("HOG_FORGE_REPO".to_string(), "$CI_PROJECT_ID".to_string()),
        ("HOG_FORGE_URL".to_string(), "$CI_API_V4_URL".to_string()),
    ]);
    jobs.insert(
        "tag".to_string(),
        job(Stage::Tag, tag_vars, job_commands(cfg, Stage::Tag, None), &push_rules),
    );
    if cfg.enable_release {
        jobs.insert(
            "release".to_string(),
            job(
                Stage::Release,
                BTreeMap::new(),
                job_commands(cfg, Stage::Release, None),
                &push_rules,
            ),
        );
    }

    let pipeline = GitlabPipeline {
        stages,
        variables: cfg.variables.clone(),
        jobs,
    };
    serde_yaml::to_string(&pipeline).expect("pipeline model always serializes")
}

/// Renders the workflow file for the configured provider. The output is
/// valid YAML and depends only on the configuration.
pub fn emit_workflow(cfg: &CiConfig) -> Result<String, CiError> {
    let diagnostics = validate_ci_config(cfg);
    if !diagnostics.is_empty() {
        return Err(CiError::InvalidConfig { diagnostics });
    }
    Ok(match cfg.provider {
        Provider::Github => emit_github(cfg),
        Provider::Gitlab => emit_gitlab(cfg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_cfg(provider: Provider) -> CiConfig {
        CiConfig::new(provider, vec!["demo".to_string()])
    }

    #[test]
    fn default_config_is_valid() {
        assert!(validate_ci_config(&demo_cfg(Provider::Github)).is_empty());
    }

    #[test]
    fn validation_flags_bad_configs() {
        let mut cfg = demo_cfg(Provider::Gitlab);
        cfg.container = ContainerMode::Docker {
            image: String::new(),
        };
        assert_eq!(validate_ci_config(&cfg).len(), 1);

        let mut cfg = demo_cfg(Provider::Gitlab);
        cfg.projects.clear();
        assert_eq!(validate_ci_config(&cfg).len(), 1);

        let mut cfg = demo_cfg(Provider::Gitlab);
        cfg.target_branches.clear();
        assert_eq!(validate_ci_config(&cfg).len(), 1);
    }

    #[test]
    fn github_workflow_triggers_on_every_target_branch() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.target_branches = vec!["main".to_string(), "develop".to_string()];
        let yaml = emit_workflow(&cfg).unwrap();
        let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
        let on = &value["on"];
        for branch in ["main", "develop"] {
            let pr = on["pull_request"]["branches"].as_sequence().unwrap();
            assert!(pr.iter().any(|b| b.as_str() == Some(branch)));
            let push = on["push"]["branches"].as_sequence().unwrap();
            assert!(push.iter().any(|b| b.as_str() == Some(branch)));
        }
    }

    #[test]
    fn gitlab_docker_image_lands_on_jobs() {
        let mut cfg = demo_cfg(Provider::Gitlab);
        cfg.container = ContainerMode::Docker {
            image: "vendor/tools:1.0".to_string(),
        };
        let yaml = emit_workflow(&cfg).unwrap();
        let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
        assert_eq!(
            value["generate"]["image"].as_str(),
            Some("vendor/tools:1.0")
        );
        assert_eq!(
            value["build-demo"]["image"].as_str(),
            Some("vendor/tools:1.0")
        );

        let mut cfg = demo_cfg(Provider::Github);
        cfg.container = ContainerMode::Docker {
            image: "vendor/tools:1.0".to_string(),
        };
        let yaml = emit_workflow(&cfg).unwrap();
        let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
        assert_eq!(
            value["jobs"]["generate"]["container"].as_str(),
            Some("vendor/tools:1.0")
        );
    }

    #[test]
    fn doxygen_toggle_adds_a_doc_job() {
        for provider in [Provider::Github, Provider::Gitlab] {
            let mut cfg = demo_cfg(provider);
            cfg.enable_doxygen = true;
            let yaml = emit_workflow(&cfg).unwrap();
            let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
            let doc = match provider {
                Provider::Github => &value["jobs"]["doc"],
                Provider::Gitlab => &value["doc"],
            };
            assert!(!doc.is_null(), "{provider:?} should emit a doc job");
        }
    }

    #[test]
    fn release_toggle_adds_a_release_job() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.enable_release = true;
        let yaml = emit_workflow(&cfg).unwrap();
        let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
        assert!(!value["jobs"]["release"].is_null());
        assert_eq!(
            value["jobs"]["release"]["if"].as_str(),
            Some("github.event_name == 'push'")
        );
    }

    #[test]
    fn emission_is_deterministic_and_reparses() {
        for provider in [Provider::Github, Provider::Gitlab] {
            let mut cfg = demo_cfg(provider);
            cfg.enable_doxygen = true;
            cfg.enable_release = true;
            cfg.variables
                .insert("HOG_CHECK_SYNTAX".to_string(), "1".to_string());
            let first = emit_workflow(&cfg).unwrap();
            let second = emit_workflow(&cfg).unwrap();
            assert_eq!(first, second);
            let parsed: serde_yaml::Value = serde_yaml::from_str(&first).unwrap();
            assert!(parsed.is_mapping());
        }
    }

    #[test]
    fn extra_variables_pass_through() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.variables
            .insert("HOG_CHECK_SYNTAX".to_string(), "1".to_string());
        let yaml = emit_workflow(&cfg).unwrap();
        let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
        assert_eq!(value["env"]["HOG_CHECK_SYNTAX"].as_str(), Some("1"));
    }

    #[test]
    fn runner_tags_select_self_hosted_runners() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.runner_tags = vec!["fpga".to_string()];
        let yaml = emit_workflow(&cfg).unwrap();
        let value: serde_yaml::Value = serde_yaml::from_str(&yaml).unwrap();
        let runs_on = value["jobs"]["generate"]["runs-on"].as_sequence().unwrap();
        assert_eq!(runs_on[0].as_str(), Some("self-hosted"));
        assert_eq!(runs_on[1].as_str(), Some("fpga"));
    }

    #[test]
    fn apptainer_wraps_commands_in_emitted_scripts() {
        let mut cfg = demo_cfg(Provider::Gitlab);
        cfg.container = ContainerMode::Apptainer;
        let yaml = emit_workflow(&cfg).unwrap();
        assert!(yaml.contains("apptainer exec \"$HOG_APPTAINER_IMAGE\" hog check demo"));
    }

    #[test]
    fn invalid_config_cannot_be_emitted() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.projects.clear();
        let err = emit_workflow(&cfg).unwrap_err();
        assert_eq!(err.name(), "InvalidConfig");
    }

    #[test]
    fn wrap_is_identity_without_a_container() {
        let cfg = demo_cfg(Provider::Github);
        let cmd = vec!["make".to_string()];
        assert_eq!(
            wrap_with_container(&cmd, &cfg, &BTreeMap::new()).unwrap(),
            cmd
        );
    }

    #[test]
    fn wrap_prefixes_apptainer_exec() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.container = ContainerMode::Apptainer;
        let env = BTreeMap::from([("HOG_APPTAINER_IMAGE".to_string(), "/img.sif".to_string())]);
        let wrapped = wrap_with_container(&["make".to_string()], &cfg, &env).unwrap();
        assert_eq!(wrapped, ["apptainer", "exec", "/img.sif", "make"]);
    }

    #[test]
    fn wrap_requires_the_apptainer_image_variable() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.container = ContainerMode::Apptainer;
        let err = wrap_with_container(&["make".to_string()], &cfg, &BTreeMap::new()).unwrap_err();
        assert_eq!(err.name(), "MissingEnv");
        // docker delegates to the workflow image field
        cfg.container = ContainerMode::Docker {
            image: "img".to_string(),
        };
        assert_eq!(
            wrap_with_container(&["make".to_string()], &cfg, &BTreeMap::new()).unwrap(),
            ["make"]
        );
    }

    #[test]
    fn pr_pipeline_builds_and_simulates_without_tagging() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.projects.push("other".to_string());
        let plan = simulate_pipeline(
            &cfg,
            &ForgeEvent::PrOpened {
                source: "feature".to_string(),
                target: "main".to_string(),
            },
        );
        let names: Vec<&str> = plan.jobs.iter().map(|j| j.name.as_str()).collect();
        assert_eq!(
            names,
            ["generate", "build-demo", "build-other", "simulate-demo", "simulate-other"]
        );
        assert!(!plan.has_stage(Stage::Tag));
        assert!(!plan.has_stage(Stage::Release));
    }

    #[test]
    fn merge_pipeline_tags_and_optionally_releases() {
        let mut cfg = demo_cfg(Provider::Github);
        cfg.enable_release = true;
        let plan = simulate_pipeline(
            &cfg,
            &ForgeEvent::PrMerged {
                target: "main".to_string(),
            },
        );
        let names: Vec<&str> = plan.jobs.iter().map(|j| j.name.as_str()).collect();
        assert_eq!(names, ["tag", "release"]);
        // a push to the target branch is equivalent
        let push_plan = simulate_pipeline(
            &cfg,
            &ForgeEvent::Push {
                branch: "main".to_string(),
            },
        );
        assert_eq!(plan, push_plan);
    }

    #[test]
    fn events_off_target_branches_trigger_nothing() {
        let cfg = demo_cfg(Provider::Github);
        assert!(simulate_pipeline(
            &cfg,
            &ForgeEvent::Push {
                branch: "scratch".to_string()
            }
        )
        .is_empty());
        assert!(simulate_pipeline(
            &cfg,
            &ForgeEvent::PrOpened {
                source: "a".to_string(),
                target: "gh-pages".to_string()
            }
        )
        .is_empty());
    }

    #[test]
    fn plans_keep_stage_order() {
        let mut cfg = demo_cfg(Provider::Gitlab);
        cfg.enable_doxygen = true;
        cfg.enable_release = true;
        for event in [
            ForgeEvent::PrOpened {
                source: "f".to_string(),
                target: "main".to_string(),
            },
            ForgeEvent::PrMerged {
                target: "main".to_string(),
            },
        ] {
            let plan = simulate_pipeline(&cfg, &event);
            let stages: Vec<Stage> = plan.jobs.iter().map(|j| j.stage).collect();
            let mut sorted = stages.clone();
            sorted.sort();
            assert_eq!(stages, sorted, "stage order violated for {event:?}");
        }
    }
}
