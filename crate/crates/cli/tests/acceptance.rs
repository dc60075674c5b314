//! Acceptance suite: one test per release criterion, each printing a
//! pass line with its runtime (visible with `--nocapture`) and enforcing
//! its time budget. Expected values come from independent oracles built
//! in this file, never from the code under test.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::time::{Duration, Instant};

use chrono::DateTime;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{args, git_stdout, plain_env, scripted_repo};
use hog_cli::run;
use hog_core::ci::{
    emit_workflow, simulate_pipeline, CiConfig, ContainerMode, ForgeEvent, Provider, Stage,
};
use hog_core::config::{
    is_reserved_generic_name, parse_project_config, serialize_project_config, ListKind,
    ProjectConfig, SourceEntry, SourceList, TypedValue, Vendor,
};
use hog_core::generics::{
    builtin_generics, embed_into_artifact, pack_version, verify_traceability, ArtifactBlob,
    GenericBinding,
};
use hog_core::projgen::{generate_creation_script, GenerationInput};
use hog_core::versioner::{
    compute_repo_version, plan_tag, sha32_of, BranchClass, Bump, CommitGraph, CommitRef, TagName,
    VersionTriple, VersionerError,
};

fn pass(criterion: u32, name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "criterion {criterion} ({name}) exceeded its {budget:?} budget: {elapsed:?}"
    );
    println!(
        "[acceptance] criterion {criterion} ({name}): PASS in {} ms",
        elapsed.as_millis()
    );
}

// ---------------------------------------------------------------------
// randomized fixture generators

fn rand_ident(rng: &mut ChaCha8Rng) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";
    let mut s = String::new();
    s.push(FIRST[rng.gen_range(0..FIRST.len())] as char);
    for _ in 0..rng.gen_range(2..9) {
        s.push(REST[rng.gen_range(0..REST.len())] as char);
    }
    s
}

fn rand_token(rng: &mut ChaCha8Rng) -> String {
    const TOKEN: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.-";
    (0..rng.gen_range(1..10))
        .map(|_| TOKEN[rng.gen_range(0..TOKEN.len())] as char)
        .collect()
}

fn rand_sha(rng: &mut ChaCha8Rng) -> String {
    format!(
        "{:08x}{:08x}{:08x}{:08x}{:08x}",
        rng.gen::<u32>(),
        rng.gen::<u32>(),
        rng.gen::<u32>(),
        rng.gen::<u32>(),
        rng.gen::<u32>()
    )
}

fn rand_config(rng: &mut ChaCha8Rng) -> ProjectConfig {
    let vendor = [Vendor::Vivado, Vendor::Quartus, Vendor::Libero][rng.gen_range(0..3)];
    let mut user_generics: IndexMap<String, TypedValue> = IndexMap::new();
    for _ in 0..rng.gen_range(0..5) {
        let name = rand_ident(rng);
        if is_reserved_generic_name(&name)
            || user_generics.keys().any(|k| k.eq_ignore_ascii_case(&name))
        {
            continue;
        }
        // string generics render only in the vivado dialect
        let kinds = if vendor == Vendor::Vivado { 4 } else { 3 };
        let value = match rng.gen_range(0..kinds) {
            0 => TypedValue::Integer(rng.gen_range(-100_000..100_000)),
            1 => TypedValue::BitVector32(rng.gen()),
            2 => TypedValue::Boolean(rng.gen()),
            _ => TypedValue::Str(rand_ident(rng)),
        };
        user_generics.insert(name, value);
    }
    let mut properties = BTreeMap::new();
    for _ in 0..rng.gen_range(0..3) {
        let section = rand_token(rng);
        if section == "main" || section == "generics" {
            continue;
        }
        let mut props = IndexMap::new();
        for _ in 0..rng.gen_range(1..4) {
            props.insert(rand_token(rng), rand_token(rng));
        }
        properties.insert(section, props);
    }
    let hook = rng
        .gen_bool(0.3)
        .then(|| format!("hooks/{}.tcl", rand_ident(rng)));
    ProjectConfig {
        project_name: rand_token(rng),
        vendor,
        top_module: rand_ident(rng),
        properties,
        user_generics,
        post_creation_hook: hook,
    }
}

fn rand_lists(rng: &mut ChaCha8Rng) -> Vec<SourceList> {
    let mut used_paths = HashSet::new();
    let mut entry = |rng: &mut ChaCha8Rng, dir: &str, ext: &str| -> Option<SourceEntry> {
        let path = format!("{dir}/{}.{ext}", rand_ident(rng));
        if !used_paths.insert(path.clone()) {
            return None;
        }
        let mut properties = IndexMap::new();
        if rng.gen_bool(0.2) {
            properties.insert("std".to_string(), "08".to_string());
        }
        Some(SourceEntry {
            path,
            library: rand_ident(rng),
            properties,
        })
    };

    let mut lists = Vec::new();
    let mut src_entries = Vec::new();
    for _ in 0..rng.gen_range(1..5) {
        src_entries.extend(entry(rng, "src", "vhd"));
    }
    if src_entries.is_empty() {
        src_entries.push(SourceEntry {
            path: "src/top.vhd".to_string(),
            library: "work".to_string(),
            properties: IndexMap::new(),
        });
    }
    lists.push(SourceList {
        kind: ListKind::Src,
        entries: src_entries,
    });
    if rng.gen_bool(0.6) {
        let entries: Vec<SourceEntry> =
            (0..rng.gen_range(0..3)).filter_map(|_| entry(rng, "sim", "vhd")).collect();
        lists.push(SourceList {
            kind: ListKind::Sim,
            entries,
        });
    }
    if rng.gen_bool(0.6) {
        let entries: Vec<SourceEntry> =
            (0..rng.gen_range(0..3)).filter_map(|_| entry(rng, "con", "sdc")).collect();
        lists.push(SourceList {
            kind: ListKind::Con,
            entries,
        });
    }
    lists
}

fn rand_bindings(rng: &mut ChaCha8Rng, config: &ProjectConfig) -> Vec<GenericBinding> {
    let version = VersionTriple::new(
        rng.gen_range(0..=255),
        rng.gen_range(0..=255),
        rng.gen_range(0..=1000),
    );
    let commit = CommitRef::parse(&rand_sha(rng)).unwrap();
    let time = DateTime::from_timestamp(rng.gen_range(0..4_000_000_000i64), 0).unwrap();
    let mut bindings = builtin_generics(version, &commit, time).unwrap();
    for (name, value) in &config.user_generics {
        bindings.push(GenericBinding::user(name, value.clone()).unwrap());
    }
    bindings
}

// ---------------------------------------------------------------------
// randomized commit graphs and the brute-force version oracle

struct GraphSpec {
    parents: Vec<Vec<usize>>,
    tags: Vec<(usize, VersionTriple)>,
}

fn node_sha(index: usize) -> String {
    format!("{:08x}{:032x}", index + 1, (index + 1) * 13)
}

fn rand_graph_spec(rng: &mut ChaCha8Rng, max_nodes: usize, rooted: bool) -> GraphSpec {
    let n = rng.gen_range(1..=max_nodes);
    let mut parents = vec![Vec::new()];
    for i in 1..n {
        let min = usize::from(rooted);
        let count = rng.gen_range(min..=2.min(i));
        let mut chosen: Vec<usize> = (0..count).map(|_| rng.gen_range(0..i)).collect();
        chosen.sort_unstable();
        chosen.dedup();
        parents.push(chosen);
    }
    let mut tags = Vec::new();
    let mut seen = HashSet::new();
    for _ in 0..rng.gen_range(0..=5) {
        let version = VersionTriple::new(
            rng.gen_range(0..3),
            rng.gen_range(0..3),
            rng.gen_range(0..4),
        );
        if seen.insert(version) {
            tags.push((rng.gen_range(0..n), version));
        }
    }
    GraphSpec { parents, tags }
}

fn build_graph(spec: &GraphSpec, heads: &[(String, usize)]) -> CommitGraph {
    let mut builder = CommitGraph::builder();
    for (i, parents) in spec.parents.iter().enumerate() {
        let shas: Vec<String> = parents.iter().map(|p| node_sha(*p)).collect();
        let refs: Vec<&str> = shas.iter().map(String::as_str).collect();
        builder = builder.commit(&node_sha(i), &refs).unwrap();
    }
    for (node, version) in &spec.tags {
        builder = builder
            .tag(&TagName(*version).to_string(), &node_sha(*node))
            .unwrap();
    }
    for (branch, node) in heads {
        builder = builder.head(branch, &node_sha(*node)).unwrap();
    }
    builder.build().unwrap()
}

/// Brute force: expand the ancestor set to a fixed point, then take the
/// maximum tagged version inside it.
fn oracle_version(spec: &GraphSpec, head: usize) -> (VersionTriple, bool) {
    let mut ancestors = HashSet::from([head]);
    loop {
        let before = ancestors.len();
        for node in ancestors.clone() {
            ancestors.extend(spec.parents[node].iter().copied());
        }
        if ancestors.len() == before {
            break;
        }
    }
    let mut found: Vec<(VersionTriple, usize)> = spec
        .tags
        .iter()
        .filter(|(node, _)| ancestors.contains(node))
        .map(|(node, version)| (*version, *node))
        .collect();
    found.sort();
    match found.last() {
        Some((version, node)) => (*version, *node == head),
        None => (VersionTriple::ZERO, false),
    }
}

// ---------------------------------------------------------------------
// criteria

#[test]
fn criterion_1_reproducible_script_generation() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let config = rand_config(&mut rng);
        let lists = rand_lists(&mut rng);
        let bindings = rand_bindings(&mut rng, &config);
        let input = GenerationInput {
            config,
            lists,
            bindings,
            repo_root: std::path::PathBuf::from("/some/machine/path"),
        };
        let first = generate_creation_script(&input).unwrap();
        let second = generate_creation_script(&input).unwrap();
        assert_eq!(first, second, "script generation must be byte-identical");
        assert!(
            !first.contains("/some/machine/path"),
            "machine paths must not leak into scripts"
        );
    }
    pass(1, "reproducibility", started, Duration::from_secs(5));
}

#[test]
fn criterion_2_parser_round_trip() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let config = rand_config(&mut rng);
        let serialized = serialize_project_config(&config);
        let reparsed = parse_project_config(&serialized)
            .unwrap_or_else(|e| panic!("canonical text must parse: {e}\n{serialized}"));
        assert_eq!(reparsed, config, "parse(serialize(c)) == c");
        assert_eq!(
            serialize_project_config(&reparsed),
            serialized,
            "serialization is idempotent"
        );
    }
    pass(2, "parser round trip", started, Duration::from_secs(5));
}

#[test]
fn criterion_3_version_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let spec = rand_graph_spec(&mut rng, 20, false);
        let graph = build_graph(&spec, &[]);
        for node in 0..spec.parents.len() {
            let head = graph.commit(&node_sha(node)).unwrap().clone();
            let (version, exact, _) = compute_repo_version(&graph, &head).unwrap();
            let (oracle_v, oracle_exact) = oracle_version(&spec, node);
            assert_eq!(version, oracle_v, "version mismatch at node {node}");
            assert_eq!(exact, oracle_exact, "exactness mismatch at node {node}");
        }
    }
    pass(3, "version oracle", started, Duration::from_secs(10));
}

#[test]
fn criterion_4_patch_increment_rule() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3); // same corpus as the oracle
    for _ in 0..500 {
        let spec = rand_graph_spec(&mut rng, 20, false);
        let main_head = spec.parents.len() - 1;
        let graph = build_graph(&spec, &[("main".to_string(), main_head)]);
        let (base, _) = oracle_version(&spec, main_head);
        let expected = VersionTriple::new(base.major, base.minor, base.patch + 1);
        match plan_tag(&graph, &BranchClass::Main, Bump::Patch) {
            Ok(tag) => assert_eq!(tag.version(), expected, "patch plan must be base p+1"),
            Err(VersionerError::TagCollision { tag }) => {
                assert_eq!(tag.version(), expected);
                assert!(graph.has_tag(&tag), "collision must name an existing tag");
            }
            Err(other) => panic!("unexpected planning error: {other}"),
        }
    }
    pass(4, "patch-increment rule", started, Duration::from_secs(10));
}

#[test]
fn criterion_5_hotfix_independence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut applied = 0usize;
    for _ in 0..200 {
        // release lines trail the main line: random tags stay below major
        // 3 and the main head carries a strictly greater version tag
        let mut spec = rand_graph_spec(&mut rng, 12, true);
        if spec.parents.len() < 2 {
            spec.parents.push(vec![0]);
        }
        let main_head = spec.parents.len() - 1;
        let release_head = rng.gen_range(0..main_head);
        spec.tags.retain(|(_, v)| v.major < 3);
        let main_version = VersionTriple::new(
            rng.gen_range(3..5),
            rng.gen_range(0..3),
            rng.gen_range(0..3),
        );
        spec.tags.push((main_head, main_version));

        let (release_base, _) = oracle_version(&spec, release_head);
        let release_class = BranchClass::Release {
            major: release_base.major,
            minor: release_base.minor,
        };
        let heads = vec![
            ("main".to_string(), main_head),
            (
                format!("release/{}.{}", release_base.major, release_base.minor),
                release_head,
            ),
        ];
        let mut graph = build_graph(&spec, &heads);

        let before = plan_tag(&graph, &BranchClass::Main, Bump::Patch).unwrap();
        if let Ok(hotfix) = plan_tag(&graph, &release_class, Bump::Patch) {
            let target = graph.commit(&node_sha(release_head)).unwrap().clone();
            graph.add_tag(hotfix, &target).unwrap();
            applied += 1;
        }
        let after = plan_tag(&graph, &BranchClass::Main, Bump::Patch).unwrap();
        assert_eq!(before, after, "release hotfix changed the main plan");
    }
    assert!(applied >= 50, "only {applied}/200 hotfixes applied; corpus too thin");
    pass(5, "hotfix independence", started, Duration::from_secs(10));
}

#[test]
fn criterion_6_traceability_round_trip() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dir = tempfile::tempdir().unwrap();
    let time = DateTime::from_timestamp(1_673_786_096, 0).unwrap();
    for graph_index in 0..100 {
        // node_sha gives every commit a unique sha32 prefix
        let spec = rand_graph_spec(&mut rng, 20, false);
        let graph = build_graph(&spec, &[]);
        for node in 0..spec.parents.len() {
            let commit = graph.commit(&node_sha(node)).unwrap().clone();
            let bindings = builtin_generics(VersionTriple::new(0, 1, 0), &commit, time).unwrap();
            let blob = embed_into_artifact(&bindings).unwrap();
            let recovered = verify_traceability(&blob, &graph).unwrap();
            assert_eq!(recovered, commit, "embed/verify must recover the commit");
        }

        // a renamed blob file verifies identically
        let commit = graph.commit(&node_sha(0)).unwrap().clone();
        let blob = embed_into_artifact(
            &builtin_generics(VersionTriple::new(0, 1, 0), &commit, time).unwrap(),
        )
        .unwrap();
        let path = dir.path().join(format!("artifact-{graph_index}.bit"));
        fs::write(&path, blob.to_bytes()).unwrap();
        let loaded = ArtifactBlob::from_bytes(&fs::read(&path).unwrap()).unwrap();
        let before_rename = verify_traceability(&loaded, &graph).unwrap();
        let renamed = dir.path().join(format!("renamed-{graph_index}.bit"));
        fs::rename(&path, &renamed).unwrap();
        let reloaded = ArtifactBlob::from_bytes(&fs::read(&renamed).unwrap()).unwrap();
        let after_rename = verify_traceability(&reloaded, &graph).unwrap();
        assert_eq!(before_rename, after_rename);
        assert_eq!(after_rename, commit);
    }
    pass(6, "traceability round trip", started, Duration::from_secs(5));
}

#[test]
fn criterion_7_ci_topology() {
    let started = Instant::now();
    let providers = [Provider::Github, Provider::Gitlab];
    let containers = [
        ContainerMode::None,
        ContainerMode::Docker {
            image: "vendor/tools:1.0".to_string(),
        },
        ContainerMode::Apptainer,
    ];
    let target_sets: [&[&str]; 3] = [
        &["main"],
        &["main", "develop"],
        &["main", "develop", "release/2.1"],
    ];

    for provider in providers {
        for container in &containers {
            for doxygen in [false, true] {
                for release in [false, true] {
                    for targets in target_sets {
                        let mut cfg =
                            CiConfig::new(provider, vec!["alpha".to_string(), "beta".to_string()]);
                        cfg.target_branches = targets.iter().map(|t| t.to_string()).collect();
                        cfg.enable_doxygen = doxygen;
                        cfg.enable_release = release;
                        cfg.container = container.clone();

                        let yaml = emit_workflow(&cfg).unwrap();
                        assert_eq!(
                            yaml,
                            emit_workflow(&cfg).unwrap(),
                            "emission must be deterministic"
                        );
                        let parsed: serde_yaml::Value = serde_yaml::from_str(&yaml)
                            .unwrap_or_else(|e| panic!("invalid YAML: {e}\n{yaml}"));

                        match provider {
                            Provider::Github => {
                                for branch in targets {
                                    for trigger in ["pull_request", "push"] {
                                        let branches = parsed["on"][trigger]["branches"]
                                            .as_sequence()
                                            .expect("trigger branch list");
                                        assert!(
                                            branches.iter().any(|b| b.as_str() == Some(branch)),
                                            "{branch} missing from {trigger} trigger"
                                        );
                                    }
                                }
                            }
                            Provider::Gitlab => {
                                for branch in targets {
                                    assert!(yaml.contains(&format!(
                                        "$CI_MERGE_REQUEST_TARGET_BRANCH_NAME == \"{branch}\""
                                    )));
                                    assert!(yaml
                                        .contains(&format!("$CI_COMMIT_BRANCH == \"{branch}\"")));
                                }
                            }
                        }

                        let mut events = vec![ForgeEvent::Push {
                            branch: "scratch".to_string(),
                        }];
                        for target in targets {
                            events.push(ForgeEvent::PrOpened {
                                source: "feature/x".to_string(),
                                target: target.to_string(),
                            });
                            events.push(ForgeEvent::PrMerged {
                                target: target.to_string(),
                            });
                            events.push(ForgeEvent::Push {
                                branch: target.to_string(),
                            });
                        }
                        for event in &events {
                            let plan = simulate_pipeline(&cfg, event);
                            assert!(
                                !(plan.has_stage(Stage::Simulate) && plan.has_stage(Stage::Tag)),
                                "plan mixes simulate and tag for {event:?}"
                            );
                            assert!(
                                !(plan.has_stage(Stage::Build) && plan.has_stage(Stage::Tag)),
                                "plan mixes build and tag for {event:?}"
                            );
                        }
                    }
                }
            }
        }
    }
    pass(7, "ci topology", started, Duration::from_secs(5));
}

#[test]
fn criterion_8_packing_checks() {
    let started = Instant::now();

    // exhaustive major/minor grid with patch boundaries: strictly
    // increasing packed values in lexicographic order imply injectivity
    // and order preservation over the sample
    let mut previous: Option<u32> = None;
    for major in 0..=255u32 {
        for minor in 0..=255u32 {
            for patch in [0u32, 1, 65534, 65535] {
                let packed = pack_version(VersionTriple::new(major, minor, patch)).unwrap();
                if let Some(prev) = previous {
                    assert!(prev < packed, "packing must be strictly increasing");
                }
                previous = Some(packed);
            }
        }
    }

    // sha32 is a pure prefix function
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let sha = rand_sha(&mut rng);
        let mutated = format!("{}{:032x}", &sha[..8], rng.gen::<u128>());
        let original = sha32_of(&sha).unwrap();
        assert_eq!(original, sha32_of(&mutated).unwrap());
        assert_eq!(original, u32::from_str_radix(&sha[..8], 16).unwrap());
    }

    pass(8, "packing checks", started, Duration::from_secs(5));
}

#[test]
fn criterion_9_end_to_end_cli() {
    let started = Instant::now();
    let repo = scripted_repo(); // init, commit, tag v0.1.0, commit
    let env = plain_env();

    let head = git_stdout(repo.path(), &["rev-parse", "HEAD"]);
    let version = run(&args(&["version"]), &env, repo.path());
    assert_eq!(version.exit_code, 0, "stderr: {}", version.stderr);
    assert_eq!(version.stdout, format!("0.1.0+{}\n", &head[..8]));

    let plan = run(&args(&["tag", "--plan"]), &env, repo.path());
    assert_eq!(plan.exit_code, 0, "stderr: {}", plan.stderr);
    assert_eq!(plan.stdout, "v0.1.1\n");

    let workflow = run(
        &args(&["ci", "generate", "--provider", "github"]),
        &env,
        repo.path(),
    );
    assert_eq!(workflow.exit_code, 0, "stderr: {}", workflow.stderr);
    let yaml = fs::read_to_string(repo.path().join(".github/workflows/hog.yml")).unwrap();
    let parsed: serde_yaml::Value = serde_yaml::from_str(&yaml).expect("workflow parses as YAML");
    assert!(parsed.is_mapping());

    pass(9, "end-to-end", started, Duration::from_secs(30));
}
