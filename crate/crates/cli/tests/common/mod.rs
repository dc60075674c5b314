//! Shared fixtures: scripted temporary repositories with a demo project.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

pub fn git(dir: &Path, args: &[&str]) {
    let status = Command::new("git")
        .args(args)
        .current_dir(dir)
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .env("GIT_CONFIG_SYSTEM", "/dev/null")
        .env("GIT_AUTHOR_NAME", "test")
        .env("GIT_AUTHOR_EMAIL", "test@example.com")
        .env("GIT_COMMITTER_NAME", "test")
        .env("GIT_COMMITTER_EMAIL", "test@example.com")
        .env("GIT_AUTHOR_DATE", "1673786096 +0000")
        .env("GIT_COMMITTER_DATE", "1673786096 +0000")
        .status()
        .expect("git must be runnable");
    assert!(status.success(), "git {args:?} failed");
}

pub fn git_stdout(dir: &Path, args: &[&str]) -> String {
    let output = Command::new("git")
        .args(args)
        .current_dir(dir)
        .output()
        .expect("git must be runnable");
    assert!(output.status.success(), "git {args:?} failed");
    String::from_utf8(output.stdout).unwrap().trim().to_string()
}

pub fn write_demo_project(root: &Path) {
    let project = root.join("Top/demo");
    fs::create_dir_all(project.join("list")).unwrap();
    fs::write(
        project.join("hog.conf"),
        "[main]\nvendor=vivado\ntop=top_demo\nname=demo\n\n[generics]\nWIDTH=int:8\n",
    )
    .unwrap();
    fs::write(
        project.join("list/demo.src"),
        "src/top_demo.vhd lib=work\nsrc/util.vhd lib=common\n",
    )
    .unwrap();
    fs::write(project.join("list/demo.con"), "con/pins.sdc\n").unwrap();
    fs::create_dir_all(root.join("src")).unwrap();
    fs::create_dir_all(root.join("con")).unwrap();
    fs::write(root.join("src/top_demo.vhd"), "-- top\n").unwrap();
    fs::write(root.join("src/util.vhd"), "-- util\n").unwrap();
    fs::write(root.join("con/pins.sdc"), "# pins\n").unwrap();
}

/// init, add the demo project, commit, tag v0.1.0, then one more commit.
pub fn scripted_repo() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    git(dir.path(), &["init", "-q", "-b", "main"]);
    write_demo_project(dir.path());
    git(dir.path(), &["add", "."]);
    git(dir.path(), &["commit", "-q", "-m", "first"]);
    git(dir.path(), &["tag", "v0.1.0"]);
    fs::write(dir.path().join("src/util.vhd"), "-- util v2\n").unwrap();
    git(dir.path(), &["commit", "-q", "-am", "second"]);
    dir
}

pub fn plain_env() -> BTreeMap<String, String> {
    BTreeMap::new()
}

pub fn args(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}
