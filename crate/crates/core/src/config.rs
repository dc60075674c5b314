//! Project configuration and source-list parsing.
//!
//! The configuration file (`hog.conf`) is INI-style: `[section]` headers,
//! `key=value` lines, `#` comment lines, UTF-8 with LF or CRLF endings.
//! The mandatory `[main]` section carries `vendor` and `top`; a `[generics]`
//! section declares typed values passed to the HDL top module; every other
//! section is an opaque vendor property block, preserved verbatim.
//!
//! List files (`<name>.src`, `<name>.sim`, `<name>.con`) name one source
//! file per line: `path [lib=<library>] [key=value ...]`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

/// Generic names injected by the tool itself; user generics may not use
/// them (compared case-insensitively, since HDL generics are).
pub const RESERVED_GENERIC_NAMES: [&str; 4] =
    ["GLOBAL_SHA", "GLOBAL_VER", "GLOBAL_DATE", "GLOBAL_TIME"];

/// Returns true if `name` collides with a reserved builtin generic name.
pub fn is_reserved_generic_name(name: &str) -> bool {
    RESERVED_GENERIC_NAMES
        .iter()
        .any(|r| r.eq_ignore_ascii_case(name))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vendor {
    Vivado,
    Quartus,
    Libero,
}

impl Vendor {
    pub const ALL: [Vendor; 3] = [Vendor::Vivado, Vendor::Quartus, Vendor::Libero];

    pub fn as_str(&self) -> &'static str {
        match self {
            Vendor::Vivado => "vivado",
            Vendor::Quartus => "quartus",
            Vendor::Libero => "libero",
        }
    }

    pub fn parse(s: &str) -> Option<Vendor> {
        match s {
            "vivado" => Some(Vendor::Vivado),
            "quartus" => Some(Vendor::Quartus),
            "libero" => Some(Vendor::Libero),
            _ => None,
        }
    }
}

impl fmt::Display for Vendor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed generic value. The configuration encodes the kind explicitly
/// (`int:8`, `bv32:0xA94A8FE5`, `str:text`, `bool:true`); untyped values
/// are rejected so vendor script rendering never has to guess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypedValue {
    Integer(i64),
    BitVector32(u32),
    Str(String),
    Boolean(bool),
}

impl TypedValue {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TypedValue::Integer(_) => "int",
            TypedValue::BitVector32(_) => "bv32",
            TypedValue::Str(_) => "str",
            TypedValue::Boolean(_) => "bool",
        }
    }

    /// Canonical `kind:value` form used in configuration files.
    pub fn render_conf(&self) -> String {
        match self {
            TypedValue::Integer(v) => format!("int:{v}"),
            TypedValue::BitVector32(v) => format!("bv32:0x{v:08X}"),
            TypedValue::Str(s) => format!("str:{s}"),
            TypedValue::Boolean(b) => format!("bool:{b}"),
        }
    }

    fn parse_conf(raw: &str, line: usize) -> Result<TypedValue, ConfigError> {
        let (kind, payload) = raw.split_once(':').ok_or_else(|| ConfigError::Syntax {
            line,
            reason: format!("generic value `{raw}` lacks a `kind:` prefix (int/bv32/str/bool)"),
        })?;
        match kind {
            "int" => payload
                .parse::<i64>()
                .map(TypedValue::Integer)
                .map_err(|_| ConfigError::Syntax {
                    line,
                    reason: format!("`{payload}` is not a valid signed 64-bit integer"),
                }),
            "bv32" => {
                let digits = payload
                    .strip_prefix("0x")
                    .or_else(|| payload.strip_prefix("0X"))
                    .ok_or_else(|| ConfigError::Syntax {
                        line,
                        reason: format!("bv32 value `{payload}` must use a 0x prefix"),
                    })?;
                if digits.is_empty() || digits.len() > 8 {
                    return Err(ConfigError::Syntax {
                        line,
                        reason: format!("bv32 value `{payload}` must have 1..8 hex digits"),
                    });
                }
                u32::from_str_radix(digits, 16)
                    .map(TypedValue::BitVector32)
                    .map_err(|_| ConfigError::Syntax {
                        line,
                        reason: format!("`{payload}` is not a valid 32-bit hex value"),
                    })
            }
            "str" => Ok(TypedValue::Str(payload.to_string())),
            "bool" => match payload {
                "true" => Ok(TypedValue::Boolean(true)),
                "false" => Ok(TypedValue::Boolean(false)),
                _ => Err(ConfigError::Syntax {
                    line,
                    reason: format!("bool value must be `true` or `false`, got `{payload}`"),
                }),
            },
            _ => Err(ConfigError::Syntax {
                line,
                reason: format!("unknown value kind `{kind}` (expected int/bv32/str/bool)"),
            }),
        }
    }
}

/// Parsed project configuration.
///
/// `properties` holds the opaque vendor sections keyed by section name
/// (sorted); the inner maps preserve key declaration order. `user_generics`
/// preserves declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectConfig {
    pub project_name: String,
    pub vendor: Vendor,
    pub top_module: String,
    pub properties: BTreeMap<String, IndexMap<String, String>>,
    pub user_generics: IndexMap<String, TypedValue>,
    /// Repo-relative path of the post-creation hook script, when configured.
    pub post_creation_hook: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ListKind {
    Src,
    Sim,
    Con,
}

impl ListKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ListKind::Src => "src",
            ListKind::Sim => "sim",
            ListKind::Con => "con",
        }
    }

    /// Maps a list-file extension (`src`/`sim`/`con`) to its kind.
    pub fn from_extension(ext: &str) -> Option<ListKind> {
        match ext {
            "src" => Some(ListKind::Src),
            "sim" => Some(ListKind::Sim),
            "con" => Some(ListKind::Con),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceEntry {
    /// Repo-relative path, forward slashes.
    pub path: String,
    pub library: String,
    pub properties: IndexMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceList {
    pub kind: ListKind,
    pub entries: Vec<SourceEntry>,
}

/// Errors from configuration and list-file parsing. `line` is 1-based;
/// line 0 marks a whole-file condition (e.g. a missing section).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("syntax error at line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: generic `{name}` collides with a reserved builtin generic")]
    ReservedName { line: usize, name: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: duplicate path `{path}`")]
    DuplicatePath { line: usize, path: String },
    #[error("line {line}: path `{path}` escapes the repository root")]
    PathEscape { line: usize, path: String },
}

impl ConfigError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            ConfigError::Syntax { .. } => "SyntaxError",
            ConfigError::ReservedName { .. } => "ReservedNameError",
            ConfigError::DuplicateKey { .. } => "DuplicateKeyError",
            ConfigError::DuplicatePath { .. } => "DuplicatePathError",
            ConfigError::PathEscape { .. } => "PathEscapeError",
        }
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-')
}

fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

enum PathIssue {
    Empty,
    Backslash,
    Absolute,
    Escapes,
}

/// Checks that a path is repo-relative: non-empty, forward slashes, no
/// leading `/`, and no `..` sequence that climbs above the repo root.
fn check_repo_relative(path: &str) -> Result<(), PathIssue> {
    if path.is_empty() {
        return Err(PathIssue::Empty);
    }
    if path.contains('\\') {
        return Err(PathIssue::Backslash);
    }
    if path.starts_with('/') {
        return Err(PathIssue::Absolute);
    }
    let mut depth: i32 = 0;
    for comp in path.split('/') {
        match comp {
            "" | "." => {}
            ".." => {
                depth -= 1;
                if depth < 0 {
                    return Err(PathIssue::Escapes);
                }
            }
            _ => depth += 1,
        }
    }
    Ok(())
}

/// Collapses `.` and in-range `..` components for duplicate detection.
fn normalize_path(path: &str) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for comp in path.split('/') {
        match comp {
            "" | "." => {}
            ".." => {
                parts.pop();
            }
            _ => parts.push(comp),
        }
    }
    parts.join("/")
}

#[derive(PartialEq)]
enum Section {
    None,
    Main,
    Generics,
    Other(String),
}

/// Parses `hog.conf` text into a [`ProjectConfig`].
///
/// When `[main]` has no `name` key the project name defaults to the top
/// module name.
pub fn parse_project_config(text: &str) -> Result<ProjectConfig, ConfigError> {
    let mut section = Section::None;
    let mut seen_sections: HashSet<String> = HashSet::new();

    let mut name: Option<String> = None;
    let mut vendor: Option<Vendor> = None;
    let mut top: Option<String> = None;
    let mut hook: Option<String> = None;
    let mut generics: IndexMap<String, TypedValue> = IndexMap::new();
    let mut properties: BTreeMap<String, IndexMap<String, String>> = BTreeMap::new();
    let mut main_line = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        if let Some(inner) = line.strip_prefix('[') {
            let header = inner.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                reason: "section header is missing `]`".to_string(),
            })?;
            if !is_token(header) {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: format!("invalid section name `{header}`"),
                });
            }
            if !seen_sections.insert(header.to_string()) {
                return Err(ConfigError::DuplicateKey {
                    line: line_no,
                    key: format!("[{header}]"),
                });
            }
            section = match header {
                "main" => {
                    main_line = line_no;
                    Section::Main
                }
                "generics" => Section::Generics,
                other => {
                    properties.insert(other.to_string(), IndexMap::new());
                    Section::Other(other.to_string())
                }
            };
            continue;
        }

        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            reason: format!("expected `key=value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();

        match &section {
            Section::None => {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: "key outside of any [section]".to_string(),
                })
            }
            Section::Main => match key {
                "vendor" => {
                    if vendor.is_some() {
                        return Err(ConfigError::DuplicateKey {
                            line: line_no,
                            key: key.to_string(),
                        });
                    }
                    vendor = Some(Vendor::parse(value).ok_or_else(|| ConfigError::Syntax {
                        line: line_no,
                        reason: format!(
                            "unknown vendor `{value}` (expected vivado/quartus/libero)"
                        ),
                    })?);
                }
                "top" => {
                    if top.is_some() {
                        return Err(ConfigError::DuplicateKey {
                            line: line_no,
                            key: key.to_string(),
                        });
                    }
                    if !is_identifier(value) {
                        return Err(ConfigError::Syntax {
                            line: line_no,
                            reason: format!("`{value}` is not a valid HDL entity name"),
                        });
                    }
                    top = Some(value.to_string());
                }
                "name" => {
                    if name.is_some() {
                        return Err(ConfigError::DuplicateKey {
                            line: line_no,
                            key: key.to_string(),
                        });
                    }
                    if !is_token(value) {
                        return Err(ConfigError::Syntax {
                            line: line_no,
                            reason: format!("`{value}` is not a valid project name"),
                        });
                    }
                    name = Some(value.to_string());
                }
                "post_creation" => {
                    if hook.is_some() {
                        return Err(ConfigError::DuplicateKey {
                            line: line_no,
                            key: key.to_string(),
                        });
                    }
                    match check_repo_relative(value) {
                        Ok(()) => hook = Some(value.to_string()),
                        Err(PathIssue::Escapes) => {
                            return Err(ConfigError::PathEscape {
                                line: line_no,
                                path: value.to_string(),
                            })
                        }
                        Err(_) => {
                            return Err(ConfigError::Syntax {
                                line: line_no,
                                reason: format!("hook path `{value}` must be repo-relative"),
                            })
                        }
                    }
                }
                other => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("unknown [main] key `{other}`"),
                    })
                }
            },
            Section::Generics => {
                if !is_identifier(key) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("`{key}` is not a valid generic name"),
                    });
                }
                if is_reserved_generic_name(key) {
                    return Err(ConfigError::ReservedName {
                        line: line_no,
                        name: key.to_string(),
                    });
                }
                if generics.keys().any(|g| g.eq_ignore_ascii_case(key)) {
                    return Err(ConfigError::DuplicateKey {
                        line: line_no,
                        key: key.to_string(),
                    });
                }
                generics.insert(key.to_string(), TypedValue::parse_conf(value, line_no)?);
            }
            Section::Other(section_name) => {
                if !is_token(key) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("invalid property key `{key}`"),
                    });
                }
                let props = properties.get_mut(section_name).expect("section registered");
                if props.contains_key(key) {
                    return Err(ConfigError::DuplicateKey {
                        line: line_no,
                        key: key.to_string(),
                    });
                }
                props.insert(key.to_string(), value.to_string());
            }
        }
    }

    if main_line == 0 {
        return Err(ConfigError::Syntax {
            line: 0,
            reason: "missing [main] section".to_string(),
        });
    }
    let vendor = vendor.ok_or_else(|| ConfigError::Syntax {
        line: main_line,
        reason: "[main] is missing the `vendor` key".to_string(),
    })?;
    let top_module = top.ok_or_else(|| ConfigError::Syntax {
        line: main_line,
        reason: "[main] is missing the `top` key".to_string(),
    })?;
    let project_name = name.unwrap_or_else(|| top_module.clone());

    Ok(ProjectConfig {
        project_name,
        vendor,
        top_module,
        properties,
        user_generics: generics,
        post_creation_hook: hook,
    })
}

/// Parses a list file. `kind` is explicit so the parser is usable without
/// a filesystem; [`ListKind::from_extension`] maps file extensions.
pub fn parse_list_file(text: &str, kind: ListKind) -> Result<SourceList, ConfigError> {
    let mut entries = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        let mut tokens = line.split_whitespace();
        let path = tokens.next().expect("non-empty line has a first token");
        match check_repo_relative(path) {
            Ok(()) => {}
            Err(PathIssue::Escapes) | Err(PathIssue::Absolute) => {
                return Err(ConfigError::PathEscape {
                    line: line_no,
                    path: path.to_string(),
                })
            }
            Err(_) => {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: format!("invalid path `{path}` (use forward slashes)"),
                })
            }
        }
        if !seen.insert(normalize_path(path)) {
            return Err(ConfigError::DuplicatePath {
                line: line_no,
                path: path.to_string(),
            });
        }

        let mut library: Option<String> = None;
        let mut props: IndexMap<String, String> = IndexMap::new();
        for token in tokens {
            let (key, value) = token.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                reason: format!("expected `key=value`, got `{token}`"),
            })?;
            if key == "lib" {
                if library.is_some() {
                    return Err(ConfigError::DuplicateKey {
                        line: line_no,
                        key: "lib".to_string(),
                    });
                }
                if !is_identifier(value) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("`{value}` is not a valid library name"),
                    });
                }
                library = Some(value.to_string());
            } else {
                if !is_token(key) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("invalid property key `{key}`"),
                    });
                }
                if props.contains_key(key) {
                    return Err(ConfigError::DuplicateKey {
                        line: line_no,
                        key: key.to_string(),
                    });
                }
                props.insert(key.to_string(), value.to_string());
            }
        }

        entries.push(SourceEntry {
            path: path.to_string(),
            library: library.unwrap_or_else(|| "work".to_string()),
            properties: props,
        });
    }

    Ok(SourceList { kind, entries })
}

/// Renders the canonical configuration text: `[main]` first, then
/// `[generics]`, then vendor property sections in alphabetical order.
/// `parse(serialize(c))` reproduces `c`, and serialization is idempotent
/// byte-for-byte.
pub fn serialize_project_config(config: &ProjectConfig) -> String {
    let mut out = String::new();
    out.push_str("[main]\n");
    out.push_str(&format!("vendor={}\n", config.vendor));
    out.push_str(&format!("top={}\n", config.top_module));
    out.push_str(&format!("name={}\n", config.project_name));
    if let Some(hook) = &config.post_creation_hook {
        out.push_str(&format!("post_creation={hook}\n"));
    }

    if !config.user_generics.is_empty() {
        out.push_str("\n[generics]\n");
        for (name, value) in &config.user_generics {
            out.push_str(&format!("{name}={}\n", value.render_conf()));
        }
    }

    for (section, props) in &config.properties {
        out.push_str(&format!("\n[{section}]\n"));
        for (key, value) in props {
            out.push_str(&format!("{key}={value}\n"));
        }
    }

    out
}

/// Checks that a configuration and its lists are jointly usable for
/// project generation. Returns human-readable diagnostics; empty means
/// valid.
pub fn validate_config(config: &ProjectConfig, lists: &[SourceList]) -> Vec<String> {
    let mut diags = Vec::new();

    if !is_token(&config.project_name) {
        diags.push(format!(
            "project name `{}` is not a valid token",
            config.project_name
        ));
    }
    if !is_identifier(&config.top_module) {
        diags.push(format!(
            "top module `{}` is not a valid HDL entity name",
            config.top_module
        ));
    }

    let has_src = lists
        .iter()
        .any(|l| l.kind == ListKind::Src && !l.entries.is_empty());
    if !has_src {
        diags.push("no source files: at least one src entry is required".to_string());
    }

    if let Some(hook) = &config.post_creation_hook {
        if check_repo_relative(hook).is_err() {
            diags.push(format!("hook path must be relative: `{hook}`"));
        }
    }

    let mut lowered: HashSet<String> = HashSet::new();
    for (name, value) in &config.user_generics {
        if !is_identifier(name) {
            diags.push(format!("generic name `{name}` is not a valid identifier"));
        }
        if is_reserved_generic_name(name) {
            diags.push(format!("generic `{name}` uses a reserved builtin name"));
        }
        if !lowered.insert(name.to_ascii_lowercase()) {
            diags.push(format!(
                "generic `{name}` duplicates another (case-insensitive)"
            ));
        }
        if let TypedValue::Str(s) = value {
            if s.contains('\n') || s.contains('\r') || s.trim() != s {
                diags.push(format!(
                    "generic `{name}` string value must be single-line without surrounding whitespace"
                ));
            }
        }
    }

    for list in lists {
        for entry in &list.entries {
            if check_repo_relative(&entry.path).is_err() {
                diags.push(format!("list path `{}` is not repo-relative", entry.path));
            }
        }
    }

    for (section, props) in &config.properties {
        for (key, value) in props {
            if value.contains('\n') || value.contains('\r') || value.trim() != value {
                diags.push(format!(
                    "property `{key}` in [{section}] must be single-line without surrounding whitespace"
                ));
            }
        }
    }

    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let cfg = parse_project_config("[main]\nvendor=vivado\ntop=top_mod\n").unwrap();
        assert_eq!(cfg.vendor, Vendor::Vivado);
        assert_eq!(cfg.top_module, "top_mod");
        assert_eq!(cfg.project_name, "top_mod");
        assert!(cfg.user_generics.is_empty());
        assert!(cfg.properties.is_empty());
        assert!(cfg.post_creation_hook.is_none());
    }

    #[test]
    fn typed_generics_parse() {
        let cfg = parse_project_config(
            "[main]\nvendor=vivado\ntop=t\n[generics]\nWIDTH=int:8\nUSE_GTX=bool:true\n",
        )
        .unwrap();
        assert_eq!(cfg.user_generics.len(), 2);
        assert_eq!(cfg.user_generics["WIDTH"], TypedValue::Integer(8));
        assert_eq!(cfg.user_generics["USE_GTX"], TypedValue::Boolean(true));
        // declaration order preserved
        let names: Vec<&str> = cfg.user_generics.keys().map(String::as_str).collect();
        assert_eq!(names, ["WIDTH", "USE_GTX"]);
    }

    #[test]
    fn reserved_generic_name_rejected() {
        let err =
            parse_project_config("[main]\nvendor=vivado\ntop=t\n[generics]\nGLOBAL_SHA=int:1\n")
                .unwrap_err();
        assert_eq!(err.name(), "ReservedNameError");
        // case-insensitive reservation
        let err =
            parse_project_config("[main]\nvendor=vivado\ntop=t\n[generics]\nglobal_ver=int:1\n")
                .unwrap_err();
        assert_eq!(err.name(), "ReservedNameError");
    }

    #[test]
    fn case_insensitive_duplicate_generic_rejected() {
        let err = parse_project_config(
            "[main]\nvendor=vivado\ntop=t\n[generics]\nWIDTH=int:8\nwidth=int:9\n",
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 6, .. }));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_project_config("[main]\nvendor=vivado\ntop=t\nbogus\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Syntax {
                line: 4,
                reason: "expected `key=value`, got `bogus`".to_string()
            }
        );
        let err = parse_project_config("[main]\nvendor=notreal\ntop=t\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
    }

    #[test]
    fn missing_main_pieces_rejected() {
        assert!(matches!(
            parse_project_config("[generics]\nW=int:1\n"),
            Err(ConfigError::Syntax { line: 0, .. })
        ));
        assert!(parse_project_config("[main]\ntop=t\n").is_err());
        assert!(parse_project_config("[main]\nvendor=vivado\n").is_err());
    }

    #[test]
    fn unknown_sections_are_preserved() {
        let text = "[main]\nvendor=quartus\ntop=t\n[fitter]\nSEED=3\nEFFORT=high\n";
        let cfg = parse_project_config(text).unwrap();
        assert_eq!(cfg.properties["fitter"]["SEED"], "3");
        assert_eq!(cfg.properties["fitter"]["EFFORT"], "high");
    }

    #[test]
    fn crlf_and_comments_accepted() {
        let cfg = parse_project_config(
            "# header\r\n[main]\r\nvendor=libero\r\ntop=t\r\n\r\n# trailing\r\n",
        )
        .unwrap();
        assert_eq!(cfg.vendor, Vendor::Libero);
    }

    #[test]
    fn duplicate_section_rejected() {
        let err =
            parse_project_config("[main]\nvendor=vivado\ntop=t\n[x]\na=1\n[x]\nb=2\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 6, .. }));
    }

    #[test]
    fn serialize_starts_with_main() {
        let cfg = parse_project_config("[main]\nvendor=libero\ntop=t\n").unwrap();
        let text = serialize_project_config(&cfg);
        assert!(text.starts_with("[main]\n"));
    }

    #[test]
    fn serialize_renders_canonical_generic_lines() {
        let cfg = parse_project_config("[main]\nvendor=vivado\ntop=t\n[generics]\nWIDTH=int:8\n")
            .unwrap();
        let text = serialize_project_config(&cfg);
        assert!(text.contains("WIDTH=int:8\n"), "got:\n{text}");
    }

    #[test]
    fn round_trip_fixture() {
        let text = "[main]\nvendor=vivado\ntop=top_mod\nname=proj1\npost_creation=Top/proj1/post-creation.tcl\n\
                    \n[generics]\nWIDTH=int:8\nMASK=bv32:0x0000FF00\nTITLE=str:demo\nFAST=bool:false\n\
                    \n[synth]\nstrategy=Flow_PerfOptimized\n";
        let first = parse_project_config(text).unwrap();
        let serialized = serialize_project_config(&first);
        let second = parse_project_config(&serialized).unwrap();
        assert_eq!(first, second);
        // byte-for-byte idempotence
        assert_eq!(serialized, serialize_project_config(&second));
    }

    #[test]
    fn bv32_is_normalized_uppercase() {
        let cfg = parse_project_config("[main]\nvendor=vivado\ntop=t\n[generics]\nM=bv32:0xab\n")
            .unwrap();
        assert_eq!(cfg.user_generics["M"], TypedValue::BitVector32(0xAB));
        let text = serialize_project_config(&cfg);
        assert!(text.contains("M=bv32:0x000000AB\n"));
    }

    #[test]
    fn list_preserves_order_and_skips_comments() {
        let list = parse_list_file(
            "src/top.vhd lib=work\n# comment\nsrc/util.vhd lib=common\n",
            ListKind::Src,
        )
        .unwrap();
        assert_eq!(list.entries.len(), 2);
        assert_eq!(list.entries[0].path, "src/top.vhd");
        assert_eq!(list.entries[0].library, "work");
        assert_eq!(list.entries[1].path, "src/util.vhd");
        assert_eq!(list.entries[1].library, "common");
    }

    #[test]
    fn empty_list_is_empty() {
        let list = parse_list_file("", ListKind::Sim).unwrap();
        assert!(list.entries.is_empty());
        assert_eq!(list.kind, ListKind::Sim);
    }

    #[test]
    fn escaping_path_rejected() {
        let err = parse_list_file("../other/top.vhd\n", ListKind::Src).unwrap_err();
        assert_eq!(err.name(), "PathEscapeError");
        // `..` that stays inside the repo is fine
        assert!(parse_list_file("src/../src/top.vhd\n", ListKind::Src).is_ok());
        // absolute path
        let err = parse_list_file("/abs/top.vhd\n", ListKind::Src).unwrap_err();
        assert_eq!(err.name(), "PathEscapeError");
    }

    #[test]
    fn duplicate_paths_rejected_after_normalization() {
        let err = parse_list_file("src/top.vhd\nsrc/./top.vhd\n", ListKind::Src).unwrap_err();
        assert_eq!(err.name(), "DuplicatePathError");
    }

    #[test]
    fn list_entry_properties_and_default_library() {
        let list = parse_list_file("src/top.vhd std=93 synth_only=1\n", ListKind::Src).unwrap();
        let entry = &list.entries[0];
        assert_eq!(entry.library, "work");
        assert_eq!(entry.properties["std"], "93");
        assert_eq!(entry.properties["synth_only"], "1");
    }

    #[test]
    fn validate_accepts_minimal_project() {
        let cfg = parse_project_config("[main]\nvendor=vivado\ntop=t\n").unwrap();
        let lists = vec![parse_list_file("src/t.vhd\n", ListKind::Src).unwrap()];
        assert!(validate_config(&cfg, &lists).is_empty());
    }

    #[test]
    fn validate_flags_missing_sources() {
        let cfg = parse_project_config("[main]\nvendor=vivado\ntop=t\n").unwrap();
        let diags = validate_config(&cfg, &[]);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("no source files"));
    }

    #[test]
    fn validate_flags_absolute_hook() {
        let mut cfg = parse_project_config("[main]\nvendor=vivado\ntop=t\n").unwrap();
        cfg.post_creation_hook = Some("/abs/post.tcl".to_string());
        let lists = vec![parse_list_file("src/t.vhd\n", ListKind::Src).unwrap()];
        let diags = validate_config(&cfg, &lists);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("hook path must be relative"));
    }
}
