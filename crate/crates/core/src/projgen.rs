//! Vendor project-creation script generation.
//!
//! A creation script is a pure function of its [`GenerationInput`]: equal
//! inputs produce byte-identical scripts, with no timestamps, usernames,
//! or machine paths. Scripts resolve the repository root from their own
//! location (they are written to `Top/<project>/`, two levels below the
//! root), so the generated text stays machine-independent.
//!
//! Output file name: `<project_name>.create.tcl`, UTF-8, LF line endings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::config::{ListKind, ProjectConfig, SourceEntry, SourceList, Vendor};
use crate::config::validate_config;
use crate::generics::{render_assignments, GenericBinding, GenericsError};

/// Environment variable naming the tcllib installation required by the
/// Libero flow.
pub const TCLLIB_PATH_VAR: &str = "HOG_TCLLIB_PATH";

/// Everything needed to generate one project-creation script.
///
/// `repo_root` anchors every relative path in `config` and `lists`; the
/// generator never embeds it in the script, but callers use it to locate
/// the configuration, list files, and hook on disk.
#[derive(Debug, Clone)]
pub struct GenerationInput {
    pub config: ProjectConfig,
    pub lists: Vec<SourceList>,
    pub bindings: Vec<GenericBinding>,
    pub repo_root: PathBuf,
}

/// A required environment variable a vendor flow depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvRequirement {
    pub variable: &'static str,
    pub vendor: Vendor,
    pub purpose: &'static str,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProjGenError {
    #[error("environment variable {variable} must be set for {vendor}: {purpose}")]
    MissingEnv {
        variable: &'static str,
        vendor: Vendor,
        purpose: &'static str,
    },
    #[error("vendor `{vendor}` is not supported for script generation")]
    UnsupportedVendor { vendor: String },
    #[error("invalid generation input: {}", diagnostics.join("; "))]
    InvalidInput { diagnostics: Vec<String> },
    #[error(transparent)]
    Render(#[from] GenericsError),
}

impl ProjGenError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            ProjGenError::MissingEnv { .. } => "MissingEnv",
            ProjGenError::UnsupportedVendor { .. } => "UnsupportedVendor",
            ProjGenError::InvalidInput { .. } => "InvalidInput",
            ProjGenError::Render(inner) => inner.name(),
        }
    }
}

/// Environment requirements violated for `vendor`. Libero needs
/// `HOG_TCLLIB_PATH` (it ships without a full tcllib); Vivado and Quartus
/// need nothing.
pub fn check_environment(
    vendor: Vendor,
    env: &BTreeMap<String, String>,
) -> Vec<EnvRequirement> {
    let mut violations = Vec::new();
    if vendor == Vendor::Libero {
        let satisfied = env
            .get(TCLLIB_PATH_VAR)
            .map(|v| !v.trim().is_empty())
            .unwrap_or(false);
        if !satisfied {
            violations.push(EnvRequirement {
                variable: TCLLIB_PATH_VAR,
                vendor,
                purpose: "locates the tcllib package the scripts load",
            });
        }
    }
    violations
}

/// Like [`check_environment`] but fails on the first violation.
pub fn ensure_environment(
    vendor: Vendor,
    env: &BTreeMap<String, String>,
) -> Result<(), ProjGenError> {
    match check_environment(vendor, env).into_iter().next() {
        None => Ok(()),
        Some(req) => Err(ProjGenError::MissingEnv {
            variable: req.variable,
            vendor: req.vendor,
            purpose: req.purpose,
        }),
    }
}

fn list_comment(kind: ListKind) -> &'static str {
    match kind {
        ListKind::Src => "# source files",
        ListKind::Sim => "# simulation files",
        ListKind::Con => "# constraint files",
    }
}

fn quartus_file_type(path: &str, kind: ListKind) -> &'static str {
    let ext = path.rsplit_once('.').map(|(_, e)| e).unwrap_or("");
    match ext {
        "vhd" | "vhdl" => "VHDL_FILE",
        "v" => "VERILOG_FILE",
        "sv" | "svh" => "SYSTEMVERILOG_FILE",
        "sdc" => "SDC_FILE",
        _ => {
            if kind == ListKind::Con {
                "MISC_FILE"
            } else {
                "SOURCE_FILE"
            }
        }
    }
}

fn push_entry_vivado(out: &mut String, entry: &SourceEntry, kind: ListKind) {
    let fileset = match kind {
        ListKind::Src => "sources_1",
        ListKind::Sim => "sim_1",
        ListKind::Con => "constrs_1",
    };
    let path = format!("$repo_root/{}", entry.path);
    writeln!(out, "add_files -norecurse -fileset {fileset} \"{path}\"").unwrap();
    if kind != ListKind::Con {
        writeln!(out, "set_property library {{{}}} [get_files \"{path}\"]", entry.library).unwrap();
    }
    for (key, value) in &entry.properties {
        writeln!(out, "set_property {{{key}}} {{{value}}} [get_files \"{path}\"]").unwrap();
    }
}

fn push_entry_quartus(out: &mut String, entry: &SourceEntry, kind: ListKind) {
    let path = format!("$repo_root/{}", entry.path);
    let file_type = quartus_file_type(&entry.path, kind);
    if kind == ListKind::Con {
        writeln!(out, "set_global_assignment -name {file_type} \"{path}\"").unwrap();
    } else {
        writeln!(
            out,
            "set_global_assignment -name {file_type} \"{path}\" -library {{{}}}",
            entry.library
        )
        .unwrap();
    }
    for (key, value) in &entry.properties {
        writeln!(out, "# property {key}={value} for {}", entry.path).unwrap();
    }
}

fn push_entry_libero(out: &mut String, entry: &SourceEntry, kind: ListKind) {
    let path = format!("$repo_root/{}", entry.path);
    match kind {
        ListKind::Src => writeln!(
            out,
            "create_links -library {{{}}} -hdl_source \"{path}\"",
            entry.library
        )
        .unwrap(),
        ListKind::Sim => writeln!(
            out,
            "create_links -library {{{}}} -stimulus \"{path}\"",
            entry.library
        )
        .unwrap(),
        ListKind::Con => writeln!(out, "create_links -sdc \"{path}\"").unwrap(),
    }
    for (key, value) in &entry.properties {
        writeln!(out, "# property {key}={value} for {}", entry.path).unwrap();
    }
}

/// Generates the full project-creation script for the input's vendor.
///
/// The script creates the project, adds every list entry in order with
/// its library, applies the vendor property sections, applies the generic
/// assignments, and (when configured) sources the post-creation hook as
/// its final command. Libero scripts begin by extending the Tcl search
/// path from `HOG_TCLLIB_PATH`.
pub fn generate_creation_script(input: &GenerationInput) -> Result<String, ProjGenError> {
    let diagnostics = validate_config(&input.config, &input.lists);
    if !diagnostics.is_empty() {
        return Err(ProjGenError::InvalidInput { diagnostics });
    }

    let config = &input.config;
    let vendor = config.vendor;
    let project = &config.project_name;
    let mut out = String::new();

    writeln!(out, "# Project creation script for {project} ({vendor}).").unwrap();
    writeln!(out, "# Generated from version-controlled configuration; do not edit.").unwrap();

    if vendor == Vendor::Libero {
        // Libero lacks a bundled tcllib; extend the search path first.
        writeln!(out, "lappend auto_path $env({TCLLIB_PATH_VAR})").unwrap();
    }

    // The script lives at Top/<project>/, two levels below the repo root.
    writeln!(
        out,
        "set repo_root [file normalize [file join [file dirname [info script]] .. ..]]"
    )
    .unwrap();

    match vendor {
        Vendor::Vivado => writeln!(out, "create_project -force {{{project}}}").unwrap(),
        Vendor::Quartus => writeln!(out, "project_new {{{project}}} -overwrite").unwrap(),
        Vendor::Libero => writeln!(
            out,
            "new_project -name {{{project}}} -location {{./{project}}} -hdl {{VHDL}}"
        )
        .unwrap(),
    }

    for list in &input.lists {
        if list.entries.is_empty() {
            continue;
        }
        writeln!(out, "{}", list_comment(list.kind)).unwrap();
        for entry in &list.entries {
            match vendor {
                Vendor::Vivado => push_entry_vivado(&mut out, entry, list.kind),
                Vendor::Quartus => push_entry_quartus(&mut out, entry, list.kind),
                Vendor::Libero => push_entry_libero(&mut out, entry, list.kind),
            }
        }
    }

    for (section, props) in &config.properties {
        writeln!(out, "# properties: {section}").unwrap();
        for (key, value) in props {
            match vendor {
                Vendor::Vivado => {
                    writeln!(out, "set_property {{{key}}} {{{value}}} [current_project]").unwrap()
                }
                Vendor::Quartus => {
                    writeln!(out, "set_global_assignment -name {{{key}}} {{{value}}}").unwrap()
                }
                Vendor::Libero => writeln!(out, "project_settings -{key} {{{value}}}").unwrap(),
            }
        }
    }

    let fragment = render_assignments(&input.bindings, vendor)?;
    if !fragment.is_empty() {
        writeln!(out, "# generics").unwrap();
        out.push_str(&fragment);
    }

    if let Some(hook) = &config.post_creation_hook {
        writeln!(out, "# post-creation hook").unwrap();
        writeln!(out, "source \"$repo_root/{hook}\"").unwrap();
    }

    Ok(out)
}
