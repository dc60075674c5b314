//! Generic bindings for the HDL top module and binary traceability.
//!
//! Four builtin generics carry the repository state into the firmware:
//! `GLOBAL_SHA` (32-bit commit hash truncation), `GLOBAL_VER` (packed
//! `M:8|m:8|p:16` version register), and `GLOBAL_DATE`/`GLOBAL_TIME`
//! (BCD-coded committer timestamp in UTC, so equal inputs always produce
//! equal binaries). User generics from the configuration are appended
//! after the builtins.
//!
//! Vendor rendering uses one fixed template per dialect:
//!
//! | vendor  | form                                             | bv32 literal |
//! |---------|--------------------------------------------------|--------------|
//! | vivado  | `set_property generic {N=V ...} [current_fileset]` | `32'hXXXXXXXX` |
//! | quartus | `set_global_assignment -name HDL_PARAMETER "N=V"` | `32'hXXXXXXXX` |
//! | libero  | `set_option -hdl_param -set N V`                  | `x"XXXXXXXX"`  |
//!
//! The artifact blob is a desk-scale stand-in for a vendor bitstream:
//! magic `HOGB`, a record count byte, then `[name-length][name][value]`
//! records with 32-bit big-endian values.

use std::fmt::Write as _;

use chrono::{DateTime, Datelike, Timelike, Utc};
use thiserror::Error;

use crate::config::{is_reserved_generic_name, TypedValue, Vendor, RESERVED_GENERIC_NAMES};
use crate::versioner::{CommitGraph, CommitRef, VersionTriple};

/// Leading bytes of every artifact blob.
pub const ARTIFACT_MAGIC: &[u8; 4] = b"HOGB";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingOrigin {
    Builtin,
    User,
}

/// One named value passed to the HDL top module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericBinding {
    pub name: String,
    pub value: TypedValue,
    pub origin: BindingOrigin,
}

impl GenericBinding {
    /// A user binding; the name must be a valid HDL identifier and must
    /// not collide with a builtin generic (case-insensitive).
    pub fn user(name: &str, value: TypedValue) -> Result<GenericBinding, GenericsError> {
        if is_reserved_generic_name(name) {
            return Err(GenericsError::ReservedName {
                name: name.to_string(),
            });
        }
        Ok(GenericBinding {
            name: name.to_string(),
            value,
            origin: BindingOrigin::User,
        })
    }

    fn builtin(name: &'static str, value: u32) -> GenericBinding {
        GenericBinding {
            name: name.to_string(),
            value: TypedValue::BitVector32(value),
            origin: BindingOrigin::Builtin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactRecord {
    pub name: String,
    pub value: u32,
}

/// Mock firmware binary carrying the generic register values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactBlob {
    pub records: Vec<ArtifactRecord>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenericsError {
    #[error("version {version} exceeds the packing bounds (255.255.65535)")]
    Overflow { version: VersionTriple },
    #[error("timestamp year {year} is not BCD-encodable")]
    DateOverflow { year: i32 },
    #[error("`{name}` is a reserved builtin generic name")]
    ReservedName { name: String },
    #[error("{kind} values have no rendering for {target}")]
    UnsupportedType { kind: String, target: String },
    #[error("artifact has no GLOBAL_SHA record")]
    NoShaRecord,
    #[error("no commit in the graph matches sha32 {sha32:#010x}")]
    UnknownCommit { sha32: u32 },
    #[error("{count} commits share sha32 {sha32:#010x}")]
    AmbiguousCommit { sha32: u32, count: usize },
    #[error("malformed artifact: {reason}")]
    MalformedBlob { reason: String },
}

impl GenericsError {
    /// Stable error name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            GenericsError::Overflow { .. } | GenericsError::DateOverflow { .. } => "Overflow",
            GenericsError::ReservedName { .. } => "ReservedNameError",
            GenericsError::UnsupportedType { .. } => "UnsupportedType",
            GenericsError::NoShaRecord => "NoShaRecord",
            GenericsError::UnknownCommit { .. } => "UnknownCommit",
            GenericsError::AmbiguousCommit { .. } => "AmbiguousCommit",
            GenericsError::MalformedBlob { .. } => "MalformedBlob",
        }
    }
}

/// Packs a version into one 32-bit register: `M:8 | m:8 | p:16`. The
/// layout is injective and order-preserving on its domain.
pub fn pack_version(version: VersionTriple) -> Result<u32, GenericsError> {
    if !version.fits_packing() {
        return Err(GenericsError::Overflow { version });
    }
    Ok((version.major << 24) | (version.minor << 16) | version.patch)
}

fn bcd(digits: &str) -> u32 {
    u32::from_str_radix(digits, 16).expect("decimal digits are valid hex")
}

/// The four builtin bindings for a build at `commit`: packed version,
/// 32-bit SHA truncation, and the BCD-coded committer timestamp (UTC).
pub fn builtin_generics(
    version: VersionTriple,
    commit: &CommitRef,
    commit_time: DateTime<Utc>,
) -> Result<Vec<GenericBinding>, GenericsError> {
    let packed = pack_version(version)?;
    let year = commit_time.year();
    if !(0..=9999).contains(&year) {
        return Err(GenericsError::DateOverflow { year });
    }
    let date = bcd(&format!(
        "{:04}{:02}{:02}",
        year,
        commit_time.month(),
        commit_time.day()
    ));
    let time = bcd(&format!(
        "00{:02}{:02}{:02}",
        commit_time.hour(),
        commit_time.minute(),
        commit_time.second()
    ));
    Ok(vec![
        GenericBinding::builtin("GLOBAL_SHA", commit.sha32()),
        GenericBinding::builtin("GLOBAL_VER", packed),
        GenericBinding::builtin("GLOBAL_DATE", date),
        GenericBinding::builtin("GLOBAL_TIME", time),
    ])
}

/// Concatenates builtin and user bindings, builtins first, preserving
/// user order. Rejects user bindings that shadow a builtin name.
pub fn merge_generics(
    builtin: &[GenericBinding],
    user: &[GenericBinding],
) -> Result<Vec<GenericBinding>, GenericsError> {
    for binding in user {
        if RESERVED_GENERIC_NAMES
            .iter()
            .any(|r| r.eq_ignore_ascii_case(&binding.name))
        {
            return Err(GenericsError::ReservedName {
                name: binding.name.clone(),
            });
        }
    }
    Ok(builtin.iter().chain(user).cloned().collect())
}

fn verilog_value(binding: &GenericBinding, vendor: Vendor) -> Result<String, GenericsError> {
    match &binding.value {
        TypedValue::Integer(v) => Ok(v.to_string()),
        TypedValue::BitVector32(v) => Ok(format!("32'h{v:08X}")),
        TypedValue::Boolean(b) => Ok(b.to_string()),
        TypedValue::Str(s) => {
            if vendor == Vendor::Vivado {
                Ok(format!("\"{s}\""))
            } else {
                Err(GenericsError::UnsupportedType {
                    kind: "str".to_string(),
                    target: vendor.to_string(),
                })
            }
        }
    }
}

fn vhdl_value(binding: &GenericBinding, vendor: Vendor) -> Result<String, GenericsError> {
    match &binding.value {
        TypedValue::Integer(v) => Ok(v.to_string()),
        TypedValue::BitVector32(v) => Ok(format!("x\"{v:08X}\"")),
        TypedValue::Boolean(b) => Ok(b.to_string()),
        TypedValue::Str(_) => Err(GenericsError::UnsupportedType {
            kind: "str".to_string(),
            target: vendor.to_string(),
        }),
    }
}

/// Renders the generic assignments in the vendor's script dialect. The
/// output depends only on the bindings and the vendor; equal inputs give
/// byte-identical fragments. An empty binding list renders as an empty
/// fragment.
pub fn render_assignments(
    bindings: &[GenericBinding],
    vendor: Vendor,
) -> Result<String, GenericsError> {
    if bindings.is_empty() {
        return Ok(String::new());
    }
    let mut out = String::new();
    match vendor {
        Vendor::Vivado => {
            let assignments = bindings
                .iter()
                .map(|b| Ok(format!("{}={}", b.name, verilog_value(b, vendor)?)))
                .collect::<Result<Vec<_>, GenericsError>>()?;
            writeln!(
                out,
                "set_property generic {{{}}} [current_fileset]",
                assignments.join(" ")
            )
            .expect("writing to a String cannot fail");
        }
        Vendor::Quartus => {
            for binding in bindings {
                writeln!(
                    out,
                    "set_global_assignment -name HDL_PARAMETER \"{}={}\"",
                    binding.name,
                    verilog_value(binding, vendor)?
                )
                .expect("writing to a String cannot fail");
            }
        }
        Vendor::Libero => {
            for binding in bindings {
                writeln!(
                    out,
                    "set_option -hdl_param -set {} {}",
                    binding.name,
                    vhdl_value(binding, vendor)?
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    Ok(out)
}

fn register_value(binding: &GenericBinding) -> Result<u32, GenericsError> {
    match &binding.value {
        TypedValue::BitVector32(v) => Ok(*v),
        TypedValue::Boolean(b) => Ok(*b as u32),
        TypedValue::Integer(v) => {
            if (0..=i64::from(u32::MAX)).contains(v) {
                Ok(*v as u32)
            } else if (i64::from(i32::MIN)..0).contains(v) {
                Ok(*v as i32 as u32)
            } else {
                Err(GenericsError::MalformedBlob {
                    reason: format!("integer {v} does not fit a 32-bit register"),
                })
            }
        }
        TypedValue::Str(_) => Err(GenericsError::UnsupportedType {
            kind: "str".to_string(),
            target: "artifact".to_string(),
        }),
    }
}

/// Packs the bindings into an artifact blob, one record per binding, in
/// order. String bindings are not representable in registers.
pub fn embed_into_artifact(bindings: &[GenericBinding]) -> Result<ArtifactBlob, GenericsError> {
    if bindings.len() > 255 {
        return Err(GenericsError::MalformedBlob {
            reason: format!("{} records exceed the 255-record limit", bindings.len()),
        });
    }
    let mut records = Vec::with_capacity(bindings.len());
    for binding in bindings {
        if binding.name.is_empty() || binding.name.len() > 255 || !binding.name.is_ascii() {
            return Err(GenericsError::MalformedBlob {
                reason: format!("name `{}` is not a short ASCII token", binding.name),
            });
        }
        records.push(ArtifactRecord {
            name: binding.name.clone(),
            value: register_value(binding)?,
        });
    }
    Ok(ArtifactBlob { records })
}

impl ArtifactBlob {
    /// Bit-exact encoding: `HOGB`, record count (u8), then per record a
    /// name-length byte, the ASCII name, and the value as 4 big-endian
    /// bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(ARTIFACT_MAGIC);
        bytes.push(self.records.len() as u8);
        for record in &self.records {
            bytes.push(record.name.len() as u8);
            bytes.extend_from_slice(record.name.as_bytes());
            bytes.extend_from_slice(&record.value.to_be_bytes());
        }
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ArtifactBlob, GenericsError> {
        let malformed = |reason: &str| GenericsError::MalformedBlob {
            reason: reason.to_string(),
        };
        if bytes.len() < 5 {
            return Err(malformed("shorter than the fixed header"));
        }
        if &bytes[..4] != ARTIFACT_MAGIC {
            return Err(malformed("bad magic"));
        }
        let count = bytes[4] as usize;
        let mut offset = 5;
        let mut records = Vec::with_capacity(count);
        for _ in 0..count {
            let name_len = *bytes.get(offset).ok_or_else(|| malformed("truncated record"))? as usize;
            offset += 1;
            let name_end = offset + name_len;
            let name = bytes
                .get(offset..name_end)
                .ok_or_else(|| malformed("truncated name"))?;
            let name = std::str::from_utf8(name)
                .map_err(|_| malformed("record name is not ASCII"))?
                .to_string();
            offset = name_end;
            let value = bytes
                .get(offset..offset + 4)
                .ok_or_else(|| malformed("truncated value"))?;
            offset += 4;
            records.push(ArtifactRecord {
                name,
                value: u32::from_be_bytes(value.try_into().expect("slice of length 4")),
            });
        }
        if offset != bytes.len() {
            return Err(malformed("trailing bytes after the last record"));
        }
        Ok(ArtifactBlob { records })
    }
}

/// Recovers the commit a blob was built from: reads the `GLOBAL_SHA`
/// record and finds the unique commit in the graph with that sha32.
pub fn verify_traceability(
    blob: &ArtifactBlob,
    graph: &CommitGraph,
) -> Result<CommitRef, GenericsError> {
    let sha32 = blob
        .records
        .iter()
        .find(|r| r.name == "GLOBAL_SHA")
        .map(|r| r.value)
        .ok_or(GenericsError::NoShaRecord)?;
    let mut matches: Vec<&CommitRef> = graph.commits().filter(|c| c.sha32() == sha32).collect();
    match matches.len() {
        0 => Err(GenericsError::UnknownCommit { sha32 }),
        1 => Ok(matches.remove(0).clone()),
        count => Err(GenericsError::AmbiguousCommit { sha32, count }),
    }
}
