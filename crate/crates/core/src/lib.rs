//! Core library for managing Git-based HDL firmware repositories:
//! project configuration parsing, version and tag planning, generic
//! bindings for top-level modules, vendor project-script generation,
//! CI workflow emission, and forge (tag/release) clients.

pub mod ci;
pub mod config;
pub mod forge;
pub mod generics;
pub mod gitio;
pub mod projgen;
pub mod versioner;
