//! Command-line front end: configuration files, trace CSV emission, SVG
//! plots, and the named reproduction commands. The `fogpss` binary is a thin
//! clap wrapper over [`commands`].

pub mod commands;
pub mod config;
pub mod csv;
pub mod svg;
