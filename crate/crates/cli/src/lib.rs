//! Library side of the `maxcomplex` command: file formats, the cache and
//! the subcommands themselves.

pub mod args;
pub mod cache;
pub mod commands;
pub mod exit;
pub mod langfile;

pub use langfile::LanguageFile;
