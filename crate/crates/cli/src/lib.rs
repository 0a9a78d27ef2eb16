//! Command-line harness around the landscape library: experiment config
//! parsing, optimizer sweeps with CSV/plot persistence, and the
//! certification suite driver.

pub mod commands;
pub mod config;
pub mod table;

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "NCE_LANDSCAPE_OUT";

/// Test-hook variable for `verify`: names a check whose bound is
/// deliberately corrupted, exercising the failure exit path.
pub const CORRUPT_ENV: &str = "NCE_LANDSCAPE_CORRUPT";
