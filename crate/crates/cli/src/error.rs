// Copyright 2026 The superabsorb Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config syntax: {0}")]
    Syntax(String),

    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("{field}: {message}")]
    Config { field: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] superabsorb::Error),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

/// Machine-readable error written on failure.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing: Option<Vec<String>>,
    pub message: String,
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (kind, field, missing) = match self {
            CliError::Syntax(_) => ("syntax", None, None),
            CliError::MissingKeys(keys) => ("missing_keys", None, Some(keys.clone())),
            CliError::Config { field, .. } => ("invalid_value", Some(field.clone()), None),
            CliError::Io { .. } => ("io", None, None),
            CliError::Core(superabsorb::Error::InvalidParameter { field, .. }) => {
                ("invalid_value", Some(field.to_string()), None)
            }
            CliError::Core(_) => ("simulation", None, None),
            CliError::CheckFailed(_) => ("check_failed", None, None),
        };
        ErrorRecord {
            kind,
            field,
            missing,
            message: self.to_string(),
        }
    }

    /// Process exit status: 3 for failed checks, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 3,
            _ => 1,
        }
    }
}
