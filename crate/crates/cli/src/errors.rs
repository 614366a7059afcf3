//! Mapping from library errors to the fixed exit-code taxonomy:
//! 1 usage/config, 2 data/validation, 3 I/O.

use geez_forge::corpus::CorpusError;
use geez_forge::metrics::MetricsError;
use geez_forge::report::ReportError;
use geez_forge::script_norm::ConfigError;
use geez_forge::stats_sig::SignificanceError;
use geez_forge::subword::TokenizerError;
use std::fmt;

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Data(String),
    Io(String),
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        AppError::Data(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        AppError::Io(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) | AppError::Data(m) | AppError::Io(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(inner) => AppError::Io(inner.to_string()),
            other => AppError::Usage(other.to_string()),
        }
    }
}

impl From<CorpusError> for AppError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(inner) => AppError::Io(inner.to_string()),
            CorpusError::InvalidRatios(_) | CorpusError::InvalidFilterConfig(_) => {
                AppError::Usage(e.to_string())
            }
            CorpusError::NormConfig(inner) => inner.into(),
            other => AppError::Data(other.to_string()),
        }
    }
}

impl From<TokenizerError> for AppError {
    fn from(e: TokenizerError) -> Self {
        match e {
            TokenizerError::Io(inner) => AppError::Io(inner.to_string()),
            TokenizerError::VocabTooSmall { .. } => AppError::Usage(e.to_string()),
            TokenizerError::Config(inner) => inner.into(),
            other => AppError::Data(other.to_string()),
        }
    }
}

impl From<MetricsError> for AppError {
    fn from(e: MetricsError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<SignificanceError> for AppError {
    fn from(e: SignificanceError) -> Self {
        match e {
            SignificanceError::InvalidAlpha(_)
            | SignificanceError::InvalidFamilySize(_)
            | SignificanceError::NoResamples => AppError::Usage(e.to_string()),
            other => AppError::Data(other.to_string()),
        }
    }
}

impl From<ReportError> for AppError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io(inner) => AppError::Io(inner.to_string()),
            other => AppError::Data(other.to_string()),
        }
    }
}
