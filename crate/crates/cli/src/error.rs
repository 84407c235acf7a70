use std::path::Path;

use normvar_core::corpus::CorpusError;
use normvar_core::index::IndexError;
use normvar_core::io::{CsvError, PanelReadError, SeriesReadError};
use normvar_core::normgame::GameError;
use normvar_core::var::VarError;

/// Process exit codes.
pub mod code {
    pub const OTHER: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const DATE_RANGE: i32 = 3;
    pub const INDEX: i32 = 4;
    pub const ESTIMATION: i32 = 5;
    pub const GAME: i32 = 6;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError::new(code::INPUT, message)
    }

    pub fn read(path: &Path, err: std::io::Error) -> Self {
        CliError::input(format!("{}: {err}", path.display()))
    }

    pub fn write(path: &Path, err: std::io::Error) -> Self {
        CliError::new(code::OTHER, format!("cannot write {}: {err}", path.display()))
    }

    /// Prefixes the message with the file it came from.
    pub fn in_file(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        let code = match e {
            CorpusError::DateOutOfRange { .. } => code::DATE_RANGE,
            _ => code::INPUT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        CliError::new(code::INDEX, e.to_string())
    }
}

impl From<SeriesReadError> for CliError {
    fn from(e: SeriesReadError) -> Self {
        match e {
            SeriesReadError::Csv(c) => c.into(),
            SeriesReadError::Index(i) => CliError::input(i.to_string()),
        }
    }
}

impl From<VarError> for CliError {
    fn from(e: VarError) -> Self {
        CliError::new(code::ESTIMATION, e.to_string())
    }
}

impl From<PanelReadError> for CliError {
    fn from(e: PanelReadError) -> Self {
        match e {
            PanelReadError::Csv(c) => c.into(),
            PanelReadError::Var(v) => v.into(),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::new(code::GAME, e.to_string())
    }
}
