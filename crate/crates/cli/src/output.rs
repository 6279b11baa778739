//! Text and JSON-lines emitters.

use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable lines; `listing` is accepted as a synonym.
    #[value(alias = "listing")]
    Text,
    /// One JSON record per line, big integers as decimal strings.
    Structured,
}

pub struct Emitter {
    format: Format,
    out: io::StdoutLock<'static>,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            out: io::stdout().lock(),
        }
    }

    /// Writes `text` in text mode and `record` in structured mode.
    pub fn emit<R: Serialize>(&mut self, text: impl AsRef<str>, record: &R) -> io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "{}", text.as_ref()),
            Format::Structured => {
                serde_json::to_writer(&mut self.out, record)?;
                writeln!(self.out)
            }
        }
    }

    /// Text-only line; dropped in structured mode.
    pub fn note(&mut self, text: impl AsRef<str>) -> io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "{}", text.as_ref()),
            Format::Structured => Ok(()),
        }
    }

    pub fn record<R: Serialize>(&mut self, record: &R) -> io::Result<()> {
        match self.format {
            Format::Text => Ok(()),
            Format::Structured => {
                serde_json::to_writer(&mut self.out, record)?;
                writeln!(self.out)
            }
        }
    }
}
