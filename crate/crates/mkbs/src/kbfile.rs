//! Reading and writing `.mkb` files.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use mkbs_core::{parse_kb, validate_kb, Diagnostic, KnowledgeBase};
use tempfile::NamedTempFile;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: knowledge base has {} error(s)", .diagnostics.iter().filter(|d| d.is_error()).count())]
    Invalid { path: String, diagnostics: Vec<Diagnostic> },
}

impl LoadError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            LoadError::Io { .. } => &[],
            LoadError::Invalid { diagnostics, .. } => diagnostics,
        }
    }
}

/// A successfully loaded knowledge base plus whatever warnings it raised.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub kb: KnowledgeBase,
    pub warnings: Vec<Diagnostic>,
}

pub fn load_kb(path: &Path) -> Result<Loaded, LoadError> {
    let source = fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    match parse_kb(&source) {
        Ok(kb) => {
            let warnings = validate_kb(&kb);
            Ok(Loaded { kb, warnings })
        }
        Err(diagnostics) => Err(LoadError::Invalid { path: path.display().to_string(), diagnostics }),
    }
}

/// Replaces `path` with `contents` by writing a sibling temp file and renaming
/// it over the target, so readers never see a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// The kb id for a file: its basename without extension.
pub fn kb_id(path: &Path) -> Option<String> {
    path.file_stem().and_then(|s| s.to_str()).map(str::to_owned)
}
