use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::SessionRecord;
use crate::error::{ElicitError, Result};

/// One `<id>.json` document per session in a directory. Writes go to a
/// temporary file that is renamed over the target, so readers never see a
/// partial document.
#[derive(Debug, Clone)]
pub struct FileStore {
    dir: PathBuf,
}

impl FileStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> Result<PathBuf> {
        // ids become file names; keep them to a safe alphabet
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(ElicitError::NotFound(format!("no session '{id}'")));
        }
        Ok(self.dir.join(format!("{id}.json")))
    }

    pub fn save(&self, record: &SessionRecord) -> Result<()> {
        let target = self.path(&record.id)?;
        let doc = record.export()?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(doc.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| ElicitError::Io(e.to_string()))?;
        Ok(())
    }

    pub fn load(&self, id: &str) -> Result<SessionRecord> {
        let path = self.path(id)?;
        let doc = match fs::read_to_string(&path) {
            Ok(d) => d,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ElicitError::NotFound(format!("no session '{id}'")))
            }
            Err(e) => return Err(e.into()),
        };
        SessionRecord::import(&doc)
    }

    pub fn exists(&self, id: &str) -> bool {
        self.path(id).map(|p| p.exists()).unwrap_or(false)
    }

    /// Ids of all stored sessions, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let name = entry?.file_name();
            if let Some(id) = name.to_str().and_then(|n| n.strip_suffix(".json")) {
                ids.push(id.to_string());
            }
        }
        ids.sort();
        Ok(ids)
    }
}
