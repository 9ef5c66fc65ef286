//! One JSON document per record under a data root, plus counters, role
//! assignments, the field registry and an append-only audit log.
//!
//! ```text
//! <root>/samples/SET-000001.json
//! <root>/experiments/EXP-000001.json
//! <root>/counters.json
//! <root>/roles.json
//! <root>/fields.json
//! <root>/audit.log
//! <root>/imports/<name>.ttl
//! ```

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::model::{AuditEntry, ExperimentRecord, FieldEntry, RoleAssignment, SampleRecord};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: corrupt document: {message}")]
    Corrupt { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Everything the store holds, loaded at start-up.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub samples: BTreeMap<String, SampleRecord>,
    pub experiments: BTreeMap<String, ExperimentRecord>,
    pub counters: BTreeMap<String, u64>,
    pub roles: Vec<RoleAssignment>,
    pub fields: Option<Vec<FieldEntry>>,
}

#[derive(Debug, Clone)]
pub struct FileStore {
    root: PathBuf,
}

impl FileStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for dir in [root.join("samples"), root.join("experiments")] {
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
        Ok(FileStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn read_json<T: DeserializeOwned>(path: &Path) -> Result<Option<T>, StoreError> {
        match fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map(Some).map_err(|e| StoreError::Corrupt {
                path: path.to_path_buf(),
                message: e.to_string(),
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(path)(e)),
        }
    }

    /// Write to a sibling temp file, then rename over the target.
    fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), StoreError> {
        let mut text = serde_json::to_string_pretty(value).expect("records serialize");
        text.push('\n');
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    }

    fn read_dir<T: DeserializeOwned>(dir: &Path) -> Result<Vec<T>, StoreError> {
        let mut out = Vec::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io_err(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for p in paths {
            if let Some(v) = Self::read_json(&p)? {
                out.push(v);
            }
        }
        Ok(out)
    }

    pub fn load(&self) -> Result<Snapshot, StoreError> {
        let samples: Vec<SampleRecord> = Self::read_dir(&self.root.join("samples"))?;
        let experiments: Vec<ExperimentRecord> = Self::read_dir(&self.root.join("experiments"))?;
        Ok(Snapshot {
            samples: samples.into_iter().map(|s| (s.id.clone(), s)).collect(),
            experiments: experiments.into_iter().map(|e| (e.id.clone(), e)).collect(),
            counters: Self::read_json(&self.root.join("counters.json"))?.unwrap_or_default(),
            roles: Self::read_json(&self.root.join("roles.json"))?.unwrap_or_default(),
            fields: Self::read_json(&self.root.join("fields.json"))?,
        })
    }

    pub fn save_sample(&self, s: &SampleRecord) -> Result<(), StoreError> {
        Self::write_json(&self.root.join("samples").join(format!("{}.json", s.id)), s)
    }

    pub fn save_experiment(&self, e: &ExperimentRecord) -> Result<(), StoreError> {
        Self::write_json(&self.root.join("experiments").join(format!("{}.json", e.id)), e)
    }

    pub fn save_counters(&self, counters: &BTreeMap<String, u64>) -> Result<(), StoreError> {
        Self::write_json(&self.root.join("counters.json"), counters)
    }

    pub fn save_roles(&self, roles: &[RoleAssignment]) -> Result<(), StoreError> {
        Self::write_json(&self.root.join("roles.json"), &roles)
    }

    pub fn save_fields(&self, fields: &[FieldEntry]) -> Result<(), StoreError> {
        Self::write_json(&self.root.join("fields.json"), &fields)
    }

    /// Stores an imported dataset's canonical Turtle; returns its path.
    pub fn save_import(&self, name: &str, turtle: &str) -> Result<PathBuf, StoreError> {
        let dir = self.root.join("imports");
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let path = dir.join(format!("{name}.ttl"));
        let tmp = path.with_extension("ttl.tmp");
        fs::write(&tmp, turtle).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn append_audit(&self, entry: &AuditEntry) -> Result<(), StoreError> {
        let path = self.root.join("audit.log");
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io_err(&path))?;
        let line = serde_json::to_string(entry).expect("audit entries serialize");
        writeln!(f, "{line}").map_err(io_err(&path))
    }

    pub fn audit_log(&self) -> Result<Vec<AuditEntry>, StoreError> {
        let path = self.root.join("audit.log");
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(io_err(&path)(e)),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                serde_json::from_str(l).map_err(|e| StoreError::Corrupt {
                    path: path.clone(),
                    message: e.to_string(),
                })
            })
            .collect()
    }
}
