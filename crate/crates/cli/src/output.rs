//! Output directory handling: atomic writes and the manifest beside every run.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::Failure;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LIGHTASEP_OUT_DIR";

pub struct Output {
    dir: PathBuf,
    stem: String,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    argv: &'a [String],
    seed: Option<u64>,
    config: &'a Value,
    outputs: &'a [String],
    /// Only field that differs between identical reruns.
    created_unix: u64,
}

impl Output {
    pub fn new(dir: Option<PathBuf>, stem: String) -> Result<Self, Failure> {
        let dir =
            dir.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output { dir, stem, written: Vec::new() })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    /// Writes `<stem><suffix>` via a temporary file and a rename.
    pub fn write(&mut self, suffix: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.path(suffix);
        atomic_write(&path, contents.as_bytes())?;
        self.written.push(path.file_name().unwrap().to_string_lossy().into_owned());
        Ok(path)
    }

    pub fn finish(self, command: &str, seed: Option<u64>, config: &Value) -> Result<PathBuf, Failure> {
        let argv: Vec<String> = std::env::args().collect();
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let m = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            argv: &argv,
            seed,
            config,
            outputs: &self.written,
            created_unix,
        };
        let text = lightasep::experiments::to_json17(&m).map_err(Failure::from)? + "\n";
        let path = self.path(".manifest.json");
        atomic_write(&path, text.as_bytes())?;
        Ok(path)
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Failure::Runtime(format!("writing {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
