use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// Where a result goes: a file (written atomically) or stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    File(PathBuf),
    Stdout,
}

impl Sink {
    /// `out` resolved against `out_dir`; with no `out`, `default_name`
    /// inside `out_dir`, or stdout when there is no `out_dir` either.
    pub fn resolve(out: Option<&Path>, out_dir: Option<&Path>, default_name: &str) -> Sink {
        match (out, out_dir) {
            (Some(p), Some(dir)) if p.is_relative() => Sink::File(dir.join(p)),
            (Some(p), _) => Sink::File(p.to_path_buf()),
            (None, Some(dir)) => Sink::File(dir.join(default_name)),
            (None, None) => Sink::Stdout,
        }
    }

    pub fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
            Sink::File(path) => write_atomic(path, bytes),
        }
    }

    pub fn write_json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.write(&text)
    }

    pub fn write_csv<R: Serialize>(&self, rows: &[R]) -> Result<(), CliError> {
        self.write(&to_csv(rows)?)
    }
}

/// Writes through a temporary file in the destination directory, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_rules() {
        let dir = Path::new("/tmp/o");
        assert_eq!(Sink::resolve(None, None, "a.csv"), Sink::Stdout);
        assert_eq!(Sink::resolve(None, Some(dir), "a.csv"), Sink::File(dir.join("a.csv")));
        assert_eq!(Sink::resolve(Some(Path::new("b.csv")), Some(dir), "a.csv"), Sink::File(dir.join("b.csv")));
        assert_eq!(
            Sink::resolve(Some(Path::new("/x/b.csv")), Some(dir), "a.csv"),
            Sink::File(PathBuf::from("/x/b.csv"))
        );
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
