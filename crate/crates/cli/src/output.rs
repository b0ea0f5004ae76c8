//! Report emission with write-then-rename.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use workbench_core::report::{Format, Table};

/// A lone table goes to `out` itself when `out` carries a report extension;
/// otherwise `out` is a directory receiving `<name>.<ext>` per table.
pub fn write_tables(tables: &[Table], out: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
    let single_file = tables.len() == 1
        && out.extension().and_then(|e| e.to_str()).is_some_and(|e| e == "csv" || e == "json");
    let mut written = Vec::with_capacity(tables.len());
    for t in tables {
        let path = if single_file { out.to_path_buf() } else { out.join(t.file_name(format)) };
        let body = t.render(format).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("report");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(name: &str) -> Table {
        let mut t = Table::new(name, &["a"]);
        t.push(["1"]);
        t
    }

    #[test]
    fn file_or_directory() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("x.csv");
        assert_eq!(write_tables(&[table("t")], &f, Format::Csv).unwrap(), vec![f.clone()]);
        assert_eq!(fs::read_to_string(&f).unwrap(), "a\n1\n");
        let sub = dir.path().join("many");
        let w = write_tables(&[table("p"), table("q")], &sub, Format::Json).unwrap();
        assert_eq!(w, vec![sub.join("p.json"), sub.join("q.json")]);
        let leftovers = fs::read_dir(&sub).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with('.')).count();
        assert_eq!(leftovers, 0);
    }
}
