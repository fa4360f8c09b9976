//! All-or-nothing output: files are staged next to their destination and
//! renamed into place, so a failed run leaves no partial output behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

fn parent_of(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Writes one file via a temporary sibling and a rename.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> io::Result<()> {
    let parent = parent_of(path);
    fs::create_dir_all(&parent)?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".plangen-")
        .tempfile_in(&parent)?;
    tmp.write_all(contents.as_ref())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Creates `dir` holding exactly `files` (relative names), replacing any
/// existing directory of that name.
pub fn write_dir<N: AsRef<Path>, C: AsRef<[u8]>>(dir: &Path, files: &[(N, C)]) -> io::Result<()> {
    let parent = parent_of(dir);
    fs::create_dir_all(&parent)?;
    let staging = tempfile::Builder::new()
        .prefix(".plangen-")
        .tempdir_in(&parent)?;
    for (name, contents) in files {
        let path = staging.path().join(name);
        if let Some(p) = path.parent() {
            fs::create_dir_all(p)?;
        }
        fs::write(&path, contents)?;
    }
    let staged = staging.keep();
    if dir.exists() {
        let old = parent.join(format!(
            ".plangen-old-{}",
            staged.file_name().unwrap_or_default().to_string_lossy()
        ));
        fs::rename(dir, &old)?;
        if let Err(e) = fs::rename(&staged, dir) {
            let _ = fs::rename(&old, dir);
            let _ = fs::remove_dir_all(&staged);
            return Err(e);
        }
        fs::remove_dir_all(&old)?;
    } else if let Err(e) = fs::rename(&staged, dir) {
        let _ = fs::remove_dir_all(&staged);
        return Err(e);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_directories_whole() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("out");
        write_dir(&dir, &[("a.txt", "1"), ("sub/b.txt", "2")]).unwrap();
        write_dir(&dir, &[("c.txt", "3")]).unwrap();
        let names: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names, ["c.txt"]);
        let siblings: Vec<_> = fs::read_dir(root.path()).unwrap().collect();
        assert_eq!(siblings.len(), 1);
    }

    #[test]
    fn single_files() {
        let root = tempfile::tempdir().unwrap();
        let path = root.path().join("x/plan.txt");
        write_file(&path, "END").unwrap();
        write_file(&path, "END\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "END\n");
    }
}
