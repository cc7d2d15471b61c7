//! Persistent distance cache.
//!
//! One entry per line, `b/a b'/a' d windowA windowB`, with the pair in
//! `(b, a)` order. The file is only ever appended to; later lines win.
//! [`DistanceCache::compact`] rewrites it with one sorted line per pair via
//! a temporary file and an atomic rename.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use farey_core::{safety_window, Slope, Window};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cache {path}, line {line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheEntry {
    pub distance: u32,
    /// Window the distance was certified in.
    pub window: Window,
}

#[derive(Debug)]
pub struct DistanceCache {
    path: PathBuf,
    entries: BTreeMap<(Slope, Slope), CacheEntry>,
}

fn key(s: Slope, t: Slope) -> (Slope, Slope) {
    if s <= t {
        (s, t)
    } else {
        (t, s)
    }
}

fn format_line(k: &(Slope, Slope), e: &CacheEntry) -> String {
    format!(
        "{} {} {} {} {}\n",
        k.0,
        k.1,
        e.distance,
        e.window.max_a(),
        e.window.max_b()
    )
}

fn parse_line(line: &str) -> Result<((Slope, Slope), CacheEntry), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [s, t, d, wa, wb] = fields[..] else {
        return Err(format!("expected 5 fields, found {}", fields.len()));
    };
    let s: Slope = s.parse().map_err(|e| format!("{e}"))?;
    let t: Slope = t.parse().map_err(|e| format!("{e}"))?;
    let int = |x: &str| x.parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
    let distance = d.parse::<u32>().map_err(|e| format!("{d:?}: {e}"))?;
    let window = Window::new(int(wa)?, int(wb)?).map_err(|e| e.to_string())?;
    Ok((key(s, t), CacheEntry { distance, window }))
}

impl DistanceCache {
    /// Loads `path`, or starts empty if it does not exist yet.
    pub fn open(path: impl Into<PathBuf>) -> Result<DistanceCache, CacheError> {
        let path = path.into();
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, e) = parse_line(line).map_err(|reason| CacheError::Malformed {
                path: path.clone(),
                line: i + 1,
                reason,
            })?;
            entries.insert(k, e);
        }
        Ok(DistanceCache { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Slope, Slope, CacheEntry)> + '_ {
        self.entries.iter().map(|(&(s, t), &e)| (s, t, e))
    }

    /// The cached distance, unless the entry was certified in a window
    /// smaller than the pair's safety window.
    pub fn get(&self, s: Slope, t: Slope) -> Option<u32> {
        let e = self.entries.get(&key(s, t))?;
        e.window.covers(&safety_window(s, t)).then_some(e.distance)
    }

    /// Records an entry in memory and appends it to the file.
    pub fn insert(&mut self, s: Slope, t: Slope, entry: CacheEntry) -> Result<(), CacheError> {
        let k = key(s, t);
        let io_err = |source| CacheError::Io {
            path: self.path.clone(),
            source,
        };
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(io_err)?;
        file.write_all(format_line(&k, &entry).as_bytes())
            .map_err(io_err)?;
        self.entries.insert(k, entry);
        Ok(())
    }

    /// Rewrites the file with one line per pair, sorted.
    pub fn compact(&self) -> Result<(), CacheError> {
        let io_err = |source| CacheError::Io {
            path: self.path.clone(),
            source,
        };
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        for (k, e) in &self.entries {
            tmp.write_all(format_line(k, e).as_bytes())
                .map_err(io_err)?;
        }
        tmp.as_file().sync_all().map_err(io_err)?;
        tmp.persist(&self.path).map_err(|e| io_err(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl(s: &str) -> Slope {
        s.parse().unwrap()
    }

    #[test]
    fn pairs_are_unordered() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = DistanceCache::open(dir.path().join("c.txt")).unwrap();
        let w = Window::new(5, 2).unwrap();
        c.insert(
            sl("2/5"),
            sl("1/0"),
            CacheEntry {
                distance: 3,
                window: w,
            },
        )
        .unwrap();
        assert_eq!(c.get(sl("1/0"), sl("2/5")), Some(3));
        assert_eq!(c.get(sl("2/5"), sl("1/0")), Some(3));
        let text = fs::read_to_string(c.path()).unwrap();
        assert_eq!(text, "1/0 2/5 3 5 2\n");
    }

    #[test]
    fn small_provenance_window_is_not_served() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = DistanceCache::open(dir.path().join("c.txt")).unwrap();
        let w = Window::new(2, 2).unwrap();
        c.insert(
            sl("1/0"),
            sl("2/5"),
            CacheEntry {
                distance: 3,
                window: w,
            },
        )
        .unwrap();
        assert_eq!(c.get(sl("1/0"), sl("2/5")), None);
    }

    #[test]
    fn later_lines_win_and_compaction_keeps_one() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        fs::write(&path, "1/0 2/5 7 5 2\n1/0 2/5 3 5 2\n\n0/1 1/0 1 1 1\n").unwrap();
        let c = DistanceCache::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get(sl("1/0"), sl("2/5")), Some(3));
        c.compact().unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "0/1 1/0 1 1 1\n1/0 2/5 3 5 2\n"
        );
    }

    #[test]
    fn malformed_lines_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        fs::write(&path, "1/0 2/5 3 5 2\n1/0 2/5 x 5 2\n").unwrap();
        match DistanceCache::open(&path) {
            Err(CacheError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
