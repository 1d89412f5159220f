//! Append-only JSON-lines event log with fsync on every commit.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::events::Event;
use crate::ServiceError;

/// Reads every complete record without modifying the file.
pub fn read_events(path: impl AsRef<Path>) -> Result<Vec<Event>, ServiceError> {
    read_complete(path.as_ref()).map(|(events, _)| events)
}

/// Parsed events and the byte length of the complete-record prefix.
fn read_complete(path: &Path) -> Result<(Vec<Event>, usize), ServiceError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(ServiceError::io(path, e)),
    };
    let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if complete < bytes.len() {
        tracing::warn!(path = %path.display(), "dropping incomplete trailing record");
    }
    let mut events = Vec::new();
    for (n, line) in bytes[..complete].split(|&b| b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let ev = serde_json::from_slice::<Event>(line)
            .map_err(|e| ServiceError::Corrupt(format!("{} line {}: {e}", path.display(), n + 1)))?;
        events.push(ev);
    }
    Ok((events, complete))
}

#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
    len: usize,
}

impl EventLog {
    /// Opens (or creates) the log and returns it with every stored event.
    ///
    /// A final line without its newline is the trace of an interrupted write
    /// and is cut off; any other unreadable line is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<(EventLog, Vec<Event>), ServiceError> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| ServiceError::io(&path, e))?;
        }
        let (events, complete) = read_complete(&path)?;
        let file = OpenOptions::new()
            .create(true)
            .read(true)
            .write(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| ServiceError::io(&path, e))?;
        file.set_len(complete as u64).map_err(|e| ServiceError::io(&path, e))?;
        let mut log = EventLog {
            path,
            file,
            len: events.len(),
        };
        log.seek_end()?;
        Ok((log, events))
    }

    fn seek_end(&mut self) -> Result<(), ServiceError> {
        use std::io::Seek;
        self.file
            .seek(std::io::SeekFrom::End(0))
            .map(|_| ())
            .map_err(|e| ServiceError::io(&self.path, e))
    }

    /// Writes one event and syncs it to disk before returning.
    pub fn append(&mut self, event: &Event) -> Result<(), ServiceError> {
        let mut line = serde_json::to_vec(event).expect("events serialize");
        line.push(b'\n');
        self.file.write_all(&line).map_err(|e| ServiceError::io(&self.path, e))?;
        self.file.sync_data().map_err(|e| ServiceError::io(&self.path, e))?;
        self.len += 1;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Atomically replaces the log with `events` (write to a sibling, fsync, rename).
    pub fn rewrite(&mut self, events: &[Event]) -> Result<(), ServiceError> {
        let tmp = self.path.with_extension("compact.tmp");
        {
            let mut f = File::create(&tmp).map_err(|e| ServiceError::io(&tmp, e))?;
            for ev in events {
                let mut line = serde_json::to_vec(ev).expect("events serialize");
                line.push(b'\n');
                f.write_all(&line).map_err(|e| ServiceError::io(&tmp, e))?;
            }
            f.sync_all().map_err(|e| ServiceError::io(&tmp, e))?;
        }
        fs::rename(&tmp, &self.path).map_err(|e| ServiceError::io(&self.path, e))?;
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            if let Ok(d) = File::open(dir) {
                let _ = d.sync_all();
            }
        }
        self.file = OpenOptions::new()
            .read(true)
            .write(true)
            .open(&self.path)
            .map_err(|e| ServiceError::io(&self.path, e))?;
        self.len = events.len();
        self.seek_end()
    }
}
