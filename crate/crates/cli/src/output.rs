//! Where results go: a file when `--out` is given, stdout otherwise.

use std::error::Error;
use std::io::Write;
use std::path::PathBuf;

pub struct Sink {
    pub path: Option<PathBuf>,
}

impl Sink {
    pub fn write(&self, text: &str) -> Result<(), Box<dyn Error>> {
        match &self.path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

pub fn csv_text(rows: &[Vec<String>]) -> Result<String, Box<dyn Error>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
