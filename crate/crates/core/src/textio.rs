//! Small helpers shared by the text file formats.

use std::io::BufRead;

/// 17 significant digits, enough to round-trip any `f64` exactly.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok()
}

/// Line reader that skips blank lines and `#` comments and tracks line numbers.
pub(crate) struct Lines<R> {
    inner: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    pub(crate) fn new(reader: R) -> Self {
        Lines { inner: reader.lines(), line_no: 0 }
    }

    pub(crate) fn line_no(&self) -> usize {
        self.line_no
    }

    /// Next meaningful line, trimmed.
    pub(crate) fn next_line(&mut self) -> std::io::Result<Option<String>> {
        for line in self.inner.by_ref() {
            let line = line?;
            self.line_no += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(Some(trimmed.to_string()));
        }
        Ok(None)
    }
}
