//! Line-oriented `key = value` reports.
//!
//! Reports start with `#` comment lines naming the command, followed by the
//! effective settings, so a report records how it was produced. Numbers are
//! written with a fixed rule (shortest round-trip digits, exponent notation
//! outside `[1e-4, 1e7)`), so identical inputs give byte-identical reports.
//! Lines are parsed back by [`parse`].

use std::fmt::Write as _;

/// Formats a real number deterministically.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // also maps -0 to 0
        "0".to_string()
    } else if !x.is_finite() || (1e-4..1e7).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A report under construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    text: String,
}

impl Report {
    /// Starts a report with a title comment.
    pub fn new(title: &str) -> Report {
        let mut r = Report::default();
        r.comment(title);
        r
    }

    /// Adds a `#` comment line.
    pub fn comment(&mut self, c: &str) -> &mut Self {
        let _ = writeln!(self.text, "# {c}");
        self
    }

    /// Adds a blank separator line.
    pub fn blank(&mut self) -> &mut Self {
        self.text.push('\n');
        self
    }

    /// Adds a line with a preformatted value.
    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {value}");
        self
    }

    /// Adds a real value.
    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.kv(key, num(x))
    }

    /// Adds several reals separated by spaces.
    pub fn reals(&mut self, key: &str, xs: &[f64]) -> &mut Self {
        let v: Vec<String> = xs.iter().map(|&x| num(x)).collect();
        self.kv(key, v.join(" "))
    }

    /// The finished text.
    pub fn text(&self) -> &str {
        &self.text
    }
}

/// Parses report text into `(key, value)` pairs, skipping comments and
/// blank lines.
pub fn parse(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// Value of `key` in report text.
pub fn lookup(text: &str, key: &str) -> Option<String> {
    parse(text).into_iter().find(|(k, _)| k == key).map(|(_, v)| v)
}
