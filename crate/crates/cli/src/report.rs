//! Machine-readable report writer.
//!
//! One line per field, `key: value`, in emission order. The first two
//! lines identify the format version and the command, so consumers can
//! dispatch without guessing. Values never contain newlines.

use std::fmt::Display;

pub const FORMAT: &str = "ratho-report-v1";

pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut r = Report { lines: Vec::new() };
        r.field("format", FORMAT);
        r.field("command", command);
        r
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl Display) {
        let value = value.to_string();
        debug_assert!(!value.contains('\n'), "report values are single-line");
        self.lines.push((key.into(), value));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_in_emission_order() {
        let mut r = Report::new("zcl");
        r.field("input", "cp2");
        r.field("value", 4);
        assert_eq!(
            r.render(),
            "format: ratho-report-v1\ncommand: zcl\ninput: cp2\nvalue: 4\n"
        );
    }
}
