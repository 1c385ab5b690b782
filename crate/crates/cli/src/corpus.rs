//! Built-in example models, embedded at compile time.

pub struct Entry {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(Entry { name: $name, text: include_str!(concat!("../corpus/", $name, ".cdga")) }),*]
    };
}

/// Every embedded model, in listing order.
pub const ENTRIES: &[Entry] = corpus![
    "point",
    "s2",
    "s3",
    "s4",
    "s5",
    "s7",
    "cp1",
    "cp2",
    "cp3",
    "cp4",
    "s2xs2",
    "s2xs3",
    "s3xs3",
    "s2-model",
    "s4-model",
    "nonformal",
    "cp2-to-cp1",
];

pub fn lookup(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::build_validated;
    use crate::document::{parse_model, serialize};

    #[test]
    fn every_entry_parses_builds_and_round_trips() {
        for entry in ENTRIES {
            let doc = parse_model(entry.text)
                .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            build_validated(&doc).unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            let text = serialize(&doc);
            let again = parse_model(&text).unwrap();
            assert_eq!(doc, again, "{} loses structure on re-parse", entry.name);
            assert_eq!(
                doc.metadata.name.as_deref(),
                Some(entry.name),
                "metadata name must match the entry name"
            );
        }
    }
}
