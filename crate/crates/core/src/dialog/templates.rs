use std::collections::BTreeMap;

use super::DialogError;

const BUNDLED: &str = include_str!("../../resources/dialog/templates.tsv");

/// Response strings keyed by dialog act.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Templates {
    table: BTreeMap<String, String>,
}

fn title(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl Templates {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled templates are valid")
    }

    pub fn parse(text: &str) -> Result<Self, DialogError> {
        let mut table = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('\t').ok_or_else(|| DialogError::Format {
                what: "template table",
                line: i + 1,
                msg: "expected `key<TAB>response`".into(),
            })?;
            table.insert(k.to_string(), v.to_string());
        }
        Ok(Templates { table })
    }

    /// Fills `{name}` and `{name:title}` holes.
    pub fn render(&self, key: &str, args: &[(&str, &str)]) -> Result<String, DialogError> {
        let mut out = self.table.get(key).ok_or_else(|| DialogError::MissingTemplate(key.to_string()))?.clone();
        for (name, value) in args {
            out = out.replace(&format!("{{{name}:title}}"), &title(value));
            out = out.replace(&format!("{{{name}}}"), value);
        }
        Ok(out)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.table.insert(key.to_string(), value.to_string());
    }
}

/// Upper-cases the first letter.
pub(crate) fn capitalize(s: &str) -> String {
    title(s)
}
