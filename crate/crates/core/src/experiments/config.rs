//! Flat `key = value` text with `[section]` headers.
//!
//! `#` starts a comment (whole line or after whitespace). Keys must appear
//! inside a section; sections and keys may not repeat.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSection {
    pub name: String,
    pub line: usize,
    pub entries: Vec<ConfigEntry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigDoc {
    pub sections: Vec<ConfigSection>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::ConfigSyntax {
        line,
        message: message.into(),
    }
}

fn strip_comment(raw: &str) -> &str {
    if raw.trim_start().starts_with('#') {
        return "";
    }
    match raw.find(" #").or_else(|| raw.find("\t#")) {
        Some(i) => &raw[..i],
        None => raw,
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDoc::default();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line, "section header is missing `]`"))?
                    .trim();
                if !valid_name(name) {
                    return Err(syntax(line, format!("invalid section name `{name}`")));
                }
                if doc.sections.iter().any(|s| s.name == name) {
                    return Err(syntax(line, format!("section [{name}] appears twice")));
                }
                doc.sections.push(ConfigSection {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| syntax(line, "expected `key = value` or `[section]`"))?;
            let key = key.trim();
            let value = value.trim();
            if !valid_name(key) {
                return Err(syntax(line, format!("invalid key `{key}`")));
            }
            if value.is_empty() {
                return Err(syntax(line, format!("key `{key}` has no value")));
            }
            let section = doc
                .sections
                .last_mut()
                .ok_or_else(|| syntax(line, format!("key `{key}` appears before any [section]")))?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(syntax(
                    line,
                    format!("key `{key}` repeated in [{}]", section.name),
                ));
            }
            section.entries.push(ConfigEntry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        if doc.sections.iter().all(|s| s.entries.is_empty()) {
            return Err(syntax(last_line.max(1), "configuration is empty"));
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&ConfigSection> {
        self.sections.iter().find(|s| s.name == name)
    }
}

/// Typed reads from a config document that remember which keys were used,
/// so leftovers can be reported as unknown.
pub(crate) struct Reader<'a> {
    doc: &'a ConfigDoc,
    used: Vec<(String, String)>,
}

impl<'a> Reader<'a> {
    pub fn new(doc: &'a ConfigDoc) -> Self {
        Self {
            doc,
            used: Vec::new(),
        }
    }

    fn entry(&mut self, section: &str, key: &str) -> Option<&'a ConfigEntry> {
        let e = self
            .doc
            .section(section)?
            .entries
            .iter()
            .find(|e| e.key == key)?;
        self.used.push((section.to_string(), key.to_string()));
        Some(e)
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.doc
            .section(section)
            .is_some_and(|s| s.entries.iter().any(|e| e.key == key))
    }

    pub fn str_opt(&mut self, section: &str, key: &str) -> Option<String> {
        self.entry(section, key).map(|e| e.value.clone())
    }

    pub fn str(&mut self, section: &str, key: &str) -> Result<String> {
        self.str_opt(section, key)
            .ok_or_else(|| missing(section, key))
    }

    pub fn parse_opt<T: std::str::FromStr>(
        &mut self,
        section: &str,
        key: &str,
    ) -> Result<Option<T>> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                syntax(
                    e.line,
                    format!(
                        "cannot parse `{}` as a {} for `{key}`",
                        e.value,
                        short_type::<T>()
                    ),
                )
            }),
        }
    }

    pub fn parse<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Result<T> {
        self.parse_opt(section, key)?
            .ok_or_else(|| missing(section, key))
    }

    pub fn parse_or<T: std::str::FromStr>(
        &mut self,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T> {
        Ok(self.parse_opt(section, key)?.unwrap_or(default))
    }

    /// Errors on the first section or key that was never read.
    pub fn finish(self, known_sections: &[&str]) -> Result<()> {
        for s in &self.doc.sections {
            if !known_sections.contains(&s.name.as_str()) {
                return Err(syntax(s.line, format!("unknown section [{}]", s.name)));
            }
            for e in &s.entries {
                if !self
                    .used
                    .iter()
                    .any(|(sec, key)| sec == &s.name && key == &e.key)
                {
                    return Err(syntax(
                        e.line,
                        format!("unknown key `{}` in [{}]", e.key, s.name),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn missing(section: &str, key: &str) -> Error {
    Error::ConfigField {
        field: format!("{section}.{key}"),
        message: "required key is missing".into(),
    }
}

fn short_type<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    match name {
        "f64" => "number",
        "bool" => "boolean",
        _ if name.starts_with('u') || name.starts_with('i') => "integer",
        _ => name,
    }
}
