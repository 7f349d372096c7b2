use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::term::{escape_literal, is_illegal_iri_char};

/// Where a placeholder sits in the template text; decides how values are escaped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaceholderContext {
    /// Inside `<...>`: the value must not contain characters illegal in IRIs.
    Iri,
    /// Inside a quoted string: the value is escaped as a string body.
    Literal,
    /// Elsewhere: only `[A-Za-z0-9_.:-]` is allowed.
    Bare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Slot {
    start: usize,
    end: usize,
    name: String,
    context: PlaceholderContext,
}

/// SPARQL text with `{name}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTemplate {
    text: String,
    slots: Vec<Slot>,
    required: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("no value for placeholder {{{0}}}")]
    MissingPlaceholder(String),
    #[error("binding `{0}` does not match any placeholder")]
    UnusedBinding(String),
    #[error("value {value:?} for {{{name}}} is not allowed in {context:?} position")]
    IllegalValue {
        name: String,
        value: String,
        context: PlaceholderContext,
    },
}

fn placeholder_at(text: &str, i: usize) -> Option<(usize, &str)> {
    let rest = text[i..].strip_prefix('{')?;
    let len = rest
        .char_indices()
        .take_while(|&(k, c)| {
            if k == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            }
        })
        .count();
    if len == 0 || !rest[len..].starts_with('}') {
        return None;
    }
    Some((i + len + 2, &rest[..len]))
}

impl QueryTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let slots = scan(&text);
        let required = slots.iter().map(|s| s.name.clone()).collect();
        QueryTemplate { text, slots, required }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Placeholder names that [`QueryTemplate::instantiate`] expects.
    pub fn required(&self) -> &BTreeSet<String> {
        &self.required
    }

    pub fn context_of(&self, name: &str) -> Option<PlaceholderContext> {
        self.slots.iter().find(|s| s.name == name).map(|s| s.context)
    }

    /// Substitutes every placeholder. The bindings must cover exactly the
    /// required placeholders.
    pub fn instantiate(&self, bindings: &BTreeMap<String, String>) -> Result<String, TemplateError> {
        if let Some(missing) = self.required.iter().find(|n| !bindings.contains_key(*n)) {
            return Err(TemplateError::MissingPlaceholder(missing.clone()));
        }
        if let Some(unused) = bindings.keys().find(|k| !self.required.contains(*k)) {
            return Err(TemplateError::UnusedBinding(unused.clone()));
        }
        let mut out = String::with_capacity(self.text.len() + 32);
        let mut last = 0;
        for slot in &self.slots {
            out.push_str(&self.text[last..slot.start]);
            let value = &bindings[&slot.name];
            let illegal = || TemplateError::IllegalValue {
                name: slot.name.clone(),
                value: value.clone(),
                context: slot.context,
            };
            match slot.context {
                PlaceholderContext::Literal => {
                    for (k, part) in value.split('\'').enumerate() {
                        if k > 0 {
                            out.push_str("\\'");
                        }
                        escape_literal(&mut out, part);
                    }
                }
                PlaceholderContext::Iri => {
                    if value.chars().any(is_illegal_iri_char) {
                        return Err(illegal());
                    }
                    out.push_str(value);
                }
                PlaceholderContext::Bare => {
                    if value.is_empty()
                        || !value
                            .chars()
                            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | ':' | '-'))
                    {
                        return Err(illegal());
                    }
                    out.push_str(value);
                }
            }
            last = slot.end;
        }
        out.push_str(&self.text[last..]);
        Ok(out)
    }
}

fn scan(text: &str) -> Vec<Slot> {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Normal,
        Iri,
        Str { quote: char, long: bool },
        Comment,
    }
    let mut slots = Vec::new();
    let mut state = State::Normal;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().expect("in bounds");
        if state != State::Comment {
            if let Some((end, name)) = placeholder_at(text, i) {
                let context = match state {
                    State::Iri => PlaceholderContext::Iri,
                    State::Str { .. } => PlaceholderContext::Literal,
                    _ => PlaceholderContext::Bare,
                };
                slots.push(Slot {
                    start: i,
                    end,
                    name: name.to_owned(),
                    context,
                });
                i = end;
                continue;
            }
        }
        let mut step = c.len_utf8();
        state = match state {
            State::Normal => match c {
                '"' | '\'' => {
                    let long = rest[1..].starts_with(&format!("{c}{c}"));
                    if long {
                        step = 3;
                    }
                    State::Str { quote: c, long }
                }
                '<' if rest[1..].chars().next().is_some_and(|n| !n.is_whitespace() && n != '=') => State::Iri,
                '#' => State::Comment,
                _ => State::Normal,
            },
            State::Iri if c == '>' => State::Normal,
            State::Iri => State::Iri,
            State::Str { .. } if c == '\\' => {
                step += rest[1..].chars().next().map_or(0, char::len_utf8);
                state
            }
            State::Str { quote, long } if c == quote => {
                let triple = format!("{c}{c}{c}");
                if !long {
                    State::Normal
                } else if rest.starts_with(&triple) {
                    step = 3;
                    State::Normal
                } else {
                    state
                }
            }
            State::Str { .. } => state,
            State::Comment if c == '\n' => State::Normal,
            State::Comment => State::Comment,
        };
        i += step;
    }
    slots
}
