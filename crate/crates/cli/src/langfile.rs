//! The plain-text language format.
//!
//! ```text
//! # optional header; without it b, c and n are inferred
//! b=2 c=3 n=3
//! 011
//! 101 2
//! ```
//!
//! A bare word has color 1. Unlisted words have color 0. The empty word of
//! a zero-length language is written `-`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use maxcomplex_core::function::table_len;
use maxcomplex_core::{ColoredFunction, Error, Result, Word};

/// Largest table a language file may describe.
pub const MAX_WORDS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageFile {
    pub b: u32,
    pub c: u32,
    pub n: u32,
    /// Listed words and their colors, sorted by word.
    pub entries: BTreeMap<Word, u32>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(text: &str, line: usize) -> Result<(u32, u32, u32)> {
    let mut slots: [Option<u32>; 3] = [None; 3];
    for field in text.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, found {field:?}")))?;
        let slot = match key {
            "b" => 0,
            "c" => 1,
            "n" => 2,
            _ => return Err(parse_err(line, format!("unknown header key {key:?}"))),
        };
        if slots[slot].is_some() {
            return Err(parse_err(line, format!("{key} given twice")));
        }
        let v: u32 = value
            .parse()
            .map_err(|_| parse_err(line, format!("{key}={value:?} is not a number")))?;
        slots[slot] = Some(v);
    }
    match slots {
        [Some(b), Some(c), Some(n)] => {
            if b == 0 || b > 36 {
                return Err(parse_err(line, "b must be between 1 and 36"));
            }
            if c == 0 {
                return Err(parse_err(line, "c must be positive"));
            }
            match table_len(b, n) {
                Ok(len) if len <= MAX_WORDS => Ok((b, c, n)),
                _ => Err(parse_err(
                    line,
                    format!("{b}^{n} words exceed the limit of {MAX_WORDS}"),
                )),
            }
        }
        _ => Err(parse_err(line, "header needs b=, c= and n=")),
    }
}

impl FromStr for LanguageFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut header: Option<(u32, u32, u32)> = None;
        let mut body: Vec<(usize, Word, u32)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.contains('=') {
                if header.is_some() || !body.is_empty() {
                    return Err(parse_err(line, "the header must come before every word"));
                }
                header = Some(parse_header(content, line)?);
                continue;
            }
            let mut fields = content.split_whitespace();
            let word_text = fields.next().unwrap_or_default();
            let word = if word_text == "-" {
                Word::empty()
            } else {
                word_text
                    .parse::<Word>()
                    .map_err(|e| parse_err(line, e.to_string()))?
            };
            let color = match fields.next() {
                None => 1,
                Some(c) => c
                    .parse()
                    .map_err(|_| parse_err(line, format!("color {c:?} is not a number")))?,
            };
            if let Some(extra) = fields.next() {
                return Err(parse_err(
                    line,
                    format!("unexpected {extra:?} after the color"),
                ));
            }
            body.push((line, word, color));
        }
        let (b, c, n) = match header {
            Some(h) => h,
            None => {
                let n = body.first().map_or(0, |(_, w, _)| w.len() as u32);
                let b = body
                    .iter()
                    .flat_map(|(_, w, _)| w.digits())
                    .max()
                    .map_or(2, |&d| (d + 1).max(2));
                let c = body
                    .iter()
                    .map(|&(_, _, c)| c)
                    .max()
                    .map_or(2, |c| (c + 1).max(2));
                if table_len(b, n).map_or(true, |len| len > MAX_WORDS) {
                    return Err(parse_err(
                        1,
                        format!("{b}^{n} words exceed the limit of {MAX_WORDS}"),
                    ));
                }
                (b, c, n)
            }
        };
        let mut entries = BTreeMap::new();
        for (line, word, color) in body {
            if word.len() != n as usize {
                return Err(parse_err(
                    line,
                    format!(
                        "word {word_text} has length {}, expected {n}",
                        word.len(),
                        word_text = show(&word)
                    ),
                ));
            }
            if let Some(&d) = word.digits().iter().find(|&&d| d >= b) {
                return Err(parse_err(line, format!("digit {d} is not below b = {b}")));
            }
            if color >= c {
                return Err(parse_err(
                    line,
                    format!("color {color} is not below c = {c}"),
                ));
            }
            if let Some(&prev) = entries.get(&word) {
                if prev != color {
                    return Err(parse_err(
                        line,
                        format!("word {} listed with colors {prev} and {color}", show(&word)),
                    ));
                }
            }
            entries.insert(word, color);
        }
        Ok(Self { b, c, n, entries })
    }
}

fn show(w: &Word) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.to_string()
    }
}

impl LanguageFile {
    pub fn to_function(&self) -> Result<ColoredFunction> {
        let mut table = vec![0u32; table_len(self.b, self.n)?];
        for (w, &color) in &self.entries {
            table[w.rank(self.b)?] = color;
        }
        ColoredFunction::new(self.b, self.n, self.c, table)
    }

    /// The nonzero words of `f`.
    pub fn from_function(f: &ColoredFunction) -> Self {
        Self {
            b: f.alphabet(),
            c: f.colors(),
            n: f.arity(),
            entries: f.support().into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(|&c| c == 0)
    }
}

impl fmt::Display for LanguageFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "b={} c={} n={}", self.b, self.c, self.n)?;
        for (w, &color) in &self.entries {
            match color {
                0 => {}
                1 => writeln!(f, "{}", show(w))?,
                _ => writeln!(f, "{} {color}", show(w))?,
            }
        }
        Ok(())
    }
}
