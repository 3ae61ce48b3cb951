//! Word-vector tables in the plain-text `count dim` format.
//!
//! Tokens may be bare words or ConceptNet-style URIs (`/c/en/word`,
//! `/c/ru/слово`); URIs are indexed under their language, bare words under
//! `any`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

pub trait WordEmbeddings: Send + Sync {
    fn vector(&self, word: &str) -> Option<&[f32]>;
}

/// No vectors at all; matching degrades to exact string equality.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoEmbeddings;

impl WordEmbeddings for NoEmbeddings {
    fn vector(&self, _word: &str) -> Option<&[f32]> {
        None
    }
}

const LANGUAGE_PREFERENCE: [&str; 3] = ["en", "ru", "any"];

#[derive(Debug, Default, Clone)]
pub struct WordVectors {
    dim: usize,
    data: Vec<f32>,
    // word -> (language, row) in insertion order
    index: HashMap<String, Vec<(String, usize)>>,
}

fn split_token(token: &str) -> (String, String) {
    if let Some(rest) = token.strip_prefix("/c/") {
        let mut parts = rest.splitn(3, '/');
        if let (Some(lang), Some(word)) = (parts.next(), parts.next()) {
            return (lang.to_string(), word.to_lowercase());
        }
    }
    ("any".to_string(), token.to_lowercase())
}

impl WordVectors {
    pub fn new(dim: usize) -> Self {
        WordVectors {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn insert(&mut self, token: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::invalid(format!(
                "vector for {token:?} has {} components, expected {}",
                vector.len(),
                self.dim
            )));
        }
        let (lang, word) = split_token(token);
        let row = self.len();
        self.data.extend_from_slice(vector);
        let rows = self.index.entry(word).or_default();
        rows.retain(|(l, _)| *l != lang);
        rows.push((lang, row));
        Ok(())
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let corrupt = |line: usize, message: String| Error::Corpus { line, message };
        let header = match lines.next() {
            Some((_, l)) => l.map_err(|e| corrupt(1, e.to_string()))?,
            None => return Err(corrupt(1, "empty word-vector file".into())),
        };
        let mut fields = header.split_whitespace();
        let parse_usize = |s: Option<&str>| s.and_then(|s| s.parse::<usize>().ok());
        let (count, dim) = match (parse_usize(fields.next()), parse_usize(fields.next())) {
            (Some(c), Some(d)) if d > 0 => (c, d),
            _ => {
                return Err(corrupt(
                    1,
                    format!("bad header {header:?}, expected \"count dim\""),
                ))
            }
        };
        let mut table = WordVectors::new(dim);
        table.data.reserve(count.saturating_mul(dim).min(1 << 28));
        let mut values = Vec::with_capacity(dim);
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.map_err(|e| corrupt(lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("non-empty line");
            values.clear();
            for p in parts {
                let v: f32 = p
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("bad component {p:?}")))?;
                values.push(v);
            }
            table
                .insert(token, &values)
                .map_err(|e| corrupt(lineno, e.to_string()))?;
        }
        if table.len() != count {
            return Err(corrupt(
                1,
                format!(
                    "header declares {count} vectors, file holds {}",
                    table.len()
                ),
            ));
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        WordVectors::from_reader(BufReader::new(file))
    }

    pub fn vector_in(&self, language: &str, word: &str) -> Option<&[f32]> {
        let rows = self.index.get(word)?;
        rows.iter()
            .find(|(l, _)| l == language)
            .map(|&(_, row)| self.row(row))
    }

    fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }
}

impl WordEmbeddings for WordVectors {
    fn vector(&self, word: &str) -> Option<&[f32]> {
        let rows = self.index.get(word)?;
        LANGUAGE_PREFERENCE
            .iter()
            .find_map(|pref| rows.iter().find(|(l, _)| l == pref))
            .or_else(|| rows.first())
            .map(|&(_, row)| self.row(row))
    }
}
