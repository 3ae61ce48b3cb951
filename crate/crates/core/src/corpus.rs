//! Corpus records and their line-delimited JSON encoding.
//!
//! A corpus file holds one [`CodeCommentPair`] per line; a scores file holds
//! one [`ScoredPair`] per line. Both are read as streams so that arbitrarily
//! large corpora can be filtered in constant memory.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classifier::FeatureVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Python,
    Java,
    JavaScript,
    CSharp,
    Go,
}

impl Language {
    pub const ALL: [Language; 5] = [
        Language::Python,
        Language::Java,
        Language::JavaScript,
        Language::CSharp,
        Language::Go,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Language::Python => "python",
            Language::Java => "java",
            Language::JavaScript => "javascript",
            Language::CSharp => "csharp",
            Language::Go => "go",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Language::ALL
            .into_iter()
            .find(|l| l.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown language tag {s:?}")))
    }
}

/// One code–comment record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeCommentPair {
    pub id: String,
    pub language: Language,
    pub code: String,
    pub comment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<bool>,
}

/// A pair's component scores and fused probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub id: String,
    pub components: FeatureVector,
    pub probability: f64,
}

// Every field optional so that missing fields produce our own message.
#[derive(Deserialize)]
struct RawPair {
    id: Option<String>,
    language: Option<String>,
    code: Option<String>,
    comment: Option<String>,
    #[serde(default)]
    label: Option<bool>,
}

impl RawPair {
    fn validate(self, line: usize) -> Result<CodeCommentPair> {
        let missing = |field: &str| Error::Corpus {
            line,
            message: format!("missing field {field}"),
        };
        let id = self.id.ok_or_else(|| missing("id"))?;
        let language = self.language.ok_or_else(|| missing("language"))?;
        let code = self.code.ok_or_else(|| missing("code"))?;
        let comment = self.comment.ok_or_else(|| missing("comment"))?;
        if id.is_empty() {
            return Err(Error::Corpus {
                line,
                message: "empty id".into(),
            });
        }
        if code.is_empty() {
            return Err(Error::Corpus {
                line,
                message: format!("empty code for id {id:?}"),
            });
        }
        let language = language.parse::<Language>().map_err(|_| Error::Corpus {
            line,
            message: format!("unknown language tag {language:?}"),
        })?;
        Ok(CodeCommentPair {
            id,
            language,
            code,
            comment,
            label: self.label,
        })
    }
}

/// Streams JSON lines from any reader, skipping blank lines.
///
/// Yields `(line_number, value)`; line numbers are 1-based.
pub struct JsonLines<R, T> {
    reader: R,
    line: usize,
    buf: Vec<u8>,
    _marker: std::marker::PhantomData<T>,
}

impl<R: BufRead, T: DeserializeOwned> JsonLines<R, T> {
    pub fn new(reader: R) -> Self {
        JsonLines {
            reader,
            line: 0,
            buf: Vec::new(),
            _marker: std::marker::PhantomData,
        }
    }
}

impl<R: BufRead, T: DeserializeOwned> Iterator for JsonLines<R, T> {
    type Item = Result<(usize, T)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    return Some(Err(Error::Corpus {
                        line: self.line + 1,
                        message: e.to_string(),
                    }))
                }
            }
            self.line += 1;
            let line = self.line;
            let text = match std::str::from_utf8(&self.buf) {
                Ok(t) => t,
                Err(e) => {
                    return Some(Err(Error::Corpus {
                        line,
                        message: format!("invalid UTF-8 at byte {}", e.valid_up_to()),
                    }))
                }
            };
            if text.trim().is_empty() {
                continue;
            }
            return Some(
                serde_json::from_str::<T>(text)
                    .map(|v| (line, v))
                    .map_err(|e| Error::Corpus {
                        line,
                        message: e.to_string(),
                    }),
            );
        }
    }
}

/// Streaming corpus reader enforcing the record invariants, including id
/// uniqueness across the whole stream.
pub struct CorpusReader<R> {
    lines: JsonLines<R, RawPair>,
    seen: HashMap<String, usize>,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R) -> Self {
        CorpusReader {
            lines: JsonLines::new(reader),
            seen: HashMap::new(),
        }
    }
}

impl CorpusReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(CorpusReader::new(BufReader::new(file)))
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<CodeCommentPair>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, raw) = match self.lines.next()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let pair = match raw.validate(line) {
            Ok(p) => p,
            Err(e) => return Some(Err(e)),
        };
        if let Some(first) = self.seen.get(&pair.id) {
            return Some(Err(Error::Corpus {
                line,
                message: format!("duplicate id {:?} (first on line {first})", pair.id),
            }));
        }
        self.seen.insert(pair.id.clone(), line);
        Some(Ok(pair))
    }
}

pub fn load_corpus(path: &Path) -> Result<Vec<CodeCommentPair>> {
    CorpusReader::open(path)?.collect()
}

pub fn load_scores(path: &Path) -> Result<Vec<ScoredPair>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    JsonLines::new(BufReader::new(file))
        .map(|r| r.map(|(_, v)| v))
        .collect()
}

/// Writes one JSON object per line.
pub fn write_jsonl<'a, T, I>(items: I, path: &Path) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        write_json_line(&mut out, item).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json_line<W: Write, T: Serialize>(
    out: &mut W,
    item: &T,
) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, item)?;
    out.write_all(b"\n")
}

pub fn write_scores(pairs: &[ScoredPair], path: &Path) -> Result<()> {
    write_jsonl(pairs, path)
}
