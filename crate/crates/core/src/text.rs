//! Identifier splitting, lemmatization and stop-word filtering.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::sync::LazyLock;

use crate::error::{Error, Result};

const LEMMAS_EN: &str = include_str!("../data/lemmas_en.tsv");
const LEMMAS_RU: &str = include_str!("../data/lemmas_ru.tsv");
const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");
const STOPWORDS_RU: &str = include_str!("../data/stopwords_ru.txt");

/// Splits an identifier into word pieces at `_`, `-`, other non-alphanumeric
/// characters, lower→upper case changes, acronym ends (`HTTPServer` →
/// `HTTP`, `Server`) and letter/digit transitions.
pub fn split_identifier(ident: &str) -> Vec<&str> {
    let mut pieces = Vec::new();
    for run in ident.split(|c: char| !c.is_alphanumeric()) {
        if run.is_empty() {
            continue;
        }
        let chars: Vec<(usize, char)> = run.char_indices().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (prev, cur) = (chars[i - 1].1, chars[i].1);
            let next = chars.get(i + 1).map(|&(_, c)| c);
            let boundary = (prev.is_lowercase() && cur.is_uppercase())
                || (prev.is_alphabetic() != cur.is_alphabetic())
                || (prev.is_uppercase()
                    && cur.is_uppercase()
                    && next.is_some_and(|n| n.is_lowercase()));
            if boundary {
                pieces.push(&run[start..chars[i].0]);
                start = chars[i].0;
            }
        }
        pieces.push(&run[start..]);
    }
    pieces
}

/// Lemma tables and stop words shared by term extraction on both the code
/// and the comment side.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    lemmas: HashMap<String, String>,
    stopwords: HashSet<String>,
}

static BUNDLED: LazyLock<Lexicon> = LazyLock::new(|| {
    let mut lex = Lexicon::default();
    for table in [LEMMAS_EN, LEMMAS_RU] {
        lex.add_lemma_table(table).expect("bundled lemma table");
    }
    for list in [STOPWORDS_EN, STOPWORDS_RU] {
        lex.add_stopwords(list);
    }
    lex
});

impl Lexicon {
    /// English and Russian tables shipped with the crate.
    pub fn bundled() -> &'static Lexicon {
        &BUNDLED
    }

    /// Adds `form<TAB>lemma` lines; `#` starts a comment line.
    pub fn add_lemma_table(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (form, lemma) = line.split_once('\t').ok_or_else(|| {
                Error::Config(format!(
                    "lemma table line {}: expected form<TAB>lemma",
                    i + 1
                ))
            })?;
            self.lemmas
                .insert(form.trim().to_lowercase(), lemma.trim().to_lowercase());
        }
        Ok(())
    }

    pub fn add_stopwords(&mut self, text: &str) {
        for line in text.lines() {
            let word = line.trim();
            if !word.is_empty() && !word.starts_with('#') {
                self.stopwords.insert(word.to_lowercase());
            }
        }
    }

    pub fn load_lemma_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.add_lemma_table(&text)
    }

    pub fn load_stopword_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.add_stopwords(&text);
        Ok(())
    }

    pub fn lemma<'a>(&'a self, word: &'a str) -> &'a str {
        self.lemmas.get(word).map_or(word, String::as_str)
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    /// Lowercases and lemmatizes a piece; `None` for stop words.
    pub fn normalize(&self, piece: &str) -> Option<String> {
        let lower = piece.to_lowercase();
        if self.is_stopword(&lower) {
            return None;
        }
        let lemma = self.lemma(&lower);
        if self.is_stopword(lemma) {
            return None;
        }
        Some(lemma.to_string())
    }

    /// Sorted, deduplicated terms of length ≥ 2 from a set of identifiers.
    pub fn identifier_terms<'a, I>(&self, identifiers: I) -> Vec<String>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut terms = BTreeSet::new();
        for ident in identifiers {
            for piece in split_identifier(ident) {
                if piece.chars().all(|c| c.is_numeric()) {
                    continue;
                }
                if let Some(term) = self.normalize(piece) {
                    if term.chars().count() >= 2 {
                        terms.insert(term);
                    }
                }
            }
        }
        terms.into_iter().collect()
    }

    /// Normalized words of free text. Identifier-shaped tokens are split the
    /// same way as on the code side so that `playerId` in prose matches.
    pub fn text_words(&self, text: &str) -> BTreeSet<String> {
        text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
            .flat_map(split_identifier)
            .filter_map(|piece| self.normalize(piece))
            .collect()
    }
}
