//! Structured-comment parsing driven by a per-language tag grammar table.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Language;
use crate::error::{Error, Result};

const DEFAULT_GRAMMARS: &str = include_str!("../../data/tag_grammars.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagKind {
    Param,
    ParamType,
    Return,
    ReturnType,
    Exception,
}

#[derive(Debug, Clone, Deserialize)]
struct TagSpec {
    tag_pattern: String,
    kind: TagKind,
    #[serde(default)]
    captures: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
struct GrammarSpec {
    #[serde(default)]
    boundary_pattern: Option<String>,
    #[serde(default)]
    description_pattern: Option<String>,
    #[serde(default)]
    strip_markup: bool,
    tags: Vec<TagSpec>,
}

#[derive(Debug)]
struct CompiledTag {
    pattern: Regex,
    kind: TagKind,
}

#[derive(Debug)]
struct Grammar {
    tags: Vec<CompiledTag>,
    boundary: Option<Regex>,
    description: Option<Regex>,
    strip_markup: bool,
}

/// Tag grammars for all supported languages.
#[derive(Debug)]
pub struct TagGrammars {
    by_language: HashMap<Language, Grammar>,
}

static DEFAULT: LazyLock<TagGrammars> =
    LazyLock::new(|| TagGrammars::from_json(DEFAULT_GRAMMARS).expect("bundled tag grammars"));

static MARKUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]*>").unwrap());

impl TagGrammars {
    pub fn bundled() -> &'static TagGrammars {
        &DEFAULT
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HashMap<String, GrammarSpec> = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("tag grammar table: {e}")))?;
        let compile = |p: &str| {
            Regex::new(p).map_err(|e| Error::Config(format!("tag grammar pattern {p:?}: {e}")))
        };
        let mut by_language = HashMap::new();
        for (tag, spec) in raw {
            let language: Language = tag.parse()?;
            let mut tags = Vec::with_capacity(spec.tags.len());
            for t in &spec.tags {
                let pattern = compile(&t.tag_pattern)?;
                for cap in &t.captures {
                    if !pattern.capture_names().flatten().any(|n| n == cap) {
                        return Err(Error::Config(format!(
                            "tag grammar pattern {:?} lacks declared capture {cap:?}",
                            t.tag_pattern
                        )));
                    }
                }
                tags.push(CompiledTag {
                    pattern,
                    kind: t.kind,
                });
            }
            let grammar = Grammar {
                tags,
                boundary: spec.boundary_pattern.as_deref().map(compile).transpose()?,
                description: spec
                    .description_pattern
                    .as_deref()
                    .map(compile)
                    .transpose()?,
                strip_markup: spec.strip_markup,
            };
            by_language.insert(language, grammar);
        }
        for language in Language::ALL {
            if !by_language.contains_key(&language) {
                return Err(Error::Config(format!("tag grammar table lacks {language}")));
            }
        }
        Ok(TagGrammars { by_language })
    }

    pub fn parse_comment(&self, comment: &str, language: Language) -> CommentDoc {
        let grammar = &self.by_language[&language];
        parse_with(grammar, comment)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDoc {
    pub has_description: bool,
    pub has_type: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionDoc {
    pub has_description: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnDoc {
    pub present: bool,
    pub has_type: bool,
    pub has_description: bool,
}

/// What a structured comment documents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentDoc {
    pub leading_description: String,
    pub has_description: bool,
    /// False as soon as any structural tag is present.
    pub count_description: bool,
    pub params: BTreeMap<String, ParamDoc>,
    pub exceptions: BTreeMap<String, ExceptionDoc>,
    pub return_doc: ReturnDoc,
    /// Character count of the raw comment text.
    pub raw_length: usize,
    pub diagnostics: Vec<String>,
}

pub fn parse_comment(comment: &str, language: Language) -> CommentDoc {
    TagGrammars::bundled().parse_comment(comment, language)
}

struct TagMatch<'t> {
    start: usize,
    end: usize,
    kind: TagKind,
    name: Option<&'t str>,
    ty: Option<&'t str>,
    desc: Option<&'t str>,
}

fn parse_with(grammar: &Grammar, raw: &str) -> CommentDoc {
    let text = strip_markers(raw);
    let text = text.as_str();

    let mut matches: Vec<(usize, TagMatch<'_>)> = Vec::new();
    for (order, tag) in grammar.tags.iter().enumerate() {
        for caps in tag.pattern.captures_iter(text) {
            let whole = caps.get(0).expect("group 0");
            let has_desc_group = tag.pattern.capture_names().flatten().any(|n| n == "desc");
            matches.push((
                order,
                TagMatch {
                    start: whole.start(),
                    end: whole.end(),
                    kind: tag.kind,
                    name: caps.name("name").map(|m| m.as_str()),
                    ty: caps.name("type").map(|m| m.as_str()),
                    desc: if has_desc_group {
                        Some(caps.name("desc").map_or("", |m| m.as_str()))
                    } else {
                        None
                    },
                },
            ));
        }
    }
    matches.sort_by_key(|(order, m)| (m.start, *order));
    let mut tags: Vec<TagMatch<'_>> = Vec::new();
    for (_, m) in matches {
        if tags.last().is_none_or(|prev| m.start >= prev.end) {
            tags.push(m);
        }
    }

    let mut diagnostics = Vec::new();
    let mut boundaries: BTreeSet<usize> = tags.iter().map(|t| t.start).collect();
    if let Some(boundary) = &grammar.boundary {
        for m in boundary.find_iter(text) {
            let inside_tag = tags.iter().any(|t| m.start() < t.end && t.start < m.end());
            if !inside_tag {
                boundaries.insert(m.start());
                diagnostics.push(format!("unrecognized tag {:?}", m.as_str().trim()));
            }
        }
    }

    let clean = |s: &str| -> String {
        if grammar.strip_markup {
            MARKUP.replace_all(s, " ").trim().to_string()
        } else {
            s.trim().to_string()
        }
    };

    let leading_description = match grammar.description.as_ref().and_then(|d| d.captures(text)) {
        Some(caps) => clean(caps.name("desc").map_or("", |m| m.as_str())),
        None => {
            let end = boundaries.first().copied().unwrap_or(text.len());
            clean(&text[..end])
        }
    };

    let mut doc = CommentDoc {
        has_description: !leading_description.is_empty(),
        leading_description,
        count_description: tags.is_empty(),
        raw_length: raw.chars().count(),
        ..CommentDoc::default()
    };

    let mut typed_params = BTreeSet::new();
    for tag in &tags {
        let desc = match tag.desc {
            Some(d) => clean(d),
            None => {
                let end = boundaries
                    .range(tag.end..)
                    .next()
                    .copied()
                    .unwrap_or(text.len());
                clean(&text[tag.end..end])
            }
        };
        let described = !desc.is_empty();
        let names: Vec<String> = match tag.name {
            Some(raw_name) if tag.kind == TagKind::Exception => raw_name
                .split(',')
                .map(normalize_name)
                .filter(|n| !n.is_empty())
                .collect(),
            Some(raw_name) => Some(normalize_name(raw_name))
                .filter(|n| !n.is_empty())
                .into_iter()
                .collect(),
            None => Vec::new(),
        };
        let typed = tag.ty.is_some_and(|t| !t.trim().is_empty());
        match tag.kind {
            TagKind::Param => {
                for name in names {
                    doc.params.insert(
                        name,
                        ParamDoc {
                            has_description: described,
                            has_type: typed,
                        },
                    );
                }
            }
            TagKind::ParamType => {
                if described {
                    typed_params.extend(names);
                }
            }
            TagKind::Return => {
                doc.return_doc.present = true;
                doc.return_doc.has_description |= described;
                doc.return_doc.has_type |= typed;
            }
            TagKind::ReturnType => {
                doc.return_doc.present = true;
                doc.return_doc.has_type |= described;
            }
            TagKind::Exception => {
                if names.is_empty() {
                    diagnostics.push("exception tag without a type name".to_string());
                }
                for name in names {
                    doc.exceptions.insert(
                        name,
                        ExceptionDoc {
                            has_description: described,
                        },
                    );
                }
            }
        }
    }
    for name in typed_params {
        match doc.params.get_mut(&name) {
            Some(p) => p.has_type = true,
            None => diagnostics.push(format!("type given for undocumented parameter {name:?}")),
        }
    }
    doc.diagnostics = diagnostics;
    doc
}

fn normalize_name(raw: &str) -> String {
    let trimmed = raw.trim().trim_matches(|c: char| {
        c.is_whitespace() || matches!(c, '{' | '}' | '[' | ']' | '(' | ')' | '<' | '>' | '*')
    });
    // JSDoc optional parameters carry defaults: `[name=value]`.
    trimmed.split('=').next().unwrap_or("").trim().to_string()
}

/// Removes comment delimiters (`/** */`, `///`, `//`, `#`, triple quotes).
pub fn strip_markers(raw: &str) -> String {
    let s = raw.trim();
    for quote in ["\"\"\"", "'''"] {
        let body = s.trim_start_matches(['r', 'R', 'u', 'U', 'b', 'B']);
        if let Some(inner) = body.strip_prefix(quote) {
            let inner = inner.strip_suffix(quote).unwrap_or(inner);
            return inner
                .lines()
                .map(str::trim_end)
                .collect::<Vec<_>>()
                .join("\n");
        }
    }
    if let Some(inner) = s.strip_prefix("/*") {
        let inner = inner.strip_prefix('*').unwrap_or(inner);
        let inner = inner.strip_suffix("*/").unwrap_or(inner);
        return inner
            .lines()
            .map(|line| {
                let line = line.trim_start();
                let line = line.strip_prefix('*').unwrap_or(line);
                line.trim_end()
            })
            .collect::<Vec<_>>()
            .join("\n");
    }
    s.lines()
        .map(|line| {
            let t = line.trim_start();
            let stripped = t
                .strip_prefix("///")
                .or_else(|| t.strip_prefix("//"))
                .or_else(|| t.strip_prefix('#'));
            match stripped {
                Some(rest) => rest.strip_prefix(' ').unwrap_or(rest).trim_end(),
                None => line.trim_end(),
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}
