//! Documentation coverage of a function's parameters, exceptions and return
//! value by its structured comment.
//!
//! Java and C# weigh each element by presence plus description; Python and
//! JavaScript additionally credit type annotations. Go comments have no tags
//! and score 1 only when they open with the function name.

use serde::{Deserialize, Serialize};

use crate::corpus::Language;
use crate::docparse::{strip_markers, CommentDoc, DocElements};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessBreakdown {
    /// Number of documentable items.
    pub overall: u32,
    /// Number of documented items, before clamping to `overall`.
    pub available: u32,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl CompletenessBreakdown {
    fn from_counts(overall: u32, available: u32, diagnostics: Vec<String>) -> Self {
        let score = if overall == 0 {
            1.0
        } else {
            round_sig(f64::from(available.min(overall)) / f64::from(overall), 12)
        };
        CompletenessBreakdown {
            overall,
            available,
            score,
            diagnostics,
        }
    }
}

pub(crate) fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn names_match(code: &str, comment: &str, qualified: bool) -> bool {
    let (code, comment) = (code.trim(), comment.trim());
    if code == comment {
        return true;
    }
    qualified
        && (code.rsplit('.').next() == Some(comment) || comment.rsplit('.').next() == Some(code))
}

pub fn completeness(
    code: &DocElements,
    comment: &CommentDoc,
    language: Language,
) -> Result<CompletenessBreakdown> {
    let typed = match language {
        Language::Java | Language::CSharp => false,
        Language::Python | Language::JavaScript => true,
        Language::Go => {
            return Err(Error::invalid(
                "Go completeness is defined on the comment prefix; use completeness_go",
            ))
        }
    };
    let mut diagnostics = Vec::new();

    let mut exc_found = 0u32;
    let mut exc_described = 0u32;
    for name in &code.exceptions {
        let docs: Vec<_> = comment
            .exceptions
            .iter()
            .filter(|(doc_name, _)| names_match(name, doc_name, true))
            .collect();
        if !docs.is_empty() {
            exc_found += 1;
            if docs.iter().any(|(_, d)| d.has_description) {
                exc_described += 1;
            }
        }
    }
    for doc_name in comment.exceptions.keys() {
        if !code
            .exceptions
            .iter()
            .any(|n| names_match(n, doc_name, true))
        {
            diagnostics.push(format!("documented exception {doc_name:?} is not raised"));
        }
    }

    let mut par_found = 0u32;
    let mut par_described = 0u32;
    let mut par_typed = 0u32;
    for name in &code.params {
        if let Some(doc) = comment.params.get(name.as_str()) {
            par_found += 1;
            par_described += u32::from(doc.has_description);
            par_typed += u32::from(doc.has_type);
        }
    }
    for doc_name in comment.params.keys() {
        if !code.params.iter().any(|n| n == doc_name) {
            diagnostics.push(format!("documented parameter {doc_name:?} is not declared"));
        }
    }

    let n_exc = code.exceptions.len() as u32;
    let n_par = code.params.len() as u32;
    let r_code = u32::from(code.has_return);
    let count_description = u32::from(comment.count_description);
    let description_credit = u32::from(comment.has_description && comment.count_description);
    let return_documented = code.has_return && comment.return_doc.present;

    let (overall, available) = if typed {
        let return_credit = if return_documented {
            u32::from(comment.return_doc.has_type) + u32::from(comment.return_doc.has_description)
        } else {
            0
        };
        (
            2 * n_exc + 2 * r_code + 3 * n_par + count_description,
            (exc_found + exc_described)
                + return_credit
                + (par_found + par_described + par_typed)
                + description_credit,
        )
    } else {
        (
            2 * n_exc + r_code + 2 * n_par + count_description,
            (exc_found + exc_described)
                + u32::from(return_documented)
                + (par_found + par_described)
                + description_credit,
        )
    };
    Ok(CompletenessBreakdown::from_counts(
        overall,
        available,
        diagnostics,
    ))
}

/// 1 iff the comment opens with `function_name` followed by a word boundary.
pub fn completeness_go(comment: &str, function_name: &str) -> CompletenessBreakdown {
    let text = strip_markers(comment);
    let text = text.trim_start();
    let hit = !function_name.is_empty()
        && text.strip_prefix(function_name).is_some_and(|rest| {
            rest.chars()
                .next()
                .is_none_or(|c| !(c.is_alphanumeric() || c == '_'))
        });
    let v = u32::from(hit);
    CompletenessBreakdown {
        overall: v,
        available: v,
        score: f64::from(v),
        diagnostics: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docparse::{ExceptionDoc, ParamDoc, ReturnDoc};
    use std::collections::{BTreeMap, BTreeSet};

    fn code(params: &[&str], exceptions: &[&str], has_return: bool) -> DocElements {
        DocElements {
            function_name: "f".into(),
            params: params.iter().map(|s| s.to_string()).collect(),
            exceptions: exceptions
                .iter()
                .map(|s| s.to_string())
                .collect::<BTreeSet<_>>(),
            has_return,
        }
    }

    fn tagged(params: &[(&str, bool, bool)], ret: Option<(bool, bool)>) -> CommentDoc {
        let params: BTreeMap<_, _> = params
            .iter()
            .map(|(n, d, t)| {
                (
                    n.to_string(),
                    ParamDoc {
                        has_description: *d,
                        has_type: *t,
                    },
                )
            })
            .collect();
        let return_doc = ret
            .map(|(t, d)| ReturnDoc {
                present: true,
                has_type: t,
                has_description: d,
            })
            .unwrap_or_default();
        let count_description = params.is_empty() && !return_doc.present;
        CommentDoc {
            leading_description: "Does it.".into(),
            has_description: true,
            count_description,
            params,
            return_doc,
            ..CommentDoc::default()
        }
    }

    #[test]
    fn java_fully_documented() {
        let c = completeness(
            &code(&["a", "b"], &[], true),
            &tagged(
                &[("a", true, false), ("b", true, false)],
                Some((false, true)),
            ),
            Language::Java,
        )
        .unwrap();
        assert_eq!((c.overall, c.available), (5, 5));
        assert_eq!(c.score, 1.0);
    }

    #[test]
    fn java_partial() {
        let c = completeness(
            &code(&["a", "b"], &[], true),
            &tagged(&[("a", true, false)], None),
            Language::Java,
        )
        .unwrap();
        assert_eq!((c.overall, c.available), (5, 2));
        assert_eq!(c.score, 0.4);
    }

    #[test]
    fn python_untyped() {
        let c = completeness(
            &code(&["x"], &[], true),
            &tagged(&[("x", true, false)], Some((false, true))),
            Language::Python,
        )
        .unwrap();
        assert_eq!((c.overall, c.available), (5, 3));
        assert!((c.score - 0.6).abs() < 1e-12);
    }

    #[test]
    fn qualified_exception_names_match_by_suffix() {
        let mut doc = tagged(&[], None);
        doc.count_description = false;
        doc.exceptions.insert(
            "IOException".into(),
            ExceptionDoc {
                has_description: true,
            },
        );
        let c = completeness(
            &code(&[], &["java.io.IOException"], false),
            &doc,
            Language::Java,
        )
        .unwrap();
        assert_eq!((c.overall, c.available), (2, 2));
    }

    #[test]
    fn nothing_to_document_scores_one() {
        let mut doc = tagged(&[("ghost", true, false)], None);
        doc.count_description = false;
        let c = completeness(&code(&[], &[], false), &doc, Language::CSharp).unwrap();
        assert_eq!(c.overall, 0);
        assert_eq!(c.score, 1.0);
        assert_eq!(c.diagnostics.len(), 1);
    }

    #[test]
    fn go_is_a_contract_violation() {
        assert!(
            completeness(&code(&[], &[], false), &CommentDoc::default(), Language::Go).is_err()
        );
    }

    #[test]
    fn go_prefix_rule() {
        assert_eq!(completeness_go("Get returns the user.", "Get").score, 1.0);
        assert_eq!(completeness_go("Returns the user.", "Get").score, 0.0);
        assert_eq!(completeness_go("Getter for x.", "Get").score, 0.0);
        assert_eq!(completeness_go("// Get returns.", "Get").score, 1.0);
        assert_eq!(completeness_go("Get", "Get").score, 1.0);
        assert_eq!(completeness_go("Get_x is odd", "Get").score, 0.0);
        assert_eq!(completeness_go("anything", "").score, 0.0);
        let hit = completeness_go("Get it", "Get");
        assert_eq!((hit.overall, hit.available), (1, 1));
        let miss = completeness_go("get it", "Get");
        assert_eq!((miss.overall, miss.available), (0, 0));
    }

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0, 12), 0.333333333333);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        #[derive(Debug, Clone)]
        struct Case {
            code: DocElements,
            doc: CommentDoc,
            language: Language,
        }

        const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
        const EXC: [&str; 4] = ["E1", "E2", "pkg.E3", "E4"];

        fn case() -> impl Strategy<Value = Case> {
            (
                proptest::sample::subsequence(NAMES.to_vec(), 0..=6),
                proptest::sample::subsequence(EXC.to_vec(), 0..=4),
                any::<bool>(),
                proptest::collection::vec((0usize..6, any::<bool>(), any::<bool>()), 0..8),
                proptest::collection::vec((0usize..4, any::<bool>()), 0..5),
                proptest::option::of((any::<bool>(), any::<bool>())),
                any::<bool>(),
                prop_oneof![
                    Just(Language::Java),
                    Just(Language::CSharp),
                    Just(Language::Python),
                    Just(Language::JavaScript)
                ],
            )
                .prop_map(|(ps, es, ret, pdocs, edocs, rdoc, has_desc, language)| {
                    let code = DocElements {
                        function_name: "f".into(),
                        params: ps.iter().map(|s| s.to_string()).collect(),
                        exceptions: es.iter().map(|s| s.to_string()).collect(),
                        has_return: ret,
                    };
                    let mut doc = CommentDoc {
                        has_description: has_desc,
                        leading_description: if has_desc { "x".into() } else { String::new() },
                        ..CommentDoc::default()
                    };
                    for (i, d, t) in pdocs {
                        doc.params.insert(
                            NAMES[i].into(),
                            ParamDoc {
                                has_description: d,
                                has_type: t,
                            },
                        );
                    }
                    for (i, d) in edocs {
                        let name = EXC[i].rsplit('.').next().unwrap().to_string();
                        doc.exceptions
                            .insert(name, ExceptionDoc { has_description: d });
                    }
                    if let Some((t, d)) = rdoc {
                        doc.return_doc = ReturnDoc {
                            present: true,
                            has_type: t,
                            has_description: d,
                        };
                    }
                    doc.count_description = doc.params.is_empty()
                        && doc.exceptions.is_empty()
                        && !doc.return_doc.present;
                    Case {
                        code,
                        doc,
                        language,
                    }
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn available_never_exceeds_overall(c in case()) {
                let b = completeness(&c.code, &c.doc, c.language).unwrap();
                prop_assert!(b.available <= b.overall);
                prop_assert!((0.0..=1.0).contains(&b.score));
            }

            #[test]
            fn documenting_a_param_never_lowers_score(c in case(), pick in 0usize..6) {
                prop_assume!(!c.code.params.is_empty());
                let name = c.code.params[pick % c.code.params.len()].clone();
                let before = completeness(&c.code, &c.doc, c.language).unwrap().score;
                let mut doc = c.doc.clone();
                doc.params.insert(name, ParamDoc { has_description: true, has_type: true });
                doc.count_description = false;
                let after = completeness(&c.code, &doc, c.language).unwrap().score;
                prop_assert!(after >= before, "{before} -> {after}");
            }

            #[test]
            fn documenting_the_return_never_lowers_score(c in case()) {
                prop_assume!(c.code.has_return);
                let before = completeness(&c.code, &c.doc, c.language).unwrap().score;
                let mut doc = c.doc.clone();
                doc.return_doc = ReturnDoc { present: true, has_type: true, has_description: true };
                doc.count_description = false;
                let after = completeness(&c.code, &doc, c.language).unwrap().score;
                prop_assert!(after >= before, "{before} -> {after}");
            }

            #[test]
            fn dropping_an_undocumented_param_never_lowers_score(c in case()) {
                let undocumented: Vec<_> = c.code.params.iter()
                    .filter(|p| !c.doc.params.contains_key(p.as_str())).cloned().collect();
                prop_assume!(!undocumented.is_empty());
                let before = completeness(&c.code, &c.doc, c.language).unwrap().score;
                let mut code = c.code.clone();
                code.params.retain(|p| p != &undocumented[0]);
                let after = completeness(&code, &c.doc, c.language).unwrap().score;
                prop_assert!(after >= before);
            }

            #[test]
            fn go_score_is_binary(comment in "\\PC{0,40}", name in "[A-Za-z]{0,5}") {
                let s = completeness_go(&comment, &name).score;
                prop_assert!(s == 0.0 || s == 1.0);
            }
        }
    }
}
