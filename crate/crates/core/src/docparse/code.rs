//! Function-level extraction from source code via tree-sitter grammars.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use tree_sitter::{Node, Parser, Tree};

use crate::corpus::Language;
use crate::error::{Error, Result};

/// Documentable elements of one function.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocElements {
    pub function_name: String,
    /// Declared parameter names in signature order, without receivers.
    pub params: Vec<String>,
    /// Exception type names raised or thrown in the body.
    pub exceptions: BTreeSet<String>,
    pub has_return: bool,
}

fn grammar(language: Language) -> tree_sitter::Language {
    match language {
        Language::Python => tree_sitter_python::LANGUAGE.into(),
        Language::Java => tree_sitter_java::LANGUAGE.into(),
        Language::JavaScript => tree_sitter_javascript::LANGUAGE.into(),
        Language::CSharp => tree_sitter_c_sharp::LANGUAGE.into(),
        Language::Go => tree_sitter_go::LANGUAGE.into(),
    }
}

/// Node kinds that introduce a named or anonymous function scope.
fn is_function_kind(language: Language, kind: &str) -> bool {
    match language {
        Language::Python => kind == "function_definition",
        Language::Java => matches!(kind, "method_declaration" | "constructor_declaration"),
        Language::CSharp => matches!(
            kind,
            "method_declaration" | "local_function_statement" | "constructor_declaration"
        ),
        Language::JavaScript => matches!(
            kind,
            "function_declaration"
                | "generator_function_declaration"
                | "method_definition"
                | "function_expression"
                | "function"
                | "generator_function"
                | "arrow_function"
        ),
        Language::Go => matches!(kind, "function_declaration" | "method_declaration"),
    }
}

/// Scopes whose statements do not belong to the enclosing function.
fn is_nested_scope(language: Language, kind: &str) -> bool {
    is_function_kind(language, kind)
        || match language {
            Language::Python => kind == "lambda" || kind == "class_definition",
            Language::Java => matches!(kind, "lambda_expression" | "class_body"),
            Language::CSharp => matches!(kind, "lambda_expression" | "anonymous_method_expression"),
            Language::JavaScript => kind == "class_body",
            Language::Go => kind == "func_literal",
        }
}

/// A source string parsed and verified to hold exactly one function.
pub(crate) struct ParsedFunction<'s> {
    source: &'s str,
    language: Language,
    tree: Tree,
    function_start: usize,
}

impl<'s> ParsedFunction<'s> {
    pub(crate) fn parse(source: &'s str, language: Language) -> Result<Self> {
        let mut parser = Parser::new();
        parser
            .set_language(&grammar(language))
            .expect("bundled grammar is ABI-compatible");
        let tree = parser.parse(source, None).ok_or_else(|| Error::Parse {
            language,
            row: 1,
            column: 1,
            message: "parser produced no tree".into(),
        })?;
        let root = tree.root_node();
        if root.has_error() {
            let bad = first_error(root).unwrap_or(root);
            let pos = bad.start_position();
            let message = if bad.is_missing() {
                format!("missing {}", bad.kind())
            } else {
                "unexpected syntax".to_string()
            };
            return Err(Error::Parse {
                language,
                row: pos.row + 1,
                column: pos.column + 1,
                message,
            });
        }
        let mut found = Vec::new();
        collect_functions(root, language, &mut found);
        match found.len() {
            1 => {}
            0 => {
                return Err(Error::Definition {
                    language,
                    message: "no function definition found".into(),
                })
            }
            n => {
                return Err(Error::Definition {
                    language,
                    message: format!("expected one function definition, found {n}"),
                })
            }
        }
        let function_start = found[0];
        Ok(ParsedFunction {
            source,
            language,
            tree,
            function_start,
        })
    }

    fn function(&self) -> Node<'_> {
        let mut found = Vec::new();
        collect_function_nodes(self.tree.root_node(), self.language, &mut found);
        found
            .into_iter()
            .find(|n| n.start_byte() == self.function_start)
            .expect("function located during parse")
    }

    fn text(&self, node: Node<'_>) -> &'s str {
        &self.source[node.byte_range()]
    }

    pub(crate) fn elements(&self) -> DocElements {
        let func = self.function();
        DocElements {
            function_name: self.function_name(func),
            params: self.params(func),
            exceptions: self.exceptions(func),
            has_return: self.has_return(func),
        }
    }

    /// Leaf identifier texts inside the function, in source order. A bound
    /// name of an anonymous function comes first.
    pub(crate) fn identifiers(&self) -> Vec<&'s str> {
        let func = self.function();
        let mut out: Vec<&'s str> = if func.child_by_field_name("name").is_none() {
            self.bound_name(func).into_iter().collect()
        } else {
            Vec::new()
        };
        let mut stack = vec![func];
        while let Some(node) = stack.pop() {
            if node.child_count() == 0 {
                if node.kind().contains("identifier") {
                    out.push(self.text(node));
                }
                continue;
            }
            let mut cursor = node.walk();
            let children: Vec<_> = node.children(&mut cursor).collect();
            stack.extend(children.into_iter().rev());
        }
        out
    }

    fn function_name(&self, func: Node<'_>) -> String {
        if let Some(name) = func.child_by_field_name("name") {
            return self.text(name).to_string();
        }
        self.bound_name(func).unwrap_or_default().to_string()
    }

    /// Name an anonymous JS function is bound to, if any.
    fn bound_name(&self, func: Node<'_>) -> Option<&'s str> {
        let parent = func.parent()?;
        let bound = match parent.kind() {
            "variable_declarator" => parent.child_by_field_name("name"),
            "assignment_expression" => parent.child_by_field_name("left"),
            "pair" => parent.child_by_field_name("key"),
            _ => None,
        }?;
        let text = self.text(bound);
        text.rsplit('.').next()
    }

    fn params(&self, func: Node<'_>) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        let mut push = |name: &str| {
            if !name.is_empty() && !names.iter().any(|n| n == name) {
                names.push(name.to_string());
            }
        };
        let params = func
            .child_by_field_name("parameters")
            .or_else(|| func.child_by_field_name("parameter"));
        let Some(params) = params else {
            return names;
        };
        let mut cursor = params.walk();
        match self.language {
            Language::Python => {
                for (i, child) in params.named_children(&mut cursor).enumerate() {
                    if let Some(id) = first_identifier(child) {
                        let name = self.text(id);
                        if i == 0 && (name == "self" || name == "cls") {
                            continue;
                        }
                        push(name);
                    }
                }
            }
            Language::Java => {
                for child in params.named_children(&mut cursor) {
                    let name = match child.kind() {
                        "formal_parameter" => child.child_by_field_name("name"),
                        "spread_parameter" => named_child_of_kind(child, "variable_declarator")
                            .and_then(|d| d.child_by_field_name("name")),
                        _ => None,
                    };
                    if let Some(n) = name {
                        push(self.text(n));
                    }
                }
            }
            Language::CSharp => {
                let mut found: Vec<Node<'_>> = params
                    .named_children(&mut cursor)
                    .filter(|c| c.kind() == "parameter")
                    .filter_map(|c| c.child_by_field_name("name"))
                    .collect();
                let mut cursor = params.walk();
                found.extend(params.children_by_field_name("name", &mut cursor));
                found.sort_by_key(|n| n.start_byte());
                for n in found {
                    push(self.text(n));
                }
            }
            Language::JavaScript => {
                if params.kind() == "identifier" {
                    push(self.text(params));
                    return names;
                }
                for child in params.named_children(&mut cursor) {
                    let name = match child.kind() {
                        "identifier" => Some(child),
                        "assignment_pattern" => child
                            .child_by_field_name("left")
                            .filter(|n| n.kind() == "identifier"),
                        "rest_pattern" => named_child_of_kind(child, "identifier"),
                        _ => None,
                    };
                    if let Some(n) = name {
                        push(self.text(n));
                    }
                }
            }
            Language::Go => {
                for child in params.named_children(&mut cursor) {
                    let mut inner = child.walk();
                    for n in child.children_by_field_name("name", &mut inner) {
                        let name = self.text(n);
                        if name != "_" {
                            push(name);
                        }
                    }
                }
            }
        }
        names
    }

    fn exceptions(&self, func: Node<'_>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let Some(body) = func.child_by_field_name("body") else {
            return out;
        };
        self.visit_own_scope(body, &mut |node| {
            let name = match (self.language, node.kind()) {
                (Language::Python, "raise_statement") => {
                    node.named_child(0).and_then(|e| match e.kind() {
                        "call" => e.child_by_field_name("function"),
                        "identifier" | "attribute" => Some(e),
                        _ => None,
                    })
                }
                (Language::Java, "throw_statement") => node
                    .named_child(0)
                    .filter(|e| e.kind() == "object_creation_expression")
                    .and_then(|e| e.child_by_field_name("type")),
                (Language::CSharp, "throw_statement" | "throw_expression") => node
                    .named_child(0)
                    .filter(|e| e.kind() == "object_creation_expression")
                    .and_then(|e| e.child_by_field_name("type")),
                (Language::JavaScript, "throw_statement") => node
                    .named_child(0)
                    .filter(|e| e.kind() == "new_expression")
                    .and_then(|e| e.child_by_field_name("constructor")),
                _ => None,
            };
            if let Some(n) = name {
                out.insert(strip_generics(self.text(n)).to_string());
            }
        });
        out
    }

    fn has_return(&self, func: Node<'_>) -> bool {
        match self.language {
            Language::Go => return func.child_by_field_name("result").is_some(),
            Language::Java | Language::CSharp => {
                let declared = func
                    .child_by_field_name("type")
                    .or_else(|| func.child_by_field_name("returns"));
                if let Some(t) = declared {
                    if self.text(t) != "void" {
                        return true;
                    }
                }
            }
            Language::JavaScript => {
                if let Some(body) = func.child_by_field_name("body") {
                    if func.kind() == "arrow_function" && body.kind() != "statement_block" {
                        return true;
                    }
                }
            }
            Language::Python => {}
        }
        let Some(body) = func.child_by_field_name("body") else {
            return false;
        };
        let mut found = false;
        self.visit_own_scope(body, &mut |node| {
            if node.kind() == "return_statement" && node.named_child_count() > 0 {
                found = true;
            }
        });
        found
    }

    /// Visits every node of `root` except those inside nested scopes.
    fn visit_own_scope<'t>(&self, root: Node<'t>, f: &mut impl FnMut(Node<'t>)) {
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            f(node);
            let mut cursor = node.walk();
            for child in node.children(&mut cursor) {
                if !is_nested_scope(self.language, child.kind()) {
                    stack.push(child);
                }
            }
        }
    }
}

pub fn extract_code_elements(code: &str, language: Language) -> Result<DocElements> {
    Ok(ParsedFunction::parse(code, language)?.elements())
}

fn first_error(root: Node<'_>) -> Option<Node<'_>> {
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if node.is_error() || node.is_missing() {
            return Some(node);
        }
        if node.has_error() {
            let mut cursor = node.walk();
            let children: Vec<_> = node.children(&mut cursor).collect();
            stack.extend(children.into_iter().rev());
        }
    }
    None
}

fn collect_functions(node: Node<'_>, language: Language, out: &mut Vec<usize>) {
    let mut nodes = Vec::new();
    collect_function_nodes(node, language, &mut nodes);
    out.extend(nodes.iter().map(|n| n.start_byte()));
}

fn collect_function_nodes<'t>(node: Node<'t>, language: Language, out: &mut Vec<Node<'t>>) {
    if is_function_kind(language, node.kind()) {
        out.push(node);
        return;
    }
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        collect_function_nodes(child, language, out);
    }
}

fn first_identifier(node: Node<'_>) -> Option<Node<'_>> {
    if node.kind() == "identifier" {
        return Some(node);
    }
    if let Some(name) = node.child_by_field_name("name") {
        if name.kind() == "identifier" {
            return Some(name);
        }
    }
    let mut cursor = node.walk();
    let children: Vec<_> = node.named_children(&mut cursor).collect();
    children.into_iter().find_map(first_identifier)
}

fn named_child_of_kind<'t>(node: Node<'t>, kind: &str) -> Option<Node<'t>> {
    let mut cursor = node.walk();
    let found = node.named_children(&mut cursor).find(|c| c.kind() == kind);
    found
}

fn strip_generics(name: &str) -> &str {
    name.split('<').next().unwrap_or(name).trim()
}
