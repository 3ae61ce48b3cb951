//! Documented-element extraction from code and from structured comments.

mod code;
mod comment;

pub(crate) use code::ParsedFunction;
pub use code::{extract_code_elements, DocElements};
pub use comment::{
    parse_comment, strip_markers, CommentDoc, ExceptionDoc, ParamDoc, ReturnDoc, TagGrammars,
    TagKind,
};
