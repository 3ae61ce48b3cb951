//! Scores how fully a docstring covers a function's parameters, return
//! value and exceptions.

use cidre::completeness::{completeness, completeness_go};
use cidre::docparse::{extract_code_elements, parse_comment};
use cidre::Language;

fn main() -> cidre::Result<()> {
    let code = r#"def read_config(path, strict=False):
    if not path:
        raise ValueError("empty path")
    return load(path)"#;
    let comment = "Read a configuration file.\n\n\
        :param path: file to read\n\
        :type path: str\n\
        :raises ValueError: if the path is empty\n\
        :returns: parsed settings";

    let elements = extract_code_elements(code, Language::Python)?;
    let doc = parse_comment(comment, Language::Python);
    let c = completeness(&elements, &doc, Language::Python)?;
    println!("python: {}/{} = {:.3}", c.available, c.overall, c.score);
    for d in &c.diagnostics {
        println!("  note: {d}");
    }

    let go = completeness_go("ReadConfig parses the file at path.", "ReadConfig");
    println!("go: {}", go.score);
    Ok(())
}
