//! Measures how many of a function's weighted identifier terms a comment
//! mentions, exactly or through a similar word vector.

use cidre::informativeness::{
    extract_terms, informativeness, weigh_terms, UniformWeights, WordVectors,
};
use cidre::text::Lexicon;
use cidre::Language;

fn main() -> cidre::Result<()> {
    let code = "def count_active_users(users):\n    return len([u for u in users if u.active])";
    let lexicon = Lexicon::bundled();
    let surfaces = extract_terms(code, Language::Python, lexicon)?;
    let terms = weigh_terms(code, Language::Python, &surfaces, &UniformWeights)?;
    println!("terms: {surfaces:?}");

    let mut vectors = WordVectors::new(3);
    vectors.insert("count", &[1.0, 0.1, 0.0])?;
    vectors.insert("number", &[0.95, 0.2, 0.0])?;
    vectors.insert("user", &[0.0, 1.0, 0.0])?;
    vectors.insert("active", &[0.0, 0.0, 1.0])?;

    for comment in [
        "Return the number of users.",
        "Count active users.",
        "Helper.",
    ] {
        let report = informativeness(&terms, comment, &vectors, 0.5, lexicon);
        println!("{comment:32} {:.3} found {:?}", report.score, report.found);
    }
    Ok(())
}
