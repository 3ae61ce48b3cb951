//! Scores a small corpus with a fitted model and keeps the pairs whose
//! predicted quality clears the threshold, as `cidre score` and
//! `cidre filter` do.

use cidre::classifier::{train, TrainParams};
use cidre::config::RunConfig;
use cidre::{CodeCommentPair, Language, Scorer};

fn pair(id: usize, code: &str, comment: &str, label: bool) -> CodeCommentPair {
    CodeCommentPair {
        id: id.to_string(),
        language: Language::Python,
        code: code.into(),
        comment: comment.into(),
        label: Some(label),
    }
}

fn main() -> cidre::Result<()> {
    let funcs = [
        ("def add(a, b):\n    return a + b", "Add two numbers.\n\n:param a: first\n:param b: second\n:returns: the sum a plus b", "Stuff."),
        ("def area(width, height):\n    return width * height", "Area from width and height.\n\n:param width: w\n:param height: h\n:returns: area", "TODO"),
        ("def greet(name):\n    print(name)", "Greet a person by name.\n\n:param name: who to greet", "x"),
        ("def clamp(value, low, high):\n    return max(low, min(value, high))", "Clamp value between low and high.\n\n:param value: input\n:param low: floor\n:param high: ceiling\n:returns: clamped value", "fix later"),
    ];
    let mut pairs = Vec::new();
    for (i, (code, good, bad)) in funcs.iter().enumerate() {
        pairs.push(pair(2 * i, code, good, true));
        pairs.push(pair(2 * i + 1, code, bad, false));
    }

    let scorer = Scorer::from_config(&RunConfig::default())?;
    let scores = scorer.score_batch(&pairs)?;
    let features: Vec<_> = scores.iter().map(|s| s.features).collect();
    let labels: Vec<bool> = pairs.iter().map(|p| p.label == Some(true)).collect();
    let model = train(&features, &labels, &TrainParams::default())?;

    for (p, s) in pairs.iter().zip(&scores) {
        let prob = model.predict(&s.features)?;
        let verdict = if prob >= 0.5 { "keep" } else { "drop" };
        println!(
            "{verdict} p={prob:.3} {:?}",
            p.comment.lines().next().unwrap_or("")
        );
    }
    Ok(())
}
