mod common;

use cidre::Language;

#[test]
fn hand_computed_cases_match() {
    let cases = common::completeness_cases();
    assert!(cases.len() >= 30);
    for lang in Language::ALL {
        assert!(
            cases.iter().any(|c| c.language == lang),
            "no case for {lang}"
        );
    }
    let failures: Vec<String> = cases
        .iter()
        .filter_map(|c| common::check_completeness(c).err())
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn go_scores_are_binary() {
    for case in common::completeness_cases()
        .iter()
        .filter(|c| c.language == Language::Go)
    {
        assert!(
            case.overall <= 1 && case.available == case.overall,
            "{}",
            case.name
        );
        common::check_completeness(case).unwrap();
    }
}
