//! Compares metric distributions between good and bad comments with the
//! Mann-Whitney U test.

use cidre::evaluation::{component_tests, mann_whitney};
use cidre::FeatureVector;

fn main() -> cidre::Result<()> {
    let exact = mann_whitney(&[0.1, 0.3, 0.2], &[0.6, 0.8, 0.5, 0.9])?;
    println!(
        "U = {}, p = {:.4}, exact = {}",
        exact.u_statistic, exact.p_value, exact.exact
    );

    let (features, labels): (Vec<_>, Vec<_>) = (0..60)
        .map(|i| {
            let good = i % 3 != 0;
            let t = (i as f64 * 0.37).fract();
            let lift = if good { 0.25 } else { 0.0 };
            (
                FeatureVector::new(
                    t * 0.7 + lift,
                    t * 0.6 + lift,
                    40.0 + 90.0 * (t + lift),
                    0.5 * t + lift,
                ),
                good,
            )
        })
        .unzip();
    for t in component_tests(&features, &labels)? {
        println!(
            "{:18} bad {:7.3} good {:7.3} p {:.2e}",
            format!("{:?}", t.feature),
            t.mean_bad,
            t.mean_good,
            t.test.p_value
        );
    }
    Ok(())
}
