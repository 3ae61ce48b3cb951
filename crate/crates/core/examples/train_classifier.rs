//! Fits both classifier kinds on synthetic component scores, saves one and
//! reloads it.

use cidre::classifier::{train, TrainParams};
use cidre::evaluation::{cross_entropy, f1, DEFAULT_CE_EPSILON};
use cidre::{FeatureVector, ModelKind, QualityModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cidre::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..200 {
        let good = i % 2 == 0;
        let shift = if good { 0.3 } else { 0.0 };
        xs.push(FeatureVector::new(
            rng.random_range(0.0..0.7) + shift,
            rng.random_range(0.0..0.7) + shift,
            rng.random_range(20.0..200.0) + 100.0 * shift,
            rng.random_range(0.0..0.7) + shift,
        ));
        ys.push(good);
    }

    for kind in [ModelKind::Logistic, ModelKind::SvmRbf] {
        let model = train(&xs, &ys, &TrainParams::with_kind(kind))?;
        let probs: Vec<f64> = xs
            .iter()
            .map(|x| model.predict(x))
            .collect::<cidre::Result<_>>()?;
        println!(
            "{kind:9} train F1 {:.3}, CE {:.3}",
            f1(&ys, &probs, 0.5)?,
            cross_entropy(&ys, &probs, DEFAULT_CE_EPSILON)?
        );
        if kind == ModelKind::SvmRbf {
            let path = std::env::temp_dir().join("cidre_example_model.json");
            model.save(&path)?;
            let back = QualityModel::load(&path)?;
            println!(
                "reloaded {} model, p(first) = {:.3}",
                back.kind(),
                back.predict(&xs[0])?
            );
        }
    }
    Ok(())
}
