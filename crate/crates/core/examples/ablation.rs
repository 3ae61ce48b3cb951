//! Trains one model per non-empty feature subset and prints held-out F1.

use cidre::classifier::TrainParams;
use cidre::evaluation::{run_ablation, stratified_split, DEFAULT_TRAIN_FRACTION};
use cidre::FeatureVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cidre::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..300 {
        let f = FeatureVector::new(
            rng.random(),
            rng.random(),
            rng.random_range(0.0..300.0),
            rng.random(),
        );
        let signal =
            f.completeness + f.informativeness + f.description_length / 300.0 + f.relevance;
        xs.push(f);
        ys.push(signal + rng.random_range(-0.3..0.3) > 2.0);
    }
    let split = stratified_split(&ys, DEFAULT_TRAIN_FRACTION, 1)?;
    let table = run_ablation(&xs, &ys, &split, &TrainParams::default())?;
    for row in &table.rows {
        println!("{:5} {:.3}", row.subset, row.f1);
    }
    if let Some(best) = table.best() {
        println!("best: {}", best.subset);
    }
    Ok(())
}
