use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn separable(n: usize, seed: u64) -> (Vec<FeatureVector>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..n {
        let good = i % 2 == 0;
        let c: f64 = if good {
            rng.random_range(0.6..1.0)
        } else {
            rng.random_range(0.0..0.4)
        };
        xs.push(FeatureVector::new(
            c,
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..300.0),
            rng.random_range(-1.0..1.0),
        ));
        ys.push(good);
    }
    (xs, ys)
}

fn scaler_identity(dim: usize) -> Scaler {
    Scaler {
        mean: vec![0.0; dim],
        std: vec![1.0; dim],
    }
}

fn hand_model(params: ModelParams) -> QualityModel {
    QualityModel {
        params,
        feature_mask: FeatureMask::all(),
        scaler: scaler_identity(4),
        meta: TrainingMeta {
            hyperparams: TrainParams::default(),
            seed: 0,
            n_train: 0,
            iterations: 0,
        },
    }
}

#[test]
fn zero_logistic_predicts_half() {
    let m = hand_model(ModelParams::Logistic {
        weights: vec![0.0; 4],
        bias: 0.0,
    });
    for fv in [
        FeatureVector::new(0.0, 0.0, 0.0, 0.0),
        FeatureVector::new(1.0, 0.3, 250.0, -0.7),
    ] {
        assert_eq!(m.predict(&fv).unwrap(), 0.5);
    }
}

#[test]
fn strong_weight_three_sigma_is_confident() {
    let mut m = hand_model(ModelParams::Logistic {
        weights: vec![10.0, 0.0, 0.0, 0.0],
        bias: 0.0,
    });
    m.scaler = Scaler {
        mean: vec![0.5, 0.0, 0.0, 0.0],
        std: vec![0.1, 1.0, 1.0, 1.0],
    };
    let p = m.predict(&FeatureVector::new(0.8, 0.0, 0.0, 0.0)).unwrap();
    let expected = 1.0 / (1.0 + (-30.0f64).exp());
    assert!(p > 0.99);
    assert!((p - expected).abs() < 1e-12);
}

#[test]
fn single_support_vector_at_query() {
    let (coef, bias, a, b) = (0.75, -0.25, -2.0, 0.1);
    let m = hand_model(ModelParams::SvmRbf {
        gamma: 0.25,
        support_vectors: vec![vec![0.1, 0.2, 0.3, 0.4]],
        dual_coef: vec![coef],
        bias,
        platt: PlattParams { a, b },
    });
    let q = FeatureVector::new(0.1, 0.2, 0.3, 0.4);
    let d = m.decision(&q).unwrap();
    assert!((d - (coef + bias)).abs() < 1e-15);
    let expected = 1.0 / (1.0 + (a * d + b).exp());
    assert!((m.predict(&q).unwrap() - expected).abs() < 1e-15);
}

#[test]
fn separable_training_set_is_fit_by_both_kinds() {
    let (xs, ys) = separable(120, 3);
    for kind in [ModelKind::Logistic, ModelKind::SvmRbf] {
        let m = train(&xs, &ys, &TrainParams::with_kind(kind)).unwrap();
        let errors = xs
            .iter()
            .zip(&ys)
            .filter(|(x, &y)| (m.predict(x).unwrap() > 0.5) != y)
            .count();
        assert_eq!(errors, 0, "{kind}");
    }
}

#[test]
fn symmetric_duplicated_points_give_half() {
    // Two distinct x values so the scaler is defined; each appears with both labels.
    let xs: Vec<FeatureVector> = [0.2, 0.2, 0.8, 0.8]
        .iter()
        .map(|&c| FeatureVector::new(c, 0.0, 0.0, 0.0))
        .collect();
    let ys = vec![false, true, false, true];
    let params = TrainParams {
        feature_mask: FeatureMask::new([Feature::Completeness]).unwrap(),
        ..TrainParams::with_kind(ModelKind::Logistic)
    };
    let m = train(&xs, &ys, &params).unwrap();
    for x in &xs {
        assert!((m.predict(x).unwrap() - 0.5).abs() < 1e-6);
    }
}

#[test]
fn training_rejects_degenerate_inputs() {
    let (xs, ys) = separable(10, 1);
    assert!(train(&xs[..3], &ys, &TrainParams::default()).is_err());
    let all_good = vec![true; 10];
    assert!(train(&xs, &all_good, &TrainParams::default()).is_err());
    let mut nan = xs.clone();
    nan[4].relevance = f64::NAN;
    assert!(train(&nan, &ys, &TrainParams::default()).is_err());
    let constant: Vec<FeatureVector> = xs
        .iter()
        .map(|x| FeatureVector {
            relevance: 0.5,
            ..*x
        })
        .collect();
    assert!(train(&constant, &ys, &TrainParams::default()).is_err());
}

#[test]
fn mask_mismatch_is_rejected() {
    let mut m = hand_model(ModelParams::Logistic {
        weights: vec![1.0; 3],
        bias: 0.0,
    });
    assert!(m.predict(&FeatureVector::new(0.0, 0.0, 0.0, 0.0)).is_err());
    m.params = ModelParams::Logistic {
        weights: vec![1.0; 4],
        bias: 0.0,
    };
    assert!(m
        .predict(&FeatureVector::new(f64::INFINITY, 0.0, 0.0, 0.0))
        .is_err());
}

#[test]
fn round_trip_preserves_predictions() {
    let (xs, ys) = separable(80, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in [ModelKind::Logistic, ModelKind::SvmRbf] {
        let m = train(&xs, &ys, &TrainParams::with_kind(kind)).unwrap();
        let text = serde_json::to_string_pretty(&m).unwrap();
        let back = QualityModel::from_json(&text).unwrap();
        for _ in 0..100 {
            let q = FeatureVector::new(
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..400.0),
                rng.random_range(-1.0..1.0),
            );
            let (a, b) = (m.predict(&q).unwrap(), back.predict(&q).unwrap());
            assert!((a - b).abs() <= 1e-12, "{kind}: {a} vs {b}");
        }
    }
}

#[test]
fn model_file_layout() {
    let (xs, ys) = separable(20, 2);
    let m = train(&xs, &ys, &TrainParams::with_kind(ModelKind::Logistic)).unwrap();
    let v: serde_json::Value = serde_json::to_value(&m).unwrap();
    assert_eq!(v["kind"], "logistic");
    assert_eq!(
        v["feature_mask"],
        serde_json::json!([
            "completeness",
            "informativeness",
            "description_length",
            "relevance"
        ])
    );
    assert!(v["scaler"]["mean"].is_array());
    assert_eq!(v["meta"]["seed"], 0);
}

#[test]
fn unknown_kind_and_truncation_fail() {
    let (xs, ys) = separable(20, 2);
    let m = train(&xs, &ys, &TrainParams::with_kind(ModelKind::Logistic)).unwrap();
    let text = serde_json::to_string(&m).unwrap();
    let unknown = text.replace("\"kind\":\"logistic\"", "\"kind\":\"lightgbm\"");
    assert!(QualityModel::from_json(&unknown).is_err());
    let err = QualityModel::from_json(&text[..text.len() / 2]).unwrap_err();
    assert!(err.to_string().contains("line 1 column"), "{err}");
    let bad_field = text.replace("\"std\":[", "\"std\":[\"x\",");
    let err = QualityModel::from_json(&bad_field).unwrap_err();
    assert!(err.to_string().contains("scaler.std"), "{err}");
}

#[test]
fn subsets_are_fifteen_and_distinct() {
    let s = FeatureMask::all_subsets();
    assert_eq!(s.len(), 15);
    let set: std::collections::BTreeSet<_> = s.iter().cloned().collect();
    assert_eq!(set.len(), 15);
    assert_eq!(s.last().unwrap(), &FeatureMask::all());
    assert_eq!(s.last().unwrap().to_string(), "CIDR");
    assert_eq!("rc".parse::<FeatureMask>().unwrap().to_string(), "CR");
    assert!("".parse::<FeatureMask>().is_err());
    assert!("CX".parse::<FeatureMask>().is_err());
}

#[test]
fn kkt_holds_on_noisy_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<Vec<f64>> = (0..150)
        .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
        .collect();
    let labels: Vec<bool> = rows
        .iter()
        .map(|r| r[0] + 0.3 * r[1] + rng.random_range(-0.8..0.8) > 0.0)
        .collect();
    let sol = svm::solve(&rows, &labels, 1.0, 0.5, 1e-3, 1_000_000);
    assert!(svm::kkt_violation(&sol, &rows, &labels, 1.0, 0.5) <= 1e-3);
    assert!(sol.alpha.iter().all(|&a| (0.0..=1.0).contains(&a)));
    let balance: f64 = sol
        .alpha
        .iter()
        .zip(&labels)
        .map(|(a, &y)| if y { *a } else { -*a })
        .sum();
    assert!(balance.abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_rescaling_is_absorbed(seed in 0u64..1000, scale in 0.1f64..50.0, shift in -100.0f64..100.0) {
        let (xs, ys) = separable(40, seed);
        let params = TrainParams::with_kind(ModelKind::Logistic);
        let base = train(&xs, &ys, &params).unwrap();
        let moved: Vec<FeatureVector> = xs
            .iter()
            .map(|x| FeatureVector { description_length: x.description_length * scale + shift, ..*x })
            .collect();
        let other = train(&moved, &ys, &params).unwrap();
        for (x, y) in xs.iter().zip(&moved) {
            let (a, b) = (base.predict(x).unwrap(), other.predict(y).unwrap());
            prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
        }
    }

    #[test]
    fn smo_meets_kkt(seed in 0u64..1000, c in 0.1f64..10.0, gamma in 0.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..3).map(|_| rng.random_range(-1.5..1.5)).collect())
            .collect();
        let mut labels: Vec<bool> = rows.iter().map(|r| r[0] - r[2] + rng.random_range(-0.5..0.5) > 0.0).collect();
        labels[0] = true;
        labels[1] = false;
        let sol = svm::solve(&rows, &labels, c, gamma, 1e-3, 1_000_000);
        prop_assert!(svm::kkt_violation(&sol, &rows, &labels, c, gamma) <= 1e-3);
    }

    #[test]
    fn platt_is_monotone(seed in 0u64..1000) {
        let (xs, ys) = separable(30, seed);
        let mut noisy = ys.clone();
        noisy[0] = !noisy[0];
        noisy[1] = !noisy[1];
        let m = train(&xs, &noisy, &TrainParams::default()).unwrap();
        let ModelParams::SvmRbf { platt, .. } = &m.params else { unreachable!() };
        let fit = platt::PlattFit { a: platt.a, b: platt.b };
        let mut prev = 0.0;
        for i in -200..=200 {
            let p = platt::probability(fit, f64::from(i) * 0.05);
            prop_assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn logistic_is_monotone_in_positive_weights(seed in 0u64..1000, base in 0.0f64..1.0, step in 0.001f64..0.5) {
        let (xs, ys) = separable(40, seed);
        let m = train(&xs, &ys, &TrainParams::with_kind(ModelKind::Logistic)).unwrap();
        let ModelParams::Logistic { weights, .. } = &m.params else { unreachable!() };
        let lo = FeatureVector::new(base, 0.5, 100.0, 0.0);
        for (k, &f) in Feature::ALL.iter().enumerate() {
            let mut hi = lo;
            hi.set(f, lo.get(f) + step);
            let (pl, ph) = (m.predict(&lo).unwrap(), m.predict(&hi).unwrap());
            prop_assert!(pl > 0.0 && pl < 1.0);
            if weights[k] > 0.0 {
                prop_assert!(ph >= pl);
            }
        }
    }
}
