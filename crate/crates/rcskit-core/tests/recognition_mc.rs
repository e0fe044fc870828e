//! Classifier and Monte Carlo behavior beyond single-module unit tests.

mod common;

use std::collections::BTreeMap;

use common::kl_divergence;
use rcskit_core::dist::{fit_mle, sample, DistributionFamily, FittedModel};
use rcskit_core::montecarlo::{run_snr_sweep, Generator, SweepConfig};
use rcskit_core::recognition::{classify_map, Criterion, DbMetadata, ModelDatabase};
use rcskit_core::rng::DetRng;
use rcskit_core::signature::{Polarization, SectorSpec};

fn metadata() -> DbMetadata {
    DbMetadata {
        frequency_hz: 15e9,
        polarization: Polarization::Hh,
    }
}

fn lognormal(mu: f64, s: f64) -> FittedModel {
    FittedModel::from_params(DistributionFamily::Lognormal, vec![mu, s]).unwrap()
}

#[test]
fn noiseless_classification_is_perfect_when_kl_exceeds_one_nat() {
    // Four classes, every symmetric pairwise KL above 1 nat.
    let mut classes = BTreeMap::new();
    classes.insert("a".to_string(), lognormal(-3.8, 0.40));
    classes.insert("b".to_string(), lognormal(-3.0, 0.45));
    classes.insert("c".to_string(), lognormal(-2.2, 0.40));
    classes.insert("d".to_string(), lognormal(-1.4, 0.45));
    let db = ModelDatabase::from_models(classes, Criterion::Aic, metadata());

    let names: Vec<&String> = db.classes.keys().collect();
    for i in 0..names.len() {
        for j in (i + 1)..names.len() {
            let p = &db.classes[names[i]];
            let q = &db.classes[names[j]];
            let sym = kl_divergence(p, q) + kl_divergence(q, p);
            assert!(
                sym > 1.0,
                "{} vs {}: symmetric KL {sym}",
                names[i],
                names[j]
            );
        }
    }

    let mut rng = DetRng::new(77);
    for (name, model) in &db.classes {
        for _ in 0..100 {
            let draws = model.sample(181, &mut rng);
            let decision = classify_map(&db, &draws).unwrap().decision;
            assert_eq!(&decision, name);
        }
    }
}

#[test]
fn full_azimuth_beats_sector_within_two_points() {
    // Same generators and SNR; the 61-sample sector view cannot beat the
    // 181-sample full view by more than Monte Carlo slack.
    let mut classes = BTreeMap::new();
    for (i, name) in ["a", "b", "c", "d"].iter().enumerate() {
        let (mu, s) = rcskit_core::dist::lognormal_from_db_stats(-10.0 - 2.5 * i as f64, 2.0);
        classes.insert(name.to_string(), lognormal(mu, s));
    }
    let db = ModelDatabase::from_models(classes, Criterion::Aic, metadata());
    let generators: BTreeMap<String, Generator> = db
        .classes
        .iter()
        .map(|(k, v)| (k.clone(), Generator::Model(v.clone())))
        .collect();

    let base = SweepConfig {
        snr_grid_db: vec![2.0, 6.0, 10.0],
        trials: 400,
        samples_per_trial: 181,
        sector: None,
        seed: 99,
        parallel: true,
    };
    let full = run_snr_sweep(&db, &generators, &base).unwrap();
    let sector = SweepConfig {
        sector: Some(SectorSpec::new(0.0, 120.0).unwrap()),
        ..base
    };
    let limited = run_snr_sweep(&db, &generators, &sector).unwrap();
    for (snr, (f, s)) in full
        .snr_grid_db
        .iter()
        .zip(full.accuracy.iter().zip(&limited.accuracy))
    {
        assert!(f >= &(s - 0.02), "snr {snr}: full {f} vs sector {s}");
    }
}

#[test]
fn accuracy_curve_monotone_for_separated_classes() {
    let mut classes = BTreeMap::new();
    for (i, name) in ["a", "b", "c", "d"].iter().enumerate() {
        let (mu, s) = rcskit_core::dist::lognormal_from_db_stats(-10.0 - 3.0 * i as f64, 2.0);
        classes.insert(name.to_string(), lognormal(mu, s));
    }
    let db = ModelDatabase::from_models(classes, Criterion::Aic, metadata());
    let generators: BTreeMap<String, Generator> = db
        .classes
        .iter()
        .map(|(k, v)| (k.clone(), Generator::Model(v.clone())))
        .collect();
    let config = SweepConfig {
        snr_grid_db: (0..=7).map(|i| 2.0 * i as f64).collect(),
        trials: 500,
        samples_per_trial: 181,
        sector: None,
        seed: 4,
        parallel: true,
    };
    let result = run_snr_sweep(&db, &generators, &config).unwrap();
    for w in result.accuracy.windows(2) {
        assert!(
            w[1] >= w[0] - 0.02,
            "accuracy dipped: {:?}",
            result.accuracy
        );
    }
    // Chance floor with a wide margin at every SNR
    let m = db.classes.len() as f64;
    let se = (0.25 / (config.trials as f64 * m)).sqrt();
    for acc in &result.accuracy {
        assert!(
            *acc >= 1.0 / m - 3.0 * se,
            "accuracy {acc} under chance floor"
        );
    }
}

#[test]
fn mirrored_two_class_confusion_is_symmetric() {
    // Two classes whose log-domain densities mirror each other confuse
    // each other at the same rate, up to Monte Carlo noise.
    let mut classes = BTreeMap::new();
    classes.insert("lo".to_string(), lognormal(-3.2, 0.45));
    classes.insert("hi".to_string(), lognormal(-2.8, 0.45));
    let db = ModelDatabase::from_models(classes, Criterion::Aic, metadata());
    let generators: BTreeMap<String, Generator> = db
        .classes
        .iter()
        .map(|(k, v)| (k.clone(), Generator::Model(v.clone())))
        .collect();
    let trials = 1500;
    let config = SweepConfig {
        snr_grid_db: vec![30.0],
        trials,
        samples_per_trial: 31,
        sector: None,
        seed: 12,
        parallel: true,
    };
    let result = run_snr_sweep(&db, &generators, &config).unwrap();
    let m = &result.confusion[0];
    let (p01, p10) = (m[0][1], m[1][0]);
    let p = (p01 + p10) / 2.0;
    let se = (p * (1.0 - p) / trials as f64).sqrt() * std::f64::consts::SQRT_2;
    assert!(
        (p01 - p10).abs() <= 3.0 * se.max(1e-3),
        "cross rates {p01} vs {p10} (se {se:.4})"
    );
}

#[test]
fn held_out_assignment_is_stable_across_snr_for_published_classes() {
    // With the published 15 GHz HH class statistics, the held-out
    // DJI Matrice 600 lands on the Trimble zx5 model (its same-family
    // partner) at high SNR and stays there across the sweep: the zx5
    // entry carries the widest spread and also fits noise-dominated
    // signatures best.
    let mut training = BTreeMap::new();
    for (i, (name, mean, std)) in common::UAV_CLASS_STATS_15GHZ_HH.iter().enumerate() {
        let (mu, s) = rcskit_core::dist::lognormal_from_db_stats(*mean, *std);
        training.insert(
            name.to_string(),
            sample(DistributionFamily::Lognormal, &[mu, s], 800, 70 + i as u64).unwrap(),
        );
    }
    let reports = rcskit_core::montecarlo::held_out_experiment(
        &training,
        "dji-matrice-600",
        Criterion::Aic,
        metadata(),
        &[0.0, 20.0],
        200,
        181,
        31,
    )
    .unwrap();
    for r in &reports {
        assert!(
            r.assignment_histogram["trimble-zx5"] > 0.95,
            "snr {}: {:?}",
            r.snr_db,
            r.assignment_histogram
        );
    }
}

#[test]
fn nested_families_have_monotone_loglik() {
    // Exponential ⊂ Gamma and Exponential ⊂ Weibull: the larger family
    // can never fit worse.
    let draws = sample(DistributionFamily::Exponential, &[7.0], 5_000, 11).unwrap();
    let exp = fit_mle(DistributionFamily::Exponential, &draws).unwrap();
    let gamma = fit_mle(DistributionFamily::Gamma, &draws).unwrap();
    let weibull = fit_mle(DistributionFamily::Weibull, &draws).unwrap();
    assert!(
        gamma.loglik >= exp.loglik - 1e-6,
        "{} vs {}",
        gamma.loglik,
        exp.loglik
    );
    assert!(
        weibull.loglik >= exp.loglik - 1e-6,
        "{} vs {}",
        weibull.loglik,
        exp.loglik
    );
}

#[test]
fn lognormal_draws_rank_lognormal_first() {
    let draws = sample(DistributionFamily::Lognormal, &[-2.7, 0.42], 10_000, 21).unwrap();
    let ranking = rcskit_core::recognition::rank_models(&draws, &DistributionFamily::ALL).unwrap();
    assert_eq!(ranking.scores[0].family, DistributionFamily::Lognormal);
}
