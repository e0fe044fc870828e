//! SNR-controlled noise injection, Monte Carlo accuracy sweeps, confusion
//! matrices, and the held-out-class experiment.
//!
//! Every trial reads its own ChaCha substream derived from
//! (seed, snr index, class index, trial index), so parallel and sequential
//! execution produce bit-identical results.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dist::FittedModel;
use crate::recognition::{
    build_database, classify_map, rank_models, Criterion, DbMetadata, ModelDatabase,
};
use crate::rng::DetRng;
use crate::signature::{sector_slice, RcsSignature, SectorSpec};
use crate::{Error, Result};

/// Noise level specification for a single injection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Gaussian noise power σ_N² = P_k·10^(−SNR/10), with the signal power
/// P_k taken as the mean of the linear RCS samples (the time-domain
/// average power, by Parseval).
pub fn noise_power(samples_linear: &[f64], snr_db: f64) -> Result<f64> {
    if samples_linear.is_empty() {
        return Err(Error::Empty {
            what: "noise power input",
        });
    }
    let p_k = samples_linear.iter().sum::<f64>() / samples_linear.len() as f64;
    Ok(p_k * 10f64.powf(-snr_db / 10.0))
}

/// Add complex Gaussian noise to the scattered amplitude of each sample:
/// σ′ = |√σ + n|² with total noise variance σ_N² (half per quadrature).
pub fn inject_noise(sig: &RcsSignature, spec: &NoiseSpec) -> Result<RcsSignature> {
    let mut rng = DetRng::new(spec.seed);
    inject_noise_with_rng(sig, spec.snr_db, &mut rng)
}

fn inject_noise_with_rng(
    sig: &RcsSignature,
    snr_db: f64,
    rng: &mut DetRng,
) -> Result<RcsSignature> {
    let variance = noise_power(&sig.rcs_m2, snr_db)?;
    let noisy: Vec<f64> = sig
        .rcs_m2
        .iter()
        .map(|&sigma| {
            let amplitude = sigma.sqrt();
            let (re, im) = rng.complex_gaussian(variance);
            ((amplitude + re).powi(2) + im * im).max(1e-300)
        })
        .collect();
    RcsSignature::new(
        sig.azimuths_deg.clone(),
        noisy,
        sig.frequency_hz,
        sig.polarization,
        sig.label.clone(),
    )
}

/// Source of clean test signatures for one class.
#[derive(Debug, Clone)]
pub enum Generator {
    /// Draw fresh i.i.d. samples from a fitted model each trial.
    Model(FittedModel),
    /// Replay a fixed measured-style signature each trial.
    Replay(RcsSignature),
}

/// Sweep controls. `samples_per_trial` applies to model generators;
/// replayed signatures keep their own length.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub samples_per_trial: usize,
    pub sector: Option<SectorSpec>,
    pub seed: u64,
    /// Run trials on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

/// Accuracy and confusion matrices over an SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSweepResult {
    pub snr_grid_db: Vec<f64>,
    /// Mean of per-class correct rates, one entry per SNR.
    pub accuracy: Vec<f64>,
    /// Row-stochastic matrices indexed [snr][true][predicted].
    pub confusion: Vec<Vec<Vec<f64>>>,
    pub trials: usize,
    pub seed: u64,
    /// Row/column labels of the confusion matrices.
    pub classes: Vec<String>,
}

/// Classify noisy test signatures from every generator across an SNR grid.
pub fn run_snr_sweep(
    db: &ModelDatabase,
    generators: &BTreeMap<String, Generator>,
    config: &SweepConfig,
) -> Result<SnrSweepResult> {
    if config.trials == 0 || config.snr_grid_db.is_empty() {
        return Err(Error::invalid(
            "sweep config",
            "need at least one SNR and one trial",
        ));
    }
    if config.samples_per_trial == 0 {
        return Err(Error::invalid(
            "sweep config",
            "samples_per_trial must be positive",
        ));
    }
    if generators.is_empty() {
        return Err(Error::Empty {
            what: "generator set",
        });
    }
    for class in generators.keys() {
        if !db.classes.contains_key(class) {
            return Err(Error::mismatch(
                "sweep",
                format!("generator class {class:?} is not in the database"),
            ));
        }
    }
    let classes: Vec<String> = db.classes.keys().cloned().collect();
    let gen_classes: Vec<&String> = generators.keys().collect();
    let n_classes = gen_classes.len();
    let class_index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let run_trial = |flat: usize| -> Result<(usize, usize, usize)> {
        let snr_i = flat / (n_classes * config.trials);
        let rest = flat % (n_classes * config.trials);
        let class_i = rest / config.trials;
        let stream = 1 + flat as u64;
        let mut rng = DetRng::with_stream(config.seed, stream);

        let class = gen_classes[class_i];
        let clean = clean_signature(
            &generators[class.as_str()],
            class,
            config.samples_per_trial,
            db,
            &mut rng,
        )?;
        let noisy = inject_noise_with_rng(&clean, config.snr_grid_db[snr_i], &mut rng)?;
        let test = match &config.sector {
            Some(sector) => sector_slice(&noisy, sector)?.rcs_m2,
            None => noisy.rcs_m2,
        };
        let decision = classify_map(db, &test)?.decision;
        Ok((
            snr_i,
            class_index[class.as_str()],
            class_index[decision.as_str()],
        ))
    };

    let total = config.snr_grid_db.len() * n_classes * config.trials;
    let outcomes: Vec<(usize, usize, usize)> = if config.parallel {
        (0..total)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<Vec<_>>>()?
    } else {
        (0..total).map(run_trial).collect::<Result<Vec<_>>>()?
    };

    let m = classes.len();
    let mut counts = vec![vec![vec![0usize; m]; m]; config.snr_grid_db.len()];
    for (snr_i, true_i, pred_i) in outcomes {
        counts[snr_i][true_i][pred_i] += 1;
    }
    let mut confusion = Vec::with_capacity(counts.len());
    let mut accuracy = Vec::with_capacity(counts.len());
    for snr_counts in &counts {
        let mut matrix = vec![vec![0.0; m]; m];
        let mut diag_sum = 0.0;
        let mut active_rows = 0;
        for (i, row) in snr_counts.iter().enumerate() {
            let row_total: usize = row.iter().sum();
            if row_total == 0 {
                continue;
            }
            active_rows += 1;
            for (j, &c) in row.iter().enumerate() {
                matrix[i][j] = c as f64 / row_total as f64;
            }
            diag_sum += matrix[i][i];
        }
        accuracy.push(diag_sum / active_rows as f64);
        confusion.push(matrix);
    }

    Ok(SnrSweepResult {
        snr_grid_db: config.snr_grid_db.clone(),
        accuracy,
        confusion,
        trials: config.trials,
        seed: config.seed,
        classes,
    })
}

fn clean_signature(
    generator: &Generator,
    label: &str,
    samples_per_trial: usize,
    db: &ModelDatabase,
    rng: &mut DetRng,
) -> Result<RcsSignature> {
    match generator {
        Generator::Replay(sig) => Ok(sig.clone()),
        Generator::Model(model) => {
            let rcs: Vec<f64> = model
                .sample(samples_per_trial, rng)
                .into_iter()
                .map(|v| v.max(1e-300))
                .collect();
            RcsSignature::new(
                full_circle_azimuths(samples_per_trial),
                rcs,
                db.frequency_hz,
                db.polarization,
                label,
            )
        }
    }
}

/// Even azimuth grid over [0°, 360°] with both endpoints, mirroring the
/// measurement layout.
fn full_circle_azimuths(n: usize) -> Vec<f64> {
    if n == 1 {
        vec![0.0]
    } else {
        (0..n).map(|i| 360.0 * i as f64 / (n - 1) as f64).collect()
    }
}

/// The confusion matrix recorded at one SNR of a sweep.
pub fn confusion_matrix(result: &SnrSweepResult, snr_db: f64) -> Result<&Vec<Vec<f64>>> {
    result
        .snr_grid_db
        .iter()
        .position(|&s| s == snr_db)
        .map(|i| &result.confusion[i])
        .ok_or_else(|| Error::invalid("snr", format!("{snr_db} dB is not on the sweep grid")))
}

/// Where test vectors from a class absent from the database end up.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldOutReport {
    pub held_out_class: String,
    pub snr_db: f64,
    /// Fraction of trials assigned to each database class; sums to 1.
    pub assignment_histogram: BTreeMap<String, f64>,
}

/// Train on every class except `held_out_class`, then classify noisy test
/// vectors generated from the held-out class's own criterion-best fit.
#[allow(clippy::too_many_arguments)]
pub fn held_out_experiment(
    training: &BTreeMap<String, Vec<f64>>,
    held_out_class: &str,
    criterion: Criterion,
    metadata: DbMetadata,
    snr_grid_db: &[f64],
    trials: usize,
    samples_per_trial: usize,
    seed: u64,
) -> Result<Vec<HeldOutReport>> {
    if !training.contains_key(held_out_class) {
        return Err(Error::invalid(
            "class",
            format!("{held_out_class:?} not in training set"),
        ));
    }
    let mut reduced = training.clone();
    reduced.remove(held_out_class);
    let db = build_database(&reduced, criterion, metadata)?;
    let held_out_model = rank_models(
        &training[held_out_class],
        &crate::dist::DistributionFamily::ALL,
    )?
    .best(criterion)
    .clone();
    held_out_against_db(
        &db,
        held_out_class,
        &held_out_model,
        snr_grid_db,
        trials,
        samples_per_trial,
        seed,
    )
}

/// Held-out classification against an existing database; the held-out
/// model generates the test vectors.
pub fn held_out_against_db(
    db: &ModelDatabase,
    held_out_class: &str,
    held_out_model: &FittedModel,
    snr_grid_db: &[f64],
    trials: usize,
    samples_per_trial: usize,
    seed: u64,
) -> Result<Vec<HeldOutReport>> {
    if trials == 0 || snr_grid_db.is_empty() {
        return Err(Error::invalid(
            "held-out config",
            "need at least one SNR and one trial",
        ));
    }
    let mut reports = Vec::with_capacity(snr_grid_db.len());
    for (snr_i, &snr_db) in snr_grid_db.iter().enumerate() {
        let mut histogram: BTreeMap<String, usize> =
            db.classes.keys().map(|c| (c.clone(), 0)).collect();
        for trial in 0..trials {
            let stream = 1 + (snr_i * trials + trial) as u64;
            let mut rng = DetRng::with_stream(seed, stream);
            let rcs: Vec<f64> = held_out_model
                .sample(samples_per_trial, &mut rng)
                .into_iter()
                .map(|v| v.max(1e-300))
                .collect();
            let clean = RcsSignature::new(
                full_circle_azimuths(samples_per_trial),
                rcs,
                db.frequency_hz,
                db.polarization,
                held_out_class,
            )?;
            let noisy = inject_noise_with_rng(&clean, snr_db, &mut rng)?;
            let decision = classify_map(db, &noisy.rcs_m2)?.decision;
            *histogram
                .get_mut(&decision)
                .expect("decision is a db class") += 1;
        }
        let assignment_histogram = histogram
            .into_iter()
            .map(|(class, count)| (class, count as f64 / trials as f64))
            .collect();
        reports.push(HeldOutReport {
            held_out_class: held_out_class.to_string(),
            snr_db,
            assignment_histogram,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{lognormal_from_db_stats, DistributionFamily, FittedModel};
    use crate::signature::Polarization;

    fn lognormal_model(mean_db: f64, std_db: f64) -> FittedModel {
        let (mu, s) = lognormal_from_db_stats(mean_db, std_db);
        FittedModel::from_params(DistributionFamily::Lognormal, vec![mu, s]).unwrap()
    }

    fn two_class_db(delta_db: f64) -> ModelDatabase {
        let mut classes = BTreeMap::new();
        classes.insert("a".to_string(), lognormal_model(-12.0, 2.0));
        classes.insert("b".to_string(), lognormal_model(-12.0 - delta_db, 2.0));
        ModelDatabase::from_models(
            classes,
            Criterion::Aic,
            DbMetadata {
                frequency_hz: 15e9,
                polarization: Polarization::Hh,
            },
        )
    }

    fn db_generators(db: &ModelDatabase) -> BTreeMap<String, Generator> {
        db.classes
            .iter()
            .map(|(name, model)| (name.clone(), Generator::Model(model.clone())))
            .collect()
    }

    #[test]
    fn noise_power_reference_points() {
        assert!((noise_power(&[2.0, 2.0], 10.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((noise_power(&[2.0], 0.0).unwrap() - 2.0).abs() < 1e-15);
        // {1, 3} m² at 3.0103 dB: P_k = 2 → σ_N² = 1
        assert!((noise_power(&[1.0, 3.0], 3.010_299_956_639_812).unwrap() - 1.0).abs() < 1e-12);
        assert!(noise_power(&[], 10.0).is_err());
    }

    #[test]
    fn inject_noise_high_snr_is_identity_like() {
        let sig = RcsSignature::new(
            vec![0.0, 2.0, 4.0],
            vec![0.5, 0.7, 0.9],
            15e9,
            Polarization::Vv,
            "t",
        )
        .unwrap();
        let noisy = inject_noise(
            &sig,
            &NoiseSpec {
                snr_db: 300.0,
                seed: 1,
            },
        )
        .unwrap();
        for (a, b) in noisy.rcs_m2.iter().zip(&sig.rcs_m2) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn inject_noise_mean_shift_matches_rician_moment() {
        // E[σ′] = σ + σ_N²; at 0 dB on a constant-1 signature this is 2
        let n = 1_000_000;
        let sig = RcsSignature::new(
            (0..n).map(|i| i as f64).collect(),
            vec![1.0; n],
            15e9,
            Polarization::Vv,
            "t",
        )
        .unwrap();
        let noisy = inject_noise(
            &sig,
            &NoiseSpec {
                snr_db: 0.0,
                seed: 9,
            },
        )
        .unwrap();
        let mean = noisy.rcs_m2.iter().sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 0.01 * 2.0, "mean {mean}");
    }

    #[test]
    fn inject_noise_deterministic() {
        let sig =
            RcsSignature::new(vec![0.0, 2.0], vec![0.5, 0.7], 15e9, Polarization::Vv, "t").unwrap();
        let spec = NoiseSpec {
            snr_db: 5.0,
            seed: 42,
        };
        assert_eq!(
            inject_noise(&sig, &spec).unwrap(),
            inject_noise(&sig, &spec).unwrap()
        );
    }

    #[test]
    fn sweep_far_separated_classes_are_perfect() {
        let db = two_class_db(20.0);
        let config = SweepConfig {
            snr_grid_db: vec![20.0],
            trials: 100,
            samples_per_trial: 181,
            sector: None,
            seed: 7,
            parallel: false,
        };
        let result = run_snr_sweep(&db, &db_generators(&db), &config).unwrap();
        assert_eq!(result.accuracy, vec![1.0]);
    }

    #[test]
    fn sweep_identical_classes_sit_at_chance() {
        let db = two_class_db(0.0);
        let config = SweepConfig {
            snr_grid_db: vec![10.0],
            trials: 400,
            samples_per_trial: 181,
            sector: None,
            seed: 11,
            parallel: false,
        };
        let result = run_snr_sweep(&db, &db_generators(&db), &config).unwrap();
        // Chance level 1/2 within 3σ of the 800-trial binomial
        let se = (0.5 * 0.5 / 800.0_f64).sqrt();
        assert!(
            (result.accuracy[0] - 0.5).abs() < 3.0 * se,
            "acc {}",
            result.accuracy[0]
        );
    }

    #[test]
    fn sweep_confusion_rows_are_stochastic() {
        let db = two_class_db(3.0);
        let config = SweepConfig {
            snr_grid_db: vec![0.0, 10.0],
            trials: 50,
            samples_per_trial: 61,
            sector: None,
            seed: 3,
            parallel: false,
        };
        let result = run_snr_sweep(&db, &db_generators(&db), &config).unwrap();
        for matrix in &result.confusion {
            for row in matrix {
                let sum: f64 = row.iter().sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
        let m = confusion_matrix(&result, 10.0).unwrap();
        assert_eq!(m.len(), 2);
        assert!(confusion_matrix(&result, 99.0).is_err());
    }

    #[test]
    fn sweep_parallel_equals_sequential() {
        let db = two_class_db(4.0);
        let mut config = SweepConfig {
            snr_grid_db: vec![0.0, 6.0, 12.0],
            trials: 40,
            samples_per_trial: 61,
            sector: None,
            seed: 31,
            parallel: false,
        };
        let serial = run_snr_sweep(&db, &db_generators(&db), &config).unwrap();
        config.parallel = true;
        let parallel = run_snr_sweep(&db, &db_generators(&db), &config).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn sweep_rejects_unknown_generator_class() {
        let db = two_class_db(4.0);
        let mut generators = db_generators(&db);
        generators.insert("ghost".into(), Generator::Model(lognormal_model(-9.0, 2.0)));
        let config = SweepConfig {
            snr_grid_db: vec![10.0],
            trials: 5,
            samples_per_trial: 16,
            sector: None,
            seed: 1,
            parallel: false,
        };
        assert!(run_snr_sweep(&db, &generators, &config).is_err());
    }

    #[test]
    fn held_out_duplicate_model_goes_home() {
        // The held-out generator equals class "a": at high SNR everything
        // lands on "a".
        let db = two_class_db(8.0);
        let held_out = lognormal_model(-12.0, 2.0);
        let reports = held_out_against_db(&db, "x", &held_out, &[20.0], 50, 181, 13).unwrap();
        assert!((reports[0].assignment_histogram["a"] - 1.0).abs() < 1e-12);
        let total: f64 = reports[0].assignment_histogram.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn held_out_unknown_class_rejected() {
        let mut training = BTreeMap::new();
        training.insert("a".to_string(), vec![1.0; 32]);
        let err = held_out_experiment(
            &training,
            "missing",
            Criterion::Aic,
            DbMetadata {
                frequency_hz: 15e9,
                polarization: Polarization::Hh,
            },
            &[10.0],
            5,
            16,
            1,
        );
        assert!(err.is_err());
    }
}
