//! Model ranking by AIC/BIC, per-class model databases, and the
//! equal-prior MAP classifier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::{fit_mle, DistributionFamily, FittedModel};
use crate::signature::{sector_slice, Polarization, RcsSignature, SectorSpec};
use crate::{Error, Result};

/// Per-sample log-density floor. Scores below this (including the −∞
/// out-of-support sentinel) are clamped so every class keeps a finite,
/// comparable log-likelihood.
pub const DENSITY_FLOOR_LN: f64 = -700.0;

/// Akaike information criterion: −2·lnL + 2k.
pub fn aic(loglik: f64, k: usize) -> f64 {
    -2.0 * loglik + 2.0 * k as f64
}

/// Bayesian information criterion: −2·lnL + k·ln n.
pub fn bic(loglik: f64, k: usize, n: usize) -> f64 {
    -2.0 * loglik + k as f64 * (n as f64).ln()
}

/// Model-selection criterion choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Criterion {
    Aic,
    Bic,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::Aic => "AIC",
            Criterion::Bic => "BIC",
        })
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            other => Err(Error::invalid(
                "criterion",
                format!("expected aic or bic, got {other:?}"),
            )),
        }
    }
}

/// Both criterion scores and ranks for one fitted family.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionScore {
    pub family: DistributionFamily,
    pub aic: f64,
    pub bic: f64,
    /// 1 = lowest AIC.
    pub rank_aic: usize,
    /// 1 = lowest BIC.
    pub rank_bic: usize,
}

/// Outcome of fitting and scoring a set of candidate families.
#[derive(Debug, Clone)]
pub struct ModelRanking {
    /// Scores sorted by ascending AIC rank.
    pub scores: Vec<CriterionScore>,
    /// The fitted model per successfully fitted family.
    pub fits: Vec<(DistributionFamily, FittedModel)>,
    /// Families whose fit failed, with the reason.
    pub skipped: Vec<(DistributionFamily, String)>,
}

impl ModelRanking {
    /// The criterion-best fitted model.
    pub fn best(&self, criterion: Criterion) -> &FittedModel {
        let family = self
            .scores
            .iter()
            .find(|s| match criterion {
                Criterion::Aic => s.rank_aic == 1,
                Criterion::Bic => s.rank_bic == 1,
            })
            .map(|s| s.family)
            .expect("ranking is never empty");
        &self
            .fits
            .iter()
            .find(|(f, _)| *f == family)
            .expect("fit present")
            .1
    }

    pub fn score_for(&self, family: DistributionFamily) -> Option<&CriterionScore> {
        self.scores.iter().find(|s| s.family == family)
    }
}

/// Fit every requested family to `samples` and rank the fits by both
/// criteria. Families that fail to fit are skipped with a recorded reason;
/// ties rank in the fixed family order.
pub fn rank_models(samples: &[f64], families: &[DistributionFamily]) -> Result<ModelRanking> {
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    let mut seen = Vec::new();
    for &family in families {
        if seen.contains(&family) {
            continue;
        }
        seen.push(family);
        match fit_mle(family, samples) {
            Ok(m) => fits.push((family, m)),
            Err(e) => skipped.push((family, e.to_string())),
        }
    }
    if fits.is_empty() {
        return Err(Error::Empty {
            what: "model ranking (all fits failed)",
        });
    }

    let family_order = |f: DistributionFamily| {
        DistributionFamily::ALL
            .iter()
            .position(|g| *g == f)
            .unwrap()
    };
    let mut scores: Vec<CriterionScore> = fits
        .iter()
        .map(|(family, m)| CriterionScore {
            family: *family,
            aic: aic(m.loglik, m.k),
            bic: bic(m.loglik, m.k, m.n),
            rank_aic: 0,
            rank_bic: 0,
        })
        .collect();

    let mut by_aic: Vec<usize> = (0..scores.len()).collect();
    by_aic.sort_by(|&a, &b| {
        scores[a]
            .aic
            .partial_cmp(&scores[b].aic)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| family_order(scores[a].family).cmp(&family_order(scores[b].family)))
    });
    for (rank, &i) in by_aic.iter().enumerate() {
        scores[i].rank_aic = rank + 1;
    }
    let mut by_bic: Vec<usize> = (0..scores.len()).collect();
    by_bic.sort_by(|&a, &b| {
        scores[a]
            .bic
            .partial_cmp(&scores[b].bic)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| family_order(scores[a].family).cmp(&family_order(scores[b].family)))
    });
    for (rank, &i) in by_bic.iter().enumerate() {
        scores[i].rank_bic = rank + 1;
    }
    scores.sort_by_key(|s| s.rank_aic);

    Ok(ModelRanking {
        scores,
        fits,
        skipped,
    })
}

/// Frequency/polarization tags shared by every entry of a database.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbMetadata {
    pub frequency_hz: f64,
    pub polarization: Polarization,
}

/// Per-class best fitted models under one selection criterion.
#[derive(Debug, Clone)]
pub struct ModelDatabase {
    pub classes: BTreeMap<String, FittedModel>,
    pub criterion: Criterion,
    pub frequency_hz: f64,
    pub polarization: Polarization,
}

impl ModelDatabase {
    /// Database with explicitly provided per-class models.
    pub fn from_models(
        classes: BTreeMap<String, FittedModel>,
        criterion: Criterion,
        metadata: DbMetadata,
    ) -> Self {
        ModelDatabase {
            classes,
            criterion,
            frequency_hz: metadata.frequency_hz,
            polarization: metadata.polarization,
        }
    }

    /// A copy of the database without one class.
    pub fn without_class(&self, class: &str) -> Result<ModelDatabase> {
        if !self.classes.contains_key(class) {
            return Err(Error::invalid(
                "class",
                format!("{class:?} not in database"),
            ));
        }
        let mut db = self.clone();
        db.classes.remove(class);
        Ok(db)
    }
}

/// Fit and rank all candidate families per class, keeping the
/// criterion-best model for each.
pub fn build_database(
    training: &BTreeMap<String, Vec<f64>>,
    criterion: Criterion,
    metadata: DbMetadata,
) -> Result<ModelDatabase> {
    let mut classes = BTreeMap::new();
    for (name, samples) in training {
        let ranking = rank_models(samples, &DistributionFamily::ALL)?;
        classes.insert(name.clone(), ranking.best(criterion).clone());
    }
    Ok(ModelDatabase::from_models(classes, criterion, metadata))
}

/// A classification decision with the per-class evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub decision: String,
    pub log_likelihoods: BTreeMap<String, f64>,
}

/// Log-likelihood of a test vector under one class model, with the
/// per-sample density floor applied.
///
/// Per-sample terms are summed in sorted order, which makes the result
/// independent of the ordering of `test` down to the last bit.
pub fn log_likelihood(model: &FittedModel, test: &[f64]) -> f64 {
    let mut terms: Vec<f64> = test
        .iter()
        .map(|&x| model.logpdf(x).max(DENSITY_FLOOR_LN))
        .collect();
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// MAP decision under equal priors: the class with the highest
/// log-likelihood wins; ties break to the lexicographically smaller name.
pub fn classify_map(db: &ModelDatabase, test: &[f64]) -> Result<ClassificationResult> {
    if db.classes.len() < 2 {
        return Err(Error::invalid(
            "database",
            "need at least two classes to classify",
        ));
    }
    if test.is_empty() {
        return Err(Error::Empty {
            what: "test vector",
        });
    }
    let mut log_likelihoods = BTreeMap::new();
    let mut best: Option<(&str, f64)> = None;
    for (name, model) in &db.classes {
        let ll = log_likelihood(model, test);
        // BTreeMap iterates names in ascending order, so strict `>` keeps
        // the lexicographically smaller name on ties.
        if best.map_or(true, |(_, b)| ll > b) {
            best = Some((name, ll));
        }
        log_likelihoods.insert(name.clone(), ll);
    }
    Ok(ClassificationResult {
        decision: best.expect("non-empty database").0.to_string(),
        log_likelihoods,
    })
}

/// MAP classification restricted to an azimuth sector of the signature.
pub fn classify_sector(
    db: &ModelDatabase,
    sig: &RcsSignature,
    sector: &SectorSpec,
) -> Result<ClassificationResult> {
    let sliced = sector_slice(sig, sector)?;
    classify_map(db, &sliced.rcs_m2)
}
