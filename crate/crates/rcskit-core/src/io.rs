//! File formats: signature and sweep CSVs, model/database JSON, and the
//! report CSVs emitted by ranking and Monte Carlo runs.
//!
//! All CSVs are UTF-8 with `.` decimal separators and no thousands
//! separators. Floats are written with Rust's shortest-round-trip
//! formatting, so rereading a file reproduces the exact values.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dist::{DistributionFamily, FittedModel};
use crate::montecarlo::SnrSweepResult;
use crate::recognition::{Criterion, CriterionScore, DbMetadata, ModelDatabase};
use crate::signature::{FrequencySweep, Polarization, RcsSignature};
use crate::{Error, Result};

pub const SIGNATURE_HEADER: &str = "azimuth_deg,rcs_m2";
pub const SWEEP_HEADER: &str = "freq_hz,azimuth_deg,polarization,s21_real,s21_imag";
pub const RANKING_HEADER: &str = "class,family,aic,bic,rank_aic,rank_bic,loglik,k";
pub const CONFUSION_HEADER: &str = "snr_db,class_true,class_pred,count";
pub const ACCURACY_HEADER: &str = "snr_db,accuracy";
pub const DB_SCHEMA: &str = "rcskit.model-db.v1";

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_f64(field: &str, path: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| parse_err(path, line, format!("bad number {field:?}: {e}")))
}

// ── RcsSignature CSV ────────────────────────────────────────────────────

/// Serialize a signature as `azimuth_deg,rcs_m2` rows.
pub fn signature_to_csv(sig: &RcsSignature) -> String {
    let mut out = String::from(SIGNATURE_HEADER);
    out.push('\n');
    for (az, rcs) in sig.azimuths_deg.iter().zip(&sig.rcs_m2) {
        out.push_str(&format!("{az},{rcs}\n"));
    }
    out
}

/// Parse a signature CSV; frequency, polarization, and label are not part
/// of the file format and are supplied by the caller.
pub fn signature_from_csv(
    text: &str,
    path: &str,
    frequency_hz: f64,
    polarization: Polarization,
    label: &str,
) -> Result<RcsSignature> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SIGNATURE_HEADER => {}
        Some((_, header)) => {
            return Err(parse_err(
                path,
                1,
                format!("expected header {SIGNATURE_HEADER:?}, got {header:?}"),
            ))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let mut azimuths = Vec::new();
    let mut rcs = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 2 fields, got {}", fields.len()),
            ));
        }
        azimuths.push(parse_f64(fields[0], path, line_no)?);
        rcs.push(parse_f64(fields[1], path, line_no)?);
    }
    RcsSignature::new(azimuths, rcs, frequency_hz, polarization, label)
}

pub fn write_signature(path: &Path, sig: &RcsSignature) -> Result<()> {
    std::fs::write(path, signature_to_csv(sig))?;
    Ok(())
}

pub fn read_signature(
    path: &Path,
    frequency_hz: f64,
    polarization: Polarization,
    label: &str,
) -> Result<RcsSignature> {
    let text = std::fs::read_to_string(path)?;
    signature_from_csv(
        &text,
        &path.display().to_string(),
        frequency_hz,
        polarization,
        label,
    )
}

// ── FrequencySweep CSV ──────────────────────────────────────────────────

/// Serialize a sweep as `freq_hz,azimuth_deg,polarization,s21_real,s21_imag`,
/// rows sorted by (frequency, azimuth).
pub fn sweep_to_csv(sweep: &FrequencySweep) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for (i, f) in sweep.frequencies_hz.iter().enumerate() {
        for (j, az) in sweep.azimuths_deg.iter().enumerate() {
            let v = sweep.s21[i][j];
            out.push_str(&format!(
                "{f},{az},{},{},{}\n",
                sweep.polarization, v.re, v.im
            ));
        }
    }
    out
}

pub fn sweep_from_csv(text: &str, path: &str) -> Result<FrequencySweep> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SWEEP_HEADER => {}
        Some((_, header)) => {
            return Err(parse_err(
                path,
                1,
                format!("expected header {SWEEP_HEADER:?}, got {header:?}"),
            ))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }

    let mut frequencies: Vec<f64> = Vec::new();
    let mut azimuths: Vec<f64> = Vec::new();
    let mut cells: Vec<Complex64> = Vec::new();
    let mut polarization: Option<Polarization> = None;

    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let f = parse_f64(fields[0], path, line_no)?;
        let az = parse_f64(fields[1], path, line_no)?;
        let pol: Polarization = fields[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("bad polarization {:?}", fields[2])))?;
        match polarization {
            None => polarization = Some(pol),
            Some(p) if p == pol => {}
            Some(p) => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("mixed polarizations {p} and {pol}"),
                ))
            }
        }
        let re = parse_f64(fields[3], path, line_no)?;
        let im = parse_f64(fields[4], path, line_no)?;

        if frequencies.last() != Some(&f) {
            if frequencies.contains(&f) {
                return Err(parse_err(
                    path,
                    line_no,
                    "rows not sorted by (freq, azimuth)",
                ));
            }
            frequencies.push(f);
        }
        if frequencies.len() == 1 {
            azimuths.push(az);
        } else {
            let col = cells.len() % azimuths.len();
            if (azimuths[col] - az).abs() > 1e-9 {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("azimuth {az} does not match grid value {}", azimuths[col]),
                ));
            }
        }
        cells.push(Complex64::new(re, im));
    }

    let n_az = azimuths.len();
    if n_az == 0 || cells.len() != frequencies.len() * n_az {
        return Err(parse_err(
            path,
            0,
            format!(
                "grid is ragged: {} cells for {}×{n_az}",
                cells.len(),
                frequencies.len()
            ),
        ));
    }
    let s21: Vec<Vec<Complex64>> = cells.chunks(n_az).map(|c| c.to_vec()).collect();
    FrequencySweep::new(
        frequencies,
        azimuths,
        polarization.expect("at least one row"),
        s21,
    )
}

pub fn write_sweep(path: &Path, sweep: &FrequencySweep) -> Result<()> {
    std::fs::write(path, sweep_to_csv(sweep))?;
    Ok(())
}

pub fn read_sweep(path: &Path) -> Result<FrequencySweep> {
    let text = std::fs::read_to_string(path)?;
    sweep_from_csv(&text, &path.display().to_string())
}

// ── FittedModel / ModelDatabase JSON ────────────────────────────────────

#[derive(Serialize, Deserialize)]
struct FittedModelJson {
    family: DistributionFamily,
    params: BTreeMap<String, f64>,
    k: usize,
    loglik: f64,
    n: usize,
    /// `null` marks an unbounded side.
    support: [Option<f64>; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    beta_scale: Option<f64>,
}

impl From<&FittedModel> for FittedModelJson {
    fn from(m: &FittedModel) -> Self {
        let params = m
            .family
            .param_names()
            .iter()
            .zip(&m.params)
            .map(|(name, value)| (name.to_string(), *value))
            .collect();
        let enc = |v: f64| if v.is_finite() { Some(v) } else { None };
        FittedModelJson {
            family: m.family,
            params,
            k: m.k,
            loglik: m.loglik,
            n: m.n,
            support: [enc(m.support.0), enc(m.support.1)],
            beta_scale: m.beta_scale,
        }
    }
}

impl FittedModelJson {
    fn into_model(self) -> Result<FittedModel> {
        let mut params = Vec::with_capacity(self.family.param_names().len());
        for name in self.family.param_names() {
            match self.params.get(*name) {
                Some(v) => params.push(*v),
                None => {
                    return Err(Error::invalid(
                        "model json",
                        format!("{} is missing parameter {name:?}", self.family),
                    ))
                }
            }
        }
        let mut model = FittedModel::from_params(self.family, params)?;
        model.loglik = self.loglik;
        model.n = self.n;
        model.k = self.k;
        model.beta_scale = self.beta_scale;
        let dec = |v: Option<f64>, unbounded: f64| v.unwrap_or(unbounded);
        model.support = (
            dec(self.support[0], f64::NEG_INFINITY),
            dec(self.support[1], f64::INFINITY),
        );
        Ok(model)
    }
}

pub fn model_to_json(model: &FittedModel) -> String {
    serde_json::to_string_pretty(&FittedModelJson::from(model)).expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<FittedModel> {
    let shim: FittedModelJson = serde_json::from_str(text)?;
    shim.into_model()
}

#[derive(Serialize, Deserialize)]
struct DatabaseJson {
    schema: String,
    criterion: Criterion,
    frequency_hz: f64,
    polarization: Polarization,
    classes: BTreeMap<String, FittedModelJson>,
}

pub fn database_to_json(db: &ModelDatabase) -> String {
    let shim = DatabaseJson {
        schema: DB_SCHEMA.to_string(),
        criterion: db.criterion,
        frequency_hz: db.frequency_hz,
        polarization: db.polarization,
        classes: db
            .classes
            .iter()
            .map(|(k, v)| (k.clone(), FittedModelJson::from(v)))
            .collect(),
    };
    serde_json::to_string_pretty(&shim).expect("database serializes")
}

pub fn database_from_json(text: &str) -> Result<ModelDatabase> {
    let shim: DatabaseJson = serde_json::from_str(text)?;
    if shim.schema != DB_SCHEMA {
        return Err(Error::invalid(
            "database json",
            format!("schema {:?}, this build reads {DB_SCHEMA:?}", shim.schema),
        ));
    }
    let mut classes = BTreeMap::new();
    for (name, model) in shim.classes {
        classes.insert(name, model.into_model()?);
    }
    Ok(ModelDatabase::from_models(
        classes,
        shim.criterion,
        DbMetadata {
            frequency_hz: shim.frequency_hz,
            polarization: shim.polarization,
        },
    ))
}

pub fn write_database(path: &Path, db: &ModelDatabase) -> Result<()> {
    std::fs::write(path, database_to_json(db))?;
    Ok(())
}

pub fn read_database(path: &Path) -> Result<ModelDatabase> {
    let text = std::fs::read_to_string(path)?;
    database_from_json(&text)
}

// ── report CSVs ─────────────────────────────────────────────────────────

/// `class,family,aic,bic,rank_aic,rank_bic,loglik,k` rows for one or more
/// classes' rankings.
pub fn ranking_to_csv(
    rankings: &[(
        String,
        Vec<CriterionScore>,
        Vec<(DistributionFamily, f64, usize)>,
    )],
) -> String {
    // The third tuple element carries (family, loglik, k) for the fits.
    let mut out = String::from(RANKING_HEADER);
    out.push('\n');
    for (class, scores, fits) in rankings {
        for s in scores {
            let (loglik, k) = fits
                .iter()
                .find(|(f, _, _)| *f == s.family)
                .map(|(_, ll, k)| (*ll, *k))
                .expect("score has a matching fit");
            out.push_str(&format!(
                "{class},{},{},{},{},{},{loglik},{k}\n",
                s.family, s.aic, s.bic, s.rank_aic, s.rank_bic
            ));
        }
    }
    out
}

/// `snr_db,class_true,class_pred,count` rows reconstructed from the
/// row-stochastic confusion matrices.
pub fn sweep_counts_to_csv(result: &SnrSweepResult) -> String {
    let mut out = String::from(CONFUSION_HEADER);
    out.push('\n');
    for (snr_i, &snr) in result.snr_grid_db.iter().enumerate() {
        for (ti, true_class) in result.classes.iter().enumerate() {
            for (pi, pred_class) in result.classes.iter().enumerate() {
                let count = (result.confusion[snr_i][ti][pi] * result.trials as f64).round() as u64;
                out.push_str(&format!("{snr},{true_class},{pred_class},{count}\n"));
            }
        }
    }
    out
}

/// `snr_db,accuracy` rows.
pub fn accuracy_to_csv(result: &SnrSweepResult) -> String {
    let mut out = String::from(ACCURACY_HEADER);
    out.push('\n');
    for (snr, acc) in result.snr_grid_db.iter().zip(&result.accuracy) {
        out.push_str(&format!("{snr},{acc}\n"));
    }
    out
}
