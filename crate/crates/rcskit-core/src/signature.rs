//! Sweep and signature data types, dB conversions, and azimuth-sector
//! slicing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Co-polarized transmit/receive configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "VV")]
    Vv,
    #[serde(rename = "HH")]
    Hh,
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Polarization::Vv => "VV",
            Polarization::Hh => "HH",
        })
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "VV" | "vv" => Ok(Polarization::Vv),
            "HH" | "hh" => Ok(Polarization::Hh),
            other => Err(Error::invalid(
                "polarization",
                format!("expected VV or HH, got {other:?}"),
            )),
        }
    }
}

/// Raw chamber output: complex S21 over a frequency × azimuth grid at one
/// polarization. `s21[i][j]` pairs `frequencies[i]` with `azimuths[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    pub frequencies_hz: Vec<f64>,
    pub azimuths_deg: Vec<f64>,
    pub polarization: Polarization,
    pub s21: Vec<Vec<Complex64>>,
}

/// Relative tolerance for frequency-grid uniformity.
const GRID_RTOL: f64 = 1e-9;

pub(crate) fn check_uniform_grid(values: &[f64], what: &'static str) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::invalid(what, "need at least two grid points"));
    }
    let step = values[1] - values[0];
    if step <= 0.0 {
        return Err(Error::invalid(
            what,
            format!("step {step} must be positive"),
        ));
    }
    for (i, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        if (d - step).abs() > GRID_RTOL * step.abs() {
            return Err(Error::invalid(
                what,
                format!("non-uniform step at index {i}: {d} vs {step}"),
            ));
        }
    }
    Ok(step)
}

impl FrequencySweep {
    pub fn new(
        frequencies_hz: Vec<f64>,
        azimuths_deg: Vec<f64>,
        polarization: Polarization,
        s21: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        check_uniform_grid(&frequencies_hz, "frequency grid")?;
        if azimuths_deg.is_empty() {
            return Err(Error::Empty {
                what: "azimuth grid",
            });
        }
        for w in azimuths_deg.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid(
                    "azimuth grid",
                    "must be strictly increasing",
                ));
            }
        }
        if azimuths_deg[0] < 0.0 || *azimuths_deg.last().unwrap() > 360.0 {
            return Err(Error::invalid(
                "azimuth grid",
                "must lie within [0, 360] degrees",
            ));
        }
        if s21.len() != frequencies_hz.len() {
            return Err(Error::mismatch(
                "sweep",
                format!(
                    "{} s21 rows vs {} frequencies",
                    s21.len(),
                    frequencies_hz.len()
                ),
            ));
        }
        for (i, row) in s21.iter().enumerate() {
            if row.len() != azimuths_deg.len() {
                return Err(Error::mismatch(
                    "sweep",
                    format!(
                        "row {i} has {} columns vs {} azimuths",
                        row.len(),
                        azimuths_deg.len()
                    ),
                ));
            }
        }
        Ok(FrequencySweep {
            frequencies_hz,
            azimuths_deg,
            polarization,
            s21,
        })
    }

    pub fn n_freq(&self) -> usize {
        self.frequencies_hz.len()
    }

    pub fn n_azimuth(&self) -> usize {
        self.azimuths_deg.len()
    }

    pub fn freq_step_hz(&self) -> f64 {
        self.frequencies_hz[1] - self.frequencies_hz[0]
    }

    /// The S21-vs-frequency column at one azimuth index.
    pub fn column(&self, azimuth_index: usize) -> Vec<Complex64> {
        self.s21.iter().map(|row| row[azimuth_index]).collect()
    }
}

/// Calibrated linear-scale RCS versus azimuth at one frequency and
/// polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsSignature {
    pub azimuths_deg: Vec<f64>,
    pub rcs_m2: Vec<f64>,
    pub frequency_hz: f64,
    pub polarization: Polarization,
    pub label: String,
}

impl RcsSignature {
    pub fn new(
        azimuths_deg: Vec<f64>,
        rcs_m2: Vec<f64>,
        frequency_hz: f64,
        polarization: Polarization,
        label: impl Into<String>,
    ) -> Result<Self> {
        if azimuths_deg.len() != rcs_m2.len() {
            return Err(Error::mismatch(
                "signature",
                format!(
                    "{} azimuths vs {} rcs values",
                    azimuths_deg.len(),
                    rcs_m2.len()
                ),
            ));
        }
        if rcs_m2.is_empty() {
            return Err(Error::Empty { what: "signature" });
        }
        if let Some(bad) = rcs_m2.iter().find(|&&v| !(v > 0.0)) {
            return Err(Error::invalid(
                "signature",
                format!("rcs value {bad} must be > 0"),
            ));
        }
        Ok(RcsSignature {
            azimuths_deg,
            rcs_m2,
            frequency_hz,
            polarization,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.rcs_m2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rcs_m2.is_empty()
    }
}

/// An azimuth sector given by its center and angular width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    /// Center angle, normalized to [0°, 360°).
    pub center_deg: f64,
    /// Width in degrees, 0 < width ≤ 360.
    pub width_deg: f64,
}

impl SectorSpec {
    pub fn new(center_deg: f64, width_deg: f64) -> Result<Self> {
        if !(width_deg > 0.0 && width_deg <= 360.0) {
            return Err(Error::invalid(
                "sector",
                format!("width {width_deg} must be in (0, 360]"),
            ));
        }
        if !center_deg.is_finite() {
            return Err(Error::invalid("sector", "center must be finite"));
        }
        Ok(SectorSpec {
            center_deg: center_deg.rem_euclid(360.0),
            width_deg,
        })
    }

    /// Whether a (normalized) azimuth lies in the closed sector interval,
    /// with wrap-around across 0°/360°.
    pub fn contains(&self, azimuth_deg: f64) -> bool {
        if self.width_deg >= 360.0 {
            return true;
        }
        let half = self.width_deg / 2.0;
        // Signed angular distance from center, in (-180, 180]
        let mut d = (azimuth_deg - self.center_deg).rem_euclid(360.0);
        if d > 180.0 {
            d -= 360.0;
        }
        d.abs() <= half + 1e-9
    }
}

/// Convert linear RCS (m²) to dBsm.
pub fn to_dbsm(rcs_m2: f64) -> Result<f64> {
    if !(rcs_m2 > 0.0) {
        return Err(Error::domain(
            "to_dbsm",
            format!("rcs {rcs_m2} must be > 0"),
        ));
    }
    Ok(10.0 * rcs_m2.log10())
}

/// Convert dBsm to linear RCS (m²).
pub fn from_dbsm(dbsm: f64) -> f64 {
    10.0_f64.powf(dbsm / 10.0)
}

/// Mean and population standard deviation of the signature's dBsm values.
pub fn db_stats(sig: &RcsSignature) -> Result<(f64, f64)> {
    if sig.is_empty() {
        return Err(Error::Empty { what: "signature" });
    }
    let db: Vec<f64> = sig.rcs_m2.iter().map(|&v| 10.0 * v.log10()).collect();
    let n = db.len() as f64;
    let mean = db.iter().sum::<f64>() / n;
    let var = db.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Restrict a signature to the azimuths inside `sector`, preserving sample
/// order and handling wrap-around across 0°/360°.
///
/// A full 360° sector returns the input unchanged. For narrower sectors,
/// samples whose normalized azimuth repeats an angle already kept (the
/// duplicated 0°/360° endpoint of a full sweep) are dropped, so a
/// 0°-centered 120° sector of a 2°-step full sweep yields 61 samples.
pub fn sector_slice(sig: &RcsSignature, sector: &SectorSpec) -> Result<RcsSignature> {
    if sector.width_deg >= 360.0 {
        return Ok(sig.clone());
    }
    let mut azimuths = Vec::new();
    let mut rcs = Vec::new();
    let mut kept_normalized: Vec<f64> = Vec::new();
    for (&az, &v) in sig.azimuths_deg.iter().zip(&sig.rcs_m2) {
        if !sector.contains(az) {
            continue;
        }
        let norm = az.rem_euclid(360.0);
        if kept_normalized.iter().any(|&k| (k - norm).abs() < 1e-9) {
            continue;
        }
        kept_normalized.push(norm);
        azimuths.push(az);
        rcs.push(v);
    }
    if rcs.is_empty() {
        return Err(Error::Empty {
            what: "sector selection",
        });
    }
    RcsSignature::new(
        azimuths,
        rcs,
        sig.frequency_hz,
        sig.polarization,
        sig.label.clone(),
    )
}
