//! Post-processing chain for raw chamber sweeps — background subtraction,
//! Hann windowing, time-domain transform, Tukey gating, calibration — plus
//! a synthetic-chamber generator for closed-loop verification.
//!
//! Transform conventions: both directions are unitary (1/√N scaling), so
//! energy is preserved exactly and a to_time → to_freq round trip is the
//! identity. Zero padding extends the frequency record before the inverse
//! transform; the time axis then spans 1/Δf with step 1/(padded·Δf).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::mie::{
    link_power_ratio, principal_distance, sphere_rcs_exact, wavelength, ChamberGeometry, Sphere,
    SPEED_OF_LIGHT,
};
use crate::rng::DetRng;
use crate::signature::{check_uniform_grid, FrequencySweep, RcsSignature};
use crate::{Error, Result};

/// Complex S21 versus frequency at one look angle.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqTrace {
    pub frequencies_hz: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FreqTrace {
    pub fn new(frequencies_hz: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        check_uniform_grid(&frequencies_hz, "frequency grid")?;
        if frequencies_hz.len() != values.len() {
            return Err(Error::mismatch(
                "trace",
                format!(
                    "{} frequencies vs {} values",
                    frequencies_hz.len(),
                    values.len()
                ),
            ));
        }
        Ok(FreqTrace {
            frequencies_hz,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn freq_step_hz(&self) -> f64 {
        self.frequencies_hz[1] - self.frequencies_hz[0]
    }
}

/// Complex response versus time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    pub times_s: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl TimeTrace {
    pub fn time_step_s(&self) -> f64 {
        self.times_s[1] - self.times_s[0]
    }
}

/// Time gate bounds with a Tukey taper fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub t_start_s: f64,
    pub t_stop_s: f64,
    /// Fraction of the gate length occupied by the two cosine tapers
    /// combined; 0 degenerates to a rectangular gate.
    pub taper_fraction: f64,
}

impl GateSpec {
    pub fn new(t_start_s: f64, t_stop_s: f64, taper_fraction: f64) -> Result<Self> {
        if !(t_start_s < t_stop_s) {
            return Err(Error::invalid(
                "gate",
                format!("start {t_start_s} must precede stop {t_stop_s}"),
            ));
        }
        if !(0.0..=1.0).contains(&taper_fraction) {
            return Err(Error::invalid(
                "gate",
                format!("taper fraction {taper_fraction} outside [0, 1]"),
            ));
        }
        Ok(GateSpec {
            t_start_s,
            t_stop_s,
            taper_fraction,
        })
    }

    pub fn width_s(&self) -> f64 {
        self.t_stop_s - self.t_start_s
    }

    /// Window weight at time `t`.
    pub fn weight(&self, t: f64) -> f64 {
        if t < self.t_start_s || t > self.t_stop_s {
            return 0.0;
        }
        let edge = self.taper_fraction * self.width_s() / 2.0;
        if edge == 0.0 {
            return 1.0;
        }
        let from_start = t - self.t_start_s;
        let from_stop = self.t_stop_s - t;
        if from_start < edge {
            0.5 * (1.0 - (std::f64::consts::PI * from_start / edge).cos())
        } else if from_stop < edge {
            0.5 * (1.0 - (std::f64::consts::PI * from_stop / edge).cos())
        } else {
            1.0
        }
    }
}

/// One synthetic echo: a pure delay with a complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClutterEcho {
    pub delay_s: f64,
    pub amplitude: Complex64,
}

/// Synthetic chamber contents beyond the target itself.
///
/// `echoes` are target-coupled returns that survive background subtraction
/// and must be removed by gating; `background` echoes are present in every
/// capture (empty-chamber response, antenna leakage) and cancel in the
/// subtraction step.
#[derive(Debug, Clone, Default)]
pub struct ClutterSpec {
    pub echoes: Vec<ClutterEcho>,
    pub background: Vec<ClutterEcho>,
}

impl ClutterSpec {
    pub fn validate(&self) -> Result<()> {
        for e in self.echoes.iter().chain(&self.background) {
            if !(e.delay_s >= 0.0) {
                return Err(Error::invalid(
                    "clutter",
                    format!("delay {} must be >= 0", e.delay_s),
                ));
            }
        }
        Ok(())
    }
}

/// Elementwise complex subtraction of the empty-chamber response.
pub fn background_subtract(target: &FreqTrace, background: &FreqTrace) -> Result<FreqTrace> {
    if target.frequencies_hz != background.frequencies_hz {
        return Err(Error::mismatch(
            "background_subtract",
            "frequency axes differ".to_string(),
        ));
    }
    let values = target
        .values
        .iter()
        .zip(&background.values)
        .map(|(t, b)| t - b)
        .collect();
    Ok(FreqTrace {
        frequencies_hz: target.frequencies_hz.clone(),
        values,
    })
}

/// Multiply by the Hann window 0.5·(1 − cos(2πi/(n−1))); endpoints go to
/// exactly zero.
pub fn hann_window(trace: &FreqTrace) -> Result<FreqTrace> {
    let n = trace.len();
    if n < 2 {
        return Err(Error::invalid("hann_window", "need at least two points"));
    }
    let values = trace
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos());
            v * w
        })
        .collect();
    Ok(FreqTrace {
        frequencies_hz: trace.frequencies_hz.clone(),
        values,
    })
}

/// Hann weight sequence, exposed for tests.
pub fn hann_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos()))
        .collect()
}

/// Unitary inverse DFT after zero-padding the record to
/// `zero_pad_factor · n` points.
pub fn to_time(trace: &FreqTrace, zero_pad_factor: usize) -> Result<TimeTrace> {
    if zero_pad_factor < 1 {
        return Err(Error::invalid("to_time", "zero_pad_factor must be >= 1"));
    }
    let n = trace.len();
    if n < 2 {
        return Err(Error::invalid("to_time", "need at least two points"));
    }
    let padded = n * zero_pad_factor;
    let mut buf: Vec<Complex64> = Vec::with_capacity(padded);
    buf.extend_from_slice(&trace.values);
    buf.resize(padded, Complex64::new(0.0, 0.0));

    FftPlanner::new().plan_fft_inverse(padded).process(&mut buf);
    let scale = 1.0 / (padded as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }

    let df = trace.freq_step_hz();
    let dt = 1.0 / (padded as f64 * df);
    let times = (0..padded).map(|i| i as f64 * dt).collect();
    Ok(TimeTrace {
        times_s: times,
        values: buf,
    })
}

/// Unitary forward DFT back to the frequency domain, keeping `n_out` bins
/// on a grid starting at `start_freq_hz`.
pub fn to_freq(trace: &TimeTrace, start_freq_hz: f64, n_out: usize) -> Result<FreqTrace> {
    let n = trace.values.len();
    if n_out == 0 || n_out > n {
        return Err(Error::invalid(
            "to_freq",
            format!("n_out {n_out} outside 1..={n}"),
        ));
    }
    let mut buf = trace.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    let dt = trace.time_step_s();
    let df = 1.0 / (n as f64 * dt);
    let frequencies = (0..n_out).map(|i| start_freq_hz + i as f64 * df).collect();
    let values = buf.into_iter().take(n_out).map(|v| v * scale).collect();
    Ok(FreqTrace {
        frequencies_hz: frequencies,
        values,
    })
}

/// Apply a Tukey time gate; everything outside [t_start, t_stop] is zeroed.
pub fn tukey_gate(trace: &TimeTrace, gate: &GateSpec) -> Result<TimeTrace> {
    let t0 = trace.times_s[0];
    let t1 = *trace.times_s.last().unwrap();
    if gate.t_start_s < t0 || gate.t_stop_s > t1 {
        return Err(Error::invalid(
            "gate",
            format!(
                "gate [{}, {}] outside trace span [{t0}, {t1}]",
                gate.t_start_s, gate.t_stop_s
            ),
        ));
    }
    let values = trace
        .times_s
        .iter()
        .zip(&trace.values)
        .map(|(&t, v)| v * gate.weight(t))
        .collect();
    Ok(TimeTrace {
        times_s: trace.times_s.clone(),
        values,
    })
}

/// Everything `process_sweep` needs besides the data.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub gate: GateSpec,
    pub zero_pad_factor: usize,
    /// Frequency whose nearest bin carries the reported RCS.
    pub nominal_freq_hz: f64,
}

/// Calibration reference: the raw sphere trace, its own background (when
/// available), and the sphere it was measured from.
#[derive(Debug, Clone)]
pub struct CalibrationRef {
    pub reference: FreqTrace,
    pub background: Option<FreqTrace>,
    pub sphere: Sphere,
}

/// Power |S(f_c)|² of one trace run through subtract → window → to_time →
/// gate → to_freq.
fn gated_power_at(
    trace: &FreqTrace,
    background: Option<&FreqTrace>,
    spec: &ProcessSpec,
) -> Result<f64> {
    let subtracted = match background {
        Some(b) => background_subtract(trace, b)?,
        None => trace.clone(),
    };
    let windowed = hann_window(&subtracted)?;
    let time = to_time(&windowed, spec.zero_pad_factor)?;
    let gated = tukey_gate(&time, &spec.gate)?;
    let freq = to_freq(&gated, trace.frequencies_hz[0], trace.len())?;
    let bin = nearest_bin(&trace.frequencies_hz, spec.nominal_freq_hz)?;
    let power = freq.values[bin].norm_sqr();
    if power <= 1e-280 {
        return Err(Error::EmptyTargetZone);
    }
    Ok(power)
}

fn nearest_bin(frequencies: &[f64], nominal: f64) -> Result<usize> {
    if nominal < frequencies[0] || nominal > *frequencies.last().unwrap() {
        return Err(Error::invalid(
            "nominal frequency",
            format!("{nominal} Hz outside the sweep band"),
        ));
    }
    let step = frequencies[1] - frequencies[0];
    let idx = ((nominal - frequencies[0]) / step).round() as usize;
    Ok(idx.min(frequencies.len() - 1))
}

/// Full chain from a raw sweep to a calibrated signature: per azimuth,
/// subtract the background, Hann-window, transform to time, Tukey-gate the
/// target zone, transform back, read |S21|² at the nominal frequency, and
/// scale by the identically processed sphere reference.
pub fn process_sweep(
    sweep: &FrequencySweep,
    background: &FrequencySweep,
    spec: &ProcessSpec,
    cal: &CalibrationRef,
    label: &str,
) -> Result<RcsSignature> {
    if sweep.frequencies_hz != background.frequencies_hz
        || sweep.azimuths_deg != background.azimuths_deg
    {
        return Err(Error::mismatch(
            "process_sweep",
            "sweep and background axes differ".to_string(),
        ));
    }
    if sweep.polarization != background.polarization {
        return Err(Error::mismatch(
            "process_sweep",
            "sweep and background polarization differ".to_string(),
        ));
    }
    if cal.reference.frequencies_hz != sweep.frequencies_hz {
        return Err(Error::mismatch(
            "process_sweep",
            "calibration reference on a different grid".to_string(),
        ));
    }

    let sigma_th = sphere_rcs_exact(cal.sphere, wavelength(spec.nominal_freq_hz))?;
    let ref_power = gated_power_at(&cal.reference, cal.background.as_ref(), spec)?;

    let columns: Vec<usize> = (0..sweep.n_azimuth()).collect();
    let rcs: Result<Vec<f64>> = columns
        .par_iter()
        .map(|&j| {
            let trace = FreqTrace {
                frequencies_hz: sweep.frequencies_hz.clone(),
                values: sweep.column(j),
            };
            let bg = FreqTrace {
                frequencies_hz: background.frequencies_hz.clone(),
                values: background.column(j),
            };
            let power = gated_power_at(&trace, Some(&bg), spec)?;
            Ok(power / ref_power * sigma_th)
        })
        .collect();

    RcsSignature::new(
        sweep.azimuths_deg.clone(),
        rcs?,
        spec.nominal_freq_hz,
        sweep.polarization,
        label,
    )
}

/// Synthetic-chamber controls shared by target, background, and reference
/// generation.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub frequencies_hz: Vec<f64>,
    pub geometry: ChamberGeometry,
    pub clutter: ClutterSpec,
    /// Complex-noise floor in dB relative to the azimuth-averaged target
    /// echo power at the band center. `f64::NEG_INFINITY` disables noise.
    pub noise_floor_db: f64,
    pub seed: u64,
}

impl SynthSpec {
    fn center_freq(&self) -> f64 {
        self.frequencies_hz[self.frequencies_hz.len() / 2]
    }
}

/// Round-trip delay of the target zone for this chamber geometry.
pub fn target_delay(geometry: &ChamberGeometry) -> f64 {
    2.0 * principal_distance(geometry) / SPEED_OF_LIGHT
}

fn echo_sum(echoes: &[ClutterEcho], f: f64) -> Complex64 {
    echoes
        .iter()
        .map(|e| {
            e.amplitude * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * e.delay_s)
        })
        .sum()
}

fn noise_sigma2(target: &RcsSignature, spec: &SynthSpec) -> Result<f64> {
    if spec.noise_floor_db == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let lambda_c = wavelength(spec.center_freq());
    let mut mean_power = 0.0;
    for &sigma in &target.rcs_m2 {
        let (ratio, _) = link_power_ratio(sigma, lambda_c, &spec.geometry)?;
        mean_power += ratio;
    }
    mean_power /= target.len() as f64;
    Ok(mean_power * 10f64.powf(spec.noise_floor_db / 10.0))
}

/// Simulate the chamber capture of a target with known signature:
/// S21(f, φ) = target echo + clutter echoes + background + noise floor.
///
/// The target echo amplitude is √(link ratio) for σ(φ) at each frequency,
/// delayed by the round trip to the target zone.
pub fn synthesize_sweep(target: &RcsSignature, spec: &SynthSpec) -> Result<FrequencySweep> {
    check_uniform_grid(&spec.frequencies_hz, "frequency grid")?;
    spec.clutter.validate()?;
    let delay = target_delay(&spec.geometry);
    let sigma2 = noise_sigma2(target, spec)?;
    let mut rng = DetRng::with_stream(spec.seed, 0);

    let mut s21 = Vec::with_capacity(spec.frequencies_hz.len());
    for &f in &spec.frequencies_hz {
        let lambda = wavelength(f);
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * delay);
        let fixed = echo_sum(&spec.clutter.echoes, f) + echo_sum(&spec.clutter.background, f);
        let mut row = Vec::with_capacity(target.len());
        for &sigma in &target.rcs_m2 {
            let (ratio, _) = link_power_ratio(sigma, lambda, &spec.geometry)?;
            let mut v = ratio.sqrt() * phase + fixed;
            if sigma2 > 0.0 {
                let (re, im) = rng.complex_gaussian(sigma2);
                v += Complex64::new(re, im);
            }
            row.push(v);
        }
        s21.push(row);
    }
    FrequencySweep::new(
        spec.frequencies_hz.clone(),
        target.azimuths_deg.clone(),
        target.polarization,
        s21,
    )
}

/// The matching empty-chamber capture: background echoes plus a fresh
/// noise draw (substream 1 of the same seed).
pub fn synthesize_background(target: &RcsSignature, spec: &SynthSpec) -> Result<FrequencySweep> {
    check_uniform_grid(&spec.frequencies_hz, "frequency grid")?;
    spec.clutter.validate()?;
    let sigma2 = noise_sigma2(target, spec)?;
    let mut rng = DetRng::with_stream(spec.seed, 1);

    let mut s21 = Vec::with_capacity(spec.frequencies_hz.len());
    for &f in &spec.frequencies_hz {
        let fixed = echo_sum(&spec.clutter.background, f);
        let mut row = Vec::with_capacity(target.len());
        for _ in 0..target.len() {
            let mut v = fixed;
            if sigma2 > 0.0 {
                let (re, im) = rng.complex_gaussian(sigma2);
                v += Complex64::new(re, im);
            }
            row.push(v);
        }
        s21.push(row);
    }
    FrequencySweep::new(
        spec.frequencies_hz.clone(),
        target.azimuths_deg.clone(),
        target.polarization,
        s21,
    )
}

/// The chamber capture of the calibration sphere itself (one look angle,
/// exact per-frequency sphere RCS, substream 2, no clutter echoes).
pub fn synthesize_sphere_reference(sphere: Sphere, spec: &SynthSpec) -> Result<FreqTrace> {
    check_uniform_grid(&spec.frequencies_hz, "frequency grid")?;
    let delay = target_delay(&spec.geometry);
    let mut values = Vec::with_capacity(spec.frequencies_hz.len());
    for &f in &spec.frequencies_hz {
        let lambda = wavelength(f);
        let sigma = sphere_rcs_exact(sphere, lambda)?;
        let (ratio, _) = link_power_ratio(sigma, lambda, &spec.geometry)?;
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * delay);
        let background = echo_sum(&spec.clutter.background, f);
        values.push(ratio.sqrt() * phase + background);
    }
    FreqTrace::new(spec.frequencies_hz.clone(), values)
}
