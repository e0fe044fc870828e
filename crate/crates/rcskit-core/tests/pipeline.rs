//! Closed-loop tests of the synthetic chamber and the processing chain.

mod common;

use num_complex::Complex64;
use rcskit_core::dsp::target_delay;
use rcskit_core::dsp::{
    process_sweep, synthesize_background, synthesize_sphere_reference, synthesize_sweep, to_time,
    CalibrationRef, ClutterEcho, ClutterSpec, FreqTrace, GateSpec, ProcessSpec, SynthSpec,
};
use rcskit_core::mie::{sphere_rcs_exact, wavelength, ChamberGeometry, Sphere};
use rcskit_core::signature::{Polarization, RcsSignature};
use rcskit_core::Error;

// Chamber fixture: 14.5–15.5 GHz in 201 steps, offset-fed geometry with a
// 22.7 ns target-zone round trip inside the 200 ns unambiguous span.
fn fixture() -> (Vec<f64>, ChamberGeometry, Sphere) {
    let freqs: Vec<f64> = (0..201).map(|i| 14.5e9 + i as f64 * 5e6).collect();
    let geometry = ChamberGeometry::new(2.5, 6.0, 100.0, 100.0, 1.0).unwrap();
    let sphere = Sphere::new(0.1524).unwrap();
    (freqs, geometry, sphere)
}

fn lobed_signature(n: usize, base: f64) -> RcsSignature {
    let azimuths: Vec<f64> = (0..n).map(|i| 360.0 * i as f64 / (n - 1) as f64).collect();
    let rcs: Vec<f64> = azimuths
        .iter()
        .map(|a| base * (1.0 + 0.9 * (3.0 * a.to_radians()).sin()))
        .collect();
    RcsSignature::new(azimuths, rcs, 15e9, Polarization::Vv, "synthetic").unwrap()
}

fn gate_for(geometry: &ChamberGeometry) -> GateSpec {
    let delay = target_delay(geometry);
    GateSpec::new(delay - 10e-9, delay + 10e-9, 0.5).unwrap()
}

fn max_db_error(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| (10.0 * (g / w).log10()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn full_loop_recovers_signature_within_half_db() {
    let (freqs, geometry, sphere) = fixture();
    let target = lobed_signature(181, 0.05);
    let delay = target_delay(&geometry);
    let spec = SynthSpec {
        frequencies_hz: freqs,
        geometry,
        clutter: ClutterSpec {
            // clutter 3+ gate widths (60 ns) past the target zone
            echoes: vec![
                ClutterEcho {
                    delay_s: delay + 65e-9,
                    amplitude: Complex64::new(2e-4, 1e-4),
                },
                ClutterEcho {
                    delay_s: delay + 95e-9,
                    amplitude: Complex64::new(-1e-4, 2e-4),
                },
            ],
            background: vec![
                ClutterEcho {
                    delay_s: 5e-9,
                    amplitude: Complex64::new(3e-3, -1e-3),
                },
                ClutterEcho {
                    delay_s: 40e-9,
                    amplitude: Complex64::new(1e-4, 1e-4),
                },
            ],
        },
        noise_floor_db: -60.0,
        seed: 2024,
    };
    let sweep = synthesize_sweep(&target, &spec).unwrap();
    let background = synthesize_background(&target, &spec).unwrap();
    let reference = synthesize_sphere_reference(sphere, &spec).unwrap();
    let pspec = ProcessSpec {
        gate: gate_for(&spec.geometry),
        zero_pad_factor: 4,
        nominal_freq_hz: 15e9,
    };
    let cal = CalibrationRef {
        reference,
        background: None,
        sphere,
    };
    let out = process_sweep(&sweep, &background, &pspec, &cal, "recovered").unwrap();
    let err = max_db_error(&out.rcs_m2, &target.rcs_m2);
    assert!(err < 0.5, "worst per-azimuth error {err} dB");
}

#[test]
fn sphere_self_calibration_is_flat() {
    let (freqs, geometry, sphere) = fixture();
    let sigma = sphere_rcs_exact(sphere, wavelength(15e9)).unwrap();
    let azimuths: Vec<f64> = (0..61).map(|i| 2.0 * i as f64).collect();
    let target =
        RcsSignature::new(azimuths, vec![sigma; 61], 15e9, Polarization::Vv, "sphere").unwrap();
    let spec = SynthSpec {
        frequencies_hz: freqs,
        geometry,
        clutter: ClutterSpec::default(),
        noise_floor_db: f64::NEG_INFINITY,
        seed: 1,
    };
    let sweep = synthesize_sweep(&target, &spec).unwrap();
    let background = synthesize_background(&target, &spec).unwrap();
    let reference = synthesize_sphere_reference(sphere, &spec).unwrap();
    let pspec = ProcessSpec {
        gate: gate_for(&spec.geometry),
        zero_pad_factor: 4,
        nominal_freq_hz: 15e9,
    };
    let cal = CalibrationRef {
        reference,
        background: None,
        sphere,
    };
    let out = process_sweep(&sweep, &background, &pspec, &cal, "flat").unwrap();
    let err = max_db_error(&out.rcs_m2, &target.rcs_m2);
    assert!(err < 0.1, "flatness error {err} dB");
}

#[test]
fn processing_is_scale_invariant_under_joint_scaling() {
    let (freqs, geometry, sphere) = fixture();
    let target = lobed_signature(31, 0.02);
    let spec = SynthSpec {
        frequencies_hz: freqs,
        geometry,
        clutter: ClutterSpec::default(),
        noise_floor_db: f64::NEG_INFINITY,
        seed: 3,
    };
    let sweep = synthesize_sweep(&target, &spec).unwrap();
    let background = synthesize_background(&target, &spec).unwrap();
    let reference = synthesize_sphere_reference(sphere, &spec).unwrap();
    let pspec = ProcessSpec {
        gate: gate_for(&spec.geometry),
        zero_pad_factor: 4,
        nominal_freq_hz: 15e9,
    };

    let scale = Complex64::new(-1.3, 2.2);
    let scaled_sweep = rcskit_core::signature::FrequencySweep::new(
        sweep.frequencies_hz.clone(),
        sweep.azimuths_deg.clone(),
        sweep.polarization,
        sweep
            .s21
            .iter()
            .map(|row| row.iter().map(|v| v * scale).collect())
            .collect(),
    )
    .unwrap();
    let scaled_background = rcskit_core::signature::FrequencySweep::new(
        background.frequencies_hz.clone(),
        background.azimuths_deg.clone(),
        background.polarization,
        background
            .s21
            .iter()
            .map(|row| row.iter().map(|v| v * scale).collect())
            .collect(),
    )
    .unwrap();
    let scaled_reference = FreqTrace::new(
        reference.frequencies_hz.clone(),
        reference.values.iter().map(|v| v * scale).collect(),
    )
    .unwrap();

    let base = process_sweep(
        &sweep,
        &background,
        &pspec,
        &CalibrationRef {
            reference,
            background: None,
            sphere,
        },
        "base",
    )
    .unwrap();
    let scaled = process_sweep(
        &scaled_sweep,
        &scaled_background,
        &pspec,
        &CalibrationRef {
            reference: scaled_reference,
            background: None,
            sphere,
        },
        "scaled",
    )
    .unwrap();
    for (a, b) in scaled.rcs_m2.iter().zip(&base.rcs_m2) {
        assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}");
    }
}

#[test]
fn sweep_equal_to_background_is_empty_target_zone() {
    let (freqs, geometry, sphere) = fixture();
    let target = lobed_signature(9, 0.05);
    let spec = SynthSpec {
        frequencies_hz: freqs,
        geometry,
        clutter: ClutterSpec::default(),
        noise_floor_db: f64::NEG_INFINITY,
        seed: 4,
    };
    let background = synthesize_background(&target, &spec).unwrap();
    let reference = synthesize_sphere_reference(sphere, &spec).unwrap();
    let pspec = ProcessSpec {
        gate: gate_for(&spec.geometry),
        zero_pad_factor: 4,
        nominal_freq_hz: 15e9,
    };
    let cal = CalibrationRef {
        reference,
        background: None,
        sphere,
    };
    let err = process_sweep(&background, &background, &pspec, &cal, "none").unwrap_err();
    assert!(matches!(err, Error::EmptyTargetZone), "got {err:?}");
}

#[test]
fn synthetic_echo_lands_at_its_delay() {
    let (freqs, geometry, _) = fixture();
    let target = lobed_signature(5, 0.05);
    let spec = SynthSpec {
        frequencies_hz: freqs.clone(),
        geometry,
        clutter: ClutterSpec::default(),
        noise_floor_db: f64::NEG_INFINITY,
        seed: 5,
    };
    let delay = target_delay(&spec.geometry);
    let sweep = synthesize_sweep(&target, &spec).unwrap();
    let trace = FreqTrace::new(freqs, sweep.column(0)).unwrap();
    let time = to_time(&trace, 8).unwrap();
    let peak = time
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .unwrap()
        .0;
    let dt = time.time_step_s();
    assert!(
        (time.times_s[peak] - delay).abs() <= dt,
        "peak at {} vs delay {delay}",
        time.times_s[peak]
    );
}

#[test]
fn zero_clutter_zero_noise_constant_sigma_gives_constant_magnitude() {
    let (freqs, geometry, _) = fixture();
    let azimuths: Vec<f64> = (0..13).map(|i| 30.0 * i as f64).collect();
    let target =
        RcsSignature::new(azimuths, vec![0.07; 13], 15e9, Polarization::Hh, "const").unwrap();
    let spec = SynthSpec {
        frequencies_hz: freqs,
        geometry,
        clutter: ClutterSpec::default(),
        noise_floor_db: f64::NEG_INFINITY,
        seed: 6,
    };
    let sweep = synthesize_sweep(&target, &spec).unwrap();
    for row in &sweep.s21 {
        let first = row[0].norm();
        for v in row {
            assert!((v.norm() - first).abs() < 1e-15);
        }
    }
}
