//! PEC-sphere RCS (exact Mie series and region approximations), chamber
//! link geometry, and measured-vs-theoretical calibration.

use num_complex::Complex64;

use crate::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength (m) at a given frequency (Hz).
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// A perfectly conducting calibration sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub radius_m: f64,
}

impl Sphere {
    pub fn new(radius_m: f64) -> Result<Self> {
        if !(radius_m > 0.0) {
            return Err(Error::invalid(
                "sphere",
                format!("radius {radius_m} must be > 0"),
            ));
        }
        Ok(Sphere { radius_m })
    }
}

/// Offset-fed compact-range geometry and link parameters.
///
/// Gains are linear (dimensionless), not dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChamberGeometry {
    pub focal_length_m: f64,
    pub outside_distance_m: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub tx_power_w: f64,
}

impl ChamberGeometry {
    pub fn new(
        focal_length_m: f64,
        outside_distance_m: f64,
        tx_gain: f64,
        rx_gain: f64,
        tx_power_w: f64,
    ) -> Result<Self> {
        if !(focal_length_m > 0.0 && tx_gain > 0.0 && rx_gain > 0.0 && tx_power_w > 0.0) {
            return Err(Error::invalid(
                "chamber geometry",
                "all parameters must be positive",
            ));
        }
        if !(outside_distance_m >= 0.0) {
            return Err(Error::invalid(
                "chamber geometry",
                "outside distance must be >= 0",
            ));
        }
        Ok(ChamberGeometry {
            focal_length_m,
            outside_distance_m,
            tx_gain,
            rx_gain,
            tx_power_w,
        })
    }
}

/// Sphere-scattering regime for a radius/wavelength pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterRegion {
    Rayleigh,
    Mie,
    Optical,
}

impl std::fmt::Display for ScatterRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScatterRegion::Rayleigh => "Rayleigh",
            ScatterRegion::Mie => "Mie",
            ScatterRegion::Optical => "Optical",
        })
    }
}

// The circumference-vs-wavelength cutoff that operationalizes
// "2πa ≪ λ" for the Rayleigh branch.
const RAYLEIGH_CUTOFF: f64 = 0.3;

/// Classify the scattering regime of a sphere at a wavelength.
pub fn scatter_region(sphere: Sphere, wavelength_m: f64) -> ScatterRegion {
    let circumference = 2.0 * std::f64::consts::PI * sphere.radius_m;
    if circumference < RAYLEIGH_CUTOFF * wavelength_m {
        ScatterRegion::Rayleigh
    } else if sphere.radius_m > 2.0 * wavelength_m {
        ScatterRegion::Optical
    } else {
        ScatterRegion::Mie
    }
}

/// Spherical Hankel function of the second kind, h_n^(2)(x) = j_n(x) − i·y_n(x).
///
/// Upward recurrence from the closed n = 0, 1 forms. Upward is stable here
/// because y_n dominates the growth and its upward recurrence is stable.
pub fn spherical_hankel2(n: usize, x: f64) -> Result<Complex64> {
    Ok(riccati_hankel2_seq(n, x)?[n] / x)
}

/// Derivative h_n^(2)′(x) via h_n′ = h_{n−1} − (n+1)/x · h_n (n ≥ 1),
/// and h_0′ = −h_1.
pub fn spherical_hankel2_deriv(n: usize, x: f64) -> Result<Complex64> {
    let seq = riccati_hankel2_seq(n + 1, x)?;
    let h = |k: usize| seq[k] / x;
    if n == 0 {
        Ok(-h(1))
    } else {
        Ok(h(n - 1) - (n as f64 + 1.0) / x * h(n))
    }
}

/// Riccati–Hankel functions Ĥ_k^(2)(x) = x·h_k^(2)(x) for k = 0..=n.
fn riccati_hankel2_seq(n: usize, x: f64) -> Result<Vec<Complex64>> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "spherical_hankel2",
            format!("x = {x} must be > 0"),
        ));
    }
    let (s, c) = x.sin_cos();
    let mut seq = Vec::with_capacity(n + 1);
    seq.push(Complex64::new(s, c));
    if n >= 1 {
        seq.push(Complex64::new(s / x - c, c / x + s));
    }
    for k in 1..n {
        let next = (2.0 * k as f64 + 1.0) / x * seq[k] - seq[k - 1];
        seq.push(next);
    }
    Ok(seq)
}

/// Mie series truncation for size parameter `ka`: the standard
/// ka + 4·ka^(1/3) + 2 bound plus margin so the omitted tail stays below
/// 1e-9 relative through ka = 100.
fn mie_terms(ka: f64) -> usize {
    (ka + 4.0 * ka.cbrt() + 2.0).ceil() as usize + 8
}

fn sphere_rcs_series(sphere: Sphere, wavelength_m: f64, n_terms: usize) -> Result<f64> {
    let ka = 2.0 * std::f64::consts::PI * sphere.radius_m / wavelength_m;
    let seq = riccati_hankel2_seq(n_terms, ka)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sign = -1.0;
    for n in 1..=n_terms.saturating_sub(1) {
        let h = seq[n];
        let h_deriv = seq[n - 1] - n as f64 / ka * h;
        sum += sign * (2.0 * n as f64 + 1.0) / (h_deriv * h);
        sign = -sign;
    }
    let sigma = wavelength_m * wavelength_m / (4.0 * std::f64::consts::PI) * sum.norm_sqr();
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(
            "sphere_rcs_exact",
            format!("series produced {sigma}"),
        ));
    }
    Ok(sigma)
}

/// Exact backscatter RCS of a PEC sphere:
///
/// σ = (λ²/4π)·|Σ_{n≥1} (−1)ⁿ(2n+1)/(Ĥ′ₙ(ka)·Ĥₙ(ka))|²
///
/// with Ĥₙ the Riccati–Hankel function of the second kind, truncated at
/// N = ⌈ka + 4(ka)^⅓ + 2⌉ terms.
pub fn sphere_rcs_exact(sphere: Sphere, wavelength_m: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) {
        return Err(Error::domain(
            "sphere_rcs_exact",
            format!("wavelength {wavelength_m} must be > 0"),
        ));
    }
    let ka = 2.0 * std::f64::consts::PI * sphere.radius_m / wavelength_m;
    if ka > 1e4 {
        return Err(Error::MieOverflow { ka });
    }
    sphere_rcs_series(sphere, wavelength_m, mie_terms(ka) + 1)
}

/// Region-aware sphere RCS: Rayleigh formula when 2πa < 0.3λ, geometric
/// cross section πa² when a > 2λ, the exact series in between.
pub fn sphere_rcs_approx(sphere: Sphere, wavelength_m: f64) -> Result<(f64, ScatterRegion)> {
    if !(wavelength_m > 0.0) {
        return Err(Error::domain(
            "sphere_rcs_approx",
            format!("wavelength {wavelength_m} must be > 0"),
        ));
    }
    let region = scatter_region(sphere, wavelength_m);
    let a = sphere.radius_m;
    let sigma = match region {
        ScatterRegion::Rayleigh => {
            let ka = 2.0 * std::f64::consts::PI * a / wavelength_m;
            9.0 * wavelength_m * wavelength_m / (4.0 * std::f64::consts::PI) * ka.powi(6)
        }
        ScatterRegion::Optical => std::f64::consts::PI * a * a,
        ScatterRegion::Mie => sphere_rcs_exact(sphere, wavelength_m)?,
    };
    Ok((sigma, region))
}

/// Elementwise calibration of a measured target response against the
/// measured and theoretical response of a reference sphere:
/// σ_target[i] = (d_rcs[i] / s_rcs[i]) · σ_th.
pub fn calibrate(d_rcs: &[f64], s_rcs: &[f64], sigma_th: f64) -> Result<Vec<f64>> {
    if d_rcs.len() != s_rcs.len() {
        return Err(Error::mismatch(
            "calibrate",
            format!(
                "{} target values vs {} reference values",
                d_rcs.len(),
                s_rcs.len()
            ),
        ));
    }
    if !(sigma_th > 0.0) {
        return Err(Error::domain(
            "calibrate",
            format!("sigma_th {sigma_th} must be > 0"),
        ));
    }
    if let Some(bad) = s_rcs.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::domain(
            "calibrate",
            format!("reference value {bad} must be > 0"),
        ));
    }
    Ok(d_rcs
        .iter()
        .zip(s_rcs)
        .map(|(d, s)| d / s * sigma_th)
        .collect())
}

/// Distance from the focal point to the principal-ray intersection of the
/// reflector: R_o = f_L + K²/(16·f_L).
pub fn principal_distance(g: &ChamberGeometry) -> f64 {
    g.focal_length_m + g.outside_distance_m * g.outside_distance_m / (16.0 * g.focal_length_m)
}

/// Compact-range link budget: received/transmitted power ratio for a target
/// of RCS `sigma` and the matching S21 level in dB.
///
/// ratio = σ·λ²·G_Tx·G_Rx / ((4π)³·R_o⁴)
pub fn link_power_ratio(
    sigma_m2: f64,
    wavelength_m: f64,
    g: &ChamberGeometry,
) -> Result<(f64, f64)> {
    if !(sigma_m2 > 0.0 && wavelength_m > 0.0) {
        return Err(Error::domain(
            "link_power_ratio",
            "sigma and wavelength must be > 0",
        ));
    }
    let r_o = principal_distance(g);
    let ratio = sigma_m2 * wavelength_m * wavelength_m * g.tx_gain * g.rx_gain
        / ((4.0 * std::f64::consts::PI).powi(3) * r_o.powi(4));
    Ok((ratio, 10.0 * ratio.log10()))
}

/// Fraunhofer far-field distance 2·D²/λ for a target of transverse size D.
pub fn fraunhofer_distance(target_size_m: f64, wavelength_m: f64) -> Result<f64> {
    if !(target_size_m > 0.0 && wavelength_m > 0.0) {
        return Err(Error::domain(
            "fraunhofer_distance",
            "size and wavelength must be > 0",
        ));
    }
    Ok(2.0 * target_size_m * target_size_m / wavelength_m)
}
