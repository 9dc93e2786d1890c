//! Spectral estimation and sensitivity figures: Welch PSDs, Lorentzian
//! fits, rotation-peak detection, and torque/force sensitivity.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::langevin::TimeSeries;

/// Tapering window for Welch segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    fn values(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| {
                    let x = std::f64::consts::PI * i as f64 / n as f64;
                    x.sin() * x.sin()
                })
                .collect(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        }
    }
}

/// Single-sided Welch PSD estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsdEstimate {
    /// Frequency grid from 0 to Nyquist, Hz.
    pub frequency: Vec<f64>,
    /// PSD values, (channel unit)^2 / Hz.
    pub psd: Vec<f64>,
    pub segments: usize,
    pub window: String,
}

impl PsdEstimate {
    /// Integral of the PSD over frequency (should equal the time-domain
    /// variance, Parseval).
    pub fn integrated_power(&self) -> f64 {
        if self.frequency.len() < 2 {
            return 0.0;
        }
        let df = self.frequency[1] - self.frequency[0];
        // Skip the DC bin: variance is taken about the mean.
        self.psd.iter().skip(1).sum::<f64>() * df
    }
}

/// Welch PSD of a named channel: `segment_len` must be a power of two;
/// `overlap` is the fractional segment overlap (0.5 default convention).
pub fn welch_psd(
    ts: &TimeSeries,
    channel: &str,
    segment_len: usize,
    overlap: f64,
    window: Window,
) -> Result<PsdEstimate> {
    let data = ts
        .channel(channel)
        .ok_or_else(|| Error::Config(format!("unknown channel '{channel}'")))?;
    if !segment_len.is_power_of_two() || segment_len < 4 {
        return Err(Error::Config(format!(
            "segment length {segment_len} is not a power of two >= 4"
        )));
    }
    if data.len() < segment_len {
        return Err(Error::TooShort {
            have: data.len(),
            need: segment_len,
        });
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Config("overlap must be in [0, 1)".into()));
    }
    let fs = 1.0 / ts.dt;
    let hop = ((segment_len as f64) * (1.0 - overlap)).max(1.0) as usize;
    let w = window.values(segment_len);
    let w_power: f64 = w.iter().map(|v| v * v).sum();
    let mean = data.iter().sum::<f64>() / data.len() as f64;

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(segment_len);
    let n_bins = segment_len / 2 + 1;
    let mut acc = vec![0.0f64; n_bins];
    let mut segments = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    let mut start = 0usize;
    while start + segment_len <= data.len() {
        for i in 0..segment_len {
            buf[i] = Complex64::new((data[start + i] - mean) * w[i], 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += buf[k].norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let scale = 1.0 / (fs * w_power * segments as f64);
    let psd: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || k == segment_len / 2 { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    let frequency = (0..n_bins).map(|k| k as f64 * fs / segment_len as f64).collect();
    Ok(PsdEstimate {
        frequency,
        psd,
        segments,
        window: window.name().to_string(),
    })
}

/// Result of a damped-oscillator Lorentzian fit.
///
/// Parameterization (recorded in `model`):
/// S(f) = A / ((f^2 - f0^2)^2 + (Gamma f)^2), Gamma in Hz
/// (Gamma = gamma/2pi of the angular-frequency damping rate), with
/// integral over f in [0, inf) equal to A pi / (2 Gamma f0^2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub amplitude: f64,
    pub f0: f64,
    pub gamma: f64,
    /// Integral of the fitted model over [0, inf).
    pub area: f64,
    /// RMS relative residual over the fitted band.
    pub rel_residual: f64,
    pub iterations: usize,
    pub model: String,
}

fn lorentz(f: f64, a: f64, f0: f64, g: f64) -> f64 {
    let d = f * f - f0 * f0;
    a / (d * d + g * g * f * f)
}

/// Levenberg-Marquardt fit of the damped-oscillator PSD over `band`.
pub fn lorentzian_fit(psd: &PsdEstimate, band: (f64, f64)) -> Result<LorentzianFit> {
    let pts: Vec<(f64, f64)> = psd
        .frequency
        .iter()
        .zip(&psd.psd)
        .filter(|(&f, _)| f >= band.0 && f <= band.1 && f > 0.0)
        .map(|(&f, &s)| (f, s))
        .collect();
    if pts.len() < 8 {
        return Err(Error::TooShort {
            have: pts.len(),
            need: 8,
        });
    }

    // Initial guess from the band maximum and its half-power width.
    let (mut f0, peak) = pts
        .iter()
        .fold((0.0, 0.0), |(bf, bs), &(f, s)| if s > bs { (f, s) } else { (bf, bs) });
    if f0 == 0.0 {
        f0 = 0.5 * (band.0 + band.1);
    }
    let half: Vec<f64> = pts
        .iter()
        .filter(|&&(_, s)| s > peak / 2.0)
        .map(|&(f, _)| f)
        .collect();
    let width = (half.last().copied().unwrap_or(f0) - half.first().copied().unwrap_or(f0))
        .max(psd.frequency[1] - psd.frequency[0]);
    let mut g = width;
    let mut a = peak * g * g * f0 * f0;

    // Weighted least squares on log-spaced magnitudes: minimize sum of
    // (model - data)^2 / data^2 so decades of dynamic range count equally.
    let chi2 = |a: f64, f0: f64, g: f64| -> f64 {
        pts.iter()
            .map(|&(f, s)| {
                let r = (lorentz(f, a, f0, g) - s) / s.max(f64::MIN_POSITIVE);
                r * r
            })
            .sum()
    };

    let mut lambda = 1e-3;
    let mut c = chi2(a, f0, g);
    let mut iters = 0usize;
    for _ in 0..200 {
        iters += 1;
        // Jacobian of the weighted residuals w.r.t. (a, f0, g).
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(f, s) in &pts {
            let wgt = 1.0 / s.max(f64::MIN_POSITIVE);
            let d = f * f - f0 * f0;
            let den = d * d + g * g * f * f;
            let m = a / den;
            let dm_da = 1.0 / den;
            let dm_df0 = a * (4.0 * f0 * d) / (den * den);
            let dm_dg = -a * (2.0 * g * f * f) / (den * den);
            let jr = [dm_da * wgt, dm_df0 * wgt, dm_dg * wgt];
            let r = (m - s) * wgt;
            for i in 0..3 {
                jtr[i] += jr[i] * r;
                for j in 0..3 {
                    jtj[i][j] += jr[i] * jr[j];
                }
            }
        }
        // Solve (JtJ + lambda diag) dp = -Jtr by Gaussian elimination.
        let mut mtx = jtj;
        for i in 0..3 {
            mtx[i][i] *= 1.0 + lambda;
        }
        let mut rhs = [-jtr[0], -jtr[1], -jtr[2]];
        let mut ok = true;
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| mtx[i][col].abs().total_cmp(&mtx[j][col].abs()))
                .unwrap();
            if mtx[piv][col].abs() < 1e-300 {
                ok = false;
                break;
            }
            mtx.swap(col, piv);
            rhs.swap(col, piv);
            for row in col + 1..3 {
                let fac = mtx[row][col] / mtx[col][col];
                for k in col..3 {
                    mtx[row][k] -= fac * mtx[col][k];
                }
                rhs[row] -= fac * rhs[col];
            }
        }
        let mut dp = [0.0f64; 3];
        if ok {
            for i in (0..3).rev() {
                let mut v = rhs[i];
                for k in i + 1..3 {
                    v -= mtx[i][k] * dp[k];
                }
                dp[i] = v / mtx[i][i];
            }
        }
        let (na, nf0, ng) = (a + dp[0], (f0 + dp[1]).abs(), (g + dp[2]).abs());
        let nc = if ok && na > 0.0 { chi2(na, nf0, ng) } else { f64::INFINITY };
        if nc < c {
            let rel_step = (dp[0] / a).abs().max((dp[1] / f0).abs()).max((dp[2] / g).abs());
            a = na;
            f0 = nf0;
            g = ng;
            c = nc;
            lambda = (lambda * 0.3).max(1e-12);
            if rel_step < 1e-12 {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let rel_residual = (c / pts.len() as f64).sqrt();
    if !rel_residual.is_finite() || rel_residual > 0.75 {
        return Err(Error::NoConvergence {
            iters,
            residual: rel_residual,
        });
    }
    Ok(LorentzianFit {
        amplitude: a,
        f0,
        gamma: g,
        area: a * std::f64::consts::PI / (2.0 * g * f0 * f0),
        rel_residual,
        iterations: iters,
        model: "S(f) = A/((f^2-f0^2)^2 + (Gamma f)^2)".to_string(),
    })
}

/// Frequency of the mechanical rotation: half the frequency of the
/// dominant narrow peak (the optical signal of a dumbbell appears at
/// 2 x f_rot).
pub fn detect_rotation_peak(psd: &PsdEstimate) -> Result<f64> {
    let mut best = (0usize, 0.0f64);
    for (i, &s) in psd.psd.iter().enumerate().skip(1) {
        if s > best.1 {
            best = (i, s);
        }
    }
    // Noise floor: median of the nonzero bins.
    let mut sorted: Vec<f64> = psd.psd.iter().skip(1).copied().collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let floor = sorted[sorted.len() / 2].max(f64::MIN_POSITIVE);
    let prominence = best.1 / floor;
    if prominence < 10.0 {
        return Err(Error::NoPeak(prominence));
    }
    Ok(psd.frequency[best.0] / 2.0)
}

/// Rotational noise floor input to the torque sensitivity.
#[derive(Debug, Clone)]
pub enum NoiseFloor {
    /// Thermal-limit angular-velocity noise from fluctuation-dissipation.
    Thermal { temperature: f64 },
    /// Measured S_noise^{1/2}(Omega_rot), (rad/s)/sqrt(Hz).
    Measured(f64),
}

/// Torque sensitivity S_T^{1/2}(Omega_rot) = I sqrt(gamma^2 + Omega_rot^2)
/// S_noise^{1/2}. In thermal-limit mode the angular-velocity noise density
/// is sqrt(4 k_B T gamma / (I (gamma^2 + Omega^2))), so
/// S_T^{1/2} -> sqrt(4 k_B T I gamma) independent of Omega_rot.
pub fn torque_sensitivity(inertia: f64, gamma: f64, omega_rot: f64, noise: &NoiseFloor) -> f64 {
    let resp = inertia * (gamma * gamma + omega_rot * omega_rot).sqrt();
    match noise {
        NoiseFloor::Thermal { temperature } => {
            let s_noise =
                (4.0 * K_B * temperature * gamma / (inertia * (gamma * gamma + omega_rot * omega_rot)))
                    .sqrt();
            resp * s_noise
        }
        NoiseFloor::Measured(s) => resp * s,
    }
}

/// Thermal-limit scalar: sqrt(4 k_B T I gamma).
pub fn torque_sensitivity_thermal(inertia: f64, gamma: f64, temperature: f64) -> f64 {
    (4.0 * K_B * temperature * inertia * gamma).sqrt()
}

/// Force sensitivity per axis: S_F^{1/2} = sqrt(4 k_B T m Gamma).
pub fn force_sensitivity(mass: f64, temperature: f64, gamma: f64) -> f64 {
    (4.0 * K_B * temperature * mass * gamma).sqrt()
}

/// Full sensitivity report at one pressure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// Thermal-limit torque sensitivity, N m / sqrt(Hz).
    pub s_t_sqrt: f64,
    /// Frequency-resolved torque sensitivity (f_rot Hz, S_T^{1/2}).
    pub s_t_curve: Vec<(f64, f64)>,
    /// Force sensitivity per lab axis (x, y, z), N / sqrt(Hz).
    pub s_f_sqrt: [f64; 3],
    pub inertia: f64,
    pub gamma_rot: f64,
    pub mass: f64,
    pub gamma_com: [f64; 3],
    pub temperature: f64,
    pub pressure_torr: f64,
}

/// Build the report from gas-damping rates (single source of truth).
pub fn sensitivity_report(
    env: &crate::gas::Environment,
    geom: &crate::dumbbell::DumbbellGeom,
    f_rot_grid: &[f64],
) -> Result<SensitivityReport> {
    let rates = crate::gas::damping_rates(env, geom)?;
    let inertia = geom.moment_of_inertia();
    let mass = geom.mass();
    let noise = NoiseFloor::Thermal {
        temperature: env.temperature,
    };
    let curve = f_rot_grid
        .iter()
        .map(|&f| {
            let omega = 2.0 * std::f64::consts::PI * f;
            (f, torque_sensitivity(inertia, rates.gamma_rot, omega, &noise))
        })
        .collect();
    let g = rates.per_lab_axis();
    Ok(SensitivityReport {
        s_t_sqrt: torque_sensitivity_thermal(inertia, rates.gamma_rot, env.temperature),
        s_t_curve: curve,
        s_f_sqrt: [
            force_sensitivity(mass, env.temperature, g[0]),
            force_sensitivity(mass, env.temperature, g[1]),
            force_sensitivity(mass, env.temperature, g[2]),
        ],
        inertia,
        gamma_rot: rates.gamma_rot,
        mass,
        gamma_com: g,
        temperature: env.temperature,
        pressure_torr: env.pressure_torr,
    })
}

/// Force sensitivity per axis at each standing-wave well (flat in
/// separation: free-molecular damping does not feel the surface).
pub fn sensitivity_vs_distance(
    env: &crate::gas::Environment,
    geom: &crate::dumbbell::DumbbellGeom,
    separations: &[f64],
) -> Result<Vec<(f64, [f64; 3])>> {
    let rates = crate::gas::damping_rates(env, geom)?;
    let g = rates.per_lab_axis();
    let mass = geom.mass();
    Ok(separations
        .iter()
        .map(|&d| {
            let corr = crate::gas::proximity_correction(env, geom, d);
            (
                d,
                [
                    force_sensitivity(mass, env.temperature, g[0] * corr),
                    force_sensitivity(mass, env.temperature, g[1] * corr),
                    force_sensitivity(mass, env.temperature, g[2] * corr),
                ],
            )
        })
        .collect())
}
