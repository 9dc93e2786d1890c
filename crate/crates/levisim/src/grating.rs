//! Near field above a sub-wavelength gold nanograting and the trap-
//! frequency modulation seen when scanning a trapped dumbbell across it.
//!
//! Scalar Rayleigh-expansion model: the grating reflects the incident beam
//! into Fourier orders of its square-wave reflection profile. For
//! period < wavelength only the 0th order propagates; every other order is
//! evanescent with decay constant kappa_n, which is exactly why the
//! interference pattern exists in the first trapping well and disappears
//! by the second.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beam::{self, BeamParams, ComplexField, SurfaceSpec};
use crate::constants::{C_LIGHT, EPS_0};
use crate::dumbbell::{dumbbell_polarizability, DumbbellGeom};
use crate::error::{Error, Result};

/// Binary gold grating on a dielectric substrate; grating vector along x.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GratingSpec {
    /// Period Lambda, m.
    pub period: f64,
    /// Gold stripe width, m.
    pub stripe_width: f64,
    /// Stripe (gold) normal-incidence reflection amplitude.
    pub r_stripe: Complex64,
    /// Groove (substrate) reflection amplitude.
    pub r_groove: Complex64,
    /// Grating plane position, m.
    pub z_position: f64,
}

impl GratingSpec {
    /// Paper geometry: 600 nm period, 300 nm gold stripes on sapphire.
    pub fn gold_on_sapphire(z_position: f64) -> Self {
        let gold = beam::fresnel_reflection(&SurfaceSpec::gold(0.0), 1550e-9).unwrap();
        let sapphire = beam::fresnel_reflection(&SurfaceSpec::sapphire(0.0), 1550e-9).unwrap();
        Self {
            period: 600e-9,
            stripe_width: 300e-9,
            r_stripe: gold,
            r_groove: sapphire,
            z_position,
        }
    }

    pub fn duty_cycle(&self) -> f64 {
        self.stripe_width / self.period
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0) || !(0.0 < self.stripe_width && self.stripe_width < self.period) {
            return Err(Error::Config(
                "grating requires 0 < stripe width < period".into(),
            ));
        }
        Ok(())
    }
}

/// One Fourier order of the grating reflection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReflectionOrder {
    pub n: i32,
    pub amplitude: Complex64,
    /// Evanescent decay constant, 1/m (None for the propagating 0th order).
    pub kappa: Option<f64>,
    /// Axial wavenumber of a propagating order, 1/m.
    pub k_z: Option<f64>,
}

/// Fourier orders of the square-wave reflection profile (stripe centered
/// at x = 0): c_0 = r_sub + (r_Au - r_sub) * duty,
/// c_n = (r_Au - r_sub) sin(pi n duty) / (pi n).
pub fn reflection_orders(
    grating: &GratingSpec,
    wavelength: f64,
    n_max: i32,
) -> Result<Vec<ReflectionOrder>> {
    grating.validate()?;
    if grating.period >= wavelength {
        return Err(Error::PropagatingOrder {
            period: grating.period,
            wavelength,
        });
    }
    let duty = grating.duty_cycle();
    let dr = grating.r_stripe - grating.r_groove;
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let kg = 2.0 * std::f64::consts::PI / grating.period;
    let mut orders = Vec::with_capacity((2 * n_max + 1) as usize);
    for n in -n_max..=n_max {
        let amplitude = if n == 0 {
            grating.r_groove + dr * duty
        } else {
            let x = std::f64::consts::PI * n as f64 * duty;
            dr * x.sin() / (std::f64::consts::PI * n as f64)
        };
        let kx = n as f64 * kg;
        let (kappa, k_z) = if kx.abs() > k {
            ((kx * kx - k * k).sqrt().into(), None)
        } else {
            (None, Some((k * k - kx * kx).sqrt()))
        };
        orders.push(ReflectionOrder {
            n,
            amplitude,
            kappa,
            k_z,
        });
    }
    Ok(orders)
}

/// Total field above the grating. `x_scan` is the lateral offset of the
/// grating relative to the beam axis (the beam and the trapped particle
/// scan together across the grating, so intensity is exactly periodic in
/// x_scan). The 0th order is the specular image beam; evanescent orders
/// carry the incident field at the surface with decay exp(-kappa_n dz).
pub fn grating_field(
    grating: &GratingSpec,
    beam_params: &BeamParams,
    x_scan: f64,
    point: [f64; 3],
) -> Result<ComplexField> {
    let z_s = grating.z_position;
    if point[2] >= z_s {
        return Err(Error::Config(format!(
            "field point z = {:.3e} m is not above the grating plane {:.3e} m",
            point[2], z_s
        )));
    }
    let orders = reflection_orders(grating, beam_params.wavelength, 24)?;
    let incident = beam::focused_field(beam_params, point)?;
    let mirror = [point[0], point[1], 2.0 * z_s - point[2]];
    let image = beam::focused_field(beam_params, mirror)?;
    let at_surface = beam::focused_field(beam_params, [point[0], point[1], z_s])?;

    let kg = 2.0 * std::f64::consts::PI / grating.period;
    let mut e = incident.e;
    for o in &orders {
        if o.n == 0 {
            for a in 0..2 {
                e[a] += o.amplitude * image.e[a];
            }
        } else {
            let kappa = o.kappa.expect("nonzero orders are evanescent here");
            let phase = Complex64::from_polar(1.0, kg * o.n as f64 * (point[0] + x_scan));
            let decay = (-kappa * (z_s - point[2])).exp();
            for a in 0..2 {
                e[a] += o.amplitude * phase * decay * at_surface.e[a];
            }
        }
    }
    Ok(ComplexField { e, k: incident.k })
}

/// Intensity on the beam axis at height `z` (lab frame, below the focus)
/// for grating offset `x`.
pub fn nearfield_intensity(
    grating: &GratingSpec,
    beam_params: &BeamParams,
    x: f64,
    z: f64,
) -> Result<f64> {
    let f = grating_field(grating, beam_params, x, [0.0, 0.0, z])?;
    Ok(0.5 * C_LIGHT * EPS_0 * f.e_norm_sqr())
}

/// Dumbbell optical potential over the grating (axis along x).
fn grating_potential(
    geom: &DumbbellGeom,
    tensor: &crate::dumbbell::PolarizabilityTensor,
    beam_params: &BeamParams,
    grating: &GratingSpec,
    x_scan: f64,
    position: [f64; 3],
) -> Result<f64> {
    let half = geom.center_separation() / 2.0;
    let mut u = 0.0;
    for sign in [-1.0, 1.0] {
        let p = [position[0] + sign * half, position[1], position[2]];
        let field = grating_field(grating, beam_params, x_scan, p)?;
        let e_sq = field.e_norm_sqr();
        let axis_dot = field.e[0];
        u += -0.25 * 0.5 * (tensor.perpendicular.re * e_sq + tensor.anisotropy().re * axis_dot.norm_sqr());
    }
    Ok(u)
}

/// One row of the trap-frequency scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Grating offset, m.
    pub x: f64,
    /// Transverse (x) trap frequency, Hz.
    pub f_x: f64,
    /// Well distance from the grating plane, m.
    pub well_d: f64,
}

/// Trap frequency of the x motion while scanning across the grating in
/// standing-wave well `well_index` (1-based).
pub fn scan_trap_frequency(
    grating: &GratingSpec,
    beam_params: &BeamParams,
    geom: &DumbbellGeom,
    well_index: usize,
    x_grid: &[f64],
) -> Result<Vec<ScanPoint>> {
    grating.validate()?;
    if well_index == 0 {
        return Err(Error::Config("well index is 1-based".into()));
    }
    let tensor = dumbbell_polarizability(geom)?;
    let lambda = beam_params.wavelength;
    let z_s = grating.z_position;
    // Nominal well center (2N-1) lambda/4 below the surface; search half a
    // period around it.
    let d_nominal = (2.0 * well_index as f64 - 1.0) * lambda / 4.0;
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let u_at = |z: f64| grating_potential(geom, &tensor, beam_params, grating, x, [0.0, 0.0, z]);
        let z_lo = z_s - d_nominal - 0.2 * lambda;
        let z_hi = z_s - d_nominal + 0.2 * lambda;
        // Bracket the local minimum on a coarse grid first.
        let n_scan = 64;
        let mut best = (z_lo, f64::MAX);
        for i in 0..=n_scan {
            let z = z_lo + (z_hi - z_lo) * i as f64 / n_scan as f64;
            let u = u_at(z)?;
            if u < best.1 {
                best = (z, u);
            }
        }
        if best.0 <= z_lo || best.0 >= z_hi {
            return Err(Error::NoWellFound(z_lo, z_hi));
        }
        let dz = (z_hi - z_lo) / n_scan as f64;
        let z_eq = golden_min(&u_at, best.0 - dz, best.0 + dz)?;

        // Transverse curvature by Richardson central differences.
        let h = 1e-9;
        let u_x = |dx: f64| {
            grating_potential(geom, &tensor, beam_params, grating, x, [dx, 0.0, z_eq])
        };
        let (um2, um1, u0, up1, up2) = (u_x(-2.0 * h)?, u_x(-h)?, u_x(0.0)?, u_x(h)?, u_x(2.0 * h)?);
        let k_x = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * h * h);
        if k_x <= 0.0 {
            return Err(Error::UnstableWell {
                axis: "x",
                curvature: k_x,
            });
        }
        let f_x = (k_x / geom.mass()).sqrt() / (2.0 * std::f64::consts::PI);
        out.push(ScanPoint {
            x,
            f_x,
            well_d: z_s - z_eq,
        });
    }
    Ok(out)
}

fn golden_min<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Surface under the rotating dumbbell in Fig-3F-style rotation curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationSurface {
    FreeSpace,
    Sapphire,
    Grating,
}

/// Calibration point pinning the drive torque of one surface curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RotationCalibration {
    pub surface: RotationSurface,
    pub p_cal_torr: f64,
    pub f_cal_hz: f64,
}

impl RotationCalibration {
    /// Paper anchors: sapphire 1.6 GHz at 5.9e-5 Torr, grating 175 MHz at
    /// 1.0e-3 Torr; free space scaled down from sapphire by the
    /// first-well intensity enhancement (weakest drive).
    pub fn defaults() -> Vec<Self> {
        vec![
            Self {
                surface: RotationSurface::FreeSpace,
                p_cal_torr: 5.9e-5,
                f_cal_hz: 1.0e9,
            },
            Self {
                surface: RotationSurface::Sapphire,
                p_cal_torr: 5.9e-5,
                f_cal_hz: 1.6e9,
            },
            Self {
                surface: RotationSurface::Grating,
                p_cal_torr: 1.0e-3,
                f_cal_hz: 175e6,
            },
        ]
    }
}

/// f_rot(P) for one surface: the drive torque M_o is pinned at the
/// calibration point via M_o = 2 pi I gamma(P_cal) f_cal, and the rotation
/// follows the drive/damping balance f = M_o / (2 pi I gamma(P)). Since
/// gamma is exactly linear in P, f_rot is proportional to 1/P.
pub fn rotation_curve(
    cal: &RotationCalibration,
    env_template: &crate::gas::Environment,
    geom: &DumbbellGeom,
    pressures_torr: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let inertia = geom.moment_of_inertia();
    let gamma_at = |p: f64| -> Result<f64> {
        let env = crate::gas::Environment {
            pressure_torr: p,
            ..*env_template
        };
        Ok(crate::gas::rotational_damping(&env, geom)?.0)
    };
    let m_o = 2.0 * std::f64::consts::PI * inertia * gamma_at(cal.p_cal_torr)? * cal.f_cal_hz;
    pressures_torr
        .iter()
        .map(|&p| {
            let f = m_o / (2.0 * std::f64::consts::PI * inertia * gamma_at(p)?);
            Ok((p, f))
        })
        .collect()
}
