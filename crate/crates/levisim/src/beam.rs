//! Focused Gaussian beam, surface reflection and the standing-wave field.
//!
//! The trapping beam is a paraxial Gaussian propagating along +z. A planar
//! surface perpendicular to the beam axis partially reflects it; the
//! reflected beam is modeled as the mirror image of the incident beam
//! (image-focus construction), which keeps the surface a fixed phase
//! reference. The superposition forms the partial standing wave whose
//! anti-nodes are the trapping wells.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, EPS_0};
use crate::error::{Error, Result};

/// Trapping-laser description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamParams {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Optical power at the trapping region, W.
    pub power: f64,
    /// 1/e^2 intensity waist radius at the focus, m.
    pub waist_radius: f64,
    /// Focus position in the lab frame, m.
    pub focus_position: [f64; 3],
    /// Unit Jones vector in the transverse (x, y) plane.
    pub polarization: [Complex64; 2],
}

impl BeamParams {
    /// Linearly (x) polarized beam.
    pub fn linear(wavelength: f64, power: f64, waist_radius: f64) -> Self {
        Self {
            wavelength,
            power,
            waist_radius,
            focus_position: [0.0; 3],
            polarization: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    /// Polarization set by a quarter-waveplate angle eta in [0, pi/4]:
    /// eta = 0 is linear along x, eta = pi/4 is circular.
    pub fn with_waveplate(mut self, eta: f64) -> Self {
        self.polarization = [
            Complex64::new(eta.cos(), 0.0),
            Complex64::new(0.0, eta.sin()),
        ];
        self
    }

    pub fn with_focus(mut self, focus: [f64; 3]) -> Self {
        self.focus_position = focus;
        self
    }

    /// Rayleigh range pi w0^2 / lambda, m.
    pub fn rayleigh_range(&self) -> f64 {
        std::f64::consts::PI * self.waist_radius * self.waist_radius / self.wavelength
    }

    /// On-axis peak intensity 2 P / (pi w0^2), W/m^2.
    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.power / (std::f64::consts::PI * self.waist_radius * self.waist_radius)
    }

    /// Wavenumber 2 pi / lambda, 1/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) {
            return Err(Error::InvalidBeam("wavelength must be > 0".into()));
        }
        if !(self.power > 0.0) {
            return Err(Error::InvalidBeam("power must be > 0".into()));
        }
        if self.waist_radius < self.wavelength / std::f64::consts::PI {
            return Err(Error::InvalidBeam(format!(
                "waist {:.3e} m below paraxial focus bound lambda/pi = {:.3e} m",
                self.waist_radius,
                self.wavelength / std::f64::consts::PI
            )));
        }
        let norm2: f64 = self.polarization.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBeam(format!(
                "Jones vector norm^2 = {norm2} differs from 1 by more than 1e-12"
            )));
        }
        Ok(())
    }
}

/// Reflecting-surface material class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    None,
    FlatDielectric,
    FlatMetal,
}

/// Planar surface perpendicular to the beam axis, normal facing -z.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    /// Real part of the refractive index at the trapping wavelength.
    pub n: f64,
    /// Extinction coefficient (imaginary part), >= 0 for a passive material.
    pub kappa: f64,
    /// Plane position along z, m. Vacuum side is z < z_s.
    pub z_position: f64,
}

impl SurfaceSpec {
    pub fn none() -> Self {
        Self {
            kind: SurfaceKind::None,
            n: 1.0,
            kappa: 0.0,
            z_position: 0.0,
        }
    }

    /// Sapphire at 1550 nm (handbook value), surface plane at z_s.
    pub fn sapphire(z_position: f64) -> Self {
        Self {
            kind: SurfaceKind::FlatDielectric,
            n: 1.746,
            kappa: 0.0,
            z_position,
        }
    }

    /// Gold at 1550 nm (handbook value), surface plane at z_s.
    pub fn gold(z_position: f64) -> Self {
        Self {
            kind: SurfaceKind::FlatMetal,
            n: 0.52,
            kappa: 10.7,
            z_position,
        }
    }
}

/// Complex optical field at a query point.
#[derive(Debug, Clone, Copy)]
pub struct ComplexField {
    /// Electric field vector, V/m.
    pub e: [Complex64; 3],
    /// Wavenumber 2 pi / lambda, 1/m.
    pub k: f64,
}

impl ComplexField {
    /// |E|^2, (V/m)^2.
    pub fn e_norm_sqr(&self) -> f64 {
        self.e.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Intensity (c eps0 / 2) |E|^2, W/m^2.
    pub fn intensity(&self) -> f64 {
        0.5 * C_LIGHT * EPS_0 * self.e_norm_sqr()
    }
}

/// Paraxial Gaussian beam field at `point` (lab frame, m).
pub fn focused_field(beam: &BeamParams, point: [f64; 3]) -> Result<ComplexField> {
    beam.validate()?;
    let k = beam.wavenumber();
    let zr = beam.rayleigh_range();
    let x = point[0] - beam.focus_position[0];
    let y = point[1] - beam.focus_position[1];
    let z = point[2] - beam.focus_position[2];
    let rho2 = x * x + y * y;

    let w0 = beam.waist_radius;
    let w = w0 * (1.0 + (z / zr) * (z / zr)).sqrt();
    let gouy = (z / zr).atan();
    // 1/R written as z/(z^2+zr^2) so the on-focus (R -> inf) case is regular.
    let inv_r = z / (z * z + zr * zr);

    let e0 = (2.0 * beam.peak_intensity() / (C_LIGHT * EPS_0)).sqrt();
    let amp = e0 * (w0 / w) * (-rho2 / (w * w)).exp();
    let phase = k * z + 0.5 * k * rho2 * inv_r - gouy;
    let scalar = Complex64::from_polar(amp, phase);

    Ok(ComplexField {
        e: [
            scalar * beam.polarization[0],
            scalar * beam.polarization[1],
            Complex64::new(0.0, 0.0),
        ],
        k,
    })
}

/// Normal-incidence amplitude reflection coefficient r = (1 - n~)/(1 + n~).
pub fn fresnel_reflection(surface: &SurfaceSpec, _wavelength: f64) -> Result<Complex64> {
    if surface.kind == SurfaceKind::None {
        return Err(Error::NoSurface);
    }
    let n = Complex64::new(surface.n, surface.kappa);
    let one = Complex64::new(1.0, 0.0);
    Ok((one - n) / (one + n))
}

/// Incident plus surface-reflected field. The reflected beam is the mirror
/// image of the incident beam about the surface plane, scaled by r.
pub fn total_field(
    beam: &BeamParams,
    surface: &SurfaceSpec,
    point: [f64; 3],
) -> Result<ComplexField> {
    let incident = focused_field(beam, point)?;
    if surface.kind == SurfaceKind::None {
        return Ok(incident);
    }
    let r = fresnel_reflection(surface, beam.wavelength)?;
    let mirror = [point[0], point[1], 2.0 * surface.z_position - point[2]];
    let image = focused_field(beam, mirror)?;
    Ok(ComplexField {
        e: [
            incident.e[0] + r * image.e[0],
            incident.e[1] + r * image.e[1],
            Complex64::new(0.0, 0.0),
        ],
        k: incident.k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn beam_1um() -> BeamParams {
        BeamParams::linear(1550e-9, 0.2, 1.0e-6)
    }

    /// Plane-wave-limit stand-in: waist large enough that envelope and Gouy
    /// effects are negligible over a few microns.
    fn beam_plane_wave() -> BeamParams {
        BeamParams::linear(1550e-9, 0.2, 1.0e-3)
    }

    #[test]
    fn peak_intensity_at_focus() {
        let b = beam_1um();
        let f = focused_field(&b, [0.0, 0.0, 0.0]).unwrap();
        // 2 * 0.2 / (pi * 1e-12) ~ 1.273e11 W/m^2
        assert_relative_eq!(f.intensity(), 0.4 / (std::f64::consts::PI * 1e-12), max_relative = 1e-12);
        assert_relative_eq!(f.intensity(), 1.2732e11, max_relative = 1e-4);
    }

    #[test]
    fn transverse_gaussian_profile() {
        let b = beam_1um();
        let i0 = focused_field(&b, [0.0, 0.0, 0.0]).unwrap().intensity();
        let iw = focused_field(&b, [b.waist_radius, 0.0, 0.0]).unwrap().intensity();
        assert_relative_eq!(iw / i0, (-2.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn half_intensity_at_rayleigh_range() {
        // w(z_R) = w0 sqrt(2), so on-axis intensity falls to I0/2.
        let b = beam_1um();
        let i0 = focused_field(&b, [0.0, 0.0, 0.0]).unwrap().intensity();
        let izr = focused_field(&b, [0.0, 0.0, b.rayleigh_range()]).unwrap().intensity();
        assert_relative_eq!(izr / i0, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn invalid_waist_rejected() {
        let b = BeamParams::linear(1550e-9, 0.2, 1e-7);
        assert!(matches!(focused_field(&b, [0.0; 3]), Err(Error::InvalidBeam(_))));
    }

    #[test]
    fn sapphire_reflection_coefficient() {
        let s = SurfaceSpec::sapphire(0.0);
        let r = fresnel_reflection(&s, 1550e-9).unwrap();
        // (1 - 1.746)/(1 + 1.746) = -0.27167
        assert_relative_eq!(r.re, -0.746 / 2.746, max_relative = 1e-12);
        assert_abs_diff_eq!(r.im, 0.0);
        assert_relative_eq!(r.norm_sqr(), 0.0738, max_relative = 2e-3);
    }

    #[test]
    fn vacuum_and_mirror_limits() {
        let vacuum = SurfaceSpec {
            kind: SurfaceKind::FlatDielectric,
            n: 1.0,
            kappa: 0.0,
            z_position: 0.0,
        };
        assert_abs_diff_eq!(fresnel_reflection(&vacuum, 1550e-9).unwrap().norm(), 0.0);

        let mirror = SurfaceSpec {
            kind: SurfaceKind::FlatMetal,
            n: 1e9,
            kappa: 0.0,
            z_position: 0.0,
        };
        assert_relative_eq!(fresnel_reflection(&mirror, 1550e-9).unwrap().re, -1.0, max_relative = 1e-8);
    }

    #[test]
    fn no_surface_has_no_reflection() {
        assert!(matches!(
            fresnel_reflection(&SurfaceSpec::none(), 1550e-9),
            Err(Error::NoSurface)
        ));
        let b = beam_1um();
        let p = [0.3e-6, -0.1e-6, -0.7e-6];
        let inc = focused_field(&b, p).unwrap();
        let tot = total_field(&b, &SurfaceSpec::none(), p).unwrap();
        assert_abs_diff_eq!(inc.e_norm_sqr(), tot.e_norm_sqr());
    }

    #[test]
    fn plane_wave_antinodes_at_quarter_wave_spacing() {
        // Intensity maxima at d = (2N-1) lambda / 4 from the surface.
        let b = beam_plane_wave();
        let s = SurfaceSpec::sapphire(0.0);
        let lambda = b.wavelength;
        for n in 1..=3u32 {
            let d_expect = (2.0 * n as f64 - 1.0) * lambda / 4.0;
            // Scan +-5 nm around the prediction at 0.01 nm steps.
            let mut best = (0.0, f64::MIN);
            let mut d = d_expect - 5e-9;
            while d <= d_expect + 5e-9 {
                let i = total_field(&b, &s, [0.0, 0.0, -d]).unwrap().intensity();
                if i > best.1 {
                    best = (d, i);
                }
                d += 1e-11;
            }
            assert!(
                (best.0 - d_expect).abs() < 1e-9,
                "anti-node {n} at {:.3} nm, expected {:.3} nm",
                best.0 * 1e9,
                d_expect * 1e9
            );
        }
    }

    #[test]
    fn perfect_mirror_node_at_surface() {
        let b = beam_plane_wave();
        let s = SurfaceSpec {
            kind: SurfaceKind::FlatMetal,
            n: 1e9,
            kappa: 0.0,
            z_position: 0.0,
        };
        let at_surface = total_field(&b, &s, [0.0, 0.0, 0.0]).unwrap().intensity();
        let peak = total_field(&b, &s, [0.0, 0.0, -b.wavelength / 4.0]).unwrap().intensity();
        assert!(at_surface < 1e-10 * peak);
    }

    #[test]
    fn antinode_positions_independent_of_power_and_polarization() {
        let s = SurfaceSpec::sapphire(0.0);
        let find_first = |beam: &BeamParams| {
            let mut best = (0.0, f64::MIN);
            let mut d = 300e-9;
            while d <= 500e-9 {
                let i = total_field(beam, &s, [0.0, 0.0, -d]).unwrap().intensity();
                if i > best.1 {
                    best = (d, i);
                }
                d += 1e-11;
            }
            best.0
        };
        let d1 = find_first(&beam_plane_wave());
        let mut b2 = beam_plane_wave();
        b2.power = 0.731;
        let d2 = find_first(&b2.with_waveplate(std::f64::consts::FRAC_PI_4));
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-11);
    }

    #[test]
    fn standing_wave_contrast() {
        // (I_max - I_min)/(I_max + I_min) = 2|r|/(1+|r|^2) in the plane-wave limit.
        let b = beam_plane_wave();
        let s = SurfaceSpec::sapphire(0.0);
        let r = fresnel_reflection(&s, b.wavelength).unwrap().norm();
        let mut i_max = f64::MIN;
        let mut i_min = f64::MAX;
        let mut d = 200e-9;
        while d <= 1000e-9 {
            let i = total_field(&b, &s, [0.0, 0.0, -d]).unwrap().intensity();
            i_max = i_max.max(i);
            i_min = i_min.min(i);
            d += 1e-11;
        }
        let contrast = (i_max - i_min) / (i_max + i_min);
        assert_relative_eq!(contrast, 2.0 * r / (1.0 + r * r), max_relative = 1e-6);
    }

    #[test]
    fn energy_bound() {
        let b = beam_1um();
        let s = SurfaceSpec::sapphire(0.0);
        let r = fresnel_reflection(&s, b.wavelength).unwrap().norm();
        let cap = (1.0 + r) * (1.0 + r) * b.peak_intensity();
        for iz in 0..400 {
            let z = -2e-6 * iz as f64 / 400.0;
            let i = total_field(&b, &s, [0.0, 0.0, z]).unwrap().intensity();
            assert!(i <= cap * (1.0 + 1e-12));
        }
    }

    #[test]
    fn field_is_smooth() {
        // Finite-difference continuity check at 1 nm steps.
        let b = beam_1um();
        let s = SurfaceSpec::sapphire(0.0);
        let mut prev = total_field(&b, &s, [1e-7, 0.0, -2.1e-6]).unwrap().intensity();
        let scale = b.peak_intensity();
        for i in 1..2000 {
            let z = -2.1e-6 + 1e-9 * i as f64;
            let cur = total_field(&b, &s, [1e-7, 0.0, z]).unwrap().intensity();
            assert!((cur - prev).abs() < 0.05 * scale, "jump at z = {z}");
            prev = cur;
        }
    }
}
