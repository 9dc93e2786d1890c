//! Flat INI-style run configuration.
//!
//! Sections `[beam]`, `[surface]`, `[particle]`, `[environment]`, `[sim]`,
//! `[grating]`, `[casimir]`; each a flat `key = value` block. Unknown
//! sections or keys are rejected with the offending line number. Defaults
//! reproduce the headline scenario: 144 nm silica dumbbell, 1550 nm /
//! 200 mW beam with the waist calibrated to a 35 kHz free-space axial
//! frequency, sapphire surface.
//!
//! The resolved configuration is canonically serialized and hashed; the
//! hash is embedded in every output file so results are traceable to the
//! exact parameters that produced them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beam::{BeamParams, SurfaceKind, SurfaceSpec};
use crate::casimir::CasimirConfig;
use crate::dumbbell::DumbbellGeom;
use crate::error::{Error, Result};
use crate::gas::Environment;
use crate::grating::GratingSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamSection {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Power at the trap, W.
    pub power: f64,
    /// 1/e^2 waist radius, m; 0 = calibrate to `calibrate_fz`.
    pub waist_radius: f64,
    /// Free-space axial frequency target for waist calibration, Hz.
    pub calibrate_fz: f64,
    /// Quarter-waveplate angle, degrees: 0 linear, 45 circular.
    pub waveplate_deg: f64,
    /// Focus z in the lab frame, m.
    pub focus_z: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceSection {
    /// One of none | sapphire | gold.
    pub kind: String,
    /// Surface plane position, m.
    pub z_position: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimSection {
    pub dt: f64,
    pub n_steps: u64,
    pub seed: u64,
    pub stride: u64,
    /// Standing-wave well to simulate in (1 = closest to surface).
    pub well_index: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GratingSection {
    pub period: f64,
    pub stripe_width: f64,
    /// Scan sample count over two periods.
    pub scan_points: u32,
    pub well_index: u32,
}

/// Resolved run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub beam: BeamSection,
    pub surface: SurfaceSection,
    pub particle: DumbbellGeom,
    pub environment: Environment,
    pub sim: SimSection,
    pub grating: GratingSection,
    pub casimir: CasimirConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            beam: BeamSection {
                wavelength: 1550e-9,
                power: 0.2,
                waist_radius: 0.0,
                calibrate_fz: 35e3,
                waveplate_deg: 0.0,
                focus_z: 0.0,
            },
            surface: SurfaceSection {
                kind: "sapphire".into(),
                z_position: 0.0,
            },
            particle: DumbbellGeom::default(),
            environment: Environment::default(),
            sim: SimSection {
                dt: 1e-8,
                n_steps: 400_000,
                seed: 1,
                stride: 8,
                well_index: 1,
            },
            grating: GratingSection {
                period: 600e-9,
                stripe_width: 300e-9,
                scan_points: 48,
                well_index: 1,
            },
            casimir: CasimirConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parse INI text over the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {lineno}: unterminated section header")))?
                    .trim();
                if !matches!(
                    name,
                    "beam" | "surface" | "particle" | "environment" | "sim" | "grating" | "casimir"
                ) {
                    return Err(Error::Config(format!(
                        "line {lineno}: unknown section [{name}]"
                    )));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {lineno}: expected 'key = value', got '{line}'"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "line {lineno}: key '{key}' outside any section"
                )));
            }
            cfg.apply(&section, key, value, lineno)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str, lineno: usize) -> Result<()> {
        let f = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| {
                Error::Config(format!("line {lineno}: '{v}' is not a number for key '{key}'"))
            })
        };
        let u = |v: &str| -> Result<u64> {
            v.parse::<u64>().map_err(|_| {
                Error::Config(format!(
                    "line {lineno}: '{v}' is not an unsigned integer for key '{key}'"
                ))
            })
        };
        let unknown = || {
            Err(Error::Config(format!(
                "line {lineno}: unknown key '{key}' in [{section}]"
            )))
        };
        match section {
            "beam" => match key {
                "wavelength" => self.beam.wavelength = f(value)?,
                "power" => self.beam.power = f(value)?,
                "waist_radius" => self.beam.waist_radius = f(value)?,
                "calibrate_fz" => self.beam.calibrate_fz = f(value)?,
                "waveplate_deg" => self.beam.waveplate_deg = f(value)?,
                "focus_z" => self.beam.focus_z = f(value)?,
                _ => return unknown(),
            },
            "surface" => match key {
                "kind" => {
                    if !matches!(value, "none" | "sapphire" | "gold") {
                        return Err(Error::Config(format!(
                            "line {lineno}: surface kind '{value}' not in none|sapphire|gold"
                        )));
                    }
                    self.surface.kind = value.to_string();
                }
                "z_position" => self.surface.z_position = f(value)?,
                _ => return unknown(),
            },
            "particle" => match key {
                "sphere_diameter" => self.particle.sphere_diameter = f(value)?,
                "density" => self.particle.density = f(value)?,
                "permittivity" => self.particle.permittivity = f(value)?,
                _ => return unknown(),
            },
            "environment" => match key {
                "pressure_torr" => self.environment.pressure_torr = f(value)?,
                "temperature" => self.environment.temperature = f(value)?,
                "gas_mass" => self.environment.gas_mass = f(value)?,
                "accommodation" => self.environment.accommodation = f(value)?,
                _ => return unknown(),
            },
            "sim" => match key {
                "dt" => self.sim.dt = f(value)?,
                "n_steps" => self.sim.n_steps = u(value)?,
                "seed" => self.sim.seed = u(value)?,
                "stride" => self.sim.stride = u(value)?,
                "well_index" => self.sim.well_index = u(value)? as u32,
                _ => return unknown(),
            },
            "grating" => match key {
                "period" => self.grating.period = f(value)?,
                "stripe_width" => self.grating.stripe_width = f(value)?,
                "scan_points" => self.grating.scan_points = u(value)? as u32,
                "well_index" => self.grating.well_index = u(value)? as u32,
                _ => return unknown(),
            },
            "casimir" => match key {
                "separation" => self.casimir.separation = f(value)?,
                "theta_deg" => self.casimir.theta_deg = f(value)?,
                "stripe_width" => self.casimir.stripe_width = f(value)?,
                "period" => self.casimir.period = f(value)?,
                "stripe_thickness" => self.casimir.stripe_thickness = f(value)?,
                "n_periods" => self.casimir.n_periods = u(value)? as usize,
                "mesh_sphere" => self.casimir.mesh_sphere = u(value)? as usize,
                "mesh_cell" => self.casimir.mesh_cell = u(value)? as usize,
                "y_half_length" => self.casimir.y_half_length = f(value)?,
                _ => return unknown(),
            },
            _ => unreachable!("section validated at header"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.sim.well_index == 0 || self.grating.well_index == 0 {
            return Err(Error::Config("well_index is 1-based".into()));
        }
        if self.grating.scan_points < 4 {
            return Err(Error::Config("grating scan needs at least 4 points".into()));
        }
        self.environment.validate()?;
        Ok(())
    }

    /// Beam with the waist either explicit or calibrated so the free-space
    /// axial frequency equals `calibrate_fz`.
    pub fn beam_params(&self) -> Result<BeamParams> {
        let w0 = if self.beam.waist_radius > 0.0 {
            self.beam.waist_radius
        } else {
            crate::trap::calibrate_waist(
                self.beam.wavelength,
                self.beam.power,
                &self.particle,
                self.beam.calibrate_fz,
            )?
        };
        let b = BeamParams::linear(self.beam.wavelength, self.beam.power, w0)
            .with_waveplate(self.beam.waveplate_deg.to_radians())
            .with_focus([0.0, 0.0, self.beam.focus_z]);
        b.validate()?;
        Ok(b)
    }

    pub fn surface_spec(&self) -> SurfaceSpec {
        let mut s = match self.surface.kind.as_str() {
            "none" => SurfaceSpec::none(),
            "gold" => SurfaceSpec::gold(0.0),
            _ => SurfaceSpec::sapphire(0.0),
        };
        if s.kind != SurfaceKind::None {
            s.z_position = self.surface.z_position;
        }
        s
    }

    pub fn grating_spec(&self) -> GratingSpec {
        let mut g = GratingSpec::gold_on_sapphire(self.surface.z_position);
        g.period = self.grating.period;
        g.stripe_width = self.grating.stripe_width;
        g
    }

    /// Hex SHA-256 of the canonical (JSON) serialization of the resolved
    /// configuration.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut s = String::with_capacity(16);
        for b in &digest[..8] {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_defaults() {
        let parsed = RunConfig::parse("").unwrap();
        let defaults = RunConfig::default();
        assert_eq!(parsed.content_hash(), defaults.content_hash());
        assert_eq!(parsed.beam.wavelength, 1550e-9);
        assert_eq!(parsed.beam.power, 0.2);
        assert_eq!(parsed.particle.sphere_diameter, 144e-9);
        assert_eq!(parsed.surface.kind, "sapphire");
    }

    #[test]
    fn parses_sections_and_overrides() {
        let text = "\n# comment\n[environment]\npressure_torr = 1e-3\n\n[beam]\npower = 0.5\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.environment.pressure_torr, 1e-3);
        assert_eq!(cfg.beam.power, 0.5);
        // Untouched keys keep their defaults.
        assert_eq!(cfg.environment.temperature, 300.0);
        assert_ne!(cfg.content_hash(), RunConfig::default().content_hash());
    }

    #[test]
    fn unknown_key_rejected_with_line_number() {
        let err = RunConfig::parse("[beam]\nwavelength = 1e-6\nfrobnicate = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("frobnicate"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_section_rejected() {
        let err = RunConfig::parse("[warp_drive]\nx = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn malformed_line_rejected() {
        let err = RunConfig::parse("[beam]\nno_equals_here\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = RunConfig::parse("[beam]\npower = not_a_number\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn key_outside_section_rejected() {
        let err = RunConfig::parse("power = 0.2\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn hash_is_deterministic_and_sensitive() {
        let a = RunConfig::parse("[sim]\nseed = 7\n").unwrap();
        let b = RunConfig::parse("[sim]\nseed = 7\n").unwrap();
        let c = RunConfig::parse("[sim]\nseed = 8\n").unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), c.content_hash());
        assert_eq!(a.content_hash().len(), 16);
    }

    #[test]
    fn surface_kinds_map() {
        let g = RunConfig::parse("[surface]\nkind = gold\nz_position = 1e-6\n").unwrap();
        assert_eq!(g.surface_spec().kind, SurfaceKind::FlatMetal);
        assert_eq!(g.surface_spec().z_position, 1e-6);
        let n = RunConfig::parse("[surface]\nkind = none\n").unwrap();
        assert_eq!(n.surface_spec().kind, SurfaceKind::None);
        assert!(RunConfig::parse("[surface]\nkind = teflon\n").is_err());
    }
}
