//! Stochastic time-domain simulation of the trapped rotor.
//!
//! Underdamped Langevin dynamics (BAOAB splitting) for the center of mass
//! and the dumbbell axis. Rotation is treated in two tiers: the full
//! stochastic rigid-axis integration covers torsional/CoM physics up to
//! ~MHz, while GHz driven rotation uses the closed-form drive/damping
//! balance (time-resolving 1.6 GHz over seconds is infeasible).

use serde::{Deserialize, Serialize};

use crate::beam::{BeamParams, SurfaceSpec};
use crate::constants::{G_EARTH, K_B};
use crate::dumbbell::{dumbbell_polarizability, DumbbellGeom, PolarizabilityTensor};
use crate::error::{Error, Result};
use crate::trap::{self, TrapWell};

/// Instantaneous state of the dumbbell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RotorState {
    /// CoM position, m.
    pub position: [f64; 3],
    /// CoM velocity, m/s.
    pub velocity: [f64; 3],
    /// Orientation of the long axis (unit vector).
    pub axis: [f64; 3],
    /// Angular velocity, rad/s (transverse components rotate the axis; the
    /// component along the beam axis of an in-plane rotor is Omega_rot).
    pub angular_velocity: [f64; 3],
    /// Time, s.
    pub time: f64,
}

impl RotorState {
    pub fn at_rest(position: [f64; 3]) -> Self {
        Self {
            position,
            velocity: [0.0; 3],
            axis: [1.0, 0.0, 0.0],
            angular_velocity: [0.0; 3],
            time: 0.0,
        }
    }

    /// Torsional angle of the axis about the beam axis, rad.
    pub fn theta(&self) -> f64 {
        self.axis[1].atan2(self.axis[0])
    }
}

/// Potential model driving the deterministic forces.
#[derive(Debug, Clone)]
pub enum Potential {
    /// No trap (free particle).
    Free,
    /// Local harmonic approximation of a well: per-axis stiffness, N/m,
    /// torsional stiffness, N m/rad, about `center`.
    Harmonic {
        k: [f64; 3],
        k_theta: f64,
        center: [f64; 3],
    },
    /// Full optical potential; forces by central differences.
    Optical {
        beam: BeamParams,
        surface: SurfaceSpec,
        tensor: PolarizabilityTensor,
    },
}

impl Potential {
    /// Harmonic model matching a computed trap well.
    pub fn from_well(well: &TrapWell, geom: &DumbbellGeom) -> Self {
        let m = geom.mass();
        let i = geom.moment_of_inertia();
        let w = |f: f64| (2.0 * std::f64::consts::PI * f).powi(2);
        Potential::Harmonic {
            k: [w(well.f_x) * m, w(well.f_y) * m, w(well.f_z) * m],
            k_theta: w(well.f_torsion) * i,
            center: [0.0, 0.0, well.z_equilibrium],
        }
    }
}

/// Which force/torque channels are active.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ForceFlags {
    pub optical: bool,
    pub gravity: bool,
    /// Constant drive torque about the beam axis, N m (circular
    /// polarization), if any.
    pub drive_torque: Option<f64>,
    pub thermal_noise: bool,
}

impl Default for ForceFlags {
    fn default() -> Self {
        Self {
            optical: true,
            gravity: false,
            drive_torque: None,
            thermal_noise: true,
        }
    }
}

/// Full simulation configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub dt: f64,
    pub n_steps: u64,
    pub seed: u64,
    /// Record every `stride`-th step.
    pub stride: u64,
    pub forces: ForceFlags,
    pub temperature: f64,
    /// CoM damping rates per lab axis, 1/s.
    pub gamma_com: [f64; 3],
    /// Rotational damping rate, 1/s.
    pub gamma_rot: f64,
    pub geom: DumbbellGeom,
    pub potential: Potential,
    /// Simulation box half-widths (transverse, axial), m; escape is an error.
    pub box_half: [f64; 3],
    /// Box center (usually the well equilibrium), m.
    pub box_center: [f64; 3],
    /// Embedded in TimeSeries metadata.
    pub config_hash: String,
}

impl SimConfig {
    /// Stiffest enabled frequency must satisfy dt <= 1/(50 f_max).
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.n_steps == 0 || self.stride == 0 {
            return Err(Error::Config("dt, n_steps and stride must be positive".into()));
        }
        let f_max = match &self.potential {
            Potential::Free => 0.0,
            Potential::Harmonic { k, k_theta, .. } => {
                let m = self.geom.mass();
                let i = self.geom.moment_of_inertia();
                let f = k
                    .iter()
                    .map(|k| (k / m).sqrt())
                    .fold(0.0f64, f64::max)
                    .max((k_theta / i).sqrt());
                f / (2.0 * std::f64::consts::PI)
            }
            Potential::Optical { .. } => 1e6, // conservative bound for MHz-scale traps
        };
        if f_max > 0.0 && self.dt > 1.0 / (50.0 * f_max) {
            return Err(Error::Config(format!(
                "dt = {:.3e} s too large for f_max = {:.3e} Hz (need dt <= {:.3e})",
                self.dt,
                f_max,
                1.0 / (50.0 * f_max)
            )));
        }
        Ok(())
    }
}

/// Recorded trajectory channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeSeries {
    /// Sample spacing (dt * stride), s.
    pub dt: f64,
    pub names: Vec<String>,
    pub channels: Vec<Vec<f64>>,
    pub seed: u64,
    pub config_hash: String,
}

impl TimeSeries {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.channels[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Counter-based Gaussian noise keyed by (seed, step, channel): identical
/// trajectories regardless of scheduling or batch order.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn gaussian(seed: u64, step: u64, channel: u64) -> f64 {
    let key = splitmix64(seed ^ splitmix64(step.wrapping_mul(0x2545f4914f6cdd1d) ^ channel));
    let a = splitmix64(key);
    let b = splitmix64(a);
    let u1 = ((a >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    let u2 = (b >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Deterministic force and torque at a state.
fn force_torque(cfg: &SimConfig, s: &RotorState) -> Result<([f64; 3], [f64; 3])> {
    let mut f = [0.0; 3];
    let mut m = [0.0; 3];
    if cfg.forces.optical {
        match &cfg.potential {
            Potential::Free => {}
            Potential::Harmonic { k, k_theta, center } => {
                for a in 0..3 {
                    f[a] -= k[a] * (s.position[a] - center[a]);
                }
                // Restoring torque aligning the axis with x:
                // U = 1/2 k_theta sin^2(angle to x) => M = -k_theta (u.x)(u x x).
                let ex = [1.0, 0.0, 0.0];
                let c = dot(s.axis, ex);
                let uxe = cross(s.axis, ex);
                for a in 0..3 {
                    m[a] += k_theta * c * uxe[a];
                }
            }
            Potential::Optical {
                beam,
                surface,
                tensor,
            } => {
                let h = 2e-10;
                let u_at = |p: [f64; 3]| {
                    trap::potential(
                        &cfg.geom,
                        tensor,
                        beam,
                        surface,
                        &trap::Pose {
                            position: p,
                            axis: s.axis,
                        },
                    )
                };
                for a in 0..3 {
                    let mut pp = s.position;
                    let mut pm = s.position;
                    pp[a] += h;
                    pm[a] -= h;
                    f[a] -= (u_at(pp)? - u_at(pm)?) / (2.0 * h);
                }
                // Torque by virtual rotation of the axis about each lab axis.
                let ha = 1e-5;
                for a in 0..3 {
                    let mut e = [0.0; 3];
                    e[a] = 1.0;
                    let rot = |sgn: f64| {
                        let d = cross(e, s.axis);
                        let ax = [
                            s.axis[0] + sgn * ha * d[0],
                            s.axis[1] + sgn * ha * d[1],
                            s.axis[2] + sgn * ha * d[2],
                        ];
                        let n = dot(ax, ax).sqrt();
                        [ax[0] / n, ax[1] / n, ax[2] / n]
                    };
                    let pose = |axis: [f64; 3]| trap::Pose {
                        position: s.position,
                        axis,
                    };
                    let up = trap::potential(&cfg.geom, tensor, beam, surface, &pose(rot(1.0)))?;
                    let um = trap::potential(&cfg.geom, tensor, beam, surface, &pose(rot(-1.0)))?;
                    m[a] -= (up - um) / (2.0 * ha);
                }
            }
        }
    }
    if cfg.forces.gravity {
        f[2] -= cfg.geom.mass() * G_EARTH;
    }
    if let Some(m_o) = cfg.forces.drive_torque {
        m[2] += m_o;
    }
    Ok((f, m))
}

/// One BAOAB step of underdamped Langevin dynamics for CoM and axis.
pub fn step(cfg: &SimConfig, state: &RotorState, step_index: u64) -> Result<RotorState> {
    let mut s = *state;
    let m = cfg.geom.mass();
    let inertia = cfg.geom.moment_of_inertia();
    let dt = cfg.dt;

    let kick = |s: &mut RotorState, f: [f64; 3], tq: [f64; 3]| {
        for a in 0..3 {
            s.velocity[a] += f[a] / m * dt / 2.0;
            s.angular_velocity[a] += tq[a] / inertia * dt / 2.0;
        }
    };
    let drift = |s: &mut RotorState| {
        for a in 0..3 {
            s.position[a] += s.velocity[a] * dt / 2.0;
        }
        // Axis rotation: u += (omega x u) dt/2, renormalized.
        let du = cross(s.angular_velocity, s.axis);
        for a in 0..3 {
            s.axis[a] += du[a] * dt / 2.0;
        }
        let n = dot(s.axis, s.axis).sqrt();
        for a in 0..3 {
            s.axis[a] /= n;
        }
    };

    let (f, tq) = force_torque(cfg, &s)?;
    kick(&mut s, f, tq);
    drift(&mut s);

    // O: exact Ornstein-Uhlenbeck update, fluctuation-dissipation pairing.
    for a in 0..3 {
        let g = cfg.gamma_com[a];
        let c1 = (-g * dt).exp();
        s.velocity[a] *= c1;
        if cfg.forces.thermal_noise && g > 0.0 {
            let sigma = ((1.0 - c1 * c1) * K_B * cfg.temperature / m).sqrt();
            s.velocity[a] += sigma * gaussian(cfg.seed, step_index, a as u64);
        }
    }
    let c1r = (-cfg.gamma_rot * dt).exp();
    for a in 0..3 {
        s.angular_velocity[a] *= c1r;
        if cfg.forces.thermal_noise && cfg.gamma_rot > 0.0 {
            let sigma = ((1.0 - c1r * c1r) * K_B * cfg.temperature / inertia).sqrt();
            s.angular_velocity[a] += sigma * gaussian(cfg.seed, step_index, 3 + a as u64);
        }
    }

    drift(&mut s);
    let (f, tq) = force_torque(cfg, &s)?;
    kick(&mut s, f, tq);
    s.time += dt;

    for a in 0..3 {
        if !s.position[a].is_finite() || !s.velocity[a].is_finite() || !s.axis[a].is_finite() {
            return Err(Error::NonFinite(step_index));
        }
        let excursion = (s.position[a] - cfg.box_center[a]).abs();
        if excursion > cfg.box_half[a] {
            return Err(Error::ParticleLost {
                step: step_index,
                axis: ["x", "y", "z"][a],
                value: excursion,
            });
        }
    }
    Ok(s)
}

/// Run the simulation, recording every `stride`-th step.
pub fn simulate(cfg: &SimConfig, initial: RotorState) -> Result<TimeSeries> {
    cfg.validate()?;
    let n_rec = (cfg.n_steps / cfg.stride) as usize;
    let names: Vec<String> = ["t", "x", "y", "z", "theta", "omega_z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut channels: Vec<Vec<f64>> = names.iter().map(|_| Vec::with_capacity(n_rec)).collect();

    let mut s = initial;
    for i in 0..cfg.n_steps {
        s = step(cfg, &s, i)?;
        if (i + 1) % cfg.stride == 0 {
            channels[0].push(s.time);
            channels[1].push(s.position[0]);
            channels[2].push(s.position[1]);
            channels[3].push(s.position[2]);
            channels[4].push(s.theta());
            channels[5].push(s.angular_velocity[2]);
        }
    }
    Ok(TimeSeries {
        dt: cfg.dt * cfg.stride as f64,
        names,
        channels,
        seed: cfg.seed,
        config_hash: cfg.config_hash.clone(),
    })
}

/// Steady-state rotation under drive torque M_o and friction -I gamma Omega.
pub fn steady_state_rotation(m_o: f64, inertia: f64, gamma: f64) -> f64 {
    m_o / (inertia * gamma)
}

/// Ring-up: Omega(t) = Omega_ss (1 - e^{-gamma t}).
pub fn ring_up(m_o: f64, inertia: f64, gamma: f64, t: &[f64]) -> Vec<f64> {
    let ss = steady_state_rotation(m_o, inertia, gamma);
    t.iter().map(|&t| ss * (1.0 - (-gamma * t).exp())).collect()
}

/// Ring-down from Omega_0: Omega(t) = Omega_0 e^{-gamma t}.
pub fn ring_down(omega0: f64, gamma: f64, t: &[f64]) -> Vec<f64> {
    t.iter().map(|&t| omega0 * (-gamma * t).exp()).collect()
}

/// Fit (Omega_ss, tau) of a ring-up record by least squares: for each tau
/// the optimal amplitude is linear, so only tau needs a 1-D search.
pub fn fit_ring_up(t: &[f64], omega: &[f64]) -> Result<(f64, f64)> {
    if t.len() < 3 || t.len() != omega.len() {
        return Err(Error::TooShort {
            have: t.len().min(omega.len()),
            need: 3,
        });
    }
    let span = t[t.len() - 1] - t[0];
    let sse = |tau: f64| {
        let mut sf2 = 0.0;
        let mut syf = 0.0;
        for (&t, &y) in t.iter().zip(omega) {
            let f = 1.0 - (-t / tau).exp();
            sf2 += f * f;
            syf += y * f;
        }
        let amp = if sf2 > 0.0 { syf / sf2 } else { 0.0 };
        let e: f64 = t
            .iter()
            .zip(omega)
            .map(|(&t, &y)| {
                let r = y - amp * (1.0 - (-t / tau).exp());
                r * r
            })
            .sum();
        (e, amp)
    };
    // Golden-section search on log(tau).
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((span / 1e4).ln(), (span * 1e2).ln());
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if sse(c.exp()).0 < sse(d.exp()).0 {
            b = d;
        } else {
            a = c;
        }
    }
    let tau = ((a + b) / 2.0).exp();
    let (_, amp) = sse(tau);
    Ok((amp, tau))
}

/// Linear speed of the dumbbell tip, v = Omega_rot * (L/2).
pub fn tip_speed(geom: &DumbbellGeom, omega_rot: f64) -> f64 {
    omega_rot * geom.half_length()
}

/// Convenience: harmonic SimConfig for a computed well at the given
/// environment, with damping from the gas module (single source of truth).
pub fn well_sim_config(
    well: &TrapWell,
    geom: &DumbbellGeom,
    env: &crate::gas::Environment,
    dt: f64,
    n_steps: u64,
    seed: u64,
) -> Result<SimConfig> {
    let rates = crate::gas::damping_rates(env, geom)?;
    let _ = dumbbell_polarizability(geom)?;
    Ok(SimConfig {
        dt,
        n_steps,
        seed,
        stride: 1,
        forces: ForceFlags::default(),
        temperature: env.temperature,
        gamma_com: rates.per_lab_axis(),
        gamma_rot: rates.gamma_rot,
        geom: *geom,
        potential: Potential::from_well(well, geom),
        box_half: [3e-6, 3e-6, 3.0 * 1550e-9],
        box_center: [0.0, 0.0, well.z_equilibrium],
        config_hash: String::new(),
    })
}
