//! Free-molecular gas damping of center-of-mass and rotational motion.
//!
//! All rates come from linearized kinetic theory for a body moving slowly
//! through a Maxwellian gas. Molecules hit the body ballistically (the mean
//! free path is much larger than the particle at the pressures of
//! interest), are absorbed, and are re-emitted diffusely at the wall
//! temperature; the specular limit keeps only normal momentum exchange.
//!
//! Two quadratures are used:
//! * translation: an integral over incidence directions using the exact
//!   first-hit silhouette of the two-sphere body (this is what produces the
//!   perpendicular/parallel damping anisotropy of the dumbbell);
//! * rotation: a surface-element integral with the linearized plate
//!   coefficients, with each element moving at its local rigid-body
//!   velocity.

use serde::{Deserialize, Serialize};

use crate::constants::{torr_to_pa, K_B};
use crate::dumbbell::DumbbellGeom;
use crate::error::{Error, Result};

/// Effective hard-sphere collision diameter of air, m (used only for the
/// Knudsen-regime check).
const AIR_COLLISION_DIAMETER: f64 = 3.7e-10;

/// Residual-gas environment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Environment {
    /// Pressure, Torr (the unit every figure uses; converted internally).
    pub pressure_torr: f64,
    /// Gas temperature, K.
    pub temperature: f64,
    /// Molecular mass of the gas, kg (default: air).
    pub gas_mass: f64,
    /// Accommodation coefficient in [0, 1]; 1 = fully diffuse reflection,
    /// 0 = specular.
    pub accommodation: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            pressure_torr: 1.5,
            temperature: 300.0,
            gas_mass: 4.81e-26,
            accommodation: 1.0,
        }
    }
}

impl Environment {
    pub fn with_pressure(pressure_torr: f64) -> Self {
        Self { pressure_torr, ..Self::default() }
    }

    pub fn pressure_pa(&self) -> f64 {
        torr_to_pa(self.pressure_torr)
    }

    /// Mean thermal speed sqrt(8 k_B T / pi m), m/s.
    pub fn mean_speed(&self) -> f64 {
        (8.0 * K_B * self.temperature / (std::f64::consts::PI * self.gas_mass)).sqrt()
    }

    /// Gas mass density, kg/m^3.
    pub fn gas_density(&self) -> f64 {
        self.pressure_pa() * self.gas_mass / (K_B * self.temperature)
    }

    /// Molecular mean free path, m.
    pub fn mean_free_path(&self) -> f64 {
        let d = AIR_COLLISION_DIAMETER;
        K_B * self.temperature
            / (std::f64::consts::SQRT_2 * std::f64::consts::PI * d * d * self.pressure_pa())
    }

    /// Knudsen number for a characteristic length (particle size or
    /// particle-surface separation).
    pub fn knudsen(&self, length: f64) -> f64 {
        self.mean_free_path() / length
    }

    /// Free-molecular validity check; warning-grade.
    pub fn check_free_molecular(&self, length: f64) -> Result<()> {
        let kn = self.knudsen(length);
        if kn < 10.0 {
            return Err(Error::RegimeViolation(kn));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pressure_torr > 0.0) {
            return Err(Error::Config("pressure must be > 0".into()));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Config("temperature must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.accommodation) {
            return Err(Error::Config("accommodation must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Axis-resolved damping rates of the dumbbell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DampingRates {
    /// CoM damping for motion along the dumbbell axis, 1/s.
    pub gamma_com_parallel: f64,
    /// CoM damping for motion perpendicular to the axis, 1/s.
    pub gamma_com_perpendicular: f64,
    /// Rotational damping about a transverse axis, 1/s.
    pub gamma_rot: f64,
    /// Rotational damping time tau = 1/gamma_rot, s.
    pub tau: f64,
}

impl DampingRates {
    pub fn anisotropy(&self) -> f64 {
        self.gamma_com_perpendicular / self.gamma_com_parallel
    }

    /// (Gamma_x, Gamma_y, Gamma_z) for a dumbbell aligned with x.
    pub fn per_lab_axis(&self) -> [f64; 3] {
        [
            self.gamma_com_parallel,
            self.gamma_com_perpendicular,
            self.gamma_com_perpendicular,
        ]
    }
}

/// Epstein sphere drag coefficient: 1 specular, 1 + pi/8 fully diffuse.
fn epstein_coefficient(accommodation: f64) -> f64 {
    1.0 + accommodation * std::f64::consts::PI / 8.0
}

/// CoM damping rate of a single sphere, 1/s.
pub fn sphere_com_damping(env: &Environment, radius: f64, density: f64) -> f64 {
    (8.0 / std::f64::consts::PI) * env.pressure_pa()
        / (density * radius * env.mean_speed())
        * epstein_coefficient(env.accommodation)
}

/// Silhouette quantities of the two-sphere body for rays along `omega`:
/// first-hit projected area A and the integral S of the surface normal over
/// the first-hit silhouette. `cos_theta` is the angle between the ray
/// direction and the body axis. Evaluated by a 2D quadrature over the
/// impact-parameter plane with analytic ray-sphere first-hit tests.
fn silhouette(centers: &[[f64; 3]], radius: f64, cos_theta: f64, n_grid: usize) -> (f64, [f64; 3]) {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    // Body axis along z; ray direction in the x-z plane.
    let omega = [sin_theta, 0.0, cos_theta];
    // Impact-plane basis.
    let e1 = if sin_theta > 1e-12 {
        let n = (cos_theta * cos_theta + sin_theta * sin_theta).sqrt();
        [cos_theta / n, 0.0, -sin_theta / n]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e2 = [0.0, 1.0, 0.0];

    // Bounding box of the projected disks in the (e1, e2) plane.
    let mut lo = [f64::MAX; 2];
    let mut hi = [f64::MIN; 2];
    for c in centers {
        let p1 = c[0] * e1[0] + c[1] * e1[1] + c[2] * e1[2];
        let p2 = c[0] * e2[0] + c[1] * e2[1] + c[2] * e2[2];
        lo[0] = lo[0].min(p1 - radius);
        lo[1] = lo[1].min(p2 - radius);
        hi[0] = hi[0].max(p1 + radius);
        hi[1] = hi[1].max(p2 + radius);
    }

    let h = (hi[0] - lo[0]).max(hi[1] - lo[1]) / n_grid as f64;
    let n1 = ((hi[0] - lo[0]) / h).ceil() as usize;
    let n2 = ((hi[1] - lo[1]) / h).ceil() as usize;

    let mut area = 0.0;
    let mut s = [0.0; 3];
    for i in 0..n1 {
        let b1 = lo[0] + (i as f64 + 0.5) * h;
        for j in 0..n2 {
            let b2 = lo[1] + (j as f64 + 0.5) * h;
            let b = [
                b1 * e1[0] + b2 * e2[0],
                b1 * e1[1] + b2 * e2[1],
                b1 * e1[2] + b2 * e2[2],
            ];
            // First hit among the spheres along +omega.
            let mut best_t = f64::MAX;
            let mut hit_center = None;
            for c in centers {
                let d = [b[0] - c[0], b[1] - c[1], b[2] - c[2]];
                let proj = d[0] * omega[0] + d[1] * omega[1] + d[2] * omega[2];
                let perp2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - proj * proj;
                if perp2 <= radius * radius {
                    let t = -proj - (radius * radius - perp2).sqrt();
                    if t < best_t {
                        best_t = t;
                        hit_center = Some(*c);
                    }
                }
            }
            if let Some(c) = hit_center {
                let hit = [
                    b[0] + best_t * omega[0] - c[0],
                    b[1] + best_t * omega[1] - c[1],
                    b[2] + best_t * omega[2] - c[2],
                ];
                area += h * h;
                s[0] += hit[0] / radius * h * h;
                s[1] += hit[1] / radius * h * h;
                s[2] += hit[2] / radius * h * h;
            }
        }
    }
    (area, s)
}

/// Deterministic well-spread unit directions (Fibonacci sphere).
fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (1.0 + 5f64.sqrt());
    (0..n)
        .map(|i| {
            let t = i as f64 + 0.5;
            let mu = 1.0 - 2.0 * t / n as f64;
            let st = (1.0 - mu * mu).max(0.0).sqrt();
            let phi = golden * t;
            [st * phi.cos(), st * phi.sin(), mu]
        })
        .collect()
}

/// Lat-long surface mesh over a set of equal spheres, with exact band
/// areas and O(1) binning of a surface normal to its element.
struct SurfaceGrid {
    pos: Vec<[f64; 3]>,
    nor: Vec<[f64; 3]>,
    area: Vec<f64>,
    sphere: Vec<usize>,
    n_band: usize,
    n_phi: usize,
    per_sphere: usize,
}

impl SurfaceGrid {
    fn build(centers: &[[f64; 3]], radius: f64, n_band: usize) -> Self {
        let n_phi = 2 * n_band;
        let mut g = SurfaceGrid {
            pos: Vec::new(),
            nor: Vec::new(),
            area: Vec::new(),
            sphere: Vec::new(),
            n_band,
            n_phi,
            per_sphere: n_band * n_phi,
        };
        for (si, c) in centers.iter().enumerate() {
            for i in 0..n_band {
                let mu0 = -1.0 + 2.0 * i as f64 / n_band as f64;
                let mu1 = -1.0 + 2.0 * (i + 1) as f64 / n_band as f64;
                let mu = 0.5 * (mu0 + mu1);
                let st = (1.0 - mu * mu).max(0.0).sqrt();
                let band_area =
                    2.0 * std::f64::consts::PI * radius * radius * (mu1 - mu0) / n_phi as f64;
                for j in 0..n_phi {
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_phi as f64;
                    let n_hat = [st * phi.cos(), st * phi.sin(), mu];
                    g.pos.push([
                        c[0] + radius * n_hat[0],
                        c[1] + radius * n_hat[1],
                        c[2] + radius * n_hat[2],
                    ]);
                    g.nor.push(n_hat);
                    g.area.push(band_area);
                    g.sphere.push(si);
                }
            }
        }
        g
    }

    /// Element index on `sphere` whose patch contains surface normal `n_hat`.
    fn bin(&self, sphere: usize, n_hat: [f64; 3]) -> usize {
        let i = (((n_hat[2] + 1.0) / 2.0 * self.n_band as f64) as usize).min(self.n_band - 1);
        let phi = n_hat[1].atan2(n_hat[0]).rem_euclid(2.0 * std::f64::consts::PI);
        let j = ((phi / (2.0 * std::f64::consts::PI) * self.n_phi as f64) as usize)
            .min(self.n_phi - 1);
        sphere * self.per_sphere + i * self.n_phi + j
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// First intersection parameter t > 0 of the ray p + t d with a sphere.
fn ray_sphere(p: [f64; 3], d: [f64; 3], c: [f64; 3], radius: f64) -> Option<f64> {
    let q = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
    let b = dot(q, d);
    let disc = b * b - (dot(q, q) - radius * radius);
    if disc <= 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t > 0.0).then_some(t)
}

/// Emission (diffuse re-emission and its multi-collision cascade between
/// the spheres) part of the drag, as the response coefficient E(u) such
/// that drag_em = (rho/s^2) * I4 * E(u). Linear order in the drift:
/// the perturbed number flux absorbed by each element is re-emitted
/// diffusely; emitted molecules intercepted by the other sphere deposit
/// thermal momentum and cascade until they escape.
fn emission_response(
    grid: &SurfaceGrid,
    centers: &[[f64; 3]],
    radius: f64,
    c_r: f64,
    n_dir: usize,
    n_ray: usize,
    u: [f64; 3],
) -> f64 {
    let nel = grid.pos.len();
    let dirs = fibonacci_directions(n_dir);
    let d_om = 4.0 * std::f64::consts::PI / n_dir as f64;

    // Visibility-limited incident direction integral g_k.
    let mut g = vec![[0.0f64; 3]; nel];
    for k in 0..nel {
        let other = (centers.len() > 1).then(|| centers[1 - grid.sphere[k]]);
        for w in &dirs {
            let cosn = dot(*w, grid.nor[k]);
            if cosn >= 0.0 {
                continue;
            }
            // Incoming ray travels along w; its prior path is pos - t w.
            if let Some(oc) = other {
                let back = [-w[0], -w[1], -w[2]];
                if ray_sphere(grid.pos[k], back, oc, radius).is_some() {
                    continue;
                }
            }
            for a in 0..3 {
                g[k][a] += w[a] * (-cosn) * d_om;
            }
        }
    }

    // Cosine-lobe transfer: fraction of emission from k landing on each
    // element of the other sphere, and the mean transferred momentum
    // direction (relative to the per-molecule thermal speed).
    let rays = fibonacci_directions(n_ray);
    let d_ray = 4.0 * std::f64::consts::PI / n_ray as f64;
    let mut transfer: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nel];
    let mut dep_dir = vec![[0.0f64; 3]; nel];
    if centers.len() > 1 {
        let mut row = vec![0.0f64; nel];
        for k in 0..nel {
            let oc = centers[1 - grid.sphere[k]];
            let mut touched: Vec<u32> = Vec::new();
            for d in &rays {
                let cn = dot(*d, grid.nor[k]);
                if cn <= 0.0 {
                    continue;
                }
                let Some(t) = ray_sphere(grid.pos[k], *d, oc, radius) else {
                    continue;
                };
                let wgt = cn / std::f64::consts::PI * d_ray;
                let hit_n = [
                    (grid.pos[k][0] + t * d[0] - oc[0]) / radius,
                    (grid.pos[k][1] + t * d[1] - oc[1]) / radius,
                    (grid.pos[k][2] + t * d[2] - oc[2]) / radius,
                ];
                let j = grid.bin(1 - grid.sphere[k], hit_n);
                if row[j] == 0.0 {
                    touched.push(j as u32);
                }
                row[j] += wgt;
                for a in 0..3 {
                    dep_dir[k][a] += wgt * d[a];
                }
            }
            touched.sort_unstable();
            transfer[k] = touched.iter().map(|&j| (j, row[j as usize])).collect();
            for &j in &touched {
                row[j as usize] = 0.0;
            }
        }
    }

    // Linear cascade in the perturbed flux q_k = (g_k . u) * area_k.
    let mut q: Vec<f64> = (0..nel).map(|k| dot(g[k], u) * grid.area[k]).collect();
    let mut e = -c_r * (0..nel).map(|k| dot(grid.nor[k], u) * q[k]).sum::<f64>();
    for _ in 0..16 {
        // Thermal momentum deposited on the intercepting sphere.
        e += 1.5 * c_r * (0..nel).map(|k| q[k] * dot(dep_dir[k], u)).sum::<f64>();
        let mut next = vec![0.0f64; nel];
        for k in 0..nel {
            for &(j, f) in &transfer[k] {
                next[j as usize] += q[k] * f;
            }
        }
        // Re-emission recoil of the intercepted molecules.
        e -= c_r * (0..nel).map(|j| dot(grid.nor[j], u) * next[j]).sum::<f64>();
        let norm: f64 = next.iter().map(|v| v.abs()).sum();
        q = next;
        if norm < 1e-12 {
            break;
        }
    }
    e
}

/// Linearized translational drag coefficients (force per velocity, N s/m)
/// along and perpendicular to the body axis, for diffuse reflection. The
/// absorbed-momentum part is a direction integral over the first-hit
/// projected area; the re-emission part (including inter-sphere
/// collisions) comes from the surface-element cascade.
fn translational_drag_coefficients(
    env: &Environment,
    centers: &[[f64; 3]],
    radius: f64,
    n_theta: usize,
    n_grid: usize,
    n_band: usize,
) -> (f64, f64) {
    let s_th = (K_B * env.temperature / env.gas_mass).sqrt();
    let v_bar = env.mean_speed();
    let rho = env.gas_density();
    // Gaussian speed moments: c5 multiplies the projected area, i4 the
    // flux perturbation, c_r is the normal recoil speed per re-emitted
    // molecule (effusion at the wall temperature).
    let c5 = 8.0 * s_th.powi(3) / (2.0 * std::f64::consts::PI).powf(1.5);
    let i4 = 3.0 / (4.0 * std::f64::consts::PI) * s_th * s_th;
    let c_r = std::f64::consts::PI * v_bar / 4.0;

    // Absorbed incident momentum, composite midpoint in cos(theta).
    let mut drag_par = 0.0;
    let mut drag_perp = 0.0;
    let dmu = 2.0 / n_theta as f64;
    for i in 0..n_theta {
        let mu = -1.0 + (i as f64 + 0.5) * dmu;
        let sin_theta = (1.0 - mu * mu).max(0.0).sqrt();
        let (a, _) = silhouette(centers, radius, mu, n_grid);
        drag_par += 2.0 * std::f64::consts::PI * mu * c5 * mu * a * dmu;
        drag_perp += std::f64::consts::PI * sin_theta * c5 * sin_theta * a * dmu;
    }

    let grid = SurfaceGrid::build(centers, radius, n_band);
    let n_dir = 40 * n_band * n_band / 8;
    let n_ray = 30 * n_band * n_band / 8;
    drag_par += i4
        * emission_response(&grid, centers, radius, c_r, n_dir, n_ray, [0.0, 0.0, 1.0]);
    drag_perp += i4
        * emission_response(&grid, centers, radius, c_r, n_dir, n_ray, [1.0, 0.0, 0.0]);

    let pref = rho / (s_th * s_th);
    (pref * drag_par, pref * drag_perp)
}

/// CoM damping rates (Gamma_parallel, Gamma_perpendicular) of the dumbbell
/// relative to its axis, 1/s, from the first-hit quadrature.
///
/// Fully diffuse reflection is assumed in the quadrature; for partial
/// accommodation the rates are scaled by the sphere Epstein ratio.
pub fn dumbbell_com_damping(env: &Environment, geom: &DumbbellGeom) -> Result<(f64, f64)> {
    let a = geom.radius();
    let centers = [[0.0, 0.0, -a], [0.0, 0.0, a]];
    let m = geom.mass();

    let coarse = translational_drag_coefficients(env, &centers, a, 48, 96, 12);
    let fine = translational_drag_coefficients(env, &centers, a, 96, 192, 20);
    for (c, f) in [(coarse.0, fine.0), (coarse.1, fine.1)] {
        let rel = ((f - c) / f).abs();
        if rel > 5e-3 {
            return Err(Error::QuadratureNonConvergence(rel));
        }
    }
    let scale = epstein_coefficient(env.accommodation) / epstein_coefficient(1.0);
    Ok((scale * fine.0 / m, scale * fine.1 / m))
}

/// Plate-element drag coefficients per unit area and per rho v_bar:
/// normal and tangential response for accommodation sigma.
fn plate_coefficients(accommodation: f64) -> (f64, f64) {
    let diffuse_n = 0.5 + std::f64::consts::PI / 8.0;
    let alpha_n = accommodation * diffuse_n + (1.0 - accommodation) * 1.0;
    let alpha_t = accommodation * 0.25;
    (alpha_n, alpha_t)
}

/// Torque per angular velocity (N m s) about `axis` for the two-sphere
/// body, by surface-element quadrature with local rigid-body velocities.
fn rotational_drag_coefficient(
    env: &Environment,
    centers: &[[f64; 3]],
    radius: f64,
    axis: [f64; 3],
    n_band: usize,
) -> f64 {
    let (alpha_n, alpha_t) = plate_coefficients(env.accommodation);
    let rho_v = env.gas_density() * env.mean_speed();

    let mut torque = 0.0;
    // Lat-long bands on each sphere with exact band areas.
    for c in centers {
        for i in 0..n_band {
            let mu0 = -1.0 + 2.0 * i as f64 / n_band as f64;
            let mu1 = -1.0 + 2.0 * (i + 1) as f64 / n_band as f64;
            let mu = 0.5 * (mu0 + mu1);
            let sin_t = (1.0 - mu * mu).max(0.0).sqrt();
            let n_phi = (2 * n_band).max(8);
            let band_area = 2.0 * std::f64::consts::PI * radius * radius * (mu1 - mu0)
                / n_phi as f64;
            for j in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_phi as f64;
                let n_hat = [sin_t * phi.cos(), sin_t * phi.sin(), mu];
                let r = [
                    c[0] + radius * n_hat[0],
                    c[1] + radius * n_hat[1],
                    c[2] + radius * n_hat[2],
                ];
                // u = axis x r (unit angular velocity).
                let u = [
                    axis[1] * r[2] - axis[2] * r[1],
                    axis[2] * r[0] - axis[0] * r[2],
                    axis[0] * r[1] - axis[1] * r[0],
                ];
                let u_n = u[0] * n_hat[0] + u[1] * n_hat[1] + u[2] * n_hat[2];
                let f = [
                    -rho_v * (alpha_n * u_n * n_hat[0] + alpha_t * (u[0] - u_n * n_hat[0])) * band_area,
                    -rho_v * (alpha_n * u_n * n_hat[1] + alpha_t * (u[1] - u_n * n_hat[1])) * band_area,
                    -rho_v * (alpha_n * u_n * n_hat[2] + alpha_t * (u[2] - u_n * n_hat[2])) * band_area,
                ];
                // Torque component along the rotation axis.
                let t = [
                    r[1] * f[2] - r[2] * f[1],
                    r[2] * f[0] - r[0] * f[2],
                    r[0] * f[1] - r[1] * f[0],
                ];
                torque += t[0] * axis[0] + t[1] * axis[1] + t[2] * axis[2];
            }
        }
    }
    -torque
}

/// Rotational damping rate about a transverse axis and the damping time:
/// (gamma, tau).
pub fn rotational_damping(env: &Environment, geom: &DumbbellGeom) -> Result<(f64, f64)> {
    let a = geom.radius();
    let centers = [[0.0, 0.0, -a], [0.0, 0.0, a]];
    let axis = [1.0, 0.0, 0.0];

    let coarse = rotational_drag_coefficient(env, &centers, a, axis, 32);
    let fine = rotational_drag_coefficient(env, &centers, a, axis, 64);
    let rel = ((fine - coarse) / fine).abs();
    if rel > 5e-3 {
        return Err(Error::QuadratureNonConvergence(rel));
    }
    let gamma = fine / geom.moment_of_inertia();
    Ok((gamma, 1.0 / gamma))
}

/// Spin damping of a single sphere about its own axis (zero for specular
/// reflection; used as a model control).
pub fn sphere_spin_damping(env: &Environment, radius: f64, density: f64) -> f64 {
    let centers = [[0.0, 0.0, 0.0]];
    let coef = rotational_drag_coefficient(env, &centers, radius, [0.0, 0.0, 1.0], 64);
    let m_s = density * 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3);
    let inertia = 0.4 * m_s * radius * radius;
    coef / inertia
}

/// Multiplicative proximity factor on the damping rate at particle-surface
/// separation `d`. Exactly 1 in the free-molecular regime: ballistic
/// molecules do not feel the wall. A continuum-regime wall correction is
/// returned only when the Knudsen check fails.
pub fn proximity_correction(env: &Environment, geom: &DumbbellGeom, separation: f64) -> f64 {
    let length = geom.sphere_diameter.max(separation);
    if env.knudsen(length) >= 10.0 {
        1.0
    } else {
        // Lorentz-type wall enhancement of viscous drag.
        1.0 + (9.0 / 16.0) * geom.radius() / (geom.radius() + separation)
    }
}

/// Full damping summary for the default lab configuration (dumbbell axis
/// along the polarization).
pub fn damping_rates(env: &Environment, geom: &DumbbellGeom) -> Result<DampingRates> {
    env.validate()?;
    let (par, perp) = dumbbell_com_damping(env, geom)?;
    let (gamma_rot, tau) = rotational_damping(env, geom)?;
    Ok(DampingRates {
        gamma_com_parallel: par,
        gamma_com_perpendicular: perp,
        gamma_rot,
        tau,
    })
}
