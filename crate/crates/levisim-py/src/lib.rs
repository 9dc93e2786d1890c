//! Python bindings for the levisim core: the main types (dumbbell, beam,
//! trap wells) and operations (well finding, gas damping, Langevin
//! simulation, PSD/fit, sensitivity, rotation curves, grating scan,
//! Casimir surrogate) exposed with plain-Python inputs and outputs.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use levisim::beam::{BeamParams, SurfaceSpec};
use levisim::dumbbell::DumbbellGeom;
use levisim::gas::Environment;
use levisim::langevin::{self, RotorState};
use levisim::{casimir, grating, spectral, trap};

fn err(e: levisim::Error) -> PyErr {
    match e.exit_code() {
        4 => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Two-sphere silica nanodumbbell.
#[pyclass]
#[derive(Clone)]
struct Dumbbell {
    inner: DumbbellGeom,
}

#[pymethods]
impl Dumbbell {
    #[new]
    #[pyo3(signature = (sphere_diameter=144e-9, density=2200.0, permittivity=2.1))]
    fn new(sphere_diameter: f64, density: f64, permittivity: f64) -> Self {
        Self {
            inner: DumbbellGeom {
                sphere_diameter,
                density,
                permittivity,
            },
        }
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    #[getter]
    fn moment_of_inertia(&self) -> f64 {
        self.inner.moment_of_inertia()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dumbbell(sphere_diameter={:.3e}, density={}, permittivity={})",
            self.inner.sphere_diameter, self.inner.density, self.inner.permittivity
        )
    }
}

/// Trapping beam; `waist_radius=None` calibrates the waist so the
/// free-space axial frequency equals `calibrate_fz`.
#[pyclass]
#[derive(Clone)]
struct Beam {
    inner: BeamParams,
}

#[pymethods]
impl Beam {
    #[new]
    #[pyo3(signature = (wavelength=1550e-9, power=0.2, waist_radius=None, calibrate_fz=35e3, waveplate_deg=0.0, focus_z=0.0, dumbbell=None))]
    fn new(
        wavelength: f64,
        power: f64,
        waist_radius: Option<f64>,
        calibrate_fz: f64,
        waveplate_deg: f64,
        focus_z: f64,
        dumbbell: Option<Dumbbell>,
    ) -> PyResult<Self> {
        let geom = dumbbell.map_or_else(DumbbellGeom::default, |d| d.inner);
        let w0 = match waist_radius {
            Some(w) => w,
            None => trap::calibrate_waist(wavelength, power, &geom, calibrate_fz).map_err(err)?,
        };
        let b = BeamParams::linear(wavelength, power, w0)
            .with_waveplate(waveplate_deg.to_radians())
            .with_focus([0.0, 0.0, focus_z]);
        b.validate().map_err(err)?;
        Ok(Self { inner: b })
    }

    #[getter]
    fn waist_radius(&self) -> f64 {
        self.inner.waist_radius
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength
    }

    #[getter]
    fn power(&self) -> f64 {
        self.inner.power
    }
}

fn surface_from_str(kind: &str, z_position: f64) -> PyResult<SurfaceSpec> {
    let mut s = match kind {
        "none" => SurfaceSpec::none(),
        "sapphire" => SurfaceSpec::sapphire(z_position),
        "gold" => SurfaceSpec::gold(z_position),
        other => {
            return Err(PyValueError::new_err(format!(
                "surface '{other}' not in none|sapphire|gold"
            )))
        }
    };
    if kind != "none" {
        s.z_position = z_position;
    }
    Ok(s)
}

/// One standing-wave trapping well.
#[pyclass]
#[derive(Clone)]
struct Well {
    #[pyo3(get)]
    index: u32,
    #[pyo3(get)]
    separation: f64,
    #[pyo3(get)]
    z_equilibrium: f64,
    #[pyo3(get)]
    depth_kbt: f64,
    #[pyo3(get)]
    f_x: f64,
    #[pyo3(get)]
    f_y: f64,
    #[pyo3(get)]
    f_z: f64,
    #[pyo3(get)]
    f_torsion: f64,
}

impl From<trap::TrapWell> for Well {
    fn from(w: trap::TrapWell) -> Self {
        Self {
            index: w.index,
            separation: w.separation,
            z_equilibrium: w.z_equilibrium,
            depth_kbt: w.depth_kbt,
            f_x: w.f_x,
            f_y: w.f_y,
            f_z: w.f_z,
            f_torsion: w.f_torsion,
        }
    }
}

#[pymethods]
impl Well {
    fn __repr__(&self) -> String {
        format!(
            "Well(index={}, separation={:.1} nm, f_z={:.1} kHz)",
            self.index,
            self.separation * 1e9,
            self.f_z / 1e3
        )
    }
}

/// Standing-wave wells for a beam focused at the surface.
#[pyfunction]
#[pyo3(signature = (beam, dumbbell, surface="sapphire", surface_z=0.0))]
fn find_wells(beam: &Beam, dumbbell: &Dumbbell, surface: &str, surface_z: f64) -> PyResult<Vec<Well>> {
    let s = surface_from_str(surface, surface_z)?;
    let lambda = beam.inner.wavelength;
    let wells = trap::find_wells(
        &beam.inner,
        &s,
        &dumbbell.inner,
        surface_z - 2.4 * lambda,
        surface_z - lambda / 16.0,
    )
    .map_err(err)?;
    Ok(wells.into_iter().map(Well::from).collect())
}

/// Free-space well of the same beam.
#[pyfunction]
fn free_space_well(beam: &Beam, dumbbell: &Dumbbell) -> PyResult<Well> {
    Ok(trap::free_space_well(&beam.inner, &dumbbell.inner)
        .map_err(err)?
        .into())
}

/// Trap-frequency enhancement ratios (well, separation, R_x, R_y).
#[pyfunction]
#[pyo3(signature = (beam, dumbbell, n_wells=5, surface="sapphire"))]
fn enhancement_ratio(
    beam: &Beam,
    dumbbell: &Dumbbell,
    n_wells: u32,
    surface: &str,
) -> PyResult<Vec<(u32, f64, f64, f64)>> {
    let s = surface_from_str(surface, 0.0)?;
    trap::enhancement_ratio(&beam.inner, &s, &dumbbell.inner, n_wells).map_err(err)
}

/// Free-molecular damping rates at the given pressure.
#[pyfunction]
#[pyo3(signature = (pressure_torr, dumbbell, temperature=300.0))]
fn damping_rates<'py>(
    py: Python<'py>,
    pressure_torr: f64,
    dumbbell: &Dumbbell,
    temperature: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let env = Environment {
        pressure_torr,
        temperature,
        ..Environment::default()
    };
    let r = levisim::gas::damping_rates(&env, &dumbbell.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("gamma_com_parallel", r.gamma_com_parallel)?;
    d.set_item("gamma_com_perpendicular", r.gamma_com_perpendicular)?;
    d.set_item("gamma_rot", r.gamma_rot)?;
    d.set_item("tau", r.tau)?;
    d.set_item("anisotropy", r.anisotropy())?;
    Ok(d)
}

/// Langevin trajectory in a well; returns {"dt": float, channels...}.
#[pyfunction]
#[pyo3(signature = (well, dumbbell, pressure_torr=1.5, dt=1e-8, n_steps=100_000, seed=1, stride=4))]
fn simulate_well<'py>(
    py: Python<'py>,
    well: &Well,
    dumbbell: &Dumbbell,
    pressure_torr: f64,
    dt: f64,
    n_steps: u64,
    seed: u64,
    stride: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let env = Environment::with_pressure(pressure_torr);
    let tw = trap::TrapWell {
        index: well.index,
        separation: well.separation,
        z_equilibrium: well.z_equilibrium,
        depth_kbt: well.depth_kbt,
        f_x: well.f_x,
        f_y: well.f_y,
        f_z: well.f_z,
        f_torsion: well.f_torsion,
    };
    let mut cfg =
        langevin::well_sim_config(&tw, &dumbbell.inner, &env, dt, n_steps, seed).map_err(err)?;
    cfg.stride = stride;
    let ts = langevin::simulate(&cfg, RotorState::at_rest([0.0, 0.0, well.z_equilibrium]))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("dt", ts.dt)?;
    for (name, ch) in ts.names.iter().zip(&ts.channels) {
        d.set_item(name, ch.clone())?;
    }
    Ok(d)
}

/// Welch PSD of a sample vector; returns (frequency, psd).
#[pyfunction]
#[pyo3(signature = (samples, dt, segment_len=4096))]
fn welch_psd(samples: Vec<f64>, dt: f64, segment_len: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let ts = langevin::TimeSeries {
        dt,
        names: vec!["q".into()],
        channels: vec![samples],
        seed: 0,
        config_hash: String::new(),
    };
    let psd = spectral::welch_psd(&ts, "q", segment_len, 0.5, spectral::Window::Hann).map_err(err)?;
    Ok((psd.frequency, psd.psd))
}

/// Lorentzian fit of a PSD over [f_lo, f_hi]; returns a dict with
/// f0, gamma (Hz), amplitude, area, rel_residual.
#[pyfunction]
fn lorentzian_fit<'py>(
    py: Python<'py>,
    frequency: Vec<f64>,
    psd: Vec<f64>,
    f_lo: f64,
    f_hi: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let est = spectral::PsdEstimate {
        frequency,
        psd,
        segments: 1,
        window: "hann".to_string(),
    };
    let fit = spectral::lorentzian_fit(&est, (f_lo, f_hi)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("f0", fit.f0)?;
    d.set_item("gamma", fit.gamma)?;
    d.set_item("amplitude", fit.amplitude)?;
    d.set_item("area", fit.area)?;
    d.set_item("rel_residual", fit.rel_residual)?;
    Ok(d)
}

/// Torque/force sensitivity at one pressure.
#[pyfunction]
#[pyo3(signature = (pressure_torr, dumbbell, temperature=300.0))]
fn sensitivity<'py>(
    py: Python<'py>,
    pressure_torr: f64,
    dumbbell: &Dumbbell,
    temperature: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let env = Environment {
        pressure_torr,
        temperature,
        ..Environment::default()
    };
    let r = spectral::sensitivity_report(&env, &dumbbell.inner, &[1e6]).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("s_t_sqrt", r.s_t_sqrt)?;
    d.set_item("s_f_sqrt", r.s_f_sqrt.to_vec())?;
    d.set_item("gamma_rot", r.gamma_rot)?;
    d.set_item("inertia", r.inertia)?;
    Ok(d)
}

/// Rotation frequency vs pressure for one surface ("free", "sapphire",
/// "grating"), 1/P exact.
#[pyfunction]
fn rotation_curve(
    surface: &str,
    pressures: Vec<f64>,
    dumbbell: &Dumbbell,
) -> PyResult<Vec<(f64, f64)>> {
    let target = match surface {
        "free" => grating::RotationSurface::FreeSpace,
        "sapphire" => grating::RotationSurface::Sapphire,
        "grating" => grating::RotationSurface::Grating,
        other => {
            return Err(PyValueError::new_err(format!(
                "surface '{other}' not in free|sapphire|grating"
            )))
        }
    };
    let cal = grating::RotationCalibration::defaults()
        .into_iter()
        .find(|c| c.surface == target)
        .expect("calibration exists");
    grating::rotation_curve(&cal, &Environment::default(), &dumbbell.inner, &pressures)
        .map_err(err)
}

/// Trap-frequency scan across the gold nanograting; returns
/// [(x, f_x, well_distance)].
#[pyfunction]
#[pyo3(signature = (beam, dumbbell, well_index=1, n_points=24))]
fn grating_scan(
    beam: &Beam,
    dumbbell: &Dumbbell,
    well_index: usize,
    n_points: usize,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let g = grating::GratingSpec::gold_on_sapphire(0.0);
    let grid: Vec<f64> = (0..n_points)
        .map(|i| 2.0 * g.period * i as f64 / n_points as f64)
        .collect();
    let scan = grating::scan_trap_frequency(&g, &beam.inner, &dumbbell.inner, well_index, &grid)
        .map_err(err)?;
    Ok(scan.into_iter().map(|p| (p.x, p.f_x, p.well_d)).collect())
}

/// Calibrated Casimir torque sweep; returns
/// {"theta_deg": [...], "torque": [...], "c_cal": float}.
#[pyfunction]
#[pyo3(signature = (dumbbell, step_deg=5.0, mesh_sphere=6, mesh_cell=6))]
fn casimir_torque<'py>(
    py: Python<'py>,
    dumbbell: &Dumbbell,
    step_deg: f64,
    mesh_sphere: usize,
    mesh_cell: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = casimir::CasimirConfig::default();
    cfg.mesh_sphere = mesh_sphere;
    cfg.mesh_cell = mesh_cell;
    let cal = casimir::calibrate(&cfg, &dumbbell.inner).map_err(err)?;
    let n = (360.0 / step_deg).round() as usize;
    let thetas: Vec<f64> = (0..n).map(|i| step_deg * i as f64).collect();
    let tq = casimir::casimir_torque(&cal, &dumbbell.inner, &thetas, casimir::Body::Dumbbell)
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("theta_deg", tq.iter().map(|p| p.0).collect::<Vec<_>>())?;
    d.set_item("torque", tq.iter().map(|p| p.1).collect::<Vec<_>>())?;
    d.set_item("c_cal", cal.c_cal)?;
    Ok(d)
}

/// Linear tip speed at rotation frequency f_rot (Hz).
#[pyfunction]
fn tip_speed(dumbbell: &Dumbbell, f_rot: f64) -> f64 {
    langevin::tip_speed(&dumbbell.inner, 2.0 * std::f64::consts::PI * f_rot)
}

#[pymodule]
fn levisim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dumbbell>()?;
    m.add_class::<Beam>()?;
    m.add_class::<Well>()?;
    m.add_function(wrap_pyfunction!(find_wells, m)?)?;
    m.add_function(wrap_pyfunction!(free_space_well, m)?)?;
    m.add_function(wrap_pyfunction!(enhancement_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(damping_rates, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_well, m)?)?;
    m.add_function(wrap_pyfunction!(welch_psd, m)?)?;
    m.add_function(wrap_pyfunction!(lorentzian_fit, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_curve, m)?)?;
    m.add_function(wrap_pyfunction!(grating_scan, m)?)?;
    m.add_function(wrap_pyfunction!(casimir_torque, m)?)?;
    m.add_function(wrap_pyfunction!(tip_speed, m)?)?;
    Ok(())
}
