//! Command-line front end: configuration, orchestration, persistence.
//!
//! Subcommands map one-to-one onto the library modules; each writes CSV
//! and JSON artifacts (plus SVG plots unless `--no-plots`) into the output
//! directory. All outputs embed the resolved-config hash and the seed, and
//! `reproduce-all` is byte-deterministic for a fixed seed regardless of
//! `--threads`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::beam::BeamParams;
use crate::config::RunConfig;
use crate::dumbbell::DumbbellGeom;
use crate::error::{Error, Result};
use crate::gas::Environment;
use crate::output::{self, row, OutputMeta, Scale, Series};
use crate::{casimir, grating, langevin, spectral, trap};

#[derive(Parser, Debug)]
#[command(
    name = "levisim",
    version,
    about = "Levitated nanodumbbell optomechanics simulator"
)]
pub struct Cli {
    /// INI config file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Override the RNG seed from the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (results are independent of this by construction).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Skip SVG plot emission.
    #[arg(long, global = true)]
    pub no_plots: bool,

    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Cmd {
    /// Standing-wave well table (positions, depths, frequencies).
    Wells,
    /// Trap-frequency enhancement ratios per well.
    Freqs,
    /// Langevin trajectory in the configured well.
    Simulate,
    /// Welch PSD of the trajectory with a Lorentzian fit.
    Psd,
    /// Torque and force sensitivity report.
    Sensitivity,
    /// Rotation frequency vs pressure for all three surfaces.
    Rotation,
    /// Trap-frequency scan across the nanograting.
    GratingScan,
    /// Casimir torque/force surrogate sweeps.
    Casimir,
    /// Every artifact in sequence.
    ReproduceAll,
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let _ = env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("LEVISIM_LOG", "warn"),
    )
    .try_init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let payload = serde_json::json!({
                "error": { "message": e.to_string(), "exit_code": code }
            });
            eprintln!("{payload}");
            code
        }
    }
}

/// Run a parsed invocation (separated from `run` for testability).
pub fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // Results are thread-count independent; pool setup may fail if a
        // global pool already exists (e.g. repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    cfg.validate()?;
    let ctx = Ctx::new(cfg, &cli.out, !cli.no_plots)?;
    match cli.command {
        Cmd::Wells => ctx.wells(),
        Cmd::Freqs => ctx.freqs(),
        Cmd::Simulate => ctx.simulate().map(|_| ()),
        Cmd::Psd => ctx.psd(),
        Cmd::Sensitivity => ctx.sensitivity(),
        Cmd::Rotation => ctx.rotation(),
        Cmd::GratingScan => ctx.grating_scan(),
        Cmd::Casimir => ctx.casimir(),
        Cmd::ReproduceAll => {
            ctx.wells()?;
            ctx.freqs()?;
            ctx.psd()?; // runs and persists the simulation too
            ctx.sensitivity()?;
            ctx.rotation()?;
            ctx.grating_scan()?;
            ctx.casimir()
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    meta: OutputMeta,
    out: PathBuf,
    plots: bool,
    beam: BeamParams,
    geom: DumbbellGeom,
    env: Environment,
}

impl Ctx {
    fn new(cfg: RunConfig, out: &Path, plots: bool) -> Result<Self> {
        let beam = cfg.beam_params()?;
        let meta = OutputMeta::new(&cfg.content_hash(), cfg.sim.seed);
        log::info!(
            "config hash {} seed {} -> {}",
            meta.config_hash,
            meta.seed,
            out.display()
        );
        Ok(Self {
            geom: cfg.particle,
            env: cfg.environment,
            meta,
            out: out.to_path_buf(),
            plots,
            beam,
            cfg,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn find_wells(&self) -> Result<Vec<trap::TrapWell>> {
        let surface = self.cfg.surface_spec();
        let z_s = surface.z_position;
        let lambda = self.beam.wavelength;
        trap::find_wells(
            &self.beam,
            &surface,
            &self.geom,
            z_s - 2.4 * lambda,
            z_s - lambda / 16.0,
        )
    }

    fn wells(&self) -> Result<()> {
        let wells = self.find_wells()?;
        let rows: Vec<Vec<String>> = wells
            .iter()
            .map(|w| {
                row(&[
                    w.index as f64,
                    w.separation * 1e9,
                    w.depth_kbt,
                    w.f_x,
                    w.f_y,
                    w.f_z,
                    w.f_torsion,
                ])
            })
            .collect();
        output::write_csv(
            &self.path("wells.csv"),
            &self.meta,
            &[
                "well",
                "separation_nm",
                "depth_kbt",
                "f_x_hz",
                "f_y_hz",
                "f_z_hz",
                "f_torsion_hz",
            ],
            &rows,
        )?;
        if self.plots {
            // Potential landscape along the beam axis.
            let surface = self.cfg.surface_spec();
            let tensor = crate::dumbbell::dumbbell_polarizability(&self.geom)?;
            let lambda = self.beam.wavelength;
            let z_s = surface.z_position;
            let n = 480;
            let mut curve = Vec::with_capacity(n);
            for i in 0..n {
                let z = z_s - 2.4 * lambda + (2.4 * lambda - lambda / 16.0) * i as f64 / n as f64;
                let u = trap::potential(
                    &self.geom,
                    &tensor,
                    &self.beam,
                    &surface,
                    &trap::Pose {
                        position: [0.0, 0.0, z],
                        axis: [1.0, 0.0, 0.0],
                    },
                )?;
                curve.push(((z_s - z) * 1e9, u / (crate::constants::K_B * 300.0)));
            }
            output::write_svg(
                &self.path("wells.svg"),
                &self.meta,
                "Optical potential vs distance from surface",
                "d (nm)",
                "U (kB T)",
                &[Series { label: "U(d)", points: &curve }],
                Scale::Linear,
                Scale::Linear,
            )?;
        }
        Ok(())
    }

    fn freqs(&self) -> Result<()> {
        let surface = self.cfg.surface_spec();
        let ratios = trap::enhancement_ratio(&self.beam, &surface, &self.geom, 5)?;
        let rows: Vec<Vec<String>> = ratios
            .iter()
            .map(|&(n, sep, rx, ry)| row(&[n as f64, sep * 1e9, rx, ry]))
            .collect();
        output::write_csv(
            &self.path("freqs.csv"),
            &self.meta,
            &["well", "separation_nm", "r_x", "r_y"],
            &rows,
        )?;
        if self.plots {
            let rx: Vec<(f64, f64)> = ratios.iter().map(|&(_, s, rx, _)| (s * 1e9, rx)).collect();
            let ry: Vec<(f64, f64)> = ratios.iter().map(|&(_, s, _, ry)| (s * 1e9, ry)).collect();
            output::write_svg(
                &self.path("freqs.svg"),
                &self.meta,
                "Trap frequency enhancement vs well distance",
                "d (nm)",
                "R = f_well / f_free",
                &[
                    Series { label: "R_x", points: &rx },
                    Series { label: "R_y", points: &ry },
                ],
                Scale::Linear,
                Scale::Linear,
            )?;
        }
        Ok(())
    }

    fn simulate(&self) -> Result<langevin::TimeSeries> {
        let wells = self.find_wells()?;
        let well = wells
            .iter()
            .find(|w| w.index == self.cfg.sim.well_index)
            .ok_or_else(|| {
                Error::Config(format!(
                    "well_index {} not found ({} wells located)",
                    self.cfg.sim.well_index,
                    wells.len()
                ))
            })?;
        let mut sim = langevin::well_sim_config(
            well,
            &self.geom,
            &self.env,
            self.cfg.sim.dt,
            self.cfg.sim.n_steps,
            self.cfg.sim.seed,
        )?;
        sim.stride = self.cfg.sim.stride;
        sim.config_hash = self.meta.config_hash.clone();
        let ts = langevin::simulate(&sim, langevin::RotorState::at_rest([0.0, 0.0, well.z_equilibrium]))?;
        let n = ts.len();
        let rows: Vec<Vec<String>> = (0..n)
            .map(|i| row(&ts.channels.iter().map(|c| c[i]).collect::<Vec<_>>()))
            .collect();
        let names: Vec<&str> = ts.names.iter().map(String::as_str).collect();
        output::write_csv(&self.path("trajectory.csv"), &self.meta, &names, &rows)?;
        output::write_json(
            &self.path("simulate.json"),
            &self.meta,
            &serde_json::json!({
                "well": well,
                "dt_sample": ts.dt,
                "samples": n,
                "gamma_com": sim.gamma_com,
                "gamma_rot": sim.gamma_rot,
            }),
        )?;
        Ok(ts)
    }

    fn psd(&self) -> Result<()> {
        let ts = self.simulate()?;
        let psd = spectral::welch_psd(&ts, "z", 8192, 0.5, spectral::Window::Hann)?;
        let rows: Vec<Vec<String>> = psd
            .frequency
            .iter()
            .zip(&psd.psd)
            .map(|(&f, &s)| row(&[f, s]))
            .collect();
        output::write_csv(
            &self.path("psd.csv"),
            &self.meta,
            &["frequency_hz", "psd_m2_per_hz"],
            &rows,
        )?;
        // Fit around the axial line; the fit is advisory output, so a
        // non-converged fit is reported rather than fatal.
        let wells = self.find_wells()?;
        let well = wells
            .iter()
            .find(|w| w.index == self.cfg.sim.well_index)
            .expect("well existed during simulate");
        let fit = spectral::lorentzian_fit(&psd, (0.6 * well.f_z, 1.4 * well.f_z));
        let fit_json = match &fit {
            Ok(f) => serde_json::json!({ "converged": true, "fit": f }),
            Err(e) => serde_json::json!({ "converged": false, "error": e.to_string() }),
        };
        output::write_json(&self.path("psd_fit.json"), &self.meta, &fit_json)?;
        if self.plots {
            let pts: Vec<(f64, f64)> = psd
                .frequency
                .iter()
                .zip(&psd.psd)
                .filter(|(&f, &s)| f > 0.0 && s > 0.0)
                .map(|(&f, &s)| (f, s))
                .collect();
            output::write_svg(
                &self.path("psd.svg"),
                &self.meta,
                "Axial displacement PSD",
                "f (Hz)",
                "S_z (m^2/Hz)",
                &[Series { label: "Welch PSD", points: &pts }],
                Scale::Log,
                Scale::Log,
            )?;
        }
        Ok(())
    }

    fn sensitivity(&self) -> Result<()> {
        // Torque sensitivity vs rotation frequency (thermal noise floor).
        let f_grid: Vec<f64> = (0..57).map(|i| 10f64.powf(3.0 + i as f64 / 8.0)).collect();
        let report = spectral::sensitivity_report(&self.env, &self.geom, &f_grid)?;
        let rows: Vec<Vec<String>> = report
            .s_t_curve
            .iter()
            .map(|&(f, s)| row(&[f, s]))
            .collect();
        output::write_csv(
            &self.path("sensitivity_torque.csv"),
            &self.meta,
            &["f_rot_hz", "s_t_sqrt_nm_per_sqrt_hz"],
            &rows,
        )?;
        // Force sensitivity vs well separation.
        let lambda = self.beam.wavelength;
        let seps: Vec<f64> = (1..=5).map(|n| (2 * n - 1) as f64 * lambda / 4.0).collect();
        let vs = spectral::sensitivity_vs_distance(&self.env, &self.geom, &seps)?;
        let rows: Vec<Vec<String>> = vs
            .iter()
            .map(|&(d, s)| row(&[d * 1e9, s[0], s[1], s[2]]))
            .collect();
        output::write_csv(
            &self.path("sensitivity_force.csv"),
            &self.meta,
            &["separation_nm", "s_f_x", "s_f_y", "s_f_z"],
            &rows,
        )?;
        output::write_json(&self.path("sensitivity.json"), &self.meta, &report)?;
        if self.plots {
            output::write_svg(
                &self.path("sensitivity.svg"),
                &self.meta,
                "Torque sensitivity vs rotation frequency",
                "f_rot (Hz)",
                "S_T^1/2 (N m / sqrt(Hz))",
                &[Series { label: "thermal limit", points: &report.s_t_curve }],
                Scale::Log,
                Scale::Log,
            )?;
        }
        Ok(())
    }

    fn rotation(&self) -> Result<()> {
        let pressures: Vec<f64> = (0..=40).map(|i| 10f64.powf(-5.0 + i as f64 / 10.0)).collect();
        let cals = grating::RotationCalibration::defaults();
        let mut curves = Vec::new();
        for c in &cals {
            curves.push(grating::rotation_curve(c, &self.env, &self.geom, &pressures)?);
        }
        let rows: Vec<Vec<String>> = (0..pressures.len())
            .map(|i| row(&[pressures[i], curves[0][i].1, curves[1][i].1, curves[2][i].1]))
            .collect();
        output::write_csv(
            &self.path("rotation.csv"),
            &self.meta,
            &["pressure_torr", "f_free_hz", "f_sapphire_hz", "f_grating_hz"],
            &rows,
        )?;
        if self.plots {
            let labels = ["free space", "sapphire", "grating"];
            let series: Vec<Series> = curves
                .iter()
                .zip(labels)
                .map(|(c, label)| Series { label, points: c })
                .collect();
            output::write_svg(
                &self.path("rotation.svg"),
                &self.meta,
                "Rotation frequency vs pressure",
                "P (Torr)",
                "f_rot (Hz)",
                &series,
                Scale::Log,
                Scale::Log,
            )?;
        }
        Ok(())
    }

    fn grating_scan(&self) -> Result<()> {
        let g = self.cfg.grating_spec();
        let n = self.cfg.grating.scan_points as usize;
        let grid: Vec<f64> = (0..n).map(|i| 2.0 * g.period * i as f64 / n as f64).collect();
        let w = self.cfg.grating.well_index as usize;
        let first = grating::scan_trap_frequency(&g, &self.beam, &self.geom, w, &grid)?;
        let second = grating::scan_trap_frequency(&g, &self.beam, &self.geom, w + 1, &grid)?;
        let rows: Vec<Vec<String>> = first
            .iter()
            .zip(&second)
            .map(|(a, b)| row(&[a.x * 1e9, a.f_x, a.well_d * 1e9, b.f_x, b.well_d * 1e9]))
            .collect();
        output::write_csv(
            &self.path("grating_scan.csv"),
            &self.meta,
            &[
                "x_nm",
                "f_x_well1_hz",
                "d_well1_nm",
                "f_x_well2_hz",
                "d_well2_nm",
            ],
            &rows,
        )?;
        if self.plots {
            let c1: Vec<(f64, f64)> = first.iter().map(|p| (p.x * 1e9, p.f_x)).collect();
            let c2: Vec<(f64, f64)> = second.iter().map(|p| (p.x * 1e9, p.f_x)).collect();
            output::write_svg(
                &self.path("grating_scan.svg"),
                &self.meta,
                "Trap frequency vs grating position",
                "x (nm)",
                "f_x (Hz)",
                &[
                    Series { label: "first well", points: &c1 },
                    Series { label: "second well", points: &c2 },
                ],
                Scale::Linear,
                Scale::Linear,
            )?;
        }
        Ok(())
    }

    fn casimir(&self) -> Result<()> {
        let cfg = casimir::calibrate(&self.cfg.casimir, &self.geom)?;
        // Torque vs angle.
        let thetas: Vec<f64> = (0..72).map(|i| 5.0 * i as f64).collect();
        let tq = casimir::casimir_torque(&cfg, &self.geom, &thetas, casimir::Body::Dumbbell)?;
        let rows: Vec<Vec<String>> = tq.iter().map(|&(t, v)| row(&[t, v])).collect();
        output::write_csv(
            &self.path("casimir_torque.csv"),
            &self.meta,
            &["theta_deg", "torque_Nm"],
            &rows,
        )?;
        // Force vs separation.
        let ds: Vec<f64> = (0..=30).map(|i| 300e-9 + 10e-9 * i as f64).collect();
        let force = casimir::casimir_force(&cfg, &self.geom, &ds)?;
        let rows: Vec<Vec<String>> = force.iter().map(|&(d, f)| row(&[d * 1e9, f])).collect();
        output::write_csv(
            &self.path("casimir_force.csv"),
            &self.meta,
            &["d_nm", "force_N"],
            &rows,
        )?;
        // Torque vs stripe width.
        let widths: Vec<f64> = (1..=11).map(|i| 50e-9 * i as f64).collect();
        let (sweep, argmax) = casimir::width_sweep(&cfg, &self.geom, &widths)?;
        let rows: Vec<Vec<String>> = sweep
            .iter()
            .map(|p| row(&[p.width * 1e9, p.torque]))
            .collect();
        output::write_csv(
            &self.path("casimir_width.csv"),
            &self.meta,
            &["width_nm", "torque_Nm"],
            &rows,
        )?;
        let t_peak = tq.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        output::write_json(
            &self.path("casimir.json"),
            &self.meta,
            &serde_json::json!({
                "c_cal": cfg.c_cal,
                "peak_torque_Nm": t_peak,
                "width_argmax_nm": argmax * 1e9,
                "reference_width_nm": 300.0,
            }),
        )?;
        if self.plots {
            output::write_svg(
                &self.path("casimir_torque.svg"),
                &self.meta,
                "Casimir torque vs angle",
                "theta (deg)",
                "T (N m)",
                &[Series { label: "T(theta)", points: &tq }],
                Scale::Linear,
                Scale::Linear,
            )?;
            let fmag: Vec<(f64, f64)> = force.iter().map(|&(d, f)| (d * 1e9, f.abs())).collect();
            output::write_svg(
                &self.path("casimir_force.svg"),
                &self.meta,
                "Casimir force vs separation",
                "d (nm)",
                "|F| (N)",
                &[Series { label: "|F(d)|", points: &fmag }],
                Scale::Linear,
                Scale::Log,
            )?;
            let wpts: Vec<(f64, f64)> = sweep
                .iter()
                .map(|p| (p.width * 1e9, p.torque.abs()))
                .collect();
            output::write_svg(
                &self.path("casimir_width.svg"),
                &self.meta,
                "Casimir torque vs stripe width",
                "width (nm)",
                "|T| (N m)",
                &[Series { label: "|T(w)|", points: &wpts }],
                Scale::Linear,
                Scale::Linear,
            )?;
        }
        Ok(())
    }
}
