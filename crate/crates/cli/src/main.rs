use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use softgrasp::{map, output, trace, FormatError};
use softgrasp_core::dynamics::{detect_events, integrate, SimParams};
use softgrasp_core::friction::{average_traces, fit_friction, segment_phases, TraceMetadata, MU_ENVELOPE};
use softgrasp_core::grasp::inertia_of;
use softgrasp_core::optim::{feasible_region, max_stable_preload, Axis, GripContext, Objective};
use softgrasp_core::stability::{rest_angle_curve, slip_boundary};
use softgrasp_core::stiffness::{build_stiffness_map, estimate_stiffness, Direction};
use softgrasp_core::synthetic::SyntheticFriction;
use softgrasp_core::units::{bar_to_pa, deg_to_rad, mm_to_m};
use softgrasp_core::{analyze, GraspConfig, InertiaShape};

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

const EXIT_UNSTABLE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

/// Rotational stability, slip and friction analysis for soft two-finger
/// precision grasps.
///
/// Grasp configs are JSON objects with the SI fields k_n, k_t (N/m),
/// delta_n, r (m), inertia (kg m^2) and mu. Exit status: 0 success or stable,
/// 1 input or usage error, 2 unstable grasp, 3 no feasible grip found.
#[derive(Debug, Parser)]
#[command(name = "softgrasp", version)]
struct Cli {
    /// Units of scalar command-line flags. Files are always SI.
    /// mm-bar-deg reads lengths in mm, speeds in mm/s, pressures in bar and
    /// angles in degrees; forces, stiffnesses, masses and times are unchanged.
    #[arg(long, global = true, value_enum, default_value_t = Units::Si)]
    units: Units,
    /// Seed for randomized utilities.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress warnings and notes on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Si,
    MmBarDeg,
}

impl Units {
    fn length(self, v: f64) -> f64 {
        match self {
            Units::Si => v,
            Units::MmBarDeg => mm_to_m(v),
        }
    }

    fn pressure(self, v: f64) -> f64 {
        match self {
            Units::Si => v,
            Units::MmBarDeg => bar_to_pa(v),
        }
    }

    fn angle(self, v: f64) -> f64 {
        match self {
            Units::Si => v,
            Units::MmBarDeg => deg_to_rad(v),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MaxMargin,
    MaxPreloadStable,
    MaxPreloadNoSlip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeArg {
    CylinderAxial,
    CylinderTransverse,
    Sphere,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full stability report for a grasp config (JSON).
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Override the preload force f_p (N); sets delta_n = f_p / k_n.
        #[arg(long)]
        preload: Option<f64>,
    },
    /// Rest angle over a preload sweep (CSV: f_p_N,theta_r_rad).
    RestCurve {
        #[arg(long)]
        config: PathBuf,
        /// N
        #[arg(long, default_value_t = 0.0)]
        fp_min: f64,
        /// N
        #[arg(long)]
        fp_max: f64,
        /// Number of intervals; the curve has steps + 1 points.
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Rotation angle at which the contact starts to slip (JSON).
    SlipAngle {
        #[arg(long)]
        config: PathBuf,
        /// N
        #[arg(long)]
        preload: Option<f64>,
    },
    /// Integrate the rotational dynamics. Events go to standard output as
    /// JSON; the trajectory CSV goes to --out when given.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// N
        #[arg(long)]
        preload: Option<f64>,
        /// Time step (s).
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Duration (s).
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        /// Viscous damping (N m s/rad).
        #[arg(long, default_value_t = 0.0)]
        damping: f64,
        /// Initial angle (rad, or deg with --units mm-bar-deg).
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        /// Initial rate (rad/s, or deg/s with --units mm-bar-deg).
        #[arg(long, default_value_t = 0.0)]
        theta_dot0: f64,
    },
    /// Identify mu and k_y from sliding traces; several files are averaged
    /// on a common displacement grid first (JSON).
    AnalyzeTrace {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Write the report here (takes precedence over --out).
        #[arg(long)]
        report_out: Option<PathBuf>,
        /// Grid size used when averaging several traces.
        #[arg(long, default_value_t = 2000)]
        points: usize,
    },
    /// Secant stiffness of every probe in a probe CSV (JSON).
    FitStiffness {
        #[arg(long)]
        probes: PathBuf,
    },
    /// Build a stiffness map CSV from a probe CSV.
    BuildMap {
        #[arg(long)]
        probes: PathBuf,
    },
    /// Search a stiffness map for the best grip (JSON). Exits 3 when no
    /// candidate is feasible.
    Optimize {
        #[arg(long)]
        map: PathBuf,
        /// Object radius (m, or mm with --units mm-bar-deg).
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        mu: f64,
        /// kg m^2
        #[arg(long)]
        inertia: f64,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxMargin)]
        objective: ObjectiveArg,
        /// Rotation axis: x pairs (k_y, k_z), z pairs (k_y, k_x).
        #[arg(long, value_enum, default_value_t = AxisArg::X)]
        axis: AxisArg,
        /// Fingers sharing the measured per-finger preload.
        #[arg(long, default_value_t = 2.0)]
        share: f64,
        /// Subdivisions per map cell.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        /// Also write a feasibility heat-map CSV here.
        #[arg(long)]
        region_out: Option<PathBuf>,
        /// Heat-map points along pressure.
        #[arg(long, default_value_t = 20)]
        region_pressures: usize,
        /// Heat-map points along offset.
        #[arg(long, default_value_t = 20)]
        region_offsets: usize,
    },
    /// Moment of inertia of a uniform solid (JSON).
    Inertia {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        /// kg
        #[arg(long)]
        mass: f64,
        /// m, or mm with --units mm-bar-deg
        #[arg(long)]
        radius: f64,
        /// Cylinder height (m, or mm); needed for cylinder-transverse.
        #[arg(long)]
        height: Option<f64>,
    },
    /// Synthetic sliding trace with Gaussian noise (CSV).
    #[command(hide = true)]
    GenTrace {
        /// N/m
        #[arg(long, default_value_t = 800.0)]
        k_y: f64,
        #[arg(long, default_value_t = 0.6)]
        mu: f64,
        /// N
        #[arg(long, default_value_t = 10.0)]
        f_n: f64,
        /// m/s (mm/s); default 2 mm/s
        #[arg(long)]
        velocity: Option<f64>,
        /// m (mm); default 30 mm
        #[arg(long)]
        travel: Option<f64>,
        /// Hz
        #[arg(long, default_value_t = 125.0)]
        rate: f64,
        /// Stick-to-slide blend width, m (mm)
        #[arg(long, default_value_t = 0.0)]
        transition: f64,
        /// Normal force tilt toward z, rad (deg)
        #[arg(long, default_value_t = 0.0)]
        tilt: f64,
        /// Hold time before motion (s)
        #[arg(long, default_value_t = 0.0)]
        dwell: f64,
        /// Noise standard deviation on every force channel (N)
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Pa (bar)
        #[arg(long)]
        pressure: Option<f64>,
        /// m (mm)
        #[arg(long)]
        h_offset: Option<f64>,
        /// m (mm)
        #[arg(long)]
        v_offset: Option<f64>,
        #[arg(long)]
        material: Option<String>,
    },
}

fn create(path: &Path) -> AnyResult<Box<dyn Write>> {
    let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Box::new(BufWriter::new(file)))
}

/// The `--out` file, or standard output.
fn primary(out: &Option<PathBuf>) -> AnyResult<Box<dyn Write>> {
    match out {
        Some(path) => create(path),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn finish(mut w: Box<dyn Write>) -> AnyResult<()> {
    w.flush()?;
    Ok(())
}

fn load_config(path: &Path, preload: Option<f64>) -> AnyResult<GraspConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let config: GraspConfig =
        serde_json::from_str(&text).map_err(|e| format!("{}: invalid grasp config: {e}", path.display()))?;
    Ok(match preload {
        Some(f_p) => {
            let c = config.with_preload(f_p);
            c.validate()?;
            c
        }
        None => config,
    })
}

#[derive(Serialize)]
struct ProbeStiffness {
    direction: Direction,
    pressure: f64,
    offset: f64,
    stiffness: f64,
}

#[derive(Serialize)]
struct InertiaReport {
    shape: InertiaShape,
    mass: f64,
    radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    height: Option<f64>,
    inertia: f64,
}

fn run(cli: Cli) -> AnyResult<ExitCode> {
    let units = cli.units;
    let note = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match cli.command {
        Command::Check { config, preload } => {
            let config = load_config(&config, preload)?;
            let report = analyze(&config);
            let mut w = primary(&cli.out)?;
            output::write_json(&mut w, &report)?;
            finish(w)?;
            Ok(if report.stable {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_UNSTABLE)
            })
        }
        Command::RestCurve {
            config,
            fp_min,
            fp_max,
            steps,
        } => {
            let config = load_config(&config, None)?;
            let curve = rest_angle_curve(&config, fp_min, fp_max, steps)?;
            let mut w = primary(&cli.out)?;
            output::write_rest_curve(&mut w, &curve)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SlipAngle { config, preload } => {
            let config = load_config(&config, preload)?;
            let mut w = primary(&cli.out)?;
            output::write_json(&mut w, &slip_boundary(&config))?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            config,
            preload,
            dt,
            t_max,
            damping,
            theta0,
            theta_dot0,
        } => {
            let config = load_config(&config, preload)?;
            let params = SimParams::new(dt, t_max, damping, units.angle(theta0), units.angle(theta_dot0))?;
            let traj = integrate(&config, &params)?;
            let events = detect_events(&config, &traj);
            if let Some(path) = &cli.out {
                let mut w = create(path)?;
                output::write_trajectory(&mut w, &traj)?;
                finish(w)?;
            }
            let mut w = primary(&None)?;
            output::write_json(&mut w, &events)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::AnalyzeTrace {
            traces,
            report_out,
            points,
        } => {
            let loaded = traces
                .iter()
                .map(|p| {
                    trace::read_trace(p).map_err(|e| match e {
                        FormatError::Io { .. } => e.to_string(),
                        other => format!("{}: {other}", p.display()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let trace = if loaded.len() == 1 {
                loaded.into_iter().next().expect("one trace")
            } else {
                average_traces(&loaded, points)?
            };
            let seg = segment_phases(&trace)?;
            let fit = fit_friction(&trace, &seg)?;
            if !fit.mu_in_envelope {
                note(format!(
                    "warning: mu = {} lies outside the expected range [{}, {}] (reference {})",
                    fit.mu, MU_ENVELOPE.0, MU_ENVELOPE.1, fit.mu_reference
                ));
            }
            let mut w = primary(&report_out.or(cli.out))?;
            output::write_json(&mut w, &fit)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::FitStiffness { probes } => {
            let probes = map::read_probes(&probes)?;
            let estimates = probes
                .iter()
                .map(|p| {
                    Ok(ProbeStiffness {
                        direction: p.direction,
                        pressure: p.pressure,
                        offset: p.offset,
                        stiffness: estimate_stiffness(p)?,
                    })
                })
                .collect::<Result<Vec<_>, softgrasp_core::Error>>()?;
            let mut w = primary(&cli.out)?;
            output::write_json(&mut w, &estimates)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BuildMap { probes } => {
            let build = build_stiffness_map(&map::read_probes(&probes)?)?;
            for (p, o) in &build.averaged {
                note(format!("note: repeated probes averaged at pressure {p} Pa, offset {o} m"));
            }
            let mut w = primary(&cli.out)?;
            map::write_map(&mut w, &build.map)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimize {
            map: map_path,
            radius,
            mu,
            inertia,
            objective,
            axis,
            share,
            refine,
            region_out,
            region_pressures,
            region_offsets,
        } => {
            let stiffness = map::read_map(&map_path)?;
            let radius = units.length(radius);
            let axis = match axis {
                AxisArg::X => Axis::X,
                AxisArg::Z => Axis::Z,
            };
            let objective = match objective {
                ObjectiveArg::MaxMargin => Objective::MaxMargin,
                ObjectiveArg::MaxPreloadStable => Objective::MaxPreloadStable,
                ObjectiveArg::MaxPreloadNoSlip => Objective::MaxPreloadNoSlip,
            };
            let ctx = GripContext {
                mu,
                inertia,
                finger_count_share: share,
            };
            let result = max_stable_preload(&stiffness, radius, axis, &ctx, objective, refine)?;
            if let Some(path) = region_out {
                let region = feasible_region(&stiffness, radius, axis, &ctx, region_pressures, region_offsets)?;
                let mut w = create(&path)?;
                output::write_region(&mut w, &region)?;
                finish(w)?;
            }
            let mut w = primary(&cli.out)?;
            output::write_json(&mut w, &result)?;
            finish(w)?;
            if result.feasible {
                Ok(ExitCode::SUCCESS)
            } else {
                note("no feasible grip; the least-violating candidate is reported".to_string());
                Ok(ExitCode::from(EXIT_INFEASIBLE))
            }
        }
        Command::Inertia {
            shape,
            mass,
            radius,
            height,
        } => {
            let shape = match shape {
                ShapeArg::CylinderAxial => InertiaShape::SolidCylinderAxial,
                ShapeArg::CylinderTransverse => InertiaShape::SolidCylinderTransverse,
                ShapeArg::Sphere => InertiaShape::SolidSphere,
            };
            let radius = units.length(radius);
            let height = height.map(|h| units.length(h));
            let report = InertiaReport {
                shape,
                mass,
                radius,
                height,
                inertia: inertia_of(shape, mass, radius, height)?,
            };
            let mut w = primary(&cli.out)?;
            output::write_json(&mut w, &report)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenTrace {
            k_y,
            mu,
            f_n,
            velocity,
            travel,
            rate,
            transition,
            tilt,
            dwell,
            noise,
            pressure,
            h_offset,
            v_offset,
            material,
        } => {
            let gen = SyntheticFriction {
                k_y,
                mu,
                f_n,
                velocity: velocity.map_or(2e-3, |v| units.length(v)),
                travel: travel.map_or(30e-3, |v| units.length(v)),
                sample_rate: rate,
                transition: units.length(transition),
                normal_tilt: units.angle(tilt),
                dwell,
                noise_sigma: noise,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut trace = gen.trace(|| rng.sample(StandardNormal))?;
            trace.metadata = TraceMetadata {
                pressure: pressure.map(|p| units.pressure(p)),
                contact_area: None,
                h_offset: h_offset.map(|v| units.length(v)),
                v_offset: v_offset.map(|v| units.length(v)),
                material,
            };
            let mut w = primary(&cli.out)?;
            trace::write_trace(&mut w, &trace)?;
            finish(w)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
