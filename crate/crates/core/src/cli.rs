//! Command-line front end.

use crate::exactgeom::{self as eg, Q};
use crate::flow::{self, Budget, Tracer};
use crate::modelfile::{self, ModelFile, ModelFileError, SimulationParams};
use crate::svg;
use crate::windtree::{self, WindTreeModel};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "windtree", version, about = "Unfold, certify and simulate periodic wind-tree billiards")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a model file and print its normalized form.
    Build(Common),
    /// Unfold the model and report the compact surface.
    Unfold(Common),
    /// Check the recurrence criterion and write a certificate.
    Certify(Common),
    /// Run seeded billiard trajectories and write statistics.
    Simulate(Common),
    /// Draw the obstacle grid, a trajectory and the unfolded surface.
    Plot(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Model file (TOML).
    pub model: PathBuf,
    /// Directory for output files; without it results go to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub directions: Option<usize>,
    /// Collisions per direction.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Return radius, an exact rational.
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<Q>,
    /// Also write SVG figures.
    #[arg(long)]
    pub svg: bool,
}

fn parse_epsilon(s: &str) -> Result<Q, String> {
    match eg::parse_q(s) {
        Some(v) if v > Q::from_integer(0.into()) => Ok(v),
        _ => Err(format!("`{s}` is not a positive rational")),
    }
}

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

struct Output<'a> {
    dir: Option<PathBuf>,
    stdout: &'a mut dyn Write,
}

impl Output<'_> {
    fn emit(&mut self, name: &str, content: &str, to_stdout: bool) -> Result<(), CliError> {
        match &self.dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                std::fs::write(d.join(name), content)?;
            }
            None if to_stdout => self.stdout.write_all(content.as_bytes())?,
            None => {}
        }
        Ok(())
    }
}

fn load(path: &Path) -> Result<(ModelFile, WindTreeModel), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    modelfile::load_model(&text).map_err(|e| match e {
        ModelFileError::Parse { .. } => CliError(format!("{}:{e}", path.display())),
        other => CliError(format!("{}: {other}", path.display())),
    })
}

fn simulation_params(file: &ModelFile, c: &Common) -> SimulationParams {
    let d = file.simulation.clone().unwrap_or_default();
    SimulationParams {
        directions: c.directions.unwrap_or(d.directions),
        budget: c.budget.unwrap_or(d.budget),
        seed: c.seed.unwrap_or(d.seed),
    }
}

fn summary(m: &WindTreeModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lattice = {} {}", m.lattice[0], m.lattice[1]);
    let _ = writeln!(s, "domain vertices = {}", m.domain.len());
    let _ = writeln!(s, "obstacles = {}", m.obstacles.len());
    let _ = writeln!(s, "unfolding constant n = {}", m.n());
    for (j, c) in m.decomposition.coeffs.iter().enumerate() {
        let _ = writeln!(s, "pair {} translation = ({}, {}) in lattice coordinates", j, c[0], c[1]);
    }
    if let Some(e) = &m.embedding {
        let _ = writeln!(s, "L pair: s1 = {}, s2 = {}, scale = {}, rotation = {} pi", e.s1, e.s2, eg::format_q(&e.scale), e.rotation);
    }
    s
}

fn run_command(cmd: &Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (Command::Build(c) | Command::Unfold(c) | Command::Certify(c) | Command::Simulate(c) | Command::Plot(c)) = cmd;
    let (file, model) = load(&c.model)?;
    let mut out = Output { dir: c.out.clone(), stdout };
    match cmd {
        Command::Build(_) => {
            out.emit("summary.txt", &summary(&model), true)?;
            out.emit("model.toml", &modelfile::serialize_model(&file), false)?;
            Ok(0)
        }
        Command::Unfold(_) => {
            let um = windtree::unfold_model(&model)?;
            let s = &um.x.surface;
            let mut t = summary(&model);
            let _ = writeln!(t, "copies = {}", um.x.copies());
            let _ = writeln!(t, "genus = {}", s.genus());
            for o in s.singular_orbits() {
                let _ = writeln!(t, "cone point: {} corners, angle {} x 2pi", o.corners.len(), o.cone_multiple);
            }
            let _ = writeln!(t, "relative homology rank = {}", um.basis.rank());
            for (l, g) in um.gamma.iter().enumerate() {
                let _ = writeln!(t, "gamma_{} = {:?}", l + 1, g.0);
            }
            out.emit("unfold.txt", &t, true)?;
            if c.svg {
                out.emit("unfolded.svg", &svg::render_unfolded(&um.x), false)?;
            }
            Ok(0)
        }
        Command::Certify(_) => {
            let cert = windtree::certify(&model)?;
            out.emit("certificate.txt", &cert.to_text(), true)?;
            Ok(if cert.valid() { 0 } else { 1 })
        }
        Command::Simulate(_) => {
            let p = simulation_params(&file, c);
            let eps = c.epsilon.as_ref().map_or(1.0, eg::q_to_f64);
            let start = flow::default_start(&model);
            let tracer = Tracer::new(&model);
            let stats = flow::simulate(&tracer, start, p.directions, Budget::collisions(p.budget), eps, p.seed)?;
            out.emit("stats.csv", &flow::stats_csv(&stats), true)?;
            if out.dir.is_some() && p.directions > 0 {
                let um = windtree::unfold_model(&model)?;
                let theta = flow::direction_for(p.seed, 0);
                let ct = flow::cover_trace(&model, &um, start, theta, Budget::collisions(p.budget))?;
                out.emit("trajectory.csv", &flow::trajectory_csv(&ct), false)?;
                if c.svg {
                    let short = flow::trace(&model, start, theta, Budget::collisions(p.budget.min(2000)))?;
                    out.emit("trajectory.svg", &svg::render_model(&model, 3, Some(&short)), false)?;
                }
            }
            Ok(0)
        }
        Command::Plot(_) => {
            let seed = c.seed.unwrap_or(0);
            let budget = c.budget.unwrap_or(200);
            let start = flow::default_start(&model);
            let tr = flow::trace(&model, start, flow::direction_for(seed, 0), Budget::collisions(budget))?;
            out.emit("model.svg", &svg::render_model(&model, 3, Some(&tr)), true)?;
            let um = windtree::unfold_model(&model)?;
            out.emit("unfolded.svg", &svg::render_unfolded(&um.x), false)?;
            Ok(0)
        }
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(&cli.command, stdout) {
        Ok(code) => code,
        Err(CliError(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
    }
}
