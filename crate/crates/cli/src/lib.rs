//! `hyptri` command line.

pub mod config;
mod congr;
mod geometry;
mod tri;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::Config;

pub const OUTPUT_ENV: &str = "HYPTRI_OUT";

#[derive(Parser, Debug)]
#[command(name = "hyptri", version, about = "Ideal triangulations, ananas trees, horoball packings and congruence searches")]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the configuration file.
    #[arg(long, global = true, env = OUTPUT_ENV)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Drilled ananas construction and tree walks.
    #[command(subcommand)]
    Ananas(AnanasCmd),
    /// Resting ball, cusp cellulation and problematic bound.
    #[command(subcommand)]
    Canonical(CanonicalCmd),
    /// Iterated coning of a polyhedral complex.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Triangulation files.
    #[command(subcommand)]
    Tri(TriCmd),
    /// Farey triangles.
    #[command(subcommand)]
    Farey(FareyCmd),
    /// Number-field congruence searches.
    #[command(subcommand)]
    Congr(CongrCmd),
}

#[derive(Args, Debug)]
pub struct LatticeArgs {
    /// Lattice modulus `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: String,
}

#[derive(Subcommand, Debug)]
pub enum AnanasCmd {
    Build {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Boundary Farey triangle `p1/q1,p2/q2,p3/q3`; default is the Delaunay one.
        #[arg(long)]
        triangle: Option<String>,
        /// Diagonal slope for a rectangular lattice (`1/1` or `-1/1`).
        #[arg(long, allow_hyphen_values = true)]
        diagonal: Option<String>,
    },
    Walk {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        triangle: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        diagonal: Option<String>,
        /// Word over {L, R}.
        #[arg(long)]
        path: String,
        #[arg(long, value_enum, default_value = "tri")]
        emit: Emit,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Tri,
    Svg,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum CanonicalCmd {
    Rest {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Euclidean height of the horoball at infinity.
        #[arg(long)]
        height: f64,
    },
    Cellulation {
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    Bound {
        /// Orthogeodesic length.
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[command(flatten)]
        lattice: LatticeArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConeCmd {
    Run {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        order: PathBuf,
        #[arg(long)]
        diagonals: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MoveKind {
    #[value(name = "23")]
    TwoThree,
    #[value(name = "32")]
    ThreeTwo,
    #[value(name = "44")]
    FourFour,
}

#[derive(Subcommand, Debug)]
pub enum TriCmd {
    Verify {
        file: PathBuf,
    },
    Move {
        file: PathBuf,
        /// `cell:face` (23), `cell:i-j` (32) or `cell:i-j:diagonal` (44).
        #[arg(long)]
        site: String,
        #[arg(long, value_enum)]
        kind: MoveKind,
        /// Combinatorial move without shapes.
        #[arg(long)]
        force: bool,
        /// Output file name inside the output directory.
        #[arg(long, default_value = "moved.tri")]
        output: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum FareyCmd {
    Path {
        #[arg(long, default_value = "0/1,1/0,1/1")]
        start: String,
        #[arg(long, default_value = "")]
        turns: String,
    },
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    /// Monic minimal polynomial in `x`.
    #[arg(long, default_value = "x^2 + 1")]
    pub minpoly: String,
    /// Prime search bound; defaults to the configured one.
    #[arg(long)]
    pub bound: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum CongrCmd {
    /// Least prime with a residue field where λ has order exactly q.
    Order {
        #[command(flatten)]
        field: FieldArgs,
        /// Element as a polynomial in `a`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        q: u64,
        /// Elements whose images must be nonzero.
        #[arg(long, allow_hyphen_values = true)]
        nonzero: Vec<String>,
    },
    /// Finite quotient separating y from ℤ + ℤω.
    Separate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
    },
    /// Trace targets y± of a matrix `a,b;c,d`.
    Targets {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Loxodromic obstruction witness.
    Obstruct {
        #[command(flatten)]
        field: FieldArgs,
        /// Minimal polynomial of the field of ω.
        #[arg(long, default_value = "x^2 + 1")]
        omega_minpoly: String,
        #[arg(long, allow_hyphen_values = true, default_value = "a")]
        omega: String,
        /// `m,n,v` with y* = (m + nω)/v.
        #[arg(long, allow_hyphen_values = true)]
        coords: String,
        #[arg(long, value_enum)]
        track: TrackArg,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TrackArg {
    M,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::Inconclusive => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of one command: ordered records, printed and written to the result file.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub records: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.into(), status: Status::Verified, records: vec![], files: vec![] }
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.records.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.records.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("result {}\nstatus: {}\n", self.command, self.status.name());
        for (k, v) in &self.records {
            let _ = writeln!(s, "{k}: {v}");
        }
        for f in &self.files {
            let _ = writeln!(s, "file: {}", f.display());
        }
        s.push_str("end\n");
        s
    }
}

pub struct Context {
    pub config: Config,
    pub out: PathBuf,
}

impl Context {
    fn write(&self, report: &mut Report, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        report.files.push(path.clone());
        Ok(path)
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ananas(AnanasCmd::Build { .. }) => "ananas-build",
        Command::Ananas(AnanasCmd::Walk { .. }) => "ananas-walk",
        Command::Canonical(CanonicalCmd::Rest { .. }) => "canonical-rest",
        Command::Canonical(CanonicalCmd::Cellulation { .. }) => "canonical-cellulation",
        Command::Canonical(CanonicalCmd::Bound { .. }) => "canonical-bound",
        Command::Cone(_) => "cone-run",
        Command::Tri(TriCmd::Verify { .. }) => "tri-verify",
        Command::Tri(TriCmd::Move { .. }) => "tri-move",
        Command::Farey(_) => "farey-path",
        Command::Congr(CongrCmd::Order { .. }) => "congr-order",
        Command::Congr(CongrCmd::Separate { .. }) => "congr-separate",
        Command::Congr(CongrCmd::Targets { .. }) => "congr-targets",
        Command::Congr(CongrCmd::Obstruct { .. }) => "congr-obstruct",
    }
}

pub fn context(cli: &Cli) -> Result<Context> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let out = cli.out.clone().unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&out).with_context(|| format!("creating output directory {}", out.display()))?;
    Ok(Context { config, out })
}

pub fn execute(ctx: &Context, command: &Command) -> Result<Report> {
    let mut report = Report::new(command_name(command));
    match command {
        Command::Ananas(c) => geometry::ananas(ctx, c, &mut report)?,
        Command::Canonical(c) => geometry::canonical(ctx, c, &mut report)?,
        Command::Farey(c) => geometry::farey(c, &mut report)?,
        Command::Cone(c) => tri::cone(ctx, c, &mut report)?,
        Command::Tri(c) => tri::tri(ctx, c, &mut report)?,
        Command::Congr(c) => congr::congr(ctx, c, &mut report)?,
    }
    Ok(report)
}

/// Parses, runs, prints, writes the result file and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let ctx = match context(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let name = command_name(&cli.command);
    let result_path = ctx.out.join(format!("{name}.result"));
    match execute(&ctx, &cli.command) {
        Ok(report) => {
            for (k, v) in &report.records {
                println!("{k}: {v}");
            }
            println!("status: {}", report.status.name());
            if let Err(e) = std::fs::write(&result_path, report.to_text()) {
                eprintln!("error: writing {}: {e}", result_path.display());
                return 1;
            }
            report.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let _ = std::fs::write(&result_path, format!("result {name}\nstatus: error\nerror: {}\nend\n", format!("{e:#}").replace('\n', " ")));
            1
        }
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
