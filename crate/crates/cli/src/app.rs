//! Command dispatch. Everything the binary does goes through [`run`], which
//! returns the exit code and captured output so tests can drive it
//! in-process.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hypiso_core::classify::{realizable, Answer, GroupClass, PlanarEnds, SurfaceDescriptor, SurfaceGenus, Verdict};
use hypiso_core::dot::to_dot;
use hypiso_core::endspace::EndSpace;
use hypiso_core::grouptable::{FiniteGroup, VcGroup};
use hypiso_core::synth::{build_x, build_x_gamma, build_y, GluingComplex, GroupSource, SynthError, SCHEMA_VERSION};
use hypiso_core::verify::{verify, Report, Status};

use crate::criteria;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_OUT_OF_SCOPE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hypiso", version, about = "Isometry groups of infinite-genus hyperbolic surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide which groups a surface realizes.
    Classify(ClassifyArgs),
    /// Build a gluing complex.
    Build(BuildArgs),
    /// Re-check every invariant of a complex file.
    Verify(FileArgs),
    /// Re-serialize a complex file as DOT or JSON.
    Export(FileArgs),
    /// Run the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    X,
    Y,
    Xgamma,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// End space: `w^a*d+1` shorthand, `cantor`, or JSON.
    #[arg(long)]
    pub ends: String,
    /// `finite[:N]`, `vc`, `countable`, `uncountable`, `builtin:NAME`, or a table file.
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value = "infinite")]
    pub genus: String,
    #[arg(long, default_value = "0")]
    pub planar: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub ends: String,
    /// `builtin:NAME` or a table file; infinite groups via `builtin:Z`, `builtin:Dinf`, `builtin:ZxF`.
    #[arg(long)]
    pub group: String,
    #[arg(long, value_enum, default_value = "x")]
    pub construction: Construction,
    /// Edge pieces per Cayley edge.
    #[arg(long = "M", default_value_t = 2)]
    pub m: u64,
    /// Word-metric ball radius for infinite groups.
    #[arg(long = "R", default_value_t = 3)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write DOT to this path.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn parse_err(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_PARSE,
        message: message.to_string(),
    }
}

fn scope_err(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_OUT_OF_SCOPE,
        message: message.to_string(),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

/// A parsed `--group` argument.
#[derive(Debug, Clone)]
pub enum GroupArg {
    Class(GroupClass),
    Finite(FiniteGroup),
    Vc(VcGroup),
}

pub fn parse_group(s: &str) -> Result<GroupArg, CliError> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    match lower.as_str() {
        "finite" => return Ok(GroupArg::Class(GroupClass::Finite { order: None })),
        "vc" | "virtually_cyclic" | "virtually-cyclic" => return Ok(GroupArg::Class(GroupClass::VirtuallyCyclic)),
        "countable" | "countable_infinite" => return Ok(GroupArg::Class(GroupClass::CountableInfinite)),
        "uncountable" => return Ok(GroupArg::Class(GroupClass::Uncountable)),
        _ => {}
    }
    if let Some(n) = lower.strip_prefix("finite:") {
        let order: usize = n.parse().map_err(|_| parse_err(format!("bad group order {n:?}")))?;
        if order == 0 {
            return Err(parse_err("group order must be positive"));
        }
        return Ok(GroupArg::Class(GroupClass::Finite { order: Some(order) }));
    }
    if let Some(name) = t.strip_prefix("builtin:") {
        return match FiniteGroup::builtin(name) {
            Ok(g) => Ok(GroupArg::Finite(g)),
            Err(finite) => VcGroup::builtin(name)
                .map(GroupArg::Vc)
                .map_err(|_| parse_err(finite)),
        };
    }
    let path = Path::new(t);
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        match FiniteGroup::from_json(&text) {
            Ok(g) => Ok(GroupArg::Finite(g)),
            Err(finite) => VcGroup::from_json(&text)
                .map(GroupArg::Vc)
                .map_err(|vc| parse_err(format!("{finite}; as a virtually cyclic descriptor: {vc}"))),
        }
    } else {
        FiniteGroup::from_csv(&text).map(GroupArg::Finite).map_err(parse_err)
    }
}

fn parse_ends(s: &str) -> Result<EndSpace, CliError> {
    EndSpace::parse_cli(s).map_err(parse_err)
}

fn parse_genus(s: &str) -> Result<SurfaceGenus, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "infinite" | "inf" => Ok(SurfaceGenus::Infinite),
        n => n
            .parse()
            .map(SurfaceGenus::Finite)
            .map_err(|_| parse_err(format!("bad genus {s:?}"))),
    }
}

fn parse_planar(s: &str) -> Result<PlanarEnds, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "infinite" | "inf" => Ok(PlanarEnds::Infinite),
        n => n
            .parse()
            .map(PlanarEnds::Count)
            .map_err(|_| parse_err(format!("bad planar end count {s:?}"))),
    }
}

/// Verdict JSON with the run's schema version and seed.
#[derive(Serialize)]
struct VerdictArtifact<'a> {
    schema_version: u32,
    seed: u64,
    #[serde(flatten)]
    verdict: &'a Verdict,
}

fn verdict_text(v: &Verdict) -> String {
    let answer = match v.answer {
        Answer::Realizable => "realizable",
        Answer::NotRealizable => "not realizable",
        Answer::Inconclusive => "inconclusive",
        Answer::OutOfScope => "out of scope",
    };
    let mut out = answer.to_string();
    if let Some(c) = v.allowed_class {
        out.push_str(&format!(" (allowed: {})", serde_json::to_value(c).expect("class").as_str().unwrap_or("")));
    }
    if !v.citations.is_empty() {
        out.push_str(&format!(" [{}]", v.citations.join(", ")));
    }
    for f in &v.flags {
        out.push_str(&format!(" {{{f}}}"));
    }
    out.push('\n');
    for n in &v.notes {
        out.push_str(&format!("  {n}\n"));
    }
    out
}

pub fn classify(args: &ClassifyArgs) -> Result<(String, Verdict), CliError> {
    let ends = parse_ends(&args.ends)?;
    let group = match parse_group(&args.group)? {
        GroupArg::Class(c) => c,
        GroupArg::Finite(g) => GroupClass::Specific { group: g },
        GroupArg::Vc(_) => GroupClass::VirtuallyCyclic,
    };
    let surface = SurfaceDescriptor {
        genus: parse_genus(&args.genus)?,
        ends,
        planar_ends: parse_planar(&args.planar)?,
    };
    let verdict = realizable(&surface, &group);
    let text = match args.format {
        Format::Text => verdict_text(&verdict),
        Format::Json => {
            let artifact = VerdictArtifact {
                schema_version: SCHEMA_VERSION,
                seed: args.seed,
                verdict: &verdict,
            };
            serde_json::to_string_pretty(&artifact).expect("verdict serializes") + "\n"
        }
        Format::Dot => return Err(parse_err("classify has no DOT output")),
    };
    Ok((text, verdict))
}

fn synth_err(e: SynthError) -> CliError {
    match e {
        SynthError::Json(_) | SynthError::SchemaVersion(_) => parse_err(e),
        SynthError::TruncationTooSmall => parse_err(e),
        _ => scope_err(e),
    }
}

pub fn build(args: &BuildArgs) -> Result<GluingComplex, CliError> {
    let ends = parse_ends(&args.ends)?;
    let group = match parse_group(&args.group)? {
        GroupArg::Class(_) => return Err(parse_err("build needs a concrete group: builtin:NAME or a table file")),
        GroupArg::Finite(g) => GroupSource::Finite { group: g },
        GroupArg::Vc(g) => GroupSource::Ball { group: g },
    };
    match args.construction {
        Construction::X => build_x(&ends, group, args.m, args.r, args.seed).map_err(synth_err),
        Construction::Y => build_y(&ends, group, args.m, args.r, args.seed).map_err(synth_err),
        Construction::Xgamma => {
            let GroupSource::Ball { group } = group else {
                return Err(scope_err("the two-ended construction needs an infinite virtually cyclic group"));
            };
            let cs = ends
                .countable_system()
                .ok_or_else(|| scope_err("the two-ended construction needs a countable end space"))?;
            build_x_gamma(&group, &cs, args.r, args.seed).map_err(synth_err)
        }
    }
}

fn read_complex(path: &Path) -> Result<GluingComplex, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    GluingComplex::from_json(&text).map_err(parse_err)
}

fn report_text(r: &Report) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        out.push_str(&format!("{tag} {}\n", c.name));
        for d in &c.details {
            out.push_str(&format!("  {d}\n"));
        }
    }
    out.push_str(if r.passed() { "ok\n" } else { "verification failed\n" });
    out
}

fn emit(out: &mut Outcome, text: String, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            out.stdout.push_str(&text);
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli, out: &mut Outcome) -> Result<i32, CliError> {
    match &cli.command {
        Command::Classify(args) => {
            let (text, verdict) = classify(args)?;
            emit(out, text, args.output.as_deref())?;
            Ok(if verdict.answer == Answer::OutOfScope { EXIT_OUT_OF_SCOPE } else { EXIT_OK })
        }
        Command::Build(args) => {
            let c = build(args)?;
            let text = match args.format {
                Format::Json => c.to_json() + "\n",
                Format::Dot => to_dot(&c),
                Format::Text => return Err(parse_err("build writes json or dot")),
            };
            emit(out, text, args.output.as_deref())?;
            if let Some(p) = &args.dot {
                std::fs::write(p, to_dot(&c)).map_err(|e| io_err(p, e))?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let c = read_complex(&args.input)?;
            let report = verify(&c, args.jobs.max(1));
            let text = match args.format.unwrap_or(Format::Text) {
                Format::Text => report_text(&report),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                Format::Dot => return Err(parse_err("verify writes text or json")),
            };
            emit(out, text, args.output.as_deref())?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Export(args) => {
            let c = read_complex(&args.input)?;
            let text = match args.format.unwrap_or(Format::Dot) {
                Format::Dot => to_dot(&c),
                Format::Json => c.to_json() + "\n",
                Format::Text => return Err(parse_err("export writes dot or json")),
            };
            emit(out, text, args.output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Selftest(args) => {
            let results = criteria::all(args.jobs.max(1));
            let text = match args.format {
                Format::Json => serde_json::to_string_pretty(&results).expect("results serialize") + "\n",
                _ => results.iter().map(|r| format!("{r}\n")).collect(),
            };
            out.stdout.push_str(&text);
            Ok(if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

/// Runs one command.
pub fn run(cli: &Cli) -> Outcome {
    let mut out = Outcome::default();
    match dispatch(cli, &mut out) {
        Ok(code) => out.code = code,
        Err(e) => {
            out.code = e.code;
            out.stderr = format!("error: {}\n", e.message);
        }
    }
    out
}

/// Parses `args` (without the program name) and runs them. Usage errors
/// exit with the parse code.
pub fn run_args<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("hypiso")).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            Outcome {
                code,
                stdout: if code == EXIT_OK { text.clone() } else { String::new() },
                stderr: if code == EXIT_OK { String::new() } else { text },
            }
        }
    }
}
