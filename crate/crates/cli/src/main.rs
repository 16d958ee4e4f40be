//! `hlk`: check instance files, generate families, build extensions and
//! compute cohomology.
//!
//! Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 malformed input,
//! 3 usage error or suite/type mismatch.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use hlk_core::algebroid::check_algebroid_axioms;
use hlk_core::connection::check_algebroid_connection;
use hlk_core::extension::{build_extension, check_length_one, verify_extension, LengthOneRuth};
use hlk_core::forms::{check_complex, cohomology_dims, compatibility_residual, differential};
use hlk_core::homlie::check_hom_lie_axioms;
use hlk_core::io::{hom_lie_doc, load_instance, to_json_string, AnyConnection, Instance};
use hlk_core::report::Report;
use hlk_core::ruth::structure_residuals;
use hlk_core::sample::generate_family;
use hlk_core::{connection::check_connection, Error};

#[derive(Parser)]
#[command(name = "hlk", version, about = "Exact checks for hom-Lie algebras, algebroids and their representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite on an instance file.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
    },
    /// Emit a member of a named family.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated `key=value` pairs, e.g. `lambda=2,mu=1/2` or `dim=4,seed=7`.
        #[arg(long, default_value = "")]
        params: String,
        /// Output file; standard output when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Build the extension algebra of a length-one representation up to homotopy.
    Extend {
        ruth: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Build even when the hypotheses fail.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
    },
    /// Dimensions of the cohomology of the Θ-compatible complex.
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Axioms,
    Connection,
    Complex,
    Ruth,
    Extension,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Abelian,
    Heisenberg,
    Affine,
    Random,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Abelian => "abelian",
            Family::Heisenberg => "heisenberg",
            Family::Affine => "affine",
            Family::Random => "random",
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Malformed(_) | Error::MalformedBase(_) | Error::Dimension(_) | Error::SingularTwist(_) => 2,
            Error::NotLengthOne(_) | Error::InvalidParams(_) | Error::BaseMismatch => 3,
            Error::NotRepresentation(_) | Error::Precondition(_) | Error::NotAComplex(_) | Error::Unsatisfiable(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure { code: 2, message: format!("{e:#}") }
    }
}

fn mismatch(suite: &str, kind: &str) -> Failure {
    Failure { code: 3, message: format!("suite {suite} does not apply to instances of type {kind}") }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Axioms => "axioms",
        Suite::Connection => "connection",
        Suite::Complex => "complex",
        Suite::Ruth => "ruth",
        Suite::Extension => "extension",
    }
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", to_json_string(&report.to_json())),
    }
}

fn status(report: &Report) -> u8 {
    if report.all_passed() {
        0
    } else {
        1
    }
}

fn alpha_form_report(c: &hlk_core::connection::Connection, form: &hlk_core::forms::Form) -> Report {
    let theta = c.algebra().twist();
    let alpha = c.alpha().matrix();
    let mut rep = check_complex(c);
    let w = compatibility_residual(theta, alpha, form).first_nonzero().map(|v| format!("α∘ω − Θ*ω at {v}"));
    rep.record("form-compatibility", w);
    let dw = differential(c, form);
    let w = compatibility_residual(theta, alpha, &dw).first_nonzero().map(|v| format!("α∘dω − Θ*dω at {v}"));
    rep.record("form-alpha-rule", w);
    let w = differential(c, &dw).first_nonzero().map(|v| format!("d²ω at {v}"));
    rep.record("form-d-squared", w);
    rep
}

/// Hypotheses, then the verification of the built extension (built with force
/// so that failing hypotheses still produce a diagnosable algebra).
fn extension_report(l: &LengthOneRuth, force: bool) -> Result<(Report, Option<hlk_core::extension::Extension>), Failure> {
    let hyp = check_length_one(l);
    let mut rep = Report::new("extension");
    let hyp_ok = hyp.all_passed();
    rep.absorb("hypothesis-", hyp);
    if !hyp_ok && !force {
        return Ok((rep, None));
    }
    let ext = build_extension(l, true)?;
    rep.absorb("", verify_extension(&ext, Some(l.algebra()))?);
    Ok((rep, Some(ext)))
}

fn cmd_check(file: &Path, suite: Suite, format: Format) -> Result<u8, Failure> {
    let inst = load_instance(file)?;
    let kind = inst.type_name();
    let name = suite_name(suite);
    let report = match (suite, inst) {
        (Suite::Axioms, Instance::HomLieAlgebra { algebra, .. }) => check_hom_lie_axioms(&algebra),
        (Suite::Axioms, Instance::HomLieAlgebroid(a)) => check_algebroid_axioms(&a)?,
        (Suite::Extension, Instance::HomLieAlgebra { extension: Some(e), .. }) => verify_extension(&e, None)?,
        (Suite::Connection, Instance::Connection(AnyConnection::Plain(c))) => check_connection(&c),
        (Suite::Connection, Instance::Connection(AnyConnection::Algebroid(c))) => check_algebroid_connection(&c),
        (Suite::Complex, Instance::Connection(AnyConnection::Plain(c))) => check_complex(&c),
        (Suite::Complex, Instance::AlphaForm { connection: AnyConnection::Plain(c), form }) => alpha_form_report(&c, &form),
        (Suite::Ruth, Instance::Ruth(r)) => structure_residuals(&r),
        (Suite::Extension, Instance::Ruth(r)) => extension_report(&LengthOneRuth::new(r)?, true)?.0,
        _ => return Err(mismatch(name, kind)),
    };
    emit(&report, format);
    Ok(status(&report))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(|e| Failure { code: 2, message: format!("{e:#}") }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(family: Family, params: &str, output: Option<&Path>) -> Result<u8, Failure> {
    let env_seed = match std::env::var("HLK_SEED") {
        Ok(s) => Some(
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure { code: 3, message: format!("HLK_SEED must be a non-negative integer, got \"{s}\"") })?,
        ),
        Err(_) => None,
    };
    let g = generate_family(family.name(), params, env_seed)?;
    write_output(output, &to_json_string(&hom_lie_doc(&g, None)))?;
    Ok(0)
}

fn cmd_extend(ruth: &Path, output: &Path, force: bool, format: Format) -> Result<u8, Failure> {
    let r = match load_instance(ruth)? {
        Instance::Ruth(r) => r,
        other => return Err(mismatch("extend", other.type_name())),
    };
    let l = LengthOneRuth::new(r)?;
    let (rep, ext) = extension_report(&l, force)?;
    if let Some(e) = &ext {
        write_output(Some(output), &to_json_string(&hom_lie_doc(&e.algebra, Some(e))))?;
    }
    emit(&rep, format);
    Ok(status(&rep))
}

fn cmd_cohomology(file: &Path, max_degree: usize) -> Result<u8, Failure> {
    let c = match load_instance(file)? {
        Instance::Connection(AnyConnection::Plain(c)) | Instance::AlphaForm { connection: AnyConnection::Plain(c), .. } => c,
        other => return Err(mismatch("cohomology", other.type_name())),
    };
    let dims = cohomology_dims(&c, max_degree)?;
    for (p, d) in dims.iter().enumerate() {
        println!("H^{p}: {d}");
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { file, suite, report } => cmd_check(&file, suite, report),
        Command::Generate { family, params, output } => cmd_generate(family, &params, output.as_deref()),
        Command::Extend { ruth, output, force, report } => cmd_extend(&ruth, &output, force, report),
        Command::Cohomology { file, max_degree } => cmd_cohomology(&file, max_degree),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
