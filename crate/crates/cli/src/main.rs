mod coframe_file;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acm5_core::family::{replay, structure_equations, verify_identification, Certificate};
use acm5_core::scalar::parse_rational;
use acm5_core::{build, d_squared_zero, identify_group, Coframe, Error, FamilyParams};
use clap::{ArgGroup, Parser, Subcommand};

use coframe_file::CoframeFile;
use report::{Numbers, Style};

#[derive(Parser)]
#[command(name = "acm5", version, about = "Almost contact metric structures on 5-dimensional coframes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a coframe file against the schema and verify d^2 = 0.
    Validate { file: PathBuf },
    /// Intrinsic torsion, class, predicates and characteristic connection.
    #[command(group(ArgGroup::new("format").args(["json", "text"])))]
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        text: bool,
        /// Print decimal approximations instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// The four-parameter family of structure equations.
    #[command(group(ArgGroup::new("action").required(true).args(["emit", "verify", "identify"])))]
    Family {
        #[arg(long, num_args = 4, value_names = ["A1", "A2", "A3", "A4"], allow_hyphen_values = true, required = true)]
        params: Vec<String>,
        /// Write the structure equations as a coframe file.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
        /// Recompute and check every identity of the family.
        #[arg(long)]
        verify: bool,
        /// Identify the Lie algebra of the group and check its certificate.
        #[arg(long)]
        identify: bool,
    },
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IntegrabilityConstraint { .. } | Error::Degenerate(_) => usage(e.to_string()),
            _ => failed(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Coframe, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file = coframe_file::parse(&text).map_err(|e| failed(format!("{}: {e}", path.display())))?;
    file.to_coframe().map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn validate(path: &Path) -> Result<(), Failure> {
    let coframe = load(path)?;
    let report = d_squared_zero(&coframe)?;
    let failures: Vec<String> = report
        .failures()
        .map(|(name, f)| format!("d^2 {name} = {} (expected 0)", coframe.render(f)))
        .collect();
    if failures.is_empty() {
        println!("{}: valid, d^2 = 0 on {}", path.display(), report.entries.len());
        Ok(())
    } else {
        Err(failed(failures.join("\n")))
    }
}

fn classify(path: &Path, json: bool, float: bool) -> Result<(), Failure> {
    let coframe = load(path)?;
    let d2 = d_squared_zero(&coframe)?;
    if let Some((name, _)) = d2.failures().next() {
        return Err(failed(format!("{}: d^2 {name} != 0; run `acm5 validate` for details", path.display())));
    }
    let numbers = if float { Numbers::Float } else { Numbers::Exact };
    let r = report::build(&coframe, numbers)?;
    let text = if json {
        serde_json::to_string_pretty(&r).map_err(|e| failed(e.to_string()))? + "\n"
    } else {
        report::render_text(&r, &Style::from_env())
    };
    write_stdout(&text)
}

/// Like `print!`, but a closed pipe is not an error.
fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(failed(e.to_string())),
        _ => Ok(()),
    }
}

fn parse_params(raw: &[String]) -> Result<FamilyParams, Failure> {
    let values = raw
        .iter()
        .map(|s| parse_rational(s).map_err(|e| usage(format!("--params: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let [a1, a2, a3, a4]: [_; 4] = values.try_into().map_err(|_| usage("--params takes four values"))?;
    Ok(FamilyParams::new(a1, a2, a3, a4)?)
}

fn family(raw: &[String], emit: Option<&Path>, verify: bool, identify: bool) -> Result<(), Failure> {
    let params = parse_params(raw)?;
    if let Some(path) = emit {
        let file = CoframeFile::from_coframe(&structure_equations(params.values()));
        let text = serde_json::to_string_pretty(&file).map_err(|e| failed(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?;
        println!("wrote {} for parameters {params}", path.display());
    }
    if verify {
        let style = Style::from_env();
        let inst = build(params.clone())?;
        let report = replay(&inst)?;
        let lines: String = report
            .items
            .iter()
            .map(|item| match item.detail.as_str() {
                "" => format!("{} {}\n", style.verdict(item.passed), item.name),
                d => format!("{} {}: {d}\n", style.verdict(item.passed), item.name),
            })
            .collect();
        write_stdout(&lines)?;
        let bad = report.failures().len();
        if bad > 0 {
            return Err(failed(format!("{bad} of {} checks failed for {params}", report.items.len())));
        }
        println!("all {} checks passed for {params}", report.items.len());
    }
    if identify {
        let id = identify_group(&params)?;
        println!("{}", id.label());
        println!("case: {}", id.case);
        match &id.certificate {
            Certificate::Emitted(_) => {
                if !verify_identification(&params, &id)? {
                    return Err(failed("certificate: emitted but rejected by the frame-change check"));
                }
                println!("certificate: emitted, verified");
            }
            Certificate::NotEmitted(why) => println!("certificate: {why}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Classify { file, json, text: _, float } => classify(file, *json, *float),
        Command::Family {
            params,
            emit,
            verify,
            identify,
        } => family(params, emit.as_deref(), *verify, *identify),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
