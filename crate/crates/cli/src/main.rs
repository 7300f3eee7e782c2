use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pdrazin_cli::commands::{self, parse_dims, FuzzArgs, GenArgs};
use pdrazin_cli::{tolerances_from_env, CliError, Exit, Outcome};
use pdrazin_core::verify::parse_scalar;
use pdrazin_core::{Complex64, ContextKind};

#[derive(Parser)]
#[command(
    name = "pdrazin",
    version,
    about = "Drazin and pseudo-Drazin inverses: compute, verify, fuzz"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inverse, indices and spectral idempotent of one element.
    Compute {
        file: PathBuf,
        name: String,
        #[arg(long)]
        json: bool,
    },
    /// Checks one identity on the instance in FILE.
    Verify {
        file: PathBuf,
        identity: String,
        #[arg(long)]
        json: bool,
    },
    /// Checks an identity on generated instances.
    Fuzz {
        identity: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Representation sizes, `LO..HI`.
        #[arg(long, default_value = "2..8")]
        dims: String,
        #[arg(long, default_value = "FullMatrix")]
        context: String,
        /// `RE,IM`, `RE` or `i`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Where counterexample instance files are written.
        #[arg(long, default_value = "counterexamples")]
        out_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Writes a generated instance file.
    Gen {
        /// index, commuting, orthogonal, family, radical, lambda, or an identity tag.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "FullMatrix")]
        context: String,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn lambda_arg(s: Option<&str>) -> Result<Option<Complex64>, CliError> {
    s.map(|s| parse_scalar(s).map_err(CliError::input))
        .transpose()
}

fn context_arg(s: &str) -> Result<ContextKind, CliError> {
    s.parse().map_err(CliError::input)
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    Ok(match cli.command {
        Command::Compute { file, name, json } => {
            commands::compute(&file, &name, json, tolerances_from_env()?)
        }
        Command::Verify {
            file,
            identity,
            json,
        } => commands::verify_file(&file, &identity, json, tolerances_from_env()?),
        Command::Fuzz {
            identity,
            count,
            seed,
            dims,
            context,
            lambda,
            out_dir,
            json,
        } => {
            let args = FuzzArgs {
                identity,
                count,
                seed,
                dims: parse_dims(&dims)?,
                context: context_arg(&context)?,
                lambda: lambda_arg(lambda.as_deref())?,
                out_dir,
            };
            commands::fuzz(&args, json, tolerances_from_env()?)
        }
        Command::Gen {
            kind,
            dim,
            seed,
            context,
            target,
            lambda,
            out,
        } => commands::gen(&GenArgs {
            kind,
            context: context_arg(&context)?,
            dim,
            seed,
            target,
            lambda: lambda_arg(lambda.as_deref())?,
            out,
        }),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                Exit::Input
            } else {
                Exit::Pass
            };
            return ExitCode::from(code.code() as u8);
        }
    };
    let outcome = dispatch(cli).unwrap_or_else(|e| Outcome::from_error(&e));
    let result = if outcome.exit <= Exit::IdentityFailure {
        std::io::stdout().write_all(outcome.text.as_bytes())
    } else {
        std::io::stderr().write_all(outcome.text.as_bytes())
    };
    if result.is_err() {
        return ExitCode::from(Exit::Input.code() as u8);
    }
    ExitCode::from(outcome.exit.code() as u8)
}
