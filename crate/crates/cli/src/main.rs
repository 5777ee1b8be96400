mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;

const GRAMMAR: &str = "\
Symbol grammar (whitespace ignored):
  expr   := sign? term (sign term)*
  term   := coeff ('*'? var power?)? | var power?
  coeff  := atom | '(' sign? atom (sign atom)* ')'
  atom   := number ('/' number)? 'i'? | 'i'
  var    := z | t | zeta | tau
  power  := '^' (sign? integer | '(' sign? integer ')')
With --convention zeta_inverse (default) the text is p(1/zeta): a term c*z^k
sets a_{-k} = c. With --convention direct it sets a_k = c.
Example: \"2i*z^-1 + z^2 + 7/10*z^3\".

Region literals: whole | disk:cx,cy,r | annulus:cx,cy,r_in,r_out |
  halfplane:angle,offset (Re(z e^{-i angle}) >= offset) |
  polygon:x1,y1,x2,y2,... | tube:tau (distance to the symbol curve < tau)

Exit codes: 0 success, 2 configuration error, 3 numerical failure.";

#[derive(Debug, Parser)]
#[command(
    name = "toeplab",
    version,
    about = "Spectra of randomly perturbed Toeplitz band matrices",
    after_help = GRAMMAR
)]
struct Cli {
    /// Read settings from a TOML file; flags given on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the merged settings as TOML to this file, then run
    #[arg(long, global = true)]
    dump_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Experiment {
    Weyl,
    Tube,
    Tail,
    Jordan,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the eigenvalues of P_N (or of P_N + delta Q, or of the circulant)
    #[command(after_help = GRAMMAR)]
    Spectrum {
        /// Print the closed-form spectrum of the N x N circulant instead
        #[arg(long)]
        circulant: bool,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Eigenvalues of one perturbation P_N + delta Q, with dumps and plot
    #[command(after_help = GRAMMAR)]
    Perturb {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Eigenvalue counts in regions against the Weyl-law prediction
    #[command(after_help = GRAMMAR)]
    Weyl {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Eigenvalues outside the tube of radius N^(-1+epsilon) about the curve
    #[command(after_help = GRAMMAR)]
    Tube {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Grid of log10 s_min(P_N - z)
    #[command(after_help = GRAMMAR)]
    Pseudo {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Resolvent kernels K_infinity(z; k) and K_N(z; k)
    #[command(after_help = GRAMMAR)]
    Kernel {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Grushin blocks, weight functions and the determinant factorization
    #[command(after_help = GRAMMAR)]
    Grushin {
        /// Print lhs, rhs and |lhs - rhs| of the log-determinant factorization
        #[arg(long)]
        check_factorization: bool,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Quasimode residuals at nonzero winding number
    #[command(after_help = GRAMMAR)]
    Quasimode {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Logarithmic potentials of the perturbed spectrum and of the curve
    #[command(after_help = GRAMMAR)]
    Potential {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Seeded campaigns over the N sweep and delta ladder (--seed required)
    #[command(after_help = GRAMMAR)]
    Montecarlo {
        /// Which experiment to run
        #[arg(long, value_enum, default_value_t = Experiment::Weyl)]
        experiment: Experiment,
        #[command(flatten)]
        run: RunConfig,
    },
}

impl Command {
    fn run_config(&mut self) -> &mut RunConfig {
        match self {
            Command::Spectrum { run, .. }
            | Command::Perturb { run }
            | Command::Weyl { run }
            | Command::Tube { run }
            | Command::Pseudo { run }
            | Command::Kernel { run }
            | Command::Grushin { run, .. }
            | Command::Quasimode { run }
            | Command::Potential { run }
            | Command::Montecarlo { run, .. } => run,
        }
    }
}

fn execute(cli: Cli) -> toeplab::Result<()> {
    let Cli {
        config,
        dump_config,
        mut command,
    } = cli;
    let base = match &config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let merged = std::mem::take(command.run_config()).over(base);
    merged.validate_emit()?;
    if let Some(path) = &dump_config {
        merged.dump(path)?;
    }
    let cfg = &merged;
    match command {
        Command::Spectrum { circulant, .. } => commands::spectrum(cfg, circulant),
        Command::Perturb { .. } => commands::perturb(cfg),
        Command::Weyl { .. } => commands::weyl(cfg),
        Command::Tube { .. } => commands::tube(cfg),
        Command::Pseudo { .. } => commands::pseudo(cfg),
        Command::Kernel { .. } => commands::kernel(cfg),
        Command::Grushin {
            check_factorization,
            ..
        } => commands::grushin(cfg, check_factorization),
        Command::Quasimode { .. } => commands::quasimode(cfg),
        Command::Potential { .. } => commands::potential(cfg),
        Command::Montecarlo { experiment, .. } => commands::montecarlo(cfg, experiment),
    }
}

fn variant_name(e: &toeplab::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn hint(e: &toeplab::Error) -> Option<&'static str> {
    use toeplab::Error::*;
    Some(match e {
        Parse(_) => "check the expression against the grammar in --help",
        OnSpectrum { .. } | OnCurve { .. } | RootsOnCircle { .. } => {
            "move z away from the symbol curve"
        }
        NonConvergence { .. } | QuadratureStall { .. } => {
            "try a smaller N or a point farther from the curve"
        }
        NeumannDivergence { .. } => "lower delta or move z farther from the spectrum",
        SuspectBoundary { .. } => "the region boundary is tangent to the curve; move or resize it",
        WrongIndexSign { .. } => "quasimodes need a point with nonzero winding number",
        TooLarge { .. } => "reduce the problem size",
        _ => return None,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", variant_name(&e));
            if let Some(h) = hint(&e) {
                eprintln!("hint: {h}");
            }
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
