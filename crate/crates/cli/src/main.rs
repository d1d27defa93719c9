//! Command-line front end for sl2kirby.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage or input errors.

mod commands;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use sl2kirby::kirby::Flavor;

use report::Format;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "sl2kirby", version, about = "Exact sl(2) skein, weight-system and Ohtsuki-series computations")]
struct Cli {
    /// Worker threads; results do not depend on this value
    #[arg(long, global = true, env = "SL2KIRBY_THREADS")]
    threads: Option<usize>,

    /// Output layout
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Jones-Wenzl projectors, theta pairings and trivalent orthogonality
    #[command(group(ArgGroup::new("what").required(true).multiple(true).args(["jones_wenzl", "theta", "ortho"])))]
    Skein {
        /// Print f_n and its trace
        #[arg(long, value_name = "N")]
        jones_wenzl: Option<usize>,
        /// Theta pairing of an admissible triple
        #[arg(long, num_args = 3, value_names = ["I", "J", "K"])]
        theta: Option<Vec<usize>>,
        /// Coefficient of f_i in Y^(l)_(j,k) Y^(j,k)_(i)
        #[arg(long, num_args = 4, value_names = ["I", "J", "K", "L"])]
        ortho: Option<Vec<usize>>,
        /// Work modulo p instead of over the rationals
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Evaluate a spin network given as a movie of slices
    SpinEval {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// sl(2) weight system of a diagram
    #[command(group(ArgGroup::new("mode").required(true).args(["colors", "interpolate"])))]
    Weight {
        #[arg(long)]
        diagram: PathBuf,
        /// One color per circle
        #[arg(long, value_delimiter = ',')]
        colors: Option<Vec<usize>>,
        /// Also evaluate through the spin network and check the sign relation
        #[arg(long, requires = "colors")]
        skein: bool,
        #[arg(long)]
        prime: Option<u64>,
        /// Print the weight polynomial in α_i = λ_i + 1
        #[arg(long)]
        interpolate: bool,
    },
    /// Kirby weight systems ω^(p)
    #[command(group(ArgGroup::new("mode").required(true).args(["diagram", "check_pair", "check_slide"])))]
    Kirby {
        #[arg(long)]
        diagram: Option<PathBuf>,
        /// Two diagram sums that must have equal ω^(p)
        #[arg(long, num_args = 2, value_names = ["F1", "F2"])]
        check_pair: Option<Vec<PathBuf>>,
        /// Slide the donor circle over the receiver and compare
        #[arg(long, requires_all = ["donor", "receiver"])]
        check_slide: Option<PathBuf>,
        #[arg(long)]
        donor: Option<usize>,
        #[arg(long)]
        receiver: Option<usize>,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value = "sl2")]
        flavor: Flavor,
    },
    /// Formal Gaussian integration of a series in α_1..α_L
    #[command(allow_negative_numbers = true)]
    Gauss {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        framings: Vec<i64>,
        #[arg(long)]
        order: usize,
    },
    /// Compare modular sequences with a rational limit
    #[command(allow_negative_numbers = true)]
    #[command(group(ArgGroup::new("mode").required(true).args(["sequence", "diagram"])))]
    Fermat {
        /// Directory of *.fpseries files
        #[arg(long, requires = "limit")]
        sequence: Option<PathBuf>,
        /// Limit series file
        #[arg(long)]
        limit: Option<PathBuf>,
        /// Diagram for the strong Fermat check
        #[arg(long, requires_all = ["framing", "primes"])]
        diagram: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        framing: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long, default_value = "sl2")]
        flavor: Flavor,
        /// Write the sequences and the limit into this directory
        #[arg(long, requires = "diagram")]
        emit: Option<PathBuf>,
    },
    /// F and O of a framed link
    Invariant {
        /// `unknot f=2`, `union(unknot f=1, unknot f=-1)` or `series file f=...`
        #[arg(long)]
        link: String,
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Also print the modular sequence F^p
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value = "sl2")]
        flavor: Flavor,
    },
    /// O of the lens space L(n,1)
    #[command(allow_negative_numbers = true)]
    Lens {
        n: i64,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, value_parser = verify::SUITES)]
        suite: String,
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match commands::run(&cli.command) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            if report.failures() > 0 {
                ExitCode::from(EXIT_CHECK_FAILED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
