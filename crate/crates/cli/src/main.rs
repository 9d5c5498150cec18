use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chiquad::DegreesOfFreedom;
use chiquad_cli::figures::{figure_data, FigureId};
use chiquad_cli::integrate::{integrate, Method};
use chiquad_cli::registry::IntegrandChoice;
use chiquad_cli::report::{self, Format};
use chiquad_cli::tables::{run_table, BudgetRule, TableId, TableJob, TABLE_EPSILON};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "chiquad", version, about = "Expectations of bounded functions of R / sqrt(nu), R ~ chi_nu")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximation errors for the coverage scenario.
    ///
    /// 1: Mori + trapezoid, 2: generalized Gauss-Laguerre, 3: inverse cdf with
    /// Gauss-Legendre, 4: Gauss-Legendre on the Mori window. Default nu sets
    /// follow each table: table 2 uses 1..6, 10, 100, 300 while table 3 uses
    /// 1..6, 10, 100, 1000, and tables 1 and 4 omit nu = 6.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        nu: Vec<u32>,
        /// Nodes for every nu; default 65 for nu = 1 and 33 otherwise.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = TABLE_EPSILON)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compute cells one at a time.
        #[arg(long)]
        serial: bool,
    },
    /// Data behind figures 1, 3, 4 and 5 as CSV (or JSON).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
        /// Samples per curve.
        #[arg(long, default_value_t = 301)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One integral with one method.
    Integrate {
        #[arg(value_enum)]
        method: Method,
        #[arg(long)]
        nu: u32,
        /// `t-interval:<alpha>`, `constant[:<c>]` or `exp-decay[:<rate>]`.
        #[arg(long, default_value = "constant")]
        integrand: IntegrandChoice,
        #[arg(long, default_value_t = TABLE_EPSILON)]
        epsilon: f64,
        /// Node cap (trapezoid, exponential) or rule size (Gauss methods).
        #[arg(long)]
        budget: Option<usize>,
        /// Text by default; csv and md print the iteration history.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Same as `--format json`.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match out {
        Some(path) => File::create(path)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::Compute(format!("cannot create {}: {e}", path.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(format!("write failed: {e}"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Table { id, alpha, nu, budget, epsilon, format, out, serial } => {
            let table = TableId::from_number(id).expect("range checked by clap");
            let mut job = TableJob::standard(table);
            if !alpha.is_empty() {
                job.alphas = alpha;
            }
            if !nu.is_empty() {
                job.nus = nu;
            }
            if let Some(n) = budget {
                job.budget = BudgetRule::uniform(n);
            }
            job.epsilon = epsilon;
            job.parallel = !serial;
            let result = run_table(&job);
            let mut w = sink(&out)?;
            match format {
                Format::Csv => report::write_table_csv(&mut w, &result).map_err(io_err)?,
                Format::Md => w.write_all(report::table_markdown(&result).as_bytes()).map_err(io_err)?,
                Format::Json => report::write_json(&mut w, &result).map_err(io_err)?,
            }
            w.flush().map_err(io_err)?;
            match result.failures() {
                0 => Ok(()),
                n => Err(Failure::Compute(format!("{n} cell(s) failed"))),
            }
        }
        Command::Figure { id, points, format, out } => {
            let figure = FigureId::from_number(id)
                .ok_or_else(|| Failure::Usage(format!("no data for figure {id}; choose 1, 3, 4 or 5")))?;
            let data = figure_data(figure, points).map_err(|e| Failure::Compute(e.to_string()))?;
            let mut w = sink(&out)?;
            match format {
                Format::Csv => report::write_figure_csv(&mut w, &data).map_err(io_err)?,
                Format::Json => report::write_json(&mut w, &data).map_err(io_err)?,
                Format::Md => return Err(Failure::Usage("figure data is CSV or JSON only".into())),
            }
            w.flush().map_err(io_err)
        }
        Command::Integrate { method, nu, integrand, epsilon, budget, format, json, out } => {
            let nu = DegreesOfFreedom::new(nu).map_err(|e| Failure::Usage(e.to_string()))?;
            let r = integrate(method, nu, integrand, epsilon, budget).map_err(|e| Failure::Compute(e.to_string()))?;
            let mut w = sink(&out)?;
            match if json { Some(Format::Json) } else { format } {
                None => w.write_all(report::integrate_text(&r).as_bytes()).map_err(io_err)?,
                Some(Format::Json) => report::write_json(&mut w, &r).map_err(io_err)?,
                Some(Format::Csv) => report::write_history_csv(&mut w, &r).map_err(io_err)?,
                Some(Format::Md) => w.write_all(report::history_markdown(&r).as_bytes()).map_err(io_err)?,
            }
            w.flush().map_err(io_err)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
