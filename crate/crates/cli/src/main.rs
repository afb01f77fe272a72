//! `wcs`: worst-case sensitivities, worst-case distributions and
//! mean-sensitivity frontiers from the command line.
//!
//! Results go to stdout as JSON (frontier tables to `--out` as CSV). Exit
//! status is 0 on success, 2 on a usage error and 3 on a domain error, whose
//! `{"code", "message"}` payload is written to stderr.

mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use wcs_core::dro::{
    self, gen_mixture_demand, gen_synth_classification, FrontierProblem, LabeledDataset, NewsvendorParams,
};
use wcs_core::{Scenario, UncertaintyFamily};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] wcs_core::Error),
    #[error("{0}")]
    Io(String),
}

#[derive(Parser)]
#[command(name = "wcs", version, about = "Worst-case sensitivity analysis for distributionally robust optimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CostArgs {
    /// Comma-separated costs (or demand atoms for the wasserstein family).
    #[arg(long, allow_hyphen_values = true)]
    costs: Option<String>,
    /// Comma-separated probabilities; uniform when omitted.
    #[arg(long)]
    probs: Option<String>,
    /// CSV with header `cost[,prob]`.
    #[arg(long, conflicts_with_all = ["costs", "probs"])]
    costs_file: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    /// phi | penalty-phi | tv | budgeted | combo | box | wasserstein
    #[arg(long)]
    family: String,
    /// Divergence for the phi families: chi2 | kl.
    #[arg(long, default_value = "chi2")]
    phi: String,
    /// CVaR level of the combo family.
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
}

#[derive(Args, Clone, Copy)]
struct NewsvendorArgs {
    #[arg(long, default_value_t = 10.0)]
    r: f64,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value_t = 4.0)]
    s: f64,
}

#[derive(Args)]
struct DemandArgs {
    /// CSV with header `demand[,prob]`.
    #[arg(long)]
    demand_file: Option<PathBuf>,
    /// Exponential-mixture sample `n,muL,muH,pL[,seed]`.
    #[arg(long, conflicts_with = "demand_file")]
    gen: Option<String>,
}

#[derive(Args)]
struct DataArgs {
    /// CSV with header `label,x1,...,xd`, labels +1/-1.
    #[arg(long)]
    data_file: Option<PathBuf>,
    /// Gaussian two-cluster sample `n,d,margin[,seed]` (intercept appended).
    #[arg(long, conflicts_with = "data_file")]
    gen_class: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form worst-case sensitivity of a cost distribution.
    Sensitivity {
        #[command(flatten)]
        costs: CostArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        newsvendor: NewsvendorArgs,
        /// Order quantity (wasserstein family: costs are newsvendor costs at this order).
        #[arg(long)]
        order: Option<f64>,
    },
    /// Worst-case value, distribution and dual certificate at radius --eps.
    WorstCase {
        #[command(flatten)]
        costs: CostArgs,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        newsvendor: NewsvendorArgs,
        #[arg(long)]
        order: Option<f64>,
        #[arg(long)]
        eps: f64,
    },
    /// Mean-sensitivity frontier of robust newsvendor or logistic-regression solutions.
    ///
    /// With --out the table is written as CSV with columns
    /// eps,decision,nominal_mean,sensitivity (weight vectors joined by ';');
    /// otherwise JSON goes to stdout.
    Frontier {
        #[command(flatten)]
        family: FamilyArgs,
        /// Family whose sensitivity scores each solution (defaults to --family).
        #[arg(long)]
        measure: Option<String>,
        /// Comma-separated radii, ascending.
        #[arg(long)]
        eps_list: Option<String>,
        /// Geometric sweep start:stop:count.
        #[arg(long, conflicts_with = "eps_list")]
        eps_geom: Option<String>,
        #[command(flatten)]
        newsvendor: NewsvendorArgs,
        #[command(flatten)]
        demand: DemandArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robust order quantity; SAA when --eps is 0.
    SolveNewsvendor {
        #[command(flatten)]
        newsvendor: NewsvendorArgs,
        #[command(flatten)]
        demand: DemandArgs,
        #[arg(long, default_value = "budgeted")]
        family: String,
        #[arg(long, default_value = "chi2")]
        phi: String,
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Wasserstein-robust logistic regression.
    SolveLogreg {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Randomised checks: deviation axioms, closed forms against brute force, bounds.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Defaults to $WCS_SEED, else 1.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn default_seed(fallback: u64) -> u64 {
    std::env::var("WCS_SEED").ok().and_then(|v| v.parse().ok()).unwrap_or(fallback)
}

fn scenario(args: &CostArgs) -> Result<Scenario, CliError> {
    if let Some(path) = &args.costs_file {
        return input::read_weighted(path, "cost");
    }
    let costs = args.costs.as_deref().ok_or_else(|| CliError::Usage("--costs or --costs-file is required".into()))?;
    let costs = input::parse_list("--costs", costs)?;
    let probs = args.probs.as_deref().map(|p| input::parse_list("--probs", p)).transpose()?;
    Ok(Scenario::new(costs, probs)?)
}

fn params(a: NewsvendorArgs) -> Result<NewsvendorParams, CliError> {
    Ok(NewsvendorParams::new(a.r, a.c, a.q, a.s)?)
}

fn demand(args: &DemandArgs) -> Result<Scenario, CliError> {
    if let Some(path) = &args.demand_file {
        return input::read_weighted(path, "demand");
    }
    let raw = args.gen.as_deref().ok_or_else(|| CliError::Usage("--demand-file or --gen is required".into()))?;
    let v = input::parse_list("--gen", raw)?;
    if !(4..=5).contains(&v.len()) || v[0] < 1.0 || v[0].fract() != 0.0 {
        return Err(CliError::Usage("--gen: expected n,muL,muH,pL[,seed]".into()));
    }
    let seed = v.get(4).map(|s| *s as u64).unwrap_or_else(|| default_seed(42));
    Ok(Scenario::uniform(gen_mixture_demand(v[0] as usize, v[1], v[2], v[3], seed)?)?)
}

fn dataset(args: &DataArgs) -> Result<LabeledDataset, CliError> {
    if let Some(path) = &args.data_file {
        return input::read_classification(path);
    }
    let raw = args.gen_class.as_deref().ok_or_else(|| CliError::Usage("--data-file or --gen-class is required".into()))?;
    let v = input::parse_list("--gen-class", raw)?;
    if !(3..=4).contains(&v.len()) || v[0].fract() != 0.0 || v[1].fract() != 0.0 || v[0] < 0.0 || v[1] < 0.0 {
        return Err(CliError::Usage("--gen-class: expected n,d,margin[,seed]".into()));
    }
    let seed = v.get(3).map(|s| *s as u64).unwrap_or_else(|| default_seed(42));
    Ok(gen_synth_classification(v[0] as usize, v[1] as usize, v[2], seed)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Io(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn need_order(order: Option<f64>) -> Result<f64, CliError> {
    order.ok_or_else(|| CliError::Usage("--order is required for the wasserstein family".into()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sensitivity { costs, family, newsvendor, order } => {
            let fam = input::family(&family.family, &family.phi, family.alpha)?;
            let s = scenario(&costs)?;
            let rep = match fam {
                UncertaintyFamily::WassersteinL1 => {
                    let cost = params(newsvendor)?.cost_in_demand(need_order(order)?)?;
                    wcs_core::sensitivity::wasserstein_sensitivity(s.costs(), s.probs(), &cost)?
                }
                f => wcs_core::sensitivity::sensitivity(&s, f)?,
            };
            print_json(&report::Sensitivity::from(&rep))
        }
        Command::WorstCase { costs, family, newsvendor, order, eps } => {
            let fam = input::family(&family.family, &family.phi, family.alpha)?;
            let s = scenario(&costs)?;
            let wc = match fam {
                UncertaintyFamily::WassersteinL1 => {
                    let cost = params(newsvendor)?.cost_in_demand(need_order(order)?)?;
                    wcs_core::worstcase::wc_wasserstein_pl(s.costs(), s.probs(), &cost, eps)?
                }
                f => wcs_core::worstcase::worst_case(&s, f, eps)?,
            };
            print_json(&report::WorstCase::from(&wc))
        }
        Command::Frontier { family, measure, eps_list, eps_geom, newsvendor, demand: d, data, tol, out } => {
            let fam = input::family(&family.family, &family.phi, family.alpha)?;
            let measure = match measure {
                Some(m) => input::family(&m, &family.phi, family.alpha)?,
                None => fam,
            };
            let eps = match (eps_list, eps_geom) {
                (Some(l), _) => input::parse_list("--eps-list", &l)?,
                (None, Some(g)) => input::parse_geom(&g)?,
                (None, None) => return Err(CliError::Usage("--eps-list or --eps-geom is required".into())),
            };
            let points = if data.data_file.is_some() || data.gen_class.is_some() {
                let ds = dataset(&data)?;
                dro::frontier(FrontierProblem::Logreg { data: &ds, tol }, fam, &eps, measure)?
            } else {
                let p = params(newsvendor)?;
                let dem = demand(&d)?;
                dro::frontier(FrontierProblem::Newsvendor { params: &p, demand: &dem }, fam, &eps, measure)?
            };
            match out {
                Some(path) => {
                    let mut f = std::fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    f.write_all(report::frontier_csv(&points).as_bytes())
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
                }
                None => print_json(&points),
            }
        }
        Command::SolveNewsvendor { newsvendor, demand: d, family, phi, alpha, eps } => {
            let fam = input::family(&family, &phi, alpha)?;
            let p = params(newsvendor)?;
            let dem = demand(&d)?;
            let saa = dro::saa_newsvendor(&p, &dem)?;
            let sol = dro::dro_newsvendor(&p, &dem, fam, eps)?;
            let nominal = wcs_core::riskstats::mean(&dro::cost_scenario(&p, &dem, sol.order));
            print_json(&report::Newsvendor {
                order: sol.order,
                saa_order: saa,
                critical_fractile: p.critical_fractile(),
                nominal_mean: nominal,
                worst_case: report::WorstCase::from(&sol.worst_case),
            })
        }
        Command::SolveLogreg { data, eps, tol } => {
            let ds = dataset(&data)?;
            let fit = dro::logreg_wasserstein(&ds, eps, tol)?;
            print_json(&report::Logreg {
                weights: &fit.weights,
                objective: fit.objective,
                zero: fit.zero,
                iterations: fit.iterations,
                sensitivity: report::Sensitivity::from(&fit.sensitivity),
            })
        }
        Command::Verify { trials, seed } => {
            let rep = report::verify(trials, seed.unwrap_or_else(|| default_seed(1)));
            print_json(&rep)
        }
    }
}

#[derive(Serialize)]
struct ErrorPayload<'a> {
    code: &'a str,
    message: String,
}

fn main() -> ExitCode {
    let matches = Cli::command().mut_subcommands(|c| c.allow_negative_numbers(true)).get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            let code = match &e {
                CliError::Domain(d) => d.code(),
                _ => "IoError",
            };
            let payload = ErrorPayload { code, message: e.to_string() };
            eprintln!("{}", serde_json::to_string(&payload).expect("plain payload"));
            ExitCode::from(3)
        }
    }
}
