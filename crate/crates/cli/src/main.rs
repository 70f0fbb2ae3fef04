//! `bsent`: entanglement of two squeezed vacua mixed on a beam splitter.
//!
//! Exit codes: 0 on success (or a passing `verify`), 1 when `verify` fails,
//! 2 on usage or configuration errors. Data goes to stdout or `--out`;
//! human-readable summaries go to stderr.

mod output;

use std::f64::consts::FRAC_PI_4;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use bsent::fock::{self, FockCutoff, MAX_TRUNCATION_BUDGET};
use bsent::gaussian;
use bsent::optimize::{self, Param, ParameterSet, SweepSpec};
use bsent::Execution;
use clap::{Args, Parser, Subcommand};

use crate::output::{write_report, Cell, Format, Record, Report};

const R_MAX: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(
    name = "bsent",
    version,
    about = "Beam-splitter entanglement of squeezed vacuum inputs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduced covariance, δ, β, entropy and PPT verdict for one configuration.
    Compute(Common),
    /// Entanglement along a one-parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
    },
    /// Maximize the entanglement over up to three angles.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Comma-separated list of free parameters (theta, phi0, phi1, chi_a, chi_b).
        #[arg(long, value_delimiter = ',')]
        free: Vec<Param>,
    },
    /// Partial-transpose separability test of the two-mode output.
    Ppt(Common),
    /// Compare the Gaussian result against the truncated Fock-space computation.
    Verify(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Squeezing magnitude of mode a.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ra: f64,
    /// Squeezing magnitude of mode b.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rb: f64,
    /// Squeezing phase of mode a.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    chia: f64,
    /// Squeezing phase of mode b.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    chib: f64,
    /// Beam-splitter mixing angle (π/4 is 50:50).
    #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi1: f64,
    /// Maximum photon number per mode for `verify`.
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(4..=80))]
    cutoff: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write data here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Read every angle (and angular sweep bounds) in degrees.
    #[arg(long)]
    degrees: bool,
}

#[derive(Debug, Args)]
struct Grid {
    #[arg(long)]
    param: Param,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long)]
    steps: usize,
}

impl Common {
    fn angle(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_radians()
        } else {
            x
        }
    }

    fn params(&self) -> anyhow::Result<ParameterSet> {
        let p = ParameterSet {
            r_a: self.ra,
            r_b: self.rb,
            chi_a: self.angle(self.chia),
            chi_b: self.angle(self.chib),
            theta: self.angle(self.theta),
            phi0: self.angle(self.phi0),
            phi1: self.angle(self.phi1),
        };
        for param in Param::ALL {
            let v = p.get(param);
            if !v.is_finite() {
                bail!("{param} must be finite, got {v}");
            }
            if !param.is_angle() && !(0.0..=R_MAX).contains(&v) {
                bail!("{param} must lie in [0, {R_MAX}], got {v}");
            }
        }
        Ok(p)
    }

    fn sink(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit(&self, report: &Report) -> anyhow::Result<()> {
        write_report(report, self.format, self.sink()?).context("failed to write output")
    }
}

fn params_record(p: &ParameterSet) -> Record {
    Record(
        Param::ALL
            .iter()
            .map(|&q| (q.name(), Cell::Num(p.get(q))))
            .collect(),
    )
}

fn compute(common: &Common) -> anyhow::Result<bool> {
    let p = common.params()?;
    let (za, zb) = p.squeezing()?;
    let bs = p.beam_splitter()?;
    let m = gaussian::covariance_elements(za, zb, bs);
    let t = gaussian::entanglement(za, zb, bs);
    let ppt = gaussian::ppt_inseparable(&gaussian::output_state(za, zb, bs));

    let mut r = params_record(&p);
    r.push("m11", Cell::Num(m.m11))
        .push("m12", Cell::Num(m.m12))
        .push("m22", Cell::Num(m.m22))
        .push("delta", Cell::Num(t.delta))
        .push("beta", Cell::Num(t.beta))
        .push("entropy_nats", Cell::Num(t.entropy_nats))
        .push("ppt_verdict", Cell::text(ppt.verdict.as_str()))
        .push("lambda_min", Cell::Num(ppt.lambda_min));
    common.emit(&Report::Record(r))?;
    eprintln!(
        "delta = {:.9}, E = {:.9} nats, {}",
        t.delta, t.entropy_nats, ppt.verdict
    );
    Ok(true)
}

fn sweep(common: &Common, grid: &Grid) -> anyhow::Result<bool> {
    let base = common.params()?;
    let (from, to) = if grid.param.is_angle() {
        (common.angle(grid.from), common.angle(grid.to))
    } else {
        if grid.to > R_MAX {
            bail!("{} must lie in [0, {R_MAX}], got {}", grid.param, grid.to);
        }
        (grid.from, grid.to)
    };
    let spec = SweepSpec {
        param: grid.param,
        from,
        to,
        steps: grid.steps,
        base,
    };
    let rows = optimize::sweep_with(&spec, Execution::default())?;

    let mut meta = Record::default();
    meta.push("param", Cell::text(grid.param.name()));
    let records = rows
        .iter()
        .map(|row| {
            let mut r = Record::default();
            r.push("value", Cell::Num(row.value))
                .push("delta", Cell::Num(row.delta))
                .push("entropy_nats", Cell::Num(row.entropy_nats));
            r
        })
        .collect();
    common.emit(&Report::Table {
        meta,
        rows: records,
    })?;
    if let Some(best) = rows
        .iter()
        .max_by(|a, b| a.entropy_nats.total_cmp(&b.entropy_nats))
    {
        eprintln!(
            "{} points over {}; max E = {:.9} nats at {} = {:.9}",
            rows.len(),
            grid.param,
            best.entropy_nats,
            grid.param,
            best.value
        );
    }
    Ok(true)
}

fn maximize(common: &Common, free: &[Param]) -> anyhow::Result<bool> {
    let base = common.params()?;
    let res = optimize::maximize_entanglement(&base, free)?;

    // the parameter columns hold the argmax
    let mut r = params_record(&res.argmax);
    r.push(
        "free",
        Cell::List(res.free.iter().map(|p| Cell::text(p.name())).collect()),
    )
    .push("delta_max", Cell::Num(res.delta_max))
    .push("entropy_max", Cell::Num(res.entropy_max))
    .push("k_branch", Cell::Int(res.k_branch))
    .push("phase_difference", Cell::Num(res.argmax.phase_difference()))
    .push("phase_residual", Cell::Num(res.phase_residual))
    .push("flat", Cell::Bool(res.flat))
    .push("evaluations", Cell::Int(res.evaluations as i64));
    common.emit(&Report::Record(r))?;
    eprintln!(
        "E_max = {:.9} nats, delta_max = {:.9}, k = {}, residual = {:.3e}{}",
        res.entropy_max,
        res.delta_max,
        res.k_branch,
        res.phase_residual,
        if res.flat { " (flat objective)" } else { "" }
    );
    Ok(true)
}

fn ppt(common: &Common) -> anyhow::Result<bool> {
    let p = common.params()?;
    let (za, zb) = p.squeezing()?;
    let state = gaussian::output_state(za, zb, p.beam_splitter()?);
    let res = gaussian::ppt_inseparable(&state);

    let mut r = Record::default();
    r.push("ppt_verdict", Cell::text(res.verdict.as_str()))
        .push("lambda_min", Cell::Num(res.lambda_min))
        .push(
            "covariance",
            Cell::List(
                state
                    .cov_row_major()
                    .iter()
                    .map(|&x| Cell::Num(x))
                    .collect(),
            ),
        );
    common.emit(&Report::Record(r))?;
    eprintln!("{} (lambda_min = {:.3e})", res.verdict, res.lambda_min);
    Ok(true)
}

fn verify(common: &Common) -> anyhow::Result<bool> {
    let p = common.params()?;
    let (za, zb) = p.squeezing()?;
    let bs = p.beam_splitter()?;
    let cutoff = FockCutoff::new(common.cutoff as usize)?;
    cutoff.is_recommended_for(p.r_a.max(p.r_b));

    let gaussian_e = gaussian::entanglement(za, zb, bs).entropy_nats;
    let oracle = fock::oracle_entanglement_unchecked(za, zb, bs, cutoff, Execution::default())?;
    let abs_diff = (gaussian_e - oracle.entropy_nats).abs();
    let tolerance = f64::max(1e-3, 10.0 * oracle.truncation_budget);
    let pass = abs_diff <= tolerance && oracle.truncation_budget <= MAX_TRUNCATION_BUDGET;

    let mut r = params_record(&p);
    r.push("cutoff", Cell::Int(common.cutoff.into()))
        .push("gaussian_e", Cell::Num(gaussian_e))
        .push("oracle_e", Cell::Num(oracle.entropy_nats))
        .push("abs_diff", Cell::Num(abs_diff))
        .push("truncation_budget", Cell::Num(oracle.truncation_budget))
        .push("tolerance", Cell::Num(tolerance))
        .push("verdict", Cell::text(if pass { "pass" } else { "fail" }));
    common.emit(&Report::Record(r))?;
    eprintln!(
        "verify {}: |E_gauss - E_fock| = {:.3e} (tolerance {:.3e}, truncation budget {:.3e}, limit {:.0e})",
        if pass { "pass" } else { "fail" },
        abs_diff,
        tolerance,
        oracle.truncation_budget,
        MAX_TRUNCATION_BUDGET
    );
    Ok(pass)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Compute(c) => compute(c),
        Command::Sweep { common, grid } => sweep(common, grid),
        Command::Optimize { common, free } => maximize(common, free),
        Command::Ppt(c) => ppt(c),
        Command::Verify(c) => verify(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    log::debug!("{cli:?}");
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
