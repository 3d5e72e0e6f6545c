use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use lotto_signal::oracle::{claim_audit_with, AuditOptions, CheckSummary, WorstCase};
use lotto_signal::sweep::{round_sig, run_sweep, SweepCell, SweepSpec, SIGNIFICANT_DIGITS};
use lotto_signal::{ci_payoff_a, ci_payoff_b, spe_solve, GameConfig, InvestmentDecision};
use serde::Serialize;

use crate::config::{require, FileConfig};
use crate::{Cli, CliError, Command, Format, PayoffArgs, SolveArgs, SweepArgs, SweepFormat, VerifyArgs};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Solve(args) => solve(args, &file),
        Command::Sweep(args) => sweep(args, &file),
        Command::Verify(args) => verify(args),
        Command::Payoff(args) => payoff(args),
    }
}

fn num(x: f64) -> f64 {
    round_sig(x, SIGNIFICANT_DIGITS)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct DecisionOut {
    amount: f64,
    regime: String,
}

impl From<InvestmentDecision> for DecisionOut {
    fn from(d: InvestmentDecision) -> Self {
        Self { amount: num(d.amount), regime: format!("{:?}", d.regime) }
    }
}

#[derive(Serialize)]
struct SolveOut {
    a_high: f64,
    a_low: f64,
    p: f64,
    cost: f64,
    phi: f64,
    region: &'static str,
    q_star: f64,
    mu_h: f64,
    invest_after_h: DecisionOut,
    invest_after_l: DecisionOut,
    pi_star: f64,
    pi_ns: f64,
    improvement_pct: f64,
}

fn solve(args: SolveArgs, file: &FileConfig) -> Result<(), CliError> {
    let cfg = GameConfig::from_parts(
        require(args.game.a_high, file.a_high, "a-high")?,
        require(args.game.a_low, file.a_low, "a-low")?,
        require(args.p, file.p, "p")?,
        require(args.cost, file.cost, "cost")?,
        args.game.phi.or(file.phi).unwrap_or(1.0),
    )?;
    let s = spe_solve(&cfg);
    let out = SolveOut {
        a_high: cfg.prior().a_high(),
        a_low: cfg.prior().a_low(),
        p: cfg.p(),
        cost: cfg.unit_cost(),
        phi: cfg.phi(),
        region: s.region.tag.code(),
        q_star: num(s.q_star),
        mu_h: num(s.mu_h.value()),
        invest_after_h: s.invest_after_h.into(),
        invest_after_l: s.invest_after_l.into(),
        pi_star: num(s.pi_star),
        pi_ns: num(s.pi_ns),
        improvement_pct: num(s.improvement_pct),
    };
    match args.format {
        Format::Json => print_json(&out),
        Format::Text => {
            println!("region           {}", out.region);
            println!("q_star           {}", out.q_star);
            println!("mu_h             {}", out.mu_h);
            println!("invest_after_h   {} ({})", out.invest_after_h.amount, out.invest_after_h.regime);
            println!("invest_after_l   {} ({})", out.invest_after_l.amount, out.invest_after_l.regime);
            println!("pi_star          {}", out.pi_star);
            println!("pi_ns            {}", out.pi_ns);
            println!("improvement_pct  {}", out.improvement_pct);
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CellOut {
    c: f64,
    p: f64,
    region: &'static str,
    q_star: f64,
    pi_ns: f64,
    pi_star: f64,
    improvement_pct: f64,
}

impl From<&SweepCell> for CellOut {
    fn from(cell: &SweepCell) -> Self {
        Self {
            c: cell.c,
            p: cell.p,
            region: cell.region.code(),
            q_star: num(cell.q_star),
            pi_ns: num(cell.pi_ns),
            pi_star: num(cell.pi_star),
            improvement_pct: num(cell.improvement_pct),
        }
    }
}

fn sweep_spec(args: &SweepArgs, file: &FileConfig) -> Result<SweepSpec, CliError> {
    let s = &file.sweep;
    let base = SweepSpec::with_defaults(
        require(args.game.a_high, file.a_high, "a-high")?,
        require(args.game.a_low, file.a_low, "a-low")?,
        args.game.phi.or(file.phi).unwrap_or(1.0),
    );
    let spec = SweepSpec {
        c_min: args.c_min.or(s.c_min).unwrap_or(base.c_min),
        c_max: args.c_max.or(s.c_max).unwrap_or(base.c_max),
        c_steps: args.c_steps.or(s.c_steps).unwrap_or(base.c_steps),
        p_min: args.p_min.or(s.p_min).unwrap_or(base.p_min),
        p_max: args.p_max.or(s.p_max).unwrap_or(base.p_max),
        p_steps: args.p_steps.or(s.p_steps).unwrap_or(base.p_steps),
        ..base
    };
    spec.validate()?;
    Ok(spec)
}

fn sweep(args: SweepArgs, file: &FileConfig) -> Result<(), CliError> {
    let spec = sweep_spec(&args, file)?;
    let format = match (args.format, file.sweep.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("csv")) => SweepFormat::Csv,
        (None, Some("json")) => SweepFormat::Json,
        (None, Some(other)) => {
            return Err(CliError::Usage(format!("unknown sweep format {other:?}")));
        }
    };
    let cells = run_sweep(&spec)?;
    let rows: Vec<CellOut> = cells.iter().map(CellOut::from).collect();

    let out_path = args.out.as_ref().or(file.sweep.out.as_ref());
    let sink: Box<dyn Write> = match out_path {
        Some(path) => Box::new(
            File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let io_err = |e: &dyn std::fmt::Display| CliError::Io(e.to_string());
    match format {
        SweepFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            for row in &rows {
                w.serialize(row).map_err(|e| io_err(&e))?;
            }
            w.flush().map_err(|e| io_err(&e))?;
        }
        SweepFormat::Json => {
            #[derive(Serialize)]
            struct SweepOut<'a> {
                spec: &'a SweepSpec,
                cells: &'a [CellOut],
            }
            serde_json::to_writer_pretty(&mut sink, &SweepOut { spec: &spec, cells: &rows })
                .map_err(|e| io_err(&e))?;
            writeln!(sink).map_err(|e| io_err(&e))?;
        }
    }
    sink.flush().map_err(|e| io_err(&e))
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    samples: usize,
    seed: u64,
    grid: usize,
    tol: f64,
    violations: usize,
    worst_case: &'a Option<WorstCase>,
    checks: &'a BTreeMap<String, CheckSummary>,
    tag_counts: &'a BTreeMap<String, usize>,
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let opts = AuditOptions { samples: args.samples, seed: args.seed, grid_points: args.grid, tol: args.tol };
    let report = claim_audit_with(&opts)?;
    match args.format {
        Format::Json => print_json(&VerifyOut {
            samples: report.samples,
            seed: report.seed,
            grid: args.grid,
            tol: args.tol,
            violations: report.violations,
            worst_case: &report.worst_case,
            checks: &report.checks,
            tag_counts: &report.tag_counts,
        })?,
        Format::Text => {
            println!("samples {}  seed {}  grid {}  tol {:e}", report.samples, report.seed, args.grid, args.tol);
            println!("{:<28} {:>8} {:>10} {:>12} {:>10}", "check", "checked", "violations", "worst", "allowed");
            for (name, s) in &report.checks {
                println!(
                    "{name:<28} {:>8} {:>10} {:>12.3e} {:>10.1e}",
                    s.checked, s.violations, s.worst_deviation, s.allowed
                );
            }
            let tags: Vec<String> = report.tag_counts.iter().map(|(t, n)| format!("{t} {n}")).collect();
            println!("tags: {}", tags.join(", "));
            println!("violations: {}", report.violations);
        }
    }
    if report.violations > 0 {
        return Err(CliError::VerifyFailed(report.violations));
    }
    Ok(())
}

fn payoff(args: PayoffArgs) -> Result<(), CliError> {
    let bad = |what: &str| Err(CliError::Usage(format!("{what} violated")));
    if !(args.a.is_finite() && args.a >= 0.0) {
        return bad("a ≥ 0");
    }
    if !(args.b.is_finite() && args.b >= 0.0) {
        return bad("b ≥ 0");
    }
    if !(args.phi.is_finite() && args.phi > 0.0) {
        return bad("phi > 0");
    }
    let pi_a = num(ci_payoff_a(args.a, args.b, args.phi));
    let pi_b = num(ci_payoff_b(args.a, args.b, args.phi));
    match args.format {
        Format::Json => {
            #[derive(Serialize)]
            struct PayoffOut {
                pi_a: f64,
                pi_b: f64,
            }
            print_json(&PayoffOut { pi_a, pi_b })
        }
        Format::Text => {
            println!("pi_a  {pi_a}");
            println!("pi_b  {pi_b}");
            Ok(())
        }
    }
}
