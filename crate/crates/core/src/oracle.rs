//! Brute-force checks of the closed forms.
//!
//! [`grid_argmax`] maximizes the objective by exhaustive search over a uniform
//! policy grid. It only consults the closed-form solution after the search,
//! to compare. Grid search rather than a bracketing method because the
//! objective jumps wherever the receiver's best response switches branch.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{interim_payoff_a, no_signal_payoff};
use crate::error::{Error, Result};
use crate::model::{
    ci_payoff_a, ci_payoff_b, f_p, Belief, BudgetPrior, BudgetType, GameConfig, SignalPolicy,
};
use crate::signaling::{
    case3_lower_cost, classify, objective, objective_piecewise, spe_solve, RegionTag,
};

/// Payoff tolerance, as a fraction of `phi`.
pub const PAYOFF_TOL: f64 = 1e-9;
/// Relative tolerance for algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Grid values this close to the maximum (times `phi`) count as ties; ties go
/// to the largest `q`, i.e. towards not signaling.
const TIE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub q_grid_argmax: f64,
    pub pi_grid_max: f64,
    pub q_closed: f64,
    pub pi_closed: f64,
    pub grid_step: f64,
    pub agree: bool,
    /// `max(pi_grid_max - pi_closed, 0)`.
    pub max_violation: f64,
}

fn policy(q: f64) -> SignalPolicy {
    SignalPolicy::new(q).expect("grid policies lie in [0, 1]")
}

/// Maximize the objective over `{0, 1/(n-1), ..., 1}` and compare with the
/// closed-form equilibrium.
pub fn grid_argmax(cfg: &GameConfig, n_points: usize) -> Result<OracleReport> {
    if n_points < 101 {
        return Err(Error::Precondition("n_points ≥ 101"));
    }
    let step = 1.0 / (n_points - 1) as f64;
    let mut grid: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
    grid[n_points - 1] = 1.0;

    let closed = spe_solve(cfg);
    if let Some(q) = closed.region.q_star {
        grid.push(q);
        grid.push(closed.q_star);
    }

    let values: Vec<(f64, f64)> = grid.iter().map(|&q| (q, objective(cfg, policy(q)))).collect();
    let pi_grid_max = values.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
    let q_grid_argmax = values
        .iter()
        .filter(|&&(_, v)| v >= pi_grid_max - TIE_TOL * cfg.phi())
        .map(|&(q, _)| q)
        .fold(f64::NEG_INFINITY, f64::max);

    let agree = (q_grid_argmax - closed.q_star).abs() <= step
        && closed.pi_star >= pi_grid_max - PAYOFF_TOL * cfg.phi();
    Ok(OracleReport {
        q_grid_argmax,
        pi_grid_max,
        q_closed: closed.q_star,
        pi_closed: closed.pi_star,
        grid_step: step,
        agree,
        max_violation: (pi_grid_max - closed.pi_star).max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanAxis {
    Cost,
    Prior,
}

/// Analytic curves that can separate two classifier tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// `c = phi / (2 a_high)`
    CheapCost,
    /// `c = λ(p)`
    Lambda,
    /// `c = phi / (2 Abar(p))`
    ExpectedBudget,
    /// `c = phi / (2 (a_high - a_low))`
    Case2Upper,
    /// `c = case3_lower_cost`
    Case3Lower,
    /// `c = (1 - p) phi / (2 a_low)`
    Deterrence,
    /// `p = type threshold`
    TypeThreshold,
    /// The second region's extra condition flips.
    Case2Condition,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 8] = [
        BoundaryKind::CheapCost,
        BoundaryKind::Lambda,
        BoundaryKind::ExpectedBudget,
        BoundaryKind::Case2Upper,
        BoundaryKind::Case3Lower,
        BoundaryKind::Deterrence,
        BoundaryKind::TypeThreshold,
        BoundaryKind::Case2Condition,
    ];

    /// Signed distance from the boundary; the boundary is its zero set.
    /// `None` where the curve is undefined.
    fn margin(self, cfg: &GameConfig) -> Option<f64> {
        let prior = cfg.prior();
        let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
        let mu = cfg.prior_belief();
        let gap = prior.a_high() - prior.a_low();
        let threshold = match self {
            BoundaryKind::CheapCost => phi / (2.0 * prior.a_high()),
            BoundaryKind::Lambda => prior.lambda(mu, phi),
            BoundaryKind::ExpectedBudget => prior.full_deterrence_cost(mu, phi),
            BoundaryKind::Case2Upper if gap > 0.0 => phi / (2.0 * gap),
            BoundaryKind::Case3Lower => case3_lower_cost(cfg).ok()?,
            BoundaryKind::Deterrence if prior.a_low() > 0.0 => {
                prior.hedge_deterrence_cost(mu, phi)
            }
            BoundaryKind::TypeThreshold => return Some(p - prior.type_threshold().ok()?),
            BoundaryKind::Case2Condition => {
                let s = (c * phi * prior.a_low() / 2.0).sqrt();
                let denom = 2.0 * c * prior.a_high() - phi;
                if denom <= 0.0 || s >= phi {
                    return None;
                }
                let rhs = (phi - 2.0 * c * prior.a_low()) / denom * s / (phi - s);
                return Some(f_p(p).ok()? - rhs);
            }
            _ => return None,
        };
        Some(c - threshold).filter(|m| m.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedBoundary {
    pub kind: BoundaryKind,
    /// Axis coordinate of the analytic boundary.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Last scanned axis value with tag `from`.
    pub lo: f64,
    /// First scanned axis value with tag `to`.
    pub hi: f64,
    pub from: RegionTag,
    pub to: RegionTag,
    pub boundary: Option<MatchedBoundary>,
}

fn at(template: &GameConfig, axis: ScanAxis, x: f64) -> Result<GameConfig> {
    match axis {
        ScanAxis::Cost => template.with_cost(x),
        ScanAxis::Prior => template.with_p(x),
    }
}

/// Walk `n + 1` equally spaced points of one axis and report every change of
/// classifier tag, matched to the analytic curve that crosses the bracket
/// nearest its midpoint.
pub fn boundary_scan(
    template: &GameConfig,
    axis: ScanAxis,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<Transition>> {
    if !(lo < hi) {
        return Err(Error::Precondition("lo < hi"));
    }
    if n < 3 {
        return Err(Error::Precondition("n ≥ 3"));
    }
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect();
    let tags = xs
        .iter()
        .map(|&x| at(template, axis, x).map(|cfg| classify(&cfg).tag))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    for i in 1..xs.len() {
        if tags[i] != tags[i - 1] {
            let (a, b) = (xs[i - 1], xs[i]);
            out.push(Transition {
                lo: a,
                hi: b,
                from: tags[i - 1],
                to: tags[i],
                boundary: match_boundary(template, axis, a, b),
            });
        }
    }
    Ok(out)
}

fn match_boundary(
    template: &GameConfig,
    axis: ScanAxis,
    a: f64,
    b: f64,
) -> Option<MatchedBoundary> {
    let margin =
        |kind: BoundaryKind, x: f64| at(template, axis, x).ok().and_then(|g| kind.margin(&g));
    let mid = 0.5 * (a + b);
    BoundaryKind::ALL
        .into_iter()
        .filter_map(|kind| {
            let (ma, mb) = (margin(kind, a)?, margin(kind, b)?);
            if ma * mb > 0.0 {
                return None;
            }
            let (mut lo, mut hi, mut m_lo) = (a, b, ma);
            loop {
                let x = 0.5 * (lo + hi);
                if x <= lo || x >= hi {
                    break;
                }
                let mx = margin(kind, x)?;
                if mx * m_lo > 0.0 {
                    lo = x;
                    m_lo = mx;
                } else {
                    hi = x;
                }
            }
            Some(MatchedBoundary { kind, value: 0.5 * (lo + hi) })
        })
        .min_by(|x, y| (x.value - mid).abs().total_cmp(&(y.value - mid).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub samples: usize,
    pub seed: u64,
    pub grid_points: usize,
    /// Payoff tolerance as a fraction of `phi`.
    pub tol: f64,
}

impl AuditOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, grid_points: 10_001, tol: PAYOFF_TOL }
    }
}

/// One drawn game instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledConfig {
    pub a_high: f64,
    pub a_low: f64,
    pub p: f64,
    pub cost: f64,
    pub phi: f64,
}

impl SampledConfig {
    pub fn config(&self) -> GameConfig {
        GameConfig::from_parts(self.a_high, self.a_low, self.p, self.cost, self.phi)
            .expect("sampled parameters are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub deviation: f64,
    pub allowed: f64,
}

impl CheckOutcome {
    pub fn violated(&self) -> bool {
        !(self.deviation <= self.allowed)
    }

    fn severity(&self) -> f64 {
        if self.allowed > 0.0 {
            self.deviation / self.allowed
        } else if self.deviation > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub config: SampledConfig,
    pub tag: RegionTag,
    pub checks: Vec<CheckOutcome>,
}

impl AuditEntry {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| c.violated()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub checked: usize,
    pub violations: usize,
    pub worst_deviation: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub check: String,
    pub deviation: f64,
    pub allowed: f64,
    pub config: SampledConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub samples: usize,
    pub seed: u64,
    pub violations: usize,
    /// Outcome with the largest deviation relative to its allowance.
    pub worst_case: Option<WorstCase>,
    pub checks: BTreeMap<String, CheckSummary>,
    pub tag_counts: BTreeMap<String, usize>,
    pub entries: Vec<AuditEntry>,
}

/// [`claim_audit_with`] using a 10001-point grid and the default tolerance.
pub fn claim_audit(samples: usize, seed: u64) -> Result<AuditReport> {
    claim_audit_with(&AuditOptions::new(samples, seed))
}

/// Draw random games and check every closed-form identity and optimality
/// claim on each. Violations are counted, never raised.
pub fn claim_audit_with(opts: &AuditOptions) -> Result<AuditReport> {
    if opts.samples < 1 {
        return Err(Error::Precondition("samples ≥ 1"));
    }
    if opts.grid_points < 101 {
        return Err(Error::Precondition("grid_points ≥ 101"));
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::Precondition("tol ≥ 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let configs: Vec<SampledConfig> =
        (0..opts.samples).map(|i| sample_config(&mut rng, i)).collect();
    let entries: Vec<AuditEntry> = configs.par_iter().map(|s| audit_one(s, opts)).collect();

    let mut checks: BTreeMap<String, CheckSummary> = BTreeMap::new();
    let mut tag_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut worst: Option<(f64, WorstCase)> = None;
    for entry in &entries {
        *tag_counts.entry(entry.tag.code().to_string()).or_default() += 1;
        for outcome in &entry.checks {
            let summary = checks.entry(outcome.check.clone()).or_insert(CheckSummary {
                checked: 0,
                violations: 0,
                worst_deviation: 0.0,
                allowed: outcome.allowed,
            });
            summary.checked += 1;
            summary.violations += usize::from(outcome.violated());
            summary.worst_deviation = summary.worst_deviation.max(outcome.deviation);
            let sev = outcome.severity();
            if worst.as_ref().is_none_or(|(s, _)| sev > *s) {
                worst = Some((
                    sev,
                    WorstCase {
                        check: outcome.check.clone(),
                        deviation: outcome.deviation,
                        allowed: outcome.allowed,
                        config: entry.config,
                    },
                ));
            }
        }
    }
    Ok(AuditReport {
        samples: opts.samples,
        seed: opts.seed,
        violations: entries.iter().map(AuditEntry::violations).sum(),
        worst_case: worst.map(|(_, w)| w),
        checks,
        tag_counts,
        entries,
    })
}

/// Draw the `index`-th audit configuration.
///
/// Draws cycle through four strata so every classifier tag shows up at modest
/// sample sizes: the full documented box, the cost band in which signaling
/// can matter, and the cost bands of the second and third regions. All strata
/// stay inside `a_high ∈ [0.1, 5]`, `a_low ∈ [0.01, a_high]`,
/// `p ∈ [0.01, 0.99]`, `phi ∈ {1} ∪ [0.5, 2]`, `c ≤ 1.5 (1-p) phi / (2 a_low)`.
pub fn sample_config(rng: &mut impl Rng, index: usize) -> SampledConfig {
    let phi = if rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(0.5..=2.0) };
    let a_high: f64 = rng.gen_range(0.1..=5.0);
    let stratum = index % 4;

    if stratum >= 2 {
        // Low budget small enough that the type threshold sits well inside (0, 1).
        let divisor = if stratum == 2 { 4.0 } else { 3.0 };
        let a_low: f64 = rng.gen_range(0.01..=a_high / divisor);
        let threshold = (a_high - 2.0 * a_low) / (a_high - a_low);
        let p = rng.gen_range(0.01..threshold.clamp(0.011, 0.99));
        let prior = BudgetPrior::new(a_high, a_low, p).expect("valid draw");
        let mu = Belief::new(p).expect("valid draw");
        let split = phi / (2.0 * (a_high - a_low));
        let (lo, hi) = if stratum == 2 {
            (prior.lambda(mu, phi).max(phi / (2.0 * a_high)), split)
        } else {
            (split, prior.hedge_deterrence_cost(mu, phi))
        };
        let cost = if lo < hi { rng.gen_range(lo..hi) } else { lo };
        return SampledConfig { a_high, a_low, p, cost, phi };
    }

    let a_low = rng.gen_range(0.01..=a_high);
    let p = rng.gen_range(0.01..0.99);
    let hedge_cap = 1.5 * (1.0 - p) * phi / (2.0 * a_low);
    let cost = if stratum == 0 {
        rng.gen_range(0.0..hedge_cap.min(200.0)).max(f64::MIN_POSITIVE)
    } else {
        let lo = phi / (2.0 * a_high);
        let abar = a_low + p * (a_high - a_low);
        let hi = (phi / (2.0 * abar)).max((1.0 - p) * phi / (2.0 * a_low));
        if lo < hi {
            rng.gen_range(lo..hi)
        } else {
            lo
        }
    };
    SampledConfig { a_high, a_low, p, cost, phi }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn outcome(check: &str, deviation: f64, allowed: f64) -> CheckOutcome {
    CheckOutcome { check: check.to_string(), deviation, allowed }
}

fn audit_one(sample: &SampledConfig, opts: &AuditOptions) -> AuditEntry {
    let cfg = sample.config();
    let (p, phi) = (cfg.p(), cfg.phi());
    let mu = cfg.prior_belief();
    let pi_ns = no_signal_payoff(&cfg);
    let mut checks = Vec::new();

    checks.push(outcome(
        "trivial_policy_identity",
        rel_dev(objective(&cfg, SignalPolicy::TRIVIAL), pi_ns),
        IDENTITY_TOL,
    ));

    let recomposed = p * interim_payoff_a(&cfg, mu, BudgetType::High)
        + (1.0 - p) * interim_payoff_a(&cfg, mu, BudgetType::Low);
    checks.push(outcome("recomposition", rel_dev(recomposed, pi_ns), IDENTITY_TOL));

    let a = sample.a_high;
    let b = sample.a_low + sample.cost;
    checks.push(outcome(
        "ci_payoff_sum",
        rel_dev(ci_payoff_a(a, b, phi) + ci_payoff_b(a, b, phi), phi),
        IDENTITY_TOL,
    ));

    checks.extend(lambda_checks(&cfg));

    let piecewise_dev = (0..=100)
        .filter_map(|i| {
            let q = policy(i as f64 / 100.0);
            let pw = objective_piecewise(&cfg, q).ok()?;
            Some(rel_dev(pw, objective(&cfg, q)))
        })
        .fold(0.0, f64::max);
    checks.push(outcome("dual_path", piecewise_dev, IDENTITY_TOL));

    let spe = spe_solve(&cfg);
    let tag = spe.region.tag;
    if tag.is_beneficial() {
        let n = opts.grid_points;
        let q_star = spe.q_star;
        let tail_max = (1..n - 1)
            .map(|i| i as f64 / (n - 1) as f64)
            .filter(|&q| q > q_star)
            .map(|q| objective(&cfg, policy(q)) - pi_ns)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(outcome("tail_bound", tail_max.max(0.0) / phi, opts.tol));
        let near_one = objective(&cfg, policy(1.0 - 1e-6)) - pi_ns;
        checks.push(outcome("tail_strict_below_trivial", near_one.max(0.0) / phi, 0.0));
        checks.push(outcome("improves_on_trivial", (pi_ns - spe.pi_star).max(0.0) / phi, 0.0));
    }

    let report = grid_argmax(&cfg, opts.grid_points).expect("grid size validated");
    let q_excess =
        ((report.q_grid_argmax - report.q_closed).abs() / report.grid_step - 1.0).max(0.0);
    checks.push(outcome("grid_argmax_q", q_excess, 0.0));
    checks.push(outcome("grid_argmax_pi", report.max_violation / phi, opts.tol));

    AuditEntry { config: *sample, tag, checks }
}

/// Threshold identities and the ordering/monotonicity of λ.
fn lambda_checks(cfg: &GameConfig) -> Vec<CheckOutcome> {
    let prior = cfg.prior();
    let (p, phi) = (cfg.p(), cfg.phi());
    let mut out = Vec::new();
    let Ok(threshold) = prior.type_threshold() else {
        return out;
    };
    let b = |x: f64| Belief::new(x).expect("belief in [0, 1]");
    let lambda = |x: f64| prior.lambda(b(x), phi);
    let mu = b(p);
    let full = prior.full_deterrence_cost(mu, phi);

    let expected_min = if p < threshold { lambda(p) } else { full };
    out.push(outcome("threshold_min_order", rel_dev(full.min(lambda(p)), expected_min), IDENTITY_TOL));

    if p < threshold {
        let hedge = prior.hedge_deterrence_cost(mu, phi);
        let largest = full.max(lambda(p)).max(hedge);
        out.push(outcome("threshold_max_order", rel_dev(largest, hedge), IDENTITY_TOL));
    }

    if (0.0..=1.0).contains(&threshold) {
        let gap = prior.a_high() - prior.a_low();
        out.push(outcome(
            "lambda_at_threshold",
            rel_dev(lambda(threshold), phi / (2.0 * gap)),
            IDENTITY_TOL,
        ));
    }

    // Finite differences on a uniform belief grid: rising below the
    // threshold, falling above it.
    let pts: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
    let mut worst = 0.0_f64;
    for w in pts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let (l0, l1) = (lambda(x0), lambda(x1));
        if x1 < threshold {
            worst = worst.max((l0 - l1).max(0.0) / l1.abs());
        } else if x0 > threshold {
            worst = worst.max((l1 - l0).max(0.0) / l0.abs());
        }
    }
    out.push(outcome("lambda_monotone", worst, IDENTITY_TOL));
    out
}
