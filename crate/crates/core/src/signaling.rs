//! The signaler's policy choice: the expected-payoff objective over policies,
//! the beneficial-region classifier, and the equilibrium solver.
//!
//! A policy is the single number `q`, the probability of sending `h` while
//! holding the low budget. Whenever signaling helps, the optimal `q` is the
//! largest one that still keeps the receiver out after signal `h`.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    interim_payoff_a, interim_payoff_in, invest_best_response, investment_regime,
    no_signal_payoff, InvestmentDecision, InvestmentRegime,
};
use crate::error::{Error, Result};
use crate::model::{f_p, posterior_high, Belief, BudgetType, GameConfig, SignalPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionTag {
    Region1,
    Region2,
    Region3,
    /// Investment is so cheap that no posterior deters the receiver.
    NoBenefitCheapCost,
    /// The receiver already stays out under the prior.
    NoBenefitAlreadyWinning,
    NoBenefitConditionFails,
}

impl RegionTag {
    pub const ALL: [RegionTag; 6] = [
        RegionTag::Region1,
        RegionTag::Region2,
        RegionTag::Region3,
        RegionTag::NoBenefitCheapCost,
        RegionTag::NoBenefitAlreadyWinning,
        RegionTag::NoBenefitConditionFails,
    ];

    pub fn is_beneficial(self) -> bool {
        matches!(self, RegionTag::Region1 | RegionTag::Region2 | RegionTag::Region3)
    }

    /// Short code used in sweep files.
    pub fn code(self) -> &'static str {
        match self {
            RegionTag::Region1 => "R1",
            RegionTag::Region2 => "R2",
            RegionTag::Region3 => "R3",
            RegionTag::NoBenefitCheapCost => "NB_CHEAP",
            RegionTag::NoBenefitAlreadyWinning => "NB_WIN",
            RegionTag::NoBenefitConditionFails => "NB_COND",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.code() == code)
    }
}

impl std::fmt::Display for RegionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub tag: RegionTag,
    /// Closed-form optimal policy; present exactly for the beneficial tags.
    pub q_star: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeSolution {
    pub region: RegionClass,
    /// Policy actually played: 1 when no signaling helps.
    pub q_star: f64,
    pub mu_h: Belief,
    pub invest_after_h: InvestmentDecision,
    pub invest_after_l: InvestmentDecision,
    pub pi_star: f64,
    pub pi_ns: f64,
    pub improvement_pct: f64,
}

/// Expected payoff of the signaler before its type is drawn, under policy `q`.
pub fn objective(cfg: &GameConfig, policy: SignalPolicy) -> f64 {
    let p = cfg.p();
    let q = policy.q();
    let after_low =
        (1.0 - p) * (1.0 - q) * interim_payoff_a(cfg, Belief::CERTAIN_LOW, BudgetType::Low);
    if p == 0.0 && q == 0.0 {
        // Signal h is never sent.
        return after_low;
    }
    let mu_h = posterior_high(p, policy).expect("p and q are not both zero");
    let regime = investment_regime(cfg, mu_h);
    p * interim_payoff_in(cfg, mu_h, BudgetType::High, regime)
        + (1.0 - p) * q * interim_payoff_in(cfg, mu_h, BudgetType::Low, regime)
        + after_low
}

/// `p/(1-p) * (2 c a_high - phi) / (phi - 2 c a_low)`: the largest `q` for
/// which the upper-branch deterrence condition holds after signal `h`.
pub fn deterrence_policy_upper(cfg: &GameConfig) -> f64 {
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    let prior = cfg.prior();
    p / (1.0 - p) * (2.0 * c * prior.a_high() - phi) / (phi - 2.0 * c * prior.a_low())
}

/// `p/(1-p) * 2 c a_low / (phi - 2 c a_low)`: the largest `q` for which the
/// hedging receiver stays out after signal `h`.
pub fn deterrence_policy_hedge(cfg: &GameConfig) -> f64 {
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    let a_low = cfg.prior().a_low();
    p / (1.0 - p) * (2.0 * c * a_low) / (phi - 2.0 * c * a_low)
}

/// Parameter regions in which the objective has an explicit piecewise form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofCase {
    /// `c < min{phi/(2 a_high), λ(p)}`: the receiver invests at full strength
    /// after every signal.
    CheapCost,
    /// `phi/(2 a_high) ≤ c < min{phi/(2 Abar(p)), λ(p)}`.
    Case1,
    /// `max{λ(p), phi/(2 a_high)} ≤ c < phi/(2(a_high - a_low))`, `p` below the
    /// type threshold.
    Case2,
    /// `phi/(2(a_high - a_low)) ≤ c < (1-p) phi/(2 a_low)`, `p` below the type
    /// threshold.
    Case3,
}

pub fn proof_case(cfg: &GameConfig) -> Option<ProofCase> {
    let prior = cfg.prior();
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    if p >= 1.0 && c >= phi / (2.0 * prior.a_high()) {
        return None;
    }
    let mu = cfg.prior_belief();
    let cheap = phi / (2.0 * prior.a_high());
    let lambda = prior.lambda(mu, phi);
    let below_threshold = p < prior.clamped_threshold();
    if cheap <= c && c < prior.full_deterrence_cost(mu, phi).min(lambda) {
        return Some(ProofCase::Case1);
    }
    if c < cheap.min(lambda) {
        return Some(ProofCase::CheapCost);
    }
    if below_threshold {
        let split = phi / (2.0 * (prior.a_high() - prior.a_low()));
        if lambda.max(cheap) <= c && c < split {
            return Some(ProofCase::Case2);
        }
        if split <= c && c < prior.hedge_deterrence_cost(mu, phi) {
            return Some(ProofCase::Case3);
        }
    }
    None
}

/// The objective evaluated through the explicit per-case formulas instead of
/// through posteriors and best responses. Kept as an independent second
/// route for cross-checking [`objective`].
pub fn objective_piecewise(cfg: &GameConfig, policy: SignalPolicy) -> Result<f64> {
    let case = proof_case(cfg).ok_or(Error::OutOfCase)?;
    let prior = cfg.prior();
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    let (a_high, a_low) = (prior.a_high(), prior.a_low());
    let q = policy.q();

    let half = (c * phi / 2.0).sqrt();
    let revealed_low = (1.0 - p) * (1.0 - q) * half * a_low.sqrt();
    // Mass of signal h, and the budget it carries in expectation.
    let mass_h = p + (1.0 - p) * q;
    let budget_h = p * a_high + (1.0 - p) * q * a_low;

    let deterred = || phi * mass_h + revealed_low;
    let full = || half * (budget_h * mass_h).sqrt() + revealed_low;
    let hedged = || p * phi + half * (a_low * (1.0 - p) * q * mass_h).sqrt() + revealed_low;
    // Signal h keeps a full-strength receiver out iff c ≥ phi / (2 Abar(mu_h)).
    let upper_deterred = || 2.0 * c * budget_h >= phi * mass_h;

    let value = match case {
        ProofCase::CheapCost => full(),
        ProofCase::Case1 => {
            if upper_deterred() {
                deterred()
            } else {
                full()
            }
        }
        ProofCase::Case2 => {
            if upper_deterred() {
                deterred()
            } else if q < hedge_switch_policy(cfg) {
                full()
            } else {
                hedged()
            }
        }
        ProofCase::Case3 => {
            // Hedging receiver stays out iff c ≥ (1 - mu_h) phi / (2 a_low).
            if 2.0 * c * a_low * mass_h >= phi * (1.0 - p) * q {
                deterred()
            } else {
                hedged()
            }
        }
    };
    Ok(value)
}

/// The policy `q_c` at which the posterior after `h` crosses λ(mu) = c, found
/// by bisection on the belief between the prior and the type threshold.
fn hedge_switch_policy(cfg: &GameConfig) -> f64 {
    let prior = cfg.prior();
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    let lambda = |mu: f64| prior.lambda(Belief::new(mu).expect("bisection stays in [0, 1]"), phi);
    let (mut lo, mut hi) = (p, prior.clamped_threshold());
    if lambda(lo) >= c {
        return 1.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if lambda(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    p * (1.0 - hi) / (hi * (1.0 - p))
}

/// Whether full deterrence at `q = p/(1-p) (2 c a_high - phi)/(phi - 2 c a_low)`
/// beats not signaling, for parameters in the second region's cost band.
pub fn case2_condition(cfg: &GameConfig) -> Result<bool> {
    let prior = cfg.prior();
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    if 2.0 * c * prior.a_high() <= phi {
        return Err(Error::Precondition("2 c a_high > phi"));
    }
    let fp = f_p(p).map_err(|_| Error::Precondition("0 < p < 1"))?;
    let s = (c * phi * prior.a_low() / 2.0).sqrt();
    let rhs = (phi - 2.0 * c * prior.a_low()) / (2.0 * c * prior.a_high() - phi) * s / (phi - s);
    Ok(fp > rhs)
}

/// Lower cost bound of the third region: the smaller root (squared) of the
/// quadratic in `sqrt(c)` that decides whether deterrence at the hedging
/// policy beats not signaling.
pub fn case3_lower_cost(cfg: &GameConfig) -> Result<f64> {
    let prior = cfg.prior();
    let p = cfg.p();
    if !(p > 0.0 && p < prior.clamped_threshold()) {
        return Err(Error::Precondition("0 < p < type threshold"));
    }
    if prior.a_low() <= 0.0 {
        return Err(Error::Precondition("a_low > 0"));
    }
    Ok(case3_lower_cost_from_fp(f_p(p)?, prior.a_low(), cfg.phi()))
}

/// [`case3_lower_cost`] as a function of `f_p` directly. Near `f_p = 1` the
/// quadratic degenerates to a linear equation with root `phi/(8 a_low f_p²)`.
pub fn case3_lower_cost_from_fp(fp: f64, a_low: f64, phi: f64) -> f64 {
    if (fp - 1.0).abs() < 1e-9 {
        return phi / (8.0 * a_low * fp * fp);
    }
    let ratio = (fp - (fp * fp - fp + 1.0).sqrt()) / (fp - 1.0);
    phi / (2.0 * a_low) * ratio * ratio
}

/// The larger root squared; always above `phi/(2 a_low)`.
pub fn case3_upper_root(fp: f64, a_low: f64, phi: f64) -> f64 {
    let r = phi / ((fp - 1.0) * (2.0 * phi * a_low).sqrt()) * (fp + (fp * fp - fp + 1.0).sqrt());
    r * r
}

/// Decide whether some policy beats not signaling, and if so which.
///
/// Regions are tested in order 1, 2, 3 with each inequality taken exactly as
/// written; `p ∈ {0, 1}` always yields `NoBenefitConditionFails`.
pub fn classify(cfg: &GameConfig) -> RegionClass {
    let prior = cfg.prior();
    let (p, c, phi) = (cfg.p(), cfg.unit_cost(), cfg.phi());
    let no_benefit = |tag| RegionClass { tag, q_star: None };
    let region = |tag, q: f64| RegionClass { tag, q_star: Some(q.clamp(0.0, 1.0)) };

    if p <= 0.0 || p >= 1.0 {
        return no_benefit(RegionTag::NoBenefitConditionFails);
    }
    let mu = cfg.prior_belief();
    let cheap = phi / (2.0 * prior.a_high());
    let lambda = prior.lambda(mu, phi);
    let below_threshold = p < prior.clamped_threshold();

    if cheap <= c && c < prior.full_deterrence_cost(mu, phi).min(lambda) {
        return region(RegionTag::Region1, deterrence_policy_upper(cfg));
    }
    if below_threshold {
        let split = phi / (2.0 * (prior.a_high() - prior.a_low()));
        if lambda.max(cheap) <= c
            && c < split
            && 2.0 * c * prior.a_high() > phi
            && case2_condition(cfg).unwrap_or(false)
        {
            return region(RegionTag::Region2, deterrence_policy_upper(cfg));
        }
        if prior.a_low() > 0.0 {
            let lower = case3_lower_cost(cfg).map_or(f64::INFINITY, |r| r.max(split));
            if lower <= c && c < prior.hedge_deterrence_cost(mu, phi) {
                return region(RegionTag::Region3, deterrence_policy_hedge(cfg));
            }
        }
    }
    if c < cheap {
        no_benefit(RegionTag::NoBenefitCheapCost)
    } else if no_signal_payoff(cfg) == phi {
        no_benefit(RegionTag::NoBenefitAlreadyWinning)
    } else {
        no_benefit(RegionTag::NoBenefitConditionFails)
    }
}

/// Largest representable `q` at or below `q_formula` whose posterior actually
/// deters the receiver once rounding is accounted for.
///
/// The objective jumps down just past the deterrence boundary, so evaluating
/// at a `q` that lands a rounding error on the wrong side would report the
/// wrong payoff.
pub fn deterring_policy(cfg: &GameConfig, q_formula: f64) -> f64 {
    let p = cfg.p();
    let deters = |q: f64| {
        let policy = SignalPolicy::new(q).expect("q stays in [0, 1]");
        posterior_high(p, policy)
            .map(|mu| investment_regime(cfg, mu) == InvestmentRegime::Deterred)
            .unwrap_or(false)
    };
    let start = q_formula.clamp(0.0, 1.0);
    let mut q = start;
    let mut step = 0.0_f64;
    for _ in 0..128 {
        if deters(q) || q == 0.0 {
            return q;
        }
        step = if step == 0.0 { q - q.next_down() } else { 2.0 * step };
        q = (start - step).max(0.0);
    }
    start
}

/// Subgame-perfect equilibrium: the optimal policy together with the
/// receiver's responses and the resulting payoffs.
pub fn spe_solve(cfg: &GameConfig) -> SpeSolution {
    let region = classify(cfg);
    let q_star = region.q_star.map_or(1.0, |q| deterring_policy(cfg, q));
    let policy = SignalPolicy::new(q_star).expect("q_star in [0, 1]");
    let mu_h = posterior_high(cfg.p(), policy).unwrap_or(cfg.prior_belief());
    let pi_ns = no_signal_payoff(cfg);
    // q = 1 reveals nothing; reuse the prior payoff so silence reports an
    // improvement of exactly zero.
    let pi_star = if region.tag.is_beneficial() { objective(cfg, policy) } else { pi_ns };
    SpeSolution {
        region,
        q_star,
        mu_h,
        invest_after_h: invest_best_response(cfg, mu_h),
        invest_after_l: invest_best_response(cfg, Belief::CERTAIN_LOW),
        pi_star,
        pi_ns,
        improvement_pct: 100.0 * (pi_star / pi_ns - 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a_low: f64, p: f64, c: f64) -> GameConfig {
        GameConfig::from_parts(1.2, a_low, p, c, 1.0).unwrap()
    }

    fn q(v: f64) -> SignalPolicy {
        SignalPolicy::new(v).unwrap()
    }

    // 40-digit reference values.
    const PI_NS: f64 = 0.460_977_222_864_644_4;
    const PI_Q04: f64 = 0.806_066_017_177_982_1;
    const PI_Q0: f64 = 0.676_776_695_296_636_9;

    #[test]
    fn objective_examples() {
        let g = cfg(0.5, 0.5, 0.5);
        assert!((objective(&g, SignalPolicy::TRIVIAL) - PI_NS).abs() < 1e-15);
        assert!((objective(&g, q(0.4)) - PI_Q04).abs() < 1e-15);
        assert!((objective(&g, SignalPolicy::FULL_REVELATION) - PI_Q0).abs() < 1e-15);
    }

    #[test]
    fn piecewise_examples() {
        let g = cfg(0.5, 0.5, 0.5);
        assert_eq!(proof_case(&g), Some(ProofCase::Case1));
        for (v, expected) in [(1.0, PI_NS), (0.4, PI_Q04), (0.0, PI_Q0)] {
            let got = objective_piecewise(&g, q(v)).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected, "q = {v}");
        }
    }

    #[test]
    fn piecewise_out_of_case() {
        // Receiver already deterred under the prior.
        let g = cfg(0.5, 0.5, 0.7);
        assert_eq!(proof_case(&g), None);
        assert_eq!(objective_piecewise(&g, q(0.5)), Err(Error::OutOfCase));
    }

    #[test]
    fn piecewise_handles_unsent_signal() {
        // p = 0 and q = 0: signal h never happens.
        let g = cfg(0.5, 0.0, 0.3);
        assert_eq!(proof_case(&g), Some(ProofCase::CheapCost));
        let a = objective_piecewise(&g, SignalPolicy::FULL_REVELATION).unwrap();
        let b = objective(&g, SignalPolicy::FULL_REVELATION);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn case2_condition_example() {
        // f_p ≈ 2.118 against a right-hand side ≈ 2.760.
        assert_eq!(case2_condition(&cfg(0.2, 0.2, 0.45)), Ok(false));
        assert!(case2_condition(&cfg(0.2, 0.2, 0.4)).is_err());
        assert!(case2_condition(&cfg(0.2, 0.0, 0.45)).is_err());
    }

    #[test]
    fn case2_condition_false_as_cost_approaches_cheap_bound() {
        let eps = 1e-12;
        let g = cfg(0.2, 0.5, (1.0 + eps) / 2.4);
        assert_eq!(case2_condition(&g), Ok(false));
    }

    #[test]
    fn case3_lower_cost_examples() {
        let v = case3_lower_cost_from_fp(3.0, 0.06, 1.0);
        assert!((v - 0.261_441_945_025_951).abs() < 1e-14);
        assert_eq!(case3_lower_cost_from_fp(1.0, 0.06, 1.0), 1.0 / (8.0 * 0.06));
        // The same value through the config path: f_p(0.75) = 3.
        let g = cfg(0.06, 0.75, 1.0);
        assert!((case3_lower_cost(&g).unwrap() - v).abs() < 1e-14);
        assert!(case3_lower_cost(&cfg(0.06, 0.96, 1.0)).is_err());
        assert!(case3_lower_cost(&cfg(0.0, 0.5, 1.0)).is_err());
    }

    #[test]
    fn degenerate_root_solves_linear_limit() {
        // At f_p = 1 the quadratic reduces to -2 f_p phi sqrt(c) + phi sqrt(phi/(2 a_low)) = 0.
        let (a_low, phi) = (0.06, 1.0);
        let root = case3_lower_cost_from_fp(1.0, a_low, phi);
        let residual = -2.0 * phi * root.sqrt() + phi * (phi / (2.0 * a_low)).sqrt();
        assert!(residual.abs() < 1e-12);
    }

    #[test]
    fn upper_root_outside_band() {
        for i in 0..200 {
            let fp = 1.01 + i as f64 * 0.05;
            for a_low in [0.01, 0.06, 0.5, 2.0] {
                assert!(case3_upper_root(fp, a_low, 1.0) > 1.0 / (2.0 * a_low));
            }
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify(&cfg(0.5, 0.5, 0.5));
        assert_eq!(r.tag, RegionTag::Region1);
        assert!((r.q_star.unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(classify(&cfg(0.5, 0.5, 0.3)).tag, RegionTag::NoBenefitCheapCost);
        assert_eq!(classify(&cfg(0.5, 0.5, 0.7)).tag, RegionTag::NoBenefitAlreadyWinning);
        assert_eq!(classify(&cfg(0.5, 0.5, 0.3)).q_star, None);
    }

    #[test]
    fn classify_extreme_priors() {
        for p in [0.0, 1.0] {
            let r = classify(&cfg(0.5, p, 0.5));
            assert_eq!(r.tag, RegionTag::NoBenefitConditionFails);
            let s = spe_solve(&cfg(0.5, p, 0.5));
            assert_eq!(s.q_star, 1.0);
        }
    }

    #[test]
    fn spe_example_region1() {
        let s = spe_solve(&cfg(0.5, 0.5, 0.5));
        assert_eq!(s.region.tag, RegionTag::Region1);
        assert!((s.q_star - 0.4).abs() < 1e-15);
        assert!((s.mu_h.value() - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!(s.invest_after_h.regime, InvestmentRegime::Deterred);
        assert_eq!(s.invest_after_h.amount, 0.0);
        assert!((s.invest_after_l.amount - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.pi_star - PI_Q04).abs() < 1e-15);
        assert!((s.pi_ns - PI_NS).abs() < 1e-15);
        assert!((s.improvement_pct - 74.860_270_138_480_43).abs() < 1e-11);
    }

    #[test]
    fn spe_two_fold_example() {
        let s = spe_solve(&cfg(0.5, 0.999, 1.0 / 2.4));
        assert_eq!(s.region.tag, RegionTag::Region1);
        assert_eq!(s.q_star, 0.0);
        assert!((s.pi_star - 0.999_322_748_612_184).abs() < 1e-14);
        assert!((s.pi_ns - 0.499_854_145_393_100_3).abs() < 1e-14);
        assert!((s.pi_star / s.pi_ns - 1.999_228_690_653_923_7).abs() < 1e-12);
    }

    #[test]
    fn spe_deterred_under_prior() {
        // p below the type threshold and c at or above (1-p) phi / (2 a_low).
        let g = cfg(0.06, 0.1, 7.6);
        let s = spe_solve(&g);
        assert_eq!(s.region.tag, RegionTag::NoBenefitAlreadyWinning);
        assert_eq!(s.q_star, 1.0);
        assert_eq!(s.pi_star, 1.0);
        assert_eq!(s.pi_ns, 1.0);
        assert_eq!(s.improvement_pct, 0.0);
    }

    #[test]
    fn deterring_policy_steps_below_rounding_boundary() {
        let g = cfg(0.5, 0.5, 0.5);
        let q_formula = deterrence_policy_upper(&g);
        let q = deterring_policy(&g, q_formula);
        assert!(q <= q_formula.clamp(0.0, 1.0));
        assert!(q_formula - q < 1e-14);
        let mu = posterior_high(0.5, SignalPolicy::new(q).unwrap()).unwrap();
        assert_eq!(investment_regime(&g, mu), InvestmentRegime::Deterred);
    }

    #[test]
    fn region_codes_round_trip() {
        for t in RegionTag::ALL {
            assert_eq!(RegionTag::from_code(t.code()), Some(t));
        }
        assert_eq!(RegionTag::from_code("R4"), None);
    }

    #[test]
    fn zero_low_budget_never_benefits() {
        for c in [0.1, 0.3, 0.45, 1.0, 5.0] {
            let r = classify(&GameConfig::from_parts(1.0, 0.0, 0.4, c, 1.0).unwrap());
            assert!(!r.tag.is_beneficial(), "c = {c}");
        }
    }
}
