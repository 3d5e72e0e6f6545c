//! Domain types for the signaling game and the elementary closed-form
//! quantities built on them.
//!
//! The signaler's budget is `a_high` with probability `p` and `a_low`
//! otherwise. The receiver buys resources at `unit_cost` per unit and the
//! battlefields are worth `phi` in total; individual battlefield values never
//! enter the payoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(cond: bool, invariant: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(invariant))
    }
}

fn is_probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Bernoulli budget distribution of the signaler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetPrior {
    a_high: f64,
    a_low: f64,
    p: f64,
}

impl BudgetPrior {
    pub fn new(a_high: f64, a_low: f64, p: f64) -> Result<Self> {
        check(a_high.is_finite() && a_low.is_finite(), "finite budgets")?;
        check(a_low >= 0.0, "a_low ≥ 0")?;
        check(a_high > 0.0, "a_high > 0")?;
        check(a_high >= a_low, "a_high ≥ a_low")?;
        check(is_probability(p), "0 ≤ p ≤ 1")?;
        Ok(Self { a_high, a_low, p })
    }

    pub fn a_high(&self) -> f64 {
        self.a_high
    }

    pub fn a_low(&self) -> f64 {
        self.a_low
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Same budgets, different probability of the high type.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.a_high, self.a_low, p)
    }

    pub fn budget(&self, t: BudgetType) -> f64 {
        match t {
            BudgetType::High => self.a_high,
            BudgetType::Low => self.a_low,
        }
    }

    /// Expected budget `mu * a_high + (1 - mu) * a_low`.
    ///
    /// Evaluated as `a_low + mu * (a_high - a_low)` so the rounded result is
    /// monotone in `mu`; every threshold comparison downstream relies on it.
    pub fn expected_budget(&self, mu: Belief) -> f64 {
        self.a_low + mu.value() * (self.a_high - self.a_low)
    }

    /// Belief threshold `(a_high - 2 a_low) / (a_high - a_low)` separating the
    /// two branch families of the receiver's best response. May be negative.
    pub fn type_threshold(&self) -> Result<f64> {
        if self.a_high == self.a_low {
            return Err(Error::DegeneratePrior);
        }
        Ok((self.a_high - 2.0 * self.a_low) / (self.a_high - self.a_low))
    }

    /// `max{threshold, 0}`, with a single-type prior (`a_high = a_low`)
    /// mapped to 0 so that every belief takes the upper branch family.
    pub fn clamped_threshold(&self) -> f64 {
        self.type_threshold().map_or(0.0, |t| t.max(0.0))
    }

    /// Cost threshold λ(mu) between the receiver's full-strength and hedging
    /// investments.
    pub fn lambda(&self, mu: Belief, phi: f64) -> f64 {
        let mu = mu.value();
        let hedge = ((1.0 - mu) * self.a_low).sqrt();
        let full = self.expected_budget(Belief(mu)).sqrt();
        phi / (2.0 * self.a_high * self.a_high) * (hedge + full).powi(2)
    }

    /// `(1 - mu) phi / (2 a_low)`: the cost at or above which a receiver who
    /// holds a belief below the type threshold stays out. `+inf` when
    /// `a_low = 0`.
    pub fn hedge_deterrence_cost(&self, mu: Belief, phi: f64) -> f64 {
        if self.a_low == 0.0 {
            f64::INFINITY
        } else {
            (1.0 - mu.value()) * phi / (2.0 * self.a_low)
        }
    }

    /// `phi / (2 * expected_budget(mu))`: the deterrence cost on the upper
    /// branch family.
    pub fn full_deterrence_cost(&self, mu: Belief, phi: f64) -> f64 {
        phi / (2.0 * self.expected_budget(mu))
    }
}

/// A full game instance: the prior, the receiver's per-unit cost and the
/// total battlefield value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    prior: BudgetPrior,
    unit_cost: f64,
    phi: f64,
}

impl GameConfig {
    pub fn new(prior: BudgetPrior, unit_cost: f64, phi: f64) -> Result<Self> {
        check(unit_cost.is_finite() && unit_cost > 0.0, "unit_cost > 0")?;
        check(phi.is_finite() && phi > 0.0, "phi > 0")?;
        Ok(Self { prior, unit_cost, phi })
    }

    /// Shorthand for `GameConfig::new(BudgetPrior::new(..)?, ..)`.
    pub fn from_parts(a_high: f64, a_low: f64, p: f64, unit_cost: f64, phi: f64) -> Result<Self> {
        Self::new(BudgetPrior::new(a_high, a_low, p)?, unit_cost, phi)
    }

    pub fn prior(&self) -> &BudgetPrior {
        &self.prior
    }

    pub fn unit_cost(&self) -> f64 {
        self.unit_cost
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn p(&self) -> f64 {
        self.prior.p
    }

    pub fn with_cost(&self, unit_cost: f64) -> Result<Self> {
        Self::new(self.prior, unit_cost, self.phi)
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.prior.with_p(p)?, self.unit_cost, self.phi)
    }

    /// The prior as a belief.
    pub fn prior_belief(&self) -> Belief {
        Belief(self.prior.p)
    }
}

/// A policy that always reports `h` truthfully and reports `h` with
/// probability `q` when the budget is low.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignalPolicy(f64);

impl SignalPolicy {
    /// Always signal `h`; the receiver learns nothing.
    pub const TRIVIAL: SignalPolicy = SignalPolicy(1.0);
    /// Signal the true type.
    pub const FULL_REVELATION: SignalPolicy = SignalPolicy(0.0);

    pub fn new(q: f64) -> Result<Self> {
        check(is_probability(q), "0 ≤ q ≤ 1")?;
        Ok(Self(q))
    }

    pub fn q(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BudgetType {
    High,
    Low,
}

/// Receiver's probability that the signaler holds the high budget.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Belief(f64);

impl Belief {
    pub const CERTAIN_LOW: Belief = Belief(0.0);
    pub const CERTAIN_HIGH: Belief = Belief(1.0);

    pub fn new(mu: f64) -> Result<Self> {
        check(is_probability(mu), "0 ≤ mu ≤ 1")?;
        Ok(Self(mu))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Posterior on the high type after observing signal `h`.
///
/// After signal `l` the posterior is always [`Belief::CERTAIN_LOW`], since the
/// high type never sends it.
pub fn posterior_high(p: f64, policy: SignalPolicy) -> Result<Belief> {
    check(is_probability(p), "0 ≤ p ≤ 1")?;
    let q = policy.q();
    if p == 0.0 && q == 0.0 {
        return Err(Error::ZeroProbabilitySignal);
    }
    // min() guards against p / (p + tiny) rounding a hair above 1.
    Ok(Belief((p / (p + q * (1.0 - p))).min(1.0)))
}

/// `p / (sqrt(1 - p) - (1 - p))`, defined on the open interval (0, 1).
pub fn f_p(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::FpDomain(p));
    }
    // Algebraically equal to the ratio above (divide through by
    // sqrt(1-p) * (1 - sqrt(1-p))) but free of cancellation for small p.
    Ok(1.0 + 1.0 / (1.0 - p).sqrt())
}

/// [`f_p`] extended by its limit 2 at `p = 0`.
pub fn f_p_with_limit(p: f64) -> Result<f64> {
    if p == 0.0 {
        Ok(2.0)
    } else {
        f_p(p)
    }
}

/// Player A's equilibrium payoff in the complete-information General Lotto
/// game with budgets `a` and `b`.
///
/// `b = 0` returns `phi` (ties go to A), including `a = b = 0`.
pub fn ci_payoff_a(a: f64, b: f64, phi: f64) -> f64 {
    if b == 0.0 {
        phi
    } else if a <= b {
        phi * a / (2.0 * b)
    } else {
        phi * (1.0 - b / (2.0 * a))
    }
}

pub fn ci_payoff_b(a: f64, b: f64, phi: f64) -> f64 {
    phi - ci_payoff_a(a, b, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prior(a_high: f64, a_low: f64) -> BudgetPrior {
        BudgetPrior::new(a_high, a_low, 0.5).unwrap()
    }

    fn belief(mu: f64) -> Belief {
        Belief::new(mu).unwrap()
    }

    #[test]
    fn expected_budget_examples() {
        let pr = prior(1.2, 0.5);
        assert_eq!(pr.expected_budget(belief(0.0)), 0.5);
        assert_eq!(pr.expected_budget(belief(1.0)), 1.2);
        assert!((pr.expected_budget(belief(0.5)) - 0.85).abs() < 1e-15);
    }

    #[test]
    fn type_threshold_examples() {
        assert!((prior(1.2, 0.5).type_threshold().unwrap() - 0.2 / 0.7).abs() < 1e-15);
        assert_eq!(prior(2.0, 1.0).type_threshold().unwrap(), 0.0);
        let t = prior(1.2, 0.8).type_threshold().unwrap();
        assert!((t + 1.0).abs() < 1e-14);
        assert_eq!(prior(1.2, 0.8).clamped_threshold(), 0.0);
    }

    #[test]
    fn single_type_prior() {
        let pr = prior(1.0, 1.0);
        assert_eq!(pr.type_threshold(), Err(Error::DegeneratePrior));
        assert_eq!(pr.clamped_threshold(), 0.0);
    }

    #[test]
    fn lambda_examples() {
        let pr = prior(1.2, 0.5);
        assert!((pr.lambda(belief(1.0), 1.0) - 1.0 / 2.4).abs() < 1e-15);
        assert!((pr.lambda(belief(0.0), 1.0) - 1.0 / 1.44).abs() < 1e-15);
        // 40-digit evaluation of the defining expression.
        assert!((pr.lambda(belief(0.5), 1.0) - 0.702_067_515_878_225_3).abs() < 1e-14);
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(posterior_high(0.37, SignalPolicy::TRIVIAL).unwrap().value(), 0.37);
        assert_eq!(posterior_high(0.37, SignalPolicy::FULL_REVELATION).unwrap().value(), 1.0);
        let mu = posterior_high(0.5, SignalPolicy::new(0.4).unwrap()).unwrap();
        assert!((mu.value() - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!(
            posterior_high(0.0, SignalPolicy::FULL_REVELATION),
            Err(Error::ZeroProbabilitySignal)
        );
        assert_eq!(posterior_high(0.0, SignalPolicy::new(0.3).unwrap()).unwrap().value(), 0.0);
    }

    #[test]
    fn f_p_examples() {
        assert!((f_p(0.75).unwrap() - 3.0).abs() < 1e-15);
        assert!((f_p(0.5).unwrap() - 2.414_213_562_373_095).abs() < 1e-14);
        assert!((f_p(1e-9).unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(f_p(0.0), Err(Error::FpDomain(0.0)));
        assert_eq!(f_p(1.0), Err(Error::FpDomain(1.0)));
        assert_eq!(f_p_with_limit(0.0), Ok(2.0));
        assert!(f_p_with_limit(1.0).is_err());
    }

    #[test]
    fn f_p_matches_defining_ratio() {
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let literal = p / ((1.0 - p).sqrt() - (1.0 - p));
            assert!((f_p(p).unwrap() - literal).abs() <= 1e-12 * literal, "p = {p}");
        }
    }

    #[test]
    fn ci_payoff_examples() {
        assert_eq!(ci_payoff_a(1.0, 1.0, 1.0), 0.5);
        assert_eq!(ci_payoff_a(1.0, 2.0, 1.0), 0.25);
        assert_eq!(ci_payoff_a(2.0, 0.0, 1.0), 1.0);
        assert_eq!(ci_payoff_a(0.0, 0.0, 3.0), 3.0);
        assert_eq!(ci_payoff_a(2.0, 1.0, 1.0), 0.75);
        assert_eq!(ci_payoff_b(2.0, 1.0, 1.0), 0.25);
    }

    #[test]
    fn invariants_rejected() {
        assert_eq!(
            BudgetPrior::new(0.5, 1.2, 0.5),
            Err(Error::InvalidParameter("a_high ≥ a_low"))
        );
        assert!(BudgetPrior::new(0.0, 0.0, 0.5).is_err());
        assert!(BudgetPrior::new(1.0, -0.1, 0.5).is_err());
        assert!(BudgetPrior::new(1.0, 0.5, 1.5).is_err());
        assert!(BudgetPrior::new(1.0, 0.5, f64::NAN).is_err());
        let pr = prior(1.0, 0.5);
        assert!(GameConfig::new(pr, 0.0, 1.0).is_err());
        assert!(GameConfig::new(pr, 0.5, 0.0).is_err());
        assert!(SignalPolicy::new(-0.1).is_err());
        assert!(Belief::new(1.1).is_err());
    }

    #[test]
    fn zero_low_budget_thresholds_are_infinite() {
        let pr = BudgetPrior::new(1.0, 0.0, 0.3).unwrap();
        assert_eq!(pr.hedge_deterrence_cost(belief(1.0), 1.0), f64::INFINITY);
        assert_eq!(pr.hedge_deterrence_cost(belief(0.2), 1.0), f64::INFINITY);
        assert_eq!(pr.type_threshold().unwrap(), 1.0);
    }
}
