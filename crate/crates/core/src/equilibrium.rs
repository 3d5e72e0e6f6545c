//! Receiver best responses and the signaler's resulting payoffs.
//!
//! Given a belief `mu` on the high type, the receiver either invests at full
//! strength, hedges against the low type only, or stays out. The branch is
//! chosen once by [`investment_regime`] and shared by every quantity here.

use serde::{Deserialize, Serialize};

use crate::model::{Belief, BudgetType, GameConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvestmentRegime {
    /// Invest against the expected budget.
    InvestFull,
    /// Invest only enough to contest the low type; the high type wins outright.
    InvestHedge,
    /// Invest nothing and concede `phi`.
    Deterred,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvestmentDecision {
    pub amount: f64,
    pub regime: InvestmentRegime,
}

/// Which branch of the receiver's best response applies at belief `mu`.
///
/// Strict `<` selects the investing branch and `>=` the next one, so the
/// three branches partition the cost axis.
pub fn investment_regime(cfg: &GameConfig, mu: Belief) -> InvestmentRegime {
    let prior = cfg.prior();
    let c = cfg.unit_cost();
    let phi = cfg.phi();
    if mu.value() >= prior.clamped_threshold() {
        if c < prior.full_deterrence_cost(mu, phi) {
            InvestmentRegime::InvestFull
        } else {
            InvestmentRegime::Deterred
        }
    } else if c < prior.lambda(mu, phi) {
        InvestmentRegime::InvestFull
    } else if c < prior.hedge_deterrence_cost(mu, phi) {
        InvestmentRegime::InvestHedge
    } else {
        InvestmentRegime::Deterred
    }
}

/// Receiver's optimal resource purchase at belief `mu`.
///
/// With `a_low = 0` the hedging branch buys nothing yet still beats the low
/// type, so `amount` can be 0 outside the `Deterred` regime in that case.
pub fn invest_best_response(cfg: &GameConfig, mu: Belief) -> InvestmentDecision {
    let regime = investment_regime(cfg, mu);
    let prior = cfg.prior();
    let scale = cfg.phi() / (2.0 * cfg.unit_cost());
    let amount = match regime {
        InvestmentRegime::InvestFull => (prior.expected_budget(mu) * scale).sqrt(),
        InvestmentRegime::InvestHedge => ((1.0 - mu.value()) * prior.a_low() * scale).sqrt(),
        InvestmentRegime::Deterred => 0.0,
    };
    InvestmentDecision { amount, regime }
}

/// Signaler's ex-interim payoff when its type is `t` and the receiver holds
/// belief `mu` and best-responds.
pub fn interim_payoff_a(cfg: &GameConfig, mu: Belief, t: BudgetType) -> f64 {
    interim_payoff_in(cfg, mu, t, investment_regime(cfg, mu))
}

pub(crate) fn interim_payoff_in(
    cfg: &GameConfig,
    mu: Belief,
    t: BudgetType,
    regime: InvestmentRegime,
) -> f64 {
    let prior = cfg.prior();
    let c = cfg.unit_cost();
    let phi = cfg.phi();
    match (regime, t) {
        (InvestmentRegime::InvestFull, _) => {
            prior.budget(t) * (c * phi / (2.0 * prior.expected_budget(mu))).sqrt()
        }
        (InvestmentRegime::InvestHedge, BudgetType::High) => phi,
        (InvestmentRegime::InvestHedge, BudgetType::Low) => {
            (c * phi * prior.a_low() / (2.0 * (1.0 - mu.value()))).sqrt()
        }
        (InvestmentRegime::Deterred, _) => phi,
    }
}

/// Signaler's payoff under the trivial policy (no information revealed).
pub fn no_signal_payoff(cfg: &GameConfig) -> f64 {
    let prior = cfg.prior();
    let p = cfg.p();
    let c = cfg.unit_cost();
    let phi = cfg.phi();
    match investment_regime(cfg, cfg.prior_belief()) {
        InvestmentRegime::InvestFull => {
            (c * phi * prior.expected_budget(cfg.prior_belief()) / 2.0).sqrt()
        }
        InvestmentRegime::InvestHedge => {
            p * phi + (c * phi * (1.0 - p) * prior.a_low() / 2.0).sqrt()
        }
        InvestmentRegime::Deterred => phi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: f64, c: f64) -> GameConfig {
        GameConfig::from_parts(1.2, 0.5, p, c, 1.0).unwrap()
    }

    fn belief(mu: f64) -> Belief {
        Belief::new(mu).unwrap()
    }

    #[test]
    fn invest_full_upper_branch() {
        let d = invest_best_response(&cfg(0.5, 0.3), belief(0.8));
        assert_eq!(d.regime, InvestmentRegime::InvestFull);
        assert!((d.amount - 1.329_160_135_825_125_7).abs() < 1e-14);
    }

    #[test]
    fn invest_deterred_at_weak_boundary() {
        // expected budget is exactly 1.0 here, so c = phi / (2 Abar).
        let mu = belief(5.0 / 7.0);
        let g = cfg(0.5, 0.5);
        assert_eq!(g.prior().expected_budget(mu), 1.0);
        let d = invest_best_response(&g, mu);
        assert_eq!(d.regime, InvestmentRegime::Deterred);
        assert_eq!(d.amount, 0.0);
    }

    #[test]
    fn invest_full_lower_branch() {
        let d = invest_best_response(&cfg(0.5, 0.5), Belief::CERTAIN_LOW);
        assert_eq!(d.regime, InvestmentRegime::InvestFull);
        assert!((d.amount - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn invest_hedge_and_deterred_lower_branch() {
        // a_low = 0.06: threshold ≈ 0.947, lambda(0.1) ≈ 0.1465, hedge cap 7.5.
        let g = GameConfig::from_parts(1.2, 0.06, 0.1, 2.0, 1.0).unwrap();
        let d = invest_best_response(&g, belief(0.1));
        assert_eq!(d.regime, InvestmentRegime::InvestHedge);
        assert!((d.amount - (0.9_f64 * 0.06 / 4.0).sqrt()).abs() < 1e-15);
        let g = g.with_cost(7.6).unwrap();
        assert_eq!(invest_best_response(&g, belief(0.1)).regime, InvestmentRegime::Deterred);
    }

    #[test]
    fn interim_examples() {
        let g = cfg(0.5, 0.5);
        assert_eq!(interim_payoff_a(&g, belief(5.0 / 7.0), BudgetType::High), 1.0);
        let v = interim_payoff_a(&g, Belief::CERTAIN_LOW, BudgetType::Low);
        assert!((v - 0.125_f64.sqrt()).abs() < 1e-15);
        let g = GameConfig::from_parts(1.2, 0.06, 0.1, 8.0, 1.0).unwrap();
        for t in [BudgetType::High, BudgetType::Low] {
            assert_eq!(interim_payoff_a(&g, belief(0.1), t), 1.0);
        }
    }

    #[test]
    fn no_signal_examples() {
        let v = no_signal_payoff(&cfg(0.5, 0.5));
        assert!((v - 0.460_977_222_864_644_4).abs() < 1e-15);
        assert_eq!(no_signal_payoff(&cfg(0.5, 0.6)), 1.0);
        let g = GameConfig::from_parts(1.2, 0.06, 0.1, 2.0, 1.0).unwrap();
        assert!((no_signal_payoff(&g) - 0.332_379_000_772_445).abs() < 1e-14);
    }

    #[test]
    fn zero_low_budget_hedges_for_free() {
        let g = GameConfig::from_parts(1.0, 0.0, 0.3, 0.4, 1.0).unwrap();
        let d = invest_best_response(&g, belief(0.3));
        assert_eq!(d.regime, InvestmentRegime::InvestHedge);
        assert_eq!(d.amount, 0.0);
        assert_eq!(interim_payoff_a(&g, belief(0.3), BudgetType::Low), 0.0);
        assert!((no_signal_payoff(&g) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn single_type_prior_uses_upper_branch() {
        let g = GameConfig::from_parts(1.0, 1.0, 0.4, 0.3, 1.0).unwrap();
        for mu in [0.0, 0.4, 1.0] {
            let d = invest_best_response(&g, belief(mu));
            assert_eq!(d.regime, InvestmentRegime::InvestFull);
            assert!((d.amount - (1.0_f64 / 0.6).sqrt()).abs() < 1e-15);
        }
    }
}
