//! Equilibrium signaling in Bernoulli General Lotto games.
//!
//! A signaler with a privately known high or low budget commits to a noisy
//! signaling policy. The receiver updates its belief from the signal, buys
//! resources at a per-unit cost and then plays a General Lotto game against
//! the signaler. This crate computes everything in closed form: receiver best
//! responses, signaler payoffs, the optimal policy and the parameter regions
//! where signaling beats staying silent. [`oracle`] re-derives the optimum by
//! exhaustive search so the closed forms can be audited.

pub mod equilibrium;
pub mod error;
pub mod model;
pub mod oracle;
pub mod signaling;
pub mod sweep;

pub use equilibrium::{
    interim_payoff_a, invest_best_response, investment_regime, no_signal_payoff,
    InvestmentDecision, InvestmentRegime,
};
pub use error::{Error, Result};
pub use model::{
    ci_payoff_a, ci_payoff_b, f_p, f_p_with_limit, posterior_high, Belief, BudgetPrior,
    BudgetType, GameConfig, SignalPolicy,
};
pub use signaling::{
    case2_condition, case3_lower_cost, classify, objective, objective_piecewise, spe_solve,
    RegionClass, RegionTag, SpeSolution,
};
