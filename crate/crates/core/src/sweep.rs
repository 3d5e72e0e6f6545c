//! (cost, prior) parameter sweeps of the equilibrium solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GameConfig;
use crate::signaling::{spe_solve, RegionTag};

/// Significant digits kept for numbers written to sweep files.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub a_high: f64,
    pub a_low: f64,
    pub phi: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub c_steps: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub p_steps: usize,
}

impl SweepSpec {
    /// Default window: `c ∈ [0.3, 1.1]`, `p ∈ [0.01, 0.99]`, 200 × 200.
    pub fn with_defaults(a_high: f64, a_low: f64, phi: f64) -> Self {
        Self {
            a_high,
            a_low,
            phi,
            c_min: 0.3,
            c_max: 1.1,
            c_steps: 200,
            p_min: 0.01,
            p_max: 0.99,
            p_steps: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        GameConfig::from_parts(self.a_high, self.a_low, 0.5, 1.0, self.phi)?;
        let ok = |cond: bool, what| if cond { Ok(()) } else { Err(Error::InvalidParameter(what)) };
        ok(self.c_min > 0.0, "c_min > 0")?;
        ok(self.c_min < self.c_max && self.c_max.is_finite(), "c_min < c_max")?;
        ok(self.p_min < self.p_max, "p_min < p_max")?;
        ok(self.p_min >= 0.0 && self.p_max <= 1.0, "0 ≤ p_min, p_max ≤ 1")?;
        ok(self.c_steps >= 2 && self.p_steps >= 2, "steps ≥ 2")?;
        Ok(())
    }

    pub fn c_step(&self) -> f64 {
        (self.c_max - self.c_min) / (self.c_steps - 1) as f64
    }

    pub fn p_step(&self) -> f64 {
        (self.p_max - self.p_min) / (self.p_steps - 1) as f64
    }

    /// Cost axis, rounded to the digits written out so rows re-solve exactly.
    pub fn c_values(&self) -> Vec<f64> {
        axis(self.c_min, self.c_max, self.c_steps)
    }

    pub fn p_values(&self) -> Vec<f64> {
        axis(self.p_min, self.p_max, self.p_steps)
    }
}

fn axis(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            let x = if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 };
            round_sig(x, SIGNIFICANT_DIGITS).clamp(lo, hi)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub c: f64,
    pub p: f64,
    pub region: RegionTag,
    pub q_star: f64,
    pub pi_ns: f64,
    pub pi_star: f64,
    pub improvement_pct: f64,
}

pub fn solve_cell(spec: &SweepSpec, c: f64, p: f64) -> Result<SweepCell> {
    let cfg = GameConfig::from_parts(spec.a_high, spec.a_low, p, c, spec.phi)?;
    let s = spe_solve(&cfg);
    Ok(SweepCell {
        c,
        p,
        region: s.region.tag,
        q_star: s.q_star,
        pi_ns: s.pi_ns,
        pi_star: s.pi_star,
        improvement_pct: s.improvement_pct,
    })
}

/// Solve every grid cell. Rows come back cost-major, then prior, whatever
/// order the cells were computed in.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    let ps = spec.p_values();
    let points: Vec<(f64, f64)> =
        spec.c_values().into_iter().flat_map(|c| ps.iter().map(move |&p| (c, p))).collect();
    points.par_iter().map(|&(c, p)| solve_cell(spec, c, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sig_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1234567890123456, 12), 0.123456789012);
        assert_eq!(round_sig(74.86027013848043, 12), 74.8602701385);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert!(round_sig(f64::NAN, 12).is_nan());
    }

    #[test]
    fn axis_endpoints_exact() {
        let spec = SweepSpec::with_defaults(1.2, 0.5, 1.0);
        let cs = spec.c_values();
        assert_eq!(cs.len(), 200);
        assert_eq!(cs[0], 0.3);
        assert_eq!(cs[199], 1.1);
        assert!(cs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sweep_row_order_is_cost_major() {
        let spec = SweepSpec {
            c_steps: 3,
            p_steps: 4,
            ..SweepSpec::with_defaults(1.2, 0.5, 1.0)
        };
        let cells = run_sweep(&spec).unwrap();
        assert_eq!(cells.len(), 12);
        assert_eq!(cells[0].c, cells[3].c);
        assert!(cells[3].c < cells[4].c);
        assert!(cells[0].p < cells[1].p);
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = SweepSpec::with_defaults(1.2, 0.5, 1.0);
        for bad in [
            SweepSpec { c_min: 0.0, ..base },
            SweepSpec { c_max: 0.2, ..base },
            SweepSpec { p_max: 1.5, ..base },
            SweepSpec { p_min: 0.99, p_max: 0.5, ..base },
            SweepSpec { c_steps: 1, ..base },
            SweepSpec { a_low: 2.0, ..base },
        ] {
            assert!(run_sweep(&bad).is_err(), "{bad:?}");
        }
    }
}
