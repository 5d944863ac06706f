//! Learning micro-foundation for threshold behaviour: binary profit signals
//! of accuracy `alpha`, naive aggregation of the signals held by informed
//! contacts, and a small cost `eta` per signal acquired.
//!
//! Throughout, `r = (cost - pi_lo) / (pi_hi - pi_lo)` is the posterior
//! probability of high profit at which adoption breaks even.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LearningError {
    #[error("signal accuracy must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("profits must satisfy pi_lo < cost < pi_hi, got pi_lo={pi_lo}, cost={cost}, pi_hi={pi_hi}")]
    Profits { pi_lo: f64, cost: f64, pi_hi: f64 },
    #[error("signal cost must be finite and non-negative, got {0}")]
    Eta(f64),
    #[error("{high} high signals out of {informed} informed contacts")]
    Tally { informed: u32, high: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningParams {
    pub alpha: f64,
    pub pi_hi: f64,
    pub pi_lo: f64,
    pub cost: f64,
    pub eta: f64,
}

impl LearningParams {
    pub fn new(alpha: f64, pi_hi: f64, pi_lo: f64, cost: f64, eta: f64) -> Result<Self, LearningError> {
        let p = LearningParams { alpha, pi_hi, pi_lo, cost, eta };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with a given break-even ratio `r`, normalised to
    /// `pi_lo = 0`, `pi_hi = 1`.
    pub fn with_ratio(alpha: f64, ratio: f64, eta: f64) -> Result<Self, LearningError> {
        Self::new(alpha, 1.0, 0.0, ratio, eta)
    }

    pub fn validate(&self) -> Result<(), LearningError> {
        check_alpha(self.alpha)?;
        let finite = self.pi_lo.is_finite() && self.pi_hi.is_finite() && self.cost.is_finite();
        if !(finite && self.pi_lo < self.cost && self.cost < self.pi_hi) {
            return Err(LearningError::Profits {
                pi_lo: self.pi_lo,
                cost: self.cost,
                pi_hi: self.pi_hi,
            });
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(LearningError::Eta(self.eta));
        }
        Ok(())
    }

    /// Break-even posterior `r`, strictly inside (0, 1) for valid params.
    pub fn ratio(&self) -> f64 {
        (self.cost - self.pi_lo) / (self.pi_hi - self.pi_lo)
    }
}

/// `D` informed contacts of whom `H` report high profit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalTally {
    informed: u32,
    high: u32,
}

impl SignalTally {
    pub fn new(informed_contacts: u32, high_signals: u32) -> Result<Self, LearningError> {
        if high_signals > informed_contacts {
            return Err(LearningError::Tally {
                informed: informed_contacts,
                high: high_signals,
            });
        }
        Ok(SignalTally {
            informed: informed_contacts,
            high: high_signals,
        })
    }

    pub fn informed_contacts(&self) -> u32 {
        self.informed
    }

    pub fn high_signals(&self) -> u32 {
        self.high
    }
}

fn check_alpha(alpha: f64) -> Result<(), LearningError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(LearningError::Alpha(alpha))
    }
}

/// `alpha^k / (alpha^k + (1-alpha)^k)` for a signed net signal count `k`.
fn net_signal_posterior(alpha: f64, k: i64) -> f64 {
    let odds = ((1.0 - alpha) / alpha).powf(k as f64);
    1.0 / (1.0 + odds)
}

/// Posterior probability of high profit after `H` high and `D - H` low signals.
pub fn posterior(alpha: f64, tally: SignalTally) -> Result<f64, LearningError> {
    check_alpha(alpha)?;
    Ok(net_signal_posterior(alpha, 2 * tally.high as i64 - tally.informed as i64))
}

/// Best-case posterior reachable from `d` unanimous high signals.
pub fn unanimous_posterior(alpha: f64, d: u64) -> f64 {
    net_signal_posterior(alpha, d as i64)
}

/// Adoption rule: posterior at least the break-even ratio.
pub fn adopts(params: &LearningParams, tally: SignalTally) -> bool {
    net_signal_posterior(params.alpha, 2 * tally.high as i64 - tally.informed as i64) >= params.ratio()
}

/// Whether a farmer with `informed_contacts` informed contacts (and a small
/// signal cost) would seek information: some signal realisation must be able
/// to push the posterior strictly above `r`.
pub fn seeks_information(params: &LearningParams, informed_contacts: u32) -> bool {
    unanimous_posterior(params.alpha, informed_contacts as u64) > params.ratio()
}

/// Smallest positive number of informed contacts that makes seeking
/// information worthwhile; `None` when no number suffices.
pub fn min_informed_connections(params: &LearningParams) -> Option<u64> {
    let (alpha, r) = (params.alpha, params.ratio());
    let f = |l: u64| unanimous_posterior(alpha, l);
    if alpha <= 0.5 {
        // constant (alpha = 0.5) or decreasing in l: only l = 1 can work
        return (f(1) > r).then_some(1);
    }
    let q = (r / (1.0 - r)).ln() / (alpha / (1.0 - alpha)).ln();
    let mut l = if q < 1.0 { 1 } else { q.floor() as u64 + 1 };
    while l > 1 && f(l - 1) > r {
        l -= 1;
    }
    while f(l) <= r {
        l += 1;
    }
    Some(l)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformationValue {
    /// Smallest signal count attaining the maximum.
    pub optimal_signal_count: u32,
    pub expected_value: f64,
    /// Net expected payoff for each `d = 0..=D`.
    pub value_by_count: Vec<f64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Net expected payoff of consulting `d` informed contacts: the uniform-prior
/// expectation of `profit - cost` over signal outcomes on which the farmer
/// adopts, minus `eta * d`.
pub fn signal_value(params: &LearningParams, d: u32) -> f64 {
    let a = params.alpha;
    let r = params.ratio();
    let gain_hi = params.pi_hi - params.cost;
    let gain_lo = params.pi_lo - params.cost;
    let mut total = 0.0;
    for h in 0..=d {
        if net_signal_posterior(a, 2 * h as i64 - d as i64) < r {
            continue;
        }
        let when_hi = a.powi(h as i32) * (1.0 - a).powi((d - h) as i32);
        let when_lo = (1.0 - a).powi(h as i32) * a.powi((d - h) as i32);
        total += 0.5 * binomial(d, h) * (when_hi * gain_hi + when_lo * gain_lo);
    }
    total - params.eta * d as f64
}

/// Optimal number of signals to acquire given `informed_contacts` available.
pub fn value_of_information(params: &LearningParams, informed_contacts: u32) -> InformationValue {
    let value_by_count: Vec<f64> = (0..=informed_contacts).map(|d| signal_value(params, d)).collect();
    let mut best = 0;
    for (d, &v) in value_by_count.iter().enumerate() {
        if v > value_by_count[best] {
            best = d;
        }
    }
    InformationValue {
        optimal_signal_count: best as u32,
        expected_value: value_by_count[best],
        value_by_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tally(d: u32, h: u32) -> SignalTally {
        SignalTally::new(d, h).unwrap()
    }

    #[test]
    fn uninformative_and_balanced_signals() {
        assert_eq!(posterior(0.5, tally(4, 3)).unwrap(), 0.5);
        for a in [0.3, 0.6, 0.9] {
            assert_eq!(posterior(a, tally(2, 1)).unwrap(), 0.5);
        }
    }

    #[test]
    fn three_high_signals() {
        // 0.6^3 / (0.6^3 + 0.4^3) = 0.216 / 0.280
        let p = posterior(0.6, tally(3, 3)).unwrap();
        assert!((p - 0.216 / 0.280).abs() < 1e-12);
    }

    #[test]
    fn alpha_domain_enforced() {
        assert_eq!(posterior(1.0, tally(1, 1)), Err(LearningError::Alpha(1.0)));
        assert!(posterior(0.0, tally(1, 1)).is_err());
        assert!(SignalTally::new(2, 3).is_err());
    }

    #[test]
    fn adoption_examples() {
        let p = LearningParams::with_ratio(0.7, 0.6, 0.0).unwrap();
        assert!(adopts(&p, tally(2, 2)));
        assert!(!adopts(&p, tally(2, 1)));
        assert!(!adopts(&p, tally(2, 0)));
        // adoption is weak: exactly at the ratio still adopts
        let at = LearningParams::with_ratio(0.7, 0.5, 0.0).unwrap();
        assert!(adopts(&at, tally(2, 1)));
    }

    #[test]
    fn thirty_percent_returns_example() {
        let r = 1.0 / 1.3;
        let m = |a: f64| min_informed_connections(&LearningParams::with_ratio(a, r, 0.0).unwrap());
        assert_eq!(m(0.80), Some(1));
        assert_eq!(m(0.70), Some(2));
        assert_eq!(m(0.60), Some(3));
    }

    #[test]
    fn never_when_signals_useless() {
        let p = LearningParams::with_ratio(0.5, 0.6, 0.0).unwrap();
        assert_eq!(min_informed_connections(&p), None);
        let p = LearningParams::with_ratio(0.4, 0.6, 0.0).unwrap();
        assert_eq!(min_informed_connections(&p), None);
        let p = LearningParams::with_ratio(0.45, 0.4, 0.0).unwrap();
        assert_eq!(min_informed_connections(&p), Some(1));
    }

    #[test]
    fn seeking_examples() {
        let r = 1.0 / 1.3;
        let p = |a: f64| LearningParams::with_ratio(a, r, 0.0).unwrap();
        assert!(seeks_information(&p(0.8), 1));
        assert!(!seeks_information(&p(0.7), 1));
        assert!(seeks_information(&p(0.6), 3));
        assert!(!seeks_information(&p(0.6), 0));
    }

    #[test]
    fn value_of_one_signal() {
        let p = LearningParams::new(0.8, 1.3, 0.0, 1.0, 0.0).unwrap();
        let v = value_of_information(&p, 1);
        assert_eq!(v.optimal_signal_count, 1);
        assert!((v.expected_value - 0.02).abs() < 1e-12);

        let costly = LearningParams { eta: 0.05, ..p };
        let v = value_of_information(&costly, 1);
        assert_eq!(v.optimal_signal_count, 0);
        assert_eq!(v.expected_value, 0.0);
    }

    #[test]
    fn no_contacts_no_value() {
        let p = LearningParams::with_ratio(0.7, 0.65, 0.01).unwrap();
        let v = value_of_information(&p, 0);
        assert_eq!((v.optimal_signal_count, v.expected_value), (0, 0.0));
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(10, 5), 252.0);
    }
}
