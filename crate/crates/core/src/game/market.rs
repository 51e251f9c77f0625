use crate::error::{ModelError, Result};

/// Jammer prices and their utility exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    /// Price per unit jamming power, one per jammer.
    pub prices: Vec<f64>,
    /// Exponent `c_i >= 1` in `U_i = m_i p_i^{c_i}`.
    pub cost_exponents: Vec<f64>,
}

impl Market {
    pub fn new(prices: Vec<f64>, cost_exponents: Vec<f64>) -> Result<Self> {
        if prices.len() != cost_exponents.len() {
            return Err(ModelError::DimensionMismatch {
                expected: prices.len(),
                got: cost_exponents.len(),
            });
        }
        if !prices.iter().all(|m| m.is_finite() && *m >= 0.0) {
            return Err(ModelError::InvalidArgument(
                "prices must be finite and >= 0".into(),
            ));
        }
        if !cost_exponents.iter().all(|c| c.is_finite() && *c >= 1.0) {
            return Err(ModelError::InvalidArgument(
                "cost exponents must be >= 1".into(),
            ));
        }
        Ok(Self {
            prices,
            cost_exponents,
        })
    }

    /// `n` jammers sharing one price and exponent.
    pub fn uniform(n: usize, price: f64, cost_exponent: f64) -> Result<Self> {
        Self::new(vec![price; n], vec![cost_exponent; n])
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub(crate) fn expect_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(ModelError::DimensionMismatch {
                expected: n,
                got: self.len(),
            })
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(ModelError::JammerIndex {
                index,
                count: self.len(),
            })
        }
    }

    /// Copy with jammer `index` asking `price`.
    pub fn with_price(&self, index: usize, price: f64) -> Self {
        let mut m = self.clone();
        m.prices[index] = price;
        m
    }

    /// Total payment `sum_i m_i p_i`.
    pub fn payment(&self, powers: &[f64]) -> f64 {
        self.prices.iter().zip(powers).map(|(m, p)| m * p).sum()
    }
}

/// Seller utility `m_i p^{c_i}`.
pub fn jammer_utility(jammer_index: usize, market: &Market, power: f64) -> Result<f64> {
    market.check_index(jammer_index)?;
    if !(power >= 0.0) {
        return Err(ModelError::InvalidArgument(format!(
            "jamming power must be >= 0, got {power}"
        )));
    }
    let m = market.prices[jammer_index];
    let c = market.cost_exponents[jammer_index];
    Ok(m * power.powf(c))
}
