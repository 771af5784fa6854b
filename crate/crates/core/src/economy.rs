//! Token ledger and periodic settlement of harvested seaweed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SettlementConfig {
    /// Seconds between settlements.
    pub period: f64,
}

impl Default for SettlementConfig {
    fn default() -> Self {
        Self { period: 20.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenLedger {
    pub inserted_seaweed: u64,
    pub inserted_fungi: u64,
    pub dispensed: u64,
    /// Prices of plants harvested since the last settlement.
    pub unsettled_pool: Vec<f64>,
    /// Fractional token value carried into the next settlement, in `[0, 1)`.
    pub settlement_carry: f64,
}

impl TokenLedger {
    pub fn record_harvest(&mut self, price: f64) -> Result<()> {
        if !(price >= 0.0 && price.is_finite()) {
            return Err(Error::Logic(format!(
                "harvest price must be >= 0, got {price}"
            )));
        }
        self.unsettled_pool.push(price);
        Ok(())
    }

    /// Value waiting for the next settlement, including the carry.
    pub fn unsettled_total(&self) -> f64 {
        self.unsettled_pool.iter().sum::<f64>() + self.settlement_carry
    }

    /// Pays out the whole tokens owed and keeps the fraction. Returns the
    /// number of tokens dispensed.
    pub fn settle(&mut self) -> u64 {
        let total = self.unsettled_total();
        let whole = total.floor();
        self.settlement_carry = total - whole;
        self.unsettled_pool.clear();
        let dispense = whole as u64;
        self.dispensed += dispense;
        dispense
    }
}
