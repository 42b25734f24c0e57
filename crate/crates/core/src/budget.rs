//! Run budgets: wall-clock seconds, or deterministic rollout/flip counts.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Budget {
    Seconds(f64),
    /// Leaf evaluations (rollouts plus terminal-state scorings).
    Rollouts(u64),
    /// Local search flips. Every evaluation is charged at least one unit so
    /// flip-free rollouts still consume budget.
    Flips(u64),
}

impl Budget {
    /// Column value used in result files.
    pub fn mode_name(&self) -> &'static str {
        match self {
            Budget::Seconds(_) => "seconds",
            Budget::Rollouts(_) => "rollouts",
            Budget::Flips(_) => "flips",
        }
    }

    pub fn amount(&self) -> f64 {
        match *self {
            Budget::Seconds(s) => s,
            Budget::Rollouts(r) => r as f64,
            Budget::Flips(f) => f as f64,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Budget::Seconds(_))
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Seconds(s) => write!(f, "{s}s"),
            Budget::Rollouts(r) => write!(f, "{r}r"),
            Budget::Flips(n) => write!(f, "{n}f"),
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    /// `<secs>s`, `<count>r` or `<count>f`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || format!("invalid budget `{s}` (expected e.g. 300s, 1000r or 200000f)");
        let (num, unit) = s.split_at(s.len().checked_sub(1).ok_or_else(err)?);
        match unit {
            "s" => {
                let secs: f64 = num.parse().map_err(|_| err())?;
                if !(secs >= 0.0 && secs.is_finite()) {
                    return Err(err());
                }
                Ok(Budget::Seconds(secs))
            }
            "r" => num.parse().map(Budget::Rollouts).map_err(|_| err()),
            "f" => num.parse().map(Budget::Flips).map_err(|_| err()),
            _ => Err(err()),
        }
    }
}

/// Consumption of a [`Budget`] during one run.
#[derive(Debug, Clone)]
pub struct BudgetTracker {
    budget: Budget,
    started: Instant,
    rollouts: u64,
    flips: u64,
    charged: u64,
}

impl BudgetTracker {
    pub fn new(budget: Budget) -> Self {
        Self::starting_at(budget, Instant::now())
    }

    pub fn starting_at(budget: Budget, started: Instant) -> Self {
        BudgetTracker {
            budget,
            started,
            rollouts: 0,
            flips: 0,
            charged: 0,
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn record(&mut self, flips: u64) {
        self.rollouts += 1;
        self.flips += flips;
        self.charged += flips.max(1);
    }

    pub fn rollouts(&self) -> u64 {
        self.rollouts
    }

    pub fn flips(&self) -> u64 {
        self.flips
    }

    pub fn elapsed_s(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub fn exhausted(&self) -> bool {
        match self.budget {
            Budget::Seconds(s) => self.elapsed_s() >= s,
            Budget::Rollouts(r) => self.rollouts >= r,
            Budget::Flips(f) => self.charged >= f,
        }
    }

    /// Flips still available to the next local search, if counted.
    pub fn flip_cap(&self) -> Option<u64> {
        match self.budget {
            Budget::Flips(f) => Some(f.saturating_sub(self.charged)),
            _ => None,
        }
    }
}
