//! Shared resource caps: a SAT-call budget and a wall-clock deadline.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::error::{Error, LimitKind, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Limits {
    pub max_sat_calls: Option<u64>,
    pub timeout: Option<Duration>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Self::default()
    }
}

/// Counts SAT-engine invocations against [`Limits`]. Every oracle charges
/// one call here before each `solve`.
#[derive(Debug)]
pub struct Budget {
    used: AtomicU64,
    max_sat_calls: Option<u64>,
    deadline: Option<Instant>,
}

impl Budget {
    pub fn new(limits: Limits) -> Self {
        Budget {
            used: AtomicU64::new(0),
            max_sat_calls: limits.max_sat_calls,
            deadline: limits.timeout.map(|t| Instant::now() + t),
        }
    }

    pub fn unlimited() -> Self {
        Self::new(Limits::unlimited())
    }

    pub fn sat_calls(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }

    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Limit(LimitKind::Timeout)),
            _ => Ok(()),
        }
    }

    /// Records one SAT call, failing if the budget or deadline is exhausted.
    pub fn charge(&self) -> Result<()> {
        self.check_deadline()?;
        let used = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        match self.max_sat_calls {
            Some(max) if used > max => {
                self.used.fetch_sub(1, Ordering::Relaxed);
                Err(Error::Limit(LimitKind::SatCalls))
            }
            _ => Ok(()),
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::unlimited()
    }
}
