use crate::error::{Error, Result};

/// Which size measure a growth record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Employees,
    Sales,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Employees => "employees",
            Metric::Sales => "sales",
        }
    }
}

/// One firm's size before and after a single iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRecord {
    pub size_before: f64,
    pub size_after: f64,
    pub metric: Metric,
}

impl GrowthRecord {
    pub fn new(size_before: f64, size_after: f64, metric: Metric) -> Result<Self> {
        if !(size_before > 0.0) || !(size_after >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "growth record needs size_before > 0 and size_after >= 0, got {size_before} -> {size_after}"
            )));
        }
        Ok(Self { size_before, size_after, metric })
    }

    /// g = size_after / size_before.
    pub fn growth_rate(&self) -> f64 {
        self.size_after / self.size_before
    }
}
