use crate::error::{Error, Result};

/// Positive firm sizes at one iteration, sorted largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeSnapshot {
    time: u64,
    sizes: Vec<f64>,
}

impl SizeSnapshot {
    /// Drops non-positive sizes and sorts the rest descending.
    pub fn new(time: u64, sizes: impl IntoIterator<Item = f64>) -> Self {
        let mut sizes: Vec<f64> = sizes.into_iter().filter(|&s| s > 0.0).collect();
        sizes.sort_by(|a, b| b.total_cmp(a));
        Self { time, sizes }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn largest(&self) -> Result<f64> {
        self.sizes.first().copied().ok_or_else(|| Error::InsufficientData("empty snapshot".into()))
    }
}

/// One line of the snapshot export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub firm_id: usize,
    pub size: f64,
    pub output: f64,
    pub sold: f64,
}
