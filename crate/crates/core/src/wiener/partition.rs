use serde::Serialize;

use crate::error::{Error, Result};

/// Increasing time grid `0 = t_0 < t_1 < … < t_N`.
///
/// Step `r` (1-based) covers `[t_{r-1}, t_r]` and owns the Brownian increment
/// generators of slice `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    nodes: Vec<f64>,
}

impl Partition {
    /// Nodes must start at 0, be finite and strictly increasing, with at least one step.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter("a partition needs at least one step".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidParameter("partitions start at t = 0".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidTime(f64::NAN));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonIncreasingTimes);
        }
        Ok(Self { nodes })
    }

    /// `N` equal steps on `[0, t]`.
    pub fn uniform(t: f64, steps: usize) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("a partition needs at least one step".into()));
        }
        Self::new((0..=steps).map(|r| t * r as f64 / steps as f64).collect())
    }

    /// Grid through the given positive, strictly increasing times, with `t_0 = 0` prepended.
    pub fn through(times: &[f64]) -> Result<Self> {
        if let Some(&t) = times.first() {
            if t <= 0.0 {
                return Err(Error::InvalidTime(t));
            }
        }
        let mut nodes = Vec::with_capacity(times.len() + 1);
        nodes.push(0.0);
        nodes.extend_from_slice(times);
        Self::new(nodes)
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, r: usize) -> f64 {
        self.nodes[r]
    }

    /// Length of step `r` (1-based).
    pub fn dt(&self, r: usize) -> f64 {
        self.nodes[r] - self.nodes[r - 1]
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().expect("non-empty")
    }

    /// `max_r (t_r - t_{r-1})`.
    pub fn mesh(&self) -> f64 {
        (1..=self.steps()).map(|r| self.dt(r)).fold(0.0, f64::max)
    }

    /// Bisect every step.
    pub fn refine(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.horizon());
        Self { nodes }
    }

    /// Index of the node equal to `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.nodes.iter().position(|&s| s == t)
    }
}
