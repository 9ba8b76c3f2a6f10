//! The three supported norm orders and their Hölder conjugates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Norm order `p` (or `q`) restricted to {1, 2, ∞}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(try_from = "String", into = "String")]
pub enum NormOrder {
    One,
    #[default]
    Two,
    Inf,
}

impl NormOrder {
    /// The Hölder conjugate: 1/p + 1/q = 1.
    pub fn conjugate(self) -> Self {
        match self {
            NormOrder::One => NormOrder::Inf,
            NormOrder::Two => NormOrder::Two,
            NormOrder::Inf => NormOrder::One,
        }
    }

    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormOrder::One => v.iter().map(|x| x.abs()).sum(),
            NormOrder::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormOrder::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// Norm of the element-wise difference `a - b`.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            NormOrder::One => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            NormOrder::Two => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            NormOrder::Inf => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormOrder::One => "1",
            NormOrder::Two => "2",
            NormOrder::Inf => "inf",
        })
    }
}

impl FromStr for NormOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" | "one" => Ok(NormOrder::One),
            "2" | "l2" | "two" => Ok(NormOrder::Two),
            "inf" | "infinity" | "linf" | "max" => Ok(NormOrder::Inf),
            other => Err(format!(
                "unsupported norm order `{other}` (expected 1, 2 or inf)"
            )),
        }
    }
}

impl TryFrom<String> for NormOrder {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NormOrder> for String {
    fn from(q: NormOrder) -> Self {
        q.to_string()
    }
}
