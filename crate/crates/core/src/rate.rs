use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative noise rate `nc / cc`, kept exact.
///
/// `cc = 0` is rate 0 when `nc = 0` and `+inf` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseRate {
    pub nc: u64,
    pub cc: u64,
}

impl NoiseRate {
    pub fn new(nc: u64, cc: u64) -> Self {
        NoiseRate { nc, cc }
    }

    pub fn is_infinite(&self) -> bool {
        self.cc == 0 && self.nc > 0
    }

    pub fn as_f64(&self) -> f64 {
        match (self.nc, self.cc) {
            (0, 0) => 0.0,
            (_, 0) => f64::INFINITY,
            (nc, cc) => nc as f64 / cc as f64,
        }
    }

    /// Exact comparison against the rational `num / den` (`den > 0`).
    pub fn cmp_ratio(&self, num: u64, den: u64) -> Ordering {
        assert!(den > 0, "ratio denominator must be positive");
        if self.is_infinite() {
            return Ordering::Greater;
        }
        if self.cc == 0 {
            return 0u128.cmp(&(num as u128));
        }
        (self.nc as u128 * den as u128).cmp(&(num as u128 * self.cc as u128))
    }

    pub fn le_ratio(&self, num: u64, den: u64) -> bool {
        self.cmp_ratio(num, den) != Ordering::Greater
    }

    pub fn lt_ratio(&self, num: u64, den: u64) -> bool {
        self.cmp_ratio(num, den) == Ordering::Less
    }

    /// Six fractional digits, `inf` for the degenerate case.
    pub fn to_decimal(&self) -> String {
        if self.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.6}", self.as_f64())
        }
    }
}

impl PartialOrd for NoiseRate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NoiseRate {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => {
                let lhs = self.nc as u128 * other.cc.max(1) as u128 * u128::from(self.cc > 0);
                let rhs = other.nc as u128 * self.cc.max(1) as u128 * u128::from(other.cc > 0);
                lhs.cmp(&rhs)
            }
        }
    }
}

impl fmt::Display for NoiseRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_rates() {
        assert_eq!(NoiseRate::new(0, 0).as_f64(), 0.0);
        assert!(NoiseRate::new(1, 0).as_f64().is_infinite());
        assert_eq!(NoiseRate::new(1, 0).to_decimal(), "inf");
    }

    #[test]
    fn exact_comparisons() {
        let r = NoiseRate::new(7, 30);
        assert!(r.le_ratio(7, 30));
        assert!(!r.lt_ratio(7, 30));
        assert!(NoiseRate::new(3, 2) > NoiseRate::new(1, 1));
        assert!(NoiseRate::new(1, 3) < NoiseRate::new(1, 2));
        assert!(NoiseRate::new(0, 0) < NoiseRate::new(1, 100));
        assert_eq!(NoiseRate::new(1, 3).to_decimal(), "0.333333");
    }
}
