//! Integer time intervals `[lo, hi]` with an optionally unbounded upper end.
//!
//! The same carrier is used for place windows, transition windows and the
//! enabled-by/execution intervals of the pattern calculus.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// A closed interval of non-negative integer time units.
///
/// `hi == None` means the interval is unbounded above. Construction does not
/// enforce `lo <= hi`; structural validation reports malformed intervals so
/// that candidate nets can be diagnosed rather than rejected outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimeInterval {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl TimeInterval {
    /// `[0, 0]`, the identity for both [`TimeInterval::add`] and [`TimeInterval::max`].
    pub const ZERO: TimeInterval = TimeInterval { lo: 0, hi: Some(0) };
    /// `[0, inf]`.
    pub const ANY: TimeInterval = TimeInterval { lo: 0, hi: None };

    pub const fn new(lo: u64, hi: u64) -> Self {
        TimeInterval { lo, hi: Some(hi) }
    }

    pub const fn unbounded(lo: u64) -> Self {
        TimeInterval { lo, hi: None }
    }

    pub const fn point(t: u64) -> Self {
        TimeInterval::new(t, t)
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_some()
    }

    /// `lo <= hi` (always true when unbounded).
    pub fn is_ordered(&self) -> bool {
        self.hi.is_none_or(|hi| self.lo <= hi)
    }

    /// `lo < hi`, the strict form demanded in strict-intervals mode.
    /// Unbounded intervals are not strict-valid either.
    pub fn is_strict(&self) -> bool {
        self.hi.is_some_and(|hi| self.lo < hi)
    }

    pub fn contains(&self, t: u64) -> bool {
        t >= self.lo && self.hi.is_none_or(|hi| t <= hi)
    }

    /// Componentwise maximum; an unbounded end dominates.
    pub fn max(self, other: TimeInterval) -> TimeInterval {
        TimeInterval {
            lo: self.lo.max(other.lo),
            hi: match (self.hi, other.hi) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
        }
    }

    /// Componentwise minimum; a bounded end wins over an unbounded one.
    pub fn min(self, other: TimeInterval) -> TimeInterval {
        TimeInterval {
            lo: self.lo.min(other.lo),
            hi: match (self.hi, other.hi) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            },
        }
    }

    /// `[k * lo, k * hi]`, the sum of `k` identical copies.
    pub fn scale(self, k: u64) -> TimeInterval {
        TimeInterval {
            lo: self.lo.saturating_mul(k),
            hi: if k == 0 { Some(0) } else { self.hi.map(|h| h.saturating_mul(k)) },
        }
    }
}

/// Interval sum `[a.lo + b.lo, a.hi + b.hi]`; an unbounded end absorbs.
/// Saturates at `u64::MAX` instead of overflowing.
impl Add for TimeInterval {
    type Output = TimeInterval;

    fn add(self, other: TimeInterval) -> TimeInterval {
        TimeInterval {
            lo: self.lo.saturating_add(other.lo),
            hi: match (self.hi, other.hi) {
                (Some(a), Some(b)) => Some(a.saturating_add(b)),
                _ => None,
            },
        }
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) => write!(f, "[{},{}]", self.lo, hi),
            None => write!(f, "[{},inf]", self.lo),
        }
    }
}

/// Sum of two intervals.
pub fn interval_add(a: TimeInterval, b: TimeInterval) -> TimeInterval {
    a + b
}

/// Componentwise maximum of two intervals.
pub fn interval_max(a: TimeInterval, b: TimeInterval) -> TimeInterval {
    a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn add_examples() {
        assert_eq!(interval_add(TimeInterval::new(1, 2), TimeInterval::new(3, 4)), TimeInterval::new(4, 6));
        assert_eq!(interval_add(TimeInterval::ZERO, TimeInterval::new(5, 7)), TimeInterval::new(5, 7));
        assert_eq!(
            interval_add(TimeInterval::unbounded(1), TimeInterval::new(2, 3)),
            TimeInterval::unbounded(3)
        );
    }

    #[test]
    fn max_examples() {
        assert_eq!(interval_max(TimeInterval::new(1, 4), TimeInterval::new(2, 3)), TimeInterval::new(2, 4));
        assert_eq!(interval_max(TimeInterval::new(1, 2), TimeInterval::unbounded(1)), TimeInterval::unbounded(1));
    }

    #[test]
    fn display() {
        assert_eq!(TimeInterval::new(3, 6).to_string(), "[3,6]");
        assert_eq!(TimeInterval::unbounded(2).to_string(), "[2,inf]");
    }

    #[test]
    fn strictness() {
        assert!(TimeInterval::new(3, 3).is_ordered());
        assert!(!TimeInterval::new(3, 3).is_strict());
        assert!(!TimeInterval::new(5, 2).is_ordered());
        assert!(!TimeInterval::unbounded(0).is_strict());
    }

    fn arb_interval() -> impl Strategy<Value = TimeInterval> {
        (0u64..1000, prop::option::of(0u64..1000)).prop_map(|(a, b)| match b {
            Some(b) => TimeInterval::new(a.min(b), a.max(b)),
            None => TimeInterval::unbounded(a),
        })
    }

    proptest! {
        #[test]
        fn add_is_a_commutative_monoid(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + TimeInterval::ZERO, a);
        }

        #[test]
        fn max_is_an_idempotent_commutative_monoid(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            prop_assert_eq!(a.max(b), b.max(a));
            prop_assert_eq!(a.max(b).max(c), a.max(b.max(c)));
            prop_assert_eq!(a.max(a), a);
            prop_assert_eq!(a.max(TimeInterval::ZERO), a);
        }

        #[test]
        fn results_stay_ordered(a in arb_interval(), b in arb_interval(), k in 0u64..20) {
            prop_assert!((a + b).is_ordered());
            prop_assert!(a.max(b).is_ordered());
            prop_assert!(a.scale(k).is_ordered());
        }
    }
}
