use std::cmp::Ordering;
use std::fmt;

use rust_decimal::Decimal;

/// One end of a numeric interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Facet {
    pub value: Decimal,
    pub inclusive: bool,
}

impl Facet {
    pub fn inclusive(value: Decimal) -> Self {
        Facet {
            value,
            inclusive: true,
        }
    }

    pub fn exclusive(value: Decimal) -> Self {
        Facet {
            value,
            inclusive: false,
        }
    }
}

/// A decimal interval built from xsd-style facets. At most one lower and one
/// upper facet can be present, so the representation keeps exactly one of each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NumericRange {
    pub lower: Option<Facet>,
    pub upper: Option<Facet>,
}

impl NumericRange {
    pub fn unbounded() -> Self {
        NumericRange::default()
    }

    pub fn at_least(v: Decimal) -> Self {
        NumericRange {
            lower: Some(Facet::inclusive(v)),
            upper: None,
        }
    }

    pub fn greater_than(v: Decimal) -> Self {
        NumericRange {
            lower: Some(Facet::exclusive(v)),
            upper: None,
        }
    }

    pub fn at_most(v: Decimal) -> Self {
        NumericRange {
            lower: None,
            upper: Some(Facet::inclusive(v)),
        }
    }

    pub fn less_than(v: Decimal) -> Self {
        NumericRange {
            lower: None,
            upper: Some(Facet::exclusive(v)),
        }
    }

    pub fn exactly(v: Decimal) -> Self {
        NumericRange {
            lower: Some(Facet::inclusive(v)),
            upper: Some(Facet::inclusive(v)),
        }
    }

    pub fn with_lower(mut self, f: Facet) -> Self {
        self.lower = Some(f);
        self
    }

    pub fn with_upper(mut self, f: Facet) -> Self {
        self.upper = Some(f);
        self
    }

    pub fn min_inclusive(&self) -> Option<Decimal> {
        self.lower.filter(|f| f.inclusive).map(|f| f.value)
    }

    pub fn min_exclusive(&self) -> Option<Decimal> {
        self.lower.filter(|f| !f.inclusive).map(|f| f.value)
    }

    pub fn max_inclusive(&self) -> Option<Decimal> {
        self.upper.filter(|f| f.inclusive).map(|f| f.value)
    }

    pub fn max_exclusive(&self) -> Option<Decimal> {
        self.upper.filter(|f| !f.inclusive).map(|f| f.value)
    }

    /// True when no decimal satisfies both facets. The value space is dense,
    /// so `(a, b)` with `a < b` is never empty.
    pub fn is_empty(&self) -> bool {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => match lo.value.cmp(&hi.value) {
                Ordering::Greater => true,
                Ordering::Equal => !(lo.inclusive && hi.inclusive),
                Ordering::Less => false,
            },
            _ => false,
        }
    }

    pub fn contains(&self, v: Decimal) -> bool {
        let above = match self.lower {
            None => true,
            Some(f) if f.inclusive => v >= f.value,
            Some(f) => v > f.value,
        };
        let below = match self.upper {
            None => true,
            Some(f) if f.inclusive => v <= f.value,
            Some(f) => v < f.value,
        };
        above && below
    }

    /// Intersection of two ranges (possibly empty).
    pub fn intersect(&self, other: &NumericRange) -> NumericRange {
        NumericRange {
            lower: tighter_lower(self.lower, other.lower),
            upper: tighter_upper(self.upper, other.upper),
        }
    }

    /// `self \ other` as a list of disjoint, non-empty ranges.
    pub fn subtract(&self, other: &NumericRange) -> Vec<NumericRange> {
        if self.is_empty() {
            return Vec::new();
        }
        if other.is_empty() || self.intersect(other).is_empty() {
            return vec![*self];
        }
        let mut out = Vec::new();
        // part of self below other's lower bound
        if let Some(lo) = other.lower {
            let below = NumericRange {
                lower: self.lower,
                upper: Some(Facet {
                    value: lo.value,
                    inclusive: !lo.inclusive,
                }),
            }
            .intersect(self);
            if !below.is_empty() {
                out.push(below);
            }
        }
        if let Some(hi) = other.upper {
            let above = NumericRange {
                lower: Some(Facet {
                    value: hi.value,
                    inclusive: !hi.inclusive,
                }),
                upper: self.upper,
            }
            .intersect(self);
            if !above.is_empty() {
                out.push(above);
            }
        }
        out
    }
}

fn tighter_lower(a: Option<Facet>, b: Option<Facet>) -> Option<Facet> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(match x.value.cmp(&y.value) {
            Ordering::Greater => x,
            Ordering::Less => y,
            Ordering::Equal => Facet {
                value: x.value,
                inclusive: x.inclusive && y.inclusive,
            },
        }),
    }
}

fn tighter_upper(a: Option<Facet>, b: Option<Facet>) -> Option<Facet> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(match x.value.cmp(&y.value) {
            Ordering::Less => x,
            Ordering::Greater => y,
            Ordering::Equal => Facet {
                value: x.value,
                inclusive: x.inclusive && y.inclusive,
            },
        }),
    }
}

impl fmt::Display for NumericRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(lo) = self.lower {
            parts.push(format!("{} {}", if lo.inclusive { ">=" } else { ">" }, lo.value));
        }
        if let Some(hi) = self.upper {
            parts.push(format!("{} {}", if hi.inclusive { "<=" } else { "<" }, hi.value));
        }
        write!(f, "range[{}]", parts.join(", "))
    }
}
