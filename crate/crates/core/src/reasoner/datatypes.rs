use rust_decimal::Decimal;

use crate::model::NumericRange;

/// Does `value` satisfy every facet of `range`?
pub fn check_numeric_range(range: &NumericRange, value: Decimal) -> bool {
    range.contains(value)
}

/// Do two ranges share at least one decimal?
pub fn ranges_intersect(a: &NumericRange, b: &NumericRange) -> bool {
    !a.intersect(b).is_empty()
}
