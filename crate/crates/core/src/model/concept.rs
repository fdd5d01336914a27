use std::fmt;

use super::numeric::NumericRange;

/// A role, possibly inverted. Double inversion normalizes away.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleExpr {
    pub name: String,
    pub inverted: bool,
}

impl RoleExpr {
    pub fn named(name: impl Into<String>) -> Self {
        RoleExpr {
            name: name.into(),
            inverted: false,
        }
    }

    pub fn inverse_of(name: impl Into<String>) -> Self {
        RoleExpr {
            name: name.into(),
            inverted: true,
        }
    }

    pub fn inverse(&self) -> Self {
        RoleExpr {
            name: self.name.clone(),
            inverted: !self.inverted,
        }
    }
}

impl From<&str> for RoleExpr {
    fn from(name: &str) -> Self {
        RoleExpr::named(name)
    }
}

/// Description-logic concept expression.
///
/// `And`/`Or` are n-ary and keep operand order; the smart constructors
/// [`ConceptExpr::and`] and [`ConceptExpr::or`] collapse singleton lists so a
/// constructed value always has two or more operands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atomic(String),
    Not(Box<ConceptExpr>),
    And(Vec<ConceptExpr>),
    Or(Vec<ConceptExpr>),
    Exists(RoleExpr, Box<ConceptExpr>),
    ForAll(RoleExpr, Box<ConceptExpr>),
    AtLeast(u32, RoleExpr),
    AtMost(u32, RoleExpr),
    HasValue(RoleExpr, String),
    OneOf(Vec<String>),
    DataSome(String, NumericRange),
}

impl ConceptExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    /// Conjunction; an empty list is `Top`, a singleton is its operand.
    pub fn and(mut ops: Vec<ConceptExpr>) -> Self {
        match ops.len() {
            0 => ConceptExpr::Top,
            1 => ops.pop().unwrap(),
            _ => ConceptExpr::And(ops),
        }
    }

    /// Disjunction; an empty list is `Bottom`, a singleton is its operand.
    pub fn or(mut ops: Vec<ConceptExpr>) -> Self {
        match ops.len() {
            0 => ConceptExpr::Bottom,
            1 => ops.pop().unwrap(),
            _ => ConceptExpr::Or(ops),
        }
    }

    pub fn some(role: impl Into<RoleExpr>, filler: ConceptExpr) -> Self {
        ConceptExpr::Exists(role.into(), Box::new(filler))
    }

    pub fn only(role: impl Into<RoleExpr>, filler: ConceptExpr) -> Self {
        ConceptExpr::ForAll(role.into(), Box::new(filler))
    }

    pub fn has_value(role: impl Into<RoleExpr>, individual: impl Into<String>) -> Self {
        ConceptExpr::HasValue(role.into(), individual.into())
    }

    pub fn one_of<I, S>(individuals: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ConceptExpr::OneOf(individuals.into_iter().map(Into::into).collect())
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ConceptExpr::Atomic(_))
    }

    pub fn as_atomic(&self) -> Option<&str> {
        match self {
            ConceptExpr::Atomic(n) => Some(n),
            _ => None,
        }
    }

    /// Calls `f` on every sub-expression, pre-order, including `self`.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ConceptExpr)) {
        f(self);
        match self {
            ConceptExpr::Not(c) | ConceptExpr::Exists(_, c) | ConceptExpr::ForAll(_, c) => c.walk(f),
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => cs.iter().for_each(|c| c.walk(f)),
            _ => {}
        }
    }

    /// Named classes occurring anywhere in the expression.
    pub fn concept_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |c| {
            if let ConceptExpr::Atomic(n) = c {
                out.push(n.as_str());
            }
        });
        out
    }

    /// Object roles occurring anywhere in the expression.
    pub fn roles(&self) -> Vec<&RoleExpr> {
        let mut out = Vec::new();
        self.walk(&mut |c| match c {
            ConceptExpr::Exists(r, _)
            | ConceptExpr::ForAll(r, _)
            | ConceptExpr::AtLeast(_, r)
            | ConceptExpr::AtMost(_, r)
            | ConceptExpr::HasValue(r, _) => out.push(r),
            _ => {}
        });
        out
    }

    /// Individuals referenced through nominals.
    pub fn individuals(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |c| match c {
            ConceptExpr::HasValue(_, i) => out.push(i.as_str()),
            ConceptExpr::OneOf(is) => out.extend(is.iter().map(String::as_str)),
            _ => {}
        });
        out
    }

    pub fn data_properties(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |c| {
            if let ConceptExpr::DataSome(p, _) = c {
                out.push(p.as_str());
            }
        });
        out
    }

    pub fn has_nominals(&self) -> bool {
        !self.individuals().is_empty()
    }

    /// Nesting depth of the syntax tree; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            ConceptExpr::Not(c) | ConceptExpr::Exists(_, c) | ConceptExpr::ForAll(_, c) => 1 + c.depth(),
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => 1 + cs.iter().map(|c| c.depth()).max().unwrap_or(0),
            _ => 1,
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::write_concept(self))
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::write_role(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_and_or_collapse() {
        let a = ConceptExpr::atomic("A");
        assert_eq!(ConceptExpr::and(vec![a.clone()]), a);
        assert_eq!(ConceptExpr::or(vec![a.clone()]), a);
        assert_eq!(ConceptExpr::and(vec![]), ConceptExpr::Top);
        assert_eq!(ConceptExpr::or(vec![]), ConceptExpr::Bottom);
    }

    #[test]
    fn operand_order_is_significant() {
        let a = ConceptExpr::atomic("A");
        let b = ConceptExpr::atomic("B");
        assert_ne!(
            ConceptExpr::and(vec![a.clone(), b.clone()]),
            ConceptExpr::and(vec![b, a])
        );
    }

    #[test]
    fn double_inverse_is_identity() {
        let r = RoleExpr::named("hasChild");
        assert_eq!(r.inverse().inverse(), r);
        assert!(r.inverse().inverted);
    }
}
