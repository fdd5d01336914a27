//! Finite interpretations and a literal evaluator for concept expressions.
//! Used as the ground truth the tableau is tested against.

use std::collections::{BTreeMap, BTreeSet};

use rust_decimal::Decimal;

use super::ReasonerError;
use crate::model::{ConceptExpr, RoleExpr};

pub type Element = usize;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteInterpretation {
    pub domain: BTreeSet<Element>,
    pub concept_ext: BTreeMap<String, BTreeSet<Element>>,
    pub role_ext: BTreeMap<String, BTreeSet<(Element, Element)>>,
    pub individual_map: BTreeMap<String, Element>,
    /// Optional data valuation; a property without one has no values.
    pub data_ext: BTreeMap<String, BTreeSet<(Element, Decimal)>>,
}

impl FiniteInterpretation {
    /// Interpretation over `0..n` with every extension empty.
    pub fn with_domain(n: usize) -> Self {
        FiniteInterpretation {
            domain: (0..n).collect(),
            ..Default::default()
        }
    }

    fn successors(&self, r: &RoleExpr, x: Element) -> Result<Vec<Element>, ReasonerError> {
        let pairs = self
            .role_ext
            .get(&r.name)
            .ok_or_else(|| ReasonerError::UnmappedName(r.name.clone()))?;
        Ok(pairs
            .iter()
            .filter_map(|&(a, b)| match (r.inverted, a == x, b == x) {
                (false, true, _) => Some(b),
                (true, _, true) => Some(a),
                _ => None,
            })
            .collect())
    }

    fn individual(&self, name: &str) -> Result<Element, ReasonerError> {
        self.individual_map
            .get(name)
            .copied()
            .ok_or_else(|| ReasonerError::UnmappedName(name.to_string()))
    }
}

/// `C^I` following the semantics table, with counting for number
/// restrictions and the individual map for nominals.
pub fn evaluate(c: &ConceptExpr, i: &FiniteInterpretation) -> Result<BTreeSet<Element>, ReasonerError> {
    use ConceptExpr::*;
    let filter = |pred: &mut dyn FnMut(Element) -> Result<bool, ReasonerError>| {
        let mut out = BTreeSet::new();
        for &x in &i.domain {
            if pred(x)? {
                out.insert(x);
            }
        }
        Ok::<_, ReasonerError>(out)
    };
    Ok(match c {
        Top => i.domain.clone(),
        Bottom => BTreeSet::new(),
        Atomic(a) => i
            .concept_ext
            .get(a)
            .cloned()
            .ok_or_else(|| ReasonerError::UnmappedName(a.clone()))?,
        Not(d) => i.domain.difference(&evaluate(d, i)?).copied().collect(),
        And(ds) => {
            let mut acc = i.domain.clone();
            for d in ds {
                let e = evaluate(d, i)?;
                acc.retain(|x| e.contains(x));
            }
            acc
        }
        Or(ds) => {
            let mut acc = BTreeSet::new();
            for d in ds {
                acc.extend(evaluate(d, i)?);
            }
            acc
        }
        Exists(r, d) => {
            let e = evaluate(d, i)?;
            filter(&mut |x| Ok(i.successors(r, x)?.iter().any(|y| e.contains(y))))?
        }
        ForAll(r, d) => {
            let e = evaluate(d, i)?;
            filter(&mut |x| Ok(i.successors(r, x)?.iter().all(|y| e.contains(y))))?
        }
        AtLeast(n, r) => filter(&mut |x| Ok(i.successors(r, x)?.len() >= *n as usize))?,
        AtMost(n, r) => filter(&mut |x| Ok(i.successors(r, x)?.len() <= *n as usize))?,
        HasValue(r, a) => {
            let target = i.individual(a)?;
            filter(&mut |x| Ok(i.successors(r, x)?.contains(&target)))?
        }
        OneOf(names) => {
            let mut out = BTreeSet::new();
            for n in names {
                out.insert(i.individual(n)?);
            }
            out
        }
        DataSome(p, range) => match i.data_ext.get(p) {
            Some(vals) => vals.iter().filter(|(_, v)| range.contains(*v)).map(|&(x, _)| x).collect(),
            None => BTreeSet::new(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FiniteInterpretation {
        let mut i = FiniteInterpretation::with_domain(3);
        i.concept_ext.insert("A".into(), [0, 1].into());
        i.concept_ext.insert("B".into(), [1].into());
        i.role_ext.insert("r".into(), [(0, 1), (0, 2), (1, 1)].into());
        i.individual_map.insert("a".into(), 1);
        i
    }

    #[test]
    fn top_and_complement() {
        let i = sample();
        assert_eq!(evaluate(&ConceptExpr::Top, &i).unwrap(), i.domain);
        let not_a = ConceptExpr::not(ConceptExpr::atomic("A"));
        assert_eq!(evaluate(&not_a, &i).unwrap(), [2].into());
    }

    #[test]
    fn restrictions_count_successors() {
        let i = sample();
        let some_b = ConceptExpr::some("r", ConceptExpr::atomic("B"));
        assert_eq!(evaluate(&some_b, &i).unwrap(), [0, 1].into());
        let only_b = ConceptExpr::only("r", ConceptExpr::atomic("B"));
        assert_eq!(evaluate(&only_b, &i).unwrap(), [1, 2].into());
        assert_eq!(evaluate(&ConceptExpr::AtLeast(2, "r".into()), &i).unwrap(), [0].into());
        let inv = ConceptExpr::some(RoleExpr::inverse_of("r"), ConceptExpr::Top);
        assert_eq!(evaluate(&inv, &i).unwrap(), [1, 2].into());
        assert_eq!(evaluate(&ConceptExpr::has_value("r", "a"), &i).unwrap(), [0, 1].into());
    }

    #[test]
    fn unmapped_names_are_errors() {
        let i = sample();
        assert_eq!(
            evaluate(&ConceptExpr::atomic("Z"), &i),
            Err(ReasonerError::UnmappedName("Z".into()))
        );
        assert!(evaluate(&ConceptExpr::one_of(["nobody"]), &i).is_err());
    }
}
