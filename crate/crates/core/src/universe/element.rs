use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::UniverseError;

/// A member of a family or of the combined set.
///
/// Ordering is derived: integers sort before sets, sets before pairs, and
/// sets compare lexicographically over their sorted members.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Int(i64),
    Set(BTreeSet<Element>),
    Pair(Box<Element>, Box<Element>),
}

/// Shape of an element, used to decode JSON arrays unambiguously.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Int,
    Set(Box<ElementKind>),
    Pair(Box<ElementKind>, Box<ElementKind>),
}

impl Element {
    pub fn int(v: i64) -> Self {
        Element::Int(v)
    }

    /// A set of integer labels.
    pub fn set<I: IntoIterator<Item = i64>>(labels: I) -> Self {
        Element::Set(labels.into_iter().map(Element::Int).collect())
    }

    pub fn set_of<I: IntoIterator<Item = Element>>(members: I) -> Self {
        Element::Set(members.into_iter().collect())
    }

    pub fn pair(first: Element, second: Element) -> Self {
        Element::Pair(Box::new(first), Box::new(second))
    }

    /// An integer-labelled pair such as `(position, symbol)`.
    pub fn int_pair(first: i64, second: i64) -> Self {
        Element::pair(Element::Int(first), Element::Int(second))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Element::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Element>> {
        match self {
            Element::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Element, &Element)> {
        match self {
            Element::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Element::Int(_))
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Element::Set(_))
    }

    /// Kind of this element. An empty set reports `set<int>`.
    pub fn kind(&self) -> ElementKind {
        match self {
            Element::Int(_) => ElementKind::Int,
            Element::Set(s) => ElementKind::Set(Box::new(
                s.iter()
                    .next()
                    .map(Element::kind)
                    .unwrap_or(ElementKind::Int),
            )),
            Element::Pair(a, b) => ElementKind::Pair(Box::new(a.kind()), Box::new(b.kind())),
        }
    }

    /// Integers as numbers, sets as sorted arrays, pairs as 2-arrays.
    pub fn to_json(&self) -> Value {
        match self {
            Element::Int(v) => Value::from(*v),
            Element::Set(s) => Value::Array(s.iter().map(Element::to_json).collect()),
            Element::Pair(a, b) => Value::Array(vec![a.to_json(), b.to_json()]),
        }
    }

    /// Compact JSON text, used as the key of colored elements.
    pub fn to_key(&self) -> String {
        self.to_json().to_string()
    }

    /// Decodes a JSON value. Without a kind, arrays are read as sets.
    pub fn from_json(value: &Value, kind: Option<&ElementKind>) -> Result<Self, UniverseError> {
        let bad = || UniverseError::Json(format!("cannot decode element from {value}"));
        match (value, kind) {
            (Value::Number(n), None | Some(ElementKind::Int)) => {
                n.as_i64().map(Element::Int).ok_or_else(bad)
            }
            (Value::Array(items), None) => items
                .iter()
                .map(|v| Element::from_json(v, None))
                .collect::<Result<BTreeSet<_>, _>>()
                .map(Element::Set),
            (Value::Array(items), Some(ElementKind::Set(inner))) => items
                .iter()
                .map(|v| Element::from_json(v, Some(inner)))
                .collect::<Result<BTreeSet<_>, _>>()
                .map(Element::Set),
            (Value::Array(items), Some(ElementKind::Pair(ka, kb))) if items.len() == 2 => {
                Ok(Element::pair(
                    Element::from_json(&items[0], Some(ka))?,
                    Element::from_json(&items[1], Some(kb))?,
                ))
            }
            _ => Err(bad()),
        }
    }

    pub fn from_key(key: &str, kind: Option<&ElementKind>) -> Result<Self, UniverseError> {
        let value: Value = serde_json::from_str(key)
            .map_err(|e| UniverseError::Json(format!("element key {key:?}: {e}")))?;
        Element::from_json(&value, kind)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Int(v) => write!(f, "{v}"),
            Element::Set(s) => {
                f.write_str("{")?;
                for (i, e) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str("}")
            }
            Element::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// `[1..=n]` as integer elements.
pub fn int_range(lo: i64, hi: i64) -> Vec<Element> {
    (lo..=hi).map(Element::Int).collect()
}

/// `[1..=n]` as singleton sets, the form users take under set union.
pub fn singletons(n: i64) -> Vec<Element> {
    (1..=n).map(|i| Element::set([i])).collect()
}

/// All `size`-subsets of `[1..=n]` in lexicographic order.
pub fn subsets(n: i64, size: usize) -> Vec<Element> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(start: i64, n: i64, size: usize, current: &mut Vec<i64>, out: &mut Vec<Element>) {
        if current.len() == size {
            out.push(Element::set(current.iter().copied()));
            return;
        }
        let needed = (size - current.len()) as i64;
        let mut x = start;
        while x + needed - 1 <= n {
            current.push(x);
            rec(x + 1, n, size, current, out);
            current.pop();
            x += 1;
        }
    }
    rec(1, n, size, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_encoding_follows_kinds() {
        let pair = Element::int_pair(1, 0);
        assert_eq!(pair.to_key(), "[1,0]");
        let kind = pair.kind();
        assert_eq!(Element::from_key("[1,0]", Some(&kind)).unwrap(), pair);
        // Without a kind the same text is a set.
        assert_eq!(
            Element::from_key("[1,0]", None).unwrap(),
            Element::set([0, 1])
        );

        let s = Element::set([3, 1, 2]);
        assert_eq!(s.to_key(), "[1,2,3]");
        assert_eq!(s.to_string(), "{1,2,3}");
        let nested = Element::set_of([Element::int_pair(2, 0), Element::int_pair(1, 1)]);
        assert_eq!(
            Element::from_key(&nested.to_key(), Some(&nested.kind())).unwrap(),
            nested
        );
        assert!(Element::from_key("\"x\"", None).is_err());
    }

    #[test]
    fn subset_enumeration() {
        let s = subsets(4, 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], Element::set([1, 2]));
        assert_eq!(s[5], Element::set([3, 4]));
        assert_eq!(subsets(5, 0), vec![Element::set([])]);
        assert!(subsets(2, 3).is_empty());
    }
}
