//! Families, the combining operation and rainbow colorings.
//!
//! A [`Universe`] holds the user family `A`, the packet family `B` and the
//! combined set `C = {a ⊎ b}`. Distinct pairs may combine to the same
//! element; `C` stores it once while [`Universe::pair_element`] still
//! resolves every `(a, b)`.

mod coloring;
mod element;
mod json;
mod search;
mod sigma;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coloring::{validate_rainbow, ColorId, Coloring, RainbowReport};
pub use element::{int_range, singletons, subsets, Element, ElementKind};
pub use json::{FamilyKinds, UniverseDoc};
pub use search::{exact_min_colors, greedy_color, ElementOrder, EXACT_DOMAIN_LIMIT};
pub use sigma::{enumerate_sigma, CustomSigma, SigmaStructure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("family {0} is empty")]
    EmptyFamily(&'static str),
    #[error("{op} cannot combine {left} with {right}")]
    KindMismatch {
        op: CombineOp,
        left: String,
        right: String,
    },
    #[error("{sigma} does not apply to element {element}")]
    SigmaKind { sigma: String, element: String },
    #[error("custom structure arity {0} exceeds the limit of 4")]
    ArityTooLarge(usize),
    #[error("element {0} is not in the combined set")]
    NotInUniverse(String),
    #[error("domain of {size} elements exceeds the exhaustive-search limit {limit}")]
    DomainTooLarge { size: usize, limit: usize },
    #[error("no rainbow coloring with at most {cap} colors")]
    InfeasibleUnderCap { cap: usize },
    #[error("color ids must be dense 0..k-1: {0}")]
    NonDenseColors(String),
    #[error("json: {0}")]
    Json(String),
}

/// The operation `⊎` combining a user with a packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineOp {
    SetUnion,
    IntegerSum,
    CartesianPair,
}

impl fmt::Display for CombineOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombineOp::SetUnion => "set_union",
            CombineOp::IntegerSum => "integer_sum",
            CombineOp::CartesianPair => "cartesian_pair",
        })
    }
}

impl CombineOp {
    pub fn apply(self, a: &Element, b: &Element) -> Result<Element, UniverseError> {
        let mismatch = || UniverseError::KindMismatch {
            op: self,
            left: a.to_string(),
            right: b.to_string(),
        };
        match self {
            CombineOp::SetUnion => match (a, b) {
                (Element::Set(x), Element::Set(y)) => {
                    Ok(Element::Set(x.union(y).cloned().collect()))
                }
                _ => Err(mismatch()),
            },
            CombineOp::IntegerSum => match (a, b) {
                (Element::Int(x), Element::Int(y)) => {
                    x.checked_add(*y).map(Element::Int).ok_or_else(mismatch)
                }
                _ => Err(mismatch()),
            },
            CombineOp::CartesianPair => Ok(Element::pair(a.clone(), b.clone())),
        }
    }

    /// Kind of the combined elements given the operand kinds.
    pub fn result_kind(self, a: &ElementKind, b: &ElementKind) -> ElementKind {
        match self {
            CombineOp::SetUnion => a.clone(),
            CombineOp::IntegerSum => ElementKind::Int,
            CombineOp::CartesianPair => ElementKind::Pair(Box::new(a.clone()), Box::new(b.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    a: Vec<Element>,
    b: Vec<Element>,
    op: CombineOp,
    combined: Vec<Element>,
    index: HashMap<Element, usize>,
    /// `pair_index[a * F + b]` is the index into `combined` of `a ⊎ b`.
    pair_index: Vec<usize>,
}

impl Universe {
    pub fn build(a: Vec<Element>, b: Vec<Element>, op: CombineOp) -> Result<Self, UniverseError> {
        if a.is_empty() {
            return Err(UniverseError::EmptyFamily("A"));
        }
        if b.is_empty() {
            return Err(UniverseError::EmptyFamily("B"));
        }
        let mut raw = Vec::with_capacity(a.len() * b.len());
        for x in &a {
            for y in &b {
                raw.push(op.apply(x, y)?);
            }
        }
        let mut combined = raw.clone();
        combined.sort();
        combined.dedup();
        let index: HashMap<Element, usize> = combined
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let pair_index = raw.iter().map(|e| index[e]).collect();
        Ok(Universe {
            a,
            b,
            op,
            combined,
            index,
            pair_index,
        })
    }

    /// Number of users, `K = |A|`.
    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// Number of packets per file, `F = |B|`.
    pub fn f(&self) -> usize {
        self.b.len()
    }

    pub fn users(&self) -> &[Element] {
        &self.a
    }

    pub fn packets(&self) -> &[Element] {
        &self.b
    }

    pub fn op(&self) -> CombineOp {
        self.op
    }

    /// The combined set `C`, sorted, without duplicates.
    pub fn combined(&self) -> &[Element] {
        &self.combined
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index.contains_key(e)
    }

    /// Index into [`Universe::combined`] of `users[a] ⊎ packets[b]`.
    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        self.pair_index[a * self.b.len() + b]
    }

    pub fn pair_element(&self, a: usize, b: usize) -> &Element {
        &self.combined[self.pair_index(a, b)]
    }

    /// All `(a, b)` index pairs whose combination is `e`.
    pub fn pairs_of(&self, e: &Element) -> Vec<(usize, usize)> {
        let Some(target) = self.index_of(e) else {
            return Vec::new();
        };
        let f = self.b.len();
        self.pair_index
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == target)
            .map(|(i, _)| (i / f, i % f))
            .collect()
    }

    pub fn check_domain(&self, domain: &[Element]) -> Result<(), UniverseError> {
        match domain.iter().find(|e| !self.contains(e)) {
            Some(e) => Err(UniverseError::NotInUniverse(e.to_string())),
            None => Ok(()),
        }
    }

    /// [`greedy_color`] restricted to elements of this universe.
    pub fn greedy_color(
        &self,
        domain: &[Element],
        sigma: &SigmaStructure,
        order: ElementOrder,
    ) -> Result<Coloring, UniverseError> {
        self.check_domain(domain)?;
        greedy_color(&order.arrange(domain), sigma)
    }

    /// [`exact_min_colors`] restricted to elements of this universe.
    pub fn exact_min_colors(
        &self,
        domain: &[Element],
        sigma: &SigmaStructure,
        cap: usize,
    ) -> Result<(Coloring, usize), UniverseError> {
        self.check_domain(domain)?;
        exact_min_colors(domain, sigma, cap)
    }

    pub fn element_kinds(&self) -> (ElementKind, ElementKind) {
        (self.a[0].kind(), self.b[0].kind())
    }
}
