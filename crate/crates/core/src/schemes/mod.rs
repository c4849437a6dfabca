//! Coded caching schemes built from colorings.
//!
//! A pair `(a, b)` whose combination is uncolored means user `a` caches
//! packet `b` of every file. Colored pairs are grouped by color; each color
//! class is XORed into one coded packet `W_c`, and the server broadcasts
//! `P · (W_c1, ..., W_c|Φ|)` for an `m x |Φ|` MDS matrix `P`.

mod bounds;
mod catalog;
mod delivery;
mod doc;
mod pda;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{mds_matrix, verify_mds, Field, GfError, Matrix};
use crate::rational::{self, Rational};
use crate::universe::{
    validate_rainbow, ColorId, Coloring, Element, RainbowReport, SigmaStructure, Universe,
    UniverseError,
};

pub use bounds::{cutset_bound, man_rate};
pub use catalog::{
    cyclic_universe, scheme_cyclic, scheme_linear_block, scheme_man, scheme_union_subsets,
};
pub use delivery::{DemandVector, UserCache};
pub use doc::SchemeDoc;
pub use pda::Pda;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("coloring is not rainbow: {instance} repeats a color")]
    RainbowViolation { instance: String },
    #[error("users cache different amounts (uncached counts {counts:?})")]
    NonuniformCache { counts: Vec<usize> },
    #[error("pair coloring: {0}")]
    PairColoring(String),
    #[error("color {color}: pairs {first} and {second} cannot share a class")]
    ClassConflict {
        color: String,
        first: String,
        second: String,
    },
    #[error("PDA axiom {axiom} violated at {cells}")]
    PdaInvalid { axiom: &'static str, cells: String },
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("generator fails the rank property on columns {0:?}")]
    RankPropertyFail(Vec<usize>),
    #[error("only n = k + 1 is supported (n = {n}, k = {k})")]
    UnsupportedN { n: usize, k: usize },
    #[error("GF({0}) is not supported; q must be prime")]
    UnsupportedField(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("user {user} cannot decode: {reason}")]
    Undecodable { user: usize, reason: String },
    #[error("parse: {0}")]
    Parse(String),
}

/// How the color-class packets are combined for broadcast.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delivery {
    /// One transmission per color class (`P = I`, `m = |Φ|`).
    PerColor,
    /// `m`-aware delivery. Over GF(2), `m = max(max m(a,b), |Φ| - 1)`;
    /// over GF(256) the `|Φ| - 1` floor is dropped.
    Mds(Field),
}

impl Default for Delivery {
    fn default() -> Self {
        Delivery::Mds(Field::Gf2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "F")]
    pub f: usize,
    /// Uncached packets per user.
    #[serde(rename = "Z")]
    pub z: usize,
    /// `M/N = 1 - Z/F`.
    #[serde(with = "rational::as_string")]
    pub cache_fraction: Rational,
    /// `|Φ|`.
    pub colors: usize,
    /// Largest `m(a, b)`.
    pub max_m: usize,
    /// Number of broadcast packets.
    pub m: usize,
    /// `R = m / F`.
    #[serde(with = "rational::as_string")]
    pub rate: Rational,
    /// `|Φ| / F`, the rate of per-color delivery.
    #[serde(with = "rational::as_string")]
    pub color_rate: Rational,
}

impl SchemeParams {
    /// Machine-readable line with 4-digit decimals.
    pub fn summary(&self) -> String {
        format!(
            "K={} F={} M/N={} colors={} m={} R={}",
            self.k,
            self.f,
            rational::decimal(self.cache_fraction),
            self.colors,
            self.m,
            rational::decimal(self.rate),
        )
    }

    /// The rational quantities with their exact values.
    pub fn exact(&self) -> String {
        let both = |r: Rational| format!("{} ({})", rational::decimal(r), rational::exact(r));
        format!(
            "M/N={} R={} color_rate={} max_m={} Z={}",
            both(self.cache_fraction),
            both(self.rate),
            both(self.color_rate),
            self.max_m,
            self.z
        )
    }
}

/// A complete scheme: placement, pair coloring `Φ`, classes, `m` and `P`.
#[derive(Clone, Debug)]
pub struct CachingScheme {
    universe: Universe,
    coloring: Coloring,
    pair_colors: Vec<Option<ColorId>>,
    class_labels: Vec<String>,
    classes: Vec<Vec<(usize, usize)>>,
    placement: Vec<Vec<usize>>,
    m_table: Vec<Option<usize>>,
    delivery: Delivery,
    matrix: Matrix,
    params: SchemeParams,
}

impl CachingScheme {
    /// Builds the scheme with `Φ(a, b) = φ(a ⊎ b)` after checking that `φ`
    /// renders every instance of `sigma` rainbow.
    pub fn build(
        universe: Universe,
        coloring: Coloring,
        sigma: &SigmaStructure,
        delivery: Delivery,
    ) -> Result<Self, SchemeError> {
        if let RainbowReport::Fail { instance, .. } = validate_rainbow(&coloring, sigma)? {
            let shown: Vec<String> = instance.iter().map(Element::to_string).collect();
            return Err(SchemeError::RainbowViolation {
                instance: format!("({})", shown.join(", ")),
            });
        }
        let (k, f) = (universe.k(), universe.f());
        let mut pair_colors = Vec::with_capacity(k * f);
        for a in 0..k {
            for b in 0..f {
                pair_colors.push(coloring.get(universe.pair_element(a, b)));
            }
        }
        let labels = coloring.labels().to_vec();
        Self::from_pair_coloring(universe, coloring, pair_colors, labels, delivery)
    }

    /// Builds from an explicit pair coloring. `coloring` fixes the colored
    /// subset; `pair_colors[a * F + b]` must be set exactly on pairs that
    /// combine into it.
    pub fn from_pair_coloring(
        universe: Universe,
        coloring: Coloring,
        pair_colors: Vec<Option<ColorId>>,
        class_labels: Vec<String>,
        delivery: Delivery,
    ) -> Result<Self, SchemeError> {
        let domain: Vec<Element> = coloring.domain().cloned().collect();
        universe.check_domain(&domain)?;
        let (k, f) = (universe.k(), universe.f());
        if pair_colors.len() != k * f {
            return Err(SchemeError::PairColoring(format!(
                "{} entries for {k} x {f} pairs",
                pair_colors.len()
            )));
        }
        let colored = |a: usize, b: usize| coloring.is_colored(universe.pair_element(a, b));

        let num_classes = class_labels.len();
        let mut classes = vec![Vec::new(); num_classes];
        let mut placement = vec![Vec::new(); k];
        for a in 0..k {
            for b in 0..f {
                match (colored(a, b), pair_colors[a * f + b]) {
                    (false, None) => placement[a].push(b),
                    (true, Some(c)) if c < num_classes => classes[c].push((a, b)),
                    (true, Some(c)) => {
                        return Err(SchemeError::PairColoring(format!("color {c} has no label")));
                    }
                    (true, None) => {
                        return Err(SchemeError::PairColoring(format!(
                            "pair ({a},{b}) is in the colored set but has no color"
                        )));
                    }
                    (false, Some(_)) => {
                        return Err(SchemeError::PairColoring(format!(
                            "pair ({a},{b}) is uncolored but has a color"
                        )));
                    }
                }
            }
        }
        if let Some(c) = classes.iter().position(Vec::is_empty) {
            return Err(SchemeError::PairColoring(format!(
                "color {c} labels no pair"
            )));
        }

        let uncached: Vec<usize> = placement.iter().map(|p| f - p.len()).collect();
        if uncached.iter().any(|&z| z != uncached[0]) {
            return Err(SchemeError::NonuniformCache { counts: uncached });
        }
        let z = uncached[0];

        // Same-class pairs must be decodable by cancellation: a_i ⊎ b_j is
        // uncolored for i != j (which also forces distinct users and packets).
        for (c, class) in classes.iter().enumerate() {
            for &(a1, b1) in class {
                for &(a2, b2) in class {
                    if (a1, b1) != (a2, b2) && colored(a1, b2) {
                        let show = |a: usize, b: usize| {
                            format!("({},{})", universe.users()[a], universe.packets()[b])
                        };
                        return Err(SchemeError::ClassConflict {
                            color: class_labels[c].clone(),
                            first: show(a1, b1),
                            second: show(a2, b2),
                        });
                    }
                }
            }
        }

        let mut scheme = CachingScheme {
            universe,
            coloring,
            pair_colors,
            class_labels,
            classes,
            placement,
            m_table: Vec::new(),
            delivery,
            matrix: Matrix::zeros(Field::Gf2, 0, 0),
            params: SchemeParams {
                k,
                f,
                z,
                cache_fraction: Rational::new((f - z) as i64, f as i64),
                colors: num_classes,
                max_m: 0,
                m: 0,
                rate: Rational::from_integer(0),
                color_rate: Rational::new(num_classes as i64, f as i64),
            },
        };
        let (m_table, max_m) = scheme.compute_m_table();
        let m = match delivery {
            Delivery::PerColor => num_classes,
            Delivery::Mds(Field::Gf2) => max_m.max(num_classes.saturating_sub(1)),
            Delivery::Mds(Field::Gf256) => max_m,
        };
        scheme.matrix = match delivery {
            Delivery::PerColor => Matrix::identity(Field::Gf2, num_classes),
            Delivery::Mds(field) => mds_matrix(m, num_classes, field)?,
        };
        scheme.m_table = m_table;
        scheme.params.max_m = max_m;
        scheme.params.m = m;
        scheme.params.rate = Rational::new(m as i64, f as i64);
        Ok(scheme)
    }

    /// `m(a, b) = #{Φ(a', b') : a' = a or b' ⊎ a ∈ Ĉ}` for every colored pair,
    /// and the largest value.
    pub fn compute_m_table(&self) -> (Vec<Option<usize>>, usize) {
        let (k, f) = (self.params.k, self.params.f);
        let mut table = vec![None; k * f];
        let mut max_m = 0;
        for a in 0..k {
            let seen: BTreeSet<ColorId> = (0..k)
                .flat_map(|a2| (0..f).map(move |b2| (a2, b2)))
                .filter(|&(a2, b2)| a2 == a || self.is_uncached(a, b2))
                .filter_map(|(a2, b2)| self.pair_color(a2, b2))
                .collect();
            for b in 0..f {
                if self.pair_color(a, b).is_some() {
                    table[a * f + b] = Some(seen.len());
                    max_m = max_m.max(seen.len());
                }
            }
        }
        (table, max_m)
    }

    /// Replaces `P` with another MDS matrix of the same shape.
    pub fn with_matrix(mut self, p: Matrix) -> Result<Self, SchemeError> {
        if p.rows() != self.params.m || p.cols() != self.num_classes() {
            return Err(SchemeError::Dimension(format!(
                "matrix is {}x{}, scheme needs {}x{}",
                p.rows(),
                p.cols(),
                self.params.m,
                self.num_classes()
            )));
        }
        // A matrix spanning the same row space as the current MDS matrix is
        // MDS too; otherwise enumerate minors.
        let equivalent = p.field() == self.matrix.field() && p.same_row_space(&self.matrix);
        if p.rows() > 0 && !equivalent && !verify_mds(&p)? {
            return Err(SchemeError::Dimension(
                "replacement matrix is not MDS".into(),
            ));
        }
        self.matrix = p;
        Ok(self)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// The element coloring `φ`, whose domain is the colored subset.
    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn delivery(&self) -> Delivery {
        self.delivery
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// `Φ(a, b)`, or `None` when user `a` caches packet `b`.
    pub fn pair_color(&self, a: usize, b: usize) -> Option<ColorId> {
        self.pair_colors[a * self.params.f + b]
    }

    pub fn is_uncached(&self, a: usize, b: usize) -> bool {
        self.pair_color(a, b).is_some()
    }

    /// `(user, packet)` pairs of each color class.
    pub fn classes(&self) -> &[Vec<(usize, usize)>] {
        &self.classes
    }

    pub fn class_label(&self, c: ColorId) -> &str {
        &self.class_labels[c]
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    /// Packet indices cached by `user`.
    pub fn placement(&self, user: usize) -> &[usize] {
        &self.placement[user]
    }

    pub fn m_value(&self, a: usize, b: usize) -> Option<usize> {
        self.m_table[a * self.params.f + b]
    }

    /// Classes user `a` cannot rebuild from its cache.
    pub fn unknown_classes(&self, user: usize) -> Vec<ColorId> {
        let cached: BTreeSet<usize> = self.placement[user].iter().copied().collect();
        (0..self.num_classes())
            .filter(|&c| self.classes[c].iter().any(|(_, b)| !cached.contains(b)))
            .collect()
    }

    /// Checks `a_i ⊎ b_j ∈ Ĉ ⇔ i = j` inside every class.
    pub fn claim_holds(&self) -> bool {
        self.classes.iter().all(|class| {
            class.iter().all(|&(a1, b1)| {
                class
                    .iter()
                    .all(|&(a2, b2)| ((a1, b1) == (a2, b2)) == self.is_uncached(a1, b2))
            })
        })
    }

    /// Element-level view of the classes: the set of combined elements of
    /// each class.
    pub fn class_elements(&self) -> Vec<BTreeSet<Element>> {
        self.classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|&(a, b)| self.universe.pair_element(a, b).clone())
                    .collect()
            })
            .collect()
    }
}
