use serde::{Deserialize, Serialize};

use super::{CachingScheme, Delivery, SchemeError, SchemeParams};
use crate::gf::{Matrix, MatrixDoc};
use crate::universe::{UniverseDoc, UniverseError};

/// Serialized scheme. `pair_coloring` lists `[user, packet, color]` by index;
/// loading rebuilds the scheme and rejects documents whose stored params
/// disagree with the rebuilt ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeDoc {
    pub universe: UniverseDoc,
    pub pair_coloring: Vec<[usize; 3]>,
    pub class_labels: Vec<String>,
    pub delivery: Delivery,
    pub matrix: MatrixDoc,
    pub params: SchemeParams,
}

impl SchemeDoc {
    pub fn new(scheme: &CachingScheme) -> Self {
        let (k, f) = (scheme.params().k, scheme.params().f);
        let pair_coloring = (0..k)
            .flat_map(|a| (0..f).filter_map(move |b| scheme.pair_color(a, b).map(|c| [a, b, c])))
            .collect();
        SchemeDoc {
            universe: UniverseDoc::new(scheme.universe(), scheme.coloring()),
            pair_coloring,
            class_labels: scheme.class_labels().to_vec(),
            delivery: scheme.delivery(),
            matrix: MatrixDoc::from(scheme.matrix()),
            params: scheme.params().clone(),
        }
    }

    pub fn to_scheme(&self) -> Result<CachingScheme, SchemeError> {
        let scheme = self.rebuild(self.delivery)?;
        let scheme = scheme.with_matrix(Matrix::try_from(self.matrix.clone())?)?;
        if scheme.params() != &self.params {
            return Err(SchemeError::Parse(format!(
                "stored params ({}) differ from rebuilt ({})",
                self.params.summary(),
                scheme.params().summary()
            )));
        }
        Ok(scheme)
    }

    /// Rebuilds placement and classes with a different delivery, ignoring
    /// the stored matrix and params.
    pub fn to_scheme_with(&self, delivery: Delivery) -> Result<CachingScheme, SchemeError> {
        if delivery == self.delivery {
            return self.to_scheme();
        }
        self.rebuild(delivery)
    }

    fn rebuild(&self, delivery: Delivery) -> Result<CachingScheme, SchemeError> {
        let (universe, coloring) = self.universe.decode()?;
        let (k, f) = (universe.k(), universe.f());
        let mut pair_colors = vec![None; k * f];
        for &[a, b, c] in &self.pair_coloring {
            if a >= k || b >= f {
                return Err(SchemeError::PairColoring(format!(
                    "pair ({a},{b}) outside {k} x {f}"
                )));
            }
            pair_colors[a * f + b] = Some(c);
        }
        CachingScheme::from_pair_coloring(
            universe,
            coloring,
            pair_colors,
            self.class_labels.clone(),
            delivery,
        )
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

impl std::str::FromStr for SchemeDoc {
    type Err = SchemeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        serde_json::from_str(text)
            .map_err(|e| SchemeError::Universe(UniverseError::Json(e.to_string())))
    }
}
