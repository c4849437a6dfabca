use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ColorId, Coloring, CombineOp, Element, ElementKind, Universe, UniverseError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyKinds {
    #[serde(rename = "A")]
    pub a: ElementKind,
    #[serde(rename = "B")]
    pub b: ElementKind,
}

/// Universe plus coloring as one JSON document.
///
/// `colored` maps the compact JSON text of each colored element to its
/// color id. `kinds` is written on export and lets pairs be told apart
/// from two-element sets on import; without it arrays decode as sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniverseDoc {
    #[serde(rename = "A")]
    pub a: Vec<Value>,
    #[serde(rename = "B")]
    pub b: Vec<Value>,
    pub op: CombineOp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<FamilyKinds>,
    pub colored: BTreeMap<String, ColorId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl UniverseDoc {
    pub fn new(universe: &Universe, coloring: &Coloring) -> Self {
        let (ka, kb) = universe.element_kinds();
        UniverseDoc {
            a: universe.users().iter().map(Element::to_json).collect(),
            b: universe.packets().iter().map(Element::to_json).collect(),
            op: universe.op(),
            kinds: Some(FamilyKinds { a: ka, b: kb }),
            colored: coloring.iter().map(|(e, c)| (e.to_key(), c)).collect(),
            labels: coloring.labels().to_vec(),
        }
    }

    /// Rebuilds both halves; every colored element must lie in `C`.
    pub fn decode(&self) -> Result<(Universe, Coloring), UniverseError> {
        let (ka, kb) = match &self.kinds {
            Some(k) => (Some(&k.a), Some(&k.b)),
            None => (None, None),
        };
        let a = self
            .a
            .iter()
            .map(|v| Element::from_json(v, ka))
            .collect::<Result<Vec<_>, _>>()?;
        let b = self
            .b
            .iter()
            .map(|v| Element::from_json(v, kb))
            .collect::<Result<Vec<_>, _>>()?;
        let universe = Universe::build(a, b, self.op)?;
        let kc = self.kinds.as_ref().map(|k| self.op.result_kind(&k.a, &k.b));
        let map = self
            .colored
            .iter()
            .map(|(key, &c)| Element::from_key(key, kc.as_ref()).map(|e| (e, c)))
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        let domain: Vec<Element> = map.keys().cloned().collect();
        universe.check_domain(&domain)?;
        let mut coloring = Coloring::new(map)?;
        if !self.labels.is_empty() {
            coloring = coloring.with_labels(self.labels.clone())?;
        }
        Ok((universe, coloring))
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

impl std::str::FromStr for UniverseDoc {
    type Err = UniverseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        serde_json::from_str(text).map_err(|e| UniverseError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use std::str::FromStr;

    use super::*;
    use crate::universe::{singletons, subsets};

    #[test]
    fn document_round_trip() {
        let b = vec![
            Element::set([1, 2]),
            Element::set([2, 3]),
            Element::set([3, 4]),
            Element::set([1, 4]),
        ];
        let u = Universe::build(singletons(4), b, CombineOp::SetUnion).unwrap();
        let c = Coloring::distinct(&subsets(4, 3));
        let doc = UniverseDoc::new(&u, &c);
        let text = doc.to_string_pretty();
        assert!(text.contains("\"[1,2,3]\": 0"));
        let (u2, c2) = UniverseDoc::from_str(&text).unwrap().decode().unwrap();
        assert_eq!(u2, u);
        assert_eq!(c2, c);
    }

    #[test]
    fn pairs_need_kinds() {
        let u = Universe::build(
            vec![Element::int(1), Element::int(2)],
            vec![Element::int(1)],
            CombineOp::CartesianPair,
        )
        .unwrap();
        let c = Coloring::distinct(&[Element::int_pair(1, 1)]);
        let doc = UniverseDoc::new(&u, &c);
        let (_, c2) = doc.decode().unwrap();
        assert_eq!(c2, c);

        let mut bare = doc.clone();
        bare.kinds = None;
        // Read as a set {1}, which is not a combined element.
        assert!(matches!(
            bare.decode(),
            Err(UniverseError::NotInUniverse(_))
        ));
    }

    #[test]
    fn minimal_document_without_kinds() {
        let text = r#"{"A":[1,2],"B":[1,2],"op":"integer_sum","colored":{"2":0,"4":0,"3":1}}"#;
        let (u, c) = UniverseDoc::from_str(text).unwrap().decode().unwrap();
        assert_eq!(u.combined().len(), 3);
        assert_eq!(c.num_colors(), 2);
        let bad = r#"{"A":[1],"B":[1],"op":"integer_sum","colored":{"9":0}}"#;
        assert!(UniverseDoc::from_str(bad).unwrap().decode().is_err());
        assert!(UniverseDoc::from_str("{").is_err());
    }
}
