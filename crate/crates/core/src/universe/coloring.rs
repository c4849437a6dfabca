use std::collections::{BTreeMap, BTreeSet};

use super::sigma::{instances, sorted_unique};
use super::{Element, SigmaStructure, UniverseError};

pub type ColorId = usize;

/// A coloring of the colored subset. Elements outside the map are
/// uncolored. Ids are dense (`0..num_colors`); `labels[id]` is a display
/// name only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    map: BTreeMap<Element, ColorId>,
    labels: Vec<String>,
}

impl Coloring {
    pub fn empty() -> Self {
        Coloring {
            map: BTreeMap::new(),
            labels: Vec::new(),
        }
    }

    /// Takes ids as given; they must cover `0..k` with no gaps.
    pub fn new(map: BTreeMap<Element, ColorId>) -> Result<Self, UniverseError> {
        let used: BTreeSet<ColorId> = map.values().copied().collect();
        if let Some(&max) = used.iter().next_back() {
            if max + 1 != used.len() {
                return Err(UniverseError::NonDenseColors(format!(
                    "{} distinct ids, largest {max}",
                    used.len()
                )));
            }
        }
        let labels = (0..used.len()).map(|i| i.to_string()).collect();
        Ok(Coloring { map, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, UniverseError> {
        if labels.len() != self.labels.len() {
            return Err(UniverseError::NonDenseColors(format!(
                "{} labels for {} colors",
                labels.len(),
                self.labels.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Densifies arbitrary color keys: distinct keys are sorted and numbered
    /// in that order, and `label` renders each key for display.
    pub fn from_keys<K, I, L>(entries: I, label: L) -> Self
    where
        K: Ord + Clone,
        I: IntoIterator<Item = (Element, K)>,
        L: Fn(&K) -> String,
    {
        let entries: Vec<(Element, K)> = entries.into_iter().collect();
        let keys: BTreeSet<K> = entries.iter().map(|(_, k)| k.clone()).collect();
        let ids: BTreeMap<K, ColorId> = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        let labels = keys.iter().map(label).collect();
        let map = entries.into_iter().map(|(e, k)| (e, ids[&k])).collect();
        Coloring { map, labels }
    }

    /// Every element its own color, numbered in ascending element order.
    pub fn distinct(domain: &[Element]) -> Self {
        let elems = sorted_unique(domain);
        let labels = (0..elems.len()).map(|i| i.to_string()).collect();
        Coloring {
            map: elems.into_iter().enumerate().map(|(i, e)| (e, i)).collect(),
            labels,
        }
    }

    pub fn get(&self, e: &Element) -> Option<ColorId> {
        self.map.get(e).copied()
    }

    pub fn is_colored(&self, e: &Element) -> bool {
        self.map.contains_key(e)
    }

    /// The colored elements in ascending order.
    pub fn domain(&self) -> impl Iterator<Item = &Element> + '_ {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, ColorId)> + '_ {
        self.map.iter().map(|(e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn num_colors(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, c: ColorId) -> &str {
        &self.labels[c]
    }

    /// Elements of each color, indexed by color id.
    pub fn classes(&self) -> Vec<Vec<Element>> {
        let mut out = vec![Vec::new(); self.num_colors()];
        for (e, &c) in &self.map {
            out[c].push(e.clone());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RainbowReport {
    Pass,
    /// The first instance, in enumeration order, with a repeated color.
    Fail {
        instance: Vec<Element>,
        colors: Vec<ColorId>,
    },
}

impl RainbowReport {
    pub fn passed(&self) -> bool {
        matches!(self, RainbowReport::Pass)
    }
}

/// Checks that every instance of `sigma` inside the colored subset uses
/// pairwise distinct colors.
pub fn validate_rainbow(
    coloring: &Coloring,
    sigma: &SigmaStructure,
) -> Result<RainbowReport, UniverseError> {
    let elems: Vec<Element> = coloring.domain().cloned().collect();
    let colors: Vec<ColorId> = elems.iter().map(|e| coloring.map[e]).collect();
    for inst in instances(&elems, sigma)? {
        let cs: Vec<ColorId> = inst.iter().map(|&i| colors[i]).collect();
        let distinct: BTreeSet<ColorId> = cs.iter().copied().collect();
        if distinct.len() < cs.len() {
            return Ok(RainbowReport::Fail {
                instance: inst.into_iter().map(|i| elems[i].clone()).collect(),
                colors: cs,
            });
        }
    }
    Ok(RainbowReport::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_coloring(pairs: &[(i64, ColorId)]) -> Coloring {
        Coloring::new(pairs.iter().map(|&(x, c)| (Element::Int(x), c)).collect()).unwrap()
    }

    #[test]
    fn three_color_sum_coloring_is_not_strictly_rainbow() {
        // {2,8}, {3,7}, {4,6}: the progression 2, 4, 6 repeats the color of 4 and 6.
        let chi = int_coloring(&[(2, 0), (8, 0), (3, 1), (7, 1), (4, 2), (6, 2)]);
        assert_eq!(
            validate_rainbow(&chi, &SigmaStructure::ThreeAp).unwrap(),
            RainbowReport::Fail {
                instance: vec![Element::Int(2), Element::Int(4), Element::Int(6)],
                colors: vec![0, 2, 2],
            }
        );
        assert_eq!(chi.num_colors(), 3);
    }

    #[test]
    fn distinct_always_passes() {
        let dom: Vec<Element> = (1..=12).map(Element::Int).collect();
        let c = Coloring::distinct(&dom);
        assert!(validate_rainbow(&c, &SigmaStructure::ThreeAp)
            .unwrap()
            .passed());
        assert_eq!(c.num_colors(), 12);
    }

    #[test]
    fn monochromatic_progression_fails() {
        let c = int_coloring(&[(2, 0), (4, 0), (6, 0)]);
        assert_eq!(
            validate_rainbow(&c, &SigmaStructure::ThreeAp).unwrap(),
            RainbowReport::Fail {
                instance: vec![Element::Int(2), Element::Int(4), Element::Int(6)],
                colors: vec![0, 0, 0],
            }
        );
    }

    #[test]
    fn dense_ids_required() {
        let m: BTreeMap<Element, ColorId> = [(Element::Int(1), 0), (Element::Int(2), 2)].into();
        assert!(matches!(
            Coloring::new(m),
            Err(UniverseError::NonDenseColors(_))
        ));
        let c = Coloring::from_keys(
            [
                (Element::Int(1), 'b'),
                (Element::Int(2), 'a'),
                (Element::Int(3), 'b'),
            ],
            |k| k.to_string(),
        );
        assert_eq!(c.get(&Element::Int(2)), Some(0));
        assert_eq!(c.get(&Element::Int(3)), Some(1));
        assert_eq!(c.labels(), &["a".to_string(), "b".to_string()]);
        assert_eq!(Coloring::empty().num_colors(), 0);
    }
}
