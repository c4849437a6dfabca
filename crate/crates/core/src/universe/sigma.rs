use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::{Element, UniverseError};

type Predicate = dyn Fn(&[&Element]) -> bool + Send + Sync;

/// A caller-supplied pattern: every `arity`-subset on which `predicate`
/// holds must be rainbow.
#[derive(Clone)]
pub struct CustomSigma {
    pub name: String,
    pub arity: usize,
    pub predicate: Arc<Predicate>,
}

impl CustomSigma {
    pub fn new<F>(
        name: impl Into<String>,
        arity: usize,
        predicate: F,
    ) -> Result<Self, UniverseError>
    where
        F: Fn(&[&Element]) -> bool + Send + Sync + 'static,
    {
        if arity > 4 {
            return Err(UniverseError::ArityTooLarge(arity));
        }
        Ok(CustomSigma {
            name: name.into(),
            arity,
            predicate: Arc::new(predicate),
        })
    }
}

impl fmt::Debug for CustomSigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSigma")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

/// The pattern a coloring has to render rainbow.
#[derive(Clone, Debug)]
pub enum SigmaStructure {
    /// Triples `(x, x+d, x+2d)` of integers, `d >= 1`.
    ThreeAp,
    /// Over sets: pairs meeting in at least `a` labels, and triples where
    /// one set lies inside the union of the other two.
    SubsetRainbow(usize),
    /// Over `(user, packet)` cells: pairs sharing a coordinate, and triples
    /// spanning at most two users and at most two packets.
    PdaStrongEdge,
    Custom(CustomSigma),
}

impl fmt::Display for SigmaStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaStructure::ThreeAp => f.write_str("three_ap"),
            SigmaStructure::SubsetRainbow(a) => write!(f, "subset_rainbow({a})"),
            SigmaStructure::PdaStrongEdge => f.write_str("pda_strong_edge"),
            SigmaStructure::Custom(c) => write!(f, "custom({})", c.name),
        }
    }
}

impl SigmaStructure {
    fn check_kinds(&self, elems: &[Element]) -> Result<(), UniverseError> {
        let ok: fn(&Element) -> bool = match self {
            SigmaStructure::ThreeAp => Element::is_int,
            SigmaStructure::SubsetRainbow(_) => Element::is_set,
            SigmaStructure::PdaStrongEdge => |e| e.as_pair().is_some(),
            SigmaStructure::Custom(_) => |_| true,
        };
        match elems.iter().find(|e| !ok(e)) {
            Some(e) => Err(UniverseError::SigmaKind {
                sigma: self.to_string(),
                element: e.to_string(),
            }),
            None => Ok(()),
        }
    }
}

/// The pair condition of [`SigmaStructure::SubsetRainbow`].
pub(crate) fn subsets_meet(x: &BTreeSet<Element>, y: &BTreeSet<Element>, a: usize) -> bool {
    x.intersection(y).take(a).count() >= a
}

fn covered(x: &BTreeSet<Element>, y: &BTreeSet<Element>, z: &BTreeSet<Element>) -> bool {
    x.iter().all(|e| y.contains(e) || z.contains(e))
}

/// Instances over `elems` (sorted, distinct), as index tuples.
pub(crate) fn instances(
    elems: &[Element],
    sigma: &SigmaStructure,
) -> Result<Vec<Vec<usize>>, UniverseError> {
    sigma.check_kinds(elems)?;
    let n = elems.len();
    let mut out = Vec::new();
    match sigma {
        SigmaStructure::ThreeAp => {
            let pos: HashMap<i64, usize> = elems
                .iter()
                .enumerate()
                .map(|(i, e)| (e.as_int().unwrap(), i))
                .collect();
            for i in 0..n {
                let x = elems[i].as_int().unwrap();
                for (j, y) in elems.iter().enumerate().skip(i + 1) {
                    let y = y.as_int().unwrap();
                    if let Some(&k) = y
                        .checked_mul(2)
                        .and_then(|t| t.checked_sub(x))
                        .and_then(|z| pos.get(&z))
                    {
                        out.push(vec![i, j, k]);
                    }
                }
            }
        }
        SigmaStructure::SubsetRainbow(a) => {
            let sets: Vec<&BTreeSet<Element>> = elems.iter().map(|e| e.as_set().unwrap()).collect();
            for i in 0..n {
                for j in i + 1..n {
                    if subsets_meet(sets[i], sets[j], *a) {
                        out.push(vec![i, j]);
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let (x, y, z) = (sets[i], sets[j], sets[k]);
                        if covered(x, y, z) || covered(y, x, z) || covered(z, x, y) {
                            out.push(vec![i, j, k]);
                        }
                    }
                }
            }
        }
        SigmaStructure::PdaStrongEdge => {
            let cells: Vec<(&Element, &Element)> =
                elems.iter().map(|e| e.as_pair().unwrap()).collect();
            for i in 0..n {
                for j in i + 1..n {
                    if cells[i].0 == cells[j].0 || cells[i].1 == cells[j].1 {
                        out.push(vec![i, j]);
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let users: BTreeSet<&Element> = [cells[i].0, cells[j].0, cells[k].0].into();
                        let packets: BTreeSet<&Element> =
                            [cells[i].1, cells[j].1, cells[k].1].into();
                        if users.len() <= 2 && packets.len() <= 2 {
                            out.push(vec![i, j, k]);
                        }
                    }
                }
            }
        }
        SigmaStructure::Custom(c) => {
            let mut current = Vec::with_capacity(c.arity);
            combinations(n, c.arity, 0, &mut current, &mut |idx| {
                let members: Vec<&Element> = idx.iter().map(|&i| &elems[i]).collect();
                if (c.predicate)(&members) {
                    out.push(idx.to_vec());
                }
            });
        }
    }
    Ok(out)
}

fn combinations(
    n: usize,
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if current.len() == k {
        visit(current);
        return;
    }
    for i in start..n {
        if n - i < k - current.len() {
            break;
        }
        current.push(i);
        combinations(n, k, i + 1, current, visit);
        current.pop();
    }
}

pub(crate) fn sorted_unique(elems: &[Element]) -> Vec<Element> {
    let mut v = elems.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Every instance of `sigma` whose members all lie in `restricted_to`.
///
/// Three-term progressions come out as `(x, x+d, x+2d)` ordered by `(x, d)`;
/// other structures list members in ascending element order, pairs before
/// triples.
pub fn enumerate_sigma(
    restricted_to: &[Element],
    sigma: &SigmaStructure,
) -> Result<Vec<Vec<Element>>, UniverseError> {
    let elems = sorted_unique(restricted_to);
    Ok(instances(&elems, sigma)?
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| elems[i].clone()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::{int_range, subsets};

    fn ints(v: &[i64]) -> Vec<Element> {
        v.iter().copied().map(Element::Int).collect()
    }

    /// Independent count: every `(x, d)` with all three terms in `[1, n]`.
    fn brute_three_ap_count(n: i64) -> usize {
        let mut count = 0;
        for x in 1..=n {
            for d in 1..=n {
                if x + 2 * d <= n {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn three_ap_examples() {
        assert_eq!(
            enumerate_sigma(&ints(&[2, 4, 6, 8]), &SigmaStructure::ThreeAp).unwrap(),
            vec![ints(&[2, 4, 6]), ints(&[4, 6, 8])]
        );
        assert!(enumerate_sigma(&ints(&[1]), &SigmaStructure::ThreeAp)
            .unwrap()
            .is_empty());
        for n in 1..=50 {
            let got = enumerate_sigma(&int_range(1, n), &SigmaStructure::ThreeAp)
                .unwrap()
                .len();
            assert_eq!(got, brute_three_ap_count(n), "n = {n}");
            assert_eq!(got as i64, (n - 1) * (n - 1) / 4, "closed form at n = {n}");
        }
    }

    #[test]
    fn subset_rainbow_on_three_sets_of_four() {
        let dom = subsets(4, 3);
        let inst = enumerate_sigma(&dom, &SigmaStructure::SubsetRainbow(1)).unwrap();
        let triples = inst.iter().filter(|t| t.len() == 3).count();
        let pairs = inst.iter().filter(|t| t.len() == 2).count();
        assert_eq!(triples, 4);
        assert_eq!(pairs, 6);
    }

    #[test]
    fn kind_checks() {
        assert!(matches!(
            enumerate_sigma(&subsets(3, 2), &SigmaStructure::ThreeAp),
            Err(UniverseError::SigmaKind { .. })
        ));
        assert!(matches!(
            enumerate_sigma(&ints(&[1, 2]), &SigmaStructure::SubsetRainbow(1)),
            Err(UniverseError::SigmaKind { .. })
        ));
        assert!(CustomSigma::new("big", 5, |_| true).is_err());
    }

    #[test]
    fn strong_edge_instances() {
        // Cells (user, packet): (1,1), (2,2) do not meet; (1,2) joins them.
        let cells = vec![
            Element::int_pair(1, 1),
            Element::int_pair(2, 2),
            Element::int_pair(1, 2),
        ];
        let inst = enumerate_sigma(&cells, &SigmaStructure::PdaStrongEdge).unwrap();
        let pairs = inst.iter().filter(|t| t.len() == 2).count();
        assert_eq!(pairs, 2);
        assert_eq!(inst.iter().filter(|t| t.len() == 3).count(), 1);
    }

    #[test]
    fn custom_arity_four() {
        // Quadruples of integers summing to an even number.
        let sigma = CustomSigma::new("even", 4, |m| {
            m.iter().map(|e| e.as_int().unwrap()).sum::<i64>() % 2 == 0
        })
        .unwrap();
        let inst = enumerate_sigma(&int_range(1, 6), &SigmaStructure::Custom(sigma)).unwrap();
        let mut expected = 0;
        for a in 1..=6 {
            for b in a + 1..=6 {
                for c in b + 1..=6 {
                    for d in c + 1..=6 {
                        if (a + b + c + d) % 2 == 0 {
                            expected += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(inst.len(), expected);
    }
}
