//! Schemes from colorings of integer sets in which 3-term progressions are
//! rainbow.
//!
//! Users and packets are both `[m]`; user `x` misses packet `y` exactly when
//! `x + y` lies in the colored set `A ⊆ [2, 2m]`, and the pair gets color
//! `(x - y, χ(x + y))`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Execution};
use crate::rational::Rational;
use crate::schemes::{CachingScheme, Delivery, SchemeError};
use crate::universe::{
    exact_min_colors, greedy_color, int_range, ColorId, Coloring, CombineOp, Element,
    SigmaStructure, Universe, UniverseError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RainbowApError {
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("progression {0:?} has equally colored endpoints")]
    NotRainbow([i64; 3]),
    #[error("no coloring with at most {budget} colors exists for this set")]
    BudgetInfeasible { budget: usize },
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Clone, Debug)]
pub enum Strategy {
    /// Greedy coloring of `[2, 2m]`. With a budget, deletes whole
    /// cache-preserving units (see [`deletion_units`]) until greedy fits.
    Greedy { budget: Option<usize> },
    /// Minimum coloring of `[2, 2m]` minus `deletions` by backtracking.
    Exact {
        budget: Option<usize>,
        deletions: Vec<i64>,
    },
    /// A given coloring of integers in `[2, 2m]`.
    Explicit(Coloring),
}

/// Colored set `A ⊆ [2, 2m]` and its coloring `χ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowApSet {
    half: usize,
    members: Vec<i64>,
    chi: Coloring,
    strictly_rainbow: bool,
}

/// Three-term progressions inside a sorted set, as `(x, x + d, x + 2d)`.
pub fn progressions(members: &[i64]) -> Vec<[i64; 3]> {
    let set: BTreeSet<i64> = members.iter().copied().collect();
    let mut out = Vec::new();
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            if set.contains(&(2 * y - x)) {
                out.push([x, y, 2 * y - x]);
            }
        }
    }
    out
}

/// The deletions from `[2, 2m]` that keep every user's cache the same size:
/// `{m + 1}` alone and `{s, s + m}` for `s ∈ [2, m]`.
pub fn deletion_units(half: usize) -> Vec<Vec<i64>> {
    let m = half as i64;
    std::iter::once(vec![m + 1])
        .chain((2..=m).map(|s| vec![s, s + m]))
        .collect()
}

fn int_elements(xs: &[i64]) -> Vec<Element> {
    xs.iter().copied().map(Element::Int).collect()
}

impl RainbowApSet {
    /// Checks that `chi` colors integers in `[2, 2m]` and that no progression
    /// in its domain has equally colored endpoints, which is what decoding
    /// needs. Whether every progression is fully rainbow is recorded too.
    pub fn new(half: usize, chi: Coloring) -> Result<Self, RainbowApError> {
        if half == 0 {
            return Err(RainbowApError::Range("m must be at least 1".into()));
        }
        let top = 2 * half as i64;
        let mut members = Vec::with_capacity(chi.len());
        for e in chi.domain() {
            match e.as_int() {
                Some(x) if (2..=top).contains(&x) => members.push(x),
                _ => {
                    return Err(RainbowApError::Range(format!(
                        "{e} is not an integer in [2, {top}]"
                    )))
                }
            }
        }
        let color = |x: i64| chi.get(&Element::Int(x)).expect("member");
        let mut strictly_rainbow = true;
        for p in progressions(&members) {
            let [a, b, c] = p.map(color);
            if a == c {
                return Err(RainbowApError::NotRainbow(p));
            }
            if a == b || b == c {
                strictly_rainbow = false;
            }
        }
        Ok(RainbowApSet {
            half,
            members,
            chi,
            strictly_rainbow,
        })
    }

    /// `m`; users and packets are `[m]`.
    pub fn half(&self) -> usize {
        self.half
    }

    /// Ground size `2m`.
    pub fn ground(&self) -> usize {
        2 * self.half
    }

    /// `A`, ascending.
    pub fn members(&self) -> &[i64] {
        &self.members
    }

    pub fn chi(&self) -> &Coloring {
        &self.chi
    }

    pub fn num_colors(&self) -> usize {
        self.chi.num_colors()
    }

    /// Whether every progression in `A` uses three distinct colors.
    pub fn strictly_rainbow(&self) -> bool {
        self.strictly_rainbow
    }

    /// `log(|[2m] \ A| + 1) / log(2m)`.
    pub fn alpha_emp(&self) -> f64 {
        let missing = self.ground() - self.members.len();
        log_ratio(missing as f64 + 1.0, self.ground())
    }

    /// `log(#colors) / log(2m)`, zero with at most one color.
    pub fn beta_emp(&self) -> f64 {
        if self.num_colors() <= 1 {
            return 0.0;
        }
        log_ratio(self.num_colors() as f64, self.ground())
    }

    /// Packets user `x` (1-based) caches: `#{y ∈ [m] : x + y ∉ A}`.
    pub fn cached_count(&self, x: i64) -> usize {
        let set: BTreeSet<i64> = self.members.iter().copied().collect();
        (1..=self.half as i64)
            .filter(|y| !set.contains(&(x + y)))
            .count()
    }

    pub fn to_json(&self) -> String {
        let doc = RainbowApDoc {
            n: self.ground(),
            a: self.members.clone(),
            chi: self.chi.iter().map(|(e, c)| (e.to_string(), c)).collect(),
            labels: self.chi.labels().to_vec(),
        };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RainbowApError> {
        let doc: RainbowApDoc =
            serde_json::from_str(text).map_err(|e| RainbowApError::Json(e.to_string()))?;
        if !doc.n.is_multiple_of(2) || doc.n == 0 {
            return Err(RainbowApError::Range(format!(
                "n = {} must be a positive even number",
                doc.n
            )));
        }
        let mut map = BTreeMap::new();
        for (key, c) in &doc.chi {
            let x: i64 = key
                .parse()
                .map_err(|_| RainbowApError::Json(format!("bad key {key:?}")))?;
            map.insert(Element::Int(x), *c);
        }
        let mut chi = Coloring::new(map)?;
        if !doc.labels.is_empty() {
            chi = chi.with_labels(doc.labels)?;
        }
        let set = RainbowApSet::new(doc.n / 2, chi)?;
        let mut listed = doc.a;
        listed.sort_unstable();
        if listed != set.members {
            return Err(RainbowApError::Json(
                "\"A\" differs from the keys of \"chi\"".into(),
            ));
        }
        Ok(set)
    }
}

fn log_ratio(x: f64, ground: usize) -> f64 {
    if ground <= 1 {
        return 0.0;
    }
    x.ln() / (ground as f64).ln()
}

#[derive(Serialize, Deserialize)]
struct RainbowApDoc {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<i64>,
    chi: BTreeMap<String, ColorId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
}

/// Builds `A` and `χ` for users `[m]`.
pub fn build_rainbow_ap(half: usize, strategy: Strategy) -> Result<RainbowApSet, RainbowApError> {
    if half == 0 {
        return Err(RainbowApError::Range("m must be at least 1".into()));
    }
    let full: Vec<i64> = (2..=2 * half as i64).collect();
    match strategy {
        Strategy::Explicit(chi) => RainbowApSet::new(half, chi),
        Strategy::Exact { budget, deletions } => {
            let drop: BTreeSet<i64> = deletions.into_iter().collect();
            let kept: Vec<i64> = full.into_iter().filter(|x| !drop.contains(x)).collect();
            let cap = budget.unwrap_or(kept.len());
            match exact_min_colors(&int_elements(&kept), &SigmaStructure::ThreeAp, cap) {
                Ok((chi, _)) => RainbowApSet::new(half, chi),
                Err(UniverseError::InfeasibleUnderCap { cap }) => {
                    Err(RainbowApError::BudgetInfeasible { budget: cap })
                }
                Err(e) => Err(e.into()),
            }
        }
        Strategy::Greedy { budget } => {
            let mut kept: BTreeSet<i64> = full.into_iter().collect();
            let mut units = deletion_units(half);
            loop {
                let members: Vec<i64> = kept.iter().copied().collect();
                let chi = greedy_color(&int_elements(&members), &SigmaStructure::ThreeAp)?;
                if budget.is_none_or(|b| chi.num_colors() <= b) {
                    return RainbowApSet::new(half, chi);
                }
                // Drop the unit touching the most progressions; first wins ties.
                let mut load: BTreeMap<i64, usize> = BTreeMap::new();
                for p in progressions(&members) {
                    for x in p {
                        *load.entry(x).or_default() += 1;
                    }
                }
                let score = |u: &Vec<i64>| {
                    u.iter()
                        .map(|x| load.get(x).copied().unwrap_or(0))
                        .sum::<usize>()
                };
                let best = (0..units.len())
                    .rev()
                    .max_by_key(|&i| score(&units[i]))
                    .expect("a non-empty set still has a unit to delete");
                for x in units.remove(best) {
                    kept.remove(&x);
                }
            }
        }
    }
}

/// `Ψ(x, y) = (x - y, χ(x + y))` on `[m]²`, colored where `x + y ∈ A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiColoring {
    half: usize,
    cells: Vec<Option<ColorId>>,
    keys: Vec<(i64, ColorId)>,
    labels: Vec<String>,
}

impl PsiColoring {
    /// Color id of `(x, y)`, 1-based.
    pub fn get(&self, x: i64, y: i64) -> Option<ColorId> {
        let m = self.half as i64;
        self.cells[((x - 1) * m + (y - 1)) as usize]
    }

    /// `(x - y, χ-id)` of color `c`.
    pub fn key(&self, c: ColorId) -> (i64, ColorId) {
        self.keys[c]
    }

    pub fn num_colors(&self) -> usize {
        self.keys.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Row-major over `(x, y)`, index `(x-1) * m + (y-1)`.
    pub fn cells(&self) -> &[Option<ColorId>] {
        &self.cells
    }
}

/// Colors are numbered by `(difference, χ-id)` in ascending order and
/// labelled `(difference,χ-label)`.
pub fn build_psi(set: &RainbowApSet) -> PsiColoring {
    let m = set.half as i64;
    let raw: Vec<Option<(i64, ColorId)>> = (1..=m)
        .flat_map(|x| (1..=m).map(move |y| (x, y)))
        .map(|(x, y)| set.chi.get(&Element::Int(x + y)).map(|c| (x - y, c)))
        .collect();
    let keys: Vec<(i64, ColorId)> = raw
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ids: BTreeMap<(i64, ColorId), ColorId> =
        keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let labels = keys
        .iter()
        .map(|&(d, c)| format!("({d},{})", set.chi.label(c)))
        .collect();
    PsiColoring {
        half: set.half,
        cells: raw.iter().map(|k| k.map(|k| ids[&k])).collect(),
        keys,
        labels,
    }
}

/// Users and packets `[m]` under integer sum, colored subset `A` with `χ`,
/// pair colors from `Ψ`.
pub fn build_rainbow_scheme(
    set: &RainbowApSet,
    delivery: Delivery,
) -> Result<CachingScheme, RainbowApError> {
    let m = set.half as i64;
    let universe = Universe::build(int_range(1, m), int_range(1, m), CombineOp::IntegerSum)?;
    let psi = build_psi(set);
    assert!(
        psi.num_colors() <= set.ground() * set.num_colors().max(1),
        "difference-color pairs cannot exceed 2m times the colors"
    );
    let scheme = CachingScheme::from_pair_coloring(
        universe,
        set.chi.clone(),
        psi.cells.clone(),
        psi.labels.clone(),
        delivery,
    )?;
    Ok(scheme)
}

/// One row of an exponent sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRow {
    pub m: usize,
    pub colored: usize,
    pub colors: usize,
    pub alpha: f64,
    pub beta: f64,
    pub psi_colors: usize,
    #[serde(with = "crate::rational::as_string")]
    pub rate: Rational,
    pub uniform: bool,
}

/// Greedy sets for each `m`, reporting achieved exponents and the
/// per-color rate `|Ψ| / m`.
pub fn exponent_sweep(
    halves: &[usize],
    budget: Option<usize>,
    exec: Execution,
) -> Result<Vec<ExponentRow>, RainbowApError> {
    par::map(exec, halves, |&half| {
        let set = build_rainbow_ap(half, Strategy::Greedy { budget })?;
        let psi = build_psi(&set);
        let counts: BTreeSet<usize> = (1..=half as i64).map(|x| set.cached_count(x)).collect();
        Ok(ExponentRow {
            m: half,
            colored: set.members.len(),
            colors: set.num_colors(),
            alpha: set.alpha_emp(),
            beta: set.beta_emp(),
            psi_colors: psi.num_colors(),
            rate: Rational::new(psi.num_colors() as i64, half as i64),
            uniform: counts.len() == 1,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;

    pub(crate) fn paired_sums_set() -> RainbowApSet {
        let entries = [(2, "a"), (8, "a"), (3, "b"), (7, "b"), (4, "c"), (6, "c")];
        let chi = Coloring::from_keys(entries.iter().map(|&(x, l)| (Element::Int(x), l)), |l| {
            l.to_string()
        });
        build_rainbow_ap(4, Strategy::Explicit(chi)).unwrap()
    }

    #[test]
    fn paired_sums_grid() {
        let set = paired_sums_set();
        assert!(!set.strictly_rainbow());
        assert_eq!(set.members(), &[2, 3, 4, 6, 7, 8]);
        let psi = build_psi(&set);
        assert_eq!(psi.num_colors(), 6);
        for x in 1..=4 {
            for y in 1..=4 {
                assert_eq!(psi.get(x, y).is_none(), x + y == 5, "({x},{y})");
            }
        }
        let label = |x, y| psi.labels()[psi.get(x, y).unwrap()].clone();
        assert_eq!(label(1, 1), "(0,a)");
        assert_eq!(label(4, 4), "(0,a)");
        assert_eq!(label(2, 2), "(0,c)");
        assert_eq!(label(3, 1), "(2,c)");
        assert_eq!(label(1, 2), "(-1,b)");
        assert_eq!(label(2, 4), "(-2,c)");
        assert!((set.alpha_emp() - 3f64.ln() / 8f64.ln()).abs() < 1e-12);
        assert!((set.beta_emp() - 3f64.ln() / 8f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn paired_sums_scheme_parameters() {
        let s = build_rainbow_scheme(&paired_sums_set(), Delivery::PerColor).unwrap();
        let p = s.params();
        assert_eq!((p.k, p.f, p.z, p.colors), (4, 4, 3, 6));
        assert_eq!(p.cache_fraction, Rational::new(1, 4));
        assert_eq!(p.color_rate, Rational::new(6, 4));
        assert!(s.claim_holds());
    }

    #[test]
    fn endpoint_clash_is_rejected() {
        let chi = Coloring::new(
            [
                (Element::Int(2), 0),
                (Element::Int(3), 1),
                (Element::Int(4), 0),
            ]
            .into(),
        )
        .unwrap();
        assert_eq!(
            RainbowApSet::new(2, chi),
            Err(RainbowApError::NotRainbow([2, 3, 4]))
        );
        let chi = Coloring::distinct(&[Element::Int(9)]);
        assert!(matches!(
            RainbowApSet::new(4, chi),
            Err(RainbowApError::Range(_))
        ));
    }

    #[test]
    fn smallest_and_empty() {
        let set = build_rainbow_ap(1, Strategy::Greedy { budget: None }).unwrap();
        assert_eq!(set.members(), &[2]);
        assert_eq!(set.num_colors(), 1);
        let psi = build_psi(&set);
        assert_eq!(psi.get(1, 1), Some(0));
        let empty = RainbowApSet::new(3, Coloring::empty()).unwrap();
        let s = build_rainbow_scheme(&empty, Delivery::default()).unwrap();
        assert_eq!(s.params().rate, Rational::from_integer(0));
        assert_eq!(s.params().cache_fraction, Rational::from_integer(1));
    }

    #[test]
    fn greedy_and_exact_agree_with_validation() {
        let g = build_rainbow_ap(8, Strategy::Greedy { budget: None }).unwrap();
        assert!(g.strictly_rainbow());
        let e = build_rainbow_ap(
            8,
            Strategy::Exact {
                budget: None,
                deletions: vec![],
            },
        )
        .unwrap();
        assert!(e.strictly_rainbow());
        assert!(e.num_colors() <= g.num_colors());
        assert_eq!(g.members().len(), 15);
    }

    #[test]
    fn greedy_budget_deletes_whole_units() {
        for half in 2..=10 {
            let free = build_rainbow_ap(half, Strategy::Greedy { budget: None }).unwrap();
            let budget = free.num_colors().saturating_sub(2).max(1);
            let set = build_rainbow_ap(
                half,
                Strategy::Greedy {
                    budget: Some(budget),
                },
            )
            .unwrap();
            assert!(set.num_colors() <= budget);
            let counts: BTreeSet<usize> = (1..=half as i64).map(|x| set.cached_count(x)).collect();
            assert_eq!(counts.len(), 1, "m={half}");
            build_rainbow_scheme(&set, Delivery::Mds(Field::Gf2)).unwrap();
        }
    }

    #[test]
    fn exact_budget_infeasible() {
        let r = build_rainbow_ap(
            4,
            Strategy::Exact {
                budget: Some(1),
                deletions: vec![],
            },
        );
        assert_eq!(
            r.unwrap_err(),
            RainbowApError::BudgetInfeasible { budget: 1 }
        );
    }

    #[test]
    fn units_are_exactly_the_uniform_deletions() {
        // Brute force over all deletion sets for small m.
        for half in 1..=5usize {
            let full: Vec<i64> = (2..=2 * half as i64).collect();
            let units = deletion_units(half);
            for mask in 0u32..(1 << full.len()) {
                let dropped: BTreeSet<i64> = full
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                let uniform = {
                    let counts: BTreeSet<usize> = (1..=half as i64)
                        .map(|x| {
                            (1..=half as i64)
                                .filter(|y| dropped.contains(&(x + y)))
                                .count()
                        })
                        .collect();
                    counts.len() == 1
                };
                let union_of_units = units.iter().all(|u| {
                    u.iter().all(|x| dropped.contains(x)) || u.iter().all(|x| !dropped.contains(x))
                });
                assert_eq!(uniform, union_of_units, "m={half} dropped={dropped:?}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let set = paired_sums_set();
        let back = RainbowApSet::from_json(&set.to_json()).unwrap();
        assert_eq!(back, set);
        assert!(RainbowApSet::from_json(r#"{"n":8,"A":[2],"chi":{"3":0}}"#).is_err());
        assert!(RainbowApSet::from_json("nope").is_err());
    }

    #[test]
    fn sweep_paths_agree() {
        let ms = [2, 3, 5, 8];
        let a = exponent_sweep(&ms, None, Execution::Sequential).unwrap();
        let b = exponent_sweep(&ms, None, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.uniform));
    }
}
