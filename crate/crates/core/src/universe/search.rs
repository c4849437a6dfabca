//! Coloring search.
//!
//! An instance is rainbow exactly when its members have pairwise distinct
//! colors, so both searches work on the conflict graph whose edges join any
//! two members of a common instance.

use std::collections::BTreeMap;

use super::sigma::{instances, sorted_unique};
use super::{ColorId, Coloring, Element, SigmaStructure, UniverseError};

/// Largest domain [`exact_min_colors`] accepts.
pub const EXACT_DOMAIN_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ElementOrder {
    #[default]
    Ascending,
    Descending,
    /// Keep the caller's order.
    AsGiven,
}

impl ElementOrder {
    pub(crate) fn arrange(&self, domain: &[Element]) -> Vec<Element> {
        match self {
            ElementOrder::Ascending => sorted_unique(domain),
            ElementOrder::Descending => {
                let mut v = sorted_unique(domain);
                v.reverse();
                v
            }
            ElementOrder::AsGiven => {
                let mut seen = std::collections::HashSet::new();
                domain
                    .iter()
                    .filter(|e| seen.insert((*e).clone()))
                    .cloned()
                    .collect()
            }
        }
    }
}

fn conflict_lists(
    elems: &[Element],
    sigma: &SigmaStructure,
) -> Result<Vec<Vec<usize>>, UniverseError> {
    let mut adj = vec![Vec::new(); elems.len()];
    for inst in instances(elems, sigma)? {
        for (x, &i) in inst.iter().enumerate() {
            for &j in &inst[x + 1..] {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    Ok(adj)
}

/// Colors `ordered` one element at a time, giving each the smallest id not
/// already held by a member of an instance it belongs to.
pub fn greedy_color(
    ordered: &[Element],
    sigma: &SigmaStructure,
) -> Result<Coloring, UniverseError> {
    let elems = sorted_unique(ordered);
    let adj = conflict_lists(&elems, sigma)?;
    let pos: BTreeMap<&Element, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut color: Vec<Option<ColorId>> = vec![None; elems.len()];
    let mut seen = vec![false; elems.len()];
    for e in ordered {
        let v = pos[e];
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let mut taken: Vec<bool> = Vec::new();
        for &u in &adj[v] {
            if let Some(c) = color[u] {
                if taken.len() <= c {
                    taken.resize(c + 1, false);
                }
                taken[c] = true;
            }
        }
        color[v] = Some(taken.iter().position(|t| !t).unwrap_or(taken.len()));
    }
    Coloring::new(
        elems
            .into_iter()
            .zip(color)
            .map(|(e, c)| (e, c.expect("every element visited")))
            .collect(),
    )
}

struct Exact {
    n: usize,
    adj: Vec<u32>,
    degree: Vec<u32>,
}

impl Exact {
    /// DSATUR-ordered backtracking for a `k`-coloring. Colors are opened in
    /// increasing order, so permuted colorings are explored once.
    fn solve(&self, k: usize, color: &mut [Option<usize>], used: usize) -> bool {
        let mut best: Option<(u32, u32, usize)> = None;
        let mut best_forbidden = 0u64;
        for v in 0..self.n {
            if color[v].is_some() {
                continue;
            }
            let forbidden = self.forbidden(v, color);
            let sat = forbidden.count_ones();
            let key = (sat, self.degree[v], usize::MAX - v);
            if best.is_none_or(|b| key > b) {
                best = Some(key);
                best_forbidden = forbidden;
            }
        }
        let Some((_, _, inv)) = best else { return true };
        let v = usize::MAX - inv;
        let limit = k.min(used + 1);
        for c in 0..limit {
            if best_forbidden & (1 << c) != 0 {
                continue;
            }
            color[v] = Some(c);
            if self.solve(k, color, used.max(c + 1)) {
                return true;
            }
        }
        color[v] = None;
        false
    }

    fn forbidden(&self, v: usize, color: &[Option<usize>]) -> u64 {
        let mut mask = 0u64;
        let mut nb = self.adj[v];
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if let Some(c) = color[u] {
                mask |= 1 << c;
            }
        }
        mask
    }
}

/// A coloring with the fewest colors under which every instance of `sigma`
/// in `domain` is rainbow, found by exhaustive backtracking.
///
/// Fails with [`UniverseError::InfeasibleUnderCap`] when more than `cap`
/// colors are needed, and with [`UniverseError::DomainTooLarge`] above
/// [`EXACT_DOMAIN_LIMIT`] elements.
pub fn exact_min_colors(
    domain: &[Element],
    sigma: &SigmaStructure,
    cap: usize,
) -> Result<(Coloring, usize), UniverseError> {
    let elems = sorted_unique(domain);
    let n = elems.len();
    if n > EXACT_DOMAIN_LIMIT {
        return Err(UniverseError::DomainTooLarge {
            size: n,
            limit: EXACT_DOMAIN_LIMIT,
        });
    }
    if n == 0 {
        return Ok((Coloring::empty(), 0));
    }
    let lists = conflict_lists(&elems, sigma)?;
    let adj: Vec<u32> = lists
        .iter()
        .map(|l| l.iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let degree = adj.iter().map(|m| m.count_ones()).collect();
    let search = Exact { n, adj, degree };

    let greedy = greedy_color(&elems, sigma)?;
    let upper = greedy.num_colors();
    let lower = greedy_clique(&search).max(1);
    for k in lower..upper.min(cap + 1) {
        let mut color = vec![None; n];
        if search.solve(k, &mut color, 0) {
            let coloring = canonical(
                &elems,
                color.into_iter().map(|c| c.expect("complete")).collect(),
            );
            return Ok((coloring, k));
        }
    }
    if upper <= cap {
        let colors = elems
            .iter()
            .map(|e| greedy.get(e).expect("colored"))
            .collect();
        return Ok((canonical(&elems, colors), upper));
    }
    Err(UniverseError::InfeasibleUnderCap { cap })
}

fn greedy_clique(s: &Exact) -> usize {
    let mut order: Vec<usize> = (0..s.n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(s.degree[v]));
    let mut best = 0;
    for &start in &order {
        let mut clique = 1u32 << start;
        let mut candidates = s.adj[start];
        while candidates != 0 {
            let pick = (0..s.n)
                .filter(|&u| candidates & (1 << u) != 0)
                .max_by_key(|&u| ((s.adj[u] & candidates).count_ones(), std::cmp::Reverse(u)))
                .expect("nonempty");
            clique |= 1 << pick;
            candidates &= s.adj[pick];
        }
        best = best.max(clique.count_ones() as usize);
    }
    best
}

/// Renumbers colors by first appearance in ascending element order.
fn canonical(elems: &[Element], colors: Vec<ColorId>) -> Coloring {
    let mut remap: BTreeMap<ColorId, ColorId> = BTreeMap::new();
    let mut map = BTreeMap::new();
    for (e, c) in elems.iter().zip(colors) {
        let next = remap.len();
        let id = *remap.entry(c).or_insert(next);
        map.insert(e.clone(), id);
    }
    Coloring::new(map).expect("renumbered ids are dense")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::{int_range, subsets, validate_rainbow};

    /// Independent oracle: walk every set partition of the domain (as
    /// restricted growth strings) and keep the smallest one that passes the
    /// rainbow validator.
    fn partition_oracle(domain: &[Element], sigma: &SigmaStructure) -> usize {
        let n = domain.len();
        if n == 0 {
            return 0;
        }
        let mut best = n;
        let mut rgs = vec![0usize; n];
        loop {
            let blocks = rgs.iter().max().unwrap() + 1;
            if blocks < best {
                let c = Coloring::new(domain.iter().cloned().zip(rgs.iter().copied()).collect())
                    .unwrap();
                if validate_rainbow(&c, sigma).unwrap().passed() {
                    best = blocks;
                }
            }
            // Next restricted growth string.
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return best;
                }
                let prefix_max = rgs[..i].iter().max().copied().unwrap();
                if rgs[i] <= prefix_max {
                    rgs[i] += 1;
                    for r in &mut rgs[i + 1..] {
                        *r = 0;
                    }
                    break;
                }
                i -= 1;
            }
        }
    }

    #[test]
    fn greedy_on_sums_of_four() {
        let c = greedy_color(&int_range(2, 8), &SigmaStructure::ThreeAp).unwrap();
        assert!(c.num_colors() <= 7);
        assert!(validate_rainbow(&c, &SigmaStructure::ThreeAp)
            .unwrap()
            .passed());
        assert_eq!(
            greedy_color(&[], &SigmaStructure::ThreeAp)
                .unwrap()
                .num_colors(),
            0
        );
    }

    #[test]
    fn greedy_forces_distinct_on_intersecting_sets() {
        let c = greedy_color(&subsets(4, 3), &SigmaStructure::SubsetRainbow(1)).unwrap();
        assert_eq!(c.num_colors(), 4);
        assert_eq!(
            partition_oracle(&subsets(4, 3), &SigmaStructure::SubsetRainbow(1)),
            4
        );
    }

    #[test]
    fn exact_small_cases() {
        let dom: Vec<Element> = [2, 4, 6].map(Element::Int).to_vec();
        assert_eq!(
            exact_min_colors(&dom, &SigmaStructure::ThreeAp, 10)
                .unwrap()
                .1,
            3
        );
        let dom: Vec<Element> = [1, 2, 4].map(Element::Int).to_vec();
        assert_eq!(
            exact_min_colors(&dom, &SigmaStructure::ThreeAp, 10)
                .unwrap()
                .1,
            1
        );
        assert_eq!(
            exact_min_colors(&[], &SigmaStructure::ThreeAp, 10)
                .unwrap()
                .1,
            0
        );
        assert_eq!(
            exact_min_colors(&[2, 4, 6].map(Element::Int), &SigmaStructure::ThreeAp, 2),
            Err(UniverseError::InfeasibleUnderCap { cap: 2 })
        );
        assert!(matches!(
            exact_min_colors(&int_range(1, 25), &SigmaStructure::ThreeAp, 30),
            Err(UniverseError::DomainTooLarge {
                size: 25,
                limit: 24
            })
        ));
    }

    #[test]
    fn exact_matches_partition_oracle_on_all_subsets_of_sums() {
        // Every subset of {2..8}, the reachable sums of [4] + [4].
        let full = int_range(2, 8);
        for mask in 0u32..(1 << full.len()) {
            let dom: Vec<Element> = full
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect();
            let (c, k) = exact_min_colors(&dom, &SigmaStructure::ThreeAp, 10).unwrap();
            assert_eq!(
                k,
                partition_oracle(&dom, &SigmaStructure::ThreeAp),
                "domain {dom:?}"
            );
            assert_eq!(c.num_colors(), k);
            assert!(validate_rainbow(&c, &SigmaStructure::ThreeAp)
                .unwrap()
                .passed());
        }
    }

    #[test]
    fn exact_agrees_with_oracle_on_small_ranges() {
        for n in 1..=9 {
            let dom = int_range(1, n);
            let k = exact_min_colors(&dom, &SigmaStructure::ThreeAp, 20)
                .unwrap()
                .1;
            assert_eq!(
                k,
                partition_oracle(&dom, &SigmaStructure::ThreeAp),
                "n = {n}"
            );
        }
    }
}
