//! Ready-made schemes.

use std::collections::BTreeSet;

use super::{CachingScheme, Delivery, SchemeError};
use crate::gf::{Field, Matrix};
use crate::universe::{
    singletons, subsets, Coloring, CombineOp, CustomSigma, Element, SigmaStructure, Universe,
};

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `a`-subsets as users, `b`-subsets as packets, every `(a+b)`-subset its
/// own color.
fn subset_scheme(
    n: usize,
    a: usize,
    b: usize,
    delivery: Delivery,
) -> Result<CachingScheme, SchemeError> {
    let users = subsets(n as i64, a);
    let packets = subsets(n as i64, b);
    if users.len() * packets.len() > 4_000_000 {
        return Err(SchemeError::Range(format!(
            "{} x {} pairs is too large",
            users.len(),
            packets.len()
        )));
    }
    let universe = Universe::build(users, packets, CombineOp::SetUnion)?;
    let coloring = Coloring::distinct(&subsets(n as i64, a + b));
    CachingScheme::build(
        universe,
        coloring,
        &SigmaStructure::SubsetRainbow(a),
        delivery,
    )
}

/// Users `[K]`, packets the `t`-subsets of `[K]`; `F = C(K,t)`, `M/N = t/K`
/// and `C(K,t+1)` classes.
pub fn scheme_man(
    users: usize,
    t: usize,
    delivery: Delivery,
) -> Result<CachingScheme, SchemeError> {
    if t == 0 || t >= users {
        return Err(SchemeError::Range(format!(
            "need 1 <= t < K, got t={t}, K={users}"
        )));
    }
    subset_scheme(users, 1, t, delivery)
}

/// Users the `a`-subsets and packets the `b`-subsets of `[n]`.
pub fn scheme_union_subsets(
    n: usize,
    a: usize,
    b: usize,
    delivery: Delivery,
) -> Result<CachingScheme, SchemeError> {
    if a == 0 || a >= b || a + b > n {
        return Err(SchemeError::Range(format!(
            "need 1 <= a < b and a + b <= n, got n={n}, a={a}, b={b}"
        )));
    }
    debug_assert!(binomial(n, a + b) > 0);
    subset_scheme(n, a, b, delivery)
}

/// The cyclic family: users `[n]`, packet `i` the `n - 2` consecutive
/// labels starting at `i` (mod `n`), colored subset all `(n-1)`-subsets,
/// each its own color.
pub fn cyclic_universe(n: usize) -> Result<(Universe, Coloring), SchemeError> {
    if n < 3 {
        return Err(SchemeError::Range(format!(
            "cyclic family needs n >= 3, got {n}"
        )));
    }
    let n64 = n as i64;
    let packets = (1..=n64)
        .map(|i| Element::set((0..n64 - 2).map(|j| (i - 1 + j) % n64 + 1)))
        .collect();
    let universe = Universe::build(singletons(n64), packets, CombineOp::SetUnion)?;
    Ok((universe, Coloring::distinct(&subsets(n64, n - 1))))
}

/// The cyclic family as a scheme. Over GF(2) with `m = |Φ| - 1` the broadcast
/// uses the banded matrix (rows `e_i + e_{i+1}`), which spans the same code as
/// `[I | 1]` and pairs up cyclically adjacent classes.
pub fn scheme_cyclic(n: usize, delivery: Delivery) -> Result<CachingScheme, SchemeError> {
    let (universe, coloring) = cyclic_universe(n)?;
    let scheme = CachingScheme::build(
        universe,
        coloring,
        &SigmaStructure::SubsetRainbow(1),
        delivery,
    )?;
    let colors = scheme.num_classes();
    if delivery == Delivery::Mds(Field::Gf2) && colors >= 2 && scheme.params().m == colors - 1 {
        return scheme.with_matrix(Matrix::banded_gf2(colors));
    }
    Ok(scheme)
}

fn is_prime(q: u32) -> bool {
    q >= 2
        && (2..)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

/// Rank of a matrix over GF(q), q prime.
fn rank_mod(mut rows: Vec<Vec<u32>>, q: u32) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let inverse = |x: u32| (1..q).find(|&y| x * y % q == 1).expect("prime modulus");
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = inverse(rows[rank][c]);
        let pivot: Vec<u32> = rows[rank].iter().map(|&v| v * inv % q).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                for (v, &pv) in row.iter_mut().zip(&pivot) {
                    *v = (*v + q * q - f * pv % q) % q;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

fn sequences(len: usize, q: u32) -> Vec<Vec<u32>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|s| (0..q).map(move |x| [s.clone(), vec![x]].concat()))
            .collect()
    })
}

fn position_set(word: &[u32]) -> Element {
    Element::set_of(
        word.iter()
            .enumerate()
            .map(|(j, &x)| Element::int_pair(j as i64 + 1, x as i64)),
    )
}

/// Scheme from a `k x n` generator over GF(q), `q` prime, `n = k + 1`.
///
/// Users are the position/symbol pairs `(j, x)`, packets the codewords (as
/// sets of pairs), and each non-codeword `s` gives one class: the `n` unions
/// `B_j ∪ {(j, s_j)}` where `B_j` is the codeword agreeing with `s` off
/// position `j`.
pub fn scheme_linear_block(
    generator: &[Vec<u32>],
    q: u32,
    delivery: Delivery,
) -> Result<CachingScheme, SchemeError> {
    if !is_prime(q) {
        return Err(SchemeError::UnsupportedField(q));
    }
    let k = generator.len();
    let n = generator.first().map_or(0, Vec::len);
    if k == 0 || generator.iter().any(|r| r.len() != n) {
        return Err(SchemeError::Dimension(
            "generator rows must be non-empty and equal length".into(),
        ));
    }
    if n != k + 1 {
        return Err(SchemeError::UnsupportedN { n, k });
    }
    if let Some(&x) = generator.iter().flatten().find(|&&x| x >= q) {
        return Err(SchemeError::Range(format!(
            "generator entry {x} outside GF({q})"
        )));
    }
    if (q as usize).pow(n as u32) > 1 << 16 {
        return Err(SchemeError::Range(format!("q^n = {q}^{n} is too large")));
    }
    for dropped in 0..n {
        let cols: Vec<usize> = (0..n).filter(|&c| c != dropped).collect();
        let sub: Vec<Vec<u32>> = generator
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        if rank_mod(sub, q) < k {
            return Err(SchemeError::RankPropertyFail(cols));
        }
    }

    let codewords: Vec<Vec<u32>> = sequences(k, q)
        .iter()
        .map(|u| {
            (0..n)
                .map(|j| (0..k).map(|i| u[i] * generator[i][j]).sum::<u32>() % q)
                .collect()
        })
        .collect();
    let code: BTreeSet<&Vec<u32>> = codewords.iter().collect();

    let users = (1..=n as i64)
        .flat_map(|j| (0..q as i64).map(move |x| Element::set_of([Element::int_pair(j, x)])));
    let packets = codewords.iter().map(|c| position_set(c)).collect();
    let universe = Universe::build(users.collect(), packets, CombineOp::SetUnion)?;

    let mut entries = Vec::new();
    for s in sequences(n, q).into_iter().filter(|s| !code.contains(s)) {
        for j in 0..n {
            let partner = codewords
                .iter()
                .find(|c| (0..n).all(|i| i == j || c[i] == s[i]))
                .expect("rank property gives a unique partner");
            let mut elem = position_set(partner).as_set().expect("set").clone();
            elem.insert(Element::int_pair(j as i64 + 1, s[j] as i64));
            entries.push((Element::Set(elem), s.clone()));
        }
    }
    let coloring = Coloring::from_keys(entries, |s: &Vec<u32>| {
        s.iter().map(u32::to_string).collect::<String>()
    });

    // Same-class elements share exactly n pairs; any other two must differ.
    let sigma = SigmaStructure::Custom(CustomSigma::new(
        "intersection_not_n",
        2,
        move |xs: &[&Element]| match (xs[0].as_set(), xs[1].as_set()) {
            (Some(x), Some(y)) => x.intersection(y).count() != n,
            _ => true,
        },
    )?);
    CachingScheme::build(universe, coloring, &sigma, delivery)
}
