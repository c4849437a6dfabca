#![allow(dead_code)]

use std::path::Path;
use std::str::FromStr;

use rainbow_coded::gf::Field;
use rainbow_coded::rainbow3ap::{build_rainbow_ap, build_rainbow_scheme, RainbowApSet, Strategy};
use rainbow_coded::schemes::{
    scheme_cyclic, scheme_linear_block, scheme_man, scheme_union_subsets, CachingScheme, Delivery,
    Pda,
};
use rainbow_coded::universe::{SigmaStructure, UniverseDoc};
use rand::seq::SliceRandom;
use rand::Rng;

pub const GF2: Delivery = Delivery::Mds(Field::Gf2);

pub fn data(name: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data")
            .join(name),
    )
    .expect("data file")
}

pub fn four_cycle(delivery: Delivery) -> CachingScheme {
    let (u, c) = UniverseDoc::from_str(&data("four_cycle.json"))
        .unwrap()
        .decode()
        .unwrap();
    CachingScheme::build(u, c, &SigmaStructure::SubsetRainbow(1), delivery).unwrap()
}

pub fn paired_sums() -> RainbowApSet {
    RainbowApSet::from_json(&data("paired_sums.json")).unwrap()
}

/// Every small scheme the library can construct, labelled.
pub fn catalog(delivery: Delivery) -> Vec<(String, CachingScheme)> {
    let mut out = vec![("four-cycle".to_string(), four_cycle(delivery))];
    for (k, t) in [(3, 1), (4, 1), (4, 2), (5, 2), (6, 3), (4, 3)] {
        out.push((format!("man({k},{t})"), scheme_man(k, t, delivery).unwrap()));
    }
    for (n, a, b) in [(4, 1, 2), (5, 1, 2), (5, 1, 3), (5, 2, 3)] {
        out.push((
            format!("union-subsets({n},{a},{b})"),
            scheme_union_subsets(n, a, b, delivery).unwrap(),
        ));
    }
    for n in 5..=8 {
        out.push((format!("cyclic({n})"), scheme_cyclic(n, delivery).unwrap()));
    }
    out.push((
        "linear-block(3,2)".into(),
        scheme_linear_block(&[vec![1, 0, 1], vec![0, 1, 1]], 2, delivery).unwrap(),
    ));
    out.push((
        "linear-block(2,1)".into(),
        scheme_linear_block(&[vec![1, 1]], 2, delivery).unwrap(),
    ));
    out.push((
        "linear-block(2,1,q=3)".into(),
        scheme_linear_block(&[vec![1, 1]], 3, delivery).unwrap(),
    ));
    out.push((
        "paired-sums".into(),
        build_rainbow_scheme(&paired_sums(), delivery).unwrap(),
    ));
    for m in [3, 5] {
        let set = build_rainbow_ap(m, Strategy::Greedy { budget: None }).unwrap();
        out.push((
            format!("rainbow-3ap(m={m})"),
            build_rainbow_scheme(&set, delivery).unwrap(),
        ));
    }
    out.push((
        "pda-man(5,2)".into(),
        Pda::man(5, 2).unwrap().to_scheme(delivery).unwrap(),
    ));
    out
}

/// A valid array of random shape: each user misses `z` random packets and
/// the missing cells are strong-edge colored greedily in random order with
/// shuffled integer labels.
pub fn random_pda<R: Rng>(rng: &mut R) -> Pda {
    let users = rng.gen_range(1..=5);
    let packets = rng.gen_range(1..=6);
    let z = rng.gen_range(0..=packets);
    let mut rows: Vec<usize> = (0..packets).collect();
    let missing: Vec<Vec<usize>> = (0..users)
        .map(|_| {
            rows.shuffle(rng);
            rows[..z].to_vec()
        })
        .collect();
    let uncached: Vec<Vec<bool>> = (0..packets)
        .map(|f| missing.iter().map(|m| m.contains(&f)).collect())
        .collect();
    let mut cells: Vec<(usize, usize)> = (0..packets)
        .flat_map(|f| (0..users).map(move |k| (f, k)))
        .filter(|&(f, k)| uncached[f][k])
        .collect();
    cells.shuffle(rng);
    let mut color: Vec<Vec<Option<usize>>> = vec![vec![None; users]; packets];
    let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
    for (f, k) in cells {
        let fits = |class: &Vec<(usize, usize)>| {
            class
                .iter()
                .all(|&(g, j)| g != f && j != k && !uncached[f][j] && !uncached[g][k])
        };
        let c = match members.iter().position(fits) {
            Some(c) => c,
            None => {
                members.push(Vec::new());
                members.len() - 1
            }
        };
        members[c].push((f, k));
        color[f][k] = Some(c);
    }
    let mut labels: Vec<i64> = (0..members.len() as i64).map(|x| 3 * x - 5).collect();
    labels.shuffle(rng);
    Pda::new(
        color
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.map(|c| labels[c])).collect())
            .collect(),
    )
    .unwrap()
}
