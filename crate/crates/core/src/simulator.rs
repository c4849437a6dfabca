//! End-to-end placement, delivery and decoding over demand sweeps.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf::Packet;
use crate::par::{self, Execution};
use crate::rational::{self, Rational};
use crate::schemes::{
    cutset_bound, man_rate, CachingScheme, DemandVector, SchemeError, SchemeParams,
};

/// Largest demand count an exhaustive sweep will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimulatorError {
    #[error("exhaustive sweep over {files}^{users} demands exceeds {limit}")]
    SweepTooLarge {
        files: usize,
        users: usize,
        limit: u64,
    },
    #[error("library needs at least one file")]
    NoFiles,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// `rows x cols` packets of `len` bytes. Packet `(i, j)` is the ChaCha8
/// keystream for `seed` on stream `i * cols + j`, so any cell can be
/// regenerated on its own.
pub fn packet_table(rows: usize, cols: usize, len: usize, seed: u64) -> Vec<Vec<Packet>> {
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((i * cols + j) as u64);
                    let mut bytes = vec![0u8; len];
                    rng.fill_bytes(&mut bytes);
                    Packet(bytes)
                })
                .collect()
        })
        .collect()
}

/// `N` files of `F` packets each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Library {
    files: Vec<Vec<Packet>>,
    packet_size: usize,
    seed: u64,
}

impl Library {
    pub fn synthesize(files: usize, packets: usize, packet_size: usize, seed: u64) -> Self {
        Library {
            files: packet_table(files, packets, packet_size, seed),
            packet_size,
            seed,
        }
    }

    pub fn files(&self) -> &[Vec<Packet>] {
        &self.files
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn packet_size(&self) -> usize {
        self.packet_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DemandPolicy {
    /// All `N^K` demand vectors.
    Exhaustive,
    /// `count` vectors drawn uniformly with the given seed.
    Random { count: usize, seed: u64 },
    /// One vector with distinct files when `N >= K` (cycling otherwise).
    WorstCaseDistinct,
}

impl std::fmt::Display for DemandPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DemandPolicy::Exhaustive => f.write_str("exhaustive"),
            DemandPolicy::Random { count, seed } => write!(f, "random({count}, seed {seed})"),
            DemandPolicy::WorstCaseDistinct => f.write_str("worst-case-distinct"),
        }
    }
}

/// The demand vectors a policy selects, in a fixed order.
pub fn demands(
    policy: &DemandPolicy,
    files: usize,
    users: usize,
) -> Result<Vec<DemandVector>, SimulatorError> {
    if files == 0 {
        return Err(SimulatorError::NoFiles);
    }
    Ok(match policy {
        DemandPolicy::Exhaustive => {
            let total = (files as u64)
                .checked_pow(users as u32)
                .filter(|&t| t <= EXHAUSTIVE_LIMIT)
                .ok_or(SimulatorError::SweepTooLarge {
                    files,
                    users,
                    limit: EXHAUSTIVE_LIMIT,
                })?;
            (0..total)
                .map(|mut idx| {
                    let mut d = vec![0; users];
                    for slot in d.iter_mut().rev() {
                        *slot = (idx % files as u64) as usize;
                        idx /= files as u64;
                    }
                    DemandVector(d)
                })
                .collect()
        }
        DemandPolicy::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count)
                .map(|_| DemandVector((0..users).map(|_| rng.gen_range(0..files)).collect()))
                .collect()
        }
        DemandPolicy::WorstCaseDistinct => {
            vec![DemandVector((0..users).map(|a| a % files).collect())]
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemandOutcome {
    pub demand: Vec<usize>,
    pub transmissions: usize,
    /// Users whose decoded file differed from the library or failed.
    pub failed_users: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub params: SchemeParams,
    pub files: usize,
    pub packet_size: usize,
    pub seed: u64,
    pub policy: String,
    pub outcomes: Vec<DemandOutcome>,
    pub max_transmissions: usize,
    /// `max_d |X_d| / F`.
    #[serde(with = "rational::as_string")]
    pub realized_rate: Rational,
    /// `m / F`.
    #[serde(with = "rational::as_string")]
    pub predicted_rate: Rational,
    pub rate_matches_prediction: bool,
    pub all_decoded: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per demand: `demand,transmissions,decoded,failed_users`, with
    /// list fields space-separated.
    pub fn to_csv(&self) -> String {
        let join = |xs: &[usize]| {
            xs.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::from("demand,transmissions,decoded,failed_users\n");
        for o in &self.outcomes {
            out.push_str(&format!(
                "{},{},{},{}\n",
                join(&o.demand),
                o.transmissions,
                o.failed_users.is_empty(),
                join(&o.failed_users)
            ));
        }
        out
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().map(|o| o.failed_users.len()).sum()
    }
}

/// Runs placement once, then delivery and every user's decode for each
/// selected demand, comparing bytewise against the library.
pub fn sweep(
    scheme: &CachingScheme,
    library: &Library,
    policy: &DemandPolicy,
    exec: Execution,
) -> Result<RunReport, SimulatorError> {
    let params = scheme.params();
    let vectors = demands(policy, library.num_files(), params.k)?;
    let caches: Vec<_> = (0..params.k)
        .map(|a| scheme.cache_of(a, library.files()))
        .collect();
    let outcomes = par::map(exec, &vectors, |d| -> Result<DemandOutcome, SchemeError> {
        let broadcast = scheme.deliver(d, library.files())?;
        let failed_users = caches
            .iter()
            .filter(|cache| {
                scheme
                    .decode(d, cache, &broadcast)
                    .map_or(true, |file| file != library.files()[d.file(cache.user)])
            })
            .map(|cache| cache.user)
            .collect();
        Ok(DemandOutcome {
            demand: d.0.clone(),
            transmissions: broadcast.len(),
            failed_users,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let max_transmissions = outcomes.iter().map(|o| o.transmissions).max().unwrap_or(0);
    let realized_rate = Rational::new(max_transmissions as i64, params.f as i64);
    Ok(RunReport {
        params: params.clone(),
        files: library.num_files(),
        packet_size: library.packet_size(),
        seed: library.seed(),
        policy: policy.to_string(),
        rate_matches_prediction: outcomes.iter().all(|o| o.transmissions == params.m),
        all_decoded: outcomes.iter().all(|o| o.failed_users.is_empty()),
        outcomes,
        max_transmissions,
        realized_rate,
        predicted_rate: params.rate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub name: String,
    #[serde(with = "rational::as_string")]
    pub value: Rational,
    /// Realized rate minus `value`.
    #[serde(with = "rational::as_string")]
    pub slack: Rational,
}

/// Realized rate next to the predicted rate, the per-color rate, the cut-set
/// bound at `M = (M/N) · N`, and the subset-scheme closed form when `K·M/N`
/// is an integer strictly between 0 and `K`.
pub fn compare_bounds(report: &RunReport) -> Vec<BoundRow> {
    let p = &report.params;
    let realized = report.realized_rate;
    let memory = p.cache_fraction * Rational::from_integer(report.files as i64);
    let mut rows = vec![
        ("realized", realized),
        ("predicted m/F", p.rate),
        ("per-color", p.color_rate),
        ("cut-set bound", cutset_bound(p.k, report.files, memory)),
    ];
    let t = p.cache_fraction * Rational::from_integer(p.k as i64);
    if t.is_integer() && *t.numer() > 0 && (*t.numer() as usize) < p.k {
        rows.push(("subset closed form", man_rate(p.k, *t.numer() as usize)));
    }
    rows.into_iter()
        .map(|(name, value)| BoundRow {
            name: name.into(),
            value,
            slack: realized - value,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::schemes::{scheme_man, Delivery};

    #[test]
    fn table_cells_regenerate_independently() {
        let t = packet_table(3, 4, 16, 7);
        assert_eq!(packet_table(3, 4, 16, 7), t);
        assert_ne!(packet_table(3, 4, 16, 8), t);
        assert_ne!(t[0][1], t[1][0]);
        assert_eq!(packet_table(1, 1, 16, 7)[0][0], t[0][0]);
    }

    #[test]
    fn exhaustive_order_and_limit() {
        let d = demands(&DemandPolicy::Exhaustive, 2, 3).unwrap();
        assert_eq!(d.len(), 8);
        assert_eq!(d[1].0, vec![0, 0, 1]);
        assert_eq!(d[6].0, vec![1, 1, 0]);
        assert!(matches!(
            demands(&DemandPolicy::Exhaustive, 10, 7),
            Err(SimulatorError::SweepTooLarge { .. })
        ));
        assert_eq!(
            demands(&DemandPolicy::WorstCaseDistinct, 2, 3).unwrap()[0].0,
            vec![0, 1, 0]
        );
        let r = demands(&DemandPolicy::Random { count: 5, seed: 1 }, 3, 4).unwrap();
        assert_eq!(
            r,
            demands(&DemandPolicy::Random { count: 5, seed: 1 }, 3, 4).unwrap()
        );
        assert!(r.iter().all(|d| d.0.iter().all(|&x| x < 3)));
    }

    #[test]
    fn sweep_is_reproducible_across_execution() {
        let s = scheme_man(3, 1, Delivery::Mds(Field::Gf2)).unwrap();
        let lib = Library::synthesize(3, s.params().f, 8, 42);
        let a = sweep(&s, &lib, &DemandPolicy::Exhaustive, Execution::Sequential).unwrap();
        let b = sweep(&s, &lib, &DemandPolicy::Exhaustive, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.all_decoded && a.rate_matches_prediction);
        assert_eq!(a.outcomes.len(), 27);
        assert_eq!(a.to_csv().lines().count(), 28);
        assert!(a.to_json().contains("\"realized_rate\": \"1\""));
    }

    #[test]
    fn bounds_rows() {
        let s = scheme_man(4, 2, Delivery::PerColor).unwrap();
        let lib = Library::synthesize(4, s.params().f, 4, 1);
        let r = sweep(
            &s,
            &lib,
            &DemandPolicy::WorstCaseDistinct,
            Execution::Sequential,
        )
        .unwrap();
        let rows = compare_bounds(&r);
        let get = |n: &str| rows.iter().find(|row| row.name == n).unwrap().value;
        assert_eq!(get("realized"), Rational::new(2, 3));
        assert_eq!(get("subset closed form"), Rational::new(2, 3));
        assert_eq!(get("cut-set bound"), Rational::new(1, 2));
        assert!(rows
            .iter()
            .all(|row| row.slack == Rational::new(2, 3) - row.value));
    }
}
