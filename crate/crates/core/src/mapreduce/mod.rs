//! Coded distributed computing from a caching scheme.
//!
//! Users become worker nodes and packets become input files: node `a` maps
//! every file `b` it would have cached. Each node reduces `Q/K` functions
//! and needs the intermediate values of those functions on the files it did
//! not map; the shuffle is the scheme's delivery, split into messages that a
//! single node can compute.

mod reduce;
mod shuffle;

use serde::Serialize;
use thiserror::Error;

use crate::gf::Packet;
use crate::par::{self, Execution};
use crate::rational::{self, Rational};
use crate::schemes::{scheme_cyclic, CachingScheme, Delivery, SchemeError};
use crate::simulator::packet_table;

pub use reduce::{run_reduce, NodeReport, ReduceReport};
pub use shuffle::{synthesize_shuffle, Message, PlanKind, ShufflePlan, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapReduceError {
    #[error("{functions} functions cannot be split evenly over {nodes} nodes")]
    Divisibility { functions: usize, nodes: usize },
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("reduce map: {0}")]
    ReduceMap(String),
    #[error("file {file} is mapped by no node")]
    UnmappedFile { file: usize },
    #[error("no single node can send {0}")]
    InfeasiblePiece(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Map-phase state: who maps which file, who reduces which function, and
/// the synthetic intermediate values `v[q][b]` of `T` bytes each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapReduceInstance {
    nodes: usize,
    files: usize,
    functions: usize,
    value_size: usize,
    holds: Vec<bool>,
    assignment: Vec<Vec<usize>>,
    reduce_map: Vec<Vec<usize>>,
    values: Vec<Vec<Packet>>,
}

impl MapReduceInstance {
    /// Node `a` maps file `b` iff user `a` caches packet `b`; functions are
    /// dealt round-robin (`q` goes to node `q mod K`).
    pub fn build(
        scheme: &CachingScheme,
        functions: usize,
        value_size: usize,
        seed: u64,
    ) -> Result<Self, MapReduceError> {
        let (nodes, files) = (scheme.params().k, scheme.params().f);
        if functions == 0 || !functions.is_multiple_of(nodes) {
            return Err(MapReduceError::Divisibility { functions, nodes });
        }
        if value_size == 0 {
            return Err(MapReduceError::Range(
                "intermediate values need at least one byte".into(),
            ));
        }
        let holds: Vec<bool> = (0..nodes)
            .flat_map(|a| (0..files).map(move |b| (a, b)))
            .map(|(a, b)| !scheme.is_uncached(a, b))
            .collect();
        if let Some(file) = (0..files).find(|&b| (0..nodes).all(|a| !holds[a * files + b])) {
            return Err(MapReduceError::UnmappedFile { file: file + 1 });
        }
        let assignment = (0..nodes).map(|a| scheme.placement(a).to_vec()).collect();
        let reduce_map = (0..nodes)
            .map(|a| (a..functions).step_by(nodes).collect())
            .collect();
        Ok(MapReduceInstance {
            nodes,
            files,
            functions,
            value_size,
            holds,
            assignment,
            reduce_map,
            values: packet_table(functions, files, value_size, seed),
        })
    }

    /// Replaces the function-to-node map; every function must appear once
    /// and each node must get `Q/K` of them.
    pub fn with_reduce_map(mut self, reduce_map: Vec<Vec<usize>>) -> Result<Self, MapReduceError> {
        if reduce_map.len() != self.nodes {
            return Err(MapReduceError::ReduceMap(format!(
                "{} entries for {} nodes",
                reduce_map.len(),
                self.nodes
            )));
        }
        let per = self.functions / self.nodes;
        if let Some(a) = reduce_map.iter().position(|fs| fs.len() != per) {
            return Err(MapReduceError::ReduceMap(format!(
                "node {} gets {} functions, expected {per}",
                a + 1,
                reduce_map[a].len()
            )));
        }
        let mut seen = vec![false; self.functions];
        for &q in reduce_map.iter().flatten() {
            if q >= self.functions || std::mem::replace(&mut seen[q], true) {
                return Err(MapReduceError::ReduceMap(format!(
                    "function {q} is out of range or assigned twice"
                )));
            }
        }
        self.reduce_map = reduce_map;
        Ok(self)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn functions(&self) -> usize {
        self.functions
    }

    pub fn value_size(&self) -> usize {
        self.value_size
    }

    pub fn holds(&self, node: usize, file: usize) -> bool {
        self.holds[node * self.files + file]
    }

    /// Files mapped by each node.
    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.assignment
    }

    /// Functions reduced by each node.
    pub fn reduce_map(&self) -> &[Vec<usize>] {
        &self.reduce_map
    }

    /// Intermediate value of function `q` on file `b`.
    pub fn value(&self, q: usize, b: usize) -> &Packet {
        &self.values[q][b]
    }

    /// Computation load `r = Σ_a |files mapped by a| / N`.
    pub fn computation_load(&self) -> Rational {
        let total: usize = self.assignment.iter().map(Vec::len).sum();
        Rational::new(total as i64, self.files as i64)
    }

    /// Shuffle rounds: round `j` has node `a` fetching values of the `j`-th
    /// function in its reduce set.
    pub fn rounds(&self) -> usize {
        self.functions / self.nodes
    }
}

/// Optimal communication load `(1/r)(1 - r/K)` for computation load `r`.
pub fn cdc_bound(r: Rational, nodes: usize) -> Result<Rational, MapReduceError> {
    let k = Rational::from_integer(nodes as i64);
    if r <= Rational::from_integer(0) || r > k {
        return Err(MapReduceError::Range(format!(
            "need 0 < r <= K, got r={r}, K={nodes}"
        )));
    }
    Ok(r.recip() * (Rational::from_integer(1) - r / k))
}

/// Load of the plain multicast shuffle: every class of size `g` costs
/// `g/(g-1)` value sizes per round. `None` when classes differ in size or
/// have fewer than two members.
pub fn multicast_baseline(scheme: &CachingScheme, functions: usize) -> Option<Rational> {
    let g = shuffle::uniform_class_size(scheme)?;
    let (k, n) = (scheme.params().k as i64, scheme.params().f as i64);
    let rounds = functions as i64 / k;
    let bits = Rational::new(
        rounds * g as i64 * scheme.num_classes() as i64,
        g as i64 - 1,
    );
    Some(bits / Rational::from_integer(functions as i64 * n))
}

/// Summary of one instance's shuffle, in the shape written by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanReport {
    #[serde(with = "rational::as_string")]
    pub r: Rational,
    #[serde(rename = "L", with = "rational::as_string")]
    pub load: Rational,
    pub m_prime: usize,
    #[serde(with = "rational::as_string")]
    pub bound: Rational,
    pub kind: String,
    pub reduce_pass: bool,
    pub messages: Vec<MessageReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MessageReport {
    /// 1-based node index.
    pub sender: usize,
    pub round: usize,
    pub terms: Vec<String>,
}

impl PlanReport {
    pub fn new(
        scheme: &CachingScheme,
        instance: &MapReduceInstance,
        plan: &ShufflePlan,
        reduce: &ReduceReport,
    ) -> Self {
        let r = instance.computation_load();
        PlanReport {
            r,
            load: plan.load,
            m_prime: plan.messages.len(),
            bound: cdc_bound(r, instance.nodes()).unwrap_or(Rational::from_integer(0)),
            kind: plan.kind.to_string(),
            reduce_pass: reduce.pass,
            messages: plan
                .messages
                .iter()
                .map(|m| MessageReport {
                    sender: m.sender + 1,
                    round: m.round,
                    terms: m.terms.iter().map(|t| t.describe(scheme)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One row of the cyclic-family sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicRow {
    pub n: usize,
    #[serde(with = "rational::as_string")]
    pub r: Rational,
    pub classes: usize,
    pub m_prime: usize,
    #[serde(rename = "L", with = "rational::as_string")]
    pub load: Rational,
    #[serde(with = "rational::as_string")]
    pub bound: Rational,
    pub reduce_pass: bool,
}

/// Builds, shuffles and verifies the cyclic family for each `n` with
/// `Q = K = n` over GF(2).
pub fn cyclic_sweep(
    ns: &[usize],
    value_size: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<CyclicRow>, MapReduceError> {
    par::map(exec, ns, |&n| {
        let scheme = scheme_cyclic(n, Delivery::default())?;
        let instance = MapReduceInstance::build(&scheme, n, value_size, seed)?;
        let plan = synthesize_shuffle(&instance, &scheme)?;
        let reduce = run_reduce(&instance, &plan);
        let r = instance.computation_load();
        Ok(CyclicRow {
            n,
            r,
            classes: scheme.num_classes(),
            m_prime: plan.messages.len(),
            load: plan.load,
            bound: cdc_bound(r, n)?,
            reduce_pass: reduce.pass,
        })
    })
    .into_iter()
    .collect()
}
