use std::collections::BTreeMap;
use std::fmt;

use super::{MapReduceError, MapReduceInstance};
use crate::gf::{field, Field, Matrix, Packet};
use crate::rational::Rational;
use crate::schemes::CachingScheme;

/// `coef · v[function][file]`, or one segment of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub function: usize,
    pub file: usize,
    pub coef: u8,
    /// `(index, count)` when the value is split into `count` segments.
    pub segment: Option<(usize, usize)>,
}

impl Term {
    /// Human-readable form with 1-based function index and the file's label,
    /// e.g. `v(2,{1,4})` or `3*v(1,{2,3})[2/2]`.
    pub fn describe(&self, scheme: &CachingScheme) -> String {
        let mut s = String::new();
        if self.coef != 1 {
            s.push_str(&format!("{}*", self.coef));
        }
        s.push_str(&format!(
            "v({},{})",
            self.function + 1,
            scheme.universe().packets()[self.file]
        ));
        if let Some((i, n)) = self.segment {
            s.push_str(&format!("[{}/{n}]", i + 1));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub sender: usize,
    pub round: usize,
    pub terms: Vec<Term>,
    pub payload: Packet,
    /// Size as a fraction of one intermediate value.
    pub size: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanKind {
    /// Rows of the scheme's delivery matrix, split into single-sender pieces.
    Linear { banded: bool },
    /// Each class member sends the XOR of its segments of the others' values.
    Multicast { group: usize },
}

impl fmt::Display for PlanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanKind::Linear { banded: false } => f.write_str("linear"),
            PlanKind::Linear { banded: true } => f.write_str("linear-banded"),
            PlanKind::Multicast { group } => write!(f, "multicast(g={group})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShufflePlan {
    pub kind: PlanKind,
    pub messages: Vec<Message>,
    /// Segments per value (1 unless multicast).
    pub segments: usize,
    /// `Σ message sizes / (Q · N)`.
    pub load: Rational,
}

/// Shared size `g >= 2` of every class, if there is one.
pub(crate) fn uniform_class_size(scheme: &CachingScheme) -> Option<usize> {
    let g = scheme.classes().first()?.len();
    (g >= 2 && scheme.classes().iter().all(|c| c.len() == g)).then_some(g)
}

/// A summand group a node can compute on its own: a whole class, or one
/// `(user, packet)` pair of a class no single node can cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Unit {
    Class(usize),
    Pair(usize, usize),
}

struct Piece {
    sender: usize,
    units: Vec<(Unit, u8)>,
}

fn unit_files(scheme: &CachingScheme, unit: Unit) -> Vec<usize> {
    match unit {
        Unit::Class(c) => scheme.classes()[c].iter().map(|&(_, b)| b).collect(),
        Unit::Pair(_, b) => vec![b],
    }
}

fn holds_all(inst: &MapReduceInstance, node: usize, files: &[usize]) -> bool {
    files.iter().all(|&b| inst.holds(node, b))
}

/// Splits each row of `p · W` greedily: the node covering the most remaining
/// units sends them (lowest index on ties). Pieces equal up to a scalar are
/// sent once.
fn linear_pieces(
    inst: &MapReduceInstance,
    scheme: &CachingScheme,
    p: &Matrix,
) -> Result<Vec<Piece>, MapReduceError> {
    let units_of_class: Vec<Vec<Unit>> = (0..scheme.num_classes())
        .map(|c| {
            if (0..inst.nodes()).any(|a| holds_all(inst, a, &unit_files(scheme, Unit::Class(c)))) {
                vec![Unit::Class(c)]
            } else {
                scheme.classes()[c]
                    .iter()
                    .map(|&(a, b)| Unit::Pair(a, b))
                    .collect()
            }
        })
        .collect();

    let mut pieces: Vec<Piece> = Vec::new();
    let mut seen: BTreeMap<Vec<(Unit, u8)>, usize> = BTreeMap::new();
    for r in 0..p.rows() {
        let mut remaining: Vec<(Unit, u8)> = (0..p.cols())
            .filter(|&c| p.get(r, c) != 0)
            .flat_map(|c| units_of_class[c].iter().map(move |&u| (u, p.get(r, c))))
            .collect();
        while !remaining.is_empty() {
            let covered = |a: usize| {
                remaining
                    .iter()
                    .filter(|(u, _)| holds_all(inst, a, &unit_files(scheme, *u)))
                    .count()
            };
            let (sender, best) = (0..inst.nodes())
                .map(|a| (a, covered(a)))
                .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0 {
                let shown: Vec<String> = remaining.iter().map(|(u, _)| format!("{u:?}")).collect();
                return Err(MapReduceError::InfeasiblePiece(shown.join(" + ")));
            }
            let (mine, rest): (Vec<_>, Vec<_>) = remaining
                .into_iter()
                .partition(|(u, _)| holds_all(inst, sender, &unit_files(scheme, *u)));
            remaining = rest;
            let mut key = mine.clone();
            key.sort();
            let lead = key[0].1;
            let key: Vec<(Unit, u8)> = key
                .into_iter()
                .map(|(u, c)| (u, field::div(c, lead)))
                .collect();
            if !seen.contains_key(&key) {
                seen.insert(key.clone(), pieces.len());
                pieces.push(Piece { sender, units: key });
            }
        }
    }
    Ok(pieces)
}

fn demand(inst: &MapReduceInstance, round: usize) -> Vec<usize> {
    inst.reduce_map().iter().map(|fs| fs[round]).collect()
}

fn instantiate(
    inst: &MapReduceInstance,
    scheme: &CachingScheme,
    pieces: &[Piece],
    kind: PlanKind,
) -> Result<ShufflePlan, MapReduceError> {
    let mut messages = Vec::new();
    for round in 0..inst.rounds() {
        let d = demand(inst, round);
        for piece in pieces {
            let terms: Vec<Term> = piece
                .units
                .iter()
                .flat_map(|&(unit, coef)| {
                    let pairs = match unit {
                        Unit::Class(c) => scheme.classes()[c].clone(),
                        Unit::Pair(a, b) => vec![(a, b)],
                    };
                    pairs.into_iter().map(move |(a, b)| (a, b, coef))
                })
                .map(|(a, b, coef)| Term {
                    function: d[a],
                    file: b,
                    coef,
                    segment: None,
                })
                .collect();
            messages.push(seal(
                inst,
                piece.sender,
                round,
                terms,
                1,
                Rational::from_integer(1),
            )?);
        }
    }
    Ok(finish(inst, kind, messages, 1))
}

fn segment_len(inst: &MapReduceInstance, segments: usize) -> usize {
    inst.value_size().div_ceil(segments)
}

/// Segment `index` of `value` cut into `segments` pieces, zero-padded.
pub(crate) fn segment_of(value: &Packet, index: usize, segments: usize) -> Packet {
    let len = value.len().div_ceil(segments);
    let start = (index * len).min(value.len());
    let end = ((index + 1) * len).min(value.len());
    let mut bytes = value.bytes()[start..end].to_vec();
    bytes.resize(len, 0);
    Packet(bytes)
}

fn seal(
    inst: &MapReduceInstance,
    sender: usize,
    round: usize,
    terms: Vec<Term>,
    segments: usize,
    size: Rational,
) -> Result<Message, MapReduceError> {
    let mut payload = Packet::zeros(segment_len(inst, segments));
    for t in &terms {
        if !inst.holds(sender, t.file) {
            return Err(MapReduceError::InfeasiblePiece(format!(
                "node {} lacks file {}",
                sender + 1,
                t.file
            )));
        }
        let value = inst.value(t.function, t.file);
        match t.segment {
            None => payload.add_scaled(t.coef, value),
            Some((i, n)) => payload.add_scaled(t.coef, &segment_of(value, i, n)),
        }
    }
    Ok(Message {
        sender,
        round,
        terms,
        payload,
        size,
    })
}

fn finish(
    inst: &MapReduceInstance,
    kind: PlanKind,
    messages: Vec<Message>,
    segments: usize,
) -> ShufflePlan {
    let total: Rational = messages.iter().map(|m| m.size).sum();
    let load = total / Rational::from_integer((inst.functions() * inst.files()) as i64);
    ShufflePlan {
        kind,
        messages,
        segments,
        load,
    }
}

fn multicast_plan(
    inst: &MapReduceInstance,
    scheme: &CachingScheme,
    g: usize,
) -> Result<ShufflePlan, MapReduceError> {
    let segments = g - 1;
    let mut messages = Vec::new();
    for round in 0..inst.rounds() {
        let d = demand(inst, round);
        for class in scheme.classes() {
            for (j, &(sender, _)) in class.iter().enumerate() {
                let terms = class
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(i, &(a, b))| {
                        // Sender j carries the segment numbered by its rank among i's partners.
                        let rank = if j < i { j } else { j - 1 };
                        Term {
                            function: d[a],
                            file: b,
                            coef: 1,
                            segment: Some((rank, segments)),
                        }
                    })
                    .collect();
                messages.push(seal(
                    inst,
                    sender,
                    round,
                    terms,
                    segments,
                    Rational::new(1, segments as i64),
                )?);
            }
        }
    }
    Ok(finish(
        inst,
        PlanKind::Multicast { group: g },
        messages,
        segments,
    ))
}

/// Builds the shuffle for every round. Tries the scheme's matrix and, over
/// GF(2) with one parity row short of square, the banded matrix with the
/// same row space; keeps whichever needs fewer messages (scheme's on ties).
/// Falls back to the multicast plan when that is no larger.
pub fn synthesize_shuffle(
    inst: &MapReduceInstance,
    scheme: &CachingScheme,
) -> Result<ShufflePlan, MapReduceError> {
    if inst.nodes() != scheme.params().k || inst.files() != scheme.params().f {
        return Err(MapReduceError::Range(
            "instance and scheme sizes differ".into(),
        ));
    }
    let p = scheme.matrix();
    let colors = scheme.num_classes();
    let mut best = (linear_pieces(inst, scheme, p)?, false);
    let banded = Matrix::banded_gf2(colors.max(1));
    if p.field() == Field::Gf2 && colors >= 2 && p.rows() == colors - 1 && &banded != p {
        let alt = linear_pieces(inst, scheme, &banded)?;
        if alt.len() < best.0.len() {
            best = (alt, true);
        }
    }
    if let Some(g) = uniform_class_size(scheme) {
        if best.0.len() * (g - 1) >= g * colors {
            return multicast_plan(inst, scheme, g);
        }
    }
    instantiate(inst, scheme, &best.0, PlanKind::Linear { banded: best.1 })
}
