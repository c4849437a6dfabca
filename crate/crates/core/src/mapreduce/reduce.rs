use std::collections::BTreeMap;

use serde::Serialize;

use super::shuffle::segment_of;
use super::{MapReduceInstance, ShufflePlan};
use crate::gf::{field, Packet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    /// 1-based node index.
    pub node: usize,
    pub needed: usize,
    pub recovered: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReduceReport {
    pub nodes: Vec<NodeReport>,
    pub pass: bool,
}

/// `(function, file, segment)`.
type Atom = (usize, usize, usize);

/// Every node receives all messages, removes what it can compute from its
/// own files, and solves the rest by elimination over GF(256). A node passes
/// when each value it needs is determined and equals the true value.
pub fn run_reduce(inst: &MapReduceInstance, plan: &ShufflePlan) -> ReduceReport {
    let nodes: Vec<NodeReport> = (0..inst.nodes())
        .map(|a| reduce_node(inst, plan, a))
        .collect();
    let pass = nodes.iter().all(|n| n.pass);
    ReduceReport { nodes, pass }
}

fn atom_value(inst: &MapReduceInstance, atom: Atom, segments: usize) -> Packet {
    segment_of(inst.value(atom.0, atom.1), atom.2, segments)
}

fn reduce_node(inst: &MapReduceInstance, plan: &ShufflePlan, node: usize) -> NodeReport {
    let segments = plan.segments;
    let mut columns: BTreeMap<Atom, usize> = BTreeMap::new();
    let mut rows: Vec<(BTreeMap<usize, u8>, Packet)> = Vec::new();
    for msg in &plan.messages {
        let mut rhs = msg.payload.clone();
        let mut coefs: BTreeMap<usize, u8> = BTreeMap::new();
        for t in &msg.terms {
            let atom = (t.function, t.file, t.segment.map_or(0, |s| s.0));
            if inst.holds(node, t.file) {
                rhs.add_scaled(t.coef, &atom_value(inst, atom, segments));
            } else {
                let next = columns.len();
                let col = *columns.entry(atom).or_insert(next);
                let e = coefs.entry(col).or_insert(0);
                *e = field::add(*e, t.coef);
            }
        }
        coefs.retain(|_, c| *c != 0);
        rows.push((coefs, rhs));
    }

    let solved = eliminate(rows, columns.len());
    let needed: Vec<(usize, usize)> = inst.reduce_map()[node]
        .iter()
        .flat_map(|&q| {
            (0..inst.files())
                .filter(|&b| !inst.holds(node, b))
                .map(move |b| (q, b))
        })
        .collect();
    let recovered = needed
        .iter()
        .filter(|&&(q, b)| {
            let mut bytes = Vec::with_capacity(inst.value_size());
            for s in 0..segments {
                match columns.get(&(q, b, s)).and_then(|c| solved.get(c)) {
                    Some(p) => bytes.extend_from_slice(p.bytes()),
                    None => return false,
                }
            }
            bytes.truncate(inst.value_size());
            &Packet(bytes) == inst.value(q, b)
        })
        .count();
    NodeReport {
        node: node + 1,
        needed: needed.len(),
        recovered,
        pass: recovered == needed.len(),
    }
}

/// Reduced row echelon form; returns the columns pinned to a single value.
fn eliminate(mut rows: Vec<(BTreeMap<usize, u8>, Packet)>, cols: usize) -> BTreeMap<usize, Packet> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].0.contains_key(&col)) else {
            continue;
        };
        rows.swap(next, p);
        let inv = field::inv(rows[next].0[&col]);
        let (coefs, rhs) = &mut rows[next];
        coefs.values_mut().for_each(|c| *c = field::mul(*c, inv));
        field::scale(&mut rhs.0, inv);
        let (pc, pr) = rows[next].clone();
        for (r, (coefs, rhs)) in rows.iter_mut().enumerate() {
            if r == next {
                continue;
            }
            if let Some(&f) = coefs.get(&col) {
                for (&c, &v) in &pc {
                    let e = coefs.entry(c).or_insert(0);
                    *e = field::add(*e, field::mul(f, v));
                }
                coefs.retain(|_, v| *v != 0);
                rhs.add_scaled(f, &pr);
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    pivots
        .into_iter()
        .filter(|&(r, _)| rows[r].0.len() == 1)
        .map(|(r, col)| (col, rows[r].1.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapreduce::synthesize_shuffle;
    use crate::schemes::{scheme_man, Delivery};

    #[test]
    fn eliminate_pins_only_determined_columns() {
        let p = |b: u8| Packet(vec![b]);
        let rows = vec![
            (BTreeMap::from([(0, 1), (1, 1)]), p(3)),
            (BTreeMap::from([(1, 1)]), p(1)),
            (BTreeMap::from([(2, 1), (3, 1)]), p(7)),
        ];
        let solved = eliminate(rows, 4);
        assert_eq!(solved.get(&0), Some(&p(2)));
        assert_eq!(solved.get(&1), Some(&p(1)));
        assert!(!solved.contains_key(&2) && !solved.contains_key(&3));
    }

    #[test]
    fn tampered_payload_fails() {
        let s = scheme_man(4, 1, Delivery::Mds(crate::gf::Field::Gf2)).unwrap();
        let inst = MapReduceInstance::build(&s, 4, 5, 3).unwrap();
        let mut plan = synthesize_shuffle(&inst, &s).unwrap();
        assert!(run_reduce(&inst, &plan).pass);
        plan.messages[0].payload.0[0] ^= 0x40;
        assert!(!run_reduce(&inst, &plan).pass);
        plan.messages.remove(0);
        assert!(!run_reduce(&inst, &plan).pass);
    }
}
