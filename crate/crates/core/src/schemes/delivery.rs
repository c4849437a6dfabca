use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{CachingScheme, SchemeError};
use crate::gf::{combine, solve_submatrix, xor_all, Packet};

/// File requested by each user (0-based file indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandVector(pub Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, files: usize, users: usize) -> Result<Self, SchemeError> {
        if demands.len() != users {
            return Err(SchemeError::Range(format!(
                "{} demands for {users} users",
                demands.len()
            )));
        }
        if let Some(&d) = demands.iter().find(|&&d| d >= files) {
            return Err(SchemeError::Range(format!(
                "demand {d} with only {files} files"
            )));
        }
        Ok(DemandVector(demands))
    }

    pub fn file(&self, user: usize) -> usize {
        self.0[user]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One user's cache: packet `b` of every file for each cached `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserCache {
    pub user: usize,
    packets: HashMap<(usize, usize), Packet>,
}

impl UserCache {
    /// Packet `packet` of file `file`, if cached.
    pub fn get(&self, file: usize, packet: usize) -> Option<&Packet> {
        self.packets.get(&(file, packet))
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }
}

impl CachingScheme {
    /// Fills `user`'s cache from `library[file][packet]`.
    pub fn cache_of(&self, user: usize, library: &[Vec<Packet>]) -> UserCache {
        let mut packets = HashMap::new();
        for (file, parts) in library.iter().enumerate() {
            for &b in self.placement(user) {
                packets.insert((file, b), parts[b].clone());
            }
        }
        UserCache { user, packets }
    }

    fn check_library(
        &self,
        demands: &DemandVector,
        library: &[Vec<Packet>],
    ) -> Result<usize, SchemeError> {
        let f = self.params().f;
        if demands.len() != self.params().k {
            return Err(SchemeError::Range(format!(
                "{} demands for {} users",
                demands.len(),
                self.params().k
            )));
        }
        if let Some(bad) = library.iter().position(|file| file.len() != f) {
            return Err(SchemeError::Dimension(format!(
                "file {bad} has {} packets, expected {f}",
                library[bad].len()
            )));
        }
        if let Some(&d) = demands.0.iter().find(|&&d| d >= library.len()) {
            return Err(SchemeError::Range(format!(
                "demand {d} with only {} files",
                library.len()
            )));
        }
        Ok(library
            .first()
            .and_then(|file| file.first())
            .map_or(0, Packet::len))
    }

    /// The class packets `W_c`: XOR of the demanded packet of every pair in
    /// the class.
    pub fn class_packets(
        &self,
        demands: &DemandVector,
        library: &[Vec<Packet>],
    ) -> Result<Vec<Packet>, SchemeError> {
        let len = self.check_library(demands, library)?;
        Ok(self
            .classes()
            .iter()
            .map(|class| {
                xor_all(
                    len,
                    class.iter().map(|&(a, b)| &library[demands.file(a)][b]),
                )
            })
            .collect())
    }

    /// The broadcast `P · W`.
    pub fn deliver(
        &self,
        demands: &DemandVector,
        library: &[Vec<Packet>],
    ) -> Result<Vec<Packet>, SchemeError> {
        let w = self.class_packets(demands, library)?;
        if w.is_empty() {
            return Ok(Vec::new());
        }
        Ok(combine(self.matrix(), &w)?)
    }

    /// Rebuilds the file demanded by `cache.user` from its cache and the
    /// broadcast. Returns its `F` packets in order.
    pub fn decode(
        &self,
        demands: &DemandVector,
        cache: &UserCache,
        broadcast: &[Packet],
    ) -> Result<Vec<Packet>, SchemeError> {
        let user = cache.user;
        let f = self.params().f;
        let undecodable = |reason: String| SchemeError::Undecodable { user, reason };
        let cached = |file: usize, b: usize| {
            cache
                .get(file, b)
                .ok_or_else(|| undecodable(format!("packet {b} of file {file} missing from cache")))
        };
        let p = self.matrix();
        if broadcast.len() != p.rows() {
            return Err(undecodable(format!(
                "{} broadcast packets, expected {}",
                broadcast.len(),
                p.rows()
            )));
        }
        let len = broadcast.first().map(Packet::len).or_else(|| {
            self.placement(user)
                .first()
                .and_then(|&b| cache.get(demands.file(user), b))
                .map(Packet::len)
        });
        let len = len.unwrap_or(0);

        // Classes whose every packet the user holds are computed locally.
        let num = self.num_classes();
        let mut known = vec![false; num];
        let mut values: Vec<Option<Packet>> = vec![None; num];
        for (c, class) in self.classes().iter().enumerate() {
            if class
                .iter()
                .all(|&(a, b)| cache.get(demands.file(a), b).is_some())
            {
                let parts = class
                    .iter()
                    .map(|&(a, b)| cached(demands.file(a), b))
                    .collect::<Result<Vec<_>, _>>()?;
                values[c] = Some(xor_all(len, parts));
                known[c] = true;
            }
        }
        if known.iter().any(|k| !k) {
            let mut residual = broadcast.to_vec();
            for (r, row) in residual.iter_mut().enumerate() {
                for c in (0..num).filter(|&c| known[c]) {
                    row.add_scaled(p.get(r, c), values[c].as_ref().expect("known class"));
                }
            }
            let solved =
                solve_submatrix(p, &known, &residual).map_err(|e| undecodable(e.to_string()))?;
            for (c, w) in (0..num).filter(|&c| !known[c]).zip(solved) {
                values[c] = Some(w);
            }
        }

        let want = demands.file(user);
        (0..f)
            .map(|b| match self.pair_color(user, b) {
                None => cached(want, b).cloned(),
                Some(c) => {
                    let mut w = values[c].clone().expect("every class resolved");
                    for &(a2, b2) in &self.classes()[c] {
                        if (a2, b2) != (user, b) {
                            w.xor_assign(cached(demands.file(a2), b2)?);
                        }
                    }
                    Ok(w)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::schemes::{scheme_man, Delivery};

    fn library(files: usize, packets: usize, len: usize) -> Vec<Vec<Packet>> {
        (0..files)
            .map(|n| {
                (0..packets)
                    .map(|b| {
                        Packet(
                            (0..len)
                                .map(|i| (n * 31 + b * 7 + i * 3 + 1) as u8)
                                .collect(),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn every_user_recovers_its_file() {
        for delivery in [
            Delivery::PerColor,
            Delivery::Mds(Field::Gf2),
            Delivery::Mds(Field::Gf256),
        ] {
            let s = scheme_man(4, 2, delivery).unwrap();
            let lib = library(3, s.params().f, 5);
            let d = DemandVector::new(vec![0, 2, 2, 1], 3, 4).unwrap();
            let y = s.deliver(&d, &lib).unwrap();
            assert_eq!(y.len(), s.params().m);
            for user in 0..4 {
                let cache = s.cache_of(user, &lib);
                assert_eq!(s.decode(&d, &cache, &y).unwrap(), lib[d.file(user)]);
            }
        }
    }

    #[test]
    fn corrupted_broadcast_is_detected_or_misdecodes() {
        let s = scheme_man(3, 1, Delivery::PerColor).unwrap();
        let lib = library(3, s.params().f, 4);
        let d = DemandVector::new(vec![0, 1, 2], 3, 3).unwrap();
        let mut y = s.deliver(&d, &lib).unwrap();
        y[0].0[0] ^= 1;
        let ok = (0..3).all(|u| {
            s.decode(&d, &s.cache_of(u, &lib), &y)
                .is_ok_and(|f| f == lib[d.file(u)])
        });
        assert!(!ok);
        assert!(s.decode(&d, &s.cache_of(0, &lib), &y[1..]).is_err());
    }

    #[test]
    fn demand_validation() {
        assert!(DemandVector::new(vec![0, 3], 3, 2).is_err());
        assert!(DemandVector::new(vec![0], 3, 2).is_err());
    }
}
