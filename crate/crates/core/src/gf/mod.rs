//! Field arithmetic, MDS matrices and packet kernels for delivery.

pub mod field;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::Field;

/// Largest row count [`verify_mds`] enumerates minors for.
pub const VERIFY_ROW_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("dimension: {0}")]
    Dimension(String),
    #[error("no binary MDS matrix of size {m}x{n}")]
    NoBinaryMds { m: usize, n: usize },
    #[error("GF(256) Cauchy construction needs m + n <= 256, got {m} + {n}")]
    FieldTooSmall { m: usize, n: usize },
    #[error("{rows} rows exceed the minor-enumeration limit {limit}")]
    TooLarge { rows: usize, limit: usize },
    #[error("packet length mismatch: {0}")]
    LengthMismatch(String),
    #[error("{unknowns} unknown columns but only rank {rank} available")]
    Underdetermined { unknowns: usize, rank: usize },
    #[error("received rows are inconsistent with the known columns")]
    Inconsistent,
    #[error("entry {0} is outside the field")]
    OutOfField(u8),
}

/// A packet: a fixed-length byte string.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Packet(pub Vec<u8>);

impl Packet {
    pub fn zeros(len: usize) -> Self {
        Packet(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn xor_assign(&mut self, other: &Packet) {
        field::add_scaled(&mut self.0, 1, &other.0);
    }

    pub fn add_scaled(&mut self, coef: u8, other: &Packet) {
        field::add_scaled(&mut self.0, coef, &other.0);
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

impl fmt::Debug for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Packet(")?;
        for b in self.0.iter().take(8) {
            write!(f, "{b:02x}")?;
        }
        if self.0.len() > 8 {
            write!(f, "..")?;
        }
        write!(f, "; {})", self.0.len())
    }
}

/// XOR of a set of packets of one length.
pub fn xor_all<'a, I: IntoIterator<Item = &'a Packet>>(len: usize, packets: I) -> Packet {
    let mut acc = Packet::zeros(len);
    for p in packets {
        acc.xor_assign(p);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<u8>>) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GfError::Dimension("ragged rows".into()));
        }
        if let Some(&bad) = rows.iter().flatten().find(|&&v| !field.contains(v)) {
            return Err(GfError::OutOfField(bad));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// `[I | 1]` over GF(2): the `n-1` by `n` single-parity generator.
    pub fn parity_gf2(n: usize) -> Self {
        let m = n.saturating_sub(1);
        let mut p = Matrix::zeros(Field::Gf2, m, n);
        for i in 0..m {
            p.set(i, i, 1);
            p.set(i, n - 1, 1);
        }
        p
    }

    /// `n-1` by `n` over GF(2) with ones at `(i, i)` and `(i, i+1)`. Same
    /// row space as [`Matrix::parity_gf2`].
    pub fn banded_gf2(n: usize) -> Self {
        let m = n.saturating_sub(1);
        let mut p = Matrix::zeros(Field::Gf2, m, n);
        for i in 0..m {
            p.set(i, i, 1);
            p.set(i, i + 1, 1);
        }
        p
    }

    /// Cauchy matrix `1 / (x_i + y_j)` with `x_i = i`, `y_j = m + j`.
    pub fn cauchy(m: usize, n: usize) -> Result<Self, GfError> {
        if m + n > 256 {
            return Err(GfError::FieldTooSmall { m, n });
        }
        let mut p = Matrix::zeros(Field::Gf256, m, n);
        for i in 0..m {
            for j in 0..n {
                p.set(i, j, field::inv(i as u8 ^ (m + j) as u8));
            }
        }
        Ok(p)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Rank of the submatrix on `cols`, by elimination.
    pub fn rank_of_columns(&self, cols: &[usize]) -> usize {
        let mut a: Vec<Vec<u8>> = (0..self.rows)
            .map(|r| cols.iter().map(|&c| self.get(r, c)).collect())
            .collect();
        rank_in_place(&mut a)
    }

    pub fn rank(&self) -> usize {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.rank_of_columns(&cols)
    }

    /// True when both matrices have the same row space.
    pub fn same_row_space(&self, other: &Matrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let r = self.rank();
        if r != other.rank() {
            return false;
        }
        let mut stacked = self.to_rows();
        stacked.extend(other.to_rows());
        rank_in_place(&mut stacked) == r
    }
}

fn rank_in_place(a: &mut [Vec<u8>]) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = field::inv(a[rank][c]);
        field::scale(&mut a[rank], inv);
        let pivot = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c];
                field::add_scaled(row, f, &pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// An `m` by `n` MDS matrix.
///
/// Square requests give the identity. Over GF(2) only `m` in `{1, n-1, n}`
/// exists: `m = n-1` is `[I | 1]` and `m = 1` the all-ones row. Over
/// GF(256) the Cauchy construction is used.
pub fn mds_matrix(m: usize, n: usize, field: Field) -> Result<Matrix, GfError> {
    if m > n {
        return Err(GfError::Dimension(format!("{m} rows exceed {n} columns")));
    }
    if m == n {
        return Ok(Matrix::identity(field, n));
    }
    if m == 0 {
        return Ok(Matrix::zeros(field, 0, n));
    }
    match field {
        Field::Gf2 if m + 1 == n => Ok(Matrix::parity_gf2(n)),
        Field::Gf2 if m == 1 => Matrix::from_rows(Field::Gf2, vec![vec![1; n]]),
        Field::Gf2 => Err(GfError::NoBinaryMds { m, n }),
        Field::Gf256 => Matrix::cauchy(m, n),
    }
}

/// True iff every `rows x rows` submatrix is invertible.
pub fn verify_mds(p: &Matrix) -> Result<bool, GfError> {
    if p.rows > VERIFY_ROW_LIMIT {
        return Err(GfError::TooLarge {
            rows: p.rows,
            limit: VERIFY_ROW_LIMIT,
        });
    }
    if p.rows > p.cols {
        return Err(GfError::Dimension(format!(
            "{} rows exceed {} columns",
            p.rows, p.cols
        )));
    }
    let mut cols: Vec<usize> = (0..p.rows).collect();
    loop {
        if p.rank_of_columns(&cols) < p.rows {
            return Ok(false);
        }
        // Next combination in lexicographic order.
        let k = cols.len();
        let Some(i) = (0..k).rev().find(|&i| cols[i] < p.cols - k + i) else {
            return Ok(true);
        };
        cols[i] += 1;
        for j in i + 1..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

fn check_lengths(packets: &[Packet]) -> Result<usize, GfError> {
    let len = packets.first().map_or(0, Packet::len);
    match packets.iter().position(|p| p.len() != len) {
        Some(i) => Err(GfError::LengthMismatch(format!(
            "packet {i} has {} bytes, expected {len}",
            packets[i].len()
        ))),
        None => Ok(len),
    }
}

/// `P · V`: row `i` is `Σ_j P[i][j] · V[j]`.
pub fn combine(p: &Matrix, v: &[Packet]) -> Result<Vec<Packet>, GfError> {
    if v.len() != p.cols {
        return Err(GfError::LengthMismatch(format!(
            "{} packets for {} columns",
            v.len(),
            p.cols
        )));
    }
    let len = check_lengths(v)?;
    Ok((0..p.rows)
        .map(|r| {
            let mut acc = Packet::zeros(len);
            for (c, packet) in v.iter().enumerate() {
                acc.add_scaled(p.get(r, c), packet);
            }
            acc
        })
        .collect())
}

/// Recovers the packets of the columns not in `known`, given the received
/// rows with the known columns' contribution already removed. Returns them
/// in increasing column order.
pub fn solve_submatrix(
    p: &Matrix,
    known: &[bool],
    received: &[Packet],
) -> Result<Vec<Packet>, GfError> {
    if known.len() != p.cols {
        return Err(GfError::Dimension(format!(
            "mask of {} for {} columns",
            known.len(),
            p.cols
        )));
    }
    if received.len() != p.rows {
        return Err(GfError::Dimension(format!(
            "{} received rows for {} matrix rows",
            received.len(),
            p.rows
        )));
    }
    let len = check_lengths(received)?;
    let unknown: Vec<usize> = (0..p.cols).filter(|&c| !known[c]).collect();
    let u = unknown.len();
    if u > p.rows {
        return Err(GfError::Underdetermined {
            unknowns: u,
            rank: p.rows,
        });
    }
    let mut coef: Vec<Vec<u8>> = (0..p.rows)
        .map(|r| unknown.iter().map(|&c| p.get(r, c)).collect())
        .collect();
    let mut rhs: Vec<Packet> = received.to_vec();
    let mut rank = 0;
    for c in 0..u {
        let Some(piv) = (rank..p.rows).find(|&r| coef[r][c] != 0) else {
            return Err(GfError::Underdetermined { unknowns: u, rank });
        };
        coef.swap(rank, piv);
        rhs.swap(rank, piv);
        let inv = field::inv(coef[rank][c]);
        field::scale(&mut coef[rank], inv);
        field::scale(&mut rhs[rank].0, inv);
        let (pc, pr) = (coef[rank].clone(), rhs[rank].clone());
        for r in 0..p.rows {
            if r != rank && coef[r][c] != 0 {
                let f = coef[r][c];
                field::add_scaled(&mut coef[r], f, &pc);
                rhs[r].add_scaled(f, &pr);
            }
        }
        rank += 1;
    }
    if rhs[rank..].iter().any(|r| !r.is_zero()) {
        return Err(GfError::Inconsistent);
    }
    rhs.truncate(u);
    debug_assert!(rhs.iter().all(|r| r.len() == len));
    Ok(rhs)
}

/// Serialized form: a field tag plus a 2-D integer array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub field: Field,
    pub cols: usize,
    pub rows: Vec<Vec<u8>>,
}

impl From<&Matrix> for MatrixDoc {
    fn from(m: &Matrix) -> Self {
        MatrixDoc {
            field: m.field,
            cols: m.cols,
            rows: m.to_rows(),
        }
    }
}

impl TryFrom<MatrixDoc> for Matrix {
    type Error = GfError;

    fn try_from(doc: MatrixDoc) -> Result<Self, GfError> {
        if doc.rows.is_empty() {
            return Ok(Matrix::zeros(doc.field, 0, doc.cols));
        }
        let m = Matrix::from_rows(doc.field, doc.rows)?;
        if m.cols != doc.cols {
            return Err(GfError::Dimension(format!(
                "declared {} columns, rows have {}",
                doc.cols, m.cols
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_packets(rng: &mut ChaCha8Rng, count: usize, len: usize) -> Vec<Packet> {
        (0..count)
            .map(|_| Packet((0..len).map(|_| rng.gen()).collect()))
            .collect()
    }

    #[test]
    fn binary_parity_matrix() {
        let p = mds_matrix(3, 4, Field::Gf2).unwrap();
        assert_eq!(
            p.to_rows(),
            vec![vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]
        );
        assert!(verify_mds(&p).unwrap());
        assert_eq!(
            mds_matrix(4, 4, Field::Gf2).unwrap(),
            Matrix::identity(Field::Gf2, 4)
        );
        assert_eq!(
            mds_matrix(3, 3, Field::Gf256).unwrap(),
            Matrix::identity(Field::Gf256, 3)
        );
        assert_eq!(
            mds_matrix(2, 5, Field::Gf2),
            Err(GfError::NoBinaryMds { m: 2, n: 5 })
        );
        assert!(matches!(
            mds_matrix(5, 4, Field::Gf2),
            Err(GfError::Dimension(_))
        ));
        assert!(verify_mds(&mds_matrix(1, 6, Field::Gf2).unwrap()).unwrap());
    }

    #[test]
    fn cauchy_minors() {
        let p = mds_matrix(2, 4, Field::Gf256).unwrap();
        // All six 2x2 minors, computed directly as ad - bc.
        let mut minors = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                let det =
                    field::mul(p.get(0, i), p.get(1, j)) ^ field::mul(p.get(0, j), p.get(1, i));
                assert_ne!(det, 0, "minor on columns {i},{j}");
                minors += 1;
            }
        }
        assert_eq!(minors, 6);
        assert!(verify_mds(&mds_matrix(4, 8, Field::Gf256).unwrap()).unwrap());
        for m in 1..=6 {
            for n in m..=9 {
                assert!(
                    verify_mds(&mds_matrix(m, n, Field::Gf256).unwrap()).unwrap(),
                    "{m}x{n}"
                );
            }
        }
        assert!(matches!(
            Matrix::cauchy(200, 100),
            Err(GfError::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn non_mds_detected() {
        assert!(!verify_mds(&Matrix::zeros(Field::Gf2, 2, 3)).unwrap());
        let p = Matrix::from_rows(Field::Gf2, vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        // Columns 0 and 2 alone: [[1,0],[0,1]] fine; columns 0,1: [[1,1],[0,1]] fine; 1,2 fine.
        assert!(verify_mds(&p).unwrap());
        let q = Matrix::from_rows(Field::Gf2, vec![vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        assert!(!verify_mds(&q).unwrap());
        assert!(matches!(
            verify_mds(&Matrix::zeros(Field::Gf2, 13, 13)),
            Err(GfError::TooLarge { .. })
        ));
    }

    #[test]
    fn banded_is_mds_and_equivalent_to_parity() {
        for n in 2..=10 {
            let b = Matrix::banded_gf2(n);
            assert!(verify_mds(&b).unwrap());
            assert!(b.same_row_space(&Matrix::parity_gf2(n)));
        }
        assert!(!Matrix::identity(Field::Gf2, 3).same_row_space(&Matrix::parity_gf2(3)));
    }

    #[test]
    fn combine_examples() {
        let v: Vec<Packet> = (1..=4u8).map(|i| Packet(vec![i, i << 4])).collect();
        let out = combine(&mds_matrix(3, 4, Field::Gf2).unwrap(), &v).unwrap();
        assert_eq!(
            out,
            vec![
                Packet(vec![1 ^ 4, 0x10 ^ 0x40]),
                Packet(vec![2 ^ 4, 0x20 ^ 0x40]),
                Packet(vec![3 ^ 4, 0x30 ^ 0x40])
            ]
        );
        assert_eq!(combine(&Matrix::identity(Field::Gf2, 4), &v).unwrap(), v);
        assert!(matches!(
            combine(&Matrix::identity(Field::Gf2, 3), &v),
            Err(GfError::LengthMismatch(_))
        ));
        let ragged = vec![Packet(vec![1]), Packet(vec![1, 2])];
        assert!(matches!(
            combine(&Matrix::identity(Field::Gf2, 2), &ragged),
            Err(GfError::LengthMismatch(_))
        ));
    }

    #[test]
    fn combine_matches_scalar_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rows: Vec<Vec<u8>> = (0..2)
                .map(|_| (0..3).map(|_| rng.gen()).collect())
                .collect();
            let p = Matrix::from_rows(Field::Gf256, rows.clone()).unwrap();
            let v = random_packets(&mut rng, 3, 16);
            let got = combine(&p, &v).unwrap();
            for (r, row) in rows.iter().enumerate() {
                for byte in 0..16 {
                    // Independent path: Russian-peasant multiply per byte.
                    let mut acc = 0u8;
                    for c in 0..3 {
                        let (mut a, mut b, mut prod) = (row[c], v[c].0[byte], 0u8);
                        while b != 0 {
                            if b & 1 != 0 {
                                prod ^= a;
                            }
                            a = if a & 0x80 != 0 {
                                (a << 1) ^ 0x1d
                            } else {
                                a << 1
                            };
                            b >>= 1;
                        }
                        acc ^= prod;
                    }
                    assert_eq!(got[r].0[byte], acc);
                }
            }
        }
    }

    #[test]
    fn solve_recovers_unknown_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for field in [Field::Gf2, Field::Gf256] {
            let p = mds_matrix(3, 4, field).unwrap();
            let v = random_packets(&mut rng, 4, 32);
            let sent = combine(&p, &v).unwrap();
            for missing in 0..4 {
                let known: Vec<bool> = (0..4).map(|c| c != missing).collect();
                let mut residual = sent.clone();
                for (r, row) in residual.iter_mut().enumerate() {
                    for c in (0..4).filter(|&c| known[c]) {
                        row.add_scaled(p.get(r, c), &v[c]);
                    }
                }
                assert_eq!(
                    solve_submatrix(&p, &known, &residual).unwrap(),
                    vec![v[missing].clone()]
                );
            }
        }
        let p = mds_matrix(3, 4, Field::Gf2).unwrap();
        let zero = vec![Packet::zeros(4); 3];
        assert_eq!(solve_submatrix(&p, &[true; 4], &zero).unwrap(), vec![]);
        assert!(matches!(
            solve_submatrix(&p, &[false; 4], &zero),
            Err(GfError::Underdetermined {
                unknowns: 4,
                rank: 3
            })
        ));
    }

    #[test]
    fn matrix_doc_round_trip() {
        let p = mds_matrix(2, 5, Field::Gf256).unwrap();
        let doc = MatrixDoc::from(&p);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.starts_with("{\"field\":\"gf256\""));
        let back: MatrixDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(Matrix::try_from(back).unwrap(), p);
        assert!(Matrix::from_rows(Field::Gf2, vec![vec![2]]).is_err());
    }
}
