//! GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d).
//! GF(2) is the subfield {0, 1}, so one set of kernels serves both.

use serde::{Deserialize, Serialize};

pub const POLY: u16 = 0x11d;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Gf2,
    Gf256,
}

impl Field {
    pub fn contains(self, v: u8) -> bool {
        match self {
            Field::Gf2 => v <= 1,
            Field::Gf256 => true,
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::Gf2 => "gf2",
            Field::Gf256 => "gf256",
        })
    }
}

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= POLY;
        }
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

#[inline]
pub fn add(a: u8, b: u8) -> u8 {
    a ^ b
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    TABLES.exp[TABLES.log[a as usize] as usize + TABLES.log[b as usize] as usize]
}

/// Multiplicative inverse; panics on zero.
#[inline]
pub fn inv(a: u8) -> u8 {
    assert!(a != 0, "zero has no inverse");
    TABLES.exp[255 - TABLES.log[a as usize] as usize]
}

#[inline]
pub fn div(a: u8, b: u8) -> u8 {
    mul(a, inv(b))
}

/// `dst += coef * src`, bytewise.
pub fn add_scaled(dst: &mut [u8], coef: u8, src: &[u8]) {
    match coef {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
        _ => {
            let lc = TABLES.log[coef as usize] as usize;
            for (d, &s) in dst.iter_mut().zip(src) {
                if s != 0 {
                    *d ^= TABLES.exp[lc + TABLES.log[s as usize] as usize];
                }
            }
        }
    }
}

pub fn scale(buf: &mut [u8], coef: u8) {
    if coef == 1 {
        return;
    }
    buf.iter_mut().for_each(|b| *b = mul(*b, coef));
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Carry-less shift-and-add multiply with reduction, no tables.
    fn mul_reference(mut a: u8, mut b: u8) -> u8 {
        let mut acc = 0u8;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            let carry = a & 0x80 != 0;
            a <<= 1;
            if carry {
                a ^= (POLY & 0xff) as u8;
            }
            b >>= 1;
        }
        acc
    }

    #[test]
    fn table_multiply_matches_reference_on_all_pairs() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(mul(a, b), mul_reference(a, b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn inverses_and_axioms() {
        for a in 1..=255u8 {
            assert_eq!(mul(a, inv(a)), 1);
            assert_eq!(div(mul(a, 7), 7), a);
        }
        for a in [0u8, 1, 2, 0x53, 0xca, 0xff] {
            for b in [0u8, 1, 3, 0x8e, 0xfe] {
                for c in [1u8, 5, 0x1d] {
                    assert_eq!(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
                    assert_eq!(mul(mul(a, b), c), mul(a, mul(b, c)));
                }
            }
        }
        assert!(Field::Gf2.contains(1) && !Field::Gf2.contains(2));
    }

    #[test]
    fn scaled_accumulate() {
        let mut d = vec![1u8, 2, 3];
        add_scaled(&mut d, 1, &[1, 2, 3]);
        assert_eq!(d, vec![0, 0, 0]);
        add_scaled(&mut d, 3, &[1, 0, 2]);
        assert_eq!(d, vec![3, 0, mul(3, 2)]);
    }
}
