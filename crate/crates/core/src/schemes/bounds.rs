use crate::rational::Rational;

/// Cut-set lower bound on the worst-case rate:
/// `max_{1 <= s <= min(N, K)} (s - s / floor(N / s) * M)`, floored at zero.
pub fn cutset_bound(users: usize, files: usize, cache: Rational) -> Rational {
    (1..=users.min(files))
        .map(|s| {
            let s = s as i64;
            Rational::from_integer(s) - Rational::new(s, files as i64 / s) * cache
        })
        .fold(Rational::from_integer(0), Ord::max)
}

/// Rate of the classic subset scheme with per-color delivery:
/// `K (1 - t/K) / (t + 1)`.
pub fn man_rate(users: usize, t: usize) -> Rational {
    Rational::new((users - t) as i64, (t + 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn cutset_values() {
        assert_eq!(cutset_bound(4, 4, r(1, 1)), r(1, 1));
        assert_eq!(cutset_bound(4, 4, r(0, 1)), r(4, 1));
        assert_eq!(cutset_bound(4, 4, r(4, 1)), r(0, 1));
        assert_eq!(cutset_bound(4, 4, r(2, 1)), r(1, 2));
    }

    #[test]
    fn man_closed_form() {
        assert_eq!(man_rate(4, 2), r(2, 3));
        assert_eq!(man_rate(5, 2), r(1, 1));
        assert_eq!(man_rate(6, 3), r(3, 4));
    }
}
