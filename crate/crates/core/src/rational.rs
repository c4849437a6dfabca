//! Exact rational quantities (rates, loads, cache fractions).

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

pub fn ratio(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `"5/36"`, or `"2"` for integers.
pub fn exact(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal with at most four fractional digits, trailing zeros trimmed.
pub fn decimal(r: Rational) -> String {
    let s = format!("{:.4}", to_f64(r));
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Serde adapter that stores a rational as an `"a/b"` string.
pub mod as_string {
    use super::{exact, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&exact(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rational>().map_err(D::Error::custom)
    }
}
