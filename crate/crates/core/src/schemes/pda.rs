use std::collections::BTreeMap;
use std::fmt;

use super::{CachingScheme, Delivery, SchemeError};
use crate::universe::{int_range, subsets, Coloring, CombineOp, Element, SigmaStructure, Universe};

/// Placement delivery array: `F` rows (packets) by `K` columns (users).
/// `None` is `*` (cached); `Some(s)` is a transmission color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    grid: Vec<Vec<Option<i64>>>,
}

fn cell(f: usize, k: usize) -> String {
    format!("({},{})", f + 1, k + 1)
}

impl Pda {
    pub fn new(grid: Vec<Vec<Option<i64>>>) -> Result<Self, SchemeError> {
        let cols = grid.first().map_or(0, Vec::len);
        if grid.is_empty() || cols == 0 {
            return Err(SchemeError::Parse("empty array".into()));
        }
        if let Some(r) = grid.iter().position(|row| row.len() != cols) {
            return Err(SchemeError::Parse(format!(
                "row {} has {} cells, expected {cols}",
                r + 1,
                grid[r].len()
            )));
        }
        Ok(Pda { grid })
    }

    /// Rows of whitespace-separated `*` or integer tokens. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, SchemeError> {
        let grid = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| {
                line.split_whitespace()
                    .map(|tok| match tok {
                        "*" => Ok(None),
                        _ => tok
                            .parse::<i64>()
                            .map(Some)
                            .map_err(|_| SchemeError::Parse(format!("bad token {tok:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Pda::new(grid)
    }

    /// The classic array: rows are the `t`-subsets of `[K]`, cell `(T, k)` is
    /// `*` when `k ∈ T` and otherwise the 1-based rank of `T ∪ {k}` among
    /// the `(t+1)`-subsets.
    pub fn man(users: usize, t: usize) -> Result<Self, SchemeError> {
        if t == 0 || t >= users {
            return Err(SchemeError::Range(format!(
                "need 1 <= t < K, got t={t}, K={users}"
            )));
        }
        let rank: BTreeMap<Element, i64> = subsets(users as i64, t + 1)
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, i as i64 + 1))
            .collect();
        let grid = subsets(users as i64, t)
            .iter()
            .map(|row| {
                let members = row.as_set().expect("subset");
                (1..=users as i64)
                    .map(|k| {
                        let user = Element::Int(k);
                        if members.contains(&user) {
                            None
                        } else {
                            let mut s = members.clone();
                            s.insert(user);
                            Some(rank[&Element::Set(s)])
                        }
                    })
                    .collect()
            })
            .collect();
        Pda::new(grid)
    }

    pub fn rows(&self) -> usize {
        self.grid.len()
    }

    pub fn cols(&self) -> usize {
        self.grid[0].len()
    }

    pub fn get(&self, f: usize, k: usize) -> Option<i64> {
        self.grid[f][k]
    }

    pub fn grid(&self) -> &[Vec<Option<i64>>] {
        &self.grid
    }

    /// Checks the three axioms, reporting the first violation found.
    pub fn validate(&self) -> Result<(), SchemeError> {
        let (rows, cols) = (self.rows(), self.cols());
        let colored: Vec<(usize, usize, i64)> = (0..rows)
            .flat_map(|f| (0..cols).filter_map(move |k| self.grid[f][k].map(|s| (f, k, s))))
            .collect();
        for (i, &(f1, k1, s1)) in colored.iter().enumerate() {
            for &(f2, k2, s2) in &colored[i + 1..] {
                if s1 != s2 {
                    continue;
                }
                let cells = format!("{} and {}", cell(f1, k1), cell(f2, k2));
                if f1 == f2 || k1 == k2 {
                    return Err(SchemeError::PdaInvalid { axiom: "C1", cells });
                }
                if self.grid[f1][k2].is_some() || self.grid[f2][k1].is_some() {
                    return Err(SchemeError::PdaInvalid { axiom: "C2", cells });
                }
            }
        }
        let stars: Vec<usize> = (0..cols)
            .map(|k| (0..rows).filter(|&f| self.grid[f][k].is_none()).count())
            .collect();
        if let Some(k) = stars.iter().position(|&z| z != stars[0]) {
            return Err(SchemeError::PdaInvalid {
                axiom: "constant * count",
                cells: format!(
                    "column 1 has {} stars, column {} has {}",
                    stars[0],
                    k + 1,
                    stars[k]
                ),
            });
        }
        Ok(())
    }

    /// Columns become users `1..=K`, rows packets `1..=F`, combined by
    /// Cartesian pair; colored cells keep their integer as the class label.
    pub fn to_scheme(&self, delivery: Delivery) -> Result<CachingScheme, SchemeError> {
        self.validate()?;
        let universe = Universe::build(
            int_range(1, self.cols() as i64),
            int_range(1, self.rows() as i64),
            CombineOp::CartesianPair,
        )?;
        let entries = (0..self.rows()).flat_map(|f| {
            (0..self.cols()).filter_map(move |k| {
                self.grid[f][k].map(|s| (Element::int_pair(k as i64 + 1, f as i64 + 1), s))
            })
        });
        let coloring = Coloring::from_keys(entries, |s| s.to_string());
        CachingScheme::build(universe, coloring, &SigmaStructure::PdaStrongEdge, delivery)
    }

    /// Reads a scheme back as an array: cached pairs are `*`, colored ones
    /// carry their class label when every label is an integer, otherwise the
    /// class id.
    pub fn from_scheme(scheme: &CachingScheme) -> Result<Self, SchemeError> {
        let numeric: Option<Vec<i64>> = scheme
            .class_labels()
            .iter()
            .map(|l| l.parse().ok())
            .collect();
        let (k, f) = (scheme.params().k, scheme.params().f);
        let grid = (0..f)
            .map(|b| {
                (0..k)
                    .map(|a| {
                        scheme.pair_color(a, b).map(|c| match &numeric {
                            Some(labels) => labels[c],
                            None => c as i64,
                        })
                    })
                    .collect()
            })
            .collect();
        Pda::new(grid)
    }
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.grid {
            let toks: Vec<String> = row
                .iter()
                .map(|c| c.map_or_else(|| "*".to_string(), |s| s.to_string()))
                .collect();
            writeln!(f, "{}", toks.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::rational::Rational;

    #[test]
    fn man_array_is_valid_and_round_trips() {
        let p = Pda::man(4, 2).unwrap();
        assert_eq!((p.rows(), p.cols()), (6, 4));
        p.validate().unwrap();
        let s = p.to_scheme(Delivery::PerColor).unwrap();
        assert_eq!(s.params().colors, 4);
        assert_eq!(s.params().f, 6);
        assert_eq!(s.params().rate, Rational::new(2, 3));
        assert_eq!(Pda::from_scheme(&s).unwrap(), p);
        assert_eq!(Pda::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn all_star_array_has_zero_rate() {
        let p = Pda::parse("* *\n* *\n").unwrap();
        let s = p.to_scheme(Delivery::Mds(Field::Gf2)).unwrap();
        assert_eq!(s.params().rate, Rational::from_integer(0));
    }

    #[test]
    fn axiom_violations_name_cells() {
        let e = Pda::parse("1 1\n* *").unwrap().validate().unwrap_err();
        assert_eq!(
            e,
            SchemeError::PdaInvalid {
                axiom: "C1",
                cells: "(1,1) and (1,2)".into()
            }
        );
        let e = Pda::parse("1 2\n3 1").unwrap().validate().unwrap_err();
        assert!(matches!(e, SchemeError::PdaInvalid { axiom: "C2", .. }));
        let e = Pda::parse("* 1\n* *").unwrap().validate().unwrap_err();
        assert!(matches!(
            e,
            SchemeError::PdaInvalid {
                axiom: "constant * count",
                ..
            }
        ));
        assert!(matches!(Pda::parse("1 x"), Err(SchemeError::Parse(_))));
        assert!(matches!(Pda::parse("1 2\n3"), Err(SchemeError::Parse(_))));
        assert!(matches!(Pda::parse(""), Err(SchemeError::Parse(_))));
    }

    #[test]
    fn labels_survive_arbitrary_integers() {
        let p = Pda::parse("# comment\n* 7 -3\n7 * 9\n-3 9 *").unwrap();
        let s = p.to_scheme(Delivery::PerColor).unwrap();
        assert_eq!(Pda::from_scheme(&s).unwrap(), p);
    }
}
