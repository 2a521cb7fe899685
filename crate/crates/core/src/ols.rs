//! Orthogonal Latin squares and their perfect-tensor seeds.
//!
//! A pair `(A, B)` of order `d` maps to the 0/1 tensor with a unit at
//! `|c, r, a_rc, b_rc>` for every cell `(r, c)`: the first two slots carry
//! the cell's column and row, the last two the symbols written in it. With
//! this reading the order-3 table below becomes the seed
//! `|1123> + |1232> + |1311> + |2131> + |2213> + |2322> + |3112> + |3221> + |3333>`,
//! whose tangent space and exponential families are the ones tabulated for
//! `P(4,3)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{flatten, FlatteningId, Tensor4};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OlsPair {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<usize>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Square {
    A,
    B,
}

/// A single reason an [`OlsPair`] is not an orthogonal Latin square.
/// Rows and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Shape {
        expected: usize,
    },
    OutOfRange {
        square: Square,
        row: usize,
        col: usize,
        value: usize,
    },
    RowNotPermutation {
        square: Square,
        row: usize,
    },
    ColumnNotPermutation {
        square: Square,
        col: usize,
    },
    RepeatedPair {
        pair: (usize, usize),
        first: (usize, usize),
        second: (usize, usize),
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { expected } => write!(f, "squares must be {expected}x{expected}"),
            Violation::OutOfRange {
                square,
                row,
                col,
                value,
            } => {
                write!(f, "{square:?}[{row},{col}] = {value} is out of range")
            }
            Violation::RowNotPermutation { square, row } => {
                write!(f, "row {row} of {square:?} repeats a symbol")
            }
            Violation::ColumnNotPermutation { square, col } => {
                write!(f, "column {col} of {square:?} repeats a symbol")
            }
            Violation::RepeatedPair {
                pair,
                first,
                second,
            } => write!(
                f,
                "pair ({},{}) appears at cells {:?} and {:?}",
                pair.0, pair.1, first, second
            ),
        }
    }
}

fn parse_table(rows: &[&str]) -> OlsPair {
    let d = rows.len();
    let mut a = vec![vec![0; d]; d];
    let mut b = vec![vec![0; d]; d];
    for (r, line) in rows.iter().enumerate() {
        for (c, cell) in line.split_whitespace().enumerate() {
            let (x, y) = cell.split_once(',').expect("cell is `a,b`");
            a[r][c] = x.parse().expect("symbol");
            b[r][c] = y.parse().expect("symbol");
        }
    }
    OlsPair { d, a, b }
}

impl OlsPair {
    pub fn new(a: Vec<Vec<usize>>, b: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self { d: a.len(), a, b };
        p.validate().map_err(Error::InvalidOls)?;
        Ok(p)
    }

    /// The tabulated seeds for orders 3, 4 and 5.
    pub fn builtin(d: usize) -> Result<Self> {
        let rows: &[&str] = match d {
            3 => &["2,3 3,1 1,2", "3,2 1,3 2,1", "1,1 2,2 3,3"],
            4 => &[
                "1,1 2,3 3,4 4,2",
                "2,2 1,4 4,3 3,1",
                "3,3 4,1 1,2 2,4",
                "4,4 3,2 2,1 1,3",
            ],
            5 => &[
                "1,1 2,4 3,2 4,5 5,3",
                "2,2 3,5 4,3 5,1 1,4",
                "3,3 4,1 5,4 1,2 2,5",
                "4,4 5,2 1,5 2,3 3,1",
                "5,5 1,3 2,1 3,4 4,2",
            ],
            _ => return Err(Error::UnsupportedOrder(d)),
        };
        Ok(parse_table(rows))
    }

    /// `a_ij = i + j`, `b_ij = i + 2j` (mod d, shifted to 1..=d); orthogonal
    /// exactly when 2 is invertible mod d.
    pub fn cyclic(d: usize) -> Result<Self> {
        if d < 3 || d % 2 == 0 {
            return Err(Error::EvenOrder(d));
        }
        let a = (1..=d)
            .map(|i| (1..=d).map(|j| (i + j - 2) % d + 1).collect())
            .collect();
        let b = (1..=d)
            .map(|i| (1..=d).map(|j| (i + 2 * j - 3) % d + 1).collect())
            .collect();
        Ok(Self { d, a, b })
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let d = self.d;
        let mut out = Vec::new();
        let square_ok = |s: &Vec<Vec<usize>>| s.len() == d && s.iter().all(|r| r.len() == d);
        if d == 0 || !square_ok(&self.a) || !square_ok(&self.b) {
            return Err(vec![Violation::Shape { expected: d }]);
        }
        for (square, m) in [(Square::A, &self.a), (Square::B, &self.b)] {
            for r in 0..d {
                for c in 0..d {
                    let v = m[r][c];
                    if v == 0 || v > d {
                        out.push(Violation::OutOfRange {
                            square,
                            row: r + 1,
                            col: c + 1,
                            value: v,
                        });
                    }
                }
            }
            let is_perm = |vals: Vec<usize>| {
                let mut seen = vec![false; d + 1];
                vals.into_iter()
                    .all(|v| v >= 1 && v <= d && !std::mem::replace(&mut seen[v], true))
            };
            for r in 0..d {
                if !is_perm(m[r].clone()) {
                    out.push(Violation::RowNotPermutation { square, row: r + 1 });
                }
            }
            for c in 0..d {
                if !is_perm((0..d).map(|r| m[r][c]).collect()) {
                    out.push(Violation::ColumnNotPermutation { square, col: c + 1 });
                }
            }
        }
        let mut first_seen = std::collections::HashMap::new();
        for r in 0..d {
            for c in 0..d {
                let pair = (self.a[r][c], self.b[r][c]);
                if let Some(&first) = first_seen.get(&pair) {
                    out.push(Violation::RepeatedPair {
                        pair,
                        first,
                        second: (r + 1, c + 1),
                    });
                } else {
                    first_seen.insert(pair, (r + 1, c + 1));
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn to_tensor(&self) -> Result<Tensor4> {
        self.validate().map_err(Error::InvalidOls)?;
        let one = Complex64::new(1.0, 0.0);
        let mut entries = Vec::with_capacity(self.d * self.d);
        for r in 0..self.d {
            for c in 0..self.d {
                entries.push(([c, r, self.a[r][c] - 1, self.b[r][c] - 1], one));
            }
        }
        Tensor4::from_entries(self.d, entries)
    }

    /// Recovers the pair when all three flattenings of `t` are permutation
    /// matrices; `None` otherwise.
    pub fn from_tensor(t: &Tensor4) -> Option<Self> {
        const TOL: f64 = 1e-12;
        if !FlatteningId::ALL
            .iter()
            .all(|&f| flatten(t, f).is_permutation(TOL))
        {
            return None;
        }
        let d = t.d();
        let mut a = vec![vec![0; d]; d];
        let mut b = vec![vec![0; d]; d];
        for lin in t.support(0.5) {
            let [c, r, x, y] = crate::tensor::delinearize(d, lin);
            a[r][c] = x + 1;
            b[r][c] = y + 1;
        }
        let p = Self { d, a, b };
        p.validate().ok().map(|_| p)
    }
}

/// Paired-cell table, one line per row: `| 2,3 | 3,1 | 1,2 |`.
impl fmt::Display for OlsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.d.to_string().len() * 2 + 1;
        for r in 0..self.d {
            write!(f, "|")?;
            for c in 0..self.d {
                write!(
                    f,
                    " {:>width$} |",
                    format!("{},{}", self.a[r][c], self.b[r][c])
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::parse_ket;

    #[test]
    fn builtins_validate() {
        for d in 3..=5 {
            assert_eq!(OlsPair::builtin(d).unwrap().validate(), Ok(()));
        }
        assert!(matches!(
            OlsPair::builtin(6),
            Err(Error::UnsupportedOrder(6))
        ));
    }

    #[test]
    fn builtin_rows_match_tables() {
        let p3 = OlsPair::builtin(3).unwrap();
        assert_eq!(
            (p3.a[2].clone(), p3.b[2].clone()),
            (vec![1, 2, 3], vec![1, 2, 3])
        );
        let p4 = OlsPair::builtin(4).unwrap();
        assert_eq!(
            (p4.a[0].clone(), p4.b[0].clone()),
            (vec![1, 2, 3, 4], vec![1, 3, 4, 2])
        );
        let p5 = OlsPair::builtin(5).unwrap();
        assert_eq!(
            (p5.a[4].clone(), p5.b[4].clone()),
            (vec![5, 1, 2, 3, 4], vec![5, 3, 1, 4, 2])
        );
    }

    #[test]
    fn equal_squares_collide() {
        let p3 = OlsPair::builtin(3).unwrap();
        let bad = OlsPair {
            d: 3,
            a: p3.a.clone(),
            b: p3.a.clone(),
        };
        let errs = bad.validate().unwrap_err();
        assert!(errs
            .iter()
            .all(|v| matches!(v, Violation::RepeatedPair { .. })));
        assert_eq!(errs.len(), 6);
        assert!(matches!(bad.to_tensor(), Err(Error::InvalidOls(_))));
    }

    #[test]
    fn out_of_range_and_repeats_are_named() {
        let bad = OlsPair {
            d: 2,
            a: vec![vec![1, 3], vec![2, 2]],
            b: vec![vec![1, 2], vec![2, 1]],
        };
        let errs = bad.validate().unwrap_err();
        assert!(errs.contains(&Violation::OutOfRange {
            square: Square::A,
            row: 1,
            col: 2,
            value: 3
        }));
        assert!(errs.contains(&Violation::RowNotPermutation {
            square: Square::A,
            row: 2
        }));
        assert!(errs.contains(&Violation::ColumnNotPermutation {
            square: Square::A,
            col: 2
        }));
        let ragged = OlsPair {
            d: 2,
            a: vec![vec![1, 2]],
            b: vec![vec![1, 2], vec![2, 1]],
        };
        assert_eq!(
            ragged.validate(),
            Err(vec![Violation::Shape { expected: 2 }])
        );
    }

    #[test]
    fn cyclic_orders() {
        for d in [3, 5, 7, 9] {
            assert_eq!(OlsPair::cyclic(d).unwrap().validate(), Ok(()), "d={d}");
        }
        assert!(matches!(OlsPair::cyclic(4), Err(Error::EvenOrder(4))));
        assert!(OlsPair::cyclic(1).is_err());
    }

    #[test]
    fn order_three_seed_support() {
        let t = OlsPair::builtin(3).unwrap().to_tensor().unwrap();
        let mut expected: Vec<usize> = [
            "1123", "1232", "1311", "2131", "2213", "2322", "3112", "3221", "3333",
        ]
        .iter()
        .map(|k| crate::tensor::linearize(3, parse_ket(k).unwrap()))
        .collect();
        expected.sort();
        assert_eq!(t.support(0.0), expected);
    }

    #[test]
    fn listed_tensor_is_the_slot_swap() {
        // |1123>+|1231>+|1312>+... (cell coordinates read row-first) is the
        // image of our seed under exchanging the first two slots.
        let t = OlsPair::builtin(3).unwrap().to_tensor().unwrap();
        let listed = [
            "1123", "1231", "1312", "2132", "2213", "2321", "3111", "3222", "3333",
        ];
        for k in listed {
            let [a, b, c, e] = parse_ket(k).unwrap();
            assert_eq!(t.get([b, a, c, e]), Complex64::new(1.0, 0.0), "{k}");
        }
    }

    #[test]
    fn tensor_round_trip() {
        for p in [
            OlsPair::builtin(3).unwrap(),
            OlsPair::builtin(4).unwrap(),
            OlsPair::cyclic(7).unwrap(),
        ] {
            assert_eq!(OlsPair::from_tensor(&p.to_tensor().unwrap()), Some(p));
        }
        assert_eq!(OlsPair::from_tensor(&Tensor4::zeros(3)), None);
    }

    #[test]
    fn phase_decorated_seed_is_not_ols_form() {
        let mut t = OlsPair::builtin(3).unwrap().to_tensor().unwrap();
        t.set(parse_ket("3333").unwrap(), Complex64::from_polar(1.0, 0.3));
        assert_eq!(OlsPair::from_tensor(&t), None);
    }

    #[test]
    fn table_display() {
        let s = OlsPair::builtin(3).unwrap().to_string();
        assert_eq!(s.lines().next().unwrap(), "| 2,3 | 3,1 | 1,2 |");
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_value(OlsPair::builtin(3).unwrap()).unwrap();
        assert_eq!(json["d"], 3);
        assert_eq!(json["A"][0], serde_json::json!([2, 3, 1]));
        assert_eq!(json["B"][0], serde_json::json!([3, 1, 2]));
    }
}
