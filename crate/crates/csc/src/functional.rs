//! Finite oracle-axiom tables standing in for Turing functionals.
//!
//! An axiom `(e, σ, x, y)` says that `Φ_e^X(x) = y` with use `|σ|` for every
//! oracle `X` extending `σ`. Anything not covered by an axiom diverges.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Axiom {
    pub e: u64,
    pub oracle: Vec<bool>,
    pub x: u64,
    pub y: u64,
}

impl Axiom {
    pub fn new(e: u64, oracle: &str, x: u64, y: u64) -> Self {
        Axiom { e, oracle: parse_bits(oracle).expect("oracle string must be 0/1"), x, y }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.e, bits_to_string(&self.oracle), self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Converges { value: u64, use_: usize },
    Diverges,
}

impl Outcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            Outcome::Converges { value, .. } => Some(*value),
            Outcome::Diverges => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("inconsistent table: `{0}` and `{1}`")]
    Inconsistent(Axiom, Axiom),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Axiom>", into = "Vec<Axiom>")]
pub struct FunctionalTable {
    axioms: Vec<Axiom>,
    #[serde(skip)]
    by_input: HashMap<(u64, u64), Vec<usize>>,
}

impl From<Vec<Axiom>> for FunctionalTable {
    fn from(axioms: Vec<Axiom>) -> Self {
        FunctionalTable::new(axioms)
    }
}

impl From<FunctionalTable> for Vec<Axiom> {
    fn from(t: FunctionalTable) -> Self {
        t.axioms
    }
}

fn compatible(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(p, q)| p == q)
}

impl FunctionalTable {
    pub fn new(axioms: Vec<Axiom>) -> Self {
        let mut by_input: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
        for (i, a) in axioms.iter().enumerate() {
            by_input.entry((a.e, a.x)).or_default().push(i);
        }
        FunctionalTable { axioms, by_input }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// Functional indices mentioned by some axiom.
    pub fn indices(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.axioms.iter().map(|a| a.e).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// First offending pair in axiom order, if any.
    pub fn check_consistency(&self) -> Option<(Axiom, Axiom)> {
        let mut keys: Vec<&(u64, u64)> = self.by_input.keys().collect();
        keys.sort();
        let mut worst: Option<(usize, usize)> = None;
        for key in keys {
            let idx = &self.by_input[key];
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a + 1..] {
                    let (p, q) = (&self.axioms[i], &self.axioms[j]);
                    if p.y != q.y && compatible(&p.oracle, &q.oracle) {
                        let cand = (i.min(j), i.max(j));
                        if worst.is_none_or(|w| cand < w) {
                            worst = Some(cand);
                        }
                    }
                }
            }
        }
        worst.map(|(i, j)| (self.axioms[i].clone(), self.axioms[j].clone()))
    }

    pub fn ensure_consistent(&self) -> Result<(), TableError> {
        match self.check_consistency() {
            Some((a, b)) => Err(TableError::Inconsistent(a, b)),
            None => Ok(()),
        }
    }

    /// `Φ_e^oracle(x)`. Among matching axioms the shortest use is reported.
    pub fn apply(&self, e: u64, oracle: &[bool], x: u64) -> Result<Outcome, TableError> {
        let Some(idx) = self.by_input.get(&(e, x)) else {
            return Ok(Outcome::Diverges);
        };
        let mut best: Option<&Axiom> = None;
        for &i in idx {
            let a = &self.axioms[i];
            if a.oracle.len() > oracle.len() || !compatible(&a.oracle, oracle) {
                continue;
            }
            match best {
                Some(b) if b.y != a.y => return Err(TableError::Inconsistent(b.clone(), a.clone())),
                Some(b) if b.oracle.len() <= a.oracle.len() => {}
                _ => best = Some(a),
            }
        }
        Ok(match best {
            Some(a) => Outcome::Converges { value: a.y, use_: a.oracle.len() },
            None => Outcome::Diverges,
        })
    }
}

impl FunctionalTable {
    /// `Φ_e(x)[s]`: run on the all-zero oracle of length `s`, so the use is
    /// at most `s`; inputs and outputs must also lie below `s`.
    pub fn apply_at_stage(&self, e: u64, x: u64, s: u64) -> Result<Option<u64>, TableError> {
        if e >= s || x >= s {
            return Ok(None);
        }
        let longest = self.axioms.iter().map(|a| a.oracle.len()).max().unwrap_or(0);
        let out = self.apply(e, &vec![false; longest.min(s as usize)], x)?;
        Ok(out.value().filter(|&v| v < s))
    }

    /// Inputs `x` with an axiom for `Φ_e`, ascending.
    pub fn inputs(&self, e: u64) -> Vec<u64> {
        let mut v: Vec<u64> = self.axioms.iter().filter(|a| a.e == e).map(|a| a.x).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    if s == "-" || s == "ε" {
        return Some(Vec::new());
    }
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

/// The empty string is written `-`.
pub fn bits_to_string(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "-".to_string();
    }
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl FromStr for FunctionalTable {
    type Err = TableError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut axioms = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| TableError::Parse { line: n + 1, msg: msg.to_string() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err("expected `e σ x y`"));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| err(&format!("not a natural number: {s}")));
            let oracle = parse_bits(fields[1]).ok_or_else(|| err("oracle must be a 0/1 string or `-`"))?;
            axioms.push(Axiom { e: num(fields[0])?, oracle, x: num(fields[2])?, y: num(fields[3])? });
        }
        Ok(FunctionalTable::new(axioms))
    }
}

impl fmt::Display for FunctionalTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axioms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    #[test]
    fn empty_table_diverges() {
        let t = FunctionalTable::empty();
        assert_eq!(t.apply(0, &bits("0101"), 3).unwrap(), Outcome::Diverges);
        assert!(t.check_consistency().is_none());
    }

    #[test]
    fn direct_axiom_match() {
        let t = FunctionalTable::new(vec![Axiom::new(0, "1", 5, 1)]);
        assert_eq!(t.apply(0, &bits("10"), 5).unwrap(), Outcome::Converges { value: 1, use_: 1 });
        assert_eq!(t.apply(0, &bits("0"), 5).unwrap(), Outcome::Diverges);
        assert_eq!(t.apply(0, &bits("-"), 5).unwrap(), Outcome::Diverges);
    }

    #[test]
    fn consistency_verdicts() {
        let bad = FunctionalTable::new(vec![Axiom::new(0, "1", 5, 1), Axiom::new(0, "11", 5, 0)]);
        let (a, b) = bad.check_consistency().unwrap();
        assert_eq!((a.y, b.y), (1, 0));
        assert!(matches!(bad.apply(0, &bits("110"), 5), Err(TableError::Inconsistent(..))));
        let good = FunctionalTable::new(vec![Axiom::new(0, "1", 5, 1), Axiom::new(0, "01", 5, 0)]);
        assert!(good.check_consistency().is_none());
    }

    #[test]
    fn parse_and_print() {
        let t: FunctionalTable = "# comment\n0 1 5 1\n\n2 - 3 4 # trailing\n".parse().unwrap();
        assert_eq!(t.axioms().len(), 2);
        assert_eq!(t.apply(2, &[], 3).unwrap(), Outcome::Converges { value: 4, use_: 0 });
        let again: FunctionalTable = t.to_string().parse().unwrap();
        assert_eq!(again.axioms(), t.axioms());
        assert!(matches!("0 12 5 1".parse::<FunctionalTable>(), Err(TableError::Parse { line: 1, .. })));
        assert!(matches!("0 1 5".parse::<FunctionalTable>(), Err(TableError::Parse { .. })));
    }
}
