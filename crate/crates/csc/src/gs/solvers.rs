//! Exhaustive desk-scale solvers for the Ramsey-type principles.
//!
//! Homogeneous sets, chains, antichains and monotone sequences are all cliques
//! in some colour class of a pair colouring, so they share one bitmask clique
//! search. Inputs are capped at [`SOLVER_CAP`] points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CscError, Result};

pub const SOLVER_CAP: usize = 24;

fn check_cap(n: usize) -> Result<()> {
    if n > SOLVER_CAP {
        Err(CscError::SolverCap { n, cap: SOLVER_CAP })
    } else {
        Ok(())
    }
}

/// A 2-colouring of the pairs of `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    n: usize,
    colors: Vec<u8>,
}

impl Coloring {
    pub fn new<F: FnMut(usize, usize) -> u8>(n: usize, mut f: F) -> Self {
        let mut colors = vec![0u8; n * n];
        for x in 0..n {
            for y in x + 1..n {
                let c = f(x, y);
                colors[x * n + y] = c;
                colors[y * n + x] = c;
            }
        }
        Coloring { n, colors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.colors[x * self.n + y]
    }

    fn adjacency(&self, color: u8) -> Vec<u32> {
        (0..self.n)
            .map(|x| (0..self.n).filter(|&y| y != x && self.get(x, y) == color).fold(0u32, |m, y| m | 1 << y))
            .collect()
    }
}

/// Lexicographically least clique of size `k` in the graph `adj`.
fn least_clique(adj: &[u32], k: usize) -> Option<Vec<usize>> {
    fn go(adj: &[u32], cand: u32, k: usize, acc: &mut Vec<usize>) -> bool {
        if acc.len() == k {
            return true;
        }
        if (cand.count_ones() as usize) + acc.len() < k {
            return false;
        }
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (rest.count_ones() as usize) + 1 + acc.len() < k {
                return false;
            }
            acc.push(v);
            if go(adj, rest & adj[v], k, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let all = if adj.len() == 32 { u32::MAX } else { (1u32 << adj.len()) - 1 };
    let mut acc = Vec::new();
    go(adj, all, k, &mut acc).then_some(acc)
}

/// A maximum clique; among those of maximum size, the lexicographically least.
fn max_clique(adj: &[u32]) -> Vec<usize> {
    let mut lo = 0;
    let mut best = Vec::new();
    while let Some(c) = least_clique(adj, lo + 1) {
        lo += 1;
        best = c;
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogeneous {
    pub points: Vec<usize>,
    pub color: u8,
}

/// Least-lexicographic homogeneous set of size `k`, colour 0 on ties; `None`
/// when neither colour has one.
pub fn solve_rt22(c: &Coloring, k: usize) -> Result<Option<Homogeneous>> {
    check_cap(c.n())?;
    let a = least_clique(&c.adjacency(0), k);
    let b = least_clique(&c.adjacency(1), k);
    Ok(match (a, b) {
        (Some(a), Some(b)) if b < a => Some(Homogeneous { points: b, color: 1 }),
        (Some(a), _) => Some(Homogeneous { points: a, color: 0 }),
        (None, Some(b)) => Some(Homogeneous { points: b, color: 1 }),
        (None, None) => None,
    })
}

/// Least-lexicographic maximum homogeneous set of the given colour.
pub fn max_homogeneous_of(c: &Coloring, color: u8) -> Result<Vec<usize>> {
    check_cap(c.n())?;
    Ok(max_clique(&c.adjacency(color)))
}

/// Size of a largest homogeneous set of either colour.
pub fn max_homogeneous(c: &Coloring) -> Result<usize> {
    Ok(max_homogeneous_of(c, 0)?.len().max(max_homogeneous_of(c, 1)?.len()))
}

/// A partial order on `[0, n)` as a relation table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePoset {
    leq: Vec<Vec<bool>>,
}

impl FinitePoset {
    pub fn new(leq: Vec<Vec<bool>>) -> Result<Self> {
        let p = FinitePoset { leq };
        p.validate()?;
        Ok(p)
    }

    pub fn from_fn<F: Fn(usize, usize) -> bool>(n: usize, f: F) -> Result<Self> {
        FinitePoset::new((0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.leq.len()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.leq
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.leq.len();
        if let Some(r) = self.leq.iter().position(|row| row.len() != n) {
            return Err(CscError::InvalidOrder(format!("row {r} has the wrong length")));
        }
        for x in 0..n {
            if !self.leq[x][x] {
                return Err(CscError::InvalidOrder(format!("not reflexive at {x}")));
            }
            for y in 0..n {
                if x != y && self.leq[x][y] && self.leq[y][x] {
                    return Err(CscError::InvalidOrder(format!("not antisymmetric at ({x}, {y})")));
                }
                for z in 0..n {
                    if self.leq[x][y] && self.leq[y][z] && !self.leq[x][z] {
                        return Err(CscError::InvalidOrder(format!("not transitive at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        (0..self.n()).all(|x| (0..self.n()).all(|y| self.comparable(x, y)))
    }

    fn comparability(&self) -> Coloring {
        Coloring::new(self.n(), |x, y| u8::from(!self.comparable(x, y)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum CacSolution {
    Chain(Vec<usize>),
    Antichain(Vec<usize>),
}

impl CacSolution {
    pub fn points(&self) -> &[usize] {
        match self {
            CacSolution::Chain(p) | CacSolution::Antichain(p) => p,
        }
    }
}

/// A chain of size `k` if there is one (least-lexicographic), else an
/// antichain of size `k`.
pub fn solve_cac(p: &FinitePoset, k: usize) -> Result<Option<CacSolution>> {
    p.validate()?;
    check_cap(p.n())?;
    let c = p.comparability();
    if let Some(ch) = least_clique(&c.adjacency(0), k) {
        return Ok(Some(CacSolution::Chain(ch)));
    }
    Ok(least_clique(&c.adjacency(1), k).map(CacSolution::Antichain))
}

/// A chain of maximum size (least-lexicographic among them).
pub fn longest_chain(p: &FinitePoset) -> Result<Vec<usize>> {
    check_cap(p.n())?;
    Ok(max_clique(&p.comparability().adjacency(0)))
}

/// An antichain of maximum size (least-lexicographic among them).
pub fn largest_antichain(p: &FinitePoset) -> Result<Vec<usize>> {
    check_cap(p.n())?;
    Ok(max_clique(&p.comparability().adjacency(1)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum AdsSolution {
    /// `x_0 < x_1 < …` with `x_0 <_L x_1 <_L …`.
    Ascending(Vec<usize>),
    /// `x_0 < x_1 < …` with `x_0 >_L x_1 >_L …`.
    Descending(Vec<usize>),
}

impl AdsSolution {
    pub fn points(&self) -> &[usize] {
        match self {
            AdsSolution::Ascending(p) | AdsSolution::Descending(p) => p,
        }
    }
}

/// A monotone sequence of length `k` in the linear order `l` on `[0, n)`;
/// least-lexicographic, ascending on ties.
pub fn solve_ads(l: &FinitePoset, k: usize) -> Result<Option<AdsSolution>> {
    l.validate()?;
    if !l.is_linear() {
        return Err(CscError::InvalidOrder("not a linear order".into()));
    }
    check_cap(l.n())?;
    let c = Coloring::new(l.n(), |x, y| u8::from(!l.leq(x, y)));
    Ok(solve_rt22(&c, k)?.map(|h| match h.color {
        0 => AdsSolution::Ascending(h.points),
        _ => AdsSolution::Descending(h.points),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohSolution {
    pub points: Vec<usize>,
    /// `sides[i]` is true when the points lie inside `R_i`.
    pub sides: Vec<bool>,
}

/// The largest cell of the Boolean algebra generated by `family` on `[0, n)`;
/// ties go to the least signature, inside before outside.
pub fn solve_coh(family: &[Vec<bool>], n: usize) -> CohSolution {
    let mut cells: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        let sig: Vec<bool> = family.iter().map(|r| !r.get(x).copied().unwrap_or(false)).collect();
        cells.entry(sig).or_default().push(x);
    }
    let mut best: Option<(&Vec<bool>, &Vec<usize>)> = None;
    for (sig, pts) in &cells {
        if best.is_none_or(|(_, b)| pts.len() > b.len()) {
            best = Some((sig, pts));
        }
    }
    match best {
        Some((sig, pts)) => CohSolution { points: pts.clone(), sides: sig.iter().map(|&out| !out).collect() },
        None => CohSolution { points: Vec::new(), sides: vec![true; family.len()] },
    }
}
