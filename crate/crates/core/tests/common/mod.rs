//! Straightforward mask-level reimplementations of the operations, used as
//! oracles. Points are integers `1..2^r`, a state is a mask with point `x` at
//! bit `x - 1`. Only ranks up to 5 are needed, so every state fits a `u64`.

#![allow(dead_code)]

use std::collections::BTreeSet;

pub fn n(r: u32) -> u32 {
    (1 << r) - 1
}

pub fn full(r: u32) -> u64 {
    (1u64 << n(r)) - 1
}

pub fn bit(x: u32) -> u64 {
    1u64 << (x - 1)
}

pub fn points(mask: u64) -> Vec<u32> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

pub fn dot(a: u32, x: u32) -> bool {
    (a & x).count_ones() % 2 == 1
}

pub fn cocircuit(r: u32, a: u32) -> u64 {
    (1..=n(r)).filter(|&x| dot(a, x)).map(bit).sum()
}

pub fn hyperplane(r: u32, a: u32) -> u64 {
    full(r) & !cocircuit(r, a)
}

/// All nonzero sums of subsets of `vs`.
pub fn span(vs: &[u32]) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    out.insert(0);
    for &v in vs {
        let more: Vec<u32> = out.iter().map(|&s| s ^ v).collect();
        out.extend(more);
    }
    out.remove(&0);
    out
}

pub fn rank(vs: &[u32]) -> u32 {
    span(vs).len().checked_add(1).map(|k| k.trailing_zeros()).unwrap_or(0)
}

pub fn omega(r: u32, m: u64) -> u64 {
    m ^ full(r)
}

pub fn sigma(r: u32, m: u64, a: u32) -> u64 {
    m ^ cocircuit(r, a)
}

pub fn hypcomp(r: u32, m: u64, a: u32) -> u64 {
    m ^ hyperplane(r, a)
}

/// Complement inside the part of the span of the trace lying off the cocircuit.
pub fn lambda(r: u32, m: u64, a: u32) -> u64 {
    let trace = points(m & cocircuit(r, a));
    let region: u64 = span(&trace).into_iter().filter(|&x| !dot(a, x)).map(bit).sum();
    m ^ region
}

/// On each line through `f`, exchange the colours of the other two points.
pub fn swap(r: u32, m: u64, f: u32) -> u64 {
    let mut out = m;
    for x in 1..=n(r) {
        let y = x ^ f;
        if x == f || x > y {
            continue;
        }
        let (gx, gy) = (m & bit(x) != 0, m & bit(y) != 0);
        if gx != gy {
            out ^= bit(x) | bit(y);
        }
    }
    out
}

/// Circuits of the restriction: minimal non-empty subsets summing to zero.
pub fn circuits(m: u64) -> Vec<u64> {
    let pts = points(m);
    let mut dependent: Vec<u64> = Vec::new();
    for sub in 1u64..(1 << pts.len()) {
        let sum = (0..pts.len()).filter(|i| sub >> i & 1 == 1).fold(0, |s, i| s ^ pts[i]);
        if sum == 0 {
            let set: u64 = (0..pts.len()).filter(|i| sub >> i & 1 == 1).map(|i| bit(pts[i])).sum();
            dependent.push(set);
        }
    }
    dependent
        .iter()
        .copied()
        .filter(|&c| !dependent.iter().any(|&d| d != c && d & c == d))
        .collect()
}

/// Every affine subspace of dimension `r - 3` avoiding zero, found as the
/// non-trivial cosets of every `(r - 3)`-dimensional linear subspace.
pub fn affine_copies(r: u32) -> usize {
    let dim = r - 3;
    let mut subspaces: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut stack = vec![(Vec::<u32>::new(), 1u32)];
    while let Some((gens, next)) = stack.pop() {
        if gens.len() as u32 == dim {
            let mut s: Vec<u32> = span(&gens).into_iter().collect();
            s.insert(0, 0);
            subspaces.insert(s);
            continue;
        }
        for v in next..=n(r) {
            if !span(&gens).contains(&v) {
                let mut g = gens.clone();
                g.push(v);
                stack.push((g, v + 1));
            }
        }
    }
    let mut copies = BTreeSet::new();
    for w in &subspaces {
        for v in 1..=n(r) {
            if w.contains(&v) {
                continue;
            }
            let coset: u64 = w.iter().map(|&u| bit(u ^ v)).sum();
            copies.insert(coset);
        }
    }
    copies.len()
}

/// Rank by elimination, keeping each new vector only if it is reduced to a
/// nonzero remainder.
pub fn rank_by_elimination(vs: impl IntoIterator<Item = u32>) -> u32 {
    let mut basis: Vec<u32> = Vec::new();
    for v in vs {
        let x = basis.iter().fold(v, |x, &b| x.min(x ^ b));
        if x != 0 {
            basis.push(x);
        }
    }
    basis.len() as u32
}
