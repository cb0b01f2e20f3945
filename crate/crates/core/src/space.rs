//! The binary projective geometry `PG(r-1, 2)` and GF(2) linear algebra on its points.
//!
//! Element `x` (an integer in `1..=2^r - 1`) is the column vector whose `i`-th
//! coordinate is bit `i - 1` of `x`. Vector addition is XOR and the pairing of
//! a functional with a point is the parity of `a & x`, so every operation on
//! points reduces to word arithmetic.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A point of the projective geometry, encoded as its coordinate vector.
pub type Element = u32;

pub const MAX_RANK: u32 = 31;

/// GF(2) pairing of two coordinate vectors.
#[inline]
pub fn parity(a: u32, x: u32) -> bool {
    (a & x).count_ones() & 1 == 1
}

/// The ambient geometry `P_r = PG(r-1, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Space {
    r: u32,
}

impl Space {
    pub fn new(r: u32) -> Result<Self> {
        if (1..=MAX_RANK).contains(&r) {
            Ok(Space { r })
        } else {
            Err(Error::InvalidRank(r))
        }
    }

    /// The rank parameter `r`.
    pub fn rank(&self) -> u32 {
        self.r
    }

    /// Number of points, `2^r - 1`.
    pub fn size(&self) -> u32 {
        ((1u64 << self.r) - 1) as u32
    }

    pub fn contains_element(&self, x: u64) -> bool {
        x >= 1 && x <= self.size() as u64
    }

    pub fn check_element(&self, x: u64) -> Result<Element> {
        if self.contains_element(x) {
            Ok(x as Element)
        } else {
            Err(Error::ElementOutOfRange {
                element: x,
                max: self.size() as u64,
            })
        }
    }

    pub fn functional(&self, a: u64) -> Result<Functional> {
        if self.contains_element(a) {
            Ok(Functional(a as u32))
        } else {
            Err(Error::FunctionalOutOfRange {
                value: a,
                max: self.size() as u64,
            })
        }
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Element> + Clone {
        1..=self.size()
    }

    /// All nonzero functionals in increasing order.
    pub fn functionals(&self) -> impl DoubleEndedIterator<Item = Functional> + Clone {
        (1..=self.size()).map(Functional)
    }

    /// The standard functionals `1, 2, 4, ...`: the row cocircuits of the identity representation.
    pub fn row_functionals(&self) -> impl Iterator<Item = Functional> {
        (0..self.r).map(|i| Functional(1 << i))
    }

    pub fn dot(&self, a: Functional, x: u64) -> Result<bool> {
        let x = self.check_element(x)?;
        Ok(a.dot(x))
    }

    pub fn empty(&self) -> GroundSet {
        GroundSet::empty(*self)
    }

    pub fn full(&self) -> GroundSet {
        GroundSet::full(*self)
    }

    /// The projective cocircuit `{x : a.x = 1}`.
    pub fn cocircuit(&self, a: Functional) -> GroundSet {
        debug_assert!(self.contains_element(a.0 as u64));
        let mut set = GroundSet::empty(*self);
        for x in self.elements() {
            if a.dot(x) {
                set.insert_unchecked(x);
            }
        }
        set
    }

    /// The projective hyperplane `{x : a.x = 0}`, the complement of [`Space::cocircuit`].
    pub fn hyperplane(&self, a: Functional) -> GroundSet {
        self.cocircuit(a).complement()
    }

    pub fn rank_of(&self, set: &GroundSet) -> u32 {
        Basis::spanning(set.iter()).rank()
    }

    /// Projective closure: the span of `set` without the zero vector.
    pub fn closure(&self, set: &GroundSet) -> GroundSet {
        let basis = Basis::spanning(set.iter());
        let mut out = GroundSet::empty(*self);
        for x in basis.span() {
            out.insert_unchecked(x);
        }
        out
    }

    pub fn is_flat(&self, set: &GroundSet) -> bool {
        self.closure(set) == *set
    }

    /// Every flat of the given rank, in increasing mask order.
    pub fn flats_of_rank(&self, k: u32) -> Vec<GroundSet> {
        let mut layer: BTreeSet<GroundSet> = BTreeSet::new();
        layer.insert(self.empty());
        for _ in 0..k.min(self.r) {
            let mut next = BTreeSet::new();
            for flat in &layer {
                let basis = Basis::spanning(flat.iter());
                for x in self.elements() {
                    if flat.contains(x) {
                        continue;
                    }
                    let mut b = basis.clone();
                    b.insert(x);
                    let mut grown = self.empty();
                    for y in b.span() {
                        grown.insert_unchecked(y);
                    }
                    next.insert(grown);
                }
            }
            layer = next;
        }
        if k > self.r {
            return Vec::new();
        }
        layer.into_iter().collect()
    }

    /// Counts copies of `AG(r-3, 2)` by enumerating every rank-`(r-2)` flat
    /// together with each of its hyperplanes and collecting the distinct
    /// differences.
    pub fn count_affine_subgeometries(&self) -> Result<u64> {
        if self.r < 3 {
            return Err(Error::domain(format!(
                "affine subgeometry count needs r >= 3, got {}",
                self.r
            )));
        }
        let mut copies = BTreeSet::new();
        for flat in self.flats_of_rank(self.r - 2) {
            for a in self.functionals() {
                let hyper = self.hyperplane(a);
                if flat.is_subset(&hyper) {
                    continue;
                }
                copies.insert(flat.difference(&hyper));
            }
        }
        Ok(copies.len() as u64)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PG({}, 2)", self.r - 1)
    }
}

/// A nonzero linear functional; names the cocircuit/hyperplane pair it cuts out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functional(pub(crate) u32);

impl Functional {
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn dot(self, x: Element) -> bool {
        parity(self.0, x)
    }

    /// Sum of two distinct functionals.
    pub fn xor(self, other: Functional) -> Option<Functional> {
        let v = self.0 ^ other.0;
        (v != 0).then_some(Functional(v))
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

type Words = SmallVec<[u64; 4]>;

/// A subset of the points of a [`Space`], stored as a membership word
/// (bit `x - 1` set iff element `x` is present).
///
/// Doubles as the green set of a 2-colouring; the red set is the complement.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    space: Space,
    words: Words,
}

fn word_count(space: Space) -> usize {
    (space.size() as usize).div_ceil(64)
}

impl GroundSet {
    pub fn empty(space: Space) -> Self {
        GroundSet {
            space,
            words: smallvec::smallvec![0; word_count(space)],
        }
    }

    pub fn full(space: Space) -> Self {
        let mut set = Self::empty(space);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.trim();
        set
    }

    pub fn from_elements<I>(space: Space, elements: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<u64>,
    {
        let mut set = Self::empty(space);
        for x in elements {
            let x = space.check_element(x.into())?;
            set.insert_unchecked(x);
        }
        Ok(set)
    }

    /// Builds a set from a single membership word (spaces with at most 64 points).
    pub fn from_u64(space: Space, mask: u64) -> Result<Self> {
        let n = space.size();
        if n < 64 && mask >> n != 0 {
            return Err(Error::domain(format!(
                "mask {mask:#x} has bits beyond the {n} points of {space}"
            )));
        }
        let mut set = Self::empty(space);
        if mask != 0 {
            set.words[0] = mask;
        }
        Ok(set)
    }

    /// Builds a set from little-endian membership words; bits past the last point must be clear.
    pub fn from_words(space: Space, words: &[u64]) -> Result<Self> {
        let mut set = Self::empty(space);
        if words.len() != set.words.len() {
            return Err(Error::domain(format!(
                "{space} needs {} membership words, got {}",
                set.words.len(),
                words.len()
            )));
        }
        set.words.copy_from_slice(words);
        let mut trimmed = set.clone();
        trimmed.trim();
        if trimmed != set {
            return Err(Error::domain(format!(
                "membership words have bits beyond the {} points of {space}",
                space.size()
            )));
        }
        Ok(set)
    }

    /// The membership word, when the space has at most 64 points.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn space(&self) -> Space {
        self.space
    }

    fn trim(&mut self) {
        let n = self.space.size() as usize;
        let rem = n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn contains(&self, x: Element) -> bool {
        if x == 0 || x > self.space.size() {
            return false;
        }
        let i = (x - 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn insert_unchecked(&mut self, x: Element) {
        let i = (x - 1) as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn toggle_unchecked(&mut self, x: Element) {
        let i = (x - 1) as usize;
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn insert(&mut self, x: Element) -> Result<bool> {
        self.space.check_element(x as u64)?;
        let fresh = !self.contains(x);
        self.insert_unchecked(x);
        Ok(fresh)
    }

    pub fn remove(&mut self, x: Element) -> Result<bool> {
        self.space.check_element(x as u64)?;
        let present = self.contains(x);
        if present {
            self.toggle_unchecked(x);
        }
        Ok(present)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.space.size() as usize
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first(&self) -> Option<Element> {
        self.iter().next()
    }

    fn zip_with(&self, other: &GroundSet, op: impl Fn(u64, u64) -> u64) -> GroundSet {
        assert_eq!(self.space, other.space, "ground sets from different spaces");
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(&a, &b)| op(a, b))
            .collect();
        GroundSet {
            space: self.space,
            words,
        }
    }

    pub fn symmetric_difference(&self, other: &GroundSet) -> GroundSet {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn union(&self, other: &GroundSet) -> GroundSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &GroundSet) -> GroundSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &GroundSet) -> GroundSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> GroundSet {
        let mut out = GroundSet {
            space: self.space,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.trim();
        out
    }

    pub fn is_subset(&self, other: &GroundSet) -> bool {
        self.space == other.space
            && self
                .words
                .iter()
                .zip(other.words.iter())
                .all(|(&a, &b)| a & !b == 0)
    }

    /// In-place symmetric difference.
    pub fn toggle_all(&mut self, other: &GroundSet) {
        assert_eq!(self.space, other.space, "ground sets from different spaces");
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    /// Hex of the membership word, most significant digit first; element `x` is bit `x - 1`.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for w in self.words.iter().rev() {
            if out.is_empty() {
                if *w != 0 {
                    out.push_str(&format!("{w:x}"));
                }
            } else {
                out.push_str(&format!("{w:016x}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn from_hex(space: Space, hex: &str) -> Result<Self> {
        let digits = hex
            .trim()
            .strip_prefix("0x")
            .unwrap_or(hex.trim())
            .trim_start_matches('0');
        let mut set = Self::empty(space);
        for (pos, ch) in digits.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::domain(format!("invalid hex digit `{ch}` in `{hex}`")))?
                as u64;
            if nibble == 0 {
                continue;
            }
            let bit = pos * 4;
            let word = bit / 64;
            if word >= set.words.len() {
                return Err(Error::domain(format!(
                    "hex mask `{hex}` exceeds the {} points of {space}",
                    space.size()
                )));
            }
            set.words[word] |= nibble << (bit % 64);
        }
        let mut trimmed = set.clone();
        trimmed.trim();
        if trimmed != set {
            return Err(Error::domain(format!(
                "hex mask `{hex}` exceeds the {} points of {space}",
                space.size()
            )));
        }
        Ok(set)
    }
}

impl PartialOrd for GroundSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by space, then by the membership word read as an unsigned integer.
impl Ord for GroundSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.space
            .cmp(&other.space)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl<'a> IntoIterator for &'a GroundSet {
    type Item = Element;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some((self.index * 64 + tz as usize + 1) as Element);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Row-echelon basis of a subspace of GF(2)^r, keyed by leading (highest) bit.
#[derive(Clone, Debug, Default)]
pub struct Basis {
    pivots: [u32; 32],
    rank: u32,
}

impl Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spanning<I: IntoIterator<Item = u32>>(vectors: I) -> Self {
        let mut b = Basis::new();
        for v in vectors {
            b.insert(v);
        }
        b
    }

    /// Reduces `v` against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, mut v: u32) -> u32 {
        while v != 0 {
            let top = 31 - v.leading_zeros();
            let p = self.pivots[top as usize];
            if p == 0 {
                break;
            }
            v ^= p;
        }
        v
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: u32) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let top = 31 - v.leading_zeros();
        self.pivots[top as usize] = v;
        self.rank += 1;
        true
    }

    pub fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn vectors(&self) -> impl Iterator<Item = u32> + '_ {
        self.pivots.iter().copied().filter(|&p| p != 0)
    }

    /// Nonzero vectors of the span, `2^rank - 1` of them.
    /// Smallest vector of the coset `v + span`.
    pub fn min_in_coset(&self, mut v: u32) -> u32 {
        for bit in (0..32).rev() {
            let p = self.pivots[bit];
            if p != 0 && v >> bit & 1 == 1 {
                v ^= p;
            }
        }
        v
    }

    /// Smallest nonzero vector of the span.
    pub fn min_nonzero(&self) -> Option<u32> {
        self.pivots.iter().copied().find(|&p| p != 0)
    }

    pub fn span(&self) -> Vec<u32> {
        let gens: Vec<u32> = self.vectors().collect();
        let mut out = Vec::with_capacity((1usize << gens.len()) - 1);
        out.push(0u32);
        for g in gens {
            let len = out.len();
            for i in 0..len {
                out.push(out[i] ^ g);
            }
        }
        out.swap_remove(0);
        out
    }
}

/// Solutions `a` of a GF(2) system `a.x_i = b_i` over the `r` coordinates of `a`.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    particular: u32,
    kernel: Basis,
}

impl SolutionSpace {
    /// Solves the system, or returns `None` when it is inconsistent.
    pub fn solve<I>(r: u32, equations: I) -> Option<SolutionSpace>
    where
        I: IntoIterator<Item = (u32, bool)>,
    {
        const RHS: u64 = 1 << 32;
        // rows[p]: equation whose highest coefficient bit is p
        let mut rows = [0u64; 32];
        for (coeffs, rhs) in equations {
            let mut row = coeffs as u64 | if rhs { RHS } else { 0 };
            loop {
                let c = row as u32;
                if c == 0 {
                    if row & RHS != 0 {
                        return None;
                    }
                    break;
                }
                let top = 31 - c.leading_zeros();
                if rows[top as usize] == 0 {
                    rows[top as usize] = row;
                    break;
                }
                row ^= rows[top as usize];
            }
        }
        // back-substitute to reduced form, highest pivot first
        for p in (0..32).rev() {
            if rows[p] == 0 {
                continue;
            }
            for q in 0..32 {
                if q != p && rows[q] >> p & 1 == 1 {
                    rows[q] ^= rows[p];
                }
            }
        }
        let mut particular = 0u32;
        let mut pivot_mask = 0u32;
        for (p, &row) in rows.iter().enumerate() {
            if row != 0 {
                pivot_mask |= 1 << p;
                if row & RHS != 0 {
                    particular |= 1 << p;
                }
            }
        }
        let mut kernel = Basis::new();
        for j in 0..r {
            if pivot_mask >> j & 1 == 1 {
                continue;
            }
            let mut v = 1u32 << j;
            for (p, &row) in rows.iter().enumerate() {
                if row != 0 && row >> j & 1 == 1 {
                    v |= 1 << p;
                }
            }
            kernel.insert(v);
        }
        Some(SolutionSpace { particular, kernel })
    }

    pub fn kernel(&self) -> &Basis {
        &self.kernel
    }

    /// Smallest nonzero solution.
    pub fn min_nonzero(&self) -> Option<u32> {
        match self.kernel.min_in_coset(self.particular) {
            0 => self.kernel.min_nonzero(),
            v => Some(v),
        }
    }
}
