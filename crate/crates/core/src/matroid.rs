//! Restrictions of `P_r` as labeled states, and the `GL(r, 2)` action on them.

use std::fmt;

use crate::error::{Error, Result};
use crate::space::{Basis, Element, Functional, GroundSet, SolutionSpace, Space};

/// A simple binary matroid, held as the restriction of `P_r` to its ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matroid {
    ground: GroundSet,
}

impl Matroid {
    pub fn new(ground: GroundSet) -> Self {
        Matroid { ground }
    }

    /// `P_r` itself.
    pub fn full(space: Space) -> Self {
        Matroid::new(space.full())
    }

    /// `U_{0,0}`.
    pub fn empty(space: Space) -> Self {
        Matroid::new(space.empty())
    }

    pub fn from_elements<I>(space: Space, elements: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<u64>,
    {
        GroundSet::from_elements(space, elements).map(Matroid::new)
    }

    pub fn space(&self) -> Space {
        self.ground.space()
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn into_ground(self) -> GroundSet {
        self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.space().rank_of(&self.ground)
    }

    pub fn is_independent(&self) -> bool {
        self.rank() as usize == self.len()
    }

    pub fn coloops(&self) -> GroundSet {
        let full_rank = self.rank();
        let mut out = self.space().empty();
        for e in self.ground.iter() {
            let rest = Basis::spanning(self.ground.iter().filter(|&x| x != e));
            if rest.rank() + 1 == full_rank {
                out.insert_unchecked(e);
            }
        }
        out
    }

    /// Finds the smallest functional whose cocircuit meets the ground set in exactly `trace`.
    ///
    /// Every non-empty disjoint union of cocircuits of the matroid is such a
    /// trace, so for those inputs the result is always `Some`.
    pub fn find_cocircuit_with_trace(&self, trace: &GroundSet) -> Result<Option<Functional>> {
        if !trace.is_subset(&self.ground) {
            return Err(Error::domain(format!(
                "trace {trace} is not contained in the ground set {}",
                self.ground
            )));
        }
        let r = self.space().rank();
        let solutions = SolutionSpace::solve(r, self.ground.iter().map(|x| (x, trace.contains(x))));
        Ok(solutions
            .and_then(|s| s.min_nonzero())
            .map(Functional))
    }

    /// The numerically least mask in the `GL(r, 2)` orbit of the ground set.
    ///
    /// Brute force over the whole group, so only `r <= 5` is accepted; use
    /// [`ClassTable`] for bulk work at `r <= 4`.
    pub fn canonical_form(&self) -> Result<GroundSet> {
        let space = self.space();
        if space.rank() > 5 {
            return Err(Error::Unsupported(format!(
                "canonical form by group enumeration needs r <= 5, got {}",
                space.rank()
            )));
        }
        let mask = self.ground.as_u64().expect("r <= 5 fits one word");
        let elements: Vec<Element> = self.ground.iter().collect();
        let mut best = mask;
        for_each_linear_map(space, |table| {
            let mut image = 0u64;
            for &x in &elements {
                image |= 1 << (table[x as usize] - 1);
            }
            best = best.min(image);
        });
        GroundSet::from_u64(space, best)
    }

    pub fn is_isomorphic(&self, other: &Matroid) -> Result<bool> {
        if self.space() != other.space() {
            return Err(Error::SpaceMismatch {
                left: self.space().rank(),
                right: other.space().rank(),
            });
        }
        if self.len() != other.len() || self.rank() != other.rank() {
            return Ok(false);
        }
        Ok(self.canonical_form()? == other.canonical_form()?)
    }

    /// Text form: `r=<int>` then `ground=<hex>`.
    pub fn to_text(&self) -> String {
        format!("r={}\nground={}\n", self.space().rank(), self.ground.to_hex())
    }

    /// Parses the text form. The second line may instead be
    /// `elements=<comma-separated integers>`.
    pub fn parse(text: &str) -> Result<Matroid> {
        let mut space = None;
        let mut ground = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key=value, got `{line}`")))?;
            match key.trim() {
                "r" => {
                    let r: u32 = value
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("invalid rank `{value}`")))?;
                    space = Some(Space::new(r).map_err(|e| Error::parse(line_no, e.to_string()))?);
                }
                key @ ("ground" | "elements") => {
                    let space = space
                        .ok_or_else(|| Error::parse(line_no, "`r=` must precede the ground set"))?;
                    if ground.is_some() {
                        return Err(Error::parse(line_no, "ground set given twice"));
                    }
                    let set = if key == "ground" {
                        GroundSet::from_hex(space, value)
                    } else {
                        parse_element_list(space, value)
                    };
                    ground = Some(set.map_err(|e| Error::parse(line_no, e.to_string()))?);
                }
                other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
            }
        }
        match ground {
            Some(g) => Ok(Matroid::new(g)),
            None => Err(Error::parse(text.lines().count().max(1), "missing ground set")),
        }
    }
}

impl fmt::Display for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ground)
    }
}

pub fn parse_element_list(space: Space, list: &str) -> Result<GroundSet> {
    let mut set = space.empty();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let x: u64 = tok
            .parse()
            .map_err(|_| Error::domain(format!("invalid element `{tok}`")))?;
        set.insert(space.check_element(x)?)?;
    }
    Ok(set)
}

/// An invertible `r x r` matrix over GF(2), stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMap {
    columns: Vec<u32>,
}

impl LinearMap {
    pub fn new(space: Space, columns: Vec<u32>) -> Result<Self> {
        if columns.len() != space.rank() as usize {
            return Err(Error::domain(format!(
                "a linear map on rank {} needs {} columns, got {}",
                space.rank(),
                space.rank(),
                columns.len()
            )));
        }
        for &c in &columns {
            space.check_element(c as u64)?;
        }
        if Basis::spanning(columns.iter().copied()).rank() != space.rank() {
            return Err(Error::domain("columns are linearly dependent"));
        }
        Ok(LinearMap { columns })
    }

    pub fn identity(space: Space) -> Self {
        LinearMap {
            columns: (0..space.rank()).map(|i| 1 << i).collect(),
        }
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn apply(&self, x: Element) -> Element {
        let mut out = 0;
        let mut bits = x;
        while bits != 0 {
            let i = bits.trailing_zeros();
            out ^= self.columns[i as usize];
            bits &= bits - 1;
        }
        out
    }

    pub fn apply_set(&self, set: &GroundSet) -> GroundSet {
        let mut out = set.space().empty();
        for x in set.iter() {
            out.insert_unchecked(self.apply(x));
        }
        out
    }
}

/// Calls `visit` with the full image table (`table[x] = phi(x)`, `table[0] = 0`)
/// of every element of `GL(r, 2)`.
fn for_each_linear_map(space: Space, mut visit: impl FnMut(&[u32])) {
    let r = space.rank() as usize;
    let mut table = vec![0u32; 1 << r];
    fn extend(
        level: usize,
        r: usize,
        table: &mut Vec<u32>,
        span: &Basis,
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if level == r {
            visit(table);
            return;
        }
        let lo = 1usize << level;
        for c in 1..(1u32 << r) {
            if span.contains(c) {
                continue;
            }
            for x in 0..lo {
                table[lo + x] = table[x] ^ c;
            }
            let mut next = span.clone();
            next.insert(c);
            extend(level + 1, r, table, &next, visit);
        }
    }
    extend(0, r, &mut table, &Basis::new(), &mut visit);
}

/// Canonical forms of every subset of `E(P_r)` for `r <= 4`, from the orbits
/// of the elementary transvections (which generate `GL(r, 2)`).
#[derive(Clone, Debug)]
pub struct ClassTable {
    space: Space,
    canon: Vec<u32>,
}

impl ClassTable {
    pub const MAX_RANK: u32 = 4;

    pub fn new(space: Space) -> Result<Self> {
        if space.rank() > Self::MAX_RANK {
            return Err(Error::Unsupported(format!(
                "class tables need r <= {}, got {}",
                Self::MAX_RANK,
                space.rank()
            )));
        }
        let r = space.rank();
        let n = space.size();
        let states = 1usize << n;
        let mut parent: Vec<u32> = (0..states as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let up = parent[parent[x as usize] as usize];
                parent[x as usize] = up;
                x = up;
            }
            x
        }
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                // x -> x + x_j e_i
                let map: Vec<u32> = (0..=n).map(|x| x ^ ((x >> j & 1) << i)).collect();
                for mask in 0..states as u32 {
                    let mut image = 0u32;
                    let mut bits = mask;
                    while bits != 0 {
                        let b = bits.trailing_zeros();
                        image |= 1 << (map[b as usize + 1] - 1);
                        bits &= bits - 1;
                    }
                    let (a, b) = (find(&mut parent, mask), find(&mut parent, image));
                    // keep the smaller mask as the root so roots are class minima
                    match a.cmp(&b) {
                        std::cmp::Ordering::Less => parent[b as usize] = a,
                        std::cmp::Ordering::Greater => parent[a as usize] = b,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
        }
        let canon = (0..states as u32).map(|m| find(&mut parent, m)).collect();
        Ok(ClassTable { space, canon })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn canonical_mask(&self, mask: u64) -> u64 {
        self.canon[mask as usize] as u64
    }

    pub fn canonical(&self, set: &GroundSet) -> GroundSet {
        let mask = set.as_u64().expect("class tables only exist for one-word spaces");
        GroundSet::from_u64(self.space, self.canonical_mask(mask)).expect("mask in range")
    }

    /// Class representatives (canonical masks) in increasing order.
    pub fn representatives(&self) -> Vec<u64> {
        self.canon
            .iter()
            .enumerate()
            .filter(|&(m, &c)| m as u32 == c)
            .map(|(m, _)| m as u64)
            .collect()
    }

    pub fn class_count(&self) -> usize {
        self.representatives().len()
    }
}

/// Builds one of the catalogued matroids with a frozen labeled embedding.
///
/// | name | ground set |
/// |------|------------|
/// | `U_0,0`, `empty` | {} |
/// | `P_k` | `1 ..= 2^k - 1` |
/// | `A_k` | odd-weight elements below `2^k` (for `k = r` this is `cocircuit(2^r - 1)`) |
/// | `U_k,k` | `1, 2, 4, ..., 2^(k-1)` |
/// | `U_k,k+1` (`k >= 2`) | `U_k,k` plus `2^k - 1` |
/// | `F_7` | `1..=7` |
/// | `F_7^*` | `9..=15` |
/// | `F_7+U_1,1` | `1..=8` |
/// | `M(K_4)` | `1..=6` |
/// | `M(K_4\e)` | `1..=5` |
pub fn named_matroid(space: Space, name: &str) -> Result<Matroid> {
    let r = space.rank();
    let need = |k: u32| -> Result<()> {
        if k > r {
            Err(Error::domain(format!("`{name}` has rank {k}, which exceeds r = {r}")))
        } else {
            Ok(())
        }
    };
    let range = |lo: u32, hi: u32| Matroid::from_elements(space, lo..=hi);
    let key: String = name.chars().filter(|c| !matches!(c, '{' | '}' | ' ')).collect();
    match key.as_str() {
        "empty" | "U_0,0" => return Ok(Matroid::empty(space)),
        "F_7" => {
            need(3)?;
            return range(1, 7);
        }
        "F_7^*" | "F_7*" => {
            need(4)?;
            return range(9, 15);
        }
        "F_7+U_1,1" | "F_7⊕U_1,1" => {
            need(4)?;
            return range(1, 8);
        }
        "M(K_4)" | "M(K4)" => {
            need(3)?;
            return range(1, 6);
        }
        "M(K_4\\e)" | "M(K4\\e)" | "M(K_4-e)" | "M(K4-e)" => {
            need(3)?;
            return range(1, 5);
        }
        _ => {}
    }
    let parse_k = |s: &str| -> Result<u32> {
        s.parse()
            .map_err(|_| Error::domain(format!("unknown matroid name `{name}`")))
    };
    if let Some(k) = key.strip_prefix("P_") {
        let k = parse_k(k)?;
        need(k)?;
        return range(1, (1u32 << k) - 1);
    }
    if let Some(k) = key.strip_prefix("A_") {
        let k = parse_k(k)?;
        if k == 0 {
            return Err(Error::domain("A_0 is not defined"));
        }
        need(k)?;
        return Matroid::from_elements(
            space,
            (1u32..(1 << k)).filter(|x| x.count_ones() % 2 == 1),
        );
    }
    if let Some(rest) = key.strip_prefix("U_") {
        if let Some((rank, size)) = rest.split_once(',') {
            let (rank, size) = (parse_k(rank)?, parse_k(size)?);
            need(rank)?;
            let basis = (0..rank).map(|i| 1u32 << i);
            if size == rank {
                return Matroid::from_elements(space, basis);
            }
            if size == rank + 1 && rank >= 2 {
                return Matroid::from_elements(space, basis.chain([(1u32 << rank) - 1]));
            }
        }
    }
    Err(Error::domain(format!("unknown matroid name `{name}`")))
}
