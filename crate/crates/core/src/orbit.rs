//! Breadth-first orbits of labeled states under a chosen set of generators.
//!
//! Every generator is an involution, so orbit membership is symmetric and a
//! path to any visited state is read off the predecessor links.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matroid::{ClassTable, Matroid};
use crate::moves::{self, Move, MoveSequence};
use crate::space::{GroundSet, Space};

/// States above this rank need an explicit visit budget.
pub const UNBUDGETED_MAX_RANK: u32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    pub omega: bool,
    pub sigma: bool,
    /// Switchings on the standard row cocircuits only (ignored when `sigma` is set).
    pub row_sigma: bool,
    pub lambda: bool,
    pub hypcomp: bool,
    pub swap_on: bool,
    pub swap_off: bool,
}

impl GeneratorSet {
    /// Parses a comma list of
    /// `omega, sigma, lambda, swap, swap+, swap-, hypcomp, row-sigma`.
    pub fn parse(list: &str) -> Result<GeneratorSet> {
        let mut gens = GeneratorSet::default();
        for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "omega" => gens.omega = true,
                "sigma" => gens.sigma = true,
                "row-sigma" => gens.row_sigma = true,
                "lambda" => gens.lambda = true,
                "hypcomp" => gens.hypcomp = true,
                "swap" => {
                    gens.swap_on = true;
                    gens.swap_off = true;
                }
                "swap+" => gens.swap_on = true,
                "swap-" => gens.swap_off = true,
                other => return Err(Error::domain(format!("unknown generator `{other}`"))),
            }
        }
        gens.validated()
    }

    pub fn validated(self) -> Result<GeneratorSet> {
        if self == GeneratorSet::default() {
            Err(Error::domain("the generator set is empty"))
        } else {
            Ok(self)
        }
    }

    pub fn sigma_omega() -> Self {
        GeneratorSet {
            omega: true,
            sigma: true,
            ..Default::default()
        }
    }

    pub fn sigma_omega_lambda() -> Self {
        GeneratorSet {
            lambda: true,
            ..Self::sigma_omega()
        }
    }

    pub fn lambda_swap() -> Self {
        GeneratorSet {
            lambda: true,
            swap_on: true,
            swap_off: true,
            ..Default::default()
        }
    }

    /// Moves applicable at `state`, sorted by tag then parameter.
    pub fn moves_at(&self, state: &GroundSet) -> Vec<Move> {
        let space = state.space();
        let mut out = Vec::new();
        if self.omega {
            out.push(Move::Omega);
        }
        if self.sigma {
            out.extend(space.functionals().map(Move::Sigma));
        } else if self.row_sigma {
            out.extend(space.row_functionals().map(Move::Sigma));
        }
        if self.lambda {
            out.extend(space.functionals().map(Move::Lambda));
        }
        if self.hypcomp {
            out.extend(space.functionals().map(Move::HypComp));
        }
        if self.swap_on {
            out.extend(state.iter().map(Move::SwapOn));
        }
        if self.swap_off {
            out.extend(state.complement().iter().map(Move::SwapOff));
        }
        out
    }

    fn apply(mv: Move, state: &GroundSet) -> GroundSet {
        match mv {
            Move::Omega => moves::omega_set(state),
            Move::Sigma(a) => moves::sigma_set(state, a),
            Move::Lambda(a) => moves::lambda_set(state, a),
            Move::HypComp(a) => moves::hypcomp_set(state, a),
            Move::SwapOn(f) | Move::SwapOff(f) => moves::swap_set(state, f),
        }
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.omega {
            names.push("omega");
        }
        if self.sigma {
            names.push("sigma");
        } else if self.row_sigma {
            names.push("row-sigma");
        }
        if self.lambda {
            names.push("lambda");
        }
        if self.hypcomp {
            names.push("hypcomp");
        }
        match (self.swap_on, self.swap_off) {
            (true, true) => names.push("swap"),
            (true, false) => names.push("swap+"),
            (false, true) => names.push("swap-"),
            _ => {}
        }
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Debug)]
enum VisitIndex {
    /// One slot per mask; used while the state space fits a flat table.
    Dense(Vec<u32>),
    Sparse(HashMap<GroundSet, u32>),
}

const UNSEEN: u32 = u32::MAX;

impl VisitIndex {
    fn for_space(space: Space) -> Self {
        if space.rank() <= UNBUDGETED_MAX_RANK {
            VisitIndex::Dense(vec![UNSEEN; 1 << space.size()])
        } else {
            VisitIndex::Sparse(HashMap::new())
        }
    }

    fn get(&self, state: &GroundSet) -> Option<u32> {
        match self {
            VisitIndex::Dense(slots) => {
                let i = slots[state.as_u64().expect("dense index holds one-word states") as usize];
                (i != UNSEEN).then_some(i)
            }
            VisitIndex::Sparse(map) => map.get(state).copied(),
        }
    }

    fn insert(&mut self, state: &GroundSet, idx: u32) {
        match self {
            VisitIndex::Dense(slots) => {
                slots[state.as_u64().expect("dense index holds one-word states") as usize] = idx
            }
            VisitIndex::Sparse(map) => {
                map.insert(state.clone(), idx);
            }
        }
    }
}

/// The visited states of a search, each with the move that first reached it.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    space: Space,
    gens: GeneratorSet,
    states: Vec<GroundSet>,
    parents: Vec<Option<(u32, Move)>>,
    index: VisitIndex,
}

impl OrbitTable {
    fn new(space: Space, gens: GeneratorSet, root: GroundSet) -> Self {
        let mut index = VisitIndex::for_space(space);
        index.insert(&root, 0);
        OrbitTable {
            space,
            gens,
            states: vec![root],
            parents: vec![None],
            index,
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn generators(&self) -> GeneratorSet {
        self.gens
    }

    pub fn root(&self) -> &GroundSet {
        &self.states[0]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Visited states in discovery order.
    pub fn states(&self) -> &[GroundSet] {
        &self.states
    }

    pub fn contains(&self, state: &GroundSet) -> bool {
        state.space() == self.space && self.index.get(state).is_some()
    }

    pub fn predecessor(&self, state: &GroundSet) -> Option<(&GroundSet, Move)> {
        let i = self.index.get(state)?;
        self.parents[i as usize].map(|(p, mv)| (&self.states[p as usize], mv))
    }

    /// The moves leading from the root to `state`, checked by replay.
    pub fn path_to(&self, state: &GroundSet) -> Result<Option<MoveSequence>> {
        if !self.contains(state) {
            return Ok(None);
        }
        let mut i = self.index.get(state).expect("visited");
        let mut moves = Vec::new();
        while let Some((p, mv)) = self.parents[i as usize] {
            moves.push(mv);
            i = p;
        }
        moves.reverse();
        let seq = MoveSequence::from(moves);
        let reached = moves::replay(self.space, &Matroid::new(self.root().clone()), &seq)?;
        if reached.ground() != state {
            return Err(Error::Internal(format!(
                "extracted path replays to {} instead of {state}",
                reached.ground()
            )));
        }
        Ok(Some(seq))
    }

    /// One line per state: `state_hex predecessor_hex move` (`- root` for the root).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (state, parent) in self.states.iter().zip(&self.parents) {
            match parent {
                None => out.push_str(&format!("{} - root\n", state.to_hex())),
                Some((p, mv)) => out.push_str(&format!(
                    "{} {} {}\n",
                    state.to_hex(),
                    self.states[*p as usize].to_hex(),
                    mv
                )),
            }
        }
        out
    }
}

enum Stop<'a> {
    Exhaust,
    At(&'a GroundSet),
}

fn search(
    space: Space,
    start: &Matroid,
    gens: GeneratorSet,
    budget: Option<usize>,
    stop: Stop<'_>,
) -> Result<(OrbitTable, bool)> {
    let gens = gens.validated()?;
    if start.space() != space {
        return Err(Error::SpaceMismatch {
            left: space.rank(),
            right: start.space().rank(),
        });
    }
    if space.rank() > UNBUDGETED_MAX_RANK && budget.is_none() {
        return Err(Error::Unsupported(format!(
            "orbits at r = {} need an explicit visit budget",
            space.rank()
        )));
    }
    let budget = budget.unwrap_or(usize::MAX);
    let mut table = OrbitTable::new(space, gens, start.ground().clone());
    if let Stop::At(target) = stop {
        if target == start.ground() {
            return Ok((table, true));
        }
    }
    let mut level = 0..1usize;
    while !level.is_empty() {
        let discovered: Vec<Vec<(GroundSet, Move)>> = table.states[level.clone()]
            .par_iter()
            .map(|state| {
                gens.moves_at(state)
                    .into_iter()
                    .map(|mv| (GeneratorSet::apply(mv, state), mv))
                    .filter(|(child, _)| child != state)
                    .collect()
            })
            .collect();
        let next_start = table.states.len();
        for (offset, children) in discovered.into_iter().enumerate() {
            let parent = (level.start + offset) as u32;
            for (child, mv) in children {
                if table.index.get(&child).is_some() {
                    continue;
                }
                if table.states.len() >= budget {
                    let frontier_from = level.start + offset;
                    let mut frontier: Vec<GroundSet> = table.states[frontier_from..].to_vec();
                    frontier.sort();
                    return Err(Error::BudgetExhausted {
                        budget,
                        visited: table.states.len(),
                        frontier,
                    });
                }
                let idx = table.states.len() as u32;
                table.index.insert(&child, idx);
                table.states.push(child);
                table.parents.push(Some((parent, mv)));
                if let Stop::At(target) = stop {
                    if table.states[idx as usize] == *target {
                        return Ok((table, true));
                    }
                }
            }
        }
        level = next_start..table.states.len();
    }
    Ok((table, false))
}

/// The full orbit of `start`.
///
/// Above `r = 4` a `budget` (maximum number of visited states) is required;
/// exceeding it yields [`Error::BudgetExhausted`] with the unexpanded frontier.
pub fn orbit(
    space: Space,
    start: &Matroid,
    gens: GeneratorSet,
    budget: Option<usize>,
) -> Result<OrbitTable> {
    search(space, start, gens, budget, Stop::Exhaust).map(|(t, _)| t)
}

/// A shortest move sequence from `from` to `to`, or `None` when `to` lies
/// outside the orbit.
pub fn reachable(
    space: Space,
    from: &Matroid,
    to: &Matroid,
    gens: GeneratorSet,
    budget: Option<usize>,
) -> Result<Option<MoveSequence>> {
    if to.space() != space {
        return Err(Error::SpaceMismatch {
            left: space.rank(),
            right: to.space().rank(),
        });
    }
    match search(space, from, gens, budget, Stop::At(to.ground())) {
        Ok((table, true)) => table.path_to(to.ground()),
        Ok((_, false)) => Ok(None),
        Err(Error::BudgetExhausted { budget, .. }) => Err(Error::Indeterminate { budget }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeCoverage {
    pub size: usize,
    pub states_visited: u64,
    pub states_total: BigUint,
    /// Visited and total `GL(r, 2)` classes, when a class table is available.
    pub classes: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub space: Space,
    pub by_size: Vec<SizeCoverage>,
}

impl CoverageReport {
    pub fn states_visited(&self) -> u64 {
        self.by_size.iter().map(|s| s.states_visited).sum()
    }

    pub fn classes_visited(&self) -> Option<(u64, u64)> {
        self.by_size.iter().try_fold((0, 0), |(v, t), s| {
            s.classes.map(|(cv, ct)| (v + cv, t + ct))
        })
    }

    pub fn covers_all_classes(&self) -> Option<bool> {
        self.classes_visited().map(|(v, t)| v == t)
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.by_size {
            write!(f, "size {:>3}: states {}/{}", s.size, s.states_visited, s.states_total)?;
            if let Some((v, t)) = s.classes {
                write!(f, " classes {v}/{t}")?;
            }
            writeln!(f)?;
        }
        let total: BigUint = BigUint::from(1u8) << self.space.size();
        write!(f, "total: states {}/{}", self.states_visited(), total)?;
        if let Some((v, t)) = self.classes_visited() {
            write!(f, " classes {v}/{t}")?;
        }
        writeln!(f)
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Per-cardinality counts of visited states, and of visited canonical classes when `r <= 4`.
pub fn coverage_report(table: &OrbitTable) -> CoverageReport {
    let space = table.space();
    let n = space.size() as usize;
    let mut visited = vec![0u64; n + 1];
    for s in table.states() {
        visited[s.len()] += 1;
    }
    let classes = ClassTable::new(space).ok().map(|ct| {
        let mut total = vec![0u64; n + 1];
        for rep in ct.representatives() {
            total[rep.count_ones() as usize] += 1;
        }
        let mut seen = vec![false; 1 << n];
        let mut hit = vec![0u64; n + 1];
        for s in table.states() {
            let c = ct.canonical_mask(s.as_u64().expect("one-word state")) as usize;
            if !seen[c] {
                seen[c] = true;
                hit[c.count_ones() as usize] += 1;
            }
        }
        (hit, total)
    });
    let by_size = (0..=n)
        .map(|k| SizeCoverage {
            size: k,
            states_visited: visited[k],
            states_total: binomial(n as u64, k as u64),
            classes: classes.as_ref().map(|(hit, total)| (hit[k], total[k])),
        })
        .collect();
    CoverageReport { space, by_size }
}
