//! The four operations (complementation, switching, local complementation,
//! pointed swaps), hyperplane complementation, and move scripts built from them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::space::{Basis, Element, Functional, GroundSet, SolutionSpace, Space};

/// Whether a pointed swap was centred on a green (on) or red (off) element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SwapKind {
    On,
    Off,
}

impl fmt::Display for SwapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SwapKind::On => "on",
            SwapKind::Off => "off",
        })
    }
}

/// One operation. Every move is an involution on states.
///
/// The derived order (tag, then parameter) is the generator order used by
/// the orbit engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Omega,
    Sigma(Functional),
    Lambda(Functional),
    HypComp(Functional),
    SwapOn(Element),
    SwapOff(Element),
}

pub(crate) fn omega_set(g: &GroundSet) -> GroundSet {
    g.complement()
}

pub(crate) fn sigma_set(g: &GroundSet, a: Functional) -> GroundSet {
    let mut out = g.clone();
    for x in g.space().elements() {
        if a.dot(x) {
            out.toggle_unchecked(x);
        }
    }
    out
}

pub(crate) fn hypcomp_set(g: &GroundSet, a: Functional) -> GroundSet {
    let mut out = g.clone();
    for x in g.space().elements() {
        if !a.dot(x) {
            out.toggle_unchecked(x);
        }
    }
    out
}

/// The set `cl(E(M) ∩ C*) - C*` that local complementation toggles.
pub(crate) fn lambda_region(g: &GroundSet, a: Functional) -> Vec<Element> {
    let basis = Basis::spanning(g.iter().filter(|&x| a.dot(x)));
    if basis.rank() < 2 {
        return Vec::new();
    }
    basis.span().into_iter().filter(|&x| !a.dot(x)).collect()
}

pub(crate) fn lambda_set(g: &GroundSet, a: Functional) -> GroundSet {
    let mut out = g.clone();
    for x in lambda_region(g, a) {
        out.toggle_unchecked(x);
    }
    out
}

/// Translation by `f` of every element other than `f`.
pub(crate) fn swap_set(g: &GroundSet, f: Element) -> GroundSet {
    let mut out = g.space().empty();
    for x in g.iter() {
        out.insert_unchecked(if x == f { f } else { x ^ f });
    }
    out
}

pub fn apply_omega(m: &Matroid) -> Matroid {
    Matroid::new(omega_set(m.ground()))
}

pub fn apply_sigma(m: &Matroid, a: Functional) -> Matroid {
    check_functional(m.space(), a);
    Matroid::new(sigma_set(m.ground(), a))
}

pub fn apply_lambda(m: &Matroid, a: Functional) -> Matroid {
    check_functional(m.space(), a);
    Matroid::new(lambda_set(m.ground(), a))
}

/// `M △ (E(P_r) - C*)`; equal to `omega(sigma_a(M))`.
pub fn apply_hyperplane_complement(m: &Matroid, a: Functional) -> Matroid {
    check_functional(m.space(), a);
    Matroid::new(hypcomp_set(m.ground(), a))
}

/// Pointed swap at `f`, in its translation form.
///
/// # Panics
/// If `f` is not a point of the space.
pub fn apply_pointed_swap(m: &Matroid, f: Element) -> (Matroid, SwapKind) {
    assert!(m.space().contains_element(f as u64), "swap centre {f} outside the space");
    let kind = if m.ground().contains(f) {
        SwapKind::On
    } else {
        SwapKind::Off
    };
    (Matroid::new(swap_set(m.ground(), f)), kind)
}

/// Pointed swap at `f`, in its line form: on each line `{f, x, x + f}`, the
/// colours of `x` and `x + f` are exchanged when they differ.
pub fn pointed_swap_by_lines(m: &Matroid, f: Element) -> Matroid {
    let g = m.ground();
    let mut out = g.clone();
    for x in m.space().elements() {
        let y = x ^ f;
        if x == f || x > y {
            continue;
        }
        if g.contains(x) != g.contains(y) {
            out.toggle_unchecked(x);
            out.toggle_unchecked(y);
        }
    }
    Matroid::new(out)
}

fn check_functional(space: Space, a: Functional) {
    assert!(
        space.contains_element(a.value() as u64),
        "functional {a} outside {space}"
    );
}

impl Move {
    pub fn is_swap(&self) -> bool {
        matches!(self, Move::SwapOn(_) | Move::SwapOff(_))
    }

    /// Checks that the parameter names a point or functional of `space`.
    pub fn validate(&self, space: Space) -> Result<()> {
        match *self {
            Move::Omega => Ok(()),
            Move::Sigma(a) | Move::Lambda(a) | Move::HypComp(a) => {
                space.functional(a.value() as u64).map(|_| ())
            }
            Move::SwapOn(f) | Move::SwapOff(f) => space.check_element(f as u64).map(|_| ()),
        }
    }

    /// Applies the move, enforcing the colour precondition of swap moves.
    pub fn apply(&self, g: &GroundSet) -> std::result::Result<GroundSet, String> {
        self.validate(g.space()).map_err(|e| e.to_string())?;
        Ok(match *self {
            Move::Omega => omega_set(g),
            Move::Sigma(a) => sigma_set(g, a),
            Move::Lambda(a) => lambda_set(g, a),
            Move::HypComp(a) => hypcomp_set(g, a),
            Move::SwapOn(f) => {
                if !g.contains(f) {
                    return Err(format!("on-element swap needs {f} green, but it is red"));
                }
                swap_set(g, f)
            }
            Move::SwapOff(f) => {
                if g.contains(f) {
                    return Err(format!("off-element swap needs {f} red, but it is green"));
                }
                swap_set(g, f)
            }
        })
    }

    /// The swap move at `f` whose kind matches the colour of `f` in `g`.
    pub fn swap_for(g: &GroundSet, f: Element) -> Move {
        if g.contains(f) {
            Move::SwapOn(f)
        } else {
            Move::SwapOff(f)
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Omega => f.write_str("omega"),
            Move::Sigma(a) => write!(f, "sigma a={a}"),
            Move::Lambda(a) => write!(f, "lambda a={a}"),
            Move::HypComp(a) => write!(f, "hypcomp a={a}"),
            Move::SwapOn(x) => write!(f, "swap+ f={x}"),
            Move::SwapOff(x) => write!(f, "swap- f={x}"),
        }
    }
}

impl FromStr for Move {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut parts = s.split_whitespace();
        let head = parts.next().ok_or("empty move")?;
        let arg = parts.next();
        if let Some(extra) = parts.next() {
            return Err(format!("unexpected `{extra}`"));
        }
        let param = |key: &str| -> std::result::Result<u32, String> {
            let arg = arg.ok_or_else(|| format!("`{head}` needs `{key}=<int>`"))?;
            let value = arg
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| format!("expected `{key}=<int>`, got `{arg}`"))?;
            let v: u32 = value
                .parse()
                .map_err(|_| format!("invalid integer `{value}`"))?;
            if v == 0 {
                return Err(format!("`{key}` must be nonzero"));
            }
            Ok(v)
        };
        let mv = match head {
            "omega" => {
                if let Some(a) = arg {
                    return Err(format!("`omega` takes no argument, got `{a}`"));
                }
                Move::Omega
            }
            "sigma" => Move::Sigma(Functional(param("a")?)),
            "lambda" => Move::Lambda(Functional(param("a")?)),
            "hypcomp" => Move::HypComp(Functional(param("a")?)),
            "swap+" => Move::SwapOn(param("f")?),
            "swap-" => Move::SwapOff(param("f")?),
            other => return Err(format!("unknown move `{other}`")),
        };
        Ok(mv)
    }
}

/// An ordered script of moves, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MoveSequence {
    moves: Vec<Move>,
}

impl MoveSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn push(&mut self, mv: Move) {
        self.moves.push(mv);
    }

    pub fn append(&mut self, other: &MoveSequence) {
        self.moves.extend_from_slice(&other.moves);
    }

    /// The inverse script. Every move is an involution and a swap never
    /// changes the colour of its own centre, so reversing the order suffices.
    pub fn reversed(&self) -> MoveSequence {
        MoveSequence {
            moves: self.moves.iter().rev().copied().collect(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Move> {
        self.moves.iter()
    }

    /// One move per line, in the text syntax.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for mv in &self.moves {
            out.push_str(&mv.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses one move per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<MoveSequence> {
        let mut moves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            moves.push(line.parse().map_err(|msg| Error::parse(idx + 1, msg))?);
        }
        Ok(MoveSequence { moves })
    }
}

impl From<Vec<Move>> for MoveSequence {
    fn from(moves: Vec<Move>) -> Self {
        MoveSequence { moves }
    }
}

impl FromIterator<Move> for MoveSequence {
    fn from_iter<I: IntoIterator<Item = Move>>(iter: I) -> Self {
        MoveSequence {
            moves: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a MoveSequence {
    type Item = &'a Move;
    type IntoIter = std::slice::Iter<'a, Move>;
    fn into_iter(self) -> Self::IntoIter {
        self.moves.iter()
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, mv) in self.moves.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{mv}")?;
        }
        f.write_str("]")
    }
}

/// The states visited by a replay: `states[0]` is the start and
/// `states[i + 1]` follows move `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<GroundSet>,
    /// Indices of local complementations that changed nothing (trace of rank below two).
    pub noops: Vec<usize>,
}

impl Trajectory {
    pub fn last(&self) -> &GroundSet {
        self.states.last().expect("a trajectory holds at least its start")
    }
}

pub fn replay(space: Space, start: &Matroid, seq: &MoveSequence) -> Result<Matroid> {
    replay_trajectory(space, start, seq).map(|t| Matroid::new(t.last().clone()))
}

pub fn replay_trajectory(space: Space, start: &Matroid, seq: &MoveSequence) -> Result<Trajectory> {
    if start.space() != space {
        return Err(Error::SpaceMismatch {
            left: space.rank(),
            right: start.space().rank(),
        });
    }
    let mut states = Vec::with_capacity(seq.len() + 1);
    let mut noops = Vec::new();
    states.push(start.ground().clone());
    for (index, mv) in seq.iter().enumerate() {
        let current = states.last().expect("non-empty");
        let next = mv.apply(current).map_err(|reason| Error::Replay {
            index,
            mv: mv.to_string(),
            reason,
        })?;
        if matches!(mv, Move::Lambda(_)) && next == *current {
            noops.push(index);
        }
        states.push(next);
    }
    Ok(Trajectory { states, noops })
}

/// A word in complementation and switching reduced to one of `ι`, `ω`, `σ_a`, `ωσ_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SigmaOmegaWord {
    pub omega: bool,
    pub sigma: Option<Functional>,
}

impl SigmaOmegaWord {
    pub fn to_sequence(&self) -> MoveSequence {
        let mut seq = MoveSequence::new();
        if let Some(a) = self.sigma {
            seq.push(Move::Sigma(a));
        }
        if self.omega {
            seq.push(Move::Omega);
        }
        seq
    }
}

impl fmt::Display for SigmaOmegaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.omega, self.sigma) {
            (false, None) => f.write_str("ι"),
            (true, None) => f.write_str("ω"),
            (false, Some(a)) => write!(f, "σ_{a}"),
            (true, Some(a)) => write!(f, "ωσ_{a}"),
        }
    }
}

pub fn normalize_sigma_omega(seq: &MoveSequence) -> Result<SigmaOmegaWord> {
    let mut omega = false;
    let mut acc = 0u32;
    for (i, mv) in seq.iter().enumerate() {
        match mv {
            Move::Omega => omega = !omega,
            Move::Sigma(a) => acc ^= a.value(),
            other => {
                return Err(Error::domain(format!(
                    "move {i} (`{other}`) is neither a complementation nor a switching"
                )))
            }
        }
    }
    Ok(SigmaOmegaWord {
        omega,
        sigma: (acc != 0).then_some(Functional(acc)),
    })
}

/// Writes `σ_a` as switchings on the row cocircuits of the standard
/// representation with respect to `basis`.
///
/// Row `i` of that representation is cut out by the dual-basis functional
/// `β_i` (`β_i . b_j = δ_ij`), and `a = Σ (a . b_i) β_i`.
pub fn decompose_into_row_switchings(
    space: Space,
    a: Functional,
    basis: &[Element],
) -> Result<MoveSequence> {
    space.functional(a.value() as u64)?;
    let r = space.rank();
    if basis.len() != r as usize {
        return Err(Error::domain(format!(
            "a basis of {space} has {r} elements, got {}",
            basis.len()
        )));
    }
    for &b in basis {
        space.check_element(b as u64)?;
    }
    if Basis::spanning(basis.iter().copied()).rank() != r {
        return Err(Error::domain(format!("{basis:?} is not a basis of {space}")));
    }
    let mut seq = MoveSequence::new();
    for (i, &b) in basis.iter().enumerate() {
        if !a.dot(b) {
            continue;
        }
        let dual = SolutionSpace::solve(r, basis.iter().enumerate().map(|(j, &bj)| (bj, i == j)))
            .and_then(|s| s.min_nonzero())
            .ok_or_else(|| Error::Internal("dual basis system must be solvable".into()))?;
        seq.push(Move::Sigma(Functional(dual)));
    }
    Ok(seq)
}

/// The three hyperplane complementations around a rank-`(r-2)` flat, whose
/// composite is complementation. Ordered by increasing functional.
pub fn omega_as_three_hyperplanes(space: Space, flat: &GroundSet) -> Result<MoveSequence> {
    let r = space.rank();
    if r < 2 {
        return Err(Error::domain("complementation by hyperplanes needs r > 1"));
    }
    if flat.space() != space {
        return Err(Error::SpaceMismatch {
            left: r,
            right: flat.space().rank(),
        });
    }
    if !space.is_flat(flat) || space.rank_of(flat) != r - 2 {
        return Err(Error::domain(format!(
            "{flat} is not a flat of rank {} in {space}",
            r - 2
        )));
    }
    let annihilator = SolutionSpace::solve(r, flat.iter().map(|x| (x, false)))
        .ok_or_else(|| Error::Internal("homogeneous system is always solvable".into()))?;
    let gens: Vec<u32> = annihilator.kernel().vectors().collect();
    if gens.len() != 2 {
        return Err(Error::Internal(format!(
            "annihilator of a rank-{} flat has dimension {}",
            r - 2,
            gens.len()
        )));
    }
    let mut functionals = [gens[0], gens[1], gens[0] ^ gens[1]];
    functionals.sort_unstable();
    Ok(functionals
        .into_iter()
        .map(|a| Move::HypComp(Functional(a)))
        .collect())
}

/// The rank-`(r-2)` flat spanned by the first `r - 2` coordinate vectors.
pub fn standard_corank_two_flat(space: Space) -> GroundSet {
    let r = space.rank();
    let top = if r >= 2 { (1u32 << (r - 2)) - 1 } else { 0 };
    GroundSet::from_elements(space, 1..=top).expect("prefix of the points")
}

/// Complementation as three hyperplane complementations around
/// [`standard_corank_two_flat`].
pub fn omega_expansion(space: Space) -> Result<MoveSequence> {
    omega_as_three_hyperplanes(space, &standard_corank_two_flat(space))
}
