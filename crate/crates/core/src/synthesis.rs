//! Constructive move sequences from `P_r` to an arbitrary labeled restriction.
//!
//! Every synthesizer builds its sequence from explicit constructions, replays
//! it from the full geometry, and refuses to return anything that does not
//! land exactly on the requested ground set. All moves are involutions, so a
//! chain built from the target towards a simpler state can be reversed.

use crate::error::{Error, Result};
use crate::matroid::{named_matroid, Matroid};
use crate::moves::{self, omega_expansion, Move, MoveSequence, SwapKind};
use crate::orbit::{orbit, reachable, GeneratorSet};
use crate::space::{Basis, Element, Functional, GroundSet, Space};

/// A verified sequence from `P_r` to `target`, with every intermediate state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub seq: MoveSequence,
    pub trajectory: Vec<GroundSet>,
    pub target: GroundSet,
}

impl SynthesisResult {
    /// Replays `seq` from `P_r` and checks that it ends on `target`.
    pub fn verify(space: Space, seq: MoveSequence, target: &GroundSet) -> Result<SynthesisResult> {
        let trajectory = moves::replay_trajectory(space, &Matroid::full(space), &seq)?;
        if trajectory.last() != target {
            return Err(Error::Internal(format!(
                "synthesized sequence ends on {} instead of {target}",
                trajectory.last()
            )));
        }
        Ok(SynthesisResult {
            seq,
            trajectory: trajectory.states,
            target: target.clone(),
        })
    }

    /// `state_hex move` per line, starting with the initial state.
    pub fn trajectory_text(&self) -> String {
        let mut out = format!("{} start\n", self.trajectory[0].to_hex());
        for (state, mv) in self.trajectory[1..].iter().zip(self.seq.iter()) {
            out.push_str(&format!("{} {mv}\n", state.to_hex()));
        }
        out
    }
}

/// Appends moves while tracking the current state, rejecting illegal swaps.
struct Builder {
    state: GroundSet,
    seq: MoveSequence,
}

impl Builder {
    fn new(start: GroundSet) -> Self {
        Builder {
            state: start,
            seq: MoveSequence::new(),
        }
    }

    fn push(&mut self, mv: Move) -> Result<()> {
        self.state = mv.apply(&self.state).map_err(|reason| Error::Internal(format!("{mv}: {reason}")))?;
        self.seq.push(mv);
        Ok(())
    }

    fn extend(&mut self, seq: &MoveSequence) -> Result<()> {
        seq.iter().try_for_each(|&mv| self.push(mv))
    }

    fn swaps_to(&mut self, target: &GroundSet) -> Result<()> {
        let seq = synth_same_size(&Matroid::new(self.state.clone()), target)?;
        self.extend(&seq)
    }
}

fn check_space(space: Space, set: &GroundSet) -> Result<()> {
    if set.space() != space {
        return Err(Error::SpaceMismatch {
            left: space.rank(),
            right: set.space().rank(),
        });
    }
    Ok(())
}

/// Exchanges the colours of a red `e` and a green `f` with three pointed swaps.
pub fn synth_swap_exchange(m: &Matroid, e: Element, f: Element) -> Result<MoveSequence> {
    let space = m.space();
    space.check_element(e as u64)?;
    space.check_element(f as u64)?;
    if m.ground().contains(e) {
        return Err(Error::domain(format!("{e} must be red, but it is green")));
    }
    if !m.ground().contains(f) {
        return Err(Error::domain(format!("{f} must be green, but it is red")));
    }
    Ok(MoveSequence::from(vec![Move::SwapOff(e), Move::SwapOn(f ^ e), Move::SwapOff(f)]))
}

/// Pointed swaps turning `m` into the equal-sized `target`, one colour
/// exchange per pair, pairing both differences in ascending order.
pub fn synth_same_size(m: &Matroid, target: &GroundSet) -> Result<MoveSequence> {
    check_space(m.space(), target)?;
    let g = m.ground();
    if g.len() != target.len() {
        return Err(Error::domain(format!(
            "same-size synthesis needs equal sizes, got {} and {}",
            g.len(),
            target.len()
        )));
    }
    let mut seq = MoveSequence::new();
    for (f, e) in g.difference(target).iter().zip(target.difference(g).iter()) {
        seq.push(Move::SwapOff(e));
        seq.push(Move::SwapOn(f ^ e));
        seq.push(Move::SwapOff(f));
    }
    Ok(seq)
}

fn smallest_functional(space: Space, pred: impl Fn(Functional) -> bool) -> Functional {
    space
        .functionals()
        .find(|&a| pred(a))
        .expect("a functional with the requested values exists")
}

/// Builds a sequence from `P_r` to `target` out of pointed swaps and
/// hyperplane complementations.
fn full_sequence(space: Space, target: &GroundSet) -> Result<MoveSequence> {
    if target.is_full() {
        return Ok(MoveSequence::new());
    }
    match target.len() {
        0 => omega_expansion(space),
        1 => {
            let t = target.first().expect("one element");
            let b = smallest_functional(space, |b| b.dot(t));
            let mut builder = Builder::new(space.full());
            builder.push(Move::HypComp(b))?;
            let mut landing = space.hyperplane(b);
            landing.insert(t)?;
            builder.swaps_to(&landing)?;
            builder.push(Move::HypComp(b))?;
            Ok(builder.seq)
        }
        _ => {
            let mut it = target.iter();
            let (x, y) = (it.next().unwrap(), it.next().unwrap());
            let a = smallest_functional(space, |a| a.dot(x) && a.dot(y));
            let hyperplane = space.hyperplane(a);
            if hyperplane.is_subset(target) {
                let mut seq = full_sequence(space, &target.difference(&hyperplane))?;
                seq.push(Move::HypComp(a));
                return Ok(seq);
            }
            let z = hyperplane
                .difference(target)
                .first()
                .expect("the hyperplane has a red point");
            let omega = omega_expansion(space)?;
            let mut chain = Builder::new(target.clone());
            chain.extend(&synth_swap_exchange(&Matroid::new(chain.state.clone()), z, x)?)?;
            chain.extend(&omega)?;
            chain.push(Move::HypComp(a))?;
            chain.extend(&synth_swap_exchange(&Matroid::new(chain.state.clone()), y, z)?)?;
            chain.push(Move::HypComp(a))?;
            chain.extend(&omega)?;
            let mut smaller = target.clone();
            smaller.remove(x)?;
            smaller.remove(y)?;
            if chain.state != smaller {
                return Err(Error::Internal(format!(
                    "removal chain at {target} ends on {}",
                    chain.state
                )));
            }
            let mut seq = full_sequence(space, &smaller)?;
            seq.append(&chain.seq.reversed());
            Ok(seq)
        }
    }
}

/// Synthesis with pointed swaps and hyperplane complementations.
///
/// Two green points `x < y` are removed per round: with `a` the least
/// functional that is one on both, and `z` the least red point of the
/// hyperplane `a = 0`, the chain exchanges `z` and `x`, switches at `a`,
/// exchanges `y` and `z` and switches back, with each switching written as a
/// complementation (three hyperplane complements) and one hyperplane
/// complement. If the hyperplane is all green, it is complemented instead.
pub fn synth_full(space: Space, target: &GroundSet) -> Result<SynthesisResult> {
    check_space(space, target)?;
    if space.rank() == 1 {
        if target.is_full() {
            return SynthesisResult::verify(space, MoveSequence::new(), target);
        }
        return Err(Error::Unsupported(
            "P_1 has no moves reaching the empty set".into(),
        ));
    }
    let seq = full_sequence(space, target)?;
    SynthesisResult::verify(space, seq, target)
}

/// Synthesis using swaps of one kind only, plus hyperplane complementations.
///
/// Each swap of the other kind is conjugated by complementation, which turns
/// a green centre red and back.
pub fn synth_single_swap_kind(space: Space, target: &GroundSet, kind: SwapKind) -> Result<SynthesisResult> {
    let full = synth_full(space, target)?;
    let omega = if space.rank() >= 2 {
        omega_expansion(space)?
    } else {
        MoveSequence::new()
    };
    let mut seq = MoveSequence::new();
    for &mv in full.seq.iter() {
        let swapped = match (mv, kind) {
            (Move::SwapOn(f), SwapKind::Off) => Some(Move::SwapOff(f)),
            (Move::SwapOff(f), SwapKind::On) => Some(Move::SwapOn(f)),
            _ => None,
        };
        match swapped {
            Some(allowed) => {
                seq.append(&omega);
                seq.push(allowed);
                seq.append(&omega);
            }
            None => seq.push(mv),
        }
    }
    SynthesisResult::verify(space, seq, target)
}

/// Adds the third point of the line through the two least coloops by a local
/// complementation at a cocircuit meeting the ground set in those two coloops.
pub fn grow_by_coloop(m: &Matroid) -> Result<(Move, Matroid)> {
    let coloops = m.coloops();
    let mut it = coloops.iter();
    let (e, f) = match (it.next(), it.next()) {
        (Some(e), Some(f)) => (e, f),
        _ => {
            return Err(Error::domain(format!(
                "{} has {} coloop(s); two are needed",
                m.ground(),
                coloops.len()
            )))
        }
    };
    let trace = GroundSet::from_elements(m.space(), [e, f])?;
    let a = m
        .find_cocircuit_with_trace(&trace)?
        .ok_or_else(|| Error::Internal(format!("no cocircuit meets {} in {{{e},{f}}}", m.ground())))?;
    let mv = Move::Lambda(a);
    let grown = mv.apply(m.ground()).map_err(Error::Internal)?;
    let mut expected = m.ground().clone();
    expected.insert(e ^ f)?;
    if grown != expected {
        return Err(Error::Internal(format!("local complementation gave {grown}")));
    }
    Ok((mv, Matroid::new(grown)))
}

/// A `k`-point restriction with at least two coloops: the first `k - 2`
/// points of the flat spanned by the first `r - 2` coordinates, plus the
/// last two coordinate vectors.
///
/// For small `k` the points taken from the flat can be independent and are
/// then coloops as well.
pub fn coloop_pair_seed(space: Space, k: usize) -> Result<Matroid> {
    let r = space.rank();
    if r < 3 {
        return Err(Error::domain(format!("coloop seeds need r >= 3, got {r}")));
    }
    let max = (1usize << (r - 2)) + 1;
    if !(2..=max).contains(&k) {
        return Err(Error::domain(format!("k must lie in 2..={max}, got {k}")));
    }
    let flat_part = (1..(1u32 << (r - 2))).take(k - 2);
    let coloops = [1u32 << (r - 2), 1u32 << (r - 1)];
    Matroid::from_elements(space, flat_part.chain(coloops))
}

/// The lexicographically least basis of `P_r` inside `set`.
fn least_basis(set: &GroundSet) -> Vec<Element> {
    let mut basis = Basis::new();
    set.iter().filter(|&x| basis.insert(x)).collect()
}

/// The cocircuit used by the local-complementation constructions.
const WORK: Functional = Functional(1);

struct LambdaPlan {
    space: Space,
    cocircuit: GroundSet,
    hyperplane: GroundSet,
    basis: GroundSet,
}

impl LambdaPlan {
    fn new(space: Space) -> Self {
        let cocircuit = space.cocircuit(WORK);
        let basis = GroundSet::from_elements(space, least_basis(&cocircuit)).expect("points");
        LambdaPlan {
            space,
            hyperplane: space.hyperplane(WORK),
            cocircuit,
            basis,
        }
    }

    /// `λ` at the working cocircuit; the trace must span so the whole
    /// hyperplane is toggled.
    fn lambda(&self, b: &mut Builder) -> Result<()> {
        let before = b.state.clone();
        b.push(Move::Lambda(WORK))?;
        if b.state != before.symmetric_difference(&self.hyperplane) {
            return Err(Error::Internal("local complementation did not toggle the hyperplane".into()));
        }
        Ok(())
    }

    /// From the cocircuit state, exchange the first `k` points of
    /// `C* - keep` with the first `k` hyperplane points, then apply `λ`.
    fn exchange_and_flip(&self, b: &mut Builder, keep: &GroundSet, k: usize) -> Result<()> {
        let outgoing: Vec<_> = b.state.intersection(&self.cocircuit).difference(keep).iter().take(k).collect();
        let incoming: Vec<_> = self.hyperplane.difference(&b.state).iter().take(k).collect();
        if outgoing.len() < k || incoming.len() < k {
            return Err(Error::Internal(format!("cannot make {k} exchanges")));
        }
        for (f, e) in outgoing.into_iter().zip(incoming) {
            let ex = synth_swap_exchange(&Matroid::new(b.state.clone()), e, f)?;
            b.extend(&ex)?;
        }
        self.lambda(b)
    }

    /// From `P_r` to some state of odd size `s >= 2r - 1`.
    fn odd(&self, b: &mut Builder, s: usize) -> Result<()> {
        let n = self.space.size() as usize;
        self.lambda(b)?;
        self.exchange_and_flip(b, &self.basis, (n - s) / 2)
    }

    /// From `P_r` to some state of even size `s >= 2r`.
    fn even(&self, b: &mut Builder, s: usize) -> Result<()> {
        let n = self.space.size() as usize;
        let half = self.cocircuit.len();
        let e = self
            .cocircuit
            .difference(&self.basis)
            .iter()
            .last()
            .expect("the cocircuit is larger than a basis");
        self.odd(b, half - 1)?;
        let mut punctured = self.cocircuit.clone();
        punctured.remove(e)?;
        b.swaps_to(&punctured)?;
        self.exchange_and_flip(b, &self.basis, (n - 1 - s) / 2)
    }

    fn reach_size(&self, b: &mut Builder, s: usize) -> Result<()> {
        if s % 2 == 1 {
            self.odd(b, s)
        } else {
            self.even(b, s)
        }
    }
}

/// Synthesis with local complementations and pointed swaps only.
///
/// For `r <= 3` a breadth-first search is used. Otherwise large targets come
/// from `λ` to a cocircuit, colour exchanges that keep a basis of the
/// cocircuit green, and `λ` back. Small targets are reached by descending
/// through coloop seeds: each seed is one local complementation away from a
/// state one point larger, which same-size swaps reach from the previous seed.
pub fn synth_lambda_swap(space: Space, target: &GroundSet) -> Result<SynthesisResult> {
    check_space(space, target)?;
    let r = space.rank();
    let s = target.len();
    if s < 2 {
        return Err(Error::domain(format!(
            "{target} has fewer than two points; restrictions isomorphic to U_0,0 or U_1,1 are excluded"
        )));
    }
    if target.is_full() {
        return SynthesisResult::verify(space, MoveSequence::new(), target);
    }
    if r <= 3 {
        let seq = reachable(
            space,
            &Matroid::full(space),
            &Matroid::new(target.clone()),
            GeneratorSet::lambda_swap(),
            None,
        )?
        .ok_or_else(|| Error::Internal(format!("{target} is outside the orbit of P_{r}")))?;
        return SynthesisResult::verify(space, seq, target);
    }

    let plan = LambdaPlan::new(space);
    let mut b = Builder::new(space.full());
    let small_max = (1usize << (r - 2)) + 2;
    if s > small_max {
        plan.reach_size(&mut b, s)?;
    } else {
        // M' keeps the basis and fills up with the least cocircuit points; the
        // bridge M' + H is large enough for the direct route and λ maps it to M'.
        let mut seed = plan.basis.clone();
        for x in plan.cocircuit.difference(&plan.basis).iter() {
            if seed.len() == small_max {
                break;
            }
            seed.insert(x)?;
        }
        let bridge = seed.union(&plan.hyperplane);
        plan.reach_size(&mut b, bridge.len())?;
        b.swaps_to(&bridge)?;
        plan.lambda(&mut b)?;
        for k in (s..small_max).rev() {
            let lower = coloop_pair_seed(space, k)?;
            let (mv, upper) = grow_by_coloop(&lower)?;
            b.swaps_to(upper.ground())?;
            b.push(mv)?;
            if b.state != *lower.ground() {
                return Err(Error::Internal(format!("descent to size {k} missed the seed")));
            }
        }
    }
    b.swaps_to(target)?;
    SynthesisResult::verify(space, b.seq, target)
}

/// Catalogue names of the rank-4 targets, in walkthrough order.
pub const WALKTHROUGH_TARGETS: [&str; 8] = [
    "P_3", "U_3,4", "M(K_4\\e)", "U_3,3", "M(K_4)", "U_4,4", "F_7^*", "U_4,5",
];

/// One labeled representative per named class, each reached from `P_4` by
/// complementations, switchings and local complementations.
///
/// Sequences are shortest paths in the breadth-first orbit of `P_4`. The
/// route to `F_7^*` passes through `F_7 ⊕ U_1,1` and ends with a
/// complementation.
pub fn synth_r4_walkthrough(space: Space) -> Result<Vec<(String, SynthesisResult)>> {
    if space.rank() != 4 {
        return Err(Error::domain(format!("the walkthrough runs in rank 4, not {}", space.rank())));
    }
    let table = orbit(space, &Matroid::full(space), GeneratorSet::sigma_omega_lambda(), None)?;
    WALKTHROUGH_TARGETS
        .iter()
        .map(|&name| {
            let target = named_matroid(space, name)?;
            let seq = if name == "F_7^*" {
                let via = moves::apply_omega(&target);
                let mut seq = path(&table, via.ground())?;
                seq.push(Move::Omega);
                seq
            } else {
                path(&table, target.ground())?
            };
            let result = SynthesisResult::verify(space, seq, target.ground())?;
            let reached = Matroid::new(result.trajectory.last().expect("non-empty").clone());
            if reached.canonical_form()? != target.canonical_form()? {
                return Err(Error::Internal(format!("{name} landed in the wrong class")));
            }
            Ok((name.to_string(), result))
        })
        .collect()
}

fn path(table: &crate::orbit::OrbitTable, state: &GroundSet) -> Result<MoveSequence> {
    table
        .path_to(state)?
        .ok_or_else(|| Error::Internal(format!("{state} is outside the orbit of P_4")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(r: u32) -> Space {
        Space::new(r).unwrap()
    }

    fn set(r: u32, xs: &[u32]) -> GroundSet {
        GroundSet::from_elements(sp(r), xs.iter().copied()).unwrap()
    }

    #[test]
    fn exchange_examples() {
        let m = Matroid::new(set(2, &[1, 2]));
        let seq = synth_swap_exchange(&m, 3, 2).unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(moves::replay(sp(2), &m, &seq).unwrap().ground(), &set(2, &[1, 3]));
        assert!(synth_swap_exchange(&m, 1, 2).is_err());
        assert!(synth_swap_exchange(&m, 3, 3).is_err());
    }

    #[test]
    fn same_size_examples() {
        let m = Matroid::new(set(3, &[1, 2, 4]));
        assert!(synth_same_size(&m, m.ground()).unwrap().is_empty());
        let target = set(3, &[3, 5, 6]);
        let seq = synth_same_size(&m, &target).unwrap();
        assert!(seq.len() <= 9);
        assert_eq!(moves::replay(sp(3), &m, &seq).unwrap().ground(), &target);
        assert!(synth_same_size(&m, &set(3, &[1])).is_err());
    }

    #[test]
    fn full_synthesis_small_cases() {
        for r in 2..=3 {
            let s = sp(r);
            for mask in 0..(1u64 << s.size()) {
                let target = GroundSet::from_u64(s, mask).unwrap();
                let res = synth_full(s, &target).unwrap();
                assert!(res.seq.iter().all(|m| m.is_swap() || matches!(m, Move::HypComp(_))));
            }
        }
        let s4 = sp(4);
        assert!(synth_full(s4, &s4.full()).unwrap().seq.is_empty());
        synth_full(s4, &set(4, &[1])).unwrap();
    }

    #[test]
    fn rank_one() {
        let s = sp(1);
        assert!(synth_full(s, &s.full()).unwrap().seq.is_empty());
        assert!(matches!(synth_full(s, &s.empty()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn single_kind_small_cases() {
        let s = sp(3);
        for mask in 0..128u64 {
            let target = GroundSet::from_u64(s, mask).unwrap();
            let on = synth_single_swap_kind(s, &target, SwapKind::On).unwrap();
            assert!(!on.seq.iter().any(|m| matches!(m, Move::SwapOff(_))));
            let off = synth_single_swap_kind(s, &target, SwapKind::Off).unwrap();
            assert!(!off.seq.iter().any(|m| matches!(m, Move::SwapOn(_))));
        }
    }

    #[test]
    fn grow_examples() {
        let (mv, grown) = grow_by_coloop(&Matroid::new(set(3, &[1, 2]))).unwrap();
        assert_eq!(mv, Move::Lambda(Functional(3)));
        assert_eq!(grown.ground(), &set(3, &[1, 2, 3]));
        let (_, grown) = grow_by_coloop(&Matroid::new(set(4, &[1, 2]))).unwrap();
        assert_eq!(grown.ground(), &set(4, &[1, 2, 3]));
        assert!(grow_by_coloop(&Matroid::new(set(3, &[1, 2, 3]))).is_err());
    }

    #[test]
    fn seed_examples() {
        let s = sp(4);
        assert_eq!(coloop_pair_seed(s, 2).unwrap().ground(), &set(4, &[4, 8]));
        let five = coloop_pair_seed(s, 5).unwrap();
        assert_eq!(five.ground(), &set(4, &[1, 2, 3, 4, 8]));
        assert_eq!(five.coloops(), set(4, &[4, 8]));
        assert!(coloop_pair_seed(s, 6).is_err());
        assert!(coloop_pair_seed(s, 1).is_err());
        assert!(coloop_pair_seed(sp(2), 2).is_err());
    }

    #[test]
    fn lambda_swap_small_ranks() {
        for r in 2..=3 {
            let s = sp(r);
            for mask in 0..(1u64 << s.size()) {
                let target = GroundSet::from_u64(s, mask).unwrap();
                let res = synth_lambda_swap(s, &target);
                if target.len() < 2 {
                    assert!(matches!(res, Err(Error::Domain(_))));
                } else {
                    let res = res.unwrap();
                    assert!(res.seq.iter().all(|m| m.is_swap() || matches!(m, Move::Lambda(_))));
                }
            }
        }
    }

    #[test]
    fn lambda_swap_every_size_rank_four() {
        let s = sp(4);
        for size in 2..=15usize {
            let target = GroundSet::from_elements(s, (1..=15u32).rev().take(size)).unwrap();
            let res = synth_lambda_swap(s, &target).unwrap();
            assert!(res.seq.iter().all(|m| m.is_swap() || matches!(m, Move::Lambda(_))));
        }
    }

    #[test]
    fn walkthrough() {
        let results = synth_r4_walkthrough(sp(4)).unwrap();
        assert_eq!(results.len(), 8);
        let p3 = &results[0].1;
        assert_eq!(p3.seq.len(), 1);
        assert!(matches!(p3.seq.moves()[0], Move::Sigma(_)));
        let u34 = &results[1].1;
        assert!(matches!(u34.seq.moves(), [Move::Sigma(_), Move::Lambda(_)]));
        let (_, dual) = &results[6];
        let penultimate = &dual.trajectory[dual.trajectory.len() - 2];
        assert_eq!(
            &penultimate.complement(),
            named_matroid(sp(4), "F_7^*").unwrap().ground()
        );
        assert_eq!(
            penultimate,
            named_matroid(sp(4), "F_7+U_1,1").unwrap().ground()
        );
    }
}
