//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::Instant;

use binmat::matroid::named_matroid;
use binmat::moves::{decompose_into_row_switchings, omega_as_three_hyperplanes};
use binmat::properties::{
    bad_colouring_bound, certify_unreachable, has_property1, has_property2, sample_property1_witness,
    Verdict,
};
use binmat::synthesis::{synth_full, synth_lambda_swap, synth_r4_walkthrough, synth_single_swap_kind};
use binmat::{
    coverage_report, orbit, GeneratorSet, GroundSet, Matroid, Move, MoveSequence, Space, SwapKind,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sp(r: u32) -> Space {
    Space::new(r).unwrap()
}

fn gs(r: u32, mask: u64) -> GroundSet {
    GroundSet::from_u64(sp(r), mask).unwrap()
}

fn lib(r: u32, mask: u64, mv: Move) -> u64 {
    mv.apply(&gs(r, mask)).unwrap().as_u64().unwrap()
}

/// Replays a sequence with the oracle operations, checking swap colours.
fn oracle_replay(r: u32, start: u64, seq: &MoveSequence) -> Result<u64, String> {
    let mut m = start;
    for (i, mv) in seq.iter().enumerate() {
        m = match *mv {
            Move::Omega => omega(r, m),
            Move::Sigma(a) => sigma(r, m, a.value()),
            Move::Lambda(a) => lambda(r, m, a.value()),
            Move::HypComp(a) => hypcomp(r, m, a.value()),
            Move::SwapOn(f) | Move::SwapOff(f) => {
                let green = m & bit(f) != 0;
                if green != matches!(mv, Move::SwapOn(_)) {
                    return Err(format!("move {i} ({mv}) has the wrong colour at {f}"));
                }
                swap(r, m, f)
            }
        };
    }
    Ok(m)
}

fn criterion1() -> Outcome {
    for r in 2..=4 {
        let s = sp(r);
        let table = orbit(s, &Matroid::full(s), GeneratorSet::sigma_omega(), None).map_err(|e| e.to_string())?;
        let mut expected: Vec<u64> = vec![full(r), 0];
        for a in 1..=n(r) {
            expected.push(cocircuit(r, a));
            expected.push(hyperplane(r, a));
        }
        expected.sort_unstable();
        expected.dedup();
        let mut got: Vec<u64> = table.states().iter().map(|g| g.as_u64().unwrap()).collect();
        got.sort_unstable();
        ensure(got.len() == 2 + 2 * n(r) as usize, || format!("r={r}: {} states", got.len()))?;
        ensure(got == expected, || format!("r={r}: orbit contents differ"))?;
    }
    Ok("orbit sizes 8, 16, 32 with the expected states".into())
}

fn criterion2() -> Outcome {
    let s = sp(4);
    let table = orbit(s, &Matroid::full(s), GeneratorSet::sigma_omega_lambda(), None).map_err(|e| e.to_string())?;
    let report = coverage_report(&table);
    let (hit, total) = report.classes_visited().ok_or("no class table at r=4")?;
    ensure(hit == total, || format!("{hit}/{total} classes visited"))?;
    Ok(format!("{} states, all {total} classes visited", table.len()))
}

fn property2_oracle(r: u32, green: &[bool]) -> bool {
    (1..=n(r)).all(|a| {
        let inside = (1..=n(r)).filter(|&x| dot(a, x) && green[x as usize]);
        let outside = (1..=n(r)).filter(|&x| dot(a, x) && !green[x as usize]);
        rank_by_elimination(inside) == r && rank_by_elimination(outside) == r
    })
}

fn property1_oracle(r: u32, green: &[bool]) -> bool {
    (1..=n(r)).all(|a| {
        (1..=n(r)).filter(|&b| b != a).all(|b| {
            let diff = || (1..=n(r)).filter(move |&x| dot(a, x) && !dot(b, x));
            rank_by_elimination(diff().filter(|&x| green[x as usize])) == r - 1
                && rank_by_elimination(diff().filter(|&x| !green[x as usize])) == r - 1
        })
    })
}

fn criterion3() -> Outcome {
    let r = 8;
    let s = sp(r);
    let witness = sample_property1_witness(s, 1, 50)
        .map_err(|e| e.to_string())?
        .ok_or("no witness within 50 tries for seed 1")?;
    let m = &witness.matroid;
    ensure(has_property1(m).map_err(|e| e.to_string())? == Verdict::Holds, || "Property 1 fails".into())?;
    let cert = certify_unreachable(m).map_err(|e| e.to_string())?;

    let mut green = vec![false; n(r) as usize + 1];
    for x in m.ground().iter() {
        green[x as usize] = true;
    }
    ensure(property1_oracle(r, &green), || "oracle rejects Property 1".into())?;
    ensure(property2_oracle(r, &green), || "oracle rejects Property 2".into())?;
    let complement: Vec<bool> = green.iter().enumerate().map(|(i, &g)| i > 0 && !g).collect();
    ensure(property2_oracle(r, &complement), || "complement fails Property 2".into())?;
    for a in 1..=n(r) {
        let switched: Vec<bool> = green.iter().enumerate().map(|(x, &g)| x > 0 && g != dot(a, x as u32)).collect();
        ensure(property2_oracle(r, &switched), || format!("switching at {a} fails Property 2"))?;
        let trace: Vec<u32> = (1..=n(r)).filter(|&x| dot(a, x) && green[x as usize]).collect();
        let region = span(&trace);
        let local: Vec<bool> = green
            .iter()
            .enumerate()
            .map(|(x, &g)| x > 0 && g != (region.contains(&(x as u32)) && !dot(a, x as u32)))
            .collect();
        let omega_switched: Vec<bool> = switched.iter().enumerate().map(|(x, &g)| x > 0 && !g).collect();
        ensure(local == omega_switched, || format!("local complementation at {a} differs from ωσ"))?;
        ensure(property2_oracle(r, &local), || format!("local complementation at {a} fails Property 2"))?;
    }
    let all = vec![true; n(r) as usize + 1];
    ensure(!property2_oracle(r, &all), || "P_8 has Property 2".into())?;
    ensure(has_property2(&Matroid::full(s)) == Verdict::Fails(cert.full_failure), || "full failure point".into())?;
    Ok(format!("seed 1 witness after {} tries, certificate issued", witness.tries))
}

fn criterion4() -> Outcome {
    for r in 3..=12u32 {
        let b = bad_colouring_bound(r).map_err(|e| e.to_string())?;
        let p = |k: u32| (BigInt::from(1) << k) - 1;
        let numer = BigInt::from(2) * p(r) * p(r - 1) * p(r - 2);
        let denom = BigInt::from(3) * (BigInt::from(1) << (1u32 << (r - 3)));
        let expected = BigRational::new(numer, denom);
        ensure(b.probability == expected, || format!("r={r}: probability {}", b.probability))?;
        let product = ((1u64 << r) - 1) as f64 * ((1u64 << (r - 1)) - 1) as f64 * ((1u64 << (r - 2)) - 1) as f64;
        let log2 = 1.0 + product.log2() - 3f64.log2() - (1u64 << (r - 3)) as f64;
        ensure((log2 < 0.0) == (r >= 8), || format!("r={r}: float estimate disagrees"))?;
        ensure(b.below_one() == (r >= 8), || format!("r={r}: below_one = {}", b.below_one()))?;
    }
    for r in 3..=5u32 {
        let formula = ((1u64 << r) - 1) * ((1u64 << (r - 1)) - 1) * ((1u64 << (r - 2)) - 1) / 3;
        let enumerated = sp(r).count_affine_subgeometries().map_err(|e| e.to_string())?;
        let oracle = affine_copies(r) as u64;
        ensure(enumerated == formula && oracle == formula, || {
            format!("r={r}: formula {formula}, enumerated {enumerated}, cosets {oracle}")
        })?;
    }
    Ok("bound below one exactly for r >= 8; affine counts 7, 105, 1085".into())
}

fn random_basis(r: u32, rng: &mut ChaCha8Rng) -> Vec<u32> {
    loop {
        let b: Vec<u32> = (0..r).map(|_| rng.gen_range(1..=n(r))).collect();
        if rank_by_elimination(b.iter().copied()) == r {
            return b;
        }
    }
}

/// Every identity at one state, functional pair and point.
fn identities_at(r: u32, m: u64, a: u32, b: u32, f: u32) -> Result<(), String> {
    let s = sp(r);
    let fa = s.functional(a as u64).unwrap();
    let ctx = || format!("r={r} m={m:x} a={a} b={b} f={f}");
    let om = lib(r, m, Move::Omega);
    ensure(om == omega(r, m) && lib(r, om, Move::Omega) == m, || format!("omega {}", ctx()))?;
    let sa = lib(r, m, Move::Sigma(fa));
    ensure(sa == sigma(r, m, a) && lib(r, sa, Move::Sigma(fa)) == m, || format!("sigma {}", ctx()))?;
    let la = lib(r, m, Move::Lambda(fa));
    ensure(la == lambda(r, m, a) && lib(r, la, Move::Lambda(fa)) == m, || format!("lambda {}", ctx()))?;
    ensure(lib(r, om, Move::Sigma(fa)) == omega(r, sa), || format!("omega/sigma commute {}", ctx()))?;
    let ha = lib(r, m, Move::HypComp(fa));
    ensure(ha == hypcomp(r, m, a) && ha == omega(r, sa), || format!("hypcomp {}", ctx()))?;
    let trace = points(m & cocircuit(r, a));
    if rank(&trace) == r {
        ensure(la == omega(r, sa), || format!("full-rank lambda {}", ctx()))?;
    }
    if b != a {
        let fb = s.functional(b as u64).unwrap();
        let fab = s.functional((a ^ b) as u64).unwrap();
        ensure(
            lib(r, sa, Move::Sigma(fb)) == lib(r, m, Move::Sigma(fab)),
            || format!("sigma product {}", ctx()),
        )?;
    }
    let g = gs(r, m);
    let mv = Move::swap_for(&g, f);
    let sw = lib(r, m, mv);
    ensure(sw == swap(r, m, f), || format!("swap {}", ctx()))?;
    ensure(Move::swap_for(&gs(r, sw), f) == mv && lib(r, sw, mv) == m, || format!("swap involution {}", ctx()))?;
    let other = match mv {
        Move::SwapOn(_) => Move::SwapOff(f),
        _ => Move::SwapOn(f),
    };
    ensure(omega(r, lib(r, omega(r, m), other)) == sw, || format!("swap conjugation {}", ctx()))?;
    Ok(())
}

fn three_hyperplanes_at(r: u32, m: u64, flat: &GroundSet) -> Result<(), String> {
    let seq = omega_as_three_hyperplanes(sp(r), flat).map_err(|e| e.to_string())?;
    ensure(seq.len() == 3, || "not three moves".into())?;
    let got = oracle_replay(r, m, &seq)?;
    ensure(got == omega(r, m), || format!("three hyperplanes around {flat} at {m:x}"))
}

fn row_switchings_at(r: u32, m: u64, a: u32, basis: &[u32]) -> Result<(), String> {
    let s = sp(r);
    let seq = decompose_into_row_switchings(s, s.functional(a as u64).unwrap(), basis).map_err(|e| e.to_string())?;
    for mv in seq.iter() {
        let Move::Sigma(beta) = mv else {
            return Err(format!("{mv} is not a switching"));
        };
        let on_basis: Vec<bool> = basis.iter().map(|&x| dot(beta.value(), x)).collect();
        ensure(on_basis.iter().filter(|&&v| v).count() == 1, || format!("{mv} is not a dual basis vector"))?;
    }
    let got = oracle_replay(r, m, &seq)?;
    ensure(got == sigma(r, m, a), || format!("row decomposition of {a} over {basis:?}"))
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = 0u64;
    for r in 1..=3u32 {
        let s = sp(r);
        let flats = if r >= 2 { s.flats_of_rank(r - 2) } else { Vec::new() };
        let bases: Vec<Vec<u32>> = (0..5).map(|_| random_basis(r, &mut rng)).collect();
        for m in 0..=full(r) {
            for a in 1..=n(r) {
                for b in 1..=n(r) {
                    for f in 1..=n(r) {
                        identities_at(r, m, a, b, f)?;
                        cases += 1;
                    }
                }
                for basis in &bases {
                    row_switchings_at(r, m, a, basis)?;
                }
            }
            for flat in &flats {
                three_hyperplanes_at(r, m, flat)?;
            }
        }
    }
    for r in 4..=5u32 {
        let flats = sp(r).flats_of_rank(r - 2);
        for _ in 0..1000 {
            let m = rng.gen::<u64>() & full(r);
            let (a, b, f) = (rng.gen_range(1..=n(r)), rng.gen_range(1..=n(r)), rng.gen_range(1..=n(r)));
            identities_at(r, m, a, b, f)?;
            three_hyperplanes_at(r, m, &flats[rng.gen_range(0..flats.len())])?;
            row_switchings_at(r, m, a, &random_basis(r, &mut rng))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} identity cases, zero failures"))
}

fn audit(seq: &MoveSequence, allowed: impl Fn(&Move) -> bool, what: &str) -> Result<(), String> {
    match seq.iter().find(|m| !allowed(m)) {
        Some(m) => Err(format!("{what} emitted {m}")),
        None => Ok(()),
    }
}

fn criterion6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut longest = 0usize;
    for r in 4..=5u32 {
        let s = sp(r);
        for _ in 0..100 {
            let mask = rng.gen::<u64>() & full(r);
            let target = gs(r, mask);
            let check = |seq: &MoveSequence, what: &str| -> Result<(), String> {
                let end = oracle_replay(r, full(r), seq)?;
                ensure(end == mask, || format!("{what} at r={r} misses {mask:x}"))
            };
            let res = synth_full(s, &target).map_err(|e| e.to_string())?;
            audit(&res.seq, |m| m.is_swap() || matches!(m, Move::HypComp(_)), "synth_full")?;
            check(&res.seq, "synth_full")?;
            longest = longest.max(res.seq.len());
            for kind in [SwapKind::On, SwapKind::Off] {
                let res = synth_single_swap_kind(s, &target, kind).map_err(|e| e.to_string())?;
                let forbidden = |m: &Move| match kind {
                    SwapKind::On => matches!(m, Move::SwapOff(_)),
                    SwapKind::Off => matches!(m, Move::SwapOn(_)),
                };
                audit(&res.seq, |m| (m.is_swap() && !forbidden(m)) || matches!(m, Move::HypComp(_)), "single kind")?;
                check(&res.seq, "synth_single_swap_kind")?;
            }
            let lambda_target = if target.len() >= 2 {
                target.clone()
            } else {
                gs(r, mask | 0b11)
            };
            let res = synth_lambda_swap(s, &lambda_target).map_err(|e| e.to_string())?;
            audit(&res.seq, |m| m.is_swap() || matches!(m, Move::Lambda(_)), "synth_lambda_swap")?;
            let end = oracle_replay(r, full(r), &res.seq)?;
            ensure(Some(end) == lambda_target.as_u64(), || format!("synth_lambda_swap at r={r}"))?;
        }
    }

    let s4 = sp(4);
    let walk = synth_r4_walkthrough(s4).map_err(|e| e.to_string())?;
    for (name, res) in &walk {
        let expected = named_matroid(s4, name).map_err(|e| e.to_string())?;
        let end = oracle_replay(4, full(4), &res.seq)?;
        ensure(Some(end) == expected.ground().as_u64(), || format!("walkthrough {name}"))?;
        let reached = Matroid::new(gs(4, end));
        ensure(
            reached.canonical_form().unwrap() == expected.canonical_form().unwrap(),
            || format!("walkthrough {name} class"),
        )?;
    }
    let seq_of = |name: &str| &walk.iter().find(|(n, _)| n == name).unwrap().1;
    let p3 = seq_of("P_3");
    ensure(matches!(p3.seq.moves(), [Move::Sigma(_)]), || "P_3 is not one switching".into())?;
    ensure(
        matches!(seq_of("U_3,4").seq.moves(), [Move::Sigma(_), Move::Lambda(_)]),
        || "U_3,4 is not switching then local complementation".into(),
    )?;
    let dual = seq_of("F_7^*");
    let penultimate = dual.trajectory[dual.trajectory.len() - 2].as_u64().unwrap();
    ensure(
        Some(penultimate) == named_matroid(s4, "F_7+U_1,1").unwrap().ground().as_u64(),
        || "F_7^* is not reached through F_7 + U_1,1".into(),
    )?;
    Ok(format!(
        "100 targets per rank through each synthesizer replay exactly (longest synth_full {longest} moves); walkthrough matches all {} classes",
        walk.len()
    ))
}

fn lifting_case(r: u32, m: u64, d: u64, expect: Option<bool>) -> Result<bool, String> {
    let matroid = Matroid::new(gs(r, m));
    let found = matroid.find_cocircuit_with_trace(&gs(r, d)).map_err(|e| e.to_string())?;
    let brute = (1..=n(r)).any(|a| cocircuit(r, a) & m == d);
    if let Some(e) = expect {
        ensure(brute == e, || format!("oracles disagree on m={m:x} d={d:x}"))?;
    }
    match found {
        Some(a) => ensure(cocircuit(r, a.value()) & m == d, || format!("inexact trace m={m:x} d={d:x}"))?,
        None => ensure(!brute, || format!("missed trace m={m:x} d={d:x}"))?,
    }
    Ok(found.is_some())
}

fn criterion7() -> Outcome {
    let r = 3;
    let mut lifted = 0u64;
    for m in 0..=full(r) {
        let circuits = circuits(m);
        let mut d = m;
        loop {
            if d != 0 {
                let cocycle = circuits.iter().all(|c| (c & d).count_ones() % 2 == 0);
                let ok = lifting_case(r, m, d, Some(cocycle))?;
                ensure(ok == cocycle, || format!("m={m:x} d={d:x}"))?;
                lifted += ok as u64;
            }
            if d == 0 {
                break;
            }
            d = (d - 1) & m;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in 4..=5u32 {
        let mut done = 0;
        while done < 1000 {
            let m = rng.gen::<u64>() & full(r);
            let d = if rng.gen_bool(0.5) {
                m & cocircuit(r, rng.gen_range(1..=n(r)))
            } else {
                m & rng.gen::<u64>()
            };
            if d == 0 {
                continue;
            }
            lifting_case(r, m, d, None)?;
            done += 1;
        }
    }
    Ok(format!("{lifted} exhaustive lifts at r=3, 2000 randomized cases at r=4,5"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("orbit exactness", criterion1),
        ("r=4 completeness", criterion2),
        ("r=8 unreachability", criterion3),
        ("bound arithmetic", criterion4),
        ("identity suite", criterion5),
        ("synthesis replay", criterion6),
        ("trace lifting", criterion7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.2}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.2}s] {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
