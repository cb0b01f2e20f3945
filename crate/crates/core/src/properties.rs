//! Rank conditions that survive complementation, switching and local
//! complementation, and the machinery that turns them into unreachability
//! certificates.
//!
//! A restriction `M` of `P_r` has **Property 1** when, for all distinct
//! cocircuits `C*`, `D*`, both `(C* - D*) ∩ E(M)` and `(C* - D*) - E(M)` have
//! rank `r - 1`. It has **Property 2** when, for every cocircuit `C*`, both
//! `C* ∩ E(M)` and `C* - E(M)` have rank `r`. Property 1 implies Property 2;
//! Property 2 is preserved by every complementation, switching and local
//! complementation applied to a Property 1 matroid, and `P_r` lacks it, so a
//! Property 1 matroid cannot be reached from `P_r`.
//!
//! # Witness sampling
//!
//! [`sample_property1_witness`] draws colourings from `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)`. Each try fills the membership words in order, one
//! `next_u64()` per 64-bit word, clearing the bits past the last point. The
//! result depends only on `(r, seed)`.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::moves::{lambda_set, omega_set, sigma_set};
use crate::space::{Basis, Functional, GroundSet, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Property 1 with the first failing (ordered) pair, Property 2 with the first failing functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property1: Verdict<(Functional, Functional)>,
    pub property2: Verdict<Functional>,
}

/// All cocircuits of a space, indexed by functional value.
#[derive(Clone, Debug)]
pub struct Cocircuits {
    space: Space,
    sets: Vec<GroundSet>,
}

impl Cocircuits {
    pub fn new(space: Space) -> Self {
        Cocircuits {
            space,
            sets: space.functionals().map(|a| space.cocircuit(a)).collect(),
        }
    }

    pub fn get(&self, a: Functional) -> &GroundSet {
        &self.sets[a.value() as usize - 1]
    }
}

/// Rank of the elements selected by a word-wise filter, stopping once it reaches `cap`.
fn filtered_rank(words: impl Iterator<Item = u64>, cap: u32) -> u32 {
    let mut basis = Basis::new();
    for (i, mut w) in words.enumerate() {
        while w != 0 {
            let x = (i * 64) as u32 + w.trailing_zeros() + 1;
            w &= w - 1;
            if basis.insert(x) && basis.rank() >= cap {
                return basis.rank();
            }
        }
    }
    basis.rank()
}

fn pair_fails(m: &GroundSet, c: &GroundSet, d: &GroundSet, target: u32) -> bool {
    let zipped = || c.words().iter().zip(d.words()).zip(m.words());
    let green = filtered_rank(zipped().map(|((&c, &d), &g)| c & !d & g), target);
    if green != target {
        return true;
    }
    let red = filtered_rank(zipped().map(|((&c, &d), &g)| c & !d & !g), target);
    red != target
}

fn property1_with(cache: &Cocircuits, m: &GroundSet) -> Verdict<(Functional, Functional)> {
    let space = cache.space;
    let target = space.rank() - 1;
    let n = space.size();
    let first = (1..=n).into_par_iter().find_map_first(|a| {
        let ca = &cache.sets[a as usize - 1];
        for b in a + 1..=n {
            let cb = &cache.sets[b as usize - 1];
            if pair_fails(m, ca, cb, target) {
                return Some((Functional(a), Functional(b)));
            }
            if pair_fails(m, cb, ca, target) {
                return Some((Functional(b), Functional(a)));
            }
        }
        None
    });
    match first {
        Some(pair) => Verdict::Fails(pair),
        None => Verdict::Holds,
    }
}

fn trace_ranks(cache: &Cocircuits, m: &GroundSet, a: Functional) -> (u32, u32) {
    let c = cache.get(a);
    let r = cache.space.rank();
    let green = filtered_rank(c.words().iter().zip(m.words()).map(|(&c, &g)| c & g), r);
    let red = filtered_rank(c.words().iter().zip(m.words()).map(|(&c, &g)| c & !g), r);
    (green, red)
}

fn property2_with(cache: &Cocircuits, m: &GroundSet) -> Verdict<Functional> {
    let r = cache.space.rank();
    match cache
        .space
        .functionals()
        .find(|&a| trace_ranks(cache, m, a) != (r, r))
    {
        Some(a) => Verdict::Fails(a),
        None => Verdict::Holds,
    }
}

/// Property 1, checking both orientations of every unordered pair of
/// cocircuits. The reported pair is the first failure in lexicographic order.
pub fn has_property1(m: &Matroid) -> Result<Verdict<(Functional, Functional)>> {
    if m.space().rank() < 2 {
        return Err(Error::domain("Property 1 needs r >= 2"));
    }
    Ok(property1_with(&Cocircuits::new(m.space()), m.ground()))
}

pub fn has_property2(m: &Matroid) -> Verdict<Functional> {
    property2_with(&Cocircuits::new(m.space()), m.ground())
}

pub fn property_report(m: &Matroid) -> Result<PropertyReport> {
    let cache = Cocircuits::new(m.space());
    if m.space().rank() < 2 {
        return Err(Error::domain("Property 1 needs r >= 2"));
    }
    Ok(PropertyReport {
        property1: property1_with(&cache, m.ground()),
        property2: property2_with(&cache, m.ground()),
    })
}

/// Whether `C*_a - C*_b` is a copy of `AG(r-3, 2)`: `2^(r-2)` points of rank
/// `r - 1` with no three on a line.
pub fn difference_is_affine(space: Space, a: Functional, b: Functional) -> bool {
    let r = space.rank();
    if a == b || r < 2 {
        return false;
    }
    let diff = space.cocircuit(a).difference(&space.cocircuit(b));
    if diff.len() != 1usize << (r - 2) || space.rank_of(&diff) != r - 1 {
        return false;
    }
    let pts: Vec<_> = diff.iter().collect();
    pts.iter().enumerate().all(|(i, &x)| {
        pts[i + 1..]
            .iter()
            .all(|&y| !diff.contains(x ^ y))
    })
}

/// Upper bounds on the number and proportion of colourings of `P_r` that
/// contain a monochromatic copy of `AG(r-3, 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadColouringBound {
    pub r: u32,
    pub count: BigUint,
    pub probability: BigRational,
}

impl BadColouringBound {
    pub fn below_one(&self) -> bool {
        self.probability < BigRational::one()
    }

    pub fn probability_f64(&self) -> f64 {
        self.probability.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// `(2^r - 1)(2^(r-1) - 1)(2^(r-2) - 1) / 3`, the number of copies of
/// `AG(r-3, 2)` in `P_r`, in exact arithmetic.
pub fn affine_copies_formula(r: u32) -> Result<BigUint> {
    if r < 3 {
        return Err(Error::domain(format!("needs r >= 3, got {r}")));
    }
    let one = BigUint::one();
    let p = |k: u32| (BigUint::one() << k) - &one;
    let product = p(r) * p(r - 1) * p(r - 2);
    let three = BigUint::from(3u8);
    if !(&product % &three).is_zero() {
        return Err(Error::Internal(format!("{product} is not divisible by 3")));
    }
    Ok(product / three)
}

pub fn bad_colouring_bound(r: u32) -> Result<BadColouringBound> {
    if !(3..=crate::space::MAX_RANK).contains(&r) {
        return Err(Error::domain(format!("bad-colouring bound needs 3 <= r <= 31, got {r}")));
    }
    if r > 20 {
        return Err(Error::Unsupported(format!(
            "the exact count has 2^{r} bits; r <= 20 is supported"
        )));
    }
    let copies = affine_copies_formula(r)?;
    let points = (1u64 << r) - 1;
    let free = points - (1u64 << (r - 3));
    let count = BigUint::from(2u8) * copies * (BigUint::one() << free);
    let probability = BigRational::new(
        BigInt::from(count.clone()),
        BigInt::from(BigUint::one() << points),
    );
    Ok(BadColouringBound {
        r,
        count,
        probability,
    })
}

/// A Property 1 colouring found by [`sample_property1_witness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub matroid: Matroid,
    /// 1-based index of the successful try.
    pub tries: usize,
}

fn random_colouring(space: Space, rng: &mut ChaCha8Rng) -> GroundSet {
    let n = space.size() as usize;
    let mut words: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
    if !n.is_multiple_of(64) {
        *words.last_mut().expect("at least one word") &= (1u64 << (n % 64)) - 1;
    }
    GroundSet::from_words(space, &words).expect("trimmed words")
}

/// Samples uniform colourings until one has Property 1, or `max_tries` run out.
pub fn sample_property1_witness(space: Space, seed: u64, max_tries: usize) -> Result<Option<Witness>> {
    if space.rank() < 3 {
        return Err(Error::domain("witness sampling needs r >= 3"));
    }
    let cache = Cocircuits::new(space);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 1..=max_tries {
        let colouring = random_colouring(space, &mut rng);
        if property1_with(&cache, &colouring).holds() {
            return Ok(Some(Witness {
                matroid: Matroid::new(colouring),
                tries: t,
            }));
        }
    }
    Ok(None)
}

/// Evidence that a Property 2 matroid lies outside the orbit of `P_r` under
/// complementation, switching and local complementation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub witness: Matroid,
    /// `(rank(C*_a ∩ E(M)), rank(C*_a - E(M)))` for `a = 1, 2, ...`.
    pub trace_ranks: Vec<(u32, u32)>,
    /// A functional at which `P_r` fails Property 2.
    pub full_failure: Functional,
}

const CERT_HEADER: &str = "binmat unreachability certificate v1";

impl Certificate {
    pub fn to_text(&self) -> String {
        let space = self.witness.space();
        let mut out = String::new();
        writeln!(out, "{CERT_HEADER}").unwrap();
        writeln!(out, "r={}", space.rank()).unwrap();
        writeln!(out, "witness={}", self.witness.ground().to_hex()).unwrap();
        for (a, (g, red)) in space.functionals().zip(&self.trace_ranks) {
            writeln!(out, "trace a={a} green-rank={g} red-rank={red}").unwrap();
        }
        writeln!(out, "omega property2=holds").unwrap();
        for a in space.functionals() {
            writeln!(out, "sigma a={a} property2=holds").unwrap();
        }
        for a in space.functionals() {
            writeln!(out, "lambda a={a} equals-omega-sigma=yes property2=holds").unwrap();
        }
        writeln!(out, "full property2=fails a={}", self.full_failure).unwrap();
        out
    }

    /// Parses a certificate and re-derives every claim in it from the witness.
    pub fn check(text: &str) -> Result<Certificate> {
        let claimed = parse_certificate(text)?;
        let derived = certify_unreachable(&claimed.witness)?;
        if derived != claimed {
            return Err(Error::CertificateRefused(
                "recorded ranks or failure point disagree with recomputation".into(),
            ));
        }
        Ok(derived)
    }
}

fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("certificate ends before {what}")))
    };
    let (ln, header) = next("the header")?;
    if header != CERT_HEADER {
        return Err(Error::parse(ln, "not an unreachability certificate"));
    }
    let (ln, r_line) = next("the rank")?;
    let r: u32 = r_line
        .strip_prefix("r=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected r=<int>"))?;
    let space = Space::new(r).map_err(|e| Error::parse(ln, e.to_string()))?;
    let (ln, w_line) = next("the witness")?;
    let hex = w_line
        .strip_prefix("witness=")
        .ok_or_else(|| Error::parse(ln, "expected witness=<hex>"))?;
    let witness = Matroid::new(GroundSet::from_hex(space, hex).map_err(|e| Error::parse(ln, e.to_string()))?);

    let field = |ln: usize, line: &str, key: &str| -> Result<String> {
        line.split_whitespace()
            .find_map(|tok| tok.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .map(str::to_owned)
            .ok_or_else(|| Error::parse(ln, format!("missing `{key}=` in `{line}`")))
    };
    let number = |ln: usize, line: &str, key: &str| -> Result<u32> {
        field(ln, line, key)?
            .parse()
            .map_err(|_| Error::parse(ln, format!("`{key}` is not an integer")))
    };

    let mut trace_ranks = Vec::new();
    for a in space.functionals() {
        let (ln, line) = next("the trace ranks")?;
        if !line.starts_with("trace ") || number(ln, line, "a")? != a.value() {
            return Err(Error::parse(ln, format!("expected the trace line for a={a}")));
        }
        trace_ranks.push((number(ln, line, "green-rank")?, number(ln, line, "red-rank")?));
    }
    let (ln, line) = next("the complementation check")?;
    if line != "omega property2=holds" {
        return Err(Error::parse(ln, "expected `omega property2=holds`"));
    }
    for a in space.functionals() {
        let (ln, line) = next("the switching checks")?;
        if line != format!("sigma a={a} property2=holds") {
            return Err(Error::parse(ln, format!("expected the switching line for a={a}")));
        }
    }
    for a in space.functionals() {
        let (ln, line) = next("the local complementation checks")?;
        if line != format!("lambda a={a} equals-omega-sigma=yes property2=holds") {
            return Err(Error::parse(ln, format!("expected the local complementation line for a={a}")));
        }
    }
    let (ln, line) = next("the full-geometry check")?;
    if !line.starts_with("full property2=fails") {
        return Err(Error::parse(ln, "expected `full property2=fails a=<int>`"));
    }
    let full_failure = space
        .functional(number(ln, line, "a")? as u64)
        .map_err(|e| Error::parse(ln, e.to_string()))?;
    if let Some((ln, extra)) = lines.next() {
        return Err(Error::parse(ln, format!("unexpected trailing line `{extra}`")));
    }
    Ok(Certificate {
        witness,
        trace_ranks,
        full_failure,
    })
}

/// Certifies that `m` (which must have Property 2) cannot be reached from `P_r`.
///
/// Checks that `ω(M)` and every `σ_a(M)` have Property 2, that every
/// `λ_a(M)` equals `ω σ_a(M)` and has Property 2, and that `P_r` fails
/// Property 2. Any other word in the three operations then reduces to one of
/// these images, so every state reachable from `M` keeps Property 2.
pub fn certify_unreachable(m: &Matroid) -> Result<Certificate> {
    let space = m.space();
    let cache = Cocircuits::new(space);
    let g = m.ground();
    if let Verdict::Fails(a) = property2_with(&cache, g) {
        return Err(Error::domain(format!(
            "the matroid fails Property 2 at a={a}, so there is nothing to certify"
        )));
    }
    let trace_ranks: Vec<(u32, u32)> = space.functionals().map(|a| trace_ranks(&cache, g, a)).collect();

    if let Verdict::Fails(b) = property2_with(&cache, &omega_set(g)) {
        return Err(Error::CertificateRefused(format!(
            "the complement fails Property 2 at a={b}"
        )));
    }
    let functionals: Vec<Functional> = space.functionals().collect();
    functionals.par_iter().try_for_each(|&a| -> Result<()> {
        let switched = sigma_set(g, a);
        if let Verdict::Fails(b) = property2_with(&cache, &switched) {
            return Err(Error::CertificateRefused(format!(
                "switching at a={a} fails Property 2 at b={b}"
            )));
        }
        let local = lambda_set(g, a);
        if local != omega_set(&switched) {
            return Err(Error::CertificateRefused(format!(
                "local complementation at a={a} differs from complemented switching"
            )));
        }
        if let Verdict::Fails(b) = property2_with(&cache, &local) {
            return Err(Error::CertificateRefused(format!(
                "local complementation at a={a} fails Property 2 at b={b}"
            )));
        }
        Ok(())
    })?;
    let full_failure = match property2_with(&cache, &space.full()) {
        Verdict::Fails(a) => a,
        Verdict::Holds => {
            return Err(Error::CertificateRefused(
                "the full geometry unexpectedly has Property 2".into(),
            ))
        }
    };
    Ok(Certificate {
        witness: m.clone(),
        trace_ranks,
        full_failure,
    })
}
