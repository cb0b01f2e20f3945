mod input;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use binmat::moves::{replay_trajectory, SwapKind};
use binmat::properties::{
    bad_colouring_bound, certify_unreachable, property_report, sample_property1_witness,
    affine_copies_formula, Certificate, PropertyReport, Verdict,
};
use binmat::synthesis::{
    synth_full, synth_lambda_swap, synth_r4_walkthrough, synth_single_swap_kind, SynthesisResult,
};
use binmat::{coverage_report, orbit, reachable, Error, GeneratorSet, Matroid, MoveSequence, Result, Space};
use clap::{Args, Parser, Subcommand, ValueEnum};

use input::{parse_state, read_header};

#[derive(Parser)]
#[command(name = "binmat", version, about = "Moves on restrictions of binary projective geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the orbit of a state under a generator set.
    Orbit(OrbitArgs),
    /// Search for a move sequence between two states.
    Reach(ReachArgs),
    /// Build a verified move sequence from the full geometry to a target.
    Synth(SynthArgs),
    /// Apply a move file to a state.
    Replay(ReplayArgs),
    /// Check the two rank properties, optionally on a sampled witness.
    CheckProps(PropsArgs),
    /// Issue or check an unreachability certificate.
    Certify(CertifyArgs),
    /// Count affine subgeometries and bound the bad colourings.
    Count(CountArgs),
    /// Print the canonical form of a state.
    Canon(CanonArgs),
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long)]
    r: u32,
    /// full, empty, file=PATH, elements=1,2,3, hex=MASK or name=NAME
    #[arg(long, default_value = "full")]
    start: String,
    /// Comma list of omega, sigma, row-sigma, lambda, hypcomp, swap, swap+, swap-
    #[arg(long)]
    gens: String,
    /// Maximum number of visited states (required above rank 4).
    #[arg(long)]
    budget: Option<usize>,
    /// Write the orbit table (`state predecessor move` per line) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReachArgs {
    #[arg(long)]
    r: u32,
    #[arg(long, default_value = "full")]
    start: String,
    #[arg(long)]
    target: String,
    #[arg(long)]
    gens: String,
    #[arg(long)]
    budget: Option<usize>,
    /// Write the move sequence here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    On,
    Off,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    target: Option<String>,
    /// hypcomp,swap | hypcomp,swap+ | hypcomp,swap- | lambda,swap | omega,sigma,lambda
    #[arg(long, default_value = "hypcomp,swap")]
    gens: String,
    /// Restrict swaps to one kind (same as naming swap+ or swap- in --gens).
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Run the rank-4 walkthrough over the named classes instead of one target.
    #[arg(long)]
    walkthrough: bool,
    #[arg(long)]
    budget: Option<usize>,
    /// Write the sequence, with `# r=` and `# target=` headers, here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the state after every move.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Args)]
struct ReplayArgs {
    /// Defaults to the `# r=` header of the move file.
    #[arg(long)]
    r: Option<u32>,
    /// Defaults to the `# start=` header, then to the full geometry.
    #[arg(long)]
    start: Option<String>,
    /// Move file in the one-move-per-line syntax.
    #[arg(long)]
    moves: PathBuf,
    /// Expected final state; defaults to the `# target=` header.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    trajectory: bool,
}

#[derive(Args)]
struct PropsArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    start: Option<String>,
    /// Sample uniform colourings until one has Property 1.
    #[arg(long)]
    find_witness: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    max_tries: usize,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    find_witness: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    max_tries: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-derive every claim of an existing certificate instead of issuing one.
    #[arg(long, conflicts_with_all = ["start", "find_witness", "out"])]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    r: u32,
    /// Enumerate the affine subgeometries instead of only using the closed form.
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args)]
struct CanonArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    start: String,
}

/// Failures mapped to exit codes: 1 for a failed check, 2 for bad input.
enum Failure {
    Verification(String),
    Usage(String),
    /// Standard output was closed by the reader.
    ClosedOutput,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidRank(_)
            | Error::ElementOutOfRange { .. }
            | Error::FunctionalOutOfRange { .. }
            | Error::SpaceMismatch { .. }
            | Error::Domain(_)
            | Error::Unsupported(_)
            | Error::Parse { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            Failure::ClosedOutput
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match cli.command {
        Command::Orbit(a) => run_orbit(a, &mut out),
        Command::Reach(a) => run_reach(a, &mut out),
        Command::Synth(a) => run_synth(a, &mut out),
        Command::Replay(a) => run_replay(a, &mut out),
        Command::CheckProps(a) => run_props(a, &mut out),
        Command::Certify(a) => run_certify(a, &mut out),
        Command::Count(a) => run_count(a, &mut out),
        Command::Canon(a) => run_canon(a, &mut out),
    };
    match result {
        Ok(()) | Err(Failure::ClosedOutput) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn space(r: u32) -> Result<Space, Failure> {
    Ok(Space::new(r)?)
}

fn write_file(path: &PathBuf, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run_orbit(a: OrbitArgs, out: &mut impl Write) -> Outcome {
    let space = space(a.r)?;
    let start = parse_state(space, &a.start)?;
    let gens = GeneratorSet::parse(&a.gens)?;
    let table = orbit(space, &start, gens, a.budget)?;
    writeln!(out, "orbit of {} under {gens}: {} states", start.ground().to_hex(), table.len())?;
    write!(out, "{}", coverage_report(&table))?;
    if let Some(path) = &a.out {
        write_file(path, &table.to_text())?;
    }
    Ok(())
}

fn run_reach(a: ReachArgs, out: &mut impl Write) -> Outcome {
    let space = space(a.r)?;
    let start = parse_state(space, &a.start)?;
    let target = parse_state(space, &a.target)?;
    let gens = GeneratorSet::parse(&a.gens)?;
    match reachable(space, &start, &target, gens, a.budget)? {
        Some(seq) => {
            writeln!(out, "reachable in {} moves", seq.len())?;
            write!(out, "{}", seq.to_text())?;
            if let Some(path) = &a.out {
                write_file(path, &move_file(space, &start, &target, &seq))?;
            }
            Ok(())
        }
        None => {
            writeln!(out, "unreachable")?;
            Err(Failure::Verification(format!(
                "{} is not in the orbit of {} under {gens}",
                target.ground().to_hex(),
                start.ground().to_hex()
            )))
        }
    }
}

fn move_file(space: Space, start: &Matroid, target: &Matroid, seq: &MoveSequence) -> String {
    format!(
        "# r={}\n# start=hex={}\n# target=hex={}\n{}",
        space.rank(),
        start.ground().to_hex(),
        target.ground().to_hex(),
        seq.to_text()
    )
}

enum Synthesizer {
    Full,
    Single(SwapKind),
    LambdaSwap,
    Search(GeneratorSet),
}

fn pick_synthesizer(gens: &str, kind: Option<KindArg>) -> Result<Synthesizer, Failure> {
    let parsed = GeneratorSet::parse(gens)?;
    let only = |g: GeneratorSet| g == parsed;
    let kind = kind.map(|k| match k {
        KindArg::On => SwapKind::On,
        KindArg::Off => SwapKind::Off,
    });
    let hyp = |on, off| GeneratorSet {
        hypcomp: true,
        swap_on: on,
        swap_off: off,
        ..Default::default()
    };
    Ok(if only(hyp(true, true)) {
        match kind {
            Some(k) => Synthesizer::Single(k),
            None => Synthesizer::Full,
        }
    } else if only(hyp(true, false)) {
        Synthesizer::Single(SwapKind::On)
    } else if only(hyp(false, true)) {
        Synthesizer::Single(SwapKind::Off)
    } else if only(GeneratorSet::lambda_swap()) {
        Synthesizer::LambdaSwap
    } else {
        Synthesizer::Search(parsed)
    })
}

fn run_synth(a: SynthArgs, out: &mut impl Write) -> Outcome {
    let space = space(a.r)?;
    if a.walkthrough {
        for (name, res) in synth_r4_walkthrough(space)? {
            writeln!(out, "{name}: {} moves to {}", res.seq.len(), res.target.to_hex())?;
            for mv in res.seq.iter() {
                writeln!(out, "  {mv}")?;
            }
        }
        return Ok(());
    }
    let target_arg = a
        .target
        .ok_or_else(|| Failure::Usage("--target is required unless --walkthrough is given".into()))?;
    let target = parse_state(space, &target_arg)?;
    let full = Matroid::full(space);
    let res = match pick_synthesizer(&a.gens, a.kind)? {
        Synthesizer::Full => synth_full(space, target.ground())?,
        Synthesizer::Single(k) => synth_single_swap_kind(space, target.ground(), k)?,
        Synthesizer::LambdaSwap => synth_lambda_swap(space, target.ground())?,
        Synthesizer::Search(gens) => {
            let seq = reachable(space, &full, &target, gens, a.budget)?.ok_or_else(|| {
                Failure::Verification(format!("{} is not reachable under {gens}", target.ground().to_hex()))
            })?;
            SynthesisResult::verify(space, seq, target.ground())?
        }
    };
    writeln!(out, "{} moves to {}", res.seq.len(), res.target.to_hex())?;
    if a.trajectory {
        write!(out, "{}", res.trajectory_text())?;
    }
    match &a.out {
        Some(path) => write_file(path, &move_file(space, &full, &target, &res.seq))?,
        None => write!(out, "{}", res.seq.to_text())?,
    }
    Ok(())
}

fn run_replay(a: ReplayArgs, out: &mut impl Write) -> Outcome {
    let text = fs::read_to_string(&a.moves)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", a.moves.display())))?;
    let header = read_header(&text)?;
    let r = a
        .r
        .or(header.r)
        .ok_or_else(|| Failure::Usage("no rank: pass --r or add a `# r=` header".into()))?;
    if let (Some(given), Some(declared)) = (a.r, header.r) {
        if given != declared {
            return Err(Failure::Usage(format!("--r {given} contradicts the header rank {declared}")));
        }
    }
    let space = space(r)?;
    let seq = MoveSequence::parse(&text)?;
    for mv in seq.iter() {
        mv.validate(space)?;
    }
    let start = match a.start.or(header.start) {
        Some(s) => parse_state(space, &s)?,
        None => Matroid::full(space),
    };
    let target = a.target.or(header.target).map(|t| parse_state(space, &t)).transpose()?;
    let trajectory = replay_trajectory(space, &start, &seq)?;
    if a.trajectory {
        for state in &trajectory.states {
            writeln!(out, "{}", state.to_hex())?;
        }
    }
    for i in &trajectory.noops {
        writeln!(out, "note: move {i} left the state unchanged")?;
    }
    let end = trajectory.last();
    writeln!(out, "final {} {}", end.to_hex(), end)?;
    match target {
        Some(t) if t.ground() == end => {
            writeln!(out, "matches target")?;
            Ok(())
        }
        Some(t) => Err(Failure::Verification(format!(
            "replay ends on {} but the target is {}",
            end.to_hex(),
            t.ground().to_hex()
        ))),
        None => Ok(()),
    }
}

fn write_report(out: &mut impl Write, report: &PropertyReport) -> io::Result<()> {
    let p1 = match report.property1 {
        Verdict::Holds => "holds".to_string(),
        Verdict::Fails((a, b)) => format!("fails at a={a} b={b}"),
    };
    let p2 = match report.property2 {
        Verdict::Holds => "holds".to_string(),
        Verdict::Fails(a) => format!("fails at a={a}"),
    };
    writeln!(out, "property1: {p1}")?;
    writeln!(out, "property2: {p2}")
}

/// The matroid named by `--start`, or a sampled witness with `--find-witness`.
fn subject(
    space: Space,
    start: Option<String>,
    find_witness: bool,
    seed: Option<u64>,
    max_tries: usize,
    out: &mut impl Write,
) -> Result<Matroid, Failure> {
    match (start, find_witness) {
        (Some(s), false) => Ok(parse_state(space, &s)?),
        (None, true) => {
            let seed = seed.ok_or_else(|| Failure::Usage("--find-witness needs an explicit --seed".into()))?;
            match sample_property1_witness(space, seed, max_tries)? {
                Some(w) => {
                    writeln!(out, "witness found after {} tries (seed {seed})", w.tries)?;
                    writeln!(out, "witness {}", w.matroid.ground().to_hex())?;
                    Ok(w.matroid)
                }
                None => {
                    writeln!(out, "no witness in {max_tries} tries (seed {seed})")?;
                    Err(Failure::Verification("no Property 1 colouring found".into()))
                }
            }
        }
        _ => Err(Failure::Usage("give exactly one of --start and --find-witness".into())),
    }
}

fn run_props(a: PropsArgs, out: &mut impl Write) -> Outcome {
    let space = space(a.r)?;
    let m = subject(space, a.start, a.find_witness, a.seed, a.max_tries, out)?;
    let report = property_report(&m)?;
    write_report(out, &report)?;
    Ok(())
}

fn run_certify(a: CertifyArgs, out: &mut impl Write) -> Outcome {
    if let Some(path) = &a.check {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let cert = Certificate::check(&text)?;
        if let Some(r) = a.r {
            if r != cert.witness.space().rank() {
                return Err(Failure::Verification(format!("the certificate is not for rank {r}")));
            }
        }
        writeln!(out, "certificate valid for {}", cert.witness.ground().to_hex())?;
        return Ok(());
    }
    let r = a.r.ok_or_else(|| Failure::Usage("--r is required when issuing a certificate".into()))?;
    let space = space(r)?;
    let m = subject(space, a.start, a.find_witness, a.seed, a.max_tries, out)?;
    let cert = certify_unreachable(&m)?;
    writeln!(out, "certificate issued: {} is unreachable from P_{r}", m.ground().to_hex())?;
    writeln!(out, "full geometry fails Property 2 at a={}", cert.full_failure)?;
    match &a.out {
        Some(path) => write_file(path, &cert.to_text())?,
        None => write!(out, "{}", cert.to_text())?,
    }
    Ok(())
}

fn run_count(a: CountArgs, out: &mut impl Write) -> Outcome {
    let space = space(a.r)?;
    let formula = affine_copies_formula(a.r)?;
    writeln!(out, "affine subgeometries (closed form): {formula}")?;
    if a.enumerate {
        let counted = space.count_affine_subgeometries()?;
        writeln!(out, "affine subgeometries (enumerated): {counted}")?;
        if formula != counted.into() {
            return Err(Failure::Verification("enumeration disagrees with the closed form".into()));
        }
    }
    let bound = bad_colouring_bound(a.r)?;
    writeln!(out, "bad colourings at most: {}", bound.count)?;
    writeln!(out, "probability at most: {} ~ {:.6e}", bound.probability, bound.probability_f64())?;
    writeln!(out, "below one: {}", if bound.below_one() { "yes" } else { "no" })?;
    Ok(())
}

fn run_canon(a: CanonArgs, out: &mut impl Write) -> Outcome {
    let space = space(a.r)?;
    let m = parse_state(space, &a.start)?;
    let canon = m.canonical_form()?;
    writeln!(out, "canonical {} {}", canon.to_hex(), canon)?;
    Ok(())
}
