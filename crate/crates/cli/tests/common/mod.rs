//! Shared helpers for the integration and acceptance tests: loading the
//! reference algebra fixtures, running the installed binary, scrubbing
//! timing fields from JSON output, and generating random homogeneous
//! states with a seeded generator.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gva_core::engine::AlgebraInstance;
use gva_core::fock::{FockMonomial, FockState};
use gva_core::io::parse_spec;
use gva_core::modules::CosetModule;
use gva_core::{Rat, Scalar};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Loads one of the fixture algebra descriptions.
pub fn load(name: &str) -> (AlgebraInstance, Option<CosetModule>) {
    let path = fixture(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    parse_spec(&text)
        .and_then(|spec| spec.build())
        .unwrap_or_else(|e| panic!("cannot build {}: {e}", path.display()))
}

/// Runs the compiled binary from the crate root (so fixture paths are
/// relative); returns stdout, stderr, and the exit code.
pub fn run_gva(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_gva"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
        out.status.code().expect("process exits normally"),
    )
}

/// Replaces `"elapsed_ms": <n>` values by zero so output is reproducible.
pub fn scrub_elapsed(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    const KEY: &str = "\"elapsed_ms\": ";
    while let Some(at) = rest.find(KEY) {
        let split = at + KEY.len();
        out.push_str(&rest[..split]);
        rest = &rest[split..];
        let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        out.push('0');
        rest = &rest[digits..];
    }
    out.push_str(rest);
    out
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64) -> Rat {
    Rat::from_int(n)
}

pub fn rq(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// A random nonzero scalar: a small rational, sometimes with a quarter- or
/// half-turn phase attached.
pub fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let pool = [r(1), r(-1), rq(1, 2), r(2), rq(-1, 3)];
    let mag = pool[rng.gen_range(0..pool.len())].clone();
    let mut s = Scalar::from_rational(mag);
    match rng.gen_range(0..4) {
        0 => s = &s * &Scalar::root_of_unity(&rq(1, 2)),
        1 => s = &s * &Scalar::root_of_unity(&Rat::one()),
        _ => {}
    }
    s
}

/// A random creation pattern of total depth at most `max_depth` over `dim`
/// coordinate directions.
fn random_creations(rng: &mut ChaCha8Rng, dim: usize, max_depth: u64) -> Vec<(usize, u64)> {
    let mut remaining = rng.gen_range(0..=max_depth);
    let mut out = Vec::new();
    while remaining > 0 {
        let level = rng.gen_range(1..=remaining);
        out.push((rng.gen_range(0..dim), level));
        remaining -= level;
    }
    out
}

/// A random homogeneous state of the given charge with one or two monomial
/// terms of total creation depth at most `max_depth`. Never zero.
pub fn random_state(
    rng: &mut ChaCha8Rng,
    charge: &[Rat],
    max_depth: u64,
) -> FockState {
    let dim = charge.len();
    let mut out = FockState::zero();
    let terms = rng.gen_range(1..=2);
    for _ in 0..terms {
        let mut m = FockMonomial::charge_only(charge.to_vec());
        for (idx, level) in random_creations(rng, dim, max_depth) {
            m = m.with_creation(idx, level);
        }
        out.add_term(m, random_scalar(rng));
    }
    if out.is_zero() {
        // Two equal monomials with opposite coefficients cancelled.
        FockState::charge_state(charge.to_vec())
    } else {
        out
    }
}

/// A random charge `k * generator` with `k` in `[-2, 2]`, over the basis of
/// the algebra's group (rank one in the reference algebras).
pub fn random_charge(rng: &mut ChaCha8Rng, alg: &AlgebraInstance) -> Vec<Rat> {
    let basis = &alg.lattice.subgroup.basis;
    let mut charge = vec![Rat::zero(); alg.dim()];
    for b in basis {
        let k = r(rng.gen_range(-2..=2));
        for (i, bi) in b.iter().enumerate() {
            charge[i] = &charge[i] + &(&k * bi);
        }
    }
    charge
}

/// Picks a random element of the coset `rep + Z` with value in `[lo, hi]`.
pub fn random_coset_index(rng: &mut ChaCha8Rng, rep: &Rat, lo: i64, hi: i64) -> Rat {
    let choices = gva_core::rat::coset_range(rep, &r(lo), &r(hi));
    assert!(!choices.is_empty(), "coset window is empty");
    choices[rng.gen_range(0..choices.len())].clone()
}

/// Every golden invocation: a stable name plus the argument list. Shared
/// between the golden-transcript test and the acceptance suite.
pub const MANIFEST: &[(&str, &[&str])] = &[
    // gram [[1]]
    ("one-mode", &["--spec", "tests/fixtures/one.json", "mode", "--a", "e(1)", "--n", "0", "--c", "e(-1)"]),
    ("one-apply", &["--spec", "tests/fixtures/one.json", "--window", "2", "apply", "--a", "e(1)", "--c", "e(-1)"]),
    ("one-locality-order", &["--spec", "tests/fixtures/one.json", "locality-order", "--a", "e(1)", "--b", "e(1)"]),
    ("one-check-locality", &["--spec", "tests/fixtures/one.json", "--window", "3", "check", "locality", "--a", "e(1)", "--b", "e(1)", "--c", "e(-1)"]),
    ("one-check-locality-below", &["--spec", "tests/fixtures/one.json", "--window", "3", "check", "locality", "--a", "e(1)", "--b", "e(1)", "--c", "e(-1)", "--n", "-2"]),
    ("one-check-skew", &["--spec", "tests/fixtures/one.json", "check", "skew", "--a", "e(1)", "--b", "a[-1] e(1)"]),
    ("one-check-borcherds", &["--spec", "tests/fixtures/one.json", "check", "borcherds", "--a", "e(1)", "--b", "e(-1)", "--c", "a[-1] e(1)", "--m", "0", "--n", "-1", "--k", "1"]),
    ("one-check-jacobi", &["--spec", "tests/fixtures/one.json", "--window", "3", "check", "jacobi", "--a", "e(1)", "--b", "e(-1)", "--c", "e(1)", "--n", "-1"]),
    ("one-check-assoc", &["--spec", "tests/fixtures/one.json", "--window", "2", "check", "assoc", "--a", "e(1)", "--b", "e(-1)", "--c", "e(1)", "--l", "1"]),
    ("one-check-translation", &["--spec", "tests/fixtures/one.json", "--window", "3", "check", "translation", "--a", "a[-1] e(1)"]),
    ("one-cocycle-construct", &["--spec", "tests/fixtures/one.json", "cocycle", "construct"]),
    ("one-dual-group", &["--spec", "tests/fixtures/one.json", "dual-group"]),
    // gram [[1/2]]
    ("half-mode", &["--spec", "tests/fixtures/half.json", "mode", "--a", "e(1)", "--n", "-3/2", "--c", "e(1)"]),
    ("half-mode-zero", &["--spec", "tests/fixtures/half.json", "mode", "--a", "e(1)", "--n", "-1/2", "--c", "e(1)"]),
    ("half-apply", &["--spec", "tests/fixtures/half.json", "--window", "1", "apply", "--a", "e(1)", "--c", "e(1)"]),
    ("half-locality-order", &["--spec", "tests/fixtures/half.json", "locality-order", "--a", "e(1)", "--b", "e(1)"]),
    ("half-check-locality", &["--spec", "tests/fixtures/half.json", "--window", "3", "check", "locality", "--a", "e(1)", "--b", "e(1)", "--c", "e(1)"]),
    ("half-check-skew", &["--spec", "tests/fixtures/half.json", "check", "skew", "--a", "e(1)", "--b", "e(1)"]),
    ("half-check-borcherds", &["--spec", "tests/fixtures/half.json", "check", "borcherds", "--a", "e(1)", "--b", "e(1)", "--c", "e(1)", "--m", "-1/2", "--n", "-1/2", "--k", "-1/2"]),
    ("half-check-jacobi", &["--spec", "tests/fixtures/half.json", "--window", "3", "check", "jacobi", "--a", "e(1)", "--b", "e(1)", "--c", "e(1)", "--n", "-3/2"]),
    ("half-check-assoc", &["--spec", "tests/fixtures/half.json", "--window", "2", "check", "assoc", "--a", "e(1)", "--b", "e(1)", "--c", "e(1)", "--l", "-1/2"]),
    ("half-check-translation", &["--spec", "tests/fixtures/half.json", "--window", "2", "check", "translation", "--a", "e(1)"]),
    ("half-cocycle-construct", &["--spec", "tests/fixtures/half.json", "cocycle", "construct"]),
    ("half-dual-group", &["--spec", "tests/fixtures/half.json", "dual-group"]),
    // gram [[2]] with module
    ("two-mode", &["--spec", "tests/fixtures/two.json", "mode", "--a", "e(1)", "--n", "-2", "--c", "e(-1)"]),
    ("two-apply", &["--spec", "tests/fixtures/two.json", "--window", "2", "apply", "--a", "e(1)", "--c", "e(-1)"]),
    ("two-locality-order", &["--spec", "tests/fixtures/two.json", "locality-order", "--a", "e(1)", "--b", "e(-1)"]),
    ("two-check-locality", &["--spec", "tests/fixtures/two.json", "--window", "3", "check", "locality", "--a", "e(1)", "--b", "e(-1)", "--c", "e(1)"]),
    ("two-check-skew", &["--spec", "tests/fixtures/two.json", "check", "skew", "--a", "e(1)", "--b", "e(-1)"]),
    ("two-check-borcherds", &["--spec", "tests/fixtures/two.json", "check", "borcherds", "--a", "e(1)", "--b", "e(-1)", "--c", "e(1)", "--m", "-2", "--n", "-2", "--k", "2"]),
    ("two-check-jacobi", &["--spec", "tests/fixtures/two.json", "--window", "3", "check", "jacobi", "--a", "e(1)", "--b", "e(-1)", "--c", "e(1)", "--n", "-2"]),
    ("two-check-assoc", &["--spec", "tests/fixtures/two.json", "--window", "2", "check", "assoc", "--a", "e(1)", "--b", "e(-1)", "--c", "e(1)", "--l", "2"]),
    ("two-check-translation", &["--spec", "tests/fixtures/two.json", "--window", "3", "check", "translation", "--a", "e(1)"]),
    ("two-cocycle-construct", &["--spec", "tests/fixtures/two.json", "cocycle", "construct"]),
    ("two-cocycle-verify", &["--spec", "tests/fixtures/two.json", "cocycle", "verify"]),
    ("two-cocycle-invariant", &["--spec", "tests/fixtures/two.json", "cocycle", "invariant"]),
    ("two-cocycle-extend", &["--spec", "tests/fixtures/two.json", "cocycle", "extend"]),
    ("two-dual-group", &["--spec", "tests/fixtures/two.json", "dual-group"]),
    ("two-twist", &["--spec", "tests/fixtures/two.json", "twist"]),
    ("two-module-mode", &["--spec", "tests/fixtures/two.json", "module", "mode", "--a", "e(1)", "--n", "-2", "--c", "e(1/2)"]),
    ("two-module-check", &["--spec", "tests/fixtures/two.json", "module", "check", "--a", "e(1)", "--b", "e(1)", "--c", "e(1/2)", "--m", "-1", "--n", "-2", "--k", "-1"]),
    ("two-twisted-check", &["--spec", "tests/fixtures/two.json", "twisted", "check", "--a", "e(1)", "--b", "e(1)", "--c", "e(1/2)", "--m", "-1", "--n", "-2", "--k", "-1"]),
    // fermionic rank one with its cocycle and half-charge module
    ("fermion-module-mode", &["--spec", "tests/fixtures/fermion.json", "module", "mode", "--a", "e(1)", "--n", "-1/2", "--c", "e(1/2)"]),
    ("fermion-twisted-check", &["--spec", "tests/fixtures/fermion.json", "twisted", "check", "--a", "e(1)", "--b", "e(1)", "--c", "e(1/2)", "--m", "-1/2", "--n", "-1", "--k", "-1/2"]),
    ("fermion-twist", &["--spec", "tests/fixtures/fermion.json", "twist"]),
    ("fermion-cocycle-verify", &["--spec", "tests/fixtures/fermion.json", "cocycle", "verify"]),
    // square lattice with sign cocycle
    ("square-cocycle-verify", &["--spec", "tests/fixtures/square.json", "cocycle", "verify"]),
    ("square-cocycle-invariant", &["--spec", "tests/fixtures/square.json", "cocycle", "invariant"]),
    ("square-mode", &["--spec", "tests/fixtures/square.json", "mode", "--a", "e(1,0)", "--n", "-1", "--c", "e(0,1)"]),
    ("square-mode-reversed", &["--spec", "tests/fixtures/square.json", "mode", "--a", "e(0,1)", "--n", "-1", "--c", "e(1,0)"]),
    ("square-check-borcherds", &["--spec", "tests/fixtures/square.json", "check", "borcherds", "--a", "e(1,0)", "--b", "e(0,1)", "--c", "e(1,1)", "--m", "-1", "--n", "0", "--k", "-1"]),
    ("square-check-skew", &["--spec", "tests/fixtures/square.json", "check", "skew", "--a", "e(1,0)", "--b", "e(0,1)"]),
    ("square-apply", &["--spec", "tests/fixtures/square.json", "--window", "1", "apply", "--a", "e(1,0)", "--c", "e(0,1)"]),
    // machine-readable output
    ("json-mode", &["--spec", "tests/fixtures/one.json", "--format", "json", "mode", "--a", "e(1)", "--n", "0", "--c", "e(-1)"]),
    ("json-borcherds", &["--spec", "tests/fixtures/half.json", "--format", "json", "check", "borcherds", "--a", "e(1)", "--b", "e(1)", "--c", "e(1)", "--m", "-1/2", "--n", "-1/2", "--k", "-1/2"]),
    ("json-locality-below", &["--spec", "tests/fixtures/one.json", "--format", "json", "--window", "3", "check", "locality", "--a", "e(1)", "--b", "e(1)", "--c", "e(-1)", "--n", "-2"]),
    ("json-apply", &["--spec", "tests/fixtures/one.json", "--format", "json", "--window", "1", "apply", "--a", "e(1)", "--c", "e(-1)"]),
    // batch suite
    ("suite-run", &["--suite", "tests/fixtures/suite.json"]),
    ("suite-run-json", &["--format", "json", "--suite", "tests/fixtures/suite.json"]),
    // input errors: exit 2, nothing on standard output
    ("err-bad-state", &["--spec", "tests/fixtures/one.json", "mode", "--a", "e(", "--n", "0", "--c", "e(0)"]),
    ("err-unknown-name", &["--spec", "tests/fixtures/one.json", "mode", "--a", "x[-1] e(1)", "--n", "0", "--c", "e(0)"]),
    ("err-coset", &["--spec", "tests/fixtures/half.json", "check", "borcherds", "--a", "e(1)", "--b", "e(1)", "--c", "e(1)", "--m", "0", "--n", "-1/2", "--k", "-1/2"]),
    ("err-bad-window", &["--spec", "tests/fixtures/one.json", "--window", "w", "apply", "--a", "e(1)", "--c", "e(0)"]),
    ("err-no-module", &["--spec", "tests/fixtures/one.json", "module", "mode", "--a", "e(1)", "--n", "0", "--c", "e(0)"]),
    ("err-no-cocycle", &["--spec", "tests/fixtures/one.json", "twist"]),
    ("err-no-spec", &["mode", "--a", "e(1)", "--n", "0", "--c", "e(0)"]),
    ("err-bad-charge-dim", &["--spec", "tests/fixtures/square.json", "mode", "--a", "e(1)", "--n", "0", "--c", "e(0,0)"]),
];

/// Runs every manifest entry and formats the combined transcript.
pub fn transcript() -> String {
    let mut out = String::new();
    for (name, args) in MANIFEST {
        let (stdout, stderr, code) = run_gva(args);
        out.push_str(&format!("### {name}\n$ gva {}\n", args.join(" ")));
        out.push_str(&scrub_elapsed(&stdout));
        if !stderr.is_empty() {
            out.push_str("--- stderr ---\n");
            out.push_str(&stderr);
        }
        out.push_str(&format!("exit={code}\n\n"));
    }
    out
}

/// The stored transcript the manifest run must reproduce.
pub fn golden_transcript_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/transcript.txt")
}
