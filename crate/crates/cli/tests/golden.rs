//! Golden-file tests for the command-line interface: every command is run
//! against the reference algebra descriptions, and the full transcript
//! (standard output, standard error, and exit code per invocation) must
//! match `tests/golden/transcript.txt` byte for byte after timing fields
//! are zeroed.
//!
//! Regenerate the transcript with `UPDATE_GOLDEN=1 cargo test -p gva
//! --test golden` after an intentional output change, and review the diff.
//!
//! The file also holds the parse/print round-trip property and the
//! exit-code contract cases.

mod common;

use common::{run_gva, MANIFEST};

use gva_core::fock::{FockMonomial, FockState};
use gva_core::lattice::SpaceSpec;
use gva_core::{Rat, Scalar};
use proptest::prelude::*;

#[test]
fn golden_transcript_matches() {
    let path = common::golden_transcript_path();
    let actual = common::transcript();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .expect("golden transcript exists; regenerate with UPDATE_GOLDEN=1");
    if expected != actual {
        let first_diff = expected
            .lines()
            .zip(actual.lines())
            .position(|(e, a)| e != a);
        panic!(
            "CLI transcript deviates from the golden file (first differing line: {:?});\n\
             regenerate with UPDATE_GOLDEN=1 and review the diff",
            first_diff
        );
    }
}

#[test]
fn error_exits_leave_stdout_empty() {
    for (name, args) in MANIFEST.iter().filter(|(n, _)| n.starts_with("err-")) {
        let (stdout, stderr, code) = run_gva(args);
        assert_eq!(code, 2, "{name} must exit 2");
        assert!(stdout.is_empty(), "{name} wrote partial output");
        assert!(stderr.starts_with("error:"), "{name} lacks a diagnostic");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let (_, _, ok) = run_gva(&[
        "--spec", "tests/fixtures/one.json", "mode", "--a", "e(1)", "--n", "0", "--c", "e(-1)",
    ]);
    assert_eq!(ok, 0);
    let (_, _, violated) = run_gva(&[
        "--spec", "tests/fixtures/one.json", "--window", "3",
        "check", "locality", "--a", "e(1)", "--b", "e(1)", "--c", "e(-1)", "--n", "-2",
    ]);
    assert_eq!(violated, 1);
    // Usage errors from the argument parser also exit 2.
    let (stdout, _, usage) = run_gva(&["definitely-not-a-command"]);
    assert_eq!(usage, 2);
    assert!(stdout.is_empty());
    // Aggregated suites: exit 1 exactly when some record is violated.
    let (_, _, suite) = run_gva(&["--suite", "tests/fixtures/suite.json"]);
    assert_eq!(suite, 1);
}

fn test_space() -> SpaceSpec {
    let z = Rat::zero;
    let o = Rat::one;
    SpaceSpec::new(
        vec!["a".into(), "b".into()],
        vec![vec![o(), z()], vec![z(), o()]],
    )
    .unwrap()
}

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    let mags = prop_oneof![
        Just(Rat::one()),
        Just(Rat::from_int(-1)),
        Just(Rat::new(1, 2)),
        Just(Rat::new(-2, 3)),
        Just(Rat::from_int(3)),
    ];
    (mags, 0u8..4).prop_map(|(mag, phase)| {
        let s = Scalar::from_rational(mag);
        match phase {
            0 => &s * &Scalar::root_of_unity(&Rat::new(1, 2)),
            1 => &s * &Scalar::root_of_unity(&Rat::new(2, 3)),
            2 => &s * &Scalar::root_of_unity(&Rat::one()),
            _ => s,
        }
    })
}

fn monomial_strategy() -> impl Strategy<Value = FockMonomial> {
    let charge = (-3i64..=3, 1i64..=2, -3i64..=3, 1i64..=2)
        .prop_map(|(n1, d1, n2, d2)| vec![Rat::new(n1, d1), Rat::new(n2, d2)]);
    (prop::collection::vec((0usize..2, 1u64..4), 0..4), charge).prop_map(
        |(creations, charge)| {
            let mut m = FockMonomial::charge_only(charge);
            for (i, l) in creations {
                m = m.with_creation(i, l);
            }
            m
        },
    )
}

fn state_strategy() -> impl Strategy<Value = FockState> {
    prop::collection::vec((monomial_strategy(), scalar_strategy()), 1..3).prop_map(|terms| {
        let mut s = FockState::zero();
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Printing a state and parsing the result reproduces the state, and a
    /// second print round is a fixed point.
    #[test]
    fn parse_print_round_trip(state in state_strategy()) {
        let space = test_space();
        let printed = state.render(&space);
        let parsed = gva::parse::parse_state(&printed, &space).unwrap();
        prop_assert_eq!(&parsed, &state);
        prop_assert_eq!(parsed.render(&space), printed);
    }
}
