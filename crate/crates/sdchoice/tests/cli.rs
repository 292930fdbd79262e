//! End-to-end tests of the `sdchoice` binary: exit codes are the machine
//! contract, structured output is stable, and printed witnesses re-verify
//! when fed back through the corresponding checker subcommand.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn sdchoice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdchoice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn eval_prints_the_exact_lottery() {
    let output = sdchoice(&[
        "eval",
        "--scheme",
        "rsd",
        "--profile",
        &fixture("sec3_example.prof"),
    ]);
    assert_eq!(code(&output), 0);
    assert_eq!(stdout(&output), "5/12*a + 5/12*b + 1/12*c + 1/12*d\n");
}

#[test]
fn eval_structured_embeds_rationals_as_pairs() {
    let output = sdchoice(&[
        "eval",
        "--scheme",
        "rd",
        "--profile",
        &fixture("r13.prof"),
        "--format",
        "structured",
    ]);
    assert_eq!(code(&output), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(value["lottery"][0][0], "a");
    assert_eq!(value["lottery"][0][1], "1");
    assert_eq!(value["lottery"][0][2], "4");
    assert!(stdout(&output).find("0.").is_none(), "no decimals anywhere");
}

#[test]
fn enumerate_counts_weak_orders() {
    let output = sdchoice(&["enumerate", "--alternatives", "a,b,c,d", "--count-only"]);
    assert_eq!(code(&output), 0);
    assert_eq!(stdout(&output), "75\n");

    let listing = sdchoice(&["enumerate", "--alternatives", "a,b"]);
    assert_eq!(stdout(&listing), "a > b\na~b\nb > a\n");
}

#[test]
fn check_subcommands_report_violations_with_exit_1() {
    let inefficient = sdchoice(&[
        "check-sdeff",
        "--profile",
        &fixture("sec3_example.prof"),
        "--lottery",
        "1/4*a + 1/4*b + 1/4*c + 1/4*d",
    ]);
    assert_eq!(code(&inefficient), 1);
    assert!(stdout(&inefficient).contains("inefficient"));

    let efficient = sdchoice(&[
        "check-sdeff",
        "--profile",
        &fixture("sec3_example.prof"),
        "--lottery",
        "1/2*a + 1/2*b",
    ]);
    assert_eq!(code(&efficient), 0);

    // The brute-force oracle agrees through --max-denominator.
    let brute = sdchoice(&[
        "check-sdeff",
        "--profile",
        &fixture("sec3_example.prof"),
        "--lottery",
        "1/4*a + 1/4*b + 1/4*c + 1/4*d",
        "--max-denominator",
        "12",
    ]);
    assert_eq!(code(&brute), 1);

    let expost = sdchoice(&[
        "check-expost",
        "--profile",
        &fixture("sec3_example.prof"),
        "--lottery",
        "1/4*a + 1/4*b + 1/4*c + 1/4*d",
    ]);
    assert_eq!(code(&expost), 0, "no alternative is Pareto-dominated there");
}

#[test]
fn replay_emits_a_verifiable_witness_and_exit_1() {
    let output = sdchoice(&["replay", "--scheme", "rsd", "--format", "structured"]);
    assert_eq!(code(&output), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["property"], "sd-efficiency");
    assert_eq!(report["step"], "R1-efficiency");

    // Byte stability: identical inputs, identical report.
    let again = sdchoice(&["replay", "--scheme", "rsd", "--format", "structured"]);
    assert_eq!(stdout(&output), stdout(&again));

    // Feed the witness back: the dominating lottery must itself be
    // sd-efficient on the same profile (exit 0), while the convicted
    // lottery must be rejected (exit 1).
    let dominator = lottery_text(&report["witness"]["dominator"]);
    let convicted = lottery_text(&report["witness"]["lottery"]);
    let check = sdchoice(&[
        "check-sdeff",
        "--profile",
        &fixture("r1.prof"),
        "--lottery",
        &dominator,
    ]);
    assert_eq!(
        code(&check),
        0,
        "replay witness must re-verify as efficient"
    );
    let check = sdchoice(&[
        "check-sdeff",
        "--profile",
        &fixture("r1.prof"),
        "--lottery",
        &convicted,
    ]);
    assert_eq!(code(&check), 1, "the convicted lottery is dominated");
}

fn lottery_text(value: &serde_json::Value) -> String {
    value
        .as_array()
        .unwrap()
        .iter()
        .filter(|triple| triple[1] != "0")
        .map(|triple| {
            format!(
                "{}/{}*{}",
                triple[1].as_str().unwrap(),
                triple[2].as_str().unwrap(),
                triple[0].as_str().unwrap()
            )
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[test]
fn replay_with_a_tabulated_mock_reaches_the_final_step() {
    let output = sdchoice(&[
        "replay",
        "--table",
        &fixture("mock_chain.table"),
        "--format",
        "structured",
    ]);
    assert_eq!(code(&output), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["property"], "sd-strategyproofness");
    assert_eq!(report["step"], "R13-final");
    assert_eq!(report["witness"]["agent"], 4);

    // The mock's truthful and deviation outcomes re-verify through eval.
    let eval_r13 = sdchoice(&[
        "eval",
        "--table",
        &fixture("mock_chain.table"),
        "--profile",
        &fixture("r13.prof"),
    ]);
    assert_eq!(stdout(&eval_r13), "1/4*a + 1/2*b + 1/4*c\n");
    let eval_r12 = sdchoice(&[
        "eval",
        "--table",
        &fixture("mock_chain.table"),
        "--profile",
        &fixture("r12.prof"),
    ]);
    assert_eq!(stdout(&eval_r12), "1/2*b + 1/2*c\n");
}

#[test]
fn lifted_replay_via_flags() {
    let output = sdchoice(&[
        "replay",
        "--scheme",
        "rsd",
        "--agents",
        "6",
        "--alternatives",
        "a,b,c,d,e",
    ]);
    assert_eq!(code(&output), 1);
    assert!(stdout(&output).contains("sd-efficiency"));
}

#[test]
fn symmetry_subcommand() {
    let holds = sdchoice(&[
        "symmetry",
        "--scheme",
        "rsd",
        "--profile",
        &fixture("r1.prof"),
        "--pi",
        "(1 2)(3 4)",
        "--sigma",
        "(a b)(c d)",
    ]);
    assert_eq!(code(&holds), 0);

    let two_agent = write_temp_profile("agent 1: a > b\nagent 2: b > a\n");
    let fails = sdchoice(&[
        "symmetry",
        "--scheme",
        "serial",
        "--profile",
        two_agent.to_str().unwrap(),
        "--pi",
        "(1 2)",
        "--sigma",
        "id",
    ]);
    assert_eq!(code(&fails), 1);
    assert!(stdout(&fails).contains("fails"));
}

#[test]
fn check_sp_finds_a_tabulated_manipulation() {
    // A complete table on one agent over {a,b}: truth-telling with a > b
    // yields b, misreporting b > a yields a, so the table is manipulable.
    let dir = temp_dir();
    std::fs::write(dir.join("truth.prof"), "agent 1: a > b\n").unwrap();
    std::fs::write(dir.join("flip.prof"), "agent 1: b > a\n").unwrap();
    std::fs::write(dir.join("tie.prof"), "agent 1: a~b\n").unwrap();
    let table = dir.join("scheme.table");
    std::fs::write(&table, "truth.prof: 1*b\nflip.prof: 1*a\ntie.prof: 1*b\n").unwrap();

    let output = sdchoice(&[
        "check-sp",
        "--table",
        table.to_str().unwrap(),
        "--profile",
        dir.join("truth.prof").to_str().unwrap(),
        "--format",
        "structured",
    ]);
    assert_eq!(code(&output), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["manipulable"], true);
    assert_eq!(report["witness"]["agent"], 1);
    assert_eq!(report["witness"]["misreport"], "b > a");

    // rsd is strategyproof on the same profile.
    let clean = sdchoice(&[
        "check-sp",
        "--scheme",
        "rsd",
        "--strong",
        "--profile",
        dir.join("truth.prof").to_str().unwrap(),
    ]);
    assert_eq!(code(&clean), 0);
}

#[test]
fn lift_prints_the_embedded_profile() {
    let output = sdchoice(&[
        "lift",
        "--profile",
        &fixture("r1.prof"),
        "--agents",
        "6",
        "--alternatives",
        "a,b,c,d,e",
    ]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("agent 1: a~c > b~d > e"));
    assert!(text.contains("agent 6: a~b~c~d~e"));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(code(&sdchoice(&["eval", "--scheme", "rsd"])), 2);
    assert_eq!(
        code(&sdchoice(&[
            "eval",
            "--scheme",
            "not-a-scheme",
            "--profile",
            &fixture("r1.prof"),
        ])),
        2
    );
    assert_eq!(
        code(&sdchoice(&[
            "eval",
            "--scheme",
            "rsd",
            "--profile",
            "/no/such/file.prof",
        ])),
        2
    );
    // A malformed profile file.
    let dir = temp_dir();
    let bad = dir.join("bad.prof");
    std::fs::write(&bad, "agent 1: a > a\n").unwrap();
    assert_eq!(
        code(&sdchoice(&[
            "eval",
            "--scheme",
            "rsd",
            "--profile",
            bad.to_str().unwrap()
        ])),
        2
    );
}

fn temp_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "sdchoice-cli-test-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_temp_profile(text: &str) -> PathBuf {
    let path = temp_dir().join("profile.prof");
    std::fs::write(&path, text).unwrap();
    path
}
