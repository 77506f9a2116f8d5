use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn rtl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtl")).args(args).output().expect("run rtl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn eval_robust_and_classical() {
    let o = rtl(&["eval", "--logic", "rltl", "--formula", "G p", "--trace", "{} ; {p}"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "0111"));
    let o = rtl(&["eval", "--logic", "ldl", "--formula", "[(tt ; tt)*] p", "--trace", "; {p} {}"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "1"));
    let o = rtl(&["eval", "--logic", "ltl", "--formula", "G p", "--trace", "; {p} {}"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "0"));
}

#[test]
fn eval_prompt_needs_bound() {
    let args = ["eval", "--logic", "rpromptltl", "--formula", "G Fp s", "--trace", "; {s} {} {}"];
    let o = rtl(&args);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--k"));
    let with = |k: &str| {
        let mut a = args.to_vec();
        a.extend(["--k", k]);
        stdout(&rtl(&a)).trim().to_string()
    };
    assert_eq!(with("2"), "1111");
    assert_eq!(with("1"), "0011");
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(code(&rtl(&["eval", "--logic", "ltl", "--formula", "G (p", "--trace", "; {p}"])), 2);
    assert_eq!(code(&rtl(&["eval", "--logic", "ltl", "--formula", "G p", "--trace", "{p"])), 2);
    assert_eq!(code(&rtl(&["eval", "--logic", "nonsense", "--formula", "p", "--trace", "; {}"])), 2);
    assert_eq!(code(&rtl(&["mc", "--system", &data("missing.ts"), "--logic", "ltl", "--formula", "p"])), 2);
}

#[test]
fn translate_examples() {
    let o = rtl(&["translate", "--from", "rpromptltl", "--to", "promptltl", "--formula", "G Fp s", "--beta", "0011"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "G F Fp s"));
    let o = rtl(&["translate", "--from", "rpromptltl", "--to", "promptltl", "--formula", "G Fp s", "--beta", "0000"]);
    assert_eq!(stdout(&o).trim(), "tt");
    let o = rtl(&["translate", "--from", "rpromptltl", "--to", "promptltl", "--formula", "G Fp s"]);
    assert_eq!(code(&o), 2);
    let o = rtl(&["translate", "--from", "rldl", "--to", "ltl", "--formula", "p"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn translate_rejects_non_limit_matching_fragment() {
    let ok = rtl(&["translate", "--from", "rpromptldl", "--to", "promptldl", "--formula", "[tt*] <p tt*> s", "--beta", "1111"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let bad = rtl(&["translate", "--from", "rpromptldl", "--to", "promptldl", "--formula", "[tt*] <p p*> s", "--beta", "1111"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("limit-matching"), "{}", stderr(&bad));
}

#[test]
fn compile_hoa_header() {
    let o = rtl(&["compile", "--formula", "tt", "--beta", "1111", "--target", "nba"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let heads: Vec<&str> = out.lines().take(8).map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(heads, ["HOA", "States", "Start", "AP", "acc-name", "Acceptance", "properties", "--BODY--"]);
    assert!(out.contains("States: 1\n"));
    assert!(out.trim_end().ends_with("--END--"));

    let o = rtl(&["compile", "--formula", "G p", "--logic", "rltl", "--beta", "0011", "--target", "dpa"]);
    assert!(stdout(&o).contains("acc-name: parity max even"));
}

#[test]
fn compile_check_trace() {
    let base = ["compile", "--formula", "G p", "--logic", "rltl", "--beta", "0011", "--target"];
    for target in ["nba", "dpa"] {
        let mut a = base.to_vec();
        a.extend([target, "--check-trace", "{p} ; {}"]);
        let o = rtl(&a);
        assert_eq!(code(&o), 1);
        assert!(stderr(&o).contains("rejected"));
        let mut a = base.to_vec();
        a.extend([target, "--check-trace", "{} ; {p}", "--stats"]);
        let o = rtl(&a);
        assert_eq!(code(&o), 0);
        assert!(stderr(&o).contains("accepted"));
        assert!(stderr(&o).contains("states: "));
    }
}

#[test]
fn mc_robust_verdicts() {
    let o = rtl(&["mc", "--system", &data("loop_p.ts"), "--logic", "rltl", "--formula", "G p"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "yes"));
    let o = rtl(&["mc", "--system", &data("drop.ts"), "--logic", "rltl", "--formula", "G p", "--beta", "0011"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample: {p} ; {}"), "{}", stdout(&o));
    let o = rtl(&["mc", "--system", &data("drop.ts"), "--logic", "rltl", "--formula", "G p", "--beta", "0000"]);
    assert_eq!(code(&o), 0);
    let o = rtl(&["mc", "--system", &data("even.ts"), "--logic", "ldl", "--formula", "[(tt ; tt)*] s"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn mc_prompt_verdicts() {
    let run = |sys: &str, beta: &str| code(&rtl(&["mc", "--system", &data(sys), "--logic", "rpromptltl", "--formula", "G Fp s", "--beta", beta]));
    assert_eq!(run("sync.ts", "1111"), 0);
    assert_eq!(run("wait.ts", "0011"), 1);
    assert_eq!(run("wait.ts", "0001"), 0);

    let o = rtl(&["mc", "--system", &data("wait.ts"), "--logic", "promptltl", "--formula", "G Fp s"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample for k = 0"));

    let frag = |sys: &str| code(&rtl(&["mc", "--system", &data(sys), "--logic", "rpromptldl", "--formula", "[tt*] <p tt*> s"]));
    assert_eq!(frag("sync.ts"), 0);
    assert_eq!(frag("wait.ts"), 1);
    let o = rtl(&["mc", "--system", &data("sync.ts"), "--logic", "rpromptldl", "--formula", "[tt*] <p p*> s"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn mc_rejects_dead_ends() {
    let o = rtl(&["mc", "--system", &data("broken.ts"), "--logic", "ltl", "--formula", "G p"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no outgoing edge"));
}

#[test]
fn synth_games() {
    let o = rtl(&["synth", "--arena", &data("reach.game"), "--logic", "rpromptltl", "--formula", "Fp s"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("winner: player 0\nbound: "));
    assert!(out.contains("initial memory: m"));

    let delay = |logic: &str, formula: &str, beta: &str| {
        rtl(&["synth", "--arena", &data("delay.game"), "--logic", logic, "--formula", formula, "--beta", beta])
    };
    let o = delay("rpromptltl", "Fp s", "1111");
    assert_eq!((code(&o), stdout(&o).trim()), (1, "winner: player 1"));
    let o = delay("rpromptltl", "Fp s", "0000");
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("bound: 0"));
    assert_eq!(code(&delay("rldl", "<tt*> s", "1111")), 1);
}

#[test]
fn guard_check_output() {
    assert_eq!(stdout(&rtl(&["guard-check", "tt*"])).trim(), "test-free: yes, limit-matching: yes");
    assert_eq!(stdout(&rtl(&["guard-check", "p ; tt*"])).trim(), "test-free: yes, limit-matching: no");
    assert_eq!(stdout(&rtl(&["guard-check", "{p}?"])).trim(), "test-free: no, limit-matching: n/a");
}

#[test]
fn fuzz_and_determinism() {
    let o = rtl(&["fuzz", "--trials", "200", "--seed", "7"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "ok"));

    let args = ["compile", "--formula", "G (p -> F q)", "--logic", "rltl", "--beta", "0111", "--target", "dpa"];
    assert_eq!(stdout(&rtl(&args)), stdout(&rtl(&args)));
    let args = ["synth", "--arena", &data("reach.game"), "--logic", "rpromptltl", "--formula", "Fp s"];
    assert_eq!(stdout(&rtl(&args)), stdout(&rtl(&args)));
}
