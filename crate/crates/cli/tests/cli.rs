use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebkex"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(key)?.strip_prefix('='))
        .unwrap()
}

#[test]
fn eval_matrix_half_cubed_is_minus_one() {
    let o = run(&["--digits", "40", "eval", "--x", "0.5", "--n", "3", "--engine", "matrix"]);
    assert!(o.status.success());
    let value = field(stdout(&o).lines().next().unwrap(), "value").to_string();
    assert_eq!(value, format!("-1.{}", "0".repeat(40)));
}

#[test]
fn eval_all_engines_agree_for_n_100() {
    let o = run(&["--digits", "60", "eval", "--x", "-0.3", "--n", "100"]);
    let out = stdout(&o);
    let values: Vec<&str> = out.lines().map(|l| field(l, "value")).collect();
    assert_eq!(values.len(), 4);
    // compare all but the last two rendered digits
    let head = |v: &str| v[..v.len() - 2].to_string();
    assert!(values.iter().all(|v| head(v) == head(values[0])), "{values:?}");
}

#[test]
fn eval_large_index_respects_the_multiplication_bound() {
    let o = run(&["--digits", "700", "eval", "--x", "0.3", "--n", "386093", "--engine", "matrix"]);
    let muls: u64 = field(stdout(&o).trim(), "muls").parse().unwrap();
    assert!(muls <= 16 * 2325, "{muls}");
}

#[test]
fn bench_with_zero_reps_prints_only_the_header() {
    let o = run(&["--format", "csv", "bench", "--reps", "0"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "engine,digits,index_digits,wall_ms,muls,adds,equal_digits\n"
    );
}

#[test]
fn bench_trig_row_at_d300() {
    let o = run(&[
        "--format", "csv", "bench", "--digits-list", "300", "--index-digits", "200", "--engine",
        "trig",
    ]);
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], ["trig", "300", "200"]);
    assert!(row[6].parse::<u32>().unwrap() >= 90, "{row:?}");
}

#[test]
fn shamir_deal_then_reconstruct() {
    let o = run(&[
        "--seed", "5", "shamir", "deal", "--secret", "1234", "--threshold", "2", "--count", "5",
        "--prime", "2147483647",
    ]);
    assert!(o.status.success());
    let shares: Vec<String> = stdout(&o)
        .lines()
        .map(|l| format!("{}:{}", field(l, "z"), field(l, "y")))
        .collect();
    let mut args = vec!["shamir", "reconstruct", "--threshold", "2", "--prime", "2147483647"];
    for s in &shares[2..] {
        args.extend(["--share", s]);
    }
    let o = run(&args);
    assert_eq!(stdout(&o), "secret=1234\n");
}

#[test]
fn conf3_prints_three_identical_digests() {
    let o = run(&["--seed", "8", "conf3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let keys: Vec<&str> = out.lines().map(|l| field(l, "key")).collect();
    assert_eq!(keys.len(), 3);
    assert!(keys.iter().all(|k| *k == keys[0] && k.len() == 64));
}

#[test]
fn qccost_reproduces_table_rows() {
    let o = run(&["qccost", "--bits", "1024,2048"]);
    let out = stdout(&o);
    assert!(out.contains("Shor's algorithm on RSA, n = 2048 bit\t6·10³\t5.3·10¹⁴"));
    assert!(out.contains("n = 1024 bit\t3.02·10⁹\t3.04·10¹⁷"));
    assert!(out.contains("n = 2048 bit\t1.21·10¹⁰\t4.86·10¹⁸"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sign", "--doc", "a", "--held", "b"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--x", "0.5", "--n", "-3"]).status.code(), Some(2));
    assert_eq!(run(&["--digits", "10", "--agree", "50", "keyex"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sign", "--doc", "a"]).status.code(), Some(0));
}

#[test]
fn same_seed_gives_identical_output() {
    for args in [
        &["--seed", "4", "keyex"][..],
        &["--seed", "4", "elgamal", "--message", "987654321"],
        &["--seed", "4", "group", "--threshold", "2"],
        &["--seed", "4", "behalf"],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn config_file_sets_session_parameters() {
    let path = std::env::temp_dir().join(format!("chebkex-cli-cfg-{}", std::process::id()));
    std::fs::write(
        &path,
        "digits=120\nagree_digits=40\nmax_index_digits=30\nmin_security_bits=64\n",
    )
    .unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "keyex", "--index-digits", "30"]);
    let _ = std::fs::remove_file(&path);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(stdout(&o).lines().next().unwrap(), "digits_used"), "40");
}
