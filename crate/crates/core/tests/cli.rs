use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grover-perceptron"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_goes_to_stdout_with_success() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--dump-circuit"));
}

#[test]
fn text_report_lists_solutions() {
    let o = run(&["--ac", "5", "--inputs", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("plan: n = 4, l = 2, iterations = 2"),
        "{text}"
    );
    assert!(text.contains("solutions (2):"));
    assert!(!text.contains("no solutions detected"));
}

#[test]
fn csv_has_one_row_per_outcome() {
    let o = run(&["--ac", "3", "--mode", "joint", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("I,w1,w2,value,probability,verified"));
    assert_eq!(lines.count(), 64);
}

#[test]
fn sampling_is_seeded() {
    let args = [
        "--ac", "5", "--inputs", "1,1", "--shots", "500", "--seed", "9",
    ];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    assert!(a.contains("counts"), "{a}");
    let other = stdout(&run(&[
        "--ac", "5", "--inputs", "1,1", "--shots", "500", "--seed", "10",
    ]));
    assert_ne!(a, other);
}

#[test]
fn usage_errors_leave_stdout_empty() {
    for args in [
        &["--inputs", "1,1"][..],
        &["--ac", "9", "--inputs", "1,1"],
        &["--ac", "3", "--inputs", "1,1,0"],
        &[
            "--ac", "3", "--mode", "tune", "--inputs", "1,1", "--max-k", "0",
        ],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn dump_parses_back() {
    let o = run(&["--ac", "3", "--inputs", "1,0", "--dump-circuit"]);
    let text = stdout(&o);
    assert!(text.starts_with("# layout: I=[0,1] w1=[2,3] w2=[4,5] sum=[6,7,8] carry=[9,10]"));
    let seq = grover_perceptron::qarith::GateSequence::parse(&text).unwrap();
    assert_eq!(seq.to_string(), text);
}
