use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mampcg"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn temp_graph(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("mampcg-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sep_verdicts_and_exit_codes() {
    let (code, out, _) = run(&[
        "sep",
        "EX5",
        "--x",
        "C",
        "--y",
        "F",
        "--z",
        "A,D",
        "--criterion",
        "mamp",
    ]);
    assert_eq!((code, out.as_str()), (0, "separated\n"));
    let (code, out, _) = run(&[
        "sep",
        "EX5",
        "--x",
        "C",
        "--y",
        "D",
        "--z",
        "A,B",
        "--criterion",
        "mamp",
    ]);
    assert_eq!((code, out.as_str()), (1, "not separated\n"));
    let (code, out, _) = run(&["sep", "EX5", "--x", "D", "--y", "J", "--z", ""]);
    assert_eq!((code, out.as_str()), (0, "separated\n"));
}

#[test]
fn json_verdict_matches_exit_code() {
    let (code, out, _) = run(&["--format", "json", "sep", "EX5", "--x", "C", "--y", "D"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(code, 1);
    assert_eq!(v["separated"], false);
}

#[test]
fn validate_reports_motiv_violations() {
    let (code, out, _) = run(&["validate", "MOTIV"]);
    assert_eq!(code, 3);
    assert!(out.lines().any(|l| l.starts_with("C2 ")));
    assert!(out.lines().any(|l| l.starts_with("C3 ")));
    let (code, out, _) = run(&["validate", "FIG2_G"]);
    assert_eq!((code, out.as_str()), (0, "valid MAMP\n"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&["sep", "EX5", "--x", "C"]).0, 2);
    assert_eq!(run(&["sep", "EX5", "--x", "C", "--y", "Q"]).0, 2);
    assert_eq!(run(&["triplex", "no-such-graph"]).0, 2);
    let bad = temp_graph("dup.graph", "edge A -> B\nedge A -- B\n");
    let (code, _, err) = run(&["validate", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn family_mismatch_exits_three() {
    assert_eq!(
        run(&["sep", "EX4", "--x", "A", "--y", "C", "--criterion", "amp"]).0,
        3
    );
    assert_eq!(run(&["triplex", "MOTIV"]).0, 3);
}

#[test]
fn triplexes_of_ex4() {
    let (code, out, _) = run(&["triplex", "EX4"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "({A,C},B)\n({A,D},B)\n({B,E},C)\n({B,E},D)\n({C,D},E)\n"
    );
}

#[test]
fn equivalence_verdicts() {
    let other = temp_graph(
        "ex4b.graph",
        "edge A -> B\nedge B -- C\nedge B -- D\nedge E -> C\nedge E -> D\n",
    );
    assert_eq!(run(&["equiv", "EX4", &other]).0, 1);
    assert_eq!(run(&["equiv", "EX4", &other, "--oracle"]).0, 1);
    assert_eq!(run(&["equiv", "EX4", "EX4", "--oracle"]).1, "equivalent\n");
}

#[test]
fn marginalize_fig2_drops_a_b_f() {
    let (code, out, _) = run(&[
        "--format",
        "json",
        "marginalize",
        "FIG2_G",
        "--nodes",
        "A,B,F",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mut edges: Vec<String> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_str().unwrap().to_string())
        .collect();
    edges.sort();
    let mut expected = vec![
        "eps_A->C",
        "eps_A->D",
        "eps_B->D",
        "eps_C->C",
        "eps_D->D",
        "eps_E->E",
        "eps_C--eps_D",
        "eps_C--eps_E",
        "eps_D<->eps_F",
        "eps_E<->eps_F",
    ];
    expected.sort();
    assert_eq!(edges, expected);
}

#[test]
fn transform_output_parses_back() {
    let (code, out, _) = run(&["transform", "FIG1_G", "--kind", "selection"]);
    assert_eq!(code, 0);
    assert!(out.contains("node sel_eps_C_eps_D selection"));
    assert!(out.contains("det eps_D <- "));
    let path = temp_graph("fig1sel.graph", &out);
    let (code, again, _) = run(&["transform", &path, "--kind", "latent"]);
    // selection graphs are DAGs without bidirected edges, so the latent lift is a copy
    assert_eq!(code, 0, "{again}");
}

#[test]
fn determinism_from_transform() {
    let lifted = |rest: &[&str]| {
        let mut args = vec![
            "sep",
            "FIG1_G",
            "--det-from-transform",
            "eamp",
            "--criterion",
            "amp",
        ];
        args.extend_from_slice(rest);
        run(&args)
    };
    // eps_C is a function of A and C in the lifted graph, so it cannot be queried given them
    let (code, _, err) = lifted(&["--x", "eps_C", "--y", "B", "--z", "A,C"]);
    assert_eq!(code, 2);
    assert!(err.contains("determined"), "{err}");
    assert_eq!(lifted(&["--x", "eps_A", "--y", "eps_B"]).1, "separated\n");
    assert_eq!(
        lifted(&["--x", "eps_C", "--y", "eps_D"]).1,
        "not separated\n"
    );
}

#[test]
fn graphoid_commands() {
    let (code, out, _) = run(&["closure", "EX4"]);
    assert_eq!(code, 0);
    assert!(out.contains("separation model: equal"));
    let (code, out, _) = run(&["audit", "EX4", "--rules", "all"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("0 violations"));
    let (code, out, _) = run(&["--format", "json", "base", "EX5"]);
    assert_eq!(code, 0);
    assert!(out.contains(r#""universe":["A","B","C","D","E","F","I","J","K"]"#));
}

#[test]
fn class_and_maximal_sets() {
    let g = temp_graph("ab.graph", "edge A -> B\n");
    let (code, out, _) = run(&["--format", "json", "maximal", &g]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["directed_pairs"], serde_json::json!([["A", "B"]]));
    assert_eq!(v["mdcgs"].as_array().unwrap().len(), 2);
    let (code, out, _) = run(&["class", &g, "--emit-members"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("4 members\n"), "{out}");
}

#[test]
fn gaussian_report_is_byte_stable() {
    let first = run(&["gaussian", "FIG2_G", "--seed", "7", "--report", "json"]);
    let second = run(&["gaussian", "FIG2_G", "--seed", "7", "--report", "json"]);
    assert_eq!(first, second);
    assert_eq!(first.0, 0);
    let v: serde_json::Value = serde_json::from_str(&first.1).unwrap();
    assert!(v["markov_failures"].as_array().unwrap().is_empty());
    let rec = &v["records"][0];
    for key in ["x", "y", "z", "separated", "rho", "seed"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
}

#[test]
fn dot_export() {
    let (code, out, _) = run(&["dot", "FIG2_G"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph \"FIG2_G\" {"));
    assert!(out.contains("\"C\" -> \"D\" [dir=none];"));
    assert!(out.contains("\"D\" -> \"F\" [dir=both];"));
    assert!(out.trim_end().ends_with('}'));
}
