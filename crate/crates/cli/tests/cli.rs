use std::path::PathBuf;
use std::process::{Command, Output};

use kp_cli::document::Document;
use kp_core::kp::verify_kp;
use serde_json::Value;

const TRIVIAL: &str = "
algebra A {
  generators: x, y;
  bracket {x, y} = 1;
}
metric g on A = [[1, 0], [0, 1]];
kahler K = (A, g);
kahler Two = (A, g) eta = 2;
";

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn kpw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpw"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = kpw(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (v, out.status.code().unwrap())
}

#[test]
fn solve_eta_on_the_trivial_example() {
    let f = write("trivial_solve.kp", TRIVIAL);
    let (v, code) = json(&["solve-eta", f.to_str().unwrap(), "--kp", "K"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["eta"], "1");
    assert_eq!(v["schema"], 1);
}

#[test]
fn wrong_eta_fails_with_residual() {
    let f = write("trivial_verify.kp", TRIVIAL);
    let (v, code) = json(&["verify", f.to_str().unwrap(), "--kp", "Two"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    // 2·PgPgP + P = -2P + P = -P, first nonzero at (1,2).
    assert_eq!(v["witness"]["indices"], serde_json::json!([1, 2]));
    assert_eq!(v["witness"]["residual"], "-1");

    let text =
        String::from_utf8(kpw(&["verify", f.to_str().unwrap(), "--kp", "Two"]).stdout).unwrap();
    assert!(text.contains("residual -1"), "{text}");
}

#[test]
fn fail_witness_reproduces_through_the_kernel() {
    let doc = Document::parse(TRIVIAL).unwrap();
    let k = doc.kp("Two", false).unwrap();
    let w = verify_kp(&k).unwrap().witness().cloned().unwrap();
    let (i, j) = (w.indices[0], w.indices[1]);
    let q = kp_core::kp::compose_q(k.structure(), k.metric()).unwrap();
    let recomputed = k.eta().unwrap() * q.get(i, j) + k.p().get(i, j);
    assert!(!recomputed.is_zero());
    assert_eq!(recomputed, w.residual);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let f = write(
        "bad_generator.kp",
        "algebra A {\n  generators: x, y;\n  bracket {x, w} = 1;\n}\n",
    );
    let (v, code) = json(&["verify", f.to_str().unwrap(), "--kp", "K"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["line"], 3);
    assert_eq!(v["error"]["column"], 15);
    let text = kpw(&["verify", f.to_str().unwrap(), "--kp", "K"]);
    let err = String::from_utf8(text.stderr).unwrap();
    assert!(err.contains(":3:15: error: unknown generator `w`"), "{err}");
    assert!(text.stdout.is_empty());
}

#[test]
fn unknown_names_and_files_are_input_errors() {
    let f = write("trivial_names.kp", TRIVIAL);
    assert_eq!(
        kpw(&["verify", f.to_str().unwrap(), "--kp", "Nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kpw(&["verify", "/nonexistent/file.kp", "--kp", "K"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kpw(&[
            "check-iso",
            corpus("redundant_generator.kp").to_str().unwrap(),
            "--hom",
            "phi"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn not_proportional_is_unsupported() {
    // Two planes whose blocks would need eta = 1 and eta = 1/2.
    let f = write(
        "no_eta.kp",
        "algebra R { generators: x, y, z, w; bracket {x, y} = 1; bracket {z, w} = 1; }
         metric g on R = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]];
         kahler K = (R, g);",
    );
    let (v, code) = json(&["solve-eta", f.to_str().unwrap(), "--kp", "K"]);
    assert_eq!(code, 3, "{v}");
    assert_eq!(v["status"], "unsupported");
    assert!(v["witness"].is_object());
}

#[test]
fn jacobi_failures_are_reported() {
    let f = write("not_poisson.kp", "algebra A { generators: x, y, z; bracket {x, y} = z; bracket {y, z} = x; bracket {z, x} = x; }");
    let (v, code) = json(&["check-poisson", f.to_str().unwrap(), "--algebra", "A"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    let (v, code) = json(&[
        "--assume-poisson",
        "check-poisson",
        f.to_str().unwrap(),
        "--algebra",
        "A",
    ]);
    assert_eq!(code, 0);
    assert!(v["notes"][0].as_str().unwrap().contains("assumed"));
}

#[test]
fn construction_outputs_reverify() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let cases = [
        ("dsum", corpus("direct_sum.kp"), "K", "S", "S"),
        ("tprod", corpus("tensor.kp"), "K", "L", "T"),
    ];
    for (cmd, file, left, right, name) in cases {
        let out = dir.join(format!("{cmd}_out.kp"));
        let o = kpw(&[
            cmd,
            file.to_str().unwrap(),
            "--left",
            left,
            "--right",
            right,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stdout)
        );
        let text = std::fs::read_to_string(&out).unwrap();
        let doc = Document::parse(&text).unwrap();
        assert!(verify_kp(&doc.kp(name, false).unwrap()).unwrap().is_pass());
        assert_eq!(
            kpw(&["verify", out.to_str().unwrap(), "--kp", name])
                .status
                .code(),
            Some(0)
        );
        assert_eq!(kp_cli::print::document(&doc), text);
    }
}

#[test]
fn missing_square_root_exits_three() {
    let (v, code) = json(&[
        "tprod",
        corpus("tensor.kp").to_str().unwrap(),
        "--left",
        "K",
        "--right",
        "N",
    ]);
    assert_eq!(code, 3);
    assert!(v["notes"][0].as_str().unwrap().contains("no square root"));
}

#[test]
fn reports_are_deterministic() {
    let f = corpus("change_of_generators.kp");
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    for args in [["check-iso", "--hom", "phi"], ["image-sub", "--hom", "phi"]] {
        let a = [args[0], f.to_str().unwrap(), args[1], args[2]];
        assert_eq!(strip(json(&a).0), strip(json(&a).0));
    }
}

#[test]
fn explicit_preimages_match_the_inverse() {
    let f = corpus("change_of_generators.kp");
    let base = ["image-sub", f.to_str().unwrap(), "--hom", "phi"];
    let (a, _) = json(&base);
    let mut explicit = base.to_vec();
    explicit.extend(["--preimage", "y1=x+y", "--preimage", "y2=x-y"]);
    let (b, code) = json(&explicit);
    assert_eq!(code, 0);
    assert_eq!(a["values"], b["values"]);
    let mut wrong = base.to_vec();
    wrong.extend(["--preimage", "y1=x", "--preimage", "y2=y"]);
    assert_eq!(json(&wrong).1, 2);
}

#[test]
fn tensors_check_an_element() {
    let f = corpus("two_generators.kp");
    let (v, code) = json(&[
        "tensors",
        f.to_str().unwrap(),
        "--kp",
        "K",
        "--element",
        "x^2*y - 3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v["values"]["D^i_j"],
        serde_json::json!([["1", "0"], ["0", "1"]])
    );
    assert!(v["values"]["P(a)"].is_array());
}

#[test]
fn corpus_passes() {
    let out = kpw(&["corpus"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("corpus: pass"));
    assert!(!text.contains("MISMATCH"));
}
