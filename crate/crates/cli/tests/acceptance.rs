//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use kp_cli::corpus;
use kp_cli::document::Document;
use kp_core::constructions::{
    check_subalgebra, check_subalgebra_along, direct_sum, embed_factor, tensor_product, Side,
    SumSpec, TensorSpec,
};
use kp_core::kp::{compose_q, kp_tensors, solve_eta, verify_kp, EtaSolution, KPAlgebra};
use kp_core::morphism::{
    check_iso, check_kp_morphism, compose, eta_transport_check, jacobian, pullback_metric, Hom,
};
use kp_core::poisson::PoissonStructure;
use kp_core::random;
use kp_core::ring::{Matrix, Ring, RingElem, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(n.into(), d.into())
}

fn corpus_doc(name: &str) -> Document {
    Document::parse(corpus::source(name).expect("corpus file")).expect("corpus parses")
}

/// Random `{x,y} = p` with `deg p ≤ 2` and a random symmetric scalar metric;
/// η must be `1/(p² (ab − c²))` with the determinant taken by hand.
fn c1_two_generator_eta() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ring = Ring::new(["x", "y"]);
    let mut slowest = Duration::ZERO;
    for n in 0..10 {
        let p = random::nonzero_poly(&mut rng, &ring, 2, 4);
        let (a, b, c) = loop {
            let s = |r: &mut ChaCha8Rng| q(r.gen_range(-5..=5), r.gen_range(1..=3));
            let (a, b, c) = (s(&mut rng), s(&mut rng), s(&mut rng));
            if &a * &b != &c * &c {
                break (a, b, c);
            }
        };
        let det = &a * &b - &c * &c;
        let g = Matrix::from_rows(
            &ring,
            vec![
                vec![ring.constant(a), ring.constant(c.clone())],
                vec![ring.constant(c), ring.constant(b)],
            ],
        )
        .unwrap();
        let s = PoissonStructure::from_brackets(&ring, &[(0, 1, p.clone())]).unwrap();
        let metric = kp_core::kp::Metric::new(g).unwrap();
        let start = Instant::now();
        let sol = solve_eta(&s, &metric).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        let expected = (&p * &p).scale(&det).recip().unwrap();
        match sol {
            EtaSolution::Solved(e) => ensure(e == expected, || {
                format!("instance {n}: eta {e}, expected {expected}")
            })?,
            other => return Err(format!("instance {n}: {other:?}")),
        }
        ensure(took < Duration::from_secs(1), || {
            format!("instance {n} took {took:?}")
        })?;
    }
    Ok(format!("10 instances exact, slowest {slowest:?}"))
}

/// Change of generators with g = [[2,1],[1,3]].
fn c2_change_of_generators() -> Outcome {
    let doc = corpus_doc("change_of_generators.kp");
    let h = doc.hom_value("phi", false).map_err(|e| e.to_string())?;
    let (g11, g12, g22) = (q(2, 1), q(1, 1), q(3, 1));
    let r = h.target().ring().clone();
    let four = q(4, 1);
    let expected = Matrix::from_rows(
        &r,
        vec![
            vec![
                r.constant((&g11 + &g12 + &g12 + &g22) / &four),
                r.constant((&g11 - &g22) / &four),
            ],
            vec![
                r.constant((&g11 - &g22) / &four),
                r.constant((&g11 - &g12 - &g12 + &g22) / &four),
            ],
        ],
    )
    .unwrap();
    let pulled = pullback_metric(&h).map_err(|e| e.to_string())?;
    ensure(pulled == expected, || {
        format!("h = {:?}", pulled.to_strings())
    })?;
    ensure(
        pulled.to_strings() == vec![vec!["7/4", "-1/4"], vec!["-1/4", "3/4"]],
        || "h differs from [[7/4,-1/4],[-1/4,3/4]]".into(),
    )?;
    ensure(check_iso(&h).map_err(|e| e.to_string())?.is_pass(), || {
        "check_iso fails".into()
    })?;
    let det_g = &g11 * &g22 - &g12 * &g12;
    let det_h = pulled.det().unwrap();
    ensure(det_h == r.constant(&det_g / &four), || {
        format!("det h = {det_h}")
    })?;
    ensure(
        eta_transport_check(&h)
            .map_err(|e| e.to_string())?
            .is_pass(),
        || "eta transport fails".into(),
    )?;
    let phi_eta = h.apply(h.source().eta().unwrap()).unwrap();
    ensure(&phi_eta == h.target().eta().unwrap(), || {
        "phi(eta) != eta'".into()
    })?;
    Ok(format!(
        "h = [[7/4,-1/4],[-1/4,3/4]], det h = {det_h}, phi(eta) = eta'"
    ))
}

/// Three generators for a two-generator algebra, with the singular h.
fn c3_redundant_generator() -> Outcome {
    let doc = corpus_doc("redundant_generator.kp");
    let kr = doc.kp("Kr", false).map_err(|e| e.to_string())?;
    let r = kr.ring().clone();
    let (u, v) = (r.generator(0).unwrap(), r.generator(1).unwrap());
    let p = &(&u * &u) + &v;
    let det_g = q(2 * 3 - 1, 1);
    let h = kr.g();
    let g = [[q(2, 1), q(1, 1)], [q(1, 1), q(3, 1)]];
    let pattern = [
        [
            &g[0][0] / &q(4, 1),
            &g[0][1] / &q(2, 1),
            &g[0][0] / &q(4, 1),
        ],
        [&g[0][1] / &q(2, 1), g[1][1].clone(), &g[0][1] / &q(2, 1)],
        [
            &g[0][0] / &q(4, 1),
            &g[0][1] / &q(2, 1),
            &g[0][0] / &q(4, 1),
        ],
    ];
    for i in 0..3 {
        for j in 0..3 {
            ensure(*h.get(i, j) == r.constant(pattern[i][j].clone()), || {
                format!("h[{i}][{j}] = {}", h.get(i, j))
            })?;
        }
    }
    let qm = compose_q(kr.structure(), kr.metric()).map_err(|e| e.to_string())?;
    let want = kr.p().scale(&-(&p * &p).scale(&det_g));
    ensure(qm == want, || "P'hP'hP' != -p^2 det(g) P'".into())?;
    let sol = solve_eta(kr.structure(), kr.metric()).map_err(|e| e.to_string())?;
    let eta_prime = match sol {
        EtaSolution::Solved(e) => e,
        other => return Err(format!("{other:?}")),
    };
    let hom = doc.hom_value("phi", false).map_err(|e| e.to_string())?;
    let eta = hom.source().eta().unwrap().clone();
    ensure(hom.apply(&eta).unwrap() == eta_prime, || {
        "eta' != eta".into()
    })?;
    Ok(format!("P'hP'hP' = -p^2 det(g) P', eta' = {eta_prime}"))
}

fn c4_direct_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    for n in 0..20 {
        let m1 = rng.gen_range(1..=3);
        let m2 = rng.gen_range(1..=3);
        let l = Arc::new(random::kp_algebra(&mut rng, "x", m1, 2));
        let r = Arc::new(random::kp_algebra(&mut rng, "x", m2, 2));
        let sum = direct_sum(&SumSpec::new(l, r).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(verify_kp(&sum.algebra).unwrap().is_pass(), || {
            format!("pair {n}: sum fails")
        })?;
        for side in [Side::Left, Side::Right] {
            let emb = embed_factor(&sum, side).map_err(|e| e.to_string())?;
            ensure(check_kp_morphism(&emb).unwrap().is_pass(), || {
                format!("pair {n}: {} embedding", side.name())
            })?;
            let sub =
                check_subalgebra_along(sum.factor(side), &sum.algebra, sum.embedding_map(side))
                    .map_err(|e| e.to_string())?;
            ensure(sub.is_pass(), || {
                format!("pair {n}: {} subalgebra", side.name())
            })?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("20 of 20 pairs in {took:?}"))
}

fn c5_tensor_products() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..20 {
        let ml = rng.gen_range(1..=2);
        let l = Arc::new(random::square_eta_algebra(&mut rng, "x", ml, 2));
        let mr = rng.gen_range(1..=2);
        let r = Arc::new(random::square_eta_algebra(&mut rng, "x", mr, 2));
        let spec = TensorSpec::new(l, r).map_err(|e| format!("pair {n}: {e}"))?;
        let t = tensor_product(&spec).map_err(|e| e.to_string())?;
        ensure(verify_kp(&t).unwrap().is_pass(), || {
            format!("pair {n}: product fails")
        })?;
    }
    let file = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_eta_x.kp");
    std::fs::write(
        &file,
        "algebra A { generators: x, y; bracket {x, y} = 1; localize: x; }
         metric g on A = [[1/x, 0], [0, 1]];
         kahler N = (A, g);
         algebra B { generators: s, t; bracket {s, t} = 1; }
         metric h on B = [[1, 0], [0, 1]];
         kahler K = (B, h);",
    )
    .unwrap();
    let doc = Document::parse(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let eta = doc
        .kp_with_eta("N", false)
        .unwrap()
        .eta()
        .unwrap()
        .to_string();
    ensure(eta == "x", || format!("eta = {eta}"))?;
    let out = Command::new(env!("CARGO_BIN_EXE_kpw"))
        .args([
            "tprod",
            file.to_str().unwrap(),
            "--left",
            "N",
            "--right",
            "K",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    ensure(out.status.code() == Some(3), || {
        format!("exit {:?}", out.status.code())
    })?;
    ensure(text.contains("no square root"), || text.clone())?;
    Ok("20 of 20 products verify; eta = x exits 3 with \"no square root\"".into())
}

fn laws_hold(s: &PoissonStructure, a: &RingElem, b: &RingElem, c: &RingElem) -> bool {
    let br = |u: &RingElem, v: &RingElem| s.bracket(u, v).unwrap();
    let anti = br(a, b) == -br(b, a);
    let leibniz = br(a, &(b * c)) == &(b * &br(a, c)) + &(&br(a, b) * c);
    let jacobi = (&(&br(a, &br(b, c)) + &br(b, &br(c, a))) + &br(c, &br(a, b))).is_zero();
    anti && leibniz && jacobi
}

fn c6_property_suites() -> Outcome {
    const CASES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 0..CASES {
        let m = rng.gen_range(2..=3);
        let ring = Ring::new(["x", "y", "z"].into_iter().take(m));
        let s = random::structure(&mut rng, &ring, 2);
        let (a, b, c) = (
            random::element(&mut rng, &ring, 2),
            random::element(&mut rng, &ring, 2),
            random::element(&mut rng, &ring, 1),
        );
        ensure(laws_hold(&s, &a, &b, &c), || {
            format!("bracket laws, case {n}")
        })?;
    }
    for n in 0..CASES {
        let m = rng.gen_range(1..=3);
        let k = random::kp_algebra(&mut rng, "x", m, 2);
        let a = random::element(&mut rng, k.ring(), 2);
        let t = kp_tensors(&k).unwrap();
        let pa = k.p_vector(&a).unwrap();
        let da = k.d_vector(&a).unwrap();
        let col = |v: Vec<RingElem>| Matrix::from_fn(k.ring(), m, 1, |i, _| v[i].clone());
        let want = col(pa.clone());
        ensure(
            t.d_upper.mul(&col(k.lower(&pa).unwrap())).unwrap() == want,
            || format!("D P(a), case {n}"),
        )?;
        ensure(
            k.p().mul(&col(k.lower(&da).unwrap())).unwrap() == want,
            || format!("P D(a), case {n}"),
        )?;
        ensure(t.d_mixed.mul(&t.d_upper).unwrap() == t.d_upper, || {
            format!("projector, case {n}")
        })?;
    }
    for n in 0..CASES {
        let k = Arc::new(random::kp_algebra(&mut rng, "x", 2, 2));
        let h1 = random::triangular_iso(&mut rng, k, "y");
        let h2 = random::triangular_iso(&mut rng, h1.target().clone(), "z");
        let c: Hom = compose(&h2, &h1).unwrap();
        ensure(check_kp_morphism(&c).unwrap().is_pass(), || {
            format!("composite, case {n}")
        })?;
        let chained = jacobian(&h1)
            .unwrap()
            .map(h2.map())
            .unwrap()
            .mul(&jacobian(&h2).unwrap())
            .unwrap();
        ensure(jacobian(&c).unwrap() == chained, || {
            format!("chain rule, case {n}")
        })?;
    }
    Ok(format!(
        "{CASES} cases each: bracket laws, D/P identities, projector, composites, chain rule"
    ))
}

fn upper_block_matches(sub: &KPAlgebra, sup: &KPAlgebra) -> bool {
    (0..2).all(|i| (0..2).all(|j| sub.g().get(i, j).to_string() == sup.g().get(i, j).to_string()))
}

fn c7_subalgebra_examples() -> Outcome {
    let mut notes = Vec::new();
    for file in ["subalgebra_three.kp", "subalgebra_four.kp"] {
        let doc = corpus_doc(file);
        let k = doc.kp_with_eta("K", false).map_err(|e| e.to_string())?;
        let kb = doc.kp_with_eta("Kb", false).map_err(|e| e.to_string())?;
        let bad = doc.kp_with_eta("Kbad", false).map_err(|e| e.to_string())?;
        ensure(verify_kp(&kb).unwrap().is_pass(), || {
            format!("{file}: ambient fails")
        })?;
        ensure(upper_block_matches(&k, &kb), || {
            format!("{file}: g is not the upper block")
        })?;
        let v = check_subalgebra(&k, &kb, &[0, 1]).map_err(|e| e.to_string())?;
        ensure(v.is_pass(), || format!("{file}: subalgebra check fails"))?;
        match check_subalgebra(&bad, &kb, &[0, 1]).map_err(|e| e.to_string())? {
            kp_core::verdict::Verdict::Fail(w) => {
                ensure(!w.residual.is_zero(), || format!("{file}: empty witness"))?;
                notes.push(format!(
                    "{file}: perturbed block fails at {:?} with {}",
                    w.one_based(),
                    w.residual
                ));
            }
            _ => return Err(format!("{file}: perturbed block passes")),
        }
    }
    Ok(notes.join("; "))
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("timing");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn c8_determinism() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_kpw"))
            .args(["corpus", "--json"])
            .output()
            .unwrap();
        (out.status.code(), String::from_utf8(out.stdout).unwrap())
    };
    let (c1, a) = run();
    let (c2, b) = run();
    ensure(c1 == Some(0) && c2 == Some(0), || {
        format!("exit codes {c1:?} {c2:?}")
    })?;
    let mut va: serde_json::Value = serde_json::from_str(&a).map_err(|e| e.to_string())?;
    let mut vb: serde_json::Value = serde_json::from_str(&b).map_err(|e| e.to_string())?;
    strip_timing(&mut va);
    strip_timing(&mut vb);
    let (sa, sb) = (
        serde_json::to_string(&va).unwrap(),
        serde_json::to_string(&vb).unwrap(),
    );
    ensure(sa == sb, || "reports differ".into())?;
    let timing_free = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("\"micros\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    ensure(timing_free(&a) == timing_free(&b), || {
        "raw output differs outside timing".into()
    })?;
    Ok(format!("{} bytes, identical apart from timing", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("C1 two-generator eta formula", c1_two_generator_eta),
        (
            "C2 change-of-generators isomorphism",
            c2_change_of_generators,
        ),
        ("C3 redundant-generator example", c3_redundant_generator),
        ("C4 direct-sum closure", c4_direct_sums),
        ("C5 tensor closure", c5_tensor_products),
        ("C6 property suites", c6_property_suites),
        ("C7 subalgebra examples", c7_subalgebra_examples),
        ("C8 corpus determinism", c8_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
