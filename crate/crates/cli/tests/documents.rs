use std::sync::Arc;

use kp_cli::document::{AlgebraDecl, Document, HomDecl, KahlerDecl, MapDecl, MetricDecl};
use kp_cli::print;
use kp_cli::syntax::Span;
use kp_core::kp::KPAlgebra;
use kp_core::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn decls(name: &str, k: &KPAlgebra, with_eta: bool) -> (AlgebraDecl, MetricDecl, KahlerDecl) {
    let a = format!("A{name}");
    let g = format!("g{name}");
    (
        AlgebraDecl {
            name: a.clone(),
            ring: k.ring().clone(),
            structure: k.p().clone(),
            localize: vec![0],
            span: Span::default(),
        },
        MetricDecl {
            name: g.clone(),
            algebra: a.clone(),
            matrix: k.g().clone(),
            span: Span::default(),
        },
        KahlerDecl {
            name: name.into(),
            algebra: a,
            metric: g,
            eta: k.eta().cloned().filter(|_| with_eta),
            span: Span::default(),
        },
    )
}

fn random_document(seed: u64) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 1 + (seed % 3) as usize;
    let k = random::kp_algebra(&mut rng, "x", m, 2);
    let src = Arc::new(random::kp_algebra(&mut rng, "x", 2, 2));
    let h = random::triangular_iso(&mut rng, src.clone(), "y");
    let mut doc = Document::default();
    for (name, alg, eta) in [
        ("K", &k, seed % 2 == 0),
        ("S", &*src, true),
        ("T", &**h.target(), false),
    ] {
        let (a, g, kd) = decls(name, alg, eta);
        doc.algebras.push(a);
        doc.metrics.push(g);
        doc.kahlers.push(kd);
    }
    doc.homs.push(HomDecl {
        name: "phi".into(),
        source: "S".into(),
        target: "T".into(),
        map: MapDecl {
            images: h.images().to_vec(),
            unit: None,
        },
        inverse: Some(MapDecl {
            images: h.inverse().unwrap().images().to_vec(),
            unit: None,
        }),
        span: Span::default(),
    });
    doc
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let doc = random_document(seed);
        let text = print::document(&doc);
        let again = Document::parse(&text).map_err(|d| TestCaseError::fail(d.render(&text, "printed")))?;
        prop_assert_eq!(&doc, &again);
        prop_assert_eq!(print::document(&again), text);
    }

    #[test]
    fn parsing_never_panics(text in "[a-z{}(),;:=+*/^ 0-9\\[\\]\n-]{0,80}") {
        let _ = Document::parse(&text);
    }
}

#[test]
fn spans_point_at_the_offending_token() {
    let src = "algebra A {\n  generators: x, y;\n  bracket {x, y} = 1;\n  bracket {y, x} = 2;\n}\n";
    let d = Document::parse(src).unwrap_err();
    assert_eq!((d.span.line, d.span.col), (4, 3));
    assert_eq!(d.related[0].1.line, 3);
    let rendered = d.render(src, "f.kp");
    assert!(rendered.starts_with("f.kp:4:3: error:"), "{rendered}");
}
