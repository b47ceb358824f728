//! Canonical text for documents and kernel values.

use std::fmt::Write;

use kp_core::ring::{Matrix, Ring, RingElem};

use crate::document::{AlgebraDecl, Document, HomDecl, KahlerDecl, MapDecl, MetricDecl};

/// Entry `(i, j)` as declared: on a product ring, entries between
/// generators of one component show only that component.
fn entry(m: &Matrix, i: usize, j: usize) -> String {
    let ring = m.ring();
    let v = m.get(i, j);
    if v.is_zero() {
        return "0".into();
    }
    match (ring.is_product(), ring.locate(i), ring.locate(j)) {
        (true, Some((ci, _)), Some((cj, _))) if ci == cj && m.rows() == ring.num_generators() => {
            v.part(ci).to_string_with(&ring.components()[ci])
        }
        _ => v.to_string(),
    }
}

/// Rows of a matrix with each column padded to its widest entry.
pub fn matrix_rows(m: &Matrix) -> Vec<String> {
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| entry(m, i, j)).collect())
        .collect();
    let widths: Vec<usize> = (0..m.cols())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    cells
        .iter()
        .map(|r| {
            let padded: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}", w = *w))
                .collect();
            format!("[{}]", padded.join(", "))
        })
        .collect()
}

pub fn matrix(m: &Matrix) -> String {
    matrix_rows(m).join("\n")
}

fn generators(ring: &Ring) -> String {
    ring.components()
        .iter()
        .map(|c| c.join(", "))
        .collect::<Vec<_>>()
        .join(" | ")
}

pub fn algebra(a: &AlgebraDecl) -> String {
    let mut s = format!(
        "algebra {} {{\n  generators: {};\n",
        a.name,
        generators(&a.ring)
    );
    let m = a.ring.num_generators();
    for i in 0..m {
        for j in i + 1..m {
            if !a.structure.get(i, j).is_zero() {
                let (l, r) = (
                    a.ring.generator_name(i).unwrap(),
                    a.ring.generator_name(j).unwrap(),
                );
                let _ = writeln!(s, "  bracket {{{l}, {r}}} = {};", entry(&a.structure, i, j));
            }
        }
    }
    if !a.localize.is_empty() {
        let names: Vec<&str> = a
            .localize
            .iter()
            .map(|&i| a.ring.generator_name(i).unwrap())
            .collect();
        let _ = writeln!(s, "  localize: {};", names.join(", "));
    }
    s.push_str("}\n");
    s
}

pub fn metric(g: &MetricDecl) -> String {
    let rows = matrix_rows(&g.matrix);
    format!(
        "metric {} on {} = [\n  {}\n];\n",
        g.name,
        g.algebra,
        rows.join(",\n  ")
    )
}

pub fn kahler(k: &KahlerDecl) -> String {
    match &k.eta {
        Some(e) => format!(
            "kahler {} = ({}, {}) eta = {};\n",
            k.name, k.algebra, k.metric, e
        ),
        None => format!("kahler {} = ({}, {});\n", k.name, k.algebra, k.metric),
    }
}

fn map_body(out: &mut String, m: &MapDecl, src: &Ring, indent: &str) {
    for (i, img) in m.images.iter().enumerate() {
        let _ = writeln!(out, "{indent}{} -> {img};", src.generator_name(i).unwrap());
    }
    if let Some(u) = &m.unit {
        let _ = writeln!(out, "{indent}1 -> {u};");
    }
}

pub fn hom(h: &HomDecl, doc: &Document) -> String {
    let src = doc.kp_ring(&h.source).expect("resolved hom");
    let tgt = doc.kp_ring(&h.target).expect("resolved hom");
    let mut s = format!("hom {} : {} -> {} {{\n", h.name, h.source, h.target);
    map_body(&mut s, &h.map, &src, "  ");
    if let Some(inv) = &h.inverse {
        s.push_str("  inverse {\n");
        map_body(&mut s, inv, &tgt, "    ");
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

/// Whole document, kind by kind, separated by blank lines.
pub fn document(doc: &Document) -> String {
    let mut blocks: Vec<String> = Vec::new();
    blocks.extend(doc.algebras.iter().map(algebra));
    blocks.extend(doc.metrics.iter().map(metric));
    blocks.extend(doc.kahlers.iter().map(kahler));
    blocks.extend(doc.homs.iter().map(|h| hom(h, doc)));
    blocks.join("\n")
}

pub fn elements(v: &[RingElem]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}
