//! Resolved declarations: the parsed file with every expression evaluated in
//! its ring and every reference checked.

use std::collections::HashMap;
use std::sync::Arc;

use kp_core::kp::{KPAlgebra, Metric};
use kp_core::morphism::Hom;
use kp_core::poisson::{PoissonError, PoissonStructure};
use kp_core::ring::{Matrix, Ring, RingElem, RingError, RingMap, Scalar};

use crate::syntax::{self, Decl, Diagnostic, Expr, ExprKind, Ident, MapEntry, MapKey, Span};

#[derive(Clone, Debug)]
pub struct AlgebraDecl {
    pub name: String,
    pub ring: Arc<Ring>,
    /// Antisymmetric structure matrix; undeclared pairs are zero.
    pub structure: Matrix,
    /// Generator indices whose inverses are allowed in the algebra.
    pub localize: Vec<usize>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct MetricDecl {
    pub name: String,
    pub algebra: String,
    pub matrix: Matrix,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct KahlerDecl {
    pub name: String,
    pub algebra: String,
    pub metric: String,
    pub eta: Option<RingElem>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct MapDecl {
    pub images: Vec<RingElem>,
    /// Image of the unit; `None` for the unit of the target.
    pub unit: Option<RingElem>,
}

#[derive(Clone, Debug)]
pub struct HomDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub map: MapDecl,
    pub inverse: Option<MapDecl>,
    pub span: Span,
}

/// Declarations in source order within each kind.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub algebras: Vec<AlgebraDecl>,
    pub metrics: Vec<MetricDecl>,
    pub kahlers: Vec<KahlerDecl>,
    pub homs: Vec<HomDecl>,
}

impl PartialEq for AlgebraDecl {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.ring == o.ring
            && self.structure == o.structure
            && self.localize == o.localize
    }
}

impl PartialEq for MetricDecl {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.algebra == o.algebra && self.matrix == o.matrix
    }
}

impl PartialEq for KahlerDecl {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.algebra == o.algebra
            && self.metric == o.metric
            && self.eta == o.eta
    }
}

impl PartialEq for MapDecl {
    fn eq(&self, o: &Self) -> bool {
        self.images == o.images && self.unit == o.unit
    }
}

impl PartialEq for HomDecl {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.source == o.source
            && self.target == o.target
            && self.map == o.map
            && self.inverse == o.inverse
    }
}

impl PartialEq for Document {
    fn eq(&self, o: &Self) -> bool {
        self.algebras == o.algebras
            && self.metrics == o.metrics
            && self.kahlers == o.kahlers
            && self.homs == o.homs
    }
}

/// Failure to turn a declaration into a kernel object.
#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("no {kind} named `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Kp(#[from] kp_core::kp::KpError),
    #[error(transparent)]
    Morphism(#[from] kp_core::morphism::MorphismError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

impl Document {
    pub fn parse(src: &str) -> Result<Document, Diagnostic> {
        resolve(syntax::parse(src)?)
    }

    pub fn algebra(&self, name: &str) -> Result<&AlgebraDecl, BuildError> {
        self.algebras
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| unknown("algebra", name))
    }

    pub fn metric(&self, name: &str) -> Result<&MetricDecl, BuildError> {
        self.metrics
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| unknown("metric", name))
    }

    pub fn kahler(&self, name: &str) -> Result<&KahlerDecl, BuildError> {
        self.kahlers
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| unknown("kahler", name))
    }

    pub fn hom(&self, name: &str) -> Result<&HomDecl, BuildError> {
        self.homs
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| unknown("hom", name))
    }

    /// The bracket of an algebra; Jacobi is checked unless `assume_poisson`.
    pub fn structure(
        &self,
        algebra: &str,
        assume_poisson: bool,
    ) -> Result<PoissonStructure, BuildError> {
        let a = self.algebra(algebra)?;
        Ok(if assume_poisson {
            PoissonStructure::assume_poisson(a.structure.clone())?
        } else {
            PoissonStructure::new(a.structure.clone())?
        })
    }

    /// The declared triple with its declared η, unverified.
    pub fn kp(&self, name: &str, assume_poisson: bool) -> Result<KPAlgebra, BuildError> {
        let k = self.kahler(name)?;
        let s = self.structure(&k.algebra, assume_poisson)?;
        let g = Metric::new(self.metric(&k.metric)?.matrix.clone())?;
        Ok(KPAlgebra::raw(s, g, k.eta.clone())?)
    }

    /// The declared triple, with η solved when none is declared.
    pub fn kp_with_eta(&self, name: &str, assume_poisson: bool) -> Result<KPAlgebra, BuildError> {
        let k = self.kp(name, assume_poisson)?;
        if k.eta().is_some() {
            return Ok(k);
        }
        let sol = kp_core::kp::solve_eta(k.structure(), k.metric())?;
        match sol.eta() {
            Some(e) => {
                let e = e.clone();
                Ok(k.with_eta(Some(e))?)
            }
            None => Ok(k),
        }
    }

    pub fn hom_value(&self, name: &str, assume_poisson: bool) -> Result<Hom, BuildError> {
        let h = self.hom(name)?;
        let src = Arc::new(self.kp_with_eta(&h.source, assume_poisson)?);
        let tgt = Arc::new(self.kp_with_eta(&h.target, assume_poisson)?);
        let map = ring_map(src.ring(), tgt.ring(), &h.map)?;
        let mut hom = Hom::from_map(src.clone(), tgt.clone(), map)?;
        if let Some(inv) = &h.inverse {
            hom = hom.with_inverse_map(ring_map(tgt.ring(), src.ring(), inv)?)?;
        }
        Ok(hom)
    }

    /// Ring of a kahler declaration.
    pub fn kp_ring(&self, name: &str) -> Result<Arc<Ring>, BuildError> {
        Ok(self.algebra(&self.kahler(name)?.algebra)?.ring.clone())
    }
}

fn unknown(kind: &'static str, name: &str) -> BuildError {
    BuildError::Unknown {
        kind,
        name: name.to_string(),
    }
}

pub fn ring_map(src: &Arc<Ring>, tgt: &Arc<Ring>, m: &MapDecl) -> Result<RingMap, RingError> {
    match &m.unit {
        None => RingMap::new(src, tgt, m.images.clone()),
        Some(u) => RingMap::with_units(src, tgt, m.images.clone(), vec![u.clone()]),
    }
}

/// Evaluates an expression over `ring`.
pub fn eval(e: &Expr, ring: &Arc<Ring>) -> Result<RingElem, Diagnostic> {
    let arith = |r: Result<RingElem, RingError>, span: Span| {
        r.map_err(|err| match err {
            RingError::DivisionByZero => Diagnostic::new("division by zero", span),
            other => Diagnostic::new(other.to_string(), span),
        })
    };
    Ok(match &e.kind {
        ExprKind::Int(n) => ring.constant(Scalar::from_integer(n.clone())),
        ExprKind::Var(name) => match ring.index_of(name) {
            Some(i) => ring.generator(i).expect("index from the ring"),
            None => {
                return Err(Diagnostic::new(
                    format!(
                        "unknown generator `{name}` (generators: {})",
                        ring.generator_names().collect::<Vec<_>>().join(", ")
                    ),
                    e.span,
                ))
            }
        },
        ExprKind::Neg(a) => -eval(a, ring)?,
        ExprKind::Add(a, b) => arith(eval(a, ring)?.try_add(&eval(b, ring)?), e.span)?,
        ExprKind::Sub(a, b) => arith(eval(a, ring)?.try_sub(&eval(b, ring)?), e.span)?,
        ExprKind::Mul(a, b) => arith(eval(a, ring)?.try_mul(&eval(b, ring)?), e.span)?,
        ExprKind::Div(a, b) => arith(eval(a, ring)?.try_div(&eval(b, ring)?), e.span)?,
        ExprKind::Pow(a, k) => arith(eval(a, ring)?.pow(*k), e.span)?,
        ExprKind::Tuple(items) => {
            if items.len() != ring.num_components() {
                return Err(Diagnostic::new(
                    format!(
                        "tuple has {} entries, the ring has {} components",
                        items.len(),
                        ring.num_components()
                    ),
                    e.span,
                ));
            }
            let mut parts = Vec::with_capacity(items.len());
            for (c, it) in items.iter().enumerate() {
                let local = Ring::new(ring.components()[c].clone());
                parts.push(eval(it, &local)?.part(0).clone());
            }
            ring.element(parts)
                .map_err(|err| Diagnostic::new(err.to_string(), e.span))?
        }
    })
}

/// Entry between two generators of component `c`: a tuple is read over the
/// whole ring and cut down to `c`, anything else over `c` alone.
pub fn eval_in_component(e: &Expr, ring: &Arc<Ring>, c: usize) -> Result<RingElem, Diagnostic> {
    if !ring.is_product() {
        return eval(e, ring);
    }
    if let ExprKind::Tuple(_) = e.kind {
        return Ok(eval(e, ring)? * ring.component_unit(c));
    }
    let local = Ring::new(ring.components()[c].clone());
    Ok(ring.lift(c, eval(e, &local)?.part(0).clone()))
}

struct Names<'a> {
    kind: &'static str,
    seen: HashMap<&'a str, Span>,
}

impl<'a> Names<'a> {
    fn new(kind: &'static str) -> Self {
        Names {
            kind,
            seen: HashMap::new(),
        }
    }

    fn declare(&mut self, id: &'a Ident) -> Result<(), Diagnostic> {
        if let Some(prev) = self.seen.insert(&id.name, id.span) {
            return Err(Diagnostic::new(
                format!("{} `{}` is declared twice", self.kind, id.name),
                id.span,
            )
            .with_related("first declared here", prev));
        }
        Ok(())
    }
}

fn lookup<'a, T>(
    items: &'a [T],
    name: &Ident,
    kind: &str,
    key: impl Fn(&T) -> &str,
) -> Result<&'a T, Diagnostic> {
    items
        .iter()
        .find(|t| key(t) == name.name)
        .ok_or_else(|| Diagnostic::new(format!("unknown {kind} `{}`", name.name), name.span))
}

/// Resolves declarations kind by kind, so references may point forward.
pub fn resolve(decls: Vec<Decl>) -> Result<Document, Diagnostic> {
    let mut doc = Document::default();
    let mut names = [
        Names::new("algebra"),
        Names::new("metric"),
        Names::new("kahler"),
        Names::new("hom"),
    ];
    for d in &decls {
        match d {
            Decl::Algebra { name, .. } => names[0].declare(name)?,
            Decl::Metric { name, .. } => names[1].declare(name)?,
            Decl::Kahler { name, .. } => names[2].declare(name)?,
            Decl::Hom { name, .. } => names[3].declare(name)?,
        }
    }
    for d in &decls {
        if let Decl::Algebra {
            name,
            components,
            brackets,
            localize,
            span,
        } = d
        {
            doc.algebras.push(resolve_algebra(
                name, components, brackets, localize, *span,
            )?);
        }
    }
    for d in &decls {
        if let Decl::Metric {
            name,
            algebra,
            rows,
            span,
        } = d
        {
            let a = lookup(&doc.algebras, algebra, "algebra", |a| &a.name)?;
            let matrix = resolve_metric(a, rows, *span)?;
            doc.metrics.push(MetricDecl {
                name: name.name.clone(),
                algebra: a.name.clone(),
                matrix,
                span: *span,
            });
        }
    }
    for d in &decls {
        if let Decl::Kahler {
            name,
            algebra,
            metric,
            eta,
            span,
        } = d
        {
            let a = lookup(&doc.algebras, algebra, "algebra", |a| &a.name)?;
            let m = lookup(&doc.metrics, metric, "metric", |m| &m.name)?;
            if m.algebra != a.name {
                return Err(Diagnostic::new(
                    format!(
                        "metric `{}` is declared on `{}`, not on `{}`",
                        m.name, m.algebra, a.name
                    ),
                    metric.span,
                ));
            }
            let eta = eta.as_ref().map(|e| eval(e, &a.ring)).transpose()?;
            doc.kahlers.push(KahlerDecl {
                name: name.name.clone(),
                algebra: a.name.clone(),
                metric: m.name.clone(),
                eta,
                span: *span,
            });
        }
    }
    for d in &decls {
        if let Decl::Hom {
            name,
            source,
            target,
            images,
            inverse,
            span,
        } = d
        {
            let ring_of = |id: &Ident| -> Result<Arc<Ring>, Diagnostic> {
                let k = lookup(&doc.kahlers, id, "kahler triple", |k| &k.name)?;
                Ok(lookup_algebra(&doc, &k.algebra).ring.clone())
            };
            let src = ring_of(source)?;
            let tgt = ring_of(target)?;
            let map = resolve_map(images, &src, &tgt)?;
            let inverse = inverse
                .as_ref()
                .map(|inv| resolve_map(inv, &tgt, &src))
                .transpose()?;
            doc.homs.push(HomDecl {
                name: name.name.clone(),
                source: source.name.clone(),
                target: target.name.clone(),
                map,
                inverse,
                span: *span,
            });
        }
    }
    Ok(doc)
}

fn lookup_algebra<'a>(doc: &'a Document, name: &str) -> &'a AlgebraDecl {
    doc.algebras
        .iter()
        .find(|a| a.name == name)
        .expect("resolved earlier")
}

fn resolve_algebra(
    name: &Ident,
    components: &[Vec<Ident>],
    brackets: &[syntax::BracketAst],
    localize: &[Ident],
    span: Span,
) -> Result<AlgebraDecl, Diagnostic> {
    let mut gens = Names::new("generator");
    for id in components.iter().flatten() {
        gens.declare(id)?;
    }
    let comps: Vec<Vec<String>> = components
        .iter()
        .map(|c| c.iter().map(|i| i.name.clone()).collect())
        .collect();
    let ring = if comps.len() == 1 {
        Ring::new(comps[0].clone())
    } else {
        Ring::product(comps)
    };
    let m = ring.num_generators();
    let index = |id: &Ident| {
        ring.index_of(&id.name).ok_or_else(|| {
            Diagnostic::new(
                format!("unknown generator `{}` in algebra `{}`", id.name, name.name),
                id.span,
            )
        })
    };
    let mut p = Matrix::zeros(&ring, m, m);
    let mut declared: HashMap<(usize, usize), Span> = HashMap::new();
    for b in brackets {
        let (i, j) = (index(&b.left)?, index(&b.right)?);
        if i == j {
            return Err(Diagnostic::new(
                format!(
                    "bracket of `{}` with itself is zero by antisymmetry",
                    b.left.name
                ),
                b.right.span,
            ));
        }
        let key = (i.min(j), i.max(j));
        if let Some(prev) = declared.insert(key, b.span) {
            return Err(Diagnostic::new(
                format!(
                    "duplicate bracket declaration for {{{}, {}}}",
                    b.left.name, b.right.name
                ),
                b.span,
            )
            .with_related("first declared here", prev));
        }
        let (ci, _) = ring.locate(i).expect("valid index");
        let (cj, _) = ring.locate(j).expect("valid index");
        let v = if ci == cj {
            eval_in_component(&b.value, &ring, ci)?
        } else {
            eval(&b.value, &ring)?
        };
        if ci != cj {
            if !v.is_zero() {
                return Err(Diagnostic::new(
                    format!(
                        "`{}` and `{}` lie in different components, so their bracket is zero",
                        b.left.name, b.right.name
                    ),
                    b.value.span,
                ));
            }
        }
        let (v_ij, v_ji) = if i < j {
            (v.clone(), -v)
        } else {
            (-v.clone(), v)
        };
        p.set(i.min(j), i.max(j), v_ij);
        p.set(i.max(j), i.min(j), v_ji);
    }
    let mut loc = Vec::new();
    for id in localize {
        let i = index(id)?;
        if !loc.contains(&i) {
            loc.push(i);
        }
    }
    Ok(AlgebraDecl {
        name: name.name.clone(),
        ring,
        structure: p,
        localize: loc,
        span,
    })
}

fn resolve_metric(a: &AlgebraDecl, rows: &[Vec<Expr>], span: Span) -> Result<Matrix, Diagnostic> {
    let m = a.ring.num_generators();
    if rows.len() != m {
        return Err(Diagnostic::new(
            format!(
                "metric has {} rows, algebra `{}` has {} generators",
                rows.len(),
                a.name,
                m
            ),
            span,
        ));
    }
    let mut g = Matrix::zeros(&a.ring, m, m);
    let mut spans = vec![vec![Span::default(); m]; m];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            let at = row.first().map(|e| e.span).unwrap_or(span);
            return Err(Diagnostic::new(
                format!("row {} has {} entries, expected {m}", i + 1, row.len()),
                at,
            ));
        }
        for (j, e) in row.iter().enumerate() {
            let (ci, _) = a.ring.locate(i).expect("valid index");
            let (cj, _) = a.ring.locate(j).expect("valid index");
            let v = if ci == cj {
                eval_in_component(e, &a.ring, ci)?
            } else {
                eval(e, &a.ring)?
            };
            g.set(i, j, v);
            spans[i][j] = e.span;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            if g.get(i, j) != g.get(j, i) {
                return Err(Diagnostic::new(
                    format!(
                        "metric is not symmetric: entry ({}, {}) is {} but ({}, {}) is {}",
                        i + 1,
                        j + 1,
                        g.get(i, j),
                        j + 1,
                        i + 1,
                        g.get(j, i)
                    ),
                    spans[j][i],
                )
                .with_related(format!("entry ({}, {}) is here", i + 1, j + 1), spans[i][j]));
            }
        }
    }
    Ok(g)
}

fn resolve_map(
    entries: &[MapEntry],
    src: &Arc<Ring>,
    tgt: &Arc<Ring>,
) -> Result<MapDecl, Diagnostic> {
    let m = src.num_generators();
    let mut images: Vec<Option<RingElem>> = vec![None; m];
    let mut spans: Vec<Option<Span>> = vec![None; m];
    let mut unit = None;
    let mut unit_span: Option<Span> = None;
    let mut last = None;
    for entry in entries {
        let v = eval(&entry.value, tgt)?;
        match &entry.key {
            MapKey::Generator(id) => {
                let i = src.index_of(&id.name).ok_or_else(|| {
                    Diagnostic::new(
                        format!("`{}` is not a generator of the source", id.name),
                        id.span,
                    )
                })?;
                if let Some(prev) = spans[i] {
                    return Err(
                        Diagnostic::new(format!("`{}` is mapped twice", id.name), id.span)
                            .with_related("first mapped here", prev),
                    );
                }
                spans[i] = Some(id.span);
                images[i] = Some(v);
                last = Some(id.span);
            }
            MapKey::Unit(span) => {
                if src.is_product() {
                    return Err(Diagnostic::new(
                        "a unit image needs a source with one component",
                        *span,
                    ));
                }
                if let Some(prev) = unit_span {
                    return Err(Diagnostic::new("the unit is mapped twice", *span)
                        .with_related("first mapped here", prev));
                }
                unit_span = Some(*span);
                unit = if v.is_one() { None } else { Some(v) };
            }
        }
    }
    let mut out = Vec::with_capacity(m);
    for (i, img) in images.into_iter().enumerate() {
        match img {
            Some(v) => out.push(v),
            None => {
                let at = last.or(unit_span).unwrap_or_default();
                return Err(Diagnostic::new(
                    format!(
                        "no image given for generator `{}`",
                        src.generator_name(i).unwrap_or("?")
                    ),
                    at,
                ));
            }
        }
    }
    let decl = MapDecl { images: out, unit };
    ring_map(src, tgt, &decl)
        .map_err(|e| Diagnostic::new(e.to_string(), unit_span.or(last).unwrap_or_default()))?;
    Ok(decl)
}
