//! Subcommands: argument model and dispatch to the kernel.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use kp_core::constructions::{
    check_subalgebra, check_subalgebra_along, direct_sum, embed_factor, tensor_product,
    ConstructionError, Side, SumSpec, TensorSpec,
};
use kp_core::kp::{kp_tensors, solve_eta, verify_kp, EtaSolution, KPAlgebra, KpError};
use kp_core::morphism::{
    check_iso, check_kp_morphism, eta_transport_check, image_subalgebra, pullback_metric, Hom,
    MorphismError,
};
use kp_core::poisson::{check_antisymmetry, check_jacobi, PoissonError};
use kp_core::ring::{Matrix, RatFunc, Ring, RingElem, RingError};
use kp_core::verdict::{Verdict, Witness};

use crate::document::{eval, AlgebraDecl, BuildError, Document, KahlerDecl, MetricDecl};
use crate::print;
use crate::report::{Report, Status, Value};
use crate::syntax::{self, Span};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "kpw",
    version,
    about = "Exact workbench for Kähler-Poisson algebras"
)]
pub struct Cli {
    /// Emit the report as one JSON object.
    #[arg(long, global = true)]
    pub json: bool,
    /// Skip the Jacobi check on declared brackets.
    #[arg(long, global = true)]
    pub assume_poisson: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Antisymmetry and Jacobi identity of an algebra's bracket.
    CheckPoisson {
        file: PathBuf,
        #[arg(long, conflicts_with = "kp", required_unless_present = "kp")]
        algebra: Option<String>,
        #[arg(long)]
        kp: Option<String>,
    },
    /// Solve for eta.
    SolveEta {
        file: PathBuf,
        #[arg(long)]
        kp: String,
    },
    /// Check the Kähler-Poisson condition.
    Verify {
        file: PathBuf,
        #[arg(long)]
        kp: String,
    },
    /// The tensors D and P with their identities.
    Tensors {
        file: PathBuf,
        #[arg(long)]
        kp: String,
        /// Element whose hamiltonian and D-vector are checked.
        #[arg(long)]
        element: Option<String>,
    },
    /// Check that a hom is a morphism of Kähler-Poisson algebras.
    CheckHom {
        file: PathBuf,
        #[arg(long)]
        hom: String,
    },
    /// Isomorphism criterion for a hom with inverse.
    CheckIso {
        file: PathBuf,
        #[arg(long)]
        hom: String,
    },
    /// Compare phi(eta) with eta' on the target bracket.
    CheckEtaTransport {
        file: PathBuf,
        #[arg(long)]
        hom: String,
    },
    /// Direct sum of two algebras.
    Dsum {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value = "S")]
        name: String,
        /// Write the resulting document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tensor product of two algebras.
    Tprod {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value = "T")]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that one algebra is a Kähler-Poisson subalgebra of another.
    CheckSub {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long)]
        sup: String,
        /// Inclusion map; by default generators are matched by name.
        #[arg(long)]
        hom: Option<String>,
    },
    /// The image subalgebra of a hom.
    ImageSub {
        file: PathBuf,
        #[arg(long)]
        hom: String,
        /// Preimage of a target generator, as `name=expr`.
        #[arg(long = "preimage", value_name = "NAME=EXPR")]
        preimages: Vec<String>,
    },
    /// Run the embedded example corpus.
    Corpus,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckPoisson { .. } => "check-poisson",
            Command::SolveEta { .. } => "solve-eta",
            Command::Verify { .. } => "verify",
            Command::Tensors { .. } => "tensors",
            Command::CheckHom { .. } => "check-hom",
            Command::CheckIso { .. } => "check-iso",
            Command::CheckEtaTransport { .. } => "check-eta-transport",
            Command::Dsum { .. } => "dsum",
            Command::Tprod { .. } => "tprod",
            Command::CheckSub { .. } => "check-sub",
            Command::ImageSub { .. } => "image-sub",
            Command::Corpus => "corpus",
        }
    }

    pub fn file(&self) -> Option<&PathBuf> {
        match self {
            Command::CheckPoisson { file, .. }
            | Command::SolveEta { file, .. }
            | Command::Verify { file, .. }
            | Command::Tensors { file, .. }
            | Command::CheckHom { file, .. }
            | Command::CheckIso { file, .. }
            | Command::CheckEtaTransport { file, .. }
            | Command::Dsum { file, .. }
            | Command::Tprod { file, .. }
            | Command::CheckSub { file, .. }
            | Command::ImageSub { file, .. } => Some(file),
            Command::Corpus => None,
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Dsum { out, .. } | Command::Tprod { out, .. } => out.as_ref(),
            _ => None,
        }
    }

    fn subject(&self) -> String {
        match self {
            Command::CheckPoisson { algebra, kp, .. } => {
                algebra.clone().or_else(|| kp.clone()).unwrap_or_default()
            }
            Command::SolveEta { kp, .. }
            | Command::Verify { kp, .. }
            | Command::Tensors { kp, .. } => kp.clone(),
            Command::CheckHom { hom, .. }
            | Command::CheckIso { hom, .. }
            | Command::CheckEtaTransport { hom, .. }
            | Command::ImageSub { hom, .. } => hom.clone(),
            Command::Dsum { left, right, .. } | Command::Tprod { left, right, .. } => {
                format!("{left}, {right}")
            }
            Command::CheckSub { sub, sup, .. } => format!("{sub} in {sup}"),
            Command::Corpus => String::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Flags {
    pub assume_poisson: bool,
}

/// Problem with the input rather than with the mathematics.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct InputError {
    pub message: String,
    pub span: Option<Span>,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError {
            message: message.into(),
            span: None,
        }
    }
}

impl From<syntax::Diagnostic> for InputError {
    fn from(d: syntax::Diagnostic) -> Self {
        InputError {
            message: d.message,
            span: Some(d.span),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    /// Document produced by a construction.
    pub output: Option<Document>,
}

/// Either the command stops on bad input, or the mathematics already
/// decided the report.
enum Stop {
    Input(InputError),
    Report(Report),
}

type Step<T> = Result<T, Stop>;

fn input(msg: impl Into<String>) -> Stop {
    Stop::Input(InputError::new(msg))
}

fn fail_with(w: &Witness, note: impl Into<String>) -> Stop {
    Stop::Report(Report::fail(w).note(note))
}

fn from_ring(e: RingError) -> Stop {
    input(e.to_string())
}

fn from_poisson(e: PoissonError) -> Stop {
    match e {
        PoissonError::Jacobi(w) => {
            fail_with(&w, "the bracket does not satisfy the Jacobi identity")
        }
        PoissonError::Antisymmetry(w) => fail_with(&w, "the bracket is not antisymmetric"),
        other => input(other.to_string()),
    }
}

fn from_kp(e: KpError) -> Stop {
    match e {
        KpError::Condition(w) => fail_with(&w, "the Kähler-Poisson condition fails"),
        KpError::NotProportional(w) => not_proportional(&w),
        KpError::Poisson(p) => from_poisson(p),
        other => input(other.to_string()),
    }
}

fn from_morphism(e: MorphismError) -> Stop {
    match e {
        MorphismError::Kp(k) => from_kp(k),
        MorphismError::Poisson(p) => from_poisson(p),
        other => input(other.to_string()),
    }
}

fn from_build(e: BuildError) -> Stop {
    match e {
        BuildError::Poisson(p) => from_poisson(p),
        BuildError::Kp(k) => from_kp(k),
        BuildError::Morphism(m) => from_morphism(m),
        other => input(other.to_string()),
    }
}

fn from_construction(e: ConstructionError) -> Stop {
    match e {
        ConstructionError::NoSquareRoot { .. } | ConstructionError::ProductFactor => {
            Stop::Report(Report::unsupported(e.to_string()))
        }
        ConstructionError::NotPoissonSubalgebra(w) => {
            fail_with(&w, "the inclusion does not preserve brackets")
        }
        ConstructionError::Kp(k) => from_kp(k),
        ConstructionError::Morphism(m) => from_morphism(m),
        ConstructionError::Poisson(p) => from_poisson(p),
        other => input(other.to_string()),
    }
}

fn not_proportional(w: &Witness) -> Stop {
    Stop::Report(
        Report::new(Status::Unsupported)
            .with_witness(w)
            .note("no eta exists: PgPgP is not proportional to P"),
    )
}

/// Runs one subcommand against a parsed document.
pub fn run_command(doc: &Document, cmd: &Command, flags: Flags) -> Result<Outcome, InputError> {
    let start = Instant::now();
    let ctx = Ctx {
        doc,
        assume: flags.assume_poisson,
    };
    let result = match cmd {
        Command::CheckPoisson { algebra, kp, .. } => {
            ctx.check_poisson(algebra.as_deref(), kp.as_deref())
        }
        Command::SolveEta { kp, .. } => ctx.solve_eta(kp),
        Command::Verify { kp, .. } => ctx.verify(kp),
        Command::Tensors { kp, element, .. } => ctx.tensors(kp, element.as_deref()),
        Command::CheckHom { hom, .. } => ctx.check_hom(hom),
        Command::CheckIso { hom, .. } => ctx.check_iso(hom),
        Command::CheckEtaTransport { hom, .. } => ctx.eta_transport(hom),
        Command::Dsum {
            left, right, name, ..
        } => ctx.dsum(left, right, name),
        Command::Tprod {
            left, right, name, ..
        } => ctx.tprod(left, right, name),
        Command::CheckSub { sub, sup, hom, .. } => ctx.check_sub(sub, sup, hom.as_deref()),
        Command::ImageSub { hom, preimages, .. } => ctx.image_sub(hom, preimages),
        Command::Corpus => Err(input("corpus does not read a document")),
    };
    let mut outcome = match result {
        Ok(o) => o,
        Err(Stop::Report(report)) => Outcome {
            report,
            output: None,
        },
        Err(Stop::Input(e)) => return Err(e),
    };
    outcome.report.command = cmd.name().to_string();
    outcome.report.subject = cmd.subject();
    outcome.report.timing.micros = start.elapsed().as_micros() as u64;
    Ok(outcome)
}

fn done(report: Report) -> Step<Outcome> {
    Ok(Outcome {
        report,
        output: None,
    })
}

struct Ctx<'a> {
    doc: &'a Document,
    assume: bool,
}

impl Ctx<'_> {
    fn kp_raw(&self, name: &str) -> Step<KPAlgebra> {
        self.doc.kp(name, self.assume).map_err(from_build)
    }

    /// The named algebra with η, solving for it when none is declared.
    fn kp_eta(&self, name: &str) -> Step<KPAlgebra> {
        let k = self
            .doc
            .kp_with_eta(name, self.assume)
            .map_err(from_build)?;
        if k.eta().is_none() {
            let sol = solve_eta(k.structure(), k.metric()).map_err(from_kp)?;
            if let EtaSolution::NotProportional(w) = sol {
                return Err(match not_proportional(&w) {
                    Stop::Report(r) => {
                        Stop::Report(r.note(format!("{name} declares no eta and none exists")))
                    }
                    other => other,
                });
            }
        }
        Ok(k)
    }

    fn verified(&self, name: &str) -> Step<Arc<KPAlgebra>> {
        let k = self.kp_eta(name)?;
        if let Verdict::Fail(w) = verify_kp(&k).map_err(from_kp)? {
            return Err(fail_with(
                &w,
                format!("{name} fails the Kähler-Poisson condition"),
            ));
        }
        Ok(Arc::new(k))
    }

    fn hom(&self, name: &str) -> Step<Hom> {
        self.doc.hom_value(name, self.assume).map_err(from_build)
    }

    fn check_poisson(&self, algebra: Option<&str>, kp: Option<&str>) -> Step<Outcome> {
        let name = match (algebra, kp) {
            (Some(a), _) => a.to_string(),
            (None, Some(k)) => self.doc.kahler(k).map_err(from_build)?.algebra.clone(),
            (None, None) => return Err(input("give --algebra or --kp")),
        };
        let a = self.doc.algebra(&name).map_err(from_build)?;
        let p = &a.structure;
        let anti = check_antisymmetry(p).map_err(from_poisson)?;
        let jacobi = if self.assume {
            Verdict::Pass
        } else {
            check_jacobi(p).map_err(from_poisson)?
        };
        let mut r = Report::pass()
            .value("P", p)
            .and(&anti, "antisymmetry")
            .and(&jacobi, "Jacobi identity");
        if self.assume {
            r = r.note("Jacobi identity assumed, not checked");
        }
        done(r)
    }

    fn solve_eta(&self, name: &str) -> Step<Outcome> {
        let k = self.kp_raw(name)?;
        let r = match solve_eta(k.structure(), k.metric()).map_err(from_kp)? {
            EtaSolution::Solved(e) => {
                let mut r = Report::pass().eta(&e);
                if let Some(d) = k.eta() {
                    if *d != e {
                        r = r.note(format!("declared eta {d} differs from the solution"));
                    }
                }
                if let Some(n) = localization_note(self.doc, name, &e) {
                    r = r.note(n);
                }
                r
            }
            EtaSolution::Degenerate(e) => Report::new(Status::Degenerate)
                .eta(&e)
                .note("P = 0: the condition holds for every eta; eta = 1 by convention"),
            EtaSolution::NotProportional(w) => return Err(not_proportional(&w)),
        };
        done(r)
    }

    fn verify(&self, name: &str) -> Step<Outcome> {
        let declared = self.kp_raw(name)?;
        let solved_note = declared.eta().is_none();
        let k = self.kp_eta(name)?;
        let eta = k.eta().expect("solved above").clone();
        let v = verify_kp(&k).map_err(from_kp)?;
        let mut r = Report::from_verdict(&v).eta(&eta);
        if let Some(m) = v.witness().and_then(|w| w.matrix.as_ref()) {
            r = r.value("residual", m);
        }
        if solved_note {
            r = r.note("no eta declared; verified with the solved eta");
        }
        done(r)
    }

    fn tensors(&self, name: &str, element: Option<&str>) -> Step<Outcome> {
        let k = self.kp_eta(name)?;
        let t = kp_tensors(&k).map_err(from_kp)?;
        let projector = t
            .d_mixed
            .mul(&t.d_upper)
            .and_then(|m| m.sub(&t.d_upper))
            .map_err(from_ring)?;
        let mut r = Report::pass()
            .eta(k.eta().expect("kp_eta"))
            .value("D^ij", &t.d_upper)
            .value("D^i_j", &t.d_mixed)
            .value("P^i_j", &t.p_mixed)
            .and(&Verdict::zero_matrix(projector), "projector D^i_j D^jk = D^ik")
            .note("projector read as D^i_j D^jk = D^ik; the form D^i_j D^jk = D^jk has unbalanced free indices");
        if let Some(src) = element {
            let e = syntax::parse_expr(src).map_err(|d| input(format!("--element: {d}")))?;
            let a = eval(&e, k.ring()).map_err(|d| input(format!("--element: {d}")))?;
            let pa = k.p_vector(&a).map_err(from_kp)?;
            let da = k.d_vector(&a).map_err(from_kp)?;
            let d_p = mat_vec(&t.d_upper, &k.lower(&pa).map_err(from_kp)?);
            let p_d = mat_vec(k.p(), &k.lower(&da).map_err(from_kp)?);
            r = r
                .value("P(a)", Value::List(print::elements(&pa)))
                .value("D(a)", Value::List(print::elements(&da)))
                .and(&vector_verdict(&d_p, &pa), "D^ij P_j(a) = P^i(a)")
                .and(&vector_verdict(&p_d, &pa), "P^ij D_j(a) = P^i(a)");
        }
        done(r)
    }

    fn check_hom(&self, name: &str) -> Step<Outcome> {
        let h = self.hom(name)?;
        let rep = check_kp_morphism(&h).map_err(from_morphism)?;
        let mut r = Report::pass().value("images", Value::List(print::elements(h.images())));
        if let Some((cond, w)) = rep.first_failure() {
            r = Report::fail(w)
                .value("images", Value::List(print::elements(h.images())))
                .note(match cond {
                    "poisson-hom" => "the map does not preserve brackets",
                    "metric" => "the metric condition fails",
                    _ => "a generator image is not a polynomial",
                });
        }
        done(r)
    }

    fn check_iso(&self, name: &str) -> Step<Outcome> {
        let h = self.hom(name)?;
        let inv = h
            .inverse()
            .ok_or_else(|| input(format!("hom {name} declares no inverse")))?
            .clone();
        for (dir, map) in [("map", h.map()), ("inverse", &inv)] {
            if let Some(i) = map.images().iter().position(|e| !e.is_poly()) {
                let w = Witness::at([i], map.images()[i].clone());
                return Err(fail_with(
                    &w,
                    format!("{dir} image of generator {} is not a polynomial", i + 1),
                ));
            }
        }
        let rep = check_iso(&h).map_err(from_morphism)?;
        let pulled = pullback_metric(&h).map_err(from_morphism)?;
        let det = pulled.det().map_err(from_ring)?;
        let mut r = Report::pass()
            .value("h", &pulled)
            .value("det(h)", Value::Text(det.to_string()))
            .and(&rep.poisson_hom, "bracket preservation");
        if let Some(c) = &rep.criterion {
            r = r.and(c, "P'(h - g')P' = 0");
        }
        r = r.note("h = A^T phi(g) A with A^i_alpha = d phi(x^i) / d y^alpha, i.e. h_ab = A^k_a phi(g_kl) A^l_b; the transposed form A phi(g) A^T does not balance indices");
        done(r)
    }

    fn eta_transport(&self, name: &str) -> Step<Outcome> {
        let h = self.hom(name)?;
        for (side, k) in [("source", h.source()), ("target", h.target())] {
            if k.eta().is_none() {
                return Err(Stop::Report(Report::unsupported(format!(
                    "{side} has no eta"
                ))));
            }
        }
        let phi_eta = h.apply(h.source().eta().unwrap()).map_err(from_ring)?;
        let v = eta_transport_check(&h).map_err(from_morphism)?;
        let mut r = Report::from_verdict(&v)
            .eta(h.target().eta().unwrap())
            .value("phi(eta)", Value::Text(phi_eta.to_string()));
        if !v.is_pass() {
            r = r.note("(phi(eta) - eta') P' is nonzero");
        }
        if h.inverse().is_none() {
            r = r.note("no inverse declared; the check does not establish an isomorphism");
        }
        done(r)
    }

    fn dsum(&self, left: &str, right: &str, name: &str) -> Step<Outcome> {
        let l = self.verified(left)?;
        let rt = self.verified(right)?;
        let spec = SumSpec::new(l.clone(), rt.clone()).map_err(from_construction)?;
        let sum = direct_sum(&spec).map_err(from_construction)?;
        let mut r = Report::pass()
            .eta(sum.algebra.eta().expect("sums carry eta"))
            .and(
                &verify_kp(&sum.algebra).map_err(from_kp)?,
                "Kähler-Poisson condition on the sum",
            );
        for (side, k) in [(Side::Left, &l), (Side::Right, &rt)] {
            let emb = embed_factor(&sum, side).map_err(from_construction)?;
            let rep = check_kp_morphism(&emb).map_err(from_morphism)?;
            if let Some((cond, w)) = rep.first_failure() {
                r = r.and(
                    &Verdict::Fail(w.clone()),
                    &format!("{} embedding: {cond}", side.name()),
                );
            }
            let sub = check_subalgebra_along(k, &sum.algebra, sum.embedding_map(side))
                .map_err(from_construction)?;
            r = r.and(&sub, &format!("{} factor as a subalgebra", side.name()));
        }
        let localize = self.combined_localize(left, right)?;
        let out = single_document(name, &sum.algebra, localize);
        r.document = Some(print::document(&out));
        Ok(Outcome {
            report: r,
            output: Some(out),
        })
    }

    fn tprod(&self, left: &str, right: &str, name: &str) -> Step<Outcome> {
        let l = self.verified(left)?;
        let rt = self.verified(right)?;
        let spec = TensorSpec::new(l, rt).map_err(from_construction)?;
        let t = tensor_product(&spec).map_err(from_construction)?;
        let r = Report::pass()
            .eta(t.eta().expect("tensor products carry eta"))
            .value("rho", Value::Text(spec.rho(Side::Left).to_string()))
            .value("rho'", Value::Text(spec.rho(Side::Right).to_string()))
            .and(
                &verify_kp(&t).map_err(from_kp)?,
                "Kähler-Poisson condition on the product",
            );
        let localize = self.combined_localize(left, right)?;
        let out = single_document(name, &t, localize);
        let mut r = r;
        r.document = Some(print::document(&out));
        Ok(Outcome {
            report: r,
            output: Some(out),
        })
    }

    fn combined_localize(&self, left: &str, right: &str) -> Step<Vec<usize>> {
        let la = self
            .doc
            .algebra(&self.doc.kahler(left).map_err(from_build)?.algebra)
            .map_err(from_build)?;
        let ra = self
            .doc
            .algebra(&self.doc.kahler(right).map_err(from_build)?.algebra)
            .map_err(from_build)?;
        let offset = la.ring.num_generators();
        Ok(la
            .localize
            .iter()
            .copied()
            .chain(ra.localize.iter().map(|i| i + offset))
            .collect())
    }

    fn check_sub(&self, sub: &str, sup: &str, hom: Option<&str>) -> Step<Outcome> {
        let s = self.kp_eta(sub)?;
        let t = self.kp_eta(sup)?;
        let v = match hom {
            Some(hname) => {
                let decl = self.doc.hom(hname).map_err(from_build)?;
                if decl.source != sub || decl.target != sup {
                    return Err(input(format!(
                        "hom {hname} goes {} -> {}, not {sub} -> {sup}",
                        decl.source, decl.target
                    )));
                }
                let h = self.hom(hname)?;
                check_subalgebra_along(&s, &t, h.map()).map_err(from_construction)?
            }
            None => {
                let mut inclusion = Vec::with_capacity(s.dim());
                for g in s.ring().generator_names() {
                    let i = t.ring().index_of(g).ok_or_else(|| {
                        input(format!(
                            "generator {g} of {sub} is not a generator of {sup}; pass --hom"
                        ))
                    })?;
                    inclusion.push(i);
                }
                check_subalgebra(&s, &t, &inclusion).map_err(from_construction)?
            }
        };
        let mut r = Report::from_verdict(&v);
        if !v.is_pass() {
            r = r.note("the metric condition fails on basis derivations");
        }
        done(r)
    }

    fn image_sub(&self, name: &str, preimages: &[String]) -> Step<Outcome> {
        let h = self.hom(name)?;
        let (src, tgt) = (h.source().ring().clone(), h.target().ring().clone());
        let pre: Vec<RingElem> =
            if preimages.is_empty() {
                match h.inverse() {
                    Some(inv) => inv.images().to_vec(),
                    None => return Err(input(format!(
                        "hom {name} declares no inverse; pass --preimage for each target generator"
                    ))),
                }
            } else {
                parse_preimages(preimages, &src, &tgt)?
            };
        if h.source().eta().is_none() {
            return Err(Stop::Report(Report::unsupported("source has no eta")));
        }
        let img = image_subalgebra(&h, &pre).map_err(from_morphism)?;
        let mut r = Report::pass().value("metric", &img.metric_in_target);
        match img.algebra.eta() {
            Some(e) => {
                r = r.eta(e).and(
                    &verify_kp(&img.algebra).map_err(from_kp)?,
                    "Kähler-Poisson condition on the image",
                );
            }
            None => r = r.note("the image metric admits no eta"),
        }
        let v = check_subalgebra_along(&img.algebra, h.target(), &img.map)
            .map_err(from_construction)?;
        done(r.and(&v, "image as a subalgebra of the target"))
    }
}

fn parse_preimages(args: &[String], src: &Arc<Ring>, tgt: &Arc<Ring>) -> Step<Vec<RingElem>> {
    let mut slots: Vec<Option<RingElem>> = vec![None; tgt.num_generators()];
    for a in args {
        let (lhs, rhs) = a
            .split_once('=')
            .ok_or_else(|| input(format!("--preimage {a}: expected NAME=EXPR")))?;
        let j = tgt.index_of(lhs.trim()).ok_or_else(|| {
            input(format!(
                "--preimage {a}: {} is not a target generator",
                lhs.trim()
            ))
        })?;
        let e = syntax::parse_expr(rhs).map_err(|d| input(format!("--preimage {a}: {d}")))?;
        let v = eval(&e, src).map_err(|d| input(format!("--preimage {a}: {d}")))?;
        if slots[j].replace(v).is_some() {
            return Err(input(format!("--preimage given twice for {}", lhs.trim())));
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(j, s)| {
            s.ok_or_else(|| {
                input(format!(
                    "no --preimage for {}",
                    tgt.generator_name(j).unwrap()
                ))
            })
        })
        .collect()
}

fn mat_vec(m: &Matrix, v: &[RingElem]) -> Vec<RingElem> {
    (0..m.rows())
        .map(|i| {
            v.iter()
                .enumerate()
                .fold(m.ring().zero(), |acc, (j, x)| acc + m.get(i, j) * x)
        })
        .collect()
}

fn vector_verdict(got: &[RingElem], want: &[RingElem]) -> Verdict {
    match got.iter().zip(want).position(|(a, b)| a != b) {
        None => Verdict::Pass,
        Some(i) => Verdict::Fail(Witness::at([i], &got[i] - &want[i])),
    }
}

/// Flags an η whose denominator is not a monomial in localized generators.
fn localization_note(doc: &Document, kp: &str, eta: &RingElem) -> Option<String> {
    let a = doc.algebra(&doc.kahler(kp).ok()?.algebra).ok()?;
    let ring = &a.ring;
    for (c, part) in eta.parts().iter().enumerate() {
        let den = part.den();
        let offset = ring.offset(c);
        let ok = den.num_terms() == 1
            && (0..part.nvars())
                .all(|v| den.degree_in(v) == 0 || a.localize.contains(&(offset + v)));
        if !ok {
            return Some(format!(
                "eta needs the inverse of {}, which the declared localization does not provide",
                den_text(ring, c, part)
            ));
        }
    }
    None
}

fn den_text(ring: &Arc<Ring>, c: usize, part: &RatFunc) -> String {
    let names: Vec<String> = ring.components()[c].clone();
    part.den().to_string_with(&names)
}

/// Document holding one algebra, its metric and its Kähler triple.
fn single_document(name: &str, k: &KPAlgebra, localize: Vec<usize>) -> Document {
    let algebra = format!("A_{name}");
    let metric = format!("g_{name}");
    Document {
        algebras: vec![AlgebraDecl {
            name: algebra.clone(),
            ring: k.ring().clone(),
            structure: k.p().clone(),
            localize,
            span: Span::default(),
        }],
        metrics: vec![MetricDecl {
            name: metric.clone(),
            algebra: algebra.clone(),
            matrix: k.g().clone(),
            span: Span::default(),
        }],
        kahlers: vec![KahlerDecl {
            name: name.to_string(),
            algebra,
            metric,
            eta: k.eta().cloned(),
            span: Span::default(),
        }],
        homs: Vec::new(),
    }
}
