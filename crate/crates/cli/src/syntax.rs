//! Lexer and recursive-descent parser for `.kp` declaration files.

use std::fmt;

use num_bigint::BigInt;

/// 1-based source position plus the length of the token it covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub len: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub span: Span,
    pub related: Vec<(String, Span)>,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            message: message.into(),
            span,
            related: Vec::new(),
        }
    }

    pub fn with_related(mut self, message: impl Into<String>, span: Span) -> Self {
        self.related.push((message.into(), span));
        self
    }

    /// Multi-line rendering with the offending source line and a caret.
    pub fn render(&self, source: &str, file: &str) -> String {
        let mut out = format!("{file}:{}: error: {}\n", self.span, self.message);
        if let Some(line) = source.lines().nth(self.span.line.saturating_sub(1)) {
            let pad = " ".repeat(self.span.col.saturating_sub(1));
            let marks = "^".repeat(self.span.len.max(1));
            out.push_str(&format!("  {line}\n  {pad}{marks}\n"));
        }
        for (msg, span) in &self.related {
            out.push_str(&format!("{file}:{span}: note: {msg}\n"));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        for (msg, span) in &self.related {
            write!(f, "; {span}: {msg}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Pipe,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            t => format!("`{}`", t.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = Span { line, col, len: 1 };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let j = (i..chars.len())
                .find(|&k| !chars[k].is_ascii_digit())
                .unwrap_or(chars.len());
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<BigInt>().expect("digits");
            out.push(Token {
                tok: Tok::Int(n),
                span: Span {
                    len: j - i,
                    ..start
                },
            });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let j = (i..chars.len())
                .find(|&k| !(chars[k].is_alphanumeric() || chars[k] == '_' || chars[k] == '\''))
                .unwrap_or(chars.len());
            let text: String = chars[i..j].iter().collect();
            out.push(Token {
                tok: Tok::Ident(text),
                span: Span {
                    len: j - i,
                    ..start
                },
            });
            col += j - i;
            i = j;
            continue;
        }
        let (tok, len) = match c {
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            ':' => (Tok::Colon, 1),
            '=' => (Tok::Eq, 1),
            '+' => (Tok::Plus, 1),
            '-' | '−' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '/' => (Tok::Slash, 1),
            '^' => (Tok::Caret, 1),
            '|' => (Tok::Pipe, 1),
            _ => {
                return Err(Diagnostic::new(
                    format!("unexpected character `{c}`"),
                    start,
                ))
            }
        };
        out.push(Token {
            tok,
            span: Span { len, ..start },
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col, len: 1 },
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Tuple(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketAst {
    pub left: Ident,
    pub right: Ident,
    pub value: Expr,
    pub span: Span,
}

/// Left side of a map entry: a generator, or `1` for the image of the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKey {
    Generator(Ident),
    Unit(Span),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapEntry {
    pub key: MapKey,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Algebra {
        name: Ident,
        components: Vec<Vec<Ident>>,
        brackets: Vec<BracketAst>,
        localize: Vec<Ident>,
        span: Span,
    },
    Metric {
        name: Ident,
        algebra: Ident,
        rows: Vec<Vec<Expr>>,
        span: Span,
    },
    Kahler {
        name: Ident,
        algebra: Ident,
        metric: Ident,
        eta: Option<Expr>,
        span: Span,
    },
    Hom {
        name: Ident,
        source: Ident,
        target: Ident,
        images: Vec<MapEntry>,
        inverse: Option<Vec<MapEntry>>,
        span: Span,
    },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().tok == *tok
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(
            format!("expected {wanted}, found {}", t.tok.describe()),
            t.span,
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.at(&tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{}`", tok.symbol())))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<Span> {
        if self.at_word(w) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let name = s.clone();
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn ident_list(&mut self) -> PResult<Vec<Ident>> {
        let mut v = vec![self.ident()?];
        while self.at(&Tok::Comma) {
            self.bump();
            v.push(self.ident()?);
        }
        Ok(v)
    }

    fn document(&mut self) -> PResult<Vec<Decl>> {
        let mut decls = Vec::new();
        while !self.at(&Tok::Eof) {
            let d = match &self.peek().tok {
                Tok::Ident(w) if w == "algebra" => self.algebra()?,
                Tok::Ident(w) if w == "metric" => self.metric()?,
                Tok::Ident(w) if w == "kahler" => self.kahler()?,
                Tok::Ident(w) if w == "hom" => self.hom()?,
                Tok::Ident(w) if w == "relation" => return Err(relation_error(self.peek().span)),
                _ => return Err(self.unexpected("`algebra`, `metric`, `kahler` or `hom`")),
            };
            decls.push(d);
        }
        Ok(decls)
    }

    fn algebra(&mut self) -> PResult<Decl> {
        let span = self.expect_word("algebra")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        self.expect_word("generators")?;
        self.expect(Tok::Colon)?;
        let mut components = vec![self.ident_list()?];
        while self.at(&Tok::Pipe) {
            self.bump();
            components.push(self.ident_list()?);
        }
        self.expect(Tok::Semi)?;
        let mut brackets = Vec::new();
        let mut localize = Vec::new();
        loop {
            if self.at(&Tok::RBrace) {
                self.bump();
                break;
            }
            if self.at_word("bracket") {
                let bspan = self.bump().span;
                self.expect(Tok::LBrace)?;
                let left = self.ident()?;
                self.expect(Tok::Comma)?;
                let right = self.ident()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Eq)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                brackets.push(BracketAst {
                    left,
                    right,
                    value,
                    span: bspan,
                });
            } else if self.at_word("localize") {
                self.bump();
                self.expect(Tok::Colon)?;
                localize.extend(self.ident_list()?);
                self.expect(Tok::Semi)?;
            } else if self.at_word("relation") {
                return Err(relation_error(self.peek().span));
            } else {
                return Err(self.unexpected("`bracket`, `localize` or `}`"));
            }
        }
        Ok(Decl::Algebra {
            name,
            components,
            brackets,
            localize,
            span,
        })
    }

    fn metric(&mut self) -> PResult<Decl> {
        let span = self.expect_word("metric")?;
        let name = self.ident()?;
        self.expect_word("on")?;
        let algebra = self.ident()?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBracket)?;
        let mut rows = vec![self.row()?];
        while self.at(&Tok::Comma) {
            self.bump();
            rows.push(self.row()?);
        }
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        Ok(Decl::Metric {
            name,
            algebra,
            rows,
            span,
        })
    }

    fn row(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LBracket)?;
        let mut row = vec![self.expr()?];
        while self.at(&Tok::Comma) {
            self.bump();
            row.push(self.expr()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(row)
    }

    fn kahler(&mut self) -> PResult<Decl> {
        let span = self.expect_word("kahler")?;
        let name = self.ident()?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LParen)?;
        let algebra = self.ident()?;
        self.expect(Tok::Comma)?;
        let metric = self.ident()?;
        self.expect(Tok::RParen)?;
        let eta = if self.at_word("eta") {
            self.bump();
            self.expect(Tok::Eq)?;
            Some(self.expr()?)
        } else {
            None
        };
        self.expect(Tok::Semi)?;
        Ok(Decl::Kahler {
            name,
            algebra,
            metric,
            eta,
            span,
        })
    }

    fn hom(&mut self) -> PResult<Decl> {
        let span = self.expect_word("hom")?;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let source = self.ident()?;
        self.expect(Tok::Arrow)?;
        let target = self.ident()?;
        self.expect(Tok::LBrace)?;
        let images = self.map_entries()?;
        let inverse = if self.at_word("inverse") {
            self.bump();
            self.expect(Tok::LBrace)?;
            let inv = self.map_entries()?;
            self.expect(Tok::RBrace)?;
            Some(inv)
        } else {
            None
        };
        self.expect(Tok::RBrace)?;
        Ok(Decl::Hom {
            name,
            source,
            target,
            images,
            inverse,
            span,
        })
    }

    fn map_entries(&mut self) -> PResult<Vec<MapEntry>> {
        let mut v = Vec::new();
        loop {
            let key = match &self.peek().tok {
                Tok::Ident(w) if w == "inverse" => break,
                Tok::Ident(_) => MapKey::Generator(self.ident()?),
                Tok::Int(n) if *n == BigInt::from(1) => MapKey::Unit(self.bump().span),
                _ => break,
            };
            self.expect(Tok::Arrow)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            v.push(MapEntry { key, value });
        }
        if v.is_empty() {
            return Err(self.unexpected("a map entry `name -> expression;`"));
        }
        Ok(v)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => ExprKind::Add as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                Tok::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = join(lhs.span, rhs.span);
            lhs = Expr {
                kind: op(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => ExprKind::Mul as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                Tok::Slash => ExprKind::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = join(lhs.span, rhs.span);
            lhs = Expr {
                kind: op(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&Tok::Minus) {
            let s = self.bump().span;
            let inner = self.unary()?;
            let span = join(s, inner.span);
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.atom()?;
        if !self.at(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let neg = if self.at(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let t = self.peek().clone();
        let Tok::Int(n) = &t.tok else {
            return Err(self.unexpected("an integer exponent"));
        };
        let e: i32 = n
            .try_into()
            .map_err(|_| Diagnostic::new("exponent is too large", t.span))?;
        self.bump();
        let span = join(base.span, t.span);
        Ok(Expr {
            kind: ExprKind::Pow(Box::new(base), if neg { -e } else { e }),
            span,
        })
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Int(n),
                    span: t.span,
                })
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Var(name),
                    span: t.span,
                })
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.expr()?];
                while self.at(&Tok::Comma) {
                    self.bump();
                    items.push(self.expr()?);
                }
                let end = self.expect(Tok::RParen)?;
                let span = join(t.span, end);
                if items.len() == 1 {
                    let mut e = items.pop().expect("one item");
                    e.span = span;
                    Ok(e)
                } else {
                    Ok(Expr {
                        kind: ExprKind::Tuple(items),
                        span,
                    })
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn relation_error(span: Span) -> Diagnostic {
    Diagnostic::new(
        "relation declarations are not supported: algebras are presented by free generators, brackets and localization",
        span,
    )
}

/// Span from the start of `a` to the end of `b` when both sit on one line.
fn join(a: Span, b: Span) -> Span {
    if a.line == b.line && b.col >= a.col {
        Span {
            len: b.col + b.len - a.col,
            ..a
        }
    } else {
        a
    }
}

pub fn parse(src: &str) -> Result<Vec<Decl>, Diagnostic> {
    let toks = lex(src)?;
    Parser { toks, pos: 0 }.document()
}

/// Parses a lone expression, e.g. a command-line argument.
pub fn parse_expr(src: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if !p.at(&Tok::Eof) {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2 + 3/2*y").unwrap();
        let ExprKind::Add(l, r) = e.kind else {
            panic!("{e:?}")
        };
        assert!(
            matches!(l.kind, ExprKind::Neg(ref inner) if matches!(inner.kind, ExprKind::Pow(_, 2)))
        );
        let ExprKind::Mul(c, _) = r.kind else {
            panic!()
        };
        assert!(matches!(c.kind, ExprKind::Div(_, _)));
    }

    #[test]
    fn tuples_and_negative_exponents() {
        let e = parse_expr("(x, 1/u^-2)").unwrap();
        let ExprKind::Tuple(items) = e.kind else {
            panic!()
        };
        assert_eq!(items.len(), 2);
    }

    #[test]
    fn spans_are_one_based() {
        let d = parse("algebra A {\n  generators: x, y;\n  bracket {x, y} = ;\n}").unwrap_err();
        assert_eq!((d.span.line, d.span.col), (3, 20));
        assert!(d.message.contains("expected an expression"), "{d}");
    }

    #[test]
    fn relations_are_rejected() {
        let d = parse("algebra A { generators: x; relation x = 0; }").unwrap_err();
        assert!(d.message.contains("relation"));
        assert_eq!(d.span.col, 28);
    }

    #[test]
    fn components_and_comments() {
        let src = "# two blocks\nalgebra S { generators: x, y | u; localize: u; }";
        let decls = parse(src).unwrap();
        let Decl::Algebra {
            components,
            localize,
            ..
        } = &decls[0]
        else {
            panic!()
        };
        assert_eq!(components.len(), 2);
        assert_eq!(localize[0].name, "u");
    }

    #[test]
    fn hom_with_inverse_and_unit() {
        let src = "hom f : K -> L { x -> u + v; 1 -> (1, 0); inverse { u -> x; } }";
        let decls = parse(src).unwrap();
        let Decl::Hom {
            images, inverse, ..
        } = &decls[0]
        else {
            panic!()
        };
        assert_eq!(images.len(), 2);
        assert!(matches!(images[1].key, MapKey::Unit(_)));
        assert_eq!(inverse.as_ref().unwrap().len(), 1);
    }
}
