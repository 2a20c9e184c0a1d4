//! Problem files and the concrete formula syntax.
//!
//! A problem is an ordered list of named declarations, ended by `.`:
//!
//! ```text
//! axiom NAME: FORMULA.
//! rewrite NAME: ATOM -> FORMULA.        # two-sided propositional rule
//! rewrite+ NAME: ATOM -> FORMULA.       # usable at positive occurrences
//! rewrite- NAME: ATOM -> FORMULA.       # usable at negative occurrences
//! rule_term NAME: TERM -> TERM.
//! goal NAME: FORMULA.
//! ```
//!
//! Formulas use `~ & | => <=>`, `forall X. F`, `exists X. F`, `true`,
//! `false`, `name(args)` atoms, and infix `in` / `subset`. Variables start
//! with an uppercase letter, everything else with a lowercase letter.
//! `#` starts a comment. A quantifier scopes to the end of the enclosing
//! parenthesis. Axiom and goal formulas must be closed; rule variables are
//! implicitly universal.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{
    desugar, free_vars_formula, rename_apart, Formula, MetaId, Subst, Sym, Term,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: symbol {symbol} used inconsistently: {detail}")]
    Arity {
        symbol: Sym,
        detail: String,
        line: usize,
        col: usize,
    },
    #[error("duplicate declaration name {name}")]
    DuplicateName { name: Sym },
    #[error("problem declares no goal")]
    NoGoal,
}

/// One problem declaration, in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Axiom { name: Sym, formula: Formula },
    /// `polarity` here is the declared orientation: `None` means two-sided.
    PropRule {
        name: Sym,
        positive: Option<bool>,
        lhs: Formula,
        rhs: Formula,
    },
    TermRule { name: Sym, lhs: Term, rhs: Term },
    Goal { name: Sym, formula: Formula },
}

impl Decl {
    pub fn name(&self) -> &Sym {
        match self {
            Decl::Axiom { name, .. }
            | Decl::PropRule { name, .. }
            | Decl::TermRule { name, .. }
            | Decl::Goal { name, .. } => name,
        }
    }
}

/// A parsed problem: named declarations with consistent arities and exactly
/// one goal. All formulas are desugared and have their binders renamed apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: Sym,
    pub decls: Vec<Decl>,
}

impl Problem {
    pub fn parse(name: &str, text: &str) -> Result<Problem, ParseError> {
        let toks = lex(text)?;
        let mut p = Parser::new(&toks);
        let decls = p.parse_decls()?;
        let problem = Problem {
            name: name.to_string(),
            decls,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn goal(&self) -> (&Sym, &Formula) {
        self.decls
            .iter()
            .find_map(|d| match d {
                Decl::Goal { name, formula } => Some((name, formula)),
                _ => None,
            })
            .expect("validated problem has a goal")
    }

    /// Every function and predicate symbol in the problem, for reserving
    /// against generated names.
    pub fn signature_symbols(&self) -> BTreeSet<Sym> {
        let mut table = BTreeMap::new();
        for d in &self.decls {
            match d {
                Decl::Axiom { formula, .. } | Decl::Goal { formula, .. } => {
                    collect_symbols(formula, &mut table)
                }
                Decl::PropRule { lhs, rhs, .. } => {
                    collect_symbols(lhs, &mut table);
                    collect_symbols(rhs, &mut table);
                }
                Decl::TermRule { lhs, rhs, .. } => {
                    collect_term_symbols(lhs, &mut table);
                    collect_term_symbols(rhs, &mut table);
                }
            }
        }
        table.into_keys().collect()
    }

    fn validate(&self) -> Result<(), ParseError> {
        let mut names = BTreeSet::new();
        for d in &self.decls {
            if !names.insert(d.name().clone()) {
                return Err(ParseError::DuplicateName {
                    name: d.name().clone(),
                });
            }
        }
        let goals = self
            .decls
            .iter()
            .filter(|d| matches!(d, Decl::Goal { .. }))
            .count();
        if goals == 0 {
            return Err(ParseError::NoGoal);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SymKind {
    Pred,
    Func,
}

fn collect_symbols(f: &Formula, out: &mut BTreeMap<Sym, (SymKind, usize)>) {
    match f {
        Formula::Atom(p, args) => {
            out.entry(p.clone()).or_insert((SymKind::Pred, args.len()));
            for a in args {
                collect_term_symbols(a, out);
            }
        }
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => collect_symbols(g, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_symbols(l, out);
            collect_symbols(r, out);
        }
    }
}

fn collect_term_symbols(t: &Term, out: &mut BTreeMap<Sym, (SymKind, usize)>) {
    match t {
        Term::Var(_) | Term::Meta(_) => {}
        Term::App(f, args) => {
            out.entry(f.clone()).or_insert((SymKind::Func, args.len()));
            for a in args {
                collect_term_symbols(a, out);
            }
        }
    }
}

/// Parse a closed formula (no metavariables).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_impl(text, false)
}

/// Parse a formula that may contain metavariables (`?0`, `?1`, ...), as
/// found in proof traces.
pub fn parse_formula_with_metas(text: &str) -> Result<Formula, ParseError> {
    parse_formula_impl(text, true)
}

fn parse_formula_impl(text: &str, allow_meta: bool) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    p.allow_meta = allow_meta;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_term_with_metas(text: &str) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    p.allow_meta = true;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse a substitution written `{ X -> a; ?0 -> f(b) }`.
pub fn parse_subst(text: &str) -> Result<Subst, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    p.allow_meta = true;
    let s = p.subst()?;
    p.expect_end()?;
    Ok(s)
}

const RESERVED: &[&str] = &["forall", "exists", "in", "subset", "true", "false"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    UpIdent(String),
    Meta(MetaId),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Semi,
    Tilde,
    Amp,
    Pipe,
    Plus,
    Minus,
    Arrow,
    FatArrow,
    Equiv,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) | Tok::UpIdent(s) => write!(f, "{s}"),
            Tok::Meta(m) => write!(f, "?{m}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Tilde => write!(f, "~"),
            Tok::Amp => write!(f, "&"),
            Tok::Pipe => write!(f, "|"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Arrow => write!(f, "->"),
            Tok::FatArrow => write!(f, "=>"),
            Tok::Equiv => write!(f, "<=>"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax_err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '(' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
            }
            '{' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::LBrace, line: tline, col: tcol });
            }
            '}' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::RBrace, line: tline, col: tcol });
            }
            ',' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Comma, line: tline, col: tcol });
            }
            '.' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Dot, line: tline, col: tcol });
            }
            ':' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Colon, line: tline, col: tcol });
            }
            ';' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Semi, line: tline, col: tcol });
            }
            '~' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Tilde, line: tline, col: tcol });
            }
            '&' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Amp, line: tline, col: tcol });
            }
            '|' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Pipe, line: tline, col: tcol });
            }
            '+' => {
                bump(&mut chars);
                out.push(Spanned { tok: Tok::Plus, line: tline, col: tcol });
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    out.push(Spanned { tok: Tok::Arrow, line: tline, col: tcol });
                } else {
                    out.push(Spanned { tok: Tok::Minus, line: tline, col: tcol });
                }
            }
            '=' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    out.push(Spanned { tok: Tok::FatArrow, line: tline, col: tcol });
                } else {
                    return Err(syntax_err(tline, tcol, "expected => here"));
                }
            }
            '<' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars);
                        out.push(Spanned { tok: Tok::Equiv, line: tline, col: tcol });
                    } else {
                        return Err(syntax_err(tline, tcol, "expected <=> here"));
                    }
                } else {
                    return Err(syntax_err(tline, tcol, "expected <=> here"));
                }
            }
            '?' => {
                bump(&mut chars);
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                if digits.is_empty() {
                    return Err(syntax_err(tline, tcol, "expected digits after ?"));
                }
                let id: MetaId = digits
                    .parse()
                    .map_err(|_| syntax_err(tline, tcol, "metavariable id out of range"))?;
                out.push(Spanned { tok: Tok::Meta(id), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let tok = if word.chars().next().unwrap().is_ascii_uppercase() {
                    Tok::UpIdent(word)
                } else {
                    Tok::Ident(word)
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            other => {
                return Err(syntax_err(tline, tcol, format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    allow_meta: bool,
    end_line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Spanned]) -> Parser<'a> {
        let (end_line, end_col) = toks
            .last()
            .map(|s| (s.line, s.col + 1))
            .unwrap_or((1, 1));
        Parser {
            toks,
            pos: 0,
            allow_meta: false,
            end_line,
            end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn bump(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        syntax_err(line, col, msg)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.bump();
                Ok(())
            }
            Some(t) => Err(self.err_here(format!("expected {tok}, found {t}"))),
            None => Err(self.err_here(format!("expected {tok}, found end of input"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err_here(format!("unexpected trailing {t}"))),
        }
    }

    fn lower_ident(&mut self, what: &str) -> Result<(Sym, usize, usize), ParseError> {
        let (line, col) = self.here();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.bump();
                Ok((s, line, col))
            }
            Some(t) => Err(self.err_here(format!("expected {what}, found {t}"))),
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn parse_decls(&mut self) -> Result<Vec<Decl>, ParseError> {
        let mut decls = Vec::new();
        let mut table: BTreeMap<Sym, (SymKind, usize)> = BTreeMap::new();
        while self.peek().is_some() {
            let (kw, line, col) = self.lower_ident("a declaration keyword")?;
            let decl = match kw.as_str() {
                "axiom" => {
                    let (name, nl, nc) = self.lower_ident("an axiom name")?;
                    self.expect(Tok::Colon)?;
                    let f = self.formula()?;
                    self.expect(Tok::Dot)?;
                    let f = self.finish_closed(f, &name, nl, nc)?;
                    Decl::Axiom { name, formula: f }
                }
                "rewrite" => {
                    let positive = match self.peek() {
                        Some(Tok::Plus) => {
                            self.bump();
                            Some(true)
                        }
                        Some(Tok::Minus) => {
                            self.bump();
                            Some(false)
                        }
                        _ => None,
                    };
                    let (name, ..) = self.lower_ident("a rule name")?;
                    self.expect(Tok::Colon)?;
                    let lhs = self.formula()?;
                    self.expect(Tok::Arrow)?;
                    let rhs = self.formula()?;
                    self.expect(Tok::Dot)?;
                    let rhs = rename_apart(&desugar(&rhs));
                    Decl::PropRule { name, positive, lhs, rhs }
                }
                "rule_term" => {
                    let (name, ..) = self.lower_ident("a rule name")?;
                    self.expect(Tok::Colon)?;
                    let lhs = self.term()?;
                    self.expect(Tok::Arrow)?;
                    let rhs = self.term()?;
                    self.expect(Tok::Dot)?;
                    Decl::TermRule { name, lhs, rhs }
                }
                "goal" => {
                    let (name, nl, nc) = self.lower_ident("a goal name")?;
                    self.expect(Tok::Colon)?;
                    let f = self.formula()?;
                    self.expect(Tok::Dot)?;
                    let f = self.finish_closed(f, &name, nl, nc)?;
                    if decls.iter().any(|d| matches!(d, Decl::Goal { .. })) {
                        return Err(syntax_err(nl, nc, "a problem has exactly one goal"));
                    }
                    Decl::Goal { name, formula: f }
                }
                other => {
                    return Err(syntax_err(
                        line,
                        col,
                        format!("expected axiom, rewrite, rewrite+, rewrite-, rule_term or goal, found {other}"),
                    ));
                }
            };
            check_decl_arities(&decl, &mut table, line, col)?;
            decls.push(decl);
        }
        Ok(decls)
    }

    fn finish_closed(
        &self,
        f: Formula,
        name: &str,
        line: usize,
        col: usize,
    ) -> Result<Formula, ParseError> {
        let f = rename_apart(&desugar(&f));
        let free = free_vars_formula(&f);
        if let Some(v) = free.iter().next() {
            return Err(syntax_err(
                line,
                col,
                format!("formula of {name} is not closed: unbound variable {v}"),
            ));
        }
        Ok(f)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.imp()?;
        while self.peek() == Some(&Tok::Equiv) {
            self.bump();
            let r = self.imp()?;
            f = Formula::iff(f, r);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let l = self.disj()?;
        if self.peek() == Some(&Tok::FatArrow) {
            self.bump();
            let r = self.imp()?;
            Ok(Formula::implies(l, r))
        } else {
            Ok(l)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let r = self.conj()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let r = self.unary()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "forall" || s == "exists" => {
                let is_forall = s == "forall";
                self.bump();
                let var = match self.peek() {
                    Some(Tok::UpIdent(v)) => {
                        let v = v.clone();
                        self.bump();
                        v
                    }
                    _ => return Err(self.err_here("expected an uppercase variable after the quantifier")),
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if is_forall {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.bump();
                Ok(Formula::Bottom)
            }
            _ => self.atomic(),
        }
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        let t = self.term()?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "in" || s == "subset" => {
                let pred = s.clone();
                self.bump();
                let u = self.term()?;
                Ok(Formula::Atom(pred, vec![t, u]))
            }
            _ => match t {
                Term::App(p, args) => Ok(Formula::Atom(p, args)),
                Term::Var(v) => Err(self.err_here(format!(
                    "variable {v} cannot stand alone as a formula"
                ))),
                Term::Meta(m) => Err(self.err_here(format!(
                    "metavariable ?{m} cannot stand alone as a formula"
                ))),
            },
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::UpIdent(v)) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Some(Tok::Meta(m)) => {
                if !self.allow_meta {
                    return Err(self.err_here("metavariables are not allowed here"));
                }
                self.bump();
                Ok(Term::Meta(m))
            }
            Some(Tok::Ident(f)) => {
                if RESERVED.contains(&f.as_str()) {
                    return Err(self.err_here(format!("{f} is a reserved word")));
                }
                self.bump();
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    loop {
                        args.push(self.term()?);
                        match self.peek() {
                            Some(Tok::Comma) => {
                                self.bump();
                            }
                            Some(Tok::RParen) => {
                                self.bump();
                                break;
                            }
                            _ => return Err(self.err_here("expected , or ) in argument list")),
                        }
                    }
                }
                Ok(Term::App(f, args))
            }
            Some(t) => Err(self.err_here(format!("expected a term, found {t}"))),
            None => Err(self.err_here("expected a term, found end of input")),
        }
    }

    fn subst(&mut self) -> Result<Subst, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut s = Subst::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.bump();
            return Ok(s);
        }
        loop {
            match self.peek().cloned() {
                Some(Tok::UpIdent(v)) => {
                    self.bump();
                    self.expect(Tok::Arrow)?;
                    let t = self.term()?;
                    s.bind_var(v, t);
                }
                Some(Tok::Meta(m)) => {
                    self.bump();
                    self.expect(Tok::Arrow)?;
                    let t = self.term()?;
                    s.bind_meta(m, t);
                }
                _ => return Err(self.err_here("expected a variable or metavariable binding")),
            }
            match self.peek() {
                Some(Tok::Semi) => {
                    self.bump();
                }
                Some(Tok::RBrace) => {
                    self.bump();
                    return Ok(s);
                }
                _ => return Err(self.err_here("expected ; or } in substitution")),
            }
        }
    }
}

fn check_decl_arities(
    decl: &Decl,
    table: &mut BTreeMap<Sym, (SymKind, usize)>,
    line: usize,
    col: usize,
) -> Result<(), ParseError> {
    let mut seen = BTreeMap::new();
    match decl {
        Decl::Axiom { formula, .. } | Decl::Goal { formula, .. } => {
            collect_symbols(formula, &mut seen)
        }
        Decl::PropRule { lhs, rhs, .. } => {
            collect_symbols(lhs, &mut seen);
            collect_symbols(rhs, &mut seen);
        }
        Decl::TermRule { lhs, rhs, .. } => {
            collect_term_symbols(lhs, &mut seen);
            collect_term_symbols(rhs, &mut seen);
        }
    }
    // A declaration may also use a symbol twice at different arities; catch
    // that by re-walking with the running table, not just the summary.
    let mut check = |sym: &Sym, kind: SymKind, arity: usize| -> Result<(), ParseError> {
        match table.get(sym) {
            None => {
                table.insert(sym.clone(), (kind, arity));
                Ok(())
            }
            Some((k, a)) if *k == kind && *a == arity => Ok(()),
            Some((k, a)) => Err(ParseError::Arity {
                symbol: sym.clone(),
                detail: format!(
                    "declared as {} of arity {a}, used as {} of arity {arity}",
                    kind_name(*k),
                    kind_name(kind)
                ),
                line,
                col,
            }),
        }
    };
    for (sym, (kind, arity)) in &seen {
        check(sym, *kind, *arity)?;
    }
    // Catch intra-declaration clashes that the summary map hides.
    let mut deep: Vec<(Sym, SymKind, usize)> = Vec::new();
    fn walk_f(f: &Formula, out: &mut Vec<(Sym, SymKind, usize)>) {
        match f {
            Formula::Atom(p, args) => {
                out.push((p.clone(), SymKind::Pred, args.len()));
                for a in args {
                    walk_t(a, out);
                }
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => walk_f(g, out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                walk_f(l, out);
                walk_f(r, out);
            }
        }
    }
    fn walk_t(t: &Term, out: &mut Vec<(Sym, SymKind, usize)>) {
        if let Term::App(f, args) = t {
            out.push((f.clone(), SymKind::Func, args.len()));
            for a in args {
                walk_t(a, out);
            }
        }
    }
    match decl {
        Decl::Axiom { formula, .. } | Decl::Goal { formula, .. } => walk_f(formula, &mut deep),
        Decl::PropRule { lhs, rhs, .. } => {
            walk_f(lhs, &mut deep);
            walk_f(rhs, &mut deep);
        }
        Decl::TermRule { lhs, rhs, .. } => {
            walk_t(lhs, &mut deep);
            walk_t(rhs, &mut deep);
        }
    }
    for (sym, kind, arity) in deep {
        check(&sym, kind, arity)?;
    }
    Ok(())
}

fn kind_name(k: SymKind) -> &'static str {
    match k {
        SymKind::Pred => "a predicate",
        SymKind::Func => "a function",
    }
}
