//! First-order terms and formulas, substitutions, polarity of occurrences,
//! and fresh-name generation.
//!
//! Everything in this module is immutable after construction. The only
//! mutable state is [`NameGen`], which hands out fresh symbols and
//! metavariable ids; one generator is confined to one prover run.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Symbol, variable and predicate names.
pub type Sym = String;

/// Metavariable identifier, unique within one prover run.
pub type MetaId = usize;

/// Path of child indices addressing a subformula; the empty path is the root.
pub type Position = Vec<usize>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("invalid position {0:?}: {1}")]
    InvalidPosition(Position, String),
}

/// A first-order term. Constants are 0-ary applications.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Sym),
    Meta(MetaId),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<Sym>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

/// A first-order formula. `Iff` is parse-level sugar and is removed by
/// [`desugar`] before anything downstream looks at the formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Sym, Vec<Term>),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Sym, Box<Formula>),
    Exists(Sym, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }
    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }
    pub fn forall(x: impl Into<Sym>, f: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(f))
    }
    pub fn exists(x: impl Into<Sym>, f: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(f))
    }

    /// A literal is an atom or a negated atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(..)),
            _ => false,
        }
    }

    pub fn contains_iff(&self) -> bool {
        match self {
            Formula::Iff(..) => true,
            Formula::Atom(..) | Formula::Top | Formula::Bottom => false,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.contains_iff(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.contains_iff() || r.contains_iff()
            }
        }
    }
}

/// Polarity of a formula occurrence: the parity of negations and
/// implication left branches above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Positive => write!(f, "pos"),
            Polarity::Negative => write!(f, "neg"),
        }
    }
}

fn formula_children(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Atom(..) | Formula::Top | Formula::Bottom => Vec::new(),
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => vec![g],
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            vec![l, r]
        }
    }
}

/// The subformula of `f` addressed by `path`.
pub fn subformula_at<'a>(f: &'a Formula, path: &[usize]) -> Result<&'a Formula, SyntaxError> {
    let mut cur = f;
    for (depth, &i) in path.iter().enumerate() {
        let children = formula_children(cur);
        cur = children.get(i).copied().ok_or_else(|| {
            SyntaxError::InvalidPosition(path.to_vec(), format!("no child {i} at depth {depth}"))
        })?;
    }
    Ok(cur)
}

/// Polarity of the subformula occurrence addressed by `path` in `f`.
///
/// Positive iff the number of flips (under a negation, left of an
/// implication) along the path is even. Positions through `Iff` are
/// rejected; desugar first.
pub fn polarity_of(f: &Formula, path: &[usize]) -> Result<Polarity, SyntaxError> {
    let mut cur = f;
    let mut pol = Polarity::Positive;
    for (depth, &i) in path.iter().enumerate() {
        let bad = |msg: &str| SyntaxError::InvalidPosition(path.to_vec(), msg.to_string());
        match cur {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => {
                return Err(bad("position addresses a term"));
            }
            Formula::Iff(..) => {
                return Err(bad("polarity is undefined through an equivalence"));
            }
            Formula::Not(g) => {
                if i != 0 {
                    return Err(bad("negation has a single child"));
                }
                pol = pol.flip();
                cur = g;
            }
            Formula::Forall(_, g) | Formula::Exists(_, g) => {
                if i != 0 {
                    return Err(bad("quantifier has a single child"));
                }
                cur = g;
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                cur = match i {
                    0 => l,
                    1 => r,
                    _ => return Err(bad("binary connective has two children")),
                };
            }
            Formula::Implies(l, r) => {
                cur = match i {
                    0 => {
                        pol = pol.flip();
                        l
                    }
                    1 => r,
                    _ => return Err(bad("implication has two children")),
                };
            }
        }
        let _ = depth;
    }
    Ok(pol)
}

/// Replace the subformula at `path` with `repl`.
pub fn replace_subformula(
    f: &Formula,
    path: &[usize],
    repl: Formula,
) -> Result<Formula, SyntaxError> {
    if path.is_empty() {
        return Ok(repl);
    }
    let i = path[0];
    let rest = &path[1..];
    let bad = || SyntaxError::InvalidPosition(path.to_vec(), "no such child".to_string());
    let out = match f {
        Formula::Atom(..) | Formula::Top | Formula::Bottom => return Err(bad()),
        Formula::Not(g) if i == 0 => Formula::not(replace_subformula(g, rest, repl)?),
        Formula::Forall(x, g) if i == 0 => {
            Formula::forall(x.clone(), replace_subformula(g, rest, repl)?)
        }
        Formula::Exists(x, g) if i == 0 => {
            Formula::exists(x.clone(), replace_subformula(g, rest, repl)?)
        }
        Formula::And(l, r) if i < 2 => {
            if i == 0 {
                Formula::and(replace_subformula(l, rest, repl)?, (**r).clone())
            } else {
                Formula::and((**l).clone(), replace_subformula(r, rest, repl)?)
            }
        }
        Formula::Or(l, r) if i < 2 => {
            if i == 0 {
                Formula::or(replace_subformula(l, rest, repl)?, (**r).clone())
            } else {
                Formula::or((**l).clone(), replace_subformula(r, rest, repl)?)
            }
        }
        Formula::Implies(l, r) if i < 2 => {
            if i == 0 {
                Formula::implies(replace_subformula(l, rest, repl)?, (**r).clone())
            } else {
                Formula::implies((**l).clone(), replace_subformula(r, rest, repl)?)
            }
        }
        Formula::Iff(l, r) if i < 2 => {
            if i == 0 {
                Formula::iff(replace_subformula(l, rest, repl)?, (**r).clone())
            } else {
                Formula::iff((**l).clone(), replace_subformula(r, rest, repl)?)
            }
        }
        _ => return Err(bad()),
    };
    Ok(out)
}

/// The subterm of `t` addressed by a path of argument indices.
pub fn subterm_at<'a>(t: &'a Term, path: &[usize]) -> Result<&'a Term, SyntaxError> {
    let mut cur = t;
    for &i in path {
        match cur {
            Term::App(_, args) => {
                cur = args.get(i).ok_or_else(|| {
                    SyntaxError::InvalidPosition(path.to_vec(), "no such argument".to_string())
                })?;
            }
            _ => {
                return Err(SyntaxError::InvalidPosition(
                    path.to_vec(),
                    "path descends into a leaf term".to_string(),
                ))
            }
        }
    }
    Ok(cur)
}

/// Replace the subterm at `path` with `repl`.
pub fn replace_subterm(t: &Term, path: &[usize], repl: Term) -> Result<Term, SyntaxError> {
    if path.is_empty() {
        return Ok(repl);
    }
    match t {
        Term::App(f, args) => {
            let i = path[0];
            if i >= args.len() {
                return Err(SyntaxError::InvalidPosition(
                    path.to_vec(),
                    "no such argument".to_string(),
                ));
            }
            let mut new_args = args.clone();
            new_args[i] = replace_subterm(&args[i], &path[1..], repl)?;
            Ok(Term::App(f.clone(), new_args))
        }
        _ => Err(SyntaxError::InvalidPosition(
            path.to_vec(),
            "path descends into a leaf term".to_string(),
        )),
    }
}

/// A simultaneous substitution over variables and metavariables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    vars: BTreeMap<Sym, Term>,
    metas: BTreeMap<MetaId, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.metas.is_empty()
    }

    pub fn bind_var(&mut self, x: impl Into<Sym>, t: Term) {
        let x = x.into();
        debug_assert!(!free_vars_term(&t).contains(&x), "occurs check violated");
        self.vars.insert(x, t);
    }

    pub fn bind_meta(&mut self, m: MetaId, t: Term) {
        debug_assert!(!metas_of_term(&t).contains(&m), "occurs check violated");
        self.metas.insert(m, t);
    }

    pub fn var(&self, x: &str) -> Option<&Term> {
        self.vars.get(x)
    }

    pub fn meta(&self, m: MetaId) -> Option<&Term> {
        self.metas.get(&m)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&Sym, &Term)> {
        self.vars.iter()
    }

    pub fn metas(&self) -> impl Iterator<Item = (MetaId, &Term)> {
        self.metas.iter().map(|(m, t)| (*m, t))
    }

    pub fn var_domain(&self) -> BTreeSet<Sym> {
        self.vars.keys().cloned().collect()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.vars.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::Meta(m) => self.metas.get(m).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect())
            }
        }
    }

    /// Capture-avoiding application: bound variables are renamed when a
    /// binder would capture a variable free in the substitution's range.
    pub fn apply_formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|a| self.apply_term(a)).collect())
            }
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Not(g) => Formula::not(self.apply_formula(g)),
            Formula::And(l, r) => Formula::and(self.apply_formula(l), self.apply_formula(r)),
            Formula::Or(l, r) => Formula::or(self.apply_formula(l), self.apply_formula(r)),
            Formula::Implies(l, r) => {
                Formula::implies(self.apply_formula(l), self.apply_formula(r))
            }
            Formula::Iff(l, r) => Formula::iff(self.apply_formula(l), self.apply_formula(r)),
            Formula::Forall(x, g) => self.apply_binder(x, g, Formula::forall),
            Formula::Exists(x, g) => self.apply_binder(x, g, Formula::exists),
        }
    }

    fn apply_binder(
        &self,
        x: &Sym,
        body: &Formula,
        rebuild: fn(Sym, Formula) -> Formula,
    ) -> Formula {
        // The binder shadows any binding for its own variable.
        let mut inner = self.clone();
        inner.vars.remove(x);

        // Rename the binder when some remaining binding that is live in the
        // body would bring `x` into scope.
        let body_free = free_vars_formula(body);
        let capture = inner
            .vars
            .iter()
            .any(|(v, t)| v != x && body_free.contains(v) && free_vars_term(t).contains(x));
        if !capture {
            return rebuild(x.clone(), inner.apply_formula(body));
        }

        let mut avoid: BTreeSet<Sym> = body_free;
        for t in inner.vars.values() {
            avoid.extend(free_vars_term(t));
        }
        let fresh = pick_variant(x, &avoid);
        let mut rename = Subst::new();
        rename.bind_var(x.clone(), Term::Var(fresh.clone()));
        let renamed = rename.apply_formula(body);
        rebuild(fresh, inner.apply_formula(&renamed))
    }
}

fn pick_variant(base: &str, avoid: &BTreeSet<Sym>) -> Sym {
    for k in 1.. {
        let cand = format!("{base}{k}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Strip a quantifier and substitute `witness` for its bound variable.
pub fn instantiate(var: &Sym, body: &Formula, witness: &Term) -> Formula {
    let mut s = Subst::new();
    s.bind_var(var.clone(), witness.clone());
    s.apply_formula(body)
}

pub fn free_vars_term(t: &Term) -> BTreeSet<Sym> {
    let mut out = BTreeSet::new();
    collect_term_vars(t, &mut out);
    out
}

fn collect_term_vars(t: &Term, out: &mut BTreeSet<Sym>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Meta(_) => {}
        Term::App(_, args) => {
            for a in args {
                collect_term_vars(a, out);
            }
        }
    }
}

pub fn free_vars_formula(f: &Formula) -> BTreeSet<Sym> {
    fn walk(f: &Formula, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
        match f {
            Formula::Atom(_, args) => {
                for a in args {
                    for v in free_vars_term(a) {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(g) => walk(g, bound, out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                walk(l, bound, out);
                walk(r, bound, out);
            }
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                bound.push(x.clone());
                walk(g, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

pub fn metas_of_term(t: &Term) -> BTreeSet<MetaId> {
    let mut out = BTreeSet::new();
    fn walk(t: &Term, out: &mut BTreeSet<MetaId>) {
        match t {
            Term::Var(_) => {}
            Term::Meta(m) => {
                out.insert(*m);
            }
            Term::App(_, args) => {
                for a in args {
                    walk(a, out);
                }
            }
        }
    }
    walk(t, &mut out);
    out
}

pub fn metas_of_formula(f: &Formula) -> BTreeSet<MetaId> {
    let mut out = BTreeSet::new();
    fn walk(f: &Formula, out: &mut BTreeSet<MetaId>) {
        match f {
            Formula::Atom(_, args) => {
                for a in args {
                    out.extend(metas_of_term(a));
                }
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => walk(g, out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                walk(l, out);
                walk(r, out);
            }
        }
    }
    walk(f, &mut out);
    out
}

/// Function symbols occurring in a term, with arity.
pub fn symbols_of_term(t: &Term, out: &mut BTreeMap<Sym, usize>) {
    match t {
        Term::Var(_) | Term::Meta(_) => {}
        Term::App(f, args) => {
            out.insert(f.clone(), args.len());
            for a in args {
                symbols_of_term(a, out);
            }
        }
    }
}

/// Function symbols occurring anywhere in a formula, with arity.
pub fn symbols_of_formula(f: &Formula, out: &mut BTreeMap<Sym, usize>) {
    match f {
        Formula::Atom(_, args) => {
            for a in args {
                symbols_of_term(a, out);
            }
        }
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => {
            symbols_of_formula(g, out)
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            symbols_of_formula(l, out);
            symbols_of_formula(r, out);
        }
    }
}

/// Replace every `Iff(A, B)` with `And(Implies(A, B), Implies(B, A))`.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(g) => Formula::not(desugar(g)),
        Formula::And(l, r) => Formula::and(desugar(l), desugar(r)),
        Formula::Or(l, r) => Formula::or(desugar(l), desugar(r)),
        Formula::Implies(l, r) => Formula::implies(desugar(l), desugar(r)),
        Formula::Iff(l, r) => {
            let l = desugar(l);
            let r = desugar(r);
            Formula::and(
                Formula::implies(l.clone(), r.clone()),
                Formula::implies(r, l),
            )
        }
        Formula::Forall(x, g) => Formula::forall(x.clone(), desugar(g)),
        Formula::Exists(x, g) => Formula::exists(x.clone(), desugar(g)),
    }
}

/// Rename bound variables apart so every binder in the formula uses a
/// distinct name, also distinct from every free variable.
pub fn rename_apart(f: &Formula) -> Formula {
    fn walk(f: &Formula, env: &mut Vec<(Sym, Sym)>, used: &mut BTreeSet<Sym>) -> Formula {
        match f {
            Formula::Atom(p, args) => {
                let args = args.iter().map(|t| rename_term(t, env)).collect();
                Formula::Atom(p.clone(), args)
            }
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Not(g) => Formula::not(walk(g, env, used)),
            Formula::And(l, r) => Formula::and(walk(l, env, used), walk(r, env, used)),
            Formula::Or(l, r) => Formula::or(walk(l, env, used), walk(r, env, used)),
            Formula::Implies(l, r) => Formula::implies(walk(l, env, used), walk(r, env, used)),
            Formula::Iff(l, r) => Formula::iff(walk(l, env, used), walk(r, env, used)),
            Formula::Forall(x, g) => {
                let (fresh, body) = binder(x, g, env, used);
                Formula::forall(fresh, body)
            }
            Formula::Exists(x, g) => {
                let (fresh, body) = binder(x, g, env, used);
                Formula::exists(fresh, body)
            }
        }
    }

    fn binder(
        x: &Sym,
        body: &Formula,
        env: &mut Vec<(Sym, Sym)>,
        used: &mut BTreeSet<Sym>,
    ) -> (Sym, Formula) {
        let fresh = if used.contains(x) {
            pick_variant(x, used)
        } else {
            x.clone()
        };
        used.insert(fresh.clone());
        env.push((x.clone(), fresh.clone()));
        let body = walk(body, env, used);
        env.pop();
        (fresh, body)
    }

    fn rename_term(t: &Term, env: &[(Sym, Sym)]) -> Term {
        match t {
            Term::Var(x) => {
                for (old, new) in env.iter().rev() {
                    if old == x {
                        return Term::Var(new.clone());
                    }
                }
                t.clone()
            }
            Term::Meta(m) => Term::Meta(*m),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| rename_term(a, env)).collect(),
            ),
        }
    }

    let mut used = free_vars_formula(f);
    walk(f, &mut Vec::new(), &mut used)
}

/// Alpha-equality of terms under a stack of paired binders.
fn alpha_eq_term(a: &Term, b: &Term, env: &[(Sym, Sym)]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                match (l == x, r == y) {
                    (true, true) => return true,
                    (false, false) => continue,
                    _ => return false,
                }
            }
            x == y
        }
        (Term::Meta(m), Term::Meta(n)) => m == n,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_term(x, y, env))
        }
        _ => false,
    }
}

fn alpha_eq_inner(a: &Formula, b: &Formula, env: &mut Vec<(Sym, Sym)>) -> bool {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_term(x, y, env))
        }
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Not(x), Formula::Not(y)) => alpha_eq_inner(x, y, env),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Implies(a1, a2), Formula::Implies(b1, b2))
        | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => {
            alpha_eq_inner(a1, b1, env) && alpha_eq_inner(a2, b2, env)
        }
        (Formula::Forall(x, f), Formula::Forall(y, g))
        | (Formula::Exists(x, f), Formula::Exists(y, g)) => {
            env.push((x.clone(), y.clone()));
            let ok = alpha_eq_inner(f, g, env);
            env.pop();
            ok
        }
        _ => false,
    }
}

/// Equality of formulas up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_eq_inner(a, b, &mut Vec::new())
}

/// Fresh-symbol and metavariable-id generator. Names never collide with
/// reserved names or with anything the generator produced earlier.
#[derive(Clone, Debug, Default)]
pub struct NameGen {
    used: BTreeSet<Sym>,
    next_meta: MetaId,
}

impl NameGen {
    pub fn new() -> NameGen {
        NameGen::default()
    }

    pub fn with_reserved<I: IntoIterator<Item = Sym>>(names: I) -> NameGen {
        NameGen {
            used: names.into_iter().collect(),
            next_meta: 0,
        }
    }

    pub fn reserve(&mut self, name: impl Into<Sym>) {
        self.used.insert(name.into());
    }

    pub fn fresh_symbol(&mut self, base: &str) -> Sym {
        for k in 1usize.. {
            let cand = format!("{base}{k}");
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
        }
        unreachable!()
    }

    pub fn fresh_meta(&mut self) -> MetaId {
        let m = self.next_meta;
        self.next_meta += 1;
        m
    }
}

// Canonical printing. Binary connectives, quantifiers, and the infix set
// predicates self-parenthesize, so the grammar round-trips without
// precedence decisions.

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Meta(m) => write!(f, "?{m}"),
            Term::App(g, args) => {
                write!(f, "{g}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p, args) if (p == "in" || p == "subset") && args.len() == 2 => {
                write!(f, "({} {} {})", args[0], p, args[1])
            }
            Formula::Atom(p, args) => {
                write!(f, "{p}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Top => write!(f, "true"),
            Formula::Bottom => write!(f, "false"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Implies(l, r) => write!(f, "({l} => {r})"),
            Formula::Iff(l, r) => write!(f, "({l} <=> {r})"),
            Formula::Forall(x, g) => write!(f, "(forall {x}. {g})"),
            Formula::Exists(x, g) => write!(f, "(exists {x}. {g})"),
        }
    }
}
