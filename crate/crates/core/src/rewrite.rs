//! Term rewriting and polarized propositional rewriting.
//!
//! Rule sets carry plain term rules plus two propositional rule lists: rules
//! usable at positive occurrences and rules usable at negative occurrences.
//! A two-sided rule appears in both lists under one name. Rewriting of
//! literals is forward-only: terms are normalized first, then the literal
//! itself is rewritten one step at a time, with every single step recorded
//! so a checker can replay it.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{
    free_vars_formula, free_vars_term, metas_of_formula, metas_of_term, polarity_of,
    replace_subformula, replace_subterm, subformula_at, subterm_at, Formula, Polarity, Subst, Sym,
    Term,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {0}: left-hand side must not be a bare variable")]
    VariableLhs(Sym),
    #[error("rule {0}: left-hand side must be an atomic formula")]
    NonAtomicLhs(Sym),
    #[error("rule {0}: right-hand side uses variables not bound by the left-hand side: {1:?}")]
    UnboundRhsVars(Sym, Vec<Sym>),
    #[error("rule {0}: rules must not contain metavariables")]
    MetaInRule(Sym),
    #[error("duplicate rule name {0}")]
    DuplicateName(Sym),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rewrite budget of {budget} single steps exhausted while normalizing {literal}")]
    LimitExceeded { literal: Formula, budget: usize },
}

/// Errors and rejection reasons for checker-side step replay.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("unknown rule {0}")]
    UnknownRule(Sym),
    #[error("step site is invalid: {0}")]
    BadSite(String),
    #[error("left-hand side with the given substitution does not match the site")]
    LhsMismatch,
    #[error("substitution binds names outside the rule variables")]
    ForeignBindings,
    #[error("rule is not usable at a {0} occurrence")]
    PolarityViolation(Polarity),
    #[error("step result differs from the claimed formula")]
    ResultMismatch,
}

/// Where a declared or derived rule came from, for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    Declared,
    Axiom(Sym),
}

impl std::fmt::Display for RuleOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleOrigin::Declared => write!(f, "declared"),
            RuleOrigin::Axiom(name) => write!(f, "axiom {name}"),
        }
    }
}

/// Polarity classification of a propositional rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RulePolarity {
    Positive,
    Negative,
    Both,
}

impl std::fmt::Display for RulePolarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RulePolarity::Positive => write!(f, "pos"),
            RulePolarity::Negative => write!(f, "neg"),
            RulePolarity::Both => write!(f, "both"),
        }
    }
}

/// A term rewrite rule `lhs -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermRule {
    pub name: Sym,
    pub lhs: Term,
    pub rhs: Term,
}

impl TermRule {
    pub fn new(name: impl Into<Sym>, lhs: Term, rhs: Term) -> Result<TermRule, RuleError> {
        let name = name.into();
        if matches!(lhs, Term::Var(_) | Term::Meta(_)) {
            return Err(RuleError::VariableLhs(name));
        }
        if !metas_of_term(&lhs).is_empty() || !metas_of_term(&rhs).is_empty() {
            return Err(RuleError::MetaInRule(name));
        }
        let lv = free_vars_term(&lhs);
        let extra: Vec<Sym> = free_vars_term(&rhs).difference(&lv).cloned().collect();
        if !extra.is_empty() {
            return Err(RuleError::UnboundRhsVars(name, extra));
        }
        Ok(TermRule { name, lhs, rhs })
    }
}

/// A propositional rewrite rule `P -> F` with an atomic left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropRule {
    pub name: Sym,
    pub lhs_pred: Sym,
    pub lhs_args: Vec<Term>,
    pub rhs: Formula,
    pub polarity: RulePolarity,
    pub skolemized: bool,
    pub origin: RuleOrigin,
}

impl PropRule {
    pub fn new(
        name: impl Into<Sym>,
        lhs: &Formula,
        rhs: Formula,
        polarity: RulePolarity,
        origin: RuleOrigin,
    ) -> Result<PropRule, RuleError> {
        let name = name.into();
        let (lhs_pred, lhs_args) = match lhs {
            Formula::Atom(p, args) => (p.clone(), args.clone()),
            _ => return Err(RuleError::NonAtomicLhs(name)),
        };
        let mut lhs_metas = BTreeSet::new();
        for a in &lhs_args {
            lhs_metas.extend(metas_of_term(a));
        }
        if !lhs_metas.is_empty() || !metas_of_formula(&rhs).is_empty() {
            return Err(RuleError::MetaInRule(name));
        }
        let lv = Self::arg_vars(&lhs_args);
        let lv_set: BTreeSet<Sym> = lv.iter().cloned().collect();
        let extra: Vec<Sym> = free_vars_formula(&rhs)
            .difference(&lv_set)
            .cloned()
            .collect();
        if !extra.is_empty() {
            return Err(RuleError::UnboundRhsVars(name, extra));
        }
        Ok(PropRule {
            name,
            lhs_pred,
            lhs_args,
            rhs,
            polarity,
            skolemized: false,
            origin,
        })
    }

    fn arg_vars(args: &[Term]) -> Vec<Sym> {
        let mut out = Vec::new();
        fn walk(t: &Term, out: &mut Vec<Sym>) {
            match t {
                Term::Var(x) => {
                    if !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Term::Meta(_) => {}
                Term::App(_, args) => {
                    for a in args {
                        walk(a, out);
                    }
                }
            }
        }
        for a in args {
            walk(a, &mut out);
        }
        out
    }

    /// Left-hand-side variables in order of first occurrence.
    pub fn lhs_vars(&self) -> Vec<Sym> {
        Self::arg_vars(&self.lhs_args)
    }

    pub fn lhs_formula(&self) -> Formula {
        Formula::Atom(self.lhs_pred.clone(), self.lhs_args.clone())
    }
}

/// Term rules plus the positive and negative propositional rule lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub term_rules: Vec<TermRule>,
    pub pos_rules: Vec<PropRule>,
    pub neg_rules: Vec<PropRule>,
}

impl RuleSet {
    pub fn new() -> RuleSet {
        RuleSet::default()
    }

    pub fn is_empty(&self) -> bool {
        self.term_rules.is_empty() && self.pos_rules.is_empty() && self.neg_rules.is_empty()
    }

    pub fn prop_rules(&self, side: Polarity) -> &[PropRule] {
        match side {
            Polarity::Positive => &self.pos_rules,
            Polarity::Negative => &self.neg_rules,
        }
    }

    pub fn find_term(&self, name: &str) -> Option<&TermRule> {
        self.term_rules.iter().find(|r| r.name == name)
    }

    pub fn find_prop(&self, name: &str, side: Polarity) -> Option<&PropRule> {
        self.prop_rules(side).iter().find(|r| r.name == name)
    }

    /// Names must be unique, except that a two-sided rule carries the same
    /// name in both propositional lists.
    pub fn validate_names(&self) -> Result<(), RuleError> {
        let mut seen = BTreeSet::new();
        for r in &self.term_rules {
            if !seen.insert(r.name.clone()) {
                return Err(RuleError::DuplicateName(r.name.clone()));
            }
        }
        for r in &self.pos_rules {
            if !seen.insert(r.name.clone()) {
                return Err(RuleError::DuplicateName(r.name.clone()));
            }
        }
        for r in &self.neg_rules {
            if seen.contains(&r.name) {
                let paired = self.pos_rules.iter().any(|p| p.name == r.name);
                if !paired || self.neg_rules.iter().filter(|n| n.name == r.name).count() > 1 {
                    return Err(RuleError::DuplicateName(r.name.clone()));
                }
            } else {
                seen.insert(r.name.clone());
            }
        }
        Ok(())
    }

    /// One line per rule: `name: polarity: lhs -> rhs (origin)`.
    pub fn render_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.term_rules {
            out.push(format!("{}: term: {} -> {} (declared)", r.name, r.lhs, r.rhs));
        }
        for r in &self.pos_rules {
            out.push(format!(
                "{}: pos: {} -> {} ({})",
                r.name,
                r.lhs_formula(),
                r.rhs,
                r.origin
            ));
        }
        for r in &self.neg_rules {
            out.push(format!(
                "{}: neg: {} -> {} ({})",
                r.name,
                r.lhs_formula(),
                r.rhs,
                r.origin
            ));
        }
        out
    }

    /// All function symbols introduced by rule right-hand sides but absent
    /// from their left-hand sides (in practice: rule Skolem symbols).
    pub fn introduced_symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        for r in self.pos_rules.iter().chain(&self.neg_rules) {
            let mut lhs_syms = std::collections::BTreeMap::new();
            for a in &r.lhs_args {
                crate::syntax::symbols_of_term(a, &mut lhs_syms);
            }
            let mut rhs_syms = std::collections::BTreeMap::new();
            crate::syntax::symbols_of_formula(&r.rhs, &mut rhs_syms);
            for s in rhs_syms.keys() {
                if !lhs_syms.contains_key(s) {
                    out.insert(s.clone());
                }
            }
        }
        out
    }
}

/// First-order matching of a rule pattern against a target term.
///
/// Pattern variables bind; metavariables in the target are opaque constants
/// (they may appear in the range of the result but are never instantiated).
pub fn match_term_pattern(pattern: &Term, target: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    if match_term_into(pattern, target, &mut s) {
        Some(s)
    } else {
        None
    }
}

fn match_term_into(pattern: &Term, target: &Term, s: &mut Subst) -> bool {
    match pattern {
        Term::Var(x) => match s.var(x) {
            Some(bound) => bound == target,
            None => {
                s.bind_var(x.clone(), target.clone());
                true
            }
        },
        // Rules never contain metavariables; a meta pattern only matches itself.
        Term::Meta(m) => matches!(target, Term::Meta(n) if n == m),
        Term::App(f, args) => match target {
            Term::App(g, targs) if f == g && args.len() == targs.len() => args
                .iter()
                .zip(targs)
                .all(|(p, t)| match_term_into(p, t, s)),
            _ => false,
        },
    }
}

/// Match an atomic rule head against an atom.
pub fn match_atom_pattern(
    lhs_pred: &str,
    lhs_args: &[Term],
    pred: &str,
    args: &[Term],
) -> Option<Subst> {
    if lhs_pred != pred || lhs_args.len() != args.len() {
        return None;
    }
    let mut s = Subst::new();
    for (p, t) in lhs_args.iter().zip(args) {
        if !match_term_into(p, t, &mut s) {
            return None;
        }
    }
    Some(s)
}

/// Identifies which rule list a recorded step drew from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepRule {
    Term(Sym),
    Prop(Sym, Polarity),
}

/// One recorded single rewrite step, replayable by the checker.
///
/// `path` addresses the rewritten atom inside the formula the step applies
/// to; `term_path` (term steps only) addresses the redex inside that atom's
/// arguments, starting with the argument index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: StepRule,
    pub path: Vec<usize>,
    pub term_path: Option<Vec<usize>>,
    pub subst: Subst,
}

/// Rewrite the leftmost-innermost term redex, if any.
pub fn rewrite_term_once(t: &Term, rules: &RuleSet) -> Option<(Term, Sym, Vec<usize>, Subst)> {
    fn descend(t: &Term, rules: &RuleSet) -> Option<(Vec<usize>, Sym, Subst, Term)> {
        if let Term::App(_, args) = t {
            for (i, a) in args.iter().enumerate() {
                if let Some((mut path, rule, s, new_sub)) = descend(a, rules) {
                    path.insert(0, i);
                    return Some((path, rule, s, new_sub));
                }
            }
        }
        for rule in &rules.term_rules {
            if let Some(s) = match_term_pattern(&rule.lhs, t) {
                let new_sub = s.apply_term(&rule.rhs);
                return Some((Vec::new(), rule.name.clone(), s, new_sub));
            }
        }
        None
    }
    let (path, rule, s, new_sub) = descend(t, rules)?;
    let rewritten = replace_subterm(t, &path, new_sub).expect("redex path is valid");
    Some((rewritten, rule, path, s))
}

fn literal_atom(lit: &Formula) -> Option<(&Sym, &Vec<Term>, bool)> {
    match lit {
        Formula::Atom(p, args) => Some((p, args, false)),
        Formula::Not(inner) => match &**inner {
            Formula::Atom(p, args) => Some((p, args, true)),
            _ => None,
        },
        _ => None,
    }
}

/// Normalize every term inside a literal, recording each single step.
/// Fails when the shared budget runs out with a redex still present.
pub fn normalize_terms(
    lit: &Formula,
    rules: &RuleSet,
    budget: &mut usize,
    budget_total: usize,
    steps: &mut Vec<RewriteStep>,
) -> Result<Formula, RewriteError> {
    debug_assert!(lit.is_literal());
    let mut cur = lit.clone();
    loop {
        let (pred, args, negated) = match literal_atom(&cur) {
            Some(x) => x,
            None => return Ok(cur),
        };
        let atom_path: Vec<usize> = if negated { vec![0] } else { vec![] };
        let mut found = None;
        for (i, a) in args.iter().enumerate() {
            if let Some((new_arg, rule, mut tpath, s)) = rewrite_term_once(a, rules) {
                tpath.insert(0, i);
                found = Some((i, new_arg, rule, tpath, s));
                break;
            }
        }
        let (i, new_arg, rule, tpath, s) = match found {
            Some(x) => x,
            None => return Ok(cur),
        };
        if *budget == 0 {
            return Err(RewriteError::LimitExceeded {
                literal: lit.clone(),
                budget: budget_total,
            });
        }
        *budget -= 1;
        let mut new_args = args.clone();
        new_args[i] = new_arg;
        let new_atom = Formula::Atom(pred.clone(), new_args);
        steps.push(RewriteStep {
            rule: StepRule::Term(rule),
            path: atom_path,
            term_path: Some(tpath),
            subst: s,
        });
        cur = if negated { Formula::not(new_atom) } else { new_atom };
    }
}

/// One propositional step on a literal: a positive literal is rewritten with
/// the first matching positive rule, a negated one with the first matching
/// negative rule (the result stays under the negation).
pub fn rewrite_literal_once(lit: &Formula, rules: &RuleSet) -> Option<(Formula, RewriteStep)> {
    let (pred, args, negated) = literal_atom(lit)?;
    let side = if negated {
        Polarity::Negative
    } else {
        Polarity::Positive
    };
    for rule in rules.prop_rules(side) {
        if let Some(s) = match_atom_pattern(&rule.lhs_pred, &rule.lhs_args, pred, args) {
            let body = s.apply_formula(&rule.rhs);
            let (result, path) = if negated {
                (Formula::not(body), vec![0])
            } else {
                (body, vec![])
            };
            let step = RewriteStep {
                rule: StepRule::Prop(rule.name.clone(), side),
                path,
                term_path: None,
                subst: s,
            };
            return Some((result, step));
        }
    }
    None
}

/// Result of [`normalize_literal`]: the final formula plus the ordered step
/// log that takes the input there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub result: Formula,
    pub steps: Vec<RewriteStep>,
}

/// The forward literal-normalization loop: normalize terms, rewrite the
/// literal one step, stop as soon as the result is compound or in normal
/// form, otherwise repeat. `true`/`false` results stop the loop like
/// compound formulas do.
pub fn normalize_literal(
    lit: &Formula,
    rules: &RuleSet,
    budget: usize,
) -> Result<Normalized, RewriteError> {
    debug_assert!(lit.is_literal());
    let total = budget;
    let mut remaining = budget;
    let mut steps = Vec::new();
    let mut cur = lit.clone();
    loop {
        cur = normalize_terms(&cur, rules, &mut remaining, total, &mut steps)?;
        match rewrite_literal_once(&cur, rules) {
            None => break,
            Some((next, step)) => {
                if remaining == 0 {
                    return Err(RewriteError::LimitExceeded {
                        literal: lit.clone(),
                        budget: total,
                    });
                }
                remaining -= 1;
                steps.push(step);
                cur = next;
                if !cur.is_literal() {
                    break;
                }
            }
        }
    }
    Ok(Normalized { result: cur, steps })
}

/// Apply one recorded step to `before`, checking that the named rule exists,
/// that the substitution reproduces the site exactly, and that the
/// occurrence polarity admits the rule. `asserted` is the polarity at which
/// `before` itself is used (formulas on a tableau branch are positive).
pub fn apply_rewrite_step(
    rules: &RuleSet,
    before: &Formula,
    asserted: Polarity,
    step: &RewriteStep,
) -> Result<Formula, StepError> {
    let site = subformula_at(before, &step.path)
        .map_err(|e| StepError::BadSite(e.to_string()))?
        .clone();
    let mut occ = polarity_of(before, &step.path).map_err(|e| StepError::BadSite(e.to_string()))?;
    if asserted == Polarity::Negative {
        occ = occ.flip();
    }

    let (pred, args) = match &site {
        Formula::Atom(p, a) => (p, a),
        _ => return Err(StepError::BadSite("step site is not an atom".to_string())),
    };

    match &step.rule {
        StepRule::Term(name) => {
            let rule = rules
                .find_term(name)
                .ok_or_else(|| StepError::UnknownRule(name.clone()))?;
            let tpath = step
                .term_path
                .as_ref()
                .ok_or_else(|| StepError::BadSite("term step without a term path".to_string()))?;
            if tpath.is_empty() {
                return Err(StepError::BadSite(
                    "term path must select an argument".to_string(),
                ));
            }
            check_subst_domain(&step.subst, &free_vars_term(&rule.lhs))?;
            let arg = args
                .get(tpath[0])
                .ok_or_else(|| StepError::BadSite("no such argument".to_string()))?;
            let redex = subterm_at(arg, &tpath[1..]).map_err(|e| StepError::BadSite(e.to_string()))?;
            if *redex != step.subst.apply_term(&rule.lhs) {
                return Err(StepError::LhsMismatch);
            }
            let new_arg = replace_subterm(arg, &tpath[1..], step.subst.apply_term(&rule.rhs))
                .map_err(|e| StepError::BadSite(e.to_string()))?;
            let mut new_args = args.clone();
            new_args[tpath[0]] = new_arg;
            let new_atom = Formula::Atom(pred.clone(), new_args);
            replace_subformula(before, &step.path, new_atom)
                .map_err(|e| StepError::BadSite(e.to_string()))
        }
        StepRule::Prop(name, side) => {
            if step.term_path.is_some() {
                return Err(StepError::BadSite(
                    "propositional step carries a term path".to_string(),
                ));
            }
            let rule = rules
                .find_prop(name, *side)
                .ok_or_else(|| StepError::UnknownRule(name.clone()))?;
            if occ != *side {
                return Err(StepError::PolarityViolation(occ));
            }
            let lhs_vars: BTreeSet<Sym> = rule.lhs_vars().into_iter().collect();
            check_subst_domain(&step.subst, &lhs_vars)?;
            let expect = step.subst.apply_formula(&rule.lhs_formula());
            if site != expect {
                return Err(StepError::LhsMismatch);
            }
            let replacement = step.subst.apply_formula(&rule.rhs);
            replace_subformula(before, &step.path, replacement)
                .map_err(|e| StepError::BadSite(e.to_string()))
        }
    }
}

fn check_subst_domain(s: &Subst, allowed: &BTreeSet<Sym>) -> Result<(), StepError> {
    if s.metas().next().is_some() {
        return Err(StepError::ForeignBindings);
    }
    if s.var_domain().iter().any(|v| !allowed.contains(v)) {
        return Err(StepError::ForeignBindings);
    }
    Ok(())
}

/// Accept iff replaying `step` on `before` yields exactly `after`.
pub fn verify_rewrite_step(
    rules: &RuleSet,
    before: &Formula,
    asserted: Polarity,
    step: &RewriteStep,
    after: &Formula,
) -> Result<(), StepError> {
    let got = apply_rewrite_step(rules, before, asserted, step)?;
    if got == *after {
        Ok(())
    } else {
        Err(StepError::ResultMismatch)
    }
}
