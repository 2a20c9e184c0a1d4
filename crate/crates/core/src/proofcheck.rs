//! Independent validation of proof traces.
//!
//! The checker trusts only the problem file: it re-parses and
//! re-preprocesses it under the mode recorded in the trace, then replays
//! every record against the rule schemas. It shares the syntax and rewrite
//! primitives with the prover but none of its search code.
//!
//! Validated per trace: the root premises are exactly the residual axioms
//! plus the negated goal; every expansion matches its labeled rule schema
//! applied to a formula on its own branch; every witness symbol is globally
//! fresh and parameterized by the metavariables of its target; every
//! metavariable introduction is fresh; every rewrite node replays step by
//! step with compatible polarities; and every leaf closes under the global
//! assignment.

use std::collections::BTreeSet;
use std::collections::HashSet;
use std::collections::VecDeque;

use thiserror::Error;

use crate::parser::Problem;
use crate::preprocess::{preprocess_problem, PreprocessError, PreprocessOptions};
use crate::rewrite::{
    apply_rewrite_step, match_atom_pattern, match_term_pattern, RewriteStep, RuleSet, StepRule,
};
use crate::syntax::{
    alpha_eq, free_vars_formula, instantiate, metas_of_formula, metas_of_term, replace_subterm,
    subterm_at, symbols_of_formula, symbols_of_term, Formula, MetaId, NameGen, Polarity,
    Sym, Term,
};
use crate::trace::{
    BetaSide, ClosureKind, FormulaRef, NodeDetail, ProofTrace, RuleLabel, TraceNode,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid { node: usize, reason: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("malformed trace: {0}")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("reconstruction failed at node {node}: {reason}")]
    Failed { node: usize, reason: String },
    #[error("malformed trace: {0}")]
    Malformed(String),
}

fn invalid(node: usize, reason: impl Into<String>) -> Verdict {
    Verdict::Invalid {
        node,
        reason: reason.into(),
    }
}

struct Checker<'a> {
    trace: &'a ProofTrace,
    rules: RuleSet,
    premises: Vec<Formula>,
    children: Vec<Vec<usize>>,
    /// Function symbols that exist before the proof starts.
    base_symbols: BTreeSet<Sym>,
    /// Symbols and metavariables seen in nodes processed so far.
    seen_symbols: BTreeSet<Sym>,
    seen_metas: BTreeSet<MetaId>,
    witness_symbols: BTreeSet<Sym>,
}

/// Re-derive the rule set and premises from the problem under the trace's
/// recorded mode, then validate the whole trace.
pub fn check_proof(problem: &Problem, trace: &ProofTrace) -> Result<Verdict, CheckError> {
    let opts = PreprocessOptions {
        polarize: trace.polarize,
        skolemize_rules: trace.skolemize,
        orient_axioms: trace.orient,
    };
    let mut gen = NameGen::with_reserved(problem.signature_symbols());
    let prep = preprocess_problem(problem, &opts, &mut gen)?;

    let mut premises: Vec<Formula> = prep.residual.iter().map(|(_, f)| f.clone()).collect();
    premises.push(prep.negated_goal.clone());

    let mut base_symbols = problem.signature_symbols();
    base_symbols.extend(prep.rules.introduced_symbols());

    let children = structure(trace)?;
    let mut checker = Checker {
        trace,
        rules: prep.rules,
        premises,
        children,
        base_symbols,
        seen_symbols: BTreeSet::new(),
        seen_metas: BTreeSet::new(),
        witness_symbols: BTreeSet::new(),
    };
    Ok(checker.run())
}

/// Structural pass: parents form a tree in id order, references point at
/// existing formulas of earlier nodes.
fn structure(trace: &ProofTrace) -> Result<Vec<Vec<usize>>, CheckError> {
    if trace.nodes.is_empty() {
        return Err(CheckError::Malformed("trace has no nodes".into()));
    }
    let mut children = vec![Vec::new(); trace.nodes.len()];
    for (id, node) in trace.nodes.iter().enumerate() {
        match node.parent {
            None => {
                if id != 0 {
                    return Err(CheckError::Malformed(format!(
                        "node {id} has no parent but is not the root"
                    )));
                }
            }
            Some(p) => {
                if id == 0 || p >= id {
                    return Err(CheckError::Malformed(format!(
                        "node {id} has an out-of-order parent {p}"
                    )));
                }
                children[p].push(id);
            }
        }
        let check_ref = |r: FormulaRef| -> Result<(), CheckError> {
            if r.node >= id {
                return Err(CheckError::Malformed(format!(
                    "node {id} references a later node {}",
                    r.node
                )));
            }
            if r.index >= trace.nodes[r.node].formulas.len() {
                return Err(CheckError::Malformed(format!(
                    "node {id} references formula {} of node {}, which has {}",
                    r.index,
                    r.node,
                    trace.nodes[r.node].formulas.len()
                )));
            }
            Ok(())
        };
        if let Some(t) = node.target {
            check_ref(t)?;
        }
        if let NodeDetail::Closure { kind, .. } = &node.detail {
            match kind {
                ClosureKind::Pair(a, b) => {
                    check_ref(*a)?;
                    check_ref(*b)?;
                }
                ClosureKind::Bottom(r) | ClosureKind::NotTop(r) => check_ref(*r)?,
            }
        }
    }
    Ok(children)
}

impl<'a> Checker<'a> {
    fn run(&mut self) -> Verdict {
        if let Some(v) = self.check_premises() {
            return v;
        }
        for id in 0..self.trace.nodes.len() {
            if let Some(v) = self.check_node(id) {
                return v;
            }
            self.absorb(id);
        }
        Verdict::Valid
    }

    fn node(&self, id: usize) -> &TraceNode {
        &self.trace.nodes[id]
    }

    fn check_premises(&self) -> Option<Verdict> {
        let n = self.premises.len();
        if self.trace.nodes.len() < n {
            return Some(invalid(
                self.trace.nodes.len().saturating_sub(1),
                format!("trace has fewer nodes than the {n} required premises"),
            ));
        }
        for (i, expected) in self.premises.iter().enumerate() {
            let node = self.node(i);
            if node.label != RuleLabel::Premise {
                return Some(invalid(i, "expected a premise node"));
            }
            let expected_parent = if i == 0 { None } else { Some(i - 1) };
            if node.parent != expected_parent {
                return Some(invalid(i, "premises must form the initial chain"));
            }
            if node.formulas.len() != 1 || node.formulas[0] != *expected {
                return Some(invalid(
                    i,
                    format!("premise differs from the problem's: expected {expected}"),
                ));
            }
        }
        for (i, node) in self.trace.nodes.iter().enumerate().skip(n) {
            if node.label == RuleLabel::Premise {
                return Some(invalid(i, "premise node after the initial chain"));
            }
        }
        None
    }

    /// Record symbols and metavariables contributed by a validated node.
    fn absorb(&mut self, id: usize) {
        let trace = self.trace;
        let node = &trace.nodes[id];
        let mut syms = std::collections::BTreeMap::new();
        for f in &node.formulas {
            symbols_of_formula(f, &mut syms);
            self.seen_metas.extend(metas_of_formula(f));
        }
        match &node.detail {
            NodeDetail::Witness(w) => {
                symbols_of_term(w, &mut syms);
                self.seen_metas.extend(metas_of_term(w));
                if let Term::App(f, _) = w {
                    self.witness_symbols.insert(f.clone());
                }
            }
            NodeDetail::Meta(m) => {
                self.seen_metas.insert(*m);
            }
            NodeDetail::Closure { bindings, .. } => {
                for (m, t) in bindings.metas() {
                    self.seen_metas.insert(m);
                    self.seen_metas.extend(metas_of_term(t));
                    symbols_of_term(t, &mut syms);
                }
            }
            NodeDetail::Steps(steps) => {
                for s in steps {
                    for (_, t) in s.subst.vars() {
                        symbols_of_term(t, &mut syms);
                        self.seen_metas.extend(metas_of_term(t));
                    }
                }
            }
            _ => {}
        }
        self.seen_symbols.extend(syms.into_keys());
    }

    fn ancestors(&self, id: usize) -> HashSet<usize> {
        let mut out = HashSet::new();
        let mut cur = self.node(id).parent;
        while let Some(p) = cur {
            out.insert(p);
            cur = self.node(p).parent;
        }
        out
    }

    fn branch_formula(&self, id: usize, r: FormulaRef) -> Result<&Formula, Verdict> {
        if !self.ancestors(id).contains(&r.node) {
            return Err(invalid(
                id,
                format!("reference {r} is not on this node's branch"),
            ));
        }
        Ok(&self.trace.nodes[r.node].formulas[r.index])
    }

    fn check_node(&mut self, id: usize) -> Option<Verdict> {
        let node = self.node(id);

        for f in &node.formulas {
            if !free_vars_formula(f).is_empty() {
                return Some(invalid(id, "node formula has free variables"));
            }
            if f.contains_iff() {
                return Some(invalid(id, "node formula contains an equivalence"));
            }
        }

        // Tree shape around this node.
        let kids = &self.children[id];
        if node.label.is_closure() && !kids.is_empty() {
            return Some(invalid(id, "closure nodes are leaves"));
        }
        if !node.label.is_closure() && kids.is_empty() {
            return Some(invalid(id, "open leaf: every branch must close"));
        }
        match kids.len() {
            0 | 1 => {}
            2 => {
                let (a, b) = (&self.trace.nodes[kids[0]], &self.trace.nodes[kids[1]]);
                let ok = a.label.is_beta()
                    && a.label == b.label
                    && a.target == b.target
                    && a.side == Some(BetaSide::Left)
                    && b.side == Some(BetaSide::Right);
                if !ok {
                    return Some(invalid(
                        id,
                        "two children must be the paired segments of one branching rule",
                    ));
                }
            }
            _ => return Some(invalid(id, "a node has more than two children")),
        }
        if node.label.is_beta() {
            if node.side.is_none() {
                return Some(invalid(id, "branching segment is missing its side"));
            }
            let siblings = node
                .parent
                .map(|p| self.children[p].len())
                .unwrap_or(0);
            if siblings != 2 {
                return Some(invalid(id, "branching rule must produce both segments"));
            }
        } else if node.side.is_some() {
            return Some(invalid(id, "only branching segments carry a side"));
        }

        match node.label {
            RuleLabel::Premise => None, // checked up front
            RuleLabel::AlphaNotNot
            | RuleLabel::AlphaAnd
            | RuleLabel::AlphaNotOr
            | RuleLabel::AlphaNotImplies => self.check_alpha(id),
            RuleLabel::BetaOr | RuleLabel::BetaNotAnd | RuleLabel::BetaImplies => {
                self.check_beta(id)
            }
            RuleLabel::DeltaExists | RuleLabel::DeltaNotForall => self.check_delta(id),
            RuleLabel::GammaForall | RuleLabel::GammaNotExists => self.check_gamma(id),
            RuleLabel::Rw => self.check_rewrite(id),
            RuleLabel::Closure | RuleLabel::ClosureBot | RuleLabel::ClosureNotTop => {
                self.check_closure(id)
            }
        }
    }

    fn target_formula(&self, id: usize) -> Result<&Formula, Verdict> {
        let node = self.node(id);
        let t = node
            .target
            .ok_or_else(|| invalid(id, "expansion is missing its target"))?;
        self.branch_formula(id, t)
    }

    fn check_alpha(&self, id: usize) -> Option<Verdict> {
        let node = self.node(id);
        let target = match self.target_formula(id) {
            Ok(f) => f,
            Err(v) => return Some(v),
        };
        let expected: Vec<Formula> = match (node.label, target) {
            (RuleLabel::AlphaAnd, Formula::And(l, r)) => vec![(**l).clone(), (**r).clone()],
            (RuleLabel::AlphaNotNot, Formula::Not(g)) => match &**g {
                Formula::Not(h) => vec![(**h).clone()],
                _ => return Some(invalid(id, "target is not a double negation")),
            },
            (RuleLabel::AlphaNotOr, Formula::Not(g)) => match &**g {
                Formula::Or(l, r) => vec![
                    Formula::not((**l).clone()),
                    Formula::not((**r).clone()),
                ],
                _ => return Some(invalid(id, "target is not a negated disjunction")),
            },
            (RuleLabel::AlphaNotImplies, Formula::Not(g)) => match &**g {
                Formula::Implies(l, r) => vec![(**l).clone(), Formula::not((**r).clone())],
                _ => return Some(invalid(id, "target is not a negated implication")),
            },
            _ => return Some(invalid(id, "target does not fit the rule")),
        };
        if node.formulas != expected {
            return Some(invalid(id, "segment differs from the rule schema"));
        }
        None
    }

    fn check_beta(&self, id: usize) -> Option<Verdict> {
        let node = self.node(id);
        let target = match self.target_formula(id) {
            Ok(f) => f,
            Err(v) => return Some(v),
        };
        let (left, right) = match (node.label, target) {
            (RuleLabel::BetaOr, Formula::Or(l, r)) => ((**l).clone(), (**r).clone()),
            (RuleLabel::BetaImplies, Formula::Implies(l, r)) => {
                (Formula::not((**l).clone()), (**r).clone())
            }
            (RuleLabel::BetaNotAnd, Formula::Not(g)) => match &**g {
                Formula::And(l, r) => (
                    Formula::not((**l).clone()),
                    Formula::not((**r).clone()),
                ),
                _ => return Some(invalid(id, "target is not a negated conjunction")),
            },
            _ => return Some(invalid(id, "target does not fit the rule")),
        };
        let expected = match node.side {
            Some(BetaSide::Left) => left,
            Some(BetaSide::Right) => right,
            None => return Some(invalid(id, "branching segment is missing its side")),
        };
        if node.formulas != vec![expected] {
            return Some(invalid(id, "segment differs from the rule schema"));
        }
        None
    }

    fn check_delta(&self, id: usize) -> Option<Verdict> {
        let node = self.node(id);
        let target = match self.target_formula(id) {
            Ok(f) => f.clone(),
            Err(v) => return Some(v),
        };
        let witness = match &node.detail {
            NodeDetail::Witness(w) => w.clone(),
            _ => return Some(invalid(id, "witness rule is missing its witness term")),
        };
        let (sym, args) = match &witness {
            Term::App(f, args) => (f.clone(), args.clone()),
            _ => return Some(invalid(id, "witness must be a fresh function term")),
        };
        if self.base_symbols.contains(&sym) || self.seen_symbols.contains(&sym) {
            return Some(invalid(id, format!("witness symbol {sym} is not fresh")));
        }
        let expected_args: Vec<Term> = metas_of_formula(&target)
            .into_iter()
            .map(Term::Meta)
            .collect();
        if args != expected_args {
            return Some(invalid(
                id,
                "witness arguments must be the metavariables of the target",
            ));
        }
        let expected = match (node.label, &target) {
            (RuleLabel::DeltaExists, Formula::Exists(x, body)) => instantiate(x, body, &witness),
            (RuleLabel::DeltaNotForall, Formula::Not(g)) => match &**g {
                Formula::Forall(x, body) => Formula::not(instantiate(x, body, &witness)),
                _ => return Some(invalid(id, "target is not a negated universal")),
            },
            _ => return Some(invalid(id, "target does not fit the rule")),
        };
        if node.formulas != vec![expected] {
            return Some(invalid(id, "segment differs from the rule schema"));
        }
        None
    }

    fn check_gamma(&self, id: usize) -> Option<Verdict> {
        let node = self.node(id);
        let target = match self.target_formula(id) {
            Ok(f) => f.clone(),
            Err(v) => return Some(v),
        };
        let m = match &node.detail {
            NodeDetail::Meta(m) => *m,
            _ => return Some(invalid(id, "instantiation rule is missing its metavariable")),
        };
        if self.seen_metas.contains(&m) {
            return Some(invalid(id, format!("metavariable ?{m} is not fresh")));
        }
        let witness = Term::Meta(m);
        let expected = match (node.label, &target) {
            (RuleLabel::GammaForall, Formula::Forall(x, body)) => instantiate(x, body, &witness),
            (RuleLabel::GammaNotExists, Formula::Not(g)) => match &**g {
                Formula::Exists(x, body) => Formula::not(instantiate(x, body, &witness)),
                _ => return Some(invalid(id, "target is not a negated existential")),
            },
            _ => return Some(invalid(id, "target does not fit the rule")),
        };
        if node.formulas != vec![expected] {
            return Some(invalid(id, "segment differs from the rule schema"));
        }
        None
    }

    fn check_rewrite(&self, id: usize) -> Option<Verdict> {
        let node = self.node(id);
        let source = match self.target_formula(id) {
            Ok(f) => f.clone(),
            Err(v) => return Some(v),
        };
        if node.formulas.len() != 1 {
            return Some(invalid(id, "rewrite node carries exactly one formula"));
        }
        let steps = match &node.detail {
            NodeDetail::Steps(steps) => steps,
            NodeDetail::ElidedSteps => {
                return Some(invalid(
                    id,
                    "rewrite steps are elided; reconstruct them first",
                ))
            }
            _ => return Some(invalid(id, "rewrite node is missing its steps")),
        };
        let mut cur = source;
        for (k, step) in steps.iter().enumerate() {
            cur = match apply_rewrite_step(&self.rules, &cur, Polarity::Positive, step) {
                Ok(next) => next,
                Err(e) => return Some(invalid(id, format!("step {k}: {e}"))),
            };
        }
        if cur != node.formulas[0] {
            return Some(invalid(id, "rewrite chain does not reach the stated formula"));
        }
        None
    }

    fn check_closure(&self, id: usize) -> Option<Verdict> {
        let node = self.node(id);
        let (kind, _bindings) = match &node.detail {
            NodeDetail::Closure { kind, bindings } => (kind, bindings),
            _ => return Some(invalid(id, "closure node is missing its justification")),
        };
        match (node.label, kind) {
            (RuleLabel::ClosureBot, ClosureKind::Bottom(r)) => {
                let f = match self.branch_formula(id, *r) {
                    Ok(f) => f,
                    Err(v) => return Some(v),
                };
                if *f != Formula::Bottom {
                    return Some(invalid(id, "referenced formula is not the contradiction"));
                }
                None
            }
            (RuleLabel::ClosureNotTop, ClosureKind::NotTop(r)) => {
                let f = match self.branch_formula(id, *r) {
                    Ok(f) => f,
                    Err(v) => return Some(v),
                };
                if *f != Formula::not(Formula::Top) {
                    return Some(invalid(id, "referenced formula is not a negated truth"));
                }
                None
            }
            (RuleLabel::Closure, ClosureKind::Pair(a, b)) => {
                let fa = match self.branch_formula(id, *a) {
                    Ok(f) => f.clone(),
                    Err(v) => return Some(v),
                };
                let fb = match self.branch_formula(id, *b) {
                    Ok(f) => f.clone(),
                    Err(v) => return Some(v),
                };
                let ra = self.trace.global.apply_formula(&fa);
                let rb = self.trace.global.apply_formula(&fb);
                let complementary = match (&ra, &rb) {
                    (Formula::Not(x), _) if alpha_eq(x, &rb) => true,
                    (_, Formula::Not(y)) if alpha_eq(&ra, y) => true,
                    _ => false,
                };
                if !complementary {
                    return Some(invalid(
                        id,
                        format!("pair is not complementary under the global assignment: {ra} vs {rb}"),
                    ));
                }
                None
            }
            _ => Some(invalid(id, "closure label does not match its justification")),
        }
    }
}

/// Every single rewrite successor of a literal: term steps at every redex
/// with every rule, then the polarized propositional steps admitted by the
/// literal's sign.
fn literal_successors(lit: &Formula, rules: &RuleSet) -> Vec<(Formula, RewriteStep)> {
    let mut out = Vec::new();
    let (pred, args, negated) = match lit {
        Formula::Atom(p, a) => (p, a, false),
        Formula::Not(inner) => match &**inner {
            Formula::Atom(p, a) => (p, a, true),
            _ => return out,
        },
        _ => return out,
    };
    let atom_path: Vec<usize> = if negated { vec![0] } else { vec![] };

    // Term steps, at every position of every argument.
    fn positions(t: &Term, here: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(here.clone());
        if let Term::App(_, args) = t {
            for (i, a) in args.iter().enumerate() {
                let mut p = here.clone();
                p.push(i);
                positions(a, p, out);
            }
        }
    }
    for (i, arg) in args.iter().enumerate() {
        let mut pos = Vec::new();
        positions(arg, vec![], &mut pos);
        for p in pos {
            let sub = subterm_at(arg, &p).expect("enumerated positions are valid");
            for rule in &rules.term_rules {
                if let Some(s) = match_term_pattern(&rule.lhs, sub) {
                    let new_arg = replace_subterm(arg, &p, s.apply_term(&rule.rhs))
                        .expect("enumerated positions are valid");
                    let mut new_args = args.clone();
                    new_args[i] = new_arg;
                    let atom = Formula::Atom(pred.clone(), new_args);
                    let result = if negated { Formula::not(atom) } else { atom };
                    let mut term_path = vec![i];
                    term_path.extend(&p);
                    out.push((
                        result,
                        RewriteStep {
                            rule: StepRule::Term(rule.name.clone()),
                            path: atom_path.clone(),
                            term_path: Some(term_path),
                            subst: s,
                        },
                    ));
                }
            }
        }
    }

    // Propositional steps on the literal itself.
    let side = if negated {
        Polarity::Negative
    } else {
        Polarity::Positive
    };
    for rule in rules.prop_rules(side) {
        if let Some(s) = match_atom_pattern(&rule.lhs_pred, &rule.lhs_args, pred, args) {
            let body = s.apply_formula(&rule.rhs);
            let result = if negated { Formula::not(body) } else { body };
            out.push((
                result,
                RewriteStep {
                    rule: StepRule::Prop(rule.name.clone(), side),
                    path: atom_path.clone(),
                    term_path: None,
                    subst: s,
                },
            ));
        }
    }
    out
}

/// Recover elided rewrite details by bounded breadth-first search over
/// single polarized steps, then hand back the filled-in trace. Run
/// [`check_proof`] on the result to validate it.
pub fn reconstruct_rewrites(
    problem: &Problem,
    trace: &ProofTrace,
    budget: usize,
) -> Result<ProofTrace, ReconstructError> {
    let opts = PreprocessOptions {
        polarize: trace.polarize,
        skolemize_rules: trace.skolemize,
        orient_axioms: trace.orient,
    };
    let mut gen = NameGen::with_reserved(problem.signature_symbols());
    let prep = preprocess_problem(problem, &opts, &mut gen)?;

    let mut out = trace.clone();
    for id in 0..out.nodes.len() {
        if !matches!(out.nodes[id].detail, NodeDetail::ElidedSteps) {
            continue;
        }
        let target_ref = out.nodes[id]
            .target
            .ok_or_else(|| ReconstructError::Malformed(format!("node {id} has no target")))?;
        if target_ref.node >= id
            || target_ref.index >= out.nodes[target_ref.node].formulas.len()
        {
            return Err(ReconstructError::Malformed(format!(
                "node {id} has a dangling target reference"
            )));
        }
        let source = out.nodes[target_ref.node].formulas[target_ref.index].clone();
        let goal = match out.nodes[id].formulas.as_slice() {
            [f] => f.clone(),
            _ => {
                return Err(ReconstructError::Malformed(format!(
                    "rewrite node {id} must carry exactly one formula"
                )))
            }
        };
        let steps = bfs_rewrites(&source, &goal, &prep.rules, budget).map_err(|reason| {
            ReconstructError::Failed { node: id, reason }
        })?;
        out.nodes[id].detail = NodeDetail::Steps(steps);
    }
    Ok(out)
}

fn bfs_rewrites(
    source: &Formula,
    goal: &Formula,
    rules: &RuleSet,
    budget: usize,
) -> Result<Vec<RewriteStep>, String> {
    if source == goal {
        return Ok(Vec::new());
    }
    let mut visited: HashSet<Formula> = HashSet::new();
    visited.insert(source.clone());
    let mut queue: VecDeque<(Formula, Vec<RewriteStep>)> = VecDeque::new();
    queue.push_back((source.clone(), Vec::new()));
    let mut explored = 0usize;
    while let Some((cur, path)) = queue.pop_front() {
        for (next, step) in literal_successors(&cur, rules) {
            explored += 1;
            if explored > budget {
                return Err(format!(
                    "no step sequence within the budget of {budget} single steps"
                ));
            }
            let mut new_path = path.clone();
            new_path.push(step);
            if next == *goal {
                return Ok(new_path);
            }
            if visited.insert(next.clone()) {
                queue.push_back((next, new_path));
            }
        }
    }
    Err("the stated result is unreachable under the rule set".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{prove, ProofResult, SearchConfig};
    use crate::syntax::Subst;

    const INCLUSION: &str = "\
axiom incl: forall X. forall Y. (X subset Y <=> (forall Z. (Z in X => Z in Y))).
goal refl: a subset a.
";

    fn proved_trace(text: &str) -> (Problem, ProofTrace) {
        let p = Problem::parse("test", text).unwrap();
        let report = prove(&p, &PreprocessOptions::default(), &SearchConfig::default()).unwrap();
        match report.result {
            ProofResult::Proved(t) => (p, *t),
            other => panic!("expected a proof, got {other:?}"),
        }
    }

    #[test]
    fn golden_reflexivity_trace_is_valid() {
        let (p, t) = proved_trace(INCLUSION);
        assert_eq!(check_proof(&p, &t).unwrap(), Verdict::Valid);
    }

    #[test]
    fn non_complementary_closure_is_rejected() {
        let (p, mut t) = proved_trace(INCLUSION);
        // Point both halves of the closing pair at the same formula.
        let close = t.nodes.len() - 1;
        if let NodeDetail::Closure {
            kind: ClosureKind::Pair(a, b),
            ..
        } = &mut t.nodes[close].detail
        {
            *b = *a;
        }
        match check_proof(&p, &t).unwrap() {
            Verdict::Invalid { node, reason } => {
                assert_eq!(node, close);
                assert!(reason.contains("complementary"), "{reason}");
            }
            Verdict::Valid => panic!("mutated closure accepted"),
        }
    }

    #[test]
    fn wrong_polarity_rewrite_is_rejected() {
        let (p, mut t) = proved_trace(INCLUSION);
        for node in &mut t.nodes {
            if let NodeDetail::Steps(steps) = &mut node.detail {
                for s in steps {
                    if let StepRule::Prop(_, side) = &mut s.rule {
                        *side = Polarity::Positive;
                    }
                }
            }
        }
        match check_proof(&p, &t).unwrap() {
            Verdict::Invalid { reason, .. } => {
                assert!(reason.contains("occurrence"), "{reason}")
            }
            Verdict::Valid => panic!("polarity swap accepted"),
        }
    }

    #[test]
    fn altered_premise_is_rejected() {
        let (p, mut t) = proved_trace(INCLUSION);
        t.nodes[0].formulas[0] = Formula::not(Formula::Atom(
            "subset".into(),
            vec![Term::constant("a"), Term::constant("b")],
        ));
        assert!(!check_proof(&p, &t).unwrap().is_valid());
    }

    #[test]
    fn swapped_label_is_rejected() {
        let (p, mut t) = proved_trace(INCLUSION);
        for node in &mut t.nodes {
            if node.label == RuleLabel::AlphaNotImplies {
                node.label = RuleLabel::AlphaNotOr;
            }
        }
        assert!(!check_proof(&p, &t).unwrap().is_valid());
    }

    #[test]
    fn altered_witness_is_rejected() {
        let text = "axiom e: exists X. p(X).\ngoal g: exists Y. (p(Y) | q).";
        let (p, t) = proved_trace(text);
        assert!(check_proof(&p, &t).unwrap().is_valid());
        assert!(
            t.nodes.iter().any(|n| matches!(n.detail, NodeDetail::Witness(_))),
            "proof must introduce a witness"
        );
        let mut bad = t.clone();
        for node in &mut bad.nodes {
            if let NodeDetail::Witness(w) = &mut node.detail {
                *w = Term::constant("a");
            }
        }
        assert!(!check_proof(&p, &bad).unwrap().is_valid());
        // A witness symbol stolen from the problem signature is not fresh,
        // even when the stated segment formula is adjusted to match.
        let mut stolen = t;
        for id in 0..stolen.nodes.len() {
            let target = stolen.nodes[id].target;
            if let NodeDetail::Witness(w) = &mut stolen.nodes[id].detail {
                *w = Term::constant("q");
                let tref = target.unwrap();
                let tf = stolen.nodes[tref.node].formulas[tref.index].clone();
                if let Formula::Exists(x, body) = &tf {
                    stolen.nodes[id].formulas =
                        vec![instantiate(x, body, &Term::constant("q"))];
                }
                break;
            }
        }
        match check_proof(&p, &stolen).unwrap() {
            Verdict::Invalid { reason, .. } => assert!(reason.contains("fresh"), "{reason}"),
            Verdict::Valid => panic!("stolen witness symbol accepted"),
        }
    }

    #[test]
    fn stale_metavariable_is_rejected() {
        let text = "axiom all: forall X. q(X).\ngoal g: q(a) & q(b).";
        let (p, mut t) = proved_trace(text);
        let metas: Vec<usize> = t
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.detail, NodeDetail::Meta(_)))
            .map(|(i, _)| i)
            .collect();
        assert!(metas.len() >= 2);
        // Make the second instantiation reuse the first one's metavariable.
        let first = match t.nodes[metas[0]].detail {
            NodeDetail::Meta(m) => m,
            _ => unreachable!(),
        };
        let second = metas[1];
        let old = match t.nodes[second].detail {
            NodeDetail::Meta(m) => m,
            _ => unreachable!(),
        };
        t.nodes[second].detail = NodeDetail::Meta(first);
        let mut rename = Subst::new();
        rename.bind_meta(old, Term::Meta(first));
        for f in &mut t.nodes[second].formulas {
            *f = rename.apply_formula(f);
        }
        assert!(!check_proof(&p, &t).unwrap().is_valid());
    }

    #[test]
    fn open_leaf_is_rejected() {
        let (p, mut t) = proved_trace(INCLUSION);
        t.nodes.pop();
        assert!(!check_proof(&p, &t).unwrap().is_valid());
    }

    #[test]
    fn structural_damage_is_malformed() {
        let (p, mut t) = proved_trace(INCLUSION);
        t.nodes[2].parent = Some(7);
        assert!(matches!(
            check_proof(&p, &t),
            Err(CheckError::Malformed(_))
        ));
    }

    #[test]
    fn reconstruction_recovers_single_step() {
        let (p, t) = proved_trace(INCLUSION);
        let elided = t.elide_rewrites();
        assert!(!check_proof(&p, &elided).unwrap().is_valid());
        let filled = reconstruct_rewrites(&p, &elided, 10_000).unwrap();
        assert_eq!(check_proof(&p, &filled).unwrap(), Verdict::Valid);
        assert_eq!(filled.rewrite_step_count(), t.rewrite_step_count());
    }

    #[test]
    fn reconstruction_identity_when_no_gap() {
        let (p, t) = proved_trace("goal g: p => p.");
        let filled = reconstruct_rewrites(&p, &t.elide_rewrites(), 100).unwrap();
        assert_eq!(check_proof(&p, &filled).unwrap(), Verdict::Valid);
    }

    #[test]
    fn identical_source_and_target_reconstruct_in_zero_steps() {
        let rules = crate::rewrite::RuleSet::new();
        let f = Formula::Atom("p".into(), vec![Term::constant("a")]);
        assert_eq!(bfs_rewrites(&f, &f, &rules, 10), Ok(Vec::new()));
        let g = Formula::Atom("q".into(), vec![]);
        assert!(bfs_rewrites(&f, &g, &rules, 10).is_err());
    }

    #[test]
    fn unreachable_reconstruction_fails() {
        let (p, t) = proved_trace(INCLUSION);
        let mut elided = t.elide_rewrites();
        // Corrupt the rewrite node's stated result.
        for node in &mut elided.nodes {
            if node.label == RuleLabel::Rw {
                node.formulas[0] = Formula::Atom("in".into(), vec![
                    Term::constant("a"),
                    Term::constant("a"),
                ]);
            }
        }
        assert!(matches!(
            reconstruct_rewrites(&p, &elided, 1_000),
            Err(ReconstructError::Failed { .. })
        ));
    }
}
