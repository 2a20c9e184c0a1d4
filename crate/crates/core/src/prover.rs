//! Free-variable tableau search with forward literal rewriting.
//!
//! The search refutes the residual axioms together with the negated goal.
//! Universal formulas are instantiated with metavariables that get bound by
//! unification at branch closure; the binding is global, so closure choices
//! are backtracking points. Existential formulas take a fresh witness
//! symbol applied to the metavariables of the formula. A formula that
//! arrives on a branch as a literal is handed to the rewrite engine once;
//! when rewriting changes it, the result is recorded as an explicit child
//! node with its full step log.
//!
//! Expansion priority is fixed: non-branching rules first, then witness
//! rules, then literal rewriting, then branching rules, then universal
//! instantiation. The per-branch count of universal instantiations is the
//! iterative-deepening bound.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::parser::Problem;
use crate::preprocess::{preprocess_problem, Preprocessed, PreprocessError, PreprocessOptions};
use crate::rewrite::{normalize_literal, RewriteError, RuleSet};
use crate::syntax::{
    instantiate, metas_of_formula, Formula, MetaId, NameGen, Subst, Sym, Term,
};
use crate::trace::{
    BetaSide, ClosureKind, FormulaRef, NodeDetail, ProofTrace, RuleLabel, TraceNode,
};

#[derive(Debug, Error)]
pub enum ProverError {
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("rewrite budget of {budget} steps exhausted on literal {literal}")]
    RewriteLimit { literal: Formula, budget: usize },
}

/// Search bounds. `max_gamma` caps universal instantiations per branch and
/// doubles as the iterative-deepening ceiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_gamma: usize,
    pub rewrite_budget: usize,
    pub max_depth: usize,
    pub timeout: Duration,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_gamma: 10,
            rewrite_budget: 10_000,
            max_depth: 300,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ProofResult {
    Proved(Box<ProofTrace>),
    /// Search space exhausted. `hit_bounds` tells whether some configured
    /// bound curtailed a branch; when false the problem is saturated and
    /// genuinely unprovable with the given rules.
    Exhausted { hit_bounds: bool },
    Timeout,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub expansions: usize,
    pub closures: usize,
    pub gamma: usize,
    pub rewrite_steps: usize,
    /// Branch states visited across all deepening levels.
    pub searched: usize,
    pub levels: usize,
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub struct ProveReport {
    pub result: ProofResult,
    pub stats: SearchStats,
}

/// How the calculus treats a formula on a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Literal,
    ClosesBot,
    ClosesNotTop,
    Inert,
}

fn classify(f: &Formula) -> Class {
    match f {
        Formula::Bottom => Class::ClosesBot,
        Formula::Top => Class::Inert,
        Formula::Atom(..) => Class::Literal,
        Formula::And(..) => Class::Alpha,
        Formula::Or(..) | Formula::Implies(..) => Class::Beta,
        Formula::Forall(..) => Class::Gamma,
        Formula::Exists(..) => Class::Delta,
        Formula::Iff(..) => unreachable!("formulas are desugared before search"),
        Formula::Not(g) => match &**g {
            Formula::Top => Class::ClosesNotTop,
            Formula::Bottom => Class::Inert,
            Formula::Atom(..) => Class::Literal,
            Formula::Not(..) | Formula::Or(..) | Formula::Implies(..) => Class::Alpha,
            Formula::And(..) => Class::Beta,
            Formula::Forall(..) => Class::Delta,
            Formula::Exists(..) => Class::Gamma,
            Formula::Iff(..) => unreachable!("formulas are desugared before search"),
        },
    }
}

/// A quantifier expansion: strip the binder, substitute, re-apply the
/// negation for the negated duals.
#[derive(Clone, Debug)]
pub struct QuantExp {
    pub label: RuleLabel,
    pub var: Sym,
    pub body: Formula,
    pub negated: bool,
}

impl QuantExp {
    pub fn instantiate(&self, witness: &Term) -> Formula {
        let inst = instantiate(&self.var, &self.body, witness);
        if self.negated {
            Formula::not(inst)
        } else {
            inst
        }
    }
}

/// The child segments a branch formula expands into.
#[derive(Clone, Debug)]
pub enum Expansion {
    Alpha(RuleLabel, Vec<Formula>),
    Beta(RuleLabel, Formula, Formula),
    Delta(QuantExp),
    Gamma(QuantExp),
}

/// Decompose one non-literal formula according to its top connective.
pub fn expand(f: &Formula) -> Option<Expansion> {
    let exp = match f {
        Formula::And(l, r) => Expansion::Alpha(RuleLabel::AlphaAnd, vec![(**l).clone(), (**r).clone()]),
        Formula::Or(l, r) => Expansion::Beta(RuleLabel::BetaOr, (**l).clone(), (**r).clone()),
        Formula::Implies(l, r) => Expansion::Beta(
            RuleLabel::BetaImplies,
            Formula::not((**l).clone()),
            (**r).clone(),
        ),
        Formula::Forall(x, b) => Expansion::Gamma(QuantExp {
            label: RuleLabel::GammaForall,
            var: x.clone(),
            body: (**b).clone(),
            negated: false,
        }),
        Formula::Exists(x, b) => Expansion::Delta(QuantExp {
            label: RuleLabel::DeltaExists,
            var: x.clone(),
            body: (**b).clone(),
            negated: false,
        }),
        Formula::Not(g) => match &**g {
            Formula::Not(h) => Expansion::Alpha(RuleLabel::AlphaNotNot, vec![(**h).clone()]),
            Formula::Or(l, r) => Expansion::Alpha(
                RuleLabel::AlphaNotOr,
                vec![Formula::not((**l).clone()), Formula::not((**r).clone())],
            ),
            Formula::Implies(l, r) => Expansion::Alpha(
                RuleLabel::AlphaNotImplies,
                vec![(**l).clone(), Formula::not((**r).clone())],
            ),
            Formula::And(l, r) => Expansion::Beta(
                RuleLabel::BetaNotAnd,
                Formula::not((**l).clone()),
                Formula::not((**r).clone()),
            ),
            Formula::Forall(x, b) => Expansion::Delta(QuantExp {
                label: RuleLabel::DeltaNotForall,
                var: x.clone(),
                body: (**b).clone(),
                negated: true,
            }),
            Formula::Exists(x, b) => Expansion::Gamma(QuantExp {
                label: RuleLabel::GammaNotExists,
                var: x.clone(),
                body: (**b).clone(),
                negated: true,
            }),
            _ => return None,
        },
        _ => return None,
    };
    Some(exp)
}

/// Fresh witness for an existential formula: a new symbol applied to the
/// metavariables occurring in the formula (a constant when there are none).
pub fn delta_witness(q: &Formula, gen: &mut NameGen) -> Term {
    let metas = metas_of_formula(q);
    let sym = gen.fresh_symbol("c");
    Term::App(sym, metas.into_iter().map(Term::Meta).collect())
}

#[derive(Clone, Debug)]
struct Entry {
    refr: FormulaRef,
    formula: Formula,
    cls: Class,
}

/// One universal formula available for instantiation on a branch, with the
/// metavariables its previous instances introduced there.
#[derive(Clone, Debug)]
struct GammaSlot {
    entry: usize,
    used_metas: Vec<MetaId>,
}

#[derive(Clone, Debug, Default)]
struct Branch {
    tip: usize,
    entries: Vec<Entry>,
    alpha: VecDeque<usize>,
    delta: VecDeque<usize>,
    rewr: VecDeque<usize>,
    beta: VecDeque<usize>,
    gamma: VecDeque<GammaSlot>,
    gamma_used: usize,
    depth: usize,
    /// Entries below this index have already been offered as closure
    /// candidates under the current bindings. Along an expansion chain the
    /// bindings cannot change, so only pairs touching newer entries are
    /// candidates; a branch resumed after a sibling subtree (which may have
    /// bound metavariables) starts over from zero.
    closure_from: usize,
}

impl Branch {
    fn add_formula(&mut self, refr: FormulaRef, formula: Formula) {
        let cls = classify(&formula);
        let idx = self.entries.len();
        match cls {
            Class::Alpha => self.alpha.push_back(idx),
            Class::Beta => self.beta.push_back(idx),
            Class::Gamma => self.gamma.push_front(GammaSlot {
                entry: idx,
                used_metas: Vec::new(),
            }),
            Class::Delta => self.delta.push_back(idx),
            Class::Literal => self.rewr.push_back(idx),
            Class::ClosesBot | Class::ClosesNotTop | Class::Inert => {}
        }
        self.entries.push(Entry { refr, formula, cls });
    }
}

#[derive(Debug)]
enum Abort {
    Timeout,
    RewriteLimit { literal: Formula, budget: usize },
}

#[derive(Default)]
struct Bindings {
    map: HashMap<MetaId, Term>,
    trail: Vec<MetaId>,
}

impl Bindings {
    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let m = self.trail.pop().expect("trail length checked");
            self.map.remove(&m);
        }
    }

    fn bind(&mut self, m: MetaId, t: Term) {
        self.map.insert(m, t);
        self.trail.push(m);
    }

    fn since(&self, mark: usize) -> Subst {
        let mut s = Subst::new();
        for m in &self.trail[mark..] {
            if let Some(t) = self.map.get(m) {
                s.bind_meta(*m, t.clone());
            }
        }
        s
    }

    fn resolve_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::Meta(m) => match self.map.get(m) {
                Some(bound) => self.resolve_term(bound),
                None => t.clone(),
            },
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| self.resolve_term(a)).collect(),
            ),
        }
    }

    fn resolved(&self) -> Subst {
        let mut s = Subst::new();
        for (m, t) in &self.map {
            s.bind_meta(*m, self.resolve_term(t));
        }
        s
    }
}

enum Candidate {
    Single(RuleLabel, FormulaRef),
    /// Unify `entries[holder]` against the body of the negation at
    /// `entries[negated]`. A literal pair is a full backtracking point; a
    /// compound pair may only close for free (no new bindings), since
    /// decomposition subsumes it otherwise.
    Pair {
        holder: usize,
        negated: usize,
        literal: bool,
    },
}

struct Engine<'a> {
    rules: &'a RuleSet,
    cfg: &'a SearchConfig,
    gen: NameGen,
    nodes: Vec<TraceNode>,
    bind: Bindings,
    deadline: Instant,
    gamma_limit: usize,
    bound_hit: bool,
    searched: usize,
}

impl<'a> Engine<'a> {
    fn resolve_root<'t>(&'t self, t: &'t Term) -> &'t Term {
        let mut cur = t;
        while let Term::Meta(m) = cur {
            match self.bind.map.get(m) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, m: MetaId, t: &Term) -> bool {
        let t = self.resolve_root(t);
        match t {
            Term::Meta(n) => *n == m,
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.occurs(m, a)),
        }
    }

    /// Bound variables may not escape their scope through a metavariable.
    fn mentions_env_var(&self, t: &Term, env: &[(Sym, Sym)]) -> bool {
        let t = self.resolve_root(t);
        match t {
            Term::Var(x) => env.iter().any(|(l, r)| l == x || r == x),
            Term::Meta(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.mentions_env_var(a, env)),
        }
    }

    fn unify_terms(&mut self, a: &Term, b: &Term, env: &mut Vec<(Sym, Sym)>) -> bool {
        let a = self.resolve_root(a).clone();
        let b = self.resolve_root(b).clone();
        match (&a, &b) {
            (Term::Meta(m), Term::Meta(n)) if m == n => true,
            (Term::Meta(m), other) | (other, Term::Meta(m)) => {
                if self.occurs(*m, other) || self.mentions_env_var(other, env) {
                    return false;
                }
                self.bind.bind(*m, other.clone());
                true
            }
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
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs
                        .iter()
                        .zip(ys)
                        .all(|(x, y)| self.unify_terms(&x.clone(), &y.clone(), env))
            }
            _ => false,
        }
    }

    fn unify_formulas(&mut self, a: &Formula, b: &Formula, env: &mut Vec<(Sym, Sym)>) -> bool {
        match (a, b) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| {
                        let (x, y) = (x.clone(), y.clone());
                        self.unify_terms(&x, &y, env)
                    })
            }
            (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Not(x), Formula::Not(y)) => self.unify_formulas(x, y, env),
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Implies(a1, a2), Formula::Implies(b1, b2)) => {
                self.unify_formulas(a1, b1, env) && self.unify_formulas(a2, b2, env)
            }
            (Formula::Forall(x, f), Formula::Forall(y, g))
            | (Formula::Exists(x, f), Formula::Exists(y, g)) => {
                env.push((x.clone(), y.clone()));
                let ok = self.unify_formulas(f, g, env);
                env.pop();
                ok
            }
            _ => false,
        }
    }

    /// Try to make `holder` the complement of the negated entry's body.
    fn unify_complement(&mut self, holder: &Formula, negation: &Formula) -> bool {
        match negation {
            Formula::Not(body) => self.unify_formulas(holder, body, &mut Vec::new()),
            _ => false,
        }
    }

    fn heads_may_complement(holder: &Formula, body: &Formula) -> bool {
        match (holder, body) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => p == q && xs.len() == ys.len(),
            (Formula::Top, Formula::Top)
            | (Formula::Bottom, Formula::Bottom)
            | (Formula::Not(_), Formula::Not(_))
            | (Formula::And(..), Formula::And(..))
            | (Formula::Or(..), Formula::Or(..))
            | (Formula::Implies(..), Formula::Implies(..))
            | (Formula::Forall(..), Formula::Forall(..))
            | (Formula::Exists(..), Formula::Exists(..)) => true,
            _ => false,
        }
    }

    fn closure_candidates(&self, branch: &Branch) -> Vec<Candidate> {
        let fresh = branch.closure_from;
        let mut out = Vec::new();
        for e in branch.entries.iter().skip(fresh) {
            match e.cls {
                Class::ClosesBot => out.push(Candidate::Single(RuleLabel::ClosureBot, e.refr)),
                Class::ClosesNotTop => {
                    out.push(Candidate::Single(RuleLabel::ClosureNotTop, e.refr))
                }
                _ => {}
            }
        }
        for (j, ej) in branch.entries.iter().enumerate() {
            let body = match &ej.formula {
                Formula::Not(b) => &**b,
                _ => continue,
            };
            for (i, ei) in branch.entries.iter().enumerate() {
                if i == j || (i < fresh && j < fresh) {
                    continue;
                }
                if Self::heads_may_complement(&ei.formula, body) {
                    let literal =
                        matches!(ei.formula, Formula::Atom(..)) && matches!(body, Formula::Atom(..));
                    out.push(Candidate::Pair {
                        holder: i,
                        negated: j,
                        literal,
                    });
                }
            }
        }
        // Literal pairs first (they are the ones closure depends on),
        // newest entries first within each class.
        out.sort_by_key(|c| match c {
            Candidate::Single(..) => (0, 0isize),
            Candidate::Pair { literal, holder, negated } => {
                let newest = *holder.max(negated) as isize;
                (if *literal { 1 } else { 2 }, -newest)
            }
        });
        out
    }

    fn push_node(&mut self, node: TraceNode) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        id
    }

    fn solve(&mut self, open: &mut Vec<Branch>) -> Result<bool, Abort> {
        // The recursion holds one frame per node along the proof tree, so
        // grow the stack in segments when a deep search needs it.
        stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, || self.solve_inner(open))
    }

    fn solve_inner(&mut self, open: &mut Vec<Branch>) -> Result<bool, Abort> {
        if Instant::now() >= self.deadline {
            return Err(Abort::Timeout);
        }
        let branch = match open.pop() {
            None => return Ok(true),
            Some(b) => b,
        };
        self.searched += 1;
        let node_mark = self.nodes.len();

        // Closure first. Every candidate is a backtracking point; a closure
        // that binds nothing and still fails downstream dooms the branch,
        // since alternative closures only add constraints.
        for cand in self.closure_candidates(&branch) {
            match cand {
                Candidate::Single(label, refr) => {
                    self.push_node(TraceNode {
                        parent: Some(branch.tip),
                        label,
                        target: None,
                        side: None,
                        formulas: vec![],
                        detail: NodeDetail::Closure {
                            kind: match label {
                                RuleLabel::ClosureBot => ClosureKind::Bottom(refr),
                                _ => ClosureKind::NotTop(refr),
                            },
                            bindings: Subst::new(),
                        },
                    });
                    if self.solve(open)? {
                        return Ok(true);
                    }
                    self.nodes.truncate(node_mark);
                    open.push(branch);
                    return Ok(false);
                }
                Candidate::Pair {
                    holder,
                    negated,
                    literal,
                } => {
                    let mark = self.bind.mark();
                    let h = branch.entries[holder].formula.clone();
                    let n = branch.entries[negated].formula.clone();
                    if self.unify_complement(&h, &n) {
                        let added = self.bind.since(mark);
                        let no_bindings = added.is_empty();
                        if !literal && !no_bindings {
                            self.bind.undo_to(mark);
                            continue;
                        }
                        self.push_node(TraceNode {
                            parent: Some(branch.tip),
                            label: RuleLabel::Closure,
                            target: None,
                            side: None,
                            formulas: vec![],
                            detail: NodeDetail::Closure {
                                kind: ClosureKind::Pair(
                                    branch.entries[holder].refr,
                                    branch.entries[negated].refr,
                                ),
                                bindings: added,
                            },
                        });
                        if self.solve(open)? {
                            return Ok(true);
                        }
                        self.nodes.truncate(node_mark);
                        self.bind.undo_to(mark);
                        if no_bindings {
                            open.push(branch);
                            return Ok(false);
                        }
                    } else {
                        self.bind.undo_to(mark);
                    }
                }
            }
        }

        if branch.depth >= self.cfg.max_depth {
            self.bound_hit = true;
            open.push(branch);
            return Ok(false);
        }

        // Non-branching decomposition.
        if !branch.alpha.is_empty() {
            let mut b = branch.clone();
            let i = b.alpha.pop_front().expect("checked non-empty");
            let target = b.entries[i].refr;
            let (label, formulas) = match expand(&b.entries[i].formula) {
                Some(Expansion::Alpha(l, fs)) => (l, fs),
                other => unreachable!("alpha-classified formula expanded to {other:?}"),
            };
            let id = self.push_node(TraceNode {
                parent: Some(b.tip),
                label,
                target: Some(target),
                side: None,
                formulas: formulas.clone(),
                detail: NodeDetail::None,
            });
            b.tip = id;
            b.depth += 1;
            b.closure_from = b.entries.len();
            for (k, g) in formulas.into_iter().enumerate() {
                b.add_formula(FormulaRef { node: id, index: k }, g);
            }
            return self.commit_single(open, branch, b, node_mark);
        }

        // Fresh-witness rules.
        if !branch.delta.is_empty() {
            let mut b = branch.clone();
            let i = b.delta.pop_front().expect("checked non-empty");
            let target = b.entries[i].refr;
            let q = b.entries[i].formula.clone();
            let qe = match expand(&q) {
                Some(Expansion::Delta(qe)) => qe,
                other => unreachable!("delta-classified formula expanded to {other:?}"),
            };
            let witness = delta_witness(&q, &mut self.gen);
            let inst = qe.instantiate(&witness);
            let id = self.push_node(TraceNode {
                parent: Some(b.tip),
                label: qe.label,
                target: Some(target),
                side: None,
                formulas: vec![inst.clone()],
                detail: NodeDetail::Witness(witness),
            });
            b.tip = id;
            b.depth += 1;
            b.closure_from = b.entries.len();
            b.add_formula(FormulaRef { node: id, index: 0 }, inst);
            return self.commit_single(open, branch, b, node_mark);
        }

        // Rewriting of literals that have not been looked at yet.
        if !branch.rewr.is_empty() {
            let mut b = branch.clone();
            let i = b.rewr.pop_front().expect("checked non-empty");
            let lit = b.entries[i].formula.clone();
            let normalized = normalize_literal(&lit, self.rules, self.cfg.rewrite_budget)
                .map_err(|e| match e {
                    RewriteError::LimitExceeded { literal, budget } => {
                        Abort::RewriteLimit { literal, budget }
                    }
                })?;
            b.closure_from = b.entries.len();
            if !normalized.steps.is_empty() {
                let target = b.entries[i].refr;
                let id = self.push_node(TraceNode {
                    parent: Some(b.tip),
                    label: RuleLabel::Rw,
                    target: Some(target),
                    side: None,
                    formulas: vec![normalized.result.clone()],
                    detail: NodeDetail::Steps(normalized.steps),
                });
                b.tip = id;
                b.depth += 1;
                b.add_formula(FormulaRef { node: id, index: 0 }, normalized.result);
            }
            return self.commit_single(open, branch, b, node_mark);
        }

        // Branching rules: both segments go onto the open stack, the left
        // one on top so it is solved first.
        if !branch.beta.is_empty() {
            let mut base = branch.clone();
            let i = base.beta.pop_front().expect("checked non-empty");
            let target = base.entries[i].refr;
            let (label, left, right) = match expand(&base.entries[i].formula) {
                Some(Expansion::Beta(l, a, b)) => (l, a, b),
                other => unreachable!("beta-classified formula expanded to {other:?}"),
            };
            let left_id = self.push_node(TraceNode {
                parent: Some(base.tip),
                label,
                target: Some(target),
                side: Some(BetaSide::Left),
                formulas: vec![left.clone()],
                detail: NodeDetail::None,
            });
            let right_id = self.push_node(TraceNode {
                parent: Some(base.tip),
                label,
                target: Some(target),
                side: Some(BetaSide::Right),
                formulas: vec![right.clone()],
                detail: NodeDetail::None,
            });
            let mut bl = base.clone();
            bl.tip = left_id;
            bl.depth += 1;
            bl.closure_from = bl.entries.len();
            bl.add_formula(FormulaRef { node: left_id, index: 0 }, left);
            let mut br = base;
            br.tip = right_id;
            br.depth += 1;
            // The left subtree may bind metavariables, so the right segment
            // re-checks every pair once it is reached.
            br.closure_from = 0;
            br.add_formula(FormulaRef { node: right_id, index: 0 }, right);
            open.push(br);
            open.push(bl);
            if self.solve(open)? {
                return Ok(true);
            }
            open.pop();
            open.pop();
            self.nodes.truncate(node_mark);
            open.push(branch);
            return Ok(false);
        }

        // Universal instantiation, bounded by the current deepening level.
        // Which universal to instantiate is a backtracking choice, tried in
        // rotation order; a wrong pick near the budget edge fails quickly.
        // A formula whose previous instance still has a completely
        // unconstrained metavariable is skipped: a second unbound instance
        // is an interchangeable variant and cannot help.
        if !branch.gamma.is_empty() {
            if branch.gamma_used >= self.gamma_limit {
                self.bound_hit = true;
                open.push(branch);
                return Ok(false);
            }
            let mut any_usable = false;
            for k in 0..branch.gamma.len() {
                let blocked = branch.gamma[k]
                    .used_metas
                    .iter()
                    .any(|m| !self.bind.map.contains_key(m));
                if blocked {
                    continue;
                }
                any_usable = true;
                let mut b = branch.clone();
                let mut slot = b.gamma.remove(k).expect("index in range");
                let i = slot.entry;
                b.gamma_used += 1;
                let target = b.entries[i].refr;
                let qe = match expand(&b.entries[i].formula) {
                    Some(Expansion::Gamma(qe)) => qe,
                    other => unreachable!("gamma-classified formula expanded to {other:?}"),
                };
                let m = self.gen.fresh_meta();
                slot.used_metas.push(m);
                b.gamma.push_back(slot);
                let inst = qe.instantiate(&Term::Meta(m));
                let id = self.push_node(TraceNode {
                    parent: Some(b.tip),
                    label: qe.label,
                    target: Some(target),
                    side: None,
                    formulas: vec![inst.clone()],
                    detail: NodeDetail::Meta(m),
                });
                b.tip = id;
                b.depth += 1;
                b.closure_from = b.entries.len();
                b.add_formula(FormulaRef { node: id, index: 0 }, inst);
                open.push(b);
                if self.solve(open)? {
                    return Ok(true);
                }
                open.pop();
                self.nodes.truncate(node_mark);
            }
            if !any_usable {
                // Every universal is waiting on a free instance; treat this
                // as a bound so deepening keeps going.
                self.bound_hit = true;
            }
            open.push(branch);
            return Ok(false);
        }

        // Saturated and open: this branch cannot close at any bound.
        open.push(branch);
        Ok(false)
    }

    /// Push the extended branch, recurse, and restore everything on failure.
    fn commit_single(
        &mut self,
        open: &mut Vec<Branch>,
        original: Branch,
        extended: Branch,
        node_mark: usize,
    ) -> Result<bool, Abort> {
        open.push(extended);
        if self.solve(open)? {
            return Ok(true);
        }
        open.pop();
        self.nodes.truncate(node_mark);
        open.push(original);
        Ok(false)
    }
}

/// Preprocess and search. Iterative deepening runs the per-branch
/// instantiation bound from 1 up to the configured maximum; a level that
/// fails without touching any bound ends the search early as exhausted.
pub fn prove(
    problem: &Problem,
    popts: &PreprocessOptions,
    cfg: &SearchConfig,
) -> Result<ProveReport, ProverError> {
    debug_assert!(
        cfg.max_gamma >= 1
            && cfg.rewrite_budget >= 1
            && cfg.max_depth >= 1
            && cfg.timeout > Duration::ZERO,
        "search bounds must be positive"
    );
    let start = Instant::now();
    let mut gen = NameGen::with_reserved(problem.signature_symbols());
    let prep = preprocess_problem(problem, popts, &mut gen)?;
    prove_preprocessed(problem, popts, cfg, &prep, gen, start)
}

/// Search with an already-preprocessed problem (the rule set and premises
/// are taken as given).
pub fn prove_preprocessed(
    problem: &Problem,
    popts: &PreprocessOptions,
    cfg: &SearchConfig,
    prep: &Preprocessed,
    gen: NameGen,
    start: Instant,
) -> Result<ProveReport, ProverError> {
    let deadline = start + cfg.timeout;
    let mut searched_total = 0usize;

    for level in 1..=cfg.max_gamma {
        let mut eng = Engine {
            rules: &prep.rules,
            cfg,
            gen: gen.clone(),
            nodes: Vec::new(),
            bind: Bindings::default(),
            deadline,
            gamma_limit: level,
            bound_hit: false,
            searched: 0,
        };

        let mut branch = Branch::default();
        let mut parent = None;
        let premises = prep
            .residual
            .iter()
            .map(|(_, f)| f.clone())
            .chain(std::iter::once(prep.negated_goal.clone()));
        for f in premises {
            let id = eng.push_node(TraceNode {
                parent,
                label: RuleLabel::Premise,
                target: None,
                side: None,
                formulas: vec![f.clone()],
                detail: NodeDetail::None,
            });
            parent = Some(id);
            branch.tip = id;
            branch.add_formula(FormulaRef { node: id, index: 0 }, f);
        }

        let mut open = vec![branch];
        match eng.solve(&mut open) {
            Ok(true) => {
                let trace = ProofTrace {
                    problem: problem.name.clone(),
                    polarize: popts.polarize,
                    skolemize: popts.skolemize_rules,
                    orient: popts.orient_axioms,
                    nodes: eng.nodes,
                    global: eng.bind.resolved(),
                };
                let stats = SearchStats {
                    expansions: trace.expansion_count(),
                    closures: trace.closure_count(),
                    gamma: trace.gamma_count(),
                    rewrite_steps: trace.rewrite_step_count(),
                    searched: searched_total + eng.searched,
                    levels: level,
                    wall: start.elapsed(),
                };
                return Ok(ProveReport {
                    result: ProofResult::Proved(Box::new(trace)),
                    stats,
                });
            }
            Ok(false) => {
                searched_total += eng.searched;
                if std::env::var_os("POLARTAB_DEBUG_LEVELS").is_some() {
                    eprintln!(
                        "level {level}: searched={} total={} wall={:.1}ms",
                        eng.searched,
                        searched_total,
                        start.elapsed().as_secs_f64() * 1e3
                    );
                }
                if !eng.bound_hit {
                    return Ok(ProveReport {
                        result: ProofResult::Exhausted { hit_bounds: false },
                        stats: SearchStats {
                            searched: searched_total,
                            levels: level,
                            wall: start.elapsed(),
                            ..Default::default()
                        },
                    });
                }
            }
            Err(Abort::Timeout) => {
                return Ok(ProveReport {
                    result: ProofResult::Timeout,
                    stats: SearchStats {
                        searched: searched_total + eng.searched,
                        levels: level,
                        wall: start.elapsed(),
                        ..Default::default()
                    },
                });
            }
            Err(Abort::RewriteLimit { literal, budget }) => {
                return Err(ProverError::RewriteLimit { literal, budget });
            }
        }
    }

    Ok(ProveReport {
        result: ProofResult::Exhausted { hit_bounds: true },
        stats: SearchStats {
            searched: searched_total,
            levels: cfg.max_gamma,
            wall: start.elapsed(),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::RuleLabel as L;

    const INCLUSION: &str = "\
axiom incl: forall X. forall Y. (X subset Y <=> (forall Z. (Z in X => Z in Y))).
goal refl: a subset a.
";

    fn run(text: &str) -> ProveReport {
        run_with(text, &PreprocessOptions::default(), &SearchConfig::default())
    }

    fn run_with(text: &str, popts: &PreprocessOptions, cfg: &SearchConfig) -> ProveReport {
        let p = Problem::parse("test", text).unwrap();
        prove(&p, popts, cfg).unwrap()
    }

    fn proved(report: &ProveReport) -> &ProofTrace {
        match &report.result {
            ProofResult::Proved(t) => t,
            other => panic!("expected a proof, got {other:?}"),
        }
    }

    #[test]
    fn reflexivity_polarized_takes_two_expansions() {
        let r = run(INCLUSION);
        let t = proved(&r);
        assert_eq!(t.expansion_count(), 2);
        assert_eq!(t.closure_count(), 1);
        let labels: Vec<L> = t.nodes.iter().map(|n| n.label).collect();
        assert_eq!(
            labels,
            vec![L::Premise, L::Rw, L::AlphaNotImplies, L::Closure]
        );
    }

    #[test]
    fn reflexivity_unpolarized_takes_three_expansions() {
        let popts = PreprocessOptions {
            polarize: false,
            ..Default::default()
        };
        let r = run_with(INCLUSION, &popts, &SearchConfig::default());
        let t = proved(&r);
        assert_eq!(t.expansion_count(), 3);
        assert_eq!(t.closure_count(), 1);
        let labels: Vec<L> = t.nodes.iter().map(|n| n.label).collect();
        assert_eq!(
            labels,
            vec![L::Premise, L::Rw, L::DeltaNotForall, L::AlphaNotImplies, L::Closure]
        );
    }

    #[test]
    fn distinct_constants_are_not_included() {
        // Countermodel by hand: take a = {1}, b = {}; then every premise
        // holds and a subset b fails, so the branch must stay open.
        let text = "\
axiom incl: forall X. forall Y. (X subset Y <=> (forall Z. (Z in X => Z in Y))).
goal bad: a subset b.
";
        let r = run(text);
        assert!(matches!(r.result, ProofResult::Exhausted { .. }));
    }

    #[test]
    fn closure_binds_metavariable_by_unification() {
        let text = "axiom all: forall X. p(X).\ngoal g: p(c).";
        let r = run(text);
        let t = proved(&r);
        assert_eq!(t.gamma_count(), 1);
        // The sole metavariable must resolve to the goal's constant.
        let (m, term) = t.global.metas().next().expect("one binding");
        let _ = m;
        assert_eq!(term, &Term::constant("c"));
    }

    #[test]
    fn two_witness_rules_introduce_distinct_symbols() {
        let text = "\
axiom e1: exists X. p(X).
axiom e2: exists X. q(X).
goal g: (exists U. p(U)) & (exists V. q(V)).
";
        let r = run(text);
        let t = proved(&r);
        let witnesses: Vec<&Term> = t
            .nodes
            .iter()
            .filter_map(|n| match &n.detail {
                NodeDetail::Witness(w) => Some(w),
                _ => None,
            })
            .collect();
        assert!(witnesses.len() >= 2);
        let heads: Vec<&Sym> = witnesses
            .iter()
            .map(|w| match w {
                Term::App(f, _) => f,
                other => panic!("witness {other} is not an application"),
            })
            .collect();
        for i in 0..heads.len() {
            for j in (i + 1)..heads.len() {
                assert_ne!(heads[i], heads[j]);
            }
        }
    }

    #[test]
    fn closure_uses_internal_compound_nodes() {
        let text = "axiom both: p & q.\ngoal same: p & q.";
        let r = run(text);
        let t = proved(&r);
        // The conjunction pair closes directly, without decomposition.
        assert_eq!(t.expansion_count(), 0);
        assert_eq!(t.closure_count(), 1);
    }

    #[test]
    fn scheduling_priority_alpha_delta_beta_gamma() {
        let text = "\
axiom a1: p & q.
axiom a2: exists X. r(X).
axiom a3: s | s.
axiom a4: forall X. w(X).
goal g: ((q & s) & (exists Y. r(Y))) & w(c).
";
        let r = run(text);
        let t = proved(&r);
        let pos = |pred: &dyn Fn(L) -> bool| {
            t.nodes
                .iter()
                .position(|n| pred(n.label))
                .unwrap_or(usize::MAX)
        };
        let first_alpha = pos(&|l| {
            matches!(l, L::AlphaAnd | L::AlphaNotNot | L::AlphaNotOr | L::AlphaNotImplies)
        });
        let first_delta = pos(&|l| matches!(l, L::DeltaExists | L::DeltaNotForall));
        let first_beta = pos(&|l| l.is_beta());
        let first_gamma = pos(&|l| matches!(l, L::GammaForall | L::GammaNotExists));
        assert!(first_alpha < first_delta, "alpha before delta");
        assert!(first_delta < first_beta, "delta before beta");
        assert!(first_beta < first_gamma, "beta before gamma");
    }

    #[test]
    fn rewrite_limit_is_reported_not_hung() {
        let text = "rule_term loop: c -> c.\ngoal g: p(c).";
        let p = Problem::parse("loop", text).unwrap();
        let started = Instant::now();
        let err = prove(&p, &PreprocessOptions::default(), &SearchConfig::default()).unwrap_err();
        assert!(started.elapsed() < Duration::from_secs(1));
        match err {
            ProverError::RewriteLimit { budget, .. } => assert_eq!(budget, 10_000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn timeout_is_reported() {
        // Unprovable but with an endless supply of instantiations, so every
        // level hits the bound until the clock runs out.
        let text = "axiom gen: forall X. p(f(X)).\ngoal g: q.";
        let cfg = SearchConfig {
            timeout: Duration::from_millis(50),
            max_gamma: 1_000_000,
            ..Default::default()
        };
        let r = run_with(text, &PreprocessOptions::default(), &cfg);
        assert!(matches!(
            r.result,
            ProofResult::Timeout | ProofResult::Exhausted { hit_bounds: true }
        ));
    }

    #[test]
    fn propositional_chain() {
        let text = "goal g: p => (p => q) => (q => r) => r.";
        let r = run(text);
        let t = proved(&r);
        assert!(t.closure_count() >= 2);
    }

    #[test]
    fn proof_leaves_are_all_closures() {
        let text = "goal g: (p | q) => (q | p).";
        let r = run(text);
        let t = proved(&r);
        let mut has_child = vec![false; t.nodes.len()];
        for n in &t.nodes {
            if let Some(p) = n.parent {
                has_child[p] = true;
            }
        }
        for (i, n) in t.nodes.iter().enumerate() {
            if !has_child[i] {
                assert!(n.label.is_closure(), "open leaf {i} labeled {}", n.label);
            }
        }
    }

    #[test]
    fn gamma_formulas_are_reusable() {
        // Proving q(a) & q(b) needs the universal twice on one branch.
        let text = "axiom all: forall X. q(X).\ngoal g: q(a) & q(b).";
        let r = run(text);
        let t = proved(&r);
        assert!(t.gamma_count() >= 2);
    }

    #[test]
    fn growing_rule_set_fails_gracefully() {
        // The rule keeps enlarging the branch; the depth bound must cut
        // every level without crashing or hanging.
        let text = "rewrite+ grow: p(X) -> p(X) & p(X).\ngoal g: p(a) => q.";
        let started = Instant::now();
        let r = run(text);
        assert!(matches!(
            r.result,
            ProofResult::Exhausted { hit_bounds: true }
        ));
        assert!(started.elapsed() < Duration::from_secs(10));
    }

    #[test]
    fn expand_segments_follow_the_rule_table() {
        use crate::parser::parse_formula;
        let f = parse_formula("~(p => q)").unwrap();
        match expand(&f) {
            Some(Expansion::Alpha(L::AlphaNotImplies, seg)) => {
                assert_eq!(seg.len(), 2);
                assert_eq!(seg[0].to_string(), "p");
                assert_eq!(seg[1].to_string(), "~q");
            }
            other => panic!("unexpected {other:?}"),
        }
        let f = parse_formula("p | q").unwrap();
        match expand(&f) {
            Some(Expansion::Beta(L::BetaOr, l, r)) => {
                assert_eq!(l.to_string(), "p");
                assert_eq!(r.to_string(), "q");
            }
            other => panic!("unexpected {other:?}"),
        }
        let f = parse_formula("forall X. p(X)").unwrap();
        match expand(&f) {
            Some(Expansion::Gamma(qe)) => {
                assert_eq!(qe.label, L::GammaForall);
                let inst = qe.instantiate(&Term::Meta(0));
                assert_eq!(inst.to_string(), "p(?0)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unification_rejects_bound_variable_escape() {
        use crate::parser::parse_formula_with_metas;
        let rules = RuleSet::new();
        let cfg = SearchConfig::default();
        let mut eng = Engine {
            rules: &rules,
            cfg: &cfg,
            gen: NameGen::new(),
            nodes: Vec::new(),
            bind: Bindings::default(),
            deadline: Instant::now() + Duration::from_secs(60),
            gamma_limit: 1,
            bound_hit: false,
            searched: 0,
        };
        // Binding ?0 to the quantified variable would let it escape its
        // scope, so these must not unify.
        let f = parse_formula_with_metas("forall Y. p(Y, ?0)").unwrap();
        let g = parse_formula_with_metas("forall Z. p(Z, Z)").unwrap();
        assert!(!eng.unify_formulas(&f.clone(), &g.clone(), &mut Vec::new()));
        assert!(eng.bind.map.is_empty() || eng.bind.since(0).is_empty());
        // A constant is fine.
        eng.bind = Bindings::default();
        let h = parse_formula_with_metas("forall Z. p(Z, c)").unwrap();
        assert!(eng.unify_formulas(&f, &h, &mut Vec::new()));
        assert_eq!(eng.bind.map.get(&0), Some(&Term::constant("c")));
    }

    #[test]
    fn occurs_check_blocks_cyclic_bindings() {
        use crate::parser::parse_formula_with_metas;
        let rules = RuleSet::new();
        let cfg = SearchConfig::default();
        let mut eng = Engine {
            rules: &rules,
            cfg: &cfg,
            gen: NameGen::new(),
            nodes: Vec::new(),
            bind: Bindings::default(),
            deadline: Instant::now() + Duration::from_secs(60),
            gamma_limit: 1,
            bound_hit: false,
            searched: 0,
        };
        let f = parse_formula_with_metas("p(?0)").unwrap();
        let g = parse_formula_with_metas("p(f(?0))").unwrap();
        assert!(!eng.unify_formulas(&f, &g, &mut Vec::new()));
        // Through a chain of bindings, too.
        eng.bind = Bindings::default();
        eng.bind.bind(1, Term::Meta(0));
        let h = parse_formula_with_metas("p(f(?1))").unwrap();
        assert!(!eng.unify_formulas(&f, &h, &mut Vec::new()));
    }

    #[test]
    fn delta_witness_takes_the_formulas_metavariables() {
        use crate::parser::parse_formula_with_metas;
        let mut gen = NameGen::new();
        // No metavariables: a fresh constant.
        let closed = parse_formula_with_metas("~forall Z. (Z in a => Z in a)").unwrap();
        let w = delta_witness(&closed, &mut gen);
        assert_eq!(w, Term::App("c1".into(), vec![]));
        // With a metavariable: a function of it.
        let open = parse_formula_with_metas("exists Y. p(?1, Y)").unwrap();
        let w = delta_witness(&open, &mut gen);
        assert_eq!(w, Term::App("c2".into(), vec![Term::Meta(1)]));
    }
}
