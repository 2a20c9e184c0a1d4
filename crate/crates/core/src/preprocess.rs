//! Turning axioms into polarized rewrite rules and Skolemizing rule
//! right-hand sides.
//!
//! An axiom `forall xs (P => A)` with atomic `P` becomes a rule `P -> A`
//! usable at positive occurrences; `forall xs (A => P)` becomes the same
//! rule usable at negative occurrences. When the atom is negated, the
//! classical contrapositive yields a rule on the opposite side. An
//! equivalence contributes the rule on both sides. Everything else stays an
//! ordinary assumption.
//!
//! Skolemization replaces, inside a rule's right-hand side, the quantifiers
//! that would otherwise introduce a fresh witness at proof time: positive
//! existentials and negative universals for positive rules, positive
//! universals and negative existentials for negative rules. The Skolem
//! symbol takes the rule's left-hand-side variables first, then the
//! variables of enclosing surviving quantifiers, in binding order — so the
//! witness is uniform across every application of the rule.

use thiserror::Error;

use crate::parser::{Decl, Problem};
use crate::rewrite::{PropRule, RuleError, RuleOrigin, RulePolarity, RuleSet, TermRule};
use crate::syntax::{
    alpha_eq, free_vars_formula, instantiate, Formula, NameGen, Polarity, Sym, Term,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("ill-formed rule: {0}")]
    IllFormedRule(#[from] RuleError),
}

/// Knobs for the axiom-to-rule pipeline. `polarize: false` reproduces
/// plain (unpolarized) deduction-modulo behaviour: every rule becomes
/// two-sided and unskolemized. `orient_axioms: false` leaves every axiom as
/// an assumption, for comparing rule-based and axiom-based search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreprocessOptions {
    pub polarize: bool,
    pub skolemize_rules: bool,
    pub orient_axioms: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            polarize: true,
            skolemize_rules: true,
            orient_axioms: true,
        }
    }
}

/// Output of preprocessing: the rule set, the axioms that did not orient,
/// and the negated goal that seeds the refutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    pub rules: RuleSet,
    pub residual: Vec<(Sym, Formula)>,
    pub goal_name: Sym,
    pub negated_goal: Formula,
}

/// Result of classifying one axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classified {
    pub rules: Vec<PropRule>,
    pub leftover: bool,
}

fn strip_foralls(f: &Formula) -> (Vec<Sym>, &Formula) {
    let mut prefix = Vec::new();
    let mut cur = f;
    while let Formula::Forall(x, body) = cur {
        prefix.push(x.clone());
        cur = body;
    }
    (prefix, cur)
}

fn as_atom(f: &Formula) -> Option<&Formula> {
    matches!(f, Formula::Atom(..)).then_some(f)
}

/// Quantify the right-hand side over variables it uses beyond the
/// left-hand side's, in prefix binding order.
fn requantify(rhs: Formula, lhs: &Formula, prefix: &[Sym], forall: bool) -> Formula {
    let lhs_vars = free_vars_formula(lhs);
    let rhs_vars = free_vars_formula(&rhs);
    let extra: Vec<&Sym> = prefix
        .iter()
        .filter(|v| rhs_vars.contains(*v) && !lhs_vars.contains(*v))
        .collect();
    extra.into_iter().rev().fold(rhs, |acc, v| {
        if forall {
            Formula::forall(v.clone(), acc)
        } else {
            Formula::exists(v.clone(), acc)
        }
    })
}

/// Classify one closed, desugared axiom. Syntax-directed and total: the
/// axiom either yields rules or comes back flagged as a leftover assumption.
pub fn classify_axiom(name: &str, f: &Formula) -> Classified {
    debug_assert!(!f.contains_iff());
    let (prefix, core) = strip_foralls(f);
    let make = |lhs: &Formula, rhs: Formula, polarity: RulePolarity| {
        PropRule::new(name, lhs, rhs, polarity, RuleOrigin::Axiom(name.to_string()))
            .expect("classified rules satisfy the rule invariants by construction")
    };

    if let Formula::Implies(l, r) = core {
        if let Some(p) = as_atom(l) {
            let rhs = requantify((**r).clone(), p, &prefix, true);
            return Classified {
                rules: vec![make(p, rhs, RulePolarity::Positive)],
                leftover: false,
            };
        }
        if let Some(p) = as_atom(r) {
            let rhs = requantify((**l).clone(), p, &prefix, false);
            return Classified {
                rules: vec![make(p, rhs, RulePolarity::Negative)],
                leftover: false,
            };
        }
        if let Formula::Not(q) = &**l {
            if let Some(p) = as_atom(q) {
                let rhs = Formula::not(requantify((**r).clone(), p, &prefix, true));
                return Classified {
                    rules: vec![make(p, rhs, RulePolarity::Negative)],
                    leftover: false,
                };
            }
        }
        if let Formula::Not(q) = &**r {
            if let Some(p) = as_atom(q) {
                let rhs = Formula::not(requantify((**l).clone(), p, &prefix, false));
                return Classified {
                    rules: vec![make(p, rhs, RulePolarity::Positive)],
                    leftover: false,
                };
            }
        }
        return Classified { rules: vec![], leftover: true };
    }

    // A conjunction of two converse implications (a desugared equivalence)
    // with an atomic side contributes the rule on both sides.
    if let Formula::And(c1, c2) = core {
        if let (Formula::Implies(b, c), Formula::Implies(d, e)) = (&**c1, &**c2) {
            if alpha_eq(b, e) && alpha_eq(c, d) {
                let (p, a) = if as_atom(b).is_some() {
                    (&**b, &**c)
                } else if as_atom(c).is_some() {
                    (&**c, &**b)
                } else {
                    return Classified { rules: vec![], leftover: true };
                };
                let lhs_vars = free_vars_formula(p);
                let needs_split = free_vars_formula(a).iter().any(|v| !lhs_vars.contains(v));
                let rules = if needs_split {
                    vec![
                        make(p, requantify(a.clone(), p, &prefix, true), RulePolarity::Positive),
                        make(p, requantify(a.clone(), p, &prefix, false), RulePolarity::Negative),
                    ]
                } else {
                    vec![make(p, a.clone(), RulePolarity::Both)]
                };
                return Classified { rules, leftover: false };
            }
        }
    }

    Classified { rules: vec![], leftover: true }
}

/// Skolemize one rule for use on the given side. Quantifiers of the
/// appropriate polarity are replaced by terms over a fresh symbol; the
/// symbol is generated once here and reused at every rule application.
pub fn skolemize_rule(rule: &PropRule, side: Polarity, gen: &mut NameGen) -> PropRule {
    fn walk(
        f: &Formula,
        pol: Polarity,
        side: Polarity,
        scope: &mut Vec<Sym>,
        gen: &mut NameGen,
    ) -> Formula {
        match f {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => f.clone(),
            Formula::Not(g) => Formula::not(walk(g, pol.flip(), side, scope, gen)),
            Formula::And(l, r) => Formula::and(
                walk(l, pol, side, scope, gen),
                walk(r, pol, side, scope, gen),
            ),
            Formula::Or(l, r) => Formula::or(
                walk(l, pol, side, scope, gen),
                walk(r, pol, side, scope, gen),
            ),
            Formula::Implies(l, r) => Formula::implies(
                walk(l, pol.flip(), side, scope, gen),
                walk(r, pol, side, scope, gen),
            ),
            Formula::Iff(..) => unreachable!("rules are desugared before skolemization"),
            Formula::Forall(x, body) => {
                let replace = match side {
                    Polarity::Positive => pol == Polarity::Negative,
                    Polarity::Negative => pol == Polarity::Positive,
                };
                if replace {
                    let sym = gen.fresh_symbol("sk");
                    let witness =
                        Term::App(sym, scope.iter().map(|v| Term::Var(v.clone())).collect());
                    let body = instantiate(x, body, &witness);
                    walk(&body, pol, side, scope, gen)
                } else {
                    scope.push(x.clone());
                    let body = walk(body, pol, side, scope, gen);
                    scope.pop();
                    Formula::forall(x.clone(), body)
                }
            }
            Formula::Exists(x, body) => {
                let replace = match side {
                    Polarity::Positive => pol == Polarity::Positive,
                    Polarity::Negative => pol == Polarity::Negative,
                };
                if replace {
                    let sym = gen.fresh_symbol("sk");
                    let witness =
                        Term::App(sym, scope.iter().map(|v| Term::Var(v.clone())).collect());
                    let body = instantiate(x, body, &witness);
                    walk(&body, pol, side, scope, gen)
                } else {
                    scope.push(x.clone());
                    let body = walk(body, pol, side, scope, gen);
                    scope.pop();
                    Formula::exists(x.clone(), body)
                }
            }
        }
    }

    debug_assert!(!rule.skolemized);
    let mut scope = rule.lhs_vars();
    let rhs = walk(&rule.rhs, Polarity::Positive, side, &mut scope, gen);
    PropRule {
        rhs,
        skolemized: true,
        ..rule.clone()
    }
}

fn insert_prop(rules: &mut RuleSet, r: PropRule) {
    match r.polarity {
        RulePolarity::Positive => rules.pos_rules.push(r),
        RulePolarity::Negative => rules.neg_rules.push(r),
        RulePolarity::Both => {
            rules.pos_rules.push(r.clone());
            rules.neg_rules.push(r);
        }
    }
}

/// Run the whole pipeline on a parsed problem: explicit rule declarations
/// go straight into the rule set, each axiom is classified, leftovers stay
/// assumptions, and the goal is negated.
pub fn preprocess_problem(
    problem: &Problem,
    opts: &PreprocessOptions,
    gen: &mut NameGen,
) -> Result<Preprocessed, PreprocessError> {
    let mut rules = RuleSet::new();
    let mut residual = Vec::new();
    let mut goal = None;

    for decl in &problem.decls {
        match decl {
            Decl::Axiom { name, formula } => {
                if !opts.orient_axioms {
                    residual.push((name.clone(), formula.clone()));
                    continue;
                }
                let classified = classify_axiom(name, formula);
                // Plain deduction modulo can only orient an equivalence
                // whose two directions make one two-sided rule; anything
                // the polarized classifier handled beyond that (directional
                // axioms, per-direction requantification) stays an
                // assumption when polarization is off.
                let usable = if opts.polarize {
                    classified.rules
                } else {
                    match classified.rules.as_slice() {
                        [r] if r.polarity == RulePolarity::Both => classified.rules,
                        _ => Vec::new(),
                    }
                };
                if usable.is_empty() {
                    residual.push((name.clone(), formula.clone()));
                } else {
                    for r in usable {
                        insert_prop(&mut rules, r);
                    }
                }
            }
            Decl::PropRule { name, positive, lhs, rhs } => {
                let polarity = match positive {
                    None => RulePolarity::Both,
                    Some(true) => RulePolarity::Positive,
                    Some(false) => RulePolarity::Negative,
                };
                let r = PropRule::new(name.clone(), lhs, rhs.clone(), polarity, RuleOrigin::Declared)?;
                if !opts.polarize && polarity != RulePolarity::Both {
                    // No polarized rules without polarization: keep the
                    // declaration as the axiom it stands for.
                    let implication = match positive {
                        Some(true) => Formula::implies(lhs.clone(), rhs.clone()),
                        Some(false) => Formula::implies(rhs.clone(), lhs.clone()),
                        None => unreachable!("two-sided rules are kept"),
                    };
                    let closed = free_vars_formula(&implication)
                        .into_iter()
                        .rev()
                        .fold(implication, |acc, v| Formula::forall(v, acc));
                    residual.push((name.clone(), closed));
                } else {
                    insert_prop(&mut rules, r);
                }
            }
            Decl::TermRule { name, lhs, rhs } => {
                rules
                    .term_rules
                    .push(TermRule::new(name.clone(), lhs.clone(), rhs.clone())?);
            }
            Decl::Goal { name, formula } => {
                goal = Some((name.clone(), Formula::not(formula.clone())));
            }
        }
    }

    if opts.polarize && opts.skolemize_rules {
        rules.pos_rules = rules
            .pos_rules
            .iter()
            .map(|r| skolemize_rule(r, Polarity::Positive, gen))
            .collect();
        rules.neg_rules = rules
            .neg_rules
            .iter()
            .map(|r| skolemize_rule(r, Polarity::Negative, gen))
            .collect();
    }

    rules.validate_names()?;
    let (goal_name, negated_goal) = goal.expect("validated problems carry a goal");
    Ok(Preprocessed {
        rules,
        residual,
        goal_name,
        negated_goal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::syntax::polarity_of;

    fn gen_for(problem: &Problem) -> NameGen {
        NameGen::with_reserved(problem.signature_symbols())
    }

    const INCLUSION: &str = "\
axiom incl: forall X. forall Y. (X subset Y <=> (forall Z. (Z in X => Z in Y))).
goal refl: a subset a.
";

    #[test]
    fn inclusion_axiom_orients_to_both_sides() {
        let p = Problem::parse("subset_refl", INCLUSION).unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        assert!(prep.residual.is_empty());
        assert_eq!(prep.negated_goal.to_string(), "~(a subset a)");

        assert_eq!(prep.rules.pos_rules.len(), 1);
        assert_eq!(prep.rules.neg_rules.len(), 1);
        let pos = &prep.rules.pos_rules[0];
        let neg = &prep.rules.neg_rules[0];
        assert_eq!(pos.name, "incl");
        assert_eq!(neg.name, "incl");

        // Positive side keeps its universal quantifier.
        let expected_pos = parse_formula("forall W. (W in X => W in Y)").unwrap();
        assert!(alpha_eq(&pos.rhs, &expected_pos), "positive rhs: {}", pos.rhs);

        // Negative side replaces it with a uniform two-argument witness.
        match &neg.rhs {
            Formula::Implies(l, r) => {
                let (wl, wr) = match (&**l, &**r) {
                    (Formula::Atom(pl, al), Formula::Atom(pr, ar)) => {
                        assert_eq!(pl, "in");
                        assert_eq!(pr, "in");
                        assert_eq!(al[1], Term::Var("X".into()));
                        assert_eq!(ar[1], Term::Var("Y".into()));
                        (al[0].clone(), ar[0].clone())
                    }
                    other => panic!("unexpected rhs shape {other:?}"),
                };
                assert_eq!(wl, wr);
                match wl {
                    Term::App(sym, args) => {
                        assert_eq!(args, vec![Term::Var("X".into()), Term::Var("Y".into())]);
                        assert!(sym.starts_with("sk"));
                    }
                    other => panic!("witness is not a function term: {other}"),
                }
            }
            other => panic!("unexpected rhs {other}"),
        }
        assert!(neg.skolemized);
    }

    #[test]
    fn implication_with_atomic_antecedent_goes_positive() {
        // Smallest one-directional case: the rule fires only on positive
        // occurrences of the antecedent atom.
        let p = Problem::parse(
            "p",
            "axiom mono: forall X. (X in a => X in b).\ngoal g: c in a.",
        )
        .unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        assert_eq!(prep.rules.pos_rules.len(), 1);
        assert!(prep.rules.neg_rules.is_empty());
        let r = &prep.rules.pos_rules[0];
        assert_eq!(r.lhs_formula().to_string(), "(X in a)");
        assert_eq!(r.rhs.to_string(), "(X in b)");
    }

    #[test]
    fn implication_with_atomic_consequent_goes_negative() {
        let p = Problem::parse(
            "p",
            "axiom def: forall X. ((p(X) & q(X)) => r(X)).\ngoal g: r(c).",
        )
        .unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        assert!(prep.rules.pos_rules.is_empty());
        assert_eq!(prep.rules.neg_rules.len(), 1);
        let r = &prep.rules.neg_rules[0];
        assert_eq!(r.lhs_formula().to_string(), "r(X)");
        assert_eq!(r.rhs.to_string(), "(p(X) & q(X))");
    }

    #[test]
    fn negated_atom_cases_swap_sides() {
        // The consequents are compound, so only the contrapositive readings
        // apply: a negated-atom antecedent feeds the negative side, a
        // negated-atom consequent the positive side.
        let p = Problem::parse(
            "p",
            "axiom a1: forall X. (~p(X) => (q(X) & s(X))).\n\
             axiom a2: forall X. ((q(X) & s(X)) => ~r(X)).\n\
             goal g: s(c).",
        )
        .unwrap();
        let c1 = match &p.decls[0] {
            Decl::Axiom { name, formula } => classify_axiom(name, formula),
            _ => unreachable!(),
        };
        assert_eq!(c1.rules.len(), 1);
        assert_eq!(c1.rules[0].polarity, RulePolarity::Negative);
        assert_eq!(c1.rules[0].lhs_formula().to_string(), "p(X)");
        assert_eq!(c1.rules[0].rhs.to_string(), "~(q(X) & s(X))");

        let c2 = match &p.decls[1] {
            Decl::Axiom { name, formula } => classify_axiom(name, formula),
            _ => unreachable!(),
        };
        assert_eq!(c2.rules.len(), 1);
        assert_eq!(c2.rules[0].polarity, RulePolarity::Positive);
        assert_eq!(c2.rules[0].lhs_formula().to_string(), "r(X)");
        assert_eq!(c2.rules[0].rhs.to_string(), "~(q(X) & s(X))");
    }

    #[test]
    fn atomic_implication_sides_take_precedence_over_contraposition() {
        // With an atomic consequent, the direct reading wins over the
        // negated-atom one; with an atomic antecedent, likewise.
        let p = Problem::parse(
            "p",
            "axiom a1: forall X. (~p(X) => q(X)).\n\
             axiom a2: forall X. (q(X) => ~r(X)).\n\
             goal g: q(c).",
        )
        .unwrap();
        let c1 = match &p.decls[0] {
            Decl::Axiom { name, formula } => classify_axiom(name, formula),
            _ => unreachable!(),
        };
        assert_eq!(c1.rules.len(), 1);
        assert_eq!(c1.rules[0].polarity, RulePolarity::Negative);
        assert_eq!(c1.rules[0].lhs_formula().to_string(), "q(X)");
        assert_eq!(c1.rules[0].rhs.to_string(), "~p(X)");

        let c2 = match &p.decls[1] {
            Decl::Axiom { name, formula } => classify_axiom(name, formula),
            _ => unreachable!(),
        };
        assert_eq!(c2.rules.len(), 1);
        assert_eq!(c2.rules[0].polarity, RulePolarity::Positive);
        assert_eq!(c2.rules[0].lhs_formula().to_string(), "q(X)");
        assert_eq!(c2.rules[0].rhs.to_string(), "~r(X)");
    }

    #[test]
    fn disjunctive_axiom_is_leftover() {
        let p = Problem::parse("p", "axiom a: forall X. (p(X) | q(X)).\ngoal g: s.").unwrap();
        let c = match &p.decls[0] {
            Decl::Axiom { name, formula } => classify_axiom(name, formula),
            _ => unreachable!(),
        };
        assert!(c.leftover);
        assert!(c.rules.is_empty());
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        assert!(prep.rules.is_empty());
        assert_eq!(prep.residual.len(), 1);
    }

    #[test]
    fn bare_facts_stay_assumptions() {
        let p = Problem::parse("p", "axiom f: forall X. p(X).\ngoal g: p(a).").unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        assert!(prep.rules.is_empty());
        assert_eq!(prep.residual.len(), 1);
    }

    #[test]
    fn positive_rule_skolemizes_positive_existential() {
        let p = Problem::parse(
            "p",
            "rewrite+ r: p(X) -> exists W. q(X, W).\ngoal g: p(a).",
        )
        .unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        let r = &prep.rules.pos_rules[0];
        match &r.rhs {
            Formula::Atom(q, args) => {
                assert_eq!(q, "q");
                assert_eq!(args[0], Term::Var("X".into()));
                assert_eq!(args[1], Term::App("sk1".into(), vec![Term::Var("X".into())]));
            }
            other => panic!("unexpected rhs {other}"),
        }
    }

    #[test]
    fn negative_rule_keeps_positive_existential() {
        let p = Problem::parse(
            "p",
            "rewrite- r: p(X) -> exists W. q(X, W).\ngoal g: p(a).",
        )
        .unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        let r = &prep.rules.neg_rules[0];
        assert!(matches!(r.rhs, Formula::Exists(..)));
        assert!(r.skolemized);
    }

    #[test]
    fn skolem_arguments_include_surviving_quantifiers_in_scope_order() {
        // Positive rule: the universal survives, the existential beneath it
        // is replaced and must mention both the rule variable and the
        // surviving quantifier variable.
        let p = Problem::parse(
            "p",
            "rewrite+ r: p(X) -> forall U. exists W. q(X, U, W).\ngoal g: p(a).",
        )
        .unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        let r = &prep.rules.pos_rules[0];
        match &r.rhs {
            Formula::Forall(u, body) => match &**body {
                Formula::Atom(_, args) => {
                    assert_eq!(
                        args[2],
                        Term::App(
                            "sk1".into(),
                            vec![Term::Var("X".into()), Term::Var(u.clone())]
                        )
                    );
                }
                other => panic!("unexpected body {other}"),
            },
            other => panic!("unexpected rhs {other}"),
        }
    }

    /// Polarity-annotated traversal: no quantifier of the replaced kind at
    /// the replaced polarity survives skolemization.
    fn assert_skolemized_shape(rhs: &Formula, side: Polarity) {
        fn walk(f: &Formula, pol: Polarity, side: Polarity) {
            match f {
                Formula::Atom(..) | Formula::Top | Formula::Bottom => {}
                Formula::Not(g) => walk(g, pol.flip(), side),
                Formula::And(l, r) | Formula::Or(l, r) => {
                    walk(l, pol, side);
                    walk(r, pol, side);
                }
                Formula::Implies(l, r) => {
                    walk(l, pol.flip(), side);
                    walk(r, pol, side);
                }
                Formula::Iff(..) => panic!("iff survived desugaring"),
                Formula::Forall(_, g) => {
                    let banned = match side {
                        Polarity::Positive => Polarity::Negative,
                        Polarity::Negative => Polarity::Positive,
                    };
                    assert_ne!(pol, banned, "universal at a skolemizable polarity survived");
                    walk(g, pol, side);
                }
                Formula::Exists(_, g) => {
                    assert_ne!(pol, side, "existential at a skolemizable polarity survived");
                    walk(g, pol, side);
                }
            }
        }
        walk(rhs, Polarity::Positive, side);
    }

    #[test]
    fn skolemized_rules_contain_no_replaced_quantifiers() {
        let text = "\
rewrite  d: p(X) -> exists W. forall U. (q(X, W) => r(U)).
goal g: p(a).
";
        let p = Problem::parse("p", text).unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        assert_skolemized_shape(&prep.rules.pos_rules[0].rhs, Polarity::Positive);
        assert_skolemized_shape(&prep.rules.neg_rules[0].rhs, Polarity::Negative);
    }

    #[test]
    fn extra_rhs_variables_requantify() {
        let p = Problem::parse(
            "p",
            "axiom a: forall X. forall Y. (p(X) => q(X, Y)).\ngoal g: p(a).",
        )
        .unwrap();
        let c = match &p.decls[0] {
            Decl::Axiom { name, formula } => classify_axiom(name, formula),
            _ => unreachable!(),
        };
        assert_eq!(c.rules.len(), 1);
        assert_eq!(c.rules[0].rhs.to_string(), "(forall Y. q(X, Y))");
    }

    #[test]
    fn declared_rule_with_variable_lhs_is_rejected() {
        let p = Problem::parse("p", "rule_term bad: X -> a.\ngoal g: q.").unwrap();
        let mut gen = gen_for(&p);
        let err = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap_err();
        assert!(matches!(
            err,
            PreprocessError::IllFormedRule(RuleError::VariableLhs(_))
        ));
    }

    #[test]
    fn declared_rule_with_compound_lhs_is_rejected() {
        let p = Problem::parse("p", "rewrite bad: p & q -> r.\ngoal g: q.").unwrap();
        let mut gen = gen_for(&p);
        let err = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap_err();
        assert!(matches!(
            err,
            PreprocessError::IllFormedRule(RuleError::NonAtomicLhs(_))
        ));
    }

    #[test]
    fn declared_rule_bodies_are_desugared() {
        let p = Problem::parse(
            "p",
            "rewrite+ r: p(X) -> (q(X) <=> exists W. s(X, W)).\ngoal g: p(a).",
        )
        .unwrap();
        let mut gen = gen_for(&p);
        let prep = preprocess_problem(&p, &PreprocessOptions::default(), &mut gen).unwrap();
        let r = &prep.rules.pos_rules[0];
        assert!(!r.rhs.contains_iff());
        // The equivalence desugars to two implications, so the existential
        // lands at both polarities: one side is Skolemized, the other kept.
        let printed = r.rhs.to_string();
        assert!(printed.contains("sk1(X)"), "{printed}");
        assert!(printed.contains("exists"), "{printed}");
    }

    #[test]
    fn no_polarize_gives_two_sided_unskolemized_rules() {
        let p = Problem::parse("subset_refl", INCLUSION).unwrap();
        let mut gen = gen_for(&p);
        let opts = PreprocessOptions {
            polarize: false,
            ..Default::default()
        };
        let prep = preprocess_problem(&p, &opts, &mut gen).unwrap();
        assert_eq!(prep.rules.pos_rules.len(), 1);
        assert_eq!(prep.rules.pos_rules, prep.rules.neg_rules);
        let r = &prep.rules.pos_rules[0];
        assert_eq!(r.polarity, RulePolarity::Both);
        assert!(!r.skolemized);
        assert!(matches!(r.rhs, Formula::Forall(..)));
    }

    #[test]
    fn no_polarize_orients_only_two_sided_axioms() {
        // A directional axiom and an equivalence whose directions would
        // requantify differently cannot be plain rewrite rules; without
        // polarization they stay assumptions, and polarized declarations
        // fall back to their axiom forms.
        let text = "\
axiom dir: forall X. (p(X) => q(X)).
axiom vary: forall X. (s <=> (s | r(X, a))).
rewrite- decl: t(X) -> q(X).
goal g: s.
";
        let p = Problem::parse("p", text).unwrap();
        let mut gen = gen_for(&p);
        let opts = PreprocessOptions {
            polarize: false,
            ..Default::default()
        };
        let prep = preprocess_problem(&p, &opts, &mut gen).unwrap();
        assert!(prep.rules.pos_rules.is_empty());
        assert!(prep.rules.neg_rules.is_empty());
        let names: Vec<&str> = prep.residual.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["dir", "vary", "decl"]);
        // The demoted declaration reads as the axiom it stands for.
        let decl = &prep.residual[2].1;
        assert_eq!(decl.to_string(), "(forall X. (q(X) => t(X)))");
    }

    #[test]
    fn no_skolemize_keeps_polarized_quantifiers() {
        let p = Problem::parse("subset_refl", INCLUSION).unwrap();
        let mut gen = gen_for(&p);
        let opts = PreprocessOptions {
            skolemize_rules: false,
            ..Default::default()
        };
        let prep = preprocess_problem(&p, &opts, &mut gen).unwrap();
        assert!(matches!(prep.rules.neg_rules[0].rhs, Formula::Forall(..)));
        assert!(!prep.rules.neg_rules[0].skolemized);
    }

    #[test]
    fn polarity_of_rule_quantifier_drives_the_example() {
        // In the inclusion right-hand side the universal sits at the root,
        // a positive occurrence, which is why only the negative side
        // replaces it.
        let rhs = parse_formula("forall Z. (Z in a => Z in b)").unwrap();
        assert_eq!(polarity_of(&rhs, &[]).unwrap(), Polarity::Positive);
    }
}
