//! Property tests over randomly generated formulas: printer/parser round
//! trips, the polarity laws, and substitution shape preservation.

use proptest::prelude::*;

use polartab_core::parser::parse_formula_with_metas;
use polartab_core::syntax::{
    free_vars_formula, polarity_of, Formula, Polarity, Subst, Term,
};

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop_oneof![Just("a"), Just("b"), Just("c")].prop_map(Term::constant),
        prop_oneof![Just("X"), Just("Y"), Just("Z")].prop_map(|v| Term::Var(v.to_string())),
        (0usize..4).prop_map(Term::Meta),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        (
            prop_oneof![Just("f"), Just("g"), Just("union")],
            prop::collection::vec(inner, 1..3),
        )
            .prop_map(|(h, args)| Term::App(h.to_string(), args))
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let atom = (
        prop_oneof![Just("p"), Just("q"), Just("in"), Just("subset")],
        prop::collection::vec(arb_term(), 0..3),
    )
        .prop_map(|(p, args)| {
            // Keep the infix predicates binary so printing stays canonical.
            if (p == "in" || p == "subset") && args.len() != 2 {
                Formula::Atom("p".to_string(), args)
            } else {
                Formula::Atom(p.to_string(), args)
            }
        });
    let leaf = prop_oneof![atom, Just(Formula::Top), Just(Formula::Bottom)];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (prop_oneof![Just("X"), Just("Y"), Just("W")], inner.clone())
                .prop_map(|(v, f)| Formula::forall(v.to_string(), f)),
            (prop_oneof![Just("X"), Just("Y"), Just("W")], inner)
                .prop_map(|(v, f)| Formula::exists(v.to_string(), f)),
        ]
    })
}

/// Every subformula position together with the flip count on the way there.
fn positions_with_flips(f: &Formula) -> Vec<(Vec<usize>, usize)> {
    fn walk(f: &Formula, here: Vec<usize>, flips: usize, out: &mut Vec<(Vec<usize>, usize)>) {
        out.push((here.clone(), flips));
        let push = |i: usize, here: &[usize]| {
            let mut p = here.to_vec();
            p.push(i);
            p
        };
        match f {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => {}
            Formula::Not(g) => walk(g, push(0, &here), flips + 1, out),
            Formula::Forall(_, g) | Formula::Exists(_, g) => walk(g, push(0, &here), flips, out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                walk(l, push(0, &here), flips, out);
                walk(r, push(1, &here), flips, out);
            }
            Formula::Implies(l, r) => {
                walk(l, push(0, &here), flips + 1, out);
                walk(r, push(1, &here), flips, out);
            }
            Formula::Iff(..) => {} // polarity undefined below an equivalence
        }
    }
    let mut out = Vec::new();
    walk(f, Vec::new(), 0, &mut out);
    out
}

fn connective_skeleton(f: &Formula) -> String {
    match f {
        Formula::Atom(..) => "A".into(),
        Formula::Top => "T".into(),
        Formula::Bottom => "B".into(),
        Formula::Not(g) => format!("~{}", connective_skeleton(g)),
        Formula::And(l, r) => format!("&({},{})", connective_skeleton(l), connective_skeleton(r)),
        Formula::Or(l, r) => format!("|({},{})", connective_skeleton(l), connective_skeleton(r)),
        Formula::Implies(l, r) => {
            format!(">({},{})", connective_skeleton(l), connective_skeleton(r))
        }
        Formula::Iff(l, r) => format!("=({},{})", connective_skeleton(l), connective_skeleton(r)),
        Formula::Forall(_, g) => format!("F{}", connective_skeleton(g)),
        Formula::Exists(_, g) => format!("E{}", connective_skeleton(g)),
    }
}

proptest! {
    #[test]
    fn print_parse_round_trip(f in arb_formula()) {
        let printed = f.to_string();
        let back = parse_formula_with_metas(&printed).expect("canonical printing parses");
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn polarity_matches_flip_parity(f in arb_formula()) {
        for (path, flips) in positions_with_flips(&f) {
            let expect = if flips % 2 == 0 { Polarity::Positive } else { Polarity::Negative };
            prop_assert_eq!(polarity_of(&f, &path), Ok(expect));
        }
    }

    #[test]
    fn negation_flips_every_position(f in arb_formula()) {
        let negated = Formula::not(f.clone());
        for (path, _) in positions_with_flips(&f) {
            let mut shifted = vec![0];
            shifted.extend(&path);
            prop_assert_eq!(
                polarity_of(&negated, &shifted).unwrap(),
                polarity_of(&f, &path).unwrap().flip()
            );
        }
    }

    #[test]
    fn substitution_preserves_skeleton(f in arb_formula(), t in arb_term()) {
        // Respect the occurs-check invariant: never bind a variable to a
        // term containing itself.
        let mut s = Subst::new();
        if let Some(v) = free_vars_formula(&f)
            .into_iter()
            .find(|v| !polartab_core::syntax::free_vars_term(&t).contains(v))
        {
            s.bind_var(v, t);
        }
        let applied = s.apply_formula(&f);
        prop_assert_eq!(connective_skeleton(&applied), connective_skeleton(&f));
    }

    #[test]
    fn substitution_never_captures(f in arb_formula(), t in arb_term()) {
        // After substituting t for a free variable, every variable free in
        // t stays free in the result (when the variable was really free).
        let tvars = polartab_core::syntax::free_vars_term(&t);
        if let Some(v) = free_vars_formula(&f)
            .into_iter()
            .find(|v| !tvars.contains(v))
        {
            let mut s = Subst::new();
            s.bind_var(v, t.clone());
            let applied = s.apply_formula(&f);
            for tv in tvars {
                prop_assert!(
                    free_vars_formula(&applied).contains(&tv),
                    "{} lost the free variable {}", applied, tv
                );
            }
        }
    }
}
