//! Serializable proof traces.
//!
//! A trace is a tree of inference records. Each record names its parent,
//! the rule label, the formula(s) it adds to the branch, and enough detail
//! (witness term, metavariable, rewrite steps, closing pair) for an
//! independent checker to replay it. Formulas are stored as written during
//! the proof, with metavariables unresolved; the global assignment that
//! closes every branch simultaneously is stored separately at the end.
//!
//! The text format is line-oriented:
//!
//! ```text
//! polartab-trace 1
//! problem subset_refl
//! mode polarize=true skolemize=true orient=true
//! node 0 parent - premise
//!   formula ~(a subset a)
//! node 1 parent 0 rw target 0.0
//!   formula ~((sk1(a, a) in a) => (sk1(a, a) in a))
//!   step prop incl neg path 0 subst { X -> a; Y -> a }
//! node 2 parent 1 alpha_nimp target 1.0
//!   formula (sk1(a, a) in a)
//!   formula ~(sk1(a, a) in a)
//! node 3 parent 2 close
//!   pair 2.0 2.1
//!   bind { }
//! global { }
//! end
//! ```

use std::fmt;

use thiserror::Error;

use crate::parser::{parse_formula_with_metas, parse_subst, parse_term_with_metas};
use crate::rewrite::{RewriteStep, StepRule};
use crate::syntax::{Formula, MetaId, Polarity, Subst, Sym, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("malformed trace, line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

fn malformed(line: usize, msg: impl Into<String>) -> TraceError {
    TraceError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Branch-node labels: closures, the non-branching and branching
/// propositional rules, the quantifier rules, literal rewriting, and
/// premises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleLabel {
    Premise,
    Closure,
    ClosureBot,
    ClosureNotTop,
    AlphaNotNot,
    AlphaAnd,
    AlphaNotOr,
    AlphaNotImplies,
    BetaOr,
    BetaNotAnd,
    BetaImplies,
    DeltaExists,
    DeltaNotForall,
    GammaForall,
    GammaNotExists,
    Rw,
}

impl RuleLabel {
    pub const ALL: [RuleLabel; 16] = [
        RuleLabel::Premise,
        RuleLabel::Closure,
        RuleLabel::ClosureBot,
        RuleLabel::ClosureNotTop,
        RuleLabel::AlphaNotNot,
        RuleLabel::AlphaAnd,
        RuleLabel::AlphaNotOr,
        RuleLabel::AlphaNotImplies,
        RuleLabel::BetaOr,
        RuleLabel::BetaNotAnd,
        RuleLabel::BetaImplies,
        RuleLabel::DeltaExists,
        RuleLabel::DeltaNotForall,
        RuleLabel::GammaForall,
        RuleLabel::GammaNotExists,
        RuleLabel::Rw,
    ];

    pub fn token(self) -> &'static str {
        match self {
            RuleLabel::Premise => "premise",
            RuleLabel::Closure => "close",
            RuleLabel::ClosureBot => "close_bot",
            RuleLabel::ClosureNotTop => "close_ntop",
            RuleLabel::AlphaNotNot => "alpha_nn",
            RuleLabel::AlphaAnd => "alpha_and",
            RuleLabel::AlphaNotOr => "alpha_nor",
            RuleLabel::AlphaNotImplies => "alpha_nimp",
            RuleLabel::BetaOr => "beta_or",
            RuleLabel::BetaNotAnd => "beta_nand",
            RuleLabel::BetaImplies => "beta_imp",
            RuleLabel::DeltaExists => "delta_ex",
            RuleLabel::DeltaNotForall => "delta_nall",
            RuleLabel::GammaForall => "gamma_all",
            RuleLabel::GammaNotExists => "gamma_nex",
            RuleLabel::Rw => "rw",
        }
    }

    pub fn from_token(s: &str) -> Option<RuleLabel> {
        RuleLabel::ALL.into_iter().find(|l| l.token() == s)
    }

    pub fn is_closure(self) -> bool {
        matches!(
            self,
            RuleLabel::Closure | RuleLabel::ClosureBot | RuleLabel::ClosureNotTop
        )
    }

    pub fn is_beta(self) -> bool {
        matches!(
            self,
            RuleLabel::BetaOr | RuleLabel::BetaNotAnd | RuleLabel::BetaImplies
        )
    }
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// Which segment of a branching rule a node carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaSide {
    Left,
    Right,
}

/// Reference to one formula of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaRef {
    pub node: usize,
    pub index: usize,
}

impl fmt::Display for FormulaRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.index)
    }
}

/// What closed the branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    Pair(FormulaRef, FormulaRef),
    Bottom(FormulaRef),
    NotTop(FormulaRef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeDetail {
    None,
    /// Fresh witness term introduced by a delta rule.
    Witness(Term),
    /// Fresh metavariable introduced by a gamma rule.
    Meta(MetaId),
    /// Recorded single rewrite steps of a literal-rewrite node.
    Steps(Vec<RewriteStep>),
    /// Rewrite details left implicit, to be reconstructed by the checker.
    ElidedSteps,
    Closure {
        kind: ClosureKind,
        bindings: Subst,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    pub parent: Option<usize>,
    pub label: RuleLabel,
    pub target: Option<FormulaRef>,
    pub side: Option<BetaSide>,
    pub formulas: Vec<Formula>,
    pub detail: NodeDetail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub problem: Sym,
    pub polarize: bool,
    pub skolemize: bool,
    pub orient: bool,
    pub nodes: Vec<TraceNode>,
    /// Resolved global metavariable assignment.
    pub global: Subst,
}

impl ProofTrace {
    /// Number of expansion applications: every non-premise, non-closure
    /// record, with the two segments of a branching step counted once.
    pub fn expansion_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| {
                !matches!(n.label, RuleLabel::Premise)
                    && !n.label.is_closure()
                    && n.side != Some(BetaSide::Right)
            })
            .count()
    }

    pub fn closure_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.label.is_closure()).count()
    }

    pub fn gamma_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.label, RuleLabel::GammaForall | RuleLabel::GammaNotExists))
            .count()
    }

    /// Total recorded single rewrite steps.
    pub fn rewrite_step_count(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match &n.detail {
                NodeDetail::Steps(steps) => steps.len(),
                _ => 0,
            })
            .sum()
    }

    /// Drop rewrite-step details, keeping only source and target formulas.
    pub fn elide_rewrites(&self) -> ProofTrace {
        let mut out = self.clone();
        for n in &mut out.nodes {
            if matches!(n.detail, NodeDetail::Steps(_)) {
                n.detail = NodeDetail::ElidedSteps;
            }
        }
        out
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("polartab-trace 1\n");
        out.push_str(&format!("problem {}\n", self.problem));
        out.push_str(&format!(
            "mode polarize={} skolemize={} orient={}\n",
            self.polarize, self.skolemize, self.orient
        ));
        for (id, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!(
                "node {id} parent {} {}",
                n.parent.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
                n.label.token()
            ));
            if let Some(t) = n.target {
                out.push_str(&format!(" target {t}"));
            }
            match n.side {
                Some(BetaSide::Left) => out.push_str(" side left"),
                Some(BetaSide::Right) => out.push_str(" side right"),
                None => {}
            }
            out.push('\n');
            for f in &n.formulas {
                out.push_str(&format!("  formula {f}\n"));
            }
            match &n.detail {
                NodeDetail::None => {}
                NodeDetail::Witness(t) => out.push_str(&format!("  witness {t}\n")),
                NodeDetail::Meta(m) => out.push_str(&format!("  meta ?{m}\n")),
                NodeDetail::Steps(steps) => {
                    for s in steps {
                        out.push_str(&format!("  {}\n", format_step(s)));
                    }
                }
                NodeDetail::ElidedSteps => out.push_str("  steps elided\n"),
                NodeDetail::Closure { kind, bindings } => {
                    match kind {
                        ClosureKind::Pair(a, b) => out.push_str(&format!("  pair {a} {b}\n")),
                        ClosureKind::Bottom(r) => out.push_str(&format!("  bot {r}\n")),
                        ClosureKind::NotTop(r) => out.push_str(&format!("  ntop {r}\n")),
                    }
                    out.push_str(&format!("  bind {}\n", format_subst(bindings)));
                }
            }
        }
        out.push_str(&format!("global {}\n", format_subst(&self.global)));
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<ProofTrace, TraceError> {
        TraceParser::new(text).parse()
    }
}

fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        "-".to_string()
    } else {
        path.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn format_subst(s: &Subst) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (v, t) in s.vars() {
        parts.push(format!("{v} -> {t}"));
    }
    for (m, t) in s.metas() {
        parts.push(format!("?{m} -> {t}"));
    }
    if parts.is_empty() {
        "{ }".to_string()
    } else {
        format!("{{ {} }}", parts.join("; "))
    }
}

fn format_step(s: &RewriteStep) -> String {
    match &s.rule {
        StepRule::Term(name) => format!(
            "step term {name} path {} term {} subst {}",
            format_path(&s.path),
            format_path(s.term_path.as_deref().unwrap_or(&[])),
            format_subst(&s.subst)
        ),
        StepRule::Prop(name, side) => format!(
            "step prop {name} {side} path {} subst {}",
            format_path(&s.path),
            format_subst(&s.subst)
        ),
    }
}

struct TraceParser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> TraceParser<'a> {
    fn new(text: &'a str) -> TraceParser<'a> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        TraceParser { lines, pos: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied();
        if l.is_some() {
            self.pos += 1;
        }
        l
    }

    fn peek_line(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn parse(&mut self) -> Result<ProofTrace, TraceError> {
        let (ln, header) = self.next_line().ok_or_else(|| malformed(0, "empty trace"))?;
        if header != "polartab-trace 1" {
            return Err(malformed(ln, "missing polartab-trace header"));
        }
        let (ln, problem_line) = self
            .next_line()
            .ok_or_else(|| malformed(ln, "missing problem line"))?;
        let problem = problem_line
            .strip_prefix("problem ")
            .ok_or_else(|| malformed(ln, "expected `problem NAME`"))?
            .trim()
            .to_string();
        let (ln, mode_line) = self
            .next_line()
            .ok_or_else(|| malformed(ln, "missing mode line"))?;
        let rest = mode_line
            .strip_prefix("mode ")
            .ok_or_else(|| malformed(ln, "expected `mode ...`"))?;
        let mut polarize = None;
        let mut skolemize = None;
        let mut orient = None;
        for field in rest.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| malformed(ln, "mode fields are key=value"))?;
            let b = match value {
                "true" => true,
                "false" => false,
                _ => return Err(malformed(ln, "mode values are true or false")),
            };
            match key {
                "polarize" => polarize = Some(b),
                "skolemize" => skolemize = Some(b),
                "orient" => orient = Some(b),
                other => return Err(malformed(ln, format!("unknown mode field {other}"))),
            }
        }
        let polarize = polarize.ok_or_else(|| malformed(ln, "mode is missing polarize"))?;
        let skolemize = skolemize.ok_or_else(|| malformed(ln, "mode is missing skolemize"))?;
        let orient = orient.unwrap_or(true);

        let mut nodes = Vec::new();
        loop {
            let (ln, line) = self
                .peek_line()
                .ok_or_else(|| malformed(0, "trace ends before global section"))?;
            if line.starts_with("global") {
                break;
            }
            self.next_line();
            let node = self.parse_node(ln, line, nodes.len())?;
            nodes.push(node);
        }

        let (ln, global_line) = self.next_line().expect("peeked above");
        let global_text = global_line
            .strip_prefix("global ")
            .or(if global_line == "global" { Some("{ }") } else { None })
            .ok_or_else(|| malformed(ln, "expected `global { ... }`"))?;
        let global = parse_subst(global_text.trim())
            .map_err(|e| malformed(ln, format!("bad global assignment: {e}")))?;

        let (ln, end) = self
            .next_line()
            .ok_or_else(|| malformed(ln, "missing end marker"))?;
        if end != "end" {
            return Err(malformed(ln, "expected `end`"));
        }

        Ok(ProofTrace {
            problem,
            polarize,
            skolemize,
            orient,
            nodes,
            global,
        })
    }

    fn parse_node(&mut self, ln: usize, line: &str, expect_id: usize) -> Result<TraceNode, TraceError> {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() < 4 || words[0] != "node" || words[2] != "parent" {
            return Err(malformed(ln, "expected `node ID parent P LABEL ...`"));
        }
        let id: usize = words[1]
            .parse()
            .map_err(|_| malformed(ln, "bad node id"))?;
        if id != expect_id {
            return Err(malformed(ln, format!("node ids must be sequential, expected {expect_id}")));
        }
        let parent = match words[3] {
            "-" => None,
            p => Some(p.parse().map_err(|_| malformed(ln, "bad parent id"))?),
        };
        let label = RuleLabel::from_token(words.get(4).copied().unwrap_or(""))
            .ok_or_else(|| malformed(ln, format!("unknown rule label {:?}", words.get(4))))?;
        let mut target = None;
        let mut side = None;
        let mut i = 5;
        while i < words.len() {
            match words[i] {
                "target" => {
                    let r = words
                        .get(i + 1)
                        .ok_or_else(|| malformed(ln, "target needs a NODE.INDEX reference"))?;
                    target = Some(parse_ref(ln, r)?);
                    i += 2;
                }
                "side" => {
                    side = Some(match words.get(i + 1).copied() {
                        Some("left") => BetaSide::Left,
                        Some("right") => BetaSide::Right,
                        _ => return Err(malformed(ln, "side is left or right")),
                    });
                    i += 2;
                }
                other => return Err(malformed(ln, format!("unexpected field {other}"))),
            }
        }

        let mut formulas = Vec::new();
        let mut steps: Vec<RewriteStep> = Vec::new();
        let mut elided = false;
        let mut witness = None;
        let mut meta = None;
        let mut closure_kind = None;
        let mut bindings = None;
        while let Some((dln, dline)) = self.peek_line() {
            if dline.starts_with("node ") || dline.starts_with("global") {
                break;
            }
            self.next_line();
            if let Some(rest) = dline.strip_prefix("formula ") {
                let f = parse_formula_with_metas(rest.trim())
                    .map_err(|e| malformed(dln, format!("bad formula: {e}")))?;
                formulas.push(f);
            } else if dline == "steps elided" {
                elided = true;
            } else if let Some(rest) = dline.strip_prefix("step ") {
                steps.push(parse_step(dln, rest)?);
            } else if let Some(rest) = dline.strip_prefix("witness ") {
                let t = parse_term_with_metas(rest.trim())
                    .map_err(|e| malformed(dln, format!("bad witness: {e}")))?;
                witness = Some(t);
            } else if let Some(rest) = dline.strip_prefix("meta ") {
                let rest = rest.trim();
                let m = rest
                    .strip_prefix('?')
                    .and_then(|d| d.parse::<MetaId>().ok())
                    .ok_or_else(|| malformed(dln, "expected `meta ?N`"))?;
                meta = Some(m);
            } else if let Some(rest) = dline.strip_prefix("pair ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(malformed(dln, "expected `pair REF REF`"));
                }
                closure_kind = Some(ClosureKind::Pair(
                    parse_ref(dln, parts[0])?,
                    parse_ref(dln, parts[1])?,
                ));
            } else if let Some(rest) = dline.strip_prefix("bot ") {
                closure_kind = Some(ClosureKind::Bottom(parse_ref(dln, rest.trim())?));
            } else if let Some(rest) = dline.strip_prefix("ntop ") {
                closure_kind = Some(ClosureKind::NotTop(parse_ref(dln, rest.trim())?));
            } else if let Some(rest) = dline.strip_prefix("bind ") {
                let s = parse_subst(rest.trim())
                    .map_err(|e| malformed(dln, format!("bad bindings: {e}")))?;
                bindings = Some(s);
            } else {
                return Err(malformed(dln, format!("unexpected line {dline:?}")));
            }
        }

        let detail = if let Some(kind) = closure_kind {
            NodeDetail::Closure {
                kind,
                bindings: bindings.unwrap_or_default(),
            }
        } else if elided {
            NodeDetail::ElidedSteps
        } else if !steps.is_empty() {
            NodeDetail::Steps(steps)
        } else if let Some(t) = witness {
            NodeDetail::Witness(t)
        } else if let Some(m) = meta {
            NodeDetail::Meta(m)
        } else if label == RuleLabel::Rw {
            NodeDetail::Steps(Vec::new())
        } else {
            NodeDetail::None
        };

        Ok(TraceNode {
            parent,
            label,
            target,
            side,
            formulas,
            detail,
        })
    }
}

fn parse_ref(ln: usize, text: &str) -> Result<FormulaRef, TraceError> {
    let (n, i) = text
        .split_once('.')
        .ok_or_else(|| malformed(ln, "references are NODE.INDEX"))?;
    Ok(FormulaRef {
        node: n.parse().map_err(|_| malformed(ln, "bad node reference"))?,
        index: i.parse().map_err(|_| malformed(ln, "bad formula index"))?,
    })
}

fn parse_path(ln: usize, text: &str) -> Result<Vec<usize>, TraceError> {
    if text == "-" {
        return Ok(Vec::new());
    }
    text.split('.')
        .map(|p| p.parse().map_err(|_| malformed(ln, "bad path component")))
        .collect()
}

fn parse_step(ln: usize, rest: &str) -> Result<RewriteStep, TraceError> {
    let (head, subst_text) = rest
        .split_once(" subst ")
        .ok_or_else(|| malformed(ln, "step is missing its substitution"))?;
    let subst =
        parse_subst(subst_text.trim()).map_err(|e| malformed(ln, format!("bad substitution: {e}")))?;
    let words: Vec<&str> = head.split_whitespace().collect();
    match words.first().copied() {
        Some("term") => {
            if words.len() != 6 || words[2] != "path" || words[4] != "term" {
                return Err(malformed(ln, "expected `step term RULE path P term Q subst S`"));
            }
            Ok(RewriteStep {
                rule: StepRule::Term(words[1].to_string()),
                path: parse_path(ln, words[3])?,
                term_path: Some(parse_path(ln, words[5])?),
                subst,
            })
        }
        Some("prop") => {
            if words.len() != 5 || words[3] != "path" {
                return Err(malformed(ln, "expected `step prop RULE SIDE path P subst S`"));
            }
            let side = match words[2] {
                "pos" => Polarity::Positive,
                "neg" => Polarity::Negative,
                _ => return Err(malformed(ln, "step side is pos or neg")),
            };
            Ok(RewriteStep {
                rule: StepRule::Prop(words[1].to_string(), side),
                path: parse_path(ln, words[4])?,
                term_path: None,
                subst,
            })
        }
        _ => Err(malformed(ln, "step kind is term or prop")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Formula as F;

    fn cst(x: &str) -> Term {
        Term::constant(x)
    }

    fn sample_trace() -> ProofTrace {
        let subset_aa = F::Atom("subset".into(), vec![cst("a"), cst("a")]);
        let w = Term::App("sk1".into(), vec![cst("a"), cst("a")]);
        let in_wa = F::Atom("in".into(), vec![w.clone(), cst("a")]);
        let mut step_subst = Subst::new();
        step_subst.bind_var("X", cst("a"));
        step_subst.bind_var("Y", cst("a"));
        let mut global = Subst::new();
        global.bind_meta(0, cst("a"));
        ProofTrace {
            problem: "subset_refl".into(),
            polarize: true,
            skolemize: true,
            orient: true,
            nodes: vec![
                TraceNode {
                    parent: None,
                    label: RuleLabel::Premise,
                    target: None,
                    side: None,
                    formulas: vec![F::not(subset_aa.clone())],
                    detail: NodeDetail::None,
                },
                TraceNode {
                    parent: Some(0),
                    label: RuleLabel::Rw,
                    target: Some(FormulaRef { node: 0, index: 0 }),
                    side: None,
                    formulas: vec![F::not(F::implies(in_wa.clone(), in_wa.clone()))],
                    detail: NodeDetail::Steps(vec![RewriteStep {
                        rule: StepRule::Prop("incl".into(), Polarity::Negative),
                        path: vec![0],
                        term_path: None,
                        subst: step_subst,
                    }]),
                },
                TraceNode {
                    parent: Some(1),
                    label: RuleLabel::AlphaNotImplies,
                    target: Some(FormulaRef { node: 1, index: 0 }),
                    side: None,
                    formulas: vec![in_wa.clone(), F::not(in_wa)],
                    detail: NodeDetail::None,
                },
                TraceNode {
                    parent: Some(2),
                    label: RuleLabel::Closure,
                    target: None,
                    side: None,
                    formulas: vec![],
                    detail: NodeDetail::Closure {
                        kind: ClosureKind::Pair(
                            FormulaRef { node: 2, index: 0 },
                            FormulaRef { node: 2, index: 1 },
                        ),
                        bindings: Subst::new(),
                    },
                },
            ],
            global,
        }
    }

    #[test]
    fn serialize_parse_round_trip() {
        let t = sample_trace();
        let text = t.serialize();
        let back = ProofTrace::parse(&text).unwrap();
        assert_eq!(t, back);
        // Serialization is canonical: a second round trip is the identity.
        assert_eq!(text, back.serialize());
    }

    #[test]
    fn counts() {
        let t = sample_trace();
        assert_eq!(t.expansion_count(), 2);
        assert_eq!(t.closure_count(), 1);
        assert_eq!(t.gamma_count(), 0);
        assert_eq!(t.rewrite_step_count(), 1);
    }

    #[test]
    fn elided_traces_round_trip() {
        let t = sample_trace().elide_rewrites();
        assert!(matches!(t.nodes[1].detail, NodeDetail::ElidedSteps));
        let back = ProofTrace::parse(&t.serialize()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn empty_text_is_malformed() {
        assert!(matches!(
            ProofTrace::parse(""),
            Err(TraceError::Malformed { .. })
        ));
        assert!(matches!(
            ProofTrace::parse("polartab-trace 1\n"),
            Err(TraceError::Malformed { .. })
        ));
    }

    #[test]
    fn junk_lines_are_rejected_with_position() {
        let t = sample_trace();
        let mut text = t.serialize();
        text = text.replace("  pair 2.0 2.1", "  pear 2.0 2.1");
        match ProofTrace::parse(&text) {
            Err(TraceError::Malformed { line, .. }) => assert!(line > 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn beta_sides_round_trip() {
        let mut t = sample_trace();
        t.nodes[2].side = Some(BetaSide::Left);
        let back = ProofTrace::parse(&t.serialize()).unwrap();
        assert_eq!(back.nodes[2].side, Some(BetaSide::Left));
    }
}
