//! Generalized SLT-tree forest: the top tree plus every child tree
//! spawned for a ground negative subgoal, linked by dotted edges.
//!
//! Goals are sequences of items. Besides literals, a goal carries pop
//! markers: a pop records the instantiated call of an enclosing positive
//! selection and fires (tables an answer) once every literal of the
//! clause body that produced it has been resolved away. Pops are
//! bookkeeping, not literals; they are invisible to the computation rule
//! and to rendered output.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::lang::{Atom, Literal, Subst, Var};

pub type NodeId = usize;
pub type TreeId = usize;

/// One ancestor-list entry: at `node`, the selected subgoal `atom`
/// (as it stood at selection) was resolved with program clause `clause`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlEntry {
    pub node: NodeId,
    pub atom: Atom,
    pub clause: usize,
}

/// Ancestor list: shared immutable cons list, newest entry first.
#[derive(Debug)]
pub struct AlCell {
    pub entry: AlEntry,
    pub next: Al,
}

pub type Al = Option<Rc<AlCell>>;

pub fn al_push(al: &Al, entry: AlEntry) -> Al {
    Some(Rc::new(AlCell { entry, next: al.clone() }))
}

pub fn al_iter(al: &Al) -> AlIter<'_> {
    AlIter { cur: al }
}

pub struct AlIter<'a> {
    cur: &'a Al,
}

impl<'a> Iterator for AlIter<'a> {
    type Item = &'a AlEntry;
    fn next(&mut self) -> Option<&'a AlEntry> {
        let cell = self.cur.as_ref()?;
        self.cur = &cell.next;
        Some(&cell.entry)
    }
}

#[derive(Clone, Debug)]
pub enum GoalItem {
    Lit { lit: Literal, al: Al },
    /// Answer boundary for the positive selection at `origin`. A poisoned
    /// pop marks a body that already consumed an undefined negative: when
    /// it becomes leading it credits u* to its origin instead of firing
    /// an answer.
    Pop { call: Atom, origin: NodeId, poisoned: bool },
    UStar,
}

impl GoalItem {
    pub fn apply(&self, s: &Subst) -> GoalItem {
        match self {
            GoalItem::Lit { lit, al } => GoalItem::Lit { lit: s.apply_literal(lit), al: al.clone() },
            GoalItem::Pop { call, origin, poisoned } => {
                GoalItem::Pop { call: s.apply_atom(call), origin: *origin, poisoned: *poisoned }
            }
            GoalItem::UStar => GoalItem::UStar,
        }
    }
}

/// Canonical text of a goal-item sequence; variables are renamed to
/// V0, V1, ... in order of first occurrence across the whole sequence.
/// Used to recognize child goals already created at a node.
pub fn goal_signature(items: &[GoalItem]) -> String {
    use std::collections::BTreeMap;
    use std::fmt::Write;
    let mut names: BTreeMap<Var, usize> = BTreeMap::new();
    let mut out = String::new();
    fn term_sig(t: &crate::lang::Term, names: &mut BTreeMap<Var, usize>, out: &mut String) {
        match t {
            crate::lang::Term::Var(v) => {
                let n = names.len();
                let k = *names.entry(v.clone()).or_insert(n);
                let _ = write!(out, "V{k}");
            }
            crate::lang::Term::Int(i) => {
                let _ = write!(out, "{i}");
            }
            crate::lang::Term::App(f, args) => {
                let _ = write!(out, "{f}");
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        term_sig(a, names, out);
                    }
                    out.push(')');
                }
            }
        }
    }
    fn atom_sig(a: &Atom, names: &mut BTreeMap<Var, usize>, out: &mut String) {
        out.push_str(&a.pred);
        if !a.args.is_empty() {
            out.push('(');
            for (i, t) in a.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                term_sig(t, names, out);
            }
            out.push(')');
        }
    }
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match item {
            GoalItem::Lit { lit: Literal::Pos(a), .. } => atom_sig(a, &mut names, &mut out),
            GoalItem::Lit { lit: Literal::Neg(a), .. } => {
                out.push('~');
                atom_sig(a, &mut names, &mut out);
            }
            GoalItem::Lit { lit: Literal::UStar, .. } | GoalItem::UStar => out.push_str("u*"),
            GoalItem::Pop { call, origin, poisoned } => {
                out.push_str(if *poisoned { "popu[" } else { "pop[" });
                atom_sig(call, &mut names, &mut out);
                let _ = write!(out, "@{origin}]");
            }
        }
    }
    out
}

/// Rendered goal as shown in dumps: literals and u* only, pops hidden.
pub fn render_goal(items: &[GoalItem]) -> String {
    let parts: Vec<String> = items
        .iter()
        .filter_map(|item| match item {
            GoalItem::Lit { lit, .. } => Some(lit.to_string()),
            GoalItem::UStar => Some("u*".to_string()),
            GoalItem::Pop { .. } => None,
        })
        .collect();
    parts.join(", ")
}

/// How a node was derived from its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Edge {
    Root,
    Clause(usize),
    Answer(Atom),
    Builtin(Atom),
    /// ¬A dropped because A is tabled false.
    DropTbf(Atom),
    /// ¬A dropped because its child tree finitely failed at a
    /// loop-independent root.
    DropFail(Atom),
    /// ¬A dropped as temporarily undefined: enclosing pops are poisoned
    /// and u* is appended unless already present.
    DropUstar(Atom),
    /// Continuation under a deferred conclusion of a skipped clause: an
    /// earlier variant's use of the clause ended on an undefined negative,
    /// so the remainder runs with poisoned pops.
    DeferredReplay(Atom),
}

impl Edge {
    pub fn label(&self) -> String {
        match self {
            Edge::Root => String::new(),
            Edge::Clause(id) => format!("C{}", id + 1),
            Edge::Answer(a) => a.to_string(),
            Edge::Builtin(a) => a.to_string(),
            Edge::DropTbf(a) => format!("\\+ {a} (in TB_f)"),
            Edge::DropFail(a) => format!("\\+ {a} (fails)"),
            Edge::DropUstar(a) => format!("\\+ {a} (u*)"),
            Edge::DeferredReplay(a) => format!("{a} (deferred)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    Success,
    Fail,
    Ustar,
    Flounder,
}

impl fmt::Display for LeafKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LeafKind::Success => "□_t",
            LeafKind::Fail => "□_f",
            LeafKind::Ustar => "□_u*",
            LeafKind::Flounder => "□_fl",
        };
        f.write_str(s)
    }
}

/// A failure leaf whose selected positive subgoal could still produce
/// answers in a later pass (loop cut, or a call whose clauses are all
/// exhausted but whose class may fire elsewhere): the cut class plus
/// what a revived continuation would still have to get through before
/// the recorded frame's own call could fire.
#[derive(Clone, Debug)]
pub struct FailCut {
    pub class: Atom,
    /// Canonicalized positive subgoals (literals and pending calls) on
    /// the leaf goal between the selection and the frame's pop.
    pub rest_pos: Vec<Atom>,
    /// Ground negated atoms on that segment.
    pub rest_neg: Vec<Atom>,
}

/// Endings record for one positive selection: its fired answers and how
/// the sub-derivations for its call concluded.
#[derive(Clone, Debug)]
pub struct Frame {
    pub class: Atom,
    pub sel_atom: Atom,
    pub fired: BTreeSet<Atom>,
    pub n_success: u64,
    pub n_fail: u64,
    pub n_ustar: u64,
    pub n_flounder: u64,
    /// Per failure leaf attributed to this frame: the conditional cut
    /// description, or None when the leaf failed for good (negation on
    /// a proven atom, builtin, or head mismatch).
    pub fail_sels: Vec<Option<FailCut>>,
}

impl Frame {
    pub fn new(class: Atom, sel_atom: Atom) -> Frame {
        Frame {
            class,
            sel_atom,
            fired: BTreeSet::new(),
            n_success: 0,
            n_fail: 0,
            n_ustar: 0,
            n_flounder: 0,
            fail_sels: Vec::new(),
        }
    }
}

/// What the node's first item is, fixed at first expansion.
#[derive(Clone, Debug)]
pub enum Selection {
    /// Positive non-builtin literal; carries the looping clauses
    /// excluded at this node and the loop-check measurements.
    PosUser { atom: Atom, al: Al, looping: BTreeSet<usize>, matched_entries: usize, unifiable_clauses: usize },
    PosBuiltin(Atom),
    Neg { atom: Atom, al: Al },
    Empty,
    UstarFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Fresh,
    /// Positive selection: cursors over tabled answers and clauses.
    PosExpand,
    /// Negative selection: child tree under construction.
    NegAwait(TreeId),
    /// Exactly one child was produced; nothing further after it finishes.
    AwaitChild,
}

#[derive(Debug)]
pub struct Node {
    pub goal: Vec<GoalItem>,
    pub parent: Option<NodeId>,
    pub tree: TreeId,
    pub edge: Edge,
    pub children: Vec<NodeId>,
    pub leaf: Option<LeafKind>,
    pub is_loop_node: bool,
    pub phase: Phase,
    pub selection: Option<Selection>,
    pub frame: Option<Frame>,
    pub answer_pos: usize,
    pub clause_pos: usize,
    /// Deferred conclusions of skipped clauses awaiting continuation.
    pub replay: Vec<Atom>,
    pub replay_pos: usize,
    pub child_sigs: BTreeSet<String>,
}

impl Node {
    pub fn new(goal: Vec<GoalItem>, parent: Option<NodeId>, tree: TreeId, edge: Edge) -> Node {
        Node {
            goal,
            parent,
            tree,
            edge,
            children: Vec::new(),
            leaf: None,
            is_loop_node: false,
            phase: Phase::Fresh,
            selection: None,
            frame: None,
            answer_pos: 0,
            clause_pos: 0,
            replay: Vec::new(),
            replay_pos: 0,
            child_sigs: BTreeSet::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tree {
    pub root: NodeId,
    /// The node whose selected negative literal spawned this tree
    /// (None for the top tree).
    pub parent_node: Option<NodeId>,
    pub n_success: u64,
    pub n_fail: u64,
    pub n_ustar: u64,
    pub n_flounder: u64,
}

impl Tree {
    pub fn all_failed(&self) -> bool {
        self.n_success == 0 && self.n_ustar == 0 && self.n_flounder == 0
    }
}

#[derive(Debug, Default)]
pub struct Forest {
    pub nodes: Vec<Node>,
    pub trees: Vec<Tree>,
    pub floundered: bool,
    /// Nodes made loop-dependent by appearing in the ancestor list of a
    /// loop node's selected subgoal (loop nodes themselves carry
    /// `is_loop_node`).
    pub loop_dependent: BTreeSet<NodeId>,
    /// Classes of ground atoms selected negatively anywhere.
    pub neg_selected: BTreeSet<Atom>,
}

impl Forest {
    pub fn top_root(&self) -> NodeId {
        self.trees[0].root
    }

    pub fn top_tree(&self) -> &Tree {
        &self.trees[0]
    }

    pub fn is_loop_dependent(&self, n: NodeId) -> bool {
        self.nodes[n].is_loop_node || self.loop_dependent.contains(&n)
    }

    /// Pop origins (poisoned or not) still pending in a node's goal: the
    /// selections whose bodies the branch ending at this node belongs to.
    pub fn ending_origins(&self, n: NodeId) -> Vec<NodeId> {
        self.nodes[n]
            .goal
            .iter()
            .filter_map(|item| match item {
                GoalItem::Pop { origin, .. } => Some(*origin),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Term;

    fn lit(a: Atom) -> GoalItem {
        GoalItem::Lit { lit: Literal::Pos(a), al: None }
    }

    #[test]
    fn signature_canonicalizes_variables_across_items() {
        let x = Term::var("X");
        let y = Term::var("Y");
        let g1 = vec![
            lit(Atom::new("p", vec![x.clone(), y.clone()])),
            lit(Atom::new("q", vec![x.clone()])),
        ];
        let a = Term::var("A");
        let b = Term::var("B");
        let g2 = vec![
            lit(Atom::new("p", vec![a.clone(), b])),
            lit(Atom::new("q", vec![a])),
        ];
        assert_eq!(goal_signature(&g1), goal_signature(&g2));
        assert_eq!(goal_signature(&g1), "p(V0,V1), q(V0)");
        // different sharing pattern -> different signature
        let g3 = vec![
            lit(Atom::new("p", vec![x.clone(), y.clone()])),
            lit(Atom::new("q", vec![y])),
        ];
        assert_ne!(goal_signature(&g1), goal_signature(&g3));
    }

    #[test]
    fn signature_covers_pops_and_ustar() {
        let g = vec![
            GoalItem::Lit { lit: Literal::Neg(Atom::prop("r")), al: None },
            GoalItem::Pop { call: Atom::new("q", vec![Term::var("X")]), origin: 3, poisoned: false },
            GoalItem::UStar,
        ];
        assert_eq!(goal_signature(&g), "~r, pop[q(V0)@3], u*");
        let g2 = vec![
            GoalItem::Lit { lit: Literal::Neg(Atom::prop("r")), al: None },
            GoalItem::Pop { call: Atom::new("q", vec![Term::var("X")]), origin: 4, poisoned: false },
            GoalItem::UStar,
        ];
        assert_ne!(goal_signature(&g), goal_signature(&g2));
    }

    #[test]
    fn render_hides_pops() {
        let g = vec![
            lit(Atom::new("p", vec![Term::var("X")])),
            GoalItem::Pop { call: Atom::prop("q"), origin: 0, poisoned: false },
            GoalItem::UStar,
        ];
        assert_eq!(render_goal(&g), "p(X), u*");
    }

    #[test]
    fn al_iter_is_newest_first() {
        let e1 = AlEntry { node: 0, atom: Atom::prop("p"), clause: 0 };
        let e2 = AlEntry { node: 2, atom: Atom::prop("q"), clause: 1 };
        let al = al_push(&al_push(&None, e1.clone()), e2.clone());
        let got: Vec<AlEntry> = al_iter(&al).cloned().collect();
        assert_eq!(got, vec![e2, e1]);
    }

    #[test]
    fn edge_labels() {
        assert_eq!(Edge::Clause(0).label(), "C1");
        assert_eq!(Edge::Answer(Atom::prop("a")).label(), "a");
        assert_eq!(Edge::DropTbf(Atom::prop("w")).label(), "\\+ w (in TB_f)");
        assert_eq!(Edge::DropUstar(Atom::prop("b")).label(), "\\+ b (u*)");
    }
}
