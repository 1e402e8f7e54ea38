//! Depth-first construction of one generalized tree: the top tree for
//! the query plus every child tree spawned for a ground negative
//! selection, with answers tabled the moment a clause body is fully
//! resolved.
//!
//! Loop cutting: each selected positive subgoal is compared against the
//! ancestor list carried by the literal; on a variant match the clauses
//! recorded in the matched entries are excluded at this node only.

use std::collections::{BTreeMap, BTreeSet};

use crate::builtins::{eval_builtin, is_builtin_atom, BuiltinResult};
use crate::engine::EngineConfig;
use crate::flags::Flags;
use crate::lang::{
    canonicalize, is_variant, mgu, rename_clause, unifiable, Atom, Clause, ClauseOrigin, Literal,
    Program,
};
use crate::stats::Stats;
use crate::tables::Tables;
use crate::tree::{
    al_iter, al_push, goal_signature, Al, AlEntry, Edge, FailCut, Forest, Frame, GoalItem,
    LeafKind, Node, NodeId, Phase, Selection, Tree, TreeId,
};

/// Build aborted before completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildAbort {
    Guard(String),
    Builtin(String),
}

enum Step {
    Descend(NodeId),
    Done,
}

/// Cut description for a failure leaf: the failed selection's class plus
/// the blockers a revived continuation would meet before reaching the
/// pop of `origin` (the whole goal when None): positive subgoals and
/// pending calls canonicalized, negated ground atoms as written.
fn cut_record(goal: &[GoalItem], class: &Atom, origin: Option<NodeId>) -> FailCut {
    let mut rest_pos = Vec::new();
    let mut rest_neg = Vec::new();
    for item in &goal[1..] {
        match item {
            GoalItem::Lit { lit: Literal::Pos(a), .. } => {
                if !is_builtin_atom(a) {
                    rest_pos.push(canonicalize(a));
                }
            }
            GoalItem::Lit { lit: Literal::Neg(a), .. } => {
                if a.is_ground() {
                    rest_neg.push(a.clone());
                }
            }
            GoalItem::Pop { call, origin: o, .. } => {
                if Some(*o) == origin {
                    break;
                }
                rest_pos.push(canonicalize(call));
            }
            GoalItem::Lit { lit: Literal::UStar, .. } | GoalItem::UStar => {}
        }
    }
    FailCut { class: class.clone(), rest_pos, rest_neg }
}

/// How one clause's sub-derivations for a subgoal class concluded, beyond
/// the answers it tabled. Skipping the clause at a later variant replays
/// these endings so the later context keeps the evidence the pruned
/// branches would have produced.
#[derive(Debug, Default)]
struct ClauseProfile {
    /// Call instances whose bodies finished on an undefined negative.
    deferred: Vec<Atom>,
    /// Failure records from leaves inside the clause's body part.
    fails: Vec<Option<FailCut>>,
}

pub struct Builder<'a> {
    program: &'a Program,
    cfg: &'a EngineConfig,
    tables: &'a mut Tables,
    flags: &'a mut Flags,
    stats: &'a mut Stats,
    pub forest: Forest,
    stack: Vec<NodeId>,
    var_counter: u32,
    /// Unoptimized resolution sees only answers tabled before this build.
    snapshot: usize,
    /// Canonical answers first tabled during this build, in firing order.
    pub new_answers: Vec<Atom>,
    /// Clause applications per (subgoal class, clause id) in this build.
    pub apps: BTreeMap<(String, usize), u64>,
    /// Max over selections of matched ancestor entries minus unifiable
    /// program clauses.
    pub max_loop_excess: Option<i64>,
    /// Ending profiles per (subgoal class, clause id) for this build.
    profiles: BTreeMap<(Atom, usize), ClauseProfile>,
}

impl<'a> Builder<'a> {
    pub fn new(
        program: &'a Program,
        cfg: &'a EngineConfig,
        tables: &'a mut Tables,
        flags: &'a mut Flags,
        stats: &'a mut Stats,
    ) -> Builder<'a> {
        let snapshot = tables.answers().len();
        Builder {
            program,
            cfg,
            tables,
            flags,
            stats,
            forest: Forest::default(),
            stack: Vec::new(),
            var_counter: 0,
            snapshot,
            new_answers: Vec::new(),
            apps: BTreeMap::new(),
            max_loop_excess: None,
            profiles: BTreeMap::new(),
        }
    }

    /// The clause that connects `origin` to the branch containing `start`:
    /// the edge of origin's child on the parent chain of `start`. None when
    /// the branch does not descend from a clause application at `origin`.
    fn clause_below(&self, origin: NodeId, start: NodeId) -> Option<usize> {
        let mut cur = start;
        while let Some(p) = self.forest.nodes[cur].parent {
            if p == origin {
                return match self.forest.nodes[cur].edge {
                    Edge::Clause(cid) => Some(cid),
                    _ => None,
                };
            }
            cur = p;
        }
        None
    }

    /// Build the whole generalized tree for the query.
    pub fn run_query(&mut self, query: &Atom) -> Result<(), BuildAbort> {
        let root_goal = vec![GoalItem::Lit { lit: Literal::Pos(query.clone()), al: None }];
        let root = self.new_tree(root_goal, None)?;
        self.stack.push(root);
        while let Some(&n) = self.stack.last() {
            match self.step(n)? {
                Step::Descend(c) => self.stack.push(c),
                Step::Done => {
                    self.stack.pop();
                    self.on_backtrack(n);
                }
            }
        }
        Ok(())
    }

    fn step(&mut self, n: NodeId) -> Result<Step, BuildAbort> {
        match self.forest.nodes[n].phase {
            Phase::Fresh => self.classify(n),
            Phase::PosExpand => self.expand_pos(n),
            Phase::NegAwait(t) => self.finish_neg(n, t),
            Phase::AwaitChild => Ok(Step::Done),
        }
    }

    fn classify(&mut self, n: NodeId) -> Result<Step, BuildAbort> {
        let Some(first) = self.forest.nodes[n].goal.first().cloned() else {
            self.mark_leaf(n, LeafKind::Success, None, false);
            return Ok(Step::Done);
        };
        match first {
            GoalItem::UStar | GoalItem::Lit { lit: Literal::UStar, .. } => {
                self.forest.nodes[n].selection = Some(Selection::UstarFirst);
                self.mark_leaf(n, LeafKind::Ustar, None, false);
                Ok(Step::Done)
            }
            GoalItem::Pop { .. } => unreachable!("leading pops fire at materialization"),
            GoalItem::Lit { lit: Literal::Pos(atom), al } => {
                if is_builtin_atom(&atom) {
                    self.select_builtin(n, atom)
                } else {
                    self.select_pos(n, atom, al)
                }
            }
            GoalItem::Lit { lit: Literal::Neg(atom), al } => self.select_neg(n, atom, al),
        }
    }

    fn select_builtin(&mut self, n: NodeId, atom: Atom) -> Result<Step, BuildAbort> {
        self.forest.nodes[n].selection = Some(Selection::PosBuiltin(atom.clone()));
        match eval_builtin(&atom) {
            BuiltinResult::Error(msg) => Err(BuildAbort::Builtin(msg)),
            BuiltinResult::Fails => {
                self.mark_leaf(n, LeafKind::Fail, None, false);
                Ok(Step::Done)
            }
            BuiltinResult::Succeeds(s) => {
                let items: Vec<GoalItem> =
                    self.forest.nodes[n].goal[1..].iter().map(|it| it.apply(&s)).collect();
                let shown = s.apply_atom(&atom);
                let tree = self.forest.nodes[n].tree;
                let child = self.materialize(items, Some(n), tree, Edge::Builtin(shown))?;
                self.forest.nodes[n].phase = Phase::AwaitChild;
                Ok(Step::Descend(child))
            }
        }
    }

    fn select_pos(&mut self, n: NodeId, atom: Atom, al: Al) -> Result<Step, BuildAbort> {
        let class = canonicalize(&atom);
        self.stats.subgoals_seen.insert(class.to_string());
        let mut entries: Vec<AlEntry> = Vec::new();
        let mut matched: Vec<usize> = Vec::new();
        for e in al_iter(&al) {
            self.stats.subgoal_comparisons += 1;
            if is_variant(&e.atom, &atom) {
                matched.push(entries.len());
            }
            entries.push(e.clone());
        }
        let mut looping: BTreeSet<usize> = BTreeSet::new();
        if !matched.is_empty() {
            for &i in &matched {
                looping.insert(entries[i].clause);
            }
            let deepest = *matched.last().unwrap();
            self.forest.nodes[n].is_loop_node = true;
            for e in &entries[..=deepest] {
                self.forest.nodes[e.node].is_loop_node = true;
            }
            self.mark_loop_dependent(&class, &entries);
        } else if self.cfg.optimized && self.cfg.opt3 && self.flags.loop_depend(&class) {
            // A variant looped elsewhere: dependents of this node can be
            // cut short by later stages, so treat it as a loop node (no
            // clause is excluded here).
            self.forest.nodes[n].is_loop_node = true;
            self.mark_loop_dependent(&class, &entries);
        }
        let mut unifiable_count = 0usize;
        for &cid in self.program.clauses_for(&atom.pred) {
            let mut tmp = self.var_counter;
            let renamed = rename_clause(&self.program.clauses[cid], &mut tmp);
            if unifiable(&atom, &renamed.head) {
                unifiable_count += 1;
            }
        }
        let excess = matched.len() as i64 - unifiable_count as i64;
        self.max_loop_excess = Some(self.max_loop_excess.map_or(excess, |m| m.max(excess)));
        self.forest.nodes[n].selection = Some(Selection::PosUser {
            atom: atom.clone(),
            al,
            looping,
            matched_entries: matched.len(),
            unifiable_clauses: unifiable_count,
        });
        self.forest.nodes[n].frame = Some(Frame::new(class, atom));
        self.forest.nodes[n].phase = Phase::PosExpand;
        self.expand_pos(n)
    }

    fn mark_loop_dependent(&mut self, class: &Atom, entries: &[AlEntry]) {
        for e in entries {
            self.forest.loop_dependent.insert(e.node);
        }
        if self.cfg.optimized {
            self.flags.set_loop_depend(class.clone());
            for e in entries {
                self.flags.set_loop_depend(canonicalize(&e.atom));
            }
        }
    }

    fn expand_pos(&mut self, n: NodeId) -> Result<Step, BuildAbort> {
        let (sel_atom, sel_al, looping) = match self.forest.nodes[n].selection.as_ref() {
            Some(Selection::PosUser { atom, al, looping, .. }) => {
                (atom.clone(), al.clone(), looping.clone())
            }
            _ => unreachable!("expand_pos without a positive selection"),
        };
        let class = self.forest.nodes[n].frame.as_ref().unwrap().class.clone();

        // Tabled answers first, from the node's cursor.
        loop {
            let pos = self.forest.nodes[n].answer_pos;
            if pos >= self.visible_len() {
                break;
            }
            self.forest.nodes[n].answer_pos += 1;
            let ans = self.tables.answers()[pos].clone();
            let at_root = self.forest.nodes[n].parent.is_none();
            if at_root && self.forest.nodes[n].frame.as_ref().unwrap().fired.contains(&ans) {
                continue;
            }
            let fact = Clause {
                head: ans.clone(),
                body: Vec::new(),
                id: usize::MAX,
                origin: ClauseOrigin::TabledAnswer,
            };
            let renamed = rename_clause(&fact, &mut self.var_counter);
            let Some(theta) = mgu(&sel_atom, &renamed.head) else { continue };
            let mut items = Vec::with_capacity(self.forest.nodes[n].goal.len());
            items.push(GoalItem::Pop { call: theta.apply_atom(&sel_atom), origin: n, poisoned: false });
            items.extend(self.forest.nodes[n].goal[1..].iter().map(|it| it.apply(&theta)));
            let sig = goal_signature(&items);
            if self.forest.nodes[n].child_sigs.contains(&sig) {
                continue;
            }
            self.forest.nodes[n].child_sigs.insert(sig);
            self.stats.tabled_answer_applications += 1;
            let tree = self.forest.nodes[n].tree;
            let child = self.materialize(items, Some(n), tree, Edge::Answer(ans))?;
            return Ok(Step::Descend(child));
        }

        // Program clauses, unless the class is known complete.
        let clause_ids: Vec<usize> = self.program.clauses_for(&sel_atom.pred).to_vec();
        if self.cfg.optimized && self.cfg.opt2 && self.flags.comp(&class) {
            self.forest.nodes[n].clause_pos = clause_ids.len();
        }
        loop {
            let pos = self.forest.nodes[n].clause_pos;
            if pos >= clause_ids.len() {
                break;
            }
            self.forest.nodes[n].clause_pos += 1;
            let cid = clause_ids[pos];
            if looping.contains(&cid) {
                continue;
            }
            if self.cfg.optimized && self.cfg.opt3 && self.flags.comp_used(&class, cid) {
                // Answers of the earlier use arrive through the tables;
                // its failure records and deferred conclusions are
                // replayed here so this context keeps that evidence. A
                // replayed cut chains the original blockers with this
                // goal's own continuation: a revival must pass both.
                if let Some(p) = self.profiles.get(&(class.clone(), cid)) {
                    let fails = p.fails.clone();
                    let deferred = p.deferred.clone();
                    for o in self.forest.ending_origins(n) {
                        let seg = cut_record(&self.forest.nodes[n].goal, &class, Some(o));
                        let f = self.forest.nodes[o].frame.as_mut().unwrap();
                        for r in &fails {
                            let chained = r.as_ref().map(|c| FailCut {
                                class: c.class.clone(),
                                rest_pos: c
                                    .rest_pos
                                    .iter()
                                    .chain(seg.rest_pos.iter())
                                    .cloned()
                                    .collect(),
                                rest_neg: c
                                    .rest_neg
                                    .iter()
                                    .chain(seg.rest_neg.iter())
                                    .cloned()
                                    .collect(),
                            });
                            f.n_fail += 1;
                            f.fail_sels.push(chained);
                        }
                    }
                    self.forest.nodes[n].replay.extend(deferred);
                }
                continue;
            }
            let renamed = rename_clause(&self.program.clauses[cid], &mut self.var_counter);
            let Some(theta) = mgu(&sel_atom, &renamed.head) else { continue };
            let new_al =
                al_push(&sel_al, AlEntry { node: n, atom: sel_atom.clone(), clause: cid });
            let mut items: Vec<GoalItem> = renamed
                .body
                .iter()
                .map(|l| GoalItem::Lit { lit: theta.apply_literal(l), al: new_al.clone() })
                .collect();
            items.push(GoalItem::Pop { call: theta.apply_atom(&sel_atom), origin: n, poisoned: false });
            items.extend(self.forest.nodes[n].goal[1..].iter().map(|it| it.apply(&theta)));
            let sig = goal_signature(&items);
            if !self.cfg.optimized && self.forest.nodes[n].child_sigs.contains(&sig) {
                continue;
            }
            self.forest.nodes[n].child_sigs.insert(sig);
            self.stats.clause_applications += 1;
            *self.apps.entry((class.to_string(), cid)).or_insert(0) += 1;
            let tree = self.forest.nodes[n].tree;
            let child = self.materialize(items, Some(n), tree, Edge::Clause(cid))?;
            return Ok(Step::Descend(child));
        }

        // Continuations under deferred conclusions of skipped clauses:
        // the call concludes as undefined, so the remainder runs poisoned
        // with u* pending, exactly as after an undefined drop.
        loop {
            let pos = self.forest.nodes[n].replay_pos;
            if pos >= self.forest.nodes[n].replay.len() {
                break;
            }
            self.forest.nodes[n].replay_pos += 1;
            let inst = self.forest.nodes[n].replay[pos].clone();
            let fact = Clause {
                head: inst.clone(),
                body: Vec::new(),
                id: usize::MAX,
                origin: ClauseOrigin::TabledAnswer,
            };
            let renamed = rename_clause(&fact, &mut self.var_counter);
            let Some(theta) = mgu(&sel_atom, &renamed.head) else { continue };
            let mut items = Vec::with_capacity(self.forest.nodes[n].goal.len() + 1);
            items.push(GoalItem::Pop { call: theta.apply_atom(&sel_atom), origin: n, poisoned: true });
            items.extend(self.forest.nodes[n].goal[1..].iter().map(|it| match it.apply(&theta) {
                GoalItem::Pop { call, origin, .. } => GoalItem::Pop { call, origin, poisoned: true },
                other => other,
            }));
            let has_ustar = items.iter().any(|it| {
                matches!(it, GoalItem::UStar | GoalItem::Lit { lit: Literal::UStar, .. })
            });
            if !has_ustar {
                items.push(GoalItem::UStar);
            }
            let sig = goal_signature(&items);
            if self.forest.nodes[n].child_sigs.contains(&sig) {
                continue;
            }
            self.forest.nodes[n].child_sigs.insert(sig);
            let tree = self.forest.nodes[n].tree;
            let child = self.materialize(items, Some(n), tree, Edge::DeferredReplay(inst))?;
            return Ok(Step::Descend(child));
        }

        if self.forest.nodes[n].children.is_empty() {
            self.mark_leaf(n, LeafKind::Fail, Some(class), true);
        }
        Ok(Step::Done)
    }

    fn select_neg(&mut self, n: NodeId, atom: Atom, al: Al) -> Result<Step, BuildAbort> {
        self.forest.nodes[n].selection = Some(Selection::Neg { atom: atom.clone(), al: al.clone() });
        if !atom.is_ground() {
            self.forest.floundered = true;
            self.mark_leaf(n, LeafKind::Flounder, None, false);
            return Ok(Step::Done);
        }
        if is_builtin_atom(&atom) {
            return Err(BuildAbort::Builtin(format!("negated builtin literal: {atom}")));
        }
        self.forest.neg_selected.insert(canonicalize(&atom));
        if self.tables.is_false(&atom) {
            let items: Vec<GoalItem> = self.forest.nodes[n].goal[1..].to_vec();
            let tree = self.forest.nodes[n].tree;
            let child = self.materialize(items, Some(n), tree, Edge::DropTbf(atom))?;
            self.forest.nodes[n].phase = Phase::AwaitChild;
            return Ok(Step::Descend(child));
        }
        let root_goal = vec![GoalItem::Lit { lit: Literal::Pos(atom), al }];
        let root = self.new_tree(root_goal, Some(n))?;
        self.forest.nodes[n].phase = Phase::NegAwait(self.forest.trees.len() - 1);
        Ok(Step::Descend(root))
    }

    fn finish_neg(&mut self, n: NodeId, t: TreeId) -> Result<Step, BuildAbort> {
        let atom = match self.forest.nodes[n].selection.as_ref() {
            Some(Selection::Neg { atom, .. }) => atom.clone(),
            _ => unreachable!("finish_neg without a negative selection"),
        };
        let (all_failed, n_success, n_flounder, root) = {
            let tr = &self.forest.trees[t];
            (tr.all_failed(), tr.n_success, tr.n_flounder, tr.root)
        };
        if all_failed
            && self.cfg.optimized
            && self.cfg.opt1
            && !self.forest.is_loop_dependent(root)
        {
            // Finite failure at a loop-independent root: the atom is false
            // in every later stage, so no provisional marker is needed.
            self.tables.add_false(atom.clone());
            self.flags.set_comp(canonicalize(&atom));
            let items: Vec<GoalItem> = self.forest.nodes[n].goal[1..].to_vec();
            let tree = self.forest.nodes[n].tree;
            let child = self.materialize(items, Some(n), tree, Edge::DropFail(atom))?;
            self.forest.nodes[n].phase = Phase::AwaitChild;
            return Ok(Step::Descend(child));
        }
        if n_success > 0 {
            self.mark_leaf(n, LeafKind::Fail, None, false);
            return Ok(Step::Done);
        }
        if n_flounder > 0 {
            self.mark_leaf(n, LeafKind::Flounder, None, false);
            return Ok(Step::Done);
        }
        // Temporarily undefined: drop the literal, poison the enclosing
        // pops (their answers must not fire on this branch; a pop whose
        // remaining body empties out counts as u* for its origin), append
        // u* unless one is already pending.
        let mut items: Vec<GoalItem> = self.forest.nodes[n].goal[1..]
            .iter()
            .map(|it| match it {
                GoalItem::Pop { call, origin, .. } => {
                    GoalItem::Pop { call: call.clone(), origin: *origin, poisoned: true }
                }
                other => other.clone(),
            })
            .collect();
        let has_ustar = items.iter().any(|it| {
            matches!(it, GoalItem::UStar | GoalItem::Lit { lit: Literal::UStar, .. })
        });
        if !has_ustar {
            items.push(GoalItem::UStar);
        }
        let tree = self.forest.nodes[n].tree;
        let child = self.materialize(items, Some(n), tree, Edge::DropUstar(atom))?;
        self.forest.nodes[n].phase = Phase::AwaitChild;
        Ok(Step::Descend(child))
    }

    /// Leaf bookkeeping: tree counters plus ending attribution to every
    /// selection whose pop (poisoned or not) is still pending on this
    /// branch. Failure endings record the leaf's own selected class and,
    /// per attributed frame, the goal segment a revived continuation
    /// would have to pass before that frame's call could fire, so the
    /// closure can tell conditional failures from definitive ones.
    fn mark_leaf(&mut self, n: NodeId, kind: LeafKind, record: Option<Atom>, include_own: bool) {
        debug_assert!(self.forest.nodes[n].leaf.is_none());
        self.forest.nodes[n].leaf = Some(kind);
        let t = self.forest.nodes[n].tree;
        match kind {
            LeafKind::Success => self.forest.trees[t].n_success += 1,
            LeafKind::Fail => self.forest.trees[t].n_fail += 1,
            LeafKind::Ustar => self.forest.trees[t].n_ustar += 1,
            LeafKind::Flounder => self.forest.trees[t].n_flounder += 1,
        }
        if kind == LeafKind::Success {
            return; // frames were credited when the pops fired
        }
        let origins = self.forest.ending_origins(n);
        let cuts: Vec<Option<FailCut>> = if kind == LeafKind::Fail {
            origins
                .iter()
                .map(|&o| {
                    record.as_ref().map(|c| cut_record(&self.forest.nodes[n].goal, c, Some(o)))
                })
                .collect()
        } else {
            Vec::new()
        };
        for (i, &o) in origins.iter().enumerate() {
            let f = self.forest.nodes[o].frame.as_mut().unwrap();
            match kind {
                LeafKind::Fail => {
                    f.n_fail += 1;
                    f.fail_sels.push(cuts[i].clone());
                }
                LeafKind::Ustar => f.n_ustar += 1,
                LeafKind::Flounder => f.n_flounder += 1,
                LeafKind::Success => unreachable!(),
            }
        }
        if kind == LeafKind::Fail && self.cfg.optimized && self.cfg.opt3 {
            for (i, &o) in origins.iter().enumerate() {
                if let Some(cid) = self.clause_below(o, n) {
                    let cls = self.forest.nodes[o].frame.as_ref().unwrap().class.clone();
                    self.profiles.entry((cls, cid)).or_default().fails.push(cuts[i].clone());
                }
            }
        }
        if include_own {
            let own = record
                .map(|c| FailCut { class: c, rest_pos: Vec::new(), rest_neg: Vec::new() });
            let f = self.forest.nodes[n].frame.as_mut().unwrap();
            f.n_fail += 1;
            f.fail_sels.push(own);
        }
    }

    /// Answers visible to resolution right now.
    fn visible_len(&self) -> usize {
        if self.cfg.optimized {
            self.tables.answers().len()
        } else {
            self.snapshot
        }
    }

    fn new_tree(
        &mut self,
        goal: Vec<GoalItem>,
        parent_node: Option<NodeId>,
    ) -> Result<NodeId, BuildAbort> {
        let tree_id = self.forest.trees.len();
        let root = self.materialize(goal, None, tree_id, Edge::Root)?;
        self.forest.trees.push(Tree {
            root,
            parent_node,
            n_success: 0,
            n_fail: 0,
            n_ustar: 0,
            n_flounder: 0,
        });
        Ok(root)
    }

    /// Normalize (fire leading pops), check guards, create the node.
    fn materialize(
        &mut self,
        mut items: Vec<GoalItem>,
        parent: Option<NodeId>,
        tree: TreeId,
        edge: Edge,
    ) -> Result<NodeId, BuildAbort> {
        let mut k = 0;
        while k < items.len() {
            let GoalItem::Pop { call, origin, poisoned } = &items[k] else { break };
            let (call, origin, poisoned) = (call.clone(), *origin, *poisoned);
            if poisoned {
                // The body finished but leaned on an undefined negative:
                // its conclusion is deferred, not an answer.
                if self.cfg.optimized && self.cfg.opt3 {
                    if let Some(cid) = parent.and_then(|p| self.clause_below(origin, p)) {
                        let cls = self.forest.nodes[origin].frame.as_ref().unwrap().class.clone();
                        self.profiles.entry((cls, cid)).or_default().deferred.push(call);
                    }
                }
                let f = self.forest.nodes[origin].frame.as_mut().unwrap();
                f.n_ustar += 1;
            } else {
                self.fire(&call, origin);
            }
            k += 1;
        }
        items.drain(..k);
        for it in &items {
            let atom = match it {
                GoalItem::Lit { lit, .. } => lit.atom(),
                GoalItem::Pop { call, .. } => Some(call),
                GoalItem::UStar => None,
            };
            if let Some(a) = atom {
                if a.depth() > self.cfg.guard_depth {
                    return Err(BuildAbort::Guard(format!(
                        "bounded-term-size guard tripped: term depth {} exceeds {}",
                        a.depth(),
                        self.cfg.guard_depth
                    )));
                }
            }
        }
        if self.forest.nodes.len() >= self.cfg.guard_nodes {
            return Err(BuildAbort::Guard(format!(
                "bounded-term-size guard tripped: forest node budget {} exceeded",
                self.cfg.guard_nodes
            )));
        }
        let id = self.forest.nodes.len();
        self.forest.nodes.push(Node::new(items, parent, tree, edge));
        if let Some(p) = parent {
            self.forest.nodes[p].children.push(id);
        }
        Ok(id)
    }

    /// A clause body was fully resolved: table the instantiated call and
    /// credit the selection that pushed the pop.
    fn fire(&mut self, call: &Atom, origin: NodeId) {
        let canon = canonicalize(call);
        if self.tables.add_answer(call) {
            self.new_answers.push(canon.clone());
        }
        let f = self.forest.nodes[origin].frame.as_mut().unwrap();
        f.fired.insert(canon);
        f.n_success += 1;
    }

    /// Flag maintenance when a node's subtree is fully explored.
    fn on_backtrack(&mut self, n: NodeId) {
        if !self.cfg.optimized {
            return;
        }
        let (parent, clause_edge) = {
            let node = &self.forest.nodes[n];
            let c = match node.edge {
                Edge::Clause(cid) => Some(cid),
                _ => None,
            };
            (node.parent, c)
        };
        if let (Some(p), Some(cid)) = (parent, clause_edge) {
            if matches!(self.forest.nodes[p].selection, Some(Selection::PosUser { .. })) {
                let pclass = self.forest.nodes[p].frame.as_ref().unwrap().class.clone();
                self.flags.set_comp_used(pclass, cid);
            }
        }
        if matches!(self.forest.nodes[n].selection, Some(Selection::PosUser { .. }))
            && !self.forest.is_loop_dependent(n)
        {
            let f = self.forest.nodes[n].frame.as_ref().unwrap();
            if f.n_ustar == 0 && f.n_flounder == 0 && !self.flags.loop_depend(&f.class) {
                let class = f.class.clone();
                self.flags.set_comp(class);
            }
        }
    }
}
