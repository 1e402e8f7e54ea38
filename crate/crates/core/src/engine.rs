//! Query evaluation under the well-founded semantics: saturating rounds
//! of generalized-tree building with answer tabling, alternated with a
//! greatest-fixpoint extraction of new false atoms, until neither table
//! grows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::builder::{BuildAbort, Builder};
use crate::builtins::is_builtin_atom;
use crate::flags::Flags;
use crate::lang::{canonicalize, rename_clause, unifiable, Atom, Clause, ClauseOrigin, Literal, Program};
use crate::stats::Stats;
use crate::tables::Tables;
use crate::tree::{FailCut, Forest};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Optimized engine: live answer visibility, completion flags,
    /// early false tabling. The unoptimized engine rebuilds from
    /// per-build snapshots and uses none of the flags.
    pub optimized: bool,
    /// Table finitely failed ground negative subgoals during the build.
    pub opt1: bool,
    /// Skip program clauses for subgoal classes known complete.
    pub opt2: bool,
    /// Skip clauses completely used earlier in the same build; remember
    /// loop-dependent classes across builds.
    pub opt3: bool,
    /// Maximum term depth allowed in any created goal.
    pub guard_depth: usize,
    /// Maximum number of forest nodes per build.
    pub guard_nodes: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            optimized: true,
            opt1: true,
            opt2: true,
            opt3: true,
            guard_depth: 32,
            guard_nodes: 1_000_000,
        }
    }
}

impl EngineConfig {
    pub fn unoptimized() -> Self {
        EngineConfig { optimized: false, ..EngineConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    /// A non-ground negative literal was selected.
    Flounder,
    Guard(String),
    Builtin(String),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Flounder => write!(f, "floundering query"),
            EngineError::Guard(m) => write!(f, "{m}"),
            EngineError::Builtin(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for EngineError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// At least one derivation of the query succeeded; carries the
    /// tabled answers of the query's selection, sorted by rendered text.
    True(Vec<Atom>),
    /// Every derivation failed.
    False,
    /// No derivation succeeded and at least one ended undefined.
    Undefined,
}

#[derive(Debug)]
pub struct RunResult {
    pub verdict: Verdict,
    /// Tabled answers in insertion order.
    pub tb_t: Vec<Atom>,
    /// Tabled false ground atoms.
    pub tb_f: BTreeSet<Atom>,
    pub stats: Stats,
    /// Forest of the final build.
    pub forest: Forest,
    /// Max over all selections of matched ancestor entries minus
    /// unifiable program clauses (None if nothing was selected).
    pub max_loop_excess: Option<i64>,
    /// Total clause applications within N * |P| * (N + 1) for N distinct
    /// subgoal classes.
    pub clause_bound_ok: bool,
}

/// Reject constructs the engine does not evaluate: clause heads over
/// builtin predicates and negated builtin literals.
pub fn validate_program(p: &Program) -> Result<(), String> {
    for c in &p.clauses {
        if is_builtin_atom(&c.head) {
            return Err(format!("clause head redefines builtin predicate: {}", c.head));
        }
        for l in &c.body {
            if let Literal::Neg(a) = l {
                if is_builtin_atom(a) {
                    return Err(format!("negated builtin literal: {a}"));
                }
            }
        }
    }
    Ok(())
}

pub fn validate_query(q: &Atom) -> Result<(), String> {
    if is_builtin_atom(q) {
        return Err(format!("builtin predicate cannot be queried: {q}"));
    }
    Ok(())
}

pub fn run(program: &Program, query: &Atom, cfg: &EngineConfig) -> Result<RunResult, EngineError> {
    let mut tables = Tables::default();
    let mut flags = Flags::default();
    let mut stats = Stats::default();
    let mut max_excess: Option<i64> = None;
    let query_class = canonicalize(query);
    let forest = loop {
        stats.slt_calls += 1;
        let forest = saturate(program, cfg, &mut tables, &mut flags, &mut stats, &mut max_excess, query)?;
        let new_f = negative_closure(&forest, &tables, &query_class, query.is_ground());
        if new_f.is_empty() {
            break forest;
        }
        for a in new_f {
            if cfg.optimized {
                flags.set_comp(a.clone());
            }
            tables.add_false(a);
        }
    };
    let top = forest.top_tree();
    let verdict = if top.n_success > 0 {
        let fired = forest.nodes[forest.top_root()]
            .frame
            .as_ref()
            .map(|f| f.fired.clone())
            .unwrap_or_default();
        let mut answers: Vec<Atom> = fired.into_iter().collect();
        answers.sort_by_key(|a| a.to_string());
        Verdict::True(answers)
    } else if top.all_failed() {
        Verdict::False
    } else {
        Verdict::Undefined
    };
    let n = stats.subgoals_seen.len() as u64;
    let bound = n * (program.clauses.len() as u64) * (n + 1);
    let clause_bound_ok = stats.clause_applications <= bound;
    // The bound is the combined algorithm's guarantee: switching off answer
    // reuse (opt3) or completed-class pruning (opt2) legitimately rederives.
    if cfg.optimized && cfg.opt1 && cfg.opt2 && cfg.opt3 {
        debug_assert!(clause_bound_ok, "clause application bound exceeded");
    }
    Ok(RunResult {
        verdict,
        tb_t: tables.answers().to_vec(),
        tb_f: tables.false_atoms().clone(),
        stats,
        forest,
        max_loop_excess: max_excess,
        clause_bound_ok,
    })
}

/// Rebuild trees until no build changes what the next build would see.
#[allow(clippy::too_many_arguments)]
fn saturate(
    program: &Program,
    cfg: &EngineConfig,
    tables: &mut Tables,
    flags: &mut Flags,
    stats: &mut Stats,
    max_excess: &mut Option<i64>,
    query: &Atom,
) -> Result<Forest, EngineError> {
    loop {
        stats.sltp_calls += 1;
        stats.generalized_trees_built += 1;
        flags.begin_build();
        let mut b = Builder::new(program, cfg, tables, flags, stats);
        let aborted = b.run_query(query);
        let Builder { forest, new_answers, apps, max_loop_excess, .. } = b;
        match aborted {
            Err(BuildAbort::Guard(m)) => return Err(EngineError::Guard(m)),
            Err(BuildAbort::Builtin(m)) => return Err(EngineError::Builtin(m)),
            Ok(()) => {}
        }
        stats.fold_build_apps(&apps);
        *max_excess = match (*max_excess, max_loop_excess) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        if forest.floundered {
            return Err(EngineError::Flounder);
        }
        let rebuild = if cfg.optimized {
            !new_answers.is_empty() && has_incomplete_class(&forest, flags, tables)
        } else {
            unopt_rebuild(&new_answers, &forest)
        };
        if !rebuild {
            return Ok(forest);
        }
    }
}

/// Some selection class may still gain answers or lose derivations.
fn has_incomplete_class(forest: &Forest, flags: &Flags, tables: &Tables) -> bool {
    forest.nodes.iter().filter_map(|n| n.frame.as_ref()).any(|f| {
        !flags.comp(&f.class) && !(f.class.is_ground() && tables.is_false(&f.class))
    })
}

/// Without completion flags, rebuild whenever a new answer was consumed
/// nowhere it could matter: it fired under some inner selection, or some
/// inner selection unifies with it and never fired it.
fn unopt_rebuild(new_answers: &[Atom], forest: &Forest) -> bool {
    if new_answers.is_empty() {
        return false;
    }
    let top = forest.top_root();
    for a in new_answers {
        for (i, node) in forest.nodes.iter().enumerate() {
            if i == top {
                continue;
            }
            let Some(f) = &node.frame else { continue };
            if f.fired.contains(a) {
                return true;
            }
            if unifiable_renamed(a, &f.sel_atom) {
                return true;
            }
        }
    }
    false
}

fn unifiable_renamed(a: &Atom, b: &Atom) -> bool {
    let mut counter = 0u32;
    let fa = rename_clause(
        &Clause { head: a.clone(), body: Vec::new(), id: 0, origin: ClauseOrigin::Program },
        &mut counter,
    )
    .head;
    let fb = rename_clause(
        &Clause { head: b.clone(), body: Vec::new(), id: 0, origin: ClauseOrigin::Program },
        &mut counter,
    )
    .head;
    unifiable(&fa, &fb)
}

/// Greatest-fixpoint extraction of new false atoms from the final
/// forest. Candidates are the classes whose recorded endings are all
/// failures (no answer, no deferred conclusion, no floundering). A
/// candidate is then discarded if one of its failures was a cut whose
/// class may still produce answers (it is neither in the candidate set
/// nor tabled false) and whose revived continuation is not blocked by a
/// literal already decided against it: a positive subgoal in the
/// candidate set or tabled false, or a negated atom with a covering
/// tabled answer. Survivors enter the false table if they are ground
/// and were actually demanded negatively (or are the ground query
/// itself).
fn negative_closure(
    forest: &Forest,
    tables: &Tables,
    query_class: &Atom,
    query_ground: bool,
) -> BTreeSet<Atom> {
    struct Agg {
        bad: bool,
        cuts: Vec<FailCut>,
    }
    let mut agg: BTreeMap<Atom, Agg> = BTreeMap::new();
    for node in &forest.nodes {
        let Some(f) = &node.frame else { continue };
        let e = agg.entry(f.class.clone()).or_insert(Agg { bad: false, cuts: Vec::new() });
        if f.n_success > 0 || f.n_ustar > 0 || f.n_flounder > 0 {
            e.bad = true;
        }
        e.cuts.extend(f.fail_sels.iter().flatten().cloned());
    }
    let mut set: BTreeSet<Atom> =
        agg.iter().filter(|(_, a)| !a.bad).map(|(k, _)| k.clone()).collect();
    loop {
        let doomed: Vec<Atom> = set
            .iter()
            .filter(|k| {
                agg[*k].cuts.iter().any(|c| {
                    let cut_stays = set.contains(&c.class) || tables.is_false(&c.class);
                    let blocked = c
                        .rest_pos
                        .iter()
                        .any(|y| set.contains(y) || tables.is_false(y))
                        || c.rest_neg.iter().any(|z| {
                            tables.answers().iter().any(|a| unifiable_renamed(a, z))
                        });
                    !cut_stays && !blocked
                })
            })
            .cloned()
            .collect();
        if doomed.is_empty() {
            break;
        }
        for d in doomed {
            set.remove(&d);
        }
    }
    set.into_iter()
        .filter(|k| {
            k.is_ground()
                && !tables.is_false(k)
                && (forest.neg_selected.contains(k) || (query_ground && k == query_class))
        })
        .collect()
}
