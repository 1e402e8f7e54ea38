//! Bottom-up evaluation of the well-founded model over a finite ground
//! instantiation. Independent of the top-down engine; used to cross-check it.
//!
//! The greatest unfounded set is computed constructively:
//!   N(I) = base − lfp of extended-consequence over reduce(g, M(I)) from M(I),
//! which equals the union of all unfounded sets w.r.t. I. A direct
//! subset-enumeration check of that equality lives in `brute_force_gus`.

use crate::lang::{Atom, Clause, Literal, Program, Term, Var};
use crate::parser::is_builtin;
use std::collections::{BTreeMap, BTreeSet};

/// Consistent three-valued interpretation: positives ∩ negatives = ∅.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialInterp {
    pub pos: BTreeSet<Atom>,
    pub neg: BTreeSet<Atom>,
}

impl PartialInterp {
    pub fn new() -> PartialInterp {
        PartialInterp::default()
    }

    pub fn consistent(&self) -> bool {
        self.pos.is_disjoint(&self.neg)
    }

    pub fn subset_of(&self, other: &PartialInterp) -> bool {
        self.pos.is_subset(&other.pos) && self.neg.is_subset(&other.neg)
    }

    fn satisfies(&self, l: &Literal) -> bool {
        match l {
            Literal::Pos(a) => self.pos.contains(a),
            Literal::Neg(a) => self.neg.contains(a),
            Literal::UStar => false,
        }
    }

    /// complement of the literal is in self
    fn blocks(&self, l: &Literal) -> bool {
        match l {
            Literal::Pos(a) => self.neg.contains(a),
            Literal::Neg(a) => self.pos.contains(a),
            Literal::UStar => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundProgram {
    pub clauses: Vec<Clause>,
    pub base: BTreeSet<Atom>,
}

/// Ground terms over the program's constants and function symbols, nesting
/// depth at most `depth_cap`. A fresh constant is invented when the program
/// has none. Programs with function symbols require a nonzero cap: the
/// oracle is exact only for function-free programs.
pub fn herbrand_universe(p: &Program, depth_cap: usize) -> Result<BTreeSet<Term>, String> {
    let mut consts: BTreeSet<Term> = BTreeSet::new();
    let mut funs: BTreeSet<(String, usize)> = BTreeSet::new();
    fn scan(t: &Term, consts: &mut BTreeSet<Term>, funs: &mut BTreeSet<(String, usize)>) {
        match t {
            Term::Var(_) => {}
            Term::Int(_) => {
                consts.insert(t.clone());
            }
            Term::App(name, args) => {
                if args.is_empty() {
                    consts.insert(t.clone());
                } else {
                    funs.insert((name.clone(), args.len()));
                    for a in args {
                        scan(a, consts, funs);
                    }
                }
            }
        }
    }
    for c in &p.clauses {
        for t in &c.head.args {
            scan(t, &mut consts, &mut funs);
        }
        for l in &c.body {
            if let Some(a) = l.atom() {
                for t in &a.args {
                    scan(t, &mut consts, &mut funs);
                }
            }
        }
    }
    if consts.is_empty() {
        let mut k = 0;
        let fresh = loop {
            let name = format!("c{k}");
            if !funs.iter().any(|(f, _)| *f == name) {
                break name;
            }
            k += 1;
        };
        consts.insert(Term::constant(&fresh));
    }
    if !funs.is_empty() && depth_cap == 0 {
        return Err(
            "herbrand universe is infinite: function symbols present and depth cap is 0"
                .to_string(),
        );
    }
    let mut universe = consts;
    for _ in 0..depth_cap {
        let mut next = universe.clone();
        for (f, n) in &funs {
            let pool: Vec<&Term> = universe.iter().collect();
            let mut idx = vec![0usize; *n];
            loop {
                let args: Vec<Term> = idx.iter().map(|&i| pool[i].clone()).collect();
                let t = Term::App(f.clone(), args);
                if t.depth() <= depth_cap {
                    next.insert(t);
                }
                // odometer over pool^n
                let mut j = 0;
                loop {
                    if j == *n {
                        break;
                    }
                    idx[j] += 1;
                    if idx[j] < pool.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == *n {
                    break;
                }
            }
        }
        if next == universe {
            break;
        }
        universe = next;
    }
    Ok(universe)
}

fn instantiate(a: &Atom, m: &BTreeMap<Var, Term>) -> Atom {
    fn go(t: &Term, m: &BTreeMap<Var, Term>) -> Term {
        match t {
            Term::Var(v) => m[v].clone(),
            Term::Int(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|x| go(x, m)).collect()),
        }
    }
    Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| go(t, m)).collect() }
}

/// All instantiations of every clause over the universe, plus the Herbrand
/// base over the program's non-builtin predicates.
pub fn ground(p: &Program, universe: &BTreeSet<Term>) -> GroundProgram {
    let pool: Vec<&Term> = universe.iter().collect();
    let mut set: BTreeSet<(Atom, Vec<Literal>)> = BTreeSet::new();
    for c in &p.clauses {
        let vars = c.vars();
        if vars.is_empty() {
            set.insert((c.head.clone(), c.body.clone()));
            continue;
        }
        let mut idx = vec![0usize; vars.len()];
        loop {
            let m: BTreeMap<Var, Term> =
                vars.iter().cloned().zip(idx.iter().map(|&i| pool[i].clone())).collect();
            let head = instantiate(&c.head, &m);
            let body = c
                .body
                .iter()
                .map(|l| match l {
                    Literal::Pos(a) => Literal::Pos(instantiate(a, &m)),
                    Literal::Neg(a) => Literal::Neg(instantiate(a, &m)),
                    Literal::UStar => Literal::UStar,
                })
                .collect();
            set.insert((head, body));
            let mut j = 0;
            loop {
                if j == vars.len() {
                    break;
                }
                idx[j] += 1;
                if idx[j] < pool.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == vars.len() {
                break;
            }
        }
    }
    let clauses: Vec<Clause> =
        set.into_iter().map(|(head, body)| Clause::new(head, body)).collect();

    let mut preds: BTreeSet<(String, usize)> = BTreeSet::new();
    for c in &p.clauses {
        preds.insert((c.head.pred.clone(), c.head.arity()));
        for l in &c.body {
            if let Some(a) = l.atom() {
                if !is_builtin(&a.pred, a.arity()) {
                    preds.insert((a.pred.clone(), a.arity()));
                }
            }
        }
    }
    let mut base: BTreeSet<Atom> = BTreeSet::new();
    for (pred, n) in &preds {
        if *n == 0 {
            base.insert(Atom::prop(pred));
            continue;
        }
        let mut idx = vec![0usize; *n];
        loop {
            base.insert(Atom::new(pred, idx.iter().map(|&i| pool[i].clone()).collect()));
            let mut j = 0;
            loop {
                if j == *n {
                    break;
                }
                idx[j] += 1;
                if idx[j] < pool.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == *n {
                break;
            }
        }
    }
    GroundProgram { clauses, base }
}

/// Immediate consequences: heads of clauses whose whole body holds in i.
pub fn tp(g: &GroundProgram, i: &PartialInterp) -> BTreeSet<Atom> {
    g.clauses
        .iter()
        .filter(|c| c.body.iter().all(|l| i.satisfies(l)))
        .map(|c| c.head.clone())
        .collect()
}

/// Least fixpoint of the extended consequence operator above i.
/// Negatives pass through unchanged.
pub fn mp(g: &GroundProgram, i: &PartialInterp) -> PartialInterp {
    let mut cur = i.clone();
    loop {
        let step = tp(g, &cur);
        if step.is_subset(&cur.pos) {
            return cur;
        }
        cur.pos.extend(step);
    }
}

/// Reduct: drop every clause with a body literal whose complement is in i,
/// then erase the remaining negative literals. Result is a positive program.
pub fn reduce(g: &GroundProgram, i: &PartialInterp) -> GroundProgram {
    let clauses = g
        .clauses
        .iter()
        .filter(|c| !c.body.iter().any(|l| i.blocks(l)))
        .map(|c| {
            Clause::new(c.head.clone(), c.body.iter().filter(|l| l.is_positive()).cloned().collect())
        })
        .collect();
    GroundProgram { clauses, base: g.base.clone() }
}

fn np_fixpoint(g: &GroundProgram, i: &PartialInterp) -> (PartialInterp, BTreeSet<Atom>) {
    let m = mp(g, i);
    let red = reduce(g, &m);
    let fix = mp(&red, &m);
    (m, fix.pos)
}

/// Greatest unfounded set w.r.t. i: base atoms not derivable from the reduct.
pub fn np_op(g: &GroundProgram, i: &PartialInterp) -> BTreeSet<Atom> {
    let (_, fix) = np_fixpoint(g, i);
    g.base.difference(&fix).cloned().collect()
}

/// Atoms newly derivable in the reduct but not in m(i): the undefined layer.
pub fn op_op(g: &GroundProgram, i: &PartialInterp) -> BTreeSet<Atom> {
    let (m, fix) = np_fixpoint(g, i);
    fix.difference(&m.pos).cloned().collect()
}

/// Union of all unfounded sets w.r.t. i, by direct subset enumeration.
/// Exponential in |base|; callers keep |base| small.
pub fn brute_force_gus(g: &GroundProgram, i: &PartialInterp) -> BTreeSet<Atom> {
    let atoms: Vec<&Atom> = g.base.iter().collect();
    assert!(atoms.len() <= 20, "brute-force unfounded-set check needs a small base");
    let mut union: BTreeSet<Atom> = BTreeSet::new();
    for mask in 0u32..(1u32 << atoms.len()) {
        let u: BTreeSet<&Atom> =
            atoms.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, a)| *a).collect();
        let unfounded = u.iter().all(|a| {
            g.clauses.iter().filter(|c| c.head == **a).all(|c| {
                c.body.iter().any(|l| i.blocks(l))
                    || c.body.iter().any(
                        |l| matches!(l, Literal::Pos(b) if u.contains(b)),
                    )
            })
        });
        if unfounded {
            union.extend(u.into_iter().cloned());
        }
    }
    union
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfModel {
    pub interp: PartialInterp,
    pub ground: GroundProgram,
    /// stages I_0 ⊂ I_1 ⊂ ... up to the fixpoint, for property checks
    pub stages: Vec<PartialInterp>,
}

/// Iterate I ← m(I) ∪ ¬·n(I) from ∅ to the fixpoint.
pub fn wf_model(p: &Program, depth_cap: usize) -> Result<WfModel, String> {
    let universe = herbrand_universe(p, depth_cap)?;
    let g = ground(p, &universe);
    Ok(wf_model_ground(g))
}

pub fn wf_model_ground(g: GroundProgram) -> WfModel {
    let mut stages = vec![PartialInterp::new()];
    loop {
        let cur = stages.last().unwrap();
        let mut next = mp(&g, cur);
        next.neg.extend(np_op(&g, cur));
        debug_assert!(next.consistent());
        if next == *cur {
            break;
        }
        stages.push(next);
    }
    WfModel { interp: stages.last().unwrap().clone(), ground: g, stages }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Undefined,
}

impl std::fmt::Display for Truth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Truth::True => write!(f, "true"),
            Truth::False => write!(f, "false"),
            Truth::Undefined => write!(f, "undefined"),
        }
    }
}

pub fn truth(m: &WfModel, a: &Atom) -> Result<Truth, String> {
    if !m.ground.base.contains(a) {
        return Err(format!("atom outside the herbrand base: {a}"));
    }
    if m.interp.pos.contains(a) {
        Ok(Truth::True)
    } else if m.interp.neg.contains(a) {
        Ok(Truth::False)
    } else {
        Ok(Truth::Undefined)
    }
}
