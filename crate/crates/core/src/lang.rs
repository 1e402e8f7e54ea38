//! Terms, atoms, literals, clauses, goals, substitutions, unification,
//! variant tests, the resolution step, and program augmentation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Variable: source name plus a rename index. Index 0 is the parsed form;
/// renaming-apart bumps the index from a monotone per-derivation counter,
/// so renamed variables are globally distinct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub idx: u32,
}

impl Var {
    pub fn new(name: &str) -> Var {
        Var { name: name.to_string(), idx: 0 }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.idx == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.idx)
        }
    }
}

/// First-order term. A constant is an application with no arguments.
/// Integers are ordinary constants everywhere except the builtin layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Int(i64),
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    /// Nesting depth: variables, integers and constants are 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Int(_) => 0,
            Term::App(_, args) => args.iter().map(|a| 1 + a.depth()).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    fn vars_into(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Int(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
        }
    }

    fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Int(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }
}

const ARITH_OPS: [&str; 3] = ["+", "-", "*"];

fn is_arith_app(t: &Term) -> bool {
    matches!(t, Term::App(op, args) if args.len() == 2 && ARITH_OPS.contains(&op.as_str()))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(n) => write!(f, "{n}"),
            Term::App(op, args) if args.len() == 2 && ARITH_OPS.contains(&op.as_str()) => {
                // Left-associative infix; parenthesize a nested right operand.
                write!(f, "{}{}", args[0], op)?;
                if is_arith_app(&args[1]) {
                    write!(f, "({})", args[1])
                } else {
                    write!(f, "{}", args[1])
                }
            }
            Term::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: pred.to_string(), args }
    }

    pub fn prop(pred: &str) -> Atom {
        Atom::new(pred, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for a in &self.args {
            a.vars_into(&mut out);
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.pred.as_str(), self.args.len()) {
            ("is", 2) => write!(f, "{} is {}", self.args[0], self.args[1]),
            ("<", 2) => write!(f, "{}<{}", self.args[0], self.args[1]),
            _ => {
                write!(f, "{}", self.pred)?;
                if !self.args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in self.args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Body/goal literal. `UStar` is the temporarily-undefined marker; it never
/// appears in source programs or top goals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Pos(Atom),
    Neg(Atom),
    UStar,
}

impl Literal {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            Literal::UStar => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Literal::Pos(_))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "\\+ {a}"),
            Literal::UStar => write!(f, "u*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClauseOrigin {
    Program,
    TabledAnswer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Literal>,
    /// Stable identifier: position in the program's textual clause order.
    pub id: usize,
    pub origin: ClauseOrigin,
}

impl Clause {
    pub fn new(head: Atom, body: Vec<Literal>) -> Clause {
        Clause { head, body, id: 0, origin: ClauseOrigin::Program }
    }

    pub fn fact(head: Atom) -> Clause {
        Clause::new(head, Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.body.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for a in &self.head.args {
            a.vars_into(&mut out);
        }
        for l in &self.body {
            if let Some(at) = l.atom() {
                for t in &at.args {
                    t.vars_into(&mut out);
                }
            }
        }
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        write!(f, ".")
    }
}

/// A goal is a headless clause: a sequence of literals.
pub type GoalLits = Vec<Literal>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    /// predicate name -> clause ids in textual order
    index: BTreeMap<String, Vec<usize>>,
}

impl Program {
    pub fn new(mut clauses: Vec<Clause>) -> Program {
        let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, c) in clauses.iter_mut().enumerate() {
            c.id = i;
            index.entry(c.head.pred.clone()).or_default().push(i);
        }
        Program { clauses, index }
    }

    pub fn clauses_for(&self, pred: &str) -> &[usize] {
        self.index.get(pred).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Constants and function symbols appearing anywhere in the program.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn term_syms(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(_) | Term::Int(_) => {}
                Term::App(name, args) => {
                    out.insert(name.clone());
                    for a in args {
                        term_syms(a, out);
                    }
                }
            }
        }
        for c in &self.clauses {
            out.insert(c.head.pred.clone());
            for t in &c.head.args {
                term_syms(t, &mut out);
            }
            for l in &c.body {
                if let Some(a) = l.atom() {
                    out.insert(a.pred.clone());
                    for t in &a.args {
                        term_syms(t, &mut out);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Idempotent substitution: no bound variable occurs in any binding's
/// right-hand side (occurs-check enforced on creation).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    /// Single binding; `None` if it fails the occurs-check.
    pub fn singleton(v: Var, t: Term) -> Option<Subst> {
        let mut s = Subst::new();
        if s.bind(v, t) {
            Some(s)
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Bind v to t, keeping the whole map idempotent. Fails the occurs-check
    /// as a normal `false` result.
    fn bind(&mut self, v: Var, t: Term) -> bool {
        let t = self.apply_term(&t);
        if let Term::Var(w) = &t {
            if *w == v {
                return true; // trivial binding, drop
            }
        }
        if t.contains_var(&v) {
            return false;
        }
        let single = Subst { map: BTreeMap::from([(v.clone(), t.clone())]) };
        for rhs in self.map.values_mut() {
            *rhs = single.apply_term(rhs);
        }
        self.map.insert(v, t);
        true
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.map.get(v) {
                Some(bound) => bound.clone(),
                None => t.clone(),
            },
            Term::Int(_) => t.clone(),
            Term::App(name, args) => {
                Term::App(name.clone(), args.iter().map(|a| self.apply_term(a)).collect())
            }
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply_term(t)).collect() }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        match l {
            Literal::Pos(a) => Literal::Pos(self.apply_atom(a)),
            Literal::Neg(a) => Literal::Neg(self.apply_atom(a)),
            Literal::UStar => Literal::UStar,
        }
    }

    pub fn apply_goal(&self, g: &[Literal]) -> GoalLits {
        g.iter().map(|l| self.apply_literal(l)).collect()
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        write!(f, "}}")
    }
}

fn unify_terms(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let a = s.apply_term(a);
    let b = s.apply_term(b);
    match (&a, &b) {
        (Term::Var(v), _) => s.bind(v.clone(), b.clone()),
        (_, Term::Var(v)) => s.bind(v.clone(), a.clone()),
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_terms(x, y, s))
        }
        _ => false,
    }
}

/// Most general unifier with occurs-check; `None` means not unifiable.
pub fn mgu(a: &Atom, b: &Atom) -> Option<Subst> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = Subst::new();
    for (x, y) in a.args.iter().zip(&b.args) {
        if !unify_terms(x, y, &mut s) {
            return None;
        }
    }
    Some(s)
}

pub fn unifiable(a: &Atom, b: &Atom) -> bool {
    mgu(a, b).is_some()
}

/// Composition: apply(compose(s1,s2), x) = apply(s2, apply(s1, x)).
/// Result is normalized back to idempotent form; our derivation-built
/// substitutions never produce cross-binding cycles.
pub fn compose(s1: &Subst, s2: &Subst) -> Subst {
    let mut map = BTreeMap::new();
    for (v, t) in s1.map.iter() {
        let t = s2.apply_term(t);
        if t != Term::Var(v.clone()) {
            map.insert(v.clone(), t);
        }
    }
    for (v, t) in s2.map.iter() {
        map.entry(v.clone()).or_insert_with(|| t.clone());
    }
    // Resolve chains until idempotent.
    let mut out = Subst { map };
    for _ in 0..out.map.len() + 1 {
        let next: BTreeMap<Var, Term> = out
            .map
            .iter()
            .map(|(v, t)| (v.clone(), out.apply_term(t)))
            .filter(|(v, t)| *t != Term::Var(v.clone()))
            .collect();
        if next == out.map {
            break;
        }
        out.map = next;
    }
    debug_assert!(
        out.map.iter().all(|(v, t)| !t.contains_var(v)),
        "cyclic substitution composition"
    );
    out
}

fn match_term(pattern: &Term, target: &Term, s: &mut BTreeMap<Var, Term>) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(bound) => bound == target,
            None => {
                s.insert(v.clone(), target.clone());
                true
            }
        },
        Term::Int(x) => matches!(target, Term::Int(y) if x == y),
        Term::App(f, xs) => match target {
            Term::App(g, ys) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
    }
}

/// One-sided unification: binds `pattern`'s variables only; the target is
/// left untouched, so the result need not be idempotent over target vars.
pub fn match_atom(pattern: &Atom, target: &Atom) -> Option<Subst> {
    if pattern.pred != target.pred || pattern.args.len() != target.args.len() {
        return None;
    }
    let mut map = BTreeMap::new();
    for (p, t) in pattern.args.iter().zip(&target.args) {
        if !match_term(p, t, &mut map) {
            return None;
        }
    }
    Some(Subst { map })
}

/// True iff a bijective variable renaming maps x to y.
pub fn is_variant(x: &Atom, y: &Atom) -> bool {
    if x.pred != y.pred || x.args.len() != y.args.len() {
        return false;
    }
    let mut fwd: BTreeMap<Var, Var> = BTreeMap::new();
    let mut bwd: BTreeMap<Var, Var> = BTreeMap::new();
    fn go(
        a: &Term,
        b: &Term,
        fwd: &mut BTreeMap<Var, Var>,
        bwd: &mut BTreeMap<Var, Var>,
    ) -> bool {
        match (a, b) {
            (Term::Var(v), Term::Var(w)) => {
                let f_ok = match fwd.get(v) {
                    Some(mapped) => mapped == w,
                    None => {
                        fwd.insert(v.clone(), w.clone());
                        true
                    }
                };
                let b_ok = match bwd.get(w) {
                    Some(mapped) => mapped == v,
                    None => {
                        bwd.insert(w.clone(), v.clone());
                        true
                    }
                };
                f_ok && b_ok
            }
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fwd, bwd))
            }
            _ => false,
        }
    }
    x.args.iter().zip(&y.args).all(|(a, b)| go(a, b, &mut fwd, &mut bwd))
}

/// Canonical variant form: variables renamed to V0, V1, ... by first
/// occurrence. Two atoms are variants iff their canonical forms are equal.
pub fn canonicalize(a: &Atom) -> Atom {
    let mut seen: BTreeMap<Var, Var> = BTreeMap::new();
    fn go(t: &Term, seen: &mut BTreeMap<Var, Var>) -> Term {
        match t {
            Term::Var(v) => {
                let n = seen.len() as u32;
                Term::Var(
                    seen.entry(v.clone())
                        .or_insert_with(|| Var { name: format!("V{n}"), idx: 0 })
                        .clone(),
                )
            }
            Term::Int(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|x| go(x, seen)).collect()),
        }
    }
    Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| go(t, &mut seen)).collect() }
}

/// Rename every variable of the clause apart using the monotone counter.
pub fn rename_clause(c: &Clause, counter: &mut u32) -> Clause {
    let mut map: BTreeMap<Var, Var> = BTreeMap::new();
    for v in c.vars() {
        *counter += 1;
        map.insert(v.clone(), Var { name: v.name.clone(), idx: *counter });
    }
    fn go(t: &Term, map: &BTreeMap<Var, Var>) -> Term {
        match t {
            Term::Var(v) => Term::Var(map[v].clone()),
            Term::Int(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|x| go(x, map)).collect()),
        }
    }
    let head = Atom {
        pred: c.head.pred.clone(),
        args: c.head.args.iter().map(|t| go(t, &map)).collect(),
    };
    let body = c
        .body
        .iter()
        .map(|l| match l {
            Literal::Pos(a) => Literal::Pos(Atom {
                pred: a.pred.clone(),
                args: a.args.iter().map(|t| go(t, &map)).collect(),
            }),
            Literal::Neg(a) => Literal::Neg(Atom {
                pred: a.pred.clone(),
                args: a.args.iter().map(|t| go(t, &map)).collect(),
            }),
            Literal::UStar => Literal::UStar,
        })
        .collect();
    Clause { head, body, id: c.id, origin: c.origin }
}

/// Resolvent of a goal and a clause on the selected positive subgoal.
/// The clause is renamed apart via `counter`; the clause body lands at the
/// selected position.
pub fn resolve(
    goal: &[Literal],
    j: usize,
    clause: &Clause,
    counter: &mut u32,
) -> Option<(GoalLits, Subst)> {
    let selected = match &goal[j] {
        Literal::Pos(a) => a,
        _ => return None,
    };
    let c = rename_clause(clause, counter);
    let theta = mgu(selected, &c.head)?;
    let mut out = Vec::with_capacity(goal.len() - 1 + c.body.len());
    out.extend(goal[..j].iter().map(|l| theta.apply_literal(l)));
    out.extend(c.body.iter().map(|l| theta.apply_literal(l)));
    out.extend(goal[j + 1..].iter().map(|l| theta.apply_literal(l)));
    Some((out, theta))
}

pub const AUG_PRED: &str = "aug_p";
pub const AUG_FUN: &str = "aug_f";
pub const AUG_CONST: &str = "aug_c";

/// Augmented program: adds the unit clause aug_p(aug_f(aug_c)) over reserved
/// symbols. Errors if any reserved symbol already occurs.
pub fn augment(p: &Program) -> Result<Program, String> {
    let syms = p.symbols();
    for reserved in [AUG_PRED, AUG_FUN, AUG_CONST] {
        if syms.contains(reserved) {
            return Err(format!("reserved symbol collision: {reserved}"));
        }
    }
    let mut clauses = p.clauses.clone();
    clauses.push(Clause::fact(Atom::new(
        AUG_PRED,
        vec![Term::App(AUG_FUN.to_string(), vec![Term::constant(AUG_CONST)])],
    )));
    Ok(Program::new(clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Term {
        Term::constant(s)
    }
    fn v(s: &str) -> Term {
        Term::var(s)
    }
    fn f(t: Term) -> Term {
        Term::App("f".to_string(), vec![t])
    }

    #[test]
    fn mgu_single_binding() {
        let s = mgu(&Atom::new("p", vec![v("X")]), &Atom::new("p", vec![a("a")])).unwrap();
        assert_eq!(s.apply_term(&v("X")), a("a"));
    }

    #[test]
    fn mgu_pred_mismatch() {
        assert!(mgu(&Atom::new("p", vec![a("a")]), &Atom::new("q", vec![a("a")])).is_none());
    }

    #[test]
    fn mgu_occurs_check() {
        // p(X,X) vs p(Y,f(Y)) must fail: X=Y then Y=f(Y) is cyclic.
        let left = Atom::new("p", vec![v("X"), v("X")]);
        let right = Atom::new("p", vec![v("Y"), f(v("Y"))]);
        assert!(mgu(&left, &right).is_none());
    }

    #[test]
    fn apply_examples() {
        let s = mgu(&Atom::new("p", vec![v("X")]), &Atom::new("p", vec![a("a")])).unwrap();
        let at = s.apply_atom(&Atom::new("p", vec![v("X"), v("Y")]));
        assert_eq!(at, Atom::new("p", vec![a("a"), v("Y")]));
        let empty = Subst::new();
        assert_eq!(empty.apply_atom(&at), at);
    }

    #[test]
    fn apply_idempotent_after_normalization() {
        // {X/f(Y), Y/b} normalizes so that applying twice equals once.
        let mut s = Subst::new();
        assert!(s.bind(Var::new("X"), f(v("Y"))));
        assert!(s.bind(Var::new("Y"), a("b")));
        let t = Term::App("p".into(), vec![v("X"), v("Y")]);
        let once = s.apply_term(&t);
        assert_eq!(once, Term::App("p".into(), vec![f(a("b")), a("b")]));
        assert_eq!(s.apply_term(&once), once);
    }

    #[test]
    fn compose_examples() {
        let mut s1 = Subst::new();
        assert!(s1.bind(Var::new("X"), v("Y")));
        let mut s2 = Subst::new();
        assert!(s2.bind(Var::new("Y"), a("a")));
        let c = compose(&s1, &s2);
        assert_eq!(c.apply_term(&v("X")), a("a"));
        assert_eq!(c.apply_term(&v("Y")), a("a"));

        let id = Subst::new();
        assert_eq!(compose(&id, &s2), s2);

        let mut s3 = Subst::new();
        assert!(s3.bind(Var::new("X"), f(v("Y"))));
        let mut s4 = Subst::new();
        assert!(s4.bind(Var::new("Y"), Term::App("g".into(), vec![v("Z")])));
        let c = compose(&s3, &s4);
        assert_eq!(c.apply_term(&v("X")), f(Term::App("g".into(), vec![v("Z")])));
    }

    #[test]
    fn variant_examples() {
        assert!(is_variant(
            &Atom::new("p", vec![v("X"), v("Y")]),
            &Atom::new("p", vec![v("U"), v("V")])
        ));
        assert!(!is_variant(
            &Atom::new("p", vec![v("X"), v("X")]),
            &Atom::new("p", vec![v("U"), v("V")])
        ));
        let same = Atom::new("p", vec![v("X")]);
        assert!(is_variant(&same, &same));
    }

    #[test]
    fn canonical_form_keys_variants() {
        let x = Atom::new("p", vec![v("X"), f(v("X")), v("Y")]);
        let y = Atom::new("p", vec![v("B"), f(v("B")), v("A")]);
        assert_eq!(canonicalize(&x), canonicalize(&y));
        assert_eq!(canonicalize(&x).to_string(), "p(V0,f(V0),V1)");
        assert!(is_variant(&x, &canonicalize(&x)));
    }

    #[test]
    fn resolve_examples() {
        let mut n = 0;
        // unit clause: empty resolvent
        let (g, th) = resolve(
            &[Literal::Pos(Atom::new("p", vec![v("X")]))],
            0,
            &Clause::fact(Atom::new("p", vec![a("a")])),
            &mut n,
        )
        .unwrap();
        assert!(g.is_empty());
        assert_eq!(th.apply_term(&v("X")), a("a"));

        // body lands at the selected position
        let (g, _) = resolve(
            &[Literal::Pos(Atom::new("p", vec![v("X")])), Literal::Pos(Atom::prop("r"))],
            0,
            &Clause::new(
                Atom::new("p", vec![v("Z")]),
                vec![Literal::Pos(Atom::new("q", vec![v("Z")]))],
            ),
            &mut n,
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert!(matches!(&g[0], Literal::Pos(at) if at.pred == "q"));
        assert!(matches!(&g[1], Literal::Pos(at) if at.pred == "r"));

        // constant clash
        assert!(resolve(
            &[Literal::Pos(Atom::new("p", vec![a("a")]))],
            0,
            &Clause::new(
                Atom::new("p", vec![a("b")]),
                vec![Literal::Pos(Atom::new("q", vec![a("b")]))],
            ),
            &mut n,
        )
        .is_none());
    }

    #[test]
    fn rename_keeps_sharing_and_freshness() {
        let c = Clause::new(
            Atom::new("p", vec![v("X")]),
            vec![Literal::Pos(Atom::new("q", vec![v("X"), v("Y")]))],
        );
        let mut n = 0;
        let r1 = rename_clause(&c, &mut n);
        let r2 = rename_clause(&c, &mut n);
        // Shared variable stays shared inside one renaming.
        assert_eq!(r1.head.args[0], r1.body[0].atom().unwrap().args[0]);
        // Distinct renamings are disjoint.
        assert_ne!(r1.head.args[0], r2.head.args[0]);
    }

    #[test]
    fn augment_examples() {
        let p = Program::new(vec![Clause::fact(Atom::new("p", vec![a("a")]))]);
        let aug = augment(&p).unwrap();
        assert_eq!(aug.clauses.len(), 2);
        let extra = &aug.clauses[1];
        assert_eq!(extra.head.to_string(), "aug_p(aug_f(aug_c))");
        assert!(augment(&aug).is_err());

        let empty = Program::new(vec![]);
        assert_eq!(augment(&empty).unwrap().clauses.len(), 1);
    }

    /// Brute-force unifier oracle: enumerate substitutions over a small term
    /// universe and check maximal generality of mgu.
    #[test]
    fn mgu_is_most_general_on_enumerated_pairs() {
        let base: Vec<Term> = vec![a("a"), a("b"), v("X"), v("Y")];
        let mut terms = base.clone();
        for t in &base {
            terms.push(f(t.clone()));
        }
        let targets: Vec<Term> = terms.clone();

        let vars = [Var::new("X"), Var::new("Y")];
        let mut substs: Vec<Subst> = Vec::new();
        for tx in &targets {
            for ty in &targets {
                let mut s = Subst::new();
                if s.bind(vars[0].clone(), tx.clone()) && s.bind(vars[1].clone(), ty.clone()) {
                    substs.push(s);
                }
            }
        }

        for t1 in &terms {
            for t2 in &terms {
                let a1 = Atom::new("p", vec![t1.clone()]);
                let a2 = Atom::new("p", vec![t2.clone()]);
                let m = mgu(&a1, &a2);
                let unifiers: Vec<&Subst> = substs
                    .iter()
                    .filter(|s| s.apply_atom(&a1) == s.apply_atom(&a2))
                    .collect();
                match m {
                    None => assert!(
                        unifiers.iter().all(|s| {
                            // ground-instantiating both sides may still differ
                            s.apply_atom(&a1) != s.apply_atom(&a2)
                        }),
                        "mgu missed a unifier for {a1} ~ {a2}"
                    ),
                    Some(theta) => {
                        let u1 = theta.apply_atom(&a1);
                        assert_eq!(u1, theta.apply_atom(&a2));
                        // every enumerated unifier factors through theta
                        for beta in unifiers {
                            let inst = beta.apply_atom(&a1);
                            assert!(
                                match_atom(&u1, &inst).is_some(),
                                "unifier {beta} of {a1} ~ {a2} does not factor through {theta}"
                            );
                        }
                    }
                }
            }
        }
    }
}
