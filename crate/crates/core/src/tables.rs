//! Answer tables shared across tree builds.
//!
//! `TB_t` holds tabled positive answers in global first-in order with
//! variant-level deduplication (atoms are stored canonicalized). `TB_f`
//! holds tabled negative answers: ground atoms established false.

use std::collections::BTreeSet;

use crate::lang::{canonicalize, Atom};

#[derive(Clone, Debug, Default)]
pub struct Tables {
    answers: Vec<Atom>,
    seen: BTreeSet<Atom>,
    false_atoms: BTreeSet<Atom>,
}

impl Tables {
    /// Table a positive answer (stored canonicalized). Returns true when new.
    pub fn add_answer(&mut self, a: &Atom) -> bool {
        let c = canonicalize(a);
        if self.seen.insert(c.clone()) {
            self.answers.push(c);
            true
        } else {
            false
        }
    }

    /// Tabled positive answers in insertion order.
    pub fn answers(&self) -> &[Atom] {
        &self.answers
    }

    pub fn has_answer(&self, a: &Atom) -> bool {
        self.seen.contains(&canonicalize(a))
    }

    /// Table a ground atom as false. Returns true when new.
    pub fn add_false(&mut self, a: Atom) -> bool {
        debug_assert!(a.is_ground());
        self.false_atoms.insert(a)
    }

    pub fn is_false(&self, a: &Atom) -> bool {
        self.false_atoms.contains(a)
    }

    pub fn false_atoms(&self) -> &BTreeSet<Atom> {
        &self.false_atoms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Term;

    fn at(p: &str, args: Vec<Term>) -> Atom {
        Atom::new(p, args)
    }

    #[test]
    fn answers_keep_insertion_order_and_dedupe_variants() {
        let mut t = Tables::default();
        assert!(t.add_answer(&at("q", vec![Term::constant("a")])));
        assert!(t.add_answer(&at("p", vec![Term::constant("a")])));
        // variant of an existing answer: p(X) vs p(Y)
        assert!(t.add_answer(&at("p", vec![Term::var("X")])));
        assert!(!t.add_answer(&at("p", vec![Term::var("Y")])));
        assert!(!t.add_answer(&at("q", vec![Term::constant("a")])));
        let rendered: Vec<String> = t.answers().iter().map(|a| a.to_string()).collect();
        assert_eq!(rendered, vec!["q(a)", "p(a)", "p(V0)"]);
        assert!(t.has_answer(&at("p", vec![Term::var("Z")])));
    }

    #[test]
    fn false_atoms_are_a_set() {
        let mut t = Tables::default();
        assert!(t.add_false(Atom::prop("w")));
        assert!(!t.add_false(Atom::prop("w")));
        assert!(t.is_false(&Atom::prop("w")));
        assert!(!t.is_false(&Atom::prop("v")));
    }
}
