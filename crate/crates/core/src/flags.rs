//! Completion and loop-dependency flags for the optimized builder.
//!
//! All flags are keyed by the canonical (variant-normalized) form of the
//! selected subgoal, so variants share one flag. `comp` and `loop_depend`
//! persist for the whole evaluation of one query; `comp_used` records
//! which clauses have been completely used within the current tree build
//! and is cleared when a new build starts.

use std::collections::BTreeSet;

use crate::lang::Atom;

#[derive(Clone, Debug, Default)]
pub struct Flags {
    comp: BTreeSet<Atom>,
    comp_used: BTreeSet<(Atom, usize)>,
    loop_depend: BTreeSet<Atom>,
}

impl Flags {
    /// All answers of this subgoal class are already tabled.
    pub fn comp(&self, class: &Atom) -> bool {
        self.comp.contains(class)
    }

    pub fn set_comp(&mut self, class: Atom) {
        self.comp.insert(class);
    }

    /// The clause has been completely used by some variant of the class
    /// earlier in the current build.
    pub fn comp_used(&self, class: &Atom, clause: usize) -> bool {
        self.comp_used.contains(&(class.clone(), clause))
    }

    pub fn set_comp_used(&mut self, class: Atom, clause: usize) {
        self.comp_used.insert((class, clause));
    }

    /// Some variant of the class was selected at a loop-dependent node.
    pub fn loop_depend(&self, class: &Atom) -> bool {
        self.loop_depend.contains(class)
    }

    pub fn set_loop_depend(&mut self, class: Atom) {
        self.loop_depend.insert(class);
    }

    /// Start a new tree build: completely-used marks do not carry over.
    pub fn begin_build(&mut self) {
        self.comp_used.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comp_used_clears_per_build_while_comp_persists() {
        let mut f = Flags::default();
        let p = Atom::prop("p");
        f.set_comp(p.clone());
        f.set_comp_used(p.clone(), 2);
        f.set_loop_depend(p.clone());
        assert!(f.comp(&p) && f.comp_used(&p, 2) && f.loop_depend(&p));
        f.begin_build();
        assert!(f.comp(&p));
        assert!(!f.comp_used(&p, 2));
        assert!(f.loop_depend(&p));
    }
}
