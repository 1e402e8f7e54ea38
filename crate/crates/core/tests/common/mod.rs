//! Random-program generation shared by the property and acceptance suites.
//!
//! All generated programs are function-free. Negative body literals take
//! constant arguments only, so a negative subgoal is always ground by the
//! time it is selected and no generated query can flounder.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slt_wfs::lang::Atom;
use slt_wfs::oracle::PartialInterp;
use std::collections::BTreeSet;

pub const PREDS: [&str; 4] = ["p", "q", "r", "s"];
pub const CONSTS: [&str; 3] = ["a", "b", "c"];
pub const VARS: [&str; 3] = ["X", "Y", "Z"];

pub struct GenLimits {
    pub max_preds: usize,
    pub max_consts: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    pub max_arity: usize,
}

impl Default for GenLimits {
    fn default() -> GenLimits {
        GenLimits { max_preds: 4, max_consts: 3, max_clauses: 6, max_body: 3, max_arity: 2 }
    }
}

fn atom_text(rng: &mut ChaCha8Rng, k: usize, arities: &[usize], n_consts: usize, consts_only: bool) -> String {
    let mut s = PREDS[k].to_string();
    if arities[k] > 0 {
        let args: Vec<&str> = (0..arities[k])
            .map(|_| {
                if !consts_only && rng.random_bool(0.5) {
                    VARS[rng.random_range(0..VARS.len())]
                } else {
                    CONSTS[rng.random_range(0..n_consts)]
                }
            })
            .collect();
        s.push('(');
        s.push_str(&args.join(", "));
        s.push(')');
    }
    s
}

/// Normal program as source text; returns the text and the arity chosen for
/// each predicate in PREDS order (unused predicates keep an arity too).
pub fn random_program(rng: &mut ChaCha8Rng, lim: &GenLimits) -> (String, Vec<usize>) {
    let n_preds = rng.random_range(1..=lim.max_preds);
    let n_consts = rng.random_range(1..=lim.max_consts);
    let arities: Vec<usize> = (0..n_preds).map(|_| rng.random_range(0..=lim.max_arity)).collect();
    let n_clauses = rng.random_range(1..=lim.max_clauses);
    let mut src = String::new();
    for _ in 0..n_clauses {
        let h = rng.random_range(0..n_preds);
        src.push_str(&atom_text(rng, h, &arities, n_consts, false));
        let n_body = rng.random_range(0..=lim.max_body);
        for k in 0..n_body {
            src.push_str(if k == 0 { " :- " } else { ", " });
            let b = rng.random_range(0..n_preds);
            if rng.random_bool(0.35) {
                src.push_str("\\+ ");
                src.push_str(&atom_text(rng, b, &arities, n_consts, true));
            } else {
                src.push_str(&atom_text(rng, b, &arities, n_consts, false));
            }
        }
        src.push_str(".\n");
    }
    (src, arities)
}

/// Ground program over at most three predicates and two constants, so the
/// Herbrand base stays within twelve atoms.
pub fn random_ground_program(rng: &mut ChaCha8Rng) -> String {
    let n_preds = rng.random_range(1..=3);
    let arities: Vec<usize> = (0..n_preds).map(|_| rng.random_range(0..=2)).collect();
    let n_clauses = rng.random_range(1..=8);
    let mut src = String::new();
    for _ in 0..n_clauses {
        let h = rng.random_range(0..n_preds);
        src.push_str(&atom_text(rng, h, &arities, 2, true));
        let n_body = rng.random_range(0..=3);
        for k in 0..n_body {
            src.push_str(if k == 0 { " :- " } else { ", " });
            if rng.random_bool(0.5) {
                src.push_str("\\+ ");
            }
            let b = rng.random_range(0..n_preds);
            src.push_str(&atom_text(rng, b, &arities, 2, true));
        }
        src.push_str(".\n");
    }
    src
}

/// Consistent partial interpretation: each base atom lands in pos, neg or
/// neither with equal odds for the decided cases.
pub fn random_interp(rng: &mut ChaCha8Rng, base: &BTreeSet<Atom>) -> PartialInterp {
    let mut i = PartialInterp::new();
    for a in base {
        match rng.random_range(0..4) {
            0 => {
                i.pos.insert(a.clone());
            }
            1 => {
                i.neg.insert(a.clone());
            }
            _ => {}
        }
    }
    i
}

/// Left-recursive reachability chain over n vertices: reach(1..n) all hold.
pub fn chain_program(n: usize) -> String {
    let mut src = String::from("reach(1).\nreach(X) :- reach(Y), edge(Y, X).\n");
    for k in 1..n {
        src.push_str(&format!("edge({}, {}).\n", k, k + 1));
    }
    src
}

/// Win/move game over a single directed cycle of length n.
pub fn cycle_game_program(n: usize) -> String {
    let mut src = String::from("win(X) :- move(X, Y), \\+ win(Y).\n");
    for k in 1..=n {
        let next = if k == n { 1 } else { k + 1 };
        src.push_str(&format!("move({k}, {next}).\n"));
    }
    src
}

/// n independent two-literal negative loops r_k <-> s_k.
pub fn mutual_negation_program(n: usize) -> String {
    let mut src = String::new();
    for k in 1..=n {
        src.push_str(&format!("r{k} :- \\+ s{k}.\ns{k} :- \\+ r{k}.\n"));
    }
    src
}
