//! Arithmetic builtins: `is/2`, `</2`, `odd/1`, `even/1`.
//! Right-hand sides are ground integer expressions over +, -, *.

use crate::lang::{Atom, Subst, Term};
use crate::parser::is_builtin;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinResult {
    Succeeds(Subst),
    Fails,
    /// Non-ground or non-integer argument where an integer is required.
    Error(String),
}

pub fn is_builtin_atom(a: &Atom) -> bool {
    is_builtin(&a.pred, a.arity())
}

const INSTANTIATION: &str = "builtin instantiation error";

fn eval_arith(t: &Term) -> Result<i64, String> {
    match t {
        Term::Int(n) => Ok(*n),
        Term::Var(_) => Err(INSTANTIATION.to_string()),
        Term::App(op, args) if args.len() == 2 => {
            let l = eval_arith(&args[0])?;
            let r = eval_arith(&args[1])?;
            let v = match op.as_str() {
                "+" => l.checked_add(r),
                "-" => l.checked_sub(r),
                "*" => l.checked_mul(r),
                _ => return Err(INSTANTIATION.to_string()),
            };
            v.ok_or_else(|| "arithmetic overflow".to_string())
        }
        Term::App(..) => Err(INSTANTIATION.to_string()),
    }
}

/// Evaluate a builtin atom. `is/2` may bind a left-side variable; everything
/// else requires ground integer arguments.
pub fn eval_builtin(a: &Atom) -> BuiltinResult {
    match (a.pred.as_str(), a.args.len()) {
        ("is", 2) => {
            let v = match eval_arith(&a.args[1]) {
                Ok(v) => v,
                Err(e) => return BuiltinResult::Error(e),
            };
            match &a.args[0] {
                Term::Var(x) => {
                    let s = Subst::singleton(x.clone(), Term::Int(v)).expect("int binding");
                    BuiltinResult::Succeeds(s)
                }
                Term::Int(n) if *n == v => BuiltinResult::Succeeds(Subst::new()),
                Term::Int(_) => BuiltinResult::Fails,
                Term::App(..) => match eval_arith(&a.args[0]) {
                    Ok(l) if l == v => BuiltinResult::Succeeds(Subst::new()),
                    Ok(_) => BuiltinResult::Fails,
                    Err(e) => BuiltinResult::Error(e),
                },
            }
        }
        ("<", 2) => match (eval_arith(&a.args[0]), eval_arith(&a.args[1])) {
            (Ok(l), Ok(r)) if l < r => BuiltinResult::Succeeds(Subst::new()),
            (Ok(_), Ok(_)) => BuiltinResult::Fails,
            (Err(e), _) | (_, Err(e)) => BuiltinResult::Error(e),
        },
        ("odd", 1) => parity(&a.args[0], 1),
        ("even", 1) => parity(&a.args[0], 0),
        _ => BuiltinResult::Error(format!("not a builtin: {}/{}", a.pred, a.args.len())),
    }
}

fn parity(t: &Term, want: i64) -> BuiltinResult {
    match eval_arith(t) {
        Ok(v) if v.rem_euclid(2) == want => BuiltinResult::Succeeds(Subst::new()),
        Ok(_) => BuiltinResult::Fails,
        Err(e) => BuiltinResult::Error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(text: &str) -> Atom {
        // piggyback on the clause parser: builtins are legal only in bodies
        let p = crate::parser::parse_program(&format!("t :- {text}.")).unwrap();
        p.clauses[0].body[0].atom().unwrap().clone()
    }

    #[test]
    fn is_binds_left_variable() {
        match eval_builtin(&atom("X is 1+1")) {
            BuiltinResult::Succeeds(s) => {
                assert_eq!(s.apply_term(&Term::var("X")), Term::Int(2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_and_parity() {
        assert!(matches!(eval_builtin(&atom("2<5")), BuiltinResult::Succeeds(_)));
        assert!(matches!(eval_builtin(&atom("5<5")), BuiltinResult::Fails));
        assert!(matches!(eval_builtin(&atom("1+3<2*3")), BuiltinResult::Succeeds(_)));
        assert!(matches!(eval_builtin(&atom("odd(2)")), BuiltinResult::Fails));
        assert!(matches!(eval_builtin(&atom("odd(3)")), BuiltinResult::Succeeds(_)));
        assert!(matches!(eval_builtin(&atom("even(2)")), BuiltinResult::Succeeds(_)));
        // parity over an expression argument (constructed; args parse as plain terms)
        let e = Atom::new(
            "even",
            vec![Term::App(
                "+".into(),
                vec![Term::App("*".into(), vec![Term::Int(2), Term::Int(3)]), Term::Int(1)],
            )],
        );
        assert!(matches!(eval_builtin(&e), BuiltinResult::Fails));
    }

    #[test]
    fn ground_is_checks_equality() {
        assert!(matches!(eval_builtin(&atom("2 is 1+1")), BuiltinResult::Succeeds(_)));
        assert!(matches!(eval_builtin(&atom("3 is 1+1")), BuiltinResult::Fails));
        assert!(matches!(eval_builtin(&atom("1+1 is 2*1")), BuiltinResult::Succeeds(_)));
    }

    #[test]
    fn instantiation_errors() {
        for bad in ["X is Y+1", "X < 5", "2 < Y", "odd(X)", "X is a+1"] {
            match eval_builtin(&atom(bad)) {
                BuiltinResult::Error(e) => assert_eq!(e, "builtin instantiation error", "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn negatives_via_subtraction() {
        match eval_builtin(&atom("X is 1-3")) {
            BuiltinResult::Succeeds(s) => assert_eq!(s.apply_term(&Term::var("X")), Term::Int(-2)),
            other => panic!("{other:?}"),
        }
        let neg = Atom::new("odd", vec![Term::App("-".into(), vec![Term::Int(1), Term::Int(2)])]);
        assert!(matches!(eval_builtin(&neg), BuiltinResult::Succeeds(_)));
    }
}
