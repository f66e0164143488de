//! Quantifier-free formulas over terms: atoms `t > 0` / `t >= 0`,
//! conjunction, disjunction, and embedded flow constraints.
//!
//! Negation is not a node. It is eliminated at construction by [`negate`],
//! which pushes it to the atoms (`t > 0` becomes `-t >= 0` and dually) and
//! swaps the connectives.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::NumericError;
use crate::eval::eval_point as eval_term_point;
use crate::ode::FlowConstraint;
use crate::term::{Rational, Term};

/// `term > 0` when `strict`, else `term >= 0`. Everything is normalized to
/// this left-hand-side form.
#[derive(Clone, PartialEq, Debug)]
pub struct Atom {
    pub term: Term,
    pub strict: bool,
}

impl Atom {
    pub fn ge(term: Term) -> Atom {
        Atom { term, strict: false }
    }

    pub fn gt(term: Term) -> Atom {
        Atom { term, strict: true }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// A continuous-flow conjunct; see the `ode` module.
    Flow(FlowConstraint),
}

impl Formula {
    pub fn atom_ge(term: Term) -> Formula {
        Formula::Atom(Atom::ge(term))
    }

    pub fn atom_gt(term: Term) -> Formula {
        Formula::Atom(Atom::gt(term))
    }

    /// Conjunction with unit/absorbing simplification. Use the raw `And`
    /// constructor when exact structure matters.
    pub fn and(items: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(items: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    /// Equality `a = b` encoded as `a - b >= 0 /\ b - a >= 0`.
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::And(vec![
            Formula::atom_ge(a.clone() - b.clone()),
            Formula::atom_ge(b - a),
        ])
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => a.term.collect_into(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_vars(out);
                }
            }
            Formula::Flow(fc) => fc.collect_system_vars(out),
        }
    }

    /// Rewrite variables of every atom; flow constraints are left alone
    /// (their variable wiring is explicit, not name-based).
    pub fn rename_vars(&self, f: &impl Fn(&str) -> Term) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(Atom {
                term: a.term.rename_vars(f),
                strict: a.strict,
            }),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.rename_vars(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.rename_vars(f)).collect()),
            Formula::Flow(fc) => Formula::Flow(fc.clone()),
        }
    }

    /// Visit all arithmetic atoms (not descending into flow invariants).
    pub fn for_each_atom(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::And(fs) | Formula::Or(fs) => {
                for g in fs {
                    g.for_each_atom(f);
                }
            }
            _ => {}
        }
    }
}

/// δ-weakening: every atom's threshold is shifted by −δ, i.e. `t > 0`
/// becomes `t + δ > 0`. Distributes over the connectives and recurses into
/// flow-constraint invariants. δ = 0 returns the formula unchanged.
pub fn delta_weaken(phi: &Formula, delta: &Rational) -> Result<Formula, NumericError> {
    if delta.is_negative() {
        return Err(NumericError::Shape("negative delta".to_string()));
    }
    if delta.is_zero() {
        return Ok(phi.clone());
    }
    Ok(weaken_rec(phi, delta))
}

fn weaken_rec(phi: &Formula, delta: &Rational) -> Formula {
    match phi {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => Formula::Atom(Atom {
            term: a.term.clone() + Term::rat(delta.clone()),
            strict: a.strict,
        }),
        Formula::And(fs) => Formula::And(fs.iter().map(|f| weaken_rec(f, delta)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| weaken_rec(f, delta)).collect()),
        Formula::Flow(fc) => {
            let mut fc = fc.clone();
            fc.invariant = weaken_rec(&fc.invariant, delta);
            Formula::Flow(fc)
        }
    }
}

/// Negation as a defined operation: swaps strict/nonstrict atoms with their
/// negated terms, swaps the connectives, and swaps the boolean constants.
/// The result contains no negation nodes by construction.
///
/// Panics on flow constraints; nothing in the encodings negates a flow.
pub fn negate(phi: &Formula) -> Formula {
    match phi {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(a) => Formula::Atom(Atom {
            term: -a.term.clone(),
            strict: !a.strict,
        }),
        Formula::And(fs) => Formula::Or(fs.iter().map(negate).collect()),
        Formula::Or(fs) => Formula::And(fs.iter().map(negate).collect()),
        Formula::Flow(_) => panic!("flow constraints cannot be negated"),
    }
}

/// Standard truth evaluation at a point (midpoint arithmetic).
pub fn eval_point(phi: &Formula, point: &HashMap<String, f64>) -> Result<bool, NumericError> {
    match phi {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => {
            let v = eval_term_point(&a.term, point)?;
            Ok(if a.strict { v > 0.0 } else { v >= 0.0 })
        }
        Formula::And(fs) => {
            for f in fs {
                if !eval_point(f, point)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for f in fs {
                if eval_point(f, point)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Flow(_) => Err(NumericError::Shape(
            "flow constraints cannot be point-evaluated".to_string(),
        )),
    }
}

impl fmt::Display for Formula {
    /// Prefix-notation dump for debugging; not a stable format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(
                f,
                "({} {} 0)",
                if a.strict { ">" } else { ">=" },
                a.term.prefix_form()
            ),
            Formula::And(fs) => {
                write!(f, "(and")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Or(fs) => {
                write!(f, "(or")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Flow(fc) => write!(f, "(flow mode={} dwell={})", fc.mode, fc.dwell),
        }
    }
}

/// Solver-facing precision and unrolling settings.
#[derive(Clone, Debug)]
pub struct Config {
    /// δ, the weakening applied on the sat side. Must be positive.
    pub delta: Rational,
    /// Largest number of jumps considered by reachability checking.
    pub max_unroll_k: u32,
    /// Per-mode dwell-time bound M, in model time units.
    pub mode_dwell_bound: f64,
}

impl Config {
    pub fn new(delta: Rational, max_unroll_k: u32, mode_dwell_bound: f64) -> Config {
        assert!(!delta.is_negative() && !delta.is_zero(), "delta must be positive");
        assert!(mode_dwell_bound > 0.0, "dwell bound must be positive");
        Config {
            delta,
            max_unroll_k,
            mode_dwell_bound,
        }
    }
}

impl Default for Config {
    fn default() -> Config {
        Config {
            delta: Rational::from_ratio(1, 1000),
            max_unroll_k: 3,
            mode_dwell_bound: 10.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
    }

    #[test]
    fn weaken_shifts_atoms() {
        // (x - 1 > 0) with delta = 0.1 accepts x = 0.95.
        let phi = Formula::atom_gt(Term::var("x") - Term::int(1));
        let w = delta_weaken(&phi, &Rational::from_ratio(1, 10)).unwrap();
        assert!(!eval_point(&phi, &pt(&[("x", 0.95)])).unwrap());
        assert!(eval_point(&w, &pt(&[("x", 0.95)])).unwrap());
        assert!(!eval_point(&w, &pt(&[("x", 0.85)])).unwrap());
    }

    #[test]
    fn weaken_zero_is_identity() {
        let phi = Formula::And(vec![
            Formula::atom_gt(Term::var("x")),
            Formula::atom_ge(Term::var("y")),
        ]);
        assert_eq!(delta_weaken(&phi, &Rational::zero()).unwrap(), phi);
    }

    #[test]
    fn weaken_distributes_over_connectives() {
        let a = Formula::atom_gt(Term::var("x"));
        let b = Formula::atom_ge(Term::var("y"));
        let d = Rational::from_ratio(1, 2);
        let whole = delta_weaken(&Formula::And(vec![a.clone(), b.clone()]), &d).unwrap();
        let parts = Formula::And(vec![
            delta_weaken(&a, &d).unwrap(),
            delta_weaken(&b, &d).unwrap(),
        ]);
        assert_eq!(whole, parts);
    }

    #[test]
    fn weaken_rejects_negative_delta() {
        let phi = Formula::atom_gt(Term::var("x"));
        assert!(delta_weaken(&phi, &Rational::from_int(-1)).is_err());
    }

    #[test]
    fn negate_swaps_atom_kind() {
        // not (x > 0) = (-x >= 0)
        let phi = Formula::atom_gt(Term::var("x"));
        let n = negate(&phi);
        match &n {
            Formula::Atom(a) => assert!(!a.strict),
            other => panic!("unexpected {other}"),
        }
        assert!(eval_point(&n, &pt(&[("x", 0.0)])).unwrap());
        assert!(!eval_point(&n, &pt(&[("x", 1.0)])).unwrap());
    }

    #[test]
    fn negate_is_de_morgan_and_involutive() {
        let phi = Formula::And(vec![
            Formula::atom_gt(Term::var("x")),
            Formula::Or(vec![
                Formula::atom_ge(Term::var("y")),
                Formula::False,
            ]),
        ]);
        let n = negate(&phi);
        assert!(matches!(n, Formula::Or(_)));
        assert_eq!(negate(&n), phi);
    }

    #[test]
    fn point_evaluation() {
        let phi = Formula::atom_gt(Term::var("x") - Term::int(1));
        assert!(eval_point(&phi, &pt(&[("x", 2.0)])).unwrap());
        assert!(!eval_point(&phi, &pt(&[("x", 1.0)])).unwrap());
        let disj = Formula::Or(vec![
            Formula::atom_ge(Term::var("x")),
            Formula::atom_gt(Term::var("x") + Term::int(5)),
        ]);
        assert!(eval_point(&disj, &pt(&[("x", -1.0)])).unwrap());
        assert!(matches!(
            eval_point(&phi, &pt(&[("y", 0.0)])),
            Err(NumericError::Shape(_))
        ));
    }
}
