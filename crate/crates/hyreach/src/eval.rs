//! Term evaluation: natural interval extension and point arithmetic.
//!
//! `eval_interval` is the reference tree walk. Hot paths (the ODE integrator
//! and the HC4 contractor) compile terms once against a fixed `VarSet` into
//! flat postfix [`Program`]s so evaluation does no hashing or allocation.

use std::collections::HashMap;

use crate::boxes::{IntervalBox, VarSet};
use crate::error::NumericError;
use crate::interval::Interval;
use crate::term::{Func, Term};

/// Natural interval extension of `term` over the box `env`.
///
/// Sound: the result contains `{term(v) : v in env}`. Errors only when a
/// function argument wholly violates its domain or a variable is unbound.
pub fn eval_interval(term: &Term, env: &IntervalBox) -> Result<Interval, NumericError> {
    match term {
        Term::Var(v) => env
            .get_named(v)
            .map_err(|_| NumericError::Shape(format!("unbound variable `{v}`"))),
        Term::Const(c) => Ok(c.to_interval()),
        Term::Add(a, b) => Ok(eval_interval(a, env)?.add(&eval_interval(b, env)?)),
        Term::Sub(a, b) => Ok(eval_interval(a, env)?.sub(&eval_interval(b, env)?)),
        Term::Neg(a) => Ok(eval_interval(a, env)?.neg()),
        Term::Mul(a, b) => Ok(eval_interval(a, env)?.mul(&eval_interval(b, env)?)),
        Term::Div(a, b) => eval_interval(a, env)?.div(&eval_interval(b, env)?),
        Term::Pow(a, n) => eval_interval(a, env)?.powi(*n),
        Term::App(f, a) => apply_func(*f, eval_interval(a, env)?),
        Term::Min(a, b) => Ok(eval_interval(a, env)?.min_i(&eval_interval(b, env)?)),
        Term::Max(a, b) => Ok(eval_interval(a, env)?.max_i(&eval_interval(b, env)?)),
    }
}

pub(crate) fn apply_func(f: Func, x: Interval) -> Result<Interval, NumericError> {
    match f {
        Func::Exp => Ok(x.exp()),
        Func::Ln => x.ln(),
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
        Func::Sqrt => x.sqrt(),
        Func::Abs => Ok(x.abs()),
        Func::Tanh => Ok(x.tanh()),
    }
}

/// Double-precision point evaluation; NaN results indicate a domain
/// violation at the point.
pub fn eval_point(term: &Term, env: &HashMap<String, f64>) -> Result<f64, NumericError> {
    match term {
        Term::Var(v) => env
            .get(v)
            .copied()
            .ok_or_else(|| NumericError::Shape(format!("unbound variable `{v}`"))),
        Term::Const(c) => Ok(c.to_f64()),
        Term::Add(a, b) => Ok(eval_point(a, env)? + eval_point(b, env)?),
        Term::Sub(a, b) => Ok(eval_point(a, env)? - eval_point(b, env)?),
        Term::Neg(a) => Ok(-eval_point(a, env)?),
        Term::Mul(a, b) => Ok(eval_point(a, env)? * eval_point(b, env)?),
        Term::Div(a, b) => Ok(eval_point(a, env)? / eval_point(b, env)?),
        Term::Pow(a, n) => Ok(eval_point(a, env)?.powi(*n)),
        Term::App(f, a) => {
            let x = eval_point(a, env)?;
            Ok(match f {
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => x.sqrt(),
                Func::Abs => x.abs(),
                Func::Tanh => x.tanh(),
            })
        }
        Term::Min(a, b) => Ok(eval_point(a, env)?.min(eval_point(b, env)?)),
        Term::Max(a, b) => Ok(eval_point(a, env)?.max(eval_point(b, env)?)),
    }
}

/// One postfix instruction of a compiled term.
#[derive(Clone, Debug)]
pub enum Op {
    Var(u32),
    Const(Interval),
    Add,
    Sub,
    Neg,
    Mul,
    Div,
    Pow(i32),
    App(Func),
    Min,
    Max,
}

/// A term compiled against a `VarSet`: variables are slot indices.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    depth: usize,
}

impl Program {
    pub fn compile(term: &Term, vars: &VarSet) -> Result<Program, NumericError> {
        let mut ops = Vec::new();
        fn go(t: &Term, vars: &VarSet, ops: &mut Vec<Op>) -> Result<(), NumericError> {
            match t {
                Term::Var(v) => {
                    let i = vars
                        .index_of(v)
                        .ok_or_else(|| NumericError::Shape(format!("unbound variable `{v}`")))?;
                    ops.push(Op::Var(i as u32));
                }
                Term::Const(c) => ops.push(Op::Const(c.to_interval())),
                Term::Add(a, b) => {
                    go(a, vars, ops)?;
                    go(b, vars, ops)?;
                    ops.push(Op::Add);
                }
                Term::Sub(a, b) => {
                    go(a, vars, ops)?;
                    go(b, vars, ops)?;
                    ops.push(Op::Sub);
                }
                Term::Neg(a) => {
                    go(a, vars, ops)?;
                    ops.push(Op::Neg);
                }
                Term::Mul(a, b) => {
                    go(a, vars, ops)?;
                    go(b, vars, ops)?;
                    ops.push(Op::Mul);
                }
                Term::Div(a, b) => {
                    go(a, vars, ops)?;
                    go(b, vars, ops)?;
                    ops.push(Op::Div);
                }
                Term::Pow(a, n) => {
                    go(a, vars, ops)?;
                    ops.push(Op::Pow(*n));
                }
                Term::App(f, a) => {
                    go(a, vars, ops)?;
                    ops.push(Op::App(*f));
                }
                Term::Min(a, b) => {
                    go(a, vars, ops)?;
                    go(b, vars, ops)?;
                    ops.push(Op::Min);
                }
                Term::Max(a, b) => {
                    go(a, vars, ops)?;
                    go(b, vars, ops)?;
                    ops.push(Op::Max);
                }
            }
            Ok(())
        }
        go(term, vars, &mut ops)?;
        let mut depth = 0usize;
        let mut cur = 0usize;
        for op in &ops {
            match op {
                Op::Var(_) | Op::Const(_) => cur += 1,
                Op::Neg | Op::Pow(_) | Op::App(_) => {}
                _ => cur -= 1,
            }
            depth = depth.max(cur);
        }
        Ok(Program { ops, depth })
    }

    /// Interval evaluation over slot values.
    pub fn eval(&self, slots: &[Interval]) -> Result<Interval, NumericError> {
        let mut stack: Vec<Interval> = Vec::with_capacity(self.depth);
        for op in &self.ops {
            match op {
                Op::Var(i) => stack.push(slots[*i as usize]),
                Op::Const(c) => stack.push(*c),
                Op::Neg => {
                    let a = stack.last_mut().expect("stack");
                    *a = a.neg();
                }
                Op::Pow(n) => {
                    let a = stack.last_mut().expect("stack");
                    *a = a.powi(*n)?;
                }
                Op::App(f) => {
                    let a = stack.last_mut().expect("stack");
                    *a = apply_func(*f, *a)?;
                }
                Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Min | Op::Max => {
                    let b = stack.pop().expect("stack");
                    let a = stack.last_mut().expect("stack");
                    *a = match op {
                        Op::Add => a.add(&b),
                        Op::Sub => a.sub(&b),
                        Op::Mul => a.mul(&b),
                        Op::Div => a.div(&b)?,
                        Op::Min => a.min_i(&b),
                        Op::Max => a.max_i(&b),
                        _ => unreachable!(),
                    };
                }
            }
        }
        debug_assert_eq!(stack.len(), 1);
        Ok(stack[0])
    }

    /// f64 evaluation over slot values; domain violations surface as NaN.
    pub fn eval_f64(&self, slots: &[f64]) -> f64 {
        let mut stack: Vec<f64> = Vec::with_capacity(self.depth);
        for op in &self.ops {
            match op {
                Op::Var(i) => stack.push(slots[*i as usize]),
                Op::Const(c) => stack.push(c.midpoint()),
                Op::Neg => {
                    let a = stack.last_mut().expect("stack");
                    *a = -*a;
                }
                Op::Pow(n) => {
                    let a = stack.last_mut().expect("stack");
                    *a = a.powi(*n);
                }
                Op::App(f) => {
                    let a = stack.last_mut().expect("stack");
                    *a = match f {
                        Func::Exp => a.exp(),
                        Func::Ln => a.ln(),
                        Func::Sin => a.sin(),
                        Func::Cos => a.cos(),
                        Func::Sqrt => a.sqrt(),
                        Func::Abs => a.abs(),
                        Func::Tanh => a.tanh(),
                    };
                }
                Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Min | Op::Max => {
                    let b = stack.pop().expect("stack");
                    let a = stack.last_mut().expect("stack");
                    *a = match op {
                        Op::Add => *a + b,
                        Op::Sub => *a - b,
                        Op::Mul => *a * b,
                        Op::Div => *a / b,
                        Op::Min => a.min(b),
                        Op::Max => a.max(b),
                        _ => unreachable!(),
                    };
                }
            }
        }
        debug_assert_eq!(stack.len(), 1);
        stack[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::IntervalBox;

    fn env(pairs: &[(&str, f64, f64)]) -> IntervalBox {
        IntervalBox::from_pairs(
            pairs
                .iter()
                .map(|(n, lo, hi)| (*n, Interval::new(*lo, *hi))),
        )
    }

    #[test]
    fn addition_example() {
        let t = Term::var("x") + Term::var("y");
        let r = eval_interval(&t, &env(&[("x", 1.0, 2.0), ("y", 3.0, 4.0)])).unwrap();
        assert!(r.contains_interval(&Interval::new(4.0, 6.0)));
        assert!(r.width() <= 2.0 + 1e-12);
    }

    #[test]
    fn multiplication_against_endpoint_oracle() {
        let t = Term::var("x") * Term::var("y");
        let r = eval_interval(&t, &env(&[("x", -1.0, 2.0), ("y", 3.0, 4.0)])).unwrap();
        assert!(r.contains_interval(&Interval::new(-4.0, 8.0)));
        assert!(r.lo() >= -4.0 - 1e-12 && r.hi() <= 8.0 + 1e-12);
    }

    #[test]
    fn sin_example() {
        let t = Term::app(Func::Sin, Term::var("x"));
        let r = eval_interval(&t, &env(&[("x", 0.0, std::f64::consts::PI)])).unwrap();
        assert!(r.contains_interval(&Interval::new(0.0, 1.0)));
        assert!(r.lo() >= -1e-9 && r.hi() <= 1.0 + 1e-9);
    }

    #[test]
    fn domain_violation_errors() {
        let t = Term::app(Func::Sqrt, Term::var("x"));
        assert!(eval_interval(&t, &env(&[("x", -3.0, -1.0)])).is_err());
        // Partial overlap evaluates over the valid part.
        let r = eval_interval(&t, &env(&[("x", -1.0, 4.0)])).unwrap();
        assert!(r.contains_interval(&Interval::new(0.0, 2.0)));
    }

    #[test]
    fn unbound_variable_is_shape_error() {
        let t = Term::var("z");
        assert!(matches!(
            eval_interval(&t, &env(&[("x", 0.0, 1.0)])),
            Err(NumericError::Shape(_))
        ));
    }

    #[test]
    fn program_agrees_with_tree_walk() {
        let t = (Term::var("x") * Term::var("y") - Term::int(1)).pow(2)
            + Term::app(Func::Exp, Term::var("x"));
        let e = env(&[("x", -0.5, 0.5), ("y", 1.0, 2.0)]);
        let tree = eval_interval(&t, &e).unwrap();
        let prog = Program::compile(&t, e.vars()).unwrap();
        let fast = prog.eval(e.intervals()).unwrap();
        assert_eq!(tree, fast);
    }

    #[test]
    fn point_consistency_on_degenerate_box() {
        let t = Term::var("x") * Term::num("0.1") + Term::app(Func::Cos, Term::var("x"));
        let e = env(&[("x", 1.7, 1.7)]);
        let iv = eval_interval(&t, &e).unwrap();
        let exact = 1.7 * 0.1 + (1.7f64).cos();
        assert!(iv.contains(exact));
        assert!(iv.width() < 1e-12);
    }
}
