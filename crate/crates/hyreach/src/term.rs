//! Terms: the arithmetic expression trees used by formulas, vector fields,
//! guards, and resets.
//!
//! Constants are exact rationals so model files mean what they say; they are
//! converted to outward-rounded intervals only at evaluation time.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational constant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Rational {
    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion from a double (every finite f64 is rational).
    pub fn from_f64(x: f64) -> Option<Rational> {
        BigRational::from_float(x).map(Rational)
    }

    /// Parse a decimal literal like `-12`, `0.006`, `1.25e-3` exactly.
    pub fn from_decimal_str(s: &str) -> Result<Rational, String> {
        let s = s.trim();
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = s[i + 1..]
                    .parse()
                    .map_err(|_| format!("bad exponent in `{s}`"))?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (sign, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.find('.') {
            Some(i) => (&digits[..i], &digits[i + 1..]),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("empty numeric literal `{s}`"));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(format!("bad numeric literal `{s}`"));
        }
        let joined = format!("{int_part}{frac_part}");
        let n: BigInt = joined.parse().map_err(|_| format!("bad digits in `{s}`"))?;
        let mut num = n * BigInt::from(sign);
        let mut den = BigInt::from(10u32).pow(frac_part.len() as u32);
        if exp >= 0 {
            num *= BigInt::from(10u32).pow(exp as u32);
        } else {
            den *= BigInt::from(10u32).pow((-exp) as u32);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest representable interval containing this rational: a point
    /// when exactly representable, otherwise one ulp out on each side.
    pub fn to_interval(&self) -> crate::interval::Interval {
        let x = self.to_f64();
        crate::interval::Interval::from_f64_outward(x, self.is_exact_f64())
    }

    /// True when this rational is exactly representable as an f64.
    pub fn is_exact_f64(&self) -> bool {
        let x = self.to_f64();
        x.is_finite() && BigRational::from_float(x).as_ref() == Some(&self.0)
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(&self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }

    pub fn checked_mul(&self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.0.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }

    pub fn neg(&self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    /// Exact decimal when the denominator is of the form 2^a * 5^b,
    /// otherwise `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.0.numer().clone();
        let den = self.0.denom().clone();
        let mut d = den.clone();
        let mut twos = 0u32;
        let mut fives = 0u32;
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if d.is_one() {
            let shift = twos.max(fives);
            let scale = BigInt::from(10u32).pow(shift);
            let scaled = num * &scale / den;
            let neg = scaled.is_negative();
            let digits = scaled.abs().to_string();
            let digits = if digits.len() <= shift as usize {
                format!("{}{}", "0".repeat(shift as usize + 1 - digits.len()), digits)
            } else {
                digits
            };
            let split = digits.len() - shift as usize;
            let (int_part, frac_part) = digits.split_at(split);
            if neg {
                write!(f, "-")?;
            }
            if frac_part.is_empty() {
                write!(f, "{int_part}")
            } else {
                write!(f, "{int_part}.{frac_part}")
            }
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Unary function symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
        }
    }
}

/// Expression tree. Binary `Min`/`Max` stand in for the n-ary versions.
#[derive(Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(Rational),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, i32),
    App(Func, Box<Term>),
    Min(Box<Term>, Box<Term>),
    Max(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn int(n: i64) -> Term {
        Term::Const(Rational::from_int(n))
    }

    pub fn rat(r: Rational) -> Term {
        Term::Const(r)
    }

    /// Decimal literal helper for tests and builders; panics on bad input.
    pub fn num(s: &str) -> Term {
        Term::Const(Rational::from_decimal_str(s).expect("bad literal"))
    }

    pub fn pow(self, n: i32) -> Term {
        Term::Pow(Box::new(self), n)
    }

    pub fn app(f: Func, t: Term) -> Term {
        Term::App(f, Box::new(t))
    }

    pub fn exp(self) -> Term {
        Term::app(Func::Exp, self)
    }

    pub fn min(self, rhs: Term) -> Term {
        Term::Min(Box::new(self), Box::new(rhs))
    }

    pub fn max(self, rhs: Term) -> Term {
        Term::Max(Box::new(self), Box::new(rhs))
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Term::Const(c) if c.is_zero())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_into(&mut out);
        out
    }

    pub fn collect_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Add(a, b)
            | Term::Sub(a, b)
            | Term::Mul(a, b)
            | Term::Div(a, b)
            | Term::Min(a, b)
            | Term::Max(a, b) => {
                a.collect_into(out);
                b.collect_into(out);
            }
            Term::Neg(a) | Term::Pow(a, _) | Term::App(_, a) => a.collect_into(out),
        }
    }

    /// Rewrite every variable through `f` (used to instantiate step copies).
    pub fn rename_vars(&self, f: &impl Fn(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Const(c) => Term::Const(c.clone()),
            Term::Add(a, b) => Term::Add(Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f))),
            Term::Sub(a, b) => Term::Sub(Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f))),
            Term::Neg(a) => Term::Neg(Box::new(a.rename_vars(f))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f))),
            Term::Div(a, b) => Term::Div(Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f))),
            Term::Pow(a, n) => Term::Pow(Box::new(a.rename_vars(f)), *n),
            Term::App(fun, a) => Term::App(*fun, Box::new(a.rename_vars(f))),
            Term::Min(a, b) => Term::Min(Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f))),
            Term::Max(a, b) => Term::Max(Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f))),
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    ///
    /// Fails on `abs`/`min`/`max`: vector fields handed to the validated
    /// integrator must be smooth, and the model validator flags them early.
    pub fn diff(&self, var: &str) -> Result<Term, String> {
        Ok(match self {
            Term::Var(v) => {
                if v == var {
                    Term::int(1)
                } else {
                    Term::int(0)
                }
            }
            Term::Const(_) => Term::int(0),
            Term::Add(a, b) => fold_add(a.diff(var)?, b.diff(var)?),
            Term::Sub(a, b) => fold_sub(a.diff(var)?, b.diff(var)?),
            Term::Neg(a) => fold_neg(a.diff(var)?),
            Term::Mul(a, b) => fold_add(
                fold_mul(a.diff(var)?, (**b).clone()),
                fold_mul((**a).clone(), b.diff(var)?),
            ),
            Term::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = fold_sub(
                    fold_mul(a.diff(var)?, (**b).clone()),
                    fold_mul((**a).clone(), b.diff(var)?),
                );
                if num.is_zero_const() {
                    Term::int(0)
                } else {
                    Term::Div(Box::new(num), Box::new((**b).clone().pow(2)))
                }
            }
            Term::Pow(a, n) => {
                let inner = a.diff(var)?;
                if inner.is_zero_const() || *n == 0 {
                    return Ok(Term::int(0));
                }
                fold_mul(
                    fold_mul(Term::int(*n as i64), (**a).clone().pow(n - 1)),
                    inner,
                )
            }
            Term::App(f, a) => {
                let inner = a.diff(var)?;
                if inner.is_zero_const() {
                    return Ok(Term::int(0));
                }
                let outer = match f {
                    Func::Exp => Term::app(Func::Exp, (**a).clone()),
                    Func::Ln => Term::Div(Box::new(Term::int(1)), Box::new((**a).clone())),
                    Func::Sin => Term::app(Func::Cos, (**a).clone()),
                    Func::Cos => fold_neg(Term::app(Func::Sin, (**a).clone())),
                    Func::Sqrt => Term::Div(
                        Box::new(Term::int(1)),
                        Box::new(fold_mul(Term::int(2), Term::app(Func::Sqrt, (**a).clone()))),
                    ),
                    Func::Abs => return Err("abs is not differentiable".to_string()),
                    // 1 - tanh^2
                    Func::Tanh => fold_sub(
                        Term::int(1),
                        Term::app(Func::Tanh, (**a).clone()).pow(2),
                    ),
                };
                fold_mul(outer, inner)
            }
            Term::Min(_, _) | Term::Max(_, _) => {
                return Err("min/max are not differentiable".to_string())
            }
        })
    }
}

fn fold_add(a: Term, b: Term) -> Term {
    if a.is_zero_const() {
        b
    } else if b.is_zero_const() {
        a
    } else {
        Term::Add(Box::new(a), Box::new(b))
    }
}

fn fold_sub(a: Term, b: Term) -> Term {
    if b.is_zero_const() {
        a
    } else if a.is_zero_const() {
        fold_neg(b)
    } else {
        Term::Sub(Box::new(a), Box::new(b))
    }
}

fn fold_neg(a: Term) -> Term {
    if a.is_zero_const() {
        a
    } else {
        Term::Neg(Box::new(a))
    }
}

fn fold_mul(a: Term, b: Term) -> Term {
    if a.is_zero_const() || b.is_zero_const() {
        Term::int(0)
    } else if matches!(&a, Term::Const(c) if *c == Rational::one()) {
        b
    } else if matches!(&b, Term::Const(c) if *c == Rational::one()) {
        a
    } else {
        Term::Mul(Box::new(a), Box::new(b))
    }
}

impl Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }
}

impl Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(rhs))
    }
}

impl Div for Term {
    type Output = Term;
    fn div(self, rhs: Term) -> Term {
        Term::Div(Box::new(self), Box::new(rhs))
    }
}

impl Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix_form())
    }
}

impl Term {
    /// S-expression dump used by the debug serializers.
    pub fn prefix_form(&self) -> String {
        match self {
            Term::Var(v) => v.clone(),
            Term::Const(c) => format!("{c}"),
            Term::Add(a, b) => format!("(+ {} {})", a.prefix_form(), b.prefix_form()),
            Term::Sub(a, b) => format!("(- {} {})", a.prefix_form(), b.prefix_form()),
            Term::Neg(a) => format!("(- {})", a.prefix_form()),
            Term::Mul(a, b) => format!("(* {} {})", a.prefix_form(), b.prefix_form()),
            Term::Div(a, b) => format!("(/ {} {})", a.prefix_form(), b.prefix_form()),
            Term::Pow(a, n) => format!("(^ {} {n})", a.prefix_form()),
            Term::App(fun, a) => format!("({} {})", fun.name(), a.prefix_form()),
            Term::Min(a, b) => format!("(min {} {})", a.prefix_form(), b.prefix_form()),
            Term::Max(a, b) => format!("(max {} {})", a.prefix_form(), b.prefix_form()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        let r = Rational::from_decimal_str("0.006").unwrap();
        assert_eq!(r, Rational::from_ratio(6, 1000));
        let r = Rational::from_decimal_str("1.25e-3").unwrap();
        assert_eq!(r, Rational::from_ratio(1, 800));
        let r = Rational::from_decimal_str("-4e2").unwrap();
        assert_eq!(r, Rational::from_int(-400));
        assert!(Rational::from_decimal_str("x1").is_err());
    }

    #[test]
    fn display_round_trips_decimals() {
        for s in ["0.006", "9.8", "30.0181", "0.13", "1", "-2.5"] {
            let r = Rational::from_decimal_str(s).unwrap();
            let printed = format!("{r}");
            assert_eq!(Rational::from_decimal_str(&printed).unwrap(), r);
        }
        let third = Rational::from_ratio(1, 3);
        assert_eq!(format!("{third}"), "1/3");
    }

    #[test]
    fn free_vars_collects() {
        let t = (Term::var("x") * Term::var("y") + Term::int(1)).pow(2);
        let vs = t.free_vars();
        assert_eq!(vs.into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
    }

    #[test]
    fn derivative_of_product() {
        // d/dx (x * x) = x + x (after folding 1*x)
        let t = Term::var("x") * Term::var("x");
        let d = t.diff("x").unwrap();
        assert_eq!(d.prefix_form(), "(+ x x)");
    }

    #[test]
    fn derivative_of_exp_chain() {
        let t = Term::app(Func::Exp, Term::int(2) * Term::var("x"));
        let d = t.diff("x").unwrap();
        assert_eq!(d.prefix_form(), "(* (exp (* 2 x)) 2)");
    }

    #[test]
    fn abs_is_rejected_by_diff() {
        let t = Term::app(Func::Abs, Term::var("x"));
        assert!(t.diff("x").is_err());
    }
}
