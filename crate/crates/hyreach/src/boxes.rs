//! Boxes: Cartesian products of intervals over a named, ordered variable set.
//!
//! A `VarSet` fixes the dimension names (sorted, deduplicated) for a whole
//! constraint system; boxes over the same `Arc<VarSet>` can be combined
//! cheaply by index. Boxes are immutable values in spirit: operations return
//! new boxes.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::BoxError;
use crate::interval::Interval;

/// An ordered set of variable names. Order is lexicographic so that
/// tie-breaking rules are independent of construction order.
#[derive(Debug, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Arc<VarSet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        names.sort();
        names.dedup();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Arc::new(VarSet { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

/// A box over a `VarSet`: one interval per variable.
#[derive(Clone, PartialEq)]
pub struct IntervalBox {
    vars: Arc<VarSet>,
    ivs: Vec<Interval>,
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, name) in self.vars.names().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {:?}", name, self.ivs[i])?;
        }
        write!(f, "}}")
    }
}

impl IntervalBox {
    pub fn new(vars: Arc<VarSet>, ivs: Vec<Interval>) -> IntervalBox {
        assert_eq!(vars.len(), ivs.len(), "box dimension mismatch");
        IntervalBox { vars, ivs }
    }

    /// Build from name/interval pairs; every variable of `vars` must appear.
    pub fn from_pairs<I, S>(pairs: I) -> IntervalBox
    where
        I: IntoIterator<Item = (S, Interval)>,
        S: Into<String>,
    {
        let pairs: Vec<(String, Interval)> = pairs.into_iter().map(|(n, i)| (n.into(), i)).collect();
        let vars = VarSet::new(pairs.iter().map(|(n, _)| n.clone()));
        let mut ivs = vec![Interval::point(0.0); vars.len()];
        for (n, iv) in pairs {
            let i = vars.index_of(&n).expect("name just inserted");
            ivs[i] = iv;
        }
        IntervalBox { vars, ivs }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.ivs.len()
    }

    pub fn get(&self, i: usize) -> Interval {
        self.ivs[i]
    }

    pub fn set(&mut self, i: usize, iv: Interval) {
        self.ivs[i] = iv;
    }

    pub fn get_named(&self, name: &str) -> Result<Interval, BoxError> {
        self.vars
            .index_of(name)
            .map(|i| self.ivs[i])
            .ok_or_else(|| BoxError::UnknownVariable(name.to_string()))
    }

    pub fn set_named(&mut self, name: &str, iv: Interval) -> Result<(), BoxError> {
        let i = self
            .vars
            .index_of(name)
            .ok_or_else(|| BoxError::UnknownVariable(name.to_string()))?;
        self.ivs[i] = iv;
        Ok(())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.ivs
    }

    /// Max over dimensions of interval width.
    pub fn width(&self) -> f64 {
        self.ivs.iter().map(|iv| iv.width()).fold(0.0, f64::max)
    }

    /// Index of the widest dimension; lexicographically-first name wins ties
    /// (names are sorted, so the smallest index among maxima is correct).
    pub fn widest_dim(&self) -> usize {
        let mut best = 0;
        let mut best_w = f64::NEG_INFINITY;
        for (i, iv) in self.ivs.iter().enumerate() {
            let w = iv.width();
            if w > best_w {
                best_w = w;
                best = i;
            }
        }
        best
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.ivs.iter().map(|iv| iv.midpoint()).collect()
    }

    /// A zero-width copy at the midpoint.
    pub fn midpoint_box(&self) -> IntervalBox {
        IntervalBox {
            vars: Arc::clone(&self.vars),
            ivs: self.ivs.iter().map(|iv| Interval::point(iv.midpoint())).collect(),
        }
    }

    fn check_same_vars(&self, other: &IntervalBox) -> Result<(), BoxError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(BoxError::VarSetMismatch)
        }
    }

    pub fn hull(&self, other: &IntervalBox) -> Result<IntervalBox, BoxError> {
        self.check_same_vars(other)?;
        Ok(IntervalBox {
            vars: Arc::clone(&self.vars),
            ivs: self
                .ivs
                .iter()
                .zip(&other.ivs)
                .map(|(a, b)| a.hull(b))
                .collect(),
        })
    }

    /// `None` when any dimension's intersection is empty.
    pub fn intersect(&self, other: &IntervalBox) -> Result<Option<IntervalBox>, BoxError> {
        self.check_same_vars(other)?;
        let mut ivs = Vec::with_capacity(self.ivs.len());
        for (a, b) in self.ivs.iter().zip(&other.ivs) {
            match a.intersect(b) {
                Some(iv) => ivs.push(iv),
                None => return Ok(None),
            }
        }
        Ok(Some(IntervalBox {
            vars: Arc::clone(&self.vars),
            ivs,
        }))
    }

    pub fn contains_box(&self, other: &IntervalBox) -> bool {
        self.ivs
            .iter()
            .zip(&other.ivs)
            .all(|(a, b)| a.contains_interval(b))
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.ivs.iter().zip(p).all(|(iv, x)| iv.contains(*x))
    }

    /// Split at the midpoint of the chosen dimension. The two halves share
    /// the split point, so their union is the input box.
    pub fn bisect_at(&self, dim: usize) -> Result<(IntervalBox, IntervalBox), BoxError> {
        let iv = self.ivs[dim];
        if iv.width() <= 0.0 {
            return Err(BoxError::CannotSplit);
        }
        let m = iv.midpoint();
        if m <= iv.lo() || m >= iv.hi() {
            return Err(BoxError::CannotSplit);
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.ivs[dim] = Interval::new(iv.lo(), m);
        right.ivs[dim] = Interval::new(m, iv.hi());
        Ok((left, right))
    }

    /// Default policy: widest dimension first, name-order tie-break.
    pub fn bisect(&self) -> Result<(IntervalBox, IntervalBox), BoxError> {
        if self.width() <= 0.0 {
            return Err(BoxError::CannotSplit);
        }
        self.bisect_at(self.widest_dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pairs: &[(&str, f64, f64)]) -> IntervalBox {
        IntervalBox::from_pairs(pairs.iter().map(|(n, lo, hi)| (*n, Interval::new(*lo, *hi))))
    }

    #[test]
    fn bisect_splits_widest() {
        let bx = b(&[("x", 0.0, 4.0), ("y", 0.0, 1.0)]);
        let (l, r) = bx.bisect().unwrap();
        assert_eq!(l.get_named("x").unwrap(), Interval::new(0.0, 2.0));
        assert_eq!(r.get_named("x").unwrap(), Interval::new(2.0, 4.0));
        assert_eq!(l.get_named("y").unwrap(), Interval::new(0.0, 1.0));
    }

    #[test]
    fn bisect_tie_breaks_by_name() {
        let bx = b(&[("y", 0.0, 2.0), ("x", 0.0, 2.0)]);
        let (l, _) = bx.bisect().unwrap();
        assert_eq!(l.get_named("x").unwrap(), Interval::new(0.0, 1.0));
        assert_eq!(l.get_named("y").unwrap(), Interval::new(0.0, 2.0));
    }

    #[test]
    fn bisect_degenerate_errors() {
        let bx = b(&[("x", 1.0, 1.0)]);
        assert_eq!(bx.bisect().unwrap_err(), BoxError::CannotSplit);
    }

    #[test]
    fn halves_reunite_to_input() {
        let bx = b(&[("x", -1.0, 3.0), ("y", 0.5, 0.75)]);
        let (l, r) = bx.bisect().unwrap();
        assert_eq!(l.hull(&r).unwrap(), bx);
    }

    #[test]
    fn mismatched_sets_error() {
        let a = b(&[("x", 0.0, 1.0)]);
        let c = b(&[("y", 0.0, 1.0)]);
        assert_eq!(a.hull(&c).unwrap_err(), BoxError::VarSetMismatch);
    }

    #[test]
    fn intersect_empty_is_none() {
        let a = b(&[("x", 0.0, 1.0)]);
        let c = b(&[("x", 2.0, 3.0)]);
        assert!(a.intersect(&c).unwrap().is_none());
    }
}
