//! Closed real intervals with outward-rounded endpoints.
//!
//! Every arithmetic operation returns an interval that contains the exact
//! real result set for all choices of points in the operands. Endpoints are
//! `f64` and may be infinite; rounding is done by nudging endpoints outward
//! with [`f64::next_down`] / [`f64::next_up`] after each native operation.
//! That over-approximates true directed rounding by at most one ulp per
//! side, which is what the soundness of `unsat` answers rests on.
//!
//! The empty interval is not representable by `Interval` itself: operations
//! that can empty out (intersection, domain restriction) return `Option`.

use std::fmt;

use crate::error::NumericError;

/// Nudge a lower bound down by one ulp. Leaves infinities alone.
#[inline]
fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

/// Nudge an upper bound up by one ulp. Leaves infinities alone.
#[inline]
fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

/// Two ulps outward, for libm-computed transcendentals whose results are
/// faithful but not correctly rounded.
#[inline]
fn down2(x: f64) -> f64 {
    down(down(x))
}

#[inline]
fn up2(x: f64) -> f64 {
    up(up(x))
}

/// Product with the convention 0 * inf = 0, used for endpoint arithmetic
/// where an infinite endpoint is a bound, not a value.
#[inline]
fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// A nonempty closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "[{:.6}]", self.lo)
        } else {
            write!(f, "[{:.6}, {:.6}]", self.lo, self.hi)
        }
    }
}

impl Interval {
    /// The whole real line.
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Build `[lo, hi]`. Panics on `lo > hi` or NaN; construction is the one
    /// place where the invariant is enforced rather than propagated.
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(
            lo <= hi,
            "interval endpoints out of order: [{lo}, {hi}]"
        );
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Smallest interval containing the rational p/q, exact when p/q is a
    /// representable double.
    pub fn from_f64_outward(x: f64, exact: bool) -> Interval {
        if exact {
            Interval::point(x)
        } else {
            Interval::new(down(x), up(x))
        }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        // inf - inf would be NaN; an unbounded interval has infinite width.
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            self.hi - self.lo
        }
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
            0.0
        } else if self.lo == f64::NEG_INFINITY {
            f64::MIN.max(self.hi - 1.0)
        } else if self.hi == f64::INFINITY {
            f64::MAX.min(self.lo + 1.0)
        } else {
            let m = 0.5 * (self.lo + self.hi);
            m.clamp(self.lo, self.hi)
        }
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Widen by `pad` on both sides (outward-rounded).
    pub fn inflate(&self, pad: f64) -> Interval {
        Interval::new(down(self.lo - pad), up(self.hi + pad))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// `None` is the empty-intersection sentinel.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval::new(lo, hi))
        } else {
            None
        }
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval::new(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval::new(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let cands = [
            mul0(self.lo, rhs.lo),
            mul0(self.lo, rhs.hi),
            mul0(self.hi, rhs.lo),
            mul0(self.hi, rhs.hi),
        ];
        let lo = cands.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }

    /// Division. A divisor interval straddling zero yields the entire line
    /// (the hull of the two unbounded pieces); a divisor identical to zero is
    /// a domain error.
    pub fn div(&self, rhs: &Interval) -> Result<Interval, NumericError> {
        if rhs.lo == 0.0 && rhs.hi == 0.0 {
            return Err(NumericError::Domain("division by zero interval"));
        }
        if rhs.contains(0.0) {
            // Hull of the extended quotient set.
            return Ok(Interval::ENTIRE);
        }
        let cands = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = cands.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Interval::new(down(lo), up(hi)))
    }

    /// Integer power by sign analysis: even powers fold the interval at zero.
    pub fn powi(&self, n: i32) -> Result<Interval, NumericError> {
        if n == 0 {
            return Ok(Interval::point(1.0));
        }
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        if n % 2 == 1 {
            Ok(Interval::new(down2(self.lo.powi(n)), up2(self.hi.powi(n))))
        } else if self.lo >= 0.0 {
            Ok(Interval::new(down2(self.lo.powi(n)).max(0.0), up2(self.hi.powi(n))))
        } else if self.hi <= 0.0 {
            // Decreasing branch: closest-to-zero endpoint gives the minimum.
            Ok(Interval::new(down2(self.hi.powi(n)).max(0.0), up2(self.lo.powi(n))))
        } else {
            let m = up2(self.lo.powi(n)).max(up2(self.hi.powi(n)));
            Ok(Interval::new(0.0, m))
        }
    }

    fn recip(&self) -> Result<Interval, NumericError> {
        Interval::point(1.0).div(self)
    }

    /// Square root over the nonnegative part. Wholly negative input is a
    /// domain error; straddling input is clipped to `[0, hi]`.
    pub fn sqrt(&self) -> Result<Interval, NumericError> {
        if self.hi < 0.0 {
            return Err(NumericError::Domain("sqrt of negative interval"));
        }
        let lo = if self.lo > 0.0 {
            down(self.lo.sqrt()).max(0.0)
        } else {
            0.0
        };
        Ok(Interval::new(lo, up(self.hi.sqrt())))
    }

    pub fn exp(&self) -> Interval {
        Interval::new(down2(self.lo.exp()).max(0.0), up2(self.hi.exp()))
    }

    /// Natural log over the positive part. `lo <= 0 < hi` gives `[-inf, ln hi]`.
    pub fn ln(&self) -> Result<Interval, NumericError> {
        if self.hi <= 0.0 {
            return Err(NumericError::Domain("log of nonpositive interval"));
        }
        let lo = if self.lo > 0.0 {
            down2(self.lo.ln())
        } else {
            f64::NEG_INFINITY
        };
        Ok(Interval::new(lo, up2(self.hi.ln())))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn min_i(&self, rhs: &Interval) -> Interval {
        Interval::new(self.lo.min(rhs.lo), self.hi.min(rhs.hi))
    }

    pub fn max_i(&self, rhs: &Interval) -> Interval {
        Interval::new(self.lo.max(rhs.lo), self.hi.max(rhs.hi))
    }

    /// Monotone, odd, range (-1, 1).
    pub fn tanh(&self) -> Interval {
        Interval::new(down2(self.lo.tanh()).max(-1.0), up2(self.hi.tanh()).min(1.0))
    }

    pub fn sin(&self) -> Interval {
        sin_cos_enclosure(self, 0.0)
    }

    pub fn cos(&self) -> Interval {
        // cos(x) = sin(x + pi/2); shift the critical-point lattice instead of
        // the argument to avoid rounding the input.
        sin_cos_enclosure(self, std::f64::consts::FRAC_PI_2)
    }
}

/// Enclosure of sin(x + shift) over `x`; shift is 0 for sin, pi/2 for cos.
///
/// Strategy: endpoint values widened by 2 ulps, then force the bound to +-1
/// whenever a maximizer/minimizer of the shifted sine may fall inside. The
/// containment test is done with a conservative slack so argument-reduction
/// error can only widen the result, never shrink it. Very large arguments
/// fall back to [-1, 1].
fn sin_cos_enclosure(x: &Interval, shift: f64) -> Interval {
    use std::f64::consts::PI;
    const TAU: f64 = 2.0 * PI;
    if !x.lo.is_finite() || !x.hi.is_finite() || x.hi.abs() > 1e12 || x.lo.abs() > 1e12 {
        return Interval::new(-1.0, 1.0);
    }
    if x.width() >= TAU {
        return Interval::new(-1.0, 1.0);
    }
    let f = |t: f64| (t + shift).sin();
    let mut lo = down2(f(x.lo)).min(down2(f(x.hi))).max(-1.0);
    let mut hi = up2(f(x.lo)).max(up2(f(x.hi))).min(1.0);

    // Slack grows with argument magnitude: the lattice points k*tau computed
    // in f64 drift by ~|arg| * eps.
    let slack = 1e-9 + 1e-15 * x.lo.abs().max(x.hi.abs());
    // Maximizers of sin(t + shift): t = pi/2 - shift + k*tau.
    let has_crit = |center: f64| -> bool {
        let k0 = ((x.lo - center) / TAU).floor() - 1.0;
        let k1 = ((x.hi - center) / TAU).ceil() + 1.0;
        let mut k = k0;
        while k <= k1 {
            let c = center + k * TAU;
            if c >= x.lo - slack && c <= x.hi + slack {
                return true;
            }
            k += 1.0;
        }
        false
    };
    if has_crit(PI / 2.0 - shift) {
        hi = 1.0;
    }
    if has_crit(-PI / 2.0 - shift) {
        lo = -1.0;
    }
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_encloses(iv: Interval, exact_lo: f64, exact_hi: f64, tol: f64) {
        assert!(
            iv.lo() <= exact_lo && iv.hi() >= exact_hi,
            "{iv:?} does not enclose [{exact_lo}, {exact_hi}]"
        );
        assert!(
            exact_lo - iv.lo() <= tol && iv.hi() - exact_hi <= tol,
            "{iv:?} is looser than {tol} around [{exact_lo}, {exact_hi}]"
        );
    }

    #[test]
    fn add_monotone() {
        let s = Interval::new(1.0, 2.0).add(&Interval::new(3.0, 4.0));
        assert_encloses(s, 4.0, 6.0, 1e-12);
    }

    #[test]
    fn mul_matches_endpoint_oracle() {
        // Brute force over the four endpoint products.
        let a = Interval::new(-1.0, 2.0);
        let b = Interval::new(3.0, 4.0);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in [a.lo(), a.hi()] {
            for y in [b.lo(), b.hi()] {
                lo = lo.min(x * y);
                hi = hi.max(x * y);
            }
        }
        assert_eq!((lo, hi), (-4.0, 8.0));
        assert_encloses(a.mul(&b), lo, hi, 1e-12);
    }

    #[test]
    fn sin_over_zero_pi() {
        let s = Interval::new(0.0, std::f64::consts::PI).sin();
        assert_encloses(s, 0.0, 1.0, 1e-8);
    }

    #[test]
    fn cos_hits_minus_one() {
        let c = Interval::new(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
        assert!(c.hi() < -0.9);
    }

    #[test]
    fn division_by_straddling_interval_is_entire() {
        let q = Interval::new(1.0, 2.0).div(&Interval::new(-1.0, 1.0)).unwrap();
        assert_eq!(q, Interval::ENTIRE);
    }

    #[test]
    fn division_by_zero_interval_is_domain_error() {
        assert!(Interval::new(1.0, 2.0).div(&Interval::point(0.0)).is_err());
    }

    #[test]
    fn sqrt_clips_partial_domain() {
        let r = Interval::new(-1.0, 4.0).sqrt().unwrap();
        assert_encloses(r, 0.0, 2.0, 1e-12);
        assert!(Interval::new(-4.0, -1.0).sqrt().is_err());
    }

    #[test]
    fn log_partial_domain_is_unbounded_below() {
        let l = Interval::new(0.0, 1.0).ln().unwrap();
        assert_eq!(l.lo(), f64::NEG_INFINITY);
        assert!(l.hi() >= 0.0 && l.hi() < 1e-12);
        assert!(Interval::new(-2.0, -1.0).ln().is_err());
    }

    #[test]
    fn intersect_and_hull() {
        let a = Interval::new(0.0, 2.0);
        let b = Interval::new(1.0, 3.0);
        assert_eq!(a.intersect(&b).unwrap(), Interval::new(1.0, 2.0));
        assert!(Interval::new(0.0, 1.0).intersect(&Interval::new(2.0, 3.0)).is_none());
        assert_eq!(
            Interval::new(0.0, 1.0).hull(&Interval::new(2.0, 3.0)),
            Interval::new(0.0, 3.0)
        );
    }

    #[test]
    fn even_power_folds_at_zero() {
        let p = Interval::new(-2.0, 1.0).powi(2).unwrap();
        assert_encloses(p, 0.0, 4.0, 1e-12);
        let q = Interval::new(-3.0, -2.0).powi(2).unwrap();
        assert_encloses(q, 4.0, 9.0, 1e-10);
        let c = Interval::new(-2.0, 1.0).powi(3).unwrap();
        assert_encloses(c, -8.0, 1.0, 1e-12);
    }

    #[test]
    fn point_ops_stay_tight() {
        let x = Interval::point(0.1);
        let y = x.add(&Interval::point(0.2));
        assert!(y.contains(0.1 + 0.2));
        assert!(y.width() < 1e-15);
    }
}
