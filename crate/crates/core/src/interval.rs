//! Interval enclosures of polynomials over boxes.

use crate::pbc::VarBox;
use crate::poly::{Exponent, Polynomial};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn product(self, o: Interval) -> Interval {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    pub fn sum(self, o: Interval) -> Interval {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn scale(self, s: f64) -> Interval {
        if s >= 0.0 {
            Interval::new(s * self.lo, s * self.hi)
        } else {
            Interval::new(s * self.hi, s * self.lo)
        }
    }

    /// Exact range of `x^k` over the interval.
    pub fn powi(self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(1.0);
        }
        let (a, b) = (self.lo.powi(k as i32), self.hi.powi(k as i32));
        if k % 2 == 1 || self.lo >= 0.0 {
            Interval::new(a, b)
        } else if self.hi <= 0.0 {
            Interval::new(b, a)
        } else {
            Interval::new(0.0, a.max(b))
        }
    }

    pub fn intersect(self, o: Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.min(o.hi))
    }

    /// Widens by a relative `eps` to absorb rounding.
    fn widen(self, eps: f64) -> Interval {
        Interval::new(
            self.lo - eps * (1.0 + self.lo.abs()),
            self.hi + eps * (1.0 + self.hi.abs()),
        )
    }
}

const ROUNDING: f64 = 1e-12;

fn box_intervals(bx: &VarBox) -> Vec<Interval> {
    (0..bx.dim())
        .map(|i| Interval::new(bx.lower[i], bx.upper[i]))
        .collect()
}

fn monomial(e: &Exponent, xs: &[Interval]) -> Interval {
    e.entries()
        .iter()
        .zip(xs)
        .filter(|(&k, _)| k > 0)
        .fold(Interval::point(1.0), |acc, (&k, x)| acc.product(x.powi(k)))
}

/// Term-by-term enclosure.
pub fn naive_enclosure(p: &Polynomial, bx: &VarBox) -> Interval {
    let xs = box_intervals(bx);
    p.terms().fold(Interval::point(0.0), |acc, (e, c)| {
        acc.sum(monomial(e, &xs).scale(c))
    })
}

/// Mean-value form `p(c) + sum_i dp/dx_i(X) (X_i - c_i)` around the center.
pub fn centered_enclosure(p: &Polynomial, bx: &VarBox) -> Interval {
    let c = bx.center();
    let mut acc = Interval::point(p.eval_unchecked(&c));
    for (i, &ci) in c.iter().enumerate() {
        if !p.depends_on(i) {
            continue;
        }
        let d = naive_enclosure(&p.derivative(i), bx);
        let dx = Interval::new(bx.lower[i] - ci, bx.upper[i] - ci);
        acc = acc.sum(d.product(dx));
    }
    acc
}

/// Enclosure of `p` over `bx`: `lo <= min p <= max p <= hi`.
pub fn interval_bound(p: &Polynomial, bx: &VarBox) -> (f64, f64) {
    let naive = naive_enclosure(p, bx);
    let iv = if p.is_empty() {
        naive
    } else {
        naive.intersect(centered_enclosure(p, bx))
    };
    let iv = iv.widen(ROUNDING);
    (iv.lo, iv.hi)
}
