use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{Atom, MultiPoly, Relation};
use crate::ratlin::Rational;

/// Closed interval `[lo, hi]` with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Tight range of `x^k` over the interval.
    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 {
            return Interval { lo: a, hi: b };
        }
        if self.contains(&Rational::zero()) {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }
}

/// Enclosure of the values of `p` over the box.
pub fn poly_range(p: &MultiPoly, bx: &[Interval]) -> Interval {
    assert_eq!(bx.len(), p.nvars(), "box dimension mismatch");
    let mut acc = Interval::point(Rational::zero());
    for (e, c) in p.terms() {
        let mut t = Interval::point(c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t = t.mul(&bx[i].pow(k));
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// Truth of `value rel 0` for every value in `range`, when it is decided.
pub fn relation_on_range(rel: Relation, range: &Interval) -> Option<bool> {
    let zero = Rational::zero();
    let (lo, hi) = (&range.lo, &range.hi);
    let eq = if lo == &zero && hi == &zero {
        Some(true)
    } else if lo > &zero || hi < &zero {
        Some(false)
    } else {
        None
    };
    match rel {
        Relation::Lt if hi < &zero => Some(true),
        Relation::Lt if lo >= &zero => Some(false),
        Relation::Le if hi <= &zero => Some(true),
        Relation::Le if lo > &zero => Some(false),
        Relation::Gt if lo > &zero => Some(true),
        Relation::Gt if hi <= &zero => Some(false),
        Relation::Ge if lo >= &zero => Some(true),
        Relation::Ge if hi < &zero => Some(false),
        Relation::Eq => eq,
        Relation::Ne => eq.map(|b| !b),
        _ => None,
    }
}

pub(crate) fn atom_truth(a: &Atom, bx: &[Interval]) -> Option<bool> {
    relation_on_range(a.rel, &poly_range(&a.poly, bx))
}

/// Variables occurring in `p` with a positive exponent.
pub(crate) fn support(p: &MultiPoly) -> Vec<usize> {
    let mut used = alloc::vec![false; p.nvars()];
    for (e, _) in p.terms() {
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                used[i] = true;
            }
        }
    }
    used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
}
