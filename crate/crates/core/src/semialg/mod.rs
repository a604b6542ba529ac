//! Semialgebraic target sets: Boolean trees over polynomial sign conditions.
//!
//! Sets are kept exactly as written. Membership is decided by exact sign
//! evaluation; hulls, emptiness and box truth values are sound
//! over-approximations computed from the syntax.

mod emptiness;
mod interval;
mod poly;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::ratlin::{primitive_integer_vector, RatMatrix, Rational};

pub use emptiness::{Emptiness, EmptyReason};
pub use interval::Interval;
pub use poly::{Exponents, MultiPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemialgError {
    #[error("atom {atom} has {found} variables, expected {expected}")]
    VariableMismatch { atom: usize, expected: usize, found: usize },
    #[error("declared hull has {found} columns, expected {expected}")]
    HullColumns { expected: usize, found: usize },
}

/// Comparison of a polynomial against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Lt,
        Relation::Le,
        Relation::Eq,
        Relation::Ne,
        Relation::Ge,
        Relation::Gt,
    ];

    /// Whether a value of the given sign satisfies `value rel 0`.
    pub fn holds(self, sign: i8) -> bool {
        match self {
            Relation::Lt => sign < 0,
            Relation::Le => sign <= 0,
            Relation::Eq => sign == 0,
            Relation::Ne => sign != 0,
            Relation::Ge => sign >= 0,
            Relation::Gt => sign > 0,
        }
    }

    pub fn negate(self) -> Relation {
        match self {
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Eq => Relation::Ne,
            Relation::Ne => Relation::Eq,
            Relation::Ge => Relation::Lt,
            Relation::Gt => Relation::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.symbol() == s)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `poly rel 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub poly: MultiPoly,
    pub rel: Relation,
}

impl Atom {
    pub fn new(poly: MultiPoly, rel: Relation) -> Self {
        Atom { poly, rel }
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        self.rel.holds(self.poly.eval_sign(x))
    }

    pub fn negated(&self) -> Atom {
        Atom::new(self.poly.clone(), self.rel.negate())
    }
}

/// Boolean combination of atoms. `And(vec![])` is true, `Or(vec![])` false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetExpr {
    Atom(Atom),
    And(Vec<SetExpr>),
    Or(Vec<SetExpr>),
    Not(Box<SetExpr>),
}

impl SetExpr {
    pub fn atom(poly: MultiPoly, rel: Relation) -> Self {
        SetExpr::Atom(Atom::new(poly, rel))
    }

    pub fn truth() -> Self {
        SetExpr::And(Vec::new())
    }

    pub fn falsity() -> Self {
        SetExpr::Or(Vec::new())
    }

    pub fn complement(e: SetExpr) -> Self {
        SetExpr::Not(Box::new(e))
    }

    pub fn eval(&self, x: &[Rational]) -> bool {
        match self {
            SetExpr::Atom(a) => a.holds_at(x),
            SetExpr::And(cs) => cs.iter().all(|c| c.eval(x)),
            SetExpr::Or(cs) => cs.iter().any(|c| c.eval(x)),
            SetExpr::Not(c) => !c.eval(x),
        }
    }

    /// Atoms in depth-first order; indices into this list are used in
    /// diagnostics.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            SetExpr::Atom(a) => out.push(a),
            SetExpr::And(cs) | SetExpr::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            SetExpr::Not(c) => c.collect_atoms(out),
        }
    }

    /// Applies `f` to every atom polynomial, keeping the tree shape.
    pub fn map_polys(&self, f: &mut impl FnMut(&MultiPoly) -> MultiPoly) -> SetExpr {
        match self {
            SetExpr::Atom(a) => SetExpr::atom(f(&a.poly), a.rel),
            SetExpr::And(cs) => SetExpr::And(cs.iter().map(|c| c.map_polys(f)).collect()),
            SetExpr::Or(cs) => SetExpr::Or(cs.iter().map(|c| c.map_polys(f)).collect()),
            SetExpr::Not(c) => SetExpr::complement(c.map_polys(f)),
        }
    }

    /// Kleene three-valued evaluation: `Some(b)` when every point for which
    /// `atom_truth` is sound gets value `b`.
    pub fn eval3(&self, atom_truth: &mut impl FnMut(&Atom) -> Option<bool>) -> Option<bool> {
        match self {
            SetExpr::Atom(a) => atom_truth(a),
            SetExpr::And(cs) => {
                let mut all_true = true;
                for c in cs {
                    match c.eval3(atom_truth) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => all_true = false,
                    }
                }
                all_true.then_some(true)
            }
            SetExpr::Or(cs) => {
                let mut all_false = true;
                for c in cs {
                    match c.eval3(atom_truth) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => all_false = false,
                    }
                }
                all_false.then_some(false)
            }
            SetExpr::Not(c) => c.eval3(atom_truth).map(|b| !b),
        }
    }

    /// Disjunctive normal form over negation-free atoms, or `None` when it has
    /// more than `cap` branches.
    pub fn dnf(&self, cap: usize) -> Option<Vec<Vec<Atom>>> {
        self.dnf_inner(false, cap)
    }

    fn dnf_inner(&self, negated: bool, cap: usize) -> Option<Vec<Vec<Atom>>> {
        match (self, negated) {
            (SetExpr::Atom(a), false) => Some(vec![vec![a.clone()]]),
            (SetExpr::Atom(a), true) => Some(vec![vec![a.negated()]]),
            (SetExpr::Not(c), _) => c.dnf_inner(!negated, cap),
            (SetExpr::And(cs), false) | (SetExpr::Or(cs), true) => {
                let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
                for c in cs {
                    let branches = c.dnf_inner(negated, cap)?;
                    if acc.len().saturating_mul(branches.len()) > cap {
                        return None;
                    }
                    let mut next = Vec::with_capacity(acc.len() * branches.len());
                    for a in &acc {
                        for b in &branches {
                            let mut conj = a.clone();
                            conj.extend(b.iter().cloned());
                            next.push(conj);
                        }
                    }
                    acc = next;
                }
                Some(acc)
            }
            (SetExpr::Or(cs), false) | (SetExpr::And(cs), true) => {
                let mut acc = Vec::new();
                for c in cs {
                    acc.extend(c.dnf_inner(negated, cap)?);
                    if acc.len() > cap {
                        return None;
                    }
                }
                Some(acc)
            }
        }
    }
}

/// Affine subspace `{x : Hx = b}` read off a set's syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineHull {
    pub rows: RatMatrix,
    pub rhs: Vec<Rational>,
    /// The equalities are inconsistent, so the set is empty.
    pub contradiction: bool,
}

impl AffineHull {
    fn contradiction(nvars: usize) -> Self {
        AffineHull {
            rows: RatMatrix::zeros(0, nvars),
            rhs: Vec::new(),
            contradiction: true,
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.contradiction && self.rows.mul_vec(x) == self.rhs
    }

    /// Dimension of the subspace, `None` when it is empty.
    pub fn dim(&self) -> Option<usize> {
        (!self.contradiction).then(|| self.rows.cols() - self.rows.rank())
    }

    /// Exact squared Euclidean distance from `x`, `None` when empty.
    pub fn dist_sq(&self, x: &[Rational]) -> Option<Rational> {
        if self.contradiction {
            return None;
        }
        let (_, pivots) = self.rows.transpose().column_space_basis();
        if pivots.is_empty() {
            return Some(Rational::zero());
        }
        let hb = RatMatrix::from_rows(pivots.iter().map(|&i| self.rows.row(i).to_vec()).collect());
        let res: Vec<Rational> = pivots
            .iter()
            .zip(hb.mul_vec(x))
            .map(|(&i, hx)| hx - &self.rhs[i])
            .collect();
        let gram = &hb * &hb.transpose();
        let y = gram
            .solve(&res)
            .expect("independent rows give an invertible Gram matrix");
        Some(res.iter().zip(&y).map(|(a, b)| a * b).sum())
    }
}

/// Semialgebraic subset of ℝ^k with an optional declared subspace `{Hx = 0}`
/// known to contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemialgebraicSet {
    nvars: usize,
    expr: SetExpr,
    declared_hull: Option<RatMatrix>,
}

/// Linear equalities shared by every DNF branch. `Contradiction` means the
/// syntax already forces the set to be empty.
enum CommonForms {
    Contradiction,
    Forms(BTreeSet<Vec<Rational>>),
}

impl CommonForms {
    fn none() -> Self {
        CommonForms::Forms(BTreeSet::new())
    }

    fn union(self, other: CommonForms) -> CommonForms {
        match (self, other) {
            (CommonForms::Forms(mut a), CommonForms::Forms(b)) => {
                a.extend(b);
                CommonForms::Forms(a)
            }
            _ => CommonForms::Contradiction,
        }
    }

    fn intersection(self, other: CommonForms) -> CommonForms {
        match (self, other) {
            (CommonForms::Contradiction, x) | (x, CommonForms::Contradiction) => x,
            (CommonForms::Forms(a), CommonForms::Forms(b)) => CommonForms::Forms(a.intersection(&b).cloned().collect()),
        }
    }
}

/// Coprime integer multiple whose first nonzero coefficient is positive.
fn normalized_form(form: &[Rational]) -> Vec<Rational> {
    let mut v = primitive_integer_vector(form);
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x < &Rational::zero()) {
        v.iter_mut().for_each(|x| *x = -&*x);
    }
    v
}

fn common_forms(e: &SetExpr, negated: bool) -> CommonForms {
    match (e, negated) {
        (SetExpr::Atom(a), _) => {
            let rel = if negated { a.rel.negate() } else { a.rel };
            if let Some(c) = a.poly.as_constant() {
                return if rel.holds(crate::ratlin::sign(&c)) {
                    CommonForms::none()
                } else {
                    CommonForms::Contradiction
                };
            }
            match (rel, a.poly.affine_parts()) {
                (Relation::Eq, Some((form, constant))) => {
                    // a·x + c = 0 is stored as the augmented row (a | −c)
                    let mut row = form;
                    row.push(-constant);
                    CommonForms::Forms(BTreeSet::from([normalized_form(&row)]))
                }
                _ => CommonForms::none(),
            }
        }
        (SetExpr::Not(c), _) => common_forms(c, !negated),
        (SetExpr::And(cs), false) | (SetExpr::Or(cs), true) => cs
            .iter()
            .fold(CommonForms::none(), |acc, c| acc.union(common_forms(c, negated))),
        (SetExpr::Or(cs), false) | (SetExpr::And(cs), true) => cs.iter().fold(CommonForms::Contradiction, |acc, c| {
            acc.intersection(common_forms(c, negated))
        }),
    }
}

impl SemialgebraicSet {
    pub fn new(nvars: usize, expr: SetExpr) -> Result<Self, SemialgError> {
        for (atom, a) in expr.atoms().into_iter().enumerate() {
            if a.poly.nvars() != nvars {
                return Err(SemialgError::VariableMismatch {
                    atom,
                    expected: nvars,
                    found: a.poly.nvars(),
                });
            }
        }
        Ok(SemialgebraicSet {
            nvars,
            expr,
            declared_hull: None,
        })
    }

    /// All of ℝ^k.
    pub fn ambient(nvars: usize) -> Self {
        SemialgebraicSet {
            nvars,
            expr: SetExpr::truth(),
            declared_hull: None,
        }
    }

    pub fn with_declared_hull(mut self, hull: RatMatrix) -> Result<Self, SemialgError> {
        if hull.cols() != self.nvars {
            return Err(SemialgError::HullColumns {
                expected: self.nvars,
                found: hull.cols(),
            });
        }
        self.declared_hull = Some(hull);
        Ok(self)
    }

    pub fn without_declared_hull(mut self) -> Self {
        self.declared_hull = None;
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn expr(&self) -> &SetExpr {
        &self.expr
    }

    pub fn declared_hull(&self) -> Option<&RatMatrix> {
        self.declared_hull.as_ref()
    }

    pub fn member(&self, x: &[Rational]) -> bool {
        assert_eq!(x.len(), self.nvars, "membership point dimension mismatch");
        self.expr.eval(x)
    }

    /// `{y : L·y + b ∈ self}` over `L.cols()` variables. The declared hull is
    /// dropped.
    pub fn affine_preimage(&self, l: &RatMatrix, b: &[Rational]) -> SemialgebraicSet {
        assert_eq!(l.rows(), self.nvars, "preimage map has wrong target dimension");
        SemialgebraicSet {
            nvars: l.cols(),
            expr: self.expr.map_polys(&mut |p| p.substitute_affine(l, b)),
            declared_hull: None,
        }
    }

    /// Rows `H` with `{x : Hx = 0}` containing the set: linear equalities common
    /// to every DNF branch plus declared rows. A syntactically contradictory
    /// set gets the identity, i.e. the zero subspace.
    pub fn syntactic_hull(&self) -> RatMatrix {
        let hull = self.affine_hull();
        if hull.contradiction {
            return RatMatrix::identity(self.nvars);
        }
        let rows = (0..hull.rows.rows())
            .filter(|&i| hull.rhs[i].is_zero())
            .map(|i| hull.rows.row(i).to_vec())
            .collect();
        RatMatrix::from_rows_with_cols(rows, self.nvars)
    }

    /// Affine equalities `Hx = b` common to every DNF branch, plus declared
    /// rows with `b = 0`.
    pub fn affine_hull(&self) -> AffineHull {
        let forms = match common_forms(&self.expr, false) {
            CommonForms::Contradiction => return AffineHull::contradiction(self.nvars),
            CommonForms::Forms(f) => f,
        };
        let mut rows: Vec<Vec<Rational>> = forms.into_iter().collect();
        if let Some(h) = &self.declared_hull {
            for r in h.to_rows() {
                if r.iter().any(|x| !x.is_zero()) {
                    let mut aug = r;
                    aug.push(Rational::zero());
                    let n = normalized_form(&aug);
                    if !rows.contains(&n) {
                        rows.push(n);
                    }
                }
            }
        }
        let rhs: Vec<Rational> = rows.iter_mut().map(|r| r.pop().expect("augmented row")).collect();
        let rows = RatMatrix::from_rows_with_cols(rows, self.nvars);
        let contradiction = rows.solve(&rhs).is_none();
        AffineHull {
            rows,
            rhs,
            contradiction,
        }
    }

    /// Whether some hull equality is declared or syntactically visible.
    pub fn has_visible_hull(&self) -> bool {
        self.declared_hull.is_some() || {
            let h = self.affine_hull();
            h.contradiction || h.rows.rows() > 0
        }
    }

    /// The atom `Σ x_i² − eps_sq < 0`.
    pub fn ball_atom(nvars: usize, eps_sq: &Rational) -> Atom {
        let mut p = MultiPoly::constant(nvars, -eps_sq.clone());
        for i in 0..nvars {
            p = &p + &MultiPoly::var(nvars, i).pow(2);
        }
        Atom::new(p, Relation::Lt)
    }

    /// Conjoins `‖x‖² < eps_sq`. The declared hull is kept.
    pub fn ball_intersect(&self, eps_sq: &Rational) -> SemialgebraicSet {
        assert!(eps_sq > &Rational::zero(), "ball radius must be positive");
        let ball = SetExpr::Atom(Self::ball_atom(self.nvars, eps_sq));
        SemialgebraicSet {
            nvars: self.nvars,
            expr: SetExpr::And(vec![self.expr.clone(), ball]),
            declared_hull: self.declared_hull.clone(),
        }
    }

    /// Every atom polynomial becomes homogeneous after `x ↦ x + s`.
    pub fn is_s_homogeneous(&self, s: &[Rational]) -> bool {
        self.homogeneity_violation(s).is_none()
    }

    /// Index of the first atom (depth-first) that is not homogeneous about `s`.
    pub fn homogeneity_violation(&self, s: &[Rational]) -> Option<usize> {
        assert_eq!(s.len(), self.nvars, "shift dimension mismatch");
        let zero = s.iter().all(Zero::is_zero);
        self.expr.atoms().into_iter().position(|a| {
            if zero {
                !a.poly.is_homogeneous()
            } else {
                !a.poly.shift(s).is_homogeneous()
            }
        })
    }

    /// Truth value shared by every point of the open ball `‖x‖² < eps_sq`, if
    /// interval evaluation over its bounding box decides it. Ball atoms equal
    /// to that constraint count as true.
    pub fn truth_within_ball(&self, eps_sq: &Rational) -> Option<bool> {
        let ball = Self::ball_atom(self.nvars, eps_sq);
        let bound = crate::ratlin::sqrt_upper_bound(eps_sq, 24);
        let bx = vec![Interval::new(-bound.clone(), bound); self.nvars];
        self.expr.eval3(&mut |a| {
            if a.rel == ball.rel && a.poly == ball.poly {
                Some(true)
            } else {
                interval::atom_truth(a, &bx)
            }
        })
    }

    /// Kleene truth value over a box of per-variable intervals.
    pub fn truth_on_box(&self, bx: &[Interval]) -> Option<bool> {
        assert_eq!(bx.len(), self.nvars, "box dimension mismatch");
        self.expr.eval3(&mut |a| interval::atom_truth(a, bx))
    }

    /// Polynomials scaled to coprime integer coefficients.
    pub fn integer_scaled(&self) -> SemialgebraicSet {
        SemialgebraicSet {
            nvars: self.nvars,
            expr: self.expr.map_polys(&mut |p| p.primitive_integer()),
            declared_hull: self.declared_hull.clone(),
        }
    }
}

/// Unit vector helper for tests and callers building targets.
pub fn unit_form(n: usize, i: usize) -> Vec<Rational> {
    (0..n)
        .map(|j| if i == j { Rational::one() } else { Rational::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{int, rat};

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    fn c(n: usize, v: Rational) -> MultiPoly {
        MultiPoly::constant(n, v)
    }

    fn set(n: usize, e: SetExpr) -> SemialgebraicSet {
        SemialgebraicSet::new(n, e).unwrap()
    }

    fn gt_third(n: usize) -> SetExpr {
        SetExpr::atom(&x(n, 0) - &c(n, rat(1, 3)), Relation::Gt)
    }

    #[test]
    fn membership_examples() {
        assert!(set(2, gt_third(2)).member(&[int(1), int(0)]));
        let contra = SetExpr::And(vec![
            gt_third(2),
            SetExpr::atom(&x(2, 0) - &c(2, rat(1, 3)), Relation::Lt),
        ]);
        let t = set(2, contra);
        for p in [[int(0), int(0)], [rat(1, 3), int(5)], [int(1), int(-1)]] {
            assert!(!t.member(&p));
        }
        let circle = &(&x(2, 0).pow(2) + &x(2, 1).pow(2)) - &c(2, rat(1, 2));
        assert!(set(2, SetExpr::atom(circle, Relation::Eq)).member(&[rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn preimage_examples() {
        let t = set(1, SetExpr::atom(x(1, 0), Relation::Ge));
        let l = RatMatrix::from_rows(vec![vec![int(2)]]);
        let p = t.affine_preimage(&l, &[int(1)]);
        let expected = &x(1, 0).scale(&int(2)) + &c(1, int(1));
        assert_eq!(p.expr(), &SetExpr::atom(expected, Relation::Ge));

        let t = set(2, SetExpr::atom(&x(2, 0) - &x(2, 1), Relation::Eq));
        let l = RatMatrix::from_rows(vec![vec![int(1)], vec![int(1)]]);
        let p = t.affine_preimage(&l, &[int(0), int(0)]);
        assert_eq!(p.expr(), &SetExpr::atom(MultiPoly::zero(1), Relation::Eq));

        let t = set(1, SetExpr::atom(&x(1, 0).pow(2) - &c(1, int(1)), Relation::Lt));
        let p = t.affine_preimage(&RatMatrix::identity(1), &[int(3)]);
        let expected = MultiPoly::from_terms(1, [(vec![2], int(1)), (vec![1], int(6)), (vec![0], int(8))]);
        assert_eq!(p.expr(), &SetExpr::atom(expected, Relation::Lt));
    }

    #[test]
    fn hull_examples() {
        let t = set(
            2,
            SetExpr::And(vec![
                SetExpr::atom(&x(2, 0) - &x(2, 1), Relation::Eq),
                SetExpr::atom(x(2, 0), Relation::Ge),
            ]),
        );
        assert_eq!(t.syntactic_hull(), RatMatrix::from_rows(vec![vec![int(1), int(-1)]]));

        assert_eq!(set(2, SetExpr::atom(x(2, 0), Relation::Gt)).syntactic_hull().rows(), 0);

        let e0 = || SetExpr::atom(x(2, 0), Relation::Eq);
        let t = set(
            2,
            SetExpr::Or(vec![
                SetExpr::And(vec![e0(), SetExpr::atom(x(2, 1), Relation::Gt)]),
                SetExpr::And(vec![e0(), SetExpr::atom(x(2, 1), Relation::Lt)]),
            ]),
        );
        assert_eq!(t.syntactic_hull(), RatMatrix::from_rows(vec![vec![int(1), int(0)]]));

        // negated disequality counts as an equality; scaling normalises
        let t = set(
            2,
            SetExpr::complement(SetExpr::atom(x(2, 1).scale(&rat(-1, 2)), Relation::Ne)),
        );
        assert_eq!(t.syntactic_hull(), RatMatrix::from_rows(vec![vec![int(0), int(1)]]));

        let declared = set(2, SetExpr::truth())
            .with_declared_hull(RatMatrix::from_rows(vec![vec![int(2), int(2)]]))
            .unwrap();
        assert_eq!(
            declared.syntactic_hull(),
            RatMatrix::from_rows(vec![vec![int(1), int(1)]])
        );
        assert!(declared.has_visible_hull());
        assert!(!SemialgebraicSet::ambient(2).has_visible_hull());
    }

    #[test]
    fn affine_hull_distances() {
        let t = set(2, SetExpr::atom(&x(2, 0) - &c(2, int(2)), Relation::Eq));
        assert_eq!(t.syntactic_hull().rows(), 0);
        let h = t.affine_hull();
        assert_eq!(h.rows, RatMatrix::from_rows(vec![vec![int(1), int(0)]]));
        assert_eq!(h.rhs, [int(2)]);
        assert!(!h.contains(&[rat(1, 2), rat(1, 2)]));
        assert_eq!(h.dist_sq(&[rat(1, 2), rat(1, 2)]), Some(rat(9, 4)));
        assert_eq!(h.dim(), Some(1));

        let both = set(
            1,
            SetExpr::And(vec![
                SetExpr::atom(&x(1, 0) - &c(1, int(1)), Relation::Eq),
                SetExpr::atom(&x(1, 0) - &c(1, int(2)), Relation::Eq),
            ]),
        );
        assert!(both.affine_hull().contradiction);
        assert_eq!(both.syntactic_hull(), RatMatrix::identity(1));
        assert!(both.has_visible_hull());
    }

    #[test]
    fn ball_examples() {
        let t = SemialgebraicSet::ambient(1).ball_intersect(&int(1));
        assert!(t.member(&[rat(1, 2)]));
        assert!(!t.member(&[int(1)]));
        let t = set(1, SetExpr::atom(&x(1, 0) - &c(1, int(2)), Relation::Eq)).ball_intersect(&int(1));
        assert!(!t.member(&[int(2)]));
        let t = set(1, SetExpr::atom(x(1, 0), Relation::Ge)).ball_intersect(&rat(1, 4));
        assert!(t.member(&[rat(1, 3)]));
        assert!(!t.member(&[rat(1, 2)]));
        assert!(!t.member(&[rat(-1, 3)]));
    }

    #[test]
    fn homogeneity_examples() {
        let z = [int(0), int(0)];
        assert!(set(2, SetExpr::atom(&x(2, 0) + &x(2, 1), Relation::Gt)).is_s_homogeneous(&z));
        let t = set(2, SetExpr::atom(&x(2, 0).pow(2) - &x(2, 1), Relation::Eq));
        assert!(!t.is_s_homogeneous(&z));
        assert_eq!(t.homogeneity_violation(&z), Some(0));
        let a = (&x(2, 0) - &c(2, int(1))).pow(2);
        let b = (&x(2, 1) - &c(2, int(2))).pow(2);
        let t = set(2, SetExpr::atom(&a - &b, Relation::Ge));
        assert!(t.is_s_homogeneous(&[int(1), int(2)]));
        assert!(!t.is_s_homogeneous(&z));
    }

    #[test]
    fn rejects_mismatched_atoms() {
        let e = SetExpr::And(vec![gt_third(2), gt_third(3)]);
        assert_eq!(
            SemialgebraicSet::new(2, e),
            Err(SemialgError::VariableMismatch {
                atom: 1,
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn ball_truth() {
        // x1 > 1/3 is false everywhere in the ball of radius 1/4
        let t = set(2, gt_third(2)).ball_intersect(&rat(1, 16));
        assert_eq!(t.truth_within_ball(&rat(1, 16)), Some(false));
        let t = set(2, SetExpr::atom(&x(2, 0) + &c(2, int(1)), Relation::Gt)).ball_intersect(&rat(1, 16));
        assert_eq!(t.truth_within_ball(&rat(1, 16)), Some(true));
        let t = set(2, SetExpr::atom(x(2, 0), Relation::Gt)).ball_intersect(&rat(1, 16));
        assert_eq!(t.truth_within_ball(&rat(1, 16)), None);
    }

    #[test]
    fn dnf_expansion() {
        let a = || SetExpr::atom(x(1, 0), Relation::Gt);
        let b = || SetExpr::atom(x(1, 0), Relation::Lt);
        let e = SetExpr::complement(SetExpr::Or(vec![a(), SetExpr::And(vec![a(), b()])]));
        let d = e.dnf(16).unwrap();
        // ¬a ∧ (¬a ∨ ¬b)
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|br| br[0].rel == Relation::Le));
        let wide = SetExpr::And((0..8).map(|_| SetExpr::Or(vec![a(), b()])).collect());
        assert!(wide.dnf(100).is_none());
        assert_eq!(SetExpr::falsity().dnf(4).unwrap().len(), 0);
        assert_eq!(SetExpr::truth().dnf(4).unwrap(), vec![Vec::<Atom>::new()]);
    }
}
