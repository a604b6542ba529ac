//! Embedding a rational linear dynamical system into an ergodic Markov chain.
//!
//! With `Q = [I; −1ᵀ]` and a strictly positive distribution `s`, the matrix
//! `M = s·1ᵀ + ρ·Q·A·Q′` is stochastic and satisfies
//! `M^n·(s + η·Q·v) = s + η·ρ^n·Q·A^n·v`. For small enough `η, ρ > 0` every
//! entry of `M` is positive. Homogeneous targets do not see the positive
//! factor `η·ρ^n`, so the chain has the same characteristic word as the LDS.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::automata::{Letter, MullerAutomaton};
use crate::ratlin::{vector, RatMatrix, Rational};
use crate::reduce::{letter_of, ReduceError, StochasticInstance};
use crate::semialg::{MultiPoly, Relation, SemialgebraicSet, SetExpr};

/// Steps over which the trajectory identity is checked before returning.
pub const IDENTITY_CHECK_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("stationary vector has {found} entries, expected {expected}")]
    StationaryLength { expected: usize, found: usize },
    #[error("stationary entry {index} is not positive")]
    NonPositiveStationary { index: usize },
    #[error("stationary vector sums to {0}, expected 1")]
    StationarySum(Rational),
    #[error("update matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("initial vector has {found} entries, expected {expected}")]
    InitialLength { expected: usize, found: usize },
    #[error("target {target} is over {found} variables, expected {expected}")]
    TargetDimension {
        target: usize,
        expected: usize,
        found: usize,
    },
    #[error("specification reads {found} targets, instance has {expected}")]
    SpecAlphabet { expected: usize, found: usize },
    #[error("target {target} atom {atom} is not homogeneous")]
    NotHomogeneous { target: usize, atom: usize },
    #[error("unscaled embedding needs max |QBQ'| = {max} below min(s) = {min_s}")]
    UnscaledTooLarge { max: Box<Rational>, min_s: Box<Rational> },
    #[error("embedding invariant failed: {0}")]
    Invariant(&'static str),
    #[error(transparent)]
    Instance(#[from] ReduceError),
}

/// Rational LDS instance `(v, A, T, spec)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdsInstance {
    a: RatMatrix,
    v: Vec<Rational>,
    targets: Vec<SemialgebraicSet>,
    spec: MullerAutomaton,
}

impl LdsInstance {
    pub fn new(
        a: RatMatrix,
        v: Vec<Rational>,
        targets: Vec<SemialgebraicSet>,
        spec: MullerAutomaton,
    ) -> Result<Self, EmbedError> {
        if !a.is_square() {
            return Err(EmbedError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let k = a.rows();
        if v.len() != k {
            return Err(EmbedError::InitialLength {
                expected: k,
                found: v.len(),
            });
        }
        if let Some((target, t)) = targets.iter().enumerate().find(|(_, t)| t.nvars() != k) {
            return Err(EmbedError::TargetDimension {
                target,
                expected: k,
                found: t.nvars(),
            });
        }
        if spec.bits() != targets.len() {
            return Err(EmbedError::SpecAlphabet {
                expected: targets.len(),
                found: spec.bits(),
            });
        }
        Ok(LdsInstance { a, v, targets, spec })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.a
    }

    pub fn initial(&self) -> &[Rational] {
        &self.v
    }

    pub fn targets(&self) -> &[SemialgebraicSet] {
        &self.targets
    }

    pub fn spec(&self) -> &MullerAutomaton {
        &self.spec
    }

    /// Exact letters for steps `0..horizon`.
    pub fn letters(&self, horizon: usize) -> Vec<Letter> {
        let mut x = self.v.clone();
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            out.push(letter_of(&self.targets, &x));
            x = self.a.mul_vec(&x);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub s: Vec<Rational>,
    pub m: RatMatrix,
    pub mu: Vec<Rational>,
    pub eta: Rational,
    pub rho: Rational,
    /// `[I; −1ᵀ]`, `(k+1) × k`.
    pub q: RatMatrix,
    /// Bottom rows of `[s Q]⁻¹`, so `Q′Q = I` and `Q′s = 0`.
    pub qp: RatMatrix,
}

/// Uniform distribution on `n` states.
pub fn uniform(n: usize) -> Vec<Rational> {
    vec![Rational::new(1.into(), n.into()); n]
}

fn check_stationary(s: &[Rational], k: usize) -> Result<(), EmbedError> {
    if s.len() != k + 1 {
        return Err(EmbedError::StationaryLength {
            expected: k + 1,
            found: s.len(),
        });
    }
    if let Some(index) = s.iter().position(|x| !x.is_positive()) {
        return Err(EmbedError::NonPositiveStationary { index });
    }
    let total: Rational = s.iter().sum();
    if !total.is_one() {
        return Err(EmbedError::StationarySum(total));
    }
    Ok(())
}

fn max_abs<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter().map(Rational::abs).max().unwrap_or_else(Rational::zero)
}

/// `(Q, Q′)` for a given `s`.
fn bases(s: &[Rational]) -> Result<(RatMatrix, RatMatrix), EmbedError> {
    let n = s.len();
    let k = n - 1;
    let q = RatMatrix::from_fn(n, k, |i, j| {
        if i == k {
            -Rational::one()
        } else if i == j {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let r = RatMatrix::column_vector(s).hstack(&q);
    let r_inv = r.inverse().ok_or(EmbedError::Invariant("[s Q] is singular"))?;
    if r_inv.row(0).iter().any(|x| !x.is_one()) {
        return Err(EmbedError::Invariant("first row of [s Q]^-1 is not 1^T"));
    }
    Ok((q, r_inv.row_range(1, n)))
}

fn assemble(
    s: &[Rational],
    a: &RatMatrix,
    v: &[Rational],
    rho_override: Option<Rational>,
) -> Result<Embedding, EmbedError> {
    let k = a.rows();
    check_stationary(s, k)?;
    if v.len() != k {
        return Err(EmbedError::InitialLength {
            expected: k,
            found: v.len(),
        });
    }
    let (q, qp) = bases(s)?;
    let min_s = s.iter().min().expect("nonempty").clone();
    let two = Rational::from_integer(2.into());
    let qv = q.mul_vec(v);
    let max_qv = max_abs(&qv);
    let eta = if max_qv.is_zero() {
        Rational::one()
    } else {
        &min_s / (&two * &max_qv)
    };
    let qaq = &(&q * a) * &qp;
    let max_qaq = max_abs(qaq.entries());
    let rho = match rho_override {
        Some(r) => {
            if max_qaq >= min_s {
                return Err(EmbedError::UnscaledTooLarge {
                    max: Box::new(max_qaq),
                    min_s: Box::new(min_s),
                });
            }
            r
        }
        None if max_qaq.is_zero() => Rational::one(),
        None => (&min_s / (&two * &max_qaq)).min(Rational::one()),
    };
    let n = k + 1;
    let m = RatMatrix::from_fn(n, n, |i, j| &s[i] + &rho * &qaq[(i, j)]);
    let mu = vector::add(s, &vector::scale(&qv, &eta));
    let emb = Embedding {
        s: s.to_vec(),
        m,
        mu,
        eta,
        rho,
        q,
        qp,
    };
    emb.verify(a, v)?;
    Ok(emb)
}

/// Scaled embedding with the factor-two margins on `η` and `ρ`.
pub fn embed_lds(s: &[Rational], a: &RatMatrix, v: &[Rational]) -> Result<Embedding, EmbedError> {
    if !a.is_square() {
        return Err(EmbedError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    assemble(s, a, v, None)
}

/// Variant with `ρ = 1`, so `M^n·μ = s + η·Q·B^n·v`. Requires every entry of
/// `Q·B·Q′` to be smaller in magnitude than every entry of `s`.
pub fn embed_lds_unscaled(s: &[Rational], b: &RatMatrix, v: &[Rational]) -> Result<Embedding, EmbedError> {
    if !b.is_square() {
        return Err(EmbedError::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    assemble(s, b, v, Some(Rational::one()))
}

impl Embedding {
    /// Checks positivity, stochasticity and the trajectory identity.
    pub fn verify(&self, a: &RatMatrix, v: &[Rational]) -> Result<(), EmbedError> {
        if self.m.entries().any(|x| !x.is_positive()) {
            return Err(EmbedError::Invariant("M has a non-positive entry"));
        }
        let n = self.m.rows();
        for j in 0..n {
            let col: Rational = self.m.column(j).iter().sum();
            if !col.is_one() {
                return Err(EmbedError::Invariant("a column of M does not sum to 1"));
            }
        }
        if self.mu.iter().any(Rational::is_negative) || !self.mu.iter().sum::<Rational>().is_one() {
            return Err(EmbedError::Invariant("mu is not a distribution"));
        }
        let mut x = self.mu.clone();
        let mut y = v.to_vec();
        let mut scale = self.eta.clone();
        for _ in 0..=IDENTITY_CHECK_STEPS {
            let expected = vector::add(&self.s, &vector::scale(&self.q.mul_vec(&y), &scale));
            if x != expected {
                return Err(EmbedError::Invariant("trajectory identity"));
            }
            x = self.m.mul_vec(&x);
            y = a.mul_vec(&y);
            scale *= &self.rho;
        }
        Ok(())
    }

    /// `T′ = {y : 1ᵀy = 1 ∧ Q′(y − s) ∈ T}`.
    pub fn lift_target(&self, t: &SemialgebraicSet) -> SemialgebraicSet {
        let n = self.s.len();
        let ones = vec![Rational::one(); n];
        let simplex = SetExpr::atom(MultiPoly::linear(&ones, -Rational::one()), Relation::Eq);
        let shift = vector::scale(&self.qp.mul_vec(&self.s), &-Rational::one());
        let pre = t.affine_preimage(&self.qp, &shift);
        SemialgebraicSet::new(n, SetExpr::And(vec![simplex, pre.expr().clone()]))
            .expect("preimage has the chain's dimension")
    }
}

/// Markov chain instance with the same characteristic word as `lds`.
/// `s` defaults to the uniform distribution.
pub fn embed_instance(
    lds: &LdsInstance,
    s: Option<&[Rational]>,
) -> Result<(Embedding, StochasticInstance), EmbedError> {
    let zero = vector::zeros(lds.dim());
    for (target, t) in lds.targets.iter().enumerate() {
        if let Some(atom) = t.homogeneity_violation(&zero) {
            return Err(EmbedError::NotHomogeneous { target, atom });
        }
    }
    let default_s;
    let s = match s {
        Some(s) => s,
        None => {
            default_s = uniform(lds.dim() + 1);
            &default_s
        }
    };
    let emb = embed_lds(s, &lds.a, &lds.v)?;
    let targets: Vec<SemialgebraicSet> = lds.targets.iter().map(|t| emb.lift_target(t)).collect();
    if targets.iter().any(|t| !t.is_s_homogeneous(&emb.s)) {
        return Err(EmbedError::Invariant("lifted target is not s-homogeneous"));
    }
    let identity: Vec<Letter> = (0..lds.spec.num_letters() as Letter).collect();
    let spec = lds
        .spec
        .rename(&identity)
        .map_err(|e| EmbedError::Instance(ReduceError::Automaton(e)))?;
    let inst = StochasticInstance::new(emb.m.clone(), emb.mu.clone(), targets, spec)?;
    Ok((emb, inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{int, rat};

    fn m(rows: &[&[(i64, i64)]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
    }

    #[test]
    fn worked_embedding() {
        let s = [rat(1, 2), rat(1, 2)];
        let e = embed_lds(&s, &m(&[&[(1, 2)]]), &[int(1)]).unwrap();
        assert_eq!(e.q, m(&[&[(1, 1)], &[(-1, 1)]]));
        assert_eq!(e.qp, m(&[&[(1, 2), (-1, 2)]]));
        assert_eq!(e.eta, rat(1, 4));
        assert_eq!(e.rho, int(1));
        assert_eq!(e.mu, [rat(3, 4), rat(1, 4)]);
        assert_eq!(e.m, m(&[&[(3, 4), (1, 4)], &[(1, 4), (3, 4)]]));
    }

    #[test]
    fn degenerate_embeddings() {
        let s = [rat(1, 3), rat(1, 3), rat(1, 3)];
        let e = embed_lds(&s, &RatMatrix::zeros(2, 2), &[int(1), int(-2)]).unwrap();
        assert_eq!(e.m, RatMatrix::from_fn(3, 3, |i, _| s[i].clone()));
        assert_eq!(e.m.mul_vec(&e.mu), s);

        let a = m(&[&[(2, 1), (1, 1)], &[(0, 1), (3, 1)]]);
        let e = embed_lds(&s, &a, &[int(0), int(0)]).unwrap();
        assert_eq!(e.mu, s);
        assert_eq!(e.m.mul_vec(&e.mu), s);
        assert!(e.rho < int(1));
    }

    #[test]
    fn rejects_bad_stationary() {
        let a = m(&[&[(1, 2)]]);
        assert_eq!(
            embed_lds(&[int(1), int(0)], &a, &[int(1)]),
            Err(EmbedError::NonPositiveStationary { index: 1 })
        );
        assert!(matches!(
            embed_lds(&[rat(1, 2), rat(1, 3)], &a, &[int(1)]),
            Err(EmbedError::StationarySum(_))
        ));
    }

    #[test]
    fn unscaled_variant() {
        let s = [rat(1, 2), rat(1, 2)];
        let e = embed_lds_unscaled(&s, &m(&[&[(1, 2)]]), &[int(1)]).unwrap();
        assert_eq!(e.rho, int(1));
        assert!(matches!(
            embed_lds_unscaled(&s, &m(&[&[(3, 1)]]), &[int(1)]),
            Err(EmbedError::UnscaledTooLarge { .. })
        ));
    }

    fn gt0(k: usize) -> SemialgebraicSet {
        SemialgebraicSet::new(k, SetExpr::atom(MultiPoly::var(k, 0), Relation::Gt)).unwrap()
    }

    #[test]
    fn lifted_target_example() {
        let lds = LdsInstance::new(
            m(&[&[(1, 2)]]),
            vec![int(1)],
            vec![gt0(1)],
            MullerAutomaton::infinitely_often(1, 0).unwrap(),
        )
        .unwrap();
        let half = [rat(1, 2), rat(1, 2)];
        let (_, inst) = embed_instance(&lds, Some(&half)).unwrap();
        let y = |i| MultiPoly::var(2, i);
        let expected = SetExpr::And(vec![
            SetExpr::atom(&(&y(0) + &y(1)) - &MultiPoly::constant(2, int(1)), Relation::Eq),
            SetExpr::atom(&y(0).scale(&rat(1, 2)) - &y(1).scale(&rat(1, 2)), Relation::Gt),
        ]);
        assert_eq!(inst.targets()[0].expr(), &expected);
        assert!(inst.targets()[0].is_s_homogeneous(&half));
        assert_eq!(inst.letters(50), lds.letters(50));
    }

    #[test]
    fn alternating_sign_round_trip() {
        let x1 = MultiPoly::var(2, 0);
        let zero = SemialgebraicSet::new(2, SetExpr::atom(x1.clone(), Relation::Eq)).unwrap();
        let pos = SemialgebraicSet::new(2, SetExpr::atom(x1, Relation::Gt)).unwrap();
        let a = m(&[&[(-1, 2), (0, 1)], &[(1, 1), (1, 3)]]);
        let spec = MullerAutomaton::eventually(2, 0).unwrap();
        let lds = LdsInstance::new(a, vec![int(1), int(0)], vec![zero, pos], spec).unwrap();
        let (_, inst) = embed_instance(&lds, None).unwrap();
        assert_eq!(inst.letters(51), lds.letters(51));
        assert!(lds.letters(6).iter().step_by(2).all(|&l| l == 0b10));
    }

    #[test]
    fn empty_target_round_trip() {
        let x1 = MultiPoly::var(1, 0);
        let never = SetExpr::And(vec![
            SetExpr::atom(x1.clone(), Relation::Gt),
            SetExpr::atom(x1, Relation::Lt),
        ]);
        let lds = LdsInstance::new(
            m(&[&[(2, 1)]]),
            vec![int(3)],
            vec![SemialgebraicSet::new(1, never).unwrap()],
            MullerAutomaton::eventually(1, 0).unwrap(),
        )
        .unwrap();
        let (_, inst) = embed_instance(&lds, None).unwrap();
        assert!(inst.letters(50).iter().all(|&l| l == 0));
    }

    #[test]
    fn rejects_inhomogeneous_targets() {
        let p = &MultiPoly::var(1, 0) - &MultiPoly::constant(1, int(1));
        let t = SemialgebraicSet::new(
            1,
            SetExpr::And(vec![
                SetExpr::atom(MultiPoly::var(1, 0), Relation::Gt),
                SetExpr::atom(p, Relation::Gt),
            ]),
        )
        .unwrap();
        let lds = LdsInstance::new(
            m(&[&[(1, 2)]]),
            vec![int(1)],
            vec![gt0(1), t],
            MullerAutomaton::eventually(2, 0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            embed_instance(&lds, None).unwrap_err(),
            EmbedError::NotHomogeneous { target: 1, atom: 1 }
        );
    }
}
