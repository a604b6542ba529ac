//! Spectral classification of rational matrices without computing
//! eigenvalues.
//!
//! Unit-modulus eigenvalues of a stochastic matrix are roots of unity, so they
//! are detected by trial division of the characteristic polynomial by the
//! cyclotomic polynomials `Φ_d` with `φ(d) ≤ k`. What remains after removing
//! `x^ℓ` and those factors is the contracting part, whose decay is certified
//! by powering until an induced ∞-norm drops below one.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ratlin::{vector, RatMatrix, RatPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectraError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("column {col} sums to {sum}, expected 1")]
    ColumnSum { col: usize, sum: Rational },
    #[error("no power m <= {cap} has induced inf-norm below 1")]
    DecayNotFound { cap: usize },
    #[error("squared radius must be positive")]
    NonPositiveRadius,
}

/// Default decay-search cap per matrix dimension.
pub const MCAP_PER_DIMENSION: usize = 64;

pub fn default_mcap(dimension: usize) -> usize {
    MCAP_PER_DIMENSION * dimension.max(1)
}

/// Euler's totient.
pub fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `d`-th cyclotomic polynomial, by dividing `x^d − 1` by `Φ_e` for every
/// proper divisor `e` of `d`.
pub fn cyclotomic(d: u64) -> RatPoly {
    assert!(d >= 1, "cyclotomic polynomial of order 0");
    let mut p = &RatPoly::monomial(Rational::one(), d as usize) - &RatPoly::one();
    for e in (1..d).filter(|e| d % e == 0) {
        p = p.exact_div(&cyclotomic(e)).expect("cyclotomic factors divide x^d - 1");
    }
    p
}

/// Every order `d` with `φ(d) ≤ k`, ascending. Since `φ(d) ≥ √(d/2)`, no order
/// beyond `2k²` qualifies.
pub fn candidate_orders(k: usize) -> Vec<u64> {
    let k = k as u64;
    (1..=2 * k * k.max(1)).filter(|&d| totient(d) <= k).collect()
}

/// Spectrum summary of a square rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralProfile {
    pub charpoly: RatPoly,
    /// Algebraic multiplicity `ℓ` of the eigenvalue 0.
    pub zero_mult: usize,
    /// Multiplicity of `Φ_d` in the characteristic polynomial, for each order
    /// `d` that divides it at least once.
    pub cyclo_factors: BTreeMap<u64, usize>,
    /// Least common multiple of the detected orders, 1 if there are none.
    pub period_c: u64,
    /// Eigenvalues that are neither zero nor roots of unity, with
    /// multiplicity. For a stochastic matrix these are exactly the nonzero
    /// eigenvalues of modulus below one.
    pub dyn_dim: usize,
}

impl SpectralProfile {
    /// Characteristic polynomial with `x^ℓ` and all detected `Φ_d^mult`
    /// removed.
    pub fn remainder(&self) -> RatPoly {
        let mut rest = self.charpoly.shift_down(self.zero_mult);
        for (&d, &mult) in &self.cyclo_factors {
            let phi = cyclotomic(d);
            for _ in 0..mult {
                rest = rest.exact_div(&phi).expect("detected factor divides");
            }
        }
        rest
    }

    pub fn unit_root_mult(&self) -> usize {
        self.cyclo_factors.iter().map(|(&d, &m)| totient(d) as usize * m).sum()
    }
}

pub fn analyze(m: &RatMatrix) -> SpectralProfile {
    assert!(m.is_square(), "spectral analysis of a non-square matrix");
    let k = m.rows();
    let charpoly = m.charpoly();
    let zero_mult = charpoly.trailing_zeros();
    let mut rest = charpoly.shift_down(zero_mult);
    let mut cyclo_factors = BTreeMap::new();
    for d in candidate_orders(k) {
        if rest.degree().unwrap_or(0) < totient(d) as usize {
            continue;
        }
        let phi = cyclotomic(d);
        let mut mult = 0;
        while let Some(q) = rest.exact_div(&phi) {
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            cyclo_factors.insert(d, mult);
        }
    }
    let period_c = cyclo_factors.keys().fold(1u64, |acc, &d| acc.lcm(&d));
    let unit: usize = cyclo_factors.iter().map(|(&d, &m)| totient(d) as usize * m).sum();
    SpectralProfile {
        dyn_dim: k - zero_mult - unit,
        charpoly,
        zero_mult,
        cyclo_factors,
        period_c,
    }
}

/// Checks that `m` is square, non-negative and that every column sums to 1.
pub fn check_column_stochastic(m: &RatMatrix) -> Result<(), SpectraError> {
    if !m.is_square() {
        return Err(SpectraError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    for col in 0..m.cols() {
        let mut sum = Rational::zero();
        for row in 0..m.rows() {
            let x = &m[(row, col)];
            if x < &Rational::zero() {
                return Err(SpectraError::NegativeEntry { row, col });
            }
            sum += x;
        }
        if !sum.is_one() {
            return Err(SpectraError::ColumnSum { col, sum });
        }
    }
    Ok(())
}

/// Algebraic against geometric multiplicity of the eigenvalues of order `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicityCheck {
    pub order: u64,
    /// `φ(d) · mult(d)`.
    pub algebraic: usize,
    /// Kernel dimension of `Φ_d(m)`.
    pub geometric: usize,
}

impl SimplicityCheck {
    pub fn passed(&self) -> bool {
        self.algebraic == self.geometric
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub unit_eigenvalue: bool,
    pub simplicity: Vec<SimplicityCheck>,
    /// Characteristic polynomial with zero and root-of-unity factors removed.
    pub remainder: RatPoly,
    /// Decay block found on the companion matrix of the remainder, as
    /// `(m, ‖C^m‖∞)`. `None` when no `m` within the cap certifies decay.
    pub remainder_decay: Option<(usize, Rational)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.unit_eigenvalue && self.simplicity.iter().all(SimplicityCheck::passed) && self.remainder_decay.is_some()
    }
}

/// Verifies the spectral shape every stochastic matrix must have: 1 is an
/// eigenvalue, root-of-unity eigenvalues are semisimple, and everything else
/// except 0 lies strictly inside the unit disk.
pub fn validate_stochastic_spectrum(
    m: &RatMatrix,
    profile: &SpectralProfile,
    mcap: Option<usize>,
) -> Result<ValidationReport, SpectraError> {
    check_column_stochastic(m)?;
    let simplicity = profile
        .cyclo_factors
        .iter()
        .map(|(&d, &mult)| {
            let phi_m = cyclotomic(d).eval_matrix(m);
            SimplicityCheck {
                order: d,
                algebraic: totient(d) as usize * mult,
                geometric: m.cols() - phi_m.rank(),
            }
        })
        .collect();
    let remainder = profile.remainder();
    let cap = mcap.unwrap_or_else(|| default_mcap(m.rows()));
    let remainder_decay = match remainder.degree() {
        None | Some(0) => Some((1, Rational::zero())),
        Some(_) => decay_block(&remainder.companion(), cap),
    };
    Ok(ValidationReport {
        unit_eigenvalue: profile.cyclo_factors.contains_key(&1),
        simplicity,
        remainder,
        remainder_decay,
    })
}

/// Smallest `m ≤ cap` with `‖a^m‖∞ < 1`, with that norm.
pub fn decay_block(a: &RatMatrix, cap: usize) -> Option<(usize, Rational)> {
    let mut power = a.clone();
    for m in 1..=cap {
        let norm = power.induced_inf_norm();
        if norm < Rational::one() {
            return Some((m, norm));
        }
        power = &power * a;
    }
    None
}

/// Witness that `‖a^n v‖₂ < √eps_sq` for every `n ≥ n0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayCertificate {
    pub block_m: usize,
    /// `‖a^block_m‖∞`, strictly below 1.
    pub block_norm: Rational,
    /// `max_{0 ≤ r < block_m} ‖a^r v‖∞`.
    pub prefix_bound: Rational,
    pub n0: usize,
}

/// Writing `n = q·m + r`, `‖a^n v‖∞ ≤ N^q · C` with `N = ‖a^m‖∞` and `C` the
/// prefix bound, and `‖x‖₂² ≤ k‖x‖∞²`. The returned `n0 = q·m` is the first
/// block boundary where `C²·k·N^{2q} < eps_sq`.
pub fn decay_bound(
    a: &RatMatrix,
    v: &[Rational],
    eps_sq: &Rational,
    mcap: Option<usize>,
) -> Result<DecayCertificate, SpectraError> {
    if eps_sq <= &Rational::zero() {
        return Err(SpectraError::NonPositiveRadius);
    }
    let k = a.rows();
    let cap = mcap.unwrap_or_else(|| default_mcap(k));
    let (block_m, block_norm) = decay_block(a, cap).ok_or(SpectraError::DecayNotFound { cap })?;
    let mut prefix_bound = Rational::zero();
    let mut x = v.to_vec();
    for _ in 0..block_m {
        prefix_bound = prefix_bound.max(vector::inf_norm(&x));
        x = a.mul_vec(&x);
    }
    let ratio = &block_norm * &block_norm;
    let mut bound = &prefix_bound * &prefix_bound * Rational::from_integer(BigInt::from(k));
    let mut q = 0;
    while &bound >= eps_sq {
        bound *= &ratio;
        q += 1;
    }
    Ok(DecayCertificate {
        block_m,
        block_norm,
        prefix_bound,
        n0: q * block_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{int, rat};
    use alloc::vec;

    fn m(rows: &[&[(i64, i64)]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
    }

    fn poly(c: &[i64]) -> RatPoly {
        RatPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic(1), poly(&[-1, 1]));
        assert_eq!(cyclotomic(2), poly(&[1, 1]));
        assert_eq!(cyclotomic(6), poly(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), poly(&[1, 0, -1, 0, 1]));
        for d in 1..30 {
            assert_eq!(cyclotomic(d).degree(), Some(totient(d) as usize));
        }
    }

    #[test]
    fn candidate_order_tables() {
        assert_eq!(candidate_orders(1), [1, 2]);
        assert_eq!(candidate_orders(2), [1, 2, 3, 4, 6]);
        assert_eq!(candidate_orders(4), [1, 2, 3, 4, 5, 6, 8, 10, 12]);
    }

    #[test]
    fn analyze_examples() {
        let ma = m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        let p = analyze(&ma);
        assert_eq!(p.charpoly, poly(&[0, -1, 1]));
        assert_eq!((p.zero_mult, p.period_c, p.dyn_dim), (1, 1, 0));
        assert_eq!(p.cyclo_factors, BTreeMap::from([(1, 1)]));

        let mb = m(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let p = analyze(&mb);
        assert_eq!(p.charpoly, poly(&[-1, 0, 1]));
        assert_eq!((p.zero_mult, p.period_c, p.dyn_dim), (0, 2, 0));
        assert_eq!(p.cyclo_factors, BTreeMap::from([(1, 1), (2, 1)]));

        let md = m(&[
            &[(0, 1), (1, 2), (1, 2)],
            &[(1, 2), (1, 4), (1, 4)],
            &[(1, 2), (1, 4), (1, 4)],
        ]);
        let p = analyze(&md);
        assert_eq!(p.charpoly, RatPoly::new(vec![int(0), rat(-1, 2), rat(-1, 2), int(1)]));
        assert_eq!((p.zero_mult, p.period_c, p.dyn_dim), (1, 1, 1));
        assert_eq!(p.cyclo_factors, BTreeMap::from([(1, 1)]));
        assert_eq!(p.remainder(), RatPoly::linear(rat(-1, 2)));
    }

    #[test]
    fn validation_examples() {
        let mb = m(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let report = validate_stochastic_spectrum(&mb, &analyze(&mb), None).unwrap();
        assert!(report.passed());
        assert_eq!(report.simplicity[1].geometric, 1);

        let mc = m(&[&[(3, 4), (1, 4)], &[(1, 4), (3, 4)]]);
        let report = validate_stochastic_spectrum(&mc, &analyze(&mc), None).unwrap();
        assert!(report.passed());
        assert_eq!(report.remainder, RatPoly::linear(rat(1, 2)));

        let bad = m(&[&[(2, 1), (0, 1)], &[(0, 1), (2, 1)]]);
        assert!(matches!(
            validate_stochastic_spectrum(&bad, &analyze(&bad), None),
            Err(SpectraError::ColumnSum { col: 0, .. })
        ));
        let neg = m(&[&[(3, 2), (0, 1)], &[(-1, 2), (1, 1)]]);
        assert!(matches!(
            check_column_stochastic(&neg),
            Err(SpectraError::NegativeEntry { row: 1, col: 0 })
        ));
    }

    #[test]
    fn detects_non_simple_unit_eigenvalue() {
        // A Jordan block for eigenvalue 1 is not stochastic, but its spectral
        // check must still flag the missing eigenvectors.
        let jordan = m(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]);
        let p = analyze(&jordan);
        assert_eq!(p.cyclo_factors, BTreeMap::from([(1, 2)]));
        let phi1 = cyclotomic(1).eval_matrix(&jordan);
        assert_eq!(2 - phi1.rank(), 1);
    }

    #[test]
    fn decay_examples() {
        let cert = decay_bound(&m(&[&[(1, 2)]]), &[int(1)], &rat(1, 100), None).unwrap();
        assert_eq!(cert.block_m, 1);
        assert_eq!(cert.block_norm, rat(1, 2));
        assert_eq!(cert.n0, 4);

        for v in [int(0), int(5), rat(-1, 3)] {
            let cert = decay_bound(&m(&[&[(0, 1)]]), &[v], &rat(1, 7), None).unwrap();
            assert!(cert.n0 <= 1);
        }

        // a^2 already has row sums 3/4 and 1/4.
        let a = m(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 2)]]);
        let cert = decay_bound(&a, &[int(1), int(1)], &int(1), None).unwrap();
        assert_eq!(cert.block_m, 2);
        assert_eq!(cert.block_norm, rat(3, 4));
        assert_eq!(cert.n0 % cert.block_m, 0);
        assert_eq!(a.pow(3).induced_inf_norm(), rat(1, 2));
        for n in cert.n0..cert.n0 + 20 {
            let x = a.pow(n as u64).mul_vec(&[int(1), int(1)]);
            assert!(vector::norm_sq(&x) < int(1));
        }
    }

    #[test]
    fn decay_failures() {
        let id = RatMatrix::identity(2);
        assert_eq!(
            decay_bound(&id, &[int(1), int(0)], &int(1), Some(10)),
            Err(SpectraError::DecayNotFound { cap: 10 })
        );
        assert_eq!(
            decay_bound(&id, &[int(1), int(0)], &int(0), None),
            Err(SpectraError::NonPositiveRadius)
        );
    }

    #[test]
    fn empty_matrix_decays_immediately() {
        let cert = decay_bound(&RatMatrix::zeros(0, 0), &[], &int(1), None).unwrap();
        assert_eq!(cert.n0, 0);
    }
}
