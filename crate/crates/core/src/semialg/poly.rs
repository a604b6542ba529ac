use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ratlin::{denominator_lcm, sign, Canonical, RatMatrix, Rational};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// `Σ coeffs[i]·x_i + constant`.
    pub fn linear(coeffs: &[Rational], constant: Rational) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, constant);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Sums duplicate monomials and drops zeros. Panics if an exponent vector
    /// has the wrong length.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial has no non-constant monomial.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Largest total degree; 0 for constants and the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// All monomials share one total degree. The zero polynomial qualifies.
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|x| x == d),
        }
    }

    /// Coefficients of a nonzero polynomial of the form `Σ a_i x_i` (degree one,
    /// no constant term).
    pub fn linear_form(&self) -> Option<Vec<Rational>> {
        if self.is_zero() {
            return None;
        }
        let mut form = vec![Rational::zero(); self.nvars];
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() != 1 {
                return None;
            }
            let i = e.iter().position(|&x| x == 1)?;
            form[i] = c.clone();
        }
        Some(form)
    }

    /// Degree-at-most-one polynomial as `(coefficients, constant)`.
    pub fn affine_parts(&self) -> Option<(Vec<Rational>, Rational)> {
        let mut form = vec![Rational::zero(); self.nvars];
        let mut constant = Rational::zero();
        for (e, c) in &self.terms {
            match e.iter().sum::<u32>() {
                0 => constant = c.clone(),
                1 => form[e.iter().position(|&x| x == 1)?] = c.clone(),
                _ => return None,
            }
        }
        Some((form, constant))
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension mismatch");
        let mut powers: Vec<Vec<Rational>> = x.iter().map(|xi| vec![Rational::one(), xi.clone()]).collect();
        let mut sum = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().expect("seeded") * &x[i];
                    powers[i].push(next);
                }
                term *= &powers[i][k];
            }
            sum += term;
        }
        sum
    }

    /// Exact sign of the value at `x`.
    ///
    /// Works over the integers: with `x = X/D`, `L` clearing the coefficient
    /// denominators and `d` the total degree, `L·D^d·p(x)` is an integer of
    /// the same sign.
    pub fn eval_sign(&self, x: &[Rational]) -> i8 {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension mismatch");
        let d = denominator_lcm(x);
        let big_x: Vec<BigInt> = x.iter().map(|xi| xi.numer() * (&d / xi.denom())).collect();
        let l = denominator_lcm(self.terms.values());
        let deg = self.total_degree() as usize;
        let mut d_pows = vec![BigInt::one()];
        for i in 1..=deg {
            let next = &d_pows[i - 1] * &d;
            d_pows.push(next);
        }
        let mut powers: Vec<Vec<BigInt>> = big_x.iter().map(|xi| vec![BigInt::one(), xi.clone()]).collect();
        let mut sum = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.numer() * (&l / c.denom());
            let mut degree = 0usize;
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                if k == 0 {
                    continue;
                }
                degree += k;
                while powers[i].len() <= k {
                    let next = powers[i].last().expect("seeded") * &big_x[i];
                    powers[i].push(next);
                }
                term *= &powers[i][k];
            }
            term *= &d_pows[deg - degree];
            sum += term;
        }
        sign(&Rational::from_integer(sum.signum()))
    }

    pub fn scale(&self, f: &Rational) -> Self {
        if f.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * f)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Rational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `p ∘ (y ↦ L·y + b)`, a polynomial in `L.cols()` variables. `L` must have
    /// `self.nvars()` rows and `b` as many entries.
    pub fn substitute_affine(&self, l: &RatMatrix, b: &[Rational]) -> Self {
        assert_eq!(l.rows(), self.nvars, "substitution rows must match variables");
        assert_eq!(b.len(), self.nvars, "substitution offset length mismatch");
        let n_new = l.cols();
        let images: Vec<MultiPoly> = (0..self.nvars)
            .map(|j| MultiPoly::linear(l.row(j), b[j].clone()))
            .collect();
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|f| vec![MultiPoly::constant(n_new, Rational::one()), f.clone()])
            .collect();
        let mut out = MultiPoly::zero(n_new);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(n_new, c.clone());
            for (j, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[j].len() <= k {
                    let next = powers[j].last().expect("seeded") * &images[j];
                    powers[j].push(next);
                }
                if k > 0 {
                    term = &term * &powers[j][k];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// `p(x + s)`.
    pub fn shift(&self, s: &[Rational]) -> Self {
        self.substitute_affine(&RatMatrix::identity(self.nvars), s)
    }

    /// Positive multiple with coprime integer coefficients. Signs are kept so
    /// relations against zero are unchanged.
    pub fn primitive_integer(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = denominator_lcm(self.terms.values());
        let gcd = self
            .terms
            .values()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .fold(BigInt::zero(), |g, x| g.gcd(&x));
        self.scale(&Rational::new(lcm, gcd))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&x| x == 0);
            if is_const || !mag.is_one() {
                write!(f, "{}", Canonical(&mag))?;
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "x{}", i + 1)?,
                    _ => write!(f, "x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}
