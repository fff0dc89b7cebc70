//! Exact integer and rational primitives.
//!
//! Everything here is arbitrary precision: binomial coefficients, the
//! Krawtchouk and Hahn polynomial families, a small dense rational polynomial
//! type, and localisation of the first real zero of a polynomial by an integer
//! sign scan.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("invalid Krawtchouk parameters n={n}, q={q}, k={k} (need n >= 1, q >= 2, k <= n)")]
    InvalidKrawtchouk { n: u64, q: u64, k: u64 },
    #[error("invalid Hahn parameters n={n}, a={a}, k={k} (need k <= a <= n/2)")]
    InvalidHahn { n: u64, a: u64, k: u64 },
    #[error("argument {x} outside [0, {max}]")]
    OutOfRange { x: u64, max: u64 },
    #[error("sequence must start with a positive value")]
    NonPositiveStart,
    #[error("no sign change on [0, {0}]")]
    NoSignChange(u64),
}

/// `C(n, k)`, with the convention that it vanishes for `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = C(n, i) here, so the division is exact.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The full row `C(n, 0), ..., C(n, n)`.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::one();
    row.push(acc.clone());
    for i in 0..n {
        acc = acc * (n - i) / (i + 1);
        row.push(acc.clone());
    }
    row
}

/// Generalised binomial `X (X-1) ... (X-j+1) / j!` at a rational point.
pub fn binomial_at(x: &BigRational, j: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut factor = x.clone();
    for i in 1..=j {
        acc = acc * &factor / BigRational::from_integer(BigInt::from(i));
        factor -= BigRational::one();
    }
    acc
}

pub fn rational(value: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(value.into())
}

pub fn ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}

/// Something that can be evaluated exactly at any rational point.
pub trait RationalPolynomial {
    fn eval_rational(&self, x: &BigRational) -> BigRational;
}

impl<F> RationalPolynomial for F
where
    F: Fn(&BigRational) -> BigRational,
{
    fn eval_rational(&self, x: &BigRational) -> BigRational {
        self(x)
    }
}

/// Parameters of the Krawtchouk polynomial `K_k^{n,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KrawtchoukSpec {
    n: u64,
    q: u64,
    k: u64,
}

impl KrawtchoukSpec {
    pub fn new(n: u64, q: u64, k: u64) -> Result<Self, ExactError> {
        if n == 0 || q < 2 || k > n {
            return Err(ExactError::InvalidKrawtchouk { n, q, k });
        }
        Ok(Self { n, q, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> u64 {
        self.k
    }

    /// Exact value at an integer point of `[0, n]`. Always an integer.
    pub fn eval(&self, x: u64) -> Result<BigRational, ExactError> {
        self.eval_int(x).map(BigRational::from_integer)
    }

    /// `sum_j (-1)^j (q-1)^(k-j) C(x, j) C(n-x, k-j)`.
    pub fn eval_int(&self, x: u64) -> Result<BigInt, ExactError> {
        if x > self.n {
            return Err(ExactError::OutOfRange { x, max: self.n });
        }
        let q1 = BigInt::from(self.q - 1);
        let mut sum = BigInt::zero();
        for j in 0..=self.k {
            let term = num_traits::pow(q1.clone(), (self.k - j) as usize)
                * binomial(x, j as i64)
                * binomial(self.n - x, (self.k - j) as i64);
            if j % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        Ok(sum)
    }

    /// Values at `x = 0, 1, ..., n` produced lazily by the three-term
    /// recurrence in `x`:
    /// `(q-1)(n-x) K(x+1) = ((q-1)(n-x) + x - qk) K(x) - x K(x-1)`.
    pub fn values_iter(&self) -> KrawtchoukValues {
        KrawtchoukValues {
            spec: *self,
            x: 0,
            prev: BigInt::zero(),
            cur: binomial(self.n, self.k as i64) * num_traits::pow(BigInt::from(self.q - 1), self.k as usize),
        }
    }

    pub fn values(&self) -> Vec<BigInt> {
        self.values_iter().collect()
    }
}

impl RationalPolynomial for KrawtchoukSpec {
    fn eval_rational(&self, x: &BigRational) -> BigRational {
        let q1 = rational(self.q - 1);
        let rest = rational(self.n) - x;
        let mut sum = BigRational::zero();
        for j in 0..=self.k {
            let term = num_traits::pow(q1.clone(), (self.k - j) as usize)
                * binomial_at(x, j)
                * binomial_at(&rest, self.k - j);
            if j % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        sum
    }
}

/// Iterator returned by [`KrawtchoukSpec::values_iter`].
#[derive(Debug, Clone)]
pub struct KrawtchoukValues {
    spec: KrawtchoukSpec,
    x: u64,
    prev: BigInt,
    cur: BigInt,
}

impl Iterator for KrawtchoukValues {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let KrawtchoukSpec { n, q, k } = self.spec;
        if self.x > n {
            return None;
        }
        let out = self.cur.clone();
        if self.x < n {
            let x = self.x;
            let lead = BigInt::from((q - 1) * (n - x));
            let mid = &lead + BigInt::from(x) - BigInt::from(q) * BigInt::from(k);
            let numer = mid * &self.cur - BigInt::from(x) * &self.prev;
            debug_assert!((&numer % &lead).is_zero());
            let next = numer / lead;
            self.prev = std::mem::replace(&mut self.cur, next);
        }
        self.x += 1;
        Some(out)
    }
}

/// Johnson-scheme valency `v_j = C(a, j) C(n-a, j)`.
pub fn johnson_valency(n: u64, a: u64, j: u64) -> BigInt {
    binomial(a, j as i64) * binomial(n - a, j as i64)
}

/// Johnson-scheme multiplicity `m_k = C(n, k) - C(n, k-1)`.
pub fn johnson_multiplicity(n: u64, k: u64) -> BigInt {
    binomial(n, k as i64) - binomial(n, k as i64 - 1)
}

/// Parameters of the Hahn polynomial `H_k^{n,a}` attached to the Johnson
/// scheme on weight-`a` words of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HahnSpec {
    n: u64,
    a: u64,
    k: u64,
}

impl HahnSpec {
    pub fn new(n: u64, a: u64, k: u64) -> Result<Self, ExactError> {
        if k > a || 2 * a > n {
            return Err(ExactError::InvalidHahn { n, a, k });
        }
        Ok(Self { n, a, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn radius(&self) -> u64 {
        self.a
    }

    pub fn degree(&self) -> u64 {
        self.k
    }

    /// `m_k sum_j (-1)^j C(k,j) C(n+1-k,j) / v_j * C(x,j)` at `x` in `[0, a]`.
    pub fn eval(&self, x: u64) -> Result<BigRational, ExactError> {
        if x > self.a {
            return Err(ExactError::OutOfRange { x, max: self.a });
        }
        Ok(self.eval_rational(&rational(x)))
    }

    fn coefficient(&self, j: u64) -> BigRational {
        let numer = binomial(self.k, j as i64) * binomial(self.n + 1 - self.k, j as i64);
        BigRational::new(numer, johnson_valency(self.n, self.a, j))
    }
}

impl RationalPolynomial for HahnSpec {
    fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut sum = BigRational::zero();
        for j in 0..=self.k {
            let term = self.coefficient(j) * binomial_at(x, j);
            if j % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        sum * BigRational::from_integer(johnson_multiplicity(self.n, self.k))
    }
}

/// Smallest index `x >= 1` with `values[x] <= 0`.
///
/// Exact zeros count as nonpositive. `values[0]` must be strictly positive.
pub fn first_nonpositive_index<T>(values: &[T]) -> Result<Option<usize>, ExactError>
where
    T: Zero + PartialOrd,
{
    first_nonpositive::<_, &T, T>(values.iter())
}

/// Iterator form of [`first_nonpositive_index`]; stops consuming at the
/// first nonpositive entry.
pub fn first_nonpositive<I, B, T>(values: I) -> Result<Option<usize>, ExactError>
where
    I: IntoIterator<Item = B>,
    B: std::borrow::Borrow<T>,
    T: Zero + PartialOrd,
{
    let zero = T::zero();
    let mut iter = values.into_iter();
    match iter.next() {
        Some(first) if *first.borrow() > zero => {}
        _ => return Err(ExactError::NonPositiveStart),
    }
    Ok(iter.position(|v| *v.borrow() <= zero).map(|p| p + 1))
}

/// Integer bracket around the first real zero of a polynomial.
///
/// When the zero is itself an integer `z`, the bracket is `[z, z]` and
/// `exact_zero` is set; otherwise `upper = lower + 1` and the polynomial
/// takes strictly opposite signs at the two ends. `certified` records that
/// those endpoint signs were confirmed by exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroBracket {
    pub lower: u64,
    pub upper: u64,
    pub exact_zero: bool,
    pub certified: bool,
}

impl ZeroBracket {
    /// `ceil(zeta)`.
    pub fn ceiling(&self) -> u64 {
        self.upper
    }

    /// Rational bisection down to width `2^-bits`. Returns the final
    /// interval `(lo, hi)` with a sign change (or an exact zero) inside.
    pub fn refine<P>(&self, poly: &P, bits: u32) -> (BigRational, BigRational)
    where
        P: RationalPolynomial + ?Sized,
    {
        let mut lo = rational(self.lower);
        let mut hi = rational(self.upper);
        if self.exact_zero {
            return (lo, hi);
        }
        let width = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let lo_positive = poly.eval_rational(&lo).is_positive();
        while &hi - &lo > width {
            let mid = (&lo + &hi) / rational(2);
            let value = poly.eval_rational(&mid);
            if value.is_zero() {
                return (mid.clone(), mid);
            }
            if value.is_positive() == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }
}

impl fmt::Display for ZeroBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            write!(f, "[{}, {}] (exact zero)", self.lower, self.upper)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

/// Locate the first real zero of `poly` on `[0, end]` by scanning integer
/// points. `poly(0)` must be positive.
pub fn bracket_first_real_zero<P>(poly: &P, end: u64) -> Result<ZeroBracket, ExactError>
where
    P: RationalPolynomial + ?Sized,
{
    let values = (0..=end).map(|x| poly.eval_rational(&rational(x)));
    let first = first_nonpositive::<_, BigRational, BigRational>(values)?.ok_or(ExactError::NoSignChange(end))?
        as u64;
    let at_first = poly.eval_rational(&rational(first));
    let exact_zero = at_first.is_zero();
    let lower = if exact_zero { first } else { first - 1 };
    let certified = exact_zero || (at_first.is_negative() && poly.eval_rational(&rational(lower)).is_positive());
    Ok(ZeroBracket { lower, upper: first, exact_zero, certified })
}

/// Dense univariate polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial `X`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn shift_up(&self) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }
}

impl RationalPolynomial for Polynomial {
    fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.eval(x)
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&BigRational> for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &BigRational) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| c * rhs).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let abs = c.abs();
            match i {
                0 => write!(f, "{abs}")?,
                _ if abs.is_one() => {}
                _ => write!(f, "({abs})")?,
            }
            match i {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        rational(v)
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(8, 3), BigInt::from(56));
        assert_eq!(binomial(4, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial_row(6), [1, 6, 15, 20, 15, 6, 1].map(BigInt::from).to_vec());
    }

    #[test]
    fn generalised_binomial_matches_integer_binomial() {
        for x in 0..10u64 {
            for j in 0..12u64 {
                assert_eq!(binomial_at(&rational(x), j), BigRational::from_integer(binomial(x, j as i64)));
            }
        }
        // C(1/2, 2) = (1/2)(-1/2)/2 = -1/8
        assert_eq!(binomial_at(&ratio(1, 2), 2), ratio(-1, 8));
    }

    #[test]
    fn krawtchouk_examples() {
        let k3 = KrawtchoukSpec::new(8, 2, 3).unwrap();
        assert_eq!(k3.eval(0).unwrap(), int(56));
        // 20 - 30 + 6 + 0 term by term
        assert_eq!(k3.eval(2).unwrap(), int(-4));
        let k1 = KrawtchoukSpec::new(8, 2, 1).unwrap();
        assert_eq!(k1.eval(3).unwrap(), int(2));
    }

    #[test]
    fn krawtchouk_domain_errors() {
        assert!(KrawtchoukSpec::new(0, 2, 0).is_err());
        assert!(KrawtchoukSpec::new(4, 1, 0).is_err());
        assert!(KrawtchoukSpec::new(4, 2, 5).is_err());
        let spec = KrawtchoukSpec::new(4, 2, 1).unwrap();
        assert_eq!(spec.eval(5), Err(ExactError::OutOfRange { x: 5, max: 4 }));
    }

    #[test]
    fn krawtchouk_recurrence_matches_defining_sum() {
        for q in 2..=5 {
            for n in 1..=12 {
                for k in 0..=n {
                    let spec = KrawtchoukSpec::new(n, q, k).unwrap();
                    let direct: Vec<BigInt> = (0..=n).map(|x| spec.eval_int(x).unwrap()).collect();
                    assert_eq!(spec.values(), direct, "n={n} q={q} k={k}");
                }
            }
        }
    }

    #[test]
    fn krawtchouk_closed_forms() {
        for q in 2..=4u64 {
            for n in 1..=10u64 {
                for k in 0..=n {
                    let spec = KrawtchoukSpec::new(n, q, k).unwrap();
                    let v = binomial(n, k as i64) * num_traits::pow(BigInt::from(q - 1), k as usize);
                    assert_eq!(spec.eval_int(0).unwrap(), v);
                }
                let k1 = KrawtchoukSpec::new(n, q, 1).unwrap();
                for i in 0..=n {
                    let expected = BigInt::from((q - 1) * n) - BigInt::from(q * i);
                    assert_eq!(k1.eval_int(i).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn krawtchouk_rational_eval_agrees_at_integers() {
        let spec = KrawtchoukSpec::new(9, 3, 4).unwrap();
        for x in 0..=9 {
            assert_eq!(spec.eval_rational(&rational(x)), spec.eval(x).unwrap());
        }
    }

    #[test]
    fn hahn_examples() {
        let h1 = HahnSpec::new(4, 2, 1).unwrap();
        assert_eq!(h1.eval(0).unwrap(), int(3));
        assert_eq!(h1.eval(1).unwrap(), int(0));
        assert_eq!(h1.eval(2).unwrap(), int(-3));
        assert!(HahnSpec::new(4, 3, 1).is_err());
        assert!(HahnSpec::new(6, 2, 3).is_err());
        assert!(h1.eval(3).is_err());
    }

    #[test]
    fn hahn_closed_forms() {
        for n in 2..=12u64 {
            for a in 1..=n / 2 {
                for k in 0..=a {
                    let spec = HahnSpec::new(n, a, k).unwrap();
                    assert_eq!(spec.eval(0).unwrap(), BigRational::from_integer(johnson_multiplicity(n, k)));
                }
                let h1 = HahnSpec::new(n, a, 1).unwrap();
                for i in 0..=a {
                    let expected = rational(n - 1) * (int(1) - ratio(BigInt::from(n * i), BigInt::from(a * (n - a))));
                    assert_eq!(h1.eval(i).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn first_nonpositive_examples() {
        let k3 = KrawtchoukSpec::new(8, 2, 3).unwrap();
        let values: Vec<BigRational> = (0..=8).map(|x| k3.eval(x).unwrap()).collect();
        assert_eq!(first_nonpositive_index(&values), Ok(Some(2)));
        assert_eq!(first_nonpositive_index(&[1, 1, 1]), Ok(None));
        assert_eq!(first_nonpositive_index(&[5, 0, 3]), Ok(Some(1)));
        assert_eq!(first_nonpositive_index(&[0, 1]), Err(ExactError::NonPositiveStart));
        assert_eq!(first_nonpositive_index::<i32>(&[]), Err(ExactError::NonPositiveStart));
    }

    #[test]
    fn bracket_examples() {
        let k1 = KrawtchoukSpec::new(8, 2, 1).unwrap();
        assert_eq!(
            bracket_first_real_zero(&k1, 8).unwrap(),
            ZeroBracket { lower: 4, upper: 4, exact_zero: true, certified: true }
        );
        let k3 = KrawtchoukSpec::new(8, 2, 3).unwrap();
        assert_eq!(
            bracket_first_real_zero(&k3, 8).unwrap(),
            ZeroBracket { lower: 1, upper: 2, exact_zero: false, certified: true }
        );
        let h1 = HahnSpec::new(4, 2, 1).unwrap();
        assert_eq!(
            bracket_first_real_zero(&h1, 2).unwrap(),
            ZeroBracket { lower: 1, upper: 1, exact_zero: true, certified: true }
        );
        let positive = |_: &BigRational| int(1);
        assert_eq!(bracket_first_real_zero(&positive, 5), Err(ExactError::NoSignChange(5)));
    }

    #[test]
    fn bisection_narrows_the_bracket() {
        let k3 = KrawtchoukSpec::new(8, 2, 3).unwrap();
        let bracket = bracket_first_real_zero(&k3, 8).unwrap();
        let (lo, hi) = bracket.refine(&k3, 32);
        assert!(&hi - &lo <= BigRational::new(BigInt::one(), BigInt::one() << 32));
        assert!(lo >= int(1) && hi <= int(2));
        assert!(k3.eval_rational(&lo).is_positive());
        assert!(!k3.eval_rational(&hi).is_positive());
        // root of the cubic found independently: 1.65479212...
        let approx = (&lo + &hi) / int(2);
        let diff = approx - ratio(165479212, 100000000);
        assert!(diff.abs() < ratio(1, 10000000));
    }

    #[test]
    fn polynomial_arithmetic() {
        let x = Polynomial::x();
        let p = &(&x.shift_up() - &Polynomial::constant(int(2))) * &ratio(1, 2);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.leading_coefficient(), ratio(1, 2));
        assert_eq!(p.eval(&int(2)), int(1));
        assert_eq!(p.to_string(), "(1/2)X^2 - 1");
        assert_eq!((&p - &p).degree(), None);
    }
}
