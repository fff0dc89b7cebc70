//! Exact scheme parameter tables and the harmonic analysis built on them.
//!
//! [`SchemeParameters`] holds the p-numbers and q-numbers of a scheme as exact
//! rationals. Intersection numbers and Krein parameters are derived from them
//! lazily, one `(i, j)` row at a time. [`RadialFunction`] is the carrier for
//! functions on distances, and the Fourier transforms and both convolutions
//! are methods on the parameter table.

use std::fmt;
use std::ops::Index;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{binomial, johnson_multiplicity, johnson_valency, rational, ExactError, HahnSpec, KrawtchoukSpec};
use crate::scheme::FiniteMetric;

/// Largest diameter for which a full parameter table is materialised.
pub const MAX_PARAMETER_DIAMETER: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("invalid Hamming parameters n={n}, q={q} (need n >= 1, q >= 2)")]
    InvalidHamming { n: u64, q: u64 },
    #[error("invalid Johnson parameters n={n}, a={a} (need 1 <= a <= n/2)")]
    InvalidJohnson { n: u64, a: u64 },
    #[error("diameter {n} exceeds the cap {max}")]
    TooLarge { n: u64, max: usize },
    #[error("malformed parameter table: {0}")]
    Shape(String),
    #[error("parameter identity fails: {0}")]
    Identity(String),
    #[error("Q-matrix is singular")]
    SingularQ,
    #[error("radial function has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("code is empty")]
    EmptyCode,
    #[error("code member {0} is not a point of the space")]
    PointOutOfRange(usize),
    #[error("code member {0} appears twice")]
    DuplicatePoint(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Where a parameter table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Hamming { n: u64, q: u64 },
    Johnson { n: u64, a: u64 },
    Explicit,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Hamming { n, q } => write!(f, "hamming(n={n}, q={q})"),
            Family::Johnson { n, a } => write!(f, "johnson(n={n}, a={a})"),
            Family::Explicit => write!(f, "explicit"),
        }
    }
}

/// The first way in which a Krein table fails to be Q-polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QPolynomialViolation {
    /// `q_{i,j}^k != 0` although `k > i + j`.
    Vanishing { i: usize, j: usize, k: usize },
    /// `q_{1,k}^{k+1} = 0`.
    Degenerate { k: usize },
}

impl fmt::Display for QPolynomialViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vanishing { i, j, k } => write!(f, "q[{i}][{j}][{k}] is nonzero with {k} > {i} + {j}"),
            Self::Degenerate { k } => write!(f, "q[1][{k}][{}] vanishes", k + 1),
        }
    }
}

type Row = OnceLock<Vec<BigRational>>;

/// Exact parameter table of a scheme with diameter `n`.
#[derive(Debug, Clone)]
pub struct SchemeParameters {
    family: Family,
    n: usize,
    size: BigInt,
    v: Vec<BigInt>,
    m: Vec<BigInt>,
    /// `p[i][j] = p_i(j)`
    p: Vec<Vec<BigRational>>,
    /// `q[i][j] = q_i(j)`
    q: Vec<Vec<BigRational>>,
    q_polynomial: bool,
    intersection_rows: Vec<Row>,
    krein_rows: Vec<Row>,
}

fn check_diameter(n: u64) -> Result<usize, ParamError> {
    if n as usize > MAX_PARAMETER_DIAMETER {
        return Err(ParamError::TooLarge { n, max: MAX_PARAMETER_DIAMETER });
    }
    Ok(n as usize)
}

fn empty_rows(n: usize) -> Vec<Row> {
    (0..(n + 1) * (n + 1)).map(|_| OnceLock::new()).collect()
}

/// Closed-form parameters of the Hamming scheme on `F_q^n`.
pub fn hamming_parameters(n: u64, q: u64) -> Result<SchemeParameters, ParamError> {
    if n == 0 || q < 2 {
        return Err(ParamError::InvalidHamming { n, q });
    }
    let width = check_diameter(n)? + 1;
    let v: Vec<BigInt> =
        (0..=n).map(|i| binomial(n, i as i64) * num_traits::pow(BigInt::from(q - 1), i as usize)).collect();
    let table: Vec<Vec<BigRational>> = (0..=n)
        .map(|k| {
            KrawtchoukSpec::new(n, q, k).map(|spec| spec.values().into_iter().map(BigRational::from_integer).collect())
        })
        .collect::<Result<_, _>>()?;
    Ok(SchemeParameters {
        family: Family::Hamming { n, q },
        n: width - 1,
        size: num_traits::pow(BigInt::from(q), n as usize),
        m: v.clone(),
        v,
        p: table.clone(),
        q: table,
        q_polynomial: true,
        intersection_rows: empty_rows(width - 1),
        krein_rows: empty_rows(width - 1),
    })
}

/// Closed-form parameters of the Johnson scheme on weight-`a` words of
/// length `n`. The p-numbers come from `P = |X| Q^{-1}`.
pub fn johnson_parameters(n: u64, a: u64) -> Result<SchemeParameters, ParamError> {
    if a == 0 || 2 * a > n {
        return Err(ParamError::InvalidJohnson { n, a });
    }
    let width = check_diameter(a)? + 1;
    let size = binomial(n, a as i64);
    let v: Vec<BigInt> = (0..=a).map(|i| johnson_valency(n, a, i)).collect();
    let m: Vec<BigInt> = (0..=a).map(|k| johnson_multiplicity(n, k)).collect();
    let q: Vec<Vec<BigRational>> = (0..=a)
        .map(|k| {
            let spec = HahnSpec::new(n, a, k)?;
            (0..=a).map(|x| spec.eval(x)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let inverse = invert_fraction_free(&q).ok_or(ParamError::SingularQ)?;
    let scale = BigRational::from_integer(size.clone());
    let p: Vec<Vec<BigRational>> = inverse.into_iter().map(|row| row.into_iter().map(|e| e * &scale).collect()).collect();
    let params = SchemeParameters {
        family: Family::Johnson { n, a },
        n: width - 1,
        size,
        v,
        m,
        p,
        q,
        q_polynomial: true,
        intersection_rows: empty_rows(width - 1),
        krein_rows: empty_rows(width - 1),
    };
    params.verify_identities()?;
    Ok(params)
}

/// Inverse of a square rational matrix by fraction-free Gauss-Jordan
/// elimination on an integer scaling of `[M | I]`.
fn invert_fraction_free(matrix: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let size = matrix.len();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(size);
    for (i, row) in matrix.iter().enumerate() {
        // Clear denominators row by row; this scales the inverse's columns.
        let lcm = row.iter().fold(BigInt::one(), |acc, e| num_integer::Integer::lcm(&acc, e.denom()));
        let mut augmented: Vec<BigInt> = row.iter().map(|e| (e * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        augmented.extend((0..size).map(|j| if i == j { lcm.clone() } else { BigInt::zero() }));
        rows.push(augmented);
    }
    // Now rows = [L M | L] with L = diag(lcm_i), so the right block of the
    // reduced form gives (L M)^{-1} L = M^{-1}.
    let mut previous = BigInt::one();
    for k in 0..size {
        let pivot = (k..size).find(|&r| !rows[r][k].is_zero())?;
        rows.swap(k, pivot);
        for i in 0..size {
            if i == k {
                continue;
            }
            let factor = rows[i][k].clone();
            for j in 0..2 * size {
                let updated = &rows[k][k] * &rows[i][j] - &factor * &rows[k][j];
                debug_assert!((&updated % &previous).is_zero());
                rows[i][j] = updated / &previous;
            }
        }
        previous = rows[k][k].clone();
    }
    // The left block is now diagonal D with [D | R] = E [L M | L], so
    // R M = D and M^{-1} = D^{-1} R.
    Some(
        rows.iter()
            .enumerate()
            .map(|(i, row)| (0..size).map(|j| BigRational::new(row[size + j].clone(), row[i].clone())).collect())
            .collect(),
    )
}

impl SchemeParameters {
    /// Build from explicit tables; `p[i][j] = p_i(j)` and `q[i][j] = q_i(j)`.
    /// Every defining identity is checked exactly.
    pub fn from_tables(
        size: BigInt,
        v: Vec<BigInt>,
        m: Vec<BigInt>,
        p: Vec<Vec<BigRational>>,
        q: Vec<Vec<BigRational>>,
    ) -> Result<Self, ParamError> {
        let width = v.len();
        if width == 0 {
            return Err(ParamError::Shape("empty valency list".into()));
        }
        let n = check_diameter(width as u64 - 1)?;
        let square = |t: &Vec<Vec<BigRational>>| t.len() == width && t.iter().all(|r| r.len() == width);
        if m.len() != width || !square(&p) || !square(&q) {
            return Err(ParamError::Shape(format!("all tables must be {width} wide")));
        }
        let mut params = Self {
            family: Family::Explicit,
            n,
            size,
            v,
            m,
            p,
            q,
            q_polynomial: false,
            intersection_rows: empty_rows(n),
            krein_rows: empty_rows(n),
        };
        params.verify_identities()?;
        params.q_polynomial = params.krein_table().q_polynomial_violation().is_none();
        Ok(params)
    }

    fn verify_identities(&self) -> Result<(), ParamError> {
        let width = self.n + 1;
        let fail = |what: String| Err(ParamError::Identity(what));
        for j in 0..width {
            if !self.p[0][j].is_one() || !self.q[0][j].is_one() {
                return fail(format!("p_0({j}) and q_0({j}) must be 1"));
            }
        }
        for i in 0..width {
            if self.p[i][0] != BigRational::from_integer(self.v[i].clone()) {
                return fail(format!("p_{i}(0) != v_{i}"));
            }
            if self.q[i][0] != BigRational::from_integer(self.m[i].clone()) {
                return fail(format!("q_{i}(0) != m_{i}"));
            }
        }
        if self.v.iter().sum::<BigInt>() != self.size || self.m.iter().sum::<BigInt>() != self.size {
            return fail("valencies and multiplicities must each sum to |X|".into());
        }
        let size = BigRational::from_integer(self.size.clone());
        for i in 0..width {
            for k in 0..width {
                let entry: BigRational = (0..width).map(|j| &self.p[i][j] * &self.q[j][k]).sum();
                let target = if i == k { size.clone() } else { BigRational::zero() };
                if entry != target {
                    return fail(format!("(P Q)[{i}][{k}] = {entry}, expected {target}"));
                }
            }
        }
        for i in 0..width {
            for j in 0..width {
                let left = &self.p[i][j] * BigRational::from_integer(self.m[j].clone());
                let right = &self.q[j][i] * BigRational::from_integer(self.v[i].clone());
                if left != right {
                    return fail(format!("m_{j} p_{i}({j}) != v_{i} q_{j}({i})"));
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The diameter `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> &BigInt {
        &self.size
    }

    pub fn size_rational(&self) -> BigRational {
        BigRational::from_integer(self.size.clone())
    }

    pub fn valency(&self, i: usize) -> &BigInt {
        &self.v[i]
    }

    pub fn valencies(&self) -> &[BigInt] {
        &self.v
    }

    pub fn multiplicity(&self, i: usize) -> &BigInt {
        &self.m[i]
    }

    pub fn multiplicities(&self) -> &[BigInt] {
        &self.m
    }

    /// `p_i(j)`.
    pub fn p(&self, i: usize, j: usize) -> &BigRational {
        &self.p[i][j]
    }

    /// `q_i(j)`.
    pub fn q(&self, i: usize, j: usize) -> &BigRational {
        &self.q[i][j]
    }

    /// Row `i` of `P`, that is `j -> p_i(j)`.
    pub fn p_row(&self, i: usize) -> RadialFunction {
        RadialFunction(self.p[i].clone())
    }

    /// Row `i` of `Q`, that is `j -> q_i(j)`.
    pub fn q_row(&self, i: usize) -> RadialFunction {
        RadialFunction(self.q[i].clone())
    }

    pub fn is_exact(&self) -> bool {
        true
    }

    pub fn is_q_polynomial(&self) -> bool {
        self.q_polynomial
    }

    fn row_index(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    fn intersection_row(&self, i: usize, j: usize) -> &[BigRational] {
        self.intersection_rows[self.row_index(i, j)].get_or_init(|| {
            let width = self.n + 1;
            let weights: Vec<BigRational> = (0..width).map(|m| &self.p[i][m] * &self.p[j][m]).collect();
            let size = self.size_rational();
            (0..width)
                .map(|k| weights.iter().enumerate().map(|(m, w)| w * &self.q[m][k]).sum::<BigRational>() / &size)
                .collect()
        })
    }

    fn krein_row(&self, i: usize, j: usize) -> &[BigRational] {
        self.krein_rows[self.row_index(i, j)].get_or_init(|| {
            let width = self.n + 1;
            let weights: Vec<BigRational> = (0..width).map(|m| &self.q[i][m] * &self.q[j][m]).collect();
            let size = self.size_rational();
            (0..width)
                .map(|k| weights.iter().enumerate().map(|(m, w)| w * &self.p[m][k]).sum::<BigRational>() / &size)
                .collect()
        })
    }

    /// `p_{i,j}^k = (1/|X|) sum_m p_i(m) p_j(m) q_m(k)`.
    pub fn intersection_number(&self, i: usize, j: usize, k: usize) -> BigRational {
        self.intersection_row(i, j)[k].clone()
    }

    /// `q_{i,j}^k = (1/|X|) sum_m q_i(m) q_j(m) p_m(k)`.
    pub fn krein_parameter(&self, i: usize, j: usize, k: usize) -> BigRational {
        self.krein_row(i, j)[k].clone()
    }

    /// Full materialisation of the Krein parameters.
    pub fn krein_table(&self) -> KreinTable {
        let width = self.n + 1;
        let mut entries = Vec::with_capacity(width * width * width);
        for i in 0..width {
            for j in 0..width {
                entries.extend(self.krein_row(i, j).iter().cloned());
            }
        }
        KreinTable { n: self.n, entries }
    }

    /// Exact Q-polynomiality test on the Krein table.
    pub fn check_q_polynomial(&self) -> Result<(), QPolynomialViolation> {
        match self.krein_table().q_polynomial_violation() {
            Some(v) => Err(v),
            None => Ok(()),
        }
    }

    fn check_len(&self, f: &RadialFunction) -> Result<(), ParamError> {
        if f.len() != self.n + 1 {
            return Err(ParamError::LengthMismatch { expected: self.n + 1, found: f.len() });
        }
        Ok(())
    }

    /// `hat(f)(x) = sum_y f(y) p_y(x)`.
    pub fn hat(&self, f: &RadialFunction) -> Result<RadialFunction, ParamError> {
        self.check_len(f)?;
        let width = self.n + 1;
        Ok(RadialFunction(
            (0..width)
                .map(|x| f.0.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(y, v)| v * &self.p[y][x]).sum())
                .collect(),
        ))
    }

    /// `tilde(f)(x) = (1/|X|) sum_y f(y) q_y(x)`.
    pub fn tilde(&self, f: &RadialFunction) -> Result<RadialFunction, ParamError> {
        self.check_len(f)?;
        let width = self.n + 1;
        let size = self.size_rational();
        Ok(RadialFunction(
            (0..width)
                .map(|x| {
                    f.0.iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(y, v)| v * &self.q[y][x])
                        .sum::<BigRational>()
                        / &size
                })
                .collect(),
        ))
    }

    fn convolve<'a>(
        &'a self,
        f: &RadialFunction,
        g: &RadialFunction,
        row: impl Fn(usize, usize) -> &'a [BigRational],
    ) -> Result<RadialFunction, ParamError> {
        self.check_len(f)?;
        self.check_len(g)?;
        let width = self.n + 1;
        let mut out = vec![BigRational::zero(); width];
        for (y, fy) in f.0.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (z, gz) in g.0.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let weight = fy * gz;
                for (slot, coeff) in out.iter_mut().zip(row(y, z)) {
                    if !coeff.is_zero() {
                        *slot += &weight * coeff;
                    }
                }
            }
        }
        Ok(RadialFunction(out))
    }

    /// `(f star g)(x) = sum_{y,z} f(y) g(z) p_{y,z}^x`.
    pub fn star(&self, f: &RadialFunction, g: &RadialFunction) -> Result<RadialFunction, ParamError> {
        self.convolve(f, g, |y, z| self.intersection_row(y, z))
    }

    /// `(f ostar g)(x) = (1/|X|) sum_{y,z} f(y) g(z) q_{y,z}^x`.
    pub fn ostar(&self, f: &RadialFunction, g: &RadialFunction) -> Result<RadialFunction, ParamError> {
        let raw = self.convolve(f, g, |y, z| self.krein_row(y, z))?;
        Ok(raw.scale(&(BigRational::one() / self.size_rational())))
    }
}

/// All Krein parameters `q_{i,j}^k` of a scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KreinTable {
    n: usize,
    entries: Vec<BigRational>,
}

impl KreinTable {
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let width = self.n + 1;
        (i * width + j) * width + k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.entries[self.index(i, j, k)]
    }

    /// A copy with one entry overwritten.
    pub fn with_entry(&self, i: usize, j: usize, k: usize, value: BigRational) -> Self {
        let mut out = self.clone();
        let idx = out.index(i, j, k);
        out.entries[idx] = value;
        out
    }

    pub fn min_entry(&self) -> BigRational {
        self.entries.iter().min().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn q_polynomial_violation(&self) -> Option<QPolynomialViolation> {
        let n = self.n;
        for i in 0..=n {
            for j in 0..=n {
                for k in i + j + 1..=n {
                    if !self.get(i, j, k).is_zero() {
                        return Some(QPolynomialViolation::Vanishing { i, j, k });
                    }
                }
            }
        }
        (0..n).find(|&k| self.get(1, k, k + 1).is_zero()).map(|k| QPolynomialViolation::Degenerate { k })
    }
}

/// An exact rational function on `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadialFunction(Vec<BigRational>);

impl RadialFunction {
    pub fn new(values: Vec<BigRational>) -> Self {
        Self(values)
    }

    pub fn from_integers<I: Into<BigInt>>(values: impl IntoIterator<Item = I>) -> Self {
        Self(values.into_iter().map(|v| BigRational::from_integer(v.into())).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![BigRational::zero(); n + 1])
    }

    /// `1_{u}` on `0..=n`.
    pub fn indicator(n: usize, u: usize) -> Self {
        let mut out = Self::zeros(n);
        out.0[u] = BigRational::one();
        out
    }

    /// `1_{<= radius}` on `0..=n`.
    pub fn ball(n: usize, radius: usize) -> Self {
        Self((0..=n).map(|x| if x <= radius { BigRational::one() } else { BigRational::zero() }).collect())
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn into_values(self) -> Vec<BigRational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: usize) -> &BigRational {
        &self.0[x]
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|v| !v.is_negative())
    }
}

impl Index<usize> for RadialFunction {
    type Output = BigRational;

    fn index(&self, x: usize) -> &BigRational {
        &self.0[x]
    }
}

impl fmt::Display for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A nonempty set of distinct points of a metric space.
#[derive(Debug, Clone)]
pub struct Code<'a, M: FiniteMetric + ?Sized> {
    space: &'a M,
    members: Vec<usize>,
}

impl<'a, M: FiniteMetric + ?Sized> Code<'a, M> {
    pub fn new(space: &'a M, members: Vec<usize>) -> Result<Self, ParamError> {
        if members.is_empty() {
            return Err(ParamError::EmptyCode);
        }
        let mut seen = std::collections::HashSet::with_capacity(members.len());
        for &x in &members {
            if x >= space.len() {
                return Err(ParamError::PointOutOfRange(x));
            }
            if !seen.insert(x) {
                return Err(ParamError::DuplicatePoint(x));
            }
        }
        Ok(Self { space, members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Distance distribution and its dual, using `params` for the
    /// transform.
    pub fn distance_distribution(&self, params: &SchemeParameters) -> Result<DistanceDistribution, ParamError> {
        let n = self.space.diameter();
        if n != params.n() {
            return Err(ParamError::LengthMismatch { expected: params.n() + 1, found: n + 1 });
        }
        let mut counts = vec![0u64; n + 1];
        for &x in &self.members {
            for &y in &self.members {
                counts[self.space.distance(x, y)] += 1;
            }
        }
        let code_size = rational(self.members.len() as u64);
        let a = RadialFunction(counts.into_iter().map(|c| rational(c) / &code_size).collect());
        let transform = RadialFunction(
            (0..=n).map(|t| a.0.iter().enumerate().map(|(x, ax)| ax * params.q(t, x)).sum()).collect(),
        );
        let dual = transform.scale(&(BigRational::one() / params.size_rational()));
        let min_distance = (1..=n).find(|&t| !a.0[t].is_zero());
        Ok(DistanceDistribution { a, dual, transform, min_distance })
    }
}

/// `a(t)` and `a'(t)` of a code, normalised so that `a(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceDistribution {
    pub a: RadialFunction,
    /// `a'(t) = (1/|X|) sum_x q_t(x) a(x)`
    pub dual: RadialFunction,
    /// `sum_x q_t(x) a(x)`, that is `|X| a'(t)`.
    pub transform: RadialFunction,
    /// Smallest nonzero distance, absent for a single point.
    pub min_distance: Option<usize>,
}

impl DistanceDistribution {
    pub fn code_size(&self) -> BigRational {
        self.a.values().iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::scheme::{ExplicitScheme, HammingSpace};

    fn ints(values: &[i64]) -> RadialFunction {
        RadialFunction::from_integers(values.iter().copied())
    }

    #[test]
    fn hamming_examples() {
        let params = hamming_parameters(7, 2).unwrap();
        assert_eq!(params.valencies(), [1, 7, 21, 35, 35, 21, 7, 1].map(BigInt::from).as_slice());
        assert_eq!(params.size(), &BigInt::from(128));
        assert_eq!(hamming_parameters(2, 3).unwrap().q_row(1), ints(&[4, 1, -2]));
        assert!(hamming_parameters(0, 2).is_err());
        assert!(hamming_parameters(3, 1).is_err());
    }

    #[test]
    fn hamming_pq_is_scaled_identity() {
        let params = hamming_parameters(3, 2).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let entry: BigRational = (0..4).map(|j| params.p(i, j) * params.q(j, k)).sum();
                assert_eq!(entry, rational(if i == k { 8 } else { 0 }));
            }
        }
    }

    #[test]
    fn binary_hamming_is_self_dual() {
        for n in 1..=10 {
            let params = hamming_parameters(n, 2).unwrap();
            for i in 0..=n as usize {
                assert_eq!(params.p_row(i), params.q_row(i));
            }
        }
    }

    #[test]
    fn johnson_examples() {
        let params = johnson_parameters(4, 2).unwrap();
        assert_eq!(params.size(), &BigInt::from(6));
        assert_eq!(params.valencies(), [1, 4, 1].map(BigInt::from).as_slice());
        assert_eq!(params.multiplicities(), [1, 3, 2].map(BigInt::from).as_slice());
        assert_eq!(params.q_row(1), ints(&[3, 0, -3]));
        assert!(johnson_parameters(4, 3).is_err());
        assert!(johnson_parameters(4, 0).is_err());
    }

    #[test]
    fn johnson_inversion_respects_duality() {
        let params = johnson_parameters(5, 2).unwrap();
        for j in 0..=2 {
            let left = params.p(1, j) * BigRational::from_integer(params.multiplicity(j).clone());
            let right = params.q(j, 1) * BigRational::from_integer(params.valency(1).clone());
            assert_eq!(left, right);
        }
    }

    #[test]
    fn johnson_p_numbers_are_integers() {
        for n in 2..=12u64 {
            for a in 1..=n / 2 {
                let params = johnson_parameters(n, a).unwrap();
                for i in 0..=a as usize {
                    for j in 0..=a as usize {
                        assert!(params.p(i, j).is_integer(), "n={n} a={a} p_{i}({j})");
                    }
                }
                // p_1(j) is the D_1 eigenvalue (a-j)(n-a-j) - j
                for j in 0..=a {
                    let expected = (a - j) as i64 * (n - a - j) as i64 - j as i64;
                    assert_eq!(params.p(1, j as usize), &rational(expected));
                }
            }
        }
    }

    #[test]
    fn from_tables_rejects_broken_identities() {
        let params = hamming_parameters(2, 2).unwrap();
        let p: Vec<Vec<BigRational>> = (0..3).map(|i| params.p_row(i).into_values()).collect();
        let q: Vec<Vec<BigRational>> = (0..3).map(|i| params.q_row(i).into_values()).collect();
        let v = params.valencies().to_vec();
        let m = params.multiplicities().to_vec();
        let rebuilt = SchemeParameters::from_tables(BigInt::from(4), v.clone(), m.clone(), p.clone(), q.clone()).unwrap();
        assert!(rebuilt.is_q_polynomial());
        let mut broken = p.clone();
        broken[1][2] = rational(-1);
        assert!(matches!(
            SchemeParameters::from_tables(BigInt::from(4), v, m, broken, q),
            Err(ParamError::Identity(_))
        ));
    }

    #[test]
    fn intersection_examples() {
        let params = hamming_parameters(3, 2).unwrap();
        assert_eq!(params.intersection_number(1, 1, 0), rational(3));
        // brute force: midpoints y of 000 and 011 at distance 1 from both
        let space = HammingSpace::new(3, 2).unwrap();
        let midpoints = (0..8).filter(|&y| space.distance(0, y) == 1 && space.distance(y, 3) == 1).count();
        assert_eq!(params.intersection_number(1, 1, 2), rational(midpoints as i64));
    }

    #[test]
    fn intersection_numbers_match_explicit_counts() {
        for (scheme, params) in [
            (ExplicitScheme::hamming(4, 2).unwrap(), hamming_parameters(4, 2).unwrap()),
            (ExplicitScheme::hamming(3, 3).unwrap(), hamming_parameters(3, 3).unwrap()),
            (ExplicitScheme::johnson(6, 3).unwrap(), johnson_parameters(6, 3).unwrap()),
        ] {
            let table = crate::scheme::validate_scheme(&scheme).unwrap();
            let n = params.n();
            for i in 0..=n {
                for j in 0..=n {
                    for k in 0..=n {
                        assert_eq!(params.intersection_number(i, j, k), rational(table.get(i, j, k)));
                    }
                }
            }
        }
    }

    #[test]
    fn intersection_triangle_vanishing() {
        for n in 1..=8u64 {
            for params in [hamming_parameters(n, 2).unwrap(), hamming_parameters(n, 3).unwrap()] {
                let n = params.n();
                for i in 0..=n {
                    for j in 0..=n {
                        for k in 0..=n {
                            let value = params.intersection_number(i, j, k);
                            assert!(value.is_integer() && !value.is_negative());
                            if k > i + j || i.abs_diff(j) > k {
                                assert!(value.is_zero());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn krein_examples() {
        let params = hamming_parameters(3, 2).unwrap();
        assert_eq!(params.krein_parameter(1, 1, 0), rational(3));
        let johnson = johnson_parameters(4, 2).unwrap();
        let total: BigRational = (0..=2).map(|y| johnson.krein_parameter(y, 1, 2)).sum();
        assert_eq!(total, rational(3));
        let table = hamming_parameters(4, 2).unwrap().krein_table();
        assert!(!table.min_entry().is_negative());
    }

    #[test]
    fn q_polynomial_checks() {
        assert_eq!(hamming_parameters(6, 2).unwrap().check_q_polynomial(), Ok(()));
        assert_eq!(johnson_parameters(6, 3).unwrap().check_q_polynomial(), Ok(()));
        let table = hamming_parameters(6, 2).unwrap().krein_table();
        let perturbed = table.with_entry(1, 1, 5, ratio(1, 7));
        assert_eq!(perturbed.q_polynomial_violation(), Some(QPolynomialViolation::Vanishing { i: 1, j: 1, k: 5 }));
        let degenerate = table.with_entry(1, 2, 3, BigRational::zero());
        assert_eq!(degenerate.q_polynomial_violation(), Some(QPolynomialViolation::Degenerate { k: 2 }));
    }

    #[test]
    fn transforms_of_indicators() {
        let params = hamming_parameters(5, 3).unwrap();
        let size = params.size_rational();
        for u in 0..=5 {
            let e = RadialFunction::indicator(5, u);
            assert_eq!(params.hat(&e).unwrap(), params.p_row(u));
            assert_eq!(params.tilde(&e).unwrap(), params.q_row(u).scale(&(BigRational::one() / &size)));
        }
        let wrong = RadialFunction::zeros(3);
        assert!(matches!(params.hat(&wrong), Err(ParamError::LengthMismatch { .. })));
    }

    #[test]
    fn convolution_examples() {
        let params = hamming_parameters(7, 2).unwrap();
        let delta = RadialFunction::indicator(7, 0);
        assert_eq!(params.star(&delta, &delta).unwrap(), delta);
        let ball = RadialFunction::ball(7, 1);
        assert_eq!(params.star(&ball, &ball).unwrap()[0], rational(8));
    }

    #[test]
    fn distance_distribution_examples() {
        let space = HammingSpace::new(3, 2).unwrap();
        let params = hamming_parameters(3, 2).unwrap();
        let single = Code::new(&space, vec![5]).unwrap().distance_distribution(&params).unwrap();
        assert_eq!(single.a, ints(&[1, 0, 0, 0]));
        assert_eq!(single.dual, RadialFunction::from_integers([1, 3, 3, 1]).scale(&ratio(1, 8)));
        assert_eq!(single.min_distance, None);

        let whole = Code::new(&space, (0..8).collect()).unwrap().distance_distribution(&params).unwrap();
        assert_eq!(whole.a, ints(&[1, 3, 3, 1]));
        assert_eq!(whole.transform, ints(&[8, 0, 0, 0]));
        assert_eq!(whole.dual, ints(&[1, 0, 0, 0]));
        assert_eq!(whole.code_size(), rational(8));
        assert_eq!(whole.min_distance, Some(1));

        assert!(matches!(Code::new(&space, vec![]), Err(ParamError::EmptyCode)));
        assert!(matches!(Code::new(&space, vec![1, 1]), Err(ParamError::DuplicatePoint(1))));
        assert!(matches!(Code::new(&space, vec![8]), Err(ParamError::PointOutOfRange(8))));
    }
}
