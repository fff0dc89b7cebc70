//! Explicit finite metric spaces and the association-scheme axioms.
//!
//! This is the brute-force side of the library. It builds adjacency matrices
//! from a distance matrix, checks the equipartition property, and recovers the
//! scheme parameters numerically from an eigendecomposition of `D_1`. The
//! closed-form families in [`crate::params`] are validated against it.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{rational, Polynomial};
use crate::params::QPolynomialViolation;

/// Largest point set the dense engine accepts.
pub const MAX_EXPLICIT_SIZE: usize = 4096;

const CLUSTER_TOLERANCE: f64 = 1e-6;
const IDENTITY_TOLERANCE: f64 = 1e-9;
const TRACE_TOLERANCE: f64 = 1e-6;
const KREIN_ZERO_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("distance matrix is not symmetric at line {line}, column {column}: {value} but the transposed entry is {transposed}")]
    NotSymmetric { line: usize, column: usize, value: usize, transposed: usize },
    #[error("scheme size {0} outside [2, {MAX_EXPLICIT_SIZE}]")]
    Size(usize),
    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength { row: usize, found: usize, expected: usize },
    #[error("nonzero diagonal entry at point {0}")]
    NonZeroDiagonal(usize),
    #[error("distinct points {0} and {1} are at distance 0")]
    ZeroDistance(usize, usize),
    #[error("distance {value} between points {x} and {y} exceeds the diameter {max}")]
    DistanceOutOfRange { x: usize, y: usize, value: usize, max: usize },
    #[error("distance {0} never occurs, so the diameter is not tight")]
    MissingDistance(usize),
    #[error("triangle inequality fails for points {x}, {y}, {z}")]
    Triangle { x: usize, y: usize, z: usize },
    #[error(
        "equipartition fails for (i, j, k) = ({i}, {j}, {k}): pair {first:?} sees {first_count} midpoints, pair {second:?} sees {second_count}"
    )]
    EquipartitionViolation {
        i: usize,
        j: usize,
        k: usize,
        first: (usize, usize),
        first_count: u64,
        second: (usize, usize),
        second_count: u64,
    },
    #[error("degenerate scheme: p[1][{k}][{next}] vanishes", next = k + 1)]
    DegenerateScheme { k: usize },
    #[error("D_{i} D_{j} disagrees with the intersection table at entry ({x}, {z}): {found} vs {expected}")]
    ProductMismatch { i: usize, j: usize, x: usize, z: usize, found: u64, expected: u64 },
    #[error("found {found} eigenvalue clusters of D_1, expected {expected}")]
    SpectralAmbiguity { found: usize, expected: usize },
    #[error("trace of E_{index} is {trace}, not within tolerance of an integer")]
    MultiplicityExtraction { index: usize, trace: f64 },
    #[error("{identity} fails with deviation {deviation:e}")]
    IdentityCheck { identity: &'static str, deviation: f64 },
    #[error("P_{index}(D_1) differs from D_{index} at entry ({x}, {z})")]
    PolynomialMismatch { index: usize, x: usize, z: usize },
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
}

/// A finite set of points `0..len()` with an integer-valued metric.
pub trait FiniteMetric: Sync {
    fn len(&self) -> usize;
    fn diameter(&self) -> usize;
    fn distance(&self, x: usize, y: usize) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `F_q^n` with the Hamming distance; points are base-`q` integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HammingSpace {
    n: usize,
    q: usize,
    len: usize,
}

impl HammingSpace {
    pub fn new(n: usize, q: usize) -> Result<Self, SchemeError> {
        if n == 0 || q < 2 {
            return Err(SchemeError::InvalidFamily(format!("hamming n={n}, q={q}")));
        }
        let len = u32::try_from(n)
            .ok()
            .and_then(|e| q.checked_pow(e))
            .ok_or_else(|| SchemeError::InvalidFamily(format!("q^n overflows for n={n}, q={q}")))?;
        Ok(Self { n, q, len })
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.q
    }
}

impl FiniteMetric for HammingSpace {
    fn len(&self) -> usize {
        self.len
    }

    fn diameter(&self) -> usize {
        self.n
    }

    fn distance(&self, x: usize, y: usize) -> usize {
        if self.q == 2 {
            return (x ^ y).count_ones() as usize;
        }
        let (mut x, mut y, mut count) = (x, y, 0);
        for _ in 0..self.n {
            if x % self.q != y % self.q {
                count += 1;
            }
            x /= self.q;
            y /= self.q;
        }
        count
    }
}

/// Weight-`a` binary words of length `n`, ascending as integers.
pub fn johnson_words(n: usize, a: usize) -> Vec<u64> {
    let mut words = Vec::new();
    if a > n || n > 63 {
        return words;
    }
    let mut word: u64 = (1u64 << a) - 1;
    let limit = 1u64 << n;
    if a == 0 {
        return vec![0];
    }
    while word < limit {
        words.push(word);
        // next integer with the same popcount
        let low = word & word.wrapping_neg();
        let ripple = word + low;
        word = ripple | (((word ^ ripple) >> 2) / low);
    }
    words
}

/// A finite point set together with its full distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitScheme {
    size: usize,
    diameter: usize,
    dist: Vec<u16>,
}

impl ExplicitScheme {
    /// Build from the rows of a distance matrix; the diameter is the largest
    /// entry.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, SchemeError> {
        let diameter = rows.iter().flatten().copied().max().unwrap_or(0);
        Self::with_diameter(rows, diameter, None)
    }

    pub fn from_metric<M: FiniteMetric + ?Sized>(metric: &M) -> Result<Self, SchemeError> {
        let size = metric.len();
        if !(2..=MAX_EXPLICIT_SIZE).contains(&size) {
            return Err(SchemeError::Size(size));
        }
        let rows = (0..size)
            .map(|x| (0..size).map(|y| metric.distance(x, y)).collect())
            .collect();
        Self::with_diameter(rows, metric.diameter(), None)
    }

    pub fn hamming(n: usize, q: usize) -> Result<Self, SchemeError> {
        Self::from_metric(&HammingSpace::new(n, q)?)
    }

    /// Weight-`a` words of length `n` under half the Hamming distance.
    pub fn johnson(n: usize, a: usize) -> Result<Self, SchemeError> {
        if a == 0 || 2 * a > n || n > 63 {
            return Err(SchemeError::InvalidFamily(format!("johnson n={n}, a={a}")));
        }
        let words = johnson_words(n, a);
        if words.len() > MAX_EXPLICIT_SIZE {
            return Err(SchemeError::Size(words.len()));
        }
        let rows = words
            .iter()
            .map(|x| words.iter().map(|y| (x ^ y).count_ones() as usize / 2).collect())
            .collect();
        Self::with_diameter(rows, a, None)
    }

    /// Parse the text format: a header line `<size> <diameter>` followed by
    /// `size` rows of `size` integers. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SchemeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let parse_number = |token: &str, line: usize, what: &str| {
            token.parse::<usize>().map_err(|_| SchemeError::Parse {
                line,
                message: format!("expected a nonnegative integer for {what}, found `{token}`"),
            })
        };

        let (header_line, header) = lines.next().ok_or(SchemeError::Parse {
            line: 1,
            message: "missing header `<size> <diameter>`".into(),
        })?;
        let header: Vec<&str> = header.split_whitespace().collect();
        if header.len() != 2 {
            return Err(SchemeError::Parse {
                line: header_line,
                message: format!("header must have 2 fields, found {}", header.len()),
            });
        }
        let size = parse_number(header[0], header_line, "the size")?;
        let diameter = parse_number(header[1], header_line, "the diameter")?;
        if !(2..=MAX_EXPLICIT_SIZE).contains(&size) {
            return Err(SchemeError::Size(size));
        }

        let mut rows = Vec::with_capacity(size);
        let mut row_lines = Vec::with_capacity(size);
        for row in 0..size {
            let (line, content) = lines.next().ok_or(SchemeError::Parse {
                line: text.lines().count().max(1),
                message: format!("expected {size} matrix rows, found {row}"),
            })?;
            let entries = content
                .split_whitespace()
                .enumerate()
                .map(|(col, tok)| {
                    let value = parse_number(tok, line, "a distance")?;
                    if value > diameter {
                        return Err(SchemeError::Parse {
                            line,
                            message: format!("column {}: distance {value} exceeds the diameter {diameter}", col + 1),
                        });
                    }
                    Ok(value)
                })
                .collect::<Result<Vec<_>, _>>()?;
            if entries.len() != size {
                return Err(SchemeError::Parse {
                    line,
                    message: format!("row has {} entries, expected {size}", entries.len()),
                });
            }
            rows.push(entries);
            row_lines.push(line);
        }
        if let Some((line, _)) = lines.next() {
            return Err(SchemeError::Parse { line, message: "unexpected data after the matrix".into() });
        }
        Self::with_diameter(rows, diameter, Some(&row_lines))
    }

    fn with_diameter(
        rows: Vec<Vec<usize>>,
        diameter: usize,
        row_lines: Option<&[usize]>,
    ) -> Result<Self, SchemeError> {
        let size = rows.len();
        if !(2..=MAX_EXPLICIT_SIZE).contains(&size) {
            return Err(SchemeError::Size(size));
        }
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != size {
                return Err(SchemeError::RowLength { row, found: entries.len(), expected: size });
            }
        }
        #[allow(clippy::needless_range_loop)]
        for x in 0..size {
            for y in x + 1..size {
                if rows[x][y] != rows[y][x] {
                    let line = row_lines.map_or(x + 1, |l| l[x]);
                    return Err(SchemeError::NotSymmetric {
                        line,
                        column: y + 1,
                        value: rows[x][y],
                        transposed: rows[y][x],
                    });
                }
            }
        }
        let mut seen = vec![false; diameter + 1];
        for (x, entries) in rows.iter().enumerate() {
            for (y, &value) in entries.iter().enumerate() {
                if value > diameter {
                    return Err(SchemeError::DistanceOutOfRange { x, y, value, max: diameter });
                }
                if x == y && value != 0 {
                    return Err(SchemeError::NonZeroDiagonal(x));
                }
                if x != y && value == 0 {
                    return Err(SchemeError::ZeroDistance(x, y));
                }
                seen[value] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(SchemeError::MissingDistance(missing));
        }
        let dist: Vec<u16> = rows
            .into_iter()
            .flatten()
            .map(|v| u16::try_from(v).map_err(|_| SchemeError::InvalidFamily(format!("distance {v} too large"))))
            .collect::<Result<_, _>>()?;
        let scheme = Self { size, diameter, dist };
        scheme.check_triangle()?;
        Ok(scheme)
    }

    fn check_triangle(&self) -> Result<(), SchemeError> {
        let size = self.size;
        let violation = (0..size).into_par_iter().find_map_first(|x| {
            let row_x = &self.dist[x * size..(x + 1) * size];
            for y in 0..size {
                let row_y = &self.dist[y * size..(y + 1) * size];
                let via = row_x[y];
                for z in 0..size {
                    if row_x[z] > via + row_y[z] {
                        return Some(SchemeError::Triangle { x, y, z });
                    }
                }
            }
            None
        });
        violation.map_or(Ok(()), Err)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn distance(&self, x: usize, y: usize) -> usize {
        self.dist[x * self.size + y] as usize
    }

    fn row(&self, x: usize) -> &[u16] {
        &self.dist[x * self.size..(x + 1) * self.size]
    }

    pub fn adjacency(&self) -> AdjacencySet {
        AdjacencySet::new(self)
    }
}

impl FiniteMetric for ExplicitScheme {
    fn len(&self) -> usize {
        self.size
    }

    fn diameter(&self) -> usize {
        self.diameter
    }

    fn distance(&self, x: usize, y: usize) -> usize {
        ExplicitScheme::distance(self, x, y)
    }
}

/// The 0/1 matrices `D_0, ..., D_n`, stored as packed bit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencySet {
    scheme: ExplicitScheme,
    words: usize,
    bits: Vec<Vec<u64>>,
}

impl AdjacencySet {
    pub fn new(scheme: &ExplicitScheme) -> Self {
        let size = scheme.size;
        let words = size.div_ceil(64);
        let mut bits = vec![vec![0u64; size * words]; scheme.diameter + 1];
        for x in 0..size {
            for (y, &d) in scheme.row(x).iter().enumerate() {
                bits[d as usize][x * words + y / 64] |= 1 << (y % 64);
            }
        }
        Self { scheme: scheme.clone(), words, bits }
    }

    pub fn scheme(&self) -> &ExplicitScheme {
        &self.scheme
    }

    pub fn size(&self) -> usize {
        self.scheme.size
    }

    pub fn diameter(&self) -> usize {
        self.scheme.diameter
    }

    pub fn entry(&self, i: usize, x: usize, y: usize) -> bool {
        self.bits[i][x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    fn bit_row(&self, i: usize, x: usize) -> &[u64] {
        &self.bits[i][x * self.words..(x + 1) * self.words]
    }

    /// `(D_i D_j)(x, z)`, which counts the `y` with `d(x,y) = i` and `d(y,z) = j`.
    pub fn product_entry(&self, i: usize, j: usize, x: usize, z: usize) -> u64 {
        // D_j is symmetric, so its column z is its row z.
        self.bit_row(i, x)
            .iter()
            .zip(self.bit_row(j, z))
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    /// The exact integer matrix `D_i D_j`.
    pub fn product(&self, i: usize, j: usize) -> Vec<Vec<u64>> {
        let size = self.size();
        (0..size)
            .map(|x| (0..size).map(|z| self.product_entry(i, j, x, z)).collect())
            .collect()
    }

    /// Number of points at distance `i` from point 0.
    pub fn valency(&self, i: usize) -> u64 {
        self.bit_row(i, 0).iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn dense(&self, i: usize) -> DMatrix<f64> {
        let size = self.size();
        DMatrix::from_fn(size, size, |x, y| if self.entry(i, x, y) { 1.0 } else { 0.0 })
    }
}

/// The intersection numbers `p_{i,j}^k` of a validated scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTable {
    diameter: usize,
    entries: Vec<u64>,
}

impl IntersectionTable {
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let width = self.diameter + 1;
        (i * width + j) * width + k
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.entries[self.index(i, j, k)]
    }

    /// A copy with one entry overwritten.
    pub fn with_entry(&self, i: usize, j: usize, k: usize, value: u64) -> Self {
        let mut out = self.clone();
        let idx = out.index(i, j, k);
        out.entries[idx] = value;
        out
    }
}

fn midpoint_histogram(scheme: &ExplicitScheme, x: usize, z: usize) -> Vec<u64> {
    let width = scheme.diameter + 1;
    let mut hist = vec![0u64; width * width];
    for (&dxy, &dyz) in scheme.row(x).iter().zip(scheme.row(z)) {
        hist[dxy as usize * width + dyz as usize] += 1;
    }
    hist
}

/// Check the equipartition property and non-degeneracy, returning the
/// intersection numbers.
pub fn validate_scheme(scheme: &ExplicitScheme) -> Result<IntersectionTable, SchemeError> {
    let size = scheme.size;
    let width = scheme.diameter + 1;

    let mut witnesses: Vec<Option<(usize, usize)>> = vec![None; width];
    let mut missing = width;
    'scan: for x in 0..size {
        for z in 0..size {
            let k = scheme.distance(x, z);
            if witnesses[k].is_none() {
                witnesses[k] = Some((x, z));
                missing -= 1;
                if missing == 0 {
                    break 'scan;
                }
            }
        }
    }
    let witnesses: Vec<(usize, usize)> = witnesses.into_iter().map(|w| w.expect("diameter is tight")).collect();
    let reference: Vec<Vec<u64>> = witnesses.iter().map(|&(x, z)| midpoint_histogram(scheme, x, z)).collect();

    let violation = (0..size).into_par_iter().find_map_first(|x| {
        for z in 0..size {
            let k = scheme.distance(x, z);
            let hist = midpoint_histogram(scheme, x, z);
            if hist != reference[k] {
                let slot = (0..hist.len()).find(|&s| hist[s] != reference[k][s]).unwrap();
                return Some(SchemeError::EquipartitionViolation {
                    i: slot / width,
                    j: slot % width,
                    k,
                    first: witnesses[k],
                    first_count: reference[k][slot],
                    second: (x, z),
                    second_count: hist[slot],
                });
            }
        }
        None
    });
    if let Some(err) = violation {
        return Err(err);
    }

    let mut entries = vec![0u64; width * width * width];
    for i in 0..width {
        for j in 0..width {
            for (k, hist) in reference.iter().enumerate() {
                entries[(i * width + j) * width + k] = hist[i * width + j];
            }
        }
    }
    let table = IntersectionTable { diameter: scheme.diameter, entries };
    if let Some(k) = (0..scheme.diameter).find(|&k| table.get(1, k, k + 1) == 0) {
        return Err(SchemeError::DegenerateScheme { k });
    }
    Ok(table)
}

/// Verify `D_i D_j = sum_k p_{i,j}^k D_k` entry by entry, as integer matrices.
pub fn adjacency_product_check(adj: &AdjacencySet, table: &IntersectionTable) -> Result<(), SchemeError> {
    let width = adj.diameter() + 1;
    let size = adj.size();
    let pairs: Vec<(usize, usize)> = (0..width).flat_map(|i| (0..width).map(move |j| (i, j))).collect();
    let mismatch = pairs.into_par_iter().find_map_first(|(i, j)| {
        for x in 0..size {
            for z in 0..size {
                let found = adj.product_entry(i, j, x, z);
                let expected = table.get(i, j, adj.scheme().distance(x, z));
                if found != expected {
                    return Some(SchemeError::ProductMismatch { i, j, x, z, found, expected });
                }
            }
        }
        None
    });
    mismatch.map_or(Ok(()), Err)
}

/// Eigenvalues of `D_1` and the matching orthogonal projectors, with
/// `E_0 = J/|X|` first and the rest by decreasing eigenvalue.
#[derive(Debug, Clone)]
pub struct SchemeSpectrum {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<DMatrix<f64>>,
}

impl SchemeSpectrum {
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn spectral_decomposition(adj: &AdjacencySet) -> Result<SchemeSpectrum, SchemeError> {
    let size = adj.size();
    let expected = adj.diameter() + 1;
    let eigen = SymmetricEigen::new(adj.dense(1));

    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(cluster)
                if eigen.eigenvalues[*cluster.last().unwrap()] - eigen.eigenvalues[idx] <= CLUSTER_TOLERANCE =>
            {
                cluster.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }
    if clusters.len() != expected || clusters[0].len() != 1 {
        return Err(SchemeError::SpectralAmbiguity { found: clusters.len(), expected });
    }

    let mut eigenvalues = Vec::with_capacity(expected);
    let mut projectors = Vec::with_capacity(expected);
    eigenvalues.push(eigen.eigenvalues[clusters[0][0]]);
    projectors.push(DMatrix::from_element(size, size, 1.0 / size as f64));
    for cluster in &clusters[1..] {
        let mean = cluster.iter().map(|&c| eigen.eigenvalues[c]).sum::<f64>() / cluster.len() as f64;
        let basis = eigen.eigenvectors.select_columns(cluster.iter());
        eigenvalues.push(mean);
        projectors.push(&basis * basis.transpose());
    }

    let mut total = DMatrix::<f64>::zeros(size, size);
    for e in &projectors {
        total += e;
    }
    let deviation = max_abs(&(total - DMatrix::identity(size, size)));
    if deviation > IDENTITY_TOLERANCE {
        return Err(SchemeError::IdentityCheck { identity: "sum of projectors = I", deviation });
    }
    for i in 0..expected {
        for j in i..expected {
            let product = &projectors[i] * &projectors[j];
            let deviation = if i == j { max_abs(&(product - &projectors[i])) } else { max_abs(&product) };
            if deviation > IDENTITY_TOLERANCE {
                return Err(SchemeError::IdentityCheck { identity: "E_i E_j = delta_ij E_i", deviation });
            }
        }
    }
    Ok(SchemeSpectrum { eigenvalues, projectors })
}

/// Scheme parameters recovered in floating point from a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericParameters {
    pub size: usize,
    pub v: Vec<u64>,
    pub m: Vec<u64>,
    /// `p[i][j] = p_i(j)`.
    pub p: Vec<Vec<f64>>,
    /// `q[j][i] = q_j(i)`.
    pub q: Vec<Vec<f64>>,
}

impl NumericParameters {
    pub fn diameter(&self) -> usize {
        self.v.len() - 1
    }

    /// Largest entry of `|P Q - |X| I|`.
    pub fn pq_deviation(&self) -> f64 {
        let width = self.v.len();
        let mut worst: f64 = 0.0;
        for i in 0..width {
            for k in 0..width {
                let entry: f64 = (0..width).map(|j| self.p[i][j] * self.q[j][k]).sum();
                let target = if i == k { self.size as f64 } else { 0.0 };
                worst = worst.max((entry - target).abs());
            }
        }
        worst
    }

    /// `q_{i,j}^k = (1/|X|) sum_m q_i(m) q_j(m) p_m(k)`.
    pub fn krein(&self, i: usize, j: usize, k: usize) -> f64 {
        let width = self.v.len();
        (0..width).map(|m| self.q[i][m] * self.q[j][m] * self.p[m][k]).sum::<f64>() / self.size as f64
    }

    pub fn min_krein(&self) -> f64 {
        let width = self.v.len();
        let mut least = f64::INFINITY;
        for i in 0..width {
            for j in 0..width {
                for k in 0..width {
                    least = least.min(self.krein(i, j, k));
                }
            }
        }
        least
    }

    /// First violation of the Q-polynomial pattern under the spectral
    /// ordering, if any.
    pub fn q_polynomial_violation(&self) -> Option<QPolynomialViolation> {
        let n = self.diameter();
        for i in 0..=n {
            for j in 0..=n {
                for k in i + j + 1..=n {
                    if self.krein(i, j, k).abs() > KREIN_ZERO_TOLERANCE {
                        return Some(QPolynomialViolation::Vanishing { i, j, k });
                    }
                }
            }
        }
        (0..n)
            .find(|&k| self.krein(1, k, k + 1).abs() <= KREIN_ZERO_TOLERANCE)
            .map(|k| QPolynomialViolation::Degenerate { k })
    }
}

pub fn extract_parameters(adj: &AdjacencySet, spectrum: &SchemeSpectrum) -> Result<NumericParameters, SchemeError> {
    let size = adj.size();
    let width = adj.diameter() + 1;

    let mut m = Vec::with_capacity(width);
    for (index, e) in spectrum.projectors.iter().enumerate() {
        let trace = e.trace();
        let rounded = trace.round();
        if (trace - rounded).abs() > TRACE_TOLERANCE || rounded < 1.0 {
            return Err(SchemeError::MultiplicityExtraction { index, trace });
        }
        m.push(rounded as u64);
    }
    let v: Vec<u64> = (0..width).map(|i| adj.valency(i)).collect();

    // inner[i][j] = <D_i, E_j>
    let mut inner = vec![vec![0.0; width]; width];
    for (j, e) in spectrum.projectors.iter().enumerate() {
        for x in 0..size {
            for z in 0..size {
                inner[adj.scheme().distance(x, z)][j] += e[(x, z)];
            }
        }
    }
    let p = (0..width).map(|i| (0..width).map(|j| inner[i][j] / m[j] as f64).collect()).collect();
    let q = (0..width).map(|j| (0..width).map(|i| inner[i][j] / v[i] as f64).collect()).collect();
    let params = NumericParameters { size, v, m, p, q };

    let deviation = params.pq_deviation();
    if deviation > IDENTITY_TOLERANCE * size as f64 {
        return Err(SchemeError::IdentityCheck { identity: "P Q = |X| I", deviation });
    }
    Ok(params)
}

/// The polynomials `P_i` with `D_i = P_i(D_1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalPPolynomials {
    polys: Vec<Polynomial>,
}

impl FundamentalPPolynomials {
    pub fn get(&self, i: usize) -> &Polynomial {
        &self.polys[i]
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Polynomial> {
        self.polys.iter()
    }

    /// Check `P_i(D_1) = D_i` exactly for every `i`.
    pub fn check_adjacency(&self, adj: &AdjacencySet) -> Result<(), SchemeError> {
        let size = adj.size();
        let neighbours: Vec<Vec<usize>> =
            (0..size).map(|x| (0..size).filter(|&y| adj.entry(1, x, y)).collect()).collect();

        // powers[k] = D_1^k as integer matrices
        let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(self.polys.len());
        powers.push((0..size * size).map(|e| if e / size == e % size { BigInt::one() } else { BigInt::zero() }).collect());
        for _ in 1..self.polys.len() {
            let last = powers.last().unwrap();
            let next: Vec<BigInt> = (0..size * size)
                .into_par_iter()
                .map(|e| {
                    let (x, z) = (e / size, e % size);
                    neighbours[x].iter().map(|&y| &last[y * size + z]).sum()
                })
                .collect();
            powers.push(next);
        }

        for (index, poly) in self.polys.iter().enumerate() {
            let denominator = poly.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let scaled: Vec<BigInt> =
                poly.coeffs().iter().map(|c| (c * BigRational::from_integer(denominator.clone())).to_integer()).collect();
            let failure = (0..size * size).into_par_iter().find_first(|&e| {
                let value: BigInt = scaled.iter().zip(&powers).map(|(c, pw)| c * &pw[e]).sum();
                let target = if adj.scheme().distance(e / size, e % size) == index {
                    denominator.clone()
                } else {
                    BigInt::zero()
                };
                value != target
            });
            if let Some(e) = failure {
                return Err(SchemeError::PolynomialMismatch { index, x: e / size, z: e % size });
            }
        }
        Ok(())
    }
}

/// `P_0 = 1`, `P_1 = X`, `P_{k+1} = (X P_k - p_{1,k}^{k-1} P_{k-1} - p_{1,k}^k P_k) / p_{1,k}^{k+1}`.
pub fn fundamental_p_polynomials(table: &IntersectionTable) -> Result<FundamentalPPolynomials, SchemeError> {
    let n = table.diameter();
    let mut polys = vec![Polynomial::one()];
    if n >= 1 {
        polys.push(Polynomial::x());
    }
    for k in 1..n {
        let divisor = table.get(1, k, k + 1);
        if divisor == 0 {
            return Err(SchemeError::DegenerateScheme { k });
        }
        let back = &polys[k - 1] * &rational(table.get(1, k, k - 1));
        let here = &polys[k] * &rational(table.get(1, k, k));
        let next = &(&polys[k].shift_up() - &back) - &here;
        polys.push(&next * &BigRational::new(BigInt::one(), BigInt::from(divisor)));
    }
    Ok(FundamentalPPolynomials { polys })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn path3() -> ExplicitScheme {
        ExplicitScheme::new(vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]]).unwrap()
    }

    #[test]
    fn johnson_word_enumeration() {
        assert_eq!(johnson_words(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(johnson_words(10, 3).len(), 120);
    }

    #[test]
    fn hamming_space_distances() {
        let space = HammingSpace::new(3, 3).unwrap();
        assert_eq!(space.len(), 27);
        // 0 = 000, 13 = 111, 5 = 012
        assert_eq!(space.distance(0, 13), 3);
        assert_eq!(space.distance(5, 13), 2);
    }

    #[test]
    fn cube_validates() {
        let table = validate_scheme(&ExplicitScheme::hamming(2, 2).unwrap()).unwrap();
        assert_eq!(table.get(1, 1, 0), 2);
    }

    #[test]
    fn johnson_4_2_validates() {
        let scheme = ExplicitScheme::johnson(4, 2).unwrap();
        assert_eq!(scheme.size(), 6);
        assert_eq!(scheme.diameter(), 2);
        let table = validate_scheme(&scheme).unwrap();
        // brute-force neighbour count of the first word
        let neighbours = (0..6).filter(|&y| scheme.distance(0, y) == 1).count() as u64;
        assert_eq!(neighbours, 4);
        assert_eq!(table.get(1, 1, 0), neighbours);
    }

    #[test]
    fn path_metric_fails_equipartition() {
        let err = validate_scheme(&path3()).unwrap_err();
        assert!(matches!(err, SchemeError::EquipartitionViolation { .. }), "{err}");
    }

    #[test]
    fn invariant_violations() {
        assert!(matches!(
            ExplicitScheme::new(vec![vec![0, 1], vec![2, 0]]),
            Err(SchemeError::NotSymmetric { line: 1, column: 2, .. })
        ));
        assert!(matches!(ExplicitScheme::new(vec![vec![1, 1], vec![1, 0]]), Err(SchemeError::NonZeroDiagonal(0))));
        assert!(matches!(ExplicitScheme::new(vec![vec![0, 0], vec![0, 0]]), Err(SchemeError::ZeroDistance(0, 1))));
        assert!(matches!(ExplicitScheme::new(vec![vec![0]]), Err(SchemeError::Size(1))));
        let rows = vec![vec![0, 1, 3], vec![1, 0, 1], vec![3, 1, 0]];
        assert!(matches!(ExplicitScheme::new(rows), Err(SchemeError::MissingDistance(2))));
        let rows = vec![vec![0, 1, 4, 2, 3], vec![1, 0, 1, 1, 1], vec![4, 1, 0, 1, 1], vec![2, 1, 1, 0, 1], vec![3, 1, 1, 1, 0]];
        assert!(matches!(ExplicitScheme::new(rows), Err(SchemeError::Triangle { .. })));
    }

    #[test]
    fn parse_round_trip_and_diagnostics() {
        let text = "# square\n4 2\n0 1 2 1\n1 0 1 2 # row two\n\n2 1 0 1\n1 2 1 0\n";
        let scheme = ExplicitScheme::parse(text).unwrap();
        assert_eq!(scheme, ExplicitScheme::hamming(2, 2).unwrap_or_else(|_| unreachable!()).relabelled_square());
        let bad = "3 1\n0 1 1\n1 0 0\n1 1 0\n";
        match ExplicitScheme::parse(bad) {
            Err(SchemeError::NotSymmetric { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ExplicitScheme::parse("2 1\n0 1\n"), Err(SchemeError::Parse { .. })));
        assert!(matches!(ExplicitScheme::parse("2 1\n0 x\n1 0\n"), Err(SchemeError::Parse { line: 2, .. })));
        assert!(matches!(ExplicitScheme::parse("2 1\n0 2\n2 0\n"), Err(SchemeError::Parse { line: 2, .. })));
    }

    impl ExplicitScheme {
        /// The 4-cycle 0-1-2-3 as a relabelling of F_2^2 (00, 01, 11, 10).
        fn relabelled_square(&self) -> ExplicitScheme {
            let order = [0, 1, 3, 2];
            let rows = order.iter().map(|&x| order.iter().map(|&y| self.distance(x, y)).collect()).collect();
            ExplicitScheme::new(rows).unwrap()
        }
    }

    #[test]
    fn adjacency_products() {
        let scheme = ExplicitScheme::hamming(2, 2).unwrap();
        let table = validate_scheme(&scheme).unwrap();
        assert_eq!(adjacency_product_check(&scheme.adjacency(), &table), Ok(()));

        let cube = ExplicitScheme::hamming(3, 2).unwrap();
        let adj = cube.adjacency();
        let table = validate_scheme(&cube).unwrap();
        assert_eq!(adjacency_product_check(&adj, &table), Ok(()));
        let square = adj.product(1, 1);
        for (x, row) in square.iter().enumerate() {
            for (z, &entry) in row.iter().enumerate() {
                let expected = match cube.distance(x, z) {
                    0 => 3,
                    2 => 2,
                    _ => 0,
                };
                assert_eq!(entry, expected);
            }
        }
        let corrupted = table.with_entry(1, 1, 0, 4);
        assert!(matches!(
            adjacency_product_check(&adj, &corrupted),
            Err(SchemeError::ProductMismatch { i: 1, j: 1, .. })
        ));
    }

    #[test]
    fn spectra_of_small_schemes() {
        let spectrum = spectral_decomposition(&ExplicitScheme::hamming(2, 2).unwrap().adjacency()).unwrap();
        let expected = [2.0, 0.0, -2.0];
        for (got, want) in spectrum.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9);
        }
        let ranks: Vec<f64> = spectrum.projectors.iter().map(|e| e.trace()).collect();
        assert!((ranks[0] - 1.0).abs() < 1e-9 && (ranks[1] - 2.0).abs() < 1e-9 && (ranks[2] - 1.0).abs() < 1e-9);
        assert!(spectrum.projectors[0].iter().all(|&v| v == 0.25));

        let johnson = ExplicitScheme::johnson(4, 2).unwrap();
        let spectrum = spectral_decomposition(&johnson.adjacency()).unwrap();
        let expected = [4.0, 0.0, -2.0];
        for (got, want) in spectrum.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9);
        }
        let params = extract_parameters(&johnson.adjacency(), &spectrum).unwrap();
        assert_eq!(params.m, vec![1, 3, 2]);

        let edge = ExplicitScheme::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let spectrum = spectral_decomposition(&edge.adjacency()).unwrap();
        assert!((spectrum.eigenvalues[0] - 1.0).abs() < 1e-12 && (spectrum.eigenvalues[1] + 1.0).abs() < 1e-12);
        assert!(spectrum.projectors[0].iter().all(|&v| v == 0.5));
    }

    #[test]
    fn extracted_parameters_have_trivial_rows() {
        for scheme in [ExplicitScheme::hamming(3, 2).unwrap(), ExplicitScheme::johnson(5, 2).unwrap()] {
            let adj = scheme.adjacency();
            let params = extract_parameters(&adj, &spectral_decomposition(&adj).unwrap()).unwrap();
            for j in 0..=params.diameter() {
                assert!((params.p[0][j] - 1.0).abs() < 1e-9);
                assert!((params.q[0][j] - 1.0).abs() < 1e-9);
            }
            assert_eq!(params.v.iter().sum::<u64>(), scheme.size() as u64);
            assert_eq!(params.m.iter().sum::<u64>(), scheme.size() as u64);
            assert!(params.pq_deviation() < 1e-9);
            assert!(params.min_krein() > -1e-9);
            assert_eq!(params.q_polynomial_violation(), None);
        }
    }

    #[test]
    fn p_polynomials() {
        let square = ExplicitScheme::hamming(2, 2).unwrap();
        let polys = fundamental_p_polynomials(&validate_scheme(&square).unwrap()).unwrap();
        assert_eq!(polys.get(0), &Polynomial::one());
        assert_eq!(polys.get(1), &Polynomial::x());
        assert_eq!(polys.get(2).coeffs(), &[ratio(-1, 1), BigRational::zero(), ratio(1, 2)]);
        assert_eq!(polys.check_adjacency(&square.adjacency()), Ok(()));

        let cube = ExplicitScheme::hamming(3, 2).unwrap();
        let table = validate_scheme(&cube).unwrap();
        assert_eq!((table.get(1, 1, 2), table.get(1, 2, 3)), (2, 3));
        let polys = fundamental_p_polynomials(&table).unwrap();
        assert_eq!(polys.get(3).degree(), Some(3));
        assert_eq!(polys.get(3).leading_coefficient(), ratio(1, 6));
        assert_eq!(polys.check_adjacency(&cube.adjacency()), Ok(()));
    }

    #[test]
    fn wrong_polynomial_is_caught() {
        let cube = ExplicitScheme::hamming(3, 2).unwrap();
        let table = validate_scheme(&cube).unwrap().with_entry(1, 2, 2, 1);
        let polys = fundamental_p_polynomials(&table).unwrap();
        assert!(matches!(polys.check_adjacency(&cube.adjacency()), Err(SchemeError::PolynomialMismatch { .. })));
    }
}
