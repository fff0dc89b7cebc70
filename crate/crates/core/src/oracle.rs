//! Brute-force maximum code size and the soundness sandwich
//! `A(n, d) <= A_LP(n, d) <= certificate bounds`.

use std::fmt;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use thiserror::Error;

use crate::certificates::{
    eb_certificate, hamming_certificate, mrrw_certificate, Certificate, CertificateError, EbData, MrrwData,
};
use crate::lp::{solve_primal, LpError};
use crate::params::{hamming_parameters, johnson_parameters, ParamError, SchemeParameters};
use crate::scheme::{johnson_words, FiniteMetric, HammingSpace, MAX_EXPLICIT_SIZE};

/// Largest Hamming space the oracle will scan.
pub const MAX_HAMMING_ORACLE_SIZE: usize = 1 << 20;
/// Largest candidate graph the clique search will materialise.
pub const MAX_CANDIDATE_GRAPH: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("space of size {size} exceeds the oracle cap {max}")]
    TooLarge { size: usize, max: usize },
    #[error("minimum distance {d} outside [1, {n}]")]
    Domain { d: usize, n: usize },
    #[error("invalid family: {0}")]
    Family(String),
    #[error("soundness violation: {0}")]
    Soundness(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

/// A closed-form scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    Hamming { n: u64, q: u64 },
    /// Distances are Johnson distances, half the Hamming distance.
    Johnson { n: u64, a: u64 },
}

impl FamilySpec {
    pub fn parameters(&self) -> Result<SchemeParameters, ParamError> {
        match *self {
            FamilySpec::Hamming { n, q } => hamming_parameters(n, q),
            FamilySpec::Johnson { n, a } => johnson_parameters(n, a),
        }
    }

    pub fn diameter(&self) -> usize {
        match *self {
            FamilySpec::Hamming { n, .. } => n as usize,
            FamilySpec::Johnson { a, .. } => a as usize,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Hamming { n, q } => write!(f, "hamming(n={n}, q={q})"),
            FamilySpec::Johnson { n, a } => write!(f, "johnson(n={n}, a={a})"),
        }
    }
}

/// Limits on a clique search. An exhausted budget yields the best code
/// found so far with `proven` unset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchBudget {
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self { time_limit: None }
    }

    pub fn seconds(secs: u64) -> Self {
        Self { time_limit: Some(Duration::from_secs(secs)) }
    }
}

/// Outcome of a maximum-code search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSearch {
    pub size: usize,
    /// Point indices of a code of that size.
    pub witness: Vec<usize>,
    /// Whether the search ran to completion, making `size` the maximum.
    pub proven: bool,
}

struct Graph {
    words: usize,
    adjacency: Vec<u64>,
}

impl Graph {
    fn neighbours(&self, v: usize) -> &[u64] {
        &self.adjacency[v * self.words..(v + 1) * self.words]
    }
}

struct CliqueSearch<'g> {
    graph: &'g Graph,
    best: Vec<usize>,
    current: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
    aborted: bool,
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

impl CliqueSearch<'_> {
    /// Greedy sequential colouring; returns vertices with nondecreasing
    /// colour numbers.
    fn colour(&self, candidates: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = candidates.to_vec();
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            colour += 1;
            let mut available = uncoloured.clone();
            while let Some(v) = first_bit(&available) {
                uncoloured[v / 64] &= !(1 << (v % 64));
                available[v / 64] &= !(1 << (v % 64));
                for (a, n) in available.iter_mut().zip(self.graph.neighbours(v)) {
                    *a &= !n;
                }
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, mut candidates: Vec<u64>) {
        let (order, colours) = self.colour(&candidates);
        for idx in (0..order.len()).rev() {
            if self.current.len() + colours[idx] <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes.is_multiple_of(1024) {
                if let Some(deadline) = self.deadline {
                    if Instant::now() >= deadline {
                        self.aborted = true;
                    }
                }
            }
            if self.aborted {
                return;
            }
            let v = order[idx];
            self.current.push(v);
            let next: Vec<u64> = candidates.iter().zip(self.graph.neighbours(v)).map(|(c, n)| c & n).collect();
            if next.iter().all(|&w| w == 0) {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            candidates[v / 64] &= !(1 << (v % 64));
        }
    }
}

/// Maximum clique among `vertices` where `adjacent` decides edges. Returns a
/// clique strictly larger than `floor` if one exists, else an empty vector.
fn max_clique(
    vertices: &[usize],
    adjacent: impl Fn(usize, usize) -> bool + Sync,
    floor: usize,
    deadline: Option<Instant>,
) -> (Vec<usize>, bool) {
    let count = vertices.len();
    if count == 0 {
        return (Vec::new(), true);
    }
    let words = count.div_ceil(64);
    // Relabel by nonincreasing degree so colouring sees dense vertices first.
    let degrees: Vec<usize> =
        (0..count).map(|i| (0..count).filter(|&j| j != i && adjacent(vertices[i], vertices[j])).count()).collect();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
    let mut adjacency = vec![0u64; count * words];
    for (i, &a) in order.iter().enumerate() {
        for (j, &b) in order.iter().enumerate() {
            if i != j && adjacent(vertices[a], vertices[b]) {
                adjacency[i * words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    let graph = Graph { words, adjacency };
    let mut all = vec![0u64; words];
    for v in 0..count {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut search = CliqueSearch {
        graph: &graph,
        best: vec![usize::MAX; floor],
        current: Vec::new(),
        deadline,
        nodes: 0,
        aborted: false,
    };
    search.expand(all);
    let clique = if search.best.len() > floor {
        search.best.iter().map(|&v| vertices[order[v]]).collect()
    } else {
        Vec::new()
    };
    (clique, !search.aborted)
}

fn check_distance<M: FiniteMetric + ?Sized>(metric: &M, d: usize) -> Result<(), OracleError> {
    if d == 0 || d > metric.diameter() {
        return Err(OracleError::Domain { d, n: metric.diameter() });
    }
    Ok(())
}

/// Largest code with pairwise distance at least `d` in an arbitrary finite
/// metric space of at most [`MAX_EXPLICIT_SIZE`] points.
pub fn max_code_size<M: FiniteMetric + ?Sized>(
    metric: &M,
    d: usize,
    budget: SearchBudget,
) -> Result<CodeSearch, OracleError> {
    check_distance(metric, d)?;
    let size = metric.len();
    if size > MAX_EXPLICIT_SIZE {
        return Err(OracleError::TooLarge { size, max: MAX_EXPLICIT_SIZE });
    }
    let vertices: Vec<usize> = (0..size).collect();
    let deadline = budget.time_limit.map(|t| Instant::now() + t);
    let (mut witness, proven) = max_clique(&vertices, |x, y| metric.distance(x, y) >= d, 0, deadline);
    witness.sort_unstable();
    Ok(CodeSearch { size: witness.len(), witness, proven })
}

/// Search in a distance-transitive space. Any code with at least two words
/// and minimum distance `w` can be moved so that two of its words are `0`
/// and a fixed `partner(w)` at distance `w`; the rest lie at distance at
/// least `w` from both.
fn two_point_search<M: FiniteMetric + ?Sized>(
    metric: &M,
    d: usize,
    partner: impl Fn(usize) -> usize,
    budget: SearchBudget,
) -> Result<CodeSearch, OracleError> {
    check_distance(metric, d)?;
    let size = metric.len();
    let deadline = budget.time_limit.map(|t| Instant::now() + t);
    let mut best = vec![0];
    let mut proven = true;
    for w in (d..=metric.diameter()).rev() {
        let mate = partner(w);
        let candidates: Vec<usize> = (0..size)
            .filter(|&x| x != mate && x != 0 && metric.distance(0, x) >= w && metric.distance(mate, x) >= w)
            .collect();
        if candidates.len() > MAX_CANDIDATE_GRAPH {
            return Err(OracleError::TooLarge { size: candidates.len(), max: MAX_CANDIDATE_GRAPH });
        }
        let floor = best.len().saturating_sub(2);
        let (clique, complete) = max_clique(&candidates, |x, y| metric.distance(x, y) >= w, floor, deadline);
        proven &= complete;
        if clique.len() + 2 > best.len() {
            best = [0, mate].into_iter().chain(clique).collect();
        }
    }
    best.sort_unstable();
    Ok(CodeSearch { size: best.len(), witness: best, proven })
}

/// Append an overall parity bit to every word of a binary search result of
/// length `length`. An odd minimum distance `d` becomes `d + 1`.
pub fn parity_extend(search: &CodeSearch, length: usize) -> CodeSearch {
    let mut witness: Vec<usize> =
        search.witness.iter().map(|&w| w | ((w.count_ones() as usize & 1) << length)).collect();
    witness.sort_unstable();
    CodeSearch { size: witness.len(), witness, proven: search.proven }
}

/// Largest code of minimum distance `d` in a closed-form family; Johnson
/// distances are half Hamming distances.
pub fn max_code_size_family(spec: FamilySpec, d: usize, budget: SearchBudget) -> Result<CodeSearch, OracleError> {
    match spec {
        FamilySpec::Hamming { n, q } => {
            let space = HammingSpace::new(n as usize, q as usize).map_err(|e| OracleError::Family(e.to_string()))?;
            if space.len() > MAX_HAMMING_ORACLE_SIZE {
                return Err(OracleError::TooLarge { size: space.len(), max: MAX_HAMMING_ORACLE_SIZE });
            }
            check_distance(&space, d)?;
            if d == 1 {
                let witness: Vec<usize> = (0..space.len()).collect();
                return Ok(CodeSearch { size: witness.len(), witness, proven: true });
            }
            if q == 2 && d.is_multiple_of(2) {
                // A(n, d) = A(n-1, d-1) for binary codes of even d: puncture one
                // way, append an overall parity bit the other.
                let shorter = max_code_size_family(FamilySpec::Hamming { n: n - 1, q }, d - 1, budget)?;
                return Ok(parity_extend(&shorter, n as usize - 1));
            }
            // the word 1^w 0^(n-w) in base q
            let partner = |w: usize| (0..w).fold(0usize, |acc, i| acc + q.pow(i as u32) as usize);
            two_point_search(&space, d, partner, budget)
        }
        FamilySpec::Johnson { n, a } => {
            if a == 0 || 2 * a > n {
                return Err(OracleError::Family(format!("johnson n={n}, a={a}")));
            }
            let words = johnson_words(n as usize, a as usize);
            if words.len() > MAX_EXPLICIT_SIZE {
                return Err(OracleError::TooLarge { size: words.len(), max: MAX_EXPLICIT_SIZE });
            }
            let space = JohnsonSpace { words, radius: a as usize };
            check_distance(&space, d)?;
            let partner = |w: usize| (0..space.words.len()).find(|&x| space.distance(0, x) == w).unwrap();
            two_point_search(&space, d, partner, budget)
        }
    }
}

struct JohnsonSpace {
    words: Vec<u64>,
    radius: usize,
}

impl FiniteMetric for JohnsonSpace {
    fn len(&self) -> usize {
        self.words.len()
    }

    fn diameter(&self) -> usize {
        self.radius
    }

    fn distance(&self, x: usize, y: usize) -> usize {
        (self.words[x] ^ self.words[y]).count_ones() as usize / 2
    }
}

/// All five numbers of a sandwich check.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub family: FamilySpec,
    pub d: usize,
    pub oracle: CodeSearch,
    pub lp: BigRational,
    pub hamming: Certificate,
    pub eb: Option<(Certificate, EbData)>,
    pub mrrw: Option<(Certificate, MrrwData)>,
}

fn optional<T>(result: Result<T, CertificateError>) -> Result<Option<T>, OracleError> {
    match result {
        Ok(value) => Ok(Some(value)),
        Err(
            CertificateError::NoAdmissibleU
            | CertificateError::NoValidRPerp
            | CertificateError::NoSignChange
            | CertificateError::NotQPolynomial
            | CertificateError::Q1NotDecreasing(_)
            | CertificateError::Q1NotPositive(_),
        ) => Ok(None),
        Err(other) => Err(other.into()),
    }
}

/// Check `oracle <= lp <= every applicable certificate bound`, exactly.
pub fn sandwich_check(spec: FamilySpec, d: usize, budget: SearchBudget) -> Result<SandwichReport, OracleError> {
    if d == 0 || d > spec.diameter() {
        return Err(OracleError::Domain { d, n: spec.diameter() });
    }
    let oracle = max_code_size_family(spec, d, budget)?;
    sandwich_with_search(spec, d, oracle)
}

/// [`sandwich_check`] with an already computed code search, whose witness
/// must be a code of minimum distance `d` in `spec`.
pub fn sandwich_with_search(spec: FamilySpec, d: usize, oracle: CodeSearch) -> Result<SandwichReport, OracleError> {
    let params = spec.parameters()?;
    if d == 0 || d > params.n() {
        return Err(OracleError::Domain { d, n: params.n() });
    }
    let lp = solve_primal(&params, d)?.value;
    let hamming = hamming_certificate(&params, d)?;
    let eb = optional(eb_certificate(&params, d))?;
    let mrrw = optional(mrrw_certificate(&params, d))?;

    let code = BigRational::from_integer(oracle.size.into());
    if code > lp {
        return Err(OracleError::Soundness(format!("{spec}, d={d}: code of size {} beats A_LP = {lp}", oracle.size)));
    }
    let mut bounds = vec![("hamming", &hamming.bound)];
    if let Some((cert, data)) = &eb {
        bounds.push(("eb", &cert.bound));
        bounds.push(("eb closed form", &data.closed_form_bound));
    }
    if let Some((cert, data)) = &mrrw {
        bounds.push(("mrrw", &cert.bound));
        bounds.push(("mrrw closed form", &data.closed_form_bound));
    }
    for (name, bound) in bounds {
        if &lp > bound {
            return Err(OracleError::Soundness(format!("{spec}, d={d}: A_LP = {lp} exceeds the {name} bound {bound}")));
        }
    }
    Ok(SandwichReport { family: spec, d, oracle, lp, hamming, eb, mrrw })
}

impl fmt::Display for SandwichReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let oracle = if self.oracle.proven { self.oracle.size.to_string() } else { format!(">={}", self.oracle.size) };
        let cells = [
            oracle,
            self.lp.to_string(),
            self.hamming.bound.to_string(),
            self.eb.as_ref().map_or("-".into(), |(_, data)| data.closed_form_bound.to_string()),
            self.mrrw.as_ref().map_or("-".into(), |(_, data)| data.closed_form_bound.to_string()),
        ];
        let headers = ["oracle", "lp", "hamming", "eb", "mrrw"];
        let widths: Vec<usize> = headers.iter().zip(&cells).map(|(h, c)| h.len().max(c.len())).collect();
        let line = |items: &[&str]| {
            items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        writeln!(f, "{}, d={}", self.family, self.d)?;
        writeln!(f, "{}", line(&headers))?;
        writeln!(f, "{}", line(&cells.iter().map(String::as_str).collect::<Vec<_>>()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use crate::scheme::ExplicitScheme;

    fn is_code<M: FiniteMetric>(metric: &M, words: &[usize], d: usize) -> bool {
        words.iter().all(|&x| words.iter().all(|&y| x == y || metric.distance(x, y) >= d))
    }

    #[test]
    fn small_hamming_values() {
        let unlimited = SearchBudget::unlimited();
        let four = max_code_size_family(FamilySpec::Hamming { n: 4, q: 2 }, 2, unlimited).unwrap();
        assert_eq!((four.size, four.proven), (8, true));
        assert!(is_code(&HammingSpace::new(4, 2).unwrap(), &four.witness, 2));
        let three = max_code_size_family(FamilySpec::Hamming { n: 3, q: 2 }, 3, unlimited).unwrap();
        assert_eq!(three.size, 2);
        let whole = max_code_size_family(FamilySpec::Hamming { n: 5, q: 3 }, 1, unlimited).unwrap();
        assert_eq!(whole.size, 243);
    }

    #[test]
    fn generic_search_agrees_with_family_search() {
        let unlimited = SearchBudget::unlimited();
        for (n, d) in [(5, 2), (5, 3), (6, 3), (6, 4), (7, 3)] {
            let space = HammingSpace::new(n, 2).unwrap();
            let generic = max_code_size(&space, d, unlimited).unwrap();
            let family = max_code_size_family(FamilySpec::Hamming { n: n as u64, q: 2 }, d, unlimited).unwrap();
            assert_eq!(generic.size, family.size, "n={n} d={d}");
            assert!(is_code(&space, &family.witness, d));
        }
        let ternary = max_code_size_family(FamilySpec::Hamming { n: 4, q: 3 }, 3, unlimited).unwrap();
        assert_eq!(ternary.size, 9);
    }

    #[test]
    fn johnson_values() {
        let unlimited = SearchBudget::unlimited();
        let pair = max_code_size_family(FamilySpec::Johnson { n: 4, a: 2 }, 2, unlimited).unwrap();
        assert_eq!(pair.size, 2);
        let scheme = ExplicitScheme::johnson(6, 3).unwrap();
        for d in 1..=3 {
            let generic = max_code_size(&scheme, d, unlimited).unwrap();
            let family = max_code_size_family(FamilySpec::Johnson { n: 6, a: 3 }, d, unlimited).unwrap();
            assert_eq!(generic.size, family.size);
        }
    }

    #[test]
    fn d_one_is_everything() {
        let scheme = ExplicitScheme::johnson(5, 2).unwrap();
        assert_eq!(max_code_size(&scheme, 1, SearchBudget::unlimited()).unwrap().size, 10);
        assert!(matches!(max_code_size(&scheme, 3, SearchBudget::unlimited()), Err(OracleError::Domain { .. })));
    }

    #[test]
    fn sandwich_examples() {
        let report = sandwich_check(FamilySpec::Hamming { n: 7, q: 2 }, 3, SearchBudget::unlimited()).unwrap();
        assert_eq!(report.oracle.size, 16);
        assert_eq!(report.lp, rational(16));
        assert_eq!(report.hamming.bound, rational(16));
        let table = report.to_string();
        assert!(table.contains("oracle  lp  hamming"), "{table}");

        let report = sandwich_check(FamilySpec::Johnson { n: 4, a: 2 }, 2, SearchBudget::unlimited()).unwrap();
        assert_eq!(report.oracle.size, 2);
    }
}
