//! Degree growth of Cremona maps and the finite-rank Picard–Manin picture:
//! degree sequences, growth classification, exact dynamical degrees, the
//! Lehmer gap, conjugation-degree bounds, and isometries of Minkowski
//! lattices of signature (1, n).

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cremona::{compose, CremonaError, CremonaMap};
use crate::exact::{rat, Rat};
use crate::monomial::{
    is_loxodromic, rl_word, spectral_radius, trace_conjugacy_classes, word_matrix, IntMatrix2,
    MonomialError, QuadraticValue,
};

/// Errors from dynamics computations.
#[derive(Error, Debug)]
pub enum DynamicsError {
    #[error("degree budget exceeded after {} iterates", .0.values().len())]
    BudgetExceeded(DegreeSequence),
    #[error("growth classification needs at least 6 terms")]
    TooShort,
    #[error("growth diagnostics conflict: {0}")]
    Inconclusive(String),
    #[error("not loxodromic: value does not exceed 1")]
    NotLoxodromic,
    #[error("matrix does not preserve the Minkowski form and forward cone")]
    NotIsometry,
    #[error("vector is not on the upper hyperboloid sheet")]
    NotOnHyperboloid,
    #[error("largest eigenvalue is not a quadratic unit; exact radius unsupported")]
    IrrationalSpectralRadius,
    #[error(
        "no finite-rank isometry model: det = -1 loxodromic maps have a \
         dynamical degree of norm -1, whose Galois conjugates force two \
         eigenvalues off the unit circle, impossible in signature (1, n)"
    )]
    UnrealizableFiniteRank,
    #[error("isometry model search budget exhausted for trace {0}")]
    SearchExhausted(i64),
    #[error(transparent)]
    Monomial(#[from] MonomialError),
    #[error(transparent)]
    Cremona(#[from] CremonaError),
}

/// The degrees deg(f^n) for n = 1..N, with a description of the source map.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeSequence {
    values: Vec<BigInt>,
    source: String,
}

impl DegreeSequence {
    pub fn new(values: Vec<BigInt>, source: impl Into<String>) -> Self {
        assert!(values.iter().all(|v| v >= &BigInt::one()));
        DegreeSequence {
            values,
            source: source.into(),
        }
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Degree of the Cremona map of a unimodular matrix, computed from the
/// exponent-clearing homogenization with the gcd already cancelled:
/// with α = max(0,−a,−c), β = max(0,−b,−d) the degree is
/// max(α+β, a+b+α+β, c+d+α+β).
pub fn monomial_degree(a: &IntMatrix2) -> BigInt {
    let zero = BigInt::zero();
    let alpha = [-a.entry(0, 0), -a.entry(1, 0), zero.clone()]
        .into_iter()
        .max()
        .unwrap();
    let beta = [-a.entry(0, 1), -a.entry(1, 1), zero]
        .into_iter()
        .max()
        .unwrap();
    let d0 = a.entry(0, 0) + a.entry(0, 1) + &alpha + &beta;
    let d1 = a.entry(1, 0) + a.entry(1, 1) + &alpha + &beta;
    let d2 = alpha + beta;
    d0.max(d1).max(d2)
}

/// Degrees of the iterates of a monomial map, computed combinatorially from
/// matrix powers (no polynomial blow-up).
pub fn degree_sequence_monomial(a: &IntMatrix2, n: usize) -> DegreeSequence {
    assert!(n >= 1);
    let mut values = Vec::with_capacity(n);
    let mut power = a.clone();
    for _ in 0..n {
        values.push(monomial_degree(&power));
        power = power.mul(a);
    }
    DegreeSequence::new(values, format!("monomial {}", a))
}

/// Degrees of the iterates of a general Cremona map by iterated composition
/// with cancellation; stops with the partial sequence when the next iterate
/// would exceed `budget_degree`.
pub fn degree_sequence_map(
    f: &CremonaMap<Rat>,
    n: usize,
    budget_degree: Option<u32>,
) -> Result<DegreeSequence, DynamicsError> {
    assert!(n >= 1);
    let source = format!("map {}", f);
    let mut values = vec![BigInt::from(f.degree())];
    let mut current = f.clone();
    for _ in 1..n {
        // Substituting the high-degree iterate into `f` (not the other way
        // round) keeps the expansion proportional to `f`'s few terms.
        let next = compose(f, &current)?;
        if let Some(cap) = budget_degree {
            if next.degree() > cap {
                return Err(DynamicsError::BudgetExceeded(DegreeSequence::new(
                    values, source,
                )));
            }
        }
        values.push(BigInt::from(next.degree()));
        current = next;
    }
    Ok(DegreeSequence::new(values, source))
}

/// Growth class of a degree sequence per the bounded / linear / quadratic /
/// exponential trichotomy; `Exponential` carries a λ estimate > 1.
#[derive(Clone, Debug, PartialEq)]
pub enum GrowthClass {
    Bounded,
    Linear,
    Quadratic,
    Exponential(f64),
}

/// A classification together with the diagnostics that decided it.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub class: GrowthClass,
    pub diagnostics: String,
}

const RATIO_DELTA: f64 = 0.05;

/// Heuristic growth classification (finite data cannot prove the trichotomy;
/// conflicting diagnostics are reported as `Inconclusive`, never guessed):
/// bounded by the first-half maximum → Bounded; exactly constant first /
/// second differences → Linear / Quadratic; stabilized ratios above 1 + δ →
/// Exponential; otherwise a log-log slope fit with an honest failure band.
pub fn classify_growth(seq: &DegreeSequence) -> Result<GrowthReport, DynamicsError> {
    let v = seq.values();
    let n = v.len();
    if n < 6 {
        return Err(DynamicsError::TooShort);
    }
    let half = n / 2;
    let first_half_max = v[..half].iter().max().unwrap();
    if v.iter().all(|x| x <= first_half_max) {
        return Ok(GrowthReport {
            class: GrowthClass::Bounded,
            diagnostics: format!("all terms bounded by first-half maximum {first_half_max}"),
        });
    }
    // Exact finite differences first (integer sequences: flatness tolerance
    // zero) — long arithmetic tails would otherwise fool the ratio test.
    let d1: Vec<BigInt> = v.windows(2).map(|w| &w[1] - &w[0]).collect();
    let tail1 = &d1[d1.len() / 2..];
    if tail1.windows(2).all(|w| w[0] == w[1]) && tail1[0].is_positive() {
        return Ok(GrowthReport {
            class: GrowthClass::Linear,
            diagnostics: format!("first differences exactly constant = {}", tail1[0]),
        });
    }
    let d2: Vec<BigInt> = d1.windows(2).map(|w| &w[1] - &w[0]).collect();
    let tail2 = &d2[d2.len() / 2..];
    if tail2.windows(2).all(|w| w[0] == w[1]) && tail2[0].is_positive() {
        return Ok(GrowthReport {
            class: GrowthClass::Quadratic,
            diagnostics: format!("second differences exactly constant = {}", tail2[0]),
        });
    }
    // Exponential: the last three successive ratios agree within 2% and all
    // exceed 1 + δ.
    let ratios: Vec<f64> = v
        .windows(2)
        .map(|w| w[1].to_f64().unwrap() / w[0].to_f64().unwrap())
        .collect();
    let last3 = &ratios[ratios.len() - 3..];
    let (rmin, rmax) = (
        last3.iter().cloned().fold(f64::INFINITY, f64::min),
        last3.iter().cloned().fold(0.0, f64::max),
    );
    if rmin > 1.0 + RATIO_DELTA && rmax / rmin <= 1.02 {
        // λ estimate from a geometric mean over the tail.
        let k = n - 1 - half;
        let lambda = (v[n - 1].to_f64().unwrap() / v[half].to_f64().unwrap()).powf(1.0 / k as f64);
        return Ok(GrowthReport {
            class: GrowthClass::Exponential(lambda),
            diagnostics: format!("ratios stabilized in [{rmin:.6}, {rmax:.6}]"),
        });
    }
    // Fallback: least-squares slope of log deg(f^n) against log n over the
    // tail — degree-1 vs degree-2 polynomial growth up to rounding.
    let pts: Vec<(f64, f64)> = (half..n)
        .map(|i| (((i + 1) as f64).ln(), v[i].to_f64().unwrap().ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let diagnostics = format!("log-log slope fit {slope:.4} over the last {} terms", pts.len());
    if (slope - 1.0).abs() <= 0.3 {
        Ok(GrowthReport {
            class: GrowthClass::Linear,
            diagnostics,
        })
    } else if (slope - 2.0).abs() <= 0.3 {
        Ok(GrowthReport {
            class: GrowthClass::Quadratic,
            diagnostics,
        })
    } else {
        Err(DynamicsError::Inconclusive(diagnostics))
    }
}

/// The dynamical degree of a monomial map: exactly the spectral radius of
/// its matrix.
pub fn dynamical_degree_monomial(a: &IntMatrix2) -> Result<QuadraticValue, DynamicsError> {
    Ok(spectral_radius(a)?)
}

/// Ascending coefficients of x¹⁰+x⁹−x⁷−x⁶−x⁵−x⁴−x³+x+1, whose unique root
/// above 1 is the Lehmer number λ_L ≈ 1.1762.
const LEHMER_POLY: [i64; 11] = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];

fn lehmer_eval(x: &Rat) -> Rat {
    // Horner, descending.
    let mut acc = Rat::zero();
    for c in LEHMER_POLY.iter().rev() {
        acc = acc * x + rat(*c, 1);
    }
    acc
}

/// An isolating rational interval of width ≤ ε around the Lehmer number,
/// by exact sign-change bisection on the integer polynomial over (1, 2).
pub fn lehmer_number(eps: &Rat) -> (Rat, Rat) {
    assert!(eps.is_positive());
    let (mut lo, mut hi) = (rat(1, 1), rat(2, 1));
    debug_assert!(lehmer_eval(&lo).is_negative() && lehmer_eval(&hi).is_positive());
    while &hi - &lo > *eps {
        let mid = (&lo + &hi) / rat(2, 1);
        if lehmer_eval(&mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn lehmer_lower_bound() -> &'static Rat {
    static LO: OnceLock<Rat> = OnceLock::new();
    LO.get_or_init(|| lehmer_number(&rat(1, 1_000_000_000)).0)
}

/// Verdict of the spectral-gap test, with the Pisot check for exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct GapVerdict {
    /// λ = 1 or λ ≥ λ_L (lower bisection endpoint at 1e−9).
    pub satisfies_gap: bool,
    /// For λ > 1: whether λ is Pisot (Galois conjugate strictly inside the
    /// unit circle; quadratic Salem numbers do not exist). None for λ = 1.
    pub pisot: Option<bool>,
}

fn quadratic_ge_rat(lambda: &QuadraticValue, bound: &Rat) -> bool {
    // λ ≥ a/b  ⟺  bλ ≥ a  (b > 0).
    let a = bound.numer().to_i64().expect("bound numerator fits i64");
    let b = bound.denom().to_i64().expect("bound denominator fits i64");
    let scaled = lambda.mul(&QuadraticValue::from_int(b));
    scaled.cmp_int(a) != Ordering::Less
}

/// Checks the universal gap λ = 1 or λ ≥ λ_L, and reports the Pisot verdict
/// for exact quadratic values.
pub fn gap_check(lambda: &QuadraticValue) -> GapVerdict {
    if lambda.cmp_int(1) == Ordering::Equal {
        return GapVerdict {
            satisfies_gap: true,
            pisot: None,
        };
    }
    let satisfies_gap = quadratic_ge_rat(lambda, lehmer_lower_bound());
    let (p, q, d) = lambda.parts();
    let pisot = if q.is_zero() {
        // Rational algebraic integers > 1 are Pisot.
        Some(lambda.cmp_int(1) == Ordering::Greater)
    } else {
        let conj = QuadraticValue::new(p.clone(), -q, d.clone());
        Some(conj.cmp_int(1) == Ordering::Less && conj.cmp_int(-1) == Ordering::Greater)
    };
    GapVerdict {
        satisfies_gap,
        pisot,
    }
}

/// Translation length log λ of a loxodromic isometry. Computed in double
/// precision (relative error ~1e−15, well inside the 1e−9 tolerances used
/// downstream).
pub fn translation_length(lambda: &QuadraticValue) -> Result<f64, DynamicsError> {
    if lambda.cmp_int(1) != Ordering::Greater {
        return Err(DynamicsError::NotLoxodromic);
    }
    Ok(lambda.to_f64().ln())
}

/// `(2r)^57`, the conjugation-degree constant for r = max(d, C(d)).
pub fn conjugation_constant(r: u64) -> BigInt {
    BigInt::from(2 * r).pow(57)
}

/// The degree bound pair (C, K) for dynamical degree ≤ d: C is the largest,
/// over the loxodromic trace classes |t| ≤ d+1, of the minimal induced-map
/// degree over each class (cyclic rotations, the R↔L relabeling, and global
/// sign), and K = (2·max(d, C))^57 exactly.
pub fn degree_bound(d: u64) -> Result<(u64, BigInt), DynamicsError> {
    assert!(d >= 2);
    let mut c_bound: u64 = 0;
    for t in 3..=(d + 1) as i64 {
        for rep in trace_conjugacy_classes(t)? {
            let word = rl_word(&rep);
            let mut class_min: Option<BigInt> = None;
            for swap in [false, true] {
                let w: Vec<u8> = if swap {
                    word
                        .iter()
                        .map(|l| if *l == b'R' { b'L' } else { b'R' })
                        .collect()
                } else {
                    word.clone()
                };
                for r in 0..w.len() {
                    let mut rot = w[r..].to_vec();
                    rot.extend_from_slice(&w[..r]);
                    let m = word_matrix(&rot);
                    for cand in [monomial_degree(&m), monomial_degree(&m.neg())] {
                        if class_min.as_ref().map_or(true, |cur| cand < *cur) {
                            class_min = Some(cand);
                        }
                    }
                }
            }
            let deg = class_min.unwrap().to_u64().expect("small class degree");
            c_bound = c_bound.max(deg);
        }
    }
    let r = d.max(c_bound);
    Ok((c_bound, conjugation_constant(r)))
}

/// The lattice ℤe₀ ⊕ ℤe₁ ⊕ … ⊕ ℤe_n with the diagonal form (+1, −1, …, −1):
/// the finite-rank truncation of the Picard–Manin space.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiLattice {
    rank: usize,
}

impl MinkowskiLattice {
    /// Lattice of signature (1, n).
    pub fn new(n: usize) -> Self {
        MinkowskiLattice { rank: 1 + n }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.rank).map(|i| format!("e{i}")).collect()
    }

    /// Minkowski inner product u·v = u₀v₀ − Σ uᵢvᵢ.
    pub fn inner<T>(&self, u: &[T], v: &[T]) -> T
    where
        T: Clone + std::ops::Mul<Output = T> + std::ops::Sub<Output = T> + Zero,
    {
        assert_eq!(u.len(), self.rank);
        assert_eq!(v.len(), self.rank);
        let mut acc = u[0].clone() * v[0].clone();
        for i in 1..self.rank {
            acc = acc - u[i].clone() * v[i].clone();
        }
        acc
    }
}

/// An integer matrix preserving the diagonal Minkowski form exactly
/// (MᵀJM = J) and the forward light cone; validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeIsometry {
    m: Vec<Vec<BigInt>>,
}

fn form_sign(i: usize) -> BigInt {
    if i == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

impl LatticeIsometry {
    pub fn new(m: Vec<Vec<BigInt>>) -> Result<Self, DynamicsError> {
        let n = m.len();
        if n == 0 || m.iter().any(|row| row.len() != n) {
            return Err(DynamicsError::NotIsometry);
        }
        // MᵀJM = J entrywise.
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += form_sign(k) * &m[k][i] * &m[k][j];
                }
                let expected = if i == j { form_sign(i) } else { BigInt::zero() };
                if s != expected {
                    return Err(DynamicsError::NotIsometry);
                }
            }
        }
        if !m[0][0].is_positive() {
            return Err(DynamicsError::NotIsometry);
        }
        Ok(LatticeIsometry { m })
    }

    pub fn identity(rank: usize) -> Self {
        let m = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        LatticeIsometry { m }
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.rank();
        assert_eq!(n, other.rank());
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i][j] += &self.m[i][k] * &other.m[k][j];
                }
            }
        }
        LatticeIsometry { m: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = LatticeIsometry::identity(self.rank());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rank());
        self.m
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Isometry type of a Minkowski-lattice isometry.
#[derive(Clone, Debug, PartialEq)]
pub enum IsometryType {
    Elliptic,
    Parabolic,
    Loxodromic(QuadraticValue),
}

fn rat_from_bigint(b: &BigInt) -> Rat {
    Rat::new(b.clone(), BigInt::one())
}

/// Exact determinant over ℚ by Gaussian elimination.
fn rat_det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = det * m[col][col].clone();
        for r in col + 1..n {
            let factor = &m[r][col] / &m[col][col];
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
    }
    det
}

fn rat_rank(mut m: Vec<Vec<Rat>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        if rank >= rows {
            break;
        }
        let pivot = match (rank..rows).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(pivot, rank);
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[rank][col];
            for c in col..cols {
                let sub = &factor * &m[rank][c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
        rank += 1;
    }
    rank
}

/// Characteristic polynomial det(xI − M), ascending integer coefficients,
/// via exact evaluation–interpolation at x = 0..n.
fn char_poly(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let values: Vec<Rat> = (0..=n)
        .map(|x| {
            let mat: Vec<Vec<Rat>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let diag = if i == j { rat(x as i64, 1) } else { Rat::zero() };
                            diag - rat_from_bigint(&m[i][j])
                        })
                        .collect()
                })
                .collect();
            rat_det(mat)
        })
        .collect();
    // Lagrange interpolation on the nodes 0..=n.
    let mut coeffs = vec![Rat::zero(); n + 1];
    for (i, vi) in values.iter().enumerate() {
        // Basis polynomial ∏_{j≠i} (x − j) / (i − j).
        let mut basis = vec![Rat::one()];
        let mut denom = Rat::one();
        for j in 0..=n {
            if j == i {
                continue;
            }
            let mut next = vec![Rat::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] = &next[k + 1] + b;
                next[k] = &next[k] - &(b * rat(j as i64, 1));
            }
            basis = next;
            denom = denom * rat(i as i64 - j as i64, 1);
        }
        let scale = vi / &denom;
        for (k, b) in basis.iter().enumerate() {
            coeffs[k] = &coeffs[k] + &(b * &scale);
        }
    }
    coeffs
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "characteristic polynomial is integral");
            c.to_integer()
        })
        .collect()
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c.clone();
    }
    acc
}

fn poly_deriv(p: &[Rat]) -> Vec<Rat> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * rat(i as i64, 1))
        .collect()
}

fn poly_trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let factor = &r[dr] / lead;
        for i in 0..=db {
            let sub = &factor * &b[i];
            r[dr - db + i] = &r[dr - db + i] - &sub;
        }
        r = poly_trim(r);
        if r.len() <= db {
            break;
        }
    }
    r
}

fn poly_gcd_rat(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = poly_trim(r);
    }
    a
}

/// Number of distinct real roots of `p` in the half-open interval (a, b],
/// by an exact Sturm chain on the squarefree part.
fn sturm_count(p: &[Rat], a: &Rat, b: &Rat) -> usize {
    let p = poly_trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    let dp = poly_deriv(&p);
    let g = poly_gcd_rat(&p, &dp);
    let sqfree = if g.len() > 1 {
        // Exact division p / g.
        let mut q = Vec::new();
        let mut r = p.clone();
        let dg = g.len() - 1;
        while r.len() > dg {
            let dr = r.len() - 1;
            let factor = &r[dr] / &g[dg];
            q.push(factor.clone());
            for i in 0..=dg {
                let sub = &factor * &g[i];
                r[dr - dg + i] = &r[dr - dg + i] - &sub;
            }
            r = poly_trim(r);
        }
        q.reverse();
        q
    } else {
        p
    };
    let mut chain = vec![sqfree.clone(), poly_deriv(&sqfree)];
    loop {
        let last = &chain[chain.len() - 1];
        if last.len() <= 1 {
            break;
        }
        let prev = &chain[chain.len() - 2];
        let r = poly_rem(prev, last);
        if r.is_empty() {
            break;
        }
        chain.push(r.iter().map(|c| -c).collect());
    }
    let variations = |x: &Rat| -> usize {
        let signs: Vec<i8> = chain
            .iter()
            .map(|q| {
                let v = poly_eval(q, x);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .filter(|s| *s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    variations(a).saturating_sub(variations(b))
}

/// Classifies a Minkowski-lattice isometry: Loxodromic with the exact
/// quadratic spectral radius when a real eigenvalue exceeds 1 (isolated by
/// a Sturm chain, pinned by the reciprocal quadratic factor x²−tx+1 of the
/// characteristic polynomial); otherwise Parabolic exactly when the
/// eigenvalue-1 Jordan structure is nontrivial (rank((M−I)²) < rank(M−I));
/// otherwise Elliptic.
pub fn isometry_type(m: &LatticeIsometry) -> Result<IsometryType, DynamicsError> {
    let chi: Vec<Rat> = char_poly(m.matrix())
        .iter()
        .map(rat_from_bigint)
        .collect();
    // Cauchy bound on root magnitudes.
    let lead = chi.last().unwrap().clone();
    let bound = chi
        .iter()
        .map(|c| (c / &lead).abs())
        .fold(Rat::zero(), |a, b| if a > b { a } else { b })
        + Rat::one();
    if sturm_count(&chi, &Rat::one(), &bound) > 0 {
        // λ + 1/λ = t is an integer trace for the quadratic units arising
        // here; take the largest t whose reciprocal quadratic divides χ.
        let t_max = bound
            .numer()
            .to_i64()
            .and_then(|n| bound.denom().to_i64().map(|d| n / d + 2))
            .ok_or(DynamicsError::IrrationalSpectralRadius)?;
        for t in (3..=t_max).rev() {
            let quad = vec![Rat::one(), rat(-t, 1), Rat::one()];
            if poly_trim(poly_rem(&chi, &quad)).is_empty() {
                let disc = BigInt::from(t * t - 4);
                return Ok(IsometryType::Loxodromic(QuadraticValue::new(
                    BigInt::from(t),
                    BigInt::one(),
                    disc,
                )));
            }
        }
        return Err(DynamicsError::IrrationalSpectralRadius);
    }
    // Spectral radius 1: parabolic iff the eigenvalue-1 block is non-semisimple.
    let n = m.rank();
    let m_minus_i: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j { Rat::one() } else { Rat::zero() };
                    rat_from_bigint(&m.matrix()[i][j]) - diag
                })
                .collect()
        })
        .collect();
    let mut squared = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                squared[i][j] = &squared[i][j] + &(&m_minus_i[i][k] * &m_minus_i[k][j]);
            }
        }
    }
    if rat_rank(squared) < rat_rank(m_minus_i) {
        Ok(IsometryType::Parabolic)
    } else {
        Ok(IsometryType::Elliptic)
    }
}

/// Hyperbolic distance arccosh(u·v) between two exact rational points on the
/// upper hyperboloid sheet (u·u = v·v = 1, positive e₀-coordinate).
pub fn hyperbolic_distance(u: &[Rat], v: &[Rat]) -> Result<f64, DynamicsError> {
    if u.len() != v.len() || u.len() < 2 {
        return Err(DynamicsError::NotOnHyperboloid);
    }
    let lat = MinkowskiLattice::new(u.len() - 1);
    if lat.inner(u, u) != Rat::one()
        || lat.inner(v, v) != Rat::one()
        || !u[0].is_positive()
        || !v[0].is_positive()
    {
        return Err(DynamicsError::NotOnHyperboloid);
    }
    let x = lat.inner(u, v);
    if x < Rat::one() {
        // Cauchy–Schwarz on a single sheet forces u·v ≥ 1.
        return Err(DynamicsError::NotOnHyperboloid);
    }
    let xf = x.to_f64().unwrap();
    Ok((xf + (xf * xf - 1.0).max(0.0).sqrt()).ln())
}

// ---------------------------------------------------------------------------
// Finite-rank Picard–Manin models of monomial maps.
// ---------------------------------------------------------------------------

/// Reflection of the Minkowski lattice in an integral vector of norm −1 or
/// −2: x ↦ x − 2(x·v)/(v·v) v. Always integral and orthochronous.
fn reflection(v: &[i64]) -> Vec<Vec<BigInt>> {
    let n = v.len();
    let norm: i64 = v[0] * v[0] - v[1..].iter().map(|x| x * x).sum::<i64>();
    debug_assert!(norm == -1 || norm == -2);
    let scale = -2 / norm; // 2 or 1
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        m[i][i] = BigInt::one();
        for j in 0..n {
            // (x·v) picks up the form sign of coordinate j.
            let sign = if j == 0 { 1 } else { -1 };
            m[i][j] += BigInt::from(scale * v[i] * sign * v[j]);
        }
    }
    m
}

fn reflection_vectors(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![0i64; rank];
    fn rec(v: &mut Vec<i64>, i: usize, bound: i64, out: &mut Vec<Vec<i64>>) {
        if i == v.len() {
            let norm: i64 = v[0] * v[0] - v[1..].iter().map(|x| x * x).sum::<i64>();
            if norm == -1 || norm == -2 {
                // One representative per ±v pair.
                if v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0) {
                    out.push(v.clone());
                }
            }
            return;
        }
        let lo = if i == 0 { 0 } else { -bound };
        for x in lo..=bound {
            v[i] = x;
            rec(v, i + 1, bound, out);
        }
        v[i] = 0;
    }
    rec(&mut v, 0, bound, &mut out);
    out
}


/// Whether the characteristic polynomial (ascending) is (x²−tx+1) times a
/// factor with all roots on the unit circle: (x∓1) in rank 3,
/// (x²+ax+1) with |a| ≤ 2 or (x²−1) in rank 4.
fn chi_matches(chi: &[BigInt], t: i64) -> bool {
    match chi.len() {
        4 => {
            // (x²−tx+1)(x−1) = [−1, t+1, −(t+1), 1]
            // (x²−tx+1)(x+1) = [1, 1−t, 1−t, 1]
            let even = chi[0] == BigInt::from(-1)
                && chi[1] == BigInt::from(t + 1)
                && chi[2] == BigInt::from(-(t + 1));
            let odd = chi[0].is_one()
                && chi[1] == BigInt::from(1 - t)
                && chi[2] == BigInt::from(1 - t);
            (even || odd) && chi[3].is_one()
        }
        5 => {
            if !chi[4].is_one() {
                return false;
            }
            if chi[0].is_one() {
                // (x²−tx+1)(x²+ax+1) = [1, a−t, 2−at, a−t, 1], |a| ≤ 2.
                let a = &chi[1] + BigInt::from(t);
                chi[1] == chi[3]
                    && a.abs() <= BigInt::from(2)
                    && chi[2] == BigInt::from(2) - &a * BigInt::from(t)
            } else {
                // (x²−tx+1)(x²−1) = [−1, t, 0, −t, 1].
                chi[0] == BigInt::from(-1)
                    && chi[1] == BigInt::from(t)
                    && chi[2].is_zero()
                    && chi[3] == BigInt::from(-t)
            }
        }
        _ => false,
    }
}

fn i64_mat(m: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
        .collect()
}

fn i64_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Deterministic search for an integral Minkowski isometry with
/// characteristic polynomial (x²−tx+1)·(unit-circle cofactor), over products
/// of two or three norm −1/−2 reflections; rank 3 first, then rank 4 with
/// escalating entry bounds. Enumeration order is fixed, and an exact
/// certificate (form preservation plus polynomial match) gates every return,
/// so the output is reproducible.
fn loxodromic_model(t: i64) -> Result<LatticeIsometry, DynamicsError> {
    use std::collections::BTreeMap;
    use std::sync::Mutex;
    static CACHE: OnceLock<Mutex<BTreeMap<i64, LatticeIsometry>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&t) {
        return Ok(hit.clone());
    }
    let found = loxodromic_model_uncached(t)?;
    cache
        .lock()
        .unwrap()
        .insert(t, found.clone());
    Ok(found)
}

fn loxodromic_model_uncached(t: i64) -> Result<LatticeIsometry, DynamicsError> {
    for (rank, bound, len) in [
        (3usize, 3i64, 2usize),
        (3, 3, 3),
        (4, 2, 2),
        (4, 2, 3),
        (4, 3, 2),
        (4, 3, 3),
    ] {
        let refls: Vec<Vec<Vec<i64>>> = reflection_vectors(rank, bound)
            .iter()
            .map(|v| i64_mat(&reflection(v)))
            .collect();
        // Traces forced by the accepted factorizations (cheap prefilter):
        // rank 3: t±1; rank 4 even length: |tr − t| ≤ 2; odd length: t.
        let trace_ok = |tr: i64| match (rank, len % 2) {
            (3, 0) => tr == t + 1,
            (3, _) => tr == t - 1,
            (_, 0) => (tr - t).abs() <= 2,
            _ => tr == t,
        };
        let verify = |m: &[Vec<i64>]| -> Option<LatticeIsometry> {
            if m[0][0] <= 0 {
                return None;
            }
            let big: Vec<Vec<BigInt>> = m
                .iter()
                .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
                .collect();
            if !chi_matches(&char_poly(&big), t) {
                return None;
            }
            LatticeIsometry::new(big).ok()
        };
        for r1 in &refls {
            for r2 in &refls {
                let p = i64_mul(r1, r2);
                if len == 2 {
                    if trace_ok((0..rank).map(|i| p[i][i]).sum()) {
                        if let Some(iso) = verify(&p) {
                            return Ok(iso);
                        }
                    }
                    continue;
                }
                for r3 in &refls {
                    // Trace of p·r3 without forming the product.
                    let tr: i64 = (0..rank)
                        .map(|i| (0..rank).map(|k| p[i][k] * r3[k][i]).sum::<i64>())
                        .sum();
                    if trace_ok(tr) {
                        if let Some(iso) = verify(&i64_mul(&p, r3)) {
                            return Ok(iso);
                        }
                    }
                }
            }
        }
    }
    // Final stage: longer products, sampled by a fixed-seed generator so the
    // first certified hit is reproducible.
    if let Some(iso) = loxodromic_model_random(t) {
        return Ok(iso);
    }
    Err(DynamicsError::SearchExhausted(t))
}

/// Seeded random search over length-4..8 reflection products in rank 4.
/// The seed is a constant, the sampling sequence is fixed, and every
/// candidate passes the exact certificate before being returned, so results
/// are deterministic.
fn loxodromic_model_random(t: i64) -> Option<LatticeIsometry> {
    use rand::{Rng, SeedableRng};
    let refls: Vec<Vec<Vec<i64>>> = reflection_vectors(4, 2)
        .iter()
        .map(|v| i64_mat(&reflection(v)))
        .collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6c6f786f);
    for _ in 0..2_000_000u32 {
        let len = rng.gen_range(4..=8usize);
        let mut m = refls[rng.gen_range(0..refls.len())].clone();
        for _ in 1..len {
            m = i64_mul(&m, &refls[rng.gen_range(0..refls.len())]);
        }
        let tr: i64 = (0..4).map(|i| m[i][i]).sum();
        if (tr - t).abs() > 2 || m[0][0] <= 0 {
            continue;
        }
        let big: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
            .collect();
        if chi_matches(&char_poly(&big), t) {
            if let Ok(iso) = LatticeIsometry::new(big) {
                return Some(iso);
            }
        }
    }
    None
}

/// The classical rank-4 action of the standard quadratic involution σ:
/// e₀ ↦ 2e₀−e₁−e₂−e₃, eᵢ ↦ e₀−eⱼ−e_k.
fn sigma_model() -> LatticeIsometry {
    let rows: [[i64; 4]; 4] = [
        [2, 1, 1, 1],
        [-1, 0, -1, -1],
        [-1, -1, 0, -1],
        [-1, -1, -1, 0],
    ];
    LatticeIsometry::new(
        rows.iter()
            .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
            .collect(),
    )
    .expect("classical involution preserves the form")
}

/// Eichler transvection along the isotropic vector w = e₀−e₁ with
/// u = e₂−e₃ ⊥ w: an integral parabolic isometry (Jordan block of size 3 at
/// eigenvalue 1).
fn parabolic_model() -> LatticeIsometry {
    let w: [i64; 4] = [1, -1, 0, 0];
    let u: [i64; 4] = [0, 0, 1, -1];
    let inner = |a: &[i64; 4], b: &[i64; 4]| -> i64 {
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    };
    debug_assert_eq!(inner(&w, &w), 0);
    debug_assert_eq!(inner(&u, &w), 0);
    debug_assert_eq!(inner(&u, &u), -2);
    // E(x) = x + (x·w)u − (x·u)w − ½(u·u)(x·w)w.
    let mut m = vec![vec![BigInt::zero(); 4]; 4];
    for j in 0..4 {
        let mut e = [0i64; 4];
        e[j] = 1;
        let xw = inner(&e, &w);
        let xu = inner(&e, &u);
        for i in 0..4 {
            let val = e[i] + xw * u[i] - xu * w[i] + xw * w[i];
            m[i][j] = BigInt::from(val);
        }
    }
    LatticeIsometry::new(m).expect("transvection preserves the form")
}

/// A finite-order isometry model of the same order as an elliptic matrix:
/// e₀ fixed, the definite part permuted (with signs) in a single block.
fn elliptic_model(order: u32) -> LatticeIsometry {
    let spatial: [[i64; 3]; 3] = match order {
        1 => [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        2 => [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
        3 => [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
        4 => [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
        6 => [[0, 0, -1], [-1, 0, 0], [0, -1, 0]],
        _ => unreachable!("GL2(Z) torsion has order 1, 2, 3, 4 or 6"),
    };
    let mut m = vec![vec![BigInt::zero(); 4]; 4];
    m[0][0] = BigInt::one();
    for i in 0..3 {
        for j in 0..3 {
            m[i + 1][j + 1] = BigInt::from(spatial[i][j]);
        }
    }
    LatticeIsometry::new(m).expect("signed permutation preserves the form")
}

fn matrix_order(a: &IntMatrix2, cap: u32) -> Option<u32> {
    let id = IntMatrix2::identity();
    let mut p = a.clone();
    for k in 1..=cap {
        if p == id {
            return Some(k);
        }
        p = p.mul(a);
    }
    None
}

/// A finite-rank Picard–Manin isometry model of the monomial map of `A`:
/// an integral isometry of a diagonal Minkowski lattice whose type and
/// (when loxodromic) spectral radius match the map exactly. The identity
/// lives in rank 1; σ gets the classical quadratic-map action; unipotent
/// non-identity matrices an Eichler transvection; other finite-order
/// matrices an order-matched signed permutation; loxodromic det = +1
/// matrices a two-reflection isometry with characteristic polynomial
/// (x²−tx+1)·(unit-circle quadratic). Loxodromic det = −1 is unrealizable
/// at finite rank (the conjugates of a norm −1 unit force two eigenvalues
/// off the unit circle) and reports a structured error.
pub fn pm_action_monomial(a: &IntMatrix2) -> Result<LatticeIsometry, DynamicsError> {
    if !a.is_unimodular() {
        return Err(MonomialError::NotUnimodular.into());
    }
    if *a == IntMatrix2::identity() {
        return Ok(LatticeIsometry::identity(1));
    }
    if *a == IntMatrix2::identity().neg() {
        return Ok(sigma_model());
    }
    if is_loxodromic(a)? {
        if a.det() == BigInt::from(-1) {
            return Err(DynamicsError::UnrealizableFiniteRank);
        }
        let t = a
            .trace()
            .abs()
            .to_i64()
            .ok_or(DynamicsError::SearchExhausted(i64::MAX))?;
        return loxodromic_model(t);
    }
    match matrix_order(a, 12) {
        Some(k) => Ok(elliptic_model(k)),
        None => Ok(parabolic_model()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cremona::normalize;
    use crate::exact::parse_map;
    use crate::monomial::{to_cremona, MonomialElement};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d)
    }

    fn map(s: &str) -> CremonaMap<Rat> {
        let [f0, f1, f2] = parse_map(s).unwrap();
        normalize(f0, f1, f2).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn degree_sequence_linear_map() {
        let f = map("[x + z : y : z]");
        let seq = degree_sequence_map(&f, 5, None).unwrap();
        assert_eq!(seq.values(), &[big(1), big(1), big(1), big(1), big(1)]);
    }

    #[test]
    fn degree_sequence_monomial_example() {
        let seq = degree_sequence_monomial(&mat(2, 1, 1, 1), 2);
        assert_eq!(seq.values(), &[big(3), big(8)]);
    }

    #[test]
    fn degree_sequence_henon() {
        // (y, y² − x) as a Cremona map.
        let f = map("[y*z : y^2 - x*z : z^2]");
        let seq = degree_sequence_map(&f, 5, None).unwrap();
        assert_eq!(seq.values(), &[big(2), big(4), big(8), big(16), big(32)]);
    }

    #[test]
    fn degree_budget_reports_partial() {
        let f = map("[y*z : y^2 - x*z : z^2]");
        match degree_sequence_map(&f, 10, Some(8)) {
            Err(DynamicsError::BudgetExceeded(partial)) => {
                assert_eq!(partial.values(), &[big(2), big(4), big(8)]);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn monomial_degrees_match_polynomial_composition() {
        for a in [mat(2, 1, 1, 1), mat(1, 1, 1, 0), mat(-1, 0, 0, -1), mat(1, 0, 1, 1)] {
            let f = to_cremona(&MonomialElement::from_matrix(a.clone()).unwrap()).unwrap();
            let combinatorial = degree_sequence_monomial(&a, 3);
            let polynomial = degree_sequence_map(&f, 3, None).unwrap();
            assert_eq!(combinatorial.values(), polynomial.values());
        }
    }

    #[test]
    fn classify_bounded() {
        let seq = DegreeSequence::new(vec![big(1); 6], "test");
        assert_eq!(
            classify_growth(&seq).unwrap().class,
            GrowthClass::Bounded
        );
    }

    #[test]
    fn classify_linear_from_unipotent() {
        let seq = degree_sequence_monomial(&mat(1, 0, 1, 1), 8);
        assert_eq!(
            seq.values(),
            (2..=9).map(big).collect::<Vec<_>>()
        );
        assert_eq!(classify_growth(&seq).unwrap().class, GrowthClass::Linear);
    }

    #[test]
    fn classify_exponential() {
        let seq = DegreeSequence::new((1..=6).map(|n| big(2i64.pow(n))).collect(), "test");
        match classify_growth(&seq).unwrap().class {
            GrowthClass::Exponential(l) => assert!((l - 2.0).abs() < 1e-6),
            other => panic!("expected exponential, got {other:?}"),
        }
    }

    #[test]
    fn classify_quadratic_with_rounding() {
        // ⌈n²/2⌉: second differences are not exactly constant.
        let seq = DegreeSequence::new(
            (1..=12).map(|n: i64| big((n * n + 1) / 2)).collect(),
            "test",
        );
        assert_eq!(classify_growth(&seq).unwrap().class, GrowthClass::Quadratic);
    }

    #[test]
    fn classify_exact_quadratic() {
        let seq = DegreeSequence::new((1..=8).map(|n: i64| big(n * n)).collect(), "test");
        assert_eq!(classify_growth(&seq).unwrap().class, GrowthClass::Quadratic);
    }

    #[test]
    fn classify_inconclusive_between_degrees() {
        // ⌈n^1.5⌉ sits between the linear and quadratic bands.
        let vals: Vec<BigInt> = (1..=12)
            .map(|n: i64| big(((n as f64).powf(1.5)).ceil() as i64))
            .collect();
        let seq = DegreeSequence::new(vals, "test");
        assert!(matches!(
            classify_growth(&seq),
            Err(DynamicsError::Inconclusive(_))
        ));
    }

    #[test]
    fn classify_requires_six_terms() {
        let seq = DegreeSequence::new(vec![big(1); 5], "test");
        assert!(matches!(classify_growth(&seq), Err(DynamicsError::TooShort)));
    }

    #[test]
    fn dynamical_degree_equals_spectral_radius() {
        let a = mat(2, 1, 1, 1);
        assert!(dynamical_degree_monomial(&a)
            .unwrap()
            .eq_value(&spectral_radius(&a).unwrap()));
    }

    #[test]
    fn lehmer_interval_brackets_known_value() {
        let (lo, hi) = lehmer_number(&rat(1, 10_000));
        // λ_L = 1.17628…; the paper quotes the truncation 1.1762, so the
        // isolating interval sits within 1e−4 of that anchor.
        assert!(lo > rat(11762, 10_000) - rat(1, 10_000));
        assert!(hi < rat(11762, 10_000) + rat(2, 10_000));
        assert!(&hi - &lo <= rat(1, 10_000));
        // Exact sign data at the endpoints and at 1.
        assert_eq!(lehmer_eval(&rat(1, 1)), rat(-1, 1));
        assert!(lehmer_eval(&lo).is_negative());
        assert!(!lehmer_eval(&hi).is_negative());
    }

    #[test]
    fn gap_check_examples() {
        // (3+√5)/2 is Pisot and clears the gap.
        let l = QuadraticValue::new(big(3), big(1), big(5));
        let v = gap_check(&l);
        assert!(v.satisfies_gap);
        assert_eq!(v.pisot, Some(true));
        // λ = 1 clears trivially.
        let one = QuadraticValue::from_int(1);
        assert!(gap_check(&one).satisfies_gap);
        assert_eq!(gap_check(&one).pisot, None);
        // A synthetic 1.05 violates the gap: it lies strictly below the
        // exact 1e−9 lower endpoint of the Lehmer interval.
        assert!(rat(21, 20) < *lehmer_lower_bound());
        let golden = QuadraticValue::new(big(1), big(1), big(5)); // (1+√5)/2 ≈ 1.618
        assert!(gap_check(&golden).satisfies_gap);
    }

    #[test]
    fn translation_length_examples() {
        let l = QuadraticValue::new(big(3), big(1), big(5));
        let got = translation_length(&l).unwrap();
        assert!((got - 0.9624236501192069).abs() < 1e-9);
        assert!(matches!(
            translation_length(&QuadraticValue::from_int(1)),
            Err(DynamicsError::NotLoxodromic)
        ));
        let two = QuadraticValue::from_int(2);
        assert!((translation_length(&two).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degree_bound_examples() {
        let (c2, k2) = degree_bound(2).unwrap();
        assert_eq!(c2, 3);
        assert_eq!(k2, conjugation_constant(3));
        let (c3, k3) = degree_bound(3).unwrap();
        assert_eq!(c3, 4);
        assert_eq!(k3, conjugation_constant(4));
        // Monotone in d.
        let mut prev = k2;
        for d in 3..=6 {
            let (_, k) = degree_bound(d).unwrap();
            assert!(k >= prev);
            prev = k;
        }
        // Spot value for the formula itself.
        assert_eq!(conjugation_constant(2), BigInt::from(2).pow(114));
    }

    #[test]
    fn isometry_constructor_rejects_non_isometries() {
        let bad = vec![
            vec![big(1), big(1), big(0), big(0)],
            vec![big(0), big(1), big(0), big(0)],
            vec![big(0), big(0), big(1), big(0)],
            vec![big(0), big(0), big(0), big(1)],
        ];
        assert!(matches!(
            LatticeIsometry::new(bad),
            Err(DynamicsError::NotIsometry)
        ));
    }

    #[test]
    fn isometry_type_identity_elliptic() {
        let id = LatticeIsometry::identity(4);
        assert_eq!(isometry_type(&id).unwrap(), IsometryType::Elliptic);
    }

    #[test]
    fn sigma_action_is_involution() {
        let s = sigma_model();
        assert_eq!(s.rank(), 4);
        assert_eq!(s.mul(&s), LatticeIsometry::identity(4));
        assert_eq!(isometry_type(&s).unwrap(), IsometryType::Elliptic);
        assert_eq!(
            pm_action_monomial(&mat(-1, 0, 0, -1)).unwrap(),
            sigma_model()
        );
    }

    #[test]
    fn parabolic_model_is_parabolic() {
        let e = parabolic_model();
        assert_eq!(isometry_type(&e).unwrap(), IsometryType::Parabolic);
        assert_eq!(
            isometry_type(&pm_action_monomial(&mat(1, 1, 0, 1)).unwrap()).unwrap(),
            IsometryType::Parabolic
        );
        assert_eq!(
            isometry_type(&pm_action_monomial(&mat(-1, 1, 0, -1)).unwrap()).unwrap(),
            IsometryType::Parabolic
        );
    }

    #[test]
    fn elliptic_models_match_orders() {
        for (a, order) in [
            (mat(0, -1, 1, 0), 4u32),
            (mat(0, 1, 1, 0), 2),
            (mat(0, -1, 1, -1), 3),
            (mat(1, -1, 1, 0), 6),
        ] {
            assert_eq!(matrix_order(&a, 12), Some(order));
            let m = pm_action_monomial(&a).unwrap();
            assert_eq!(isometry_type(&m).unwrap(), IsometryType::Elliptic);
            assert_eq!(m.pow(order), LatticeIsometry::identity(4));
            for k in 1..order {
                assert_ne!(m.pow(k), LatticeIsometry::identity(4));
            }
        }
    }

    #[test]
    fn pm_identity_is_rank_one() {
        let m = pm_action_monomial(&IntMatrix2::identity()).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m, LatticeIsometry::identity(1));
    }

    #[test]
    fn pm_loxodromic_matches_spectral_radius() {
        let a = mat(2, 1, 1, 1);
        let m = pm_action_monomial(&a).unwrap();
        match isometry_type(&m).unwrap() {
            IsometryType::Loxodromic(l) => {
                assert!(l.eq_value(&spectral_radius(&a).unwrap()));
            }
            other => panic!("expected loxodromic, got {other:?}"),
        }
    }

    #[test]
    fn pm_loxodromic_traces_up_to_thirty() {
        let missing: Vec<i64> = (3..=30i64)
            .filter(|t| loxodromic_model(*t).is_err())
            .collect();
        assert!(missing.is_empty(), "unreachable traces: {missing:?}");
        for t in 3..=30i64 {
            let m = loxodromic_model(t).unwrap();
            match isometry_type(&m).unwrap() {
                IsometryType::Loxodromic(l) => {
                    let expect =
                        QuadraticValue::new(big(t), big(1), big(t * t - 4));
                    assert!(l.eq_value(&expect), "trace {t}");
                }
                other => panic!("trace {t}: expected loxodromic, got {other:?}"),
            }
        }
    }

    #[test]
    fn pm_negative_trace_uses_absolute_value() {
        let a = mat(-2, -1, -1, -1);
        let m = pm_action_monomial(&a).unwrap();
        match isometry_type(&m).unwrap() {
            IsometryType::Loxodromic(l) => {
                assert!(l.eq_value(&spectral_radius(&a).unwrap()));
            }
            other => panic!("expected loxodromic, got {other:?}"),
        }
    }

    #[test]
    fn pm_det_minus_one_loxodromic_unrealizable() {
        assert!(matches!(
            pm_action_monomial(&mat(1, 1, 1, 0)),
            Err(DynamicsError::UnrealizableFiniteRank)
        ));
    }

    #[test]
    fn pm_is_deterministic() {
        for t in [3i64, 5, 7] {
            assert_eq!(loxodromic_model(t).unwrap(), loxodromic_model(t).unwrap());
        }
    }

    fn hyperboloid_point(spatial: &[Rat]) -> Vec<Rat> {
        // Rational parametrization u = ((1+s)/(1−s), 2a/(1−s)), s = |a|².
        let s: Rat = spatial.iter().map(|x| x * x).sum();
        assert!(s < Rat::one());
        let denom = Rat::one() - &s;
        let mut u = vec![(Rat::one() + &s) / &denom];
        for x in spatial {
            u.push(rat(2, 1) * x / &denom);
        }
        u
    }

    #[test]
    fn hyperbolic_distance_basics() {
        let u = hyperboloid_point(&[rat(1, 3), rat(1, 5), rat(0, 1)]);
        assert!(hyperbolic_distance(&u, &u).unwrap().abs() < 1e-12);
        let v = hyperboloid_point(&[rat(1, 2), rat(-1, 7), rat(1, 9)]);
        let duv = hyperbolic_distance(&u, &v).unwrap();
        let dvu = hyperbolic_distance(&v, &u).unwrap();
        assert!((duv - dvu).abs() < 1e-12);
        // Not on the hyperboloid.
        let bad = vec![rat(2, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        assert!(matches!(
            hyperbolic_distance(&bad, &u),
            Err(DynamicsError::NotOnHyperboloid)
        ));
    }

    #[test]
    fn hyperbolic_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..50 {
            let mut pt = || {
                let spatial: Vec<Rat> = (0..3)
                    .map(|_| rat(rng.gen_range(-4..5), rng.gen_range(7..12)))
                    .collect();
                hyperboloid_point(&spatial)
            };
            let (u, v, w) = (pt(), pt(), pt());
            let (duv, dvw, duw) = (
                hyperbolic_distance(&u, &v).unwrap(),
                hyperbolic_distance(&v, &w).unwrap(),
                hyperbolic_distance(&u, &w).unwrap(),
            );
            assert!(duw <= duv + dvw + 1e-9);
        }
    }

    #[test]
    fn loxodromic_orbit_distance_slope_is_log_lambda() {
        let a = mat(2, 1, 1, 1);
        let m = pm_action_monomial(&a).unwrap();
        let n = m.rank();
        let mut e0 = vec![Rat::zero(); n];
        e0[0] = Rat::one();
        let log_lambda = translation_length(&spectral_radius(&a).unwrap()).unwrap();
        let dist_at = |k: u32| -> f64 {
            let img: Vec<Rat> = m
                .pow(k)
                .apply(&vec![big(1)].into_iter().chain((1..n).map(|_| big(0))).collect::<Vec<_>>())
                .iter()
                .map(rat_from_bigint)
                .collect();
            hyperbolic_distance(&e0, &img).unwrap()
        };
        let diff = dist_at(25) - dist_at(24);
        assert!((diff - log_lambda).abs() < 1e-9);
    }
}
