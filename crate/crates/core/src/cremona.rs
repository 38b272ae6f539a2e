//! Plane Cremona group elements: normalization, composition, strict
//! transforms, contraction tests, and the de Jonquières subgroup.
//!
//! A Cremona map is stored as a coprime triple of equal-degree homogeneous
//! polynomials, canonically scaled so projective equality is plain equality.
//! Birationality is *evidence-carried*: maps built from de Jonquières data
//! (or other structured sources) carry an inverse witness, and operations
//! that require birationality demand one. The affine chart is `z = 1`, so a
//! point `(x, y)` of the plane is `[x : y : 1]`.

use thiserror::Error;

use crate::exact::{jacobian_det, poly_gcd, ExactError, Field, HomPoly3, RatFun, UniPoly, Var};

/// Errors from Cremona-map construction and geometry operations.
#[derive(Error, Debug, PartialEq)]
pub enum CremonaError {
    #[error("all three components are zero")]
    AllZero,
    #[error("the nonzero components do not share a common degree")]
    DegreeMismatch,
    #[error("operation requires birationality evidence (inverse witness) but none is attached")]
    NotBirational,
    #[error("curve polynomial is not squarefree")]
    NotSquarefree,
    #[error("curve polynomial must be nonconstant")]
    ConstantCurve,
    #[error("all components vanish modulo the curve, contradicting normalization")]
    ZeroModP,
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A point of the projective plane with canonical coordinates: the first
/// nonzero coordinate is scaled to one.
#[derive(Clone, PartialEq, Debug)]
pub struct ProjPoint<K: Field> {
    coords: [K; 3],
}

impl<K: Field> ProjPoint<K> {
    /// Builds a point from homogeneous coordinates, normalizing so the first
    /// nonzero coordinate equals one. Errors when all coordinates vanish.
    pub fn new(coords: [K; 3]) -> Result<Self, CremonaError> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or(CremonaError::AllZero)?;
        let s = lead.inv().expect("nonzero coordinate");
        Ok(ProjPoint {
            coords: [
                coords[0].mul(&s),
                coords[1].mul(&s),
                coords[2].mul(&s),
            ],
        })
    }

    pub fn coords(&self) -> &[K; 3] {
        &self.coords
    }
}

impl<K: Field> std::fmt::Display for ProjPoint<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{} : {} : {}]",
            self.coords[0], self.coords[1], self.coords[2]
        )
    }
}

/// A plane Cremona group element: a coprime triple of equal-degree
/// homogeneous polynomials, canonically normalized, optionally carrying an
/// inverse witness as birationality evidence.
#[derive(Clone, Debug)]
pub struct CremonaMap<K: Field> {
    components: [HomPoly3<K>; 3],
    inverse_witness: Option<Box<CremonaMap<K>>>,
}

/// Equality of group elements: the canonically normalized components decide;
/// an inverse witness is evidence, not identity.
impl<K: Field> PartialEq for CremonaMap<K> {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

/// Cancels the common factor of a component triple and applies the joint
/// canonical scaling. This is the constructor every other operation funnels
/// through, so the [`CremonaMap`] invariants hold by construction.
pub fn normalize<K: Field>(
    f0: HomPoly3<K>,
    f1: HomPoly3<K>,
    f2: HomPoly3<K>,
) -> Result<CremonaMap<K>, CremonaError> {
    let mut comps = [f0, f1, f2];
    let degrees: Vec<u32> = comps.iter().filter_map(|f| f.degree()).collect();
    if degrees.is_empty() {
        return Err(CremonaError::AllZero);
    }
    if degrees.windows(2).any(|w| w[0] != w[1]) {
        return Err(CremonaError::DegreeMismatch);
    }

    // Common factor of the nonzero components.
    let mut g: Option<HomPoly3<K>> = None;
    for f in comps.iter().filter(|f| !f.is_zero()) {
        g = Some(match g {
            None => f.clone(),
            Some(g) => poly_gcd(&g, f)?,
        });
    }
    let g = g.expect("some component is nonzero");
    if !g.is_constant() {
        for f in comps.iter_mut() {
            if !f.is_zero() {
                *f = f.div_exact(&g).expect("gcd divides every component");
            }
        }
    }

    // Joint canonical scaling across the whole triple (leading coefficient of
    // the first nonzero component comes first, fixing the sign convention).
    let coeffs: Vec<&K> = comps
        .iter()
        .flat_map(|f| {
            let mut keys: Vec<_> = f.terms().collect();
            keys.reverse(); // leading (largest exponent) first
            keys.into_iter().map(|(_, c)| c)
        })
        .collect();
    let s = K::canonical_scalar(&coeffs);
    let comps = comps.map(|f| f.scale(&s));

    Ok(CremonaMap {
        components: comps,
        inverse_witness: None,
    })
}

/// Composition in the Cremona group: substitutes `g` into `f` and
/// renormalizes. Inverse witnesses compose contravariantly when both maps
/// carry one.
pub fn compose<K: Field>(
    f: &CremonaMap<K>,
    g: &CremonaMap<K>,
) -> Result<CremonaMap<K>, CremonaError> {
    let [h0, h1, h2] = [
        f.components[0].substitute(&g.components)?,
        f.components[1].substitute(&g.components)?,
        f.components[2].substitute(&g.components)?,
    ];
    let mut out = normalize(h0, h1, h2)?;
    if let (Some(fi), Some(gi)) = (&f.inverse_witness, &g.inverse_witness) {
        out.inverse_witness = Some(Box::new(compose_no_witness(gi, fi)?));
    }
    Ok(out)
}

/// Composition without witness propagation, to terminate the recursion in
/// [`compose`].
fn compose_no_witness<K: Field>(
    f: &CremonaMap<K>,
    g: &CremonaMap<K>,
) -> Result<CremonaMap<K>, CremonaError> {
    normalize(
        f.components[0].substitute(&g.components)?,
        f.components[1].substitute(&g.components)?,
        f.components[2].substitute(&g.components)?,
    )
}

impl<K: Field> CremonaMap<K> {
    /// The identity map `[x : y : z]`; needs a unit of the field as context.
    pub fn identity(one: &K) -> Self {
        let mut id = CremonaMap {
            components: [
                HomPoly3::variable(Var::X, one),
                HomPoly3::variable(Var::Y, one),
                HomPoly3::variable(Var::Z, one),
            ],
            inverse_witness: None,
        };
        id.inverse_witness = Some(Box::new(CremonaMap {
            components: id.components.clone(),
            inverse_witness: None,
        }));
        id
    }

    pub fn components(&self) -> &[HomPoly3<K>; 3] {
        &self.components
    }

    /// The common degree of the components.
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .find_map(|f| f.degree())
            .expect("normalized maps have a nonzero component")
    }

    pub fn inverse_witness(&self) -> Option<&CremonaMap<K>> {
        self.inverse_witness.as_deref()
    }

    /// Attaches `inv` as birationality evidence after verifying that the
    /// composition in both orders is the identity.
    pub fn with_inverse(mut self, inv: CremonaMap<K>) -> Result<Self, CremonaError> {
        let one = self.components[0]
            .any_coeff()
            .expect("nonzero component")
            .one_like();
        let id = CremonaMap::identity(&one);
        if compose_no_witness(&self, &inv)?.components != id.components
            || compose_no_witness(&inv, &self)?.components != id.components
        {
            return Err(CremonaError::NotBirational);
        }
        self.inverse_witness = Some(Box::new(inv));
        Ok(self)
    }

    /// Attaches an inverse witness without the defining-identity check; for
    /// constructors that guarantee correctness structurally.
    pub(crate) fn with_inverse_unchecked(mut self, inv: CremonaMap<K>) -> Self {
        self.inverse_witness = Some(Box::new(inv));
        self
    }

    /// Evaluates the map at a point; `None` when the point is a base point
    /// (all components vanish there).
    pub fn apply(&self, p: &ProjPoint<K>) -> Option<ProjPoint<K>> {
        let v = [
            self.components[0].eval(p.coords()),
            self.components[1].eval(p.coords()),
            self.components[2].eval(p.coords()),
        ];
        ProjPoint::new(v).ok()
    }
}

impl<K: Field> std::fmt::Display for CremonaMap<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{} : {} : {}]",
            self.components[0], self.components[1], self.components[2]
        )
    }
}

/// The strict transform of the curve `V(P)` under `f⁻¹`: substitutes `f`
/// into `P` and strips every factor shared with the Jacobian determinant
/// (those are the exceptional, contracted components). Demands birationality
/// evidence because the loop below is only geometrically meaningful then.
pub fn strict_transform<K: Field>(
    f: &CremonaMap<K>,
    p: &HomPoly3<K>,
) -> Result<HomPoly3<K>, CremonaError> {
    if f.inverse_witness.is_none() {
        return Err(CremonaError::NotBirational);
    }
    if p.is_constant() || p.is_zero() {
        return Err(CremonaError::ConstantCurve);
    }
    let jac = jacobian_det(&f.components)?;
    let mut q = p.substitute(&f.components)?;
    loop {
        let g = poly_gcd(&q, &jac)?;
        if g.is_constant() {
            break;
        }
        q = q.div_exact(&g).expect("gcd divides");
    }
    Ok(q.canonicalize())
}

/// Remainder of `p` on division by the single divisor `d` in graded-lex
/// order: the unique normal form whose terms are not divisible by the
/// leading term of `d`.
fn rem_mod<K: Field>(p: &HomPoly3<K>, d: &HomPoly3<K>) -> HomPoly3<K> {
    let (lt, lc) = match d.leading() {
        Some((e, c)) => (*e, c.clone()),
        None => return p.clone(),
    };
    let lc_inv = lc.inv().expect("leading coefficient nonzero");
    let mut rem = p.clone();
    let mut out = HomPoly3::zero();
    while let Some((&e, c)) = rem.leading() {
        if e.0 >= lt.0 && e.1 >= lt.1 && e.2 >= lt.2 {
            let q = HomPoly3::monomial(c.mul(&lc_inv), (e.0 - lt.0, e.1 - lt.1, e.2 - lt.2));
            rem = rem.sub(&q.mul(d)).expect("same degree");
        } else {
            // Leading term survives into the normal form; peel it off.
            let m = HomPoly3::monomial(c.clone(), e);
            out = out.add(&m).expect("same degree");
            rem = rem.sub(&m).expect("same degree");
        }
    }
    out
}

/// Rank over `K` of a family of polynomials, viewed as coefficient vectors
/// against their common monomial support.
fn span_rank<K: Field>(polys: &[HomPoly3<K>]) -> usize {
    use std::collections::BTreeSet;
    let support: BTreeSet<(u32, u32, u32)> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(e, _)| *e))
        .collect();
    let cols: Vec<(u32, u32, u32)> = support.into_iter().collect();
    if cols.is_empty() {
        return 0;
    }
    let zero = polys
        .iter()
        .find_map(|p| p.any_coeff())
        .expect("some poly nonzero")
        .zero_like();
    let mut rows: Vec<Vec<K>> = polys
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            cols.iter()
                .map(|e| {
                    p.terms()
                        .find(|(f, _)| *f == e)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(|| zero.clone())
                })
                .collect()
        })
        .collect();
    // Gaussian elimination.
    let mut rank = 0;
    for col in 0..cols.len() {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inv().expect("pivot nonzero");
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].mul(&inv);
                for c in col..cols.len() {
                    let t = rows[rank][c].mul(&factor);
                    rows[r][c] = rows[r][c].sub(&t);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Tests whether `f` contracts the irreducible curve `V(P)` to a point and
/// returns that point if so. The reductions of the components modulo `P`
/// span a 1-dimensional space exactly when the image of the curve is a
/// single point; the coefficients of the components against the common
/// residue give its coordinates. Irreducibility of `P` is the caller's
/// contract; only squarefreeness is checked.
pub fn contracted_image<K: Field>(
    f: &CremonaMap<K>,
    p: &HomPoly3<K>,
) -> Result<Option<ProjPoint<K>>, CremonaError> {
    if p.is_constant() || p.is_zero() {
        return Err(CremonaError::ConstantCurve);
    }
    for v in Var::ALL {
        let dp = p.derivative(v);
        if dp.is_zero() {
            continue;
        }
        if !poly_gcd(p, &dp)?.is_constant() {
            return Err(CremonaError::NotSquarefree);
        }
    }
    let p = p.canonicalize();
    let rems: Vec<HomPoly3<K>> = f.components.iter().map(|fi| rem_mod(fi, &p)).collect();
    if rems.iter().all(|r| r.is_zero()) {
        return Err(CremonaError::ZeroModP);
    }
    if span_rank(&rems) != 1 {
        return Ok(None);
    }
    // All residues are multiples of the first nonzero one; the multipliers
    // are the image coordinates.
    let omega = rems.iter().find(|r| !r.is_zero()).expect("checked above");
    let (&lead_e, lead_c) = omega.leading().expect("nonzero");
    let lead_inv = lead_c.inv().expect("nonzero");
    let coord = |r: &HomPoly3<K>| -> K {
        match r.terms().find(|(e, _)| **e == lead_e) {
            Some((_, c)) => c.mul(&lead_inv),
            None => lead_c.zero_like(),
        }
    };
    let pt = ProjPoint::new([coord(&rems[0]), coord(&rems[1]), coord(&rems[2])])
        .expect("span is nonzero");
    Ok(Some(pt))
}

// ---------------------------------------------------------------------------
// The de Jonquières subgroup
// ---------------------------------------------------------------------------

/// An element of the de Jonquières group: the maps preserving the pencil of
/// lines through `[0:0:1]`. In the affine chart these are
/// `(x, y) ↦ ((ax+b)/(cx+d), (α(x)y + β(x))/(γ(x)y + δ(x)))`,
/// stored as a Möbius matrix over the field and a fiber matrix over
/// univariate rational functions in `x`.
#[derive(Clone, PartialEq, Debug)]
pub struct DeJonquieresElement<K: Field> {
    mobius: [[K; 2]; 2],
    fiber: [[RatFun<K>; 2]; 2],
}

fn det2<K: Field>(m: &[[K; 2]; 2]) -> K {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

fn fiber_det<K: Field>(m: &[[RatFun<K>; 2]; 2]) -> RatFun<K> {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

impl<K: Field> DeJonquieresElement<K> {
    /// Builds an element, rejecting singular Möbius or fiber matrices.
    pub fn new(mobius: [[K; 2]; 2], fiber: [[RatFun<K>; 2]; 2]) -> Result<Self, CremonaError> {
        if det2(&mobius).is_zero() || fiber_det(&fiber).is_zero() {
            return Err(CremonaError::Singular);
        }
        Ok(DeJonquieresElement { mobius, fiber })
    }

    /// The identity element; needs a unit of the field as context.
    pub fn identity(one: &K) -> Self {
        let zero = one.zero_like();
        let fone = RatFun::from_poly(UniPoly::constant(one.clone()), one);
        let fzero = RatFun::from_poly(UniPoly::zero(), one);
        DeJonquieresElement {
            mobius: [[one.clone(), zero.clone()], [zero, one.clone()]],
            fiber: [[fone.clone(), fzero.clone()], [fzero, fone]],
        }
    }

    pub fn mobius(&self) -> &[[K; 2]; 2] {
        &self.mobius
    }

    pub fn fiber(&self) -> &[[RatFun<K>; 2]; 2] {
        &self.fiber
    }

    /// The inverse element: inverse Möbius part, and the fiber matrix
    /// inverted and precomposed with the inverse Möbius action.
    pub fn inverse(&self) -> Self {
        let m = &self.mobius;
        // Adjugate works projectively for the Möbius action.
        let minv = [
            [m[1][1].clone(), m[0][1].neg()],
            [m[1][0].neg(), m[0][0].clone()],
        ];
        let one = m[0][0].one_like();
        let minv_fun = RatFun::new(
            UniPoly::new(vec![minv[0][1].clone(), minv[0][0].clone()]),
            UniPoly::new(vec![minv[1][1].clone(), minv[1][0].clone()]),
        );
        let f = &self.fiber;
        // Fiber adjugate, entries precomposed with the inverse Möbius.
        let comp = |r: &RatFun<K>| r.compose_ratfun(&minv_fun);
        let finv = [
            [comp(&f[1][1]), comp(&f[0][1]).neg()],
            [comp(&f[1][0]).neg(), comp(&f[0][0])],
        ];
        let _ = one;
        DeJonquieresElement {
            mobius: minv,
            fiber: finv,
        }
    }

    /// Projective equality: both matrices agree up to (independent) scalar
    /// multiples.
    pub fn proj_eq(&self, other: &Self) -> bool {
        let m_cross = |i: usize, j: usize, k: usize, l: usize| {
            self.mobius[i][j].mul(&other.mobius[k][l])
                == self.mobius[k][l].mul(&other.mobius[i][j])
        };
        let f_cross = |i: usize, j: usize, k: usize, l: usize| {
            self.fiber[i][j].mul(&other.fiber[k][l]) == self.fiber[k][l].mul(&other.fiber[i][j])
        };
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        if !m_cross(i, j, k, l) || !f_cross(i, j, k, l) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// The Möbius action of a 2×2 matrix on `x` as a rational function.
fn mobius_fun<K: Field>(m: &[[K; 2]; 2]) -> RatFun<K> {
    RatFun::new(
        UniPoly::new(vec![m[0][1].clone(), m[0][0].clone()]),
        UniPoly::new(vec![m[1][1].clone(), m[1][0].clone()]),
    )
}

/// The semidirect-product law of `PGL₂(k) ⋉ PGL₂(k(x))`, in the order that
/// makes [`dejonq_to_cremona`] a homomorphism onto [`compose`]:
/// `(j1∘j2)(x,y) = j1(j2(x,y))`, so the Möbius parts multiply and the fiber
/// of the product is `F1(m2(x)) · F2(x)`.
pub fn dejonq_compose<K: Field>(
    j1: &DeJonquieresElement<K>,
    j2: &DeJonquieresElement<K>,
) -> DeJonquieresElement<K> {
    let m1 = &j1.mobius;
    let m2 = &j2.mobius;
    let mobius = [
        [
            m1[0][0].mul(&m2[0][0]).add(&m1[0][1].mul(&m2[1][0])),
            m1[0][0].mul(&m2[0][1]).add(&m1[0][1].mul(&m2[1][1])),
        ],
        [
            m1[1][0].mul(&m2[0][0]).add(&m1[1][1].mul(&m2[1][0])),
            m1[1][0].mul(&m2[0][1]).add(&m1[1][1].mul(&m2[1][1])),
        ],
    ];
    let m2_fun = mobius_fun(m2);
    let f1_at = |i: usize, j: usize| j1.fiber[i][j].compose_ratfun(&m2_fun);
    let f2 = &j2.fiber;
    let fiber = [
        [
            f1_at(0, 0).mul(&f2[0][0]).add(&f1_at(0, 1).mul(&f2[1][0])),
            f1_at(0, 0).mul(&f2[0][1]).add(&f1_at(0, 1).mul(&f2[1][1])),
        ],
        [
            f1_at(1, 0).mul(&f2[0][0]).add(&f1_at(1, 1).mul(&f2[1][0])),
            f1_at(1, 0).mul(&f2[0][1]).add(&f1_at(1, 1).mul(&f2[1][1])),
        ],
    ];
    DeJonquieresElement { mobius, fiber }
}

/// Homogenizes a univariate polynomial in `x` to a degree-`deg` homogeneous
/// polynomial in `x, z`.
fn homogenize_x<K: Field>(p: &UniPoly<K>, deg: u32) -> HomPoly3<K> {
    let mut out = HomPoly3::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let m = HomPoly3::monomial(c.clone(), (i as u32, 0, deg - i as u32));
        out = out.add(&m).expect("homogeneous by construction");
    }
    out
}

/// The Cremona map induced by a de Jonquières element: homogenize
/// `(x, y) ↦ ((ax+b)/(cx+d), (α(x)y+β(x))/(γ(x)y+δ(x)))` via `x = X/Z`,
/// `y = Y/Z` and clear denominators. The result carries the induced inverse
/// as a birationality witness.
pub fn dejonq_to_cremona<K: Field>(
    j: &DeJonquieresElement<K>,
) -> Result<CremonaMap<K>, CremonaError> {
    let mut f = dejonq_to_cremona_raw(j)?;
    let inv = dejonq_to_cremona_raw(&j.inverse())?;
    f = f.with_inverse_unchecked(inv);
    debug_assert!({
        let one = f.components()[0].any_coeff().unwrap().one_like();
        compose_no_witness(&f, f.inverse_witness().unwrap())
            .map(|c| c.components == CremonaMap::identity(&one).components)
            .unwrap_or(false)
    });
    Ok(f)
}

fn dejonq_to_cremona_raw<K: Field>(
    j: &DeJonquieresElement<K>,
) -> Result<CremonaMap<K>, CremonaError> {
    let m = &j.mobius;
    // Clear the fiber entries to polynomials over a common denominator.
    let mut common_den = UniPoly::constant(m[0][0].one_like());
    for row in &j.fiber {
        for e in row {
            let g = common_den.gcd(e.den());
            common_den = common_den.mul(&e.den().div_exact(&g).expect("gcd divides"));
        }
    }
    let cleared: Vec<UniPoly<K>> = j
        .fiber
        .iter()
        .flatten()
        .map(|e| {
            e.num()
                .mul(&common_den.div_exact(e.den()).expect("common multiple"))
        })
        .collect();
    let deg = cleared
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .expect("fiber matrix nonsingular") as u32;
    // Homogeneous degree-`deg` forms A, B, Γ, Δ in X, Z.
    let [a_f, b_f, g_f, d_f]: [HomPoly3<K>; 4] = [
        homogenize_x(&cleared[0], deg),
        homogenize_x(&cleared[1], deg),
        homogenize_x(&cleared[2], deg),
        homogenize_x(&cleared[3], deg),
    ];
    let one = m[0][0].one_like();
    let x = HomPoly3::variable(Var::X, &one);
    let y = HomPoly3::variable(Var::Y, &one);
    let z = HomPoly3::variable(Var::Z, &one);
    // Möbius numerator/denominator as linear forms in X, Z.
    let mob_num = x.scale(&m[0][0]).add(&z.scale(&m[0][1]))?;
    let mob_den = x.scale(&m[1][0]).add(&z.scale(&m[1][1]))?;
    // First coordinate (aX+bZ)/(cX+dZ), second (AY+BZ)/(ΓY+ΔZ), third 1;
    // clearing both denominators gives the component triple.
    let fib_num = a_f.mul(&y).add(&b_f.mul(&z))?;
    let fib_den = g_f.mul(&y).add(&d_f.mul(&z))?;
    normalize(
        mob_num.mul(&fib_den),
        fib_num.mul(&mob_den),
        mob_den.mul(&fib_den),
    )
}

/// Structural de Jonquières test: in the affine chart the first coordinate
/// must be a Möbius function of `x` alone and the second must have fiber
/// degree ≤ 1 in `y` on both sides of the fraction. Returns the
/// decomposition when the shape matches (verified by a round-trip through
/// [`dejonq_to_cremona`]); sound but conservative. Demands birationality
/// evidence.
pub fn is_dejonquieres<K: Field>(
    f: &CremonaMap<K>,
) -> Result<Option<DeJonquieresElement<K>>, CremonaError> {
    if f.inverse_witness.is_none() {
        return Err(CremonaError::NotBirational);
    }
    let [f0, f1, f2] = f.components();
    let one = f0
        .any_coeff()
        .or_else(|| f1.any_coeff())
        .or_else(|| f2.any_coeff())
        .expect("nonzero component")
        .one_like();
    if f0.is_zero() || f2.is_zero() {
        return Ok(None);
    }
    // First coordinate f0/f2 in lowest terms must be linear and y-free.
    let g = poly_gcd(f0, f2)?;
    let p = f0.div_exact(&g).expect("gcd divides");
    let q = f2.div_exact(&g).expect("gcd divides");
    let y_free = |h: &HomPoly3<K>| h.terms().all(|(e, _)| e.1 == 0);
    if p.degree() != Some(1) || !y_free(&p) || !y_free(&q) {
        return Ok(None);
    }
    let coeff = |h: &HomPoly3<K>, e: (u32, u32, u32)| -> K {
        h.terms()
            .find(|(f, _)| **f == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| one.zero_like())
    };
    let mobius = [
        [coeff(&p, (1, 0, 0)), coeff(&p, (0, 0, 1))],
        [coeff(&q, (1, 0, 0)), coeff(&q, (0, 0, 1))],
    ];
    if det2(&mobius).is_zero() {
        return Ok(None);
    }
    // Second coordinate f1/f2 in lowest terms must be fiberwise Möbius in y.
    let g = poly_gcd(f1, f2)?;
    let r = f1.div_exact(&g).expect("gcd divides");
    let s = f2.div_exact(&g).expect("gcd divides");
    let y_deg = |h: &HomPoly3<K>| h.terms().map(|(e, _)| e.1).max().unwrap_or(0);
    if y_deg(&r) > 1 || y_deg(&s) > 1 {
        return Ok(None);
    }
    // Split h = A(X,Z)·Y + B(X,Z), dehomogenized at Z = 1 as univariate
    // polynomials in x.
    let split = |h: &HomPoly3<K>| -> (UniPoly<K>, UniPoly<K>) {
        let mut ay: Vec<(usize, K)> = Vec::new();
        let mut b: Vec<(usize, K)> = Vec::new();
        for (e, c) in h.terms() {
            if e.1 == 1 {
                ay.push((e.0 as usize, c.clone()));
            } else {
                b.push((e.0 as usize, c.clone()));
            }
        }
        let build = |v: Vec<(usize, K)>| {
            let n = v.iter().map(|(i, _)| *i + 1).max().unwrap_or(0);
            let mut coeffs = vec![one.zero_like(); n];
            for (i, c) in v {
                coeffs[i] = c;
            }
            UniPoly::new(coeffs)
        };
        (build(ay), build(b))
    };
    let (alpha, beta) = split(&r);
    let (gamma, delta) = split(&s);
    let fiber = [
        [
            RatFun::from_poly(alpha, &one),
            RatFun::from_poly(beta, &one),
        ],
        [
            RatFun::from_poly(gamma, &one),
            RatFun::from_poly(delta, &one),
        ],
    ];
    if fiber_det(&fiber).is_zero() {
        return Ok(None);
    }
    let j = DeJonquieresElement { mobius, fiber };
    // Conservative verification: the decomposition must reproduce the map.
    if dejonq_to_cremona_raw(&j)?.components == f.components {
        Ok(Some(j))
    } else {
        Ok(None)
    }
}
