//! Fans in ℤ², toric blow-ups, and the boundary combinatorics of monomial
//! maps: ray images, exceptional-component counts `E(f)`, resolutions of
//! monomial maps by refinement, and boundary-ray orbits.
//!
//! Ray ↔ line dictionary (fixed once, validated against the polynomial
//! Jacobian oracle in the tests): on the standard P² fan the ray `(1,0)`
//! corresponds to the coordinate line `{x=0}`, `(0,1)` to `{y=0}`, and
//! `(−1,−1)` to `{z=0}`. A monomial matrix `A` acts on rays by plain matrix
//! multiplication followed by passing to the primitive vector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::monomial::{is_loxodromic, IntMatrix2, MonomialError};

/// Errors from fan and resolution operations.
#[derive(Error, Debug, PartialEq)]
pub enum ToricError {
    #[error("rays are not adjacent in the fan")]
    NotAdjacent,
    #[error("vector is zero and spans no ray")]
    ZeroRay,
    #[error("matrix is not loxodromic")]
    NotLoxodromic,
    #[error(transparent)]
    Monomial(#[from] MonomialError),
}

/// A primitive lattice ray in ℤ².
pub type Ray = [BigInt; 2];

/// The primitive vector on the ray through `v`.
pub fn primitive(v: &[BigInt; 2]) -> Result<Ray, ToricError> {
    if v[0].is_zero() && v[1].is_zero() {
        return Err(ToricError::ZeroRay);
    }
    let g = v[0].gcd(&v[1]);
    Ok([&v[0] / &g, &v[1] / &g])
}

fn cross(a: &Ray, b: &Ray) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Total angular order on nonzero lattice vectors starting at the positive
/// x-axis: lower half-plane strictly after the upper, ties broken by the
/// cross product.
fn angle_class(v: &Ray) -> u8 {
    if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
        0
    } else {
        1
    }
}

fn angle_lt(a: &Ray, b: &Ray) -> bool {
    let (ca, cb) = (angle_class(a), angle_class(b));
    if ca != cb {
        return ca < cb;
    }
    cross(a, b).is_positive()
}

fn apply(a: &IntMatrix2, v: &Ray) -> [BigInt; 2] {
    [
        a.entry(0, 0) * &v[0] + a.entry(0, 1) * &v[1],
        a.entry(1, 0) * &v[0] + a.entry(1, 1) * &v[1],
    ]
}

/// A complete fan in ℤ²: primitive rays in strict cyclic (angular) order,
/// with the 2-cones implicit between adjacent rays.
#[derive(Clone, PartialEq, Debug)]
pub struct Fan2D {
    rays: Vec<Ray>,
}

impl Fan2D {
    /// Builds a fan from rays (made primitive and sorted); rejects parallel
    /// duplicates implicitly by deduplication.
    pub fn new(rays: Vec<[BigInt; 2]>) -> Result<Self, ToricError> {
        let mut prim: Vec<Ray> = rays.iter().map(primitive).collect::<Result<_, _>>()?;
        prim.sort_by(|a, b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if angle_lt(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        prim.dedup();
        Ok(Fan2D { rays: prim })
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn contains_ray(&self, r: &Ray) -> bool {
        self.rays.contains(r)
    }

    /// Smooth iff every adjacent pair spans a unimodular cone.
    pub fn is_smooth(&self) -> bool {
        let n = self.rays.len();
        (0..n).all(|i| {
            let d = cross(&self.rays[i], &self.rays[(i + 1) % n]);
            d == BigInt::from(1) || d == BigInt::from(-1)
        })
    }

    /// Complete iff the rays wind once around the origin with every adjacent
    /// cone strictly convex.
    pub fn is_complete(&self) -> bool {
        let n = self.rays.len();
        n >= 3
            && (0..n).all(|i| cross(&self.rays[i], &self.rays[(i + 1) % n]) > BigInt::zero())
    }

    /// The index of the 2-cone (between ray `i` and ray `i+1`) whose closed
    /// cone contains `v`; with strict containment information.
    fn locate(&self, v: &Ray) -> (usize, bool) {
        let n = self.rays.len();
        for i in 0..n {
            let a = &self.rays[i];
            let b = &self.rays[(i + 1) % n];
            let da = cross(a, v);
            let db = cross(v, b);
            if !da.is_negative() && !db.is_negative() {
                return (i, da.is_positive() && db.is_positive());
            }
        }
        unreachable!("complete fan covers the plane");
    }

    pub fn insert_ray(&mut self, r: Ray) {
        if self.contains_ray(&r) {
            return;
        }
        let pos = self
            .rays
            .iter()
            .position(|s| angle_lt(&r, s))
            .unwrap_or(self.rays.len());
        self.rays.insert(pos, r);
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self
            .rays
            .iter()
            .map(|r| [r[0].to_string(), r[1].to_string()])
            .collect::<Vec<_>>())
    }
}

impl fmt::Display for Fan2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rays
            .iter()
            .map(|r| format!("({},{})", r[0], r[1]))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The fan of P²: rays `(1,0)`, `(0,1)`, `(−1,−1)`.
pub fn standard_p2_fan() -> Fan2D {
    Fan2D::new(vec![
        [BigInt::from(1), BigInt::from(0)],
        [BigInt::from(0), BigInt::from(1)],
        [BigInt::from(-1), BigInt::from(-1)],
    ])
    .expect("valid rays")
}

/// One recorded blow-up: the inserted primitive ray together with the
/// adjacent pair spanning the blown-up toric point.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BlowUpStep {
    pub inserted: [String; 2],
    pub between: [[String; 2]; 2],
}

/// A toric surface presented as an explicit blow-up history over P²:
/// replaying `history` from the standard fan reproduces `fan`, and every
/// inserted ray is the sum of its two neighbors at insertion time.
#[derive(Clone, PartialEq, Debug)]
pub struct ToricSurfaceModel {
    fan: Fan2D,
    history: Vec<(Ray, (Ray, Ray))>,
}

impl ToricSurfaceModel {
    pub fn standard() -> Self {
        ToricSurfaceModel {
            fan: standard_p2_fan(),
            history: Vec::new(),
        }
    }

    pub fn fan(&self) -> &Fan2D {
        &self.fan
    }

    pub fn history(&self) -> &[(Ray, (Ray, Ray))] {
        &self.history
    }

    /// Number of boundary components (= number of rays).
    pub fn boundary_components(&self) -> usize {
        self.fan.num_rays()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let hist: Vec<BlowUpStep> = self
            .history
            .iter()
            .map(|(r, (a, b))| BlowUpStep {
                inserted: [r[0].to_string(), r[1].to_string()],
                between: [
                    [a[0].to_string(), a[1].to_string()],
                    [b[0].to_string(), b[1].to_string()],
                ],
            })
            .collect();
        serde_json::json!({
            "rays": self.fan.to_json(),
            "history": hist,
        })
    }
}

/// Blows up the toric point of the cone spanned by the adjacent rays
/// `(a, b)`: inserts their (automatically primitive) sum and extends the
/// history. Smoothness is preserved because the new cones have the same
/// determinants as the old one.
pub fn blow_up(
    model: &ToricSurfaceModel,
    a: &Ray,
    b: &Ray,
) -> Result<ToricSurfaceModel, ToricError> {
    let rays = model.fan.rays();
    let n = rays.len();
    let adjacent = (0..n).any(|i| {
        (&rays[i] == a && &rays[(i + 1) % n] == b) || (&rays[i] == b && &rays[(i + 1) % n] == a)
    });
    if !adjacent {
        return Err(ToricError::NotAdjacent);
    }
    let sum = [&a[0] + &b[0], &a[1] + &b[1]];
    let mut fan = model.fan.clone();
    fan.insert_ray(sum.clone());
    let mut history = model.history.clone();
    history.push((sum, (a.clone(), b.clone())));
    Ok(ToricSurfaceModel { fan, history })
}

/// Where a boundary ray goes under the monomial map of `A`, measured against
/// a target fan: either onto a ray (the component maps onto a boundary
/// component) or into the interior of a 2-cone (the component is contracted
/// to that cone's toric point).
#[derive(Clone, PartialEq, Debug)]
pub enum RayImage {
    OntoRay(Ray),
    IntoConeInterior(Ray, Ray),
}

/// Computes the primitive image of a ray under `A` and classifies it
/// against the target fan.
pub fn ray_image(a: &IntMatrix2, ray: &Ray, target: &Fan2D) -> Result<RayImage, ToricError> {
    if !a.is_unimodular() {
        return Err(MonomialError::NotUnimodular.into());
    }
    let w = primitive(&apply(a, ray))?;
    if target.contains_ray(&w) {
        return Ok(RayImage::OntoRay(w));
    }
    let (i, strict) = target.locate(&w);
    debug_assert!(strict, "non-ray image lies strictly inside its cone");
    let n = target.num_rays();
    Ok(RayImage::IntoConeInterior(
        target.rays()[i].clone(),
        target.rays()[(i + 1) % n].clone(),
    ))
}

/// `E(f_A)`: the number of irreducible exceptional components of the
/// monomial map of `A`, counted torically as the standard-fan rays whose
/// image falls into a cone interior (those boundary lines are contracted to
/// toric points). Agrees with the count of distinct coordinate-line factors
/// of the Jacobian of the induced Cremona map.
pub fn e_of_monomial(a: &IntMatrix2) -> Result<usize, ToricError> {
    let fan = standard_p2_fan();
    let mut count = 0;
    for ray in fan.rays() {
        if matches!(ray_image(a, ray, &fan)?, RayImage::IntoConeInterior(..)) {
            count += 1;
        }
    }
    Ok(count)
}

/// Whether `A` maps every 2-cone of `source` into a single 2-cone of
/// `target` (the monomial map is then a toric morphism source → target).
pub fn is_morphism(a: &IntMatrix2, source: &Fan2D, target: &Fan2D) -> Result<bool, ToricError> {
    let rays = source.rays();
    let n = rays.len();
    for i in 0..n {
        let mut u = primitive(&apply(a, &rays[i]))?;
        let mut v = primitive(&apply(a, &rays[(i + 1) % n]))?;
        if cross(&u, &v).is_negative() {
            std::mem::swap(&mut u, &mut v);
        }
        // The image cone ⟨u, v⟩ (unimodular, hence salient) must lie inside
        // one closed target cone.
        let m = target.num_rays();
        let contained = (0..m).any(|j| {
            let t1 = &target.rays()[j];
            let t2 = &target.rays()[(j + 1) % m];
            !cross(t1, &u).is_negative()
                && !cross(&u, t2).is_negative()
                && !cross(t1, &v).is_negative()
                && !cross(&v, t2).is_negative()
        });
        if !contained {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Resolves the monomial map of `A` into a toric morphism: repeatedly blows
/// up any source cone whose image straddles more than one target cone
/// (mediant insertion converges to the rational directions `A⁻¹·ray` in
/// finitely many steps), then removes insertions that turned out unnecessary
/// and rebuilds a minimal blow-up history.
pub fn resolve_monomial(
    a: &IntMatrix2,
) -> Result<(ToricSurfaceModel, ToricSurfaceModel), ToricError> {
    if !a.is_unimodular() {
        return Err(MonomialError::NotUnimodular.into());
    }
    let target = ToricSurfaceModel::standard();
    let mut source = ToricSurfaceModel::standard();
    // Refinement loop.
    loop {
        let rays = source.fan.rays().to_vec();
        let n = rays.len();
        let mut blew = false;
        for i in 0..n {
            let u = &rays[i];
            let v = &rays[(i + 1) % n];
            if !cone_maps_into_target(a, u, v, target.fan())? {
                source = blow_up(&source, u, v)?;
                blew = true;
                break;
            }
        }
        if !blew {
            break;
        }
    }
    // Minimality pass: drop inserted rays that are not needed, then rebuild
    // the history by blow-downs.
    let standard = standard_p2_fan();
    let mut keep: Vec<Ray> = source.fan.rays().to_vec();
    let inserted: Vec<Ray> = keep
        .iter()
        .filter(|r| !standard.contains_ray(r))
        .cloned()
        .collect();
    for r in inserted {
        let trial: Vec<Ray> = keep.iter().filter(|s| **s != r).cloned().collect();
        let trial_fan = Fan2D::new(trial.clone())?;
        if trial_fan.is_smooth() && fan_maps_into_target(a, &trial_fan, target.fan())? {
            if rebuild_history(&trial_fan).is_some() {
                keep = trial;
            }
        }
    }
    let final_fan = Fan2D::new(keep)?;
    let source = rebuild_history(&final_fan).expect("greedy fan is replayable");
    debug_assert!(is_morphism(a, source.fan(), target.fan())?);
    Ok((source, target))
}

fn cone_maps_into_target(
    a: &IntMatrix2,
    u: &Ray,
    v: &Ray,
    target: &Fan2D,
) -> Result<bool, ToricError> {
    let mut iu = primitive(&apply(a, u))?;
    let mut iv = primitive(&apply(a, v))?;
    if cross(&iu, &iv).is_negative() {
        std::mem::swap(&mut iu, &mut iv);
    }
    let m = target.num_rays();
    Ok((0..m).any(|j| {
        let t1 = &target.rays()[j];
        let t2 = &target.rays()[(j + 1) % m];
        !cross(t1, &iu).is_negative()
            && !cross(&iu, t2).is_negative()
            && !cross(t1, &iv).is_negative()
            && !cross(&iv, t2).is_negative()
    }))
}

fn fan_maps_into_target(a: &IntMatrix2, fan: &Fan2D, target: &Fan2D) -> Result<bool, ToricError> {
    let n = fan.num_rays();
    for i in 0..n {
        if !cone_maps_into_target(a, &fan.rays()[i], &fan.rays()[(i + 1) % n], target)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rebuilds a blow-up history for a smooth complete fan over the standard
/// P² fan by repeated blow-downs: a removable ray is one equal to the sum of
/// its neighbors. Returns `None` when the fan is not reachable by smooth
/// blow-ups (cannot happen for fans produced by the refinement loop).
fn rebuild_history(fan: &Fan2D) -> Option<ToricSurfaceModel> {
    let standard = standard_p2_fan();
    let mut rays = fan.rays().to_vec();
    let mut reversed: Vec<(Ray, (Ray, Ray))> = Vec::new();
    while rays.len() > standard.num_rays() {
        let n = rays.len();
        let mut removed = false;
        for i in 0..n {
            let r = &rays[i];
            if standard.contains_ray(r) {
                continue;
            }
            let prev = &rays[(i + n - 1) % n];
            let next = &rays[(i + 1) % n];
            if r[0] == &prev[0] + &next[0] && r[1] == &prev[1] + &next[1] {
                reversed.push((r.clone(), (prev.clone(), next.clone())));
                rays.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return None;
        }
    }
    if Fan2D::new(rays.clone()).ok()? != standard {
        return None;
    }
    // Replay forwards to validate.
    let mut model = ToricSurfaceModel::standard();
    for (_, (a, b)) in reversed.iter().rev() {
        model = blow_up(&model, a, b).ok()?;
    }
    (model.fan == *fan).then_some(model)
}

/// A boundary-ray orbit report: the primitive ray sequence, the image tags
/// against the supplied fan, and the step index of a fixed ray if one ever
/// appears (it must not, for loxodromic `A`).
#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub rays: Vec<Ray>,
    pub tags: Vec<RayImage>,
    pub fixed_at: Option<usize>,
}

/// Iterates the primitive ray images of `ray` under a loxodromic `A` for up
/// to `max_steps`, tagging each image against `fan` and watching for a fixed
/// ray.
pub fn boundary_orbit(
    a: &IntMatrix2,
    ray: &Ray,
    max_steps: usize,
    fan: &Fan2D,
) -> Result<OrbitReport, ToricError> {
    if !is_loxodromic(a)? {
        return Err(ToricError::NotLoxodromic);
    }
    let mut current = primitive(ray)?;
    let mut rays = vec![current.clone()];
    let mut tags = Vec::new();
    let mut fixed_at = None;
    for step in 0..max_steps {
        tags.push(ray_image(a, &current, fan)?);
        let next = primitive(&apply(a, &current))?;
        if next == current {
            fixed_at = Some(step);
            break;
        }
        current = next;
        rays.push(current.clone());
    }
    Ok(OrbitReport {
        rays,
        tags,
        fixed_at,
    })
}
