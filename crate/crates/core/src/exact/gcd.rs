//! Multivariate gcd of homogeneous trivariate polynomials.
//!
//! Strategy: split off the monomial content per variable, dehomogenize with
//! respect to `z` (a bijection on polynomials not divisible by any variable),
//! and compute a bivariate gcd in `K[x][y]` by content/primitive-part
//! splitting with a primitive polynomial remainder sequence. The result is
//! rehomogenized and normalized to the canonical form.

use std::collections::BTreeMap;

use super::field::Field;
use super::poly::HomPoly3;
use super::uni::UniPoly;
use super::ExactError;

/// A bivariate polynomial as a dense vector in `y` with `K[x]` coefficients.
type BiPoly<K> = Vec<UniPoly<K>>;

fn bi_trim<K: Field>(p: &mut BiPoly<K>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn bi_is_zero<K: Field>(p: &BiPoly<K>) -> bool {
    p.is_empty()
}

fn bi_scale<K: Field>(a: &BiPoly<K>, s: &UniPoly<K>) -> BiPoly<K> {
    let mut out: BiPoly<K> = a.iter().map(|c| c.mul(s)).collect();
    bi_trim(&mut out);
    out
}

fn bi_sub<K: Field>(a: &BiPoly<K>, b: &BiPoly<K>) -> BiPoly<K> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let c = match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.sub(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.neg(),
            (None, None) => unreachable!(),
        };
        out.push(c);
    }
    bi_trim(&mut out);
    out
}

/// Content in `K[x]`: monic gcd of the `y`-coefficients.
fn bi_content<K: Field>(p: &BiPoly<K>) -> UniPoly<K> {
    let mut g = UniPoly::zero();
    for c in p {
        g = g.gcd(c);
    }
    g
}

fn bi_div_exact_content<K: Field>(p: &BiPoly<K>, c: &UniPoly<K>) -> BiPoly<K> {
    p.iter()
        .map(|q| q.div_exact(c).expect("content divides"))
        .collect()
}

/// Pseudo-remainder of `a` by `b` in the variable `y`:
/// `lc(b)^(deg a - deg b + 1) * a = q*b + r` with `deg_y r < deg_y b`.
fn bi_pseudo_rem<K: Field>(a: &BiPoly<K>, b: &BiPoly<K>) -> BiPoly<K> {
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    let mut r = a.clone();
    while !bi_is_zero(&r) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        // r := lb * r - lr * y^(dr-db) * b
        let mut shifted_b = vec![UniPoly::zero(); dr - db];
        shifted_b.extend(b.iter().cloned());
        r = bi_sub(&bi_scale(&r, &lb), &bi_scale(&shifted_b, &lr));
        debug_assert!(bi_is_zero(&r) || r.len() - 1 < dr);
    }
    r
}

/// Gcd in `K[x][y]` via content splitting and a primitive PRS.
fn bi_gcd<K: Field>(a: &BiPoly<K>, b: &BiPoly<K>) -> BiPoly<K> {
    if bi_is_zero(a) {
        return b.clone();
    }
    if bi_is_zero(b) {
        return a.clone();
    }
    let ca = bi_content(a);
    let cb = bi_content(b);
    let cg = ca.gcd(&cb);
    let pa = bi_div_exact_content(a, &ca);
    let pb = bi_div_exact_content(b, &cb);
    let (mut f, mut g) = if pa.len() >= pb.len() {
        (pa, pb)
    } else {
        (pb, pa)
    };
    // Primitive polynomial remainder sequence.
    loop {
        let r = bi_pseudo_rem(&f, &g);
        if bi_is_zero(&r) {
            break;
        }
        let rc = bi_content(&r);
        f = g;
        g = bi_div_exact_content(&r, &rc);
    }
    // g is the gcd of the primitive parts (primitive by construction; a unit
    // content may remain, which the final canonicalization absorbs).
    let gc = bi_content(&g);
    let gp = bi_div_exact_content(&g, &gc);
    let mut out = bi_scale(&gp, &cg);
    bi_trim(&mut out);
    out
}

fn to_bi<K: Field>(p: &HomPoly3<K>) -> BiPoly<K> {
    let terms = p.dehomogenize_z();
    let dy = terms.keys().map(|&(_, j)| j).max().unwrap_or(0) as usize;
    let mut out = vec![UniPoly::zero(); dy + 1];
    let mut by_y: BTreeMap<u32, Vec<(u32, K)>> = BTreeMap::new();
    for ((i, j), c) in terms {
        by_y.entry(j).or_default().push((i, c));
    }
    for (j, row) in by_y {
        let dx = row.iter().map(|&(i, _)| i).max().unwrap() as usize;
        let zero = row[0].1.zero_like();
        let mut coeffs = vec![zero; dx + 1];
        for (i, c) in row {
            coeffs[i as usize] = c;
        }
        out[j as usize] = UniPoly::new(coeffs);
    }
    bi_trim(&mut out);
    out
}

fn from_bi<K: Field>(p: &BiPoly<K>) -> HomPoly3<K> {
    let mut terms: BTreeMap<(u32, u32), K> = BTreeMap::new();
    for (j, c) in p.iter().enumerate() {
        for (i, k) in c.coeffs().iter().enumerate() {
            if !k.is_zero() {
                terms.insert((i as u32, j as u32), k.clone());
            }
        }
    }
    HomPoly3::homogenize_z(&terms)
}

/// Greatest common divisor of two homogeneous polynomials, in the canonical
/// normalization (primitive with positive leading coefficient over `Q`,
/// monic over a prime field). Errors when both inputs are zero.
pub fn poly_gcd<K: Field>(a: &HomPoly3<K>, b: &HomPoly3<K>) -> Result<HomPoly3<K>, ExactError> {
    if a.is_zero() && b.is_zero() {
        return Err(ExactError::BothZero);
    }
    if a.is_zero() {
        return Ok(b.canonicalize());
    }
    if b.is_zero() {
        return Ok(a.canonicalize());
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let common = (ma.0.min(mb.0), ma.1.min(mb.1), ma.2.min(mb.2));
    let a1 = a.shift_down(ma);
    let b1 = b.shift_down(mb);
    // a1, b1 are divisible by no variable, so dehomogenization at z = 1 is
    // degree-preserving and multiplicative; the gcd transfers exactly.
    let g2 = bi_gcd(&to_bi(&a1), &to_bi(&b1));
    let g = from_bi(&g2).shift_up(common);
    debug_assert!(a.divisible_by(&g) && b.divisible_by(&g), "gcd must divide");
    Ok(g.canonicalize())
}
