//! The pointed-curve side: the plane cubic
//! `Y(XY + 2 q4 Z^2) = X^3 + p2 X^2 Z + p4 X Z^2 + p6 Z^3` with its three
//! marked points on `Z = 0`, point counts and group structure over `F_q`,
//! Weierstrass models, minimal integral data over `F_q(t)`, membership in
//! the squarefree locus `X_D` on `P^1` (including the place at infinity),
//! Kodaira `I0`/`I1` detection, sampling, and the group-side count of the
//! stabilizer `Z_G(kappa_b)(F_q)`.
//!
//! Affine chart `Z = 1`: `x y^2 + 2 q4 y = g(x)` with
//! `g(x) = x^3 + p2 x^2 + p4 x + p6`. Putting `w = x y + q4` turns it into
//! `w^2 = f(x)`, `f(x) = x g(x) + q4^2` the quartic of the invariants; the
//! origin `O = [0:1:0]` corresponds to `(x, w) = (0, -q4)`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::core_algebra::funcfield::{self, inv_mod, Place, PolyRing, RatFunc};
use crate::core_algebra::linalg::{self, Mat};
use crate::core_algebra::poly::{self, Poly};
use crate::core_algebra::{quartic_disc, Field, Gf, InvTuple, Ring};
use crate::invariants_sections::InvariantTheory;
use crate::lie_d4::{PAIR, S_DIAG};
use crate::rng::{self, job};
use crate::AlgebraError;

/// Default bound on `q` for exhaustive point enumeration.
pub const DEFAULT_MAX_Q: u64 = 101;

/// Default cap on rejection-sampling attempts per requested sample.
pub const DEFAULT_MAX_TRIES_PER_SAMPLE: u64 = 10_000;

/// Weights of `(p2, p4, q4, p6)` under the scaling action.
pub const WEIGHTS: [i64; 4] = [1, 2, 2, 3];

/// A projective point, normalized so that its last nonzero coordinate is 1.
pub type Point = [u32; 3];

fn normalize(k: &Gf, v: [u32; 3]) -> Point {
    let i = (0..3).rev().find(|&i| v[i] != 0).expect("nonzero vector");
    let c = k.inv(&v[i]).expect("nonzero");
    v.map(|x| k.mul(&x, &c))
}

fn proportional(k: &Gf, a: &[u32; 3], b: &[u32; 3]) -> bool {
    let cross = [
        k.sub(&k.mul(&a[1], &b[2]), &k.mul(&a[2], &b[1])),
        k.sub(&k.mul(&a[2], &b[0]), &k.mul(&a[0], &b[2])),
        k.sub(&k.mul(&a[0], &b[1]), &k.mul(&a[1], &b[0])),
    ];
    cross.iter().all(|c| *c == 0)
}

fn comb(k: &Gf, s: &u32, a: &[u32; 3], t: &u32, b: &[u32; 3]) -> [u32; 3] {
    [0, 1, 2].map(|i| k.add(&k.mul(s, &a[i]), &k.mul(t, &b[i])))
}

/// The curve of a tuple `b` over a finite field, with its group law
/// (chord and tangent on the plane cubic, neutral element `O`).
#[derive(Clone, Debug)]
pub struct PointedCurve {
    k: Gf,
    b: InvTuple<u32>,
}

impl PointedCurve {
    /// The smooth curve of `b`; singular tuples (`disc = 0`) are rejected.
    pub fn new(k: &Gf, b: &InvTuple<u32>) -> Result<Self, AlgebraError> {
        if k.is_zero(&quartic_disc(k, b)) {
            return Err(AlgebraError::Precondition("singular curve: disc(b) = 0".into()));
        }
        Ok(PointedCurve {
            k: k.clone(),
            b: b.clone(),
        })
    }

    pub fn field(&self) -> &Gf {
        &self.k
    }

    pub fn invariants(&self) -> &InvTuple<u32> {
        &self.b
    }

    /// The neutral element `O = [0:1:0]`.
    pub fn origin(&self) -> Point {
        [0, 1, 0]
    }

    /// The marked points `O = [0:1:0]`, `P = [-1:1:0]`, `Q = [1:1:0]`.
    pub fn marked_points(&self) -> [Point; 3] {
        [[0, 1, 0], [self.k.neg(&1), 1, 0], [1, 1, 0]]
    }

    /// The cubic form `F(X, Y, Z)`; points of the curve are its zeros.
    pub fn form(&self, v: &[u32; 3]) -> u32 {
        let k = &self.k;
        let [x, y, z] = v;
        let b = &self.b;
        let z2 = k.mul(z, z);
        let lhs = k.mul(y, &k.add(&k.mul(x, y), &k.mul(&k.mul(&2, &b.q4), &z2)));
        // Horner in X with coefficients in Z.
        let mut rhs = k.mul(x, &k.mul(x, x));
        rhs = k.add(&rhs, &k.mul(&b.p2, &k.mul(&k.mul(x, x), z)));
        rhs = k.add(&rhs, &k.mul(&b.p4, &k.mul(x, &z2)));
        rhs = k.add(&rhs, &k.mul(&b.p6, &k.mul(&z2, z)));
        k.sub(&lhs, &rhs)
    }

    fn gradient(&self, v: &[u32; 3]) -> [u32; 3] {
        let k = &self.k;
        let [x, y, z] = v;
        let b = &self.b;
        let n = |c: i64| k.from_i64(c);
        let (x2, z2) = (k.mul(x, x), k.mul(z, z));
        // F = X Y^2 + 2 q4 Y Z^2 - X^3 - p2 X^2 Z - p4 X Z^2 - p6 Z^3
        let fx = k.sum(&[
            k.mul(y, y),
            k.neg(&k.mul(&n(3), &x2)),
            k.neg(&k.mul(&n(2), &k.mul(&b.p2, &k.mul(x, z)))),
            k.neg(&k.mul(&b.p4, &z2)),
        ]);
        let fy = k.add(&k.mul(&n(2), &k.mul(x, y)), &k.mul(&n(2), &k.mul(&b.q4, &z2)));
        let fz = k.sum(&[
            k.mul(&n(4), &k.mul(&b.q4, &k.mul(y, z))),
            k.neg(&k.mul(&b.p2, &x2)),
            k.neg(&k.mul(&n(2), &k.mul(&b.p4, &k.mul(x, z)))),
            k.neg(&k.mul(&n(3), &k.mul(&b.p6, &z2))),
        ]);
        [fx, fy, fz]
    }

    pub fn contains(&self, v: &Point) -> bool {
        self.form(v) == 0
    }

    /// All `F_q`-points: the three points at infinity followed by the affine
    /// points `(x, y)` found by solving the quadratic in `y` over each `x`.
    pub fn points(&self) -> Vec<Point> {
        let k = &self.k;
        let b = &self.b;
        let mut out = self.marked_points().to_vec();
        let two_q4 = k.mul(&2, &b.q4);
        let quartic = b.quartic(k);
        for x in k.elements() {
            if x == 0 {
                // 2 q4 y = p6; if q4 = 0 then p6 != 0 by smoothness.
                if b.q4 != 0 {
                    let y = k.div(&b.p6, &two_q4).expect("nonzero");
                    out.push([0, y, 1]);
                }
                continue;
            }
            let fx = poly::eval(k, &quartic, &x);
            let Some(w) = k.sqrt(&fx) else { continue };
            let ws = if w == 0 { vec![w] } else { vec![w, k.neg(&w)] };
            for w in ws {
                let y = k.div(&k.sub(&w, &b.q4), &x).expect("nonzero");
                out.push([x, y, 1]);
            }
        }
        out
    }

    /// Third intersection of the line through `a` and `b` (the tangent line
    /// if they coincide) with the curve.
    pub fn third_point(&self, a: &Point, b: &Point) -> Point {
        let k = &self.k;
        let half = k.inv(&2).expect("odd characteristic");
        if !proportional(k, a, b) {
            // F(s a + t b) = s t (alpha s + beta t).
            let c11 = self.form(&comb(k, &1, a, &1, b));
            let c1m = self.form(&comb(k, &1, a, &k.neg(&1), b));
            let alpha = k.mul(&half, &k.sub(&c11, &c1m));
            let beta = k.mul(&half, &k.add(&c11, &c1m));
            return normalize(k, comb(k, &beta, a, &k.neg(&alpha), b));
        }
        // Tangent: pick c != a with grad F(a) . c = 0; F(s a + t c) = t^2 (gamma s + delta t).
        let g = self.gradient(a);
        let candidates = [
            [g[1], k.neg(&g[0]), 0],
            [g[2], 0, k.neg(&g[0])],
            [0, g[2], k.neg(&g[1])],
        ];
        let c = candidates
            .into_iter()
            .find(|c| c.iter().any(|x| *x != 0) && !proportional(k, a, c))
            .expect("smooth point has a tangent line");
        let delta = self.form(&c);
        let gamma = k.sub(&self.form(&comb(k, &1, a, &1, &c)), &delta);
        normalize(k, comb(k, &delta, a, &k.neg(&gamma), &c))
    }

    /// Group law with neutral element `O`.
    pub fn add(&self, a: &Point, b: &Point) -> Point {
        let r = self.third_point(a, b);
        self.third_point(&self.origin(), &r)
    }

    pub fn neg(&self, a: &Point) -> Point {
        let o = self.origin();
        let oo = self.third_point(&o, &o);
        self.third_point(a, &oo)
    }

    /// `n a` by double-and-add.
    pub fn mul(&self, mut n: u64, a: &Point) -> Point {
        let mut acc = self.origin();
        let mut base = *a;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// Order of a point by repeated addition.
    pub fn order(&self, a: &Point) -> u64 {
        let o = self.origin();
        let mut p = *a;
        let mut n = 1;
        while p != o {
            p = self.add(&p, a);
            n += 1;
        }
        n
    }
}

/// `#E(F_q)` and the group structure `Z/n1 x Z/n2` with `n1 | n2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupStructure {
    pub q: u64,
    pub n_points: u64,
    pub n1: u64,
    pub n2: u64,
    pub two_torsion: usize,
}

/// Point count, group structure (exhaustive orders) and `#E(F_q)[2]`.
pub fn curve_group(k: &Gf, b: &InvTuple<u32>, max_q: u64) -> Result<GroupStructure, AlgebraError> {
    if k.order() > max_q {
        return Err(AlgebraError::Precondition(format!(
            "q = {} exceeds the enumeration bound {max_q}",
            k.order()
        )));
    }
    let e = PointedCurve::new(k, b)?;
    let pts = e.points();
    let n = pts.len() as u64;
    let orders: Vec<u64> = pts.iter().map(|p| e.order(p)).collect();
    let n2 = *orders.iter().max().expect("O is a point");
    let n1 = n / n2;
    let two_torsion = orders.iter().filter(|&&o| o <= 2).count();
    let killed = orders.iter().filter(|&&o| n1 % o == 0).count() as u64;
    if n % n2 != 0 || n2 % n1 != 0 || killed != n1 * n1 {
        return Err(AlgebraError::Consistency(format!(
            "inconsistent group structure: N = {n}, exponent {n2}"
        )));
    }
    Ok(GroupStructure {
        q: k.order(),
        n_points: n,
        n1,
        n2,
        two_torsion,
    })
}

/// A short Weierstrass curve `Y^2 = X^3 + a X + b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShortWeierstrass {
    pub a: u32,
    pub b: u32,
}

/// Affine point of a short Weierstrass curve, `None` for the point at infinity.
pub type WPoint = Option<(u32, u32)>;

impl ShortWeierstrass {
    pub fn discriminant(&self, k: &Gf) -> u32 {
        let a3 = k.pow(&self.a, 3);
        let b2 = k.mul(&self.b, &self.b);
        k.mul(&k.from_i64(-16), &k.add(&k.mul(&4, &a3), &k.mul(&k.from_i64(27), &b2)))
    }

    /// `j = 1728 * 4a^3 / (4a^3 + 27 b^2)`, `None` when singular.
    pub fn j_invariant(&self, k: &Gf) -> Option<u32> {
        let a3 = k.mul(&4, &k.pow(&self.a, 3));
        let den = k.add(&a3, &k.mul(&k.from_i64(27), &k.mul(&self.b, &self.b)));
        k.div(&k.mul(&k.from_i64(1728), &a3), &den)
    }

    pub fn contains(&self, k: &Gf, p: &WPoint) -> bool {
        match p {
            None => true,
            Some((x, y)) => {
                let rhs = k.add(&k.add(&k.pow(x, 3), &k.mul(&self.a, x)), &self.b);
                k.mul(y, y) == rhs
            }
        }
    }

    /// The point at infinity followed by all affine points.
    pub fn points(&self, k: &Gf) -> Vec<WPoint> {
        let mut out = vec![None];
        for x in k.elements() {
            let rhs = k.add(&k.add(&k.pow(&x, 3), &k.mul(&self.a, &x)), &self.b);
            if let Some(y) = k.sqrt(&rhs) {
                out.push(Some((x, y)));
                if y != 0 {
                    out.push(Some((x, k.neg(&y))));
                }
            }
        }
        out
    }

    pub fn add(&self, k: &Gf, p: &WPoint, q: &WPoint) -> WPoint {
        let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
            return p.or(*q);
        };
        let lambda = if x1 != x2 {
            k.div(&k.sub(y2, y1), &k.sub(x2, x1)).expect("distinct x")
        } else if k.add(y1, y2) == 0 {
            return None;
        } else {
            let num = k.add(&k.mul(&3, &k.mul(x1, x1)), &self.a);
            k.div(&num, &k.mul(&2, y1)).expect("y != 0")
        };
        let x3 = k.sub(&k.sub(&k.mul(&lambda, &lambda), x1), x2);
        let y3 = k.sub(&k.mul(&lambda, &k.sub(x1, &x3)), y1);
        Some((x3, y3))
    }

    /// Number of roots of the 2-division cubic `X^3 + a X + b` in `F_q`, plus one.
    pub fn two_torsion_count(&self, k: &Gf) -> usize {
        1 + poly::roots(k, &vec![self.b, self.a, 0, 1]).len()
    }
}

/// The classical quartic invariants `I`, `J` of `f(x) = x^4 + p2 x^3 + p4
/// x^2 + p6 x + q4^2`, over any commutative ring.
pub fn quartic_ij<R: Ring>(r: &R, b: &InvTuple<R::Elem>) -> (R::Elem, R::Elem) {
    let (bb, c, d) = (&b.p2, &b.p4, &b.p6);
    let e = r.mul(&b.q4, &b.q4);
    let n = |x: i64| r.from_i64(x);
    let m = |x: &R::Elem, y: &R::Elem| r.mul(x, y);
    let i = r.sum(&[m(&n(12), &e), m(&n(-3), &m(bb, d)), m(c, c)]);
    let j = r.sum(&[
        m(&n(72), &m(c, &e)),
        m(&n(9), &m(bb, &m(c, d))),
        m(&n(-27), &m(d, d)),
        m(&n(-27), &m(&e, &m(bb, bb))),
        m(&n(-2), &m(c, &m(c, c))),
    ]);
    (i, j)
}

/// The Jacobian model `Y^2 = X^3 - 27 I X - 27 J` of `w^2 = f(x)`.
pub fn jacobian_model(k: &Gf, b: &InvTuple<u32>) -> ShortWeierstrass {
    let (i, j) = quartic_ij(k, b);
    let c = k.from_i64(-27);
    ShortWeierstrass {
        a: k.mul(&c, &i),
        b: k.mul(&c, &j),
    }
}

/// An explicit isomorphism from the plane cubic of `b` onto a short
/// Weierstrass curve, sending `O` to the point at infinity.
///
/// The cubic is first moved to `w^2 = f(x)`. When `q4 != 0` the classical
/// transformation for a quartic with square constant term (centred at
/// `(x, w) = (0, -q4)`, the image of `O`) yields a long Weierstrass model;
/// when `q4 = 0` the substitution `x = 1/s` does. Completing the square and
/// the cube gives the short model.
#[derive(Clone, Debug)]
pub struct WeierstrassTransform {
    curve: PointedCurve,
    /// `(a1, a2, a3, a4, a6)` of the long model.
    pub long: [u32; 5],
    pub short: ShortWeierstrass,
}

impl WeierstrassTransform {
    pub fn new(curve: &PointedCurve) -> Self {
        let k = &curve.k;
        let b = &curve.b;
        let (c, d) = (b.p4, b.p6);
        let long = if b.q4 != 0 {
            let q = k.neg(&b.q4);
            let a1 = k.div(&d, &q).expect("nonzero");
            let a2 = k.sub(&c, &k.div(&k.mul(&d, &d), &k.mul(&4, &k.mul(&q, &q))).expect("nonzero"));
            let a3 = k.mul(&2, &k.mul(&q, &b.p2));
            let a4 = k.neg(&k.mul(&4, &k.mul(&q, &q)));
            [a1, a2, a3, a4, k.mul(&a2, &a4)]
        } else {
            [0, c, 0, k.mul(&b.p2, &d), k.mul(&d, &d)]
        };
        let [a1, a2, a3, a4, a6] = long;
        let b2 = k.add(&k.mul(&a1, &a1), &k.mul(&4, &a2));
        let b4 = k.add(&k.mul(&2, &a4), &k.mul(&a1, &a3));
        let b6 = k.add(&k.mul(&a3, &a3), &k.mul(&4, &a6));
        let c4 = k.sub(&k.mul(&b2, &b2), &k.mul(&k.from_i64(24), &b4));
        let c6 = k.sum(&[
            k.neg(&k.pow(&b2, 3)),
            k.mul(&k.from_i64(36), &k.mul(&b2, &b4)),
            k.mul(&k.from_i64(-216), &b6),
        ]);
        let short = ShortWeierstrass {
            a: k.mul(&k.from_i64(-27), &c4),
            b: k.mul(&k.from_i64(-54), &c6),
        };
        WeierstrassTransform {
            curve: curve.clone(),
            long,
            short,
        }
    }

    fn long_to_short(&self, x: &u32, y: &u32) -> (u32, u32) {
        let k = &self.curve.k;
        let [a1, a2, a3, ..] = self.long;
        let b2 = k.add(&k.mul(&a1, &a1), &k.mul(&4, &a2));
        let xs = k.add(&k.mul(&k.from_i64(36), x), &k.mul(&3, &b2));
        let inner = k.sum(&[k.mul(&2, y), k.mul(&a1, x), a3]);
        (xs, k.mul(&k.from_i64(108), &inner))
    }

    /// Image of a point where the rational formulas are defined: affine
    /// with `x != 0`.
    fn map_generic(&self, p: &Point) -> Option<(u32, u32)> {
        let k = &self.curve.k;
        let b = &self.curve.b;
        if p[2] == 0 || p[0] == 0 {
            return None;
        }
        let (u, y) = (p[0], p[1]);
        let v = k.add(&k.mul(&u, &y), &b.q4);
        let (xl, yl) = if b.q4 != 0 {
            let q = k.neg(&b.q4);
            let (c, d) = (b.p4, b.p6);
            let u2 = k.mul(&u, &u);
            let vq = k.add(&v, &q);
            let xl = k.div(&k.add(&k.mul(&2, &k.mul(&q, &vq)), &k.mul(&d, &u)), &u2)?;
            let num = k.sum(&[
                k.mul(&4, &k.mul(&k.mul(&q, &q), &vq)),
                k.mul(&2, &k.mul(&q, &k.add(&k.mul(&d, &u), &k.mul(&c, &u2)))),
                k.neg(&k.div(&k.mul(&k.mul(&d, &d), &u2), &k.mul(&2, &q))?),
            ]);
            (xl, k.div(&num, &k.mul(&u2, &u))?)
        } else {
            let s = k.inv(&u)?;
            let r = k.mul(&v, &k.mul(&s, &s));
            (k.mul(&b.p6, &s), k.mul(&b.p6, &r))
        };
        Some(self.long_to_short(&xl, &yl))
    }

    /// Image of any point. Off the domain of the rational formulas the
    /// images are the limits: `O` goes to infinity; a point `[c:1:0]` at
    /// infinity (where `w / x^2 -> c`) goes to `(2 q c, 0)` on the long
    /// model, or `(0, p6 c)` when `q4 = 0`; the affine point with `x = 0`
    /// (present only when `q4 != 0`) goes to `(-a2, a1 a2 - a3)`.
    pub fn map_point(&self, p: &Point) -> WPoint {
        if *p == self.curve.origin() {
            return None;
        }
        if let Some(img) = self.map_generic(p) {
            return Some(img);
        }
        let k = &self.curve.k;
        let b = &self.curve.b;
        let [a1, a2, a3, ..] = self.long;
        let (xl, yl) = if p[2] == 0 {
            let c = p[0];
            if b.q4 != 0 {
                (k.mul(&2, &k.mul(&k.neg(&b.q4), &c)), 0)
            } else {
                (0, k.mul(&b.p6, &c))
            }
        } else {
            (k.neg(&a2), k.sub(&k.mul(&a1, &a2), &a3))
        };
        Some(self.long_to_short(&xl, &yl))
    }
}

/// Short Weierstrass model of the curve of `b` (see [`WeierstrassTransform`]).
pub fn to_weierstrass(k: &Gf, b: &InvTuple<u32>) -> Result<ShortWeierstrass, AlgebraError> {
    if k.characteristic() < 5 {
        return Err(AlgebraError::CharacteristicTooSmall {
            required: 5,
            got: k.characteristic(),
        });
    }
    Ok(WeierstrassTransform::new(&PointedCurve::new(k, b)?).short)
}

// ---------------------------------------------------------------------------
// Residue fields and reduction types
// ---------------------------------------------------------------------------

/// The residue field `F_q[t]/(pi)` of a finite place, as a ring of
/// polynomials reduced modulo `pi`.
#[derive(Clone, Debug)]
pub struct ResidueField {
    k: Gf,
    modulus: Vec<u32>,
}

impl ResidueField {
    pub fn new(k: &Gf, pi: &[u32]) -> Self {
        ResidueField {
            k: k.clone(),
            modulus: pi.to_vec(),
        }
    }

    pub fn reduce(&self, f: &[u32]) -> Vec<u32> {
        poly::rem(&self.k, &f.to_vec(), &self.modulus)
    }

    pub fn inv(&self, a: &Vec<u32>) -> Option<Vec<u32>> {
        if a.is_empty() {
            return None;
        }
        inv_mod(&self.k, a, &self.modulus)
    }
}

impl Ring for ResidueField {
    type Elem = Vec<u32>;

    fn zero(&self) -> Vec<u32> {
        Vec::new()
    }
    fn one(&self) -> Vec<u32> {
        vec![1]
    }
    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        poly::add(&self.k, a, b)
    }
    fn sub(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        poly::sub(&self.k, a, b)
    }
    fn neg(&self, a: &Vec<u32>) -> Vec<u32> {
        poly::neg(&self.k, a)
    }
    fn mul(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        poly::rem(&self.k, &poly::mul(&self.k, a, b), &self.modulus)
    }
    fn from_i64(&self, n: i64) -> Vec<u32> {
        poly::constant(&self.k, self.k.from_i64(n))
    }
    fn is_zero(&self, a: &Vec<u32>) -> bool {
        a.is_empty()
    }
}

/// Monic gcd of polynomials over a residue field.
fn residue_gcd(r: &ResidueField, a: &Poly<ResidueField>, b: &Poly<ResidueField>) -> Poly<ResidueField> {
    let (mut x, mut y) = (poly::trim(r, a.clone()), poly::trim(r, b.clone()));
    while !y.is_empty() {
        let li = r.inv(y.last().expect("nonzero")).expect("field");
        while x.len() >= y.len() {
            let c = r.mul(x.last().expect("nonzero"), &li);
            let shift = x.len() - y.len();
            for (i, yi) in y.iter().enumerate() {
                x[i + shift] = r.sub(&x[i + shift], &r.mul(&c, yi));
            }
            x = poly::trim(r, x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    if let Some(l) = x.last() {
        let li = r.inv(l).expect("field");
        x = x.iter().map(|c| r.mul(c, &li)).collect();
    }
    x
}

/// Reduction type at a place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kodaira {
    /// Good reduction.
    I0,
    /// The reduced cubic has exactly one singular point, an ordinary node.
    I1,
    /// Any other singular reduction.
    Other,
}

/// Reduction type of the cubic with coefficients `b` in the residue field:
/// locate the singular points (repeated roots of the quartic; the points at
/// infinity are always smooth) and read off the rank of the tangent cone.
pub fn reduction_type(r: &ResidueField, b: &InvTuple<Vec<u32>>) -> Kodaira {
    if !r.is_zero(&quartic_disc(r, b)) {
        return Kodaira::I0;
    }
    let f = poly::trim(r, b.quartic(r));
    let g = residue_gcd(r, &f, &poly::derivative(r, &f));
    if g.len() != 2 {
        return Kodaira::Other;
    }
    let x0 = r.neg(&g[0]);
    // x0 = 0 forces q4 = p6 = 0: the line x = 0 is a component.
    let Some(x0_inv) = r.inv(&x0) else {
        return Kodaira::Other;
    };
    let y0 = r.neg(&r.mul(&b.q4, &x0_inv));
    let n = |c: i64| r.from_i64(c);
    let gpoly = vec![b.p6.clone(), b.p4.clone(), b.p2.clone(), r.one()];
    let g1 = poly::eval(r, &poly::derivative(r, &gpoly), &x0);
    let g2 = r.add(&r.mul(&n(6), &x0), &r.mul(&n(2), &b.p2));
    let f_val = r.sub(
        &r.add(&r.mul(&x0, &r.mul(&y0, &y0)), &r.mul(&n(2), &r.mul(&b.q4, &y0))),
        &poly::eval(r, &gpoly, &x0),
    );
    let fx = r.sub(&r.mul(&y0, &y0), &g1);
    let fy = r.add(&r.mul(&n(2), &r.mul(&x0, &y0)), &r.mul(&n(2), &b.q4));
    if !(r.is_zero(&f_val) && r.is_zero(&fx) && r.is_zero(&fy)) {
        return Kodaira::Other;
    }
    // Hessian [[-g''(x0), 2 y0], [2 y0, 2 x0]].
    let det = r.sub(&r.mul(&r.neg(&g2), &r.mul(&n(2), &x0)), &r.mul(&n(4), &r.mul(&y0, &y0)));
    if r.is_zero(&det) {
        Kodaira::Other
    } else {
        Kodaira::I1
    }
}

// ---------------------------------------------------------------------------
// Minimal data over F_q(t)
// ---------------------------------------------------------------------------

/// Minimal integral data of a tuple over `K = F_q(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalData {
    /// Exponents `n_v` at the places where some component is not a unit
    /// (including infinity); all other exponents vanish.
    pub n: BTreeMap<PlaceKey, i64>,
    /// `lambda b` with `lambda = prod_{v finite} pi_v^{n_v}`: integral and
    /// minimal at every finite place.
    pub b_min: InvTuple<RatFunc<u32>>,
    /// `deg L = sum_v n_v deg v`.
    pub l_degree: i64,
}

/// A place used as a map key: the monic polynomial, or `None` for infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PlaceKey(pub Option<Vec<u32>>);

impl PlaceKey {
    pub fn to_place(&self) -> Place<u32> {
        match &self.0 {
            Some(p) => Place::Finite(p.clone()),
            None => Place::Infinite,
        }
    }

    pub fn from_place(p: &Place<u32>) -> Self {
        match p {
            Place::Finite(pi) => PlaceKey(Some(pi.clone())),
            Place::Infinite => PlaceKey(None),
        }
    }
}

/// Human-readable form of a polynomial in `t` (`"t^2+3t+1"`, `"0"`).
pub fn format_poly(f: &[u32], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Text form of a place: its monic generator, or `"inf"`.
pub fn format_place(p: &Place<u32>) -> String {
    match p {
        Place::Finite(pi) => format_poly(pi, "t"),
        Place::Infinite => "inf".into(),
    }
}

fn rf_scale_pow(k: &Gf, r: &RatFunc<u32>, pi: &[u32], e: i64) -> RatFunc<u32> {
    let pw = poly::pow(k, &pi.to_vec(), e.unsigned_abs());
    let (num, den) = if e >= 0 {
        (poly::mul(k, &r.num, &pw), r.den.clone())
    } else {
        (r.num.clone(), poly::mul(k, &r.den, &pw))
    };
    RatFunc::new(k, num, den).expect("nonzero denominator")
}

/// Weighted valuation `min_i floor(ord_v(b_i) / w_i)` over nonzero components.
fn weighted_ord(k: &Gf, b: &InvTuple<RatFunc<u32>>, v: &Place<u32>) -> i64 {
    b.to_array()
        .iter()
        .zip(WEIGHTS)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, w)| funcfield::ord(k, c, v).expect("nonzero").div_euclid(w))
        .min()
        .expect("disc != 0 forces a nonzero component")
}

/// Minimal integral data: `n_v = -min_i floor(ord_v(b_i) / w_i)` at every
/// place, and the rescaled tuple integral and minimal at all finite places.
pub fn minimal_data(k: &Gf, b: &InvTuple<RatFunc<u32>>) -> Result<MinimalData, AlgebraError> {
    let kt = PolyRing::new(k.clone());
    // disc of the tuple over K: clear denominators with the weighted scaling.
    let den = b
        .to_array()
        .iter()
        .fold(poly::constant(k, 1), |acc, c| poly::mul(k, &acc, &c.den));
    let cleared = b.map(|c| poly::mul(k, &c.num, &poly::divrem(k, &den, &c.den).0));
    let scaled = InvTuple::new(
        cleared.p2.clone(),
        poly::mul(k, &cleared.p4, &den),
        poly::mul(k, &cleared.q4, &den),
        poly::mul(k, &cleared.p6, &poly::mul(k, &den, &den)),
    );
    if quartic_disc(&kt, &scaled).is_empty() {
        return Err(AlgebraError::Precondition("disc(b) = 0".into()));
    }
    let mut primes: Vec<Vec<u32>> = Vec::new();
    for c in b.to_array() {
        for f in [&c.num, &c.den] {
            if poly::degree::<Gf>(f).unwrap_or(0) > 0 {
                for (pi, _) in poly::factor(k, f) {
                    if !primes.contains(&pi) {
                        primes.push(pi);
                    }
                }
            }
        }
    }
    let mut n = BTreeMap::new();
    let mut b_min = b.clone();
    let mut l_degree = 0;
    for pi in primes {
        let v = Place::Finite(pi.clone());
        let nv = -weighted_ord(k, b, &v);
        if nv != 0 {
            b_min = InvTuple::from_array(
                b_min
                    .to_array()
                    .iter()
                    .zip(WEIGHTS)
                    .map(|(c, w)| rf_scale_pow(k, c, &pi, w * nv))
                    .collect::<Vec<_>>()
                    .try_into()
                    .expect("four components"),
            );
            l_degree += nv * (pi.len() as i64 - 1);
            n.insert(PlaceKey(Some(pi)), nv);
        }
    }
    let n_inf = -weighted_ord(k, b, &Place::Infinite);
    if n_inf != 0 {
        n.insert(PlaceKey(None), n_inf);
    }
    l_degree += n_inf;
    Ok(MinimalData { n, b_min, l_degree })
}

// ---------------------------------------------------------------------------
// The squarefree locus X_D on P^1 with D = d * infinity
// ---------------------------------------------------------------------------

/// Degree bounds `(2d, 4d, 4d, 6d)` of `H^0(P^1, B_D)`.
pub fn degree_bounds(d: usize) -> [usize; 4] {
    [2 * d, 4 * d, 4 * d, 6 * d]
}

fn within_bounds(b: &InvTuple<Poly<Gf>>, d: usize) -> bool {
    b.to_array()
        .iter()
        .zip(degree_bounds(d))
        .all(|(c, bound)| c.len() <= bound + 1)
}

/// `s^n f(1/s)`: the local expansion at infinity of a section of `O(n)`.
fn reverse_padded(f: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0; n + 1];
    for (i, &c) in f.iter().enumerate() {
        out[n - i] = c;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// The tuple in the local coordinate `s = 1/t` at infinity.
pub fn local_model_at_infinity(b: &InvTuple<Poly<Gf>>, d: usize) -> InvTuple<Poly<Gf>> {
    let [e2, e4, e4b, e6] = degree_bounds(d);
    InvTuple::new(
        reverse_padded(&b.p2, e2),
        reverse_padded(&b.p4, e4),
        reverse_padded(&b.q4, e4b),
        reverse_padded(&b.p6, e6),
    )
}

/// Membership of a section of `B_D` in the squarefree locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XdMembership {
    pub in_xd: bool,
    pub degree_bounds_ok: bool,
    /// `deg disc(b)`; `None` when the discriminant vanishes identically.
    pub disc_degree: Option<usize>,
    /// `(v, ord_v disc)` at every zero of the discriminant, infinity last
    /// (`ord_inf = 24 d - deg disc`, listed even when zero).
    pub disc_divisor: Vec<(Place<u32>, i64)>,
    /// Reduction type at each place of bad reduction.
    pub kodaira: Vec<(Place<u32>, Kodaira)>,
}

impl XdMembership {
    pub fn bad_places(&self) -> Vec<&Place<u32>> {
        self.kodaira.iter().map(|(v, _)| v).collect()
    }
}

/// Discriminant of a tuple of polynomials, as a polynomial.
pub fn disc_poly(k: &Gf, b: &InvTuple<Poly<Gf>>) -> Poly<Gf> {
    quartic_disc(&PolyRing::new(k.clone()), b)
}

/// Fast membership test: degree bounds, squarefree discriminant, and
/// `deg disc >= 24 d - 1` (at most a simple zero at infinity).
pub fn in_xd(k: &Gf, b: &InvTuple<Poly<Gf>>, d: usize) -> bool {
    if !within_bounds(b, d) {
        return false;
    }
    let delta = disc_poly(k, b);
    let Some(deg) = poly::degree::<Gf>(&delta) else {
        return false;
    };
    if deg + 1 < 24 * d {
        return false;
    }
    let g = poly::gcd(k, &delta, &poly::derivative(k, &delta));
    poly::degree::<Gf>(&g) == Some(0)
}

/// Full membership report with the discriminant divisor and reduction types.
pub fn xd_membership(k: &Gf, b: &InvTuple<Poly<Gf>>, d: usize) -> XdMembership {
    let degree_bounds_ok = within_bounds(b, d);
    let delta = disc_poly(k, b);
    let Some(deg) = poly::degree::<Gf>(&delta) else {
        return XdMembership {
            in_xd: false,
            degree_bounds_ok,
            disc_degree: None,
            disc_divisor: Vec::new(),
            kodaira: Vec::new(),
        };
    };
    let mut disc_divisor: Vec<(Place<u32>, i64)> = if deg > 0 {
        poly::factor(k, &delta)
            .into_iter()
            .map(|(pi, e)| (Place::Finite(pi), e as i64))
            .collect()
    } else {
        Vec::new()
    };
    disc_divisor.push((Place::Infinite, 24 * d as i64 - deg as i64));
    let mut kodaira = Vec::new();
    for (v, e) in &disc_divisor {
        if *e < 1 {
            continue;
        }
        let kind = match v {
            Place::Finite(pi) => {
                let r = ResidueField::new(k, pi);
                reduction_type(&r, &b.map(|c| r.reduce(c)))
            }
            Place::Infinite if degree_bounds_ok => {
                let r = ResidueField::new(k, &[0, 1]);
                reduction_type(&r, &local_model_at_infinity(b, d).map(|c| r.reduce(c)))
            }
            Place::Infinite => Kodaira::Other,
        };
        kodaira.push((v.clone(), kind));
    }
    let in_xd = degree_bounds_ok && disc_divisor.iter().all(|(_, e)| *e <= 1);
    XdMembership {
        in_xd,
        degree_bounds_ok,
        disc_degree: Some(deg),
        disc_divisor,
        kodaira,
    }
}

/// Uniformly random section of `B_D`: independent coefficients in the box.
pub fn random_section<R: Rng + ?Sized>(k: &Gf, d: usize, rng: &mut R) -> InvTuple<Poly<Gf>> {
    let comps: Vec<Poly<Gf>> = degree_bounds(d)
        .iter()
        .map(|&n| poly::trim(k, (0..=n).map(|_| k.random(rng)).collect()))
        .collect();
    InvTuple::from_array(comps.try_into().expect("four components"))
}

/// Output of rejection sampling from `X_D`.
#[derive(Clone, Debug)]
pub struct XdSample {
    pub samples: Vec<InvTuple<Poly<Gf>>>,
    /// Number of sections drawn (accepted or not).
    pub attempts: u64,
}

/// Rejection sampling of `count` points of `X_D`. Attempt `j` draws from
/// the stream `(seed, SAMPLE_XD, j)`, and the first `count` accepted
/// attempts (in order of `j`) are returned, so the output depends only on
/// the seed.
pub fn sample_xd(k: &Gf, d: usize, count: usize, seed: u64, max_tries: u64) -> Result<XdSample, AlgebraError> {
    let mut samples = Vec::with_capacity(count);
    let mut next = 0u64;
    let chunk = (count as u64).max(64);
    while samples.len() < count {
        if next >= max_tries {
            return Err(AlgebraError::Precondition(format!(
                "sample_xd: only {} of {count} samples after {max_tries} tries",
                samples.len()
            )));
        }
        let end = (next + chunk).min(max_tries);
        let batch: Vec<(u64, Option<InvTuple<Poly<Gf>>>)> = (next..end)
            .into_par_iter()
            .map(|j| {
                let mut rng = rng::stream(seed, job::SAMPLE_XD, j);
                let b = random_section(k, d, &mut rng);
                (j, in_xd(k, &b, d).then_some(b))
            })
            .collect();
        for (j, b) in batch {
            if let Some(b) = b {
                samples.push(b);
                if samples.len() == count {
                    return Ok(XdSample {
                        samples,
                        attempts: j + 1,
                    });
                }
            }
        }
        next = end;
    }
    Ok(XdSample {
        samples,
        attempts: next,
    })
}

// ---------------------------------------------------------------------------
// Rational 2-torsion over F_q(t)
// ---------------------------------------------------------------------------

/// Truncated power series product modulo `u^n`.
fn series_mul<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem], n: usize) -> Vec<F::Elem> {
    let mut out = vec![k.zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

fn series_inv<F: Field>(k: &F, a: &[F::Elem], n: usize) -> Vec<F::Elem> {
    let a0i = k.inv(&a[0]).expect("unit");
    let mut out = vec![k.zero(); n];
    out[0] = a0i.clone();
    for m in 1..n {
        let mut s = k.zero();
        for i in 1..=m.min(a.len() - 1) {
            s = k.add(&s, &k.mul(&a[i], &out[m - i]));
        }
        out[m] = k.neg(&k.mul(&a0i, &s));
    }
    out
}

/// `f(x + c)` by Horner's rule.
fn shift<F: Field>(k: &F, f: &Poly<F>, c: &F::Elem) -> Poly<F> {
    let lin = poly::trim(k, vec![c.clone(), k.one()]);
    f.iter().rev().fold(Vec::new(), |acc, a| {
        poly::add(k, &poly::mul(k, &acc, &lin), &poly::constant(k, a.clone()))
    })
}

/// Roots in `F_p[t]` of the monic cubic `X^3 + a X + b` with `a, b` in
/// `F_p[t]`, found by Hensel lifting simple roots at a point `t0` of some
/// `F_{p^m}` where the specialized cubic is separable.
pub fn cubic_polynomial_roots(k: &Gf, a: &Poly<Gf>, b: &Poly<Gf>) -> Result<Vec<Poly<Gf>>, AlgebraError> {
    if k.degree() != 1 {
        return Err(AlgebraError::Precondition("prime base field required".into()));
    }
    let kt = PolyRing::new(k.clone());
    let cubic_at = |x: &Poly<Gf>| kt.sum(&[kt.pow(x, 3), kt.mul(a, x), b.clone()]);
    let da = poly::degree::<Gf>(a).map_or(0, |e| e.div_ceil(2));
    let db = poly::degree::<Gf>(b).map_or(0, |e| e.div_ceil(3));
    let n = da.max(db) + 2;
    for m in 1..=4u32 {
        let ext = Gf::new(k.p(), m)?;
        let emb = |f: &Poly<Gf>| poly::trim(&ext, f.iter().map(|&c| ext.from_i64(c as i64)).collect());
        let (ae, be) = (emb(a), emb(b));
        for t0 in ext.elements() {
            if m > 1 && ext.frobenius(&t0) == t0 {
                continue;
            }
            let (sa, sb) = (shift(&ext, &ae, &t0), shift(&ext, &be, &t0));
            let a0 = sa.first().copied().unwrap_or(0);
            let b0 = sb.first().copied().unwrap_or(0);
            let disc = ext.add(
                &ext.mul(&4, &ext.pow(&a0, 3)),
                &ext.mul(&ext.from_i64(27), &ext.mul(&b0, &b0)),
            );
            if disc == 0 {
                continue;
            }
            let mut found = Vec::new();
            for r0 in poly::roots(&ext, &vec![b0, a0, 0, 1]) {
                // Newton iteration in F_{p^m}[[u]] / u^n, u = t - t0.
                let mut r = vec![0u32; n];
                r[0] = r0;
                for _ in 0..=usize::BITS - n.leading_zeros() {
                    let r2 = series_mul(&ext, &r, &r, n);
                    let r3 = series_mul(&ext, &r2, &r, n);
                    let ar = series_mul(&ext, &sa, &r, n);
                    let val: Vec<u32> = (0..n)
                        .map(|i| ext.sum(&[r3[i], ar[i], sb.get(i).copied().unwrap_or(0)]))
                        .collect();
                    let deriv: Vec<u32> = (0..n)
                        .map(|i| ext.add(&ext.mul(&3, &r2[i]), &sa.get(i).copied().unwrap_or(0)))
                        .collect();
                    let step = series_mul(&ext, &val, &series_inv(&ext, &deriv, n), n);
                    r = (0..n).map(|i| ext.sub(&r[i], &step[i])).collect();
                }
                let back = shift(&ext, &poly::trim(&ext, r), &ext.neg(&t0));
                let coeffs: Option<Vec<u32>> = back
                    .iter()
                    .map(|&c| {
                        let v = ext.to_coeffs(c);
                        v[1..].iter().all(|&x| x == 0).then_some(v[0] as u32)
                    })
                    .collect();
                if let Some(c) = coeffs {
                    let root = poly::trim(k, c);
                    if cubic_at(&root).is_empty() {
                        found.push(root);
                    }
                }
            }
            return Ok(found);
        }
    }
    Err(AlgebraError::Precondition(
        "no separable specialization of the 2-division cubic found".into(),
    ))
}

/// `#E(K)[2]` for `K = F_p(t)`, from the 2-division cubic of the Jacobian
/// model `Y^2 = X^3 - 27 I X - 27 J` (its roots in `K` lie in `F_p[t]`).
pub fn two_torsion_over_function_field(k: &Gf, b: &InvTuple<Poly<Gf>>) -> Result<usize, AlgebraError> {
    let kt = PolyRing::new(k.clone());
    if quartic_disc(&kt, b).is_empty() {
        return Err(AlgebraError::Precondition("disc(b) = 0".into()));
    }
    let (i, j) = quartic_ij(&kt, b);
    let c = kt.from_i64(-27);
    Ok(1 + cubic_polynomial_roots(k, &kt.mul(&c, &i), &kt.mul(&c, &j))?.len())
}

// ---------------------------------------------------------------------------
// The stabilizer Z_G(kappa_b) on the group side
// ---------------------------------------------------------------------------

/// `#Z_G(kappa_b)` over `F_q` and over the splitting field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerCount {
    /// Degree `m` of the field over which the Cartan subalgebra splits.
    pub splitting_degree: u32,
    /// Number of elements over `F_{q^m}` (all 2-torsion of the torus in `G`).
    pub geometric: usize,
    /// Number of Frobenius-fixed elements, i.e. `#Z_G(kappa_b)(F_q)`.
    pub rational: usize,
}

fn lcm(a: u32, b: u32) -> u32 {
    let g = (1..=a.min(b)).rev().find(|g| a % g == 0 && b % g == 0).unwrap_or(1);
    a / g * b
}

/// Count `Z_G(kappa_b)(F_q)` inside `PSO_8`.
///
/// The centralizer of the regular semisimple `kappa_b` is the maximal torus
/// `C` with Lie algebra `c = z_h(kappa_b)`, and `theta` inverts `C`. A
/// regular `X` in `c` has eigenvalues `+-mu_i`; the projectors `Q_i` onto
/// the planes of `+-mu_i` are polynomials in `X^2`, defined over the
/// splitting field of the quartic whose roots are the `mu_i^2`. The
/// elements `T = sum eps_i Q_i` (`eps` a sign pattern) are the lifts to
/// `SO_8` of the 2-torsion of `C` that commute with `s`; those of
/// determinant 1 on the `+1`-eigenspace of `s` lie in `G`. (The remaining
/// 2-torsion of `C`, with `T^2 = -1`, anticommutes with `s`.) An element
/// `[T]` of `PSO_8` is `F_q`-rational iff `Frob(T) = +-T`.
pub fn stabilizer_two_torsion(th: &InvariantTheory, b: &InvTuple<u32>) -> Result<StabilizerCount, AlgebraError> {
    let k = th.field();
    if k.degree() != 1 {
        return Err(AlgebraError::Precondition("prime base field required".into()));
    }
    if quartic_disc(k, b) == 0 {
        return Err(AlgebraError::Precondition("disc(b) = 0".into()));
    }
    let kappa = th.lie.to_matrix(&th.kostant_section(b)?);
    let cartan = th.lie.centralizer_basis(&kappa);
    if cartan.len() != 4 {
        return Err(AlgebraError::Consistency(format!(
            "centralizer of kappa_b has dimension {}",
            cartan.len()
        )));
    }
    // A regular element of c: eigenvalues of X^2 distinct and nonzero.
    let mut regular = None;
    for attempt in 0..64u64 {
        let x = if attempt == 0 {
            kappa.clone()
        } else {
            let mut r = rng::stream(attempt, job::STABILIZER, 0);
            cartan.iter().fold(linalg::zeros(k, 8, 8), |acc, c| {
                linalg::add(k, &acc, &linalg::scale(k, &k.random(&mut r), c))
            })
        };
        let cp = linalg::charpoly(k, &x);
        if cp.iter().skip(1).step_by(2).any(|c| *c != 0) {
            return Err(AlgebraError::Consistency(
                "charpoly of an element of V is not even".into(),
            ));
        }
        let h: Poly<Gf> = cp.iter().step_by(2).copied().collect();
        if h[0] != 0 && poly::is_squarefree(k, &h)? {
            regular = Some((x, h));
            break;
        }
    }
    let (x, h) = regular.ok_or_else(|| AlgebraError::Consistency("no regular element of c found".into()))?;
    let m = poly::factor(k, &h)
        .iter()
        .fold(1u32, |acc, (g, _)| lcm(acc, g.len() as u32 - 1));
    let ext = Gf::new(k.p(), m)?;
    let emb = |a: &Mat<u32>| a.map(|c| ext.from_i64(*c as i64));
    let xe = emb(&x);
    let x2 = linalg::mul(&ext, &xe, &xe);
    let he: Poly<Gf> = h.iter().map(|&c| ext.from_i64(c as i64)).collect();
    let nus = poly::roots(&ext, &he);
    if nus.len() != 4 {
        return Err(AlgebraError::Consistency("quartic does not split".into()));
    }
    let id = linalg::identity(&ext, 8);
    let projectors: Vec<Mat<u32>> = (0..4)
        .map(|i| {
            (0..4).filter(|&j| j != i).fold(id.clone(), |acc, j| {
                let shifted = linalg::sub(&ext, &x2, &linalg::scale(&ext, &nus[j], &id));
                let c = ext.inv(&ext.sub(&nus[i], &nus[j])).expect("distinct roots");
                linalg::scale(&ext, &c, &linalg::mul(&ext, &acc, &shifted))
            })
        })
        .collect();
    let total = projectors
        .iter()
        .fold(linalg::zeros(&ext, 8, 8), |a, q| linalg::add(&ext, &a, q));
    if total != id {
        return Err(AlgebraError::Consistency("projectors do not sum to 1".into()));
    }
    let psi = Mat::from_fn(8, 8, |i, j| u32::from(PAIR[i] == j));
    let s = linalg::diag(&ext, &S_DIAG.map(|c| ext.from_i64(c)));
    let kappa_e = emb(&kappa);
    let plus: Vec<usize> = (0..8).filter(|&i| S_DIAG[i] == 1).collect();
    let mut members = Vec::new();
    for signs in 0..16u32 {
        let t = (0..4).fold(linalg::zeros(&ext, 8, 8), |acc, i| {
            let e = if signs >> i & 1 == 1 { ext.neg(&1) } else { 1 };
            linalg::add(&ext, &acc, &linalg::scale(&ext, &e, &projectors[i]))
        });
        let orthogonal = linalg::mul(&ext, &linalg::mul(&ext, &t.transpose(), &psi), &t) == psi;
        let commutes = linalg::mul(&ext, &t, &kappa_e) == linalg::mul(&ext, &kappa_e, &t);
        let involution = linalg::mul(&ext, &t, &t) == id;
        if !(orthogonal && commutes && involution) {
            return Err(AlgebraError::Consistency("sign pattern is not in Z(kappa_b)".into()));
        }
        let in_k = linalg::mul(&ext, &t, &s) == linalg::mul(&ext, &s, &t);
        if in_k && linalg::det(&ext, &t.submatrix(&plus, &plus)) == 1 {
            members.push(t);
        }
    }
    let rational = members
        .iter()
        .filter(|t| {
            let f = t.map(|c| ext.frobenius(c));
            f == **t || f == linalg::neg(&ext, t)
        })
        .count();
    Ok(StabilizerCount {
        splitting_degree: m,
        geometric: members.len() / 2,
        rational: rational / 2,
    })
}
