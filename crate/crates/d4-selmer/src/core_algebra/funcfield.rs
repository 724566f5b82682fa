//! The rational function field `F_q(t)`: places of the projective line,
//! normalized valuations and truncated local expansions.

use serde::Serialize;

use super::field::{Field, Ring};
use super::poly::{self, Poly};
use crate::AlgebraError;

/// The polynomial ring `F[t]` viewed as a [`Ring`], so that generic code
/// (discriminants, characteristic polynomials) can run over it.
#[derive(Clone, Debug)]
pub struct PolyRing<F: Field> {
    pub base: F,
}

impl<F: Field> PolyRing<F> {
    pub fn new(base: F) -> Self {
        PolyRing { base }
    }

    /// The variable `t`.
    pub fn t(&self) -> Poly<F> {
        poly::monomial(&self.base, self.base.one(), 1)
    }
}

impl<F: Field> Ring for PolyRing<F> {
    type Elem = Poly<F>;

    fn zero(&self) -> Poly<F> {
        Vec::new()
    }
    fn one(&self) -> Poly<F> {
        poly::constant(&self.base, self.base.one())
    }
    fn add(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        poly::add(&self.base, a, b)
    }
    fn sub(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        poly::sub(&self.base, a, b)
    }
    fn neg(&self, a: &Poly<F>) -> Poly<F> {
        poly::neg(&self.base, a)
    }
    fn mul(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        poly::mul(&self.base, a, b)
    }
    fn from_i64(&self, n: i64) -> Poly<F> {
        poly::constant(&self.base, self.base.from_i64(n))
    }
    fn is_zero(&self, a: &Poly<F>) -> bool {
        a.is_empty()
    }
}

/// A place of `F_q(t)`: a monic irreducible polynomial or the point at
/// infinity (uniformizer `1/t`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Place<E> {
    Finite(Vec<E>),
    Infinite,
}

impl<E> Place<E> {
    /// Degree of the residue field over `F_q`.
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.len() - 1,
            Place::Infinite => 1,
        }
    }

    /// Residue field size `q_v = q^deg v`.
    pub fn norm(&self, q: u64) -> u64 {
        q.pow(self.degree() as u32)
    }
}

impl<E: Clone + PartialEq + std::fmt::Debug> Place<E> {
    /// A finite place; the polynomial must be monic irreducible.
    pub fn finite<F: Field<Elem = E>>(k: &F, pi: Poly<F>) -> Result<Self, AlgebraError> {
        if pi.last().map(|c| k.is_one(c)) != Some(true) || !poly::is_irreducible(k, &pi) {
            return Err(AlgebraError::NotAPlace);
        }
        Ok(Place::Finite(pi))
    }
}

/// An element of `F_q(t)` in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc<E> {
    pub num: Vec<E>,
    pub den: Vec<E>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> RatFunc<E> {
    pub fn new<F: Field<Elem = E>>(k: &F, num: Poly<F>, den: Poly<F>) -> Result<Self, AlgebraError> {
        let num = poly::trim(k, num);
        let den = poly::trim(k, den);
        if den.is_empty() {
            return Err(AlgebraError::ZeroDenominator);
        }
        let g = poly::gcd(k, &num, &den);
        let (mut n, mut d) = (poly::divrem(k, &num, &g).0, poly::divrem(k, &den, &g).0);
        let li = k.inv(&poly::lead(k, &d)).expect("nonzero");
        n = poly::scale(k, &li, &n);
        d = poly::scale(k, &li, &d);
        Ok(RatFunc { num: n, den: d })
    }

    pub fn from_poly<F: Field<Elem = E>>(k: &F, num: Poly<F>) -> Self {
        RatFunc {
            num: poly::trim(k, num),
            den: poly::constant(k, k.one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

/// Multiplicity of the monic irreducible `pi` in the nonzero polynomial `f`.
pub fn poly_ord<F: Field>(k: &F, f: &Poly<F>, pi: &Poly<F>) -> i64 {
    assert!(!f.is_empty(), "valuation of zero");
    let mut n = 0;
    let mut g = f.clone();
    loop {
        let (q, r) = poly::divrem(k, &g, pi);
        if !r.is_empty() {
            return n;
        }
        g = q;
        n += 1;
    }
}

/// Normalized valuation of a nonzero polynomial at a place.
pub fn ord_poly<F: Field>(k: &F, f: &Poly<F>, v: &Place<F::Elem>) -> i64 {
    match v {
        Place::Finite(pi) => poly_ord(k, f, pi),
        Place::Infinite => -(poly::degree::<F>(f).expect("valuation of zero") as i64),
    }
}

/// Normalized valuation of a nonzero rational function at a place.
pub fn ord<F: Field>(k: &F, r: &RatFunc<F::Elem>, v: &Place<F::Elem>) -> Result<i64, AlgebraError> {
    if r.is_zero() {
        return Err(AlgebraError::ZeroValuation);
    }
    Ok(ord_poly(k, &r.num, v) - ord_poly(k, &r.den, v))
}

/// Residue of an element of `O_v` modulo `pi^level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalTrunc<E> {
    pub place: Place<E>,
    pub level: usize,
    /// Canonical representative. At a finite place: a polynomial in `t` of
    /// degree `< level * deg pi`. At infinity: a polynomial in `s = 1/t` of
    /// degree `< level`.
    pub value: Vec<E>,
}

/// Inverse of `a` modulo `m` (extended Euclid), if `gcd(a, m) = 1`.
pub fn inv_mod<F: Field>(k: &F, a: &Poly<F>, m: &Poly<F>) -> Option<Poly<F>> {
    let (mut r0, mut r1) = (m.clone(), poly::rem(k, a, m));
    let (mut s0, mut s1): (Poly<F>, Poly<F>) = (Vec::new(), poly::constant(k, k.one()));
    while !r1.is_empty() {
        let (q, r) = poly::divrem(k, &r0, &r1);
        let s = poly::sub(k, &s0, &poly::mul(k, &q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if poly::degree::<F>(&r0) != Some(0) {
        return None;
    }
    let c = k.inv(&r0[0]).expect("nonzero");
    Some(poly::rem(k, &poly::scale(k, &c, &s0), m))
}

/// Valuation and truncation `r mod pi^level` of a rational function.
/// Truncating an element with a pole is an error (the error carries the
/// valuation).
pub fn local_data<F: Field>(
    k: &F,
    r: &RatFunc<F::Elem>,
    v: &Place<F::Elem>,
    level: usize,
) -> Result<(i64, LocalTrunc<F::Elem>), AlgebraError> {
    if level == 0 {
        return Err(AlgebraError::InvalidLevel);
    }
    if r.is_zero() {
        return Ok((
            i64::MAX,
            LocalTrunc {
                place: v.clone(),
                level,
                value: Vec::new(),
            },
        ));
    }
    let o = ord(k, r, v)?;
    if o < 0 {
        return Err(AlgebraError::Pole { ord: o });
    }
    let value = match v {
        Place::Finite(pi) => {
            let modulus = poly::pow(k, pi, level as u64);
            // Strip pi-powers from the denominator (they are cancelled by the
            // numerator since ord >= 0).
            let mut num = r.num.clone();
            let mut den = r.den.clone();
            let od = poly_ord(k, &den, pi);
            for _ in 0..od {
                den = poly::divrem(k, &den, pi).0;
                num = poly::divrem(k, &num, pi).0;
            }
            let dinv = inv_mod(k, &den, &modulus).expect("unit denominator");
            poly::rem(k, &poly::mul(k, &num, &dinv), &modulus)
        }
        Place::Infinite => {
            // r(1/s) = s^(deg D - deg N) * rev(N)(s) / rev(D)(s).
            let shift = o as usize;
            if shift >= level {
                Vec::new()
            } else {
                let mut rn: Vec<F::Elem> = r.num.iter().rev().cloned().collect();
                let rd: Vec<F::Elem> = r.den.iter().rev().cloned().collect();
                let n = level - shift;
                let inv = series_inverse(k, &rd, n);
                rn.truncate(n);
                let mut prod = poly::mul(k, &rn, &inv);
                prod.truncate(n);
                let mut out = vec![k.zero(); shift];
                out.extend(prod);
                poly::trim(k, out)
            }
        }
    };
    Ok((
        o,
        LocalTrunc {
            place: v.clone(),
            level,
            value,
        },
    ))
}

/// Power-series inverse of `f` (with `f(0) != 0`) modulo `s^n`.
fn series_inverse<F: Field>(k: &F, f: &Poly<F>, n: usize) -> Poly<F> {
    let c0inv = k.inv(&f[0]).expect("unit constant term");
    let mut g = vec![k.zero(); n];
    for i in 0..n {
        let mut acc = if i == 0 { k.one() } else { k.zero() };
        for j in 1..=i.min(f.len() - 1) {
            acc = k.sub(&acc, &k.mul(&f[j], &g[i - j]));
        }
        g[i] = k.mul(&acc, &c0inv);
    }
    poly::trim(k, g)
}

/// Number of monic irreducible polynomials of degree `n` over `F_q`
/// (necklace polynomial).
pub fn count_monic_irreducible(q: u64, n: u32) -> u128 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let mu = mobius(d);
        if mu != 0 {
            total += mu as i128 * (q as i128).pow(n / d);
        }
    }
    (total / n as i128) as u128
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// All monic irreducible polynomials of degree `n` (exhaustive; desk scale).
pub fn monic_irreducibles<F: Field>(k: &F, n: usize) -> Vec<Poly<F>> {
    let q = k.order();
    (0..q.pow(n as u32))
        .map(|mut idx| {
            let mut f: Poly<F> = (0..n)
                .map(|_| {
                    let c = k.element(idx % q);
                    idx /= q;
                    c
                })
                .collect();
            f.push(k.one());
            f
        })
        .filter(|f| poly::is_irreducible(k, f))
        .collect()
}

/// Places of `P^1` of degree at most `n`, including infinity (listed last).
pub fn places_up_to<F: Field>(k: &F, n: usize) -> Vec<Place<F::Elem>> {
    let mut out: Vec<Place<F::Elem>> = (1..=n)
        .flat_map(|d| monic_irreducibles(k, d).into_iter().map(Place::Finite))
        .collect();
    out.push(Place::Infinite);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::field::Gf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k5() -> Gf {
        Gf::prime(5).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let k = k5();
        let t2 = RatFunc::from_poly(&k, poly::from_ints(&k, &[0, 0, 1]));
        let at_t = Place::Finite(poly::from_ints(&k, &[0, 1]));
        assert_eq!(ord(&k, &t2, &at_t).unwrap(), 2);
        assert_eq!(ord(&k, &t2, &Place::Infinite).unwrap(), -2);
        let r = RatFunc::new(&k, poly::from_ints(&k, &[1, 1]), poly::from_ints(&k, &[0, 1])).unwrap();
        assert_eq!(ord(&k, &r, &at_t).unwrap(), -1);
        assert_eq!(local_data(&k, &r, &at_t, 2), Err(AlgebraError::Pole { ord: -1 }));
    }

    #[test]
    fn truncation_at_finite_place() {
        let k = k5();
        // 1/(1 - t) = 1 + t + t^2 + ... ; mod t^3 -> 1 + t + t^2
        let r = RatFunc::new(&k, poly::from_ints(&k, &[1]), poly::from_ints(&k, &[1, -1])).unwrap();
        let at_t = Place::Finite(poly::from_ints(&k, &[0, 1]));
        let (o, tr) = local_data(&k, &r, &at_t, 3).unwrap();
        assert_eq!(o, 0);
        assert_eq!(tr.value, poly::from_ints(&k, &[1, 1, 1]));
    }

    #[test]
    fn truncation_at_infinity() {
        let k = k5();
        // t/(t^2 + 1) = s/(1 + s^2) = s - s^3 + ... ; mod s^3 -> s
        let r = RatFunc::new(&k, poly::from_ints(&k, &[0, 1]), poly::from_ints(&k, &[1, 0, 1])).unwrap();
        let (o, tr) = local_data(&k, &r, &Place::Infinite, 3).unwrap();
        assert_eq!(o, 1);
        assert_eq!(tr.value, poly::from_ints(&k, &[0, 1]));
    }

    #[test]
    fn product_formula_holds() {
        let k = Gf::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rand_poly = |rng: &mut ChaCha8Rng| loop {
                let deg = rand::Rng::gen_range(rng, 0..6);
                let f = poly::trim(&k, (0..=deg).map(|_| k.random(rng)).collect());
                if !f.is_empty() {
                    return f;
                }
            };
            let r = RatFunc::new(&k, rand_poly(&mut rng), rand_poly(&mut rng)).unwrap();
            let mut total = 0i64;
            let mut places: Vec<Place<u32>> = Vec::new();
            for f in [&r.num, &r.den] {
                for (g, _) in poly::factor(&k, f) {
                    let pl = Place::Finite(g);
                    if !places.contains(&pl) {
                        places.push(pl);
                    }
                }
            }
            places.push(Place::Infinite);
            for v in &places {
                total += ord(&k, &r, v).unwrap() * v.degree() as i64;
            }
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn irreducible_counts() {
        let k = k5();
        for n in 1..=4 {
            assert_eq!(
                monic_irreducibles(&k, n).len() as u128,
                count_monic_irreducible(5, n as u32)
            );
        }
        assert_eq!(count_monic_irreducible(5, 6), (15625 - 125 - 25 + 5) / 6);
        assert_eq!(places_up_to(&k, 1).len(), 6);
    }
}
