//! Dense univariate polynomials over a field or ring.
//!
//! A polynomial is a `Vec` of coefficients, lowest degree first, with no
//! trailing zeros; the zero polynomial is the empty vector. Functions take the
//! coefficient ring as an explicit context.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{Field, Ring};

/// Polynomial with coefficients in `R`.
pub type Poly<R> = Vec<<R as Ring>::Elem>;

/// Remove trailing zero coefficients.
pub fn trim<R: Ring>(r: &R, mut f: Poly<R>) -> Poly<R> {
    while f.last().is_some_and(|c| r.is_zero(c)) {
        f.pop();
    }
    f
}

/// Degree, or `None` for the zero polynomial.
pub fn degree<R: Ring>(f: &Poly<R>) -> Option<usize> {
    f.len().checked_sub(1)
}

pub fn constant<R: Ring>(r: &R, c: R::Elem) -> Poly<R> {
    trim(r, vec![c])
}

/// The monomial `c t^k`.
pub fn monomial<R: Ring>(r: &R, c: R::Elem, k: usize) -> Poly<R> {
    let mut f = vec![r.zero(); k + 1];
    f[k] = c;
    trim(r, f)
}

/// Polynomial from integer coefficients (lowest first).
pub fn from_ints<R: Ring>(r: &R, coeffs: &[i64]) -> Poly<R> {
    trim(r, coeffs.iter().map(|&c| r.from_i64(c)).collect())
}

pub fn add<R: Ring>(r: &R, f: &Poly<R>, g: &Poly<R>) -> Poly<R> {
    let n = f.len().max(g.len());
    let z = r.zero();
    let out = (0..n)
        .map(|i| r.add(f.get(i).unwrap_or(&z), g.get(i).unwrap_or(&z)))
        .collect();
    trim(r, out)
}

pub fn sub<R: Ring>(r: &R, f: &Poly<R>, g: &Poly<R>) -> Poly<R> {
    let n = f.len().max(g.len());
    let z = r.zero();
    let out = (0..n)
        .map(|i| r.sub(f.get(i).unwrap_or(&z), g.get(i).unwrap_or(&z)))
        .collect();
    trim(r, out)
}

pub fn neg<R: Ring>(r: &R, f: &Poly<R>) -> Poly<R> {
    f.iter().map(|c| r.neg(c)).collect()
}

pub fn scale<R: Ring>(r: &R, c: &R::Elem, f: &Poly<R>) -> Poly<R> {
    trim(r, f.iter().map(|x| r.mul(c, x)).collect())
}

pub fn mul<R: Ring>(r: &R, f: &Poly<R>, g: &Poly<R>) -> Poly<R> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![r.zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        if r.is_zero(a) {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            out[i + j] = r.add(&out[i + j], &r.mul(a, b));
        }
    }
    trim(r, out)
}

/// `f^e`.
pub fn pow<R: Ring>(r: &R, f: &Poly<R>, mut e: u64) -> Poly<R> {
    let mut acc = constant(r, r.one());
    let mut base = f.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(r, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(r, &base, &base);
        }
    }
    acc
}

/// Formal derivative.
pub fn derivative<R: Ring>(r: &R, f: &Poly<R>) -> Poly<R> {
    let out = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| r.mul(&r.from_i64(i as i64), c))
        .collect();
    trim(r, out)
}

/// Evaluate by Horner's rule.
pub fn eval<R: Ring>(r: &R, f: &Poly<R>, x: &R::Elem) -> R::Elem {
    f.iter().rev().fold(r.zero(), |acc, c| r.add(&r.mul(&acc, x), c))
}

/// Leading coefficient (zero for the zero polynomial).
pub fn lead<R: Ring>(r: &R, f: &Poly<R>) -> R::Elem {
    f.last().cloned().unwrap_or_else(|| r.zero())
}

/// Scale to a monic polynomial; the zero polynomial is returned unchanged.
pub fn monic<F: Field>(k: &F, f: &Poly<F>) -> Poly<F> {
    match f.last() {
        None => Vec::new(),
        Some(l) => {
            let li = k.inv(l).expect("leading coefficient is nonzero");
            scale(k, &li, f)
        }
    }
}

/// Euclidean division `f = q g + r` with `deg r < deg g`.
///
/// # Panics
/// If `g` is zero.
pub fn divrem<F: Field>(k: &F, f: &Poly<F>, g: &Poly<F>) -> (Poly<F>, Poly<F>) {
    let dg = degree::<F>(g).expect("division by the zero polynomial");
    let mut rem = f.clone();
    if rem.len() <= dg {
        return (Vec::new(), rem);
    }
    let li = k.inv(&g[dg]).expect("leading coefficient is nonzero");
    let mut quo = vec![k.zero(); rem.len() - dg];
    for i in (dg..rem.len()).rev() {
        let c = k.mul(&rem[i], &li);
        if k.is_zero(&c) {
            continue;
        }
        quo[i - dg] = c.clone();
        for (j, gj) in g.iter().enumerate() {
            let idx = i - dg + j;
            rem[idx] = k.sub(&rem[idx], &k.mul(&c, gj));
        }
    }
    (trim(k, quo), trim(k, rem))
}

pub fn rem<F: Field>(k: &F, f: &Poly<F>, g: &Poly<F>) -> Poly<F> {
    divrem(k, f, g).1
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd<F: Field>(k: &F, f: &Poly<F>, g: &Poly<F>) -> Poly<F> {
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_empty() {
        let r = rem(k, &a, &b);
        a = b;
        b = r;
    }
    monic(k, &a)
}

/// `base^e mod m`.
pub fn powmod<F: Field>(k: &F, base: &Poly<F>, mut e: u128, m: &Poly<F>) -> Poly<F> {
    let mut acc = rem(k, &constant(k, k.one()), m);
    let mut b = rem(k, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(k, &mul(k, &acc, &b), m);
        }
        e >>= 1;
        if e > 0 {
            b = rem(k, &mul(k, &b, &b), m);
        }
    }
    acc
}

/// `t^(q^n) mod m` by repeated `q`-th powering.
fn frobenius_power<F: Field>(k: &F, n: usize, m: &Poly<F>) -> Poly<F> {
    let t = monomial(k, k.one(), 1);
    let mut x = rem(k, &t, m);
    for _ in 0..n {
        x = powmod(k, &x, k.order() as u128, m);
    }
    x
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test.
pub fn is_irreducible<F: Field>(k: &F, f: &Poly<F>) -> bool {
    let n = match degree::<F>(f) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let t = monomial(k, k.one(), 1);
    if sub(k, &frobenius_power(k, n, f), &rem(k, &t, f)).is_empty() {
        for r in prime_divisors(n) {
            let h = sub(k, &frobenius_power(k, n / r, f), &t);
            if degree::<F>(&gcd(k, &h, f)) != Some(0) {
                return false;
            }
        }
        true
    } else {
        false
    }
}

/// Lexicographically least monic irreducible polynomial of degree `n`, in the
/// order of the coefficient index vector read from the constant term upward.
pub fn first_irreducible<F: Field>(k: &F, n: usize) -> Poly<F> {
    let q = k.order();
    let total = q.pow(n as u32);
    (0..total)
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
        .find(|f| is_irreducible(k, f))
        .expect("irreducible polynomials exist in every degree")
}

/// Whether `gcd(f, f')` is constant. Rejects the zero polynomial.
pub fn is_squarefree<F: Field>(k: &F, f: &Poly<F>) -> Result<bool, crate::AlgebraError> {
    if f.is_empty() {
        return Err(crate::AlgebraError::ZeroPolynomial);
    }
    let d = derivative(k, f);
    Ok(degree::<F>(&gcd(k, f, &d)) == Some(0))
}

/// `p`-th root of a polynomial whose derivative vanishes, over a perfect
/// field: `sum a_i t^(ip)` maps to `sum a_i^(1/p) t^i`.
fn pth_root<F: Field>(k: &F, f: &Poly<F>) -> Poly<F> {
    let p = k.characteristic() as usize;
    // x^(1/p) = x^(q/p) in F_q.
    let e = k.order() / p as u64;
    let out = f.iter().step_by(p).map(|c| k.pow(c, e)).collect();
    trim(k, out)
}

/// Squarefree decomposition: pairs `(g, e)` with `f = lc * prod g^e`, each
/// `g` monic squarefree and pairwise coprime.
pub fn squarefree_decomposition<F: Field>(k: &F, f: &Poly<F>) -> Vec<(Poly<F>, usize)> {
    let p = k.characteristic() as usize;
    let mut out = Vec::new();
    sqf_rec(k, &monic(k, f), 1, p, &mut out);
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

fn sqf_rec<F: Field>(k: &F, f: &Poly<F>, mult: usize, p: usize, out: &mut Vec<(Poly<F>, usize)>) {
    if degree::<F>(f).unwrap_or(0) == 0 {
        return;
    }
    let d = derivative(k, f);
    if d.is_empty() {
        sqf_rec(k, &pth_root(k, f), mult * p, p, out);
        return;
    }
    let mut c = gcd(k, f, &d);
    let mut w = divrem(k, f, &c).0;
    let mut i = 1;
    while degree::<F>(&w).unwrap_or(0) > 0 {
        let y = gcd(k, &w, &c);
        let z = divrem(k, &w, &y).0;
        if degree::<F>(&z).unwrap_or(0) > 0 {
            push_factor::<F>(out, monic(k, &z), i * mult);
        }
        w = y;
        c = divrem(k, &c, &w).0;
        i += 1;
    }
    if degree::<F>(&c).unwrap_or(0) > 0 {
        sqf_rec(k, &pth_root(k, &c), mult * p, p, out);
    }
}

fn push_factor<F: Field>(out: &mut Vec<(Poly<F>, usize)>, g: Poly<F>, e: usize) {
    if let Some(slot) = out.iter_mut().find(|(h, _)| *h == g) {
        slot.1 += e;
    } else {
        out.push((g, e));
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial: pairs
/// `(d, g)` where `g` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree<F: Field>(k: &F, f: &Poly<F>) -> Vec<(usize, Poly<F>)> {
    let mut out = Vec::new();
    let mut rest = monic(k, f);
    let t = monomial(k, k.one(), 1);
    let mut h = rem(k, &t, &rest);
    let mut d = 0;
    while degree::<F>(&rest).unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = powmod(k, &h, k.order() as u128, &rest);
        let g = gcd(k, &sub(k, &h, &t), &rest);
        if degree::<F>(&g).unwrap_or(0) > 0 {
            rest = divrem(k, &rest, &g).0;
            h = rem(k, &h, &rest);
            out.push((d, g));
        }
    }
    if degree::<F>(&rest).unwrap_or(0) > 0 {
        out.push((degree::<F>(&rest).unwrap(), rest));
    }
    out
}

/// Split a monic squarefree product of irreducibles of degree `d` into its
/// factors (Cantor–Zassenhaus, odd characteristic). The internal randomness
/// is seeded deterministically; output is sorted.
pub fn equal_degree<F: Field>(k: &F, f: &Poly<F>, d: usize) -> Vec<Poly<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    let mut stack = vec![monic(k, f)];
    let q = k.order() as u128;
    let e = (q.pow(d as u32) - 1) / 2;
    while let Some(g) = stack.pop() {
        let n = degree::<F>(&g).unwrap_or(0);
        if n == 0 {
            continue;
        }
        if n == d {
            out.push(g);
            continue;
        }
        loop {
            let a: Poly<F> = trim(k, (0..n).map(|_| k.random(&mut rng)).collect());
            if degree::<F>(&a).unwrap_or(0) == 0 {
                continue;
            }
            let b = sub(k, &powmod(k, &a, e, &g), &constant(k, k.one()));
            let h = gcd(k, &b, &g);
            let dh = degree::<F>(&h).unwrap_or(0);
            if dh > 0 && dh < n {
                let other = divrem(k, &g, &h).0;
                stack.push(h);
                stack.push(monic(k, &other));
                break;
            }
        }
    }
    sort_polys(k, &mut out);
    out
}

fn sort_polys<F: Field>(k: &F, v: &mut [Poly<F>]) {
    v.sort_by_key(|f| {
        let mut key: Vec<u64> = vec![f.len() as u64];
        key.extend(f.iter().map(|c| k.index_of(c)));
        key
    });
}

/// Full factorization into monic irreducibles with multiplicities.
pub fn factor<F: Field>(k: &F, f: &Poly<F>) -> Vec<(Poly<F>, usize)> {
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(k, f) {
        for (d, h) in distinct_degree(k, &g) {
            for irr in equal_degree(k, &h, d) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by_key(|(g, e)| {
        let mut key: Vec<u64> = vec![g.len() as u64];
        key.extend(g.iter().map(|c| k.index_of(c)));
        key.push(*e as u64);
        key
    });
    out
}

/// Distinct roots in `k`, sorted by index.
pub fn roots<F: Field>(k: &F, f: &Poly<F>) -> Vec<F::Elem> {
    if degree::<F>(f).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let t = monomial(k, k.one(), 1);
    let f = monic(k, f);
    let h = powmod(k, &t, k.order() as u128, &f);
    let g = gcd(k, &sub(k, &h, &t), &f);
    let mut rs: Vec<F::Elem> = equal_degree(k, &g, 1).into_iter().map(|lin| k.neg(&lin[0])).collect();
    rs.sort_by_key(|x| k.index_of(x));
    rs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::field::Gf;
    use proptest::prelude::*;

    fn f5() -> Gf {
        Gf::prime(5).unwrap()
    }

    #[test]
    fn squarefree_examples() {
        let k = f5();
        assert!(is_squarefree(&k, &from_ints(&k, &[0, 1])).unwrap());
        assert!(!is_squarefree(&k, &from_ints(&k, &[0, 0, 1])).unwrap());
        assert!(is_squarefree(&k, &Vec::new()).is_err());
    }

    #[test]
    fn t4_plus_1_over_f5_matches_factorization() {
        // Factorization oracle: t^4+1 over F_5 splits into two irreducible
        // quadratics (t^2+2)(t^2+3); both are irreducible since 2, 3 are
        // non-squares mod 5, and the factors are distinct.
        let k = f5();
        let f = from_ints(&k, &[1, 0, 0, 0, 1]);
        let prod = mul(&k, &from_ints(&k, &[2, 0, 1]), &from_ints(&k, &[3, 0, 1]));
        assert_eq!(prod, f);
        assert!(is_irreducible(&k, &from_ints(&k, &[2, 0, 1])));
        assert!(is_squarefree(&k, &f).unwrap());
        let fac = factor(&k, &f);
        assert_eq!(fac.len(), 2);
        assert!(fac.iter().all(|(g, e)| g.len() == 3 && *e == 1));
    }

    #[test]
    fn pth_powers_are_detected() {
        let k = f5();
        // (t+1)^5 * (t+2)
        let f = mul(&k, &pow(&k, &from_ints(&k, &[1, 1]), 5), &from_ints(&k, &[2, 1]));
        assert!(!is_squarefree(&k, &f).unwrap());
        let dec = squarefree_decomposition(&k, &f);
        assert_eq!(dec, vec![(from_ints(&k, &[2, 1]), 1), (from_ints(&k, &[1, 1]), 5)]);
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        let k = f5();
        // Number of monic irreducible quadratics over F_5 is (25-5)/2 = 10.
        let count = (0..25u64)
            .filter(|i| is_irreducible(&k, &vec![(i % 5) as u32, (i / 5) as u32, 1]))
            .count();
        assert_eq!(count, 10);
    }

    #[test]
    fn roots_over_extension_field() {
        let k = Gf::new(5, 2).unwrap();
        // t^4 + 1 splits completely over F_25.
        let f = from_ints(&k, &[1, 0, 0, 0, 1]);
        let rs = roots(&k, &f);
        assert_eq!(rs.len(), 4);
        for r in rs {
            assert!(k.is_zero(&eval(&k, &f, &r)));
        }
    }

    proptest! {
        #[test]
        fn divrem_reconstructs(a in proptest::collection::vec(0u32..23, 0..12),
                               b in proptest::collection::vec(0u32..23, 1..8)) {
            let k = Gf::prime(23).unwrap();
            let a = trim(&k, a);
            let b = trim(&k, b);
            prop_assume!(!b.is_empty());
            let (q, r) = divrem(&k, &a, &b);
            prop_assert_eq!(add(&k, &mul(&k, &q, &b), &r), a);
            prop_assert!(r.len() < b.len());
        }

        #[test]
        fn factorization_multiplies_back(a in proptest::collection::vec(0u32..7, 2..10)) {
            let k = Gf::prime(7).unwrap();
            let a = trim(&k, a);
            prop_assume!(a.len() >= 2);
            let mut prod = constant(&k, lead(&k, &a));
            for (g, e) in factor(&k, &a) {
                prop_assert!(is_irreducible(&k, &g));
                prod = mul(&k, &prod, &pow(&k, &g, e as u64));
            }
            prop_assert_eq!(prod, a);
        }
    }
}
