//! Rings and finite fields.
//!
//! Arithmetic is driven by a context object (`Ring`/`Field` implementors) so
//! that extension fields can share their multiplication tables; elements are
//! plain values that are cheap to copy and compare.

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;

use super::poly;
use crate::AlgebraError;

/// A commutative ring with identity, given as a context that operates on
/// element values.
pub trait Ring: Clone + Send + Sync {
    /// Element representation.
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Image of an integer under the structure map `Z -> R`.
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `a^e` by square-and-multiply.
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Sum of a sequence of elements.
    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// A finite field.
pub trait Field: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Number of elements `q`.
    fn order(&self) -> u64;
    /// The characteristic `p`.
    fn characteristic(&self) -> u64;
    /// The element with canonical index `i` in `0..q`; index 0 is zero.
    fn element(&self, index: u64) -> Self::Elem;
    /// Inverse of [`Field::element`].
    fn index_of(&self, a: &Self::Elem) -> u64;

    /// `a / b`, `None` when `b = 0`.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Uniformly random element.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        self.element(rng.gen_range(0..self.order()))
    }

    /// Uniformly random nonzero element.
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        self.element(rng.gen_range(1..self.order()))
    }

    /// Iterate over all elements in index order.
    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_> {
        Box::new((0..self.order()).map(move |i| self.element(i)))
    }

    /// Square root, if one exists in the field.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let q = self.order();
        if !self.is_one(&self.pow(a, (q - 1) / 2)) {
            return None;
        }
        // Roots of t^2 - a via the generic root finder.
        let f = vec![self.neg(a), self.zero(), self.one()];
        poly::roots(self, &f).into_iter().next()
    }
}

/// Deterministic primality test for the small moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest supported field order (tables are allocated for `q` entries).
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

#[derive(Debug)]
struct GfInner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, lowest degree first, as residues mod `p`.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for a primitive element `g`; empty when `m = 1`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; empty when `m = 1`.
    log: Vec<u32>,
}

/// The finite field `F_{p^m}`.
///
/// Elements are `u32` values encoding the coefficient vector of the residue
/// class modulo the defining polynomial in base `p` (lowest coefficient is the
/// least significant digit). For `m = 1` this is the usual residue in `0..p`.
#[derive(Clone, Debug)]
pub struct Gf {
    inner: Arc<GfInner>,
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}

impl Gf {
    /// The prime field `F_p`; requires `p >= 5` prime.
    pub fn prime(p: u64) -> Result<Self, AlgebraError> {
        Self::new(p, 1)
    }

    /// `F_{p^m}` with the lexicographically least monic irreducible modulus.
    pub fn new(p: u64, m: u32) -> Result<Self, AlgebraError> {
        check_params(p, m)?;
        if m == 1 {
            return Self::with_modulus(p, &[0, 1]);
        }
        let base = Self::prime(p)?;
        let modulus = poly::first_irreducible(&base, m as usize);
        let coeffs: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
        Self::with_modulus(p, &coeffs)
    }

    /// `F_{p^m}` defined by an explicit monic modulus (lowest degree first).
    /// Irreducibility is verified.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self, AlgebraError> {
        if modulus.len() < 2 {
            return Err(AlgebraError::InvalidModulus("degree must be at least 1".into()));
        }
        let m = (modulus.len() - 1) as u32;
        check_params(p, m)?;
        let md: Vec<u32> = modulus.iter().map(|&c| (c % p) as u32).collect();
        if *md.last().unwrap() != 1 {
            return Err(AlgebraError::InvalidModulus("modulus must be monic".into()));
        }
        let q = p.pow(m) as u32;
        if m == 1 {
            return Ok(Gf {
                inner: Arc::new(GfInner {
                    p: p as u32,
                    m,
                    q,
                    modulus: md,
                    exp: Vec::new(),
                    log: Vec::new(),
                }),
            });
        }
        let base = Self::prime(p)?;
        if !poly::is_irreducible(&base, &md) {
            return Err(AlgebraError::InvalidModulus(format!("{md:?} is reducible over F_{p}")));
        }
        let mut inner = GfInner {
            p: p as u32,
            m,
            q,
            modulus: md,
            exp: Vec::new(),
            log: Vec::new(),
        };
        build_tables(&mut inner);
        Ok(Gf { inner: Arc::new(inner) })
    }

    pub fn p(&self) -> u64 {
        self.inner.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    /// The defining polynomial, lowest degree first.
    pub fn modulus(&self) -> Vec<u64> {
        self.inner.modulus.iter().map(|&c| c as u64).collect()
    }

    /// Coefficient tuple (lowest first, length `m`) of an element.
    pub fn to_coeffs(&self, a: u32) -> Vec<u64> {
        let p = self.inner.p;
        let mut x = a;
        (0..self.inner.m)
            .map(|_| {
                let d = x % p;
                x /= p;
                d as u64
            })
            .collect()
    }

    /// Element from a coefficient tuple (lowest first); entries reduced mod `p`.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<u32, AlgebraError> {
        if coeffs.len() > self.inner.m as usize {
            return Err(AlgebraError::Parse(format!(
                "expected at most {} coefficients",
                self.inner.m
            )));
        }
        let p = self.inner.p as u64;
        Ok(coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c % p) as u32)
    }

    /// The Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: &u32) -> u32 {
        self.pow(a, self.inner.p as u64)
    }
}

fn check_params(p: u64, m: u32) -> Result<(), AlgebraError> {
    if !is_prime(p) {
        return Err(AlgebraError::InvalidCharacteristic(p));
    }
    if p < 5 {
        return Err(AlgebraError::InvalidCharacteristic(p));
    }
    if m == 0 {
        return Err(AlgebraError::InvalidModulus("degree must be at least 1".into()));
    }
    let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    if q > MAX_FIELD_ORDER as u128 {
        return Err(AlgebraError::FieldTooLarge(q as u64));
    }
    Ok(())
}

/// Multiply two encoded elements as polynomials modulo the modulus, without
/// tables; used only while building the tables.
fn slow_mul(inner: &GfInner, a: u32, b: u32) -> u32 {
    let p = inner.p as u64;
    let m = inner.m as usize;
    let digits = |mut x: u32| {
        let mut d = vec![0u64; m];
        for slot in d.iter_mut() {
            *slot = (x % inner.p) as u64;
            x /= inner.p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u64; 2 * m - 1];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for k in (m..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &mc) in inner.modulus[..m].iter().enumerate() {
            let idx = k - m + i;
            prod[idx] = (prod[idx] + p * p - c * mc as u64) % p;
        }
    }
    prod[..m].iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

fn build_tables(inner: &mut GfInner) {
    let q = inner.q as usize;
    let order = (q - 1) as u64;
    let mut prime_factors = Vec::new();
    let mut n = order;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            prime_factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        prime_factors.push(n);
    }
    let slow_pow = |inner: &GfInner, g: u32, mut e: u64| {
        let mut acc = 1u32;
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(inner, acc, base);
            }
            base = slow_mul(inner, base, base);
            e >>= 1;
        }
        acc
    };
    let generator = (2..inner.q)
        .find(|&g| prime_factors.iter().all(|&f| slow_pow(inner, g, order / f) != 1))
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * q];
    let mut log = vec![0u32; q];
    let mut x = 1u32;
    for i in 0..(q - 1) {
        exp[i] = x;
        log[x as usize] = i as u32;
        x = slow_mul(inner, x, generator);
    }
    for i in (q - 1)..(2 * q) {
        exp[i] = exp[i - (q - 1)];
    }
    inner.exp = exp;
    inner.log = log;
}

impl Ring for Gf {
    type Elem = u32;

    #[inline]
    fn zero(&self) -> u32 {
        0
    }

    #[inline]
    fn one(&self) -> u32 {
        1
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let inner = &*self.inner;
        if inner.m == 1 {
            let s = a + b;
            if s >= inner.p {
                s - inner.p
            } else {
                s
            }
        } else {
            let p = inner.p;
            let (mut x, mut y) = (*a, *b);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..inner.m {
                let mut d = x % p + y % p;
                if d >= p {
                    d -= p;
                }
                out += d * place;
                place *= p;
                x /= p;
                y /= p;
            }
            out
        }
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        let inner = &*self.inner;
        if *a == 0 {
            return 0;
        }
        if inner.m == 1 {
            inner.p - a
        } else {
            let p = inner.p;
            let mut x = *a;
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..inner.m {
                let d = x % p;
                out += ((p - d) % p) * place;
                place *= p;
                x /= p;
            }
            out
        }
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        let inner = &*self.inner;
        if inner.m == 1 {
            ((*a as u64 * *b as u64) % inner.p as u64) as u32
        } else if *a == 0 || *b == 0 {
            0
        } else {
            inner.exp[(inner.log[*a as usize] + inner.log[*b as usize]) as usize]
        }
    }

    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.inner.p as i64) as u32
    }

    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn pow(&self, a: &u32, e: u64) -> u32 {
        let inner = &*self.inner;
        if inner.m == 1 {
            let p = inner.p as u64;
            let mut base = *a as u64 % p;
            let mut e = e;
            let mut acc = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p;
                }
                base = base * base % p;
                e >>= 1;
            }
            acc as u32
        } else if *a == 0 {
            if e == 0 {
                1
            } else {
                0
            }
        } else {
            let order = (inner.q - 1) as u64;
            let l = (inner.log[*a as usize] as u64 * (e % order)) % order;
            inner.exp[l as usize]
        }
    }
}

impl Field for Gf {
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let inner = &*self.inner;
        if inner.m == 1 {
            Some(self.pow(a, (inner.p - 2) as u64))
        } else {
            let order = inner.q - 1;
            let l = inner.log[*a as usize];
            Some(inner.exp[((order - l) % order) as usize])
        }
    }

    fn order(&self) -> u64 {
        self.inner.q as u64
    }

    fn characteristic(&self) -> u64 {
        self.inner.p as u64
    }

    fn element(&self, index: u64) -> u32 {
        debug_assert!(index < self.inner.q as u64);
        index as u32
    }

    fn index_of(&self, a: &u32) -> u64 {
        *a as u64
    }
}

/// The ring of dual numbers `F[e]/(e^2)`, which models `O_v/(pi^2)` for a
/// place with residue field `F` in equal characteristic.
#[derive(Clone, Debug)]
pub struct DualRing<F: Field> {
    pub base: F,
}

impl<F: Field> DualRing<F> {
    pub fn new(base: F) -> Self {
        DualRing { base }
    }

    /// The element `a + b e`.
    pub fn make(&self, a: F::Elem, b: F::Elem) -> (F::Elem, F::Elem) {
        (a, b)
    }
}

impl<F: Field> Ring for DualRing<F> {
    type Elem = (F::Elem, F::Elem);

    fn zero(&self) -> Self::Elem {
        (self.base.zero(), self.base.zero())
    }

    fn one(&self) -> Self::Elem {
        (self.base.one(), self.base.zero())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.base.add(&a.0, &b.0), self.base.add(&a.1, &b.1))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.base.sub(&a.0, &b.0), self.base.sub(&a.1, &b.1))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        (self.base.neg(&a.0), self.base.neg(&a.1))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let f = &self.base;
        (f.mul(&a.0, &b.0), f.add(&f.mul(&a.0, &b.1), &f.mul(&a.1, &b.0)))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        (self.base.from_i64(n), self.base.zero())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.base.is_zero(&a.0) && self.base.is_zero(&a.1)
    }
}
