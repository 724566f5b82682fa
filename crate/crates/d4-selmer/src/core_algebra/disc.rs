//! Invariant tuples `b = (p2, p4, q4, p6)` and the discriminant of the
//! associated quartic `f(t) = t^4 + p2 t^3 + p4 t^2 + p6 t + q4^2`.

use serde::Serialize;

use super::field::{Field, Ring};
use super::linalg;
use super::poly::{self, Poly};

/// The invariants `(p2, p4, q4, p6)`, of weights `(1, 2, 2, 3)` under the
/// scaling action (polynomial degrees 2, 4, 4, 6 on `V`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InvTuple<E> {
    pub p2: E,
    pub p4: E,
    pub q4: E,
    pub p6: E,
}

impl<E: Clone> InvTuple<E> {
    pub fn new(p2: E, p4: E, q4: E, p6: E) -> Self {
        InvTuple { p2, p4, q4, p6 }
    }

    /// Components in the order `(p2, p4, q4, p6)`.
    pub fn to_array(&self) -> [E; 4] {
        [self.p2.clone(), self.p4.clone(), self.q4.clone(), self.p6.clone()]
    }

    pub fn from_array(a: [E; 4]) -> Self {
        let [p2, p4, q4, p6] = a;
        InvTuple { p2, p4, q4, p6 }
    }

    /// Componentwise map into another coefficient ring.
    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> InvTuple<T> {
        InvTuple {
            p2: f(&self.p2),
            p4: f(&self.p4),
            q4: f(&self.q4),
            p6: f(&self.p6),
        }
    }
}

impl<E: Clone> InvTuple<E> {
    /// Weighted scaling `(l p2, l^2 p4, l^2 q4, l^3 p6)`.
    pub fn scale<R: Ring<Elem = E>>(&self, r: &R, l: &E) -> Self {
        let l2 = r.mul(l, l);
        let l3 = r.mul(&l2, l);
        InvTuple {
            p2: r.mul(l, &self.p2),
            p4: r.mul(&l2, &self.p4),
            q4: r.mul(&l2, &self.q4),
            p6: r.mul(&l3, &self.p6),
        }
    }

    /// The quartic `f(t) = t^4 + p2 t^3 + p4 t^2 + p6 t + q4^2`, lowest
    /// degree first (not trimmed; always length 5).
    pub fn quartic<R: Ring<Elem = E>>(&self, r: &R) -> Vec<E> {
        vec![
            r.mul(&self.q4, &self.q4),
            self.p6.clone(),
            self.p4.clone(),
            self.p2.clone(),
            r.one(),
        ]
    }
}

/// Discriminant of `t^4 + b t^3 + c t^2 + d t + e` over any commutative ring.
pub fn monic_quartic_disc<R: Ring>(r: &R, b: &R::Elem, c: &R::Elem, d: &R::Elem, e: &R::Elem) -> R::Elem {
    let m = |x: &R::Elem, y: &R::Elem| r.mul(x, y);
    let n = |k: i64| r.from_i64(k);
    let (b2, c2, d2, e2) = (m(b, b), m(c, c), m(d, d), m(e, e));
    let (b3, c3, d3, e3) = (m(&b2, b), m(&c2, c), m(&d2, d), m(&e2, e));
    let (b4, c4, d4) = (m(&b2, &b2), m(&c2, &c2), m(&d2, &d2));
    let terms: [(i64, R::Elem); 16] = [
        (256, e3.clone()),
        (-192, m(&m(b, d), &e2)),
        (-128, m(&c2, &e2)),
        (144, m(&m(c, &d2), e)),
        (-27, d4),
        (144, m(&m(&b2, c), &e2)),
        (-6, m(&m(&b2, &d2), e)),
        (-80, m(&m(&m(b, &c2), d), e)),
        (18, m(&m(b, c), &d3)),
        (16, m(&c4, e)),
        (-4, m(&c3, &d2)),
        (-27, m(&b4, &e2)),
        (18, m(&m(&m(&b3, c), d), e)),
        (-4, m(&b3, &d3)),
        (-4, m(&m(&b2, &c3), e)),
        (1, m(&m(&b2, &c2), &d2)),
    ];
    terms
        .iter()
        .fold(r.zero(), |acc, (k, t)| r.add(&acc, &r.mul(&n(*k), t)))
}

/// `Delta(b) = disc(t^4 + p2 t^3 + p4 t^2 + p6 t + q4^2)`, normalized as
/// `Res(f, f')` (the leading coefficient is 1). Homogeneous of weighted degree
/// 12 for the weights `(1, 2, 2, 3)`.
pub fn quartic_disc<R: Ring>(r: &R, b: &InvTuple<R::Elem>) -> R::Elem {
    let e = r.mul(&b.q4, &b.q4);
    monic_quartic_disc(r, &b.p2, &b.p4, &b.p6, &e)
}

/// Resultant of two polynomials over a field via the Sylvester determinant.
/// Used as an independent check of closed-form discriminants.
pub fn sylvester_resultant<F: Field>(k: &F, f: &Poly<F>, g: &Poly<F>) -> F::Elem {
    let (m, n) = (poly::degree::<F>(f).unwrap(), poly::degree::<F>(g).unwrap());
    let size = m + n;
    let mut s = linalg::zeros(k, size, size);
    // Rows 0..n hold shifted f, rows n..n+m shifted g; highest degree first.
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            s.set(i, i + j, c.clone());
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            s.set(n + i, i + j, c.clone());
        }
    }
    linalg::det(k, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::field::Gf;
    use proptest::prelude::*;

    fn k23() -> Gf {
        Gf::prime(23).unwrap()
    }

    fn tuple(k: &Gf, v: [i64; 4]) -> InvTuple<u32> {
        InvTuple::new(k.from_i64(v[0]), k.from_i64(v[1]), k.from_i64(v[2]), k.from_i64(v[3]))
    }

    #[test]
    fn zero_tuple_has_zero_discriminant() {
        let k = k23();
        assert_eq!(quartic_disc(&k, &tuple(&k, [0, 0, 0, 0])), 0);
    }

    #[test]
    fn repeated_root_example() {
        // b = (0, -2, 1, 0): f = t^4 - 2t^2 + 1 = (t^2 - 1)^2.
        let k = k23();
        let b = tuple(&k, [0, -2, 1, 0]);
        assert_eq!(b.quartic(&k), vec![1, 0, 21, 0, 1]);
        assert_eq!(quartic_disc(&k, &b), 0);
    }

    #[test]
    fn t4_plus_1_matches_resultant_oracle() {
        let k = k23();
        let b = tuple(&k, [0, 0, 1, 0]);
        let f = b.quartic(&k);
        let res = sylvester_resultant(&k, &f, &poly::derivative(&k, &f));
        assert_eq!(quartic_disc(&k, &b), res);
        // disc(t^4 + 1) = 256.
        assert_eq!(res, k.from_i64(256));
        assert_ne!(res, 0);
    }

    proptest! {
        #[test]
        fn closed_form_matches_resultant(v in proptest::array::uniform4(0i64..23)) {
            let k = k23();
            let b = tuple(&k, v);
            let f = b.quartic(&k);
            prop_assert_eq!(quartic_disc(&k, &b), sylvester_resultant(&k, &f, &poly::derivative(&k, &f)));
        }

        #[test]
        fn weighted_homogeneity(v in proptest::array::uniform4(0i64..23), l in 1i64..23) {
            let k = k23();
            let b = tuple(&k, v);
            let l = k.from_i64(l);
            let lhs = quartic_disc(&k, &b.scale(&k, &l));
            let rhs = k.mul(&k.pow(&l, 12), &quartic_disc(&k, &b));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn vanishes_exactly_on_repeated_roots(v in proptest::array::uniform4(0i64..7)) {
            let k = Gf::prime(7).unwrap();
            let b = tuple(&k, v);
            let f = b.quartic(&k);
            let sf = poly::is_squarefree(&k, &f).unwrap();
            prop_assert_eq!(quartic_disc(&k, &b) != 0, sf);
        }
    }
}
