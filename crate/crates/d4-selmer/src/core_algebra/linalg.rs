//! Dense matrices over rings and fields: elimination, kernels, determinants,
//! characteristic polynomials and Pfaffians.

use super::field::{Field, Ring};
use super::poly::{self, Poly};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Entrywise map into another element type.
    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Submatrix on the given row and column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

pub fn zeros<R: Ring>(r: &R, rows: usize, cols: usize) -> Mat<R::Elem> {
    Mat::from_fn(rows, cols, |_, _| r.zero())
}

pub fn identity<R: Ring>(r: &R, n: usize) -> Mat<R::Elem> {
    Mat::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn diag<R: Ring>(r: &R, d: &[R::Elem]) -> Mat<R::Elem> {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { r.zero() })
}

pub fn from_ints<R: Ring>(r: &R, rows: &[&[i64]]) -> Mat<R::Elem> {
    Mat::from_rows(
        rows.iter()
            .map(|row| row.iter().map(|&x| r.from_i64(x)).collect())
            .collect(),
    )
}

pub fn add<R: Ring>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| r.add(x, y)).collect(),
    }
}

pub fn sub<R: Ring>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| r.sub(x, y)).collect(),
    }
}

pub fn scale<R: Ring>(r: &R, c: &R::Elem, a: &Mat<R::Elem>) -> Mat<R::Elem> {
    a.map(|x| r.mul(c, x))
}

pub fn neg<R: Ring>(r: &R, a: &Mat<R::Elem>) -> Mat<R::Elem> {
    a.map(|x| r.neg(x))
}

pub fn mul<R: Ring>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    assert_eq!(a.cols, b.rows, "dimension mismatch");
    let mut out = zeros(r, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if r.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let idx = i * b.cols + j;
                out.data[idx] = r.add(&out.data[idx], &r.mul(x, b.get(k, j)));
            }
        }
    }
    out
}

/// Matrix times column vector.
pub fn mul_vec<R: Ring>(r: &R, a: &Mat<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)))
        })
        .collect()
}

/// Commutator `[a, b] = ab - ba`.
pub fn bracket<R: Ring>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    sub(r, &mul(r, a, b), &mul(r, b, a))
}

pub fn is_zero<R: Ring>(r: &R, a: &Mat<R::Elem>) -> bool {
    a.data.iter().all(|x| r.is_zero(x))
}

pub fn trace<R: Ring>(r: &R, a: &Mat<R::Elem>) -> R::Elem {
    (0..a.rows.min(a.cols)).fold(r.zero(), |acc, i| r.add(&acc, a.get(i, i)))
}

pub fn pow<R: Ring>(r: &R, a: &Mat<R::Elem>, mut e: u64) -> Mat<R::Elem> {
    let mut acc = identity(r, a.rows);
    let mut base = a.clone();
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

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(k: &F, a: &mut Mat<F::Elem>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(piv) = (row..a.rows).find(|&i| !k.is_zero(a.get(i, col))) else {
            continue;
        };
        if piv != row {
            for j in 0..a.cols {
                a.data.swap(piv * a.cols + j, row * a.cols + j);
            }
        }
        let inv = k.inv(a.get(row, col)).expect("pivot is nonzero");
        for j in col..a.cols {
            let v = k.mul(a.get(row, j), &inv);
            a.set(row, j, v);
        }
        for i in 0..a.rows {
            if i == row {
                continue;
            }
            let factor = a.get(i, col).clone();
            if k.is_zero(&factor) {
                continue;
            }
            for j in col..a.cols {
                let v = k.sub(a.get(i, j), &k.mul(&factor, a.get(row, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<F: Field>(k: &F, a: &Mat<F::Elem>) -> usize {
    let mut m = a.clone();
    rref(k, &mut m).len()
}

/// Basis of the right kernel `{x : a x = 0}`, one vector per free column, in
/// increasing order of the free column (the free coordinate is 1).
pub fn kernel<F: Field>(k: &F, a: &Mat<F::Elem>) -> Vec<Vec<F::Elem>> {
    let mut m = a.clone();
    let pivots = rref(k, &mut m);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![k.zero(); a.cols];
            v[fc] = k.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(m.get(r, fc));
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, or `None` if the system is inconsistent.
/// Free variables are set to zero.
pub fn solve<F: Field>(k: &F, a: &Mat<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert_eq!(a.rows, b.len());
    let mut aug = Mat::from_fn(a.rows, a.cols + 1, |i, j| {
        if j < a.cols {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let pivots = rref(k, &mut aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![k.zero(); a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, a.cols).clone();
    }
    Some(x)
}

/// Determinant by Gaussian elimination.
pub fn det<F: Field>(k: &F, a: &Mat<F::Elem>) -> F::Elem {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut d = k.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| !k.is_zero(m.get(i, col))) else {
            return k.zero();
        };
        if piv != col {
            for j in 0..n {
                m.data.swap(piv * n + j, col * n + j);
            }
            d = k.neg(&d);
        }
        let pv = m.get(col, col).clone();
        d = k.mul(&d, &pv);
        let inv = k.inv(&pv).expect("pivot is nonzero");
        for i in (col + 1)..n {
            let factor = k.mul(m.get(i, col), &inv);
            if k.is_zero(&factor) {
                continue;
            }
            for j in col..n {
                let v = k.sub(m.get(i, j), &k.mul(&factor, m.get(col, j)));
                m.set(i, j, v);
            }
        }
    }
    d
}

/// Inverse, or `None` if singular.
pub fn inverse<F: Field>(k: &F, a: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else if j - n == i {
            k.one()
        } else {
            k.zero()
        }
    });
    let pivots = rref(k, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Mat::from_fn(n, n, |i, j| aug.get(i, j + n).clone()))
}

/// Characteristic polynomial `det(t I - a)` (monic, lowest degree first) via
/// reduction to upper Hessenberg form.
pub fn charpoly<F: Field>(k: &F, a: &Mat<F::Elem>) -> Poly<F> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut h = a.clone();
    // Similarity transform to upper Hessenberg form.
    for col in 0..n.saturating_sub(2) {
        let Some(piv) = ((col + 1)..n).find(|&i| !k.is_zero(h.get(i, col))) else {
            continue;
        };
        if piv != col + 1 {
            let r = col + 1;
            for j in 0..n {
                h.data.swap(piv * n + j, r * n + j);
            }
            for i in 0..n {
                h.data.swap(i * n + piv, i * n + r);
            }
        }
        let inv = k.inv(h.get(col + 1, col)).expect("pivot is nonzero");
        for i in (col + 2)..n {
            let factor = k.mul(h.get(i, col), &inv);
            if k.is_zero(&factor) {
                continue;
            }
            // row_i -= factor * row_{col+1}
            for j in 0..n {
                let v = k.sub(h.get(i, j), &k.mul(&factor, h.get(col + 1, j)));
                h.set(i, j, v);
            }
            // col_{col+1} += factor * col_i
            for r in 0..n {
                let v = k.add(h.get(r, col + 1), &k.mul(&factor, h.get(r, i)));
                h.set(r, col + 1, v);
            }
        }
    }
    // Recurrence for characteristic polynomials of leading principal blocks.
    let mut p: Vec<Poly<F>> = vec![poly::constant(k, k.one())];
    for m in 1..=n {
        let t_minus = vec![k.neg(h.get(m - 1, m - 1)), k.one()];
        let mut pm = poly::mul(k, &t_minus, &p[m - 1]);
        let mut prod = k.one();
        for i in 1..m {
            prod = k.mul(&prod, h.get(m - i, m - i - 1));
            let c = k.mul(&prod, h.get(m - i - 1, m - 1));
            pm = poly::sub(k, &pm, &poly::scale(k, &c, &p[m - i - 1]));
        }
        p.push(pm);
    }
    p.pop().expect("nonempty")
}

/// Characteristic polynomial `det(t I - a)` over an arbitrary commutative
/// ring, by Berkowitz's division-free algorithm.
pub fn charpoly_ring<R: Ring>(r: &R, a: &Mat<R::Elem>) -> Poly<R> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    // Coefficient vector, highest degree first, of det(tI - A_k) for the
    // trailing principal submatrices, built from the bottom-right corner.
    let mut c: Vec<R::Elem> = vec![r.one(), r.neg(a.get(n - 1, n - 1))];
    for k in (0..n - 1).rev() {
        let m = n - k - 1; // size of the trailing block below/right of (k,k)
        let row: Vec<R::Elem> = ((k + 1)..n).map(|j| a.get(k, j).clone()).collect();
        let col: Vec<R::Elem> = ((k + 1)..n).map(|i| a.get(i, k).clone()).collect();
        let sub: Vec<Vec<R::Elem>> = ((k + 1)..n)
            .map(|i| ((k + 1)..n).map(|j| a.get(i, j).clone()).collect())
            .collect();
        // Toeplitz column: 1, -a_kk, -R C, -R A C, ..., -R A^{m-1} C
        let mut toe = vec![r.one(), r.neg(a.get(k, k))];
        let mut v = col.clone();
        for _ in 0..m {
            let rv = row
                .iter()
                .zip(&v)
                .fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)));
            toe.push(r.neg(&rv));
            v = sub
                .iter()
                .map(|srow| {
                    srow.iter()
                        .zip(&v)
                        .fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)))
                })
                .collect();
        }
        // New coefficients: lower-triangular Toeplitz (size m+2 x m+1) times c.
        let mut nc = vec![r.zero(); m + 2];
        for (i, slot) in nc.iter_mut().enumerate() {
            let mut acc = r.zero();
            for (j, cj) in c.iter().enumerate() {
                if i >= j {
                    acc = r.add(&acc, &r.mul(&toe[i - j], cj));
                }
            }
            *slot = acc;
        }
        c = nc;
    }
    c.reverse();
    poly::trim(r, c)
}

/// Pfaffian of an alternating matrix over a ring, by expansion along the
/// first row (adequate for the 8 x 8 matrices used here).
pub fn pfaffian<R: Ring>(r: &R, a: &Mat<R::Elem>) -> R::Elem {
    assert_eq!(a.rows, a.cols);
    if a.rows % 2 == 1 {
        return r.zero();
    }
    let idx: Vec<usize> = (0..a.rows).collect();
    pf_rec(r, a, &idx)
}

fn pf_rec<R: Ring>(r: &R, a: &Mat<R::Elem>, idx: &[usize]) -> R::Elem {
    if idx.is_empty() {
        return r.one();
    }
    let i0 = idx[0];
    let mut acc = r.zero();
    let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let x = a.get(i0, j);
        if r.is_zero(x) {
            continue;
        }
        rest.clear();
        rest.extend(idx.iter().skip(1).filter(|&&l| l != j));
        let term = r.mul(x, &pf_rec(r, a, &rest));
        if pos % 2 == 1 {
            acc = r.add(&acc, &term);
        } else {
            acc = r.sub(&acc, &term);
        }
    }
    acc
}

/// Minimal polynomial of a square matrix (monic), found as the first linear
/// dependency among `I, a, a^2, ...`.
pub fn minimal_polynomial<F: Field>(k: &F, a: &Mat<F::Elem>) -> Poly<F> {
    let n = a.rows;
    let mut powers: Vec<Mat<F::Elem>> = vec![identity(k, n)];
    loop {
        let d = powers.len();
        let next = mul(k, powers.last().unwrap(), a);
        // Columns are the flattened powers I..a^{d-1}; solve for a^d.
        let sys = Mat::from_fn(n * n, d, |i, j| powers[j].data[i].clone());
        if let Some(x) = solve(k, &sys, &next.data) {
            let mut f: Poly<F> = x.iter().map(|c| k.neg(c)).collect();
            f.push(k.one());
            return f;
        }
        powers.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::field::{DualRing, Gf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(k: &Gf, n: usize, rng: &mut ChaCha8Rng) -> Mat<u32> {
        Mat::from_fn(n, n, |_, _| k.random(rng))
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let k = Gf::prime(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = Mat::from_fn(4, 7, |_, _| k.random(&mut rng));
            let ker = kernel(&k, &a);
            assert_eq!(ker.len() + rank(&k, &a), 7);
            for v in ker {
                assert!(mul_vec(&k, &a, &v).iter().all(|x| *x == 0));
            }
        }
    }

    #[test]
    fn inverse_and_det_are_consistent() {
        let k = Gf::prime(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = rand_mat(&k, 5, &mut rng);
            match inverse(&k, &a) {
                Some(ai) => {
                    assert_eq!(mul(&k, &a, &ai), identity(&k, 5));
                    assert_ne!(det(&k, &a), 0);
                }
                None => assert_eq!(det(&k, &a), 0),
            }
        }
    }

    #[test]
    fn hessenberg_and_berkowitz_agree() {
        let k = Gf::prime(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..9 {
            let a = rand_mat(&k, n, &mut rng);
            let c1 = charpoly(&k, &a);
            let c2 = charpoly_ring(&k, &a);
            assert_eq!(c1, c2);
            // Constant term is (-1)^n det(a); trace appears at degree n-1.
            let d = det(&k, &a);
            let sign = if n % 2 == 0 { d } else { k.neg(&d) };
            assert_eq!(c1[0], sign);
            assert_eq!(c1[n - 1], k.neg(&trace(&k, &a)));
        }
    }

    #[test]
    fn charpoly_over_dual_numbers_differentiates() {
        // det(tI - (A + eB)) = det(tI - A) + e * d/de; compare the e-part by
        // a finite difference in the base field.
        let k = Gf::prime(23).unwrap();
        let r = DualRing::new(k.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = rand_mat(&k, 4, &mut rng);
        let b = rand_mat(&k, 4, &mut rng);
        let ab = Mat::from_fn(4, 4, |i, j| (*a.get(i, j), *b.get(i, j)));
        let cp = charpoly_ring(&r, &ab);
        let base: Vec<u32> = cp.iter().map(|c| c.0).collect();
        assert_eq!(poly::trim(&k, base), charpoly(&k, &a));
        // The e-part is linear in B: check additivity against 2B.
        let ab2 = Mat::from_fn(4, 4, |i, j| (*a.get(i, j), k.add(b.get(i, j), b.get(i, j))));
        let cp2 = charpoly_ring(&r, &ab2);
        for (x, y) in cp.iter().zip(&cp2) {
            assert_eq!(k.add(&x.1, &x.1), y.1);
        }
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let k = Gf::prime(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 4, 6, 8] {
            let mut a = zeros(&k, n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let x = k.random(&mut rng);
                    a.set(i, j, x);
                    a.set(j, i, k.neg(&x));
                }
            }
            let pf = pfaffian(&k, &a);
            assert_eq!(k.mul(&pf, &pf), det(&k, &a));
        }
        // Pf [[0,1],[-1,0]] = 1
        let j = from_ints(&k, &[&[0, 1], &[-1, 0]]);
        assert_eq!(pfaffian(&k, &j), 1);
    }

    #[test]
    fn minimal_polynomial_divides_charpoly() {
        let k = Gf::prime(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = rand_mat(&k, 5, &mut rng);
        let mp = minimal_polynomial(&k, &a);
        assert!(poly::rem(&k, &charpoly(&k, &a), &mp).is_empty());
        // A nilpotent Jordan block has minimal polynomial t^3.
        let n = from_ints(&k, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(minimal_polynomial(&k, &n), vec![0, 0, 0, 1]);
        assert_eq!(minimal_polynomial(&k, &identity(&k, 3)), vec![22, 1]);
    }
}
