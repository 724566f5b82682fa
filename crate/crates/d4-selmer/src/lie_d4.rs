//! The graded Lie algebra `h = so_8 = g + V` attached to the involution
//! `theta = Ad(s)` of the adjoint group of type `D4`, its weight basis, and the
//! action of generators of `G(k)` on `V`.
//!
//! Matrices are 8 x 8 over a finite field; `so(Psi)` is spanned by the
//! vectors `X_ij = E_ij - E_{j'i'}` where `i' = PAIR[i]` is the index paired
//! with `i` by the form `Psi` (anti-diagonal in each 4 x 4 block).

use serde::Serialize;

use crate::core_algebra::field::{Field, Gf, Ring};
use crate::core_algebra::linalg::{self, Mat};
use crate::core_algebra::poly::{self, Poly};
use crate::AlgebraError;

/// Index paired with `i` by `Psi`.
pub const PAIR: [usize; 8] = [3, 2, 1, 0, 7, 6, 5, 4];

/// Diagonal of the involution `s`.
pub const S_DIAG: [i64; 8] = [1, -1, -1, 1, 1, -1, -1, 1];

/// Exponents of `(a, b, c, d)` in the diagonal entries of the torus
/// `diag(a, b, 1/b, 1/a, c, d, 1/d, 1/c)`.
pub const TORUS_EXPONENTS: [[i32; 4]; 8] = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, -1, 0, 0],
    [-1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [0, 0, 0, -1],
    [0, 0, -1, 0],
];

/// Exponents of the cocharacter `rho_check(t)` on the diagonal.
pub const RHO_CHECK: [i64; 8] = [3, 2, -2, -3, 1, 0, 0, -1];

/// Exponents of the cocharacter `lambda_check(t)` defining the slice.
pub const LAMBDA_CHECK: [i64; 8] = [2, 1, -1, -2, 0, 1, -1, 0];

/// The weight labels: row `l - 1` is `(2 n_1, ..., 2 n_4)` for label `l`.
pub const LABEL_SIGNS: [[i8; 4]; 16] = [
    [1, 1, 1, 1],
    [-1, 1, 1, 1],
    [1, -1, 1, 1],
    [1, 1, -1, 1],
    [1, 1, 1, -1],
    [-1, -1, 1, 1],
    [-1, 1, -1, 1],
    [-1, 1, 1, -1],
    [1, -1, -1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
    [-1, -1, -1, 1],
    [-1, -1, 1, -1],
    [-1, 1, -1, -1],
    [1, -1, -1, -1],
    [-1, -1, -1, -1],
];

/// Simple roots of `H` as `(a, b, c, d)` exponent vectors:
/// `alpha_1 = a/b, alpha_2 = b/c, alpha_3 = c/d, alpha_4 = cd`.
pub const SIMPLE_ROOTS_H: [[i32; 4]; 4] = [[1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1], [0, 0, 1, 1]];

/// Simple roots of `G`: `a_1 = ac, a_2 = a/c, a_3 = bd, a_4 = b/d`.
pub const ROOTS_G: [[i32; 4]; 4] = [[1, 0, 1, 0], [1, 0, -1, 0], [0, 1, 0, 1], [0, 1, 0, -1]];

/// Matrix positions of the root vectors `X_{a_i}` (negative roots transpose).
pub const ROOT_G_POSITIONS: [(usize, usize); 4] = [(0, 7), (0, 4), (1, 6), (1, 5)];

/// Matrix positions of `X_{alpha_i}` for the simple roots of `H`.
pub const SIMPLE_ROOT_H_POSITIONS: [(usize, usize); 4] = [(0, 1), (1, 4), (4, 5), (4, 6)];

/// Nonzero entries of the regular nilpotent `E`.
pub const KOSTANT_E: [(usize, usize, i64); 8] = [
    (0, 1, 1),
    (1, 4, 1),
    (2, 3, -1),
    (4, 5, 1),
    (4, 6, 1),
    (5, 7, -1),
    (6, 7, -1),
    (7, 2, -1),
];

/// Rows of the subregular nilpotent `e` through which the slice passes.
pub const SLICE_E: [[i64; 8]; 8] = [
    [0, 1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 2],
    [0, 0, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, -2, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, -1],
    [0, 0, 0, -1, 0, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, -1, 0],
];

/// A weight of `T` on `V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Weight {
    /// Label 1..16.
    pub label: usize,
    /// `(2 n_1(a), ..., 2 n_4(a))`.
    pub signs: [i8; 4],
    /// Exponent vector in `(a, b, c, d)`.
    pub exponents: [i32; 4],
    /// Coordinates in the basis `alpha_1..alpha_4` of the root lattice.
    pub alpha_coords: [i32; 4],
    /// Matrix position `(i, j)` of the weight vector `X_ij`.
    pub position: (usize, usize),
}

impl Weight {
    /// `<rho_check, a>`.
    pub fn rho_pairing(&self) -> i32 {
        pairing_with_diag(&RHO_CHECK, &self.exponents)
    }
}

/// Pairing of a diagonal cocharacter (exponents on the 8 diagonal entries)
/// with a character given by `(a, b, c, d)` exponents.
pub fn pairing_with_diag(cochar: &[i64; 8], exps: &[i32; 4]) -> i32 {
    // The cocharacter sends a, b, c, d to t^cochar[0], t^cochar[1], t^cochar[4], t^cochar[5].
    let e = [cochar[0], cochar[1], cochar[4], cochar[5]];
    (0..4).map(|i| e[i] as i32 * exps[i]).sum()
}

/// Exponent vector of the weight of the matrix entry `(i, j)`.
pub fn entry_exponents(i: usize, j: usize) -> [i32; 4] {
    let mut out = [0; 4];
    for (t, slot) in out.iter_mut().enumerate() {
        *slot = TORUS_EXPONENTS[i][t] - TORUS_EXPONENTS[j][t];
    }
    out
}

/// Coordinates of a root-lattice vector in the basis `alpha_1..alpha_4`.
pub fn alpha_coordinates(e: &[i32; 4]) -> Option<[i32; 4]> {
    let (ea, eb, ec, ed) = (e[0], e[1], e[2], e[3]);
    let s = ea + eb + ec;
    if (s + ed) % 2 != 0 {
        return None;
    }
    Some([ea, ea + eb, (s - ed) / 2, (s + ed) / 2])
}

/// Label (1..16) of a sign pattern.
pub fn label_of_signs(signs: &[i8; 4]) -> usize {
    LABEL_SIGNS
        .iter()
        .position(|s| s == signs)
        .expect("every sign pattern is labelled")
        + 1
}

/// An element of `V` in the weight basis, coordinates in label order 1..16.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VElem {
    pub coords: Vec<u32>,
}

impl VElem {
    pub fn zero() -> Self {
        VElem { coords: vec![0; 16] }
    }

    /// Coordinate of the weight with the given label (1-based).
    pub fn at(&self, label: usize) -> u32 {
        self.coords[label - 1]
    }

    /// Labels with vanishing coordinate.
    pub fn zero_set(&self) -> Vec<usize> {
        (1..=16).filter(|&l| self.at(l) == 0).collect()
    }

    /// Text form: 16 integers separated by spaces.
    pub fn to_text(&self, k: &Gf) -> String {
        self.coords
            .iter()
            .map(|c| k.index_of(c).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn from_text(k: &Gf, s: &str) -> Result<Self, AlgebraError> {
        let coords: Result<Vec<u32>, _> = s
            .split_whitespace()
            .map(|w| {
                w.parse::<u64>()
                    .ok()
                    .filter(|&x| x < k.order())
                    .map(|x| k.element(x))
                    .ok_or_else(|| AlgebraError::Parse(format!("bad field element {w:?}")))
            })
            .collect();
        let coords = coords?;
        if coords.len() != 16 {
            return Err(AlgebraError::Parse(format!(
                "expected 16 coordinates, got {}",
                coords.len()
            )));
        }
        Ok(VElem { coords })
    }
}

/// A point of the adjoint torus `T(k) = Hom(root lattice, k^x)`, given by its
/// values on the simple roots `alpha_1..alpha_4` of `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusElem {
    pub alpha_values: [u32; 4],
}

/// A root of `G`: `sign * a_{index+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GRoot {
    pub index: usize,
    pub positive: bool,
}

impl GRoot {
    /// Matrix position of the root vector.
    pub fn position(&self) -> (usize, usize) {
        let (i, j) = ROOT_G_POSITIONS[self.index];
        if self.positive {
            (i, j)
        } else {
            (j, i)
        }
    }

    pub fn exponents(&self) -> [i32; 4] {
        let e = ROOTS_G[self.index];
        if self.positive {
            e
        } else {
            [-e[0], -e[1], -e[2], -e[3]]
        }
    }

    /// All eight roots of `G`.
    pub fn all() -> Vec<GRoot> {
        (0..4)
            .flat_map(|index| [true, false].map(|positive| GRoot { index, positive }))
            .collect()
    }
}

/// A simple root of `H` or its negative: `sign * alpha_{index+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HRoot {
    pub index: usize,
    pub positive: bool,
}

impl HRoot {
    pub fn position(&self) -> (usize, usize) {
        let (i, j) = SIMPLE_ROOT_H_POSITIONS[self.index];
        if self.positive {
            (i, j)
        } else {
            (j, i)
        }
    }
}

/// Elements of the Klein four-group `W_0` of component representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum W0 {
    Identity,
    /// `(a, b, c, d) -> (a, b, 1/c, 1/d)`, acting on `a_1..a_4` as `(12)(34)`.
    Sigma,
    /// `(a, b, c, d) -> (b, a, d, c)`, acting as `(13)(24)`.
    Tau,
    /// The product, acting as `(14)(23)`.
    SigmaTau,
}

impl W0 {
    pub const ALL: [W0; 4] = [W0::Identity, W0::Sigma, W0::Tau, W0::SigmaTau];

    /// Index permutation `i -> perm[i]` of the representing permutation matrix.
    pub fn permutation(&self) -> [usize; 8] {
        const SIGMA: [usize; 8] = [0, 1, 2, 3, 7, 6, 5, 4];
        const TAU: [usize; 8] = [1, 0, 3, 2, 5, 4, 7, 6];
        match self {
            W0::Identity => [0, 1, 2, 3, 4, 5, 6, 7],
            W0::Sigma => SIGMA,
            W0::Tau => TAU,
            W0::SigmaTau => {
                let mut p = [0; 8];
                for i in 0..8 {
                    p[i] = SIGMA[TAU[i]];
                }
                p
            }
        }
    }

    pub fn compose(&self, other: &W0) -> W0 {
        let (a, b) = (self.permutation(), other.permutation());
        let mut p = [0; 8];
        for i in 0..8 {
            p[i] = a[b[i]];
        }
        *W0::ALL.iter().find(|w| w.permutation() == p).expect("W0 is closed")
    }

    /// Every element of `W_0` is an involution.
    pub fn inverse(&self) -> W0 {
        *self
    }

    /// Cycle notation of the induced permutation of `a_1..a_4`.
    pub fn name(&self) -> &'static str {
        match self {
            W0::Identity => "e",
            W0::Sigma => "(12)(34)",
            W0::Tau => "(13)(24)",
            W0::SigmaTau => "(14)(23)",
        }
    }

    pub fn from_name(s: &str) -> Option<W0> {
        W0::ALL.iter().copied().find(|w| w.name() == s)
    }
}

/// A generator of `G(k)` (or a component representative in `W_0`), acting on
/// `h` by conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GroupGen {
    Torus(TorusElem),
    /// `exp(c X_root)` for a root of `G`.
    Unipotent {
        root: GRoot,
        c: u32,
    },
    /// `exp(c X_{+-alpha_i})` for a simple root of `H`. These do not normalize
    /// `V`; acting with them on `V` is an error unless the image stays in `V`.
    UnipotentH {
        root: HRoot,
        c: u32,
    },
    Weyl(W0),
}

/// Which subalgebra a centralizer is taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    G,
    H,
}

/// Regularity / semisimplicity flags of an element of `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub regular: bool,
    pub semisimple: bool,
    pub rs: bool,
}

/// The graded algebra over a fixed finite field. Built once; immutable.
#[derive(Clone, Debug)]
pub struct LieD4 {
    pub k: Gf,
    pub psi: Mat<u32>,
    pub s: Mat<u32>,
    /// Representative positions of the 28 basis vectors of `h`.
    pub basis_h: Vec<(usize, usize)>,
    /// Positions of the 12 basis vectors of `g`.
    pub basis_g: Vec<(usize, usize)>,
    /// Weights of `V` in label order.
    pub weights: Vec<Weight>,
}

/// `X_ij = E_ij - E_{j'i'}` as a matrix (requires `j != PAIR[i]`).
pub fn basis_matrix(k: &Gf, i: usize, j: usize) -> Mat<u32> {
    assert_ne!(j, PAIR[i], "not a basis position");
    let mut m = linalg::zeros(k, 8, 8);
    m.set(i, j, 1);
    m.set(PAIR[j], PAIR[i], k.neg(&1));
    m
}

/// Canonical representative of the position pair `{(i,j), (j',i')}` and the
/// sign `X_ij = sign * X_rep`.
pub fn representative(i: usize, j: usize) -> ((usize, usize), bool) {
    let other = (PAIR[j], PAIR[i]);
    if (i, j) <= other {
        ((i, j), true)
    } else {
        (other, false)
    }
}

impl LieD4 {
    /// Build the algebra context. Requires `p >= 5` (enforced by `Gf`).
    pub fn new(k: Gf) -> Self {
        let psi = Mat::from_fn(8, 8, |i, j| if PAIR[i] == j { 1 } else { 0 });
        let s = linalg::diag(&k, &S_DIAG.map(|x| k.from_i64(x)));
        let mut basis_h = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                if j == PAIR[i] {
                    continue;
                }
                let (rep, _) = representative(i, j);
                if rep == (i, j) {
                    basis_h.push((i, j));
                }
            }
        }
        let basis_g: Vec<(usize, usize)> = basis_h
            .iter()
            .copied()
            .filter(|&(i, j)| S_DIAG[i] * S_DIAG[j] == 1)
            .collect();
        let mut weights: Vec<Weight> = basis_h
            .iter()
            .copied()
            .filter(|&(i, j)| S_DIAG[i] * S_DIAG[j] == -1)
            .map(|(i, j)| {
                let e = entry_exponents(i, j);
                let signs = [
                    (e[0] + e[2]) as i8,
                    (e[0] - e[2]) as i8,
                    (e[1] + e[3]) as i8,
                    (e[1] - e[3]) as i8,
                ];
                Weight {
                    label: label_of_signs(&signs),
                    signs,
                    exponents: e,
                    alpha_coords: alpha_coordinates(&e).expect("weights of V lie in the root lattice"),
                    position: (i, j),
                }
            })
            .collect();
        weights.sort_by_key(|w| w.label);
        LieD4 {
            k,
            psi,
            s,
            basis_h,
            basis_g,
            weights,
        }
    }

    /// `(dim h, dim g, dim V)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.basis_h.len(), self.basis_g.len(), self.weights.len())
    }

    pub fn weight(&self, label: usize) -> &Weight {
        &self.weights[label - 1]
    }

    /// Label of the weight sitting at a matrix position of `V`.
    pub fn label_at(&self, i: usize, j: usize) -> Option<usize> {
        let (rep, _) = representative(i, j);
        self.weights.iter().find(|w| w.position == rep).map(|w| w.label)
    }

    /// Whether `x^T Psi + Psi x = 0`.
    pub fn in_so(&self, x: &Mat<u32>) -> bool {
        let k = &self.k;
        let lhs = linalg::add(
            k,
            &linalg::mul(k, &x.transpose(), &self.psi),
            &linalg::mul(k, &self.psi, x),
        );
        linalg::is_zero(k, &lhs)
    }

    /// `theta(x) = s x s^{-1}`.
    pub fn theta(&self, x: &Mat<u32>) -> Mat<u32> {
        let k = &self.k;
        linalg::mul(k, &linalg::mul(k, &self.s, x), &self.s)
    }

    pub fn in_v(&self, x: &Mat<u32>) -> bool {
        self.in_so(x) && self.theta(x) == linalg::neg(&self.k, x)
    }

    pub fn in_g(&self, x: &Mat<u32>) -> bool {
        self.in_so(x) && self.theta(x) == *x
    }

    /// Matrix view of an element of `V`.
    pub fn to_matrix(&self, v: &VElem) -> Mat<u32> {
        let k = &self.k;
        let mut m = linalg::zeros(k, 8, 8);
        for (w, c) in self.weights.iter().zip(&v.coords) {
            let (i, j) = w.position;
            m.set(i, j, *c);
            m.set(PAIR[j], PAIR[i], k.neg(c));
        }
        m
    }

    /// Weight coordinates of a matrix in `V`.
    pub fn from_matrix(&self, m: &Mat<u32>) -> Result<VElem, AlgebraError> {
        if !self.in_v(m) {
            return Err(AlgebraError::Precondition("matrix does not lie in V".into()));
        }
        Ok(VElem {
            coords: self
                .weights
                .iter()
                .map(|w| *m.get(w.position.0, w.position.1))
                .collect(),
        })
    }

    /// Coordinates of an element of `h` in the 28-element basis.
    pub fn h_coords(&self, m: &Mat<u32>) -> Vec<u32> {
        self.basis_h.iter().map(|&(i, j)| *m.get(i, j)).collect()
    }

    pub fn h_from_coords(&self, c: &[u32]) -> Mat<u32> {
        let k = &self.k;
        let mut m = linalg::zeros(k, 8, 8);
        for (&(i, j), x) in self.basis_h.iter().zip(c) {
            m.set(i, j, k.add(m.get(i, j), x));
            let (a, b) = (PAIR[j], PAIR[i]);
            m.set(a, b, k.sub(m.get(a, b), x));
        }
        m
    }

    /// Integer matrix lifted into the field.
    pub fn int_matrix(&self, rows: &[[i64; 8]; 8]) -> Mat<u32> {
        Mat::from_fn(8, 8, |i, j| self.k.from_i64(rows[i][j]))
    }

    /// The regular nilpotent `E = X_{alpha_1} + ... + X_{alpha_4}`.
    pub fn kostant_e(&self) -> Mat<u32> {
        let mut m = linalg::zeros(&self.k, 8, 8);
        for &(i, j, v) in &KOSTANT_E {
            m.set(i, j, self.k.from_i64(v));
        }
        m
    }

    /// The subregular nilpotent `e`.
    pub fn slice_e(&self) -> Mat<u32> {
        self.int_matrix(&SLICE_E)
    }

    /// `d cochar(2)`: the diagonal matrix with doubled exponents.
    pub fn d_cochar_2(&self, cochar: &[i64; 8]) -> Mat<u32> {
        linalg::diag(&self.k, &cochar.map(|x| self.k.from_i64(2 * x)))
    }

    /// `Ad cochar(t)(x)`: scales entry `(i,j)` by `t^(c_i - c_j)`.
    pub fn ad_cochar(&self, cochar: &[i64; 8], t: &u32, x: &Mat<u32>) -> Mat<u32> {
        let k = &self.k;
        let ti = k.inv(t).expect("t is a unit");
        Mat::from_fn(8, 8, |i, j| {
            let e = cochar[i] - cochar[j];
            let f = if e >= 0 {
                k.pow(t, e as u64)
            } else {
                k.pow(&ti, (-e) as u64)
            };
            k.mul(&f, x.get(i, j))
        })
    }

    /// Root vector `X_a` of a root of `G`.
    pub fn root_vector(&self, r: GRoot) -> Mat<u32> {
        let (i, j) = r.position();
        basis_matrix(&self.k, i, j)
    }

    /// Value of a torus point on a root-lattice character (exponents in
    /// `(a, b, c, d)`).
    pub fn torus_character(&self, t: &TorusElem, exps: &[i32; 4]) -> u32 {
        let k = &self.k;
        let coords = alpha_coordinates(exps).expect("character of the adjoint torus");
        coords.iter().zip(&t.alpha_values).fold(1, |acc, (&m, x)| {
            let f = if m >= 0 {
                k.pow(x, m as u64)
            } else {
                k.pow(&k.inv(x).expect("torus values are units"), (-m) as u64)
            };
            k.mul(&acc, &f)
        })
    }

    /// Torus point with prescribed values on the roots `a_1..a_4` of `G` when
    /// those determine it up to the kernel; here the inverse problem is solved
    /// on the `alpha` basis directly, so this is a convenience constructor.
    pub fn torus(&self, alpha_values: [u32; 4]) -> Result<TorusElem, AlgebraError> {
        if alpha_values.iter().any(|x| self.k.is_zero(x)) {
            return Err(AlgebraError::Precondition("torus values must be units".into()));
        }
        Ok(TorusElem { alpha_values })
    }

    /// The torus point `cochar(t)` for a diagonal cocharacter.
    pub fn cochar_torus(&self, cochar: &[i64; 8], t: &u32) -> TorusElem {
        let k = &self.k;
        let ti = k.inv(t).expect("t is a unit");
        let alpha_values = SIMPLE_ROOTS_H.map(|a| {
            let e = pairing_with_diag(cochar, &a);
            if e >= 0 {
                k.pow(t, e as u64)
            } else {
                k.pow(&ti, (-e) as u64)
            }
        });
        TorusElem { alpha_values }
    }

    /// Permutation matrix of a `W_0` element (`P e_i = e_{perm[i]}`).
    pub fn weyl_matrix(&self, w: W0) -> Mat<u32> {
        let p = w.permutation();
        Mat::from_fn(8, 8, |i, j| if p[j] == i { 1 } else { 0 })
    }

    /// Conjugation action of a generator on an arbitrary element of `h`.
    pub fn act_matrix(&self, g: &GroupGen, x: &Mat<u32>) -> Result<Mat<u32>, AlgebraError> {
        let k = &self.k;
        match g {
            GroupGen::Torus(t) => Ok(Mat::from_fn(8, 8, |i, j| {
                let v = x.get(i, j);
                if k.is_zero(v) {
                    0
                } else {
                    k.mul(&self.torus_character(t, &entry_exponents(i, j)), v)
                }
            })),
            GroupGen::Unipotent { root, c } => {
                let n = linalg::scale(k, c, &self.root_vector(*root));
                let u = exp_nilpotent(k, &n)?;
                let ui = exp_nilpotent(k, &linalg::neg(k, &n))?;
                Ok(linalg::mul(k, &linalg::mul(k, &u, x), &ui))
            }
            GroupGen::UnipotentH { root, c } => {
                let (i, j) = root.position();
                let n = linalg::scale(k, c, &basis_matrix(k, i, j));
                let u = exp_nilpotent(k, &n)?;
                let ui = exp_nilpotent(k, &linalg::neg(k, &n))?;
                Ok(linalg::mul(k, &linalg::mul(k, &u, x), &ui))
            }
            GroupGen::Weyl(w) => {
                let p = w.permutation();
                let mut out = linalg::zeros(k, 8, 8);
                for i in 0..8 {
                    for j in 0..8 {
                        out.set(p[i], p[j], *x.get(i, j));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Action of a word `g_1 g_2 ... g_n` (applied right to left) on `h`.
    pub fn act_word_matrix(&self, word: &[GroupGen], x: &Mat<u32>) -> Result<Mat<u32>, AlgebraError> {
        let mut m = x.clone();
        for g in word.iter().rev() {
            m = self.act_matrix(g, &m)?;
        }
        Ok(m)
    }

    /// Action of a generator on `V`.
    pub fn act(&self, g: &GroupGen, v: &VElem) -> Result<VElem, AlgebraError> {
        self.from_matrix(&self.act_matrix(g, &self.to_matrix(v))?)
    }

    /// Action of a word on `V`.
    pub fn act_word(&self, word: &[GroupGen], v: &VElem) -> Result<VElem, AlgebraError> {
        self.from_matrix(&self.act_word_matrix(word, &self.to_matrix(v))?)
    }

    /// The induced permutation of labels under `w` together with the sign
    /// `w . e_a = sign * e_{w(a)}` of the weight vectors.
    pub fn weyl_on_weights(&self, w: W0) -> Vec<(usize, usize, bool)> {
        let p = w.permutation();
        self.weights
            .iter()
            .map(|wt| {
                let (i, j) = wt.position;
                let (rep, sign) = representative(p[i], p[j]);
                let target = self.label_at(rep.0, rep.1).expect("V is W0-stable");
                (wt.label, target, sign)
            })
            .collect()
    }

    /// Induced permutation of the roots `a_1..a_4` (0-based images).
    pub fn weyl_on_roots(&self, w: W0) -> [usize; 4] {
        let p = w.permutation();
        let mut out = [0; 4];
        for (idx, &(i, j)) in ROOT_G_POSITIONS.iter().enumerate() {
            let img = entry_exponents(p[i], p[j]);
            out[idx] = ROOTS_G
                .iter()
                .position(|r| *r == img)
                .expect("W0 permutes the simple roots of G");
        }
        out
    }

    /// Matrix of `ad(x)` restricted to the ambient subalgebra, in its basis
    /// (columns) with values in `h`-coordinates (rows).
    pub fn ad_matrix(&self, x: &Mat<u32>, ambient: Ambient) -> Mat<u32> {
        let k = &self.k;
        let basis = match ambient {
            Ambient::G => &self.basis_g,
            Ambient::H => &self.basis_h,
        };
        let cols: Vec<Vec<u32>> = basis
            .iter()
            .map(|&(i, j)| self.h_coords(&linalg::bracket(k, x, &basis_matrix(k, i, j))))
            .collect();
        Mat::from_fn(28, basis.len(), |r, c| cols[c][r])
    }

    /// `dim` of the centralizer of `x` in `g` or `h`.
    pub fn centralizer_dim(&self, x: &Mat<u32>, ambient: Ambient) -> usize {
        let a = self.ad_matrix(x, ambient);
        a.cols - linalg::rank(&self.k, &a)
    }

    /// Basis (as matrices) of the centralizer of `x` in `h`.
    pub fn centralizer_basis(&self, x: &Mat<u32>) -> Vec<Mat<u32>> {
        let a = self.ad_matrix(x, Ambient::H);
        linalg::kernel(&self.k, &a)
            .into_iter()
            .map(|c| self.h_from_coords(&c))
            .collect()
    }

    /// Whether the matrix is semisimple (squarefree minimal polynomial).
    pub fn is_semisimple(&self, x: &Mat<u32>) -> bool {
        let mp = linalg::minimal_polynomial(&self.k, x);
        poly::is_squarefree(&self.k, &mp).expect("minimal polynomial is nonzero")
    }

    /// Characteristic polynomial of `ad_h(x)` on the 28-dimensional algebra.
    pub fn ad_charpoly(&self, x: &Mat<u32>) -> Poly<Gf> {
        let a = self.ad_matrix(x, Ambient::H);
        linalg::charpoly(&self.k, &a)
    }

    /// The Lie-algebra discriminant: the coefficient of `t^4` (= `t^rank`) in
    /// the characteristic polynomial of `ad_h(x)`, i.e. the product of the
    /// values of all 24 roots on a regular semisimple element.
    pub fn lie_discriminant(&self, x: &Mat<u32>) -> u32 {
        let cp = self.ad_charpoly(x);
        cp.get(4).copied().unwrap_or(0)
    }

    /// Regular / semisimple / regular-semisimple flags.
    pub fn classify(&self, v: &VElem) -> Classification {
        let m = self.to_matrix(v);
        let regular = self.centralizer_dim(&m, Ambient::G) == 0;
        let semisimple = self.is_semisimple(&m);
        let rs = self.lie_discriminant(&m) != 0;
        Classification {
            regular,
            semisimple,
            rs,
        }
    }

    /// Random element of `V`.
    pub fn random_v<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> VElem {
        VElem {
            coords: (0..16).map(|_| self.k.random(rng)).collect(),
        }
    }

    /// Random torus point.
    pub fn random_torus<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> TorusElem {
        TorusElem {
            alpha_values: [0; 4].map(|_| self.k.random_nonzero(rng)),
        }
    }

    /// Random word of `len` torus and root-group generators of `G`.
    pub fn random_word<R: rand::Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<GroupGen> {
        let roots = GRoot::all();
        (0..len)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    GroupGen::Torus(self.random_torus(rng))
                } else {
                    GroupGen::Unipotent {
                        root: roots[rng.gen_range(0..roots.len())],
                        c: self.k.random(rng),
                    }
                }
            })
            .collect()
    }
}

/// `exp(n)` for a nilpotent `n` with `n^p = 0`, as the truncated series.
pub fn exp_nilpotent(k: &Gf, n: &Mat<u32>) -> Result<Mat<u32>, AlgebraError> {
    let p = k.characteristic();
    let mut out = linalg::identity(k, n.rows);
    let mut term = linalg::identity(k, n.rows);
    for i in 1..p {
        term = linalg::mul(k, &term, n);
        if linalg::is_zero(k, &term) {
            return Ok(out);
        }
        let inv_i = k.inv(&k.from_i64(i as i64)).expect("i < p");
        term = linalg::scale(k, &inv_i, &term);
        out = linalg::add(k, &out, &term);
    }
    if linalg::is_zero(k, &linalg::mul(k, &term, n)) {
        Ok(out)
    } else {
        Err(AlgebraError::Precondition(
            "exponential of a matrix whose p-th power does not vanish".into(),
        ))
    }
}

/// Smith normal form diagonal of a small integer matrix.
pub fn smith_invariants(m: &[[i64; 4]; 4]) -> Vec<i64> {
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.to_vec()).collect();
    let n = 4;
    let mut out = Vec::new();
    for t in 0..n {
        loop {
            // Find the smallest nonzero entry in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                out.push(0);
                break;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let piv = a[t][t];
            let mut clean = true;
            for i in (t + 1)..n {
                let q = a[i][t] / piv;
                for j in t..n {
                    a[i][j] -= q * a[t][j];
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in (t + 1)..n {
                let q = a[t][j] / piv;
                for row in a.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // Ensure divisibility of the remaining block.
                let bad = ((t + 1)..n)
                    .flat_map(|i| ((t + 1)..n).map(move |j| (i, j)))
                    .find(|&(i, j)| a[i][j] % piv != 0);
                if let Some((i, _)) = bad {
                    for j in t..n {
                        a[t][j] += a[i][j];
                    }
                    continue;
                }
                out.push(piv.abs());
                break;
            }
        }
    }
    out
}

/// The pairing matrix `<a_j^check, alpha_i>` between the coroots of `G` and
/// the simple roots of `H` (types are simply laced, so coroots pair through
/// the standard dot product on exponent vectors). Its columns express the
/// coroot lattice of `G` inside `X_*(T)` (dual to the root lattice of `H`).
pub fn coroot_pairing_matrix() -> [[i64; 4]; 4] {
    let mut m = [[0i64; 4]; 4];
    for (i, alpha) in SIMPLE_ROOTS_H.iter().enumerate() {
        for (j, a) in ROOTS_G.iter().enumerate() {
            m[i][j] = (0..4).map(|t| (alpha[t] * a[t]) as i64).sum();
        }
    }
    m
}

/// `[X_*(T) : coroot lattice of G]` and the invariant factors of the quotient.
pub fn fundamental_group() -> (i64, Vec<i64>) {
    let m = coroot_pairing_matrix();
    let inv = smith_invariants(&m);
    let index = inv.iter().product::<i64>().abs();
    (index, inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> LieD4 {
        LieD4::new(Gf::prime(23).unwrap())
    }

    #[test]
    fn dimensions() {
        assert_eq!(ctx().dims(), (28, 12, 16));
    }

    #[test]
    fn weight_table_is_a_bijection_onto_labels() {
        let c = ctx();
        let labels: Vec<usize> = c.weights.iter().map(|w| w.label).collect();
        assert_eq!(labels, (1..=16).collect::<Vec<_>>());
        for w in &c.weights {
            assert_eq!(w.signs, LABEL_SIGNS[w.label - 1]);
        }
        // Label 1 is the highest root ab.
        assert_eq!(c.weight(1).exponents, [1, 1, 0, 0]);
    }

    #[test]
    fn simple_roots_of_h_are_weights_of_v() {
        let c = ctx();
        let labels: Vec<usize> = SIMPLE_ROOT_H_POSITIONS
            .iter()
            .map(|&(i, j)| c.label_at(i, j).unwrap())
            .collect();
        assert_eq!(labels, vec![11, 2, 9, 10]);
    }

    #[test]
    fn basis_matrices_lie_in_so_psi() {
        let c = ctx();
        for &(i, j) in &c.basis_h {
            assert!(c.in_so(&basis_matrix(&c.k, i, j)));
        }
        for &(i, j) in &c.basis_g {
            assert!(c.in_g(&basis_matrix(&c.k, i, j)));
        }
        for w in &c.weights {
            assert!(c.in_v(&basis_matrix(&c.k, w.position.0, w.position.1)));
        }
    }

    #[test]
    fn grading_closure() {
        let c = ctx();
        let k = &c.k;
        let g: Vec<Mat<u32>> = c.basis_g.iter().map(|&(i, j)| basis_matrix(k, i, j)).collect();
        let v: Vec<Mat<u32>> = c
            .weights
            .iter()
            .map(|w| basis_matrix(k, w.position.0, w.position.1))
            .collect();
        for x in &g {
            for y in &g {
                assert!(c.in_g(&linalg::bracket(k, x, y)));
            }
            for y in &v {
                assert!(c.in_v(&linalg::bracket(k, x, y)));
            }
        }
        for x in &v {
            for y in &v {
                assert!(c.in_g(&linalg::bracket(k, x, y)));
            }
        }
    }

    #[test]
    fn theta_is_an_involution() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coords: Vec<u32> = (0..28).map(|_| c.k.random(&mut rng)).collect();
        let x = c.h_from_coords(&coords);
        assert_eq!(c.theta(&c.theta(&x)), x);
    }

    #[test]
    fn torus_acts_by_characters() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let t = c.random_torus(&mut rng);
            for w in &c.weights {
                let mut e = VElem::zero();
                e.coords[w.label - 1] = 1;
                let img = c.act(&GroupGen::Torus(t.clone()), &e).unwrap();
                let mut expected = VElem::zero();
                expected.coords[w.label - 1] = c.torus_character(&t, &w.exponents);
                assert_eq!(img, expected);
            }
        }
    }

    #[test]
    fn identity_torus_acts_trivially() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = c.random_v(&mut rng);
        let id = GroupGen::Torus(TorusElem { alpha_values: [1; 4] });
        assert_eq!(c.act(&id, &v).unwrap(), v);
    }

    #[test]
    fn w0_is_the_klein_group_on_roots() {
        let c = ctx();
        assert_eq!(c.weyl_on_roots(W0::Identity), [0, 1, 2, 3]);
        assert_eq!(c.weyl_on_roots(W0::Sigma), [1, 0, 3, 2]);
        assert_eq!(c.weyl_on_roots(W0::Tau), [2, 3, 0, 1]);
        assert_eq!(c.weyl_on_roots(W0::SigmaTau), [3, 2, 1, 0]);
        for w in W0::ALL {
            let m = c.weyl_matrix(w);
            // Permutation matrices preserving Psi and commuting with s up to sign.
            let k = &c.k;
            let mtpm = linalg::mul(k, &linalg::mul(k, &m.transpose(), &c.psi), &m);
            assert_eq!(mtpm, c.psi);
            assert_eq!(linalg::det(k, &m), 1);
        }
    }

    #[test]
    fn w0_permutes_weights_by_sign_permutation() {
        let c = ctx();
        for w in W0::ALL {
            let perm = c.weyl_on_roots(w);
            for (src, dst, _) in c.weyl_on_weights(w) {
                let s = c.weight(src).signs;
                let mut img = [0i8; 4];
                for i in 0..4 {
                    img[perm[i]] = s[i];
                }
                assert_eq!(c.weight(dst).signs, img);
            }
        }
    }

    #[test]
    fn unipotent_generators_preserve_v_and_brackets() {
        let c = ctx();
        let k = &c.k;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let word = c.random_word(&mut rng, 4);
            let x = c.to_matrix(&c.random_v(&mut rng));
            let y = c.to_matrix(&c.random_v(&mut rng));
            let gx = c.act_word_matrix(&word, &x).unwrap();
            let gy = c.act_word_matrix(&word, &y).unwrap();
            assert!(c.in_v(&gx));
            let lhs = c.act_word_matrix(&word, &linalg::bracket(k, &x, &y)).unwrap();
            assert_eq!(lhs, linalg::bracket(k, &gx, &gy));
        }
    }

    #[test]
    fn cocharacter_torus_matches_matrix_conjugation() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = c.to_matrix(&c.random_v(&mut rng));
        for cochar in [&RHO_CHECK, &LAMBDA_CHECK] {
            let t = c.cochar_torus(cochar, &5);
            assert_eq!(
                c.act_matrix(&GroupGen::Torus(t), &v).unwrap(),
                c.ad_cochar(cochar, &5, &v)
            );
        }
    }

    #[test]
    fn h_root_unipotents_leave_v() {
        let c = ctx();
        let e = c.kostant_e();
        let g = GroupGen::UnipotentH {
            root: HRoot {
                index: 0,
                positive: false,
            },
            c: 1,
        };
        let img = c.act_matrix(&g, &e).unwrap();
        assert!(c.in_so(&img));
        assert!(c.act(&g, &c.from_matrix(&e).unwrap()).is_err());
    }

    #[test]
    fn exponential_rejects_non_nilpotent() {
        let k = Gf::prime(5).unwrap();
        assert!(exp_nilpotent(&k, &linalg::identity(&k, 2)).is_err());
        let n = linalg::from_ints(&k, &[&[0, 1], &[0, 0]]);
        assert_eq!(
            exp_nilpotent(&k, &n).unwrap(),
            linalg::from_ints(&k, &[&[1, 1], &[0, 1]])
        );
    }

    #[test]
    fn kostant_e_is_a_regular_nilpotent_of_weight_one() {
        let c = ctx();
        let e = c.kostant_e();
        assert!(c.in_v(&e));
        assert_eq!(c.ad_cochar(&RHO_CHECK, &5, &e), linalg::scale(&c.k, &5, &e));
        assert_eq!(c.centralizer_dim(&e, Ambient::G), 0);
        let v = c.from_matrix(&e).unwrap();
        assert_eq!(
            c.classify(&v),
            Classification {
                regular: true,
                semisimple: false,
                rs: false
            }
        );
    }

    #[test]
    fn zero_is_semisimple_not_regular() {
        let c = ctx();
        let z = VElem::zero();
        assert_eq!(c.centralizer_dim(&c.to_matrix(&z), Ambient::G), 12);
        assert_eq!(
            c.classify(&z),
            Classification {
                regular: false,
                semisimple: true,
                rs: false
            }
        );
    }

    #[test]
    fn slice_e_is_subregular() {
        let c = ctx();
        let e = c.slice_e();
        assert!(c.in_v(&e));
        assert_eq!(c.ad_cochar(&LAMBDA_CHECK, &7, &e), linalg::scale(&c.k, &7, &e));
        assert_eq!(c.centralizer_dim(&e, Ambient::H), 6);
    }

    #[test]
    fn text_round_trip() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = c.random_v(&mut rng);
        assert_eq!(VElem::from_text(&c.k, &v.to_text(&c.k)).unwrap(), v);
        assert!(VElem::from_text(&c.k, "1 2 3").is_err());
    }

    #[test]
    fn fundamental_group_is_mu2_cubed() {
        let (index, inv) = fundamental_group();
        assert_eq!(index, 8);
        assert_eq!(inv, vec![1, 2, 2, 2]);
    }

    #[test]
    fn smith_form_of_diagonal() {
        assert_eq!(
            smith_invariants(&[[2, 0, 0, 0], [0, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 4]]),
            vec![1, 1, 2, 12]
        );
    }
}
