//! The invariant map `pi: V -> B`, the Kostant section through the regular
//! nilpotent `E`, and the subregular slice `Sigma` through `e` with its
//! `(x, y)` chart on which `y(xy + 2 q4) = x^3 + p2 x^2 + p4 x + p6` holds.
//!
//! The invariants are polynomial combinations of the characteristic
//! polynomial coefficients `c2, c4, c6` of the matrix view (`det(t - v) =
//! t^8 + c2 t^6 + c4 t^4 + c6 t^2 + Pf^2`) and of `Pf = Pf(Psi v)`. The
//! combination, and the linear coordinates `x, y` on the slice, are solved at
//! construction time from the slice relation ("calibration") and then
//! re-verified on fresh points.

use rand::Rng;
use serde::Serialize;

use crate::core_algebra::disc::{quartic_disc, InvTuple};
use crate::core_algebra::field::{Field, Gf, Ring};
use crate::core_algebra::linalg::{self, Mat};
use crate::core_algebra::poly;
use crate::lie_d4::{basis_matrix, LieD4, VElem, LAMBDA_CHECK, RHO_CHECK};
use crate::rng::{job, stream};
use crate::AlgebraError;

/// Smallest characteristic for which the Lie-theoretic features are enabled.
pub const MIN_LIE_CHARACTERISTIC: u64 = 23;

/// Number of random slice points used to solve (and then to re-verify) the
/// calibration.
const CALIBRATION_POINTS: usize = 40;

/// The Kostant triple data: `E`, `F` with `[E, F] = d rho(2)`, and a
/// homogeneous basis of the centralizer of `F` (which lies in `V`).
#[derive(Clone, Debug)]
pub struct KostantData {
    pub e: Mat<u32>,
    pub f: Mat<u32>,
    /// Basis of `z_h(F)`, ordered by `rho`-weight `-1, -3, -3, -5`.
    pub zf: Vec<Mat<u32>>,
    pub zf_weights: Vec<i64>,
}

/// The slice data: `e`, `f` with `[e, f] = d lambda(2)`, and a homogeneous
/// basis of `z_h(f) ∩ V`.
#[derive(Clone, Debug)]
pub struct SliceData {
    pub e: Mat<u32>,
    pub f: Mat<u32>,
    /// Basis of the slice directions: the three of `lambda`-weight `-1`
    /// (chart weight 2) followed by the two of weight `-3` (chart weight 4).
    pub basis: Vec<Mat<u32>>,
    pub weights: Vec<i64>,
}

/// Calibration constants. With `(c2, c4, c6, Pf)` the raw invariants:
/// `p2 = u1 c2`, `q4 = u2 Pf`, `p4 = u3 c4 + u4 c2^2 + u5 Pf`,
/// `p6 = u6 c6 + u7 c2 c4 + u8 c2^3 + u9 c2 Pf`; `x` and `y` are linear forms
/// in the three weight-2 slice coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Calibration {
    pub u: [u32; 9],
    pub x_form: [u32; 3],
    pub y_form: [u32; 3],
    /// Number of fresh random slice points on which the relation was
    /// re-verified after solving.
    pub verified_points: usize,
}

/// Raw invariants of a matrix in `h`: `(c2, c4, c6, Pf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawInvariants {
    pub c2: u32,
    pub c4: u32,
    pub c6: u32,
    pub pf: u32,
}

/// Point of the slice in chart coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceChart {
    pub x: u32,
    pub y: u32,
    pub b: InvTuple<u32>,
}

/// Invariant theory of `(G, V)` over a fixed field with `p >= 23`.
#[derive(Clone, Debug)]
pub struct InvariantTheory {
    pub lie: LieD4,
    pub kostant: KostantData,
    pub slice: SliceData,
    pub calibration: Calibration,
}

/// Positions of `V` basis vectors of a given cocharacter weight.
fn v_positions_of_weight(lie: &LieD4, cochar: &[i64; 8], m: i64) -> Vec<(usize, usize)> {
    lie.weights
        .iter()
        .map(|w| w.position)
        .filter(|&(i, j)| cochar[i] - cochar[j] == m)
        .collect()
}

/// Solve `[x, y] = target` for `y` in the span of the `V` basis vectors of
/// cocharacter weight `-1`; the solution must be unique.
fn solve_partner(lie: &LieD4, cochar: &[i64; 8], x: &Mat<u32>) -> Result<Mat<u32>, AlgebraError> {
    let k = &lie.k;
    let positions = v_positions_of_weight(lie, cochar, -1);
    let cols: Vec<Vec<u32>> = positions
        .iter()
        .map(|&(i, j)| lie.h_coords(&linalg::bracket(k, x, &basis_matrix(k, i, j))))
        .collect();
    let a = Mat::from_fn(28, positions.len(), |r, c| cols[c][r]);
    if linalg::rank(k, &a) != positions.len() {
        return Err(AlgebraError::Consistency("sl2 partner is not unique".into()));
    }
    let target = lie.h_coords(&lie.d_cochar_2(cochar));
    let sol = linalg::solve(k, &a, &target)
        .ok_or_else(|| AlgebraError::Consistency("no sl2 partner in the weight -1 space".into()))?;
    let mut y = linalg::zeros(k, 8, 8);
    for (&(i, j), c) in positions.iter().zip(&sol) {
        y = linalg::add(k, &y, &linalg::scale(k, c, &basis_matrix(k, i, j)));
    }
    Ok(y)
}

/// Homogeneous basis of the centralizer of `y` in `h`, weight space by
/// weight space (descending weight), with the weights.
fn graded_centralizer(lie: &LieD4, cochar: &[i64; 8], y: &Mat<u32>) -> (Vec<Mat<u32>>, Vec<i64>) {
    let k = &lie.k;
    let mut weights: Vec<i64> = lie.basis_h.iter().map(|&(i, j)| cochar[i] - cochar[j]).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    weights.dedup();
    let mut basis = Vec::new();
    let mut ws = Vec::new();
    for m in weights {
        let positions: Vec<(usize, usize)> = lie
            .basis_h
            .iter()
            .copied()
            .filter(|&(i, j)| cochar[i] - cochar[j] == m)
            .collect();
        let cols: Vec<Vec<u32>> = positions
            .iter()
            .map(|&(i, j)| lie.h_coords(&linalg::bracket(k, y, &basis_matrix(k, i, j))))
            .collect();
        let a = Mat::from_fn(28, positions.len(), |r, c| cols[c][r]);
        for v in linalg::kernel(k, &a) {
            let mut z = linalg::zeros(k, 8, 8);
            for (&(i, j), c) in positions.iter().zip(&v) {
                z = linalg::add(k, &z, &linalg::scale(k, c, &basis_matrix(k, i, j)));
            }
            basis.push(z);
            ws.push(m);
        }
    }
    (basis, ws)
}

/// `(c2, c4, c6, Pf)` of a matrix in `so(Psi)`.
pub fn raw_invariants(lie: &LieD4, m: &Mat<u32>) -> RawInvariants {
    let k = &lie.k;
    let cp = linalg::charpoly(k, m);
    let coef = |i: usize| cp.get(i).copied().unwrap_or(0);
    let pf = linalg::pfaffian(k, &linalg::mul(k, &lie.psi, m));
    RawInvariants {
        c2: coef(6),
        c4: coef(4),
        c6: coef(2),
        pf,
    }
}

impl Calibration {
    fn apply(&self, k: &Gf, r: &RawInvariants) -> InvTuple<u32> {
        let u = &self.u;
        let c2sq = k.mul(&r.c2, &r.c2);
        let p2 = k.mul(&u[0], &r.c2);
        let q4 = k.mul(&u[1], &r.pf);
        let p4 = k.sum(&[k.mul(&u[2], &r.c4), k.mul(&u[3], &c2sq), k.mul(&u[4], &r.pf)]);
        let p6 = k.sum(&[
            k.mul(&u[5], &r.c6),
            k.mul(&u[6], &k.mul(&r.c2, &r.c4)),
            k.mul(&u[7], &k.mul(&c2sq, &r.c2)),
            k.mul(&u[8], &k.mul(&r.c2, &r.pf)),
        ]);
        InvTuple::new(p2, p4, q4, p6)
    }
}

fn eval_form(k: &Gf, form: &[u32; 3], w: &[u32]) -> u32 {
    k.sum(&[k.mul(&form[0], &w[0]), k.mul(&form[1], &w[1]), k.mul(&form[2], &w[2])])
}

/// Residual `y(xy + 2 q4) - (x^3 + p2 x^2 + p4 x + p6)` of the slice relation.
pub fn relation_residual(k: &Gf, x: &u32, y: &u32, b: &InvTuple<u32>) -> u32 {
    let xy = k.mul(x, y);
    let two_q4 = k.add(&b.q4, &b.q4);
    let lhs = k.mul(y, &k.add(&xy, &two_q4));
    let x2 = k.mul(x, x);
    let rhs = k.sum(&[k.mul(&x2, x), k.mul(&b.p2, &x2), k.mul(&b.p4, x), b.p6]);
    k.sub(&lhs, &rhs)
}

/// One random slice sample used by the calibration solve.
struct Sample {
    w: [u32; 3],
    raw: RawInvariants,
}

impl InvariantTheory {
    /// Build the Kostant and slice data and run the calibration. Requires
    /// characteristic at least 23.
    pub fn new(lie: LieD4) -> Result<Self, AlgebraError> {
        Self::with_seed(lie, 0)
    }

    /// As [`InvariantTheory::new`], with an explicit seed for the random
    /// calibration points.
    pub fn with_seed(lie: LieD4, seed: u64) -> Result<Self, AlgebraError> {
        let p = lie.k.characteristic();
        if p < MIN_LIE_CHARACTERISTIC {
            return Err(AlgebraError::CharacteristicTooSmall {
                required: MIN_LIE_CHARACTERISTIC,
                got: p,
            });
        }
        let e_big = lie.kostant_e();
        let f_big = solve_partner(&lie, &RHO_CHECK, &e_big)?;
        let (zf, zf_weights) = graded_centralizer(&lie, &RHO_CHECK, &f_big);
        if zf.len() != 4 || !zf.iter().all(|z| lie.in_v(z)) || zf_weights != vec![-1, -3, -3, -5] {
            return Err(AlgebraError::Consistency("unexpected centralizer of F".into()));
        }
        let e_small = lie.slice_e();
        let f_small = solve_partner(&lie, &LAMBDA_CHECK, &e_small)?;
        let (zall, wall) = graded_centralizer(&lie, &LAMBDA_CHECK, &f_small);
        let (basis, weights): (Vec<_>, Vec<_>) = zall.into_iter().zip(wall).filter(|(z, _)| lie.in_v(z)).unzip();
        if weights != vec![-1, -1, -1, -3, -3] {
            return Err(AlgebraError::Consistency("unexpected slice directions".into()));
        }
        let kostant = KostantData {
            e: e_big,
            f: f_big,
            zf,
            zf_weights,
        };
        let slice = SliceData {
            e: e_small,
            f: f_small,
            basis,
            weights,
        };
        let placeholder = Calibration {
            u: [0; 9],
            x_form: [0; 3],
            y_form: [0; 3],
            verified_points: 0,
        };
        let mut th = InvariantTheory {
            lie,
            kostant,
            slice,
            calibration: placeholder,
        };
        th.calibration = th.calibrate(seed)?;
        Ok(th)
    }

    pub fn field(&self) -> &Gf {
        &self.lie.k
    }

    /// `e + sum c_i z_i` for chart coordinates `c` (weight-2 first).
    pub fn slice_matrix(&self, c: &[u32; 5]) -> Mat<u32> {
        let k = self.field();
        let mut m = self.slice.e.clone();
        for (ci, z) in c.iter().zip(&self.slice.basis) {
            if !k.is_zero(ci) {
                m = linalg::add(k, &m, &linalg::scale(k, ci, z));
            }
        }
        m
    }

    /// Solve `C4 = Pf = 0` in the weight-4 coordinates given the weight-2
    /// coordinates (both are affine there).
    fn weight4_affine(&self, w: &[u32; 3]) -> (Mat<u32>, [u32; 2], [RawInvariants; 3]) {
        let k = self.field();
        let at = |c3: u32, c4: u32| raw_invariants(&self.lie, &self.slice_matrix(&[w[0], w[1], w[2], c3, c4]));
        let r0 = at(0, 0);
        let r1 = at(1, 0);
        let r2 = at(0, 1);
        let a = Mat::from_rows(vec![
            vec![k.sub(&r1.c4, &r0.c4), k.sub(&r2.c4, &r0.c4)],
            vec![k.sub(&r1.pf, &r0.pf), k.sub(&r2.pf, &r0.pf)],
        ]);
        (a, [r0.c4, r0.pf], [r0, r1, r2])
    }

    fn calibrate(&self, seed: u64) -> Result<Calibration, AlgebraError> {
        let k = self.field().clone();
        let p = k.characteristic();
        let cons = |m: &str| AlgebraError::Consistency(format!("calibration: {m}"));

        // C2 restricted to the slice is a linear form in the weight-2 coordinates.
        let g: Vec<u32> = (0..3)
            .map(|i| {
                let mut c = [0u32; 5];
                c[i] = 1;
                raw_invariants(&self.lie, &self.slice_matrix(&c)).c2
            })
            .collect();
        let plane = linalg::kernel(&k, &Mat::from_rows(vec![g.clone()]));
        if plane.len() != 2 {
            return Err(cons("C2 vanishes on the slice"));
        }
        let qi = g.iter().position(|x| *x != 0).expect("C2 is nonzero");
        let mut q = [0u32; 3];
        q[qi] = k.inv(&g[qi]).unwrap();
        let plane_point = |w1: &u32, w2: &u32| -> [u32; 3] {
            [0, 1, 2].map(|i| k.add(&k.mul(w1, &plane[0][i]), &k.mul(w2, &plane[1][i])))
        };

        // On the plane C2 = 0, impose C4 = Pf = 0 and read off C6 as a binary cubic.
        let c6_on_plane = |w1: &u32, w2: &u32| -> Result<u32, AlgebraError> {
            let w = plane_point(w1, w2);
            let (a, r0, _) = self.weight4_affine(&w);
            let rhs = vec![k.neg(&r0[0]), k.neg(&r0[1])];
            let sol = linalg::solve(&k, &a, &rhs).ok_or_else(|| cons("C4 = Pf = 0 not solvable"))?;
            let r = raw_invariants(&self.lie, &self.slice_matrix(&[w[0], w[1], w[2], sol[0], sol[1]]));
            Ok(r.c6)
        };
        let nodes: Vec<u32> = (0..4).map(|i| k.from_i64(i)).collect();
        let vals: Vec<u32> = nodes.iter().map(|w| c6_on_plane(w, &1)).collect::<Result<_, _>>()?;
        let vander = Mat::from_fn(4, 4, |i, j| k.pow(&nodes[i], j as u64));
        let cubic = linalg::solve(&k, &vander, &vals).ok_or_else(|| cons("interpolation"))?;
        let cubic = poly::trim(&k, cubic);
        if cubic.is_empty() {
            return Err(cons("C6 vanishes on the null plane"));
        }
        // Linear forms (a, b) = a w1 + b w2 vanishing on the root lines.
        let mut lines: Vec<[u32; 2]> = poly::roots(&k, &cubic).iter().map(|r| [1, k.neg(r)]).collect();
        if poly::degree::<Gf>(&cubic) == Some(2) {
            lines.push([0, 1]);
        }
        if lines.len() != 3 {
            return Err(cons("the null-plane cubic does not split into three distinct lines"));
        }

        // Extend a form on the plane to the weight-2 space, vanishing on q.
        let basis3 = Mat::from_rows(vec![plane[0].clone(), plane[1].clone(), q.to_vec()]);
        let extend = |l: &[u32; 2]| -> [u32; 3] {
            let sol = linalg::solve(&k, &basis3, &[l[0], l[1], 0]).expect("basis of the weight-2 space");
            [sol[0], sol[1], sol[2]]
        };

        // Random calibration points.
        let mut rng = stream(seed, job::CALIBRATION, 0);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Sample {
            let c: [u32; 5] = [0; 5].map(|_| k.random(rng));
            Sample {
                w: [c[0], c[1], c[2]],
                raw: raw_invariants(&self.lie, &self.slice_matrix(&c)),
            }
        };
        let samples: Vec<Sample> = (0..CALIBRATION_POINTS).map(|_| draw(&mut rng)).collect();
        let fresh: Vec<Sample> = (0..CALIBRATION_POINTS).map(|_| draw(&mut rng)).collect();

        let two = k.from_i64(2);
        let half = k.inv(&two).unwrap();
        let mut candidates: Vec<Calibration> = Vec::new();
        for i in 0..3 {
            for (j, kk) in [((i + 1) % 3, (i + 2) % 3), ((i + 2) % 3, (i + 1) % 3)] {
                // Find a, b with b l_k - a l_j = 2 l_i.
                let m2 = Mat::from_rows(vec![
                    vec![lines[kk][0], k.neg(&lines[j][0])],
                    vec![lines[kk][1], k.neg(&lines[j][1])],
                ]);
                let Some(ab) = linalg::solve(&k, &m2, &[k.mul(&two, &lines[i][0]), k.mul(&two, &lines[i][1])]) else {
                    continue;
                };
                let (bb, aa) = (ab[0], ab[1]);
                let y_plane =
                    [0, 1].map(|t| k.mul(&half, &k.add(&k.mul(&bb, &lines[kk][t]), &k.mul(&aa, &lines[j][t]))));
                let x0 = extend(&lines[i]);
                let y0 = extend(&y_plane);
                for s in 0..p {
                    let s = k.from_i64(s as i64);
                    let x_form = [0, 1, 2].map(|t| k.add(&x0[t], &k.mul(&s, &g[t])));
                    if let Some(c) = self.solve_constants(&samples, &x_form, &y0, &g) {
                        candidates.push(c);
                    }
                }
            }
        }
        // Normalize p2 = c2, then fix the sign of q4 (and y) lexicographically.
        let mut normalized: Vec<Calibration> = candidates
            .into_iter()
            .filter_map(|c| {
                let mu = k.inv(&c.u[0])?;
                let mu2 = k.mul(&mu, &mu);
                let mu3 = k.mul(&mu2, &mu);
                let mut u = c.u;
                u[0] = k.mul(&u[0], &mu);
                for x in &mut u[1..5] {
                    *x = k.mul(x, &mu2);
                }
                for x in &mut u[5..9] {
                    *x = k.mul(x, &mu3);
                }
                let x_form = c.x_form.map(|x| k.mul(&x, &mu));
                let mut y_form = c.y_form.map(|x| k.mul(&x, &mu));
                let flipped = k.neg(&u[1]);
                if k.index_of(&flipped) < k.index_of(&u[1]) {
                    u[1] = flipped;
                    y_form = y_form.map(|x| k.neg(&x));
                }
                Some(Calibration {
                    u,
                    x_form,
                    y_form,
                    verified_points: 0,
                })
            })
            .collect();
        normalized.sort_by_key(|c| {
            (
                c.u.map(|x| k.index_of(&x)),
                c.x_form.map(|x| k.index_of(&x)),
                c.y_form.map(|x| k.index_of(&x)),
            )
        });
        normalized.dedup();
        let mut cal = match normalized.len() {
            0 => return Err(cons("no consistent calibration found")),
            1 => normalized.pop().unwrap(),
            n => return Err(cons(&format!("{n} inequivalent calibrations found"))),
        };

        // Re-verify on fresh points.
        for smp in &fresh {
            let b = cal.apply(&k, &smp.raw);
            let x = eval_form(&k, &cal.x_form, &smp.w);
            let y = eval_form(&k, &cal.y_form, &smp.w);
            if relation_residual(&k, &x, &y, &b) != 0 {
                return Err(cons("relation fails on a fresh point"));
            }
        }
        cal.verified_points = fresh.len();
        Ok(cal)
    }

    /// Solve the (linearized) calibration system for a fixed `x` form and a
    /// `y` form known modulo multiples of `C2`.
    fn solve_constants(&self, samples: &[Sample], x_form: &[u32; 3], y0: &[u32; 3], g: &[u32]) -> Option<Calibration> {
        let k = self.field();
        let two = k.from_i64(2);
        let mut rows = Vec::with_capacity(samples.len());
        let mut rhs = Vec::with_capacity(samples.len());
        for smp in samples {
            let r = &smp.raw;
            let x = eval_form(k, x_form, &smp.w);
            let y0v = eval_form(k, y0, &smp.w);
            let c2 = r.c2;
            let c2sq = k.mul(&c2, &c2);
            let n = |v: u32| k.neg(&v);
            rows.push(vec![
                k.mul(&two, &k.mul(&c2, &k.mul(&y0v, &x))),
                n(k.mul(&c2, &k.mul(&x, &x))),
                k.mul(&two, &k.mul(&y0v, &r.pf)),
                n(k.mul(&r.c4, &x)),
                n(k.mul(&c2sq, &x)),
                n(k.mul(&r.pf, &x)),
                n(r.c6),
                n(k.mul(&c2, &r.c4)),
                n(k.mul(&c2sq, &c2)),
                n(k.mul(&c2, &r.pf)),
            ]);
            let x3 = k.mul(&x, &k.mul(&x, &x));
            rhs.push(k.sub(&x3, &k.mul(&k.mul(&y0v, &y0v), &x)));
        }
        let a = Mat::from_rows(rows);
        if linalg::rank(k, &a) != 10 {
            return None;
        }
        let sol = linalg::solve(k, &a, &rhs)?;
        let r = sol[0];
        let mut u = [0u32; 9];
        u.copy_from_slice(&sol[1..10]);
        u[3] = k.add(&u[3], &k.mul(&r, &r));
        u[8] = k.add(&u[8], &k.mul(&two, &k.mul(&r, &u[1])));
        let y_form = [0, 1, 2].map(|t| k.add(&y0[t], &k.mul(&r, &g[t])));
        Some(Calibration {
            u,
            x_form: *x_form,
            y_form,
            verified_points: 0,
        })
    }

    /// Raw invariants of an element of `V`.
    pub fn raw(&self, v: &VElem) -> RawInvariants {
        raw_invariants(&self.lie, &self.lie.to_matrix(v))
    }

    /// The invariants `pi(v) = (p2, p4, q4, p6)`.
    pub fn pi(&self, v: &VElem) -> InvTuple<u32> {
        self.pi_matrix(&self.lie.to_matrix(v))
    }

    /// The invariants of a matrix in `V`.
    pub fn pi_matrix(&self, m: &Mat<u32>) -> InvTuple<u32> {
        self.calibration.apply(self.field(), &raw_invariants(&self.lie, m))
    }

    /// `Delta(pi(v))`.
    pub fn disc(&self, v: &VElem) -> u32 {
        quartic_disc(self.field(), &self.pi(v))
    }

    /// `E + sum z_i Z_i`.
    fn kostant_matrix(&self, z: &[u32; 4]) -> Mat<u32> {
        let k = self.field();
        let mut m = self.kostant.e.clone();
        for (zi, basis) in z.iter().zip(&self.kostant.zf) {
            if !k.is_zero(zi) {
                m = linalg::add(k, &m, &linalg::scale(k, zi, basis));
            }
        }
        m
    }

    /// The Kostant section `kappa_b`, by a graded triangular solve: `p2` is
    /// linear in the weight-2 coordinate, `(p4, q4)` affine in the two
    /// weight-4 coordinates once it is fixed, and `p6` affine in the last.
    pub fn kostant_section(&self, b: &InvTuple<u32>) -> Result<VElem, AlgebraError> {
        let k = self.field();
        let cons = |m: &str| AlgebraError::Consistency(format!("Kostant section: {m}"));
        let pi = |z: &[u32; 4]| self.pi_matrix(&self.kostant_matrix(z));
        let mut z = [0u32; 4];
        // Weight 2.
        let base = pi(&z).p2;
        let slope = k.sub(&pi(&[1, 0, 0, 0]).p2, &base);
        z[0] = k
            .div(&k.sub(&b.p2, &base), &slope)
            .ok_or_else(|| cons("p2 degenerate"))?;
        // Weight 4.
        let r0 = pi(&z);
        let r1 = pi(&[z[0], 1, 0, 0]);
        let r2 = pi(&[z[0], 0, 1, 0]);
        let a = Mat::from_rows(vec![
            vec![k.sub(&r1.p4, &r0.p4), k.sub(&r2.p4, &r0.p4)],
            vec![k.sub(&r1.q4, &r0.q4), k.sub(&r2.q4, &r0.q4)],
        ]);
        let sol = linalg::solve(k, &a, &[k.sub(&b.p4, &r0.p4), k.sub(&b.q4, &r0.q4)])
            .ok_or_else(|| cons("(p4, q4) degenerate"))?;
        z[1] = sol[0];
        z[2] = sol[1];
        // Weight 6.
        let base = pi(&z).p6;
        let slope = k.sub(&pi(&[z[0], z[1], z[2], 1]).p6, &base);
        z[3] = k
            .div(&k.sub(&b.p6, &base), &slope)
            .ok_or_else(|| cons("p6 degenerate"))?;
        let m = self.kostant_matrix(&z);
        let v = self.lie.from_matrix(&m)?;
        if self.pi_matrix(&m) != *b {
            return Err(cons("round trip failed"));
        }
        Ok(v)
    }

    /// The slice point with chart coordinates `c` (weight-2 coordinates
    /// first, then the two weight-4 coordinates).
    pub fn slice_param(&self, c: &[u32; 5]) -> VElem {
        self.lie
            .from_matrix(&self.slice_matrix(c))
            .expect("the slice lies in V")
    }

    /// Chart coordinates of a point of the slice, or an error if `v` is not
    /// on it.
    pub fn slice_position(&self, v: &VElem) -> Result<[u32; 5], AlgebraError> {
        let k = self.field();
        let diff = linalg::sub(k, &self.lie.to_matrix(v), &self.slice.e);
        let cols: Vec<Vec<u32>> = self.slice.basis.iter().map(|z| self.lie.h_coords(z)).collect();
        let a = Mat::from_fn(28, 5, |r, c| cols[c][r]);
        let sol = linalg::solve(k, &a, &self.lie.h_coords(&diff))
            .ok_or_else(|| AlgebraError::Precondition("element is not on the slice".into()))?;
        Ok([sol[0], sol[1], sol[2], sol[3], sol[4]])
    }

    /// `(x, y, b)` of a point on the slice.
    pub fn slice_coords(&self, v: &VElem) -> Result<SliceChart, AlgebraError> {
        let c = self.slice_position(v)?;
        Ok(self.chart_of(&c))
    }

    fn chart_of(&self, c: &[u32; 5]) -> SliceChart {
        let k = self.field();
        let w = [c[0], c[1], c[2]];
        SliceChart {
            x: eval_form(k, &self.calibration.x_form, &w),
            y: eval_form(k, &self.calibration.y_form, &w),
            b: self.pi_matrix(&self.slice_matrix(c)),
        }
    }

    /// The unique slice point with chart `(x, y, b)`; requires the curve
    /// relation.
    pub fn slice_lift(&self, b: &InvTuple<u32>, x: &u32, y: &u32) -> Result<VElem, AlgebraError> {
        let k = self.field();
        if relation_residual(k, x, y, b) != 0 {
            return Err(AlgebraError::Precondition("(x, y) is not on the curve of b".into()));
        }
        let u1 = self.calibration.u[0];
        let g: Vec<u32> = (0..3)
            .map(|i| {
                let mut c = [0u32; 5];
                c[i] = 1;
                k.mul(&u1, &raw_invariants(&self.lie, &self.slice_matrix(&c)).c2)
            })
            .collect();
        let a = Mat::from_rows(vec![
            g,
            self.calibration.x_form.to_vec(),
            self.calibration.y_form.to_vec(),
        ]);
        let w = linalg::solve(k, &a, &[b.p2, *x, *y])
            .ok_or_else(|| AlgebraError::Consistency("weight-2 chart is degenerate".into()))?;
        let pi = |c3: u32, c4: u32| self.pi_matrix(&self.slice_matrix(&[w[0], w[1], w[2], c3, c4]));
        let (r0, r1, r2) = (pi(0, 0), pi(1, 0), pi(0, 1));
        let a = Mat::from_rows(vec![
            vec![k.sub(&r1.p4, &r0.p4), k.sub(&r2.p4, &r0.p4)],
            vec![k.sub(&r1.q4, &r0.q4), k.sub(&r2.q4, &r0.q4)],
        ]);
        let s = linalg::solve(k, &a, &[k.sub(&b.p4, &r0.p4), k.sub(&b.q4, &r0.q4)])
            .ok_or_else(|| AlgebraError::Consistency("weight-4 chart is degenerate".into()))?;
        let c = [w[0], w[1], w[2], s[0], s[1]];
        if self.chart_of(&c)
            != (SliceChart {
                x: *x,
                y: *y,
                b: b.clone(),
            })
        {
            return Err(AlgebraError::Consistency("slice lift round trip failed".into()));
        }
        Ok(self.slice_param(&c))
    }

    /// Exact check of the slice relation as a polynomial identity in the five
    /// chart coordinates. The residual is weighted-homogeneous of weight 6
    /// with every coordinate of weight at least 2, so its degree in each
    /// variable is at most 3; a polynomial with that property vanishing on the
    /// grid `{0,1,2,3}^5` is identically zero.
    pub fn verify_relation_identity(&self) -> bool {
        let k = self.field();
        (0..4u32.pow(5)).all(|idx| {
            let c: [u32; 5] = [0, 1, 2, 3, 4].map(|i| k.from_i64(((idx / 4u32.pow(i)) % 4) as i64));
            let ch = self.chart_of(&c);
            relation_residual(k, &ch.x, &ch.y, &ch.b) == 0
        })
    }

    /// Ratio `Lie discriminant / Delta(pi(v))` over `samples` random
    /// regular semisimple points; an error if it is not constant.
    pub fn lie_disc_compare<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Result<u32, AlgebraError> {
        let k = self.field();
        let mut ratio: Option<u32> = None;
        let mut seen = 0;
        while seen < samples {
            let v = self.lie.random_v(rng);
            let m = self.lie.to_matrix(&v);
            let lie_disc = self.lie.lie_discriminant(&m);
            let d = quartic_disc(k, &self.pi_matrix(&m));
            if (lie_disc == 0) != (d == 0) {
                return Err(AlgebraError::Consistency(
                    "discriminants vanish on different loci".into(),
                ));
            }
            if d == 0 {
                continue;
            }
            let r = k.div(&lie_disc, &d).unwrap();
            match ratio {
                None => ratio = Some(r),
                Some(r0) if r0 != r => {
                    return Err(AlgebraError::Consistency("discriminant ratio is not constant".into()));
                }
                _ => {}
            }
            seen += 1;
        }
        ratio.ok_or_else(|| AlgebraError::Precondition("no samples requested".into()))
    }

    /// Uniformly random invariant tuple.
    pub fn random_b<R: Rng + ?Sized>(&self, rng: &mut R) -> InvTuple<u32> {
        let k = self.field();
        InvTuple::new(k.random(rng), k.random(rng), k.random(rng), k.random(rng))
    }

    /// Random invariant tuple with nonzero discriminant.
    pub fn random_rs_b<R: Rng + ?Sized>(&self, rng: &mut R) -> InvTuple<u32> {
        loop {
            let b = self.random_b(rng);
            if quartic_disc(self.field(), &b) != 0 {
                return b;
            }
        }
    }

    /// `lambda * v`.
    pub fn scale_v(&self, l: &u32, v: &VElem) -> VElem {
        let k = self.field();
        VElem {
            coords: v.coords.iter().map(|c| k.mul(l, c)).collect(),
        }
    }

    /// `Ad rho(t)` applied to an element of `V`.
    pub fn ad_rho(&self, t: &u32, v: &VElem) -> VElem {
        self.lie
            .from_matrix(&self.lie.ad_cochar(&RHO_CHECK, t, &self.lie.to_matrix(v)))
            .expect("rho acts on V")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_d4::{Ambient, Classification};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn th() -> &'static InvariantTheory {
        static TH: OnceLock<InvariantTheory> = OnceLock::new();
        TH.get_or_init(|| InvariantTheory::new(LieD4::new(Gf::prime(23).unwrap())).unwrap())
    }

    #[test]
    fn rejects_small_characteristic() {
        let err = InvariantTheory::new(LieD4::new(Gf::prime(19).unwrap())).unwrap_err();
        assert_eq!(err, AlgebraError::CharacteristicTooSmall { required: 23, got: 19 });
    }

    #[test]
    fn calibration_is_the_charpoly_normalization() {
        // Solved value: p2 = c2, q4 = Pf, p4 = c4, p6 = c6, i.e. the quartic
        // f(t) satisfies f(t^2) = det(t - v).
        assert_eq!(th().calibration.u, [1, 1, 1, 0, 0, 1, 0, 0, 0]);
        assert_eq!(th().calibration.verified_points, CALIBRATION_POINTS);
    }

    #[test]
    fn calibration_is_seed_independent() {
        let other = InvariantTheory::with_seed(LieD4::new(Gf::prime(23).unwrap()), 99).unwrap();
        assert_eq!(other.calibration.u, th().calibration.u);
        assert_eq!(other.calibration.x_form, th().calibration.x_form);
        assert_eq!(other.calibration.y_form, th().calibration.y_form);
    }

    #[test]
    fn calibration_at_another_prime() {
        let t = InvariantTheory::new(LieD4::new(Gf::prime(29).unwrap())).unwrap();
        assert_eq!(t.calibration.u, [1, 1, 1, 0, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn f_is_unique_and_forms_a_triple() {
        let t = th();
        let k = t.field();
        let kd = &t.kostant;
        assert_eq!(linalg::bracket(k, &kd.e, &kd.f), t.lie.d_cochar_2(&RHO_CHECK));
        assert!(t.lie.in_v(&kd.f));
        assert_eq!(kd.zf.len(), 4);
        let sd = &t.slice;
        assert_eq!(linalg::bracket(k, &sd.e, &sd.f), t.lie.d_cochar_2(&LAMBDA_CHECK));
        assert_eq!(sd.basis.len(), 5);
    }

    #[test]
    fn invariants_of_zero_and_nilpotents_vanish() {
        let t = th();
        let zero = InvTuple::new(0, 0, 0, 0);
        assert_eq!(t.pi(&VElem::zero()), zero);
        assert_eq!(t.pi_matrix(&t.kostant.e), zero);
        assert_eq!(t.pi_matrix(&t.slice.e), zero);
    }

    #[test]
    fn kostant_section_round_trip_and_zero() {
        let t = th();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(
            t.lie.to_matrix(&t.kostant_section(&InvTuple::new(0, 0, 0, 0)).unwrap()),
            t.kostant.e
        );
        for _ in 0..100 {
            let b = t.random_b(&mut rng);
            assert_eq!(t.pi(&t.kostant_section(&b).unwrap()), b);
        }
    }

    #[test]
    fn kostant_section_scaling_covariance() {
        let t = th();
        let k = t.field();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let b = t.random_b(&mut rng);
            let l = k.random_nonzero(&mut rng);
            // Scalar multiplication on V acts on B through the degrees (2, 4, 4, 6).
            let lhs = t.kostant_section(&b.scale(k, &k.mul(&l, &l))).unwrap();
            let rhs = t.ad_rho(&k.inv(&l).unwrap(), &t.scale_v(&l, &t.kostant_section(&b).unwrap()));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn invariance_and_homogeneity() {
        let t = th();
        let k = t.field();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let v = t.lie.random_v(&mut rng);
            let word = t.lie.random_word(&mut rng, 5);
            assert_eq!(t.pi(&t.lie.act_word(&word, &v).unwrap()), t.pi(&v));
            let l = k.random_nonzero(&mut rng);
            assert_eq!(t.pi(&t.scale_v(&l, &v)), t.pi(&v).scale(k, &k.mul(&l, &l)));
        }
    }

    #[test]
    fn slice_relation_is_an_identity() {
        assert!(th().verify_relation_identity());
    }

    #[test]
    fn slice_chart_round_trip() {
        let t = th();
        let k = t.field();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let e = t.slice_param(&[0; 5]);
        let ch = t.slice_coords(&e).unwrap();
        assert_eq!(
            ch,
            SliceChart {
                x: 0,
                y: 0,
                b: InvTuple::new(0, 0, 0, 0)
            }
        );
        assert_eq!(t.slice_lift(&ch.b, &0, &0).unwrap(), e);
        for _ in 0..100 {
            let c: [u32; 5] = [0; 5].map(|_| k.random(&mut rng));
            let v = t.slice_param(&c);
            let ch = t.slice_coords(&v).unwrap();
            assert_eq!(t.slice_position(&v).unwrap(), c);
            let back = t.slice_lift(&ch.b, &ch.x, &ch.y).unwrap();
            assert_eq!(back, v);
            assert_eq!(t.pi(&back), ch.b);
        }
    }

    #[test]
    fn slice_chart_weights() {
        // Scaling the weight-2 coordinates by s^2 and the weight-4 ones by
        // s^4 scales (x, y) by s^2 and b by the degree action.
        let t = th();
        let k = t.field();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let c: [u32; 5] = [0; 5].map(|_| k.random(&mut rng));
        let s = k.from_i64(3);
        let s2 = k.mul(&s, &s);
        let s4 = k.mul(&s2, &s2);
        let scaled = [
            k.mul(&s2, &c[0]),
            k.mul(&s2, &c[1]),
            k.mul(&s2, &c[2]),
            k.mul(&s4, &c[3]),
            k.mul(&s4, &c[4]),
        ];
        let a = t.slice_coords(&t.slice_param(&c)).unwrap();
        let b = t.slice_coords(&t.slice_param(&scaled)).unwrap();
        assert_eq!(b.x, k.mul(&s2, &a.x));
        assert_eq!(b.y, k.mul(&s2, &a.y));
        assert_eq!(b.b, a.b.scale(k, &s2));
    }

    #[test]
    fn slice_rejects_off_slice_and_off_curve() {
        let t = th();
        let mut v = VElem::zero();
        v.coords[0] = 1;
        assert!(t.slice_coords(&v).is_err());
        assert!(t.slice_lift(&InvTuple::new(0, 0, 0, 1), &0, &0).is_err());
    }

    #[test]
    fn lie_discriminant_ratio_is_one() {
        let t = th();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        assert_eq!(t.lie_disc_compare(&mut rng, 30).unwrap(), 1);
    }

    #[test]
    fn kostant_points_are_regular_semisimple() {
        let t = th();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = t.random_rs_b(&mut rng);
        let v = t.kostant_section(&b).unwrap();
        let m = t.lie.to_matrix(&v);
        assert_eq!(
            t.lie.classify(&v),
            Classification {
                regular: true,
                semisimple: true,
                rs: true
            }
        );
        assert_eq!(t.lie.centralizer_dim(&m, Ambient::G), 0);
        assert_eq!(t.lie.centralizer_dim(&m, Ambient::H), 4);
    }

    #[test]
    fn slice_e_is_subregular() {
        let t = th();
        assert_eq!(t.lie.centralizer_dim(&t.slice.e, Ambient::H), 6);
    }
}
