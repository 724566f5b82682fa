//! Local squarefree densities: `alpha_v` on `B` and `beta_v` on `V` over the
//! length-two local ring `O_v / (pi^2) = F_{q_v}[e]/(e^2)`, the volume
//! `vol G(O_v) = #G(F_q) / q^12`, the identity
//! `vol_G (1 - alpha) = 1 - beta`, truncated Euler products for the global
//! density `delta_B` on `P^1`, and Monte Carlo estimators.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::core_algebra::funcfield::count_monic_irreducible;
use crate::core_algebra::linalg::{self, Mat};
use crate::core_algebra::{quartic_disc, DualRing, Field, Gf, InvTuple, Ring};
use crate::curves_arithmetic::{in_xd, random_section};
use crate::lie_d4::{LieD4, VElem};
use crate::rng::{self, job};
use crate::AlgebraError;

/// `alpha` is computed by the lift strategy when `q_v^4` is at most this;
/// beyond it the closed form (validated against the lift strategy below
/// the guard) is used.
pub const LIFT_GUARD: u64 = 1 << 22;

/// Points `b` with `Delta(b) = grad Delta(b) = 0` have their `q^4` lifts
/// enumerated one by one when `q_v` is at most this; above it every such
/// lift is counted at once (the first-order term vanishes identically).
pub const DIRECT_LIFT_LIMIT: u64 = 13;

/// Tolerance, in standard errors, for Monte Carlo agreement.
pub const MC_SIGMAS: f64 = 4.0;

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn pow_big(q: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

/// Text form `"num/den"` of an exact rational.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The field with `q` elements, `q` a prime power.
pub fn field_of_order(q: u64) -> Result<Gf, AlgebraError> {
    let p = (2..=q)
        .find(|d| q % d == 0)
        .ok_or(AlgebraError::InvalidCharacteristic(q))?;
    let mut m = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    if r != 1 {
        return Err(AlgebraError::InvalidCharacteristic(q));
    }
    Gf::new(p, m)
}

fn check_char(q: u64) -> Result<(), AlgebraError> {
    let k = field_of_order(q)?;
    if k.characteristic() < 5 {
        return Err(AlgebraError::CharacteristicTooSmall {
            required: 5,
            got: k.characteristic(),
        });
    }
    Ok(())
}

fn tuple_at(k: &Gf, idx: u64) -> InvTuple<u32> {
    let q = k.order();
    let c = |i: u32| k.element(idx / q.pow(i) % q);
    InvTuple::new(c(0), c(1), c(2), c(3))
}

/// Counts behind `alpha(q)`: the discriminant locus, its critical points,
/// and the number of residues `x in B(O/pi^2)` with `Delta(x) = 0 mod pi^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaCount {
    pub q: u64,
    /// `#{b in B(F_q) : Delta(b) = 0}`.
    pub singular: u64,
    /// `#{b : Delta(b) = 0, grad Delta(b) = 0}`.
    pub critical: u64,
    /// Numerator of `alpha` over the denominator `q^8`.
    pub count: u128,
}

impl AlphaCount {
    pub fn alpha(&self) -> BigRational {
        ratio(self.count, pow_big(self.q, 8))
    }
}

/// `Delta(b + e x)` over the dual numbers.
fn dual_disc(r: &DualRing<Gf>, b: &InvTuple<u32>, x: &InvTuple<u32>) -> (u32, u32) {
    let z = InvTuple::from_array([0, 1, 2, 3].map(|i| (b.to_array()[i], x.to_array()[i])));
    quartic_disc(r, &z)
}

/// `alpha` by the first-order lift strategy: a residue `b` with
/// `Delta(b) != 0` has no lift with `Delta = 0 mod pi^2`; if `Delta(b) = 0`
/// and `grad Delta(b) != 0` exactly `q^3` of its `q^4` lifts do; if the
/// gradient vanishes the lifts are tested one by one (or, above
/// [`DIRECT_LIFT_LIMIT`], all `q^4` counted).
pub fn alpha_lift(k: &Gf) -> Result<AlphaCount, AlgebraError> {
    let q = k.order();
    check_char(q)?;
    if q.pow(4) > LIFT_GUARD {
        return Err(AlgebraError::FieldTooLarge(q));
    }
    let dual = DualRing::new(k.clone());
    let basis: Vec<InvTuple<u32>> = (0..4)
        .map(|i| InvTuple::from_array([0, 1, 2, 3].map(|j| u32::from(i == j))))
        .collect();
    let (singular, critical, count) = (0..q.pow(4))
        .into_par_iter()
        .map(|idx| {
            let b = tuple_at(k, idx);
            if quartic_disc(k, &b) != 0 {
                return (0u64, 0u64, 0u128);
            }
            let gradient_zero = basis.iter().all(|e| dual_disc(&dual, &b, e).1 == 0);
            if !gradient_zero {
                return (1, 0, (q as u128).pow(3));
            }
            let lifts = if q <= DIRECT_LIFT_LIMIT {
                (0..q.pow(4))
                    .filter(|&j| dual_disc(&dual, &b, &tuple_at(k, j)) == (0, 0))
                    .count() as u128
            } else {
                (q as u128).pow(4)
            };
            (1, 1, lifts)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(AlphaCount {
        q,
        singular,
        critical,
        count,
    })
}

/// `alpha` by testing every one of the `q^8` residues in `B(O/pi^2)`.
pub fn alpha_exhaustive(k: &Gf) -> Result<AlphaCount, AlgebraError> {
    let q = k.order();
    check_char(q)?;
    if q > 7 {
        return Err(AlgebraError::FieldTooLarge(q));
    }
    let dual = DualRing::new(k.clone());
    let q4 = q.pow(4);
    let (singular, critical, count) = (0..q4)
        .into_par_iter()
        .map(|i| {
            let b = tuple_at(k, i);
            let mut hits = 0u128;
            let mut all = true;
            for j in 0..q4 {
                if dual_disc(&dual, &b, &tuple_at(k, j)) == (0, 0) {
                    hits += 1;
                } else {
                    all = false;
                }
            }
            let sing = u64::from(hits > 0);
            (sing, u64::from(all), hits)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(AlphaCount {
        q,
        singular,
        critical,
        count,
    })
}

/// Closed form `alpha(q) = (5q^3 - 9q^2 + 8q - 3) / q^5`, from the point
/// counts `#{Delta = 0} = q^3 + q - 1` and `#{Delta = grad Delta = 0} =
/// 4q^2 - 5q + 2` on `B(F_q)`.
pub fn alpha_closed_form(q: u64) -> BigRational {
    let q = BigInt::from(q);
    let num = BigInt::from(5) * &q * &q * &q - BigInt::from(9) * &q * &q + BigInt::from(8) * &q - 3;
    BigRational::new(num, num_traits::pow(q, 5))
}

/// `alpha(q_v)`: the lift strategy when feasible, otherwise the closed form.
pub fn alpha_v(q: u64) -> Result<BigRational, AlgebraError> {
    check_char(q)?;
    if q.pow(4) <= LIFT_GUARD {
        Ok(alpha_lift(&field_of_order(q)?)?.alpha())
    } else {
        Ok(alpha_closed_form(q))
    }
}

/// `q^2 (q^2 - 1)^2`.
pub fn so4_order_formula(q: u64) -> u128 {
    let q = q as u128;
    q * q * (q * q - 1) * (q * q - 1)
}

/// The split form on `F_q^4`: `B(x, y) = x^T J y` with `J` antidiagonal.
fn split_form(k: &Gf, x: &[u32], y: &[u32]) -> u32 {
    k.sum(&(0..4).map(|i| k.mul(&x[i], &y[3 - i])).collect::<Vec<_>>())
}

fn all_vectors(k: &Gf) -> Vec<[u32; 4]> {
    let q = k.order();
    (0..q.pow(4))
        .map(|idx| [0u32, 1, 2, 3].map(|i| k.element(idx / q.pow(i) % q)))
        .collect()
}

/// Columns are filled hyperbolic pair by hyperbolic pair, so that every
/// partial frame extends to a full isometry (Witt's theorem).
const COLUMN_ORDER: [usize; 4] = [0, 3, 1, 2];

/// Nonzero candidates for the next column (in [`COLUMN_ORDER`]) given the
/// columns already fixed: `B(g_i, g_j) = J_ij` against each of them.
fn column_candidates<'a>(
    k: &'a Gf,
    vectors: &'a [[u32; 4]],
    cols: &'a [[u32; 4]],
) -> impl Iterator<Item = &'a [u32; 4]> + 'a {
    let i = COLUMN_ORDER[cols.len()];
    vectors.iter().filter(move |v| {
        v.iter().any(|&c| c != 0)
            && split_form(k, &v[..], &v[..]) == 0
            && cols
                .iter()
                .zip(COLUMN_ORDER)
                .all(|(c, j)| split_form(k, &v[..], &c[..]) == u32::from(i + j == 3))
    })
}

/// `#SO_4(F_q)` for the split form, by constructive column-by-column
/// enumeration: at each step the admissible columns are listed, their
/// number recorded, and the first one fixed (the orthogonal group acts
/// simply transitively on frames, so the count does not depend on the
/// choice). `#SO_4 = #O_4 / 2`.
pub fn so4_order_enumerated(k: &Gf) -> u128 {
    let vectors = all_vectors(k);
    let mut cols: Vec<[u32; 4]> = Vec::new();
    let mut order: u128 = 1;
    for _ in 0..4 {
        let cands: Vec<[u32; 4]> = column_candidates(k, &vectors, &cols).copied().collect();
        order *= cands.len() as u128;
        cols.push(cands[0]);
    }
    order / 2
}

/// `#SO_4(F_q)` by full depth-first enumeration of isometries, counting
/// determinant one directly (small `q` only).
pub fn so4_order_exhaustive(k: &Gf) -> u128 {
    fn rec(k: &Gf, vectors: &[[u32; 4]], cols: &mut Vec<[u32; 4]>, count: &mut u128) {
        if cols.len() == 4 {
            let mut ordered = [[0u32; 4]; 4];
            for (c, j) in cols.iter().zip(COLUMN_ORDER) {
                ordered[j] = *c;
            }
            let m = Mat::from_fn(4, 4, |i, j| ordered[j][i]);
            if linalg::det(k, &m) == 1 {
                *count += 1;
            }
            return;
        }
        let cands: Vec<[u32; 4]> = column_candidates(k, vectors, cols).copied().collect();
        for c in cands {
            cols.push(c);
            rec(k, vectors, cols, count);
            cols.pop();
        }
    }
    let vectors = all_vectors(k);
    let mut count = 0;
    rec(k, &vectors, &mut Vec::new(), &mut count);
    count
}

/// `vol G(O_v) = #G(F_q) / q^12` with `#G(F_q) = #SO_4(F_q)^2` (the
/// central isogeny `SO_4 x SO_4 -> G` preserves point counts over finite
/// fields). `#SO_4` by column enumeration when `q^4` is within the guard.
pub fn vol_g(q: u64) -> Result<BigRational, AlgebraError> {
    check_char(q)?;
    let so4 = if q.pow(4) <= LIFT_GUARD {
        so4_order_enumerated(&field_of_order(q)?)
    } else {
        so4_order_formula(q)
    };
    let so4 = BigInt::from(so4);
    Ok(BigRational::new(&so4 * &so4, pow_big(q, 12)))
}

/// `beta = 1 - vol_G (1 - alpha)`.
pub fn beta_exact(q: u64) -> Result<BigRational, AlgebraError> {
    let one = BigRational::one();
    Ok(&one - vol_g(q)? * (&one - alpha_v(q)?))
}

/// A Monte Carlo estimate of a probability.
#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub hits: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, n: u64, seed: u64) -> Self {
        let mean = hits as f64 / n as f64;
        McEstimate {
            mean,
            stderr: (mean * (1.0 - mean) / n as f64).sqrt(),
            n,
            hits,
            seed,
        }
    }

    /// `|mean - target| <= sigmas * stderr + slack`.
    pub fn agrees(&self, target: f64, sigmas: f64, slack: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr + slack
    }
}

/// `Delta(pi(x))` for `x = x0 + e x1` in `V(O/pi^2)`, with the invariants
/// `(c2, c4, Pf, c6)` of the matrix model taken over the dual numbers.
pub fn dual_invariant_disc(lie: &LieD4, x0: &VElem, x1: &VElem) -> (u32, u32) {
    let k = &lie.k;
    let dual = DualRing::new(k.clone());
    let (m0, m1) = (lie.to_matrix(x0), lie.to_matrix(x1));
    let m = Mat::from_fn(8, 8, |i, j| (*m0.get(i, j), *m1.get(i, j)));
    let cp = linalg::charpoly_ring(&dual, &m);
    let coef = |i: usize| cp.get(i).copied().unwrap_or((0, 0));
    let psi = lie.psi.map(|c| (*c, 0));
    let pf = linalg::pfaffian(&dual, &linalg::mul(&dual, &psi, &m));
    quartic_disc(&dual, &InvTuple::new(coef(6), coef(4), pf, coef(2)))
}

/// Monte Carlo estimate of `beta`: the fraction of uniform points of
/// `V(O/pi^2)` (32 residue coordinates) with `Delta(pi(x)) = 0 mod pi^2`.
/// Sample `i` uses the stream `(seed, DENSITY_BETA, i)`.
pub fn beta_monte_carlo(k: &Gf, n: u64, seed: u64) -> Result<McEstimate, AlgebraError> {
    check_char(k.order())?;
    let lie = LieD4::new(k.clone());
    let hits = (0..n)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng::stream(seed, job::DENSITY_BETA, i);
            let x0 = lie.random_v(&mut r);
            let x1 = lie.random_v(&mut r);
            dual_invariant_disc(&lie, &x0, &x1) == (0, 0)
        })
        .count() as u64;
    Ok(McEstimate::from_hits(hits, n, seed))
}

/// Exact local densities at a place with residue field of size `q_v`.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub q_v: u64,
    pub alpha: String,
    pub alpha_f64: f64,
    pub alpha_method: String,
    pub vol_g: String,
    pub vol_g_f64: f64,
    pub beta: String,
    pub beta_f64: f64,
    /// `vol_G (1 - alpha) - (1 - beta)`; zero by construction, recomputed
    /// from the independently evaluated pieces.
    pub identity_residual: String,
    pub mc_estimate: Option<McEstimate>,
    pub mc_within_tolerance: Option<bool>,
    pub assumptions: Vec<String>,
}

/// Assemble the report; with `mc = Some((n, seed))` also run the `beta`
/// Monte Carlo (which must agree within [`MC_SIGMAS`] standard errors).
pub fn density_report(q: u64, mc: Option<(u64, u64)>) -> Result<DensityReport, AlgebraError> {
    let alpha = alpha_v(q)?;
    let vol = vol_g(q)?;
    let beta = beta_exact(q)?;
    let one = BigRational::one();
    let residual = &vol * (&one - &alpha) - (&one - &beta);
    let mc_estimate = match mc {
        Some((n, seed)) => Some(beta_monte_carlo(&field_of_order(q)?, n, seed)?),
        None => None,
    };
    let beta_f = ratio_f64(&beta);
    let mc_within_tolerance = mc_estimate.as_ref().map(|m| m.agrees(beta_f, MC_SIGMAS, 0.0));
    Ok(DensityReport {
        q_v: q,
        alpha: ratio_string(&alpha),
        alpha_f64: ratio_f64(&alpha),
        alpha_method: if q.pow(4) <= LIFT_GUARD { "lift" } else { "closed-form" }.into(),
        vol_g: ratio_string(&vol),
        vol_g_f64: ratio_f64(&vol),
        beta: ratio_string(&beta),
        beta_f64: beta_f,
        identity_residual: ratio_string(&residual),
        mc_estimate,
        mc_within_tolerance,
        assumptions: vec![
            "vol G(O_v) = #G(F_q) / q^dim G for the smooth model".into(),
            "#G(F_q) = #SO_4(F_q)^2 via the central isogeny SO_4 x SO_4 -> G".into(),
        ],
    })
}

/// One Euler factor group of the truncated product.
#[derive(Clone, Debug, Serialize)]
pub struct EulerFactor {
    pub degree: u32,
    /// Number of places of this degree (including infinity in degree 1).
    pub places: u128,
    pub alpha: String,
    pub alpha_f64: f64,
}

/// `prod_{deg v <= T} (1 - alpha(q^deg v))` over the places of `P^1`.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedProduct {
    pub q: u64,
    pub truncation: u32,
    pub factors: Vec<EulerFactor>,
    /// The product, evaluated in floating point from the exact factors.
    pub value: f64,
    /// Upper bound for `sum_{deg v > T} alpha_v`, which bounds the relative
    /// gap to the full product: uses `alpha(Q) < 5/Q^2` and at most
    /// `q^n / n` places of degree `n`.
    pub tail_bound: f64,
}

impl TruncatedProduct {
    /// The exact product as a rational (feasible for small truncations).
    pub fn exact(&self) -> Result<BigRational, AlgebraError> {
        let mut out = BigRational::one();
        for f in &self.factors {
            let a = alpha_v(self.q.pow(f.degree))?;
            let n = usize::try_from(f.places).map_err(|_| AlgebraError::FieldTooLarge(self.q))?;
            out *= num_traits::pow(BigRational::one() - a, n);
        }
        Ok(out)
    }
}

/// Truncated Euler product for `delta_B` with exact place counts.
pub fn delta_b_truncated(q: u64, truncation: u32) -> Result<TruncatedProduct, AlgebraError> {
    check_char(q)?;
    let mut factors = Vec::new();
    let mut log_value = 0.0;
    for n in 1..=truncation {
        let places = count_monic_irreducible(q, n) + u128::from(n == 1);
        let qn = q.checked_pow(n).ok_or(AlgebraError::FieldTooLarge(q))?;
        let a = alpha_v(qn)?;
        let af = ratio_f64(&a);
        log_value += places as f64 * (-af).ln_1p();
        factors.push(EulerFactor {
            degree: n,
            places,
            alpha: ratio_string(&a),
            alpha_f64: af,
        });
    }
    let qf = q as f64;
    let t = truncation as f64;
    let tail_bound = 5.0 / ((t + 1.0) * qf.powf(t) * (qf - 1.0));
    Ok(TruncatedProduct {
        q,
        truncation,
        factors,
        value: log_value.exp(),
        tail_bound,
    })
}

/// Empirical fraction of uniform sections of `B_D` (`D = d * infinity`)
/// lying in `X_D`; sample `i` uses the stream `(seed, DENSITY_DELTA, i)`.
pub fn delta_b_monte_carlo(k: &Gf, d: usize, n: u64, seed: u64) -> Result<McEstimate, AlgebraError> {
    check_char(k.order())?;
    let hits = (0..n)
        .into_par_iter()
        .filter(|&i| {
            let mut r = rng::stream(seed, job::DENSITY_DELTA, i);
            in_xd(k, &random_section(k, d, &mut r), d)
        })
        .count() as u64;
    Ok(McEstimate::from_hits(hits, n, seed))
}

/// Exact rational helper: `a/b`.
pub fn rational(a: i64, b: i64) -> BigRational {
    ratio(a, b)
}

/// Whether a rational is zero.
pub fn is_zero(r: &BigRational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::poly;
    use crate::curves_arithmetic::{local_model_at_infinity, ResidueField};
    use crate::invariants_sections::raw_invariants;

    #[test]
    fn alpha_lift_equals_exhaustive_at_5() {
        let k = Gf::prime(5).unwrap();
        let lift = alpha_lift(&k).unwrap();
        let brute = alpha_exhaustive(&k).unwrap();
        assert_eq!(lift, brute);
        assert_eq!(lift.alpha(), ratio(437, 3125));
        assert_eq!((lift.singular, lift.critical), (129, 77));
    }

    #[test]
    fn alpha_lift_equals_exhaustive_at_7() {
        let k = Gf::prime(7).unwrap();
        assert_eq!(alpha_lift(&k).unwrap(), alpha_exhaustive(&k).unwrap());
    }

    #[test]
    fn alpha_lift_matches_closed_form() {
        for q in [5u64, 7, 11, 13, 23, 25, 29, 31] {
            let c = alpha_lift(&field_of_order(q).unwrap()).unwrap();
            assert_eq!(c.singular, q.pow(3) + q - 1, "q = {q}");
            assert_eq!(c.critical, 4 * q * q - 5 * q + 2, "q = {q}");
            assert_eq!(c.alpha(), alpha_closed_form(q), "q = {q}");
        }
    }

    #[test]
    fn unit_discriminant_has_no_bad_lift() {
        let k = Gf::prime(5).unwrap();
        let dual = DualRing::new(k.clone());
        for i in (0..625).step_by(7) {
            let b = tuple_at(&k, i);
            if quartic_disc(&k, &b) != 0 {
                for j in (0..625).step_by(11) {
                    assert_ne!(dual_disc(&dual, &b, &tuple_at(&k, j)), (0, 0));
                }
            }
        }
    }

    #[test]
    fn alpha_at_a_degree_two_place() {
        // O/pi^2 = F_5[t]/(pi^2) for pi = t^2 + 2 (irreducible over F_5):
        // every residue mod pi is visited, lifts are sampled.
        let k = Gf::prime(5).unwrap();
        let pi = vec![2u32, 0, 1];
        assert!(poly::is_irreducible(&k, &pi));
        let r1 = ResidueField::new(&k, &pi);
        let r2 = ResidueField::new(&k, &poly::mul(&k, &pi, &pi));
        let residues: Vec<Vec<u32>> = (0..25u32).map(|i| poly::trim(&k, vec![i % 5, i / 5])).collect();
        let lifts_per_point = 12u64;
        let mut est = 0.0;
        let mut var = 0.0;
        let mut r = rng::stream(1, job::LIFT_ORACLE, 0);
        use rand::Rng as _;
        for idx in 0..25u64.pow(4) {
            let b: Vec<Vec<u32>> = (0..4)
                .map(|i| residues[(idx / 25u64.pow(i) % 25) as usize].clone())
                .collect();
            let bt = InvTuple::from_array([b[0].clone(), b[1].clone(), b[2].clone(), b[3].clone()]);
            if !r1.is_zero(&quartic_disc(&r1, &bt)) {
                continue;
            }
            let mut hits = 0;
            for _ in 0..lifts_per_point {
                let lifted: Vec<Vec<u32>> = b
                    .iter()
                    .map(|c| {
                        let e = &residues[r.gen_range(0..25)];
                        poly::add(&k, c, &poly::mul(&k, &pi, e))
                    })
                    .collect();
                let lift = InvTuple::from_array([
                    lifted[0].clone(),
                    lifted[1].clone(),
                    lifted[2].clone(),
                    lifted[3].clone(),
                ]);
                hits += u64::from(r2.is_zero(&r2.reduce(&quartic_disc(&r2, &lift))));
            }
            let f = hits as f64 / lifts_per_point as f64;
            est += f;
            // Per-point success probability is 1/25 or 1.
            let p = if hits == lifts_per_point { 1.0 } else { 1.0 / 25.0 };
            var += p * (1.0 - p) / lifts_per_point as f64;
        }
        let q4 = 25f64.powi(4);
        let (est, sd) = (est / q4, var.sqrt() / q4);
        let exact = ratio_f64(&alpha_v(25).unwrap());
        assert!((est - exact).abs() < 4.0 * sd, "{est} vs {exact} (sd {sd})");
    }

    #[test]
    fn so4_counts() {
        let k5 = Gf::prime(5).unwrap();
        assert_eq!(so4_order_enumerated(&k5), 14400);
        assert_eq!(so4_order_exhaustive(&k5), 14400);
        let k7 = Gf::prime(7).unwrap();
        assert_eq!(so4_order_enumerated(&k7), so4_order_formula(7));
        assert_eq!(so4_order_exhaustive(&k7), so4_order_formula(7));
        for q in [11u64, 13, 23, 25] {
            assert_eq!(so4_order_enumerated(&field_of_order(q).unwrap()), so4_order_formula(q));
        }
    }

    #[test]
    fn volume_is_below_one_and_tends_to_one() {
        let mut prev = 0.0;
        for q in [5u64, 7, 11, 23, 101, 10007] {
            let v = ratio_f64(&vol_g(q).unwrap());
            assert!(v < 1.0 && v > prev);
            prev = v;
        }
        assert!(prev > 0.9999);
    }

    #[test]
    fn identity_residual_vanishes() {
        for q in [5u64, 7, 23] {
            let rep = density_report(q, None).unwrap();
            assert_eq!(rep.identity_residual, "0/1");
            assert!(rep.alpha_f64 > 0.0 && rep.alpha_f64 < 1.0);
            assert!(rep.beta_f64 > 0.0 && rep.beta_f64 < 1.0);
        }
    }

    #[test]
    fn dual_invariants_match_the_field_invariants_at_5() {
        // At p = 5 the invariants are (c2, c4, Pf, c6); check G-invariance
        // and proportionality (ratio 1) to the Lie discriminant there.
        let k = Gf::prime(5).unwrap();
        let lie = LieD4::new(k.clone());
        let mut r = rng::stream(2, job::DENSITY_BETA, u64::MAX);
        let pi = |v: &VElem| {
            let raw = raw_invariants(&lie, &lie.to_matrix(v));
            InvTuple::new(raw.c2, raw.c4, raw.pf, raw.c6)
        };
        for _ in 0..200 {
            let v = lie.random_v(&mut r);
            let word = lie.random_word(&mut r, 4);
            let gv = lie.act_word(&word, &v).unwrap();
            assert_eq!(pi(&gv), pi(&v));
            let disc = quartic_disc(&k, &pi(&v));
            assert_eq!(disc, lie.lie_discriminant(&lie.to_matrix(&v)));
            assert_eq!(dual_invariant_disc(&lie, &v, &VElem::zero()), (disc, 0));
        }
    }

    #[test]
    fn beta_monte_carlo_small_run_agrees() {
        let k = Gf::prime(5).unwrap();
        let mc = beta_monte_carlo(&k, 20_000, 3).unwrap();
        let exact = ratio_f64(&beta_exact(5).unwrap());
        assert!(mc.agrees(exact, MC_SIGMAS, 0.0), "{} vs {exact}", mc.mean);
        let again = beta_monte_carlo(&k, 20_000, 3).unwrap();
        assert_eq!(again.hits, mc.hits);
    }

    #[test]
    fn truncated_products() {
        let t1 = delta_b_truncated(5, 1).unwrap();
        let a = alpha_v(5).unwrap();
        assert_eq!(t1.exact().unwrap(), num_traits::pow(BigRational::one() - a, 6));
        let mut prev = 1.0;
        for t in 1..=6 {
            let p = delta_b_truncated(5, t).unwrap();
            assert!(p.value > 0.0 && p.value < prev);
            prev = p.value;
        }
        let t6 = delta_b_truncated(5, 6).unwrap();
        let places: Vec<u128> = t6.factors.iter().map(|f| f.places).collect();
        assert_eq!(places, vec![6, 10, 40, 150, 624, 2580]);
    }

    #[test]
    fn infinity_has_the_same_local_behaviour() {
        // Swapping t and 1/t maps B_D to itself and preserves membership.
        let k = Gf::prime(5).unwrap();
        for i in 0..300 {
            let mut r = rng::stream(9, job::DENSITY_DELTA, i);
            let b = random_section(&k, 1, &mut r);
            let swapped = local_model_at_infinity(&b, 1);
            assert_eq!(in_xd(&k, &b, 1), in_xd(&k, &swapped, 1));
        }
    }

    #[test]
    fn delta_monte_carlo_small_run_agrees() {
        let k = Gf::prime(5).unwrap();
        let p = delta_b_truncated(5, 6).unwrap();
        let mc = delta_b_monte_carlo(&k, 1, 4000, 1).unwrap();
        assert!(
            mc.agrees(p.value, MC_SIGMAS, p.tail_bound),
            "{} vs {}",
            mc.mean,
            p.value
        );
    }

    #[test]
    fn delta_monte_carlo_stabilizes_in_d() {
        let k = Gf::prime(5).unwrap();
        let runs: Vec<McEstimate> = (1..=3).map(|d| delta_b_monte_carlo(&k, d, 3000, 5).unwrap()).collect();
        for w in runs.windows(2) {
            let sd = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
            assert!((w[0].mean - w[1].mean).abs() < MC_SIGMAS * sd);
        }
    }
}
