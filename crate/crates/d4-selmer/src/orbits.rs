//! Vanishing patterns of elements of `V`, the constructive reduction of
//! trivial elements to `w . kappa_b`, and 2-divisibility of point differences
//! on the curve side.

use serde::Serialize;

use crate::core_algebra::disc::{quartic_disc, InvTuple};
use crate::core_algebra::field::{Field, Gf, Ring};
use crate::core_algebra::linalg::{self, Mat};
use crate::core_algebra::poly;
use crate::curves_arithmetic::{Point, PointedCurve, WeierstrassTransform};
use crate::hn_weights::{lambda_max, parabolic_sets, weierstrass_sets, WeightSet, NUM_WEIGHTS};
use crate::invariants_sections::InvariantTheory;
use crate::lie_d4::{GRoot, GroupGen, TorusElem, VElem, W0};
use crate::AlgebraError;

/// The Weierstrass pattern met by the Kostant section: `alpha_0` and the
/// three weights with one negative coordinate in positions 2, 3, 4.
pub fn kostant_pattern() -> WeightSet {
    WeightSet::from_labels(&[1, 3, 4, 5])
}

/// Outcome of [`pattern_classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PatternClass {
    /// The zero set contains this parabolic set, forcing `Delta = 0`.
    Parabolic(WeightSet),
    /// The zero set contains this Weierstrass set `S` and `v` does not vanish
    /// on `lambda(S)`; if `Delta != 0` then `v` is trivial.
    Weierstrass(WeightSet),
    None,
}

impl PatternClass {
    /// Image under `w in W_0`.
    pub fn apply(&self, w: W0) -> PatternClass {
        match self {
            PatternClass::Parabolic(s) => PatternClass::Parabolic(s.apply(w)),
            PatternClass::Weierstrass(s) => PatternClass::Weierstrass(s.apply(w)),
            PatternClass::None => PatternClass::None,
        }
    }
}

/// The labels at which `v` vanishes.
pub fn zero_set(v: &VElem) -> WeightSet {
    WeightSet::from_labels(&v.zero_set())
}

/// Classify the vanishing pattern of `v`. Parabolic sets take precedence;
/// the first matching set in sorted order is reported.
pub fn pattern_classify(v: &VElem) -> PatternClass {
    let z = zero_set(v);
    if let Some(s) = parabolic_sets().into_iter().find(|s| s.is_subset(&z)) {
        return PatternClass::Parabolic(s);
    }
    let nonzero = z.complement();
    if let Some(s) = weierstrass_sets()
        .into_iter()
        .find(|s| s.is_subset(&z) && lambda_max(*s).is_subset(&nonzero))
    {
        return PatternClass::Weierstrass(s);
    }
    PatternClass::None
}

/// The element of `W_0` carrying a Weierstrass set onto the Kostant pattern.
pub fn weyl_to_kostant(s: WeightSet) -> Option<W0> {
    W0::ALL.into_iter().find(|&w| s.apply(w) == kostant_pattern())
}

/// A certified reduction `g . v = w . kappa_{pi(v)}`.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionResult {
    pub w: W0,
    /// The word `g`, applied right to left.
    pub g: Vec<GroupGen>,
    /// The torus element `t` with `v = w t u kappa_b`.
    pub torus: TorusElem,
    /// Coefficients `c_j` of `u^{-1} = prod_j exp(c_j X_{-a_j})`.
    pub unipotent: [u32; 4],
    pub certified: bool,
}

/// Coordinates of `v` at the given labels.
fn coords_at(v: &VElem, labels: &[usize]) -> Vec<u32> {
    labels.iter().map(|&l| v.at(l)).collect()
}

/// Labels of the `V` weights of a given `rho_check` height.
fn labels_of_height(th: &InvariantTheory, h: i32) -> Vec<usize> {
    th.lie
        .weights
        .iter()
        .filter(|w| w.rho_pairing() == h)
        .map(|w| w.label)
        .collect()
}

fn negative_unipotents(c: &[u32; 4]) -> Vec<GroupGen> {
    (0..4)
        .map(|index| GroupGen::Unipotent {
            root: GRoot { index, positive: false },
            c: c[index],
        })
        .collect()
}

/// Solve the affine system `f(c) = sum_j z_j basis_j` on the given labels,
/// where `f` is affine in the unknowns `c` (evaluated at `0` and the unit
/// vectors). Returns the `c` part of the unique solution.
fn solve_affine_in_span<Fk: Field<Elem = u32>>(
    k: &Fk,
    f: impl Fn(&[u32]) -> Result<Vec<u32>, AlgebraError>,
    unknowns: usize,
    span: &[Vec<u32>],
) -> Result<Vec<u32>, AlgebraError> {
    let zero = vec![0u32; unknowns];
    let f0 = f(&zero)?;
    let rows = f0.len();
    let mut cols: Vec<Vec<u32>> = Vec::new();
    for j in 0..unknowns {
        let mut e = zero.clone();
        e[j] = 1;
        let fj = f(&e)?;
        cols.push(fj.iter().zip(&f0).map(|(a, b)| k.sub(a, b)).collect());
    }
    for s in span {
        cols.push(s.iter().map(|x| k.neg(x)).collect());
    }
    let a = Mat::from_fn(rows, cols.len(), |r, c| cols[c][r]);
    if linalg::rank(k, &a) != cols.len() {
        return Err(AlgebraError::Consistency(
            "unipotent step is not uniquely solvable".into(),
        ));
    }
    let rhs: Vec<u32> = f0.iter().map(|x| k.neg(x)).collect();
    let sol =
        linalg::solve(k, &a, &rhs).ok_or_else(|| AlgebraError::Consistency("unipotent step has no solution".into()))?;
    Ok(sol[..unknowns].to_vec())
}

/// Reduce a trivial element to `w . kappa_{pi(v)}`: move its Weierstrass
/// pattern onto the Kostant pattern with `W_0`, normalize the coordinates on
/// the simple roots of `H` with the torus, then remove the `Lie U^-` part by
/// the negative root groups of `G`, one `rho_check`-height at a time.
pub fn reduce_trivial(th: &InvariantTheory, v: &VElem) -> Result<ReductionResult, AlgebraError> {
    let lie = &th.lie;
    let k = th.field();
    let s = match pattern_classify(v) {
        PatternClass::Weierstrass(s) => s,
        other => {
            return Err(AlgebraError::Precondition(format!(
                "element does not have a Weierstrass pattern ({other:?})"
            )))
        }
    };
    let b = th.pi(v);
    if quartic_disc(k, &b) == 0 {
        return Err(AlgebraError::Precondition("discriminant vanishes".into()));
    }
    let w = weyl_to_kostant(s).ok_or_else(|| AlgebraError::Consistency("W0 is not transitive".into()))?;
    let v1 = lie.act(&GroupGen::Weyl(w), v)?;

    // Torus step: alpha_i(t^{-1}) = E_{alpha_i} / v1_{alpha_i}.
    let e = lie.from_matrix(&th.kostant.e)?;
    let mut inv_values = [0u32; 4];
    for wt in &lie.weights {
        let c = wt.alpha_coords;
        if c.iter().filter(|&&x| x == 1).count() == 1 && c.iter().all(|&x| x == 0 || x == 1) {
            let i = c.iter().position(|&x| x == 1).expect("unit vector");
            inv_values[i] = k
                .div(&e.at(wt.label), &v1.at(wt.label))
                .ok_or_else(|| AlgebraError::Consistency("simple root coordinate vanishes".into()))?;
        }
    }
    let t_inv = TorusElem {
        alpha_values: inv_values,
    };
    let torus = TorusElem {
        alpha_values: inv_values.map(|x| k.inv(&x).expect("unit")),
    };
    let v2 = lie.act(&GroupGen::Torus(t_inv.clone()), &v1)?;

    // Unipotent step, height -1: unknowns c_2, c_3, c_4 (roots of height 2).
    let zf: Vec<VElem> = th
        .kostant
        .zf
        .iter()
        .map(|m| lie.from_matrix(m))
        .collect::<Result<_, _>>()?;
    let span_of = |height: i64, labels: &[usize]| -> Vec<Vec<u32>> {
        zf.iter()
            .zip(&th.kostant.zf_weights)
            .filter(|(_, &wt)| wt == height)
            .map(|(z, _)| coords_at(z, labels))
            .collect()
    };
    let h1 = labels_of_height(th, -1);
    let step1 = solve_affine_in_span(
        k,
        |c| {
            let img = lie.act_word(&negative_unipotents(&[0, c[0], c[1], c[2]]), &v2)?;
            Ok(coords_at(&img, &h1))
        },
        3,
        &span_of(-1, &h1),
    )?;
    // Height -3: unknown c_1 (the root of height 4).
    let h3 = labels_of_height(th, -3);
    let step2 = solve_affine_in_span(
        k,
        |c| {
            let img = lie.act_word(&negative_unipotents(&[c[0], step1[0], step1[1], step1[2]]), &v2)?;
            Ok(coords_at(&img, &h3))
        },
        1,
        &span_of(-3, &h3),
    )?;
    let unipotent = [step2[0], step1[0], step1[1], step1[2]];

    let mut g = vec![GroupGen::Weyl(w)];
    g.extend(negative_unipotents(&unipotent));
    g.push(GroupGen::Torus(t_inv));
    g.push(GroupGen::Weyl(w));
    let lhs = lie.act_word(&g, v)?;
    let kappa = th.kostant_section(&b)?;
    let rhs = lie.act(&GroupGen::Weyl(w), &kappa)?;
    let certified = lhs == rhs;
    if !certified {
        return Err(AlgebraError::Consistency("reduction failed certification".into()));
    }
    Ok(ReductionResult {
        w,
        g,
        torus,
        unipotent,
        certified,
    })
}

/// A planted trivial element `w0 . u . t . kappa_b` with `u` in the product
/// of the negative root groups of `G` (coefficients `c`).
pub fn plant_trivial(
    th: &InvariantTheory,
    b: &crate::core_algebra::disc::InvTuple<u32>,
    w0: W0,
    t: &TorusElem,
    c: &[u32; 4],
) -> Result<VElem, AlgebraError> {
    let kappa = th.kostant_section(b)?;
    let mut word = vec![GroupGen::Weyl(w0)];
    word.extend(negative_unipotents(c));
    word.push(GroupGen::Torus(t.clone()));
    th.lie.act_word(&word, &kappa)
}

/// A random element of `V` vanishing on `s`.
pub fn random_with_zeros<R: rand::Rng + ?Sized>(th: &InvariantTheory, rng: &mut R, s: WeightSet) -> VElem {
    let k = th.field();
    VElem {
        coords: (1..=NUM_WEIGHTS)
            .map(|l| if s.contains(l) { 0 } else { k.random(rng) })
            .collect(),
    }
}

/// Whether `[R - R']` lies in `2 E(F_q)`, decided by the 2-descent map on
/// the short Weierstrass model `Y^2 = c(X)`: for each irreducible factor
/// `g` of the 2-division cubic `c`, the class of `g(x(D))` in
/// `F_q^x / F_q^x2` (the norm of `x(D) - theta` from `F_q[theta]/g`),
/// with `g(x(D))` replaced by `(c/g)(x(D))` when it vanishes. The map is
/// injective on `E(F_q)/2E(F_q)`, so `D` is divisible by 2 iff every
/// component is a square.
pub fn class_two_divisible(
    k: &Gf,
    b: &InvTuple<u32>,
    r: &Point,
    r_prime: &Point,
    max_q: u64,
) -> Result<bool, AlgebraError> {
    if k.order() > max_q {
        return Err(AlgebraError::Precondition(format!(
            "q = {} exceeds the enumeration bound {max_q}",
            k.order()
        )));
    }
    let e = PointedCurve::new(k, b)?;
    if !e.contains(r) || !e.contains(r_prime) {
        return Err(AlgebraError::Precondition("point not on the curve".into()));
    }
    let tr = WeierstrassTransform::new(&e);
    let Some((x, _)) = tr.map_point(&e.add(r, &e.neg(r_prime))) else {
        return Ok(true);
    };
    let cubic = vec![tr.short.b, tr.short.a, 0, 1];
    for (g, _) in poly::factor(k, &cubic) {
        let mut val = poly::eval(k, &g, &x);
        if k.is_zero(&val) {
            let (cofactor, _) = poly::divrem(k, &cubic, &g);
            val = poly::eval(k, &cofactor, &x);
        }
        if k.sqrt(&val).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::field::Gf;
    use crate::lie_d4::LieD4;
    use crate::rng;
    use std::sync::OnceLock;

    fn th() -> &'static InvariantTheory {
        static TH: OnceLock<InvariantTheory> = OnceLock::new();
        TH.get_or_init(|| InvariantTheory::new(LieD4::new(Gf::prime(23).unwrap())).unwrap())
    }

    #[test]
    fn full_top_vanishing_is_parabolic_and_singular() {
        let th = th();
        let s = WeightSet::from_labels(&[1, 2, 3, 4, 5]);
        for i in 0..20 {
            let v = random_with_zeros(th, &mut rng::stream(1, rng::job::ORBITS, i), s);
            assert_eq!(pattern_classify(&v), PatternClass::Parabolic(s));
            assert_eq!(th.disc(&v), 0);
        }
    }

    #[test]
    fn parabolic_patterns_force_singularity() {
        let th = th();
        for (n, s) in parabolic_sets().into_iter().enumerate() {
            for i in 0..30 {
                let v = random_with_zeros(th, &mut rng::stream(2, rng::job::ORBITS, (n * 100 + i) as u64), s);
                assert_eq!(th.disc(&v), 0, "{s}");
            }
        }
    }

    #[test]
    fn kostant_section_has_the_kostant_pattern() {
        let th = th();
        for i in 0..20 {
            let b = th.random_rs_b(&mut rng::stream(3, rng::job::ORBITS, i));
            let kappa = th.kostant_section(&b).unwrap();
            assert_eq!(pattern_classify(&kappa), PatternClass::Weierstrass(kostant_pattern()));
        }
    }

    #[test]
    fn generic_element_has_no_pattern() {
        let v = VElem { coords: vec![1; 16] };
        assert_eq!(pattern_classify(&v), PatternClass::None);
    }

    #[test]
    fn classification_is_w0_equivariant() {
        let th = th();
        let sets: Vec<WeightSet> = parabolic_sets().into_iter().chain(weierstrass_sets()).collect();
        for (n, s) in sets.iter().enumerate() {
            for i in 0..5 {
                let v = random_with_zeros(th, &mut rng::stream(4, rng::job::ORBITS, (n * 10 + i) as u64), *s);
                let c = pattern_classify(&v);
                for w in W0::ALL {
                    let wv = th.lie.act(&GroupGen::Weyl(w), &v).unwrap();
                    assert_eq!(pattern_classify(&wv), c.apply(w));
                }
            }
        }
    }

    #[test]
    fn kostant_point_reduces_trivially() {
        let th = th();
        let b = th.random_rs_b(&mut rng::stream(5, rng::job::ORBITS, 0));
        let kappa = th.kostant_section(&b).unwrap();
        let r = reduce_trivial(th, &kappa).unwrap();
        assert_eq!(r.w, W0::Identity);
        assert_eq!(r.unipotent, [0, 0, 0, 0]);
        assert_eq!(r.torus.alpha_values, [1, 1, 1, 1]);
        assert!(r.certified);
    }

    #[test]
    fn torus_round_trip() {
        let th = th();
        for i in 0..10 {
            let mut g = rng::stream(6, rng::job::ORBITS, i);
            let b = th.random_rs_b(&mut g);
            let t = th.lie.random_torus(&mut g);
            let v = plant_trivial(th, &b, W0::Identity, &t, &[0; 4]).unwrap();
            let r = reduce_trivial(th, &v).unwrap();
            assert_eq!(r.w, W0::Identity);
            assert_eq!(r.torus, t);
        }
    }

    #[test]
    fn planted_round_trips_recover_w() {
        let th = th();
        let k = th.field();
        for i in 0..40 {
            let mut g = rng::stream(7, rng::job::ORBITS, i);
            let b = th.random_rs_b(&mut g);
            let t = th.lie.random_torus(&mut g);
            let c = [k.random(&mut g), k.random(&mut g), k.random(&mut g), k.random(&mut g)];
            let w0 = W0::ALL[(i % 4) as usize];
            let v = plant_trivial(th, &b, w0, &t, &c).unwrap();
            let r = reduce_trivial(th, &v).unwrap();
            assert_eq!(r.w, w0);
            assert!(r.certified);
            assert_eq!(th.pi(&v), b);
        }
    }

    #[test]
    fn rejects_non_trivial_patterns() {
        let th = th();
        let v = VElem { coords: vec![1; 16] };
        assert!(matches!(reduce_trivial(th, &v), Err(AlgebraError::Precondition(_))));
    }

    #[test]
    fn weyl_to_kostant_is_unique() {
        for s in weierstrass_sets() {
            let ws: Vec<W0> = W0::ALL
                .into_iter()
                .filter(|&w| s.apply(w) == kostant_pattern())
                .collect();
            assert_eq!(ws.len(), 1);
            assert_eq!(weyl_to_kostant(s), Some(ws[0]));
        }
    }
    /// Brute-force halving: is there `P` with `2P = R - R'`?
    fn halvable(e: &PointedCurve, r: &Point, r_prime: &Point) -> bool {
        let d = e.add(r, &e.neg(r_prime));
        e.points().iter().any(|p| e.add(p, p) == d)
    }

    #[test]
    fn two_divisibility_matches_halving_search() {
        use crate::curves_arithmetic::{curve_group, DEFAULT_MAX_Q};
        for p in [23u64, 29] {
            let k = Gf::prime(p).unwrap();
            let mut full = 0;
            for seed in 0..40u64 {
                let mut rr = rng::stream(seed, rng::job::ORBITS, 1000);
                let b = InvTuple::new(
                    k.random(&mut rr),
                    k.random(&mut rr),
                    k.random(&mut rr),
                    k.random(&mut rr),
                );
                let Ok(e) = PointedCurve::new(&k, &b) else { continue };
                let g = curve_group(&k, &b, DEFAULT_MAX_Q).unwrap();
                full += usize::from(g.two_torsion == 4);
                let pts = e.points();
                for r in &pts {
                    assert!(class_two_divisible(&k, &b, r, r, DEFAULT_MAX_Q).unwrap());
                    if e.order(r) % 2 == 1 {
                        assert!(class_two_divisible(&k, &b, r, &e.origin(), DEFAULT_MAX_Q).unwrap());
                    }
                    for r2 in pts.iter().step_by(3) {
                        assert_eq!(
                            class_two_divisible(&k, &b, r, r2, DEFAULT_MAX_Q).unwrap(),
                            halvable(&e, r, r2),
                            "b = {b:?}"
                        );
                    }
                }
            }
            assert!(full > 0, "no curve with full rational 2-torsion sampled");
        }
        let k = Gf::prime(103).unwrap();
        let b = InvTuple::new(0, 0, 1, 1);
        assert!(class_two_divisible(&k, &b, &[0, 1, 0], &[0, 1, 0], 101).is_err());
    }
}
