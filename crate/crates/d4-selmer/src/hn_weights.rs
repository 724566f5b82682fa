//! Slope combinatorics for the weights of `T` on `V`: the poset `Phi_V`, the
//! map `lambda`, the classes `C` and `C_0` of upward-closed weight sets, the
//! cusp-cutting table, slopes of torus-induced torsors attached to trivial
//! classes, and section counts of split bundles on `P^1`.
//!
//! Weights are identified by their labels `1..=16`; label `l` has
//! coordinates `n_i = LABEL_SIGNS[l - 1][i] / 2` in the basis `a_1..a_4` of
//! simple roots of `G`. A slope vector `sigma` is recorded by its pairings
//! `<sigma, a_i>` with the simple roots, so that
//! `<sigma, a> = sum_i n_i(a) <sigma, a_i>`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::lie_d4::{pairing_with_diag, LABEL_SIGNS, RHO_CHECK, ROOTS_G, W0};

/// Number of weights of `T` on `V`.
pub const NUM_WEIGHTS: usize = 16;

/// Label of the highest weight `alpha_0`.
pub const TOP: usize = 1;

/// Default truncation of the lattice sums in [`boundary_tail_bound`].
pub const DEFAULT_TRUNCATION: u32 = 40;

/// `<rho_check, a_i>` for the simple roots `a_1..a_4` of `G`.
pub fn rho_heights() -> [i64; 4] {
    ROOTS_G.map(|r| pairing_with_diag(&RHO_CHECK, &r) as i64)
}

/// `2 n_i(a)` for the weight with label `label`.
pub fn doubled_coords(label: usize) -> [i64; 4] {
    LABEL_SIGNS[label - 1].map(|s| s as i64)
}

/// `n_i(a)` as exact rationals.
pub fn coords(label: usize) -> [Rational64; 4] {
    doubled_coords(label).map(|s| Rational64::new(s, 2))
}

/// The label carrying the given doubled coordinates.
pub fn label_of(doubled: [i64; 4]) -> Option<usize> {
    (1..=NUM_WEIGHTS).find(|&l| doubled_coords(l) == doubled)
}

/// `a >= b` iff `n_i(a) >= n_i(b)` for every `i`.
pub fn geq(a: usize, b: usize) -> bool {
    let (x, y) = (doubled_coords(a), doubled_coords(b));
    (0..4).all(|i| x[i] >= y[i])
}

/// The cover relation `(upper, lower)` of the poset.
pub fn covers() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..=NUM_WEIGHTS {
        for b in 1..=NUM_WEIGHTS {
            if a == b || !geq(a, b) {
                continue;
            }
            let between = (1..=NUM_WEIGHTS).any(|c| c != a && c != b && geq(a, c) && geq(c, b));
            if !between {
                out.push((a, b));
            }
        }
    }
    out
}

/// A set of weights, stored as a bitmask (bit `l - 1` for label `l`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeightSet(u16);

impl WeightSet {
    pub const EMPTY: WeightSet = WeightSet(0);
    pub const ALL: WeightSet = WeightSet(u16::MAX);

    pub fn from_labels(labels: &[usize]) -> Self {
        let mut s = WeightSet::EMPTY;
        for &l in labels {
            s.insert(l);
        }
        s
    }

    pub fn from_bits(bits: u16) -> Self {
        WeightSet(bits)
    }

    pub fn bits(&self) -> u16 {
        self.0
    }

    pub fn insert(&mut self, label: usize) {
        assert!((1..=NUM_WEIGHTS).contains(&label), "label out of range: {label}");
        self.0 |= 1 << (label - 1);
    }

    pub fn contains(&self, label: usize) -> bool {
        (1..=NUM_WEIGHTS).contains(&label) && self.0 & (1 << (label - 1)) != 0
    }

    /// Labels in increasing order.
    pub fn labels(&self) -> Vec<usize> {
        (1..=NUM_WEIGHTS).filter(|&l| self.contains(l)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &WeightSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(&self, other: &WeightSet) -> WeightSet {
        WeightSet(self.0 | other.0)
    }

    pub fn complement(&self) -> WeightSet {
        WeightSet(!self.0)
    }

    /// Closed under `>=`: `b in M` and `a >= b` imply `a in M`.
    pub fn is_upward_closed(&self) -> bool {
        self.labels()
            .iter()
            .all(|&b| (1..=NUM_WEIGHTS).all(|a| !geq(a, b) || self.contains(a)))
    }

    /// `sum_{a in M} a` in `n_i` coordinates.
    pub fn weight_sum(&self) -> [Rational64; 4] {
        let mut out = [Rational64::zero(); 4];
        for l in self.labels() {
            let c = coords(l);
            for i in 0..4 {
                out[i] += c[i];
            }
        }
        out
    }

    /// Image under `w in W_0`, acting on labels through its permutation of
    /// the simple roots `a_1..a_4`.
    pub fn apply(&self, w: W0) -> WeightSet {
        WeightSet::from_labels(&self.labels().iter().map(|&l| w0_on_label(w, l)).collect::<Vec<_>>())
    }
}

impl fmt::Display for WeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for WeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for WeightSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.labels())
    }
}

/// Permutation of `a_1..a_4` (0-based images) induced by `w`.
pub fn w0_on_roots(w: W0) -> [usize; 4] {
    match w {
        W0::Identity => [0, 1, 2, 3],
        W0::Sigma => [1, 0, 3, 2],
        W0::Tau => [2, 3, 0, 1],
        W0::SigmaTau => [3, 2, 1, 0],
    }
}

/// Image of a weight label under `w`.
pub fn w0_on_label(w: W0, label: usize) -> usize {
    let perm = w0_on_roots(w);
    let src = doubled_coords(label);
    let mut img = [0i64; 4];
    for i in 0..4 {
        img[perm[i]] = src[i];
    }
    label_of(img).expect("W0 permutes the weights")
}

/// `lambda(M)`: the maximal elements of `Phi_V - M`.
pub fn lambda_max(m: WeightSet) -> WeightSet {
    let rest = m.complement();
    let maximal: Vec<usize> = rest
        .labels()
        .into_iter()
        .filter(|&a| rest.labels().iter().all(|&b| b == a || !geq(b, a)))
        .collect();
    WeightSet::from_labels(&maximal)
}

/// Every non-empty upward-closed subset of `Phi_V`, in increasing bit order.
pub fn enumerate_c() -> Vec<WeightSet> {
    (1..=u16::MAX).map(WeightSet).filter(|s| s.is_upward_closed()).collect()
}

/// The vanishing sets forcing `Delta = 0` through a `theta`-stable parabolic:
/// for each pair `{i, j}`, the weights with `n_i, n_j > 0`, and the weights
/// with at most one negative coordinate.
pub fn parabolic_sets() -> Vec<WeightSet> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let labels: Vec<usize> = (1..=NUM_WEIGHTS)
                .filter(|&l| {
                    let c = doubled_coords(l);
                    c[i] > 0 && c[j] > 0
                })
                .collect();
            out.push(WeightSet::from_labels(&labels));
        }
    }
    let near_top: Vec<usize> = (1..=NUM_WEIGHTS)
        .filter(|&l| doubled_coords(l).iter().filter(|&&c| c < 0).count() <= 1)
        .collect();
    out.push(WeightSet::from_labels(&near_top));
    out.sort();
    out
}

/// The vanishing sets whose generic members are trivial (Weierstrass) orbits:
/// the `W_0`-orbit of `alpha_0` together with the three weights having a
/// single negative coordinate in positions 2, 3, 4. Its `lambda` consists of
/// the simple roots of `H`.
pub fn weierstrass_sets() -> Vec<WeightSet> {
    let base = WeightSet::from_labels(&[1, 3, 4, 5]);
    let mut out: Vec<WeightSet> = W0::ALL.iter().map(|&w| base.apply(w)).collect();
    out.sort();
    out.dedup();
    out
}

/// All vanishing sets after which a member is singular or trivial.
pub fn reducibility_sets() -> Vec<WeightSet> {
    let mut out = parabolic_sets();
    out.extend(weierstrass_sets());
    out.sort();
    out.dedup();
    out
}

/// `C_0`: members of `C` containing none of the [`reducibility_sets`], sorted
/// by size and then lexicographically by labels.
pub fn enumerate_c0() -> Vec<WeightSet> {
    let forbidden = reducibility_sets();
    let mut out: Vec<WeightSet> = enumerate_c()
        .into_iter()
        .filter(|m| forbidden.iter().all(|s| !s.is_subset(m)))
        .collect();
    out.sort_by_key(|m| (m.len(), m.labels()));
    out
}

/// The involution of `Phi_V` flipping the sign of `n_1`.
pub fn a1_flip(label: usize) -> usize {
    let mut c = doubled_coords(label);
    c[0] = -c[0];
    label_of(c).expect("the flip permutes the weights")
}

/// Members of `C_0` stable under [`a1_flip`]: the only sets that can occur
/// for the parabolic generated by `B` and the root group of `a_1`.
pub fn parabolic_a1_stable_c0() -> Vec<WeightSet> {
    enumerate_c0()
        .into_iter()
        .filter(|m| m.labels().iter().all(|&a| m.contains(a1_flip(a))))
        .collect()
}

/// `delta_B` in `n_i` coordinates: the sum of the roots in the unipotent
/// radical of `B`, i.e. of the negative roots `-a_1, ..., -a_4`.
pub fn delta_b() -> [Rational64; 4] {
    [Rational64::from_integer(-1); 4]
}

fn ser_ratio<S: Serializer>(x: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_ratios<S: Serializer>(x: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|r| r.to_string()))
}

/// The exponents `p(a)` of a cusp-table row, keyed by the labels of
/// `lambda(M)` in increasing order.
pub type PMap = BTreeMap<usize, Rational64>;

/// One row of the cusp-cutting table.
#[derive(Clone, Debug, Serialize)]
pub struct CuspRow {
    pub m: WeightSet,
    pub lambda_m: WeightSet,
    pub size: usize,
    /// `2 w(M)` with `w(M) = -sum_{a in M} a - delta_B`.
    #[serde(serialize_with = "ser_ratios")]
    pub w2: [Rational64; 4],
    #[serde(serialize_with = "ser_p")]
    pub p: PMap,
    /// `2 w(M, p)` with `w(M, p) = sum_{a in lambda(M)} p(a) a + w(M)`.
    #[serde(serialize_with = "ser_ratios")]
    pub wp2: [Rational64; 4],
    #[serde(serialize_with = "ser_ratio")]
    pub p_total: Rational64,
    /// `|M| > sum p(a)`.
    pub size_condition: bool,
    /// All coordinates of `w(M, p)` strictly positive.
    pub positivity_condition: bool,
}

fn ser_p<S: Serializer>(p: &PMap, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(p.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

impl CuspRow {
    pub fn passes(&self) -> bool {
        self.size_condition && self.positivity_condition
    }

    /// `n_i(w(M, p))`.
    pub fn wp(&self) -> [Rational64; 4] {
        self.wp2.map(|x| x / 2)
    }

    /// CSV header matching [`CuspRow::csv_record`].
    pub fn csv_header() -> Vec<&'static str> {
        vec![
            "M",
            "lambda_M",
            "size",
            "2w(M)",
            "p",
            "2w(M,p)",
            "size_ok",
            "positivity_ok",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        let join = |xs: &[Rational64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let p: Vec<Rational64> = self.p.values().copied().collect();
        vec![
            self.m
                .labels()
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            self.lambda_m
                .labels()
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            self.size.to_string(),
            join(&self.w2),
            join(&p),
            join(&self.wp2),
            self.size_condition.to_string(),
            self.positivity_condition.to_string(),
        ]
    }
}

/// Evaluate the two conditions for `(M, p)`; `p` must be supported on
/// `lambda(M)`.
pub fn cusp_row(m: WeightSet, p: &PMap) -> CuspRow {
    let lambda_m = lambda_max(m);
    assert!(
        p.keys().all(|&a| lambda_m.contains(a)),
        "p must be supported on lambda(M)"
    );
    let sum_m = m.weight_sum();
    let delta = delta_b();
    let mut w = [Rational64::zero(); 4];
    for i in 0..4 {
        w[i] = -sum_m[i] - delta[i];
    }
    let mut wp = w;
    for (&a, &pa) in p {
        let c = coords(a);
        for i in 0..4 {
            wp[i] += pa * c[i];
        }
    }
    let p_total: Rational64 = p.values().copied().sum();
    CuspRow {
        m,
        lambda_m,
        size: m.len(),
        w2: w.map(|x| x * 2),
        p: p.clone(),
        wp2: wp.map(|x| x * 2),
        p_total,
        size_condition: Rational64::from_integer(m.len() as i64) > p_total,
        positivity_condition: wp.iter().all(|x| x.is_positive()),
    }
}

/// The exponent functions used for the eleven members of `C_0`, as
/// `(M, [(a, 2 p(a))])`.
const TABLE_P: [(&[usize], &[(usize, i64)]); 11] = [
    (&[1], &[(2, 0), (3, 0), (4, 0), (5, 0)]),
    (&[1, 2], &[(3, 1), (4, 1), (5, 1)]),
    (&[1, 3], &[(2, 1), (4, 1), (5, 1)]),
    (&[1, 4], &[(2, 1), (3, 1), (5, 1)]),
    (&[1, 5], &[(2, 1), (3, 1), (4, 1)]),
    (&[1, 2, 3], &[(4, 1), (5, 1), (6, 3)]),
    (&[1, 2, 4], &[(3, 1), (5, 1), (7, 3)]),
    (&[1, 2, 5], &[(3, 1), (4, 1), (8, 3)]),
    (&[1, 3, 4], &[(2, 1), (5, 1), (9, 3)]),
    (&[1, 3, 5], &[(2, 1), (4, 1), (10, 3)]),
    (&[1, 4, 5], &[(2, 1), (3, 1), (11, 3)]),
];

/// The exponent function assigned to `M`, if `M` is one of the table rows.
pub fn table_p(m: WeightSet) -> Option<PMap> {
    TABLE_P
        .iter()
        .find(|(labels, _)| WeightSet::from_labels(labels) == m)
        .map(|(_, p)| p.iter().map(|&(a, v)| (a, Rational64::new(v, 2))).collect())
}

/// Recompute the cusp table over `C_0`. Returns an error naming the first
/// member of `C_0` for which no exponent function is tabulated.
pub fn verify_cusp_table() -> Result<Vec<CuspRow>, String> {
    enumerate_c0()
        .into_iter()
        .map(|m| {
            table_p(m)
                .map(|p| cusp_row(m, &p))
                .ok_or_else(|| format!("no exponent function for M = {m}"))
        })
        .collect()
}

/// Truncated lattice bound for one cusp row at twist `d`.
#[derive(Clone, Debug, Serialize)]
pub struct TailBound {
    pub m: WeightSet,
    pub q: u64,
    pub d: i64,
    pub truncation: u32,
    /// `q^{d (sum p - |M|)}`.
    pub leading_factor: f64,
    /// `sum_{sigma} q^{<sigma, w(M, p)>}` over the truncated half-integer
    /// cone `Lambda_B^pos`.
    pub lattice_sum: f64,
    /// The same sum over the whole cone (closed form).
    pub lattice_sum_limit: f64,
    /// `leading_factor * lattice_sum`.
    pub bound: f64,
}

/// `sum_{k=1}^{2T} x^k` and `x / (1 - x)` for `x = q^{-n/2}`.
fn geometric_factor(q: f64, n: f64, truncation: u32) -> (f64, f64) {
    let x = q.powf(-n / 2.0);
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..(2 * truncation) {
        term *= x;
        sum += term;
    }
    (sum, x / (1.0 - x))
}

/// The boundary bound `q^{d(sum p - |M|)} sum_{sigma in Lambda_B^pos}
/// q^{<sigma, w(M, p)>}`, with `sigma` ranging over half-integral slope
/// vectors with `0 < <sigma, -a_i> <= truncation`.
///
/// The lattice sum factors over the four coordinates into truncated
/// geometric series.
pub fn boundary_tail_bound(row: &CuspRow, q: u64, d: i64, truncation: u32) -> Result<TailBound, String> {
    if !row.passes() {
        return Err(format!("row M = {} fails the table conditions", row.m));
    }
    if truncation == 0 {
        return Err("truncation must be positive".into());
    }
    let qf = q as f64;
    let wp = row.wp();
    let (mut sum, mut limit) = (1.0, 1.0);
    for n in wp {
        let (s, l) = geometric_factor(qf, *n.numer() as f64 / *n.denom() as f64, truncation);
        sum *= s;
        limit *= l;
    }
    let excess = row.p_total - Rational64::from_integer(row.size as i64);
    let leading = qf.powf(d as f64 * (*excess.numer() as f64 / *excess.denom() as f64));
    Ok(TailBound {
        m: row.m,
        q,
        d,
        truncation,
        leading_factor: leading,
        lattice_sum: sum,
        lattice_sum_limit: limit,
        bound: leading * sum,
    })
}

/// Pairings `<sigma, a_i>` with the simple roots of `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeVector(#[serde(serialize_with = "ser_ratios")] pub [Rational64; 4]);

impl SlopeVector {
    /// `<sigma, a>` for the weight with label `label`.
    pub fn pair_weight(&self, label: usize) -> Rational64 {
        let c = coords(label);
        (0..4).map(|i| self.0[i] * c[i]).sum()
    }

    /// `<sigma, a>` for `a` given in `n_i` coordinates.
    pub fn pair(&self, n: &[Rational64; 4]) -> Rational64 {
        (0..4).map(|i| self.0[i] * n[i]).sum()
    }

    /// Membership in `Lambda_B^pos`: `<sigma, a> > 0` for every `a` in
    /// `R^- = {-a_1, ..., -a_4}`.
    pub fn in_lambda_b_pos(&self) -> bool {
        self.0.iter().all(|x| x.is_negative())
    }
}

/// Slope data of the torsor `inv(w kappa_b)` for `D` of degree `d`.
#[derive(Clone, Debug, Serialize)]
pub struct TrivialSlopes {
    pub w: &'static str,
    pub d: i64,
    pub sigma: SlopeVector,
    /// Harder–Narasimhan slopes of `V_g(D)` with multiplicities, decreasing.
    #[serde(serialize_with = "ser_hn")]
    pub hn: Vec<(Rational64, usize)>,
    pub positivity: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub lowest: Rational64,
    /// Labels attaining the lowest slope.
    pub lowest_weights: WeightSet,
    /// `lowest / d`; the corresponding claim elsewhere is `-2`.
    #[serde(serialize_with = "ser_ratio")]
    pub lowest_constant: Rational64,
    /// `max_a 2 |<w rho_check w^-1, a>|`: the characteristic must exceed this
    /// for the weight filtration to be the Harder–Narasimhan filtration.
    pub char_bound: i64,
}

fn ser_hn<S: Serializer>(hn: &[(Rational64, usize)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(hn.iter().map(|(sl, m)| (sl.to_string(), *m)))
}

/// Slopes for the trivial class `w kappa_b`: `sigma = -d w rho_check w^-1`,
/// and the line `V_a` of `V_g(D)` has degree `<sigma, a> + d`.
pub fn trivial_inv_slopes(w: W0, d: i64) -> Result<TrivialSlopes, String> {
    if d <= 0 {
        return Err(format!("deg D must be positive, got {d}"));
    }
    let h = rho_heights();
    let perm = w0_on_roots(w);
    // <w rho w^-1, a_i> = <rho, w^-1 a_i>, and w is an involution.
    let sigma = SlopeVector(std::array::from_fn(|i| Rational64::from_integer(-d * h[perm[i]])));
    let dr = Rational64::from_integer(d);
    let slopes: Vec<(usize, Rational64)> = (1..=NUM_WEIGHTS).map(|l| (l, sigma.pair_weight(l) + dr)).collect();
    let mut hn: BTreeMap<Rational64, usize> = BTreeMap::new();
    for &(_, s) in &slopes {
        *hn.entry(s).or_default() += 1;
    }
    let hn: Vec<(Rational64, usize)> = hn.into_iter().rev().collect();
    let lowest = hn.last().expect("V is non-zero").0;
    let lowest_weights = WeightSet::from_labels(
        &slopes
            .iter()
            .filter(|(_, s)| *s == lowest)
            .map(|(l, _)| *l)
            .collect::<Vec<_>>(),
    );
    let char_bound = (1..=NUM_WEIGHTS)
        .map(|l| (sigma.pair_weight(l) / dr * 2).abs().to_integer())
        .max()
        .unwrap_or(0);
    Ok(TrivialSlopes {
        w: w.name(),
        d,
        sigma,
        hn,
        positivity: sigma.in_lambda_b_pos(),
        lowest,
        lowest_weights,
        lowest_constant: lowest / dr,
        char_bound,
    })
}

/// One semistable piece `O(e)^n` of a split bundle, with its check against
/// the Clifford-type bounds for semistable bundles on `P^1`.
#[derive(Clone, Debug, Serialize)]
pub struct PieceCheck {
    pub slope: i64,
    pub rank: usize,
    pub h0: i64,
    /// 1: `mu < 0`; 2: `0 <= mu <= 2g - 2` (empty on `P^1`); 3: `mu > 2g - 2`.
    pub cases: Vec<u8>,
    pub ok: bool,
}

/// Check of the lowest-slope vanishing statement for a degree-0 bundle.
#[derive(Clone, Debug, Serialize)]
pub struct LowestSlopeCheck {
    pub d: i64,
    pub q0: i64,
    /// 1: `d + q0 < 0`; 2: `d + q0 > 2g - 2`; 3: in between (empty on `P^1`).
    pub cases: Vec<u8>,
    /// `h0` of the twisted pieces of negative twisted slope.
    pub h0_negative_part: i64,
    /// `n(1 + d) - rank(M)(1 + mu(M) + d)` where `M` collects the pieces with
    /// `e_i + d < 0`; present in case 1.
    pub case1_bound: Option<i64>,
    /// The same bound with `M` the pieces of negative untwisted slope.
    pub case1_bound_negative_slope: Option<i64>,
    /// `n(1 + d)`; present in case 2.
    pub case2_value: Option<i64>,
    pub ok: bool,
    /// Whether every bound holds with equality.
    pub equality: bool,
}

/// Result of [`clifford_h0`].
#[derive(Clone, Debug, Serialize)]
pub struct CliffordReport {
    pub degrees: Vec<i64>,
    pub twist: i64,
    pub h0: i64,
    pub pieces: Vec<PieceCheck>,
    pub lowest_slope: Option<LowestSlopeCheck>,
    pub bounds_ok: bool,
}

/// `h^0(P^1, O(e))`.
fn h0_line(e: i64) -> i64 {
    (e + 1).max(0)
}

/// Exact `h^0` of `(+)_i O(e_i + twist)` on `P^1`, with the Clifford-type
/// bounds checked on each Harder–Narasimhan piece and, when the bundle has
/// degree 0 and the twist is positive, the lowest-slope vanishing bounds.
pub fn clifford_h0(degrees: &[i64], twist: i64) -> CliffordReport {
    let genus = 0i64;
    let n = degrees.len() as i64;
    let h0: i64 = degrees.iter().map(|&e| h0_line(e + twist)).sum();

    let mut groups: BTreeMap<i64, usize> = BTreeMap::new();
    for &e in degrees {
        *groups.entry(e + twist).or_default() += 1;
    }
    let pieces: Vec<PieceCheck> = groups
        .iter()
        .rev()
        .map(|(&mu, &rank)| {
            let r = rank as i64;
            let piece_h0 = r * h0_line(mu);
            let mut cases = Vec::new();
            let mut ok = true;
            if mu < 0 {
                cases.push(1);
                ok &= piece_h0 == 0;
            }
            if 0 <= mu && mu <= 2 * genus - 2 {
                cases.push(2);
                // h0 <= n (1 + mu / 2), compared after doubling.
                ok &= 2 * piece_h0 <= r * (2 + mu);
            }
            if mu > 2 * genus - 2 {
                cases.push(3);
                ok &= piece_h0 == r * (1 - genus + mu);
            }
            PieceCheck {
                slope: mu,
                rank,
                h0: piece_h0,
                cases,
                ok,
            }
        })
        .collect();

    let lowest_slope = (n > 0 && degrees.iter().sum::<i64>() == 0 && twist > 0).then(|| {
        let d = twist;
        let q0 = *degrees.iter().min().expect("non-empty");
        let negative: Vec<i64> = degrees.iter().copied().filter(|&e| e + d < 0).collect();
        let h0_negative_part = negative.iter().map(|&e| h0_line(e + d)).sum();
        let mut cases = Vec::new();
        let (mut ok, mut equality) = (true, true);
        let (mut case1_bound, mut case1_bound_negative_slope, mut case2_value) = (None, None, None);
        let bound_for = |part: &[i64]| n * (1 + d) - part.iter().map(|&e| 1 + e + d).sum::<i64>();
        if d + q0 < 0 {
            cases.push(1);
            let b = bound_for(&negative);
            ok &= h0_negative_part == 0 && h0 <= b;
            equality &= h0 == b;
            case1_bound = Some(b);
            let neg_slope: Vec<i64> = degrees.iter().copied().filter(|&e| e < 0).collect();
            case1_bound_negative_slope = Some(bound_for(&neg_slope));
        }
        if d + q0 > 2 * genus - 2 {
            cases.push(2);
            let v = n * (1 - genus + d);
            ok &= h0 == v;
            case2_value = Some(v);
        }
        if 0 <= d + q0 && d + q0 <= 2 * genus - 2 {
            cases.push(3);
            ok &= h0 <= n * (1 + d);
            equality &= h0 == n * (1 + d);
        }
        LowestSlopeCheck {
            d,
            q0,
            cases,
            h0_negative_part,
            case1_bound,
            case1_bound_negative_slope,
            case2_value,
            ok,
            equality,
        }
    });

    let bounds_ok = pieces.iter().all(|p| p.ok) && lowest_slope.as_ref().map_or(true, |c| c.ok && c.equality);
    CliffordReport {
        degrees: degrees.to_vec(),
        twist,
        h0,
        pieces,
        lowest_slope,
        bounds_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_algebra::field::{Gf, Ring};
    use crate::lie_d4::{GroupGen, LieD4, VElem};
    use proptest::prelude::*;

    fn set(labels: &[usize]) -> WeightSet {
        WeightSet::from_labels(labels)
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn ints(xs: [i64; 4]) -> [Rational64; 4] {
        xs.map(Rational64::from_integer)
    }

    #[test]
    fn covers_are_single_downward_sign_flips() {
        let cov = covers();
        // The Boolean 4-cube has 4 * 2^3 edges.
        assert_eq!(cov.len(), 32);
        for &(a, b) in &cov {
            let (x, y) = (doubled_coords(a), doubled_coords(b));
            let diff: Vec<usize> = (0..4).filter(|&i| x[i] != y[i]).collect();
            assert_eq!(diff.len(), 1);
            assert!(x[diff[0]] > y[diff[0]]);
        }
        let below_top: Vec<usize> = cov.iter().filter(|c| c.0 == TOP).map(|c| c.1).collect();
        assert_eq!(below_top, vec![2, 3, 4, 5]);
    }

    #[test]
    fn top_is_the_unique_maximum() {
        for l in 1..=NUM_WEIGHTS {
            assert!(geq(TOP, l));
        }
    }

    #[test]
    fn coordinates_sum_to_zero_over_the_cube() {
        for i in 0..4 {
            let s: i64 = (1..=NUM_WEIGHTS).map(|l| doubled_coords(l)[i]).sum();
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn labels_agree_with_the_matrix_model() {
        let lie = LieD4::new(Gf::prime(23).unwrap());
        for l in 1..=NUM_WEIGHTS {
            let c = doubled_coords(l);
            let wt = lie.weight(l);
            // exponents = (1/2) sum_i 2 n_i a_i
            for t in 0..4 {
                let e: i64 = (0..4).map(|i| c[i] * ROOTS_G[i][t] as i64).sum();
                assert_eq!(e, 2 * wt.exponents[t] as i64);
            }
        }
        for w in W0::ALL {
            assert_eq!(lie.weyl_on_roots(w), w0_on_roots(w));
            for (src, dst, _) in lie.weyl_on_weights(w) {
                assert_eq!(w0_on_label(w, src), dst);
            }
        }
    }

    #[test]
    fn rho_heights_of_simple_roots() {
        assert_eq!(rho_heights(), [4, 2, 2, 2]);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_max(WeightSet::EMPTY), set(&[1]));
        assert_eq!(lambda_max(set(&[1])), set(&[2, 3, 4, 5]));
        assert_eq!(lambda_max(set(&[1, 2])), set(&[3, 4, 5]));
        assert_eq!(lambda_max(set(&[1, 4, 5])), set(&[2, 3, 11]));
        assert_eq!(lambda_max(WeightSet::ALL), WeightSet::EMPTY);
    }

    #[test]
    fn w0_acts_by_order_automorphisms_commuting_with_lambda() {
        for w in W0::ALL {
            for a in 1..=NUM_WEIGHTS {
                for b in 1..=NUM_WEIGHTS {
                    assert_eq!(geq(a, b), geq(w0_on_label(w, a), w0_on_label(w, b)));
                }
            }
            for m in enumerate_c() {
                assert_eq!(lambda_max(m.apply(w)), lambda_max(m).apply(w));
            }
        }
    }

    #[test]
    fn class_c_members_contain_the_top_weight() {
        let c = enumerate_c();
        assert!(c.iter().all(|m| m.contains(TOP)));
        // Upward-closed subsets of the Boolean 4-cube (including the empty
        // set) are counted by the Dedekind number M(4) = 168.
        assert_eq!(c.len() + 1, 168);
    }

    #[test]
    fn reducibility_sets_from_the_weight_table() {
        let par: Vec<WeightSet> = parabolic_sets();
        let expected_par = [
            set(&[1, 2, 3, 4, 5]),
            set(&[1, 4, 5, 11]),
            set(&[1, 3, 5, 10]),
            set(&[1, 3, 4, 9]),
            set(&[1, 2, 5, 8]),
            set(&[1, 2, 4, 7]),
            set(&[1, 2, 3, 6]),
        ];
        assert_eq!(par.len(), 7);
        for s in expected_par {
            assert!(par.contains(&s), "{s}");
        }
        let wei = weierstrass_sets();
        assert_eq!(
            wei,
            vec![
                set(&[1, 2, 3, 4]),
                set(&[1, 2, 3, 5]),
                set(&[1, 2, 4, 5]),
                set(&[1, 3, 4, 5])
            ]
        );
        // lambda of the base Weierstrass set is the set of simple roots of H.
        assert_eq!(lambda_max(set(&[1, 3, 4, 5])), set(&[2, 9, 10, 11]));
        // Adding any weight of lambda(S) to a Weierstrass set S produces a
        // superset of a parabolic set.
        for s in &wei {
            for b in lambda_max(*s).labels() {
                let mut t = *s;
                t.insert(b);
                assert!(par.iter().any(|p| p.is_subset(&t)), "{s} + {b}");
            }
        }
    }

    #[test]
    fn reducibility_sets_as_one_list() {
        // The eleven sets as printed together, independent of how they are
        // split between the two families.
        let printed: Vec<WeightSet> = [
            &[1, 2, 3, 4, 5][..],
            &[1, 4, 5, 11],
            &[1, 3, 4, 9],
            &[1, 3, 5, 10],
            &[1, 3, 4, 5],
            &[1, 2, 3, 5],
            &[1, 2, 4, 5],
            &[1, 2, 3, 4],
            &[1, 2, 3, 6],
            &[1, 2, 4, 7],
            &[1, 2, 5, 8],
        ]
        .iter()
        .map(|l| set(l))
        .collect();
        let mut printed_sorted = printed.clone();
        printed_sorted.sort();
        assert_eq!(reducibility_sets(), printed_sorted);
        // The printed split puts {1,3,4,5}, {1,2,3,5}, {1,2,4,5} with the
        // parabolic family; the weight table puts them with the Weierstrass
        // family.
        let par = parabolic_sets();
        assert!(!par.contains(&set(&[1, 3, 4, 5])));
        assert!(par.contains(&set(&[1, 2, 3, 6])));
    }

    #[test]
    fn c0_is_the_eleven_table_rows() {
        let c0 = enumerate_c0();
        let expected: Vec<WeightSet> = TABLE_P.iter().map(|(m, _)| set(m)).collect();
        assert_eq!(c0, expected);
        assert!(c0.contains(&set(&[1])));
        assert!(!c0.contains(&set(&[1, 2, 3, 4])));
    }

    #[test]
    fn cusp_table_matches_the_printed_columns() {
        // (M, lambda(M), |M|, 2w(M), 2w(M,p) doubled once more to stay integral)
        let printed: [(&[usize], &[usize], usize, [i64; 4], [i64; 4]); 11] = [
            (&[1], &[2, 3, 4, 5], 1, [1, 1, 1, 1], [2, 2, 2, 2]),
            (&[1, 2], &[3, 4, 5], 2, [2, 0, 0, 0], [7, 1, 1, 1]),
            (&[1, 3], &[2, 4, 5], 2, [0, 2, 0, 0], [1, 7, 1, 1]),
            (&[1, 4], &[2, 3, 5], 2, [0, 0, 2, 0], [1, 1, 7, 1]),
            (&[1, 5], &[2, 3, 4], 2, [0, 0, 0, 2], [1, 1, 1, 7]),
            (&[1, 2, 3], &[4, 5, 6], 3, [1, 1, -1, -1], [1, 1, 1, 1]),
            (&[1, 2, 4], &[3, 5, 7], 3, [1, -1, 1, -1], [1, 1, 1, 1]),
            (&[1, 2, 5], &[3, 4, 8], 3, [1, -1, -1, 1], [1, 1, 1, 1]),
            (&[1, 3, 4], &[2, 5, 9], 3, [-1, 1, 1, -1], [1, 1, 1, 1]),
            (&[1, 3, 5], &[2, 4, 10], 3, [-1, 1, -1, 1], [1, 1, 1, 1]),
            (&[1, 4, 5], &[2, 3, 11], 3, [-1, -1, 1, 1], [1, 1, 1, 1]),
        ];
        let rows = verify_cusp_table().unwrap();
        assert_eq!(rows.len(), 11);
        for (row, (m, lm, size, w2, wp4)) in rows.iter().zip(printed) {
            assert_eq!(row.m, set(m));
            assert_eq!(row.lambda_m, set(lm));
            assert_eq!(row.size, size);
            assert_eq!(row.w2, ints(w2));
            assert_eq!(row.wp2, ints(wp4).map(|x| x / 2));
            assert!(row.passes(), "{}", row.m);
        }
    }

    #[test]
    fn delta_b_is_the_sum_of_negative_roots() {
        // Normalized by the first row: 2 w({1}) = (1, 1, 1, 1).
        let top = coords(TOP);
        let from_table: [Rational64; 4] = std::array::from_fn(|i| -top[i] - r(1, 2));
        assert_eq!(delta_b(), from_table);
        let mut neg_sum = [Rational64::zero(); 4];
        for i in 0..4 {
            neg_sum[i] -= Rational64::from_integer(1);
        }
        assert_eq!(delta_b(), neg_sum);
    }

    #[test]
    fn failing_row_is_detected() {
        let row = cusp_row(
            set(&[1, 2]),
            &[(3, r(1, 1)), (4, r(1, 1)), (5, r(1, 1))].into_iter().collect(),
        );
        assert!(!row.size_condition);
        assert!(boundary_tail_bound(&row, 23, 1, 10).is_err());
    }

    #[test]
    fn parabolic_case_isolates_one_two() {
        assert_eq!(parabolic_a1_stable_c0(), vec![set(&[1, 2])]);
    }

    #[test]
    fn tail_bounds_decrease_in_degree() {
        for row in verify_cusp_table().unwrap() {
            for q in [5u64, 23] {
                let mut prev = f64::INFINITY;
                for d in 1..6 {
                    let b = boundary_tail_bound(&row, q, d, DEFAULT_TRUNCATION).unwrap();
                    assert!(b.bound < prev, "{} q={q} d={d}", row.m);
                    prev = b.bound;
                }
            }
        }
    }

    #[test]
    fn leading_factor_of_row_one_two() {
        let row = cusp_row(set(&[1, 2]), &table_p(set(&[1, 2])).unwrap());
        let b = boundary_tail_bound(&row, 23, 3, 5).unwrap();
        assert!((b.leading_factor - 23f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn lattice_sum_matches_direct_enumeration() {
        // Oracle: enumerate every sigma with <sigma, a_i> in {-1/2, -1, ..., -T}.
        for row in verify_cusp_table().unwrap() {
            let t = 3u32;
            let q = 7.0f64;
            let wp = row.wp();
            let mut direct = 0.0;
            let ks: Vec<i64> = (1..=(2 * t as i64)).collect();
            for &k0 in &ks {
                for &k1 in &ks {
                    for &k2 in &ks {
                        for &k3 in &ks {
                            let sigma = SlopeVector([r(-k0, 2), r(-k1, 2), r(-k2, 2), r(-k3, 2)]);
                            assert!(sigma.in_lambda_b_pos());
                            let e = sigma.pair(&wp);
                            direct += q.powf(*e.numer() as f64 / *e.denom() as f64);
                        }
                    }
                }
            }
            let b = boundary_tail_bound(&row, 7, 1, t).unwrap();
            assert!((b.lattice_sum - direct).abs() <= 1e-12 * direct, "{}", row.m);
        }
    }

    #[test]
    fn truncation_forty_is_converged() {
        for row in verify_cusp_table().unwrap() {
            let b = boundary_tail_bound(&row, 23, 1, DEFAULT_TRUNCATION).unwrap();
            let rel = (b.lattice_sum_limit - b.lattice_sum) / b.lattice_sum_limit;
            assert!((0.0..1e-4).contains(&rel), "{} {rel}", row.m);
        }
    }

    #[test]
    fn identity_trivial_class_geography() {
        let s = trivial_inv_slopes(W0::Identity, 1).unwrap();
        assert!(s.positivity);
        assert_eq!(s.lowest_weights, set(&[TOP]));
        assert_eq!(s.lowest, Rational64::from_integer(-4));
        assert_eq!(s.lowest_constant, Rational64::from_integer(-4));
        assert_eq!(s.char_bound, 10);
        let total: usize = s.hn.iter().map(|x| x.1).sum();
        assert_eq!(total, 16);
        assert!(trivial_inv_slopes(W0::Identity, 0).is_err());
    }

    #[test]
    fn w0_conjugates_share_the_slope_multiset() {
        let base = trivial_inv_slopes(W0::Identity, 1).unwrap().hn;
        for w in W0::ALL {
            let s = trivial_inv_slopes(w, 1).unwrap();
            assert_eq!(s.hn, base);
            assert!(s.positivity);
            assert!(s.lowest.is_negative());
        }
    }

    #[test]
    fn slopes_scale_with_degree() {
        for w in W0::ALL {
            for d in 1..=3 {
                let s = trivial_inv_slopes(w, d).unwrap();
                let s1 = trivial_inv_slopes(w, 1).unwrap();
                for l in 1..=NUM_WEIGHTS {
                    let one = s1.sigma.pair_weight(l) + 1;
                    assert_eq!(s.sigma.pair_weight(l) + d, one * d);
                }
            }
        }
    }

    #[test]
    fn slopes_match_matrix_valuations() {
        // sigma = -d w rho w^-1; the weight of e_a under w rho(t) w^-1 is read
        // off by acting on the weight vector with t a generator of F_23^*.
        let k = Gf::prime(23).unwrap();
        let lie = LieD4::new(k.clone());
        let t = k.from_i64(5);
        let rho_t = lie.cochar_torus(&RHO_CHECK, &t);
        for w in W0::ALL {
            let s = trivial_inv_slopes(w, 1).unwrap();
            let word = [GroupGen::Weyl(w), GroupGen::Torus(rho_t.clone()), GroupGen::Weyl(w)];
            for l in 1..=NUM_WEIGHTS {
                let mut v = VElem::zero();
                v.coords[l - 1] = 1;
                let img = lie.act_word(&word, &v).unwrap();
                let c = img.at(l);
                assert!(img.coords.iter().enumerate().all(|(i, &x)| i == l - 1 || x == 0));
                // <sigma, a> = -<w rho w^-1, a>.
                let e = -s.sigma.pair_weight(l).to_integer();
                assert_eq!(c, k.pow(&t, e.rem_euclid(22) as u64), "w={} label={l}", w.name());
            }
        }
    }

    #[test]
    fn clifford_examples() {
        let a = clifford_h0(&[-1, -1], 0);
        assert_eq!(a.h0, 0);
        // On P^1 slope -1 lies in both the mu < 0 and the mu > -2 regimes.
        assert_eq!(a.pieces[0].cases, vec![1, 3]);
        assert!(a.bounds_ok);

        let b = clifford_h0(&[2, 2], 0);
        assert_eq!(b.h0, 6);
        assert_eq!(b.pieces[0].cases, vec![3]);
        assert!(b.bounds_ok);

        let c = clifford_h0(&[3, -2], 0);
        assert_eq!(c.h0, 4);
        assert!(c.bounds_ok);
        // As a degree-1 bundle it is not in the lowest-slope regime.
        assert!(c.lowest_slope.is_none());
    }

    #[test]
    fn lowest_slope_case_one() {
        // Degrees (3, 1, -4) twisted by 1: q0 = -4 so d + q0 = -3 < 0.
        let rep = clifford_h0(&[3, 1, -4], 1);
        let ls = rep.lowest_slope.as_ref().unwrap();
        assert_eq!(ls.cases, vec![1]);
        assert_eq!(ls.h0_negative_part, 0);
        assert_eq!(rep.h0, 5 + 3);
        assert_eq!(ls.case1_bound, Some(rep.h0));
        assert!(rep.bounds_ok);
    }

    #[test]
    fn negative_slope_quotient_bound_can_fail() {
        // Degrees (3, -1, -2), d = 1: the negative-slope quotient has slope
        // -3/2 and the bound it gives, 5, is below h0 = 6.
        let rep = clifford_h0(&[3, -1, -2], 1);
        let ls = rep.lowest_slope.as_ref().unwrap();
        assert_eq!(rep.h0, 6);
        assert_eq!(ls.case1_bound, Some(6));
        assert_eq!(ls.case1_bound_negative_slope, Some(5));
        assert!(rep.bounds_ok);
    }

    #[test]
    fn lowest_slope_case_two() {
        let rep = clifford_h0(&[2, 0, -2], 2);
        let ls = rep.lowest_slope.as_ref().unwrap();
        assert_eq!(ls.cases, vec![2]);
        assert_eq!(ls.case2_value, Some(9));
        assert_eq!(rep.h0, 9);
        assert!(rep.bounds_ok);
    }

    proptest! {
        #[test]
        fn clifford_bounds_hold(degrees in proptest::collection::vec(-6i64..7, 1..7), twist in -4i64..6) {
            let rep = clifford_h0(&degrees, twist);
            let direct: i64 = degrees.iter().map(|&e| (e + twist + 1).max(0)).sum();
            prop_assert_eq!(rep.h0, direct);
            prop_assert!(rep.bounds_ok);
        }

        #[test]
        fn degree_zero_bundles(mut degrees in proptest::collection::vec(-6i64..7, 1..7), twist in 1i64..6) {
            let s: i64 = degrees.iter().sum();
            degrees.push(-s);
            let rep = clifford_h0(&degrees, twist);
            prop_assert!(rep.lowest_slope.is_some());
            prop_assert!(rep.bounds_ok);
        }
    }
}
