//! Exact Fincke-Pohst enumeration of short lattice vectors.
//!
//! The enumerator works on the exact LDL^T data of a positive definite Gram
//! matrix. All interval tests in the search tree are carried out on scaled
//! integers: with `D_i` the leading principal minors, the completed-square
//! coefficients `lambda[i][j] = L[j][i] * D_{i+1}` are integers, and every
//! budget comparison multiplies through by `lcm_i(D_i * D_{i+1}) * P^2`
//! (with `P` clearing the denominators of the ellipsoid centre). No
//! floating point and no per-node gcd reductions.
//!
//! When every scaled constant fits in an `i128`, the tree search runs on
//! machine integers with checked arithmetic; any overflow aborts the fast
//! run and the search restarts on big integers, so results are exact
//! either way.
//!
//! Centres are supported so that the same tree search answers both
//! "all vectors of norm <= C" and "all lattice points on an affine
//! subspace with prescribed norm" (used by constrained enumeration).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::LinalgError;
use crate::exact_linalg::{
    integer_kernel, lll_reduce, rational_cholesky, solve_left_integer, IntegerMatrix,
};

/// A lattice element together with its exact norm `b(x, x)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ShortVector {
    pub coords: Vec<BigInt>,
    pub norm: BigInt,
}

/// `x * g * y^T` for coordinate rows `x`, `y`.
pub fn bilinear_value(g: &IntegerMatrix, x: &[BigInt], y: &[BigInt]) -> BigInt {
    assert_eq!(x.len(), g.rows());
    assert_eq!(y.len(), g.cols());
    let mut acc = BigInt::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let mut row = BigInt::zero();
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                row += g.at(i, j) * yj;
            }
        }
        acc += xi * row;
    }
    acc
}

/// `b(x, x)` for a coordinate row `x`.
pub fn gram_value(g: &IntegerMatrix, x: &[BigInt]) -> BigInt {
    bilinear_value(g, x, x)
}

trait EnumSink {
    /// One lattice point inside the ellipsoid, with the exact scaled value
    /// `Q(x + mu) * scale`.
    fn visit_big(&mut self, coords: &[BigInt], scaled_q: &BigInt);
    /// Fast-path variant.
    fn visit_small(&mut self, coords: &[i64], scaled_q: i128);
    /// Discards everything collected so far (used when a fast run aborts).
    fn reset(&mut self);
}

/// Exact data for enumerating `{ x in Z^n : Q(x + mu) <= bound }`.
struct Ellipsoid {
    n: usize,
    /// `D_{i+1} * P`, the scale of coordinate `x_i` inside `Y_i`.
    dp: Vec<BigInt>,
    /// `lam[i][j - i - 1] = L[j][i] * D_{i+1}` for `j > i`.
    lam: Vec<Vec<BigInt>>,
    /// `D_{i+1} * P * mu_i`.
    base: Vec<BigInt>,
    /// `F_i = Lambda / (D_i * D_{i+1})`.
    f: Vec<BigInt>,
    /// `P * mu_j`.
    pm: Vec<BigInt>,
    p: BigInt,
    /// `Lambda * P^2`; every reported `scaled_q` is `Q * scale`.
    scale: BigInt,
    /// `bound * scale`; negative means the ellipsoid is empty.
    start: BigInt,
}

struct Workspace {
    x: Vec<BigInt>,
    t: Vec<BigInt>,
    budget: Vec<BigInt>,
}

impl Ellipsoid {
    fn new(
        gram: &IntegerMatrix,
        center: Option<&[BigRational]>,
        bound: &BigRational,
    ) -> Result<Self, LinalgError> {
        let n = gram.rows();
        let chol = rational_cholesky(&gram.to_rational())?;

        // Leading principal minors D_0 = 1, ..., D_n = det.
        let mut minors: Vec<BigInt> = Vec::with_capacity(n + 1);
        minors.push(BigInt::one());
        let mut acc = BigRational::one();
        for d in &chol.diag {
            acc *= d;
            assert!(acc.is_integer(), "leading principal minor must be integral");
            minors.push(acc.to_integer());
        }

        let mut lambda = BigInt::one();
        for i in 0..n {
            lambda = lambda.lcm(&(&minors[i] * &minors[i + 1]));
        }
        let f: Vec<BigInt> = (0..n)
            .map(|i| &lambda / (&minors[i] * &minors[i + 1]))
            .collect();

        let mut p = bound.denom().clone();
        if let Some(mu) = center {
            for m in mu {
                p = p.lcm(m.denom());
            }
        }
        let pm: Vec<BigInt> = match center {
            Some(mu) => mu
                .iter()
                .map(|m| {
                    let v = m * BigRational::from_integer(p.clone());
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect(),
            None => vec![BigInt::zero(); n],
        };

        let dp: Vec<BigInt> = (0..n).map(|i| &minors[i + 1] * &p).collect();
        let base: Vec<BigInt> = (0..n).map(|i| &minors[i + 1] * &pm[i]).collect();
        let lam: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (i + 1..n)
                    .map(|j| {
                        let v = chol.unit_lower.at(j, i)
                            * BigRational::from_integer(minors[i + 1].clone());
                        assert!(v.is_integer(), "scaled GSO coefficient must be integral");
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();

        let scale = &lambda * &p * &p;
        let start_rat = bound * BigRational::from_integer(scale.clone());
        debug_assert!(start_rat.is_integer());
        Ok(Self {
            n,
            dp,
            lam,
            base,
            f,
            pm,
            p,
            scale,
            start: start_rat.to_integer(),
        })
    }

    /// Runs the search, preferring the machine-integer path.
    fn run(&self, sink: &mut dyn EnumSink) {
        if self.start.is_negative() {
            return;
        }
        if self.n == 0 {
            sink.visit_big(&[], &BigInt::zero());
            return;
        }
        if let Some(small) = SmallEllipsoid::try_from_big(self) {
            if small.run(sink).is_ok() {
                return;
            }
            sink.reset();
        }
        let mut ws = Workspace {
            x: vec![BigInt::zero(); self.n],
            t: vec![BigInt::zero(); self.n],
            budget: vec![BigInt::zero(); self.n + 1],
        };
        ws.budget[self.n] = self.start.clone();
        self.descend(self.n - 1, &mut ws, sink);
    }

    fn descend(&self, level: usize, ws: &mut Workspace, sink: &mut dyn EnumSink) {
        // Centre numerator of Y_level over denominator dp[level].
        let mut chat = self.base[level].clone();
        for (off, lam) in self.lam[level].iter().enumerate() {
            if !lam.is_zero() {
                chat += lam * &ws.t[level + 1 + off];
            }
        }
        let dpl = &self.dp[level];
        let entering = ws.budget[level + 1].clone();
        // |Y| is minimised over the integers at the rounded centre, so one
        // failed test per direction is an exact stopping rule.
        let x0 = round_div_nearest(&-&chat, dpl);

        let mut x = x0.clone();
        loop {
            let y = dpl * &x + &chat;
            let cost = &y * &y * &self.f[level];
            if cost > entering {
                break;
            }
            self.accept(level, x.clone(), cost, ws, sink);
            x += 1;
        }
        let mut x: BigInt = x0 - 1i32;
        loop {
            let y = dpl * &x + &chat;
            let cost = &y * &y * &self.f[level];
            if cost > entering {
                break;
            }
            self.accept(level, x.clone(), cost, ws, sink);
            x -= 1;
        }
    }

    fn accept(
        &self,
        level: usize,
        x: BigInt,
        cost: BigInt,
        ws: &mut Workspace,
        sink: &mut dyn EnumSink,
    ) {
        ws.t[level] = &self.p * &x + &self.pm[level];
        ws.x[level] = x;
        ws.budget[level] = &ws.budget[level + 1] - cost;
        if level == 0 {
            let scaled_q = &self.start - &ws.budget[0];
            sink.visit_big(&ws.x, &scaled_q);
        } else {
            self.descend(level - 1, ws, sink);
        }
    }
}

/// Machine-integer mirror of [`Ellipsoid`]; every operation is checked and
/// any overflow aborts the run.
struct SmallEllipsoid {
    n: usize,
    dp: Vec<i128>,
    lam: Vec<Vec<i128>>,
    base: Vec<i128>,
    f: Vec<i128>,
    pm: Vec<i128>,
    p: i128,
    start: i128,
}

struct Overflow;

struct SmallWorkspace {
    x: Vec<i64>,
    t: Vec<i128>,
    budget: Vec<i128>,
}

impl SmallEllipsoid {
    fn try_from_big(e: &Ellipsoid) -> Option<Self> {
        // Conservative gate; the checked arithmetic below is the real
        // guard.
        let lim = |b: &BigInt| -> Option<i128> {
            let v = b.to_i128()?;
            (v.unsigned_abs() <= 1u128 << 100).then_some(v)
        };
        let conv = |v: &[BigInt]| -> Option<Vec<i128>> { v.iter().map(lim).collect() };
        Some(Self {
            n: e.n,
            dp: conv(&e.dp)?,
            lam: e
                .lam
                .iter()
                .map(|row| conv(row))
                .collect::<Option<Vec<_>>>()?,
            base: conv(&e.base)?,
            f: conv(&e.f)?,
            pm: conv(&e.pm)?,
            p: lim(&e.p)?,
            start: lim(&e.start)?,
        })
    }

    fn run(&self, sink: &mut dyn EnumSink) -> Result<(), Overflow> {
        let mut ws = SmallWorkspace {
            x: vec![0; self.n],
            t: vec![0; self.n],
            budget: vec![0; self.n + 1],
        };
        ws.budget[self.n] = self.start;
        self.descend(self.n - 1, &mut ws, sink)
    }

    fn descend(
        &self,
        level: usize,
        ws: &mut SmallWorkspace,
        sink: &mut dyn EnumSink,
    ) -> Result<(), Overflow> {
        let mut chat = self.base[level];
        for (off, &lam) in self.lam[level].iter().enumerate() {
            if lam != 0 {
                chat = chat
                    .checked_add(lam.checked_mul(ws.t[level + 1 + off]).ok_or(Overflow)?)
                    .ok_or(Overflow)?;
            }
        }
        let dpl = self.dp[level];
        let entering = ws.budget[level + 1];
        let x0 = Integer::div_floor(
            &(-chat)
                .checked_mul(2)
                .and_then(|v| v.checked_add(dpl))
                .ok_or(Overflow)?,
            &dpl.checked_mul(2).ok_or(Overflow)?,
        );

        let mut x = x0;
        loop {
            let y = dpl
                .checked_mul(x)
                .and_then(|v| v.checked_add(chat))
                .ok_or(Overflow)?;
            let cost = y
                .checked_mul(y)
                .and_then(|v| v.checked_mul(self.f[level]))
                .ok_or(Overflow)?;
            if cost > entering {
                break;
            }
            self.accept(level, x, cost, ws, sink)?;
            x = x.checked_add(1).ok_or(Overflow)?;
        }
        let mut x = x0.checked_sub(1).ok_or(Overflow)?;
        loop {
            let y = dpl
                .checked_mul(x)
                .and_then(|v| v.checked_add(chat))
                .ok_or(Overflow)?;
            let cost = y
                .checked_mul(y)
                .and_then(|v| v.checked_mul(self.f[level]))
                .ok_or(Overflow)?;
            if cost > entering {
                break;
            }
            self.accept(level, x, cost, ws, sink)?;
            x = x.checked_sub(1).ok_or(Overflow)?;
        }
        Ok(())
    }

    #[inline]
    fn accept(
        &self,
        level: usize,
        x: i128,
        cost: i128,
        ws: &mut SmallWorkspace,
        sink: &mut dyn EnumSink,
    ) -> Result<(), Overflow> {
        ws.t[level] = self
            .p
            .checked_mul(x)
            .and_then(|v| v.checked_add(self.pm[level]))
            .ok_or(Overflow)?;
        ws.x[level] = i64::try_from(x).map_err(|_| Overflow)?;
        ws.budget[level] = ws.budget[level + 1].checked_sub(cost).ok_or(Overflow)?;
        if level == 0 {
            sink.visit_small(&ws.x, self.start - ws.budget[0]);
            Ok(())
        } else {
            self.descend(level - 1, ws, sink)
        }
    }
}

fn round_div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(b.is_positive());
    let num: BigInt = a * 2i32 + b;
    num.div_floor(&(b * 2i32))
}

struct Collect {
    /// Keep only points with this exact scaled value, when set.
    target_big: Option<BigInt>,
    target_small: Option<Option<i128>>,
    skip_zero: bool,
    out_big: Vec<(Vec<BigInt>, BigInt)>,
    out_small: Vec<(Vec<i64>, i128)>,
}

impl Collect {
    fn new(target: Option<BigInt>, skip_zero: bool) -> Self {
        let target_small = target.as_ref().map(|t| t.to_i128());
        Self {
            target_big: target,
            target_small,
            skip_zero,
            out_big: Vec::new(),
            out_small: Vec::new(),
        }
    }

    /// All collected points as `(coords, scaled_q)` big values.
    fn into_entries(self) -> Vec<(Vec<BigInt>, BigInt)> {
        let mut out = self.out_big;
        out.extend(self.out_small.into_iter().map(|(x, q)| {
            (
                x.into_iter().map(BigInt::from).collect(),
                BigInt::from(q),
            )
        }));
        out
    }
}

impl EnumSink for Collect {
    fn visit_big(&mut self, coords: &[BigInt], scaled_q: &BigInt) {
        if let Some(t) = &self.target_big {
            if scaled_q != t {
                return;
            }
        }
        if self.skip_zero && coords.iter().all(|c| c.is_zero()) {
            return;
        }
        self.out_big.push((coords.to_vec(), scaled_q.clone()));
    }

    fn visit_small(&mut self, coords: &[i64], scaled_q: i128) {
        if let Some(t) = &self.target_small {
            // A target too large for i128 can never match a small value.
            if *t != Some(scaled_q) {
                return;
            }
        }
        if self.skip_zero && coords.iter().all(|&c| c == 0) {
            return;
        }
        self.out_small.push((coords.to_vec(), scaled_q));
    }

    fn reset(&mut self) {
        self.out_big.clear();
        self.out_small.clear();
    }
}

struct CountByScaledNorm {
    big: BTreeMap<BigInt, BigUint>,
    small: BTreeMap<i128, u64>,
}

impl CountByScaledNorm {
    fn new() -> Self {
        Self {
            big: BTreeMap::new(),
            small: BTreeMap::new(),
        }
    }

    fn into_counts(self) -> BTreeMap<BigInt, BigUint> {
        let mut out = self.big;
        for (k, v) in self.small {
            *out.entry(BigInt::from(k)).or_insert_with(BigUint::zero) += v;
        }
        out
    }
}

impl EnumSink for CountByScaledNorm {
    fn visit_big(&mut self, coords: &[BigInt], scaled_q: &BigInt) {
        if scaled_q.is_zero() && coords.iter().all(|c| c.is_zero()) {
            return;
        }
        *self
            .big
            .entry(scaled_q.clone())
            .or_insert_with(BigUint::zero) += 1u32;
    }

    fn visit_small(&mut self, coords: &[i64], scaled_q: i128) {
        if scaled_q == 0 && coords.iter().all(|&c| c == 0) {
            return;
        }
        let c = self.small.entry(scaled_q).or_insert(0);
        *c = c.checked_add(1).expect("count fits u64");
    }

    fn reset(&mut self) {
        self.big.clear();
        self.small.clear();
    }
}

fn exact_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    debug_assert!(r.is_zero(), "division must be exact");
    q
}

/// All `x != 0` with `b(x, x) <= bound`, both signs listed, sorted
/// lexicographically by coordinates.
pub fn short_vectors(g: &IntegerMatrix, bound: &BigInt) -> Result<Vec<ShortVector>, LinalgError> {
    enumerate_impl(g, bound, None)
}

/// All `x` with `b(x, x) = t` exactly; same ordering as [`short_vectors`].
pub fn vectors_with_norm(g: &IntegerMatrix, t: &BigInt) -> Result<Vec<ShortVector>, LinalgError> {
    enumerate_impl(g, t, Some(t.clone()))
}

fn enumerate_impl(
    g: &IntegerMatrix,
    bound: &BigInt,
    exact_norm: Option<BigInt>,
) -> Result<Vec<ShortVector>, LinalgError> {
    if g.rows() == 0 {
        return Ok(Vec::new());
    }
    let (g2, u) = lll_reduce(g)?;
    let ell = Ellipsoid::new(&g2, None, &BigRational::from_integer(bound.clone()))?;
    let target = exact_norm.as_ref().map(|t| t * &ell.scale);
    let mut sink = Collect::new(target, true);
    ell.run(&mut sink);
    let scale = ell.scale.clone();
    let mut out: Vec<ShortVector> = sink
        .into_entries()
        .into_iter()
        .map(|(x, scaled)| ShortVector {
            coords: u.apply_row(&x),
            norm: exact_div(&scaled, &scale),
        })
        .collect();
    out.sort_unstable_by(|a, b| a.coords.cmp(&b.coords));
    Ok(out)
}

/// Counts of nonzero vectors by exact norm, for all norms `<= bound`.
pub fn norm_counts(
    g: &IntegerMatrix,
    bound: &BigInt,
) -> Result<BTreeMap<BigInt, BigUint>, LinalgError> {
    if g.rows() == 0 {
        return Ok(BTreeMap::new());
    }
    let (g2, _) = lll_reduce(g)?;
    let ell = Ellipsoid::new(&g2, None, &BigRational::from_integer(bound.clone()))?;
    let mut sink = CountByScaledNorm::new();
    ell.run(&mut sink);
    Ok(sink
        .into_counts()
        .into_iter()
        .filter(|(k, _)| !k.is_zero())
        .map(|(k, v)| (exact_div(&k, &ell.scale), v))
        .collect())
}

/// Minimal nonzero norm and the number of vectors attaining it (both signs
/// counted).
pub fn min_norm_and_kissing(g: &IntegerMatrix) -> Result<(BigInt, BigUint), LinalgError> {
    let (g2, _) = lll_reduce(g)?;
    // A basis vector of the reduced Gram realises its diagonal entry, so
    // the minimum is at most the smallest diagonal entry.
    let bound = (0..g2.rows())
        .map(|i| g2.at(i, i).clone())
        .min()
        .expect("rank must be positive");
    let counts = norm_counts(g, &bound)?;
    let (min, count) = counts
        .into_iter()
        .next()
        .expect("bound realised by a basis vector");
    Ok((min, count))
}

/// All `x` with `b(x, x) = t` and `b(x, v_j) = c_j` for every constraint
/// `(v_j, c_j)`. Infeasible constraints yield an empty list.
///
/// The affine solution set is reduced to a full-rank sublattice translate
/// and enumerated in that lower dimension.
pub fn constrained_vectors(
    g: &IntegerMatrix,
    t: &BigInt,
    constraints: &[(Vec<BigInt>, BigInt)],
) -> Result<Vec<ShortVector>, LinalgError> {
    if constraints.is_empty() {
        return vectors_with_norm(g, t);
    }
    let n = g.rows();
    // Column j of `a` is G * v_j^T, so x * a = (b(x, v_1), ..., b(x, v_k)).
    let k = constraints.len();
    let mut a = IntegerMatrix::zero(n, k);
    for (j, (v, _)) in constraints.iter().enumerate() {
        assert_eq!(v.len(), n, "constraint vector has wrong length");
        for i in 0..n {
            let mut acc = BigInt::zero();
            for (l, vl) in v.iter().enumerate() {
                if !vl.is_zero() {
                    acc += g.at(i, l) * vl;
                }
            }
            a.set(i, j, acc);
        }
    }
    let rhs: Vec<BigInt> = constraints.iter().map(|(_, c)| c.clone()).collect();
    let x0 = match solve_left_integer(&a, &rhs) {
        Some(x0) => x0,
        None => return Ok(Vec::new()),
    };
    let kernel = integer_kernel(&a);
    let m = kernel.rows();
    if m == 0 {
        let q = gram_value(g, &x0);
        return Ok(if &q == t {
            vec![ShortVector {
                coords: x0,
                norm: t.clone(),
            }]
        } else {
            Vec::new()
        });
    }

    // Q(x0 + z K) = (z + mu) G_K (z + mu)^T + Q(x0) - mu G_K mu^T
    // with G_K mu^T = K G x0^T.
    let g_k = kernel.mul(g).mul(&kernel.transpose());
    let w: Vec<BigInt> = (0..m)
        .map(|r| bilinear_value(g, kernel.row(r), &x0))
        .collect();
    let g_k_inv = g_k
        .to_rational()
        .inverse()
        .expect("kernel Gram is positive definite");
    let mu: Vec<BigRational> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| g_k_inv.at(i, j) * BigRational::from_integer(w[j].clone()))
                .sum()
        })
        .collect();
    let mu_dot_w: BigRational = mu
        .iter()
        .zip(&w)
        .map(|(mi, wi)| mi * BigRational::from_integer(wi.clone()))
        .sum();
    let q0 = gram_value(g, &x0);
    let radius = BigRational::from_integer(t - &q0) + &mu_dot_w;
    if radius < BigRational::zero() {
        return Ok(Vec::new());
    }

    let (gk2, uk) = lll_reduce(&g_k)?;
    let uk_inv = uk
        .to_rational()
        .inverse()
        .expect("unimodular")
        .to_integer();
    // z = z' * uk, so the centre in z'-coordinates is mu * uk^{-1}.
    let mu2: Vec<BigRational> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| BigRational::from_integer(uk_inv.at(j, i).clone()) * &mu[j])
                .sum()
        })
        .collect();
    let ell = Ellipsoid::new(&gk2, Some(&mu2), &radius)?;
    let mut sink = Collect::new(Some(ell.start.clone()), false);
    ell.run(&mut sink);

    let basis = uk.mul(&kernel);
    let mut out: Vec<ShortVector> = sink
        .into_entries()
        .into_iter()
        .map(|(zp, _)| {
            let mut coords = x0.clone();
            for (r, zr) in zp.iter().enumerate() {
                if !zr.is_zero() {
                    for j in 0..n {
                        coords[j] += zr * basis.at(r, j);
                    }
                }
            }
            debug_assert_eq!(gram_value(g, &coords), *t);
            ShortVector {
                coords,
                norm: t.clone(),
            }
        })
        .collect();
    out.sort_unstable_by(|a, b| a.coords.cmp(&b.coords));
    Ok(out)
}
