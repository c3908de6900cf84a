//! Representation numbers, degree-n theta coefficient tables, the theta
//! operator, and mod-p congruence reports.
//!
//! A degree-n coefficient of the Siegel theta series of a lattice `M` is
//! the representation number `A(M, T)`: the number of ordered tuples
//! `(x_1, ..., x_n)` in `M^n` whose Gram matrix under `b` equals `2T`.
//! Forms `T` are stored through their even integral doubles `2T`.
//!
//! Counting is column-by-column backtracking. The candidates for column
//! `k` are the precomputed vectors of norm `2 t_kk`; while descending, the
//! surviving candidate lists of all later columns are filtered against the
//! chosen vector, so every candidate examined deeper in the tree already
//! satisfies all earlier inner-product constraints. Candidate filtering
//! runs on machine integers whenever an exact bound analysis of the pools
//! allows it, and on big integers otherwise. Tuples come in `+-` pairs
//! (negate every component), so only tuples whose first nonzero column is
//! lexicographically positive are traversed and the total is doubled.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumeration::{min_norm_and_kissing, norm_counts, vectors_with_norm};
use crate::error::ThetaError;
use crate::exact_linalg::{det_bareiss, IntegerMatrix};
use crate::fixpoint::{fixed_sublattice, Automorphism};
use crate::lattice::{direct_sum, Lattice};

/// A degree-n form `T` with integer diagonal and half-integral
/// off-diagonal entries, stored via its even integral double `2T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiIntegralForm {
    two_t: IntegerMatrix,
}

impl SemiIntegralForm {
    pub fn from_two_t(two_t: IntegerMatrix) -> Result<Self, ThetaError> {
        if !two_t.is_symmetric() {
            return Err(ThetaError::NotSemiIntegral);
        }
        if (0..two_t.rows()).any(|i| two_t.at(i, i).is_odd()) {
            return Err(ThetaError::NotSemiIntegral);
        }
        Ok(Self { two_t })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            two_t: IntegerMatrix::zero(degree, degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.two_t.rows()
    }

    pub fn two_t(&self) -> &IntegerMatrix {
        &self.two_t
    }

    pub fn det_two_t(&self) -> BigInt {
        det_bareiss(&self.two_t).expect("square")
    }

    /// Positive semidefinite: every principal minor is non-negative.
    pub fn is_positive_semidefinite(&self) -> bool {
        let n = self.degree();
        for mask in 1usize..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let mut sub = IntegerMatrix::zero(idx.len(), idx.len());
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    sub.set(a, b, self.two_t.at(i, j).clone());
                }
            }
            if det_bareiss(&sub).expect("square").is_negative() {
                return false;
            }
        }
        true
    }

    /// Positive definite: every leading principal minor is positive.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.degree();
        for k in 1..=n {
            let mut sub = IntegerMatrix::zero(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub.set(i, j, self.two_t.at(i, j).clone());
                }
            }
            if !det_bareiss(&sub).expect("square").is_positive() {
                return false;
            }
        }
        n > 0
    }

    /// Canonical ordering key: the upper triangle of `2T`, row-major.
    pub fn upper_triangle_key(&self) -> Vec<BigInt> {
        let n = self.degree();
        let mut key = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                key.push(self.two_t.at(i, j).clone());
            }
        }
        key
    }
}

impl PartialOrd for SemiIntegralForm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SemiIntegralForm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.upper_triangle_key().cmp(&other.upper_triangle_key()))
    }
}

/// All positive semidefinite semi-integral forms of the given degree with
/// diagonal entries `0 <= t_ii <= diag_bound`, in canonical order.
pub fn enumerate_forms(degree: usize, diag_bound: &BigInt) -> Vec<SemiIntegralForm> {
    assert!(!diag_bound.is_negative());
    let n = degree;
    if n == 0 {
        return vec![SemiIntegralForm::zero(0)];
    }
    let mut out = Vec::new();
    let mut diag = vec![BigInt::zero(); n];
    loop {
        collect_offdiag(&diag, &mut out);
        // Odometer over the diagonal.
        let mut i = 0;
        loop {
            if i == n {
                out.sort_unstable();
                return out;
            }
            if &diag[i] < diag_bound {
                diag[i] += 1;
                break;
            }
            diag[i] = BigInt::zero();
            i += 1;
        }
    }
}

fn collect_offdiag(diag: &[BigInt], out: &mut Vec<SemiIntegralForm>) {
    let n = diag.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut two_t = IntegerMatrix::zero(n, n);
    for (i, d) in diag.iter().enumerate() {
        two_t.set(i, i, d * 2);
    }
    fn fill(
        two_t: &mut IntegerMatrix,
        pairs: &[(usize, usize)],
        k: usize,
        diag: &[BigInt],
        out: &mut Vec<SemiIntegralForm>,
    ) {
        if k == pairs.len() {
            let form = SemiIntegralForm {
                two_t: two_t.clone(),
            };
            if form.is_positive_semidefinite() {
                out.push(form);
            }
            return;
        }
        let (i, j) = pairs[k];
        // |2 t_ij| <= 2 sqrt(t_ii t_jj) by Cauchy-Schwarz.
        let m = (&diag[i] * &diag[j] * 4i32).sqrt();
        let mut c = -m.clone();
        while c <= m {
            two_t.set(i, j, c.clone());
            two_t.set(j, i, c.clone());
            fill(two_t, pairs, k + 1, diag, out);
            c += 1;
        }
        two_t.set(i, j, BigInt::zero());
        two_t.set(j, i, BigInt::zero());
    }
    fill(&mut two_t, &pairs, 0, diag, out);
}

/// Candidate vectors of one norm, with `G * v` precomputed for fast inner
/// products. Vectors are in the lexicographic order of
/// [`vectors_with_norm`].
struct Pool {
    len: usize,
    rank: usize,
    small: Option<SmallPool>,
    big: Option<BigPool>,
    /// Indices of the lexicographically positive half.
    pos: Vec<u32>,
}

struct SmallPool {
    coords: Vec<i64>,
    gx: Vec<i64>,
    max_coord: i64,
    max_gx: i64,
}

struct BigPool {
    coords: Vec<Vec<BigInt>>,
    gx: Vec<Vec<BigInt>>,
}

impl Pool {
    fn build(gram: &IntegerMatrix, norm: &BigInt) -> Result<Pool, ThetaError> {
        let rank = gram.rows();
        // Count before collecting, so oversized pools fail cleanly instead
        // of exhausting memory.
        let expected = norm_counts(gram, norm)?
            .get(norm)
            .cloned()
            .unwrap_or_else(BigUint::zero);
        if expected > BigUint::from(150_000_000usize / rank.max(1)) {
            return Err(ThetaError::BeyondDeskScale(format!(
                "candidate pool of {expected} rank-{rank} vectors is beyond desk scale"
            )));
        }
        let vs = vectors_with_norm(gram, norm)?;
        let len = vs.len();
        let coords_big: Vec<Vec<BigInt>> = vs.into_iter().map(|v| v.coords).collect();
        let gx_big: Vec<Vec<BigInt>> = coords_big
            .iter()
            .map(|v| {
                (0..rank)
                    .map(|i| (0..rank).map(|j| gram.at(i, j) * &v[j]).sum())
                    .collect()
            })
            .collect();
        let pos: Vec<u32> = coords_big
            .iter()
            .enumerate()
            .filter(|(_, v)| {
                v.iter()
                    .find(|c| !c.is_zero())
                    .is_some_and(|c| c.is_positive())
            })
            .map(|(i, _)| i as u32)
            .collect();

        let to_i64 = |rows: &[Vec<BigInt>]| -> Option<(Vec<i64>, i64)> {
            let mut flat = Vec::with_capacity(rows.len() * rank);
            let mut max = 0i64;
            for row in rows {
                for v in row {
                    let x = v.to_i64()?;
                    max = max.max(x.checked_abs()?);
                    flat.push(x);
                }
            }
            Some((flat, max))
        };
        if let (Some((coords, max_coord)), Some((gx, max_gx))) =
            (to_i64(&coords_big), to_i64(&gx_big))
        {
            return Ok(Pool {
                len,
                rank,
                small: Some(SmallPool {
                    coords,
                    gx,
                    max_coord,
                    max_gx,
                }),
                big: None,
                pos,
            });
        }
        Ok(Pool {
            len,
            rank,
            small: None,
            big: Some(BigPool {
                coords: coords_big,
                gx: gx_big,
            }),
            pos,
        })
    }

    fn coord_big(&self, idx: usize, j: usize) -> BigInt {
        match (&self.small, &self.big) {
            (Some(s), _) => BigInt::from(s.coords[idx * self.rank + j]),
            (_, Some(b)) => b.coords[idx][j].clone(),
            _ => unreachable!(),
        }
    }

    fn gx_big(&self, idx: usize, j: usize) -> BigInt {
        match (&self.small, &self.big) {
            (Some(s), _) => BigInt::from(s.gx[idx * self.rank + j]),
            (_, Some(b)) => b.gx[idx][j].clone(),
            _ => unreachable!(),
        }
    }
}

/// Precomputed inner products `b(a_i, b_j)` between two candidate pools,
/// row-major by the first pool. Built only for small machine-integer pools
/// whose Cauchy-Schwarz window fits an `i8`.
struct PairTable {
    b_len: usize,
    vals: Vec<i8>,
}

fn build_pair_table(a: &Pool, b: &Pool, rank: usize) -> Option<PairTable> {
    let (xs, vs) = (a.small.as_ref()?, b.small.as_ref()?);
    if a.len.checked_mul(b.len)? > 30_000_000 {
        return None;
    }
    let bound = (rank as i128)
        .checked_mul(xs.max_coord as i128)
        .and_then(|v| v.checked_mul(vs.max_gx as i128))?;
    if bound > (1 << 62) {
        return None;
    }
    let mut vals = Vec::with_capacity(a.len * b.len);
    for ai in 0..a.len {
        let x = &xs.coords[ai * rank..(ai + 1) * rank];
        for bi in 0..b.len {
            let g = &vs.gx[bi * rank..(bi + 1) * rank];
            let dot: i64 = x.iter().zip(g).map(|(p, q)| p * q).sum();
            vals.push(i8::try_from(dot).ok()?);
        }
    }
    Some(PairTable {
        b_len: b.len,
        vals,
    })
}

/// Keeps the members of `input` whose inner product with vector `x_idx` of
/// `x_pool` equals `target`, appending to `out`.
fn filter_candidates(
    x_pool: &Pool,
    x_idx: usize,
    v_pool: &Pool,
    table: Option<&PairTable>,
    target: &BigInt,
    input: &[u32],
    out: &mut Vec<u32>,
) {
    out.clear();
    if let Some(t) = table {
        let tv = match target.to_i64() {
            Some(v) if (-127..=127).contains(&v) => v as i8,
            _ => return,
        };
        let row = &t.vals[x_idx * t.b_len..(x_idx + 1) * t.b_len];
        for &vi in input {
            if row[vi as usize] == tv {
                out.push(vi);
            }
        }
        return;
    }
    let rank = x_pool.rank;
    if let (Some(xs), Some(vs)) = (&x_pool.small, &v_pool.small) {
        // |dot| <= rank * max|coord| * max|G v|; no i64 overflow below the
        // gate, and a target beyond the gate can never be matched.
        let bound = (rank as i128)
            .checked_mul(xs.max_coord as i128)
            .and_then(|b| b.checked_mul(vs.max_gx as i128));
        if let Some(bound) = bound {
            if bound <= (1 << 62) {
                let t = match target.to_i64() {
                    Some(t) if (t as i128).abs() <= bound => t,
                    _ => return,
                };
                let x = &xs.coords[x_idx * rank..(x_idx + 1) * rank];
                for &vi in input {
                    let g = &vs.gx[vi as usize * rank..(vi as usize + 1) * rank];
                    let dot: i64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
                    if dot == t {
                        out.push(vi);
                    }
                }
                return;
            }
        }
    }
    for &vi in input {
        let mut dot = BigInt::zero();
        for j in 0..rank {
            dot += x_pool.coord_big(x_idx, j) * v_pool.gx_big(vi as usize, j);
        }
        if &dot == target {
            out.push(vi);
        }
    }
}

/// Reusable representation-number engine for one Gram matrix; candidate
/// pools and scalar counts are cached across calls.
pub struct RepContext<'a> {
    gram: &'a IntegerMatrix,
    pools: HashMap<BigInt, Pool>,
    tables: HashMap<(BigInt, BigInt), Option<PairTable>>,
    scalar: Option<(BigInt, BTreeMap<BigInt, BigUint>)>,
}

impl<'a> RepContext<'a> {
    pub fn new(gram: &'a IntegerMatrix) -> Self {
        assert!(gram.is_symmetric());
        Self {
            gram,
            pools: HashMap::new(),
            tables: HashMap::new(),
            scalar: None,
        }
    }

    /// Builds (or records ineligibility of) the pair table for two pool
    /// norms; the pools must already exist.
    fn ensure_table(&mut self, norm_a: &BigInt, norm_b: &BigInt) {
        let key = (norm_a.clone(), norm_b.clone());
        if self.tables.contains_key(&key) {
            return;
        }
        let w = (norm_a * norm_b).sqrt();
        let table = if w > BigInt::from(127) {
            None
        } else {
            build_pair_table(&self.pools[norm_a], &self.pools[norm_b], self.gram.rows())
        };
        self.tables.insert(key, table);
    }

    fn table_ref(&self, norm_a: &BigInt, norm_b: &BigInt) -> Option<&PairTable> {
        self.tables
            .get(&(norm_a.clone(), norm_b.clone()))
            .and_then(|t| t.as_ref())
    }

    /// `A(M, T)`: the number of ordered tuples with Gram matrix `2T`.
    pub fn count(&mut self, form: &SemiIntegralForm) -> Result<BigUint, ThetaError> {
        if !form.is_positive_semidefinite() {
            return Err(ThetaError::NotPsd);
        }
        let two_t = form.two_t();
        let n = form.degree();
        // Columns with t_kk = 0 force x_k = 0; semidefiniteness zeroes
        // their cross entries, so they contribute a factor 1.
        let active: Vec<usize> = (0..n).filter(|&k| !two_t.at(k, k).is_zero()).collect();
        debug_assert!((0..n)
            .all(|k| !two_t.at(k, k).is_zero() || (0..n).all(|j| two_t.at(k, j).is_zero())));
        if active.is_empty() {
            return Ok(BigUint::one());
        }
        if self.gram.rows() == 0 {
            return Ok(BigUint::zero());
        }
        if active.len() == 1 {
            return self.scalar_count(two_t.at(active[0], active[0]));
        }

        let norms: Vec<BigInt> = active.iter().map(|&k| two_t.at(k, k).clone()).collect();
        for norm in &norms {
            if !self.pools.contains_key(norm) {
                let pool = Pool::build(self.gram, norm)?;
                self.pools.insert(norm.clone(), pool);
            }
        }
        let m = active.len();
        for a in 0..m {
            for b in a + 1..m {
                self.ensure_table(&norms[a], &norms[b]);
            }
        }
        let pools: Vec<&Pool> = norms.iter().map(|n| &self.pools[n]).collect();
        if pools.iter().any(|p| p.len == 0) {
            return Ok(BigUint::zero());
        }
        let tables: Vec<Vec<Option<&PairTable>>> = (0..m)
            .map(|a| {
                (a + 1..m)
                    .map(|b| self.table_ref(&norms[a], &norms[b]))
                    .collect()
            })
            .collect();
        let targets: Vec<Vec<BigInt>> = (0..m)
            .map(|a| {
                (a + 1..m)
                    .map(|b| two_t.at(active[a], active[b]).clone())
                    .collect()
            })
            .collect();

        // Full index lists per column; column 0 only runs over the
        // lexicographically positive half and the total is doubled.
        let full: Vec<Vec<u32>> = pools.iter().map(|p| (0..p.len as u32).collect()).collect();
        let mut ws: Vec<Vec<Vec<u32>>> = (0..m - 1).map(|k| vec![Vec::new(); m - 1 - k]).collect();

        let mut total = BigUint::zero();
        for &ci in &pools[0].pos {
            let (mine, rest) = ws.split_at_mut(1);
            let mine = &mut mine[0];
            let mut dead = false;
            for off in 0..m - 1 {
                filter_candidates(
                    pools[0],
                    ci as usize,
                    pools[1 + off],
                    tables[0][off],
                    &targets[0][off],
                    &full[1 + off],
                    &mut mine[off],
                );
                if mine[off].is_empty() {
                    dead = true;
                    break;
                }
            }
            if !dead {
                total += count_rec(&pools, &tables, &targets, 1, mine, rest);
            }
        }
        Ok(total * 2u32)
    }

    fn scalar_count(&mut self, norm: &BigInt) -> Result<BigUint, ThetaError> {
        let refresh = match &self.scalar {
            Some((bound, _)) => norm > bound,
            None => true,
        };
        if refresh {
            let bound = match &self.scalar {
                Some((b, _)) => b.clone().max(norm.clone()),
                None => norm.clone(),
            };
            let counts = norm_counts(self.gram, &bound)?;
            self.scalar = Some((bound, counts));
        }
        let (_, counts) = self.scalar.as_ref().unwrap();
        Ok(counts.get(norm).cloned().unwrap_or_else(BigUint::zero))
    }

    /// Counts of all realised off-diagonal patterns among tuples whose
    /// k-th member has norm `norms[k]`, in one pass over the tuple space.
    /// Returns `None` when the block is unsuitable for the dense pass
    /// (big-integer pools, or tuple space / pattern space too large);
    /// callers then fall back to per-form counting.
    ///
    /// Pattern order: pairs `(i, j)` with `i < j`, sorted by `j` then `i`.
    fn histogram_block(
        &mut self,
        norms: &[BigInt],
    ) -> Result<Option<BTreeMap<Vec<BigInt>, BigUint>>, ThetaError> {
        let m = norms.len();
        assert!(m >= 2, "single-column blocks are counted by norm");
        // An empty pool annihilates the block before anything is built.
        for norm in norms {
            if self.scalar_count(norm)?.is_zero() {
                return Ok(Some(BTreeMap::new()));
            }
        }
        for norm in norms {
            if !self.pools.contains_key(norm) {
                let pool = Pool::build(self.gram, norm)?;
                self.pools.insert(norm.clone(), pool);
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                self.ensure_table(&norms[a], &norms[b]);
            }
        }
        let pools: Vec<&Pool> = norms.iter().map(|n| &self.pools[n]).collect();
        let smalls: Vec<&SmallPool> = match pools.iter().map(|p| p.small.as_ref()).collect() {
            Some(v) => v,
            None => return Ok(None),
        };
        // Tuple-space guard (the first column runs over half the pool).
        let mut est = pools[0].pos.len() as f64;
        for p in &pools[1..] {
            est *= p.len as f64;
        }
        if est > 2.5e10 {
            return Ok(None);
        }
        let rank = self.gram.rows();
        // i64 inner products must be safe across every pool pair.
        for a in &smalls {
            for b in &smalls {
                let bound = (rank as i128)
                    .checked_mul(a.max_coord as i128)
                    .and_then(|v| v.checked_mul(b.max_gx as i128));
                match bound {
                    Some(b) if b <= (1 << 62) => {}
                    _ => return Ok(None),
                }
            }
        }

        // Dense index space over all pairs: value c of pair (i, j) lies in
        // [-w, w] with w = sqrt(norm_i * norm_j) by Cauchy-Schwarz.
        let mut widths: Vec<i64> = Vec::new(); // per pair, in pattern order
        let mut mins: Vec<i64> = Vec::new();
        for j in 1..m {
            for i in 0..j {
                let w = (&norms[i] * &norms[j]).sqrt();
                let w = match w.to_i64() {
                    Some(w) => w,
                    None => return Ok(None),
                };
                widths.push(2 * w + 1);
                mins.push(-w);
            }
        }
        let mut dense_size = 1usize;
        for &w in &widths {
            dense_size = match dense_size.checked_mul(w as usize) {
                Some(v) if v <= 4_000_000 => v,
                _ => return Ok(None),
            };
        }
        let mut strides = vec![0usize; widths.len()];
        let mut acc = 1usize;
        for (k, &w) in widths.iter().enumerate() {
            strides[k] = acc;
            acc *= w as usize;
        }
        let mut dense = vec![0u64; dense_size];

        let tables: Vec<Option<&PairTable>> = {
            let mut v = Vec::with_capacity(widths.len());
            for j in 1..m {
                for i in 0..j {
                    v.push(self.table_ref(&norms[i], &norms[j]));
                }
            }
            v
        };

        // Depth-first product over the pools; the pattern contribution of
        // level k starts at pair index k(k-1)/2. Inner products come from
        // the pair tables where available.
        struct Frame {
            base: usize,
            choice: Vec<usize>,
        }
        enum RowSrc<'a> {
            Table(&'a [i8]),
            Dot(&'a [i64]),
        }
        #[allow(clippy::too_many_arguments)]
        fn rec(
            level: usize,
            m: usize,
            rank: usize,
            smalls: &[&SmallPool],
            pools: &[&Pool],
            tables: &[Option<&PairTable>],
            strides: &[usize],
            mins: &[i64],
            frame: &mut Frame,
            dense: &mut [u64],
        ) {
            let pair_base = level * level.saturating_sub(1) / 2;
            if level == m - 1 {
                // Hot loop: accumulate the final pattern coordinates.
                let last = smalls[level];
                let n_last = pools[level].len;
                let srcs: Vec<(RowSrc, i64, usize)> = (0..level)
                    .map(|j| {
                        let pair = pair_base + j;
                        let cj = frame.choice[j];
                        let src = match tables[pair] {
                            Some(t) => RowSrc::Table(&t.vals[cj * t.b_len..(cj + 1) * t.b_len]),
                            None => RowSrc::Dot(&smalls[j].coords[cj * rank..(cj + 1) * rank]),
                        };
                        (src, mins[pair], strides[pair])
                    })
                    .collect();
                for vi in 0..n_last {
                    let mut idx = frame.base;
                    for (src, min, stride) in &srcs {
                        let dot = match src {
                            RowSrc::Table(row) => row[vi] as i64,
                            RowSrc::Dot(x) => {
                                let g = &last.gx[vi * rank..(vi + 1) * rank];
                                x.iter().zip(g).map(|(a, b)| a * b).sum()
                            }
                        };
                        idx += ((dot - min) as usize) * stride;
                    }
                    dense[idx] += 1;
                }
                return;
            }
            let indices: Vec<usize> = if level == 0 {
                pools[0].pos.iter().map(|&i| i as usize).collect()
            } else {
                (0..pools[level].len).collect()
            };
            for ci in indices {
                frame.choice[level] = ci;
                let saved = frame.base;
                for j in 0..level {
                    let pair = pair_base + j;
                    let cj = frame.choice[j];
                    let dot: i64 = match tables[pair] {
                        Some(t) => t.vals[cj * t.b_len + ci] as i64,
                        None => {
                            let x = &smalls[j].coords[cj * rank..(cj + 1) * rank];
                            let g = &smalls[level].gx[ci * rank..(ci + 1) * rank];
                            x.iter().zip(g).map(|(a, b)| a * b).sum()
                        }
                    };
                    frame.base += ((dot - mins[pair]) as usize) * strides[pair];
                }
                rec(
                    level + 1,
                    m,
                    rank,
                    smalls,
                    pools,
                    tables,
                    strides,
                    mins,
                    frame,
                    dense,
                );
                frame.base = saved;
            }
        }
        let mut frame = Frame {
            base: 0,
            choice: vec![0; m],
        };
        rec(
            0,
            m,
            rank,
            &smalls,
            &pools,
            &tables,
            &strides,
            &mins,
            &mut frame,
            &mut dense,
        );

        // Decode the dense cells; tuples come in +- pairs, so double.
        let mut hist = BTreeMap::new();
        for (idx, &count) in dense.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let mut pattern = Vec::with_capacity(widths.len());
            let mut rest = idx;
            for (k, &w) in widths.iter().enumerate() {
                let digit = (rest % (w as usize)) as i64;
                rest /= w as usize;
                pattern.push(BigInt::from(digit + mins[k]));
            }
            hist.insert(pattern, BigUint::from(count) * 2u32);
        }
        Ok(Some(hist))
    }
}

/// Rebuilds a full form from a diagonal (in `2T` scale), the active
/// columns, and an off-diagonal pattern over those columns.
fn form_from_pattern(
    degree: usize,
    diag_two_t: &[BigInt],
    active: &[usize],
    pattern: &[BigInt],
) -> SemiIntegralForm {
    let mut two_t = IntegerMatrix::zero(degree, degree);
    for (k, d) in diag_two_t.iter().enumerate() {
        two_t.set(k, k, d.clone());
    }
    let m = active.len();
    let mut it = pattern.iter();
    for j in 1..m {
        for i in 0..j {
            let c = it.next().expect("pattern length").clone();
            two_t.set(active[i], active[j], c.clone());
            two_t.set(active[j], active[i], c);
        }
    }
    SemiIntegralForm { two_t }
}

/// Counts completions given the candidate lists produced by the previous
/// level: `input[0]` is the list for the current column, `input[1 + j]`
/// for the later ones.
fn count_rec(
    pools: &[&Pool],
    tables: &[Vec<Option<&PairTable>>],
    targets: &[Vec<BigInt>],
    level: usize,
    input: &[Vec<u32>],
    ws: &mut [Vec<Vec<u32>>],
) -> BigUint {
    let m = pools.len();
    if level == m - 1 {
        return BigUint::from(input[0].len());
    }
    let (mine, rest) = ws.split_at_mut(1);
    let mine = &mut mine[0];
    let mut total = BigUint::zero();
    'cand: for &ci in &input[0] {
        for off in 0..m - 1 - level {
            filter_candidates(
                pools[level],
                ci as usize,
                pools[level + 1 + off],
                tables[level][off],
                &targets[level][off],
                &input[1 + off],
                &mut mine[off],
            );
            if mine[off].is_empty() {
                continue 'cand;
            }
        }
        total += count_rec(pools, tables, targets, level + 1, mine, rest);
    }
    total
}

/// `A(M, T)` for a single form; use [`RepContext`] for repeated queries on
/// the same lattice.
pub fn representation_number(
    l: &Lattice,
    form: &SemiIntegralForm,
) -> Result<BigUint, ThetaError> {
    RepContext::new(l.gram()).count(form)
}

/// Finite table of theta coefficients: every positive semidefinite
/// semi-integral `T` of the given degree with diagonal `<= diag_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTable {
    pub label: Option<String>,
    pub degree: usize,
    pub diag_bound: BigInt,
    /// Entries sorted by the canonical form key.
    pub entries: Vec<(SemiIntegralForm, BigUint)>,
}

impl ThetaTable {
    pub fn get(&self, form: &SemiIntegralForm) -> Option<&BigUint> {
        self.entries
            .binary_search_by(|(f, _)| f.cmp(form))
            .ok()
            .map(|i| &self.entries[i].1)
    }
}

pub fn theta_table(
    l: &Lattice,
    degree: usize,
    diag_bound: &BigInt,
) -> Result<ThetaTable, ThetaError> {
    theta_table_of_gram(l.gram(), l.label().map(String::from), degree, diag_bound)
}

/// Table construction on a raw Gram matrix (rank 0 allowed, for fixed
/// sublattices of fixed-point-free automorphisms).
///
/// Diagonal blocks are processed with one dense histogram pass over the
/// tuple space where possible; blocks that do not qualify fall back to
/// per-form backtracking.
pub fn theta_table_of_gram(
    gram: &IntegerMatrix,
    label: Option<String>,
    degree: usize,
    diag_bound: &BigInt,
) -> Result<ThetaTable, ThetaError> {
    let forms = enumerate_forms(degree, diag_bound);
    let mut counts: BTreeMap<Vec<BigInt>, BigUint> = forms
        .iter()
        .map(|f| (f.upper_triangle_key(), BigUint::zero()))
        .collect();
    let mut ctx = RepContext::new(gram);

    let mut diag = vec![BigInt::zero(); degree];
    'diag: loop {
        let active: Vec<usize> = (0..degree).filter(|&k| !diag[k].is_zero()).collect();
        let diag_two_t: Vec<BigInt> = diag.iter().map(|d| d * 2i32).collect();
        if active.is_empty() {
            let zero = SemiIntegralForm::zero(degree);
            counts.insert(zero.upper_triangle_key(), BigUint::one());
        } else if gram.rows() == 0 {
            // No nonzero vectors; all counts stay 0.
        } else if active.len() == 1 {
            // A single active column has an empty off-diagonal pattern;
            // count by norm without materialising any vector pool.
            let c = ctx.scalar_count(&diag_two_t[active[0]])?;
            let form = form_from_pattern(degree, &diag_two_t, &active, &[]);
            counts.insert(form.upper_triangle_key(), c);
        } else {
            let norms: Vec<BigInt> = active.iter().map(|&k| diag_two_t[k].clone()).collect();
            match ctx.histogram_block(&norms)? {
                Some(hist) => {
                    for (pattern, count) in hist {
                        let form = form_from_pattern(degree, &diag_two_t, &active, &pattern);
                        let key = form.upper_triangle_key();
                        debug_assert!(counts.contains_key(&key), "realised pattern in range");
                        counts.insert(key, count);
                    }
                }
                None => {
                    for f in forms.iter().filter(|f| {
                        (0..degree).all(|k| f.two_t().at(k, k) == &diag_two_t[k])
                    }) {
                        let c = ctx.count(f)?;
                        counts.insert(f.upper_triangle_key(), c);
                    }
                }
            }
        }
        // Odometer over the diagonal.
        let mut i = 0;
        loop {
            if i == degree {
                break 'diag;
            }
            if &diag[i] < diag_bound {
                diag[i] += 1;
                break;
            }
            diag[i] = BigInt::zero();
            i += 1;
        }
    }

    let entries = forms
        .into_iter()
        .map(|f| {
            let c = counts[&f.upper_triangle_key()].clone();
            (f, c)
        })
        .collect();
    Ok(ThetaTable {
        label,
        degree,
        diag_bound: diag_bound.clone(),
        entries,
    })
}

/// The theta operator applied to a table: each form paired with `det(2T)`
/// and its coefficient. Singular forms carry determinant 0 and vanish
/// under the operator.
pub fn theta_operator(table: &ThetaTable) -> Vec<(SemiIntegralForm, BigInt, BigUint)> {
    table
        .entries
        .iter()
        .map(|(f, c)| (f.clone(), f.det_two_t(), c.clone()))
        .collect()
}

/// Which congruence a report is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CongruenceClaim {
    /// `p | det(2T) * A(M, T)` for every positive definite `T` in range.
    ThetaOperatorModP,
    /// `p | A(M, T)` for every positive definite `T` in range.
    SingularModP,
    /// `A(M, T) = A(M0, T) mod p` for every `T` in range.
    FixedSublatticeModP,
}

impl CongruenceClaim {
    pub fn as_str(self) -> &'static str {
        match self {
            CongruenceClaim::ThetaOperatorModP => "theta_operator_mod_p",
            CongruenceClaim::SingularModP => "singular_mod_p",
            CongruenceClaim::FixedSublatticeModP => "fixed_sublattice_mod_p",
        }
    }
}

/// A form violating a congruence claim.
#[derive(Clone, Debug)]
pub struct CongruenceWitness {
    pub form: SemiIntegralForm,
    pub count: BigUint,
    pub det_two_t: BigInt,
    /// `A(M0, T)` for the fixed-sublattice claim.
    pub reference_count: Option<BigUint>,
}

/// Verdict plus witnesses for one mod-p divisibility claim over a finite
/// range of forms.
#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub claim: CongruenceClaim,
    pub p: u64,
    pub degree: usize,
    pub diag_bound: BigInt,
    pub holds: bool,
    pub witnesses: Vec<CongruenceWitness>,
}

/// Checks `p | det(2T) * A(M, T)` over all positive definite `T` of the
/// given degree with diagonal `<= diag_bound`. For odd `p` this is
/// equivalent to the same divisibility for `det(T) * A(M, T)`.
pub fn congruence_check_theta_op(
    l: &Lattice,
    p: u64,
    degree: usize,
    diag_bound: &BigInt,
) -> Result<CongruenceReport, ThetaError> {
    let table = theta_table(l, degree, diag_bound)?;
    let pb = BigInt::from(p);
    let witnesses: Vec<CongruenceWitness> = table
        .entries
        .iter()
        .filter(|(f, _)| f.is_positive_definite())
        .filter_map(|(f, c)| {
            let det = f.det_two_t();
            let weighted = &det * BigInt::from(c.clone());
            if weighted.is_multiple_of(&pb) {
                None
            } else {
                Some(CongruenceWitness {
                    form: f.clone(),
                    count: c.clone(),
                    det_two_t: det,
                    reference_count: None,
                })
            }
        })
        .collect();
    Ok(CongruenceReport {
        claim: CongruenceClaim::ThetaOperatorModP,
        p,
        degree,
        diag_bound: diag_bound.clone(),
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Checks `p | A(M, T)` over all positive definite `T` in range (the
/// degree is singular mod p when this holds).
pub fn singularity_check(
    l: &Lattice,
    p: u64,
    degree: usize,
    diag_bound: &BigInt,
) -> Result<CongruenceReport, ThetaError> {
    let table = theta_table(l, degree, diag_bound)?;
    let pb = BigInt::from(p);
    let witnesses: Vec<CongruenceWitness> = table
        .entries
        .iter()
        .filter(|(f, _)| f.is_positive_definite())
        .filter_map(|(f, c)| {
            if BigInt::from(c.clone()).is_multiple_of(&pb) {
                None
            } else {
                Some(CongruenceWitness {
                    form: f.clone(),
                    count: c.clone(),
                    det_two_t: f.det_two_t(),
                    reference_count: None,
                })
            }
        })
        .collect();
    Ok(CongruenceReport {
        claim: CongruenceClaim::SingularModP,
        p,
        degree,
        diag_bound: diag_bound.clone(),
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Checks the orbit congruence `A(M, T) = A(M0, T) (mod p)` over all
/// positive semidefinite `T` in range, where `M0` is the fixed sublattice
/// of the automorphism.
pub fn fixed_congruence_check(
    l: &Lattice,
    s: &Automorphism,
    degree: usize,
    diag_bound: &BigInt,
) -> Result<CongruenceReport, ThetaError> {
    let p = s.order();
    let pb = BigInt::from(p);
    let m0 = fixed_sublattice(l, s);
    let table_l = theta_table(l, degree, diag_bound)?;
    let table_m0 = theta_table_of_gram(m0.gram(), None, degree, diag_bound)?;
    let mut witnesses = Vec::new();
    for ((f, a), (f0, a0)) in table_l.entries.iter().zip(&table_m0.entries) {
        debug_assert_eq!(f, f0);
        let diff = BigInt::from(a.clone()) - BigInt::from(a0.clone());
        if !diff.is_multiple_of(&pb) {
            witnesses.push(CongruenceWitness {
                form: f.clone(),
                count: a.clone(),
                det_two_t: f.det_two_t(),
                reference_count: Some(a0.clone()),
            });
        }
    }
    Ok(CongruenceReport {
        claim: CongruenceClaim::FixedSublatticeModP,
        p,
        degree,
        diag_bound: diag_bound.clone(),
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// One failure of the direct-sum convolution identity.
#[derive(Clone, Debug)]
pub struct ConvolutionMismatch {
    pub form: SemiIntegralForm,
    pub direct: BigUint,
    pub convolved: BigUint,
}

/// Report for the identity
/// `A(L1 perp L2, T) = sum over T1 + T2 = T of A(L1, T1) * A(L2, T2)`.
#[derive(Clone, Debug)]
pub struct ConvolutionReport {
    pub degree: usize,
    pub diag_bound: BigInt,
    pub holds: bool,
    pub mismatches: Vec<ConvolutionMismatch>,
}

/// All splittings `T = T1 + T2` into positive semidefinite semi-integral
/// summands. Diagonal entries of `2 T1` (resp. `2 T2`) that fall strictly
/// between 0 and the minimal norm of the corresponding lattice are pruned,
/// since their representation numbers vanish.
fn enumerate_splits(
    form: &SemiIntegralForm,
    min_b1: &BigInt,
    min_b2: &BigInt,
) -> Vec<(SemiIntegralForm, SemiIntegralForm)> {
    let n = form.degree();
    let two_t = form.two_t();
    let mut out = Vec::new();
    let mut diag1 = vec![BigInt::zero(); n];

    fn diag_rec(
        k: usize,
        n: usize,
        two_t: &IntegerMatrix,
        min_b1: &BigInt,
        min_b2: &BigInt,
        diag1: &mut Vec<BigInt>,
        out: &mut Vec<(SemiIntegralForm, SemiIntegralForm)>,
    ) {
        if k == n {
            offdiag_split(two_t, diag1, out);
            return;
        }
        let dk = two_t.at(k, k).clone();
        let mut d1 = BigInt::zero();
        while d1 <= dk {
            let d2 = &dk - &d1;
            let ok1 = d1.is_zero() || &d1 >= min_b1;
            let ok2 = d2.is_zero() || &d2 >= min_b2;
            if ok1 && ok2 {
                diag1[k] = d1.clone();
                diag_rec(k + 1, n, two_t, min_b1, min_b2, diag1, out);
            }
            d1 += 2;
        }
    }

    fn offdiag_split(
        two_t: &IntegerMatrix,
        diag1: &[BigInt],
        out: &mut Vec<(SemiIntegralForm, SemiIntegralForm)>,
    ) {
        let n = diag1.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut m1 = IntegerMatrix::zero(n, n);
        for (i, d) in diag1.iter().enumerate() {
            m1.set(i, i, d.clone());
        }
        fn fill(
            k: usize,
            pairs: &[(usize, usize)],
            two_t: &IntegerMatrix,
            diag1: &[BigInt],
            m1: &mut IntegerMatrix,
            out: &mut Vec<(SemiIntegralForm, SemiIntegralForm)>,
        ) {
            if k == pairs.len() {
                let f1 = SemiIntegralForm { two_t: m1.clone() };
                if !f1.is_positive_semidefinite() {
                    return;
                }
                let f2 = SemiIntegralForm {
                    two_t: two_t.sub(m1),
                };
                if f2.is_positive_semidefinite() {
                    out.push((f1, f2));
                }
                return;
            }
            let (i, j) = pairs[k];
            let c = two_t.at(i, j);
            // Cauchy-Schwarz windows for both summands.
            let b1 = (&diag1[i] * &diag1[j]).sqrt();
            let d2i = two_t.at(i, i) - &diag1[i];
            let d2j = two_t.at(j, j) - &diag1[j];
            let b2 = (&d2i * &d2j).sqrt();
            let lo = (-&b1).max(c - &b2);
            let hi = b1.clone().min(c + &b2);
            let mut c1 = lo;
            while c1 <= hi {
                m1.set(i, j, c1.clone());
                m1.set(j, i, c1.clone());
                fill(k + 1, pairs, two_t, diag1, m1, out);
                c1 += 1;
            }
            m1.set(i, j, BigInt::zero());
            m1.set(j, i, BigInt::zero());
        }
        fill(0, &pairs, two_t, diag1, &mut m1, out);
    }

    diag_rec(0, n, two_t, min_b1, min_b2, &mut diag1, &mut out);
    out
}

/// `A(L1 perp L2, T)` computed through the convolution identity, without
/// touching the direct-sum lattice. Splittings whose first factor has
/// vanishing count are skipped before the second factor is counted.
pub fn convolved_representation_number(
    l1: &Lattice,
    l2: &Lattice,
    form: &SemiIntegralForm,
) -> Result<BigUint, ThetaError> {
    if !form.is_positive_semidefinite() {
        return Err(ThetaError::NotPsd);
    }
    let min_b1 = min_norm_and_kissing(l1.gram()).expect("valid lattice").0;
    let min_b2 = min_norm_and_kissing(l2.gram()).expect("valid lattice").0;
    let mut ctx1 = RepContext::new(l1.gram());
    let mut ctx2 = RepContext::new(l2.gram());
    let mut total = BigUint::zero();
    for (f1, f2) in enumerate_splits(form, &min_b1, &min_b2) {
        let a1 = ctx1.count(&f1)?;
        if a1.is_zero() {
            continue;
        }
        let a2 = ctx2.count(&f2)?;
        total += a1 * a2;
    }
    Ok(total)
}

/// Verifies the convolution identity for every positive semidefinite `T`
/// of the given degree with diagonal `<= diag_bound`, comparing a direct
/// count on `L1 perp L2` with the convolved sum.
pub fn convolution_check(
    l1: &Lattice,
    l2: &Lattice,
    degree: usize,
    diag_bound: &BigInt,
) -> Result<ConvolutionReport, ThetaError> {
    let sum = direct_sum(l1, l2);
    let mut ctx = RepContext::new(sum.gram());
    let mut mismatches = Vec::new();
    for f in enumerate_forms(degree, diag_bound) {
        let direct = ctx.count(&f)?;
        let convolved = convolved_representation_number(l1, l2, &f)?;
        if direct != convolved {
            mismatches.push(ConvolutionMismatch {
                form: f,
                direct,
                convolved,
            });
        }
    }
    Ok(ConvolutionReport {
        degree,
        diag_bound: diag_bound.clone(),
        holds: mismatches.is_empty(),
        mismatches,
    })
}
