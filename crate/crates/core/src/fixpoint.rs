//! Fixed-space decomposition of a lattice under an automorphism of odd
//! prime order.
//!
//! For an isometry `sigma` of order `p` on a lattice `M`, the ambient space
//! splits as `V = V0 perp V1` with `V0` the fixed space. This module
//! computes the fixed sublattice `M0 = M ∩ V0`, its complement
//! `M1 = M ∩ V1`, the projected lattices `M~i = pi_i(M)` (represented
//! through their integral scaling `p * M~i`), and verifies the inclusion
//! chain `p M~i ⊆ M_i ⊆ M~i ⊆ M_i^#`, the splitting of `Gamma M`, and the
//! determinant divisibility forced on `M0` when the orthogonal splitting
//! fails.
//!
//! The group ring `Z[sigma]` embeds into `Z (+) Z[zeta_p]` by
//! `sigma^i -> (1, zeta^i)`; the embedding and its partial inverse are
//! provided, with just enough cyclotomic arithmetic to exercise them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{AutomorphismError, NotInImage};
use crate::exact_linalg::{
    det_bareiss, index_of_sublattice, integer_kernel, solve_left_integer, IntegerMatrix,
    RationalMatrix,
};
use crate::lattice::{decompose, Lattice, SublatticeHandle};

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_even() {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A validated isometry of odd prime order `p`, acting on coordinate rows
/// as `x -> x * U`.
#[derive(Clone, Debug)]
pub struct Automorphism {
    matrix: IntegerMatrix,
    order: u64,
}

impl Automorphism {
    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn order(&self) -> u64 {
        self.order
    }
}

/// Checks that `u` preserves the Gram matrix and has order exactly `p`.
pub fn validate_automorphism(
    l: &Lattice,
    u: &IntegerMatrix,
    p: u64,
) -> Result<Automorphism, AutomorphismError> {
    if !is_odd_prime(p) {
        return Err(AutomorphismError::NotOddPrime(p));
    }
    if u.rows() != l.rank() || u.cols() != l.rank() {
        return Err(AutomorphismError::ShapeMismatch);
    }
    if u.mul(l.gram()).mul(&u.transpose()) != *l.gram() {
        return Err(AutomorphismError::NotIsometry);
    }
    // U^p = I with U != I and p prime pins the order to exactly p.
    if u.is_identity() || !u.pow(p).is_identity() {
        return Err(AutomorphismError::WrongOrder(p));
    }
    Ok(Automorphism {
        matrix: u.clone(),
        order: p,
    })
}

/// `I + U + ... + U^(p-1)`, which is `p` times the projection onto the
/// fixed space.
pub fn sum_of_powers(u: &IntegerMatrix, p: u64) -> IntegerMatrix {
    let mut acc = IntegerMatrix::identity(u.rows());
    let mut pow = IntegerMatrix::identity(u.rows());
    for _ in 1..p {
        pow = pow.mul(u);
        acc = acc.add(&pow);
    }
    acc
}

/// The fixed sublattice `M0 = M ∩ V0`, as the saturated kernel of `U - I`.
pub fn fixed_sublattice(l: &Lattice, s: &Automorphism) -> SublatticeHandle {
    let n = l.rank();
    let diff = s.matrix().sub(&IntegerMatrix::identity(n));
    SublatticeHandle::new(l.gram(), integer_kernel(&diff))
}

/// The complement `M1 = M ∩ V1`, as the saturated kernel of
/// `I + U + ... + U^(p-1)`.
pub fn sigma_complement(l: &Lattice, s: &Automorphism) -> SublatticeHandle {
    let pi0 = sum_of_powers(s.matrix(), s.order());
    SublatticeHandle::new(l.gram(), integer_kernel(&pi0))
}

pub fn is_fixed_point_free(l: &Lattice, s: &Automorphism) -> bool {
    fixed_sublattice(l, s).rank() == 0
}

/// The projection image `M~i = pi_i(M)`, represented by its integral
/// scaling `p * M~i` together with the exact rational Gram of `M~i`.
#[derive(Clone, Debug)]
pub struct ProjectedLattice {
    /// Basis of `p * M~i` in parent coordinates.
    pub scaled: SublatticeHandle,
    /// Gram matrix of `M~i` itself: `gram(p M~i) / p^2`.
    pub rational_gram: RationalMatrix,
}

pub fn projected_lattice(l: &Lattice, s: &Automorphism, side: usize) -> ProjectedLattice {
    assert!(side < 2, "side must be 0 or 1");
    let n = l.rank();
    let p0 = sum_of_powers(s.matrix(), s.order());
    let proj = if side == 0 {
        p0
    } else {
        IntegerMatrix::identity(n)
            .scale(&BigInt::from(s.order()))
            .sub(&p0)
    };
    // The rows of p * pi_i span p * M~i; Hermite-reduce to a basis.
    let res = crate::exact_linalg::hnf(&proj);
    let coords = IntegerMatrix::from_rows((0..res.rank).map(|i| res.h.row(i).to_vec()).collect());
    let coords = if res.rank == 0 {
        IntegerMatrix::zero(0, n)
    } else {
        coords
    };
    let scaled = SublatticeHandle::new(l.gram(), coords);
    let p2 = BigRational::from_integer(BigInt::from(s.order() * s.order()));
    let rational_gram = scaled.gram().to_rational().scale(&p2.recip());
    ProjectedLattice {
        scaled,
        rational_gram,
    }
}

/// Verdicts for the three inclusions `p M~i ⊆ M_i ⊆ M~i ⊆ M_i^#` on one
/// side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSideReport {
    pub scaled_projection_in_intersection: bool,
    pub intersection_in_projection: bool,
    pub projection_in_dual: bool,
}

impl ChainSideReport {
    pub fn all_hold(&self) -> bool {
        self.scaled_projection_in_intersection
            && self.intersection_in_projection
            && self.projection_in_dual
    }
}

fn chain_side(
    l: &Lattice,
    p: u64,
    intersection: &SublatticeHandle,
    scaled_proj: &SublatticeHandle,
) -> ChainSideReport {
    let pb = BigInt::from(p);
    // p M~i ⊆ M_i: every basis row of p M~i solves integrally over M_i.
    let scaled_projection_in_intersection = (0..scaled_proj.rank()).all(|r| {
        solve_left_integer(intersection.coords(), scaled_proj.coords().row(r)).is_some()
    });
    // M_i ⊆ M~i: p * (basis of M_i) lies in p M~i.
    let intersection_in_projection = (0..intersection.rank()).all(|r| {
        let scaled_row: Vec<BigInt> = intersection
            .coords()
            .row(r)
            .iter()
            .map(|x| x * &pb)
            .collect();
        solve_left_integer(scaled_proj.coords(), &scaled_row).is_some()
    });
    // M~i ⊆ M_i^#: b(M~i, M_i) ⊆ Z, i.e. p divides b(p M~i, M_i) entrywise.
    let pairing = scaled_proj
        .coords()
        .mul(l.gram())
        .mul(&intersection.coords().transpose());
    let projection_in_dual = (0..pairing.rows())
        .all(|i| (0..pairing.cols()).all(|j| pairing.at(i, j).is_multiple_of(&pb)));
    ChainSideReport {
        scaled_projection_in_intersection,
        intersection_in_projection,
        projection_in_dual,
    }
}

/// Runs the inclusion-chain checks on both sides.
pub fn lemma_chain_check(l: &Lattice, s: &Automorphism) -> [ChainSideReport; 2] {
    let m0 = fixed_sublattice(l, s);
    let m1 = sigma_complement(l, s);
    let proj0 = projected_lattice(l, s, 0);
    let proj1 = projected_lattice(l, s, 1);
    [
        chain_side(l, s.order(), &m0, &proj0.scaled),
        chain_side(l, s.order(), &m1, &proj1.scaled),
    ]
}

/// Bookkeeping for the splitting `Gamma M = M~0 (+) M~1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSplittingReport {
    pub rank_sum_ok: bool,
    pub projections_orthogonal: bool,
    /// Index of `Gamma M` over `M`; a power of `p`.
    pub gamma_index: BigInt,
    pub index_is_p_power: bool,
    /// `det(M~0) * det(M~1) * (Gamma M : M)^2 = det(M)`.
    pub det_identity_ok: bool,
}

impl GammaSplittingReport {
    pub fn all_hold(&self) -> bool {
        self.rank_sum_ok && self.projections_orthogonal && self.index_is_p_power
            && self.det_identity_ok
    }
}

fn gamma_splitting(l: &Lattice, s: &Automorphism) -> GammaSplittingReport {
    let n = l.rank();
    let p = BigInt::from(s.order());
    let proj0 = projected_lattice(l, s, 0).scaled;
    let proj1 = projected_lattice(l, s, 1).scaled;
    let rank_sum_ok = proj0.rank() + proj1.rank() == n;
    let cross = proj0.coords().mul(l.gram()).mul(&proj1.coords().transpose());
    let projections_orthogonal = cross.is_zero();

    // (Gamma M : M) = p^n / [M : p Gamma M].
    let stacked = IntegerMatrix::stack(proj0.coords(), proj1.coords());
    let index_scaled = index_of_sublattice(&stacked).expect("full rank by rank_sum");
    let pn = p.pow(n as u32);
    let (gamma_index, rem) = pn.div_rem(&index_scaled);
    let mut index_is_p_power = rem.is_zero();
    if index_is_p_power {
        let mut q = gamma_index.clone();
        while q.is_multiple_of(&p) {
            q /= &p;
        }
        index_is_p_power = q.is_one();
    }

    // det(M~i) = det(p M~i) / p^(2 rank_i); multiply through by p^(2n).
    let det0 = det_bareiss(proj0.gram()).expect("square");
    let det1 = det_bareiss(proj1.gram()).expect("square");
    let det_identity_ok = rank_sum_ok
        && &det0 * &det1 * &gamma_index * &gamma_index == l.det() * p.pow(2 * n as u32);

    GammaSplittingReport {
        rank_sum_ok,
        projections_orthogonal,
        gamma_index,
        index_is_p_power,
        det_identity_ok,
    }
}

/// Full report of the fixed-space splitting checks for one `(M, sigma)`
/// pair.
#[derive(Clone, Debug)]
pub struct FixedSplitReport {
    pub p: u64,
    pub m0: usize,
    pub m1: usize,
    pub det_m0: BigInt,
    pub det_m1: BigInt,
    pub m1_divisible_by_p_minus_1: bool,
    /// `[M : M0 (+) M1]`.
    pub split_index: BigInt,
    /// `split_index^2 * det(M) = det(M0) * det(M1)`.
    pub index_bookkeeping_ok: bool,
    pub is_orthogonal_split: bool,
    pub det_m0_divisible_by_p: bool,
    /// `M = M0 perp M1`, or `p` divides `det(M0)`.
    pub disjunction_holds: bool,
    pub chain: [ChainSideReport; 2],
    pub gamma: GammaSplittingReport,
    /// Whether a proper orthogonal summand of rank `m0` and determinant
    /// prime to `p` exists; `None` when the hypothesis was not evaluated
    /// (non-unimodular, or `m0` is 0 or the full rank).
    pub has_exceptional_summand: Option<bool>,
    /// `p | det(M0)` forced by indecomposability; `None` when the forcing
    /// hypotheses do not apply.
    pub forced_divisibility_holds: Option<bool>,
}

impl FixedSplitReport {
    pub fn all_assertions_hold(&self) -> bool {
        self.m1_divisible_by_p_minus_1
            && self.index_bookkeeping_ok
            && self.chain.iter().all(ChainSideReport::all_hold)
            && self.gamma.all_hold()
            && self.disjunction_holds
            && self.forced_divisibility_holds != Some(false)
    }
}

/// Computes the fixed splitting data and checks the determinant
/// disjunction, together with the decomposability exception clause.
pub fn splitting_check(l: &Lattice, s: &Automorphism) -> FixedSplitReport {
    let n = l.rank();
    let p = BigInt::from(s.order());
    let m0h = fixed_sublattice(l, s);
    let m1h = sigma_complement(l, s);
    let (m0, m1) = (m0h.rank(), m1h.rank());
    assert_eq!(m0 + m1, n, "fixed and complement ranks must add to the rank");
    let det_m0 = m0h.det();
    let det_m1 = m1h.det();
    let m1_divisible_by_p_minus_1 = m1 % (s.order() as usize - 1) == 0;

    let stacked = IntegerMatrix::stack(m0h.coords(), m1h.coords());
    let split_index = index_of_sublattice(&stacked)
        .expect("M0 (+) M1 has full rank")
        .abs();
    let index_bookkeeping_ok =
        &split_index * &split_index * l.det() == &det_m0 * &det_m1;
    let is_orthogonal_split = split_index.is_one();
    let det_m0_divisible_by_p = det_m0.is_multiple_of(&p);
    let disjunction_holds = is_orthogonal_split || det_m0_divisible_by_p;

    let (has_exceptional_summand, forced_divisibility_holds) =
        if l.is_unimodular() && m0 > 0 && m0 < n {
            let comps = decompose(l).expect("valid lattice");
            let exceptional = if comps.len() < 2 {
                false
            } else {
                // Proper orthogonal summands are exactly the proper
                // sub-sums of the indecomposable components.
                let ranks: Vec<usize> = comps.iter().map(|c| c.rank()).collect();
                let dets: Vec<BigInt> = comps.iter().map(|c| c.det()).collect();
                let total = 1usize << comps.len();
                (1..total - 1).any(|mask| {
                    let mut rank = 0usize;
                    let mut det_prime_to_p = true;
                    for (i, (r, d)) in ranks.iter().zip(&dets).enumerate() {
                        if mask & (1 << i) != 0 {
                            rank += r;
                            if d.gcd(&p) != BigInt::one() {
                                det_prime_to_p = false;
                            }
                        }
                    }
                    rank == m0 && det_prime_to_p
                })
            };
            let forced = if exceptional {
                None
            } else {
                Some(det_m0_divisible_by_p)
            };
            (Some(exceptional), forced)
        } else {
            (None, None)
        };

    FixedSplitReport {
        p: s.order(),
        m0,
        m1,
        det_m0,
        det_m1,
        m1_divisible_by_p_minus_1,
        split_index,
        index_bookkeeping_ok,
        is_orthogonal_split,
        det_m0_divisible_by_p,
        disjunction_holds,
        chain: lemma_chain_check(l, s),
        gamma: gamma_splitting(l, s),
        has_exceptional_summand,
        forced_divisibility_holds,
    }
}

/// Element `sum alpha_i sigma^i` of the group ring `Z[sigma]`,
/// `sigma^p = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement {
    coeffs: Vec<BigInt>,
}

impl GroupRingElement {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn sigma_power(p: usize, i: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); p];
        coeffs[i % p] = BigInt::one();
        Self { coeffs }
    }

    pub fn p(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p(), other.p());
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Product in `Z[sigma]`: cyclic convolution modulo `sigma^p = 1`.
    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p();
        assert_eq!(p, other.p());
        let mut out = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[(i + j) % p] += a * b;
            }
        }
        Self::new(out)
    }
}

/// Image `(a, sum beta_i zeta^i)` of a group-ring element in
/// `Z (+) Z[zeta_p]`, `beta` in the basis `zeta, ..., zeta^{p-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicImage {
    pub a: BigInt,
    pub beta: Vec<BigInt>,
}

impl CyclotomicImage {
    pub fn p(&self) -> usize {
        self.beta.len() + 1
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p(), other.p());
        Self {
            a: &self.a + &other.a,
            beta: self
                .beta
                .iter()
                .zip(&other.beta)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    /// Componentwise product; the cyclotomic factor multiplies modulo the
    /// p-th cyclotomic polynomial.
    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p();
        assert_eq!(p, other.p());
        // Convolution over exponents modulo p (zeta^p = 1) ...
        let mut conv = vec![BigInt::zero(); p];
        for (i, x) in self.beta.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.beta.iter().enumerate() {
                conv[(i + j + 2) % p] += x * y;
            }
        }
        // ... then eliminate zeta^0 = -(zeta + ... + zeta^{p-1}).
        let c0 = conv[0].clone();
        let beta = (1..p).map(|k| &conv[k] - &c0).collect();
        Self {
            a: &self.a * &other.a,
            beta,
        }
    }
}

/// `iota(sum alpha_i sigma^i) = (sum alpha_i, sum (alpha_i - alpha_0)
/// zeta^i)`.
pub fn iota_embed(e: &GroupRingElement) -> CyclotomicImage {
    let a = e.coeffs.iter().sum();
    let beta = e.coeffs[1..].iter().map(|c| c - &e.coeffs[0]).collect();
    CyclotomicImage { a, beta }
}

/// Inverts the embedding: `p alpha_0 = a - sum beta_i` (the trace of each
/// `zeta^i` is -1), then `alpha_i = beta_i + alpha_0`.
pub fn iota_preimage(img: &CyclotomicImage) -> Result<GroupRingElement, NotInImage> {
    let p = BigInt::from(img.p() as u64);
    let s: BigInt = img.beta.iter().sum();
    let residue = &img.a - &s;
    let (alpha0, rem) = residue.div_rem(&p);
    if !rem.is_zero() {
        return Err(NotInImage { residue });
    }
    let mut coeffs = Vec::with_capacity(img.p());
    coeffs.push(alpha0.clone());
    for b in &img.beta {
        coeffs.push(b + &alpha0);
    }
    Ok(GroupRingElement::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{block_diag_automorphism, catalog};
    use crate::lattice::{direct_sum, reduce_binary, BinaryForm};

    fn a2_with_rotation() -> (Lattice, Automorphism) {
        let entry = catalog("A2").unwrap();
        let aut = validate_automorphism(&entry.lattice, &entry.automorphisms[0].matrix, 3).unwrap();
        (entry.lattice, aut)
    }

    #[test]
    fn a2_rotation_validates() {
        let (_, aut) = a2_with_rotation();
        assert_eq!(aut.order(), 3);
    }

    #[test]
    fn identity_has_wrong_order() {
        let entry = catalog("A2").unwrap();
        let id = IntegerMatrix::identity(2);
        assert!(matches!(
            validate_automorphism(&entry.lattice, &id, 3),
            Err(AutomorphismError::WrongOrder(3))
        ));
    }

    #[test]
    fn even_order_rejected() {
        let entry = catalog("A2").unwrap();
        let m = entry.automorphisms[0].matrix.clone();
        assert!(matches!(
            validate_automorphism(&entry.lattice, &m, 2),
            Err(AutomorphismError::NotOddPrime(2))
        ));
        assert!(matches!(
            validate_automorphism(&entry.lattice, &m, 9),
            Err(AutomorphismError::NotOddPrime(9))
        ));
    }

    #[test]
    fn non_isometry_rejected() {
        let entry = catalog("A2").unwrap();
        let m = IntegerMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            validate_automorphism(&entry.lattice, &m, 3),
            Err(AutomorphismError::NotIsometry)
        ));
    }

    #[test]
    fn a2_rotation_is_fixed_point_free() {
        let (l, aut) = a2_with_rotation();
        assert!(is_fixed_point_free(&l, &aut));
        assert_eq!(fixed_sublattice(&l, &aut).rank(), 0);
        assert_eq!(sigma_complement(&l, &aut).rank(), 2);
    }

    #[test]
    fn a2_projections_degenerate_side() {
        let (l, aut) = a2_with_rotation();
        let proj0 = projected_lattice(&l, &aut, 0);
        assert_eq!(proj0.scaled.rank(), 0);
        let proj1 = projected_lattice(&l, &aut, 1);
        assert_eq!(proj1.scaled.rank(), 2);
        // pi_1 = identity here, so p M~1 = 3 M and gram(M~1) = gram(M).
        assert_eq!(proj1.rational_gram, l.gram().to_rational());
    }

    #[test]
    fn a2_splitting_trivial_side() {
        let (l, aut) = a2_with_rotation();
        let report = splitting_check(&l, &aut);
        assert_eq!(report.m0, 0);
        assert_eq!(report.m1, 2);
        assert!(report.is_orthogonal_split);
        assert!(report.all_assertions_hold());
        assert_eq!(report.det_m0, BigInt::one());
    }

    #[test]
    fn e8_order7_fixed_rank_2() {
        let entry = catalog("E8").unwrap();
        let aut =
            validate_automorphism(&entry.lattice, &entry.automorphisms[0].matrix, 7).unwrap();
        let m0 = fixed_sublattice(&entry.lattice, &aut);
        assert_eq!(m0.rank(), 2);
        assert_eq!(sigma_complement(&entry.lattice, &aut).rank(), 6);
        let report = splitting_check(&entry.lattice, &aut);
        assert!(report.all_assertions_hold(), "{report:?}");
        assert!(report.det_m0_divisible_by_p);
        assert_eq!(report.has_exceptional_summand, Some(false));
        assert_eq!(report.forced_divisibility_holds, Some(true));
    }

    #[test]
    fn e8_plus_e8_block_automorphism() {
        let e8 = catalog("E8").unwrap();
        let sum = direct_sum(&e8.lattice, &e8.lattice);
        let block = block_diag_automorphism(8, &e8.automorphisms[0].matrix);
        let aut = validate_automorphism(&sum, &block, 7).unwrap();
        let report = splitting_check(&sum, &aut);
        assert_eq!(report.m0, 10);
        assert_eq!(report.m1, 6);
        assert!(report.all_assertions_hold(), "{report:?}");
        // The fixed lattice contains the whole first E8 summand.
        assert!(report.det_m0_divisible_by_p);
        assert_eq!(report.has_exceptional_summand, Some(false));
    }

    #[test]
    fn leech_order23_fixed_lattice() {
        let entry = catalog("Leech").unwrap();
        let aut =
            validate_automorphism(&entry.lattice, &entry.automorphisms[0].matrix, 23).unwrap();
        let m0 = fixed_sublattice(&entry.lattice, &aut);
        assert_eq!(m0.rank(), 2);
        assert_eq!(m0.det(), BigInt::from(23));
        let f = BinaryForm::from_gram(m0.gram()).unwrap();
        let (r, _) = reduce_binary(&f).unwrap();
        assert_eq!(r, BinaryForm::new(4.into(), 1.into(), 6.into()).unwrap());
    }

    #[test]
    fn group_ring_embedding_examples() {
        // identity sigma^0, p = 3: a = 1, beta = (-1, -1).
        let e = GroupRingElement::sigma_power(3, 0);
        let img = iota_embed(&e);
        assert_eq!(img.a, BigInt::one());
        assert_eq!(img.beta, vec![BigInt::from(-1), BigInt::from(-1)]);
        // norm element: a = 3, beta = 0.
        let norm = GroupRingElement::new(vec![1.into(), 1.into(), 1.into()]);
        let img = iota_embed(&norm);
        assert_eq!(img.a, BigInt::from(3));
        assert!(img.beta.iter().all(|b| b.is_zero()));
        // sigma^1: a = 1, beta = (1, 0).
        let img = iota_embed(&GroupRingElement::sigma_power(3, 1));
        assert_eq!(img.a, BigInt::one());
        assert_eq!(img.beta, vec![BigInt::one(), BigInt::zero()]);
    }

    #[test]
    fn preimage_examples() {
        let img = CyclotomicImage {
            a: BigInt::from(3),
            beta: vec![BigInt::zero(), BigInt::zero()],
        };
        let e = iota_preimage(&img).unwrap();
        assert_eq!(e.coeffs(), &[BigInt::one(), BigInt::one(), BigInt::one()]);

        let img = CyclotomicImage {
            a: BigInt::one(),
            beta: vec![BigInt::zero(), BigInt::zero()],
        };
        assert!(iota_preimage(&img).is_err());

        // (p, beta) with sum(beta) = 0 mod p lies in the image.
        let img = CyclotomicImage {
            a: BigInt::from(5),
            beta: vec![3.into(), 1.into(), 0.into(), 1.into()],
        };
        let e = iota_preimage(&img).unwrap();
        assert_eq!(iota_embed(&e), img);
    }

    #[test]
    fn orbit_of_non_fixed_vector_has_length_p() {
        let entry = catalog("E8").unwrap();
        let aut =
            validate_automorphism(&entry.lattice, &entry.automorphisms[0].matrix, 7).unwrap();
        let x: Vec<BigInt> = (0..8).map(|i| BigInt::from(i + 1)).collect();
        let mut orbit = std::collections::BTreeSet::new();
        let mut cur = x.clone();
        for _ in 0..7 {
            orbit.insert(cur.clone());
            cur = aut.matrix().apply_row(&cur);
        }
        assert_eq!(cur, x);
        assert_eq!(orbit.len(), 7);
    }
}
