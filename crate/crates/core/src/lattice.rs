//! Lattice values and structural operations.
//!
//! A [`Lattice`] is an even positive definite integral lattice given by the
//! Gram matrix of its bilinear form `b`; the quadratic form is
//! `q(x) = b(x, x) / 2`. Sublattices are handled through coordinate rows in
//! the parent basis.
//!
//! The decomposition into indecomposable orthogonal summands follows
//! Kneser's method: short vectors up to the maximal reduced diagonal are
//! enumerated, verified to generate the lattice, and split into connected
//! components under the non-orthogonality relation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

use crate::enumeration::{bilinear_value, gram_value, short_vectors, vectors_with_norm};
use crate::error::{LatticeError, LinalgError};
use crate::exact_linalg::{
    det_bareiss, hnf, index_of_sublattice, lll_reduce, rational_cholesky, IntegerMatrix,
};

/// Even positive definite integral lattice, represented by its Gram matrix
/// with respect to `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntegerMatrix,
    label: Option<String>,
}

impl Lattice {
    /// Validates the Gram matrix (symmetric, even diagonal, positive
    /// definite) and wraps it.
    pub fn new(gram: IntegerMatrix, label: Option<String>) -> Result<Self, LatticeError> {
        let report = validate_even_lattice(&gram);
        if !report.is_valid() {
            return Err(LatticeError::InvalidLattice(report.failure_summary()));
        }
        Ok(Self { gram, label })
    }

    pub fn gram(&self) -> &IntegerMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn det(&self) -> BigInt {
        det_bareiss(&self.gram).expect("gram is square")
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().is_one()
    }
}

/// Validation flags for a prospective even-lattice Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub even_diagonal: bool,
    pub positive_definite: bool,
    /// Exact determinant, when the matrix is square.
    pub determinant: Option<BigInt>,
    pub unimodular: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetric && self.even_diagonal && self.positive_definite
    }

    fn failure_summary(&self) -> String {
        let mut fails = Vec::new();
        if !self.symmetric {
            fails.push("not symmetric");
        }
        if !self.even_diagonal {
            fails.push("diagonal not even");
        }
        if !self.positive_definite {
            fails.push("not positive definite");
        }
        fails.join(", ")
    }
}

/// Checks symmetry, even diagonal, positive definiteness, determinant and
/// unimodularity of a Gram matrix; failures are reported, not raised.
pub fn validate_even_lattice(gram: &IntegerMatrix) -> ValidationReport {
    let symmetric = gram.is_symmetric();
    let even_diagonal = gram.is_square()
        && (0..gram.rows()).all(|i| gram.at(i, i).is_even());
    let positive_definite =
        symmetric && gram.rows() > 0 && rational_cholesky(&gram.to_rational()).is_ok();
    let determinant = if gram.is_square() {
        det_bareiss(gram).ok()
    } else {
        None
    };
    let unimodular = determinant.as_ref().is_some_and(|d| d.is_one());
    ValidationReport {
        symmetric,
        even_diagonal,
        positive_definite,
        determinant,
        unimodular,
    }
}

/// Orthogonal direct sum; the Gram matrix is block diagonal.
pub fn direct_sum(l1: &Lattice, l2: &Lattice) -> Lattice {
    let gram = IntegerMatrix::block_diag(l1.gram(), l2.gram());
    let label = match (l1.label(), l2.label()) {
        (Some(a), Some(b)) => Some(format!("{a}+{b}")),
        _ => None,
    };
    Lattice { gram, label }
}

/// A sublattice given by basis rows in the coordinates of a parent lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublatticeHandle {
    coords: IntegerMatrix,
    gram: IntegerMatrix,
}

impl SublatticeHandle {
    /// Builds the handle and derives its Gram matrix
    /// `coords * G * coords^T`. The rows must be linearly independent.
    pub fn new(parent_gram: &IntegerMatrix, coords: IntegerMatrix) -> Self {
        assert_eq!(coords.cols(), parent_gram.rows());
        debug_assert_eq!(hnf(&coords).rank, coords.rows(), "rows must be independent");
        let gram = coords.mul(parent_gram).mul(&coords.transpose());
        Self { coords, gram }
    }

    pub fn rank(&self) -> usize {
        self.coords.rows()
    }

    pub fn parent_rank(&self) -> usize {
        self.coords.cols()
    }

    pub fn coords(&self) -> &IntegerMatrix {
        &self.coords
    }

    pub fn gram(&self) -> &IntegerMatrix {
        &self.gram
    }

    pub fn det(&self) -> BigInt {
        det_bareiss(&self.gram).expect("gram is square")
    }
}

/// Incremental Hermite-form span of a growing set of rows.
struct SpanBuilder {
    cols: usize,
    basis: IntegerMatrix,
}

impl SpanBuilder {
    fn new(cols: usize) -> Self {
        Self {
            cols,
            basis: IntegerMatrix::zero(0, cols),
        }
    }

    /// Adds a row; returns true when the span grew.
    fn add(&mut self, row: &[BigInt]) -> bool {
        // Reduce against the current Hermite basis first; most rows are
        // already in the span and are rejected cheaply.
        let mut r = row.to_vec();
        for i in 0..self.basis.rows() {
            let mut col = 0;
            while self.basis.at(i, col).is_zero() {
                col += 1;
            }
            let q = r[col].div_floor(self.basis.at(i, col));
            if !q.is_zero() {
                for j in 0..self.cols {
                    r[j] -= &q * self.basis.at(i, j);
                }
            }
        }
        if r.iter().all(|x| x.is_zero()) {
            return false;
        }
        let stacked = IntegerMatrix::stack(&self.basis, &IntegerMatrix::from_rows(vec![r]));
        let res = hnf(&stacked);
        self.basis = IntegerMatrix::from_rows(
            (0..res.rank).map(|i| res.h.row(i).to_vec()).collect(),
        );
        true
    }

    fn is_full_unit_lattice(&self) -> bool {
        self.basis.rows() == self.cols && self.basis.is_identity()
    }
}

/// Kneser decomposition into indecomposable orthogonal summands.
///
/// Vectors of norm up to the maximal diagonal entry of the LLL-reduced Gram
/// matrix are enumerated (the bound is raised by 2 until they generate the
/// lattice) and joined by an edge whenever they are not orthogonal; the
/// connected components span the summands.
pub fn decompose(l: &Lattice) -> Result<Vec<SublatticeHandle>, LinalgError> {
    let g = l.gram();
    let n = l.rank();
    let (g2, _) = lll_reduce(g)?;
    let start_bound = (0..n)
        .map(|i| g2.at(i, i).clone())
        .max()
        .expect("positive rank");
    let cap = &start_bound * 2;

    let mut bound = start_bound;
    let vectors = loop {
        let vs = short_vectors(g, &bound)?;
        let mut span = SpanBuilder::new(n);
        let mut generated = false;
        for v in &vs {
            span.add(&v.coords);
            if span.is_full_unit_lattice() {
                generated = true;
                break;
            }
        }
        if generated {
            break vs;
        }
        bound += 2;
        assert!(
            bound <= cap,
            "short vectors up to twice the reduced diagonal must generate"
        );
    };

    // Union-find over the vectors; edge = non-orthogonal pair.
    let mut components: Vec<Vec<usize>> = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut touching = Vec::new();
        for (ci, comp) in components.iter().enumerate() {
            if comp
                .iter()
                .any(|&m| !bilinear_value(g, &v.coords, &vectors[m].coords).is_zero())
            {
                touching.push(ci);
            }
        }
        match touching.split_first() {
            None => components.push(vec![idx]),
            Some((&first, rest)) => {
                for &ci in rest.iter().rev() {
                    let moved = components.remove(ci);
                    components[first].extend(moved);
                }
                components[first].push(idx);
            }
        }
    }

    let mut handles: Vec<SublatticeHandle> = if components.len() == 1 {
        // The vectors generate the lattice, so a single component spans it.
        vec![SublatticeHandle::new(g, IntegerMatrix::identity(n))]
    } else {
        components
            .iter()
            .map(|comp| {
                let mut span = SpanBuilder::new(n);
                for &m in comp {
                    span.add(&vectors[m].coords);
                }
                SublatticeHandle::new(g, span.basis.clone())
            })
            .collect()
    };
    handles.sort_by_key(|a| a.coords().row_vecs());

    // Components must be pairwise orthogonal and sum to the lattice with
    // index 1.
    let mut stacked = IntegerMatrix::zero(0, n);
    for h in &handles {
        stacked = IntegerMatrix::stack(&stacked, h.coords());
    }
    let idx = index_of_sublattice(&stacked)?;
    assert!(idx.is_one(), "decomposition must have index 1, got {idx}");
    for i in 0..handles.len() {
        for j in i + 1..handles.len() {
            let cross = handles[i]
                .coords()
                .mul(g)
                .mul(&handles[j].coords().transpose());
            assert!(cross.is_zero(), "summands must be orthogonal");
        }
    }
    Ok(handles)
}

/// Positive definite binary quadratic form with Gram matrix
/// `[[a, b], [b, c]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self, LatticeError> {
        if !a.is_positive() || (&a * &c - &b * &b) <= BigInt::zero() {
            return Err(LatticeError::NotPositiveDefinite);
        }
        Ok(Self { a, b, c })
    }

    pub fn from_gram(g: &IntegerMatrix) -> Result<Self, LatticeError> {
        assert_eq!((g.rows(), g.cols()), (2, 2));
        assert!(g.is_symmetric());
        Self::new(g.at(0, 0).clone(), g.at(0, 1).clone(), g.at(1, 1).clone())
    }

    pub fn gram(&self) -> IntegerMatrix {
        IntegerMatrix::from_rows(vec![
            vec![self.a.clone(), self.b.clone()],
            vec![self.b.clone(), self.c.clone()],
        ])
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.c - &self.b * &self.b
    }

    pub fn is_reduced(&self) -> bool {
        !self.b.is_negative() && &self.b * 2 <= self.a && self.a <= self.c
    }
}

/// Gauss reduction to the canonical representative with
/// `0 <= 2b <= a <= c`, together with a `GL_2(Z)` witness `u` satisfying
/// `u * G * u^T = G_reduced`.
pub fn reduce_binary(f: &BinaryForm) -> Result<(BinaryForm, IntegerMatrix), LatticeError> {
    if !f.a.is_positive() || f.det() <= BigInt::zero() {
        return Err(LatticeError::NotPositiveDefinite);
    }
    let (mut a, mut b, mut c) = (f.a.clone(), f.b.clone(), f.c.clone());
    let mut u = IntegerMatrix::identity(2);

    let apply = |u: &mut IntegerMatrix, t: &IntegerMatrix| {
        *u = t.mul(u);
    };

    loop {
        // Translate b into (-a/2, a/2].
        if &b * 2 > a || &b * 2 <= -&a {
            let q = round_half_down(&b, &a);
            // second basis vector -= q * first
            let t = IntegerMatrix::from_rows(vec![
                vec![BigInt::one(), BigInt::zero()],
                vec![-&q, BigInt::one()],
            ]);
            c = &c - &q * 2 * &b + &q * &q * &a;
            b -= &q * &a;
            apply(&mut u, &t);
        }
        if c < a {
            std::mem::swap(&mut a, &mut c);
            let t = IntegerMatrix::from_rows(vec![
                vec![BigInt::zero(), BigInt::one()],
                vec![BigInt::one(), BigInt::zero()],
            ]);
            apply(&mut u, &t);
            continue;
        }
        break;
    }
    if b.is_negative() {
        b = -b;
        let t = IntegerMatrix::from_rows(vec![
            vec![BigInt::one(), BigInt::zero()],
            vec![BigInt::zero(), -BigInt::one()],
        ]);
        apply(&mut u, &t);
    }
    let reduced = BinaryForm { a, b, c };
    debug_assert!(reduced.is_reduced());
    debug_assert_eq!(u.mul(&f.gram()).mul(&u.transpose()), reduced.gram());
    Ok((reduced, u))
}

/// Nearest integer to `b / a` for `a > 0`, rounding half toward negative so
/// the residue lands in `(-a/2, a/2]`.
fn round_half_down(b: &BigInt, a: &BigInt) -> BigInt {
    let num: BigInt = b * 2i32 + a - 1i32;
    num.div_floor(&(a * 2i32))
}

/// Integral isometry test for lattices of rank at most 8, by backtracking
/// over short vectors matching the Gram matrix column by column.
pub fn is_isometric_small(l1: &Lattice, l2: &Lattice) -> Result<bool, LatticeError> {
    let n = l1.rank();
    if n > 8 || l2.rank() > 8 {
        return Err(LatticeError::RankTooLarge(n.max(l2.rank())));
    }
    if n != l2.rank() || l1.det() != l2.det() {
        return Ok(false);
    }
    let g1 = l1.gram();
    let g2 = l2.gram();
    let mut pools: HashMap<BigInt, Vec<Vec<BigInt>>> = HashMap::new();
    for k in 0..n {
        let norm = g1.at(k, k).clone();
        if !pools.contains_key(&norm) {
            let vs = vectors_with_norm(g2, &norm).map_err(LatticeError::Linalg)?;
            pools.insert(norm.clone(), vs.into_iter().map(|v| v.coords).collect());
        }
    }

    fn search(
        k: usize,
        n: usize,
        g1: &IntegerMatrix,
        g2: &IntegerMatrix,
        pools: &HashMap<BigInt, Vec<Vec<BigInt>>>,
        images: &mut Vec<Vec<BigInt>>,
    ) -> bool {
        if k == n {
            return true;
        }
        let norm = g1.at(k, k);
        for cand in &pools[norm] {
            if (0..k).all(|j| &bilinear_value(g2, &images[j], cand) == g1.at(j, k)) {
                images.push(cand.clone());
                if search(k + 1, n, g1, g2, pools, images) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }

    let mut images = Vec::with_capacity(n);
    Ok(search(0, n, g1, g2, &pools, &mut images))
}

/// Witness variant of [`is_isometric_small`]: the rows of the returned
/// matrix are the images of the first lattice's basis inside the second.
pub fn isometry_witness(
    l1: &Lattice,
    l2: &Lattice,
) -> Result<Option<IntegerMatrix>, LatticeError> {
    if !is_isometric_small(l1, l2)? {
        return Ok(None);
    }
    // Re-run the search, recording images.
    let n = l1.rank();
    let g1 = l1.gram();
    let g2 = l2.gram();
    let mut pools: HashMap<BigInt, Vec<Vec<BigInt>>> = HashMap::new();
    for k in 0..n {
        let norm = g1.at(k, k).clone();
        pools.entry(norm.clone()).or_insert_with(|| {
            vectors_with_norm(g2, &norm)
                .expect("validated gram")
                .into_iter()
                .map(|v| v.coords)
                .collect()
        });
    }
    fn search(
        k: usize,
        n: usize,
        g1: &IntegerMatrix,
        g2: &IntegerMatrix,
        pools: &HashMap<BigInt, Vec<Vec<BigInt>>>,
        images: &mut Vec<Vec<BigInt>>,
    ) -> bool {
        if k == n {
            return true;
        }
        let norm = g1.at(k, k);
        for cand in &pools[norm] {
            if (0..k).all(|j| &bilinear_value(g2, &images[j], cand) == g1.at(j, k)) {
                images.push(cand.clone());
                if search(k + 1, n, g1, g2, pools, images) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }
    let mut images = Vec::with_capacity(n);
    let found = search(0, n, g1, g2, &pools, &mut images);
    debug_assert!(found);
    let w = IntegerMatrix::from_rows(images);
    debug_assert_eq!(w.mul(g2).mul(&w.transpose()), *g1);
    Ok(Some(w))
}

/// `q(x) = b(x, x) / 2` of a coordinate row; exact, panics if `b(x, x)` is
/// odd (impossible for even lattices).
pub fn q_value(g: &IntegerMatrix, x: &[BigInt]) -> BigInt {
    let v = gram_value(g, x);
    let (q, r) = v.div_rem(&BigInt::from(2));
    assert!(r.is_zero(), "norm of an even lattice vector must be even");
    q
}
