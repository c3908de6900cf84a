//! Built-in lattices and their named automorphisms.
//!
//! The catalog covers the root lattices A1, A2, A6, the E8 lattice (as its
//! Cartan Gram matrix), E8 perp E8, and the Leech lattice constructed from
//! the binary Golay code. Named automorphisms of odd prime order ship with
//! several entries:
//!
//! * `A2` / `A6`: a Coxeter element (order 3 resp. 7), fixed point free;
//! * `E8`: the Coxeter element of an A6 root chain inside E8 (order 7,
//!   fixed rank 2);
//! * `Leech`: the coordinate permutations x -> x + 1 (order 23) and
//!   x -> 2x (order 11) of the projective line over F_23, written in the
//!   construction's Hermite basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::sync::OnceLock;

use crate::enumeration::{bilinear_value, short_vectors, vectors_with_norm};
use crate::error::LatticeError;
use crate::exact_linalg::{det_bareiss, hnf, IntegerMatrix};
use crate::golay::{build_golay_qr23, doubling_perm, translation_perm, GolayCode};
use crate::lattice::{direct_sum, Lattice};

/// An automorphism shipped with a catalog lattice. The matrix acts on
/// coordinate rows, `x -> x * U`.
#[derive(Clone, Debug)]
pub struct NamedAutomorphism {
    pub name: String,
    pub order: u64,
    pub matrix: IntegerMatrix,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub lattice: Lattice,
    pub automorphisms: Vec<NamedAutomorphism>,
}

/// Gram matrix of the root lattice A_n (Cartan matrix).
fn a_n_gram(n: usize) -> IntegerMatrix {
    let mut g = IntegerMatrix::zero(n, n);
    for i in 0..n {
        g.set(i, i, BigInt::from(2));
        if i + 1 < n {
            g.set(i, i + 1, BigInt::from(-1));
            g.set(i + 1, i, BigInt::from(-1));
        }
    }
    g
}

/// Gram matrix of E8: the A7 chain 0-1-2-3-4-5-6 with node 7 attached to
/// node 4 (arm lengths 1, 2, 4 around the branch node).
fn e8_gram() -> IntegerMatrix {
    let mut g = a_n_gram(8);
    // Break the chain edge 6-7 and attach node 7 to node 4.
    g.set(6, 7, BigInt::zero());
    g.set(7, 6, BigInt::zero());
    g.set(4, 7, BigInt::from(-1));
    g.set(7, 4, BigInt::from(-1));
    g
}

/// Reflection along a norm-2 root `r`: `x -> x - b(x, r) r` as a matrix
/// acting on coordinate rows.
fn reflection_matrix(gram: &IntegerMatrix, root: &[BigInt]) -> IntegerMatrix {
    let n = gram.rows();
    debug_assert_eq!(bilinear_value(gram, root, root), BigInt::from(2));
    let gr: Vec<BigInt> = (0..n)
        .map(|i| (0..n).map(|j| gram.at(i, j) * &root[j]).sum())
        .collect();
    let mut s = IntegerMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = s.at(i, j) - &gr[i] * &root[j];
            s.set(i, j, v);
        }
    }
    s
}

/// Finds a chain of `len` norm-2 roots with b(r_i, r_{i+1}) = -1 and all
/// other pairs orthogonal, by depth-first search in lexicographic order.
fn root_chain(gram: &IntegerMatrix, len: usize) -> Vec<Vec<BigInt>> {
    let roots: Vec<Vec<BigInt>> = short_vectors(gram, &BigInt::from(2))
        .expect("positive definite")
        .into_iter()
        .map(|v| v.coords)
        .collect();
    fn extend(
        gram: &IntegerMatrix,
        roots: &[Vec<BigInt>],
        chain: &mut Vec<Vec<BigInt>>,
        len: usize,
    ) -> bool {
        if chain.len() == len {
            return true;
        }
        for r in roots {
            let ok = chain.iter().enumerate().all(|(i, c)| {
                let want = if i + 1 == chain.len() { -1 } else { 0 };
                bilinear_value(gram, c, r) == BigInt::from(want)
            });
            if ok {
                chain.push(r.clone());
                if extend(gram, roots, chain, len) {
                    return true;
                }
                chain.pop();
            }
        }
        false
    }
    let mut chain = Vec::new();
    let found = extend(gram, &roots, &mut chain, len);
    assert!(found, "root chain of length {len} must exist");
    chain
}

/// Coxeter element of an A_{len} chain: product of the `len` reflections.
/// Its order is `len + 1`.
fn coxeter_element(gram: &IntegerMatrix, len: usize) -> IntegerMatrix {
    let chain = root_chain(gram, len);
    let mut u = IntegerMatrix::identity(gram.rows());
    for r in &chain {
        u = u.mul(&reflection_matrix(gram, r));
    }
    debug_assert_eq!(u.mul(gram).mul(&u.transpose()), *gram);
    debug_assert!(u.pow(len as u64 + 1).is_identity());
    u
}

/// Builds the Leech lattice from the Golay code, together with the
/// order-23 and order-11 coordinate-permutation automorphisms.
///
/// Model: integer vectors `x` in Z^24 with `b(x, y) = (x . y) / 8`, where
/// either all coordinates are even, `x/2 mod 2` is a codeword and
/// `sum(x) = 0 mod 8`, or all are odd, `(x-1)/2 mod 2` is a codeword and
/// `sum(x) = 4 mod 8`. The returned Gram matrix refers to the Hermite
/// basis of a fixed generator set, so it is bit-reproducible.
pub fn build_leech_from_golay() -> Result<CatalogEntry, LatticeError> {
    let code = build_golay_qr23();
    let mut gens: Vec<Vec<BigInt>> = Vec::with_capacity(37);
    // 4 * D24: differences and one sum of neighbouring unit vectors.
    for i in 0..23 {
        let mut v = vec![BigInt::zero(); 24];
        v[i] = BigInt::from(4);
        v[i + 1] = BigInt::from(-4);
        gens.push(v);
    }
    let mut v = vec![BigInt::zero(); 24];
    v[22] = BigInt::from(4);
    v[23] = BigInt::from(4);
    gens.push(v);
    // Doubled codewords.
    for &row in code.generator_rows() {
        let mut v = vec![BigInt::zero(); 24];
        for (i, vi) in v.iter_mut().enumerate() {
            if row & (1 << i) != 0 {
                *vi = BigInt::from(2);
            }
        }
        gens.push(v);
    }
    // Odd-coset representative (-3, 1, ..., 1).
    let mut v = vec![BigInt::one(); 24];
    v[0] = BigInt::from(-3);
    gens.push(v);

    let res = hnf(&IntegerMatrix::from_rows(gens));
    if res.rank != 24 {
        return Err(LatticeError::ConstructionSelfCheckFailed(format!(
            "generator rank {} != 24",
            res.rank
        )));
    }
    let basis = IntegerMatrix::from_rows((0..24).map(|i| res.h.row(i).to_vec()).collect());

    // Gram of b = (dot product) / 8.
    let dot = basis.mul(&basis.transpose());
    let eight = BigInt::from(8);
    let mut gram = IntegerMatrix::zero(24, 24);
    for i in 0..24 {
        for j in 0..24 {
            let (q, r) = dot.at(i, j).div_rem(&eight);
            if !r.is_zero() {
                return Err(LatticeError::ConstructionSelfCheckFailed(
                    "inner products are not divisible by 8".into(),
                ));
            }
            gram.set(i, j, q);
        }
    }
    for i in 0..24 {
        if gram.at(i, i).is_odd() {
            return Err(LatticeError::ConstructionSelfCheckFailed(
                "diagonal is not even".into(),
            ));
        }
    }
    let det = det_bareiss(&gram).expect("square");
    if !det.is_one() {
        return Err(LatticeError::ConstructionSelfCheckFailed(format!(
            "determinant {det} != 1"
        )));
    }
    if !vectors_with_norm(&gram, &BigInt::from(2))
        .map_err(LatticeError::Linalg)?
        .is_empty()
    {
        return Err(LatticeError::ConstructionSelfCheckFailed(
            "norm-2 vectors exist".into(),
        ));
    }
    let lattice = Lattice::new(gram.clone(), Some("Leech".into()))?;

    let basis_inv = basis
        .to_rational()
        .inverse()
        .expect("basis is invertible");
    let perm_matrix = |perm: &[usize; 24]| -> Result<IntegerMatrix, LatticeError> {
        let mut p = IntegerMatrix::zero(24, 24);
        for (i, &pi) in perm.iter().enumerate() {
            p.set(i, pi, BigInt::one());
        }
        let m = basis.to_rational().mul(&p.to_rational()).mul(&basis_inv);
        if !m.is_integral() {
            return Err(LatticeError::ConstructionSelfCheckFailed(
                "permutation does not preserve the lattice".into(),
            ));
        }
        let m = m.to_integer();
        if m.mul(&gram).mul(&m.transpose()) != gram {
            return Err(LatticeError::ConstructionSelfCheckFailed(
                "permutation is not an isometry".into(),
            ));
        }
        Ok(m)
    };

    let sigma = perm_matrix(&translation_perm())?;
    if !sigma.pow(23).is_identity() || sigma.is_identity() {
        return Err(LatticeError::ConstructionSelfCheckFailed(
            "translation automorphism does not have order 23".into(),
        ));
    }
    let tau = perm_matrix(&doubling_perm())?;
    if !tau.pow(11).is_identity() || tau.is_identity() {
        return Err(LatticeError::ConstructionSelfCheckFailed(
            "doubling automorphism does not have order 11".into(),
        ));
    }

    Ok(CatalogEntry {
        lattice,
        automorphisms: vec![
            NamedAutomorphism {
                name: "order23".into(),
                order: 23,
                matrix: sigma,
            },
            NamedAutomorphism {
                name: "order11".into(),
                order: 11,
                matrix: tau,
            },
        ],
    })
}

/// Access to the underlying Golay code of the Leech construction.
pub fn leech_golay_code() -> GolayCode {
    build_golay_qr23()
}

fn leech_entry() -> &'static Result<CatalogEntry, LatticeError> {
    static LEECH: OnceLock<Result<CatalogEntry, LatticeError>> = OnceLock::new();
    LEECH.get_or_init(build_leech_from_golay)
}

fn e8_entry() -> &'static CatalogEntry {
    static E8: OnceLock<CatalogEntry> = OnceLock::new();
    E8.get_or_init(|| {
        let gram = e8_gram();
        let cox = coxeter_element(&gram, 6);
        CatalogEntry {
            lattice: Lattice::new(gram, Some("E8".into())).expect("E8 gram is valid"),
            automorphisms: vec![NamedAutomorphism {
                name: "order7".into(),
                order: 7,
                matrix: cox,
            }],
        }
    })
}

/// Looks up a catalog lattice by name. Known names: `A1`, `A2`, `A6`,
/// `E8`, `E8+E8`, `Leech`.
pub fn catalog(name: &str) -> Result<CatalogEntry, LatticeError> {
    match name {
        "A1" => Ok(CatalogEntry {
            lattice: Lattice::new(a_n_gram(1), Some("A1".into()))?,
            automorphisms: vec![],
        }),
        "A2" => {
            let lattice = Lattice::new(a_n_gram(2), Some("A2".into()))?;
            let rot = IntegerMatrix::from_i64_rows(&[&[0, 1], &[-1, -1]]);
            debug_assert_eq!(rot.mul(lattice.gram()).mul(&rot.transpose()), *lattice.gram());
            Ok(CatalogEntry {
                lattice,
                automorphisms: vec![NamedAutomorphism {
                    name: "order3".into(),
                    order: 3,
                    matrix: rot,
                }],
            })
        }
        "A6" => {
            let gram = a_n_gram(6);
            let cox = coxeter_element(&gram, 6);
            Ok(CatalogEntry {
                lattice: Lattice::new(gram, Some("A6".into()))?,
                automorphisms: vec![NamedAutomorphism {
                    name: "order7".into(),
                    order: 7,
                    matrix: cox,
                }],
            })
        }
        "E8" => Ok(e8_entry().clone()),
        "E8+E8" => {
            let e8 = e8_entry();
            Ok(CatalogEntry {
                lattice: direct_sum(&e8.lattice, &e8.lattice).with_label("E8+E8"),
                automorphisms: vec![],
            })
        }
        "Leech" => leech_entry().clone(),
        other => Err(LatticeError::UnknownName(other.to_string())),
    }
}

/// Embeds an automorphism of the second summand of `L1 perp L2` as
/// `identity (+) u2`.
pub fn block_diag_automorphism(rank1: usize, u2: &IntegerMatrix) -> IntegerMatrix {
    IntegerMatrix::block_diag(&IntegerMatrix::identity(rank1), u2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::min_norm_and_kissing;
    use crate::lattice::validate_even_lattice;
    use num_bigint::BigUint;

    #[test]
    fn a2_gram_is_catalog_definition() {
        let entry = catalog("A2").unwrap();
        assert_eq!(
            entry.lattice.gram(),
            &IntegerMatrix::from_i64_rows(&[&[2, -1], &[-1, 2]])
        );
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            catalog("D4"),
            Err(LatticeError::UnknownName(_))
        ));
    }

    #[test]
    fn e8_is_even_unimodular() {
        let entry = catalog("E8").unwrap();
        let report = validate_even_lattice(entry.lattice.gram());
        assert!(report.is_valid());
        assert!(report.unimodular);
    }

    #[test]
    fn e8_minimum_and_kissing() {
        let entry = catalog("E8").unwrap();
        let (min, count) = min_norm_and_kissing(entry.lattice.gram()).unwrap();
        assert_eq!(min, BigInt::from(2));
        assert_eq!(count, BigUint::from(240u32));
    }

    #[test]
    fn e8_roots_match_box_scan() {
        // Independent oracle: box scan with the exact dual bound
        // |x_i| <= sqrt(bound * (G^-1)_ii) on the LLL-reduced Gram.
        let entry = catalog("E8").unwrap();
        let (g2, _) = crate::exact_linalg::lll_reduce(entry.lattice.gram()).unwrap();
        let inv = g2.to_rational().inverse().unwrap();
        let bound = num_rational::BigRational::from_integer(BigInt::from(2));
        let reach: i64 = (0..8)
            .map(|i| {
                let limit = &bound * inv.at(i, i);
                let mut r = 0i64;
                while num_rational::BigRational::from_integer(BigInt::from(r * r)) < limit {
                    r += 1;
                }
                r
            })
            .max()
            .unwrap();
        let mut count = 0usize;
        let mut x = vec![-reach; 8];
        'scan: loop {
            let coords: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            if crate::enumeration::gram_value(&g2, &coords) == BigInt::from(2) {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == 8 {
                    break 'scan;
                }
                if x[i] < reach {
                    x[i] += 1;
                    break;
                }
                x[i] = -reach;
                i += 1;
            }
        }
        assert_eq!(count, 240);
        assert_eq!(
            short_vectors(entry.lattice.gram(), &BigInt::from(2)).unwrap().len(),
            count
        );
    }

    #[test]
    fn e8_order7_automorphism() {
        let entry = catalog("E8").unwrap();
        let u = &entry.automorphisms[0].matrix;
        assert_eq!(entry.automorphisms[0].order, 7);
        assert!(!u.is_identity());
        assert!(u.pow(7).is_identity());
        assert_eq!(u.mul(entry.lattice.gram()).mul(&u.transpose()), *entry.lattice.gram());
    }

    #[test]
    fn a6_coxeter_has_order_7() {
        let entry = catalog("A6").unwrap();
        let u = &entry.automorphisms[0].matrix;
        assert!(u.pow(7).is_identity());
        assert!(!u.is_identity());
        assert_eq!(entry.lattice.det(), BigInt::from(7));
    }

    #[test]
    fn e8_plus_e8_shape() {
        let entry = catalog("E8+E8").unwrap();
        assert_eq!(entry.lattice.rank(), 16);
        assert!(entry.lattice.is_unimodular());
    }

    #[test]
    fn leech_self_checks() {
        let entry = catalog("Leech").unwrap();
        let l = &entry.lattice;
        assert_eq!(l.rank(), 24);
        let report = validate_even_lattice(l.gram());
        assert!(report.is_valid());
        assert!(report.unimodular);
        assert_eq!(entry.automorphisms.len(), 2);
        for aut in &entry.automorphisms {
            assert!(aut.matrix.pow(aut.order).is_identity());
            assert!(!aut.matrix.is_identity());
            assert_eq!(
                aut.matrix.mul(l.gram()).mul(&aut.matrix.transpose()),
                *l.gram()
            );
        }
    }
}
