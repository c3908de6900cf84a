//! The binary Golay code of length 24 from the quadratic-residue
//! construction.
//!
//! Coordinates are indexed by the projective line over F_23: positions
//! 0..=22 are the field elements and position 23 is the point at infinity.
//! The length-23 quadratic-residue code is the cyclic code generated by a
//! degree-11 irreducible factor of (x^23 - 1)/(x - 1) over F_2; appending
//! an overall parity bit yields a [24, 12, 8] doubly-even self-dual code.
//!
//! Both coordinate maps x -> x + 1 (order 23, fixing infinity) and
//! x -> 2x (order 11, fixing 0 and infinity) permute the code, since 2 is a
//! quadratic residue mod 23; these permutations lift to automorphisms of
//! the Leech lattice.

/// Generator form of the [24, 12, 8] Golay code; rows are 24-bit masks,
/// bit `i` = coordinate `i`.
#[derive(Clone, Debug)]
pub struct GolayCode {
    rows: [u32; 12],
    /// Row-echelon basis for membership tests, indexed by leading bit.
    echelon: [u32; 24],
}

/// Position of the point at infinity.
pub const INFINITY: usize = 23;

fn poly_divides(g: u32, f: u64) -> bool {
    poly_rem(f, g) == 0
}

/// Remainder of `f` modulo `g` over F_2.
fn poly_rem(mut f: u64, g: u32) -> u64 {
    let dg = 31 - g.leading_zeros();
    while f != 0 {
        let df = 63 - f.leading_zeros();
        if df < dg {
            break;
        }
        f ^= (g as u64) << (df - dg);
    }
    f
}

/// Builds the extended quadratic-residue code of length 24.
pub fn build_golay_qr23() -> GolayCode {
    // (x^23 + 1) / (x + 1) = x^22 + x^21 + ... + 1 over F_2.
    let all_ones_23: u64 = (1u64 << 23) - 1;
    // Deterministic: smallest degree-11 factor with nonzero constant term.
    let g = (1u32 << 11..1u32 << 12)
        .filter(|g| g & 1 == 1)
        .find(|&g| poly_divides(g, all_ones_23))
        .expect("x^23 - 1 has a degree-11 factor over F_2");

    let mut rows = [0u32; 12];
    for (i, row) in rows.iter_mut().enumerate() {
        let word = g << i; // x^i * g(x), degree <= 22
        let parity = (word.count_ones() & 1) << INFINITY;
        *row = word | parity;
    }

    let mut echelon = [0u32; 24];
    for &row in &rows {
        insert_echelon(&mut echelon, row);
    }
    GolayCode { rows, echelon }
}

fn insert_echelon(echelon: &mut [u32; 24], mut w: u32) {
    while w != 0 {
        let lead = 31 - w.leading_zeros();
        if echelon[lead as usize] == 0 {
            echelon[lead as usize] = w;
            return;
        }
        w ^= echelon[lead as usize];
    }
}

impl GolayCode {
    /// The 12 generator rows as 24-bit masks.
    pub fn generator_rows(&self) -> &[u32; 12] {
        &self.rows
    }

    /// All 2^12 codewords, sorted.
    pub fn codewords(&self) -> Vec<u32> {
        let mut words = Vec::with_capacity(1 << 12);
        for m in 0u32..(1 << 12) {
            let mut w = 0u32;
            for (i, &row) in self.rows.iter().enumerate() {
                if m & (1 << i) != 0 {
                    w ^= row;
                }
            }
            words.push(w);
        }
        words.sort_unstable();
        words
    }

    pub fn contains(&self, word: u32) -> bool {
        let mut w = word;
        while w != 0 {
            let lead = (31 - w.leading_zeros()) as usize;
            if self.echelon[lead] == 0 {
                return false;
            }
            w ^= self.echelon[lead];
        }
        true
    }

    /// Weight distribution `A_0, ..., A_24`.
    pub fn weight_enumerator(&self) -> [usize; 25] {
        let mut a = [0usize; 25];
        for w in self.codewords() {
            a[w.count_ones() as usize] += 1;
        }
        a
    }

    /// Image of the code under a coordinate permutation `perm`
    /// (position `i` moves to `perm[i]`), as a sorted codeword set.
    pub fn permuted_codewords(&self, perm: &[usize; 24]) -> Vec<u32> {
        let mut words: Vec<u32> = self
            .codewords()
            .into_iter()
            .map(|w| {
                let mut out = 0u32;
                for (i, &pi) in perm.iter().enumerate() {
                    if w & (1 << i) != 0 {
                        out |= 1 << pi;
                    }
                }
                out
            })
            .collect();
        words.sort_unstable();
        words
    }
}

/// The permutation x -> x + 1 of P^1(F_23): a 23-cycle fixing infinity.
pub fn translation_perm() -> [usize; 24] {
    let mut p = [0usize; 24];
    for i in 0..23 {
        p[i] = (i + 1) % 23;
    }
    p[INFINITY] = INFINITY;
    p
}

/// The permutation x -> 2x of P^1(F_23): order 11, fixing 0 and infinity.
pub fn doubling_perm() -> [usize; 24] {
    let mut p = [0usize; 24];
    for i in 0..23 {
        p[i] = (2 * i) % 23;
    }
    p[INFINITY] = INFINITY;
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_enumerator_is_golay() {
        let code = build_golay_qr23();
        let a = code.weight_enumerator();
        assert_eq!(a[0], 1);
        assert_eq!(a[8], 759);
        assert_eq!(a[12], 2576);
        assert_eq!(a[16], 759);
        assert_eq!(a[24], 1);
        assert_eq!(a.iter().sum::<usize>(), 4096);
        // Doubly even: no other weights occur.
        for (w, &count) in a.iter().enumerate() {
            if ![0, 8, 12, 16, 24].contains(&w) {
                assert_eq!(count, 0, "weight {w}");
            }
        }
    }

    #[test]
    fn invariant_under_translation() {
        let code = build_golay_qr23();
        assert_eq!(code.permuted_codewords(&translation_perm()), code.codewords());
    }

    #[test]
    fn invariant_under_doubling() {
        let code = build_golay_qr23();
        assert_eq!(code.permuted_codewords(&doubling_perm()), code.codewords());
    }

    #[test]
    fn contains_all_ones() {
        let code = build_golay_qr23();
        assert!(code.contains((1 << 24) - 1));
    }

    #[test]
    fn membership_matches_codeword_set() {
        let code = build_golay_qr23();
        let words: std::collections::BTreeSet<u32> = code.codewords().into_iter().collect();
        assert_eq!(words.len(), 4096);
        for w in [0u32, 1, 0xfff, (1 << 24) - 1] {
            assert_eq!(code.contains(w), words.contains(&w));
        }
        for &w in words.iter().step_by(97) {
            assert!(code.contains(w));
        }
    }

    #[test]
    fn self_dual() {
        let code = build_golay_qr23();
        let words = code.codewords();
        for &a in words.iter().step_by(131) {
            for &b in words.iter().step_by(113) {
                assert_eq!((a & b).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn permutation_orders() {
        let t = translation_perm();
        let d = doubling_perm();
        let order = |p: &[usize; 24]| {
            let mut cur: Vec<usize> = (0..24).collect();
            for k in 1..=30 {
                cur = cur.iter().map(|&i| p[i]).collect();
                if cur.iter().enumerate().all(|(i, &v)| i == v) {
                    return k;
                }
            }
            0
        };
        assert_eq!(order(&t), 23);
        assert_eq!(order(&d), 11);
    }
}
