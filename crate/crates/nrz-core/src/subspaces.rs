//! Subgroups of the diagonal group `(Z/2)^n` as subspaces of `F_2^n`.
//!
//! Vectors are stored as `u64` bitmasks with coordinate `i` (1-indexed) at bit
//! `i - 1`; ambient dimension is capped at 64. Subspaces are kept in reduced
//! row-echelon form so that equality of representations is equality of
//! subspaces. Counting functions (`gaussian_binomial`, Galois numbers, even
//! proportions) are exact over big integers and independent of the ambient
//! cap.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cp2_trees::{self, CP2Tree, GeneratorChoice};
use crate::error::{Error, Result};
use crate::verdict::{RuleWitness, Status};

pub const MAX_N: usize = 64;

/// An `F_2`-linear subspace of `F_2^n` in canonical reduced row-echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace2 {
    n: usize,
    basis: Vec<u64>,
}

/// Hamming weight of a vector.
pub fn weight(v: u64) -> u32 {
    v.count_ones()
}

impl Subspace2 {
    /// Span of arbitrary vectors, reduced to canonical echelon form.
    pub fn from_vectors(n: usize, vectors: &[u64]) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::CapExceeded(format!("ambient dimension capped at {MAX_N}")));
        }
        let mask = mask_n(n);
        let mut basis: Vec<u64> = Vec::new();
        for &v in vectors {
            if v & !mask != 0 {
                return Err(Error::DimensionMismatch(format!(
                    "vector {v:#b} has bits beyond coordinate {n}"
                )));
            }
            insert_reduce(&mut basis, v);
        }
        Ok(Self { n, basis })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    /// Wrap rows already known to be in reduced echelon form (oracle use).
    pub(crate) fn from_echelon_unchecked(n: usize, basis: Vec<u64>) -> Self {
        Self { n, basis }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Canonical echelon basis, rows ordered by pivot position.
    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn contains(&self, v: u64) -> bool {
        let mut r = v;
        for &b in &self.basis {
            let pivot = b & b.wrapping_neg();
            if r & pivot != 0 {
                r ^= b;
            }
        }
        r == 0
    }

    /// All `2^rank` elements, zero first, in XOR-subset order.
    pub fn elements(&self) -> Vec<u64> {
        let r = self.basis.len();
        assert!(r < 32, "element enumeration capped at rank 31");
        let mut out = Vec::with_capacity(1 << r);
        for mask in 0u32..(1 << r) {
            let mut v = 0u64;
            for (i, &b) in self.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v ^= b;
                }
            }
            out.push(v);
        }
        out
    }

    /// True iff some nonzero element has even Hamming weight.
    ///
    /// Weight parity is linear, so its kernel within the subspace has
    /// codimension at most 1: rank >= 2 forces an even element, and at rank 1
    /// it is decided by the single generator.
    pub fn has_even_element(&self) -> bool {
        match self.rank() {
            0 => false,
            1 => weight(self.basis[0]) % 2 == 0,
            _ => true,
        }
    }

    /// Whether the weight-parity functional restricted to this subspace is
    /// identically zero (every element has even weight) or not.
    pub fn parity_functional_is_zero(&self) -> bool {
        self.basis.iter().all(|&b| weight(b) % 2 == 0)
    }

    /// Some nonzero element with an even weight, if one exists.
    pub fn find_even_element(&self) -> Option<u64> {
        self.elements()
            .into_iter()
            .find(|&v| v != 0 && weight(v) % 2 == 0)
    }

    /// Apply a coordinate permutation: `perm[i]` is the new (0-indexed)
    /// position of old coordinate `i`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch("permutation length != n".into()));
        }
        let rows: Vec<u64> = self
            .basis
            .iter()
            .map(|&b| {
                let mut v = 0u64;
                for i in 0..self.n {
                    if b >> i & 1 == 1 {
                        v |= 1 << perm[i];
                    }
                }
                v
            })
            .collect();
        Self::from_vectors(self.n, &rows)
    }

    /// Canonical key under coordinate permutations.
    ///
    /// Column `j` of the echelon basis matrix reads off a functional in
    /// `(F_2^rank)^*`; a coordinate permutation permutes these functionals and
    /// a change of basis acts on all of them simultaneously by `GL(rank, 2)`.
    /// The key is the lexicographically least sorted functional list over all
    /// basis changes; two subspaces are permutation-equivalent iff their keys
    /// agree. Exact and cheap for rank <= 4.
    pub fn perm_canonical_key(&self) -> Result<Vec<u16>> {
        let r = self.rank();
        if r > 4 {
            return Err(Error::CapExceeded(
                "permutation-equivalence canonicalization capped at rank 4".into(),
            ));
        }
        let cols: Vec<u16> = (0..self.n)
            .map(|j| {
                let mut f = 0u16;
                for (i, &b) in self.basis.iter().enumerate() {
                    if b >> j & 1 == 1 {
                        f |= 1 << i;
                    }
                }
                f
            })
            .collect();
        let mut best: Option<Vec<u16>> = None;
        for a in gl2_matrices(r) {
            let mut img: Vec<u16> = cols.iter().map(|&f| apply_gl(a, f)).collect();
            img.sort_unstable();
            if best.as_ref().map_or(true, |b| img < *b) {
                best = Some(img);
            }
        }
        Ok(best.unwrap_or_default())
    }

    /// Canonical representative of the permutation-equivalence class.
    pub fn perm_canonical_rep(&self) -> Result<Subspace2> {
        let key = self.perm_canonical_key()?;
        let r = self.rank();
        let rows: Vec<u64> = (0..r)
            .map(|i| {
                let mut v = 0u64;
                for (j, &f) in key.iter().enumerate() {
                    if f >> i & 1 == 1 {
                        v |= 1 << j;
                    }
                }
                v
            })
            .collect();
        Self::from_vectors(self.n, &rows)
    }

    /// Whether two subspaces differ by a coordinate permutation.
    pub fn perm_equivalent(&self, other: &Subspace2) -> Result<bool> {
        if self.n != other.n || self.rank() != other.rank() {
            return Ok(false);
        }
        Ok(self.perm_canonical_key()? == other.perm_canonical_key()?)
    }
}

fn mask_n(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn insert_reduce(basis: &mut Vec<u64>, mut v: u64) {
    for &b in basis.iter() {
        let pivot = b & b.wrapping_neg();
        if v & pivot != 0 {
            v ^= b;
        }
    }
    if v == 0 {
        return;
    }
    let pivot = v & v.wrapping_neg();
    for b in basis.iter_mut() {
        if *b & pivot != 0 {
            *b ^= v;
        }
    }
    basis.push(v);
    basis.sort_unstable_by_key(|b| b & b.wrapping_neg());
}

/// All invertible r x r matrices over `F_2`, each as `r` row masks.
fn gl2_matrices(r: usize) -> Vec<[u16; 4]> {
    assert!(r <= 4);
    let mut out = Vec::new();
    let total = 1u32 << (r * r);
    for code in 0..total {
        let mut rows = [0u16; 4];
        for i in 0..r {
            rows[i] = ((code >> (i * r)) & ((1 << r) - 1)) as u16;
        }
        if rank_of(&rows[..r]) == r {
            out.push(rows);
        }
    }
    out
}

fn rank_of(rows: &[u16]) -> usize {
    let mut basis: Vec<u16> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            let pivot = b & b.wrapping_neg();
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis.len()
}

fn apply_gl(a: [u16; 4], f: u16) -> u16 {
    let mut out = 0u16;
    for (i, &row) in a.iter().enumerate() {
        if ((row & f).count_ones() & 1) == 1 {
            out |= 1 << i;
        }
    }
    out
}

impl fmt::Display for Subspace2 {
    /// One 0/1 row per line, coordinate 1 leftmost.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, &b) in self.basis.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            for i in 0..self.n {
                write!(f, "{}", (b >> i) & 1)?;
            }
        }
        Ok(())
    }
}

/// Parse a subspace from 0/1 rows (one per line), auto-reduced to echelon
/// form. Row length fixes the ambient dimension.
pub fn parse_subspace(text: &str) -> Result<Subspace2> {
    let mut n = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let len = line.len();
        match n {
            None => n = Some(len),
            Some(m) if m != len => {
                return Err(Error::Parse(format!("row length {len} != {m}")));
            }
            _ => {}
        }
        let mut v = 0u64;
        for (i, ch) in line.chars().enumerate() {
            match ch {
                '1' => v |= 1 << i,
                '0' => {}
                other => return Err(Error::Parse(format!("bad bit {other:?}"))),
            }
        }
        rows.push(v);
    }
    let n = n.ok_or_else(|| Error::Parse("empty subspace input".into()))?;
    Subspace2::from_vectors(n, &rows)
}

// ---------------------------------------------------------------------------
// Counting.
// ---------------------------------------------------------------------------

/// Number of k-dimensional subspaces of `F_2^n`, by the exact product formula
/// `prod_{i=0}^{k-1} (2^{n-i} - 1) / (2^{k-i} - 1)`.
pub fn gaussian_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= (BigUint::one() << (n - i) as usize) - 1u8;
        den *= (BigUint::one() << (k - i) as usize) - 1u8;
    }
    num / den
}

/// Total number of subspaces of `F_2^n`.
pub fn galois_number(n: u64) -> BigUint {
    (0..=n).map(|k| gaussian_binomial(n, k)).sum()
}

/// Number of k-dimensional subspaces all of whose elements have even weight:
/// the even vectors form a hyperplane, so this is the subspace count of
/// `F_2^(n-1)`.
pub fn even_subspace_count(n: u64, k: u64) -> BigUint {
    if n == 0 {
        return if k == 0 { BigUint::one() } else { BigUint::from(0u8) };
    }
    gaussian_binomial(n - 1, k)
}

/// Exact proportion of k-dimensional subspaces that are even, equal to
/// `(2^(n-k) - 1) / (2^n - 1)`. Both routes are computed and compared.
pub fn even_proportion(n: u64, k: u64) -> Result<BigRational> {
    if k > n || n == 0 {
        return Err(Error::Precondition(format!("need 0 <= k <= n, n >= 1; got n={n} k={k}")));
    }
    let by_counts = BigRational::new(
        even_subspace_count(n, k).into(),
        gaussian_binomial(n, k).into(),
    );
    let closed = BigRational::new(
        ((BigUint::one() << (n - k) as usize) - 1u8).into(),
        ((BigUint::one() << n as usize) - 1u8).into(),
    );
    if by_counts != closed {
        return Err(Error::Internal(format!(
            "even proportion mismatch at n={n} k={k}"
        )));
    }
    Ok(closed)
}

/// A nonzero element of weight at most `2n/3`.
///
/// Requires rank >= 2: a single generator may violate the bound. At small
/// rank the full element list is scanned for the true minimum; otherwise two
/// long basis vectors are combined, which forces the bound.
pub fn find_short_element(h: &Subspace2) -> Result<u64> {
    if h.rank() < 2 {
        return Err(Error::Precondition(
            "short-element bound requires rank >= 2".into(),
        ));
    }
    let bound_ok = |v: u64| 3 * weight(v) as usize <= 2 * h.n();
    if h.rank() <= 20 {
        // Ties broken by coordinate-string order (coordinate 1 leftmost).
        let best = h
            .elements()
            .into_iter()
            .filter(|&v| v != 0)
            .min_by_key(|&v| (weight(v), v.reverse_bits()))
            .expect("rank >= 2 has nonzero elements");
        if !bound_ok(best) {
            return Err(Error::Internal(format!(
                "minimum weight {} exceeds 2n/3 in rank >= 2",
                weight(best)
            )));
        }
        return Ok(best);
    }
    let b1 = h.basis()[0];
    let b2 = h.basis()[1];
    for v in [b1, b2, b1 ^ b2] {
        if bound_ok(v) {
            return Ok(v);
        }
    }
    Err(Error::Internal("no short element found".into()))
}

// ---------------------------------------------------------------------------
// The diagonal verdict.
// ---------------------------------------------------------------------------

/// Outcome of the diagonal realizability decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalVerdict {
    pub status: Status,
    /// Rule that fired, with its witness, when the verdict is negative or a
    /// catalog match justified a positive rank-3 verdict.
    pub witness: Option<RuleWitness>,
    /// Construction certificate for positive verdicts.
    pub certificate: Option<(CP2Tree, GeneratorChoice)>,
}

/// Ambient size above which rank-3 subgroups are not checked against the
/// connect-sum catalog (the enumeration cost grows super-exponentially).
pub const RANK3_CATALOG_MAX_N: usize = 6;

/// Decide realizability of a diagonal subgroup `H <= (Z/2)^n`.
///
/// Rank <= 2 subgroups are realizable with an explicit connect-sum tree.
/// Rank >= 4 subgroups are obstructed when `n` is odd (rule `rank4_odd_n`),
/// when some element has `n - weight` odd (rule `rank4_odd_coweight`), or
/// when `2^rank > n * 2^8` (rule `rank_exceeds_log_bound`, checked in exact
/// integers). Rank 3 consults the tree catalog for small `n`; everything else
/// is `Unknown`.
pub fn verdict_diagonal(h: &Subspace2) -> Result<DiagonalVerdict> {
    let n = h.n();
    let rank = h.rank();

    if rank <= 2 {
        let (tree, gens) = cp2_trees::realize_rank2(h)?;
        return Ok(DiagonalVerdict {
            status: Status::Realizable,
            witness: None,
            certificate: Some((tree, gens)),
        });
    }

    if rank >= 4 {
        if n % 2 == 1 {
            return Ok(DiagonalVerdict {
                status: Status::NotRealizable,
                witness: Some(RuleWitness::new("rank4_odd_n", format!("rank {rank} >= 4 and n = {n} odd"))),
                certificate: None,
            });
        }
        if let Some(phi) = h.elements().into_iter().find(|&v| v != 0 && (n - weight(v) as usize) % 2 == 1) {
            return Ok(DiagonalVerdict {
                status: Status::NotRealizable,
                witness: Some(RuleWitness::new(
                    "rank4_odd_coweight",
                    format!("element {} has n - weight = {} odd", bits_string(phi, n), n - weight(phi) as usize),
                )),
                certificate: None,
            });
        }
        // rank > 8 + log2(n), compared exactly as 2^rank > n * 2^8.
        if rank > 8 && BigUint::one() << rank > BigUint::from(n as u64) << 8 {
            return Ok(DiagonalVerdict {
                status: Status::NotRealizable,
                witness: Some(RuleWitness::new(
                    "rank_exceeds_log_bound",
                    format!("2^{rank} > {n} * 2^8"),
                )),
                certificate: None,
            });
        }
        return Ok(DiagonalVerdict {
            status: Status::Unknown,
            witness: None,
            certificate: None,
        });
    }

    // rank == 3: consult the finite catalog of connect-sum constructions.
    if n <= RANK3_CATALOG_MAX_N {
        let catalog = cp2_trees::rank3_catalog(n, n)?;
        let key = h.perm_canonical_key()?;
        if let Some(entry) = catalog.iter().find(|e| e.key == key) {
            return Ok(DiagonalVerdict {
                status: Status::Realizable,
                witness: Some(RuleWitness::new(
                    "rank3_catalog",
                    format!("permutation-equivalent to catalog class {}", entry.representative),
                )),
                certificate: Some((entry.tree.clone(), entry.generators.clone())),
            });
        }
    }
    Ok(DiagonalVerdict {
        status: Status::Unknown,
        witness: None,
        certificate: None,
    })
}

pub fn bits_string(v: u64, n: usize) -> String {
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use num_traits::ToPrimitive;

    #[test]
    fn weight_and_even_elements() {
        // 10110 reads coordinate 1 leftmost.
        let v = parse_subspace("10110").unwrap().basis()[0];
        assert_eq!(weight(v), 3);

        let h = parse_subspace("11000\n00110").unwrap();
        assert!(h.has_even_element());
        let g = parse_subspace("10000").unwrap();
        assert!(!g.has_even_element());
    }

    #[test]
    fn echelon_is_canonical() {
        let a = Subspace2::from_vectors(4, &[0b0011, 0b0101]).unwrap();
        let b = Subspace2::from_vectors(4, &[0b0110, 0b0101, 0b0011]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.elements().len(), 4);
    }

    #[test]
    fn counting_matches_oracle() {
        for n in 0..=6u64 {
            let all = oracle::enum_subspaces(n as usize).unwrap();
            assert_eq!(BigUint::from(all.len() as u64), galois_number(n), "n = {n}");
            for k in 0..=n {
                let of_rank = all.iter().filter(|s| s.rank() as u64 == k).count();
                assert_eq!(BigUint::from(of_rank as u64), gaussian_binomial(n, k));
                let even = all
                    .iter()
                    .filter(|s| s.rank() as u64 == k && s.parity_functional_is_zero())
                    .count();
                assert_eq!(BigUint::from(even as u64), even_subspace_count(n, k));
            }
        }
        assert_eq!(gaussian_binomial(2, 1), BigUint::from(3u8));
        assert_eq!(gaussian_binomial(4, 2), BigUint::from(35u8));
        assert_eq!(galois_number(3), BigUint::from(16u8));
    }

    #[test]
    fn even_proportions() {
        let p41 = even_proportion(4, 1).unwrap();
        assert_eq!(p41, BigRational::new(7.into(), 15.into()));
        let p42 = even_proportion(4, 2).unwrap();
        assert_eq!(p42, BigRational::new(1.into(), 5.into()));
        assert_eq!(even_subspace_count(7, 0), BigUint::one());

        // Convergence up to 2^-k: within 1% by n = 60 for k <= 8, monotone.
        for k in 1..=8u64 {
            let target = 0.5f64.powi(k as i32);
            let mut prev = 0.0f64;
            for n in (k.max(9))..=60 {
                let p = even_proportion(n, k).unwrap();
                let v = p.to_f64().unwrap();
                assert!(v >= prev - 1e-15, "not monotone at n={n} k={k}");
                prev = v;
            }
            assert!((prev - target).abs() / target < 0.01, "k = {k}");
        }
    }

    #[test]
    fn short_elements() {
        // phi * psi = 000111 realizes the minimum weight 3 <= 2n/3 = 4.
        let h = parse_subspace("111111\n111000").unwrap();
        let v = find_short_element(&h).unwrap();
        assert!(h.contains(v) && v != 0);
        assert_eq!(weight(v), 3);

        let e12 = Subspace2::from_vectors(5, &[0b1, 0b10]).unwrap();
        assert_eq!(weight(find_short_element(&e12).unwrap()), 1);

        assert!(find_short_element(&parse_subspace("11111").unwrap()).is_err());

        // Returned weight matches the exhaustive minimum on random rank-2
        // subgroups at n = 9 and never exceeds 2n/3 = 6.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rows = [rng.gen::<u64>() & 0x1ff, rng.gen::<u64>() & 0x1ff];
            let h = Subspace2::from_vectors(9, &rows).unwrap();
            if h.rank() < 2 {
                continue;
            }
            let v = find_short_element(&h).unwrap();
            let min = h
                .elements()
                .into_iter()
                .filter(|&x| x != 0)
                .map(weight)
                .min()
                .unwrap();
            assert_eq!(weight(v), min);
            assert!(3 * weight(v) <= 2 * 9);
        }
    }

    #[test]
    fn odd_n_rank2_has_even_element() {
        // For odd n, any subgroup of rank >= 2 contains an even-weight
        // element (two odd-coweight elements sum to an even-coweight one).
        for h in oracle::enum_subspaces(5).unwrap() {
            if h.rank() >= 2 {
                assert!(h.find_even_element().is_some(), "H = {h}");
            }
        }
    }

    #[test]
    fn perm_equivalence() {
        let a = Subspace2::from_vectors(4, &[0b0001, 0b0010, 0b1100]).unwrap();
        let b = Subspace2::from_vectors(4, &[0b1000, 0b0100, 0b0011]).unwrap();
        assert!(a.perm_equivalent(&b).unwrap());
        let c = Subspace2::from_vectors(4, &[0b0001, 0b0110, 0b1100]).unwrap();
        assert!(!a.perm_equivalent(&c).unwrap());
        // Canonical representative is itself equivalent and idempotent.
        let rep = c.perm_canonical_rep().unwrap();
        assert!(rep.perm_equivalent(&c).unwrap());
        assert_eq!(rep.perm_canonical_rep().unwrap(), rep);
    }

    #[test]
    fn verdict_rules_fire() {
        // Rank <= 2 realizable with a certificate.
        let h = Subspace2::from_vectors(4, &[0b0011]).unwrap();
        let v = verdict_diagonal(&h).unwrap();
        assert_eq!(v.status, Status::Realizable);
        assert!(v.certificate.is_some());

        // Any rank-4 subgroup at odd n.
        let h = Subspace2::from_vectors(5, &[1, 2, 4, 8]).unwrap();
        let v = verdict_diagonal(&h).unwrap();
        assert_eq!(v.status, Status::NotRealizable);
        assert_eq!(v.witness.unwrap().rule, "rank4_odd_n");

        // e1..e4 in n = 6: e1 has n - weight = 5 odd.
        let h = Subspace2::from_vectors(6, &[1, 2, 4, 8]).unwrap();
        let v = verdict_diagonal(&h).unwrap();
        assert_eq!(v.status, Status::NotRealizable);
        assert_eq!(v.witness.unwrap().rule, "rank4_odd_coweight");

        // Rank exceeding 8 + log2 n: rank 14 in n = 32 (all-even basis so the
        // coweight rule stays silent; 2^14 > 32 * 256).
        let rows: Vec<u64> = (0..14).map(|i| 0b11u64 << (2 * i)).collect();
        let h = Subspace2::from_vectors(32, &rows).unwrap();
        let v = verdict_diagonal(&h).unwrap();
        assert_eq!(v.status, Status::NotRealizable);
        assert_eq!(v.witness.unwrap().rule, "rank_exceeds_log_bound");
    }
}
