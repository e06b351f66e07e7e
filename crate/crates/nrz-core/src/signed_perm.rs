//! Signed permutation matrices and their conjugacy invariants.
//!
//! An element of `O(n, Z)` is stored as an underlying permutation together
//! with one sign per source index: column `i` of the matrix has entry
//! `sign[i]` in row `image[i]`. Points are 1-indexed. Conjugacy classes are
//! classified by the signed cycle type (cycle lengths with a sign parity per
//! cycle).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `O(n, Z)` as a permutation with per-point signs.
///
/// Column convention: the matrix of `f` sends the basis vector `e_i` to
/// `sign[i] * e_{image[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    image: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPermutation {
    /// Build from 1-indexed images and signs in `{+1, -1}`.
    pub fn new(image: Vec<usize>, sign: Vec<i8>) -> Result<Self> {
        let n = image.len();
        if sign.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} images but {} signs",
                n,
                sign.len()
            )));
        }
        let mut seen = vec![false; n];
        for &j in &image {
            if j == 0 || j > n {
                return Err(Error::Parse(format!("image point {j} out of range 1..={n}")));
            }
            if seen[j - 1] {
                return Err(Error::Parse(format!("image point {j} repeated")));
            }
            seen[j - 1] = true;
        }
        if sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parse("signs must be +1 or -1".into()));
        }
        Ok(Self { image, sign })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (1..=n).collect(),
            sign: vec![1; n],
        }
    }

    /// The diagonal element with `-1` exactly at the listed 1-indexed points.
    pub fn diagonal(n: usize, minus: &[usize]) -> Result<Self> {
        let mut sign = vec![1i8; n];
        for &i in minus {
            if i == 0 || i > n {
                return Err(Error::Parse(format!("point {i} out of range 1..={n}")));
            }
            sign[i - 1] = -1;
        }
        Self::new((1..=n).collect(), sign)
    }

    /// Plain permutation matrix (all signs `+1`) from 1-indexed images.
    pub fn from_permutation(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        Self::new(image, vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// 1-indexed image of point `i`.
    pub fn image_of(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    /// Sign attached to source point `i`.
    pub fn sign_of(&self, i: usize) -> i8 {
        self.sign[i - 1]
    }

    /// Matrix form, `matrix[row][col]` with 0-indexed rows and columns.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[self.image[i] - 1][i] = self.sign[i] as i64;
        }
        m
    }

    /// Group law: the matrix of the result is `matrix(f) * matrix(g)`.
    pub fn compose(f: &Self, g: &Self) -> Result<Self> {
        if f.n() != g.n() {
            return Err(Error::DimensionMismatch(format!(
                "compose: {} vs {}",
                f.n(),
                g.n()
            )));
        }
        let n = f.n();
        let mut image = vec![0usize; n];
        let mut sign = vec![1i8; n];
        for i in 0..n {
            let j = g.image[i];
            image[i] = f.image[j - 1];
            sign[i] = g.sign[i] * f.sign[j - 1];
        }
        Ok(Self { image, sign })
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut image = vec![0usize; n];
        let mut sign = vec![1i8; n];
        for i in 0..n {
            let j = self.image[i];
            image[j - 1] = i + 1;
            sign[j - 1] = self.sign[i];
        }
        Self { image, sign }
    }

    /// Cycles of the underlying permutation, each listed from its smallest
    /// point, cycles ordered by smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p - 1] {
                seen[p - 1] = true;
                cycle.push(p);
                p = self.image[p - 1];
            }
            out.push(cycle);
        }
        out
    }

    /// Signed cycle type: the conjugacy invariant in `O(n, Z)`.
    pub fn signed_cycle_type(&self) -> SignedCycleType {
        let mut cycles = Vec::new();
        for c in self.cycles() {
            let minus = c.iter().filter(|&&p| self.sign[p - 1] == -1).count();
            cycles.push((c.len(), (minus % 2) as u8));
        }
        SignedCycleType::new(cycles)
    }

    /// Cycle type of the underlying permutation.
    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.cycles().iter().map(|c| c.len() as u64).collect()).expect("lengths >= 1")
    }

    /// Forget signs.
    pub fn project(&self) -> Self {
        Self {
            image: self.image.clone(),
            sign: vec![1; self.n()],
        }
    }

    /// Least `k >= 1` with `f^k = id`. A cycle of length `d` contributes `d`
    /// when its sign parity is even and `2d` otherwise; the order is the lcm.
    pub fn order(&self) -> u64 {
        let mut ord = 1u64;
        for (len, parity) in self.signed_cycle_type().cycles() {
            let contrib = if *parity == 0 { *len } else { 2 * *len };
            ord = ord.lcm(&(contrib as u64));
        }
        ord
    }

    /// True iff all cycle lengths are odd and every cycle has sign product +1.
    pub fn is_odd_order(&self) -> bool {
        self.signed_cycle_type()
            .cycles()
            .iter()
            .all(|&(len, parity)| len % 2 == 1 && parity == 0)
    }

    /// Number of `+1` entries on the diagonal of the matrix form.
    pub fn plus_diagonal_count(&self) -> usize {
        (1..=self.n())
            .filter(|&i| self.image[i - 1] == i && self.sign[i - 1] == 1)
            .count()
    }

    /// Number of `-1` entries on the diagonal of the matrix form.
    pub fn minus_diagonal_count(&self) -> usize {
        (1..=self.n())
            .filter(|&i| self.image[i - 1] == i && self.sign[i - 1] == -1)
            .count()
    }
}

/// Count of odd-order signed lifts of a permutation with the given cycle
/// type: `2^(n - c)` where `c` is the total number of cycles on `n` points.
///
/// Every cycle must have an even number of minus signs for odd order, which
/// leaves `2^(len-1)` sign patterns per cycle.
pub fn count_odd_order_lifts(ct: &CycleType, n: u64) -> Result<BigUint> {
    if ct.parts().iter().any(|p| p % 2 == 0) {
        return Err(Error::Precondition(
            "odd-order lift count needs all cycle lengths odd".into(),
        ));
    }
    let sum: u64 = ct.parts().iter().sum();
    if sum > n {
        return Err(Error::Precondition(format!(
            "cycle type uses {sum} points but ambient n = {n}"
        )));
    }
    // Implicit fixed points each form their own cycle.
    let c = ct.parts().len() as u64 + (n - sum);
    Ok(BigUint::from(1u8) << (n - c) as usize)
}

/// Multiset of (length, sign parity) pairs; equal types mean conjugate
/// elements of `O(n, Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedCycleType {
    cycles: Vec<(usize, u8)>,
}

impl SignedCycleType {
    pub fn new(mut cycles: Vec<(usize, u8)>) -> Self {
        cycles.sort_unstable();
        Self { cycles }
    }

    pub fn cycles(&self) -> &[(usize, u8)] {
        &self.cycles
    }

    pub fn n(&self) -> usize {
        self.cycles.iter().map(|&(len, _)| len).sum()
    }
}

/// A multiset of positive cycle lengths (or partition parts).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    parts: Vec<u64>,
}

impl CycleType {
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::Parse("cycle lengths must be positive".into()));
        }
        parts.sort_unstable();
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Sum of parts.
    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Multiplicity of part value `d`.
    pub fn count_of(&self, d: u64) -> u64 {
        self.parts.iter().filter(|&&p| p == d).count() as u64
    }

    /// Number of fixed points.
    pub fn fixed_points(&self) -> u64 {
        self.count_of(1)
    }

    /// Distinct part values in increasing order with multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<u64, u64> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0u64) += 1;
        }
        m
    }

    /// Order of a plain permutation with this cycle type.
    pub fn order(&self) -> u64 {
        self.parts.iter().fold(1u64, |acc, &p| acc.lcm(&p))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for CycleType {
    type Err = Error;

    /// Comma-separated parts, e.g. `3,5,7`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Result<Vec<u64>> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect();
        CycleType::new(parts?)
    }
}

impl fmt::Display for SignedPermutation {
    /// Text format `n; i1,...,in; s1,...,sn` with signs `+`/`-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.image.iter().map(|i| i.to_string()).collect();
        let signs: Vec<&str> = self
            .sign
            .iter()
            .map(|&s| if s == 1 { "+" } else { "-" })
            .collect();
        write!(f, "{}; {}; {}", self.n(), imgs.join(","), signs.join(","))
    }
}

impl FromStr for SignedPermutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(';').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(
                "expected `n; i1,...,in; s1,...,sn`".into(),
            ));
        }
        let n: usize = fields[0]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad n: {e}")))?;
        let image: Result<Vec<usize>> = fields[1]
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad image {t:?}: {e}")))
            })
            .collect();
        let image = image?;
        let sign: Result<Vec<i8>> = fields[2]
            .split(',')
            .map(|t| match t.trim() {
                "+" | "+1" | "1" => Ok(1),
                "-" | "-1" => Ok(-1),
                other => Err(Error::Parse(format!("bad sign {other:?}"))),
            })
            .collect();
        let sign = sign?;
        if image.len() != n {
            return Err(Error::Parse(format!(
                "n = {n} but {} image entries",
                image.len()
            )));
        }
        Self::new(image, sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn from_text(s: &str) -> SignedPermutation {
        s.parse().unwrap()
    }

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        let mut c = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    #[test]
    fn compose_matches_matrix_product() {
        let id3 = SignedPermutation::identity(3);
        assert_eq!(SignedPermutation::compose(&id3, &id3).unwrap(), id3);

        let swap = from_text("2; 2,1; +,+");
        assert_eq!(
            SignedPermutation::compose(&swap, &swap).unwrap(),
            SignedPermutation::identity(2)
        );

        // e1 -> e2, e2 -> -e1 squared is diag(-1, -1).
        let rot = from_text("2; 2,1; +,-");
        let sq = SignedPermutation::compose(&rot, &rot).unwrap();
        assert_eq!(sq, SignedPermutation::diagonal(2, &[1, 2]).unwrap());

        // Random pairs at n <= 8 agree with explicit matrix multiplication.
        for f in oracle::all_signed_perms(3).unwrap() {
            for g in oracle::all_signed_perms(3).unwrap() {
                let h = SignedPermutation::compose(&f, &g).unwrap();
                assert_eq!(h.matrix(), mat_mul(&f.matrix(), &g.matrix()));
            }
        }
    }

    #[test]
    fn order_and_odd_order() {
        assert_eq!(SignedPermutation::diagonal(2, &[1]).unwrap().order(), 2);
        // [[0,-1],[1,0]] is a 2-cycle with sign product -1.
        let rot = from_text("2; 2,1; +,-");
        assert_eq!(rot.order(), 4);
        let c3 = from_text("3; 2,3,1; +,+,+");
        assert_eq!(c3.order(), 3);
        assert!(c3.is_odd_order());
        let c3m = from_text("3; 2,3,1; -,+,+");
        assert_eq!(c3m.order(), 6);
        assert!(!c3m.is_odd_order());
        assert!(!from_text("2; 2,1; +,+").is_odd_order());

        // Orders computed by the cycle formula match iterated composition.
        for f in oracle::all_signed_perms(4).unwrap() {
            let mut g = f.clone();
            let mut k = 1u64;
            while g != SignedPermutation::identity(4) {
                g = SignedPermutation::compose(&f, &g).unwrap();
                k += 1;
            }
            assert_eq!(f.order(), k, "order mismatch for {f}");
            assert_eq!(f.is_odd_order(), k % 2 == 1);
        }
    }

    #[test]
    fn cycle_types() {
        let d = SignedPermutation::diagonal(3, &[1, 2]).unwrap();
        assert_eq!(
            d.signed_cycle_type(),
            SignedCycleType::new(vec![(1, 1), (1, 1), (1, 0)])
        );

        let c = from_text("3; 2,3,1; -,+,+");
        assert_eq!(c.signed_cycle_type(), SignedCycleType::new(vec![(3, 1)]));
        assert_eq!(c.order(), 6);

        let id5 = SignedPermutation::identity(5);
        assert_eq!(
            id5.signed_cycle_type(),
            SignedCycleType::new(vec![(1, 0); 5])
        );
        assert_eq!(id5.project(), id5);
    }

    #[test]
    fn signed_cycle_type_classifies_conjugacy_n3() {
        // Brute force: two elements are conjugate in O(n,Z) iff their signed
        // cycle types agree.
        let all = oracle::all_signed_perms(3).unwrap();
        for f in &all {
            for g in &all {
                let conjugate = all.iter().any(|h| {
                    let hf = SignedPermutation::compose(h, f).unwrap();
                    let hfh = SignedPermutation::compose(&hf, &h.inverse()).unwrap();
                    hfh == *g
                });
                assert_eq!(
                    conjugate,
                    f.signed_cycle_type() == g.signed_cycle_type(),
                    "conjugacy mismatch for {f} vs {g}"
                );
            }
        }
    }

    #[test]
    fn odd_order_lift_counts() {
        let id3 = CycleType::new(vec![1, 1, 1]).unwrap();
        assert_eq!(count_odd_order_lifts(&id3, 3).unwrap(), BigUint::from(1u8));
        let c3 = CycleType::new(vec![3]).unwrap();
        assert_eq!(count_odd_order_lifts(&c3, 3).unwrap(), BigUint::from(4u8));
        let c35 = CycleType::new(vec![3, 5]).unwrap();
        assert_eq!(count_odd_order_lifts(&c35, 8).unwrap(), BigUint::from(64u8));
        assert!(count_odd_order_lifts(&CycleType::new(vec![2]).unwrap(), 2).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["3; 2,3,1; -,+,+", "1; 1; +", "4; 2,1,4,3; +,-,-,+"] {
            let f = from_text(s);
            assert_eq!(f.to_string(), s);
        }
        assert!("3; 2,2,1; +,+,+".parse::<SignedPermutation>().is_err());
        assert!("3; 2,3,1; +,+".parse::<SignedPermutation>().is_err());
    }
}
