//! Brute-force ground truth for small instances.
//!
//! Everything here iterates explicitly and shares no logic with the formulas
//! it is used to validate. Hard caps are enforced: exceeding them is a usage
//! error, never a silent truncation.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signed_perm::{CycleType, SignedPermutation};
use crate::subspaces::Subspace2;

pub const MAX_PERM_N: usize = 9;
pub const MAX_SIGNED_N: usize = 8;
pub const MAX_SUBSPACE_N: usize = 8;
pub const MAX_PARTITION_N: u64 = 60;

/// All permutations of `{1..n}` as image vectors.
pub fn all_permutations(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_PERM_N {
        return Err(Error::CapExceeded(format!("permutations capped at n = {MAX_PERM_N}")));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=n).collect();
    heap_permutations(&mut cur, n, &mut out);
    Ok(out)
}

fn heap_permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// Every element of `O(n, Z)`, n <= 8 (there are `2^n * n!` of them).
pub fn all_signed_perms(n: usize) -> Result<Vec<SignedPermutation>> {
    if n > MAX_SIGNED_N {
        return Err(Error::CapExceeded(format!("signed perms capped at n = {MAX_SIGNED_N}")));
    }
    let perms = all_permutations(n)?;
    let mut out = Vec::with_capacity(perms.len() << n);
    for image in perms {
        for mask in 0u32..(1 << n) {
            let sign: Vec<i8> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            out.push(SignedPermutation::new(image.clone(), sign).expect("valid"));
        }
    }
    Ok(out)
}

/// Exhaustive odd-order census of `S_n`: total count and the count per cycle
/// type, by full iteration over all `n!` permutations.
pub fn enum_odd_order(n: usize) -> Result<(u64, BTreeMap<CycleType, u64>)> {
    let perms = all_permutations(n)?;
    let mut by_type: BTreeMap<CycleType, u64> = BTreeMap::new();
    let mut total = 0u64;
    for image in perms {
        let f = SignedPermutation::from_permutation(image)?;
        let ct = f.cycle_type();
        if ct.parts().iter().all(|&p| p % 2 == 1) {
            total += 1;
            *by_type.entry(ct).or_insert(0) += 1;
        }
    }
    Ok((total, by_type))
}

/// Odd-order census of `S_n` computed the second way: over cycle types with
/// multinomial class sizes. Must agree with [`enum_odd_order`].
pub fn enum_odd_order_by_class(n: u64) -> Result<(u64, BTreeMap<CycleType, u64>)> {
    if n > MAX_PERM_N as u64 {
        return Err(Error::CapExceeded(format!("capped at n = {MAX_PERM_N}")));
    }
    let mut by_type = BTreeMap::new();
    let mut total = 0u64;
    for parts in enum_partitions(n, &|p| p.iter().all(|&x| x % 2 == 1))? {
        let ct = CycleType::new(parts)?;
        let size = conjugacy_class_size(&ct, n);
        total += size;
        by_type.insert(ct, size);
    }
    Ok((total, by_type))
}

/// `n! / prod(d^{m_d} m_d!)` as a u64 (n <= 20 is safe).
pub fn conjugacy_class_size(ct: &CycleType, n: u64) -> u64 {
    assert!(ct.total() == n, "cycle type must fill n");
    assert!(n <= 20);
    let mut denom = 1u128;
    for (d, m) in ct.multiplicities() {
        for _ in 0..m {
            denom *= d as u128;
        }
        for i in 1..=m {
            denom *= i as u128;
        }
    }
    let mut num = 1u128;
    for i in 1..=n {
        num *= i as u128;
    }
    (num / denom) as u64
}

/// Count of odd-order elements of `O(n, Z)` by directly checking every sign
/// lift of every permutation.
pub fn enum_signed_odd_order(n: usize) -> Result<u64> {
    if n > MAX_SIGNED_N {
        return Err(Error::CapExceeded(format!("capped at n = {MAX_SIGNED_N}")));
    }
    let perms = all_permutations(n)?;
    let count = perms
        .par_iter()
        .map(|image| {
            let mut local = 0u64;
            for mask in 0u32..(1u32 << n) {
                let sign: Vec<i8> = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect();
                let f = SignedPermutation::new(image.clone(), sign).expect("valid");
                if f.is_odd_order() {
                    local += 1;
                }
            }
            local
        })
        .sum();
    Ok(count)
}

/// All subspaces of `F_2^n` by direct enumeration of reduced echelon bases.
pub fn enum_subspaces(n: usize) -> Result<Vec<Subspace2>> {
    if n > MAX_SUBSPACE_N {
        return Err(Error::CapExceeded(format!("subspace enumeration capped at n = {MAX_SUBSPACE_N}")));
    }
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(enum_subspaces_of_rank(n, k)?);
    }
    Ok(out)
}

/// All k-dimensional subspaces of `F_2^n`, one canonical echelon basis each.
///
/// Generates echelon matrices directly: choose pivot columns, then fill the
/// free entries (right of each pivot, outside other pivot columns) in all
/// ways. Independent of the Gaussian-binomial product formula.
pub fn enum_subspaces_of_rank(n: usize, k: usize) -> Result<Vec<Subspace2>> {
    if n > MAX_SUBSPACE_N {
        return Err(Error::CapExceeded(format!("subspace enumeration capped at n = {MAX_SUBSPACE_N}")));
    }
    if k > n {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    choose_pivots(n, k, 0, &mut pivots, &mut out);
    Ok(out)
}

fn choose_pivots(n: usize, k: usize, from: usize, pivots: &mut Vec<usize>, out: &mut Vec<Subspace2>) {
    if pivots.len() == k {
        fill_free_entries(n, pivots, out);
        return;
    }
    for col in from..n {
        pivots.push(col);
        choose_pivots(n, k, col + 1, pivots, out);
        pivots.pop();
    }
}

fn fill_free_entries(n: usize, pivots: &[usize], out: &mut Vec<Subspace2>) {
    let k = pivots.len();
    let is_pivot: Vec<bool> = (0..n).map(|c| pivots.contains(&c)).collect();
    // Free positions per row: columns right of the row's pivot that are not
    // pivot columns themselves.
    let free: Vec<Vec<usize>> = (0..k)
        .map(|r| ((pivots[r] + 1)..n).filter(|&c| !is_pivot[c]).collect())
        .collect();
    let total_free: usize = free.iter().map(|f| f.len()).sum();
    for mask in 0u64..(1u64 << total_free) {
        let mut rows = vec![0u64; k];
        let mut bit = 0;
        for r in 0..k {
            rows[r] |= 1 << pivots[r];
            for &c in &free[r] {
                if mask >> bit & 1 == 1 {
                    rows[r] |= 1 << c;
                }
                bit += 1;
            }
        }
        out.push(Subspace2::from_echelon_unchecked(n, rows));
    }
}

/// All partitions of `N` (parts in decreasing order) satisfying `pred`.
pub fn enum_partitions(n: u64, pred: &dyn Fn(&[u64]) -> bool) -> Result<Vec<Vec<u64>>> {
    if n > MAX_PARTITION_N {
        return Err(Error::CapExceeded(format!("partition enumeration capped at N = {MAX_PARTITION_N}")));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec_partitions(n, n, &mut cur, pred, &mut out);
    Ok(out)
}

fn rec_partitions(
    remaining: u64,
    max_part: u64,
    cur: &mut Vec<u64>,
    pred: &dyn Fn(&[u64]) -> bool,
    out: &mut Vec<Vec<u64>>,
) {
    if remaining == 0 {
        if pred(cur) {
            out.push(cur.clone());
        }
        return;
    }
    let top = remaining.min(max_part);
    for p in (1..=top).rev() {
        cur.push(p);
        rec_partitions(remaining - p, p, cur, pred, out);
        cur.pop();
    }
}

/// Sum over odd-order conjugacy classes of `class size * 2^(n - c)`; used to
/// cross-check [`enum_signed_odd_order`] against the lift-count formula.
pub fn signed_odd_order_by_class_formula(n: u64) -> Result<BigUint> {
    let (_, by_type) = enum_odd_order_by_class(n)?;
    let mut total = BigUint::from(0u8);
    for (ct, size) in by_type {
        let lifts = crate::signed_perm::count_odd_order_lifts(&ct, n)?;
        total += lifts * BigUint::from(size);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_order_counts_small() {
        assert_eq!(enum_odd_order(2).unwrap().0, 1);
        assert_eq!(enum_odd_order(4).unwrap().0, 9);
        let (a, ta) = enum_odd_order(7).unwrap();
        let (b, tb) = enum_odd_order_by_class(7).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }

    #[test]
    fn signed_odd_order_counts_small() {
        assert_eq!(enum_signed_odd_order(1).unwrap(), 1);
        assert_eq!(enum_signed_odd_order(3).unwrap(), 9);
        // Direct iteration agrees with the class-size/lift-count route.
        for n in 1..=5 {
            let direct = BigUint::from(enum_signed_odd_order(n).unwrap());
            let formula = signed_odd_order_by_class_formula(n as u64).unwrap();
            assert_eq!(direct, formula, "n = {n}");
        }
    }

    #[test]
    fn partition_enumeration() {
        let odd = enum_partitions(5, &|p| p.iter().all(|&x| x % 2 == 1)).unwrap();
        assert_eq!(odd.len(), 3);
        let ge3 = enum_partitions(9, &|p| p.iter().all(|&x| x % 2 == 1 && x >= 3)).unwrap();
        assert_eq!(ge3.len(), 2);
        let empty = enum_partitions(0, &|_| true).unwrap();
        assert_eq!(empty.len(), 1);
    }

    #[test]
    fn subspace_counts_small() {
        assert_eq!(enum_subspaces(3).unwrap().len(), 16);
        assert_eq!(enum_subspaces_of_rank(4, 2).unwrap().len(), 35);
    }
}
