//! Fixed-set arithmetic for prime-order actions.
//!
//! A prime-order isometry of the intersection lattice decomposes the lattice
//! into trivial (dimension 1), cyclotomic (dimension p-1) and regular
//! (dimension p) summands; their multiplicities `(t, c, r)` control the Betti
//! numbers, Euler characteristic and signature balance of any smooth fixed
//! set realizing the isometry, and — through the 2-adic orbit-size bound —
//! cap the rank of a realizable diagonal 2-group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signed_perm::SignedPermutation;

/// Multiplicities of trivial / cyclotomic / regular summands for a
/// prime-order action on the rank-n lattice: `t + c(p-1) + rp = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdmondsInvariants {
    pub p: u64,
    pub t: u64,
    pub c: u64,
    pub r: u64,
}

impl EdmondsInvariants {
    pub fn lattice_rank(&self) -> u64 {
        self.t + self.c * (self.p - 1) + self.r * self.p
    }
}

/// Decompose the action of a prime-order signed permutation.
///
/// For `p = 2`: `t` counts `+1` diagonal entries, `c` counts `-1` diagonal
/// entries and `r` counts 2-cycles (an involution's 2-cycles all have sign
/// product `+1` and are conjugate to the plain swap). For odd `p` the element
/// is conjugate to a plain permutation, so `t` is the number of fixed points,
/// `c = 0` and `r` the number of p-cycles.
pub fn edmonds_invariants(f: &SignedPermutation, p: u64) -> Result<EdmondsInvariants> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if f.order() != p {
        return Err(Error::Precondition(format!(
            "element has order {}, expected {p}",
            f.order()
        )));
    }
    let inv = if p == 2 {
        let t = f.plus_diagonal_count() as u64;
        let c = f.minus_diagonal_count() as u64;
        let r = f
            .signed_cycle_type()
            .cycles()
            .iter()
            .filter(|&&(len, _)| len == 2)
            .count() as u64;
        EdmondsInvariants { p, t, c, r }
    } else {
        let ct = f.cycle_type();
        EdmondsInvariants {
            p,
            t: ct.fixed_points(),
            c: 0,
            r: ct.count_of(p),
        }
    };
    if inv.lattice_rank() != f.n() as u64 {
        return Err(Error::Internal(format!(
            "summand dimensions {} != n = {}",
            inv.lattice_rank(),
            f.n()
        )));
    }
    Ok(inv)
}

/// Euler characteristic of the fixed set: `t - c + 2`. Nonzero forces the
/// fixed set to be nonempty.
pub fn euler_char_fixed(inv: &EdmondsInvariants) -> i64 {
    inv.t as i64 - inv.c as i64 + 2
}

/// All `(k, s)` with `k` isolated points and `s` fixed surfaces compatible
/// with the Betti constraints: `k + 2s = t + 2`, and surfaces must exist to
/// carry the cyclotomic Betti number (`s = 0` forces `c = 0`).
pub fn feasible_fixed_profiles(inv: &EdmondsInvariants) -> Vec<(u64, u64)> {
    let total = inv.t + 2;
    let mut out = Vec::new();
    for s in 0..=(total / 2) {
        let k = total - 2 * s;
        if s == 0 && inv.c > 0 {
            continue;
        }
        out.push((k, s));
    }
    out.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    out
}

/// Required total self-intersection of the fixed surfaces of an involution:
/// `2(t + r) - n` (point defects vanish at p = 2, so the signature identity
/// forces the surface defects to carry the whole balance).
pub fn gsig_balance_involution(f: &SignedPermutation) -> Result<i64> {
    let inv = edmonds_invariants(f, 2)?;
    Ok(2 * (inv.t + inv.r) as i64 - f.n() as i64)
}

/// The arithmetic contradiction behind "no free involutions".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeInvolutionReport {
    pub invariants: EdmondsInvariants,
    /// Freeness would force `chi(fixed set) = 0`, i.e. `c = t + 2`.
    pub euler_constraint_rhs: u64,
    /// Multiplicativity of signature in free double covers would force
    /// `t + r = n / 2`.
    pub signature_constraint_holds: bool,
    /// `n = t + c + 2r`; substituting `c = t + 2` gives `n = 2(t + r + 1)`,
    /// which contradicts `t + r = n/2`.
    pub derived_identity: u64,
    pub jointly_unsatisfiable: bool,
}

/// Report why no involution can act freely: the Euler and signature
/// constraints are jointly unsatisfiable for every `(t, c, r)` with
/// `t + c + 2r = n`.
pub fn free_involution_report(f: &SignedPermutation) -> Result<FreeInvolutionReport> {
    let inv = edmonds_invariants(f, 2)?;
    let n = f.n() as u64;
    let derived = 2 * (inv.t + inv.r + 1);
    // chi = 0 needs c = t + 2; signature needs t + r = n/2 (so n even).
    // Together: n = t + c + 2r = 2(t + r + 1) = n + 2, absurd.
    let signature_ok = n % 2 == 0 && inv.t + inv.r == n / 2;
    let euler_ok = inv.c == inv.t + 2;
    let jointly_unsatisfiable = !(signature_ok && euler_ok) || derived != n;
    if !jointly_unsatisfiable {
        return Err(Error::Internal(
            "free involution constraints reported satisfiable".into(),
        ));
    }
    Ok(FreeInvolutionReport {
        invariants: inv,
        euler_constraint_rhs: inv.t + 2,
        signature_constraint_holds: signature_ok,
        derived_identity: derived,
        jointly_unsatisfiable,
    })
}

/// Types of fixed components that must occur for a realizable diagonal
/// 2-group of large rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedComponent {
    Point,
    Sphere,
    ProjectivePlane,
    Torus,
    KleinBottle,
    GenusTwo,
    NonOrientable3,
    NonOrientable4,
}

impl FixedComponent {
    /// Upper bound `c(kind)` such that `(Z/2)^(c-1)` cannot act faithfully on
    /// the component type. Entries for the sphere and torus come from
    /// uniformization (ranks 2 and 4); non-orientable types pass to the
    /// orientation double cover and may gain one generator; genus two uses
    /// the 84(g-1) isometry bound. The non-orientable genus 3 and 4 entries
    /// are conservative upper bounds, not known to be sharp.
    pub fn rank_constant(self) -> u32 {
        match self {
            FixedComponent::Point => 4,
            FixedComponent::Sphere => 3,
            FixedComponent::ProjectivePlane => 4,
            FixedComponent::Torus => 5,
            FixedComponent::KleinBottle => 6,
            FixedComponent::GenusTwo => 7,
            FixedComponent::NonOrientable3 => 8,
            FixedComponent::NonOrientable4 => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FixedComponent::Point => "point",
            FixedComponent::Sphere => "S2",
            FixedComponent::ProjectivePlane => "RP2",
            FixedComponent::Torus => "T2",
            FixedComponent::KleinBottle => "N2",
            FixedComponent::GenusTwo => "genus2",
            FixedComponent::NonOrientable3 => "N3",
            FixedComponent::NonOrientable4 => "N4",
        }
    }
}

/// 2-adic valuation.
pub fn v2(k: u64) -> u32 {
    assert!(k > 0, "v2 of 0");
    k.trailing_zeros()
}

/// Strict upper bound `c(kind) + v2(k)` on the rank of a realizable diagonal
/// 2-group, given that some element's fixed set contains `k` components of
/// the given type.
pub fn rank_bound_from_fixed_data(kind: FixedComponent, k: u64) -> Result<u32> {
    if k == 0 {
        return Err(Error::Precondition("component count must be positive".into()));
    }
    Ok(kind.rank_constant() + v2(k))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::signed_perm::SignedPermutation;

    #[test]
    fn edmonds_examples() {
        let d = SignedPermutation::diagonal(3, &[1, 2]).unwrap();
        let inv = edmonds_invariants(&d, 2).unwrap();
        assert_eq!((inv.t, inv.c, inv.r), (1, 2, 0));

        // Transposition in S_8.
        let mut image: Vec<usize> = (1..=8).collect();
        image.swap(0, 1);
        let tr = SignedPermutation::from_permutation(image).unwrap();
        let inv = edmonds_invariants(&tr, 2).unwrap();
        assert_eq!((inv.t, inv.c, inv.r), (6, 0, 1));

        let c3 = SignedPermutation::from_permutation(vec![2, 3, 1]).unwrap();
        let inv = edmonds_invariants(&c3, 3).unwrap();
        assert_eq!((inv.t, inv.c, inv.r), (0, 0, 1));

        assert!(edmonds_invariants(&c3, 2).is_err());
    }

    #[test]
    fn dimension_identity_exhaustive() {
        // t + c(p-1) + rp = n over all prime-order elements, n <= 5.
        for n in 1..=5 {
            for f in oracle::all_signed_perms(n).unwrap() {
                let ord = f.order();
                if is_prime(ord) {
                    let inv = edmonds_invariants(&f, ord).unwrap();
                    assert_eq!(inv.lattice_rank(), n as u64);
                }
            }
        }
    }

    #[test]
    fn euler_characteristic() {
        let mk = |t, c| EdmondsInvariants { p: 2, t, c, r: 0 };
        assert_eq!(euler_char_fixed(&mk(6, 0)), 8);
        assert_eq!(euler_char_fixed(&mk(0, 2)), 0);
        assert_eq!(
            euler_char_fixed(&EdmondsInvariants { p: 3, t: 0, c: 0, r: 2 }),
            2
        );
    }

    #[test]
    fn profiles() {
        let mk = |t, c| EdmondsInvariants { p: 2, t, c, r: 0 };
        assert_eq!(
            feasible_fixed_profiles(&mk(6, 0)),
            vec![(8, 0), (6, 1), (4, 2), (2, 3), (0, 4)]
        );
        assert_eq!(feasible_fixed_profiles(&mk(1, 0)), vec![(3, 0), (1, 1)]);
        // c > 0 removes the surface-free profile.
        assert_eq!(feasible_fixed_profiles(&mk(0, 3)), vec![(0, 1)]);
    }

    #[test]
    fn involution_balance() {
        let mut image: Vec<usize> = (1..=8).collect();
        image.swap(0, 1);
        let tr = SignedPermutation::from_permutation(image).unwrap();
        assert_eq!(gsig_balance_involution(&tr).unwrap(), 6);

        let neg = SignedPermutation::diagonal(5, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(gsig_balance_involution(&neg).unwrap(), -5);

        let d = SignedPermutation::diagonal(2, &[1]).unwrap();
        assert_eq!(gsig_balance_involution(&d).unwrap(), 0);

        // Two routes agree: 2(t + r) - n = n - 2(c + r).
        for n in 1..=5 {
            for f in oracle::all_signed_perms(n).unwrap() {
                if f.order() == 2 {
                    let inv = edmonds_invariants(&f, 2).unwrap();
                    let b = gsig_balance_involution(&f).unwrap();
                    assert_eq!(b, n as i64 - 2 * (inv.c + inv.r) as i64);
                }
            }
        }
    }

    #[test]
    fn no_free_involutions_exhaustive() {
        for n in 1..=6 {
            for f in oracle::all_signed_perms(n).unwrap() {
                if f.order() == 2 {
                    let rep = free_involution_report(&f).unwrap();
                    assert!(rep.jointly_unsatisfiable, "free involution at {f}");
                }
            }
        }
    }

    #[test]
    fn rank_bounds() {
        assert_eq!(rank_bound_from_fixed_data(FixedComponent::Point, 1).unwrap(), 4);
        assert_eq!(rank_bound_from_fixed_data(FixedComponent::Point, 4).unwrap(), 6);
        assert_eq!(rank_bound_from_fixed_data(FixedComponent::Sphere, 2).unwrap(), 4);
        assert!(rank_bound_from_fixed_data(FixedComponent::Torus, 0).is_err());
    }

    #[test]
    fn v2_matches_halving() {
        for k in 1..=100_000u64 {
            let mut m = k;
            let mut count = 0;
            while m % 2 == 0 {
                m /= 2;
                count += 1;
            }
            assert_eq!(v2(k), count);
        }
    }
}
