//! Obstructions and certificates for odd-order cycle types.
//!
//! A realizable odd-order permutation action can always be rebuilt as a
//! standard-linear action: an equivariant connect sum of linearly-acted
//! copies of `CP^2` arranged over either a rotated 4-sphere or a core of
//! homologically fixed copies. That normal form pins down the possible
//! stabilizer lattices, which yields a battery of necessary conditions on the
//! cycle type alone:
//!
//! - `check_mu`: at most `max(2, 3 C_1)` divisibility-maximal proper
//!   stabilizer orders;
//! - `check_prime_cycles`: the same bound for the count of small odd primes
//!   occurring as cycle lengths (primes up to `(ln n)^2`);
//! - `check_two_min_primes`: with no fixed points, two minimal prime lengths
//!   `p, q` force every other length to be divisible by `pq`;
//! - `check_357`: with exactly one fixed point, lengths 3, 5, 7 cannot occur
//!   together.
//!
//! The constructive side is a bounded search over a simplified
//! standard-linear tree calculus ([`SlTree`]); found trees are certificates,
//! and failure to find one is never reported as non-realizability.

use std::collections::BTreeSet;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_points::is_prime;
use crate::gsig::RotationNumbers;
use crate::signed_perm::CycleType;
use crate::verdict::{RuleWitness, Status};

// ---------------------------------------------------------------------------
// Stabilizer-order calculus.
// ---------------------------------------------------------------------------

/// Orders of the cyclic-subgroup stabilizers occurring in a permutation
/// module: a cycle of length `d` contributes the subgroup of order `m/d`.
/// Containment of subgroups of `Z/m` is divisibility of orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerSet {
    pub m: u64,
    pub orders: BTreeSet<u64>,
}

/// Stabilizer orders of a faithful odd-order cycle type; requires every part
/// to divide `m` and `m = lcm(parts)`.
pub fn stabilizer_set(ct: &CycleType, m: u64) -> Result<StabilizerSet> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::Precondition("order m must be odd and positive".into()));
    }
    let lcm = ct.parts().iter().fold(1u64, |acc, &p| acc.lcm(&p));
    if lcm != m || ct.parts().iter().any(|&p| m % p != 0) {
        return Err(Error::Precondition(format!(
            "cycle type {ct} is not a faithful type of order {m}"
        )));
    }
    let orders = ct.parts().iter().map(|&d| m / d).collect();
    Ok(StabilizerSet { m, orders })
}

/// Number of divisibility-maximal proper stabilizer orders.
pub fn mu(ct: &CycleType, m: u64) -> Result<u64> {
    let s = stabilizer_set(ct, m)?;
    let proper: Vec<u64> = s.orders.iter().copied().filter(|&o| o != m).collect();
    let count = proper
        .iter()
        .filter(|&&o| !proper.iter().any(|&other| other != o && other % o == 0))
        .count();
    Ok(count as u64)
}

/// `mu <= max(2, 3 C_1)`; a failure witnesses non-realizability.
pub fn check_mu(ct: &CycleType) -> Result<Option<RuleWitness>> {
    let m = faithful_order(ct)?;
    let value = mu(ct, m)?;
    let bound = 2.max(3 * ct.fixed_points());
    if value > bound {
        Ok(Some(RuleWitness::new(
            "max_stabilizers",
            format!(
                "mu = {value} > max(2, 3*{}) = {bound} at order m = {m}",
                ct.fixed_points()
            ),
        )))
    } else {
        Ok(None)
    }
}

/// Count of odd primes `p <= (ln n)^2` occurring as cycle lengths (natural
/// logarithm).
pub fn prime_cycle_count(ct: &CycleType, n: u64) -> u64 {
    let threshold = (n as f64).ln().powi(2);
    ct.multiplicities()
        .keys()
        .filter(|&&p| p > 2 && p % 2 == 1 && is_prime(p) && (p as f64) <= threshold)
        .count() as u64
}

/// `P_n <= max(2, 3 C_1)`; a failure witnesses non-realizability.
pub fn check_prime_cycles(ct: &CycleType, n: u64) -> Result<Option<RuleWitness>> {
    faithful_order(ct)?;
    let value = prime_cycle_count(ct, n);
    let bound = 2.max(3 * ct.fixed_points());
    if value > bound {
        Ok(Some(RuleWitness::new(
            "small_prime_cycles",
            format!("{value} odd primes <= (ln {n})^2 occur as lengths, bound {bound}"),
        )))
    } else {
        Ok(None)
    }
}

/// With no fixed points and two distinct prime lengths (automatically
/// divisibility-minimal), every other length must be divisible by their
/// product.
pub fn check_two_min_primes(ct: &CycleType) -> Result<Option<RuleWitness>> {
    faithful_order(ct)?;
    if ct.fixed_points() != 0 {
        return Ok(None);
    }
    let primes: Vec<u64> = ct
        .multiplicities()
        .keys()
        .copied()
        .filter(|&p| p > 1 && is_prime(p))
        .collect();
    if primes.len() < 2 {
        return Ok(None);
    }
    let (p, q) = (primes[0], primes[1]);
    for &len in ct.multiplicities().keys() {
        if len == p || len == q {
            continue;
        }
        if len % (p * q) != 0 {
            return Ok(Some(RuleWitness::new(
                "two_min_primes",
                format!(
                    "minimal primes {p}, {q} but length {len} is not divisible by {}",
                    p * q
                ),
            )));
        }
    }
    Ok(None)
}

/// With exactly one fixed point, lengths 3, 5, 7 cannot occur together (an
/// element of order 3 and one of order 5 in a cyclic group differ by an
/// element of order 15, never 7).
pub fn check_357(ct: &CycleType) -> Result<Option<RuleWitness>> {
    faithful_order(ct)?;
    if ct.fixed_points() != 1 {
        return Ok(None);
    }
    if [3u64, 5, 7].iter().all(|&p| ct.count_of(p) > 0) {
        Ok(Some(RuleWitness::new(
            "single_fixed_357",
            "one fixed point with cycle lengths 3, 5 and 7 simultaneously".to_string(),
        )))
    } else {
        Ok(None)
    }
}

fn faithful_order(ct: &CycleType) -> Result<u64> {
    if ct.parts().iter().any(|&p| p % 2 == 0) {
        return Err(Error::Precondition(format!("cycle type {ct} has an even part")));
    }
    Ok(ct.parts().iter().fold(1u64, |acc, &p| acc.lcm(&p)))
}

// ---------------------------------------------------------------------------
// Orbit calculus of linear actions.
// ---------------------------------------------------------------------------

/// Orbit sizes of a standard linear action on `CP^2` with tangent weights
/// `(a, b)` at one coordinate point: `{1, m, m/(a,m), m/(b,m), m/(a-b,m)}`.
pub fn orbit_sizes_cp2(rn: &RotationNumbers) -> BTreeSet<u64> {
    let m = rn.m;
    let red = |x: i64| x.rem_euclid(m as i64) as u64;
    let o = |x: u64| if x == 0 { 1 } else { m / x.gcd(&m) };
    [1, m, o(red(rn.a)), o(red(rn.b)), o(red(rn.a - rn.b))]
        .into_iter()
        .collect()
}

/// Initial nontrivial orbit lengths of the rotation with weights `(a, b)` on
/// the 4-sphere: `{o(a), o(b), lcm}`; faithfulness forces `lcm = m`.
pub fn s4_initial_orbits(a: u64, b: u64, m: u64) -> Result<BTreeSet<u64>> {
    if m < 2 || a % m == 0 || b % m == 0 {
        return Err(Error::Precondition("sphere rotation weights must be nonzero".into()));
    }
    let oa = m / a.gcd(&m);
    let ob = m / b.gcd(&m);
    if oa.lcm(&ob) != m {
        return Err(Error::Precondition(format!(
            "weights ({a}, {b}) mod {m} do not generate a faithful rotation"
        )));
    }
    Ok([oa, ob, m].into_iter().collect())
}

// ---------------------------------------------------------------------------
// Standard-linear trees.
// ---------------------------------------------------------------------------

/// Root of a standard-linear tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlRoot {
    /// Orthogonal rotation on the 4-sphere with plane weights `(a, b)`.
    S4 { a: u64, b: u64 },
    /// The tree starts directly at a homologically fixed copy (node 0).
    Core,
}

/// One orbit of glued `CP^2` copies (`orbit_len = 1` means a single central
/// copy). `weights` are the stabilizer weights mod `stab_order` on one
/// representative copy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlNode {
    /// Parent node index; `None` attaches to the root (sphere strata or, for
    /// central nodes, a pole of the sphere rotation).
    pub parent: Option<usize>,
    pub orbit_len: u64,
    pub stab_order: u64,
    pub weights: (u64, u64),
}

impl SlNode {
    pub fn is_central(&self) -> bool {
        self.orbit_len == 1
    }
}

/// A standard-linear tree over `Z/m`: the bookkeeping normal form of an
/// equivariant connect sum of linear `CP^2` actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlTree {
    pub m: u64,
    pub root: SlRoot,
    pub nodes: Vec<SlNode>,
}

impl SlTree {
    /// Emitted cycle type: one part per node, of size `orbit_len`.
    pub fn cycle_type(&self) -> CycleType {
        CycleType::new(self.nodes.iter().map(|n| n.orbit_len).collect()).expect("positive parts")
    }

    pub fn n(&self) -> u64 {
        self.nodes.iter().map(|n| n.orbit_len).sum()
    }

    /// Check all structural invariants; see module docs for the calculus.
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m == 0 || m % 2 == 0 {
            return Err(Error::Precondition("tree order must be odd".into()));
        }
        let o = |x: u64| -> u64 {
            let r = x % m;
            if r == 0 {
                1
            } else {
                m / r.gcd(&m)
            }
        };
        let mut faithful = 1u64;
        if let SlRoot::S4 { a, b } = self.root {
            if m < 3 || a % m == 0 || b % m == 0 {
                return Err(Error::Precondition(
                    "sphere root needs nonzero weights and m >= 3".into(),
                ));
            }
            if o(a).lcm(&o(b)) != m {
                return Err(Error::Precondition("sphere rotation is not faithful".into()));
            }
            faithful = m;
        }
        let mut pole_chains = 0usize;
        let mut central_children = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                if p >= i {
                    return Err(Error::Precondition("parents must precede children".into()));
                }
            }
            if node.orbit_len == 0 || m % node.orbit_len != 0 {
                return Err(Error::Precondition(format!(
                    "orbit length {} must divide m = {m}",
                    node.orbit_len
                )));
            }
            if node.stab_order != m / node.orbit_len {
                return Err(Error::Precondition("stabilizer order must be m / orbit".into()));
            }
            if node.is_central() {
                // Faithful linear action on each fixed copy.
                if node.weights.0.gcd(&node.weights.1).gcd(&m) != 1 {
                    return Err(Error::Precondition(
                        "central weights must have gcd 1 with the order".into(),
                    ));
                }
                faithful = faithful.lcm(&m);
                match node.parent {
                    None => match self.root {
                        SlRoot::Core => {
                            if i != 0 {
                                return Err(Error::Precondition(
                                    "a core tree has exactly one root node".into(),
                                ));
                            }
                        }
                        SlRoot::S4 { a, b } => {
                            pole_chains += 1;
                            if pole_chains > 2 {
                                return Err(Error::Precondition("a rotation has two poles".into()));
                            }
                            let want = RotationNumbers::new(-(a as i64), b as i64, m)?;
                            let got = RotationNumbers::new(
                                node.weights.0 as i64,
                                node.weights.1 as i64,
                                m,
                            )?;
                            if want.canonical() != got.canonical() {
                                return Err(Error::Precondition(
                                    "pole copy weights must match the rotation".into(),
                                ));
                            }
                        }
                    },
                    Some(p) => {
                        let parent = &self.nodes[p];
                        if !parent.is_central() {
                            return Err(Error::Precondition(
                                "central copies glue to central copies or poles".into(),
                            ));
                        }
                        central_children[p] += 1;
                        let root_core = matches!(self.root, SlRoot::Core);
                        let slots = if parent.parent.is_none() && root_core { 3 } else { 2 };
                        if central_children[p] > slots {
                            return Err(Error::Precondition(
                                "too many central gluings at one copy".into(),
                            ));
                        }
                        if m > 1 {
                            let (pa, pb) = (parent.weights.0 as i64, parent.weights.1 as i64);
                            let pts = [(pa, pb), (-pa, pb - pa), (-pb, pa - pb)];
                            let got = RotationNumbers::new(
                                node.weights.0 as i64,
                                node.weights.1 as i64,
                                m,
                            )?;
                            let matched = pts.iter().any(|&(x, y)| {
                                RotationNumbers::new(-x, y, m)
                                    .map(|rn| rn.canonical() == got.canonical())
                                    .unwrap_or(false)
                            });
                            if !matched {
                                return Err(Error::Precondition(
                                    "central gluing weights do not match any parent point".into(),
                                ));
                            }
                        }
                    }
                }
            } else {
                match node.parent {
                    None => {
                        let root_strata: BTreeSet<u64> = match self.root {
                            SlRoot::S4 { a, b } => [o(a), o(b), m].into_iter().collect(),
                            SlRoot::Core => {
                                return Err(Error::Precondition(
                                    "core-tree orbits must attach to a central copy".into(),
                                ))
                            }
                        };
                        if !root_strata.contains(&node.orbit_len) {
                            return Err(Error::Precondition(format!(
                                "orbit {} is not an initial sphere stratum",
                                node.orbit_len
                            )));
                        }
                    }
                    Some(p) => {
                        let parent = &self.nodes[p];
                        if node.orbit_len % parent.orbit_len != 0 {
                            return Err(Error::Precondition(
                                "orbit must be a multiple of the parent orbit".into(),
                            ));
                        }
                        let u = node.orbit_len / parent.orbit_len;
                        let s = parent.stab_order;
                        let available = if s == 1 {
                            u == 1
                        } else {
                            orbit_sizes_cp2(&RotationNumbers::new(
                                parent.weights.0 as i64,
                                parent.weights.1 as i64,
                                s,
                            )?)
                            .contains(&u)
                        };
                        if !available {
                            return Err(Error::Precondition(format!(
                                "multiplier {u} is not an orbit size of the stabilizer action"
                            )));
                        }
                    }
                }
            }
        }
        if faithful != m {
            return Err(Error::Precondition(format!(
                "action is not faithful: character orders reach {faithful} < {m}"
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Achievable stabilizer strata.
// ---------------------------------------------------------------------------

fn divisors(s: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= s {
        if s % d == 0 {
            out.push(d);
            if d != s / d {
                out.push(s / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn prime_factors(mut s: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= s {
        if s % p == 0 {
            let mut e = 0;
            while s % p == 0 {
                s /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if s > 1 {
        out.push((s, 1));
    }
    out
}

fn vp(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Whether orders `(d1, d2, d3)` arise as `(o(a), o(b), o(a-b))` in `Z/s`:
/// three residues summing to zero must have the maximal local order occur at
/// least twice, prime by prime; conversely any such triple is realizable.
fn triple_achievable(s: u64, d1: u64, d2: u64, d3: u64) -> bool {
    for (p, _) in prime_factors(s) {
        let mut v = [vp(d1, p), vp(d2, p), vp(d3, p)];
        v.sort_unstable();
        if v[1] != v[2] {
            return false;
        }
    }
    true
}

/// Witness weights `(a, b)` mod `s` with `o(a) = d1`, `o(b) = d2`,
/// `o(a - b) = d3`, built prime-by-prime and combined by remainders.
fn triple_witness(s: u64, d1: u64, d2: u64, d3: u64) -> (u64, u64) {
    let mut a = 0u64;
    let mut b = 0u64;
    for (p, e) in prime_factors(s) {
        let pe = p.pow(e);
        let (i, j, k) = (vp(d1, p), vp(d2, p), vp(d3, p));
        let (ap, bp): (u64, u64) = if i == j {
            let t = i;
            if t == 0 {
                (0, 0)
            } else if k < t {
                (p.pow(e - t), p.pow(e - t) * (1 + p.pow(t - k)) % pe)
            } else {
                // p is odd here, so 2 is a unit.
                (p.pow(e - t), p.pow(e - t) * 2 % pe)
            }
        } else {
            (
                if i == 0 { 0 } else { p.pow(e - i) },
                if j == 0 { 0 } else { p.pow(e - j) },
            )
        };
        let rest = s / pe;
        let inv = mod_inv(rest % pe, pe);
        a = (a + ap * inv % pe * rest) % s;
        b = (b + bp * inv % pe * rest) % s;
    }
    (a, b)
}

fn mod_inv(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert!(r == 1);
    t.rem_euclid(m as i128) as u64
}

/// Weights mod `s` whose line strata cover `needed` (divisors of `s`; the
/// sizes 1 and `s` are always available and may be omitted); optionally
/// require the action to be faithful (`lcm` of the two weight orders `= s`).
fn weights_covering(s: u64, needed: &BTreeSet<u64>, faithful: bool) -> Option<(u64, u64)> {
    let need: Vec<u64> = needed.iter().copied().filter(|&u| u != 1 && u != s).collect();
    if s == 1 {
        return if need.is_empty() { Some((0, 0)) } else { None };
    }
    if need.len() > 3 {
        return None;
    }
    let divs = divisors(s);
    let slot = |idx: usize| -> Vec<u64> {
        if idx < need.len() {
            vec![need[idx]]
        } else {
            divs.clone()
        }
    };
    for &d1 in &slot(0) {
        for &d2 in &slot(1) {
            for &d3 in &slot(2) {
                if faithful && d1.lcm(&d2) != s {
                    continue;
                }
                if !triple_achievable(s, d1, d2, d3) {
                    continue;
                }
                let (a, b) = triple_witness(s, d1, d2, d3);
                debug_assert_eq!(order_mod(a, s), d1);
                debug_assert_eq!(order_mod(b, s), d2);
                debug_assert_eq!(order_mod((s + a - b) % s, s), d3);
                return Some((a, b));
            }
        }
    }
    None
}

fn order_mod(x: u64, s: u64) -> u64 {
    let r = x % s;
    if r == 0 {
        1
    } else {
        s / r.gcd(&s)
    }
}

// ---------------------------------------------------------------------------
// Certificates: two-lengths construction and bounded search.
// ---------------------------------------------------------------------------

/// Certificate for a cycle type with at most two distinct lengths greater
/// than one: orbits at the sphere strata plus a chain of fixed copies at a
/// pole.
pub fn sufficient_two_lengths(ct: &CycleType) -> Result<Option<SlTree>> {
    let m = faithful_order(ct)?;
    let nontrivial: Vec<(u64, u64)> = ct
        .multiplicities()
        .into_iter()
        .filter(|&(len, _)| len > 1)
        .collect();
    if nontrivial.len() > 2 {
        return Ok(None);
    }
    let h = ct.fixed_points();
    let mut nodes = Vec::new();
    let root = if nontrivial.is_empty() {
        SlRoot::Core
    } else {
        let x = nontrivial[0].0;
        let y = nontrivial.last().unwrap().0;
        SlRoot::S4 { a: m / x, b: m / y }
    };
    match root {
        SlRoot::Core => {
            // Identity type (m = 1): a chain of fixed copies.
            for i in 0..h {
                nodes.push(SlNode {
                    parent: if i == 0 { None } else { Some(i as usize - 1) },
                    orbit_len: 1,
                    stab_order: m,
                    weights: (0, 0),
                });
            }
        }
        SlRoot::S4 { a, b } => {
            for &(len, count) in &nontrivial {
                let s = m / len;
                for _ in 0..count {
                    nodes.push(SlNode {
                        parent: None,
                        orbit_len: len,
                        stab_order: s,
                        weights: if s == 1 { (0, 0) } else { (1 % s, 1 % s) },
                    });
                }
            }
            // Fixed copies chain off one pole, weights matched downward.
            let mut prev: Option<usize> = None;
            let mut w = ((m - a % m) % m, b % m);
            for _ in 0..h {
                nodes.push(SlNode { parent: prev, orbit_len: 1, stab_order: m, weights: w });
                prev = Some(nodes.len() - 1);
                w = ((m - w.0) % m, w.1);
            }
        }
    }
    let tree = SlTree { m, root, nodes };
    tree.validate()?;
    if tree.cycle_type() != *ct {
        return Err(Error::Internal("two-lengths certificate emits the wrong type".into()));
    }
    Ok(Some(tree))
}

/// Bounds for the certificate search.
#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub max_depth: usize,
    pub max_states: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self { max_depth: 6, max_states: 200_000 }
    }
}

struct SearchSite {
    /// Index into the placement list (`usize::MAX` is the root site).
    node: usize,
    orbit: u64,
    stab: u64,
    /// Strata multipliers demanded of this site's weights so far.
    committed: BTreeSet<u64>,
    depth: usize,
}

struct Searcher {
    bounds: SearchBounds,
    states: u64,
    /// Whether the root site is a central copy (core trees) whose weights
    /// must exist faithfully.
    central_root: bool,
    m: u64,
}

impl Searcher {
    fn pack(
        &mut self,
        parts: &[u64],
        sites: &mut Vec<SearchSite>,
        placed: &mut Vec<(Option<usize>, u64)>,
    ) -> bool {
        if parts.is_empty() {
            if self.central_root {
                return weights_covering(self.m, &sites[0].committed, true).is_some();
            }
            return true;
        }
        self.states += 1;
        if self.states > self.bounds.max_states {
            return false;
        }
        let part = parts[0];
        for i in 0..sites.len() {
            if part % sites[i].orbit != 0 {
                continue;
            }
            let u = part / sites[i].orbit;
            let s = sites[i].stab;
            if u == 1 || s % u != 0 || sites[i].depth + 1 > self.bounds.max_depth {
                continue;
            }
            let is_root = sites[i].node == usize::MAX;
            let mut added = false;
            if is_root && !self.central_root {
                // Sphere root: the initial strata are fixed up front.
                if !sites[i].committed.contains(&u) {
                    continue;
                }
            } else if u != s && !sites[i].committed.contains(&u) {
                let mut tentative = sites[i].committed.clone();
                tentative.insert(u);
                let faithful = is_root && self.central_root;
                if weights_covering(s, &tentative, faithful).is_none() {
                    continue;
                }
                sites[i].committed.insert(u);
                added = true;
            }
            let parent = if is_root { None } else { Some(sites[i].node) };
            let depth = sites[i].depth + 1;
            placed.push((parent, part));
            sites.push(SearchSite {
                node: placed.len() - 1,
                orbit: part,
                stab: s / u,
                committed: BTreeSet::new(),
                depth,
            });
            if self.pack(&parts[1..], sites, placed) {
                return true;
            }
            sites.pop();
            placed.pop();
            if added {
                sites[i].committed.remove(&u);
            }
        }
        false
    }
}

/// Bounded search for a standard-linear certificate with the exact cycle
/// type. `None` means "no tree found within bounds", never
/// non-realizability.
pub fn sl_search(ct: &CycleType, bounds: SearchBounds) -> Result<Option<SlTree>> {
    let m = faithful_order(ct)?;
    let h = ct.fixed_points();
    let parts: Vec<u64> = {
        let mut p: Vec<u64> = ct.parts().iter().copied().filter(|&x| x > 1).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    };
    if parts.is_empty() {
        return sufficient_two_lengths(ct);
    }

    if h == 0 {
        // Sphere root: enumerate the two initial stratum orders.
        let divs = divisors(m);
        for &d1 in &divs {
            for &d2 in &divs {
                if d1 > d2 || d1 == 1 || d2 == 1 || d1.lcm(&d2) != m {
                    continue;
                }
                let mut sites = vec![SearchSite {
                    node: usize::MAX,
                    orbit: 1,
                    stab: m,
                    committed: [d1, d2, m].into_iter().collect(),
                    depth: 0,
                }];
                let mut placed = Vec::new();
                let mut searcher = Searcher { bounds, states: 0, central_root: false, m };
                if searcher.pack(&parts, &mut sites, &mut placed) {
                    let root = SlRoot::S4 { a: m / d1, b: m / d2 };
                    return Ok(Some(materialize(m, root, 0, h, &placed, &sites)?));
                }
            }
        }
        Ok(None)
    } else {
        // Core root: one primary central copy carries every branch; the
        // remaining fixed copies chain off it at matched points.
        let mut sites = vec![SearchSite {
            node: usize::MAX,
            orbit: 1,
            stab: m,
            committed: BTreeSet::new(),
            depth: 0,
        }];
        let mut placed = Vec::new();
        let mut searcher = Searcher { bounds, states: 0, central_root: true, m };
        if searcher.pack(&parts, &mut sites, &mut placed) {
            return Ok(Some(materialize(m, SlRoot::Core, 1, h - 1, &placed, &sites)?));
        }
        Ok(None)
    }
}

/// Assemble the searched tree: optional primary central node, the packed
/// peripheral nodes (with weights recovered from each site's committed
/// strata), and a chain of extra fixed copies.
fn materialize(
    m: u64,
    root: SlRoot,
    central_offset: usize,
    extra_centrals: u64,
    placed: &[(Option<usize>, u64)],
    sites: &[SearchSite],
) -> Result<SlTree> {
    let mut nodes: Vec<SlNode> = Vec::new();
    let (mut chain_parent, mut chain_w) = match root {
        SlRoot::Core => {
            let (a, b) = weights_covering(m, &sites[0].committed, true)
                .ok_or_else(|| Error::Internal("central strata lost their witness".into()))?;
            nodes.push(SlNode { parent: None, orbit_len: 1, stab_order: m, weights: (a, b) });
            (Some(0usize), ((m - a % m) % m, b % m))
        }
        SlRoot::S4 { a, b } => (None, ((m - a % m) % m, b % m)),
    };
    for &(parent, orbit) in placed {
        nodes.push(SlNode {
            parent: parent.map(|p| p + central_offset).or({
                if central_offset == 1 {
                    Some(0)
                } else {
                    None
                }
            }),
            orbit_len: orbit,
            stab_order: m / orbit,
            weights: (0, 0),
        });
    }
    for site in sites {
        if site.node == usize::MAX {
            continue;
        }
        let idx = site.node + central_offset;
        let s = nodes[idx].stab_order;
        nodes[idx].weights = weights_covering(s, &site.committed, false)
            .ok_or_else(|| Error::Internal("committed strata lost their witness".into()))?;
    }
    for _ in 0..extra_centrals {
        nodes.push(SlNode {
            parent: chain_parent,
            orbit_len: 1,
            stab_order: m,
            weights: chain_w,
        });
        chain_parent = Some(nodes.len() - 1);
        chain_w = ((m - chain_w.0) % m, chain_w.1);
    }
    let tree = SlTree { m, root, nodes };
    tree.validate()?;
    Ok(tree)
}

// ---------------------------------------------------------------------------
// Random generation (soundness experiments).
// ---------------------------------------------------------------------------

/// Generate a random valid standard-linear tree: random odd order, random
/// root, then a random bounded attachment sequence within the calculus.
pub fn random_sltree<R: Rng>(rng: &mut R, max_nodes: usize) -> SlTree {
    loop {
        if let Some(tree) = try_random_sltree(rng, max_nodes) {
            if tree.validate().is_ok() {
                return tree;
            }
        }
    }
}

fn try_random_sltree<R: Rng>(rng: &mut R, max_nodes: usize) -> Option<SlTree> {
    const ODD_ORDERS: [u64; 12] = [1, 3, 5, 7, 9, 15, 21, 27, 35, 45, 105, 225];
    let m = ODD_ORDERS[rng.gen_range(0..ODD_ORDERS.len())];
    let target = rng.gen_range(1..=max_nodes.max(1));
    let use_core = m == 1 || rng.gen_bool(0.4);

    let mut nodes: Vec<SlNode> = Vec::new();
    let root = if use_core {
        let (a, b) = random_faithful_weights(rng, m);
        nodes.push(SlNode { parent: None, orbit_len: 1, stab_order: m, weights: (a, b) });
        SlRoot::Core
    } else {
        let divs = divisors(m);
        let pairs: Vec<(u64, u64)> = divs
            .iter()
            .flat_map(|&d1| divs.iter().map(move |&d2| (d1, d2)))
            .filter(|&(d1, d2)| d1 > 1 && d2 > 1 && d1.lcm(&d2) == m)
            .collect();
        let (d1, d2) = pairs[rng.gen_range(0..pairs.len())];
        SlRoot::S4 { a: m / d1, b: m / d2 }
    };

    let mut pole_chains = 0;
    let mut attempts = 0;
    while nodes.len() < target {
        attempts += 1;
        if attempts > 50 * target {
            break;
        }
        match (rng.gen_range(0..4), &root) {
            (0, SlRoot::S4 { a, b }) => {
                let strata: Vec<u64> = s4_initial_orbits(*a, *b, m).ok()?.into_iter().collect();
                let len = strata[rng.gen_range(0..strata.len())];
                let s = m / len;
                nodes.push(SlNode {
                    parent: None,
                    orbit_len: len,
                    stab_order: s,
                    weights: random_weights(rng, s),
                });
            }
            (1, SlRoot::S4 { a, b }) if pole_chains < 2 => {
                pole_chains += 1;
                nodes.push(SlNode {
                    parent: None,
                    orbit_len: 1,
                    stab_order: m,
                    weights: ((m - a % m) % m, b % m),
                });
            }
            _ if !nodes.is_empty() => {
                let p = rng.gen_range(0..nodes.len());
                let parent = nodes[p].clone();
                if parent.is_central() {
                    if rng.gen_bool(0.5) && m > 1 {
                        let strata: Vec<u64> = orbit_sizes_cp2(&RotationNumbers::new(
                            parent.weights.0 as i64,
                            parent.weights.1 as i64,
                            m,
                        ).ok()?)
                        .into_iter()
                        .filter(|&u| u > 1)
                        .collect();
                        if strata.is_empty() {
                            continue;
                        }
                        let u = strata[rng.gen_range(0..strata.len())];
                        nodes.push(SlNode {
                            parent: Some(p),
                            orbit_len: u,
                            stab_order: m / u,
                            weights: random_weights(rng, m / u),
                        });
                    } else {
                        let used = nodes.iter().filter(|n| n.parent == Some(p)).count()
                            + usize::from(
                                parent.parent.is_some() || matches!(root, SlRoot::S4 { .. }),
                            );
                        if used >= if p == 0 && matches!(root, SlRoot::Core) { 3 } else { 2 } {
                            continue;
                        }
                        let (pa, pb) = (parent.weights.0 as i64, parent.weights.1 as i64);
                        let pts = [(pa, pb), (-pa, pb - pa), (-pb, pa - pb)];
                        let (x, y) = pts[rng.gen_range(0..3)];
                        let w = ((-x).rem_euclid(m as i64) as u64, y.rem_euclid(m as i64) as u64);
                        nodes.push(SlNode {
                            parent: Some(p),
                            orbit_len: 1,
                            stab_order: m,
                            weights: w,
                        });
                    }
                } else {
                    let s = parent.stab_order;
                    if s == 1 {
                        continue;
                    }
                    let strata: Vec<u64> = orbit_sizes_cp2(&RotationNumbers::new(
                        parent.weights.0 as i64,
                        parent.weights.1 as i64,
                        s,
                    ).ok()?)
                    .into_iter()
                    .filter(|&u| u > 1)
                    .collect();
                    if strata.is_empty() {
                        continue;
                    }
                    let u = strata[rng.gen_range(0..strata.len())];
                    nodes.push(SlNode {
                        parent: Some(p),
                        orbit_len: parent.orbit_len * u,
                        stab_order: s / u,
                        weights: random_weights(rng, s / u),
                    });
                }
            }
            _ => continue,
        }
    }
    if nodes.is_empty() {
        return None;
    }
    Some(SlTree { m, root, nodes })
}

fn random_weights<R: Rng>(rng: &mut R, s: u64) -> (u64, u64) {
    if s <= 1 {
        (0, 0)
    } else {
        (rng.gen_range(0..s), rng.gen_range(0..s))
    }
}

fn random_faithful_weights<R: Rng>(rng: &mut R, m: u64) -> (u64, u64) {
    if m == 1 {
        return (0, 0);
    }
    loop {
        let a = rng.gen_range(0..m);
        let b = rng.gen_range(0..m);
        if a.gcd(&b).gcd(&m) == 1 {
            return (a, b);
        }
    }
}

// ---------------------------------------------------------------------------
// The element verdict.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ElementVerdict {
    pub status: Status,
    pub witnesses: Vec<RuleWitness>,
    pub certificate: Option<SlTree>,
}

/// Decide an odd-order cycle type on `n` points (points beyond the listed
/// parts are implicit fixed points). Failed necessary checks give
/// `NotRealizable` with all firing rules; a two-lengths construction or a
/// successful bounded search gives `Realizable` with the tree; otherwise
/// `Unknown`.
pub fn verdict_odd_element(ct: &CycleType, n: u64) -> Result<ElementVerdict> {
    if ct.parts().iter().any(|&p| p % 2 == 0) {
        return Err(Error::Precondition(format!("cycle type {ct} has an even part")));
    }
    let total = ct.total();
    if total > n {
        return Err(Error::Precondition(format!("cycle type fills {total} > n = {n}")));
    }
    let mut parts = ct.parts().to_vec();
    parts.extend(std::iter::repeat(1).take((n - total) as usize));
    let full = CycleType::new(parts)?;

    let mut witnesses = Vec::new();
    for check in [
        check_mu(&full)?,
        check_prime_cycles(&full, n)?,
        check_two_min_primes(&full)?,
        check_357(&full)?,
    ] {
        if let Some(w) = check {
            witnesses.push(w);
        }
    }
    if !witnesses.is_empty() {
        return Ok(ElementVerdict {
            status: Status::NotRealizable,
            witnesses,
            certificate: None,
        });
    }
    if let Some(tree) = sufficient_two_lengths(&full)? {
        return Ok(ElementVerdict {
            status: Status::Realizable,
            witnesses: vec![RuleWitness::new(
                "two_lengths",
                "at most two nontrivial cycle lengths",
            )],
            certificate: Some(tree),
        });
    }
    if let Some(tree) = sl_search(&full, SearchBounds::default())? {
        return Ok(ElementVerdict {
            status: Status::Realizable,
            witnesses: vec![RuleWitness::new("tree_search", "bounded standard-linear search")],
            certificate: Some(tree),
        });
    }
    Ok(ElementVerdict { status: Status::Unknown, witnesses: Vec::new(), certificate: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn ct(parts: &[u64]) -> CycleType {
        CycleType::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn stabilizer_sets_and_mu() {
        let s = stabilizer_set(&ct(&[3, 5, 7]), 105).unwrap();
        assert_eq!(s.orders, [35, 21, 15].into_iter().collect());
        assert_eq!(mu(&ct(&[3, 5, 7]), 105).unwrap(), 3);

        let s = stabilizer_set(&ct(&[3, 3, 9]), 9).unwrap();
        assert_eq!(s.orders, [3, 1].into_iter().collect());
        assert_eq!(mu(&ct(&[3, 3, 9]), 9).unwrap(), 1);

        assert_eq!(mu(&ct(&[1, 3, 5, 7]), 105).unwrap(), 3);
        assert!(stabilizer_set(&ct(&[3, 5]), 30).is_err());
    }

    #[test]
    fn mu_check() {
        assert!(check_mu(&ct(&[9, 15, 25])).unwrap().is_some());
        assert!(check_mu(&ct(&[3, 5, 7])).unwrap().is_some());
        assert!(check_mu(&ct(&[1, 3, 5, 7])).unwrap().is_none());
    }

    #[test]
    fn prime_cycle_check() {
        // (ln 15)^2 ~ 7.33, so 3, 5 and 7 all count.
        assert_eq!(prime_cycle_count(&ct(&[3, 5, 7]), 15), 3);
        assert!(check_prime_cycles(&ct(&[3, 5, 7]), 15).unwrap().is_some());
        assert_eq!(prime_cycle_count(&ct(&[1, 1, 1]), 3), 0);
        assert!(check_prime_cycles(&ct(&[1, 1, 1]), 3).unwrap().is_none());
        // (ln 10^4)^2 ~ 84.8 catches 3, 5, 7 and 11.
        let parts = vec![3, 5, 7, 11, 9975];
        assert_eq!(prime_cycle_count(&ct(&parts), 10_000), 4);
    }

    #[test]
    fn two_min_primes_check() {
        assert!(check_two_min_primes(&ct(&[3, 5, 7])).unwrap().is_some());
        assert!(check_two_min_primes(&ct(&[3, 5, 15])).unwrap().is_none());
        // A fixed point disables the rule.
        assert!(check_two_min_primes(&ct(&[1, 3, 5, 7])).unwrap().is_none());
    }

    #[test]
    fn rule_357() {
        assert!(check_357(&ct(&[1, 3, 5, 7])).unwrap().is_some());
        assert!(check_357(&ct(&[3, 5, 7])).unwrap().is_none());
        assert!(check_357(&ct(&[1, 1, 3, 5, 7])).unwrap().is_none());
    }

    #[test]
    fn orbit_sizes() {
        let rn = RotationNumbers::new(1, 2, 15).unwrap();
        assert_eq!(orbit_sizes_cp2(&rn), [1, 15].into_iter().collect());
        let rn = RotationNumbers::new(3, 5, 15).unwrap();
        assert_eq!(orbit_sizes_cp2(&rn), [1, 3, 5, 15].into_iter().collect());
        assert_eq!(s4_initial_orbits(1, 1, 3).unwrap(), [3].into_iter().collect());
        assert!(s4_initial_orbits(3, 3, 9).is_err());
    }

    #[test]
    fn two_lengths_certificates() {
        for parts in [vec![3, 3, 5, 1, 1], vec![7], vec![1, 1, 1], vec![3, 3]] {
            let t = sufficient_two_lengths(&ct(&parts)).unwrap().unwrap();
            assert_eq!(t.cycle_type(), ct(&parts));
        }
        assert!(sufficient_two_lengths(&ct(&[3, 5, 7])).unwrap().is_none());

        // (3,3) realizes over the sphere with two orbit-3 branches.
        let t = sufficient_two_lengths(&ct(&[3, 3])).unwrap().unwrap();
        assert!(matches!(t.root, SlRoot::S4 { .. }));
        assert_eq!(t.nodes.len(), 2);
    }

    #[test]
    fn search_finds_chains() {
        // (3, 15, 45): a divisor chain needing depth 3.
        let t = sl_search(&ct(&[3, 15, 45]), SearchBounds::default()).unwrap().unwrap();
        assert_eq!(t.cycle_type(), ct(&[3, 15, 45]));
        // An obstructed type must not be found.
        assert!(sl_search(&ct(&[3, 5, 7]), SearchBounds::default()).unwrap().is_none());
        // A type with fixed points goes through the central route.
        let t = sl_search(&ct(&[1, 3, 9]), SearchBounds::default()).unwrap().unwrap();
        assert_eq!(t.cycle_type(), ct(&[1, 3, 9]));
    }

    #[test]
    fn verdict_fixtures() {
        let v = verdict_odd_element(&ct(&[3, 5, 7]), 15).unwrap();
        assert_eq!(v.status, Status::NotRealizable);
        let rules: Vec<&str> = v.witnesses.iter().map(|w| w.rule.as_str()).collect();
        assert!(rules.contains(&"max_stabilizers"));
        assert!(rules.contains(&"two_min_primes"));

        let v = verdict_odd_element(&ct(&[1, 3, 5, 7]), 16).unwrap();
        assert_eq!(v.status, Status::NotRealizable);

        let v = verdict_odd_element(&ct(&[9, 15, 25]), 49).unwrap();
        assert_eq!(v.status, Status::NotRealizable);
        assert_eq!(v.witnesses.len(), 1);
        assert_eq!(v.witnesses[0].rule, "max_stabilizers");

        // Every odd type on n <= 8 points is realizable.
        for n in 1u64..=8 {
            for parts in
                crate::oracle::enum_partitions(n, &|p| p.iter().all(|&x| x % 2 == 1)).unwrap()
            {
                let v = verdict_odd_element(&ct(&parts), n).unwrap();
                assert_eq!(v.status, Status::Realizable, "type {parts:?}");
                let tree = v.certificate.unwrap();
                assert_eq!(tree.cycle_type(), ct(&parts));
            }
        }

        assert!(verdict_odd_element(&ct(&[2]), 2).is_err());
    }

    #[test]
    fn random_trees_pass_necessary_checks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12345);
        for _ in 0..2000 {
            let tree = random_sltree(&mut rng, 12);
            let emitted = tree.cycle_type();
            let n = emitted.total();
            assert!(check_mu(&emitted).unwrap().is_none(), "mu fails on {emitted}");
            assert!(
                check_two_min_primes(&emitted).unwrap().is_none(),
                "two_min_primes fails on {emitted}"
            );
            assert!(check_357(&emitted).unwrap().is_none(), "357 fails on {emitted}");
            assert!(
                check_prime_cycles(&emitted, n).unwrap().is_none(),
                "prime cycles fail on {emitted} (n = {n})"
            );
        }
    }

    #[test]
    fn weight_witnesses() {
        // Orders (3, 5) in Z/15 force the difference to order 15.
        assert!(triple_achievable(15, 3, 5, 15));
        assert!(!triple_achievable(15, 3, 5, 1));
        let (a, b) = triple_witness(15, 3, 5, 15);
        assert_eq!(order_mod(a, 15), 3);
        assert_eq!(order_mod(b, 15), 5);
        assert_eq!(order_mod((15 + a - b) % 15, 15), 15);

        let w = weights_covering(45, &[9, 45].into_iter().collect(), true);
        assert!(w.is_some());
    }
}
