//! Exact signature defects over cyclotomic fields.
//!
//! The defect of an isolated fixed point with tangent rotation numbers
//! `(a, b)` under a cyclic action of order `m` is
//!
//! ```text
//!   def(a, b; m) = sum_{k=1}^{m-1} (1 + z^ka)(1 + z^kb) / ((1 - z^ka)(1 - z^kb))
//! ```
//!
//! with `z` a primitive m-th root of unity. The sum is Galois-stable, so it
//! is a rational number; we compute it exactly in `Q[x] / Phi_m(x)` and
//! assert the rationality rather than assuming it. A surface component of
//! self-intersection `C.C` contributes `(p^2 - 1)/3 * C.C`. For a linear
//! action on a single `CP^2` (three fixed points with rotation numbers
//! `(a,b)`, `(-a,b-a)`, `(-b,a-b)`), the defects must add up to `m - 1`;
//! `verify_gsignature_cp2` checks that balance identity exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tangent weights of a fixed point, taken mod `m` up to the symmetries
/// `(a,b) ~ (b,a) ~ (-a,-b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotationNumbers {
    pub a: i64,
    pub b: i64,
    pub m: u64,
}

impl RotationNumbers {
    pub fn new(a: i64, b: i64, m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition("modulus must be at least 2".into()));
        }
        Ok(Self { a, b, m })
    }

    fn reduced(&self) -> (u64, u64) {
        (
            self.a.rem_euclid(self.m as i64) as u64,
            self.b.rem_euclid(self.m as i64) as u64,
        )
    }

    /// Canonical representative of the symmetry orbit.
    pub fn canonical(&self) -> (u64, u64) {
        let m = self.m;
        let (a, b) = self.reduced();
        let neg = |x: u64| if x == 0 { 0 } else { m - x };
        [(a, b), (b, a), (neg(a), neg(b)), (neg(b), neg(a))]
            .into_iter()
            .min()
            .unwrap()
    }
}

// ---------------------------------------------------------------------------
// Integer cyclotomic polynomials.
// ---------------------------------------------------------------------------

/// Coefficients of the m-th cyclotomic polynomial, low degree first.
///
/// Computed by dividing `x^m - 1` by the product of `Phi_d` over proper
/// divisors `d` of `m`; exact integer division at every step.
pub fn cyclotomic_poly(m: u64) -> Result<Vec<BigInt>> {
    if m == 0 || m > 512 {
        return Err(Error::CapExceeded(
            "cyclotomic polynomials supported for 1 <= m <= 512".into(),
        ));
    }
    let mut table: Vec<Option<Vec<BigInt>>> = vec![None; m as usize + 1];
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        // x^d - 1
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        for e in 1..d {
            if d % e == 0 {
                num = int_poly_div_exact(&num, table[e as usize].as_ref().expect("filled in order"));
            }
        }
        table[d as usize] = Some(num);
    }
    Ok(table[m as usize].take().expect("computed"))
}

/// Exact division of integer polynomials (low degree first) by a monic
/// divisor; panics on an inexact division, which cannot happen between
/// cyclotomic factors.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(dn >= dd);
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let coef = rem[i + dd].clone();
        if coef.is_zero() {
            continue;
        }
        quot[i] = coef.clone();
        for j in 0..=dd {
            rem[i + j] -= &coef * &den[j];
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact cyclotomic division");
    quot
}

// ---------------------------------------------------------------------------
// Elements of Q(zeta_m) as residues mod Phi_m.
// ---------------------------------------------------------------------------

/// Dense polynomial over Q, low degree first, trimmed.
type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

/// Remainder of `a` mod `b` (`b` nonzero, trimmed).
fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    while rem.len() > db {
        let i = rem.len() - 1 - db;
        let coef = rem.last().unwrap() / lead;
        for j in 0..=db {
            let t = &coef * &b[j];
            rem[i + j] -= t;
        }
        trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    rem
}

/// Inverse of `u` modulo the irreducible `phi`, by the extended Euclidean
/// algorithm in `Q[x]`.
fn poly_inv_mod(u: &Poly, phi: &Poly) -> Result<Poly> {
    let mut r0 = phi.clone();
    let mut r1 = u.to_vec();
    trim(&mut r1);
    if r1.is_empty() {
        return Err(Error::Precondition("inverting zero in the cyclotomic field".into()));
    }
    let mut t0: Poly = Vec::new();
    let mut t1: Poly = vec![BigRational::one()];
    while r1.len() > 1 {
        // Long division of r0 by r1.
        let mut q = vec![BigRational::zero(); r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let db = r1.len() - 1;
        let lead = r1[db].clone();
        while rem.len() > db {
            let i = rem.len() - 1 - db;
            let coef = rem.last().unwrap() / &lead;
            q[i] = coef.clone();
            for j in 0..=db {
                let t = &coef * &r1[j];
                rem[i + j] -= t;
            }
            trim(&mut rem);
            if rem.is_empty() {
                break;
            }
        }
        let new_t = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, new_t);
    }
    if r1.is_empty() {
        return Err(Error::Internal("gcd with an irreducible polynomial vanished".into()));
    }
    let c = r1[0].clone();
    let inv: Poly = t1.iter().map(|t| t / &c).collect();
    Ok(poly_rem(&inv, phi))
}

/// An element of `Q(zeta_m)` as a residue modulo `Phi_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloElement {
    pub m: u64,
    /// Coefficients of the residue, low degree first, length < deg(Phi_m).
    pub coeffs: Poly,
}

impl CycloElement {
    /// Reduce arbitrary coefficients modulo `Phi_m`.
    pub fn new(m: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        let phi = rational_phi(m)?;
        Ok(Self { m, coeffs: poly_rem(&coeffs, &phi) })
    }

    pub fn from_rational(m: u64, q: BigRational) -> Result<Self> {
        Self::new(m, vec![q])
    }

    /// `zeta^j`.
    pub fn zeta_pow(m: u64, j: u64) -> Result<Self> {
        let mut p = vec![BigRational::zero(); (j % m) as usize + 1];
        let last = p.len() - 1;
        p[last] = BigRational::one();
        Self::new(m, p)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        Ok(Self { m: self.m, coeffs: poly_add(&self.coeffs, &other.coeffs) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        Ok(Self { m: self.m, coeffs: poly_sub(&self.coeffs, &other.coeffs) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        let phi = rational_phi(self.m)?;
        Ok(Self { m: self.m, coeffs: poly_rem(&poly_mul(&self.coeffs, &other.coeffs), &phi) })
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Phi_m` (which is irreducible, so every nonzero residue is a unit).
    pub fn inv(&self) -> Result<Self> {
        let phi = rational_phi(self.m)?;
        Ok(Self { m: self.m, coeffs: poly_inv_mod(&self.coeffs, &phi)? })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The element is rational iff all coefficients above degree 0 vanish.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.len() <= 1 {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    fn check_modulus(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(format!(
                "cyclotomic moduli {} vs {}",
                self.m, other.m
            )));
        }
        Ok(())
    }
}

fn rational_phi(m: u64) -> Result<Poly> {
    Ok(cyclotomic_poly(m)?.into_iter().map(BigRational::from_integer).collect())
}

/// Shared exact-arithmetic state for one modulus.
///
/// Holds `Phi_m` and, for every nonzero exponent `j`, the element
/// `G[j] = (1 + z^j) / (1 - z^j)` lifted to the cyclic convolution ring
/// `Z[x]/(x^m - 1)` over a one-integer denominator. The inverse of
/// `1 - z^j` is expanded by the product identity over the primitive d-th
/// roots (`d` the order of `z^j`): the product of `(1 - z^e)` over all of
/// them is `Phi_d(1)`, so dividing the product over the others by `Phi_d(1)`
/// inverts exactly with integer arithmetic only. Defects are cached by the
/// scaling class `min(a^{-1} b, b^{-1} a)`.
pub struct GsigContext {
    pub m: u64,
    phi: Vec<BigInt>,
    /// Numerator vectors of `G[j]` in `Z[x]/(x^m - 1)`, index `j` in `1..m`.
    g_num: Vec<Vec<BigInt>>,
    /// Denominator of `G[j]` (equal to `Phi_d(1)`).
    g_den: Vec<BigInt>,
    cache: std::sync::Mutex<std::collections::HashMap<u64, BigRational>>,
}

impl GsigContext {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition("modulus must be at least 2".into()));
        }
        let phi = cyclotomic_poly(m)?;
        let mut g_num = vec![Vec::new(); m as usize];
        let mut g_den = vec![BigInt::one(); m as usize];
        for j in 1..m {
            let d = m / j.gcd(&m);
            // Numerator: (1 + x^j) * prod over primitive d-th root exponents
            // e != j of (1 - x^e), all in Z[x]/(x^m - 1).
            let mut v = vec![BigInt::zero(); m as usize];
            v[0] = BigInt::one();
            v[j as usize] += BigInt::one();
            let step = m / d;
            for i in 1..=d {
                if i.gcd(&d) != 1 {
                    continue;
                }
                let e = (step * i) % m;
                if e == j {
                    continue;
                }
                v = mul_binomial_cyclic(&v, e as usize, m as usize);
            }
            g_num[j as usize] = v;
            g_den[j as usize] = phi_at_one(d);
        }
        Ok(Self {
            m,
            phi,
            g_num,
            g_den,
            cache: std::sync::Mutex::new(std::collections::HashMap::new()),
        })
    }

    /// Exact point defect at rotation numbers `(a, b)`. Requires both
    /// weights to be units mod `m`; asserts the Galois-stable sum is
    /// rational.
    pub fn defect_point(&self, a: i64, b: i64) -> Result<BigRational> {
        let m = self.m;
        let au = a.rem_euclid(m as i64) as u64;
        let bu = b.rem_euclid(m as i64) as u64;
        if au.gcd(&m) != 1 || bu.gcd(&m) != 1 {
            return Err(Error::Precondition(format!(
                "rotation numbers ({a}, {b}) must be coprime to m = {m}"
            )));
        }
        // Scaling by the unit a^{-1} turns (a, b) into (1, q); with the swap
        // symmetry the cache key is min(q, q^{-1}).
        let q = (mod_inverse(au, m) * bu) % m;
        let key = q.min(mod_inverse(q, m));
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let value = self.defect_of_class(key)?;
        self.cache.lock().unwrap().insert(key, value.clone());
        Ok(value)
    }

    /// Defect of the class `(1, q)`: `sum_k G[k] G[kq]` computed in the
    /// convolution ring over a common denominator, reduced mod `Phi_m` at
    /// the end.
    fn defect_of_class(&self, q: u64) -> Result<BigRational> {
        let m = self.m as usize;
        let mut num_acc = vec![BigInt::zero(); m];
        let mut den_acc = BigInt::one();
        for k in 1..self.m {
            let ka = k as usize;
            let kb = (k * q % self.m) as usize;
            let term = cyclic_convolve(&self.g_num[ka], &self.g_num[kb]);
            let term_den = &self.g_den[ka] * &self.g_den[kb];
            // acc/den_acc + term/term_den over the lcm.
            let g = den_acc.gcd(&term_den);
            let lcm = &den_acc / &g * &term_den;
            let scale_acc = &lcm / &den_acc;
            let scale_term = &lcm / &term_den;
            for (dst, src) in num_acc.iter_mut().zip(term.iter()) {
                *dst = &*dst * &scale_acc + src * &scale_term;
            }
            den_acc = lcm;
        }
        // Reduce mod Phi_m; the remainder of an integer polynomial by the
        // monic Phi_m stays integral.
        let rem = int_poly_rem(&num_acc, &self.phi);
        if rem.iter().skip(1).any(|c| !c.is_zero()) {
            return Err(Error::Internal(format!(
                "point defect class q={q} mod {} is not rational",
                self.m
            )));
        }
        let c0 = rem.first().cloned().unwrap_or_else(BigInt::zero);
        Ok(BigRational::new(c0, den_acc))
    }
}

fn phi_at_one(d: u64) -> BigInt {
    // Phi_d(1) = p when d is a prime power p^k (d >= 2), else 1.
    let mut n = d;
    let mut p = 0u64;
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            p = f;
            while n % f == 0 {
                n /= f;
            }
            break;
        }
        f += 1;
    }
    if p == 0 {
        // d itself is prime (or 1).
        return if d >= 2 { BigInt::from(d) } else { BigInt::one() };
    }
    if n == 1 {
        BigInt::from(p)
    } else {
        BigInt::one()
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // Extended Euclid on integers; a must be a unit mod m.
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "not a unit");
    t.rem_euclid(m as i128) as u64
}

/// Multiply by `(1 - x^e)` in `Z[x]/(x^m - 1)`.
fn mul_binomial_cyclic(v: &[BigInt], e: usize, m: usize) -> Vec<BigInt> {
    let mut out = v.to_vec();
    for (i, c) in v.iter().enumerate() {
        if !c.is_zero() {
            out[(i + e) % m] -= c;
        }
    }
    out
}

fn cyclic_convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let m = a.len();
    let mut out = vec![BigInt::zero(); m];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % m] += x * y;
            }
        }
    }
    out
}

/// Remainder of an integer polynomial by the monic integer `phi`.
fn int_poly_rem(a: &[BigInt], phi: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    while rem.last().map_or(false, |c| c.is_zero()) {
        rem.pop();
    }
    let dp = phi.len() - 1;
    while rem.len() > dp {
        let coef = rem.pop().unwrap();
        if coef.is_zero() {
            continue;
        }
        let i = rem.len() - dp;
        for j in 0..dp {
            rem[i + j] -= &coef * &phi[j];
        }
        while rem.last().map_or(false, |c| c.is_zero()) {
            rem.pop();
        }
    }
    rem
}

/// One-shot exact point defect (builds the context each call).
pub fn defect_point(rn: &RotationNumbers) -> Result<BigRational> {
    GsigContext::new(rn.m)?.defect_point(rn.a, rn.b)
}

/// Defect of a fixed surface of self-intersection `cc` under a prime-order
/// action: `(p^2 - 1)/3 * cc`, exact.
pub fn defect_surface(p: u64, cc: i64) -> BigRational {
    BigRational::new(BigInt::from((p * p - 1) as i64 * cc), BigInt::from(3))
}

/// Floating-point oracle for the point defect, by direct summation of
/// cotangent terms: `(1 + e^{it})/(1 - e^{it}) = i cot(t/2)`, so each term
/// `(i cot)(i cot)` is real.
pub fn defect_point_numeric(rn: &RotationNumbers) -> Result<f64> {
    let m = rn.m;
    let au = rn.a.rem_euclid(m as i64) as u64;
    let bu = rn.b.rem_euclid(m as i64) as u64;
    if au.gcd(&m) != 1 || bu.gcd(&m) != 1 {
        return Err(Error::Precondition("rotation numbers must be coprime to m".into()));
    }
    let pi = std::f64::consts::PI;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 1..m {
        let ta = pi * ((k * au % m) as f64) / m as f64;
        let tb = pi * ((k * bu % m) as f64) / m as f64;
        let term = -(ta.cos() / ta.sin()) * (tb.cos() / tb.sin());
        // Kahan summation.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Balance report for a standard linear action on a single `CP^2`.
#[derive(Debug, Clone, Serialize)]
pub struct GsigReport {
    pub m: u64,
    pub a: i64,
    pub b: i64,
    /// `m * sig(quotient) - sig = m - 1` for the definite form.
    pub lhs: i64,
    /// Exact defects at the three fixed points, as `num/den` strings.
    pub defects: Vec<String>,
    pub holds: bool,
}

/// Check the exact balance identity `m - 1 = sum of the three point defects`
/// for the linear action with weights `(a, b)` mod odd `m`.
pub fn verify_gsignature_cp2(a: i64, b: i64, m: u64) -> Result<GsigReport> {
    if m < 3 || m % 2 == 0 {
        return Err(Error::Precondition("the balance check needs odd m >= 3".into()));
    }
    let ctx = GsigContext::new(m)?;
    verify_gsignature_cp2_with(&ctx, a, b)
}

/// Same as [`verify_gsignature_cp2`] but reusing a context (for sweeps).
pub fn verify_gsignature_cp2_with(ctx: &GsigContext, a: i64, b: i64) -> Result<GsigReport> {
    let m = ctx.m;
    let mi = m as i64;
    let gcd_ok = |x: i64| (x.rem_euclid(mi) as u64).gcd(&m) == 1;
    if !gcd_ok(a) || !gcd_ok(b) || !gcd_ok(a - b) {
        return Err(Error::Precondition(
            "weights a, b, a-b must all be units mod m".into(),
        ));
    }
    let d1 = ctx.defect_point(a, b)?;
    let d2 = ctx.defect_point(-a, b - a)?;
    let d3 = ctx.defect_point(-b, a - b)?;
    let total = &d1 + &d2 + &d3;
    let lhs = mi - 1;
    let holds = total == BigRational::from_integer(BigInt::from(lhs));
    Ok(GsigReport {
        m,
        a,
        b,
        lhs,
        defects: vec![d1.to_string(), d2.to_string(), d3.to_string()],
        holds,
    })
}

/// Lossy conversion for reports and tolerance checks.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cyclotomic_polys() {
        let as_i64 = |p: Vec<BigInt>| -> Vec<i64> { p.iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(cyclotomic_poly(1).unwrap()), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_poly(2).unwrap()), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_poly(3).unwrap()), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_poly(12).unwrap()), vec![1, 0, -1, 0, 1]);
        // Degree of Phi_m is Euler's totient.
        assert_eq!(cyclotomic_poly(45).unwrap().len() - 1, 24);
        assert_eq!(cyclotomic_poly(512).unwrap().len() - 1, 256);
    }

    #[test]
    fn point_defects_exact() {
        // p = 2: the defect of a point vanishes.
        let rn = RotationNumbers::new(1, 1, 2).unwrap();
        assert_eq!(defect_point(&rn).unwrap(), BigRational::zero());
        assert_eq!(defect_point_numeric(&rn).unwrap().abs() < 1e-12, true);

        let rn = RotationNumbers::new(1, 2, 3).unwrap();
        assert_eq!(defect_point(&rn).unwrap(), q(2, 3));

        // (1,1;3): cross-check against the numeric oracle.
        let rn = RotationNumbers::new(1, 1, 3).unwrap();
        let exact = defect_point(&rn).unwrap();
        let numeric = defect_point_numeric(&rn).unwrap();
        assert!((rational_to_f64(&exact) - numeric).abs() < 1e-9);

        // Non-coprime weights are rejected.
        assert!(defect_point(&RotationNumbers::new(3, 1, 9).unwrap()).is_err());
    }

    #[test]
    fn defect_symmetries() {
        let ctx = GsigContext::new(15).unwrap();
        for (a, b) in [(1, 2), (2, 7), (4, 11)] {
            let d = ctx.defect_point(a, b).unwrap();
            assert_eq!(ctx.defect_point(b, a).unwrap(), d);
            assert_eq!(ctx.defect_point(-a, -b).unwrap(), d);
        }
    }

    #[test]
    fn surface_defects() {
        assert_eq!(defect_surface(2, 1), q(1, 1));
        assert_eq!(defect_surface(3, 0), BigRational::zero());
        assert_eq!(defect_surface(5, -2), q(-16, 1));
    }

    #[test]
    fn balance_small() {
        let r = verify_gsignature_cp2(1, 2, 3).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, 2);
        assert_eq!(r.defects, vec!["2/3", "2/3", "2/3"]);

        assert!(verify_gsignature_cp2(1, 2, 5).unwrap().holds);
        assert!(verify_gsignature_cp2(1, 3, 7).unwrap().holds);
        assert!(verify_gsignature_cp2(2, 3, 5).unwrap().holds);

        assert!(verify_gsignature_cp2(1, 2, 4).is_err());
        assert!(verify_gsignature_cp2(1, 1, 5).is_err()); // a - b not a unit
    }

    #[test]
    fn exact_matches_numeric() {
        for m in [3u64, 5, 9, 15, 101] {
            let ctx = GsigContext::new(m).unwrap();
            let mut checked = 0;
            for b in 2..m.min(12) {
                if b.gcd(&m) != 1 {
                    continue;
                }
                let exact = ctx.defect_point(1, b as i64).unwrap();
                let numeric =
                    defect_point_numeric(&RotationNumbers::new(1, b as i64, m).unwrap()).unwrap();
                assert!((rational_to_f64(&exact) - numeric).abs() < 1e-9, "m={m} b={b}");
                checked += 1;
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn rotation_number_canonicalization() {
        let a = RotationNumbers::new(2, 3, 7).unwrap();
        let b = RotationNumbers::new(3, 2, 7).unwrap();
        let c = RotationNumbers::new(-2, -3, 7).unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), c.canonical());
    }

    #[test]
    fn euclid_inverse_agrees_with_product_identity() {
        // (1 + z^j)/(1 - z^j) via extended Euclid equals the context's
        // product-identity route, for every nonzero exponent.
        for m in [3u64, 4, 9, 15, 21] {
            let ctx = GsigContext::new(m).unwrap();
            for j in 1..m {
                let one = CycloElement::from_rational(m, BigRational::one()).unwrap();
                let zj = CycloElement::zeta_pow(m, j).unwrap();
                let g = one.add(&zj).unwrap().mul(&one.sub(&zj).unwrap().inv().unwrap()).unwrap();
                let lifted = CycloElement::new(
                    m,
                    ctx.g_num[j as usize]
                        .iter()
                        .map(|c| BigRational::new(c.clone(), ctx.g_den[j as usize].clone()))
                        .collect(),
                )
                .unwrap();
                assert_eq!(g, lifted, "m={m} j={j}");
            }
        }
    }

    #[test]
    fn cyclo_field_arithmetic() {
        // zeta^2 * zeta^(m-2) = 1; (1 - zeta) has the inverse with
        // (1 - zeta)^(-1) * (1 - zeta) = 1.
        let m = 12;
        let z2 = CycloElement::zeta_pow(m, 2).unwrap();
        let z10 = CycloElement::zeta_pow(m, 10).unwrap();
        let one = CycloElement::from_rational(m, BigRational::one()).unwrap();
        assert_eq!(z2.mul(&z10).unwrap(), one);
        let u = one.sub(&CycloElement::zeta_pow(m, 1).unwrap()).unwrap();
        assert_eq!(u.inv().unwrap().mul(&u).unwrap(), one);
        assert!(CycloElement::from_rational(m, BigRational::zero()).unwrap().inv().is_err());
    }
}
