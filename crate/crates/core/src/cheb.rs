//! The Chebyshev polynomial phi_d over finite fields: the monic polynomial
//! with phi_d(t + 1/t) = t^d + t^{-d}, built from the forced recurrence
//! phi_0 = 2, phi_1 = x, phi_{k+1} = x*phi_k - phi_{k-1}. The closed-form
//! coefficients, the defining Laurent identity, and the cleared rational
//! identities that drive the automorphism results all live here, together
//! with the root-of-unity parametrization of the zero set.
//!
//! Standing hypothesis everywhere: char(k) does not divide 2d.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ff::{element_of_order, make_field, Fq, FieldDesc};
use crate::moebius::Moebius;
use crate::poly::Poly;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Degree and coefficient field for phi_d, with the characteristic condition
/// checked at construction.
#[derive(Clone, Debug)]
pub struct ChebSpec {
    d: u32,
    field: FieldDesc,
}

impl ChebSpec {
    pub fn new(d: u32, field: &FieldDesc) -> Result<ChebSpec> {
        if d == 0 {
            return Err(Error::Precondition("degree must be positive".into()));
        }
        if char_divides_2d(field.p(), d) {
            return Err(Error::CharDividesTwoD { p: field.p(), two_d: 2 * d as u64 });
        }
        Ok(ChebSpec { d, field: field.clone() })
    }

    /// Skips the characteristic check. Exists only so tests can exhibit the
    /// inseparable degenerations; library code must use `new`.
    pub fn new_unchecked(d: u32, field: &FieldDesc) -> ChebSpec {
        ChebSpec { d, field: field.clone() }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }
}

pub fn char_divides_2d(p: u64, d: u32) -> bool {
    p == 2 || (d as u64) % p == 0
}

/// phi_d by the recurrence; monic of degree d, separable under the standing
/// hypothesis.
pub fn cheb(spec: &ChebSpec) -> Poly {
    let field = &spec.field;
    let mut prev = Poly::constant(field.from_u64(2));
    if spec.d == 0 {
        return prev;
    }
    let x = Poly::x(field);
    let mut cur = x.clone();
    for _ in 1..spec.d {
        let next = x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// phi_d over F_p, checked.
pub fn cheb_over_prime(d: u32, p: u64) -> Result<Poly> {
    let field = make_field(p, 1)?;
    Ok(cheb(&ChebSpec::new(d, &field)?))
}

/// The exact integer coefficient of x^(d-2j): (-1)^j * d/(d-j) * C(d-j, j),
/// computed as d * C(d-j, j) / (d-j) with the division checked exact.
pub fn cheb_coefficient_int(d: u32, j: u32) -> Result<BigInt> {
    if d == 0 {
        return if j == 0 {
            Ok(BigInt::from(2))
        } else {
            Err(Error::Precondition("coefficient index out of range".into()))
        };
    }
    if j > d / 2 {
        return Err(Error::Precondition(format!("coefficient index {j} > {}", d / 2)));
    }
    let binom = binomial(d - j, j);
    let num = BigInt::from(d) * BigInt::from(binom);
    let (q, r) = num.div_rem(&BigInt::from(d - j));
    debug_assert!(r.is_zero(), "d/(d-j) * C(d-j, j) is an integer");
    Ok(if j % 2 == 1 { -q } else { q })
}

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Closed-form coefficient reduced into the field.
pub fn cheb_coefficient(d: u32, j: u32, field: &FieldDesc) -> Result<Fq> {
    let c = cheb_coefficient_int(d, j)?;
    let p = BigInt::from(field.p());
    let r = c.mod_floor(&p);
    debug_assert!(!r.is_negative());
    let v: u64 = r.to_biguint().unwrap().try_into().expect("residue fits u64");
    Ok(field.from_u64(v))
}

/// The polynomial with the closed-form coefficients in place: the
/// independent route against the recurrence.
pub fn cheb_from_coefficients(d: u32, field: &FieldDesc) -> Result<Poly> {
    let mut c = vec![field.zero(); d as usize + 1];
    for j in 0..=d / 2 {
        c[(d - 2 * j) as usize] = cheb_coefficient(d, j, field)?;
    }
    Ok(Poly::new(field, c))
}

/// Checks t^d * phi_d((t^2 + 1)/t) = t^(2d) + 1 as a polynomial identity in
/// t (denominators cleared). True for every valid spec.
pub fn laurent_identity_holds(spec: &ChebSpec) -> bool {
    let f = cheb(spec);
    laurent_identity_for_poly(&f, spec.d)
}

/// The same cleared identity with an arbitrary f in place of phi_d; lets
/// tests run mutation controls.
pub fn laurent_identity_for_poly(f: &Poly, d: u32) -> bool {
    let field = f.field();
    // sum_i c_i (t^2+1)^i t^(d-i), accumulating powers of t^2 + 1
    let b = Poly::from_i64(field, &[1, 0, 1]);
    let mut bpow = Poly::one(field);
    let mut acc = Poly::zero(field);
    for i in 0..=d as usize {
        let ci = f.coeff(i);
        if !ci.is_zero() {
            acc = acc.add(&bpow.scale(&ci).shift(d as usize - i));
        }
        if i < d as usize {
            bpow = bpow.mul(&b);
        }
    }
    let rhs = Poly::monomial(field.one(), 2 * d as usize).add(&Poly::one(field));
    acc == rhs
}

/// Is x = p^r for some r >= 1? Returns r.
pub fn prime_power_exponent(x: u64, p: u64) -> Option<u32> {
    if x < p || p < 2 {
        return None;
    }
    let mut v = x;
    let mut r = 0;
    while v % p == 0 {
        v /= p;
        r += 1;
    }
    if v == 1 {
        Some(r)
    } else {
        None
    }
}

/// The cleared exceptional-case identity
/// (t^2 - 2t + 1)^d + (t^2 + 2t + 1)^d = 2t^(2d) + 2 in F_p[t].
/// Holds exactly when 2d = q + 1 for q a power of p.
pub fn exceptional_identity_holds(d: u32, p: u64) -> Result<bool> {
    if p == 2 || !crate::ff::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if char_divides_2d(p, d) {
        return Err(Error::CharDividesTwoD { p, two_d: 2 * d as u64 });
    }
    let field = make_field(p, 1)?;
    let lhs = Poly::from_i64(&field, &[1, -2, 1])
        .pow(d as u64)
        .add(&Poly::from_i64(&field, &[1, 2, 1]).pow(d as u64));
    let rhs =
        Poly::monomial(field.from_u64(2), 2 * d as usize).add(&Poly::constant(field.from_u64(2)));
    Ok(lhs == rhs)
}

/// The cleared Fermat-pullback identity
/// (u - 1)^d * phi_d((2u + 2)/(u - 1)) = 2u^d + 2 in F_p[u].
/// Holds when 2d = q + 1 for q a power of p.
pub fn fermat_pullback_identity_holds(d: u32, p: u64) -> Result<bool> {
    let field = make_field(p, 1)?;
    let spec = ChebSpec::new(d, &field)?;
    let f = cheb(&spec);
    let mu = Moebius::from_i64(&field, [2, 2, 1, -1])?;
    let (h, _) = f.compose_moebius(&mu)?;
    let rhs =
        Poly::monomial(field.from_u64(2), d as usize).add(&Poly::constant(field.from_u64(2)));
    Ok(h == rhs)
}

/// The cleared order-3 invariance identity
/// (2 - x)^d * phi_d((2x + 12)/(2 - x)) = 2 * phi_d(x) in F_p[x],
/// plus the scalar fact (-4)^d = 2 whenever 4d = p^r + 1.
/// The identity holds when 4d = q + 1 for q a power of p.
pub fn order3_invariance_identity_holds(d: u32, p: u64) -> Result<bool> {
    let field = make_field(p, 1)?;
    let spec = ChebSpec::new(d, &field)?;
    let f = cheb(&spec);
    let mu = Moebius::from_i64(&field, [2, 12, -1, 2])?;
    let (h, _) = f.compose_moebius(&mu)?;
    let identity = h == f.scale(&field.from_u64(2));
    if prime_power_exponent(4 * d as u64 - 1, p).is_some() {
        let scalar = field.from_i64(-4).pow(d as u64) == field.from_u64(2);
        Ok(identity && scalar)
    } else {
        Ok(identity)
    }
}

/// Degree of the splitting field of phi_d over F_p: the order of p in
/// (Z/4dZ)^x modulo {±1}. (The zeros are zeta^k + zeta^(-k) for zeta of
/// order 4d, and Frobenius acts on them through that quotient.)
pub fn splitting_degree_arith(d: u32, p: u64) -> Result<u32> {
    if char_divides_2d(p, d) {
        return Err(Error::CharDividesTwoD { p, two_d: 2 * d as u64 });
    }
    let n = 4 * d as u64;
    let mut cur = p % n;
    for k in 1..=n {
        if cur == 1 || cur == n - 1 {
            return Ok(k as u32);
        }
        cur = cur * p % n;
    }
    unreachable!("p is a unit mod 4d")
}

/// Multiplicative order of p modulo 4d: the degree of the field where a
/// primitive 4d-th root of unity first lives.
fn order_of_p_mod_4d(d: u32, p: u64) -> u32 {
    let n = 4 * d as u64;
    let mut cur = p % n;
    for k in 1..=n {
        if cur == 1 {
            return k as u32;
        }
        cur = cur * p % n;
    }
    unreachable!("p is a unit mod 4d")
}

/// The zero set of phi_d over F_p, materialized without any enumeration.
#[derive(Clone, Debug)]
pub struct ChebRoots {
    /// F_{p^M} with M the order of p mod 4d; contains a primitive 4d-th root
    /// of unity and hence every zero. The true splitting field is the
    /// subfield of degree `splitting_degree`.
    pub field: FieldDesc,
    /// All d zeros, sorted canonically.
    pub roots: Vec<Fq>,
    /// Degree of the splitting field over F_p.
    pub splitting_degree: u32,
}

/// Zeros of phi_d in closed form: x = zeta^k + zeta^(-k) for k odd,
/// 1 <= k < 2d, where zeta has multiplicative order exactly 4d. This is
/// forced by the defining identity (phi_d(t + 1/t) = 0 iff t^(2d) = -1) and
/// sidesteps exhaustive root search, so it works in fields far beyond the
/// enumeration cap. Every returned value is re-checked against phi_d.
pub fn cheb_roots(d: u32, p: u64) -> Result<ChebRoots> {
    if !crate::ff::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if char_divides_2d(p, d) {
        return Err(Error::CharDividesTwoD { p, two_d: 2 * d as u64 });
    }
    if d == 0 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let m = order_of_p_mod_4d(d, p);
    let field = make_field(p, m)?;
    let zeta = element_of_order(&field, 4 * d as u64)
        .ok_or_else(|| Error::InvariantBreach("no element of order 4d in F_{p^M}".into()))?;
    let zeta_inv = zeta.inv()?;
    let mut roots: Vec<Fq> = Vec::with_capacity(d as usize);
    for k in (1..2 * d as u64).step_by(2) {
        let x = zeta.pow(k).add(&zeta_inv.pow(k));
        roots.push(x);
    }
    roots.sort();
    roots.dedup();
    if roots.len() != d as usize {
        return Err(Error::InvariantBreach(format!(
            "expected {d} distinct zeros, found {}",
            roots.len()
        )));
    }
    let phi = cheb(&ChebSpec::new(d, &make_field(p, 1)?)?).embed_into(&field, &Caps::default())?;
    for r in &roots {
        if !phi.eval(r).is_zero() {
            return Err(Error::InvariantBreach("parametrized zero fails phi_d(x) = 0".into()));
        }
    }
    Ok(ChebRoots { field, roots, splitting_degree: splitting_degree_arith(d, p)? })
}
