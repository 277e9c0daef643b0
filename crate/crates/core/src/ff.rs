//! Exact arithmetic in F_p and F_{p^m}.
//!
//! Field construction is deterministic: `make_field(p, m)` always picks the
//! lexicographically first monic irreducible of degree m over F_p
//! (coefficients compared low-to-high), so two runs agree element for element.
//! Elements are coefficient vectors over the power basis of that polynomial
//! and carry a handle to their field; mixing fields in arithmetic is a bug and
//! panics rather than coercing.
//!
//! The canonical element order is the base-p integer rank of the coefficient
//! vector (c_i is the p^i digit); enumeration, "smallest root" choices and
//! report payloads all use it.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exec;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Hard limit on extension degrees; enumeration caps are enforced separately
/// by each operation that walks field elements.
pub const MAX_EXTENSION_DEGREE: u32 = 64;

// ---- scalar arithmetic mod p ----

#[inline]
fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    acc
}

fn invm(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    powm(a, p - 2, p)
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---- raw polynomials over F_p (coefficient vectors, low degree first) ----
// Internal helpers shared by the irreducibility certificate and by Fq
// arithmetic. Vectors are kept trimmed (no trailing zeros).

fn ptrim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(ai, bj, p), p);
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of a modulo the monic polynomial f.
fn prem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*f.last().unwrap(), 1);
    let df = f.len() - 1;
    let mut r = a.to_vec();
    ptrim(&mut r);
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        for i in 0..df {
            let t = mulm(lead, f[i], p);
            r[shift + i] = subm(r[shift + i], t, p);
        }
        r.pop();
        ptrim(&mut r);
    }
    r
}

fn pmulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    prem(&pmul(a, b, p), f, p)
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    ptrim(&mut x);
    ptrim(&mut y);
    while !y.is_empty() {
        // reduce x mod y (y made monic on the fly)
        let lead_inv = invm(*y.last().unwrap(), p);
        let ym: Vec<u64> = y.iter().map(|&c| mulm(c, lead_inv, p)).collect();
        let r = prem(&x, &ym, p);
        x = y;
        y = r;
    }
    if let Some(&l) = x.last() {
        let li = invm(l, p);
        for c in &mut x {
            *c = mulm(*c, li, p);
        }
    }
    x
}

fn ppowmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = pmulmod(&acc, &b, f, p);
        }
        b = pmulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

/// Certificate: monic f of degree m is irreducible over F_p iff
/// gcd(f, x^(p^i) - x) = 1 for all i <= m/2 and x^(p^m) = x mod f.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    let mut r = vec![0u64, 1];
    for i in 1..=m {
        r = ppowmod(&r, p, f, p);
        if i <= m / 2 {
            // gcd(f, x^(p^i) - x)
            let mut diff = r.clone();
            while diff.len() < 2 {
                diff.push(0);
            }
            diff[1] = subm(diff[1], 1, p);
            ptrim(&mut diff);
            let g = pgcd(f, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
    }
    r == vec![0, 1]
}

// ---- field descriptor ----

#[derive(Debug)]
struct FieldData {
    p: u64,
    m: u32,
    defining: Vec<u64>, // monic, length m+1
    size: BigUint,
    size_u64: Option<u64>,
    /// Row k holds x^(m+k) mod defining, so multiplication can reduce by a
    /// table scan instead of long division.
    reduction_rows: Vec<Vec<u64>>,
    /// Lazy accumulation is overflow-safe when (p-1)^2 * m fits u64 with
    /// plenty of headroom (p < 2^21, m <= 64 gives sums below 2^48).
    small_char: bool,
}

/// Description of F_{p^m}: characteristic, degree and the defining monic
/// irreducible. Cheap to clone (shared handle). Equality is (p, m) equality —
/// the defining polynomial is determined by construction.
#[derive(Clone)]
pub struct FieldDesc(Arc<FieldData>);

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.m == other.0.m
    }
}
impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{{{}^{}}}", self.0.p, self.0.m)
        }
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl serde::Serialize for FieldDesc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FieldDesc", 3)?;
        st.serialize_field("p", &self.0.p)?;
        st.serialize_field("m", &self.0.m)?;
        st.serialize_field("defining_poly", &self.0.defining)?;
        st.end()
    }
}

/// Construct F_{p^m} with the canonical defining polynomial.
pub fn make_field(p: u64, m: u32) -> Result<FieldDesc> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 || m > MAX_EXTENSION_DEGREE {
        return Err(Error::DegreeTooLarge { requested: m, limit: MAX_EXTENSION_DEGREE });
    }
    let defining = if m == 1 {
        vec![0, 1] // x, the first monic degree-1 polynomial
    } else {
        first_irreducible(p, m)
    };
    let size = BigUint::from(p).pow(m);
    let size_u64 = size.to_u64();
    let mut reduction_rows = Vec::with_capacity(m.saturating_sub(1) as usize);
    let mut row = prem(&[vec![0; m as usize], vec![1]].concat(), &defining, p); // x^m mod f
    for _ in 0..m.saturating_sub(1) {
        row.resize(m as usize, 0);
        reduction_rows.push(row.clone());
        row.insert(0, 0); // multiply by x
        row = prem(&row, &defining, p);
    }
    let small_char = p < (1 << 21);
    Ok(FieldDesc(Arc::new(FieldData {
        p,
        m,
        defining,
        size,
        size_u64,
        reduction_rows,
        small_char,
    })))
}

/// Lexicographically first monic irreducible of degree m over F_p, comparing
/// coefficient tuples (c_0, ..., c_{m-1}) low-to-high. Polynomials with
/// c_0 = 0 are divisible by x, so the scan starts at c_0 = 1.
fn first_irreducible(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    let mut tail = vec![0u64; m]; // (c_0, ..., c_{m-1}), c_0 most significant
    tail[0] = 1;
    loop {
        let mut f = tail.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        // odometer: last coordinate fastest
        let mut i = m - 1;
        loop {
            tail[i] += 1;
            if tail[i] < p {
                break;
            }
            tail[i] = 0;
            assert!(i > 0, "no irreducible of degree {m} over F_{p}");
            i -= 1;
        }
    }
}

impl FieldDesc {
    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    /// Monic defining polynomial, low coefficients first (length m+1).
    pub fn defining_poly(&self) -> &[u64] {
        &self.0.defining
    }

    pub fn size(&self) -> &BigUint {
        &self.0.size
    }

    /// Field size when it fits in a u64.
    pub fn size_u64(&self) -> Option<u64> {
        self.0.size_u64
    }

    pub fn zero(&self) -> Fq {
        Fq { field: self.clone(), c: vec![0; self.0.m as usize] }
    }

    pub fn one(&self) -> Fq {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> Fq {
        let mut c = vec![0; self.0.m as usize];
        c[0] = v % self.0.p;
        Fq { field: self.clone(), c }
    }

    /// Signed integer constant, reduced into [0, p).
    pub fn from_i64(&self, v: i64) -> Fq {
        let p = self.0.p as i64;
        let r = v.rem_euclid(p) as u64;
        self.from_u64(r)
    }

    /// The class of x in F_p[x]/(defining). For m = 1 this is 0, the root of
    /// the defining polynomial x.
    pub fn gen(&self) -> Fq {
        let mut c = vec![0; self.0.m as usize];
        if self.0.m > 1 {
            c[1] = 1;
        }
        Fq { field: self.clone(), c }
    }

    pub fn from_coeffs(&self, coeffs: Vec<u64>) -> Fq {
        assert_eq!(coeffs.len(), self.0.m as usize, "coefficient vector has wrong length");
        let c = coeffs.into_iter().map(|v| v % self.0.p).collect();
        Fq { field: self.clone(), c }
    }

    /// Element of canonical rank `idx` (base-p digits, c_i = digit of p^i).
    pub fn element_at(&self, idx: u64) -> Fq {
        let p = self.0.p;
        let mut c = vec![0; self.0.m as usize];
        let mut n = idx;
        for ci in c.iter_mut() {
            *ci = n % p;
            n /= p;
        }
        debug_assert_eq!(n, 0, "index out of range");
        Fq { field: self.clone(), c }
    }

    /// Iterate all elements in canonical order. Callers enforce the
    /// enumeration cap before asking for this.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        let q = self.size_u64().expect("field too large to enumerate");
        (0..q).map(move |i| self.element_at(i))
    }

    /// Enumeration guard: error unless p^m <= cap (and fits u64).
    pub fn check_enumerable(&self, caps: &Caps) -> Result<u64> {
        match self.size_u64() {
            Some(q) if q <= caps.enumeration => Ok(q),
            _ => Err(Error::EnumerationCap { size: self.0.size.clone(), cap: caps.enumeration }),
        }
    }
}

// ---- field elements ----

/// An element of F_{p^m}: coordinates over the power basis, all in [0, p).
#[derive(Clone)]
pub struct Fq {
    field: FieldDesc,
    c: Vec<u64>,
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.c == other.c
    }
}
impl Eq for Fq {}

impl std::hash::Hash for Fq {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.p().hash(state);
        self.field.degree().hash(state);
        self.c.hash(state);
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by field (p, m), then by base-p integer rank, i.e.
/// comparing coordinates from the highest power down.
impl Ord for Fq {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field.p(), self.field.degree())
            .cmp(&(other.field.p(), other.field.degree()))
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_prime_field() {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?}", self.c)
        }
    }
}

impl serde::Serialize for Fq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.c.iter())
    }
}

fn assert_same_field(a: &Fq, b: &Fq) {
    assert!(
        a.field == b.field,
        "mixed-field arithmetic: {:?} vs {:?}",
        a.field,
        b.field
    );
}

impl Fq {
    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&v| v == 0)
    }

    /// Canonical rank when the field fits in a u64.
    pub fn rank(&self) -> Option<u64> {
        self.field.size_u64()?;
        let p = self.field.p();
        let mut n: u64 = 0;
        for &ci in self.c.iter().rev() {
            n = n * p + ci;
        }
        Some(n)
    }

    pub fn add(&self, other: &Fq) -> Fq {
        assert_same_field(self, other);
        let p = self.field.p();
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| addm(a, b, p)).collect();
        Fq { field: self.field.clone(), c }
    }

    pub fn sub(&self, other: &Fq) -> Fq {
        assert_same_field(self, other);
        let p = self.field.p();
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| subm(a, b, p)).collect();
        Fq { field: self.field.clone(), c }
    }

    pub fn neg(&self) -> Fq {
        let p = self.field.p();
        let c = self.c.iter().map(|&a| subm(0, a, p)).collect();
        Fq { field: self.field.clone(), c }
    }

    pub fn mul(&self, other: &Fq) -> Fq {
        assert_same_field(self, other);
        let data = &self.field.0;
        let p = data.p;
        let m = data.m as usize;
        if m == 1 {
            return Fq { field: self.field.clone(), c: vec![mulm(self.c[0], other.c[0], p)] };
        }
        if data.small_char {
            // lazy schoolbook convolution: sums stay below 2^48
            let mut conv = vec![0u64; 2 * m - 1];
            for (i, &ai) in self.c.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                for (j, &bj) in other.c.iter().enumerate() {
                    conv[i + j] += ai * bj;
                }
            }
            for v in conv.iter_mut() {
                *v %= p;
            }
            // reduce the overflow coefficients through the precomputed rows
            let mut out = vec![0u64; m];
            out.copy_from_slice(&conv[..m]);
            for (k, row) in data.reduction_rows.iter().enumerate() {
                let hi = conv[m + k];
                if hi == 0 {
                    continue;
                }
                for (o, &r) in out.iter_mut().zip(row.iter()) {
                    *o += hi * r;
                }
            }
            for v in out.iter_mut() {
                *v %= p;
            }
            Fq { field: self.field.clone(), c: out }
        } else {
            let prod = pmul(&self.c, &other.c, p);
            let mut r = prem(&prod, &data.defining, p);
            r.resize(m, 0);
            Fq { field: self.field.clone(), c: r }
        }
    }

    pub fn square(&self) -> Fq {
        self.mul(self)
    }

    pub fn inv(&self) -> Result<Fq> {
        if self.is_zero() {
            return Err(Error::ZeroInversion);
        }
        let p = self.field.p();
        if self.field.is_prime_field() {
            return Ok(self.field.from_u64(invm(self.c[0], p)));
        }
        // extended Euclid in F_p[x]: find u with u * self = 1 mod defining
        let mut r0: Vec<u64> = self.field.defining_poly().to_vec();
        let mut r1: Vec<u64> = self.c.clone();
        ptrim(&mut r1);
        let mut t0: Vec<u64> = Vec::new();
        let mut t1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // divide r0 by r1
            let lead_inv = invm(*r1.last().unwrap(), p);
            let mut rem = r0.clone();
            let mut quo = vec![0u64; rem.len().saturating_sub(r1.len()) + 1];
            while rem.len() >= r1.len() && !rem.is_empty() {
                let coef = mulm(*rem.last().unwrap(), lead_inv, p);
                let shift = rem.len() - r1.len();
                quo[shift] = coef;
                for (i, &fi) in r1.iter().enumerate() {
                    rem[shift + i] = subm(rem[shift + i], mulm(coef, fi, p), p);
                }
                ptrim(&mut rem);
            }
            ptrim(&mut quo);
            // (r0, r1) = (r1, rem); (t0, t1) = (t1, t0 - q*t1)
            let qt1 = pmul(&quo, &t1, p);
            let mut tnew = t0.clone();
            tnew.resize(tnew.len().max(qt1.len()), 0);
            for (i, &v) in qt1.iter().enumerate() {
                tnew[i] = subm(tnew[i], v, p);
            }
            ptrim(&mut tnew);
            r0 = r1;
            r1 = rem;
            t0 = t1;
            t1 = tnew;
        }
        // r0 = gcd (a nonzero constant since defining is irreducible)
        debug_assert_eq!(r0.len(), 1);
        let scale = invm(r0[0], p);
        let mut c: Vec<u64> = t0.iter().map(|&v| mulm(v, scale, p)).collect();
        c.resize(self.field.degree() as usize, 0);
        Ok(Fq { field: self.field.clone(), c })
    }

    pub fn pow(&self, e: u64) -> Fq {
        let mut acc = self.field.one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.square();
            e >>= 1;
        }
        acc
    }

    /// Power with signed exponent; negative exponents invert first.
    pub fn pow_i64(&self, e: i64) -> Result<Fq> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    pub fn pow_big(&self, e: &BigUint) -> Fq {
        if e.is_zero() {
            return self.field.one();
        }
        let bits = e.bits();
        let mut acc = self.clone();
        // most-significant bit first
        for i in (0..bits - 1).rev() {
            acc = acc.square();
            if e.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    /// The characteristic-p Frobenius e -> e^p.
    pub fn frobenius(&self) -> Fq {
        self.pow(self.field.p())
    }
}

/// Smallest element (canonical order) of multiplicative order exactly n, if
/// the field has one (i.e. n | p^m - 1). Found by powering candidates to
/// (q-1)/n and checking exact order against the prime divisors of n; no
/// enumeration cap applies because a hit arrives within a few candidates.
pub fn element_of_order(field: &FieldDesc, n: u64) -> Option<Fq> {
    let group = field.size() - 1u32;
    let nn = BigUint::from(n);
    if !(&group % &nn).is_zero() {
        return None;
    }
    let cofactor = &group / &nn;
    let prime_divs: Vec<u64> = {
        let mut v = Vec::new();
        let mut rest = n;
        let mut d = 2;
        while d * d <= rest {
            if rest % d == 0 {
                v.push(d);
                while rest % d == 0 {
                    rest /= d;
                }
            }
            d += 1;
        }
        if rest > 1 {
            v.push(rest);
        }
        v
    };
    // walk candidates in canonical order; roughly phi(n)/n of them hit
    let mut idx: u64 = 1;
    loop {
        let e = field.element_at(idx);
        let z = e.pow_big(&cofactor);
        if !z.is_zero() && prime_divs.iter().all(|&r| !z.pow(n / r).is_one()) && z.pow(n).is_one()
        {
            return Some(z);
        }
        idx += 1;
        if Some(idx) == field.size_u64() {
            return None;
        }
        assert!(idx < 1 << 20, "order-{n} element search ran away");
    }
}

macro_rules! fq_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&Fq> for &Fq {
            type Output = Fq;
            fn $method(self, rhs: &Fq) -> Fq {
                Fq::$method(self, rhs)
            }
        }
        impl std::ops::$trait<Fq> for Fq {
            type Output = Fq;
            fn $method(self, rhs: Fq) -> Fq {
                Fq::$method(&self, &rhs)
            }
        }
    };
}
fq_binop!(Add, add);
fq_binop!(Sub, sub);
fq_binop!(Mul, mul);

impl std::ops::Neg for &Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        Fq::neg(self)
    }
}
impl std::ops::Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        Fq::neg(&self)
    }
}

// ---- n-th roots ----

/// Smallest r (canonical order) with r^n = e, if one exists in e's field.
/// Existence in F_q^x is e^((q-1)/gcd(n, q-1)) = 1; the witness itself is
/// found by exhaustive scan, so the field must be within the enumeration cap.
pub fn nth_root(e: &Fq, n: u64, caps: &Caps) -> Result<Option<Fq>> {
    assert!(n >= 1, "n-th root needs n >= 1");
    if e.is_zero() {
        return Ok(Some(e.field().zero()));
    }
    if !nth_root_exists(e, n) {
        return Ok(None);
    }
    let q = e.field().check_enumerable(caps)?;
    let field = e.field().clone();
    let found = exec::find_first_range(0, q, |i| {
        let r = field.element_at(i);
        if r.pow(n) == *e {
            Some(r)
        } else {
            None
        }
    });
    debug_assert!(found.is_some());
    Ok(found)
}

/// Existence test alone (no cap needed): e^((q-1)/gcd(n, q-1)) = 1.
pub fn nth_root_exists(e: &Fq, n: u64) -> bool {
    if e.is_zero() {
        return true;
    }
    let group = e.field().size() - 1u32;
    let g = group.gcd(&BigUint::from(n));
    e.pow_big(&(&group / &g)).is_one()
}

/// Does e acquire an n-th root in the degree-j extension of its own field?
/// Pure exponent arithmetic; the extension is not constructed.
pub fn nth_root_exists_in_extension(e: &Fq, n: u64, j: u32) -> bool {
    if e.is_zero() {
        return true;
    }
    let big_group = e.field().size().pow(j) - 1u32;
    let g = big_group.gcd(&BigUint::from(n));
    e.pow_big(&(&big_group / &g)).is_one()
}

// ---- embeddings ----

/// A fixed field embedding F_{p^s} -> F_{p^t} (s | t), determined by sending
/// the source generator to the smallest root of the source defining
/// polynomial in the target.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: FieldDesc,
    dst: FieldDesc,
    gen_image: Fq,
}

impl Embedding {
    pub fn new(src: &FieldDesc, dst: &FieldDesc, caps: &Caps) -> Result<Embedding> {
        if src.p() != dst.p() || dst.degree() % src.degree() != 0 {
            return Err(Error::NoEmbedding {
                p: src.p(),
                src: src.degree(),
                dst: dst.degree(),
            });
        }
        let gen_image = if src == dst {
            dst.gen()
        } else if src.is_prime_field() {
            // defining polynomial is x; its root is 0, and constants embed
            // coefficientwise regardless
            dst.zero()
        } else {
            let q = dst.check_enumerable(caps)?;
            let defining: Vec<u64> = src.defining_poly().to_vec();
            let dstc = dst.clone();
            let roots = exec::filter_map_range(0, q, |i| {
                let x = dstc.element_at(i);
                // Horner with prime-field coefficients
                let mut acc = dstc.zero();
                for &ci in defining.iter().rev() {
                    acc = acc.mul(&x).add(&dstc.from_u64(ci));
                }
                if acc.is_zero() {
                    Some(x)
                } else {
                    None
                }
            });
            roots
                .into_iter()
                .min()
                .ok_or_else(|| Error::InvariantBreach("defining polynomial has no root in a field of divisible degree".into()))?
        };
        Ok(Embedding { src: src.clone(), dst: dst.clone(), gen_image })
    }

    pub fn src(&self) -> &FieldDesc {
        &self.src
    }

    pub fn dst(&self) -> &FieldDesc {
        &self.dst
    }

    pub fn apply(&self, e: &Fq) -> Fq {
        assert!(e.field() == &self.src, "embedding applied to foreign element");
        let mut acc = self.dst.zero();
        for &ci in e.coeffs().iter().rev() {
            acc = acc.mul(&self.gen_image).add(&self.dst.from_u64(ci));
        }
        acc
    }
}

/// One-off embedding of a single element.
pub fn embed(e: &Fq, target: &FieldDesc, caps: &Caps) -> Result<Fq> {
    Ok(Embedding::new(e.field(), target, caps)?.apply(e))
}
