//! Dense univariate polynomials over a `FieldDesc`: ring arithmetic, gcd,
//! separability, Frobenius-powered splitting degrees, root finding, and the
//! cleared Mobius composite (cx+d)^deg(f) * f((ax+b)/(cx+d)).
//!
//! Root finding inside a given field is exhaustive evaluation under the
//! enumeration cap; the extension-tower root extraction used by intersection
//! profiles filters with gcd(f, x^(q^j) - x) and splits the linear parts with
//! a deterministic shift sequence, so it never enumerates a field.

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exec;
use crate::ff::{Embedding, Fq, FieldDesc};
use crate::moebius::Moebius;
use num_bigint::BigUint;
use num_integer::Integer;
use std::fmt;

/// Coefficients low degree first, no trailing zeros; empty vector = 0.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FieldDesc,
    c: Vec<Fq>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, co)| !co.is_zero())
            .map(|(i, co)| match i {
                0 => format!("{co:?}"),
                1 => format!("{co:?}*x"),
                _ => format!("{co:?}*x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Poly", 2)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("coeffs", &self.c)?;
        st.end()
    }
}

impl Poly {
    pub fn new(field: &FieldDesc, coeffs: Vec<Fq>) -> Poly {
        for co in &coeffs {
            assert!(co.field() == field, "coefficient from a different field");
        }
        let mut p = Poly { field: field.clone(), c: coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.c.last().map_or(false, |co| co.is_zero()) {
            self.c.pop();
        }
    }

    pub fn zero(field: &FieldDesc) -> Poly {
        Poly { field: field.clone(), c: Vec::new() }
    }

    pub fn one(field: &FieldDesc) -> Poly {
        Poly { field: field.clone(), c: vec![field.one()] }
    }

    pub fn x(field: &FieldDesc) -> Poly {
        Poly { field: field.clone(), c: vec![field.zero(), field.one()] }
    }

    pub fn constant(v: Fq) -> Poly {
        let field = v.field().clone();
        Poly::new(&field, vec![v])
    }

    pub fn monomial(coef: Fq, deg: usize) -> Poly {
        let field = coef.field().clone();
        let mut c = vec![field.zero(); deg + 1];
        c[deg] = coef;
        Poly::new(&field, c)
    }

    /// Convenience: signed integer coefficients, low degree first.
    pub fn from_i64(field: &FieldDesc, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    /// None for the zero polynomial (the distinguished "minus infinity").
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.c
    }

    pub fn leading_coeff(&self) -> Option<&Fq> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().map_or(false, |co| co.is_one())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert!(self.field == other.field, "mixed-field polynomial arithmetic");
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i).add(&other.coeff(i)));
        }
        let mut p = Poly { field: self.field.clone(), c };
        p.normalize();
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { field: self.field.clone(), c: self.c.iter().map(|co| co.neg()).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert!(self.field == other.field, "mixed-field polynomial arithmetic");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut c = vec![self.field.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        let mut p = Poly { field: self.field.clone(), c };
        p.normalize();
        p
    }

    pub fn scale(&self, s: &Fq) -> Poly {
        let mut p = Poly {
            field: self.field.clone(),
            c: self.c.iter().map(|co| co.mul(s)).collect(),
        };
        p.normalize();
        p
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.field.zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { field: self.field.clone(), c }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        if self.field != divisor.field {
            return Err(Error::FieldMismatch {
                p1: self.field.p(),
                m1: self.field.degree(),
                p2: divisor.field.p(),
                m2: divisor.field.degree(),
            });
        }
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomialDivision);
        }
        let dd = divisor.c.len() - 1;
        let lead_inv = divisor.leading_coeff().unwrap().inv()?;
        let mut rem = self.c.clone();
        let mut quo = vec![self.field.zero(); self.c.len().saturating_sub(dd)];
        while rem.len() > dd {
            let coef = rem.last().unwrap().mul(&lead_inv);
            let shift = rem.len() - 1 - dd;
            if !coef.is_zero() {
                for (i, di) in divisor.c.iter().enumerate().take(dd) {
                    rem[shift + i] = rem[shift + i].sub(&coef.mul(di));
                }
            }
            quo[shift] = coef;
            rem.pop();
            while rem.last().map_or(false, |co| co.is_zero()) {
                rem.pop();
            }
        }
        let mut q = Poly { field: self.field.clone(), c: quo };
        q.normalize();
        let mut r = Poly { field: self.field.clone(), c: rem };
        r.normalize();
        Ok((q, r))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        assert!(self.field == other.field, "mixed-field polynomial arithmetic");
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match a.leading_coeff() {
            Some(l) if !l.is_one() => {
                let li = l.inv().expect("leading coefficient nonzero");
                a.scale(&li)
            }
            _ => a,
        }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, co)| co.mul(&self.field.from_u64(i as u64)))
            .collect();
        let mut p = Poly { field: self.field.clone(), c };
        p.normalize();
        p
    }

    pub fn eval(&self, x: &Fq) -> Fq {
        assert!(x.field() == &self.field, "evaluation point from a different field");
        let mut acc = self.field.zero();
        for co in self.c.iter().rev() {
            acc = acc.mul(x).add(co);
        }
        acc
    }

    /// True iff gcd(f, f') = 1; errors on the zero polynomial.
    pub fn is_separable(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::Precondition("separability of the zero polynomial".into()));
        }
        let g = self.gcd(&self.derivative());
        Ok(g.degree() == Some(0))
    }

    /// self^e mod modulus (square-and-multiply over the exponent bits).
    pub fn pow_mod(&self, e: &BigUint, modulus: &Poly) -> Result<Poly> {
        if modulus.degree().map_or(true, |d| d == 0) {
            return Err(Error::Precondition("constant or zero modulus".into()));
        }
        let mut acc = Poly::one(&self.field);
        let mut b = self.rem(modulus)?;
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&b).rem(modulus)?;
            }
            if i + 1 < bits {
                b = b.mul(&b).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    /// x^(p^k) mod self, by k successive Frobenius steps (each one a
    /// square-and-multiply with exponent p).
    pub fn modpow_frobenius(&self, k: u32) -> Result<Poly> {
        if self.degree().map_or(true, |d| d == 0) {
            return Err(Error::Precondition("constant or zero modulus".into()));
        }
        let p = BigUint::from(self.field.p());
        let mut r = Poly::x(&self.field).rem(self)?;
        for _ in 0..k {
            r = r.pow_mod(&p, self)?;
        }
        Ok(r)
    }

    /// Smallest m >= 1 with deg gcd(f, x^(p^m) - x) = deg f, i.e. the degree
    /// of the splitting field over F_p. Requires separable input with
    /// prime-field coefficients.
    pub fn splitting_degree(&self, caps: &Caps) -> Result<u32> {
        if !self.field.is_prime_field() {
            return Err(Error::Precondition(
                "splitting degree is computed for prime-field coefficients".into(),
            ));
        }
        if !self.is_separable()? {
            return Err(Error::Precondition("inseparable polynomial".into()));
        }
        let deg = self.degree().unwrap();
        let p = BigUint::from(self.field.p());
        let x = Poly::x(&self.field);
        let mut r = x.rem(self)?;
        for m in 1..=caps.extension {
            r = r.pow_mod(&p, self)?;
            let g = self.gcd(&r.sub(&x));
            if g.degree() == Some(deg) {
                return Ok(m);
            }
        }
        Err(Error::ExtensionCap(caps.extension))
    }

    /// Coefficientwise embedding into a larger field.
    pub fn embed_into(&self, target: &FieldDesc, caps: &Caps) -> Result<Poly> {
        if &self.field == target {
            return Ok(self.clone());
        }
        let emb = Embedding::new(&self.field, target, caps)?;
        Ok(Poly {
            field: target.clone(),
            c: self.c.iter().map(|co| emb.apply(co)).collect(),
        })
    }

    /// All roots in the given field, each once, sorted canonically.
    /// Exhaustive evaluation; the field must be within the enumeration cap.
    pub fn roots_in_field(&self, field: &FieldDesc, caps: &Caps) -> Result<Vec<Fq>> {
        if self.is_zero() {
            return Err(Error::Precondition("roots of the zero polynomial".into()));
        }
        let q = field.check_enumerable(caps)?;
        let f = self.embed_into(field, caps)?;
        let fld = field.clone();
        let mut roots = exec::filter_map_range(0, q, |i| {
            let x = fld.element_at(i);
            if f.eval(&x).is_zero() {
                Some(x)
            } else {
                None
            }
        });
        roots.sort();
        Ok(roots)
    }

    /// Largest k with (x - r)^k dividing self.
    pub fn root_multiplicity(&self, r: &Fq) -> usize {
        assert!(r.field() == &self.field, "root candidate from a different field");
        if self.is_zero() {
            return 0;
        }
        let lin = Poly::new(&self.field, vec![r.neg(), self.field.one()]);
        let mut k = 0;
        let mut f = self.clone();
        loop {
            let (q, rem) = f.divmod(&lin).expect("linear divisor");
            if !rem.is_zero() {
                return k;
            }
            k += 1;
            f = q;
            if f.is_zero() {
                return k;
            }
        }
    }

    /// The cleared composite h(x) = (cx+d)^D * f((ax+b)/(cx+d)) for D =
    /// deg f, computed from the raw matrix entries of `mu` (no projective
    /// rescaling: identities that pin a specific representative depend on
    /// it). Returns h together with its coefficient at degree D, which is
    /// zero exactly when composition drops the degree.
    pub fn compose_moebius(&self, mu: &Moebius) -> Result<(Poly, Fq)> {
        if mu.field() != &self.field {
            return Err(Error::FieldMismatch {
                p1: self.field.p(),
                m1: self.field.degree(),
                p2: mu.field().p(),
                m2: mu.field().degree(),
            });
        }
        let deg = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::Precondition("composite needs degree >= 1".into())),
        };
        let [a, b, c, d] = mu.entries();
        let num = Poly::new(&self.field, vec![b.clone(), a.clone()]);
        let den = Poly::new(&self.field, vec![d.clone(), c.clone()]);
        // running powers num^i and den^(D-i)
        let mut num_pows = Vec::with_capacity(deg + 1);
        let mut den_pows = Vec::with_capacity(deg + 1);
        num_pows.push(Poly::one(&self.field));
        den_pows.push(Poly::one(&self.field));
        for i in 1..=deg {
            num_pows.push(num_pows[i - 1].mul(&num));
            den_pows.push(den_pows[i - 1].mul(&den));
        }
        let mut h = Poly::zero(&self.field);
        for (i, fi) in self.c.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            h = h.add(&num_pows[i].mul(&den_pows[deg - i]).scale(fi));
        }
        let lead = h.coeff(deg);
        Ok((h, lead))
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                Poly::$method(self, rhs)
            }
        }
    };
}
poly_binop!(Add, add);
poly_binop!(Sub, sub);
poly_binop!(Mul, mul);

// ---- extension-tower root extraction ----

#[derive(Clone, Debug)]
pub struct RootsInExtensions {
    /// Smallest common field F_{p^(s*L)} holding every root.
    pub field: FieldDesc,
    /// (root, multiplicity), sorted by root.
    pub roots: Vec<(Fq, usize)>,
}

impl Poly {
    /// Roots over the splitting tower of `self`: factor degrees come from
    /// gcd(f, x^(q^j) - x) for ascending j, roots are pulled out of each
    /// degree-j batch inside F_{q^lcm} by deterministic equal-degree
    /// splitting, and multiplicities are read off the embedded polynomial.
    pub fn roots_with_multiplicity_over_extensions(&self, caps: &Caps) -> Result<RootsInExtensions> {
        let deg = self
            .degree()
            .ok_or_else(|| Error::Precondition("roots of the zero polynomial".into()))?;
        if deg == 0 {
            return Ok(RootsInExtensions { field: self.field.clone(), roots: Vec::new() });
        }
        let q: BigUint = self.field.size().clone();
        let x = Poly::x(&self.field);
        let mut rem = self.clone();
        let mut batches: Vec<(u32, Poly)> = Vec::new();
        let mut j = 0u32;
        while rem.degree().map_or(false, |d| d >= 1) {
            j += 1;
            if j > caps.extension {
                return Err(Error::ExtensionCap(caps.extension));
            }
            let t = x.pow_mod(&q.pow(j), &rem)?;
            let w = rem.gcd(&t.sub(&x));
            if w.degree().map_or(true, |d| d == 0) {
                continue;
            }
            // strip every factor shared with this batch, at all multiplicities
            loop {
                let shared = rem.gcd(&w);
                if shared.degree().map_or(true, |d| d == 0) {
                    break;
                }
                let (quo, r) = rem.divmod(&shared)?;
                debug_assert!(r.is_zero());
                rem = quo;
            }
            batches.push((j, w));
        }
        let ell = batches.iter().fold(1u32, |acc, (j, _)| acc.lcm(j));
        let target_degree = self.field.degree() * ell;
        let target = crate::ff::make_field(self.field.p(), target_degree)?;
        let f_emb = self.embed_into(&target, caps)?;
        let mut roots: Vec<(Fq, usize)> = Vec::new();
        for (_, w) in &batches {
            let w_emb = w.embed_into(&target, caps)?;
            for r in split_into_linears(&w_emb)? {
                let mult = f_emb.root_multiplicity(&r);
                debug_assert!(mult >= 1);
                roots.push((r, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(RootsInExtensions { field: target, roots })
    }
}

/// Roots of a polynomial that splits into distinct linear factors over its
/// own field. Deterministic: candidate splitters (x + c)^((q-1)/2) - 1 walk
/// the shifts c in canonical order.
pub(crate) fn split_into_linears(g: &Poly) -> Result<Vec<Fq>> {
    let field = g.field().clone();
    let deg = g.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg == 1 {
        let root = g.coeff(0).neg().mul(&g.coeff(1).inv()?);
        return Ok(vec![root]);
    }
    let half = (field.size() - 1u32) / 2u32;
    let mut idx: u64 = 0;
    loop {
        let c = field.element_at(idx);
        let xc = Poly::new(&field, vec![c, field.one()]);
        let h = xc.pow_mod(&half, g)?.sub(&Poly::one(&field));
        let s = g.gcd(&h);
        let sd = s.degree().unwrap_or(0);
        if sd > 0 && sd < deg {
            let (quo, r) = g.divmod(&s)?;
            debug_assert!(r.is_zero());
            let mut out = split_into_linears(&s)?;
            out.extend(split_into_linears(&quo)?);
            return Ok(out);
        }
        idx += 1;
        if idx > 4096 {
            return Err(Error::InvariantBreach(
                "equal-degree splitting failed to separate a split polynomial".into(),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn gcd_and_derivative() {
        let f7 = make_field(7, 1).unwrap();
        let a = Poly::from_i64(&f7, &[-1, 0, 1]); // x^2 - 1
        let b = Poly::from_i64(&f7, &[-1, 1]); // x - 1
        assert_eq!(a.gcd(&b), b);
        let f = Poly::from_i64(&f7, &[2, 0, -4, 0, 1]); // x^4 - 4x^2 + 2
        assert_eq!(f.derivative(), Poly::from_i64(&f7, &[0, -8, 0, 4]));
    }

    #[test]
    fn divmod_octic_remainder() {
        // x^8 + 14x^4 + 1 divided by x^4 - 2*l^2*x^2 + 1 leaves 40 l^2 x^2 - 20
        // whenever l^4 = 2 (char != 2, 5); take l in F_121
        let f121 = make_field(11, 2).unwrap();
        let two = f121.from_u64(2);
        let l = crate::ff::nth_root(&two, 4, &caps()).unwrap().expect("2 is a 4th power in F_121");
        let l2 = l.square();
        let octic = Poly::from_i64(&f121, &[1, 0, 0, 0, 14, 0, 0, 0, 1]);
        let divisor = Poly::new(
            &f121,
            vec![
                f121.one(),
                f121.zero(),
                l2.mul(&f121.from_u64(2)).neg(),
                f121.zero(),
                f121.one(),
            ],
        );
        let (_, r) = octic.divmod(&divisor).unwrap();
        let expected = Poly::new(
            &f121,
            vec![f121.from_i64(-20), f121.zero(), l2.mul(&f121.from_u64(40))],
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn divmod_exactness_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = make_field(13, 1).unwrap();
        for _ in 0..300 {
            let da = rng.gen_range(0..8);
            let db = rng.gen_range(0..5);
            let a = Poly::new(&f, (0..=da).map(|_| f.from_u64(rng.gen_range(0..13))).collect());
            let b = Poly::new(&f, (0..=db).map(|_| f.from_u64(rng.gen_range(0..13))).collect());
            if b.is_zero() {
                assert!(a.divmod(&b).is_err());
                continue;
            }
            let (q, r) = a.divmod(&b).unwrap();
            assert_eq!(q.mul(&b).add(&r), a);
            if let (Some(dr), Some(db)) = (r.degree(), b.degree()) {
                assert!(dr < db);
            }
        }
    }

    #[test]
    fn separability() {
        let f7 = make_field(7, 1).unwrap();
        assert!(Poly::from_i64(&f7, &[-2, 0, 1]).is_separable().unwrap());
        assert!(!Poly::from_i64(&f7, &[0, 0, 1]).is_separable().unwrap());
        // x^3 - 3x = x^3 over F_3 is inseparable
        let f3 = make_field(3, 1).unwrap();
        assert!(!Poly::from_i64(&f3, &[0, -3, 0, 1]).is_separable().unwrap());
    }

    #[test]
    fn modpow_frobenius_vs_schoolbook() {
        let f7 = make_field(7, 1).unwrap();
        let modulus = Poly::from_i64(&f7, &[-2, 0, 1]); // x^2 - 2
        // oracle: x^7 mod (x^2 - 2) by direct division
        let x7 = Poly::monomial(f7.one(), 7);
        let (_, oracle) = x7.divmod(&modulus).unwrap();
        assert_eq!(modulus.modpow_frobenius(1).unwrap(), oracle);
        // k = 0 is x mod f
        assert_eq!(modulus.modpow_frobenius(0).unwrap(), Poly::x(&f7));
        // full orbit returns to x once the polynomial splits: x^2 - 2 splits over F_7
        assert_eq!(modulus.modpow_frobenius(1).unwrap(), {
            // x^7 = (x^2)^3 * x = 8x = x mod (x^2-2)? compute: 2^3 x = 8x = x
            Poly::x(&f7)
        });
    }

    #[test]
    fn splitting_degrees() {
        let f7 = make_field(7, 1).unwrap();
        // x^4 + 3x^2 + 2 = (x^2+1)(x^2+2) over F_7; -1 and -2 are nonsquares
        let f = Poly::from_i64(&f7, &[2, 0, 3, 0, 1]);
        assert_eq!(f.splitting_degree(&caps()).unwrap(), 2);
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(Poly::from_i64(&f5, &[-3, 1]).splitting_degree(&caps()).unwrap(), 1);
        // consistency: root counts via modpow gcd match exhaustive search
        for (p, fc) in [(7u64, vec![2i64, 0, 3, 0, 1]), (5, vec![2, 1, 0, 1]), (11, vec![-2, 0, 1])] {
            let fp = make_field(p, 1).unwrap();
            let f = Poly::from_i64(&fp, &fc);
            let m = f.splitting_degree(&caps()).unwrap();
            let big = make_field(p, m).unwrap();
            assert_eq!(
                f.roots_in_field(&big, &caps()).unwrap().len(),
                f.degree().unwrap(),
                "splits over F_{{{p}^{m}}}"
            );
            if m > 1 {
                assert!(f.roots_in_field(&fp, &caps()).unwrap().len() < f.degree().unwrap());
            }
        }
    }

    #[test]
    fn roots_and_multiplicity() {
        let f7 = make_field(7, 1).unwrap();
        let f = Poly::from_i64(&f7, &[-2, 0, 1]);
        let roots = f.roots_in_field(&f7, &caps()).unwrap();
        assert_eq!(roots, vec![f7.from_u64(3), f7.from_u64(4)]);
        assert_eq!(f.root_multiplicity(&f7.zero()), 0);
        let quad = Poly::from_i64(&f7, &[-1, 1]).pow(4);
        assert_eq!(quad.root_multiplicity(&f7.one()), 4);
        // roots(f) subset roots(f*g), eval is zero on every returned root
        let g = Poly::from_i64(&f7, &[1, 1]);
        let prod = f.mul(&g);
        let all = prod.roots_in_field(&f7, &caps()).unwrap();
        for r in &roots {
            assert!(all.contains(r));
        }
        for r in &all {
            assert!(prod.eval(r).is_zero());
        }
    }

    #[test]
    fn compose_moebius_identity_and_parity() {
        let f11 = make_field(11, 1).unwrap();
        let f = Poly::from_i64(&f11, &[2, 0, -4, 0, 1]);
        let id = Moebius::identity(&f11);
        let (h, lead) = f.compose_moebius(&id).unwrap();
        assert_eq!(h, f);
        assert!(lead.is_one());
        // x -> -x on an even polynomial reproduces it exactly
        let neg = Moebius::negation(&f11);
        let (h, _) = f.compose_moebius(&neg).unwrap();
        assert_eq!(h, f);
        // odd degree flips the sign
        let f_odd = Poly::from_i64(&f11, &[0, 5, 0, 1]);
        let (h, _) = f_odd.compose_moebius(&neg).unwrap();
        assert_eq!(h, f_odd.neg());
    }

    #[test]
    fn compose_moebius_multiplicative_up_to_scalar() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let f13 = make_field(13, 1).unwrap();
        let f = Poly::from_i64(&f13, &[3, 1, 0, 2, 1]);
        let rand_moebius = |rng: &mut rand_chacha::ChaCha8Rng| loop {
            if let Ok(m) = Moebius::from_i64(
                &f13,
                [
                    rng.gen_range(0..13),
                    rng.gen_range(0..13),
                    rng.gen_range(0..13),
                    rng.gen_range(0..13),
                ],
            ) {
                return m;
            }
        };
        for _ in 0..100 {
            let mu = rand_moebius(&mut rng);
            let nu = rand_moebius(&mut rng);
            let (h_two_step, _) = {
                let (h1, _) = f.compose_moebius(&mu).unwrap();
                h1.compose_moebius(&nu).unwrap()
            };
            let (h_joint, _) = f.compose_moebius(&mu.compose(&nu)).unwrap();
            // proportional coefficient vectors
            let i0 = (0..=4).find(|&i| !h_joint.coeff(i).is_zero()).unwrap();
            let ratio = h_two_step.coeff(i0).mul(&h_joint.coeff(i0).inv().unwrap());
            assert_eq!(h_two_step, h_joint.scale(&ratio));
        }
    }

    #[test]
    fn extension_roots_with_multiplicity() {
        let f5 = make_field(5, 1).unwrap();
        // (x^2 + 2)^2 * (x - 1): x^2 + 2 is irreducible over F_5
        let quad = Poly::from_i64(&f5, &[2, 0, 1]);
        assert!(quad.roots_in_field(&f5, &caps()).unwrap().is_empty());
        let f = quad.pow(2).mul(&Poly::from_i64(&f5, &[-1, 1]));
        let out = f.roots_with_multiplicity_over_extensions(&caps()).unwrap();
        assert_eq!(out.field.degree(), 2);
        assert_eq!(out.roots.len(), 3);
        let total: usize = out.roots.iter().map(|(_, m)| m).sum();
        assert_eq!(total, 5);
        // cross-check against exhaustive enumeration in F_25
        let f25 = out.field.clone();
        let f_emb = f.embed_into(&f25, &caps()).unwrap();
        let exhaustive: Vec<Fq> = f_emb.roots_in_field(&f25, &caps()).unwrap();
        let found: Vec<Fq> = out.roots.iter().map(|(r, _)| r.clone()).collect();
        assert_eq!(found, exhaustive);
    }

    #[test]
    fn split_linears_matches_exhaustive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let f = make_field(11, 2).unwrap();
        let q = f.size_u64().unwrap();
        for _ in 0..50 {
            // product of distinct linear factors
            let mut roots: Vec<Fq> = Vec::new();
            while roots.len() < 4 {
                let r = f.element_at(rng.gen_range(0..q));
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
            let mut g = Poly::one(&f);
            for r in &roots {
                g = g.mul(&Poly::new(&f, vec![r.neg(), f.one()]));
            }
            let mut found = split_into_linears(&g).unwrap();
            found.sort();
            roots.sort();
            assert_eq!(found, roots);
        }
    }
}
