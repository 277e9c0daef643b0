//! The projective plane curve y^d = g(x) (default g = phi_d), its
//! superelliptic relatives y^m = f(x), and everything counted on them:
//! rational points, tangent lines, line intersection profiles, total
//! inflection points, Hasse-Weil maximality, and binary-quartic j-invariants.
//!
//! The plane model is the homogeneous form F(X,Y,Z) = Y^d - Z^d g(X/Z);
//! smoothness comes from g separable and char not dividing d.

use crate::caps::Caps;
use crate::cheb;
use crate::error::{Error, Result};
use crate::exec;
use crate::ff::{make_field, Fq, FieldDesc};
use crate::poly::Poly;
use num_integer::Integer;
use std::fmt;

pub fn genus_plane(d: u64) -> u64 {
    if d < 2 {
        return 0;
    }
    (d - 1) * (d - 2) / 2
}

/// Genus of the smooth model of y^m = f(x) with deg f = n, f separable and
/// char not dividing m: ((m-1)(n-1) + 1 - gcd(m,n)) / 2. Validated two ways
/// in the tests: m = n = d reproduces the plane formula, and maximal point
/// counts solve back to the same genus.
pub fn genus_superelliptic(m: u64, n: u64) -> Result<u64> {
    if m < 1 || n < 1 {
        return Err(Error::Precondition("degenerate exponent or degree".into()));
    }
    let num = (m - 1) * (n - 1) + 1 - m.gcd(&n);
    debug_assert!(num % 2 == 0, "the genus formula is an integer");
    Ok(num / 2)
}

/// Hasse-Weil upper bound over a field of square size q^2.
pub fn maximal_count(q: u64, genus: u64) -> u64 {
    q * q + 1 + 2 * genus * q
}

/// q = p^r for prime p, r >= 1.
pub fn factor_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = q;
    let mut t = 2;
    while t * t <= q {
        if q % t == 0 {
            p = t;
            break;
        }
        t += 1;
    }
    cheb::prime_power_exponent(q, p)
        .map(|r| (p, r))
        .ok_or(Error::NotPrimePower(q))
}

// ---- projective points and lines ----

/// A point of P^2, normalized so the first nonzero coordinate (in X, Y, Z
/// order) is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint2 {
    x: Fq,
    y: Fq,
    z: Fq,
}

impl ProjPoint2 {
    pub fn new(x: Fq, y: Fq, z: Fq) -> Result<ProjPoint2> {
        assert!(x.field() == y.field() && x.field() == z.field(), "mixed-field coordinates");
        let lead = [&x, &y, &z].into_iter().find(|c| !c.is_zero());
        let s = match lead {
            Some(l) => l.inv()?,
            None => return Err(Error::Precondition("(0 : 0 : 0) is not a point".into())),
        };
        Ok(ProjPoint2 { x: x.mul(&s), y: y.mul(&s), z: z.mul(&s) })
    }

    pub fn affine(x: Fq, y: Fq) -> ProjPoint2 {
        let one = x.field().one();
        ProjPoint2::new(x, y, one).expect("z = 1")
    }

    pub fn field(&self) -> &FieldDesc {
        self.x.field()
    }

    pub fn coords(&self) -> [&Fq; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn is_at_infinity(&self) -> bool {
        self.z.is_zero()
    }

    /// (X/Z, Y/Z) when Z != 0.
    pub fn to_affine(&self) -> Option<(Fq, Fq)> {
        if self.z.is_zero() {
            return None;
        }
        let zi = self.z.inv().ok()?;
        Some((self.x.mul(&zi), self.y.mul(&zi)))
    }

    pub fn y_is_zero(&self) -> bool {
        self.y.is_zero()
    }

    /// X = c * Z (scaling-invariant).
    pub fn x_equals(&self, c: i64) -> bool {
        self.x.sub(&self.z.mul(&self.field().from_i64(c))).is_zero()
    }
}

impl fmt::Debug for ProjPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} : {:?} : {:?})", self.x, self.y, self.z)
    }
}

impl serde::Serialize for ProjPoint2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(3))?;
        for c in [&self.x, &self.y, &self.z] {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

/// A line uX + vY + wZ = 0 in dual coordinates, normalized like a point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjLine {
    u: Fq,
    v: Fq,
    w: Fq,
}

impl ProjLine {
    pub fn new(u: Fq, v: Fq, w: Fq) -> Result<ProjLine> {
        let p = ProjPoint2::new(u, v, w)?;
        Ok(ProjLine { u: p.x, v: p.y, w: p.z })
    }

    pub fn duals(&self) -> [&Fq; 3] {
        [&self.u, &self.v, &self.w]
    }

    pub fn field(&self) -> &FieldDesc {
        self.u.field()
    }

    pub fn contains(&self, pt: &ProjPoint2) -> bool {
        let [x, y, z] = pt.coords();
        self.u.mul(x).add(&self.v.mul(y)).add(&self.w.mul(z)).is_zero()
    }

    /// The line at infinity Z = 0.
    pub fn at_infinity(field: &FieldDesc) -> ProjLine {
        ProjLine { u: field.zero(), v: field.zero(), w: field.one() }
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} : {:?} : {:?}]", self.u, self.v, self.w)
    }
}

impl serde::Serialize for ProjLine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(3))?;
        for c in [&self.u, &self.v, &self.w] {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

// ---- the plane curve ----

/// Closure in P^2 of y^d = g(x), deg g = d, g separable, char not dividing d.
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    d: u32,
    g: Poly,
}

impl PlaneCurve {
    pub fn new(d: u32, g: Poly) -> Result<PlaneCurve> {
        if d < 1 || g.degree() != Some(d as usize) {
            return Err(Error::Precondition(format!(
                "defining polynomial must have degree d = {d}"
            )));
        }
        if (d as u64) % g.field().p() == 0 {
            return Err(Error::CharDividesTwoD { p: g.field().p(), two_d: d as u64 });
        }
        if !g.is_separable()? {
            return Err(Error::Precondition("defining polynomial must be separable".into()));
        }
        Ok(PlaneCurve { d, g })
    }

    /// The curve y^d = phi_d(x) in characteristic p.
    pub fn cheb_curve(d: u32, p: u64) -> Result<PlaneCurve> {
        PlaneCurve::new(d, cheb::cheb_over_prime(d, p)?)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn field(&self) -> &FieldDesc {
        self.g.field()
    }

    pub fn genus(&self) -> u64 {
        genus_plane(self.d as u64)
    }

    fn g_in(&self, field: &FieldDesc, caps: &Caps) -> Result<Poly> {
        self.g.embed_into(field, caps)
    }

    /// F(X, Y, Z) = Y^d - sum g_i X^i Z^(d-i), with g already embedded in
    /// the coordinate field.
    fn hom_eval(g: &Poly, d: u32, pt: &ProjPoint2) -> Fq {
        let [x, y, z] = pt.coords();
        y.pow(d as u64).sub(&Self::hom_g(g, d, x, z))
    }

    fn hom_g(g: &Poly, d: u32, x: &Fq, z: &Fq) -> Fq {
        let field = x.field();
        let mut xpow = Vec::with_capacity(d as usize + 1);
        let mut xp = field.one();
        for _ in 0..=d {
            xpow.push(xp.clone());
            xp = xp.mul(x);
        }
        let mut acc = field.zero();
        let mut zp = field.one();
        for i in (0..=d as usize).rev() {
            let gi = g.coeff(i);
            if !gi.is_zero() {
                acc = acc.add(&gi.mul(&xpow[i]).mul(&zp));
            }
            zp = zp.mul(z);
        }
        acc
    }

    pub fn contains(&self, pt: &ProjPoint2, caps: &Caps) -> Result<bool> {
        let g = self.g_in(pt.field(), caps)?;
        Ok(Self::hom_eval(&g, self.d, pt).is_zero())
    }

    /// All points over the given field: affine solutions of y^d = g(x) plus
    /// the points at infinity (1 : zeta : 0) with zeta^d = 1.
    pub fn points_over(&self, field: &FieldDesc, caps: &Caps) -> Result<Vec<ProjPoint2>> {
        let q = field.check_enumerable(caps)?;
        let g = self.g_in(field, caps)?;
        let table = PowerTable::build(field, self.d as u64, q);
        let fld = field.clone();
        let mut points: Vec<ProjPoint2> = exec::flat_map_range(0, q, |xi| {
            let x = fld.element_at(xi);
            let v = g.eval(&x);
            table
                .preimages(&v)
                .iter()
                .map(|&(_, yi)| ProjPoint2::affine(x.clone(), fld.element_at(yi)))
                .collect()
        });
        for &(_, zi) in table.preimages(&field.one()) {
            let zeta = field.element_at(zi);
            points.push(ProjPoint2::new(field.one(), zeta, field.zero())?);
        }
        Ok(points)
    }

    pub fn count_points(&self, field: &FieldDesc, caps: &Caps) -> Result<u64> {
        let q = field.check_enumerable(caps)?;
        let g = self.g_in(field, caps)?;
        let table = PowerTable::build(field, self.d as u64, q);
        let fld = field.clone();
        let counts = exec::filter_map_range(0, q, |xi| {
            let x = fld.element_at(xi);
            Some(table.preimages(&g.eval(&x)).len() as u64)
        });
        let affine: u64 = counts.into_iter().sum();
        let infinity = table.preimages(&field.one()).len() as u64;
        Ok(affine + infinity)
    }

    /// Tangent line at a nonsingular point: dual coordinates
    /// (dF/dX, dF/dY, dF/dZ) at P.
    pub fn tangent_line(&self, pt: &ProjPoint2, caps: &Caps) -> Result<ProjLine> {
        let field = pt.field().clone();
        let g = self.g_in(&field, caps)?;
        if !Self::hom_eval(&g, self.d, pt).is_zero() {
            return Err(Error::NotOnCurve);
        }
        let d = self.d;
        let [x, y, z] = pt.coords();
        // partials of G(X,Z) = sum g_i X^i Z^(d-i)
        let mut gx = field.zero();
        let mut gz = field.zero();
        for i in 0..=d as usize {
            let gi = g.coeff(i);
            if gi.is_zero() {
                continue;
            }
            if i >= 1 {
                let c = gi.mul(&field.from_u64(i as u64));
                gx = gx.add(&c.mul(&x.pow(i as u64 - 1)).mul(&z.pow((d as usize - i) as u64)));
            }
            if i < d as usize {
                let c = gi.mul(&field.from_u64((d as usize - i) as u64));
                gz = gz.add(&c.mul(&x.pow(i as u64)).mul(&z.pow((d as usize - i - 1) as u64)));
            }
        }
        let fx = gx.neg();
        let fy = field.from_u64(d as u64).mul(&y.pow(d as u64 - 1));
        let fz = gz.neg();
        if fx.is_zero() && fy.is_zero() && fz.is_zero() {
            return Err(Error::InvariantBreach("all partials vanish at a curve point".into()));
        }
        ProjLine::new(fx, fy, fz)
    }

    /// Restrict F to the line: R(s) = R(s, 1) for the degree-d form R in the
    /// line parameter (s : t); the degree drop of R is the multiplicity at
    /// the parameter point (1 : 0).
    fn restrict_to_line(&self, line: &ProjLine, caps: &Caps) -> Result<(Poly, LineParam)> {
        let field = line.field().clone();
        let g = self.g_in(&field, caps)?;
        let param = LineParam::new(line);
        let (xs, ys, zs) = param.coordinate_polys();
        let mut r = ys.pow(self.d as u64);
        let mut xpow = Vec::with_capacity(self.d as usize + 1);
        let mut xp = Poly::one(&field);
        for _ in 0..=self.d {
            xpow.push(xp.clone());
            xp = xp.mul(&xs);
        }
        let mut zp = Poly::one(&field);
        for i in (0..=self.d as usize).rev() {
            let gi = g.coeff(i);
            if !gi.is_zero() {
                r = r.sub(&xpow[i].mul(&zp).scale(&gi));
            }
            zp = zp.mul(&zs);
        }
        Ok((r, param))
    }

    /// Intersection divisor of the line with the curve: points with
    /// multiplicity over the splitting field of the restricted binary form;
    /// multiplicities add up to d.
    pub fn line_intersection_profile(
        &self,
        line: &ProjLine,
        caps: &Caps,
    ) -> Result<IntersectionProfile> {
        let (r, param) = self.restrict_to_line(line, caps)?;
        if r.is_zero() {
            return Err(Error::InvariantBreach(
                "line restriction vanished identically: the line lies on the curve".into(),
            ));
        }
        let d = self.d as usize;
        let m_inf = d - r.degree().unwrap_or(0);
        let ext = r.roots_with_multiplicity_over_extensions(caps)?;
        let target = ext.field.clone();
        let emb = crate::ff::Embedding::new(line.field(), &target, caps)?;
        let param_t = param.embed(&emb);
        let mut points: Vec<(ProjPoint2, usize)> = Vec::new();
        if m_inf > 0 {
            points.push((param_t.point_at(&target.one(), &target.zero())?, m_inf));
        }
        for (root, mult) in &ext.roots {
            points.push((param_t.point_at(root, &target.one())?, *mult));
        }
        let total: usize = points.iter().map(|(_, m)| m).sum();
        if total != d {
            return Err(Error::InvariantBreach(format!(
                "intersection multiplicities sum to {total}, expected {d}"
            )));
        }
        points.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(IntersectionProfile { field: target, points })
    }

    /// Does the tangent line at P meet the curve only at P, with full
    /// multiplicity d? Equivalent to the profile being [(P, d)]: a degree-d
    /// binary form with a root of multiplicity d at P's parameter has no
    /// other root, so only the multiplicity at P needs computing.
    pub fn is_total_inflection(&self, pt: &ProjPoint2, caps: &Caps) -> Result<bool> {
        let tangent = self.tangent_line(pt, caps)?;
        let (r, param) = self.restrict_to_line(&tangent, caps)?;
        let d = self.d as usize;
        let (s, t) = param.parameter_of(pt)?;
        let mult = if t.is_zero() {
            d - r.degree().unwrap_or(0)
        } else {
            let s0 = s.mul(&t.inv()?);
            r.root_multiplicity(&s0)
        };
        Ok(mult == d)
    }

    /// Search field honoring the containment precondition: the splitting
    /// field of g with its degree doubled, falling back to the splitting
    /// field itself when the doubled field exceeds the enumeration cap.
    pub fn default_inflection_field(&self, caps: &Caps) -> Result<FieldDesc> {
        let s = self.g.splitting_degree(caps)?;
        let p = self.field().p();
        let doubled = make_field(p, 2 * s)?;
        if doubled.check_enumerable(caps).is_ok() {
            Ok(doubled)
        } else {
            make_field(p, s)
        }
    }

    /// Enumerate the curve over `search_field`, filter total inflections, and
    /// classify the outcome against the expected pattern: d points on Z(y)
    /// generically, 3d points on Z(y(x+2)(x-2)) when 2d - 1 is a power of p.
    pub fn total_inflections(
        &self,
        search_field: &FieldDesc,
        caps: &Caps,
    ) -> Result<InflectionReport> {
        let d = self.d;
        let p = self.field().p();
        // precondition: the search field contains the splitting field of g
        let g_emb = self.g_in(search_field, caps)?;
        let rational_roots = g_emb.roots_in_field(search_field, caps)?;
        if rational_roots.len() != d as usize {
            return Err(Error::Precondition(format!(
                "search field F_{{{p}^{}}} does not contain the splitting field of g \
                 ({} of {d} zeros present)",
                search_field.degree(),
                rational_roots.len(),
            )));
        }
        let points = self.points_over(search_field, caps)?;
        let curve = self.clone();
        let caps_c = *caps;
        let flags = exec::map_items(points.clone(), move |pt| {
            curve.is_total_inflection(&pt, &caps_c).expect("enumerated points lie on the curve")
        });
        let witnesses: Vec<ProjPoint2> = points
            .into_iter()
            .zip(flags)
            .filter_map(|(pt, flag)| if flag { Some(pt) } else { None })
            .collect();
        let exceptional = cheb::prime_power_exponent(2 * d as u64 - 1, p);
        let (expected_class, expected_count) = match exceptional {
            Some(_) => (InflectionClass::Exceptional, 3 * d as u64),
            None => (InflectionClass::Generic, d as u64),
        };
        let on_lines = |pt: &ProjPoint2| match expected_class {
            InflectionClass::Generic => pt.y_is_zero(),
            InflectionClass::Exceptional => pt.y_is_zero() || pt.x_equals(2) || pt.x_equals(-2),
        };
        let all_on_expected_lines = witnesses.iter().all(on_lines);
        let found = witnesses.len() as u64;
        let deviation = if found != expected_count {
            Some(format!(
                "expected {expected_count} total inflection points ({expected_class:?}), \
                 found {found}; a shortfall usually means the search field is too small to \
                 contain them all"
            ))
        } else if !all_on_expected_lines {
            Some("a total inflection point lies off the predicted lines".into())
        } else {
            None
        };
        Ok(InflectionReport {
            d,
            p,
            search_field: search_field.clone(),
            expected_class,
            expected_count,
            found_count: found,
            all_on_expected_lines,
            witnesses,
            deviation,
        })
    }

    pub fn as_superelliptic(&self) -> SuperellipticCurve {
        SuperellipticCurve { m: self.d, f: self.g.clone() }
    }
}

/// Sorted (rank of y^n, rank of y) pairs over a whole field; preimage lookup
/// by binary search.
struct PowerTable {
    pairs: Vec<(u64, u64)>,
}

impl PowerTable {
    fn build(field: &FieldDesc, n: u64, q: u64) -> PowerTable {
        let fld = field.clone();
        let mut pairs: Vec<(u64, u64)> = exec::filter_map_range(0, q, |yi| {
            let y = fld.element_at(yi);
            Some((y.pow(n).rank().expect("enumerable field"), yi))
        });
        pairs.sort_unstable();
        PowerTable { pairs }
    }

    fn preimages(&self, v: &Fq) -> &[(u64, u64)] {
        let r = v.rank().expect("enumerable field");
        let lo = self.pairs.partition_point(|&(pr, _)| pr < r);
        let hi = self.pairs.partition_point(|&(pr, _)| pr <= r);
        &self.pairs[lo..hi]
    }
}

/// Parametrization of a line by P^1, determined by the first nonzero dual
/// coordinate (that coordinate is solved for, the other two are parameters).
#[derive(Clone)]
struct LineParam {
    pivot: usize,
    u: Fq,
    v: Fq,
    w: Fq,
}

impl LineParam {
    fn new(line: &ProjLine) -> LineParam {
        let [u, v, w] = line.duals();
        let pivot = if !u.is_zero() {
            0
        } else if !v.is_zero() {
            1
        } else {
            2
        };
        LineParam { pivot, u: u.clone(), v: v.clone(), w: w.clone() }
    }

    fn embed(&self, emb: &crate::ff::Embedding) -> LineParam {
        LineParam {
            pivot: self.pivot,
            u: emb.apply(&self.u),
            v: emb.apply(&self.v),
            w: emb.apply(&self.w),
        }
    }

    /// (X(s), Y(s), Z(s)) as polynomials in s at t = 1.
    fn coordinate_polys(&self) -> (Poly, Poly, Poly) {
        let field = self.u.field();
        let s = Poly::x(field);
        let one = Poly::one(field);
        // a*s + b
        let lin = |a: &Fq, b: &Fq| Poly::new(field, vec![b.clone(), a.clone()]);
        match self.pivot {
            // u = 1: X = -(vY + wZ), params (Y, Z) = (s, t)
            0 => (lin(&self.v.neg(), &self.w.neg()), s, one),
            // v = 1: Y = -(uX + wZ), params (X, Z) = (s, t)
            1 => (s, lin(&self.u.neg(), &self.w.neg()), one),
            // w = 1: Z = -(uX + vY), params (X, Y) = (s, t)
            _ => (s, one, lin(&self.u.neg(), &self.v.neg())),
        }
    }

    fn point_at(&self, s: &Fq, t: &Fq) -> Result<ProjPoint2> {
        let (x, y, z) = match self.pivot {
            0 => (self.v.mul(s).add(&self.w.mul(t)).neg(), s.clone(), t.clone()),
            1 => (s.clone(), self.u.mul(s).add(&self.w.mul(t)).neg(), t.clone()),
            _ => (s.clone(), t.clone(), self.u.mul(s).add(&self.v.mul(t)).neg()),
        };
        ProjPoint2::new(x, y, z)
    }

    /// The (s : t) parameter of a point on the line.
    fn parameter_of(&self, pt: &ProjPoint2) -> Result<(Fq, Fq)> {
        let [x, y, z] = pt.coords();
        let (s, t) = match self.pivot {
            0 => (y.clone(), z.clone()),
            1 => (x.clone(), z.clone()),
            _ => (x.clone(), y.clone()),
        };
        if s.is_zero() && t.is_zero() {
            return Err(Error::Precondition("point is not on the parametrized line".into()));
        }
        Ok((s, t))
    }
}

#[derive(Clone, Debug)]
pub struct IntersectionProfile {
    /// Field where every intersection point is rational.
    pub field: FieldDesc,
    /// (point, multiplicity), sorted; multiplicities sum to d.
    pub points: Vec<(ProjPoint2, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum InflectionClass {
    Generic,
    Exceptional,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct InflectionReport {
    pub d: u32,
    pub p: u64,
    pub search_field: FieldDesc,
    pub expected_class: InflectionClass,
    pub expected_count: u64,
    pub found_count: u64,
    pub all_on_expected_lines: bool,
    pub witnesses: Vec<ProjPoint2>,
    pub deviation: Option<String>,
}

// ---- superelliptic curves ----

/// Smooth model of y^m = f(x), f separable of degree n, char not dividing m.
#[derive(Clone, Debug)]
pub struct SuperellipticCurve {
    m: u32,
    f: Poly,
}

#[derive(Clone, Debug)]
pub struct SuperellipticPoints {
    pub affine: Vec<(Fq, Fq)>,
    /// Rational places over x = infinity on the smooth model.
    pub places_at_infinity: u64,
}

impl SuperellipticPoints {
    pub fn count(&self) -> u64 {
        self.affine.len() as u64 + self.places_at_infinity
    }
}

impl SuperellipticCurve {
    pub fn new(m: u32, f: Poly) -> Result<SuperellipticCurve> {
        if m < 1 || f.degree().map_or(true, |n| n < 1) {
            return Err(Error::Precondition("degenerate exponent or polynomial".into()));
        }
        if (m as u64) % f.field().p() == 0 {
            return Err(Error::CharDividesTwoD { p: f.field().p(), two_d: m as u64 });
        }
        if !f.is_separable()? {
            return Err(Error::Precondition("defining polynomial must be separable".into()));
        }
        Ok(SuperellipticCurve { m, f })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn n(&self) -> u32 {
        self.f.degree().unwrap() as u32
    }

    pub fn genus(&self) -> u64 {
        genus_superelliptic(self.m as u64, self.n() as u64).expect("validated at construction")
    }

    pub fn points_over(&self, field: &FieldDesc, caps: &Caps) -> Result<SuperellipticPoints> {
        let q = field.check_enumerable(caps)?;
        let f = self.f.embed_into(field, caps)?;
        let table = PowerTable::build(field, self.m as u64, q);
        let fld = field.clone();
        let affine: Vec<(Fq, Fq)> = exec::flat_map_range(0, q, |xi| {
            let x = fld.element_at(xi);
            let v = f.eval(&x);
            table
                .preimages(&v)
                .iter()
                .map(|&(_, yi)| (x.clone(), fld.element_at(yi)))
                .collect()
        });
        Ok(SuperellipticPoints { affine, places_at_infinity: self.infinity_places(field, caps)? })
    }

    pub fn count_points(&self, field: &FieldDesc, caps: &Caps) -> Result<u64> {
        let q = field.check_enumerable(caps)?;
        let f = self.f.embed_into(field, caps)?;
        let table = PowerTable::build(field, self.m as u64, q);
        let fld = field.clone();
        let counts = exec::filter_map_range(0, q, |xi| {
            let x = fld.element_at(xi);
            Some(table.preimages(&f.eval(&x)).len() as u64)
        });
        let affine: u64 = counts.into_iter().sum();
        Ok(affine + self.infinity_places(field, caps)?)
    }

    /// Rational places over x = infinity: #{theta : theta^g = lc(f)} with
    /// g = gcd(m, n). The residue of y^(m/g) * x^(-n/g) distinguishes the g
    /// places of the smooth model and Frobenius permutes them through that
    /// equation, so counting its rational solutions counts rational places.
    /// For m = n this is #{zeta : zeta^d = 1}, matching the plane model.
    fn infinity_places(&self, field: &FieldDesc, caps: &Caps) -> Result<u64> {
        let g = (self.m as u64).gcd(&(self.n() as u64));
        let lc = self.f.leading_coeff().unwrap().clone();
        let lc_emb = crate::ff::embed(&lc, field, caps)?;
        let q = field.size_u64().expect("enumerable field");
        let gg = g.gcd(&(q - 1));
        Ok(if lc_emb.pow((q - 1) / gg).is_one() { gg } else { 0 })
    }
}

// ---- maximality ----

#[derive(Clone, Debug, serde::Serialize)]
pub struct MaximalityReport {
    pub d: u32,
    pub q: u64,
    pub genus: u64,
    /// Arithmetic criterion: d divides (q + 1)/2.
    pub criterion: bool,
    /// Hasse-Weil upper bound over F_{q^2}.
    pub bound: u64,
    /// Exhaustive count over F_{q^2}, when within the enumeration cap.
    pub counted: Option<u64>,
    /// True when only the criterion verdict is available.
    pub criterion_only: bool,
}

impl MaximalityReport {
    pub fn is_maximal(&self) -> bool {
        self.criterion
    }
}

/// Is y^d = phi_d(x) maximal over F_{q^2}? Two independent verdicts: the
/// divisibility criterion d | (q+1)/2, and the exhaustive point count
/// compared to the Hasse-Weil bound. Disagreement is an invariant breach;
/// when F_{q^2} exceeds the cap the report is flagged criterion-only.
pub fn is_maximal_cheb(d: u32, q: u64, caps: &Caps) -> Result<MaximalityReport> {
    let (p, r) = factor_prime_power(q)?;
    if cheb::char_divides_2d(p, d) {
        return Err(Error::CharDividesTwoD { p, two_d: 2 * d as u64 });
    }
    let criterion = ((q + 1) / 2) % d as u64 == 0;
    let genus = genus_plane(d as u64);
    let bound = maximal_count(q, genus);
    let curve = PlaneCurve::cheb_curve(d, p)?;
    let fq2 = make_field(p, 2 * r)?;
    let counted = match fq2.check_enumerable(caps) {
        Ok(_) => Some(curve.count_points(&fq2, caps)?),
        Err(_) => None,
    };
    if let Some(n) = counted {
        if (n == bound) != criterion {
            return Err(Error::InvariantBreach(format!(
                "maximality criterion ({criterion}) disagrees with the count ({n} vs bound \
                 {bound}) for d = {d}, q = {q}"
            )));
        }
    }
    Ok(MaximalityReport { d, q, genus, criterion, bound, counted, criterion_only: counted.is_none() })
}

// ---- binary quartic j-invariant ----

/// j-invariant of y^2 = a x^4 + b x^3 + c x^2 + d x + e (char not 2, 3),
/// from the classical invariants I = 12ae - 3bd + c^2 and
/// J = 72ace + 9bcd - 27ad^2 - 27b^2 e - 2c^3: j = 6912 I^3 / (4I^3 - J^2).
/// Errors when 4I^3 = J^2 (degenerate quartic).
pub fn j_invariant_quartic(coeffs: &[Fq; 5]) -> Result<Fq> {
    let field = coeffs[0].field().clone();
    if field.p() == 2 || field.p() == 3 {
        return Err(Error::Precondition("j-invariant needs characteristic >= 5".into()));
    }
    let [a, b, c, d, e] = coeffs;
    let k = |v: i64| field.from_i64(v);
    let i_inv = k(12).mul(a).mul(e).sub(&k(3).mul(b).mul(d)).add(&c.square());
    let j_inv = k(72)
        .mul(a)
        .mul(c)
        .mul(e)
        .add(&k(9).mul(b).mul(c).mul(d))
        .sub(&k(27).mul(a).mul(&d.square()))
        .sub(&k(27).mul(&b.square()).mul(e))
        .sub(&k(2).mul(&c.pow(3)));
    let i3 = i_inv.pow(3);
    let denom = k(4).mul(&i3).sub(&j_inv.square());
    if denom.is_zero() {
        return Err(Error::DegenerateQuartic);
    }
    Ok(k(6912).mul(&i3).mul(&denom.inv()?))
}

/// Convenience for integer quartics.
pub fn j_invariant_quartic_i64(coeffs: [i64; 5], field: &FieldDesc) -> Result<Fq> {
    let c: Vec<Fq> = coeffs.iter().map(|&v| field.from_i64(v)).collect();
    j_invariant_quartic(&[c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone(), c[4].clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Fq;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn genus_formulas() {
        assert_eq!(genus_plane(4), 3);
        assert_eq!(genus_plane(3), 1);
        assert_eq!(genus_plane(13), 66);
        assert_eq!(genus_superelliptic(2, 4).unwrap(), 1);
        assert_eq!(genus_superelliptic(5, 10).unwrap(), 16);
        for d in 1..=20 {
            assert_eq!(genus_superelliptic(d, d).unwrap(), genus_plane(d));
        }
    }

    #[test]
    fn point_normalization() {
        let f7 = make_field(7, 1).unwrap();
        let p1 = ProjPoint2::new(f7.from_u64(2), f7.from_u64(4), f7.from_u64(6)).unwrap();
        let p2 = ProjPoint2::new(f7.from_u64(1), f7.from_u64(2), f7.from_u64(3)).unwrap();
        assert_eq!(p1, p2);
        assert!(ProjPoint2::new(f7.zero(), f7.zero(), f7.zero()).is_err());
        let inf = ProjPoint2::new(f7.one(), f7.from_u64(3), f7.zero()).unwrap();
        assert!(inf.is_at_infinity());
        assert!(inf.to_affine().is_none());
    }

    #[test]
    fn points_at_infinity_count() {
        // C_4 over F_7: #{zeta : zeta^4 = 1} = gcd(4, 6) = 2
        let c4 = PlaneCurve::cheb_curve(4, 7).unwrap();
        let f7 = make_field(7, 1).unwrap();
        let pts = c4.points_over(&f7, &caps()).unwrap();
        let at_inf = pts.iter().filter(|p| p.is_at_infinity()).count();
        assert_eq!(at_inf, 2);
        // over F_49 all four appear
        let f49 = make_field(7, 2).unwrap();
        let pts = c4.points_over(&f49, &caps()).unwrap();
        let at_inf = pts.iter().filter(|p| p.is_at_infinity()).count();
        assert_eq!(at_inf, 4);
        for p in &pts {
            assert!(c4.contains(p, &caps()).unwrap());
        }
    }

    #[test]
    fn maximal_counts() {
        // C_4 over F_49: 49 + 1 + 2*3*7 = 92
        let c4 = PlaneCurve::cheb_curve(4, 7).unwrap();
        let f49 = make_field(7, 2).unwrap();
        assert_eq!(c4.count_points(&f49, &caps()).unwrap(), 92);
        // C_5 over F_81: 81 + 1 + 2*6*9 = 190
        let c5 = PlaneCurve::cheb_curve(5, 3).unwrap();
        let f81 = make_field(3, 4).unwrap();
        assert_eq!(c5.count_points(&f81, &caps()).unwrap(), 190);
    }

    #[test]
    fn plane_and_superelliptic_counts_agree() {
        for (d, p, m) in [(4u32, 7u64, 2u32), (5, 3, 4), (4, 11, 2)] {
            let c = PlaneCurve::cheb_curve(d, p).unwrap();
            let field = make_field(p, m).unwrap();
            let plane = c.count_points(&field, &caps()).unwrap();
            let sup = c.as_superelliptic().count_points(&field, &caps()).unwrap();
            assert_eq!(plane, sup, "d = {d}, p = {p}, m = {m}");
        }
    }

    #[test]
    fn genus1_quartics_are_maximal_over_f49() {
        let f7 = make_field(7, 1).unwrap();
        let f49 = make_field(7, 2).unwrap();
        for coeffs in [[2i64, 0, -4, 0, 1], [1, 0, 0, 0, 1]] {
            let f = Poly::from_i64(&f7, &coeffs);
            let curve = SuperellipticCurve::new(2, f).unwrap();
            assert_eq!(curve.genus(), 1);
            assert_eq!(curve.count_points(&f49, &caps()).unwrap(), 64); // 49 + 1 + 2*7
        }
    }

    #[test]
    fn tangent_at_zero_of_g_is_vertical() {
        // P = (a : 0 : 1) with phi_d(a) = 0 has tangent x = a z
        let c4 = PlaneCurve::cheb_curve(4, 5).unwrap();
        let roots = cheb::cheb_roots(4, 5).unwrap();
        let field = roots.field.clone();
        for a in &roots.roots {
            let pt = ProjPoint2::affine(a.clone(), field.zero());
            let tangent = c4.tangent_line(&pt, &caps()).unwrap();
            // x - a z = 0, i.e. duals proportional to (1, 0, -a)
            let expected = ProjLine::new(field.one(), field.zero(), a.neg()).unwrap();
            assert_eq!(tangent, expected);
        }
        // symmetric pair: tangent at (-a : 0 : 1) is x = -a z
        let a = roots.roots[0].clone();
        let pt = ProjPoint2::affine(a.neg(), field.zero());
        let tangent = c4.tangent_line(&pt, &caps()).unwrap();
        assert_eq!(tangent, ProjLine::new(field.one(), field.zero(), a.clone()).unwrap());
        // off-curve points are rejected
        let off = ProjPoint2::affine(field.zero(), field.one());
        assert!(matches!(c4.tangent_line(&off, &caps()), Err(Error::NotOnCurve)));
    }

    #[test]
    fn line_profiles() {
        let c4 = PlaneCurve::cheb_curve(4, 11).unwrap();
        let f11 = make_field(11, 1).unwrap();
        // the line at infinity meets in d distinct points
        let inf = ProjLine::at_infinity(&f11);
        let profile = c4.line_intersection_profile(&inf, &caps()).unwrap();
        assert_eq!(profile.points.len(), 4);
        assert!(profile.points.iter().all(|(_, m)| *m == 1));
        // a vertical line x = a z at a zero of g meets with multiplicity d
        let roots = cheb::cheb_roots(4, 11).unwrap();
        let field = roots.field.clone();
        let a = roots.roots[0].clone();
        let line = ProjLine::new(field.one(), field.zero(), a.neg()).unwrap();
        let c4e = PlaneCurve::new(4, c4.g().embed_into(&field, &caps()).unwrap()).unwrap();
        let profile = c4e.line_intersection_profile(&line, &caps()).unwrap();
        assert_eq!(profile.points.len(), 1);
        assert_eq!(profile.points[0].1, 4);
        // a horizontal line y = a z ramifies with index at most 2
        let line = ProjLine::new(f11.zero(), f11.one(), f11.from_u64(3).neg()).unwrap();
        let profile = c4.line_intersection_profile(&line, &caps()).unwrap();
        assert!(profile.points.iter().all(|(_, m)| *m <= 2));
        assert!(profile.points.len() >= 2);
    }

    #[test]
    fn profile_multiplicities_sum_to_d() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let p = [5u64, 7, 11][rng.gen_range(0..3)];
            let d = rng.gen_range(3..=5u32);
            if cheb::char_divides_2d(p, d) {
                continue;
            }
            let field = make_field(p, 1).unwrap();
            // random separable monic g of degree d
            let g = loop {
                let mut c: Vec<Fq> = (0..d).map(|_| field.from_u64(rng.gen_range(0..p))).collect();
                c.push(field.one());
                let g = Poly::new(&field, c);
                if g.is_separable().unwrap() {
                    break g;
                }
            };
            let curve = PlaneCurve::new(d, g).unwrap();
            let line = loop {
                let u = field.from_u64(rng.gen_range(0..p));
                let v = field.from_u64(rng.gen_range(0..p));
                let w = field.from_u64(rng.gen_range(0..p));
                if let Ok(l) = ProjLine::new(u, v, w) {
                    break l;
                }
            };
            let profile = curve.line_intersection_profile(&line, &caps()).unwrap();
            let total: usize = profile.points.iter().map(|(_, m)| m).sum();
            assert_eq!(total, d as usize);
            // every reported point is on the curve
            let ge = curve.g().embed_into(&profile.field, &caps()).unwrap();
            let ce = PlaneCurve::new(d, ge).unwrap();
            for (pt, _) in &profile.points {
                assert!(ce.contains(pt, &caps()).unwrap());
            }
        }
    }

    #[test]
    fn total_inflection_examples() {
        // zeros of g on y = 0 are always total inflections
        let c4 = PlaneCurve::cheb_curve(4, 11).unwrap();
        let roots = cheb::cheb_roots(4, 11).unwrap();
        let pt = ProjPoint2::affine(roots.roots[0].clone(), roots.field.zero());
        assert!(c4.is_total_inflection(&pt, &caps()).unwrap());
        // a generic curve point with y != 0 is not
        let f11 = make_field(11, 1).unwrap();
        let pts = c4.points_over(&f11, &caps()).unwrap();
        let generic = pts.iter().find(|p| !p.y_is_zero() && !p.is_at_infinity()).unwrap();
        assert!(!c4.is_total_inflection(generic, &caps()).unwrap());
        // char 7, d = 4: points on x = +-2 are total inflections
        let c4_7 = PlaneCurve::cheb_curve(4, 7).unwrap();
        let f49 = make_field(7, 2).unwrap();
        let pts = c4_7.points_over(&f49, &caps()).unwrap();
        let on_two: Vec<_> = pts.iter().filter(|p| p.x_equals(2)).collect();
        assert!(!on_two.is_empty());
        for p in on_two {
            assert!(c4_7.is_total_inflection(p, &caps()).unwrap());
        }
    }

    #[test]
    fn inflection_agreement_with_full_profile() {
        // the multiplicity shortcut agrees with the full profile
        let c4 = PlaneCurve::cheb_curve(4, 7).unwrap();
        let f49 = make_field(7, 2).unwrap();
        for pt in c4.points_over(&f49, &caps()).unwrap() {
            let quick = c4.is_total_inflection(&pt, &caps()).unwrap();
            let tangent = c4.tangent_line(&pt, &caps()).unwrap();
            let profile = c4.line_intersection_profile(&tangent, &caps()).unwrap();
            let full = profile.points.len() == 1 && profile.points[0].1 == 4;
            assert_eq!(quick, full, "at {pt:?}");
        }
    }

    #[test]
    fn inflection_report_counts() {
        // generic: d = 4, p = 11 over F_{11^4} (the splitting field)
        let c4 = PlaneCurve::cheb_curve(4, 11).unwrap();
        let f114 = make_field(11, 4).unwrap();
        let rep = c4.total_inflections(&f114, &caps()).unwrap();
        assert_eq!(rep.expected_class, InflectionClass::Generic);
        assert_eq!(rep.found_count, 4);
        assert!(rep.all_on_expected_lines);
        assert!(rep.deviation.is_none());
        assert!(rep.witnesses.iter().all(|p| p.y_is_zero()));
        // the containment precondition rejects F_{11^2}
        let f112 = make_field(11, 2).unwrap();
        assert!(matches!(c4.total_inflections(&f112, &caps()), Err(Error::Precondition(_))));
    }

    #[test]
    fn maximality_criterion_vs_count() {
        let rep = is_maximal_cheb(4, 7, &caps()).unwrap();
        assert!(rep.criterion && rep.counted == Some(92));
        let rep = is_maximal_cheb(4, 11, &caps()).unwrap();
        assert!(!rep.criterion); // 4 does not divide 6
        assert!(rep.counted.is_some());
        let rep = is_maximal_cheb(5, 9, &caps()).unwrap();
        assert!(rep.criterion); // 5 divides 5
        assert_eq!(rep.counted, Some(190));
    }

    #[test]
    fn j_invariants_of_the_two_quartics() {
        // over a large prime the classical values appear literally
        let big = make_field(1000003, 1).unwrap();
        assert_eq!(j_invariant_quartic_i64([1, 0, 0, 0, 1], &big).unwrap(), big.from_u64(1728));
        assert_eq!(j_invariant_quartic_i64([1, 0, -4, 0, 2], &big).unwrap(), big.from_u64(8000));
        // distinct mod 11 and 13, equal mod 7 (8000 - 1728 = 2^7 * 7^2)
        for p in [11u64, 13] {
            let f = make_field(p, 1).unwrap();
            let jc = j_invariant_quartic_i64([1, 0, -4, 0, 2], &f).unwrap();
            let jd = j_invariant_quartic_i64([1, 0, 0, 0, 1], &f).unwrap();
            assert_ne!(jc, jd);
            assert_eq!(jc, f.from_u64(8000 % p));
            assert_eq!(jd, f.from_u64(1728 % p));
        }
        let f7 = make_field(7, 1).unwrap();
        let jc = j_invariant_quartic_i64([1, 0, -4, 0, 2], &f7).unwrap();
        let jd = j_invariant_quartic_i64([1, 0, 0, 0, 1], &f7).unwrap();
        assert_eq!(jc, jd);
        // degenerate quartic is rejected: x^4 has I = J = 0
        assert!(matches!(
            j_invariant_quartic_i64([1, 0, 0, 0, 0], &f7),
            Err(Error::DegenerateQuartic)
        ));
    }

    #[test]
    fn prime_power_factoring() {
        assert_eq!(factor_prime_power(49).unwrap(), (7, 2));
        assert_eq!(factor_prime_power(27).unwrap(), (3, 3));
        assert_eq!(factor_prime_power(19).unwrap(), (19, 1));
        assert!(factor_prime_power(51).is_err());
        assert!(factor_prime_power(1).is_err());
    }
}
