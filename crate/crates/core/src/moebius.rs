//! PGL(2) over finite fields: the projective line, Mobius transformations,
//! setwise stabilizers of finite subsets, and group fingerprinting.
//!
//! The stabilizer search uses sharp 3-transitivity: a map sending a finite set
//! S into itself is determined by the images of three fixed points of S, so
//! |S|(|S|-1)(|S|-2) candidates cover everything, independent of the field
//! size. That is what makes stabilizers over fields like F_{5^4} (where
//! |PGL(2,q)| is about 2.4e8) instant.

use crate::error::{Error, Result};
use crate::exec;
use crate::ff::{Fq, FieldDesc};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

impl std::hash::Hash for FieldDesc {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p().hash(state);
        self.degree().hash(state);
    }
}

/// A point of P^1: either a finite x or the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ProjPoint1 {
    Finite(Fq),
    Infinity(FieldDesc),
}

impl ProjPoint1 {
    /// From homogeneous coordinates (s : t), not both zero.
    pub fn from_pair(s: Fq, t: Fq) -> Result<ProjPoint1> {
        if t.is_zero() {
            if s.is_zero() {
                return Err(Error::Precondition("(0 : 0) is not a projective point".into()));
            }
            Ok(ProjPoint1::Infinity(s.field().clone()))
        } else {
            let x = s.mul(&t.inv()?);
            Ok(ProjPoint1::Finite(x))
        }
    }

    pub fn finite(x: Fq) -> ProjPoint1 {
        ProjPoint1::Finite(x)
    }

    pub fn infinity(field: &FieldDesc) -> ProjPoint1 {
        ProjPoint1::Infinity(field.clone())
    }

    pub fn field(&self) -> &FieldDesc {
        match self {
            ProjPoint1::Finite(x) => x.field(),
            ProjPoint1::Infinity(f) => f,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint1::Infinity(_))
    }

    pub fn x(&self) -> Option<&Fq> {
        match self {
            ProjPoint1::Finite(x) => Some(x),
            ProjPoint1::Infinity(_) => None,
        }
    }
}

impl fmt::Debug for ProjPoint1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint1::Finite(x) => write!(f, "{x:?}"),
            ProjPoint1::Infinity(_) => write!(f, "inf"),
        }
    }
}

impl PartialOrd for ProjPoint1 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite points first (by canonical element order), infinity last.
impl Ord for ProjPoint1 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ProjPoint1::Finite(a), ProjPoint1::Finite(b)) => a.cmp(b),
            (ProjPoint1::Finite(_), ProjPoint1::Infinity(_)) => Ordering::Less,
            (ProjPoint1::Infinity(_), ProjPoint1::Finite(_)) => Ordering::Greater,
            (ProjPoint1::Infinity(_), ProjPoint1::Infinity(_)) => Ordering::Equal,
        }
    }
}

/// An invertible fractional-linear map x -> (ax + b)/(cx + d), kept with the
/// entries it was built from. Equality, hashing and ordering use the
/// normalized representative (first nonzero entry scaled to 1), so the
/// projective quotient behaves as a plain value type while identity checks
/// such as cleared-composite comparisons can still use the raw entries.
#[derive(Clone)]
pub struct Moebius {
    a: Fq,
    b: Fq,
    c: Fq,
    d: Fq,
}

impl Moebius {
    pub fn new(a: Fq, b: Fq, c: Fq, d: Fq) -> Result<Moebius> {
        assert!(
            a.field() == b.field() && a.field() == c.field() && a.field() == d.field(),
            "matrix entries from different fields"
        );
        let det = a.mul(&d).sub(&b.mul(&c));
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn from_i64(field: &FieldDesc, entries: [i64; 4]) -> Result<Moebius> {
        let [a, b, c, d] = entries;
        Moebius::new(
            field.from_i64(a),
            field.from_i64(b),
            field.from_i64(c),
            field.from_i64(d),
        )
    }

    pub fn identity(field: &FieldDesc) -> Moebius {
        Moebius {
            a: field.one(),
            b: field.zero(),
            c: field.zero(),
            d: field.one(),
        }
    }

    /// x -> -x.
    pub fn negation(field: &FieldDesc) -> Moebius {
        Moebius {
            a: field.one().neg(),
            b: field.zero(),
            c: field.zero(),
            d: field.one(),
        }
    }

    /// x -> 1/x.
    pub fn reciprocal(field: &FieldDesc) -> Moebius {
        Moebius {
            a: field.zero(),
            b: field.one(),
            c: field.one(),
            d: field.zero(),
        }
    }

    pub fn field(&self) -> &FieldDesc {
        self.a.field()
    }

    pub fn entries(&self) -> [&Fq; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Fq {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    /// Representative with the first nonzero entry (row-major) equal to 1.
    pub fn normalized(&self) -> Moebius {
        let lead = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|e| !e.is_zero())
            .expect("invertible matrix has a nonzero entry");
        let s = lead.inv().expect("nonzero entry");
        Moebius {
            a: self.a.mul(&s),
            b: self.b.mul(&s),
            c: self.c.mul(&s),
            d: self.d.mul(&s),
        }
    }

    pub fn apply(&self, pt: &ProjPoint1) -> ProjPoint1 {
        assert!(pt.field() == self.field(), "point from a different field");
        match pt {
            ProjPoint1::Finite(x) => {
                let num = self.a.mul(x).add(&self.b);
                let den = self.c.mul(x).add(&self.d);
                ProjPoint1::from_pair(num, den).expect("invertible matrix maps points to points")
            }
            ProjPoint1::Infinity(_) => {
                ProjPoint1::from_pair(self.a.clone(), self.c.clone())
                    .expect("invertible matrix maps points to points")
            }
        }
    }

    /// self after other: (self.compose(other))(x) = self(other(x)).
    pub fn compose(&self, other: &Moebius) -> Moebius {
        assert!(self.field() == other.field(), "composition across fields");
        Moebius {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
    }

    pub fn inverse(&self) -> Moebius {
        Moebius {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Order in PGL(2): least n >= 1 with self^n = id. Finite over a finite
    /// field; `cap` guards against misuse.
    pub fn order_bounded(&self, cap: u64) -> Option<u64> {
        let mut acc = self.clone();
        for n in 1..=cap {
            if acc.is_identity() {
                return Some(n);
            }
            acc = acc.compose(self);
        }
        None
    }

    pub fn order(&self) -> u64 {
        self.order_bounded(1_000_000).expect("element order exceeds internal bound")
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.compose(self).is_identity()
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.a.is_zero() && self.d.is_zero()
    }

    fn key(&self) -> [Fq; 4] {
        let n = self.normalized();
        [n.a, n.b, n.c, n.d]
    }

    /// The unique map with src_i -> dst_i, each triple pairwise distinct.
    pub fn from_three_points(src: &[ProjPoint1; 3], dst: &[ProjPoint1; 3]) -> Result<Moebius> {
        let to_std_src = map_to_standard(src)?;
        let to_std_dst = map_to_standard(dst)?;
        Ok(to_std_dst.inverse().compose(&to_std_src))
    }
}

impl PartialEq for Moebius {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Moebius {}

impl std::hash::Hash for Moebius {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for e in self.key() {
            e.hash(state);
        }
    }
}

impl PartialOrd for Moebius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Moebius {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Debug for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} {:?}; {:?} {:?}]", self.a, self.b, self.c, self.d)
    }
}

impl serde::Serialize for Moebius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let n = self.normalized();
        let mut seq = s.serialize_seq(Some(4))?;
        for e in [&n.a, &n.b, &n.c, &n.d] {
            seq.serialize_element(e)?;
        }
        seq.end()
    }
}

/// The classical map sending (z1, z2, z3) to (0, 1, inf), with the limit
/// matrices when one of the z_i is infinity.
fn map_to_standard(pts: &[ProjPoint1; 3]) -> Result<Moebius> {
    if pts[0] == pts[1] || pts[0] == pts[2] || pts[1] == pts[2] {
        return Err(Error::RepeatedPoint);
    }
    let field = pts[0].field().clone();
    let one = field.one();
    match (pts[0].x(), pts[1].x(), pts[2].x()) {
        (Some(z1), Some(z2), Some(z3)) => {
            let d23 = z2.sub(z3);
            let d21 = z2.sub(z1);
            Moebius::new(d23.clone(), z1.mul(&d23).neg(), d21.clone(), z3.mul(&d21).neg())
        }
        (None, Some(z2), Some(z3)) => {
            Moebius::new(field.zero(), z2.sub(z3).neg(), one.neg(), z3.clone())
        }
        (Some(z1), None, Some(z3)) => Moebius::new(one.clone(), z1.neg(), one, z3.neg()),
        (Some(z1), Some(z2), None) => {
            Moebius::new(one.neg(), z1.clone(), field.zero(), z2.sub(z1).neg())
        }
        _ => unreachable!("two of the three points are infinity, hence equal"),
    }
}

/// All Mobius transformations mapping the set S onto itself, |S| >= 3.
///
/// Candidates are the maps sending the first three points of S (canonical
/// order) to each ordered triple of distinct points of S; any stabilizing map
/// is among them. The survivors are checked to form a group.
pub fn setwise_stabilizer(points: &[ProjPoint1]) -> Result<Vec<Moebius>> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!(
            "setwise stabilizer needs at least 3 points, got {}",
            points.len()
        )));
    }
    let field = points[0].field().clone();
    for pt in points {
        if pt.field() != &field {
            return Err(Error::FieldMismatch {
                p1: field.p(),
                m1: field.degree(),
                p2: pt.field().p(),
                m2: pt.field().degree(),
            });
        }
    }
    let mut s: Vec<ProjPoint1> = points.to_vec();
    s.sort();
    s.dedup();
    if s.len() != points.len() {
        return Err(Error::RepeatedPoint);
    }
    let base = [s[0].clone(), s[1].clone(), s[2].clone()];
    let set: HashSet<ProjPoint1> = s.iter().cloned().collect();
    let n = s.len() as u64;

    // Hoist the constant half of every candidate: with t0 sending the base
    // triple to (0, 1, inf), the candidate for an image triple T is
    // g = T_std^-1 . t0, and g(s_l) = T_std^-1(t0(s_l)). The pushed-through
    // points t0(s_l) are shared by all candidates, the images of the base
    // triple are in S by construction, and a random wrong candidate dies on
    // the first checked point.
    let t0 = map_to_standard(&base).expect("base triple is distinct");
    let pushed: Vec<ProjPoint1> = s.iter().map(|pt| t0.apply(pt)).collect();

    let mut stab: Vec<Moebius> = exec::filter_map_range(0, n * n * n, |t| {
        let i = (t / (n * n)) as usize;
        let j = (t / n % n) as usize;
        let k = (t % n) as usize;
        if i == j || i == k || j == k {
            return None;
        }
        let dst = [s[i].clone(), s[j].clone(), s[k].clone()];
        let t_dst = map_to_standard(&dst).expect("distinct triples");
        let t_dst_inv = t_dst.inverse();
        if pushed[3..].iter().all(|c| set.contains(&t_dst_inv.apply(c))) {
            Some(t_dst_inv.compose(&t0).normalized())
        } else {
            None
        }
    });
    stab.sort();
    debug_assert!(stab.windows(2).all(|w| w[0] != w[1]), "3-transitivity gives distinct maps");
    verify_group(&stab)?;
    Ok(stab)
}

fn verify_group(elems: &[Moebius]) -> Result<()> {
    let set: HashSet<&Moebius> = elems.iter().collect();
    if !set.contains(&Moebius::identity(elems[0].field())) {
        return Err(Error::NotAGroup);
    }
    for g in elems {
        if !set.contains(&g.inverse()) {
            return Err(Error::NotAGroup);
        }
        for h in elems {
            if !set.contains(&g.compose(h)) {
                return Err(Error::NotAGroup);
            }
        }
    }
    Ok(())
}

// ---- fingerprints ----

/// Structure names recognisable from (order, abelianness, element orders);
/// exactly the shapes occurring among small subgroups of PGL(2, q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupLabel {
    Trivial,
    Cyclic(u64),
    KleinFour,
    Sym3,
    Dihedral(u64),
    Alt4,
    Sym4,
    Alt5,
    Other(u64),
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupLabel::Trivial => write!(f, "trivial"),
            GroupLabel::Cyclic(n) => write!(f, "C{n}"),
            GroupLabel::KleinFour => write!(f, "V4"),
            GroupLabel::Sym3 => write!(f, "S3"),
            GroupLabel::Dihedral(n) => write!(f, "D{n}"),
            GroupLabel::Alt4 => write!(f, "A4"),
            GroupLabel::Sym4 => write!(f, "S4"),
            GroupLabel::Alt5 => write!(f, "A5"),
            GroupLabel::Other(n) => write!(f, "other({n})"),
        }
    }
}

impl serde::Serialize for GroupLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct GroupFingerprint {
    pub order: u64,
    pub abelian: bool,
    /// Sorted multiset of element orders.
    pub element_orders: Vec<u64>,
    pub label: GroupLabel,
}

/// Fingerprint a subgroup of PGL(2, q) given as an element list. The input
/// must actually be a group (closure is verified).
pub fn fingerprint(group: &[Moebius]) -> Result<GroupFingerprint> {
    if group.is_empty() {
        return Err(Error::NotAGroup);
    }
    verify_group(group)?;
    let n = group.len() as u64;
    let abelian = group.iter().enumerate().all(|(i, g)| {
        group[i + 1..].iter().all(|h| g.compose(h) == h.compose(g))
    });
    let mut element_orders: Vec<u64> = group
        .iter()
        .map(|g| g.order_bounded(n).expect("element order divides group order"))
        .collect();
    element_orders.sort_unstable();
    let label = classify(n, abelian, &element_orders);
    Ok(GroupFingerprint { order: n, abelian, element_orders, label })
}

fn classify(n: u64, abelian: bool, orders: &[u64]) -> GroupLabel {
    let count = |k: u64| orders.iter().filter(|&&o| o == k).count() as u64;
    if n == 1 {
        return GroupLabel::Trivial;
    }
    if orders.contains(&n) {
        return GroupLabel::Cyclic(n);
    }
    if n == 4 && count(2) == 3 {
        return GroupLabel::KleinFour;
    }
    if n == 12 && count(2) == 3 && count(3) == 8 {
        return GroupLabel::Alt4;
    }
    if n == 24 && count(2) == 9 && count(3) == 8 && count(4) == 6 {
        return GroupLabel::Sym4;
    }
    if n == 60 && count(2) == 15 && count(3) == 20 && count(5) == 24 {
        return GroupLabel::Alt5;
    }
    if !abelian && n % 2 == 0 {
        let half = n / 2;
        let involutions = count(2);
        if orders.contains(&half) && (involutions == half || involutions == half + 1) {
            return if half == 3 { GroupLabel::Sym3 } else { GroupLabel::Dihedral(half) };
        }
    }
    GroupLabel::Other(n)
}

/// Minimal-ish generating subset found greedily in canonical order; used for
/// report output only.
pub fn generating_subset(group: &[Moebius]) -> Vec<Moebius> {
    let target: HashSet<&Moebius> = group.iter().collect();
    let mut gens: Vec<Moebius> = Vec::new();
    let mut span: HashSet<Moebius> = HashSet::new();
    if let Some(first) = group.first() {
        span.insert(Moebius::identity(first.field()));
    }
    for g in group {
        if span.contains(g) {
            continue;
        }
        gens.push(g.clone());
        // close the span under the new generator
        loop {
            let mut new: Vec<Moebius> = Vec::new();
            for x in &span {
                for h in &gens {
                    let y = x.compose(h).normalized();
                    if !span.contains(&y) {
                        new.push(y);
                    }
                    let z = h.compose(x).normalized();
                    if !span.contains(&z) {
                        new.push(z);
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            for y in new {
                span.insert(y);
            }
        }
        if span.len() == target.len() {
            break;
        }
    }
    gens
}

// ---- the sigma-commutant shape test ----

/// Which maps commute with sigma: x -> -x (characteristic != 2)? Exactly the
/// diagonal maps x -> ax and the antidiagonal maps x -> b/x. Both sides of
/// the equivalence are computed so either direction can be checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NegationCommutant {
    pub commutes: bool,
    pub diagonal_or_antidiagonal: bool,
}

impl NegationCommutant {
    pub fn consistent(&self) -> bool {
        self.commutes == self.diagonal_or_antidiagonal
    }
}

pub fn negation_commutant_check(eta: &Moebius) -> NegationCommutant {
    assert!(eta.field().p() != 2, "negation is trivial in characteristic 2");
    let sigma = Moebius::negation(eta.field());
    NegationCommutant {
        commutes: sigma.compose(eta) == eta.compose(&sigma),
        diagonal_or_antidiagonal: eta.is_diagonal() || eta.is_antidiagonal(),
    }
}

// ---- the four-point quadruple {a, -a, 1/a, -1/a} ----

#[derive(Clone, Debug, serde::Serialize)]
pub struct QuadrupleReport {
    pub fingerprint: GroupFingerprint,
    #[serde(skip)]
    pub stabilizer: Vec<Moebius>,
    /// Whether alpha lies on one of the exceptional loci x^4+1,
    /// x^4 +- 6x^2 + 1, x^8 + 14x^4 + 1.
    pub exceptional: bool,
}

/// Setwise stabilizer of {alpha, -alpha, 1/alpha, -1/alpha}; requires
/// alpha^4 != 1 so the set has four elements. Generically this is the Klein
/// four-group generated by x -> -x and x -> 1/x.
pub fn quadruple_stabilizer(alpha: &Fq) -> Result<QuadrupleReport> {
    if alpha.pow(4).is_one() || alpha.is_zero() {
        return Err(Error::Precondition("alpha^4 = 1: the quadruple degenerates".into()));
    }
    let inv = alpha.inv()?;
    let pts = [
        ProjPoint1::finite(alpha.clone()),
        ProjPoint1::finite(alpha.neg()),
        ProjPoint1::finite(inv.clone()),
        ProjPoint1::finite(inv.neg()),
    ];
    let stabilizer = setwise_stabilizer(&pts)?;
    let fingerprint = fingerprint(&stabilizer)?;
    Ok(QuadrupleReport {
        fingerprint,
        stabilizer,
        exceptional: on_exceptional_locus(alpha),
    })
}

/// alpha is a root of x^4+1, x^4+6x^2+1, x^4-6x^2+1, or x^8+14x^4+1.
pub fn on_exceptional_locus(alpha: &Fq) -> bool {
    let f = alpha.field();
    let a2 = alpha.square();
    let a4 = a2.square();
    let six = f.from_u64(6);
    let one = f.one();
    let c1 = a4.add(&one);
    let c2 = a4.add(&six.mul(&a2)).add(&one);
    let c3 = a4.sub(&six.mul(&a2)).add(&one);
    let c4 = a4.square().add(&f.from_u64(14).mul(&a4)).add(&one);
    c1.is_zero() || c2.is_zero() || c3.is_zero() || c4.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    #[test]
    fn apply_basics() {
        let f7 = make_field(7, 1).unwrap();
        let id = Moebius::identity(&f7);
        let inf = ProjPoint1::infinity(&f7);
        for v in 0..7 {
            let pt = ProjPoint1::finite(f7.from_u64(v));
            assert_eq!(id.apply(&pt), pt);
        }
        assert_eq!(id.apply(&inf), inf);

        // x -> -x fixes 0 and infinity, swaps a and -a
        let neg = Moebius::negation(&f7);
        assert_eq!(neg.apply(&ProjPoint1::finite(f7.zero())), ProjPoint1::finite(f7.zero()));
        assert_eq!(neg.apply(&inf), inf);
        assert_eq!(neg.apply(&ProjPoint1::finite(f7.from_u64(3))), ProjPoint1::finite(f7.from_u64(4)));

        // x -> 1/x swaps 0 and infinity
        let rec = Moebius::reciprocal(&f7);
        assert_eq!(rec.apply(&ProjPoint1::finite(f7.zero())), inf);
        assert_eq!(rec.apply(&inf), ProjPoint1::finite(f7.zero()));
    }

    #[test]
    fn orders() {
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(Moebius::identity(&f7).order(), 1);
        assert_eq!(Moebius::negation(&f7).order(), 2);
        // x -> (2x + 12)/(-x + 2) has order 3 when 4d = q + 1; take q = 19
        let f19 = make_field(19, 1).unwrap();
        let s = Moebius::from_i64(&f19, [2, 12, -1, 2]).unwrap();
        assert_eq!(s.order(), 3);
    }

    #[test]
    fn from_three_points_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = make_field(13, 2).unwrap();
        let q = f.size_u64().unwrap();
        let random_point = |rng: &mut rand_chacha::ChaCha8Rng| {
            if rng.gen_ratio(1, 20) {
                ProjPoint1::infinity(&f)
            } else {
                ProjPoint1::finite(f.element_at(rng.gen_range(0..q)))
            }
        };
        let mut done = 0;
        while done < 1000 {
            let src = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let dst = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let distinct = |t: &[ProjPoint1; 3]| t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
            if !distinct(&src) || !distinct(&dst) {
                continue;
            }
            let mu = Moebius::from_three_points(&src, &dst).unwrap();
            for i in 0..3 {
                assert_eq!(mu.apply(&src[i]), dst[i]);
            }
            done += 1;
        }
    }

    #[test]
    fn from_three_points_identity_and_reciprocal() {
        let f7 = make_field(7, 1).unwrap();
        let z = ProjPoint1::finite(f7.zero());
        let o = ProjPoint1::finite(f7.one());
        let i = ProjPoint1::infinity(&f7);
        let src = [z.clone(), o.clone(), i.clone()];
        let same = Moebius::from_three_points(&src, &src).unwrap();
        assert!(same.is_identity());
        let swap = Moebius::from_three_points(&src, &[i, o, z]).unwrap();
        assert_eq!(swap, Moebius::reciprocal(&f7));
        assert!(Moebius::from_three_points(
            &src,
            &[src[0].clone(), src[0].clone(), src[2].clone()]
        )
        .is_err());
    }

    #[test]
    fn from_three_points_reconstructs_fixed_point_involution() {
        // on the locus alpha^4 + 6alpha^2 + 1 = 0 the map fixing alpha and
        // 1/alpha while swapping -alpha, -1/alpha is
        // x -> ((a^2+1)x - 2a)/(2ax - a^2 - 1); alpha = 3 over F_17 is on it
        let f = make_field(17, 1).unwrap();
        let alpha = f.from_u64(3);
        let a2 = alpha.square();
        assert!(a2.square().add(&f.from_u64(6).mul(&a2)).add(&f.one()).is_zero());
        let ainv = alpha.inv().unwrap();
        let src = [
            ProjPoint1::finite(alpha.clone()),
            ProjPoint1::finite(ainv.clone()),
            ProjPoint1::finite(alpha.neg()),
        ];
        let dst = [
            ProjPoint1::finite(alpha.clone()),
            ProjPoint1::finite(ainv.clone()),
            ProjPoint1::finite(ainv.neg()),
        ];
        let mu = Moebius::from_three_points(&src, &dst).unwrap();
        let a2p1 = a2.add(&f.one());
        let expected = Moebius::new(
            a2p1.clone(),
            f.from_u64(2).mul(&alpha).neg(),
            f.from_u64(2).mul(&alpha),
            a2p1.neg(),
        )
        .unwrap();
        assert_eq!(mu, expected);
        // and it genuinely stabilizes the quadruple
        let rep = quadruple_stabilizer(&alpha).unwrap();
        assert!(rep.exceptional);
        assert!(rep.stabilizer.contains(&mu));
        assert!(rep.fingerprint.order > 4);
    }

    #[test]
    fn stabilizer_is_group_and_conjugation_equivariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let f = make_field(11, 1).unwrap();
        for _ in 0..20 {
            let mut pts: Vec<ProjPoint1> = Vec::new();
            while pts.len() < 4 {
                let cand = ProjPoint1::finite(f.element_at(rng.gen_range(0..11)));
                if !pts.contains(&cand) {
                    pts.push(cand);
                }
            }
            let stab = setwise_stabilizer(&pts).unwrap();
            // conjugate the set by a random map
            let mu = loop {
                let cand = Moebius::from_i64(
                    &f,
                    [
                        rng.gen_range(0..11),
                        rng.gen_range(0..11),
                        rng.gen_range(0..11),
                        rng.gen_range(0..11),
                    ],
                );
                if let Ok(m) = cand {
                    break m;
                }
            };
            let moved: Vec<ProjPoint1> = pts.iter().map(|p| mu.apply(p)).collect();
            let stab_moved = setwise_stabilizer(&moved).unwrap();
            let mut conjugated: Vec<Moebius> = stab
                .iter()
                .map(|g| mu.compose(g).compose(&mu.inverse()).normalized())
                .collect();
            conjugated.sort();
            assert_eq!(stab_moved, conjugated);
        }
    }

    #[test]
    fn fingerprint_labels() {
        let f13 = make_field(13, 1).unwrap();
        let id = Moebius::identity(&f13);
        let fp = fingerprint(&[id.clone()]).unwrap();
        assert_eq!(fp.label, GroupLabel::Trivial);

        let neg = Moebius::negation(&f13);
        let fp = fingerprint(&[id.clone(), neg.clone()]).unwrap();
        assert_eq!(fp.label, GroupLabel::Cyclic(2));

        // V4 = {id, -x, 1/x, -1/x}
        let rec = Moebius::reciprocal(&f13);
        let nr = neg.compose(&rec);
        let fp = fingerprint(&[id.clone(), neg.clone(), rec.clone(), nr.clone()]).unwrap();
        assert_eq!(fp.label, GroupLabel::KleinFour);
        assert_eq!(fp.element_orders, vec![1, 2, 2, 2]);

        // closure failure is rejected
        let f5 = make_field(5, 1).unwrap();
        let bad = [Moebius::identity(&f5), Moebius::from_i64(&f5, [1, 1, 0, 1]).unwrap()];
        assert!(matches!(fingerprint(&bad), Err(Error::NotAGroup)));
    }

    #[test]
    fn fingerprint_s3_vs_c6() {
        // S3 as the stabilizer of {0, 1, inf}... every permutation is realized
        let f7 = make_field(7, 1).unwrap();
        let pts = [
            ProjPoint1::finite(f7.zero()),
            ProjPoint1::finite(f7.one()),
            ProjPoint1::infinity(&f7),
        ];
        let stab = setwise_stabilizer(&pts).unwrap();
        let fp = fingerprint(&stab).unwrap();
        assert_eq!(fp.order, 6);
        assert_eq!(fp.label, GroupLabel::Sym3);
        assert_eq!(fp.element_orders, vec![1, 2, 2, 2, 3, 3]);

        // C6 generated by an order-6 element: x -> 3x in F_7 (ord(3) = 6)
        let g = Moebius::from_i64(&f7, [3, 0, 0, 1]).unwrap();
        let mut c6 = vec![Moebius::identity(&f7)];
        let mut acc = g.clone();
        while !acc.is_identity() {
            c6.push(acc.clone().normalized());
            acc = acc.compose(&g);
        }
        let fp = fingerprint(&c6).unwrap();
        assert_eq!(fp.label, GroupLabel::Cyclic(6));
        assert_eq!(fp.element_orders, vec![1, 2, 3, 3, 6, 6]);
    }

    #[test]
    fn negation_commutant_shapes() {
        let f11 = make_field(11, 1).unwrap();
        let diag = Moebius::from_i64(&f11, [4, 0, 0, 1]).unwrap();
        let anti = Moebius::from_i64(&f11, [0, 1, 6, 0]).unwrap();
        let shear = Moebius::from_i64(&f11, [1, 1, 0, 1]).unwrap();
        assert!(negation_commutant_check(&diag).commutes);
        assert!(negation_commutant_check(&anti).commutes);
        let s = negation_commutant_check(&shear);
        assert!(!s.commutes && !s.diagonal_or_antidiagonal);
        for eta in [diag, anti, shear] {
            assert!(negation_commutant_check(&eta).consistent());
        }
    }

    #[test]
    fn quadruple_stabilizer_generic_v4() {
        // over F_11 no alpha with alpha^4 != 1 lies on an exceptional locus
        // (fourth powers mod 11 are the squares {1,3,4,5,9}, and the loci
        // would need alpha^4 in {10} or {2,6}); alpha = 2 is generic
        let f11 = make_field(11, 1).unwrap();
        let alpha = f11.from_u64(2);
        assert!(!on_exceptional_locus(&alpha));
        let rep = quadruple_stabilizer(&alpha).unwrap();
        assert_eq!(rep.fingerprint.label, GroupLabel::KleinFour);
        // sigma and tau are inside
        assert!(rep.stabilizer.contains(&Moebius::negation(&f11)));
        assert!(rep.stabilizer.contains(&Moebius::reciprocal(&f11)));
    }

    #[test]
    fn quadruple_stabilizer_exceptional_octic() {
        // 9 is a root of x^8 + 14x^4 + 1 = (x^2+x+1)(x^2-x+1)(x^4-x^2+1) mod 13
        let f13 = make_field(13, 1).unwrap();
        let alpha = f13.from_u64(9);
        let a4 = alpha.pow(4);
        assert!(a4.square().add(&f13.from_u64(14).mul(&a4)).add(&f13.one()).is_zero());
        assert!(!alpha.pow(4).is_one());
        let rep = quadruple_stabilizer(&alpha).unwrap();
        assert!(rep.exceptional);
        assert!(rep.fingerprint.order > 4);
        assert!(rep.fingerprint.element_orders.contains(&3)); // a 3-cycle appears
    }

    #[test]
    fn quadruple_stabilizer_rejects_degenerate() {
        let f13 = make_field(13, 1).unwrap();
        assert!(quadruple_stabilizer(&f13.one()).is_err());
        // 5^4 = 625 = 1 mod 13, so 5 degenerates too
        assert!(f13.from_u64(5).pow(4).is_one());
        assert!(quadruple_stabilizer(&f13.from_u64(5)).is_err());
    }

    #[test]
    fn generating_subset_spans() {
        let f7 = make_field(7, 1).unwrap();
        let pts = [
            ProjPoint1::finite(f7.zero()),
            ProjPoint1::finite(f7.one()),
            ProjPoint1::infinity(&f7),
        ];
        let stab = setwise_stabilizer(&pts).unwrap();
        let gens = generating_subset(&stab);
        assert!(gens.len() <= 2);
    }
}
