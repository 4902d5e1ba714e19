//! Sparse multivariate polynomials over ℚ with atoms as indeterminates.
//!
//! Terms are kept sorted in descending graded-lex order, where atoms that
//! sort first (natural name order) are the most significant.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::expr::Atom;

pub type Coeff = BigRational;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Atom, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn atom(a: Atom, e: u32) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((a, e));
        }
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exp(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Atom, u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    /// True when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(a, e)| other.exp(a) >= *e)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (a, e) in self.0.iter() {
            let d = e - other.exp(a);
            if d > 0 {
                out.push((a.clone(), d));
            }
        }
        Monomial(out)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (a, e) in self.0.iter() {
            let d = (*e).min(other.exp(a));
            if d > 0 {
                out.push((a.clone(), d));
            }
        }
        Monomial(out)
    }

    /// Splits off the power of `a`.
    pub fn without(&self, a: &Atom) -> (u32, Monomial) {
        let mut e = 0;
        let mut out = SmallVec::new();
        for (b, k) in self.0.iter() {
            if b == a {
                e = *k;
            } else {
                out.push((b.clone(), *k));
            }
        }
        (e, Monomial(out))
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Monomial {
        let mut v: SmallVec<[(Atom, u32); 4]> = self.0.iter().map(|(a, e)| (f(a), *e)).collect();
        v.sort_by(|x, y| x.0.cmp(&y.0));
        // merge duplicates produced by non-injective maps
        let mut out: SmallVec<[(Atom, u32); 4]> = SmallVec::new();
        for (a, e) in v {
            match out.last_mut() {
                Some((b, k)) if *b == a => *k += e,
                _ => out.push((a, e)),
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ex != ey {
                            return ex.cmp(ey);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Coeff)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn atom(a: Atom) -> Poly {
        Poly {
            terms: vec![(Monomial::atom(a, 1), Coeff::one())],
        }
    }

    pub fn term(m: Monomial, c: Coeff) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    /// Builds a polynomial from terms in arbitrary order, combining duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Poly {
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match map.get_mut(&m) {
                Some(acc) => *acc += c,
                None => {
                    map.insert(m, c);
                }
            }
        }
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        if self.terms.is_empty() {
            Some(Coeff::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Coeff)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for (a, _) in m.iter() {
                out.insert(a.clone());
            }
        }
        out
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(a) > 0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        // multiplying by a monomial preserves the term order
        Poly {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.is_constant() {
            return self.scale(&other.terms[0].1);
        }
        if self.is_constant() {
            return other.scale(&self.terms[0].1);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match map.get_mut(&m) {
                    Some(acc) => *acc += c,
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Poly {
            terms: map
                .into_iter()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self, a: &Atom) -> Poly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let (e, rest) = m.without(a);
            if e == 0 {
                None
            } else {
                let mono = rest.mul(&Monomial::atom(a.clone(), e - 1));
                Some((mono, c * Coeff::from_integer(BigInt::from(e))))
            }
        });
        Poly::from_terms(terms)
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(a)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `a`, indexed by degree.
    pub fn coeffs_in(&self, a: &Atom) -> Vec<Poly> {
        let d = self.degree_in(a) as usize;
        let mut buckets: Vec<Vec<(Monomial, Coeff)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.without(a);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn from_coeffs_in(a: &Atom, coeffs: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&c.mul_term(&Monomial::atom(a.clone(), e as u32), &Coeff::one()));
        }
        acc
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_atoms(f), c.clone())))
    }

    /// Writes `self = k * p` with `p` having coprime integer coefficients and
    /// a positive leading coefficient.
    pub fn primitive_integer(&self) -> (Coeff, Poly) {
        if self.is_zero() {
            return (Coeff::one(), Poly::zero());
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for (_, c) in &self.terms {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let mut k = BigRational::new(num_gcd, den_lcm);
        if self.terms[0].1.is_negative() {
            k = -k;
        }
        let inv = k.recip();
        (k, self.scale(&inv))
    }

    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.terms[0].clone();
        let dc_inv = dc.recip();
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some((rm, rc)) = r.terms.first().cloned() {
            if !dm.divides(&rm) {
                return None;
            }
            let tm = rm.div(&dm);
            let tc = &rc * &dc_inv;
            r = r.sub(&d.mul_term(&tm, &tc));
            q.push((tm, tc));
        }
        Some(Poly { terms: q })
    }

    /// Evaluates with a user-supplied ring.
    pub fn eval_with<T: Clone>(
        &self,
        zero: T,
        coeff: impl Fn(&Coeff) -> T,
        atom: &mut impl FnMut(&Atom) -> T,
        add: impl Fn(&T, &T) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        let mut cache: BTreeMap<Atom, Vec<T>> = BTreeMap::new();
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for (a, e) in m.iter() {
                if !cache.contains_key(a) {
                    let v = atom(a);
                    cache.insert(a.clone(), vec![v]);
                }
                let powers = cache.get_mut(a).expect("cached");
                while powers.len() < *e as usize {
                    let next = mul(powers.last().expect("nonempty"), &powers[0]);
                    powers.push(next);
                }
                t = mul(&t, &powers[*e as usize - 1]);
            }
            acc = add(&acc, &t);
        }
        acc
    }
}

/// Greatest common divisor, normalized to coprime integer coefficients and a
/// positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.primitive_integer().1;
    }
    if b.is_zero() {
        return a.primitive_integer().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        let g = a.monomial_content().gcd(&b.monomial_content());
        return Poly::term(g, Coeff::one());
    }
    let atoms_a = a.atoms();
    let atoms_b = b.atoms();
    let only_a: Vec<&Atom> = atoms_a.difference(&atoms_b).collect();
    let only_b: Vec<&Atom> = atoms_b.difference(&atoms_a).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        // an atom missing from one side can only enter through contents
        let mut a = a.clone();
        for v in only_a {
            a = content_in(&a, v);
            if a.is_constant() {
                return Poly::one();
            }
        }
        let mut b = b.clone();
        for v in only_b {
            b = content_in(&b, v);
            if b.is_constant() {
                return Poly::one();
            }
        }
        return gcd(&a, &b);
    }
    let degrees: Vec<(Option<usize>, &Atom)> = atoms_a
        .iter()
        .map(|v| (image_gcd_degree(a, b, v), v))
        .collect();
    if degrees.iter().all(|(d, _)| *d == Some(0)) {
        return Poly::one();
    }
    let mut best: Option<(usize, Atom)> = None;
    for (d, v) in degrees {
        match d {
            Some(0) => return gcd(&content_in(a, v), &content_in(b, v)),
            Some(d) if best.as_ref().is_none_or(|(e, _)| d < *e) => best = Some((d, v.clone())),
            _ => {}
        }
    }
    let Some(v) = best
        .map(|(_, v)| v)
        .or_else(|| atoms_a.iter().next().cloned())
    else {
        return Poly::one();
    };
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = if pb.degree_in(&v) <= pa.degree_in(&v) && pa.div_exact(&pb).is_some() {
        pb
    } else if pa.degree_in(&v) <= pb.degree_in(&v) && pb.div_exact(&pa).is_some() {
        pa
    } else {
        primitive_prs(&pa, &pb, &v)
    };
    c.mul(&g).primitive_integer().1
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn int_mod(n: &BigInt) -> u64 {
    let r = n.mod_floor(&BigInt::from(PRIME));
    u64::try_from(r).expect("reduced below the modulus")
}

/// `c mod PRIME`, or `None` when the denominator vanishes.
fn rational_mod(c: &Coeff) -> Option<u64> {
    let d = int_mod(c.denom());
    (d != 0).then(|| mul_mod(int_mod(c.numer()), inv_mod(d)))
}

/// Coefficients in `v` of `p` mod `PRIME` with every other atom replaced by
/// a fixed residue.
fn univariate_image(p: &Poly, v: &Atom, values: &BTreeMap<Atom, u64>) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in &p.terms {
        let mut term = rational_mod(c)?;
        let mut deg = 0;
        for (a, e) in m.iter() {
            if a == v {
                deg = *e as usize;
            } else {
                term = mul_mod(term, pow_mod(values[a], *e as u64));
            }
        }
        out[deg] = (out[deg] + term) % PRIME;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of the gcd of two univariate polynomials mod `PRIME`.
fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lb = inv_mod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().expect("nonempty"), lb);
            let off = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[off + i] = (a[off + i] + PRIME - mul_mod(f, *c)) % PRIME;
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// An upper bound for `deg_v gcd(a, b)` from modular images at points where
/// neither leading coefficient in `v` vanishes; `None` if no such point was
/// found.
fn image_gcd_degree(a: &Poly, b: &Poly, v: &Atom) -> Option<usize> {
    let others: BTreeSet<Atom> = a
        .atoms()
        .union(&b.atoms())
        .filter(|x| *x != v)
        .cloned()
        .collect();
    for attempt in 0..3u64 {
        let values: BTreeMap<Atom, u64> = others
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let seed = (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
                    ^ attempt.wrapping_mul(0xbf58_476d_1ce4_e5b9);
                (x.clone(), seed % PRIME)
            })
            .collect();
        let (Some(ia), Some(ib)) = (
            univariate_image(a, v, &values),
            univariate_image(b, v, &values),
        ) else {
            continue;
        };
        if ia.last().is_some_and(|c| *c != 0) && ib.last().is_some_and(|c| *c != 0) {
            return Some(univariate_gcd_degree(ia, ib));
        }
    }
    None
}

/// Gcd of the coefficients of `p` with respect to `v`.
fn content_in(p: &Poly, v: &Atom) -> Poly {
    let coeffs = p.coeffs_in(v);
    let mut g = Poly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn primitive_part_in(p: &Poly, v: &Atom) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c)
        .expect("content divides")
        .primitive_integer()
        .1
}

fn pseudo_rem(a: &Poly, b: &Poly, v: &Atom) -> Poly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc.last().cloned().unwrap_or_else(Poly::zero);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v).pop().unwrap_or_else(Poly::zero);
        let shift = Monomial::atom(v.clone(), dr - db);
        let t = lr.mul_term(&shift, &Coeff::one()).mul(b);
        r = r.mul(&lb).sub(&t);
    }
    r
}

fn primitive_prs(a: &Poly, b: &Poly, v: &Atom) -> Poly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    if b.degree_in(v) == 0 {
        return Poly::one();
    }
    loop {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return primitive_part_in(&b, v);
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Symbol;

    fn var(n: &str) -> Poly {
        Poly::atom(Atom::Var(Symbol::new(n)))
    }

    fn int(k: i64) -> Poly {
        Poly::constant(Coeff::from_integer(BigInt::from(k)))
    }

    #[test]
    fn gcd_of_products() {
        let x = var("x");
        let y = var("y");
        let z = var("z");
        let f = x.add(&y).mul(&z.sub(&int(1)));
        let g = x.add(&y).mul(&x.sub(&z));
        let h = gcd(&f.mul(&int(3)), &g.mul(&int(6)));
        assert_eq!(h, x.add(&y));
    }

    #[test]
    fn gcd_coprime() {
        let x = var("x");
        let y = var("y");
        let f = x.mul(&x).add(&y);
        let g = x.add(&y.mul(&y));
        assert!(gcd(&f, &g).is_one());
    }

    #[test]
    fn gcd_with_powers() {
        let x = var("x");
        let y = var("y");
        let a = x.sub(&y).pow(3).mul(&x.add(&int(2)));
        let b = x.sub(&y).pow(2).mul(&y.add(&int(5)));
        assert_eq!(gcd(&a, &b), x.sub(&y).pow(2));
    }

    #[test]
    fn exact_division() {
        let x = var("x");
        let y = var("y");
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p.div_exact(&x.add(&y)).unwrap(), x.sub(&y));
        assert!(p.div_exact(&x.add(&int(1))).is_none());
    }
}
