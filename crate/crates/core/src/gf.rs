//! Exact arithmetic in finite fields `F_{p^r}`.
//!
//! Elements are stored as compact integers: the residue `c_0 + c_1 t + ... + c_{r-1} t^{r-1}`
//! modulo the defining polynomial is encoded as `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`.
//! All arithmetic goes through a [`GaloisField`] context, which owns log/antilog tables
//! built from the canonical generator.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

/// Conway polynomials (coefficients low-to-high, monic) for the extension fields
/// used at desk scale. Degree-one fields use `x - g` for the least primitive root `g`.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (3, 6, &[2, 2, 1, 0, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
];

/// Returns the tabulated Conway polynomial for `(p, r)`, if any.
pub fn conway_polynomial(p: u32, r: u32) -> Option<&'static [u32]> {
    CONWAY
        .iter()
        .find(|(cp, cr, _)| *cp == p && *cr == r)
        .map(|(_, _, c)| *c)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least `k >= 1` with `base^k = 1 (mod p)`; `None` when `p | base`.
pub fn multiplicative_order(base: u64, p: u64) -> Option<u64> {
    let b = base % p;
    if b == 0 {
        return None;
    }
    let mut acc = b;
    let mut k = 1;
    while acc != 1 {
        acc = acc * b % p;
        k += 1;
    }
    Some(k)
}

/// A field element in compact integer encoding.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// JSON field descriptor: `{"p": int, "r": int, "modulus": [int, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
}

// Polynomial helpers over F_p on coefficient vectors (low-to-high).

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i64) as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = da - dm + i;
            a[idx] = (a[idx] + p - c * mi % p) % p;
        }
        poly_trim(&mut a);
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len().saturating_sub(1);
    if deg == 0 || m[deg] == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            if poly_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// A field automorphism `x -> x^(p^power)`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldAuto {
    pub power: u32,
}

impl FieldAuto {
    pub const IDENTITY: FieldAuto = FieldAuto { power: 0 };

    pub fn new(power: u32) -> Self {
        FieldAuto { power }
    }

    pub fn is_identity(self, field: &GaloisField) -> bool {
        self.power.is_multiple_of(field.r())
    }

    pub fn apply(self, field: &GaloisField, x: Elem) -> Elem {
        field.frobenius(x, self.power)
    }

    pub fn inverse(self, field: &GaloisField) -> FieldAuto {
        FieldAuto {
            power: (field.r() - self.power % field.r()) % field.r(),
        }
    }

    /// Order of the automorphism in the Galois group.
    pub fn order(self, field: &GaloisField) -> u32 {
        let r = field.r();
        let k = self.power % r;
        if k == 0 {
            1
        } else {
            r / gcd(r, k)
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The finite field `F_{p^r}` with its arithmetic tables.
pub struct GaloisField {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: Elem,
    // exp has length 2(q-1) so log sums need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.p, self.r, self.modulus)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    /// Builds `F_{p^r}` from the Conway polynomial when tabulated, otherwise from the
    /// lexicographically smallest monic irreducible of degree `r`.
    pub fn new(p: u32, r: u32) -> Result<Arc<Self>> {
        Self::check_size(p, r)?;
        let modulus = if r == 1 {
            let g = (1..p)
                .find(|&g| {
                    p == 2 || (multiplicative_order(g as u64, p as u64) == Some(p as u64 - 1))
                })
                .unwrap_or(1);
            vec![(p - g) % p, 1]
        } else if let Some(c) = conway_polynomial(p, r).filter(|c| is_irreducible(c, p)) {
            c.to_vec()
        } else {
            smallest_irreducible(p, r)
        };
        Self::build(p, modulus)
    }

    pub fn prime(p: u32) -> Result<Arc<Self>> {
        Self::new(p, 1)
    }

    /// Builds a field from an explicit modulus (monic, irreducible, low-to-high).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Arc<Self>> {
        let r = modulus.len().saturating_sub(1) as u32;
        Self::check_size(p, r.max(1))?;
        if r == 0
            || modulus[r as usize] != 1
            || modulus.iter().any(|&c| c >= p)
            || !is_irreducible(&modulus, p)
        {
            return Err(Error::BadModulus(r));
        }
        Self::build(p, modulus)
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Arc<Self>> {
        let f = Self::with_modulus(d.p, d.modulus.clone())?;
        if f.r != d.r {
            return Err(Error::BadModulus(d.r));
        }
        Ok(f)
    }

    /// Parses names like `p7r1` or `p2r2`.
    pub fn from_name(name: &str) -> Result<Arc<Self>> {
        let bad = || Error::Invalid(format!("field name `{name}` (expected pPrR)"));
        let rest = name.strip_prefix('p').ok_or_else(bad)?;
        let (ps, rs) = rest.split_once('r').ok_or_else(bad)?;
        let p = ps.parse().map_err(|_| bad())?;
        let r = rs.parse().map_err(|_| bad())?;
        Self::new(p, r)
    }

    fn check_size(p: u32, r: u32) -> Result<()> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 || (p as u64).checked_pow(r).is_none_or(|q| q > MAX_ORDER) {
            return Err(Error::FieldTooLarge { p, r });
        }
        Ok(())
    }

    fn build(p: u32, modulus: Vec<u32>) -> Result<Arc<Self>> {
        let r = (modulus.len() - 1) as u32;
        let q = p.pow(r);
        let decode = |mut v: u32| {
            let mut c = Vec::with_capacity(r as usize);
            for _ in 0..r {
                c.push(v % p);
                v /= p;
            }
            poly_trim(&mut c);
            c
        };
        let encode = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        let slow_pow = |base: &[u32], mut e: u64| {
            let mut acc = vec![1u32];
            let mut b = base.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    acc = poly_mulmod(&acc, &b, &modulus, p);
                }
                b = poly_mulmod(&b, &b, &modulus, p);
                e >>= 1;
            }
            acc
        };
        let order = (q - 1) as u64;
        let divisors = prime_divisors(order);
        let generator = (1..q)
            .find(|&cand| {
                let c = decode(cand);
                divisors.iter().all(|&l| slow_pow(&c, order / l) != vec![1])
            })
            .ok_or(Error::BadModulus(r))?;
        let gpoly = decode(generator);
        let mut exp = Vec::with_capacity(2 * (q as usize - 1));
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u32];
        for i in 0..(q - 1) {
            let code = encode(&cur);
            exp.push(code);
            log[code as usize] = i;
            cur = poly_mulmod(&cur, &gpoly, &modulus, p);
        }
        if encode(&cur) != 1 {
            return Err(Error::BadModulus(r));
        }
        let first: Vec<u32> = exp.clone();
        exp.extend(first);
        let digit_neg = |v: u32| {
            let mut out = 0;
            let mut pw = 1;
            let mut v = v;
            for _ in 0..r {
                let d = v % p;
                out += ((p - d) % p) * pw;
                pw *= p;
                v /= p;
            }
            out
        };
        let neg = (0..q).map(digit_neg).collect();
        let mut field = GaloisField {
            p,
            r,
            q,
            modulus,
            generator: Elem(generator),
            exp,
            log,
            neg,
            add_table: None,
        };
        if q <= 256 && r > 1 {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.digit_add(a, b);
                }
            }
            field.add_table = Some(table);
        }
        Ok(Arc::new(field))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Field order `p^r`.
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.r == 1
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            r: self.r,
            modulus: self.modulus.clone(),
        }
    }

    /// Canonical name, e.g. `p2r2`.
    pub fn name(&self) -> String {
        format!("p{}r{}", self.p, self.r)
    }

    /// The canonical generator of the multiplicative group.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.q
    }

    fn digit_add(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut pw = 1;
        for _ in 0..self.r {
            out += ((a % self.p + b % self.p) % self.p) * pw;
            pw *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.r == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        match &self.add_table {
            Some(t) => Elem(t[(a.0 * self.q + b.0) as usize]),
            None => Elem(self.digit_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        Elem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a.0 as usize];
        Ok(Elem(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any integer exponent; negative exponents need `a != 0`.
    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem> {
        if e == 0 {
            return Ok(Elem::ONE);
        }
        if a.is_zero() {
            return if e > 0 {
                Ok(Elem::ZERO)
            } else {
                Err(Error::DivisionByZero)
            };
        }
        let n = (self.q - 1) as i64;
        let l = (self.log[a.0 as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        Ok(Elem(self.exp[l as usize]))
    }

    /// Power of a nonzero element, or of zero with a positive exponent.
    pub fn pow_u(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let n = (self.q - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        Elem(self.exp[l as usize])
    }

    /// Discrete logarithm to the canonical generator.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    /// Image of an integer under the ring map `Z -> F_{p^r}`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Prime-field element as its canonical integer in `0..p`; `None` outside `F_p`.
    pub fn to_prime(&self, a: Elem) -> Option<u32> {
        (a.0 < self.p).then_some(a.0)
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let mut v = a.0;
        (0..self.r)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    /// Human-readable form: an integer for prime fields, a polynomial in `t` otherwise.
    pub fn format(&self, a: Elem) -> String {
        if self.is_prime_field() {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Elem> {
        if c.len() > self.r as usize || c.iter().any(|&d| d >= self.p) {
            return Err(Error::Invalid(format!(
                "coefficients {c:?} do not describe an element of {}",
                self.name()
            )));
        }
        Ok(Elem(c.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)))
    }

    /// `x^(p^k)`.
    pub fn frobenius(&self, x: Elem, k: u32) -> Elem {
        let k = k % self.r;
        if k == 0 || x.is_zero() {
            return x;
        }
        self.pow_u(x, (self.p as u64).pow(k))
    }

    /// Trace to the subfield of degree `sub_degree`.
    pub fn trace_to(&self, x: Elem, sub_degree: u32) -> Result<Elem> {
        if sub_degree == 0 || !self.r.is_multiple_of(sub_degree) {
            return Err(Error::InvalidSubfield {
                sub: sub_degree,
                r: self.r,
            });
        }
        let mut acc = Elem::ZERO;
        let mut term = x;
        for _ in 0..(self.r / sub_degree) {
            acc = self.add(acc, term);
            term = self.frobenius(term, sub_degree);
        }
        Ok(acc)
    }

    /// Trace to the prime field, as an integer in `0..p`.
    pub fn trace(&self, x: Elem) -> u32 {
        let t = self.trace_to(x, 1).expect("degree 1 divides r");
        t.0
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Elem) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = (self.q - 1) as u64;
        Some(n / gcd64(n, l))
    }

    /// `generator^((q-1)/m)`, an element of exact order `m`.
    pub fn primitive_root_of_unity(&self, m: u64) -> Result<Elem> {
        let n = (self.q - 1) as u64;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NoSuchRoot { m, q: self.q });
        }
        Ok(self.pow_u(self.generator, n / m))
    }

    /// The automorphism of order 2, if `r` is even.
    pub fn involution(&self) -> Option<FieldAuto> {
        self.r.is_multiple_of(2).then(|| FieldAuto::new(self.r / 2))
    }

    /// Least Frobenius power that sends `eps` to `eps^{-1}`.
    pub fn inverting_automorphism(&self, eps: Elem) -> Option<FieldAuto> {
        let inv = self.inv(eps).ok()?;
        (0..self.r)
            .map(FieldAuto::new)
            .find(|a| a.apply(self, eps) == inv)
    }

    /// Quadratic character: `+1` on nonzero squares, `-1` on non-squares.
    pub fn quadratic_character(&self, t: Elem) -> Result<i32> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let l = self.log(t).ok_or(Error::ZeroArgument)?;
        Ok(if l % 2 == 0 { 1 } else { -1 })
    }

    /// `+1 -> 1`, `-1 -> -1` inside the field.
    pub fn sign(&self, s: i32) -> Elem {
        self.from_int(s as i64)
    }

    /// The Gauss sum `sum_{a in F_p} eps^(z a^2)` for a primitive `p`-th root `eps` in this field.
    pub fn gauss_sum(&self, p: u32, eps: Elem, z: u32) -> Result<Elem> {
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if self.element_order(eps) != Some(p as u64) {
            return Err(Error::BadRoot(p));
        }
        if z.is_multiple_of(p) {
            return Err(Error::ZeroArgument);
        }
        let mut acc = Elem::ZERO;
        for a in 0..p as u64 {
            let e = (z as u64 % p as u64) * (a * a % p as u64) % p as u64;
            acc = self.add(acc, self.pow_u(eps, e));
        }
        Ok(acc)
    }

    /// Canonical lambda with `lambda != lambda^eta` for the involution `eta`.
    pub fn non_fixed_element(&self, eta: FieldAuto) -> Option<Elem> {
        self.elements().find(|&x| eta.apply(self, x) != x)
    }
}

/// `F_{p^s}` embedded in `F_{p^r}`, with coordinates of `F_{p^r}` over the power basis
/// `1, t, ..., t^{r/s - 1}` of the larger field's generator class `t`.
#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    sub: Arc<GaloisField>,
    big: Arc<GaloisField>,
    image: Vec<Elem>,
    basis: Vec<Elem>,
    coords: Vec<Vec<Elem>>,
}

impl SubfieldEmbedding {
    pub fn new(big: &Arc<GaloisField>, sub_degree: u32) -> Result<Self> {
        let r = big.r();
        if sub_degree == 0 || !r.is_multiple_of(sub_degree) {
            return Err(Error::InvalidSubfield { sub: sub_degree, r });
        }
        let sub = if sub_degree == r {
            big.clone()
        } else {
            GaloisField::new(big.p(), sub_degree)?
        };
        // A root of the subfield modulus fixes the embedding.
        let root = if Arc::ptr_eq(&sub, big) {
            if r == 1 {
                sub.generator()
            } else {
                Elem(big.p())
            }
        } else {
            let m = sub.modulus().to_vec();
            big.elements()
                .find(|&z| {
                    let v = m
                        .iter()
                        .rev()
                        .fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, z), Elem(c)));
                    v.is_zero()
                })
                .ok_or(Error::InvalidSubfield { sub: sub_degree, r })?
        };
        let image: Vec<Elem> = sub
            .elements()
            .map(|a| {
                sub.coeffs(a)
                    .iter()
                    .rev()
                    .fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, root), Elem(c)))
            })
            .collect();
        let image = if Arc::ptr_eq(&sub, big) {
            sub.elements().collect()
        } else {
            image
        };
        let m = (r / sub_degree) as usize;
        let t = if r == 1 { Elem::ONE } else { Elem(big.p()) };
        let basis: Vec<Elem> = (0..m).map(|k| big.pow_u(t, k as u64)).collect();
        let qs = sub.order() as usize;
        let mut coords = vec![Vec::new(); big.order() as usize];
        for idx in 0..qs.pow(m as u32) {
            let mut c = Vec::with_capacity(m);
            let mut v = idx;
            let mut acc = Elem::ZERO;
            for &b in &basis {
                let ck = Elem((v % qs) as u32);
                v /= qs;
                acc = big.add(acc, big.mul(image[ck.0 as usize], b));
                c.push(ck);
            }
            coords[acc.0 as usize] = c;
        }
        Ok(SubfieldEmbedding {
            sub,
            big: big.clone(),
            image,
            basis,
            coords,
        })
    }

    pub fn sub(&self) -> &Arc<GaloisField> {
        &self.sub
    }

    pub fn big(&self) -> &Arc<GaloisField> {
        &self.big
    }

    /// `[F_{p^r} : F_{p^s}]`.
    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    pub fn embed(&self, a: Elem) -> Elem {
        self.image[a.0 as usize]
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    /// Coordinates of `a` over the subfield.
    pub fn coordinates(&self, a: Elem) -> &[Elem] {
        &self.coords[a.0 as usize]
    }
}

fn gcd64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    let count = (p as u64).pow(r);
    (0..count)
        .map(|code| {
            let mut c = Vec::with_capacity(r as usize + 1);
            let mut v = code;
            for _ in 0..r {
                c.push((v % p as u64) as u32);
                v /= p as u64;
            }
            c.push(1);
            c
        })
        .find(|c| is_irreducible(c, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Pow(i64),
}

/// A field element bundled with its field, for checked cross-field arithmetic.
#[derive(Clone, Debug)]
pub struct FieldElement {
    pub field: Arc<GaloisField>,
    pub value: Elem,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.value == other.value
    }
}

impl FieldElement {
    pub fn new(field: &Arc<GaloisField>, value: Elem) -> Self {
        FieldElement {
            field: field.clone(),
            value,
        }
    }
}

/// Checked arithmetic on bundled elements. `Inv` and `Pow` ignore `b`.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if *a.field != *b.field {
        return Err(Error::FieldMismatch);
    }
    let f = &a.field;
    let value = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Div => f.div(a.value, b.value)?,
        ArithOp::Inv => f.inv(a.value)?,
        ArithOp::Pow(e) => f.pow(a.value, e)?,
    };
    Ok(FieldElement::new(f, value))
}
