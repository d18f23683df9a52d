//! Exact cyclotomic scalars.
//!
//! A [`Scalar`] is an element of the union of all cyclotomic fields
//! `Q(zeta_n)`, stored as a finite sum `sum_q c_q * e^{2 pi i q}` with
//! rational coefficients `c_q` and rational exponents `q` in `[0, 1)`.
//!
//! Exponents are kept in a *canonical tensor form* so that map equality is
//! value equality, independently of any ambient conductor:
//!
//! * each `q` is decomposed as `sum_p j_p / p^{v_p}` over the prime powers of
//!   its denominator (Chinese remainder decomposition), and
//! * each component satisfies `0 <= j_p < phi(p^{v_p})`; components outside
//!   that range are rewritten with the prime-power cyclotomic relation
//!   `zeta^{phi(p^v)} = -(1 + zeta^{p^{v-1}} + ... + zeta^{(p-2) p^{v-1}})`.
//!
//! The canonical exponents of `Q(zeta_n)` are a subset of those of
//! `Q(zeta_N)` whenever `n | N`, which is what makes the representation
//! conductor-free.

use crate::linalg;
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Generalized binomial coefficient `(n choose j)` for rational `n`:
/// `n (n-1) ... (n-j+1) / j!`.
pub fn general_binomial(n: &Rat, j: u64) -> Rat {
    let mut num = Rat::one();
    let mut t = n.clone();
    for _ in 0..j {
        num = &num * &t;
        t = &t - &Rat::one();
    }
    &num / &factorial(j)
}

/// `j!` as an exact rational.
pub fn factorial(j: u64) -> Rat {
    let mut acc = Rat::one();
    for k in 1..=j {
        acc = &acc * &Rat::from_int(k as i64);
    }
    acc
}

fn factor(mut n: BigInt) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            let mut e = 0u32;
            while n.is_multiple_of(&p) {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one(), "inv_mod of non-unit");
    g.x.mod_floor(m)
}

/// Expresses `e^{2 pi i q}` in the canonical tensor basis.
///
/// Returns `(q_i, s_i)` pairs with canonical `q_i` and signs `s_i` such that
/// `e^{2 pi i q} = sum_i s_i e^{2 pi i q_i}`.
fn canonical_terms(q: &Rat) -> Vec<(Rat, i32)> {
    let q = q.mod_one();
    if q.is_zero() {
        return vec![(Rat::zero(), 1)];
    }
    let n = q.denom().clone();
    let j = q.numer().clone();
    // Per-prime component lists: (exponent contribution, sign).
    let mut component_lists: Vec<Vec<(Rat, i32)>> = Vec::new();
    for (p, v) in factor(n.clone()) {
        let pv = p.pow(v);
        let m = &n / &pv;
        let jp = ((&j % &pv) * inv_mod(&m.mod_floor(&pv), &pv)).mod_floor(&pv);
        let half_step = &pv / &p; // p^{v-1}
        let phi = &pv - &half_step;
        let mut comps = Vec::new();
        if jp < phi {
            comps.push((Rat::from_bigs(jp, pv.clone()), 1));
        } else {
            let r = &jp - &phi;
            let mut i = BigInt::zero();
            let pm1 = &p - 1;
            while i < pm1 {
                let e = &r + &i * &half_step;
                comps.push((Rat::from_bigs(e, pv.clone()), -1));
                i += 1;
            }
        }
        component_lists.push(comps);
    }
    let mut acc: Vec<(Rat, i32)> = vec![(Rat::zero(), 1)];
    for comps in component_lists {
        let mut next = Vec::with_capacity(acc.len() * comps.len());
        for (q0, s0) in &acc {
            for (q1, s1) in &comps {
                next.push(((q0 + q1).mod_one(), s0 * s1));
            }
        }
        acc = next;
    }
    acc
}

/// All canonical exponents of `Q(zeta_n)`, sorted ascending.
///
/// There are `phi(n)` of them; `0` is always included.
pub fn cyclotomic_basis(n: &BigInt) -> Vec<Rat> {
    let mut acc: Vec<Rat> = vec![Rat::zero()];
    for (p, v) in factor(n.clone()) {
        let pv = p.pow(v);
        let phi = &pv - &pv / &p;
        let mut next = Vec::new();
        for q0 in &acc {
            let mut j = BigInt::zero();
            while j < phi {
                next.push((q0 + &Rat::from_bigs(j.clone(), pv.clone())).mod_one());
                j += 1;
            }
        }
        acc = next;
    }
    acc.sort();
    acc
}

/// An exact element of the universal cyclotomic field.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Scalar {
    terms: BTreeMap<Rat, Rat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rat::one())
    }

    pub fn from_rational(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Rat::zero(), c);
        }
        Scalar { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Scalar::from_rational(Rat::from_int(c))
    }

    /// `e^{2 pi i q}`.
    pub fn e2pi(q: &Rat) -> Self {
        let mut s = Scalar::zero();
        s.accumulate(q, &Rat::one());
        s
    }

    /// `e^{i pi q}`, i.e. the exponent is measured in half-turns.
    ///
    /// This is the phase that appears throughout the engine: pairings
    /// contribute `e^{i pi (a|b)}` and series substitutions contribute
    /// `e^{i pi exponent}` factors.
    pub fn root_of_unity(q: &Rat) -> Self {
        Scalar::e2pi(&(q / &Rat::from_int(2)))
    }

    /// `+1` or `-1` depending on the parity of an integer exponent.
    pub fn sign_pow(e: &Rat) -> Self {
        debug_assert!(e.is_integer(), "sign_pow needs an integer exponent");
        if e.mod_two().is_zero() {
            Scalar::one()
        } else {
            -&Scalar::one()
        }
    }

    fn accumulate(&mut self, q: &Rat, c: &Rat) {
        if c.is_zero() {
            return;
        }
        for (e, s) in canonical_terms(q) {
            let signed = if s >= 0 { c.clone() } else { -c.clone() };
            let new_val = match self.terms.get(&e) {
                Some(old) => old + &signed,
                None => signed,
            };
            if new_val.is_zero() {
                self.terms.remove(&e);
            } else {
                self.terms.insert(e, new_val);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|r| r.is_one()).unwrap_or(false)
    }

    /// The value as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (q, c) = self.terms.iter().next().unwrap();
                if q.is_zero() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v = &*v * c;
        }
    }

    pub fn mul_rat(&self, c: &Rat) -> Scalar {
        let mut s = self.clone();
        if !c.is_one() {
            s.scale(c);
        }
        s
    }

    pub fn pow_u(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Least `n` with `self` in `Q(zeta_n)` under the stored representation
    /// (the lcm of the exponent denominators).
    pub fn conductor(&self) -> BigInt {
        let mut n = BigInt::one();
        for q in self.terms.keys() {
            n = n.lcm(&q.denom());
        }
        n
    }

    /// Exact multiplicative inverse; `None` for zero.
    pub fn invert(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.terms.len() == 1 {
            let (q, c) = self.terms.iter().next().unwrap();
            let mut s = Scalar::zero();
            s.accumulate(&(-q.clone()), &c.recip().expect("nonzero term"));
            return Some(s);
        }
        // Multiplication-by-self matrix in the canonical basis of the
        // conductor field, then one exact linear solve against 1.
        let n = self.conductor();
        let basis = cyclotomic_basis(&n);
        let index: BTreeMap<&Rat, usize> =
            basis.iter().enumerate().map(|(k, q)| (q, k)).collect();
        let dim = basis.len();
        let mut mat = vec![vec![Rat::zero(); dim]; dim];
        for (k, e) in basis.iter().enumerate() {
            let col = self * &Scalar::e2pi(e);
            for (q, c) in col.terms {
                let row = *index.get(&q).expect("product stays inside the field");
                mat[row][k] = c;
            }
        }
        let mut rhs = vec![Rat::zero(); dim];
        rhs[*index.get(&Rat::zero()).expect("1 is a basis vector")] = Rat::one();
        let x = linalg::solve_square(&mat, &rhs)?;
        let mut out = Scalar::zero();
        for (k, c) in x.into_iter().enumerate() {
            out.accumulate(&basis[k], &c);
        }
        Some(out)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (q, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if q.is_zero() {
                write!(f, "{mag}")?;
            } else {
                let half_turns = &Rat::from_int(2) * q;
                write!(f, "{mag}*u({half_turns})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (q, c) in &rhs.terms {
            // Keys on both sides are canonical already.
            let entry = self.terms.entry(q.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(q);
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &rhs.terms {
                out.accumulate(&(q1 + q2), &(c1 * c2));
            }
        }
        out
    }
}

impl Mul<&Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        &self * rhs
    }
}
