//! Sparse formal series with rational exponents and explicit windows.
//!
//! Series in one or two variables are stored as sorted maps from exponents
//! to coefficients.  Because most series of interest here are infinite in at
//! least one direction, every series carries *windows*: a coefficient at
//! exponent `(e1, e2)` is guaranteed correct (and stored if nonzero) exactly
//! when `e1 <= window1` and `e2 <= window2`, where a missing window means
//! "no bound" — the series is completely known in that variable.
//!
//! Alongside windows, a series carries mathematical facts about its full
//! (untruncated) term support, used to decide whether a product of two
//! series has well-defined coefficients:
//!
//! * `floor1`/`floor2` — no nonzero exponents below these bounds;
//! * `sup1`/`sup2` — no nonzero exponents above these bounds;
//! * `diag` — every nonzero term satisfies `e1 + e2 = diag`.
//!
//! Invariants:
//!
//! * stored exponents always lie inside the window region;
//! * zero coefficients are never stored;
//! * metadata describes the *mathematical* series, not the stored part, so
//!   it survives truncation unchanged (except windows).

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::scalar::{general_binomial, Scalar};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient ring of a formal series: enough structure to accumulate
/// terms and scale them by cyclotomic numbers.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&mut self, rhs: &Self);
    fn scale(&mut self, s: &Scalar);

    fn negate(&mut self) {
        self.scale(&-&Scalar::one());
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn scale(&mut self, s: &Scalar) {
        *self = &*self * s;
    }
}

fn opt_min(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x <= y { x.clone() } else { y.clone() }),
        (Some(x), None) => Some(x.clone()),
        (None, Some(y)) => Some(y.clone()),
        (None, None) => None,
    }
}

fn opt_max(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x >= y { x.clone() } else { y.clone() }),
        _ => None,
    }
}

fn opt_add(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// Formal series in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1<C: Coeff> {
    terms: BTreeMap<Rat, C>,
    /// Coefficients at exponents `<= window` are complete; `None` = all.
    pub window: Option<Rat>,
    /// No nonzero exponents below this bound.
    pub floor: Option<Rat>,
}

impl<C: Coeff> Series1<C> {
    pub fn zero() -> Self {
        Series1 {
            terms: BTreeMap::new(),
            window: None,
            floor: None,
        }
    }

    pub fn with_window(window: Rat) -> Self {
        Series1 {
            terms: BTreeMap::new(),
            window: Some(window),
            floor: None,
        }
    }

    pub fn add_term(&mut self, e: Rat, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(w) = &self.window {
            if &e > w {
                return;
            }
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                old.add_ref(&c);
                if old.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn coefficient(&self, e: &Rat) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lowest_exponent(&self) -> Option<&Rat> {
        self.terms.keys().next()
    }

    pub fn scale(&mut self, s: &Scalar) {
        if s.is_zero() {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            c.scale(s);
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = Series1 {
            terms: self.terms.clone(),
            window: opt_min(&self.window, &rhs.window),
            floor: opt_min(&self.floor, &rhs.floor),
        };
        out.terms.retain(|e, _| match &out.window {
            Some(w) => e <= w,
            None => true,
        });
        for (e, c) in &rhs.terms {
            if let Some(w) = &out.window {
                if e > w {
                    continue;
                }
            }
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut neg = rhs.clone();
        for c in neg.terms.values_mut() {
            c.negate();
        }
        self.add(&neg)
    }

    /// Ordinary derivative: `e -> e * coeff` at `e - 1`.
    pub fn derivative(&self) -> Self {
        let mut out = Series1 {
            terms: BTreeMap::new(),
            window: self.window.as_ref().map(|w| w - &Rat::one()),
            floor: self.floor.as_ref().map(|f| f - &Rat::one()),
        };
        for (e, c) in &self.terms {
            let mut c = c.clone();
            c.scale(&Scalar::from_rational(e.clone()));
            out.add_term(e - &Rat::one(), c);
        }
        out
    }

    /// Multiplies the coefficient at every exponent `e` by `e^{-i pi e}`;
    /// this realizes the substitution `z -> e^{-i pi} z`.
    pub fn rotate_half_turn(&self) -> Self {
        let mut out = Series1 {
            terms: BTreeMap::new(),
            window: self.window.clone(),
            floor: self.floor.clone(),
        };
        for (e, c) in &self.terms {
            let mut c = c.clone();
            c.scale(&Scalar::root_of_unity(&-e));
            out.add_term(e.clone(), c);
        }
        out
    }

    /// First exponent (within the window) where the two series differ.
    pub fn first_difference(&self, rhs: &Self) -> Option<(Rat, C, C)> {
        let cap = opt_min(&self.window, &rhs.window);
        let mut keys: Vec<&Rat> = self.terms.keys().chain(rhs.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        for e in keys {
            if let Some(w) = &cap {
                if e > w {
                    continue;
                }
            }
            let a = self.coefficient(e);
            let b = rhs.coefficient(e);
            if a != b {
                return Some((e.clone(), a, b));
            }
        }
        None
    }

    pub fn render(&self, var: &str) -> String
    where
        C: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{var}^({e})*({c})"))
            .collect();
        parts.join(" + ")
    }
}

/// Which variable of a two-variable series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Z,
    W,
}

/// Expansion direction for binomial series in two variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominant {
    /// Expand in ascending powers of `w` (valid for `|z| > |w|`).
    Z,
    /// Expand in ascending powers of `z` (valid for `|w| > |z|`).
    W,
}

/// Sign of the binomial being expanded: `(z - w)^n` or `(z + w)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinomialSign {
    Minus,
    Plus,
}

/// Formal series in two variables `z` (first exponent) and `w` (second).
#[derive(Clone, Debug, PartialEq)]
pub struct Series2<C: Coeff> {
    terms: BTreeMap<(Rat, Rat), C>,
    pub window1: Option<Rat>,
    pub window2: Option<Rat>,
    pub floor1: Option<Rat>,
    pub floor2: Option<Rat>,
    pub sup1: Option<Rat>,
    pub sup2: Option<Rat>,
    /// If set, every nonzero term satisfies `e1 + e2 = diag`.
    pub diag: Option<Rat>,
}

impl<C: Coeff> Series2<C> {
    pub fn exact() -> Self {
        Series2 {
            terms: BTreeMap::new(),
            window1: None,
            window2: None,
            floor1: None,
            floor2: None,
            sup1: None,
            sup2: None,
            diag: None,
        }
    }

    pub fn with_windows(w1: Option<Rat>, w2: Option<Rat>) -> Self {
        let mut s = Series2::exact();
        s.window1 = w1;
        s.window2 = w2;
        s
    }

    pub fn is_exact(&self) -> bool {
        self.window1.is_none() && self.window2.is_none()
    }

    pub fn add_term(&mut self, e1: Rat, e2: Rat, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(w) = &self.window1 {
            if &e1 > w {
                return;
            }
        }
        if let Some(w) = &self.window2 {
            if &e2 > w {
                return;
            }
        }
        let key = (e1, e2);
        match self.terms.get_mut(&key) {
            Some(old) => {
                old.add_ref(&c);
                if old.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn coefficient(&self, e1: &Rat, e2: &Rat) -> C {
        self.terms
            .get(&(e1.clone(), e2.clone()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Rat, Rat), &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&mut self, s: &Scalar) {
        if s.is_zero() {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            c.scale(s);
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn negate(&mut self) {
        for c in self.terms.values_mut() {
            c.negate();
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = Series2 {
            terms: BTreeMap::new(),
            window1: opt_min(&self.window1, &rhs.window1),
            window2: opt_min(&self.window2, &rhs.window2),
            floor1: opt_min(&self.floor1, &rhs.floor1),
            floor2: opt_min(&self.floor2, &rhs.floor2),
            sup1: opt_max(&self.sup1, &rhs.sup1),
            sup2: opt_max(&self.sup2, &rhs.sup2),
            diag: if self.diag == rhs.diag {
                self.diag.clone()
            } else {
                None
            },
        };
        for (k, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(k.0.clone(), k.1.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut neg = rhs.clone();
        neg.negate();
        self.add(&neg)
    }

    /// Shifts every exponent of one variable by `delta`.
    pub fn shift(&self, var: Var, delta: &Rat) -> Self {
        let mut out = Series2 {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        match var {
            Var::Z => {
                out.window1 = self.window1.as_ref().map(|w| w + delta);
                out.floor1 = self.floor1.as_ref().map(|f| f + delta);
                out.sup1 = self.sup1.as_ref().map(|s| s + delta);
                out.diag = self.diag.as_ref().map(|d| d + delta);
            }
            Var::W => {
                out.window2 = self.window2.as_ref().map(|w| w + delta);
                out.floor2 = self.floor2.as_ref().map(|f| f + delta);
                out.sup2 = self.sup2.as_ref().map(|s| s + delta);
                out.diag = self.diag.as_ref().map(|d| d + delta);
            }
        }
        for ((e1, e2), c) in &self.terms {
            match var {
                Var::Z => out.terms.insert((e1 + delta, e2.clone()), c.clone()),
                Var::W => out.terms.insert((e1.clone(), e2 + delta), c.clone()),
            };
        }
        out
    }

    /// First exponent pair (within both windows) where the series differ.
    pub fn first_difference(&self, rhs: &Self) -> Option<(Rat, Rat, C, C)> {
        let cap1 = opt_min(&self.window1, &rhs.window1);
        let cap2 = opt_min(&self.window2, &rhs.window2);
        let mut keys: Vec<&(Rat, Rat)> = self.terms.keys().chain(rhs.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            if let Some(w) = &cap1 {
                if &k.0 > w {
                    continue;
                }
            }
            if let Some(w) = &cap2 {
                if &k.1 > w {
                    continue;
                }
            }
            let a = self.coefficient(&k.0, &k.1);
            let b = rhs.coefficient(&k.0, &k.1);
            if a != b {
                return Some((k.0.clone(), k.1.clone(), a, b));
            }
        }
        None
    }

    pub fn render(&self, var1: &str, var2: &str) -> String
    where
        C: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((e1, e2), c)| format!("{var1}^({e1})*{var2}^({e2})*({c})"))
            .collect();
        parts.join(" + ")
    }
}

impl<C: Coeff> Series1<C> {
    /// Embeds a one-variable series as a two-variable one, placing its
    /// exponents on the given variable and `0` on the other.
    pub fn embed(&self, var: Var) -> Series2<C> {
        let mut out = Series2::exact();
        match var {
            Var::Z => {
                out.window1 = self.window.clone();
                out.floor1 = self.floor.clone();
                out.floor2 = Some(Rat::zero());
                out.sup2 = Some(Rat::zero());
            }
            Var::W => {
                out.window2 = self.window.clone();
                out.floor2 = self.floor.clone();
                out.floor1 = Some(Rat::zero());
                out.sup1 = Some(Rat::zero());
            }
        }
        for (e, c) in &self.terms {
            match var {
                Var::Z => out.terms.insert((e.clone(), Rat::zero()), c.clone()),
                Var::W => out.terms.insert((Rat::zero(), e.clone()), c.clone()),
            };
        }
        out
    }
}

/// The binomial expansion of `(z ± w)^n` in the chosen domain.
///
/// * `Dominant::Z`: `sum_{j>=0} C(n,j) (±1)^j z^{n-j} w^j`;
/// * `Dominant::W`: the same series read in the other domain, which for the
///   `Minus` sign carries the substitution phase `e^{i pi n}`:
///   `e^{i pi n} sum_{j>=0} C(n,j) (±1)^j z^j w^{n-j}` (`Plus`: no phase,
///   `sum_j C(n,j) z^j w^{n-j}`).
///
/// When `n` is a nonnegative integer the result is an exact polynomial and
/// the windows are ignored; otherwise the expansion is truncated at the
/// requested windows.
pub fn binomial_expansion(
    n: &Rat,
    sign: BinomialSign,
    dir: Dominant,
    w1: &Rat,
    w2: &Rat,
) -> Series2<Scalar> {
    let exact = n.is_integer() && !n.is_negative();
    let mut out = if exact {
        let mut s = Series2::exact();
        s.floor1 = Some(Rat::zero());
        s.floor2 = Some(Rat::zero());
        s.sup1 = Some(n.clone());
        s.sup2 = Some(n.clone());
        s.diag = Some(n.clone());
        s
    } else {
        let mut s = match dir {
            Dominant::Z => Series2::with_windows(None, Some(w2.clone())),
            Dominant::W => Series2::with_windows(Some(w1.clone()), None),
        };
        s.diag = Some(n.clone());
        match dir {
            Dominant::Z => {
                s.floor2 = Some(Rat::zero());
                s.sup1 = Some(n.clone());
            }
            Dominant::W => {
                s.floor1 = Some(Rat::zero());
                s.sup2 = Some(n.clone());
            }
        }
        s
    };
    let phase = match (sign, dir) {
        (BinomialSign::Minus, Dominant::W) => Scalar::root_of_unity(n),
        _ => Scalar::one(),
    };
    let alternating = matches!(sign, BinomialSign::Minus);
    let cap: Option<i64> = if exact {
        n.to_i64()
    } else {
        let asc_window = match dir {
            Dominant::Z => w2,
            Dominant::W => w1,
        };
        if asc_window.is_negative() {
            Some(-1)
        } else {
            asc_window.floor_int().to_i64()
        }
    };
    let Some(cap) = cap else {
        return out;
    };
    for j in 0..=cap.max(-1) {
        if j < 0 {
            break;
        }
        let mut c = phase.mul_rat(&general_binomial(n, j as u64));
        if alternating && j % 2 == 1 {
            c = -&c;
        }
        let desc = n - &Rat::from_int(j);
        let asc = Rat::from_int(j);
        match dir {
            Dominant::Z => out.add_term(desc, asc, c),
            Dominant::W => out.add_term(asc, desc, c),
        }
    }
    out
}

/// The divided derivative `∂_w^{(k)}` of the coset delta function
/// `sum_{j in d+Z} z^{-j-1} w^j`, truncated at the given windows:
/// `sum_{j in d+Z} C(j,k) z^{-j-1} w^{j-k}`.
pub fn delta_derivative(d: &Rat, k: u64, w1: &Rat, w2: &Rat) -> Series2<Scalar> {
    let mut out = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    out.diag = Some(-Rat::one() - Rat::from_int(k as i64));
    // e1 = -j-1 <= w1  =>  j >= -1-w1 ; e2 = j-k <= w2  =>  j <= w2+k.
    let lo = -Rat::one() - w1;
    let hi = w2 + &Rat::from_int(k as i64);
    for j in crate::rat::coset_range(d, &lo, &hi) {
        let c = Scalar::from_rational(general_binomial(&j, k));
        out.add_term(-&j - &Rat::one(), &j - &Rat::from_int(k as i64), c);
    }
    out
}

#[derive(Clone, Copy)]
struct MetaView<'a> {
    window1: &'a Option<Rat>,
    window2: &'a Option<Rat>,
    floor1: &'a Option<Rat>,
    floor2: &'a Option<Rat>,
    sup1: &'a Option<Rat>,
    sup2: &'a Option<Rat>,
    diag: &'a Option<Rat>,
}

impl<'a> MetaView<'a> {
    fn of<C: Coeff>(s: &'a Series2<C>) -> Self {
        MetaView {
            window1: &s.window1,
            window2: &s.window2,
            floor1: &s.floor1,
            floor2: &s.floor2,
            sup1: &s.sup1,
            sup2: &s.sup2,
            diag: &s.diag,
        }
    }

    fn window(&self, v: Var) -> &Option<Rat> {
        match v {
            Var::Z => self.window1,
            Var::W => self.window2,
        }
    }

    fn floor(&self, v: Var) -> &Option<Rat> {
        match v {
            Var::Z => self.floor1,
            Var::W => self.floor2,
        }
    }

    fn sup(&self, v: Var) -> &Option<Rat> {
        match v {
            Var::Z => self.sup1,
            Var::W => self.sup2,
        }
    }
}

fn other(v: Var) -> Var {
    match v {
        Var::Z => Var::W,
        Var::W => Var::Z,
    }
}

fn req_window(v: Var, w1: &Rat, w2: &Rat) -> Rat {
    match v {
        Var::Z => w1.clone(),
        Var::W => w2.clone(),
    }
}

/// Checks that factor `x`'s unknown region (beyond its windows) cannot
/// contribute to product coefficients inside the requested result windows,
/// given what is known about the partner factor `y`.
fn factor_covered(x: MetaView, y: MetaView, v: Var, w1: &Rat, w2: &Rat) -> bool {
    let Some(own_window) = x.window(v) else {
        return true; // complete in this variable
    };
    if let Some(sup) = x.sup(v) {
        if sup <= own_window {
            return true; // window already reaches the whole support
        }
    }
    let wv = req_window(v, w1, w2);
    let wo = req_window(other(v), w1, w2);
    // Partner floor cuts the reachable exponents directly.
    if let Some(yf) = y.floor(v) {
        if own_window >= &(&wv - yf) {
            return true;
        }
    }
    // Own antidiagonal support plus own floor in the other variable caps
    // this variable's support.
    if let (Some(d), Some(f)) = (x.diag.as_ref(), x.floor(other(v)).as_ref()) {
        if own_window >= &(d - f) {
            return true;
        }
    }
    // Partner antidiagonal support: a partner term at `y_v = diag - y_o`
    // combined with the result cap in the other variable.
    if let (Some(d), Some(f)) = (y.diag.as_ref(), x.floor(other(v)).as_ref()) {
        if own_window >= &(&(&(&wv + &wo) - d) - f) {
            return true;
        }
    }
    false
}

/// Multiplies a scalar series with a coefficient series, producing all
/// coefficients inside the requested windows.
///
/// Errors with [`Error::NonSummable`] when the known parts of the factors
/// are insufficient to determine the requested coefficients — either because
/// a coefficient is a genuinely infinite sum, or because a factor was built
/// with too small a window.
pub fn series_multiply<C: Coeff>(
    a: &Series2<Scalar>,
    b: &Series2<C>,
    w1: &Rat,
    w2: &Rat,
) -> Result<Series2<C>> {
    let exact = a.is_exact() && b.is_exact();
    if !exact {
        let ma = MetaView::of(a);
        let mb = MetaView::of(b);
        for v in [Var::Z, Var::W] {
            if !factor_covered(ma, mb, v, w1, w2) || !factor_covered(mb, ma, v, w1, w2) {
                return Err(Error::NonSummable(format!(
                    "product coefficients up to ({w1}, {w2}) are not determined \
                     by the stored windows"
                )));
            }
        }
    }
    let mut out = if exact {
        Series2::exact()
    } else {
        Series2::with_windows(Some(w1.clone()), Some(w2.clone()))
    };
    out.floor1 = opt_add(&a.floor1, &b.floor1);
    out.floor2 = opt_add(&a.floor2, &b.floor2);
    out.sup1 = opt_add(&a.sup1, &b.sup1);
    out.sup2 = opt_add(&a.sup2, &b.sup2);
    out.diag = opt_add(&a.diag, &b.diag);
    for ((a1, a2), ca) in &a.terms {
        for ((b1, b2), cb) in &b.terms {
            let e1 = a1 + b1;
            let e2 = a2 + b2;
            if !exact && (&e1 > w1 || &e2 > w2) {
                continue;
            }
            let mut c = cb.clone();
            c.scale(ca);
            out.add_term(e1, e2, c);
        }
    }
    Ok(out)
}

/// Substitutes `z1 -> z + w`, `z2 -> w` (expanding `(z+w)^p` in ascending
/// powers of `w`): a term `c z1^p z2^q` becomes
/// `sum_{i>=0} C(p,i) c z^{p-i} w^{q+i}`.
///
/// Requires finite floors on `g`; the result is complete inside the
/// requested windows provided `g.window2 >= w2` and
/// `g.window1 >= w1 + w2 - g.floor2`.
pub fn sum_compose<C: Coeff>(g: &Series2<C>, w1: &Rat, w2: &Rat) -> Result<Series2<C>> {
    let (Some(f1), Some(f2)) = (&g.floor1, &g.floor2) else {
        return Err(Error::NonSummable(
            "composition needs finite floors in both variables".into(),
        ));
    };
    let need1 = &(w1 + w2) - f2;
    let ok1 = g.window1.as_ref().map(|w| w >= &need1).unwrap_or(true);
    let ok2 = g.window2.as_ref().map(|w| w >= w2).unwrap_or(true);
    if !(ok1 && ok2) {
        return Err(Error::NonSummable(format!(
            "composition to windows ({w1}, {w2}) needs source windows \
             ({need1}, {w2})"
        )));
    }
    let mut out = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    out.floor2 = Some(f2.clone());
    out.sup1 = g.sup1.clone();
    out.diag = g.diag.clone();
    let _ = f1;
    for ((p, q), c) in &g.terms {
        // i ranges until w^{q+i} leaves the window; z^{p-i} only decreases.
        let mut i = 0u64;
        loop {
            let e2 = q + &Rat::from_int(i as i64);
            if &e2 > w2 {
                break;
            }
            let e1 = p - &Rat::from_int(i as i64);
            if &e1 <= w1 {
                let mut t = c.clone();
                t.scale(&Scalar::from_rational(general_binomial(p, i)));
                out.add_term(e1, e2, t);
            }
            // Integer nonnegative p: binomials vanish past p.
            if p.is_integer() && !p.is_negative() && Rat::from_int(i as i64) >= *p {
                break;
            }
            i += 1;
        }
    }
    Ok(out)
}

/// Substitutes `z1 -> z + w`, `z2 -> z` (expanding `(z+w)^p` in ascending
/// powers of `w`): a term `c z1^p z2^q` becomes
/// `sum_{i>=0} C(p,i) c z^{p+q-i} w^i`.
///
/// Requires finite floors; completeness inside the requested windows needs
/// `g.window1 >= w1 + w2 - g.floor2` and `g.window2 >= w1 + w2 - g.floor1`.
pub fn ope_compose<C: Coeff>(g: &Series2<C>, w1: &Rat, w2: &Rat) -> Result<Series2<C>> {
    let (Some(f1), Some(f2)) = (&g.floor1, &g.floor2) else {
        return Err(Error::NonSummable(
            "composition needs finite floors in both variables".into(),
        ));
    };
    let need1 = &(w1 + w2) - f2;
    let need2 = &(w1 + w2) - f1;
    let ok1 = g.window1.as_ref().map(|w| w >= &need1).unwrap_or(true);
    let ok2 = g.window2.as_ref().map(|w| w >= &need2).unwrap_or(true);
    if !(ok1 && ok2) {
        return Err(Error::NonSummable(format!(
            "composition to windows ({w1}, {w2}) needs source windows \
             ({need1}, {need2})"
        )));
    }
    let mut out = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    out.floor2 = Some(Rat::zero());
    out.sup1 = opt_add(&g.sup1, &g.sup2);
    out.diag = g.diag.clone();
    for ((p, q), c) in &g.terms {
        let mut i = 0u64;
        loop {
            let e2 = Rat::from_int(i as i64);
            if &e2 > w2 {
                break;
            }
            let e1 = &(p + q) - &e2;
            if &e1 <= w1 {
                let mut t = c.clone();
                t.scale(&Scalar::from_rational(general_binomial(p, i)));
                out.add_term(e1, e2, t);
            }
            if p.is_integer() && !p.is_negative() && Rat::from_int(i as i64) >= *p {
                break;
            }
            i += 1;
        }
    }
    Ok(out)
}

/// Substitutes `z1 -> z - w`, `z2 -> w` (expanding `(z-w)^m` in ascending
/// powers of `w`): a term `c z1^m z2^q` becomes
/// `sum_{k>=0} C(m,k) (-1)^k c z^{m-k} w^{q+k}`.
///
/// Requires a finite floor in the second variable; completeness inside the
/// requested windows needs `g.window1 >= w1 + w2 - g.floor2` and
/// `g.window2 >= w2`.
pub fn diff_compose<C: Coeff>(g: &Series2<C>, w1: &Rat, w2: &Rat) -> Result<Series2<C>> {
    let Some(f2) = &g.floor2 else {
        return Err(Error::NonSummable(
            "composition needs a finite floor in the second variable".into(),
        ));
    };
    let need1 = &(w1 + w2) - f2;
    let ok1 = g.window1.as_ref().map(|w| w >= &need1).unwrap_or(true);
    let ok2 = g.window2.as_ref().map(|w| w >= w2).unwrap_or(true);
    if !(ok1 && ok2) {
        return Err(Error::NonSummable(format!(
            "composition to windows ({w1}, {w2}) needs source windows \
             ({need1}, {w2})"
        )));
    }
    let mut out = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    out.floor2 = Some(f2.clone());
    out.sup1 = g.sup1.clone();
    out.diag = g.diag.clone();
    for ((m, q), c) in &g.terms {
        let mut k = 0u64;
        loop {
            let e2 = q + &Rat::from_int(k as i64);
            if &e2 > w2 {
                break;
            }
            let e1 = m - &Rat::from_int(k as i64);
            if &e1 <= w1 {
                let mut coeff = general_binomial(m, k);
                if k % 2 == 1 {
                    coeff = -coeff;
                }
                let mut t = c.clone();
                t.scale(&Scalar::from_rational(coeff));
                out.add_term(e1, e2, t);
            }
            if m.is_integer() && !m.is_negative() && Rat::from_int(k as i64) >= *m {
                break;
            }
            k += 1;
        }
    }
    Ok(out)
}

/// Recomposes a localized series through the diagonal: the result equals
/// the product of the first-domain expansion of `(z-w)^n` with `g`, computed
/// as `z^n g` read in the variables `(z+w, w)` and re-expanded.
///
/// Both floors of `g` must be finite (a localized series), and its windows
/// must dominate the intermediate recomposition windows; otherwise
/// [`Error::NonSummable`] is returned.
pub fn taylor_shift<C: Coeff>(g: &Series2<C>, n: &Rat, w1: &Rat, w2: &Rat) -> Result<Series2<C>> {
    let Some(f2) = g.floor2.clone() else {
        return Err(Error::NonSummable(
            "recomposition needs a finite floor in the second variable".into(),
        ));
    };
    let ws1 = &(&(w1 + w2) - &f2) - n;
    let h = sum_compose(g, &Rat::max(&ws1, w1), w2)?;
    let shifted = h.shift(Var::Z, n);
    diff_compose(&shifted, w1, w2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn sc(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn poly_z_minus_w() -> Series2<Scalar> {
        binomial_expansion(&r(1), BinomialSign::Minus, Dominant::Z, &r(10), &r(10))
    }

    #[test]
    fn square_root_expansion_leading_terms() {
        let s = binomial_expansion(&q(1, 2), BinomialSign::Minus, Dominant::Z, &r(6), &r(3));
        assert_eq!(s.coefficient(&q(1, 2), &r(0)), sc(1));
        assert_eq!(
            s.coefficient(&q(-1, 2), &r(1)),
            Scalar::from_rational(q(-1, 2))
        );
        assert_eq!(
            s.coefficient(&q(-3, 2), &r(2)),
            Scalar::from_rational(q(-1, 8))
        );
    }

    #[test]
    fn nonnegative_integer_power_is_exact() {
        let s = poly_z_minus_w();
        assert!(s.is_exact());
        assert_eq!(s.coefficient(&r(1), &r(0)), sc(1));
        assert_eq!(s.coefficient(&r(0), &r(1)), sc(-1));
        assert_eq!(s.terms().count(), 2);
    }

    #[test]
    fn opposite_expansion_carries_phase() {
        // (z-w)^{-1} read in the |w| > |z| domain:
        // e^{-i pi} sum_j C(-1,j)(-1)^j z^j w^{-1-j} = -sum_j z^j w^{-1-j}.
        let s = binomial_expansion(&r(-1), BinomialSign::Minus, Dominant::W, &r(3), &r(3));
        assert_eq!(s.coefficient(&r(0), &r(-1)), sc(-1));
        assert_eq!(s.coefficient(&r(1), &r(-2)), sc(-1));
        assert_eq!(s.coefficient(&r(2), &r(-3)), sc(-1));
    }

    #[test]
    fn inverse_law_inside_window() {
        // iota_{z,w}(z-w)^{1/2} * iota_{z,w}(z-w)^{-1/2} = 1.
        let w = r(4);
        let a = binomial_expansion(&q(1, 2), BinomialSign::Minus, Dominant::Z, &w, &w);
        let b = binomial_expansion(&q(-1, 2), BinomialSign::Minus, Dominant::Z, &w, &w);
        let prod = series_multiply(&a, &b, &r(2), &r(2)).unwrap();
        let mut one = Series2::with_windows(Some(r(2)), Some(r(2)));
        one.add_term(r(0), r(0), sc(1));
        assert!(prod.first_difference(&one).is_none());
    }

    #[test]
    fn clashing_expansions_are_rejected() {
        // iota_{z,w}(z-w)^{-1} * iota_{w,z}(z-w)^{-1} has no computable
        // coefficients: every one is an infinite sum.
        let a = binomial_expansion(&r(-1), BinomialSign::Minus, Dominant::Z, &r(8), &r(8));
        let b = binomial_expansion(&r(-1), BinomialSign::Minus, Dominant::W, &r(8), &r(8));
        assert!(matches!(
            series_multiply(&a, &b, &r(0), &r(0)),
            Err(Error::NonSummable(_))
        ));
    }

    #[test]
    fn delta_difference_of_expansions() {
        // (iota_{z,w} - iota_{w,z})(z-w)^{-k-1} = divided k-th derivative of
        // the delta function, checked coefficientwise inside a window.
        for k in 0..4u64 {
            let n = -r(k as i64) - &r(1);
            let w = r(4);
            let a = binomial_expansion(&n, BinomialSign::Minus, Dominant::Z, &w, &w);
            let b = binomial_expansion(&n, BinomialSign::Minus, Dominant::W, &w, &w);
            let d = delta_derivative(&r(0), k, &w, &w);
            let diff = a.sub(&b);
            assert!(
                diff.first_difference(&d).is_none(),
                "mismatch at derivative order {k}"
            );
        }
    }

    #[test]
    fn delta_is_killed_by_z_minus_w() {
        let d = delta_derivative(&r(0), 0, &r(6), &r(6));
        let prod = series_multiply(&poly_z_minus_w(), &d, &r(5), &r(5)).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn higher_delta_killed_by_matching_power() {
        // (z-w)^{k+1} * delta^{(k)} = 0.
        for k in 1..4u64 {
            let d = delta_derivative(&r(0), k, &r(8), &r(8));
            let pow = binomial_expansion(
                &r(k as i64 + 1),
                BinomialSign::Minus,
                Dominant::Z,
                &r(8),
                &r(8),
            );
            let prod = series_multiply(&pow, &d, &r(3), &r(3)).unwrap();
            assert!(prod.is_zero(), "not killed at order {k}");
        }
    }

    #[test]
    fn coset_delta_supported_on_shifted_exponents() {
        let d = delta_derivative(&q(1, 2), 0, &r(3), &r(3));
        for ((e1, e2), _) in d.terms() {
            assert_eq!((e1 + &r(1)).mod_one(), q(1, 2));
            assert_eq!(e2.mod_one(), q(1, 2));
            assert_eq!(&(e1 + e2), &r(-1));
        }
        assert_eq!(d.coefficient(&q(-3, 2), &q(1, 2)), sc(1));
    }

    #[test]
    fn sum_composition_of_polynomial() {
        // z1^2 z2 |-> (z+w)^2 w = z^2 w + 2 z w^2 + w^3.
        let mut g: Series2<Scalar> = Series2::exact();
        g.floor1 = Some(r(0));
        g.floor2 = Some(r(0));
        g.add_term(r(2), r(1), sc(1));
        let h = sum_compose(&g, &r(5), &r(5)).unwrap();
        assert_eq!(h.coefficient(&r(2), &r(1)), sc(1));
        assert_eq!(h.coefficient(&r(1), &r(2)), sc(2));
        assert_eq!(h.coefficient(&r(0), &r(3)), sc(1));
    }

    #[test]
    fn ope_composition_of_polynomial() {
        // z1^2 z2 |-> (z+w)^2 z = z^3 + 2 z^2 w + z w^2.
        let mut g: Series2<Scalar> = Series2::exact();
        g.floor1 = Some(r(0));
        g.floor2 = Some(r(0));
        g.add_term(r(2), r(1), sc(1));
        let h = ope_compose(&g, &r(5), &r(5)).unwrap();
        assert_eq!(h.coefficient(&r(3), &r(0)), sc(1));
        assert_eq!(h.coefficient(&r(2), &r(1)), sc(2));
        assert_eq!(h.coefficient(&r(1), &r(2)), sc(1));
    }

    #[test]
    fn composition_windows_are_guarded() {
        let mut g: Series2<Scalar> = Series2::with_windows(Some(r(2)), Some(r(2)));
        g.floor1 = Some(r(0));
        g.floor2 = Some(r(0));
        g.add_term(r(2), r(1), sc(1));
        assert!(sum_compose(&g, &r(5), &r(5)).is_err());
        assert!(sum_compose(&g, &r(1), &r(1)).is_ok());
    }

    #[test]
    fn diff_composition_of_polynomial() {
        // z1^2 z2 -> (z-w)^2 w = z^2 w - 2 z w^2 + w^3.
        let mut g = Series2::exact();
        g.add_term(r(2), r(1), sc(1));
        g.floor1 = Some(r(0));
        g.floor2 = Some(r(0));
        let out = diff_compose(&g, &r(6), &r(6)).unwrap();
        assert_eq!(out.coefficient(&r(2), &r(1)), sc(1));
        assert_eq!(out.coefficient(&r(1), &r(2)), sc(-2));
        assert_eq!(out.coefficient(&r(0), &r(3)), sc(1));
        assert_eq!(out.terms().count(), 3);
    }

    #[test]
    fn taylor_recomposition_matches_direct_product() {
        // Integer exponent: recomposing (z-w)^2 through the diagonal with
        // n = 1 gives (z-w)^3.
        let g = binomial_expansion(&r(2), BinomialSign::Minus, Dominant::Z, &r(6), &r(6));
        let out = taylor_shift(&g, &r(1), &r(6), &r(6)).unwrap();
        let expected = binomial_expansion(&r(3), BinomialSign::Minus, Dominant::Z, &r(6), &r(6));
        assert_eq!(out.first_difference(&expected), None);

        // Fractional exponent against a localized monomial z^-2 w^-1.
        let mut m = Series2::exact();
        m.add_term(r(-2), r(-1), sc(1));
        m.floor1 = Some(r(-2));
        m.floor2 = Some(r(-1));
        let out = taylor_shift(&m, &q(1, 2), &r(4), &r(4)).unwrap();
        let iota = binomial_expansion(&q(1, 2), BinomialSign::Minus, Dominant::Z, &r(6), &r(5));
        let expected = series_multiply(&iota, &m, &r(4), &r(4)).unwrap();
        assert_eq!(out.first_difference(&expected), None);
        assert_eq!(out.coefficient(&q(-3, 2), &r(-1)), sc(1));
        assert_eq!(
            out.coefficient(&q(-5, 2), &r(0)),
            Scalar::from_rational(q(-1, 2))
        );
    }

    #[test]
    fn one_variable_derivative_and_rotation() {
        let mut s: Series1<Scalar> = Series1::zero();
        s.add_term(q(1, 2), sc(4));
        s.add_term(r(2), sc(3));
        let d = s.derivative();
        assert_eq!(d.coefficient(&q(-1, 2)), Scalar::from_rational(r(2)));
        assert_eq!(d.coefficient(&r(1)), sc(6));
        let rot = s.rotate_half_turn();
        assert_eq!(
            rot.coefficient(&q(1, 2)),
            Scalar::root_of_unity(&q(-1, 2)).mul_rat(&r(4))
        );
        assert_eq!(rot.coefficient(&r(2)), sc(3));
    }
}
