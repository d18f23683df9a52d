//! The state space: polynomials in creation generators applied to charge
//! symbols, with exact cyclotomic coefficients.
//!
//! A monomial is a sorted multiset of creation factors `(i, n)` — the
//! coordinate direction `i` at level `-n`, `n >= 1` — together with a charge
//! vector labelling the group-algebra symbol.  States are sparse linear
//! combinations of monomials.  Charges are arbitrary rational vectors: the
//! whole ambient space is available lazily, and any particular computation
//! only ever touches finitely many charges.
//!
//! Invariants:
//! - creation lists are sorted (by index, then depth) and all depths are
//!   positive, so equality of monomials is structural;
//! - states never store zero coefficients;
//! - all operators here are exactly linear and preserve these invariants.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{vec_render, GroupVector, SpaceSpec};
use crate::rat::Rat;
use crate::scalar::Scalar;
use crate::series::Coeff;

/// A product of creation factors applied to `e^{charge}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FockMonomial {
    /// Sorted multiset of `(coordinate index, depth)` pairs.
    pub creations: Vec<(usize, u64)>,
    pub charge: GroupVector,
}

impl FockMonomial {
    pub fn new(mut creations: Vec<(usize, u64)>, charge: GroupVector) -> Self {
        debug_assert!(creations.iter().all(|&(_, n)| n >= 1));
        creations.sort_unstable();
        FockMonomial { creations, charge }
    }

    /// The bare symbol `e^{charge}`.
    pub fn charge_only(charge: GroupVector) -> Self {
        FockMonomial {
            creations: Vec::new(),
            charge,
        }
    }

    /// Total creation depth (sum of levels).
    pub fn depth(&self) -> u64 {
        self.creations.iter().map(|&(_, n)| n).sum()
    }

    /// Adds one creation factor, keeping the list sorted.
    pub fn with_creation(&self, idx: usize, depth: u64) -> Self {
        debug_assert!(depth >= 1);
        let mut creations = self.creations.clone();
        let pos = creations.partition_point(|&f| f <= (idx, depth));
        creations.insert(pos, (idx, depth));
        FockMonomial {
            creations,
            charge: self.charge.clone(),
        }
    }

    fn render(&self, space: &SpaceSpec) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.creations.len() {
            let (idx, n) = self.creations[i];
            let mut count = 1;
            while i + count < self.creations.len() && self.creations[i + count] == (idx, n) {
                count += 1;
            }
            let name = &space.names[idx];
            if count == 1 {
                parts.push(format!("{name}[-{n}]"));
            } else {
                parts.push(format!("{name}[-{n}]^{count}"));
            }
            i += count;
        }
        parts.push(format!("e({})", vec_render(&self.charge)));
        parts.join(" ")
    }
}

/// A finite linear combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct FockState {
    terms: BTreeMap<FockMonomial, Scalar>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState::default()
    }

    /// The vacuum `1 ⊗ e^0` in the given dimension.
    pub fn vacuum(dim: usize) -> Self {
        FockState::from_monomial(FockMonomial::charge_only(vec![Rat::zero(); dim]), Scalar::one())
    }

    /// The pure charge symbol `1 ⊗ e^{charge}`.
    pub fn charge_state(charge: GroupVector) -> Self {
        FockState::from_monomial(FockMonomial::charge_only(charge), Scalar::one())
    }

    pub fn from_monomial(m: FockMonomial, c: Scalar) -> Self {
        let mut s = FockState::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, m: FockMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                *old += &c;
                if old.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scaled(&self, s: &Scalar) -> FockState {
        let mut out = self.clone();
        Coeff::scale(&mut out, s);
        out
    }

    pub fn scaled_rat(&self, r: &Rat) -> FockState {
        self.scaled(&Scalar::from_rational(r.clone()))
    }

    /// Largest total creation depth over the support (zero for `0`).
    pub fn max_depth(&self) -> u64 {
        self.terms.keys().map(FockMonomial::depth).max().unwrap_or(0)
    }

    /// The common charge of all monomials.
    pub fn degree_of(&self) -> Result<GroupVector> {
        let mut charges: Vec<&GroupVector> = Vec::new();
        for m in self.terms.keys() {
            if !charges.contains(&&m.charge) {
                charges.push(&m.charge);
            }
        }
        match charges.len() {
            0 => Err(Error::ZeroState(
                "the zero state carries no degree".into(),
            )),
            1 => Ok(charges[0].clone()),
            _ => Err(Error::NotHomogeneous(format!(
                "state mixes charges {}",
                charges
                    .iter()
                    .map(|c| format!("({})", vec_render(c)))
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
        }
    }

    /// Renders with canonical monomial ordering, e.g.
    /// `a[-1]^2 b[-3] e(1,0) + 1*u(1/2) * e(0,1)`.
    pub fn render(&self, space: &SpaceSpec) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mono = m.render(space);
            if c.is_one() {
                parts.push(mono);
            } else if c.terms().count() > 1 {
                parts.push(format!("({c}) * {mono}"));
            } else {
                parts.push(format!("{c} * {mono}"));
            }
        }
        parts.join(" + ")
    }
}

impl Coeff for FockState {
    fn zero() -> Self {
        FockState::zero()
    }
    fn is_zero(&self) -> bool {
        FockState::is_zero(self)
    }
    fn add_ref(&mut self, rhs: &Self) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn scale(&mut self, s: &Scalar) {
        if s.is_zero() {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            *c = &*c * s;
        }
        self.terms.retain(|_, c| !c.is_zero());
    }
}

/// `(h | e_i)`: the form paired against a coordinate direction.
fn pair_axis(space: &SpaceSpec, h: &[Rat], i: usize) -> Rat {
    let mut acc = Rat::zero();
    for (j, hj) in h.iter().enumerate() {
        if !hj.is_zero() {
            acc += &(hj * &space.gram[j][i]);
        }
    }
    acc
}

/// The level-`n` current generator of direction `h`: creation for `n < 0`,
/// the charge pairing for `n = 0`, annihilation by the commutation rule for
/// `n > 0`.
pub fn heis_act(space: &SpaceSpec, h: &[Rat], n: i64, v: &FockState) -> FockState {
    let mut out = FockState::zero();
    if n < 0 {
        let depth = (-n) as u64;
        for (m, c) in v.terms() {
            for (i, hi) in h.iter().enumerate() {
                if !hi.is_zero() {
                    out.add_term(m.with_creation(i, depth), c.mul_rat(hi));
                }
            }
        }
    } else if n == 0 {
        for (m, c) in v.terms() {
            let p = space.form(h, &m.charge);
            out.add_term(m.clone(), c.mul_rat(&p));
        }
    } else {
        let depth = n as u64;
        for (m, c) in v.terms() {
            let mut i = 0;
            while i < m.creations.len() {
                let (idx, d) = m.creations[i];
                let mut count = 1;
                while i + count < m.creations.len() && m.creations[i + count] == (idx, d) {
                    count += 1;
                }
                if d == depth {
                    let pairing = pair_axis(space, h, idx);
                    let factor =
                        &Rat::from_int(count as i64) * &(&Rat::from_int(n) * &pairing);
                    if !factor.is_zero() {
                        let mut creations = m.creations.clone();
                        creations.remove(i);
                        out.add_term(
                            FockMonomial {
                                creations,
                                charge: m.charge.clone(),
                            },
                            c.mul_rat(&factor),
                        );
                    }
                }
                i += count;
            }
        }
    }
    out
}

/// The translation generator: a derivation sending a level-`n` creation
/// factor to `n` times the level-`n-1` factor and the bare symbol
/// `e^{charge}` to the level-one current of its own charge.
pub fn translation_apply(v: &FockState) -> FockState {
    let mut out = FockState::zero();
    for (m, c) in v.terms() {
        // Raise each creation factor in turn.
        let mut i = 0;
        while i < m.creations.len() {
            let (idx, d) = m.creations[i];
            let mut count = 1;
            while i + count < m.creations.len() && m.creations[i + count] == (idx, d) {
                count += 1;
            }
            let mut creations = m.creations.clone();
            creations.remove(i);
            let raised = FockMonomial {
                creations,
                charge: m.charge.clone(),
            }
            .with_creation(idx, d + 1);
            let factor = Rat::from_int(count as i64) * Rat::from_int(d as i64);
            out.add_term(raised, c.mul_rat(&factor));
            i += count;
        }
        // Act on the charge symbol.
        for (j, gj) in m.charge.iter().enumerate() {
            if !gj.is_zero() {
                out.add_term(m.with_creation(j, 1), c.mul_rat(gj));
            }
        }
    }
    out
}

impl fmt::Display for FockMonomial {
    /// Debug-style rendering with numeric direction indices; prefer
    /// [`FockMonomial::render`]-based output through a [`SpaceSpec`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(i, n) in &self.creations {
            write!(f, "x{i}[-{n}] ")?;
        }
        write!(f, "e({})", vec_render(&self.charge))
    }
}
