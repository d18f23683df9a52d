//! Vertex operators, their matrix coefficients (modes), and derived
//! quantities: locality order and singular-part coefficients.
//!
//! All series are truncated at a caller-supplied exponent window; every
//! stored coefficient is exact, and every exponent at or below the window
//! carries its complete coefficient.
//!
//! Invariants:
//! * `vertex_op_apply(alg, alpha, c, w)` has exponents in
//!   `(alpha|gamma) + Z`, bounded below by `(alpha|gamma) - depth(c)`;
//! * `field_apply(alg, a, c, w)` has exponents bounded below by
//!   `(alpha|gamma) - depth(a) - depth(c)`;
//! * `mode(alg, a, n, c)` vanishes unless `n + (alpha|gamma)` is an integer.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_traits::ToPrimitive;

use crate::engine::AlgebraInstance;
use crate::error::{Error, Result};
use crate::fock::{heis_act, FockMonomial, FockState};
use crate::lattice::{vec_add, GroupVector, SpaceSpec};
use crate::rat::Rat;
use crate::scalar::general_binomial;
use crate::series::Series1;

fn unit_vector(dim: usize, idx: usize) -> GroupVector {
    let mut v = vec![Rat::zero(); dim];
    v[idx] = Rat::one();
    v
}

/// Product of two monomials: creation multisets merge, charges add.
fn monomial_mul(x: &FockMonomial, y: &FockMonomial) -> FockMonomial {
    let mut creations = Vec::with_capacity(x.creations.len() + y.creations.len());
    let (mut i, mut j) = (0, 0);
    while i < x.creations.len() && j < y.creations.len() {
        if x.creations[i] <= y.creations[j] {
            creations.push(x.creations[i]);
            i += 1;
        } else {
            creations.push(y.creations[j]);
            j += 1;
        }
    }
    creations.extend_from_slice(&x.creations[i..]);
    creations.extend_from_slice(&y.creations[j..]);
    FockMonomial {
        creations,
        charge: vec_add(&x.charge, &y.charge),
    }
}

thread_local! {
    /// Layers of the pure-creation exponential attached to a charge,
    /// grown from the unit monomial and keyed by `(dim, charge)`.  The
    /// modes `h_{-k}` act by multiplication, so layer `m` applied to any
    /// base state is `layer_m * base` monomial by monomial; caching the
    /// layers makes that application linear in the output size.
    static CREATION_LAYERS: RefCell<BTreeMap<(usize, Vec<Rat>), Vec<FockState>>> =
        RefCell::new(BTreeMap::new());
}

/// Runs `f` on the creation-exponential layers `0..=upto` for `alpha`:
/// layer 0 is the unit monomial and `layer_m = (1/m) sum_k h_{-k} layer_{m-k}`.
fn with_creation_layers<R>(
    space: &SpaceSpec,
    alpha: &[Rat],
    upto: usize,
    f: impl FnOnce(&[FockState]) -> R,
) -> R {
    CREATION_LAYERS.with(|cell| {
        let mut map = cell.borrow_mut();
        let layers = map
            .entry((space.dim, alpha.to_vec()))
            .or_insert_with(|| vec![FockState::vacuum(space.dim)]);
        while layers.len() <= upto {
            let m = layers.len();
            let mut acc = FockState::zero();
            for k in 1..=m {
                let touched = heis_act(space, alpha, -(k as i64), &layers[m - k]);
                for (mono, coeff) in touched.terms() {
                    acc.add_term(mono.clone(), coeff.clone());
                }
            }
            layers.push(acc.scaled_rat(&Rat::new(1, m as i64)));
        }
        f(&layers[..=upto])
    })
}

/// Replaces the charge `gamma` of every monomial by `gamma + alpha`.
fn shift_charge(v: &FockState, alpha: &[Rat]) -> FockState {
    let mut out = FockState::zero();
    for (m, c) in v.terms() {
        let shifted = FockMonomial::new(m.creations.clone(), vec_add(&m.charge, alpha));
        out.add_term(shifted, c.clone());
    }
    out
}

fn window_steps(bound: &Rat) -> Option<i64> {
    let f = bound.floor_int();
    f.to_i64()
}

/// Applies the exponential vertex operator attached to the charge `alpha`
/// to the state `c`, keeping exponents `<= window`.
///
/// The operator is the product of a creation exponential, the charge shift
/// `gamma -> gamma + alpha` with leading exponent `(alpha|gamma)`, and an
/// annihilation exponential; a cocycle, when present, contributes the
/// phase `eps(alpha, gamma)`.
pub fn vertex_op_apply(
    alg: &AlgebraInstance,
    alpha: &[Rat],
    c: &FockState,
    window: &Rat,
) -> Result<Series1<FockState>> {
    let space = &alg.lattice.space;
    space.check_vector(alpha)?;
    let mut out = Series1::with_window(window.clone());
    if c.is_zero() {
        out.floor = Some(Rat::zero());
        return Ok(out);
    }
    let gamma = c.degree_of()?;
    let e0 = space.form(alpha, &gamma);
    let depth_c = c.max_depth();
    out.floor = Some(&e0 - &Rat::from_int(depth_c as i64));

    // Annihilation exponential, layer by layer: the coefficient of
    // `z^{-j}` is `t_j` with `t_0 = c` and `t_j = -(1/j) sum_k h_k t_{j-k}`.
    let base = c.scaled(&alg.eps(alpha, &gamma));
    let mut ann_layers: Vec<FockState> = vec![base];
    for j in 1..=depth_c {
        let mut acc = FockState::zero();
        for k in 1..=j {
            let touched = heis_act(space, alpha, k as i64, &ann_layers[(j - k) as usize]);
            acc = acc.add(&touched);
        }
        ann_layers.push(acc.scaled_rat(&Rat::new(-1, j as i64)));
    }

    // Charge shift, then the creation exponential on top of each layer:
    // layer `m` lands at exponent `e0 + m - j`.  The exponential acts by
    // multiplication, so its layers are taken from the shared unit-based
    // table and attached to each annihilation layer monomial by monomial.
    let mut plan: Vec<(usize, i64)> = Vec::new();
    let mut upto: i64 = -1;
    for (j, t) in ann_layers.iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        let bound = &(window - &e0) + &Rat::from_int(j as i64);
        let Some(mmax) = window_steps(&bound) else {
            continue;
        };
        if mmax < 0 {
            continue;
        }
        plan.push((j, mmax));
        upto = upto.max(mmax);
    }
    if upto >= 0 {
        let mut acc: BTreeMap<Rat, FockState> = BTreeMap::new();
        with_creation_layers(space, alpha, upto as usize, |uni| {
            for (j, mmax) in plan {
                let shifted = shift_charge(&ann_layers[j], alpha);
                for (m, layer) in uni.iter().enumerate().take(mmax as usize + 1) {
                    let e = &(&e0 + &Rat::from_int(m as i64)) - &Rat::from_int(j as i64);
                    let slot = acc.entry(e).or_default();
                    for (um, uc) in layer.terms() {
                        for (bm, bc) in shifted.terms() {
                            slot.add_term(monomial_mul(um, bm), uc * bc);
                        }
                    }
                }
            }
        });
        for (e, state) in acc {
            out.add_term(e, state);
        }
    }
    Ok(out)
}

/// Applies the current attached to the ambient vector `h` to `c`:
/// the sum over integers `n` of `h_n c z^{-n-1}`, keeping exponents
/// `<= window`.  `c` need not be homogeneous.
pub fn current_apply(
    alg: &AlgebraInstance,
    h: &[Rat],
    c: &FockState,
    window: &Rat,
) -> Result<Series1<FockState>> {
    let space = &alg.lattice.space;
    space.check_vector(h)?;
    let mut out = Series1::with_window(window.clone());
    if c.is_zero() {
        out.floor = Some(Rat::zero());
        return Ok(out);
    }
    let depth_c = c.max_depth() as i64;
    out.floor = Some(Rat::from_int(-depth_c - 1));
    // Exponent -n-1 <= window forces n >= -window - 1; modes above the
    // total depth annihilate everything.
    let n_min = (-&(window + &Rat::one()))
        .ceil_int()
        .to_i64()
        .ok_or_else(|| Error::InvalidSpec("window bound does not fit a machine integer".into()))?;
    for n in n_min..=depth_c {
        let v = heis_act(space, h, n, c);
        out.add_term(Rat::from_int(-n - 1), v);
    }
    Ok(out)
}

/// Memo table for operator application: one entry per distinct
/// `(operator charge, remaining factors, window, target)` tuple, nested so
/// lookups borrow the caller's values.  Deep operator states reach the same
/// tuple along many interleavings of their factors, so caching turns an
/// exponential recursion tree into one evaluation per distinct subproblem.
/// A table may be shared across several operator applications against the
/// same algebra — the key carries everything else the result depends on —
/// which lets identity checks reuse work between the terms of a mode sum.
pub struct FieldMemo {
    by_charge: BTreeMap<
        GroupVector,
        BTreeMap<Vec<(usize, u64)>, BTreeMap<Rat, BTreeMap<FockState, Rc<Series1<FockState>>>>>,
    >,
}

impl FieldMemo {
    pub fn new() -> FieldMemo {
        FieldMemo {
            by_charge: BTreeMap::new(),
        }
    }
}

impl Default for FieldMemo {
    fn default() -> FieldMemo {
        FieldMemo::new()
    }
}

fn apply_factors(
    alg: &AlgebraInstance,
    factors: &[(usize, u64)],
    charge: &GroupVector,
    c: &FockState,
    window: &Rat,
    memo: &mut FieldMemo,
) -> Result<Rc<Series1<FockState>>> {
    if let Some(hit) = memo
        .by_charge
        .get(charge.as_slice())
        .and_then(|by_factors| by_factors.get(factors))
        .and_then(|by_window| by_window.get(window))
        .and_then(|by_target| by_target.get(c))
    {
        return Ok(Rc::clone(hit));
    }
    let out = Rc::new(if factors.is_empty() {
        vertex_op_apply(alg, charge, c, window)?
    } else {
        apply_leading_factor(alg, factors, charge, c, window, memo)?
    });
    memo.by_charge
        .entry(charge.clone())
        .or_default()
        .entry(factors.to_vec())
        .or_default()
        .entry(window.clone())
        .or_default()
        .insert(c.clone(), Rc::clone(&out));
    Ok(out)
}

fn apply_leading_factor(
    alg: &AlgebraInstance,
    factors: &[(usize, u64)],
    charge: &GroupVector,
    c: &FockState,
    window: &Rat,
    memo: &mut FieldMemo,
) -> Result<Series1<FockState>> {
    let space = &alg.lattice.space;
    let (idx, level) = factors[0];
    let rest = &factors[1..];
    let r = level - 1;
    let h = unit_vector(space.dim, idx);
    let depth_c = c.max_depth();

    // The annihilation mode m = 0 scales every monomial by the charge
    // pairing — heis_act never changes charges, so the target carries the
    // single charge fixed by the original state — and shifts the exponent
    // by -1-r, so it reads the inner series up to window + r + 1.  When the
    // pairing vanishes only the creation half remains, which consumes
    // exponents q <= window (its shifts t-1-r are nonnegative).
    let lambda = match c.terms().next() {
        Some((mono0, _)) => space.form(&h, &mono0.charge),
        None => Rat::zero(),
    };
    let base_window = if lambda.is_zero() {
        window.clone()
    } else {
        window + &Rat::from_int((r + 1) as i64)
    };
    let inner = apply_factors(alg, rest, charge, c, &base_window, memo)?;
    let mut acc: BTreeMap<Rat, FockState> = BTreeMap::new();
    // Creation half: modes h_{-t} multiply the inner series from the left,
    // contributing C(t-1, r) at exponent shift t-1-r; the mode is a plain
    // creation factor, so it lands monomial by monomial.
    for (q, s) in inner.terms() {
        let bound = &(window - q) + &Rat::from_int(1 + r as i64);
        let Some(tmax) = window_steps(&bound) else {
            continue;
        };
        for t in (r as i64 + 1)..=tmax {
            let coeff = general_binomial(&Rat::from_int(t - 1), r);
            if coeff.is_zero() {
                continue;
            }
            let e = q + &Rat::from_int(t - 1 - r as i64);
            let slot = acc.entry(e).or_default();
            for (mono, sc) in s.terms() {
                slot.add_term(mono.with_creation(idx, t as u64), sc.mul_rat(&coeff));
            }
        }
    }
    // Annihilation half: modes h_m for m >= 0 reach the target state first,
    // contributing C(-m-1, r) at exponent shift -m-1-r.  The mode m = 0
    // reuses `inner`; each deeper mode strips one creation level and
    // recurses at a window just wide enough for its shift.
    if !lambda.is_zero() {
        let scale0 = &lambda * &general_binomial(&Rat::from_int(-1), r);
        for (q, s) in inner.terms() {
            let e = q - &Rat::from_int((1 + r) as i64);
            let slot = acc.entry(e).or_default();
            for (mono, sc) in s.terms() {
                slot.add_term(mono.clone(), sc.mul_rat(&scale0));
            }
        }
    }
    for m in 1..=depth_c {
        let touched = heis_act(space, &h, m as i64, c);
        if touched.is_zero() {
            continue;
        }
        let coeff = general_binomial(&Rat::from_int(-(m as i64) - 1), r);
        if coeff.is_zero() {
            continue;
        }
        let window_m = window + &Rat::from_int((m + 1 + r) as i64);
        let inner_m = apply_factors(alg, rest, charge, &touched, &window_m, memo)?;
        for (q, s) in inner_m.terms() {
            let e = q - &Rat::from_int((m + 1 + r) as i64);
            if &e > window {
                continue;
            }
            let slot = acc.entry(e).or_default();
            for (mono, sc) in s.terms() {
                slot.add_term(mono.clone(), sc.mul_rat(&coeff));
            }
        }
    }
    let mut out = Series1::with_window(window.clone());
    for (e, state) in acc {
        out.add_term(e, state);
    }
    Ok(out)
}

/// Applies the vertex operator of the homogeneous state `a` to the
/// homogeneous state `c`, keeping exponents `<= window`.
pub fn field_apply(
    alg: &AlgebraInstance,
    a: &FockState,
    c: &FockState,
    window: &Rat,
) -> Result<Series1<FockState>> {
    field_apply_memo(alg, a, c, window, &mut FieldMemo::new())
}

/// Like [`field_apply`], but records subproblems in `memo` so repeated
/// applications against the same algebra can share work.
pub fn field_apply_memo(
    alg: &AlgebraInstance,
    a: &FockState,
    c: &FockState,
    window: &Rat,
    memo: &mut FieldMemo,
) -> Result<Series1<FockState>> {
    let mut out = Series1::with_window(window.clone());
    if a.is_zero() || c.is_zero() {
        out.floor = Some(Rat::zero());
        return Ok(out);
    }
    let alpha = a.degree_of()?;
    let gamma = c.degree_of()?;
    let floor = &alg.form(&alpha, &gamma)
        - &Rat::from_int((a.max_depth() + c.max_depth()) as i64);
    // All monomials of `a` share a charge (checked just above), and their
    // partition tails coincide heavily, so the whole loop feeds one table.
    for (mono, coeff) in a.terms() {
        let part = apply_factors(alg, &mono.creations, &alpha, c, window, memo)?;
        for (e, state) in part.terms() {
            out.add_term(e.clone(), state.scaled(coeff));
        }
    }
    out.floor = Some(floor);
    Ok(out)
}

/// The coefficient of `z^{-n-1}` in `field_apply(alg, a, c)`; zero when
/// `n + (alpha|gamma)` is not an integer.
pub fn mode(alg: &AlgebraInstance, a: &FockState, n: &Rat, c: &FockState) -> Result<FockState> {
    mode_memo(alg, a, n, c, &mut FieldMemo::new())
}

/// Like [`mode`], but records subproblems in `memo`; identity checks that
/// evaluate many related mode products pass one table through every call.
pub fn mode_memo(
    alg: &AlgebraInstance,
    a: &FockState,
    n: &Rat,
    c: &FockState,
    memo: &mut FieldMemo,
) -> Result<FockState> {
    if a.is_zero() || c.is_zero() {
        return Ok(FockState::zero());
    }
    let alpha = a.degree_of()?;
    let gamma = c.degree_of()?;
    if !(n + &alg.form(&alpha, &gamma)).is_integer() {
        return Ok(FockState::zero());
    }
    let target = -&(n + &Rat::one());
    let series = field_apply_memo(alg, a, c, &target, memo)?;
    Ok(series.coefficient(&target))
}

/// The largest mode index with a chance of acting nonzero:
/// `depth(a) + depth(c) - (alpha|gamma) - 1`.
pub fn mode_ceiling(alg: &AlgebraInstance, a: &FockState, c: &FockState) -> Result<Rat> {
    let alpha = a.degree_of()?;
    let gamma = c.degree_of()?;
    let depths = Rat::from_int((a.max_depth() + c.max_depth()) as i64);
    Ok(&(&depths - &alg.form(&alpha, &gamma)) - &Rat::one())
}

/// The order of the pole needed to regularize the pair `(a, b)`: the
/// negative of the lowest exponent appearing in `field_apply(alg, a, b)`.
pub fn locality_order(alg: &AlgebraInstance, a: &FockState, b: &FockState) -> Result<Rat> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroState(
            "the locality order of the zero state is undefined".into(),
        ));
    }
    let alpha = a.degree_of()?;
    let beta = b.degree_of()?;
    // The top coefficient at exponent (alpha|beta) never cancels, so this
    // window always captures the lowest exponent; widen defensively anyway.
    let mut window = alg.form(&alpha, &beta);
    let spread = a.max_depth() + b.max_depth() + 1;
    for _ in 0..=spread {
        let series = field_apply(alg, a, b, &window)?;
        if let Some(e) = series.lowest_exponent() {
            return Ok(-e);
        }
        window = &window + &Rat::one();
    }
    Err(Error::PrecisionTooSmall(
        "no nonzero coefficient found below the expected bound".into(),
    ))
}

/// The coefficient of `z^{k - N}` in `field_apply(alg, a, b)`, where `N`
/// is the locality order of the pair: the `k`-th singular-part entry.
pub fn ope_coefficient(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    k: u64,
) -> Result<FockState> {
    let order = locality_order(alg, a, b)?;
    let target = &Rat::from_int(k as i64) - &order;
    let series = field_apply(alg, a, b, &target)?;
    Ok(series.coefficient(&target))
}
