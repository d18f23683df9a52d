//! Structural identity checks: locality, the two-variable commutator
//! identity with its delta-function corrections, the mode-product identity,
//! skew symmetry, translation covariance, and composition of operators.
//!
//! Every checker compares two exactly computed truncations coefficient by
//! coefficient and returns a [`CheckReport`]; a violation carries the first
//! offending exponents and the rendered nonzero difference.
//!
//! Window bookkeeping: intermediate series are computed on enlarged windows
//! chosen so that every requested output coefficient is a finite, fully
//! determined sum.  The products `a(z)b(w)c` and `b(w)a(z)c` have one
//! unbounded exponent direction each, so the binomial factors are always
//! expanded in the matching domain.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::engine::fields::{
    field_apply, field_apply_memo, locality_order, mode_ceiling, mode_memo, FieldMemo,
};
use crate::engine::AlgebraInstance;
use crate::error::{Error, Result};
use crate::fock::{translation_apply, FockState};
use crate::rat::{coset_range, Rat};
use crate::report::CheckReport;
use crate::scalar::{general_binomial, Scalar};
use crate::series::{
    binomial_expansion, delta_derivative, series_multiply, sum_compose, BinomialSign, Dominant,
    Series1, Series2, Var,
};

/// The iterated application `Y(a, z) Y(b, w) c`, truncated at the given
/// windows.  The `w`-exponents are bounded below by
/// `(beta|gamma) - depth(b) - depth(c)`; the `z`-exponents of the full
/// series are unbounded below, as recorded in the metadata.
///
/// Both operands of each application must be homogeneous and nonzero.
pub fn double_field_zw(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    w1: &Rat,
    w2: &Rat,
) -> Result<Series2<FockState>> {
    let outer = field_apply(alg, b, c, w2)?;
    let mut out = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    let mut memo = FieldMemo::new();
    for (q, s) in outer.terms() {
        let inner = field_apply_memo(alg, a, s, w1, &mut memo)?;
        for (p, t) in inner.terms() {
            out.add_term(p.clone(), q.clone(), t.clone());
        }
    }
    out.floor1 = None;
    out.floor2 = outer.floor.clone();
    Ok(out)
}

/// The iterated application `Y(b, w) Y(a, z) c`, truncated at the given
/// windows; the mirror image of [`double_field_zw`].
pub fn double_field_wz(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    w1: &Rat,
    w2: &Rat,
) -> Result<Series2<FockState>> {
    let outer = field_apply(alg, a, c, w1)?;
    let mut out = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    let mut memo = FieldMemo::new();
    for (p, s) in outer.terms() {
        let inner = field_apply_memo(alg, b, s, w2, &mut memo)?;
        for (q, t) in inner.terms() {
            out.add_term(p.clone(), q.clone(), t.clone());
        }
    }
    out.floor1 = outer.floor.clone();
    out.floor2 = None;
    Ok(out)
}

fn compare2(
    alg: &AlgebraInstance,
    lhs: &Series2<FockState>,
    rhs: &Series2<FockState>,
) -> CheckReport {
    let keys: BTreeSet<(Rat, Rat)> = lhs
        .terms()
        .map(|(k, _)| k.clone())
        .chain(rhs.terms().map(|(k, _)| k.clone()))
        .collect();
    let mut checked = 0usize;
    for (e1, e2) in &keys {
        checked += 1;
        let diff = lhs.coefficient(e1, e2).sub(&rhs.coefficient(e1, e2));
        if !diff.is_zero() {
            return CheckReport::violated(
                vec![e1.clone(), e2.clone()],
                diff.render(&alg.lattice.space),
                checked,
            );
        }
    }
    CheckReport::holds(checked)
}

fn compare1(
    alg: &AlgebraInstance,
    lhs: &Series1<FockState>,
    rhs: &Series1<FockState>,
) -> CheckReport {
    let keys: BTreeSet<Rat> = lhs
        .terms()
        .map(|(k, _)| k.clone())
        .chain(rhs.terms().map(|(k, _)| k.clone()))
        .collect();
    let mut checked = 0usize;
    for e in &keys {
        checked += 1;
        let diff = lhs.coefficient(e).sub(&rhs.coefficient(e));
        if !diff.is_zero() {
            return CheckReport::violated(
                vec![e.clone()],
                diff.render(&alg.lattice.space),
                checked,
            );
        }
    }
    CheckReport::holds(checked)
}

struct Degrees {
    alpha: Vec<Rat>,
    beta: Vec<Rat>,
    gamma: Vec<Rat>,
}

fn triple_degrees(a: &FockState, b: &FockState, c: &FockState) -> Result<Degrees> {
    Ok(Degrees {
        alpha: a.degree_of()?,
        beta: b.degree_of()?,
        gamma: c.degree_of()?,
    })
}

/// Both sides of the locality comparison at exponent `n`: the two iterated
/// products, each multiplied by the matching expansion of `(z-w)^n`, the
/// second scaled by the commutation factor.
pub fn locality_sides(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    n: &Rat,
    w1: &Rat,
    w2: &Rat,
) -> Result<(Series2<FockState>, Series2<FockState>)> {
    let deg = triple_degrees(a, b, c)?;
    if !(n + &alg.form(&deg.alpha, &deg.beta)).is_integer() {
        return Err(Error::CosetMismatch(format!(
            "exponent {n} does not lie in the coset prescribed by the degrees"
        )));
    }
    let da = Rat::from_int(a.max_depth() as i64);
    let db = Rat::from_int(b.max_depth() as i64);
    let dc = Rat::from_int(c.max_depth() as i64);

    // z-dominant side: w-exponents are floored, so (z-w)^n is expanded in
    // ascending powers of w and the z-window of the product is enlarged to
    // cover the descending tail.
    let f2 = &alg.form(&deg.beta, &deg.gamma) - &(&db + &dc);
    let w1t = Rat::max(w1, &(&(&(w1 + w2) - n) - &f2));
    let t1 = double_field_zw(alg, a, b, c, &w1t, w2)?;
    let i1 = binomial_expansion(n, BinomialSign::Minus, Dominant::Z, w1, &(w2 - &f2));
    let p1 = series_multiply(&i1, &t1, w1, w2)?;

    // w-dominant side, mirrored.
    let f1 = &alg.form(&deg.alpha, &deg.gamma) - &(&da + &dc);
    let w2t = Rat::max(w2, &(&(&(w1 + w2) - n) - &f1));
    let t2 = double_field_wz(alg, a, b, c, w1, &w2t)?;
    let i2 = binomial_expansion(n, BinomialSign::Minus, Dominant::W, &(w1 - &f1), w2);
    let mut p2 = series_multiply(&i2, &t2, w1, w2)?;
    p2.scale(&alg.eta(&deg.alpha, &deg.beta));
    Ok((p1, p2))
}

/// Checks that `(z-w)^n` clears the singularities of the pair `(a, b)`
/// acting on `c`: both iterated products, so multiplied, must agree (the
/// second weighted by the commutation factor).  Holds whenever `n` is at
/// least the locality order of the pair.
pub fn check_locality(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    n: &Rat,
    w1: &Rat,
    w2: &Rat,
) -> Result<CheckReport> {
    let (p1, p2) = locality_sides(alg, a, b, c, n, w1, w2)?;
    Ok(compare2(alg, &p1, &p2))
}

/// Both sides of the two-variable commutator identity at exponent `n`: the
/// difference of the two weighted iterated products on the left, and the sum
/// over `j >= 0` of `Y(a_(n+j) b, w) c` against the `j`-th divided derivative
/// of the coset delta function on the right.
pub fn jacobi_sides(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    n: &Rat,
    w1: &Rat,
    w2: &Rat,
) -> Result<(Series2<FockState>, Series2<FockState>)> {
    let (p1, p2) = locality_sides(alg, a, b, c, n, w1, w2)?;
    let lhs = p1.sub(&p2);

    let deg = triple_degrees(a, b, c)?;
    let d_rep = alg.delta(&deg.alpha, &deg.gamma);
    let nmax_ab = mode_ceiling(alg, a, b)?;
    let mut rhs = Series2::with_windows(Some(w1.clone()), Some(w2.clone()));
    let mut memo = FieldMemo::new();
    let mut j = 0u64;
    loop {
        let nj = n + &Rat::from_int(j as i64);
        if nj > nmax_ab {
            break;
        }
        let u = mode_memo(alg, a, &nj, b, &mut memo)?;
        if !u.is_zero() {
            let win = &(&(w1 + w2) + &Rat::one()) + &Rat::from_int(j as i64);
            let s = field_apply_memo(alg, &u, c, &win, &mut memo)?;
            let fs = s
                .floor
                .clone()
                .expect("field application records its exponent floor");
            let emb = s.embed(Var::W);
            let dd = delta_derivative(&d_rep, j, w1, &(w2 - &fs));
            let term = series_multiply(&dd, &emb, w1, w2)?;
            rhs = rhs.add(&term);
        }
        j += 1;
    }
    Ok((lhs, rhs))
}

/// Checks the two-variable commutator identity at exponent `n`: the
/// difference of the two weighted iterated products equals the sum over
/// `j >= 0` of `Y(a_(n+j) b, w) c` against the `j`-th divided derivative
/// of the coset delta function.
pub fn check_jacobi_window(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    n: &Rat,
    w1: &Rat,
    w2: &Rat,
) -> Result<CheckReport> {
    let (lhs, rhs) = jacobi_sides(alg, a, b, c, n, w1, w2)?;
    Ok(compare2(alg, &lhs, &rhs))
}

fn coset_check(label: &str, idx: &Rat, pairing: &Rat) -> Result<()> {
    if !(idx + pairing).is_integer() {
        return Err(Error::CosetMismatch(format!(
            "index {idx} for {label} does not lie in the coset prescribed by the degrees"
        )));
    }
    Ok(())
}

fn floor_i64(x: &Rat) -> i64 {
    x.floor_int().to_i64().expect("bound fits a machine integer")
}

/// Both sides of the mode-product identity at indices `(m, n, k)`: the
/// alternating sum of iterated modes on the left and the sum of composed
/// modes on the right.  All sums are finite; the truncation bounds come
/// from the largest mode index that can act nonzero on each pair.
pub fn borcherds_sides(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    m: &Rat,
    n: &Rat,
    k: &Rat,
) -> Result<(FockState, FockState)> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Ok((FockState::zero(), FockState::zero()));
    }
    let deg = triple_degrees(a, b, c)?;
    coset_check("the first operand against the target", m, &alg.form(&deg.alpha, &deg.gamma))?;
    coset_check("the operand pair", n, &alg.form(&deg.alpha, &deg.beta))?;
    coset_check("the second operand against the target", k, &alg.form(&deg.beta, &deg.gamma))?;

    let nmax_bc = mode_ceiling(alg, b, c)?;
    let nmax_ac = mode_ceiling(alg, a, c)?;
    let nmax_ab = mode_ceiling(alg, a, b)?;
    let phase = &alg.eta(&deg.alpha, &deg.beta) * &Scalar::root_of_unity(n);

    // One memo across every mode product below: the composed-mode side in
    // particular evaluates a family of deep operators whose factor tails
    // and windows collide heavily from one summand to the next.
    let mut memo = FieldMemo::new();

    let mut lhs = FockState::zero();
    let jmax1 = floor_i64(&(&nmax_bc - k));
    let jmax2 = floor_i64(&(&nmax_ac - m));
    for j in 0..=jmax1.max(jmax2).max(-1) {
        let mut cj = general_binomial(n, j as u64);
        if j % 2 == 1 {
            cj = -cj;
        }
        if cj.is_zero() {
            continue;
        }
        let jr = Rat::from_int(j);
        if j <= jmax1 {
            let inner = mode_memo(alg, b, &(k + &jr), c, &mut memo)?;
            let outer = mode_memo(alg, a, &(&(m + n) - &jr), &inner, &mut memo)?;
            lhs = lhs.add(&outer.scaled_rat(&cj));
        }
        if j <= jmax2 {
            let inner = mode_memo(alg, a, &(m + &jr), c, &mut memo)?;
            let outer = mode_memo(alg, b, &(&(n + k) - &jr), &inner, &mut memo)?;
            lhs = lhs.sub(&outer.scaled_rat(&cj).scaled(&phase));
        }
    }

    let mut rhs = FockState::zero();
    let jmax3 = floor_i64(&(&nmax_ab - n));
    for j in 0..=jmax3.max(-1) {
        let cj = general_binomial(m, j as u64);
        if cj.is_zero() {
            continue;
        }
        let jr = Rat::from_int(j);
        let u = mode_memo(alg, a, &(n + &jr), b, &mut memo)?;
        if u.is_zero() {
            continue;
        }
        let outer = mode_memo(alg, &u, &(&(m + k) - &jr), c, &mut memo)?;
        rhs = rhs.add(&outer.scaled_rat(&cj));
    }

    Ok((lhs, rhs))
}

/// Checks the mode-product identity at integer offsets of the indices
/// `(m, n, k)`: the alternating sum of iterated modes on the left equals
/// the sum of composed modes on the right.
pub fn check_borcherds(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    m: &Rat,
    n: &Rat,
    k: &Rat,
) -> Result<CheckReport> {
    let (lhs, rhs) = borcherds_sides(alg, a, b, c, m, n, k)?;
    let diff = lhs.sub(&rhs);
    if diff.is_zero() {
        Ok(CheckReport::holds(1))
    } else {
        Ok(CheckReport::violated(
            vec![m.clone(), n.clone(), k.clone()],
            diff.render(&alg.lattice.space),
            1,
        ))
    }
}

/// The exponential of the translation operator applied to a series:
/// each coefficient spreads upward as `sum_i T^i c / i!` at `e + i`.
fn exp_translation(s: &Series1<FockState>, window: &Rat) -> Series1<FockState> {
    let mut out = Series1::with_window(window.clone());
    out.floor = s.floor.clone();
    for (q, st) in s.terms() {
        let mut cur = st.clone();
        let mut i: i64 = 0;
        loop {
            let e = q + &Rat::from_int(i);
            if &e > window || cur.is_zero() {
                break;
            }
            out.add_term(e, cur.clone());
            i += 1;
            cur = translation_apply(&cur).scaled_rat(&Rat::new(1, i));
        }
    }
    out
}

/// Checks skew symmetry of the pair `(a, b)`: applying `a` to `b` must
/// equal the commutation factor times the translation exponential of the
/// half-turn-rotated application of `b` to `a`.
pub fn check_skew_symmetry(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    window: &Rat,
) -> Result<CheckReport> {
    if a.is_zero() || b.is_zero() {
        return Ok(CheckReport::holds(1));
    }
    let alpha = a.degree_of()?;
    let beta = b.degree_of()?;
    let lhs = field_apply(alg, a, b, window)?;
    let reversed = field_apply(alg, b, a, window)?;
    let mut rhs = exp_translation(&reversed.rotate_half_turn(), window);
    rhs.scale(&alg.eta(&alpha, &beta));
    Ok(compare1(alg, &lhs, &rhs))
}

fn map_translation(s: &Series1<FockState>, window: &Rat) -> Series1<FockState> {
    let mut out = Series1::with_window(window.clone());
    out.floor = s.floor.clone();
    for (q, st) in s.terms() {
        out.add_term(q.clone(), translation_apply(st));
    }
    out
}

/// Checks translation covariance of the operator of `a` on each sample:
/// the commutator of the translation operator with the field equals the
/// field's derivative.
pub fn check_translation_covariance(
    alg: &AlgebraInstance,
    a: &FockState,
    samples: &[FockState],
    window: &Rat,
) -> Result<CheckReport> {
    let mut report = CheckReport::holds(0);
    for c in samples {
        if c.is_zero() {
            report.merge(CheckReport::holds(1));
            continue;
        }
        let wide = window + &Rat::one();
        let applied = field_apply(alg, a, c, &wide)?;
        let t_after = map_translation(&applied, window);
        let t_before = field_apply(alg, a, &translation_apply(c), window)?;
        let lhs = t_after.sub(&t_before);
        let rhs = applied.derivative();
        report.merge(compare1(alg, &lhs, &rhs));
    }
    Ok(report)
}

/// Checks composition of operators at exponent `l`: multiplying
/// `Y(a, z+w) Y(b, w) c` by `(z+w)^l` and re-expanding must match the sum
/// `sum_n (z+w)^l Y(a_(n) b, w) c z^{-n-1}`.  Requires `l` in the coset of
/// the pair `(a, c)` and at least their locality order, so that both sides
/// are summable.
pub fn check_associativity(
    alg: &AlgebraInstance,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    l: &Rat,
    w1: &Rat,
    w2: &Rat,
) -> Result<CheckReport> {
    let deg = triple_degrees(a, b, c)?;
    if !(l + &alg.form(&deg.alpha, &deg.gamma)).is_integer() {
        return Err(Error::CosetMismatch(format!(
            "exponent {l} does not lie in the coset prescribed by the degrees"
        )));
    }
    let n_ac = locality_order(alg, a, c)?;
    if l < &n_ac {
        return Err(Error::InvalidSpec(format!(
            "exponent {l} is below the locality order {n_ac} of the outer pair"
        )));
    }
    let n_ab = locality_order(alg, a, b)?;
    let n_bc = locality_order(alg, b, c)?;
    let db = Rat::from_int(b.max_depth() as i64);
    let dc = Rat::from_int(c.max_depth() as i64);

    // Left side: clear the (a, b) singularities with (z-w)^{n_ab}, which
    // floors both exponent directions, substitute z -> z + w, then divide
    // the factor back out and multiply by (z+w)^l.
    let ws1 = Rat::max(
        &(w1 + &n_ab),
        &(&(&(&(w1 + w2) - l) + &n_bc) + &n_ab),
    );
    let wg1 = &(&ws1 + w2) + &n_bc;
    let f2 = &alg.form(&deg.beta, &deg.gamma) - &(&db + &dc);
    let wt1 = Rat::max(&wg1, &(&(&(&wg1 + w2) - &n_ab) - &f2));
    let t1 = double_field_zw(alg, a, b, c, &wt1, w2)?;
    let i_ab = binomial_expansion(&n_ab, BinomialSign::Minus, Dominant::Z, w1, &(w2 - &f2));
    let mut g = series_multiply(&i_ab, &t1, &wg1, w2)?;
    // The cleared product is a genuine power series above these floors.
    g.floor1 = Some(-&n_ac);
    g.floor2 = Some(-&n_bc);
    let shifted = sum_compose(&g, &ws1, w2)?.shift(Var::Z, &(-&n_ab));
    let i_l = binomial_expansion(l, BinomialSign::Plus, Dominant::Z, w1, &(w2 + &n_bc));
    let lhs = series_multiply(&i_l, &shifted, w1, w2)?;

    // Right side: the generating series of composed modes, multiplied by
    // the same (z+w)^l.
    let nmax_ab = mode_ceiling(alg, a, b)?;
    let w2f = &(&(&(w1 + w2) - l) + &nmax_ab) + &Rat::one();
    let mut f = Series2::with_windows(Some(w1.clone()), Some(w2f.clone()));
    let rep = (-&alg.form(&deg.alpha, &deg.beta)).mod_one();
    let lo = -&(w1 + &Rat::one());
    let mut memo = FieldMemo::new();
    for nm in coset_range(&rep, &lo, &nmax_ab) {
        let u = mode_memo(alg, a, &nm, b, &mut memo)?;
        if u.is_zero() {
            continue;
        }
        let s = field_apply_memo(alg, &u, c, &w2f, &mut memo)?;
        for (q, st) in s.terms() {
            f.add_term(-&(&nm + &Rat::one()), q.clone(), st.clone());
        }
    }
    f.floor1 = Some(-&(&nmax_ab + &Rat::one()));
    let i_lw = binomial_expansion(
        l,
        BinomialSign::Plus,
        Dominant::W,
        &(&(w1 + &nmax_ab) + &Rat::one()),
        w2,
    );
    let rhs = series_multiply(&i_lw, &f, w1, w2)?;

    if lhs.is_zero() && rhs.is_zero() {
        return Err(Error::PrecisionTooSmall(format!(
            "windows ({w1}, {w2}) admit no coefficients on either side"
        )));
    }
    Ok(compare2(alg, &lhs, &rhs))
}
