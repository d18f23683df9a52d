//! Rational quadratic spaces, finitely generated subgroups of ℚ^d, dual
//! groups, and the two-cocycle / commutator-sign layer built on top of them.
//!
//! The objects here are purely arithmetic: a symmetric rational Gram matrix
//! on an ambient space, a subgroup given by generators and stored with a
//! canonical reduced basis, phase data `eta` (an ambient exponent matrix
//! defining `eta(x,y) = e^{i pi x^T E y}`), and bimultiplicative two-cocycles
//! `eps(x,y) = e^{i pi x^T M y}` represented the same way.
//!
//! Invariants:
//! - `SpaceSpec.gram` is square and symmetric; basis names are unique
//!   identifiers and never collide with the reserved grammar symbols
//!   `u` and `e`.
//! - `Subgroup.basis` is in row-echelon form over the integers after clearing
//!   denominators (pivot columns strictly increase), so membership tests and
//!   integer coordinates are a single back-substitution.
//! - `LatticeData` is validated at construction: for all generator pairs,
//!   `x^T (E + E^T) y` differs from `2 (x|y)` by an even integer, which is
//!   exactly the compatibility law `eta(x,y) eta(y,x) = e^{-2 pi i delta(x,y)}`
//!   with `delta(x,y) = -(x|y) mod 1`.
//! - Cocycle exponent matrices are ambient `d x d`; on subgroup elements all
//!   produced values are fourth roots of unity at worst, but the closed form
//!   is defined for every rational vector.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rat::{lcm_big, Rat};
use crate::report::CheckReport;
use crate::scalar::Scalar;

/// An element of the ambient rational space, in coordinates.
pub type GroupVector = Vec<Rat>;

pub fn vec_zero(dim: usize) -> GroupVector {
    vec![Rat::zero(); dim]
}

pub fn vec_is_zero(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> GroupVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> GroupVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg(a: &[Rat]) -> GroupVector {
    a.iter().map(|x| -x).collect()
}

pub fn vec_scale(c: &Rat, a: &[Rat]) -> GroupVector {
    a.iter().map(|x| c * x).collect()
}

/// Renders a vector as comma-separated rationals, e.g. `1,-1/2`.
pub fn vec_render(v: &[Rat]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// The ambient space: a dimension, printable coordinate names, and a
/// symmetric bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub dim: usize,
    pub names: Vec<String>,
    pub gram: Matrix,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    // Reserved by the expression grammar (scalar phases and charges).
    s != "u" && s != "e"
}

impl SpaceSpec {
    pub fn new(names: Vec<String>, gram: Matrix) -> Result<Self> {
        let dim = names.len();
        if dim == 0 {
            return Err(Error::InvalidSpec("the ambient space is empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::InvalidSpec(format!(
                    "basis name {n:?} is not a usable identifier"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidSpec(format!("duplicate basis name {n:?}")));
            }
        }
        if gram.len() != dim || gram.iter().any(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "form matrix is not {dim} x {dim}"
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidSpec("form matrix is not symmetric".into()));
                }
            }
        }
        Ok(SpaceSpec { dim, names, gram })
    }

    /// The symmetric form `(x|y)`.
    pub fn form(&self, x: &[Rat], y: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if !y[j].is_zero() {
                    acc += &(&(&x[i] * &self.gram[i][j]) * &y[j]);
                }
            }
        }
        acc
    }

    pub fn check_vector(&self, v: &[Rat]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} coordinates, the space has {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// Evaluates `x^T M y` for an ambient exponent matrix.
fn quad(m: &Matrix, x: &[Rat], y: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                acc += &(&(xi * &m[i][j]) * yj);
            }
        }
    }
    acc
}

/// A finitely generated subgroup of ℚ^d, stored with its original
/// generators and a canonical reduced basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    pub dim: usize,
    pub generators: Vec<GroupVector>,
    /// Echelon basis: after scaling by the common denominator the rows form
    /// a row-style Hermite basis (strictly increasing pivot columns).
    pub basis: Vec<GroupVector>,
}

impl Subgroup {
    pub fn from_generators(dim: usize, generators: Vec<GroupVector>) -> Result<Self> {
        for g in &generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator has {} coordinates, the space has {dim}",
                    g.len()
                )));
            }
        }
        // Scale to integers, reduce, scale back.
        let mut den = BigInt::one();
        for g in &generators {
            for x in g {
                den = lcm_big(&den, x.denom());
            }
        }
        let scale = Rat::from_bigint(den.clone());
        let int_rows: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|x| {
                        let r = x * &scale;
                        debug_assert!(r.is_integer());
                        r.numer().clone()
                    })
                    .collect()
            })
            .collect();
        let reduced = linalg::hermite_rows(int_rows);
        let basis = reduced
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| Rat::from_bigs(x, den.clone()))
                    .collect()
            })
            .collect();
        Ok(Subgroup {
            dim,
            generators,
            basis,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Integer coordinates of `v` in the reduced basis, if `v` belongs to
    /// the subgroup.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest: GroupVector = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let pivot = row.iter().position(|x| !x.is_zero())?;
            let c = &rest[pivot] / &row[pivot];
            if !c.is_integer() {
                return None;
            }
            if !c.is_zero() {
                rest = vec_sub(&rest, &vec_scale(&c, row));
            }
            coords.push(c);
        }
        if vec_is_zero(&rest) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coordinates(v).is_some()
    }

    /// The subgroup generated by `self` together with `extra`.
    pub fn join(&self, extra: &[GroupVector]) -> Result<Subgroup> {
        let mut gens = self.basis.clone();
        gens.extend(extra.iter().cloned());
        Subgroup::from_generators(self.dim, gens)
    }

    pub fn same_group(&self, other: &Subgroup) -> bool {
        self.dim == other.dim
            && self.basis.iter().all(|b| other.contains(b))
            && other.basis.iter().all(|b| self.contains(b))
    }
}

/// An ambient space together with a grading subgroup and phase data.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeData {
    pub space: SpaceSpec,
    pub subgroup: Subgroup,
    /// Ambient exponent matrix: `eta(x,y) = e^{i pi x^T E y}`. Defaults to
    /// the Gram matrix itself.
    pub eta: Matrix,
}

impl LatticeData {
    pub fn new(space: SpaceSpec, subgroup: Subgroup, eta: Option<Matrix>) -> Result<Self> {
        if subgroup.dim != space.dim {
            return Err(Error::DimensionMismatch(
                "subgroup and space dimensions differ".into(),
            ));
        }
        let eta = eta.unwrap_or_else(|| space.gram.clone());
        if eta.len() != space.dim || eta.iter().any(|row| row.len() != space.dim) {
            return Err(Error::DimensionMismatch(format!(
                "eta matrix is not {0} x {0}",
                space.dim
            )));
        }
        let lat = LatticeData {
            space,
            subgroup,
            eta,
        };
        // eta(x,y) eta(y,x) must equal e^{2 pi i (x|y)}; bimultiplicativity
        // reduces the law to generator pairs.
        for x in &lat.subgroup.basis {
            for y in &lat.subgroup.basis {
                let lhs = quad(&lat.eta, x, y) + quad(&lat.eta, y, x);
                let gap = lhs - Rat::from_int(2) * lat.space.form(x, y);
                if !gap.is_even_integer() {
                    return Err(Error::InvalidSpec(format!(
                        "eta matrix violates the pairing law on generators \
                         ({}) and ({})",
                        vec_render(x),
                        vec_render(y)
                    )));
                }
            }
        }
        Ok(lat)
    }

    pub fn form(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.space.form(x, y)
    }

    /// The relative locality exponent class `delta(x,y) = -(x|y) mod 1`,
    /// returned as its representative in `[0,1)`.
    pub fn delta(&self, x: &[Rat], y: &[Rat]) -> Rat {
        (-self.space.form(x, y)).mod_one()
    }

    /// The mutual-locality phase `eta(x,y)`.
    pub fn eta_value(&self, x: &[Rat], y: &[Rat]) -> Scalar {
        Scalar::root_of_unity(&quad(&self.eta, x, y))
    }

    /// Whether all generator pairings are integers.
    pub fn is_integral(&self) -> bool {
        self.subgroup
            .basis
            .iter()
            .all(|x| self.subgroup.basis.iter().all(|y| self.form(x, y).is_integer()))
    }

    /// Parity `p(x) = (x|x) mod 2` of a vector with integral norm.
    pub fn parity(&self, x: &[Rat]) -> Result<Rat> {
        let norm = self.form(x, x);
        if !norm.is_integer() {
            return Err(Error::NotIntegral);
        }
        Ok(norm.mod_two())
    }
}

/// The dual group inside the span of the subgroup: all rational vectors of
/// the span pairing integrally with every subgroup element.
pub fn dual_group(lat: &LatticeData) -> Result<Subgroup> {
    if !lat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let basis = &lat.subgroup.basis;
    let r = basis.len();
    let mut gram_bas = vec![vec![Rat::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            gram_bas[i][j] = lat.form(&basis[i], &basis[j]);
        }
    }
    let inv = linalg::invert(&gram_bas).ok_or(Error::DegenerateForm)?;
    let mut rows = Vec::with_capacity(r);
    for coeffs in &inv {
        let mut row = vec_zero(lat.space.dim);
        for (c, b) in coeffs.iter().zip(basis) {
            row = vec_add(&row, &vec_scale(c, b));
        }
        rows.push(row);
    }
    Subgroup::from_generators(lat.space.dim, rows)
}

/// A commutator-sign table on a subgroup basis: `value(i,j) = (-1)^{e_ij}`.
///
/// This is the bimultiplicative invariant attached to a two-cocycle; entries
/// are kept as integer exponents mod 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariant {
    pub basis: Vec<GroupVector>,
    /// Integer 0/1 entries.
    pub exponents: Matrix,
}

impl Invariant {
    pub fn value(&self, i: usize, j: usize) -> Scalar {
        Scalar::sign_pow(&self.exponents[i][j])
    }
}

/// The superalgebra sign table `omega(x,y) = (-1)^{(x|x)(y|y) + (x|y)}` on
/// the reduced basis of an integral subgroup.
pub fn omega_superalgebra(lat: &LatticeData) -> Result<Invariant> {
    if !lat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let basis = lat.subgroup.basis.clone();
    let r = basis.len();
    let parities: Vec<Rat> = basis
        .iter()
        .map(|b| lat.parity(b))
        .collect::<Result<_>>()?;
    let mut exponents = vec![vec![Rat::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            exponents[i][j] =
                (&parities[i] * &parities[j] + lat.form(&basis[i], &basis[j])).mod_two();
        }
    }
    Ok(Invariant { basis, exponents })
}

/// A bimultiplicative two-cocycle in ambient exponent form:
/// `eps(x,y) = e^{i pi x^T M y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    pub exponents: Matrix,
}

impl Cocycle {
    /// The trivial cocycle `eps == 1`.
    pub fn trivial(dim: usize) -> Self {
        Cocycle {
            exponents: vec![vec![Rat::zero(); dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn value(&self, x: &[Rat], y: &[Rat]) -> Scalar {
        Scalar::root_of_unity(&quad(&self.exponents, x, y))
    }

    /// Pointwise product of cocycles (exponent matrices add).
    pub fn compose(&self, other: &Cocycle) -> Cocycle {
        let d = self.exponents.len();
        let mut m = self.exponents.clone();
        for i in 0..d {
            for j in 0..d {
                m[i][j] = &m[i][j] + &other.exponents[i][j];
            }
        }
        Cocycle { exponents: m }
    }
}

/// Converts a basis-level exponent matrix `N` (values on `basis[i], basis[j]`
/// pairs) into an ambient matrix `M` with `B M B^T = N`.
fn basis_to_ambient(basis: &[GroupVector], n: &Matrix) -> Result<Matrix> {
    let b: Matrix = basis.to_vec();
    let bt = linalg::transpose(&b);
    let bbt = linalg::mat_mul(&b, &bt);
    let inv = linalg::invert(&bbt).ok_or_else(|| {
        Error::InvalidInvariant("the provided basis vectors are dependent".into())
    })?;
    // C = (B B^T)^{-1} B satisfies C B^T = Id, so M = C^T N C restricts to N.
    let c = linalg::mat_mul(&inv, &b);
    Ok(linalg::mat_mul(&linalg::transpose(&c), &linalg::mat_mul(n, &c)))
}

/// Builds the standard cocycle with invariant `omega`: on basis pairs,
/// `eps(e_i, e_j) = omega(e_i, e_j)` for `i > j` and `1` for `i <= j`.
pub fn construct_cocycle(omega: &Invariant) -> Result<Cocycle> {
    let r = omega.basis.len();
    if omega.exponents.len() != r || omega.exponents.iter().any(|row| row.len() != r) {
        return Err(Error::DimensionMismatch(
            "invariant table does not match its basis".into(),
        ));
    }
    for (i, row) in omega.exponents.iter().enumerate() {
        for x in row {
            if !x.is_integer() {
                return Err(Error::InvalidInvariant(
                    "invariant exponents must be integers".into(),
                ));
            }
        }
        if !row[i].is_even_integer() {
            return Err(Error::InvalidInvariant(format!(
                "omega is -1 on the repeated generator ({})",
                vec_render(&omega.basis[i])
            )));
        }
    }
    let mut n = vec![vec![Rat::zero(); r]; r];
    for i in 0..r {
        for j in 0..i {
            n[i][j] = omega.exponents[i][j].mod_two();
        }
    }
    let exponents = basis_to_ambient(&omega.basis, &n)?;
    Ok(Cocycle { exponents })
}

/// The invariant `omega(x,y) = eps(x,y) eps(y,x)^{-1}` of a cocycle,
/// tabulated on the subgroup basis.
pub fn canonical_invariant(lat: &LatticeData, eps: &Cocycle) -> Result<Invariant> {
    let basis = lat.subgroup.basis.clone();
    let m = &eps.exponents;
    let r = basis.len();
    let mut exponents = vec![vec![Rat::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            let e = quad(m, &basis[i], &basis[j]) - quad(m, &basis[j], &basis[i]);
            if !e.is_integer() {
                return Err(Error::InvalidInvariant(format!(
                    "eps(x,y)/eps(y,x) is not a sign on generators ({}) and ({})",
                    vec_render(&basis[i]),
                    vec_render(&basis[j])
                )));
            }
            exponents[i][j] = e.mod_two();
        }
    }
    Ok(Invariant { basis, exponents })
}

/// Checks the cocycle law `eps(x,y) eps(x+y,z) = eps(y,z) eps(x,y+z)` and the
/// normalization `eps(x,0) = eps(0,y) = 1` on the given triples. The value
/// table is arbitrary — matrix-backed cocycles and raw tables verify alike.
pub fn verify_cocycle<F>(dim: usize, values: F, triples: &[(GroupVector, GroupVector, GroupVector)]) -> CheckReport
where
    F: Fn(&[Rat], &[Rat]) -> Scalar,
{
    let zero = vec_zero(dim);
    let mut report = CheckReport::holds(0);
    for (idx, (x, y, z)) in triples.iter().enumerate() {
        let lhs = &values(x, y) * &values(&vec_add(x, y), z);
        let rhs = &values(y, z) * &values(x, &vec_add(y, z));
        let diff = &lhs - &rhs;
        let norm_gap = &(&values(x, &zero) - &Scalar::one()) + &(&values(&zero, y) - &Scalar::one());
        let bad = if !diff.is_zero() {
            Some(diff)
        } else if !norm_gap.is_zero() {
            Some(norm_gap)
        } else {
            None
        };
        match bad {
            Some(d) => {
                report.merge(CheckReport::violated(
                    vec![Rat::from_int(idx as i64)],
                    format!(
                        "triple ({}); ({}); ({}): difference {}",
                        vec_render(x),
                        vec_render(y),
                        vec_render(z),
                        d
                    ),
                    1,
                ));
            }
            None => report.merge(CheckReport::holds(1)),
        }
    }
    report
}

/// Replaces `eta` by `eta * omega_eps`: the phase data of the twisted
/// structure. In exponent matrices, `E' = E + (M - M^T)`.
pub fn eta_twist(lat: &LatticeData, eps: &Cocycle) -> Result<LatticeData> {
    let d = lat.space.dim;
    if eps.dim() != d {
        return Err(Error::DimensionMismatch(
            "cocycle and space dimensions differ".into(),
        ));
    }
    let mut eta = lat.eta.clone();
    for i in 0..d {
        for j in 0..d {
            eta[i][j] = &eta[i][j] + &(&eps.exponents[i][j] - &eps.exponents[j][i]);
        }
    }
    // The twist multiplies eta by a bimultiplicative sign, which preserves
    // the pairing law; no revalidation needed.
    Ok(LatticeData {
        space: lat.space.clone(),
        subgroup: lat.subgroup.clone(),
        eta,
    })
}

/// Solves a dense linear system over GF(2). `rows` are (coefficients, rhs).
/// Returns any solution with free variables set to zero.
fn solve_gf2(mut rows: Vec<(Vec<u8>, u8)>, ncols: usize) -> Option<Vec<u8>> {
    let mut pivot_of_col = vec![usize::MAX; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r].0[col] == 1) else {
            continue;
        };
        rows.swap(rank, r);
        let (pivot_row, pivot_rhs) = rows[rank].clone();
        for (i, (row, rhs)) in rows.iter_mut().enumerate() {
            if i != rank && row[col] == 1 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x ^= p;
                }
                *rhs ^= pivot_rhs;
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
    }
    // Inconsistent if a zero row has rhs 1.
    for (row, rhs) in &rows {
        if *rhs == 1 && row.iter().all(|&x| x == 0) {
            return None;
        }
    }
    let mut sol = vec![0u8; ncols];
    for col in 0..ncols {
        if pivot_of_col[col] != usize::MAX {
            sol[col] = rows[pivot_of_col[col]].1;
        }
    }
    Some(sol)
}

/// Extends a cocycle from a subgroup `q` to an overgroup `p`: the result is a
/// bimultiplicative cocycle on `p` whose invariant restricts on `q` to the
/// invariant of `eps_q`. The coset representatives must, together with `q`,
/// generate `p`; when `p == q` the cocycle is returned unchanged.
pub fn extend_cocycle(
    q: &Subgroup,
    eps_q: &Cocycle,
    p: &Subgroup,
    coset_reps: &[GroupVector],
) -> Result<Cocycle> {
    if q.dim != p.dim {
        return Err(Error::IncompatibleLattices(
            "subgroups live in different spaces".into(),
        ));
    }
    // q must embed in p with integer coordinates.
    let mut r_rows: Vec<Vec<Rat>> = Vec::with_capacity(q.basis.len());
    for b in &q.basis {
        match p.coordinates(b) {
            Some(c) => r_rows.push(c),
            None => {
                return Err(Error::IncompatibleLattices(format!(
                    "generator ({}) lies outside the target group",
                    vec_render(b)
                )))
            }
        }
    }
    if q.same_group(p) {
        return Ok(eps_q.clone());
    }
    for rep in coset_reps {
        if !p.contains(rep) {
            return Err(Error::IncompatibleLattices(format!(
                "representative ({}) lies outside the target group",
                vec_render(rep)
            )));
        }
    }
    if !q.join(coset_reps)?.same_group(p) {
        return Err(Error::IncompatibleLattices(
            "the representatives do not generate the quotient".into(),
        ));
    }
    // Invariant of eps_q on the q basis, as GF(2) bits.
    let r = q.basis.len();
    let m = &eps_q.exponents;
    let mut a_bits = vec![vec![0u8; r]; r];
    for i in 0..r {
        for j in 0..r {
            let e = quad(m, &q.basis[i], &q.basis[j]) - quad(m, &q.basis[j], &q.basis[i]);
            if !e.is_integer() {
                return Err(Error::InvalidInvariant(
                    "the cocycle has a non-sign invariant on the subgroup".into(),
                ));
            }
            a_bits[i][j] = if e.is_even_integer() { 0 } else { 1 };
        }
    }
    // Unknowns: S[k][l] for k < l, a symmetric zero-diagonal bit matrix on
    // the p basis; equations: (R S R^T)[i][j] = A[i][j] for i < j, where R is
    // the integer coordinate matrix of the q basis in the p basis.
    let t = p.basis.len();
    let r_bits: Vec<Vec<u8>> = r_rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| if x.is_even_integer() { 0 } else { 1 })
                .collect()
        })
        .collect();
    let mut pair_index = std::collections::BTreeMap::new();
    let mut pairs = Vec::new();
    for k in 0..t {
        for l in (k + 1)..t {
            pair_index.insert((k, l), pairs.len());
            pairs.push((k, l));
        }
    }
    let mut rows = Vec::new();
    for i in 0..r {
        for j in (i + 1)..r {
            let mut coeffs = vec![0u8; pairs.len()];
            for (&(k, l), &idx) in &pair_index {
                coeffs[idx] = (r_bits[i][k] & r_bits[j][l]) ^ (r_bits[i][l] & r_bits[j][k]);
            }
            rows.push((coeffs, a_bits[i][j]));
        }
    }
    let sol = solve_gf2(rows, pairs.len()).ok_or_else(|| {
        Error::InvalidInvariant("the invariant does not extend to the target group".into())
    })?;
    let mut n = vec![vec![Rat::zero(); t]; t];
    for (&(k, l), &idx) in &pair_index {
        if sol[idx] == 1 {
            // Lower-triangular representative of the symmetric bit matrix.
            n[l][k] = Rat::one();
        }
    }
    let exponents = basis_to_ambient(&p.basis, &n)?;
    Ok(Cocycle { exponents })
}
