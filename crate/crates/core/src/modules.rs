//! Coset modules over an algebra instance and their twisted-module
//! presentation.
//!
//! A module is always realized inside an ambient state space: its states
//! are those whose charge lies in a fixed coset of the instance's group.
//! The action is the restriction of the ambient vertex-operator calculus,
//! so every module computation delegates to the engine after validating
//! the coset discipline.
//!
//! Invariants:
//! * every module state's charge lies in `coset_rep + Q`;
//! * a nonzero `module_mode(a, n, c)` has charge `degree(a) + charge(c)`;
//! * in a twisted view, every exponent of a sampled action lies in the
//!   single coset `(alpha|gamma) + Z` prescribed by the grading.

use crate::engine::{check_borcherds, field_apply, mode, vertex_op_apply, AlgebraInstance};
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::lattice::{vec_render, vec_sub, GroupVector};
use crate::rat::Rat;
use crate::report::CheckReport;
use crate::scalar::Scalar;

/// A coset of the instance's group acting as a module over it.
#[derive(Debug, Clone)]
pub struct CosetModule {
    /// The acting algebra; its group constrains the degrees of operators.
    pub algebra: AlgebraInstance,
    /// Representative of the charge coset carrying the module.
    pub coset_rep: GroupVector,
}

impl CosetModule {
    pub fn new(algebra: AlgebraInstance, coset_rep: GroupVector) -> Result<Self> {
        if coset_rep.len() != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "coset representative has {} coordinates in a {}-dimensional space",
                coset_rep.len(),
                algebra.dim()
            )));
        }
        Ok(CosetModule { algebra, coset_rep })
    }

    /// Errors unless the state is homogeneous with degree in the group.
    pub fn check_operator_state(&self, a: &FockState, label: &str) -> Result<GroupVector> {
        let alpha = a.degree_of()?;
        if !self.algebra.lattice.subgroup.contains(&alpha) {
            return Err(Error::ChargeOutsideCoset(format!(
                "degree ({}) of {label} lies outside the acting group",
                vec_render(&alpha)
            )));
        }
        Ok(alpha)
    }

    /// Errors unless the state is homogeneous with charge in the coset.
    pub fn check_module_state(&self, c: &FockState, label: &str) -> Result<GroupVector> {
        let gamma = c.degree_of()?;
        let offset = vec_sub(&gamma, &self.coset_rep);
        if !self.algebra.lattice.subgroup.contains(&offset) {
            return Err(Error::ChargeOutsideCoset(format!(
                "charge ({}) of {label} lies outside the coset of ({})",
                vec_render(&gamma),
                vec_render(&self.coset_rep)
            )));
        }
        Ok(gamma)
    }
}

/// The `n`-th mode of a group state acting on a module state: the
/// restriction of the ambient mode computation, guarded by the coset
/// discipline.
pub fn module_mode(
    module: &CosetModule,
    a: &FockState,
    n: &Rat,
    c: &FockState,
) -> Result<FockState> {
    if a.is_zero() || c.is_zero() {
        return Ok(FockState::zero());
    }
    module.check_operator_state(a, "the acting state")?;
    module.check_module_state(c, "the module state")?;
    mode(&module.algebra, a, n, c)
}

/// Checks the mode-product identity with the target drawn from the
/// module; the computation is the ambient check restricted to the coset.
pub fn check_module_borcherds(
    module: &CosetModule,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    m: &Rat,
    n: &Rat,
    k: &Rat,
) -> Result<CheckReport> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Ok(CheckReport::holds(1));
    }
    module.check_operator_state(a, "the first acting state")?;
    module.check_operator_state(b, "the second acting state")?;
    module.check_module_state(c, "the target state")?;
    check_borcherds(&module.algebra, a, b, c, m, n, k)
}

/// A module presented as a twisted module over a graded superalgebra:
/// the superalgebra has integer pairings and sign-valued commutation
/// factors on its group, and the module's fractional exponents are
/// governed by the coset pairing.
#[derive(Debug, Clone)]
pub struct TwistedModuleView {
    pub superalgebra: AlgebraInstance,
    pub module: CosetModule,
}

/// Packages a module over a graded superalgebra as a twisted module,
/// validating the grading dictionary:
/// * the superalgebra's pairings on its group are integers and its
///   commutation factor is `(-1)^{p q}` of the parities;
/// * sampled actions of the group generators on the coset state have all
///   exponents in the single coset `(alpha|gamma) + Z`.
pub fn build_twisted_view(
    superalgebra: &AlgebraInstance,
    module: &CosetModule,
) -> Result<TwistedModuleView> {
    if superalgebra.dim() != module.algebra.dim() {
        return Err(Error::DimensionMismatch(format!(
            "superalgebra is {}-dimensional but the module is {}-dimensional",
            superalgebra.dim(),
            module.algebra.dim()
        )));
    }
    let basis = superalgebra.lattice.subgroup.basis.clone();
    for x in &basis {
        for y in &basis {
            if !superalgebra.form(x, y).is_integer() {
                return Err(Error::DictionaryMismatch(format!(
                    "pairing of ({}) and ({}) is not an integer",
                    vec_render(x),
                    vec_render(y)
                )));
            }
            let px = superalgebra.lattice.parity(x)?;
            let py = superalgebra.lattice.parity(y)?;
            let expected = Scalar::sign_pow(&(&px * &py));
            if superalgebra.eta(x, y) != expected {
                return Err(Error::DictionaryMismatch(format!(
                    "commutation factor of ({}) and ({}) is not the parity sign",
                    vec_render(x),
                    vec_render(y)
                )));
            }
        }
    }
    // Sample the action of each generator on the coset ground state and
    // verify that all exponents lie in the prescribed coset.
    let ground = FockState::charge_state(module.coset_rep.clone());
    let window = Rat::from_int(2);
    for x in &basis {
        let pairing = module.algebra.form(x, &module.coset_rep);
        let series = vertex_op_apply(&module.algebra, x, &ground, &window)?;
        for (e, _) in series.terms() {
            if !(e - &pairing).is_integer() {
                return Err(Error::DictionaryMismatch(format!(
                    "sampled exponent {e} of the generator ({}) leaves the coset {} + Z",
                    vec_render(x),
                    pairing
                )));
            }
        }
    }
    Ok(TwistedModuleView {
        superalgebra: superalgebra.clone(),
        module: module.clone(),
    })
}

/// Checks the mode-product identity in the twisted presentation: the
/// operand-pair index `n` must be an integer (the superalgebra grading
/// sees only signs), while `m` and `k` follow the coset bookkeeping of
/// the module.  The computation is the ambient check on the twisting
/// instance.
pub fn check_twisted_borcherds(
    view: &TwistedModuleView,
    a: &FockState,
    b: &FockState,
    c: &FockState,
    m: &Rat,
    n: &Rat,
    k: &Rat,
) -> Result<CheckReport> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Ok(CheckReport::holds(1));
    }
    if !n.is_integer() {
        return Err(Error::CosetMismatch(format!(
            "twisted index {n} for the operand pair must be an integer"
        )));
    }
    view.module.check_operator_state(a, "the first acting state")?;
    view.module.check_operator_state(b, "the second acting state")?;
    view.module.check_module_state(c, "the target state")?;
    check_borcherds(&view.module.algebra, a, b, c, m, n, k)
}

/// The monodromy exponent of a degree-`alpha` operator on the module:
/// substituting `z -> e^{2 pi i} z` in a sampled action multiplies the
/// series by `e^{2 pi i q}` with `q` the returned fraction, because all
/// exponents share one coset.
pub fn monodromy_scalar(module: &CosetModule, alpha: &[Rat]) -> Rat {
    module.algebra.form(alpha, &module.coset_rep).mod_one()
}

/// Verifies the monodromy reading on a sample: rotating every exponent
/// by a full turn multiplies the series by `e^{2 pi i (alpha|gamma)}`.
pub fn check_monodromy(
    module: &CosetModule,
    a: &FockState,
    c: &FockState,
    window: &Rat,
) -> Result<CheckReport> {
    let alpha = module.check_operator_state(a, "the acting state")?;
    module.check_module_state(c, "the module state")?;
    let series = field_apply(&module.algebra, a, c, window)?;
    let scalar = Scalar::e2pi(&module.algebra.form(&alpha, &module.coset_rep).mod_one());
    let mut checked = 0usize;
    for (e, coeff) in series.terms() {
        checked += 1;
        let rotated = coeff.scaled(&Scalar::e2pi(&e.mod_one()));
        let expected = coeff.scaled(&scalar);
        let diff = rotated.sub(&expected);
        if !diff.is_zero() {
            return Ok(CheckReport::violated(
                vec![e.clone()],
                diff.render(&module.algebra.lattice.space),
                checked,
            ));
        }
    }
    Ok(CheckReport::holds(checked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::locality_order;
    use crate::fock::FockMonomial;
    use crate::lattice::{LatticeData, SpaceSpec, Subgroup};

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn even_lattice() -> AlgebraInstance {
        let space = SpaceSpec::new(vec!["a".into()], vec![vec![r(2)]]).unwrap();
        let subgroup = Subgroup::from_generators(1, vec![vec![Rat::one()]]).unwrap();
        AlgebraInstance::new(LatticeData::new(space, subgroup, None).unwrap())
    }

    fn half_module() -> CosetModule {
        CosetModule::new(even_lattice(), vec![rq(1, 2)]).unwrap()
    }

    #[test]
    fn module_action_starts_at_the_pairing_exponent() {
        let module = half_module();
        let a = FockState::charge_state(vec![r(1)]);
        let c = FockState::charge_state(vec![rq(1, 2)]);
        let series = field_apply(&module.algebra, &a, &c, &r(2)).unwrap();
        assert_eq!(series.lowest_exponent(), Some(&r(1)));
        // Lowest nonvanishing mode index is therefore -2.
        let lowest = module_mode(&module, &a, &r(-2), &c).unwrap();
        assert_eq!(lowest, FockState::charge_state(vec![rq(3, 2)]));
        assert!(module_mode(&module, &a, &r(-1), &c).unwrap().is_zero());
    }

    #[test]
    fn vacuum_acts_as_identity_on_the_module() {
        let module = half_module();
        let vac = FockState::vacuum(1);
        let c = FockState::from_monomial(
            FockMonomial::new(vec![(0, 2)], vec![rq(1, 2)]),
            Scalar::one(),
        );
        assert_eq!(module_mode(&module, &vac, &r(-1), &c).unwrap(), c);
        assert!(module_mode(&module, &vac, &r(0), &c).unwrap().is_zero());
    }

    #[test]
    fn coset_discipline_is_enforced() {
        let module = half_module();
        let a = FockState::charge_state(vec![r(1)]);
        let outside = FockState::charge_state(vec![rq(1, 3)]);
        assert!(matches!(
            module_mode(&module, &a, &r(0), &outside),
            Err(Error::ChargeOutsideCoset(_))
        ));
        let bad_operator = FockState::charge_state(vec![rq(1, 2)]);
        let c = FockState::charge_state(vec![rq(1, 2)]);
        assert!(matches!(
            module_mode(&module, &bad_operator, &r(0), &c),
            Err(Error::ChargeOutsideCoset(_))
        ));
    }

    #[test]
    fn module_mode_product_identity_holds() {
        let module = half_module();
        let a = FockState::charge_state(vec![r(1)]);
        let c = FockState::charge_state(vec![rq(1, 2)]);
        let rep = check_module_borcherds(&module, &a, &a, &c, &r(-1), &r(-2), &r(-1)).unwrap();
        assert!(rep.is_holds());
        let deep = FockState::from_monomial(
            FockMonomial::new(vec![(0, 1)], vec![rq(1, 2)]),
            Scalar::one(),
        );
        let rep2 = check_module_borcherds(&module, &a, &a, &deep, &r(0), &r(-2), &r(0)).unwrap();
        assert!(rep2.is_holds());
    }

    fn fermion() -> AlgebraInstance {
        let space = SpaceSpec::new(vec!["a".into()], vec![vec![r(1)]]).unwrap();
        let subgroup = Subgroup::from_generators(1, vec![vec![Rat::one()]]).unwrap();
        AlgebraInstance::new(LatticeData::new(space, subgroup, None).unwrap())
    }

    #[test]
    fn twisted_view_validates_and_delegates() {
        let alg = fermion();
        let module = CosetModule::new(alg.clone(), vec![rq(1, 2)]).unwrap();
        let view = build_twisted_view(&alg, &module).unwrap();
        let a = FockState::charge_state(vec![r(1)]);
        let c = FockState::charge_state(vec![rq(1, 2)]);
        let rep =
            check_twisted_borcherds(&view, &a, &a, &c, &rq(-1, 2), &r(-1), &rq(-1, 2)).unwrap();
        assert!(rep.is_holds());
        // Fractional pair index is rejected before any computation.
        assert!(matches!(
            check_twisted_borcherds(&view, &a, &a, &c, &rq(-1, 2), &rq(-1, 2), &rq(-1, 2)),
            Err(Error::CosetMismatch(_))
        ));
    }

    #[test]
    fn twisted_view_rejects_non_super_gradings() {
        let space = SpaceSpec::new(vec!["a".into()], vec![vec![rq(1, 2)]]).unwrap();
        let subgroup = Subgroup::from_generators(1, vec![vec![Rat::one()]]).unwrap();
        let alg = AlgebraInstance::new(LatticeData::new(space, subgroup, None).unwrap());
        let module = CosetModule::new(alg.clone(), vec![rq(1, 2)]).unwrap();
        assert!(matches!(
            build_twisted_view(&alg, &module),
            Err(Error::DictionaryMismatch(_))
        ));
    }

    #[test]
    fn twisted_and_module_paths_agree() {
        let alg = fermion();
        let module = CosetModule::new(alg.clone(), vec![rq(1, 2)]).unwrap();
        let view = build_twisted_view(&alg, &module).unwrap();
        let a = FockState::charge_state(vec![r(1)]);
        let b = FockState::from_monomial(
            FockMonomial::new(vec![(0, 1)], vec![r(-1)]),
            Scalar::one(),
        );
        let c = FockState::from_monomial(
            FockMonomial::new(vec![(0, 1)], vec![rq(1, 2)]),
            Scalar::one(),
        );
        let m = rq(-1, 2);
        let n = r(0);
        let k = rq(1, 2);
        let via_module = check_module_borcherds(&module, &a, &b, &c, &m, &n, &k).unwrap();
        let via_twisted = check_twisted_borcherds(&view, &a, &b, &c, &m, &n, &k).unwrap();
        assert_eq!(via_module, via_twisted);
        assert!(via_module.is_holds());
    }

    #[test]
    fn monodromy_reads_the_coset_pairing() {
        let module = half_module();
        let a = FockState::charge_state(vec![r(1)]);
        let c = FockState::charge_state(vec![rq(1, 2)]);
        assert_eq!(monodromy_scalar(&module, &[r(1)]), Rat::zero());
        let rep = check_monodromy(&module, &a, &c, &r(3)).unwrap();
        assert!(rep.is_holds());
        let half = CosetModule::new(fermion(), vec![rq(1, 2)]).unwrap();
        let ch = FockState::charge_state(vec![rq(1, 2)]);
        assert_eq!(monodromy_scalar(&half, &[r(1)]), rq(1, 2));
        let rep2 = check_monodromy(&half, &a, &ch, &r(3)).unwrap();
        assert!(rep2.is_holds());
    }

    #[test]
    fn restriction_matches_ambient_engine() {
        let module = half_module();
        let a = FockState::charge_state(vec![r(1)]);
        let b = FockState::charge_state(vec![r(-1)]);
        // Operands inside the group: the module action is plain restriction.
        let inside = CosetModule::new(module.algebra.clone(), vec![r(0)]).unwrap();
        let got = module_mode(&inside, &a, &r(-3), &b).unwrap();
        let ambient = mode(&module.algebra, &a, &r(-3), &b).unwrap();
        assert_eq!(got, ambient);
        let n_ab = locality_order(&module.algebra, &a, &b).unwrap();
        assert_eq!(n_ab, r(2));
    }
}
