//! Algebra instances: a lattice datum together with an optional cocycle
//! twist, and the vertex-operator calculus built on top of it.
//!
//! An [`AlgebraInstance`] owns the quadratic data (`LatticeData`) and an
//! optional [`Cocycle`] that multiplies every vertex operator by the phase
//! `eps(alpha, gamma)`.  Twisting composes cocycles, so twisting twice by
//! `eps1` and `eps2` equals twisting once by their product.
//!
//! Invariants:
//! * the commutation factor reported by [`AlgebraInstance::eta`] always
//!   satisfies `eta(x, y) * eta(y, x) = e^{-2 pi i Delta(x, y)}`;
//! * a cocycle, when present, has the same ambient dimension as the lattice.

mod checks;
mod fields;

pub use checks::{
    borcherds_sides, check_associativity, check_borcherds, check_jacobi_window, check_locality,
    check_skew_symmetry, check_translation_covariance, double_field_wz, double_field_zw,
    jacobi_sides, locality_sides,
};
pub use fields::{
    current_apply, field_apply, locality_order, mode, mode_ceiling, ope_coefficient,
    vertex_op_apply,
};

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::lattice::{Cocycle, GroupVector, LatticeData};
use crate::rat::Rat;
use crate::scalar::Scalar;

/// A concrete algebra: quadratic data plus an optional cocycle twist.
#[derive(Debug, Clone)]
pub struct AlgebraInstance {
    pub lattice: LatticeData,
    pub cocycle: Option<Cocycle>,
}

impl AlgebraInstance {
    pub fn new(lattice: LatticeData) -> Self {
        AlgebraInstance {
            lattice,
            cocycle: None,
        }
    }

    pub fn with_cocycle(lattice: LatticeData, cocycle: Cocycle) -> Result<Self> {
        if cocycle.dim() != lattice.space.dim {
            return Err(Error::DimensionMismatch(format!(
                "cocycle is {}-dimensional but the space is {}-dimensional",
                cocycle.dim(),
                lattice.space.dim
            )));
        }
        Ok(AlgebraInstance {
            lattice,
            cocycle: Some(cocycle),
        })
    }

    pub fn dim(&self) -> usize {
        self.lattice.space.dim
    }

    /// The bilinear form on the ambient space.
    pub fn form(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.lattice.form(x, y)
    }

    /// The braiding exponent `Delta(x, y) = -(x|y) mod 1`.
    pub fn delta(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.lattice.delta(x, y)
    }

    /// The cocycle phase attached to a pair of charges (`1` when untwisted).
    pub fn eps(&self, x: &[Rat], y: &[Rat]) -> Scalar {
        match &self.cocycle {
            Some(c) => c.value(x, y),
            None => Scalar::one(),
        }
    }

    /// The commutation factor, including the cocycle's contribution:
    /// `eta(x, y) = eta_0(x, y) * eps(x, y) / eps(y, x)`.
    pub fn eta(&self, x: &[Rat], y: &[Rat]) -> Scalar {
        let base = self.lattice.eta_value(x, y);
        match &self.cocycle {
            Some(c) => {
                let skew = c
                    .value(y, x)
                    .invert()
                    .expect("a cocycle phase is a root of unity");
                &(&base * &c.value(x, y)) * &skew
            }
            None => base,
        }
    }

    /// The vacuum state of the underlying space.
    pub fn vacuum(&self) -> FockState {
        FockState::vacuum(self.dim())
    }

    /// The degree (charge) of a homogeneous state.
    pub fn degree(&self, v: &FockState) -> Result<GroupVector> {
        v.degree_of()
    }

    /// Twists the instance by a further cocycle; twists compose by
    /// multiplying the phases.
    pub fn twist(&self, eps: &Cocycle) -> Result<AlgebraInstance> {
        if eps.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "twist cocycle is {}-dimensional but the space is {}-dimensional",
                eps.dim(),
                self.dim()
            )));
        }
        let composed = match &self.cocycle {
            Some(old) => old.compose(eps),
            None => eps.clone(),
        };
        Ok(AlgebraInstance {
            lattice: self.lattice.clone(),
            cocycle: Some(composed),
        })
    }
}
