//! Entanglement swapping over four-partite composites: state-pivoting,
//! teleporting states through a channel, converting effects to states, and
//! auditing composites for non-regularity.
//!
//! Alice holds factors `A₁, A₂`, Bob holds `B₁, B₂`; `μ` lives on `A₁B₁`,
//! `ω` on `A₂B₂`, and a measurement effect `f` on `A₁A₂` pivots the state
//! `μ` across the `ω` link: the conditional state of `B₁B₂` corresponds to
//! the operator `ω̂ ∘ f̂ ∘ μ̂*`.

use crate::composite::{tensor, unhat, Composite, Evidence, Recipe};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Scalar, Sign};
use crate::space::StateSpace;
use crate::symmetry::{cyclic_action, equivariant_self_duality, SelfDualityWitness};

#[derive(Clone, Debug)]
pub struct SwapScenario<S: Scalar> {
    pub a1: StateSpace<S>,
    pub a2: StateSpace<S>,
    pub b1: StateSpace<S>,
    pub b2: StateSpace<S>,
    /// `μ̂ : A₁* -> B₁`, the state on the first link.
    pub mu_hat: Matrix<S>,
    /// `ω̂ : A₂* -> B₂`, the state on the second link.
    pub omega_hat: Matrix<S>,
    /// `f̂ : A₁ -> A₂*`, Alice's measurement effect.
    pub f_hat: Matrix<S>,
}

impl<S: Scalar> SwapScenario<S> {
    /// The pivoted operator `ω̂ ∘ f̂ ∘ μ̂* : B₁* -> B₂`, whose bipartite
    /// element is the unnormalized conditional state of Bob's pair. The
    /// dual `μ̂*` is the transpose under the standard pairing.
    pub fn pivot(&self) -> Matrix<S> {
        self.omega_hat
            .mul_mat(&self.f_hat)
            .mul_mat(&self.mu_hat.transpose())
    }

    /// The pivoted state as a flat element of `B₁ (x) B₂`.
    pub fn pivot_state(&self) -> Vector<S> {
        let pair = tensor(&Recipe::max(vec![
            Recipe::leaf(&self.b1),
            Recipe::leaf(&self.b2),
        ]));
        unhat(&pair, &[0], &self.pivot())
    }

    /// Evaluate both sides of the pivot identity
    /// `(f (x) g)(μ (x) ω) = g(ω̂ ∘ f̂ ∘ μ̂*)` for a product functional
    /// `g = g₁ (x) g₂` on Bob's side; returns the difference.
    pub fn pivot_identity_residual(&self, g1: &Vector<S>, g2: &Vector<S>) -> S {
        let s1 = tensor(&Recipe::max(vec![
            Recipe::leaf(&self.a1),
            Recipe::leaf(&self.b1),
        ]));
        let s2 = tensor(&Recipe::max(vec![
            Recipe::leaf(&self.a2),
            Recipe::leaf(&self.b2),
        ]));
        let mu = unhat(&s1, &[0], &self.mu_hat);
        let omega = unhat(&s2, &[0], &self.omega_hat);
        let fpair = tensor(&Recipe::min(vec![
            Recipe::leaf(&self.a1),
            Recipe::leaf(&self.a2),
        ]));
        let f = unhat(&fpair, &[0], &self.f_hat);
        // contract μ (x) ω against f (x) g₁ (x) g₂ over (A1,B1,A2,B2)
        let mut left = S::zero();
        let d = [self.a1.dim, self.b1.dim, self.a2.dim, self.b2.dim];
        for i1 in 0..d[0] {
            for j1 in 0..d[1] {
                for i2 in 0..d[2] {
                    for j2 in 0..d[3] {
                        let state = mu[i1 * d[1] + j1].clone() * omega[i2 * d[3] + j2].clone();
                        let func = f[i1 * d[2] + i2].clone() * g1[j1].clone() * g2[j2].clone();
                        left = left + state * func;
                    }
                }
            }
        }
        let right = g2.dot(&self.pivot().mul_vec(g1));
        left - right
    }

    /// Check the pivot identity on every product of Bob-side dual-cone
    /// generators; returns true when all residuals vanish.
    pub fn pivot_identity_holds(&self) -> bool {
        let pivot = self.pivot();
        let d = [self.a1.dim, self.b1.dim, self.a2.dim, self.b2.dim];
        let s1_pair = tensor(&Recipe::max(vec![
            Recipe::leaf(&self.a1),
            Recipe::leaf(&self.b1),
        ]));
        let s2_pair = tensor(&Recipe::max(vec![
            Recipe::leaf(&self.a2),
            Recipe::leaf(&self.b2),
        ]));
        let fpair = tensor(&Recipe::min(vec![
            Recipe::leaf(&self.a1),
            Recipe::leaf(&self.a2),
        ]));
        let mu = unhat(&s1_pair, &[0], &self.mu_hat);
        let omega = unhat(&s2_pair, &[0], &self.omega_hat);
        let f = unhat(&fpair, &[0], &self.f_hat);
        for g1 in &self.b1.dual.generators {
            for g2 in &self.b2.dual.generators {
                let mut left = S::zero();
                for i1 in 0..d[0] {
                    for j1 in 0..d[1] {
                        for i2 in 0..d[2] {
                            for j2 in 0..d[3] {
                                let state =
                                    mu[i1 * d[1] + j1].clone() * omega[i2 * d[3] + j2].clone();
                                let func =
                                    f[i1 * d[2] + i2].clone() * g1[j1].clone() * g2[j2].clone();
                                left = left + state * func;
                            }
                        }
                    }
                }
                let right = g2.dot(&pivot.mul_vec(g1));
                if !(left - right).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Transport `μ` through the `(f, ω)` channel: requires `ω̂ ∘ f̂` to be
    /// proportional to `η`; returns the normalized transported state of
    /// `B₁B₂` and the outcome probability.
    pub fn teleport_through(&self, eta: &Matrix<S>) -> Result<(Vector<S>, S)> {
        let channel = self.omega_hat.mul_mat(&self.f_hat);
        let mut c: Option<S> = None;
        for i in 0..channel.rows {
            for j in 0..channel.cols {
                let e = &eta[(i, j)];
                let v = &channel[(i, j)];
                if e.is_zero() {
                    if !v.is_zero() {
                        return Err(Error::NotAChannel);
                    }
                    continue;
                }
                let ratio = v.clone() / e.clone();
                match &c {
                    None => c = Some(ratio),
                    Some(prev) => {
                        if !prev.approx_eq(&ratio) {
                            return Err(Error::NotAChannel);
                        }
                    }
                }
            }
        }
        let c = c.ok_or(Error::NotAChannel)?;
        if c.sign() != Sign::Positive {
            return Err(Error::NotAChannel);
        }
        let raw = self.pivot_state();
        let pair = tensor(&Recipe::max(vec![
            Recipe::leaf(&self.b1),
            Recipe::leaf(&self.b2),
        ]));
        let probability = pair.unit.dot(&raw);
        let normalized = raw.scale(&probability.clone().recip());
        Ok((normalized, probability))
    }
}

/// The expected transported state: relabel `μ`'s `A₁` leg onto `B₂` through
/// `η` and put the `B₁` leg first.
pub fn transported_state<S: Scalar>(
    mu_hat: &Matrix<S>,
    eta: &Matrix<S>,
    b1: &StateSpace<S>,
    b2: &StateSpace<S>,
) -> Vector<S> {
    let pair = tensor(&Recipe::max(vec![Recipe::leaf(b1), Recipe::leaf(b2)]));
    unhat(&pair, &[0], &eta.mul_mat(&mu_hat.transpose()))
}

/// Convert an effect on `A₁A₂` into a sub-normalized bipartite element of
/// `B₁B₂` through self-duality witnesses of the two links:
/// the operator `η̂₂* ∘ f̂ ∘ η̂₁ : B₁* -> B₂`.
pub fn effect_to_state<S: Scalar>(
    f_hat: &Matrix<S>,
    witness1: &SelfDualityWitness<S>,
    witness2: &SelfDualityWitness<S>,
    b1: &StateSpace<S>,
    b2: &StateSpace<S>,
) -> Vector<S> {
    let composed = witness2
        .map
        .transpose()
        .mul_mat(f_hat)
        .mul_mat(&witness1.map);
    let pair = tensor(&Recipe::max(vec![Recipe::leaf(b1), Recipe::leaf(b2)]));
    unhat(&pair, &[0], &composed)
}

#[derive(Clone, Debug)]
pub enum AuditOutcome<S: Scalar> {
    /// No entangled link state or channel was found, so the swap argument
    /// does not apply (this never certifies regularity).
    NoWitnessFound,
    NotRegular(NonRegularityCert<S>),
}

#[derive(Clone, Debug)]
pub struct NonRegularityCert<S: Scalar> {
    /// Entangled state on the `A₁B₁` partial subsystem.
    pub mu: Vector<S>,
    pub mu_hat: Matrix<S>,
    /// The teleportation channel pair on `(A₁, A₂, B₂)`.
    pub f_hat: Matrix<S>,
    pub omega_hat: Matrix<S>,
    /// The pivoted element of `B₁B₂` and its separating functional against
    /// the `B₁B₂` partial subsystem cone.
    pub pivoted: Vector<S>,
    pub witness: Vector<S>,
}

impl<S: Scalar> NonRegularityCert<S> {
    /// Replay the certificate: the functional is nonnegative on every
    /// generator of the claimed subsystem cone and negative on the pivot.
    pub fn replay(&self, b_pair: &Composite<S>) -> bool {
        self.witness.dot(&self.pivoted).is_negative()
            && b_pair
                .generators()
                .iter()
                .all(|g| !self.witness.dot(g).is_negative())
    }
}

/// Audit a four-partite composite over leaves `(A₁, A₂, B₁, B₂)` paired
/// `1-3, 2-4`: build an entangled state on the `A₁B₁` partial subsystem and
/// a teleportation channel on `(A₁, A₂, B₂)`; in a regular composite the
/// pivoted state would have to lie in the `B₁B₂` partial subsystem, so a
/// pivot landing outside certifies non-regularity.
pub fn audit_nonregularity<S: Scalar>(host: &Composite<S>) -> Result<AuditOutcome<S>> {
    if host.dims.len() != 4 {
        return Err(Error::Invalid("audit needs a four-partite composite".into()));
    }
    let a1 = host.leaves[0].clone();
    let a2 = host.leaves[1].clone();
    let b1 = host.leaves[2].clone();
    let b2 = host.leaves[3].clone();

    let s1 = host.partial_subsystem(&[0, 2])?; // A1 B1
    let b_pair = host.partial_subsystem(&[2, 3])?; // B1 B2

    // an entangled state on S1: an extreme ray outside the min cone
    let min_pair = tensor(&Recipe::min(vec![Recipe::leaf(&a1), Recipe::leaf(&b1)]));
    let mut entangled: Option<Vector<S>> = None;
    for g in s1.generators() {
        if !min_pair.contains(g) {
            entangled = Some(g.clone());
            break;
        }
    }
    let Some(mu) = entangled else {
        return Ok(AuditOutcome::NoWitnessFound);
    };
    let s1_unit = a1.unit.kron(&b1.unit);
    let mu = mu.scale(&s1_unit.dot(&mu).recip());

    let Some((f_hat, omega_hat)) = channel_from_witness(&a1, &a2, &b2) else {
        return Ok(AuditOutcome::NoWitnessFound);
    };

    let s1_pair = tensor(&Recipe::max(vec![Recipe::leaf(&a1), Recipe::leaf(&b1)]));
    let scenario = SwapScenario {
        a1,
        a2,
        b1,
        b2,
        mu_hat: crate::composite::hat(&s1_pair, &[0], &mu),
        omega_hat: omega_hat.clone(),
        f_hat: f_hat.clone(),
    };
    let pivoted = scenario.pivot_state();
    match b_pair.membership(&pivoted)? {
        Evidence::Outside(witness) => Ok(AuditOutcome::NotRegular(NonRegularityCert {
            mu,
            mu_hat: scenario.mu_hat.clone(),
            f_hat,
            omega_hat,
            pivoted,
            witness,
        })),
        _ => Ok(AuditOutcome::NoWitnessFound),
    }
}

/// A channel `(f, ω)` with `ω̂ ∘ f̂` proportional to the identity, derived
/// from an equivariant self-duality witness when the leaves carry a cyclic
/// model; `None` when no witness is found.
fn channel_from_witness<S: Scalar>(
    a1: &StateSpace<S>,
    a2: &StateSpace<S>,
    b2: &StateSpace<S>,
) -> Option<(Matrix<S>, Matrix<S>)> {
    if a1.dim != a2.dim || a1.dim != b2.dim {
        return None;
    }
    let action = cyclic_action(a2).ok()?;
    let witness = equivariant_self_duality(a2, &action)?;
    let omega_hat = witness.map.clone();
    let inv = omega_hat.inverse().ok()?;
    // scale the inverse into the effect cone: peak value over vertex pairs
    let mut peak = S::zero();
    for v in &a1.omega_vertices {
        let image = inv.mul_vec(v);
        for w in &a2.omega_vertices {
            let val = image.dot(w);
            if (val.clone() - peak.clone()).is_positive() {
                peak = val;
            }
        }
    }
    if !peak.is_positive() {
        return None;
    }
    let f_hat = inv.scale(&peak.recip());
    Some((f_hat, omega_hat))
}
