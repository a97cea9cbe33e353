//! Classification and construction of conclusive teleportation protocols.
//!
//! A candidate consists of a bipartite effect `f` on the first two factors,
//! a bipartite state `ω` on the last two, and a fixed isomorphism
//! `η : A₁ ≃ B`. The induced map `μ = ω̂ ∘ f̂` decides everything: the
//! protocol is conclusive iff `μ` is an order isomorphism, and strong iff
//! `μ` is proportional to an isomorphism, in which case the correction is a
//! symmetry.

use crate::cone::{is_order_iso, ConeMap};
use crate::composite::{hat, tensor, unhat, Composite, Recipe};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;
use crate::space::{Observable, StateSpace};

#[derive(Clone, Debug)]
pub struct ProtocolCandidate<S: Scalar> {
    pub a1: StateSpace<S>,
    pub a2: StateSpace<S>,
    pub b: StateSpace<S>,
    /// `f̂ : A₁ -> A₂*`, the operator form of the measurement effect.
    pub f_hat: Matrix<S>,
    /// `ω̂ : A₂* -> B`, the operator form of the shared state.
    pub omega_hat: Matrix<S>,
    /// `η : A₁ -> B`, unit-preserving order isomorphism.
    pub eta: Matrix<S>,
}

impl<S: Scalar> ProtocolCandidate<S> {
    /// Validate a candidate over the canonical regular host
    /// `A₁ (x)min (A₂ (x)max B)`. The effect must be positive and dominated
    /// by the product unit; the state operator must be positive (its overall
    /// normalization is left free so that unnormalized channel operators can
    /// be classified directly).
    pub fn new(
        a1: StateSpace<S>,
        a2: StateSpace<S>,
        b: StateSpace<S>,
        f_hat: Matrix<S>,
        omega_hat: Matrix<S>,
        eta: Matrix<S>,
    ) -> Result<Self> {
        if f_hat.cols != a1.dim || f_hat.rows != a2.dim {
            return Err(Error::DimensionMismatch {
                expected: a1.dim,
                got: f_hat.cols,
            });
        }
        if omega_hat.cols != a2.dim || omega_hat.rows != b.dim {
            return Err(Error::DimensionMismatch {
                expected: a2.dim,
                got: omega_hat.cols,
            });
        }
        // eta: order iso preserving the unit
        let eta_map = ConeMap::new(eta.clone(), a1.cone.clone(), b.cone.clone());
        if !is_order_iso(&eta_map)? {
            return Err(Error::Invalid("eta is not an order isomorphism".into()));
        }
        if !eta.tr_mul_vec(&b.unit).approx_eq(&a1.unit) {
            return Err(Error::Invalid("eta does not preserve the unit".into()));
        }
        // f̂ positive into the dual cone, and u⊗u - f positive as well
        let f_map = ConeMap::new(f_hat.clone(), a1.cone.clone(), a2.dual_cone_of_space());
        if !f_map.is_positive() {
            return Err(Error::NotPositive);
        }
        let mut unit_hat = Matrix::zeros(a2.dim, a1.dim);
        for i in 0..a2.dim {
            for j in 0..a1.dim {
                unit_hat[(i, j)] = a2.unit[i].clone() * a1.unit[j].clone();
            }
        }
        let coeffect = ConeMap::new(
            unit_hat.sub_mat(&f_hat),
            a1.cone.clone(),
            a2.dual_cone_of_space(),
        );
        if !coeffect.is_positive() {
            return Err(Error::Invalid("effect is not dominated by the unit".into()));
        }
        // ω̂ positive from the dual cone into B
        let omega_map = ConeMap::new(
            omega_hat.clone(),
            a2.dual_cone_of_space(),
            b.cone.clone(),
        );
        if !omega_map.is_positive() {
            return Err(Error::NotPositive);
        }
        Ok(ProtocolCandidate {
            a1,
            a2,
            b,
            f_hat,
            omega_hat,
            eta,
        })
    }

    pub fn mu(&self) -> Matrix<S> {
        self.omega_hat.mul_mat(&self.f_hat)
    }

    /// The canonical regular host `A₁ (x)min (A₂ (x)max B)`.
    pub fn host(&self) -> Composite<S> {
        tensor(&Recipe::min(vec![
            Recipe::leaf(&self.a1),
            Recipe::max(vec![Recipe::leaf(&self.a2), Recipe::leaf(&self.b)]),
        ]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolClass {
    NotTp,
    Conclusive,
    Strong,
}

#[derive(Clone, Debug)]
pub struct ProtocolVerdict<S: Scalar> {
    pub class: ProtocolClass,
    pub mu: Matrix<S>,
    /// The correction map `τ` for conclusive and strong protocols.
    pub correction: Option<Matrix<S>>,
    /// `s` with `τ ∘ μ = s η` (for strong protocols the constant `k`).
    pub scale: Option<S>,
    /// Success probability per vertex state of `A₁`.
    pub per_vertex_success: Vec<S>,
}

/// The norm of a positive map out of a state space: peak unit value over the
/// domain vertices.
fn positive_map_norm<S: Scalar>(m: &Matrix<S>, domain: &StateSpace<S>, codomain: &StateSpace<S>) -> S {
    let mut best = S::zero();
    for v in &domain.omega_vertices {
        let val = codomain.unit.dot(&m.mul_vec(v));
        if (val.clone() - best.clone()).is_positive() {
            best = val;
        }
    }
    best
}

/// Decide whether `(f, ω)` is a teleportation protocol and produce the
/// correction and its certificates.
pub fn classify<S: Scalar>(cand: &ProtocolCandidate<S>) -> Result<ProtocolVerdict<S>> {
    let mu = cand.mu();
    let mu_map = ConeMap::new(mu.clone(), cand.a1.cone.clone(), cand.b.cone.clone());
    if !is_order_iso(&mu_map)? {
        return Ok(ProtocolVerdict {
            class: ProtocolClass::NotTp,
            mu,
            correction: None,
            scale: None,
            per_vertex_success: vec![],
        });
    }

    // strong iff the unit values over the vertices agree and rescaling by
    // that constant is an isomorphism
    let values: Vec<S> = cand
        .a1
        .omega_vertices
        .iter()
        .map(|v| cand.b.unit.dot(&mu.mul_vec(v)))
        .collect();
    let k = values[0].clone();
    let constant = values.iter().all(|t| t.approx_eq(&k)) && k.is_positive();
    if constant {
        let rescaled = mu.scale(&k.clone().recip());
        let iso = ConeMap::new(rescaled.clone(), cand.a1.cone.clone(), cand.b.cone.clone());
        let unit_preserving = rescaled.tr_mul_vec(&cand.b.unit).approx_eq(&cand.a1.unit);
        if unit_preserving && is_order_iso(&iso)? {
            // correction: eta after the inverse of the rescaled isomorphism
            let correction = cand.eta.mul_mat(&rescaled.inverse()?);
            let per_vertex_success = vec![S::one(); cand.a1.omega_vertices.len()];
            return Ok(ProtocolVerdict {
                class: ProtocolClass::Strong,
                mu,
                correction: Some(correction),
                scale: Some(k),
                per_vertex_success,
            });
        }
    }

    // conclusive with the maximal admissible scale s = 1 / ||mu^{-1}||
    let mu_inv = mu.inverse()?;
    let inv_norm = positive_map_norm(&mu_inv, &cand.b, &cand.a1);
    let s = inv_norm.recip();
    let correction = cand.eta.mul_mat(&mu_inv).scale(&s);
    let per_vertex_success = values
        .iter()
        .map(|norm| s.clone() / norm.clone())
        .collect();
    Ok(ProtocolVerdict {
        class: ProtocolClass::Conclusive,
        mu,
        correction: Some(correction),
        scale: Some(s),
        per_vertex_success,
    })
}

/// Replace an inefficient conclusive protocol's state with the corrected one
/// `ω̂' = (τ ∘ ω̂) / ||τ ∘ ω̂||`, yielding a strong correction-free protocol
/// on a dynamically admissible host.
pub fn strengthen<S: Scalar>(
    cand: &ProtocolCandidate<S>,
    verdict: &ProtocolVerdict<S>,
) -> Result<ProtocolCandidate<S>> {
    if verdict.class == ProtocolClass::NotTp {
        return Err(Error::NotConclusive);
    }
    let tau = verdict.correction.as_ref().ok_or(Error::NotConclusive)?;
    let composed = tau.mul_mat(&cand.omega_hat);
    // dual-to-state norm of a positive map: the unit value of the image of
    // the unit
    let norm = cand.b.unit.dot(&composed.mul_vec(&cand.a2.unit));
    if !norm.is_positive() {
        return Err(Error::NotConclusive);
    }
    let omega_hat = composed.scale(&norm.recip());
    ProtocolCandidate::new(
        cand.a1.clone(),
        cand.a2.clone(),
        cand.b.clone(),
        cand.f_hat.clone(),
        omega_hat,
        cand.eta.clone(),
    )
}

/// A positive idempotent map.
#[derive(Clone, Debug)]
pub struct Compression<S: Scalar> {
    pub map: Matrix<S>,
    pub range_dim: usize,
}

impl<S: Scalar> Compression<S> {
    pub fn new(map: Matrix<S>) -> Result<Self> {
        if !map.mul_mat(&map).approx_eq(&map) {
            return Err(Error::Invalid("map is not idempotent".into()));
        }
        let range_dim = map.rank(); // idempotent: rank equals trace
        Ok(Compression { map, range_dim })
    }
}

/// The compression induced by a conclusive protocol:
/// `(1/s) f̂ ∘ η^{-1} ∘ τ ∘ ω̂ : A₂* -> A₂*`. The rescaling by the verdict
/// scale makes the map exactly idempotent, with range the image of `f̂`.
pub fn compression_of<S: Scalar>(
    cand: &ProtocolCandidate<S>,
    verdict: &ProtocolVerdict<S>,
) -> Result<Compression<S>> {
    if verdict.class == ProtocolClass::NotTp {
        return Err(Error::NotConclusive);
    }
    let tau = verdict.correction.as_ref().ok_or(Error::NotConclusive)?;
    let s = verdict.scale.clone().ok_or(Error::NotConclusive)?;
    let p = cand
        .f_hat
        .mul_mat(&cand.eta.inverse()?)
        .mul_mat(tau)
        .mul_mat(&cand.omega_hat)
        .scale(&s.recip());
    let compression = Compression::new(p)?;
    // the range must equal the image of f̂
    if compression.range_dim != cand.f_hat.rank() {
        return Err(Error::RangeMismatch);
    }
    Ok(compression)
}

/// Rebuild the strong correction-free protocol state from an effect whose
/// operator form maps `A₁` order-isomorphically onto the range of a
/// compression: `ω̂' = (1/||α_o||) η ∘ f̂⁺ ∘ P` with `α_o = f̂⁺(P u)`.
pub fn protocol_from_compression<S: Scalar>(
    a1: &StateSpace<S>,
    a2: &StateSpace<S>,
    b: &StateSpace<S>,
    f_hat: &Matrix<S>,
    compression: &Compression<S>,
    eta: &Matrix<S>,
) -> Result<ProtocolCandidate<S>> {
    let p = &compression.map;
    // range of f̂ must be the range of P: P f̂ = f̂ and equal ranks
    if !p.mul_mat(f_hat).approx_eq(f_hat) || f_hat.rank() != compression.range_dim {
        return Err(Error::RangeMismatch);
    }
    // pseudo-inverse on the range: solve f̂ x = P v columnwise
    let n2 = a2.dim;
    let mut cols = Vec::with_capacity(n2);
    for j in 0..n2 {
        let target = p.col(j);
        let x = f_hat.solve(&target).ok_or(Error::RangeMismatch)?;
        cols.push(x);
    }
    let pinv_p = Matrix::from_cols(cols); // f̂⁺ ∘ P : A₂* -> A₁
    let alpha_o = pinv_p.mul_vec(&a2.unit);
    let norm = a1.unit.dot(&alpha_o);
    if !norm.is_positive() {
        return Err(Error::RangeMismatch);
    }
    let omega_hat = eta.mul_mat(&pinv_p).scale(&norm.recip());
    // the co-restriction of f̂ must be an order isomorphism onto the range;
    // this is certified a posteriori by the classifier, but check the
    // essential positivity here
    let cand = ProtocolCandidate::new(
        a1.clone(),
        a2.clone(),
        b.clone(),
        f_hat.clone(),
        omega_hat,
        eta.clone(),
    )?;
    Ok(cand)
}

/// The unnormalized conditional state of `α (x) ω` given the effect `f`:
/// remote evaluation of `ω̂ ∘ f̂` on `α`. In debug builds the result is
/// cross-checked against conditioning through the composite machinery.
pub fn remote_evaluate<S: Scalar>(
    alpha: &Vector<S>,
    cand: &ProtocolCandidate<S>,
) -> Vector<S> {
    let result = cand.mu().mul_vec(alpha);
    #[cfg(debug_assertions)]
    {
        let via_composite = remote_evaluate_via_conditioning(alpha, cand);
        debug_assert!(
            result.approx_eq(&via_composite),
            "operator route and conditioning route disagree"
        );
    }
    result
}

/// The same conditional state computed through the composite module: build
/// `α (x) ω` on the tripartite host and condition on `f` over the first two
/// factors.
pub fn remote_evaluate_via_conditioning<S: Scalar>(
    alpha: &Vector<S>,
    cand: &ProtocolCandidate<S>,
) -> Vector<S> {
    let host = cand.host();
    let pair = tensor(&Recipe::max(vec![
        Recipe::leaf(&cand.a2),
        Recipe::leaf(&cand.b),
    ]));
    let omega = unhat(&pair, &[0], &cand.omega_hat);
    let joint = alpha.kron(&omega);
    let f_pair = tensor(&Recipe::min(vec![
        Recipe::leaf(&cand.a1),
        Recipe::leaf(&cand.a2),
    ]));
    let f = unhat(&f_pair, &[0], &cand.f_hat);
    host.conditional(&joint, &[0, 1], &f, false)
}

#[derive(Clone, Debug)]
pub enum DeterministicOutcome<S: Scalar> {
    /// Every outcome is strong; carries the corrections per outcome.
    Deterministic { corrections: Vec<Matrix<S>> },
    /// The first failing outcome and its verdict.
    Fails {
        outcome: usize,
        verdict: ProtocolVerdict<S>,
    },
}

impl<S: Scalar> DeterministicOutcome<S> {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, DeterministicOutcome::Deterministic { .. })
    }
}

/// Check that every outcome of an observable realizes a strong conclusive
/// protocol with the shared state; the corrections are then symmetries.
pub fn verify_deterministic<S: Scalar>(
    observable: &Observable<S>,
    a1: &StateSpace<S>,
    a2: &StateSpace<S>,
    b: &StateSpace<S>,
    omega_hat: &Matrix<S>,
    eta: &Matrix<S>,
) -> Result<DeterministicOutcome<S>> {
    // the outcomes must form an observable of the measured pair
    let pair = tensor(&Recipe::min(vec![Recipe::leaf(a1), Recipe::leaf(a2)]));
    let mut sum = Vector::zeros(pair.dim);
    for e in &observable.outcomes {
        sum = &sum + &e.functional;
    }
    if !sum.approx_eq(&pair.unit) {
        return Err(Error::Invalid("outcomes do not sum to the unit".into()));
    }
    let mut corrections = Vec::new();
    for (i, outcome) in observable.outcomes.iter().enumerate() {
        let f_hat = hat(&pair, &[0], &outcome.functional);
        let cand = ProtocolCandidate::new(
            a1.clone(),
            a2.clone(),
            b.clone(),
            f_hat,
            omega_hat.clone(),
            eta.clone(),
        )?;
        let verdict = classify(&cand)?;
        if verdict.class != ProtocolClass::Strong {
            return Ok(DeterministicOutcome::Fails {
                outcome: i,
                verdict,
            });
        }
        corrections.push(verdict.correction.unwrap());
    }
    Ok(DeterministicOutcome::Deterministic { corrections })
}
