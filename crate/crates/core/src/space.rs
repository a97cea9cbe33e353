//! Abstract state spaces `(A, u_A)`: a pointed generating cone of
//! unnormalized states together with a strictly positive order unit, plus the
//! built-in model library, effects, observables and norms of positive maps.

use crate::cone::{dual_cone, minimal_generators, Cone, ConeMap, Membership};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::{Backend, Scalar};

#[derive(Clone, Debug)]
pub struct StateSpace<S: Scalar> {
    pub name: String,
    pub dim: usize,
    /// Positive cone, generated by the normalized vertices.
    pub cone: Cone<S>,
    /// Order unit functional.
    pub unit: Vector<S>,
    /// Extreme points of the normalized state space.
    pub omega_vertices: Vec<Vector<S>>,
    /// Cached generators of the dual cone.
    pub dual: Cone<S>,
}

/// Construct and validate a state space from the vertices of its normalized
/// state polytope and the order unit.
pub fn make_state_space<S: Scalar>(
    name: &str,
    vertices: Vec<Vector<S>>,
    unit: Vector<S>,
) -> Result<StateSpace<S>> {
    if vertices.is_empty() {
        return Err(Error::Invalid("no vertices".into()));
    }
    let dim = unit.dim();
    for (i, v) in vertices.iter().enumerate() {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        if !unit.dot(v).approx_eq(&S::one()) {
            return Err(Error::UnitNotOne { index: i });
        }
    }
    let cone = Cone::new(dim, vertices.clone())?;
    let rank = cone.rank();
    if rank < dim {
        return Err(Error::NonGenerating { rank, dim });
    }
    if !cone.is_pointed() {
        return Err(Error::Degenerate);
    }
    for (i, v) in vertices.iter().enumerate() {
        if !unit.dot(v).is_positive() {
            return Err(Error::UnitNotStrictlyPositive { index: i });
        }
    }
    // keep only extreme vertices so the stored vertex list is canonical
    let minimal = minimal_generators(&cone)?;
    let omega_vertices: Vec<Vector<S>> = vertices
        .iter()
        .filter(|v| minimal.generators.iter().any(|g| g.same_ray(v)))
        .cloned()
        .collect();
    let dual = dual_cone(&cone)?;
    let cone = cone.with_facets(dual.generators.clone());
    Ok(StateSpace {
        name: name.to_string(),
        dim,
        cone,
        unit,
        omega_vertices,
        dual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Classical(usize),
    Polygon(usize),
    Hypercube(usize),
    CrossPolytope(usize),
}

impl ModelKind {
    pub fn label(&self) -> String {
        match self {
            ModelKind::Classical(n) => format!("classical({n})"),
            ModelKind::Polygon(n) => format!("polygon({n})"),
            ModelKind::Hypercube(d) => format!("hypercube({d})"),
            ModelKind::CrossPolytope(d) => format!("cross_polytope({d})"),
        }
    }
}

/// Canonical coordinates for the built-in model library.
///
/// `polygon(n)` uses unit-circle coordinates `(cos 2πk/n, sin 2πk/n, 1)`.
/// On the exact backend only `polygon(3)` and `polygon(4)` exist: the square
/// gets the rational diamond embedding and the triangle a rational affine
/// image (order-isomorphic to the regular one as only the facial structure
/// matters).
pub fn make_model<S: Scalar>(kind: &ModelKind) -> Result<StateSpace<S>> {
    let name = kind.label();
    match *kind {
        ModelKind::Classical(n) => {
            if n < 1 {
                return Err(Error::Invalid("classical(n) needs n >= 1".into()));
            }
            let vertices = (0..n).map(|i| Vector::basis(n, i)).collect();
            let unit = Vector::new(vec![S::one(); n]);
            make_state_space(&name, vertices, unit)
        }
        ModelKind::Polygon(n) => {
            if n < 3 {
                return Err(Error::Invalid("polygon(n) needs n >= 3".into()));
            }
            let unit = Vector::from_ints(&[0, 0, 1]);
            let vertices: Vec<Vector<S>> = match S::BACKEND {
                Backend::Rational => match n {
                    4 => vec![
                        Vector::from_ints(&[1, 0, 1]),
                        Vector::from_ints(&[0, 1, 1]),
                        Vector::from_ints(&[-1, 0, 1]),
                        Vector::from_ints(&[0, -1, 1]),
                    ],
                    3 => vec![
                        Vector::from_ints(&[1, 0, 1]),
                        Vector::from_ints(&[0, 1, 1]),
                        Vector::from_ints(&[-1, -1, 1]),
                    ],
                    _ => {
                        return Err(Error::BackendMismatch(format!(
                            "polygon({n}) has irrational vertices; use the f64 backend"
                        )))
                    }
                },
                Backend::Float64 => (0..n)
                    .map(|k| {
                        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                        Vector::new(vec![
                            float_scalar::<S>(theta.cos()),
                            float_scalar::<S>(theta.sin()),
                            S::one(),
                        ])
                    })
                    .collect(),
            };
            make_state_space(&name, vertices, unit)
        }
        ModelKind::Hypercube(d) => {
            if d < 1 {
                return Err(Error::Invalid("hypercube(d) needs d >= 1".into()));
            }
            let mut vertices = Vec::with_capacity(1 << d);
            for mask in 0..(1usize << d) {
                let mut coords: Vec<i64> = (0..d)
                    .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
                    .collect();
                coords.push(1);
                vertices.push(Vector::from_ints(&coords));
            }
            let mut unit = Vector::zeros(d + 1);
            unit[d] = S::one();
            make_state_space(&name, vertices, unit)
        }
        ModelKind::CrossPolytope(d) => {
            if d < 1 {
                return Err(Error::Invalid("cross_polytope(d) needs d >= 1".into()));
            }
            let mut vertices = Vec::with_capacity(2 * d);
            for i in 0..d {
                for sign in [1i64, -1] {
                    let mut coords = vec![0i64; d + 1];
                    coords[i] = sign;
                    coords[d] = 1;
                    vertices.push(Vector::from_ints(&coords));
                }
            }
            let mut unit = Vector::zeros(d + 1);
            unit[d] = S::one();
            make_state_space(&name, vertices, unit)
        }
    }
}

fn float_scalar<S: Scalar>(x: f64) -> S {
    // only reachable on the float backend where parse accepts decimal text
    S::parse(&format!("{x:?}")).expect("float literal")
}

/// Parse a model kind label like `classical(3)` or `polygon(4)`.
pub fn parse_model_kind(text: &str) -> Result<ModelKind> {
    let text = text.trim();
    let (head, rest) = text
        .split_once('(')
        .ok_or_else(|| Error::UnknownModel(text.to_string()))?;
    let arg: usize = rest
        .trim_end_matches(')')
        .trim()
        .parse()
        .map_err(|_| Error::UnknownModel(text.to_string()))?;
    match head.trim() {
        "classical" => Ok(ModelKind::Classical(arg)),
        "polygon" => Ok(ModelKind::Polygon(arg)),
        "hypercube" => Ok(ModelKind::Hypercube(arg)),
        "cross_polytope" => Ok(ModelKind::CrossPolytope(arg)),
        _ => Err(Error::UnknownModel(text.to_string())),
    }
}

#[derive(Clone, Debug)]
pub struct Effect<S: Scalar> {
    pub functional: Vector<S>,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Observable<S: Scalar> {
    pub outcomes: Vec<Effect<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    State,
    EffectRole,
    ObservableRole,
}

/// Outcome of `validate`, carrying the certificate of the decision.
#[derive(Debug, Clone)]
pub enum Validation<S: Scalar> {
    Valid(ValidCert<S>),
    Invalid(String),
}

#[derive(Debug, Clone)]
pub enum ValidCert<S: Scalar> {
    /// Membership coefficients over the vertices for a state.
    StateCoefficients(Vec<S>),
    /// Values of the effect on the vertices, all within `[0, 1]`.
    EffectValues(Vec<S>),
    /// Validity of each outcome plus the exact unit sum.
    ObservableSum,
}

impl<S: Scalar> Validation<S> {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid(_))
    }
}

impl<S: Scalar> StateSpace<S> {
    /// Validate a vector in the given role, returning a certificate or the
    /// violated constraint.
    pub fn validate(&self, x: &Vector<S>, role: Role) -> Result<Validation<S>> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        match role {
            Role::State => {
                match self.cone.member(x)? {
                    Membership::Inside { coefficients } => {
                        let norm = self.unit.dot(x);
                        if norm.approx_eq(&S::one()) {
                            Ok(Validation::Valid(ValidCert::StateCoefficients(coefficients)))
                        } else {
                            Ok(Validation::Invalid(format!(
                                "unit value is {} instead of 1",
                                norm.repr()
                            )))
                        }
                    }
                    Membership::Outside { witness } => Ok(Validation::Invalid(format!(
                        "outside the cone; separating functional {}",
                        witness.repr()
                    ))),
                }
            }
            Role::EffectRole => {
                let mut values = Vec::new();
                for v in &self.cone.generators {
                    let val = x.dot(v);
                    if val.is_negative() {
                        return Ok(Validation::Invalid(format!(
                            "negative on generator {}",
                            v.repr()
                        )));
                    }
                }
                for v in &self.omega_vertices {
                    let val = x.dot(v);
                    if (S::one() - val.clone()).is_negative() {
                        return Ok(Validation::Invalid(format!(
                            "exceeds 1 on vertex {}",
                            v.repr()
                        )));
                    }
                    values.push(val);
                }
                Ok(Validation::Valid(ValidCert::EffectValues(values)))
            }
            Role::ObservableRole => Err(Error::Invalid(
                "validate an Observable through validate_observable".into(),
            )),
        }
    }

    pub fn validate_observable(&self, obs: &Observable<S>) -> Result<Validation<S>> {
        let mut sum = Vector::zeros(self.dim);
        for outcome in &obs.outcomes {
            match self.validate(&outcome.functional, Role::EffectRole)? {
                Validation::Valid(_) => {}
                Validation::Invalid(why) => {
                    return Ok(Validation::Invalid(format!(
                        "outcome {}: {}",
                        outcome.label, why
                    )))
                }
            }
            sum = &sum + &outcome.functional;
        }
        if sum.approx_eq(&self.unit) {
            Ok(Validation::Valid(ValidCert::ObservableSum))
        } else {
            Ok(Validation::Invalid(format!(
                "outcomes sum to {} instead of the unit",
                sum.repr()
            )))
        }
    }

    /// `α / u(α)` for positive `α`, with `0 ↦ 0`.
    pub fn normalize(&self, alpha: &Vector<S>) -> Result<Vector<S>> {
        if alpha.is_zero() {
            return Ok(Vector::zeros(self.dim));
        }
        if !self.cone.contains(alpha) {
            return Err(Error::NotInCone);
        }
        let norm = self.unit.dot(alpha);
        Ok(alpha.scale(&norm.recip()))
    }

    /// The cone of the dual space, i.e. the effects up to scaling.
    pub fn dual_cone_of_space(&self) -> Cone<S> {
        self.dual
            .clone()
            .with_facets(self.cone.generators.clone())
    }

    pub fn contains_state(&self, v: &Vector<S>) -> bool {
        self.cone.contains(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapNormKind {
    /// `φ : A -> B` between state spaces.
    StateToState,
    /// `φ : A* -> B` from a dual space into a state space.
    DualToState,
}

/// Operator norm of a certified positive map: the peak unit value over the
/// domain's normalized extreme points, which for a positive map into `B`
/// equals `max u_B(φ v)` (state domain) or `u_B(φ u_A)` (dual domain).
pub fn map_norm<S: Scalar>(
    map: &ConeMap<S>,
    kind: MapNormKind,
    domain: &StateSpace<S>,
    codomain: &StateSpace<S>,
) -> Result<S> {
    if !map.is_positive() {
        return Err(Error::NotPositive);
    }
    match kind {
        MapNormKind::StateToState => {
            let mut best = S::zero();
            for v in &domain.omega_vertices {
                let val = codomain.unit.dot(&map.matrix.mul_vec(v));
                if (val.clone() - best.clone()).is_positive() {
                    best = val;
                }
            }
            Ok(best)
        }
        MapNormKind::DualToState => Ok(codomain.unit.dot(&map.matrix.mul_vec(&domain.unit))),
    }
}
