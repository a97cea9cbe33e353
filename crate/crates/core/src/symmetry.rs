//! Finite group actions on state spaces, unique invariant states,
//! equivariant self-duality witnesses and synthesis of deterministic
//! teleportation protocols from symmetry.

use crate::cone::{is_order_iso, ConeMap};
use crate::composite::{tensor, unhat, Composite, Recipe};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;
use crate::space::{Effect, Observable, StateSpace};

/// A finite group of symmetries given by explicit matrices: each element is
/// a unit-preserving order automorphism permuting the vertices, and the
/// composition table is realized exactly by the matrices.
#[derive(Clone, Debug)]
pub struct GroupAction<S: Scalar> {
    pub space: StateSpace<S>,
    pub elements: Vec<Matrix<S>>,
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverses: Vec<usize>,
}

impl<S: Scalar> GroupAction<S> {
    /// Validate matrices as symmetries and build the composition table.
    pub fn new(space: StateSpace<S>, elements: Vec<Matrix<S>>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Invalid("empty group".into()));
        }
        for g in &elements {
            let cm = ConeMap::new(g.clone(), space.cone.clone(), space.cone.clone());
            if !is_order_iso(&cm)? {
                return Err(Error::Invalid("group element is not an order automorphism".into()));
            }
            // unit preservation: u ∘ g = u
            if !g.tr_mul_vec(&space.unit).approx_eq(&space.unit) {
                return Err(Error::Invalid("group element does not preserve the unit".into()));
            }
            // vertices must map to vertices
            for v in &space.omega_vertices {
                let image = g.mul_vec(v);
                if !space.omega_vertices.iter().any(|w| w.approx_eq(&image)) {
                    return Err(Error::Invalid("group element does not permute the vertices".into()));
                }
            }
        }
        let find = |m: &Matrix<S>| -> Result<usize> {
            elements
                .iter()
                .position(|e| e.approx_eq(m))
                .ok_or_else(|| Error::Invalid("set of matrices is not closed under composition".into()))
        };
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                table[i][j] = find(&a.mul_mat(b))?;
            }
        }
        let identity = find(&Matrix::identity(space.dim))?;
        let mut inverses = vec![usize::MAX; elements.len()];
        for i in 0..elements.len() {
            let inv = (0..elements.len())
                .find(|&j| table[i][j] == identity && table[j][i] == identity)
                .ok_or_else(|| Error::Invalid("element without inverse".into()))?;
            inverses[i] = inv;
        }
        Ok(GroupAction {
            space,
            elements,
            labels,
            table,
            identity,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Dual action matrix `g* = (g^{-1})^T`, realizing `(ga)(α) = a(g^{-1}α)`.
    pub fn dual_element(&self, i: usize) -> Matrix<S> {
        self.elements[self.inverses[i]].transpose()
    }

    /// Transitivity on the vertex set.
    pub fn is_transitive(&self) -> bool {
        let v0 = &self.space.omega_vertices[0];
        self.space.omega_vertices.iter().all(|w| {
            self.elements
                .iter()
                .any(|g| g.mul_vec(v0).approx_eq(w))
        })
    }

    /// Dimension of the common fixed subspace of all elements.
    pub fn fixed_subspace_dim(&self) -> usize {
        let n = self.space.dim;
        let mut rows = Vec::new();
        for g in &self.elements {
            let diff = g.sub_mat(&Matrix::identity(n));
            for r in 0..n {
                rows.push(diff.row(r));
            }
        }
        Matrix::from_rows(rows).kernel_basis().len()
    }
}

/// The natural cyclic action rotating the stored vertex list by one step
/// (polygon and classical models keep their vertices in cyclic order).
/// Models whose vertex cycle is not realized by a linear symmetry are
/// rejected.
pub fn cyclic_action<S: Scalar>(space: &StateSpace<S>) -> Result<GroupAction<S>> {
    let n = space.omega_vertices.len();
    let src = Matrix::from_cols(space.omega_vertices.clone());
    let dst = Matrix::from_cols(
        (0..n)
            .map(|i| space.omega_vertices[(i + 1) % n].clone())
            .collect(),
    );
    // solve on an independent vertex subset, then verify the whole cycle
    let (_, pivots) = src.rref();
    if pivots.len() < space.dim {
        return Err(Error::UnsupportedModel(space.name.clone()));
    }
    let sub = Matrix::from_cols(pivots.iter().map(|&i| src.col(i)).collect());
    let img = Matrix::from_cols(pivots.iter().map(|&i| dst.col(i)).collect());
    let generator = img.mul_mat(&sub.inverse().map_err(|_| Error::UnsupportedModel(space.name.clone()))?);
    for i in 0..n {
        if !generator
            .mul_vec(&space.omega_vertices[i])
            .approx_eq(&space.omega_vertices[(i + 1) % n])
        {
            return Err(Error::UnsupportedModel(format!(
                "{}: vertex cycle is not affine",
                space.name
            )));
        }
    }
    let mut elements = vec![Matrix::identity(space.dim)];
    let mut labels = vec!["g^0".to_string()];
    for k in 1..n {
        elements.push(elements[k - 1].mul_mat(&generator));
        labels.push(format!("g^{k}"));
    }
    GroupAction::new(space.clone(), elements, labels)
        .map_err(|_| Error::UnsupportedModel(space.name.clone()))
}

/// The unique invariant normalized state of a transitive action: the orbit
/// average of any vertex. Uniqueness is certified by the fixed subspace of
/// the action being one-dimensional.
pub fn invariant_state<S: Scalar>(action: &GroupAction<S>) -> Result<Vector<S>> {
    if !action.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let v0 = &action.space.omega_vertices[0];
    let mut sum = Vector::zeros(action.space.dim);
    for g in &action.elements {
        sum = &sum + &g.mul_vec(v0);
    }
    let avg = sum.scale(&S::from_int(action.order() as i64).recip());
    debug_assert_eq!(action.fixed_subspace_dim(), 1);
    Ok(avg)
}

/// An order isomorphism `A* -> A` witnessing weak self-duality.
#[derive(Clone, Debug)]
pub struct SelfDualityWitness<S: Scalar> {
    pub map: Matrix<S>,
    pub normalized: bool,
}

impl<S: Scalar> SelfDualityWitness<S> {
    pub fn new(space: &StateSpace<S>, map: Matrix<S>) -> Result<Self> {
        let cm = ConeMap::new(
            map.clone(),
            space.dual_cone_of_space(),
            space.cone.clone(),
        );
        if !is_order_iso(&cm)? {
            return Err(Error::Invalid("witness is not an order isomorphism".into()));
        }
        let norm = space.unit.dot(&map.mul_vec(&space.unit));
        Ok(SelfDualityWitness {
            normalized: norm.approx_eq(&S::one()),
            map,
        })
    }

    /// Rescale so that the image of the unit is a normalized state.
    pub fn normalize(&self, space: &StateSpace<S>) -> Self {
        let norm = space.unit.dot(&self.map.mul_vec(&space.unit));
        SelfDualityWitness {
            map: self.map.scale(&norm.recip()),
            normalized: true,
        }
    }
}

/// Equivariance `g ∘ ω̂ = ω̂ ∘ g*` for every group element.
pub fn check_equivariant<S: Scalar>(witness: &Matrix<S>, action: &GroupAction<S>) -> bool {
    (0..action.order()).all(|i| {
        let left = action.elements[i].mul_mat(witness);
        let right = witness.mul_mat(&action.dual_element(i));
        left.approx_eq(&right)
    })
}

/// Search for a G-equivariant order isomorphism `A* ≃ A`.
///
/// The equivariance constraints are linear, so the solution space is solved
/// exactly; candidates are then tested in a deterministic order: basis
/// elements and pairwise sums, then maps propagating one dual ray onto each
/// vertex orbit (which finds the witness whenever one maps extreme rays to
/// extreme rays), and finally seeded rational combinations of the basis.
pub fn equivariant_self_duality<S: Scalar>(
    space: &StateSpace<S>,
    action: &GroupAction<S>,
) -> Option<SelfDualityWitness<S>> {
    let n = space.dim;
    // kernel of the linear system g M - M g* = 0 for all g, in the n*n
    // unknowns M[i][j] flattened row-major
    let mut rows: Vec<Vector<S>> = Vec::new();
    for gi in 0..action.order() {
        let g = &action.elements[gi];
        let gd = action.dual_element(gi);
        for i in 0..n {
            for j in 0..n {
                let mut row: Vector<S> = Vector::zeros(n * n);
                // (g M)[i][j] = sum_k g[i][k] M[k][j]
                for k in 0..n {
                    row[k * n + j] = row[k * n + j].clone() + g[(i, k)].clone();
                }
                // (M g*)[i][j] = sum_k M[i][k] g*[k][j]
                for k in 0..n {
                    row[i * n + k] = row[i * n + k].clone() - gd[(k, j)].clone();
                }
                rows.push(row);
            }
        }
    }
    let basis = Matrix::from_rows(rows).kernel_basis();
    if basis.is_empty() {
        return None;
    }
    let to_matrix = |v: &Vector<S>| {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i * n + j].clone();
            }
        }
        m
    };

    let try_candidate = |m: &Matrix<S>| -> Option<SelfDualityWitness<S>> {
        let w = SelfDualityWitness::new(space, m.clone()).ok()?;
        check_equivariant(&w.map, action).then(|| w.normalize(space))
    };

    // the identity first, so self-dual cones get the canonical witness
    if let Some(w) = try_candidate(&Matrix::identity(n)) {
        return Some(w);
    }
    for b in &basis {
        if let Some(w) = try_candidate(&to_matrix(b)) {
            return Some(w);
        }
    }
    for (i, a) in basis.iter().enumerate() {
        for b in basis.iter().skip(i + 1) {
            if let Some(w) = try_candidate(&to_matrix(&(a + b))) {
                return Some(w);
            }
        }
    }

    // ray matching: send one dual ray to a vertex and propagate along the
    // orbit; any equivariant iso arises this way when orbits span
    let d0 = &space.dual.generators[0];
    for v in &space.omega_vertices {
        let mut srcs: Vec<Vector<S>> = Vec::new();
        let mut imgs: Vec<Vector<S>> = Vec::new();
        for gi in 0..action.order() {
            srcs.push(action.dual_element(gi).mul_vec(d0));
            imgs.push(action.elements[gi].mul_vec(v));
        }
        let src = Matrix::from_cols(srcs.clone());
        let (_, pivots) = src.rref();
        if pivots.len() < n {
            break; // orbit does not span; matching cannot determine a map
        }
        let sub = Matrix::from_cols(pivots.iter().map(|&i| srcs[i].clone()).collect());
        let img = Matrix::from_cols(pivots.iter().map(|&i| imgs[i].clone()).collect());
        let Ok(inv) = sub.inverse() else { continue };
        let m = img.mul_mat(&inv);
        // consistency on the whole orbit
        if srcs
            .iter()
            .zip(&imgs)
            .all(|(s, t)| m.mul_vec(s).approx_eq(t))
        {
            if let Some(w) = try_candidate(&m) {
                return Some(w);
            }
        }
    }

    // bounded random rational combinations of the kernel basis
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5d);
    for _ in 0..256 {
        let mut v = Vector::zeros(n * n);
        for b in &basis {
            let c = S::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=4));
            v = &v + &b.scale(&c);
        }
        if let Some(w) = try_candidate(&to_matrix(&v)) {
            return Some(w);
        }
    }
    None
}

/// A synthesized deterministic teleportation protocol: the measurement
/// observable on the first two factors, the shared state on the last two,
/// and the correction labels.
#[derive(Clone, Debug)]
pub struct SynthesizedProtocol<S: Scalar> {
    /// Host composite `A (x)min (A (x)max A)`.
    pub host: Composite<S>,
    pub observable: Observable<S>,
    /// Operator form of each outcome effect.
    pub effect_hats: Vec<Matrix<S>>,
    /// The shared bipartite state (on the last two factors).
    pub omega: Vector<S>,
    pub omega_hat: Matrix<S>,
    /// Indices of the correcting group elements (the inverses).
    pub corrections: Vec<usize>,
}

/// Build the group-indexed observable `f_g` with operator form
/// `(1/|G|) ω̂^{-1} ∘ g` and the shared state `ω`; together they teleport
/// deterministically with corrections `g^{-1}`.
pub fn synthesize_protocol<S: Scalar>(
    space: &StateSpace<S>,
    action: &GroupAction<S>,
    witness: &SelfDualityWitness<S>,
) -> Result<SynthesizedProtocol<S>> {
    if !action.is_transitive() {
        return Err(Error::NotTransitive);
    }
    if !check_equivariant(&witness.map, action) {
        return Err(Error::NotEquivariant);
    }
    let w = witness.normalize(space);
    let inv = w.map.inverse()?;
    let order = S::from_int(action.order() as i64);

    let leaf = Recipe::leaf(space);
    let host = tensor(&Recipe::min(vec![
        leaf.clone(),
        Recipe::max(vec![leaf.clone(), leaf.clone()]),
    ]));
    let pair = tensor(&Recipe::max(vec![leaf.clone(), leaf]));

    let mut effect_hats = Vec::new();
    let mut outcomes = Vec::new();
    let mut sum_hat: Matrix<S> = Matrix::zeros(space.dim, space.dim);
    for gi in 0..action.order() {
        let f_hat = inv
            .mul_mat(&action.elements[gi])
            .scale(&order.clone().recip());
        sum_hat = sum_hat.add_mat(&f_hat);
        outcomes.push(Effect {
            functional: unhat(&pair, &[0], &f_hat),
            label: action.labels[gi].clone(),
        });
        effect_hats.push(f_hat);
    }
    // the outcomes must sum to the product unit
    let unit_hat = {
        let mut m = Matrix::zeros(space.dim, space.dim);
        for i in 0..space.dim {
            for j in 0..space.dim {
                m[(i, j)] = space.unit[i].clone() * space.unit[j].clone();
            }
        }
        m
    };
    if !sum_hat.approx_eq(&unit_hat) {
        return Err(Error::Invalid("synthesized outcomes do not sum to the unit".into()));
    }
    // the image of the unit must be the invariant state
    let omega_o = invariant_state(action)?;
    if !w.map.mul_vec(&space.unit).approx_eq(&omega_o) {
        return Err(Error::Invalid("witness does not send the unit to the invariant state".into()));
    }

    let omega = unhat(&pair, &[0], &w.map);
    Ok(SynthesizedProtocol {
        host,
        observable: Observable { outcomes },
        effect_hats,
        omega,
        omega_hat: w.map,
        corrections: action.inverses.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Approx;
    use crate::space::{make_model, ModelKind};
    use num_rational::BigRational as Q;

    fn sq() -> StateSpace<Q> {
        make_model(&ModelKind::Polygon(4)).unwrap()
    }

    fn pr_hat() -> Matrix<Q> {
        let mut m = Matrix::zeros(3, 3);
        m[(0, 0)] = Q::ratio(1, 2);
        m[(0, 1)] = Q::ratio(1, 2);
        m[(1, 0)] = Q::ratio(-1, 2);
        m[(1, 1)] = Q::ratio(1, 2);
        m[(2, 2)] = Q::from_int(1);
        m
    }

    #[test]
    fn square_cyclic_action() {
        let action = cyclic_action(&sq()).unwrap();
        assert_eq!(action.order(), 4);
        let g = &action.elements[1];
        // g(x, y, z) = (-y, x, z)
        assert!(g.approx_eq(&Matrix::from_int_rows(&[
            &[0, -1, 0],
            &[1, 0, 0],
            &[0, 0, 1]
        ])));
        assert!(action.is_transitive());
        assert_eq!(action.table[1][3], action.identity);
    }

    #[test]
    fn classical_cyclic_action_is_the_shift() {
        let c3: StateSpace<Q> = make_model(&ModelKind::Classical(3)).unwrap();
        let action = cyclic_action(&c3).unwrap();
        assert_eq!(action.order(), 3);
        for g in &action.elements {
            // permutation matrices: all entries zero or one
            for i in 0..3 {
                for j in 0..3 {
                    let e = &g[(i, j)];
                    assert!(e.is_zero() || e.approx_eq(&Q::from_int(1)));
                }
            }
        }
    }

    #[test]
    fn float_polygon_action_closes() {
        let p5: StateSpace<Approx> = make_model(&ModelKind::Polygon(5)).unwrap();
        let action = cyclic_action(&p5).unwrap();
        assert_eq!(action.order(), 5);
        assert!(action.is_transitive());
    }

    #[test]
    fn unsupported_model_for_cyclic_action() {
        let h3: StateSpace<Q> = make_model(&ModelKind::Hypercube(3)).unwrap();
        assert!(matches!(
            cyclic_action(&h3),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn invariant_states() {
        let action = cyclic_action(&sq()).unwrap();
        assert!(invariant_state(&action)
            .unwrap()
            .approx_eq(&Vector::from_ints(&[0, 0, 1])));
        assert_eq!(action.fixed_subspace_dim(), 1);

        let c4: StateSpace<Q> = make_model(&ModelKind::Classical(4)).unwrap();
        let action = cyclic_action(&c4).unwrap();
        let uniform = Vector::new(vec![Q::ratio(1, 4); 4]);
        assert!(invariant_state(&action).unwrap().approx_eq(&uniform));
        assert_eq!(action.fixed_subspace_dim(), 1);
    }

    #[test]
    fn trivial_action_fails_transitivity() {
        let s = sq();
        let action = GroupAction::new(
            s.clone(),
            vec![Matrix::identity(3)],
            vec!["e".into()],
        )
        .unwrap();
        assert_eq!(invariant_state(&action).unwrap_err(), Error::NotTransitive);
    }

    #[test]
    fn pr_witness_is_equivariant_for_rotations_but_not_reflections() {
        let s = sq();
        let action = cyclic_action(&s).unwrap();
        assert!(check_equivariant(&pr_hat(), &action));

        // adjoin the swap reflection; the extended action breaks equivariance
        let refl = Matrix::from_int_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let mut elements = action.elements.clone();
        let mut labels = action.labels.clone();
        for (i, g) in action.elements.iter().enumerate() {
            elements.push(refl.mul_mat(g));
            labels.push(format!("r*{}", action.labels[i]));
        }
        let dihedral = GroupAction::new(s, elements, labels).unwrap();
        assert!(!check_equivariant(&pr_hat(), &dihedral));
    }

    #[test]
    fn identity_group_admits_any_witness() {
        let s = sq();
        let trivial =
            GroupAction::new(s.clone(), vec![Matrix::identity(3)], vec!["e".into()]).unwrap();
        assert!(check_equivariant(&pr_hat(), &trivial));
    }

    #[test]
    fn square_equivariant_witness_is_the_pr_state() {
        let s = sq();
        let action = cyclic_action(&s).unwrap();
        let w = equivariant_self_duality(&s, &action).expect("witness exists");
        assert!(w.normalized);
        assert!(w.map.approx_eq(&pr_hat()) || w.map.approx_eq(&pr_hat().transpose()));
        // its inverse is the rational avatar of the quarter-turn rotation
        let inv = w.map.inverse().unwrap();
        let phi = Matrix::from_int_rows(&[&[1, -1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert!(inv.approx_eq(&phi) || inv.approx_eq(&phi.transpose()));
    }

    #[test]
    fn classical_witness_is_the_identity() {
        for n in [2usize, 3, 4] {
            let c: StateSpace<Q> = make_model(&ModelKind::Classical(n)).unwrap();
            let action = cyclic_action(&c).unwrap();
            let w = equivariant_self_duality(&c, &action).expect("simplices are self-dual");
            assert!(w.map.approx_eq(&Matrix::identity(n).scale(&Q::ratio(1, n as i64))));
        }
    }

    #[test]
    fn float_pentagon_witness() {
        let p5: StateSpace<Approx> = make_model(&ModelKind::Polygon(5)).unwrap();
        let action = cyclic_action(&p5).unwrap();
        let w = equivariant_self_duality(&p5, &action).expect("polygons are weakly self-dual");
        let cm = ConeMap::new(w.map.clone(), p5.dual_cone_of_space(), p5.cone.clone());
        assert!(is_order_iso(&cm).unwrap());
    }

    #[test]
    fn square_synthesis_checks_out() {
        let s = sq();
        let action = cyclic_action(&s).unwrap();
        let w = equivariant_self_duality(&s, &action).unwrap();
        let p = synthesize_protocol(&s, &action, &w).unwrap();
        assert_eq!(p.observable.outcomes.len(), 4);
        // each effect hat composed with the witness is the group element over |G|
        for (gi, f_hat) in p.effect_hats.iter().enumerate() {
            let mu = p.omega_hat.mul_mat(f_hat);
            assert!(mu.approx_eq(&action.elements[gi].scale(&Q::ratio(1, 4))));
        }
    }
}
