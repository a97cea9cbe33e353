//! Polyhedral cones: membership with certificates, dual cones by the double
//! description method, extreme-ray reduction, and order-isomorphism tests.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::lp::nonneg_combination;
use crate::scalar::{Scalar, Sign};

/// A closed convex cone given by finitely many generators, with an optional
/// cached list of supporting functionals.
#[derive(Clone, Debug)]
pub struct Cone<S: Scalar> {
    pub dim: usize,
    pub generators: Vec<Vector<S>>,
    pub facets: Option<Vec<Vector<S>>>,
}

#[derive(Debug, Clone)]
pub enum Membership<S: Scalar> {
    Inside { coefficients: Vec<S> },
    Outside { witness: Vector<S> },
}

impl<S: Scalar> Membership<S> {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }

    /// Re-verify the certificate by direct substitution.
    pub fn verify(&self, cone: &Cone<S>, v: &Vector<S>) -> bool {
        match self {
            Membership::Inside { coefficients } => {
                if coefficients.len() != cone.generators.len()
                    || coefficients.iter().any(|c| c.is_negative())
                {
                    return false;
                }
                let mut acc = Vector::zeros(cone.dim);
                for (c, g) in coefficients.iter().zip(&cone.generators) {
                    acc = &acc + &g.scale(c);
                }
                acc.approx_eq(v)
            }
            Membership::Outside { witness } => {
                witness.dot(v).is_negative()
                    && cone.generators.iter().all(|g| !witness.dot(g).is_negative())
            }
        }
    }
}

impl<S: Scalar> Cone<S> {
    /// Build a cone from generators. Zero generators are rejected rather
    /// than dropped; pointedness and spanning are checked separately where
    /// an operation requires them.
    pub fn new(dim: usize, generators: Vec<Vector<S>>) -> Result<Self> {
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
            if g.is_zero() {
                return Err(Error::ZeroGenerator);
            }
        }
        Ok(Cone {
            dim,
            generators,
            facets: None,
        })
    }

    pub fn with_facets(mut self, facets: Vec<Vector<S>>) -> Self {
        self.facets = Some(facets);
        self
    }

    pub fn rank(&self) -> usize {
        Matrix::from_rows(self.generators.clone()).rank()
    }

    pub fn is_generating(&self) -> bool {
        !self.generators.is_empty() && self.rank() == self.dim
    }

    /// A cone is pointed iff no nontrivial nonnegative combination of its
    /// generators vanishes.
    pub fn is_pointed(&self) -> bool {
        if self.generators.is_empty() {
            return true;
        }
        let dim = self.dim;
        let mut cols: Vec<Vector<S>> = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let mut col = g.0.clone();
            col.push(S::one()); // weight-sum coordinate
            cols.push(Vector::new(col));
        }
        let mut target = Vector::zeros(dim + 1);
        target[dim] = S::one();
        // a combination with total weight 1 summing to zero exists iff not pointed
        nonneg_combination(&cols, &target).is_err()
    }

    /// Decide membership; both answers carry certificates that re-verify by
    /// substitution.
    pub fn member(&self, v: &Vector<S>) -> Result<Membership<S>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        match nonneg_combination(&self.generators, v) {
            Ok(coefficients) => Ok(Membership::Inside { coefficients }),
            Err(witness) => Ok(Membership::Outside { witness }),
        }
    }

    /// Boolean membership; uses cached facets when available.
    pub fn contains(&self, v: &Vector<S>) -> bool {
        if let Some(facets) = &self.facets {
            return facets.iter().all(|h| !h.dot(v).is_negative());
        }
        self.member(v).map(|m| m.is_inside()).unwrap_or(false)
    }
}

/// The cone of functionals nonnegative on `c`, as a minimal generator list.
pub fn dual_cone<S: Scalar>(c: &Cone<S>) -> Result<Cone<S>> {
    let rank = c.rank();
    if rank < c.dim {
        return Err(Error::NonGenerating { rank, dim: c.dim });
    }
    if !c.is_pointed() {
        return Err(Error::Degenerate);
    }
    let rays = extreme_rays_of_inequalities(&c.generators, c.dim)?;
    Ok(Cone {
        dim: c.dim,
        generators: rays,
        facets: Some(c.generators.clone()),
    })
}

/// Extreme rays of `{x : n·x >= 0 for all n in normals}` by incremental
/// double description with the combinatorial adjacency test.
pub fn extreme_rays_of_inequalities<S: Scalar>(
    normals: &[Vector<S>],
    dim: usize,
) -> Result<Vec<Vector<S>>> {
    // initial simplicial cone from `dim` independent normals
    let mut chosen: Vec<usize> = Vec::new();
    let mut probe: Vec<Vector<S>> = Vec::new();
    for (idx, n) in normals.iter().enumerate() {
        probe.push(n.clone());
        if Matrix::from_rows(probe.clone()).rank() == probe.len() {
            chosen.push(idx);
            if chosen.len() == dim {
                break;
            }
        } else {
            probe.pop();
        }
    }
    if chosen.len() < dim {
        return Err(Error::NonGenerating {
            rank: chosen.len(),
            dim,
        });
    }
    let base = Matrix::from_rows(chosen.iter().map(|&i| normals[i].clone()).collect());
    let base_inv = base.inverse()?;
    let mut rays: Vec<Ray<S>> = (0..dim)
        .map(|j| Ray::new(base_inv.col(j).canonical_ray(), normals))
        .collect();

    let mut processed = Bits::new(normals.len());
    for &i in &chosen {
        processed.set(i);
    }

    for (idx, normal) in normals.iter().enumerate() {
        if processed.get(idx) {
            continue;
        }
        processed.set(idx);
        let signs: Vec<Sign> = rays.iter().map(|r| normal.dot(&r.v).sign()).collect();
        if signs.iter().all(|s| *s != Sign::Negative) {
            continue; // redundant for the current cone
        }
        let mut next: Vec<Ray<S>> = Vec::new();
        for (r, s) in rays.iter().zip(&signs) {
            if *s != Sign::Negative {
                next.push(r.clone());
            }
        }
        for (i, ri) in rays.iter().enumerate() {
            if signs[i] != Sign::Positive {
                continue;
            }
            for (j, rj) in rays.iter().enumerate() {
                if signs[j] != Sign::Negative {
                    continue;
                }
                if !adjacent(&rays, i, j, &processed, &signs) {
                    continue;
                }
                let a = normal.dot(&ri.v); // > 0
                let b = -normal.dot(&rj.v); // > 0
                let combined = &ri.v.scale(&b) + &rj.v.scale(&a);
                next.push(Ray::new(combined.canonical_ray(), normals));
            }
        }
        rays = next;
    }

    Ok(rays.into_iter().map(|r| r.v).collect())
}

#[derive(Clone)]
struct Ray<S: Scalar> {
    v: Vector<S>,
    tight: Bits,
}

impl<S: Scalar> Ray<S> {
    fn new(v: Vector<S>, normals: &[Vector<S>]) -> Self {
        let mut tight = Bits::new(normals.len());
        for (i, n) in normals.iter().enumerate() {
            if n.dot(&v).is_zero() {
                tight.set(i);
            }
        }
        Ray { v, tight }
    }
}

/// Combinatorial adjacency: `i` and `j` are adjacent iff no other ray of the
/// current cone is tight on every processed constraint tight for both.
fn adjacent<S: Scalar>(
    rays: &[Ray<S>],
    i: usize,
    j: usize,
    processed: &Bits,
    _signs: &[Sign],
) -> bool {
    let common = rays[i].tight.and(&rays[j].tight).and(processed);
    for (k, r) in rays.iter().enumerate() {
        if k != i && k != j && common.subset_of(&r.tight) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Self {
        Bits {
            words: vec![0; (len + 63) / 64],
        }
    }
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }
    fn subset_of(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

/// Reduce to generators none of which is a conic combination of the others.
pub fn minimal_generators<S: Scalar>(c: &Cone<S>) -> Result<Cone<S>> {
    // drop positive multiples first
    let mut kept: Vec<Vector<S>> = Vec::new();
    for g in &c.generators {
        let canon = g.canonical_ray();
        if !kept.iter().any(|k| k.approx_eq(&canon)) {
            kept.push(canon);
        }
    }
    // then drop anything inside the hull of the rest
    let mut i = 0;
    while i < kept.len() {
        let candidate = kept[i].clone();
        let others: Vec<Vector<S>> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if nonneg_combination(&others, &candidate).is_ok() {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(Cone {
        dim: c.dim,
        generators: kept,
        facets: c.facets.clone(),
    })
}

/// A linear map tagged with the cones it is supposed to respect.
#[derive(Clone, Debug)]
pub struct ConeMap<S: Scalar> {
    pub matrix: Matrix<S>,
    pub domain: Cone<S>,
    pub codomain: Cone<S>,
}

impl<S: Scalar> ConeMap<S> {
    pub fn new(matrix: Matrix<S>, domain: Cone<S>, codomain: Cone<S>) -> Self {
        ConeMap {
            matrix,
            domain,
            codomain,
        }
    }

    /// Certified positivity: every domain generator lands in the codomain.
    pub fn is_positive(&self) -> bool {
        self.domain
            .generators
            .iter()
            .all(|g| self.codomain.contains(&self.matrix.mul_vec(g)))
    }
}

/// A bijective positive map with positive inverse.
pub fn is_order_iso<S: Scalar>(map: &ConeMap<S>) -> Result<bool> {
    if map.matrix.rows != map.matrix.cols {
        return Err(Error::DimensionMismatch {
            expected: map.matrix.rows,
            got: map.matrix.cols,
        });
    }
    if map.domain.dim != map.codomain.dim {
        return Err(Error::DimensionMismatch {
            expected: map.domain.dim,
            got: map.codomain.dim,
        });
    }
    let Ok(inverse) = map.matrix.inverse() else {
        return Ok(false);
    };
    if !map.is_positive() {
        return Ok(false);
    }
    let back = ConeMap::new(inverse, map.codomain.clone(), map.domain.clone());
    Ok(back.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Q;

    fn square_cone() -> Cone<Q> {
        Cone::new(
            3,
            vec![
                Vector::from_ints(&[1, 0, 1]),
                Vector::from_ints(&[0, 1, 1]),
                Vector::from_ints(&[-1, 0, 1]),
                Vector::from_ints(&[0, -1, 1]),
            ],
        )
        .unwrap()
    }

    fn orthant(n: usize) -> Cone<Q> {
        Cone::new(n, (0..n).map(|i| Vector::basis(n, i)).collect()).unwrap()
    }

    fn same_ray_set(a: &[Vector<Q>], b: &[Vector<Q>]) -> bool {
        a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| x.same_ray(y)))
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = orthant(4);
        let d = dual_cone(&c).unwrap();
        assert!(same_ray_set(&d.generators, &c.generators));
    }

    #[test]
    fn square_dual_is_rotated_square() {
        let d = dual_cone(&square_cone()).unwrap();
        let expected: Vec<Vector<Q>> = vec![
            Vector::from_ints(&[1, 1, 1]),
            Vector::from_ints(&[-1, 1, 1]),
            Vector::from_ints(&[-1, -1, 1]),
            Vector::from_ints(&[1, -1, 1]),
        ];
        assert!(same_ray_set(&d.generators, &expected));
    }

    #[test]
    fn double_dual_returns_the_cone() {
        for c in [square_cone(), orthant(3)] {
            let dd = dual_cone(&dual_cone(&c).unwrap()).unwrap();
            assert_eq!(dd.generators.len(), c.generators.len());
            for g in &c.generators {
                assert!(dd.member(g).unwrap().is_inside());
            }
            for g in &dd.generators {
                assert!(c.member(g).unwrap().is_inside());
            }
        }
    }

    #[test]
    fn member_center_of_square() {
        let c = square_cone();
        let center = Vector::from_ints(&[0, 0, 1]);
        let m = c.member(&center).unwrap();
        assert!(m.is_inside());
        assert!(m.verify(&c, &center));
        // the uniform certificate from the examples also verifies
        let uniform = Membership::Inside {
            coefficients: vec![Q::ratio(1, 4); 4],
        };
        assert!(uniform.verify(&c, &center));
    }

    #[test]
    fn member_outside_with_witness() {
        let c = square_cone();
        let v = Vector::from_ints(&[2, 0, 1]);
        let m = c.member(&v).unwrap();
        assert!(!m.is_inside());
        assert!(m.verify(&c, &v));
    }

    #[test]
    fn member_rejects_dimension_mismatch() {
        let c = square_cone();
        let v: Vector<Q> = Vector::from_ints(&[1, 0]);
        assert!(matches!(
            c.member(&v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_generator_rejected() {
        let r: Result<Cone<Q>> = Cone::new(2, vec![Vector::from_ints(&[0, 0])]);
        assert_eq!(r.unwrap_err(), Error::ZeroGenerator);
    }

    #[test]
    fn dual_of_flat_cone_fails() {
        let c: Cone<Q> = Cone::new(
            3,
            vec![Vector::from_ints(&[1, 0, 0]), Vector::from_ints(&[0, 1, 0])],
        )
        .unwrap();
        assert!(matches!(dual_cone(&c), Err(Error::NonGenerating { .. })));
    }

    #[test]
    fn dual_of_line_fails() {
        let c: Cone<Q> = Cone::new(
            2,
            vec![
                Vector::from_ints(&[1, 0]),
                Vector::from_ints(&[-1, 0]),
                Vector::from_ints(&[0, 1]),
            ],
        )
        .unwrap();
        assert!(!c.is_pointed());
        assert_eq!(dual_cone(&c).unwrap_err(), Error::Degenerate);
    }

    #[test]
    fn minimal_generators_drops_interior_rays() {
        let c: Cone<Q> = Cone::new(
            2,
            vec![
                Vector::from_ints(&[1, 0]),
                Vector::from_ints(&[0, 1]),
                Vector::from_ints(&[1, 1]),
            ],
        )
        .unwrap();
        let m = minimal_generators(&c).unwrap();
        assert_eq!(m.generators.len(), 2);

        let mut with_center = square_cone();
        with_center
            .generators
            .push(Vector::from_ints(&[0, 0, 1]));
        let m = minimal_generators(&with_center).unwrap();
        assert_eq!(m.generators.len(), 4);
    }

    #[test]
    fn minimal_generators_idempotent() {
        let c = square_cone();
        let once = minimal_generators(&c).unwrap();
        let twice = minimal_generators(&once).unwrap();
        assert!(same_ray_set(&once.generators, &twice.generators));
    }

    #[test]
    fn order_iso_examples() {
        let sq = square_cone();
        let id = ConeMap::new(Matrix::identity(3), sq.clone(), sq.clone());
        assert!(is_order_iso(&id).unwrap());

        // quarter rotation permutes the square's vertices
        let g = Matrix::from_int_rows(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let rot = ConeMap::new(g, sq.clone(), sq.clone());
        assert!(is_order_iso(&rot).unwrap());

        // xy-halving is positive but its inverse is not
        let mut half = Matrix::identity(3);
        half[(0, 0)] = Q::ratio(1, 2);
        half[(1, 1)] = Q::ratio(1, 2);
        let halving = ConeMap::new(half, sq.clone(), sq);
        assert!(!is_order_iso(&halving).unwrap());
    }

    #[test]
    fn pentagon_dual_cone_matches_the_polar_formula() {
        // the polar of the regular n-gon cone has its rays at the primal
        // vertex angles for odd n, scaled by the reciprocal inradius
        use crate::scalar::Approx;
        use crate::space::{make_model, ModelKind};
        let p5: crate::space::StateSpace<Approx> =
            make_model(&ModelKind::Polygon(5)).unwrap();
        let d = dual_cone(&p5.cone).unwrap();
        assert_eq!(d.generators.len(), 5);
        let radius = 1.0 / (std::f64::consts::PI / 5.0).cos();
        for k in 0..5 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
            let expected: Vector<Approx> = Vector::new(vec![
                Approx::new(radius * theta.cos()),
                Approx::new(radius * theta.sin()),
                Approx::new(1.0),
            ]);
            assert!(
                d.generators.iter().any(|g| {
                    // compare at unit height
                    let scaled = g.scale(&g[2].recip());
                    scaled.approx_eq(&expected)
                }),
                "missing dual ray at angle {theta}"
            );
        }
    }

    #[test]
    fn positive_map_preserves_membership() {
        let sq = square_cone();
        let g = Matrix::from_int_rows(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let inside = Vector::new(vec![Q::ratio(1, 3), Q::ratio(1, 3), Q::from_int(1)]);
        assert!(sq.member(&inside).unwrap().is_inside());
        assert!(sq.member(&g.mul_vec(&inside)).unwrap().is_inside());
    }
}
