//! Shared test oracles, deliberately independent of the implementation
//! paths they cross-check: facet enumeration by Fourier-Motzkin elimination
//! (vs. double description) and a direct linear-programming decision of the
//! teleportation-protocol definition (vs. the order-isomorphism classifier).

#![allow(dead_code)]

use gptt_core::linalg::{Matrix, Vector};
use gptt_core::lp::{nonneg_combination, BuilderOutcome, Cmp, LpBuilder};
use gptt_core::scalar::Scalar;
use gptt_core::space::StateSpace;
use gptt_core::teleport::ProtocolClass;

/// Facets of the cone generated by `gens`, by Fourier-Motzkin elimination
/// of the combination multipliers from `{(λ, v) : v = Gλ, λ >= 0}`.
pub fn fm_facets<S: Scalar>(gens: &[Vector<S>], dim: usize) -> Vec<Vector<S>> {
    let k = gens.len();
    // inequality rows over (λ_free..., v...) after solving the equalities
    // v = G λ for pivot multipliers: start from λ_i >= 0 expressed in the
    // full (λ, v) space and substitute.
    // Build the equality system E [λ; v] = 0 with E = [G | -I].
    let mut eq = Matrix::<S>::zeros(dim, k + dim);
    for (j, g) in gens.iter().enumerate() {
        for i in 0..dim {
            eq[(i, j)] = g[i].clone();
        }
    }
    for i in 0..dim {
        eq[(i, k + i)] = -S::one();
    }
    let (red, pivots) = eq.rref();
    // inequality rows: λ_i >= 0 for each multiplier, substituting pivot
    // variables by their expressions in the free ones
    let free: Vec<usize> = (0..k + dim).filter(|c| !pivots.contains(c)).collect();
    let col_of_free = |c: usize| free.iter().position(|&f| f == c).unwrap();
    let mut rows: Vec<Vector<S>> = Vec::new();
    for i in 0..k {
        let mut row = Vector::zeros(free.len());
        if let Some(prow) = pivots.iter().position(|&p| p == i) {
            // λ_i = -Σ red[prow][f] x_f over free f
            for &f in &free {
                row[col_of_free(f)] = -red[(prow, f)].clone();
            }
        } else {
            row[col_of_free(i)] = S::one();
        }
        rows.push(row);
    }
    // eliminate the free multiplier coordinates, keeping only v-coordinates;
    // rows carry their set of original ancestors so Chernikov's rule can
    // discard provably redundant combinations (|ancestors| > eliminated + 1)
    let mut eliminate: Vec<usize> = free
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f < k)
        .map(|(idx, _)| idx)
        .collect();
    let keep: Vec<usize> = free
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f >= k)
        .map(|(idx, _)| idx)
        .collect();
    let mut system: Vec<(Vector<S>, std::collections::BTreeSet<usize>)> = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| (r, std::collections::BTreeSet::from([i])))
        .collect();
    let mut eliminated = 0usize;
    while !eliminate.is_empty() {
        // greedy: pick the variable minimizing the product |P| |N|
        let (pick, _) = eliminate
            .iter()
            .enumerate()
            .map(|(pos, &var)| {
                let p = system.iter().filter(|(r, _)| r[var].is_positive()).count();
                let n = system.iter().filter(|(r, _)| r[var].is_negative()).count();
                (pos, p * n + p + n)
            })
            .min_by_key(|&(_, cost)| cost)
            .unwrap();
        let var = eliminate.remove(pick);
        eliminated += 1;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for row in system {
            match row.0[var].sign() {
                gptt_core::scalar::Sign::Positive => pos.push(row),
                gptt_core::scalar::Sign::Negative => neg.push(row),
                gptt_core::scalar::Sign::Zero => zero.push(row),
            }
        }
        let mut next = zero;
        for (p, pa) in &pos {
            for (q, qa) in &neg {
                let ancestors: std::collections::BTreeSet<usize> =
                    pa.union(qa).copied().collect();
                if ancestors.len() > eliminated + 1 {
                    continue; // Chernikov: provably redundant
                }
                // p[var] q - q[var] p cancels var with positive multipliers
                let combined = &q.scale(&p[var]) - &p.scale(&q[var]);
                let canon = combined.canonical_ray();
                if !canon.is_zero()
                    && !next.iter().any(|(r, _): &(Vector<S>, _)| r.approx_eq(&canon))
                {
                    next.push((canon, ancestors));
                }
            }
        }
        system = next;
    }
    let system: Vec<Vector<S>> = system.into_iter().map(|(r, _)| r).collect();
    // project to the v coordinates and reduce to a minimal facet list
    let mut facets: Vec<Vector<S>> = Vec::new();
    for row in system {
        let v = Vector::new(keep.iter().map(|&c| row[c].clone()).collect()).canonical_ray();
        if !v.is_zero() && !facets.iter().any(|f| f.approx_eq(&v)) {
            facets.push(v);
        }
    }
    // drop facets that are conic combinations of the others
    let mut i = 0;
    while i < facets.len() {
        let candidate = facets[i].clone();
        let others: Vec<Vector<S>> = facets
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, f)| f.clone())
            .collect();
        if nonneg_combination(&others, &candidate).is_ok() {
            facets.remove(i);
        } else {
            i += 1;
        }
    }
    facets
}

/// Decide the protocol class directly from the definition: a correction
/// `τ` is a positive norm-contractive map with `τ μ(v) = s η(v)` on the
/// vertices for a single constant `s`; the protocol is conclusive iff the
/// best such `s` is positive, and strong iff `s` can be pinned to the
/// common vertex norm of `μ`.
pub fn brute_force_class<S: Scalar>(
    a1: &StateSpace<S>,
    b: &StateSpace<S>,
    mu: &Matrix<S>,
    eta: &Matrix<S>,
) -> ProtocolClass {
    let best = solve_correction_lp(a1, b, mu, eta, None);
    let conclusive = match best {
        Some(s) => s.is_positive(),
        None => false,
    };
    if !conclusive {
        return ProtocolClass::NotTp;
    }
    // strong: the vertex norms must already be constant, pinned as s
    let norms: Vec<S> = a1
        .omega_vertices
        .iter()
        .map(|v| b.unit.dot(&mu.mul_vec(v)))
        .collect();
    let k = norms[0].clone();
    if norms.iter().all(|t| t.approx_eq(&k))
        && k.is_positive()
        && solve_correction_lp(a1, b, mu, eta, Some(k)).is_some()
    {
        ProtocolClass::Strong
    } else {
        ProtocolClass::Conclusive
    }
}

/// Maximize `s` over positive contractive `τ` with `τ μ(v) = s η(v)`;
/// `pin` fixes `s` instead and reports feasibility. Returns the optimal
/// (or pinned) `s`, or `None` if infeasible.
fn solve_correction_lp<S: Scalar>(
    a1: &StateSpace<S>,
    b: &StateSpace<S>,
    mu: &Matrix<S>,
    eta: &Matrix<S>,
    pin: Option<S>,
) -> Option<S> {
    let n = b.dim;
    let mut lp: LpBuilder<S> = LpBuilder::new();
    let tau: Vec<usize> = lp.add_vars(n * n, true);
    let s = lp.add_var(false);
    if let Some(value) = &pin {
        lp.constrain(vec![(s, S::one())], Cmp::Eq, value.clone());
    }
    // τ μ(v) - s η(v) = 0 per vertex and output coordinate
    for v in &a1.omega_vertices {
        let mv = mu.mul_vec(v);
        let ev = eta.mul_vec(v);
        for i in 0..n {
            let mut terms: Vec<(usize, S)> = Vec::new();
            for j in 0..n {
                if !mv[j].is_zero() {
                    terms.push((tau[i * n + j], mv[j].clone()));
                }
            }
            terms.push((s, -ev[i].clone()));
            lp.constrain(terms, Cmp::Eq, S::zero());
        }
    }
    // positivity: h · (τ w) >= 0 for cone generators w and facets h
    for w in &b.cone.generators {
        for h in &b.dual.generators {
            let mut terms: Vec<(usize, S)> = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let coef = h[i].clone() * w[j].clone();
                    if !coef.is_zero() {
                        terms.push((tau[i * n + j], coef));
                    }
                }
            }
            lp.constrain(terms, Cmp::Ge, S::zero());
        }
    }
    // contractivity: u(τ w) <= 1 on vertices
    for w in &b.omega_vertices {
        let mut terms: Vec<(usize, S)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let coef = b.unit[i].clone() * w[j].clone();
                if !coef.is_zero() {
                    terms.push((tau[i * n + j], coef));
                }
            }
        }
        lp.constrain(terms, Cmp::Le, S::one());
    }
    lp.set_objective(vec![(s, S::one())], true);
    match lp.solve() {
        BuilderOutcome::Optimal { x, .. } => Some(x[n * n].clone()),
        _ => None,
    }
}

/// Deterministic rational pseudo-random helpers for seeded case generation.
pub struct CaseRng(pub rand_chacha::ChaCha8Rng);

impl CaseRng {
    pub fn new(seed: u64) -> Self {
        use rand::SeedableRng;
        CaseRng(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn small_ratio<S: Scalar>(&mut self, lo: i64, hi: i64) -> S {
        use rand::Rng;
        S::ratio(self.0.gen_range(lo..=hi), self.0.gen_range(1..=4))
    }

    pub fn index(&mut self, len: usize) -> usize {
        use rand::Rng;
        self.0.gen_range(0..len)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        use rand::Rng;
        self.0.gen_bool(p)
    }

    /// A random normalized interior state: positive mixture of vertices.
    pub fn state<S: Scalar>(&mut self, space: &StateSpace<S>) -> Vector<S> {
        let mut acc = Vector::zeros(space.dim);
        let mut total = S::zero();
        for v in &space.omega_vertices {
            let w: S = self.small_ratio(1, 4);
            total = total + w.clone();
            acc = &acc + &v.scale(&w);
        }
        acc.scale(&total.recip())
    }

    /// A random subnormalized effect: scaled mixture of dual generators.
    pub fn effect<S: Scalar>(&mut self, space: &StateSpace<S>) -> Vector<S> {
        let mut acc = Vector::zeros(space.dim);
        for h in &space.dual.generators {
            if self.chance(0.7) {
                let w: S = self.small_ratio(0, 3);
                acc = &acc + &h.scale(&w);
            }
        }
        // scale below the unit
        let mut peak = S::zero();
        for v in &space.omega_vertices {
            let val = acc.dot(v);
            if (val.clone() - peak.clone()).is_positive() {
                peak = val;
            }
        }
        if peak.is_positive() && (peak.clone() - S::one()).is_positive() {
            acc = acc.scale(&peak.recip());
        }
        acc
    }

    /// A random positive map `A -> B*`-style built from rank-one pieces
    /// `d h(·)` with `h` in the domain's dual cone and `d` in the target
    /// generator list.
    pub fn positive_map<S: Scalar>(
        &mut self,
        domain_dual: &[Vector<S>],
        target: &[Vector<S>],
        terms: usize,
    ) -> Matrix<S> {
        let rows = target[0].dim();
        let cols = domain_dual[0].dim();
        let mut m: Matrix<S> = Matrix::zeros(rows, cols);
        for _ in 0..terms {
            let h = &domain_dual[self.index(domain_dual.len())];
            let d = &target[self.index(target.len())];
            let c: S = self.small_ratio(0, 3);
            for i in 0..rows {
                for j in 0..cols {
                    let add = d[i].clone() * h[j].clone() * c.clone();
                    m[(i, j)] = m[(i, j)].clone() + add;
                }
            }
        }
        m
    }
}
