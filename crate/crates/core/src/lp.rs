//! Exact feasibility and optimization by dense simplex with Bland's rule.
//!
//! On the rational backend every pivot is exact, so feasibility answers and
//! Farkas certificates are bit-exact; the float backend runs the identical
//! algorithm with tolerance-based sign tests.

use crate::linalg::{Matrix, Vector};
use crate::scalar::{Scalar, Sign};

#[derive(Debug, Clone)]
pub enum LpOutcome<S: Scalar> {
    Optimal { x: Vector<S>, objective: S },
    /// `farkas` is a row vector y with `y·A_j <= 0` for every column and
    /// `y·b > 0`, certifying that `Ax = b, x >= 0` has no solution.
    Infeasible { farkas: Vector<S> },
    Unbounded,
}

struct Tableau<S: Scalar> {
    // m rows of structural + artificial columns, then rhs
    t: Matrix<S>,
    obj: Vector<S>, // reduced costs over all columns, last entry = -value
    basis: Vec<usize>,
    n_struct: usize,
    m: usize,
}

impl<S: Scalar> Tableau<S> {
    fn cols(&self) -> usize {
        self.n_struct + self.m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.cols() + 1;
        let inv = self.t[(row, col)].recip();
        for j in 0..width {
            self.t[(row, j)] = self.t[(row, j)].clone() * inv.clone();
        }
        for r in 0..self.m {
            if r != row && !self.t[(r, col)].is_zero() {
                let factor = self.t[(r, col)].clone();
                for j in 0..width {
                    let sub = self.t[(row, j)].clone();
                    self.t[(r, j)].sub_assign_mul(&factor, &sub);
                }
            }
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            for j in 0..width {
                let sub = self.t[(row, j)].clone();
                self.obj[j].sub_assign_mul(&factor, &sub);
            }
        }
        self.basis[row] = col;
    }

    /// Run simplex to optimality with Bland's rule. `enter_limit` bounds the
    /// set of columns allowed to enter (excludes artificials in phase two).
    /// Returns false if unbounded.
    fn optimize(&mut self, enter_limit: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..enter_limit {
                if self.obj[j].sign() == Sign::Negative {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return true };
            // ratio test; Bland tie-break on the leaving basic variable index
            let rhs_col = self.cols();
            let mut leave: Option<(usize, S)> = None; // (row, ratio)
            for r in 0..self.m {
                if self.t[(r, col)].sign() != Sign::Positive {
                    continue;
                }
                let ratio = self.t[(r, rhs_col)].clone() / self.t[(r, col)].clone();
                match &leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let diff = ratio.clone() - lratio.clone();
                        if diff.sign() == Sign::Negative
                            || (diff.sign() == Sign::Zero && self.basis[r] < self.basis[*lr])
                        {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
            let Some((row, _)) = leave else { return false };
            self.pivot(row, col);
        }
    }
}

/// Minimize `c·x` subject to `A x = b`, `x >= 0`.
pub fn solve_standard<S: Scalar>(a: &Matrix<S>, b: &Vector<S>, c: &Vector<S>) -> LpOutcome<S> {
    let m = a.rows;
    let n = a.cols;
    assert_eq!(b.dim(), m);
    assert_eq!(c.dim(), n);

    // orient rows so the rhs is nonnegative
    let mut flipped = vec![false; m];
    let mut t = Matrix::zeros(m, n + m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        flipped[i] = flip;
        for j in 0..n {
            let v = a[(i, j)].clone();
            t[(i, j)] = if flip { -v } else { v };
        }
        t[(i, n + i)] = S::one();
        t[(i, n + m)] = if flip { -b[i].clone() } else { b[i].clone() };
    }

    // phase-one objective: minimize the sum of artificials
    let mut obj = Vector::zeros(n + m + 1);
    for j in 0..n + m + 1 {
        if j >= n && j < n + m {
            continue; // reduced cost of basic artificials is zero
        }
        let mut acc = S::zero();
        for i in 0..m {
            acc = acc + t[(i, j)].clone();
        }
        obj[j] = -acc;
    }

    let mut tab = Tableau {
        t,
        obj,
        basis: (n..n + m).collect(),
        n_struct: n,
        m,
    };
    let bounded = tab.optimize(n + m);
    debug_assert!(bounded, "phase one is bounded below by zero");

    let rhs_col = tab.cols();
    let value = -tab.obj[rhs_col].clone();
    if value.sign() == Sign::Positive {
        // infeasible; recover the Farkas row from the artificial reduced costs
        let mut farkas = Vector::zeros(m);
        for i in 0..m {
            let y = S::one() - tab.obj[n + i].clone();
            farkas[i] = if flipped[i] { -y } else { y };
        }
        return LpOutcome::Infeasible { farkas };
    }

    // drive any basic artificial out or recognize its row as redundant
    for r in 0..m {
        if tab.basis[r] >= n {
            let mut col = None;
            for j in 0..n {
                if !tab.t[(r, j)].is_zero() {
                    col = Some(j);
                    break;
                }
            }
            if let Some(j) = col {
                tab.pivot(r, j);
            }
        }
    }

    // phase-two objective from c
    let mut obj = Vector::zeros(n + m + 1);
    for j in 0..n + m + 1 {
        let mut acc = if j < n { c[j].clone() } else { S::zero() };
        for r in 0..m {
            let bi = tab.basis[r];
            if bi < n {
                acc.sub_assign_mul(&c[bi], &tab.t[(r, j)]);
            }
        }
        obj[j] = acc;
    }
    // zero out reduced costs of the basis exactly
    for r in 0..m {
        obj[tab.basis[r]] = S::zero();
    }
    obj[rhs_col] = {
        let mut acc = S::zero();
        for r in 0..m {
            let bi = tab.basis[r];
            if bi < n {
                acc.add_assign_mul(&c[bi], &tab.t[(r, rhs_col)]);
            }
        }
        -acc
    };
    tab.obj = obj;

    if !tab.optimize(n) {
        return LpOutcome::Unbounded;
    }

    let mut x = Vector::zeros(n);
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[(r, rhs_col)].clone();
        }
    }
    let objective = -tab.obj[rhs_col].clone();
    LpOutcome::Optimal { x, objective }
}

/// Express `target` as a nonnegative combination of `cols`.
/// `Ok` carries the coefficients; `Err` carries a functional `h` with
/// `h·col >= 0` for every column and `h·target < 0`.
pub fn nonneg_combination<S: Scalar>(
    cols: &[Vector<S>],
    target: &Vector<S>,
) -> std::result::Result<Vec<S>, Vector<S>> {
    let dim = target.dim();
    let a = Matrix::from_cols(cols.to_vec());
    let a = if cols.is_empty() {
        Matrix::zeros(dim, 0)
    } else {
        a
    };
    let c = Vector::zeros(cols.len());
    match solve_standard(&a, target, &c) {
        LpOutcome::Optimal { x, .. } => Ok(x.0),
        LpOutcome::Infeasible { farkas } => Err(-&farkas),
        LpOutcome::Unbounded => unreachable!("feasibility problem cannot be unbounded"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// Small modeling layer over [`solve_standard`]: free or nonnegative
/// variables, inequality rows, maximize or minimize.
pub struct LpBuilder<S> {
    free: Vec<bool>,
    rows: Vec<(Vec<(usize, S)>, Cmp, S)>,
    objective: Vec<(usize, S)>,
    maximize: bool,
}

#[derive(Debug, Clone)]
pub enum BuilderOutcome<S> {
    Optimal { x: Vec<S>, objective: S },
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LpBuilder<S> {
    pub fn new() -> Self {
        LpBuilder {
            free: Vec::new(),
            rows: Vec::new(),
            objective: Vec::new(),
            maximize: false,
        }
    }

    pub fn add_var(&mut self, free: bool) -> usize {
        self.free.push(free);
        self.free.len() - 1
    }

    pub fn add_vars(&mut self, count: usize, free: bool) -> Vec<usize> {
        (0..count).map(|_| self.add_var(free)).collect()
    }

    pub fn constrain(&mut self, terms: Vec<(usize, S)>, cmp: Cmp, rhs: S) {
        self.rows.push((terms, cmp, rhs));
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, S)>, maximize: bool) {
        self.objective = terms;
        self.maximize = maximize;
    }

    pub fn solve(&self) -> BuilderOutcome<S> {
        // column layout: for each variable one column (nonneg) or two (free +/-),
        // then one slack column per inequality row
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::new();
        let mut ncols = 0;
        for &is_free in &self.free {
            if is_free {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let n_ineq = self
            .rows
            .iter()
            .filter(|(_, cmp, _)| *cmp != Cmp::Eq)
            .count();
        let total = ncols + n_ineq;

        let m = self.rows.len();
        let mut a: Matrix<S> = Matrix::zeros(m, total);
        let mut b: Vector<S> = Vector::zeros(m);
        let mut slack = ncols;
        for (i, (terms, cmp, rhs)) in self.rows.iter().enumerate() {
            for (var, coef) in terms {
                let (pos, neg) = col_of[*var];
                a[(i, pos)] = a[(i, pos)].clone() + coef.clone();
                if let Some(neg) = neg {
                    a[(i, neg)] = a[(i, neg)].clone() - coef.clone();
                }
            }
            match cmp {
                Cmp::Le => {
                    a[(i, slack)] = S::one();
                    slack += 1;
                }
                Cmp::Ge => {
                    a[(i, slack)] = -S::one();
                    slack += 1;
                }
                Cmp::Eq => {}
            }
            b[i] = rhs.clone();
        }

        let mut c: Vector<S> = Vector::zeros(total);
        for (var, coef) in &self.objective {
            let signed = if self.maximize {
                -coef.clone()
            } else {
                coef.clone()
            };
            let (pos, neg) = col_of[*var];
            c[pos] = c[pos].clone() + signed.clone();
            if let Some(neg) = neg {
                c[neg] = c[neg].clone() - signed;
            }
        }

        match solve_standard(&a, &b, &c) {
            LpOutcome::Optimal { x, objective } => {
                let values = col_of
                    .iter()
                    .map(|&(pos, neg)| match neg {
                        Some(neg) => x[pos].clone() - x[neg].clone(),
                        None => x[pos].clone(),
                    })
                    .collect();
                let objective = if self.maximize { -objective } else { objective };
                BuilderOutcome::Optimal {
                    x: values,
                    objective,
                }
            }
            LpOutcome::Infeasible { .. } => BuilderOutcome::Infeasible,
            LpOutcome::Unbounded => BuilderOutcome::Unbounded,
        }
    }
}

impl<S: Scalar> Default for LpBuilder<S> {
    fn default() -> Self {
        Self::new()
    }
}
