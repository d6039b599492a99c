//! Exact rational LP solver over bounded variables.
//!
//! Bounded-variable primal simplex on a dense tableau: Dantzig pricing, with
//! Bland's rule after degenerate pivots. Every optimal answer is a basic
//! feasible solution, i.e. a vertex of the feasible polyhedron, and comes with
//! enough basis information to re-certify both vertex-ness and optimality
//! against the original problem data ([`BasicSolution::verify`]).
//!
//! Problems are `min c·x` subject to rows `a·x ≥ b` and per-variable bounds
//! `l ≤ x ≤ u` with finite `l` and possibly infinite `u`. Equalities on single
//! variables are expressed as `l = u`; such fixed variables never enter the
//! tableau.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{dot, Rational};

/// Sparse `Σ coeff·x_j ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        Self { coeffs, rhs }
    }

    pub fn activity(&self, x: &[Rational]) -> Rational {
        dot(self.coeffs.iter().map(|(j, a)| (a, &x[*j])))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub lower: Vec<Rational>,
    /// `None` is `+∞`.
    pub upper: Vec<Option<Rational>>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("problem is not a row extension of the previous solve")]
    NotAnExtension,
}

impl LpProblem {
    /// `n` variables in `[0, ∞)` with zero objective and no rows.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![Rational::zero(); n],
            lower: vec![Rational::zero(); n],
            upper: vec![None; n],
            rows: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, j: usize, lower: Rational, upper: Option<Rational>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn add_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn is_fixed(&self, j: usize) -> bool {
        self.upper[j].as_ref() == Some(&self.lower[j])
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.var_count();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed(
                "bound vectors differ in length from objective".into(),
            ));
        }
        for j in 0..n {
            if let Some(u) = &self.upper[j] {
                if u < &self.lower[j] {
                    return Err(LpError::Malformed(format!(
                        "variable {j} has lower > upper"
                    )));
                }
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::Malformed(format!(
                    "row {i} references variable {j}"
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(self.objective.iter().zip(x))
    }

    /// Exact check of all rows and bounds.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.var_count()
            && (0..x.len())
                .all(|j| x[j] >= self.lower[j] && self.upper[j].as_ref().is_none_or(|u| &x[j] <= u))
            && self.rows.iter().all(|r| r.activity(x) >= r.rhs)
    }

    /// Rank of the constraint system tight at `x` (rows at equality plus
    /// variables at a bound). `x` is a vertex iff this equals the variable count.
    pub fn tight_rank(&self, x: &[Rational]) -> usize {
        let n = self.var_count();
        let mut system: Vec<Vec<Rational>> = Vec::new();
        for j in 0..n {
            let at_bound = x[j] == self.lower[j] || self.upper[j].as_ref() == Some(&x[j]);
            if at_bound {
                let mut unit = vec![Rational::zero(); n];
                unit[j] = Rational::from_integer(1.into());
                system.push(unit);
            }
        }
        for row in &self.rows {
            if row.activity(x) == row.rhs {
                let mut dense = vec![Rational::zero(); n];
                for (j, a) in &row.coeffs {
                    dense[*j] += a;
                }
                system.push(dense);
            }
        }
        // Rank mod p never exceeds the rank over Q, so full rank mod p settles it.
        if modular_rank(&system, n) == n {
            return n;
        }
        rank(system, n)
    }
}

const RANK_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(RANK_PRIME)) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

/// Rank over `Z/p` of the image of `m` under `a/b ↦ a·b⁻¹ mod p`. Never
/// exceeds the rational rank; `0` if some denominator is divisible by `p`.
fn modular_rank(m: &[Vec<Rational>], cols: usize) -> usize {
    let reduce = |v: &BigInt| -> u64 {
        match v.to_i64() {
            Some(x) => x.rem_euclid(RANK_PRIME as i64) as u64,
            None => v
                .mod_floor(&BigInt::from(RANK_PRIME))
                .to_u64()
                .expect("reduced below p"),
        }
    };
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(m.len());
    for row in m {
        let mut out = Vec::with_capacity(row.len());
        for v in row {
            let num = reduce(v.numer());
            if v.denom().is_one() {
                out.push(num);
                continue;
            }
            let den = reduce(v.denom());
            if den == 0 {
                return 0;
            }
            out.push(mul_mod(num, pow_mod(den, RANK_PRIME - 2)));
        }
        rows.push(out);
    }
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = pow_mod(rows[r][c], RANK_PRIME - 2);
        for i in r + 1..rows.len() {
            if rows[i][c] != 0 {
                let f = mul_mod(rows[i][c], inv);
                for k in c..cols {
                    let sub = mul_mod(f, rows[r][k]);
                    rows[i][k] = (rows[i][k] + RANK_PRIME - sub) % RANK_PRIME;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Gaussian-elimination rank over the rationals.
pub fn rank(mut m: Vec<Vec<Rational>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for k in c..cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// Basis of a returned vertex. For rows, `AtLower` means the surplus variable
/// is nonbasic at zero, so the row is tight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub structural: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
    /// Rows found linearly dependent on the others during phase 1.
    pub redundant_rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    pub basis: Basis,
    pub pivots: usize,
}

/// Nonnegative row multipliers `π` with `max_{l≤x≤u} πᵀAx < πᵀb`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

/// Feasible `origin` and direction with `c·direction < 0` along which the
/// problem stays feasible forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundedRay {
    pub origin: Vec<Rational>,
    pub direction: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(BasicSolution),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpOutcome {
    pub fn optimal(self) -> Option<BasicSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Optimal vertex of `p`, or an infeasibility/unboundedness certificate.
/// All certificates are re-checked against `p` before returning.
pub fn solve_vertex(p: &LpProblem) -> Result<LpOutcome, LpError> {
    p.validate()?;
    let outcome = Simplex::new(p).run()?;
    match &outcome {
        LpOutcome::Optimal(sol) => sol.verify(p)?,
        LpOutcome::Infeasible(cert) => cert.verify(p)?,
        LpOutcome::Unbounded(ray) => ray.verify(p)?,
    }
    Ok(outcome)
}

/// Re-solve after rows were appended to the problem `prev` was computed for.
/// If `prev` already satisfies every new row it is returned with the new rows'
/// surplus variables made basic; otherwise the extended problem is solved again.
pub fn resolve_with_new_rows(prev: &BasicSolution, p: &LpProblem) -> Result<LpOutcome, LpError> {
    p.validate()?;
    let old_rows = prev.basis.rows.len();
    if p.rows.len() < old_rows || prev.x.len() != p.var_count() {
        return Err(LpError::NotAnExtension);
    }
    if p.rows[old_rows..]
        .iter()
        .all(|r| r.activity(&prev.x) >= r.rhs)
    {
        let mut sol = prev.clone();
        sol.basis.rows.resize(p.rows.len(), VarStatus::Basic);
        sol.pivots = 0;
        sol.verify(p)?;
        return Ok(LpOutcome::Optimal(sol));
    }
    solve_vertex(p)
}

impl BasicSolution {
    /// Independent certification against `p`: exact feasibility, full-rank
    /// tight system, and dual feasibility of the basis.
    pub fn verify(&self, p: &LpProblem) -> Result<(), LpError> {
        let n = p.var_count();
        if !p.is_feasible(&self.x) {
            return Err(LpError::Certificate(
                "solution violates a row or bound".into(),
            ));
        }
        if p.objective_value(&self.x) != self.objective {
            return Err(LpError::Certificate("objective value mismatch".into()));
        }
        if p.tight_rank(&self.x) != n {
            return Err(LpError::Certificate(
                "tight constraints are not of full column rank".into(),
            ));
        }
        self.verify_dual(p)
    }

    fn verify_dual(&self, p: &LpProblem) -> Result<(), LpError> {
        let n = p.var_count();
        let fail = |m: &str| Err(LpError::Certificate(m.to_string()));
        for j in 0..n {
            let ok = match self.basis.structural[j] {
                VarStatus::AtLower => self.x[j] == p.lower[j],
                VarStatus::AtUpper => p.upper[j].as_ref() == Some(&self.x[j]),
                VarStatus::Basic => true,
            };
            if !ok {
                return fail("basis status disagrees with solution");
            }
        }
        // Rows whose surplus is nonbasic carry the duals; redundant rows get zero.
        let dual_rows: Vec<usize> = (0..p.rows.len())
            .filter(|i| {
                self.basis.rows[*i] != VarStatus::Basic && !self.basis.redundant_rows.contains(i)
            })
            .collect();
        for &i in &dual_rows {
            if p.rows[i].activity(&self.x) != p.rows[i].rhs {
                return fail("row marked tight is slack");
            }
        }
        let basic: Vec<usize> = (0..n)
            .filter(|&j| self.basis.structural[j] == VarStatus::Basic && !p.is_fixed(j))
            .collect();
        if basic.len() != dual_rows.len() {
            return fail("basis is not square");
        }
        let mut column_of = vec![Vec::new(); n];
        for (k, &i) in dual_rows.iter().enumerate() {
            for (j, a) in &p.rows[i].coeffs {
                column_of[*j].push((k, a.clone()));
            }
        }
        // Solve Σ_k a_{i_k j} π_k = c_j for every basic structural j.
        let m = dual_rows.len();
        let mut system: Vec<Vec<Rational>> = basic
            .iter()
            .map(|&j| {
                let mut eq = vec![Rational::zero(); m + 1];
                for (k, a) in &column_of[j] {
                    eq[*k] += a;
                }
                eq[m] = p.objective[j].clone();
                eq
            })
            .collect();
        let Some(pi) = solve_square(&mut system, m) else {
            return fail("basis matrix is singular");
        };
        if pi.iter().any(|v| v.is_negative()) {
            return fail("negative dual on a >= row");
        }
        for j in 0..n {
            if p.is_fixed(j) {
                continue;
            }
            let reduced = column_of[j]
                .iter()
                .fold(p.objective[j].clone(), |acc, (k, a)| acc - a * &pi[*k]);
            let ok = match self.basis.structural[j] {
                VarStatus::Basic => reduced.is_zero(),
                VarStatus::AtLower => !reduced.is_negative(),
                VarStatus::AtUpper => !reduced.is_positive(),
            };
            if !ok {
                return fail("reduced cost has the wrong sign");
            }
        }
        Ok(())
    }
}

/// Solves a square system given as augmented rows; `None` if singular.
fn solve_square(m: &mut [Vec<Rational>], n: usize) -> Option<Vec<Rational>> {
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pivot = m[c][c].clone();
        for k in c..=n {
            m[c][k] = &m[c][k] / &pivot;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=n {
                    let delta = &f * &m[c][k];
                    m[i][k] -= delta;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

impl FarkasCertificate {
    pub fn verify(&self, p: &LpProblem) -> Result<(), LpError> {
        let fail = |m: &str| Err(LpError::Certificate(m.to_string()));
        if self.multipliers.len() != p.rows.len()
            || self.multipliers.iter().any(|v| v.is_negative())
        {
            return fail("Farkas multipliers must be nonnegative, one per row");
        }
        let mut combined = vec![Rational::zero(); p.var_count()];
        let mut rhs = Rational::zero();
        for (row, pi) in p.rows.iter().zip(&self.multipliers) {
            for (j, a) in &row.coeffs {
                combined[*j] += a * pi;
            }
            rhs += &row.rhs * pi;
        }
        let mut best = Rational::zero();
        for (j, c) in combined.iter().enumerate() {
            if c.is_positive() {
                match &p.upper[j] {
                    Some(u) => best += c * u,
                    None => return fail("combination is unbounded above"),
                }
            } else {
                best += c * &p.lower[j];
            }
        }
        if best < rhs {
            Ok(())
        } else {
            fail("combination does not separate")
        }
    }
}

impl UnboundedRay {
    pub fn verify(&self, p: &LpProblem) -> Result<(), LpError> {
        let fail = |m: &str| Err(LpError::Certificate(m.to_string()));
        if !p.is_feasible(&self.origin) {
            return fail("ray origin infeasible");
        }
        if !p.objective_value(&self.direction).is_negative() {
            return fail("ray does not improve the objective");
        }
        for (j, d) in self.direction.iter().enumerate() {
            if d.is_negative() || (d.is_positive() && p.upper[j].is_some()) {
                return fail("ray leaves the variable bounds");
            }
        }
        if p.rows
            .iter()
            .any(|r| r.activity(&self.direction).is_negative())
        {
            return fail("ray leaves a row");
        }
        Ok(())
    }
}

/// Tableau variable layout: free structurals, then one surplus per row, then
/// artificials.
struct Simplex<'a> {
    p: &'a LpProblem,
    /// tableau column -> structural index for the leading free columns.
    free: Vec<usize>,
    rows: usize,
    tab: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    value: Vec<Rational>,
    lower: Vec<Rational>,
    upper: Vec<Option<Rational>>,
    at_upper: Vec<bool>,
    artificial_row: Vec<Option<usize>>,
    reduced: Vec<Rational>,
    pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded { entering: usize, increasing: bool },
}

impl<'a> Simplex<'a> {
    fn new(p: &'a LpProblem) -> Self {
        let free: Vec<usize> = (0..p.var_count()).filter(|&j| !p.is_fixed(j)).collect();
        let mut col_of = vec![usize::MAX; p.var_count()];
        for (c, &j) in free.iter().enumerate() {
            col_of[j] = c;
        }
        let nf = free.len();
        let m = p.rows.len();
        // Crash start: a variable whose coefficients are all nonnegative starts
        // at its finite upper bound, every other one at its lower bound. Rows
        // still violated there get an artificial.
        let mut up = vec![true; p.var_count()];
        for r in &p.rows {
            for (j, a) in &r.coeffs {
                if a.is_negative() {
                    up[*j] = false;
                }
            }
        }
        let start: Vec<Rational> = (0..p.var_count())
            .map(|j| match &p.upper[j] {
                Some(u) if up[j] => u.clone(),
                _ => p.lower[j].clone(),
            })
            .collect();
        let residual: Vec<Rational> = p.rows.iter().map(|r| &r.rhs - r.activity(&start)).collect();
        let artificial_count = residual.iter().filter(|r| r.is_positive()).count();
        let width = nf + m + artificial_count;

        let mut lower = Vec::with_capacity(width);
        let mut upper = Vec::with_capacity(width);
        let mut value = Vec::with_capacity(width);
        let mut at_upper = vec![false; width];
        for (c, &j) in free.iter().enumerate() {
            lower.push(p.lower[j].clone());
            upper.push(p.upper[j].clone());
            value.push(start[j].clone());
            at_upper[c] = start[j] != p.lower[j];
        }
        for _ in 0..m + artificial_count {
            lower.push(Rational::zero());
            upper.push(None);
            value.push(Rational::zero());
        }

        let mut tab = vec![vec![Rational::zero(); width]; m];
        let mut basis = vec![0; m];
        let mut artificial_row = vec![None; width];
        let mut next_art = nf + m;
        for (i, row) in p.rows.iter().enumerate() {
            let slack = nf + i;
            if residual[i].is_positive() {
                for (j, a) in &row.coeffs {
                    if col_of[*j] != usize::MAX {
                        tab[i][col_of[*j]] += a;
                    }
                }
                tab[i][slack] = Rational::from_integer((-1).into());
                tab[i][next_art] = Rational::from_integer(1.into());
                basis[i] = next_art;
                value[next_art] = residual[i].clone();
                artificial_row[next_art] = Some(i);
                next_art += 1;
            } else {
                for (j, a) in &row.coeffs {
                    if col_of[*j] != usize::MAX {
                        tab[i][col_of[*j]] -= a;
                    }
                }
                tab[i][slack] = Rational::from_integer(1.into());
                basis[i] = slack;
                value[slack] = -residual[i].clone();
            }
        }
        Simplex {
            p,
            free,
            rows: m,
            tab,
            basis,
            value,
            lower,
            upper,
            at_upper,
            artificial_row,
            reduced: Vec::new(),
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.value.len()
    }

    fn is_artificial(&self, c: usize) -> bool {
        self.artificial_row[c].is_some()
    }

    fn is_basic(&self, c: usize) -> bool {
        self.basis.contains(&c)
    }

    fn price(&mut self, cost: &[Rational]) {
        let mut d = cost.to_vec();
        for i in 0..self.rows {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (c, a) in self.tab[i].iter().enumerate() {
                if !a.is_zero() {
                    d[c] -= cb * a;
                }
            }
        }
        self.reduced = d;
    }

    fn fixed(&self, c: usize) -> bool {
        self.upper[c].as_ref() == Some(&self.lower[c])
    }

    fn iterate(&mut self) -> PhaseEnd {
        // Dantzig pricing while pivots make progress; after a degenerate pivot,
        // Bland's rule until the next non-degenerate one, so no basis repeats.
        let mut bland = false;
        loop {
            let mut basic = vec![false; self.width()];
            for &b in &self.basis {
                basic[b] = true;
            }
            let improving = (0..self.width()).filter(|&c| {
                !basic[c]
                    && !self.fixed(c)
                    && if self.at_upper[c] {
                        self.reduced[c].is_positive()
                    } else {
                        self.reduced[c].is_negative()
                    }
            });
            let entering = if bland {
                improving.min()
            } else {
                improving.fold(None, |best: Option<usize>, c| match best {
                    Some(b) if self.reduced[b].abs() >= self.reduced[c].abs() => Some(b),
                    _ => Some(c),
                })
            };
            let Some(j) = entering else {
                return PhaseEnd::Optimal;
            };
            let increasing = !self.at_upper[j];

            // Ratio test; ties broken by lowest variable index.
            let mut best: Option<(Rational, usize, Option<usize>, bool)> = None;
            if let Some(u) = &self.upper[j] {
                best = Some((u - &self.lower[j], j, None, false));
            }
            for i in 0..self.rows {
                let a = &self.tab[i][j];
                if a.is_zero() {
                    continue;
                }
                let b = self.basis[i];
                // d(value_b)/dθ
                let rate = if increasing { -a.clone() } else { a.clone() };
                let (limit, hits_upper) = if rate.is_negative() {
                    ((&self.value[b] - &self.lower[b]) / -rate, false)
                } else {
                    match &self.upper[b] {
                        Some(u) => ((u - &self.value[b]) / rate, true),
                        None => continue,
                    }
                };
                let better = match &best {
                    None => true,
                    Some((t, idx, _, _)) => limit < *t || (limit == *t && b < *idx),
                };
                if better {
                    best = Some((limit, b, Some(i), hits_upper));
                }
            }
            let Some((theta, _, leave_row, hits_upper)) = best else {
                return PhaseEnd::Unbounded {
                    entering: j,
                    increasing,
                };
            };

            bland = theta.is_zero();
            if !theta.is_zero() {
                let step = if increasing {
                    theta.clone()
                } else {
                    -theta.clone()
                };
                self.value[j] += &step;
                for i in 0..self.rows {
                    let a = &self.tab[i][j];
                    if !a.is_zero() {
                        let b = self.basis[i];
                        self.value[b] -= a * &step;
                    }
                }
            }
            match leave_row {
                None => {
                    self.at_upper[j] = !self.at_upper[j];
                    self.value[j] = if self.at_upper[j] {
                        self.upper[j]
                            .clone()
                            .expect("flip needs a finite upper bound")
                    } else {
                        self.lower[j].clone()
                    };
                }
                Some(r) => {
                    let leaving = self.basis[r];
                    self.value[leaving] = if hits_upper {
                        self.upper[leaving].clone().expect("finite upper")
                    } else {
                        self.lower[leaving].clone()
                    };
                    self.at_upper[leaving] = hits_upper;
                    self.at_upper[j] = false;
                    self.pivot(r, j);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.pivots += 1;
        let piv = self.tab[r][j].clone();
        for a in self.tab[r].iter_mut() {
            if !a.is_zero() {
                *a /= &piv;
            }
        }
        let pivot_row = self.tab[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&c| !pivot_row[c].is_zero())
            .collect();
        for i in 0..self.rows {
            if i == r || self.tab[i][j].is_zero() {
                continue;
            }
            let f = self.tab[i][j].clone();
            for &c in &nz {
                let delta = &f * &pivot_row[c];
                self.tab[i][c] -= delta;
            }
        }
        if !self.reduced.is_empty() && !self.reduced[j].is_zero() {
            let f = self.reduced[j].clone();
            for &c in &nz {
                let delta = &f * &pivot_row[c];
                self.reduced[c] -= delta;
            }
        }
        self.basis[r] = j;
    }

    fn run(mut self) -> Result<LpOutcome, LpError> {
        let width = self.width();
        let nf = self.free.len();
        let m = self.rows;

        if (nf + m..width).next().is_some() {
            let phase1: Vec<Rational> = (0..width)
                .map(|c| {
                    if self.is_artificial(c) {
                        Rational::from_integer(1.into())
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            self.price(&phase1);
            match self.iterate() {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded { .. } => {
                    return Err(LpError::Certificate("phase 1 cannot be unbounded".into()))
                }
            }
            let infeasibility =
                (nf + m..width).fold(Rational::zero(), |acc, c| acc + &self.value[c]);
            if infeasibility.is_positive() {
                // Surplus reduced costs are the phase-1 row duals.
                let multipliers = (0..m).map(|i| self.reduced[nf + i].clone()).collect();
                return Ok(LpOutcome::Infeasible(FarkasCertificate { multipliers }));
            }
            self.drive_out_artificials();
            for c in nf + m..width {
                self.upper[c] = Some(Rational::zero());
            }
        }

        let mut cost = vec![Rational::zero(); width];
        for (c, &j) in self.free.iter().enumerate() {
            cost[c] = self.p.objective[j].clone();
        }
        self.price(&cost);
        match self.iterate() {
            PhaseEnd::Optimal => Ok(LpOutcome::Optimal(self.extract())),
            PhaseEnd::Unbounded {
                entering,
                increasing,
            } => Ok(LpOutcome::Unbounded(self.ray(entering, increasing))),
        }
    }

    fn drive_out_artificials(&mut self) {
        let nf = self.free.len();
        let m = self.rows;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let candidate = (0..nf + m).find(|&c| !self.is_basic(c) && !self.tab[r][c].is_zero());
            if let Some(c) = candidate {
                let leaving = self.basis[r];
                self.at_upper[leaving] = false;
                self.pivot(r, c);
            }
        }
    }

    fn structural_values(&self) -> Vec<Rational> {
        let mut x = self.p.lower.clone();
        for (c, &j) in self.free.iter().enumerate() {
            x[j] = self.value[c].clone();
        }
        x
    }

    fn extract(&self) -> BasicSolution {
        let p = self.p;
        let nf = self.free.len();
        let x = self.structural_values();
        let mut structural = vec![VarStatus::AtLower; p.var_count()];
        let status = |c: usize| {
            if self.is_basic(c) {
                VarStatus::Basic
            } else if self.at_upper[c] {
                VarStatus::AtUpper
            } else {
                VarStatus::AtLower
            }
        };
        for (c, &j) in self.free.iter().enumerate() {
            structural[j] = status(c);
        }
        let rows = (0..self.rows).map(|i| status(nf + i)).collect();
        let redundant_rows = self
            .basis
            .iter()
            .filter_map(|&b| self.artificial_row[b])
            .collect();
        BasicSolution {
            objective: p.objective_value(&x),
            x,
            basis: Basis {
                structural,
                rows,
                redundant_rows,
            },
            pivots: self.pivots,
        }
    }

    fn ray(&self, entering: usize, increasing: bool) -> UnboundedRay {
        let sign = |v: Rational| if increasing { v } else { -v };
        let mut dir_cols = vec![Rational::zero(); self.width()];
        dir_cols[entering] = sign(Rational::from_integer(1.into()));
        for i in 0..self.rows {
            dir_cols[self.basis[i]] = sign(-self.tab[i][entering].clone());
        }
        let mut direction = vec![Rational::zero(); self.p.var_count()];
        for (c, &j) in self.free.iter().enumerate() {
            direction[j] = dir_cols[c].clone();
        }
        UnboundedRay {
            origin: self.structural_values(),
            direction,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn row(coeffs: &[(usize, i64)], rhs: i64) -> Row {
        Row::new(coeffs.iter().map(|&(j, a)| (j, int(a))).collect(), int(rhs))
    }

    #[test]
    fn single_variable_lower_row() {
        let mut p = LpProblem::new(1);
        p.objective[0] = int(1);
        p.set_bounds(0, int(0), Some(int(10)));
        p.add_row(row(&[(0, 1)], 3));
        let sol = solve_vertex(&p).unwrap().optimal().unwrap();
        assert_eq!(sol.x, vec![int(3)]);
        assert_eq!(sol.objective, int(3));
    }

    #[test]
    fn box_with_sum_row_lands_on_a_bound() {
        let mut p = LpProblem::new(2);
        p.objective = vec![int(1), int(1)];
        for j in 0..2 {
            p.set_bounds(j, int(0), Some(int(4)));
        }
        p.add_row(row(&[(0, 1), (1, 1)], 5));
        let sol = solve_vertex(&p).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, int(5));
        assert!(sol.x == vec![int(4), int(1)] || sol.x == vec![int(1), int(4)]);
    }

    #[test]
    fn unbounded_below() {
        let mut p = LpProblem::new(1);
        p.objective[0] = int(-1);
        match solve_vertex(&p).unwrap() {
            LpOutcome::Unbounded(ray) => assert_eq!(ray.direction, vec![int(1)]),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_on_fixed_variable() {
        let mut p = LpProblem::new(1);
        p.set_bounds(0, int(2), Some(int(2)));
        p.add_row(row(&[(0, 1)], 3));
        assert!(matches!(
            solve_vertex(&p).unwrap(),
            LpOutcome::Infeasible(_)
        ));
    }

    #[test]
    fn infeasible_pair() {
        let mut p = LpProblem::new(2);
        p.set_bounds(0, int(0), Some(int(1)));
        p.set_bounds(1, int(0), Some(int(1)));
        p.add_row(row(&[(0, 1), (1, 1)], 3));
        let LpOutcome::Infeasible(cert) = solve_vertex(&p).unwrap() else {
            panic!("expected infeasible")
        };
        cert.verify(&p).unwrap();
    }

    #[test]
    fn rejects_inverted_bounds() {
        let mut p = LpProblem::new(1);
        p.set_bounds(0, int(2), Some(int(1)));
        assert!(matches!(solve_vertex(&p), Err(LpError::Malformed(_))));
    }

    #[test]
    fn fractional_vertex() {
        // min x+y+z with pairwise sums >= 1: optimum (1/2,1/2,1/2).
        let mut p = LpProblem::new(3);
        p.objective = vec![int(1); 3];
        p.add_row(row(&[(0, 1), (1, 1)], 1));
        p.add_row(row(&[(1, 1), (2, 1)], 1));
        p.add_row(row(&[(0, 1), (2, 1)], 1));
        let sol = solve_vertex(&p).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, frac(3, 2));
        assert_eq!(sol.x, vec![frac(1, 2); 3]);
    }

    #[test]
    fn resolve_keeps_solution_when_new_row_is_slack() {
        let mut p = LpProblem::new(2);
        p.objective = vec![int(1), int(2)];
        p.set_bounds(0, int(0), Some(int(5)));
        p.set_bounds(1, int(0), Some(int(5)));
        p.add_row(row(&[(0, 1), (1, 1)], 2));
        let first = solve_vertex(&p).unwrap().optimal().unwrap();
        p.add_row(row(&[(0, 1)], 1));
        let again = resolve_with_new_rows(&first, &p)
            .unwrap()
            .optimal()
            .unwrap();
        assert_eq!(again.x, first.x);
        assert_eq!(again.pivots, 0);
    }

    #[test]
    fn resolve_with_violated_row_matches_scratch() {
        let mut p = LpProblem::new(2);
        p.objective = vec![int(1), int(2)];
        p.set_bounds(0, int(0), Some(int(5)));
        p.set_bounds(1, int(0), Some(int(5)));
        p.add_row(row(&[(0, 1), (1, 1)], 2));
        let first = solve_vertex(&p).unwrap().optimal().unwrap();
        p.add_row(row(&[(1, 1)], 1));
        let warm = resolve_with_new_rows(&first, &p)
            .unwrap()
            .optimal()
            .unwrap();
        let cold = solve_vertex(&p).unwrap().optimal().unwrap();
        assert_eq!(warm.objective, cold.objective);
        assert_eq!(warm.objective, int(3));
    }

    #[test]
    fn resolve_detects_infeasible_row() {
        let mut p = LpProblem::new(1);
        p.set_bounds(0, int(4), Some(int(4)));
        let first = solve_vertex(&p).unwrap().optimal().unwrap();
        p.add_row(row(&[(0, 1)], 5));
        assert!(matches!(
            resolve_with_new_rows(&first, &p).unwrap(),
            LpOutcome::Infeasible(_)
        ));
    }

    #[test]
    fn degenerate_redundant_rows() {
        // Duplicate tight rows force an artificial to stay basic at zero.
        let mut p = LpProblem::new(2);
        p.objective = vec![int(1), int(1)];
        p.set_bounds(0, int(0), Some(int(3)));
        p.set_bounds(1, int(0), Some(int(3)));
        p.add_row(row(&[(0, 1), (1, 1)], 2));
        p.add_row(row(&[(0, 1), (1, 1)], 2));
        p.add_row(row(&[(0, 2), (1, 2)], 4));
        p.add_row(row(&[(0, -1), (1, -1)], -2));
        let sol = solve_vertex(&p).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, int(2));
    }

    /// Dense basis enumeration: every vertex is the unique solution of `n`
    /// linearly independent tight constraints drawn from rows and bounds.
    pub(crate) fn enumerate_optimum(p: &LpProblem) -> Option<Rational> {
        let n = p.var_count();
        let mut cons: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = int(1);
            cons.push((e.clone(), p.lower[j].clone()));
            if let Some(u) = &p.upper[j] {
                cons.push((e, u.clone()));
            }
        }
        for r in &p.rows {
            let mut d = vec![Rational::zero(); n];
            for (j, a) in &r.coeffs {
                d[*j] += a;
            }
            cons.push((d, r.rhs.clone()));
        }
        let mut best: Option<Rational> = None;
        let total = cons.len();
        let mut pick = vec![0usize; n];
        fn rec(
            depth: usize,
            start: usize,
            total: usize,
            pick: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if depth == pick.len() {
                f(pick);
                return;
            }
            for i in start..total {
                pick[depth] = i;
                rec(depth + 1, i + 1, total, pick, f);
            }
        }
        rec(0, 0, total, &mut pick, &mut |chosen: &[usize]| {
            let mut sys: Vec<Vec<Rational>> = chosen
                .iter()
                .map(|&i| {
                    let mut r = cons[i].0.clone();
                    r.push(cons[i].1.clone());
                    r
                })
                .collect();
            if let Some(x) = solve_square(&mut sys, n) {
                if p.is_feasible(&x) {
                    let v = p.objective_value(&x);
                    if best.as_ref().is_none_or(|b| &v < b) {
                        best = Some(v);
                    }
                }
            }
        });
        best
    }

    fn small_lp() -> impl Strategy<Value = LpProblem> {
        (1usize..=4).prop_flat_map(|n| {
            let bounds = proptest::collection::vec((0i64..3, 0i64..4), n);
            let objective = proptest::collection::vec(-3i64..5, n);
            let rows = proptest::collection::vec(
                (proptest::collection::vec(-2i64..4, n), -2i64..8),
                0..=6,
            );
            (bounds, objective, rows).prop_map(move |(bounds, objective, rows)| {
                let mut p = LpProblem::new(n);
                for (j, (l, w)) in bounds.into_iter().enumerate() {
                    p.set_bounds(j, int(l), Some(int(l + w)));
                }
                p.objective = objective.into_iter().map(int).collect();
                for (coeffs, rhs) in rows {
                    let c = coeffs
                        .into_iter()
                        .enumerate()
                        .filter(|(_, a)| *a != 0)
                        .map(|(j, a)| (j, int(a)))
                        .collect();
                    p.add_row(Row::new(c, int(rhs)));
                }
                p
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn matches_basis_enumeration(p in small_lp()) {
            let oracle = enumerate_optimum(&p);
            match solve_vertex(&p).unwrap() {
                LpOutcome::Optimal(sol) => {
                    prop_assert_eq!(Some(sol.objective.clone()), oracle);
                    prop_assert_eq!(p.tight_rank(&sol.x), p.var_count());
                }
                LpOutcome::Infeasible(cert) => {
                    prop_assert!(oracle.is_none());
                    cert.verify(&p).unwrap();
                }
                LpOutcome::Unbounded(_) => prop_assert!(false, "bounded box cannot be unbounded"),
            }
        }

        #[test]
        fn modular_rank_agrees_with_exact_rank(
            entries in proptest::collection::vec((-3i64..4, 1i64..4), 12),
            rows in 1usize..5,
        ) {
            let cols = 3;
            let m: Vec<Vec<Rational>> = entries
                .chunks(cols)
                .take(rows)
                .map(|c| c.iter().map(|&(a, b)| frac(a, b)).collect())
                .collect();
            prop_assert_eq!(modular_rank(&m, cols), rank(m.clone(), cols));
        }
    }
}
