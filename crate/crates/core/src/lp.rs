//! Dense two-phase simplex over exact rationals.
//!
//! Primal pricing is Dantzig's rule, switching to Bland's rule after a long
//! run of degenerate pivots so the method terminates. Rows added after a
//! solve are handled by dual simplex from the previous optimal basis, and
//! columns added after a solve by primal simplex from it. Arithmetic first
//! runs on `Ratio<i128>` with checked operations and restarts on big
//! rationals on overflow.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    /// Sparse coefficients `(variable, value)`.
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `min cost·x` subject to the rows and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub cost: Vec<Rational>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// An optimal basic solution.
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// Solves the problem from scratch.
pub fn solve(problem: &LpProblem) -> Result<LpOutcome> {
    let mut session = LpSession::new(problem.clone())?;
    session.solve()
}

#[derive(Debug)]
struct Overflow;

type Checked<T> = std::result::Result<T, Overflow>;

trait Field: Clone + Debug + PartialEq + Sized {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_rational(r: &Rational) -> Checked<Self>;
    fn to_rational(&self) -> Rational;
    fn is_nil(&self) -> bool;
    fn signum(&self) -> Ordering;
    fn compare(&self, other: &Self) -> Ordering;
    fn add(&self, o: &Self) -> Checked<Self>;
    fn sub(&self, o: &Self) -> Checked<Self>;
    fn mul(&self, o: &Self) -> Checked<Self>;
    fn div(&self, o: &Self) -> Checked<Self>;
    fn neg(&self) -> Checked<Self>;
}

impl Field for Rational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Checked<Self> {
        Ok(r.clone())
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> Ordering {
        self.cmp(&Zero::zero())
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Checked<Self> {
        Ok(self / o)
    }
    fn neg(&self) -> Checked<Self> {
        Ok(-self)
    }
}

type Fast = Ratio<i128>;

impl Field for Fast {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Checked<Self> {
        let n = r.numer().to_i128().ok_or(Overflow)?;
        let d = r.denom().to_i128().ok_or(Overflow)?;
        Ok(Ratio::new_raw(n, d))
    }
    fn to_rational(&self) -> Rational {
        Rational::new((*self.numer()).into(), (*self.denom()).into())
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> Ordering {
        self.numer().cmp(&0)
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn add(&self, o: &Self) -> Checked<Self> {
        self.checked_add(o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Checked<Self> {
        self.checked_sub(o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Checked<Self> {
        self.checked_mul(o).ok_or(Overflow)
    }
    fn div(&self, o: &Self) -> Checked<Self> {
        self.checked_div(o).ok_or(Overflow)
    }
    fn neg(&self) -> Checked<Self> {
        if *self.numer() == i128::MIN {
            return Err(Overflow);
        }
        Ok(-*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    /// Carries the variable index.
    Structural(usize),
    Slack,
    Artificial,
}

enum Step {
    Optimal,
    Infeasible,
    Unbounded,
    /// Dual simplex exceeded its pivot budget.
    Stalled,
}

#[derive(Clone, Debug)]
struct Tableau<F: Field> {
    nvars: usize,
    kinds: Vec<Col>,
    /// Column of each variable.
    col_of: Vec<usize>,
    /// Per problem row: the column that started as its unit vector, and
    /// whether the row was negated when built.
    ident: Vec<(usize, bool)>,
    /// Phase one dropped a redundant row, so `ident` no longer spans.
    lost_rows: bool,
    /// Rows of `B^-1 [A | b]`; the last entry is the right-hand side.
    rows: Vec<Vec<F>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the objective value.
    obj: Vec<F>,
    cost: Vec<F>,
}

impl<F: Field> Tableau<F> {
    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn build(problem: &LpProblem) -> Checked<Self> {
        let nvars = problem.num_vars;
        let mut kinds: Vec<Col> = (0..nvars).map(Col::Structural).collect();
        let mut dense: Vec<(Vec<F>, F, Sense)> = Vec::new();
        let mut negated = Vec::new();
        for row in &problem.rows {
            let mut coeffs = vec![F::nil(); nvars];
            for (j, v) in &row.coeffs {
                coeffs[*j] = coeffs[*j].add(&F::from_rational(v)?)?;
            }
            let mut rhs = F::from_rational(&row.rhs)?;
            let mut sense = row.sense;
            negated.push(rhs.signum() == Ordering::Less);
            if rhs.signum() == Ordering::Less {
                for c in &mut coeffs {
                    *c = c.neg()?;
                }
                rhs = rhs.neg()?;
                sense = match sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
            dense.push((coeffs, rhs, sense));
        }
        // column layout: structurals, then per row slack/surplus, then artificials
        let mut slack_col = vec![None; dense.len()];
        for (i, (_, _, sense)) in dense.iter().enumerate() {
            if *sense != Sense::Eq {
                slack_col[i] = Some(kinds.len());
                kinds.push(Col::Slack);
            }
        }
        let mut art_col = vec![None; dense.len()];
        for (i, (_, _, sense)) in dense.iter().enumerate() {
            if *sense != Sense::Le {
                art_col[i] = Some(kinds.len());
                kinds.push(Col::Artificial);
            }
        }
        let ident = (0..dense.len()).map(|i| (art_col[i].or(slack_col[i]).unwrap(), negated[i])).collect();
        let width = kinds.len();
        let mut rows = Vec::with_capacity(dense.len());
        let mut basis = Vec::with_capacity(dense.len());
        for (i, (coeffs, rhs, sense)) in dense.into_iter().enumerate() {
            let mut r = coeffs;
            r.resize(width + 1, F::nil());
            if let Some(s) = slack_col[i] {
                r[s] = if sense == Sense::Ge { F::unit().neg()? } else { F::unit() };
            }
            if let Some(a) = art_col[i] {
                r[a] = F::unit();
                basis.push(a);
            } else {
                basis.push(slack_col[i].unwrap());
            }
            r[width] = rhs;
            rows.push(r);
        }
        let mut cost = Vec::with_capacity(nvars);
        for c in &problem.cost {
            cost.push(F::from_rational(c)?);
        }
        Ok(Tableau {
            nvars,
            kinds,
            col_of: (0..nvars).collect(),
            ident,
            lost_rows: false,
            rows,
            basis,
            obj: Vec::new(),
            cost,
        })
    }

    fn set_objective(&mut self, phase_one: bool) -> Checked<()> {
        let width = self.width();
        let mut c = vec![F::nil(); width + 1];
        for (j, kind) in self.kinds.iter().enumerate() {
            c[j] = match (phase_one, kind) {
                (true, Col::Artificial) => F::unit(),
                (false, Col::Structural(v)) => self.cost[*v].clone(),
                _ => F::nil(),
            };
        }
        for (i, row) in self.rows.iter().enumerate() {
            let cb = c[self.basis[i]].clone();
            if cb.is_nil() {
                continue;
            }
            for j in 0..=width {
                if !row[j].is_nil() {
                    c[j] = c[j].sub(&cb.mul(&row[j])?)?;
                }
            }
        }
        self.obj = c;
        Ok(())
    }

    fn pivot(&mut self, r: usize, c: usize) -> Checked<()> {
        let width = self.width();
        let p = self.rows[r][c].clone();
        if p != F::unit() {
            for j in 0..=width {
                if !self.rows[r][j].is_nil() {
                    self.rows[r][j] = self.rows[r][j].div(&p)?;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..=width).filter(|&j| !pivot_row[j].is_nil()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_nil() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] = row[j].sub(&f.mul(&pivot_row[j])?)?;
            }
        }
        if !self.obj[c].is_nil() {
            let f = self.obj[c].clone();
            for &j in &nz {
                self.obj[j] = self.obj[j].sub(&f.mul(&pivot_row[j])?)?;
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    fn primal(&mut self, allow: impl Fn(Col) -> bool) -> Checked<Step> {
        let width = self.width();
        // Dantzig pricing until a long degenerate streak, then Bland's rule
        // for the rest of the call, which cannot cycle.
        let mut degenerate = 0;
        let mut bland = false;
        loop {
            let candidates = (0..width).filter(|&j| allow(self.kinds[j]) && self.obj[j].signum() == Ordering::Less);
            let entering = if bland {
                candidates.min()
            } else {
                candidates.reduce(|a, b| if self.obj[b].compare(&self.obj[a]) == Ordering::Less { b } else { a })
            };
            let Some(c) = entering else { return Ok(Step::Optimal) };
            let mut best: Option<(usize, F)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].signum() != Ordering::Greater {
                    continue;
                }
                let ratio = row[width].div(&row[c])?;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => match ratio.compare(br) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[i] < self.basis[*bi],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = best else { return Ok(Step::Unbounded) };
            if ratio.is_nil() {
                degenerate += 1;
                bland |= degenerate > 50;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c)?;
        }
    }

    fn dual(&mut self, budget: usize) -> Checked<Step> {
        let width = self.width();
        for _ in 0..budget {
            let leaving = (0..self.rows.len())
                .filter(|&i| self.rows[i][width].signum() == Ordering::Less)
                .min_by_key(|&i| self.basis[i]);
            let Some(r) = leaving else { return Ok(Step::Optimal) };
            let mut best: Option<(usize, F)> = None;
            for j in 0..width {
                let a = &self.rows[r][j];
                if self.kinds[j] == Col::Artificial || a.signum() != Ordering::Less {
                    continue;
                }
                let ratio = self.obj[j].div(&a.neg()?)?;
                if best.as_ref().is_none_or(|(_, br)| ratio.compare(br) == Ordering::Less) {
                    best = Some((j, ratio));
                }
            }
            let Some((c, _)) = best else { return Ok(Step::Infeasible) };
            self.pivot(r, c)?;
        }
        Ok(Step::Stalled)
    }

    fn solve_from_scratch(&mut self) -> Checked<Step> {
        let width = self.width();
        if self.kinds.contains(&Col::Artificial) {
            self.set_objective(true)?;
            self.primal(|_| true)?;
            if self.obj[width].signum() != Ordering::Equal {
                return Ok(Step::Infeasible);
            }
            // drive zero-valued artificials out of the basis
            let mut i = 0;
            while i < self.rows.len() {
                if self.kinds[self.basis[i]] == Col::Artificial {
                    let c = (0..width).find(|&j| self.kinds[j] != Col::Artificial && !self.rows[i][j].is_nil());
                    match c {
                        Some(c) => self.pivot(i, c)?,
                        None => {
                            // redundant row
                            self.rows.remove(i);
                            self.basis.remove(i);
                            self.lost_rows = true;
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        self.set_objective(false)?;
        self.primal(|k| k != Col::Artificial)
    }

    /// Appends `coeffs · x <= rhs` expressed in the current basis, with a new
    /// basic slack.
    fn add_le_row(&mut self, row: &LpRow) -> Checked<()> {
        let width = self.width();
        let mut r = vec![F::nil(); width + 2];
        for (j, v) in &row.coeffs {
            let c = self.col_of[*j];
            r[c] = r[c].add(&F::from_rational(v)?)?;
        }
        r[width + 1] = F::from_rational(&row.rhs)?;
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if r[b].is_nil() {
                continue;
            }
            let f = r[b].clone();
            for j in 0..=width {
                if !self.rows[i][j].is_nil() {
                    let idx = if j == width { width + 1 } else { j };
                    r[idx] = r[idx].sub(&f.mul(&self.rows[i][j])?)?;
                }
            }
        }
        r[width] = F::unit();
        for existing in &mut self.rows {
            let rhs = existing.pop().unwrap();
            existing.push(F::nil());
            existing.push(rhs);
        }
        let objv = self.obj.pop().unwrap();
        self.obj.push(F::nil());
        self.obj.push(objv);
        self.kinds.push(Col::Slack);
        self.ident.push((width, false));
        self.rows.push(r);
        self.basis.push(width);
        Ok(())
    }

    /// `B⁻¹ a` and the reduced cost of a column with entries `coeffs` over
    /// the problem rows.
    fn price(&self, cost: &Rational, coeffs: &[(usize, Rational)]) -> Checked<(Vec<F>, F)> {
        let mut column = vec![F::nil(); self.rows.len()];
        let mut reduced = F::from_rational(cost)?;
        for (i, a) in coeffs {
            let (c, neg) = self.ident[*i];
            let mut a = F::from_rational(a)?;
            if neg {
                a = a.neg()?;
            }
            if a.is_nil() {
                continue;
            }
            for (t, row) in column.iter_mut().zip(&self.rows) {
                if !row[c].is_nil() {
                    *t = t.add(&a.mul(&row[c])?)?;
                }
            }
            reduced = reduced.add(&a.mul(&self.obj[c])?)?;
        }
        Ok((column, reduced))
    }

    /// Appends a structural column for a new variable.
    fn add_column(&mut self, cost: &Rational, coeffs: &[(usize, Rational)]) -> Checked<()> {
        let (column, reduced) = self.price(cost, coeffs)?;
        let width = self.width();
        for (row, t) in self.rows.iter_mut().zip(column) {
            let rhs = row.pop().unwrap();
            row.push(t);
            row.push(rhs);
        }
        let objv = self.obj.pop().unwrap();
        self.obj.push(reduced);
        self.obj.push(objv);
        let var = self.cost.len();
        self.cost.push(F::from_rational(cost)?);
        self.kinds.push(Col::Structural(var));
        self.col_of.push(width);
        self.nvars += 1;
        Ok(())
    }

    /// Drops problem rows whose slack column is basic, with that column.
    /// Returns `false` (and changes nothing) if some row's slack is not
    /// basic, since then the basis would not survive.
    fn remove_rows(&mut self, drop: &[bool]) -> bool {
        let mut cols = Vec::new();
        for (i, &(c, _)) in self.ident.iter().enumerate() {
            if drop[i] {
                if self.kinds[c] != Col::Slack || !self.basis.contains(&c) {
                    return false;
                }
                cols.push(c);
            }
        }
        let width = self.width();
        let mut gone = vec![false; width + 1];
        for &c in &cols {
            gone[c] = true;
        }
        let mut new_index = vec![usize::MAX; width + 1];
        let mut next = 0;
        for j in 0..=width {
            if !gone[j] {
                new_index[j] = next;
                next += 1;
            }
        }
        let keep_row: Vec<bool> = self.basis.iter().map(|&b| !gone[b]).collect();
        let squeeze = |v: &mut Vec<F>| {
            let mut j = 0;
            v.retain(|_| {
                j += 1;
                !gone[j - 1]
            });
        };
        let mut i = 0;
        self.rows.retain(|_| {
            i += 1;
            keep_row[i - 1]
        });
        for row in &mut self.rows {
            squeeze(row);
        }
        squeeze(&mut self.obj);
        self.basis = self.basis.iter().filter(|&&b| !gone[b]).map(|&b| new_index[b]).collect();
        let mut j = 0;
        self.kinds.retain(|_| {
            j += 1;
            !gone[j - 1]
        });
        for c in &mut self.col_of {
            *c = new_index[*c];
        }
        let mut i = 0;
        self.ident.retain(|_| {
            i += 1;
            !drop[i - 1]
        });
        for (c, _) in &mut self.ident {
            *c = new_index[*c];
        }
        true
    }

    fn solution(&self) -> (Vec<Rational>, Rational) {
        let width = self.width();
        let mut x = vec![<Rational as Zero>::zero(); self.nvars];
        for (i, &b) in self.basis.iter().enumerate() {
            if let Col::Structural(v) = self.kinds[b] {
                x[v] = self.rows[i][width].to_rational();
            }
        }
        (x, -self.obj[width].to_rational())
    }
}

enum Engine {
    Fast(Tableau<Fast>),
    Exact(Tableau<Rational>),
}

macro_rules! with_engine {
    ($engine:expr, $t:ident => $body:expr) => {
        match $engine {
            Engine::Fast($t) => $body,
            Engine::Exact($t) => $body,
        }
    };
}

/// A column for [`LpSession::add_columns`]: cost and sparse entries
/// `(row, value)` over the current rows.
pub type LpColumn = (Rational, Vec<(usize, Rational)>);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pending {
    Nothing,
    Rows,
    Columns,
}

/// An LP that can be re-solved after adding `<=` rows or new columns.
pub struct LpSession {
    problem: LpProblem,
    /// The engine and whether it holds an optimal basis.
    engine: Option<Engine>,
    solved: bool,
    pending: Pending,
}

impl LpSession {
    pub fn new(problem: LpProblem) -> Result<Self> {
        if problem.cost.len() != problem.num_vars {
            return Err(Error::Domain("cost vector length differs from variable count".into()));
        }
        for row in &problem.rows {
            if row.coeffs.iter().any(|(j, _)| *j >= problem.num_vars) {
                return Err(Error::Domain("row refers to an unknown variable".into()));
            }
        }
        Ok(LpSession {
            problem,
            engine: None,
            solved: false,
            pending: Pending::Nothing,
        })
    }

    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    fn invalidate(&mut self) {
        self.engine = None;
        self.solved = false;
        self.pending = Pending::Nothing;
    }

    /// Adds `<=` rows. After an optimal solve they are handled by dual
    /// simplex from the current basis.
    pub fn add_rows(&mut self, rows: Vec<LpRow>) -> Result<()> {
        for row in &rows {
            if row.sense != Sense::Le {
                return Err(Error::Domain("only <= rows can be added incrementally".into()));
            }
            if row.coeffs.iter().any(|(j, _)| *j >= self.problem.num_vars) {
                return Err(Error::Domain("row refers to an unknown variable".into()));
            }
        }
        if self.solved && self.pending != Pending::Columns {
            let ok = match &mut self.engine {
                Some(e) => with_engine!(e, t => rows.iter().try_for_each(|r| t.add_le_row(r)).is_ok()),
                None => false,
            };
            if ok {
                self.pending = Pending::Rows;
            } else {
                self.invalidate();
            }
        } else {
            self.invalidate();
        }
        self.problem.rows.extend(rows);
        Ok(())
    }

    /// Adds variables; returns their indices. After an optimal solve they
    /// are handled by primal simplex from the current basis.
    pub fn add_columns(&mut self, columns: Vec<LpColumn>) -> Result<Vec<usize>> {
        for (_, coeffs) in &columns {
            if coeffs.iter().any(|(i, _)| *i >= self.problem.rows.len()) {
                return Err(Error::Domain("column refers to an unknown row".into()));
            }
        }
        if self.solved && self.pending != Pending::Rows {
            let ok = match &mut self.engine {
                Some(e) => with_engine!(e, t => !t.lost_rows
                    && columns.iter().try_for_each(|(c, a)| t.add_column(c, a)).is_ok()),
                None => false,
            };
            if ok {
                self.pending = Pending::Columns;
            } else {
                self.invalidate();
            }
        } else {
            self.invalidate();
        }
        let mut ids = Vec::with_capacity(columns.len());
        for (cost, coeffs) in columns {
            let var = self.problem.num_vars;
            self.problem.num_vars += 1;
            self.problem.cost.push(cost);
            for (i, a) in coeffs {
                self.problem.rows[i].coeffs.push((var, a));
            }
            ids.push(var);
        }
        Ok(ids)
    }

    /// Removes the rows with the given indices; later rows shift down. At an
    /// optimal basis, rows whose slack is basic (in particular rows that are
    /// not tight) go without losing the basis.
    pub fn remove_rows(&mut self, rows: &[usize]) -> Result<()> {
        let mut drop = vec![false; self.problem.rows.len()];
        for &i in rows {
            if i >= drop.len() {
                return Err(Error::Domain(format!("row {i} does not exist")));
            }
            drop[i] = true;
        }
        let kept = self.solved
            && self.pending == Pending::Nothing
            && match &mut self.engine {
                Some(e) => with_engine!(e, t => t.remove_rows(&drop)),
                None => false,
            };
        if !kept {
            self.invalidate();
        }
        let mut i = 0;
        self.problem.rows.retain(|_| {
            i += 1;
            !drop[i - 1]
        });
        Ok(())
    }

    /// Reduced cost of a prospective column at the current optimal basis, or
    /// `None` when no such basis is available.
    pub fn reduced_cost(&self, cost: &Rational, coeffs: &[(usize, Rational)]) -> Option<Rational> {
        if !self.solved || self.pending != Pending::Nothing {
            return None;
        }
        match self.engine.as_ref()? {
            Engine::Fast(t) if !t.lost_rows => t.price(cost, coeffs).ok().map(|(_, d)| d.to_rational()),
            Engine::Exact(t) if !t.lost_rows => t.price(cost, coeffs).ok().map(|(_, d)| d),
            _ => None,
        }
    }

    pub fn solve(&mut self) -> Result<LpOutcome> {
        if self.solved {
            let budget = 20 * (self.problem.rows.len() + self.problem.num_vars) + 100;
            let pending = self.pending;
            let step = match (&mut self.engine, pending) {
                (Some(e), Pending::Rows) => with_engine!(e, t => t.dual(budget).ok()),
                (Some(e), Pending::Columns) => with_engine!(e, t => t.primal(|k| k != Col::Artificial).ok()),
                (Some(_), Pending::Nothing) => Some(Step::Optimal),
                (None, _) => None,
            };
            self.pending = Pending::Nothing;
            match step {
                Some(Step::Optimal) => return Ok(self.outcome(Step::Optimal)),
                Some(Step::Infeasible) if pending == Pending::Rows => {
                    self.solved = false;
                    return Ok(LpOutcome::Infeasible);
                }
                Some(Step::Unbounded) if pending == Pending::Columns => {
                    self.solved = false;
                    return Ok(LpOutcome::Unbounded);
                }
                _ => {}
            }
        }
        self.invalidate();
        if let Ok(mut t) = Tableau::<Fast>::build(&self.problem) {
            if let Ok(step) = t.solve_from_scratch() {
                self.engine = Some(Engine::Fast(t));
                return Ok(self.finish(step));
            }
        }
        let mut t = Tableau::<Rational>::build(&self.problem).expect("exact arithmetic cannot overflow");
        let step = t.solve_from_scratch().expect("exact arithmetic cannot overflow");
        self.engine = Some(Engine::Exact(t));
        Ok(self.finish(step))
    }

    fn finish(&mut self, step: Step) -> LpOutcome {
        self.solved = matches!(step, Step::Optimal);
        self.outcome(step)
    }

    fn outcome(&self, step: Step) -> LpOutcome {
        match step {
            Step::Optimal => {
                let (x, value) = match &self.engine {
                    Some(e) => with_engine!(e, t => t.solution()),
                    None => unreachable!(),
                };
                LpOutcome::Optimal { x, value }
            }
            Step::Infeasible => LpOutcome::Infeasible,
            Step::Unbounded | Step::Stalled => LpOutcome::Unbounded,
        }
    }
}

/// `Σ coeffs·x` for a sparse row.
pub fn row_activity(row: &LpRow, x: &[Rational]) -> Rational {
    row.coeffs.iter().map(|(j, v)| v * &x[*j]).sum()
}

/// True if `x >= 0` satisfies every row exactly.
pub fn is_feasible(problem: &LpProblem, x: &[Rational]) -> bool {
    x.len() == problem.num_vars
        && x.iter().all(|v| !v.is_negative())
        && problem.rows.iter().all(|row| {
            let a = row_activity(row, x);
            match row.sense {
                Sense::Le => a <= row.rhs,
                Sense::Ge => a >= row.rhs,
                Sense::Eq => a == row.rhs,
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn row(coeffs: &[(usize, i64)], sense: Sense, rhs: i64) -> LpRow {
        LpRow {
            coeffs: coeffs.iter().map(|&(j, v)| (j, int(v))).collect(),
            sense,
            rhs: int(rhs),
        }
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
        let p = LpProblem {
            num_vars: 2,
            cost: vec![int(-3), int(-5)],
            rows: vec![
                row(&[(0, 1)], Sense::Le, 4),
                row(&[(1, 2)], Sense::Le, 12),
                row(&[(0, 3), (1, 2)], Sense::Le, 18),
            ],
        };
        assert_eq!(
            solve(&p).unwrap(),
            LpOutcome::Optimal { x: vec![int(2), int(6)], value: int(-36) }
        );
    }

    #[test]
    fn equalities_and_fractions() {
        // min x + y, x + 2y = 3, 2x + y = 3 -> x = y = 1
        let p = LpProblem {
            num_vars: 2,
            cost: vec![int(1), int(1)],
            rows: vec![row(&[(0, 1), (1, 2)], Sense::Eq, 3), row(&[(0, 2), (1, 1)], Sense::Eq, 3)],
        };
        assert_eq!(solve(&p).unwrap(), LpOutcome::Optimal { x: vec![int(1), int(1)], value: int(2) });
        // min x, 3x >= 1 -> 1/3
        let q = LpProblem {
            num_vars: 1,
            cost: vec![int(1)],
            rows: vec![row(&[(0, 3)], Sense::Ge, 1)],
        };
        assert_eq!(solve(&q).unwrap(), LpOutcome::Optimal { x: vec![rat(1, 3)], value: rat(1, 3) });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem {
            num_vars: 1,
            cost: vec![int(1)],
            rows: vec![row(&[(0, 1)], Sense::Le, 1), row(&[(0, 1)], Sense::Ge, 2)],
        };
        assert_eq!(solve(&p).unwrap(), LpOutcome::Infeasible);
        let q = LpProblem {
            num_vars: 1,
            cost: vec![int(-1)],
            rows: vec![row(&[(0, 1)], Sense::Ge, 1)],
        };
        assert_eq!(solve(&q).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let p = LpProblem {
            num_vars: 2,
            cost: vec![int(1), int(2)],
            rows: vec![row(&[(0, 1), (1, 1)], Sense::Eq, 2), row(&[(0, 2), (1, 2)], Sense::Eq, 4)],
        };
        assert_eq!(solve(&p).unwrap(), LpOutcome::Optimal { x: vec![int(2), int(0)], value: int(2) });
    }

    #[test]
    fn incremental_rows_match_fresh_solve() {
        let base = LpProblem {
            num_vars: 2,
            cost: vec![int(-1), int(-1)],
            rows: vec![row(&[(0, 1)], Sense::Le, 3), row(&[(1, 1)], Sense::Le, 3)],
        };
        let mut s = LpSession::new(base.clone()).unwrap();
        assert!(matches!(s.solve().unwrap(), LpOutcome::Optimal { .. }));
        let cut = row(&[(0, 1), (1, 1)], Sense::Le, 4);
        s.add_rows(vec![cut.clone()]).unwrap();
        let warm = s.solve().unwrap();
        let mut fresh = base;
        fresh.rows.push(cut);
        let value = |o: &LpOutcome| match o {
            LpOutcome::Optimal { value, .. } => value.clone(),
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(value(&warm), value(&solve(&fresh).unwrap()));
        if let LpOutcome::Optimal { x, .. } = &warm {
            assert!(is_feasible(&fresh, x));
        }
        s.add_rows(vec![row(&[(0, 1)], Sense::Le, -1)]).unwrap();
        assert_eq!(s.solve().unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn huge_coefficients_fall_back_to_exact() {
        let big = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), 50));
        let p = LpProblem {
            num_vars: 2,
            cost: vec![big.clone(), int(1)],
            rows: vec![LpRow { coeffs: vec![(0, int(1)), (1, int(1))], sense: Sense::Ge, rhs: big.clone() }],
        };
        assert_eq!(
            solve(&p).unwrap(),
            LpOutcome::Optimal { x: vec![int(0), big.clone()], value: big }
        );
    }

    /// Brute force: enumerate all bases of the equality form.
    fn vertex_enumeration(p: &LpProblem) -> Option<Rational> {
        // only for <= rows with nonnegative rhs: vertices are solutions of
        // nvars tight constraints among rows and x_j = 0.
        let n = p.num_vars;
        let mut cons: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for r in &p.rows {
            let mut a = vec![Rational::zero(); n];
            for (j, v) in &r.coeffs {
                a[*j] += v;
            }
            cons.push((a, r.rhs.clone()));
        }
        for j in 0..n {
            let mut a = vec![Rational::zero(); n];
            a[j] = int(-1);
            cons.push((a, Rational::zero()));
        }
        let m = cons.len();
        let mut best: Option<Rational> = None;
        let mut pick = vec![0usize; n];
        fn rec(
            k: usize,
            start: usize,
            pick: &mut Vec<usize>,
            cons: &[(Vec<Rational>, Rational)],
            p: &LpProblem,
            best: &mut Option<Rational>,
        ) {
            let n = p.num_vars;
            if k == n {
                let mut a: Vec<Vec<Rational>> = pick.iter().map(|&i| {
                    let mut r = cons[i].0.clone();
                    r.push(cons[i].1.clone());
                    r
                }).collect();
                // gaussian elimination
                for col in 0..n {
                    let Some(pr) = (col..n).find(|&r| !a[r][col].is_zero()) else { return };
                    a.swap(col, pr);
                    let pv = a[col][col].clone();
                    for j in 0..=n {
                        a[col][j] = &a[col][j] / &pv;
                    }
                    for r in 0..n {
                        if r != col && !a[r][col].is_zero() {
                            let f = a[r][col].clone();
                            for j in 0..=n {
                                let t = &f * &a[col][j];
                                a[r][j] -= t;
                            }
                        }
                    }
                }
                let x: Vec<Rational> = (0..n).map(|i| a[i][n].clone()).collect();
                let ok = cons.iter().all(|(row, rhs)| {
                    let s: Rational = row.iter().zip(&x).map(|(c, v)| c * v).sum();
                    s <= *rhs
                });
                if ok {
                    let v: Rational = p.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                    if best.as_ref().is_none_or(|b| v < *b) {
                        *best = Some(v);
                    }
                }
                return;
            }
            for i in start..cons.len() {
                pick[k] = i;
                rec(k + 1, i + 1, pick, cons, p, best);
            }
        }
        let _ = m;
        rec(0, 0, &mut pick, &cons, p, &mut best);
        best
    }

    #[test]
    fn added_column_improves_the_optimum() {
        // min -x0 - 3 x1  s.t. x0 + x1 = 2, x0 <= 2; start without x1
        let mut s = LpSession::new(LpProblem {
            num_vars: 1,
            cost: vec![int(-1)],
            rows: vec![row(&[(0, 1)], Sense::Eq, 2), row(&[(0, 1)], Sense::Le, 2)],
        })
        .unwrap();
        assert_eq!(s.solve().unwrap(), LpOutcome::Optimal { x: vec![int(2)], value: int(-2) });
        let column = (int(-3), vec![(0, int(1))]);
        assert_eq!(s.reduced_cost(&column.0, &column.1), Some(int(-2)));
        assert_eq!(s.add_columns(vec![column]).unwrap(), vec![1]);
        assert_eq!(s.solve().unwrap(), LpOutcome::Optimal { x: vec![int(0), int(2)], value: int(-6) });
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]
        #[test]
        fn removing_slack_rows_keeps_the_session_exact(
            n in 2usize..7,
            m in 1usize..8,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let le = |rng: &mut rand_chacha::ChaCha8Rng| LpRow {
                coeffs: (0..n)
                    .filter_map(|j| {
                        let keep = rng.gen_bool(0.7);
                        let c = rng.gen_range(0..=3);
                        keep.then(|| (j, int(c)))
                    })
                    .collect(),
                sense: Sense::Le,
                rhs: int(rng.gen_range(1..=8)),
            };
            let mut rows: Vec<LpRow> = (0..n).map(|j| row(&[(j, 1)], Sense::Le, 5)).collect();
            rows.extend((0..m).map(|_| le(&mut rng)));
            let cost: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-5..=1), rng.gen_range(1..=3))).collect();
            let mut s = LpSession::new(LpProblem { num_vars: n, cost, rows }).unwrap();
            for _ in 0..4 {
                let LpOutcome::Optimal { x, .. } = s.solve().unwrap() else { panic!("bounded and feasible") };
                let slack: Vec<usize> = s
                    .problem()
                    .rows
                    .iter()
                    .enumerate()
                    .skip(n)
                    .filter(|(_, r)| row_activity(r, &x) < r.rhs)
                    .map(|(i, _)| i)
                    .collect();
                s.remove_rows(&slack).unwrap();
                let extra: Vec<LpRow> = (0..rng.gen_range(1..=3)).map(|_| le(&mut rng)).collect();
                s.add_rows(extra).unwrap();
                let warm = s.solve().unwrap();
                let fresh = solve(s.problem()).unwrap();
                match (&warm, &fresh) {
                    (LpOutcome::Optimal { value: a, x }, LpOutcome::Optimal { value: b, .. }) => {
                        prop_assert_eq!(a, b);
                        prop_assert!(is_feasible(s.problem(), x));
                    }
                    _ => prop_assert_eq!(&warm, &fresh),
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]
        #[test]
        fn column_generation_reaches_the_full_optimum(
            n in 2usize..7,
            m in 1usize..5,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rows = vec![LpRow {
                coeffs: (0..n).map(|j| (j, int(1))).collect(),
                sense: Sense::Eq,
                rhs: int(rng.gen_range(1..=4)),
            }];
            for _ in 0..m {
                let coeffs = (0..n).map(|j| (j, int(rng.gen_range(-2..=3)))).collect();
                let sense = if rng.gen_bool(0.3) { Sense::Ge } else { Sense::Le };
                rows.push(LpRow { coeffs, sense, rhs: int(rng.gen_range(-2..=6)) });
            }
            let cost: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
            let full = LpProblem { num_vars: n, cost: cost.clone(), rows: rows.clone() };
            let want = solve(&full).unwrap();
            let keep = rng.gen_range(1..=n);
            let restrict = |r: &LpRow| LpRow {
                coeffs: r.coeffs.iter().filter(|(j, _)| *j < keep).cloned().collect(),
                sense: r.sense,
                rhs: r.rhs.clone(),
            };
            let mut s = LpSession::new(LpProblem {
                num_vars: keep,
                cost: cost[..keep].to_vec(),
                rows: rows.iter().map(restrict).collect(),
            })
            .unwrap();
            let column = |j: usize| -> LpColumn {
                let entries = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (i, r.coeffs.iter().find(|(k, _)| *k == j).unwrap().1.clone()))
                    .collect();
                (cost[j].clone(), entries)
            };
            let mut next = keep;
            let got = loop {
                let out = s.solve().unwrap();
                if !matches!(out, LpOutcome::Optimal { .. }) && next < n {
                    s.add_columns((next..n).map(column).collect()).unwrap();
                    next = n;
                    continue;
                }
                if !matches!(out, LpOutcome::Optimal { .. }) {
                    break out;
                }
                let negative: Vec<usize> = (next..n)
                    .filter(|&j| {
                        let (c, a) = column(j);
                        s.reduced_cost(&c, &a).unwrap() < Rational::zero()
                    })
                    .collect();
                if negative.is_empty() {
                    break out;
                }
                // columns must stay in index order; add the whole tail
                s.add_columns((next..n).map(column).collect()).unwrap();
                next = n;
            };
            match (want, got) {
                (LpOutcome::Optimal { value: a, .. }, LpOutcome::Optimal { value: b, x }) => {
                    prop_assert_eq!(a, b);
                    if x.len() == n {
                        prop_assert!(is_feasible(&full, &x));
                    }
                }
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn bounded_packing_lps_match_vertex_enumeration(
            n in 1usize..4,
            m in 1usize..5,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for _ in 0..m {
                let coeffs = (0..n).map(|j| (j, int(rng.gen_range(-2..=4)))).collect();
                rows.push(LpRow { coeffs, sense: Sense::Le, rhs: int(rng.gen_range(0..=6)) });
            }
            // box keeps it bounded
            for j in 0..n {
                rows.push(LpRow { coeffs: vec![(j, int(1))], sense: Sense::Le, rhs: int(5) });
            }
            let cost = (0..n).map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
            let p = LpProblem { num_vars: n, cost, rows };
            let want = vertex_enumeration(&p);
            match solve(&p).unwrap() {
                LpOutcome::Optimal { x, value } => {
                    prop_assert!(is_feasible(&p, &x));
                    prop_assert_eq!(Some(value), want);
                }
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
    }
}
