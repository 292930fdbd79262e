//! Exact rational linear programming.
//!
//! A deliberately small dense two-phase simplex over arbitrary-precision
//! rationals, with Bland's pivot rule for anti-cycling. Problem sizes in
//! this crate are tiny (tens of variables), so clarity and exactness win
//! over sparse-matrix tricks. Strict inequalities are never part of a
//! program; callers encode strictness by maximizing a slack objective and
//! testing whether the optimum is positive.

use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::lotteries::Rational;

/// Comparison direction of a constraint.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
        })
    }
}

/// A linear constraint `coeffs . x  cmp  rhs`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// A maximization problem over named variables. Variables are free unless a
/// constraint pins them; `x >= 0` is expressed as an ordinary constraint.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(variables: Vec<String>, objective: Vec<Rational>) -> Self {
        LinearProgram {
            variables,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, cmp: Cmp, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.variables.is_empty() {
            return Err(LpError::NoVariables);
        }
        if self.objective.len() != self.variables.len() {
            return Err(LpError::DimensionMismatch {
                expected: self.variables.len(),
                got: self.objective.len(),
            });
        }
        for constraint in &self.constraints {
            if constraint.coeffs.len() != self.variables.len() {
                return Err(LpError::DimensionMismatch {
                    expected: self.variables.len(),
                    got: constraint.coeffs.len(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("maximize ")?;
        write_linear(f, &self.objective, &self.variables)?;
        f.write_str("\nsubject to\n")?;
        for constraint in &self.constraints {
            f.write_str("  ")?;
            write_linear(f, &constraint.coeffs, &self.variables)?;
            writeln!(f, " {} {}", constraint.cmp, constraint.rhs)?;
        }
        Ok(())
    }
}

fn write_linear(f: &mut fmt::Formatter<'_>, coeffs: &[Rational], names: &[String]) -> fmt::Result {
    let mut wrote = false;
    for (coefficient, name) in coeffs.iter().zip(names) {
        if coefficient.is_zero() {
            continue;
        }
        if wrote {
            f.write_str(if coefficient.is_negative() {
                " - "
            } else {
                " + "
            })?;
        } else if coefficient.is_negative() {
            f.write_str("-")?;
        }
        let magnitude = coefficient.abs();
        if magnitude.is_one() {
            write!(f, "{name}")?;
        } else {
            write!(f, "{magnitude}*{name}")?;
        }
        wrote = true;
    }
    if !wrote {
        f.write_str("0")?;
    }
    Ok(())
}

/// Solver outcome. An `Optimal` point satisfies every constraint exactly and
/// attains the value exactly; this is re-checked before returning.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("a linear program needs at least one variable")]
    NoVariables,
    #[error("dimension mismatch: expected {expected} coefficients, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solver invariant violated: {0}")]
    Internal(String),
}

/// Solves the program by two-phase simplex with Bland's rule.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let n = lp.variables.len();

    // Recognize plain nonnegativity constraints (a single nonzero
    // coefficient, zero right hand side, pointing the `x >= 0` way) and
    // enforce them structurally instead of through rows. Everything else
    // stays a row and the variable is split below.
    let mut nonneg = vec![false; n];
    let mut rows: Vec<&Constraint> = Vec::new();
    for constraint in &lp.constraints {
        let mut nonzero = constraint
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero());
        let single = match (nonzero.next(), nonzero.next()) {
            (Some((j, coefficient)), None) if constraint.rhs.is_zero() => match constraint.cmp {
                Cmp::Ge if coefficient.is_positive() => Some(j),
                Cmp::Le if coefficient.is_negative() => Some(j),
                _ => None,
            },
            _ => None,
        };
        match single {
            Some(j) => nonneg[j] = true,
            None => rows.push(constraint),
        }
    }

    // Column layout: one column per nonnegative variable, a (plus, minus)
    // pair per free variable, then one slack column per inequality row.
    let mut plus_col = vec![0usize; n];
    let mut minus_col = vec![None; n];
    let mut ncols = 0usize;
    for j in 0..n {
        plus_col[j] = ncols;
        ncols += 1;
        if !nonneg[j] {
            minus_col[j] = Some(ncols);
            ncols += 1;
        }
    }
    let slack_of_row: Vec<Option<usize>> = rows
        .iter()
        .map(|constraint| match constraint.cmp {
            Cmp::Eq => None,
            _ => {
                let col = ncols;
                ncols += 1;
                Some(col)
            }
        })
        .collect();

    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(rows.len());
    let mut rhs: Vec<Rational> = Vec::with_capacity(rows.len());
    let mut slack_sign: Vec<Rational> = Vec::with_capacity(rows.len());
    for (i, constraint) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        for j in 0..n {
            let coefficient = &constraint.coeffs[j];
            if coefficient.is_zero() {
                continue;
            }
            row[plus_col[j]] = coefficient.clone();
            if let Some(mc) = minus_col[j] {
                row[mc] = -coefficient.clone();
            }
        }
        let mut sign = Rational::zero();
        if let Some(sc) = slack_of_row[i] {
            sign = match constraint.cmp {
                Cmp::Le => Rational::one(),
                Cmp::Ge => -Rational::one(),
                Cmp::Eq => unreachable!(),
            };
            row[sc] = sign.clone();
        }
        let mut b = constraint.rhs.clone();
        if b.is_negative() {
            for cell in &mut row {
                *cell = -cell.clone();
            }
            b = -b;
            sign = -sign;
        }
        tableau.push(row);
        rhs.push(b);
        slack_sign.push(sign);
    }

    // Initial basis: a row's own slack column when its coefficient is +1,
    // an artificial column otherwise.
    let mut basis = vec![usize::MAX; tableau.len()];
    let mut artificials = Vec::new();
    for i in 0..tableau.len() {
        if slack_sign[i].is_one() {
            basis[i] = slack_of_row[i].expect("slack exists when sign is set");
        } else {
            let col = ncols + artificials.len();
            artificials.push(col);
            basis[i] = col;
        }
    }
    if !artificials.is_empty() {
        for (i, row) in tableau.iter_mut().enumerate() {
            row.extend(std::iter::repeat_with(Rational::zero).take(artificials.len()));
            if basis[i] >= ncols {
                row[basis[i]] = Rational::one();
            }
        }
    }
    let total_cols = ncols + artificials.len();

    // Phase 1: drive the artificial variables to zero.
    if !artificials.is_empty() {
        let mut costs = vec![Rational::zero(); total_cols];
        for &col in &artificials {
            costs[col] = -Rational::one();
        }
        run_simplex(&mut tableau, &mut rhs, &mut basis, &costs, total_cols);
        let phase1: Rational = basis
            .iter()
            .zip(&rhs)
            .map(|(&b, value)| costs[b].clone() * value)
            .sum();
        if !phase1.is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot surviving artificials out of the basis; rows that cannot
        // pivot are redundant and dropped.
        let mut i = 0;
        while i < tableau.len() {
            if basis[i] >= ncols {
                match (0..ncols).find(|&j| !tableau[i][j].is_zero()) {
                    Some(j) => {
                        pivot(&mut tableau, &mut rhs, &mut basis, i, j);
                    }
                    None => {
                        tableau.remove(i);
                        rhs.remove(i);
                        basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in &mut tableau {
            row.truncate(ncols);
        }
    }

    // Phase 2: the real objective on the split columns.
    let mut costs = vec![Rational::zero(); ncols];
    for j in 0..n {
        costs[plus_col[j]] = lp.objective[j].clone();
        if let Some(mc) = minus_col[j] {
            costs[mc] = -lp.objective[j].clone();
        }
    }
    if !run_simplex(&mut tableau, &mut rhs, &mut basis, &costs, ncols) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut column_value = vec![Rational::zero(); ncols];
    for (i, &b) in basis.iter().enumerate() {
        column_value[b] = rhs[i].clone();
    }
    let point: Vec<Rational> = (0..n)
        .map(|j| {
            let mut value = column_value[plus_col[j]].clone();
            if let Some(mc) = minus_col[j] {
                value -= &column_value[mc];
            }
            value
        })
        .collect();
    let value: Rational = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();

    // The exactness guarantee: an optimal point must satisfy every original
    // constraint with no tolerance at all.
    for constraint in &lp.constraints {
        let lhs: Rational = constraint
            .coeffs
            .iter()
            .zip(&point)
            .map(|(c, x)| c * x)
            .sum();
        let ok = match constraint.cmp {
            Cmp::Le => lhs <= constraint.rhs,
            Cmp::Eq => lhs == constraint.rhs,
            Cmp::Ge => lhs >= constraint.rhs,
        };
        if !ok {
            return Err(LpError::Internal(format!(
                "optimal point violates a constraint: lhs {lhs} {} {}",
                constraint.cmp, constraint.rhs
            )));
        }
    }

    Ok(LpOutcome::Optimal { value, point })
}

/// Runs Bland-rule simplex to optimality. Returns false on an unbounded
/// direction. Entering column: the lowest-index column with positive
/// reduced cost. Leaving row: the minimum-ratio row, ties broken by the
/// lowest basis column.
fn run_simplex(
    tableau: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    costs: &[Rational],
    ncols: usize,
) -> bool {
    loop {
        let entering = (0..ncols).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut reduced = costs[j].clone();
            for (i, row) in tableau.iter().enumerate() {
                if !row[j].is_zero() && !costs[basis[i]].is_zero() {
                    reduced -= costs[basis[i]].clone() * &row[j];
                }
            }
            reduced.is_positive()
        });
        let Some(entering) = entering else {
            return true;
        };
        let mut leaving: Option<(usize, Rational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if !row[entering].is_positive() {
                continue;
            }
            let ratio = rhs[i].clone() / &row[entering];
            let better = match &leaving {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leaving = Some((i, ratio));
            }
        }
        let Some((leaving, _)) = leaving else {
            return false;
        };
        pivot(tableau, rhs, basis, leaving, entering);
    }
}

fn pivot(
    tableau: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let pivot_value = tableau[row][col].clone();
    for cell in &mut tableau[row] {
        *cell /= &pivot_value;
    }
    rhs[row] /= &pivot_value;
    for i in 0..tableau.len() {
        if i == row || tableau[i][col].is_zero() {
            continue;
        }
        let factor = tableau[i][col].clone();
        for j in 0..tableau[i].len() {
            let delta = factor.clone() * &tableau[row][j];
            tableau[i][j] -= delta;
        }
        let delta = factor * &rhs[row];
        rhs[i] -= delta;
    }
    basis[row] = col;
}
