//! Dense two-phase simplex for the small linear programs behind cone
//! membership, pointedness and polar-cone searches.
//!
//! Problems here have at most a few dozen variables, so the tableau is
//! dense and pivoting uses Bland's rule to rule out cycling.

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// `optimize c.x` subject to row constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub(crate) struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    maximize: bool,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        LinearProgram { n: objective.len(), objective, maximize: true, rows: Vec::new() }
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        LinearProgram { n: objective.len(), objective, maximize: false, rows: Vec::new() }
    }

    pub fn constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.n, "constraint width must match variable count");
        self.rows.push((coeffs, rel, rhs));
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let m = self.rows.len();
        let n_slack = self.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_struct = self.n + n_slack;
        let n_cols = n_struct + m;
        let rhs_col = n_cols;

        let mut tab = vec![vec![0.0; n_cols + 1]; m];
        let mut basis = vec![0usize; m];
        let mut slack = self.n;
        for (i, (coeffs, rel, rhs)) in self.rows.iter().enumerate() {
            let row = &mut tab[i];
            row[..self.n].copy_from_slice(coeffs);
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[rhs_col] = *rhs;
            if *rhs < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            row[n_struct + i] = 1.0;
            basis[i] = n_struct + i;
        }

        // Phase 1: drive the artificials to zero.
        let mut phase1_cost = vec![0.0; n_cols];
        for c in phase1_cost.iter_mut().skip(n_struct) {
            *c = 1.0;
        }
        if run_simplex(&mut tab, &mut basis, &phase1_cost, n_cols).is_err() {
            return LpOutcome::Infeasible;
        }
        let scale = 1.0 + self.rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        let infeasibility: f64 =
            basis.iter().enumerate().filter(|(_, &b)| b >= n_struct).map(|(i, _)| tab[i][rhs_col]).sum();
        if infeasibility > 1e-9 * scale {
            return LpOutcome::Infeasible;
        }

        // Pivot remaining artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.len() {
            if basis[i] >= n_struct {
                match (0..n_struct).find(|&j| tab[i][j].abs() > 1e-9) {
                    Some(j) => {
                        pivot(&mut tab, &mut basis, i, j);
                        i += 1;
                    }
                    None => {
                        tab.remove(i);
                        basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }

        // Phase 2 on the structural columns only.
        let sign = if self.maximize { -1.0 } else { 1.0 };
        let mut cost = vec![0.0; n_cols];
        for (j, c) in self.objective.iter().enumerate() {
            cost[j] = sign * c;
        }
        if run_simplex(&mut tab, &mut basis, &cost, n_struct).is_err() {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![0.0; self.n];
        for (i, &b) in basis.iter().enumerate() {
            if b < self.n {
                x[b] = tab[i][rhs_col].max(0.0);
            }
        }
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { x, value }
    }
}

struct UnboundedDirection;

/// Minimizes `cost` over columns `< allowed` starting from a feasible basis.
fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    allowed: usize,
) -> Result<(), UnboundedDirection> {
    let rhs_col = tab.first().map_or(0, |r| r.len() - 1);
    for _ in 0..MAX_PIVOTS {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced: f64 = cost[j] - basis.iter().enumerate().map(|(i, &b)| cost[b] * tab[i][j]).sum::<f64>();
            reduced < -PIVOT_EPS
        });
        let Some(j) = entering else { return Ok(()) };

        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[j] > PIVOT_EPS {
                let ratio = row[rhs_col] / row[j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else { return Err(UnboundedDirection) };
        pivot(tab, basis, i, j);
    }
    Ok(())
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i != row {
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    basis[row] = col;
}
