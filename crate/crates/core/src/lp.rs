//! Small dense linear programming and nonnegative least squares.
//!
//! Problem sizes here are at most a few hundred columns over `C(N, m)` rows,
//! so a tableau simplex is plenty.

use nalgebra::{DMatrix, DVector};

const PIVOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual multipliers `y` with `Aᵀy ≤ c` at optimality and `bᵀy = cᵀx`.
    pub duals: Vec<f64>,
}

/// `min cᵀx` subject to `A x = b`, `x ≥ 0` (two-phase tableau simplex).
/// `a` is row-major with `b.len()` rows of `c.len()` entries.
pub fn solve_standard(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpSolution {
    let m = b.len();
    let n = c.len();
    let width = n + m + 1;
    let rhs = width - 1;
    let mut flip = vec![1.0; m];
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        if b[i] < 0.0 {
            flip[i] = -1.0;
        }
        for j in 0..n {
            t[i][j] = flip[i] * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][rhs] = flip[i] * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_iter = 50 * (n + m) + 1000;

    // phase 1: minimize the sum of artificials
    let mut cost1 = vec![0.0; n + m];
    for v in cost1.iter_mut().skip(n) {
        *v = 1.0;
    }
    set_objective_row(&mut t, &basis, &cost1);
    if run_simplex(&mut t, &mut basis, n + m, max_iter).is_none() {
        return failed(LpStatus::IterationLimit, n, m);
    }
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if -t[m][rhs] > 1e-9 * scale {
        return failed(LpStatus::Infeasible, n, m);
    }
    // drive remaining artificials out of the basis
    for r in 0..m {
        if basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| t[r][j].abs() > 1e-9) {
                pivot(&mut t, r, j);
                basis[r] = j;
            }
        }
    }

    // phase 2 (artificial columns stay in the tableau to read off B⁻¹)
    let mut cost2 = c.to_vec();
    cost2.extend(std::iter::repeat_n(0.0, m));
    set_objective_row(&mut t, &basis, &cost2);
    let status = match run_simplex(&mut t, &mut basis, n, max_iter) {
        Some(true) => LpStatus::Optimal,
        Some(false) => LpStatus::Unbounded,
        None => LpStatus::IterationLimit,
    };
    let mut x = vec![0.0; n];
    for (r, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[r][rhs];
        }
    }
    let duals = (0..m).map(|i| flip[i] * -t[m][n + i]).collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpSolution { status, x, objective, duals }
}

fn failed(status: LpStatus, n: usize, m: usize) -> LpSolution {
    LpSolution { status, x: vec![0.0; n], objective: f64::NAN, duals: vec![0.0; m] }
}

/// Bottom row holds reduced costs `c_j − c_Bᵀ B⁻¹A_j` and `−c_Bᵀ x_B` at the right.
fn set_objective_row(t: &mut [Vec<f64>], basis: &[usize], cost: &[f64]) {
    let m = basis.len();
    let width = t[0].len();
    let mut row = vec![0.0; width];
    row[..cost.len()].copy_from_slice(cost);
    for (r, &j) in basis.iter().enumerate() {
        let cb = cost[j];
        if cb != 0.0 {
            for k in 0..width {
                row[k] -= cb * t[r][k];
            }
        }
    }
    t[m] = row;
}

fn pivot(t: &mut [Vec<f64>], r: usize, j: usize) {
    let p = t[r][j];
    t[r].iter_mut().for_each(|v| *v /= p);
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            let f = row[j];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
    }
}

/// Runs pivots over the first `n_enter` columns. `Some(true)` optimal,
/// `Some(false)` unbounded, `None` iteration limit.
fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], n_enter: usize, max_iter: usize) -> Option<bool> {
    let m = basis.len();
    let rhs = t[0].len() - 1;
    let mut degenerate_run = 0usize;
    for _ in 0..max_iter {
        // Dantzig's rule, falling back to Bland's rule on long degenerate runs
        let entering = if degenerate_run < 50 {
            let mut best = None;
            let mut best_val = -PIVOT_TOL;
            for j in 0..n_enter {
                if t[m][j] < best_val {
                    best_val = t[m][j];
                    best = Some(j);
                }
            }
            best
        } else {
            (0..n_enter).find(|&j| t[m][j] < -PIVOT_TOL)
        };
        let Some(j) = entering else { return Some(true) };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            if t[r][j] > PIVOT_TOL {
                let ratio = t[r][rhs] / t[r][j];
                match leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && basis[r] < basis[lr]) {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((r, ratio)) = leave else { return Some(false) };
        degenerate_run = if ratio.abs() < 1e-14 { degenerate_run + 1 } else { 0 };
        pivot(t, r, j);
        basis[r] = j;
    }
    None
}

/// Lawson–Hanson nonnegative least squares: `min ‖A x − b‖` with `x ≥ 0`.
/// `a` is given column-wise (one `Vec` per column).
pub fn nnls(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = columns.len();
    let rows = b.len();
    if n == 0 {
        return Vec::new();
    }
    let a = DMatrix::from_fn(rows, n, |i, j| columns[j][i]);
    let bv = DVector::from_column_slice(b);
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * (1.0 + a.norm()) * (1.0 + bv.norm());
    for _ in 0..(3 * n + 10) {
        let w = a.transpose() * (&bv - &a * &x);
        let candidate = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&p, &q| w[p].total_cmp(&w[q]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = DMatrix::from_fn(rows, idx.len(), |i, k| a[(i, idx[k])]);
            let z = least_squares(&sub, &bv);
            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &col) in idx.iter().enumerate() {
                    x[col] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &col) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[col] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[col] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &col) in idx.iter().enumerate() {
                x[col] += alpha * (z[k] - x[col]);
                if x[col] <= 1e-15 {
                    x[col] = 0.0;
                    passive[col] = false;
                }
            }
            if !idx.iter().any(|&c| passive[c]) {
                break;
            }
        }
    }
    x.iter().copied().collect()
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-12).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp_with_duals() {
        // min -x1 - 2 x2  s.t. x1 + x2 + s1 = 4, x1 + 3 x2 + s2 = 6
        let a = vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        let sol = solve_standard(&a, &[4.0, 6.0], &[-1.0, -2.0, 0.0, 0.0]);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 3.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective + 5.0).abs() < 1e-12);
        let dual_obj = 4.0 * sol.duals[0] + 6.0 * sol.duals[1];
        assert!((dual_obj - sol.objective).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let sol = solve_standard(&[vec![1.0, 1.0]], &[-1.0], &[1.0, 1.0]);
        assert_eq!(sol.status, LpStatus::Infeasible);
        let sol = solve_standard(&[vec![1.0, -1.0]], &[1.0], &[0.0, -1.0]);
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_duals_keep_their_sign() {
        // min x1 + x2  s.t. -x1 - 2x2 = -2  → x2 = 1, objective 1, y = -1/2
        let sol = solve_standard(&[vec![-1.0, -2.0]], &[-2.0], &[1.0, 1.0]);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!((sol.duals[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn nnls_recovers_nonnegative_combination() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]];
        let x = nnls(&cols, &[2.0, 1.0, 0.0]);
        let fit: Vec<f64> = (0..3).map(|i| cols.iter().zip(&x).map(|(c, w)| c[i] * w).sum()).collect();
        assert!((fit[0] - 2.0).abs() < 1e-10 && (fit[1] - 1.0).abs() < 1e-10);
        assert!(x.iter().all(|&v| v >= 0.0));
        // negative target direction is clipped
        let x = nnls(&cols[..1], &[-1.0, 0.0, 0.0]);
        assert_eq!(x, vec![0.0]);
    }
}
