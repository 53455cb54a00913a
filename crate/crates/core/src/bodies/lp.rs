//! Dense primal simplex for `max ⟨c, y⟩ s.t. A y ≤ s` with free `y` and `s > 0`.
//!
//! `y = 0` is feasible, so the slack basis starts the method without a phase I.
//! Bland's rule prevents cycling.

/// Returns the optimal value, or `None` if the problem is unbounded.
pub(crate) fn maximize(rows: &[&[f64]], s: &[f64], c: &[f64]) -> Option<f64> {
    let m = rows.len();
    let d = c.len();
    // columns: y+ (d), y- (d), w (m), rhs
    let n = 2 * d + m;
    let mut t = vec![vec![0.0; n + 1]; m];
    for (i, row) in rows.iter().enumerate() {
        for k in 0..d {
            t[i][k] = row[k];
            t[i][d + k] = -row[k];
        }
        t[i][2 * d + i] = 1.0;
        t[i][n] = s[i];
    }
    // reduced-cost row: z_j − c_j
    let mut z = vec![0.0; n + 1];
    for k in 0..d {
        z[k] = -c[k];
        z[d + k] = c[k];
    }
    let mut basis: Vec<usize> = (2 * d..2 * d + m).collect();
    let eps = 1e-12;
    for _ in 0..50_000 {
        let Some(enter) = (0..n).find(|&j| z[j] < -eps) else {
            return Some(z[n]);
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > eps {
                let ratio = t[i][n] / t[i][enter];
                let better = ratio < best - 1e-15
                    || (ratio <= best + 1e-15 && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let r = leave?;
        let piv = t[r][enter];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r {
                let f = row[enter];
                if f != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = z[enter];
        for (v, p) in z.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        basis[r] = enter;
    }
    // Bland's rule terminates; reaching here means numerical trouble.
    None
}
