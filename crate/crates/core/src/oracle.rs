//! Brute-force reference solver.
//!
//! Minimises a trapezoidal discretisation of the running cost directly over
//! the interior grid values, with the end points pinned and the trapezoidal
//! energy held at `E_T`. Nothing here touches the closed forms, so the
//! analytic trajectory and costs can be checked against it.
//!
//! For a fixed ramp-sign pattern the discretised cost is quadratic, and its
//! stationarity (KKT) conditions form a tridiagonal system bordered by the
//! single energy constraint. The bordered system is solved by block
//! elimination: two tridiagonal solves and a scalar Schur complement. When
//! `b > 0` the sign pattern is iterated until it reproduces itself.

use crate::error::{DispatchError, Result};
use crate::trajectory::{HourSchedule, PriceSet};

const MAX_SIGN_ITERATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// `N + 1` power samples, MW.
    pub grid: Vec<f64>,
    /// Discretised cost at `grid`, $.
    pub cost: f64,
    /// Trapezoidal energy minus `E_T`, MWh.
    pub energy_gap: f64,
    /// `(grid[0] - Q0, grid[N] - QT)`, MW.
    pub endpoint_gaps: (f64, f64),
    /// Sign-pattern iterations used.
    pub iterations: usize,
}

/// Trapezoidal cost of a grid with spacing `h` hours.
pub fn grid_cost(grid: &[f64], h: f64, prices: &PriceSet) -> f64 {
    let (a, b, c, qz) = (prices.a(), prices.b(), prices.c(), prices.qz());
    let n = grid.len() - 1;
    let energy: f64 = grid
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * a * (q - qz) * q
        })
        .sum::<f64>()
        * h;
    let moves: f64 = grid
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            0.5 * (b * d).abs() * (w[0] + w[1] - 2.0 * qz) + c * d * d / h
        })
        .sum();
    energy + moves
}

/// Sign of `x`, with anything within `floor` of zero counted as zero.
fn sign(x: f64, floor: f64) -> f64 {
    if x > floor {
        1.0
    } else if x < -floor {
        -1.0
    } else {
        0.0
    }
}

/// Thomas algorithm for a symmetric tridiagonal matrix.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    let scale = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let mut denom = diag[0];
    if denom.abs() <= 1e-14 * scale {
        return Err(DispatchError::SingularKkt);
    }
    c_prime[0] = if n > 1 { off[0] / denom } else { 0.0 };
    d_prime[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c_prime[i - 1];
        if denom.abs() <= 1e-14 * scale || !denom.is_finite() {
            return Err(DispatchError::SingularKkt);
        }
        if i < n - 1 {
            c_prime[i] = off[i] / denom;
        }
        d_prime[i] = (rhs[i] - off[i - 1] * d_prime[i - 1]) / denom;
    }
    let mut x = d_prime;
    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    Ok(x)
}

/// Minimises the discretised cost for a fixed sign pattern `signs[k]` of the
/// move `grid[k+1] - grid[k]`.
fn solve_pattern(prices: &PriceSet, sched: &HourSchedule, n: usize, signs: &[f64]) -> Result<Vec<f64>> {
    let (a, b, c, qz) = (prices.a(), prices.b(), prices.c(), prices.qz());
    let h = sched.horizon() / n as f64;
    let (q0, qt) = (sched.q0(), sched.qt());
    let m = n - 1;
    // J(q) = ½ qᵀHq + fᵀq over interior values q_1..q_{N-1}.
    let mut diag = vec![2.0 * a * h + 4.0 * c / h; m];
    let off = vec![-2.0 * c / h; m.saturating_sub(1)];
    let mut f = vec![-a * h * qz; m];
    // Couplings to the pinned end values.
    f[0] -= 2.0 * c * q0 / h;
    f[m - 1] -= 2.0 * c * qt / h;
    for i in 1..n {
        // Node i closes move i-1 and opens move i.
        let turn = signs[i - 1] - signs[i];
        diag[i - 1] += b * turn;
        f[i - 1] -= b * qz * turn;
    }
    // Hq + f + λw = 0 with w = h·1, and hΣq = E_T - h(Q0 + QT)/2. The
    // unknown is the offset y = q - ℓ from the straight line ℓ between the
    // end points, which keeps round-off proportional to the offset.
    let line: Vec<f64> = (1..n).map(|i| q0 + (qt - q0) * i as f64 / n as f64).collect();
    let h_line = tridiagonal_product(&diag, &off, &line);
    let rhs: Vec<f64> = f.iter().zip(&h_line).map(|(fi, hl)| -(fi + hl)).collect();
    let target = sched.energy() - 0.5 * h * (q0 + qt) - h * line.iter().sum::<f64>();
    let y_f = solve_tridiagonal(&diag, &off, &rhs)?;
    let y_w = solve_tridiagonal(&diag, &off, &vec![h; m])?;
    let w_yf: f64 = y_f.iter().sum::<f64>() * h;
    let w_yw: f64 = y_w.iter().sum::<f64>() * h;
    if w_yw.abs() < f64::MIN_POSITIVE || !w_yw.is_finite() {
        return Err(DispatchError::SingularKkt);
    }
    let lambda = (w_yf - target) / w_yw;
    let mut grid = Vec::with_capacity(n + 1);
    grid.push(q0);
    grid.extend((0..m).map(|i| line[i] + (y_f[i] - lambda * y_w[i])));
    grid.push(qt);
    Ok(grid)
}

fn tridiagonal_product(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let m = diag.len();
    (0..m)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += off[i - 1] * x[i - 1];
            }
            if i + 1 < m {
                v += off[i] * x[i + 1];
            }
            v
        })
        .collect()
}

/// Solves the discretised problem on `steps` intervals.
pub fn solve_numeric(prices: &PriceSet, sched: &HourSchedule, steps: usize) -> Result<OracleSolution> {
    if steps < 8 {
        return Err(DispatchError::InvalidConfig(format!(
            "oracle needs at least 8 steps, got {steps}"
        )));
    }
    let h = sched.horizon() / steps as f64;
    // Moves below the noise floor take the direction of the nearest real
    // move, so a flat stretch between two ramps cannot flicker.
    let moves = |grid: &[f64]| -> Vec<f64> {
        let floor = 1e-11 * grid.iter().fold(0.0_f64, |m, q| m.max(q.abs()));
        let mut s: Vec<f64> = grid.windows(2).map(|w| sign(w[1] - w[0], floor)).collect();
        let mut last = s.iter().copied().find(|&v| v != 0.0).unwrap_or(0.0);
        for v in &mut s {
            if *v == 0.0 {
                *v = last;
            } else {
                last = *v;
            }
        }
        s
    };

    let mut signs = vec![0.0; steps];
    let mut grid = solve_pattern(prices, sched, steps, &signs)?;
    let mut iterations = 1;
    if prices.b() > 0.0 {
        loop {
            let next = moves(&grid);
            if next == signs {
                break;
            }
            if iterations >= MAX_SIGN_ITERATIONS {
                return Err(DispatchError::NoConvergence { iterations });
            }
            signs = next;
            grid = solve_pattern(prices, sched, steps, &signs)?;
            iterations += 1;
        }
    }
    let energy: f64 = grid.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    Ok(OracleSolution {
        cost: grid_cost(&grid, h, prices),
        energy_gap: energy - sched.energy(),
        endpoint_gaps: (grid[0] - sched.q0(), grid[steps] - sched.qt()),
        grid,
        iterations,
    })
}

/// `|analytic - oracle| / max(1, |oracle|)`.
pub fn compare(analytic_total: f64, numeric: &OracleSolution) -> f64 {
    (analytic_total - numeric.cost).abs() / numeric.cost.abs().max(1.0)
}
