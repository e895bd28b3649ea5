//! Dense tableau simplex for zero-sum matrix games, with a primal/dual
//! certificate on every solve.

use serde::Serialize;

use crate::{Error, Result};

/// Solved game: the column player maximizes, the row player minimizes.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSumGame {
    /// Payoff to the column player, rows × columns.
    pub payoff: Vec<Vec<f64>>,
    pub value: f64,
    /// Row player's optimal mixed strategy.
    pub row_strategy: Vec<f64>,
    /// Column player's optimal mixed strategy.
    pub col_strategy: Vec<f64>,
    /// `max_col (G^T q) − min_row (G p)`, the optimality certificate.
    pub duality_gap: f64,
}

struct SimplexSolution {
    x: Vec<f64>,
    duals: Vec<f64>,
}

/// Standard-form simplex: `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`, so
/// the slack basis is feasible from the start. Dantzig pivoting with a Bland
/// fallback against cycling.
fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<SimplexSolution> {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![0.0; width];
        row[..n].copy_from_slice(&a[i]);
        row[n + i] = 1.0;
        row[width - 1] = b[i];
        tab.push(row);
    }
    let mut obj = vec![0.0; width];
    for (j, &cj) in c.iter().enumerate() {
        obj[j] = -cj;
    }
    tab.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Degenerate game matrices (many identical columns) stall Dantzig
    // pivoting; switch to Bland's rule early.
    let bland_after = 4 * (m + n).max(16);
    let max_iters = 50 * (m + n).max(16);
    for iter in 0..max_iters {
        let bland = iter > bland_after;
        // Entering column.
        let mut enter: Option<usize> = None;
        let mut best = -1e-9;
        for (j, &r) in tab[m].iter().take(n + m).enumerate() {
            if r < -1e-9 {
                if bland {
                    enter = Some(j);
                    break;
                }
                if r < best {
                    best = r;
                    enter = Some(j);
                }
            }
        }
        let Some(col) = enter else {
            // Optimal.
            let mut x = vec![0.0; n];
            for (i, &bi) in basis.iter().enumerate() {
                if bi < n {
                    x[bi] = tab[i][width - 1];
                }
            }
            let duals = (0..m).map(|i| tab[m][n + i]).collect();
            return Ok(SimplexSolution { x, duals });
        };
        // Ratio test.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let coeff = tab[i][col];
            if coeff > 1e-12 {
                let ratio = tab[i][width - 1] / coeff;
                if ratio < best_ratio - 1e-12
                    || (bland
                        && (ratio - best_ratio).abs() <= 1e-12
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return Err(Error::LpFailure(
                "unbounded linear program (impossible for bounded payoffs)".into(),
            ));
        };
        // Pivot.
        let pivot = tab[row][col];
        tab[row].iter_mut().for_each(|x| *x /= pivot);
        let pivot_row = tab[row].clone();
        for (i, current) in tab.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = current[col];
            if factor.abs() < 1e-15 {
                continue;
            }
            for (x, &p) in current.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
        }
        basis[row] = col;
    }
    Err(Error::LpFailure("simplex iteration cap exceeded".into()))
}

/// Exact LP solve of `max_{p''} min_{row} Σ_col g(row,col)·p''(col)`, with
/// both optimal strategies and a duality-gap certificate.
pub fn solve_zero_sum(payoff: &[Vec<f64>]) -> Result<ZeroSumGame> {
    let rows = payoff.len();
    if rows == 0 || payoff[0].is_empty() {
        return Err(Error::LpFailure("empty payoff matrix".into()));
    }
    let cols = payoff[0].len();
    if payoff.iter().any(|r| r.len() != cols) {
        return Err(Error::LpFailure("ragged payoff matrix".into()));
    }
    for row in payoff {
        for &g in row {
            if !g.is_finite() {
                return Err(Error::LpFailure(format!("non-finite payoff entry {g}")));
            }
        }
    }
    // The tableau carries one constraint per game column; wide games (far
    // more strategies than input pairs) solve through the transposed,
    // negated game, whose value and strategies map back exactly:
    // value(G) = −value(−Gᵀ) with the players exchanged.
    if cols > rows {
        let flipped: Vec<Vec<f64>> = (0..cols)
            .map(|j| (0..rows).map(|i| -payoff[i][j]).collect())
            .collect();
        let solved = solve_zero_sum(&flipped)?;
        let game = ZeroSumGame {
            payoff: payoff.to_vec(),
            value: -solved.value,
            row_strategy: solved.col_strategy,
            col_strategy: solved.row_strategy,
            duality_gap: solved.duality_gap,
        };
        return certify(game);
    }
    // Shift strictly positive.
    let min_entry = payoff
        .iter()
        .flat_map(|r| r.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min_entry;
    // Row player LP: max Σ y  s.t.  Bᵀ y ≤ 1, y ≥ 0 (one constraint per
    // column of the game).
    let a: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| payoff[i][j] + shift).collect())
        .collect();
    let b = vec![1.0; cols];
    let c = vec![1.0; rows];
    let sol = simplex_max(&a, &b, &c)?;
    let total_y: f64 = sol.x.iter().sum();
    let total_w: f64 = sol.duals.iter().sum();
    if total_y <= 0.0 || total_w <= 0.0 {
        return Err(Error::LpFailure(
            "degenerate solve: zero strategy mass".into(),
        ));
    }
    let row_strategy: Vec<f64> = sol.x.iter().map(|y| (y / total_y).max(0.0)).collect();
    let col_strategy: Vec<f64> = sol.duals.iter().map(|w| (w / total_w).max(0.0)).collect();
    let value_lp = 1.0 / total_y - shift;
    certify(ZeroSumGame {
        payoff: payoff.to_vec(),
        value: value_lp,
        row_strategy,
        col_strategy,
        duality_gap: f64::NAN,
    })
}

/// Recomputes both strategy guarantees straight from the game matrix and
/// enforces the duality-gap certificate; the stored value is checked against
/// the column player's guarantee.
fn certify(mut game: ZeroSumGame) -> Result<ZeroSumGame> {
    let rows = game.payoff.len();
    let cols = game.payoff[0].len();
    let col_guarantee = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| game.payoff[i][j] * game.col_strategy[j])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    let row_exposure = (0..cols)
        .map(|j| {
            (0..rows)
                .map(|i| game.payoff[i][j] * game.row_strategy[i])
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let duality_gap = row_exposure - col_guarantee;
    if duality_gap.abs() > 1e-9 {
        return Err(Error::LpFailure(format!(
            "duality gap {duality_gap:.3e} exceeds certificate tolerance"
        )));
    }
    if (game.value - col_guarantee).abs() > 1e-9 {
        return Err(Error::LpFailure(format!(
            "LP value {} inconsistent with strategy guarantee {col_guarantee}",
            game.value
        )));
    }
    game.duality_gap = duality_gap;
    Ok(game)
}
