//! Grid ε-nets over the probability simplex.

use crate::{Error, Result};

/// A finite net over distributions on `w_size` points: every distribution is
/// within total variation `resolution` of some net point.
#[derive(Debug, Clone)]
pub struct SimplexNet {
    pub points: Vec<Vec<f64>>,
    pub resolution: f64,
    /// Grid denominator: coordinates are multiples of `1/grid_n`.
    pub grid_n: usize,
}

impl SimplexNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total variation from `p` to the nearest net point.
    pub fn covering_distance(&self, p: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|q| {
                0.5 * p
                    .iter()
                    .zip(q)
                    .map(|(&a, &b)| (a - b).abs())
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Number of compositions of `n` into `k` nonnegative parts, saturating.
fn composition_count(n: u128, k: u128) -> u128 {
    // C(n + k - 1, k - 1)
    let (mut num, mut den) = (1u128, 1u128);
    let top = n + k - 1;
    for i in 0..(k - 1) {
        num = match num.checked_mul(top - i) {
            Some(v) => v,
            None => return u128::MAX,
        };
        den *= i + 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Builds the grid net with step `s = 2·eps/w_size`: all weight vectors with
/// coordinates `k/N`, `N = ceil(1/s)`. Rounding each coordinate to the grid
/// moves a distribution by at most `w_size·s/2 = eps` in total variation.
pub fn build_simplex_net(w_size: usize, eps: f64, cap: u128) -> Result<SimplexNet> {
    if w_size == 0 {
        return Err(Error::InvalidDistribution("empty outcome set".into()));
    }
    if eps <= 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "net resolution {eps} must be positive"
        )));
    }
    if w_size == 1 {
        return Ok(SimplexNet {
            points: vec![vec![1.0]],
            resolution: eps,
            grid_n: 1,
        });
    }
    let step = 2.0 * eps / w_size as f64;
    let grid_n = (1.0 / step).ceil().max(1.0) as usize;
    let count = composition_count(grid_n as u128, w_size as u128);
    if count > cap {
        return Err(Error::NetTooLarge { size: count, cap });
    }
    let mut points = Vec::with_capacity(count as usize);
    let mut current = vec![0usize; w_size];
    compositions(grid_n, 0, &mut current, &mut points);
    Ok(SimplexNet {
        points,
        resolution: eps,
        grid_n,
    })
}

fn compositions(remaining: usize, slot: usize, current: &mut [usize], out: &mut Vec<Vec<f64>>) {
    if slot == current.len() - 1 {
        current[slot] = remaining;
        let n: f64 = current.iter().sum::<usize>() as f64;
        out.push(current.iter().map(|&k| k as f64 / n).collect());
        return;
    }
    for k in 0..=remaining {
        current[slot] = k;
        compositions(remaining - k, slot + 1, current, out);
    }
}
