//! Exact simplex over `A x <= b, x >= 0` with `b >= 0`, used to drop
//! redundant rows between elimination steps.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

type Q = Ratio<i128>;

/// Is `max c·x` over the polyhedron strictly greater than `limit`?
/// Requires every `b` to be non-negative so the origin is a feasible start.
pub(super) fn exceeds(a: &[&[i128]], b: &[i128], c: &[i128], limit: i128) -> bool {
    let m = a.len();
    let n = c.len();
    let mut t: Vec<Vec<Q>> = a
        .iter()
        .map(|row| row.iter().map(|&v| Q::from(v)).collect())
        .collect();
    let mut rhs: Vec<Q> = b.iter().map(|&v| Q::from(v)).collect();
    let mut obj: Vec<Q> = c.iter().map(|&v| Q::from(v)).collect();
    let mut z = Q::zero();
    let limit = Q::from(limit);
    let mut col_label: Vec<usize> = (0..n).collect();
    let mut row_label: Vec<usize> = (n..n + m).collect();
    loop {
        if z > limit {
            return true;
        }
        let Some(k) = (0..n)
            .filter(|&j| obj[j].is_positive())
            .min_by_key(|&j| col_label[j])
        else {
            return false;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][k].is_positive() {
                let ratio = rhs[i] / t[i][k];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && row_label[i] < row_label[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return true;
        };
        let p = t[r][k];
        for j in 0..n {
            if j != k {
                t[r][j] = t[r][j] / p;
            }
        }
        rhs[r] = rhs[r] / p;
        t[r][k] = Q::one() / p;
        for i in 0..m {
            if i == r || t[i][k].is_zero() {
                continue;
            }
            let f = t[i][k];
            for j in 0..n {
                if j != k {
                    let d = f * t[r][j];
                    t[i][j] -= d;
                }
            }
            let d = f * rhs[r];
            rhs[i] -= d;
            t[i][k] = -f / p;
        }
        let f = obj[k];
        for j in 0..n {
            if j != k {
                let d = f * t[r][j];
                obj[j] -= d;
            }
        }
        z += f * rhs[r];
        obj[k] = -f / p;
        std::mem::swap(&mut col_label[k], &mut row_label[r]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_maximum() {
        // x <= 2, y <= 3, x + y <= 4: max x + y is 4.
        let rows: [&[i128]; 3] = [&[1, 0], &[0, 1], &[1, 1]];
        assert!(exceeds(&rows, &[2, 3, 4], &[1, 1], 3));
        assert!(!exceeds(&rows, &[2, 3, 4], &[1, 1], 4));
        assert!(!exceeds(&rows[..2], &[2, 3], &[1, 1], 5));
    }

    #[test]
    fn unbounded_direction() {
        let rows: [&[i128]; 1] = [&[1, -1]];
        assert!(exceeds(&rows, &[1], &[0, 1], 1000));
    }
}
