//! Box-and-halfspace polytopes: vertex enumeration, projection, and set distances.
//!
//! Budget sets, tied demand sets and Leontief slack regions are all of the form
//! `{ lo <= x <= hi, w . x <= b }` (or `= b`), so one small toolkit covers them.

/// Hard limit on the number of non-degenerate coordinates enumerated.
pub const MAX_FREE_COORDS: usize = 16;

/// Whether the linear constraint is an inequality or a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cut {
    AtMost,
    Exactly,
}

/// Vertices of `{ lo <= x <= hi, weights . x (cut) bound }` with `weights >= 0`.
///
/// Returns `None` when more than [`MAX_FREE_COORDS`] coordinates have `lo < hi`.
/// Vertices come out in a deterministic order and are deduplicated at `tol`.
pub fn box_cut_vertices(
    lo: &[f64],
    hi: &[f64],
    weights: &[f64],
    bound: f64,
    cut: Cut,
    tol: f64,
) -> Option<Vec<Vec<f64>>> {
    let dim = lo.len();
    let free: Vec<usize> = (0..dim).filter(|&j| hi[j] - lo[j] > tol).collect();
    if free.len() > MAX_FREE_COORDS {
        return None;
    }
    let base: Vec<f64> = lo.to_vec();
    let scale = bound.abs().max(1.0);
    let mut out: Vec<Vec<f64>> = Vec::new();

    let corner = |mask: u32, skip: Option<usize>| -> Vec<f64> {
        let mut x = base.clone();
        for (bit, &j) in free.iter().enumerate() {
            if Some(bit) == skip {
                continue;
            }
            if mask & (1 << bit) != 0 {
                x[j] = hi[j];
            }
        }
        x
    };

    // Box corners that satisfy the cut.
    for mask in 0..(1u32 << free.len()) {
        let x = corner(mask, None);
        let value = dot(weights, &x);
        let keep = match cut {
            Cut::AtMost => value <= bound + tol * scale,
            Cut::Exactly => (value - bound).abs() <= tol * scale,
        };
        if keep {
            push_unique(&mut out, x, tol);
        }
    }

    // Points where the hyperplane crosses a box edge.
    for (bit, &k) in free.iter().enumerate() {
        if weights[k] <= 0.0 {
            continue;
        }
        let others = free.len() - 1;
        for sub in 0..(1u32 << others) {
            // Re-insert a zero bit at position `bit` so `corner` can reuse the mask.
            let low = sub & ((1 << bit) - 1);
            let high = (sub >> bit) << (bit + 1);
            let mut x = corner(low | high, Some(bit));
            x[k] = 0.0;
            let rest = dot(weights, &x);
            let xk = (bound - rest) / weights[k];
            if xk > lo[k] + tol && xk < hi[k] - tol {
                x[k] = xk;
                push_unique(&mut out, x, tol);
            }
        }
    }
    Some(out)
}

fn push_unique(out: &mut Vec<Vec<f64>>, x: Vec<f64>, tol: f64) {
    if !out.iter().any(|y| max_abs_diff(y, &x) <= tol) {
        out.push(x);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Euclidean projection of `y` onto `{ lo <= x <= hi, weights . x <= bound }`.
///
/// Assumes the set is non-empty (`weights . lo <= bound`). The multiplier of the
/// linear constraint is found by bisection on the monotone spend curve.
pub fn project_box_halfspace(y: &[f64], lo: &[f64], hi: &[f64], weights: &[f64], bound: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        y.iter()
            .zip(weights)
            .zip(lo.iter().zip(hi))
            .map(|((yj, wj), (l, h))| (yj - lambda * wj).clamp(*l, *h))
            .collect()
    };
    let x0 = at(0.0);
    if dot(weights, &x0) <= bound {
        return x0;
    }
    let mut low = 0.0;
    let mut high = 1.0;
    while dot(weights, &at(high)) > bound && high < 1e300 {
        high *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (low + high);
        if mid <= low || mid >= high {
            break;
        }
        if dot(weights, &at(mid)) > bound {
            low = mid;
        } else {
            high = mid;
        }
    }
    at(high)
}

/// Distance from `y` to the convex hull of `points`, approximated by the nearest
/// vertex or segment between two vertices. Exact for hulls of at most two points
/// and an upper bound in general.
pub fn hull_distance(y: &[f64], points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        best = best.min(euclidean(y, a));
        for b in &points[i + 1..] {
            best = best.min(segment_distance(y, a, b));
        }
    }
    best
}

fn segment_distance(y: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(bj, aj)| bj - aj).collect();
    let len2 = dot(&ab, &ab);
    if len2 == 0.0 {
        return euclidean(y, a);
    }
    let ay: Vec<f64> = y.iter().zip(a).map(|(yj, aj)| yj - aj).collect();
    let t = (dot(&ay, &ab) / len2).clamp(0.0, 1.0);
    let proj: Vec<f64> = a.iter().zip(&ab).map(|(aj, d)| aj + t * d).collect();
    euclidean(y, &proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn budget_line_slice_of_square() {
        let v = box_cut_vertices(&[0.0, 0.0], &[4.0, 4.0], &[0.5, 0.5], 1.0, Cut::Exactly, 1e-12).unwrap();
        assert_eq!(sorted(v), vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn budget_triangle_inside_square() {
        let v = box_cut_vertices(&[0.0, 0.0], &[4.0, 4.0], &[0.5, 0.5], 1.0, Cut::AtMost, 1e-12).unwrap();
        assert_eq!(sorted(v), vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn zero_weight_coordinate_is_an_interval() {
        let v = box_cut_vertices(&[0.0, 0.0], &[4.0, 4.0], &[1.0, 0.0], 0.0, Cut::AtMost, 1e-12).unwrap();
        assert_eq!(sorted(v), vec![vec![0.0, 0.0], vec![0.0, 4.0]]);
    }

    #[test]
    fn degenerate_box_is_a_point() {
        let v = box_cut_vertices(&[1.0, 2.0], &[1.0, 2.0], &[1.0, 1.0], 3.0, Cut::Exactly, 1e-12).unwrap();
        assert_eq!(v, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn cube_cut_has_hexagon_or_triangle() {
        // Plane x + y + z = 1.5 slices the unit cube in a hexagon.
        let v = box_cut_vertices(&[0.0; 3], &[1.0; 3], &[1.0; 3], 1.5, Cut::Exactly, 1e-12).unwrap();
        assert_eq!(v.len(), 6);
        let v = box_cut_vertices(&[0.0; 3], &[1.0; 3], &[1.0; 3], 0.5, Cut::Exactly, 1e-12).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn projection_onto_budget() {
        let x = project_box_halfspace(&[0.0, 3.0], &[0.0, 0.0], &[4.0, 4.0], &[0.99, 0.01], 0.02);
        assert!((x[1] - 2.0).abs() < 0.05);
        assert!(dot(&[0.99, 0.01], &x) <= 0.02 + 1e-12);
        let inside = project_box_halfspace(&[0.1, 0.1], &[0.0, 0.0], &[4.0, 4.0], &[1.0, 1.0], 1.0);
        assert_eq!(inside, vec![0.1, 0.1]);
    }

    #[test]
    fn hull_distance_segment() {
        let pts = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        assert!(hull_distance(&[1.0, 1.0], &pts) < 1e-12);
        assert!((hull_distance(&[0.0, 0.0], &pts) - 2f64.sqrt()).abs() < 1e-12);
    }
}
