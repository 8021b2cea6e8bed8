use nalgebra::{DMatrix, SymmetricEigen};

use super::DistanceMatrix;

/// Classical (Torgerson) multidimensional scaling.
///
/// Double-centres the squared distances, `B = -½ J D² J`, and takes the
/// leading `dims` eigenpairs of `B`, with negative eigenvalues clamped to
/// zero. Each axis is oriented so that its largest-magnitude coordinate is
/// positive. Returns one `dims`-long row per point, mean-centred.
pub fn classical_mds(d: &DistanceMatrix, dims: usize) -> Vec<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j).powi(2));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand)
    });
    let eigen = SymmetricEigen::new(b);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    let mut coords = vec![vec![0.0; dims]; n];
    for (axis, &k) in order.iter().take(dims).enumerate() {
        let scale = eigen.eigenvalues[k].max(0.0).sqrt();
        let column: Vec<f64> = (0..n).map(|i| eigen.eigenvectors[(i, k)] * scale).collect();
        let mean = column.iter().sum::<f64>() / n as f64;
        let mut column: Vec<f64> = column.into_iter().map(|v| v - mean).collect();
        let pivot = column
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if pivot < 0.0 {
            column.iter_mut().for_each(|v| *v = -*v);
        }
        for (i, v) in column.into_iter().enumerate() {
            coords[i][axis] = v;
        }
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn matrix(values: Vec<f64>) -> DistanceMatrix {
        let n = (values.len() as f64).sqrt() as usize;
        DistanceMatrix::new((0..n).map(|i| i.to_string()).collect(), values).unwrap()
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn two_points() {
        let c = classical_mds(&matrix(vec![0.0, 0.7, 0.7, 0.0]), 2);
        assert_abs_diff_eq!(dist(&c[0], &c[1]), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(c[0][1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn equilateral_triangle() {
        let c = classical_mds(
            &matrix(vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]),
            2,
        );
        for i in 0..3 {
            for j in 0..i {
                assert_abs_diff_eq!(dist(&c[i], &c[j]), 1.0, epsilon = 1e-9);
            }
        }
        let mean: f64 = c.iter().map(|p| p[0]).sum();
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_point_and_identical_points() {
        assert_eq!(classical_mds(&matrix(vec![0.0]), 2), vec![vec![0.0, 0.0]]);
        let c = classical_mds(&matrix(vec![0.0; 9]), 2);
        assert!(c.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn orientation_is_canonical() {
        let pts = [[0.1, 0.0], [0.4, 0.1], [0.0, 0.3], [0.2, 0.2]];
        let mut v = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                v[i * 4 + j] = dist(&pts[i], &pts[j]);
            }
        }
        let c = classical_mds(&matrix(v), 2);
        for axis in 0..2 {
            let pivot =
                c.iter()
                    .map(|p| p[axis])
                    .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            assert!(pivot > 0.0);
        }
    }
}
