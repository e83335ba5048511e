//! Bounding ellipsoid over live-point cube coordinates, with uniform
//! sampling of its interior.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Smallest half-axis kept after scaling; collapsed directions fall back to
/// a sliver of this width instead of a zero-volume bound.
const MIN_HALF_AXIS: f64 = 1e-9;

#[derive(Debug, Clone)]
enum Bound {
    /// Principal axes `basis` (eigenvector columns) with the given half-axes.
    Ellipsoid {
        basis: DMatrix<f64>,
        half_axes: Vec<f64>,
    },
    /// Axis-aligned box fallback for a fully degenerate point set.
    Box { half_width: f64 },
}

/// The bounding region candidates are drawn from: the covariance ellipsoid
/// of the points, scaled so the farthest point sits on the boundary, then
/// enlarged by (1/efr)^(1/D) per axis so its volume grows by 1/efr.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: DVector<f64>,
    bound: Bound,
}

impl Ellipsoid {
    pub fn bounding(points: &[Vec<f64>], efr: f64) -> Self {
        assert!(!points.is_empty(), "bounding ellipsoid of an empty set");
        let dim = points[0].len();
        let n = points.len() as f64;

        let mut center = DVector::zeros(dim);
        for p in points {
            for d in 0..dim {
                center[d] += p[d];
            }
        }
        center /= n;

        if points.len() == 1 {
            return Self::degenerate(center);
        }

        let mut cov = DMatrix::zeros(dim, dim);
        for p in points {
            for j in 0..dim {
                let dj = p[j] - center[j];
                for k in j..dim {
                    cov[(j, k)] += dj * (p[k] - center[k]);
                }
            }
        }
        for j in 0..dim {
            for k in j..dim {
                cov[(j, k)] /= n;
                cov[(k, j)] = cov[(j, k)];
            }
        }

        let eigen = cov.symmetric_eigen();
        let lambda_max = eigen.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Self::degenerate(center);
        }
        let floor = lambda_max * 1e-24;
        let lambda: Vec<f64> = eigen.eigenvalues.iter().map(|&l| l.max(floor)).collect();

        // scale so the farthest point sits exactly on the boundary
        let mut scale = 0.0f64;
        for p in points {
            let diff = DVector::from_iterator(dim, p.iter().zip(center.iter()).map(|(a, b)| a - b));
            let y = eigen.eigenvectors.transpose() * diff;
            let d2: f64 = y.iter().zip(&lambda).map(|(v, l)| v * v / l).sum();
            scale = scale.max(d2);
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Self::degenerate(center);
        }

        let enlarge = (1.0 / efr).powf(1.0 / dim as f64);
        let half_axes = lambda
            .iter()
            .map(|l| ((scale * l).sqrt() * enlarge).max(MIN_HALF_AXIS))
            .collect();
        Self {
            center,
            bound: Bound::Ellipsoid {
                basis: eigen.eigenvectors,
                half_axes,
            },
        }
    }

    fn degenerate(center: DVector<f64>) -> Self {
        Self {
            center,
            bound: Bound::Box {
                half_width: MIN_HALF_AXIS,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.center.iter().copied().collect()
    }

    /// Half-axis lengths, or the box half-width repeated when degenerate.
    pub fn half_axes(&self) -> Vec<f64> {
        match &self.bound {
            Bound::Ellipsoid { half_axes, .. } => half_axes.clone(),
            Bound::Box { half_width } => vec![*half_width; self.dim()],
        }
    }

    /// Draws a point uniformly from the interior.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let dim = self.dim();
        match &self.bound {
            Bound::Box { half_width } => (0..dim)
                .map(|d| self.center[d] + half_width * (2.0 * rng.random::<f64>() - 1.0))
                .collect(),
            Bound::Ellipsoid { basis, half_axes } => {
                // direction uniform on the sphere, radius ~ U^(1/D)
                let mut g = DVector::from_iterator(
                    dim,
                    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)),
                );
                let mut norm = g.norm();
                while norm == 0.0 {
                    g = DVector::from_iterator(
                        dim,
                        (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)),
                    );
                    norm = g.norm();
                }
                let radius = rng.random::<f64>().powf(1.0 / dim as f64);
                let s = DVector::from_iterator(
                    dim,
                    g.iter()
                        .zip(half_axes)
                        .map(|(v, a)| v / norm * radius * a),
                );
                let x = &self.center + basis * s;
                x.iter().copied().collect()
            }
        }
    }

    /// Whether `x` lies inside (with a small tolerance on the boundary).
    pub fn contains(&self, x: &[f64]) -> bool {
        let dim = self.dim();
        match &self.bound {
            Bound::Box { half_width } => (0..dim)
                .all(|d| (x[d] - self.center[d]).abs() <= half_width * (1.0 + 1e-9)),
            Bound::Ellipsoid { basis, half_axes } => {
                let diff =
                    DVector::from_iterator(dim, x.iter().zip(self.center.iter()).map(|(a, b)| a - b));
                let y = basis.transpose() * diff;
                let d2: f64 = y
                    .iter()
                    .zip(half_axes)
                    .map(|(v, a)| (v / a) * (v / a))
                    .sum();
                d2 <= 1.0 + 1e-9
            }
        }
    }
}
