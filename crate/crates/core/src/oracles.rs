//! Ground-truth calculators used by tests, acceptance checks, and the
//! benchmark harness: the conjugate Gaussian posterior in closed form, and
//! adaptive trapezoid quadrature for models without one.

use crate::math;
use crate::model::{Interval, LikelihoodSpec, ModelError, NoiseModel, PriorSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("conjugate posterior requires a Gaussian prior and Gaussian likelihood")]
    NotGaussian,
    #[error("quadrature supports at most {max} dimensions, got {got}")]
    DimensionTooHigh { got: usize, max: usize },
    #[error("quadrature did not converge at the resolution cap; last estimate {last}")]
    NotConverged { last: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Analytic posterior summary: per-dimension mean and standard deviation,
/// plus the log-evidence of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateResult {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub log_evidence: f64,
}

/// Conjugate posterior of a Gaussian prior with a Gaussian product
/// likelihood, per dimension.
///
/// Means and standard deviations are the untruncated conjugate moments,
/// whose posterior precision 1/σ_π² + N/σ_ξ² depends only on the counts and
/// scales, never on the observed values. The log-evidence carries the
/// truncation correction for the renormalized prior and for posterior mass
/// clipped by the support (negligible unless the support cuts into either
/// distribution).
pub fn conjugate_posterior(
    prior: &PriorSpec,
    lik: &LikelihoodSpec,
) -> Result<ConjugateResult, OracleError> {
    let (prior_mean, prior_std) = prior.gaussian_params().ok_or(OracleError::NotGaussian)?;
    if lik.noise() != NoiseModel::Gaussian {
        return Err(OracleError::NotGaussian);
    }
    if prior.dim() != lik.dim() {
        return Err(OracleError::Model(ModelError::DimensionMismatch {
            expected: prior.dim(),
            got: lik.dim(),
        }));
    }
    let n = lik.n_obs() as f64;
    let mut mean = Vec::with_capacity(prior.dim());
    let mut std = Vec::with_capacity(prior.dim());
    let mut log_evidence = 0.0;
    for d in 0..prior.dim() {
        let mu = prior_mean[d];
        let sp = prior_std[d];
        let sx = lik.scale()[d];
        let sum_x: f64 = lik.data().iter().map(|row| row[d]).sum();
        let sum_x2: f64 = lik.data().iter().map(|row| row[d] * row[d]).sum();

        let precision = 1.0 / (sp * sp) + n / (sx * sx);
        let m = (mu / (sp * sp) + sum_x / (sx * sx)) / precision;
        let s = precision.sqrt().recip();

        // marginal likelihood by completing the square in θ
        let quad = sum_x2 / (sx * sx) + mu * mu / (sp * sp) - m * m * precision;
        log_evidence += -n * (sx.ln() + math::HALF_LN_TWO_PI) - sp.ln() - 0.5 * precision.ln()
            - 0.5 * quad;

        // truncation: the base prior is renormalized on its support, and the
        // support may clip posterior mass
        let iv = prior.support()[d];
        let prior_mass =
            math::normal_interval_mass((iv.lo - mu) / sp, (iv.hi - mu) / sp);
        let post_mass = math::normal_interval_mass((iv.lo - m) / s, (iv.hi - m) / s);
        log_evidence += post_mass.ln() - prior_mass.ln();

        mean.push(m);
        std.push(s);
    }
    Ok(ConjugateResult {
        mean,
        std,
        log_evidence,
    })
}

/// One adaptive log-space trapezoid pass over `iv`, returning the
/// log-integral together with the first two moments of the integrand.
struct Quad1d {
    log_integral: f64,
    mean: f64,
    std: f64,
}

fn trapezoid_1d(log_f: &dyn Fn(f64) -> f64, iv: Interval, points: usize) -> Quad1d {
    let h = iv.width() / (points - 1) as f64;
    let mut log_terms = Vec::with_capacity(points);
    let mut xs = Vec::with_capacity(points);
    for i in 0..points {
        let x = iv.lo + h * i as f64;
        let w: f64 = if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
        xs.push(x);
        log_terms.push(log_f(x) + w.ln());
    }
    let peak = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Quad1d {
            log_integral: f64::NEG_INFINITY,
            mean: f64::NAN,
            std: f64::NAN,
        };
    }
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (x, lt) in xs.iter().zip(&log_terms) {
        let w = (lt - peak).exp();
        s0 += w;
        s1 += w * x;
        s2 += w * x * x;
    }
    let mean = s1 / s0;
    let var = (s2 / s0 - mean * mean).max(0.0);
    Quad1d {
        log_integral: peak + s0.ln() + h.ln(),
        mean,
        std: var.sqrt(),
    }
}

/// Runs nested trapezoid refinements (65, 129, … points) until successive
/// log-integrals differ by less than 1e-6, up to `max_points`.
fn adaptive_1d(
    log_f: &dyn Fn(f64) -> f64,
    iv: Interval,
    max_points: usize,
) -> Result<Quad1d, OracleError> {
    const TOL: f64 = 1e-6;
    let mut points = 65;
    let mut last = trapezoid_1d(log_f, iv, points);
    loop {
        points = 2 * points - 1;
        if points > max_points {
            return Err(OracleError::NotConverged {
                last: last.log_integral,
            });
        }
        let next = trapezoid_1d(log_f, iv, points);
        let close = if last.log_integral == f64::NEG_INFINITY {
            next.log_integral == f64::NEG_INFINITY
        } else {
            (next.log_integral - last.log_integral).abs() < TOL
        };
        if close {
            return Ok(next);
        }
        last = next;
    }
}

/// log ∫ L(θ) π(θ) dθ over the support by adaptive trapezoid refinement.
///
/// Supports one and two dimensions; the two-dimensional rule is the tensor
/// trapezoid and makes no factorization assumption.
pub fn quadrature_evidence(
    prior: &PriorSpec,
    lik: &LikelihoodSpec,
    resolution: usize,
) -> Result<f64, OracleError> {
    match prior.dim() {
        1 => {
            let log_f = |x: f64| {
                let theta = [x];
                let lp = prior.log_density(&theta).expect("dim checked");
                if lp == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                lp + lik.log_density(&theta).expect("dim checked")
            };
            Ok(adaptive_1d(&log_f, prior.support()[0], resolution)?.log_integral)
        }
        2 => {
            const TOL: f64 = 1e-6;
            let mut points = 65;
            let mut last = tensor_2d(prior, lik, points);
            loop {
                points = 2 * points - 1;
                if points > resolution {
                    return Err(OracleError::NotConverged { last });
                }
                let next = tensor_2d(prior, lik, points);
                if (next - last).abs() < TOL {
                    return Ok(next);
                }
                last = next;
            }
        }
        d => Err(OracleError::DimensionTooHigh { got: d, max: 2 }),
    }
}

fn tensor_2d(prior: &PriorSpec, lik: &LikelihoodSpec, points: usize) -> f64 {
    let (iv0, iv1) = (prior.support()[0], prior.support()[1]);
    let h0 = iv0.width() / (points - 1) as f64;
    let h1 = iv1.width() / (points - 1) as f64;
    let mut log_terms = Vec::with_capacity(points * points);
    for i in 0..points {
        let x = iv0.lo + h0 * i as f64;
        let wi: f64 = if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
        for j in 0..points {
            let y = iv1.lo + h1 * j as f64;
            let wj: f64 = if j == 0 || j == points - 1 { 0.5 } else { 1.0 };
            let theta = [x, y];
            let lp = prior.log_density(&theta).expect("dim checked");
            let term = if lp == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                lp + lik.log_density(&theta).expect("dim checked") + (wi * wj).ln()
            };
            log_terms.push(term);
        }
    }
    math::log_sum_exp_slice(&log_terms) + h0.ln() + h1.ln()
}

/// Posterior summary by per-dimension quadrature.
///
/// Valid because every model in this crate factorizes across dimensions
/// (diagonal priors, per-dimension product likelihoods), so the posterior is
/// a product of one-dimensional posteriors and the evidence is the product
/// of the per-dimension integrals. Works for any dimension and either noise
/// model; it is the moment oracle for the Laplace likelihood.
pub fn quadrature_posterior(
    prior: &PriorSpec,
    lik: &LikelihoodSpec,
    resolution: usize,
) -> Result<ConjugateResult, OracleError> {
    if prior.dim() != lik.dim() {
        return Err(OracleError::Model(ModelError::DimensionMismatch {
            expected: prior.dim(),
            got: lik.dim(),
        }));
    }
    let mut mean = Vec::with_capacity(prior.dim());
    let mut std = Vec::with_capacity(prior.dim());
    let mut log_evidence = 0.0;
    for d in 0..prior.dim() {
        let marginal_prior = slice_prior(prior, d)?;
        let marginal_lik = slice_likelihood(lik, d)?;
        let log_f = |x: f64| {
            let theta = [x];
            let lp = marginal_prior.log_density(&theta).expect("1d");
            if lp == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            lp + marginal_lik.log_density(&theta).expect("1d")
        };
        let q = adaptive_1d(&log_f, prior.support()[d], resolution)?;
        log_evidence += q.log_integral;
        mean.push(q.mean);
        std.push(q.std);
    }
    Ok(ConjugateResult {
        mean,
        std,
        log_evidence,
    })
}

fn slice_prior(prior: &PriorSpec, d: usize) -> Result<PriorSpec, ModelError> {
    let support = vec![prior.support()[d]];
    match prior.gaussian_params() {
        Some((mean, std)) => PriorSpec::gaussian(vec![mean[d]], vec![std[d]], support),
        None => PriorSpec::uniform(support),
    }
}

fn slice_likelihood(lik: &LikelihoodSpec, d: usize) -> Result<LikelihoodSpec, ModelError> {
    let column: Vec<Vec<f64>> = lik.data().iter().map(|row| vec![row[d]]).collect();
    let scale = vec![lik.scale()[d]];
    match lik.noise() {
        NoiseModel::Gaussian => LikelihoodSpec::gaussian_product(column, scale),
        NoiseModel::Laplace => LikelihoodSpec::laplace_product(column, scale),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn toy_prior() -> PriorSpec {
        PriorSpec::gaussian(vec![0.0], vec![4.0], vec![iv(-50.0, 50.0)]).unwrap()
    }

    #[test]
    fn posterior_std_depends_only_on_counts_and_scales() {
        // (1/16 + 20)^(-1/2) ≈ 0.2233 for any observed values
        for x in [5.0, 30.0, 40.0] {
            let lik =
                LikelihoodSpec::gaussian_product(vec![vec![x]; 20], vec![1.0]).unwrap();
            let post = conjugate_posterior(&toy_prior(), &lik).unwrap();
            assert!((post.std[0] - 0.223).abs() < 5e-4, "std={}", post.std[0]);
        }
    }

    #[test]
    fn posterior_mean_shrinks_toward_prior() {
        let lik = LikelihoodSpec::gaussian_product(vec![vec![40.0]; 20], vec![1.0]).unwrap();
        let post = conjugate_posterior(&toy_prior(), &lik).unwrap();
        // 40·(20/(20 + 1/16))
        assert!((post.mean[0] - 39.875).abs() < 1e-3, "mean={}", post.mean[0]);
    }

    #[test]
    fn no_observations_recover_the_prior() {
        let lik = LikelihoodSpec::gaussian_product(vec![], vec![1.0]).unwrap();
        let post = conjugate_posterior(&toy_prior(), &lik).unwrap();
        assert!((post.mean[0] - 0.0).abs() < 1e-12);
        assert!((post.std[0] - 4.0).abs() < 1e-12);
        assert!(post.log_evidence.abs() < 1e-12);
    }

    #[test]
    fn conjugate_rejects_non_gaussian_inputs() {
        let lap = LikelihoodSpec::laplace_product(vec![vec![0.0]], vec![0.1]).unwrap();
        assert!(matches!(
            conjugate_posterior(&toy_prior(), &lap),
            Err(OracleError::NotGaussian)
        ));
        let uni = PriorSpec::uniform(vec![iv(-1.0, 1.0)]).unwrap();
        let gau = LikelihoodSpec::gaussian_product(vec![vec![0.0]], vec![1.0]).unwrap();
        assert!(conjugate_posterior(&uni, &gau).is_err());
    }

    #[test]
    fn quadrature_matches_conjugate_log_evidence() {
        let lik = LikelihoodSpec::gaussian_product(
            vec![vec![4.7], vec![5.4], vec![5.1], vec![4.9]],
            vec![1.0],
        )
        .unwrap();
        let prior = toy_prior();
        let conj = conjugate_posterior(&prior, &lik).unwrap();
        let quad = quadrature_evidence(&prior, &lik, 1 << 18).unwrap();
        assert!(
            (conj.log_evidence - quad).abs() < 1e-5,
            "conjugate={}, quadrature={}",
            conj.log_evidence,
            quad
        );
    }

    #[test]
    fn constant_likelihood_integrates_to_zero_log() {
        let lik = LikelihoodSpec::gaussian_product(vec![], vec![1.0]).unwrap();
        let quad = quadrature_evidence(&toy_prior(), &lik, 1 << 14).unwrap();
        assert!(quad.abs() < 1e-9, "log Z = {quad}");
    }

    #[test]
    fn laplace_evidence_is_finite_and_posterior_sane() {
        let prior = PriorSpec::gaussian(vec![0.0], vec![0.4], vec![iv(-5.0, 5.0)]).unwrap();
        let lik = LikelihoodSpec::laplace_product(vec![vec![0.0]], vec![0.1]).unwrap();
        let z = quadrature_evidence(&prior, &lik, 1 << 18).unwrap();
        assert!(z.is_finite());
        let post = quadrature_posterior(&prior, &lik, 1 << 18).unwrap();
        assert!((post.log_evidence - z).abs() < 1e-5);
        assert!(post.mean[0].abs() < 0.02);
        assert!(post.std[0] > 0.0 && post.std[0] < 0.4);
    }

    #[test]
    fn factorized_and_tensor_quadrature_agree_in_2d() {
        let prior = PriorSpec::gaussian(
            vec![0.0, 0.0],
            vec![0.4, 0.4],
            vec![iv(-5.0, 5.0), iv(-5.0, 5.0)],
        )
        .unwrap();
        let lik =
            LikelihoodSpec::gaussian_product(vec![vec![1.5, 1.4]], vec![0.1, 0.1]).unwrap();
        let tensor = quadrature_evidence(&prior, &lik, 4097).unwrap();
        let f = quadrature_posterior(&prior, &lik, 1 << 16).unwrap();
        assert!(
            (tensor - f.log_evidence).abs() < 1e-5,
            "tensor={tensor}, factorized={}",
            f.log_evidence
        );
        let conj = conjugate_posterior(&prior, &lik).unwrap();
        assert!((conj.log_evidence - tensor).abs() < 1e-5);
        for d in 0..2 {
            assert!((conj.mean[d] - f.mean[d]).abs() < 1e-6);
            assert!((conj.std[d] - f.std[d]).abs() < 1e-6);
        }
    }

    #[test]
    fn refinement_error_shrinks_monotonically() {
        let prior = toy_prior();
        let lik = LikelihoodSpec::gaussian_product(vec![vec![5.0]; 3], vec![1.0]).unwrap();
        let log_f = |x: f64| {
            let theta = [x];
            prior.log_density(&theta).unwrap() + lik.log_density(&theta).unwrap()
        };
        let reference = adaptive_1d(&log_f, prior.support()[0], 1 << 18)
            .unwrap()
            .log_integral;
        let mut errs = Vec::new();
        for points in [129usize, 257, 513, 1025] {
            let q = trapezoid_1d(&log_f, prior.support()[0], points);
            errs.push((q.log_integral - reference).abs());
        }
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "errors not decreasing: {errs:?}");
        }
    }

    #[test]
    fn resolution_cap_surfaces_as_error() {
        let prior = toy_prior();
        let lik = LikelihoodSpec::gaussian_product(vec![vec![5.0]; 20], vec![0.01]).unwrap();
        // a posterior ~5e-4 wide cannot converge with ≤129 points on [-50,50]
        match quadrature_evidence(&prior, &lik, 129) {
            Err(OracleError::NotConverged { last }) => assert!(last.is_finite() || last == f64::NEG_INFINITY),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
