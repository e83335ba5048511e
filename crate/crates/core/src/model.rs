//! Priors, likelihoods, and the repartitioning transform.
//!
//! Everything a sampler needs lives behind [`EffectiveModel`]: a factorized
//! prior with finite support, a product likelihood over an observation
//! matrix, and an optional repartition that rewrites the pair (π, L) as an
//! effective pair (π̃, L̃) with the identical product. Samplers explore π̃
//! while the posterior and the evidence stay those of the base pair.

use crate::math;
use thiserror::Error;

/// Errors from model construction and evaluation.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("support interval [{lo}, {hi}] is empty or not finite")]
    BadInterval { lo: f64, hi: f64 },
    #[error("scale parameter must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("beta must lie in [0, 1], got {0}")]
    BetaOutOfRange(f64),
    #[error("unit-cube coordinate must lie in [0, 1], got {0}")]
    OutsideUnitCube(f64),
    #[error("model must have at least one dimension")]
    Empty,
    #[error("observation {row} is not finite in dimension {dim}")]
    NonFiniteObservation { row: usize, dim: usize },
    #[error("substitute prior support must cover the base prior support in dimension {0}")]
    SupportNotCovering(usize),
}

/// A closed, finite interval used as per-dimension prior support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, ModelError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ModelError::BadInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Per-dimension truncation constants for a Gaussian prior.
#[derive(Debug, Clone)]
struct GaussDim {
    /// Standardized bounds (lo - μ)/σ and (hi - μ)/σ.
    a: f64,
    b: f64,
    /// Φ(a) and the survival function at b, kept separately so either tail
    /// can be used without cancellation.
    cdf_lo: f64,
    sf_hi: f64,
    /// Mass Φ(b) - Φ(a) inside the support and its log.
    mass: f64,
    log_mass: f64,
}

fn gauss_dim(mean: f64, std: f64, iv: Interval) -> GaussDim {
    let a = (iv.lo - mean) / std;
    let b = (iv.hi - mean) / std;
    let mass = math::normal_interval_mass(a, b);
    GaussDim {
        a,
        b,
        cdf_lo: math::normal_cdf(a),
        sf_hi: math::normal_sf(b),
        mass,
        log_mass: mass.ln(),
    }
}

#[derive(Debug, Clone)]
enum Dist {
    Gaussian {
        mean: Vec<f64>,
        std: Vec<f64>,
        trunc: Vec<GaussDim>,
    },
    Uniform,
}

/// A factorized prior over a finite box: diagonal Gaussian (truncated and
/// renormalized on its support) or uniform.
#[derive(Debug, Clone)]
pub struct PriorSpec {
    support: Vec<Interval>,
    dist: Dist,
}

impl PriorSpec {
    /// Diagonal Gaussian prior truncated to `support` and renormalized.
    pub fn gaussian(
        mean: Vec<f64>,
        std: Vec<f64>,
        support: Vec<Interval>,
    ) -> Result<Self, ModelError> {
        if support.is_empty() {
            return Err(ModelError::Empty);
        }
        if mean.len() != support.len() {
            return Err(ModelError::DimensionMismatch {
                expected: support.len(),
                got: mean.len(),
            });
        }
        if std.len() != support.len() {
            return Err(ModelError::DimensionMismatch {
                expected: support.len(),
                got: std.len(),
            });
        }
        for &s in &std {
            if !(s.is_finite() && s > 0.0) {
                return Err(ModelError::NonPositiveScale(s));
            }
        }
        let trunc = mean
            .iter()
            .zip(&std)
            .zip(&support)
            .map(|((&m, &s), &iv)| gauss_dim(m, s, iv))
            .collect();
        Ok(Self {
            support,
            dist: Dist::Gaussian { mean, std, trunc },
        })
    }

    /// Uniform prior over the box `support`.
    pub fn uniform(support: Vec<Interval>) -> Result<Self, ModelError> {
        if support.is_empty() {
            return Err(ModelError::Empty);
        }
        Ok(Self {
            support,
            dist: Dist::Uniform,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.support.len()
    }

    #[inline]
    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.dist, Dist::Gaussian { .. })
    }

    /// (mean, std) for a Gaussian prior, `None` for a uniform one.
    pub fn gaussian_params(&self) -> Option<(&[f64], &[f64])> {
        match &self.dist {
            Dist::Gaussian { mean, std, .. } => Some((mean, std)),
            Dist::Uniform => None,
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(&self.support)
                .all(|(&x, iv)| iv.contains(x))
    }

    fn check_dim(&self, len: usize) -> Result<(), ModelError> {
        if len != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// log π(θ); negative infinity outside the support.
    pub fn log_density(&self, theta: &[f64]) -> Result<f64, ModelError> {
        self.check_dim(theta.len())?;
        if !self.contains(theta) {
            return Ok(f64::NEG_INFINITY);
        }
        match &self.dist {
            Dist::Uniform => Ok(-self.log_volume()),
            Dist::Gaussian { mean, std, trunc } => {
                let mut acc = 0.0;
                for d in 0..theta.len() {
                    let z = (theta[d] - mean[d]) / std[d];
                    acc += -std[d].ln() - math::HALF_LN_TWO_PI - 0.5 * z * z - trunc[d].log_mass;
                }
                Ok(acc)
            }
        }
    }

    /// log of the support box volume, Σ_d ln(hi_d - lo_d).
    pub fn log_volume(&self) -> f64 {
        self.support.iter().map(|iv| iv.width().ln()).sum()
    }

    /// Maps a unit-cube point through the per-dimension inverse CDF.
    pub fn transform(&self, u: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(u.len())?;
        for &x in u {
            if !(0.0..=1.0).contains(&x) {
                return Err(ModelError::OutsideUnitCube(x));
            }
        }
        let theta = match &self.dist {
            Dist::Uniform => u
                .iter()
                .zip(&self.support)
                .map(|(&x, iv)| iv.lo + x * iv.width())
                .collect(),
            Dist::Gaussian { mean, std, trunc } => {
                let mut theta = Vec::with_capacity(u.len());
                for d in 0..u.len() {
                    let t = &trunc[d];
                    // lower and upper tail masses of the target quantile,
                    // each formed without cancellation
                    let p = t.cdf_lo + u[d] * t.mass;
                    let q = t.sf_hi + (1.0 - u[d]) * t.mass;
                    let z = if p <= 0.0 {
                        t.a
                    } else if q <= 0.0 {
                        t.b
                    } else if p <= 0.5 {
                        math::normal_quantile(p)
                    } else {
                        -math::normal_quantile(q)
                    };
                    let iv = self.support[d];
                    theta.push((mean[d] + std[d] * z).clamp(iv.lo, iv.hi));
                }
                theta
            }
        };
        Ok(theta)
    }

    /// Marginal CDF of dimension `d` at `x`, the inverse of [`Self::transform`].
    pub fn marginal_cdf(&self, d: usize, x: f64) -> f64 {
        let iv = self.support[d];
        if x <= iv.lo {
            return 0.0;
        }
        if x >= iv.hi {
            return 1.0;
        }
        match &self.dist {
            Dist::Uniform => (x - iv.lo) / iv.width(),
            Dist::Gaussian { mean, std, trunc } => {
                let t = &trunc[d];
                let z = (x - mean[d]) / std[d];
                (math::normal_interval_mass(t.a, z) / t.mass).clamp(0.0, 1.0)
            }
        }
    }

    /// log ∫_R π(θ)^β dθ over the support region.
    ///
    /// The Gaussian case has the closed form (2π)^{D(1-β)/2} |Σ|^{(1-β)/2}
    /// β^{-D/2} times the mass a N(μ, Σ/β) places inside the support, with an
    /// extra factor accounting for the truncated-renormalized base density.
    /// At β = 0 every prior degenerates to the uniform value log vol(R).
    pub fn log_power_norm(&self, beta: f64) -> Result<f64, ModelError> {
        if !(0.0..=1.0).contains(&beta) || beta.is_nan() {
            return Err(ModelError::BetaOutOfRange(beta));
        }
        if beta == 0.0 {
            return Ok(self.log_volume());
        }
        match &self.dist {
            Dist::Uniform => Ok((1.0 - beta) * self.log_volume()),
            Dist::Gaussian { std, trunc, .. } => {
                let root_beta = beta.sqrt();
                let mut acc = 0.0;
                for d in 0..std.len() {
                    let t = &trunc[d];
                    let mass_beta =
                        math::normal_interval_mass(root_beta * t.a, root_beta * t.b);
                    acc += (1.0 - beta) * (std[d].ln() + math::HALF_LN_TWO_PI)
                        - 0.5 * beta.ln()
                        + mass_beta.ln()
                        - beta * t.log_mass;
                }
                Ok(acc)
            }
        }
    }

    /// The normalized power of this prior: π^β renormalized over the support.
    pub fn power_of(&self, beta: f64) -> Result<PriorSpec, ModelError> {
        if !(0.0..=1.0).contains(&beta) || beta.is_nan() {
            return Err(ModelError::BetaOutOfRange(beta));
        }
        if beta == 0.0 {
            return PriorSpec::uniform(self.support.clone());
        }
        match &self.dist {
            Dist::Uniform => Ok(self.clone()),
            Dist::Gaussian { mean, std, .. } => {
                let widened = std.iter().map(|s| s / beta.sqrt()).collect();
                PriorSpec::gaussian(mean.clone(), widened, self.support.clone())
            }
        }
    }

    /// Draws `n` points from the prior through the unit-cube transform.
    pub fn sample<R: rand::Rng>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                let u: Vec<f64> = (0..self.dim()).map(|_| rng.random::<f64>()).collect();
                self.transform(&u).expect("generated cube point is valid")
            })
            .collect()
    }
}

/// Noise family of the observation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    Gaussian,
    Laplace,
}

/// Product likelihood over an N×D observation matrix: independent per-point,
/// per-dimension Gaussian or Laplace densities centred on θ.
#[derive(Debug, Clone)]
pub struct LikelihoodSpec {
    noise: NoiseModel,
    data: Vec<Vec<f64>>,
    scale: Vec<f64>,
    /// θ-independent part of the log-density.
    log_norm: f64,
}

impl LikelihoodSpec {
    /// Gaussian product likelihood with per-dimension noise σ_ξ.
    ///
    /// An empty observation matrix is allowed and gives log L ≡ 0, the
    /// constant-likelihood edge case.
    pub fn gaussian_product(
        data: Vec<Vec<f64>>,
        noise_std: Vec<f64>,
    ) -> Result<Self, ModelError> {
        Self::build(NoiseModel::Gaussian, data, noise_std)
    }

    /// Laplace product likelihood with per-dimension scale b.
    pub fn laplace_product(data: Vec<Vec<f64>>, scale: Vec<f64>) -> Result<Self, ModelError> {
        Self::build(NoiseModel::Laplace, data, scale)
    }

    fn build(noise: NoiseModel, data: Vec<Vec<f64>>, scale: Vec<f64>) -> Result<Self, ModelError> {
        if scale.is_empty() {
            return Err(ModelError::Empty);
        }
        for &s in &scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(ModelError::NonPositiveScale(s));
            }
        }
        for (row, x) in data.iter().enumerate() {
            if x.len() != scale.len() {
                return Err(ModelError::DimensionMismatch {
                    expected: scale.len(),
                    got: x.len(),
                });
            }
            for (dim, v) in x.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFiniteObservation { row, dim });
                }
            }
        }
        let n = data.len() as f64;
        let log_norm = match noise {
            NoiseModel::Gaussian => {
                -n * scale
                    .iter()
                    .map(|s| s.ln() + math::HALF_LN_TWO_PI)
                    .sum::<f64>()
            }
            NoiseModel::Laplace => -n * scale.iter().map(|s| (2.0 * s).ln()).sum::<f64>(),
        };
        Ok(Self {
            noise,
            data,
            scale,
            log_norm,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    #[inline]
    pub fn n_obs(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    #[inline]
    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    #[inline]
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// log L(θ), summed over observations and dimensions.
    pub fn log_density(&self, theta: &[f64]) -> Result<f64, ModelError> {
        if theta.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                got: theta.len(),
            });
        }
        let mut acc = self.log_norm;
        match self.noise {
            NoiseModel::Gaussian => {
                for x in &self.data {
                    for d in 0..theta.len() {
                        let r = theta[d] - x[d];
                        acc -= 0.5 * r * r / (self.scale[d] * self.scale[d]);
                    }
                }
            }
            NoiseModel::Laplace => {
                for x in &self.data {
                    for d in 0..theta.len() {
                        acc -= (theta[d] - x[d]).abs() / self.scale[d];
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// A power repartition: β together with the log-normalization log Z_π(β) of
/// the modified prior over the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepartitionScheme {
    pub beta: f64,
    pub log_zpi: f64,
}

impl RepartitionScheme {
    /// Builds the power scheme for `prior`, computing log Z_π(β) analytically.
    pub fn power(prior: &PriorSpec, beta: f64) -> Result<Self, ModelError> {
        Ok(Self {
            beta,
            log_zpi: prior.log_power_norm(beta)?,
        })
    }
}

#[derive(Debug, Clone)]
enum Repartition {
    Identity,
    Power {
        scheme: RepartitionScheme,
        sampling_prior: PriorSpec,
    },
    General {
        substitute: PriorSpec,
        log_volume: f64,
    },
}

/// The (possibly repartitioned) inference problem handed to samplers.
///
/// The effective pair always satisfies
/// log π̃(θ) + log L̃(θ) = log π(θ) + log L(θ) inside the support, so the
/// posterior and evidence are those of the base pair regardless of the
/// repartition in force.
#[derive(Debug, Clone)]
pub struct EffectiveModel {
    prior: PriorSpec,
    likelihood: LikelihoodSpec,
    repartition: Repartition,
}

impl EffectiveModel {
    /// Identity repartition: samplers see the base pair unchanged.
    pub fn new(prior: PriorSpec, likelihood: LikelihoodSpec) -> Result<Self, ModelError> {
        if prior.dim() != likelihood.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: prior.dim(),
                got: likelihood.dim(),
            });
        }
        Ok(Self {
            prior,
            likelihood,
            repartition: Repartition::Identity,
        })
    }

    /// Power repartition π̃ = π^β / Z_π(β), L̃ = L π^{1-β} Z_π(β).
    pub fn power(
        prior: PriorSpec,
        likelihood: LikelihoodSpec,
        beta: f64,
    ) -> Result<Self, ModelError> {
        let scheme = RepartitionScheme::power(&prior, beta)?;
        let sampling_prior = prior.power_of(beta)?;
        let mut model = Self::new(prior, likelihood)?;
        model.repartition = Repartition::Power {
            scheme,
            sampling_prior,
        };
        Ok(model)
    }

    /// General repartition with an arbitrary substitute prior.
    ///
    /// `substitute` is given as a normalized prior; `log_volume` is
    /// log ∫ π̃ dθ of the (possibly unnormalized) modified prior it stands
    /// for, i.e. π̃ = exp(log_volume) · substitute. The effective likelihood
    /// is forced by the product identity. The substitute must be nonzero
    /// wherever the base prior is, so its support has to cover the base's.
    pub fn general(
        prior: PriorSpec,
        likelihood: LikelihoodSpec,
        substitute: PriorSpec,
        log_volume: f64,
    ) -> Result<Self, ModelError> {
        if substitute.dim() != prior.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: prior.dim(),
                got: substitute.dim(),
            });
        }
        for (d, (b, s)) in prior.support().iter().zip(substitute.support()).enumerate() {
            if s.lo > b.lo || s.hi < b.hi {
                return Err(ModelError::SupportNotCovering(d));
            }
        }
        let mut model = Self::new(prior, likelihood)?;
        model.repartition = Repartition::General {
            substitute,
            log_volume,
        };
        Ok(model)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.prior.dim()
    }

    #[inline]
    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    #[inline]
    pub fn likelihood(&self) -> &LikelihoodSpec {
        &self.likelihood
    }

    /// β of the power scheme; 1 for the identity, `None` for a general pair.
    pub fn beta(&self) -> Option<f64> {
        match &self.repartition {
            Repartition::Identity => Some(1.0),
            Repartition::Power { scheme, .. } => Some(scheme.beta),
            Repartition::General { .. } => None,
        }
    }

    /// The prior the sampler actually draws from (π̃, normalized).
    pub fn sampling_prior(&self) -> &PriorSpec {
        match &self.repartition {
            Repartition::Identity => &self.prior,
            Repartition::Power { sampling_prior, .. } => sampling_prior,
            Repartition::General { substitute, .. } => substitute,
        }
    }

    /// log ∫ π̃ dθ of the modified prior; 0 whenever it is normalized.
    ///
    /// Adding this to a log-evidence computed under the effective pair
    /// recovers the base evidence.
    pub fn log_prior_volume(&self) -> f64 {
        match &self.repartition {
            Repartition::Identity | Repartition::Power { .. } => 0.0,
            Repartition::General { log_volume, .. } => *log_volume,
        }
    }

    /// Maps a unit-cube point through the effective prior's inverse CDF.
    pub fn transform(&self, u: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.sampling_prior().transform(u)
    }

    /// (log π̃(θ), log L̃(θ)); their sum equals log π(θ) + log L(θ).
    ///
    /// Outside the base support both entries are negative infinity.
    pub fn effective_log_pair(&self, theta: &[f64]) -> Result<(f64, f64), ModelError> {
        let log_prior = self.prior.log_density(theta)?;
        if log_prior == f64::NEG_INFINITY {
            return Ok((f64::NEG_INFINITY, f64::NEG_INFINITY));
        }
        let log_lik = self.likelihood.log_density(theta)?;
        match &self.repartition {
            Repartition::Identity => Ok((log_prior, log_lik)),
            Repartition::Power { scheme, .. } => {
                let lp_eff = scheme.beta * log_prior - scheme.log_zpi;
                let ll_eff = log_lik + (1.0 - scheme.beta) * log_prior + scheme.log_zpi;
                Ok((lp_eff, ll_eff))
            }
            Repartition::General {
                substitute,
                log_volume,
            } => {
                let lp_eff = substitute.log_density(theta)? + log_volume;
                let ll_eff = log_prior + log_lik - lp_eff;
                Ok((lp_eff, ll_eff))
            }
        }
    }

    /// log L̃(θ), the quantity nested sampling ranks points by.
    #[inline]
    pub fn log_effective_likelihood(&self, theta: &[f64]) -> Result<f64, ModelError> {
        Ok(self.effective_log_pair(theta)?.1)
    }

    /// log π(θ) + log L(θ) of the base pair (the unnormalized posterior).
    pub fn log_base_product(&self, theta: &[f64]) -> Result<f64, ModelError> {
        let lp = self.prior.log_density(theta)?;
        if lp == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(lp + self.likelihood.log_density(theta)?)
    }
}
