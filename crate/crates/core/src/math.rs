//! Scalar numerics shared across the crate: stable log-sum-exp, the error
//! function family, and the standard normal CDF/quantile pair.
//!
//! The error function uses rational approximations accurate to full double
//! precision, and the complementary form is evaluated directly so deep-tail
//! probabilities keep relative accuracy. That matters here: repartitioned
//! priors place posterior mass at unit-cube coordinates within ~1e-10 of the
//! boundary, where `1 - erf(x)` would lose every significant digit.

/// ln(2π)/2, the normalization constant of a standard normal log-density.
pub const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Stable log(exp(a) + exp(b)).
#[inline]
pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Stable log Σ exp(v_i) over a slice; NEG_INFINITY for an empty slice.
pub fn log_sum_exp_slice(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

// Rational approximations for erf/erfc (Cody 1969), three regions.
// Max relative error ~1e-16, far inside the 1e-12 budget the truncated
// prior transforms rely on.

const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_1e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];
const ERF_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_375_9e0,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const ERF_D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_5e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_6e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];
const ERF_P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_7e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const ERF_Q: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_460_5e0,
    5.279_051_029_514_284e-1,
    6.051_834_131_244_132e-2,
    2.335_204_976_268_691_8e-3,
];

/// erfc(y)·exp(y²) for y in (0.46875, ∞), the shared tail kernel.
fn erfc_scaled_tail(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let ysq = 1.0 / (y * y);
        let mut num = ERF_P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + ERF_P[i]) * ysq;
            den = (den + ERF_Q[i]) * ysq;
        }
        let r = ysq * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (FRAC_1_SQRT_PI - r) / y
    }
}

/// exp(-y²) split so the argument reduction loses no precision.
fn exp_neg_y_squared(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

fn erfc_abs(y: f64) -> f64 {
    if y >= 26.65 {
        // underflows past the smallest positive double
        return 0.0;
    }
    exp_neg_y_squared(y) * erfc_scaled_tail(y)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let ysq = if y > 1e-300 { y * y } else { 0.0 };
        let mut num = ERF_A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + ERF_A[i]) * ysq;
            den = (den + ERF_B[i]) * ysq;
        }
        x * (num + ERF_A[3]) / (den + ERF_B[3])
    } else {
        let e = erfc_abs(y);
        if x > 0.0 {
            1.0 - e
        } else {
            e - 1.0
        }
    }
}

/// Complementary error function, accurate in relative terms for large x.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf(x);
    }
    if x > 0.0 {
        erfc_abs(y)
    } else {
        2.0 - erfc_abs(y)
    }
}

/// Standard normal density φ(z).
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() * (-HALF_LN_TWO_PI).exp()
}

/// Standard normal CDF Φ(z) = erfc(-z/√2)/2.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal survival function 1 - Φ(z), without cancellation.
#[inline]
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Φ(b) - Φ(a) for a ≤ b, evaluated through whichever tail keeps relative
/// accuracy when both endpoints sit on the same side of zero.
pub fn normal_interval_mass(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    let mass = if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    mass.max(0.0)
}

// Acklam's rational approximation of the normal quantile (~1.15e-9 relative),
// then a Newton step against the erfc-based CDF.

const NQ_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239e0,
];
const NQ_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const NQ_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838e0,
    -2.549_732_539_343_734e0,
    4.374_664_141_464_968e0,
    2.938_163_982_698_783e0,
];
const NQ_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996e0,
    3.754_408_661_907_416e0,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((NQ_C[0] * q + NQ_C[1]) * q + NQ_C[2]) * q + NQ_C[3]) * q + NQ_C[4]) * q + NQ_C[5])
            / ((((NQ_D[0] * q + NQ_D[1]) * q + NQ_D[2]) * q + NQ_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((NQ_A[0] * r + NQ_A[1]) * r + NQ_A[2]) * r + NQ_A[3]) * r + NQ_A[4]) * r + NQ_A[5]) * q
            / (((((NQ_B[0] * r + NQ_B[1]) * r + NQ_B[2]) * r + NQ_B[3]) * r + NQ_B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((NQ_C[0] * q + NQ_C[1]) * q + NQ_C[2]) * q + NQ_C[3]) * q + NQ_C[4]) * q + NQ_C[5])
            / ((((NQ_D[0] * q + NQ_D[1]) * q + NQ_D[2]) * q + NQ_D[3]) * q + 1.0)
    }
}

/// Standard normal quantile Φ⁻¹(p) for p in (0, 1).
///
/// Lower-tail arguments keep full relative accuracy; callers that need the
/// upper tail should pass the complement and negate.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile requires p in (0,1), got {p}");
    let z = acklam(p);
    let pdf = normal_pdf(z);
    if pdf > 0.0 && pdf.is_finite() {
        // one Newton step; use whichever tail of the CDF is small
        if p <= 0.5 {
            z - (normal_cdf(z) - p) / pdf
        } else {
            z + (normal_sf(z) - (1.0 - p)) / pdf
        }
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_reference() {
        // reference values computed with extended precision
        assert!((log_sum_exp(0.5, 2.0) - 2.201413277982752).abs() < 1e-14);
        assert!((log_sum_exp(1234.0, 1232.0) - 1234.126928011042972).abs() < 1e-11);
        assert_eq!(log_sum_exp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((log_sum_exp(f64::NEG_INFINITY, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_slice_agrees_with_pairwise() {
        let v = [0.3, -5.0, 2.2, 1.9, -40.0];
        let mut acc = f64::NEG_INFINITY;
        for &x in &v {
            acc = log_sum_exp(acc, x);
        }
        assert!((log_sum_exp_slice(&v) - acc).abs() < 1e-13);
        assert_eq!(log_sum_exp_slice(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn erf_reference_values() {
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(2.0) - 0.995_322_265_018_952_7).abs() < 1e-15);
        assert!((erf(-1.0) + erf(1.0)).abs() < 1e-16);
        assert_eq!(erf(0.0), 0.0);
    }

    #[test]
    fn erfc_keeps_relative_accuracy_in_tail() {
        let cases = [
            (1.0, 0.157_299_207_050_285_13),
            (5.0, 1.537_459_794_428_034_8e-12),
            (10.0, 2.088_487_583_762_544_6e-45),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "erfc({x}) = {got}, want {want}"
            );
        }
        assert!((erfc(-1.0) - (2.0 - erfc(1.0))).abs() < 1e-15);
    }

    #[test]
    fn normal_cdf_and_sf_are_complements() {
        for z in [-8.0, -3.0, -0.7, 0.0, 0.9, 2.5, 6.0] {
            let c = normal_cdf(z) + normal_sf(z);
            assert!((c - 1.0).abs() < 1e-14, "z={z}: {c}");
        }
        // deep-tail value: Φ(-12.5) has no absolute-error representation
        let p = normal_cdf(-12.5);
        assert!(p > 0.0 && p < 1e-30);
        assert!((normal_sf(12.5) - p).abs() <= p * 1e-12);
    }

    #[test]
    fn interval_mass_same_side_keeps_precision() {
        // symmetric: Φ(1) - Φ(-1)
        let m = normal_interval_mass(-1.0, 1.0);
        assert!((m - 0.682_689_492_137_086).abs() < 1e-14);
        // both endpoints deep in the upper tail
        let m = normal_interval_mass(10.0, 11.0);
        let want = normal_sf(10.0) - normal_sf(11.0);
        assert!(m > 0.0 && (m - want).abs() <= want * 1e-12);
        // mirrored interval has the same mass
        let lo = normal_interval_mass(-11.0, -10.0);
        assert!(((lo - m) / m).abs() < 1e-12);
    }

    #[test]
    fn normal_quantile_reference_and_roundtrip() {
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
        assert_eq!(normal_quantile(0.5), 0.0);
        for &p in &[1e-300, 1e-30, 1e-10, 1e-4, 0.3, 0.5, 0.77, 0.9999] {
            let z = normal_quantile(p);
            let back = if z <= 0.0 { normal_cdf(z) } else { 1.0 - normal_sf(z) };
            assert!(
                ((back - p) / p).abs() < 1e-9,
                "p={p}: z={z}, roundtrip={back}"
            );
        }
        // symmetry
        let z = normal_quantile(0.01);
        let z2 = normal_quantile(0.99);
        assert!((z + z2).abs() < 1e-10);
    }
}
