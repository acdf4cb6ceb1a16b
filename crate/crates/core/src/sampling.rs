//! Latin hypercube sampling and additive noise around nominal values.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{MoropError, Result};
use crate::model::NoiseSpec;

/// `n_samples x d` matrix of unit-interval samples, stored row-major.
///
/// Every column holds exactly one entry in each stratum `[k/n, (k+1)/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSampleMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl UnitSampleMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }
}

/// Seeded generator used everywhere randomness is needed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream index (e.g. a solution's archive position) so each
/// stream is independent of the order in which streams are consumed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 finaliser over the combined state
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Latin hypercube sample of `n_samples` points in `[0,1)^d`.
///
/// Each column uses its own random permutation of the strata and a uniform jitter
/// inside each stratum.
pub fn lhs(n_samples: usize, d: usize, seed: u64) -> Result<UnitSampleMatrix> {
    if n_samples == 0 || d == 0 {
        return Err(MoropError::Config(format!(
            "lhs needs n_samples >= 1 and d >= 1 (got {n_samples}, {d})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let n = n_samples as f64;
    let mut data = vec![0.0; n_samples * d];
    let mut perm: Vec<usize> = (0..n_samples).collect();
    for j in 0..d {
        perm.shuffle(&mut rng);
        for (i, &stratum) in perm.iter().enumerate() {
            let jitter: f64 = rng.random();
            data[i * d + j] = in_stratum(stratum, jitter, n);
        }
    }
    Ok(UnitSampleMatrix { rows: n_samples, cols: d, data })
}

/// `(k + jitter) / n`, nudged down if rounding pushed it into stratum `k + 1`.
fn in_stratum(k: usize, jitter: f64, n: f64) -> f64 {
    let mut u = (k as f64 + jitter) / n;
    while u > 0.0 && ((u * n).floor() as usize > k || u >= 1.0) {
        u = u.next_down();
    }
    u
}

/// Perturbs `nominal` element-wise using one row of unit samples.
///
/// * uniform(w): `nominal + (2u - 1) w`
/// * normal(s): `nominal + s * inv_normal_cdf(u)`
/// * none: unchanged
pub fn apply_noise(nominal: &[f64], specs: &[NoiseSpec], u: &[f64]) -> Result<Vec<f64>> {
    crate::model::check_len("noise specs", nominal.len(), specs.len())?;
    crate::model::check_len("sample row", nominal.len(), u.len())?;
    nominal
        .iter()
        .zip(specs)
        .zip(u)
        .map(|((&x0, spec), &ui)| {
            if !(0.0..1.0).contains(&ui) {
                return Err(MoropError::SampleOutOfRange(ui));
            }
            Ok(match *spec {
                NoiseSpec::None => x0,
                NoiseSpec::Uniform { half_width } => x0 + (2.0 * ui - 1.0) * half_width,
                NoiseSpec::Normal { std } => {
                    if std == 0.0 {
                        x0
                    } else if ui == 0.0 {
                        // Phi^-1(0) = -inf; the smallest stratum edge maps to the far tail.
                        x0 + std * inv_normal_cdf(f64::MIN_POSITIVE)
                    } else {
                        x0 + std * inv_normal_cdf(ui)
                    }
                }
            })
        })
        .collect()
}

/// Inverse of the standard normal CDF, `-sqrt(2) erfc^-1(2u)`.
pub fn inv_normal_cdf(u: f64) -> f64 {
    if u.is_nan() || !(0.0..=1.0).contains(&u) {
        return f64::NAN;
    }
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_stratified(m: &UnitSampleMatrix) {
        let n = m.rows();
        for j in 0..m.cols() {
            let mut seen = vec![false; n];
            for u in m.column(j) {
                assert!((0.0..1.0).contains(&u), "{u} outside [0,1)");
                let k = (u * n as f64).floor() as usize;
                assert!(!seen[k], "stratum {k} hit twice in column {j}");
                seen[k] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn lhs_quartiles() {
        let m = lhs(4, 2, 7).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 2));
        assert_stratified(&m);
    }

    #[test]
    fn lhs_single_row() {
        let m = lhs(1, 3, 0).unwrap();
        assert_eq!(m.rows(), 1);
        assert!(m.row(0).iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn lhs_rejects_empty_shapes() {
        assert!(lhs(0, 2, 1).is_err());
        assert!(lhs(3, 0, 1).is_err());
    }

    #[test]
    fn lhs_moments() {
        let m = lhs(1000, 4, 2024).unwrap();
        for j in 0..4 {
            let col = m.column(j);
            let mean = col.iter().sum::<f64>() / 1000.0;
            let var = col.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / 999.0;
            assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
            assert!((var - 1.0 / 12.0).abs() < 0.1 / 12.0, "var {var}");
        }
    }

    #[test]
    fn lhs_is_seed_deterministic() {
        let a = lhs(50, 3, 99).unwrap();
        let b = lhs(50, 3, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, lhs(50, 3, 100).unwrap());
    }

    #[test]
    fn in_stratum_never_escapes() {
        let jitter = 1.0f64.next_down();
        for n in [1usize, 3, 7, 10, 1000, 4097] {
            for k in [0, n / 2, n - 1] {
                let u = in_stratum(k, jitter, n as f64);
                assert!(u < 1.0);
                assert_eq!((u * n as f64).floor() as usize, k);
            }
        }
    }

    #[test]
    fn noise_examples() {
        let out = apply_noise(&[72.0], &[NoiseSpec::Uniform { half_width: 2.0 }], &[0.5]).unwrap();
        assert_eq!(out, vec![72.0]);
        let out = apply_noise(&[10.0], &[NoiseSpec::Normal { std: 2.0 }], &[0.5]).unwrap();
        assert_eq!(out, vec![10.0]);
        let top = 1.0f64.next_down();
        let out = apply_noise(&[0.737], &[NoiseSpec::Uniform { half_width: 0.005 }], &[top]).unwrap();
        assert!(out[0] < 0.742 + 1e-15 && out[0] > 0.742 - 1e-12);
        let out = apply_noise(&[3.0, 4.0], &[NoiseSpec::None, NoiseSpec::None], &[0.1, 0.9]).unwrap();
        assert_eq!(out, vec![3.0, 4.0]);
    }

    #[test]
    fn noise_rejects_out_of_range_sample() {
        let e = apply_noise(&[1.0], &[NoiseSpec::None], &[1.0]).unwrap_err();
        assert_eq!(e.kind(), "sample-out-of-range");
        assert!(apply_noise(&[1.0], &[NoiseSpec::None], &[-0.1]).is_err());
        assert!(apply_noise(&[1.0, 2.0], &[NoiseSpec::None], &[0.1, 0.2]).is_err());
    }

    // 50-digit reference values of sqrt(2) * erfinv(2u - 1) for the exact binary value of u.
    const INV_NORMAL_ORACLE: &[(f64, f64)] = &[
        (1e-12, -7.0344838253011319326),
        (1e-10, -6.3613409024040561991),
        (1e-08, -5.6120012441747887279),
        (1e-06, -4.7534243088228989573),
        (0.0001, -3.7190164854556805523),
        (0.001, -3.0902323061678135354),
        (0.01, -2.3263478740408410931),
        (0.02425, -1.9729610513118848376),
        (0.05, -1.644853626951472688),
        (0.1, -1.2815515655446004353),
        (0.2, -0.84162123357291416552),
        (0.3, -0.52440051270804081597),
        (0.4, -0.25334710313579974132),
        (0.5, 0.0),
        (0.6, 0.25334710313579974132),
        (0.7, 0.52440051270804065631),
        (0.8, 0.8416212335729143638),
        (0.9, 1.2815515655446005935),
        (0.95, 1.6448536269514722843),
        (0.97575, 1.9729610513118849594),
        (0.99, 2.3263478740408407676),
        (0.999, 3.0902323061678132778),
        (0.9999, 3.7190164854557083867),
        (0.999999, 4.7534243088170877657),
        (0.99999999, 5.6120012433055049826),
        (0.9999999999, 6.3613408896974218642),
        (0.999999999999, 7.0344869100478352057),
    ];

    #[test]
    fn inverse_normal_matches_high_precision_oracle() {
        for &(u, expected) in INV_NORMAL_ORACLE {
            let got = inv_normal_cdf(u);
            assert!((got - expected).abs() < 1e-9, "u={u}: {got} vs {expected}");
        }
    }

    #[test]
    fn inverse_normal_round_trips_through_cdf() {
        for k in 0..120 {
            let tail = 1e-12 * 1.25f64.powi(k);
            if tail >= 0.5 {
                break;
            }
            let lo = inv_normal_cdf(tail);
            assert!((normal_cdf(lo) - tail).abs() <= 1e-10 * tail, "lower tail {tail}");
            let hi = inv_normal_cdf(1.0 - tail);
            let q = 1.0 - (1.0 - tail);
            assert!((normal_cdf(-hi) - q).abs() <= 1e-10 * q, "upper tail {tail}");
        }
    }

    #[test]
    fn uniform_noise_ks_statistic() {
        let m = lhs(1000, 1, 5).unwrap();
        let spec = [NoiseSpec::Uniform { half_width: 0.1 }];
        let mut xs: Vec<f64> = m
            .iter_rows()
            .map(|row| apply_noise(&[2.0], &spec, row).unwrap()[0])
            .collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = ((x - 1.9) / 0.2).clamp(0.0, 1.0);
                ((i + 1) as f64 / n - cdf).abs().max((cdf - i as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn derived_seeds_differ_per_stream() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_eq!(derive_seed(42, 3), derive_seed(42, 3));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn lhs_always_stratified(n in 1usize..300, d in 1usize..6, seed in proptest::prelude::any::<u64>()) {
            assert_stratified(&lhs(n, d, seed).unwrap());
        }
    }
}
