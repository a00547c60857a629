//! Sample-based estimators for polynomial statistics.
//!
//! All experiments use the independent-restart protocol: one retained
//! sample per run, each run on its own stream, so standard errors are free
//! of autocorrelation.

use super::MultilinearFunction;
use crate::error::{Error, Result};
use crate::hogwild::{sample_batch_hogwild, DelayModel};
use crate::model::{Configuration, IsingModel};
use crate::rng::{RngStream, SALT_HOG_BATCH, SALT_SEQ_BATCH};
use crate::sampler::sample_batch;

/// Which pipeline produced an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Sequential,
    HogwildSimulated,
    HogwildHardware,
    Exact,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Sequential => "sequential",
            Method::HogwildSimulated => "hogwild-sim",
            Method::HogwildHardware => "hogwild-hw",
            Method::Exact => "exact",
        }
    }
}

/// Point estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct EstimateReport {
    pub estimate: f64,
    pub stderr: f64,
    pub count: usize,
    pub method: Method,
}

impl EstimateReport {
    /// Sample standard deviation implied by the stored standard error.
    pub fn sample_stdev(&self) -> f64 {
        self.stderr * (self.count as f64).sqrt()
    }
}

fn eval_all(f: &MultilinearFunction, samples: &[Configuration]) -> Result<Vec<f64>> {
    samples.iter().map(|s| f.eval(s)).collect()
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample mean of `f` with standard error `stdev/√count`.
pub fn estimate_mean(
    f: &MultilinearFunction,
    samples: &[Configuration],
    method: Method,
) -> Result<EstimateReport> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let values = eval_all(f, samples)?;
    let (estimate, stderr) = mean_and_stderr(&values);
    Ok(EstimateReport {
        estimate,
        stderr,
        count: samples.len(),
        method,
    })
}

/// Unbiased sample variance of `f` over the samples.
pub fn empirical_variance(f: &MultilinearFunction, samples: &[Configuration]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let values = eval_all(f, samples)?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Paired sequential/asynchronous estimates of the same statistic.
#[derive(Clone, Copy, Debug)]
pub struct BiasReport {
    pub sequential: EstimateReport,
    pub hogwild: EstimateReport,
}

impl BiasReport {
    /// `|mean_seq − mean_hog|`.
    pub fn bias(&self) -> f64 {
        (self.sequential.estimate - self.hogwild.estimate).abs()
    }

    pub fn combined_stderr(&self) -> f64 {
        (self.sequential.stderr.powi(2) + self.hogwild.stderr.powi(2)).sqrt()
    }
}

/// Run matched sequential and simulated-asynchronous batches (independent
/// restarts, `runs` samples each, `steps_per_run` updates per sample) and
/// report both estimates.
pub fn estimate_bias(
    model: &IsingModel,
    f: &MultilinearFunction,
    dm: &DelayModel,
    runs: usize,
    steps_per_run: u64,
    stream: RngStream,
) -> Result<BiasReport> {
    if runs < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: runs,
        });
    }
    let seq_samples = sample_batch(model, runs, steps_per_run, stream.child(SALT_SEQ_BATCH));
    let hog_samples =
        sample_batch_hogwild(model, runs, steps_per_run, dm, stream.child(SALT_HOG_BATCH));
    Ok(BiasReport {
        sequential: estimate_mean(f, &seq_samples, Method::Sequential)?,
        hogwild: estimate_mean(f, &hog_samples, Method::HogwildSimulated)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::mixing_budget_experiment;
    use crate::stats::exact_expectation;

    fn stream() -> RngStream {
        RngStream::new(0xbead, 3)
    }

    #[test]
    fn constant_function_has_zero_stderr() {
        let f = MultilinearFunction::constant(4.5);
        let samples = vec![Configuration::all_plus(3); 10];
        let report = estimate_mean(&f, &samples, Method::Sequential).unwrap();
        assert_eq!(report.estimate, 4.5);
        assert_eq!(report.stderr, 0.0);
        assert_eq!(empirical_variance(&f, &samples).unwrap(), 0.0);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let f = MultilinearFunction::constant(1.0);
        let one = vec![Configuration::all_plus(2)];
        assert!(matches!(
            estimate_mean(&f, &one, Method::Sequential),
            Err(Error::InsufficientData { .. })
        ));
        assert!(empirical_variance(&f, &one).is_err());
    }

    #[test]
    fn duplicating_samples_shrinks_stderr_by_sqrt2() {
        let model = IsingModel::curie_weiss(6, 0.5).unwrap();
        let samples = sample_batch(&model, 200, 300, stream());
        let f = MultilinearFunction::complete_bilinear(6).unwrap();
        let once = estimate_mean(&f, &samples, Method::Sequential).unwrap();
        let mut doubled = samples.clone();
        doubled.extend(samples.iter().cloned());
        let twice = estimate_mean(&f, &doubled, Method::Sequential).unwrap();
        assert!((once.estimate - twice.estimate).abs() < 1e-12);
        // Doubling the list keeps the stdev but halves the variance of the
        // mean: stderr shrinks by √2 (up to the n−1 correction).
        let ratio = once.stderr / twice.stderr;
        assert!((ratio - 2f64.sqrt()).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn sequential_mean_matches_exact_oracle() {
        let model = IsingModel::curie_weiss(8, 0.5).unwrap();
        let f = MultilinearFunction::new([(vec![0, 1], 1.0)]).unwrap();
        let samples = sample_batch(&model, 3_000, mixing_budget_experiment(8), stream());
        let report = estimate_mean(&f, &samples, Method::Sequential).unwrap();
        let oracle = exact_expectation(&model, &f).unwrap();
        assert!(
            (report.estimate - oracle).abs() <= 3.0 * report.stderr,
            "estimate {} vs oracle {oracle} (stderr {})",
            report.estimate,
            report.stderr
        );
    }

    #[test]
    fn single_spin_variance_is_one() {
        // X ∈ {±1} with mean 0 under zero field: Var = 1.
        let model = IsingModel::curie_weiss(6, 0.5).unwrap();
        let f = MultilinearFunction::new([(vec![0], 1.0)]).unwrap();
        let samples = sample_batch(&model, 4_000, mixing_budget_experiment(6), stream());
        let var = empirical_variance(&f, &samples).unwrap();
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn zero_delay_bias_is_noise_level() {
        let model = IsingModel::curie_weiss(8, 0.5).unwrap();
        let f = MultilinearFunction::complete_bilinear(8).unwrap();
        let report = estimate_bias(
            &model,
            &f,
            &DelayModel::constant(0),
            1_500,
            mixing_budget_experiment(8),
            stream(),
        )
        .unwrap();
        assert!(report.bias() <= 3.0 * report.combined_stderr());
    }

    #[test]
    fn linear_functions_suffer_zero_bias() {
        let model = IsingModel::curie_weiss(10, 0.5).unwrap();
        let f = MultilinearFunction::linear(&[1.0; 10]).unwrap();
        let report = estimate_bias(
            &model,
            &f,
            &DelayModel::geometric_with_mean(4.0).unwrap(),
            1_500,
            mixing_budget_experiment(10),
            stream(),
        )
        .unwrap();
        assert!(report.bias() <= 3.0 * report.combined_stderr());
        assert!(report.hogwild.estimate.abs() <= 3.0 * report.hogwild.stderr);
    }
}
