use std::fmt;

/// How each per-sample value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// One simulated measurement per sample.
    Sampled,
    /// Exact average over every measurement branch per sample.
    RaoBlackwell,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Sampled => "sampled",
            Estimator::RaoBlackwell => "rao_blackwell",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateReport {
    pub mean: f64,
    /// Sample standard deviation over `√n_samples`.
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub estimator: Estimator,
}

impl EstimateReport {
    /// `|mean − target| ≤ k·std_error`
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Running mean and centred second moment, mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> usize {
        self.n as usize
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.n - 1) as f64).max(0.0).sqrt()
    }

    pub fn report(&self, seed: u64, estimator: Estimator) -> EstimateReport {
        EstimateReport {
            mean: self.mean,
            std_error: self.std_dev() / (self.n as f64).sqrt(),
            n_samples: self.count(),
            seed,
            estimator,
        }
    }
}
