use rand_chacha::ChaCha8Rng;

use crate::distributions::Theta0Sampler;
use crate::scalar::Real;
use crate::state::StateVector;

pub type SampleRng = ChaCha8Rng;

/// Anything that yields random states of a fixed dimension.
pub trait StateSource<T>: Sync {
    fn d(&self) -> usize;
    fn sample(&self, rng: &mut SampleRng) -> StateVector<T>;
}

impl<T: Real> StateSource<T> for Theta0Sampler<T> {
    fn d(&self) -> usize {
        self.density().d()
    }

    fn sample(&self, rng: &mut SampleRng) -> StateVector<T> {
        self.sample_state(rng)
    }
}

/// Always the same state.
#[derive(Clone, Debug)]
pub struct PointMass<T> {
    state: StateVector<T>,
}

impl<T: Real> PointMass<T> {
    pub fn new(state: StateVector<T>) -> Self {
        Self { state }
    }
}

impl<T: Real> StateSource<T> for PointMass<T> {
    fn d(&self) -> usize {
        self.state.d()
    }

    fn sample(&self, _rng: &mut SampleRng) -> StateVector<T> {
        self.state.clone()
    }
}

/// States produced by a closure.
pub struct FnSource<F> {
    d: usize,
    f: F,
}

impl<F> FnSource<F> {
    pub fn new(d: usize, f: F) -> Self {
        Self { d, f }
    }
}

impl<T, F> StateSource<T> for FnSource<F>
where
    F: Fn(&mut SampleRng) -> StateVector<T> + Sync,
{
    fn d(&self) -> usize {
        self.d
    }

    fn sample(&self, rng: &mut SampleRng) -> StateVector<T> {
        (self.f)(rng)
    }
}
