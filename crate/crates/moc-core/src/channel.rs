//! Channel models and reproducible randomness.
//!
//! Every experiment draws from an [`RngStream`]: a counter-based ChaCha
//! substream keyed by `(master_seed, stream_id)`. Trials can then run in
//! parallel, each owning its stream, and reruns are bit-identical.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChannelError {
    #[error("input vector length {got} does not match {want} transmit antennas")]
    ShapeMismatch { got: usize, want: usize },
}

/// Seeded, independent random substream.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Circularly symmetric complex Gaussian with total variance `variance`
    /// (each real component carries half).
    pub fn complex_normal(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    }

    /// Uniform phase in `[0, 2*pi)`.
    pub fn uniform_phase(&mut self) -> f64 {
        self.rng.random::<f64>() * 2.0 * core::f64::consts::PI
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Flat scalar channel `y = gain * x + noise`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarChannel {
    pub gain: Complex64,
    pub noise_variance: f64,
}

impl ScalarChannel {
    pub fn new(gain: Complex64, noise_variance: f64) -> Self {
        assert!(noise_variance >= 0.0, "noise variance must be nonnegative");
        Self {
            gain,
            noise_variance,
        }
    }

    /// Unit gain, noiseless.
    pub fn ideal() -> Self {
        Self::new(Complex64::ONE, 0.0)
    }
}

/// Matrix channel `z = H x + noise` (rows = receive antennas).
#[derive(Debug, Clone, PartialEq)]
pub struct MimoChannel {
    pub matrix: CMat,
    pub noise_variance: f64,
}

impl MimoChannel {
    pub fn new(matrix: CMat, noise_variance: f64) -> Self {
        assert!(noise_variance >= 0.0, "noise variance must be nonnegative");
        Self {
            matrix,
            noise_variance,
        }
    }
}

/// Total complex noise variance for a given symbol SNR:
/// `sigma^2 = signal_power * 10^(-snr_db/10)`.
pub fn snr_db_to_sigma2(snr_db: f64, signal_power: f64) -> f64 {
    assert!(signal_power > 0.0, "signal power must be positive");
    signal_power * 10.0f64.powf(-snr_db / 10.0)
}

/// Applies the scalar channel symbol by symbol.
pub fn apply_scalar(x: &[Complex64], ch: &ScalarChannel, rng: &mut RngStream) -> Vec<Complex64> {
    x.iter()
        .map(|&s| ch.gain * s + rng.complex_normal(ch.noise_variance))
        .collect()
}

/// Applies the matrix channel to one transmit vector per channel use.
pub fn apply_mimo(
    x: &[Vec<Complex64>],
    ch: &MimoChannel,
    rng: &mut RngStream,
) -> Result<Vec<Vec<Complex64>>, ChannelError> {
    let want = ch.matrix.cols();
    let mut out = Vec::with_capacity(x.len());
    for use_ in x {
        if use_.len() != want {
            return Err(ChannelError::ShapeMismatch {
                got: use_.len(),
                want,
            });
        }
        let mut z = ch.matrix.mul_vec(use_);
        for zi in &mut z {
            *zi += rng.complex_normal(ch.noise_variance);
        }
        out.push(z);
    }
    Ok(out)
}

/// I.i.d. CN(0,1) fading matrix.
pub fn draw_rayleigh(rows: usize, cols: usize, rng: &mut RngStream) -> CMat {
    CMat::from_fn(rows, cols, |_, _| rng.complex_normal(1.0))
}

/// Rotates a whole sequence by `e^{j theta}` (the classifier-input toggle).
pub fn rotate_phase(x: &[Complex64], theta: f64) -> Vec<Complex64> {
    let r = Complex64::from_polar(1.0, theta);
    x.iter().map(|&s| s * r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn snr_conversions() {
        assert!((snr_db_to_sigma2(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((snr_db_to_sigma2(10.0, 1.0) - 0.1).abs() < 1e-15);
        assert!((snr_db_to_sigma2(3.0, 2.0) - 1.0023744672545445).abs() < 1e-12);
    }

    #[test]
    fn seed_determinism_and_stream_independence() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        let mut c = RngStream::new(42, 8);
        let xa: Vec<Complex64> = (0..16).map(|_| a.complex_normal(1.0)).collect();
        let xb: Vec<Complex64> = (0..16).map(|_| b.complex_normal(1.0)).collect();
        let xc: Vec<Complex64> = (0..16).map(|_| c.complex_normal(1.0)).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn noiseless_scalar_is_identity() {
        let mut rng = RngStream::new(1, 0);
        let x = vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.25)];
        let y = apply_scalar(&x, &ScalarChannel::new(Complex64::ONE, 0.0), &mut rng);
        assert_eq!(x, y);
        let y = apply_scalar(
            &[Complex64::ONE],
            &ScalarChannel::new(Complex64::new(0.0, 2.0), 0.0),
            &mut rng,
        );
        assert_eq!(y[0], Complex64::new(0.0, 2.0));
    }

    #[test]
    fn noiseless_mimo_identity_and_shapes() {
        let mut rng = RngStream::new(1, 0);
        let ch = MimoChannel::new(CMat::identity(2), 0.0);
        let x = vec![vec![Complex64::new(1.0, 1.0), Complex64::new(-1.0, 0.0)]];
        let z = apply_mimo(&x, &ch, &mut rng).unwrap();
        assert_eq!(z, x);
        let bad = vec![vec![Complex64::ONE]];
        assert!(matches!(
            apply_mimo(&bad, &ch, &mut rng),
            Err(ChannelError::ShapeMismatch { got: 1, want: 2 })
        ));
        // zero input -> pure noise with the right variance sign
        let noisy = MimoChannel::new(CMat::identity(2), 1.0);
        let z = apply_mimo(&[vec![Complex64::ZERO; 2]], &noisy, &mut rng).unwrap();
        assert!(z[0][0].norm() > 0.0);
    }

    #[test]
    fn rotation_preserves_magnitude() {
        let x = vec![Complex64::new(3.0, 4.0)];
        let y = rotate_phase(&x, 1.234);
        assert!((y[0].norm() - 5.0).abs() < 1e-12);
    }
}
