//! Layered reflective sample and its transfer function `H(ω) = Σ_j r_j e^{i2β(ω)z_j}`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial wave number about a reference frequency:
/// `β(ω) = β_r + β'δ + β''δ²/2 + β'''δ³/6 + β''''δ⁴/24`, `δ = ω - ω_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionProfile {
    pub reference_frequency: f64,
    pub beta_r: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

/// Taylor coefficients of β about some center frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalExpansion {
    pub center: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

impl LocalExpansion {
    pub fn group_velocity(&self) -> f64 {
        1.0 / self.beta1
    }
}

impl DispersionProfile {
    pub fn new(reference_frequency: f64, beta_r: f64, beta1: f64, beta2: f64) -> Result<Self> {
        Self::with_higher_orders(reference_frequency, beta_r, beta1, beta2, 0.0, 0.0)
    }

    pub fn with_higher_orders(
        reference_frequency: f64,
        beta_r: f64,
        beta1: f64,
        beta2: f64,
        beta3: f64,
        beta4: f64,
    ) -> Result<Self> {
        if !(reference_frequency.is_finite() && reference_frequency > 0.0) {
            return Err(Error::InvalidSample(format!(
                "reference frequency must be positive, got {reference_frequency}"
            )));
        }
        if !(beta1.is_finite() && beta1 > 0.0) {
            return Err(Error::InvalidSample(format!(
                "β' must be positive (finite group velocity), got {beta1}"
            )));
        }
        for (name, v) in [
            ("β_r", beta_r),
            ("β''", beta2),
            ("β'''", beta3),
            ("β''''", beta4),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidSample(format!("{name} is not finite")));
            }
        }
        Ok(Self {
            reference_frequency,
            beta_r,
            beta1,
            beta2,
            beta3,
            beta4,
        })
    }

    /// Non-dispersive medium with group index `c·β'` equal to its phase index.
    pub fn nondispersive(reference_frequency: f64, beta1: f64) -> Result<Self> {
        Self::new(reference_frequency, reference_frequency * beta1, beta1, 0.0)
    }

    pub fn is_second_order(&self) -> bool {
        self.beta3 == 0.0 && self.beta4 == 0.0
    }

    pub fn beta(&self, omega: f64) -> Result<f64> {
        check_omega(omega)?;
        Ok(self.beta_unchecked(omega))
    }

    pub(crate) fn beta_unchecked(&self, omega: f64) -> f64 {
        let d = omega - self.reference_frequency;
        self.beta_r
            + d * (self.beta1
                + d * (self.beta2 / 2.0 + d * (self.beta3 / 6.0 + d * self.beta4 / 24.0)))
    }

    /// dβ/dω.
    pub fn beta_derivative(&self, omega: f64) -> Result<f64> {
        check_omega(omega)?;
        let d = omega - self.reference_frequency;
        Ok(self.beta1 + d * (self.beta2 + d * (self.beta3 / 2.0 + d * self.beta4 / 6.0)))
    }

    pub fn group_velocity(&self, omega: f64) -> Result<f64> {
        let slope = self.beta_derivative(omega)?;
        if slope <= 0.0 {
            return Err(Error::NonPositiveGroupDelay { omega, slope });
        }
        Ok(1.0 / slope)
    }

    /// Re-center the polynomial at `center`.
    pub fn expand_at(&self, center: f64) -> Result<LocalExpansion> {
        check_omega(center)?;
        let d = center - self.reference_frequency;
        let beta1 = self.beta_derivative(center)?;
        if beta1 <= 0.0 {
            return Err(Error::NonPositiveGroupDelay {
                omega: center,
                slope: beta1,
            });
        }
        Ok(LocalExpansion {
            center,
            beta0: self.beta_unchecked(center),
            beta1,
            beta2: self.beta2 + d * (self.beta3 + d * self.beta4 / 2.0),
            beta3: self.beta3 + d * self.beta4,
            beta4: self.beta4,
        })
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub reflectance: Complex64,
    pub depth: f64,
}

impl Layer {
    pub fn new(reflectance: Complex64, depth: f64) -> Result<Self> {
        if !(reflectance.norm() <= 1.0) {
            return Err(Error::InvalidSample(format!(
                "|r| must be <= 1, got {}",
                reflectance.norm()
            )));
        }
        if !(depth.is_finite() && depth >= 0.0) {
            return Err(Error::InvalidSample(format!(
                "depth must be >= 0, got {depth}"
            )));
        }
        Ok(Self { reflectance, depth })
    }

    pub fn real(r: f64, depth: f64) -> Result<Self> {
        Self::new(Complex64::new(r, 0.0), depth)
    }
}

/// Discrete layered sample sharing one dispersion profile between all surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    layers: Vec<Layer>,
    dispersion: DispersionProfile,
}

impl Sample {
    pub fn new(layers: Vec<Layer>, dispersion: DispersionProfile) -> Result<Self> {
        if let Some(w) = layers.windows(2).find(|w| w[1].depth <= w[0].depth) {
            return Err(Error::InvalidSample(format!(
                "layer depths must be strictly increasing ({} then {})",
                w[0].depth, w[1].depth
            )));
        }
        Ok(Self { layers, dispersion })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn dispersion(&self) -> &DispersionProfile {
        &self.dispersion
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn max_depth(&self) -> f64 {
        self.layers.last().map_or(0.0, |l| l.depth)
    }

    pub fn transfer_function(&self, omega: f64) -> Result<Complex64> {
        let beta = self.dispersion.beta(omega)?;
        Ok(self.transfer_at_beta(beta))
    }

    pub(crate) fn transfer_at_beta(&self, beta: f64) -> Complex64 {
        self.layers
            .iter()
            .map(|l| l.reflectance * Complex64::from_polar(1.0, 2.0 * beta * l.depth))
            .sum()
    }

    /// Every reflectance multiplied by `factor`. The result may violate `|r| <= 1`
    /// only if `|factor| > 1`, which is rejected.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer::new(l.reflectance * factor, l.depth))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, self.dispersion)
    }

    /// Reflectances multiplied by unit phasors, one per layer.
    pub fn with_phasors(&self, phasors: &[Complex64]) -> Self {
        assert_eq!(phasors.len(), self.layers.len(), "one phasor per layer");
        let layers = self
            .layers
            .iter()
            .zip(phasors)
            .map(|(l, p)| Layer {
                reflectance: l.reflectance * p,
                depth: l.depth,
            })
            .collect();
        Self {
            layers,
            dispersion: self.dispersion,
        }
    }

    /// Single-layer sub-sample for each layer.
    pub fn split_layers(&self) -> Vec<Sample> {
        self.layers
            .iter()
            .map(|l| Sample {
                layers: vec![*l],
                dispersion: self.dispersion,
            })
            .collect()
    }

    /// Same layers shifted deeper by `offset` meters.
    pub fn buried(&self, offset: f64) -> Result<Self> {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer::new(l.reflectance, l.depth + offset))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, self.dispersion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA_R: f64 = 2.32e15;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_examples() {
        let dp = DispersionProfile::new(OMEGA_R, 1.234e7, 5e-9, 1.8e-25).unwrap();
        assert_eq!(dp.beta(OMEGA_R).unwrap(), 1.234e7);

        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 0.0).unwrap();
        assert!((dp.beta(OMEGA_R + 1e14).unwrap() - 5e5).abs() < 1e-6);

        // β' is required positive, so isolate β'' by subtracting the linear part
        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 1.8e-25).unwrap();
        let quad = dp.beta(OMEGA_R + 1e14).unwrap() - 5e5;
        assert!((quad - 0.9e3).abs() < 1e-6);

        assert!(matches!(dp.beta(0.0), Err(Error::NonPositiveFrequency(_))));
        assert!(matches!(dp.beta(-1.0), Err(Error::NonPositiveFrequency(_))));
    }

    #[test]
    fn group_velocity_examples() {
        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 0.0).unwrap();
        assert!((dp.group_velocity(OMEGA_R).unwrap() - 2e8).abs() < 1e-6);
        assert_eq!(
            dp.group_velocity(OMEGA_R + 1e14).unwrap(),
            dp.group_velocity(OMEGA_R - 3e14).unwrap()
        );

        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 1.8e-25).unwrap();
        assert!(dp.group_velocity(OMEGA_R + 1e14).unwrap() < dp.group_velocity(OMEGA_R).unwrap());

        // β'' large enough that dβ/dω turns negative below ω_r
        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 1e-22).unwrap();
        assert!(matches!(
            dp.group_velocity(OMEGA_R - 1e14),
            Err(Error::NonPositiveGroupDelay { .. })
        ));
    }

    #[test]
    fn profile_validation() {
        assert!(DispersionProfile::new(OMEGA_R, 0.0, 0.0, 0.0).is_err());
        assert!(DispersionProfile::new(OMEGA_R, 0.0, -1e-9, 0.0).is_err());
        assert!(DispersionProfile::new(0.0, 0.0, 5e-9, 0.0).is_err());
    }

    #[test]
    fn local_expansion_recenters_exactly() {
        let dp = DispersionProfile::with_higher_orders(OMEGA_R, 1e7, 5e-9, 1.8e-25, 3e-40, 2e-55)
            .unwrap();
        let center = OMEGA_R + 3e13;
        let e = dp.expand_at(center).unwrap();
        for d in [-2e14, -1e13, 0.0, 5e13, 2e14] {
            let direct = dp.beta(center + d).unwrap();
            let local = e.beta0
                + d * (e.beta1 + d * (e.beta2 / 2.0 + d * (e.beta3 / 6.0 + d * e.beta4 / 24.0)));
            assert!((direct - local).abs() < 1e-9 * direct.abs());
        }
    }

    #[test]
    fn transfer_function_examples() {
        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 1.8e-25).unwrap();
        let empty = Sample::new(vec![], dp).unwrap();
        assert_eq!(empty.transfer_function(OMEGA_R).unwrap(), c(0.0, 0.0));

        let mirror = Sample::new(vec![Layer::real(1.0, 0.0).unwrap()], dp).unwrap();
        for w in [1e15, OMEGA_R, 3e15] {
            assert_eq!(mirror.transfer_function(w).unwrap(), c(1.0, 0.0));
        }

        let fig3 = Sample::new(
            vec![
                Layer::real(0.1, 1e-4).unwrap(),
                Layer::real(0.2, 1.1e-4).unwrap(),
            ],
            dp,
        )
        .unwrap();
        let h = fig3.transfer_function(OMEGA_R).unwrap();
        assert!((h - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn layer_and_sample_validation() {
        assert!(Layer::new(c(0.8, 0.7), 0.0).is_err());
        assert!(Layer::real(0.5, -1e-6).is_err());
        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 0.0).unwrap();
        let a = Layer::real(0.1, 1e-4).unwrap();
        assert!(Sample::new(vec![a, a], dp).is_err());
        // Σ|r| > 1 is allowed
        let big = Sample::new(
            vec![
                Layer::real(0.9, 0.0).unwrap(),
                Layer::real(0.9, 1e-5).unwrap(),
            ],
            dp,
        );
        assert!(big.is_ok());
    }

    #[test]
    fn single_layer_is_pure_delay() {
        let dp = DispersionProfile::new(OMEGA_R, 0.0, 5e-9, 0.0).unwrap();
        let r = c(0.3, -0.2);
        let z = 4e-5;
        let s = Sample::new(vec![Layer::new(r, z).unwrap()], dp).unwrap();
        for omega in [-3e14, -1e13, 0.0, 2e14] {
            let h = s.transfer_function(OMEGA_R + omega).unwrap();
            let expected = r * Complex64::from_polar(1.0, 2.0 * 5e-9 * omega * z);
            assert!((h - expected).norm() < 1e-12);
        }
    }
}
