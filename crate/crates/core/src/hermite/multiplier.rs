use super::expansion::HermiteExpansion;

/// Functions of `L` that act diagonally on the Hermite basis, parameterized
/// by the chaos order `n = |ν|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralMultiplier {
    /// Ornstein-Uhlenbeck semigroup `T_t`: `e^{-t n}`.
    Ou { t: f64 },
    /// Poisson-Hermite semigroup `P_t`: `e^{-t √n}`.
    PoissonHermite { t: f64 },
    /// `∂_t^k P_t`: `(-√n)^k e^{-t √n}`.
    PoissonDeriv { t: f64, k: u32 },
    /// Riesz potential `I_β`: `n^{-β/2}`, zero on constants.
    RieszPot { beta: f64 },
    /// Bessel potential `𝒥_β`: `(1 + √n)^{-β}`.
    BesselPot { beta: f64 },
    /// Riesz derivative `D^β`: `n^{β/2}`.
    RieszDer { beta: f64 },
    /// Bessel derivative `𝒟^β`: `(1 + √n)^β`.
    BesselDer { beta: f64 },
}

impl SpectralMultiplier {
    pub fn eval(&self, order: u32) -> f64 {
        let n = order as f64;
        let root = n.sqrt();
        match *self {
            SpectralMultiplier::Ou { t } => (-t * n).exp(),
            SpectralMultiplier::PoissonHermite { t } => (-t * root).exp(),
            SpectralMultiplier::PoissonDeriv { t, k } => {
                if k == 0 {
                    (-t * root).exp()
                } else if order == 0 {
                    0.0
                } else {
                    (-root).powi(k as i32) * (-t * root).exp()
                }
            }
            SpectralMultiplier::RieszPot { beta } => {
                if order == 0 {
                    0.0
                } else {
                    n.powf(-beta / 2.0)
                }
            }
            SpectralMultiplier::BesselPot { beta } => (1.0 + root).powf(-beta),
            SpectralMultiplier::RieszDer { beta } => {
                if order == 0 {
                    0.0
                } else {
                    n.powf(beta / 2.0)
                }
            }
            SpectralMultiplier::BesselDer { beta } => (1.0 + root).powf(beta),
        }
    }

    pub fn apply(&self, f: &HermiteExpansion) -> HermiteExpansion {
        f.map_by_order(|n| self.eval(n))
    }
}

#[cfg(test)]
mod tests {
    use super::SpectralMultiplier::*;

    #[test]
    fn multiplier_values() {
        assert_eq!(Ou { t: 2f64.ln() }.eval(1), 0.5);
        assert!((PoissonHermite { t: 1.0 }.eval(4) - (-2f64).exp()).abs() < 1e-16);
        assert!((PoissonDeriv { t: 1.0, k: 2 }.eval(4) - 4.0 * (-2f64).exp()).abs() < 1e-15);
        assert_eq!(PoissonDeriv { t: 0.0, k: 1 }.eval(0), 0.0);
        assert_eq!(PoissonDeriv { t: 0.0, k: 0 }.eval(0), 1.0);
        assert_eq!(RieszPot { beta: 2.0 }.eval(4), 0.25);
        assert_eq!(RieszPot { beta: 2.0 }.eval(0), 0.0);
        assert!((BesselPot { beta: 3.0 }.eval(4) - 1.0 / 27.0).abs() < 1e-16);
        assert_eq!(BesselPot { beta: 3.0 }.eval(0), 1.0);
        assert_eq!(RieszDer { beta: 1.0 }.eval(9), 3.0);
        assert_eq!(RieszDer { beta: 1.0 }.eval(0), 0.0);
        assert_eq!(BesselDer { beta: 2.0 }.eval(4), 9.0);
    }
}
