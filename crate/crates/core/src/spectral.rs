//! Eigenstructure of the linearized (co-state, habit) system.

use serde::Serialize;

use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicRegime {
    /// Real roots of opposite sign: a unique stable path exists.
    SaddleReal,
    /// Both roots real and non-negative.
    PositiveReal,
    /// Complex pair with real part rho/2.
    ComplexUnstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HabitEffect {
    Addictive,
    Satiating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralData {
    /// Stable root (real part when complex).
    pub psi1: f64,
    pub psi2: f64,
    /// Imaginary part magnitude, zero for real roots.
    pub imag: f64,
    pub regime: DynamicRegime,
    /// (phi + psi1) / phi
    pub addiction_factor: f64,
    /// Co-state per unit of habit along the stable eigenvector.
    pub eigvec_ratio: f64,
    pub discriminant: f64,
    /// Set when the discriminant is exactly zero.
    pub repeated: bool,
}

impl SpectralData {
    pub fn is_saddle(&self) -> bool {
        self.regime == DynamicRegime::SaddleReal
    }

    /// True when phi + psi1 is exactly zero.
    pub fn on_addiction_boundary(&self) -> bool {
        self.addiction_factor == 0.0
    }
}

/// Curvature aggregate (phi+rho)u11 + (rho+2phi)u1h + phi·uhh.
pub fn curvature_index(u_c1c1: f64, u_c1h: f64, u_hh: f64, phi: f64, rho: f64) -> f64 {
    (phi + rho) * u_c1c1 + (rho + 2.0 * phi) * u_c1h + phi * u_hh
}

/// The 2×2 system matrix in (mu, h) coordinates.
pub fn system_matrix(u_c1c1: f64, u_c1h: f64, u_hh: f64, phi: f64, rho: f64) -> [[f64; 2]; 2] {
    let s = 1.0 + u_c1h / u_c1c1;
    [
        [phi * s + rho, (u_c1h * u_c1h - u_c1c1 * u_hh) / u_c1c1],
        [-phi * phi / u_c1c1, -phi * s],
    ]
}

pub fn eigenvalues(u_c1c1: f64, u_c1h: f64, u_hh: f64, phi: f64, rho: f64) -> Result<SpectralData> {
    if !(u_c1c1 < 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "u_c1c1",
            reason: "must be negative".into(),
        });
    }
    let k = curvature_index(u_c1c1, u_c1h, u_hh, phi, rho);
    let det = -phi / u_c1c1 * k;
    let disc = rho * rho + 4.0 * phi / u_c1c1 * k;

    let (psi1, psi2, imag) = if disc >= 0.0 {
        let s = disc.sqrt();
        // product form keeps the small root accurate
        let big = 0.5 * (rho + s);
        let small = if big != 0.0 { det / big } else { 0.5 * (rho - s) };
        (small.min(big), small.max(big), 0.0)
    } else {
        (0.5 * rho, 0.5 * rho, 0.5 * (-disc).sqrt())
    };
    let regime = if disc < 0.0 {
        DynamicRegime::ComplexUnstable
    } else if det < 0.0 {
        DynamicRegime::SaddleReal
    } else {
        DynamicRegime::PositiveReal
    };
    Ok(SpectralData {
        psi1,
        psi2,
        imag,
        regime,
        addiction_factor: (phi + psi1) / phi,
        eigvec_ratio: -(phi * u_c1h + (phi + psi1) * u_c1c1) / (phi * phi),
        discriminant: disc,
        repeated: disc == 0.0,
    })
}

/// Ties (phi + psi1 = 0) resolve to `Satiating`.
pub fn addiction_or_satiation(sd: &SpectralData) -> HabitEffect {
    if sd.addiction_factor > 0.0 {
        HabitEffect::Addictive
    } else {
        HabitEffect::Satiating
    }
}
