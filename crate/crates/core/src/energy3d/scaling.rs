use super::Energy3dError;

/// Largest admitted ratio between consecutive rungs of the ladder.
pub const LADDER_RATIO: f64 = 0.2;

/// Scale ladder at thickness ratio `epsilon` with the exponents fixed at
/// `p = 0`, `q = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    pub epsilon: f64,
    /// Frank length.
    pub delta_eps: f64,
    /// Microstructure period in the thickness direction.
    pub eta: f64,
    /// Mollification width.
    pub delta: f64,
    /// Cut-off collar width.
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LadderOverrides {
    pub delta_eps: Option<f64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
}

impl ScalingParams {
    pub const P: f64 = 0.0;
    pub const Q: f64 = 2.0;

    /// `delta_eps = eps^3`, `eta = eps^2`, `delta = delta_eps`, `rho = sqrt(eps)`.
    pub fn new(epsilon: f64) -> Result<Self, Energy3dError> {
        Self::with_overrides(epsilon, LadderOverrides::default())
    }

    pub fn with_overrides(epsilon: f64, o: LadderOverrides) -> Result<Self, Energy3dError> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Energy3dError::InvalidScaling(format!("epsilon must be positive, got {epsilon}")));
        }
        let delta_eps = o.delta_eps.unwrap_or(epsilon.powi(3));
        let s = Self {
            epsilon,
            delta_eps,
            eta: o.eta.unwrap_or(epsilon * epsilon),
            delta: o.delta.unwrap_or(delta_eps),
            rho: o.rho.unwrap_or(epsilon.sqrt()),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Energy3dError> {
        let all = [self.delta_eps, self.eta, self.delta, self.rho];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Energy3dError::InvalidScaling("ladder entries must be positive".into()));
        }
        let lim = LADDER_RATIO * (1.0 + 1e-12);
        let checks = [
            (self.delta_eps / self.eta, "delta_eps <= 0.2 eta"),
            (self.eta / self.epsilon, "eta <= 0.2 epsilon"),
            (self.delta / self.eta, "delta <= 0.2 eta"),
        ];
        for (r, name) in checks {
            if r > lim {
                return Err(Energy3dError::InvalidScaling(format!("ladder ordering violated: {name} (ratio {r})")));
            }
        }
        Ok(())
    }

    /// `[rho delta_eps^2 / (delta eta), rho, eta^2 / rho, delta / eta]`.
    pub fn bracket_terms(&self) -> [f64; 4] {
        [
            self.rho * self.delta_eps * self.delta_eps / (self.delta * self.eta),
            self.rho,
            self.eta * self.eta / self.rho,
            self.delta / self.eta,
        ]
    }

    pub fn bracket_sum(&self) -> f64 {
        self.bracket_terms().iter().sum()
    }

    /// Fast-variable scale factors `dy/dx` per axis.
    pub fn fast_scale(&self) -> [f64; 3] {
        let s = 1.0 / (self.eta * self.epsilon);
        [s, s, 1.0 / self.eta]
    }
}
