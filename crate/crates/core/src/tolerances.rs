//! Central table of numerical tolerances and resource budgets.

/// Numerical tolerances used by the solver, evaluators and checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Max-norm residual `‖J − zψ(J)‖` accepted at a numeric point.
    pub fixed_point: f64,
    /// Equivariance and Green-identity checks.
    pub identity: f64,
    /// Target accuracy of the branch point `R`.
    pub radius: f64,
    /// Agreement of ratio-test radius estimates.
    pub ratio: f64,
    /// Agreement of the two square-root coefficient estimates.
    pub alpha: f64,
    /// Relative gap allowed between transfer constant and oracle fit.
    pub transfer: f64,
    /// Perron eigenvalue accuracy.
    pub perron: f64,
    /// Largest `z` searched for the branch point.
    pub z_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fixed_point: 1e-13,
            identity: 1e-12,
            radius: 1e-8,
            ratio: 1e-3,
            alpha: 1e-4,
            transfer: 0.02,
            perron: 1e-10,
            z_max: 10.0,
        }
    }
}

/// Resource guards; exceeding one yields a budget error, never a silent pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum number of live states in an oracle step.
    pub oracle_states: usize,
    /// Maximum number of crossing elements expanded by the classifier.
    pub classify_elements: usize,
    /// Breadth-first horizon for irreducibility.
    pub irreducibility_horizon: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { oracle_states: 2_000_000, classify_elements: 200_000, irreducibility_horizon: 24 }
    }
}

fn parse_override<T: std::str::FromStr>(key: &str, value: &str) -> crate::Result<T> {
    value.trim().parse().map_err(|_| crate::Error::Argument(format!("bad value {value:?} for {key}")))
}

impl Tolerances {
    /// Override one tolerance by name.
    pub fn set(&mut self, key: &str, value: &str) -> crate::Result<()> {
        let slot = match key {
            "fixed_point" => &mut self.fixed_point,
            "identity" => &mut self.identity,
            "radius" => &mut self.radius,
            "ratio" => &mut self.ratio,
            "alpha" => &mut self.alpha,
            "transfer" => &mut self.transfer,
            "perron" => &mut self.perron,
            "z_max" => &mut self.z_max,
            _ => return Err(crate::Error::Argument(format!("unknown tolerance {key:?}"))),
        };
        let v: f64 = parse_override(key, value)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(crate::Error::Argument(format!("tolerance {key} must be positive and finite")));
        }
        *slot = v;
        Ok(())
    }
}

impl Budgets {
    /// Override one budget by name.
    pub fn set(&mut self, key: &str, value: &str) -> crate::Result<()> {
        let slot = match key {
            "oracle_states" => &mut self.oracle_states,
            "classify_elements" => &mut self.classify_elements,
            "irreducibility_horizon" => &mut self.irreducibility_horizon,
            _ => return Err(crate::Error::Argument(format!("unknown budget {key:?}"))),
        };
        *slot = parse_override(key, value)?;
        Ok(())
    }
}
