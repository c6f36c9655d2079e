use serde::{Deserialize, Serialize};

/// Outcome of one numerically checked identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub max_residual: f64,
    pub pass: bool,
}

impl IdentityCheck {
    pub fn new(identity: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        IdentityCheck {
            identity: identity.into(),
            max_residual,
            // NaN residuals fail.
            pass: max_residual <= tolerance,
        }
    }

    /// Folds another residual for the same identity into this one.
    pub fn absorb(&mut self, residual: f64, tolerance: f64) {
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
        self.pass = self.max_residual <= tolerance;
    }

    /// Combines two evaluations of the same identity, each judged against
    /// its own tolerance.
    pub fn merge(&mut self, other: &IdentityCheck) {
        if other.max_residual.is_nan() || other.max_residual > self.max_residual {
            self.max_residual = other.max_residual;
        }
        self.pass &= other.pass;
    }
}

/// Merges `checks` into `into` by identity name.
pub fn merge_all(into: &mut Vec<IdentityCheck>, checks: impl IntoIterator<Item = IdentityCheck>) {
    for chk in checks {
        match into.iter_mut().find(|c| c.identity == chk.identity) {
            Some(existing) => existing.merge(&chk),
            None => into.push(chk),
        }
    }
}
