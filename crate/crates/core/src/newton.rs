use alloc::vec::Vec;

/// Damped Newton settings shared by the steady-state and transition solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the residual max-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried before giving up on an iteration.
    pub max_halvings: usize,
}

impl NewtonOptions {
    pub const STEADY_STATE: NewtonOptions = NewtonOptions {
        tol: 1e-10,
        max_iter: 60,
        max_halvings: 30,
    };
    pub const TRANSITION: NewtonOptions = NewtonOptions {
        tol: 1e-9,
        max_iter: 60,
        max_halvings: 30,
    };

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    /// Residual max-norm at the start of each iteration.
    pub trace: Vec<f64>,
}
