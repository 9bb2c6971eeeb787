/// Tolerances threaded through the public operations.
///
/// Every value is relative to the max-norm of the input of the operation it
/// governs unless its doc says otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Accepted asymmetry of "symmetric" inputs.
    pub symmetry: f64,
    /// Jacobi stops once the off-diagonal Frobenius mass is below
    /// `eigen_convergence * ||A||_F`.
    pub eigen_convergence: f64,
    /// Hard cap on cyclic Jacobi sweeps.
    pub max_sweeps: usize,
    /// Relative gap under which two eigenvalues of `-(JM)^2` are taken to be
    /// the same doubled eigenvalue.
    pub pairing: f64,
    /// Absolute symplectic residual accepted for computed transforms.
    pub symplectic: f64,
    /// Isotropy deviation accepted by the modewise decomposition.
    pub isotropy: f64,
    /// Gap threshold for degeneracy clustering of local symplectic
    /// eigenvalues; applied as `max(degeneracy, degeneracy * lambda)`.
    pub degeneracy: f64,
    /// Cross-block entries allowed between different degeneracy groups.
    pub coupling: f64,
    /// Orthogonal-symplectic residual accepted for the extracted `O_lambda`.
    pub orthosymplectic: f64,
    /// Absolute distance from 1/2 accepted for symplectic eigenvalues of a
    /// pure state.
    pub purity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-10,
            eigen_convergence: 1e-14,
            max_sweeps: 100,
            pairing: 1e-6,
            symplectic: 1e-9,
            isotropy: 1e-8,
            degeneracy: 1e-6,
            coupling: 1e-8,
            orthosymplectic: 1e-6,
            purity: 1e-8,
        }
    }
}

impl Tolerances {
    /// Clustering threshold for eigenvalue `lambda`.
    pub fn degeneracy_gap(&self, lambda: f64) -> f64 {
        self.degeneracy.max(self.degeneracy * lambda.abs())
    }
}
