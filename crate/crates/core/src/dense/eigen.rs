use super::RealMatrix;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Eigendecomposition of a symmetric matrix: `A = V diag(values) Vᵀ`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthogonal matrix whose column `i` belongs to `values[i]`.
    pub vectors: RealMatrix,
}

/// Symmetric eigensolver using cyclic Jacobi rotations.
///
/// Sweeps run over the strict upper triangle row by row. The iteration stops
/// once the off-diagonal Frobenius mass drops below
/// `tol.eigen_convergence * ||A||_F`, and gives up with
/// [`Error::NoConvergence`] after `tol.max_sweeps` sweeps.
///
/// Within a degenerate eigenspace the returned basis is arbitrary.
pub fn sym_eigen(a: &RealMatrix, tol: &Tolerances) -> Result<SymEigen> {
    a.ensure_symmetric(tol.symmetry)?;
    let n = a.rows();
    let mut w = a.symmetrized();
    let mut v = RealMatrix::identity(n);
    let target = tol.eigen_convergence * a.frobenius();

    let mut converged = false;
    let mut off = off_diagonal_mass(&w);
    for _ in 0..tol.max_sweeps {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
        off = off_diagonal_mass(&w);
    }
    if !converged && off > target {
        return Err(Error::NoConvergence {
            sweeps: tol.max_sweeps,
            off_diagonal: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]));
    let values = order.iter().map(|&i| w[(i, i)]).collect();
    let mut vectors = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok(SymEigen { values, vectors })
}

fn off_diagonal_mass(w: &RealMatrix) -> f64 {
    let n = w.rows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += w[(p, q)] * w[(p, q)];
        }
    }
    (2.0 * sum).sqrt()
}

/// One Jacobi rotation annihilating `w[p][q]`, accumulated into `v`.
fn rotate(w: &mut RealMatrix, v: &mut RealMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = w[(p, p)];
    let aqq = w[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = w.rows();
    w[(p, p)] = app - t * apq;
    w[(q, q)] = aqq + t * apq;
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = w[(r, p)];
        let arq = w[(r, q)];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        w[(r, p)] = new_rp;
        w[(p, r)] = new_rp;
        w[(r, q)] = new_rq;
        w[(q, r)] = new_rq;
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = c * vrp - s * vrq;
        v[(r, q)] = s * vrp + c * vrq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random_symmetric(n: usize, seed: u64) -> RealMatrix {
        let mut rng = SeededRng::new(seed);
        let g =
            RealMatrix::from_row_major(n, n, (0..n * n).map(|_| rng.normal()).collect()).unwrap();
        (&g + &g.transpose()).scale(0.5)
    }

    fn residual(a: &RealMatrix, e: &SymEigen) -> f64 {
        let av = a * &e.vectors;
        let vd = &e.vectors * &RealMatrix::from_diag(&e.values);
        av.max_abs_diff(&vd)
    }

    #[test]
    fn diagonal_input() {
        let a = RealMatrix::from_diag(&[3.0, 1.0]);
        let e = sym_eigen(&a, &Tolerances::default()).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors, RealMatrix::identity(2));
    }

    #[test]
    fn ascending_diagonal_is_reordered() {
        let a = RealMatrix::from_diag(&[1.0, 3.0]);
        let e = sym_eigen(&a, &Tolerances::default()).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors.column(0), vec![0.0, 1.0]);
    }

    #[test]
    fn textbook_two_by_two() {
        let a = RealMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = sym_eigen(&a, &Tolerances::default()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        // columns are unique up to sign
        let s0 = v0[0].signum();
        let s1 = v1[0].signum();
        assert!((s0 * v0[0] - h).abs() < 1e-15 && (s0 * v0[1] - h).abs() < 1e-15);
        assert!((s1 * v1[0] - h).abs() < 1e-15 && (s1 * v1[1] + h).abs() < 1e-15);
    }

    #[test]
    fn random_symmetric_residual_and_orthogonality() {
        for seed in 0..10 {
            let a = random_symmetric(10, seed);
            let e = sym_eigen(&a, &Tolerances::default()).unwrap();
            assert!(residual(&a, &e) <= 1e-9, "seed {seed}");
            let vtv = &e.vectors.transpose() * &e.vectors;
            assert!(vtv.max_abs_diff(&RealMatrix::identity(10)) <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let e = sym_eigen(&RealMatrix::zeros(3, 3), &Tolerances::default()).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
    }

    #[test]
    fn sweep_cap_reports_no_convergence() {
        let a = random_symmetric(6, 3);
        let tol = Tolerances {
            max_sweeps: 1,
            ..Tolerances::default()
        };
        assert!(matches!(
            sym_eigen(&a, &tol),
            Err(Error::NoConvergence { sweeps: 1, .. })
        ));
    }
}
