//! Concrete Hamiltonian generators.
//!
//! Three families: seeded random non-normal matrices with the imaginary parts
//! of the spectrum bounded from above, a canned 2x2 triangular example with a
//! hand-computed metric, and the finite-difference harmonic oscillator with
//! complex mass/frequency on a symmetric grid, including the check of its
//! scaled-coordinate relations q_Q ~ e^{i theta/2} q, p_Q ~ e^{-i theta/2} p.

use ndarray::Array2;
use ndarray_linalg::QR;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::qmetric::QMetric;
use crate::rng;
use crate::spectral::Spectrum;

/// Recipe for a seeded random diagonalizable matrix with controlled
/// spectrum and eigenbasis conditioning.
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub dim: usize,
    pub seed: u64,
    /// Upper bound B on the imaginary parts; one mode is pinned to it exactly.
    pub im_upper: f64,
    /// How far below B the remaining imaginary parts spread.
    pub im_spread: f64,
    /// Target condition number of the eigenvector basis (>= 1).
    pub cond_target: f64,
}

impl RandomSpec {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            seed,
            im_upper: 0.5,
            im_spread: 1.0,
            cond_target: 10.0,
        }
    }

    pub fn with_im_upper(mut self, b: f64) -> Self {
        self.im_upper = b;
        self
    }

    pub fn with_im_spread(mut self, spread: f64) -> Self {
        self.im_spread = spread;
        self
    }

    pub fn with_cond_target(mut self, cond: f64) -> Self {
        self.cond_target = cond;
        self
    }
}

/// H = P diag(lambda) P^-1 from explicit eigenvalues and an explicit basis.
pub fn assemble(eigenvalues: &[Complex64], p: &CMatrix) -> Result<CMatrix> {
    if p.dim() != eigenvalues.len() {
        return Err(Error::DimensionMismatch {
            expected: eigenvalues.len(),
            got: p.dim(),
        });
    }
    let d = CMatrix::from_diagonal(eigenvalues);
    let p_inv = crate::spectral::eigen_inverse(p)?;
    Ok(&(p * &d) * &p_inv)
}

/// Seeded random non-normal diagonalizable matrix.
///
/// The eigenvalues have Im <= im_upper with the first mode pinned exactly at
/// the bound; the eigenvector basis has singular values spread geometrically
/// so cond(P) lands on cond_target. Identical spec fields give bit-identical
/// output.
pub fn random_nonnormal(spec: &RandomSpec) -> Result<CMatrix> {
    if spec.dim < 2 {
        return Err(Error::InvalidArgument("dim must be at least 2"));
    }
    if !(spec.cond_target >= 1.0 && spec.cond_target <= 1e4) {
        return Err(Error::InvalidArgument("cond_target must lie in [1, 1e4]"));
    }
    if !(spec.im_spread > 0.0) {
        return Err(Error::InvalidArgument("im_spread must be positive"));
    }
    let n = spec.dim;
    let mut stream = rng::rng_for(spec.seed);

    use rand::Rng;
    let mut eigenvalues = Vec::with_capacity(n);
    for k in 0..n {
        let re = stream.gen_range(-2.0..2.0);
        let im = if k == 0 {
            spec.im_upper
        } else {
            spec.im_upper - spec.im_spread * stream.gen_range(0.1..1.0)
        };
        eigenvalues.push(Complex64::new(re, im));
    }

    let u = random_unitary(&mut stream, n)?;
    let v = random_unitary(&mut stream, n)?;
    let sigma: Vec<f64> = (0..n)
        .map(|k| {
            if n == 1 {
                1.0
            } else {
                spec.cond_target.powf(-(k as f64) / (n as f64 - 1.0))
            }
        })
        .collect();

    // P = U S V' and its inverse from the same factors, so the assembly is
    // accurate even near the conditioning limit.
    let s_mat = CMatrix::from_diagonal(
        &sigma
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>(),
    );
    let s_inv = CMatrix::from_diagonal(
        &sigma
            .iter()
            .map(|&x| Complex64::new(1.0 / x, 0.0))
            .collect::<Vec<_>>(),
    );
    let p = &(&u * &s_mat) * &v.dagger();
    let p_inv = &(&v * &s_inv) * &u.dagger();
    let d = CMatrix::from_diagonal(&eigenvalues);
    Ok(&(&p * &d) * &p_inv)
}

fn random_unitary(stream: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<CMatrix> {
    let g = rng::complex_gaussian_matrix(stream, n);
    let (q, r) = g.qr().map_err(|e| Error::EigenSolver(format!("qr: {e}")))?;
    // Fix the gauge so Q is fully determined by the Gaussian draw.
    let mut q = q;
    for j in 0..n {
        let d = r[[j, j]];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            q.column_mut(j).mapv_inplace(|z| z * phase);
        }
    }
    CMatrix::new(q)
}

/// The worked 2x2 example: returns the upper-triangular matrix together with
/// its hand-computed metric [[1, -1], [-1, 3]].
pub fn triangular_demo() -> (CMatrix, CMatrix) {
    let h = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
    let q = CMatrix::from_real_rows(&[&[1.0, -1.0], &[-1.0, 3.0]]).unwrap();
    (h, q)
}

/// Harmonic oscillator with complex mass and frequency, discretized on a
/// uniform symmetric grid.
#[derive(Debug, Clone)]
pub struct OscillatorSpec {
    pub mass: Complex64,
    pub omega: Complex64,
    pub hbar: f64,
    /// Half-width of the symmetric grid [-grid_max, grid_max].
    pub grid_max: f64,
    pub n_points: usize,
}

impl OscillatorSpec {
    pub fn new(
        mass: Complex64,
        omega: Complex64,
        hbar: f64,
        grid_max: f64,
        n_points: usize,
    ) -> Result<Self> {
        if n_points < 16 {
            return Err(Error::GridTooCoarse(n_points));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument("hbar must be positive"));
        }
        if !(grid_max > 0.0) {
            return Err(Error::InvalidArgument("grid_max must be positive"));
        }
        if mass.norm() == 0.0 || omega.norm() == 0.0 {
            return Err(Error::InvalidArgument("mass and omega must be nonzero"));
        }
        Ok(Self {
            mass,
            omega,
            hbar,
            grid_max,
            n_points,
        })
    }

    pub fn grid_min(&self) -> f64 {
        -self.grid_max
    }

    /// theta = arg(m w), the rotation angle of the scaled coordinates.
    pub fn theta(&self) -> f64 {
        (self.mass * self.omega).arg()
    }

    /// m_eff = m e^{-i theta}; m_eff * w is real by construction.
    pub fn effective_mass(&self) -> Complex64 {
        self.mass * Complex64::from_polar(1.0, -self.theta())
    }

    /// True when the continuum spectrum has imaginary parts unbounded from
    /// above (Im w > 0): such a model must not feed the maximization
    /// machinery, even though the finite grid artificially bounds it.
    pub fn im_spectrum_unbounded(&self) -> bool {
        self.omega.im > 0.0
    }

    /// Grid points and spacing.
    pub fn grid(&self) -> (Vec<f64>, f64) {
        let n = self.n_points;
        let dq = 2.0 * self.grid_max / (n as f64 - 1.0);
        let q = (0..n).map(|k| -self.grid_max + k as f64 * dq).collect();
        (q, dq)
    }

    /// Documented width heuristic: grid_max >= 6 sqrt(hbar / |m w|) keeps the
    /// low eigenfunctions decayed at the edges.
    pub fn grid_wide_enough(&self) -> bool {
        self.grid_max >= 6.0 * (self.hbar / (self.mass * self.omega).norm()).sqrt()
    }
}

/// Dense grid Hamiltonian: central second difference for the kinetic term,
/// (1/2) m w^2 q^2 on the diagonal, Dirichlet boundaries.
pub fn oscillator_hamiltonian(spec: &OscillatorSpec) -> Result<CMatrix> {
    let n = spec.n_points;
    let (q, dq) = spec.grid();
    let kin = spec.hbar * spec.hbar / (2.0 * spec.mass * dq * dq);
    let pot = 0.5 * spec.mass * spec.omega * spec.omega;
    let mut h = Array2::zeros((n, n));
    for k in 0..n {
        h[[k, k]] = 2.0 * kin + pot * q[k] * q[k];
        if k + 1 < n {
            h[[k, k + 1]] = -kin;
            h[[k + 1, k]] = -kin;
        }
    }
    CMatrix::new(h)
}

/// Grid position operator diag(q_k).
pub fn position_operator(spec: &OscillatorSpec) -> CMatrix {
    let (q, _) = spec.grid();
    CMatrix::from_diagonal(
        &q.iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>(),
    )
}

/// Grid momentum operator -i hbar d/dq with central differences and
/// Dirichlet ghosts; Hermitian by construction.
pub fn momentum_operator(spec: &OscillatorSpec) -> CMatrix {
    let n = spec.n_points;
    let (_, dq) = spec.grid();
    let coeff = Complex64::new(0.0, -spec.hbar / (2.0 * dq));
    let mut p = Array2::zeros((n, n));
    for k in 0..n {
        if k + 1 < n {
            p[[k, k + 1]] = coeff;
        }
        if k >= 1 {
            p[[k, k - 1]] = -coeff;
        }
    }
    CMatrix::from_array_unchecked(p)
}

/// Residuals of the scaled-coordinate relations for the oscillator.
#[derive(Debug, Clone, Copy)]
pub struct QqResiduals {
    /// Defect of q_Q - e^{i theta/2} q on the low-eigenstate subspace.
    pub residual_q: f64,
    /// Defect of p_Q - e^{-i theta/2} p on the low-eigenstate subspace.
    pub residual_p: f64,
    /// Defect of H - (p_Q^2 / 2 m_eff + m_eff w^2 q_Q^2 / 2) on the subspace.
    pub residual_h: f64,
}

/// Check the scaled-coordinate relations on the subspace of the `n_check`
/// lowest eigenstates.
///
/// The symmetrized operators q_Q = (q + q^+Q)/2 and p_Q = (p + p^+Q)/2 follow
/// the scaling relations only to O(theta^2), and grid truncation corrupts the
/// high modes entirely, so each defect is compressed onto the low-eigenstate
/// subspace (in the Q-orthonormal representation) and measured relative to
/// the Frobenius norm of the full reference operator.
pub fn oscillator_qq_relations(
    spec: &OscillatorSpec,
    s: &Spectrum,
    m: &QMetric,
    n_check: usize,
) -> Result<QqResiduals> {
    let n = spec.n_points;
    if s.dim() != n || m.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.dim(),
        });
    }
    if n_check == 0 || n_check > n / 4 {
        return Err(Error::InvalidArgument("n_check must lie in [1, dim/4]"));
    }

    let q_op = position_operator(spec);
    let p_op = momentum_operator(spec);
    let q_q = symmetrized(m, &q_op)?;
    let p_q = symmetrized(m, &p_op)?;

    let theta = spec.theta();
    let q_expected = q_op.scaled(Complex64::from_polar(1.0, 0.5 * theta));
    let p_expected = p_op.scaled(Complex64::from_polar(1.0, -0.5 * theta));

    let m_eff = spec.effective_mass();
    let h_ref = oscillator_hamiltonian(spec)?;
    let half = Complex64::new(0.5, 0.0);
    let kinetic = (&p_q * &p_q).scaled(half / m_eff);
    let potential = (&q_q * &q_q).scaled(half * m_eff * spec.omega * spec.omega);
    let h_eff = &kinetic + &potential;

    // Columns of the diagonalizer for the n_check lowest-energy modes.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        s.eigenvalues[a]
            .re
            .partial_cmp(&s.eigenvalues[b].re)
            .unwrap()
    });
    let low: Vec<usize> = order.into_iter().take(n_check).collect();
    let mut v = Array2::zeros((n, n_check));
    for (slot, &idx) in low.iter().enumerate() {
        v.column_mut(slot)
            .assign(&s.diagonalizer.as_array().column(idx));
    }
    let vq = {
        // V' Q, rows are the metric-dual bras of the low modes.
        let qv = m.q.as_array().dot(&v);
        qv.t().mapv(|z| z.conj())
    };
    let compress = |x: &CMatrix| -> f64 {
        let inner = x.as_array().dot(&v);
        let small = vq.dot(&inner);
        small.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };

    let residual_q = compress(&(&q_q - &q_expected)) / q_op.frobenius_norm();
    let residual_p = compress(&(&p_q - &p_expected)) / p_op.frobenius_norm();
    let residual_h = compress(&(&h_ref - &h_eff)) / h_ref.frobenius_norm();

    Ok(QqResiduals {
        residual_q,
        residual_p,
        residual_h,
    })
}

fn symmetrized(m: &QMetric, op: &CMatrix) -> Result<CMatrix> {
    let adj = m.adjoint(op)?;
    Ok((op + &adj).scaled(Complex64::new(0.5, 0.0)))
}
