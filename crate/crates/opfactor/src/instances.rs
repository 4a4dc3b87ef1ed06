//! Seeded instance generators.
//!
//! Determinism contract: instance `k` of a batch with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` with stream `k` (`set_stream`), and every
//! generator consumes the stream in a fixed documented order.  Identical
//! `(spec, index)` therefore reproduce bit-identical instances within a
//! build; the `difference-operator` kind consumes no randomness at all.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{OpfactorError, Result};
use crate::linalg::range_projection;
use crate::matrix::ComplexMatrix;
use crate::sebestyen::check_forward;
use crate::tolerance::Tolerance;

/// Families of generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InstanceKind {
    /// `T := X₀B` with `X₀ ⪰ 0`: forward-feasible by construction.
    ForwardFeasible,
    /// A feasible pair perturbed off the feasibility manifold and re-tested.
    ForwardInfeasible,
    /// `T := B·C₀`: Douglas-factorable by construction.
    DouglasFeasible,
    /// `B := Y₀T + (I − P_T)R` with `Y₀ ⪰ 0`: reversed-feasible.
    ReversedFeasible,
    /// Unstructured complex Gaussian pair.
    Random,
    /// Scaled forward-difference stencil with `B = I`; deterministic.
    DifferenceOperator,
}

impl InstanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceKind::ForwardFeasible => "forward-feasible",
            InstanceKind::ForwardInfeasible => "forward-infeasible",
            InstanceKind::DouglasFeasible => "douglas-feasible",
            InstanceKind::ReversedFeasible => "reversed-feasible",
            InstanceKind::Random => "random",
            InstanceKind::DifferenceOperator => "difference-operator",
        }
    }

    pub fn all() -> [InstanceKind; 6] {
        [
            InstanceKind::ForwardFeasible,
            InstanceKind::ForwardInfeasible,
            InstanceKind::DouglasFeasible,
            InstanceKind::ReversedFeasible,
            InstanceKind::Random,
            InstanceKind::DifferenceOperator,
        ]
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = OpfactorError;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::all()
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| OpfactorError::Parse(format!("unknown instance kind '{s}'")))
    }
}

/// Description of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub seed: u64,
    pub scale: f64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, n: usize, seed: u64, scale: f64) -> Result<Self> {
        let spec = Self { kind, n, seed, scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(OpfactorError::InvalidSpec(
                "dimension must be at least 1".to_string(),
            ));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(OpfactorError::InvalidSpec(format!(
                "scale must be a positive real, got {}",
                self.scale
            )));
        }
        Ok(())
    }
}

/// A generated pair together with the planted factor, when one exists:
/// `X₀` for forward-feasible, `C₀` for douglas-feasible, `Y₀` for
/// reversed-feasible.
#[derive(Debug, Clone)]
pub struct Instance {
    pub t: ComplexMatrix,
    pub b: ComplexMatrix,
    pub ground_truth: Option<ComplexMatrix>,
}

/// The PRNG for instance `index` of a batch seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian entry: real and imaginary parts independent
/// `N(0, 1/2)`, so `E|z|² = 1`.
pub(crate) fn draw_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn draw_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| draw_complex(rng) * scale).collect();
    ComplexMatrix::from_vec(rows, cols, entries).expect("gaussian entries are finite")
}

/// Haar-distributed unitary via QR of a complex Gaussian with the phase
/// convention fixed by the diagonal of R.
pub(crate) fn draw_haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = draw_matrix(rng, n, n, 1.0);
    let qr = g.as_na().clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase.conj();
        }
    }
    ComplexMatrix::from_na(q)
}

/// Random PSD operator `U diag(d) U*` with eigenvalues uniform in
/// `[0, max_eig]`.
fn draw_psd(rng: &mut ChaCha8Rng, n: usize, max_eig: f64) -> ComplexMatrix {
    let u = draw_haar_unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * max_eig).collect();
    (&(&u * &ComplexMatrix::from_diag(&d)) * &u.adjoint()).hermitize()
}

/// Random operator `U diag(σ) V*` with singular values uniform in
/// `[0.3, 1]·scale`; well-conditioned so that planted factors stay
/// numerically recoverable.
fn draw_well_conditioned(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
    let u = draw_haar_unitary(rng, n);
    let v = draw_haar_unitary(rng, n);
    let s: Vec<f64> = (0..n).map(|_| (0.3 + 0.7 * rng.gen::<f64>()) * scale).collect();
    &(&u * &ComplexMatrix::from_diag(&s)) * &v.adjoint()
}

/// Like [`draw_well_conditioned`] but with a random rank deficiency of up
/// to a third of the dimension, to exercise nontrivial range projectors.
fn draw_rank_deficient(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
    let u = draw_haar_unitary(rng, n);
    let v = draw_haar_unitary(rng, n);
    let drop = rng.gen_range(0..=n / 3);
    let s: Vec<f64> = (0..n)
        .map(|i| {
            if i < n - drop {
                (0.3 + 0.7 * rng.gen::<f64>()) * scale
            } else {
                0.0
            }
        })
        .collect();
    &(&u * &ComplexMatrix::from_diag(&s)) * &v.adjoint()
}

/// Scaled forward-difference stencil on a unit interval with `n` interior
/// points and a Dirichlet condition at the right end: `n·(f_{i+1} − f_i)`,
/// entries `±n`.
pub fn difference_operator(n: usize) -> ComplexMatrix {
    assert!(n > 0);
    let nf = n as f64;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(-nf, 0.0)
        } else if c == r + 1 {
            Complex64::new(nf, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap()
}

/// Tridiagonal finite-element mass matrix on the same grid:
/// `(1/(6n))·tridiag(1, 4, 1)`; Hermitian positive definite.
pub fn mass_matrix(n: usize) -> ComplexMatrix {
    assert!(n > 0);
    let h6 = 1.0 / (6.0 * n as f64);
    ComplexMatrix::from_fn(n, n, |r, c| {
        let v = if r == c {
            4.0
        } else if r.abs_diff(c) == 1 {
            1.0
        } else {
            0.0
        };
        Complex64::new(v * h6, 0.0)
    })
    .unwrap()
}

/// Generates instance 0 of the batch; see [`gen_instance_indexed`].
pub fn gen_instance(spec: &InstanceSpec) -> Result<Instance> {
    gen_instance_indexed(spec, 0)
}

/// Generates the `index`-th instance of a seeded batch.
pub fn gen_instance_indexed(spec: &InstanceSpec, index: u64) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = instance_rng(spec.seed, index);
    match spec.kind {
        InstanceKind::ForwardFeasible => {
            let b = draw_well_conditioned(&mut rng, n, 1.0);
            let x0 = draw_psd(&mut rng, n, spec.scale);
            let t = &x0 * &b;
            Ok(Instance {
                t,
                b,
                ground_truth: Some(x0),
            })
        }
        InstanceKind::ForwardInfeasible => {
            let b = draw_well_conditioned(&mut rng, n, 1.0);
            let x0 = draw_psd(&mut rng, n, spec.scale);
            let t0 = &x0 * &b;
            let tol = Tolerance::default();
            // Push T off the feasibility manifold; a generic perturbation
            // breaks Hermitian-ness of T*B immediately, but re-test and
            // escalate to be safe.
            for k in 0..64 {
                let delta = 0.25 * spec.scale * 1.5_f64.powi(k);
                let t = &t0 + &draw_matrix(&mut rng, n, n, delta);
                if !check_forward(&t, &b, &tol)?.feasible {
                    return Ok(Instance {
                        t,
                        b,
                        ground_truth: None,
                    });
                }
            }
            Err(OpfactorError::InvalidSpec(
                "could not perturb instance off the feasibility manifold".to_string(),
            ))
        }
        InstanceKind::DouglasFeasible => {
            let b = draw_rank_deficient(&mut rng, n, 1.0);
            let c0 = draw_matrix(&mut rng, n, n, spec.scale);
            let t = &b * &c0;
            Ok(Instance {
                t,
                b,
                ground_truth: Some(c0),
            })
        }
        InstanceKind::ReversedFeasible => {
            let t = draw_rank_deficient(&mut rng, n, 1.0);
            let y0 = draw_psd(&mut rng, n, spec.scale);
            let r = draw_matrix(&mut rng, n, n, 1.0);
            let p_t = range_projection(&t, &Tolerance::default())?;
            let off = &(&ComplexMatrix::identity(n) - &p_t) * &r;
            let b = &(&y0 * &t) + &off;
            Ok(Instance {
                t,
                b,
                ground_truth: Some(y0),
            })
        }
        InstanceKind::Random => {
            let t = draw_matrix(&mut rng, n, n, spec.scale);
            let b = draw_matrix(&mut rng, n, n, spec.scale);
            Ok(Instance {
                t,
                b,
                ground_truth: None,
            })
        }
        InstanceKind::DifferenceOperator => Ok(Instance {
            t: difference_operator(n),
            b: ComplexMatrix::identity(n),
            ground_truth: None,
        }),
    }
}
