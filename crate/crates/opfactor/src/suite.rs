//! Cross-module property suites and the difference-operator scaling fixture.
//!
//! Every equivalence and inequality the library claims is replayed here over
//! seeded instance batches: the forward factorization and its four-way
//! equivalence, the sandwich chain, Douglas three-way agreement, the reversed
//! inequality with its operator-form bounds, pseudoinverse and projector
//! laws, pencil oracle agreement against an independent bisection, and the
//! serialization/determinism contracts.  The suite is a report generator:
//! failed cases are counted and described, never panicked on.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::certificate::{verify_certificate_file, CertificateFile, Mode};
use crate::douglas::{douglas_equivalence_check, douglas_factor};
use crate::error::{OpfactorError, Result};
use crate::instances::{
    difference_operator, draw_complex, draw_matrix, gen_instance_indexed, instance_rng,
    Instance, InstanceKind, InstanceSpec,
};
use crate::io::{matrix_from_csv, matrix_to_csv};
use crate::linalg::{
    herm_eig, loewner_leq, pencil_extremes, pseudoinverse, psd_min_eig, range_projection,
};
use crate::matrix::{vec_inner, vec_norm, ComplexMatrix};
use crate::partial::{compose, coordinate_basis, includes, PartialOperator};
use crate::reversed::{check_reversed, construct_y};
use crate::sebestyen::{check_forward, construct_x, gram_operator, verify_forward_certificate};
use crate::tolerance::Tolerance;

/// Outcome of one property family.
#[derive(Debug, Clone)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest slack consumed by a passing case; property-specific units.
    pub worst_slack: f64,
    /// Description of the first failing case, if any.
    pub first_failure: Option<String>,
}

/// Aggregate result of [`property_suite`].
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub properties: Vec<PropertyOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.failures == 0)
    }

    pub fn total_cases(&self) -> usize {
        self.properties.iter().map(|p| p.cases).sum()
    }

    pub fn total_failures(&self) -> usize {
        self.properties.iter().map(|p| p.failures).sum()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "property suite: seed {}, base count {}",
            self.seed, self.count
        )?;
        writeln!(
            f,
            "{:<28} {:>6} {:>9} {:>12}",
            "property", "cases", "failures", "worst-slack"
        )?;
        for p in &self.properties {
            writeln!(
                f,
                "{:<28} {:>6} {:>9} {:>12.3e}",
                p.name, p.cases, p.failures, p.worst_slack
            )?;
            if let Some(desc) = &p.first_failure {
                writeln!(f, "    first failure: {desc}")?;
            }
        }
        write!(
            f,
            "total: {} cases, {} failures — {}",
            self.total_cases(),
            self.total_failures(),
            if self.all_passed() { "PASS" } else { "FAIL" }
        )
    }
}

struct Recorder {
    name: &'static str,
    cases: usize,
    failures: usize,
    worst_slack: f64,
    first_failure: Option<String>,
}

impl Recorder {
    fn new(name: &'static str) -> Self {
        Recorder {
            name,
            cases: 0,
            failures: 0,
            worst_slack: 0.0,
            first_failure: None,
        }
    }

    /// Records one case.  `outcome` is `(passed, slack)`; an `Err` counts as
    /// a failure with the error as description.
    fn record(&mut self, outcome: Result<(bool, f64)>, desc: impl FnOnce() -> String) {
        self.cases += 1;
        match outcome {
            Ok((true, slack)) => {
                if slack > self.worst_slack {
                    self.worst_slack = slack;
                }
            }
            Ok((false, slack)) => {
                self.failures += 1;
                if slack > self.worst_slack {
                    self.worst_slack = slack;
                }
                if self.first_failure.is_none() {
                    self.first_failure = Some(desc());
                }
            }
            Err(e) => {
                self.failures += 1;
                if self.first_failure.is_none() {
                    self.first_failure = Some(format!("{}: {e}", desc()));
                }
            }
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            worst_slack: self.worst_slack,
            first_failure: self.first_failure,
        }
    }
}

const PROBE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const SCALES: [f64; 3] = [0.5, 1.0, 4.0];

fn dim_for(i: u64, stride: u64) -> usize {
    1 + ((i * stride + i / 16) % 16) as usize
}

fn gen(seed: u64, prop: u64, i: u64, kind: InstanceKind, n: usize, scale: f64) -> Result<Instance> {
    let spec = InstanceSpec::new(kind, n, seed, scale)?;
    gen_instance_indexed(&spec, (prop << 32) | i)
}

fn probe_rng(seed: u64, prop: u64, i: u64) -> ChaCha8Rng {
    instance_rng(seed ^ PROBE_SALT, (prop << 32) | i)
}

fn unit_probe(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| draw_complex(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

fn hand_instance() -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::from_real_vec(2, 2, vec![3.0, 0.0, 0.0, 0.0]).unwrap(),
        ComplexMatrix::from_real_vec(2, 2, vec![1.0, 0.0, 0.0, 2.0]).unwrap(),
    )
}

fn max_residual(residuals: &std::collections::BTreeMap<String, f64>) -> f64 {
    residuals.values().fold(0.0_f64, |m, &v| m.max(v.abs()))
}

/// Independent oracle for the least `lambda` with `A ⪯ λM`: plain bisection
/// over the PSD test of `λM − A` at a fixed, tolerance-independent threshold.
/// Returns `None` when no finite `lambda` works.
pub fn independent_lambda_bisection(
    a: &ComplexMatrix,
    m: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Option<f64>> {
    let ah = a.hermitize();
    let mh = m.hermitize();
    let tight_psd = |lam: f64| -> bool {
        let diff = &mh.scale(lam) - &ah;
        let eig = herm_eig(&diff);
        let min = eig.values.first().copied().unwrap_or(0.0);
        min >= -1e-12 * diff.fro_norm().max(1.0)
    };
    let m_pinv = pseudoinverse(&mh, tol)?;
    let cap = 2.0 * ah.op_norm() * m_pinv.op_norm() + 1.0;
    if !tight_psd(cap) {
        return Ok(None);
    }
    if tight_psd(0.0) {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0_f64, cap);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tight_psd(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn heavy(count: usize) -> u64 {
    count.max(1) as u64
}

fn medium(count: usize) -> u64 {
    (count / 2).max(10) as u64
}

fn light(count: usize) -> u64 {
    (count / 5).max(5) as u64
}

/// Runs every property family over seeded instances and reports pass/fail
/// counts and worst slacks.  `count` is the case budget for the heavyweight
/// factorization families; cheaper law checks run at half or a fifth of it.
pub fn property_suite(seed: u64, count: usize, tol: &Tolerance) -> SuiteReport {
    let properties = vec![
        prop_forward_equivalence(seed, heavy(count), tol),
        prop_four_way_equivalence(seed, heavy(count), tol),
        prop_sandwich_chain(seed, heavy(count), tol),
        prop_operator_to_form(seed, medium(count), tol),
        prop_lambda_minimality(seed, medium(count), tol),
        prop_scaling_covariance(seed, medium(count), tol),
        prop_penrose_identities(seed, medium(count), tol),
        prop_projector_laws(seed, medium(count), tol),
        prop_pencil_oracle_agreement(seed, light(count), tol),
        prop_pencil_m_grid(seed, light(count), tol),
        prop_douglas_three_way(seed, heavy(count), tol),
        prop_douglas_minimal_norm(seed, medium(count), tol),
        prop_reversed_equivalence(seed, heavy(count), tol),
        prop_reversed_operator_form(seed, heavy(count), tol),
        prop_duality(seed, medium(count), tol),
        prop_partial_operator_laws(seed, medium(count), tol),
        prop_gram_cauchy_schwarz(seed, medium(count), tol),
        prop_determinism(seed, light(count), tol),
        prop_serialization_round_trip(seed, light(count), tol),
    ];
    SuiteReport {
        seed,
        count,
        properties,
    }
}

/// Forward equivalence: constructed instances are feasible with minimal
/// `lambda` below the planted norm, perturbed ones are infeasible with a
/// witness, and every feasible case verifies end to end.
fn prop_forward_equivalence(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 1;
    let mut rec = Recorder::new("forward-equivalence");
    let kinds = [
        InstanceKind::ForwardFeasible,
        InstanceKind::ForwardInfeasible,
        InstanceKind::Random,
    ];
    for i in 0..cases {
        let kind = kinds[(i % 3) as usize];
        let n = dim_for(i, 7);
        let scale = SCALES[((i / 3) % 3) as usize];
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, kind, n, scale)?;
            let fc = check_forward(&inst.t, &inst.b, tol)?;
            match kind {
                InstanceKind::ForwardFeasible => {
                    if !fc.feasible {
                        return Ok((false, 0.0));
                    }
                    let cert = construct_x(&inst.t, &inst.b, tol)?;
                    let report = verify_forward_certificate(&inst.t, &inst.b, &cert, tol);
                    let x0 = inst.ground_truth.expect("planted factor");
                    let bound_ok = cert.lambda_min <= x0.op_norm() + 1e-8;
                    Ok((report.all_passed() && bound_ok, max_residual(&cert.residuals)))
                }
                InstanceKind::ForwardInfeasible => {
                    let construct_rejects = matches!(
                        construct_x(&inst.t, &inst.b, tol),
                        Err(OpfactorError::Infeasible { .. })
                    );
                    Ok((!fc.feasible && fc.witness.is_some() && construct_rejects, 0.0))
                }
                _ => {
                    // consistency only: whatever the verdict, construction
                    // and verification must agree with it
                    let agreed = match construct_x(&inst.t, &inst.b, tol) {
                        Ok(cert) => {
                            fc.feasible
                                && verify_forward_certificate(&inst.t, &inst.b, &cert, tol)
                                    .all_passed()
                        }
                        Err(OpfactorError::Infeasible { .. }) => !fc.feasible,
                        Err(e) => return Err(e),
                    };
                    Ok((agreed, 0.0))
                }
            }
        })();
        rec.record(outcome, || format!("kind {kind:?}, n {n}, scale {scale}, case {i}"));
    }
    rec.finish()
}

/// Four executable readings of the forward criterion agree on every instance:
/// the pointwise check, factor construction, Gram majorization at a rigorous
/// cap, and the full sandwich at the same cap.
fn prop_four_way_equivalence(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 2;
    let mut rec = Recorder::new("four-way-equivalence");
    let kinds = [
        InstanceKind::ForwardFeasible,
        InstanceKind::ForwardInfeasible,
        InstanceKind::Random,
    ];
    for i in 0..cases {
        let outcome = (|| -> Result<(bool, f64)> {
            let (t, b, pinned_lambda) = if i == 0 {
                let (t, b) = hand_instance();
                (t, b, Some(3.0))
            } else if i == 1 {
                (ComplexMatrix::zeros(3, 3), ComplexMatrix::identity(3), Some(0.0))
            } else {
                let kind = kinds[(i % 3) as usize];
                let inst = gen(seed, PROP, i, kind, dim_for(i, 5), SCALES[((i / 3) % 3) as usize])?;
                (inst.t, inst.b, None)
            };

            let fc = check_forward(&t, &b, tol)?;
            let s1 = fc.feasible;

            let s2 = match construct_x(&t, &b, tol) {
                Ok(cert) => verify_forward_certificate(&t, &b, &cert, tol).all_passed(),
                Err(OpfactorError::Infeasible { .. }) => false,
                Err(e) => return Err(e),
            };

            let (m, defect) = gram_operator(&t, &b)?;
            let defect_ok = defect <= tol.eig_rel;
            let m_psd = psd_min_eig(&m, tol)?.is_psd;
            let tt = (&t.adjoint() * &t).hermitize();
            let bb = (&b.adjoint() * &b).hermitize();
            let cap = 2.0 * tt.op_norm() * pseudoinverse(&m, tol)?.op_norm()
                + 2.0 * m.op_norm() * pseudoinverse(&bb, tol)?.op_norm()
                + 1.0;
            let s3 = defect_ok && m_psd && loewner_leq(&tt, &m.scale(cap), tol)?;
            let s4 = s3 && loewner_leq(&m, &bb.scale(cap), tol)?;

            let mut ok = s1 == s2 && s2 == s3 && s3 == s4;
            let mut slack = 0.0;
            if let Some(lam) = pinned_lambda {
                slack = (fc.lambda_min - lam).abs();
                ok = ok && s1 && slack <= 1e-9;
            }
            Ok((ok, slack))
        })();
        rec.record(outcome, || format!("case {i}"));
    }
    rec.finish()
}

/// The sandwich chain at the certified `lambda`: `T*T ⪯ λH`, `λH ⪯ λ²B*B`,
/// and the finite-dimensional collapse `H = hermitize(T*B)`.
fn prop_sandwich_chain(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 3;
    let mut rec = Recorder::new("sandwich-chain");
    for i in 0..cases {
        let n = dim_for(i, 11);
        let scale = SCALES[(i % 3) as usize];
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ForwardFeasible, n, scale)?;
            let cert = construct_x(&inst.t, &inst.b, tol)?;
            let lam = cert.lambda_min;
            let h = &cert.intermediate_h;
            let tt = (&inst.t.adjoint() * &inst.t).hermitize();
            let bb = (&inst.b.adjoint() * &inst.b).hermitize();

            let lower = psd_min_eig(&(&h.scale(lam) - &tt), tol)?.min_eig;
            let upper = psd_min_eig(&(&bb.scale(lam * lam) - &h.scale(lam)), tol)?.min_eig;
            let s_lower = tt.op_norm().max(1.0);
            let s_upper = bb.scale(lam * lam).op_norm().max(1.0);

            let (m, _) = gram_operator(&inst.t, &inst.b)?;
            let collapse = (h - &m).fro_norm();
            let collapse_ok = collapse <= 1e-8 * h.fro_norm().max(f64::MIN_POSITIVE);

            let ok = lower >= -1e-8 * s_lower && upper >= -1e-8 * s_upper && collapse_ok;
            let slack = (-lower / s_lower).max(-upper / s_upper).max(0.0);
            Ok((ok, slack))
        })();
        rec.record(outcome, || format!("n {n}, scale {scale}, case {i}"));
    }
    rec.finish()
}

/// Whenever `T*T ⪯ λM` holds with `M ⪰ 0`, the pointwise inequality
/// `‖Tf‖² ≤ λ(f, Mf)` holds on random probes; zero counterexamples.
fn prop_operator_to_form(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 4;
    let mut rec = Recorder::new("operator-to-form");
    for i in 0..cases {
        let n = dim_for(i, 3);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ForwardFeasible, n, SCALES[(i % 3) as usize])?;
            let fc = check_forward(&inst.t, &inst.b, tol)?;
            if !fc.feasible {
                return Ok((false, 0.0));
            }
            let lam = fc.lambda_min;
            let tt = (&inst.t.adjoint() * &inst.t).hermitize();
            if !loewner_leq(&tt, &fc.gram.scale(lam), tol)? {
                return Ok((false, 0.0));
            }
            let mut rng = probe_rng(seed, PROP, i);
            let budget = 1e-8 * (1.0 + inst.t.op_norm().powi(2));
            let mut worst = 0.0_f64;
            for _ in 0..8 {
                let f = unit_probe(&mut rng, n);
                let tf = inst.t.mul_vec(&f);
                let mf = fc.gram.mul_vec(&f);
                let lhs = vec_norm(&tf).powi(2);
                let rhs = lam * vec_inner(&mf, &f).re;
                worst = worst.max(lhs - rhs);
            }
            Ok((worst <= budget, worst.max(0.0)))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Shaving `lambda` by `1e-6·(1+λ)` breaks the majorization, unless the
/// violating direction carries so little Gram mass that the PSD test cannot
/// resolve it — those cases are excused explicitly, never silently.
fn prop_lambda_minimality(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 5;
    let mut rec = Recorder::new("lambda-minimality");
    for i in 0..cases {
        let n = dim_for(i, 13);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ForwardFeasible, n, SCALES[(i % 3) as usize])?;
            let fc = check_forward(&inst.t, &inst.b, tol)?;
            if !fc.feasible {
                return Ok((false, 0.0));
            }
            let eps = 1e-6 * (1.0 + fc.lambda_min);
            let shaved = fc.lambda_min - eps;
            if shaved <= 0.0 {
                return Ok((true, 0.0));
            }
            let tt = (&inst.t.adjoint() * &inst.t).hermitize();
            let still = loewner_leq(&tt, &fc.gram.scale(shaved), tol)?;
            if !still {
                return Ok((true, 0.0));
            }
            // The violation depth is at least eps times the smallest positive
            // Gram eigenvalue; if that is below the PSD test's resolution
            // (which is floored at the operands' scale) the shave is
            // undetectable and the case is excused.
            let eig = herm_eig(&fc.gram);
            let sigma_min_plus = eig
                .values
                .iter()
                .copied()
                .filter(|&v| v > tol.rank_rel * eig.op_norm())
                .fold(f64::INFINITY, f64::min);
            let diff_scale = (&fc.gram.scale(shaved) - &tt)
                .fro_norm()
                .max(tt.fro_norm())
                .max(shaved * fc.gram.fro_norm())
                .max(1.0);
            let resolution = 20.0 * tol.eig_rel * diff_scale;
            let depth = eps * sigma_min_plus;
            Ok((depth <= resolution, depth / resolution.max(f64::MIN_POSITIVE)))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Covariance under rescaling `B → cB`: the forward and Douglas `lambda`
/// and the reversed `m` all scale by `1/c`.
fn prop_scaling_covariance(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 6;
    let mut rec = Recorder::new("scaling-covariance");
    let factors = [2.0, 0.5, 10.0];
    for i in 0..cases {
        let n = dim_for(i, 9);
        let c = factors[(i % 3) as usize];
        let outcome = (|| -> Result<(bool, f64)> {
            match i % 3 {
                0 => {
                    let inst = gen(seed, PROP, i, InstanceKind::ForwardFeasible, n, 1.0)?;
                    let base = check_forward(&inst.t, &inst.b, tol)?;
                    let scaled = check_forward(&inst.t, &inst.b.scale(c), tol)?;
                    let want = base.lambda_min / c;
                    let err = (scaled.lambda_min - want).abs();
                    Ok((base.feasible && scaled.feasible && err <= 1e-6 * (1.0 + want), err))
                }
                1 => {
                    let inst = gen(seed, PROP, i, InstanceKind::DouglasFeasible, n, 1.0)?;
                    let base = douglas_factor(&inst.t, &inst.b, tol)?;
                    let scaled = douglas_factor(&inst.t, &inst.b.scale(c), tol)?;
                    let want = base.lambda_min / c;
                    let err = (scaled.lambda_min - want).abs();
                    Ok((err <= 1e-6 * (1.0 + want), err))
                }
                _ => {
                    let inst = gen(seed, PROP, i, InstanceKind::ReversedFeasible, n, 1.0)?;
                    let base = check_reversed(&inst.t, &inst.b, tol)?;
                    let scaled = check_reversed(&inst.t, &inst.b.scale(c), tol)?;
                    match (base.m_max, scaled.m_max) {
                        (Some(m0), Some(m1)) => {
                            let want = m0 / c;
                            let err = (m1 - want).abs();
                            Ok((base.feasible && scaled.feasible && err <= 1e-6 * (1.0 + want), err))
                        }
                        (None, None) => Ok((base.feasible && scaled.feasible, 0.0)),
                        _ => Ok((false, 0.0)),
                    }
                }
            }
        })();
        rec.record(outcome, || format!("n {n}, factor {c}, case {i}"));
    }
    rec.finish()
}

/// The four Penrose identities for the SVD pseudoinverse on random
/// rectangular matrices.
fn prop_penrose_identities(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 7;
    let mut rec = Recorder::new("penrose-identities");
    for i in 0..cases {
        let outcome = (|| -> Result<(bool, f64)> {
            let mut rng = probe_rng(seed, PROP, i);
            let rows = rng.gen_range(1..=12);
            let cols = rng.gen_range(1..=12);
            let a = draw_matrix(&mut rng, rows, cols, SCALES[(i % 3) as usize]);
            let p = pseudoinverse(&a, tol)?;
            let norm = a.fro_norm().max(1.0);
            let r1 = (&(&(&a * &p) * &a) - &a).fro_norm() / norm;
            let r2 = (&(&(&p * &a) * &p) - &p).fro_norm() / p.fro_norm().max(1.0);
            let ap = &a * &p;
            let r3 = (&ap - &ap.adjoint()).fro_norm() / norm;
            let pa = &p * &a;
            let r4 = (&pa - &pa.adjoint()).fro_norm() / norm;
            let worst = r1.max(r2).max(r3).max(r4);
            Ok((worst <= 1e-10, worst))
        })();
        rec.record(outcome, || format!("case {i}"));
    }
    rec.finish()
}

/// Range projections are Hermitian idempotents fixing the range, with
/// operator norm at most 1, and agree with `A A⁺`.
fn prop_projector_laws(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 8;
    let mut rec = Recorder::new("projector-laws");
    for i in 0..cases {
        let outcome = (|| -> Result<(bool, f64)> {
            let mut rng = probe_rng(seed, PROP, i);
            let rows = rng.gen_range(1..=12);
            let cols = rng.gen_range(1..=12);
            let a = draw_matrix(&mut rng, rows, cols, 1.0);
            let p = range_projection(&a, tol)?;
            let idem = (&(&p * &p) - &p).fro_norm();
            let herm = (&p - &p.adjoint()).fro_norm();
            let fixes = (&(&p * &a) - &a).fro_norm() / a.fro_norm().max(1.0);
            let agrees = (&p - &(&a * &pseudoinverse(&a, tol)?)).fro_norm();
            let contraction = p.op_norm();
            let worst = idem.max(herm).max(fixes).max(agrees);
            Ok((worst <= 1e-10 && contraction <= 1.0 + 1e-9, worst))
        })();
        rec.record(outcome, || format!("case {i}"));
    }
    rec.finish()
}

/// The restricted-pencil `lambda_min` matches an independent bisection with
/// a tolerance-independent PSD threshold, to relative `1e-6`.
fn prop_pencil_oracle_agreement(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 9;
    let mut rec = Recorder::new("pencil-oracle-agreement");
    for i in 0..cases {
        let n = dim_for(i, 5);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ForwardFeasible, n, SCALES[(i % 3) as usize])?;
            let fc = check_forward(&inst.t, &inst.b, tol)?;
            if !fc.feasible {
                return Ok((false, 0.0));
            }
            let tt = (&inst.t.adjoint() * &inst.t).hermitize();
            let oracle = independent_lambda_bisection(&tt, &fc.gram, tol)?;
            match oracle {
                Some(lam) => {
                    let err = (lam - fc.lambda_min).abs() / (1.0 + fc.lambda_min);
                    Ok((err <= 1e-6, err))
                }
                None => Ok((false, 0.0)),
            }
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// The bisected `m_max` agrees with an independent fine-grid scan of the
/// PSD region boundary.
fn prop_pencil_m_grid(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 10;
    let mut rec = Recorder::new("pencil-m-grid");
    for i in 0..cases {
        let n = 1 + (dim_for(i, 3) % 8);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ReversedFeasible, n, SCALES[(i % 3) as usize])?;
            let tt = (&inst.t.adjoint() * &inst.t).hermitize();
            let (m_op, _) = gram_operator(&inst.b, &inst.t)?;
            let pr = pencil_extremes(&tt, &m_op, tol)?;
            let m_max = match pr.m_max {
                Some(m) => m,
                None => return Ok((true, 0.0)), // unconstrained: nothing to scan
            };
            let hi = 1.25 * m_max + 1e-9;
            let steps = 200;
            let mut grid_m = 0.0_f64;
            for k in 0..=steps {
                let cand = hi * k as f64 / steps as f64;
                if psd_min_eig(&(&tt - &m_op.scale(cand)), tol)?.is_psd {
                    grid_m = cand;
                }
            }
            let budget = hi / steps as f64 + 1e-6 * (1.0 + m_max);
            let err = (grid_m - m_max).abs();
            Ok((err <= budget, err))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Douglas three-way agreement (range inclusion ⟺ majorization ⟺
/// factorization) and end-to-end verification on the feasible ones.
fn prop_douglas_three_way(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 11;
    let mut rec = Recorder::new("douglas-three-way");
    let kinds = [
        InstanceKind::DouglasFeasible,
        InstanceKind::Random,
        InstanceKind::ForwardFeasible,
    ];
    for i in 0..cases {
        let kind = kinds[(i % 3) as usize];
        let n = dim_for(i, 7);
        let outcome = (|| -> Result<(bool, f64)> {
            let scale = SCALES[((i / 3) % 3) as usize];
            let inst = if i % 4 == 3 {
                // Generic infeasible family: an independently drawn full-rank
                // T against a rank-deficient B, so all three verdicts must
                // agree on the negative side too.
                let donor = gen(seed, PROP, i, InstanceKind::DouglasFeasible, n, scale)?;
                let full = gen(seed, PROP, i + cases, InstanceKind::Random, n, scale)?;
                Instance {
                    t: full.t,
                    b: donor.b,
                    ground_truth: None,
                }
            } else {
                gen(seed, PROP, i, kind, n, scale)?
            };
            let eq = douglas_equivalence_check(&inst.t, &inst.b, tol)?;
            if !eq.consistent() {
                return Ok((false, 0.0));
            }
            if !eq.range_inclusion {
                return Ok((true, 0.0));
            }
            let cert = douglas_factor(&inst.t, &inst.b, tol)?;
            let report =
                crate::douglas::verify_douglas_certificate(&inst.t, &inst.b, &cert, tol);
            Ok((report.all_passed(), max_residual(&cert.residuals)))
        })();
        rec.record(outcome, || format!("kind {kind:?}, n {n}, case {i}"));
    }
    rec.finish()
}

/// The Douglas factor is minimal: `‖B⁺T‖₂ ≤ λ + 1e-8`, never beaten by the
/// planted factor, and reproduces `T` to relative `1e-8`.
fn prop_douglas_minimal_norm(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 12;
    let mut rec = Recorder::new("douglas-minimal-norm");
    for i in 0..cases {
        let n = dim_for(i, 5);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::DouglasFeasible, n, SCALES[(i % 3) as usize])?;
            let cert = douglas_factor(&inst.t, &inst.b, tol)?;
            let c0 = inst.ground_truth.expect("planted factor");
            let c_norm = cert.factor_c.op_norm();
            let bound = c_norm <= cert.lambda_min + 1e-8 && c_norm <= c0.op_norm() + 1e-8;
            let residual = (&(&inst.b * &cert.factor_c) - &inst.t).fro_norm()
                / inst.t.fro_norm().max(1.0);
            Ok((bound && residual <= 1e-8, residual))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Reversed equivalence: constructed instances admit `m ≥ 1/‖Y₀‖₂` up to
/// tolerance, certificates verify, and on arbitrary instances the check and
/// the constructor agree.
fn prop_reversed_equivalence(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 13;
    let mut rec = Recorder::new("reversed-equivalence");
    let kinds = [
        InstanceKind::ReversedFeasible,
        InstanceKind::ReversedFeasible,
        InstanceKind::Random,
    ];
    for i in 0..cases {
        let kind = kinds[(i % 3) as usize];
        let n = dim_for(i, 11);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, kind, n, SCALES[((i / 3) % 3) as usize])?;
            let rc = check_reversed(&inst.t, &inst.b, tol)?;
            match kind {
                InstanceKind::ReversedFeasible => {
                    if !rc.feasible {
                        return Ok((false, 0.0));
                    }
                    let cert = construct_y(&inst.t, &inst.b, tol)?;
                    let report = crate::reversed::verify_reversed_certificate(
                        &inst.t, &inst.b, &cert, tol,
                    );
                    let mut ok = report.all_passed();
                    if let (Some(m), Some(y0)) = (rc.m_max, inst.ground_truth.as_ref()) {
                        let y0_norm = y0.op_norm();
                        if y0_norm > 1e-9 {
                            let floor = 1.0 / y0_norm;
                            ok = ok && m >= floor - 1e-6 * (1.0 + floor);
                        }
                    }
                    Ok((ok, max_residual(&cert.residuals)))
                }
                _ => {
                    let agreed = match construct_y(&inst.t, &inst.b, tol) {
                        Ok(cert) => {
                            rc.feasible
                                && crate::reversed::verify_reversed_certificate(
                                    &inst.t, &inst.b, &cert, tol,
                                )
                                .all_passed()
                        }
                        Err(OpfactorError::Infeasible { .. }) => !rc.feasible,
                        Err(e) => return Err(e),
                    };
                    Ok((agreed, 0.0))
                }
            }
        })();
        rec.record(outcome, || format!("kind {kind:?}, n {n}, case {i}"));
    }
    rec.finish()
}

/// Operator-form bound on feasible reversed instances:
/// `min_eig(M − m(P_T B)*(P_T B)) ≥ −1e-8·scale`.
fn prop_reversed_operator_form(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 14;
    let mut rec = Recorder::new("reversed-operator-form");
    for i in 0..cases {
        let n = dim_for(i, 7);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ReversedFeasible, n, SCALES[(i % 3) as usize])?;
            let rc = check_reversed(&inst.t, &inst.b, tol)?;
            if !rc.feasible {
                return Ok((false, 0.0));
            }
            let m = match rc.m_max {
                Some(m) => m,
                None => return Ok((true, 0.0)),
            };
            let p_t = range_projection(&inst.t, tol)?;
            let ptb = &p_t * &inst.b;
            let g = (&ptb.adjoint() * &ptb).hermitize();
            let min_eig = psd_min_eig(&(&rc.gram - &g.scale(m)), tol)?.min_eig;
            let scale_ref = rc.gram.op_norm().max(1.0);
            Ok((min_eig >= -1e-8 * scale_ref, (-min_eig / scale_ref).max(0.0)))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Duality: a feasible reversed pair `(T, B)` with bound `m` makes
/// `(P_T B, T)` forward-feasible with `lambda ≤ ‖Y‖₂ + 1e-8 ≤ 1/m + 2e-8`.
fn prop_duality(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 15;
    let mut rec = Recorder::new("duality-reversed-forward");
    for i in 0..cases {
        let n = dim_for(i, 9);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ReversedFeasible, n, SCALES[(i % 3) as usize])?;
            let cert = construct_y(&inst.t, &inst.b, tol)?;
            let m = match cert.m_max {
                Some(m) => m,
                None => return Ok((true, 0.0)),
            };
            let ptb = &cert.projector_t * &inst.b;
            let fc = check_forward(&ptb, &inst.t, tol)?;
            let y_norm = cert.factor_y.op_norm();
            let ok = fc.feasible
                && fc.lambda_min <= y_norm + 1e-8
                && y_norm <= 1.0 / m + 1e-8;
            Ok((ok, (fc.lambda_min - y_norm).max(0.0)))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Partial-operator laws: reflexivity and transitivity of inclusion,
/// restriction inclusion, and compose acting as the matrix product on its
/// domain.
fn prop_partial_operator_laws(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 16;
    let mut rec = Recorder::new("partial-operator-laws");
    for i in 0..cases {
        let outcome = (|| -> Result<(bool, f64)> {
            let mut rng = probe_rng(seed, PROP, i);
            let n = rng.gen_range(2..=10);
            let a_m = draw_matrix(&mut rng, n, n, 1.0);
            let b_m = draw_matrix(&mut rng, n, n, 1.0);
            let full_a = PartialOperator::full(a_m.clone());
            let full_b = PartialOperator::full(b_m.clone());

            let d1 = rng.gen_range(1..=n);
            let d2 = rng.gen_range(1..=d1);
            let idx1: Vec<usize> = (0..d1).collect();
            let idx2: Vec<usize> = (0..d2).collect();
            let restr1 = PartialOperator::new(a_m.clone(), coordinate_basis(n, &idx1), tol)?;
            let restr2 = PartialOperator::new(a_m.clone(), coordinate_basis(n, &idx2), tol)?;

            let reflexive = includes(&restr1, &restr1, tol)?;
            let restriction = includes(&full_a, &restr1, tol)?;
            let chain = includes(&restr1, &restr2, tol)? && includes(&full_a, &restr2, tol)?;

            let comp = compose(&full_a, &full_b, tol)?;
            let full_domain = comp.domain_dim() == n;
            let product_ok =
                comp.matrix().max_abs_diff(&(&a_m * &b_m)) <= 1e-12 * a_m.fro_norm().max(1.0);

            Ok((reflexive && restriction && chain && full_domain && product_ok, 0.0))
        })();
        rec.record(outcome, || format!("case {i}"));
    }
    rec.finish()
}

/// Cauchy–Schwarz for the PSD Gram form: `|f*Mg|² ≤ (f*Mf)(g*Mg)` up to
/// relative `1e-8`.
fn prop_gram_cauchy_schwarz(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 17;
    let mut rec = Recorder::new("gram-cauchy-schwarz");
    for i in 0..cases {
        let n = dim_for(i, 7);
        let outcome = (|| -> Result<(bool, f64)> {
            let inst = gen(seed, PROP, i, InstanceKind::ForwardFeasible, n, SCALES[(i % 3) as usize])?;
            let fc = check_forward(&inst.t, &inst.b, tol)?;
            if !fc.feasible {
                return Ok((false, 0.0));
            }
            let mut rng = probe_rng(seed, PROP, i);
            let mut worst = 0.0_f64;
            for _ in 0..8 {
                let f = unit_probe(&mut rng, n);
                let g = unit_probe(&mut rng, n);
                let mg = fc.gram.mul_vec(&g);
                let mf = fc.gram.mul_vec(&f);
                let cross = vec_inner(&mg, &f).norm_sqr();
                let budget = vec_inner(&mf, &f).re * vec_inner(&mg, &g).re;
                let scale_ref = fc.gram.op_norm().powi(2).max(f64::MIN_POSITIVE);
                worst = worst.max((cross - budget) / scale_ref);
            }
            Ok((worst <= 1e-8, worst.max(0.0)))
        })();
        rec.record(outcome, || format!("n {n}, case {i}"));
    }
    rec.finish()
}

/// Determinism: regenerating the same `(spec, index)` is bit-identical, and
/// the serialized certificate built from it is byte-identical.
fn prop_determinism(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 18;
    let mut rec = Recorder::new("determinism");
    let kinds = InstanceKind::all();
    for i in 0..cases {
        let kind = kinds[(i % kinds.len() as u64) as usize];
        let n = dim_for(i, 5);
        let outcome = (|| -> Result<(bool, f64)> {
            let first = gen(seed, PROP, i, kind, n, 1.0)?;
            let second = gen(seed, PROP, i, kind, n, 1.0)?;
            if !(first.t == second.t && first.b == second.b) {
                return Ok((false, 0.0));
            }
            // byte-level determinism of serialized certificates, checked on
            // a forward-feasible representative
            if kind == InstanceKind::ForwardFeasible {
                let c1 = construct_x(&first.t, &first.b, tol)?;
                let c2 = construct_x(&second.t, &second.b, tol)?;
                let f1 = CertificateFile::from_sebestyen(&first.t, &first.b, tol, &c1);
                let f2 = CertificateFile::from_sebestyen(&second.t, &second.b, tol, &c2);
                return Ok((f1.to_json()? == f2.to_json()?, 0.0));
            }
            Ok((true, 0.0))
        })();
        rec.record(outcome, || format!("kind {kind:?}, n {n}, case {i}"));
    }
    rec.finish()
}

/// Serialization round-trips: certificate JSON parses back field-for-field
/// and re-serializes to the same bytes; matrix CSV is bit-exact.
fn prop_serialization_round_trip(seed: u64, cases: u64, tol: &Tolerance) -> PropertyOutcome {
    const PROP: u64 = 19;
    let mut rec = Recorder::new("serialization-round-trip");
    let modes = [Mode::Sebestyen, Mode::Douglas, Mode::Reversed];
    for i in 0..cases {
        let mode = modes[(i % 3) as usize];
        let n = dim_for(i, 3);
        let outcome = (|| -> Result<(bool, f64)> {
            let kind = match mode {
                Mode::Sebestyen => InstanceKind::ForwardFeasible,
                Mode::Douglas => InstanceKind::DouglasFeasible,
                Mode::Reversed => InstanceKind::ReversedFeasible,
            };
            let inst = gen(seed, PROP, i, kind, n, 1.0)?;
            let file = match mode {
                Mode::Sebestyen => CertificateFile::from_sebestyen(
                    &inst.t,
                    &inst.b,
                    tol,
                    &construct_x(&inst.t, &inst.b, tol)?,
                ),
                Mode::Douglas => CertificateFile::from_douglas(
                    &inst.t,
                    &inst.b,
                    tol,
                    &douglas_factor(&inst.t, &inst.b, tol)?,
                ),
                Mode::Reversed => CertificateFile::from_reversed(
                    &inst.t,
                    &inst.b,
                    tol,
                    &construct_y(&inst.t, &inst.b, tol)?,
                ),
            };
            let text = file.to_json()?;
            let back = CertificateFile::from_json(&text)?;
            let json_ok = back == file && back.to_json()? == text;
            let verified = verify_certificate_file(&back)?.all_passed();
            let csv_ok = matrix_from_csv(&matrix_to_csv(&inst.t))? == inst.t;
            Ok((json_ok && verified && csv_ok, 0.0))
        })();
        rec.record(outcome, || format!("mode {mode:?}, n {n}, case {i}"));
    }
    rec.finish()
}

/// One row of the scaling fixture.
#[derive(Debug, Clone, Copy)]
pub struct ScaleRow {
    pub n: usize,
    /// Least `lambda` with `TT* ⪯ λ²BB*` — the Douglas bound for the family.
    pub lambda_min: f64,
    /// Operator norm of the reduced factor `B⁺T`.
    pub factor_norm: f64,
    /// Largest `m` with `m²BB* ⪯ TT*`.
    pub m_max: f64,
}

/// The scaling table for the difference-operator family.
#[derive(Debug, Clone)]
pub struct ScaleTable {
    pub rows: Vec<ScaleRow>,
}

impl ScaleTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lambda_min,factor_norm,m_max\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.n, r.lambda_min, r.factor_norm, r.m_max
            ));
        }
        out
    }

    /// The family contract: `lambda_min` never decreases with `n`.
    pub fn lambda_nondecreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].lambda_min >= w[0].lambda_min)
    }
}

impl fmt::Display for ScaleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_csv())
    }
}

/// Scaling fixture over the difference-operator family: for each `n`,
/// records the Douglas `lambda_min`, the reduced factor norm, and the
/// reversed extreme `m_max`.  Only the `difference-operator` kind has the
/// monotone-growth contract, so other kinds are rejected.
pub fn scaling_report(
    n_list: &[usize],
    kind: InstanceKind,
    tol: &Tolerance,
) -> Result<ScaleTable> {
    if kind != InstanceKind::DifferenceOperator {
        return Err(OpfactorError::InvalidSpec(format!(
            "scaling report is defined for the difference-operator family, got '{}'",
            kind.as_str()
        )));
    }
    if n_list.is_empty() {
        return Err(OpfactorError::InvalidSpec(
            "n_list must be nonempty".to_string(),
        ));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OpfactorError::InvalidSpec(
            "n_list must be strictly ascending".to_string(),
        ));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(OpfactorError::InvalidSpec(
                "dimension must be at least 1".to_string(),
            ));
        }
        let t = difference_operator(n);
        let b = ComplexMatrix::identity(n);
        let tt = (&t * &t.adjoint()).hermitize();
        let bb = (&b * &b.adjoint()).hermitize();
        let pencil = pencil_extremes(&tt, &bb, tol)?;
        let lambda_min = pencil.lambda_min.max(0.0).sqrt();
        let m_max = pencil.m_max.map(|m| m.max(0.0).sqrt()).unwrap_or(0.0);
        let factor_norm = (&pseudoinverse(&b, tol)? * &t).op_norm();
        rows.push(ScaleRow {
            n,
            lambda_min,
            factor_norm,
            m_max,
        });
    }
    Ok(ScaleTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn small_suite_run_has_zero_failures() {
        let report = property_suite(42, 30, &tol());
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.properties.len(), 19);
        assert!(report.total_cases() > 0);
    }

    #[test]
    fn hand_instance_agrees_at_lambda_three() {
        let outcome = prop_four_way_equivalence(1, 2, &tol());
        assert_eq!(outcome.failures, 0, "{:?}", outcome.first_failure);
    }

    #[test]
    fn independent_bisection_matches_diag_oracle() {
        // A = diag(9, 0), M = diag(3, 0): least lambda is 3
        let a = ComplexMatrix::from_real_vec(2, 2, vec![9.0, 0.0, 0.0, 0.0]).unwrap();
        let m = ComplexMatrix::from_real_vec(2, 2, vec![3.0, 0.0, 0.0, 0.0]).unwrap();
        let lam = independent_lambda_bisection(&a, &m, &tol()).unwrap().unwrap();
        assert!((lam - 3.0).abs() < 1e-9, "{lam}");
    }

    #[test]
    fn independent_bisection_reports_infeasible() {
        let a = ComplexMatrix::identity(2);
        let m = ComplexMatrix::from_real_vec(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(independent_lambda_bisection(&a, &m, &tol()).unwrap().is_none());
    }

    #[test]
    fn scaling_report_is_monotone_and_rejects_other_kinds() {
        let table = scaling_report(&[4, 8, 16], InstanceKind::DifferenceOperator, &tol()).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.lambda_nondecreasing());
        assert!(table.rows[0].lambda_min > 0.0);
        // B = I: lambda is the largest singular value of T, factor is T itself
        assert!(
            (table.rows[0].lambda_min - table.rows[0].factor_norm).abs()
                <= 1e-9 * table.rows[0].lambda_min
        );

        assert!(matches!(
            scaling_report(&[4, 8], InstanceKind::Random, &tol()),
            Err(OpfactorError::InvalidSpec(_))
        ));
        assert!(matches!(
            scaling_report(&[8, 4], InstanceKind::DifferenceOperator, &tol()),
            Err(OpfactorError::InvalidSpec(_))
        ));
        assert!(matches!(
            scaling_report(&[], InstanceKind::DifferenceOperator, &tol()),
            Err(OpfactorError::InvalidSpec(_))
        ));
    }

    #[test]
    fn scaling_csv_has_header_and_rows() {
        let table = scaling_report(&[4], InstanceKind::DifferenceOperator, &tol()).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "n,lambda_min,factor_norm,m_max");
        assert!(lines[1].starts_with("4,"));
    }

    #[test]
    fn difference_family_lambda_matches_dense_singular_value() {
        // B = I makes the Douglas lambda the top singular value of T
        let table = scaling_report(&[6], InstanceKind::DifferenceOperator, &tol()).unwrap();
        let t = difference_operator(6);
        let sigma_max = t.op_norm();
        assert!((table.rows[0].lambda_min - sigma_max).abs() <= 1e-9 * sigma_max);
    }
}
