//! Synthesis of bilinear QSDEs from a Hamiltonian/coupling pair and the
//! converse realizability check.
//!
//! The system is
//!
//! ```text
//! dx = A₀ dt + A x dt + (B₁₁x, …, B₁ₙx, B₂₁x, …, B₂ₙx) (dW̄₁; dW̄₂)
//! dȲ = (C₁; C₂) x dt + (dW̄₁; dW̄₂)
//! ```
//!
//! with every matrix real. For `H = αx` and `L = Λx`:
//!
//! ```text
//! A₀  = (4i/n) Σ_k Θ⁻(Λ_k#) Λ_kᵀ
//! A   = -2Θ⁻(α) + Σ_k (R_k - i Q_k)
//! B₁ₖ = Θ⁻(i(Λ_k# - Λ_k)),   B₂ₖ = Θ⁻(Λ_k + Λ_k#)
//! C₁  = Λ + Λ#,              C₂  = i(Λ# - Λ)
//! R_k = Θ⁻(Λ_k)Θ⁻(Λ_k#) + Θ⁻(Λ_k#)Θ⁻(Λ_k)
//! Q_k = Θ⁻(Λ_k)Θ⁺(Λ_k#) - Θ⁻(Λ_k#)Θ⁺(Λ_k)
//! ```
//!
//! The check evaluates five conditions; a system passes iff every scaled
//! residual is within tolerance:
//!
//! 1. `A₀ = (1/n) Σ_k (B₁ₖ + iB₂ₖ)((C₁)_k + i(C₂)_k)ᵀ`
//! 2. `B₁ₖ = Θ⁻((C₂)_k)`
//! 3. `B₂ₖ = Θ⁻((C₁)_k)`
//! 4. `A + Aᵀ + Σ_{i,k} B_ik B_ikᵀ = (n/2) Θ⁺(A₀)`
//! 5. the antisymmetric part of `A` equals that of `-2Θ⁻(α̂) + Σ_k (R_k - iQ_k)`
//!    where `Λ̂ = ½(C₁ + iC₂)` and `α̂` is the projection of
//!    `-½(A - Σ_k (R_k - iQ_k))` onto the image of Θ⁻.
//!
//! Condition 1 is often quoted with the pairing `(iB₁ₖ + B₂ₖ)`; that
//! expression equals `(1/n)Σ Θ⁻(2Λ_k)2Λ_k = 0` whenever conditions 2–3
//! hold, so it cannot identify `A₀`. The report carries its value as
//! [`RealizabilityReport::swapped_pairing_norm`].
//!
//! Condition 5 is needed for n ≥ 3: Θ⁻ maps onto an `s`-dimensional subspace
//! of the `s(s-1)/2`-dimensional antisymmetric matrices, so conditions 1–4
//! leave the antisymmetric part of `A` unconstrained there. At n = 2 it is
//! implied by the others.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::StructureConstants;
use crate::error::{Error, Result};
use crate::linalg::{
    c, conj_vec, max_abs_c, max_abs_r, real_part, real_part_vec, to_complex_mat, to_complex_vec,
    CMatrix, CVector, RMatrix, RVector, I,
};
use crate::theta::ThetaContext;

/// Default realizability tolerance on scaled residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Imaginary parts of synthesized blocks above this (relative) are an error.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

/// Relative disagreement allowed between the two Hamiltonian recovery routes.
pub const RECOVERY_CROSS_CHECK_TOL: f64 = 1e-6;

/// Hamiltonian `H = αx` and coupling `L = Λx`, `Λ ∈ ℂ^{n_w×s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    n: usize,
    alpha: RVector,
    lambda: CMatrix,
}

impl PlantModel {
    pub fn new(n: usize, alpha: RVector, lambda: CMatrix) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateAlgebra { n });
        }
        let s = n * n - 1;
        if alpha.len() != s {
            return Err(Error::dims("alpha", s, alpha.len()));
        }
        if lambda.ncols() != s {
            return Err(Error::dims("Lambda columns", s, lambda.ncols()));
        }
        Ok(PlantModel { n, alpha, lambda })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_w(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn s(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &RVector {
        &self.alpha
    }

    pub fn lambda(&self) -> &CMatrix {
        &self.lambda
    }
}

/// Real coefficient matrices of a bilinear QSDE in quadrature form.
#[derive(Debug, Clone, PartialEq)]
pub struct QsdeSystem {
    pub n: usize,
    pub a0: RVector,
    pub a: RMatrix,
    pub b1: Vec<RMatrix>,
    pub b2: Vec<RMatrix>,
    pub c1: RMatrix,
    pub c2: RMatrix,
}

impl QsdeSystem {
    pub fn n_w(&self) -> usize {
        self.b1.len()
    }

    pub fn s(&self) -> usize {
        self.a0.len()
    }

    /// Checks every block against `s = n² - 1` and a common `n_w`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Err(Error::DegenerateAlgebra { n });
        }
        let s = n * n - 1;
        let n_w = self.b1.len();
        let square = |what: &str, m: &RMatrix| -> Result<()> {
            if m.dim() != (s, s) {
                return Err(Error::dims(
                    what,
                    format!("{s}x{s}"),
                    format!("{}x{}", m.nrows(), m.ncols()),
                ));
            }
            Ok(())
        };
        if self.a0.len() != s {
            return Err(Error::dims("A0", s, self.a0.len()));
        }
        square("A", &self.a)?;
        if self.b2.len() != n_w {
            return Err(Error::dims("number of B2 blocks", n_w, self.b2.len()));
        }
        for (k, (b1, b2)) in self.b1.iter().zip(&self.b2).enumerate() {
            square(&format!("B1[{}]", k + 1), b1)?;
            square(&format!("B2[{}]", k + 1), b2)?;
        }
        for (what, m) in [("C1", &self.c1), ("C2", &self.c2)] {
            if m.dim() != (n_w, s) {
                return Err(Error::dims(
                    what,
                    format!("{n_w}x{s}"),
                    format!("{}x{}", m.nrows(), m.ncols()),
                ));
            }
        }
        Ok(())
    }

    /// Largest blockwise difference over all six blocks.
    pub fn max_difference(&self, other: &QsdeSystem) -> Result<f64> {
        self.validate()?;
        other.validate()?;
        if (self.n, self.n_w()) != (other.n, other.n_w()) {
            return Err(Error::dims(
                "system shape (n, n_w)",
                format!("({}, {})", self.n, self.n_w()),
                format!("({}, {})", other.n, other.n_w()),
            ));
        }
        let mut m = max_abs_r((&self.a0 - &other.a0).iter());
        m = m.max(max_abs_r((&self.a - &other.a).iter()));
        for (x, y) in self
            .b1
            .iter()
            .zip(&other.b1)
            .chain(self.b2.iter().zip(&other.b2))
        {
            m = m.max(max_abs_r((x - y).iter()));
        }
        m = m.max(max_abs_r((&self.c1 - &other.c1).iter()));
        m = m.max(max_abs_r((&self.c2 - &other.c2).iter()));
        Ok(m)
    }
}

fn check_context(n: usize, sc: &StructureConstants) -> Result<()> {
    if sc.n() != n {
        return Err(Error::ContextMismatch {
            left: n,
            right: sc.n(),
        });
    }
    Ok(())
}

struct CouplingTerms {
    a0: CVector,
    /// `Σ_k (R_k - i Q_k)`
    drift: CMatrix,
}

fn coupling_terms(th: &ThetaContext, lambda: ArrayView2<Complex64>) -> Result<CouplingTerms> {
    let s = th.s();
    let n = th.n() as f64;
    let mut a0 = Array1::zeros(s);
    let mut drift = Array2::zeros((s, s));
    for lk in lambda.rows() {
        let lc = conj_vec(lk);
        let tm = th.theta_minus(lk)?;
        let tmc = th.theta_minus(lc.view())?;
        let tp = th.theta_plus(lk)?;
        let tpc = th.theta_plus(lc.view())?;
        a0 = a0 + tmc.dot(&lk) * c(0.0, 4.0 / n);
        let r = tm.dot(&tmc) + tmc.dot(&tm);
        let q = tm.dot(&tpc) - tmc.dot(&tp);
        drift = drift + r - q * I;
    }
    Ok(CouplingTerms { a0, drift })
}

fn imag_guard(block: &str, residue: f64, magnitude: f64) -> Result<()> {
    if residue > IMAGINARY_RESIDUE_TOL * magnitude.max(1.0) {
        return Err(Error::ImaginaryResidue {
            block: block.to_string(),
            residue,
        });
    }
    Ok(())
}

/// Builds the QSDE matrices for a plant model. Also returns the largest
/// imaginary residue seen before the blocks were truncated to real storage.
pub fn synthesize_with_residue(
    model: &PlantModel,
    sc: &StructureConstants,
) -> Result<(QsdeSystem, f64)> {
    check_context(model.n, sc)?;
    let th = ThetaContext::new(sc);
    let lambda = model.lambda.view();
    let lambda_conj = lambda.mapv(|z| z.conj());
    let terms = coupling_terms(&th, lambda)?;

    let mut worst: f64 = 0.0;
    let (a0, im) = real_part_vec(terms.a0.view());
    imag_guard("A0", im, max_abs_r(a0.iter()))?;
    worst = worst.max(im);

    let alpha_c = to_complex_vec(model.alpha.view());
    let a_c = th.theta_minus(alpha_c.view())? * c(-2.0, 0.0) + terms.drift;
    let (a, im) = real_part(a_c.view());
    imag_guard("A", im, max_abs_r(a.iter()))?;
    worst = worst.max(im);

    let mut b1 = Vec::with_capacity(model.n_w());
    let mut b2 = Vec::with_capacity(model.n_w());
    for (k, (lk, lck)) in lambda
        .rows()
        .into_iter()
        .zip(lambda_conj.rows())
        .enumerate()
    {
        let diff: CVector = (&lck - &lk).mapv(|z| z * I);
        let sum: CVector = &lk + &lck;
        let (m1, im1) = real_part(th.theta_minus(diff.view())?.view());
        imag_guard(&format!("B1[{}]", k + 1), im1, max_abs_r(m1.iter()))?;
        let (m2, im2) = real_part(th.theta_minus(sum.view())?.view());
        imag_guard(&format!("B2[{}]", k + 1), im2, max_abs_r(m2.iter()))?;
        worst = worst.max(im1).max(im2);
        b1.push(m1);
        b2.push(m2);
    }

    let c1_c = &lambda + &lambda_conj;
    let c2_c = (&lambda_conj - &lambda).mapv(|z| z * I);
    let (c1, im1) = real_part(c1_c.view());
    imag_guard("C1", im1, max_abs_r(c1.iter()))?;
    let (c2, im2) = real_part(c2_c.view());
    imag_guard("C2", im2, max_abs_r(c2.iter()))?;
    worst = worst.max(im1).max(im2);

    Ok((
        QsdeSystem {
            n: model.n,
            a0,
            a,
            b1,
            b2,
            c1,
            c2,
        },
        worst,
    ))
}

pub fn synthesize(model: &PlantModel, sc: &StructureConstants) -> Result<QsdeSystem> {
    synthesize_with_residue(model, sc).map(|(sys, _)| sys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// (i) drift offset `A₀` fixed by the noise and output matrices.
    DriftOffset,
    /// (ii) `B₁ₖ = Θ⁻((C₂)_k)`.
    NoiseQuadrature1,
    /// (iii) `B₂ₖ = Θ⁻((C₁)_k)`.
    NoiseQuadrature2,
    /// (iv) symmetric part of `A` balanced by the noise.
    Dissipation,
    /// (v) antisymmetric part of `A` generated by a Hamiltonian.
    Hamiltonian,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::DriftOffset,
        Condition::NoiseQuadrature1,
        Condition::NoiseQuadrature2,
        Condition::Dissipation,
        Condition::Hamiltonian,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Condition::DriftOffset => "i",
            Condition::NoiseQuadrature1 => "ii",
            Condition::NoiseQuadrature2 => "iii",
            Condition::Dissipation => "iv",
            Condition::Hamiltonian => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResidual {
    pub condition: Condition,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizabilityReport {
    pub pass: bool,
    pub tolerance: f64,
    pub conditions: Vec<ConditionResidual>,
    /// `‖(1/n) Σ (iB₁ₖ + B₂ₖ)((C₁)_k + i(C₂)_k)ᵀ‖_max`, the swapped pairing.
    pub swapped_pairing_norm: f64,
    /// `‖A₀ - (1/n) Σ (B₁ₖ + iB₂ₖ)((C₁)_k + i(C₂)_k)ᵀ‖_max`, unscaled.
    pub drift_offset_abs_residual: f64,
    pub recovered: Option<PlantModel>,
}

impl RealizabilityReport {
    pub fn residual(&self, condition: Condition) -> f64 {
        self.conditions
            .iter()
            .find(|c| c.condition == condition)
            .map(|c| c.residual)
            .unwrap_or(f64::NAN)
    }

    pub fn failed(&self) -> Vec<Condition> {
        self.conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.condition)
            .collect()
    }

    fn worst(&self) -> &ConditionResidual {
        self.conditions
            .iter()
            .max_by(|a, b| {
                (!a.pass)
                    .cmp(&!b.pass)
                    .then(a.residual.total_cmp(&b.residual))
            })
            .expect("report has conditions")
    }
}

fn scaled(diff: f64, lhs: f64, rhs: f64) -> f64 {
    diff / lhs.max(rhs).max(1.0)
}

fn scaled_residual_r(lhs: ArrayView2<f64>, rhs: ArrayView2<f64>) -> f64 {
    let diff = max_abs_r((&lhs - &rhs).iter());
    scaled(diff, max_abs_r(lhs.iter()), max_abs_r(rhs.iter()))
}

fn antisymmetric_part(m: &RMatrix) -> RMatrix {
    (m - &m.t()) * 0.5
}

/// `α̂` by the closed form `(1/4n) Fᵀ vec(Aᵀ - A + ½ Σ_k ([B₂ₖ, Θ⁺((C₂)_k)] - [B₁ₖ, Θ⁺((C₁)_k)]))`.
fn hamiltonian_closed_form(sys: &QsdeSystem, th: &ThetaContext) -> Result<RVector> {
    let mut m = sys.a.t().to_owned() - &sys.a;
    for k in 0..sys.n_w() {
        let p2 = th.theta_plus(sys.c2.row(k))?;
        let p1 = th.theta_plus(sys.c1.row(k))?;
        let comm2 = sys.b2[k].dot(&p2) - p2.dot(&sys.b2[k]);
        let comm1 = sys.b1[k].dot(&p1) - p1.dot(&sys.b1[k]);
        m = m + (comm2 - comm1) * 0.5;
    }
    Ok(th.stacked_transpose(m.view())? / (4.0 * sys.n as f64))
}

/// `α̂` by projecting `-½(A - Σ_k (R_k - iQ_k))` onto the image of Θ⁻.
fn hamiltonian_least_squares(
    sys: &QsdeSystem,
    lambda: ArrayView2<Complex64>,
    th: &ThetaContext,
) -> Result<(RVector, RMatrix)> {
    let terms = coupling_terms(th, lambda)?;
    let (drift, _) = real_part(terms.drift.view());
    let target = (&sys.a - &drift) * -0.5;
    let alpha = th.stacked_transpose(antisymmetric_part(&target).view())? / sys.n as f64;
    Ok((alpha, drift))
}

struct Recovery {
    model: PlantModel,
    /// Antisymmetric part of `-2Θ⁻(α̂) + Σ(R_k - iQ_k)` with `α̂` from the
    /// projection, so that it depends on `A` and the output matrices only.
    antisymmetric_drift: RMatrix,
    route_gap: f64,
}

fn recover_unchecked(sys: &QsdeSystem, th: &ThetaContext) -> Result<Recovery> {
    let lambda = (to_complex_mat(sys.c1.view()) + to_complex_mat(sys.c2.view()) * I) * c(0.5, 0.0);
    let alpha = hamiltonian_closed_form(sys, th)?;
    let (alpha_ls, drift) = hamiltonian_least_squares(sys, lambda.view(), th)?;
    let route_gap = max_abs_r((&alpha - &alpha_ls).iter()) / max_abs_r(alpha.iter()).max(1.0);
    let model_a = th.theta_minus(alpha_ls.view())? * -2.0 + drift;
    Ok(Recovery {
        model: PlantModel::new(sys.n, alpha, lambda)?,
        antisymmetric_drift: antisymmetric_part(&model_a),
        route_gap,
    })
}

/// Evaluates the realizability conditions. Shape problems are errors;
/// failed conditions are reported.
pub fn check_realizability(
    sys: &QsdeSystem,
    sc: &StructureConstants,
    tol: f64,
) -> Result<RealizabilityReport> {
    sys.validate()?;
    check_context(sys.n, sc)?;
    let th = ThetaContext::new(sc);
    let n = sys.n as f64;
    let s = sys.s();

    let mut corrected: CVector = Array1::zeros(s);
    let mut swapped: CVector = Array1::zeros(s);
    for k in 0..sys.n_w() {
        let b1 = to_complex_mat(sys.b1[k].view());
        let b2 = to_complex_mat(sys.b2[k].view());
        let out: CVector = to_complex_vec(sys.c1.row(k)) + to_complex_vec(sys.c2.row(k)) * I;
        corrected = corrected + (&b1 + &(&b2 * I)).dot(&out);
        swapped = swapped + (&(&b1 * I) + &b2).dot(&out);
    }
    corrected /= c(n, 0.0);
    swapped /= c(n, 0.0);
    let a0_c = to_complex_vec(sys.a0.view());
    let drift_offset_abs = max_abs_c((&a0_c - &corrected).iter());
    let r_i = scaled(
        drift_offset_abs,
        max_abs_r(sys.a0.iter()),
        max_abs_c(corrected.iter()),
    );

    let mut r_ii: f64 = 0.0;
    let mut r_iii: f64 = 0.0;
    for k in 0..sys.n_w() {
        let t2 = th.theta_minus(sys.c2.row(k))?;
        let t1 = th.theta_minus(sys.c1.row(k))?;
        r_ii = r_ii.max(scaled_residual_r(sys.b1[k].view(), t2.view()));
        r_iii = r_iii.max(scaled_residual_r(sys.b2[k].view(), t1.view()));
    }

    let mut lhs = &sys.a + &sys.a.t();
    for b in sys.b1.iter().chain(&sys.b2) {
        lhs = lhs + b.dot(&b.t());
    }
    let rhs = th.theta_plus(sys.a0.view())? * (n / 2.0);
    let r_iv = scaled_residual_r(lhs.view(), rhs.view());

    let recovery = recover_unchecked(sys, &th)?;
    let r_v = scaled_residual_r(
        antisymmetric_part(&sys.a).view(),
        recovery.antisymmetric_drift.view(),
    );

    let conditions: Vec<ConditionResidual> = Condition::ALL
        .iter()
        .zip([r_i, r_ii, r_iii, r_iv, r_v])
        .map(|(&condition, residual)| ConditionResidual {
            condition,
            residual,
            pass: residual <= tol,
        })
        .collect();
    let pass = conditions.iter().all(|c| c.pass);
    let recovered = if pass && recovery.route_gap <= RECOVERY_CROSS_CHECK_TOL {
        Some(recovery.model)
    } else {
        None
    };
    Ok(RealizabilityReport {
        pass,
        tolerance: tol,
        conditions,
        swapped_pairing_norm: max_abs_c(swapped.iter()),
        drift_offset_abs_residual: drift_offset_abs,
        recovered,
    })
}

/// Recovers `(α, Λ)` from a realizable system:
/// `Λ = ½(C₁ + iC₂)` and `α` from the closed form, cross-checked against a
/// projection of the drift.
pub fn recover_model(sys: &QsdeSystem, sc: &StructureConstants, tol: f64) -> Result<PlantModel> {
    let report = check_realizability(sys, sc, tol)?;
    if !report.pass {
        let worst = report.worst();
        return Err(Error::NotRealizable {
            condition: worst.condition.label().to_string(),
            residual: worst.residual,
            tolerance: tol,
        });
    }
    let th = ThetaContext::new(sc);
    let recovery = recover_unchecked(sys, &th)?;
    if recovery.route_gap > RECOVERY_CROSS_CHECK_TOL {
        return Err(Error::InconsistentRecovery {
            discrepancy: recovery.route_gap,
        });
    }
    Ok(recovery.model)
}

/// A system with no fields and zero drift offset.
pub fn closed_system(n: usize, a: ArrayView2<f64>) -> QsdeSystem {
    let s = n * n - 1;
    QsdeSystem {
        n,
        a0: Array1::zeros(s),
        a: a.to_owned(),
        b1: Vec::new(),
        b2: Vec::new(),
        c1: Array2::zeros((0, s)),
        c2: Array2::zeros((0, s)),
    }
}

/// Perturbs `sys` so that exactly one realizability condition is violated
/// by an absolute amount `eps`, compensating elsewhere so the other
/// conditions keep holding.
pub fn violate_condition(
    sys: &QsdeSystem,
    sc: &StructureConstants,
    condition: Condition,
    eps: f64,
) -> Result<QsdeSystem> {
    sys.validate()?;
    check_context(sys.n, sc)?;
    let th = ThetaContext::new(sc);
    let s = sys.s();
    let n = sys.n as f64;
    let mut out = sys.clone();
    match condition {
        Condition::DriftOffset => {
            let mut delta = Array1::zeros(s);
            delta[0] = eps;
            out.a0 = &out.a0 + &delta;
            out.a = &out.a + &(th.theta_plus(delta.view())? * (n / 4.0));
        }
        Condition::NoiseQuadrature1 | Condition::NoiseQuadrature2 => {
            if sys.n_w() == 0 {
                return Err(Error::dims("fields to perturb", ">= 1", 0));
            }
            // δ = e uᵀ with u ⊥ (C₁)_0, (C₂)_0 leaves the drift offset intact.
            let u = orthogonal_unit(sys.c1.row(0), sys.c2.row(0));
            let mut delta = Array2::zeros((s, s));
            delta.row_mut(0).assign(&(&u * eps));
            let b = match condition {
                Condition::NoiseQuadrature1 => &mut out.b1[0],
                _ => &mut out.b2[0],
            };
            let before = b.dot(&b.t());
            *b = &*b + &delta;
            let after = b.dot(&b.t());
            out.a = &out.a - &((after - before) * 0.5);
        }
        Condition::Dissipation => {
            let mut delta = Array2::zeros((s, s));
            delta[[0, 0]] = eps;
            out.a = &out.a + &delta;
        }
        Condition::Hamiltonian => {
            // An antisymmetric direction orthogonal to the image of Θ⁻.
            let mut g = Array2::<f64>::zeros((s, s));
            if s >= 3 {
                g[[0, 2]] = 1.0;
                g[[2, 0]] = -1.0;
            } else {
                return Err(Error::dims("algebra dimension", ">= 3", s));
            }
            let proj = th.theta_minus(th.recover_vector(g.view())?.view())?;
            let mut h = g - proj;
            let scale = max_abs_r(h.iter());
            if scale < 1e-12 {
                return Err(Error::dims(
                    "antisymmetric complement",
                    "nonzero",
                    "empty (n = 2)",
                ));
            }
            h *= eps / scale;
            out.a = &out.a + &h;
        }
    }
    Ok(out)
}

fn orthogonal_unit(a: ArrayView1<f64>, b: ArrayView1<f64>) -> RVector {
    // Gram-Schmidt a, b, then pick the first coordinate vector with a
    // nonvanishing orthogonal remainder.
    let mut span: Vec<RVector> = Vec::new();
    for v in [a.to_owned(), b.to_owned()] {
        let mut w = v;
        for q in &span {
            let p = w.dot(q);
            w = w - q * p;
        }
        let norm = w.dot(&w).sqrt();
        if norm > 1e-12 {
            span.push(w / norm);
        }
    }
    let s = a.len();
    let mut best = Array1::zeros(s);
    let mut best_norm = 0.0;
    for i in 0..s {
        let mut w = Array1::zeros(s);
        w[i] = 1.0;
        for q in &span {
            let p = w.dot(q);
            w = w - q * p;
        }
        let norm = w.dot(&w).sqrt();
        if norm > best_norm {
            best_norm = norm;
            best = w / norm;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_basis, structure_constants};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn sc(n: usize) -> StructureConstants {
        structure_constants(&build_basis(n).unwrap()).unwrap()
    }

    #[test]
    fn closed_system_synthesis() {
        let sc = sc(2);
        let model = PlantModel::new(2, array![0.0, 0.0, 1.0], Array2::zeros((0, 3))).unwrap();
        let sys = synthesize(&model, &sc).unwrap();
        assert_eq!(sys.n_w(), 0);
        assert!(sys.a0.iter().all(|x| *x == 0.0));
        let want = array![[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        assert_abs_diff_eq!(sys.a, want, epsilon = 1e-14);
    }

    #[test]
    fn zero_coupling_rows_vanish() {
        let sc = sc(3);
        let alpha = Array1::from_iter((0..8).map(|i| 0.1 * i as f64));
        let model = PlantModel::new(3, alpha.clone(), Array2::zeros((2, 8))).unwrap();
        let sys = synthesize(&model, &sc).unwrap();
        assert!(sys.a0.iter().all(|x| *x == 0.0));
        assert!(sys
            .b1
            .iter()
            .chain(&sys.b2)
            .all(|b| b.iter().all(|x| *x == 0.0)));
        assert!(sys.c1.iter().chain(sys.c2.iter()).all(|x| *x == 0.0));
        let th = ThetaContext::new(&sc);
        assert_abs_diff_eq!(
            sys.a,
            th.theta_minus(alpha.view()).unwrap() * -2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn raising_coupling_su2() {
        let sc = sc(2);
        let lambda = array![[c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.0)]];
        let model = PlantModel::new(2, Array1::zeros(3), lambda).unwrap();
        let sys = synthesize(&model, &sc).unwrap();
        assert_abs_diff_eq!(sys.a0, array![0.0, 0.0, 1.0], epsilon = 1e-14);
        assert_abs_diff_eq!(sys.c1, array![[1.0, 0.0, 0.0]], epsilon = 1e-15);
        assert_abs_diff_eq!(sys.c2, array![[0.0, 1.0, 0.0]], epsilon = 1e-15);
    }

    #[test]
    fn model_shape_errors() {
        assert!(PlantModel::new(2, Array1::zeros(4), Array2::zeros((1, 3))).is_err());
        assert!(PlantModel::new(2, Array1::zeros(3), Array2::zeros((1, 8))).is_err());
        assert!(PlantModel::new(1, Array1::zeros(0), Array2::zeros((1, 0))).is_err());
        let model = PlantModel::new(2, Array1::zeros(3), Array2::zeros((1, 3))).unwrap();
        assert!(matches!(
            synthesize(&model, &sc(3)),
            Err(Error::ContextMismatch { .. })
        ));
    }

    #[test]
    fn zero_system_is_realizable() {
        let sc = sc(3);
        let sys = QsdeSystem {
            n: 3,
            a0: Array1::zeros(8),
            a: Array2::zeros((8, 8)),
            b1: vec![Array2::zeros((8, 8))],
            b2: vec![Array2::zeros((8, 8))],
            c1: Array2::zeros((1, 8)),
            c2: Array2::zeros((1, 8)),
        };
        let report = check_realizability(&sys, &sc, DEFAULT_TOLERANCE).unwrap();
        assert!(report.pass);
        let model = recover_model(&sys, &sc, DEFAULT_TOLERANCE).unwrap();
        assert!(model.alpha().iter().all(|x| *x == 0.0));
        assert!(model.lambda().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn closed_rotation_recovers_alpha() {
        let sc = sc(2);
        let a = array![[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let model = recover_model(&closed_system(2, a.view()), &sc, DEFAULT_TOLERANCE).unwrap();
        assert_abs_diff_eq!(
            model.alpha().clone(),
            array![0.0, 0.0, 1.0],
            epsilon = 1e-14
        );
        assert_eq!(model.n_w(), 0);
    }

    #[test]
    fn generic_antisymmetric_drift_is_not_realizable_for_su3() {
        // Passes A + Aᵀ = 0 and A₀ = 0 but lies outside -2Θ⁻(ℝ⁸).
        let sc = sc(3);
        let mut a = Array2::zeros((8, 8));
        a[[0, 2]] = 1.0;
        a[[2, 0]] = -1.0;
        let report =
            check_realizability(&closed_system(3, a.view()), &sc, DEFAULT_TOLERANCE).unwrap();
        assert!(!report.pass);
        assert_eq!(report.failed(), vec![Condition::Hamiltonian]);
        assert!(matches!(
            recover_model(&closed_system(3, a.view()), &sc, DEFAULT_TOLERANCE),
            Err(Error::NotRealizable { .. })
        ));
    }

    #[test]
    fn perturbed_drift_offset_fails_condition_i() {
        let sc = sc(2);
        let lambda = array![[c(0.2, -0.1), c(0.1, 0.3), c(-0.2, 0.1)]];
        let model = PlantModel::new(2, array![0.3, -0.2, 0.1], lambda).unwrap();
        let mut sys = synthesize(&model, &sc).unwrap();
        assert!(max_abs_r(sys.a0.iter()) < 1.0);
        sys.a0[1] += 0.1;
        let report = check_realizability(&sys, &sc, DEFAULT_TOLERANCE).unwrap();
        assert!(!report.pass);
        assert_abs_diff_eq!(
            report.residual(Condition::DriftOffset),
            0.1,
            epsilon = 1e-12
        );
        // At n = 2 Θ⁺ vanishes, so (iv) is untouched by A₀.
        assert_eq!(report.failed(), vec![Condition::DriftOffset]);
    }

    #[test]
    fn shape_errors_in_check() {
        let sc = sc(2);
        let mut sys = closed_system(2, Array2::zeros((3, 3)).view());
        sys.b1.push(Array2::zeros((3, 3)));
        assert!(check_realizability(&sys, &sc, DEFAULT_TOLERANCE).is_err());
        let sys = closed_system(2, Array2::zeros((2, 2)).view());
        assert!(check_realizability(&sys, &sc, DEFAULT_TOLERANCE).is_err());
    }
}
