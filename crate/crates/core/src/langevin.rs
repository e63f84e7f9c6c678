//! Predictor-corrector solver for the nonlinear memory Langevin system
//!
//!   ᶜD^α(ᶜD^β + λ(t)) x(t) = A x(t) + B x(σ(t)) + F(t, x(t), x(σ(t)))
//!
//! marched through its equivalent integral form
//!
//!   x(t) = x₀ + x₁·v(t) - ∫₀ᵗ Ψ_β(t-s) λ(s) x(s) ds
//!               + ∫₀ᵗ Ψ_{α+β}(t-s) G(s, x) ds.
//!
//! History sums use product-integration weights from the cumulative kernels:
//! rectangle weights for the predictor, trapezoid weights (including the new
//! node, with the predictor value substituted) for the corrector. Singular
//! kernels are never sampled pointwise inside the march.

use crate::expr::{GeneratorExpr, ParamSet};
use crate::gridfn::GridFunction;
use crate::kernel::{monotonicity_probe, Kernel};
use crate::laplace::{Grid, InversionConfig};
use crate::report::{Check, VerificationReport};
use crate::{Error, Result};

pub type ScalarFn = Box<dyn Fn(f64) -> f64 + Sync>;
pub type ForcingFn = Box<dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Sync>;

pub struct LangevinProblem {
    pub alpha: f64,
    pub beta: f64,
    pub generator: GeneratorExpr,
    pub theta: ParamSet,
    pub dim: usize,
    /// Damping λ(t) multiplying the state inside the order-β memory term.
    pub damping: ScalarFn,
    /// d×d row-major coupling matrices for x(t) and x(σ(t)).
    pub a_matrix: Vec<f64>,
    pub b_matrix: Vec<f64>,
    /// Deviating argument; must satisfy σ(t) ∈ [0, t].
    pub sigma: ScalarFn,
    /// Nonlinearity F(t, x(t), x(σ(t))).
    pub forcing: ForcingFn,
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    pub t_end: f64,
}

impl LangevinProblem {
    fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0 && self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidProblem(format!(
                "orders must lie in (0, 1), got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        if self.a_matrix.len() != d * d || self.b_matrix.len() != d * d {
            return Err(Error::InvalidProblem("matrices must be d x d".into()));
        }
        if self.x0.len() != d || self.x1.len() != d {
            return Err(Error::InvalidProblem("initial data must have length d".into()));
        }
        if !(self.t_end > 0.0)
            || self.x0.iter().chain(&self.x1).any(|v| !v.is_finite())
            || self.a_matrix.iter().chain(&self.b_matrix).any(|v| !v.is_finite())
        {
            return Err(Error::InvalidProblem("non-finite problem data".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityTermMode {
    /// x₁·Ψ_β(t): the raw kernel form, singular as t → 0 for β < 1.
    SingularKernel,
    /// x₁·K₁^(β)(t): the cumulative form, which reproduces the classical
    /// initial-velocity contribution x₁ t^β/Γ(β+1) for Φ = p. Default.
    CumulativeKernel,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub n_steps: usize,
    pub corrector_iterations: usize,
    pub velocity_term_mode: VelocityTermMode,
    pub inversion: InversionConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            n_steps: 256,
            corrector_iterations: 1,
            velocity_term_mode: VelocityTermMode::CumulativeKernel,
            inversion: InversionConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub states: GridFunction,
    /// Max-norm change applied by the final corrector pass at each step.
    pub corrector_deltas: Vec<f64>,
}

fn matvec(m: &[f64], x: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for i in 0..d {
        let mut acc = 0.0;
        for j in 0..d {
            acc += m[i * d + j] * x[j];
        }
        out[i] = acc;
    }
    out
}

/// Largest singular value by power iteration on MᵀM.
fn spectral_norm(m: &[f64], d: usize) -> f64 {
    if m.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut norm = 0.0;
    for _ in 0..200 {
        let mv = matvec(m, &v, d);
        // w = Mᵀ(Mv)
        let mut w = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                w[j] += m[i * d + j] * mv[i];
            }
        }
        norm = w.iter().map(|x| x * x).sum::<f64>().sqrt().sqrt();
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        for x in &mut w {
            *x /= len;
        }
        v = w;
    }
    norm
}

/// State at time t from the already-computed prefix of the trajectory, by
/// linear interpolation. Times that are (up to roundoff) a grid node snap to
/// the node so that σ = identity reads states back exactly.
fn state_at(states: &[Vec<f64>], h: f64, t: f64, step: usize, sigma_t: f64) -> Result<Vec<f64>> {
    let _ = t;
    let pos = sigma_t / h;
    let nearest = pos.round();
    let j = if (pos - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        let lo = pos.floor() as usize;
        let w = pos - lo as f64;
        if lo + 1 >= states.len() {
            return Err(Error::SigmaFuture {
                step,
                sigma: sigma_t,
            });
        }
        return Ok(states[lo]
            .iter()
            .zip(&states[lo + 1])
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect());
    };
    if j >= states.len() {
        return Err(Error::SigmaFuture {
            step,
            sigma: sigma_t,
        });
    }
    Ok(states[j].clone())
}

struct March<'a> {
    problem: &'a LangevinProblem,
    grid: Grid,
    /// Cumulative tables of Ψ_β and Ψ_{α+β} at the grid nodes.
    k1b: Vec<f64>,
    k2b: Vec<f64>,
    k1ab: Vec<f64>,
    k2ab: Vec<f64>,
    velocity: Vec<f64>,
    damping: Vec<f64>,
    sigma: Vec<f64>,
}

impl<'a> March<'a> {
    /// G(t_j, x) = A x_j + B x(σ(t_j)) + F(t_j, x_j, x(σ(t_j))).
    fn g(&self, states: &[Vec<f64>], j: usize, xj: &[f64]) -> Result<Vec<f64>> {
        let p = self.problem;
        let xs = state_at(states, self.grid.h(), self.grid.node(j), j, self.sigma[j])?;
        let mut out = matvec(&p.a_matrix, xj, p.dim);
        for (o, v) in out.iter_mut().zip(matvec(&p.b_matrix, &xs, p.dim)) {
            *o += v;
        }
        let f = (p.forcing)(self.grid.node(j), xj, &xs);
        if f.len() != p.dim {
            return Err(Error::InvalidProblem(
                "forcing returned the wrong dimension".into(),
            ));
        }
        for (o, v) in out.iter_mut().zip(f) {
            *o += v;
        }
        Ok(out)
    }

    /// -λ(t_j)·x_j, the order-β integrand.
    fn damping_term(&self, j: usize, xj: &[f64]) -> Vec<f64> {
        xj.iter().map(|v| -self.damping[j] * v).collect()
    }

    /// Rectangle-rule history sum: Σ_{j<n} [K₁(t_n-t_j) - K₁(t_n-t_{j+1})]·y_j.
    fn rectangle_sum(
        &self,
        k1: &[f64],
        n: usize,
        mut integrand: impl FnMut(usize) -> Result<Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; self.problem.dim];
        for j in 0..n {
            let w = k1[n - j] - k1[n - j - 1];
            for (a, v) in acc.iter_mut().zip(integrand(j)?) {
                *a += w * v;
            }
        }
        Ok(acc)
    }

    /// Trapezoid product-integration sum over [0, t_n] including node n.
    fn trapezoid_sum(
        &self,
        k1: &[f64],
        k2: &[f64],
        n: usize,
        mut integrand: impl FnMut(usize) -> Result<Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let h = self.grid.h();
        let mut acc = vec![0.0; self.problem.dim];
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        for j in 0..=n {
            values.push(integrand(j)?);
        }
        for i in 0..n {
            let lo = self.grid.node(i);
            let hi = self.grid.node(i + 1);
            let m0 = k1[i + 1] - k1[i];
            let m1 = (hi * k1[i + 1] - k2[i + 1]) - (lo * k1[i] - k2[i]);
            let w_lo = (hi * m0 - m1) / h;
            let w_hi = (m1 - lo * m0) / h;
            for ((a, g_lo), g_hi) in acc.iter_mut().zip(&values[n - i]).zip(&values[n - i - 1]) {
                *a += w_lo * g_lo + w_hi * g_hi;
            }
        }
        Ok(acc)
    }
}

pub fn solve(problem: &LangevinProblem, options: &SolverOptions) -> Result<Trajectory> {
    problem.validate()?;
    if options.n_steps < 2 {
        return Err(Error::InvalidProblem("need at least 2 steps".into()));
    }
    options.inversion.validate()?;
    let grid = Grid::new(problem.t_end, options.n_steps)?;
    let d = problem.dim;

    let kb = Kernel::new(
        problem.generator.clone(),
        problem.theta.clone(),
        problem.beta,
        options.inversion,
    )?;
    let kab = Kernel::new(
        problem.generator.clone(),
        problem.theta.clone(),
        problem.alpha + problem.beta,
        options.inversion,
    )?;
    let (k1b, k2b) = kb.cumulative_table(&grid)?;
    let (k1ab, k2ab) = kab.cumulative_table(&grid)?;

    let velocity: Vec<f64> = (0..grid.len())
        .map(|j| -> Result<f64> {
            if j == 0 {
                return Ok(0.0); // states[0] = x0 exactly by the initial condition
            }
            match options.velocity_term_mode {
                VelocityTermMode::CumulativeKernel => Ok(k1b[j]),
                VelocityTermMode::SingularKernel => kb.eval(grid.node(j), 0),
            }
        })
        .collect::<Result<_>>()?;

    let damping: Vec<f64> = grid.nodes().map(|t| (problem.damping)(t)).collect();
    let sigma: Vec<f64> = grid.nodes().collect::<Vec<_>>().into_iter()
        .enumerate()
        .map(|(j, t)| {
            let s = (problem.sigma)(t);
            if s > t + 1e-12 * problem.t_end || s < 0.0 {
                Err(Error::SigmaFuture { step: j, sigma: s })
            } else {
                Ok(s.min(t))
            }
        })
        .collect::<Result<_>>()?;

    let march = March {
        problem,
        grid,
        k1b,
        k2b,
        k1ab,
        k2ab,
        velocity,
        damping,
        sigma,
    };

    let mut states: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    states.push(problem.x0.clone());
    let mut deltas = Vec::with_capacity(grid.n_steps);

    for n in 1..grid.len() {
        // Predictor: rectangle weights over the known history.
        let damping_hist =
            march.rectangle_sum(&march.k1b, n, |j| Ok(march.damping_term(j, &states[j])))?;
        let g_hist = march.rectangle_sum(&march.k1ab, n, |j| march.g(&states, j, &states[j]))?;
        let mut x_new: Vec<f64> = (0..d)
            .map(|i| {
                problem.x0[i] + problem.x1[i] * march.velocity[n] + damping_hist[i] + g_hist[i]
            })
            .collect();

        // Corrector: trapezoid weights including node n, the unknown value
        // replaced by the predictor and re-substituted as requested.
        let mut delta = 0.0;
        for _ in 0..options.corrector_iterations {
            states.push(x_new.clone());
            let damping_full = march.trapezoid_sum(&march.k1b, &march.k2b, n, |j| {
                Ok(march.damping_term(j, &states[j]))
            });
            let g_full =
                march.trapezoid_sum(&march.k1ab, &march.k2ab, n, |j| march.g(&states, j, &states[j]));
            states.pop();
            let (damping_full, g_full) = (damping_full?, g_full?);
            let corrected: Vec<f64> = (0..d)
                .map(|i| {
                    problem.x0[i] + problem.x1[i] * march.velocity[n] + damping_full[i] + g_full[i]
                })
                .collect();
            delta = corrected
                .iter()
                .zip(&x_new)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            x_new = corrected;
        }

        if x_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence(n));
        }
        deltas.push(delta);
        states.push(x_new);
    }

    let mut out = GridFunction::zeros(grid, d);
    for (j, s) in states.iter().enumerate() {
        out.set(j, s);
    }
    Ok(Trajectory {
        grid,
        states: out,
        corrector_deltas: deltas,
    })
}

/// Left-hand side of the uniqueness contraction condition
/// K₁^(α+β)(T)·(‖A‖ + ‖B‖ + L) + K₁^(β)(T)·max|λ| < 1, with the L¹ kernel
/// norm standing in for the operator norm (valid for nonnegative kernels —
/// a failing sign probe marks the surrogate invalid).
pub fn check_uniqueness_condition(
    problem: &LangevinProblem,
    lipschitz: f64,
    config: &InversionConfig,
) -> Result<VerificationReport> {
    problem.validate()?;
    if lipschitz < 0.0 {
        return Err(Error::InvalidProblem("Lipschitz constant must be >= 0".into()));
    }
    let mut report = VerificationReport::new();
    let kb = Kernel::new(
        problem.generator.clone(),
        problem.theta.clone(),
        problem.beta,
        *config,
    )?;
    let kab = Kernel::new(
        problem.generator.clone(),
        problem.theta.clone(),
        problem.alpha + problem.beta,
        *config,
    )?;

    let probe_grid = Grid::new(problem.t_end, 64)?;
    for (name, kernel) in [("order beta", &kb), ("order alpha+beta", &kab)] {
        let probe = monotonicity_probe(kernel, &probe_grid, 0)?;
        report.push(Check::verdict(
            format!("norm surrogate valid ({name} kernel nonnegative)"),
            if probe.overall { 0.0 } else { 1.0 },
            0.0,
            probe.overall,
        ));
    }

    let norm_ab = kab.eval(problem.t_end, 1)?;
    let norm_b = kb.eval(problem.t_end, 1)?;
    let lambda_max = (0..=200)
        .map(|j| (problem.damping)(problem.t_end * j as f64 / 200.0).abs())
        .fold(0.0, f64::max);
    let lhs = norm_ab
        * (spectral_norm(&problem.a_matrix, problem.dim)
            + spectral_norm(&problem.b_matrix, problem.dim)
            + lipschitz)
        + norm_b * lambda_max;
    report.push(Check::verdict(
        "uniqueness contraction left-hand side < 1",
        lhs,
        1.0,
        lhs.is_finite() && lhs < 1.0,
    ));
    Ok(report)
}

/// Max-norm distance between the computed trajectory and a known solution on
/// the same grid.
pub fn manufactured_residual(
    problem: &LangevinProblem,
    known_solution: &GridFunction,
    options: &SolverOptions,
) -> Result<f64> {
    let trajectory = solve(problem, options)?;
    if known_solution.grid() != &trajectory.grid || known_solution.dim() != problem.dim {
        return Err(Error::InvalidProblem(
            "known solution must live on the solver grid".into(),
        ));
    }
    Ok(trajectory.states.max_abs_diff(known_solution, 0.0))
}
