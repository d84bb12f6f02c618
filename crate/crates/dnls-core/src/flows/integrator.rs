use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::conserved::{conserved_report, ConservedReport};
use crate::error::{Error, Result};
use crate::gradients::{f_linear_symbol, f_vector_field, hk_direction};
use crate::lax::{DeterminantOptions, KappaSet, Window};
use crate::spectral::product::cubic;
use crate::spectral::{FieldState, Grid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Top-octave mass fraction accepted for initial data.
pub const RESOLVED_START: f64 = 1e-10;
/// Top-octave mass fraction that halts a run.
pub const RESOLUTION_LOSS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    /// q_t = (iq′ − |q|²q)′
    Dnls,
    /// q_t = (2κ(δA/δq̄ + conj δA/δq))′
    Hk,
    /// q_t = F′, the flow of H − H_κ
    Diff,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    IntegratingFactorRk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub flow: Flow,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub dealias: bool,
    /// Steps between recorded states and monitors.
    pub monitor_stride: usize,
    /// Required by the H_κ and difference flows.
    pub kappa: Option<f64>,
    /// κ values at which a(κ) and β^[2](κ) are monitored.
    pub probes: KappaSet,
    /// Gradient window Ξ = max(window_factor·κ, 4·retained band).
    pub window_factor: f64,
}

impl FlowConfig {
    pub fn new(flow: Flow, dt: f64, t_final: f64) -> Self {
        Self {
            flow,
            dt,
            t_final,
            scheme: Scheme::IntegratingFactorRk4,
            dealias: true,
            monitor_stride: 100,
            kappa: None,
            probes: KappaSet::empty(),
            window_factor: 8.0,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn with_probes(mut self, probes: KappaSet) -> Self {
        self.probes = probes;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.monitor_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Parameter(format!("t_final must be >= 0, got {}", self.t_final)));
        }
        if self.monitor_stride == 0 {
            return Err(Error::Parameter("monitor_stride must be >= 1".into()));
        }
        if !(self.window_factor >= 1.0 && self.window_factor.is_finite()) {
            return Err(Error::Parameter("window_factor must be >= 1".into()));
        }
        match (self.flow, self.kappa) {
            (Flow::Dnls, _) => Ok(()),
            (_, Some(k)) if k >= 1.0 && k.is_finite() => Ok(()),
            (_, k) => Err(Error::Parameter(format!("flow {:?} needs kappa >= 1, got {k:?}", self.flow))),
        }
    }

    /// Enforces dt·ρ ≤ 1, where ρ = 3·sup|q0|²·ξ_max bounds the nonlinear
    /// rate of (|q|²q)′ over the evolved band. The linear part is integrated
    /// exactly and does not enter. For the difference flow the cubic part of
    /// F cancels below κ up to a factor ξ²/4κ², which the estimate includes.
    pub fn check_step(&self, q0: &FieldState) -> Result<()> {
        self.validate()?;
        let grid = q0.grid();
        let xi_max = if self.dealias { grid.retained_max_frequency() } else { grid.max_frequency() };
        let sup = q0.samples().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        let damping = match (self.flow, self.kappa) {
            (Flow::Diff, Some(k)) => (xi_max * xi_max / (4.0 * k * k)).min(1.0),
            _ => 1.0,
        };
        let product = self.dt * 3.0 * sup * xi_max * damping;
        if product > 1.0 {
            return Err(Error::StepGuard { product });
        }
        Ok(())
    }
}

/// Linear symbol of each flow (the stiff part removed by the integrating factor).
pub fn linear_symbol(flow: Flow, kappa: f64, xi: f64) -> Complex64 {
    let x2 = xi * xi;
    match flow {
        Flow::Dnls => -I * x2,
        Flow::Hk => -I * 4.0 * kappa * kappa * x2 / (4.0 * kappa * kappa + x2),
        Flow::Diff => I * xi * f_linear_symbol(kappa, xi),
    }
}

/// Integrating-factor RK4 for one flow on one grid.
///
/// In the variable v = e^{−tL}q̂ the stiff linear part L drops out; each step
/// advances v by classical RK4.
pub struct Stepper {
    flow: Flow,
    kappa: f64,
    grid: Grid,
    dealias: bool,
    window: Option<Window>,
    symbol: Vec<Complex64>,
}

impl Stepper {
    pub fn new(flow: Flow, kappa: f64, grid: Grid, dealias: bool, window_factor: f64) -> Result<Self> {
        let window = match flow {
            Flow::Dnls => None,
            _ => {
                let cutoff = (window_factor * kappa).max(4.0 * grid.retained_max_frequency());
                Some(Window::from_cutoff(&grid, cutoff)?)
            }
        };
        let symbol = (0..grid.modes()).map(|i| linear_symbol(flow, kappa, grid.frequency(i))).collect();
        Ok(Self {
            flow,
            kappa,
            grid,
            dealias,
            window,
            symbol,
        })
    }

    pub fn from_config(cfg: &FlowConfig, q0: &FieldState) -> Result<Self> {
        cfg.check_step(q0)?;
        Self::new(cfg.flow, cfg.kappa.unwrap_or(1.0), *q0.grid(), cfg.dealias, cfg.window_factor)
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    fn project(&self, c: &mut [Complex64]) {
        if self.dealias {
            for (i, z) in c.iter_mut().enumerate() {
                if !self.grid.is_retained(i) {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Nonlinear part N(q̂) = q̂_t − L q̂.
    pub fn nonlinear(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        let g = &self.grid;
        let mut out = match self.flow {
            Flow::Dnls => {
                let cub = cubic(c);
                (0..g.modes()).map(|i| -I * g.frequency(i) * cub[i]).collect::<Vec<_>>()
            }
            Flow::Hk | Flow::Diff => {
                let q = FieldState::from_coefficients(*g, c.to_vec())?;
                let w = self.window.as_ref().expect("window for gradient flows");
                let field = match self.flow {
                    Flow::Hk => hk_direction(&q, self.kappa, w)?,
                    _ => f_vector_field(&q, self.kappa, w)?,
                };
                // subtract the part already carried by the integrating factor
                (0..g.modes())
                    .map(|i| I * g.frequency(i) * field.coefficients()[i] - self.symbol[i] * c[i])
                    .collect()
            }
        };
        self.project(&mut out);
        Ok(out)
    }

    fn propagate(&self, c: &[Complex64], h: f64) -> Vec<Complex64> {
        c.iter().zip(&self.symbol).map(|(z, s)| z * (s * h).exp()).collect()
    }

    /// One step of size `h` (negative steps run the flow backwards).
    pub fn step(&self, c: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
        let axpy = |x: &[Complex64], a: f64, y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(x, y)| x + y * a).collect()
        };
        let k1 = self.nonlinear(c)?;
        let half = self.propagate(c, 0.5 * h);
        let k1h = self.propagate(&k1, 0.5 * h);
        let k2 = self.nonlinear(&axpy(&half, 0.5 * h, &k1h))?;
        let k3 = self.nonlinear(&axpy(&half, 0.5 * h, &k2))?;
        let k3h = self.propagate(&k3, 0.5 * h);
        let full = self.propagate(c, h);
        let k4 = self.nonlinear(&axpy(&full, h, &k3h))?;
        let k1f = self.propagate(&k1, h);
        let mid = self.propagate(&k2.iter().zip(&k3).map(|(a, b)| a + b).collect::<Vec<_>>(), 0.5 * h);
        let mut out: Vec<Complex64> = (0..c.len())
            .map(|i| full[i] + (k1f[i] + 2.0 * mid[i] + k4[i]) * (h / 6.0))
            .collect();
        self.project(&mut out);
        Ok(out)
    }
}

/// Recorded states with monitors; `halted` carries the reason a gradient
/// flow stopped early (guard loss).
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FieldState>,
    pub monitors: Vec<ConservedReport>,
    pub halted: Option<String>,
}

impl Trajectory {
    pub fn last(&self) -> &FieldState {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }
}

fn check_finite(c: &[Complex64], time: f64) -> Result<()> {
    if c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Instability { time })
    }
}

/// Number of steps and the uniform step that lands on t_final.
pub fn step_plan(dt: f64, t_final: f64) -> (usize, f64) {
    if t_final == 0.0 {
        return (0, dt);
    }
    let n = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    (n, t_final / n as f64)
}

/// Evolve `q0` under `cfg.flow`, recording every `monitor_stride` steps.
pub fn evolve(q0: &FieldState, cfg: &FlowConfig) -> Result<Trajectory> {
    evolve_checked(q0, cfg, RESOLVED_START)
}

fn evolve_checked(q0: &FieldState, cfg: &FlowConfig, start_threshold: f64) -> Result<Trajectory> {
    let grid = *q0.grid();
    let start = if cfg.dealias { q0.dealiased() } else { q0.clone() };
    let stepper = Stepper::from_config(cfg, &start)?;
    let frac = start.top_octave_fraction();
    if frac > start_threshold {
        return Err(Error::ResolutionLoss { time: 0.0, fraction: frac });
    }
    let options = DeterminantOptions::default();
    let monitor = |q: &FieldState| conserved_report(q, &cfg.probes, &options);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![start.clone()],
        monitors: vec![monitor(&start)?],
        halted: None,
    };
    let (steps, h) = step_plan(cfg.dt, cfg.t_final);
    let mut c = start.into_coefficients();
    for n in 1..=steps {
        let t = n as f64 * h;
        c = match stepper.step(&c, h) {
            Ok(next) => next,
            Err(Error::Guard { kappa, guard }) => {
                traj.halted = Some(format!(
                    "guard lost at t = {:.6}: sqrt(kappa)*||Lambda||_op = {guard:.6} at kappa = {kappa}",
                    t - h
                ));
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        check_finite(&c, t)?;
        if n % cfg.monitor_stride == 0 || n == steps {
            let q = FieldState::from_coefficients(grid, c.clone())?;
            let fraction = q.top_octave_fraction();
            if fraction > RESOLUTION_LOSS {
                return Err(Error::ResolutionLoss { time: t, fraction });
            }
            traj.monitors.push(monitor(&q)?);
            traj.times.push(t);
            traj.states.push(q);
        }
    }
    Ok(traj)
}

pub fn dnls_evolve(q0: &FieldState, cfg: &FlowConfig) -> Result<Trajectory> {
    evolve(q0, &FlowConfig { flow: Flow::Dnls, ..cfg.clone() })
}

pub fn hk_evolve(q0: &FieldState, cfg: &FlowConfig) -> Result<Trajectory> {
    evolve(q0, &FlowConfig { flow: Flow::Hk, ..cfg.clone() })
}

pub fn diff_evolve(q0: &FieldState, cfg: &FlowConfig) -> Result<Trajectory> {
    evolve(q0, &FlowConfig { flow: Flow::Diff, ..cfg.clone() })
}

/// Final state only, without monitors. The input only has to meet the
/// mid-run resolution threshold, so maps can be composed.
pub fn flow_map(q0: &FieldState, flow: Flow, kappa: f64, dt: f64, t: f64, window_factor: f64) -> Result<FieldState> {
    let mut cfg = FlowConfig::new(flow, dt, t);
    cfg.kappa = Some(kappa);
    cfg.window_factor = window_factor;
    cfg.monitor_stride = usize::MAX;
    let traj = evolve_checked(q0, &cfg, RESOLUTION_LOSS)?;
    if let Some(reason) = traj.halted {
        return Err(Error::Parameter(reason));
    }
    Ok(traj.last().clone())
}

/// ‖Φ_DNLS^t Φ_κ^s q0 − Φ_κ^s Φ_DNLS^t q0‖_{L²} at step `dt`.
pub fn commutator_test(q0: &FieldState, t: f64, s: f64, kappa: f64, dt: f64, window_factor: f64) -> Result<f64> {
    let a = flow_map(&flow_map(q0, Flow::Hk, kappa, dt, s, window_factor)?, Flow::Dnls, kappa, dt, t, window_factor)?;
    let b = flow_map(&flow_map(q0, Flow::Dnls, kappa, dt, t, window_factor)?, Flow::Hk, kappa, dt, s, window_factor)?;
    Ok(a.l2_distance(&b))
}
