//! Vertex-centred finite volumes: node `i` owns `[x_i - dx/2, x_i + dx/2]`
//! clipped to the grid, so the end nodes own half cells and the discrete
//! mass is exactly the trapezoidal sum. Face fluxes
//!
//! `J_{i+1/2} = a_{i+1/2} (W_i + W_{i+1}) / 2 - (D_{i+1} W_{i+1} - D_i W_i) / dx`
//!
//! telescope, and the outer faces carry no flux.

use super::grid::GridDensity;
use crate::error::{Error, Result};
use crate::scaling::CoefficientPair;

/// Largest admissible cell Péclet number `|a| dx / D`.
pub const PECLET_LIMIT: f64 = 100.0;

/// Negative undershoot below `-POSITIVITY_FLOOR` is counted as a diagnostic before clipping.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    /// One density per requested time, in order.
    pub snapshots: Vec<GridDensity>,
    pub steps: usize,
    /// Nodes that undershot `-POSITIVITY_FLOOR` and were clipped.
    pub clipped_nodes: usize,
    pub max_peclet: f64,
    /// Largest relative mass change over a single step, before renormalization.
    pub max_step_mass_drift: f64,
}

impl FdReport {
    pub fn final_density(&self) -> &GridDensity {
        self.snapshots.last().expect("at least one snapshot")
    }
}

/// Evolves `w0` to `t1` in `n_steps` Crank-Nicolson steps.
pub fn fd_evolve(pair: &CoefficientPair, w0: &GridDensity, t1: f64, n_steps: usize) -> Result<GridDensity> {
    let mut report = fd_evolve_report(pair, w0, t1, n_steps)?;
    Ok(report.snapshots.pop().expect("one snapshot"))
}

pub fn fd_evolve_report(pair: &CoefficientPair, w0: &GridDensity, t1: f64, n_steps: usize) -> Result<FdReport> {
    fd_evolve_snapshots(pair, w0, &[t1], n_steps)
}

/// Evolves through increasing `times`, distributing `n_steps` over the
/// intervals in proportion to their length so every snapshot lands on a step.
pub fn fd_evolve_snapshots(
    pair: &CoefficientPair,
    w0: &GridDensity,
    times: &[f64],
    n_steps: usize,
) -> Result<FdReport> {
    if times.is_empty() {
        return Err(Error::Precondition("no target times".into()));
    }
    if n_steps == 0 {
        return Err(Error::Precondition("n_steps must be >= 1".into()));
    }
    let mut prev = w0.time();
    for &t in times {
        if !(t.is_finite() && t > prev) {
            return Err(Error::Precondition(format!(
                "target times must increase beyond the initial time {}; got {t} after {prev}",
                w0.time()
            )));
        }
        prev = t;
    }
    let t_last = times[times.len() - 1];
    let span = t_last - w0.time();

    let mut stepper = Stepper::new(w0);
    let mut w = w0.values().to_vec();
    let mut t = w0.time();
    let mut report = FdReport {
        snapshots: Vec::with_capacity(times.len()),
        steps: 0,
        clipped_nodes: 0,
        max_peclet: 0.0,
        max_step_mass_drift: 0.0,
    };
    for &target in times {
        let steps = ((n_steps as f64 * (target - t) / span).round() as usize).max(1);
        let dt = (target - t) / steps as f64;
        for k in 0..steps {
            let t_next = if k + 1 == steps { target } else { t + dt };
            stepper.step(pair, &mut w, t, t_next, &mut report)?;
            t = t_next;
        }
        report.steps += steps;
        report.snapshots.push(w0.with_values(w.clone(), target));
    }
    Ok(report)
}

struct Stepper {
    x_min: f64,
    dx: f64,
    n: usize,
    volume: Vec<f64>,
    d: Vec<f64>,
    // flux coefficients: J_f = alpha_f W_f + beta_f W_{f+1}
    alpha: Vec<f64>,
    beta: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(g: &GridDensity) -> Self {
        let n = g.n();
        let dx = g.dx();
        let mut volume = vec![dx; n];
        volume[0] = 0.5 * dx;
        volume[n - 1] = 0.5 * dx;
        Self {
            x_min: g.x_min(),
            dx,
            n,
            volume,
            d: vec![0.0; n],
            alpha: vec![0.0; n - 1],
            beta: vec![0.0; n - 1],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    fn step(&mut self, pair: &CoefficientPair, w: &mut [f64], t0: f64, t1: f64, report: &mut FdReport) -> Result<()> {
        let n = self.n;
        let dx = self.dx;
        let th = 0.5 * (t0 + t1);
        let dt = t1 - t0;

        let coeffs = pair.at_time(th);
        for i in 0..n {
            let x = self.x(i);
            let d = coeffs.diffusion(x);
            let interior = i > 0 && i + 1 < n;
            let ok = d.is_finite() && if interior { d > 0.0 } else { d >= 0.0 };
            if !ok {
                return Err(Error::IllPosedDiffusion { x, t: th, value: d });
            }
            self.d[i] = d;
        }
        for f in 0..n - 1 {
            let xf = self.x(f) + 0.5 * dx;
            let a = coeffs.drift(xf);
            if !a.is_finite() {
                return Err(Error::Precondition(format!("drift is not finite at x = {xf}, t = {th}")));
            }
            let d_face = 0.5 * (self.d[f] + self.d[f + 1]);
            let peclet = a.abs() * dx / d_face;
            if peclet > PECLET_LIMIT {
                return Err(Error::Resolution {
                    peclet,
                    limit: PECLET_LIMIT,
                    x: xf,
                });
            }
            report.max_peclet = report.max_peclet.max(peclet);
            self.alpha[f] = 0.5 * a + self.d[f] / dx;
            self.beta[f] = 0.5 * a - self.d[f + 1] / dx;
        }

        // L W at node i is (J_{i-1/2} - J_{i+1/2}) / V_i
        for i in 0..n {
            let v = self.volume[i];
            let (mut lo, mut di, mut up) = (0.0, 0.0, 0.0);
            if i > 0 {
                lo += self.alpha[i - 1] / v;
                di += self.beta[i - 1] / v;
            }
            if i + 1 < n {
                di -= self.alpha[i] / v;
                up -= self.beta[i] / v;
            }
            let lw = di * w[i]
                + if i > 0 { lo * w[i - 1] } else { 0.0 }
                + if i + 1 < n { up * w[i + 1] } else { 0.0 };
            self.rhs[i] = w[i] + 0.5 * dt * lw;
            self.lower[i] = -0.5 * dt * lo;
            self.diag[i] = 1.0 - 0.5 * dt * di;
            self.upper[i] = -0.5 * dt * up;
        }

        let mass_before = self.mass(w);
        thomas(&self.lower, &self.diag, &self.upper, &mut self.rhs, &mut self.scratch);
        w.copy_from_slice(&self.rhs);
        let mass_after = self.mass(w);
        if mass_before > 0.0 {
            let drift = ((mass_after - mass_before) / mass_before).abs();
            report.max_step_mass_drift = report.max_step_mass_drift.max(drift);
        }

        let mut clipped = false;
        for v in w.iter_mut() {
            if *v < 0.0 {
                if *v < -POSITIVITY_FLOOR {
                    report.clipped_nodes += 1;
                }
                *v = 0.0;
                clipped = true;
            }
        }
        if clipped || mass_after != mass_before {
            let m = self.mass(w);
            if m > 0.0 {
                let k = mass_before / m;
                w.iter_mut().for_each(|v| *v *= k);
            }
        }
        Ok(())
    }

    fn mass(&self, w: &[f64]) -> f64 {
        w.iter().zip(&self.volume).map(|(a, b)| a * b).sum()
    }
}

/// Solves a tridiagonal system in place; `lower[0]` and `upper[n-1]` are ignored.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], c: &mut [f64]) {
    let n = diag.len();
    c[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::l1_distance;
    use crate::solutions::gaussian_solution;
    use approx::assert_relative_eq;

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 5, 3] -> x = [1, 1, 1]
        let lower = [0.0, 1.0, 1.0];
        let diag = [2.0, 3.0, 2.0];
        let upper = [1.0, 1.0, 0.0];
        let mut rhs = [3.0, 5.0, 3.0];
        let mut c = [0.0; 3];
        thomas(&lower, &diag, &upper, &mut rhs, &mut c);
        for v in rhs {
            assert_relative_eq!(v, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn heat_kernel_variance_grows_linearly() {
        let heat = gaussian_solution(0.5, 0.0, 0.0, 1.0).unwrap();
        let pair = heat.coefficients();
        let w0 = GridDensity::from_solution(&heat, -20.0, 20.0, 801, 1.0).unwrap();
        let w1 = fd_evolve(&pair, &w0, 2.0, 400).unwrap();
        let var: f64 = w1.nodes().zip(w1.values()).map(|(x, v)| x * x * v).sum::<f64>() * w1.dx();
        assert_relative_eq!(var, 4.0, max_relative = 0.01);
        let exact = GridDensity::from_solution(&heat, -20.0, 20.0, 801, 2.0).unwrap();
        assert!(l1_distance(&w1, &exact).unwrap() < 1e-3);
        assert!((w1.mass() - w0.mass()).abs() < 1e-10);
    }

    #[test]
    fn negative_diffusion_is_rejected() {
        let pair = CoefficientPair::custom(1.0, |_, _| 0.0, |_, _| -1.0).unwrap();
        let w0 = GridDensity::from_fn(-1.0, 1.0, 32, 1.0, |_| 0.5).unwrap();
        assert!(matches!(fd_evolve(&pair, &w0, 2.0, 10), Err(Error::IllPosedDiffusion { .. })));
    }

    #[test]
    fn strong_drift_on_coarse_grid_is_a_resolution_error() {
        let pair = CoefficientPair::custom(1.0, |_, _| 1e4, |_, _| 1.0).unwrap();
        let w0 = GridDensity::from_fn(-1.0, 1.0, 32, 1.0, |_| 0.5).unwrap();
        assert!(matches!(fd_evolve(&pair, &w0, 2.0, 10), Err(Error::Resolution { .. })));
    }

    #[test]
    fn bad_targets_are_rejected() {
        let pair = CoefficientPair::custom(1.0, |_, _| 0.0, |_, _| 1.0).unwrap();
        let w0 = GridDensity::from_fn(-1.0, 1.0, 32, 1.0, |_| 0.5).unwrap();
        assert!(fd_evolve(&pair, &w0, 1.0, 10).is_err());
        assert!(fd_evolve(&pair, &w0, 2.0, 0).is_err());
        assert!(fd_evolve_snapshots(&pair, &w0, &[3.0, 2.0], 10).is_err());
    }

    #[test]
    fn snapshots_land_on_requested_times() {
        let heat = gaussian_solution(0.5, 0.0, 0.0, 1.0).unwrap();
        let w0 = GridDensity::from_solution(&heat, -15.0, 15.0, 301, 1.0).unwrap();
        let r = fd_evolve_snapshots(&heat.coefficients(), &w0, &[1.5, 2.0, 3.0], 400).unwrap();
        let times: Vec<f64> = r.snapshots.iter().map(GridDensity::time).collect();
        assert_eq!(times, vec![1.5, 2.0, 3.0]);
        assert_eq!(r.steps, 400);
        assert!(r.max_step_mass_drift < 1e-12);
    }
}
