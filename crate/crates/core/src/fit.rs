//! Least-squares calibration of gait parameters against recorded heading
//! series, using derivative-free minimizers.
//!
//! A candidate parameter vector is scored by re-simulating every
//! observation scenario and summing squared heading residuals (degrees
//! squared) at the observation times. Out-of-bounds candidates are scored
//! at their clamped projection plus a quadratic penalty, which keeps both
//! minimizers inside the box without constrained-search machinery.

use crate::error::{Error, Result};
use crate::gait::GaitParams;
use crate::sim::{run, Scenario, Trajectory};

/// Quadratic penalty weight per unit of bound violation squared.
const PENALTY_WEIGHT: f64 = 1e6;

/// A heading time series recorded on a known scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSeries {
    pub scenario: Scenario,
    /// `(time_s, heading_deg)` pairs, right-turn-positive headings, strictly
    /// increasing times within the scenario's duration.
    pub points: Vec<(f64, f64)>,
}

impl ObservationSeries {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let duration =
            (2 * self.scenario.cycles) as f64 / (2.0 * self.scenario.params.frequency_hz);
        let mut prev = f64::NEG_INFINITY;
        for &(t, h) in &self.points {
            if !t.is_finite() || !h.is_finite() {
                return Err(Error::invalid("observations", "non-finite entry"));
            }
            if t < 0.0 || t > duration {
                return Err(Error::invalid(
                    "observations",
                    format!("time {t} outside the simulated range [0, {duration}]"),
                ));
            }
            if t <= prev {
                return Err(Error::invalid(
                    "observations",
                    format!("times must be strictly increasing at t = {t}"),
                ));
            }
            prev = t;
        }
        Ok(())
    }
}

/// Parameters the fit may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeParam {
    KFront,
    KRear,
    Beta,
}

impl FreeParam {
    pub fn name(self) -> &'static str {
        match self {
            FreeParam::KFront => "k_front",
            FreeParam::KRear => "k_rear",
            FreeParam::Beta => "beta",
        }
    }

    pub fn parse(name: &str) -> Option<FreeParam> {
        match name {
            "k_front" => Some(FreeParam::KFront),
            "k_rear" => Some(FreeParam::KRear),
            "beta" => Some(FreeParam::Beta),
            _ => None,
        }
    }

    fn apply(self, params: &mut GaitParams, value: f64) {
        match self {
            FreeParam::KFront => params.k_front = value,
            FreeParam::KRear => params.k_rear = value,
            FreeParam::Beta => params.beta = value,
        }
    }

    /// Legal range of the underlying parameter; bounds must stay inside it.
    fn legal_range(self) -> (f64, f64) {
        match self {
            FreeParam::KFront | FreeParam::KRear => (0.0, 1.0),
            // Zero is excluded for beta; any positive lower bound is legal.
            FreeParam::Beta => (f64::MIN_POSITIVE, 1.0),
        }
    }
}

/// A calibration problem: observation series plus the searched box.
#[derive(Clone, Debug, PartialEq)]
pub struct FitProblem {
    pub series: Vec<ObservationSeries>,
    /// Free parameters with their `(lo, hi)` search bounds, in fit order.
    pub free: Vec<(FreeParam, (f64, f64))>,
}

impl FitProblem {
    pub fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            return Err(Error::invalid("fit problem", "no observation series"));
        }
        for s in &self.series {
            s.validate()?;
        }
        if self.free.is_empty() {
            return Err(Error::invalid("fit problem", "no free parameters"));
        }
        for (i, (param, (lo, hi))) in self.free.iter().enumerate() {
            if self.free[..i].iter().any(|(p, _)| p == param) {
                return Err(Error::invalid(
                    "fit problem",
                    format!("{} listed twice", param.name()),
                ));
            }
            let (legal_lo, legal_hi) = param.legal_range();
            if !(lo.is_finite() && hi.is_finite() && lo < hi && *lo >= legal_lo && *hi <= legal_hi)
            {
                return Err(Error::invalid(
                    "fit problem",
                    format!("bounds [{lo}, {hi}] are not a valid range for {}", param.name()),
                ));
            }
        }
        Ok(())
    }

    fn clamp(&self, candidate: &[f64]) -> Vec<f64> {
        candidate
            .iter()
            .zip(&self.free)
            .map(|(&x, (_, (lo, hi)))| x.clamp(*lo, *hi))
            .collect()
    }
}

/// Simulated heading at time `t`, linearly interpolated between samples.
/// Exact at sample times.
fn heading_at(trajectory: &Trajectory, t: f64) -> f64 {
    let samples = &trajectory.samples;
    if samples.len() == 1 {
        return samples[0].heading_deg;
    }
    let two_f = 2.0 * trajectory.scenario.params.frequency_hz;
    let idx = ((t * two_f).floor() as isize).clamp(0, samples.len() as isize - 2) as usize;
    let t0 = samples[idx].time_s;
    let t1 = samples[idx + 1].time_s;
    let u = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    let h0 = samples[idx].heading_deg;
    let h1 = samples[idx + 1].heading_deg;
    if u == 0.0 {
        h0
    } else if u == 1.0 {
        h1
    } else {
        h0 + u * (h1 - h0)
    }
}

/// Sum of squared heading residuals at the clamped candidate, plus the
/// out-of-bounds penalty of the raw candidate. Degrees squared.
pub fn loss(problem: &FitProblem, candidate: &[f64]) -> f64 {
    assert_eq!(
        candidate.len(),
        problem.free.len(),
        "candidate length must match the free-parameter list"
    );
    let mut penalty = 0.0;
    for (&x, (_, (lo, hi))) in candidate.iter().zip(&problem.free) {
        let excess = (lo - x).max(0.0) + (x - hi).max(0.0);
        penalty += PENALTY_WEIGHT * excess * excess;
    }

    let clamped = problem.clamp(candidate);
    let mut sse = 0.0;
    for series in &problem.series {
        let mut scenario = series.scenario.clone();
        for ((param, _), &value) in problem.free.iter().zip(&clamped) {
            param.apply(&mut scenario.params, value);
        }
        let trajectory = run(&scenario).expect("validated fit scenario");
        for &(t, observed) in &series.points {
            let r = heading_at(&trajectory, t) - observed;
            sse += r * r;
        }
    }
    sse + penalty
}

/// Result of a calibration run. `params` follows the problem's free order
/// and always lies within the bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub params: Vec<(FreeParam, f64)>,
    pub sse: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Scalar minimizer outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMinResult {
    pub x: f64,
    pub fx: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Golden-section search on `[lo, hi]`. Stops once the bracket is narrower
/// than `bracket_tol` or after `max_evaluations` objective calls; the final
/// value is the bracket midpoint. `converged` reports the bracket test.
pub fn golden_section(
    mut lo: f64,
    mut hi: f64,
    mut f: impl FnMut(f64) -> f64,
    bracket_tol: f64,
    max_evaluations: u64,
) -> ScalarMinResult {
    assert!(lo <= hi && bracket_tol > 0.0);
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    const INVPHI2: f64 = 1.0 - INVPHI;

    let mut evaluations = 0;
    if hi - lo >= bracket_tol {
        let mut c = lo + INVPHI2 * (hi - lo);
        let mut d = lo + INVPHI * (hi - lo);
        let mut fc = f(c);
        let mut fd = f(d);
        evaluations = 2;
        while hi - lo >= bracket_tol && evaluations < max_evaluations {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = lo + INVPHI2 * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + INVPHI * (hi - lo);
                fd = f(d);
            }
            evaluations += 1;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    ScalarMinResult {
        x,
        fx,
        evaluations: evaluations + 1,
        converged: hi - lo < bracket_tol,
    }
}

/// Simplex minimizer options. Defaults: 500-evaluation budget, stop when
/// the simplex diameter drops below 1e-5 or the value spread below 1e-8.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evaluations: u64,
    pub diameter_tol: f64,
    pub spread_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evaluations: 500,
            diameter_tol: 1e-5,
            spread_tol: 1e-8,
        }
    }
}

/// Multivariate minimizer outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexMinResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Nelder-Mead downhill simplex over a box. The initial simplex sits at the
/// box centre with one vertex offset by a tenth of the box width along each
/// axis. Coefficients: reflection 1, expansion 2, contraction 1/2, shrink
/// 1/2. The evaluation budget is strict: the search halts rather than start
/// an objective call beyond it.
pub fn nelder_mead(
    bounds: &[(f64, f64)],
    mut f: impl FnMut(&[f64]) -> f64,
    options: &NelderMeadOptions,
) -> SimplexMinResult {
    let n = bounds.len();
    assert!(n >= 1, "nelder_mead needs at least one dimension");

    let mut evaluations = 0u64;
    let budget = options.max_evaluations;
    macro_rules! try_eval {
        ($x:expr) => {{
            if evaluations >= budget {
                None
            } else {
                evaluations += 1;
                Some(f($x))
            }
        }};
    }

    let centre: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut truncated = false;
    for i in 0..=n {
        let mut x = centre.clone();
        if i > 0 {
            let (lo, hi) = bounds[i - 1];
            x[i - 1] += 0.1 * (hi - lo);
        }
        match try_eval!(&x) {
            Some(fx) => simplex.push((x, fx)),
            None => {
                truncated = true;
                simplex.push((x, f64::INFINITY));
            }
        }
    }

    let diameter = |s: &[(Vec<f64>, f64)]| {
        let mut d: f64 = 0.0;
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                let dist = s[a]
                    .0
                    .iter()
                    .zip(&s[b].0)
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
                    .sqrt();
                d = d.max(dist);
            }
        }
        d
    };

    let mut converged = false;
    'search: while !truncated {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite loss"));
        let spread = simplex[n].1 - simplex[0].1;
        if diameter(&simplex) < options.diameter_tol || spread < options.spread_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }
        let worst = simplex[n].clone();
        let at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = at(1.0);
        let Some(fr) = try_eval!(&reflected) else { break };

        if fr < simplex[0].1 {
            let expanded = at(2.0);
            let Some(fe) = try_eval!(&expanded) else {
                simplex[n] = (reflected, fr);
                break;
            };
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }

        // Contract toward the better of the worst vertex and the reflection.
        let (contracted, threshold) = if fr < worst.1 {
            (at(0.5), fr)
        } else {
            (at(-0.5), worst.1)
        };
        if let Some(fc) = try_eval!(&contracted) {
            if fc <= threshold {
                simplex[n] = (contracted, fc);
                continue;
            }
        } else {
            break;
        }

        // Shrink everything toward the best vertex.
        for i in 1..=n {
            let x: Vec<f64> = simplex[0]
                .0
                .iter()
                .zip(&simplex[i].0)
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            let Some(fx) = try_eval!(&x) else { break 'search };
            simplex[i] = (x, fx);
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite loss"));
    SimplexMinResult {
        x: simplex[0].0.clone(),
        fx: simplex[0].1,
        evaluations,
        converged,
    }
}

/// Calibrates the single free parameter by golden-section search. The
/// bracket tolerance is 1e-4 with a 200-evaluation budget.
pub fn fit_golden(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    if problem.free.len() != 1 {
        return Err(Error::invalid(
            "fit problem",
            format!(
                "golden-section calibration takes exactly one free parameter, found {}",
                problem.free.len()
            ),
        ));
    }
    let (param, (lo, hi)) = problem.free[0];
    let r = golden_section(lo, hi, |x| loss(problem, &[x]), 1e-4, 200);
    Ok(FitResult {
        params: vec![(param, r.x)],
        sse: r.fx,
        evaluations: r.evaluations,
        converged: r.converged,
    })
}

/// Calibrates up to three free parameters by Nelder-Mead. The reported
/// parameters are clamped into the bounds; when clamping moved the point,
/// the reported sse is re-evaluated there (counted in `evaluations`).
pub fn fit_nelder_mead(problem: &FitProblem, options: &NelderMeadOptions) -> Result<FitResult> {
    problem.validate()?;
    let bounds: Vec<(f64, f64)> = problem.free.iter().map(|(_, b)| *b).collect();
    let r = nelder_mead(&bounds, |x| loss(problem, x), options);
    let clamped = problem.clamp(&r.x);
    let (sse, evaluations) = if clamped == r.x {
        (r.fx, r.evaluations)
    } else {
        (loss(problem, &clamped), r.evaluations + 1)
    };
    Ok(FitResult {
        params: problem
            .free
            .iter()
            .map(|(p, _)| *p)
            .zip(clamped)
            .map(|(p, v)| (p, v))
            .collect(),
        sse,
        evaluations,
        converged: r.converged,
    })
}

/// Finite-difference curvature of the loss at `at`, with an identifiability
/// verdict. A near-singular curvature matrix means some direction of the
/// box barely changes the fit (for example front gain and stroke fraction
/// trading off against each other), so single values along it should not be
/// trusted even when the residual is small.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureProbe {
    /// Symmetric matrix, one row per free parameter.
    pub hessian: Vec<Vec<f64>>,
    pub identifiable: bool,
}

pub fn curvature_probe(problem: &FitProblem, at: &[f64]) -> Result<CurvatureProbe> {
    problem.validate()?;
    let n = problem.free.len();
    assert_eq!(at.len(), n);

    let steps: Vec<f64> = problem
        .free
        .iter()
        .map(|(_, (lo, hi))| 1e-3 * (hi - lo))
        .collect();
    // Keep every probe point inside the box so the penalty term stays out
    // of the differences.
    let centre: Vec<f64> = at
        .iter()
        .zip(&problem.free)
        .zip(&steps)
        .map(|((&x, (_, (lo, hi))), &h)| x.clamp(lo + h, hi - h))
        .collect();

    let probe = |offsets: &[(usize, f64)]| {
        let mut x = centre.clone();
        for &(axis, sign) in offsets {
            x[axis] += sign * steps[axis];
        }
        loss(problem, &x)
    };

    let f0 = probe(&[]);
    let mut hessian = vec![vec![0.0; n]; n];
    for i in 0..n {
        let fp = probe(&[(i, 1.0)]);
        let fm = probe(&[(i, -1.0)]);
        hessian[i][i] = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
        for j in 0..i {
            let fpp = probe(&[(i, 1.0), (j, 1.0)]);
            let fpm = probe(&[(i, 1.0), (j, -1.0)]);
            let fmp = probe(&[(i, -1.0), (j, 1.0)]);
            let fmm = probe(&[(i, -1.0), (j, -1.0)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j]);
            hessian[i][j] = v;
            hessian[j][i] = v;
        }
    }

    let max_diag = hessian
        .iter()
        .enumerate()
        .map(|(i, row)| row[i])
        .fold(0.0_f64, f64::max);
    let mut identifiable = max_diag > 0.0;
    let mut diag_product = 1.0;
    for i in 0..n {
        if hessian[i][i] <= 1e-9 * max_diag {
            identifiable = false;
        }
        diag_product *= hessian[i][i].max(0.0);
    }
    if identifiable && n > 1 {
        // Relative determinant below 1% marks a flat valley.
        identifiable = determinant(&hessian) > 0.01 * diag_product;
    }
    Ok(CurvatureProbe {
        hessian,
        identifiable,
    })
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        n => panic!("determinant not implemented for {n}x{n}"),
    }
}
