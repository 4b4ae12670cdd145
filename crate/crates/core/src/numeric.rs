//! Scalar root finding, finite-difference Jacobians and a scaled damped Newton solver.

use nalgebra::{DMatrix, DVector, LU};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError<E> {
    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error(transparent)]
    Eval(E),
}

/// Brent's method on `[lo, hi]`. Stops when the bracket is narrower than
/// `xtol` or `f` is exactly zero.
pub fn brent<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64, RootError<E>> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a).map_err(RootError::Eval)?;
    let mut fb = f(b).map_err(RootError::Eval)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NotBracketed { lo, hi, f_lo: fa, f_hi: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b).map_err(RootError::Eval)?;
    }
    Err(RootError::NoConvergence(max_iter))
}

/// Plain bisection; used where a derivative-free, monotone search is wanted.
pub fn bisect<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64, RootError<E>> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a).map_err(RootError::Eval)?;
    let fb = f(b).map_err(RootError::Eval)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NotBracketed { lo, hi, f_lo: fa, f_hi: fb });
    }
    let neg_at_a = fa < 0.0;
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m).map_err(RootError::Eval)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Err(RootError::NoConvergence(max_iter))
}

/// Forward-difference Jacobian. Column `j` is perturbed by
/// `sqrt(eps) * max(|z_j|, scale_j)`.
pub fn fd_jacobian<E>(
    f: &mut impl FnMut(&DVector<f64>) -> Result<DVector<f64>, E>,
    z: &DVector<f64>,
    f0: &DVector<f64>,
    scale: &DVector<f64>,
) -> Result<DMatrix<f64>, E> {
    let n = z.len();
    let mut jac = DMatrix::zeros(f0.len(), n);
    let mut zp = z.clone();
    for j in 0..n {
        let step = f64::EPSILON.sqrt() * z[j].abs().max(scale[j]);
        zp[j] = z[j] + step;
        // the representable step, not the requested one
        let dz = zp[j] - z[j];
        let fp = f(&zp)?;
        jac.set_column(j, &((fp - f0) / dz));
        zp[j] = z[j];
    }
    Ok(jac)
}

/// Ratio of extreme singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the max-norm of the scaled residual.
    pub tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Reuse the previous Jacobian while the residual contracts at least this fast.
    pub reuse_contraction: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-9, max_iter: 50, max_backtracks: 30, reuse_contraction: 0.3 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    pub jacobian_evals: usize,
    pub residual_evals: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonError<E> {
    #[error("residual evaluation failed: {0}")]
    Eval(E),
    #[error("singular Jacobian after {iterations} iterations")]
    Singular { iterations: usize, worst: usize, residual_norm: f64 },
    #[error("no convergence after {iterations} iterations (scaled residual {residual_norm:.3e} at equation {worst})")]
    NoConvergence { iterations: usize, worst: usize, residual_norm: f64 },
    #[error("line search failed at iteration {iterations} (scaled residual {residual_norm:.3e} at equation {worst})")]
    LineSearch { iterations: usize, worst: usize, residual_norm: f64 },
}

impl<E> NewtonError<E> {
    pub fn worst_equation(&self) -> Option<usize> {
        match self {
            NewtonError::Eval(_) => None,
            NewtonError::Singular { worst, .. }
            | NewtonError::NoConvergence { worst, .. }
            | NewtonError::LineSearch { worst, .. } => Some(*worst),
        }
    }
}

/// Index and value of the largest `|v_i|`.
pub fn max_abs(v: &DVector<f64>) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) })
}

/// Damped Newton on `F(z) = 0` in scaled variables `z / var_scale` and scaled
/// residuals `F / res_scale`, with a finite-difference Jacobian that is kept
/// between calls and refreshed when convergence slows.
#[derive(Debug, Clone)]
pub struct NewtonSolver {
    pub options: NewtonOptions,
    lu: Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl NewtonSolver {
    pub fn new(options: NewtonOptions) -> Self {
        NewtonSolver { options, lu: None }
    }

    /// Drop the cached Jacobian (e.g. after the step size changed).
    pub fn invalidate(&mut self) {
        self.lu = None;
    }

    pub fn solve<E>(
        &mut self,
        z: &mut DVector<f64>,
        var_scale: &DVector<f64>,
        res_scale: &DVector<f64>,
        mut residual: impl FnMut(&DVector<f64>) -> Result<DVector<f64>, E>,
    ) -> Result<NewtonReport, NewtonError<E>> {
        let opts = self.options;
        let mut report = NewtonReport::default();
        let mut eval = |z: &DVector<f64>, report: &mut NewtonReport| -> Result<DVector<f64>, E> {
            report.residual_evals += 1;
            Ok(residual(z)?.component_div(res_scale))
        };

        let mut fz = eval(z, &mut report).map_err(NewtonError::Eval)?;
        let (mut worst, mut norm) = max_abs(&fz);
        report.residual_norm = norm;
        let mut fresh = false;

        while norm > opts.tol || !norm.is_finite() {
            if report.iterations >= opts.max_iter {
                return Err(NewtonError::NoConvergence { iterations: report.iterations, worst, residual_norm: norm });
            }
            if self.lu.is_none() {
                self.refresh(z, &fz, var_scale, &mut eval, &mut report).map_err(NewtonError::Eval)?;
                fresh = true;
            }
            let Some(dz) = self.lu.as_ref().and_then(|lu| lu.solve(&(-&fz))) else {
                if fresh {
                    return Err(NewtonError::Singular { iterations: report.iterations, worst, residual_norm: norm });
                }
                self.lu = None;
                continue;
            };
            let dz = dz.component_mul(var_scale);

            // Backtracking on the scaled max-norm.
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=opts.max_backtracks {
                let trial = &*z + lambda * &dz;
                if let Ok(ft) = eval(&trial, &mut report) {
                    let (w, n) = max_abs(&ft);
                    if n.is_finite() && n <= (1.0 - 1e-4 * lambda) * norm {
                        accepted = Some((trial, ft, w, n));
                        break;
                    }
                }
                if !fresh {
                    break;
                }
                lambda *= 0.5;
            }
            report.iterations += 1;

            match accepted {
                Some((trial, ft, w, n)) => {
                    let contraction = n / norm;
                    *z = trial;
                    fz = ft;
                    worst = w;
                    norm = n;
                    report.residual_norm = n;
                    if contraction > opts.reuse_contraction {
                        self.lu = None;
                    }
                    fresh = false;
                }
                None if !fresh => {
                    self.lu = None;
                }
                None => {
                    return Err(NewtonError::LineSearch { iterations: report.iterations, worst, residual_norm: norm });
                }
            }
        }
        Ok(report)
    }

    fn refresh<E>(
        &mut self,
        z: &DVector<f64>,
        fz: &DVector<f64>,
        var_scale: &DVector<f64>,
        eval: &mut impl FnMut(&DVector<f64>, &mut NewtonReport) -> Result<DVector<f64>, E>,
        report: &mut NewtonReport,
    ) -> Result<(), E> {
        let mut f = |zz: &DVector<f64>| eval(zz, report);
        let jac = fd_jacobian(&mut f, z, fz, var_scale)?;
        // scale columns so the solve returns dz / var_scale
        let scaled = jac * DMatrix::from_diagonal(var_scale);
        report.jacobian_evals += 1;
        self.lu = Some(scaled.lu());
        Ok(())
    }
}
