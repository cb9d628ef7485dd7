//! Dormand–Prince 5(4) integrator for complex linear ODE systems, with
//! Hairer's fourth-order dense output.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn error_norm(err: &[C64], y0: &[C64], y1: &[C64], tol: &Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..err.len() {
        let sk = tol.atol + tol.rtol * y0[i].norm().max(y1[i].norm());
        acc += err[i].norm_sqr() / (sk * sk);
    }
    acc.sqrt()
}

fn initial_step<F>(f: &mut F, t: f64, y: &[C64], f0: &[C64], span: f64, tol: &Tolerances) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let dir = span.signum();
    let scaled = |v: &[C64]| {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let sk = tol.atol + tol.rtol * b.norm();
                a.norm_sqr() / (sk * sk)
            })
            .sum();
        (s / (2 * v.len()) as f64).sqrt()
    };
    let d0 = scaled(y);
    let d1 = scaled(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs());
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * (dir * h0)).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    f(t + dir * h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.abs()) * dir
}

/// Integrates y' = f(t, y) from `t0` to `t1` (either direction) and returns y
/// at each of `outputs`, which must be monotone in the direction of travel and
/// lie within the interval.
pub(crate) fn integrate<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: &[C64],
    outputs: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<Vec<C64>>, SolverStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    let span = t1 - t0;
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut stats = SolverStats::default();
    let mut out = Vec::with_capacity(outputs.len());
    let mut next = 0;
    while next < outputs.len() && (outputs[next] - t0) * dir <= 0.0 {
        out.push(y0.to_vec());
        next += 1;
    }
    if span == 0.0 {
        while next < outputs.len() {
            out.push(y0.to_vec());
            next += 1;
        }
        return Ok((out, stats));
    }

    let zero = C64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut ys = vec![zero; n];
    let mut y1 = vec![zero; n];
    let mut err = vec![zero; n];
    let mut rc = vec![[zero; 5]; n];

    let mut t = t0;
    f(t, &y, &mut k1);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k1, span, tol);
    stats.evaluations += 1;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::StepFailure { t, h });
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure { t, h });
        }
        let last = (t + h - t1) * dir >= 0.0;
        if last {
            h = t1 - t;
        }

        for i in 0..n {
            ys[i] = y[i] + k1[i] * (h * A21);
        }
        f(t + C2 * h, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        f(t + C3 * h, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        f(t + C4 * h, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        f(t + C5 * h, &ys, &mut k5);
        for i in 0..n {
            ys[i] = y[i]
                + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        let t_new = if last { t1 } else { t + h };
        f(t_new, &ys, &mut k6);
        for i in 0..n {
            y1[i] = y[i]
                + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
        }
        f(t_new, &y1, &mut k7);
        stats.evaluations += 6;
        for i in 0..n {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                + k7[i] * E7)
                * h;
        }
        let e = error_norm(&err, &y, &y1, tol);
        let fac11 = e.powf(0.2 - BETA * 0.75);

        if e <= 1.0 {
            stats.accepted += 1;
            if next < outputs.len() && (outputs[next] - t_new) * dir <= 0.0 {
                for i in 0..n {
                    let diff = y1[i] - y[i];
                    let bspl = k1[i] * h - diff;
                    rc[i] = [
                        y[i],
                        diff,
                        bspl,
                        diff - k7[i] * h - bspl,
                        (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6
                            + k7[i] * D7)
                            * h,
                    ];
                }
                while next < outputs.len() && (outputs[next] - t_new) * dir <= 0.0 {
                    let s = outputs[next];
                    if s == t_new {
                        out.push(y1.clone());
                    } else {
                        let th = (s - t) / h;
                        let th1 = 1.0 - th;
                        out.push(
                            rc.iter()
                                .map(|r| r[0] + (r[1] + (r[2] + (r[3] + r[4] * th1) * th) * th1) * th)
                                .collect(),
                        );
                    }
                    next += 1;
                }
            }
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            if last {
                break;
            }
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            fac_old = e.max(1e-4);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.abs().min(h.abs()) * dir;
            }
            h = h_new;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
    while next < outputs.len() {
        out.push(y.clone());
        next += 1;
    }
    Ok((out, stats))
}
