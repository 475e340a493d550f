//! Dormand-Prince 5(4) step kernel with 4th-order dense output.

/// Butcher matrix rows (the zero first row is implicit).
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// 5th-order weights (also the 7th stage row: FSAL).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Quartic interpolant on one accepted step.
#[derive(Debug, Clone)]
pub(crate) struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    cont: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = if self.h == 0.0 {
            0.0
        } else {
            (t - self.t0) / self.h
        };
        let th1 = 1.0 - theta;
        for i in 0..out.len() {
            out[i] = self.cont[0][i]
                + theta
                    * (self.cont[1][i]
                        + th1 * (self.cont[2][i] + theta * (self.cont[3][i] + th1 * self.cont[4][i])));
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.cont[0].len()];
        self.eval_into(t, &mut out);
        out
    }

    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        let theta = if self.h == 0.0 {
            0.0
        } else {
            (t - self.t0) / self.h
        };
        let th1 = 1.0 - theta;
        self.cont[0][i]
            + theta
                * (self.cont[1][i]
                    + th1 * (self.cont[2][i] + theta * (self.cont[3][i] + th1 * self.cont[4][i])))
    }
}

pub(crate) struct StepResult {
    pub y_new: Vec<f64>,
    /// `f(t + h, y_new)`; reusable as the next step's first stage.
    pub k7: Vec<f64>,
    /// Scaled RMS error estimate; accept when <= 1.
    pub err_norm: f64,
    pub dense: DenseSegment,
}

pub(crate) enum StepAttempt {
    Accepted(StepResult),
    /// A stage evaluation left the admissible domain (or produced a
    /// non-finite state); the caller should retry with a smaller step.
    DomainFault,
}

/// One trial Dormand-Prince step from `(t, y)` with the first stage `k1`
/// already evaluated. `f` returns false on a domain fault.
pub(crate) fn attempt_step<F>(
    f: &mut F,
    t: f64,
    y: &[f64],
    k1: &[f64],
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> StepAttempt
where
    F: FnMut(f64, &[f64], &mut [f64]) -> bool,
{
    let n = y.len();
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut stage_y = vec![0.0; n];

    macro_rules! stage {
        ($c:expr, $out:ident, $coeffs:expr, $ks:expr) => {{
            for i in 0..n {
                let mut acc = 0.0;
                for (a, k) in $coeffs.iter().zip($ks.iter()) {
                    acc += a * k[i];
                }
                stage_y[i] = y[i] + h * acc;
                if !stage_y[i].is_finite() {
                    return StepAttempt::DomainFault;
                }
            }
            if !f(t + $c * h, &stage_y, &mut $out) {
                return StepAttempt::DomainFault;
            }
        }};
    }

    stage!(C[1], k2, A2, [k1]);
    stage!(C[2], k3, A3, [k1, &k2]);
    stage!(C[3], k4, A4, [k1, &k2, &k3]);
    stage!(C[4], k5, A5, [k1, &k2, &k3, &k4]);
    stage!(C[5], k6, A6, [k1, &k2, &k3, &k4, &k5]);

    let mut y_new = vec![0.0; n];
    for i in 0..n {
        let acc = B[0] * k1[i] + B[2] * k3[i] + B[3] * k4[i] + B[4] * k5[i] + B[5] * k6[i];
        y_new[i] = y[i] + h * acc;
        if !y_new[i].is_finite() {
            return StepAttempt::DomainFault;
        }
    }
    if !f(t + h, &y_new, &mut k7) {
        return StepAttempt::DomainFault;
    }

    let mut err_sq = 0.0;
    for i in 0..n {
        let e = E[0] * k1[i]
            + E[2] * k3[i]
            + E[3] * k4[i]
            + E[4] * k5[i]
            + E[5] * k6[i]
            + E[6] * k7[i];
        let scale = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
        let r = h * e / scale;
        err_sq += r * r;
    }
    let err_norm = (err_sq / n as f64).sqrt();
    if !err_norm.is_finite() {
        return StepAttempt::DomainFault;
    }

    // dense-output coefficients (Hairer's contd5 layout)
    let mut cont0 = vec![0.0; n];
    let mut cont1 = vec![0.0; n];
    let mut cont2 = vec![0.0; n];
    let mut cont3 = vec![0.0; n];
    let mut cont4 = vec![0.0; n];
    for i in 0..n {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        cont0[i] = y[i];
        cont1[i] = ydiff;
        cont2[i] = bspl;
        cont3[i] = ydiff - h * k7[i] - bspl;
        cont4[i] = h
            * (D[0] * k1[i]
                + D[2] * k3[i]
                + D[3] * k4[i]
                + D[4] * k5[i]
                + D[5] * k6[i]
                + D[6] * k7[i]);
    }

    StepAttempt::Accepted(StepResult {
        y_new,
        k7,
        err_norm,
        dense: DenseSegment {
            t0: t,
            h,
            cont: [cont0, cont1, cont2, cont3, cont4],
        },
    })
}
