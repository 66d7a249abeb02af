use num_complex::Complex64;

use crate::hilbert::SparseOperator;

/// Classical fourth-order Runge–Kutta for `y' = G y` with a fixed sparse
/// generator, reusing its scratch buffers between steps.
pub(crate) struct LinearRk4 {
    generator: SparseOperator,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl LinearRk4 {
    pub fn new(generator: SparseOperator) -> Self {
        let dim = generator.dim();
        let zero = || vec![Complex64::new(0.0, 0.0); dim];
        Self {
            generator,
            k: [zero(), zero(), zero(), zero()],
            tmp: zero(),
        }
    }

    /// Advances `y` in place by `h`.
    pub fn step(&mut self, y: &mut [Complex64], h: f64) {
        let g = &self.generator;
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;

        g.apply_into(y, k1);
        axpy_into(tmp, y, 0.5 * h, k1);
        g.apply_into(tmp, k2);
        axpy_into(tmp, y, 0.5 * h, k2);
        g.apply_into(tmp, k3);
        axpy_into(tmp, y, h, k3);
        g.apply_into(tmp, k4);

        let w = h / 6.0;
        for i in 0..y.len() {
            y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// Copy of `y` advanced by `h`.
    pub fn stepped(&mut self, y: &[Complex64], h: f64) -> Vec<Complex64> {
        let mut out = y.to_vec();
        self.step(&mut out, h);
        out
    }
}

/// `out = y + a x`.
fn axpy_into(out: &mut [Complex64], y: &[Complex64], a: f64, x: &[Complex64]) {
    for i in 0..out.len() {
        out[i] = y[i] + a * x[i];
    }
}
