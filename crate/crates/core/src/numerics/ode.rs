/// Below this |b·t| the exponential is replaced by its second-order series.
const SERIES_THRESHOLD: f64 = 1e-12;

/// Exact solution of ẏ = a + b·y with y(0) = y0, evaluated at `t`.
///
/// Written as `y0·e^{bt} + a·(e^{bt} − 1)/b` using `exp_m1`, which is the
/// same function as `(y0 + a/b)·e^{bt} − a/b` without the cancellation.
pub fn integrate_linear_ode(a: f64, b: f64, y0: f64, t: f64) -> f64 {
    let bt = b * t;
    if bt.abs() > SERIES_THRESHOLD {
        y0 * bt.exp() + a * bt.exp_m1() / b
    } else {
        y0 * (1.0 + bt) + a * t * (1.0 + 0.5 * bt)
    }
}
