//! Bracketed real root finding: uniform sign-change scan plus bisection.
//!
//! Roots of even multiplicity that fall between grid nodes are not detected.

pub const MAX_BISECTIONS: usize = 200;

/// All sign changes of `f` on a uniform `grid_points` grid over `[lo, hi]`,
/// each refined to an interval narrower than `1e-12·(hi − lo)`.
///
/// Returned roots are strictly ascending; roots closer than `1e-10·(hi − lo)`
/// are merged. Grid nodes where `f` is exactly zero are returned as roots.
pub fn find_real_roots<F>(f: F, lo: f64, hi: f64, grid_points: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || grid_points < 2 {
        return Vec::new();
    }
    let width = hi - lo;
    let tol = 1e-12 * width;
    let dedup = 1e-10 * width;
    let step = width / (grid_points - 1) as f64;
    let node = |i: usize| if i == grid_points - 1 { hi } else { lo + step * i as f64 };

    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| r - last > dedup) {
            roots.push(r);
        }
    };

    let mut x0 = node(0);
    let mut f0 = f(x0);
    if f0 == 0.0 {
        push(x0, &mut roots);
    }
    for i in 1..grid_points {
        let x1 = node(i);
        let f1 = f(x1);
        if f1 == 0.0 {
            push(x1, &mut roots);
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            push(bisect(&f, x0, x1, f0, tol), &mut roots);
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        if b - a < tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
