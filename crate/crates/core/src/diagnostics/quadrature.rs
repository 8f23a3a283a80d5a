//! Scalar quadrature helpers.

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_k.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_k(z), p0 = P_{k-1}(z).
            dp = kf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[k - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[k - 1 - i] = w[i];
    }
    if k % 2 == 1 {
        x[k / 2] = 0.0;
    }
    (x, w)
}

/// `∫_a^b f` with a fixed Gauss–Legendre rule of `k` points.
pub fn integrate_gauss<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, k: usize) -> f64 {
    let (x, w) = gauss_legendre(k);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}

/// Adaptive integration by bisection: a 10-point Gauss rule on an interval
/// is compared with the sum over its two halves.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (x, w) = gauss_legendre(10);
    let rule = |f: &mut F, a: f64, b: f64| {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        x.iter()
            .zip(&w)
            .map(|(xi, wi)| wi * f(mid + half * xi))
            .sum::<f64>()
            * half
    };
    let mut total = 0.0;
    let mut stack = vec![(a, b, rule(&mut f, a, b), 0usize)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule(&mut f, lo, mid);
        let right = rule(&mut f, mid, hi);
        let err = (left + right - whole).abs();
        let scale = ((hi - lo) / (b - a).abs().max(f64::MIN_POSITIVE)).max(1e-300);
        if err <= tol * scale.max(1e-3) || depth >= 50 {
            total += left + right;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_for_polynomials() {
        for k in 1..12 {
            let deg = 2 * k - 1;
            let v = integrate_gauss(|x| x.powi(deg as i32) + x.powi((deg - 1) as i32), 0.0, 1.0, k);
            let exact = 1.0 / (deg as f64 + 1.0) + 1.0 / deg as f64;
            assert!((v - exact).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn adaptive_log_singularity() {
        // ∫_ε^1 1/x = −ln ε.
        let eps = 1e-6;
        let v = integrate_adaptive(|x| 1.0 / x, eps, 1.0, 1e-13);
        assert!((v + eps.ln()).abs() < 1e-10, "{v}");
    }
}
