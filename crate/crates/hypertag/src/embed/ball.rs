//! Poincare ball geometry: distance, its gradient, and the Riemannian SGD
//! step.
//!
//! Points live in the open unit d-ball carrying the conformal metric
//! (2/(1-|x|^2))^2 times the Euclidean one. The geodesic distance is
//!
//!   d(u,v) = arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2)))
//!
//! computed here as ln(1 + t + sqrt(t(t+2))) with t = arcosh argument - 1,
//! which stays accurate for nearby points. An RSGD step rescales the
//! Euclidean gradient by the inverse metric, (1-|x|^2)^2/4, steps, and
//! projects back inside the ball with margin `eps_ball`.

use crate::error::{Error, Result};

pub fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    sq_norm(x).sqrt()
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn sq_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn euclidean_distance(u: &[f64], v: &[f64]) -> f64 {
    sq_distance(u, v).sqrt()
}

fn check_inside(x: &[f64]) -> Result<()> {
    let n2 = sq_norm(x);
    if n2 >= 1.0 {
        return Err(Error::OutsideBall { norm: n2.sqrt() });
    }
    Ok(())
}

/// Geodesic distance between two points strictly inside the unit ball.
pub fn hyperbolic_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    check_inside(u)?;
    check_inside(v)?;
    Ok(hyperbolic_distance_unchecked(u, v))
}

pub(crate) fn hyperbolic_distance_unchecked(u: &[f64], v: &[f64]) -> f64 {
    debug_assert!(sq_norm(u) < 1.0 && sq_norm(v) < 1.0);
    let alpha = 1.0 - sq_norm(u);
    let beta = 1.0 - sq_norm(v);
    let t = 2.0 * sq_distance(u, v) / (alpha * beta);
    (t + (t * (t + 2.0)).sqrt()).ln_1p()
}

/// Euclidean partial derivatives of the hyperbolic distance with respect to
/// both arguments. Undefined at u = v.
pub fn hyperbolic_distance_gradient(u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_inside(u)?;
    check_inside(v)?;
    if u == v {
        return Err(Error::invalid("distance gradient undefined at u = v"));
    }
    let mut gu = vec![0.0; u.len()];
    let mut gv = vec![0.0; v.len()];
    hyperbolic_dist_grad_into(u, v, &mut gu, &mut gv);
    Ok((gu, gv))
}

/// Distance plus gradients written into `gu`, `gv`. At u = v the gradients
/// are zeroed and the returned distance is 0; callers treat that as a term to
/// skip.
pub(crate) fn hyperbolic_dist_grad_into(u: &[f64], v: &[f64], gu: &mut [f64], gv: &mut [f64]) -> f64 {
    let su = sq_norm(u);
    let sv = sq_norm(v);
    debug_assert!(su < 1.0 && sv < 1.0);
    let alpha = 1.0 - su;
    let beta = 1.0 - sv;
    let diff2 = sq_distance(u, v);
    let t = 2.0 * diff2 / (alpha * beta);
    if t <= 0.0 {
        gu.fill(0.0);
        gv.fill(0.0);
        return 0.0;
    }
    let d = (t + (t * (t + 2.0)).sqrt()).ln_1p();
    let root = (t * (t + 2.0)).sqrt();
    let uv = dot(u, v);
    let cu = 4.0 / (beta * root);
    let au = (sv - 2.0 * uv + 1.0) / (alpha * alpha);
    let cv = 4.0 / (alpha * root);
    let av = (su - 2.0 * uv + 1.0) / (beta * beta);
    for i in 0..u.len() {
        gu[i] = cu * (au * u[i] - v[i] / alpha);
        gv[i] = cv * (av * v[i] - u[i] / beta);
    }
    d
}

/// Distance plus gradients for the Euclidean trainer: d = |u - v|, gradient
/// the unit difference vector. Same skip contract at u = v.
pub(crate) fn euclidean_dist_grad_into(u: &[f64], v: &[f64], gu: &mut [f64], gv: &mut [f64]) -> f64 {
    let d = euclidean_distance(u, v);
    if d <= 0.0 {
        gu.fill(0.0);
        gv.fill(0.0);
        return 0.0;
    }
    for i in 0..u.len() {
        gu[i] = (u[i] - v[i]) / d;
        gv[i] = -gu[i];
    }
    d
}

/// Rescales into the closed ball of radius 1 - eps_ball when outside it.
pub fn project_into_ball(x: &mut [f64], eps_ball: f64) {
    let max = 1.0 - eps_ball;
    let target = max * max;
    while sq_norm(x) > target {
        let f = (max / norm(x)) * (1.0 - 1e-12);
        for c in x.iter_mut() {
            *c *= f;
        }
    }
}

/// One RSGD step: Riemannian gradient = ((1-|x|^2)^2/4) times the Euclidean
/// gradient, step against it, project back inside the ball. After every call
/// the point's norm is at most 1 - eps_ball.
pub fn rsgd_update(point: &mut [f64], euclidean_grad: &[f64], lr: f64, eps_ball: f64) {
    let a = 1.0 - sq_norm(point);
    let factor = lr * a * a * 0.25;
    for (p, g) in point.iter_mut().zip(euclidean_grad) {
        *p -= factor * g;
    }
    project_into_ball(point, eps_ball);
    debug_assert!(sq_norm(point) <= (1.0 - eps_ball) * (1.0 - eps_ball));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball_point<R: Rng>(dim: usize, max_norm: f64, rng: &mut R) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = norm(&x);
            if n < 1.0 && n > 1e-6 {
                let scale = rng.random::<f64>() * max_norm / n;
                return x.iter().map(|c| c * scale).collect();
            }
        }
    }

    #[test]
    fn distance_closed_forms() {
        // arcosh(1 + 2*0.25/0.75) = arcosh(5/3) = ln 3
        let d = hyperbolic_distance(&[0.0, 0.0], &[0.5, 0.0]).unwrap();
        assert!((d - 3.0_f64.ln()).abs() < 1e-9);

        let d = hyperbolic_distance(&[0.9, 0.0], &[-0.9, 0.0]).unwrap();
        assert!((d - 5.888877958332881).abs() < 1e-9);
    }

    #[test]
    fn distance_rejects_boundary_points() {
        assert!(hyperbolic_distance(&[1.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(hyperbolic_distance(&[0.0, 0.0], &[0.8, 0.7]).is_err());
        assert!(hyperbolic_distance_gradient(&[0.3, 0.0], &[0.3, 0.0]).is_err());
    }

    #[test]
    fn distance_metric_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let dim = rng.random_range(2..6);
            let a = random_ball_point(dim, 0.95, &mut rng);
            let b = random_ball_point(dim, 0.95, &mut rng);
            let c = random_ball_point(dim, 0.95, &mut rng);
            let dab = hyperbolic_distance(&a, &b).unwrap();
            assert!((dab - hyperbolic_distance(&b, &a).unwrap()).abs() < 1e-12);
            assert_eq!(hyperbolic_distance(&a, &a).unwrap(), 0.0);
            assert!(dab >= 0.0);
            let dac = hyperbolic_distance(&a, &c).unwrap();
            let dcb = hyperbolic_distance(&c, &b).unwrap();
            assert!(dab <= dac + dcb + 1e-9);
        }
    }

    #[test]
    fn distance_invariant_under_rotation() {
        // rotations about the origin are isometries of the ball
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..500 {
            let dim = rng.random_range(2..6);
            let mut a = random_ball_point(dim, 0.9, &mut rng);
            let mut b = random_ball_point(dim, 0.9, &mut rng);
            let before = hyperbolic_distance(&a, &b).unwrap();
            let i = rng.random_range(0..dim);
            let mut j = rng.random_range(0..dim - 1);
            if j >= i {
                j += 1;
            }
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = theta.sin_cos();
            for x in [&mut a, &mut b] {
                let (xi, xj) = (x[i], x[j]);
                x[i] = c * xi - s * xj;
                x[j] = s * xi + c * xj;
            }
            let after = hyperbolic_distance(&a, &b).unwrap();
            assert!((before - after).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = 1e-6;
        for _ in 0..200 {
            let dim = 5;
            let u = random_ball_point(dim, 0.9, &mut rng);
            let v = random_ball_point(dim, 0.9, &mut rng);
            let (gu, gv) = hyperbolic_distance_gradient(&u, &v).unwrap();
            for i in 0..dim {
                let mut up = u.clone();
                let mut um = u.clone();
                up[i] += h;
                um[i] -= h;
                let fd = (hyperbolic_distance(&up, &v).unwrap() - hyperbolic_distance(&um, &v).unwrap()) / (2.0 * h);
                assert!((gu[i] - fd).abs() <= 1e-5 * fd.abs().max(1.0), "gu[{i}] = {} vs fd {}", gu[i], fd);
                let mut vp = v.clone();
                let mut vm = v.clone();
                vp[i] += h;
                vm[i] -= h;
                let fd = (hyperbolic_distance(&u, &vp).unwrap() - hyperbolic_distance(&u, &vm).unwrap()) / (2.0 * h);
                assert!((gv[i] - fd).abs() <= 1e-5 * fd.abs().max(1.0), "gv[{i}] = {} vs fd {}", gv[i], fd);
            }
        }
    }

    #[test]
    fn gradient_mirror_symmetry() {
        let (gu, gv) = hyperbolic_distance_gradient(&[0.4, 0.0], &[-0.4, 0.0]).unwrap();
        assert!((gu[0] + gv[0]).abs() < 1e-12);
        assert!((gu[1] - gv[1]).abs() < 1e-12);
    }

    #[test]
    fn gradient_near_origin_is_metric_scaled_direction() {
        // at u -> 0 the distance behaves like 2|u - v| locally in the radial
        // direction toward v
        let v = [0.3, 0.0];
        let u = [1e-9, 0.0];
        let (gu, _) = hyperbolic_distance_gradient(&u, &v).unwrap();
        // moving u toward v decreases d, so the gradient points away from v
        assert!(gu[0] < 0.0);
        let fd = {
            let h = 1e-7;
            (hyperbolic_distance(&[u[0] + h, 0.0], &v).unwrap()
                - hyperbolic_distance(&[u[0] - h, 0.0], &v).unwrap())
                / (2.0 * h)
        };
        assert!((gu[0] - fd).abs() < 1e-5 * fd.abs());
    }

    #[test]
    fn euclidean_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let h = 1e-6;
        for _ in 0..100 {
            let dim = 4;
            let u: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            if euclidean_distance(&u, &v) < 1e-3 {
                continue;
            }
            let mut gu = vec![0.0; dim];
            let mut gv = vec![0.0; dim];
            euclidean_dist_grad_into(&u, &v, &mut gu, &mut gv);
            for i in 0..dim {
                let mut up = u.clone();
                up[i] += h;
                let mut um = u.clone();
                um[i] -= h;
                let fd = (euclidean_distance(&up, &v) - euclidean_distance(&um, &v)) / (2.0 * h);
                assert!((gu[i] - fd).abs() < 1e-5);
                assert!((gv[i] + gu[i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rsgd_zero_gradient_is_identity() {
        let mut p = vec![0.3, -0.2, 0.1];
        let before = p.clone();
        rsgd_update(&mut p, &[0.0, 0.0, 0.0], 0.5, 1e-5);
        assert_eq!(p, before);
    }

    #[test]
    fn rsgd_origin_scales_by_quarter() {
        // at the origin the inverse metric factor is exactly 1/4
        let mut p = vec![0.0, 0.0];
        let g = [0.8, -0.4];
        let lr = 0.1;
        rsgd_update(&mut p, &g, lr, 1e-5);
        assert!((p[0] - (-lr * g[0] / 4.0)).abs() < 1e-15);
        assert!((p[1] - (-lr * g[1] / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn rsgd_projects_escaping_updates() {
        let eps = 1e-5;
        let mut p = vec![0.96, 0.0];
        // large gradient pushing outward
        rsgd_update(&mut p, &[-1e6, 0.0], 1.0, eps);
        let n = norm(&p);
        assert!(n <= 1.0 - eps);
        assert!((n - (1.0 - eps)).abs() < 1e-9);
    }

    #[test]
    fn projection_is_noop_inside() {
        let mut p = vec![0.1, 0.2];
        let before = p.clone();
        project_into_ball(&mut p, 1e-5);
        assert_eq!(p, before);
    }
}
