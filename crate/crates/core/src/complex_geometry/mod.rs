//! Complex shapes, the reduced gluing system of 7_3, the potential `S` and its critical point.
//!
//! Coordinates follow the three independent tetrahedra of the ideal triangulation:
//! `y = (Y, Z, W)` with `Y, W` in the lower strip `ℝ − i(0, π)` and `Z` in the upper strip.

pub mod reduced;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::specfun::{bloch_wigner, dilog};
use crate::triangulation::ShapeStructure;
use crate::{Error, Result, C64};

pub use reduced::{
    classify_saddle, f_of_t, grad_reduced_potential_v, reduced_potential_v, saddle_polynomial, saddle_polynomial_roots,
    SaddleClass,
};

const I: C64 = C64::new(0.0, 1.0);

/// Orientation signs of the three independent tetrahedra.
pub const SIGNS_73: [i8; 3] = [1, -1, 1];

/// Symmetric quadratic part `Q` of the potential.
pub fn q_matrix() -> Matrix3<f64> {
    Matrix3::new(1.0, -0.5, 0.0, -0.5, 0.0, 0.5, 0.0, 0.5, 0.5)
}

/// Linear part `𝒲` of the potential.
pub fn w_vector() -> Vector3<f64> {
    Vector3::new(-PI, 0.0, PI)
}

/// Shape parameter of an ideal tetrahedron, `Im z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexShape {
    pub z: C64,
}

impl ComplexShape {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("shape {z} is not in the upper half plane")));
        }
        Ok(Self { z })
    }

    pub fn z_prime(&self) -> C64 {
        (C64::new(1.0, 0.0) - self.z).inv()
    }

    pub fn z_dprime(&self) -> C64 {
        (self.z - 1.0) / self.z
    }

    /// Hyperbolic volume `D(z)`.
    pub fn volume(&self) -> f64 {
        bloch_wigner(self.z)
    }
}

/// Shapes whose arguments are `2π a` and whose moduli are the sine-law ratios of `(b, c)`.
pub fn shapes_from_angles(alpha: &ShapeStructure, signs: &[i8]) -> Result<Vec<ComplexShape>> {
    if alpha.shapes.len() != signs.len() {
        return Err(Error::Domain(format!(
            "{} shapes but {} signs",
            alpha.shapes.len(),
            signs.len()
        )));
    }
    alpha
        .shapes
        .iter()
        .zip(signs)
        .map(|(s, &eps)| {
            let (sb, sc) = ((2.0 * PI * s.b).sin(), (2.0 * PI * s.c).sin());
            let inside = |v: f64| v > 0.0 && v < 0.5;
            if !(inside(s.a) && inside(s.b) && inside(s.c)) || sb <= 0.0 || sc <= 0.0 {
                return Err(Error::Domain(format!("flat or invalid tetrahedron {s:?}")));
            }
            let modulus = if eps > 0 { sc / sb } else { sb / sc };
            ComplexShape::new(C64::from_polar(modulus, 2.0 * PI * s.a))
        })
        .collect()
}

/// `ψ(z) = ε (Log z − iπ)` per tetrahedron.
pub fn psi(z: &[ComplexShape; 3], signs: [i8; 3]) -> [C64; 3] {
    std::array::from_fn(|k| f64::from(signs[k]) * (z[k].z.ln() - I * PI))
}

/// Inverse of [`psi`]: `z = −e^{ε y}`.
pub fn psi_inv(y: &[C64; 3], signs: [i8; 3]) -> Result<[ComplexShape; 3]> {
    let z = |k: usize| ComplexShape::new(-(f64::from(signs[k]) * y[k]).exp());
    Ok([z(0)?, z(1)?, z(2)?])
}

/// Whether `y` lies in the product of strips on which `S` is defined.
pub fn in_domain(y: &[C64; 3]) -> bool {
    let lower = |v: C64| v.im > -PI && v.im < 0.0 && v.re.is_finite();
    let upper = |v: C64| v.im > 0.0 && v.im < PI && v.re.is_finite();
    lower(y[0]) && upper(y[1]) && lower(y[2])
}

/// Left-minus-right values of the three reduced gluing/completeness equations.
pub fn gluing_residual(z: &[ComplexShape; 3]) -> [C64; 3] {
    let [z1, z2, z3] = z;
    [
        z3.z.ln() - z1.z_dprime().ln() - z2.z_prime().ln(),
        z3.z.ln() - z1.z.ln() + z2.z_dprime().ln(),
        z1.z.ln() + z2.z_prime().ln() + 3.0 * z3.z_prime().ln() - 2.0 * PI * I,
    ]
}

fn qy(y: &[C64; 3]) -> [C64; 3] {
    let q = q_matrix();
    std::array::from_fn(|r| (0..3).map(|c| y[c] * q[(r, c)]).sum())
}

fn li2m_exp(y: C64) -> Result<C64> {
    dilog(-y.exp())
}

/// `S(y) = i yᵀQy + yᵀ𝒲 + i Li₂(−e^Y) − i Li₂(−e^Z) + 3i Li₂(−e^W)`.
pub fn potential_s(y: &[C64; 3]) -> Result<C64> {
    let q = qy(y);
    let quad: C64 = (0..3).map(|k| y[k] * q[k]).sum();
    let lin: C64 = (0..3).map(|k| y[k] * w_vector()[k]).sum();
    Ok(I * quad + lin + I * (li2m_exp(y[0])? - li2m_exp(y[1])? + 3.0 * li2m_exp(y[2])?))
}

fn log1p_exp(y: C64) -> C64 {
    crate::specfun::log1p_exp(y)
}

pub fn grad_s(y: &[C64; 3]) -> [C64; 3] {
    let q = qy(y);
    let w = w_vector();
    let d = [-log1p_exp(y[0]), log1p_exp(y[1]), -3.0 * log1p_exp(y[2])];
    std::array::from_fn(|k| 2.0 * I * q[k] + w[k] + I * d[k])
}

pub fn hess_s(y: &[C64; 3]) -> Matrix3<C64> {
    let sig = |v: C64| (C64::new(1.0, 0.0) + (-v).exp()).inv();
    let d = [-sig(y[0]), sig(y[1]), -3.0 * sig(y[2])];
    let q = q_matrix();
    Matrix3::from_fn(|r, c| 2.0 * I * q[(r, c)] + if r == c { I * d[r] } else { C64::new(0.0, 0.0) })
}

fn det3(m: &Matrix3<C64>) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// `√det(−H)` continued from the positive root at `Re(−H)`; along `Re(−H) + t·i Im(−H)` the real
/// part stays positive definite, so the determinant never vanishes.
pub fn gaussian_sqrt_det(h: &Matrix3<C64>) -> C64 {
    let m = -h;
    let re = m.map(|v| C64::new(v.re, 0.0));
    let im = m.map(|v| C64::new(0.0, v.im));
    let mut s = det3(&re).sqrt();
    for k in 1..=256 {
        let t = k as f64 / 256.0;
        let r = det3(&(re + im * C64::new(t, 0.0))).sqrt();
        s = if (r - s).norm() <= (r + s).norm() { r } else { -r };
    }
    s
}

fn norm3(v: &[C64; 3]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Critical point of `S` with the data needed by the saddle-point estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaddleReport {
    pub y0: [C64; 3],
    /// `z₁, z₂, z₃` followed by `z₄ = z₃` and `z₅ = z₃″`.
    pub z0: Vec<C64>,
    #[serde(rename = "S")]
    pub s_value: C64,
    pub volume: f64,
    pub hessian: [[C64; 3]; 3],
    pub det: C64,
    /// `(2π)^{3/2} / √det(−Hess)` with the root of [`gaussian_sqrt_det`].
    pub rho: C64,
    pub grad_norm: f64,
    pub newton_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 50,
        }
    }
}

/// Seed `y = ψ(shapes_from_angles(α))` for the first three tetrahedra.
pub fn seed_from_angles(alpha: &ShapeStructure) -> Result<[C64; 3]> {
    if alpha.shapes.len() < 3 {
        return Err(Error::Domain("need at least three tetrahedra".into()));
    }
    let first = ShapeStructure::new(alpha.shapes[..3].to_vec());
    let z = shapes_from_angles(&first, &SIGNS_73)?;
    Ok(psi(&[z[0], z[1], z[2]], SIGNS_73))
}

/// Newton on `∇S = 0` from the ψ-image of an angle structure.
pub fn solve_gluing(seed: &ShapeStructure) -> Result<SaddleReport> {
    solve_gluing_with(seed, &NewtonConfig::default())
}

pub fn solve_gluing_with(seed: &ShapeStructure, cfg: &NewtonConfig) -> Result<SaddleReport> {
    let y = newton(seed_from_angles(seed)?, cfg)?;
    report_at(y.0, y.1)
}

/// Damped Newton from an explicit starting point; returns the point and the iteration count.
pub fn newton(mut y: [C64; 3], cfg: &NewtonConfig) -> Result<([C64; 3], usize)> {
    if !in_domain(&y) {
        return Err(Error::Domain("Newton seed outside the strip domain".into()));
    }
    let mut g = grad_s(&y);
    let mut gn = norm3(&g);
    for it in 0..cfg.max_iters {
        if gn < cfg.tol {
            return Ok((y, it));
        }
        let h = hess_s(&y);
        let rhs = Vector3::from_column_slice(&g);
        let step = h
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Domain("singular Hessian in Newton".into()))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: [C64; 3] = std::array::from_fn(|k| y[k] - step[k] * t);
            if in_domain(&trial) {
                let gt = grad_s(&trial);
                let gtn = norm3(&gt);
                // near the root ‖∇S‖ stagnates at round-off, so accept full steps there
                if gtn < gn || (t == 1.0 && gtn < 1e3 * cfg.tol) {
                    y = trial;
                    g = gt;
                    gn = gtn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if gn < cfg.tol {
        return Ok((y, cfg.max_iters));
    }
    Err(Error::NonConvergence {
        what: "gluing Newton",
        iters: cfg.max_iters,
        residual: gn,
    })
}

/// Assemble the report at a critical point.
pub fn report_at(y0: [C64; 3], newton_iters: usize) -> Result<SaddleReport> {
    let z = psi_inv(&y0, SIGNS_73)?;
    let s_value = potential_s(&y0)?;
    let h = hess_s(&y0);
    let det = det3(&h);
    if det.norm() == 0.0 {
        return Err(Error::Domain("degenerate Hessian at the critical point".into()));
    }
    let volume = -s_value.re;
    if !(volume > 0.0) {
        return Err(Error::Domain(format!("critical point has volume {volume}")));
    }
    let rho = (2.0 * PI).powf(1.5) / gaussian_sqrt_det(&h);
    Ok(SaddleReport {
        y0,
        z0: vec![z[0].z, z[1].z, z[2].z, z[2].z, z[2].z_dprime()],
        s_value,
        volume,
        hessian: std::array::from_fn(|r| std::array::from_fn(|c| h[(r, c)])),
        det,
        rho,
        grad_norm: norm3(&grad_s(&y0)),
        newton_iters,
    })
}

/// `D(z₁) + D(z₂) + 3 D(z₃)`.
pub fn shape_volume(z: &[ComplexShape; 3]) -> f64 {
    z[0].volume() + z[1].volume() + 3.0 * z[2].volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle_opt::{maximize_volume, OptimizerConfig};
    use crate::triangulation::builtin_ideal_73;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alpha0() -> ShapeStructure {
        maximize_volume(&builtin_ideal_73(), &OptimizerConfig::default()).unwrap()
    }

    fn random_y(rng: &mut ChaCha8Rng) -> [C64; 3] {
        let mut s = |lo: f64, hi: f64| C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(lo..hi));
        [s(-PI + 0.05, -0.05), s(0.05, PI - 0.05), s(-PI + 0.05, -0.05)]
    }

    #[test]
    fn equilateral_shape() {
        let s = ShapeStructure::uniform(1, crate::triangulation::TetShape::new(1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0));
        for eps in [1, -1] {
            let z = shapes_from_angles(&s, &[eps]).unwrap()[0].z;
            assert!((z - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn flat_tetrahedron_is_refused() {
        let s = ShapeStructure::uniform(1, crate::triangulation::TetShape::new(0.5, 0.0, 0.0));
        assert!(shapes_from_angles(&s, &[1]).is_err());
    }

    #[test]
    fn regular_shapes_do_not_glue() {
        let z = ComplexShape::new(C64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!(norm3(&gluing_residual(&[z, z, z])) > 0.1);
    }

    #[test]
    fn saddle_of_7_3() {
        let a = alpha0();
        let r = solve_gluing(&a).unwrap();
        assert!(r.newton_iters <= 10, "{}", r.newton_iters);
        assert!(r.grad_norm < 1e-12);
        assert!((r.volume - crate::VOL_7_3).abs() < 1e-8, "{}", r.volume);
        let z = psi_inv(&r.y0, SIGNS_73).unwrap();
        assert!(norm3(&gluing_residual(&z)) < 1e-11);
        assert!((shape_volume(&z) - r.volume).abs() < 1e-10);
        let s = &a.shapes;
        let expect = [
            -PI * (1.0 - 2.0 * s[0].a),
            PI * (1.0 - 2.0 * s[1].a),
            -PI * (1.0 - 2.0 * s[2].a),
        ];
        for k in 0..3 {
            assert!((r.y0[k].im - expect[k]).abs() < 1e-8, "{k}");
        }
        // completeness: meridian z₄ = z₃ and longitude z₅ = z₃″ hold by construction
        let z5 = ComplexShape::new(r.z0[4]).unwrap();
        assert!((z5.z - z[2].z_dprime()).norm() < 1e-15);
    }

    #[test]
    fn perturbed_seed_reaches_same_point() {
        let a = alpha0();
        let r0 = solve_gluing(&a).unwrap();
        let t = builtin_ideal_73();
        let poly = crate::angle_opt::AnglePolytope::new(&t, |_| 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let u: Vec<f64> = (0..poly.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d = poly.direction(&u);
            let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x: Vec<f64> = a.to_flat().iter().zip(&d).map(|(x, d)| x + 1e-2 * d / n).collect();
            assert!(poly.is_interior(&x));
            let r = solve_gluing(&ShapeStructure::from_flat(&x)).unwrap();
            for k in 0..3 {
                assert!((r.y0[k] - r0.y0[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..20 {
            let y = random_y(&mut rng);
            let g = grad_s(&y);
            for k in 0..3 {
                let mut p = y;
                let mut m = y;
                p[k] += h;
                m[k] -= h;
                let fd = (potential_s(&p).unwrap() - potential_s(&m).unwrap()) / (2.0 * h);
                assert!((fd - g[k]).norm() < 1e-6, "{k} {fd} {}", g[k]);
            }
            let hs = hess_s(&y);
            for k in 0..3 {
                let mut p = y;
                let mut m = y;
                p[k] += h;
                m[k] -= h;
                let (gp, gm) = (grad_s(&p), grad_s(&m));
                for r in 0..3 {
                    assert!(((gp[r] - gm[r]) / (2.0 * h) - hs[(r, k)]).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn rewritten_potential_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let y = random_y(&mut rng);
            let q = qy(&y);
            let quad: C64 = (0..3).map(|k| y[k] * q[k]).sum();
            let lin: C64 = (0..3).map(|k| y[k] * w_vector()[k]).sum();
            let alt = I * dilog(-y[0].exp()).unwrap()
                + I * dilog(-(-y[1]).exp()).unwrap()
                + 3.0 * I * dilog(-y[2].exp()).unwrap()
                + I * quad
                + I * y[1] * y[1] / 2.0
                + lin
                + I * PI * PI / 6.0;
            assert!((alt - potential_s(&y).unwrap()).norm() < 1e-11);
        }
    }

    #[test]
    fn hessian_is_nondegenerate_and_real_part_concave() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let y = random_y(&mut rng);
            assert!(det3(&hess_s(&y)).norm() > 1e-12);
        }
        let y0 = solve_gluing(&alpha0()).unwrap().y0;
        for _ in 0..100 {
            let y: [C64; 3] = std::array::from_fn(|k| C64::new(rng.gen_range(-8.0..8.0), y0[k].im));
            let re = hess_s(&y).map(|v| v.re);
            for k in 0..3 {
                assert!(re[(k, k)] < 0.0);
            }
            assert!(re.symmetric_eigen().eigenvalues.max() < 0.0);
        }
    }

    #[test]
    fn gaussian_root_follows_the_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            // −H = Rᵀ D R with a real rotation and Re D > 0
            let d: Vec<C64> = (0..3)
                .map(|_| C64::new(rng.gen_range(0.1..3.0), rng.gen_range(-8.0..8.0)))
                .collect();
            let (a, b, c) = (
                rng.gen_range(0.0..6.3),
                rng.gen_range(0.0..6.3),
                rng.gen_range(0.0..6.3),
            );
            let r = nalgebra::Rotation3::from_euler_angles(a, b, c)
                .into_inner()
                .map(|v| C64::new(v, 0.0));
            let m = r.transpose() * Matrix3::from_diagonal(&nalgebra::Vector3::new(d[0], d[1], d[2])) * r;
            let expect: C64 = d.iter().map(|v| v.sqrt()).product();
            assert!((gaussian_sqrt_det(&(-m)) - expect).norm() < 1e-10 * expect.norm());
        }
        let h = hess_s(&solve_gluing(&alpha0()).unwrap().y0);
        let s = gaussian_sqrt_det(&h);
        assert!((s * s + det3(&h)).norm() < 1e-12 * det3(&h).norm());
    }

    #[test]
    fn real_part_is_maximal_at_the_saddle_on_its_contour() {
        let y0 = solve_gluing(&alpha0()).unwrap().y0;
        let s0 = potential_s(&y0).unwrap().re;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100_000 {
            let r = if rng.gen_bool(0.5) { 0.5 } else { 20.0 };
            let y: [C64; 3] = std::array::from_fn(|k| y0[k] + rng.gen_range(-r..r));
            assert!(potential_s(&y).unwrap().re < s0);
        }
    }

    #[test]
    fn critical_points_are_gluing_solutions() {
        let y0 = solve_gluing(&alpha0()).unwrap().y0;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let y: [C64; 3] =
                std::array::from_fn(|k| y0[k] + C64::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)));
            let z = psi_inv(&y, SIGNS_73).unwrap();
            let r = norm3(&gluing_residual(&z));
            let g = norm3(&grad_s(&y));
            // both vanish only at y⁰, and they are comparable in size nearby
            assert!(r > 1e-4 && g > 1e-4);
            assert!(r / g < 10.0 && g / r < 10.0, "{r} {g}");
        }
        let z0 = psi_inv(&y0, SIGNS_73).unwrap();
        assert!(norm3(&gluing_residual(&z0)) < 1e-11);
    }

    proptest! {
        #[test]
        fn triple_product(re in -5.0f64..5.0, im in 1e-3f64..5.0) {
            let s = ComplexShape::new(C64::new(re, im)).unwrap();
            let p = s.z * s.z_prime() * s.z_dprime();
            prop_assert!((p + 1.0).norm() < 1e-12 * (1.0 + s.z.norm_sqr()));
            let l = s.z.ln() + s.z_prime().ln() + s.z_dprime().ln();
            prop_assert!((l - I * PI).norm() < 1e-12);
        }

        #[test]
        fn psi_round_trip(re in -5.0f64..5.0, im in 1e-3f64..5.0, e0 in any::<bool>(), e1 in any::<bool>()) {
            let s = ComplexShape::new(C64::new(re, im)).unwrap();
            let signs = [if e0 { 1 } else { -1 }, if e1 { 1 } else { -1 }, 1];
            let y = psi(&[s, s, s], signs);
            let back = psi_inv(&y, signs).unwrap();
            for b in back {
                prop_assert!((b.z - s.z).norm() < 1e-12 * (1.0 + s.z.norm()));
            }
        }
    }
}
