//! Linearized flow of the Weinstein handle along its core orbit.

use nalgebra::{Matrix2, Matrix4, Vector2};
use serde::Serialize;

use super::formulas::cz_hyperbolic;

pub fn generator() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.5, 0.0, 0.0, //
        -0.5, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, 2.0, 0.0,
    )
}

/// Block-diagonal `J₀ ⊕ J₀` with `J₀ = [[0, 1], [−1, 0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Closed form of `exp(tA)`.
pub fn weinstein_flow(t: f64) -> Matrix4<f64> {
    let (s, c) = (t / 2.0).sin_cos();
    let r = std::f64::consts::SQRT_2;
    let (sh, ch) = ((r * t).sinh(), (r * t).cosh());
    Matrix4::new(
        c, s, 0.0, 0.0, //
        -s, c, 0.0, 0.0, //
        0.0, 0.0, ch, sh / r, //
        0.0, 0.0, r * sh, ch,
    )
}

pub fn lower_block(phi: &Matrix4<f64>) -> Matrix2<f64> {
    phi.fixed_view::<2, 2>(2, 2).into_owned()
}

fn inf_norm(m: &Matrix4<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Errors are relative to `max(1, ‖Φ‖∞)` (squared for the symplectic
/// identity), since entries grow like `e^{√2 t}`.
#[derive(Debug, Clone, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub derivative_err: f64,
    pub symplectic_err: f64,
    pub expm_err: f64,
    pub group_err: f64,
    /// `Φ(t)Φ(−t) = I`; at `t = 0` this is `Φ(0) = I`.
    pub identity_err: f64,
    pub lower_eigenvalues: Option<(f64, f64)>,
    pub eigenvalue_err: f64,
    pub eigenline_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub samples: Vec<FlowSample>,
    pub tolerance: f64,
    /// Central differences carry `O(h²)` truncation and `O(ε/h)` rounding,
    /// so they get a looser bound.
    pub fd_tolerance: f64,
    /// Rotation of the unstable eigenline over one period, in half-turns.
    pub winding: i64,
    pub cz: i64,
}

impl FlowReport {
    pub fn max_err(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| [s.symplectic_err, s.expm_err, s.group_err, s.identity_err, s.eigenvalue_err, s.eigenline_err])
            .fold(0.0, f64::max)
    }

    pub fn max_fd_err(&self) -> f64 {
        self.samples.iter().map(|s| s.derivative_err).fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_err() <= self.tolerance && self.max_fd_err() <= self.fd_tolerance && self.cz == 0
    }
}

const STEP: f64 = 1e-5;

pub fn sample(t: f64) -> FlowSample {
    let a = generator();
    let j = symplectic_form();
    let phi = weinstein_flow(t);
    let scale = inf_norm(&phi).max(1.0);

    let fd = (weinstein_flow(t + STEP) - weinstein_flow(t - STEP)) / (2.0 * STEP);
    let derivative_err = inf_norm(&(fd - a * phi)) / scale;
    let symplectic_err = inf_norm(&(phi.transpose() * j * phi - j)) / (scale * scale);
    let expm_err = inf_norm(&(phi - (a * t).exp())) / scale;
    let half = weinstein_flow(t / 2.0);
    let group_err = inf_norm(&(half * half - phi)) / scale;
    let identity_err = inf_norm(&(phi * weinstein_flow(-t) - Matrix4::identity())) / (scale * scale);

    let lower = lower_block(&phi);
    let (tr, det) = (lower.trace(), lower.determinant());
    let disc = tr * tr - 4.0 * det;
    let r = std::f64::consts::SQRT_2;
    let (lower_eigenvalues, eigenvalue_err) = if disc > 0.0 {
        let sq = disc.sqrt();
        let (hi, lo) = ((tr + sq) / 2.0, (tr - sq) / 2.0);
        let err = ((hi - (r * t).exp()).abs() / hi.abs().max(1.0)).max((lo - (-r * t).exp()).abs());
        (Some((hi, lo)), err)
    } else {
        (None, if t == 0.0 { 0.0 } else { f64::INFINITY })
    };

    // the eigenlines (1, ±√2) are invariant, so they do not rotate
    let mut eigenline_err: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let v = Vector2::new(1.0, sign * r).normalize();
        let w = lower * v;
        let cross = v.x * w.y - v.y * w.x;
        eigenline_err = eigenline_err.max(cross.abs() / w.norm().max(1.0));
        if w.dot(&v) <= 0.0 {
            eigenline_err = f64::INFINITY;
        }
    }

    FlowSample {
        t,
        derivative_err,
        symplectic_err,
        expm_err,
        group_err,
        identity_err,
        lower_eigenvalues,
        eigenvalue_err,
        eigenline_err,
    }
}

/// Tracks the angle of `Φ(t)v` for an eigenvector `v` of the lower block
/// and counts half-turns.
fn eigenline_winding(ts: &[f64]) -> i64 {
    let v = Vector2::new(1.0, std::f64::consts::SQRT_2);
    let mut total = 0.0;
    let mut prev = v.y.atan2(v.x);
    for &t in ts {
        let w = lower_block(&weinstein_flow(t)) * v;
        let ang = w.y.atan2(w.x);
        let mut d = ang - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
        prev = ang;
    }
    (total / std::f64::consts::PI).round() as i64
}

pub fn flow_report(ts: &[f64], tolerance: f64, fd_tolerance: f64) -> FlowReport {
    let samples: Vec<FlowSample> = ts.iter().map(|&t| sample(t)).collect();
    let winding = eigenline_winding(ts);
    FlowReport {
        samples,
        tolerance,
        fd_tolerance,
        winding,
        cz: cz_hyperbolic(winding),
    }
}

/// `0.1, 0.2, …, 10.0`.
pub fn default_times() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 10.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_expm() {
        let r = flow_report(&default_times(), 1e-9, 1e-6);
        assert!(r.pass(), "max err {} fd {}", r.max_err(), r.max_fd_err());
        assert_eq!(r.cz, 0);
        assert!(r.samples.iter().all(|s| s.lower_eigenvalues.is_some()));
    }

    #[test]
    fn identity_at_zero() {
        assert_eq!(weinstein_flow(0.0), Matrix4::identity());
    }

    #[test]
    fn wrong_sign_is_detected() {
        let mut bad = weinstein_flow(1.0);
        bad[(0, 0)] = -bad[(0, 0)];
        let a = (generator() * 1.0).exp();
        assert!(inf_norm(&(bad - a)) > 0.5);
    }
}
