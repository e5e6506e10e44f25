use nalgebra::SVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::sampled::{frenet_frame, SampledCurve};
use crate::config::Tolerances;
use crate::frames_ode::FrameCurve;
use crate::spin_algebra::UnitQuaternion;

fn random_unit<const M: usize, R: Rng + ?Sized>(rng: &mut R) -> SVector<f64, M> {
    loop {
        let v = SVector::<f64, M>::from_fn(|_, _| rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Number of sign changes of `t ↦ ⟨γ(t), v⟩` along the samples, or `None` if
/// some interior sample lies exactly on the hyperplane.
fn crossings<const M: usize>(points: &[SVector<f64, M>], v: &SVector<f64, M>) -> Option<usize> {
    let last = points.len() - 1;
    let mut prev = 0.0f64;
    let mut count = 0;
    for (i, p) in points.iter().enumerate() {
        let s = p.dot(v);
        if s == 0.0 {
            if i != 0 && i != last {
                return None;
            }
            continue;
        }
        if prev != 0.0 && (s > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = s;
    }
    Some(count)
}

/// Monte-Carlo convexity test on raw samples: `trials` random hyperplanes
/// through the origin each cut the sampled arc at most `n = M − 1` times.
pub fn is_convex_points<const M: usize, R: Rng + ?Sized>(
    points: &[SVector<f64, M>],
    trials: usize,
    rng: &mut R,
) -> bool {
    if points.len() < 2 {
        return true;
    }
    let mut done = 0;
    while done < trials {
        let v = random_unit::<M, R>(rng);
        match crossings(points, &v) {
            Some(c) if c > M - 1 => return false,
            Some(_) => done += 1,
            None => continue,
        }
    }
    true
}

/// Whether the sampled curve is a convex arc, tested against `trials` random hyperplanes.
pub fn is_convex_arc<const M: usize>(curve: &SampledCurve<M>, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    is_convex_points(curve.points(), trials, &mut rng)
}

/// Junction times `0 < t₁ < … < t_{k−1} < 1` of a multiconvex curve of multiplicity `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiconvexity {
    pub multiplicity: usize,
    pub junctions: Vec<f64>,
}

/// Finds the interior times where the Frenet frame returns to `I`, and checks
/// that the curve is a chain of convex arcs between them ending at `F(1) = I`.
pub fn multiconvex_multiplicity(
    curve: &SampledCurve<3>,
    trials: usize,
    seed: u64,
) -> Option<Multiconvexity> {
    let frames: FrameCurve<3, UnitQuaternion> = frenet_frame(curve).ok()?;
    let tol = Tolerances::DEFAULT.frame_identity;
    let grid = curve.grid();
    let n = grid.n();
    let id = nalgebra::Matrix3::<f64>::identity();
    let dist = |i: usize| (frames.frames()[i] - id).amax();
    if dist(n) > tol {
        return None;
    }
    let f: Vec<f64> = frames
        .frames()
        .iter()
        .map(|m| (m - id).norm_squared())
        .collect();
    let mut junctions = Vec::new();
    for i in 1..n {
        if !(f[i] <= f[i - 1] && f[i] < f[i + 1]) || dist(i) > 1e-2 {
            continue;
        }
        // vertex of the parabola through the three samples of ‖F − I‖²
        let (a, b, c) = (f[i - 1], f[i], f[i + 1]);
        let curv = a - 2.0 * b + c;
        let (shift, fmin) = if curv > 0.0 {
            let d = (a - c) / (2.0 * curv);
            (d, b - (a - c) * d / 4.0)
        } else {
            (0.0, b)
        };
        if fmin.max(0.0).sqrt() < tol {
            junctions.push(grid.t(i) + shift * grid.h());
        }
    }
    let mut cuts = vec![0usize];
    cuts.extend(junctions.iter().map(|&t| grid.nearest(t)));
    cuts.push(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for w in cuts.windows(2) {
        if !is_convex_points(&curve.points()[w[0]..=w[1]], trials, &mut rng) {
            return None;
        }
    }
    Some(Multiconvexity {
        multiplicity: junctions.len() + 1,
        junctions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::families::sigma;
    use crate::curves::Grid;
    use std::f64::consts::PI;

    #[test]
    fn circles_and_doubled_circles() {
        let grid = Grid::new(512).unwrap();
        for &c in &[PI / 2.0, PI, 1.5 * PI] {
            assert!(is_convex_arc(&sigma(c, 1.0, grid).unwrap(), 2000, 1));
            assert!(!is_convex_arc(&sigma(c, 2.0, grid).unwrap(), 2000, 1));
        }
    }

    #[test]
    fn multiplicities() {
        let grid = Grid::new(1024).unwrap();
        let one = multiconvex_multiplicity(&sigma(PI, 1.0, grid).unwrap(), 1000, 3).unwrap();
        assert_eq!(one.multiplicity, 1);
        let two = multiconvex_multiplicity(&sigma(PI, 2.0, grid).unwrap(), 1000, 3).unwrap();
        assert_eq!(two.multiplicity, 2);
        assert!((two.junctions[0] - 0.5).abs() < 1e-4);
        assert!(multiconvex_multiplicity(&sigma(PI, 0.75, grid).unwrap(), 100, 3).is_none());
    }
}
