use alloc::format;
use alloc::sync::Arc;

use crate::error::{Error, Result};
use crate::gepup::{constant_field, CaseDefinition, ExactSolution};
use crate::math::{cos, exp, sin, sqrt, PI};
use crate::mesh::RectDomain;

/// Benchmark identifiers accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    TaylorGreen,
    SingleVortex,
    LidCavity,
    Zero,
}

impl CaseId {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "taylor-green" | "tg" => Ok(CaseId::TaylorGreen),
            "single-vortex" | "vortex" => Ok(CaseId::SingleVortex),
            "lid-cavity" | "cavity" => Ok(CaseId::LidCavity),
            "zero" | "rest" => Ok(CaseId::Zero),
            _ => Err(Error::InvalidArgument(format!(
                "unknown case '{s}' (expected taylor-green, single-vortex, lid-cavity or zero)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseId::TaylorGreen => "taylor-green",
            CaseId::SingleVortex => "single-vortex",
            CaseId::LidCavity => "lid-cavity",
            CaseId::Zero => "zero",
        }
    }

    pub fn build(self, re: f64) -> Result<CaseDefinition> {
        match self {
            CaseId::TaylorGreen => taylor_green_case(re),
            CaseId::SingleVortex => single_vortex_case(re),
            CaseId::LidCavity => lid_cavity_case(re),
            CaseId::Zero => Ok(zero_case(1.0 / re)),
        }
    }
}

impl core::fmt::Display for CaseId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_re(re: f64) -> Result<()> {
    if re > 0.0 && re.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Reynolds number must be positive, got {re}"
        )))
    }
}

/// Decaying Taylor-Green vortex on the unit square with its exact solution.
pub fn taylor_green_case(re: f64) -> Result<CaseDefinition> {
    check_re(re)?;
    let velocity = move |p: [f64; 2], t: f64| {
        let e = exp(-2.0 * PI * PI * t / re);
        let (x, y) = (PI * p[0], PI * p[1]);
        [-e * cos(x) * sin(y), e * sin(x) * cos(y)]
    };
    let velocity_gradient = move |p: [f64; 2], t: f64| {
        let e = PI * exp(-2.0 * PI * PI * t / re);
        let (x, y) = (PI * p[0], PI * p[1]);
        [
            [e * sin(x) * sin(y), -e * cos(x) * cos(y)],
            [e * cos(x) * cos(y), -e * sin(x) * sin(y)],
        ]
    };
    let pressure = move |p: [f64; 2], t: f64| {
        -0.25 * exp(-4.0 * PI * PI * t / re) * (cos(2.0 * PI * p[0]) + cos(2.0 * PI * p[1]))
    };
    let pressure_gradient = move |p: [f64; 2], t: f64| {
        let s = 0.5 * PI * exp(-4.0 * PI * PI * t / re);
        [s * sin(2.0 * PI * p[0]), s * sin(2.0 * PI * p[1])]
    };
    let rate = -2.0 * PI * PI / re;
    Ok(CaseDefinition {
        name: "taylor-green".into(),
        domain: RectDomain::unit_square(),
        nu: 1.0 / re,
        forcing: constant_field([0.0, 0.0]),
        boundary: Arc::new(velocity),
        boundary_dt: Arc::new(move |p, t| {
            let g = velocity(p, t);
            [rate * g[0], rate * g[1]]
        }),
        initial: Arc::new(move |p| velocity(p, 0.0)),
        exact: Some(ExactSolution {
            velocity: Arc::new(velocity),
            velocity_gradient: Arc::new(velocity_gradient),
            pressure: Arc::new(pressure),
            pressure_gradient: Arc::new(pressure_gradient),
        }),
    })
}

pub const VORTEX_RADIUS: f64 = 0.2;
pub const VORTEX_CENTER: [f64; 2] = [0.5, 0.5];
/// Peak azimuthal speed, reached at `r = R`.
pub const VORTEX_PEAK_SPEED: f64 = 0.068;

/// Azimuthal speed of the single vortex at distance `r` from its center.
pub fn vortex_profile(r: f64) -> f64 {
    let big_r = VORTEX_RADIUS;
    if r < big_r {
        0.5 * r - 4.0 * r * r * r
    } else {
        big_r / r * (0.5 * big_r - 4.0 * big_r * big_r * big_r)
    }
}

/// Counterclockwise axisymmetric vortex in a no-slip box, `ν = U∞/Re`.
pub fn single_vortex_case(re: f64) -> Result<CaseDefinition> {
    check_re(re)?;
    Ok(CaseDefinition {
        name: "single-vortex".into(),
        domain: RectDomain::unit_square(),
        nu: VORTEX_PEAK_SPEED / re,
        forcing: constant_field([0.0, 0.0]),
        boundary: constant_field([0.0, 0.0]),
        boundary_dt: constant_field([0.0, 0.0]),
        initial: Arc::new(|p| {
            let (dx, dy) = (p[0] - VORTEX_CENTER[0], p[1] - VORTEX_CENTER[1]);
            let r = sqrt(dx * dx + dy * dy);
            if r == 0.0 {
                return [0.0, 0.0];
            }
            let s = vortex_profile(r) / r;
            [-s * dy, s * dx]
        }),
        exact: None,
    })
}

/// Impulsively started lid-driven cavity; the lid corners are wall points.
pub fn lid_cavity_case(re: f64) -> Result<CaseDefinition> {
    check_re(re)?;
    Ok(CaseDefinition {
        name: "lid-cavity".into(),
        domain: RectDomain::unit_square(),
        nu: 1.0 / re,
        forcing: constant_field([0.0, 0.0]),
        boundary: Arc::new(|p, _| {
            let on_lid = p[1] >= 1.0 - 1e-12 && p[0] > 1e-12 && p[0] < 1.0 - 1e-12;
            [if on_lid { 1.0 } else { 0.0 }, 0.0]
        }),
        boundary_dt: constant_field([0.0, 0.0]),
        initial: Arc::new(|_| [0.0, 0.0]),
        exact: None,
    })
}

/// Fluid at rest with no forcing.
pub fn zero_case(nu: f64) -> CaseDefinition {
    let zero = |_: [f64; 2], _: f64| 0.0;
    CaseDefinition {
        name: "zero".into(),
        domain: RectDomain::unit_square(),
        nu,
        forcing: constant_field([0.0, 0.0]),
        boundary: constant_field([0.0, 0.0]),
        boundary_dt: constant_field([0.0, 0.0]),
        initial: Arc::new(|_| [0.0, 0.0]),
        exact: Some(ExactSolution {
            velocity: constant_field([0.0, 0.0]),
            velocity_gradient: Arc::new(|_, _| [[0.0; 2]; 2]),
            pressure: Arc::new(zero),
            pressure_gradient: Arc::new(|_, _| [0.0, 0.0]),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{integrate, FeSpace};
    use crate::mesh::StructuredQuadMesh;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn taylor_green_values() {
        let c = taylor_green_case(100.0).unwrap();
        let ex = c.exact.clone().unwrap();
        for t in [0.0, 0.3] {
            let u = (ex.velocity)([0.5, 0.5], t);
            assert!(u[0].abs() < 1e-15 && u[1].abs() < 1e-15);
        }
        let u = (ex.velocity)([0.0, 0.5], 0.0);
        assert!(close(u[0], -1.0) && close(u[1], 0.0));
        assert!(close((ex.pressure)([0.0, 0.0], 0.0), -0.5));
        let s = FeSpace::new(StructuredQuadMesh::new(c.domain, [1, 1], 3).unwrap(), 3).unwrap();
        assert!(integrate(&s, |p| (ex.pressure)(p, 0.0)).abs() < 1e-14);
        assert_eq!(c.nu, 0.01);
        assert!(c.check_compatibility(&s, &[0.0, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn taylor_green_satisfies_momentum_equation() {
        // ∂u/∂t + u·∇u + ∇p − νΔu = 0 by central differences
        let re = 100.0;
        let c = taylor_green_case(re).unwrap();
        let ex = c.exact.unwrap();
        let (h, t) = (1e-4, 0.2);
        for p in [[0.3, 0.7], [0.61, 0.12]] {
            let u = (ex.velocity)(p, t);
            let g = (ex.velocity_gradient)(p, t);
            let gp = (ex.pressure_gradient)(p, t);
            let ut = (ex.velocity)(p, t + h);
            let um = (ex.velocity)(p, t - h);
            let lap = |d: usize| {
                let f = |q: [f64; 2]| (ex.velocity)(q, t)[d];
                (f([p[0] + h, p[1]])
                    + f([p[0] - h, p[1]])
                    + f([p[0], p[1] + h])
                    + f([p[0], p[1] - h])
                    - 4.0 * f(p))
                    / (h * h)
            };
            for d in 0..2 {
                let dt = (ut[d] - um[d]) / (2.0 * h);
                let conv = u[0] * g[d][0] + u[1] * g[d][1];
                let res = dt + conv + gp[d] - lap(d) / re;
                assert!(res.abs() < 1e-5, "{res}");
            }
            let div = g[0][0] + g[1][1];
            assert!(div.abs() < 1e-14);
            let fd = ((ex.pressure)([p[0] + h, p[1]], t) - (ex.pressure)([p[0] - h, p[1]], t))
                / (2.0 * h);
            assert!((fd - gp[0]).abs() < 1e-6);
        }
        let g = (c.boundary_dt)([0.0, 0.5], 0.0);
        assert!(close(g[0], 2.0 * PI * PI / re));
    }

    #[test]
    fn single_vortex_profile() {
        let c = single_vortex_case(5000.0).unwrap();
        assert_eq!((c.initial)([0.5, 0.5]), [0.0, 0.0]);
        assert!(close(vortex_profile(0.2), 0.068));
        assert!(close(vortex_profile(0.4), 0.034));
        // counterclockwise: at (0.5 + r, 0.5) the velocity points in +y
        let u = (c.initial)([0.6, 0.5]);
        assert!(u[0].abs() < 1e-16 && close(u[1], vortex_profile(0.1)));
        assert!(close(c.nu, 0.068 / 5000.0));
    }

    #[test]
    fn lid_cavity_boundary() {
        let c = lid_cavity_case(1000.0).unwrap();
        assert_eq!((c.boundary)([0.5, 1.0], 0.0), [1.0, 0.0]);
        assert_eq!((c.boundary)([0.5, 0.0], 0.0), [0.0, 0.0]);
        assert_eq!((c.boundary)([0.0, 1.0], 0.0), [0.0, 0.0]);
        assert_eq!((c.boundary)([1.0, 1.0], 0.0), [0.0, 0.0]);
        assert_eq!((c.initial)([0.3, 0.3]), [0.0, 0.0]);
        let s = FeSpace::new(StructuredQuadMesh::new(c.domain, [1, 1], 2).unwrap(), 2).unwrap();
        assert!(c.check_compatibility(&s, &[0.0]).is_ok());
    }

    #[test]
    fn bad_reynolds_and_ids() {
        assert!(taylor_green_case(0.0).is_err());
        assert!(single_vortex_case(f64::NAN).is_err());
        assert_eq!(CaseId::parse("Taylor_Green").unwrap(), CaseId::TaylorGreen);
        assert!(CaseId::parse("channel").is_err());
    }
}
