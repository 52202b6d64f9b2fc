//! End-to-end runs over a sampled surface: verification of the forward
//! direction, synthesis followed by recovery, and grid-refinement studies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bonnet::{
    differentials, fundamental_forms, omega_wedge_x, quaternionic_check, synthesize,
    verify_theorem2, BonnetPairPatch,
};
use crate::catalog::{
    analytic_closure, christoffel_omega, quadratic_differential, sample, DerivativeMode,
    IsothermicPatch, SampledPatch, Surface,
};
use crate::charts::{d_scalar, Field, GridChart, OneForm, TwoForm};
use crate::error::{Error, Result};
use crate::exec;
use crate::exterior4::{wedge, Bivector4, Vec4};
use crate::lightcone::{assemble_eta_within, eta_closure_residual_within, theorem1_residual, ORTHOGONALITY_TOL};
use crate::recovery::{recover_isothermic, Recovered, Reference};
use crate::report::{Check, Report, Stats};
use crate::tolerances::{differential_tolerance, Tolerances};

/// Surface, quadratic differential, chart and derivative source of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub surface: Surface,
    pub c: Complex64,
    pub chart: GridChart,
    pub deriv: DerivativeMode,
}

impl Setup {
    /// Clifford torus, `c = 1`, `[0, π]²` on 65×65 nodes, analytic derivatives.
    pub fn default_torus() -> Setup {
        Setup {
            surface: Surface::homogeneous_torus(std::f64::consts::FRAC_1_SQRT_2).expect("valid radius"),
            c: Complex64::new(1.0, 0.0),
            chart: GridChart::new(0.0, std::f64::consts::PI, 0.0, std::f64::consts::PI, 65, 65)
                .expect("valid chart"),
            deriv: DerivativeMode::Analytic,
        }
    }

    pub fn with_chart(mut self, chart: GridChart) -> Setup {
        self.chart = chart;
        self
    }

    pub fn patch(&self) -> Result<IsothermicPatch> {
        IsothermicPatch::new(self.surface, self.c)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::new(self.deriv, self.chart.h())
    }
}

/// Sampled surface with its Christoffel-dual 1-form.
pub struct Prepared {
    pub patch: IsothermicPatch,
    pub sp: SampledPatch,
    pub omega: OneForm<Vec4>,
}

pub fn prepare(setup: &Setup) -> Result<Prepared> {
    let patch = setup.patch()?;
    let sp = sample(&patch, &setup.chart, setup.deriv);
    let omega = christoffel_omega(&sp)?;
    Ok(Prepared { patch, sp, omega })
}

fn stats_of<T>(items: &[T], f: impl Fn(&T) -> f64) -> Stats {
    Stats::of(&items.iter().map(f).collect::<Vec<_>>())
}

/// Pointwise identities of the retraction form plus its finite-difference
/// closure.
pub fn retraction_checks(p: &Prepared, tol: &Tolerances) -> Result<Report> {
    let (sp, omega) = (&p.sp, &p.omega);
    let chart = sp.chart;
    let mut report = Report::default();
    let eta = assemble_eta_within(omega, &sp.x, ORTHOGONALITY_TOL.max(tol.get("omega_perp_x")))?;
    let closure = eta_closure_residual_within(&eta, &sp.dx, &chart, sp.closure_margin());
    report.push(Check::new("omega_wedge_dx", closure.omega_wedge_dx, tol.get("omega_wedge_dx")));

    let q = quadratic_differential(sp.c);
    let per_node = exec::map_range(chart.len(), |k| {
        let (ou, ov) = omega.at(k);
        let (xu, xv) = sp.dx.at(k);
        let (x, n) = (sp.x.data[k], sp.n.data[k]);
        let pairing = [[ou.dot(&xu), ou.dot(&xv)], [ov.dot(&xu), ov.dot(&xv)]];
        let expected = q.as_matrix();
        let mut worst = 0.0_f64;
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max((pairing[a][b] - expected[a][b]).abs());
            }
        }
        [
            ou.dot(&x).abs().max(ov.dot(&x).abs()),
            ou.dot(&n).abs().max(ov.dot(&n).abs()),
            worst,
        ]
    });
    for (i, name) in ["omega_perp_x", "omega_perp_n", "christoffel_pairing"].iter().enumerate() {
        report.push(Check::new(*name, stats_of(&per_node, |v| v[i]), tol.get(name)));
    }

    let q_field = Field::from_nodes(&chart, |_| q);
    report.push(Check::new("retraction_identity", theorem1_residual(&eta, &sp.x, &sp.dx, &q_field), tol.get("retraction_identity")));

    let h = chart.h();
    let scale = omega.max_magnitude();
    report.push(Check::new("d_omega", closure.d_omega, differential_tolerance(scale, h)));
    report.push(Check::new("d_eta", closure.d_eta, differential_tolerance(scale, h)));

    // d(ω∧x) = dω∧x − ω⋏dx, compared against the directly differentiated
    // coefficient. With analytic second derivatives both sides are exact.
    if tol.mode == DerivativeMode::Analytic {
        let exact = analytic_closure(&p.patch, &chart);
        let routes = exec::map_range(chart.len(), |k| {
            let (ou, ov) = omega.at(k);
            let (xu, xv) = sp.dx.at(k);
            let via_product = wedge(&exact.d_omega.coeff.data[k], &sp.x.data[k])
                - (wedge(&ou, &xv) - wedge(&ov, &xu));
            (via_product - exact.d_omega_wedge_x.coeff.data[k]).norm()
        });
        report.push(Check::new("closure_routes", Stats::of(&routes), 1e-12));
    }
    Ok(report)
}

/// Everything checked by `verify`: the forward direction, the quaternionic
/// formulas, the retraction form and, when `ω∧x` is closed, the integrated
/// pair.
pub fn verify(setup: &Setup) -> Result<Report> {
    let p = prepare(setup)?;
    let tol = setup.tolerances();
    let d = differentials(&p.sp, &p.omega);
    let forms = fundamental_forms(&d);
    let mut report = verify_theorem2(&d, &forms, &p.sp, &p.omega, &tol);
    report.extend(quaternionic_check(&d, &p.sp, &p.omega, &tol));
    report.extend(retraction_checks(&p, &tol)?);
    match synthesize(&p.sp, &p.omega, Bivector4::ZERO) {
        Ok(pair) => report.extend(integration_checks(&pair, p.sp.closure_margin())),
        Err(Error::NotClosed { residual, tolerance }) => {
            report.push(Check::new("closure_gate", Stats { max: residual, mean: residual }, tolerance));
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Closure gate, loop defects and `d_scalar(F)` against the stored `dF`,
/// the latter on nodes at least `margin` from the boundary.
pub fn integration_checks(pair: &BonnetPairPatch, margin: usize) -> Report {
    let chart = *pair.chart();
    let h = chart.h();
    let dfp = &pair.diff.dfp;
    let dfm = &pair.diff.dfm;
    let df = OneForm {
        du: Field::from_nodes(&chart, |k| dfp.du.data[k] + dfm.du.data[k]),
        dv: Field::from_nodes(&chart, |k| dfp.dv.data[k] + dfm.dv.data[k]),
    };
    let scale = df.max_magnitude();
    let gate = crate::charts::closure_tolerance(&df, &chart);
    let mut report = Report::default();
    report.push(Check::new(
        "closure_gate",
        Stats { max: pair.closure_residual, mean: pair.closure_residual },
        gate,
    ));
    report.push(Check::new(
        "loop_defect",
        Stats { max: pair.worst_loop_defect, mean: pair.worst_loop_defect },
        10.0 * h * h * h * scale.max(1.0),
    ));
    let numeric = d_scalar(&pair.f, &chart);
    let consistency = TwoForm {
        coeff: Field::from_nodes(&chart, |k| {
            let (a, b) = (numeric.at(k), df.at(k));
            (a.0 - b.0).norm().max((a.1 - b.1).norm())
        }),
    }
    .interior(margin);
    report.push(Check::new(
        "integrated_dF_consistency",
        Stats::of(&consistency),
        differential_tolerance(scale, h),
    ));
    report
}

/// Synthesis followed by recovery, with deviations against the catalog
/// surface.
pub fn roundtrip(setup: &Setup) -> Result<(BonnetPairPatch, Recovered)> {
    let p = prepare(setup)?;
    let pair = synthesize(&p.sp, &p.omega, Bivector4::ZERO)?;
    let reference = Reference { x: &p.sp.x, n: &p.sp.n, omega: &p.omega };
    let rec = recover_isothermic(&pair.diff, Some(&reference), &setup.tolerances())?;
    Ok((pair, rec))
}

/// Differential checks whose residuals shrink like `h²`.
pub const DIFFERENTIAL_CHECKS: [&str; 3] = ["d_omega", "d_eta", "integrated_dF_consistency"];

/// Acceptance band for the ratio of residuals between `h` and `h/2`.
pub const RICHARDSON_BAND: (f64, f64) = (3.2, 4.8);

/// Residuals below this multiple of `f64::EPSILON·scale` are roundoff, not
/// truncation error, and yield no ratio.
const ROUNDOFF_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`, absent when the coarse residual is at roundoff.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub coarse: Report,
    pub fine: Report,
    pub ratios: Vec<Ratio>,
}

impl Convergence {
    /// One check per resolved ratio: `|ratio − 4|` against the band half-width.
    pub fn ratio_checks(&self) -> Report {
        let mid = 0.5 * (RICHARDSON_BAND.0 + RICHARDSON_BAND.1);
        let half = 0.5 * (RICHARDSON_BAND.1 - RICHARDSON_BAND.0);
        let mut report = Report::default();
        for r in &self.ratios {
            if let Some(ratio) = r.ratio {
                let dev = (ratio - mid).abs();
                report.push(Check::new(format!("richardson_{}", r.name), Stats { max: dev, mean: dev }, half));
            }
        }
        report
    }
}

pub fn richardson(coarse: &Report, fine: &Report, names: &[&str], scale: f64) -> Vec<Ratio> {
    names
        .iter()
        .filter_map(|name| {
            let (a, b) = (coarse.get(name)?.max, fine.get(name)?.max);
            let resolved = a > ROUNDOFF_FACTOR * f64::EPSILON * scale.max(1.0);
            Some(Ratio { name: name.to_string(), coarse: a, fine: b, ratio: resolved.then(|| a / b) })
        })
        .collect()
}

/// Verification on the chart and on its refinement `h → h/2`.
pub fn converge(setup: &Setup) -> Result<Convergence> {
    let coarse = verify(setup)?;
    let fine = verify(&setup.with_chart(setup.chart.refined()))?;
    let scale = prepare(setup)?.omega.max_magnitude();
    let ratios = richardson(&coarse, &fine, &DIFFERENTIAL_CHECKS, scale);
    Ok(Convergence { coarse, fine, ratios })
}

/// `ω∧x` evaluated on the sampled patch; exposed for benchmarks.
pub fn pair_differential(p: &Prepared) -> OneForm<Bivector4> {
    omega_wedge_x(&p.omega, &p.sp.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = verify(&Setup::default_torus().with_chart(GridChart::new(0.0, 3.0, 0.0, 3.0, 17, 17).unwrap())).unwrap();
        let failing: Vec<_> = report.failing().collect();
        assert!(failing.is_empty(), "{failing:#?}");
    }

    #[test]
    fn non_real_c_on_torus_fails_closure_only() {
        let mut setup = Setup::default_torus().with_chart(GridChart::new(0.0, 3.0, 0.0, 3.0, 17, 17).unwrap());
        setup.c = Complex64::new(0.0, 1.0);
        let report = verify(&setup).unwrap();
        let failing: Vec<_> = report.failing().map(|c| c.name.as_str()).collect();
        assert!(failing.contains(&"d_omega") && failing.contains(&"closure_gate"), "{failing:?}");
        for name in ["isometry", "second_form_difference", "mean_curvature", "quat_dFp", "retraction_identity"] {
            assert!(report.get(name).unwrap().pass, "{name}");
        }
    }
}
