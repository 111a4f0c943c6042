use super::{Params, ResultTable};
use crate::bounds::{self, BoundQuery};
use crate::error::Result;
use crate::geometry::ManifoldSpec;

/// Inputs of the bound calculators.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsSettings {
    pub manifold: ManifoldSpec,
    pub query: BoundQuery,
    pub t_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
}

impl BoundsSettings {
    pub fn resolve(p: &mut Params) -> Result<Self> {
        let manifold = ManifoldSpec::parse(&p.string("manifold", "sphere2"))?;
        let nu = p.f64("nu", 2.5)?;
        let base = BoundQuery::for_manifold(&manifold, nu);
        let query = BoundQuery {
            b: p.f64("B", base.b)?,
            sigma_n: p.f64("sigma_n", base.sigma_n)?,
            kappa: p.f64("kappa", base.kappa)?,
            sigma_f: p.f64("sigma_f", base.sigma_f)?,
            t: p.f64("T", base.t)?,
            lambda: p.f64("lambda", base.lambda)?,
            b_t: p.f64("B_T", base.b_t)?,
            ..base
        };
        query.validate()?;
        Ok(Self {
            manifold,
            query,
            t_grid: p.f64_list("T_grid", &[50.0, 100.0, 200.0, 400.0, 800.0, 1e4])?,
            lambda_grid: p.f64_list("lambda_grid", &[0.01, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0])?,
        })
    }
}

/// Constants (param `constant`, value 0), T-curves (param `T`) and λ-curves (param `lambda`).
pub fn bounds_table(s: &BoundsSettings) -> Result<ResultTable> {
    const EXP: &str = "bounds";
    let q = &s.query;
    let mut t = ResultTable::default();
    let mut constant = |name: &str, v: f64| t.push(EXP, "constant", 0.0, -1, name, v);
    let aux = bounds::bayes_and_aug_constants(q);
    let eps = bounds::eps_t(q);
    constant("c_star", bounds::c_star(q));
    constant("c_star_assouad", bounds::c_star_assouad(q));
    constant("c_bessel", aux.c_bessel);
    constant("c_b", aux.c_b);
    constant("c_aug", aux.c_aug);
    constant("c_ns", aux.c_ns);
    constant("eps_t", eps.value);
    constant("eps_t_warnings", eps.warnings.len() as f64);
    constant("curvature_correction", bounds::curvature_correction(q).value);
    constant("volume_power", bounds::volume_power(q));
    constant("lambda_star", bounds::lambda_star(q));
    let tv = bounds::tv_rates(q, &s.t_grid);
    constant("w_star", tv.w_star);
    let (noise, switch, _) = bounds::switching_curves(q, &s.t_grid, &s.lambda_grid);
    let t_curves = [bounds::lower_curve_main(q, &s.t_grid), bounds::lower_curve_assouad(q, &s.t_grid), noise, tv.lower, tv.upper];
    for c in t_curves {
        for (x, v) in c.points {
            t.push(EXP, "T", x, -1, &c.name, v);
        }
    }
    for (x, v) in switch.points {
        t.push(EXP, "lambda", x, -1, &switch.name, v);
    }
    t.sort();
    Ok(t)
}
