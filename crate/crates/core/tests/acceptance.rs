//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails. Run with
//! `cargo test --release -p hypspec-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use hypspec_core::error::Error;
use hypspec_core::experiments::*;
use hypspec_core::geometry::bounds::*;
use hypspec_core::geometry::surface::closed_surface;
use hypspec_core::geometry::trig::{collar_width, hexagons_from_pants};
use hypspec_core::mesher::*;
use hypspec_core::spectral::*;
use hypspec_core::verdicts_csv;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{disk_lambda0, right_angled_walk_defect};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(out: &mut Vec<String>, ok: bool, what: String) -> bool {
    out.push(format!("{} {what}", if ok { "ok" } else { "FAILED" }));
    ok
}

fn criterion<F>(id: usize, title: &str, limit: Duration, f: F) -> bool
where
    F: FnOnce() -> Result<Outcome, Error>,
{
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    let (pass, detail) = match r {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = dt <= limit;
    let pass = pass && in_time;
    println!(
        "{} [{id}] {title}: {detail}; {:.1} s (limit {} s{})",
        if pass { "PASS" } else { "FAIL" },
        dt.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    pass
}

fn flat_oracle() -> Result<Outcome, Error> {
    let want = 4.0 * PI * PI;
    let rep = convergence_study_with(&[1.0 / 25.0, 1.0 / 50.0, 1.0 / 100.0], 2, |h| {
        let n = (1.0 / h).round() as usize;
        Ok::<_, Error>(assemble(&flat_torus(n)?, BoundaryCondition::Neumann)?)
    })?;
    let mut notes = Vec::new();
    let l1 = rep.eigenvalues[2][1];
    let mut pass = check(
        &mut notes,
        rep.dofs[2] == 10_000 && (l1 - want).abs() <= 0.02 * want,
        format!("lambda1 = {l1:.6} vs 4 pi^2 = {want:.6} on {} dofs", rep.dofs[2]),
    );
    let p = rep.observed_order[1].unwrap_or(f64::NAN);
    pass &= check(
        &mut notes,
        (1.7..=2.3).contains(&p),
        format!("order {p:.4} in [1.7, 2.3]"),
    );
    Ok(Outcome {
        pass,
        detail: notes.join(", "),
    })
}

fn hyperbolic_oracle() -> Result<Outcome, Error> {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut prev = f64::INFINITY;
    for radius in [1.0, 2.0, 3.0] {
        let mesh = geodesic_disk(radius, 0.05, Metric::Hyperbolic)?;
        let op = assemble(&mesh, BoundaryCondition::Dirichlet)?;
        let l = lowest_eigenpairs(&op, 1, 1e-9)?.eigenvalues[0];
        let oracle = disk_lambda0(radius);
        pass &= check(
            &mut notes,
            (l - oracle).abs() <= 0.02 * oracle && l > 0.25 && l < prev,
            format!("R = {radius}: {l:.6} vs {oracle:.6}"),
        );
        prev = l;
    }
    Ok(Outcome {
        pass,
        detail: notes.join(", "),
    })
}

fn buser_counts(out: &BuserOutcome, notes: &mut Vec<String>, label: &str) -> bool {
    let ev = &out.result.eigenvalues;
    let eps = buser_rayleigh_bound(0.15).unwrap() * 1.05;
    let lower = lambda_lower(&out.bounds);
    let below_eps = count_at_most(ev, eps);
    let below_lower = count_at_most(ev, lower);
    let failing: Vec<&str> = out
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| v.name.as_str())
        .collect();
    check(
        notes,
        below_eps >= 2 && below_lower <= 2 && ev[2] > 0.25 * 0.95 && failing.is_empty(),
        format!(
            "{label}: {below_eps} <= {eps:.6}, {below_lower} <= {lower:.6}, lambda2 = {:.6}, failing verdicts {failing:?}",
            ev[2]
        ),
    )
}

fn buser_squeeze() -> Result<Outcome, Error> {
    let mut notes = Vec::new();
    let out = run_buser(2, 0.05, None, 0.05, None, DEFAULT_SEED)?;
    let mut pass = buser_counts(&out, &mut notes, "untwisted");
    for seed in 1..=5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let twists: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..0.05)).collect();
        let out = run_buser(2, 0.05, Some(&twists), 0.05, None, DEFAULT_SEED)?;
        pass &= buser_counts(&out, &mut notes, &format!("twist seed {seed}"));
    }
    Ok(Outcome {
        pass,
        detail: notes.join("; "),
    })
}

fn randol_cover() -> Result<Outcome, Error> {
    let base = closed_surface(2, &[1.0, 1.0, 1.0], &[0.0; 3])?;
    let curve = (0..base.gluings.len())
        .find(|&g| base.is_nonseparating(g))
        .expect("a non-separating curve");
    let out = run_randol(&base, curve, 3, 2, 0.1, None, DEFAULT_SEED)?;
    let ev = &out.cover_result.eigenvalues;
    let formula = randol_quotient_bound(1.0, 3, gauss_bonnet_area(&base))? * 1.05;
    let loose = 0.0796;
    let mut notes = Vec::new();
    let mut pass = check(
        &mut notes,
        out.cover.sheets == 10,
        format!("order {}", out.cover.sheets),
    );
    let n_formula = count_at_most(ev, formula);
    let n_loose = count_at_most(ev, loose);
    pass &= check(
        &mut notes,
        n_formula >= 2,
        format!("{n_formula} eigenvalues <= {formula:.6} (formula)"),
    );
    pass &= check(
        &mut notes,
        n_loose >= 2,
        format!("{n_loose} <= {loose} (loose threshold)"),
    );
    let contained = spectrum_contained(&out.base_result.eigenvalues, ev);
    pass &= check(
        &mut notes,
        contained.pass,
        format!("base spectrum below 1/4 in cover ({})", contained.detail),
    );
    pass &= check(
        &mut notes,
        out.verdicts.iter().all(|v| v.pass),
        "all run verdicts".into(),
    );
    Ok(Outcome {
        pass,
        detail: notes.join(", "),
    })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn closed_form_ledger() -> Result<Outcome, Error> {
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1e-300);
    let mut notes = Vec::new();
    let mut pass = true;
    let mut value = |name: &str, got: f64, oracle: f64| {
        pass &= check(&mut notes, rel(got, oracle), format!("{name} {got:.9}"));
    };
    // collar width from the series form 2 artanh(e^{-l/2})
    for l in [2.0, 0.1] {
        value(
            &format!("collar({l})"),
            collar_width(l)?,
            2.0 * (-0.5 * l).exp().atanh(),
        );
    }
    let a = 0.5f64.cosh();
    value(
        "hexagon b(1,1,1)",
        hexagons_from_pants(1.0, 1.0, 1.0)?.b[0],
        (a / (a - 1.0)).acosh(),
    );
    let s1 = (1f64.exp() - (-1f64).exp()) / 2.0;
    value(
        "buser(0.15)",
        buser_rayleigh_bound(0.15)?,
        0.15 * s1 / (2.0 * PI - 0.15 * s1),
    );
    value("buser(3)", buser_rayleigh_bound(3.0)?, 3.0 * s1 / (2.0 * PI - 3.0 * s1));
    let raw = |l: f64, eps: f64, area: f64| l * l.exp() / ((l / 2.0).exp() - (-l / 2.0).exp()) / (eps * area);
    let c = randol_cover_order(1.0, 0.25, 4.0 * PI)?;
    value("randol raw(1, 0.25)", c.displayed_bound, raw(1.0, 0.25, 4.0 * PI));
    let c2 = randol_cover_order(0.5, 0.05, 4.0 * PI)?;
    value("randol raw(0.5, 0.05)", c2.displayed_bound, raw(0.5, 0.05, 4.0 * PI));
    let ln = |x: f64| x.ln();
    let acosh = |x: f64| (x + (x * x - 1.0).sqrt()).ln();
    let asinh = |x: f64| (x + (x * x + 1.0).sqrt()).ln();
    let nb = nonsep_length_bound(2)?;
    value("nonsep sharp(2)", nb.sharp, 2.0 * acosh(3.0));
    value("nonsep log(2)", nb.log_form, 2.0 * ln(6.0));
    let (lo, hi) = analytic_systole_interval(1.0, 4.0 * PI, -2, -1.0)?;
    value("Lambda lower", lo, 0.25 + 1.0 / (16.0 * PI * PI));
    let w = asinh(2.0 / (1f64.exp() - (-1f64).exp()));
    value("Lambda upper", hi, 0.25 + 4.0 * PI * PI / (w * w));
    value(
        "delta",
        mondal_delta(1.0, 4.0 * PI)?,
        (1.0 / (16.0 * PI * PI)).min(0.25),
    );
    let ints = [
        ("k(1, 0.25)", c.k, 1),
        ("k(0.5, 0.05)", c2.k, 3),
        ("k genus 2", randol_genus_order(2, 0.25)?, 15),
        ("k genus 3", randol_genus_order(3, 0.1)?, 47),
    ];
    for (name, got, want) in ints {
        pass &= check(&mut notes, got == want, format!("{name} = {got}"));
    }
    let h = hexagons_from_pants(1.0, 1.0, 2.0)?;
    pass &= check(
        &mut notes,
        h.relation_residuals().iter().all(|r| *r < 1e-10) && right_angled_walk_defect(&h.sides()) < 1e-9,
        "hexagon (1,1,2) closes".into(),
    );
    // inequality chains behind the cover orders, on full grids
    let mut chain = true;
    for l in log_grid(1e-3, 10.0, 400) {
        for eps in [0.05, 0.1, 0.25] {
            let c = randol_cover_order(l, eps, 4.0 * PI)?;
            chain &= c.collar_bound <= c.displayed_bound && c.k_collar <= c.k + 1;
        }
    }
    for g in 2u64..=6 {
        let area = 2.0 * PI * (2 * g - 2) as f64;
        let lmax = nonsep_length_bound(g)?.sharp;
        for eps in [0.05, 0.1, 0.25] {
            let kg = randol_genus_order(g, eps)?;
            for l in log_grid(1e-3, lmax, 200) {
                chain &= kg >= randol_cover_order(l, eps, area)?.k;
            }
        }
    }
    pass &= check(&mut notes, chain, "inequality chains on grids".into());
    Ok(Outcome {
        pass,
        detail: notes.join(", "),
    })
}

fn nodal_properties() -> Result<Outcome, Error> {
    let mut notes = Vec::new();
    let mut pass = true;
    for seed in 1..=5u64 {
        let s = random_twist_surface(2, 0.5, 1.5, seed)?;
        let sm = mesh_surface(&s, &MeshOptions::new(0.1))?;
        let r = surface_spectrum(&sm, 10, DEFAULT_SEED)?;
        let bounds = BoundReport::for_surface(&s)?;
        let mut v = small_eigenvalue_audit(&s, &sm.mesh, &r, &bounds)?;
        v.retain(|x| {
            matches!(
                x.name.as_str(),
                "nodal_domains_negative_euler" | "cluster_lambda1" | "cluster_small"
            )
        });
        v.push(courant_check(&sm.mesh, &r, 10));
        let failing: Vec<String> = v.iter().filter(|x| !x.pass).map(|x| x.to_string()).collect();
        let counts = v.last().map(|c| c.detail.clone()).unwrap_or_default();
        pass &= check(
            &mut notes,
            failing.is_empty(),
            format!("seed {seed}: {counts} {failing:?}"),
        );
    }
    Ok(Outcome {
        pass,
        detail: notes.join("; "),
    })
}

fn collars() -> Result<Outcome, Error> {
    let mut notes = Vec::new();
    let mut pass = true;
    for l in [0.5, 1.0, 2.0] {
        let s = closed_surface(2, &[l; 3], &[0.0; 3])?;
        let sm = mesh_surface(&s, &MeshOptions::new(0.1))?;
        let rho = collar_width(l)?;
        for seam in &sm.seams {
            let d = graph_distances(&sm.mesh, &seam.vertices);
            let keep: Vec<bool> = d.iter().map(|&x| x <= rho).collect();
            let c = induced_subcomplex(&sm.mesh, &keep);
            pass &= check(
                &mut notes,
                (c.euler_characteristic, c.boundary_components, c.components) == (0, 2, 1),
                format!(
                    "l = {l} curve {}: chi {} with {} boundary loops",
                    seam.gluing, c.euler_characteristic, c.boundary_components
                ),
            );
        }
    }
    Ok(Outcome {
        pass,
        detail: notes.join(", "),
    })
}

fn buser_csv(threads: usize) -> Result<String, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        let out = run_buser(2, 0.05, None, 0.1, None, DEFAULT_SEED)?;
        Ok(verdicts_csv(&out.verdicts) + &spectrum_csv(&out.result))
    })
}

fn determinism() -> Result<Outcome, Error> {
    let mut notes = Vec::new();
    let a = buser_csv(1)?;
    let b = buser_csv(4)?;
    let c = buser_csv(4)?;
    let mut pass = check(
        &mut notes,
        a == b && b == c,
        "buser CSV across reruns and 1/4 threads".into(),
    );
    let cfg = CampaignConfig::from_json_str(
        r#"{"surfaces": [{"kind": "buser", "name": "b", "genus": 2, "ell": 0.05},
                         {"kind": "random_twist", "name": "r", "genus": 2, "ell_min": 0.5, "ell_max": 1.5, "seed": 3}],
            "h": 0.2, "checks": ["buser", "variational", "audit", "courant"], "seed": 11}"#,
    )?;
    let x = campaign_csv(&run_campaign(&cfg, Path::new("."))?)?;
    let y = campaign_csv(&run_campaign(&cfg, Path::new("."))?)?;
    pass &= check(&mut notes, x == y, format!("campaign CSV ({} bytes)", x.len()));
    Ok(Outcome {
        pass,
        detail: notes.join(", "),
    })
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        criterion(1, "flat torus oracle", min(1), flat_oracle),
        criterion(2, "hyperbolic disk oracle", min(2), hyperbolic_oracle),
        criterion(3, "Buser squeeze, genus 2, l = 0.05", min(10), buser_squeeze),
        criterion(4, "Randol cover, l = 1, k = 3, n = 2", min(30), randol_cover),
        criterion(5, "closed-form ledger", min(1), closed_form_ledger),
        criterion(6, "nodal properties on 5 genus-2 surfaces", min(15), nodal_properties),
        criterion(7, "collar realization", min(1), collars),
        criterion(8, "determinism", min(5), determinism),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
