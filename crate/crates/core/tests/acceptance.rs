//! Acceptance criteria. Every criterion runs and prints one `PASS`/`FAIL`
//! line; the process fails if any of them does.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use figure_integral::fields::{catalog, const2, const3, grad, rot, weier, CatalogField, Weierstrass};
use figure_integral::gauss3d::{
    cube, flux_function, gauss_verify, icosphere, surface_flux, BoxFunction, Box3, GaussParams,
};
use figure_integral::geom2d::{DyadicGrid, Rect};
use figure_integral::integral::{jordan_content, line_integral, Levels};
use figure_integral::quadrature::QuadratureSpec;
use figure_integral::rectfn::{circulation_function, RectangleFunction};
use figure_integral::region2d::{disk, lshape, square, Curve};
use figure_integral::verify::{additivity_study, divergence_oracle, green_verify, perimeter_bound_audit, VerifyParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn world() -> Rect {
    Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap()
}

fn world3() -> Box3 {
    Box3::cube([0.0; 3], 2.0).unwrap()
}

fn levels(a: u32, b: u32) -> Levels {
    Levels::new(a, b).unwrap()
}

fn report(id: &str, ok: bool, detail: String) {
    println!("{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn shipped_curves() -> Vec<(&'static str, Curve)> {
    vec![
        ("square", square(0.0, 0.0, 1.0)),
        ("disk:4096", disk(0.0, 0.0, 1.0, 4096).unwrap()),
        ("lshape", lshape()),
    ]
}

fn j1_unit_disk_content() {
    let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
    let t = Instant::now();
    let rep = jordan_content(&d, levels(4, 9), Some(world())).unwrap();
    let elapsed = t.elapsed();
    let gap = rep.gap();
    let err = (rep.estimate - PI).abs();
    let ok = gap <= 0.05 && err <= 0.01 && elapsed < Duration::from_secs(10);
    report(
        "J1",
        ok,
        format!("gap={gap:e} (<= 0.05) |estimate-pi|={err:e} (<= 0.01) time={elapsed:?}"),
    );
    assert!(err <= 0.01);
    assert!(elapsed < Duration::from_secs(10));
    assert!(gap <= 0.05, "gap at level 9 is {gap}");
}

fn j2_monotone_bracketing() {
    let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
    let rep = jordan_content(&d, levels(4, 9), Some(world())).unwrap();
    let ok = rep
        .rows
        .windows(2)
        .all(|w| w[0].inner_area <= w[1].inner_area && w[0].outer_area >= w[1].outer_area);
    report("J2", ok, format!("levels={}", rep.rows.len()));
    assert!(ok);
}

fn g1_green_smooth() {
    let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
    let params = VerifyParams::new(levels(4, 9)).with_bounds(world());
    let t = Instant::now();
    let rep = green_verify(&rot(), &d, "disk:4096", &params).unwrap();
    let elapsed = t.elapsed();
    let lhs_err = (rep.lhs - PI).abs();
    let rhs_err = (rep.rhs.estimate - PI).abs();
    let ok = lhs_err <= 2e-2
        && rhs_err <= 2e-2
        && rep.discrepancy <= rep.tol_total()
        && rep.bracket
        && elapsed < Duration::from_secs(30);
    report(
        "G1",
        ok,
        format!(
            "|lhs-pi|={lhs_err:e} |rhs-pi|={rhs_err:e} discrepancy={:e} tol_total={:e} bracket={} time={elapsed:?}",
            rep.discrepancy,
            rep.tol_total(),
            rep.bracket
        ),
    );
    assert!(ok);
}

fn g2_three_way_smooth_agreement() {
    let params = VerifyParams::new(levels(4, 9)).with_bounds(world());
    let mut all = true;
    for (name, c) in shipped_curves() {
        for v in [rot(), grad()] {
            let rep = green_verify(&v, &c, name, &params).unwrap();
            let oracle = divergence_oracle(&v, &c, &params).unwrap();
            let line_vs_fig = (rep.lhs - rep.orientation * rep.rhs.estimate).abs();
            let fig_vs_oracle = (rep.rhs.estimate - oracle.estimate).abs();
            let ok = line_vs_fig <= rep.tol_total() && fig_vs_oracle <= 2.0 * rep.tol_figure;
            println!(
                "  {} on {name}: line-fig={line_vs_fig:e} (<= {:e}) fig-oracle={fig_vs_oracle:e} (<= {:e})",
                v.name(),
                rep.tol_total(),
                2.0 * rep.tol_figure
            );
            if v.name() == "grad" {
                assert!(rep.lhs.abs() < 1e-12 && rep.rhs.estimate.abs() < 1e-12 && oracle.estimate == 0.0);
            }
            all &= ok;
        }
    }
    report("G2", all, "rot and grad over square, disk:4096, lshape".into());
    assert!(all);
}

fn g3_green_without_differentiability() {
    let d = disk(0.0, 0.0, 1.0, 4096).unwrap();
    let params = VerifyParams::new(levels(4, 9)).with_bounds(world());
    let t = Instant::now();
    let rep = green_verify(&weier(Weierstrass::DEFAULT), &d, "disk:4096", &params).unwrap();
    let elapsed = t.elapsed();
    let stable = (rep.lhs - rep.lhs_refined).abs() < 1e-4;
    let gaps: Vec<f64> = rep.rhs.rows.iter().rev().take(3).rev().map(|r| r.gap).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    let ok = stable && decreasing && rep.bracket && elapsed < Duration::from_secs(60);
    report(
        "G3",
        ok,
        format!(
            "lhs={:e} halved={:e} last gaps={gaps:?} bracket={} time={elapsed:?}",
            rep.lhs, rep.lhs_refined, rep.bracket
        ),
    );
    assert!(ok);
}

fn g4_constant_field_cancellation() {
    let f = circulation_function(const2(1.0, -2.0), QuadratureSpec::new(8, 1.0 / 64.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rect: f64 = 0.0;
    for _ in 0..1000 {
        let x0 = rng.gen_range(-2.0..2.0);
        let y0 = rng.gen_range(-2.0..2.0);
        let r = Rect::new(x0, x0 + rng.gen_range(0.0..2.0), y0, y0 + rng.gen_range(0.0..2.0)).unwrap();
        worst_rect = worst_rect.max(f.eval(&r).abs());
    }
    let mut worst_curve: f64 = 0.0;
    for (_, c) in shipped_curves() {
        worst_curve = worst_curve.max(line_integral(&const2(1.0, -2.0), &c, 1e-4).unwrap().abs());
    }
    let ok = worst_rect <= 1e-12 && worst_curve <= 1e-12;
    report("G4", ok, format!("rects max={worst_rect:e} curves max={worst_curve:e}"));
    assert!(ok);
}

fn a1_additivity() {
    let fields: Vec<CatalogField> = catalog().into_iter().map(|(_, f)| f).collect();
    let q = QuadratureSpec::new(8, 1.0 / 16.0).unwrap();
    let rows = additivity_study(&fields, 1000, 11, &q).unwrap();
    for r in &rows {
        println!("  {}: max defect {:e}", r.function, r.max_defect);
    }
    let worst = rows.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    let ok = rows[0].max_defect == 0.0 && worst <= 1e-10 && rows.len() == fields.len() + 1;
    report("A1", ok, format!("functions={} max={worst:e}", rows.len()));
    assert!(ok);
}

fn p1_perimeter_audit() {
    let mut all = true;
    for (name, c) in shipped_curves() {
        for n in 4..=9 {
            let a = perimeter_bound_audit(&c, &DyadicGrid::new(world(), n).unwrap()).unwrap();
            if !a.holds() {
                println!("  {name} level {n}: {} > {}", a.total_perimeter, a.bound);
            }
            all &= a.holds();
        }
    }
    report("P1", all, "square, disk:4096, lshape at levels 4..9".into());
    assert!(all);
}

fn x1_gauss_radial_sphere() {
    let m = icosphere(4);
    let t = Instant::now();
    let flux = surface_flux(&figure_integral::fields::radial(), &m, 0).unwrap();
    let params = GaussParams::new(levels(3, 6)).with_bounds(world3());
    let rep = gauss_verify(&figure_integral::fields::radial(), &m, "icosphere:4", &params).unwrap();
    let elapsed = t.elapsed();
    let closed_form = (flux - m.signed_volume()).abs();
    let rel = rep.discrepancy / (4.0 * PI / 3.0);
    let ok = closed_form <= 1e-6 && rel <= 0.02 && elapsed < Duration::from_secs(60);
    report(
        "X1",
        ok,
        format!("|flux-volume|={closed_form:e} discrepancy/ball={rel:e} (<= 0.02) time={elapsed:?}"),
    );
    assert!(ok);
}

fn x2_constant_flux() {
    let v = const3([1.0, -2.0, 0.5]);
    let mut worst_mesh: f64 = 0.0;
    let meshes = [cube([0.0; 3], 1.0), cube([-0.3, 0.2, -0.9], 1.7)]
        .into_iter()
        .chain((0..=4).map(icosphere));
    for m in meshes {
        worst_mesh = worst_mesh.max(surface_flux(&v, &m, 1).unwrap().abs());
    }
    let f = flux_function(v, QuadratureSpec::new(8, 1.0 / 16.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_box: f64 = 0.0;
    for _ in 0..1000 {
        let lo: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let hi = lo.map(|c| c + rng.gen_range(0.0..0.75));
        worst_box = worst_box.max(f.eval(&Box3::new(lo, hi).unwrap()).abs());
    }
    let ok = worst_mesh <= 1e-10 && worst_box <= 1e-10;
    report("X2", ok, format!("meshes max={worst_mesh:e} boxes max={worst_box:e}"));
    assert!(ok);
}

fn figint_csv(args: &[&str], threads: usize, out: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_figint"))
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--output")
        .arg(out)
        .output()
        .expect("figint runs");
    assert!(status.status.code().is_some_and(|c| c == 0 || c == 1), "{status:?}");
    std::fs::read(out).unwrap()
}

fn d1_determinism_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["jordan", "--region", "disk:4096", "--levels", "4..9"],
        &["green", "--region", "disk:4096", "--field", "rot", "--levels", "4..9"],
        &["green", "--region", "disk:4096", "--field", "weier:a=0.5,b=3,K=30", "--levels", "4..9"],
        &["gauss", "--region", "icosphere:4", "--field", "radial", "--levels", "3..6"],
        &["additivity", "--samples", "1000"],
    ];
    let mut all = true;
    for (k, args) in runs.iter().enumerate() {
        let one = figint_csv(args, 1, &dir.path().join(format!("{k}-1.csv")));
        let eight = figint_csv(args, 8, &dir.path().join(format!("{k}-8.csv")));
        let same = one == eight && !one.is_empty();
        println!("  {}: {} bytes, identical={same}", args.join(" "), one.len());
        all &= same;
    }
    report("D1", all, "threads 1 vs 8".into());
    assert!(all);
}

fn main() {
    let criteria: [(&str, fn()); 11] = [
        ("J1", j1_unit_disk_content),
        ("J2", j2_monotone_bracketing),
        ("G1", g1_green_smooth),
        ("G2", g2_three_way_smooth_agreement),
        ("G3", g3_green_without_differentiability),
        ("G4", g4_constant_field_cancellation),
        ("A1", a1_additivity),
        ("P1", p1_perimeter_audit),
        ("X1", x1_gauss_radial_sphere),
        ("X2", x2_constant_flux),
        ("D1", d1_determinism_across_threads),
    ];
    let failed: Vec<&str> = criteria
        .iter()
        .filter(|(_, run)| std::panic::catch_unwind(run).is_err())
        .map(|(id, _)| *id)
        .collect();
    if !failed.is_empty() {
        println!("failed: {}", failed.join(" "));
        std::process::exit(1);
    }
}
