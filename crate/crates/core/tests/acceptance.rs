//! Acceptance run: one `PASS` or `FAIL` line per criterion. Exits non-zero if any fails.
//!
//! `cargo test -p prefchoice --test acceptance`

use std::time::{Duration, Instant};

use prefchoice::analytic::{
    critical_point, critical_point_with_grid, lower_choice_kernel, tau_exponent,
    upper_choice_kernel, LowerKernelForm, MuKProfile,
};
use prefchoice::bernstein::integrate_monomial_unit;
use prefchoice::growth::{run_with_rng, seeded_rng, SimRng, ROOT};
use prefchoice::stats::{binomial_se, chi_square_test, fit_snapshot};
use prefchoice::{AnalyticModel, ChoiceVector, DegreeBound, GrowthState, ModelParams, SnapshotStats};
use rand::Rng;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn random_choice(rng: &mut SimRng, r: usize) -> ChoiceVector {
    let w: Vec<f64> = (0..r).map(|_| rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    ChoiceVector::new(w.iter().map(|x| x / total).collect()).unwrap()
}

fn grow(xi: &ChoiceVector, alpha: f64, steps: u64, seed: u64, stream: u64) -> (SnapshotStats, Duration) {
    let params = ModelParams::new(xi.clone(), alpha, 100, steps, seed).unwrap();
    let mut rng = seeded_rng(seed, stream);
    let start = Instant::now();
    let snap = run_with_rng(&params, &[steps], &mut rng).unwrap().pop().unwrap();
    (snap, start.elapsed())
}

fn analytic_goldens(report: &mut Report) {
    let start = Instant::now();
    let mut rng = seeded_rng(2024, 0);

    let a1 = critical_point(&ChoiceVector::middle_of_three()).alpha_c;
    let two = ChoiceVector::second_or_sixth_of_seven();
    let a2 = critical_point(&two).alpha_c;
    let closed = (35.0 * 10f64.sqrt() - 116.0) / 9.0;
    let asym = ChoiceVector::asymmetric_second_or_sixth_of_seven();
    let a3 = critical_point(&asym).alpha_c;
    let a3_fine = critical_point_with_grid(&asym, 40_960).alpha_c;
    report.line(
        "alpha_c golden values",
        (a1 + 0.5).abs() <= 1e-10
            && (a2 - closed).abs() <= 1e-10
            && (a3 + 0.1231).abs() <= 1e-3
            && (a3 - a3_fine).abs() <= 1e-10,
        format!("{a1}, {a2} (closed form {closed}), {a3} (fine grid {a3_fine})"),
    );

    let middle = ChoiceVector::middle_of_three();
    let t0 = tau_exponent(&middle, 0.0).unwrap();
    let tc = tau_exponent(&middle, -0.5).unwrap();
    report.line(
        "tau exponent",
        (t0 - 4.0 / 3.0).abs() <= 1e-12 && (tc - 1.0).abs() <= 1e-9,
        format!("tau(0) = {t0}, tau(alpha_c) = {tc}"),
    );

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let r = rng.random_range(2..=10);
        let m = AnalyticModel::new(random_choice(&mut rng, r), 0.0).unwrap();
        worst = worst.max((integrate_monomial_unit(m.density_coeffs()) - 1.0).abs());
    }
    report.line(
        "density integrates to one",
        worst <= 1e-12,
        format!("max error {worst:e} over 200 vectors"),
    );

    let uniform = AnalyticModel::new(ChoiceVector::uniform(5).unwrap(), 0.0).unwrap();
    let worst = (0..=1000)
        .map(|i| {
            let x = i as f64 / 1000.0;
            (uniform.psi(x).unwrap().psi - x).abs()
        })
        .fold(0.0, f64::max);
    report.line(
        "psi identity for uniform choice",
        worst <= 1e-10,
        format!("max |Psi(x) - x| = {worst:e}"),
    );

    let m = AnalyticModel::new(middle.clone(), 0.0).unwrap();
    let cdf = m.kernel_cdf(1, 0.5).unwrap();
    report.line(
        "kernel cdf at the midpoint",
        (cdf - 4.0 / 7.0).abs() <= 1e-12,
        format!("{cdf} vs 4/7, error {:e}", cdf - 4.0 / 7.0),
    );

    let u3 = AnalyticModel::new(ChoiceVector::uniform(3).unwrap(), 0.0).unwrap();
    let profile = MuKProfile::new(&u3, 2048).unwrap();
    let worst = (1..=100u64)
        .map(|k| (profile.mu_k(k) - 2.0 / (k as f64 * (k as f64 + 1.0))).abs())
        .fold(0.0, f64::max);
    report.line(
        "uniform mu_k closed form",
        worst <= 1e-8,
        format!("max error {worst:e} for k in 1..=100"),
    );

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = rng.random_range(2..=10);
        let xi = random_choice(&mut rng, r);
        let m = AnalyticModel::new(xi.clone(), 0.0).unwrap();
        let y: f64 = rng.random_range(0.0..1.0 - 1e-8);
        let f = m.density(y);
        let e1 = (upper_choice_kernel(&xi, y, y + 1e-8) - f).abs();
        let e2 = (lower_choice_kernel(&xi, y, y + 1e-8, LowerKernelForm::Corrected) - f).abs();
        worst = worst.max(e1).max(e2);
    }
    report.line(
        "kernel limit identity",
        worst <= 1e-6,
        format!("max error {worst:e} over 100 cases"),
    );

    let elapsed = start.elapsed();
    report.line(
        "analytic suite runtime",
        elapsed < Duration::from_secs(10),
        format!("{:.2} s (limit 10 s)", elapsed.as_secs_f64()),
    );
}

fn oracle_equivalence(report: &mut Report) {
    let start = Instant::now();
    let mut rng = seeded_rng(2025, 0);
    let mut passed = 0;
    let mut worst_p: f64 = 1.0;
    for _ in 0..50 {
        let v = rng.random_range(2..=10);
        let r = rng.random_range(2..=4);
        let alpha = [-0.5, 0.0, 1.0][rng.random_range(0..3)];
        let xi = random_choice(&mut rng, r);
        let locations = (0..v).map(|_| rng.random::<f64>()).collect();
        let parent = (0..v)
            .map(|i| if i == 0 { ROOT } else { rng.random_range(0..i) as u32 })
            .collect();
        let state = GrowthState::from_tree(xi, alpha, locations, parent).unwrap();
        let law = state.exact_attachment_distribution().unwrap();
        let mut counts = vec![0u64; v];
        for _ in 0..100_000 {
            let mut s = state.clone();
            counts[s.grow_step(&mut rng).attached_to] += 1;
        }
        let p = chi_square_test(&counts, &law).p_value;
        worst_p = worst_p.min(p);
        if p > 0.001 {
            passed += 1;
        }
    }
    let elapsed = start.elapsed();
    report.line(
        "attachment law matches enumeration",
        passed >= 48 && elapsed < Duration::from_secs(120),
        format!(
            "{passed}/50 with p > 0.001 (need 48), smallest p {worst_p:.4}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
}

fn psi_replicas(report: &mut Report) {
    let start = Instant::now();
    let xi = ChoiceVector::middle_of_three();
    let model = AnalyticModel::new(xi.clone(), 0.0).unwrap();
    let errors: Vec<f64> = (0..20)
        .map(|stream| {
            let (snap, _) = grow(&xi, 0.0, 100_000, 1, stream);
            snap.psi_sup_error(&model, 101).unwrap()
        })
        .collect();
    let within = errors.iter().filter(|&&e| e <= 0.02).count();
    let elapsed = start.elapsed();
    let mut sorted = errors.clone();
    sorted.sort_by(f64::total_cmp);
    report.line(
        "psi sup-norm over 20 replicas at n = 1e5",
        within >= 18 && elapsed < Duration::from_secs(300),
        format!(
            "{within}/20 within 0.02 (need 18), median {:.4}, max {:.4}, {:.1} s",
            sorted[10],
            sorted[19],
            elapsed.as_secs_f64()
        ),
    );
}

fn million_step_run(report: &mut Report) -> Duration {
    let xi = ChoiceVector::middle_of_three();
    let (snap, elapsed) = grow(&xi, 0.0, 1_000_000, 1, 0);
    let (k_min, k_max) = snap.default_fit_range();
    let fit = fit_snapshot(&snap, k_min, k_max).unwrap();
    let grid = snap.local_degree_grid(50, &[1]).unwrap();
    let cell = grid.fraction(25, 0).unwrap();
    report.line(
        "million-step run: exponent and midpoint cell",
        (fit.tau_hat - 4.0 / 3.0).abs() <= 0.1
            && (cell - 4.0 / 7.0).abs() <= 0.03
            && elapsed < Duration::from_secs(120),
        format!(
            "tau_hat {:.4} over k in [{k_min}, {k_max}], cell {cell:.4} vs 4/7, {:.2} s",
            fit.tau_hat,
            elapsed.as_secs_f64()
        ),
    );
    elapsed
}

fn sandwich(report: &mut Report) {
    let (x1, x2) = (0.4, 0.6);
    let mut details = Vec::new();
    let mut ok = true;
    for xi in [
        ChoiceVector::middle_of_three(),
        ChoiceVector::second_or_sixth_of_seven(),
        ChoiceVector::asymmetric_second_or_sixth_of_seven(),
    ] {
        let (snap, _) = grow(&xi, 0.0, 1_000_000, 1, 0);
        let m = AnalyticModel::new(xi.clone(), 0.0).unwrap();
        let v = snap.vertex_count() as u64;
        let mut outside = 0;
        for k in 1..=20 {
            let l1 = m.degree_bound(DegreeBound::Lower, k, x1, x2).unwrap();
            let l2 = m.degree_bound(DegreeBound::Upper, k, x1, x2).unwrap();
            let p = snap.proportion(k, x1, x2).unwrap();
            let eps = 3.0 * binomial_se(p, v);
            if p < l1 - eps || p > l2 + eps {
                outside += 1;
            }
        }
        ok &= outside == 0;
        details.push(format!("{xi}: {outside} of 20 outside"));
    }
    report.line("degree bounds sandwich", ok, details.join("; "));
}

fn sweep(report: &mut Report) {
    let xi = ChoiceVector::middle_of_three();
    let mut fits = Vec::new();
    for alpha in [-0.4, -0.2, 0.0, 0.25, 0.5] {
        let (snap, _) = grow(&xi, alpha, 1_000_000, 1, 0);
        let (k_min, k_max) = snap.default_fit_range();
        let tau_hat = fit_snapshot(&snap, k_min, k_max).unwrap().tau_hat;
        fits.push((alpha, tau_hat, (2.0 + alpha) / 1.5));
    }
    let monotone = fits.windows(2).all(|w| w[0].1 < w[1].1);
    let close = fits.iter().all(|(_, t, a)| (t - a).abs() <= 0.15);
    let detail = fits
        .iter()
        .map(|(alpha, t, a)| format!("{alpha}: {t:.4} vs {a:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    report.line("exponent sweep", monotone && close, detail);
}

fn performance(report: &mut Report, million: Duration) {
    let xi = ChoiceVector::middle_of_three();
    let (_, small) = grow(&xi, 0.0, 100_000, 3, 0);
    let (_, large) = grow(&xi, 0.0, 1_000_000, 3, 0);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    let slowest = large.max(million);
    report.line(
        "performance",
        slowest < Duration::from_secs(60) && ratio < 12.0,
        format!(
            "1e6 steps in {:.2} s, 1e5 steps in {:.3} s, ratio {ratio:.2}",
            slowest.as_secs_f64(),
            small.as_secs_f64()
        ),
    );
}

fn main() {
    let mut report = Report { failed: 0 };
    analytic_goldens(&mut report);
    oracle_equivalence(&mut report);
    psi_replicas(&mut report);
    let million = million_step_run(&mut report);
    sandwich(&mut report);
    sweep(&mut report);
    performance(&mut report, million);
    println!("{} criteria failed", report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
