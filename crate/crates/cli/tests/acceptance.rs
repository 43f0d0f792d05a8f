//! End-to-end acceptance checks. Prints one `[PASS]` or `[FAIL]` line per
//! criterion and exits nonzero if any fails.

use std::io::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ctp_cli::commands::{compare_groups_cmd, describe_cmd, fit_cmd, Format};
use ctp_cli::{DatasetSource, FileSource, FitReport, Summary};
use ctp_core::{
    compare_families, criteria, log_likelihood_unchecked, rank_models, raw_moment, validity_check, Criterion, Ctp,
    CtpDistribution, Delta, FamilyId, FitConfig, MomentOrder, Observations, Params, ParetoBase,
};
use ctp_testkit::{grid_min, integrate, ks_statistic, sign_changes};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Part = fn() -> Result<(), String>;
type Acceptance = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn wheaton() -> DatasetSource {
    DatasetSource::from_arg("wheaton")
}

fn fit_report(families: &[FamilyId], config: &FitConfig) -> Result<FitReport, String> {
    let out = fit_cmd(&wheaton(), families, config, Format::Json, false).map_err(|e| e.to_string())?;
    serde_json::from_str(&out.text).map_err(|e| e.to_string())
}

fn neg_loglik(report: &FitReport, family: FamilyId) -> Result<f64, String> {
    report
        .fits
        .iter()
        .find(|f| f.family == family)
        .and_then(|f| f.loglik)
        .map(|l| -l)
        .ok_or_else(|| format!("{family} did not fit"))
}

fn pareto_fit() -> Check {
    let start = Instant::now();
    let report = fit_report(&[FamilyId::Pareto], &FitConfig::default())?;
    let elapsed = start.elapsed();
    let alpha = report.fits[0].alpha_hat.ok_or("no estimate")?;
    let nll = neg_loglik(&report, FamilyId::Pareto)?;
    ensure((alpha - 0.244).abs() <= 0.002, || format!("alpha {alpha}"))?;
    ensure((nll - 303.064).abs() <= 0.01, || format!("-logL {nll}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("alpha {alpha:.5}, -logL {nll:.4}, {elapsed:.2?}"))
}

fn modified_comparison() -> Check {
    let expected = [
        (FamilyId::Mg, 276.901),
        (FamilyId::Mr18a, 276.901),
        (FamilyId::Mr18b, 276.901),
        (FamilyId::R23, 284.811),
        (FamilyId::Mr19, 285.291),
        (FamilyId::Tp, 286.201),
        (FamilyId::Ma, 289.828),
        (FamilyId::Pareto, 303.064),
    ];
    let config = FitConfig::default();
    ensure(config.n_starts == 200, || format!("{} starts", config.n_starts))?;
    let start = Instant::now();
    let report = fit_report(&FamilyId::MODIFIED, &config)?;
    let elapsed = start.elapsed();
    let mut worst: f64 = 0.0;
    for (family, want) in expected {
        let got = neg_loglik(&report, family)?;
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= 0.05, || {
            format!("{family}: -logL {got} vs {want}")
        })?;
    }
    let ranks = &report.rankings.negloglik;
    let rank = |f: FamilyId| ranks.iter().find(|r| r.family == f).map(|r| r.rank);
    for f in [FamilyId::Mg, FamilyId::Mr18a, FamilyId::Mr18b] {
        ensure(rank(f) == Some(1), || format!("{f} ranked {:?}", rank(f)))?;
    }
    ensure(rank(FamilyId::Pareto) == Some(8), || "Pareto not last".into())?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "max |d(-logL)| {worst:.4}, triple tie at rank 1, {elapsed:.2?}"
    ))
}

fn criteria_arithmetic() -> Check {
    // (-logL, number of fitted parameters, AIC, AICC, BIC) as printed
    let rows: [(f64, usize, [&str; 3]); 16] = [
        (267.716, 3, ["541.432", "541.785", "548.262"]),
        (289.828, 2, ["583.656", "583.830", "588.209"]),
        (276.901, 3, ["559.802", "560.155", "566.632"]),
        (285.722, 3, ["577.444", "577.797", "584.274"]),
        (285.291, 2, ["574.582", "574.756", "579.135"]),
        (284.811, 3, ["575.622", "575.975", "582.452"]),
        (286.201, 2, ["576.402", "576.576", "580.955"]),
        (303.064, 1, ["608.128", "608.185", "610.405"]),
        (276.901, 3, ["559.802", "560.155", "566.632"]),
        (289.828, 2, ["583.656", "583.830", "588.209"]),
        (276.901, 3, ["559.802", "560.155", "566.632"]),
        (276.901, 3, ["559.802", "560.155", "566.632"]),
        (285.291, 2, ["574.582", "574.756", "579.135"]),
        (284.811, 3, ["575.622", "575.975", "582.452"]),
        (286.201, 2, ["576.402", "576.576", "580.955"]),
        (303.064, 1, ["608.128", "608.185", "610.405"]),
    ];
    for (nll, p, printed) in rows {
        let c = criteria(-nll, p, 72).map_err(|e| e.to_string())?;
        let got = [c.aic, c.aicc, c.bic].map(|v| format!("{v:.3}"));
        ensure(got == printed, || format!("-logL {nll}, p {p}: {got:?} vs {printed:?}"))?;
    }
    Ok(format!("{} values match", rows.len() * 3))
}

fn wheaton_summary() -> Check {
    let text = describe_cmd(&wheaton(), Format::Json).map_err(|e| e.to_string())?;
    let s: Summary = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let got = [s.min, s.q1, s.median, s.mean, s.q3, s.max].map(|v| format!("{v:.3}"));
    let want = ["0.100", "2.125", "9.500", "12.204", "20.125", "64.000"];
    ensure(s.n == 72, || format!("n = {}", s.n))?;
    ensure(got == want, || format!("{got:?}"))?;
    Ok(format!("n 72, {}", got.join(" ")))
}

fn pathology() -> Check {
    let params = Params::new(vec![0.059, -1.0]);
    let delta = FamilyId::G.to_delta(&params).map_err(|e| e.to_string())?;
    let base = ParetoBase::new(0.1, 0.48).map_err(|e| e.to_string())?;
    let d = CtpDistribution::new_unchecked(base, delta);
    // start just above x0, where the cdf is exactly zero
    let lo = 0.1 + 1e-9;
    let cdf_roots = sign_changes(|x| d.cdf(x), lo, 1.0, 10_000, 1e-12);
    let pdf_roots = sign_changes(|x| d.pdf(x), lo, 1.0, 10_000, 1e-12);
    ensure(cdf_roots.len() == 2 && pdf_roots.len() == 2, || {
        format!("cdf roots {cdf_roots:?}, pdf roots {pdf_roots:?}")
    })?;
    let near = |got: f64, want: f64| (got - want).abs() <= 0.001;
    ensure(near(cdf_roots[0], 0.1147) && near(cdf_roots[1], 0.3691), || {
        format!("cdf < 0 on {cdf_roots:?}")
    })?;
    ensure(near(pdf_roots[0], 0.1067) && near(pdf_roots[1], 0.2248), || {
        format!("pdf < 0 on {pdf_roots:?}")
    })?;
    Ok(format!(
        "cdf < 0 on [{:.7}, {:.7}], pdf < 0 on [{:.7}, {:.7}]",
        cdf_roots[0], cdf_roots[1], pdf_roots[0], pdf_roots[1]
    ))
}

fn random_valid(rng: &mut ChaCha8Rng, alpha: std::ops::Range<f64>) -> Ctp {
    loop {
        let delta = Delta::new(rng.random_range(0.0..3.0), rng.random_range(-3.0..3.0)).unwrap();
        if validity_check(&delta).is_valid {
            let base = ParetoBase::new(rng.random_range(0.2..5.0), rng.random_range(alpha.clone())).unwrap();
            return CtpDistribution::new(base, delta).unwrap();
        }
    }
}

fn validity_vs_grid() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let (d1, d2) = (rng.random_range(-2.0..4.0), rng.random_range(-7.0..4.0));
        let d3 = 1.0 - d1 - d2;
        let cert = validity_check(&Delta::new(d1, d2).unwrap());
        let (grid, _) = grid_min(|t| d1 + t * (2.0 * d2 + 3.0 * d3 * t), 0.0, 1.0, 1_000_000);
        ensure((grid - cert.min_value).abs() <= 1e-9, || {
            format!("({d1}, {d2}): closed form {} vs grid {grid}", cert.min_value)
        })?;
    }
    Ok(())
}

/// `E Xᵏ = x₀ᵏ ∫₀¹ u^(−k/α) S'(u) du` with `u = sᵐ` removing the endpoint singularity.
fn moment_by_quadrature(d: &Ctp, k: u32) -> f64 {
    let [b0, b1, b2] = d.delta().density_coefficients();
    let e = k as f64 / d.alpha();
    let m = (3.0 / (1.0 - e)).ceil();
    let (value, _) = integrate(
        |s| {
            let u = s.powf(m);
            m * s.powf(m * (1.0 - e) - 1.0) * (b0 + u * (b1 + u * b2))
        },
        0.0,
        1.0,
        0.0,
        1e-13,
        10_000,
    );
    d.x0().powi(k as i32) * value
}

fn moments_vs_quadrature() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1_000 {
        let d = random_valid(&mut rng, 3.2..9.0);
        for k in 1..=3 {
            let exact = raw_moment(&d, MomentOrder::new(k).unwrap()).map_err(|e| e.to_string())?;
            let quad = moment_by_quadrature(&d, k);
            ensure(((exact - quad) / exact).abs() <= 1e-8, || {
                format!("k {k} {d:?}: {exact} vs {quad}")
            })?;
        }
    }
    Ok(())
}

fn round_trips() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1_000 {
        let d = random_valid(&mut rng, 0.2..6.0);
        for i in 0..100 {
            let p = i as f64 / 100.0;
            let x = d.quantile(p).map_err(|e| e.to_string())?;
            ensure((d.cdf(x) - p).abs() <= 1e-10, || {
                format!("{d:?} p {p}: cdf {}", d.cdf(x))
            })?;
            let s = 1.0 - p;
            let y = d.inverse_survival(s).map_err(|e| e.to_string())?;
            ensure((d.survival(y) - s).abs() <= 1e-10 * s, || format!("{d:?} s {s}"))?;
        }
    }
    Ok(())
}

const MODIFIED_REGIONS: [FamilyId; 5] = [
    FamilyId::Mg,
    FamilyId::Ma,
    FamilyId::Mr18a,
    FamilyId::Mr18b,
    FamilyId::Mr19,
];

fn modified_regions_valid() -> Result<(), String> {
    for (i, family) in MODIFIED_REGIONS.into_iter().enumerate() {
        for params in family.region_sample::<f64>(10_000, 60 + i as u64) {
            let cert = validity_check(&family.to_delta(&params).map_err(|e| e.to_string())?);
            ensure(cert.is_valid, || format!("{family} {params:?}: min {}", cert.min_value))?;
        }
    }
    Ok(())
}

fn equivalent_images() -> Result<(), String> {
    let equivalent = [FamilyId::Mg, FamilyId::Mr18a, FamilyId::Mr18b];
    for (i, from) in equivalent.into_iter().enumerate() {
        for params in from.region_sample::<f64>(10_000, 70 + i as u64) {
            let delta = from.to_delta(&params).map_err(|e| e.to_string())?;
            for to in equivalent {
                let pre = to.from_delta(&delta).ok_or_else(|| format!("{to} has no preimage"))?;
                let inside = to.region_contains(&pre.params).map_err(|e| e.to_string())?;
                ensure(inside, || format!("{from} {params:?} maps outside {to}"))?;
            }
        }
    }
    Ok(())
}

/// Log-likelihoods written out in each family's own coordinates.
fn family_loglik(family: FamilyId, alpha: f64, p: &[f64], xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let x0 = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let sum_log: f64 = xs.iter().map(|x| x.ln()).sum();
    let bracket = |u: f64| -> f64 {
        match family {
            FamilyId::G | FamilyId::Mg => {
                (3.0 - p[0] - p[1]) + (2.0 * p[0] + 4.0 * p[1] - 6.0) * u + (3.0 - 3.0 * p[1]) * u * u
            }
            FamilyId::A | FamilyId::Ma => 1.0 - 2.0 * p[0] * u + 3.0 * p[0] * u * u,
            FamilyId::R18a | FamilyId::Mr18a => {
                (1.0 - p[0] - p[1]) + 2.0 * (p[0] + 2.0 * p[1]) * u - 3.0 * p[1] * u * u
            }
            FamilyId::R18b | FamilyId::Mr18b => (1.0 - p[0]) + 2.0 * (p[0] - p[1]) * u + 3.0 * p[1] * u * u,
            FamilyId::R19 | FamilyId::Mr19 => (1.0 - p[0]) + 6.0 * p[0] * u - 6.0 * p[0] * u * u,
            FamilyId::R23 => (1.0 - p[0]) + 2.0 * p[0] * (1.0 + p[1]) * u - 3.0 * p[0] * p[1] * u * u,
            FamilyId::Tp => (1.0 - p[0]) + 2.0 * p[0] * u,
            FamilyId::Pareto => 1.0,
        }
    };
    let log_brackets: f64 = xs.iter().map(|&x| bracket((x0 / x).powf(alpha)).ln()).sum();
    n * alpha.ln() + n * alpha * x0.ln() - (alpha + 1.0) * sum_log + log_brackets
}

fn loglik_vs_family_formulas() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data = wheaton().load().map_err(|e| e.to_string())?.values;
    let sample = Observations::new(data.clone()).map_err(|e| e.to_string())?;
    for family in FamilyId::ALL {
        for params in family.region_sample::<f64>(1_000, 80) {
            let alpha = rng.random_range(0.1..3.0);
            let want = family_loglik(family, alpha, params.values(), &data);
            let got = log_likelihood_unchecked(family, alpha, &params, &sample).map_err(|e| e.to_string())?;
            if want.is_nan() {
                ensure(got == f64::NEG_INFINITY, || format!("{family} {params:?}: {got}"))?;
                continue;
            }
            ensure((got - want).abs() <= 1e-10 * want.abs().max(1.0), || {
                format!("{family} {params:?} alpha {alpha}: {got} vs {want}")
            })?;
        }
    }
    Ok(())
}

fn ks_of_draws() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let d = random_valid(&mut rng, 0.3..4.0);
        let draws = d.sample(100_000, 42 + i).map_err(|e| e.to_string())?;
        let ks = ks_statistic(&draws, |x| d.cdf(x));
        worst = worst.max(ks);
        ensure(ks < 0.006, || format!("{d:?}: KS {ks}"))?;
    }
    Ok(worst)
}

fn property_suite() -> Check {
    let start = Instant::now();
    let parts: [(&str, Part); 6] = [
        ("a", validity_vs_grid),
        ("b", moments_vs_quadrature),
        ("c", round_trips),
        ("d", modified_regions_valid),
        ("e", equivalent_images),
        ("f", loglik_vs_family_formulas),
    ];
    let mut timings = Vec::new();
    for (name, check) in parts {
        let t = Instant::now();
        check().map_err(|e| format!("({name}) {e}"))?;
        timings.push(format!("{name} {:.1}s", t.elapsed().as_secs_f64()));
    }
    let t = Instant::now();
    let ks = ks_of_draws().map_err(|e| format!("(g) {e}"))?;
    timings.push(format!("g {:.1}s", t.elapsed().as_secs_f64()));
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "(a)-(g) hold, max KS {ks:.4}, {elapsed:.1?} [{}]",
        timings.join(", ")
    ))
}

fn grouped_ranking() -> Check {
    // four synthetic "years" drawn from different members of the modified families
    let truths = [
        (FamilyId::Ma, 0.8, vec![-0.6]),
        (FamilyId::Mr19, 1.2, vec![0.7]),
        (FamilyId::Mg, 1.0, vec![0.5, 0.5]),
        (FamilyId::Pareto, 0.6, vec![]),
    ];
    let mut file = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
    for (i, (family, alpha, params)) in truths.iter().enumerate() {
        let d = family
            .distribution(1.0, *alpha, &Params::new(params.clone()))
            .map_err(|e| e.to_string())?;
        for x in d.sample(150, 100 + i as u64).map_err(|e| e.to_string())? {
            writeln!(file, "{},{x}", 2001 + i).map_err(|e| e.to_string())?;
        }
    }
    let config = FitConfig {
        n_starts: 20,
        ..FitConfig::default()
    };
    let families = FamilyId::MODIFIED;
    let source = DatasetSource::File(FileSource {
        column: 1,
        ..FileSource::new(file.path())
    });
    let json = compare_groups_cmd(&source, 0, &families, &config, Criterion::NegLogLik, Format::Json)
        .map_err(|e| e.to_string())?;
    let report: serde_json::Value = serde_json::from_str(&json).map_err(|e| e.to_string())?;
    let groups = report["groups"].as_array().ok_or("no groups")?;
    ensure(groups.len() == truths.len(), || format!("{} groups", groups.len()))?;

    let mut ties = 0;
    for (g, year) in groups.iter().zip(2001..) {
        ensure(g["label"].as_str() == Some(year.to_string().as_str()), || {
            format!("group order {}", g["label"])
        })?;
        let ranks: Vec<usize> = g["ranks"]
            .as_array()
            .ok_or("no ranks")?
            .iter()
            .map(|r| r[1].as_u64().map(|v| v as usize).ok_or("unranked family"))
            .collect::<Result<_, _>>()?;
        // competition ranking: the k-th smallest rank is k unless it ties the one before
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        for (k, pair) in sorted.windows(2).enumerate() {
            ensure(pair[1] == pair[0] || pair[1] == k + 2, || {
                format!("{year}: ranks {ranks:?}")
            })?;
        }
        ensure(sorted[0] == 1, || format!("{year}: ranks {ranks:?}"))?;

        // recompute from the fits: tied values share the smallest rank
        let values: Vec<f64> = source
            .load_groups(0)
            .map_err(|e| e.to_string())?
            .into_iter()
            .find(|d| d.name == year.to_string())
            .map(|d| d.values)
            .ok_or("group vanished")?;
        let sample = Observations::new(values).map_err(|e| e.to_string())?;
        let fits: Vec<_> = compare_families(&sample, &families, &config)
            .into_iter()
            .map(|(_, r)| r.map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let direct = rank_models(&fits, Criterion::NegLogLik);
        for (family, rank) in families.iter().zip(&ranks) {
            let m = direct.iter().find(|m| m.family == *family).ok_or("missing family")?;
            ensure(m.rank == *rank, || format!("{year} {family}: {rank} vs {}", m.rank))?;
        }
        for a in &direct {
            for b in &direct {
                if (a.value - b.value).abs() <= 1e-9 {
                    ensure(a.rank == b.rank, || {
                        format!("{year}: {} and {} tie but differ", a.family, b.family)
                    })?;
                }
            }
        }
        ties += sorted.windows(2).filter(|p| p[0] == p[1]).count();
    }
    Ok(format!("{} groups consistent, {ties} tied pairs", groups.len()))
}

fn main() -> ExitCode {
    let criteria: [Acceptance; 7] = [
        ("Pareto fit on Wheaton", pareto_fit),
        ("modified-family comparison", modified_comparison),
        ("information-criteria arithmetic", criteria_arithmetic),
        ("Wheaton descriptive statistics", wheaton_summary),
        ("negative cdf/pdf of the unchecked general fit", pathology),
        ("property suite", property_suite),
        ("per-group ranking consistency", grouped_ranking),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
