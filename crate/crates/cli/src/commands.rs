use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use toeplab::domains::RegionSpec;
use toeplab::experiments::{
    check_delta_window, effective_tail_experiment, jordan_annulus_trial, median, potential_compare,
    pseudospectrum_grid, quasimode_decay_experiment, render_svg, run_campaign, tube_radius,
    write_eigen_csv, write_grid, write_jsonl, Bbox, EigenDump, TrialOutcome, TrialRecord,
    WeylSetup,
};
use toeplab::grushin::{
    alpha, effective_det_factorization, grushin_blocks, perturbed_det_factorization, phi, psi,
    singular_values_e_pm, DEFAULT_C_PSI,
};
use toeplab::linalg::{eigenvalues, smallest_singular_value};
use toeplab::operators::{build_toeplitz, circulant_spectrum, kernel_k_n, InfiniteKernel};
use toeplab::quasimode::build_quasimode;
use toeplab::randmat::{perturb as add_noise, sample_gaussian_matrix, SeededStream};
use toeplab::symbol::{CurveGrid, DIST_GRID};
use toeplab::{Error, OperatorSpec, Result, C64};

use crate::config::RunConfig;
use crate::Experiment;

const CURVE_SAMPLES: usize = 2048;

fn warn_window(spec: &OperatorSpec, delta: f64, cfg: &RunConfig) -> Result<()> {
    if delta > 0.0 {
        let m = spec.symbol.n_plus() + spec.symbol.n_minus();
        if let Some(w) = check_delta_window(spec.n, m, delta, cfg.epsilon0()?) {
            eprintln!("warning: {w}");
        }
    }
    Ok(())
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn curve_samples(spec: &OperatorSpec) -> Vec<C64> {
    CurveGrid::new(&spec.symbol, CURVE_SAMPLES)
        .samples()
        .to_vec()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn emit_trials(
    cfg: &RunConfig,
    spec: &OperatorSpec,
    outcomes: &[TrialOutcome],
    records: &[TrialRecord],
    stem: &str,
) -> Result<()> {
    let dir = out_dir(cfg)?;
    if cfg.emits("jsonl") {
        let path = dir.join(format!("{stem}.jsonl"));
        let mut w = BufWriter::new(File::create(&path)?);
        write_jsonl(&mut w, records)?;
        w.flush()?;
        println!("wrote {}", path.display());
    }
    if cfg.emits("csv") {
        let path = dir.join(format!("{stem}_eigenvalues.csv"));
        let grid = CurveGrid::new(&spec.symbol, DIST_GRID);
        let dumps: Vec<EigenDump<'_>> = outcomes
            .iter()
            .map(|o| EigenDump {
                trial: o.record.trial_index,
                eigenvalues: &o.eigenvalues,
            })
            .collect();
        let mut w = BufWriter::new(File::create(&path)?);
        write_eigen_csv(&mut w, &dumps, &grid)?;
        w.flush()?;
        println!("wrote {}", path.display());
    }
    if cfg.emits("svg") {
        if let Some(first) = outcomes.first() {
            let title = format!(
                "N = {}, delta = {:e}, trial {}",
                spec.n, first.record.delta, first.record.trial_index
            );
            let svg = render_svg(&first.eigenvalues, &curve_samples(spec), &title);
            write_text(&dir.join(format!("{stem}.svg")), &svg)?;
        }
    }
    Ok(())
}

fn print_points(points: &[C64]) {
    for z in points {
        println!("{} {}", z.re, z.im);
    }
}

pub fn spectrum(cfg: &RunConfig, circulant: bool) -> Result<()> {
    if circulant {
        print_points(&circulant_spectrum(&cfg.symbol()?, cfg.n()?));
        return Ok(());
    }
    let spec = cfg.operator()?;
    let delta = cfg.delta()?;
    let m = if delta > 0.0 {
        warn_window(&spec, delta, cfg)?;
        let q = sample_gaussian_matrix(spec.n, &SeededStream::new(cfg.seed_required()?, 0));
        add_noise(&build_toeplitz(&spec), delta, &q)?
    } else {
        build_toeplitz(&spec)
    };
    print_points(&eigenvalues(&m)?);
    Ok(())
}

fn campaign(cfg: &RunConfig, regions: &[RegionSpec], stem: &str) -> Result<()> {
    let spec = cfg.operator()?;
    let delta = cfg.delta()?;
    warn_window(&spec, delta, cfg)?;
    let seed = cfg.seed.unwrap_or(0);
    let trials = cfg.trials()?;
    let probes = cfg.probes()?;
    let setups = regions
        .iter()
        .map(|r| WeylSetup::new(&spec, delta, r, &probes))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = run_campaign(&setups[0], seed, trials)?;
    let mut records = Vec::new();
    for setup in &setups {
        let recs: Vec<TrialRecord> = outcomes.iter().map(|o| setup.recount(o)).collect();
        let observed: Vec<f64> = recs.iter().map(|r| r.observed_count as f64).collect();
        let rel: Vec<f64> = recs
            .iter()
            .map(|r| {
                (r.observed_count as f64 - r.predicted_count).abs() / r.predicted_count.max(1.0)
            })
            .collect();
        println!(
            "region {}: predicted {:.2}, median observed {}, median relative error {:.4}, median outside {}",
            setup.region_spec,
            setup.predicted_count,
            median(&observed),
            median(&rel),
            median(&recs.iter().map(|r| r.outside_count as f64).collect::<Vec<_>>())
        );
        records.extend(recs);
    }
    let q90: Vec<f64> = outcomes
        .iter()
        .map(|o| o.record.distance_quantiles.q90)
        .collect();
    println!("median q90 distance to curve: {:.6}", median(&q90));
    for o in &outcomes {
        if let Some(ms) = o.record.runtime_ms {
            eprintln!("trial {}: {:.0} ms", o.record.trial_index, ms);
        }
    }
    emit_trials(cfg, &spec, &outcomes, &records, stem)
}

pub fn perturb(cfg: &RunConfig) -> Result<()> {
    cfg.seed_required()?;
    let cfg = RunConfig {
        trials: Some(1),
        ..cfg.clone()
    };
    campaign(&cfg, &[RegionSpec::Whole], "perturb")
}

pub fn weyl(cfg: &RunConfig) -> Result<()> {
    let mut regions = cfg.regions()?;
    if regions.is_empty() {
        regions.push(RegionSpec::Whole);
    }
    campaign(cfg, &regions, "weyl")
}

pub fn tube(cfg: &RunConfig) -> Result<()> {
    let n = cfg.n()?;
    let tau = tube_radius(n, cfg.epsilon());
    println!("tube radius tau = N^(-1+epsilon) = {tau:e}");
    campaign(cfg, &[RegionSpec::Tube { tau }], "tube")
}

pub fn pseudo(cfg: &RunConfig) -> Result<()> {
    let spec = cfg.operator()?;
    let bbox = match cfg.bbox()? {
        Some([x_min, x_max, y_min, y_max]) => Bbox {
            x_min,
            x_max,
            y_min,
            y_max,
        },
        None => {
            let c = curve_samples(&spec);
            let (mut b, pad) = (
                Bbox {
                    x_min: f64::INFINITY,
                    x_max: f64::NEG_INFINITY,
                    y_min: f64::INFINITY,
                    y_max: f64::NEG_INFINITY,
                },
                0.2,
            );
            for z in &c {
                b.x_min = b.x_min.min(z.re);
                b.x_max = b.x_max.max(z.re);
                b.y_min = b.y_min.min(z.im);
                b.y_max = b.y_max.max(z.im);
            }
            let (w, h) = (b.x_max - b.x_min, b.y_max - b.y_min);
            Bbox {
                x_min: b.x_min - pad * w,
                x_max: b.x_max + pad * w,
                y_min: b.y_min - pad * h,
                y_max: b.y_max + pad * h,
            }
        }
    };
    let delta = cfg.delta()?;
    let perturbation = if delta > 0.0 {
        Some((delta, SeededStream::new(cfg.seed_required()?, 0)))
    } else {
        None
    };
    let grid = pseudospectrum_grid(
        &spec,
        bbox,
        cfg.nx.unwrap_or(64),
        cfg.ny.unwrap_or(64),
        perturbation,
    )?;
    let values: Vec<f64> = grid.log10_smin.iter().flatten().copied().collect();
    let missing = grid.log10_smin.len() - values.len();
    println!(
        "log10 s_min in [{:.3}, {:.3}], {} missing nodes",
        values.iter().copied().fold(f64::INFINITY, f64::min),
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        missing
    );
    let dir = out_dir(cfg)?;
    let (csv, json) = (dir.join("pseudo.csv"), dir.join("pseudo.json"));
    write_grid(&grid, &csv, &json)?;
    println!("wrote {}\nwrote {}", csv.display(), json.display());
    Ok(())
}

fn probes_required(cfg: &RunConfig) -> Result<Vec<C64>> {
    let z = cfg.probes()?;
    if z.is_empty() {
        return Err(Error::Config("at least one --z is required".into()));
    }
    Ok(z)
}

fn fmt_c(z: C64) -> String {
    format!("{:+.12e}{:+.12e}i", z.re, z.im)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.6e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn kernel(cfg: &RunConfig) -> Result<()> {
    let sym = cfg.symbol()?;
    let spec = match cfg.n {
        Some(_) => Some(cfg.operator()?),
        None => None,
    };
    for z in probes_required(cfg)? {
        let kinf = InfiniteKernel::new(&sym, z)?;
        println!(
            "z = {z}, m_+ = {}, m_- = {}",
            kinf.split().m_plus,
            kinf.split().m_minus
        );
        for k in cfg.k_values()? {
            let value = kinf.eval(k)?;
            let mut line = format!("k = {k:>4}  K_inf = {}", fmt_c(value));
            if let Some(r) = kinf.residue(k) {
                line += &format!(
                    "  (residue {}, quadrature {})",
                    fmt_c(r),
                    fmt_c(kinf.quadrature(k)?)
                );
            }
            if let Some(spec) = &spec {
                line += &format!("  K_N = {}", fmt_c(kernel_k_n(spec, z, k)?));
            }
            println!("{line}");
        }
    }
    Ok(())
}

pub fn grushin(cfg: &RunConfig, check_factorization: bool) -> Result<()> {
    let spec = cfg.operator()?;
    let delta = cfg.delta()?;
    let c_psi = cfg.c_psi.unwrap_or(DEFAULT_C_PSI);
    for z in probes_required(cfg)? {
        let blocks = grushin_blocks(&spec, z)?;
        let (sp, sm) = singular_values_e_pm(&blocks)?;
        println!(
            "z = {z}, N = {}, N~ = {}, |J| = {}",
            spec.n,
            spec.n_tilde(),
            spec.j_len()
        );
        println!(
            "alpha = {:.12e}  phi = {:.12e}  psi = {:.12e}",
            alpha(&spec, z),
            phi(&spec, z)?,
            psi(&spec, z, c_psi)?
        );
        println!("singular values E_+ : {}", fmt_list(&sp));
        println!("singular values E_-*: {}", fmt_list(&sm));
        if check_factorization {
            let (lhs, rhs) = if delta > 0.0 {
                let q = sample_gaussian_matrix(spec.n, &SeededStream::new(cfg.seed_required()?, 0));
                let f = perturbed_det_factorization(&spec, z, &q, delta)?;
                println!("log|det(1 + E dQ)| = {:.12e}", f.correction);
                (f.lhs, f.rhs)
            } else {
                effective_det_factorization(&spec, z)?
            };
            println!("lhs = {lhs:.15e}");
            println!("rhs = {rhs:.15e}");
            println!("|lhs - rhs| = {:.3e}", (lhs - rhs).abs());
        }
    }
    Ok(())
}

pub fn quasimode(cfg: &RunConfig) -> Result<()> {
    let sym = cfg.symbol()?;
    let ns = cfg.n_sweep()?;
    for z in probes_required(cfg)? {
        if ns.len() > 1 {
            let d = quasimode_decay_experiment(&sym, z, &ns)?;
            for (n, r) in &d.rows {
                println!("z = {z}  N = {n}  residual = {r:.6e}");
            }
            println!(
                "fit ln(residual) = {:.6} N + {:.6}, R^2 = {:.6}",
                d.fit.slope, d.fit.intercept, d.fit.r_squared
            );
        } else {
            let spec = OperatorSpec::new(sym.clone(), ns[0])?;
            let q = build_quasimode(&spec, z)?;
            let mut m = build_toeplitz(&spec).shifted(z);
            if q.side == toeplab::quasimode::Side::DecayingLeft {
                m = m.adjoint();
            }
            println!(
                "z = {z}  N = {}  side = {:?}  residual = {:.6e}  s_min = {:.6e}",
                spec.n,
                q.side,
                q.residual,
                smallest_singular_value(&m)?
            );
        }
    }
    Ok(())
}

pub fn potential(cfg: &RunConfig) -> Result<()> {
    let spec = cfg.operator()?;
    let delta = cfg.delta()?;
    let seed = if delta > 0.0 {
        cfg.seed_required()?
    } else {
        cfg.seed.unwrap_or(0)
    };
    let probes = probes_required(cfg)?;
    for p in potential_compare(&spec, delta, &probes, &SeededStream::new(seed, 0))? {
        println!(
            "z = {}  U_xi_N = {:.10}  U_xi = {:.10}  phi = {:.10}  |U_xi_N - U_xi| = {:.3e}",
            C64::new(p.re, p.im),
            p.u_xi_n,
            p.u_xi,
            p.phi,
            (p.u_xi_n - p.u_xi).abs()
        );
    }
    Ok(())
}

pub fn montecarlo(cfg: &RunConfig, experiment: Experiment) -> Result<()> {
    let seed = cfg.seed_required()?;
    let sym = cfg.symbol();
    let ns = cfg.n_sweep()?;
    let deltas = cfg.deltas()?;
    if deltas.is_empty() {
        return Err(Error::Config(
            "--delta is required (one value or a ladder)".into(),
        ));
    }
    let trials = cfg.trials()?;
    let dir = out_dir(cfg)?;
    let path = dir.join("montecarlo.jsonl");
    let mut w = BufWriter::new(File::create(&path)?);
    for &n in &ns {
        for &delta in &deltas {
            let run = RunConfig {
                n: Some(n),
                delta: Some(vec![delta]),
                ..cfg.clone()
            };
            match experiment {
                Experiment::Weyl | Experiment::Tube => {
                    let spec = run.operator()?;
                    warn_window(&spec, delta, cfg)?;
                    let regions = if matches!(experiment, Experiment::Tube) {
                        vec![RegionSpec::Tube {
                            tau: tube_radius(n, cfg.epsilon()),
                        }]
                    } else {
                        let r = cfg.regions()?;
                        if r.is_empty() {
                            vec![RegionSpec::Whole]
                        } else {
                            r
                        }
                    };
                    let probes = cfg.probes()?;
                    let setups = regions
                        .iter()
                        .map(|r| WeylSetup::new(&spec, delta, r, &probes))
                        .collect::<Result<Vec<_>>>()?;
                    let outcomes = run_campaign(&setups[0], seed, trials)?;
                    for setup in &setups {
                        let recs: Vec<TrialRecord> =
                            outcomes.iter().map(|o| setup.recount(o)).collect();
                        write_jsonl(&mut w, &recs)?;
                        let q90: Vec<f64> = recs.iter().map(|r| r.distance_quantiles.q90).collect();
                        let obs: Vec<f64> = recs.iter().map(|r| r.observed_count as f64).collect();
                        println!(
                            "N = {n}  delta = {delta:e}  region {}  predicted {:.2}  median observed {}  median q90 {:.6}",
                            setup.region_spec,
                            setup.predicted_count,
                            median(&obs),
                            median(&q90)
                        );
                    }
                }
                Experiment::Tail => {
                    let spec = run.operator()?;
                    let probes = probes_required(cfg)?;
                    let table = effective_tail_experiment(
                        &spec,
                        delta,
                        &probes,
                        trials,
                        cfg.epsilon0()?,
                        seed,
                    )?;
                    for p in &table.probes {
                        if !p.cubic_condition {
                            eprintln!(
                                "warning: delta <= alpha/(C1 N)^3 fails at z = {} (alpha = {:e})",
                                C64::new(p.re, p.im),
                                p.alpha
                            );
                        }
                        println!(
                            "N = {n}  delta = {delta:e}  z = {}  alpha = {:.4e}  frequency(log|det E|^2 >= -{:.2}) = {:.4}",
                            C64::new(p.re, p.im),
                            p.alpha,
                            table.threshold,
                            p.frequency
                        );
                    }
                    write_jsonl(&mut w, std::slice::from_ref(&table))?;
                }
                Experiment::Jordan => {
                    if let Ok(s) = &sym {
                        let jordan = toeplab::symparse::parse_symbol(
                            "z^-1",
                            toeplab::symparse::Convention::Direct,
                        )?;
                        if *s != jordan {
                            eprintln!(
                                "note: the jordan experiment always uses the symbol {{a_-1 = 1}}"
                            );
                        }
                    }
                    let sigma = cfg.sigma.unwrap_or(0.2);
                    let rows = (0..trials)
                        .map(|k| jordan_annulus_trial(n, delta, sigma, &SeededStream::new(seed, k)))
                        .collect::<Result<Vec<_>>>()?;
                    let outside: Vec<f64> = rows.iter().map(|r| r.outside as f64).collect();
                    println!(
                        "N = {n}  delta = {delta:e}  annulus [{:.6}, {:.6}]  median outside {}",
                        rows[0].r_lo,
                        rows[0].r_hi,
                        median(&outside)
                    );
                    write_jsonl(&mut w, &rows)?;
                }
            }
        }
    }
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}
