//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so every line is shown.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};

use qcat_core::asymptotic::{
    asymptotic_entropy, combine_lobe_entropy, entropy_from_ratio, ratio_general_theta, select_ground_lobes,
    GaussianLobe, LobeSet, Superposition, WeightedLobe,
};
use qcat_core::fixed_points::find_fixed_points;
use qcat_core::numerics::fock_hamiltonian::cusp_fock_entropy;
use qcat_core::numerics::pipeline::refine_1d;
use qcat_core::numerics::{
    beam_splitter_rotate, finite_mu_entropy, reduced_density_matrix, von_neumann_entropy, Harmonic, NumericSettings,
    TwoModeState,
};
use qcat_core::potential::butterfly_default_a4;
use qcat_core::sweep::{fit_power_law, locate_peak_numeric, sweep_entropy, FitForm, ParamRange};
use qcat_core::CatastrophePotential;

type Outcome = Result<String, String>;

fn pass_if(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn single_lobe_value() -> Outcome {
    let s = entropy_from_ratio(ratio_general_theta(2.0, FRAC_PI_2).map_err(err)?).map_err(err)?;
    pass_if((s - 0.197).abs() <= 0.001, format!("S = {s:.6}, want 0.197 +- 0.001"))
}

fn butterfly_triple_point() -> Outcome {
    let a4 = butterfly_default_a4();
    let s = |a2: f64| {
        CatastrophePotential::butterfly(a2, a4, 1.0)
            .and_then(|p| asymptotic_entropy(&p))
            .map_err(err)
    };
    let (at, below, above) = (s(1.0)?, s(1.0 - 1e-6)?, s(1.0 + 1e-6)?);
    // Above the crossing the single central lobe has eps = sqrt(A2) = 1 + 5e-7,
    // whose Gaussian entropy is of order 1e-12.
    pass_if(
        (at - 1.716).abs() <= 0.002 && (below - 1.197).abs() <= 0.002 && above <= 1e-9,
        format!(
            "S(1) = {at:.6} (1.716 +- 0.002), S(1-1e-6) = {below:.6} (1.197 +- 0.002), S(1+1e-6) = {above:.2e} (0)"
        ),
    )
}

fn molar_lobe_algebra() -> Outcome {
    for i in 1..=40 {
        let gamma = 1.0 + 0.05 * i as f64;
        let p = CatastrophePotential::molar(-1.0, gamma, 4.0).map_err(err)?;
        let lobes = select_ground_lobes(&p, &find_fixed_points(&p).map_err(err)?).map_err(err)?;
        let c = combine_lobe_entropy(&lobes.clone().with_kind(Superposition::Coherent)).map_err(err)?;
        let i = combine_lobe_entropy(&lobes.with_kind(Superposition::Incoherent)).map_err(err)?;
        if c != 1.0 || i != 1.5 {
            return Err(format!("gamma = {gamma}: coherent {c}, incoherent {i}"));
        }
    }
    Ok("coherent S = 1, incoherent S = 1.5 exactly for 40 gamma in (1, 3]".into())
}

fn cusp_divergence() -> Outcome {
    let pts: Vec<(f64, f64)> = [1e-2f64, 1e-4, 1e-6]
        .iter()
        .map(|&a| {
            let s = asymptotic_entropy(&CatastrophePotential::cusp(a, 1.0).map_err(err)?).map_err(err)?;
            Ok((a.log2(), s))
        })
        .collect::<Result<_, String>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let nu = -slope;
    pass_if((nu - 0.25).abs() <= 0.01, format!("nu = {nu:.5}, want 0.25 +- 0.01"))
}

fn gaussian_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [0.5, 2.0, 4.0] {
        let num = refine_1d(&Harmonic { epsilon: eps }, FRAC_PI_2, &NumericSettings::default())
            .map_err(err)?
            .entropy;
        let exact = entropy_from_ratio(ratio_general_theta(eps, FRAC_PI_2).map_err(err)?).map_err(err)?;
        worst = worst.max((num - exact).abs());
    }
    pass_if(
        worst < 1e-4,
        format!("max |S_num - S_exact| = {worst:.2e}, want < 1e-4"),
    )
}

fn fock_cross_validation() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (a, mu) in [(-1.0, 10.0), (2.0, 10.0)] {
        let fock = cusp_fock_entropy(a, mu).map_err(err)?;
        let grid = finite_mu_entropy(&CatastrophePotential::cusp(a, mu).map_err(err)?).map_err(err)?;
        ok &= (fock - grid).abs() < 1e-3;
        parts.push(format!("(A={a}, mu={mu}): |dS| = {:.2e}", (fock - grid).abs()));
    }
    pass_if(ok, parts.join(", ") + ", want < 1e-3")
}

fn finite_mu_convergence() -> Outcome {
    let mus = [10.0, 20.0, 40.0, 70.0];
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [-2.0, -1.0, 1.0, 2.0] {
        let s_inf = asymptotic_entropy(&CatastrophePotential::cusp(a, 1.0).map_err(err)?).map_err(err)?;
        let d: Vec<f64> = mus
            .iter()
            .map(|&mu| {
                let s = finite_mu_entropy(&CatastrophePotential::cusp(a, mu).map_err(err)?).map_err(err)?;
                Ok((s - s_inf).abs())
            })
            .collect::<Result<_, String>>()?;
        ok &= d[3] < 0.05 && d.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!("A={a}: {:.4} {:.4} {:.4} {:.4}", d[0], d[1], d[2], d[3]));
    }
    pass_if(
        ok,
        parts.join("; ") + " (mu = 10,20,40,70; want decreasing, < 0.05 at 70)",
    )
}

/// Position of the entropy maximum nearest `anchor` per `mu`, or the reason
/// none was found.
fn peaks(
    template: &CatastrophePotential,
    param: &str,
    range: ParamRange,
    anchor: f64,
    mus: &[f64],
) -> Vec<(f64, Result<f64, String>)> {
    let settings = NumericSettings::default();
    mus.iter()
        .map(|&mu| {
            let r = sweep_entropy(template, param, range, mu, &settings)
                .and_then(|sr| locate_peak_numeric(template, &sr, Some(anchor), &settings))
                .map(|p| p.param)
                .map_err(err);
            (mu, r)
        })
        .collect()
}

fn describe(found: &[(f64, Result<f64, String>)]) -> String {
    found
        .iter()
        .map(|(mu, r)| match r {
            Ok(x) => format!("mu={mu}: {x:.5}"),
            Err(e) => format!("mu={mu}: {e}"),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn bracketed(found: &[(f64, Result<f64, String>)]) -> Vec<(f64, f64)> {
    found
        .iter()
        .filter_map(|(mu, r)| r.as_ref().ok().map(|x| (*mu, *x)))
        .collect()
}

fn cusp_peak_scaling() -> Outcome {
    let t = CatastrophePotential::cusp(-0.5, 10.0).map_err(err)?;
    let found = peaks(
        &t,
        "A",
        ParamRange::new(-0.9, 0.0, 46).map_err(err)?,
        0.0,
        &[10.0, 20.0, 40.0, 70.0],
    );
    let pts = bracketed(&found);
    let fit = fit_power_law(&pts, FitForm::Plain, 0.0).map_err(|e| format!("{}; fit: {e}", describe(&found)))?;
    let slope = fit.c1.abs();
    let complete = pts.len() == found.len();
    let note = if complete { "" } else { " [fit over bracketed mu only]" };
    pass_if(
        complete && (slope - 0.75).abs() <= 0.10,
        format!("{}; |slope| = {slope:.4}, want 0.75 +- 0.10{note}", describe(&found)),
    )
}

fn butterfly_peak_scaling() -> Outcome {
    let t = CatastrophePotential::butterfly(0.9, butterfly_default_a4(), 10.0).map_err(err)?;
    let found = peaks(
        &t,
        "A2",
        ParamRange::new(0.7, 1.02, 65).map_err(err)?,
        1.0,
        &[5.0, 7.0, 10.0, 20.0],
    );
    let pts = bracketed(&found);
    let fit = fit_power_law(&pts, FitForm::Offset, 1.0).map_err(|e| format!("{}; fit: {e}", describe(&found)))?;
    pass_if(
        pts.len() == found.len() && (fit.c1 - 1.90).abs() <= 0.25 && fit.c0 < 0.0,
        format!(
            "{}; c0 = {:.4} (< 0), c1 = {:.4} (1.90 +- 0.25)",
            describe(&found),
            fit.c0,
            fit.c1
        ),
    )
}

fn molar_curve() -> Outcome {
    let t = CatastrophePotential::molar(-1.0, 2.0, 1.0).map_err(err)?;
    let sr = sweep_entropy(
        &t,
        "gamma",
        ParamRange::new(0.2, 3.0, 141).map_err(err)?,
        f64::INFINITY,
        &NumericSettings::default(),
    )
    .map_err(err)?;
    let plateau = sr
        .points
        .iter()
        .filter(|p| p.param > 1.0)
        .all(|p| p.entropy_bits == 1.0);
    let near = asymptotic_entropy(&CatastrophePotential::molar(-1.0, 0.999, 1.0).map_err(err)?).map_err(err)?;
    let finite = finite_mu_entropy(&CatastrophePotential::molar(-1.0, 2.0, 30.0).map_err(err)?).map_err(err)?;
    let tm = CatastrophePotential::molar(-1.0, 2.0, 10.0).map_err(err)?;
    let found = peaks(
        &tm,
        "gamma",
        ParamRange::new(0.95, 7.95, 71).map_err(err)?,
        1.0,
        &[10.0, 20.0, 30.0],
    );
    let shifts: Vec<f64> = bracketed(&found).iter().map(|p| p.1 - 1.0).collect();
    let decreasing = shifts.len() == found.len() && shifts.windows(2).all(|w| w[1] < w[0]);
    pass_if(
        plateau && near > 3.0 && (finite - 1.0).abs() <= 0.15 && decreasing,
        format!(
            "plateau S = 1 for gamma > 1: {plateau}; S(0.999) = {near:.4} (> 3); \
             S(mu=30, gamma=2) = {finite:.4} (1 +- 0.15); gamma*: {} (gamma*-1 decreasing: {decreasing})",
            describe(&found)
        ),
    )
}

fn lobe_set_strategy() -> impl Strategy<Value = (LobeSet, f64, f64)> {
    (1usize..6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.05f64..1.0, n),
                prop::collection::vec(0i32..3, n),
                prop::collection::vec(0i32..3, n),
                prop::collection::vec(0.0f64..2.0, n),
                any::<bool>(),
            )
        })
        .prop_map(|(w, kept, traced, s, coherent)| {
            let total: f64 = w.iter().sum();
            let lobes: Vec<WeightedLobe> = (0..w.len())
                .map(|i| WeightedLobe {
                    lobe: GaussianLobe {
                        center: vec![kept[i] as f64, traced[i] as f64],
                        epsilons: vec![1.0, 1.0],
                        mode_angle: 0.0,
                        ratio: 1.0,
                        entropy_bits: s[i],
                    },
                    weight: w[i] / total,
                    kept: kept[i] as f64,
                    traced: traced[i] as f64,
                })
                .collect();
            let orthogonal = (0..kept.len()).all(|i| (i + 1..kept.len()).all(|j| kept[i] != kept[j]));
            let lower: f64 = lobes.iter().map(|l| l.weight * l.lobe.entropy_bits).sum();
            let upper = lower - lobes.iter().map(|l| l.weight * l.weight.log2()).sum::<f64>();
            let kind = if coherent {
                Superposition::Coherent
            } else {
                Superposition::Incoherent
            };
            (
                LobeSet {
                    lobes,
                    kind,
                    pairwise_orthogonal: orthogonal,
                },
                lower,
                upper,
            )
        })
}

fn normalized_amplitudes(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n + 1).prop_filter_map("zero vector", |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| v.iter().map(|x| x / norm).collect())
    })
}

fn named<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn invariant_suites() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 128,
        failure_persistence: None,
        ..Config::default()
    });

    named(
        "lobe entropy bounds",
        runner.run(&lobe_set_strategy(), |(ls, lo, hi)| {
            let s = combine_lobe_entropy(&ls).unwrap();
            prop_assert!(s >= lo - 1e-9 && s <= hi + 1e-9, "{lo} <= {s} <= {hi}");
            Ok(())
        }),
    )?;
    named(
        "eps <-> 1/eps symmetry",
        runner.run(&(0.01f64..100.0), |eps| {
            prop_assume!((eps - 1.0).abs() > 1e-6);
            let a = ratio_general_theta(eps, FRAC_PI_2).unwrap();
            let b = ratio_general_theta(1.0 / eps, FRAC_PI_2).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
            Ok(())
        }),
    )?;
    named(
        "theta = pi/2 maximality",
        runner.run(&(0.05f64..20.0, 0.001f64..(PI - 0.001)), |(eps, theta)| {
            prop_assume!((eps - 1.0).abs() > 1e-6);
            let best = ratio_general_theta(eps, FRAC_PI_2).unwrap();
            prop_assert!(ratio_general_theta(eps, theta).unwrap() >= best * (1.0 - 1e-12));
            Ok(())
        }),
    )?;
    named(
        "beam-splitter unitarity and number conservation",
        runner.run(
            &((0usize..=60).prop_flat_map(normalized_amplitudes), -PI..PI),
            |(c, theta)| {
                let TwoModeState::Fock { amps } = beam_splitter_rotate(&c, theta) else {
                    panic!("Fock state expected");
                };
                let mut weights = vec![0.0; c.len()];
                for i in 0..amps.nrows() {
                    for j in 0..amps.ncols() {
                        let p = amps[(i, j)] * amps[(i, j)];
                        if p > 0.0 {
                            prop_assert!(i + j < c.len(), "amplitude outside the n-excitation sector");
                            weights[i + j] += p;
                        }
                    }
                }
                for (n, (&w, &cn)) in weights.iter().zip(&c).enumerate() {
                    prop_assert!((w - cn * cn).abs() < 1e-12, "sector {n}: {w} vs {}", cn * cn);
                }
                Ok(())
            },
        ),
    )?;
    named(
        "Schmidt symmetry",
        runner.run(
            &((1usize..=40).prop_flat_map(normalized_amplitudes), 0.1f64..3.0),
            |(c, theta)| {
                let s = beam_splitter_rotate(&c, theta);
                let s1 = von_neumann_entropy(&reduced_density_matrix(&s, 1).unwrap()).unwrap();
                let s0 = von_neumann_entropy(&reduced_density_matrix(&s, 0).unwrap()).unwrap();
                prop_assert!((s1 - s0).abs() < 1e-8, "{s1} vs {s0}");
                Ok(())
            },
        ),
    )?;
    let potentials = prop_oneof![
        (-3.0f64..3.0, 0.5f64..100.0).prop_map(|(a, mu)| CatastrophePotential::cusp(a, mu)),
        (-2.0f64..2.0, -2.5f64..0.5, 0.5f64..50.0).prop_map(|(a2, a4, mu)| CatastrophePotential::butterfly(a2, a4, mu)),
        (-2.0f64..2.0, -0.9f64..4.0, 0.5f64..50.0).prop_map(|(a, g, mu)| CatastrophePotential::molar(a, g, mu)),
    ];
    named(
        "fixed-point gradient residuals",
        runner.run(&potentials, |p| {
            let p = p.unwrap();
            for fp in find_fixed_points(&p).unwrap() {
                let g = p.gradient(&fp.location).unwrap();
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(norm < 1e-10, "|grad V| = {norm:e} at {:?}", fp.location);
            }
            Ok(())
        }),
    )?;
    Ok("lobe bounds, eps symmetry, theta maximality, beam-splitter, Schmidt, gradients: 128 cases each".into())
}

type Criterion = (u8, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "single-lobe entropy value", single_lobe_value),
        (2, "butterfly triple point", butterfly_triple_point),
        (3, "molar lobe algebra", molar_lobe_algebra),
        (4, "cusp critical divergence", cusp_divergence),
        (5, "Gaussian end-to-end oracle", gaussian_oracle),
        (6, "Fock Hamiltonian cross-validation", fock_cross_validation),
        (7, "finite-mu convergence to asymptotics", finite_mu_convergence),
        (8, "cusp peak scaling", cusp_peak_scaling),
        (9, "butterfly peak scaling", butterfly_peak_scaling),
        (10, "molar asymptotic curve", molar_curve),
        (11, "invariant suites", invariant_suites),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {id:>2} ({name}): {d} [{secs:.1}s]"),
            Err(d) => {
                failures += 1;
                println!("FAIL criterion {id:>2} ({name}): {d} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
