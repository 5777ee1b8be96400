use toeplab::domains::RegionSpec;
use toeplab::experiments::{thin_tube_trial, tube_radius, weyl_trial};
use toeplab::randmat::SeededStream;
use toeplab::symparse::{parse_symbol, Convention};
use toeplab::{LaurentSymbol, OperatorSpec};

fn fig1() -> LaurentSymbol {
    parse_symbol("2i*z^-1 + z^2 + 7/10*z^3", Convention::ZetaInverse).unwrap()
}

/// The two panels of the first figure: the Toeplitz matrix alone at N = 100
/// and a perturbation with delta = 1e-14 at N = 1000.
#[test]
fn unperturbed_panel_sits_farther_from_the_curve() {
    let region = RegionSpec::Whole;
    let clean = weyl_trial(
        &OperatorSpec::new(fig1(), 100).unwrap(),
        0.0,
        &region,
        &SeededStream::new(1, 0),
    )
    .unwrap();
    let noisy = weyl_trial(
        &OperatorSpec::new(fig1(), 1000).unwrap(),
        1e-14,
        &region,
        &SeededStream::new(1, 0),
    )
    .unwrap();
    assert!(
        clean.distance_quantiles.q50 > 2.0 * noisy.distance_quantiles.q50,
        "unperturbed N = 100: {:?}, perturbed N = 1000: {:?}",
        clean.distance_quantiles,
        noisy.distance_quantiles
    );
}

#[test]
fn thin_tube_holds_most_eigenvalues_at_n_1000() {
    let spec = OperatorSpec::new(fig1(), 1000).unwrap();
    let r = thin_tube_trial(&spec, 1e-12, 0.2, &SeededStream::new(7, 0)).unwrap();
    let fraction = r.outside_count as f64 / r.n as f64;
    println!(
        "tau = {:.5}, outside {} of {}, q50 {:.4}, q90 {:.4}",
        tube_radius(1000, 0.2),
        r.outside_count,
        r.n,
        r.distance_quantiles.q50,
        r.distance_quantiles.q90
    );
    assert!(
        fraction <= 0.15,
        "out-of-tube fraction {fraction:.3} exceeds 0.15"
    );
}
