//! Acceptance gate: seven end-to-end checks with pinned tolerances, one
//! verdict line each. Verdicts are written straight to stdout (bypassing
//! test capture) so every line is visible in a plain `cargo test` run.
//!
//! Two criteria are expected to fail today; their verdict lines carry the
//! measured numbers. See README.md ("Known numerical limitations").

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use fracss::cfe::{cfe_operator, p9_coefficients, q9_coefficients};
use fracss::gl::{gl_coefficients, gl_differintegrate};
use fracss::signal::SampledSignal;
use fracss::statespace::{decompose, simulate_cfe, simulate_pse, FodeModel};

const BIN: &str = env!("CARGO_BIN_EXE_fracss");

/// Prints the verdict line unconditionally, then returns `pass` so the
/// caller can assert on it.
fn verdict(criterion: usize, pass: bool, details: &str) -> bool {
    let line = format!(
        "criterion {criterion}: {} — {details}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    std::io::stdout()
        .lock()
        .write_all(line.as_bytes())
        .expect("stdout");
    pass
}

fn reference_model() -> FodeModel {
    FodeModel::new(0.8, 0.5, 1.0, 2.2, 0.9).unwrap()
}

#[test]
fn criterion_1_exact_decomposition_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("model.toml"),
        "a2 = 0.8\na1 = 0.5\na0 = 1.0\nalpha = 2.2\nbeta = 0.9\nT = 0.1\n",
    )
    .unwrap();
    let started = Instant::now();
    let out = Command::new(BIN)
        .current_dir(dir.path())
        .args(["controllability", "model.toml"])
        .output()
        .unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let expected = "A = [[0, 1], [-1.25, -0.625]]\n\
                    B = [0, 1.25]\n\
                    Q_R = [[0, 1.25], [1.25, -0.78125]]\n\
                    rank = 2\n";
    let stdout = String::from_utf8(out.stdout).unwrap();
    let exact = out.status.success() && stdout == expected;
    let pass = exact && elapsed < 1.0;
    let details = format!(
        "state-space matrices and rank printed exactly (match = {exact}) in {elapsed:.3} s (limit 1 s)"
    );
    assert!(verdict(1, pass, &details), "{details}\ngot:\n{stdout}");
}

#[test]
fn criterion_2_schemes_agree_and_settle() {
    let ss = decompose(&reference_model());
    let input = SampledSignal::unit_step(0.1, 502).unwrap();
    let started = Instant::now();
    let pse = simulate_pse(&ss, &input, 100, 500).unwrap();
    let cfe = simulate_cfe(&ss, &input, 500).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    let dy_max = (0..=300)
        .map(|k| (pse.y[k] - cfe.y[k]).abs())
        .fold(0.0f64, f64::max);
    let pse_50 = pse.y[500];
    let cfe_50 = cfe.y[500];
    let band = 0.98..=1.02;
    let pass = dy_max <= 0.05
        && band.contains(&pse_50)
        && band.contains(&cfe_50)
        && elapsed < 5.0;
    let details = format!(
        "max |y_pse - y_cfe| over steps 0..=300 = {dy_max:.6} (limit 0.05); \
         y(50 s): power-series {pse_50:.6}, rational {cfe_50:.6} (band 0.98..=1.02); \
         {elapsed:.3} s (limit 5 s)"
    );
    assert!(verdict(2, pass, &details), "{details}");
}

#[test]
fn criterion_3_truncated_memory_footprint_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let base = "a2 = 0.8\na1 = 0.5\na0 = 1.0\nalpha = 2.2\nbeta = 0.9\nT = 0.1\nn_steps = 300\n";
    std::fs::write(
        dir.path().join("pse.toml"),
        format!("{base}scheme = pse\nmemory_samples = 100\nout = pse.csv\n"),
    )
    .unwrap();
    std::fs::write(
        dir.path().join("cfe.toml"),
        format!("{base}scheme = cfe\nout = cfe.csv\n"),
    )
    .unwrap();
    for cfg in ["pse.toml", "cfe.toml"] {
        let out = Command::new(BIN)
            .current_dir(dir.path())
            .args(["simulate", cfg])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes_of = |name: &str| -> u64 {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let meta: serde_json::Value = serde_json::from_str(&text).unwrap();
        meta["memory_bytes_peak"].as_u64().unwrap()
    };
    let pse_bytes = bytes_of("pse.csv.meta.json");
    let cfe_bytes = bytes_of("cfe.csv.meta.json");
    let ratio = pse_bytes as f64 / cfe_bytes as f64;
    let pass = ratio >= 10.0;
    let details = format!(
        "reported peak history: power-series {pse_bytes} B (100-sample window), \
         rational {cfe_bytes} B; ratio {ratio} (required >= 10)"
    );
    assert!(verdict(3, pass, &details), "{details}");
}

#[test]
fn criterion_4_integer_order_convergence() {
    // (a2, a1, a0) = (1, 0.6, 1) with orders (2, 1) has a closed-form
    // step response; errors are measured over 0..=20 s.
    let model = FodeModel::new(1.0, 0.6, 1.0, 2.0, 1.0).unwrap();
    let ss = decompose(&model);
    let analytic = |t: f64| {
        let zeta: f64 = 0.3;
        let wd = (1.0 - zeta * zeta).sqrt();
        1.0 - (-zeta * t).exp() / (1.0 - zeta * zeta).sqrt() * (wd * t + zeta.acos()).sin()
    };
    let max_err = |t_step: f64, scheme_pse: bool| -> f64 {
        let n_steps = (20.0 / t_step).round() as usize;
        let input = SampledSignal::unit_step(t_step, n_steps + 2).unwrap();
        let res = if scheme_pse {
            simulate_pse(&ss, &input, n_steps, n_steps).unwrap()
        } else {
            simulate_cfe(&ss, &input, n_steps).unwrap()
        };
        res.y
            .iter()
            .zip(res.t.iter())
            .map(|(&y, &t)| (y - analytic(t)).abs())
            .fold(0.0, f64::max)
    };
    let pse_001 = max_err(0.01, true);
    let cfe_001 = max_err(0.01, false);
    let pse_0005 = max_err(0.005, true);
    let shrink = pse_001 / pse_0005;
    let pass = pse_001 <= 1e-2 && cfe_001 <= 1e-2 && shrink >= 1.5;
    let details = format!(
        "max error vs closed form at T = 0.01: power-series {pse_001:.6}, \
         rational {cfe_001:.6} (limit 1e-2 each); halving T shrinks the \
         power-series error {shrink:.2}x (required >= 1.5x)"
    );
    assert!(verdict(4, pass, &details), "{details}");
}

#[test]
fn criterion_5_semi_derivative_of_a_ramp() {
    // d^{1/2}/dt^{1/2} of f(t) = t is 2 sqrt(t / pi); at t = 1 that is
    // 2 / sqrt(pi). Sampled at T = 1e-3 with full memory.
    let t_step = 1e-3;
    let n = 1000usize;
    let ramp = SampledSignal::from_fn(t_step, n + 1, |t| t).unwrap();
    let exact = 2.0 / std::f64::consts::PI.sqrt();

    let gl = gl_differintegrate(&ramp, 0.5, n).unwrap();
    let gl_value = gl.samples()[n];
    let gl_rel = (gl_value - exact).abs() / exact;

    let cfe = cfe_operator(0.5, t_step).unwrap().apply(&ramp).unwrap();
    let cfe_value = cfe.samples()[n];
    let cfe_rel = (cfe_value - exact).abs() / exact;

    let pass = gl_rel <= 0.01 && cfe_rel <= 0.02;
    let details = format!(
        "exact value {exact:.6}; power-series {gl_value:.6} (rel err {gl_rel:.2e}, limit 1e-2), \
         rational {cfe_value:.6} (rel err {cfe_rel:.2e}, limit 2e-2)"
    );
    assert!(verdict(5, pass, &details), "{details}");
}

#[test]
fn criterion_6_coefficient_identities() {
    use statrs::function::gamma::ln_gamma;

    // ln |Gamma(x)| and the sign of Gamma(x); None at the poles.
    fn ln_abs_gamma(x: f64) -> Option<(f64, f64)> {
        if x > 0.0 {
            return Some((ln_gamma(x), 1.0));
        }
        if x == x.floor() {
            return None;
        }
        let s = (std::f64::consts::PI * x).sin();
        let ln = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
        Some((ln, s.signum()))
    }
    fn gamma_oracle(r: f64, j: usize) -> Option<f64> {
        let (la, sa) = ln_abs_gamma(r + 1.0)?;
        let (lb, sb) = ln_abs_gamma(j as f64 + 1.0)?;
        let (lc, sc) = ln_abs_gamma(r - j as f64 + 1.0)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        Some(sign * sa / (sb * sc) * (la - lb - lc).exp())
    }

    // (a) Recurrence weights against the gamma-function formula, 1e-12.
    let mut weight_worst: f64 = 0.0;
    let mut weights_ok = true;
    for &r in &[-0.5, 0.3, 0.5, 0.9, 1.0, 2.2] {
        let b = gl_coefficients(r, 100).unwrap();
        for j in 0..=100usize {
            match gamma_oracle(r, j) {
                Some(expected) => {
                    let rel = (b.coeffs[j] - expected).abs() / expected.abs().max(1.0);
                    weight_worst = weight_worst.max(rel);
                    weights_ok &= rel <= 1e-12;
                }
                None => weights_ok &= b.coeffs[j] == 0.0,
            }
        }
    }

    // (b) Numerator/denominator parity and reflection, bitwise.
    let mut parity_ok = true;
    let mut reflection_ok = true;
    for &r in &[0.1, 0.5, 0.9, 1.3, 2.2] {
        let p = p9_coefficients(r).unwrap();
        let q = q9_coefficients(r).unwrap();
        let q_neg = q9_coefficients(-r).unwrap();
        for i in 0..10 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            parity_ok &= p[i].to_bits() == (sign * q[i]).to_bits();
            reflection_ok &= p[i].to_bits() == q_neg[i].to_bits();
        }
    }

    // (c) Order zero is the identity for both operator families.
    let b0 = gl_coefficients(0.0, 20).unwrap();
    let identity_ok = b0.coeffs[0] == 1.0 && b0.coeffs[1..].iter().all(|&c| c == 0.0);
    let p0 = p9_coefficients(0.0).unwrap();
    let q0 = q9_coefficients(0.0).unwrap();
    let identity_ok = identity_ok && p0 == q0;

    // (d) Order one reduces to the trapezoid-rule derivative exactly:
    //     P(x) * (1 + x) == Q(x) * (1 - x) over the integers.
    let p1: Vec<i64> = p9_coefficients(1.0).unwrap().iter().map(|&v| v as i64).collect();
    let q1: Vec<i64> = q9_coefficients(1.0).unwrap().iter().map(|&v| v as i64).collect();
    let convolve = |poly: &[i64], other: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; poly.len() + other.len() - 1];
        for (i, &a) in poly.iter().enumerate() {
            for (j, &b) in other.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    let tustin_ok = convolve(&p1, &[1, 1]) == convolve(&q1, &[1, -1]);

    let pass = weights_ok && parity_ok && reflection_ok && identity_ok && tustin_ok;
    let details = format!(
        "weights vs gamma formula worst rel {weight_worst:.2e} (limit 1e-12); \
         parity exact = {parity_ok}; reflection exact = {reflection_ok}; \
         order-0 identity = {identity_ok}; order-1 trapezoid identity = {tustin_ok}"
    );
    assert!(verdict(6, pass, &details), "{details}");
}

#[test]
fn criterion_7_operator_and_simulator_properties() {
    let started = Instant::now();
    let ss = decompose(&reference_model());

    // Linearity of both schemes in the input, 1e-12 relative.
    let n = 120usize;
    let u1 = SampledSignal::from_fn(0.1, n + 2, |t| (1.3 * t).sin()).unwrap();
    let u2 = SampledSignal::from_fn(0.1, n + 2, |t| (0.7 * t).cos() * (-0.2 * t).exp()).unwrap();
    let combo = SampledSignal::from_fn(0.1, n + 2, |t| {
        0.7 * (1.3 * t).sin() - 1.3 * ((0.7 * t).cos() * (-0.2 * t).exp())
    })
    .unwrap();
    let mut linear_worst: f64 = 0.0;
    for pse in [true, false] {
        let run = |u: &SampledSignal| {
            if pse {
                simulate_pse(&ss, u, n, n).unwrap()
            } else {
                simulate_cfe(&ss, u, n).unwrap()
            }
        };
        let (ya, yb, yc) = (run(&u1), run(&u2), run(&combo));
        for k in 0..=n {
            let want = 0.7 * ya.y[k] - 1.3 * yb.y[k];
            let rel = (yc.y[k] - want).abs() / want.abs().max(1.0);
            linear_worst = linear_worst.max(rel);
        }
    }
    let linear_ok = linear_worst <= 1e-12;

    // Zero input from rest stays exactly at rest.
    let zeros = SampledSignal::zeros(0.1, n + 2).unwrap();
    let rest_pse = simulate_pse(&ss, &zeros, n, n).unwrap();
    let rest_cfe = simulate_cfe(&ss, &zeros, n).unwrap();
    let rest_ok = rest_pse.y.iter().chain(rest_cfe.y.iter()).all(|&v| v == 0.0)
        && rest_pse.x2.iter().chain(rest_cfe.x2.iter()).all(|&v| v == 0.0);

    // History windows beyond the horizon change nothing, bitwise.
    let step_in = SampledSignal::unit_step(0.1, 42).unwrap();
    let small = simulate_pse(&ss, &step_in, 50, 40).unwrap();
    let large = simulate_pse(&ss, &step_in, 5000, 40).unwrap();
    let trunc_ok = small
        .y
        .iter()
        .zip(large.y.iter())
        .all(|(a, b)| a.to_bits() == b.to_bits());

    // Composing two half-derivatives matches the first derivative, 2%.
    let ramp = SampledSignal::from_fn(1e-3, 1001, |t| t).unwrap();
    let half = gl_differintegrate(&ramp, 0.5, 1000).unwrap();
    let twice = gl_differintegrate(&half, 0.5, 1000).unwrap();
    let composed = twice.samples()[1000];
    let compose_rel = (composed - 1.0).abs();
    let compose_ok = compose_rel <= 0.02;

    // Substituting the simulated output back into the plant equation
    // through full-memory operators leaves a residual below 1e-8.
    let model = reference_model();
    let n_rt = 200usize;
    let input = SampledSignal::unit_step(0.1, n_rt + 2).unwrap();
    let res = simulate_pse(&ss, &input, n_rt, n_rt).unwrap();
    let y = SampledSignal::new(0.1, res.y.clone()).unwrap();
    let dy_beta = gl_differintegrate(&y, model.beta(), n_rt).unwrap();
    let dy_alpha = gl_differintegrate(&y, model.alpha(), n_rt).unwrap();
    let mut residual_worst: f64 = 0.0;
    for k in 0..n_rt - 1 {
        let residual = model.a2() * dy_alpha.samples()[k + 2]
            + model.a1() * dy_beta.samples()[k + 1]
            + model.a0() * res.y[k]
            - res.u[k];
        residual_worst = residual_worst.max(residual.abs());
    }
    let round_trip_ok = residual_worst <= 1e-8;

    let elapsed = started.elapsed().as_secs_f64();
    let pass =
        linear_ok && rest_ok && trunc_ok && compose_ok && round_trip_ok && elapsed < 60.0;
    let details = format!(
        "linearity worst rel {linear_worst:.2e} (limit 1e-12); zero-input rest = {rest_ok}; \
         oversized history bitwise-identical = {trunc_ok}; \
         half-derivative composed twice vs derivative rel {compose_rel:.2e} (limit 2e-2); \
         plant-equation residual {residual_worst:.2e} (limit 1e-8); {elapsed:.2} s (limit 60 s)"
    );
    assert!(verdict(7, pass, &details), "{details}");
}
