//! Cross-path validation suite behind `cvbell verify`.
//!
//! Every closed form in the core is checked against an independently
//! computed alternative: covariance construction vs exponent matrix,
//! correlation formula vs Wigner evaluation, class recursion vs
//! brute-force term grouping, and (unless `--fast`) the truncated-Fock
//! oracle. The state builder is injectable so the suite's own teeth can
//! be tested: feed it a deliberately wrong network and the quadratic-form
//! check must fail.

use cvbell_core::bellval::{eval_asymptotic, eval_equal_settings};
use cvbell_core::expansion::classes_from_terms;
use cvbell_core::{
    bell_zero_squeezing, build_ghz_state, class_coefficients, displaced_parity_expectation,
    fock_ghz_state, ghz_exponent_matrix, pi_closed_form, pi_from_state, quadratic_form_of,
    ClassTable, GaussianState, PhasePoint, Result as CoreResult, SqueezingParameter,
};
use num_complex::Complex64;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        }
    }
}

pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

fn pass(name: &'static str, detail: String) -> Check {
    Check {
        name,
        status: Status::Pass,
        detail,
    }
}

fn fail(name: &'static str, detail: String) -> Check {
    Check {
        name,
        status: Status::Fail,
        detail,
    }
}

fn skip(name: &'static str) -> Check {
    Check {
        name,
        status: Status::Skip,
        detail: "--fast".into(),
    }
}

/// GHZ-state constructor under test; swapped out by the mutation tests.
pub type Builder<'a> = &'a dyn Fn(usize, f64) -> CoreResult<GaussianState>;

fn default_builder(n: usize, r: f64) -> CoreResult<GaussianState> {
    build_ghz_state(n, SqueezingParameter::new(r)?)
}

pub fn run(fast: bool) -> Vec<Check> {
    run_with_builder(fast, &default_builder)
}

pub fn run_with_builder(fast: bool, builder: Builder) -> Vec<Check> {
    vec![
        check_quadratic_form(builder),
        check_purity(builder),
        check_correlation_paths(builder),
        check_expansion_classes(),
        check_odd_patterns(),
        check_zero_squeezing(),
        check_asymptotic_limit(),
        check_fock(fast, "fock-oracle-n2", 2, 0.3, 30, 1e-6),
        check_fock(fast, "fock-oracle-n3", 3, 0.2, 14, 1e-5),
    ]
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.status != Status::Fail)
}

// splitmix64; the whole suite must be deterministic
fn next_u64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in [-1, 1).
fn unit(state: &mut u64) -> f64 {
    (next_u64(state) >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

fn check_quadratic_form(builder: Builder) -> Check {
    const NAME: &str = "quadratic-form";
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for n in 2..=8 {
        for r in [0.0, 0.5, 1.0] {
            let built = match builder(n, r).and_then(|s| quadratic_form_of(&s)) {
                Ok(m) => m,
                Err(e) => return fail(NAME, format!("n={n} r={r}: {e}")),
            };
            let closed = match SqueezingParameter::new(r).and_then(|s| ghz_exponent_matrix(n, s))
            {
                Ok(m) => m,
                Err(e) => return fail(NAME, format!("n={n} r={r}: {e}")),
            };
            worst = worst.max(built.max_abs_diff(&closed));
            cases += 1;
        }
    }
    let detail = format!("max |dM| = {worst:.2e} over {cases} cases (tol 1e-12)");
    if worst <= 1e-12 {
        pass(NAME, detail)
    } else {
        fail(NAME, detail)
    }
}

fn check_purity(builder: Builder) -> Check {
    const NAME: &str = "purity";
    let mut worst = 0.0f64;
    for n in 2..=6 {
        for r in [0.0, 0.5, 1.0] {
            let nus = match builder(n, r).and_then(|s| s.symplectic_eigenvalues()) {
                Ok(v) => v,
                Err(e) => return fail(NAME, format!("n={n} r={r}: {e}")),
            };
            for nu in nus {
                worst = worst.max((nu - 0.25).abs());
            }
        }
    }
    let detail = format!("max |nu - 1/4| = {worst:.2e} (tol 1e-10)");
    if worst <= 1e-10 {
        pass(NAME, detail)
    } else {
        fail(NAME, detail)
    }
}

fn check_correlation_paths(builder: Builder) -> Check {
    const NAME: &str = "correlation-cross-path";
    let mut rng: u64 = 0x5EED_0001;
    let mut worst = 0.0f64;
    let mut points = 0usize;
    for n in 2..=4 {
        for r in [0.3, 0.8] {
            let state = match builder(n, r) {
                Ok(s) => s,
                Err(e) => return fail(NAME, format!("n={n} r={r}: {e}")),
            };
            for _ in 0..10 {
                let alphas: Vec<Complex64> = (0..n)
                    .map(|_| Complex64::new(0.6 * unit(&mut rng), 0.6 * unit(&mut rng)))
                    .collect();
                let point = PhasePoint::new(alphas).expect("finite point");
                let direct = match pi_closed_form(n, r, &point) {
                    Ok(v) => v.value(),
                    Err(e) => return fail(NAME, format!("closed form n={n}: {e}")),
                };
                let wigner = match pi_from_state(&state, &point) {
                    Ok(v) => v.value(),
                    Err(e) => return fail(NAME, format!("wigner route n={n}: {e}")),
                };
                worst = worst.max((direct - wigner).abs());
                points += 1;
            }
        }
    }
    let detail = format!("max |dPi| = {worst:.2e} over {points} points (tol 1e-9)");
    if worst <= 1e-9 {
        pass(NAME, detail)
    } else {
        fail(NAME, detail)
    }
}

fn check_expansion_classes() -> Check {
    const NAME: &str = "expansion-classes";
    for n in 2..=12 {
        let recursed = match class_coefficients(n) {
            Ok(c) => c,
            Err(e) => return fail(NAME, format!("n={n}: {e}")),
        };
        let grouped = match classes_from_terms(n) {
            Ok(c) => c,
            Err(e) => return fail(NAME, format!("n={n}: {e}")),
        };
        if recursed != grouped {
            return fail(NAME, format!("n={n}: class recursion disagrees with term grouping"));
        }
        let l1 = recursed.l1_norm().to_f64();
        let expect = (2.0f64).powi((n / 2 + 1) as i32);
        if l1 != expect {
            return fail(NAME, format!("n={n}: l1 = {l1}, expected {expect}"));
        }
        if recursed.signed_sum().to_f64() != 2.0 {
            return fail(NAME, format!("n={n}: signed sum != 2"));
        }
    }
    pass(NAME, "classes, l1 norm, signed sum agree for n = 2..=12".into())
}

fn check_odd_patterns() -> Check {
    const NAME: &str = "expansion-odd-patterns";
    for n in (3..=17usize).step_by(2) {
        let classes = match class_coefficients(n) {
            Ok(c) => c,
            Err(e) => return fail(NAME, format!("n={n}: {e}")),
        };
        let nonzero: Vec<(usize, f64)> = classes
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.to_f64()))
            .collect();
        if nonzero.len() != (n + 1) / 2 {
            return fail(NAME, format!("n={n}: {} nonzero classes", nonzero.len()));
        }
        let magnitude = (2.0f64).powi(-((n as i32 - 3) / 2));
        let k_parity = usize::from(n % 4 == 3);
        let lead_positive = matches!(n % 8, 1 | 3);
        for (i, &(k, v)) in nonzero.iter().enumerate() {
            let want_positive = lead_positive == (i % 2 == 0);
            if k % 2 != k_parity || v.abs() != magnitude || (v > 0.0) != want_positive {
                return fail(NAME, format!("n={n} k={k}: coefficient {v} breaks the pattern"));
            }
        }
    }
    pass(
        NAME,
        "odd n = 3..=17: uniform magnitude 2^{-(n-3)/2}, alternating signs, single parity class"
            .into(),
    )
}

fn check_zero_squeezing() -> Check {
    const NAME: &str = "zero-squeezing";
    let mut worst = 0.0f64;
    for n in [3usize, 11] {
        let table = match ClassTable::new(n) {
            Ok(t) => t,
            Err(e) => return fail(NAME, format!("n={n}: {e}")),
        };
        for i in 0..=20 {
            let j = i as f64 * 0.1;
            let closed = match bell_zero_squeezing(n, j) {
                Ok(v) => v,
                Err(e) => return fail(NAME, format!("n={n} J={j}: {e}")),
            };
            if i == 0 && closed.value != 2.0 {
                return fail(NAME, format!("n={n}: value at J=0 is {} not 2", closed.value));
            }
            let general = eval_equal_settings(&table, 0.0, j);
            worst = worst.max((closed.value - general.value).abs());
        }
    }
    let detail = format!("max |d| = {worst:.2e} for n in {{3, 11}}, J in [0, 2] (tol 1e-12)");
    if worst <= 1e-12 {
        pass(NAME, detail)
    } else {
        fail(NAME, detail)
    }
}

fn check_asymptotic_limit() -> Check {
    const NAME: &str = "asymptotic-limit";
    let r = 5.0f64;
    let mut worst = 0.0f64;
    for n in [3usize, 5] {
        let table = match ClassTable::new(n) {
            Ok(t) => t,
            Err(e) => return fail(NAME, format!("n={n}: {e}")),
        };
        for a in [0.1, 0.3, 0.7, 1.2] {
            let j = a * (-2.0 * r).exp();
            let finite = eval_equal_settings(&table, r, j).value;
            let limit = eval_asymptotic(&table, a).value;
            worst = worst.max((finite - limit).abs());
        }
    }
    let detail = format!("max |d| = {worst:.2e} at r = 5 (tol 1e-3)");
    if worst <= 1e-3 {
        pass(NAME, detail)
    } else {
        fail(NAME, detail)
    }
}

fn check_fock(
    fast: bool,
    name: &'static str,
    n: usize,
    r: f64,
    cutoff: usize,
    tol: f64,
) -> Check {
    if fast {
        return skip(name);
    }
    let state = match fock_ghz_state(n, r, cutoff) {
        Ok(s) => s,
        Err(e) => return fail(name, format!("construction: {e}")),
    };
    let mut rng: u64 = 0xF0CC_0000 + n as u64;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let alphas: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(0.4 * unit(&mut rng), 0.4 * unit(&mut rng)))
            .collect();
        let point = PhasePoint::new(alphas).expect("finite point");
        let fock = match displaced_parity_expectation(&state, &point) {
            Ok(v) => v.value(),
            Err(e) => return fail(name, format!("fock evaluation: {e}")),
        };
        let closed = match pi_closed_form(n, r, &point) {
            Ok(v) => v.value(),
            Err(e) => return fail(name, format!("closed form: {e}")),
        };
        worst = worst.max((fock - closed).abs());
    }
    let detail =
        format!("max |dPi| = {worst:.2e} over 50 points, n={n} r={r} cutoff={cutoff} (tol {tol:.0e})");
    if worst <= tol {
        pass(name, detail)
    } else {
        fail(name, detail)
    }
}
