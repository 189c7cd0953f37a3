use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use detfactor::arith::is_prime_u64;
use detfactor::graf_phi::{graf_phi_factor, GrafOutcome, GrafPhiParams};
use detfactor::phi_chain::phi_chain_factor;
use detfactor::phi_reduce::{equal_order_factorization, factor_from_phi, PhiOracle, PhiStrategy};
use detfactor::pm1::{certify_prime, pm1_factor_completely, Certificate};
use detfactor::quad::{pp1_factor_completely, Split2Config};
use detfactor::reference::{reference_factor_bounded, totient_of};
use detfactor::{Error, FactoredInteger};

use crate::args::*;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

/// A JSON report and the exit status that goes with it.
#[derive(Debug)]
pub struct Report {
    pub body: Value,
    pub code: u8,
}

impl Report {
    fn ok(body: Value) -> Self {
        Report { body, code: 0 }
    }

    fn failure(body: Value) -> Self {
        Report { body, code: EXIT_FAILURE }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn verify(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VERIFY, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::InvalidInput(_)
            | Error::UnsupportedWidth(_)
            | Error::AboveBound { .. }
            | Error::Parse(_)
            | Error::Io(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        CliError { code, message: e.to_string() }
    }
}

type Outcome = Result<Report, CliError>;

fn parse_int(name: &str, s: &str) -> Result<u64, CliError> {
    s.trim().parse::<u64>().map_err(|_| CliError::usage(format!("--{name}: expected a decimal integer below 2^64, got {s:?}")))
}

/// Re-multiplies and re-tests every prime before anything is printed.
fn check_factorization(n: u64, f: &FactoredInteger) -> Result<(), CliError> {
    if f.to_u64() != Some(n) {
        return Err(CliError::verify(format!("factorization {f} does not multiply to {n}")));
    }
    if let Some(p) = f.primes().find(|&p| !is_prime_u64(p)) {
        return Err(CliError::verify(format!("factor {p} of {n} is not prime")));
    }
    Ok(())
}

fn check_certificate(c: &Certificate) -> Result<(), CliError> {
    c.verify().map_err(|e| CliError::verify(format!("certificate for {} does not verify: {e}", c.n())))
}

fn incomplete(e: Error) -> Outcome {
    match e {
        Error::Incomplete { stuck, partial } => Ok(Report::failure(json!({
            "reason": "incomplete",
            "stuck": stuck.iter().map(u64::to_string).collect::<Vec<_>>(),
            "partial": partial.iter().map(|(p, e)| json!({"p": p.to_string(), "e": e})).collect::<Vec<_>>(),
        }))),
        other => Err(other.into()),
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Factor(a) => factor(a),
        Command::Certify(a) => certify(a),
        Command::PhiFactor(a) => phi_factor(a),
        Command::GrafPhi(a) => graf_phi(a),
        Command::PhiChain(a) => phi_chain(a),
        Command::EqualOrder(a) => equal_order(a),
        Command::Bench(a) => bench(a),
    }
}

fn factor(a: &FactorArgs) -> Outcome {
    let n = parse_int("n", &a.n)?;
    if n == 0 {
        return Err(CliError::usage("--n must be positive"));
    }
    let result = match a.method {
        Method::Pm1 => pm1_factor_completely(n, a.bound),
        Method::Pp1 => {
            let cfg = Split2Config { h: a.h, trial_bound: a.pp1_trial_bound };
            pp1_factor_completely(n, a.bound, &a.m, &cfg)
        }
        Method::Trial => reference_factor_bounded(n, u64::MAX),
    };
    let f = match result {
        Ok(f) => f,
        Err(e) => return incomplete(e),
    };
    check_factorization(n, &f)?;
    let mut body = serde_json::to_value(&f).expect("serializable");
    if n > 2 && is_prime_u64(n) {
        if let Some(c) = certify_prime(n, 1_000_000)? {
            let c = Certificate::FellowsKoblitz(c);
            check_certificate(&c)?;
            body["certificate"] = serde_json::to_value(&c).expect("serializable");
        }
    }
    Ok(Report::ok(body))
}

fn certify(a: &CertifyArgs) -> Outcome {
    if let Some(path) = &a.verify {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let cert: Certificate =
            serde_json::from_str(&text).map_err(|e| CliError::verify(format!("malformed certificate: {e}")))?;
        check_certificate(&cert)?;
        return Ok(Report::ok(json!({"n": cert.n().to_string(), "valid": true})));
    }
    let n = parse_int("n", a.n.as_deref().unwrap_or_default())?;
    if n < 3 || n % 2 == 0 {
        return Err(CliError::usage("--n must be odd and at least 3"));
    }
    match certify_prime(n, a.trial_bound)? {
        Some(c) => {
            let c = Certificate::FellowsKoblitz(c);
            check_certificate(&c)?;
            Ok(Report::ok(serde_json::to_value(&c).expect("serializable")))
        }
        None => Ok(Report::failure(json!({
            "n": n.to_string(),
            "prime": is_prime_u64(n),
            "reason": "no certificate from the factored n - 1",
        }))),
    }
}

fn phi_factor(a: &PhiFactorArgs) -> Outcome {
    let n = parse_int("n", &a.n)?;
    let phi = parse_int("phi", &a.phi)?;
    if n == 0 || phi == 0 {
        return Err(CliError::usage("--n and --phi must be positive"));
    }
    let strategy = match a.strategy {
        Strategy::SmallBase => PhiStrategy::SmallBase,
        Strategy::Random => PhiStrategy::Randomized { seed: a.seed },
    };
    let f = match factor_from_phi(n, phi, strategy) {
        Ok(f) => f,
        Err(e) => return incomplete(e),
    };
    check_factorization(n, &f)?;
    if totient_of(&f) != phi {
        return Ok(Report::failure(json!({
            "reason": "phi does not match the factorization",
            "factorization": f,
            "phi_of_factorization": totient_of(&f).to_string(),
        })));
    }
    Ok(Report::ok(serde_json::to_value(&f).expect("serializable")))
}

fn graf_phi(a: &GrafPhiArgs) -> Outcome {
    let n = parse_int("n", &a.n)?;
    let phi = parse_int("phi", &a.phi)?;
    let params = GrafPhiParams {
        k: a.k,
        u: a.u,
        delta: a.delta,
        eta: a.eta,
        trial_guard: !a.no_trial_guard,
        ..Default::default()
    };
    match graf_phi_factor(n, phi, &params)? {
        GrafOutcome::Factored(f) => {
            check_factorization(n, &f)?;
            Ok(Report::ok(serde_json::to_value(&f).expect("serializable")))
        }
        GrafOutcome::Failure(audit) => Ok(Report::failure(serde_json::to_value(&audit).expect("serializable"))),
    }
}

fn oracle(source: &str) -> Result<PhiOracle, CliError> {
    if source == "compute" {
        Ok(PhiOracle::computed())
    } else {
        Ok(PhiOracle::from_file(source)?)
    }
}

fn phi_chain(a: &OracleArgs) -> Outcome {
    let n = parse_int("n", &a.n)?;
    let oracle = oracle(&a.oracle)?;
    let r = match phi_chain_factor(n, &oracle) {
        Ok(r) => r,
        Err(e @ (Error::OracleIncomplete(_) | Error::Inconsistent(_))) => {
            return Ok(Report::failure(json!({"reason": e.to_string(), "queried": oracle.queries()})));
        }
        Err(e) => return incomplete(e),
    };
    check_factorization(n, &r.factors)?;
    Ok(Report::ok(json!({
        "factors": r.factors,
        "chain": r.chain.iter().map(u64::to_string).collect::<Vec<_>>(),
        "oracle_calls": r.oracle_calls,
    })))
}

fn equal_order(a: &OracleArgs) -> Outcome {
    let n = parse_int("n", &a.n)?;
    let oracle = oracle(&a.oracle)?;
    let r = match equal_order_factorization(n, &oracle) {
        Ok(r) => r,
        Err(e @ (Error::OracleIncomplete(_) | Error::Inconsistent(_))) => {
            return Ok(Report::failure(json!({"reason": e.to_string(), "queried": oracle.queries()})));
        }
        Err(e) => return Err(e.into()),
    };
    if r.value() != Some(n) {
        return Err(CliError::verify(format!("parts {:?} do not rebuild {n}", r.parts)));
    }
    Ok(Report::ok(json!({
        "n": n.to_string(),
        "parts": r.parts.iter().map(u64::to_string).collect::<Vec<_>>(),
        "oracle_calls": r.oracle_calls,
    })))
}

struct Tally {
    name: &'static str,
    solved: usize,
    micros: u128,
}

fn bench(a: &BenchArgs) -> Outcome {
    if a.digits.iter().any(|&d| !(2..=18).contains(&d)) {
        return Err(CliError::usage("--digits must lie in 2..=18"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut sizes = Vec::new();
    for &digits in &a.digits {
        let lo = 10u64.pow(digits - 1);
        let hi = 10u64.pow(digits);
        let inputs: Vec<u64> = std::iter::repeat_with(|| rng.gen_range(lo..hi) | 1)
            .filter(|&n| !is_prime_u64(n))
            .take(a.count)
            .collect();
        let truth: Vec<FactoredInteger> = inputs.iter().map(|&n| reference_factor_bounded(n, u64::MAX)).collect::<Result<_, _>>()?;
        let small = hi <= 100_000_000;
        type Runner = Box<dyn Fn(u64, &FactoredInteger) -> Option<FactoredInteger>>;
        let mut runners: Vec<(&'static str, Runner)> = vec![
            ("pm1", Box::new(|n, _| pm1_factor_completely(n, 1000).ok())),
            ("pp1", Box::new(|n, _| pp1_factor_completely(n, 1000, &[2, 3, 5, 7, 11, 13], &Split2Config::default()).ok())),
            ("phi", Box::new(|n, t| factor_from_phi(n, totient_of(t), PhiStrategy::SmallBase).ok())),
            (
                "graf-phi",
                Box::new(|n, t| match graf_phi_factor(n, totient_of(t), &GrafPhiParams::default()) {
                    Ok(GrafOutcome::Factored(f)) => Some(f),
                    _ => None,
                }),
            ),
        ];
        if small {
            runners.push(("phi-chain", Box::new(|n, _| phi_chain_factor(n, &PhiOracle::computed()).ok().map(|r| r.factors))));
        }
        let mut tallies = Vec::new();
        for (name, run) in &runners {
            let mut t = Tally { name, solved: 0, micros: 0 };
            for (n, truth) in inputs.iter().zip(&truth) {
                let start = Instant::now();
                let got = run(*n, truth);
                t.micros += start.elapsed().as_micros();
                match got {
                    Some(f) if &f == truth => t.solved += 1,
                    Some(f) => return Err(CliError::verify(format!("{name} gave {f} for {n}"))),
                    None => {}
                }
            }
            tallies.push(t);
        }
        sizes.push(json!({
            "digits": digits,
            "inputs": inputs.len(),
            "methods": tallies.iter().map(|t| json!({
                "method": t.name,
                "solved": t.solved,
                "total_ms": t.micros as f64 / 1000.0,
            })).collect::<Vec<_>>(),
        }));
    }
    Ok(Report::ok(json!({"seed": a.seed, "sizes": sizes})))
}
