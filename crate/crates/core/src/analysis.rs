//! Threshold function, the counting bound, diagnostic ratios and the Monte
//! Carlo sweep.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::oracle::{run_trial, TrialResult};
use crate::reconstruct::Stage;
use crate::rng;

/// The unique m with √(2·log₂ n) ∈ [m − 3/4, m + 1/4).
///
/// Decided exactly: the interval test is equivalent to
/// 2^((4m−3)²) ≤ n^32 < 2^((4m+1)²).
pub fn kc(n: u64) -> Result<u32> {
    if n < 2 {
        return Err(Error::Input(format!("kc needs n ≥ 2, got {n}")));
    }
    let p = BigUint::from(n).pow(32);
    let pow2 = |e: u64| BigUint::from(1u8) << e;
    let lower = |m: u64| pow2((4 * m - 3) * (4 * m - 3)) <= p;
    let upper = |m: u64| p < pow2((4 * m + 1) * (4 * m + 1));
    let x = (2.0 * (n as f64).log2()).sqrt();
    let mut m = ((x + 0.75).floor() as u64).max(1);
    while !lower(m) {
        m -= 1;
    }
    while !upper(m) {
        m += 1;
    }
    Ok(m as u32)
}

/// n²/2^(k²).
pub fn ratio0(n: usize, k: usize) -> f64 {
    (n as f64).powi(2) / 2f64.powi((k * k) as i32)
}

/// k·n²/2^(k²−k).
pub fn ratio1(n: usize, k: usize) -> f64 {
    k as f64 * (n as f64).powi(2) / 2f64.powi((k * k - k) as i32)
}

/// log₂ of the two upper bounds on the probability that a random picture
/// is reconstructible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Log2Bounds {
    /// C((n−k+1)² + 2^(k²) − 1, 2^(k²) − 1) · 2^(−n²)
    pub binomial: f64,
    /// (10n²/2^(k²))^(2^(k²)) · 2^(−n²)
    pub simplified: f64,
}

/// ln x! − (x ln x − x + ½ ln 2πx).
fn stirling_tail(x: f64) -> f64 {
    if x < 10.0 {
        return ln_gamma(x + 1.0) - (x * x.ln() - x + 0.5 * (2.0 * PI * x).ln());
    }
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

/// ln C(a + b, b) for a, b ≥ 1, stable when b is astronomically larger.
fn ln_binomial(a: f64, b: f64) -> f64 {
    a * (b / a).ln_1p()
        + b * (a / b).ln_1p()
        + 0.5 * ((a + b) / (2.0 * PI * a * b)).ln()
        + stirling_tail(a + b)
        - stirling_tail(a)
        - stirling_tail(b)
}

pub fn zero_statement_log2_bound(n: usize, k: usize) -> Result<Log2Bounds> {
    if k == 0 || k > n {
        return Err(Error::Input(format!(
            "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    if k * k > 63 {
        return Err(Error::Range(format!("2^(k²) with k = {k} exceeds 2^63")));
    }
    let nn = (n as f64).powi(2);
    let windows = ((n - k + 1) as f64).powi(2);
    let kinds = ((1u64 << (k * k)) - 1) as f64;
    let binomial = ln_binomial(windows, kinds) / LN_2 - nn;
    let simplified =
        2f64.powi((k * k) as i32) * (10f64.log2() + 2.0 * (n as f64).log2() - (k * k) as f64) - nn;
    Ok(Log2Bounds {
        binomial,
        simplified,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub successes: u64,
    pub wrong: u64,
    pub abort_initial: u64,
    pub abort_column: u64,
    pub abort_row: u64,
    pub abort_leftover: u64,
    pub seed: u64,
    pub kc: u32,
    pub ratio0: f64,
    pub ratio1: f64,
    /// Mean wall time per trial, when timing was requested.
    pub mean_ms: Option<f64>,
}

impl ExperimentRow {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,
    pub timing: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Experiment {
    pub rows: Vec<ExperimentRow>,
    /// (n, k) pairs not run, with the reason.
    pub skipped: Vec<(usize, usize, String)>,
}

pub fn trial_seed(master: u64, n: usize, k: usize, i: u64) -> u64 {
    rng::derive_seed(master, &[n as u64, k as u64, i])
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    let mut out = Experiment::default();
    if cfg.trials == 0 {
        return Ok(out);
    }
    for &n in &cfg.ns {
        for &k in &cfg.ks {
            if k == 0 || k > n || (n != k && n < 3 * k) {
                out.skipped
                    .push((n, k, format!("need n = k or n ≥ 3k, got n = {n}, k = {k}")));
                continue;
            }
            let results: Vec<(TrialResult, f64)> = pool.install(|| {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|i| {
                        run_trial(n, k, trial_seed(cfg.seed, n, k, i))
                            .map(|t| (t.result, t.elapsed.as_secs_f64() * 1e3))
                    })
                    .collect::<Result<_>>()
            })?;
            let count = |f: &dyn Fn(&TrialResult) -> bool| {
                results.iter().filter(|(r, _)| f(r)).count() as u64
            };
            let total_ms: f64 = results.iter().map(|(_, ms)| ms).sum();
            out.rows.push(ExperimentRow {
                n,
                k,
                trials: cfg.trials,
                successes: count(&|r| *r == TrialResult::Success),
                wrong: count(&|r| *r == TrialResult::WrongOutput),
                abort_initial: count(&|r| *r == TrialResult::Abort(Stage::Initial)),
                abort_column: count(&|r| *r == TrialResult::Abort(Stage::Column)),
                abort_row: count(&|r| *r == TrialResult::Abort(Stage::Row)),
                abort_leftover: count(&|r| *r == TrialResult::Abort(Stage::Leftover)),
                seed: cfg.seed,
                kc: kc(n as u64)?,
                ratio0: ratio0(n, k),
                ratio1: ratio1(n, k),
                mean_ms: cfg.timing.then(|| total_ms / cfg.trials as f64),
            });
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str =
    "n,k,trials,successes,wrong,abort_initial,abort_column,abort_row,abort_leftover,seed,kc,ratio0,ratio1,mean_ms";

/// Plain decimal with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.5e}", x.abs());
    let (mant, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else if exp < 5 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("{digits}{}", "0".repeat((exp - 5) as usize))
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let mean = r.mean_ms.map(|m| format!("{m:.3}")).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.k,
            r.trials,
            r.successes,
            r.wrong,
            r.abort_initial,
            r.abort_column,
            r.abort_row,
            r.abort_leftover,
            r.seed,
            r.kc,
            format_sig6(r.ratio0),
            format_sig6(r.ratio1),
            mean
        )?;
    }
    Ok(())
}

pub fn csv_string(rows: &[ExperimentRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        assert_eq!(kc(10).unwrap(), 3);
        assert_eq!(kc(100).unwrap(), 4);
        assert_eq!(kc(1024).unwrap(), 5);
        assert_eq!(kc(2).unwrap(), 2);
        assert!(kc(1).is_err());
    }

    #[test]
    fn threshold_at_interval_edges() {
        // The upper edge m + 1/4 sits at n = 2^((4m+1)²/32), never an integer.
        for m in 2u64..=4 {
            let e = ((4 * m + 1) * (4 * m + 1)) as f64 / 32.0;
            let edge = 2f64.powf(e);
            let below = edge.floor() as u64;
            assert_eq!(kc(below).unwrap() as u64, m, "n = {below}");
            assert_eq!(kc(below + 1).unwrap() as u64, m + 1, "n = {}", below + 1);
        }
    }

    #[test]
    fn pinned_binomial_bound() {
        let b = zero_statement_log2_bound(100, 2).unwrap();
        let want = -9_841.351_787_320_642;
        assert!(((b.binomial - want) / want).abs() < 1e-9, "{}", b.binomial);
        assert!(b.binomial <= b.simplified);
    }

    #[test]
    fn bound_rejects_large_k() {
        assert!(matches!(
            zero_statement_log2_bound(100, 8),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            zero_statement_log2_bound(3, 4),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(1.0), "1.00000");
        assert_eq!(format_sig6(0.5), "0.500000");
        assert_eq!(format_sig6(6.519258e-9), "0.00000000651926");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1.5e10), "15000000000");
        assert_eq!(format_sig6(78.125), "78.1250");
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio0(64, 4), 4096.0 / 65536.0);
        assert_eq!(ratio1(64, 4), 4.0 * 4096.0 / 4096.0);
    }

    #[test]
    fn zero_trials_gives_header_only() {
        let cfg = ExperimentConfig {
            ns: vec![48],
            ks: vec![5],
            trials: 0,
            seed: 1,
            threads: 1,
            timing: false,
        };
        let e = run_experiment(&cfg).unwrap();
        assert!(e.rows.is_empty());
        assert_eq!(csv_string(&e.rows), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn unsupported_pairs_are_skipped() {
        let cfg = ExperimentConfig {
            ns: vec![10],
            ks: vec![4, 3],
            trials: 2,
            seed: 1,
            threads: 1,
            timing: false,
        };
        let e = run_experiment(&cfg).unwrap();
        assert_eq!(e.skipped.len(), 1);
        assert_eq!(e.rows.len(), 1);
        let r = &e.rows[0];
        assert_eq!(
            r.successes
                + r.wrong
                + r.abort_initial
                + r.abort_column
                + r.abort_row
                + r.abort_leftover,
            2
        );
    }
}
