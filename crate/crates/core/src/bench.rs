//! Timing harness for signcryption, designcryption and revocation.
//!
//! Only the crypto call sits inside the timed region; fixtures, parsing of
//! inputs and serialization happen outside it. Timings taken with the mock
//! provider are meaningless.

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::bilinear::Bilinear;
use crate::error::Result;
use crate::revocation::{revoke, AccessListTable, PrimeRegistry};
use crate::scheme::{
    authority_setup, dec_key_gen, designcrypt, global_setup, sign_key_gen, signcrypt, ver_key_gen, AuthorityKeypair,
    GlobalParams, SignerKey, Universe,
};

pub const MIN_ITERATIONS: usize = 100;

/// Policy sizes (rows) for the signcryption suite.
pub const SIGNCRYPT_SIZES: [usize; 10] = [2, 4, 6, 8, 10, 12, 14, 16, 18, 20];
/// Satisfied-row counts for the designcryption suite.
pub const DESIGNCRYPT_SIZES: [usize; 10] = [2, 4, 6, 8, 10, 12, 14, 16, 18, 20];
/// Access-list sizes for the revocation suite.
pub const REVOKE_USERS: [usize; 11] = [10, 50, 100, 150, 200, 250, 300, 350, 400, 450, 500];

const MESSAGE: &[u8] = &[0x5a; 1024];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub suite: String,
    pub param: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on `(x, y)` points.
pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn suite(&self, suite: &str) -> impl Iterator<Item = &BenchRow> + '_ {
        let suite = suite.to_string();
        self.rows.iter().filter(move |r| r.suite == suite)
    }

    pub fn fit(&self, suite: &str) -> LinearFit {
        let points: Vec<_> = self.suite(suite).map(|r| (r.param as f64, r.mean_ms)).collect();
        linear_fit(&points)
    }

    /// Mean time never drops as the parameter grows.
    pub fn is_monotone(&self, suite: &str) -> bool {
        let means: Vec<f64> = self.suite(suite).map(|r| r.mean_ms).collect();
        means.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,param,mean_ms,std_ms,n\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:.4},{:.4},{}", r.suite, r.param, r.mean_ms, r.std_ms, r.n);
        }
        out
    }

    /// One line per suite: fit and monotonicity.
    pub fn summary(&self) -> String {
        let mut suites: Vec<&str> = self.rows.iter().map(|r| r.suite.as_str()).collect();
        suites.dedup();
        let mut out = String::new();
        for s in suites {
            let fit = self.fit(s);
            let _ = writeln!(
                out,
                "# {s}: slope {:.4} ms/unit, intercept {:.4} ms, r2 {:.4}, monotone {}",
                fit.slope,
                fit.intercept,
                fit.r_squared,
                self.is_monotone(s)
            );
        }
        out
    }
}

fn measure(suite: &str, param: usize, iterations: usize, mut f: impl FnMut() -> Result<()>) -> Result<BenchRow> {
    let mut samples = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let start = Instant::now();
        f()?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(BenchRow {
        suite: suite.to_string(),
        param,
        mean_ms: mean,
        std_ms: var.sqrt(),
        n: iterations,
    })
}

/// One authority `bench` with `bench.a1 .. bench.a{width}` and signer `bench`.
struct Fixture<E: Bilinear> {
    gp: GlobalParams<E>,
    authority: AuthorityKeypair<E>,
    signer: SignerKey<E>,
    rng: ChaCha20Rng,
}

impl<E: Bilinear> Fixture<E> {
    fn new(provider: E, width: usize, seed: u64) -> Result<Self> {
        let attrs: Vec<String> = (1..=width).map(|i| format!("bench.a{i}")).collect();
        let u = Universe::new().with_authority("bench", attrs).with_signer("bench", "bench.s");
        let gp = global_setup(128, u, provider)?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let authority = authority_setup(&gp, "bench", &mut rng)?;
        let signer = sign_key_gen(&gp, "bench", &mut rng)?;
        Ok(Fixture {
            gp,
            authority,
            signer,
            rng,
        })
    }

    /// `bench.s AND bench.a1 AND ...` with `rows` rows in total.
    fn policy(rows: usize) -> String {
        std::iter::once("bench.s".to_string())
            .chain((1..rows).map(|i| format!("bench.a{i}")))
            .collect::<Vec<_>>()
            .join(" AND ")
    }
}

fn widest(params: &[usize]) -> usize {
    params.iter().copied().max().unwrap_or(1).max(1)
}

pub fn bench_signcrypt<E: Bilinear>(provider: E, sizes: &[usize], iterations: usize, seed: u64) -> Result<BenchReport> {
    let mut fx = Fixture::new(provider, widest(sizes), seed)?;
    let publics = [fx.authority.public.clone()];
    let mut report = BenchReport::default();
    for &rows in sizes {
        let policy = Fixture::<E>::policy(rows);
        let row = measure("signcrypt", rows, iterations, || {
            signcrypt(&fx.gp, MESSAGE, &policy, &fx.signer, &publics, &mut fx.rng).map(|_| ())
        })?;
        report.rows.push(row);
    }
    Ok(report)
}

pub fn bench_designcrypt<E: Bilinear>(
    provider: E,
    sizes: &[usize],
    iterations: usize,
    seed: u64,
) -> Result<BenchReport> {
    let mut fx = Fixture::new(provider, widest(sizes), seed)?;
    let publics = [fx.authority.public.clone()];
    let mut registry = PrimeRegistry::new(fx.gp.mask_bits());
    let prime = registry.assign_prime("meter", &mut fx.rng)?;
    let mut table = AccessListTable::new();
    let vk = ver_key_gen(&fx.gp, "meter", &fx.signer, &mut fx.rng)?;
    let mut keys = Vec::new();
    for a in fx.gp.universe().attributes.clone() {
        table.grant(&a, "meter");
        keys.push(dec_key_gen(&fx.gp, "meter", &a, &fx.authority, &mut fx.rng)?);
    }
    let mut report = BenchReport::default();
    for &rows in sizes {
        let policy = Fixture::<E>::policy(rows);
        let st = signcrypt(&fx.gp, MESSAGE, &policy, &fx.signer, &publics, &mut fx.rng)?;
        let rt = revoke(&fx.gp, &st, &registry, &table, &mut fx.rng)?;
        let row = measure("designcrypt", rows, iterations, || {
            designcrypt(&fx.gp, &rt, Some(&vk), &keys, Some(&prime)).map(|_| ())
        })?;
        report.rows.push(row);
    }
    Ok(report)
}

/// Revocation of a two-row text whose attribute row lists `users` members.
pub fn bench_revoke<E: Bilinear>(provider: E, users: &[usize], iterations: usize, seed: u64) -> Result<BenchReport> {
    let mut fx = Fixture::new(provider, 1, seed)?;
    let publics = [fx.authority.public.clone()];
    let st = signcrypt(&fx.gp, MESSAGE, "bench.s AND bench.a1", &fx.signer, &publics, &mut fx.rng)?;
    let mut registry = PrimeRegistry::new(fx.gp.mask_bits());
    let most = users.iter().copied().max().unwrap_or(0);
    for i in 0..most {
        registry.assign_prime(&format!("m{i}"), &mut fx.rng)?;
    }
    let mut report = BenchReport::default();
    for &n in users {
        let mut table = AccessListTable::new();
        for i in 0..n {
            table.grant("bench.a1", &format!("m{i}"));
        }
        let row = measure("revoke", n, iterations, || {
            revoke(&fx.gp, &st, &registry, &table, &mut fx.rng).map(|_| ())
        })?;
        report.rows.push(row);
    }
    Ok(report)
}
