mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mabs::bench::{self, BenchReport};
use mabs::revocation::{revoke, AccessListTable, PrimeRegistry};
use mabs::scheme::{
    authority_setup, dec_key_gen, designcrypt, global_setup, sign_key_gen, signcrypt, ver_key_gen, GlobalParams,
    RevokedText, SigncryptedText,
};
use mabs::sim::{run_scenario, Script};
use mabs::{Bilinear, Error, Mock, Production};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use files::{KeyFile, KeyType, Keystore, ParamsFile, SigningMaterial};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Crypto(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Crypto(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProviderArg {
    Production,
    Mock,
}

#[derive(Parser)]
#[command(name = "mabs", version, about = "Multi-authority attribute-based signcryption for grid multicast")]
struct Cli {
    /// RNG seed; MABS_SEED takes precedence. Without either, the OS seeds it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Publish global parameters for a universe description.
    Setup {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "production")]
        provider: ProviderArg,
        #[arg(long, default_value_t = 128)]
        security_bits: u32,
    },
    AuthorityKeygen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        authority: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write the public half on its own.
        #[arg(long)]
        public_out: Option<PathBuf>,
    },
    SignerKeygen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        signer: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign a CRT prime to a meter and start its keystore.
    Register {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        gid: String,
        /// Created if missing.
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        keystore: PathBuf,
    },
    /// Issue a decryption key into a keystore.
    Deckey {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        authority_key: PathBuf,
        #[arg(long)]
        attribute: String,
        #[arg(long)]
        keystore: PathBuf,
        /// Also list the meter under the attribute (created if missing).
        #[arg(long)]
        access_lists: Option<PathBuf>,
    },
    /// Issue a verification key into a keystore.
    Verkey {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        signer_key: PathBuf,
        #[arg(long)]
        keystore: PathBuf,
    },
    Signcrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Signer key plus authority keys for every attribute in the policy.
        #[arg(long, num_args = 1.., required = true)]
        keys: Vec<PathBuf>,
    },
    Revoke {
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        access_lists: PathBuf,
    },
    Designcrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Meter keystore.
        #[arg(long)]
        keys: PathBuf,
    },
    Sim {
        #[command(subcommand)]
        action: SimCmd,
    },
    Bench {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, num_args = 1..)]
        users: Vec<usize>,
        #[arg(long, num_args = 1..)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = bench::MIN_ITERATIONS)]
        iterations: usize,
        #[arg(long, value_enum, default_value = "production")]
        provider: ProviderArg,
        /// CSV destination; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Replay a scenario script and print the JSON-lines log.
    Run {
        script: PathBuf,
        #[arg(long, value_enum, default_value = "mock")]
        provider: ProviderArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Signcrypt,
    Designcrypt,
    Revoke,
    All,
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    match std::env::var("MABS_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("MABS_SEED must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn provider_name(p: ProviderArg) -> &'static str {
    match p {
        ProviderArg::Production => Production::NAME,
        ProviderArg::Mock => Mock::NAME,
    }
}

fn mock(seed: u64) -> Result<Mock, CliError> {
    Ok(Mock::new(seed)?)
}

/// Loads the parameter file and runs `$body` with `$gp` bound to the
/// provider-specific parameters.
macro_rules! with_params {
    ($path:expr, |$gp:ident| $body:expr) => {{
        let file: ParamsFile = files::read_json($path)?;
        match file.provider.as_str() {
            "production" => {
                let $gp = global_setup(file.security_bits, file.universe, Production::new())?;
                $body
            }
            "mock" => {
                let $gp = global_setup(file.security_bits, file.universe, mock(file.seed)?)?;
                $body
            }
            other => Err(CliError::Io(format!("unknown provider `{other}` in parameters"))),
        }
    }};
}

fn load_registry<E: Bilinear>(gp: &GlobalParams<E>, path: &Path) -> Result<PrimeRegistry, CliError> {
    let mask = gp.mask_bits();
    if !path.exists() {
        return Ok(PrimeRegistry::new(mask));
    }
    Ok(PrimeRegistry::from_json(
        &files::read_string(path)?,
        mask,
        mask + mabs::revocation::DEFAULT_PRIME_MARGIN,
    )?)
}

fn load_access_lists(path: &Path) -> Result<AccessListTable, CliError> {
    if !path.exists() {
        return Ok(AccessListTable::new());
    }
    Ok(AccessListTable::from_json(&files::read_string(path)?)?)
}

fn authority_keygen<E: Bilinear>(
    gp: GlobalParams<E>,
    authority: &str,
    out: &Path,
    public_out: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let kp = authority_setup(&gp, authority, &mut rng(seed))?;
    files::write_json(out, &KeyFile::new::<E>(KeyType::AuthorityKeypair, &kp.to_bytes()))?;
    if let Some(p) = public_out {
        files::write_json(p, &KeyFile::new::<E>(KeyType::AuthorityPublic, &kp.public.to_bytes()))?;
    }
    Ok(())
}

fn signer_keygen<E: Bilinear>(gp: GlobalParams<E>, signer: &str, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let sk = sign_key_gen(&gp, signer, &mut rng(seed))?;
    files::write_json(out, &KeyFile::new::<E>(KeyType::Signer, &sk.to_bytes()))
}

fn register<E: Bilinear>(
    gp: GlobalParams<E>,
    gid: &str,
    registry_path: &Path,
    keystore: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut registry = load_registry(&gp, registry_path)?;
    let prime = registry.assign_prime(gid, &mut rng(seed))?;
    files::write(registry_path, registry.to_json() + "\n")?;
    files::write_json(keystore, &Keystore::new::<E>(gid, &prime))
}

fn deckey<E: Bilinear>(
    gp: GlobalParams<E>,
    authority_key: &Path,
    attribute: &str,
    keystore_path: &Path,
    access_lists: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let authority = files::load_authority::<E>(authority_key)?;
    let mut store: Keystore = files::read_json(keystore_path)?;
    store.load::<E>(keystore_path)?;
    let key = dec_key_gen(&gp, &store.gid, attribute, &authority, &mut rng(seed))?;
    store.decryption_keys.push(hex::encode(key.to_bytes()));
    files::write_json(keystore_path, &store)?;
    if let Some(path) = access_lists {
        let mut table = load_access_lists(path)?;
        table.grant(attribute, &store.gid);
        files::write(path, table.to_json() + "\n")?;
    }
    Ok(())
}

fn verkey<E: Bilinear>(
    gp: GlobalParams<E>,
    signer_key: &Path,
    keystore_path: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let signer = files::load_signer::<E>(signer_key)?;
    let mut store: Keystore = files::read_json(keystore_path)?;
    store.load::<E>(keystore_path)?;
    let vk = ver_key_gen(&gp, &store.gid, &signer, &mut rng(seed))?;
    store.verification_keys.push(hex::encode(vk.to_bytes()));
    files::write_json(keystore_path, &store)
}

fn signcrypt_cmd<E: Bilinear>(
    gp: GlobalParams<E>,
    policy: &str,
    input: &Path,
    out: &Path,
    keys: &[PathBuf],
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut signer = None;
    let mut publics = Vec::new();
    for path in keys {
        match files::load_signing_material::<E>(path)? {
            SigningMaterial::Signer(sk) if signer.is_none() => signer = Some(sk),
            SigningMaterial::Signer(_) => return Err(CliError::Usage("more than one signer key given".into())),
            SigningMaterial::Authority(pk) => publics.push(pk),
        }
    }
    let signer = signer.ok_or_else(|| CliError::Usage("--keys must include a signer key".into()))?;
    let message = files::read(input)?;
    let text = signcrypt(&gp, &message, policy, &signer, &publics, &mut rng(seed))?;
    files::write(out, text.to_bytes())
}

fn revoke_cmd<E: Bilinear>(
    gp: GlobalParams<E>,
    input: &Path,
    out: &Path,
    registry: &Path,
    access_lists: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let text = SigncryptedText::<E>::from_bytes(&files::read(input)?)?;
    let registry = load_registry(&gp, registry)?;
    let table = load_access_lists(access_lists)?;
    let revoked = revoke(&gp, &text, &registry, &table, &mut rng(seed))?;
    files::write(out, revoked.to_bytes())
}

fn designcrypt_cmd<E: Bilinear>(gp: GlobalParams<E>, input: &Path, out: &Path, keys: &Path) -> Result<(), CliError> {
    let revoked = RevokedText::<E>::from_bytes(&files::read(input)?)?;
    let store: Keystore = files::read_json(keys)?;
    let store = store.load::<E>(keys)?;
    let labels = revoked.text.policy.labels();
    let vk = store
        .verification_keys
        .iter()
        .find(|vk| labels.iter().any(|l| l == &vk.attribute));
    let message = designcrypt(&gp, &revoked, vk, &store.decryption_keys, Some(&store.prime))?;
    files::write(out, message)
}

fn sim_run(script: &Path, provider: ProviderArg, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let script = Script::parse(&files::read_string(script)?)?;
    let seed = seed.unwrap_or(0);
    let log = match provider {
        ProviderArg::Production => run_scenario(&script, Production::new(), seed)?.log_jsonl(),
        ProviderArg::Mock => run_scenario(&script, mock(seed)?, seed)?.log_jsonl(),
    };
    match out {
        Some(p) => files::write(p, log),
        None => {
            print!("{log}");
            Ok(())
        }
    }
}

fn bench_cmd(
    suite: Suite,
    users: &[usize],
    sizes: &[usize],
    iterations: usize,
    provider: ProviderArg,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    if provider != ProviderArg::Production {
        return Err(CliError::Usage("benchmarks need the production provider".into()));
    }
    if iterations < bench::MIN_ITERATIONS {
        return Err(CliError::Usage(format!(
            "--iterations must be at least {}",
            bench::MIN_ITERATIONS
        )));
    }
    let seed = seed.unwrap_or(0);
    let pick = |given: &[usize], default: &[usize]| if given.is_empty() { default.to_vec() } else { given.to_vec() };
    let mut report = BenchReport::default();
    if matches!(suite, Suite::Signcrypt | Suite::All) {
        let sizes = pick(sizes, &bench::SIGNCRYPT_SIZES);
        report.rows.extend(bench::bench_signcrypt(Production::new(), &sizes, iterations, seed)?.rows);
    }
    if matches!(suite, Suite::Designcrypt | Suite::All) {
        let sizes = pick(sizes, &bench::DESIGNCRYPT_SIZES);
        report.rows.extend(bench::bench_designcrypt(Production::new(), &sizes, iterations, seed)?.rows);
    }
    if matches!(suite, Suite::Revoke | Suite::All) {
        let users = pick(users, &bench::REVOKE_USERS);
        report.rows.extend(bench::bench_revoke(Production::new(), &users, iterations, seed)?.rows);
    }
    match out {
        Some(p) => {
            files::write(p, report.to_csv())?;
            print!("{}", report.summary());
        }
        None => {
            print!("{}", report.to_csv());
            eprint!("{}", report.summary());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Cmd::Setup {
            universe,
            out,
            provider,
            security_bits,
        } => {
            let universe: mabs::Universe = files::read_json(&universe)?;
            universe.validate()?;
            let file = ParamsFile {
                provider: provider_name(provider).to_string(),
                seed: seed.unwrap_or(0),
                security_bits,
                universe,
            };
            files::write_json(&out, &file)
        }
        Cmd::AuthorityKeygen {
            params,
            authority,
            out,
            public_out,
        } => with_params!(&params, |gp| authority_keygen(gp, &authority, &out, public_out.as_deref(), seed)),
        Cmd::SignerKeygen { params, signer, out } => {
            with_params!(&params, |gp| signer_keygen(gp, &signer, &out, seed))
        }
        Cmd::Register {
            params,
            gid,
            registry,
            keystore,
        } => with_params!(&params, |gp| register(gp, &gid, &registry, &keystore, seed)),
        Cmd::Deckey {
            params,
            authority_key,
            attribute,
            keystore,
            access_lists,
        } => with_params!(&params, |gp| deckey(
            gp,
            &authority_key,
            &attribute,
            &keystore,
            access_lists.as_deref(),
            seed
        )),
        Cmd::Verkey {
            params,
            signer_key,
            keystore,
        } => with_params!(&params, |gp| verkey(gp, &signer_key, &keystore, seed)),
        Cmd::Signcrypt {
            params,
            policy,
            input,
            out,
            keys,
        } => with_params!(&params, |gp| signcrypt_cmd(gp, &policy, &input, &out, &keys, seed)),
        Cmd::Revoke {
            params,
            input,
            out,
            registry,
            access_lists,
        } => with_params!(&params, |gp| revoke_cmd(gp, &input, &out, &registry, &access_lists, seed)),
        Cmd::Designcrypt {
            params,
            input,
            out,
            keys,
        } => with_params!(&params, |gp| designcrypt_cmd(gp, &input, &out, &keys)),
        Cmd::Sim {
            action: SimCmd::Run { script, provider, out },
        } => sim_run(&script, provider, out.as_deref(), seed),
        Cmd::Bench {
            suite,
            users,
            sizes,
            iterations,
            provider,
            out,
        } => bench_cmd(suite, &users, &sizes, iterations, provider, out.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Crypto(Error::Unsatisfied)) => {
            eprintln!("UNSATISFIED: the keys do not satisfy the policy");
            ExitCode::from(2)
        }
        Err(CliError::Crypto(Error::AuthenticationFailed)) => {
            eprintln!("AUTH_FAIL: designcryption failed (revoked key, forgery or corrupted text)");
            ExitCode::from(2)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Crypto(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
