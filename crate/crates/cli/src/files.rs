//! On-disk formats. Key material is stored unencrypted as hex inside a small
//! JSON envelope; these files are for experiments, not deployment.

use std::fs;
use std::path::Path;

use mabs::scheme::{AuthorityKeypair, AuthorityPublicKey, DecryptionKey, SignerKey, VerificationKey};
use mabs::{Bilinear, Universe};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_string(path)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    write(path, text)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub provider: String,
    pub seed: u64,
    pub security_bits: u32,
    pub universe: Universe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyType {
    AuthorityKeypair,
    AuthorityPublic,
    Signer,
}

impl KeyType {
    fn tag(self) -> &'static str {
        match self {
            KeyType::AuthorityKeypair => "authority-keypair",
            KeyType::AuthorityPublic => "authority-public",
            KeyType::Signer => "signer",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeyFile {
    #[serde(rename = "type")]
    pub kind: String,
    pub provider: String,
    pub hex: String,
}

impl KeyFile {
    pub fn new<E: Bilinear>(kind: KeyType, bytes: &[u8]) -> Self {
        KeyFile {
            kind: kind.tag().to_string(),
            provider: E::NAME.to_string(),
            hex: hex::encode(bytes),
        }
    }

    fn bytes<E: Bilinear>(&self, path: &Path) -> Result<Vec<u8>, CliError> {
        if self.provider != E::NAME {
            return Err(CliError::Io(format!(
                "{}: key for provider `{}`, parameters use `{}`",
                path.display(),
                self.provider,
                E::NAME
            )));
        }
        hex::decode(&self.hex).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Key material accepted by `--keys` when signcrypting.
pub enum SigningMaterial<E: Bilinear> {
    Signer(SignerKey<E>),
    Authority(AuthorityPublicKey<E>),
}

pub fn load_signing_material<E: Bilinear>(path: &Path) -> Result<SigningMaterial<E>, CliError> {
    let file: KeyFile = read_json(path)?;
    let bytes = file.bytes::<E>(path)?;
    Ok(match file.kind.as_str() {
        "signer" => SigningMaterial::Signer(SignerKey::from_bytes(&bytes)?),
        "authority-keypair" => SigningMaterial::Authority(AuthorityKeypair::<E>::from_bytes(&bytes)?.public),
        "authority-public" => SigningMaterial::Authority(AuthorityPublicKey::from_bytes(&bytes)?),
        other => return Err(CliError::Io(format!("{}: unexpected key type `{other}`", path.display()))),
    })
}

pub fn load_authority<E: Bilinear>(path: &Path) -> Result<AuthorityKeypair<E>, CliError> {
    let file: KeyFile = read_json(path)?;
    if file.kind != KeyType::AuthorityKeypair.tag() {
        return Err(CliError::Io(format!("{}: not an authority keypair", path.display())));
    }
    Ok(AuthorityKeypair::from_bytes(&file.bytes::<E>(path)?)?)
}

pub fn load_signer<E: Bilinear>(path: &Path) -> Result<SignerKey<E>, CliError> {
    let file: KeyFile = read_json(path)?;
    if file.kind != KeyType::Signer.tag() {
        return Err(CliError::Io(format!("{}: not a signer key", path.display())));
    }
    Ok(SignerKey::from_bytes(&file.bytes::<E>(path)?)?)
}

/// Everything a meter holds: its prime and its keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Keystore {
    pub provider: String,
    pub gid: String,
    pub prime: String,
    #[serde(default)]
    pub decryption_keys: Vec<String>,
    #[serde(default)]
    pub verification_keys: Vec<String>,
}

pub struct LoadedKeystore<E: Bilinear> {
    pub prime: BigUint,
    pub decryption_keys: Vec<DecryptionKey<E>>,
    pub verification_keys: Vec<VerificationKey<E>>,
}

impl Keystore {
    pub fn new<E: Bilinear>(gid: &str, prime: &BigUint) -> Self {
        Keystore {
            provider: E::NAME.to_string(),
            gid: gid.to_string(),
            prime: prime.to_str_radix(16),
            decryption_keys: Vec::new(),
            verification_keys: Vec::new(),
        }
    }

    pub fn load<E: Bilinear>(&self, path: &Path) -> Result<LoadedKeystore<E>, CliError> {
        let bad = |m: &str| CliError::Io(format!("{}: {m}", path.display()));
        if self.provider != E::NAME {
            return Err(bad("keystore belongs to another provider"));
        }
        let prime = BigUint::parse_bytes(self.prime.as_bytes(), 16).ok_or_else(|| bad("bad prime"))?;
        let decode = |h: &String| hex::decode(h).map_err(|_| bad("bad key hex"));
        Ok(LoadedKeystore {
            prime,
            decryption_keys: self
                .decryption_keys
                .iter()
                .map(|h| Ok(DecryptionKey::from_bytes(&decode(h)?)?))
                .collect::<Result<_, CliError>>()?,
            verification_keys: self
                .verification_keys
                .iter()
                .map(|h| Ok(VerificationKey::from_bytes(&decode(h)?)?))
                .collect::<Result<_, CliError>>()?,
        })
    }
}
