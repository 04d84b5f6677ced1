//! Deterministic downlink simulation: operators and vendors signcrypt, the
//! data communication company (DCC) re-encrypts and broadcasts, and every
//! registered meter tries to designcrypt.
//!
//! The trusted authority and the DCC share one process here, so the DCC
//! reads primes straight from the registry. The DCC forwards anything from a
//! declared sender without checking it first.

mod script;

pub use script::{identity_attribute, ActorKind, Command, Script};

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bilinear::Bilinear;
use crate::error::{Error, Result};
use crate::policy::{parse_policy, PolicyFormula};
use crate::revocation::{revoke, AccessListTable, PrimeRegistry};
use crate::scheme::{
    authority_setup, dec_key_gen, designcrypt, global_setup, sign_key_gen, signcrypt, ver_key_gen, AuthorityKeypair,
    DecryptionKey, GlobalParams, RevokedText, SignerKey, VerificationKey,
};

/// Security level recorded in simulator parameters.
pub const SIM_SECURITY_BITS: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Delivered,
    Unsatisfied,
    AuthFail,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Delivered => "DELIVERED",
            Outcome::Unsatisfied => "UNSATISFIED",
            Outcome::AuthFail => "AUTH_FAIL",
        })
    }
}

/// One relay on the downlink path with its nominal latency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hop {
    pub hop: &'static str,
    pub latency_ms: f64,
}

// (name, fixed delay ms, link rate in kbit/s)
const PATH: [(&str, f64, f64); 4] = [
    ("sender->DCC", 20.0, 10_000.0),
    ("DCC->WAN", 5.0, 10_000.0),
    ("WAN->NAN", 10.0, 1_000.0),
    ("NAN->meter", 2.0, 250.0),
];

fn hops(bytes: usize) -> Vec<Hop> {
    PATH.iter()
        .map(|&(hop, fixed, kbps)| {
            let ms = fixed + (bytes as f64 * 8.0) / kbps;
            Hop {
                hop,
                latency_ms: (ms * 1000.0).round() / 1000.0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownlinkEvent {
    pub sender: String,
    pub policy: String,
    pub payload_sha256: String,
    pub rows: usize,
    pub broadcast_bytes: usize,
    pub hops: Vec<Hop>,
    pub outcomes: BTreeMap<String, Outcome>,
}

impl DownlinkEvent {
    pub fn delivered(&self) -> BTreeSet<&str> {
        self.outcomes
            .iter()
            .filter(|(_, o)| **o == Outcome::Delivered)
            .map(|(g, _)| g.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum LogEvent {
    Declare { kind: ActorKind, label: String, attributes: Vec<String> },
    Register { gid: String, prime_bits: u64 },
    Grant { gid: String, attribute: String, key_issued: bool },
    Revoke { gid: String, attribute: String },
    Publish(DownlinkEvent),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogEntry {
    /// Logical clock, one tick per command.
    pub t: u64,
    #[serde(flatten)]
    pub event: LogEvent,
}

#[derive(Debug, Clone)]
pub struct Meter<E: Bilinear> {
    pub prime: BigUint,
    pub decryption_keys: BTreeMap<String, DecryptionKey<E>>,
    pub verification_keys: BTreeMap<String, VerificationKey<E>>,
}

pub struct Sim<E: Bilinear> {
    gp: GlobalParams<E>,
    rng: ChaCha20Rng,
    authorities: BTreeMap<String, AuthorityKeypair<E>>,
    signers: BTreeMap<String, SignerKey<E>>,
    meters: BTreeMap<String, Meter<E>>,
    registry: PrimeRegistry,
    table: AccessListTable,
    clock: u64,
    log: Vec<LogEntry>,
}

impl<E: Bilinear> Sim<E> {
    /// Sets up every authority and signer in the universe, in sorted order.
    pub fn new(gp: GlobalParams<E>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut authorities = BTreeMap::new();
        for a in &gp.universe().authorities {
            authorities.insert(a.clone(), authority_setup(&gp, a, &mut rng)?);
        }
        let mut signers = BTreeMap::new();
        for s in &gp.universe().signers {
            signers.insert(s.clone(), sign_key_gen(&gp, s, &mut rng)?);
        }
        let registry = PrimeRegistry::new(gp.mask_bits());
        Ok(Sim {
            gp,
            rng,
            authorities,
            signers,
            meters: BTreeMap::new(),
            registry,
            table: AccessListTable::new(),
            clock: 0,
            log: Vec::new(),
        })
    }

    pub fn params(&self) -> &GlobalParams<E> {
        &self.gp
    }

    pub fn meters(&self) -> &BTreeMap<String, Meter<E>> {
        &self.meters
    }

    pub fn registry(&self) -> &PrimeRegistry {
        &self.registry
    }

    pub fn access_lists(&self) -> &AccessListTable {
        &self.table
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn log_jsonl(&self) -> String {
        self.log
            .iter()
            .map(|e| serde_json::to_string(e).expect("log entries serialize") + "\n")
            .collect()
    }

    fn record(&mut self, event: LogEvent) {
        self.log.push(LogEntry { t: self.clock, event });
        self.clock += 1;
    }

    pub fn declare(&mut self, kind: ActorKind, label: &str) -> Result<()> {
        if !self.authorities.contains_key(label) || !self.signers.contains_key(label) {
            return Err(Error::UnknownAuthority(label.to_string()));
        }
        let attributes = self
            .gp
            .universe()
            .controller_map
            .iter()
            .filter(|(a, c)| *c == label && self.gp.is_attribute(a))
            .map(|(a, _)| a.clone())
            .collect();
        self.record(LogEvent::Declare {
            kind,
            label: label.to_string(),
            attributes,
        });
        Ok(())
    }

    /// Assigns a prime and issues a verification key from every signer.
    pub fn register_user(&mut self, gid: &str) -> Result<&Meter<E>> {
        if self.meters.contains_key(gid) {
            return Err(Error::AlreadyAssigned(gid.to_string()));
        }
        let prime = self.registry.assign_prime(gid, &mut self.rng)?;
        let mut verification_keys = BTreeMap::new();
        for (name, sk) in &self.signers {
            verification_keys.insert(name.clone(), ver_key_gen(&self.gp, gid, sk, &mut self.rng)?);
        }
        self.record(LogEvent::Register {
            gid: gid.to_string(),
            prime_bits: prime.bits(),
        });
        self.meters.insert(
            gid.to_string(),
            Meter {
                prime,
                decryption_keys: BTreeMap::new(),
                verification_keys,
            },
        );
        Ok(&self.meters[gid])
    }

    /// Adds `gid` to the attribute's access list, issuing a decryption key
    /// if the meter does not hold one yet.
    pub fn grant_attribute(&mut self, gid: &str, attribute: &str) -> Result<()> {
        if !self.gp.is_attribute(attribute) {
            return Err(Error::UnknownAttribute(attribute.to_string()));
        }
        let meter = self
            .meters
            .get_mut(gid)
            .ok_or_else(|| Error::UnregisteredIdentity(gid.to_string()))?;
        let key_issued = !meter.decryption_keys.contains_key(attribute);
        if key_issued {
            let controller = self.gp.controller(attribute).unwrap_or_default();
            let authority = &self.authorities[controller];
            let key = dec_key_gen(&self.gp, gid, attribute, authority, &mut self.rng)?;
            meter.decryption_keys.insert(attribute.to_string(), key);
        }
        self.table.grant(attribute, gid);
        self.record(LogEvent::Grant {
            gid: gid.to_string(),
            attribute: attribute.to_string(),
            key_issued,
        });
        Ok(())
    }

    /// Drops `gid` from the access list. The meter keeps its key.
    pub fn revoke_attribute(&mut self, gid: &str, attribute: &str) -> Result<()> {
        if !self.meters.contains_key(gid) {
            return Err(Error::UnregisteredIdentity(gid.to_string()));
        }
        self.table.remove(attribute, gid);
        self.record(LogEvent::Revoke {
            gid: gid.to_string(),
            attribute: attribute.to_string(),
        });
        Ok(())
    }

    /// Attributes the meter holds a key for and is still listed under.
    pub fn valid_attributes(&self, gid: &str) -> HashSet<String> {
        self.meters
            .get(gid)
            .map(|m| {
                m.decryption_keys
                    .keys()
                    .filter(|a| self.table.contains(a, gid))
                    .cloned()
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Meters that should receive a publish from `sender` under `policy`,
    /// by plain boolean evaluation.
    pub fn expected_delivery(&self, sender: &str, policy: &PolicyFormula) -> BTreeSet<String> {
        let identity = self.gp.signer_attribute(sender).map(str::to_string).ok();
        self.meters
            .iter()
            .filter(|(gid, m)| {
                let mut attrs = self.valid_attributes(gid);
                if let Some(s) = &identity {
                    if m.verification_keys.contains_key(sender) {
                        attrs.insert(s.clone());
                    }
                }
                policy.is_satisfied_by(&attrs)
            })
            .map(|(g, _)| g.clone())
            .collect()
    }

    /// Signcrypt at the sender, revoke at the DCC, designcrypt at every
    /// meter from the broadcast bytes.
    pub fn publish_multicast(&mut self, sender: &str, policy: &str, payload: &[u8]) -> Result<DownlinkEvent> {
        let signer = self
            .signers
            .get(sender)
            .ok_or_else(|| Error::UnknownSigner(sender.to_string()))?;
        let publics: Vec<_> = self.authorities.values().map(|k| k.public.clone()).collect();
        let text = signcrypt(&self.gp, payload, policy, signer, &publics, &mut self.rng)?;
        let revoked = revoke(&self.gp, &text, &self.registry, &self.table, &mut self.rng)?;
        let broadcast = revoked.to_bytes();

        // every meter hears the same bytes, so one decode serves them all
        let received = RevokedText::<E>::from_bytes(&broadcast)?;
        let mut outcomes = BTreeMap::new();
        for (gid, meter) in &self.meters {
            let keys: Vec<_> = meter.decryption_keys.values().cloned().collect();
            let result = designcrypt(
                &self.gp,
                &received,
                meter.verification_keys.get(sender),
                &keys,
                Some(&meter.prime),
            );
            let outcome = match result {
                Ok(m) if m == payload => Outcome::Delivered,
                Ok(_) => return Err(Error::Scenario(format!("meter {gid} accepted a wrong plaintext"))),
                Err(Error::Unsatisfied) => Outcome::Unsatisfied,
                Err(Error::AuthenticationFailed) => Outcome::AuthFail,
                Err(e) => return Err(e),
            };
            outcomes.insert(gid.clone(), outcome);
        }
        let event = DownlinkEvent {
            sender: sender.to_string(),
            policy: parse_policy(policy)?.to_string(),
            payload_sha256: hex::encode(Sha256::digest(payload)),
            rows: text.rows.len(),
            broadcast_bytes: broadcast.len(),
            hops: hops(broadcast.len()),
            outcomes,
        };
        self.record(LogEvent::Publish(event.clone()));
        Ok(event)
    }

    fn apply(&mut self, command: &Command) -> Result<()> {
        match command {
            Command::Declare { kind, label, .. } => self.declare(*kind, label),
            Command::Register(gid) => self.register_user(gid).map(|_| ()),
            Command::Grant(gid, attr) => self.grant_attribute(gid, attr),
            Command::Revoke(gid, attr) => self.revoke_attribute(gid, attr),
            Command::Publish { sender, payload, policy } => {
                self.publish_multicast(sender, policy, payload.as_bytes()).map(|_| ())
            }
        }
    }
}

/// Replays a script from scratch with a fixed seed.
pub fn run_scenario<E: Bilinear>(script: &Script, provider: E, seed: u64) -> Result<Sim<E>> {
    let gp = global_setup(SIM_SECURITY_BITS, script.universe()?, provider)?;
    let mut sim = Sim::new(gp, seed)?;
    for (line, command) in &script.commands {
        sim.apply(command).map_err(|e| match e {
            Error::Scenario(m) => Error::Scenario(format!("line {line}: {m}")),
            other => Error::Scenario(format!("line {line}: {other}")),
        })?;
    }
    Ok(sim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::MockProvider;

    type M = MockProvider<1009>;

    const SCRIPT: &str = "\
DNO dno1 north south
VENDOR vA dlc plan9
VENDOR vB dlc
REGISTER m1
REGISTER m2
REGISTER m3
GRANT m1 vA.dlc
GRANT m2 vA.dlc
GRANT m3 vB.dlc
GRANT m1 dno1.north
GRANT m3 dno1.north
PUBLISH vA dlc-shed vA.s AND vA.dlc
REVOKE m2 vA.dlc
PUBLISH vA dlc-shed-2 vA.s AND vA.dlc
PUBLISH dno1 fw-v2 dno1.s AND dno1.north AND (vA.dlc OR vB.dlc)
";

    fn publishes(sim: &Sim<M>) -> Vec<&DownlinkEvent> {
        sim.log()
            .iter()
            .filter_map(|e| match &e.event {
                LogEvent::Publish(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn subscribers_and_revocation() {
        let sim = run_scenario(&Script::parse(SCRIPT).unwrap(), M::new(0).unwrap(), 42).unwrap();
        let p = publishes(&sim);
        let o = |i: usize, g: &str| p[i].outcomes[g];
        assert_eq!((o(0, "m1"), o(0, "m2"), o(0, "m3")), (Outcome::Delivered, Outcome::Delivered, Outcome::Unsatisfied));
        assert_eq!((o(1, "m1"), o(1, "m2"), o(1, "m3")), (Outcome::Delivered, Outcome::AuthFail, Outcome::Unsatisfied));
        assert_eq!(p[2].delivered(), BTreeSet::from(["m1", "m3"]));
        assert_eq!(o(2, "m2"), Outcome::Unsatisfied);
    }

    #[test]
    fn outcomes_match_boolean_oracle() {
        let script = Script::parse(SCRIPT).unwrap();
        let gp = global_setup(SIM_SECURITY_BITS, script.universe().unwrap(), M::new(0).unwrap()).unwrap();
        let mut sim = Sim::new(gp, 9).unwrap();
        for (_, c) in &script.commands {
            if let Command::Publish { sender, payload, policy } = c {
                let expected = sim.expected_delivery(sender, &parse_policy(policy).unwrap());
                let event = sim.publish_multicast(sender, policy, payload.as_bytes()).unwrap();
                let got: BTreeSet<String> = event.delivered().into_iter().map(String::from).collect();
                assert_eq!(got, expected);
            } else {
                sim.apply(c).unwrap();
            }
        }
    }

    #[test]
    fn log_is_byte_stable() {
        let script = Script::parse(SCRIPT).unwrap();
        let a = run_scenario(&script, M::new(0).unwrap(), 5).unwrap().log_jsonl();
        let b = run_scenario(&script, M::new(0).unwrap(), 5).unwrap().log_jsonl();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 15);
        let first: serde_json::Value = serde_json::from_str(a.lines().next().unwrap()).unwrap();
        assert_eq!(first["event"], "declare");
        assert_eq!(first["t"], 0);
        let last: serde_json::Value = serde_json::from_str(a.lines().last().unwrap()).unwrap();
        assert_eq!(last["outcomes"]["m1"], "DELIVERED");
        assert_eq!(last["hops"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn script_errors_carry_line_numbers() {
        let script = Script::parse("VENDOR vA dlc\nREGISTER m1\nGRANT m9 vA.dlc").unwrap();
        let err = run_scenario(&script, M::new(0).unwrap(), 1).err().unwrap();
        assert_eq!(err, Error::Scenario("line 3: identity `m9` has no registered prime".into()));
    }
}
