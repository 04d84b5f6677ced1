//! Line-oriented scenario scripts.
//!
//! ```text
//! # declarations come first
//! DNO dno1 north south
//! VENDOR vA dlc plan9
//! REGISTER m1
//! GRANT m1 vA.dlc
//! PUBLISH vA dlc-shed-2kw vA.s AND vA.dlc
//! REVOKE m1 vA.dlc
//! ```
//!
//! `DNO`/`VENDOR <label> <attr>...` declares an authority controlling
//! `<label>.<attr>` which is also a signer with identity attribute
//! `<label>.s`. `PUBLISH` takes the sender, a payload token and the rest of
//! the line as the policy.

use crate::error::{Error, Result};
use crate::scheme::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActorKind {
    Dno,
    Vendor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Declare {
        kind: ActorKind,
        label: String,
        attributes: Vec<String>,
    },
    Register(String),
    Grant(String, String),
    Revoke(String, String),
    Publish {
        sender: String,
        payload: String,
        policy: String,
    },
}

/// A parsed script, with the line number of each command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub commands: Vec<(usize, Command)>,
}

pub fn identity_attribute(label: &str) -> String {
    format!("{label}.s")
}

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("line {line}: {msg}"))
}

impl Script {
    pub fn parse(text: &str) -> Result<Self> {
        let mut commands = Vec::new();
        let mut seen_action = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let arity = |n: usize| {
                if words.len() == n + 1 {
                    Ok(())
                } else {
                    Err(err(line, format!("{} takes {n} arguments", words[0])))
                }
            };
            let cmd = match words[0].to_ascii_uppercase().as_str() {
                kw @ ("DNO" | "VENDOR") => {
                    if seen_action {
                        return Err(err(line, "declarations must precede other commands"));
                    }
                    if words.len() < 3 {
                        return Err(err(line, format!("{kw} needs a label and at least one attribute")));
                    }
                    let label = words[1].to_string();
                    Command::Declare {
                        kind: if kw == "DNO" { ActorKind::Dno } else { ActorKind::Vendor },
                        attributes: words[2..].iter().map(|a| format!("{label}.{a}")).collect(),
                        label,
                    }
                }
                "REGISTER" => {
                    arity(1)?;
                    Command::Register(words[1].into())
                }
                "GRANT" => {
                    arity(2)?;
                    Command::Grant(words[1].into(), words[2].into())
                }
                "REVOKE" => {
                    arity(2)?;
                    Command::Revoke(words[1].into(), words[2].into())
                }
                "PUBLISH" => {
                    if words.len() < 4 {
                        return Err(err(line, "PUBLISH needs a sender, a payload and a policy"));
                    }
                    Command::Publish {
                        sender: words[1].into(),
                        payload: words[2].into(),
                        policy: words[3..].join(" "),
                    }
                }
                other => return Err(err(line, format!("unknown command `{other}`"))),
            };
            seen_action |= !matches!(cmd, Command::Declare { .. });
            commands.push((line, cmd));
        }
        Ok(Script { commands })
    }

    /// Universe implied by the declarations.
    pub fn universe(&self) -> Result<Universe> {
        let mut u = Universe::new();
        for (line, cmd) in &self.commands {
            if let Command::Declare { label, attributes, .. } = cmd {
                if u.authorities.contains(label) {
                    return Err(err(*line, format!("`{label}` declared twice")));
                }
                u = u
                    .with_authority(label, attributes.iter().map(String::as_str))
                    .with_signer(label, &identity_attribute(label));
            }
        }
        u.validate()?;
        Ok(u)
    }

    pub fn actors(&self) -> impl Iterator<Item = (ActorKind, &str)> {
        self.commands.iter().filter_map(|(_, c)| match c {
            Command::Declare { kind, label, .. } => Some((*kind, label.as_str())),
            _ => None,
        })
    }
}
