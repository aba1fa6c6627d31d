//! Line-oriented event-log serialization.
//!
//! One event per line, each a flat JSON object with `seq`, `kind`,
//! `token_id`, and the kind-specific fields. Parsing a serialized log and
//! replaying it reproduces the originating ledger state exactly.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Address, EventKind, LedgerEvent, PostCapPolicy, TokenId};

#[derive(Debug, Error)]
pub enum WireError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: unknown kind {kind:?}")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: missing field {field:?}")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: unknown policy {policy:?}")]
    UnknownPolicy { line: usize, policy: String },
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Line {
    seq: u64,
    kind: String,
    token_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    owner: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unlock_grant: Option<u64>,
}

fn policy_name(policy: PostCapPolicy) -> &'static str {
    match policy {
        PostCapPolicy::SoulboundConvert => "soulbound_convert",
        PostCapPolicy::AutoBurn => "auto_burn",
        PostCapPolicy::LockAndRelease { .. } => "lock_and_release",
        PostCapPolicy::ProvenanceFreeze => "provenance_freeze",
    }
}

fn encode_policy(line: &mut Line, policy: PostCapPolicy) {
    line.policy = Some(policy_name(policy).to_string());
    if let PostCapPolicy::LockAndRelease { unlock_grant } = policy {
        line.unlock_grant = unlock_grant;
    }
}

fn decode_policy(
    line_no: usize,
    name: &str,
    unlock_grant: Option<u64>,
) -> Result<PostCapPolicy, WireError> {
    Ok(match name {
        "soulbound_convert" => PostCapPolicy::SoulboundConvert,
        "auto_burn" => PostCapPolicy::AutoBurn,
        "lock_and_release" => PostCapPolicy::LockAndRelease { unlock_grant },
        "provenance_freeze" => PostCapPolicy::ProvenanceFreeze,
        other => {
            return Err(WireError::UnknownPolicy {
                line: line_no,
                policy: other.to_string(),
            })
        }
    })
}

/// Renders one event as a single JSON line (no trailing newline).
pub fn encode_event(event: &LedgerEvent) -> String {
    let mut line = Line {
        seq: event.seq,
        token_id: event.kind.token_id().0,
        ..Line::default()
    };
    match event.kind {
        EventKind::Minted {
            owner, limit, policy, ..
        } => {
            line.kind = "minted".into();
            line.owner = Some(owner.0);
            line.limit = Some(limit);
            encode_policy(&mut line, policy);
        }
        EventKind::Transferred { from, to, .. } => {
            line.kind = "transferred".into();
            line.from = Some(from.0);
            line.to = Some(to.0);
        }
        EventKind::TransferCountIncreased { count, .. } => {
            line.kind = "transfer_count_increased".into();
            line.count = Some(count);
        }
        EventKind::TransferLimitUpdated { limit, .. } => {
            line.kind = "transfer_limit_updated".into();
            line.limit = Some(limit);
        }
        EventKind::Burned { .. } => {
            line.kind = "burned".into();
        }
        EventKind::PolicyTriggered { policy, .. } => {
            line.kind = "policy_triggered".into();
            encode_policy(&mut line, policy);
        }
    }
    serde_json::to_string(&line).expect("event line serializes")
}

/// Parses one JSON line back into an event. `line_no` is used in errors only.
pub fn decode_event(text: &str, line_no: usize) -> Result<LedgerEvent, WireError> {
    let line: Line =
        serde_json::from_str(text).map_err(|source| WireError::Json { line: line_no, source })?;
    let token_id = TokenId(line.token_id);
    let need = |field: &'static str, value: Option<u64>| {
        value.ok_or(WireError::MissingField {
            line: line_no,
            field,
        })
    };
    let kind = match line.kind.as_str() {
        "minted" => {
            let policy_name = line.policy.as_deref().ok_or(WireError::MissingField {
                line: line_no,
                field: "policy",
            })?;
            EventKind::Minted {
                token_id,
                owner: Address(need("owner", line.owner)?),
                limit: need("limit", line.limit)?,
                policy: decode_policy(line_no, policy_name, line.unlock_grant)?,
            }
        }
        "transferred" => EventKind::Transferred {
            token_id,
            from: Address(need("from", line.from)?),
            to: Address(need("to", line.to)?),
        },
        "transfer_count_increased" => EventKind::TransferCountIncreased {
            token_id,
            count: need("count", line.count)?,
        },
        "transfer_limit_updated" => EventKind::TransferLimitUpdated {
            token_id,
            limit: need("limit", line.limit)?,
        },
        "burned" => EventKind::Burned { token_id },
        "policy_triggered" => {
            let policy_name = line.policy.as_deref().ok_or(WireError::MissingField {
                line: line_no,
                field: "policy",
            })?;
            EventKind::PolicyTriggered {
                token_id,
                policy: decode_policy(line_no, policy_name, line.unlock_grant)?,
            }
        }
        other => {
            return Err(WireError::UnknownKind {
                line: line_no,
                kind: other.to_string(),
            })
        }
    };
    Ok(LedgerEvent {
        seq: line.seq,
        kind,
    })
}

pub fn write_log<W: Write>(events: &[LedgerEvent], mut writer: W) -> io::Result<()> {
    for event in events {
        writeln!(writer, "{}", encode_event(event))?;
    }
    Ok(())
}

pub fn read_log<R: BufRead>(reader: R) -> Result<Vec<LedgerEvent>, WireError> {
    let mut events = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(decode_event(&line, idx + 1)?);
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::super::{Ledger, LedgerConfig};
    use super::*;

    #[test]
    fn log_round_trip_is_state_exact() {
        let mut ledger = Ledger::new();
        ledger
            .mint(Address(1), TokenId(1), 2, PostCapPolicy::LockAndRelease { unlock_grant: Some(5) })
            .unwrap();
        ledger.mint(Address(2), TokenId(2), 0, PostCapPolicy::AutoBurn).unwrap();
        ledger.transfer(Address(1), Address(2), TokenId(1)).unwrap();
        ledger.transfer(Address(2), Address(3), TokenId(1)).unwrap();
        ledger.unlock(TokenId(1), None).unwrap();
        ledger.transfer(Address(2), Address(1), TokenId(2)).unwrap();
        ledger.burn(Address(1), TokenId(2)).unwrap();

        let mut buffer = Vec::new();
        write_log(ledger.events(), &mut buffer).unwrap();
        let parsed = read_log(buffer.as_slice()).unwrap();
        assert_eq!(parsed, ledger.events());

        let replayed = Ledger::replay(&parsed, LedgerConfig::default()).unwrap();
        assert_eq!(replayed, ledger);
    }

    #[test]
    fn lines_are_flat_json_objects() {
        let event = LedgerEvent {
            seq: 7,
            kind: EventKind::Minted {
                token_id: TokenId(3),
                owner: Address(9),
                limit: 4,
                policy: PostCapPolicy::ProvenanceFreeze,
            },
        };
        let text = encode_event(&event);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let object = value.as_object().unwrap();
        assert!(object.values().all(|v| !v.is_object() && !v.is_array()));
        assert_eq!(object["seq"], 7);
        assert_eq!(object["kind"], "minted");
        assert_eq!(object["token_id"], 3);
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let err = decode_event(r#"{"seq":0,"kind":"teleported","token_id":1}"#, 1).unwrap_err();
        assert!(matches!(err, WireError::UnknownKind { .. }));
    }

    #[test]
    fn missing_field_is_rejected() {
        let err = decode_event(r#"{"seq":0,"kind":"transferred","token_id":1,"from":2}"#, 3)
            .unwrap_err();
        assert!(matches!(err, WireError::MissingField { line: 3, field: "to" }));
    }
}
