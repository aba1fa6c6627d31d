//! Event-sourced counted-transfer ledger.
//!
//! Each token carries a transfer count `k` and a transfer limit `L` (`L = 0`
//! encodes unbounded transferability). Native transfers — owner changes with
//! non-zero sender and recipient — are the only operations that consume
//! budget; mint and burn are count-neutral. When a capped token's count
//! reaches its limit, the token's post-cap policy fires and decides what the
//! token becomes.
//!
//! Every mutation appends to an event log; replaying the log from an empty
//! ledger reproduces the token map exactly.

pub mod sim;
pub mod wire;

use std::collections::BTreeMap;

use thiserror::Error;

/// Opaque account identifier. `ZERO` is reserved for the mint/burn endpoints
/// and can never own a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub u64);

impl Address {
    pub const ZERO: Address = Address(0);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u64);

/// Destination of a token once its budget is exhausted (`k = L`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PostCapPolicy {
    /// Permanently non-transferable at the current holder.
    SoulboundConvert,
    /// Destroyed when the cap is reached.
    AutoBurn,
    /// Locked at the cap; [`Ledger::unlock`] grants new budget and reactivates.
    LockAndRelease { unlock_grant: Option<u64> },
    /// Stays with its final owner; the log is a complete bounded provenance chain.
    #[default]
    ProvenanceFreeze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenStatus {
    Active,
    Settled,
    Burned,
}

/// Per-token transfer state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRecord {
    pub token_id: TokenId,
    pub owner: Address,
    /// Successful native transfers consumed so far. Non-decreasing.
    pub transfer_count: u64,
    /// Maximum native transfers; 0 = unbounded.
    pub transfer_limit: u64,
    pub status: TokenStatus,
    /// Fixed at mint.
    pub policy: PostCapPolicy,
}

impl TokenRecord {
    pub fn remaining(&self) -> Remaining {
        if self.transfer_limit == 0 {
            Remaining::Unbounded
        } else {
            Remaining::Finite(self.transfer_limit - self.transfer_count)
        }
    }

    fn at_cap(&self) -> bool {
        self.transfer_limit > 0 && self.transfer_count >= self.transfer_limit
    }
}

/// Remaining transfer budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Remaining {
    Unbounded,
    Finite(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEvent {
    /// Monotone sequence number, assigned at append time.
    pub seq: u64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Minted {
        token_id: TokenId,
        owner: Address,
        limit: u64,
        policy: PostCapPolicy,
    },
    Transferred {
        token_id: TokenId,
        from: Address,
        to: Address,
    },
    TransferCountIncreased {
        token_id: TokenId,
        count: u64,
    },
    TransferLimitUpdated {
        token_id: TokenId,
        limit: u64,
    },
    Burned {
        token_id: TokenId,
    },
    PolicyTriggered {
        token_id: TokenId,
        policy: PostCapPolicy,
    },
}

impl EventKind {
    pub fn token_id(&self) -> TokenId {
        match *self {
            EventKind::Minted { token_id, .. }
            | EventKind::Transferred { token_id, .. }
            | EventKind::TransferCountIncreased { token_id, .. }
            | EventKind::TransferLimitUpdated { token_id, .. }
            | EventKind::Burned { token_id }
            | EventKind::PolicyTriggered { token_id, .. } => token_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LedgerConfig {
    /// Permit `set_transfer_limit(.., 0)` on a capped token, removing its cap.
    /// Off by default: a compromised owner could otherwise lift the bound.
    pub allow_unbounded_reset: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("token {} already minted", (.0).0)]
    DuplicateToken(TokenId),
    #[error("zero address may not own a token")]
    ZeroAddressOwner,
    #[error("limit {limit} below transfer count {count}")]
    LimitBelowCount { limit: u64, count: u64 },
    #[error("unbounded reset is disabled")]
    UnboundedResetForbidden,
    #[error("token {} is not active", (.0).0)]
    TokenNotActive(TokenId),
    #[error("caller is not authorized")]
    NotAuthorized,
    #[error("transfer limit reached")]
    TransferLimitReached,
    #[error("sender does not own token {}", (.0).0)]
    NotOwner(TokenId),
    #[error("zero address in transfer")]
    ZeroAddress,
    #[error("unknown token {}", (.0).0)]
    UnknownToken(TokenId),
    #[error("transfer cap not reached")]
    CapNotReached,
    #[error("token is not locked for release")]
    NotLocked,
    #[error("invalid history at event {index}: {reason}")]
    InvalidHistory { index: usize, reason: String },
}

type Result<T> = std::result::Result<T, LedgerError>;

/// Single-writer token ledger. Mutations are serialized through `&mut self`;
/// reads are pure. Bulk simulations shard tokens across independent instances.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ledger {
    tokens: BTreeMap<TokenId, TokenRecord>,
    log: Vec<LedgerEvent>,
    config: LedgerConfig,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: LedgerConfig) -> Self {
        Ledger {
            config,
            ..Self::default()
        }
    }

    pub fn config(&self) -> LedgerConfig {
        self.config
    }

    pub fn token(&self, token_id: TokenId) -> Option<&TokenRecord> {
        self.tokens.get(&token_id)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TokenRecord> {
        self.tokens.values()
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.log
    }

    fn push(&mut self, kind: EventKind) {
        let seq = self.log.last().map_or(0, |e| e.seq + 1);
        self.log.push(LedgerEvent { seq, kind });
    }

    /// Mints `token_id` to `owner` with limit `limit` (0 = unbounded) and the
    /// given post-cap policy. Count-neutral: `k` starts and stays at 0 here.
    pub fn mint(
        &mut self,
        owner: Address,
        token_id: TokenId,
        limit: u64,
        policy: PostCapPolicy,
    ) -> Result<&TokenRecord> {
        if self.tokens.contains_key(&token_id) {
            return Err(LedgerError::DuplicateToken(token_id));
        }
        if owner.is_zero() {
            return Err(LedgerError::ZeroAddressOwner);
        }
        self.tokens.insert(
            token_id,
            TokenRecord {
                token_id,
                owner,
                transfer_count: 0,
                transfer_limit: limit,
                status: TokenStatus::Active,
                policy,
            },
        );
        self.push(EventKind::Minted {
            token_id,
            owner,
            limit,
            policy,
        });
        Ok(&self.tokens[&token_id])
    }

    /// Updates the transfer limit. Owner-only; the limit can never drop below
    /// the accumulated count, and resetting to unbounded (0) requires the
    /// `allow_unbounded_reset` config flag.
    pub fn set_transfer_limit(
        &mut self,
        caller: Address,
        token_id: TokenId,
        new_limit: u64,
    ) -> Result<&TokenRecord> {
        let record = self
            .tokens
            .get(&token_id)
            .ok_or(LedgerError::UnknownToken(token_id))?;
        if record.status != TokenStatus::Active {
            return Err(LedgerError::TokenNotActive(token_id));
        }
        if record.owner != caller {
            return Err(LedgerError::NotAuthorized);
        }
        if new_limit == 0 {
            if !self.config.allow_unbounded_reset {
                return Err(LedgerError::UnboundedResetForbidden);
            }
        } else if new_limit < record.transfer_count {
            return Err(LedgerError::LimitBelowCount {
                limit: new_limit,
                count: record.transfer_count,
            });
        }
        self.tokens.get_mut(&token_id).unwrap().transfer_limit = new_limit;
        self.push(EventKind::TransferLimitUpdated {
            token_id,
            limit: new_limit,
        });
        Ok(&self.tokens[&token_id])
    }

    /// Native transfer. Succeeds iff the token is active, `from` owns it, both
    /// endpoints are non-zero, and the budget allows (`L = 0` or `k < L`).
    /// The cap guard runs before any other check, mirroring pre-transfer
    /// enforcement in the on-chain hook, so exhausted tokens always report
    /// `TransferLimitReached`. If this transfer makes `k = L`, the post-cap
    /// policy fires immediately.
    pub fn transfer(&mut self, from: Address, to: Address, token_id: TokenId) -> Result<&TokenRecord> {
        let record = self
            .tokens
            .get(&token_id)
            .ok_or(LedgerError::UnknownToken(token_id))?;
        if record.at_cap() {
            return Err(LedgerError::TransferLimitReached);
        }
        if record.status != TokenStatus::Active {
            return Err(LedgerError::TokenNotActive(token_id));
        }
        if from.is_zero() || to.is_zero() {
            return Err(LedgerError::ZeroAddress);
        }
        if record.owner != from {
            return Err(LedgerError::NotOwner(token_id));
        }

        let record = self.tokens.get_mut(&token_id).unwrap();
        record.owner = to;
        record.transfer_count += 1;
        let count = record.transfer_count;
        let hit_cap = record.transfer_limit > 0 && count == record.transfer_limit;
        self.push(EventKind::Transferred { token_id, from, to });
        self.push(EventKind::TransferCountIncreased { token_id, count });
        if hit_cap {
            self.fire_policy(token_id);
        }
        Ok(&self.tokens[&token_id])
    }

    /// Burns the token. Owner-only, count-neutral, terminal.
    pub fn burn(&mut self, caller: Address, token_id: TokenId) -> Result<()> {
        let record = self
            .tokens
            .get(&token_id)
            .ok_or(LedgerError::UnknownToken(token_id))?;
        if record.status != TokenStatus::Active {
            return Err(LedgerError::TokenNotActive(token_id));
        }
        if record.owner != caller {
            return Err(LedgerError::NotAuthorized);
        }
        self.tokens.get_mut(&token_id).unwrap().status = TokenStatus::Burned;
        self.push(EventKind::Burned { token_id });
        Ok(())
    }

    pub fn transfer_count_of(&self, token_id: TokenId) -> Result<u64> {
        self.tokens
            .get(&token_id)
            .map(|r| r.transfer_count)
            .ok_or(LedgerError::UnknownToken(token_id))
    }

    pub fn transfer_limit_of(&self, token_id: TokenId) -> Result<u64> {
        self.tokens
            .get(&token_id)
            .map(|r| r.transfer_limit)
            .ok_or(LedgerError::UnknownToken(token_id))
    }

    pub fn remaining(&self, token_id: TokenId) -> Result<Remaining> {
        self.tokens
            .get(&token_id)
            .map(TokenRecord::remaining)
            .ok_or(LedgerError::UnknownToken(token_id))
    }

    /// Applies the token's post-cap policy. Only legal while the token is
    /// still active at `k = L` (the transfer that reaches the cap fires the
    /// policy itself; this entry point covers caps reached by lowering the
    /// limit to the current count).
    pub fn apply_post_cap_policy(&mut self, token_id: TokenId) -> Result<&TokenRecord> {
        let record = self
            .tokens
            .get(&token_id)
            .ok_or(LedgerError::UnknownToken(token_id))?;
        if record.status != TokenStatus::Active {
            return Err(LedgerError::TokenNotActive(token_id));
        }
        if !(record.transfer_limit > 0 && record.transfer_count == record.transfer_limit) {
            return Err(LedgerError::CapNotReached);
        }
        self.fire_policy(token_id);
        Ok(&self.tokens[&token_id])
    }

    fn fire_policy(&mut self, token_id: TokenId) {
        let record = self.tokens.get_mut(&token_id).unwrap();
        let policy = record.policy;
        record.status = match policy {
            PostCapPolicy::AutoBurn => TokenStatus::Burned,
            _ => TokenStatus::Settled,
        };
        self.push(EventKind::PolicyTriggered { token_id, policy });
    }

    /// Releases a token settled under `LockAndRelease`: grants new budget
    /// (`L := L + grant`) and reactivates it. `grant` falls back to the
    /// policy's configured grant, then to 0. Governance-level operation; no
    /// caller check.
    pub fn unlock(&mut self, token_id: TokenId, grant: Option<u64>) -> Result<&TokenRecord> {
        let record = self
            .tokens
            .get(&token_id)
            .ok_or(LedgerError::UnknownToken(token_id))?;
        let configured = match record.policy {
            PostCapPolicy::LockAndRelease { unlock_grant } => unlock_grant,
            _ => return Err(LedgerError::NotLocked),
        };
        if record.status != TokenStatus::Settled {
            return Err(LedgerError::NotLocked);
        }
        let grant = grant.or(configured).unwrap_or(0);
        let record = self.tokens.get_mut(&token_id).unwrap();
        record.transfer_limit += grant;
        record.status = TokenStatus::Active;
        let limit = record.transfer_limit;
        self.push(EventKind::TransferLimitUpdated { token_id, limit });
        Ok(&self.tokens[&token_id])
    }

    /// Rebuilds a ledger from an event log, validating that every event is
    /// legal in the state preceding it. Replaying the log of a live ledger
    /// yields a ledger equal to it.
    pub fn replay(events: &[LedgerEvent], config: LedgerConfig) -> Result<Ledger> {
        let mut ledger = Ledger::with_config(config);
        // Tokens with a Transferred event not yet acknowledged by its
        // TransferCountIncreased.
        let mut pending: BTreeMap<TokenId, u64> = BTreeMap::new();
        let mut last_seq: Option<u64> = None;

        for (index, event) in events.iter().enumerate() {
            let fail = |reason: &str| LedgerError::InvalidHistory {
                index,
                reason: reason.to_string(),
            };
            if last_seq.is_some_and(|prev| event.seq <= prev) {
                return Err(fail("sequence number not increasing"));
            }
            last_seq = Some(event.seq);

            let token_id = event.kind.token_id();
            if let Some(&count) = pending.get(&token_id) {
                match event.kind {
                    EventKind::TransferCountIncreased { count: c, .. } if c == count => {
                        pending.remove(&token_id);
                        ledger.log.push(event.clone());
                        continue;
                    }
                    _ => return Err(fail("transfer missing count acknowledgement")),
                }
            }

            match event.kind {
                EventKind::Minted {
                    token_id,
                    owner,
                    limit,
                    policy,
                } => {
                    if ledger.tokens.contains_key(&token_id) {
                        return Err(fail("token already minted"));
                    }
                    if owner.is_zero() {
                        return Err(fail("minted to zero address"));
                    }
                    ledger.tokens.insert(
                        token_id,
                        TokenRecord {
                            token_id,
                            owner,
                            transfer_count: 0,
                            transfer_limit: limit,
                            status: TokenStatus::Active,
                            policy,
                        },
                    );
                }
                EventKind::Transferred { token_id, from, to } => {
                    let record = ledger
                        .tokens
                        .get_mut(&token_id)
                        .ok_or_else(|| fail("transfer of unknown token"))?;
                    if record.at_cap() {
                        return Err(fail("transfer past limit"));
                    }
                    if record.status != TokenStatus::Active {
                        return Err(fail("transfer of inactive token"));
                    }
                    if from.is_zero() || to.is_zero() {
                        return Err(fail("zero address in transfer"));
                    }
                    if record.owner != from {
                        return Err(fail("transfer from non-owner"));
                    }
                    record.owner = to;
                    record.transfer_count += 1;
                    pending.insert(token_id, record.transfer_count);
                }
                EventKind::TransferCountIncreased { .. } => {
                    return Err(fail("count increase without preceding transfer"));
                }
                EventKind::TransferLimitUpdated { token_id, limit } => {
                    let allow_reset = ledger.config.allow_unbounded_reset;
                    let record = ledger
                        .tokens
                        .get_mut(&token_id)
                        .ok_or_else(|| fail("limit update of unknown token"))?;
                    match record.status {
                        TokenStatus::Active => {
                            if limit == 0 && !allow_reset {
                                return Err(fail("unbounded reset is disabled"));
                            }
                            if limit > 0 && limit < record.transfer_count {
                                return Err(fail("limit below transfer count"));
                            }
                        }
                        // A limit update on a settled lock-and-release token
                        // is the unlock: budget grows and the token reactivates.
                        TokenStatus::Settled => {
                            if !matches!(record.policy, PostCapPolicy::LockAndRelease { .. }) {
                                return Err(fail("limit update of settled token"));
                            }
                            if limit < record.transfer_limit {
                                return Err(fail("unlock shrank the limit"));
                            }
                            record.status = TokenStatus::Active;
                        }
                        TokenStatus::Burned => {
                            return Err(fail("limit update of burned token"));
                        }
                    }
                    record.transfer_limit = limit;
                }
                EventKind::Burned { token_id } => {
                    let record = ledger
                        .tokens
                        .get_mut(&token_id)
                        .ok_or_else(|| fail("burn of unknown token"))?;
                    if record.status != TokenStatus::Active {
                        return Err(fail("burn of inactive token"));
                    }
                    record.status = TokenStatus::Burned;
                }
                EventKind::PolicyTriggered { token_id, policy } => {
                    let record = ledger
                        .tokens
                        .get_mut(&token_id)
                        .ok_or_else(|| fail("policy trigger on unknown token"))?;
                    if record.status != TokenStatus::Active {
                        return Err(fail("policy trigger on inactive token"));
                    }
                    if record.policy != policy {
                        return Err(fail("policy trigger does not match token policy"));
                    }
                    if !(record.transfer_limit > 0
                        && record.transfer_count == record.transfer_limit)
                    {
                        return Err(fail("policy trigger before cap"));
                    }
                    record.status = match policy {
                        PostCapPolicy::AutoBurn => TokenStatus::Burned,
                        _ => TokenStatus::Settled,
                    };
                }
            }
            ledger.log.push(event.clone());
        }

        if let Some((&token_id, &count)) = pending.iter().next() {
            return Err(LedgerError::InvalidHistory {
                index: events.len(),
                reason: format!(
                    "transfer {count} of token {} never acknowledged",
                    token_id.0
                ),
            });
        }
        Ok(ledger)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: Address = Address(1);
    const B: Address = Address(2);
    const C: Address = Address(3);
    const T1: TokenId = TokenId(1);

    fn freeze() -> PostCapPolicy {
        PostCapPolicy::ProvenanceFreeze
    }

    #[test]
    fn mint_starts_at_zero_count() {
        let mut ledger = Ledger::new();
        let record = ledger.mint(A, T1, 10, freeze()).unwrap();
        assert_eq!(record.transfer_count, 0);
        assert_eq!(record.transfer_limit, 10);
        assert_eq!(record.status, TokenStatus::Active);
    }

    #[test]
    fn mint_unbounded_has_unbounded_remaining() {
        let mut ledger = Ledger::new();
        ledger.mint(A, TokenId(2), 0, freeze()).unwrap();
        assert_eq!(ledger.remaining(TokenId(2)).unwrap(), Remaining::Unbounded);
    }

    #[test]
    fn duplicate_mint_rejected() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        assert_eq!(
            ledger.mint(A, T1, 5, freeze()),
            Err(LedgerError::DuplicateToken(T1))
        );
    }

    #[test]
    fn mint_to_zero_rejected() {
        let mut ledger = Ledger::new();
        assert_eq!(
            ledger.mint(Address::ZERO, T1, 10, freeze()),
            Err(LedgerError::ZeroAddressOwner)
        );
    }

    #[test]
    fn raise_limit_is_always_legal() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        for _ in 0..3 {
            let owner = ledger.token(T1).unwrap().owner;
            let next = if owner == A { B } else { A };
            ledger.transfer(owner, next, T1).unwrap();
        }
        let record = ledger.set_transfer_limit(ledger.token(T1).unwrap().owner, T1, 10).unwrap();
        assert_eq!((record.transfer_count, record.transfer_limit), (3, 10));
    }

    #[test]
    fn lower_limit_below_count_rejected() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.transfer(B, A, T1).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        assert_eq!(
            ledger.set_transfer_limit(B, T1, 2),
            Err(LedgerError::LimitBelowCount { limit: 2, count: 3 })
        );
    }

    #[test]
    fn lower_limit_to_count_blocks_next_transfer() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.transfer(B, A, T1).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        let record = ledger.set_transfer_limit(B, T1, 3).unwrap();
        assert_eq!((record.transfer_count, record.transfer_limit), (3, 3));
        assert_eq!(
            ledger.transfer(B, A, T1),
            Err(LedgerError::TransferLimitReached)
        );
    }

    #[test]
    fn unbounded_reset_needs_config_flag() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        assert_eq!(
            ledger.set_transfer_limit(A, T1, 0),
            Err(LedgerError::UnboundedResetForbidden)
        );

        let mut permissive = Ledger::with_config(LedgerConfig {
            allow_unbounded_reset: true,
        });
        permissive.mint(A, T1, 5, freeze()).unwrap();
        let record = permissive.set_transfer_limit(A, T1, 0).unwrap();
        assert_eq!(record.transfer_limit, 0);
    }

    #[test]
    fn limit_update_is_owner_only() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        assert_eq!(
            ledger.set_transfer_limit(B, T1, 10),
            Err(LedgerError::NotAuthorized)
        );
    }

    #[test]
    fn single_budget_token_allows_exactly_one_transfer() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 1, freeze()).unwrap();
        assert_eq!(ledger.transfer(A, B, T1).unwrap().transfer_count, 1);
        assert_eq!(
            ledger.transfer(B, C, T1),
            Err(LedgerError::TransferLimitReached)
        );
    }

    #[test]
    fn unbounded_token_transfers_freely() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 0, freeze()).unwrap();
        let mut holder = A;
        for _ in 0..8 {
            let next = if holder == A { B } else { A };
            ledger.transfer(holder, next, T1).unwrap();
            holder = next;
        }
        assert_eq!(ledger.transfer_count_of(T1).unwrap(), 8);
    }

    #[test]
    fn budget_of_ten_allows_ten_transfers() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        let mut holder = A;
        for i in 1..=10 {
            let next = if holder == A { B } else { A };
            ledger.transfer(holder, next, T1).unwrap();
            holder = next;
            assert_eq!(ledger.transfer_count_of(T1).unwrap(), i);
            let limit = ledger.transfer_limit_of(T1).unwrap();
            assert!(ledger.transfer_count_of(T1).unwrap() <= limit);
        }
        let next = if holder == A { B } else { A };
        assert_eq!(
            ledger.transfer(holder, next, T1),
            Err(LedgerError::TransferLimitReached)
        );
    }

    #[test]
    fn transfer_to_zero_rejected() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        assert_eq!(
            ledger.transfer(A, Address::ZERO, T1),
            Err(LedgerError::ZeroAddress)
        );
    }

    #[test]
    fn burn_keeps_count_and_blocks_transfers() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        for _ in 0..4 {
            let owner = ledger.token(T1).unwrap().owner;
            let next = if owner == A { B } else { A };
            ledger.transfer(owner, next, T1).unwrap();
        }
        let owner = ledger.token(T1).unwrap().owner;
        ledger.burn(owner, T1).unwrap();
        assert_eq!(ledger.transfer_count_of(T1).unwrap(), 4);
        assert_eq!(ledger.token(T1).unwrap().status, TokenStatus::Burned);
        assert_eq!(
            ledger.transfer(owner, B, T1),
            Err(LedgerError::TokenNotActive(T1))
        );
    }

    #[test]
    fn mint_burn_is_count_neutral() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        ledger.burn(A, T1).unwrap();
        assert_eq!(ledger.transfer_count_of(T1).unwrap(), 0);
    }

    #[test]
    fn burn_is_owner_only() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        assert_eq!(ledger.burn(B, T1), Err(LedgerError::NotAuthorized));
    }

    #[test]
    fn reads_answer_after_burn() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.transfer(B, A, T1).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.burn(B, T1).unwrap();
        assert_eq!(ledger.transfer_count_of(T1).unwrap(), 3);
        assert_eq!(ledger.transfer_limit_of(T1).unwrap(), 10);
        assert_eq!(ledger.remaining(T1).unwrap(), Remaining::Finite(7));
    }

    #[test]
    fn reads_on_unknown_token_fail() {
        let ledger = Ledger::new();
        assert_eq!(
            ledger.transfer_count_of(T1),
            Err(LedgerError::UnknownToken(T1))
        );
    }

    #[test]
    fn remaining_arithmetic() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 10, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.transfer(B, A, T1).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        assert_eq!(ledger.remaining(T1).unwrap(), Remaining::Finite(7));
    }

    fn drive_to_cap(ledger: &mut Ledger, token_id: TokenId) {
        while ledger.token(token_id).unwrap().status == TokenStatus::Active {
            let owner = ledger.token(token_id).unwrap().owner;
            let next = if owner == A { B } else { A };
            ledger.transfer(owner, next, token_id).unwrap();
        }
    }

    #[test]
    fn auto_burn_fires_at_cap() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, PostCapPolicy::AutoBurn).unwrap();
        drive_to_cap(&mut ledger, T1);
        let record = ledger.token(T1).unwrap();
        assert_eq!(record.status, TokenStatus::Burned);
        assert_eq!(record.transfer_count, 5);
    }

    #[test]
    fn soulbound_convert_settles_at_cap() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, PostCapPolicy::SoulboundConvert).unwrap();
        drive_to_cap(&mut ledger, T1);
        assert_eq!(ledger.token(T1).unwrap().status, TokenStatus::Settled);
        let owner = ledger.token(T1).unwrap().owner;
        assert_eq!(
            ledger.transfer(owner, C, T1),
            Err(LedgerError::TransferLimitReached)
        );
    }

    #[test]
    fn provenance_freeze_keeps_exactly_cap_many_transfers() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        drive_to_cap(&mut ledger, T1);
        assert_eq!(ledger.token(T1).unwrap().status, TokenStatus::Settled);
        let transfers = ledger
            .events()
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Transferred { .. }))
            .count();
        assert_eq!(transfers, 5);
        let triggers = ledger
            .events()
            .iter()
            .filter(|e| matches!(e.kind, EventKind::PolicyTriggered { .. }))
            .count();
        assert_eq!(triggers, 1);
    }

    #[test]
    fn lock_and_release_grants_new_budget() {
        let mut ledger = Ledger::new();
        ledger
            .mint(A, T1, 5, PostCapPolicy::LockAndRelease { unlock_grant: None })
            .unwrap();
        drive_to_cap(&mut ledger, T1);
        assert_eq!(ledger.token(T1).unwrap().status, TokenStatus::Settled);

        let record = ledger.unlock(T1, Some(3)).unwrap();
        assert_eq!(record.status, TokenStatus::Active);
        assert_eq!(record.transfer_limit, 8);
        assert_eq!(ledger.remaining(T1).unwrap(), Remaining::Finite(3));

        // Budget is spendable again and the policy re-fires at the new cap.
        drive_to_cap(&mut ledger, T1);
        assert_eq!(ledger.transfer_count_of(T1).unwrap(), 8);
        assert_eq!(ledger.token(T1).unwrap().status, TokenStatus::Settled);
    }

    #[test]
    fn unlock_uses_configured_grant() {
        let mut ledger = Ledger::new();
        ledger
            .mint(A, T1, 2, PostCapPolicy::LockAndRelease { unlock_grant: Some(4) })
            .unwrap();
        drive_to_cap(&mut ledger, T1);
        let record = ledger.unlock(T1, None).unwrap();
        assert_eq!(record.transfer_limit, 6);
    }

    #[test]
    fn unlock_rejects_active_or_foreign_policy() {
        let mut ledger = Ledger::new();
        ledger
            .mint(A, T1, 5, PostCapPolicy::LockAndRelease { unlock_grant: None })
            .unwrap();
        assert_eq!(ledger.unlock(T1, Some(1)), Err(LedgerError::NotLocked));

        ledger.mint(A, TokenId(2), 1, freeze()).unwrap();
        ledger.transfer(A, B, TokenId(2)).unwrap();
        assert_eq!(ledger.unlock(TokenId(2), Some(1)), Err(LedgerError::NotLocked));
    }

    #[test]
    fn manual_policy_application_after_limit_lowering() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.transfer(B, A, T1).unwrap();
        assert_eq!(
            ledger.apply_post_cap_policy(T1),
            Err(LedgerError::CapNotReached)
        );
        ledger.set_transfer_limit(A, T1, 2).unwrap();
        let record = ledger.apply_post_cap_policy(T1).unwrap();
        assert_eq!(record.status, TokenStatus::Settled);
    }

    #[test]
    fn replay_of_empty_log_is_empty() {
        let ledger = Ledger::replay(&[], LedgerConfig::default()).unwrap();
        assert_eq!(ledger, Ledger::new());
    }

    #[test]
    fn replay_reproduces_live_state() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 3, PostCapPolicy::AutoBurn).unwrap();
        ledger.mint(B, TokenId(2), 0, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        ledger.transfer(B, C, T1).unwrap();
        ledger.transfer(C, A, T1).unwrap(); // cap hit, auto-burn
        ledger.transfer(B, A, TokenId(2)).unwrap();
        ledger
            .mint(C, TokenId(3), 4, PostCapPolicy::LockAndRelease { unlock_grant: Some(2) })
            .unwrap();
        for _ in 0..4 {
            let owner = ledger.token(TokenId(3)).unwrap().owner;
            let next = if owner == C { A } else { C };
            ledger.transfer(owner, next, TokenId(3)).unwrap();
        }
        ledger.unlock(TokenId(3), None).unwrap();

        let replayed = Ledger::replay(ledger.events(), ledger.config()).unwrap();
        assert_eq!(replayed, ledger);
    }

    #[test]
    fn replay_rejects_count_before_mint() {
        let events = vec![LedgerEvent {
            seq: 0,
            kind: EventKind::TransferCountIncreased {
                token_id: T1,
                count: 1,
            },
        }];
        let err = Ledger::replay(&events, LedgerConfig::default()).unwrap_err();
        assert!(matches!(err, LedgerError::InvalidHistory { index: 0, .. }));
    }

    #[test]
    fn replay_rejects_unacknowledged_transfer() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        ledger.transfer(A, B, T1).unwrap();
        let mut events = ledger.events().to_vec();
        events.pop(); // drop the TransferCountIncreased
        let err = Ledger::replay(&events, LedgerConfig::default()).unwrap_err();
        assert!(matches!(err, LedgerError::InvalidHistory { .. }));
    }

    #[test]
    fn replay_reports_first_illegal_event() {
        let mut ledger = Ledger::new();
        ledger.mint(A, T1, 5, freeze()).unwrap();
        let mut events = ledger.events().to_vec();
        events.push(LedgerEvent {
            seq: 1,
            kind: EventKind::Burned { token_id: TokenId(9) },
        });
        let err = Ledger::replay(&events, LedgerConfig::default()).unwrap_err();
        assert_eq!(
            err,
            LedgerError::InvalidHistory {
                index: 1,
                reason: "burn of unknown token".to_string()
            }
        );
    }
}
