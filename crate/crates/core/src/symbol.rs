use std::fmt;

use serde::{Deserialize, Serialize};

/// One channel slot's content.
///
/// `ErasureMark` is only ever produced by an erasure channel on the receiving
/// side; parties never send it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelSymbol {
    Letter(u32),
    Silence,
    ErasureMark,
}

impl ChannelSymbol {
    /// The designated letter used by unary channels.
    pub const SIGMA: ChannelSymbol = ChannelSymbol::Letter(0);

    pub fn is_silence(self) -> bool {
        matches!(self, ChannelSymbol::Silence)
    }

    pub fn letter(self) -> Option<u32> {
        match self {
            ChannelSymbol::Letter(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for ChannelSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSymbol::Letter(l) => write!(f, "{l}"),
            ChannelSymbol::Silence => f.write_str("_"),
            ChannelSymbol::ErasureMark => f.write_str("?"),
        }
    }
}

/// A party, also used as the direction of a slot (the sender).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Role::Alice => 0,
            Role::Bob => 1,
        }
    }
}
