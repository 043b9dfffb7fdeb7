use crate::error::{Error, Result};

/// Enumeration limits. All exhaustive searches check against these before
/// they start; exceeding a cap is a [`Error::Capacity`] error, never a hang.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest finite group order that may be materialized as a table.
    pub group_order: u64,
    /// Largest number of simplices a skeleton enumeration may emit.
    pub simplices: u64,
    /// Largest number of primitive lines an orbit enumeration may touch.
    pub lines: u64,
}

pub const DEFAULT_GROUP_ORDER_CAP: u64 = 5_000;
pub const DEFAULT_SIMPLEX_CAP: u64 = 1_000_000;
pub const DEFAULT_LINE_CAP: u64 = 100_000;

/// Hard ceilings: caps may be raised by flags, but only up to 10x defaults.
pub const CEILING_FACTOR: u64 = 10;

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: DEFAULT_GROUP_ORDER_CAP,
            simplices: DEFAULT_SIMPLEX_CAP,
            lines: DEFAULT_LINE_CAP,
        }
    }
}

impl Caps {
    /// Validates user-supplied overrides against the hard ceilings.
    pub fn with_overrides(
        group_order: Option<u64>,
        simplices: Option<u64>,
        lines: Option<u64>,
    ) -> Result<Self> {
        let mut caps = Caps::default();
        if let Some(v) = group_order {
            check_ceiling("group order cap", v, DEFAULT_GROUP_ORDER_CAP)?;
            caps.group_order = v;
        }
        if let Some(v) = simplices {
            check_ceiling("simplex cap", v, DEFAULT_SIMPLEX_CAP)?;
            caps.simplices = v;
        }
        if let Some(v) = lines {
            check_ceiling("line cap", v, DEFAULT_LINE_CAP)?;
            caps.lines = v;
        }
        Ok(caps)
    }

    pub fn check_group_order(&self, order: u128) -> Result<()> {
        if order > self.group_order as u128 {
            return Err(Error::Capacity {
                what: "group order",
                value: order,
                cap: self.group_order as u128,
            });
        }
        Ok(())
    }
}

fn check_ceiling(what: &'static str, value: u64, default: u64) -> Result<()> {
    let ceiling = default.saturating_mul(CEILING_FACTOR);
    if value == 0 || value > ceiling {
        return Err(Error::Invalid(format!(
            "{what} must be between 1 and {ceiling}, got {value}"
        )));
    }
    Ok(())
}
