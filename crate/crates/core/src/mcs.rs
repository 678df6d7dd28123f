//! MCS table: modulation order and code rate per index.

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
    Qam16,
}

impl Modulation {
    /// Modulation order M.
    pub fn order(self) -> u32 {
        match self {
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }

    /// Maps the order back to the enum; only M in {4, 16} is supported.
    pub fn from_order(m: u32) -> Option<Modulation> {
        match m {
            4 => Some(Modulation::Qpsk),
            16 => Some(Modulation::Qam16),
            _ => None,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Qpsk => write!(f, "QPSK"),
            Modulation::Qam16 => write!(f, "16QAM"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub index: u32,
    pub modulation: Modulation,
    pub code_rate: f64,
}

/// Default MCS table: indices 8-10 are QPSK, 12-18 are 16-QAM, with code
/// rates monotone within each modulation. The simulator can override the
/// rates from a data file; none of the trend checks depend on the exact
/// values.
pub const DEFAULT_MCS_TABLE: [McsEntry; 10] = [
    McsEntry { index: 8, modulation: Modulation::Qpsk, code_rate: 0.44 },
    McsEntry { index: 9, modulation: Modulation::Qpsk, code_rate: 0.50 },
    McsEntry { index: 10, modulation: Modulation::Qpsk, code_rate: 0.55 },
    McsEntry { index: 12, modulation: Modulation::Qam16, code_rate: 0.37 },
    McsEntry { index: 13, modulation: Modulation::Qam16, code_rate: 0.42 },
    McsEntry { index: 14, modulation: Modulation::Qam16, code_rate: 0.48 },
    McsEntry { index: 15, modulation: Modulation::Qam16, code_rate: 0.54 },
    McsEntry { index: 16, modulation: Modulation::Qam16, code_rate: 0.60 },
    McsEntry { index: 17, modulation: Modulation::Qam16, code_rate: 0.64 },
    McsEntry { index: 18, modulation: Modulation::Qam16, code_rate: 0.68 },
];

/// Looks up an MCS index in the default table.
pub fn lookup(index: u32) -> Option<McsEntry> {
    DEFAULT_MCS_TABLE.iter().copied().find(|e| e.index == index)
}
