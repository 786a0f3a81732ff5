//! Fault-address bookkeeping.
//!
//! An external tester is assumed to probe every memory cell, record which
//! original addresses and spare slots came out defective, and allocate
//! healthy spares to faulty addresses. The resulting table drives both the
//! classical address translation implemented here and the quantum repair
//! circuit, which must realize exactly the same mapping.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepairError {
    /// More faulty originals than healthy spares; the chip is scrap.
    Unrepairable {
        faulty: usize,
        healthy_spares: usize,
    },
    /// An address does not fit in the declared width.
    AddressOutOfRange { address: u64, bits: u32 },
    /// A spare index is not below the spare count.
    SpareOutOfRange { index: u32, spares: u32 },
    /// Duplicate faulty address or spare assignment in a table.
    DuplicateEntry,
}

impl fmt::Display for RepairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepairError::Unrepairable {
                faulty,
                healthy_spares,
            } => write!(
                f,
                "unrepairable: {faulty} faulty addresses but only {healthy_spares} healthy spares"
            ),
            RepairError::AddressOutOfRange { address, bits } => {
                write!(f, "address {address} does not fit in {bits} bits")
            }
            RepairError::SpareOutOfRange { index, spares } => {
                write!(f, "spare index {index} out of range (spare count {spares})")
            }
            RepairError::DuplicateEntry => write!(f, "duplicate table entry"),
        }
    }
}

impl std::error::Error for RepairError {}

/// Defect state of a chip as seen by the tester.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectMap {
    address_bits: u32,
    defective_originals: BTreeSet<u64>,
    defective_spares: BTreeSet<u32>,
}

impl DefectMap {
    pub fn new(
        address_bits: u32,
        defective_originals: impl IntoIterator<Item = u64>,
        defective_spares: impl IntoIterator<Item = u32>,
    ) -> Result<Self, RepairError> {
        let originals: BTreeSet<u64> = defective_originals.into_iter().collect();
        let limit = 1u64 << address_bits;
        if let Some(&bad) = originals.iter().find(|&&a| a >= limit) {
            return Err(RepairError::AddressOutOfRange {
                address: bad,
                bits: address_bits,
            });
        }
        Ok(Self {
            address_bits,
            defective_originals: originals,
            defective_spares: defective_spares.into_iter().collect(),
        })
    }

    pub fn address_bits(&self) -> u32 {
        self.address_bits
    }

    pub fn defective_originals(&self) -> impl Iterator<Item = u64> + '_ {
        self.defective_originals.iter().copied()
    }

    pub fn defective_spares(&self) -> impl Iterator<Item = u32> + '_ {
        self.defective_spares.iter().copied()
    }
}

/// Where a query ends up: an original cell by address, or a spare by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemoryLocation {
    Original(u64),
    Spare(u32),
}

impl MemoryLocation {
    /// True exactly when the address was remapped (the repair flag).
    pub fn is_spare(&self) -> bool {
        matches!(self, MemoryLocation::Spare(_))
    }
}

impl fmt::Display for MemoryLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryLocation::Original(a) => write!(f, "{a}"),
            MemoryLocation::Spare(s) => write!(f, "S{s}"),
        }
    }
}

/// Ordered (faulty address, spare index) pairs.
///
/// Displays one entry per line as `FA(binary) -> S<index>`, the form the
/// demo command prints and consumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultAddressTable {
    address_bits: u32,
    entries: Vec<(u64, u32)>,
}

impl FaultAddressTable {
    pub fn empty(address_bits: u32) -> Self {
        Self {
            address_bits,
            entries: Vec::new(),
        }
    }

    /// Builds a table from explicit pairs, enforcing distinct faulty
    /// addresses and distinct spare assignments.
    pub fn new(address_bits: u32, entries: Vec<(u64, u32)>) -> Result<Self, RepairError> {
        let limit = 1u64 << address_bits;
        let mut fas = BTreeSet::new();
        let mut sas = BTreeSet::new();
        for &(fa, sa) in &entries {
            if fa >= limit {
                return Err(RepairError::AddressOutOfRange {
                    address: fa,
                    bits: address_bits,
                });
            }
            if !fas.insert(fa) || !sas.insert(sa) {
                return Err(RepairError::DuplicateEntry);
            }
        }
        Ok(Self {
            address_bits,
            entries,
        })
    }

    pub fn address_bits(&self) -> u32 {
        self.address_bits
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The spare assigned to `address`, if any.
    pub fn spare_for(&self, address: u64) -> Option<u32> {
        self.entries
            .iter()
            .find(|&&(fa, _)| fa == address)
            .map(|&(_, sa)| sa)
    }

    /// Classical address translation: a faulty address goes to its spare,
    /// anything else passes through unchanged.
    pub fn translate(&self, address: u64) -> MemoryLocation {
        match self.spare_for(address) {
            Some(sa) => MemoryLocation::Spare(sa),
            None => MemoryLocation::Original(address),
        }
    }

    /// Element-wise [`translate`](Self::translate); duplicates are preserved
    /// positionally.
    pub fn translate_batch(&self, addresses: &[u64]) -> Vec<MemoryLocation> {
        addresses.iter().map(|&a| self.translate(a)).collect()
    }
}

impl fmt::Display for FaultAddressTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(fa, sa) in &self.entries {
            writeln!(
                f,
                "{fa:0width$b} -> S{sa}",
                width = self.address_bits as usize
            )?;
        }
        Ok(())
    }
}

/// Allocates spares to faults: faulty originals in ascending address order
/// are paired with healthy spares in ascending index order. Defective
/// spares are skipped. Fails when the faults outnumber the healthy spares.
pub fn build_fat(map: &DefectMap, spares: u32) -> Result<FaultAddressTable, RepairError> {
    let defective_spares: BTreeSet<u32> = map.defective_spares().collect();
    if let Some(&bad) = defective_spares.iter().find(|&&s| s >= spares) {
        return Err(RepairError::SpareOutOfRange { index: bad, spares });
    }
    let mut healthy = (0..spares).filter(|s| !defective_spares.contains(s));
    let mut entries = Vec::new();
    let mut unassigned = 0usize;
    for fa in map.defective_originals() {
        match healthy.next() {
            Some(sa) => entries.push((fa, sa)),
            None => unassigned += 1,
        }
    }
    if unassigned > 0 {
        return Err(RepairError::Unrepairable {
            faulty: entries.len() + unassigned,
            healthy_spares: entries.len(),
        });
    }
    FaultAddressTable::new(map.address_bits(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(bits: u32, originals: &[u64], spares: &[u32]) -> DefectMap {
        DefectMap::new(bits, originals.iter().copied(), spares.iter().copied()).unwrap()
    }

    #[test]
    fn no_defects_empty_table() {
        let fat = build_fat(&map(2, &[], &[]), 2).unwrap();
        assert!(fat.is_empty());
    }

    #[test]
    fn single_fault_takes_first_spare() {
        let fat = build_fat(&map(2, &[0b10], &[]), 2).unwrap();
        assert_eq!(fat.entries(), &[(0b10, 0)]);
    }

    #[test]
    fn ascending_pairing() {
        let fat = build_fat(&map(3, &[0b101, 0b001, 0b011], &[]), 4).unwrap();
        assert_eq!(fat.entries(), &[(0b001, 0), (0b011, 1), (0b101, 2)]);
    }

    #[test]
    fn defective_spares_skipped() {
        let fat = build_fat(&map(2, &[0b00, 0b11], &[0, 2]), 4).unwrap();
        assert_eq!(fat.entries(), &[(0b00, 1), (0b11, 3)]);
    }

    #[test]
    fn spare_indices_outside_the_bank_rejected() {
        let err = build_fat(&map(2, &[0b01], &[5]), 2).unwrap_err();
        assert_eq!(err, RepairError::SpareOutOfRange { index: 5, spares: 2 });
    }

    #[test]
    fn unrepairable_when_faults_exceed_spares() {
        let err = build_fat(&map(2, &[0b00, 0b01, 0b11], &[]), 2).unwrap_err();
        assert_eq!(
            err,
            RepairError::Unrepairable {
                faulty: 3,
                healthy_spares: 2
            }
        );
    }

    #[test]
    fn unrepairable_counts_defective_spares() {
        let err = build_fat(&map(2, &[0b01], &[0]), 1).unwrap_err();
        assert_eq!(
            err,
            RepairError::Unrepairable {
                faulty: 1,
                healthy_spares: 0
            }
        );
    }

    #[test]
    fn translate_empty_table_is_identity() {
        let fat = FaultAddressTable::empty(2);
        for a in 0..4 {
            assert_eq!(fat.translate(a), MemoryLocation::Original(a));
            assert!(!fat.translate(a).is_spare());
        }
    }

    #[test]
    fn translate_case_split() {
        let fat = FaultAddressTable::new(2, vec![(0b10, 0)]).unwrap();
        assert_eq!(fat.translate(0b10), MemoryLocation::Spare(0));
        assert!(fat.translate(0b10).is_spare());
        assert_eq!(fat.translate(0b01), MemoryLocation::Original(0b01));
        assert!(!fat.translate(0b01).is_spare());
    }

    #[test]
    fn batch_support_excludes_faults() {
        let fat = FaultAddressTable::new(2, vec![(0b10, 0)]).unwrap();
        let out = fat.translate_batch(&[0b00, 0b01, 0b10, 0b11]);
        assert_eq!(
            out,
            vec![
                MemoryLocation::Original(0b00),
                MemoryLocation::Original(0b01),
                MemoryLocation::Spare(0),
                MemoryLocation::Original(0b11),
            ]
        );
        assert!(out.iter().all(|loc| *loc != MemoryLocation::Original(0b10)));
    }

    #[test]
    fn batch_preserves_duplicates_and_empty() {
        let fat = FaultAddressTable::new(2, vec![(0b10, 1)]).unwrap();
        assert!(fat.translate_batch(&[]).is_empty());
        let out = fat.translate_batch(&[0b10, 0b10, 0b00]);
        assert_eq!(
            out,
            vec![
                MemoryLocation::Spare(1),
                MemoryLocation::Spare(1),
                MemoryLocation::Original(0b00)
            ]
        );
    }

    #[test]
    fn display_format() {
        let fat = FaultAddressTable::new(3, vec![(0b010, 0), (0b110, 2)]).unwrap();
        assert_eq!(fat.to_string(), "010 -> S0\n110 -> S2\n");
        assert_eq!(FaultAddressTable::empty(2).to_string(), "");
    }

    #[test]
    fn duplicate_entries_rejected() {
        assert_eq!(
            FaultAddressTable::new(2, vec![(1, 0), (1, 1)]).unwrap_err(),
            RepairError::DuplicateEntry
        );
        assert_eq!(
            FaultAddressTable::new(2, vec![(1, 0), (2, 0)]).unwrap_err(),
            RepairError::DuplicateEntry
        );
    }

    #[test]
    fn out_of_range_addresses_rejected() {
        assert!(DefectMap::new(2, [4u64], []).is_err());
        assert!(FaultAddressTable::new(2, vec![(4, 0)]).is_err());
    }
}
