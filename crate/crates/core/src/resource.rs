//! Physical-qubit resource accounting.
//!
//! Splits a qRAM of `N` original and `X` spare memory cells into memory and
//! peripheral physical-qubit counts at code distance `d`, and derives the
//! overhead the spares add relative to the `X = 0` baseline at the same
//! `(d, N)`.

use std::fmt;

use crate::qec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResourceError {
    /// Code distance must be odd and >= 3.
    InvalidDistance(u32),
    /// Logical-qubit count must be a power of two >= 2.
    NotPowerOfTwo(u32),
}

impl fmt::Display for ResourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceError::InvalidDistance(d) => {
                write!(f, "code distance must be odd and >= 3, got {d}")
            }
            ResourceError::NotPowerOfTwo(n) => {
                write!(
                    f,
                    "logical-qubit count must be a power of two >= 2, got {n}"
                )
            }
        }
    }
}

impl std::error::Error for ResourceError {}

fn patch_size(distance: u32) -> Result<u64, ResourceError> {
    qec::physical_per_logical(distance)
        .map(u64::from)
        .map_err(|_| ResourceError::InvalidDistance(distance))
}

fn log2_exact(n: u32) -> Result<u64, ResourceError> {
    if n >= 2 && n.is_power_of_two() {
        Ok(u64::from(n.trailing_zeros()))
    } else {
        Err(ResourceError::NotPowerOfTwo(n))
    }
}

/// Physical qubits in the memory cells: one `2d² - 1` patch per cell,
/// originals and spares alike.
pub fn mem_qubits(distance: u32, originals: u32, spares: u32) -> Result<u64, ResourceError> {
    Ok(patch_size(distance)? * u64::from(originals + spares))
}

/// Alternate memory count scaling linearly in the code distance,
/// `d × (N + X)`. Kept only for comparison output; [`mem_qubits`] is the
/// count used everywhere else.
pub fn mem_qubits_literal(distance: u32, originals: u32, spares: u32) -> u64 {
    u64::from(distance) * u64::from(originals + spares)
}

/// Logical qubits in the peripheral part (addressing, routing, read/write).
///
/// Without spares this is `log₂N + N + 2`: the input address, the `N - 1`
/// routing nodes, and the DQ/Readout/R-W trio. Adding spares brings in the
/// spare-address register, the repair flags, and spare routing:
/// `3·log₂N + N + 4` while `X <= 1 + log₂N`, then `2·log₂N + N + X + 3`
/// once the spare tree outgrows the address-register budget.
pub fn peri_logical_count(originals: u32, spares: u32) -> Result<u64, ResourceError> {
    let lg = log2_exact(originals)?;
    let n = u64::from(originals);
    let x = u64::from(spares);
    Ok(if x == 0 {
        lg + n + 2
    } else if x <= 1 + lg {
        3 * lg + n + 4
    } else {
        2 * lg + n + x + 3
    })
}

/// Physical qubits in the peripheral part.
pub fn peri_qubits(distance: u32, originals: u32, spares: u32) -> Result<u64, ResourceError> {
    Ok(patch_size(distance)? * peri_logical_count(originals, spares)?)
}

/// Memory/peripheral counts plus overhead against the spare-free baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceBreakdown {
    pub mem_qubits: u64,
    pub peri_qubits: u64,
    pub total_qubits: u64,
    /// `100·X/N`; independent of the code distance.
    pub mem_overhead_pct: f64,
    /// Peripheral growth over the `X = 0` count, in percent; also
    /// distance-independent.
    pub peri_overhead_pct: f64,
}

pub fn overhead(
    distance: u32,
    originals: u32,
    spares: u32,
) -> Result<ResourceBreakdown, ResourceError> {
    let mem = mem_qubits(distance, originals, spares)?;
    let peri = peri_qubits(distance, originals, spares)?;
    let base = peri_logical_count(originals, 0)? as f64;
    let with = peri_logical_count(originals, spares)? as f64;
    Ok(ResourceBreakdown {
        mem_qubits: mem,
        peri_qubits: peri,
        total_qubits: mem + peri,
        mem_overhead_pct: 100.0 * f64::from(spares) / f64::from(originals),
        peri_overhead_pct: 100.0 * (with - base) / base,
    })
}

/// One row of the reference resource grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceRow {
    pub distance: u32,
    pub num_logical: u32,
    pub num_spares: u32,
    pub breakdown: ResourceBreakdown,
}

pub const GRID_DISTANCES: [u32; 4] = [3, 5, 7, 9];
pub const GRID_LOGICAL_COUNTS: [u32; 7] = [16, 32, 64, 128, 256, 512, 1024];
pub const GRID_SPARE_COUNTS: [u32; 5] = [0, 1, 2, 4, 8];

/// The full reference grid: distances 3/5/7/9, sizes 16..1024, spares
/// 0/1/2/4/8, in lexicographic order.
pub fn reference_grid() -> Vec<ResourceRow> {
    let mut rows = Vec::new();
    for &d in &GRID_DISTANCES {
        for &n in &GRID_LOGICAL_COUNTS {
            for &x in &GRID_SPARE_COUNTS {
                rows.push(ResourceRow {
                    distance: d,
                    num_logical: n,
                    num_spares: x,
                    breakdown: overhead(d, n, x).expect("grid parameters are valid"),
                });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mem_counts() {
        assert_eq!(mem_qubits(3, 16, 0).unwrap(), 272);
        assert_eq!(mem_qubits(3, 1024, 8).unwrap(), 17_544);
        assert_eq!(mem_qubits(5, 16, 8).unwrap(), 1_176);
        assert_eq!(mem_qubits(7, 0, 0).unwrap(), 0);
    }

    #[test]
    fn mem_literal_alternate() {
        assert_eq!(mem_qubits_literal(3, 16, 0), 48);
        assert_eq!(mem_qubits_literal(3, 1024, 8), 3_096);
    }

    #[test]
    fn mem_is_linear_in_spares() {
        for d in [3u32, 5, 7, 9] {
            let patch = qec::physical_per_logical(d).unwrap() as u64;
            for n in GRID_LOGICAL_COUNTS {
                for x in GRID_SPARE_COUNTS {
                    assert_eq!(
                        mem_qubits(d, n, x).unwrap(),
                        mem_qubits(d, n, 0).unwrap() + u64::from(x) * patch
                    );
                }
            }
        }
    }

    #[test]
    fn peri_logical_counts() {
        assert_eq!(peri_logical_count(16, 0).unwrap(), 22);
        assert_eq!(peri_logical_count(16, 8).unwrap(), 35);
        assert_eq!(peri_logical_count(1024, 8).unwrap(), 1_058);
        assert_eq!(peri_logical_count(2, 0).unwrap(), 5);
    }

    #[test]
    fn peri_physical_counts() {
        assert_eq!(peri_qubits(3, 16, 0).unwrap(), 374);
        assert_eq!(peri_qubits(5, 16, 0).unwrap(), 1_078);
        assert_eq!(peri_qubits(9, 16, 8).unwrap(), 5_635);
        assert_eq!(peri_qubits(3, 2, 0).unwrap(), 85);
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert_eq!(
            peri_logical_count(0, 0),
            Err(ResourceError::NotPowerOfTwo(0))
        );
        assert_eq!(
            peri_logical_count(1, 0),
            Err(ResourceError::NotPowerOfTwo(1))
        );
        assert_eq!(
            peri_logical_count(24, 0),
            Err(ResourceError::NotPowerOfTwo(24))
        );
    }

    #[test]
    fn invalid_distance_rejected() {
        assert_eq!(mem_qubits(4, 16, 0), Err(ResourceError::InvalidDistance(4)));
        assert!(peri_qubits(1, 16, 0).is_err());
    }

    #[test]
    fn overhead_examples() {
        let b = overhead(3, 16, 8).unwrap();
        assert!((b.mem_overhead_pct - 50.0).abs() < 1e-12);
        assert!((b.peri_overhead_pct - 59.0909).abs() < 1e-3);

        let b = overhead(3, 1024, 8).unwrap();
        assert!((b.mem_overhead_pct - 0.78125).abs() < 1e-12);
        assert!((b.peri_overhead_pct - 2.1236).abs() < 1e-3);

        let b = overhead(3, 64, 0).unwrap();
        assert_eq!(b.mem_overhead_pct, 0.0);
        assert_eq!(b.peri_overhead_pct, 0.0);
    }

    #[test]
    fn overheads_are_distance_invariant() {
        for n in GRID_LOGICAL_COUNTS {
            for x in GRID_SPARE_COUNTS {
                let a = overhead(3, n, x).unwrap();
                let b = overhead(9, n, x).unwrap();
                assert_eq!(a.mem_overhead_pct, b.mem_overhead_pct);
                assert_eq!(a.peri_overhead_pct, b.peri_overhead_pct);
            }
        }
    }

    #[test]
    fn peri_branches_agree_at_boundary() {
        // 3·lg + N + 4 and 2·lg + N + X + 3 coincide when X = 1 + lg.
        for n in GRID_LOGICAL_COUNTS {
            let lg = n.trailing_zeros();
            let x = 1 + lg;
            let at_boundary = peri_logical_count(n, x).unwrap();
            assert_eq!(at_boundary, u64::from(3 * lg + n + 4));
            assert_eq!(at_boundary, u64::from(2 * lg + n + x + 3));
        }
    }

    #[test]
    fn grid_shape() {
        let rows = reference_grid();
        assert_eq!(rows.len(), 4 * 7 * 5);
        // Spot rows quoted from the reference grid.
        let find = |d, n, x| {
            rows.iter()
                .find(|r| r.distance == d && r.num_logical == n && r.num_spares == x)
                .unwrap()
                .breakdown
        };
        assert_eq!(find(7, 128, 4).mem_qubits, 12_804);
        assert_eq!(find(7, 128, 4).peri_qubits, 14_841);
        assert_eq!(find(9, 1024, 8).mem_qubits, 166_152);
        assert_eq!(find(9, 1024, 8).peri_qubits, 170_338);
    }
}
