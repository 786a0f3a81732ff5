//! Property suites over the repair table and the statevector engine.

use std::collections::BTreeSet;

use proptest::prelude::*;

use qram_rr::repair::{build_fat, DefectMap, MemoryLocation, RepairError};
use qram_rr::statevec::{Circuit, Control, Gate, Polarity, QubitState};

fn arb_gate(m: usize) -> impl Strategy<Value = Gate> {
    let target = 0..m;
    let xh = target
        .clone()
        .prop_flat_map(|t| prop_oneof![Just(Gate::X { target: t }), Just(Gate::H { target: t })]);
    let mcx = (0..m, proptest::collection::vec((0..m, any::<bool>()), 0..m)).prop_map(
        move |(target, raw)| {
            let mut seen = BTreeSet::new();
            let controls: Vec<Control> = raw
                .into_iter()
                .filter(|(q, _)| *q != target && seen.insert(*q))
                .map(|(qubit, positive)| Control {
                    qubit,
                    polarity: if positive {
                        Polarity::Positive
                    } else {
                        Polarity::Negative
                    },
                })
                .collect();
            Gate::Mcx { controls, target }
        },
    );
    prop_oneof![xh, mcx]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fat_translation_properties(
        bits in 1u32..=5,
        fault_mask in any::<u32>(),
        spare_defect_mask in any::<u16>(),
        spares in 0u32..=16,
    ) {
        let n = 1u64 << bits;
        let faults: Vec<u64> = (0..n).filter(|a| fault_mask >> a & 1 == 1).collect();
        let defective_spares: Vec<u32> =
            (0..spares).filter(|s| spare_defect_mask >> s & 1 == 1).collect();
        let healthy = spares as usize - defective_spares.len();
        let map = DefectMap::new(bits, faults.iter().copied(), defective_spares.iter().copied())
            .unwrap();

        match build_fat(&map, spares) {
            Err(RepairError::Unrepairable { faulty, healthy_spares }) => {
                prop_assert!(faults.len() > healthy);
                prop_assert_eq!(faulty, faults.len());
                prop_assert_eq!(healthy_spares, healthy);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
            Ok(fat) => {
                prop_assert!(faults.len() <= healthy);
                prop_assert_eq!(fat.len(), faults.len());

                let all: Vec<u64> = (0..n).collect();
                let out = fat.translate_batch(&all);

                // Injective over the full address space.
                let distinct: BTreeSet<_> = out.iter().collect();
                prop_assert_eq!(distinct.len(), out.len());

                for (a, loc) in all.iter().zip(&out) {
                    // The repair flag fires exactly on faulty addresses.
                    prop_assert_eq!(loc.is_spare(), faults.contains(a));
                    match loc {
                        // Support never contains a faulty original...
                        MemoryLocation::Original(orig) => {
                            prop_assert!(!faults.contains(orig));
                            // ...and pass-through is idempotent.
                            prop_assert_eq!(fat.translate(*orig), *loc);
                        }
                        // ...nor a defective spare.
                        MemoryLocation::Spare(s) => {
                            prop_assert!(!defective_spares.contains(s));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_circuits_preserve_norm(
        m in 1usize..=5,
        seed_gates in proptest::collection::vec(any::<u32>(), 1..40),
        input in any::<u32>(),
    ) {
        // Materialize gates within the register width.
        let mut circuit = Circuit::new(m);
        for g in &seed_gates {
            let t = (*g as usize) % m;
            match g % 3 {
                0 => circuit.x(t).unwrap(),
                1 => circuit.h(t).unwrap(),
                _ => {
                    let c = (t + 1 + (*g as usize / 7) % m.max(2)) % m;
                    if c != t {
                        let polarity = if g & 8 == 0 { Polarity::Positive } else { Polarity::Negative };
                        circuit.mcx(vec![Control { qubit: c, polarity }], t).unwrap();
                    } else {
                        circuit.x(t).unwrap();
                    }
                }
            }
        }
        let index = u64::from(input) & ((1 << m) - 1);
        let mut state = QubitState::from_basis_index(m, index).unwrap();
        state.run(&circuit).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn mcx_is_involutive_on_arbitrary_states(
        m in 1usize..=4,
        gate in (1usize..=4).prop_flat_map(arb_gate),
        seed in any::<u64>(),
    ) {
        let gate = match gate {
            // Reduce to an in-range MCX; X is its empty-control case.
            Gate::H { target } => Gate::X { target: target % m },
            Gate::X { target } => Gate::X { target: target % m },
            Gate::Mcx { controls, target } => {
                let target = target % m;
                let mut seen = BTreeSet::new();
                let controls = controls
                    .into_iter()
                    .map(|c| Control { qubit: c.qubit % m, polarity: c.polarity })
                    .filter(|c| c.qubit != target && seen.insert(c.qubit))
                    .collect();
                Gate::Mcx { controls, target }
            }
        };
        // Random-ish normalized state from a seeded Hadamard/X mix.
        let mut state = QubitState::from_basis_index(m, seed & ((1 << m) - 1)).unwrap();
        for q in 0..m {
            if seed >> (8 + q) & 1 == 1 {
                state.apply(&Gate::H { target: q }).unwrap();
            }
        }
        let before = state.clone();
        state.apply(&gate).unwrap();
        state.apply(&gate).unwrap();
        for (a, b) in state.amplitudes().iter().zip(before.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn x_and_mcx_keep_basis_states_basis(
        m in 1usize..=5,
        gates in proptest::collection::vec(any::<u32>(), 1..30),
        input in any::<u32>(),
    ) {
        let mut state =
            QubitState::from_basis_index(m, u64::from(input) & ((1 << m) - 1)).unwrap();
        for g in &gates {
            let t = (*g as usize) % m;
            if g % 2 == 0 || m == 1 {
                state.apply(&Gate::X { target: t }).unwrap();
            } else {
                let c = (t + 1) % m;
                let polarity = if g & 4 == 0 { Polarity::Positive } else { Polarity::Negative };
                state
                    .apply(&Gate::Mcx { controls: vec![Control { qubit: c, polarity }], target: t })
                    .unwrap();
            }
        }
        let support = state.amplitudes().iter().filter(|a| a.norm_sqr() > 0.0).count();
        prop_assert_eq!(support, 1);
    }
}
