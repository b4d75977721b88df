//! The config file format must survive serialize/parse unchanged, seeds
//! and float densities included.

use hamlaw_cli::config::{ExperimentConfig, ExperimentKind, GateSpec};
use proptest::prelude::*;

proptest! {
    #[test]
    fn toml_round_trip_is_lossless(
        n in 5usize..200,
        // TOML integers are i64; the file format tops out there.
        seed in 0u64..=i64::MAX as u64,
        trials in 1usize..100_000,
        c_bits in 0u64..1u64 << 52,
        k in proptest::option::of(1usize..=8),
        gate_lo in any::<f64>(),
        gate_hi in any::<f64>(),
        with_gate in any::<bool>(),
    ) {
        // A density in (0, 2) with arbitrary mantissa bits, the kind of
        // value that loses digits under careless formatting.
        let c = 2.0 * (c_bits as f64 / (1u64 << 52) as f64) + 1e-9;
        let mut cfg = ExperimentConfig {
            experiment: ExperimentKind::Lognormal,
            n,
            r: 3,
            ell: 2,
            p: None,
            c: Some(c),
            target_m: None,
            k,
            trials,
            seed,
            workers: None,
            model: None,
            overlap_t: None,
            two_stage: None,
            enum_cap: None,
            out_dir: None,
            gates: Vec::new(),
        };
        if with_gate && gate_lo.is_finite() && gate_hi.is_finite() {
            cfg.gates.push(GateSpec {
                name: "ks_log_ratio".into(),
                lo: gate_lo.min(gate_hi),
                hi: gate_lo.max(gate_hi),
            });
        }
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        // And a second pass through the printer is stable.
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }
}
