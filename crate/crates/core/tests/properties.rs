use bdz_core::codec::{delta_decode, delta_encode, encode_streams, EncodedStreams};
use bdz_core::generate::random_bdd_seeded;
use bdz_core::spanning::{long_tree_edges, min_long_edge_count};
use bdz_core::{build_spanning_tree, decode, encode, naive_decode, Backend, Bdd, CodecConfig};
use proptest::prelude::*;

fn arb_bdd() -> impl Strategy<Value = Bdd> {
    (any::<u64>(), 1u32..40, 3usize..1500).prop_map(|(seed, n, size)| random_bdd_seeded(seed, n, size).unwrap())
}

fn arb_config() -> impl Strategy<Value = CodecConfig> {
    (1u32..10, 0u32..6, any::<bool>(), prop::sample::select(Backend::ALL.to_vec())).prop_map(
        |(indegree_threshold, forward_min_count, delta_enabled, backend)| CodecConfig {
            indegree_threshold,
            forward_min_count,
            delta_enabled,
            backend,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn codec_roundtrip(b in arb_bdd(), config in arb_config()) {
        let bytes = encode(&b, &config).unwrap();
        let back = decode(&bytes).unwrap();
        prop_assert!(back.is_isomorphic(&b));
        // decoded numbering is canonical, so re-encoding is byte identical
        prop_assert_eq!(encode(&back, &config).unwrap(), bytes);
    }

    #[test]
    fn stream_sizes(b in arb_bdd(), config in arb_config()) {
        let s = encode_streams(&b, &config).unwrap();
        prop_assert_eq!(s.tree_bits.len(), 2 * b.len());
        prop_assert_eq!(s.tree_bits.iter().filter(|&&x| x).count(), b.len() - 1);
        prop_assert_eq!(s.sh.len(), b.edge_count() - (b.len() - 1));
        let deferred = s.sh.iter().filter(|&&v| v == 0).count();
        prop_assert_eq!(deferred, s.forward_lengths.len() + s.tail.len());
        prop_assert!(s.forward_lengths.iter().all(|&l| l >= 2));
        prop_assert_eq!(EncodedStreams::from_bytes(&s.to_bytes()).unwrap(), s);
    }

    #[test]
    fn tree_is_shortest(b in arb_bdd()) {
        let tree = build_spanning_tree(&b);
        prop_assert_eq!(tree.edge_count(), b.edge_count() / 2 + 1);
        prop_assert_eq!(long_tree_edges(&b, &tree).len(), min_long_edge_count(&b));
    }

    #[test]
    fn arbitrary_bytes_never_panic(tail in prop::collection::vec(any::<u8>(), 0..64), magic in 0usize..3) {
        let mut bytes = [&b"BDZ1"[..], b"BDN1", b""][magic].to_vec();
        bytes.extend(tail);
        let _ = decode(&bytes);
        let _ = naive_decode(&bytes);
    }

    #[test]
    fn delta_is_invertible(ids in prop::collection::vec(1i64..1_000_000, 0..200)) {
        prop_assert_eq!(delta_decode(&delta_encode(&ids)), ids);
    }
}

#[test]
fn encoding_is_deterministic() {
    for seed in 0..20 {
        let b = random_bdd_seeded(seed, 24, 4000).unwrap();
        let config = CodecConfig::default();
        assert_eq!(encode(&b, &config).unwrap(), encode(&b.clone(), &config).unwrap());
    }
}

#[test]
fn single_terminal_containers() {
    for v in [false, true] {
        let b = Bdd::constant(5, v);
        let bytes = encode(&b, &CodecConfig::default()).unwrap();
        assert_eq!(decode(&bytes).unwrap(), b);
    }
}
