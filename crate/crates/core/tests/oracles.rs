//! Generated instances and codec outputs checked against independent
//! brute-force oracles.

use bdz_core::builder::{apply, from_truth_table, negate, BoolOp};
use bdz_core::generate::{queens, random_bdd_seeded, rook};
use bdz_core::{
    decode, encode, naive_decode, naive_encode, read_bdd_text, write_bdd_text, Assignment, Backend, Bdd,
    CodecConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counts n-queens solutions by row-wise backtracking.
fn backtrack_queens(n: usize) -> u64 {
    fn place(row: usize, n: usize, cols: &mut Vec<usize>) -> u64 {
        if row == n {
            return 1;
        }
        let mut total = 0;
        for c in 0..n {
            let safe = cols.iter().enumerate().all(|(r, &pc)| pc != c && row - r != c.abs_diff(pc));
            if safe {
                cols.push(c);
                total += place(row + 1, n, cols);
                cols.pop();
            }
        }
        total
    }
    place(0, n, &mut Vec::new())
}

fn board_ok(bits: &[bool], rows: usize, cols: usize, queens: bool) -> bool {
    let at = |r: usize, c: usize| bits[r * cols + c];
    let placed: Vec<(usize, usize)> =
        (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).filter(|&(r, c)| at(r, c)).collect();
    if placed.len() != rows || (0..rows).any(|r| placed.iter().filter(|p| p.0 == r).count() != 1) {
        return false;
    }
    placed.iter().enumerate().all(|(i, a)| {
        placed[i + 1..].iter().all(|b| a.1 != b.1 && (!queens || a.0.abs_diff(b.0) != a.1.abs_diff(b.1)))
    })
}

fn all_assignments(n: u32) -> impl Iterator<Item = Assignment> {
    (0..1u64 << n).map(move |i| Assignment::from_index(n, i))
}

#[test]
fn queens_counts_match_backtracking() {
    for n in 1..=8 {
        let b = queens(n).unwrap();
        assert_eq!(b.count_solutions(), backtrack_queens(n as usize).into(), "n = {n}");
    }
    assert_eq!(backtrack_queens(8), 92);
}

#[test]
fn queens_semantics_match_board_check() {
    for n in 1..=4u32 {
        let b = queens(n).unwrap();
        for a in all_assignments(n * n) {
            let expected = board_ok(&a.0, n as usize, n as usize, true);
            assert_eq!(b.evaluate(&a).unwrap(), expected);
        }
    }
}

#[test]
fn rook_counts_are_falling_factorials() {
    for cols in 1..=8u32 {
        for rows in 1..=cols {
            let expected: u64 = (cols - rows + 1..=cols).map(u64::from).product();
            assert_eq!(rook(rows, cols).unwrap().count_solutions(), expected.into(), "{rows}x{cols}");
        }
    }
}

#[test]
fn rook_semantics_match_board_check() {
    for (rows, cols) in [(1, 3), (2, 2), (2, 4), (3, 3), (3, 4)] {
        let b = rook(rows, cols).unwrap();
        let mut count = 0u64;
        for a in all_assignments(rows * cols) {
            let expected = board_ok(&a.0, rows as usize, cols as usize, false);
            count += expected as u64;
            assert_eq!(b.evaluate(&a).unwrap(), expected);
        }
        assert_eq!(b.count_solutions(), count.into());
    }
    assert_eq!(rook(4, 4).unwrap().count_solutions(), 24u32.into());
}

#[test]
fn truth_tables_roundtrip_through_every_encoder() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(1..=9);
        let density = rng.random_range(0.05..0.95);
        let table: Vec<bool> = (0..1usize << n).map(|_| rng.random_bool(density)).collect();
        let b = from_truth_table(n, &table).unwrap();
        let via_codec = decode(&encode(&b, &CodecConfig::default()).unwrap()).unwrap();
        let via_naive = naive_decode(&naive_encode(&b, Backend::Deflate)).unwrap();
        for (i, a) in all_assignments(n).enumerate() {
            assert_eq!(b.evaluate(&a).unwrap(), table[i]);
            assert_eq!(via_codec.evaluate(&a).unwrap(), table[i]);
            assert_eq!(via_naive.evaluate(&a).unwrap(), table[i]);
        }
        let ones = table.iter().filter(|&&v| v).count() as u64;
        assert_eq!(b.count_solutions(), ones.into());
    }
}

#[test]
fn apply_matches_pointwise_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let n = rng.random_range(1..=8);
        let ta: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
        let tb: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
        let (a, b) = (from_truth_table(n, &ta).unwrap(), from_truth_table(n, &tb).unwrap());
        for op in [BoolOp::And, BoolOp::Or, BoolOp::Xor] {
            let c = apply(op, &a, &b).unwrap();
            let expected: Vec<bool> = ta.iter().zip(&tb).map(|(&x, &y)| op.eval(x, y)).collect();
            assert!(c.is_isomorphic(&from_truth_table(n, &expected).unwrap()), "{op:?}");
        }
        let not_a: Vec<bool> = ta.iter().map(|v| !v).collect();
        assert!(negate(&a).is_isomorphic(&from_truth_table(n, &not_a).unwrap()));
    }
}

#[test]
fn random_counts_match_enumeration() {
    for seed in 0..100 {
        let n = 1 + (seed % 12) as u32;
        let b = random_bdd_seeded(seed, n, 3 + (seed as usize * 37) % 400).unwrap();
        let count = all_assignments(n).filter(|a| b.evaluate(a).unwrap()).count() as u64;
        assert_eq!(b.count_solutions(), count.into(), "seed {seed}");
    }
}

#[test]
fn text_roundtrip_on_random_corpus() {
    for seed in 0..300 {
        let b = random_bdd_seeded(seed, 2 + (seed % 30) as u32, 3 + (seed as usize * 53) % 2000).unwrap();
        let text = write_bdd_text(&b);
        let back = read_bdd_text(&text).unwrap();
        assert!(back.is_isomorphic(&b), "seed {seed}");
        assert_eq!(write_bdd_text(&back), text);
        assert_eq!(write_bdd_text(&b), text);
    }
}

#[test]
fn naive_and_codec_decode_to_the_same_numbering() {
    for seed in 0..100 {
        let b = random_bdd_seeded(1000 + seed, 3 + (seed % 20) as u32, 3 + (seed as usize * 71) % 3000).unwrap();
        let via_codec = decode(&encode(&b, &CodecConfig::default()).unwrap()).unwrap();
        let via_naive = naive_decode(&naive_encode(&b, Backend::Lzma)).unwrap();
        assert_eq!(via_codec, via_naive, "seed {seed}");
        assert!(via_codec.is_isomorphic(&b));
    }
}

#[test]
fn structured_corpus_favours_the_codec() {
    let corpus: Vec<(String, Bdd)> = (4..=8)
        .map(|n| (format!("queens{n}"), queens(n).unwrap()))
        .chain([(6, 6), (8, 8), (5, 10), (9, 9)].map(|(r, c)| (format!("rook{r}x{c}"), rook(r, c).unwrap())))
        .collect();
    for (name, b) in &corpus {
        for backend in [Backend::Deflate, Backend::Lzma] {
            let codec = encode(b, &CodecConfig { backend, ..Default::default() }).unwrap().len();
            let naive = naive_encode(b, backend).len();
            assert!(naive > codec, "{name} {backend}: naive {naive} vs codec {codec}");
        }
    }
}
