mod common;

use proptest::prelude::*;

use monotone_minplus::config::{Engine, SolverConfig};
use monotone_minplus::format::Kind;
use monotone_minplus::gen::{gen, Family};
use monotone_minplus::harness;
use monotone_minplus::instance::Variant;
use monotone_minplus::matrix::{IntArray, IntMatrix, MonotoneTag};
use monotone_minplus::product_col::{self, normalize_nonincreasing, rotate_to_problem2prime, twopointer_direct};
use monotone_minplus::product_row;
use monotone_minplus::reduction::{normalize_A, shift_residues, shift_residues_conv};
use monotone_minplus::segments::{ConvLines, Lines, MatrixLines};
use monotone_minplus::{convolution, minplus_conv_monotone, minplus_monotone_col, minplus_monotone_row};

use common::*;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

/// A matrix with entries in `[lo, hi]`.
fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(lo..=hi, rows * cols).prop_map(move |v| IntMatrix::new(rows, cols, v).unwrap())
}

fn row_sorted(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(lo..=hi, cols), rows).prop_map(|mut rs| {
        rs.iter_mut().for_each(|r| r.sort_unstable());
        IntMatrix::from_rows(&rs).unwrap()
    })
}

fn sorted(n: usize, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1..=hi, n).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

/// Every position of every line obeys the two high/low facts: a high-part
/// mismatch forces `|Delta| >= 7M/10`, agreement forces `|Delta| <= 3M/10`.
fn high_low_facts<L: Lines + ?Sized>(lines: &L, m: i64) -> Result<(), TestCaseError> {
    for l in 0..lines.line_count() {
        let w = lines.window(l);
        for p in w.start..=w.end {
            let d = lines.delta(l, p).abs();
            if lines.high_mismatch(l, p) {
                prop_assert!(10 * d >= 7 * m, "line {l} pos {p}: |delta| {d} with M {m}");
            } else {
                prop_assert!(10 * d <= 3 * m, "line {l} pos {p}: |delta| {d} with M {m}");
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn row_product_matches_double_loop(
        (a, b, bound) in (1usize..=7, 1usize..=7, 1usize..=7, 1i64..=60).prop_flat_map(|(r, k, c, bound)| {
            (matrix(r, k, 1, bound), row_sorted(k, c, 1, bound), Just(bound))
        }),
        engine in prop::sample::select(vec![Engine::Verification, Engine::Direct, Engine::Auto]),
    ) {
        let cfg = SolverConfig { engine, ..SolverConfig::strict() };
        let got = minplus_monotone_row(&a, &b, &MonotoneTag::row(bound).unwrap(), &cfg).unwrap();
        prop_assert_eq!(got.to_rows(), naive_product(&a, &b));
        // Row-monotone B keeps every output row non-decreasing.
        prop_assert!(got.is_row_monotone());
    }

    #[test]
    fn col_product_matches_double_loop(
        (a, b, bound) in (1usize..=7, 1usize..=7, 1usize..=7, 1i64..=60).prop_flat_map(|(r, k, c, bound)| {
            (matrix(r, k, 1, bound), row_sorted(c, k, 1, bound).prop_map(|m| m.transpose()), Just(bound))
        }),
    ) {
        let got = minplus_monotone_col(&a, &b, &MonotoneTag::column(bound).unwrap(), &SolverConfig::strict()).unwrap();
        prop_assert_eq!(got.to_rows(), naive_product(&a, &b));
    }

    #[test]
    fn convolution_is_attained_lower_envelope(
        (a, b, bound) in (1usize..=40, 1i64..=200).prop_flat_map(|(n, bound)| (sorted(n, bound), sorted(n, bound), Just(bound))),
    ) {
        let tag = MonotoneTag::array(bound).unwrap();
        let got = minplus_conv_monotone(&IntArray::new(a.clone()), &IntArray::new(b.clone()), &tag, &SolverConfig::strict()).unwrap();
        let c = got.as_slice();
        let n = a.len();
        prop_assert_eq!(c.len(), 2 * n - 1);
        for (k, &ck) in c.iter().enumerate() {
            let sums: Vec<i64> = (0..n).filter(|&i| k >= i && k - i < n).map(|i| a[i] + b[k - i]).collect();
            prop_assert!(sums.iter().all(|&x| ck <= x));
            prop_assert!(sums.contains(&ck));
        }
    }

    #[test]
    fn normalized_rows_readd_to_the_product(
        (a, b, bound) in (1usize..=6, 1usize..=6, 1usize..=6, 1i64..=30).prop_flat_map(|(r, k, c, bound)| {
            (matrix(r, k, -3 * bound, 3 * bound), row_sorted(k, c, 0, bound), Just(bound))
        }),
    ) {
        let (an, offsets) = normalize_A(&a, bound);
        prop_assert!(an.min_entry().unwrap() >= 0 && an.max_entry().unwrap() <= 2 * bound + 1);
        let readded: Vec<Vec<i64>> = naive_product(&an, &b)
            .into_iter()
            .zip(&offsets)
            .map(|(row, d)| row.into_iter().map(|x| x + d).collect())
            .collect();
        prop_assert_eq!(readded, naive_product(&a, &b));
    }

    #[test]
    fn rotation_is_an_involution(
        (a, b) in (1usize..=6, 1usize..=6, 1usize..=6).prop_flat_map(|(r, k, c)| {
            (matrix(r, k, 1, 40), row_sorted(c, k, 1, 40).prop_map(|m| m.transpose()))
        }),
    ) {
        let a = normalize_nonincreasing(&a);
        let c = IntMatrix::from_rows(&naive_product(&a, &b)).unwrap();
        let w = 80;
        let once = rotate_to_problem2prime(&a, &b, &c, w).unwrap();
        prop_assert!(once.b.is_row_monotone() && once.c.is_row_monotone());
        let twice = rotate_to_problem2prime(&once.a, &once.b, &once.c, w).unwrap();
        prop_assert_eq!(&twice.a, &a);
        prop_assert_eq!(&twice.b, &b);
        prop_assert_eq!(&twice.c, &c);
    }

    #[test]
    fn two_pointer_agrees_with_counting(n in 1usize..=14, bound in 1i64..=80, seed in 0u64..10_000, family in family()) {
        let f = gen(Kind::VerifyCol, n, bound, seed, family).unwrap();
        let inst = harness::matrix_instance(&f).unwrap();
        let direct = twopointer_direct(inst.a(), inst.b(), inst.c());
        let counted = product_col::solve_verification_col(&inst, &SolverConfig::strict()).unwrap();
        prop_assert_eq!(direct.bits(), counted.bits());
        let brute = witness_ik(inst.a(), inst.b(), inst.c()).concat();
        prop_assert_eq!(counted.bits(), brute.as_slice());
    }

    #[test]
    fn match_counts_dominate_spurious_counts(
        n in 1usize..=14, bound in 1i64..=80, seed in 0u64..10_000, family in family(),
        kind in prop::sample::select(vec![Kind::VerifyRow, Kind::VerifyCol, Kind::VerifyConv]),
    ) {
        let f = gen(kind, n, bound, seed, family).unwrap();
        let cfg = SolverConfig::strict();
        let r = match kind {
            Kind::VerifyConv => convolution::solve_verification_conv_detailed(&harness::conv_instance(&f).unwrap(), &cfg),
            _ => {
                let inst = harness::matrix_instance(&f).unwrap();
                match inst.variant() {
                    Variant::Row => product_row::solve_verification_row_detailed(&inst, &cfg),
                    Variant::Col => product_col::solve_verification_col_detailed(&inst, &cfg),
                }
            }
        }
        .unwrap();
        let d = &r.detail;
        prop_assert_eq!(d.s.len(), d.s_prime.len());
        for (cell, (s, sp)) in d.s.iter().zip(&d.s_prime).enumerate() {
            prop_assert!(s >= sp, "cell {cell}: s {s} < s' {sp}");
            prop_assert_eq!(r.mask.bits()[cell], s > sp);
        }
    }

    #[test]
    fn promised_instances_obey_high_low_facts(
        n in 1usize..=12, bound in 1i64..=80, seed in 0u64..10_000, family in family(),
        kind in prop::sample::select(vec![Kind::VerifyRow, Kind::VerifyCol, Kind::VerifyConv]),
    ) {
        let f = gen(kind, n, bound, seed, family).unwrap();
        match kind {
            Kind::VerifyConv => {
                let inst = harness::conv_instance(&f).unwrap();
                high_low_facts(&ConvLines::full(&inst, inst.m()), inst.m())?;
            }
            _ => {
                let inst = harness::matrix_instance(&f).unwrap();
                high_low_facts(&MatrixLines::full(&inst, inst.m()), inst.m())?;
            }
        }
    }

    #[test]
    fn every_shifted_pair_is_promised(
        (a, b) in (1usize..=5, 1usize..=5, 1usize..=5).prop_flat_map(|(r, k, c)| {
            (matrix(r, k, 0, 900), row_sorted(k, c, 0, 900))
        }),
        m in prop::sample::select(vec![100i64, 200, 300]),
    ) {
        let c = IntMatrix::from_rows(&naive_product(&a, &b)).unwrap();
        let sh = shift_residues(&a, &b, &c, m).unwrap();
        let mut witnessed = vec![false; c.rows() * c.cols()];
        for item in sh.instances(Variant::Row) {
            // Construction validates residues, nonnegativity and monotonicity.
            let (_, inst) = item.unwrap();
            prop_assert!(inst.b().is_row_monotone() && inst.c().is_row_monotone());
            for (cell, w) in witness_ij(inst.a(), inst.b(), inst.c()).concat().into_iter().enumerate() {
                witnessed[cell] |= w;
            }
        }
        // C is the exact product, so every cell has a witness in some pair.
        prop_assert!(witnessed.iter().all(|&w| w));
    }

    #[test]
    fn every_shifted_conv_pair_is_promised(
        (a, b) in (1usize..=12).prop_flat_map(|n| (sorted(n, 900), sorted(n, 900))),
        m in prop::sample::select(vec![100i64, 200]),
    ) {
        let c = naive_conv(&a, &b);
        let sh = shift_residues_conv(&IntArray::new(a.clone()), &IntArray::new(b.clone()), &IntArray::new(c.clone()), m).unwrap();
        let mut witnessed = vec![false; c.len()];
        for s in 0..100 {
            for t in 0..100 {
                let inst = sh.instance(s, t).unwrap();
                prop_assert!(inst.a().is_monotone() && inst.b().is_monotone());
                for (k, w) in witness_k(inst.a().as_slice(), inst.b().as_slice(), inst.c().as_slice()).into_iter().enumerate() {
                    witnessed[k] |= w;
                }
            }
        }
        prop_assert!(witnessed.iter().all(|&w| w));
    }

    #[test]
    fn generation_and_solving_are_deterministic(
        n in 1usize..=10, bound in 1i64..=50, seed in any::<u64>(), family in family(),
        kind in prop::sample::select(Kind::ALL.to_vec()),
    ) {
        let f = gen(kind, n, bound, seed, family).unwrap();
        prop_assert_eq!(&gen(kind, n, bound, seed, family).unwrap(), &f);
        let cfg = SolverConfig::default();
        let one = harness::run(&f, harness::RunEngine::Det, &cfg).unwrap();
        let two = harness::run(&f, harness::RunEngine::Det, &cfg).unwrap();
        prop_assert_eq!(one.output.to_canonical(), two.output.to_canonical());
        prop_assert_eq!(one.report.checksum, two.report.checksum);
        prop_assert_eq!(one.report.modulus, two.report.modulus);
    }
}
