use chebkex::bigreal::{agreement_digits, Real};
use chebkex::chebyshev::{eval, eval_counted, Degree, Engine};
use chebkex::sampling;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rug::Integer;

fn x_at(seed: u64, digits: u32) -> Real {
    sampling::symmetric_decimal(99, digits, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

fn digits10(n: u64) -> u32 {
    n.to_string().len() as u32
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_law(seed in any::<u64>(), r in 1u64..=1_000_000, s in 1u64..=1_000_000) {
        let d = 100;
        let x = x_at(seed, d);
        let inner = eval(&x, &Degree::from_u64(s), Engine::Matrix).unwrap();
        let chained = eval(&inner, &Degree::from_u64(r), Engine::Matrix).unwrap();
        let direct = eval(&x, &Degree::from_u64(r * s), Engine::Matrix).unwrap();
        prop_assert!(agreement_digits(&chained, &direct) >= d - digits10(r * s) - 10);
    }

    #[test]
    fn commutativity(seed in any::<u64>(), r in 1u64..=1_000_000, s in 1u64..=1_000_000) {
        let d = 100;
        let x = x_at(seed, d);
        let rs = eval(&eval(&x, &Degree::from_u64(s), Engine::Cayley).unwrap(), &Degree::from_u64(r), Engine::Cayley).unwrap();
        let sr = eval(&eval(&x, &Degree::from_u64(r), Engine::Trig).unwrap(), &Degree::from_u64(s), Engine::Trig).unwrap();
        prop_assert!(agreement_digits(&rs, &sr) >= d - digits10(r * s) - 10);
    }

    #[test]
    fn engines_agree_below_recurrence_bound(seed in any::<u64>(), n in 0u64..=10_000) {
        let d = 100;
        let x = x_at(seed, d);
        let n = Degree::from_u64(n);
        let reference = eval(&x, &n, Engine::Recurrence).unwrap();
        for engine in [Engine::Trig, Engine::Matrix, Engine::Cayley] {
            let v = eval(&x, &n, engine).unwrap();
            prop_assert!(agreement_digits(&v, &reference) >= d - 10, "{engine}");
        }
    }

    #[test]
    fn unbounded_engines_agree_on_huge_degrees(seed in any::<u64>(), nd in 1u32..=300) {
        let d = 400;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let x = x_at(seed, d);
        let n = Degree::new(sampling::with_decimal_digits(nd, &mut rng)).unwrap();
        let t = eval(&x, &n, Engine::Trig).unwrap();
        let m = eval(&x, &n, Engine::Matrix).unwrap();
        let c = eval(&x, &n, Engine::Cayley).unwrap();
        let floor = d - nd - 10;
        prop_assert!(agreement_digits(&t, &m) >= floor);
        prop_assert!(agreement_digits(&m, &c) >= floor);
    }

    #[test]
    fn values_stay_in_range(seed in any::<u64>(), n in any::<u64>()) {
        let d = 60;
        let x = x_at(seed, d);
        let bound = Real::from_decimal(&format!("1e-{}", d - 15), d).unwrap() + Real::one(d).unwrap();
        for engine in [Engine::Trig, Engine::Matrix, Engine::Cayley] {
            let v = eval(&x, &Degree::from_u64(n), engine).unwrap();
            prop_assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn recurrence_op_count(n in 1u64..5_000) {
        let x = x_at(n, 20);
        let (_, ops) = eval_counted(&x, &Degree::from_u64(n), Engine::Recurrence).unwrap();
        prop_assert!(ops.muls.abs_diff(2 * n) <= 2);
    }

    #[test]
    fn matrix_op_count_per_bit(seed in any::<u64>(), bits in 2u32..2400) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = (Integer::from(1) << (bits - 1)) + sampling::below(&(Integer::from(1) << (bits - 1)), &mut rng);
        let n = Degree::new(n).unwrap();
        let (_, ops) = eval_counted(&x_at(seed, 20), &n, Engine::Matrix).unwrap();
        prop_assert!(ops.muls >= 8 * u64::from(bits));
        prop_assert!(ops.muls <= 16 * u64::from(bits));
    }
}

#[test]
fn matrix_mean_is_twelve_per_bit() {
    let mut rng = ChaCha20Rng::seed_from_u64(2325);
    let bits = 2325u32;
    let x = x_at(1, 20);
    let mut total = 0u64;
    for _ in 0..100 {
        let n = (Integer::from(1) << (bits - 1))
            + sampling::below(&(Integer::from(1) << (bits - 1)), &mut rng);
        let (_, ops) = eval_counted(&x, &Degree::new(n).unwrap(), Engine::Matrix).unwrap();
        total += ops.muls;
    }
    let mean = total as f64 / 100.0 / f64::from(bits);
    assert!((11.0..=13.0).contains(&mean), "mean {mean}");
}
