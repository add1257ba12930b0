use grassmannian::series::{k_min_search, series_sweep, thresholds, Verdict};
use grassmannian::space::{parse_point, GrassmannianSpace};
use grassmannian::spherical::SphericalEvaluator;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

const SPACES: [(u32, u32); 6] = [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (4, 4)];

fn points(q: u32) -> Vec<String> {
    let regular = ["1/5", "1/7", "2/9", "3/11"];
    let mut out = vec![regular[..q as usize].join(",")];
    let mut flat = vec!["1/6"; q as usize];
    out.push(flat.join(","));
    flat[0] = "0";
    out.push(flat.join(","));
    let mut mixed = vec!["1/2"; q as usize - 1];
    mixed.push("1/5");
    out.push(mixed.join(","));
    out
}

#[test]
fn k_main_converges_everywhere() {
    for (p, q) in SPACES {
        let space = GrassmannianSpace::new(p, q).unwrap();
        let e = SphericalEvaluator::new(space.clone()).unwrap();
        let k = thresholds(&space, &BigRational::zero()).unwrap().k_main;
        for t in points(q) {
            let pt = parse_point(&space, &t).unwrap();
            assert!(!pt.in_normalizer());
            let rep = series_sweep(&e, &pt, k, &BigRational::zero(), 60).unwrap();
            assert_eq!(rep.verdict, Verdict::Converging, "({p},{q}) at {t}: {:?}", rep.tail_exponent);
        }
    }
}

#[test]
fn sobolev_power_converges_at_its_threshold() {
    let space = GrassmannianSpace::new(3, 2).unwrap();
    let e = SphericalEvaluator::new(space.clone()).unwrap();
    let s = BigRational::from_integer(BigInt::from(1));
    let k = thresholds(&space, &s).unwrap().k_sobolev;
    assert_eq!(k, 2);
    let pt = parse_point(&space, "1/5,1/7").unwrap();
    assert_eq!(series_sweep(&e, &pt, k, &s, 60).unwrap().verdict, Verdict::Converging);
}

#[test]
fn k_min_examples() {
    let space = GrassmannianSpace::new(3, 2).unwrap();
    let e = SphericalEvaluator::new(space.clone()).unwrap();
    let zero = BigRational::zero();

    let regular = parse_point(&space, "1/5,1/7").unwrap();
    assert_eq!(k_min_search(&e, &regular, &zero, 6, 60).unwrap().k_min, Some(2));

    let flat = parse_point(&space, "1/6,1/6").unwrap();
    let k = k_min_search(&e, &flat, &zero, 8, 60).unwrap().k_min.unwrap();
    assert!(k <= 6);

    let sq = GrassmannianSpace::new(2, 2).unwrap();
    let e2 = SphericalEvaluator::new(sq.clone()).unwrap();
    let normalizer = parse_point(&sq, "1/2,1/2").unwrap();
    let rep = k_min_search(&e2, &normalizer, &zero, 8, 60).unwrap();
    assert!(rep.normalizer_point);
    assert_eq!(rep.to_string(), "none <= 8");
}

#[test]
fn partial_sums_non_decreasing() {
    let space = GrassmannianSpace::new(4, 3).unwrap();
    let e = SphericalEvaluator::new(space.clone()).unwrap();
    let pt = parse_point(&space, "1/5,1/7,2/9").unwrap();
    let rep = series_sweep(&e, &pt, 1, &BigRational::zero(), 30).unwrap();
    assert!(rep.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    assert!(rep.shell_sums.iter().all(|v| *v >= 0.0));
}
