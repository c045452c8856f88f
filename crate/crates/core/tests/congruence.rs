use hyptri::congruence::sl2::{self, Mat2};
use hyptri::congruence::*;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn random_elem(k: &NumberField, rng: &mut ChaCha8Rng) -> NFElem {
    let c = (0..k.degree()).map(|_| rat(rng.gen_range(-20..20), [1, 2, 3, 7][rng.gen_range(0..4)])).collect();
    k.elem(c).unwrap()
}

fn odd_primes(count: usize) -> Vec<u64> {
    (3u64..).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).take(count).collect()
}

/// Order of `a` modulo prime `p` by repeated multiplication.
fn int_order(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = x * a % p;
        k += 1;
    }
    k
}

#[test]
fn residue_maps_are_homomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for poly in ["x^2 + 1", "x^3 - x - 1", "x^4 + 1", "x^3 - 2"] {
        let k = NumberField::parse(poly).unwrap();
        for p in [5u64, 11, 13, 31] {
            let Ok(maps) = ResidueMap::all(&k, p) else { continue };
            let total: usize = maps.iter().map(|m| m.codomain().degree()).sum();
            assert_eq!(total, k.degree());
            for map in &maps {
                let f = map.codomain();
                assert_eq!(map.reduce(&k.zero()).unwrap(), f.zero());
                assert_eq!(map.reduce(&k.one()).unwrap(), f.one());
                for _ in 0..20 {
                    let (x, y) = (random_elem(&k, &mut rng), random_elem(&k, &mut rng));
                    let (rx, ry) = (map.reduce(&x).unwrap(), map.reduce(&y).unwrap());
                    assert_eq!(map.reduce(&k.add(&x, &y)).unwrap(), f.add(&rx, &ry));
                    assert_eq!(map.reduce(&k.mul(&x, &y)).unwrap(), f.mul(&rx, &ry));
                }
            }
        }
    }
    let k = NumberField::gaussian();
    let half = k.rational(rat(1, 5));
    assert_eq!(ResidueMap::all(&k, 5).unwrap()[0].reduce(&half), Err(CongruenceError::BadDenominator { p: 5 }));
}

#[test]
fn gaussian_reductions() {
    let k = NumberField::gaussian();
    let i = k.gen();
    let r3 = &ResidueMap::all(&k, 3).unwrap()[0];
    // η₃(i) generates F₉: its F₃-span with 1 has 9 elements
    let f = r3.codomain();
    let w = r3.reduce(&i).unwrap();
    let mut span: Vec<FfElem> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| f.add(&f.int(a), &f.mul(&f.int(b), &w))).collect();
    span.sort();
    span.dedup();
    assert_eq!(span.len(), 9);
    let r5 = ResidueMap::new(&k, 5, vec![3, 1]).unwrap();
    assert_eq!(r5.reduce(&i).unwrap(), vec![2]);
    // 2 is the root of x + 3 and of x² + 1 mod 5
    assert_eq!((2 * 2 + 1) % 5, 0);
    for p in odd_primes(50) {
        let maps = ResidueMap::all(&k, p).unwrap();
        let any = maps.iter().any(|m| omega_independent(&i, m).unwrap());
        let all = maps.iter().all(|m| omega_independent(&i, m).unwrap());
        assert_eq!(any, p % 4 == 3);
        assert_eq!(all, any);
    }
    let rational_omega = k.rational(rat(2, 5));
    assert!(!omega_independent(&rational_omega, r3).unwrap());
}

#[test]
fn linear_independence_congruences() {
    let k = NumberField::gaussian();
    let w = k.gen();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in [3u64, 7, 11, 19] {
        let eta = &ResidueMap::all(&k, p).unwrap()[0];
        let f = eta.codomain();
        for _ in 0..10 {
            let v = loop {
                let v = rng.gen_range(1..12i64);
                if !(v as u64).is_multiple_of(p) {
                    break v;
                }
            };
            let (ms, ns) = (rng.gen_range(-30..30i64), rng.gen_range(-30..30i64));
            let g = num_integer::gcd(num_integer::gcd(ms, ns), v);
            let (ms, ns, v) = (ms / g, ns / g, v / g);
            let y = OmegaCoords::new(ms, ns, v).unwrap().value(&k, &w);
            let ry = eta.reduce(&y).unwrap();
            let mut hits = 0;
            for m in 0..p as i64 {
                for n in 0..p as i64 {
                    if f.add(&f.int(m), &f.mul(&f.int(n), &eta.reduce(&w).unwrap())) == ry {
                        hits += 1;
                        assert_eq!((v * m - ms).rem_euclid(p as i64), 0);
                        assert_eq!((v * n - ns).rem_euclid(p as i64), 0);
                    }
                }
            }
            assert_eq!(hits, 1);
        }
    }
}

#[test]
fn order_witnesses() {
    let qf = NumberField::rationals();
    let two = qf.int(2);
    for (q, want) in [(4u64, 5u64), (10, 11), (12, 13)] {
        let w = find_prime_with_order(&qf, &two, q, &[], 1000).unwrap();
        assert_eq!(w.map.p(), want);
        assert_eq!(int_order(2, want), q);
        // the least such prime: no smaller prime gives order q
        for l in [3u64, 5, 7, 11, 13].into_iter().filter(|&l| l < want) {
            assert_ne!(int_order(2, l), q);
        }
        assert_eq!(brute_force_order(w.map.codomain(), &w.image, 1000), Some(q));
        assert_eq!(w.certificate.get("prime"), Some(want.to_string().as_str()));
    }
    // with 5 forced nonzero no prime has ord(2) = 4, since such a prime divides 15
    assert!(matches!(find_prime_with_order(&qf, &two, 4, &[qf.int(5)], 500), Err(CongruenceError::SearchExhausted { bound: 500 })));
    let k = NumberField::gaussian();
    assert_eq!(find_prime_with_order(&k, &k.gen(), 4, &[], 100).unwrap_err(), CongruenceError::RootOfUnity);
    assert_eq!(find_prime_with_order(&qf, &qf.int(-1), 2, &[], 100).unwrap_err(), CongruenceError::RootOfUnity);
    // λ = 1 + a in ℚ(i): every returned witness satisfies its constraints
    let lam = k.parse_elem("1 + a").unwrap();
    let x = k.parse_elem("3 - a").unwrap();
    for q in [3u64, 5, 8, 9, 20] {
        let w = find_prime_with_order(&k, &lam, q, std::slice::from_ref(&x), 10_000).unwrap();
        assert_eq!(brute_force_order(w.map.codomain(), &w.map.reduce(&lam).unwrap(), 1_000_000), Some(q));
        assert!(!w.map.reduce(&x).unwrap().is_empty());
    }
}

#[test]
fn trace_target_values() {
    let k = NumberField::gaussian();
    let g = [[k.int(1), k.int(0)], [k.int(1), k.int(1)]];
    let (yp, ym) = trace_targets(&k, &g).unwrap();
    assert_eq!((yp, ym), (k.int(0), k.int(-4)));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (a, b, c) = (random_elem(&k, &mut rng), random_elem(&k, &mut rng), random_elem(&k, &mut rng));
        if k.is_zero(&a) || k.is_zero(&c) {
            continue;
        }
        // d from det = 1
        let d = k.div(&k.add(&k.one(), &k.mul(&b, &c)), &a).unwrap();
        let g = [[a.clone(), b], [c.clone(), d.clone()]];
        let (yp, ym) = trace_targets(&k, &g).unwrap();
        // tr(g·[[1, y], [0, 1]]) = a + c y + d
        assert_eq!(k.add(&k.add(&a, &k.mul(&c, &yp)), &d), k.int(2));
        assert_eq!(k.add(&k.add(&a, &k.mul(&c, &ym)), &d), k.int(-2));
    }
    let g = [[k.int(1), k.int(1)], [k.int(0), k.int(1)]];
    assert_eq!(trace_targets(&k, &g), Err(CongruenceError::ZeroC));
}

#[test]
fn qomega_classification() {
    let k = NumberField::gaussian();
    let w = k.gen();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let (m, n, v) = (rng.gen_range(-40..40i64), rng.gen_range(-40..40i64), rng.gen_range(1..30i64));
        let g = num_integer::gcd(num_integer::gcd(m, n), v);
        let c = OmegaCoords::new(m / g, n / g, v / g).unwrap();
        let y = k.scale(&k.add(&k.int(m), &k.scale(&w, &rat(n, 1))), &rat(1, v));
        assert_eq!(classify_in_qomega(&k, &y, &w).unwrap(), OmegaClass::Coords(c));
    }
    let y = k.parse_elem("7 - 3a").unwrap();
    let OmegaClass::Coords(c) = classify_in_qomega(&k, &y, &w).unwrap() else { panic!() };
    assert_eq!(c.v, BigInt::from(1));
    let cubic = NumberField::parse("x^3 - 2").unwrap();
    let a = cubic.gen();
    assert_eq!(classify_in_qomega(&cubic, &cubic.mul(&a, &a), &a).unwrap(), OmegaClass::NotInQOmega);
}

/// Independent membership oracle: all residues m + n ρ(ω), componentwise.
fn image_hits(maps: &[ResidueMap], y: &NFElem, w: &NFElem) -> usize {
    let p = maps[0].p() as i64;
    let mut hits = 0;
    for m in 0..p {
        for n in 0..p {
            let all = maps.iter().all(|map| {
                let f = map.codomain();
                f.add(&f.int(m), &f.mul(&f.int(n), &map.reduce(w).unwrap())) == map.reduce(y).unwrap()
            });
            if all {
                hits += 1;
            }
        }
    }
    hits
}

#[test]
fn zomega_separation() {
    for (poly, y, w) in [("x^3 - 2", "a^2", "a"), ("x^3 - x - 1", "a^2", "a + 1/2"), ("x^4 + 1", "a^2 + 3", "a"), ("x^3 - 2", "1 + a^2", "2a")] {
        let k = NumberField::parse(poly).unwrap();
        let (y, w) = (k.parse_elem(y).unwrap(), k.parse_elem(w).unwrap());
        let sep = separate_from_zomega(&k, &y, &w, 1000).unwrap();
        assert_eq!(image_hits(&sep.maps, &y, &w), 0);
        assert!(sep.certificate.to_text().contains("verified"));
    }
    // every residue field of Q(zeta_8) equals F_p + F_p rho(a), so only products separate
    let k = NumberField::parse("x^4 + 1").unwrap();
    let sep = separate_from_zomega(&k, &k.parse_elem("a^2 + 3").unwrap(), &k.gen(), 1000).unwrap();
    assert!(sep.maps.len() > 1);
    for p in [3u64, 5, 7, 11, 13, 17] {
        for map in ResidueMap::all(&k, p).unwrap() {
            assert!(image_hits(&[map], &k.parse_elem("a^2 + 3").unwrap(), &k.gen()) > 0);
        }
    }
    let k = NumberField::gaussian();
    let y = k.parse_elem("2 + 5a").unwrap();
    assert!(matches!(separate_from_zomega(&k, &y, &k.gen(), 100), Err(CongruenceError::PreconditionViolated(_))));
}

fn lox(field: &NumberField, r: &str, u: &str, lambda: &str, coords: (i64, i64, i64), track: Track) -> LoxodromicData {
    let omega_field = NumberField::gaussian();
    LoxodromicData {
        omega: omega_field.gen(),
        omega_field,
        coords: OmegaCoords::new(coords.0, coords.1, coords.2).unwrap(),
        track,
        field: field.clone(),
        r: field.parse_elem(r).unwrap(),
        u: field.parse_elem(u).unwrap(),
        lambda: field.parse_elem(lambda).unwrap(),
    }
}

/// Scans every (m, n) residue pair for η and every exponent in one period of
/// σ(λ), evaluating traces by direct exponentiation.
fn brute_force_no_trace_hit(d: &LoxodromicData, w: &ObstructionWitness) -> bool {
    let f = w.sigma.codomain();
    let lam = w.sigma.reduce(&d.lambda).unwrap();
    let ord = brute_force_order(f, &lam, 10_000_000).unwrap();
    let y = d.coords.value(&d.omega_field, &d.omega);
    let p = w.eta.p();
    let g = w.eta.codomain();
    let (ry, rw) = (w.eta.reduce(&y).unwrap(), w.eta.reduce(&d.omega).unwrap());
    let (r, u) = (w.sigma.reduce(&d.r).unwrap(), w.sigma.reduce(&d.u).unwrap());
    let period = ord * p;
    for a in 0..p as i64 {
        for b in 0..p as i64 {
            let congruent = g.add(&g.int(a), &g.mul(&g.int(b), &rw)) == ry;
            if !congruent && w.case != ObstructionCase::TwoB {
                continue;
            }
            let c0 = if d.track == Track::M { a } else { b };
            let mut c = c0;
            while c < period as i64 {
                let t = f.add(&f.mul(&r, &f.pow_i64(&lam, c).unwrap()), &f.mul(&u, &f.pow_i64(&lam, -c).unwrap()));
                if t == f.int(2) || t == f.int(-2) {
                    return false;
                }
                c += p as i64;
            }
        }
    }
    true
}

#[test]
fn loxodromic_cases() {
    let qi = NumberField::gaussian();
    let cases = [
        (lox(&qi, "1", "2", "3", (1, 1, 2), Track::M), ObstructionCase::One),
        (lox(&qi, "1", "2", "3", (2, 1, 2), Track::N), ObstructionCase::One),
        (lox(&qi, "2", "-4", "4", (1, 0, 2), Track::M), ObstructionCase::TwoA),
        (lox(&qi, "1", "2", "2a", (1, 0, 2), Track::M), ObstructionCase::TwoB),
        (lox(&qi, "1/2", "5", "2 + a", (1, 3, 3), Track::M), ObstructionCase::One),
    ];
    for (data, want) in cases {
        let w = loxodromic_obstruction(&data, 2000).unwrap();
        assert_eq!(w.case, want);
        assert!(w.scanned > 0);
        assert!(omega_independent(&data.omega, &w.eta).unwrap());
        if want != ObstructionCase::TwoB {
            let q = if want == ObstructionCase::One { 2 * w.eta.p() } else { 4 * w.eta.p() };
            assert_eq!(brute_force_order(w.sigma.codomain(), &w.sigma.reduce(&data.lambda).unwrap(), 1_000_000), Some(q));
        } else {
            assert_eq!(w.order % 8, 0);
        }
        assert!(brute_force_no_trace_hit(&data, &w));
        assert_eq!(verify_obstruction(&data, &w).unwrap(), w.scanned);
    }
    // λ = 3, r = 1, u = 2, coords (1, 1, 2): η₃ and σ over F₇ where 3 is a primitive root
    let w = loxodromic_obstruction(&lox(&qi, "1", "2", "3", (1, 1, 2), Track::M), 2000).unwrap();
    assert_eq!((w.eta.p(), w.sigma.p()), (3, 7));
}

#[test]
fn loxodromic_preconditions() {
    let qi = NumberField::gaussian();
    // 3 is a root of x² − 2x − 3: the coset meets a parabolic
    let parabolic = lox(&qi, "1", "-3", "3", (1, 0, 1), Track::M);
    assert!(matches!(loxodromic_obstruction(&parabolic, 100), Err(CongruenceError::PreconditionViolated(_))));
    let unit_circle = lox(&qi, "1", "2", "3/5 + 4/5*a", (1, 1, 2), Track::M);
    assert!(matches!(loxodromic_obstruction(&unit_circle, 100), Err(CongruenceError::PreconditionViolated(_))));
    let ru_one = lox(&qi, "2", "1/2", "3", (1, 1, 2), Track::M);
    assert!(matches!(loxodromic_obstruction(&ru_one, 100), Err(CongruenceError::PreconditionViolated(_))));
    let divisible = lox(&qi, "1", "2", "3", (2, 1, 2), Track::M);
    assert!(matches!(loxodromic_obstruction(&divisible, 100), Err(CongruenceError::PreconditionViolated(_))));
}

#[test]
fn certificates_are_structured() {
    let qf = NumberField::rationals();
    let w = find_prime_with_order(&qf, &qf.int(2), 10, &[], 100).unwrap();
    let text = w.certificate.to_text();
    assert!(text.starts_with("certificate multiplicative-order\n"));
    assert!(text.contains("prime: 11\n") && text.contains("order: 10\n") && text.ends_with("end\n"));
}

fn mat(f: &FiniteField, v: [i64; 4]) -> Mat2 {
    v.map(|x| f.int(x))
}

#[test]
fn sl2_ground_truth() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let f = FiniteField::of_order(q).unwrap();
        let g = sl2::elements(&f);
        assert_eq!(g.len() as u64, q * (q * q - 1));
        let classes = sl2::conjugacy_classes(&f, &g);
        for class in &classes {
            let t = sl2::trace(&f, &g[class[0]]);
            assert!(class.iter().all(|&i| sl2::trace(&f, &g[i]) == t));
        }
        let class_of: Vec<usize> = {
            let mut v = vec![0; g.len()];
            for (k, c) in classes.iter().enumerate() {
                for &i in c {
                    v[i] = k;
                }
            }
            v
        };
        for i in 0..g.len() {
            for j in 0..g.len() {
                if sl2::sl2_trace_separation(&f, &g[i], &g[j]).unwrap() {
                    assert_ne!(class_of[i], class_of[j]);
                }
            }
        }
    }
    let f5 = FiniteField::of_order(5).unwrap();
    let g5 = sl2::elements(&f5);
    let x = mat(&f5, [1, 1, 0, 1]);
    let y = mat(&f5, [1, 1, 1, 2]);
    assert!(sl2::sl2_trace_separation(&f5, &x, &y).unwrap());
    assert!(!sl2::are_conjugate(&f5, &g5, &x, &y));
    assert!(sl2::are_conjugate(&f5, &g5, &x, &x));
    // equal traces, not conjugate
    let id = mat(&f5, [1, 0, 0, 1]);
    assert!(!sl2::sl2_trace_separation(&f5, &id, &x).unwrap());
    assert!(!sl2::are_conjugate(&f5, &g5, &id, &x));
    assert_eq!(sl2::sl2_trace_separation(&f5, &mat(&f5, [2, 0, 0, 2]), &x), Err(CongruenceError::NonUnimodular));
}
